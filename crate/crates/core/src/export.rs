//! Serializable bundle tying a tower to its decomposition data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parse::render_element;
use crate::spaces::{space_a, CensusReport, FormSpace};
use crate::tower::{make_tower, KElem, TowerField, TowerParams};
use crate::verify::CheckResult;

/// Everything needed to reproduce and check a decomposition offline:
/// defining polynomials, the subspace bases, and any attached reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExportBundle {
    pub params: TowerParams,
    /// Defining polynomial of K over GF(p), low-degree coefficients first.
    pub h: Vec<u64>,
    /// Defining polynomial of L over K, low-degree coefficients first.
    pub g: Vec<KElem>,
    /// Alternating-space components: A^1..A^m for odd n, the involution
    /// space then A^1..A^m for even n.
    pub alt_spaces: Vec<FormSpace>,
    /// Bilinear components B_1..B_n (exponents 0..n-1), when requested.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bil_spaces: Vec<FormSpace>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub censuses: Vec<CensusReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
}

/// Builds the canonical bundle for a tower.
pub fn build_bundle(tower: &TowerField, with_bilinear: bool) -> Result<ExportBundle> {
    let n = tower.n();
    let mut alt_spaces = Vec::new();
    if n % 2 == 0 {
        alt_spaces.push(space_a(tower, n / 2)?);
    }
    let m = if n % 2 == 1 { (n - 1) / 2 } else { (n - 2) / 2 };
    for i in 1..=m {
        alt_spaces.push(space_a(tower, i)?);
    }
    let bil_spaces = if with_bilinear {
        (0..n)
            .map(|t| crate::spaces::space_b_bil(tower, t))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(ExportBundle {
        params: tower.params(),
        h: tower.h().to_vec(),
        g: tower.g().to_vec(),
        alt_spaces,
        bil_spaces,
        censuses: Vec::new(),
        checks: Vec::new(),
    })
}

/// Reconstructs the tower from a bundle and validates its polynomials
/// against the canonical construction.
pub fn import_bundle(bundle: &ExportBundle, size_guard: u128) -> Result<TowerField> {
    let tower = make_tower(bundle.params, size_guard)?;
    if tower.h() != bundle.h.as_slice() || tower.g() != bundle.g {
        return Err(Error::Parse(
            "bundle polynomials do not match the canonical tower".into(),
        ));
    }
    for sp in bundle.alt_spaces.iter().chain(bundle.bil_spaces.iter()) {
        if sp.params != bundle.params {
            return Err(Error::TowerMismatch);
        }
        for form in &sp.basis {
            if form.n() != tower.n() {
                return Err(Error::TowerMismatch);
            }
        }
    }
    Ok(tower)
}

/// Human-readable rendering of a bundle (Gram matrices as K-coefficient
/// grids, census tallies, check lines).
pub fn render_bundle(tower: &TowerField, bundle: &ExportBundle) -> String {
    let mut out = String::new();
    let p = bundle.params;
    out.push_str(&format!("tower p={} s={} n={}\n", p.p, p.s, p.n));
    out.push_str(&format!("h = {:?}\n", bundle.h));
    out.push_str(&format!(
        "g = {:?}\n",
        bundle.g.iter().map(|c| c.coeffs().to_vec()).collect::<Vec<_>>()
    ));
    for sp in bundle.alt_spaces.iter().chain(bundle.bil_spaces.iter()) {
        out.push_str(&format!(
            "\nspace {:?} indices {:?} dim {}\n",
            sp.kind,
            sp.indices,
            sp.dim()
        ));
        for (b, form) in sp.basis.iter().enumerate() {
            out.push_str(&format!("  basis[{b}]\n"));
            for row in 0..form.n() {
                let cells: Vec<String> = (0..form.n())
                    .map(|col| format!("{:?}", form.entry(row, col).coeffs()))
                    .collect();
                out.push_str(&format!("    {}\n", cells.join(" ")));
            }
        }
    }
    for c in &bundle.censuses {
        out.push_str(&format!(
            "\ncensus {} mode {:?} inspected {}\n",
            c.space, c.mode, c.inspected
        ));
        for (rank, count) in &c.ranks {
            out.push_str(&format!("  rank {rank}: {count}\n"));
        }
        for (rank, tuple) in &c.witnesses {
            let rendered: Vec<String> =
                tuple.iter().map(|x| render_element(tower, x)).collect();
            out.push_str(&format!("  witness rank {rank}: ({})\n", rendered.join(", ")));
        }
    }
    for c in &bundle.checks {
        out.push_str(&format!(
            "\ncheck {}: {} ({}){}\n",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.detail,
            if c.sampled { " [sampled]" } else { "" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::DEFAULT_SIZE_GUARD;

    #[test]
    fn json_round_trip() {
        for (p, s, n) in [(2, 1, 5), (2, 1, 4), (3, 1, 3)] {
            let tower = make_tower(TowerParams { p, s, n }, DEFAULT_SIZE_GUARD).unwrap();
            let bundle = build_bundle(&tower, true).unwrap();
            let json = serde_json::to_string(&bundle).unwrap();
            let back: ExportBundle = serde_json::from_str(&json).unwrap();
            let tower2 = import_bundle(&back, DEFAULT_SIZE_GUARD).unwrap();
            assert_eq!(tower2.params(), tower.params());
            assert_eq!(serde_json::to_string(&back).unwrap(), json);
        }
    }

    #[test]
    fn import_rejects_wrong_polynomials() {
        let tower = make_tower(TowerParams { p: 2, s: 1, n: 3 }, DEFAULT_SIZE_GUARD).unwrap();
        let mut bundle = build_bundle(&tower, false).unwrap();
        bundle.h = vec![1, 1, 1];
        assert!(import_bundle(&bundle, DEFAULT_SIZE_GUARD).is_err());
    }

    #[test]
    fn bundle_shapes() {
        let odd = make_tower(TowerParams { p: 2, s: 1, n: 5 }, DEFAULT_SIZE_GUARD).unwrap();
        let b = build_bundle(&odd, false).unwrap();
        assert_eq!(b.alt_spaces.len(), 2);
        assert!(b.alt_spaces.iter().all(|s| s.dim() == 5));

        let even = make_tower(TowerParams { p: 2, s: 1, n: 6 }, DEFAULT_SIZE_GUARD).unwrap();
        let b = build_bundle(&even, true).unwrap();
        assert_eq!(b.alt_spaces.len(), 3);
        assert_eq!(b.alt_spaces[0].dim(), 3);
        assert_eq!(b.bil_spaces.len(), 6);
    }
}
