//! Trace-built bilinear forms on L × L and their exact rank analysis.
//!
//! The alternating family is f_{b,σ^i}(x, y) = Tr(b(xσ^i(y) - σ^i(x)y));
//! the general family is f(x, y) = Tr((Σ_t b_t σ^{t-1}(x)) y). Forms are
//! held as n×n Gram matrices over K with respect to the basis
//! {1, v, ..., v^{n-1}}, row index = first argument.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{mat_rank, nullspace, Field};
use crate::error::{Error, Result};
use crate::tower::{FieldElement, KElem, TowerField, TowerParams};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// f_{b,σ^i}
    Alt { b: FieldElement, i: usize },
    /// f_{b_1,...,b_n} with σ_t = σ^{t-1}
    General { bs: Vec<FieldElement> },
}

/// Gram matrix of a K-bilinear form on L × L.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramForm {
    pub params: TowerParams,
    /// n×n, entries[j][k] = f(v^j, v^k)
    pub entries: Vec<Vec<KElem>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<Provenance>,
}

impl GramForm {
    pub fn n(&self) -> usize {
        self.entries.len()
    }
    pub fn entry(&self, j: usize, k: usize) -> &KElem {
        &self.entries[j][k]
    }

    pub fn zero(tower: &TowerField) -> Self {
        let n = tower.n();
        GramForm {
            params: tower.params(),
            entries: vec![vec![tower.k_zero(); n]; n],
            provenance: None,
        }
    }

    pub fn is_zero(&self, tower: &TowerField) -> bool {
        self.entries
            .iter()
            .all(|row| row.iter().all(|e| tower.k_is_zero(e)))
    }

    /// Alternating means zero diagonal and skew symmetry; in
    /// characteristic 2 the two conditions are zero diagonal plus symmetry.
    pub fn is_alternating(&self, tower: &TowerField) -> bool {
        let n = self.n();
        for j in 0..n {
            if !tower.k_is_zero(&self.entries[j][j]) {
                return false;
            }
            for k in (j + 1)..n {
                if self.entries[j][k] != tower.k_neg(&self.entries[k][j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn add(&self, tower: &TowerField, other: &GramForm) -> Result<GramForm> {
        if self.params != other.params {
            return Err(Error::TowerMismatch);
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| tower.k_add(a, b)).collect())
            .collect();
        Ok(GramForm {
            params: self.params,
            entries,
            provenance: None,
        })
    }

    pub fn scale(&self, tower: &TowerField, k: &KElem) -> GramForm {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| tower.k_mul(k, e)).collect())
            .collect();
        GramForm {
            params: self.params,
            entries,
            provenance: None,
        }
    }

    /// Row-major flattening of the Gram matrix, used to treat forms as
    /// coordinate vectors of length n².
    pub fn flatten(&self) -> Vec<KElem> {
        self.entries.iter().flatten().cloned().collect()
    }
}

/// Rank, radical and (when provenance allows) the closed-form rank
/// prediction for a form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub radical_basis: Vec<FieldElement>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub predicted: Option<RankPrediction>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankBranch {
    /// ord(σ^i) odd: rank n - n/ord, constant over b ≠ 0.
    OddConstant,
    /// ord(σ^i) = 2 with b not fixed: rank n.
    Involution,
    /// ord(σ^i) = 2 with σ^i(b) = b (or b = 0): the zero form.
    ZeroForm,
    /// ord(σ^i) = 2r > 2, norm condition solvable: rank n - n/r.
    EvenSolvable,
    /// ord(σ^i) = 2r > 2, norm condition unsolvable: rank n.
    EvenUnsolvable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankPrediction {
    pub rank: usize,
    pub branch: RankBranch,
}

/// Builds the Gram matrix of f_{b,σ^i}. Requires σ^i ≠ identity.
pub fn build_alt_form(tower: &TowerField, b: &FieldElement, i: usize) -> Result<GramForm> {
    let n = tower.n();
    if i % n == 0 {
        return Err(Error::IdentityAutomorphism(i));
    }
    let i = i % n;
    let mut entries = vec![vec![tower.k_zero(); n]; n];
    for j in 0..n {
        for k in 0..n {
            // Tr(b (v^j σ^i(v^k) - σ^i(v^j) v^k))
            let t1 = tower.mul(&tower.basis_element(j), &tower.frobenius(&tower.basis_element(k), i));
            let t2 = tower.mul(&tower.frobenius(&tower.basis_element(j), i), &tower.basis_element(k));
            let arg = tower.mul(b, &tower.sub(&t1, &t2));
            entries[j][k] = tower.trace_k(&arg);
        }
    }
    Ok(GramForm {
        params: tower.params(),
        entries,
        provenance: Some(Provenance::Alt { b: b.clone(), i }),
    })
}

/// Builds the general form f(x,y) = Tr((Σ_t b_t σ^{t-1}(x)) y) from n
/// coefficients (zeros allowed).
pub fn build_general_form(tower: &TowerField, bs: &[FieldElement]) -> Result<GramForm> {
    let n = tower.n();
    if bs.len() != n {
        return Err(Error::Precondition(format!(
            "general form needs {} coefficients, got {}",
            n,
            bs.len()
        )));
    }
    let mut entries = vec![vec![tower.k_zero(); n]; n];
    for j in 0..n {
        // Σ_t b_t σ^{t-1}(v^j)
        let mut lhs = tower.zero();
        for (t, b) in bs.iter().enumerate() {
            if tower.is_zero(b) {
                continue;
            }
            lhs = tower.add(&lhs, &tower.mul(b, &tower.frobenius(&tower.basis_element(j), t)));
        }
        for k in 0..n {
            entries[j][k] = tower.trace_k(&tower.mul(&lhs, &tower.basis_element(k)));
        }
    }
    Ok(GramForm {
        params: tower.params(),
        entries,
        provenance: Some(Provenance::General { bs: bs.to_vec() }),
    })
}

/// f(x, y) through the Gram matrix: x^T G y over K.
pub fn evaluate(
    tower: &TowerField,
    form: &GramForm,
    x: &FieldElement,
    y: &FieldElement,
) -> Result<KElem> {
    if form.params != tower.params() {
        return Err(Error::TowerMismatch);
    }
    let mut acc = tower.k_zero();
    for (j, xj) in x.coords().iter().enumerate() {
        if tower.k_is_zero(xj) {
            continue;
        }
        for (k, yk) in y.coords().iter().enumerate() {
            if tower.k_is_zero(yk) {
                continue;
            }
            let t = tower.k_mul(xj, &tower.k_mul(&form.entries[j][k], yk));
            acc = tower.k_add(&acc, &t);
        }
    }
    Ok(acc)
}

/// Exact rank and radical by row reduction over K. Radical vectors are
/// re-expressed as elements of L via the basis {v^j}.
pub fn rank(tower: &TowerField, form: &GramForm) -> Result<RankReport> {
    if form.params != tower.params() {
        return Err(Error::TowerMismatch);
    }
    let ka = tower.karith();
    // radical = { x : f(x, y) = 0 for all y } = left null space; transpose
    // so the generic right-nullspace routine applies.
    let n = form.n();
    let mut mt = vec![vec![ka.zero(); n]; n];
    for j in 0..n {
        for k in 0..n {
            mt[k][j] = form.entries[j][k].clone();
        }
    }
    let rad = nullspace(&ka, &mt);
    let rank = n - rad.len();
    debug_assert_eq!(rank, mat_rank(&ka, &form.entries));
    let predicted = match &form.provenance {
        Some(Provenance::Alt { b, i }) => {
            if tower.is_zero(b) {
                Some(RankPrediction {
                    rank: 0,
                    branch: RankBranch::ZeroForm,
                })
            } else {
                Some(predicted_rank(tower, b, *i)?)
            }
        }
        _ => None,
    };
    Ok(RankReport {
        rank,
        radical_basis: rad.into_iter().map(FieldElement).collect(),
        predicted,
    })
}

/// Radical membership by the closed-form criterion σ^{-i}(bx) = bσ^i(x).
pub fn radical_contains(
    tower: &TowerField,
    b: &FieldElement,
    i: usize,
    x: &FieldElement,
) -> Result<bool> {
    let n = tower.n();
    if i % n == 0 {
        return Err(Error::IdentityAutomorphism(i));
    }
    let lhs = tower.frobenius(&tower.mul(b, x), n - (i % n));
    let rhs = tower.mul(b, &tower.frobenius(x, i));
    Ok(lhs == rhs)
}

/// The closed-form rank of f_{b,σ^i} without building the Gram matrix.
///
/// Let e = ord(σ^i). Odd e gives the constant n - n/e. For e = 2 the form
/// is zero exactly when σ^i(b) = b, and has full rank n otherwise. For
/// e = 2r > 2 the dichotomy is decided by Hilbert 90 for L over the fixed
/// field of σ^{2i}: σ^i(b)b^{-1} is of the form σ^{2i}(c)c^{-1} iff its
/// norm to that fixed field is 1, in which case the rank is n - n/r.
pub fn predicted_rank(tower: &TowerField, b: &FieldElement, i: usize) -> Result<RankPrediction> {
    let n = tower.n();
    if i % n == 0 {
        return Err(Error::IdentityAutomorphism(i));
    }
    if tower.is_zero(b) {
        return Err(Error::Precondition("predicted_rank requires b != 0".into()));
    }
    let i = i % n;
    let e = tower.aut_order(i);
    if e % 2 == 1 {
        return Ok(RankPrediction {
            rank: n - n / e,
            branch: RankBranch::OddConstant,
        });
    }
    if e == 2 {
        return if tower.frobenius(b, i) == *b {
            Ok(RankPrediction {
                rank: 0,
                branch: RankBranch::ZeroForm,
            })
        } else {
            Ok(RankPrediction {
                rank: n,
                branch: RankBranch::Involution,
            })
        };
    }
    let r = e / 2;
    let twist = tower.mul(&tower.frobenius(b, i), &tower.inv(b)?);
    let norm = tower.norm_to_fixed(&twist, (2 * i) % n);
    if norm == tower.one() {
        Ok(RankPrediction {
            rank: n - n / r,
            branch: RankBranch::EvenSolvable,
        })
    } else {
        Ok(RankPrediction {
            rank: n,
            branch: RankBranch::EvenUnsolvable,
        })
    }
}

/// Exhaustive cardinalities of { σ^i(b)b^{-1} : b ∈ L* } and
/// { σ^{2i}(c)c^{-1} : c ∈ L* }. Requires ord(σ^i) even; a strict
/// inequality certifies the existence of b with no solution c.
pub fn count_twist_classes(tower: &TowerField, i: usize) -> Result<(u64, u64)> {
    let e = tower.aut_order(i);
    if e % 2 != 0 {
        return Err(Error::Precondition(format!(
            "count_twist_classes needs even ord(sigma^i), got {e}"
        )));
    }
    let n = tower.n();
    let mut first: HashSet<u128> = HashSet::new();
    let mut second: HashSet<u128> = HashSet::new();
    for idx in 1..tower.order() {
        let x = tower.element_from_index(idx);
        let xi = tower.inv(&x)?;
        let t1 = tower.mul(&tower.frobenius(&x, i % n), &xi);
        let t2 = tower.mul(&tower.frobenius(&x, (2 * i) % n), &xi);
        first.insert(tower.element_index(&t1));
        second.insert(tower.element_index(&t2));
    }
    Ok((first.len() as u64, second.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, DEFAULT_SIZE_GUARD};

    fn t(p: u64, s: usize, n: usize) -> TowerField {
        make_tower(TowerParams { p, s, n }, DEFAULT_SIZE_GUARD).unwrap()
    }

    /// Direct evaluation from the defining trace formula, independent of
    /// the Gram-matrix path.
    fn direct_alt_eval(
        f: &TowerField,
        b: &FieldElement,
        i: usize,
        x: &FieldElement,
        y: &FieldElement,
    ) -> KElem {
        let t1 = f.mul(x, &f.frobenius(y, i));
        let t2 = f.mul(&f.frobenius(x, i), y);
        f.trace_k(&f.mul(b, &f.sub(&t1, &t2)))
    }

    #[test]
    fn zero_b_gives_zero_form() {
        let f = t(2, 1, 3);
        let form = build_alt_form(&f, &f.zero(), 1).unwrap();
        assert!(form.is_zero(&f));
        let rep = rank(&f, &form).unwrap();
        assert_eq!(rep.rank, 0);
        assert_eq!(rep.radical_basis.len(), 3);
    }

    #[test]
    fn identity_automorphism_rejected() {
        let f = t(2, 1, 3);
        assert!(build_alt_form(&f, &f.one(), 0).is_err());
        assert!(predicted_rank(&f, &f.one(), 3).is_err());
    }

    #[test]
    fn evaluate_matches_direct_formula() {
        for f in [t(2, 1, 3), t(3, 1, 3), t(2, 2, 2)] {
            for b_idx in 0..f.order() {
                let b = f.element_from_index(b_idx);
                for i in 1..f.n() {
                    let form = build_alt_form(&f, &b, i).unwrap();
                    for x_idx in 0..f.order() {
                        let x = f.element_from_index(x_idx);
                        for y_idx in 0..f.order().min(8) {
                            let y = f.element_from_index(y_idx);
                            assert_eq!(
                                evaluate(&f, &form, &x, &y).unwrap(),
                                direct_alt_eval(&f, &b, i, &x, &y)
                            );
                        }
                        // alternating: f(x,x) = 0
                        assert!(f.k_is_zero(&evaluate(&f, &form, &x, &x).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn invariance_identity() {
        // f(x,y) = Tr((σ^{-i}(bx) - bσ^i(x)) y) for all x, y
        let f = t(2, 1, 4);
        for b_idx in 0..f.order() {
            let b = f.element_from_index(b_idx);
            for i in 1..f.n() {
                let form = build_alt_form(&f, &b, i).unwrap();
                for x_idx in 0..f.order() {
                    let x = f.element_from_index(x_idx);
                    let lhs_elt = f.sub(
                        &f.frobenius(&f.mul(&b, &x), f.n() - i),
                        &f.mul(&b, &f.frobenius(&x, i)),
                    );
                    for y_idx in 0..f.order().min(6) {
                        let y = f.element_from_index(y_idx);
                        assert_eq!(
                            evaluate(&f, &form, &x, &y).unwrap(),
                            f.trace_k(&f.mul(&lhs_elt, &y))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gram_is_k_linear_in_b() {
        let f = t(3, 1, 3);
        let b1 = f.element_from_index(7);
        let b2 = f.element_from_index(19);
        let sum = build_alt_form(&f, &f.add(&b1, &b2), 1).unwrap();
        let g1 = build_alt_form(&f, &b1, 1).unwrap();
        let g2 = build_alt_form(&f, &b2, 1).unwrap();
        assert_eq!(sum.entries, g1.add(&f, &g2).unwrap().entries);
        let k = f.k_from_coeffs(&[2]).unwrap();
        let scaled = build_alt_form(&f, &f.scalar_mul(&k, &b1), 1).unwrap();
        assert_eq!(scaled.entries, g1.scale(&f, &k).entries);
    }

    #[test]
    fn reindexing_identity() {
        // f_{b,σ^i} = f_{b',σ^{n-i}} with b' = -σ^{-i}(b)
        for f in [t(2, 1, 5), t(3, 1, 4)] {
            for b_idx in 1..f.order().min(30) {
                let b = f.element_from_index(b_idx);
                for i in 1..f.n() {
                    let lhs = build_alt_form(&f, &b, i).unwrap();
                    let b2 = f.neg(&f.frobenius(&b, f.n() - i));
                    let rhs = build_alt_form(&f, &b2, f.n() - i).unwrap();
                    assert_eq!(lhs.entries, rhs.entries);
                }
            }
        }
    }

    #[test]
    fn odd_order_constant_rank() {
        // (2,1,9), i = 3: ord 3, every nonzero b gives rank 6
        let f = t(2, 1, 9);
        for b_idx in [1u128, 2, 17, 100, 511] {
            let b = f.element_from_index(b_idx);
            let rep = rank(&f, &build_alt_form(&f, &b, 3).unwrap()).unwrap();
            assert_eq!(rep.rank, 6);
            assert_eq!(rep.radical_basis.len(), 3);
            let pred = rep.predicted.unwrap();
            assert_eq!(pred.rank, 6);
            assert_eq!(pred.branch, RankBranch::OddConstant);
        }
        // i = 1: ord 9 = 2·4+1, rank 8
        let pred = predicted_rank(&f, &f.v(), 1).unwrap();
        assert_eq!(pred.rank, 8);
    }

    #[test]
    fn involution_rank() {
        // (2,1,4), i = 2: zero form iff σ^2(b) = b, else rank 4
        let f = t(2, 1, 4);
        for b_idx in 1..f.order() {
            let b = f.element_from_index(b_idx);
            let rep = rank(&f, &build_alt_form(&f, &b, 2).unwrap()).unwrap();
            let pred = rep.predicted.unwrap();
            if f.frobenius(&b, 2) == b {
                assert_eq!(rep.rank, 0);
                assert_eq!(pred.branch, RankBranch::ZeroForm);
            } else {
                assert_eq!(rep.rank, 4);
                assert_eq!(pred.branch, RankBranch::Involution);
            }
            assert_eq!(pred.rank, rep.rank);
        }
    }

    #[test]
    fn even_order_bimodal() {
        // (2,1,4), i = 1: ord 4, ranks {2, 4} both occur, predictions agree
        let f = t(2, 1, 4);
        let mut seen = std::collections::BTreeSet::new();
        for b_idx in 1..f.order() {
            let b = f.element_from_index(b_idx);
            let rep = rank(&f, &build_alt_form(&f, &b, 1).unwrap()).unwrap();
            assert_eq!(rep.predicted.unwrap().rank, rep.rank);
            seen.insert(rep.rank);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn ranks_are_even_for_alternating() {
        let f = t(3, 1, 4);
        for b_idx in 0..f.order().min(50) {
            let b = f.element_from_index(b_idx);
            for i in 1..f.n() {
                let form = build_alt_form(&f, &b, i).unwrap();
                assert!(form.is_alternating(&f));
                assert_eq!(rank(&f, &form).unwrap().rank % 2, 0);
            }
        }
    }

    #[test]
    fn radical_criterion_matches_radical_basis() {
        let f = t(2, 1, 4);
        assert!(radical_contains(&f, &f.v(), 1, &f.zero()).unwrap());
        assert!(radical_contains(&f, &f.zero(), 1, &f.v()).unwrap());
        for b_idx in 1..f.order() {
            let b = f.element_from_index(b_idx);
            for i in 1..f.n() {
                let form = build_alt_form(&f, &b, i).unwrap();
                for x_idx in 0..f.order() {
                    let x = f.element_from_index(x_idx);
                    let by_criterion = radical_contains(&f, &b, i, &x).unwrap();
                    // x in radical iff f(x, y) = 0 for all basis y
                    let by_form = (0..f.n()).all(|k| {
                        f.k_is_zero(
                            &evaluate(&f, &form, &x, &f.basis_element(k)).unwrap(),
                        )
                    });
                    assert_eq!(by_criterion, by_form);
                }
            }
        }
    }

    #[test]
    fn twist_class_counts() {
        // GF(16)/GF(2), σ order 4, q = 2, r = 2: (15, 5)
        let f = t(2, 1, 4);
        assert_eq!(count_twist_classes(&f, 1).unwrap(), (15, 5));
        // GF(81)/GF(3): (40, 10)
        let f = t(3, 1, 4);
        assert_eq!(count_twist_classes(&f, 1).unwrap(), (40, 10));
        // involution: σ^{2i} = id, second count 1
        let f = t(2, 1, 2);
        assert_eq!(count_twist_classes(&f, 1).unwrap(), (3, 1));
        // odd order rejected
        let f = t(2, 1, 3);
        assert!(count_twist_classes(&f, 1).is_err());
    }

    #[test]
    fn general_forms() {
        let f = t(2, 1, 3);
        let zeros = vec![f.zero(); 3];
        assert!(build_general_form(&f, &zeros).unwrap().is_zero(&f));
        // only b_1 ≠ 0: (x,y) ↦ Tr(b_1 x y), symmetric and invertible
        for b_idx in 1..f.order() {
            let mut bs = vec![f.zero(); 3];
            bs[0] = f.element_from_index(b_idx);
            let form = build_general_form(&f, &bs).unwrap();
            assert_eq!(rank(&f, &form).unwrap().rank, 3);
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(form.entries[j][k], form.entries[k][j]);
                }
            }
        }
        // b = (0, 1, 0): rank 3
        let mut bs = vec![f.zero(); 3];
        bs[1] = f.one();
        let form = build_general_form(&f, &bs).unwrap();
        assert_eq!(rank(&f, &form).unwrap().rank, 3);
    }
}
