//! Moore matrices, the determinant criterion for K-linear dependence,
//! σ-polynomial operators with their kernel bound, and annihilator
//! synthesis for a given subspace of L.

use serde::{Deserialize, Serialize};

use crate::algebra::{det, mat_rank, nullspace, solve, Field};
use crate::error::{Error, Result};
use crate::tower::{FieldElement, TowerField};

/// The k×k matrix with entry (i, j) = σ^{i-1}(x_j).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MooreMatrix {
    pub rows: Vec<Vec<FieldElement>>,
}

/// A polynomial w(t) = Σ b_i t^i over L, acting on L as the K-linear
/// operator w(σ) = Σ b_i σ^i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SigmaPoly {
    pub coeffs: Vec<FieldElement>,
}

impl SigmaPoly {
    /// Trims trailing zero coefficients so that the leading one is nonzero
    /// (the zero polynomial is the empty coefficient list).
    pub fn new(tower: &TowerField, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| tower.is_zero(c)) {
            coeffs.pop();
        }
        SigmaPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

pub fn moore_matrix(tower: &TowerField, xs: &[FieldElement]) -> Result<MooreMatrix> {
    let k = xs.len();
    if k == 0 || k > tower.n() {
        return Err(Error::Precondition(format!(
            "Moore matrix needs 1..={} elements, got {}",
            tower.n(),
            k
        )));
    }
    let rows = (0..k)
        .map(|i| xs.iter().map(|x| tower.frobenius(x, i)).collect())
        .collect();
    Ok(MooreMatrix { rows })
}

/// K-linear dependence by the determinant criterion: det S = 0.
pub fn dependent_via_moore(tower: &TowerField, xs: &[FieldElement]) -> Result<bool> {
    let m = moore_matrix(tower, xs)?;
    let la = tower.larith();
    Ok(la.is_zero(&det(&la, &m.rows)))
}

/// Independent oracle: expand each element to its n K-coordinates and
/// row-reduce over K.
pub fn dependent_via_elim(tower: &TowerField, xs: &[FieldElement]) -> bool {
    let ka = tower.karith();
    let rows: Vec<Vec<_>> = xs.iter().map(|x| x.coords().to_vec()).collect();
    mat_rank(&ka, &rows) < xs.len()
}

/// w(σ)x = Σ_i b_i σ^i(x).
pub fn apply_sigma_poly(tower: &TowerField, w: &SigmaPoly, x: &FieldElement) -> FieldElement {
    let mut acc = tower.zero();
    for (i, b) in w.coeffs.iter().enumerate() {
        if tower.is_zero(b) {
            continue;
        }
        acc = tower.add(&acc, &tower.mul(b, &tower.frobenius(x, i % tower.n())));
    }
    acc
}

/// Reduces w modulo t^n - 1 (σ^n = identity) by folding coefficient
/// indices mod n.
fn reduce_mod_order(tower: &TowerField, w: &SigmaPoly) -> Vec<FieldElement> {
    let n = tower.n();
    let mut red = vec![tower.zero(); n];
    for (i, b) in w.coeffs.iter().enumerate() {
        red[i % n] = tower.add(&red[i % n], b);
    }
    red
}

/// K-basis of { x ∈ L : w(σ)x = 0 }. When the reduction of w mod t^n - 1
/// is nonzero, the result has at most deg(w) elements; when it vanishes
/// (e.g. w = t^n - 1) the operator is zero and the kernel is all of L.
pub fn kernel_of_sigma_poly(tower: &TowerField, w: &SigmaPoly) -> Result<Vec<FieldElement>> {
    if w.is_zero() {
        return Err(Error::Precondition(
            "kernel of the zero polynomial is undefined".into(),
        ));
    }
    let n = tower.n();
    let red = reduce_mod_order(tower, w);
    if red.iter().all(|c| tower.is_zero(c)) {
        return Ok((0..n).map(|j| tower.basis_element(j)).collect());
    }
    let ka = tower.karith();
    let mut m = vec![vec![ka.zero(); n]; n];
    for j in 0..n {
        let mut img = tower.zero();
        for (i, b) in red.iter().enumerate() {
            if tower.is_zero(b) {
                continue;
            }
            img = tower.add(&img, &tower.mul(b, &tower.frobenius(&tower.basis_element(j), i)));
        }
        for (row, c) in img.coords().iter().enumerate() {
            m[row][j] = c.clone();
        }
    }
    Ok(nullspace(&ka, &m).into_iter().map(FieldElement).collect())
}

/// The monic degree-k σ-polynomial whose kernel is exactly span(U):
/// solve S'B = Σ with Σ_i = σ^k(x_i), then w = t^k - b_{k-1}t^{k-1} - ... - b_0.
pub fn annihilator_poly(tower: &TowerField, u_basis: &[FieldElement]) -> Result<SigmaPoly> {
    let k = u_basis.len();
    if k == 0 || k > tower.n() {
        return Err(Error::Precondition(format!(
            "annihilator needs a basis of size 1..={}, got {}",
            tower.n(),
            k
        )));
    }
    if dependent_via_elim(tower, u_basis) {
        return Err(Error::Precondition(
            "annihilator basis must be linearly independent over K".into(),
        ));
    }
    let la = tower.larith();
    // S'(i,j) = σ^{j-1}(x_i)
    let s_t: Vec<Vec<FieldElement>> = (0..k)
        .map(|i| (0..k).map(|j| tower.frobenius(&u_basis[i], j)).collect())
        .collect();
    let sigma: Vec<FieldElement> = u_basis
        .iter()
        .map(|x| tower.frobenius(x, k % tower.n()))
        .collect();
    let b = solve(&la, &s_t, &sigma).ok_or_else(|| {
        Error::Precondition("singular Moore system for an independent basis".into())
    })?;
    let mut coeffs: Vec<FieldElement> = b.iter().map(|c| tower.neg(c)).collect();
    coeffs.push(tower.one());
    Ok(SigmaPoly { coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{make_tower, TowerParams, DEFAULT_SIZE_GUARD};

    fn t(p: u64, s: usize, n: usize) -> TowerField {
        make_tower(TowerParams { p, s, n }, DEFAULT_SIZE_GUARD).unwrap()
    }

    /// Cofactor-expansion determinant, cross-oracle for the elimination
    /// determinant on small matrices.
    fn det_cofactor(tower: &TowerField, m: &[Vec<FieldElement>]) -> FieldElement {
        let k = m.len();
        if k == 1 {
            return m[0][0].clone();
        }
        let mut acc = tower.zero();
        for j in 0..k {
            let minor: Vec<Vec<FieldElement>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let mut term = tower.mul(&m[0][j], &det_cofactor(tower, &minor));
            if j % 2 == 1 {
                term = tower.neg(&term);
            }
            acc = tower.add(&acc, &term);
        }
        acc
    }

    #[test]
    fn moore_structure() {
        let f = t(2, 2, 2); // GF(4) over... use K = GF(4): s=2, n=2
        let one = f.one();
        assert_eq!(
            moore_matrix(&f, &[one.clone()]).unwrap().rows,
            vec![vec![one]]
        );
        assert!(moore_matrix(&f, &[]).is_err());
        let xs: Vec<_> = (1..=2).map(|i| f.element_from_index(i + 3)).collect();
        let m = moore_matrix(&f, &xs).unwrap();
        for i in 0..m.rows.len() - 1 {
            for j in 0..xs.len() {
                assert_eq!(f.frobenius(&m.rows[i][j], 1), m.rows[i + 1][j]);
            }
        }
    }

    #[test]
    fn gf4_dependence_example() {
        // GF(4) over GF(2): xs = (1, ω) with ω = v gives det = ω^2 - ω = 1 ≠ 0
        let f = t(2, 1, 2);
        let omega = f.v();
        assert!(!dependent_via_moore(&f, &[f.one(), omega.clone()]).unwrap());
        assert!(dependent_via_moore(&f, &[omega.clone(), omega.clone()]).unwrap());
        let la = f.larith();
        let m = moore_matrix(&f, &[f.one(), omega]).unwrap();
        assert_eq!(det(&la, &m.rows), f.one());
    }

    #[test]
    fn moore_equals_elim_exhaustive_gf8() {
        let f = t(2, 1, 3);
        // all tuples of length 1..=3 over L
        for k in 1..=3usize {
            let total = 8u128.pow(k as u32);
            for code in 0..total {
                let mut c = code;
                let xs: Vec<_> = (0..k)
                    .map(|_| {
                        let e = f.element_from_index(c % 8);
                        c /= 8;
                        e
                    })
                    .collect();
                assert_eq!(
                    dependent_via_moore(&f, &xs).unwrap(),
                    dependent_via_elim(&f, &xs),
                    "tuple code {code} len {k}"
                );
            }
        }
    }

    #[test]
    fn elim_trivial_cases() {
        let f = t(2, 1, 4);
        assert!(dependent_via_elim(&f, &[f.zero()]));
        let basis: Vec<_> = (0..4).map(|j| f.basis_element(j)).collect();
        assert!(!dependent_via_elim(&f, &basis));
    }

    #[test]
    fn det_elimination_matches_cofactor() {
        let f = t(3, 1, 4);
        let la = f.larith();
        for seed in 0..40u128 {
            for k in 1..=4usize {
                let m: Vec<Vec<FieldElement>> = (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| {
                                f.element_from_index(
                                    (seed * 31 + (i * k + j) as u128 * 7 + 1) % f.order(),
                                )
                            })
                            .collect()
                    })
                    .collect();
                assert_eq!(det(&la, &m), det_cofactor(&f, &m));
            }
        }
    }

    #[test]
    fn sigma_poly_application() {
        let f = t(3, 1, 3);
        // w = t
        let w = SigmaPoly::new(&f, vec![f.zero(), f.one()]);
        let x = f.element_from_index(11);
        assert_eq!(apply_sigma_poly(&f, &w, &x), f.frobenius(&x, 1));
        // w = t - 1 kills K
        let w = SigmaPoly::new(&f, vec![f.neg(&f.one()), f.one()]);
        let k = f.embed_k(&f.k_from_coeffs(&[2]).unwrap());
        assert!(f.is_zero(&apply_sigma_poly(&f, &w, &k)));
        // term-by-term oracle on random w, x
        for seed in 0..25u128 {
            let coeffs: Vec<_> = (0..3)
                .map(|i| f.element_from_index((seed * 5 + i * 9 + 2) % f.order()))
                .collect();
            let w = SigmaPoly::new(&f, coeffs.clone());
            let x = f.element_from_index((seed * 13 + 1) % f.order());
            let mut expect = f.zero();
            for (i, b) in coeffs.iter().enumerate() {
                expect = f.add(&expect, &f.mul(b, &f.frobenius(&x, i)));
            }
            assert_eq!(apply_sigma_poly(&f, &w, &x), expect);
        }
    }

    #[test]
    fn kernels() {
        let f = t(2, 1, 4);
        // w = t - 1: kernel is K, dimension 1
        let w = SigmaPoly::new(&f, vec![f.neg(&f.one()), f.one()]);
        let ker = kernel_of_sigma_poly(&f, &w).unwrap();
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], f.one());
        // w = t^n - 1 acts as zero: kernel all of L
        let mut coeffs = vec![f.neg(&f.one())];
        coeffs.extend(std::iter::repeat_with(|| f.zero()).take(3));
        coeffs.push(f.one());
        let w = SigmaPoly::new(&f, coeffs);
        assert_eq!(kernel_of_sigma_poly(&f, &w).unwrap().len(), 4);
        // zero polynomial rejected
        assert!(kernel_of_sigma_poly(&f, &SigmaPoly::new(&f, vec![])).is_err());
        // (3,1,4), w = t^2 - v: dim ≤ 2
        let f = t(3, 1, 4);
        let w = SigmaPoly::new(&f, vec![f.neg(&f.v()), f.zero(), f.one()]);
        assert!(kernel_of_sigma_poly(&f, &w).unwrap().len() <= 2);
    }

    #[test]
    fn kernel_bound() {
        let f = t(2, 1, 5);
        for seed in 0..60u128 {
            let d = 1 + (seed as usize % 4);
            let coeffs: Vec<_> = (0..=d)
                .map(|i| f.element_from_index((seed * 7 + i as u128 * 3) % f.order()))
                .collect();
            let w = SigmaPoly::new(&f, coeffs);
            if w.is_zero() {
                continue;
            }
            let ker = kernel_of_sigma_poly(&f, &w).unwrap();
            assert!(ker.len() <= w.degree().unwrap().min(f.n()));
        }
    }

    #[test]
    fn annihilator_round_trip() {
        let f = t(2, 1, 5);
        // U = {1}: w = t - 1
        let w = annihilator_poly(&f, &[f.one()]).unwrap();
        assert_eq!(w.coeffs, vec![f.neg(&f.one()), f.one()]);
        // U = span{v, v^2}
        let u = vec![f.basis_element(1), f.basis_element(2)];
        let w = annihilator_poly(&f, &u).unwrap();
        assert_eq!(w.degree(), Some(2));
        let ker = kernel_of_sigma_poly(&f, &w).unwrap();
        assert_eq!(ker.len(), 2);
        // spans agree
        let ka = f.karith();
        let mut rows: Vec<Vec<_>> = u.iter().map(|x| x.coords().to_vec()).collect();
        rows.extend(ker.iter().map(|x| x.coords().to_vec()));
        assert_eq!(mat_rank(&ka, &rows), 2);
        // dependent input rejected
        assert!(annihilator_poly(&f, &[f.v(), f.v()]).is_err());
        // U = full basis: kernel is all of L
        let full: Vec<_> = (0..5).map(|j| f.basis_element(j)).collect();
        let w = annihilator_poly(&f, &full).unwrap();
        assert_eq!(kernel_of_sigma_poly(&f, &w).unwrap().len(), 5);
    }
}
