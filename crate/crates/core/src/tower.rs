//! The field tower GF(p) ⊂ K = GF(p^s) ⊂ L = GF(p^{s·n}).
//!
//! K is modelled as GF(p)[u]/(h) and L as K[v]/(g), with h and g the
//! canonically smallest monic irreducibles of their degrees. Elements of L
//! are length-n coordinate vectors over K with respect to the basis
//! {1, v, ..., v^{n-1}}; each K-coordinate is a length-s residue vector
//! mod p. σ is the q-power Frobenius (q = p^s) and generates Gal(L/K),
//! which has order exactly n.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    self, nullspace, poly_is_irreducible, poly_mul, poly_rem, Field, GfP,
};
use crate::error::{Error, Result};

/// Default cap on |L| for exhaustive element loops.
pub const DEFAULT_SIZE_GUARD: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerParams {
    pub p: u64,
    pub s: usize,
    pub n: usize,
}

/// Element of K as a length-s coefficient vector mod p, low-degree-first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KElem(pub(crate) Vec<u64>);

impl KElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

/// Element of L as a length-n vector of K-coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub(crate) Vec<KElem>);

impl FieldElement {
    pub fn coords(&self) -> &[KElem] {
        &self.0
    }
}

/// Arithmetic of K = GF(p)[u]/(h). Elements are kept padded to length s.
#[derive(Clone, Copy)]
pub(crate) struct KArith<'a> {
    pub(crate) gf: GfP,
    pub(crate) h: &'a [u64],
    pub(crate) s: usize,
}

impl<'a> KArith<'a> {
    fn pad(&self, mut v: Vec<u64>) -> KElem {
        v.resize(self.s, 0);
        KElem(v)
    }
}

impl<'a> Field for KArith<'a> {
    type E = KElem;

    fn zero(&self) -> KElem {
        KElem(vec![0; self.s])
    }
    fn one(&self) -> KElem {
        let mut v = vec![0; self.s];
        v[0] = 1 % self.gf.p;
        KElem(v)
    }
    fn add(&self, a: &KElem, b: &KElem) -> KElem {
        KElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| self.gf.add(x, y))
                .collect(),
        )
    }
    fn sub(&self, a: &KElem, b: &KElem) -> KElem {
        KElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| self.gf.sub(x, y))
                .collect(),
        )
    }
    fn neg(&self, a: &KElem) -> KElem {
        KElem(a.0.iter().map(|x| self.gf.neg(x)).collect())
    }
    fn mul(&self, a: &KElem, b: &KElem) -> KElem {
        let prod = poly_mul(&self.gf, &a.0, &b.0);
        self.pad(poly_rem(&self.gf, &prod, self.h))
    }
    fn inv(&self, a: &KElem) -> KElem {
        assert!(!self.is_zero(a), "inverse of zero in K");
        // a^{q-2}, q = p^s
        let q: u128 = (self.gf.p as u128).pow(self.s as u32);
        let mut e = q - 2;
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
    fn is_zero(&self, a: &KElem) -> bool {
        a.0.iter().all(|&x| x == 0)
    }
}

/// Arithmetic of L = K[v]/(g), exposed as a [`Field`] for the generic
/// matrix routines (Moore determinants, annihilator solves).
#[derive(Clone, Copy)]
pub(crate) struct LArith<'a> {
    pub(crate) tower: &'a TowerField,
}

impl<'a> Field for LArith<'a> {
    type E = FieldElement;

    fn zero(&self) -> FieldElement {
        self.tower.zero()
    }
    fn one(&self) -> FieldElement {
        self.tower.one()
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.tower.add(a, b)
    }
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.tower.sub(a, b)
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        self.tower.neg(a)
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.tower.mul(a, b)
    }
    fn inv(&self, a: &FieldElement) -> FieldElement {
        self.tower.inv(a).expect("inverse of zero in L")
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        self.tower.is_zero(a)
    }
}

/// Immutable arithmetic context for the tower. Safe to share across
/// threads; every operation is a pure function of its inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerField {
    params: TowerParams,
    /// Monic irreducible of degree s over GF(p) defining K (degree-1 `u`
    /// placeholder when s = 1).
    h: Vec<u64>,
    /// Monic irreducible of degree n over K defining L.
    g: Vec<KElem>,
    q: u64,
    order: u128,
    /// frob_basis[i][j] = σ^i(v^j), 0 ≤ i < n, 0 ≤ j < n.
    #[serde(skip)]
    frob_basis: Vec<Vec<FieldElement>>,
    /// Tr(v^j) as an element of K.
    #[serde(skip)]
    trace_basis: Vec<KElem>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds the canonical tower for `params`. Deterministic: the defining
/// polynomials are the first irreducibles in the canonical candidate scan,
/// so equal params always produce identical towers.
pub fn make_tower(params: TowerParams, size_guard: u128) -> Result<TowerField> {
    TowerField::new(params, size_guard)
}

impl TowerField {
    pub fn new(params: TowerParams, size_guard: u128) -> Result<Self> {
        let TowerParams { p, s, n } = params;
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if s < 1 {
            return Err(Error::InvalidParams("s must be at least 1".into()));
        }
        if n < 2 {
            return Err(Error::InvalidParams("n must be at least 2".into()));
        }
        let order = (p as u128)
            .checked_pow((s * n) as u32)
            .ok_or(Error::SizeGuard {
                size: u128::MAX,
                guard: size_guard,
            })?;
        if order > size_guard {
            return Err(Error::SizeGuard {
                size: order,
                guard: size_guard,
            });
        }
        let q = (p as u128).pow(s as u32) as u64;

        // Canonical h: scan monic degree-s candidates over GF(p) in
        // increasing order of the integer encoding of the lower
        // coefficients (coefficient of u^i weighted by p^i).
        let gf = GfP { p };
        let h = {
            let mut found = None;
            for counter in 0..(q as u128) {
                let mut cand: Vec<u64> = Vec::with_capacity(s + 1);
                let mut c = counter;
                for _ in 0..s {
                    cand.push((c % p as u128) as u64);
                    c /= p as u128;
                }
                cand.push(1);
                if poly_is_irreducible(&gf, &cand, p as u128) {
                    found = Some(cand);
                    break;
                }
            }
            found.expect("an irreducible of every degree exists over GF(p)")
        };

        // Canonical g: same scan over K, each K-coefficient decoded from
        // its base-p digit tuple.
        let ka = KArith { gf, h: &h, s };
        let g = {
            let found;
            let mut counter: u128 = 0;
            loop {
                let mut cand: Vec<KElem> = Vec::with_capacity(n + 1);
                let mut c = counter;
                for _ in 0..n {
                    let mut digits = Vec::with_capacity(s);
                    let mut kc = c % q as u128;
                    for _ in 0..s {
                        digits.push((kc % p as u128) as u64);
                        kc /= p as u128;
                    }
                    cand.push(KElem(digits));
                    c /= q as u128;
                }
                cand.push(ka.one());
                if poly_is_irreducible(&ka, &cand, q as u128) {
                    found = cand;
                    break;
                }
                counter += 1;
                assert!(counter < (q as u128).pow(n as u32));
            }
            found
        };

        let mut tower = TowerField {
            params,
            h,
            g,
            q,
            order,
            frob_basis: Vec::new(),
            trace_basis: Vec::new(),
        };
        tower.precompute();
        Ok(tower)
    }

    /// Frobenius images of the basis and the basis traces. Also restores
    /// state after deserialization.
    fn precompute(&mut self) {
        let n = self.params.n;
        // powers of v
        let mut basis = Vec::with_capacity(n);
        let mut cur = self.one();
        for _ in 0..n {
            basis.push(cur.clone());
            cur = self.mul(&cur, &self.v());
        }
        // σ(v) = v^q, then σ(v)^j; σ acts K-linearly through these powers
        let sigma_v = self.pow(&self.v(), self.q as u128);
        let mut sv_pows = Vec::with_capacity(n);
        let mut acc = self.one();
        for _ in 0..n {
            sv_pows.push(acc.clone());
            acc = self.mul(&acc, &sigma_v);
        }
        let apply_sigma = |t: &TowerField, x: &FieldElement| -> FieldElement {
            let mut out = t.zero();
            for (j, c) in x.0.iter().enumerate() {
                if t.k_is_zero(c) {
                    continue;
                }
                out = t.add(&out, &t.scalar_mul(c, &sv_pows[j]));
            }
            out
        };
        let mut frob = Vec::with_capacity(n);
        frob.push(basis.clone());
        for i in 1..n {
            let prev: &Vec<FieldElement> = &frob[i - 1];
            let row: Vec<FieldElement> = prev.iter().map(|x| apply_sigma(self, x)).collect();
            frob.push(row);
        }
        // σ has order exactly n on L
        debug_assert!(apply_sigma(self, &frob[n - 1][1]) == basis[1]);
        debug_assert!((1..n).all(|i| frob[i][1] != basis[1]));

        let ka = self.karith();
        let mut traces = Vec::with_capacity(n);
        for j in 0..n {
            let mut t = self.zero();
            for row in frob.iter() {
                t = self.add(&t, &row[j]);
            }
            debug_assert!(t.0[1..].iter().all(|c| ka.is_zero(c)), "trace must lie in K");
            traces.push(t.0[0].clone());
        }
        self.frob_basis = frob;
        self.trace_basis = traces;
    }

    pub fn params(&self) -> TowerParams {
        self.params
    }
    pub fn p(&self) -> u64 {
        self.params.p
    }
    pub fn s(&self) -> usize {
        self.params.s
    }
    pub fn n(&self) -> usize {
        self.params.n
    }
    /// |K| = p^s
    pub fn q(&self) -> u64 {
        self.q
    }
    /// |L| = p^{s·n}
    pub fn order(&self) -> u128 {
        self.order
    }
    pub fn h(&self) -> &[u64] {
        &self.h
    }
    pub fn g(&self) -> &[KElem] {
        &self.g
    }

    pub(crate) fn karith(&self) -> KArith<'_> {
        KArith {
            gf: GfP { p: self.params.p },
            h: &self.h,
            s: self.params.s,
        }
    }
    pub(crate) fn larith(&self) -> LArith<'_> {
        LArith { tower: self }
    }

    // -- K-level helpers ----------------------------------------------------

    pub fn k_zero(&self) -> KElem {
        self.karith().zero()
    }
    pub fn k_one(&self) -> KElem {
        self.karith().one()
    }
    pub fn k_is_zero(&self, a: &KElem) -> bool {
        self.karith().is_zero(a)
    }
    pub fn k_add(&self, a: &KElem, b: &KElem) -> KElem {
        self.karith().add(a, b)
    }
    pub fn k_sub(&self, a: &KElem, b: &KElem) -> KElem {
        self.karith().sub(a, b)
    }
    pub fn k_neg(&self, a: &KElem) -> KElem {
        self.karith().neg(a)
    }
    pub fn k_mul(&self, a: &KElem, b: &KElem) -> KElem {
        self.karith().mul(a, b)
    }
    /// The residue u of the indeterminate of h; only meaningful for s >= 2.
    pub fn k_gen(&self) -> KElem {
        let mut c = vec![0; self.params.s];
        if self.params.s > 1 {
            c[1] = 1;
        } else {
            c[0] = 1;
        }
        KElem(c)
    }
    pub fn k_from_coeffs(&self, coeffs: &[u64]) -> Result<KElem> {
        if coeffs.len() != self.params.s {
            return Err(Error::Parse(format!(
                "K-element needs {} coefficients, got {}",
                self.params.s,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.params.p) {
            return Err(Error::Parse("coefficient out of range".into()));
        }
        Ok(KElem(coeffs.to_vec()))
    }

    // -- L-level arithmetic --------------------------------------------------

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![self.k_zero(); self.params.n])
    }
    pub fn one(&self) -> FieldElement {
        let mut c = vec![self.k_zero(); self.params.n];
        c[0] = self.k_one();
        FieldElement(c)
    }
    /// The residue v of the indeterminate of g; {1, v, ..., v^{n-1}} is
    /// the fixed K-basis of L.
    pub fn v(&self) -> FieldElement {
        let mut c = vec![self.k_zero(); self.params.n];
        c[1] = self.k_one();
        FieldElement(c)
    }
    /// v^j for 0 ≤ j < n.
    pub fn basis_element(&self, j: usize) -> FieldElement {
        assert!(j < self.params.n);
        if self.frob_basis.is_empty() {
            let mut c = vec![self.k_zero(); self.params.n];
            c[j] = self.k_one();
            FieldElement(c)
        } else {
            self.frob_basis[0][j].clone()
        }
    }
    /// Embeds a K-element as a constant of L.
    pub fn embed_k(&self, a: &KElem) -> FieldElement {
        let mut c = vec![self.k_zero(); self.params.n];
        c[0] = a.clone();
        FieldElement(c)
    }

    pub fn from_coords(&self, coords: Vec<KElem>) -> Result<FieldElement> {
        if coords.len() != self.params.n {
            return Err(Error::Parse(format!(
                "element needs {} K-coordinates, got {}",
                self.params.n,
                coords.len()
            )));
        }
        for c in &coords {
            if c.0.len() != self.params.s || c.0.iter().any(|&x| x >= self.params.p) {
                return Err(Error::Parse("K-coordinate out of range".into()));
            }
        }
        Ok(FieldElement(coords))
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        a.0.iter().all(|c| self.k_is_zero(c))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let ka = self.karith();
        FieldElement(a.0.iter().zip(&b.0).map(|(x, y)| ka.add(x, y)).collect())
    }
    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let ka = self.karith();
        FieldElement(a.0.iter().zip(&b.0).map(|(x, y)| ka.sub(x, y)).collect())
    }
    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let ka = self.karith();
        FieldElement(a.0.iter().map(|x| ka.neg(x)).collect())
    }
    /// Scalar multiplication by a K-element.
    pub fn scalar_mul(&self, k: &KElem, a: &FieldElement) -> FieldElement {
        let ka = self.karith();
        FieldElement(a.0.iter().map(|x| ka.mul(k, x)).collect())
    }

    /// Multiplies by an integer residue mod p.
    pub fn scalar_mul_int(&self, k: u64, a: &FieldElement) -> FieldElement {
        let mut c = vec![0; self.params.s];
        c[0] = k % self.params.p;
        self.scalar_mul(&KElem(c), a)
    }
    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let ka = self.karith();
        let prod = algebra::poly_mul(&ka, &a.0, &b.0);
        let mut red = algebra::poly_rem(&ka, &prod, &self.g);
        red.resize(self.params.n, ka.zero());
        FieldElement(red)
    }

    pub fn pow(&self, a: &FieldElement, mut e: u128) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; zero input is a domain error.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order - 2))
    }

    // -- Galois structure ----------------------------------------------------

    /// Multiplicative order of σ^i as an automorphism of L.
    pub fn aut_order(&self, i: usize) -> usize {
        let n = self.params.n;
        let r = i % n;
        if r == 0 {
            1
        } else {
            n / gcd(n, r)
        }
    }

    /// σ^i(x), where σ: x ↦ x^{p^s} generates Gal(L/K). σ^0 and σ^n are
    /// the identity.
    pub fn frobenius(&self, x: &FieldElement, i: usize) -> FieldElement {
        let n = self.params.n;
        let i = i % n;
        if i == 0 {
            return x.clone();
        }
        let mut out = self.zero();
        for (j, c) in x.0.iter().enumerate() {
            if self.k_is_zero(c) {
                continue;
            }
            out = self.add(&out, &self.scalar_mul(c, &self.frob_basis[i][j]));
        }
        out
    }

    /// Tr_{L/K}(x) = Σ_i σ^i(x), as a K-element.
    pub fn trace_k(&self, x: &FieldElement) -> KElem {
        let ka = self.karith();
        let mut t = ka.zero();
        for (j, c) in x.0.iter().enumerate() {
            if ka.is_zero(c) {
                continue;
            }
            t = ka.add(&t, &ka.mul(c, &self.trace_basis[j]));
        }
        t
    }

    /// Tr_{L/K}(x) embedded back into L (coordinates 1..n-1 zero).
    pub fn trace_lk(&self, x: &FieldElement) -> FieldElement {
        self.embed_k(&self.trace_k(x))
    }

    /// Norm of x to the fixed field of σ^d: Π_j (σ^d)^j(x) over
    /// j = 0..ord(σ^d)-1. The result is fixed by σ^d.
    pub fn norm_to_fixed(&self, x: &FieldElement, d: usize) -> FieldElement {
        let e = self.aut_order(d);
        let mut acc = self.one();
        for j in 0..e {
            acc = self.mul(&acc, &self.frobenius(x, (d * j) % self.params.n));
        }
        acc
    }

    /// K-basis of { x ∈ L : σ^d(x) = x }, the null space of x ↦ σ^d(x) - x.
    /// Length is gcd(n, d) for d ≠ 0 and n for d = 0.
    pub fn fixed_field_basis(&self, d: usize) -> Vec<FieldElement> {
        let n = self.params.n;
        let d = d % n;
        if d == 0 {
            return (0..n).map(|j| self.basis_element(j)).collect();
        }
        let ka = self.karith();
        // rows indexed by output coordinate, columns by input basis vector
        let mut m = vec![vec![ka.zero(); n]; n];
        for j in 0..n {
            let diff = self.sub(&self.frob_basis[d][j], &self.basis_element(j));
            for (row, c) in diff.0.iter().enumerate() {
                m[row][j] = c.clone();
            }
        }
        nullspace(&ka, &m)
            .into_iter()
            .map(FieldElement)
            .collect()
    }

    // -- Canonical element indexing -------------------------------------------

    /// Canonical integer index: coordinate j carries weight q^j, and
    /// within K the coefficient of u^t carries weight p^t.
    pub fn element_index(&self, x: &FieldElement) -> u128 {
        let mut idx: u128 = 0;
        for c in x.0.iter().rev() {
            let mut kv: u128 = 0;
            for &d in c.0.iter().rev() {
                kv = kv * self.params.p as u128 + d as u128;
            }
            idx = idx * self.q as u128 + kv;
        }
        idx
    }

    pub fn element_from_index(&self, mut idx: u128) -> FieldElement {
        debug_assert!(idx < self.order);
        let mut coords = Vec::with_capacity(self.params.n);
        for _ in 0..self.params.n {
            let mut kv = idx % self.q as u128;
            idx /= self.q as u128;
            let mut digits = Vec::with_capacity(self.params.s);
            for _ in 0..self.params.s {
                digits.push((kv % self.params.p as u128) as u64);
                kv /= self.params.p as u128;
            }
            coords.push(KElem(digits));
        }
        FieldElement(coords)
    }

    /// Restores the derived tables after `serde` deserialization.
    pub fn rehydrate(&mut self) {
        if self.frob_basis.is_empty() {
            self.precompute();
        }
    }
}
