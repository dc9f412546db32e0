//! Generic exact arithmetic: polynomial and dense-matrix routines over an
//! abstract field context.
//!
//! The same elimination and polynomial code runs over GF(p) (finding the
//! defining polynomial of K), over K (Gram-matrix ranks, null spaces) and
//! over L (Moore determinants, annihilator solves). Polynomials are stored
//! low-degree-first.

/// Arithmetic context for a field. Element values are plain data; all
/// operations go through the context.
pub trait Field {
    type E: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Multiplicative inverse. Callers must guard against zero.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
}

/// The prime field GF(p), elements as residues in [0, p).
#[derive(Clone, Copy, Debug)]
pub struct GfP {
    pub p: u64,
}

impl GfP {
    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * a as u128 % self.p as u128) as u64;
            }
            a = (a as u128 * a as u128 % self.p as u128) as u64;
            e >>= 1;
        }
        acc
    }
}

impl Field for GfP {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (*a as u128 * *b as u128 % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero in GF(p)");
        self.pow(*a, self.p - 2)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

// ---------------------------------------------------------------------------
// Polynomials (low-degree-first coefficient vectors)
// ---------------------------------------------------------------------------

pub fn poly_trim<F: Field>(fld: &F, p: &mut Vec<F::E>) {
    while let Some(last) = p.last() {
        if fld.is_zero(last) {
            p.pop();
        } else {
            break;
        }
    }
}

pub fn poly_deg<F: Field>(fld: &F, p: &[F::E]) -> Option<usize> {
    p.iter().rposition(|c| !fld.is_zero(c))
}

pub fn poly_add<F: Field>(fld: &F, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let x = a.get(i).cloned().unwrap_or_else(|| fld.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| fld.zero());
        out.push(fld.add(&x, &y));
    }
    poly_trim(fld, &mut out);
    out
}

pub fn poly_sub<F: Field>(fld: &F, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let x = a.get(i).cloned().unwrap_or_else(|| fld.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| fld.zero());
        out.push(fld.sub(&x, &y));
    }
    poly_trim(fld, &mut out);
    out
}

pub fn poly_mul<F: Field>(fld: &F, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
    let da = match poly_deg(fld, a) {
        Some(d) => d,
        None => return vec![],
    };
    let db = match poly_deg(fld, b) {
        Some(d) => d,
        None => return vec![],
    };
    let mut out = vec![fld.zero(); da + db + 1];
    for (i, ai) in a.iter().enumerate().take(da + 1) {
        if fld.is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            if fld.is_zero(bj) {
                continue;
            }
            let t = fld.mul(ai, bj);
            out[i + j] = fld.add(&out[i + j], &t);
        }
    }
    poly_trim(fld, &mut out);
    out
}

/// Remainder of `a` modulo `m` (m nonzero).
pub fn poly_rem<F: Field>(fld: &F, a: &[F::E], m: &[F::E]) -> Vec<F::E> {
    let dm = poly_deg(fld, m).expect("zero modulus");
    let lead_inv = fld.inv(&m[dm]);
    let mut r: Vec<F::E> = a.to_vec();
    poly_trim(fld, &mut r);
    while let Some(dr) = poly_deg(fld, &r) {
        if dr < dm {
            break;
        }
        let factor = fld.mul(&r[dr], &lead_inv);
        for k in 0..=dm {
            let t = fld.mul(&factor, &m[k]);
            r[dr - dm + k] = fld.sub(&r[dr - dm + k], &t);
        }
        poly_trim(fld, &mut r);
    }
    r
}

/// Monic gcd of two polynomials.
pub fn poly_gcd<F: Field>(fld: &F, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
    let mut x: Vec<F::E> = a.to_vec();
    let mut y: Vec<F::E> = b.to_vec();
    poly_trim(fld, &mut x);
    poly_trim(fld, &mut y);
    while !y.is_empty() {
        let r = poly_rem(fld, &x, &y);
        x = y;
        y = r;
    }
    if let Some(d) = poly_deg(fld, &x) {
        let li = fld.inv(&x[d]);
        for c in x.iter_mut() {
            *c = fld.mul(c, &li);
        }
    }
    x
}

/// base^exp modulo m, exponent as u128.
pub fn poly_powmod<F: Field>(fld: &F, base: &[F::E], mut exp: u128, m: &[F::E]) -> Vec<F::E> {
    let mut acc = vec![fld.one()];
    let mut b = poly_rem(fld, base, m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_rem(fld, &poly_mul(fld, &acc, &b), m);
        }
        b = poly_rem(fld, &poly_mul(fld, &b, &b), m);
        exp >>= 1;
    }
    acc
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin irreducibility test for a monic polynomial over a field with q
/// elements: f of degree d is irreducible iff t^{q^d} = t mod f and, for
/// every prime r dividing d, gcd(t^{q^{d/r}} - t, f) = 1.
pub fn poly_is_irreducible<F: Field>(fld: &F, f: &[F::E], q: u128) -> bool {
    let d = match poly_deg(fld, f) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if d == 1 {
        return true;
    }
    let x = vec![fld.zero(), fld.one()];
    for r in prime_factors(d) {
        let e = q.checked_pow((d / r) as u32).expect("field size overflow");
        let xp = poly_powmod(fld, &x, e, f);
        let diff = poly_sub(fld, &xp, &x);
        let g = poly_gcd(fld, &diff, f);
        if poly_deg(fld, &g) != Some(0) {
            return false;
        }
    }
    let e = q.checked_pow(d as u32).expect("field size overflow");
    let xp = poly_powmod(fld, &x, e, f);
    poly_sub(fld, &xp, &x).is_empty()
}

// ---------------------------------------------------------------------------
// Dense matrices (Vec of rows)
// ---------------------------------------------------------------------------

pub type Mat<E> = Vec<Vec<E>>;

/// In-place reduction to reduced row-echelon form. Returns the pivot
/// columns (one per nonzero row, in order). Pivot choice is the first
/// nonzero entry in the column, so the result is deterministic.
pub fn rref<F: Field>(fld: &F, m: &mut Mat<F::E>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows).find(|&i| !fld.is_zero(&m[i][c]));
        let piv = match piv {
            Some(i) => i,
            None => continue,
        };
        m.swap(r, piv);
        let li = fld.inv(&m[r][c].clone());
        for x in m[r].iter_mut() {
            *x = fld.mul(x, &li);
        }
        for i in 0..rows {
            if i != r && !fld.is_zero(&m[i][c]) {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let t = fld.mul(&factor, &m[r][j]);
                    m[i][j] = fld.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn mat_rank<F: Field>(fld: &F, m: &Mat<F::E>) -> usize {
    let mut c = m.clone();
    rref(fld, &mut c).len()
}

/// Basis of the right null space { x : Mx = 0 }, one vector per free
/// column, in column order (standard unit-completion from the RREF).
pub fn nullspace<F: Field>(fld: &F, m: &Mat<F::E>) -> Vec<Vec<F::E>> {
    if m.is_empty() {
        return vec![];
    }
    let cols = m[0].len();
    let mut red = m.clone();
    let pivots = rref(fld, &mut red);
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![fld.zero(); cols];
        v[free] = fld.one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = fld.neg(&red[row][free]);
        }
        basis.push(v);
    }
    basis
}

/// A particular solution of Mx = b (free variables set to zero), or None
/// when the system is inconsistent.
pub fn solve<F: Field>(fld: &F, m: &Mat<F::E>, b: &[F::E]) -> Option<Vec<F::E>> {
    assert_eq!(m.len(), b.len());
    if m.is_empty() {
        return Some(vec![]);
    }
    let cols = m[0].len();
    let mut aug: Mat<F::E> = m
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(fld, &mut aug);
    if pivots.contains(&cols) {
        return None; // pivot in the rhs column
    }
    let mut x = vec![fld.zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Some(x)
}

/// Exact determinant by elimination with first-nonzero pivoting.
pub fn det<F: Field>(fld: &F, m: &Mat<F::E>) -> F::E {
    let k = m.len();
    assert!(m.iter().all(|r| r.len() == k), "determinant of non-square matrix");
    let mut a = m.clone();
    let mut acc = fld.one();
    for c in 0..k {
        let piv = (c..k).find(|&i| !fld.is_zero(&a[i][c]));
        let piv = match piv {
            Some(i) => i,
            None => return fld.zero(),
        };
        if piv != c {
            a.swap(c, piv);
            acc = fld.neg(&acc);
        }
        acc = fld.mul(&acc, &a[c][c]);
        let li = fld.inv(&a[c][c].clone());
        for i in (c + 1)..k {
            if fld.is_zero(&a[i][c]) {
                continue;
            }
            let factor = fld.mul(&a[i][c], &li);
            for j in c..k {
                let t = fld.mul(&factor, &a[c][j]);
                a[i][j] = fld.sub(&a[i][j], &t);
            }
        }
    }
    acc
}
