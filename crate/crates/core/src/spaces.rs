//! Subspaces of Alt(L) and Bil(L) built from the trace forms, the
//! decomposition maps φ for odd and even degree, and rank censuses.
//!
//! A^i is spanned by the images of the basis {v^j} under b ↦ f_{b,σ^i};
//! B_t is the bilinear analogue Tr(b σ^t(x) y). Censuses enumerate (or
//! sample) coordinate tuples of a sum of such spaces and tally exact ranks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{mat_rank, nullspace, rref, solve, Field};
use crate::error::{Error, Result};
use crate::forms::{build_alt_form, build_general_form, GramForm};
use crate::rng::sample_u64;
use crate::tower::{FieldElement, KElem, TowerField, TowerParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    /// A^i = { f_{b,σ^i} } with ord(σ^i) > 2
    AltA,
    /// A^i for an involution index (dimension n/2)
    AltBInvolution,
    /// B_t = { (x,y) ↦ Tr(b σ^t(x) y) }
    BilB,
}

/// A K-subspace of Alt(L) or Bil(L) with an explicit Gram-matrix basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormSpace {
    pub params: TowerParams,
    pub kind: SpaceKind,
    pub indices: Vec<usize>,
    pub basis: Vec<GramForm>,
}

impl FormSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Row space of the flattened basis Gram matrices.
    fn flat_rows(&self) -> Vec<Vec<KElem>> {
        self.basis.iter().map(|g| g.flatten()).collect()
    }

    /// Subspace equality via row-space equality of flattened bases.
    pub fn same_subspace(&self, tower: &TowerField, other: &FormSpace) -> bool {
        if self.params != other.params {
            return false;
        }
        let ka = tower.karith();
        let a = self.flat_rows();
        let b = other.flat_rows();
        let ra = mat_rank(&ka, &a);
        let rb = mat_rank(&ka, &b);
        let mut all = a;
        all.extend(b);
        ra == rb && mat_rank(&ka, &all) == ra
    }
}

/// Greedily keeps the forms whose flattened Gram rows are independent.
fn independent_subset(tower: &TowerField, forms: Vec<GramForm>) -> Vec<GramForm> {
    let ka = tower.karith();
    let mut kept: Vec<GramForm> = Vec::new();
    let mut rows: Vec<Vec<KElem>> = Vec::new();
    let mut r = 0usize;
    for f in forms {
        rows.push(f.flatten());
        let nr = mat_rank(&ka, &rows);
        if nr > r {
            r = nr;
            kept.push(f);
        } else {
            rows.pop();
        }
    }
    kept
}

/// A^{σ^i} with basis reduced from the images of {v^j}. Dimension n when
/// ord(σ^i) ≠ 2 and n/2 for an involution.
pub fn space_a(tower: &TowerField, i: usize) -> Result<FormSpace> {
    let n = tower.n();
    if i % n == 0 {
        return Err(Error::IdentityAutomorphism(i));
    }
    let images: Vec<GramForm> = (0..n)
        .map(|j| build_alt_form(tower, &tower.basis_element(j), i))
        .collect::<Result<_>>()?;
    let basis = independent_subset(tower, images);
    let kind = if tower.aut_order(i) == 2 {
        SpaceKind::AltBInvolution
    } else {
        SpaceKind::AltA
    };
    Ok(FormSpace {
        params: tower.params(),
        kind,
        indices: vec![i % n],
        basis,
    })
}

/// B_t = { (x,y) ↦ Tr(b σ^t(x) y) : b ∈ L }, t = 0 (identity) allowed.
pub fn space_b_bil(tower: &TowerField, t: usize) -> Result<FormSpace> {
    let n = tower.n();
    if t >= n {
        return Err(Error::Precondition(format!("index t = {t} out of range 0..{n}")));
    }
    let images: Vec<GramForm> = (0..n)
        .map(|j| {
            let mut bs = vec![tower.zero(); n];
            bs[t] = tower.basis_element(j);
            build_general_form(tower, &bs)
        })
        .collect::<Result<_>>()?;
    let basis = independent_subset(tower, images);
    Ok(FormSpace {
        params: tower.params(),
        kind: SpaceKind::BilB,
        indices: vec![t],
        basis,
    })
}

/// φ(b_1, ..., b_m) = Σ f_{b_i,σ^i} for odd n = 2m + 1.
pub fn phi_odd(tower: &TowerField, bs: &[FieldElement]) -> Result<GramForm> {
    let n = tower.n();
    if n % 2 == 0 {
        return Err(Error::Precondition("phi_odd requires odd n".into()));
    }
    let m = (n - 1) / 2;
    if bs.len() != m {
        return Err(Error::Precondition(format!(
            "phi_odd needs {} coefficients, got {}",
            m,
            bs.len()
        )));
    }
    let mut acc = GramForm::zero(tower);
    for (idx, b) in bs.iter().enumerate() {
        acc = acc.add(tower, &build_alt_form(tower, b, idx + 1)?)?;
    }
    Ok(acc)
}

/// φ(b, c_1, ..., c_m) = f_{b,τ} + Σ f_{c_j,σ^j} for even n, with
/// τ = σ^{n/2} the unique involution and m = (n - 2)/2.
pub fn phi_even(
    tower: &TowerField,
    b_invol: Option<&FieldElement>,
    cs: &[FieldElement],
) -> Result<GramForm> {
    let n = tower.n();
    if n % 2 != 0 {
        return Err(Error::Precondition("phi_even requires even n".into()));
    }
    let m = (n - 2) / 2;
    if cs.len() != m {
        return Err(Error::Precondition(format!(
            "phi_even needs {} non-involution coefficients, got {}",
            m,
            cs.len()
        )));
    }
    let zero = tower.zero();
    let b = b_invol.unwrap_or(&zero);
    let mut acc = build_alt_form(tower, b, n / 2)?;
    for (idx, c) in cs.iter().enumerate() {
        acc = acc.add(tower, &build_alt_form(tower, c, idx + 1)?)?;
    }
    acc.provenance = None;
    Ok(acc)
}

/// Upper-triangle flattening (j < k), the coordinate system of Alt(L).
fn upper_triangle(form: &GramForm) -> Vec<KElem> {
    let n = form.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for k in (j + 1)..n {
            out.push(form.entry(j, k).clone());
        }
    }
    out
}

fn require_alternating(tower: &TowerField, form: &GramForm) -> Result<()> {
    if form.params != tower.params() {
        return Err(Error::TowerMismatch);
    }
    if !form.is_alternating(tower) {
        return Err(Error::NotAlternating);
    }
    Ok(())
}

/// Solves for the coordinates of `rhs_form` against the given generator
/// forms, in the upper-triangle coordinate system.
fn solve_against(
    tower: &TowerField,
    generators: &[GramForm],
    rhs_form: &GramForm,
) -> Result<Vec<KElem>> {
    let ka = tower.karith();
    let cols: Vec<Vec<KElem>> = generators.iter().map(upper_triangle).collect();
    let rows = cols[0].len();
    let mut m = vec![vec![tower.k_zero(); cols.len()]; rows];
    for (c, col) in cols.iter().enumerate() {
        for (r, e) in col.iter().enumerate() {
            m[r][c] = e.clone();
        }
    }
    let rhs = upper_triangle(rhs_form);
    solve(&ka, &m, &rhs).ok_or_else(|| {
        Error::Precondition("form is not in the span of the generators".into())
    })
}

/// The unique preimage of an alternating form under φ (odd n).
pub fn decompose_odd(tower: &TowerField, form: &GramForm) -> Result<Vec<FieldElement>> {
    let n = tower.n();
    if n % 2 == 0 {
        return Err(Error::Precondition("decompose_odd requires odd n".into()));
    }
    require_alternating(tower, form)?;
    let m = (n - 1) / 2;
    let mut generators = Vec::with_capacity(m * n);
    for i in 1..=m {
        for j in 0..n {
            generators.push(build_alt_form(tower, &tower.basis_element(j), i)?);
        }
    }
    let x = solve_against(tower, &generators, form)?;
    let bs: Vec<FieldElement> = (0..m)
        .map(|i| FieldElement(x[i * n..(i + 1) * n].to_vec()))
        .collect();
    debug_assert_eq!(phi_odd(tower, &bs)?.entries, form.entries);
    Ok(bs)
}

/// Canonical preimage of an alternating form under φ (even n): the
/// involution coordinate is taken in the fixed complement of Fix(τ)
/// spanned by the basis vectors v^j outside the pivot columns of the
/// row-reduced fixed-field basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenPreimage {
    pub b: FieldElement,
    pub cs: Vec<FieldElement>,
}

/// Indices j such that {v^j} spans a complement of Fix(σ^{n/2}) in L.
pub fn involution_complement_indices(tower: &TowerField) -> Vec<usize> {
    let n = tower.n();
    let ka = tower.karith();
    let fixed = tower.fixed_field_basis(n / 2);
    let mut m: Vec<Vec<KElem>> = fixed.iter().map(|x| x.coords().to_vec()).collect();
    let pivots = rref(&ka, &mut m);
    (0..n).filter(|j| !pivots.contains(j)).collect()
}

pub fn decompose_even(tower: &TowerField, form: &GramForm) -> Result<EvenPreimage> {
    let n = tower.n();
    if n % 2 != 0 {
        return Err(Error::Precondition("decompose_even requires even n".into()));
    }
    require_alternating(tower, form)?;
    let m = (n - 2) / 2;
    let comp = involution_complement_indices(tower);
    debug_assert_eq!(comp.len(), n / 2);
    let mut generators = Vec::new();
    for &j in &comp {
        generators.push(build_alt_form(tower, &tower.basis_element(j), n / 2)?);
    }
    for i in 1..=m {
        for j in 0..n {
            generators.push(build_alt_form(tower, &tower.basis_element(j), i)?);
        }
    }
    let x = solve_against(tower, &generators, form)?;
    let mut b_coords = vec![tower.k_zero(); n];
    for (slot, &j) in comp.iter().enumerate() {
        b_coords[j] = x[slot].clone();
    }
    let b = FieldElement(b_coords);
    let cs: Vec<FieldElement> = (0..m)
        .map(|i| {
            let off = comp.len() + i * n;
            FieldElement(x[off..off + n].to_vec())
        })
        .collect();
    debug_assert_eq!(phi_even(tower, Some(&b), &cs)?.entries, form.entries);
    Ok(EvenPreimage { b, cs })
}

// ---------------------------------------------------------------------------
// Rank censuses
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusMode {
    Exhaustive,
    Random { samples: u64 },
}

/// Rank tally over the (nonzero) coordinate tuples of a sum of spaces.
/// Witnesses record, per observed rank, the lexicographically smallest
/// generating tuple (by canonical element index, first coordinate most
/// significant).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub space: String,
    pub kind: SpaceKind,
    pub indices: Vec<usize>,
    pub mode: CensusMode,
    pub seed: u64,
    pub inspected: u64,
    pub ranks: BTreeMap<usize, u64>,
    pub min_rank: Option<usize>,
    pub witnesses: BTreeMap<usize, Vec<FieldElement>>,
}

struct CensusPartial {
    ranks: BTreeMap<usize, u64>,
    witnesses: BTreeMap<usize, Vec<u128>>,
    inspected: u64,
}

fn census_chunk(
    tower: &TowerField,
    basis_sets: &[Vec<GramForm>],
    mode: CensusMode,
    seed: u64,
    range: std::ops::Range<u128>,
) -> CensusPartial {
    let ka = tower.karith();
    let n = tower.n();
    let k = basis_sets.len();
    let order = tower.order();
    let mut part = CensusPartial {
        ranks: BTreeMap::new(),
        witnesses: BTreeMap::new(),
        inspected: 0,
    };
    let mut entries = vec![vec![tower.k_zero(); n]; n];
    for t in range {
        // decode the coordinate tuple for this step
        let mut tuple: Vec<u128> = Vec::with_capacity(k);
        match mode {
            CensusMode::Exhaustive => {
                let mut rem = t;
                let mut divisor = order.pow((k - 1) as u32);
                for _ in 0..k {
                    tuple.push(rem / divisor);
                    rem %= divisor;
                    divisor = if divisor > 1 { divisor / order } else { 1 };
                }
            }
            CensusMode::Random { .. } => {
                for draw in 0..k {
                    let raw = sample_u64(seed, t as u64, draw as u64);
                    tuple.push(raw as u128 % order);
                }
            }
        }
        if tuple.iter().all(|&e| e == 0) {
            continue;
        }
        // accumulate the Gram matrix of the tuple's form
        for row in entries.iter_mut() {
            for e in row.iter_mut() {
                *e = tower.k_zero();
            }
        }
        for (slot, &eidx) in tuple.iter().enumerate() {
            let elem = tower.element_from_index(eidx);
            for (j, coeff) in elem.coords().iter().enumerate() {
                if tower.k_is_zero(coeff) {
                    continue;
                }
                let g = &basis_sets[slot][j];
                for (r, grow) in g.entries.iter().enumerate() {
                    for (c, ge) in grow.iter().enumerate() {
                        if !tower.k_is_zero(ge) {
                            let t = tower.k_mul(coeff, ge);
                            entries[r][c] = tower.k_add(&entries[r][c], &t);
                        }
                    }
                }
            }
        }
        let rank = mat_rank(&ka, &entries);
        part.inspected += 1;
        *part.ranks.entry(rank).or_insert(0) += 1;
        part.witnesses
            .entry(rank)
            .and_modify(|w| {
                if tuple < *w {
                    *w = tuple.clone();
                }
            })
            .or_insert(tuple);
    }
    part
}

#[allow(clippy::too_many_arguments)]
fn census_engine(
    tower: &TowerField,
    space: String,
    kind: SpaceKind,
    indices: Vec<usize>,
    basis_sets: Vec<Vec<GramForm>>,
    mode: CensusMode,
    budget: u128,
    seed: u64,
    workers: usize,
) -> Result<CensusReport> {
    let k = basis_sets.len();
    let total: u128 = match mode {
        CensusMode::Exhaustive => {
            let needed = tower
                .order()
                .checked_pow(k as u32)
                .ok_or(Error::BudgetExceeded {
                    needed: u128::MAX,
                    budget,
                })?;
            if needed > budget {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            needed
        }
        CensusMode::Random { samples } => samples as u128,
    };
    let workers = workers.max(1);
    let chunk = total / workers as u128 + 1;
    let partials: Vec<CensusPartial> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let basis_sets = &basis_sets;
            let lo = (w as u128 * chunk).min(total);
            let hi = ((w as u128 + 1) * chunk).min(total);
            handles.push(scope.spawn(move || census_chunk(tower, basis_sets, mode, seed, lo..hi)));
        }
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    // merging is commutative: counts add pointwise, witnesses take the
    // lexicographic minimum, so the worker count never affects the report
    let mut ranks: BTreeMap<usize, u64> = BTreeMap::new();
    let mut wit_idx: BTreeMap<usize, Vec<u128>> = BTreeMap::new();
    let mut inspected = 0u64;
    for p in partials {
        inspected += p.inspected;
        for (r, c) in p.ranks {
            *ranks.entry(r).or_insert(0) += c;
        }
        for (r, w) in p.witnesses {
            wit_idx
                .entry(r)
                .and_modify(|cur| {
                    if w < *cur {
                        *cur = w.clone();
                    }
                })
                .or_insert(w);
        }
    }
    let min_rank = ranks.keys().next().copied();
    let witnesses = wit_idx
        .into_iter()
        .map(|(r, tuple)| {
            (
                r,
                tuple
                    .into_iter()
                    .map(|e| tower.element_from_index(e))
                    .collect(),
            )
        })
        .collect();
    Ok(CensusReport {
        space,
        kind,
        indices,
        mode,
        seed,
        inspected,
        ranks,
        min_rank,
        witnesses,
    })
}

/// Census of A^{i_1} ⊕ ... ⊕ A^{i_k}: coordinate tuples (b_1, ..., b_k)
/// with the form Σ f_{b_t, σ^{i_t}}.
#[allow(clippy::too_many_arguments)]
pub fn rank_census(
    tower: &TowerField,
    indices: &[usize],
    mode: CensusMode,
    budget: u128,
    seed: u64,
    workers: usize,
) -> Result<CensusReport> {
    if indices.is_empty() {
        return Err(Error::Precondition("census needs at least one index".into()));
    }
    let n = tower.n();
    let mut basis_sets = Vec::with_capacity(indices.len());
    let mut invol = false;
    for &i in indices {
        if i % n == 0 {
            return Err(Error::IdentityAutomorphism(i));
        }
        if tower.aut_order(i) == 2 {
            invol = true;
        }
        let set: Vec<GramForm> = (0..n)
            .map(|j| build_alt_form(tower, &tower.basis_element(j), i))
            .collect::<Result<_>>()?;
        basis_sets.push(set);
    }
    let kind = if invol {
        SpaceKind::AltBInvolution
    } else {
        SpaceKind::AltA
    };
    let space = format!(
        "{} of Alt(L), L = GF({}^{}), K = GF({}^{})",
        indices
            .iter()
            .map(|i| format!("A^{i}"))
            .collect::<Vec<_>>()
            .join("(+)"),
        tower.p(),
        tower.s() * tower.n(),
        tower.p(),
        tower.s(),
    );
    census_engine(
        tower, space, kind, indices.to_vec(), basis_sets, mode, budget, seed, workers,
    )
}

/// Census of B_{t_1} ⊕ ... ⊕ B_{t_k} in Bil(L); indices are automorphism
/// exponents (0 = identity allowed).
#[allow(clippy::too_many_arguments)]
pub fn bil_census(
    tower: &TowerField,
    indices: &[usize],
    mode: CensusMode,
    budget: u128,
    seed: u64,
    workers: usize,
) -> Result<CensusReport> {
    if indices.is_empty() {
        return Err(Error::Precondition("census needs at least one index".into()));
    }
    let n = tower.n();
    let mut basis_sets = Vec::with_capacity(indices.len());
    for &t in indices {
        if t >= n {
            return Err(Error::Precondition(format!("index t = {t} out of range 0..{n}")));
        }
        let set: Vec<GramForm> = (0..n)
            .map(|j| {
                let mut bs = vec![tower.zero(); n];
                bs[t] = tower.basis_element(j);
                build_general_form(tower, &bs)
            })
            .collect::<Result<_>>()?;
        basis_sets.push(set);
    }
    let space = format!(
        "{} of Bil(L), L = GF({}^{}), K = GF({}^{})",
        indices
            .iter()
            .map(|t| format!("B_{}", t + 1))
            .collect::<Vec<_>>()
            .join("(+)"),
        tower.p(),
        tower.s() * tower.n(),
        tower.p(),
        tower.s(),
    );
    census_engine(
        tower,
        space,
        SpaceKind::BilB,
        indices.to_vec(),
        basis_sets,
        mode,
        budget,
        seed,
        workers,
    )
}

/// Dimension bookkeeping for a direct-sum claim.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectSumReport {
    pub dims: Vec<usize>,
    pub total: usize,
    pub span_dim: usize,
    pub is_direct: bool,
}

pub fn verify_direct_sum(tower: &TowerField, spaces: &[FormSpace]) -> Result<DirectSumReport> {
    if spaces.iter().any(|s| s.params != tower.params()) {
        return Err(Error::TowerMismatch);
    }
    let ka = tower.karith();
    let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
    let total: usize = dims.iter().sum();
    let rows: Vec<Vec<KElem>> = spaces.iter().flat_map(|s| s.flat_rows()).collect();
    let span_dim = mat_rank(&ka, &rows);
    Ok(DirectSumReport {
        dims,
        total,
        span_dim,
        is_direct: span_dim == total,
    })
}

/// Null-space basis of the flattened φ map (odd or even enumeration),
/// as coordinate vectors over the tuple space. Used to check injectivity
/// and the even-degree kernel shape without enumerating the domain.
pub fn phi_nullspace(tower: &TowerField) -> Result<Vec<Vec<KElem>>> {
    let n = tower.n();
    let ka = tower.karith();
    let mut generators = Vec::new();
    if n % 2 == 1 {
        for i in 1..=(n - 1) / 2 {
            for j in 0..n {
                generators.push(build_alt_form(tower, &tower.basis_element(j), i)?);
            }
        }
    } else {
        for j in 0..n {
            generators.push(build_alt_form(tower, &tower.basis_element(j), n / 2)?);
        }
        for i in 1..=(n - 2) / 2 {
            for j in 0..n {
                generators.push(build_alt_form(tower, &tower.basis_element(j), i)?);
            }
        }
    }
    let cols: Vec<Vec<KElem>> = generators.iter().map(upper_triangle).collect();
    let rows = cols[0].len();
    let mut m = vec![vec![ka.zero(); generators.len()]; rows];
    for (c, col) in cols.iter().enumerate() {
        for (r, e) in col.iter().enumerate() {
            m[r][c] = e.clone();
        }
    }
    Ok(nullspace(&ka, &m))
}
