//! Independent reference implementations.
//!
//! Nothing here uses the enumeration, matrix or rank code of
//! [`crate::cohomology`]; only the lattice types, pairings and polynomials
//! are shared. Linear algebra is plain Gaussian elimination over `Q`, one
//! column at a time, on the full unblocked matrices.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::cohomology::{GradedDimTable, Ring};
use crate::lattice::{pairing, LatticeEnv, MPoint, NPoint, Q64, DIM};
use crate::model::{DifferentialTerm, Model};
use crate::poly::{monomials, Exps, Poly};

/// Largest cochain space the oracle agrees to build.
pub const ORACLE_LIMIT: usize = 200_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("t_max must be at least 2, got {0}")]
    TMaxTooSmall(u32),
    #[error("C_{t} has {size} basis elements, more than the oracle limit {ORACLE_LIMIT}")]
    TooLarge { t: u32, size: usize },
    #[error("d maps {from} to {to}, which carry different block labels")]
    BlockViolation { from: String, to: String },
}

/// Echelon form built one vector at a time. Each stored row is one at its
/// pivot position, and every row stored after it is zero there. Reducing
/// against pivots oldest first therefore never brings back an eliminated
/// position. The caller's `weight` picks which entry of a new independent
/// row becomes its pivot (smallest weight, ties to the smallest index).
#[derive(Default)]
struct Echelon {
    pivots: HashMap<usize, (usize, Vec<(usize, BigRational)>)>,
}

impl Echelon {
    /// Adds `v` (sorted, nonzero entries) and reports whether it was
    /// independent of the vectors seen so far.
    fn insert(&mut self, mut v: Vec<(usize, BigRational)>, weight: impl Fn(usize) -> u64) -> bool {
        loop {
            let oldest = v
                .iter()
                .filter_map(|(r, c)| self.pivots.get(r).map(|(age, _)| (*age, *r, c)))
                .min_by_key(|x| x.0)
                .map(|(_, r, c)| (r, c.clone()));
            let Some((r, c)) = oldest else { break };
            v = axpy(&v, &c, &self.pivots[&r].1);
        }
        let Some((lead, c)) = v.iter().min_by_key(|(r, _)| (weight(*r), *r)).cloned() else {
            return false;
        };
        let inv = c.recip();
        for e in v.iter_mut() {
            e.1 *= &inv;
        }
        let age = self.pivots.len();
        self.pivots.insert(lead, (age, v));
        true
    }
}

/// `v − c·p` on sorted sparse vectors.
fn axpy(v: &[(usize, BigRational)], c: &BigRational, p: &[(usize, BigRational)]) -> Vec<(usize, BigRational)> {
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < p.len() {
        let vi = v.get(i).map_or(usize::MAX, |e| e.0);
        let pj = p.get(j).map_or(usize::MAX, |e| e.0);
        if vi < pj {
            out.push(v[i].clone());
            i += 1;
        } else if pj < vi {
            out.push((pj, -(c * &p[j].1)));
            j += 1;
        } else {
            let x = &v[i].1 - c * &p[j].1;
            if !x.is_zero() {
                out.push((vi, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn to_sorted(map: BTreeMap<usize, BigRational>) -> Vec<(usize, BigRational)> {
    map.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

fn q(x: Q64) -> BigRational {
    BigRational::new((*x.numer()).into(), (*x.denom()).into())
}

// ---------------------------------------------------------------------------
// Jacobian ring

/// Graded dimensions of `C[x_0..x_4] / ⟨R^0, …, R^4⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianReport {
    pub dims: Vec<u64>,
}

/// `dims[d]` for `0 ≤ d ≤ d_max`: degree-`d` monomials modulo the image of
/// `(A_i) ↦ Σ A_i R^i` from `C[x]_{d−4}^5`.
pub fn jacobian_dims(r: &[Poly; DIM], d_max: u32) -> JacobianReport {
    for p in r {
        assert_eq!(p.degree(), 4, "the R^i must be homogeneous of degree 4");
    }
    let mut dims = Vec::new();
    for d in 0..=d_max {
        let target = monomials(d);
        if d < 4 {
            dims.push(target.len() as u64);
            continue;
        }
        let index: HashMap<Exps, usize> = target.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut ech = Echelon::default();
        let mut rank = 0u64;
        for mu in monomials(d - 4) {
            for p in r {
                let mut col = BTreeMap::new();
                for (e, c) in p.terms() {
                    let prod: Exps = std::array::from_fn(|k| e[k] + mu[k]);
                    *col.entry(index[&prod]).or_insert_with(BigRational::zero) += c;
                }
                if ech.insert(to_sorted(col), |r| r as u64) {
                    rank += 1;
                }
            }
        }
        dims.push(target.len() as u64 - rank);
    }
    JacobianReport { dims }
}

// ---------------------------------------------------------------------------
// Chiral complex

type Cell = (MPoint, NPoint, Vec<usize>);

/// All integer 5-vectors with entries in `0..=total` and the given sum,
/// by a plain odometer.
fn vectors_with_sum(total: i64) -> Vec<[i64; DIM]> {
    let mut out = Vec::new();
    let mut v = [0i64; DIM];
    loop {
        if v.iter().sum::<i64>() == total {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == DIM {
                return out;
            }
            if v[i] < total {
                v[i] += 1;
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

fn subsets() -> Vec<Vec<usize>> {
    (0u32..32)
        .map(|mask| (0..DIM).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

fn lattice_pairs(t: u32) -> Vec<(MPoint, NPoint)> {
    let mut out = Vec::new();
    for k in 0..=t as i64 {
        let l = t as i64 - k;
        let a_list: Vec<MPoint> = vectors_with_sum(5 * k)
            .into_iter()
            .filter_map(|v| MPoint::new(v).ok())
            .collect();
        let b_list: Vec<NPoint> = vectors_with_sum(5 * l)
            .into_iter()
            .filter_map(|v| NPoint::from_numerators(v).ok())
            .collect();
        for a in &a_list {
            for b in &b_list {
                if pairing(a, b).is_zero() {
                    out.push((*a, *b));
                }
            }
        }
    }
    out
}

fn cochains(t: u32) -> Vec<Cell> {
    let subsets = subsets();
    lattice_pairs(t)
        .into_iter()
        .flat_map(|(a, b)| subsets.iter().map(move |s| (a, b, s.clone())))
        .collect()
}

fn degrees(c: &Cell) -> (i64, i64, i64) {
    let env = LatticeEnv::quintic();
    let k = pairing(&c.0, &env.degv).to_integer();
    let l = pairing(&env.deg, &c.1).to_integer();
    (k, l, c.2.len() as i64)
}

fn label(c: &Cell, ring: Ring) -> i32 {
    let (k, l, e) = degrees(c);
    (match ring {
        Ring::A => k - e - l,
        Ring::B => l - e - k,
    }) as i32
}

/// `x_i ∧ x_S`, as (sign, sorted set), or `None` if `i ∈ S`.
fn wedge(i: usize, s: &[usize]) -> Option<(i32, Vec<usize>)> {
    if s.contains(&i) {
        return None;
    }
    let mut list = vec![i];
    list.extend_from_slice(s);
    // Bubble sort, counting transpositions.
    let mut sign = 1;
    for a in 0..list.len() {
        for b in 0..list.len() - 1 - a {
            if list[b] > list[b + 1] {
                list.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    Some((sign, list))
}

/// Applies one differential to one cochain, writing into `out`.
fn apply(
    terms: &[DifferentialTerm],
    env: &LatticeEnv,
    ring: Ring,
    c: &Cell,
    out: &mut BTreeMap<Cell, BigRational>,
) {
    let (a, b, s) = c;
    for term in terms {
        match term {
            DifferentialTerm::M { index, momentum, coef } => {
                let a2 = *a + *momentum;
                if !pairing(&a2, b).is_zero() {
                    continue;
                }
                match ring {
                    Ring::A => {
                        if let Some((sign, s2)) = wedge(*index, s) {
                            *out.entry((a2, *b, s2)).or_insert_with(BigRational::zero) +=
                                coef * BigRational::from_integer(sign.into());
                        }
                    }
                    Ring::B => {
                        // ι_{m_i} on v_S, with m_i·v_j from the lattice.
                        for (p, &j) in s.iter().enumerate() {
                            let v = q(pairing(&env.dual_basis[*index], &env.vertices[j]));
                            if v.is_zero() {
                                continue;
                            }
                            let mut s2 = s.clone();
                            s2.remove(p);
                            let sign = if p % 2 == 0 { 1 } else { -1 };
                            *out.entry((a2, *b, s2)).or_insert_with(BigRational::zero) +=
                                coef * v * BigRational::from_integer(sign.into());
                        }
                    }
                }
            }
            DifferentialTerm::N { momentum, coef } => {
                let b2 = *b + *momentum;
                if !pairing(a, &b2).is_zero() {
                    continue;
                }
                match ring {
                    Ring::A => {
                        for (p, &j) in s.iter().enumerate() {
                            let v = q(pairing(&env.dual_basis[j], momentum));
                            if v.is_zero() {
                                continue;
                            }
                            let mut s2 = s.clone();
                            s2.remove(p);
                            let sign = if p % 2 == 0 { 1 } else { -1 };
                            *out.entry((*a, b2, s2)).or_insert_with(BigRational::zero) +=
                                coef * v * BigRational::from_integer(sign.into());
                        }
                    }
                    Ring::B => {
                        for j in 0..DIM {
                            let v = q(pairing(&env.dual_basis[j], momentum));
                            if v.is_zero() {
                                continue;
                            }
                            if let Some((sign, s2)) = wedge(j, s) {
                                *out.entry((*a, b2, s2)).or_insert_with(BigRational::zero) +=
                                    coef * v * BigRational::from_integer(sign.into());
                            }
                        }
                    }
                }
            }
        }
    }
}

fn describe(c: &Cell) -> String {
    format!("[{}, {}]⊗{:?}", c.0, c.1, c.2)
}

/// Cohomology dimensions by brute force. Same contract as
/// [`crate::cohomology::cohomology_dims`].
pub fn dense_cohomology_dims(model: &Model, ring: Ring, t_max: u32) -> Result<GradedDimTable, OracleError> {
    if t_max < 2 {
        return Err(OracleError::TMaxTooSmall(t_max));
    }
    let env = LatticeEnv::quintic();
    let terms = model.differential_terms();
    for t in 0..=t_max {
        let size = 32 * lattice_pairs(t).len();
        if size > ORACLE_LIMIT {
            return Err(OracleError::TooLarge { t, size });
        }
    }
    let spaces: Vec<Vec<Cell>> = (0..=t_max).map(cochains).collect();

    // rank_by_label[t][w] = rank of d_t restricted to label w, obtained by
    // crediting each independent column to its label. Valid because every
    // entry is checked to connect equal labels, so the matrix is block
    // diagonal after permutation.
    let mut rank_by_label: Vec<BTreeMap<i32, u64>> = Vec::new();
    for t in 0..t_max as usize {
        let index: HashMap<&Cell, usize> = spaces[t + 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut cols = Vec::with_capacity(spaces[t].len());
        let mut hits = vec![0u64; spaces[t + 1].len()];
        for c in &spaces[t] {
            let w = label(c, ring);
            let mut image = BTreeMap::new();
            apply(&terms, &env, ring, c, &mut image);
            let mut col = BTreeMap::new();
            for (target, v) in image {
                if v.is_zero() {
                    continue;
                }
                if label(&target, ring) != w {
                    return Err(OracleError::BlockViolation {
                        from: describe(c),
                        to: describe(&target),
                    });
                }
                let row = *index.get(&target).expect("image lies in the next cochain space");
                hits[row] += 1;
                col.insert(row, v);
            }
            cols.push((w, to_sorted(col)));
        }
        // Pivoting on the sparsest available row keeps fill-in small.
        let mut ech = Echelon::default();
        let mut ranks = BTreeMap::new();
        for (w, col) in cols {
            if ech.insert(col, |r| hits[r]) {
                *ranks.entry(w).or_insert(0u64) += 1;
            }
        }
        rank_by_label.push(ranks);
    }

    let mut dims = BTreeMap::new();
    for t in 0..t_max as usize {
        let mut sizes: BTreeMap<i32, u64> = BTreeMap::new();
        for c in &spaces[t] {
            *sizes.entry(label(c, ring)).or_insert(0) += 1;
        }
        for (w, n) in sizes {
            let out = rank_by_label[t].get(&w).copied().unwrap_or(0);
            let inc = if t == 0 {
                0
            } else {
                rank_by_label[t - 1].get(&w).copied().unwrap_or(0)
            };
            dims.insert((t as u32, w), n - out - inc);
        }
    }
    Ok(GradedDimTable::from_dims(ring, t_max, dims))
}

/// `d_{t+1}(d_t(c))` for every cochain `c` of degree `t`; returns the first
/// cochain whose image is nonzero.
pub fn dense_d_squared_witness(model: &Model, ring: Ring, t: u32) -> Option<String> {
    let env = LatticeEnv::quintic();
    let terms = model.differential_terms();
    for c in cochains(t) {
        let mut once = BTreeMap::new();
        apply(&terms, &env, ring, &c, &mut once);
        let mut twice = BTreeMap::new();
        for (x, v) in once {
            let mut img = BTreeMap::new();
            apply(&terms, &env, ring, &x, &mut img);
            for (y, u) in img {
                *twice.entry(y).or_insert_with(BigRational::zero) += &v * u;
            }
        }
        if twice.values().any(|v| !v.is_zero()) {
            return Some(describe(&c));
        }
    }
    None
}

/// Number of cochains of degree `t`, by brute enumeration.
pub fn cochain_count(t: u32) -> usize {
    cochains(t).len()
}
