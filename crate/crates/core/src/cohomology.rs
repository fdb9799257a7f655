//! The finite complexes computing the A- and B-chiral rings.
//!
//! Cochains are `C[(K ⊕ K^∨)_0] ⊗ Λ^*`, where `C[(K ⊕ K^∨)_0]` is the
//! monomial ring of `K ⊕ K^∨` modulo monomials `[a, b]` with `a·b > 0`.
//! In the A-ring the exterior algebra is `Λ^*M` on the dual basis `m_i` and
//!
//! ```text
//! d = Σ F^i_m [m] ⊗ (m_i ∧ ·) + Σ g_n [n] ⊗ ι_n,     ι_n(m_i) = m_i·n;
//! ```
//!
//! the B-ring uses `Λ^*N` on the vertices `v_i` with wedges and contractions
//! exchanged.
//!
//! Gradings. Write `k = a·deg^∨`, `l = deg·b`. Every `m ∈ Δ` has
//! `m·deg^∨ = 1` and every `n ∈ Δ^∨` has `deg·n = 1`, so both summands raise
//! `t = k + l` by one. The first summand raises `k` and `|S|` by one, the
//! second raises `l` by one and lowers `|S|` by one; hence
//! `w = k − |S| − l` is conserved. For the B-ring the roles of wedge and
//! contraction swap and `w_B = l − |S| − k` is conserved instead. The complex
//! therefore splits into finite blocks indexed by `(t, w)`.
//!
//! Quotient ring. All pairings between `K` and `K^∨` are nonnegative and
//! additive, so `[a, b]·[m, 0] = [a + m, b]` vanishes exactly when `m·b > 0`.
//! Because the coordinates of both points are nonnegative this is the test
//! `supp(m) ∩ supp(b) ≠ ∅`, which is how it is evaluated here.
//!
//! `d² = 0`. The wedge–wedge and contraction–contraction parts cancel by
//! antisymmetry. The mixed part of the A-ring is
//! `Σ F^i_m g_n (m_i·n) [a + m, b + n]`, and `[a + m, b + n] = 0` whenever
//! `m·n ≥ 1`, which valid data guarantees when `m_i·n ≠ 0`. The B-ring is
//! identical after swapping roles.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::int::Int;
use crate::lattice::{enum_graded_k, enum_graded_kdual, MPoint, NPoint, DIM};
use crate::model::{DifferentialTerm, Model, ModelError};
use crate::sparse::{rank, sparse_row, SparseRow};

/// Largest supported cochain degree; coordinates are stored in bytes.
pub const T_LIMIT: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    A,
    B,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::A => "A",
            Ring::B => "B",
        })
    }
}

impl std::str::FromStr for Ring {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" | "a" => Ok(Ring::A),
            "B" | "b" => Ok(Ring::B),
            other => Err(format!("unknown ring {other:?}; expected A or B")),
        }
    }
}

#[derive(Debug, Error)]
pub enum CohomologyError {
    #[error("t_max must be at least 2, got {0}")]
    TMaxTooSmall(u32),
    #[error("t_max {0} exceeds the supported limit {T_LIMIT}")]
    TMaxTooLarge(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("failed to build thread pool: {0}")]
    Threads(String),
}

/// A basis vector `[a, b] ⊗ e_S`. `b` is stored by its numerators over 5;
/// bit `i` of `s` marks the exterior generator with index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChiralBasisElement {
    pub a: [u8; DIM],
    pub b: [u8; DIM],
    pub s: u8,
}

fn mask(x: &[u8; DIM]) -> u8 {
    x.iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| if v > 0 { acc | (1 << i) } else { acc })
}

fn below(s: u8, i: usize) -> bool {
    // Parity of the number of set bits of `s` below `i`.
    (s & ((1u8 << i) - 1)).count_ones() % 2 == 1
}

impl ChiralBasisElement {
    pub fn new(a: &MPoint, b: &NPoint, s: u8) -> Self {
        Self {
            a: a.coords().map(|x| u8::try_from(x).expect("point of K within byte range")),
            b: b.numerators().map(|x| u8::try_from(x).expect("point of K^∨ within byte range")),
            s,
        }
    }

    pub fn a_point(&self) -> MPoint {
        MPoint::new(self.a.map(i64::from)).expect("stored points lie in M")
    }

    pub fn b_point(&self) -> NPoint {
        NPoint::from_numerators(self.b.map(i64::from)).expect("stored points lie in N")
    }

    pub fn k(&self) -> u32 {
        self.a.iter().map(|&x| x as u32).sum::<u32>() / 5
    }

    pub fn l(&self) -> u32 {
        self.b.iter().map(|&x| x as u32).sum::<u32>() / 5
    }

    pub fn t(&self) -> u32 {
        self.k() + self.l()
    }

    pub fn ext_degree(&self) -> u32 {
        self.s.count_ones()
    }

    /// The conserved block label.
    pub fn w(&self, ring: Ring) -> i32 {
        let (k, l, e) = (self.k() as i32, self.l() as i32, self.ext_degree() as i32);
        match ring {
            Ring::A => k - e - l,
            Ring::B => l - e - k,
        }
    }

    /// `a·b = 0`.
    pub fn is_valid(&self) -> bool {
        mask(&self.a) & mask(&self.b) == 0
    }

    /// Packs into an integer whose order is the lexicographic order of
    /// `(a, b, s)`.
    pub fn key(&self) -> u128 {
        let mut k = 0u128;
        for &x in self.a.iter().chain(self.b.iter()) {
            k = (k << 8) | x as u128;
        }
        (k << 8) | self.s as u128
    }
}

impl fmt::Display for ChiralBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = (0..DIM).filter(|i| self.s & (1 << i) != 0).map(|i| i.to_string()).collect();
        write!(f, "[{}, {}]⊗{{{}}}", self.a_point(), self.b_point(), idx.join(","))
    }
}

/// The basis of `C_t`, lexicographic in `(a, b, S)`, with block labels.
#[derive(Debug, Clone)]
pub struct GradedPiece {
    pub t: u32,
    pub ring: Ring,
    pub basis: Vec<ChiralBasisElement>,
    pub w: Vec<i32>,
}

/// Lattice pairs `(a, b)` with `k + l = t` and `a·b = 0`, any order.
fn lattice_pairs(t: u32) -> Vec<([u8; DIM], [u8; DIM])> {
    let mut out = Vec::new();
    for k in 0..=t {
        let bs: Vec<[u8; DIM]> = enum_graded_kdual(t - k)
            .iter()
            .map(|b| b.numerators().map(|x| x as u8))
            .collect();
        let bmasks: Vec<u8> = bs.iter().map(mask).collect();
        for a in enum_graded_k(k) {
            let a = a.coords().map(|x| x as u8);
            let am = mask(&a);
            for (b, bm) in bs.iter().zip(&bmasks) {
                if am & bm == 0 {
                    out.push((a, *b));
                }
            }
        }
    }
    out
}

fn all_elements(t: u32) -> Vec<ChiralBasisElement> {
    let mut out: Vec<ChiralBasisElement> = lattice_pairs(t)
        .into_iter()
        .flat_map(|(a, b)| (0..32u8).map(move |s| ChiralBasisElement { a, b, s }))
        .collect();
    out.sort_unstable_by_key(ChiralBasisElement::key);
    out
}

pub fn basis_t(t: u32, ring: Ring) -> GradedPiece {
    assert!(t <= T_LIMIT, "cochain degree {t} beyond supported range");
    let basis = all_elements(t);
    let w = basis.iter().map(|e| e.w(ring)).collect();
    GradedPiece { t, ring, basis, w }
}

/// `|C_t|` without materializing the basis.
pub fn dim_c(t: u32) -> u64 {
    32 * lattice_pairs(t).len() as u64
}

/// Basis of `C_t` grouped by block label.
pub fn blocks_t(t: u32, ring: Ring) -> BTreeMap<i32, Vec<ChiralBasisElement>> {
    let mut out: BTreeMap<i32, Vec<ChiralBasisElement>> = BTreeMap::new();
    for e in all_elements(t) {
        out.entry(e.w(ring)).or_default().push(e);
    }
    out
}

#[derive(Debug, Clone)]
struct MTerm {
    index: usize,
    m: [u8; DIM],
    mask: u8,
    coef: Int,
}

#[derive(Debug, Clone)]
struct NTerm {
    n: [u8; DIM],
    mask: u8,
    /// `scale · g_n · (m_j·n)` for each `j`.
    coefs: [Int; DIM],
}

/// The differential of one model on one ring, with all coefficients
/// multiplied by a common positive integer `scale` so that they are integral.
#[derive(Debug, Clone)]
pub struct Differential {
    ring: Ring,
    scale: BigInt,
    mterms: Vec<MTerm>,
    nterms: Vec<NTerm>,
}

fn to_int(q: &BigRational) -> Int {
    assert!(q.is_integer(), "coefficient {q} not integral after scaling");
    Int::from(q.to_integer())
}

impl Differential {
    /// Requires `model.f` to satisfy the divisibility condition; otherwise
    /// the operator is not a differential.
    pub fn new(model: &Model, ring: Ring) -> Result<Self, ModelError> {
        model.f.validate()?;
        Ok(Self::new_unchecked(model, ring))
    }

    pub fn new_unchecked(model: &Model, ring: Ring) -> Self {
        let five = BigInt::from(5);
        let scale = model.f.denominator_lcm().lcm(&(model.g.denominator_lcm() * &five));
        let scale_q = BigRational::from_integer(scale.clone());
        let mut mterms = Vec::new();
        let mut nterms = Vec::new();
        for term in model.differential_terms() {
            match term {
                DifferentialTerm::M { index, momentum, coef } => {
                    let m = momentum.coords().map(|x| x as u8);
                    mterms.push(MTerm {
                        index,
                        m,
                        mask: mask(&m),
                        coef: to_int(&(coef * &scale_q)),
                    });
                }
                DifferentialTerm::N { momentum, coef } => {
                    let n = momentum.numerators().map(|x| x as u8);
                    let base = coef * &scale_q;
                    let coefs = std::array::from_fn(|j| {
                        to_int(&(&base * BigRational::new(BigInt::from(n[j]), five.clone())))
                    });
                    nterms.push(NTerm {
                        n,
                        mask: mask(&n),
                        coefs,
                    });
                }
            }
        }
        Self {
            ring,
            scale,
            mterms,
            nterms,
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// `d` split into single-generator summands; `None` if a coefficient
    /// does not fit an `i64`.
    fn atoms(&self) -> Option<Vec<Atom>> {
        let m_inserts = self.ring == Ring::A;
        let mut out = Vec::new();
        for t in &self.mterms {
            let Int::Small(c) = t.coef else { return None };
            out.push(Atom {
                on_a: true,
                shift: t.m,
                mask: t.mask,
                bit: t.index as u8,
                insert: m_inserts,
                coef: c,
            });
        }
        for t in &self.nterms {
            for (j, c) in t.coefs.iter().enumerate() {
                match c {
                    Int::Small(0) => {}
                    Int::Small(c) => out.push(Atom {
                        on_a: false,
                        shift: t.n,
                        mask: t.mask,
                        bit: j as u8,
                        insert: !m_inserts,
                        coef: *c,
                    }),
                    Int::Big(_) => return None,
                }
            }
        }
        Some(out)
    }

    /// The integer by which every matrix entry has been multiplied.
    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Appends `d(e)` to `out` as (basis element, scaled coefficient) pairs;
    /// repeated targets are possible.
    pub fn apply(&self, e: &ChiralBasisElement, out: &mut Vec<(ChiralBasisElement, Int)>) {
        let amask = mask(&e.a);
        let bmask = mask(&e.b);
        for t in &self.mterms {
            if t.mask & bmask != 0 {
                continue;
            }
            let bit = 1u8 << t.index;
            let present = e.s & bit != 0;
            let s = match self.ring {
                Ring::A if present => continue,
                Ring::A => e.s | bit,
                Ring::B if !present => continue,
                Ring::B => e.s & !bit,
            };
            let a = std::array::from_fn(|j| e.a[j] + t.m[j]);
            let c = if below(e.s, t.index) { t.coef.neg() } else { t.coef.clone() };
            out.push((ChiralBasisElement { a, b: e.b, s }, c));
        }
        for t in &self.nterms {
            if t.mask & amask != 0 {
                continue;
            }
            let b = std::array::from_fn(|j| e.b[j] + t.n[j]);
            for j in 0..DIM {
                if t.coefs[j].is_zero() {
                    continue;
                }
                let bit = 1u8 << j;
                let present = e.s & bit != 0;
                let s = match self.ring {
                    Ring::A if !present => continue,
                    Ring::A => e.s & !bit,
                    Ring::B if present => continue,
                    Ring::B => e.s | bit,
                };
                let c = if below(e.s, j) { t.coefs[j].neg() } else { t.coefs[j].clone() };
                out.push((ChiralBasisElement { a: e.a, b, s }, c));
            }
        }
    }
}

fn index_of(basis: &[ChiralBasisElement]) -> FxHashMap<u128, u32> {
    let mut idx = FxHashMap::default();
    idx.reserve(basis.len());
    for (i, e) in basis.iter().enumerate() {
        idx.insert(e.key(), i as u32);
    }
    idx
}

/// Columns of `d` restricted to `source`, expressed in the indices of
/// `target`. Panics if `d` leaves `target`; callers pass a full block, so
/// this asserts block preservation.
fn columns(d: &Differential, source: &[ChiralBasisElement], target: &[ChiralBasisElement]) -> Vec<SparseRow> {
    let idx = index_of(target);
    let mut buf = Vec::new();
    source
        .iter()
        .map(|e| {
            buf.clear();
            d.apply(e, &mut buf);
            let entries = buf
                .iter()
                .map(|(f, c)| {
                    let i = *idx.get(&f.key()).unwrap_or_else(|| {
                        panic!("d({e}) has the term {f} outside the target block")
                    });
                    (i, c.clone())
                })
                .collect();
            sparse_row(entries)
        })
        .collect()
}

/// The matrix of `d_t : C_t → C_{t+1}`, stored by columns.
#[derive(Debug, Clone)]
pub struct DiffMatrix {
    pub source: Vec<ChiralBasisElement>,
    pub target: Vec<ChiralBasisElement>,
    /// `columns[j]` lists the nonzero entries `(row, scale·value)`.
    pub columns: Vec<SparseRow>,
    pub scale: BigInt,
}

impl DiffMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.target.len(), self.source.len())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Entry as an exact rational (divides out the scale).
    pub fn entry(&self, row: usize, col: usize) -> BigRational {
        self.columns[col]
            .binary_search_by_key(&(row as u32), |e| e.0)
            .map(|p| BigRational::new(self.columns[col][p].1.to_big(), self.scale.clone()))
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn rank(&self) -> usize {
        rank(self.columns.clone(), self.target.len())
    }
}

/// The full (unblocked) matrix of `d_t`.
pub fn differential_matrix(t: u32, model: &Model, ring: Ring) -> Result<DiffMatrix, ModelError> {
    let d = Differential::new(model, ring)?;
    let source = all_elements(t);
    let target = all_elements(t + 1);
    let columns = columns(&d, &source, &target);
    Ok(DiffMatrix {
        source,
        target,
        columns,
        scale: d.scale.clone(),
    })
}

/// A nonzero entry of `d_{t+1} d_t`.
#[derive(Debug, Clone)]
pub struct SquareWitness {
    pub source: ChiralBasisElement,
    pub target: ChiralBasisElement,
    /// Scaled by `scale²`.
    pub value: Int,
}

/// Computes `d_{t+1}·d_t` entry by entry and returns the first nonzero
/// entry (smallest source, then smallest target), if any.
///
/// The lattice side of each path `e → f → h` depends only on the lattice
/// pair of `e`, so it is resolved once per pair and the 32 exterior states
/// are then run with bit operations, summing in `i128`. Models with
/// coefficients beyond `i64`, or sums that overflow, are redone by
/// [`d_squared_witness_exact`].
pub fn d_squared_witness(d: &Differential, t: u32) -> Option<SquareWitness> {
    match d.atoms() {
        Some(atoms) => match d_squared_fast(&atoms, t) {
            Ok(w) => w,
            Err(Overflow) => d_squared_witness_exact(d, t),
        },
        None => d_squared_witness_exact(d, t),
    }
}

/// Same result as [`d_squared_witness`], computed from [`Differential::apply`]
/// with arbitrary-precision sums. Also checks that every term of `d` is a
/// valid basis element of the right degree and block.
pub fn d_squared_witness_exact(d: &Differential, t: u32) -> Option<SquareWitness> {
    let ring = d.ring;
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut acc: Vec<(u128, ChiralBasisElement, Int)> = Vec::new();
    for e in all_elements(t) {
        first.clear();
        d.apply(&e, &mut first);
        acc.clear();
        for (f, c) in &first {
            assert!(f.is_valid() && f.t() == t + 1 && f.w(ring) == e.w(ring), "d({e}) ∋ {f}");
            second.clear();
            d.apply(f, &mut second);
            acc.extend(second.iter().map(|(h, c2)| (h.key(), *h, c.mul(c2))));
        }
        acc.sort_unstable_by_key(|x| x.0);
        for run in acc.chunk_by(|x, y| x.0 == y.0) {
            let sum = run.iter().fold(Int::ZERO, |s, x| s.add(&x.2));
            if !sum.is_zero() {
                return Some(SquareWitness {
                    source: e,
                    target: run[0].1,
                    value: sum,
                });
            }
        }
    }
    None
}

/// One summand of `d` acting on a single exterior generator: shift `a` (or
/// `b`) by `shift`, then insert or remove generator `bit`.
#[derive(Debug, Clone)]
struct Atom {
    on_a: bool,
    shift: [u8; DIM],
    mask: u8,
    bit: u8,
    insert: bool,
    coef: i64,
}

impl Atom {
    /// Lattice part: the new pair, or `None` if it hits the quotient.
    fn shift_pair(&self, a: &[u8; DIM], b: &[u8; DIM]) -> Option<([u8; DIM], [u8; DIM])> {
        let (am, bm) = (mask(a), mask(b));
        if self.on_a {
            (self.mask & bm == 0).then(|| (std::array::from_fn(|j| a[j] + self.shift[j]), *b))
        } else {
            (self.mask & am == 0).then(|| (*a, std::array::from_fn(|j| b[j] + self.shift[j])))
        }
    }

    /// Exterior part: new state and whether the sign flips.
    fn act(&self, s: u8) -> Option<(u8, bool)> {
        let bit = 1u8 << self.bit;
        let present = s & bit != 0;
        (present != self.insert).then(|| (s ^ bit, below(s, self.bit as usize)))
    }
}

struct Overflow;

fn pair_key(a: &[u8; DIM], b: &[u8; DIM]) -> u128 {
    ChiralBasisElement { a: *a, b: *b, s: 0 }.key()
}

fn d_squared_fast(atoms: &[Atom], t: u32) -> Result<Option<SquareWitness>, Overflow> {
    let mut pairs = lattice_pairs(t);
    pairs.sort_unstable_by_key(|(a, b)| pair_key(a, b));
    let mut paths: Vec<(usize, usize, usize)> = Vec::new();
    let mut groups: Vec<([u8; DIM], [u8; DIM])> = Vec::new();
    let mut group_of: FxHashMap<u128, usize> = FxHashMap::default();
    let mut acc: Vec<i128> = Vec::new();
    let mut touched: Vec<usize> = Vec::new();
    for (a, b) in &pairs {
        paths.clear();
        groups.clear();
        group_of.clear();
        for (i1, x) in atoms.iter().enumerate() {
            let Some((a1, b1)) = x.shift_pair(a, b) else { continue };
            for (i2, y) in atoms.iter().enumerate() {
                let Some((a2, b2)) = y.shift_pair(&a1, &b1) else { continue };
                let g = *group_of.entry(pair_key(&a2, &b2)).or_insert_with(|| {
                    groups.push((a2, b2));
                    groups.len() - 1
                });
                paths.push((i1, i2, g));
            }
        }
        acc.clear();
        acc.resize(groups.len() * 32, 0);
        for s in 0..32u8 {
            touched.clear();
            for &(i1, i2, g) in &paths {
                let (x, y) = (&atoms[i1], &atoms[i2]);
                let Some((s1, f1)) = x.act(s) else { continue };
                let Some((s2, f2)) = y.act(s1) else { continue };
                let prod = x.coef as i128 * y.coef as i128;
                let idx = g * 32 + s2 as usize;
                let v = &mut acc[idx];
                if *v == 0 {
                    touched.push(idx);
                }
                *v = if f1 != f2 { v.checked_sub(prod) } else { v.checked_add(prod) }.ok_or(Overflow)?;
            }
            let mut worst: Option<(u128, usize)> = None;
            for &idx in &touched {
                if acc[idx] != 0 {
                    let (a2, b2) = groups[idx / 32];
                    let key = pair_key(&a2, &b2) | (idx % 32) as u128;
                    if worst.map_or(true, |(k, _)| key < k) {
                        worst = Some((key, idx));
                    }
                }
            }
            if let Some((_, idx)) = worst {
                let (a2, b2) = groups[idx / 32];
                return Ok(Some(SquareWitness {
                    source: ChiralBasisElement { a: *a, b: *b, s },
                    target: ChiralBasisElement { a: a2, b: b2, s: (idx % 32) as u8 },
                    value: Int::from_big(BigInt::from(acc[idx])),
                }));
            }
            for &idx in &touched {
                acc[idx] = 0;
            }
        }
    }
    Ok(None)
}

/// Options for [`cohomology_dims`].
#[derive(Debug, Clone, Default)]
pub struct ComputeOptions {
    /// Worker threads; `None` or `Some(1)` runs on the calling thread.
    pub threads: Option<usize>,
}

/// `dim H^t_w` for `t < t_max`, with a per-block stabilization flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDimTable {
    pub ring: Ring,
    pub t_max: u32,
    pub dims: BTreeMap<(u32, i32), u64>,
    pub stabilized: BTreeMap<i32, bool>,
}

#[derive(Serialize, Deserialize)]
struct DimEntry {
    t: u32,
    w: i32,
    dim: u64,
}

#[derive(Serialize, Deserialize)]
struct TotalEntry {
    t: u32,
    dim: u64,
}

#[derive(Serialize, Deserialize)]
struct StableEntry {
    w: i32,
    stabilized: bool,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    ring: Ring,
    t_max: u32,
    dims: Vec<DimEntry>,
    totals: Vec<TotalEntry>,
    stabilized: Vec<StableEntry>,
}

impl GradedDimTable {
    /// Builds the table from block dimensions, filling the flags.
    pub fn from_dims(ring: Ring, t_max: u32, dims: BTreeMap<(u32, i32), u64>) -> Self {
        let mut stabilized = BTreeMap::new();
        for &(_, w) in dims.keys() {
            let zero_at = |t: u32| dims.get(&(t, w)).copied().unwrap_or(0) == 0;
            stabilized.insert(w, zero_at(t_max - 1) && zero_at(t_max - 2));
        }
        Self {
            ring,
            t_max,
            dims,
            stabilized,
        }
    }

    pub fn dim(&self, t: u32, w: i32) -> u64 {
        self.dims.get(&(t, w)).copied().unwrap_or(0)
    }

    pub fn totals(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for t in 0..self.t_max {
            out.insert(t, 0);
        }
        for (&(t, _), &d) in &self.dims {
            *out.entry(t).or_insert(0) += d;
        }
        out
    }

    pub fn to_json(&self) -> String {
        let j = TableJson {
            ring: self.ring,
            t_max: self.t_max,
            dims: self.dims.iter().map(|(&(t, w), &dim)| DimEntry { t, w, dim }).collect(),
            totals: self.totals().into_iter().map(|(t, dim)| TotalEntry { t, dim }).collect(),
            stabilized: self
                .stabilized
                .iter()
                .map(|(&w, &stabilized)| StableEntry { w, stabilized })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&j).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        let j: TableJson = serde_json::from_str(s)?;
        let dims = j.dims.into_iter().map(|e| ((e.t, e.w), e.dim)).collect();
        let stabilized = j.stabilized.into_iter().map(|e| (e.w, e.stabilized)).collect();
        Ok(Self {
            ring: j.ring,
            t_max: j.t_max,
            dims,
            stabilized,
        })
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("t\tw\tdim\n");
        for (&(t, w), &d) in &self.dims {
            s.push_str(&format!("{t}\t{w}\t{d}\n"));
        }
        s
    }
}

fn check_t_max(t_max: u32) -> Result<(), CohomologyError> {
    if t_max < 2 {
        return Err(CohomologyError::TMaxTooSmall(t_max));
    }
    if t_max > T_LIMIT {
        return Err(CohomologyError::TMaxTooLarge(t_max));
    }
    Ok(())
}

/// Cohomology dimensions computed block by block.
pub fn cohomology_dims(
    model: &Model,
    ring: Ring,
    t_max: u32,
    opts: &ComputeOptions,
) -> Result<GradedDimTable, CohomologyError> {
    check_t_max(t_max)?;
    let d = Differential::new(model, ring)?;
    let blocks: Vec<BTreeMap<i32, Vec<ChiralBasisElement>>> = (0..=t_max).map(|t| blocks_t(t, ring)).collect();

    // Ranks of d_t on block w, for t < t_max.
    let mut jobs: Vec<(u32, i32)> = Vec::new();
    for t in 0..t_max {
        for w in blocks[t as usize].keys() {
            if blocks[t as usize + 1].contains_key(w) {
                jobs.push((t, *w));
            }
        }
    }
    let run = |&(t, w): &(u32, i32)| -> ((u32, i32), u64) {
        let source = &blocks[t as usize][&w];
        let target = &blocks[t as usize + 1][&w];
        let cols = columns(&d, source, target);
        ((t, w), rank(cols, target.len()) as u64)
    };
    let ranks: BTreeMap<(u32, i32), u64> = match opts.threads {
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CohomologyError::Threads(e.to_string()))?;
            // Largest blocks first for better balance; the result is keyed.
            jobs.sort_by_key(|&(t, w)| std::cmp::Reverse(blocks[t as usize][&w].len()));
            pool.install(|| jobs.par_iter().map(run).collect())
        }
        _ => jobs.iter().map(run).collect(),
    };

    let mut dims = BTreeMap::new();
    for t in 0..t_max {
        for (w, basis) in &blocks[t as usize] {
            let r_out = ranks.get(&(t, *w)).copied().unwrap_or(0);
            let r_in = if t == 0 {
                0
            } else {
                ranks.get(&(t - 1, *w)).copied().unwrap_or(0)
            };
            dims.insert((t, *w), basis.len() as u64 - r_out - r_in);
        }
    }
    Ok(GradedDimTable::from_dims(ring, t_max, dims))
}

/// Total dimensions `dim H^t` for `t < t_max` from the unblocked matrices.
pub fn unblocked_totals(model: &Model, ring: Ring, t_max: u32) -> Result<Vec<u64>, CohomologyError> {
    check_t_max(t_max)?;
    let mut ranks = Vec::new();
    let mut sizes = Vec::new();
    for t in 0..t_max {
        let m = differential_matrix(t, model, ring)?;
        sizes.push(m.source.len() as u64);
        ranks.push(m.rank() as u64);
    }
    Ok((0..t_max as usize)
        .map(|t| sizes[t] - ranks[t] - if t == 0 { 0 } else { ranks[t - 1] })
        .collect())
}

/// The model with every coefficient of `F` and `g` set to zero.
pub fn zero_model() -> Model {
    Model::new(crate::model::FivePolys::zero(), crate::model::GParams::zero())
}
