//! The quintic's dual lattice pair.
//!
//! `M = {a ∈ Z^5 : Σ a_i ≡ 0 mod 5}` carries the degree-5 monomials, and
//! `N = Z^5 + Z·(1/5,…,1/5)` is its dual under the ordinary dot product.
//! Elements of `N` are stored as integer numerators over a fixed
//! denominator of 5 so that every lattice computation stays in `i64`.
//!
//! `K ⊂ M` and `K^∨ ⊂ N` are the nonnegative orthants; `Δ` and `Δ^∨` are their
//! degree-one slices. The fan `Σ` only enters through [`same_cone`].

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rank of the lattices.
pub const DIM: usize = 5;

/// Denominator used for `N` numerators.
pub const N_DENOM: i64 = 5;

/// Exact small rational used for lattice pairings.
pub type Q64 = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("{0:?} is not in M: coordinate sum must be divisible by 5")]
    NotInM([i64; DIM]),
    #[error("numerators {0:?} do not define a point of N: they must agree mod 5")]
    NotInN([i64; DIM]),
    #[error("{0} lies outside the dual cone K^∨")]
    OutsideDualCone(NPoint),
}

/// A point of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; DIM]", into = "[i64; DIM]")]
pub struct MPoint([i64; DIM]);

impl MPoint {
    pub fn new(coords: [i64; DIM]) -> Result<Self, LatticeError> {
        if coords.iter().sum::<i64>().rem_euclid(N_DENOM) != 0 {
            return Err(LatticeError::NotInM(coords));
        }
        Ok(Self(coords))
    }

    pub const fn zero() -> Self {
        Self([0; DIM])
    }

    /// `scale · e_i`; only multiples of 5 land in `M`.
    pub fn axis(i: usize, scale: i64) -> Result<Self, LatticeError> {
        let mut c = [0; DIM];
        c[i] = scale;
        Self::new(c)
    }

    pub fn coords(&self) -> &[i64; DIM] {
        &self.0
    }

    pub fn is_in_k(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Pairing with `deg^∨`, i.e. the grading of `K`.
    pub fn degree(&self) -> i64 {
        self.0.iter().sum::<i64>() / N_DENOM
    }

    pub fn to_q(&self) -> MQPoint {
        MQPoint(self.0.map(Q64::from_integer))
    }
}

impl TryFrom<[i64; DIM]> for MPoint {
    type Error = LatticeError;
    fn try_from(c: [i64; DIM]) -> Result<Self, Self::Error> {
        Self::new(c)
    }
}

impl From<MPoint> for [i64; DIM] {
    fn from(p: MPoint) -> Self {
        p.0
    }
}

impl std::ops::Add for MPoint {
    type Output = MPoint;
    fn add(self, rhs: Self) -> Self {
        MPoint(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl std::ops::Sub for MPoint {
    type Output = MPoint;
    fn sub(self, rhs: Self) -> Self {
        MPoint(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl fmt::Display for MPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.0;
        write!(f, "({},{},{},{},{})", c[0], c[1], c[2], c[3], c[4])
    }
}

/// A point of `N`, stored as five numerators over 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NPoint([i64; DIM]);

impl NPoint {
    pub fn from_numerators(nums: [i64; DIM]) -> Result<Self, LatticeError> {
        let r = nums[0].rem_euclid(N_DENOM);
        if nums.iter().any(|&x| x.rem_euclid(N_DENOM) != r) {
            return Err(LatticeError::NotInN(nums));
        }
        Ok(Self(nums))
    }

    /// Integral point `coords ∈ Z^5 ⊂ N`.
    pub fn from_integers(coords: [i64; DIM]) -> Self {
        Self(coords.map(|c| c * N_DENOM))
    }

    pub fn from_rationals(coords: [Q64; DIM]) -> Result<Self, LatticeError> {
        let mut nums = [0; DIM];
        for (slot, q) in nums.iter_mut().zip(coords.iter()) {
            let scaled = *q * Q64::from_integer(N_DENOM);
            if !scaled.is_integer() {
                return Err(LatticeError::NotInN(coords.map(|q| q.to_integer())));
            }
            *slot = scaled.to_integer();
        }
        Self::from_numerators(nums)
    }

    pub const fn zero() -> Self {
        Self([0; DIM])
    }

    /// The vertex `v_i = e_i` of `Δ^∨`.
    pub fn vertex(i: usize) -> Self {
        let mut c = [0; DIM];
        c[i] = 1;
        Self::from_integers(c)
    }

    pub fn numerators(&self) -> &[i64; DIM] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> Q64 {
        Q64::new(self.0[i], N_DENOM)
    }

    pub fn coords(&self) -> [Q64; DIM] {
        std::array::from_fn(|i| self.coord(i))
    }

    pub fn is_in_kdual(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Pairing with `deg`, i.e. the grading of `K^∨`.
    pub fn degree(&self) -> i64 {
        self.0.iter().sum::<i64>() / N_DENOM
    }

    /// Indices where the coordinates attain their minimum.
    pub fn argmin(&self) -> u8 {
        let min = *self.0.iter().min().expect("nonempty");
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == min)
            .fold(0u8, |acc, (i, _)| acc | (1 << i))
    }
}

impl std::ops::Add for NPoint {
    type Output = NPoint;
    fn add(self, rhs: Self) -> Self {
        NPoint(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl fmt::Display for NPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|q| q.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for NPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.coords().iter().map(|q| q.to_string()).collect();
        parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        if parts.len() != DIM {
            return Err(serde::de::Error::custom(format!(
                "expected {DIM} coordinates, found {}",
                parts.len()
            )));
        }
        let mut coords = [Q64::from_integer(0); DIM];
        for (slot, p) in coords.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse::<Q64>()
                .map_err(|e| serde::de::Error::custom(format!("bad rational {p:?}: {e}")))?;
        }
        NPoint::from_rationals(coords).map_err(serde::de::Error::custom)
    }
}

/// A point of `M_Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MQPoint([Q64; DIM]);

impl MQPoint {
    pub fn new(coords: [Q64; DIM]) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[Q64; DIM] {
        &self.0
    }
}

impl fmt::Display for MQPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Anything that pairs with `N`.
pub trait PairsWithN {
    fn pair(&self, n: &NPoint) -> Q64;
}

impl PairsWithN for MPoint {
    fn pair(&self, n: &NPoint) -> Q64 {
        let s: i64 = self.0.iter().zip(n.0.iter()).map(|(a, b)| a * b).sum();
        Q64::new(s, N_DENOM)
    }
}

impl PairsWithN for MQPoint {
    fn pair(&self, n: &NPoint) -> Q64 {
        self.0
            .iter()
            .zip(n.coords().iter())
            .fold(Q64::from_integer(0), |acc, (a, b)| acc + a * b)
    }
}

/// `Σ m_i n_i`.
pub fn pairing<M: PairsWithN>(m: &M, n: &NPoint) -> Q64 {
    m.pair(n)
}

/// Integer pairing `M × N → Z`.
pub fn pair_int(m: &MPoint, n: &NPoint) -> i64 {
    let s: i64 = m.0.iter().zip(n.0.iter()).map(|(a, b)| a * b).sum();
    debug_assert_eq!(s % N_DENOM, 0);
    s / N_DENOM
}

/// The fixed lattice data of the quintic.
#[derive(Debug, Clone)]
pub struct LatticeEnv {
    pub deg: MPoint,
    pub degv: NPoint,
    pub vertices: [NPoint; DIM],
    pub dual_basis: [MQPoint; DIM],
}

impl LatticeEnv {
    pub fn quintic() -> Self {
        let deg = MPoint([1; DIM]);
        let degv = NPoint([1; DIM]);
        let vertices = std::array::from_fn(NPoint::vertex);
        let dual_basis = std::array::from_fn(|i| {
            let mut c = [Q64::from_integer(0); DIM];
            c[i] = Q64::from_integer(1);
            MQPoint(c)
        });
        Self {
            deg,
            degv,
            vertices,
            dual_basis,
        }
    }

    /// The six lattice points of `Δ^∨`: the five vertices then `deg^∨`.
    pub fn delta_dual_points(&self) -> [NPoint; DIM + 1] {
        let mut out = [self.degv; DIM + 1];
        out[..DIM].copy_from_slice(&self.vertices);
        out
    }

    /// Coordinates of `n` in the basis `v_0, …, v_4`, i.e. `m_i · n`.
    pub fn vertex_expansion(&self, n: &NPoint) -> [Q64; DIM] {
        std::array::from_fn(|i| self.dual_basis[i].pair(n))
    }

    /// Coordinates of `m` in the basis `m_0, …, m_4`, i.e. `m · v_i`.
    pub fn dual_expansion(&self, m: &MPoint) -> [i64; DIM] {
        std::array::from_fn(|i| pair_int(m, &self.vertices[i]))
    }
}

fn compositions(total: i64, parts: usize, step: i64, offset: i64, out: &mut Vec<[i64; DIM]>) {
    // Vectors (offset + step·c_0, …) with Σ c_j = total, in lexicographic order.
    fn rec(
        idx: usize,
        remaining: i64,
        parts: usize,
        step: i64,
        offset: i64,
        cur: &mut [i64; DIM],
        out: &mut Vec<[i64; DIM]>,
    ) {
        if idx + 1 == parts {
            cur[idx] = offset + step * remaining;
            out.push(*cur);
            return;
        }
        for c in 0..=remaining {
            cur[idx] = offset + step * c;
            rec(idx + 1, remaining - c, parts, step, offset, cur, out);
        }
    }
    let mut cur = [0; DIM];
    rec(0, total, parts, step, offset, &mut cur, out);
}

/// Lattice points of `kΔ`: `a ∈ K` with `a · deg^∨ = k`, lexicographic.
pub fn enum_graded_k(k: u32) -> Vec<MPoint> {
    let mut out = Vec::new();
    compositions(5 * k as i64, DIM, 1, 0, &mut out);
    out.into_iter().map(MPoint).collect()
}

/// Lattice points of `lΔ^∨`: `b ∈ K^∨` with `deg · b = l`, lexicographic in
/// the numerators.
pub fn enum_graded_kdual(l: u32) -> Vec<NPoint> {
    let l = l as i64;
    let mut out = Vec::new();
    // numerators r + 5c_j with common residue r; Σ = 5r + 5Σc = 5l.
    for r in 0..N_DENOM.min(l + 1) {
        compositions(l - r, DIM, N_DENOM, r, &mut out);
    }
    out.sort();
    out.into_iter().map(NPoint).collect()
}

/// Whether two points of `K^∨` lie in a common maximal cone of `Σ`.
///
/// The maximal cone `σ_i` is spanned by `±deg^∨` and the vertices `v_j`,
/// `j ≠ i`. Writing `n = λ·deg^∨ + Σ_{j≠i} μ_j v_j` forces `λ = 5 n_i` and
/// `μ_j = n_j − n_i`, so `n ∈ σ_i` exactly when `n_i` is a minimal coordinate.
/// Two points therefore share a cone iff their argmin sets meet.
pub fn same_cone(n1: &NPoint, n2: &NPoint) -> Result<bool, LatticeError> {
    for n in [n1, n2] {
        if !n.is_in_kdual() {
            return Err(LatticeError::OutsideDualCone(*n));
        }
    }
    Ok(n1.argmin() & n2.argmin() != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn pairing_examples() {
        let env = LatticeEnv::quintic();
        assert_eq!(pairing(&env.deg, &env.degv), Q64::from_integer(1));
        let m = MPoint::axis(0, 5).unwrap();
        assert_eq!(pairing(&m, &env.vertices[0]), Q64::from_integer(5));
        assert_eq!(pairing(&env.dual_basis[0], &env.vertices[1]), Q64::from_integer(0));
    }

    #[test]
    fn graded_counts() {
        assert_eq!(enum_graded_k(0), vec![MPoint::zero()]);
        for k in 0..=4u32 {
            assert_eq!(enum_graded_k(k).len() as u64, binom(5 * k as u64 + 4, 4));
        }
        assert_eq!(enum_graded_kdual(0).len(), 1);
        assert_eq!(enum_graded_kdual(1).len(), 6);
        assert_eq!(enum_graded_kdual(2).len(), 21);
        assert_eq!(enum_graded_kdual(3).len(), 56);
    }

    #[test]
    fn enumeration_is_sorted_and_graded() {
        let pts = enum_graded_k(2);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(pts.iter().all(|p| p.is_in_k() && p.degree() == 2));
        let pts = enum_graded_kdual(2);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(pts.iter().all(|p| p.is_in_kdual() && p.degree() == 2));
    }

    #[test]
    fn delta_dual_is_vertices_and_degv() {
        let env = LatticeEnv::quintic();
        let mut expected: Vec<NPoint> = env.delta_dual_points().to_vec();
        expected.sort();
        assert_eq!(enum_graded_kdual(1), expected);
    }

    #[test]
    fn membership_validators() {
        assert!(MPoint::new([1, 0, 0, 0, 0]).is_err());
        assert!(MPoint::new([4, 1, 0, 0, 0]).is_ok());
        assert!(NPoint::from_numerators([1, 1, 1, 1, 2]).is_err());
        assert!(NPoint::from_numerators([1, 1, 1, 1, 6]).is_ok());
    }

    #[test]
    fn duality_table() {
        let env = LatticeEnv::quintic();
        for i in 0..DIM {
            for j in 0..DIM {
                let expect = if i == j { 1 } else { 0 };
                assert_eq!(pairing(&env.dual_basis[i], &env.vertices[j]), Q64::from_integer(expect));
            }
            assert_eq!(pair_int(&env.deg, &env.vertices[i]), 1);
        }
        assert_eq!(env.degv.degree(), 1);
    }

    #[test]
    fn same_cone_examples() {
        let env = LatticeEnv::quintic();
        let v = env.vertices;
        assert!(same_cone(&env.degv, &v[0]).unwrap());
        assert!(same_cone(&v[0], &v[1]).unwrap());
        let far = NPoint::from_integers([0, 1, 1, 1, 1]);
        assert!(!same_cone(&v[0], &far).unwrap());
        let neg = NPoint::from_integers([-1, 0, 0, 0, 0]);
        assert!(same_cone(&neg, &v[0]).is_err());
    }

    #[test]
    fn npoint_serde_uses_rational_strings() {
        let n = NPoint::from_numerators([1, 1, 1, 1, 6]).unwrap();
        let s = serde_json::to_string(&n).unwrap();
        assert_eq!(s, r#"["1/5","1/5","1/5","1/5","6/5"]"#);
        let back: NPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, n);
        assert!(serde_json::from_str::<NPoint>(r#"["1/5","0","0","0","0"]"#).is_err());
    }
}
