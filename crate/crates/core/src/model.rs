//! Input data for a (0,2) quintic model.
//!
//! The canonical internal form is [`FivePolys`]: five degree-5 polynomials
//! `F^i` with `F^i|_{x_i = 0} = 0`. Witten-style data `(G, G^i)` and
//! logarithmic derivatives of a potential `f` are converted into it.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeEnv, MPoint, NPoint, DIM};
use crate::poly::{format_rational, parse_rational, rat, Exps, Poly};

pub const MODEL_FORMAT: &str = "chiralkit-model-v1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{what}: expected degree {expected}, found term {exps:?}")]
    WrongDegree {
        what: String,
        expected: u32,
        exps: Exps,
    },
    #[error("F^{index} has the monomial {exps:?} which does not vanish on x_{index} = 0")]
    NotDivisible { index: usize, exps: Exps },
    #[error("Σ x_i G^i ≠ 0: monomial {exps:?} has coefficient {coef}")]
    WittenConstraint { exps: Exps, coef: String },
    #[error("g-parameters must be keyed by the six points of Δ^∨: {0}")]
    GKeys(String),
    #[error("invalid model file at `{path}`: {message}")]
    File { path: String, message: String },
}

/// The five polynomials `F^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FivePolys {
    polys: [Poly; DIM],
}

impl FivePolys {
    /// Validated constructor.
    pub fn new(polys: [Poly; DIM]) -> Result<Self, ModelError> {
        let out = Self { polys };
        out.validate()?;
        Ok(out)
    }

    /// Skips the divisibility check; degree is still required to be 5.
    /// Used to feed deliberately broken data to the differential checker.
    pub fn new_unchecked(polys: [Poly; DIM]) -> Self {
        assert!(polys.iter().all(|p| p.degree() == 5));
        Self { polys }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (i, p) in self.polys.iter().enumerate() {
            if p.degree() != 5 {
                return Err(ModelError::WrongDegree {
                    what: format!("F^{i}"),
                    expected: 5,
                    exps: p.terms().next().map(|(e, _)| *e).unwrap_or([0; DIM]),
                });
            }
            if let Some((e, _)) = p.terms().find(|(e, _)| e[i] == 0) {
                return Err(ModelError::NotDivisible { index: i, exps: *e });
            }
        }
        Ok(())
    }

    pub fn get(&self, i: usize) -> &Poly {
        &self.polys[i]
    }

    pub fn polys(&self) -> &[Poly; DIM] {
        &self.polys
    }

    pub fn zero() -> Self {
        Self {
            polys: std::array::from_fn(|_| Poly::zero(5)),
        }
    }

    /// `F^i = x_i ∂_i f`.
    pub fn from_potential(f: &Poly) -> Result<Self, ModelError> {
        check_degree("f", f, 5)?;
        Ok(Self {
            polys: std::array::from_fn(|i| f.partial(i).mul_var(i)),
        })
    }

    /// Witten data with the `G^i` supplied pre-multiplied as `x_i G^i`.
    /// Returns `F^i = x_i ∂_i G + x_i G^i`.
    pub fn from_witten(g: &Poly, x_gi: &[Poly; DIM]) -> Result<Self, ModelError> {
        check_degree("G", g, 5)?;
        let mut sum = Poly::zero(5);
        for (i, p) in x_gi.iter().enumerate() {
            check_degree(&format!("x_{i} G^{i}"), p, 5)?;
            if let Some((e, _)) = p.terms().find(|(e, _)| e[i] == 0) {
                return Err(ModelError::NotDivisible { index: i, exps: *e });
            }
            sum = sum.add(p);
        }
        if let Some((e, c)) = sum.terms().next() {
            return Err(ModelError::WittenConstraint {
                exps: *e,
                coef: format_rational(c),
            });
        }
        Self::new(std::array::from_fn(|i| g.partial(i).mul_var(i).add(&x_gi[i])))
    }

    /// Witten data with raw degree-4 `G^i`.
    pub fn from_witten_raw(g: &Poly, gi: &[Poly; DIM]) -> Result<Self, ModelError> {
        for (i, p) in gi.iter().enumerate() {
            check_degree(&format!("G^{i}"), p, 4)?;
        }
        Self::from_witten(g, &std::array::from_fn(|i| gi[i].mul_var(i)))
    }

    /// `G = (1/5) Σ F^i`.
    pub fn recover_g(&self) -> Poly {
        let mut sum = Poly::zero(5);
        for p in &self.polys {
            sum = sum.add(p);
        }
        sum.scale(&BigRational::new(1.into(), 5.into()))
    }

    /// The degree-4 polynomials `R^i = F^i / x_i`.
    pub fn r_polys(&self) -> Result<[Poly; DIM], ModelError> {
        let mut out: [Poly; DIM] = std::array::from_fn(|_| Poly::zero(4));
        for (i, p) in self.polys.iter().enumerate() {
            out[i] = p.div_var(i).ok_or_else(|| ModelError::NotDivisible {
                index: i,
                exps: p.terms().find(|(e, _)| e[i] == 0).map(|(e, _)| *e).unwrap_or([0; DIM]),
            })?;
        }
        Ok(out)
    }

    /// Total number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.polys.iter().map(Poly::len).sum()
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denominator_lcm(&self) -> num_bigint::BigInt {
        let mut l = num_bigint::BigInt::one();
        for p in &self.polys {
            for (_, c) in p.terms() {
                l = num_integer::Integer::lcm(&l, c.denom());
            }
        }
        l
    }
}

fn check_degree(what: &str, p: &Poly, expected: u32) -> Result<(), ModelError> {
    if p.degree() != expected {
        return Err(ModelError::WrongDegree {
            what: what.to_string(),
            expected,
            exps: p.terms().next().map(|(e, _)| *e).unwrap_or([0; DIM]),
        });
    }
    Ok(())
}

/// The coefficients `g_n`, one per point of `Δ^∨`.
#[derive(Debug, Clone, PartialEq)]
pub struct GParams {
    values: BTreeMap<NPoint, BigRational>,
}

impl GParams {
    pub fn new(values: BTreeMap<NPoint, BigRational>) -> Result<Self, ModelError> {
        let env = LatticeEnv::quintic();
        let mut expected: Vec<NPoint> = env.delta_dual_points().to_vec();
        expected.sort();
        let keys: Vec<NPoint> = values.keys().copied().collect();
        if keys != expected {
            return Err(ModelError::GKeys(format!(
                "got {}",
                keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(Self { values })
    }

    pub fn uniform(c: BigRational) -> Self {
        let env = LatticeEnv::quintic();
        Self {
            values: env.delta_dual_points().iter().map(|n| (*n, c.clone())).collect(),
        }
    }

    /// Values for `v_0, …, v_4, deg^∨`.
    pub fn from_list(vals: [BigRational; DIM + 1]) -> Self {
        let env = LatticeEnv::quintic();
        Self {
            values: env.delta_dual_points().into_iter().zip(vals).collect(),
        }
    }

    pub fn zero() -> Self {
        Self::uniform(BigRational::zero())
    }

    pub fn get(&self, n: &NPoint) -> &BigRational {
        &self.values[n]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NPoint, &BigRational)> {
        self.values.iter()
    }

    /// `g_n ↦ c^{r(n)} g_n` for the linear function `r = ⟨r_m, ·⟩`, `r_m ∈ M`.
    pub fn rescaled(&self, r: &MPoint, c: &BigRational) -> Self {
        let values = self
            .values
            .iter()
            .map(|(n, g)| {
                let e = crate::lattice::pair_int(r, n);
                let factor = if e >= 0 {
                    num_traits::pow(c.clone(), e as usize)
                } else {
                    num_traits::pow(c.recip(), (-e) as usize)
                };
                (*n, g * factor)
            })
            .collect();
        Self { values }
    }

    pub fn denominator_lcm(&self) -> num_bigint::BigInt {
        self.values
            .values()
            .fold(num_bigint::BigInt::one(), |l, c| num_integer::Integer::lcm(&l, c.denom()))
    }
}

/// One summand of the differential field.
#[derive(Debug, Clone, PartialEq)]
pub enum DifferentialTerm {
    /// `F^i_m · m_i^{ferm} e^{∫m^{bos}}`, `m ∈ Δ`.
    M {
        index: usize,
        momentum: MPoint,
        coef: BigRational,
    },
    /// `g_n · n^{ferm} e^{∫n^{bos}}`, `n ∈ Δ^∨`.
    N { momentum: NPoint, coef: BigRational },
}

/// A complete model: the `F^i` and the `g_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub f: FivePolys,
    pub g: GParams,
}

impl Model {
    pub fn new(f: FivePolys, g: GParams) -> Self {
        Self { f, g }
    }

    /// Fermat quintic: `F^i = 5 x_i^5`, all `g_n = 1`.
    pub fn fermat() -> Self {
        Self {
            f: fermat_polys(),
            g: GParams::uniform(BigRational::one()),
        }
    }

    pub fn differential_terms(&self) -> Vec<DifferentialTerm> {
        differential_terms(&self.f, &self.g)
    }
}

pub fn fermat_polys() -> FivePolys {
    FivePolys::new(std::array::from_fn(|i| {
        let mut e = [0; DIM];
        e[i] = 5;
        Poly::monomial(e, rat(5))
    }))
    .expect("Fermat data is valid")
}

/// Term list of the differential: M-terms in `(i, m)` order, then N-terms.
pub fn differential_terms(f: &FivePolys, g: &GParams) -> Vec<DifferentialTerm> {
    let mut out = Vec::new();
    for (i, p) in f.polys().iter().enumerate() {
        for (m, c) in p.support_points() {
            out.push(DifferentialTerm::M {
                index: i,
                momentum: m,
                coef: c.clone(),
            });
        }
    }
    for (n, c) in g.iter() {
        if !c.is_zero() {
            out.push(DifferentialTerm::N {
                momentum: *n,
                coef: c.clone(),
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// JSON model files

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Exps,
    pub coef: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub presentation: String,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f_polys: Option<Vec<Vec<TermJson>>>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g_poly: Option<Vec<TermJson>>,
    #[serde(rename = "xG", default, skip_serializing_if = "Option::is_none")]
    pub x_gi: Option<Vec<Vec<TermJson>>>,
    #[serde(rename = "Gi", default, skip_serializing_if = "Option::is_none")]
    pub gi_raw: Option<Vec<Vec<TermJson>>>,
    #[serde(rename = "f", default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<TermJson>>,
    pub g: BTreeMap<String, String>,
}

const G_KEYS: [&str; DIM + 1] = ["v0", "v1", "v2", "v3", "v4", "degv"];

fn file_err(path: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError::File {
        path: path.into(),
        message: message.into(),
    }
}

fn poly_from_json(path: &str, degree: u32, terms: &[TermJson]) -> Result<Poly, ModelError> {
    let mut p = Poly::zero(degree);
    for (k, t) in terms.iter().enumerate() {
        let coef = parse_rational(&t.coef)
            .ok_or_else(|| file_err(format!("{path}[{k}].coef"), format!("not a rational: {:?}", t.coef)))?;
        if t.exps.iter().sum::<u32>() != degree {
            return Err(file_err(
                format!("{path}[{k}].exps"),
                format!("exponents {:?} do not sum to {degree}", t.exps),
            ));
        }
        p.add_term(t.exps, coef);
    }
    Ok(p)
}

fn polys_from_json(path: &str, degree: u32, list: &[Vec<TermJson>]) -> Result<[Poly; DIM], ModelError> {
    if list.len() != DIM {
        return Err(file_err(path, format!("expected {DIM} polynomials, found {}", list.len())));
    }
    let mut out: [Poly; DIM] = std::array::from_fn(|_| Poly::zero(degree));
    for (i, terms) in list.iter().enumerate() {
        out[i] = poly_from_json(&format!("{path}[{i}]"), degree, terms)?;
    }
    Ok(out)
}

fn poly_to_json(p: &Poly) -> Vec<TermJson> {
    p.terms()
        .map(|(e, c)| TermJson {
            exps: *e,
            coef: format_rational(c),
        })
        .collect()
}

impl ModelFile {
    /// Parses JSON, reporting the offending key path on failure.
    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let de = &mut serde_json::Deserializer::from_str(s);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            file_err(path, e.into_inner().to_string())
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Encodes a model in the `F` presentation.
    pub fn from_model(model: &Model) -> Self {
        let env = LatticeEnv::quintic();
        let points = env.delta_dual_points();
        let gmap = G_KEYS
            .iter()
            .zip(points.iter())
            .map(|(k, n)| (k.to_string(), format_rational(model.g.get(n))))
            .collect();
        Self {
            format: MODEL_FORMAT.to_string(),
            presentation: "F".to_string(),
            f_polys: Some(model.f.polys().iter().map(poly_to_json).collect()),
            g_poly: None,
            x_gi: None,
            gi_raw: None,
            potential: None,
            g: gmap,
        }
    }

    fn parse_g(&self) -> Result<GParams, ModelError> {
        let env = LatticeEnv::quintic();
        for k in self.g.keys() {
            if !G_KEYS.contains(&k.as_str()) {
                return Err(file_err(format!("g.{k}"), "unknown key; expected v0..v4 or degv"));
            }
        }
        let mut values = BTreeMap::new();
        for (k, n) in G_KEYS.iter().zip(env.delta_dual_points()) {
            let s = self
                .g
                .get(*k)
                .ok_or_else(|| file_err(format!("g.{k}"), "missing"))?;
            let v = parse_rational(s).ok_or_else(|| file_err(format!("g.{k}"), format!("not a rational: {s:?}")))?;
            values.insert(n, v);
        }
        GParams::new(values)
    }

    fn required<'a, T>(&self, field: &'a Option<T>, key: &str) -> Result<&'a T, ModelError> {
        field
            .as_ref()
            .ok_or_else(|| file_err(key, format!("required for presentation {:?}", self.presentation)))
    }

    fn parse_polys(&self) -> Result<(FivePolys, bool), ModelError> {
        // Returns the polynomials and whether they are already validated.
        match self.presentation.as_str() {
            "F" => {
                let list = self.required(&self.f_polys, "F")?;
                let polys = polys_from_json("F", 5, list)?;
                Ok((FivePolys::new_unchecked(polys), false))
            }
            "witten" => {
                let g = poly_from_json("G", 5, self.required(&self.g_poly, "G")?)?;
                let f = match (&self.x_gi, &self.gi_raw) {
                    (Some(x), None) => FivePolys::from_witten(&g, &polys_from_json("xG", 5, x)?),
                    (None, Some(raw)) => FivePolys::from_witten_raw(&g, &polys_from_json("Gi", 4, raw)?),
                    (Some(_), Some(_)) => Err(file_err("Gi", "give either xG or Gi, not both")),
                    (None, None) => Err(file_err("xG", "required for presentation \"witten\"")),
                }?;
                Ok((f, true))
            }
            "potential" => {
                let f = poly_from_json("f", 5, self.required(&self.potential, "f")?)?;
                Ok((FivePolys::from_potential(&f)?, true))
            }
            other => Err(file_err("presentation", format!("unknown presentation {other:?}"))),
        }
    }

    fn check_format(&self) -> Result<(), ModelError> {
        if self.format != MODEL_FORMAT {
            return Err(file_err("format", format!("expected {MODEL_FORMAT:?}, found {:?}", self.format)));
        }
        Ok(())
    }

    /// Fully validated model.
    pub fn into_model(self) -> Result<Model, ModelError> {
        self.check_format()?;
        let (f, validated) = self.parse_polys()?;
        if !validated {
            f.validate()?;
        }
        Ok(Model::new(f, self.parse_g()?))
    }

    /// Model whose `F^i` skip the divisibility check.
    pub fn into_model_unchecked(self) -> Result<Model, ModelError> {
        self.check_format()?;
        let (f, _) = self.parse_polys()?;
        Ok(Model::new(f, self.parse_g()?))
    }
}

impl Model {
    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        ModelFile::from_json_str(s)?.into_model()
    }

    pub fn to_json_string(&self) -> String {
        ModelFile::from_model(self).to_json_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: Exps, c: i64) -> Poly {
        Poly::monomial(e, rat(c))
    }

    #[test]
    fn fermat_potential() {
        let mut f = Poly::zero(5);
        for i in 0..DIM {
            let mut e = [0; DIM];
            e[i] = 5;
            f.add_term(e, rat(1));
        }
        let fp = FivePolys::from_potential(&f).unwrap();
        for i in 0..DIM {
            let mut e = [0; DIM];
            e[i] = 5;
            assert_eq!(fp.get(i), &mono(e, 5));
        }
        assert_eq!(fp.recover_g(), f);
    }

    #[test]
    fn single_monomial_potential() {
        let f = mono([4, 1, 0, 0, 0], 1);
        let fp = FivePolys::from_potential(&f).unwrap();
        assert_eq!(fp.get(0), &mono([4, 1, 0, 0, 0], 4));
        assert_eq!(fp.get(1), &mono([4, 1, 0, 0, 0], 1));
        for i in 2..DIM {
            assert!(fp.get(i).is_zero());
        }
    }

    #[test]
    fn potential_rejects_wrong_degree() {
        assert!(matches!(
            FivePolys::from_potential(&mono([1, 1, 1, 1, 0], 1)),
            Err(ModelError::WrongDegree { .. })
        ));
    }

    #[test]
    fn witten_examples() {
        let mut fermat = Poly::zero(5);
        for i in 0..DIM {
            let mut e = [0; DIM];
            e[i] = 5;
            fermat.add_term(e, rat(1));
        }
        let zeros: [Poly; DIM] = std::array::from_fn(|_| Poly::zero(4));
        let fp = FivePolys::from_witten_raw(&fermat, &zeros).unwrap();
        assert_eq!(fp, fermat_polys());

        let mut gi: [Poly; DIM] = std::array::from_fn(|_| Poly::zero(4));
        gi[0] = mono([0, 4, 0, 0, 0], 1);
        gi[1] = mono([1, 3, 0, 0, 0], -1);
        let fp = FivePolys::from_witten_raw(&Poly::zero(5), &gi).unwrap();
        assert_eq!(fp.get(0), &mono([1, 4, 0, 0, 0], 1));
        assert_eq!(fp.get(1), &mono([1, 4, 0, 0, 0], -1));
        assert!(fp.recover_g().is_zero());

        let mut bad: [Poly; DIM] = std::array::from_fn(|_| Poly::zero(4));
        bad[0] = mono([0, 4, 0, 0, 0], 1);
        match FivePolys::from_witten_raw(&Poly::zero(5), &bad) {
            Err(ModelError::WittenConstraint { exps, .. }) => assert_eq!(exps, [1, 4, 0, 0, 0]),
            other => panic!("expected constraint violation, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_missing_factor() {
        let mut polys: [Poly; DIM] = fermat_polys().polys().clone();
        polys[0].add_term([0, 5, 0, 0, 0], rat(1));
        assert!(matches!(
            FivePolys::new(polys),
            Err(ModelError::NotDivisible { index: 0, .. })
        ));
    }

    #[test]
    fn differential_term_counts() {
        let m = Model::fermat();
        let terms = m.differential_terms();
        assert_eq!(terms.iter().filter(|t| matches!(t, DifferentialTerm::M { .. })).count(), 5);
        assert_eq!(terms.iter().filter(|t| matches!(t, DifferentialTerm::N { .. })).count(), 6);

        let env = LatticeEnv::quintic();
        let mut vals: [BigRational; DIM + 1] = std::array::from_fn(|_| rat(1));
        vals[DIM] = rat(0);
        let g = GParams::from_list(vals);
        let terms = differential_terms(&m.f, &g);
        let n_terms: Vec<_> = terms
            .iter()
            .filter_map(|t| match t {
                DifferentialTerm::N { momentum, .. } => Some(*momentum),
                _ => None,
            })
            .collect();
        assert_eq!(n_terms.len(), 5);
        assert!(!n_terms.contains(&env.degv));
    }

    #[test]
    fn model_file_round_trip_and_errors() {
        let m = Model::fermat();
        let s = m.to_json_string();
        assert_eq!(Model::from_json_str(&s).unwrap(), m);

        let broken = s.replace("\"v3\": \"1\"", "\"v3\": \"one\"");
        match Model::from_json_str(&broken) {
            Err(ModelError::File { path, .. }) => assert_eq!(path, "g.v3"),
            other => panic!("{other:?}"),
        }
        let broken = s.replacen("\"coef\": \"5\"", "\"coef\": 5", 1);
        match Model::from_json_str(&broken) {
            Err(ModelError::File { path, .. }) => assert!(path.starts_with("F[0][0].coef"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn witten_file_with_raw_degree_four_field() {
        let s = r#"{"format":"chiralkit-model-v1","presentation":"witten",
            "G":[],
            "Gi":[[{"exps":[0,4,0,0,0],"coef":"1"}],[{"exps":[1,3,0,0,0],"coef":"-1"}],[],[],[]],
            "g":{"v0":"1","v1":"1","v2":"1","v3":"1","v4":"1","degv":"1"}}"#;
        let m = Model::from_json_str(s).unwrap();
        assert_eq!(m.f.get(0), &mono([1, 4, 0, 0, 0], 1));
    }

    #[test]
    fn rescaling_g() {
        let g = GParams::uniform(rat(1));
        let r = MPoint::new([1, 1, 1, 1, 1]).unwrap();
        let env = LatticeEnv::quintic();
        let h = g.rescaled(&r, &rat(2));
        for n in env.delta_dual_points() {
            assert_eq!(h.get(&n), &rat(2));
        }
    }
}
