//! Measurement plans: which rank-1 projectors to measure, and the container
//! for their (exact or estimated) expectation values.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Projector, SuperpositionSpec};
use crate::tol::ANGLE_COND_TOL;

/// One projector to measure: either a basis-state projector `|n><n|` or a
/// two-state superposition projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectorSpec {
    Diagonal(usize),
    TwoState(SuperpositionSpec),
}

/// Exact-match key for spec lookup (coefficients compared bit-for-bit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum SpecKey {
    Diag(usize),
    Pair(usize, usize, u64, u64),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ProjectorSpecJson {
    Diag {
        n: usize,
    },
    Pair {
        n: usize,
        m: usize,
        a_re: f64,
        a_im: f64,
    },
}

impl ProjectorSpec {
    pub fn pair(n: usize, m: usize, a: Complex64) -> Result<Self> {
        Ok(ProjectorSpec::TwoState(SuperpositionSpec::new(n, m, a)?))
    }

    /// Realizes the projector in dimension `dim`.
    pub fn realize(&self, dim: usize) -> Result<Projector> {
        match self {
            ProjectorSpec::Diagonal(n) => {
                Ok(Projector::new(crate::state::PureState::basis(dim, *n)?))
            }
            ProjectorSpec::TwoState(spec) => Projector::onto(spec, dim),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ProjectorSpec::Diagonal(n) => format!("diag({n})"),
            ProjectorSpec::TwoState(s) => {
                format!("pair({},{},a={:+.6}{:+.6}i)", s.n, s.m, s.a.re, s.a.im)
            }
        }
    }

    pub(crate) fn key(&self) -> SpecKey {
        match self {
            ProjectorSpec::Diagonal(n) => SpecKey::Diag(*n),
            ProjectorSpec::TwoState(s) => {
                SpecKey::Pair(s.n, s.m, s.a.re.to_bits(), s.a.im.to_bits())
            }
        }
    }

    fn to_json(self) -> ProjectorSpecJson {
        match self {
            ProjectorSpec::Diagonal(n) => ProjectorSpecJson::Diag { n },
            ProjectorSpec::TwoState(s) => ProjectorSpecJson::Pair {
                n: s.n,
                m: s.m,
                a_re: s.a.re,
                a_im: s.a.im,
            },
        }
    }

    fn from_json(j: ProjectorSpecJson) -> Result<Self> {
        match j {
            ProjectorSpecJson::Diag { n } => Ok(ProjectorSpec::Diagonal(n)),
            ProjectorSpecJson::Pair { n, m, a_re, a_im } => {
                ProjectorSpec::pair(n, m, Complex64::new(a_re, a_im))
            }
        }
    }
}

impl Serialize for ProjectorSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectorSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ProjectorSpecJson::deserialize(d)?;
        ProjectorSpec::from_json(j).map_err(serde::de::Error::custom)
    }
}

/// Phase angles and magnitudes of the two probe coefficients
/// `a = mag_a e^{i alpha}`, `b = mag_b e^{i beta}`.
///
/// The inversion of the two m-values requires `beta - alpha != k pi`; pairs
/// closer than `ANGLE_COND_TOL` to that degeneracy are rejected.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnglePair {
    pub alpha: f64,
    pub beta: f64,
    pub mag_a: f64,
    pub mag_b: f64,
}

impl AnglePair {
    pub fn new(alpha: f64, beta: f64, mag_a: f64, mag_b: f64) -> Result<Self> {
        if ![alpha, beta, mag_a, mag_b].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("angle pair"));
        }
        if mag_a <= 0.0 || mag_b <= 0.0 {
            return Err(Error::ZeroCoefficient);
        }
        let sine = (beta - alpha).sin().abs();
        if sine < ANGLE_COND_TOL {
            return Err(Error::DegenerateAngles {
                sine,
                tol: ANGLE_COND_TOL,
            });
        }
        Ok(AnglePair {
            alpha,
            beta,
            mag_a,
            mag_b,
        })
    }

    /// Sensitivity-optimized default: `a = 1`, `b = i`.
    pub fn sensitivity_optimized() -> Self {
        AnglePair {
            alpha: 0.0,
            beta: std::f64::consts::FRAC_PI_2,
            mag_a: 1.0,
            mag_b: 1.0,
        }
    }

    pub fn coefficient_a(&self) -> Complex64 {
        Complex64::from_polar(self.mag_a, self.alpha)
    }

    pub fn coefficient_b(&self) -> Complex64 {
        Complex64::from_polar(self.mag_b, self.beta)
    }
}

impl Default for AnglePair {
    fn default() -> Self {
        AnglePair::sensitivity_optimized()
    }
}

/// Ordered list of projectors to measure.
///
/// Ordering is stable: diagonals ascending, then subspace pairs in
/// lexicographic `(n, m)` order, probes within a pair in generation order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementPlan {
    dim: usize,
    specs: Vec<ProjectorSpec>,
}

impl MeasurementPlan {
    pub fn new(dim: usize, specs: Vec<ProjectorSpec>) -> Result<Self> {
        let mut seen = HashMap::new();
        for spec in &specs {
            match spec {
                ProjectorSpec::Diagonal(n) => {
                    if *n >= dim {
                        return Err(Error::IndexOutOfRange { index: *n, dim });
                    }
                }
                ProjectorSpec::TwoState(s) => {
                    if s.n >= s.m {
                        return Err(Error::ConfigInvalid(format!(
                            "two-state spec must have n < m, got ({}, {})",
                            s.n, s.m
                        )));
                    }
                    if s.m >= dim {
                        return Err(Error::IndexOutOfRange { index: s.m, dim });
                    }
                }
            }
            if seen.insert(spec.key(), ()).is_some() {
                return Err(Error::DuplicateSpec(spec.label()));
            }
        }
        Ok(MeasurementPlan { dim, specs })
    }

    /// The minimal scheme: all `N` diagonal projectors plus two two-state
    /// projectors per subspace pair `n < m`, i.e. `N^2` projectors in total.
    /// One diagonal is redundant given `Tr rho = 1`; it is measured anyway
    /// so that no basis state is privileged under noise.
    pub fn minimal(dim: usize, angles: &AnglePair) -> Result<Self> {
        if dim < 2 {
            return Err(Error::ConfigInvalid("minimal plan needs dim >= 2".into()));
        }
        let angles = AnglePair::new(angles.alpha, angles.beta, angles.mag_a, angles.mag_b)?;
        let mut specs = Vec::with_capacity(dim * dim);
        for n in 0..dim {
            specs.push(ProjectorSpec::Diagonal(n));
        }
        for n in 0..dim {
            for m in (n + 1)..dim {
                specs.push(ProjectorSpec::pair(n, m, angles.coefficient_a())?);
                specs.push(ProjectorSpec::pair(n, m, angles.coefficient_b())?);
            }
        }
        MeasurementPlan::new(dim, specs)
    }

    /// Three probes per subspace pair: the minimal pair plus a redundant
    /// third probe `c = mag_c e^{i gamma}` used by the least-squares
    /// estimator.
    pub fn redundant_triple(
        dim: usize,
        angles: &AnglePair,
        gamma: f64,
        mag_c: f64,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::ConfigInvalid("triple plan needs dim >= 2".into()));
        }
        for (x, y) in [
            (angles.alpha, angles.beta),
            (angles.alpha, gamma),
            (angles.beta, gamma),
        ] {
            let sine = (y - x).sin().abs();
            if sine < ANGLE_COND_TOL {
                return Err(Error::DegenerateAngles {
                    sine,
                    tol: ANGLE_COND_TOL,
                });
            }
        }
        if mag_c <= 0.0 || !mag_c.is_finite() || !gamma.is_finite() {
            return Err(Error::ZeroCoefficient);
        }
        let c = Complex64::from_polar(mag_c, gamma);
        let mut specs = Vec::with_capacity(dim + 3 * dim * (dim - 1) / 2);
        for n in 0..dim {
            specs.push(ProjectorSpec::Diagonal(n));
        }
        for n in 0..dim {
            for m in (n + 1)..dim {
                specs.push(ProjectorSpec::pair(n, m, angles.coefficient_a())?);
                specs.push(ProjectorSpec::pair(n, m, angles.coefficient_b())?);
                specs.push(ProjectorSpec::pair(n, m, c)?);
            }
        }
        MeasurementPlan::new(dim, specs)
    }

    /// The operator-basis scheme: `2 N^2 - N` projectors. Each subspace pair
    /// `n < m` gets the quadruplet of probes `a = +1, -1, +i, -i`; the
    /// degenerate `n = m` quadruplet collapses to the diagonal projector.
    pub fn operator_basis(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::ConfigInvalid(
                "operator-basis plan needs dim >= 2".into(),
            ));
        }
        let mut specs = Vec::with_capacity(2 * dim * dim - dim);
        for n in 0..dim {
            specs.push(ProjectorSpec::Diagonal(n));
        }
        let coeffs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        for n in 0..dim {
            for m in (n + 1)..dim {
                for a in coeffs {
                    specs.push(ProjectorSpec::pair(n, m, a)?);
                }
            }
        }
        MeasurementPlan::new(dim, specs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn specs(&self) -> &[ProjectorSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// The two-state specs of each subspace pair, keyed by `(n, m)` in plan
    /// order.
    pub fn pair_groups(&self) -> Vec<((usize, usize), Vec<SuperpositionSpec>)> {
        let mut order = Vec::new();
        let mut groups: HashMap<(usize, usize), Vec<SuperpositionSpec>> = HashMap::new();
        for spec in &self.specs {
            if let ProjectorSpec::TwoState(s) = spec {
                let key = (s.n, s.m);
                if !groups.contains_key(&key) {
                    order.push(key);
                }
                groups.entry(key).or_default().push(*s);
            }
        }
        order
            .into_iter()
            .map(|k| (k, groups.remove(&k).unwrap()))
            .collect()
    }
}

/// A record of one measured (or exactly computed) expectation value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectationRecord {
    pub spec: ProjectorSpec,
    pub estimate: f64,
    pub shots: Option<u64>,
}

/// Expectation values keyed by projector spec, in plan order.
#[derive(Debug, Clone)]
pub struct ExpectationMap {
    dim: usize,
    records: Vec<ExpectationRecord>,
    index: HashMap<SpecKey, usize>,
}

#[derive(Serialize, Deserialize)]
struct ExpectationMapJson {
    dim: usize,
    specs: Vec<ProjectorSpec>,
    estimates: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shots: Option<Vec<u64>>,
}

impl ExpectationMap {
    pub fn from_records(dim: usize, records: Vec<ExpectationRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            if !rec.estimate.is_finite() {
                return Err(Error::NonFinite("expectation estimate"));
            }
            if !(0.0..=1.0).contains(&rec.estimate) {
                return Err(Error::ConfigInvalid(format!(
                    "estimate {} for {} outside [0, 1]",
                    rec.estimate,
                    rec.spec.label()
                )));
            }
            if index.insert(rec.spec.key(), i).is_some() {
                return Err(Error::DuplicateSpec(rec.spec.label()));
            }
        }
        Ok(ExpectationMap {
            dim,
            records,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn records(&self) -> &[ExpectationRecord] {
        &self.records
    }

    pub fn get(&self, spec: &ProjectorSpec) -> Option<f64> {
        self.index
            .get(&spec.key())
            .map(|&i| self.records[i].estimate)
    }

    pub fn lookup(&self, spec: &ProjectorSpec) -> Result<f64> {
        self.get(spec)
            .ok_or_else(|| Error::MissingExpectation(spec.label()))
    }

    pub fn shots_for(&self, spec: &ProjectorSpec) -> Option<u64> {
        self.index
            .get(&spec.key())
            .and_then(|&i| self.records[i].shots)
    }

    /// Restricts the map to the specs of `plan` (used to run a narrower
    /// estimator on data gathered for a wider plan).
    pub fn subset(&self, plan: &MeasurementPlan) -> Result<ExpectationMap> {
        let records = plan
            .specs()
            .iter()
            .map(|spec| {
                let i = self
                    .index
                    .get(&spec.key())
                    .ok_or_else(|| Error::MissingExpectation(spec.label()))?;
                Ok(self.records[*i].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        ExpectationMap::from_records(self.dim, records)
    }

    pub fn to_json_string(&self) -> String {
        let shots: Option<Vec<u64>> = if self.records.iter().all(|r| r.shots.is_some()) {
            Some(self.records.iter().map(|r| r.shots.unwrap()).collect())
        } else {
            None
        };
        let body = ExpectationMapJson {
            dim: self.dim,
            specs: self.records.iter().map(|r| r.spec).collect(),
            estimates: self.records.iter().map(|r| r.estimate).collect(),
            shots,
        };
        serde_json::to_string_pretty(&body).expect("expectation map serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let body: ExpectationMapJson = serde_json::from_str(s)?;
        if body.estimates.len() != body.specs.len() {
            return Err(Error::ConfigInvalid(
                "estimates array length does not match specs".into(),
            ));
        }
        if let Some(shots) = &body.shots {
            if shots.len() != body.specs.len() {
                return Err(Error::ConfigInvalid(
                    "shots array length does not match specs".into(),
                ));
            }
        }
        let records = body
            .specs
            .iter()
            .enumerate()
            .map(|(i, spec)| ExpectationRecord {
                spec: *spec,
                estimate: body.estimates[i],
                shots: body.shots.as_ref().map(|s| s[i]),
            })
            .collect();
        ExpectationMap::from_records(body.dim, records)
    }
}
