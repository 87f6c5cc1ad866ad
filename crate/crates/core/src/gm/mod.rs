//! Gardiner-Masur functions over a finite curve system.
//!
//! A [`CurveSystem`] fixes labels and a symmetric intersection matrix; a
//! [`Multicurve`] is a dense non-negative weight vector over those labels.
//! Boundary points are represented by [`GmFunction`] evaluators, all
//! homogeneous of degree one in their argument.

mod dimension;
mod fit;

pub use dimension::{injectivity_scan, twist_weights, xi_alpha, BlockSystem};
pub use fit::{derivative_check, polynomial_fit, DerivativeReport, FitResult};

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intersections at or below this are treated as zero for float inputs.
pub const ZERO_INTERSECTION: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurveSystem", into = "RawCurveSystem")]
pub struct CurveSystem {
    labels: Vec<String>,
    matrix: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawCurveSystem {
    labels: Vec<String>,
    intersections: Vec<Vec<f64>>,
}

impl TryFrom<RawCurveSystem> for CurveSystem {
    type Error = Error;
    fn try_from(raw: RawCurveSystem) -> Result<Self> {
        let n = raw.labels.len();
        if raw.intersections.len() != n || raw.intersections.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(format!(
                "intersection matrix must be {n}x{n}"
            )));
        }
        let m = DMatrix::from_fn(n, n, |i, j| raw.intersections[i][j]);
        CurveSystem::new(raw.labels, m)
    }
}

impl From<CurveSystem> for RawCurveSystem {
    fn from(s: CurveSystem) -> Self {
        let n = s.len();
        RawCurveSystem {
            intersections: (0..n)
                .map(|i| (0..n).map(|j| s.matrix[(i, j)]).collect())
                .collect(),
            labels: s.labels,
        }
    }
}

impl CurveSystem {
    pub fn new(labels: Vec<String>, matrix: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::invalid(format!(
                "intersection matrix must be {n}x{n}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::invalid(format!("duplicate label {l}")));
            }
        }
        for i in 0..n {
            if matrix[(i, i)] != 0.0 {
                return Err(Error::invalid(format!(
                    "nonzero self-intersection for {}",
                    labels[i]
                )));
            }
            for j in 0..n {
                let v = matrix[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!(
                        "bad intersection entry ({i},{j}) = {v}"
                    )));
                }
                if v != matrix[(j, i)] {
                    return Err(Error::invalid(format!(
                        "intersection matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { labels, matrix })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::LabelMismatch(format!("unknown label {label}")))
    }

    /// Unit weight on a single label.
    pub fn curve(&self, label: &str) -> Result<Multicurve> {
        let mut w = vec![0.0; self.len()];
        w[self.index(label)?] = 1.0;
        Ok(Multicurve::new(w))
    }

    pub fn multicurve(&self, weights: &BTreeMap<String, f64>) -> Result<Multicurve> {
        let mut w = vec![0.0; self.len()];
        for (label, &x) in weights {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::invalid(format!(
                    "weight on {label} must be non-negative, got {x}"
                )));
            }
            w[self.index(label)?] += x;
        }
        Ok(Multicurve::new(w))
    }

    fn check(&self, m: &Multicurve) -> Result<()> {
        if m.weights.len() != self.len() {
            return Err(Error::LabelMismatch(format!(
                "multicurve has {} weights, system has {} labels",
                m.weights.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// Bilinear extension of the intersection matrix.
    pub fn intersection(&self, m1: &Multicurve, m2: &Multicurve) -> Result<f64> {
        self.check(m1)?;
        self.check(m2)?;
        Ok(self.intersection_unchecked(m1, m2))
    }

    fn intersection_unchecked(&self, m1: &Multicurve, m2: &Multicurve) -> f64 {
        let mut total = 0.0;
        for (k, &a) in m1.weights.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (l, &b) in m2.weights.iter().enumerate() {
                total += a * b * self.matrix[(k, l)];
            }
        }
        total
    }
}

/// Non-negative weights over the labels of a curve system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multicurve {
    weights: Vec<f64>,
}

impl Multicurve {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            weights: vec![0.0; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            weights: self.weights.iter().map(|w| w * s).collect(),
        }
    }

    pub fn sum<'a>(n: usize, items: impl IntoIterator<Item = &'a Multicurve>) -> Self {
        let mut w = vec![0.0; n];
        for m in items {
            for (acc, x) in w.iter_mut().zip(&m.weights) {
                *acc += x;
            }
        }
        Self { weights: w }
    }
}

/// `F -> i(G,F)^2 / i(G,H)`, or identically zero when `i(G,H)` vanishes.
#[derive(Debug, Clone)]
pub struct Hq {
    g: Multicurve,
    denom: f64,
}

pub fn h_q(sys: &CurveSystem, g: &Multicurve, h: &Multicurve) -> Result<Hq> {
    let denom = sys.intersection(g, h)?;
    Ok(Hq {
        g: g.clone(),
        denom,
    })
}

impl Hq {
    pub fn is_zero(&self) -> bool {
        self.denom <= ZERO_INTERSECTION
    }

    pub fn eval(&self, sys: &CurveSystem, f: &Multicurve) -> Result<f64> {
        if self.is_zero() {
            sys.check(f)?;
            return Ok(0.0);
        }
        let i = sys.intersection(&self.g, f)?;
        Ok(i * i / self.denom)
    }
}

/// Vertical components `G_j` and horizontal foliation `H` of a quadratic differential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdData {
    pub components: Vec<Multicurve>,
    pub horizontal: Multicurve,
}

impl QdData {
    pub fn area(&self, sys: &CurveSystem) -> Result<f64> {
        self.components
            .iter()
            .map(|g| sys.intersection(g, &self.horizontal))
            .sum()
    }

    pub fn vertical(&self, n: usize) -> Multicurve {
        Multicurve::sum(n, &self.components)
    }

    pub fn require_unit_area(&self, sys: &CurveSystem) -> Result<()> {
        let area = self.area(sys)?;
        if (area - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "quadratic differential has area {area}, expected 1 (use normalized())"
            )));
        }
        Ok(())
    }

    /// Rescale `q` to unit area; both foliations scale by `area^{-1/2}`.
    pub fn normalized(&self, sys: &CurveSystem) -> Result<Self> {
        let area = self.area(sys)?;
        if area <= ZERO_INTERSECTION {
            return Err(Error::invalid("quadratic differential has zero area"));
        }
        let s = area.sqrt().recip();
        Ok(Self {
            components: self.components.iter().map(|g| g.scaled(s)).collect(),
            horizontal: self.horizontal.scaled(s),
        })
    }
}

/// Symmetric quadratic form in the coordinates `x_i = i(V_i, F) / eta_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialForm {
    pub b: DMatrix<f64>,
    /// `eta_i = i(V_i, H)` when the form comes from a quadratic differential.
    pub eta: Option<Vec<f64>>,
}

impl PolynomialForm {
    pub fn new(b: DMatrix<f64>, eta: Option<Vec<f64>>) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::invalid("coefficient matrix must be square"));
        }
        if let Some(e) = &eta {
            if e.len() != b.nrows() {
                return Err(Error::invalid(
                    "eta length differs from the number of variables",
                ));
            }
        }
        Ok(Self {
            b: (&b + b.transpose()) * 0.5,
            eta,
        })
    }

    /// `sum eta_i x_i^2`: the Busemann point when each `V_i` is its own component.
    pub fn diagonal(eta: &[f64]) -> Self {
        Self {
            b: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eta)),
            eta: Some(eta.to_vec()),
        }
    }

    /// `(sum eta_i x_i)^2`: the minimal point with one interior group.
    pub fn single_group(eta: &[f64]) -> Self {
        let n = eta.len();
        Self {
            b: DMatrix::from_fn(n, n, |i, j| eta[i] * eta[j]),
            eta: Some(eta.to_vec()),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.b.iter().sum()
    }

    pub fn eval_sq(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.b[(i, j)] * x[i] * x[j];
            }
        }
        s
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_sq(x).max(0.0).sqrt()
    }

    /// Gradient of the squared value.
    pub fn gradient_sq(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| 2.0 * (0..n).map(|j| self.b[(i, j)] * x[j]).sum::<f64>())
            .collect()
    }

    /// Max-norm distance between coefficient matrices.
    pub fn distance(&self, other: &PolynomialForm) -> f64 {
        (&self.b - &other.b).amax()
    }

    pub fn coefficients(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.b[(i, j)]).collect())
            .collect()
    }
}

pub type Evaluator = Arc<dyn Fn(&Multicurve) -> f64 + Send + Sync>;

/// A point of the Gardiner-Masur boundary, as an evaluator on multicurves.
#[derive(Clone)]
pub enum GmFunction {
    Busemann {
        sys: CurveSystem,
        qd: QdData,
    },
    Minimal {
        sys: CurveSystem,
        qd: QdData,
        boundary: Vec<Multicurve>,
        groups: Vec<Multicurve>,
    },
    Polynomial {
        sys: CurveSystem,
        form: PolynomialForm,
        variables: Vec<Multicurve>,
    },
    External(Evaluator),
}

impl std::fmt::Debug for GmFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GmFunction::Busemann { .. } => f.write_str("GmFunction::Busemann"),
            GmFunction::Minimal { .. } => f.write_str("GmFunction::Minimal"),
            GmFunction::Polynomial { form, .. } => {
                write!(f, "GmFunction::Polynomial({} vars)", form.dim())
            }
            GmFunction::External(_) => f.write_str("GmFunction::External"),
        }
    }
}

fn sum_hq(
    sys: &CurveSystem,
    pieces: impl IntoIterator<Item = Multicurve>,
    h: &Multicurve,
    f: &Multicurve,
) -> Result<f64> {
    let mut s = 0.0;
    for g in pieces {
        s += h_q(sys, &g, h)?.eval(sys, f)?;
    }
    Ok(s)
}

impl GmFunction {
    pub fn eval(&self, f: &Multicurve) -> Result<f64> {
        match self {
            GmFunction::Busemann { sys, qd } => {
                Ok(sum_hq(sys, qd.components.iter().cloned(), &qd.horizontal, f)?.sqrt())
            }
            GmFunction::Minimal {
                sys,
                qd,
                boundary,
                groups,
            } => Ok(sum_hq(
                sys,
                boundary.iter().chain(groups).cloned(),
                &qd.horizontal,
                f,
            )?
            .sqrt()),
            GmFunction::Polynomial {
                sys,
                form,
                variables,
            } => {
                let x = coordinates(sys, variables, form, f)?;
                Ok(form.eval(&x))
            }
            GmFunction::External(e) => Ok(e(f)),
        }
    }
}

/// `x_i = i(V_i, F) / eta_i` for a polynomial form.
pub fn coordinates(
    sys: &CurveSystem,
    variables: &[Multicurve],
    form: &PolynomialForm,
    f: &Multicurve,
) -> Result<Vec<f64>> {
    let eta = form
        .eta
        .as_ref()
        .ok_or_else(|| Error::invalid("polynomial form carries no reference values"))?;
    if variables.len() != eta.len() {
        return Err(Error::invalid("one variable curve per coordinate expected"));
    }
    variables
        .iter()
        .zip(eta)
        .map(|(v, e)| Ok(sys.intersection(v, f)? / e))
        .collect()
}

pub fn busemann_fn(sys: &CurveSystem, qd: &QdData) -> Result<GmFunction> {
    qd.require_unit_area(sys)?;
    for g in &qd.components {
        sys.check(g)?;
    }
    sys.check(&qd.horizontal)?;
    Ok(GmFunction::Busemann {
        sys: sys.clone(),
        qd: qd.clone(),
    })
}

/// Minimal point: boundary components `P_i` plus one union per interior part.
pub fn minimal_fn(
    sys: &CurveSystem,
    qd: &QdData,
    boundary: &[Multicurve],
    groups: &[Multicurve],
) -> Result<GmFunction> {
    qd.require_unit_area(sys)?;
    let n = sys.len();
    for m in boundary.iter().chain(groups) {
        sys.check(m)?;
        if m.is_zero() {
            return Err(Error::invalid("empty boundary component or group"));
        }
    }
    let total = Multicurve::sum(n, boundary.iter().chain(groups));
    let vertical = qd.vertical(n);
    let scale = vertical
        .weights
        .iter()
        .fold(1.0_f64, |a, &w| a.max(w.abs()));
    for (a, b) in total.weights.iter().zip(&vertical.weights) {
        if (a - b).abs() > 1e-12 * scale {
            return Err(Error::invalid(
                "boundary components and groups do not partition the vertical foliation",
            ));
        }
    }
    Ok(GmFunction::Minimal {
        sys: sys.clone(),
        qd: qd.clone(),
        boundary: boundary.to_vec(),
        groups: groups.to_vec(),
    })
}

/// `sum a_j^2 / b_j >= (sum a_j)^2 / sum b_j`.
pub fn titu_holds(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::invalid(
            "titu: vectors must be non-empty and of equal length",
        ));
    }
    if a.iter().chain(b).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("titu: entries must be positive"));
    }
    let lhs: f64 = a.iter().zip(b).map(|(x, y)| x * x / y).sum();
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let rhs = sa * sa / sb;
    Ok(lhs >= rhs * (1.0 - 4.0 * f64::EPSILON * a.len() as f64))
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// `min (f - minimal)`; negative when the lower bound fails.
    pub lower_margin: f64,
    /// `min (busemann - f)`.
    pub upper_margin: f64,
    pub ok: bool,
}

pub fn sandwich_check(
    f: &GmFunction,
    sys: &CurveSystem,
    qd: &QdData,
    boundary: &[Multicurve],
    groups: &[Multicurve],
    samples: &[Multicurve],
    tol: f64,
) -> Result<SandwichReport> {
    let lower = minimal_fn(sys, qd, boundary, groups)?;
    let upper = busemann_fn(sys, qd)?;
    let mut r = SandwichReport {
        samples: samples.len(),
        lower_violations: 0,
        upper_violations: 0,
        lower_margin: f64::INFINITY,
        upper_margin: f64::INFINITY,
        ok: true,
    };
    for s in samples {
        let v = f.eval(s)?;
        let lo = v - lower.eval(s)?;
        let hi = upper.eval(s)? - v;
        r.lower_margin = r.lower_margin.min(lo);
        r.upper_margin = r.upper_margin.min(hi);
        if lo < -tol {
            r.lower_violations += 1;
        }
        if hi < -tol {
            r.upper_violations += 1;
        }
    }
    r.ok = r.lower_violations == 0 && r.upper_violations == 0;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(i: f64) -> CurveSystem {
        CurveSystem::new(
            vec!["a".into(), "b".into()],
            DMatrix::from_row_slice(2, 2, &[0.0, i, i, 0.0]),
        )
        .unwrap()
    }

    /// Three disjoint curves `V1..V3` plus a transverse `H` meeting them with the given weights.
    fn star(eta: [f64; 3]) -> CurveSystem {
        let mut m = DMatrix::zeros(4, 4);
        for i in 0..3 {
            m[(i, 3)] = eta[i];
            m[(3, i)] = eta[i];
        }
        CurveSystem::new(vec!["V1".into(), "V2".into(), "V3".into(), "H".into()], m).unwrap()
    }

    #[test]
    fn intersection_is_bilinear() {
        let s = pair(1.0);
        let a = s.curve("a").unwrap();
        let b = s.curve("b").unwrap();
        assert_eq!(s.intersection(&a, &b).unwrap(), 1.0);
        assert_eq!(s.intersection(&a.scaled(2.0), &b.scaled(3.0)).unwrap(), 6.0);
        assert!(s.intersection(&a, &Multicurve::zero(3)).is_err());
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(CurveSystem::new(vec!["a".into(), "b".into()], asym).is_err());
        let diag = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(CurveSystem::new(vec!["a".into(), "b".into()], diag).is_err());
        let dup = DMatrix::zeros(2, 2);
        assert!(CurveSystem::new(vec!["a".into(), "a".into()], dup).is_err());
    }

    #[test]
    fn json_curve_system() {
        let s: CurveSystem =
            serde_json::from_str(r#"{"labels":["a","b"],"intersections":[[0,2],[2,0]]}"#).unwrap();
        assert_eq!(s.matrix()[(0, 1)], 2.0);
        let back: CurveSystem = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(
            serde_json::from_str::<CurveSystem>(r#"{"labels":["a"],"intersections":[[1]]}"#)
                .is_err()
        );
    }

    #[test]
    fn hq_zero_and_homogeneity() {
        let s = star([0.5, 0.5, 0.0]);
        let v3 = s.curve("V3").unwrap();
        let h = s.curve("H").unwrap();
        let z = h_q(&s, &v3, &h).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.eval(&s, &h).unwrap(), 0.0);

        let v1 = s.curve("V1").unwrap();
        let f = Multicurve::new(vec![0.0, 0.0, 0.0, 3.0]);
        let one = h_q(&s, &v1, &h).unwrap().eval(&s, &f).unwrap();
        let two = h_q(&s, &v1.scaled(2.0), &h).unwrap().eval(&s, &f).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-15);
    }

    #[test]
    fn busemann_examples() {
        let s = star([1.0, 0.0, 0.0]);
        let qd = QdData {
            components: vec![s.curve("V1").unwrap()],
            horizontal: s.curve("H").unwrap(),
        };
        let b = busemann_fn(&s, &qd).unwrap();
        let f = Multicurve::new(vec![0.0, 0.0, 0.0, 2.5]);
        assert!((b.eval(&f).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(b.eval(&qd.horizontal).unwrap(), 1.0);
        assert_eq!(b.eval(&s.curve("V2").unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn busemann_requires_unit_area() {
        let s = star([2.0, 0.0, 0.0]);
        let qd = QdData {
            components: vec![s.curve("V1").unwrap()],
            horizontal: s.curve("H").unwrap(),
        };
        assert!(busemann_fn(&s, &qd).is_err());
        let unit = qd.normalized(&s).unwrap();
        assert!((unit.area(&s).unwrap() - 1.0).abs() < 1e-15);
        assert!(busemann_fn(&s, &unit).is_ok());
    }

    fn three_component_qd() -> (CurveSystem, QdData) {
        let s = star([0.2, 0.3, 0.5]);
        let qd = QdData {
            components: ["V1", "V2", "V3"]
                .iter()
                .map(|l| s.curve(l).unwrap())
                .collect(),
            horizontal: s.curve("H").unwrap(),
        };
        (s, qd)
    }

    #[test]
    fn minimal_single_group_collapses() {
        let (s, qd) = three_component_qd();
        let v = qd.vertical(4);
        let m = minimal_fn(&s, &qd, &[], std::slice::from_ref(&v)).unwrap();
        let f = Multicurve::new(vec![0.3, 0.0, 1.0, 2.0]);
        let expected =
            s.intersection(&v, &f).unwrap() / s.intersection(&v, &qd.horizontal).unwrap().sqrt();
        assert!((m.eval(&f).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn minimal_equals_busemann_when_split() {
        let (s, qd) = three_component_qd();
        let m = minimal_fn(&s, &qd, &[], &qd.components).unwrap();
        let b = busemann_fn(&s, &qd).unwrap();
        let f = Multicurve::new(vec![0.0, 0.0, 0.0, 1.7]);
        assert_eq!(m.eval(&f).unwrap(), b.eval(&f).unwrap());
    }

    #[test]
    fn minimal_rejects_bad_partition() {
        let (s, qd) = three_component_qd();
        assert!(minimal_fn(&s, &qd, &[], &qd.components[..2]).is_err());
    }

    #[test]
    fn titu_examples() {
        assert!(titu_holds(&[1.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(titu_holds(&[1.0, 2.0], &[2.0, 1.0]).unwrap());
        assert!(titu_holds(&[1.0], &[1.0, 2.0]).is_err());
        assert!(titu_holds(&[1.0, 0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn sandwich_trivial_margins() {
        let (s, qd) = three_component_qd();
        let groups = vec![qd.vertical(4)];
        let b = busemann_fn(&s, &qd).unwrap();
        let samples: Vec<_> = (0..5)
            .map(|k| Multicurve::new(vec![0.0, 0.0, 0.0, 1.0 + k as f64]))
            .collect();
        let r = sandwich_check(&b, &s, &qd, &[], &groups, &samples, 1e-10).unwrap();
        assert!(r.ok);
        assert_eq!(r.upper_margin, 0.0);
        let m = minimal_fn(&s, &qd, &[], &groups).unwrap();
        let r = sandwich_check(&m, &s, &qd, &[], &groups, &samples, 1e-10).unwrap();
        assert!(r.ok);
        assert_eq!(r.lower_margin, 0.0);
    }

    #[test]
    fn polynomial_helpers() {
        let eta = [0.25, 0.75];
        let d = PolynomialForm::diagonal(&eta);
        assert_eq!(d.eval_sq(&[2.0, 2.0]), 4.0);
        let g = PolynomialForm::single_group(&eta);
        assert!((g.coefficient_sum() - 1.0).abs() < 1e-15);
        assert_eq!(g.gradient_sq(&[1.0, 1.0]), vec![0.5, 1.5]);
    }

    proptest! {
        #[test]
        fn titu_random(v in prop::collection::vec((1e-3f64..10.0, 1e-3f64..10.0), 1..12)) {
            let (a, b): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            prop_assert!(titu_holds(&a, &b).unwrap());
        }

        #[test]
        fn coarse_grouping_is_below_fine(w in prop::collection::vec(0.0f64..3.0, 4), lam in 0.0f64..5.0) {
            let (s, qd) = three_component_qd();
            let f = Multicurve::new(w);
            let fine = minimal_fn(&s, &qd, &[], &qd.components).unwrap();
            let coarse_groups = vec![Multicurve::sum(4, &qd.components[..2]), qd.components[2].clone()];
            let coarse = minimal_fn(&s, &qd, &[], &coarse_groups).unwrap();
            let single = minimal_fn(&s, &qd, &[], &[qd.vertical(4)]).unwrap();
            let (vf, vc, vs) = (fine.eval(&f).unwrap(), coarse.eval(&f).unwrap(), single.eval(&f).unwrap());
            prop_assert!(vs <= vc + 1e-12 && vc <= vf + 1e-12);
            // degree-1 homogeneity
            let scaled = f.scaled(lam);
            prop_assert!((fine.eval(&scaled).unwrap() - lam * vf).abs() <= 1e-12 * (1.0 + lam * vf));
            prop_assert!((single.eval(&scaled).unwrap() - lam * vs).abs() <= 1e-12 * (1.0 + lam * vs));
        }
    }
}
