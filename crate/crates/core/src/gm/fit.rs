//! Least-squares recovery of a quadratic form from squared values, and the
//! first-derivative identity on the diagonal.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::PolynomialForm;
use crate::error::{Error, Result};

/// Reciprocal condition number below which the design is rejected.
const MIN_RCOND: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct FitResult {
    pub form: PolynomialForm,
    /// Max absolute deviation over the samples.
    pub residual: f64,
    pub rcond: f64,
}

/// Fit `f^2(x) = sum_{i<=j} c_ij x_i x_j` to `(x, f^2)` samples.
pub fn polynomial_fit(samples: &[(Vec<f64>, f64)]) -> Result<FitResult> {
    let n = samples
        .first()
        .map(|s| s.0.len())
        .ok_or_else(|| Error::invalid("no samples"))?;
    if n == 0 || samples.iter().any(|s| s.0.len() != n) {
        return Err(Error::invalid("samples must share a positive dimension"));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let m = pairs.len();
    if samples.len() < m {
        return Err(Error::RankDeficient(format!(
            "{} samples for {m} monomials",
            samples.len()
        )));
    }
    let mut a = DMatrix::from_fn(samples.len(), m, |r, c| {
        let (i, j) = pairs[c];
        samples[r].0[i] * samples[r].0[j]
    });
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));

    // Column equilibration keeps the normal matrix well scaled.
    let mut scale = vec![1.0; m];
    for (c, s) in scale.iter_mut().enumerate() {
        let norm = a.column(c).norm();
        if norm == 0.0 {
            return Err(Error::RankDeficient(format!(
                "monomial {:?} never excited",
                pairs[c]
            )));
        }
        *s = norm;
        a.column_mut(c).scale_mut(1.0 / norm);
    }
    let normal = a.transpose() * &a;
    let eig = normal.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let rcond = lo / hi;
    if !(rcond > MIN_RCOND) {
        return Err(Error::RankDeficient(format!(
            "normal matrix reciprocal condition {rcond:.2e}"
        )));
    }
    let chol = normal
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("normal matrix not positive definite".into()))?;
    let mut coef = chol.solve(&(a.transpose() * &y));
    // Two refinement sweeps recover the accuracy lost by squaring the condition number.
    for _ in 0..2 {
        let r = &y - &a * &coef;
        coef += chol.solve(&(a.transpose() * r));
    }
    let fitted = &a * &coef;
    let residual = (&y - fitted).amax();

    let mut b = DMatrix::zeros(n, n);
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let v = coef[c] / scale[c];
        if i == j {
            b[(i, i)] = v;
        } else {
            b[(i, j)] = v / 2.0;
            b[(j, i)] = v / 2.0;
        }
    }
    Ok(FitResult {
        form: PolynomialForm { b, eta: None },
        residual,
        rcond,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub c: f64,
    pub partials: Vec<f64>,
    pub expected: Vec<f64>,
    pub max_partial_error: f64,
    pub value_sq: f64,
    pub expected_value_sq: f64,
    pub ok: bool,
}

/// Check `d(f^2)/dx_i = 2 c eta_i` and `f^2 = c^2` at `x = (c,...,c)`.
pub fn derivative_check(
    poly: &PolynomialForm,
    c: f64,
    eta: &[f64],
    tol: f64,
) -> Result<DerivativeReport> {
    if eta.len() != poly.dim() {
        return Err(Error::invalid(
            "eta length differs from the number of variables",
        ));
    }
    let x = vec![c; poly.dim()];
    let partials = poly.gradient_sq(&x);
    let expected: Vec<f64> = eta.iter().map(|e| 2.0 * c * e).collect();
    let max_partial_error = partials
        .iter()
        .zip(&expected)
        .map(|(p, e)| (p - e).abs())
        .fold(0.0, f64::max);
    let value_sq = poly.eval_sq(&x);
    let expected_value_sq = c * c;
    let ok = max_partial_error <= tol
        && (value_sq - expected_value_sq).abs() <= tol * (1.0 + expected_value_sq);
    Ok(DerivativeReport {
        c,
        partials,
        expected,
        max_partial_error,
        value_sq,
        expected_value_sq,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gm::xi_alpha;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples_of(
        f: impl Fn(&[f64]) -> f64,
        n: usize,
        count: usize,
        seed: u64,
    ) -> Vec<(Vec<f64>, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
                let v = f(&x);
                (x, v)
            })
            .collect()
    }

    #[test]
    fn recovers_xi_alpha_exactly() {
        let form = xi_alpha(2, &[0.2, 0.1, 0.2, 0.1, 0.25, 0.15], None).unwrap();
        let s = samples_of(|x| form.eval_sq(x), 6, 60, 1);
        let fit = polynomial_fit(&s).unwrap();
        assert!(fit.residual <= 1e-10, "{}", fit.residual);
        assert!(fit.form.distance(&form) < 1e-9);
    }

    #[test]
    fn torus_quadratic_form_fits() {
        // |p + q tau|^2 / Im tau at tau = 0.3 + 1.1i
        let (x, y) = (0.3, 1.1);
        let s = samples_of(
            |v| (v[0] * v[0] + 2.0 * x * v[0] * v[1] + (x * x + y * y) * v[1] * v[1]) / y,
            2,
            12,
            2,
        );
        assert!(polynomial_fit(&s).unwrap().residual <= 1e-10);
    }

    #[test]
    fn non_quadratic_leaves_residual() {
        let s = samples_of(|v| (v[0] * v[0] + v[1] * v[1]).powf(1.5), 2, 20, 3);
        assert!(polynomial_fit(&s).unwrap().residual > 1e-3);
    }

    #[test]
    fn rank_deficiency_detected() {
        let s: Vec<_> = (0..10)
            .map(|k| (vec![k as f64, 2.0 * k as f64], 1.0))
            .collect();
        assert!(matches!(polynomial_fit(&s), Err(Error::RankDeficient(_))));
        assert!(polynomial_fit(&[(vec![1.0, 1.0], 1.0)]).is_err());
    }

    #[test]
    fn derivative_identities() {
        let third = 1.0 / 3.0;
        let eta = [third; 3];
        let xi = xi_alpha(1, &eta, None).unwrap();
        let r = derivative_check(&xi, 1.0, &eta, 1e-12).unwrap();
        assert!(r.ok);
        assert!((r.partials[0] - 2.0 / 3.0).abs() < 1e-15);

        let eta = [0.1, 0.2, 0.3, 0.4];
        for c in [0.5, 1.0, 3.0] {
            assert!(
                derivative_check(&PolynomialForm::diagonal(&eta), c, &eta, 1e-12)
                    .unwrap()
                    .ok
            );
            assert!(
                derivative_check(&PolynomialForm::single_group(&eta), c, &eta, 1e-12)
                    .unwrap()
                    .ok
            );
        }
        let bad = PolynomialForm::diagonal(&[0.5, 0.6]);
        assert!(!derivative_check(&bad, 1.0, &[0.5, 0.6], 1e-12).unwrap().ok);
    }
}
