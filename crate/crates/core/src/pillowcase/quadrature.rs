//! Gauss-Jacobi rules from the Golub-Welsch eigenproblem, and a compound
//! integrator for integrands with algebraic endpoint singularities.

use nalgebra::DMatrix;

/// Nodes and weights for `int_0^1 v^beta phi(v) dv`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn jacobi(n: usize, beta: f64) -> Self {
        assert!(n >= 1 && beta > -1.0, "need n >= 1 and beta > -1");
        // Monic Jacobi recurrence with alpha = 0 on [-1, 1], weight (1 + x)^beta.
        let ab = beta;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for (k, d) in diag.iter_mut().enumerate() {
            let s = 2.0 * k as f64 + ab;
            *d = if k == 0 {
                beta / (ab + 2.0)
            } else {
                beta * beta / (s * (s + 2.0))
            };
        }
        for (i, o) in off.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            let s = 2.0 * k + ab;
            *o = (4.0 * k * k * (k + beta) * (k + beta) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
        }
        let jm = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        });
        let eig = jm.symmetric_eigen();
        // Moment of v^beta on [0, 1].
        let mu0 = 1.0 / (beta + 1.0);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = eig.eigenvalues[i];
                let v0 = eig.eigenvectors[(0, i)];
                (0.5 * (1.0 + x), mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Rule {
            beta,
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn legendre(n: usize) -> Self {
        Self::jacobi(n, 0.0)
    }
}

/// Rules for one quadrature order, keyed by endpoint exponent.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub order: usize,
    legendre: Rule,
    jacobi: Vec<Rule>,
}

impl Quadrature {
    pub fn new(order: usize, exponents: &[f64]) -> Self {
        let mut jacobi: Vec<Rule> = Vec::new();
        for &e in exponents {
            if e != 0.0 && !jacobi.iter().any(|r| r.beta == e) {
                jacobi.push(Rule::jacobi(order, e));
            }
        }
        Self {
            order,
            legendre: Rule::legendre(order),
            jacobi,
        }
    }

    fn rule(&self, beta: f64) -> &Rule {
        if beta == 0.0 {
            return &self.legendre;
        }
        self.jacobi
            .iter()
            .find(|r| r.beta == beta)
            .expect("exponent registered when the quadrature was built")
    }

    /// `int_0^len F` where `F` behaves like `u^ea` at `0` and `(len - u)^eb`
    /// at `len`, and is analytic elsewhere except at `others` (coordinates
    /// outside `(0, len)`). The integrand is sampled as `f(End::A, r) = F(r)`
    /// on the half next to `0` and `f(End::B, r) = F(len - r)` on the other,
    /// so callers can measure distances from the nearer end without
    /// cancellation.
    pub fn segment(
        &self,
        f: &dyn Fn(End, f64) -> f64,
        len: f64,
        ea: f64,
        eb: f64,
        others: &[f64],
    ) -> f64 {
        let mid = 0.5 * len;
        let from_a: Vec<f64> = others.iter().copied().chain([0.0, len]).collect();
        let from_b: Vec<f64> = from_a.iter().map(|p| len - p).collect();
        self.half(&|r| f(End::A, r), mid, ea, &from_a)
            + self.half(&|r| f(End::B, r), mid, eb, &from_b)
    }

    /// `int_0^len g(r) dr` with `g ~ r^e` at `0`; `points` are singular
    /// locations in the same coordinate, `0` itself included.
    fn half(&self, g: &dyn Fn(f64) -> f64, len: f64, e: f64, points: &[f64]) -> f64 {
        if len <= 0.0 {
            return 0.0;
        }
        let nearest = |u: f64, skip_end: bool| {
            points
                .iter()
                .filter(|&&p| !(skip_end && p == 0.0))
                .map(|&p| (p - u).abs())
                .fold(f64::INFINITY, f64::min)
        };
        // Endpoint panel: analytic part smooth on a disk of radius >= its length.
        let h = len.min(nearest(0.0, true));
        let rule = self.rule(e);
        let mut total = 0.0;
        for (v, w) in rule.nodes.iter().zip(&rule.weights) {
            let r = h * v;
            total += w * g(r) / r.powf(e);
        }
        total *= h.powf(1.0 + e);
        // Geometric marching toward the midpoint.
        let mut r = h;
        while r < len {
            let step = nearest(r, false).min(len - r);
            let step = if len - r - step < 1e-3 * step {
                len - r
            } else {
                step
            };
            let gl = &self.legendre;
            let mut panel = 0.0;
            for (v, w) in gl.nodes.iter().zip(&gl.weights) {
                panel += w * g(r + step * v);
            }
            total += panel * step;
            r += step;
        }
        total
    }
}

/// Which end of a segment the local coordinate is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    A,
    B,
}
