//! Schwarz-Christoffel side lengths for polygons whose prevertices lie on the
//! real line, one of them optionally at infinity.
//!
//! Prevertices are stored as an origin plus positive gaps so that differences
//! between crowded prevertices never suffer cancellation.

use serde::Serialize;

use super::quadrature::{End, Quadrature};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScProblem {
    pub origin: f64,
    pub gaps: Vec<f64>,
    /// Exponents at the finite prevertices; the point at infinity takes `-2 - sum`.
    pub exponents: Vec<f64>,
    pub order: usize,
}

impl ScProblem {
    pub fn new(origin: f64, gaps: Vec<f64>, exponents: Vec<f64>, order: usize) -> Result<Self> {
        if exponents.len() != gaps.len() + 1 {
            return Err(Error::invalid("need one more exponent than gaps"));
        }
        if order < 2 {
            return Err(Error::invalid("quadrature order must be at least 2"));
        }
        if let Some(i) = gaps.iter().position(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::Collision(i, i + 1));
        }
        if exponents.iter().any(|&e| !(e > -1.0)) || !(-2.0 - exponents.iter().sum::<f64>() > -1.0)
        {
            return Err(Error::invalid(
                "every exponent, including the one at infinity, must exceed -1",
            ));
        }
        Ok(Self {
            origin,
            gaps,
            exponents,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn infinity_exponent(&self) -> f64 {
        -2.0 - self.exponents.iter().sum::<f64>()
    }

    pub fn positions(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.len());
        let mut acc = self.origin;
        z.push(acc);
        for g in &self.gaps {
            acc += g;
            z.push(acc);
        }
        z
    }

    /// `z_k - z_j` for every `k`, summed from gaps.
    fn offsets(&self, j: usize) -> Vec<f64> {
        let n = self.len();
        let mut o = vec![0.0; n];
        for k in (0..j).rev() {
            o[k] = o[k + 1] - self.gaps[k];
        }
        for k in j + 1..n {
            o[k] = o[k - 1] + self.gaps[k - 1];
        }
        o
    }

    fn quadrature(&self, order: usize) -> Quadrature {
        let mut e = self.exponents.clone();
        e.push(self.infinity_exponent());
        Quadrature::new(order, &e)
    }

    /// Lengths of the image sides: `z_0 z_1, ..., z_{n-2} z_{n-1}`, then
    /// `z_{n-1} -> infinity` and `infinity -> z_0`.
    pub fn side_lengths(&self) -> Vec<f64> {
        self.side_lengths_with_order(self.order)
    }

    pub fn side_lengths_with_order(&self, order: usize) -> Vec<f64> {
        let q = self.quadrature(order);
        let n = self.len();
        let mut sides: Vec<f64> = (0..n - 1).map(|j| self.finite_side(&q, j)).collect();
        sides.push(self.infinite_side(&q, n - 1, 1.0));
        sides.push(self.infinite_side(&q, 0, -1.0));
        sides
    }

    /// Lengths of the sides between consecutive finite prevertices only.
    pub fn finite_side_lengths(&self) -> Vec<f64> {
        let q = self.quadrature(self.order);
        (0..self.len() - 1)
            .map(|j| self.finite_side(&q, j))
            .collect()
    }

    fn finite_side(&self, q: &Quadrature, j: usize) -> f64 {
        let oa = self.offsets(j);
        let ob = self.offsets(j + 1);
        let e = &self.exponents;
        let f = |end: End, r: f64| {
            let (o, u) = match end {
                End::A => (&oa, r),
                End::B => (&ob, -r),
            };
            o.iter()
                .zip(e)
                .map(|(ok, ek)| (u - ok).abs().powf(*ek))
                .product::<f64>()
        };
        let others: Vec<f64> = oa
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j && k != j + 1)
            .map(|(_, &x)| x)
            .collect();
        q.segment(&f, self.gaps[j], e[j], e[j + 1], &others)
    }

    /// `int |prod (s - z_k)^{e_k}| ds` from `z_j` to infinity in direction `dir`,
    /// via `s = z_j + dir L v / (1 - v)` with `L` the prevertex span.
    fn infinite_side(&self, q: &Quadrature, j: usize, dir: f64) -> f64 {
        let o = self.offsets(j);
        let e = &self.exponents;
        let l: f64 = self.gaps.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        // distance of each prevertex behind the start, measured along -dir
        let back: Vec<f64> = o.iter().map(|&ok| -dir * ok).collect();
        let f = |end: End, r: f64| {
            let (v, w) = match end {
                End::A => (r, 1.0 - r),
                End::B => (1.0 - r, r),
            };
            let s = l * v / w;
            let prod: f64 = back
                .iter()
                .zip(e)
                .map(|(bk, ek)| (s + bk).abs().powf(*ek))
                .product();
            prod * l / (w * w)
        };
        let others: Vec<f64> = back
            .iter()
            .enumerate()
            .filter(|&(k, &bk)| k != j && (l - bk).abs() > 1e-15 * l)
            .map(|(_, &bk)| -bk / (l - bk))
            .collect();
        q.segment(&f, 1.0, e[j], self.infinity_exponent(), &others)
    }

    /// Direction of each side as a multiple of pi, in the order of [`Self::side_lengths`].
    pub fn side_directions(&self) -> Vec<f64> {
        let n = self.len();
        let mut dirs = Vec::with_capacity(n + 1);
        for k in 0..n - 1 {
            dirs.push(self.exponents[k + 1..].iter().sum());
        }
        dirs.push(0.0);
        dirs.push(self.exponents.iter().sum());
        dirs
    }

    /// `|sum L_k e^{i pi theta_k}| / sum L_k`.
    pub fn closure_residual(&self, sides: &[f64]) -> f64 {
        let (mut re, mut im, mut tot) = (0.0, 0.0, 0.0);
        for (l, th) in sides.iter().zip(self.side_directions()) {
            let a = std::f64::consts::PI * th;
            re += l * a.cos();
            im += l * a.sin();
            tot += l;
        }
        re.hypot(im) / tot
    }
}

/// Two cross-ratios of five points `p` after the real Möbius map sending
/// `p0, p1, p4` to `0, 1, infinity`: the images of `p2` and `p3`.
/// Infinite entries are allowed.
pub fn cross_ratio_invariants(p: [f64; 5]) -> (f64, f64) {
    // homogeneous coordinates, infinity = (1, 0)
    let h = |z: f64| {
        if z.is_infinite() {
            (1.0, 0.0)
        } else {
            (z, 1.0)
        }
    };
    let br = |u: f64, v: f64| {
        let (a, b) = (h(u), h(v));
        a.0 * b.1 - a.1 * b.0
    };
    let m = |z: f64| (br(z, p[0]) * br(p[1], p[4])) / (br(z, p[4]) * br(p[1], p[0]));
    (m(p[2]), m(p[3]))
}

/// Damped Newton on log-gap coordinates with a central-difference Jacobian.
pub struct Newton {
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    /// A stalled line search still counts as converged below this residual
    /// (the quadrature noise floor).
    pub floor: f64,
}

impl Default for Newton {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            fd_step: 1e-6,
            floor: 1e-10,
        }
    }
}

pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl Newton {
    pub fn solve(
        &self,
        context: &str,
        x0: Vec<f64>,
        f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    ) -> Result<NewtonOutcome> {
        let n = x0.len();
        let mut x = x0;
        let mut r = f(&x)?;
        if r.len() != n {
            return Err(Error::invalid("residual and unknown counts differ"));
        }
        let mut norm = max_abs(&r);
        for it in 0..self.max_iter {
            if norm <= self.tol {
                return Ok(NewtonOutcome {
                    x,
                    residual: norm,
                    iterations: it,
                });
            }
            let mut jac = nalgebra::DMatrix::zeros(n, n);
            for c in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[c] += self.fd_step;
                xm[c] -= self.fd_step;
                let (rp, rm) = (f(&xp)?, f(&xm)?);
                for row in 0..n {
                    jac[(row, c)] = (rp[row] - rm[row]) / (2.0 * self.fd_step);
                }
            }
            let rhs = nalgebra::DVector::from_iterator(n, r.iter().map(|v| -v));
            let step = jac.lu().solve(&rhs).ok_or_else(|| Error::NoConvergence {
                context: format!("{context}: singular Jacobian"),
                iterations: it,
                residual: norm,
            })?;
            let cap = 2.0 / step.amax().max(2.0);
            let mut lambda = cap;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = x
                    .iter()
                    .zip(step.iter())
                    .map(|(a, d)| a + lambda * d)
                    .collect();
                if let Ok(rt) = f(&trial) {
                    let nt = max_abs(&rt);
                    if nt < norm || nt <= self.tol {
                        x = trial;
                        r = rt;
                        norm = nt;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                if norm <= self.floor {
                    return Ok(NewtonOutcome {
                        x,
                        residual: norm,
                        iterations: it,
                    });
                }
                return Err(Error::NoConvergence {
                    context: format!("{context}: line search stalled"),
                    iterations: it,
                    residual: norm,
                });
            }
        }
        if norm <= self.tol {
            return Ok(NewtonOutcome {
                x,
                residual: norm,
                iterations: self.max_iter,
            });
        }
        Err(Error::NoConvergence {
            context: context.to_string(),
            iterations: self.max_iter,
            residual: norm,
        })
    }
}
