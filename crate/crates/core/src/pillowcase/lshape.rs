//! Flat L-shaped pillowcases and the extremal length of `alpha + t beta`.
//!
//! The L has bottom width `a`, left height 1, a notch of width `b` and
//! height `l` on the right. Corners in counterclockwise order, starting at
//! the bottom left: `P0` (bottom left), `P1` (bottom right of the body),
//! `R` (reflex corner), `P2`, `P3` (the notch), `P4` (top left). Doubling
//! gives a sphere with the five convex corners marked.
//!
//! Prevertices are gauge-fixed to `P0 = 0`, `P1 = 1`, `P4 = infinity`; the
//! unknowns are the gaps `P1 R`, `R P2`, `P2 P3`.

use std::sync::OnceLock;

use serde::Serialize;

use super::sc::{cross_ratio_invariants, Newton, ScProblem, DEFAULT_ORDER};
use crate::error::{Error, Result};

/// Exponents at `P0, P1, R, P2, P3`; `P4` at infinity gets `-1/2`.
pub const L_EXPONENTS: [f64; 5] = [-0.5, -0.5, 0.5, -0.5, -0.5];

/// The notch ratio below which prevertices crowd past double precision comfort.
pub const CROWDING_RATIO: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LPolygon {
    pub a: f64,
    pub b: f64,
    pub l: f64,
}

impl LPolygon {
    pub fn new(a: f64, b: f64, l: f64) -> Result<Self> {
        if !(a > 0.0) || !(b >= 0.0) || !(l > 0.0 && l < 1.0) || !(a + b).is_finite() {
            return Err(Error::invalid(format!(
                "L-polygon needs a > 0, b >= 0, 0 < l < 1; got ({a}, {b}, {l})"
            )));
        }
        Ok(Self { a, b, l })
    }

    pub fn area(&self) -> f64 {
        self.a + self.b * self.l
    }

    /// Extremal length on the double of the vertical multicurve `a alpha + b beta`.
    pub fn vertical_ext(&self) -> f64 {
        2.0 * self.area()
    }

    /// Teichmüller flow of `dz^2`, renormalized to unit left height.
    pub fn flow(&self, t: f64) -> Self {
        let s = (2.0 * t).exp();
        Self {
            a: self.a * s,
            b: self.b * s,
            l: self.l,
        }
    }
}

pub fn lp_area(l: &LPolygon) -> f64 {
    l.area()
}

pub fn vertical_ext(l: &LPolygon) -> f64 {
    l.vertical_ext()
}

pub fn flow(l: &LPolygon, t: f64) -> LPolygon {
    l.flow(t)
}

/// Prevertex problem for the L with gaps `P1 R`, `R P2`, `P2 P3`.
pub fn l_problem(gaps: [f64; 3], order: usize) -> Result<ScProblem> {
    ScProblem::new(
        0.0,
        vec![1.0, gaps[0], gaps[1], gaps[2]],
        L_EXPONENTS.to_vec(),
        order,
    )
}

/// Shape read off a solved L problem, heights normalized by the right side.
pub fn l_shape(prob: &ScProblem) -> Result<LPolygon> {
    let s = prob.finite_side_lengths();
    let h = s[1] + s[3];
    LPolygon::new(s[0] / h, s[2] / h, s[3] / h)
}

/// Cross-ratios of the five marked prevertices (reflex corner dropped).
pub fn conformal_invariants(prob: &ScProblem) -> (f64, f64) {
    let z = prob.positions();
    cross_ratio_invariants([z[0], z[1], z[3], z[4], f64::INFINITY])
}

#[derive(Debug, Clone, Serialize)]
pub struct ScSolution {
    pub problem: ScProblem,
    pub shape: LPolygon,
    pub residual: f64,
    pub closure: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Default seed: all three log-gaps zero.
pub fn sc_solve(l: &LPolygon, newton: &Newton) -> Result<ScSolution> {
    sc_solve_seeded(l, [1.0, 1.0, 1.0], newton)
}

pub fn sc_solve_seeded(l: &LPolygon, seed_gaps: [f64; 3], newton: &Newton) -> Result<ScSolution> {
    if l.b <= 0.0 {
        return Err(Error::invalid(
            "the notch width must be positive for the six-vertex problem",
        ));
    }
    let mut warnings = Vec::new();
    if l.b / l.a < CROWDING_RATIO {
        warnings.push(format!("prevertex crowding: b/a = {:.2e}", l.b / l.a));
    }
    let target = [l.a.ln(), l.b.ln(), l.l.ln()];
    let residual = |y: &[f64]| -> Result<Vec<f64>> {
        let p = l_problem([y[0].exp(), y[1].exp(), y[2].exp()], DEFAULT_ORDER)?;
        let s = p.finite_side_lengths();
        let h = s[1] + s[3];
        Ok(vec![
            (s[0] / h).ln() - target[0],
            (s[2] / h).ln() - target[1],
            (s[3] / h).ln() - target[2],
        ])
    };
    let y0 = seed_gaps.map(f64::ln).to_vec();
    let out = newton.solve("sc_solve", y0, &residual)?;
    let problem = l_problem(
        [out.x[0].exp(), out.x[1].exp(), out.x[2].exp()],
        DEFAULT_ORDER,
    )?;
    let closure = problem.closure_residual(&problem.side_lengths());
    Ok(ScSolution {
        shape: l_shape(&problem)?,
        problem,
        residual: out.residual,
        closure,
        iterations: out.iterations,
        warnings,
    })
}

/// Conformal type of the square pillowcase: the double of the `1/2 x 2`
/// rectangle with the midpoint of a long side marked.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PillowcaseTarget {
    /// `(z_P2, z_P3)` in the gauge `P0, P1, P4 = 0, 1, infinity`.
    pub invariants: (f64, f64),
    /// `z_P2 - z_P1` and `z_P3 - z_P2`, kept separately for accuracy.
    pub gaps: (f64, f64),
    pub residual: f64,
}

/// Rectangle corners `P0, P2, P3, P4` with `P1` on the side `P0 P2`.
fn rectangle_problem(gaps: [f64; 2], order: usize) -> Result<ScProblem> {
    ScProblem::new(
        0.0,
        vec![1.0, gaps[0], gaps[1]],
        vec![-0.5, 0.0, -0.5, -0.5],
        order,
    )
}

pub fn compute_target(newton: &Newton) -> Result<PillowcaseTarget> {
    let residual = |y: &[f64]| -> Result<Vec<f64>> {
        let s = rectangle_problem([y[0].exp(), y[1].exp()], DEFAULT_ORDER)?.finite_side_lengths();
        // P0 P1 = P1 P2 = 1, P2 P3 = 1/2
        Ok(vec![
            (s[0] / s[1]).ln(),
            (s[2] / (s[0] + s[1])).ln() - 0.25f64.ln(),
        ])
    };
    let out = newton.solve("pillowcase target", vec![0.0, 0.0], &residual)?;
    let gaps = (out.x[0].exp(), out.x[1].exp());
    Ok(PillowcaseTarget {
        invariants: (1.0 + gaps.0, 1.0 + gaps.0 + gaps.1),
        gaps,
        residual: out.residual,
    })
}

/// Cached [`compute_target`] with default solver settings.
pub fn target_invariants() -> Result<PillowcaseTarget> {
    static TARGET: OnceLock<Result<PillowcaseTarget>> = OnceLock::new();
    TARGET
        .get_or_init(|| compute_target(&Newton::default()))
        .clone()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HmResiduals {
    /// `|log(b/a) - log t|`.
    pub t_match: f64,
    /// Max deviation of the marked-point invariants from the target.
    pub invariant_match: f64,
    pub closure: f64,
}

/// The L carrying the Hubbard-Masur differential of `alpha + t beta` on the
/// square pillowcase.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HmSolution {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub l: f64,
    /// `i(beta, H) = 2 l / a` for the differential scaled to weights `(1, t)`.
    pub g: f64,
    /// `Ext(alpha + t beta) = 2 (1 + t l) / a`.
    pub ext: f64,
    /// Position of `R`: logit of `(z_P2 - z_R) / (z_P2 - z_P1)`.
    pub logit: f64,
    pub iterations: usize,
    pub residuals: HmResiduals,
}

impl HmSolution {
    pub fn shape(&self) -> LPolygon {
        LPolygon {
            a: self.a,
            b: self.b,
            l: self.l,
        }
    }

    pub fn problem(&self, target: &PillowcaseTarget, order: usize) -> Result<ScProblem> {
        l_problem(split_gap(target, self.logit), order)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HmOptions {
    /// Tolerance on `log(b/a) - log t`.
    pub tol: f64,
    pub max_iter: usize,
    pub order: usize,
    /// Largest accepted `t` (exclusive): `t -> 1` collapses `R` onto `P1`.
    pub t_max: f64,
}

impl Default for HmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iter: 200,
            order: DEFAULT_ORDER,
            t_max: 1.0,
        }
    }
}

/// Gaps `P1 R`, `R P2`, `P2 P3` with `R` placed by `logit` between `P1` and `P2`.
fn split_gap(target: &PillowcaseTarget, logit: f64) -> [f64; 3] {
    let d = target.gaps.0;
    [
        d / (1.0 + logit.exp()),
        d / (1.0 + (-logit).exp()),
        target.gaps.1,
    ]
}

struct Eval {
    log_t: f64,
    shape: LPolygon,
}

fn eval_at(target: &PillowcaseTarget, logit: f64, order: usize) -> Result<Eval> {
    let p = l_problem(split_gap(target, logit), order)?;
    let shape = l_shape(&p)?;
    Ok(Eval {
        log_t: (shape.b / shape.a).ln(),
        shape,
    })
}

pub fn hm_solve(t: f64) -> Result<HmSolution> {
    hm_solve_with(t, &HmOptions::default(), None)
}

/// Solve for the position of the reflex prevertex so that `b / a = t`, the
/// five marked prevertices being pinned to the pillowcase target. `seed` is
/// a starting logit (warm start).
pub fn hm_solve_with(t: f64, opts: &HmOptions, seed: Option<f64>) -> Result<HmSolution> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("t must be positive, got {t}")));
    }
    if t >= opts.t_max {
        return Err(Error::invalid(format!(
            "t = {t} is outside (0, {})",
            opts.t_max
        )));
    }
    if t < CROWDING_RATIO {
        return Err(Error::invalid(format!(
            "t = {t:.2e} is below the crowding limit {CROWDING_RATIO:.0e}"
        )));
    }
    let target = target_invariants()?;
    let goal = t.ln();
    // For small t the notch width is about a quarter of the relative gap.
    let mut y = seed.unwrap_or_else(|| (t / (1.0 - t)).ln() + 1.4);
    let mut e = eval_at(&target, y, opts.order)?;
    let mut f = e.log_t - goal;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut prev: Option<(f64, f64)> = None;
    let mut iterations = 0;
    while f.abs() > opts.tol {
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                context: format!("hm_solve at t = {t}"),
                iterations,
                residual: f.abs(),
            });
        }
        iterations += 1;
        if f < 0.0 {
            lo = lo.max(y);
        } else {
            hi = hi.min(y);
        }
        let slope = match prev {
            Some((py, pf)) if py != y && (f - pf) != 0.0 => (f - pf) / (y - py),
            _ => {
                let h = 1e-4;
                (eval_at(&target, y + h, opts.order)?.log_t - e.log_t) / h
            }
        };
        let mut next = if slope > 0.0 { y - f / slope } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => y + 2.0,
                (false, true) => y - 2.0,
                (false, false) => y - f.signum(),
            };
        }
        prev = Some((y, f));
        y = next;
        e = eval_at(&target, y, opts.order)?;
        f = e.log_t - goal;
    }
    let a = e.shape.a;
    let l = e.shape.l;
    let problem = l_problem(split_gap(&target, y), opts.order)?;
    let inv = conformal_invariants(&problem);
    let residuals = HmResiduals {
        t_match: f.abs(),
        invariant_match: (inv.0 - target.invariants.0)
            .abs()
            .max((inv.1 - target.invariants.1).abs()),
        closure: problem.closure_residual(&problem.side_lengths()),
    };
    Ok(HmSolution {
        t,
        a,
        b: e.shape.b,
        l,
        g: 2.0 * l / a,
        ext: 2.0 * (1.0 + t * l) / a,
        logit: y,
        iterations,
        residuals,
    })
}

pub fn g_of_t(t: f64) -> Result<f64> {
    Ok(hm_solve(t)?.g)
}

pub fn ext_g_t(t: f64) -> Result<f64> {
    Ok(hm_solve(t)?.ext)
}

/// The `t -> 0` configuration: `R` merged into `P2`, leaving a rectangle
/// with the marked point `P2` on its right side.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DegenerateLimit {
    pub a0: f64,
    pub l0: f64,
    /// `g(0) = 2 l0 / a0`.
    pub g0: f64,
    /// `Ext(alpha) = 2 / a0`.
    pub ext0: f64,
}

pub fn degenerate_limit(order: usize) -> Result<DegenerateLimit> {
    let target = target_invariants()?;
    let p = ScProblem::new(
        0.0,
        vec![1.0, target.gaps.0, target.gaps.1],
        vec![-0.5, -0.5, 0.0, -0.5],
        order,
    )?;
    let s = p.finite_side_lengths();
    let h = s[1] + s[2];
    let (a0, l0) = (s[0] / h, s[2] / h);
    Ok(DegenerateLimit {
        a0,
        l0,
        g0: 2.0 * l0 / a0,
        ext0: 2.0 / a0,
    })
}
