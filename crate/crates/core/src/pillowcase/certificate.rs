//! Regularity certificate for `g(t) = i(beta, H_t)` near `t = 0`.
//!
//! The fitted model is `g(t) = g0 + g1 t + c t / log t`; the certificate
//! reports `R(t) = |g - g0 - g1 t| log(1/t) / t` and
//! `S_eps(t) = |g - g0 - g1 t| / t^{1 + eps}`. A second fit of
//! `g - g0 = kappa t log(1/t) + mu t` is reported alongside as a diagnostic.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::lshape::{degenerate_limit, hm_solve_with, HmOptions, HmSolution};
use crate::error::{Error, Result};
use crate::torus::{ext_form, TorusPoint};

/// `per_decade` log-spaced points per decade from `t_hi` down to `t_lo`, both included.
pub fn decade_grid(t_hi: f64, t_lo: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_lo > 0.0 && t_hi > t_lo) || per_decade == 0 {
        return Err(Error::invalid(
            "grid needs 0 < t_lo < t_hi and a positive density",
        ));
    }
    let decades = (t_hi / t_lo).log10();
    let n = (decades * per_decade as f64).round() as usize;
    Ok((0..=n)
        .map(|k| t_hi * 10f64.powf(-(k as f64) * decades / n as f64))
        .collect())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticFit {
    pub g0: f64,
    pub g1: f64,
    pub c_log: f64,
    pub window: (f64, f64),
    /// Max `|g - model|` over the window.
    pub residual: f64,
    /// Some point misses the model by more than 10% of `c t / log t`.
    pub unstable: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogLinearFit {
    pub kappa: f64,
    pub mu: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRow {
    pub t: f64,
    pub g: f64,
    pub r: f64,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub fit: AsymptoticFit,
    pub log_linear: LogLinearFit,
    pub eps: Vec<f64>,
    pub rows: Vec<CertificateRow>,
    /// Median of `R` over the last two decades of the window.
    pub r_median_tail: f64,
    /// `max |R / median - 1|` over the same points.
    pub r_spread_tail: f64,
    pub r_max: f64,
    /// `S_eps(t_min) / S_eps(t_max)` for each eps.
    pub s_growth: Vec<f64>,
}

impl Certificate {
    pub fn r_stable(&self, tolerance: f64) -> bool {
        self.r_spread_tail <= tolerance
    }
}

fn least_squares(rows: &[[f64; 2]], y: &[f64]) -> Result<[f64; 2]> {
    let a = DMatrix::from_fn(rows.len(), 2, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    Ok([x[0], x[1]])
}

/// Certificate from samples `(t, g(t))` and the limit `g0`.
pub fn certify_samples(samples: &[(f64, f64)], g0: f64, eps: &[f64]) -> Result<Certificate> {
    if samples.len() < 3 {
        return Err(Error::invalid("at least three samples are needed"));
    }
    if samples.iter().any(|&(t, _)| !(t > 0.0 && t < 1.0)) {
        return Err(Error::invalid("sample abscissae must lie in (0, 1)"));
    }
    // (g - g0)/t = g1 + c / log t
    let quot: Vec<f64> = samples.iter().map(|&(t, g)| (g - g0) / t).collect();
    let design: Vec<[f64; 2]> = samples.iter().map(|&(t, _)| [1.0, 1.0 / t.ln()]).collect();
    let [g1, c_log] = least_squares(&design, &quot)?;
    let mut residual = 0.0_f64;
    let mut unstable = false;
    let scale = g0.abs() + g1.abs();
    for &(t, g) in samples {
        let corr = c_log * t / t.ln();
        let miss = (g - g0 - g1 * t - corr).abs();
        residual = residual.max(miss);
        if c_log.abs() > 1e-10 * scale && miss > 0.1 * corr.abs() {
            unstable = true;
        }
    }
    let (t_min, t_max) = samples
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &(t, _)| {
            (lo.min(t), hi.max(t))
        });
    let fit = AsymptoticFit {
        g0,
        g1,
        c_log,
        window: (t_min, t_max),
        residual,
        unstable,
    };

    let design: Vec<[f64; 2]> = samples
        .iter()
        .map(|&(t, _)| [(1.0 / t).ln(), 1.0])
        .collect();
    let [kappa, mu] = least_squares(&design, &quot)?;
    let ll_res = samples
        .iter()
        .map(|&(t, g)| (g - g0 - kappa * t * (1.0 / t).ln() - mu * t).abs())
        .fold(0.0, f64::max);

    let rows: Vec<CertificateRow> = samples
        .iter()
        .map(|&(t, g)| {
            let dev = (g - g0 - g1 * t).abs();
            CertificateRow {
                t,
                g,
                r: dev * (1.0 / t).ln() / t,
                s: eps.iter().map(|e| dev / t.powf(1.0 + e)).collect(),
            }
        })
        .collect();

    let tail_edge = t_min * 100.0 * (1.0 + 1e-9);
    let mut tail: Vec<f64> = rows
        .iter()
        .filter(|r| r.t <= tail_edge)
        .map(|r| r.r)
        .collect();
    tail.sort_by(f64::total_cmp);
    let r_median_tail = if tail.is_empty() {
        f64::NAN
    } else if tail.len() % 2 == 1 {
        tail[tail.len() / 2]
    } else {
        0.5 * (tail[tail.len() / 2 - 1] + tail[tail.len() / 2])
    };
    let r_spread_tail = tail
        .iter()
        .map(|r| (r / r_median_tail - 1.0).abs())
        .fold(0.0, f64::max);
    let r_max = rows.iter().map(|r| r.r).fold(0.0, f64::max);
    let lo_row = rows
        .iter()
        .min_by(|a, b| a.t.total_cmp(&b.t))
        .expect("non-empty");
    let hi_row = rows
        .iter()
        .max_by(|a, b| a.t.total_cmp(&b.t))
        .expect("non-empty");
    let s_growth = (0..eps.len()).map(|k| lo_row.s[k] / hi_row.s[k]).collect();

    Ok(Certificate {
        fit,
        log_linear: LogLinearFit {
            kappa,
            mu,
            residual: ll_res,
        },
        eps: eps.to_vec(),
        rows,
        r_median_tail,
        r_spread_tail,
        r_max,
        s_growth,
    })
}

/// Solve every `t` of the grid. The grid is cut into `jobs` contiguous chunks;
/// each chunk runs in order on its own thread and warm-starts from its
/// previous solution.
pub fn scan(grid: &[f64], opts: &HmOptions, jobs: usize) -> Result<Vec<HmSolution>> {
    let jobs = jobs.max(1).min(grid.len().max(1));
    let chunk = grid.len().div_ceil(jobs).max(1);
    let run = |ts: &[f64]| -> Result<Vec<HmSolution>> {
        let mut out: Vec<HmSolution> = Vec::with_capacity(ts.len());
        for &t in ts {
            let seed = out.last().map(|p| p.logit + (t / p.t).ln());
            out.push(hm_solve_with(t, opts, seed)?);
        }
        Ok(out)
    };
    if jobs == 1 {
        return run(grid);
    }
    let parts: Vec<Result<Vec<HmSolution>>> = std::thread::scope(|s| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|c| s.spawn(move || run(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    let mut all = Vec::with_capacity(grid.len());
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// Certificate for the pillowcase family on `grid`.
pub fn nonsmooth_certificate(
    grid: &[f64],
    eps: &[f64],
    opts: &HmOptions,
    jobs: usize,
) -> Result<Certificate> {
    let g0 = degenerate_limit(opts.order)?.g0;
    let sols = scan(grid, opts, jobs)?;
    let samples: Vec<(f64, f64)> = sols.iter().map(|s| (s.t, s.g)).collect();
    certify_samples(&samples, g0, eps)
}

/// Control family on the torus: `g(t) = (1/2) d/dt Ext_tau((1, t))`, a linear function.
pub fn torus_control(tau: TorusPoint, grid: &[f64], eps: &[f64]) -> Result<Certificate> {
    let m = ext_form(tau);
    let samples: Vec<(f64, f64)> = grid.iter().map(|&t| (t, m.b + m.c * t)).collect();
    certify_samples(&samples, m.b, eps)
}
