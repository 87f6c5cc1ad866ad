//! Closed forms on the once-marked torus.
//!
//! A point is `tau` in the upper half-plane (lattice `Z + tau Z`, marking
//! kept: no modular reduction). A foliation class `(p, q)` has holonomy
//! `p + q tau`; its extremal length is `|p + q tau|^2 / Im tau`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!(
                "tau = ({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(Self { x, y })
    }

    pub const I: TorusPoint = TorusPoint { x: 0.0, y: 1.0 };

    /// Holonomy `p + q tau` of the class `(p, q)`.
    fn holonomy(&self, f: Foliation) -> (f64, f64) {
        (f.p + f.q * self.x, f.q * self.y)
    }

    /// Class with the given holonomy.
    fn class_of(&self, z: (f64, f64)) -> Foliation {
        let q = z.1 / self.y;
        Foliation {
            p: z.0 - self.x * q,
            q,
        }
    }
}

/// `(p, q) ~ (-p, -q)`; integral primitive vectors are simple closed curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Foliation {
    pub p: f64,
    pub q: f64,
}

impl Foliation {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if (p == 0.0 && q == 0.0) || !p.is_finite() || !q.is_finite() {
            return Err(Error::invalid(
                "foliation class must be a nonzero finite vector",
            ));
        }
        Ok(Self { p, q })
    }

    pub fn scaled(self, s: f64) -> Self {
        Self {
            p: self.p * s,
            q: self.q * s,
        }
    }

    /// Representative with `p > 0`, or `p = 0, q > 0`.
    pub fn canonical(self) -> Self {
        if self.p < 0.0 || (self.p == 0.0 && self.q < 0.0) {
            self.scaled(-1.0)
        } else {
            self
        }
    }
}

pub fn t_intersection(v: Foliation, w: Foliation) -> f64 {
    (v.p * w.q - v.q * w.p).abs()
}

/// Symmetric form `[[a, b], [b, c]]` acting on `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadForm {
    pub fn eval(&self, f: Foliation) -> f64 {
        self.a * f.p * f.p + 2.0 * self.b * f.p * f.q + self.c * f.q * f.q
    }

    pub fn det(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
        }
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        let scale = self.a.abs().max(self.c.abs()).max(self.b.abs());
        self.a >= -tol * scale && self.c >= -tol * scale && self.det() >= -tol * scale * scale
    }

    pub fn max_abs_diff(&self, o: &QuadForm) -> f64 {
        (self.a - o.a)
            .abs()
            .max((self.b - o.b).abs())
            .max((self.c - o.c).abs())
    }
}

/// Largest root of `det(A - lambda B) = 0` for `B` positive definite.
/// Relative size below which the smaller eigenvalue of a PSD form is taken as zero.
const RANK_ONE_CLAMP: f64 = 1e-14;

pub fn max_generalized_eigenvalue(a: &QuadForm, b: &QuadForm) -> f64 {
    let t = a.a * b.c + a.c * b.a - 2.0 * a.b * b.b;
    let (mut da, db) = (a.det(), b.det());
    // Rank-one inputs: rounding in det(A) would swamp tiny eigenvalues.
    let scale = a.a.abs() + a.c.abs();
    if da.abs() <= RANK_ONE_CLAMP * scale * scale {
        da = 0.0;
    }
    let disc = (t * t - 4.0 * da * db).max(0.0);
    (t + disc.sqrt()) / (2.0 * db)
}

pub fn ext_form(tau: TorusPoint) -> QuadForm {
    let y = tau.y;
    QuadForm {
        a: 1.0 / y,
        b: tau.x / y,
        c: (tau.x * tau.x + y * y) / y,
    }
}

pub fn ext(tau: TorusPoint, f: Foliation) -> f64 {
    let (re, im) = tau.holonomy(f);
    (re * re + im * im) / tau.y
}

/// `T = tr(M_2^{-1} M_1)` for the pencil of two torus extremal-length forms,
/// returned as `T - 2`. Evaluated through the change of lattice basis, which
/// avoids cancelling the large entries of forms far out in the thick part.
fn pencil_excess(t1: TorusPoint, t2: TorusPoint) -> f64 {
    let dx = t1.x - t2.x;
    let dy = t1.y - t2.y;
    (dx * dx + dy * dy) / (t1.y * t2.y)
}

/// `(1/2) log` of the larger root of `lambda^2 - (2 + excess) lambda + 1`.
fn half_log_root(excess: f64) -> f64 {
    0.5 * (0.5 * excess + 0.5 * (excess * (excess + 4.0)).sqrt()).ln_1p()
}

/// Teichmüller distance `(1/2) log sup_F Ext_1(F) / Ext_2(F)`.
pub fn distance(t1: TorusPoint, t2: TorusPoint) -> f64 {
    half_log_root(pencil_excess(t1, t2))
}

/// Half-plane hyperbolic distance (curvature -1).
pub fn hyperbolic_distance(t1: TorusPoint, t2: TorusPoint) -> f64 {
    let dx = t1.x - t2.x;
    let dy = t1.y - t2.y;
    (1.0 + (dx * dx + dy * dy) / (2.0 * t1.y * t2.y)).acosh()
}

/// Unit-area quadratic differential at `base` with vertical class `v_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusQd {
    pub base: TorusPoint,
    pub v_hat: Foliation,
    pub h_hat: Foliation,
}

pub fn make_qd(base: TorusPoint, direction: Foliation) -> Result<TorusQd> {
    let direction = Foliation::new(direction.p, direction.q)?;
    let v_hat = direction
        .scaled(ext(base, direction).sqrt().recip())
        .canonical();
    let (re, im) = base.holonomy(v_hat);
    // Rotating the holonomy by a quarter turn gives the flat-orthogonal class;
    // |hol(v_hat)|^2 = Im tau makes i(v_hat, h_hat) = 1 without rescaling.
    let h_hat = base.class_of((-im, re)).canonical();
    Ok(TorusQd { base, v_hat, h_hat })
}

impl TorusQd {
    /// Rotation `e^{-i theta}` taking the vertical holonomy onto the positive imaginary axis.
    fn frame(&self) -> (f64, f64) {
        let (re, im) = self.base.holonomy(self.v_hat);
        let r = re.hypot(im);
        // e^{-i theta} = i conj(z) / |z|
        (im / r, re / r)
    }

    /// Rotated images `a` of 1 and `c` of `tau`.
    fn rotated_generators(&self) -> ((f64, f64), (f64, f64)) {
        let (cr, ci) = self.frame();
        let a = (cr, ci);
        let (x, y) = (self.base.x, self.base.y);
        let c = (cr * x - ci * y, cr * y + ci * x);
        (a, c)
    }

    /// Möbius map `m(z) = (c_x z - c_y) / (a_x z - a_y)`, sending `e^{2u} i` to `ray(u)`.
    pub fn mobius(&self) -> [f64; 4] {
        let (a, c) = self.rotated_generators();
        [c.0, -c.1, a.0, -a.1]
    }
}

/// Point at time `t` on the Teichmüller ray of `qd` (vertical class contracted).
pub fn ray(qd: &TorusQd, t: f64) -> TorusPoint {
    let (a, c) = qd.rotated_generators();
    let (e, ei) = (t.exp(), (-t).exp());
    let w1 = (a.0 * e, a.1 * ei);
    let w2 = (c.0 * e, c.1 * ei);
    let d = w1.0 * w1.0 + w1.1 * w1.1;
    TorusPoint {
        x: (w2.0 * w1.0 + w2.1 * w1.1) / d,
        y: (w2.1 * w1.0 - w2.0 * w1.1) / d,
    }
}

fn apply_mobius(m: [f64; 4], z: (f64, f64)) -> TorusPoint {
    let [a, b, c, d] = m;
    let num = (a * z.0 + b, a * z.1);
    let den = (c * z.0 + d, c * z.1);
    let dd = den.0 * den.0 + den.1 * den.1;
    TorusPoint {
        x: (num.0 * den.0 + num.1 * den.1) / dd,
        y: (num.1 * den.0 - num.0 * den.1) / dd,
    }
}

/// Horocycle through `base` tangent to the ray's endpoint: `m(i + t)`.
pub fn horocycle(qd: &TorusQd, t: f64) -> TorusPoint {
    apply_mobius(qd.mobius(), (t, 1.0))
}

/// Teichmüller radius of the outer ring of [`probe_grid`].
pub const PROBE_RADIUS: f64 = 0.25;

/// 20 points on 4 rings of Teichmüller radius up to [`PROBE_RADIUS`] around `center`.
pub fn probe_grid(center: TorusPoint) -> Vec<TorusPoint> {
    let mut out = Vec::with_capacity(20);
    for ring in 1..=4 {
        // hyperbolic radius is twice the Teichmüller one
        let rho = 2.0 * PROBE_RADIUS * ring as f64 / 4.0;
        for k in 0..5 {
            let th = std::f64::consts::TAU * (k as f64 + 0.25 * ring as f64) / 5.0;
            let (u, v) = (rho.sinh() * th.cos(), rho.cosh() + rho.sinh() * th.sin());
            out.push(TorusPoint {
                x: center.x + center.y * u,
                y: center.y * v,
            });
        }
    }
    out
}

/// `sup_x |xi(horocycle(qd, t), x) - xi(busemann(qd), x)|` over `grid`.
pub fn horocycle_deviation(qd: &TorusQd, t: f64, grid: &[TorusPoint]) -> Result<f64> {
    let h = gm_embed(horocycle(qd, t), qd.base);
    let b = busemann_gm(qd);
    let mut worst = 0.0_f64;
    for &x in grid {
        worst = worst.max((h.xi_eval(x) - xi_eval(&b, x)?).abs());
    }
    Ok(worst)
}

/// Gardiner-Masur image of `tau` seen from basepoint `b`:
/// `F -> (Ext_tau(F) / K)^{1/2}` with `K = e^{2 d(b, tau)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmEmbedding {
    pub tau: TorusPoint,
    pub base: TorusPoint,
    /// `log K`.
    pub log_k: f64,
}

pub fn gm_embed(tau: TorusPoint, b: TorusPoint) -> GmEmbedding {
    GmEmbedding {
        tau,
        base: b,
        log_k: 2.0 * distance(b, tau),
    }
}

impl GmEmbedding {
    /// The squared function as a quadratic form.
    pub fn form(&self) -> QuadForm {
        ext_form(self.tau).scaled((-self.log_k).exp())
    }

    pub fn eval(&self, f: Foliation) -> f64 {
        (ext(self.tau, f) * (-self.log_k).exp()).sqrt()
    }

    /// Horofunction value at `x`: `d(tau, x) - d(b, tau)`.
    pub fn xi_eval(&self, x: TorusPoint) -> f64 {
        distance(self.tau, x) - 0.5 * self.log_k
    }
}

/// `F -> i(v_hat, F)^2` as a rank-one form.
pub fn busemann_gm(qd: &TorusQd) -> QuadForm {
    let Foliation { p, q } = qd.v_hat;
    QuadForm {
        a: q * q,
        b: -p * q,
        c: p * p,
    }
}

/// Eigen-decomposition `Q(F) = sum_k mu_k i(v_k, F)^2` of a PSD form.
fn intersection_squares(q: &QuadForm) -> [(f64, Foliation); 2] {
    let m = 0.5 * (q.a + q.c);
    let r = (0.5 * (q.a - q.c)).hypot(q.b);
    let mu1 = m + r;
    let mu2 = if mu1 > 0.0 {
        (q.det() / mu1).max(0.0)
    } else {
        0.0
    };
    let mu2 = if mu2 <= RANK_ONE_CLAMP * mu1 {
        0.0
    } else {
        mu2
    };
    let (e0, e1) = if r == 0.0 {
        (1.0, 0.0)
    } else if q.a >= q.c {
        (mu1 - q.c, q.b)
    } else {
        (q.b, mu1 - q.a)
    };
    let n = e0.hypot(e1);
    let (e0, e1) = (e0 / n, e1 / n);
    // (e . F)^2 = i(v, F)^2 for v = (e1, -e0)
    [
        (mu1, Foliation { p: e1, q: -e0 }),
        (mu2, Foliation { p: e0, q: e1 }),
    ]
}

/// `(1/2) log sup_F Q(F) / Ext_x(F)`, the largest root of `det(Q - lambda M_x) = 0`.
pub fn xi_eval(q: &QuadForm, x: TorusPoint) -> Result<f64> {
    if !q.is_psd(1e-12) {
        return Err(Error::invalid("form is not positive semidefinite"));
    }
    let parts = intersection_squares(q);
    // tr(adj(M_x) Q) through holonomies, so far-away x costs no accuracy.
    let t: f64 = parts.iter().map(|(mu, v)| mu * ext(x, *v)).sum();
    let det_q = parts[0].0 * parts[1].0;
    let half = 0.5 * t;
    let lambda = half + (half * half - det_q).max(0.0).sqrt();
    if !(lambda > 0.0) {
        return Err(Error::invalid("form vanishes identically"));
    }
    Ok(0.5 * lambda.ln())
}

/// Class `v` with `Q(F) = i(v, F)^2`, canonical sign.
pub fn fiber_project(q: &QuadForm) -> Result<Foliation> {
    let scale = q.a.abs().max(q.c.abs());
    if !q.is_psd(1e-10) || scale == 0.0 || q.det().abs() > 1e-10 * scale * scale {
        return Err(Error::invalid("form is not rank one positive semidefinite"));
    }
    let p = q.c.max(0.0).sqrt();
    let mut qq = q.a.max(0.0).sqrt();
    if q.b > 0.0 {
        qq = -qq;
    }
    Foliation::new(p, qq).map(Foliation::canonical)
}

#[derive(Debug, Clone, Serialize)]
pub struct WalshRow {
    pub n: usize,
    pub t: f64,
    /// `e^{-2 t_n} Ext_{ray(qd_n, t_n)}(F)`.
    pub value: f64,
    /// `i(v_hat_n, F)^2`, the lower bound along the n-th ray.
    pub busemann_n: f64,
    /// `i(v_hat, F)^2` for the limiting differential.
    pub limit: f64,
    pub bound_holds: bool,
}

pub fn walsh_limit_table(
    qd_of: impl Fn(usize) -> Result<TorusQd>,
    t_of: impl Fn(usize) -> f64,
    limit: &TorusQd,
    f: Foliation,
    n_max: usize,
) -> Result<Vec<WalshRow>> {
    let lim = t_intersection(limit.v_hat, f).powi(2) / t_intersection(limit.v_hat, limit.h_hat);
    (1..=n_max)
        .map(|n| {
            let qd = qd_of(n)?;
            let t = t_of(n);
            let value = (-2.0 * t).exp() * ext(ray(&qd, t), f);
            let busemann_n = t_intersection(qd.v_hat, f).powi(2);
            Ok(WalshRow {
                n,
                t,
                value,
                busemann_n,
                limit: lim,
                bound_holds: value >= busemann_n * (1.0 - 1e-12),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tau(x: f64, y: f64) -> TorusPoint {
        TorusPoint::new(x, y).unwrap()
    }

    fn fol(p: f64, q: f64) -> Foliation {
        Foliation::new(p, q).unwrap()
    }

    #[test]
    fn ext_examples() {
        assert_eq!(ext(TorusPoint::I, fol(1.0, 0.0)), 1.0);
        assert_eq!(ext(tau(0.0, 2.0), fol(1.0, 0.0)), 0.5);
        assert_eq!(ext(tau(0.0, 2.0), fol(0.0, 1.0)), 2.0);
        assert_eq!(ext(tau(1.0, 1.0), fol(1.0, 0.0)), 1.0);
        assert_eq!(ext(tau(1.0, 1.0), fol(0.0, 1.0)), 2.0);
        let m = ext_form(tau(0.7, 0.3));
        assert_relative_eq!(m.det(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            m.eval(fol(2.0, -3.0)),
            ext(tau(0.7, 0.3), fol(2.0, -3.0)),
            epsilon = 1e-12
        );
    }

    /// Count crossings of the straight curves of classes `v`, `w` on the square torus.
    fn brute_force_crossings(v: (i64, i64), w: (i64, i64)) -> usize {
        let off = (0.1234, 0.4321);
        let det = (v.0 * w.1 - v.1 * w.0) as f64;
        let mut count = 0;
        for k1 in -10..=10 {
            for k2 in -10..=10 {
                // s v - u w = off + k
                let (rx, ry) = (off.0 + k1 as f64, off.1 + k2 as f64);
                let s = (rx * -(w.1 as f64) + (w.0 as f64) * ry) / -det;
                let u = ((v.0 as f64) * ry - (v.1 as f64) * rx) / -det;
                if (0.0..1.0).contains(&s) && (0.0..1.0).contains(&u) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(t_intersection(fol(1.0, 0.0), fol(0.0, 1.0)), 1.0);
        assert_eq!(t_intersection(fol(2.0, 1.0), fol(1.0, 1.0)), 1.0);
        assert_eq!(t_intersection(fol(1.0, 0.0), fol(0.0, 2.0)), 2.0);
        for (v, w) in [
            ((2, 1), (1, 1)),
            ((3, 2), (1, -1)),
            ((1, 0), (0, 1)),
            ((5, 3), (2, 7)),
        ] {
            let expect = t_intersection(fol(v.0 as f64, v.1 as f64), fol(w.0 as f64, w.1 as f64));
            assert_eq!(brute_force_crossings(v, w) as f64, expect);
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(TorusPoint::I, TorusPoint::I), 0.0);
        assert_relative_eq!(
            distance(TorusPoint::I, tau(0.0, 2.0)),
            0.5 * 2f64.ln(),
            epsilon = 1e-14
        );
        // sup over a slope grid of (p^2 + 4 q^2) / (2 (p^2 + q^2)) is 2
        let sup = (0..=2000)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / 2000.0;
                let f = fol(th.cos(), th.sin());
                ext(TorusPoint::I, f) / ext(tau(0.0, 2.0), f)
            })
            .fold(0.0, f64::max);
        assert_relative_eq!(sup, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn qd_examples() {
        let qd = make_qd(TorusPoint::I, fol(0.0, 1.0)).unwrap();
        assert_eq!(qd.v_hat, fol(0.0, 1.0));
        assert_eq!(qd.h_hat, fol(1.0, 0.0));
        assert_eq!(
            make_qd(TorusPoint::I, fol(0.0, 7.0)).unwrap().v_hat,
            qd.v_hat
        );
        assert!(make_qd(TorusPoint::I, Foliation { p: 0.0, q: 0.0 }).is_err());
    }

    #[test]
    fn ray_examples() {
        let qd = make_qd(TorusPoint::I, fol(0.0, 1.0)).unwrap();
        for t in [0.0, 0.3, 1.0, 2.5] {
            let r = ray(&qd, t);
            assert!(r.x.abs() < 1e-15);
            assert_relative_eq!(r.y, (-2.0 * t).exp(), max_relative = 1e-14);
        }
        let qd = make_qd(tau(0.3, 0.8), fol(2.0, -1.0)).unwrap();
        assert_relative_eq!(ray(&qd, 0.0).x, 0.3, epsilon = 1e-14);
        assert_relative_eq!(ray(&qd, 0.0).y, 0.8, epsilon = 1e-14);
        for k in 1..=50 {
            let t = 0.1 * k as f64;
            assert_relative_eq!(distance(qd.base, ray(&qd, t)), t, epsilon = 1e-10);
        }
    }

    #[test]
    fn gm_embed_examples() {
        let b = tau(0.2, 1.3);
        assert!(gm_embed(b, b).form().max_abs_diff(&ext_form(b)) < 1e-15);
        let x = tau(-0.5, 0.4);
        let form = gm_embed(x, b).form();
        let lam = max_generalized_eigenvalue(&form, &ext_form(b));
        assert_relative_eq!(lam, 1.0, epsilon = 1e-12);
        // along a ray the embedding tends to the rank-one Busemann form
        let qd = make_qd(b, fol(1.0, 2.0)).unwrap();
        let limit = busemann_gm(&qd);
        let e5 = gm_embed(ray(&qd, 5.0), b).form().max_abs_diff(&limit);
        let e10 = gm_embed(ray(&qd, 10.0), b).form().max_abs_diff(&limit);
        assert!(e10 < e5 && e10 < 1e-8);
    }

    #[test]
    fn xi_examples() {
        let b = TorusPoint::I;
        let x = tau(0.0, 2.0);
        assert_relative_eq!(
            xi_eval(&gm_embed(b, b).form(), x).unwrap(),
            0.5 * 2f64.ln(),
            epsilon = 1e-14
        );
        assert_relative_eq!(gm_embed(b, b).xi_eval(x), 0.5 * 2f64.ln(), epsilon = 1e-14);
        // a full-rank form far from the basepoint
        let far = tau(0.3, 0.7);
        let e = gm_embed(far, b);
        assert_relative_eq!(
            xi_eval(&e.form(), x).unwrap(),
            e.xi_eval(x),
            epsilon = 1e-12
        );
        let qd = make_qd(tau(0.4, 0.9), fol(1.0, 1.0)).unwrap();
        let bq = busemann_gm(&qd);
        assert!(xi_eval(&bq, qd.base).unwrap().abs() < 1e-14);
        for t in [0.5, 2.0, 10.0] {
            assert_relative_eq!(xi_eval(&bq, ray(&qd, t)).unwrap(), -t, epsilon = 1e-10);
        }
        assert!(xi_eval(
            &QuadForm {
                a: 1.0,
                b: 0.0,
                c: -1.0
            },
            b
        )
        .is_err());
    }

    #[test]
    fn busemann_examples() {
        let qd = make_qd(TorusPoint::I, fol(0.0, 1.0)).unwrap();
        let bq = busemann_gm(&qd);
        assert_eq!(bq.eval(fol(3.0, 5.0)), 9.0);
        assert_eq!(bq.eval(qd.h_hat), 1.0);
    }

    #[test]
    fn horocycle_horofunctions_approach_busemann() {
        let bound = (2.0 * PROBE_RADIUS).sinh();
        for (x, y, p, q) in [
            (0.0, 1.0, 0.0, 1.0),
            (0.2, 1.3, 2.0, 1.0),
            (0.3, 0.7, 1.0, 3.0),
            (-1.0, 0.2, 1.0, 0.0),
        ] {
            let qd = make_qd(tau(x, y), fol(p, q)).unwrap();
            let grid = probe_grid(qd.base);
            assert_eq!(grid.len(), 20);
            for g in &grid {
                assert!(distance(*g, qd.base) <= PROBE_RADIUS + 1e-12);
            }
            let d: Vec<f64> = [10.0, 100.0, 1000.0]
                .iter()
                .map(|&t| horocycle_deviation(&qd, t, &grid).unwrap())
                .collect();
            assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
            // leading term sinh(rho) / t
            assert!(d[2] * 1000.0 <= bound * 1.01, "{d:?}");
        }
    }

    #[test]
    fn fiber_projection() {
        let v = fiber_project(&QuadForm {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        })
        .unwrap();
        assert_eq!(v, fol(0.0, 1.0));
        assert!(fiber_project(&ext_form(TorusPoint::I)).is_err());
    }

    #[test]
    fn horocycle_examples() {
        let qd = make_qd(TorusPoint::I, fol(0.0, 1.0)).unwrap();
        assert_eq!(qd.mobius(), [0.0, -1.0, 1.0, 0.0]);
        let h0 = horocycle(&qd, 0.0);
        assert!((h0.x).abs() < 1e-15 && (h0.y - 1.0).abs() < 1e-15);
        for t in [0.5, 3.0] {
            let h = horocycle(&qd, t);
            assert_relative_eq!(h.x, -t / (1.0 + t * t), epsilon = 1e-15);
            assert_relative_eq!(h.y, 1.0 / (1.0 + t * t), epsilon = 1e-15);
        }
        // m maps the source geodesic onto the ray
        let qd = make_qd(tau(-0.3, 1.7), fol(3.0, 1.0)).unwrap();
        for u in [-1.0f64, 0.0, 0.7] {
            let a = apply_mobius(qd.mobius(), (0.0, (2.0 * u).exp()));
            let b = ray(&qd, u);
            assert_relative_eq!(a.x, b.x, epsilon = 1e-12);
            assert_relative_eq!(a.y, b.y, epsilon = 1e-12);
        }
        assert_relative_eq!(horocycle(&qd, 0.0).x, -0.3, epsilon = 1e-14);
    }

    #[test]
    fn walsh_constant_sequence() {
        let qd = make_qd(TorusPoint::I, fol(0.0, 1.0)).unwrap();
        let f = fol(0.6, -1.3);
        let rows = walsh_limit_table(|_| Ok(qd), |n| n as f64, &qd, f, 10).unwrap();
        for r in &rows {
            let closed = f.p * f.p + f.q * f.q * (-4.0 * r.t).exp();
            assert_relative_eq!(r.value, closed, max_relative = 1e-12);
            assert!(r.bound_holds && r.value >= r.limit);
        }
        assert!((rows[9].value - rows[9].limit).abs() < 1e-8);
    }

    #[test]
    fn walsh_slowly_varying_sequence_trends_to_limit() {
        let limit = make_qd(TorusPoint::I, fol(0.0, 1.0)).unwrap();
        let f = fol(1.0, 1.0);
        let rows = walsh_limit_table(
            |n| make_qd(TorusPoint::I, fol(1.0 / n as f64, 1.0)),
            |n| n as f64,
            &limit,
            f,
            40,
        )
        .unwrap();
        let err: Vec<f64> = rows.iter().map(|r| (r.value - r.limit).abs()).collect();
        assert!(err[39] < err[9] && err[9] < err[1]);
        assert!(rows.iter().all(|r| r.bound_holds));
    }

    fn point() -> impl Strategy<Value = TorusPoint> {
        (-3.0f64..3.0, 0.05f64..4.0).prop_map(|(x, y)| tau(x, y))
    }

    fn direction() -> impl Strategy<Value = Foliation> {
        (0.0f64..std::f64::consts::PI, 0.1f64..5.0).prop_map(|(a, r)| fol(r * a.cos(), r * a.sin()))
    }

    proptest! {
        #[test]
        fn distance_is_half_hyperbolic(a in point(), b in point()) {
            let d = distance(a, b);
            prop_assert!((d - 0.5 * hyperbolic_distance(a, b)).abs() <= 1e-10);
            prop_assert!((d - distance(b, a)).abs() <= 1e-12);
        }

        #[test]
        fn distance_matches_generic_pencil(a in point(), b in point()) {
            let lam = max_generalized_eigenvalue(&ext_form(a), &ext_form(b));
            prop_assert!((distance(a, b) - 0.5 * lam.ln()).abs() <= 1e-9);
        }

        #[test]
        fn triangle_inequality(a in point(), b in point(), c in point()) {
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
        }

        #[test]
        fn qd_invariants(b in point(), v in direction()) {
            let qd = make_qd(b, v).unwrap();
            prop_assert!((ext(b, qd.v_hat) - 1.0).abs() <= 1e-12);
            prop_assert!((ext(b, qd.h_hat) - 1.0).abs() <= 1e-12);
            prop_assert!((t_intersection(qd.v_hat, qd.h_hat) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn fiber_round_trip(b in point(), v in direction()) {
            let qd = make_qd(b, v).unwrap();
            let back = fiber_project(&busemann_gm(&qd)).unwrap();
            prop_assert!((back.p - qd.v_hat.p).abs() <= 1e-10 && (back.q - qd.v_hat.q).abs() <= 1e-10);
        }

        #[test]
        fn gm_values_are_homogeneous(a in point(), b in point(), f in direction(), lam in 0.0f64..10.0) {
            let e = gm_embed(a, b);
            let v = e.eval(f);
            prop_assert!((e.eval(f.scaled(lam)) - lam * v).abs() <= 1e-12 * (1.0 + lam * v));
        }
    }
}
