//! Classification inequalities driven by a surface signature `(g, b_m, b_u, p)`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Genus, boundary components with / without marked points, interior marked points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSignature {
    pub g: u32,
    pub b_m: u32,
    pub b_u: u32,
    pub p: u32,
}

impl SurfaceSignature {
    pub const fn new(g: u32, b_m: u32, b_u: u32, p: u32) -> Self {
        Self { g, b_m, b_u, p }
    }

    pub fn is_closed(&self) -> bool {
        self.b_m == 0 && self.b_u == 0
    }

    /// Euler characteristic of the surface with marked points removed.
    /// Boundary marked points sit on the boundary and do not change it.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.g as i64 - (self.b_m + self.b_u) as i64 - self.p as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub iso_visual: bool,
    pub busemann_continuous: bool,
    pub global_section: bool,
    #[serde(serialize_with = "ratio_as_string")]
    pub sigma: Ratio<i64>,
    pub dim_lower_bound: u64,
}

fn ratio_as_string<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `3g + 2b_m + b_u + p <= 4`.
pub fn visual_inequality(sig: &SurfaceSignature) -> bool {
    3 * sig.g as u64 + 2 * sig.b_m as u64 + sig.b_u as u64 + sig.p as u64 <= 4
}

pub fn global_section_exists(sig: &SurfaceSignature) -> bool {
    if sig.is_closed() {
        return true;
    }
    let lhs = 2 * sig.g as i64 + 2 * sig.b_m as i64 + sig.b_u as i64 + sig.p as i64
        - (1 - sig.b_u as i64).max(0);
    lhs <= 4
}

/// The correction term of the fiber-dimension bound. A marked boundary does
/// not move `g = 1, b_u + p = 0` off its row.
pub fn sigma(sig: &SurfaceSignature) -> Ratio<i64> {
    let punctures = sig.b_u + sig.p;
    match (sig.g, punctures) {
        (g, _) if g >= 2 => Ratio::from_integer(0),
        (1, 0) => Ratio::new(1, 2),
        (1, _) => Ratio::new(1, 4),
        (0, 0) => Ratio::from_integer(1),
        (0, 1) => Ratio::new(3, 4),
        _ => Ratio::new(1, 2),
    }
}

/// `max(0, 2 floor((g + b_m)/2 + (b_u + p)/4 - sigma))`, evaluated exactly.
pub fn dim_lower_bound(sig: &SurfaceSignature) -> u64 {
    let x = Ratio::new((sig.g + sig.b_m) as i64, 2) + Ratio::new((sig.b_u + sig.p) as i64, 4)
        - sigma(sig);
    let f = x.floor().to_integer();
    if f <= 0 {
        0
    } else {
        2 * f as u64
    }
}

pub fn classify(sig: &SurfaceSignature) -> ClassificationReport {
    let visual = visual_inequality(sig);
    ClassificationReport {
        iso_visual: visual,
        busemann_continuous: visual,
        global_section: global_section_exists(sig),
        sigma: sigma(sig),
        dim_lower_bound: dim_lower_bound(sig),
    }
}
