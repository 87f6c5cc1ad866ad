//! Combinatorial decomposition of a measured foliation.
//!
//! The interior-part partition is supplied by the caller; nothing here embeds
//! curves in a surface. JSON form:
//!
//! ```json
//! {
//!   "proper_arc_count": 1,
//!   "boundary_annulus_count": 0,
//!   "interior_parts": [
//!     [{"kind": "interior_curve"}],
//!     [{"kind": "interior_minimal", "ergodic_count": 2}]
//!   ]
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::SurfaceSignature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    ProperArc,
    BoundaryAnnulus,
    InteriorCurve,
    InteriorMinimal { ergodic_count: u32 },
}

impl ComponentKind {
    pub fn is_interior(&self) -> bool {
        matches!(
            self,
            ComponentKind::InteriorCurve | ComponentKind::InteriorMinimal { .. }
        )
    }

    /// Number of projectively distinct ergodic measures carried.
    pub fn indecomposables(&self) -> u64 {
        match self {
            ComponentKind::InteriorMinimal { ergodic_count } => *ergodic_count as u64,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoliationSpec {
    pub proper_arc_count: u32,
    pub boundary_annulus_count: u32,
    pub interior_parts: Vec<Vec<ComponentKind>>,
}

impl FoliationSpec {
    /// A foliation on a closed surface: no arcs, one interior part.
    pub fn closed(components: Vec<ComponentKind>) -> Self {
        Self {
            proper_arc_count: 0,
            boundary_annulus_count: 0,
            interior_parts: vec![components],
        }
    }

    pub fn total_indecomposables(&self) -> u64 {
        self.proper_arc_count as u64
            + self.boundary_annulus_count as u64
            + self
                .interior_parts
                .iter()
                .map(|p| indecomposable_count(p))
                .sum::<u64>()
    }

    /// Structural problems, independent of any signature.
    pub fn structural_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.proper_arc_count == 0 && self.interior_parts.len() != 1 {
            out.push(format!(
                "without proper arcs there must be exactly one interior part, found {}",
                self.interior_parts.len()
            ));
        }
        for (i, part) in self.interior_parts.iter().enumerate() {
            for c in part {
                match c {
                    ComponentKind::InteriorMinimal { ergodic_count: 0 } => out.push(format!(
                        "part {i}: interior_minimal needs ergodic_count >= 1"
                    )),
                    c if !c.is_interior() => {
                        out.push(format!("part {i}: {c:?} is not an interior component"))
                    }
                    _ => {}
                }
            }
        }
        out
    }
}

pub fn indecomposable_count(part: &[ComponentKind]) -> u64 {
    part.iter().map(ComponentKind::indecomposables).sum()
}

pub fn is_internally_indecomposable(spec: &FoliationSpec) -> bool {
    spec.interior_parts
        .iter()
        .all(|p| indecomposable_count(p) <= 1)
}

/// A vertical foliation is infusible exactly when it is internally indecomposable.
pub fn is_infusible(spec: &FoliationSpec) -> bool {
    is_internally_indecomposable(spec)
}

/// Limit points of a sequence of vertical components, each given as a
/// decomposition. Convergence is strong when every limit is indecomposable;
/// the zero foliation counts as indecomposable.
pub fn limits_are_indecomposable(limits: &[Vec<ComponentKind>]) -> bool {
    limits.iter().all(|l| indecomposable_count(l) <= 1)
}

/// `6g + 3(b_m + b_u + p) + 3`, a deliberately loose cap on the number of
/// indecomposable components.
pub fn component_bound(sig: &SurfaceSignature) -> u64 {
    6 * sig.g as u64 + 3 * (sig.b_m + sig.b_u + sig.p) as u64 + 3
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub reasons: Vec<String>,
}

pub fn validate(spec: &FoliationSpec, sig: &SurfaceSignature) -> Validation {
    let mut reasons = spec.structural_problems();
    if sig.is_closed() && (spec.proper_arc_count > 0 || spec.boundary_annulus_count > 0) {
        reasons.push("closed surface cannot carry proper arcs or boundary annuli".into());
    }
    let total = spec.total_indecomposables();
    let bound = component_bound(sig);
    if total > bound {
        reasons.push(format!("{total} components exceed the bound {bound}"));
    }
    Validation {
        valid: reasons.is_empty(),
        reasons,
    }
}

/// Doubled data. Extremal lengths on the double are twice those on the original.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Doubled {
    pub spec: FoliationSpec,
    pub signature: SurfaceSignature,
}

impl Doubled {
    pub fn ext(original_ext: f64) -> f64 {
        2.0 * original_ext
    }
}

/// Conformal double along every boundary, with one marked point on each
/// marked boundary component.
pub fn double(spec: &FoliationSpec, sig: &SurfaceSignature) -> Result<Doubled> {
    double_with_boundary_points(spec, sig, &vec![1; sig.b_m as usize])
}

/// As [`double`], with an explicit marked-point count per marked boundary.
/// Each boundary marked point lies on the seam and yields one point.
pub fn double_with_boundary_points(
    spec: &FoliationSpec,
    sig: &SurfaceSignature,
    points_per_marked_boundary: &[u32],
) -> Result<Doubled> {
    if sig.is_closed() {
        return Err(Error::invalid("cannot double a closed surface"));
    }
    if points_per_marked_boundary.len() != sig.b_m as usize {
        return Err(Error::invalid(format!(
            "expected {} marked-boundary point counts, got {}",
            sig.b_m,
            points_per_marked_boundary.len()
        )));
    }
    if points_per_marked_boundary.contains(&0) {
        return Err(Error::invalid(
            "a marked boundary carries at least one point",
        ));
    }
    let problems = spec.structural_problems();
    if !problems.is_empty() {
        return Err(Error::invalid(problems.join("; ")));
    }
    let seam_points: u32 = points_per_marked_boundary.iter().sum();
    let signature = SurfaceSignature::new(
        2 * sig.g + sig.b_m + sig.b_u - 1,
        0,
        0,
        2 * sig.p + seam_points,
    );

    let mut part = vec![ComponentKind::InteriorCurve; spec.proper_arc_count as usize];
    part.extend(std::iter::repeat_n(
        ComponentKind::InteriorCurve,
        2 * spec.boundary_annulus_count as usize,
    ));
    for c in spec.interior_parts.iter().flatten() {
        part.push(*c);
        part.push(*c);
    }
    Ok(Doubled {
        spec: FoliationSpec::closed(part),
        signature,
    })
}
