//! Flat pillowcases, their Schwarz-Christoffel realization and the
//! regularity of extremal length along `alpha + t beta`.

pub mod certificate;
pub mod lshape;
pub mod quadrature;
pub mod sc;

pub use certificate::{decade_grid, nonsmooth_certificate, torus_control, Certificate};
pub use lshape::{
    conformal_invariants, degenerate_limit, ext_g_t, flow, g_of_t, hm_solve, hm_solve_with,
    lp_area, sc_solve, target_invariants, vertical_ext, HmOptions, HmSolution, LPolygon,
};
pub use sc::ScProblem;
