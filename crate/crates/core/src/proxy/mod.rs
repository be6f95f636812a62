//! Scalar Robin-boundary diffusion on perforated domains, as a proxy for the
//! temperature equation of the homogenization problem.

mod mask;
mod solver;
mod sweep;
mod trace;

pub use mask::{build_mask, build_mask_on, CellKind, FaceKind, Lattice, MaskedGrid, RobinFace};
pub use solver::{solve_robin, solve_robin_from, AffineDatum, ProxyProblem, ScalarField, Solution, Source};
pub use sweep::{
    homogenization_sweep, relative_l2_distance, solve_instance, HomogenizationRow, HomogenizationSettings,
    InstanceResult,
};
pub use trace::{discrete_trace_norm, TraceReport};
