//! Randomly perforated domains built from marked Poisson point processes, and
//! numerical checks of their geometric and analytic scaling laws.
//!
//! Holes are closed balls `B(eps*z_i, eps^alpha * r_i)` centered at the scaled
//! points of a Poisson process with i.i.d. radius marks, keeping only centers
//! farther than `eps` from the boundary of the ambient domain.
//!
//! - [`process`]: sampling and the boundary-layer filter
//! - [`perforation`]: hole lists, separation checks, hole measures
//! - [`slln`]: strong-law limits of scaled counts and radius moments
//! - [`cutoff`]: explicit cutoff functions and their `W^{1,q}` norms
//! - [`rates`]: log-log power-law fits
//! - [`proxy`]: a Robin-boundary diffusion solver on masked lattices
//! - [`cli`]: the `perforate` command-line front end
//!
//! With the default `parallel` feature, seed sweeps and solver kernels run on
//! rayon; without it everything runs sequentially with identical results.

pub mod cli;
pub mod config;
pub mod cutoff;
pub mod error;
pub mod geometry;
pub mod io;
pub mod par;
pub mod perforation;
pub mod process;
pub mod proxy;
pub mod quadrature;
pub mod rates;
pub mod slln;
pub mod spatial;
pub mod sweep;

pub use error::{Error, Result};
pub use geometry::{DomainSpec, Point3};
pub use perforation::{build_perforated, Hole, PerforatedDomain};
pub use process::{MarkedSample, ProcessParams, RadiusLaw};
pub use rates::{fit_rate, RateFit};
