//! Exact kernel for set-valued convex analysis over polyhedral ordering cones.
//!
//! Functions with values in the complete lattice of upper sets `A = A + C` are
//! represented by polyhedral epigraphs over exact rationals. The crate
//! computes scalarizations, set-valued Legendre–Fenchel conjugates and
//! biconjugates, inf-residuations, and Fenchel–Rockafellar-type duality
//! certificates, all bit-exactly.
//!
//! Layers, bottom to top:
//!
//! * [`xreal`] — extended reals with the two Dedekind additions and both
//!   residuations;
//! * [`polyhedra`] — exact rational polyhedra: dual representations,
//!   projection, linear programming, Minkowski/lattice operations;
//! * [`scalar_fn`] — polyhedral extended-real-valued convex functions with
//!   conjugation and scalar duality;
//! * [`upperset_fn`] — the set-valued layer: ordered image space, upper sets,
//!   epigraphical functions, scalarization/setification, conjugates;
//! * [`duality`] — chain rule, sandwich theorem, Fenchel–Rockafellar and
//!   fundamental duality, with witnesses;
//! * [`oracle`] — independent grid-based brute-force evaluators used for
//!   cross-validation;
//! * [`cli`] — problem/report file formats and the command dispatcher behind
//!   the `svconvex` binary.

pub mod cli;
pub mod duality;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod polyhedra;
pub mod scalar_fn;
pub mod upperset_fn;
pub mod xreal;

pub use error::{Error, Result};
