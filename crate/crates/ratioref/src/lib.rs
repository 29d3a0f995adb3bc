//! Ratio-induced reference calculus.
//!
//! Costs between configurations and objects depend only on the ratio of
//! their positive scales, through the mismatch penalty family
//! `J_a(x) = (x^a + x^{-a})/2 - 1` (canonical at `a = 1`). On top of that
//! single primitive the crate builds:
//!
//! - [`penalty`]: the penalty family, its multiplicative identity, sublevel
//!   intervals, log-coordinate form, and quadratic-regime bounds;
//! - [`spaces`]: positive scales, dictionaries of feasible object scales
//!   (finite lists, intervals, log-boxes, log-polytopes), and the reference
//!   cost, with a JSON schema for the CLI;
//! - [`meaning`]: argmin meaning sets with exact ties and margins, the
//!   symbol predicate, and scale-window/capacity bounds;
//! - [`geometry`]: geometric-mean decision boundaries, cell classification,
//!   and stability certificates;
//! - [`composition`]: product meaning, optimal mediation through a mediator
//!   dictionary, and k-step chains;
//! - [`multidim`]: separable d-dimensional solvers over finite products and
//!   log-convex carriers;
//! - [`oracle`] / [`verify`]: deliberately naive brute-force checkers and
//!   the seeded cross-validation battery built on them.
//!
//! Every solver is generic over the numeric backend ([`scalar::Scalar`]):
//! exact arbitrary-precision rationals reproduce fraction-valued results
//! bit-exactly, while `f64` covers the transcendental paths (general
//! exponents, log-space dictionaries, sweeps).

pub mod composition;
pub mod error;
pub mod geometry;
pub mod meaning;
pub mod multidim;
pub mod oracle;
pub mod penalty;
pub mod scalar;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use penalty::{Penalty, SublevelInterval};
pub use scalar::{Rat, Scalar, Tol};
pub use spaces::{Dictionary, DictItem, FiniteDict, Halfspace, LogBox, LogPolytope, Scale, ScaleVec};
