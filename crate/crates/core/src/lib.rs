//! Numerical engine for frame-based noncommutative differential calculi over
//! the matrix algebra M_N(ℂ).
//!
//! A calculus is fixed by a frame of antihermitian generators λ_a, a central
//! projector P onto the relations of the exterior algebra and a central
//! braiding σ. On top of that the crate builds differentials, bimodule
//! connections, torsion, curvature and the ∗-involution ȷ_n on tensor powers
//! of the module of one-forms, and measures every consistency and reality
//! identity between them as a numerical residual.

pub mod braiding;
pub mod calculus;
pub mod connection;
pub mod error;
pub mod fixtures;
pub mod frametensor;
pub mod involution;
pub mod io;
pub mod matalg;
pub mod verify;

pub use braiding::Braiding;
pub use calculus::FrameGeometry;
pub use connection::{Connection, CurvatureData, Torsion};
pub use error::{Error, Result};
pub use frametensor::{CentralTensor, FrameTensorField};
pub use involution::{D2Reality, PermutationWord};
pub use io::Input;
pub use matalg::{AlgebraElement, C64};
pub use verify::{CheckResult, ConnectionChoice, Status, Summary, VerificationReport, VerifyOptions};
