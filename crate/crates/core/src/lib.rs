//! Exact return-time integrals for finite measure-preserving systems.
//!
//! Systems are permutations of finitely many weighted points, either given
//! directly or compiled from rational interval exchange transformations.
//! For any set `E` the crate computes `∫_E n_E dμ`, the integral of the
//! first-return time, and `μ(I_E)`, the measure of the smallest invariant set
//! containing `E`, with exact rational arithmetic, along with the series,
//! decompositions and towers that connect the two.

#![allow(clippy::result_large_err)]

pub mod cli;
pub mod codec;
pub mod dynamics;
pub mod error;
pub mod iet;
pub mod measure;
pub mod rational;
pub mod recurrence;

pub use dynamics::{Generator, OrbitInfo, System, Transformation};
pub use error::{Error, Result};
pub use iet::{Compilation, Iet, IntervalSet};
pub use measure::{set_algebra, FiniteMeasureSpace, PointSet, SetOp};
pub use rational::Rational;
pub use recurrence::{
    kac_check, return_integral, return_time, ReturnTime, SeriesReport, Tower, VerificationReport,
};
