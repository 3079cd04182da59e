//! Random walks on the hierarchical group Ω_N.
//!
//! The crate computes exact transition kernels, Green-operator powers and
//! degree classifications, analytics of the distance chain and its running
//! maximum, and runs seeded Monte Carlo simulations that cross-check them.
//!
//! Numerical code is generic over [`Real`] (implemented for `f32` and `f64`);
//! the aliases below fix the scalar to `f64`, which the simulation engine uses.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub mod distance_chain;
pub mod error;
pub mod group;
pub mod kernel;
pub mod montecarlo;
pub mod numeric;
pub mod potential;
pub mod special;

pub use error::{Error, Result};
pub use group::{Ball, GroupElement};
pub use kernel::{KernelTables, Law, Sequence, WalkSpec};
pub use numeric::Approx;
pub use potential::{Decoration, DegreeMethod, DegreeReport, PotentialValue, ReturnTail};

/// Scalar type accepted by the numerical routines.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

pub type Tables = KernelTables<f64>;
pub type Tables32 = KernelTables<f32>;
pub type Value = PotentialValue<f64>;
pub type Degree = DegreeReport<f64>;
pub type Tail = ReturnTail<f64>;
pub type Probability = Approx<f64>;
