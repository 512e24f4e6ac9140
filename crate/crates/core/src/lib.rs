//! Orlicz-space calculus and a parametrix-based local solver for
//! higher-order elliptic equations on a periodic grid.
//!
//! The crate is organised bottom-up:
//! [`young`] (N-functions), [`grid`] and [`orlicz`] (discrete function spaces),
//! [`operator`] (elliptic operators and finite differences),
//! [`kernels`] (fundamental solutions and potentials) and
//! [`parametrix`] (the correction operator and Neumann-series solve).

pub mod error;
pub mod expr;
pub mod grid;
pub mod jet;
pub mod kernels;
pub mod numeric;
pub mod operator;
pub mod orlicz;
pub mod parametrix;
pub mod probes;
pub mod young;

pub use error::{Error, Result};
pub use grid::{GridDomain, GridFunction, ShiftVector};
pub use kernels::{FundamentalSolution, SingularKernel};
pub use operator::{EllipticOperator, MultiIndex};
pub use parametrix::{ParametrixOperator, SolveReport};
pub use young::YoungFunction;
