//! Certified decisions for transform stochastic orders and aging classes.
//!
//! Distributions are described by quantile models on the probability scale.
//! The library compares two of them in the convex-transform, star-shaped,
//! qmit, dmrl, ps and nbue orders, and classifies single distributions
//! against the unit exponential. Each verdict comes with the conditions that
//! decided it, and every decision can be checked against a dense-grid oracle.

pub mod aging;
pub mod cli;
pub mod delta;
pub mod dsl;
pub mod empirical;
pub mod error;
pub mod grid;
pub mod limit;
pub mod model;
pub mod oracle;
pub mod order;
pub mod prob;
pub mod quad;
pub mod report;
pub mod shape;
pub mod sweep;

pub use error::{Error, Result};
pub use grid::GridConfig;
pub use limit::{limit_at, Endpoint, LimitKind, LimitMethod, LimitValue};
pub use model::QuantileModel;
pub use order::{compare_all, CompareOptions, Comparison, MethodChoice, Order, OrderVerdict, Status};
pub use prob::Prob;
pub use shape::{find_shape, ratio_qd, Classification, ShapeReport};
