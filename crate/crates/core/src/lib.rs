//! Symmetric uncertainty as a distance between categorical variables.
//!
//! Columns of a categorical dataset are compared through the partitions of
//! the rows they induce. `d = 1 - SU` is a normalized metric on the classes
//! of variables that induce the same partition, and the row-wise pairing of
//! two variables (the *joint*) makes those classes a commutative monoid whose
//! operation is contractive for `d`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`model`] | datasets, variables, partitions, contingency tables, canonical classes |
//! | [`entropy`] | entropy, conditional/joint entropy, MI, SU, entropic ratio |
//! | [`metric`] | `1 - SU`, distance matrices, metric-axiom validators |
//! | [`algebra`] | joint operation, identity variable, monoid and contractivity validators |
//! | [`randgen`] | seeded dataset generator for property runs |
//! | [`ingest`] | CSV loading and matrix serialization |
//!
//! ```
//! use entrocat::{entropy, model::Dataset};
//!
//! let ds = Dataset::from_columns([
//!     ("x", ["a", "a", "b", "b"]),
//!     ("y", ["p", "p", "q", "q"]),
//! ])
//! .unwrap();
//! let x = ds.partition("x").unwrap();
//! let y = ds.partition("y").unwrap();
//! assert!((entropy::symmetric_uncertainty(&x, &y).unwrap() - 1.0).abs() < 1e-12);
//! ```

pub mod algebra;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod ingest;
pub mod metric;
pub mod model;
pub mod randgen;
pub mod report;

pub use error::{Error, Result};
