//! Integrated AUC indexes for scoring variables against a continuous gold
//! standard, together with methods for finding the linear combination of
//! variables that maximizes them.
//!
//! A cutting point `c` splits subjects into cases (`z > c`) and controls
//! (`z <= c`). The classical Mann-Whitney AUC at that cut is averaged over a
//! weight density on `c`, which makes the index free of any particular
//! threshold. Combinations are found either in closed form by least squares
//! (or a LARS path for wide designs) or by threshold gradient ascent on a
//! sigmoid-smoothed version of the index.
//!
//! ```
//! use integrated_auc::density::{fit_weight, WeightSpec};
//! use integrated_auc::measures::auc_integrated;
//!
//! let y = [1.0, 2.0, 1.5, 3.0];
//! let z = [0.1, 0.4, 0.6, 0.9];
//! let w = fit_weight(&WeightSpec::Normal, &z).unwrap();
//! let est = auc_integrated(&y, &z, &w).unwrap();
//! assert!(est.value > 0.5);
//! ```

pub mod cli;
pub mod combination;
pub mod data;
pub mod density;
pub mod error;
pub mod inference;
pub mod measures;
pub mod rank_tree;
pub mod simgen;
pub mod smooth;
mod util;

pub use data::{Dataset, Standardization};
pub use density::{CutWeight, StepFunction, WeightSpec};
pub use error::{Error, Result};
pub use measures::AucEstimate;
