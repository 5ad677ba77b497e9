//! Numerical toolkit for the entanglement of pure three-qubit states.
//!
//! States are classified into the six SLOCC classes (`A-B-C`, `A-BC`,
//! `B-AC`, `C-AB`, `W`, `GHZ`), reduced to their local-unitary canonical
//! forms, and probed with the usual measures: local entropies, pairwise and
//! cut concurrences, the 3-tangle and the residual pairwise entanglement.
//! The [`slocc`] module simulates local operators and two-outcome POVMs and
//! runs the Monte-Carlo monotonicity checks; [`multiparty`] covers the
//! `W_N` family and the parameter-counting bound.
//!
//! Basis convention: party `A` is the most significant digit of the flat
//! amplitude index, so `|q_A q_B q_C⟩` sits at `4 q_A + 2 q_B + q_C`.

pub mod classify;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod multiparty;
pub mod rng;
pub mod slocc;
pub mod states;

pub use classify::{classify, ClassLabel, SloccClass, Tolerances};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use measures::{measure_report, three_tangle, MeasureReport};
pub use states::{GhzCanonicalParams, PureState, WCanonicalParams};
