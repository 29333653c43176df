//! Schmidt-number diagnostics for bipartite pure and mixed states on
//! `C^d ⊗ C^d`.
//!
//! - [`linalg`] and [`bipartite`]: dense complex operators, partial trace
//!   and transpose, Hermitian spectra.
//! - [`states`]: Schmidt decomposition and the operator families used by
//!   the constructions (`P₊`, `Z`, isotropic states, subset mixtures).
//! - [`witness`]: canonical and filtered Schmidt witnesses.
//! - [`robustness`]: exact robustness values and Schmidt-robustness bounds.
//! - [`twirl`]: numerical verification of the twirl construction.
//! - [`distill`]: partial-transpose distillability screen.
//! - [`optimize`]: witness-based lower bounds on the random Schmidt
//!   robustness.
//! - [`io`]: JSON density-matrix files.

pub mod bipartite;
pub mod distill;
pub mod error;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod par;
pub mod robustness;
pub mod sampling;
pub mod states;
pub mod twirl;
pub mod witness;

pub use bipartite::{BipartiteOperator, TraceOut};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use linalg::{ComplexMatrix, Eigensystem};
pub use par::Execution;
pub use states::PureState;
pub use witness::Witness;
