//! Kernel SVM: RBF and polynomial kernels, an SMO dual solver for binary
//! problems, feature standardization, and a one-vs-one multiclass wrapper.

mod kernel;
mod multiclass;
mod scale;
mod smo;

pub use kernel::Kernel;
pub use multiclass::{
    train_multiclass, MulticlassModel, MulticlassOptions, MulticlassScheme, PairModel, MODEL_FORMAT_VERSION,
};
pub use scale::{fit_standardization, Scaling, Standardization};
pub use smo::{dual_objective, solve_dual, train_binary, BinarySvmModel, DualSolution, TrainConfig};
