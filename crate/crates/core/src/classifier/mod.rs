//! The wrapped classifier: a linear SVM over masked dissimilarity vectors.

mod mask;
mod svm;

pub use mask::FeatureMask;
pub use svm::{train, SvmParams, TrainedModel, TrainingMeta};
