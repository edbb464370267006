//! Linear feature-statistics style transfer and its frequency-domain form.
//!
//! The library implements the family of universal style transfer methods that
//! act as `out = T * (pixel - mu_c) + mu_s` on every pixel of a feature map
//! (AdaIN, WCT, OptimalWCT and a Gram-loss optimizer), the equivalent
//! per-frequency form of the same transform, and the two spectral
//! manipulations built on top of it: phase replacement and frequency
//! combination. A verification suite machine-checks the exact identities the
//! construction relies on (Parseval relations, domain equivalence,
//! phase/content-loss and amplitude/Gram connections).
//!
//! Everything is pure and deterministic: reductions run in a fixed order,
//! eigenvectors carry a fixed sign convention, and any parallelism is across
//! channels only.

pub mod error;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod parallel;
pub mod spectral;
pub mod stylize;
pub mod synth;
pub mod tensor;
mod util;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{Error, Result};
pub use linalg::{EigenDecomposition, SymmetricMatrix, DEFAULT_EIG_CUTOFF};
pub use matrix::Matrix;
pub use metrics::{ssim, CheckEntry, SsimConfig, VerificationReport};
pub use spectral::{PolarSpectrum, Spectrum};
pub use stylize::{FrequencyWeight, Method, StyleTransform};
pub use tensor::{ChannelStats, FeatureMap};
