//! Frame synchronization detectors for linear periodically time-varying
//! channels corrupted by additive cyclostationary Gaussian noise.
//!
//! The crate is organised bottom-up:
//!
//! * [`cyclostat`] - noise models, DCD transform, noise covariance.
//! * [`channel`] - LPTV channel, frame geometry, `A`/`B` matrices, SNR.
//! * [`frame`] - constellations, sync words, window generation.
//! * [`detectors`] - LRT, ALRT, RALRT, SALRT and the correlator.
//! * [`estimation`] - CMA equalizer and least-squares CIR estimation.
//! * [`harness`] - Monte-Carlo ROC/AUC, sync-word search, complexity.
//! * [`scenarios`] - the two reference scenarios.
//!
//! Vectors follow a time-reversed layout throughout: element `j` of a window
//! holds the sample at time `-j`, so time `0` is the latest window sample.

pub mod channel;
pub mod cyclostat;
pub mod detectors;
pub mod error;
pub mod estimation;
pub mod frame;
pub mod harness;
pub mod linalg;
pub mod scenarios;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used for all small linear-algebra objects.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
