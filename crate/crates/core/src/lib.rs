//! Chessboard detection with blur-aware pyramidal x-corners.
//!
//! The pipeline runs [`img`] (pyramid), [`xcorner`] (per-level corners),
//! [`scalesel`] (cross-level tracks), [`connect`] (edge validation) and
//! [`grid`] (topology and canonical order). [`detect::Detector`] ties them
//! together. [`synth`] renders scenes with exact ground truth and [`eval`]
//! scores detections.

pub mod cli;
pub mod connect;
pub mod detect;
pub mod error;
pub mod eval;
pub mod grid;
pub mod img;
pub mod scalesel;
pub mod synth;
pub mod xcorner;

#[cfg(test)]
pub(crate) mod testutil;

pub use detect::{DetectionDetails, Detector, DetectorConfig};
pub use error::{Error, Result};
pub use grid::{BoardShape, ChessboardGrid, GridCorner};
pub use img::GrayImage;
