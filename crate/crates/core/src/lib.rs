//! Closed-loop downlink MIMO link adaptation.
//!
//! The UE side turns a channel into a CSI report (rank from the γ condition
//! metric, precoder from an exhaustive Type I codebook search, CQI from a
//! SINR lookup). The gNB side turns the report into a grant and the link
//! model decides which transport blocks get through.

pub mod channel;
pub mod codebook;
pub mod csi;
pub mod error;
pub mod link;
pub mod numerics;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
