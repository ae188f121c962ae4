//! Link-level simulator and analytics for non-coherent majority-vote
//! over-the-air computation in federated edge learning.
//!
//! Edge devices encode the signs of their local gradients as energy on one of
//! two orthogonal resources of a precoded-OFDM symbol. The edge server sums the
//! received energies per resource and takes the sign of their difference, which
//! is a majority vote computed by the channel itself.

pub mod analytics;
pub mod channel;
pub mod codec;
pub mod deployment;
pub mod error;
pub mod exec;
pub mod link;
pub mod rng;
pub mod trainer;
pub mod waveform;

pub use error::{Error, Result};
