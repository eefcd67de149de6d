//! Secure beamforming for a base station whose array, and each element on
//! it, can be turned, designed against an eavesdropper it locates by sensing.
//!
//! The pipeline is: synthesize user and eavesdropper channels ([`geometry`]),
//! estimate the eavesdropper direction from beam-sweep echoes and bound the
//! estimate's variance ([`sensing`]), build the worst-user secrecy surrogate
//! over the resulting angular uncertainty region ([`objective`]), and maximize
//! it over the analog beamformer, the array rotation and the element
//! orientations ([`optimizer`]). [`harness`] runs seeded Monte-Carlo studies
//! on top of that.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod objective;
pub mod optimizer;
pub mod sensing;
pub mod units;

pub use error::{Error, Result};
