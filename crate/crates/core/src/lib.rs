//! Distributed lossy source coding for a pair of correlated Gaussian sources.
//!
//! The crate combines the closed-form quadratic-Gaussian Berger-Tung
//! machinery ([`region`]) with a working coding chain: dithered modulo
//! reduction and truncated-Gaussian shaping on an ASK alphabet
//! ([`quantizer`]), multilevel polar coded quantization with list encoding
//! and decoding ([`polar`]), the two-encoder successive decoding system
//! ([`pipeline`]) and a deterministic Monte Carlo harness ([`experiments`]).

pub mod error;
pub mod experiments;
pub mod math;
pub mod pipeline;
pub mod polar;
pub mod quantizer;
pub mod region;

pub use error::{Error, Result};
