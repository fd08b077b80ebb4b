//! The two-encoder system at the corner point.
//!
//! Encoder 2 quantizes `X2` at rate `R2` and its output is decoded first.
//! Encoder 1 quantizes `X1` modulo `A1` and transmits only the `n R1` bits
//! the decoder cannot infer from the side information `Y1 = gamma1 Z2'`.
//! The reconstruction is the linear map `lmmse` applied to `(Z1', Z2')`.
//!
//! Case 2 quantizes both sources without modulo at full rate and
//! reconstructs with `E[X | U1, U2]` under the Gaussian test-channel model.
//! Ideal mode keeps the Case 1 structure but samples `U` directly from the
//! encoder posteriors and hands it to the decoder.

mod block;
mod channels;
mod setup;

pub use block::{
    block_distortion, decode_case1, encode1_wz, encode2, encode_decode_case2, estimate_wrap_stats,
    run_block, side_info_y1, BlockResult, Case1Decoded, Case2Output, EncoderOutput, SourceBlock,
};
pub use channels::{ModuloChannel, PlainChannel};
pub use setup::{DsCodingConfig, EncoderSetup, Mode, PipelineParams};
