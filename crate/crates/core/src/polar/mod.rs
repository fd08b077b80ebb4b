//! Multilevel polar coded quantization.
//!
//! Each bit level of the natural labeling is a polar code of length `n`
//! whose input indices play one of three roles (see [`BitRole`]). Encoding
//! is a successive cancellation list search against the quantization
//! posteriors; decoding is a list search against side-information
//! posteriors with the transmitted bits pinned. Levels are processed least
//! significant first and the surviving list is passed between levels.

mod design;
mod reliability;
mod sc;
mod scl;
mod stats;
mod transform;

pub use design::{
    design_joint, design_level_counts, design_level_sets, design_multilevel, BitRole,
    LevelCounts, MultilevelPolarSpec, PolarLevelSpec,
};
pub use reliability::{default_reliability, load_reliability, parse_reliability};
pub use scl::{
    scl_decode, scl_quantize, DecodeOutput, QuantizeOutput, RoundingKey, ShapedRule, SymbolPmfs,
};
pub use stats::{estimate_level_stats, ChannelDraw, LevelStats, TestChannel};
pub use transform::polar_transform;
