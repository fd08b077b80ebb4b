//! Scalar numeric primitives shared by every other module.

mod gauss;
mod mat2;
mod modulo;
pub mod quad;
mod rng;

pub use gauss::{normal_cdf, qfunc, TruncGaussian};
pub use mat2::Mat2;
pub use modulo::{mod_reduce, ModInterval};
pub use rng::{keyed_uniform, SeededRandomSource};

/// Numerically stable `ln(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Entropy of a probability vector in bits. Zero entries contribute nothing.
pub fn entropy_bits(pmf: &[f64]) -> f64 {
    pmf.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}
