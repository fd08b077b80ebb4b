use std::f64::consts::LN_2;

use super::sc::{level_llr, LlrTree, PartialSums};
use super::transform::transform_in_place;
use crate::math::{softplus, SeededRandomSource};
use crate::{Error, Result};

/// One symbol of a test channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    /// `P(u | x')` seen by the encoder.
    pub quant: Vec<f64>,
    /// The decoder's view of `u`.
    pub side: Vec<f64>,
    /// Index selected by the ideal quantizer.
    pub symbol: usize,
}

/// Joint model of (encoder posterior, decoder posterior, selected symbol).
pub trait TestChannel {
    fn alphabet_size(&self) -> usize;
    fn draw(&mut self, rng: &mut SeededRandomSource) -> ChannelDraw;
}

/// Per-index conditional entropy estimates of one level, in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub h_quant: Vec<f64>,
    pub h_side: Vec<f64>,
}

impl LevelStats {
    pub fn new(h_quant: Vec<f64>, h_side: Vec<f64>) -> Result<Self> {
        if h_quant.len() != h_side.len() {
            return Err(Error::LengthMismatch {
                expected: h_quant.len(),
                got: h_side.len(),
            });
        }
        if !h_quant.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(h_quant.len()));
        }
        Ok(Self { h_quant, h_side })
    }

    /// Stats implied by a reliability order alone: entropy falls linearly
    /// with reliability rank, identically for both channels.
    pub fn from_reliability(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut h = vec![0.0; n];
        for (pos, &i) in order.iter().enumerate() {
            h[i] = 1.0 - (pos as f64 + 0.5) / n as f64;
        }
        Self::new(h.clone(), h)
    }

    pub fn n(&self) -> usize {
        self.h_quant.len()
    }

    pub fn mean_quant(&self) -> f64 {
        self.h_quant.iter().sum::<f64>() / self.n() as f64
    }

    pub fn mean_side(&self) -> f64 {
        self.h_side.iter().sum::<f64>() / self.n() as f64
    }
}

/// Genie-aided Monte Carlo construction.
///
/// For every trial a block of `n` symbols is drawn from the channel; for
/// each level the true bits of the lower levels are given and the average
/// of `-log2 P(v_i | v_<i, ·)` along the true input `v` is accumulated for
/// the quantization pmfs and for the side pmfs. Values are clamped to
/// `[0, 1]`.
pub fn estimate_level_stats<C: TestChannel + ?Sized>(
    channel: &mut C,
    n: usize,
    trials: usize,
    rng: &mut SeededRandomSource,
) -> Result<Vec<LevelStats>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let msz = channel.alphabet_size();
    if msz < 2 || !msz.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(msz));
    }
    let levels = msz.trailing_zeros() as usize;
    let mut acc_q = vec![vec![0.0; n]; levels];
    let mut acc_s = vec![vec![0.0; n]; levels];
    for _ in 0..trials {
        let draws: Vec<ChannelDraw> = (0..n).map(|_| channel.draw(rng)).collect();
        for j in 0..levels {
            let mask = (1usize << j) - 1;
            let x: Vec<u8> = draws.iter().map(|d| ((d.symbol >> j) & 1) as u8).collect();
            let mut v = x.clone();
            transform_in_place(&mut v);
            let llr_q = draws.iter().map(|d| level_llr(&d.quant, j, d.symbol & mask)).collect();
            let llr_s = draws.iter().map(|d| level_llr(&d.side, j, d.symbol & mask)).collect();
            genie_pass(llr_q, &v, &mut acc_q[j]);
            genie_pass(llr_s, &v, &mut acc_s[j]);
        }
    }
    let t = trials as f64;
    (0..levels)
        .map(|j| {
            let clamp = |a: &[f64]| a.iter().map(|h| (h / t).clamp(0.0, 1.0)).collect();
            LevelStats::new(clamp(&acc_q[j]), clamp(&acc_s[j]))
        })
        .collect()
}

fn genie_pass(channel: Vec<f64>, v: &[u8], acc: &mut [f64]) {
    let n = v.len();
    let mut tree = LlrTree::new(channel);
    let mut sums = PartialSums::new(n);
    for phi in 0..n {
        let llr = tree.leaf(phi, &sums);
        let signed = if v[phi] == 0 { llr } else { -llr };
        acc[phi] += softplus(-signed) / LN_2;
        sums.commit(phi, v[phi]);
    }
}
