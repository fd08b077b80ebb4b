use super::reliability::ranks;
use super::stats::LevelStats;
use crate::{Error, Result};

/// Role of a polar input index within one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitRole {
    /// Fixed to 0 at both ends. These are the indices the source hardly
    /// determines, so fixing them costs little distortion.
    Frozen,
    /// Chosen by the encoder's list search and transmitted.
    Info,
    /// Chosen by the encoder through shared randomized rounding and not
    /// transmitted; the decoder infers them from its own posterior.
    Shaped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarLevelSpec {
    roles: Vec<BitRole>,
    /// Indices ordered from least to most reliable for quantization.
    reliability_order: Vec<usize>,
}

impl PolarLevelSpec {
    pub fn from_roles(roles: Vec<BitRole>, reliability_order: Vec<usize>) -> Result<Self> {
        let n = roles.len();
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if reliability_order.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: reliability_order.len(),
            });
        }
        Ok(Self {
            roles,
            reliability_order,
        })
    }

    pub fn n(&self) -> usize {
        self.roles.len()
    }

    pub fn role(&self, i: usize) -> BitRole {
        self.roles[i]
    }

    pub fn roles(&self) -> &[BitRole] {
        &self.roles
    }

    pub fn reliability_order(&self) -> &[usize] {
        &self.reliability_order
    }

    pub fn indices(&self, role: BitRole) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.roles[i] == role).collect()
    }

    pub fn frozen(&self) -> Vec<usize> {
        self.indices(BitRole::Frozen)
    }

    pub fn info(&self) -> Vec<usize> {
        self.indices(BitRole::Info)
    }

    pub fn shaped(&self) -> Vec<usize> {
        self.indices(BitRole::Shaped)
    }

    pub fn count(&self, role: BitRole) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    pub fn counts(&self) -> LevelCounts {
        LevelCounts {
            frozen: self.count(BitRole::Frozen),
            info: self.count(BitRole::Info),
            shaped: self.count(BitRole::Shaped),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultilevelPolarSpec {
    levels: Vec<PolarLevelSpec>,
    list_size: usize,
    total_rate: f64,
}

impl MultilevelPolarSpec {
    /// Levels are ordered least significant first.
    pub fn new(levels: Vec<PolarLevelSpec>, list_size: usize) -> Result<Self> {
        let Some(first) = levels.first() else {
            return Err(Error::domain("at least one level is required"));
        };
        let n = first.n();
        if let Some(bad) = levels.iter().find(|l| l.n() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: bad.n(),
            });
        }
        if list_size == 0 {
            return Err(Error::domain("list size must be at least 1"));
        }
        let info: usize = levels.iter().map(|l| l.count(BitRole::Info)).sum();
        Ok(Self {
            total_rate: info as f64 / n as f64,
            levels,
            list_size,
        })
    }

    pub fn levels(&self) -> &[PolarLevelSpec] {
        &self.levels
    }

    pub fn n(&self) -> usize {
        self.levels[0].n()
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn with_list_size(&self, list_size: usize) -> Result<Self> {
        Self::new(self.levels.clone(), list_size)
    }

    /// Transmitted bits per source symbol.
    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    /// Alphabet size `2^levels`.
    pub fn alphabet_size(&self) -> usize {
        1 << self.levels.len()
    }

    pub fn message_len(&self) -> usize {
        self.levels.iter().map(|l| l.count(BitRole::Info)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelCounts {
    pub frozen: usize,
    pub info: usize,
    pub shaped: usize,
}

/// Assigns roles from per-index entropies.
///
/// The `counts.frozen` indices with the largest quantization entropy are
/// frozen. Of the rest, the `counts.info` indices with the largest
/// side-information entropy carry the message and the remainder is shaped.
/// Ties fall back to the reliability order.
pub fn design_level_counts(
    stats: &LevelStats,
    counts: LevelCounts,
    reliability: &[usize],
) -> Result<PolarLevelSpec> {
    let n = stats.n();
    if reliability.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: reliability.len(),
        });
    }
    if counts.frozen + counts.info + counts.shaped != n {
        return Err(Error::domain(format!(
            "role counts {counts:?} do not partition {n} indices"
        )));
    }
    let rank = ranks(reliability);
    let by_desc = |h: &[f64], idx: &mut Vec<usize>| {
        idx.sort_by(|&a, &b| h[b].total_cmp(&h[a]).then(rank[a].cmp(&rank[b])));
    };
    let mut order: Vec<usize> = (0..n).collect();
    by_desc(&stats.h_quant, &mut order);
    let mut roles = vec![BitRole::Shaped; n];
    for &i in &order[..counts.frozen] {
        roles[i] = BitRole::Frozen;
    }
    let mut rest: Vec<usize> = order[counts.frozen..].to_vec();
    by_desc(&stats.h_side, &mut rest);
    for &i in &rest[..counts.info] {
        roles[i] = BitRole::Info;
    }
    PolarLevelSpec::from_roles(roles, order)
}

/// Rate form of [`design_level_counts`]: `rate_q` is the fraction of
/// non-frozen indices and `rate_t` the transmitted fraction.
pub fn design_level_sets(
    stats: &LevelStats,
    rate_q: f64,
    rate_t: f64,
    reliability: &[usize],
) -> Result<PolarLevelSpec> {
    if !(0.0..=1.0).contains(&rate_q) || !(0.0..=rate_q).contains(&rate_t) {
        return Err(Error::domain(format!(
            "need 0 <= transmitted rate {rate_t} <= quantization rate {rate_q} <= 1"
        )));
    }
    let n = stats.n();
    let frozen = ((n as f64 * (1.0 - rate_q)) - 1e-9).ceil().max(0.0) as usize;
    let info = ((n as f64 * rate_t).round() as usize).min(n - frozen);
    design_level_counts(
        stats,
        LevelCounts {
            frozen,
            info,
            shaped: n - frozen - info,
        },
        reliability,
    )
}

/// Cost of fixing index `i` without looking at the source, and the role
/// that achieves it: freezing costs `1 - H_q`, shaping costs
/// `shaped_weight (H_s - H_q)`.
fn fixing_cost(stats: &LevelStats, i: usize, shaped_weight: f64) -> (f64, BitRole) {
    let hq = stats.h_quant[i];
    let freeze = (1.0 - hq).max(0.0);
    let shape = shaped_weight * (stats.h_side[i] - hq).max(0.0);
    if freeze <= shape {
        (freeze, BitRole::Frozen)
    } else {
        (shape, BitRole::Shaped)
    }
}

/// Joint role assignment over all levels.
///
/// Every index not carrying the message is either frozen or shaped,
/// whichever is cheaper by [`fixing_cost`]. The `total_bits` indices with
/// the largest fixing cost, across levels, carry the message. Ties fall
/// back to the lower level, then to the reliability order.
pub fn design_joint(
    stats: &[LevelStats],
    total_bits: usize,
    shaped_weight: f64,
    reliability: &[usize],
) -> Result<Vec<PolarLevelSpec>> {
    let Some(first) = stats.first() else {
        return Err(Error::domain("no levels"));
    };
    let n = first.n();
    if let Some(bad) = stats.iter().find(|s| s.n() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: bad.n(),
        });
    }
    if reliability.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: reliability.len(),
        });
    }
    if total_bits > n * stats.len() {
        return Err(Error::domain(format!(
            "{total_bits} message bits exceed {} levels of length {n}",
            stats.len()
        )));
    }
    if shaped_weight.is_nan() || shaped_weight < 0.0 {
        return Err(Error::domain(format!(
            "shaped weight must be nonnegative, got {shaped_weight}"
        )));
    }
    let rank = ranks(reliability);
    let mut roles = Vec::with_capacity(stats.len());
    let mut cand = Vec::with_capacity(n * stats.len());
    for (j, s) in stats.iter().enumerate() {
        let mut r = Vec::with_capacity(n);
        for i in 0..n {
            let (cost, role) = fixing_cost(s, i, shaped_weight);
            r.push(role);
            cand.push((cost, j, i));
        }
        roles.push(r);
    }
    cand.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then(rank[a.2].cmp(&rank[b.2]))
    });
    for &(_, j, i) in &cand[..total_bits] {
        roles[j][i] = BitRole::Info;
    }
    stats
        .iter()
        .zip(roles)
        .map(|(s, r)| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| s.h_quant[b].total_cmp(&s.h_quant[a]).then(rank[a].cmp(&rank[b])));
            PolarLevelSpec::from_roles(r, order)
        })
        .collect()
}

/// Full multilevel design from per-level statistics.
pub fn design_multilevel(
    stats: &[LevelStats],
    total_rate: f64,
    list_size: usize,
    shaped_weight: f64,
    reliability: &[usize],
) -> Result<MultilevelPolarSpec> {
    let n = stats.first().map(LevelStats::n).unwrap_or(0);
    let bits = (total_rate * n as f64).round();
    if bits.is_nan() || bits < 0.0 {
        return Err(Error::domain(format!("invalid rate {total_rate}")));
    }
    let levels = design_joint(stats, bits as usize, shaped_weight, reliability)?;
    MultilevelPolarSpec::new(levels, list_size)
}
