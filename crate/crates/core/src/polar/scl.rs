use std::rc::Rc;

use super::design::{BitRole, MultilevelPolarSpec};
use super::sc::{level_llr, log_prob, prob_one, LlrTree, PartialSums};
use crate::math::keyed_uniform;
use crate::quantizer::ShapingPosterior;
use crate::{Error, Result};

/// Per-position symbol pmfs of one block, row-major `n x M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPmfs {
    m: usize,
    data: Vec<f64>,
}

impl SymbolPmfs {
    pub fn new(m: usize, data: Vec<f64>) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(m));
        }
        if !data.len().is_multiple_of(m) {
            return Err(Error::LengthMismatch {
                expected: data.len() / m * m,
                got: data.len(),
            });
        }
        Ok(Self { m, data })
    }

    pub fn from_posteriors(rows: &[ShapingPosterior]) -> Result<Self> {
        let m = rows.first().map(|r| r.pmf().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * m);
        for r in rows {
            if r.pmf().len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: r.pmf().len(),
                });
            }
            data.extend_from_slice(r.pmf());
        }
        Self::new(m, data)
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    fn check(&self, spec: &MultilevelPolarSpec) -> Result<()> {
        if self.m != spec.alphabet_size() {
            return Err(Error::LengthMismatch {
                expected: spec.alphabet_size(),
                got: self.m,
            });
        }
        if self.n() != spec.n() {
            return Err(Error::LengthMismatch {
                expected: spec.n(),
                got: self.n(),
            });
        }
        Ok(())
    }
}

/// Names the shared pseudo-random rounding thresholds of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundingKey {
    pub seed: u64,
    pub stream: u64,
    pub block: u64,
}

impl RoundingKey {
    pub fn threshold(&self, level: usize, index: usize) -> f64 {
        keyed_uniform(&[self.seed, self.stream, self.block, level as u64, index as u64])
    }
}

/// How the decoder treats shaped indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapedRule {
    /// Repeat the encoder's rounding against the decoder posterior.
    Round,
    /// Branch on both values with metric `ln(trust [b == r] + (1 - trust) P(b))`,
    /// where `r` is the rounded value.
    Blend(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizeOutput {
    pub symbols: Vec<usize>,
    pub message: Vec<u8>,
    /// `ln` of the encoder-side path probability.
    pub log_prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub symbols: Vec<usize>,
    pub log_prob: f64,
}

#[derive(Clone, Copy)]
enum Decision {
    Fixed(u8, f64),
    Branch(f64, f64),
}

#[derive(Clone)]
struct Path {
    metric: f64,
    trees: Vec<LlrTree>,
    sums: PartialSums,
    message: Vec<u8>,
    symbols: Rc<Vec<usize>>,
}

/// Shaped multilevel SCL quantization.
///
/// `quant` holds `P(u | x')` per position. Shaped bits are rounded with the
/// shared threshold against `reference` when it is given (a posterior the
/// decoder can compute exactly), otherwise against `quant`. The path metric
/// is the encoder-side log-probability of all decisions.
pub fn scl_quantize(
    quant: &SymbolPmfs,
    reference: Option<&SymbolPmfs>,
    spec: &MultilevelPolarSpec,
    key: &RoundingKey,
) -> Result<QuantizeOutput> {
    quant.check(spec)?;
    let mut sources = vec![quant];
    if let Some(r) = reference {
        r.check(spec)?;
        sources.push(r);
    }
    let paths = run_levels(&sources, spec, |level, phi, role, llrs, _| {
        let lq = llrs[0];
        match role {
            BitRole::Frozen => Decision::Fixed(0, log_prob(lq, 0)),
            BitRole::Info => Decision::Branch(log_prob(lq, 0), log_prob(lq, 1)),
            BitRole::Shaped => {
                let lr = *llrs.last().unwrap();
                let b = u8::from(key.threshold(level, phi) < prob_one(lr));
                Decision::Fixed(b, log_prob(lq, b))
            }
        }
    }, true);
    let best = best_path(paths);
    Ok(QuantizeOutput {
        symbols: best.symbols.to_vec(),
        message: best.message,
        log_prob: best.metric,
    })
}

/// Multilevel SCL decoding against side-information pmfs with the
/// transmitted bits pinned to `message`.
pub fn scl_decode(
    side: &SymbolPmfs,
    message: &[u8],
    spec: &MultilevelPolarSpec,
    key: &RoundingKey,
    rule: ShapedRule,
) -> Result<DecodeOutput> {
    side.check(spec)?;
    if message.len() != spec.message_len() {
        return Err(Error::LengthMismatch {
            expected: spec.message_len(),
            got: message.len(),
        });
    }
    // offset of each level's first message bit
    let mut offsets = Vec::with_capacity(spec.levels().len());
    let mut acc = 0;
    for l in spec.levels() {
        offsets.push(acc);
        acc += l.count(BitRole::Info);
    }
    let paths = run_levels(&[side], spec, |level, phi, role, llrs, pos| {
        let ls = llrs[0];
        match role {
            BitRole::Frozen => Decision::Fixed(0, log_prob(ls, 0)),
            BitRole::Info => {
                let b = message[offsets[level] + pos] & 1;
                Decision::Fixed(b, log_prob(ls, b))
            }
            BitRole::Shaped => {
                let r = u8::from(key.threshold(level, phi) < prob_one(ls));
                match rule {
                    ShapedRule::Blend(trust) if trust < 1.0 => {
                        let m = |b: u8| {
                            let hit = if b == r { trust } else { 0.0 };
                            (hit + (1.0 - trust) * log_prob(ls, b).exp()).ln()
                        };
                        Decision::Branch(m(0), m(1))
                    }
                    _ => Decision::Fixed(r, log_prob(ls, r)),
                }
            }
        }
    }, false);
    let best = best_path(paths);
    Ok(DecodeOutput {
        symbols: best.symbols.to_vec(),
        log_prob: best.metric,
    })
}

fn best_path(paths: Vec<Path>) -> Path {
    let mut best = 0;
    for (i, p) in paths.iter().enumerate() {
        if p.metric > paths[best].metric {
            best = i;
        }
    }
    paths.into_iter().nth(best).expect("list is never empty")
}

/// Runs all levels. `decide(level, phi, role, leaf_llrs, info_pos)` picks
/// the action at each leaf; `info_pos` counts earlier info indices of the
/// level. When `record` is set, info decisions are appended to the path
/// message.
fn run_levels<F>(
    sources: &[&SymbolPmfs],
    spec: &MultilevelPolarSpec,
    decide: F,
    record: bool,
) -> Vec<Path>
where
    F: Fn(usize, usize, BitRole, &[f64], usize) -> Decision,
{
    let n = spec.n();
    let list = spec.list_size();
    let mut paths = vec![Path {
        metric: 0.0,
        trees: Vec::new(),
        sums: PartialSums::new(n),
        message: Vec::new(),
        symbols: Rc::new(vec![0; n]),
    }];
    let mut llrs = vec![0.0; sources.len()];
    let mut cand: Vec<(f64, usize, u8)> = Vec::with_capacity(2 * list);

    for (level, lspec) in spec.levels().iter().enumerate() {
        let mask = (1usize << level) - 1;
        for p in paths.iter_mut() {
            p.trees = sources
                .iter()
                .map(|s| {
                    let ch = (0..n).map(|i| level_llr(s.row(i), level, p.symbols[i] & mask)).collect();
                    LlrTree::new(ch)
                })
                .collect();
            p.sums = PartialSums::new(n);
        }
        let mut info_pos = 0;
        for phi in 0..n {
            let role = lspec.role(phi);
            cand.clear();
            for (idx, p) in paths.iter_mut().enumerate() {
                for (t, slot) in p.trees.iter_mut().zip(llrs.iter_mut()) {
                    *slot = t.leaf(phi, &p.sums);
                }
                match decide(level, phi, role, &llrs, info_pos) {
                    Decision::Fixed(b, d) => cand.push((p.metric + d, idx, b)),
                    Decision::Branch(d0, d1) => {
                        cand.push((p.metric + d0, idx, 0));
                        cand.push((p.metric + d1, idx, 1));
                    }
                }
            }
            if cand.len() > list {
                cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
                cand.truncate(list);
                cand.sort_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)));
            }
            let mut uses = vec![0usize; paths.len()];
            cand.iter().for_each(|c| uses[c.1] += 1);
            let mut slots: Vec<Option<Path>> = paths.into_iter().map(Some).collect();
            paths = Vec::with_capacity(cand.len());
            for &(metric, idx, bit) in &cand {
                uses[idx] -= 1;
                let mut p = if uses[idx] == 0 {
                    slots[idx].take().expect("each path is moved once")
                } else {
                    slots[idx].as_ref().expect("path still present").clone()
                };
                p.metric = metric;
                if record && role == BitRole::Info {
                    p.message.push(bit);
                }
                p.sums.commit(phi, bit);
                paths.push(p);
            }
            if role == BitRole::Info {
                info_pos += 1;
            }
        }
        for p in paths.iter_mut() {
            let cw = p.sums.codeword().to_vec();
            let syms = Rc::make_mut(&mut p.symbols);
            for (s, &b) in syms.iter_mut().zip(&cw) {
                *s |= (b as usize) << level;
            }
        }
    }
    paths
}
