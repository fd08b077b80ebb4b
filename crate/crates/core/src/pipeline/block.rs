use super::setup::{DsCodingConfig, EncoderSetup, Mode};
use crate::math::SeededRandomSource;
use crate::polar::{scl_decode, scl_quantize, RoundingKey, ShapedRule, SymbolPmfs};
use crate::quantizer::{
    dither_and_wrap, ideal_quantize, plain_posterior, shaping_posterior, wz_side_posterior,
    DitherTrack, ShapingPosterior,
};
use crate::region::{GaussianSourcePair, WrapStats};
use crate::{Error, Result};

const SOURCE: u64 = 0;
const DITHER: u64 = 1;
const SAMPLER: u64 = 3;

fn stream(block: u64, purpose: u64) -> u64 {
    block * 8 + purpose
}

/// One block of the two correlated sources.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceBlock {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl SourceBlock {
    pub fn draw(src: &GaussianSourcePair, n: usize, rng: &mut SeededRandomSource) -> Self {
        let b = src.rho * src.sigma1() / src.sigma2();
        let res = src.sigma_x1_2 * (1.0 - src.rho * src.rho);
        let mut x1 = Vec::with_capacity(n);
        let mut x2 = Vec::with_capacity(n);
        for _ in 0..n {
            let v = rng.normal(src.sigma_x2_2);
            x2.push(v);
            x1.push(b * v + rng.normal(res));
        }
        Self { x1, x2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderOutput {
    pub message: Vec<u8>,
    pub symbols: Vec<usize>,
    /// `x'` for a modulo encoder, `gain x` for a plain one.
    pub scaled: Vec<f64>,
}

/// Per-block outcome and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockResult {
    pub block: u64,
    pub delta1: f64,
    pub delta2: f64,
    pub bits1: usize,
    pub bits2: usize,
    /// Symbols whose unreduced `Z'` left the interval (modulo encoders) or
    /// whose scaled input overloaded the alphabet (plain encoders).
    pub wraps1: usize,
    pub wraps2: usize,
    /// Whether the decoder recovered the encoder's symbols.
    pub decoded1: bool,
    pub decoded2: bool,
}

fn dithers(cfg: &DsCodingConfig, l: usize, block: u64) -> Vec<f64> {
    let e = cfg.encoder(l);
    let mut rng = SeededRandomSource::new(cfg.seed, stream(block, DITHER + l as u64));
    DitherTrack::draw(cfg.n, e.alphabet.interval(), &mut rng).values
}

fn key(cfg: &DsCodingConfig, e: &EncoderSetup, block: u64) -> RoundingKey {
    RoundingKey {
        seed: cfg.seed,
        stream: e.stream,
        block,
    }
}

fn encoder_pmfs(e: &EncoderSetup, x: &[f64], d: &[f64]) -> (Vec<f64>, Vec<ShapingPosterior>) {
    let iv = e.alphabet.interval();
    x.iter()
        .zip(d)
        .map(|(&x, &d)| {
            if e.modulo {
                let xp = dither_and_wrap(x, e.gain, d, iv);
                (xp, shaping_posterior(xp, &e.alphabet, &e.shaping))
            } else {
                let gx = e.gain * x;
                (gx, plain_posterior(gx, &e.alphabet, e.sigma_d2()))
            }
        })
        .unzip()
}

fn prior_pmfs(e: &EncoderSetup, n: usize) -> Result<SymbolPmfs> {
    let prior = e
        .prior
        .as_ref()
        .ok_or_else(|| Error::domain("plain encoder without a prior"))?;
    SymbolPmfs::new(prior.pmf().len(), prior.pmf().repeat(n))
}

fn encode(
    cfg: &DsCodingConfig,
    e: &EncoderSetup,
    x: &[f64],
    d: &[f64],
    block: u64,
) -> Result<EncoderOutput> {
    if x.len() != cfg.n {
        return Err(Error::LengthMismatch {
            expected: cfg.n,
            got: x.len(),
        });
    }
    let (scaled, post) = encoder_pmfs(e, x, d);
    match &e.polar {
        Some(spec) => {
            let quant = SymbolPmfs::from_posteriors(&post)?;
            let reference = if e.modulo {
                None
            } else {
                Some(prior_pmfs(e, cfg.n)?)
            };
            let out = scl_quantize(&quant, reference.as_ref(), spec, &key(cfg, e, block))?;
            Ok(EncoderOutput {
                message: out.message,
                symbols: out.symbols,
                scaled,
            })
        }
        None => {
            let mut rng = SeededRandomSource::new(cfg.seed, stream(block, SAMPLER) + e.stream);
            let symbols = post.iter().map(|p| ideal_quantize(p, &mut rng)).collect();
            Ok(EncoderOutput {
                message: Vec::new(),
                symbols,
                scaled,
            })
        }
    }
}

fn decode(
    cfg: &DsCodingConfig,
    e: &EncoderSetup,
    side: &SymbolPmfs,
    message: &[u8],
    rule: ShapedRule,
    block: u64,
) -> Result<Vec<usize>> {
    let spec = e
        .polar
        .as_ref()
        .ok_or_else(|| Error::domain("ideal encoders have no message to decode"))?;
    Ok(scl_decode(side, message, spec, &key(cfg, e, block), rule)?.symbols)
}

/// Encoder 2 at full rate `R2`. Returns its message, symbols and `z2'`.
pub fn encode2(
    cfg: &DsCodingConfig,
    x2: &[f64],
    block: u64,
) -> Result<(EncoderOutput, Vec<f64>)> {
    let e = cfg.encoder(1);
    let d = dithers(cfg, 1, block);
    let out = encode(cfg, e, x2, &d, block)?;
    let z = z2_prime(e, &out.symbols, &d);
    Ok((out, z))
}

fn z2_prime(e: &EncoderSetup, u: &[usize], d: &[f64]) -> Vec<f64> {
    let iv = e.alphabet.interval();
    u.iter()
        .zip(d)
        .map(|(&k, &d)| {
            let u = e.alphabet.point(k);
            if e.modulo {
                iv.wrap(u - d)
            } else {
                u
            }
        })
        .collect()
}

/// `y1 = gamma1 z2'`.
pub fn side_info_y1(z2_prime: &[f64], gamma1: f64) -> Vec<f64> {
    z2_prime.iter().map(|z| gamma1 * z).collect()
}

/// Encoder 1: Wyner-Ziv modulo quantization in Case 1, plain in Case 2.
pub fn encode1_wz(cfg: &DsCodingConfig, x1: &[f64], block: u64) -> Result<EncoderOutput> {
    let d = dithers(cfg, 0, block);
    encode(cfg, cfg.encoder(0), x1, &d, block)
}

/// Decoder-side quantities of one Case-1 block.
#[derive(Debug, Clone, PartialEq)]
pub struct Case1Decoded {
    pub u1: Vec<usize>,
    pub u2: Vec<usize>,
    pub y1_prime: Vec<f64>,
    pub z1_prime: Vec<f64>,
    pub z2_prime: Vec<f64>,
    pub x1_hat: Vec<f64>,
    pub x2_hat: Vec<f64>,
}

/// Successive decoding: `u2` from `w2`, then `u1` from `w1` against
/// `y1' = (alpha1 gamma1 z2' + d1) mod A1`, then the linear reconstruction.
pub fn decode_case1(
    cfg: &DsCodingConfig,
    w1: &[u8],
    w2: &[u8],
    block: u64,
) -> Result<Case1Decoded> {
    let e2 = cfg.encoder(1);
    let d2 = dithers(cfg, 1, block);
    let u2 = if e2.modulo {
        let side = wz_side_pmfs(e2, &d2)?;
        decode(cfg, e2, &side, w2, cfg.rule, block)?
    } else {
        decode(cfg, e2, &prior_pmfs(e2, cfg.n)?, w2, ShapedRule::Round, block)?
    };
    let d1 = dithers(cfg, 0, block);
    let (y1_prime, _) = side_prime(cfg, &z2_prime(e2, &u2, &d2), &d1);
    let e1 = cfg.encoder(0);
    let side = wz_side_pmfs(e1, &y1_prime)?;
    let u1 = decode(cfg, e1, &side, w1, cfg.rule, block)?;
    Ok(reconstruct_case1(cfg, u1, u2, &d1, &d2))
}

fn side_prime(cfg: &DsCodingConfig, z2p: &[f64], d1: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let e1 = cfg.encoder(0);
    let iv = e1.alphabet.interval();
    let y1 = side_info_y1(z2p, cfg.corner.gamma1);
    let yp = y1
        .iter()
        .zip(d1)
        .map(|(&y, &d)| dither_and_wrap(y, e1.gain, d, iv))
        .collect();
    (yp, y1)
}

fn wz_side_pmfs(e: &EncoderSetup, y_prime: &[f64]) -> Result<SymbolPmfs> {
    let rows: Vec<ShapingPosterior> = y_prime
        .iter()
        .map(|&y| wz_side_posterior(y, &e.alphabet, &e.shaping, e.tau2()))
        .collect();
    SymbolPmfs::from_posteriors(&rows)
}

fn reconstruct_case1(
    cfg: &DsCodingConfig,
    u1: Vec<usize>,
    u2: Vec<usize>,
    d1: &[f64],
    d2: &[f64],
) -> Case1Decoded {
    let (e1, e2) = (cfg.encoder(0), cfg.encoder(1));
    let z2p = z2_prime(e2, &u2, d2);
    let (y1_prime, _) = side_prime(cfg, &z2p, d1);
    let iv = e1.alphabet.interval();
    let z1p: Vec<f64> = u1
        .iter()
        .zip(&y1_prime)
        .map(|(&k, &y)| iv.wrap(e1.alphabet.point(k) - y))
        .collect();
    let (x1_hat, x2_hat) = z1p
        .iter()
        .zip(&z2p)
        .map(|(&a, &b)| {
            let v = cfg.reconstruct.apply([a, b]);
            (v[0], v[1])
        })
        .unzip();
    Case1Decoded {
        u1,
        u2,
        y1_prime,
        z1_prime: z1p,
        z2_prime: z2p,
        x1_hat,
        x2_hat,
    }
}

/// `(x1_hat, x2_hat, encoder outputs, decoded symbols)` of a Case 2 block.
pub type Case2Output = (Vec<f64>, Vec<f64>, [EncoderOutput; 2], [Vec<usize>; 2]);

/// Case 2: both sources quantized without modulo, decoded from their
/// priors, and reconstructed by `E[X | U1, U2]` under the Gaussian model.
pub fn encode_decode_case2(cfg: &DsCodingConfig, x: &SourceBlock, block: u64) -> Result<Case2Output> {
    let zero = vec![0.0; cfg.n];
    let mut outs = Vec::with_capacity(2);
    let mut decoded = Vec::with_capacity(2);
    for (l, xl) in [&x.x1, &x.x2].into_iter().enumerate() {
        let e = cfg.encoder(l);
        let out = encode(cfg, e, xl, &zero, block)?;
        let u = match &e.polar {
            Some(_) => decode(cfg, e, &prior_pmfs(e, cfg.n)?, &out.message, ShapedRule::Round, block)?,
            None => out.symbols.clone(),
        };
        outs.push(out);
        decoded.push(u);
    }
    let (e1, e2) = (cfg.encoder(0), cfg.encoder(1));
    let (xh1, xh2) = decoded[0]
        .iter()
        .zip(&decoded[1])
        .map(|(&a, &b)| {
            let v = cfg
                .reconstruct
                .apply([e1.alphabet.point(a), e2.alphabet.point(b)]);
            (v[0], v[1])
        })
        .unzip();
    let outs: [EncoderOutput; 2] = outs.try_into().expect("two encoders");
    let decoded: [Vec<usize>; 2] = decoded.try_into().expect("two encoders");
    Ok((xh1, xh2, outs, decoded))
}

/// `(1/n) sum (x_i - x_hat_i)^2`.
pub fn block_distortion(x: &[f64], x_hat: &[f64]) -> Result<f64> {
    if x.len() != x_hat.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: x_hat.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::domain("empty block"));
    }
    let s: f64 = x.iter().zip(x_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(s / x.len() as f64)
}

fn overloads(e: &EncoderSetup, scaled: &[f64]) -> usize {
    let h = e.alphabet.interval().half();
    scaled.iter().filter(|v| v.abs() >= h).count()
}

/// Wrap integers of the unreduced `Z1' = Z1~ + alpha1 (X1 - Y1)` and
/// `Z2' = Z2~ + alpha2 X2` of a modulo encoder.
fn wrap_integers(
    e: &EncoderSetup,
    u: &[usize],
    scaled: &[f64],
    offset: impl Iterator<Item = f64>,
) -> Vec<i64> {
    let iv = e.alphabet.interval();
    u.iter()
        .zip(scaled)
        .zip(offset)
        .map(|((&k, &xp), off)| {
            let zt = iv.wrap(e.alphabet.point(k) - xp);
            iv.reduce(zt + off).map(|r| r.1).unwrap_or(0)
        })
        .collect()
}

/// Runs one block of the configured mode.
pub fn run_block(cfg: &DsCodingConfig, block: u64) -> Result<BlockResult> {
    let mut rng = SeededRandomSource::new(cfg.seed, stream(block, SOURCE));
    let x = SourceBlock::draw(&cfg.src, cfg.n, &mut rng);
    match cfg.mode {
        Mode::Case2 => {
            let (xh1, xh2, outs, dec) = encode_decode_case2(cfg, &x, block)?;
            Ok(BlockResult {
                block,
                delta1: block_distortion(&x.x1, &xh1)?,
                delta2: block_distortion(&x.x2, &xh2)?,
                bits1: outs[0].message.len(),
                bits2: outs[1].message.len(),
                wraps1: overloads(cfg.encoder(0), &outs[0].scaled),
                wraps2: overloads(cfg.encoder(1), &outs[1].scaled),
                decoded1: dec[0] == outs[0].symbols,
                decoded2: dec[1] == outs[1].symbols,
            })
        }
        Mode::Case1 | Mode::Ideal => {
            let (o2, _) = encode2(cfg, &x.x2, block)?;
            let o1 = encode1_wz(cfg, &x.x1, block)?;
            let dec = if cfg.mode == Mode::Ideal {
                let d1 = dithers(cfg, 0, block);
                let d2 = dithers(cfg, 1, block);
                reconstruct_case1(cfg, o1.symbols.clone(), o2.symbols.clone(), &d1, &d2)
            } else {
                decode_case1(cfg, &o1.message, &o2.message, block)?
            };
            let (e1, e2) = (cfg.encoder(0), cfg.encoder(1));
            let wraps2 = if e2.modulo {
                let w = wrap_integers(e2, &o2.symbols, &o2.scaled, x.x2.iter().map(|&v| e2.gain * v));
                w.iter().filter(|&&k| k != 0).count()
            } else {
                overloads(e2, &o2.scaled)
            };
            let y1 = side_info_y1(&dec.z2_prime, cfg.corner.gamma1);
            let off = x.x1.iter().zip(&y1).map(|(a, b)| e1.gain * (a - b));
            let wraps1 = wrap_integers(e1, &dec.u1, &o1.scaled, off)
                .iter()
                .filter(|&&k| k != 0)
                .count();
            Ok(BlockResult {
                block,
                delta1: block_distortion(&x.x1, &dec.x1_hat)?,
                delta2: block_distortion(&x.x2, &dec.x2_hat)?,
                bits1: o1.message.len(),
                bits2: o2.message.len(),
                wraps1,
                wraps2,
                decoded1: dec.u1 == o1.symbols,
                decoded2: dec.u2 == o2.symbols,
            })
        }
    }
}

/// Monte Carlo estimate of `E[I1 Z1]` and `E[X1 I2]` with the ideal
/// sampler in place of the polar codes, over `blocks` blocks.
pub fn estimate_wrap_stats(cfg: &DsCodingConfig, blocks: u64) -> Result<WrapStats> {
    if cfg.mode == Mode::Case2 {
        return Err(Error::domain("wrap statistics need the modulo scheme"));
    }
    let mut ideal = cfg.clone();
    ideal.mode = Mode::Ideal;
    for e in &mut ideal.encoders {
        e.polar = None;
    }
    let (e1, e2) = (ideal.encoder(0), ideal.encoder(1));
    let (mut s1, mut s2, mut count) = (0.0, 0.0, 0usize);
    for block in 0..blocks {
        let mut rng = SeededRandomSource::new(ideal.seed, stream(block, SOURCE));
        let x = SourceBlock::draw(&ideal.src, ideal.n, &mut rng);
        let (o2, z2p) = encode2(&ideal, &x.x2, block)?;
        let o1 = encode1_wz(&ideal, &x.x1, block)?;
        let i2 = if e2.modulo {
            wrap_integers(e2, &o2.symbols, &o2.scaled, x.x2.iter().map(|&v| e2.gain * v))
        } else {
            vec![0; ideal.n]
        };
        let y1 = side_info_y1(&z2p, ideal.corner.gamma1);
        let z1: Vec<f64> = x.x1.iter().zip(&y1).map(|(a, b)| a - b).collect();
        let i1 = wrap_integers(e1, &o1.symbols, &o1.scaled, z1.iter().map(|&z| e1.gain * z));
        for i in 0..ideal.n {
            s1 += i1[i] as f64 * z1[i];
            s2 += x.x1[i] * i2[i] as f64;
        }
        count += ideal.n;
    }
    Ok(WrapStats {
        e_i1_z1: s1 / count as f64,
        e_x1_i2: s2 / count as f64,
    })
}
