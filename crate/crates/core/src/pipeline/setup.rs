use super::channels::{ModuloChannel, PlainChannel};
use crate::math::{Mat2, SeededRandomSource, TruncGaussian};
use crate::polar::{
    default_reliability, design_multilevel, estimate_level_stats, MultilevelPolarSpec, ShapedRule,
    TestChannel,
};
use crate::quantizer::{make_alphabet, plain_prior, AskAlphabet, ShapingPosterior};
use crate::region::{corner_params, wz_noise_var, CornerParams, GaussianSourcePair};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// WZ modulo quantization of source 1 against the decoded source 2.
    Case1,
    /// Independent plain quantization and joint linear MMSE.
    Case2,
    /// Case 1 structure with ideal sampling and a genie decoder.
    Ideal,
}

/// Tunable inputs of [`DsCodingConfig::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    pub src: GaussianSourcePair,
    pub r1: f64,
    pub r2: f64,
    pub mode: Mode,
    pub n: usize,
    pub list_size: usize,
    pub m1: usize,
    pub m2: usize,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Interval widths; they override `kappa * M` when set.
    pub width1: Option<f64>,
    pub width2: Option<f64>,
    /// Shaping variances; the defaults come from the rates.
    pub sigma_d1_2: Option<f64>,
    pub sigma_d2_2: Option<f64>,
    /// Variance of `X1 - Y1` assumed by encoder-1 design and decoding.
    pub side_noise_var: Option<f64>,
    /// Cost multiplier of shaping relative to freezing in the code design.
    pub shaped_weight1: f64,
    pub shaped_weight2: f64,
    /// Decoder trust in the encoder's rounding of shaped bits; 1 rounds.
    pub rounding_trust: f64,
    pub design_trials: usize,
    pub design_seed: u64,
    pub seed: u64,
    /// Run encoder 2 modulo `A2` with `Y2 = 0` instead of plain.
    pub enc2_modulo: bool,
    pub reliability: Option<Vec<usize>>,
}

impl PipelineParams {
    /// The published operating point of `mode` for the example source.
    ///
    /// The Case 1 and Case 2 shaping variances are backed off from the
    /// rate-derived values so that the `n = 256` codes can meet the rates.
    pub fn reference(mode: Mode) -> Self {
        let (m1, m2, kappa1, kappa2) = match mode {
            Mode::Case1 => (8, 16, 1.325, 0.442),
            Mode::Case2 => (8, 16, 0.6, 0.442),
            Mode::Ideal => (256, 256, 0.0, 0.0),
        };
        let mut p = Self {
            src: GaussianSourcePair::example(),
            r1: 1.0,
            r2: 2.0,
            mode,
            n: 256,
            list_size: 8,
            m1,
            m2,
            kappa1,
            kappa2,
            width1: None,
            width2: None,
            sigma_d1_2: None,
            sigma_d2_2: None,
            side_noise_var: None,
            shaped_weight1: 1.0,
            shaped_weight2: 1.0,
            rounding_trust: 1.0,
            design_trials: 1000,
            design_seed: 0x5eed,
            seed: 1,
            enc2_modulo: false,
            reliability: None,
        };
        match mode {
            Mode::Case1 => {
                p.sigma_d1_2 = Some(0.4);
                p.sigma_d2_2 = Some(0.25);
                p.shaped_weight1 = 20.0;
                p.shaped_weight2 = 100.0;
                p.rounding_trust = 0.7;
            }
            Mode::Case2 => {
                p.sigma_d1_2 = Some(0.85);
                p.sigma_d2_2 = Some(0.28);
                p.shaped_weight1 = 100.0;
                p.shaped_weight2 = 100.0;
            }
            Mode::Ideal => p.set_ideal_widths(16.0),
        }
        p
    }

    /// Sets `A_l = factor * sigma_{d,l}` from the current shaping variances.
    pub fn set_ideal_widths(&mut self, factor: f64) {
        if let Ok(cp) = corner_params(&self.src, self.r1, self.r2) {
            let s1 = self.sigma_d1_2.unwrap_or(cp.d1);
            let s2 = self.sigma_d2_2.unwrap_or(cp.sigma_d2_2);
            self.width1 = Some(factor * s1.sqrt());
            self.width2 = Some(factor * s2.sqrt());
        }
    }
}

/// One encoder and the matching decoder state.
#[derive(Debug, Clone)]
pub struct EncoderSetup {
    pub alphabet: AskAlphabet,
    pub shaping: TruncGaussian,
    pub gain: f64,
    pub modulo: bool,
    /// Variance of `X - Y` for the modulo decoder.
    pub side_noise_var: f64,
    /// Marginal `P(u)` of a plain encoder.
    pub prior: Option<ShapingPosterior>,
    /// `None` in ideal mode.
    pub polar: Option<MultilevelPolarSpec>,
    pub stream: u64,
}

impl EncoderSetup {
    pub fn sigma_d2(&self) -> f64 {
        self.shaping.sigma_d2()
    }

    /// Variance of the decoder kernel `alpha (X - Y)`.
    pub fn tau2(&self) -> f64 {
        self.gain * self.gain * self.side_noise_var
    }

    fn channel(&self, sigma_x2: f64) -> Box<dyn TestChannel> {
        if self.modulo {
            Box::new(ModuloChannel {
                alphabet: self.alphabet.clone(),
                shaping: self.shaping,
                alpha: self.gain,
                side_var: self.side_noise_var,
            })
        } else {
            Box::new(PlainChannel {
                alphabet: self.alphabet.clone(),
                gain: self.gain,
                sigma_x2,
                sigma_d2: self.sigma_d2(),
                prior: self.prior.clone().expect("plain encoders carry a prior"),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct DsCodingConfig {
    pub src: GaussianSourcePair,
    pub rates: (f64, f64),
    pub mode: Mode,
    pub n: usize,
    pub corner: CornerParams,
    pub encoders: [EncoderSetup; 2],
    /// Linear map from the decoder's `(z1', z2')` or `(u1, u2)` to `x_hat`.
    pub reconstruct: Mat2,
    pub rule: ShapedRule,
    pub seed: u64,
}

impl DsCodingConfig {
    /// Resolves the operating point and designs both polar codes.
    pub fn build(p: &PipelineParams) -> Result<Self> {
        if !p.n.is_power_of_two() || p.n < 2 {
            return Err(Error::NotPowerOfTwo(p.n));
        }
        if !(0.0..=1.0).contains(&p.rounding_trust) {
            return Err(Error::domain(format!(
                "rounding trust must lie in [0, 1], got {}",
                p.rounding_trust
            )));
        }
        let src = &p.src;
        let nominal = corner_params(src, p.r1, p.r2)?;
        let width = |w: Option<f64>, kappa: f64, m: usize| w.unwrap_or(kappa * m as f64);
        let alph1 = make_alphabet(width(p.width1, p.kappa1, p.m1), p.m1)?;
        let alph2 = make_alphabet(width(p.width2, p.kappa2, p.m2), p.m2)?;

        let (corner, enc, reconstruct) = match p.mode {
            Mode::Case1 | Mode::Ideal => {
                let s2 = p.sigma_d2_2.unwrap_or(nominal.sigma_d2_2);
                let s1 = p.sigma_d1_2.unwrap_or(nominal.d1);
                let cp = CornerParams::from_distortions(src, s2, s1)?;
                let e2 = EncoderSetup {
                    shaping: TruncGaussian::new(s2, alph2.width())?,
                    gain: cp.alpha2,
                    modulo: p.enc2_modulo,
                    side_noise_var: src.sigma_x2_2,
                    prior: (!p.enc2_modulo)
                        .then(|| plain_prior(&alph2, cp.alpha2, src.sigma_x2_2, s2)),
                    alphabet: alph2,
                    polar: None,
                    stream: 2,
                };
                let e1 = EncoderSetup {
                    shaping: TruncGaussian::new(s1, alph1.width())?,
                    gain: cp.alpha1,
                    modulo: true,
                    side_noise_var: p.side_noise_var.unwrap_or(cp.sigma_x1_given_u2_2),
                    prior: None,
                    alphabet: alph1,
                    polar: None,
                    stream: 1,
                };
                (cp, [e1, e2], cp.lmmse)
            }
            Mode::Case2 => {
                let target = |s2: f64, r: f64| wz_noise_var(s2, s2 * (-2.0 * r).exp2());
                let s1 = match p.sigma_d1_2 {
                    Some(v) => v,
                    None => target(src.sigma_x1_2, p.r1)?,
                };
                let s2 = match p.sigma_d2_2 {
                    Some(v) => v,
                    None => target(src.sigma_x2_2, p.r2)?,
                };
                let plain = |alph: AskAlphabet, s: f64, sx2: f64, stream| -> Result<EncoderSetup> {
                    Ok(EncoderSetup {
                        shaping: TruncGaussian::new(s, alph.width())?,
                        gain: 1.0,
                        modulo: false,
                        side_noise_var: sx2,
                        prior: Some(plain_prior(&alph, 1.0, sx2, s)),
                        alphabet: alph,
                        polar: None,
                        stream,
                    })
                };
                let e1 = plain(alph1, s1, src.sigma_x1_2, 1)?;
                let e2 = plain(alph2, s2, src.sigma_x2_2, 2)?;
                let qx = src.covariance();
                let qu = qx.add(&Mat2::diag(s1, s2));
                let inv = qu
                    .inverse()
                    .ok_or_else(|| Error::domain("singular observation covariance"))?;
                (nominal, [e1, e2], qx * inv)
            }
        };

        let mut cfg = Self {
            src: *src,
            rates: (p.r1, p.r2),
            mode: p.mode,
            n: p.n,
            corner,
            encoders: enc,
            reconstruct,
            rule: if p.rounding_trust < 1.0 {
                ShapedRule::Blend(p.rounding_trust)
            } else {
                ShapedRule::Round
            },
            seed: p.seed,
        };
        if p.mode != Mode::Ideal {
            let reliability = match &p.reliability {
                Some(r) => r.clone(),
                None => default_reliability(p.n)?,
            };
            let sx2 = [src.sigma_x1_2, src.sigma_x2_2];
            let rates = [p.r1, p.r2];
            let weights = [p.shaped_weight1, p.shaped_weight2];
            for l in 0..2 {
                let e = &cfg.encoders[l];
                let mut ch = e.channel(sx2[l]);
                let mut rng = SeededRandomSource::new(p.design_seed, e.stream);
                let stats = estimate_level_stats(ch.as_mut(), p.n, p.design_trials, &mut rng)?;
                let spec =
                    design_multilevel(&stats, rates[l], p.list_size, weights[l], &reliability)?;
                cfg.encoders[l].polar = Some(spec);
            }
        }
        Ok(cfg)
    }

    pub fn encoder(&self, l: usize) -> &EncoderSetup {
        &self.encoders[l]
    }
}
