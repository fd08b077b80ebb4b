//! Scalar M-ASK quantization on a modulo interval.
//!
//! Besides the alphabet and the posteriors consumed by the polar engine,
//! this module holds an ideal quantizer that samples `U` directly from
//! `P(u | x')`. It realizes the shaping distribution exactly, without any
//! code, and serves as a statistical reference for the polar quantizers.

mod rate;

pub use rate::estimate_wz_rate;

use crate::math::{normal_cdf, quad, ModInterval, SeededRandomSource, TruncGaussian};
use crate::{Error, Result};

/// `M` equally spaced points `-A/2 + (k + 1/2) kappa` on `[-A/2, A/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AskAlphabet {
    interval: ModInterval,
    kappa: f64,
    points: Vec<f64>,
}

pub fn make_alphabet(width: f64, m: usize) -> Result<AskAlphabet> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    let interval = ModInterval::new(width)?;
    let kappa = width / m as f64;
    let points = (0..m)
        .map(|k| -0.5 * width + (k as f64 + 0.5) * kappa)
        .collect();
    Ok(AskAlphabet {
        interval,
        kappa,
        points,
    })
}

impl AskAlphabet {
    /// Alphabet with spacing `kappa`, so `A = kappa M`.
    pub fn from_spacing(kappa: f64, m: usize) -> Result<Self> {
        make_alphabet(kappa * m as f64, m)
    }

    pub fn width(&self) -> f64 {
        self.interval.width()
    }

    pub fn interval(&self) -> ModInterval {
        self.interval
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Number of binary levels, `log2 M`.
    pub fn levels(&self) -> usize {
        self.points.len().trailing_zeros() as usize
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, k: usize) -> f64 {
        self.points[k]
    }

    /// Index of the point closest to `x` on the circle.
    pub fn nearest_index(&self, x: f64) -> usize {
        let z = self.interval.wrap(x) + 0.5 * self.width();
        ((z / self.kappa).floor() as usize).min(self.size() - 1)
    }
}

/// Selection distribution over the alphabet indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapingPosterior {
    pmf: Vec<f64>,
}

impl ShapingPosterior {
    /// Normalizes nonnegative weights. An all-zero input becomes uniform.
    pub fn from_weights(mut w: Vec<f64>) -> Self {
        let s: f64 = w.iter().sum();
        if s > 0.0 && s.is_finite() {
            w.iter_mut().for_each(|p| *p /= s);
        } else {
            let u = 1.0 / w.len() as f64;
            w.iter_mut().for_each(|p| *p = u);
        }
        Self { pmf: w }
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn into_pmf(self) -> Vec<f64> {
        self.pmf
    }
}

/// Shared dither values, uniform on the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DitherTrack {
    pub values: Vec<f64>,
}

impl DitherTrack {
    pub fn draw(n: usize, interval: ModInterval, rng: &mut SeededRandomSource) -> Self {
        let h = interval.half();
        Self {
            values: (0..n).map(|_| rng.uniform_range(-h, h)).collect(),
        }
    }
}

/// `(alpha x + d) mod A`.
pub fn dither_and_wrap(x: f64, alpha: f64, d: f64, interval: ModInterval) -> f64 {
    interval.wrap(alpha * x + d)
}

/// `P(u | x') ∝ q((u - x') mod A)`.
pub fn shaping_posterior(x_prime: f64, alph: &AskAlphabet, tg: &TruncGaussian) -> ShapingPosterior {
    let iv = alph.interval();
    let e: Vec<f64> = alph
        .points()
        .iter()
        .map(|&u| {
            let z = iv.wrap(u - x_prime);
            z * z / (2.0 * tg.sigma_d2())
        })
        .collect();
    let lo = e.iter().cloned().fold(f64::INFINITY, f64::min);
    ShapingPosterior::from_weights(e.into_iter().map(|v| (lo - v).exp()).collect())
}

/// Posterior of PCQ without modulo: `P(u | x) ∝ exp(-(u - x)^2 / (2 sigma_d^2))`
/// over the plain alphabet. The caller applies any gain to `x`.
pub fn plain_posterior(x: f64, alph: &AskAlphabet, sigma_d2: f64) -> ShapingPosterior {
    let w = alph
        .points()
        .iter()
        .map(|&u| (u - x) * (u - x) / (2.0 * sigma_d2))
        .collect::<Vec<_>>();
    let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
    ShapingPosterior::from_weights(w.into_iter().map(|e| (lo - e).exp()).collect())
}

/// Marginal `P(u)` of plain PCQ for `X ~ N(0, sigma_x2)` scaled by `gain`.
pub fn plain_prior(alph: &AskAlphabet, gain: f64, sigma_x2: f64, sigma_d2: f64) -> ShapingPosterior {
    let sx = sigma_x2.sqrt();
    let m = alph.size();
    let mut acc = vec![0.0; m];
    for (k, slot) in acc.iter_mut().enumerate() {
        *slot = quad::integrate(
            |t| {
                let x = t * sx;
                let dens = (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
                dens * plain_posterior(gain * x, alph, sigma_d2).pmf()[k]
            },
            -9.0,
            9.0,
            1e-12,
        );
    }
    ShapingPosterior::from_weights(acc)
}

/// Side-information posterior of the modulo scheme:
/// `P(u | y') ∝ ((q * N(0, tau2)) wrapped)((u - y') mod A)`.
///
/// The `x'`-dependence of the encoder normalizer is ignored, which is exact
/// in the large-`M` limit.
pub fn wz_side_posterior(
    y_prime: f64,
    alph: &AskAlphabet,
    tg: &TruncGaussian,
    tau2: f64,
) -> ShapingPosterior {
    let iv = alph.interval();
    let w = alph
        .points()
        .iter()
        .map(|&u| wrapped_kernel(iv.wrap(u - y_prime), tg, tau2))
        .collect();
    ShapingPosterior::from_weights(w)
}

/// Density of `(Z~ + N) mod A` at `w`, up to a constant, for `Z~ ~ q`
/// and independent `N ~ N(0, tau2)`.
pub(crate) fn wrapped_kernel(w: f64, tg: &TruncGaussian, tau2: f64) -> f64 {
    let a = tg.width();
    let s2 = tg.sigma_d2();
    if tau2 <= 0.0 {
        return tg.pdf_unchecked(w);
    }
    let tot = s2 + tau2;
    let sig_star = (s2 * tau2 / tot).sqrt();
    let reach = (tot.sqrt() * 10.0 / a).ceil() as i64 + 1;
    let mut acc = 0.0;
    for j in -reach..=reach {
        let v = w + j as f64 * a;
        let mu = v * s2 / tot;
        let mass = normal_cdf((0.5 * a - mu) / sig_star) - normal_cdf((-0.5 * a - mu) / sig_star);
        acc += (-0.5 * v * v / tot).exp() * mass;
    }
    acc
}

/// Draws an index from `posterior` by inversion of one uniform.
pub fn ideal_quantize(posterior: &ShapingPosterior, rng: &mut SeededRandomSource) -> usize {
    sample_index(posterior.pmf(), rng.uniform())
}

pub(crate) fn sample_index(pmf: &[f64], t: f64) -> usize {
    let mut acc = 0.0;
    for (k, &p) in pmf.iter().enumerate() {
        acc += p;
        if t < acc {
            return k;
        }
    }
    pmf.iter().rposition(|&p| p > 0.0).unwrap_or(pmf.len() - 1)
}

/// `(u - x') mod A`.
pub fn encoder_noise(u: f64, x_prime: f64, interval: ModInterval) -> f64 {
    interval.wrap(u - x_prime)
}

/// `(u - y') mod A`.
pub fn decoder_noise(u: f64, y_prime: f64, interval: ModInterval) -> f64 {
    interval.wrap(u - y_prime)
}
