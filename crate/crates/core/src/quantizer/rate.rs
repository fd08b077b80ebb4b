use rustfft::{num_complex::Complex, FftPlanner};

use super::AskAlphabet;
use crate::math::{entropy_bits, SeededRandomSource, TruncGaussian};
use crate::{Error, Result};

/// Numerical estimate of `I(U; X') - I(U; Y')` in bits.
///
/// `src_cond_var` is `sigma_z^2`, the variance of `X` given the side
/// information. `X'` is uniform, so both mutual informations share `H(U)`
/// and the rate is `H(U | Y') - H(U | X')`. The conditional entropies are
/// averaged over a grid of `samples` values of `x'` with a random offset;
/// `P(u | y')` is the exact mixture of the encoder pmfs under the wrapped
/// Gaussian `X' - Y' = alpha Z mod A`, computed by circular convolution.
pub fn estimate_wz_rate(
    src_cond_var: f64,
    tg: &TruncGaussian,
    alph: &AskAlphabet,
    samples: usize,
    rng: &mut SeededRandomSource,
) -> Result<f64> {
    let sd2 = tg.sigma_d2();
    if src_cond_var.is_nan() || src_cond_var < sd2 {
        return Err(Error::domain(format!(
            "conditional variance {src_cond_var} is below the shaping variance {sd2}"
        )));
    }
    if (tg.width() - alph.width()).abs() > 1e-12 * alph.width() {
        return Err(Error::domain("shaping and alphabet widths differ"));
    }
    let msz = alph.size();
    let m = samples.div_ceil(msz).max(1);
    let n = msz * m;
    let a = alph.width();
    let h = a / n as f64;
    let iv = alph.interval();
    let delta = rng.uniform() * h;

    // hq[i] = q at u_k - x'_j for i = k m + j
    let hq: Vec<f64> = (0..n)
        .map(|i| tg.pdf_unchecked(iv.wrap(0.5 * alph.kappa() - delta + i as f64 * h)))
        .collect();
    let norm: Vec<f64> = (0..m)
        .map(|j| (0..msz).map(|k| hq[k * m + j]).sum())
        .collect();
    let g: Vec<f64> = (0..n).map(|i| hq[i] / norm[i % m]).collect();

    let h_x = mean_entropy(&g, msz, m);

    let tau2 = (1.0 - sd2 / src_cond_var) * src_cond_var;
    let kernel = wrapped_gauss_grid(n, h, a, tau2);
    let f = circular_convolve(&g, &kernel);
    let h_y = mean_entropy(&f, msz, m);
    Ok(h_y - h_x)
}

fn mean_entropy(table: &[f64], msz: usize, m: usize) -> f64 {
    let mut pmf = vec![0.0; msz];
    let mut acc = 0.0;
    for j in 0..m {
        for (k, p) in pmf.iter_mut().enumerate() {
            *p = table[k * m + j].max(0.0);
        }
        let s: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= s);
        acc += entropy_bits(&pmf);
    }
    acc / m as f64
}

/// Wrapped Gaussian on the periodic grid, normalized to unit sum.
fn wrapped_gauss_grid(n: usize, h: f64, a: f64, var: f64) -> Vec<f64> {
    let mut k = vec![0.0; n];
    if var <= 0.0 {
        k[0] = 1.0;
        return k;
    }
    let reach = (10.0 * var.sqrt() / a).ceil() as i64 + 1;
    for (d, slot) in k.iter_mut().enumerate() {
        let base = if d <= n / 2 { d as f64 } else { d as f64 - n as f64 } * h;
        *slot = (-reach..=reach)
            .map(|w| {
                let v = base + w as f64 * a;
                (-0.5 * v * v / var).exp()
            })
            .sum();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

fn circular_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    fa.iter().map(|c| c.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::quad::integrate;
    use crate::quantizer::{make_alphabet, shaping_posterior};

    #[test]
    fn convolution_matches_direct_sum() {
        let a = [1.0, 2.0, 0.5, 0.0, 3.0];
        let b = [0.2, 0.0, 0.1, 0.4, 0.3];
        let got = circular_convolve(&a, &b);
        for (i, g) in got.iter().enumerate() {
            let direct: f64 = (0..5).map(|t| a[t] * b[(i + 5 - t) % 5]).sum();
            assert!((g - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn large_alphabet_limit_is_one_bit() {
        let tg = TruncGaussian::new(0.25, 8.0).unwrap();
        let alph = make_alphabet(8.0, 256).unwrap();
        let mut rng = SeededRandomSource::new(3, 0);
        let r = estimate_wz_rate(1.0, &tg, &alph, 100_000, &mut rng).unwrap();
        assert!((r - 1.0).abs() < 0.03, "{r}");
    }

    #[test]
    fn no_gain_when_variances_match() {
        let tg = TruncGaussian::new(1.0, 16.0).unwrap();
        let alph = make_alphabet(16.0, 64).unwrap();
        let mut rng = SeededRandomSource::new(4, 0);
        let r = estimate_wz_rate(1.0, &tg, &alph, 100_000, &mut rng).unwrap();
        assert!(r.abs() < 1e-6, "{r}");
    }

    #[test]
    fn finite_alphabet_penalty() {
        let tg = TruncGaussian::new(1.0, 2.0).unwrap();
        let alph = make_alphabet(2.0, 2).unwrap();
        let mut rng = SeededRandomSource::new(5, 0);
        let r = estimate_wz_rate(4.0, &tg, &alph, 100_000, &mut rng).unwrap();
        assert!(r < 0.5 * (4.0f64).log2());
    }

    #[test]
    fn matches_two_dimensional_quadrature() {
        // small alphabet so nested adaptive quadrature stays cheap
        let (width, m, sd2, sz2) = (4.0, 4, 0.3, 1.2);
        let tg = TruncGaussian::new(sd2, width).unwrap();
        let alph = make_alphabet(width, m).unwrap();
        let iv = alph.interval();
        let tau2 = sz2 - sd2;
        let h = |p: &[f64]| crate::math::entropy_bits(p);
        let post = |x: f64| shaping_posterior(x, &alph, &tg).into_pmf();
        let kern = |d: f64| -> f64 {
            (-3..=3)
                .map(|w| {
                    let v = iv.wrap(d) + w as f64 * width;
                    (-0.5 * v * v / tau2).exp() / (2.0 * std::f64::consts::PI * tau2).sqrt()
                })
                .sum()
        };
        let half = 0.5 * width;
        let h_x = integrate(|x| h(&post(x)), -half, half, 1e-10) / width;
        let h_y = integrate(
            |y| {
                let pu: Vec<f64> = (0..m)
                    .map(|k| integrate(|x| post(x)[k] * kern(x - y), -half, half, 1e-9))
                    .collect();
                h(&pu)
            },
            -half,
            half,
            1e-7,
        ) / width;
        let oracle = h_y - h_x;
        let mut rng = SeededRandomSource::new(6, 0);
        let r = estimate_wz_rate(sz2, &tg, &alph, 100_000, &mut rng).unwrap();
        assert!((r - oracle).abs() < 1e-4, "{r} vs {oracle}");
    }
}
