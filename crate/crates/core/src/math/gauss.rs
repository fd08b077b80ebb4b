use std::f64::consts::{PI, SQRT_2};

use super::ModInterval;
use crate::{Error, Result};

/// Gaussian tail probability `P(N(0,1) > x)`.
pub fn qfunc(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Gaussian density with variance `sigma_d2` restricted to `[-A/2, A/2)`
/// and renormalized by `c = 1 - 2Q(A / (2 sigma_d))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncGaussian {
    sigma_d2: f64,
    interval: ModInterval,
    c: f64,
}

impl TruncGaussian {
    pub fn new(sigma_d2: f64, width: f64) -> Result<Self> {
        if !(sigma_d2.is_finite() && sigma_d2 > 0.0) {
            return Err(Error::domain(format!(
                "shaping variance must be positive, got {sigma_d2}"
            )));
        }
        let interval = ModInterval::new(width)?;
        let c = 1.0 - 2.0 * qfunc(width / (2.0 * sigma_d2.sqrt()));
        if c <= 0.0 {
            return Err(Error::domain("truncation normalizer underflowed"));
        }
        Ok(Self {
            sigma_d2,
            interval,
            c,
        })
    }

    pub fn sigma_d2(&self) -> f64 {
        self.sigma_d2
    }

    pub fn width(&self) -> f64 {
        self.interval.width()
    }

    pub fn interval(&self) -> ModInterval {
        self.interval
    }

    /// The normalizer `c`.
    pub fn normalizer(&self) -> f64 {
        self.c
    }

    pub fn pdf(&self, z: f64) -> Result<f64> {
        if !self.interval.contains(z) {
            return Err(Error::domain(format!(
                "{z} lies outside the support [-{h}, {h})",
                h = self.interval.half()
            )));
        }
        Ok(self.pdf_unchecked(z))
    }

    #[inline]
    pub(crate) fn pdf_unchecked(&self, z: f64) -> f64 {
        (-z * z / (2.0 * self.sigma_d2)).exp() / (self.c * (2.0 * PI * self.sigma_d2).sqrt())
    }

    /// Second moment `P_q` of the truncated density, in closed form.
    pub fn variance(&self) -> f64 {
        let a = self.width();
        let s2 = self.sigma_d2;
        s2 * (1.0 - a * (-a * a / (8.0 * s2)).exp() / (self.c * (2.0 * PI * s2).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::quad::integrate;

    fn std_normal(x: f64) -> f64 {
        (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
    }

    #[test]
    fn qfunc_values() {
        assert_eq!(qfunc(0.0), 0.5);
        assert!(qfunc(-10.0) > 1.0 - 1e-12);
        // oracle: integrate the density over the tail
        let tail = integrate(std_normal, 2.0, 40.0, 1e-15);
        assert!((qfunc(2.0) - tail).abs() / tail < 1e-10);
        assert!((qfunc(2.0) - 0.0227501).abs() < 5e-8);
    }

    #[test]
    fn qfunc_relative_accuracy_against_quadrature() {
        for &x in &[-8.0, -3.5, -1.0, 0.5, 1.7, 3.0, 5.0, 8.0] {
            let oracle = if x >= 0.0 {
                integrate(std_normal, x, x + 40.0, 1e-300_f64.max(1e-14 * qfunc(x)))
            } else {
                1.0 - integrate(std_normal, -x, -x + 40.0, 1e-16)
            };
            let rel = (qfunc(x) - oracle).abs() / oracle;
            assert!(rel < 1e-12, "x={x} rel={rel}");
        }
    }

    #[test]
    fn pdf_examples() {
        let wide = TruncGaussian::new(1.0, 40.0).unwrap();
        assert!((wide.pdf(0.0).unwrap() - 0.398942).abs() < 1e-6);
        let tg = TruncGaussian::new(1.0, 4.0).unwrap();
        assert!((tg.normalizer() - 0.954500).abs() < 1e-6);
        let c_quad = integrate(std_normal, -2.0, 2.0, 1e-13);
        assert!((tg.normalizer() - c_quad).abs() < 1e-9);
        assert!((tg.pdf(0.0).unwrap() - 0.417960).abs() < 1e-6);
        assert!(tg.pdf(2.0).is_err());
        assert!(tg.pdf(-2.0).is_ok());
    }

    #[test]
    fn pdf_integrates_to_one() {
        for &(s2, a) in &[(1.0, 4.0), (0.25, 1.0), (4.0, 64.0), (0.0625, 0.5)] {
            let tg = TruncGaussian::new(s2, a).unwrap();
            let total = integrate(|z| tg.pdf_unchecked(z), -a / 2.0, a / 2.0, 1e-12);
            assert!((total - 1.0).abs() < 1e-9, "s2={s2} a={a} total={total}");
        }
    }

    #[test]
    fn variance_examples() {
        let tg = TruncGaussian::new(1.0, 4.0).unwrap();
        // quadrature oracle gives 0.7737413035...
        assert!((tg.variance() - 0.7737413).abs() < 1e-6);
        let tg = TruncGaussian::new(0.25, 8.0).unwrap();
        assert!((tg.variance() - 0.25).abs() < 1e-6);
        let tg = TruncGaussian::new(1.0, 200.0).unwrap();
        assert!((tg.variance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variance_matches_quadrature_grid() {
        for &sd in &[0.25f64, 0.5, 1.0, 2.0] {
            for &ratio in &[2.0, 4.0, 8.0, 16.0] {
                let a = ratio * sd;
                let tg = TruncGaussian::new(sd * sd, a).unwrap();
                let q = integrate(|z| z * z * tg.pdf_unchecked(z), -a / 2.0, a / 2.0, 1e-12);
                assert!(
                    (tg.variance() - q).abs() < 1e-8,
                    "sd={sd} A={a}: {} vs {q}",
                    tg.variance()
                );
            }
        }
    }
}
