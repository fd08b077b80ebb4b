use super::{CornerParams, GaussianSourcePair};
use crate::math::TruncGaussian;
use crate::{Error, Result};

/// Monte Carlo estimates of the wrap-correlation terms `E[I1 Z1]` and
/// `E[X1 I2]`, where `I_l` is the wrap integer of `Z_l'`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WrapStats {
    pub e_i1_z1: f64,
    pub e_x1_i2: f64,
}

/// Upper bounds for the modulo scheme at finite intervals. Every field is
/// an upper bound, not an estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// Bound on `E[(Z2')^2]`.
    pub z2_second_moment: f64,
    /// Bound on `sigma_z1^2 = E[(X1 - gamma1 Z2')^2]`.
    pub sigma_z1_2: f64,
    /// Bound on `E[(Z1')^2]`.
    pub z1_second_moment: f64,
    /// Bound on the source-1 distortion `E[(X1 - X1_hat)^2]`.
    pub distortion1: f64,
}

/// Evaluates the finite-interval distortion bounds.
///
/// `d_min` is `(d_min1, d_min2)`; it is defined outside this crate and must
/// be supplied by the caller. The `sigma_z1^2` bound is substituted into the
/// later bounds.
pub fn analytic_bounds(
    cp: &CornerParams,
    src: &GaussianSourcePair,
    tg1: &TruncGaussian,
    tg2: &TruncGaussian,
    d_min: Option<(f64, f64)>,
    wrap: &WrapStats,
) -> Result<BoundReport> {
    let (dmin1, dmin2) =
        d_min.ok_or_else(|| Error::config("d_min1 and d_min2 must be configured"))?;
    if !(dmin1 > 0.0 && dmin2 > 0.0) {
        return Err(Error::config(format!(
            "d_min values must be positive, got ({dmin1}, {dmin2})"
        )));
    }
    let excess2 = tg2.variance() / dmin2 - cp.sigma_d2_2;
    let z2_second_moment = src.sigma_x2_2 + excess2;
    let sigma_z1_2 = cp.sigma_x1_given_u2_2
        + 2.0 * cp.gamma1 * tg2.width() * wrap.e_x1_i2
        + cp.gamma1 * cp.gamma1 * excess2;
    let scaled_d1 = sigma_z1_2 / cp.sigma_x1_given_u2_2 * cp.d1;
    let excess1 = tg1.variance() / dmin1 - scaled_d1;
    let z1_second_moment = sigma_z1_2 + excess1;
    let distortion1 = scaled_d1
        + 2.0 * cp.alpha1 * tg1.width() * wrap.e_i1_z1
        + cp.alpha1 * cp.alpha1 * excess1;
    Ok(BoundReport {
        z2_second_moment,
        sigma_z1_2,
        z1_second_moment,
        distortion1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::corner_params;

    #[test]
    fn wide_interval_limits() {
        let src = GaussianSourcePair::example();
        let cp = corner_params(&src, 1.0, 2.0).unwrap();
        let tg1 = TruncGaussian::new(cp.d1, 64.0 * cp.d1.sqrt()).unwrap();
        let tg2 = TruncGaussian::new(cp.sigma_d2_2, 64.0 * cp.sigma_d2_2.sqrt()).unwrap();
        let r = analytic_bounds(&cp, &src, &tg1, &tg2, Some((1.0, 1.0)), &WrapStats::default())
            .unwrap();
        assert!((r.z2_second_moment - src.sigma_x2_2).abs() < 1e-12);
        assert!((r.distortion1 - cp.d1).abs() < 1e-12);
        assert!((r.sigma_z1_2 - cp.sigma_x1_given_u2_2).abs() < 1e-12);
    }

    #[test]
    fn sixteen_sigma_within_five_percent() {
        let src = GaussianSourcePair::example();
        let cp = corner_params(&src, 1.0, 2.0).unwrap();
        let tg1 = TruncGaussian::new(cp.d1, 16.0 * cp.d1.sqrt()).unwrap();
        let tg2 = TruncGaussian::new(cp.sigma_d2_2, 16.0 * cp.sigma_d2_2.sqrt()).unwrap();
        let r = analytic_bounds(&cp, &src, &tg1, &tg2, Some((1.0, 1.0)), &WrapStats::default())
            .unwrap();
        assert!((r.distortion1 - cp.d1).abs() / cp.d1 < 0.05);
    }

    #[test]
    fn substitution_case() {
        // P_q = d_min sigma_d^2 and no wraps: the excess terms vanish
        let src = GaussianSourcePair::example();
        let cp = corner_params(&src, 1.0, 2.0).unwrap();
        let tg1 = TruncGaussian::new(cp.d1, 3.0).unwrap();
        let tg2 = TruncGaussian::new(cp.sigma_d2_2, 2.0).unwrap();
        let dmin1 = tg1.variance() / cp.d1;
        let dmin2 = tg2.variance() / cp.sigma_d2_2;
        let r = analytic_bounds(
            &cp,
            &src,
            &tg1,
            &tg2,
            Some((dmin1, dmin2)),
            &WrapStats::default(),
        )
        .unwrap();
        let expect = r.sigma_z1_2 / cp.sigma_x1_given_u2_2 * cp.d1;
        assert!((r.distortion1 - expect).abs() < 1e-12);
        assert!((r.distortion1 - cp.d1).abs() < 1e-12);
    }

    #[test]
    fn wrap_terms_enter_linearly() {
        let src = GaussianSourcePair::example();
        let cp = corner_params(&src, 1.0, 2.0).unwrap();
        let tg1 = TruncGaussian::new(cp.d1, 4.0).unwrap();
        let tg2 = TruncGaussian::new(cp.sigma_d2_2, 4.0).unwrap();
        let base = analytic_bounds(&cp, &src, &tg1, &tg2, Some((1.0, 1.0)), &WrapStats::default())
            .unwrap();
        let w = WrapStats {
            e_i1_z1: 0.01,
            e_x1_i2: 0.0,
        };
        let r = analytic_bounds(&cp, &src, &tg1, &tg2, Some((1.0, 1.0)), &w).unwrap();
        let delta = r.distortion1 - base.distortion1;
        assert!((delta - 2.0 * cp.alpha1 * 4.0 * 0.01).abs() < 1e-12);
    }

    #[test]
    fn missing_d_min_is_a_config_error() {
        let src = GaussianSourcePair::example();
        let cp = corner_params(&src, 1.0, 2.0).unwrap();
        let tg = TruncGaussian::new(0.25, 8.0).unwrap();
        let err = analytic_bounds(&cp, &src, &tg, &tg, None, &WrapStats::default());
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
