//! Closed-form quadratic-Gaussian rate-distortion mathematics.
//!
//! Rates are in bits. Noise variances `var_z1`, `var_z2` are the description
//! noises of the Gaussian test channel `U = X + Z`, with `Z` independent of
//! `X` and of independent entries.

mod boundary;
mod bounds;

pub use boundary::{bt_boundary, bt_boundary_points, BoundaryPoint};
pub use bounds::{analytic_bounds, BoundReport, WrapStats};

use crate::math::Mat2;
use crate::{Error, Result};

/// Two zero-mean jointly Gaussian sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSourcePair {
    pub sigma_x1_2: f64,
    pub sigma_x2_2: f64,
    pub rho: f64,
}

impl GaussianSourcePair {
    pub fn new(sigma_x1_2: f64, sigma_x2_2: f64, rho: f64) -> Result<Self> {
        for (name, v) in [("sigma_x1^2", sigma_x1_2), ("sigma_x2^2", sigma_x2_2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(rho.is_finite() && rho.abs() < 1.0) {
            return Err(Error::domain(format!(
                "correlation must lie in (-1, 1), got {rho}"
            )));
        }
        Ok(Self {
            sigma_x1_2,
            sigma_x2_2,
            rho,
        })
    }

    /// The source of the worked example: `Q_X = [[2.5, 2], [2, 2.5]]`.
    pub fn example() -> Self {
        Self {
            sigma_x1_2: 2.5,
            sigma_x2_2: 2.5,
            rho: 0.8,
        }
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma_x1_2.sqrt()
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma_x2_2.sqrt()
    }

    /// `E[X1 X2]`.
    pub fn cov12(&self) -> f64 {
        self.rho * self.sigma1() * self.sigma2()
    }

    pub fn covariance(&self) -> Mat2 {
        let c = self.cov12();
        Mat2::new(self.sigma_x1_2, c, c, self.sigma_x2_2)
    }

    /// Relabels source 1 as source 2 and vice versa.
    pub fn swapped(&self) -> Self {
        Self {
            sigma_x1_2: self.sigma_x2_2,
            sigma_x2_2: self.sigma_x1_2,
            rho: self.rho,
        }
    }

    /// `Q_U = Q_X + diag(var_z1, var_z2)`.
    pub fn q_u(&self, nv: &NoiseVars) -> Mat2 {
        self.covariance().add(&Mat2::diag(nv.var_z1, nv.var_z2))
    }

    /// `|Q_{X1,U2}| = sigma_x1^2 sigma_u2^2 - E[X1 X2]^2`.
    pub fn det_x1_u2(&self, var_z2: f64) -> f64 {
        self.sigma_x1_2 * (self.sigma_x2_2 + var_z2) - self.cov12().powi(2)
    }

    /// `|Q_{X2,U1}|`.
    pub fn det_x2_u1(&self, var_z1: f64) -> f64 {
        self.sigma_x2_2 * (self.sigma_x1_2 + var_z1) - self.cov12().powi(2)
    }
}

/// Description-noise variances of the Gaussian test channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVars {
    pub var_z1: f64,
    pub var_z2: f64,
}

impl NoiseVars {
    pub fn new(var_z1: f64, var_z2: f64) -> Result<Self> {
        if !(var_z1 > 0.0 && var_z2 > 0.0) {
            return Err(Error::domain(format!(
                "noise variances must be positive, got ({var_z1}, {var_z2})"
            )));
        }
        Ok(Self { var_z1, var_z2 })
    }

    pub fn swapped(&self) -> Self {
        Self {
            var_z1: self.var_z2,
            var_z2: self.var_z1,
        }
    }
}

/// Scalar WZ rate `0.5 log2(sigma_cond2 / D)`.
pub fn wz_rate(sigma_cond2: f64, d: f64) -> Result<f64> {
    if !(sigma_cond2 > 0.0 && d > 0.0) {
        return Err(Error::domain("variances must be positive"));
    }
    if d > sigma_cond2 {
        return Err(Error::domain(format!(
            "distortion {d} exceeds the conditional variance {sigma_cond2}"
        )));
    }
    Ok(0.5 * (sigma_cond2 / d).log2())
}

/// Description noise variance achieving distortion `D` against a
/// conditional variance `sigma_cond2`.
pub fn wz_noise_var(sigma_cond2: f64, d: f64) -> Result<f64> {
    if !(sigma_cond2 > 0.0 && d > 0.0) {
        return Err(Error::domain("variances must be positive"));
    }
    if d >= sigma_cond2 {
        return Err(Error::domain(format!(
            "distortion {d} must be below the conditional variance {sigma_cond2}"
        )));
    }
    Ok(sigma_cond2 * d / (sigma_cond2 - d))
}

/// Right-hand sides of the three Berger-Tung rate inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub r1_min: f64,
    pub r2_min: f64,
    pub sum_min: f64,
}

impl RateBounds {
    /// Smallest slack over the three inequalities at rates `(r1, r2)`.
    pub fn slack(&self, r1: f64, r2: f64) -> f64 {
        (r1 - self.r1_min)
            .min(r2 - self.r2_min)
            .min(r1 + r2 - self.sum_min)
    }
}

pub fn bt_rate_bounds(src: &GaussianSourcePair, nv: &NoiseVars) -> RateBounds {
    let det_u = src.q_u(nv).det();
    let su1 = src.sigma_x1_2 + nv.var_z1;
    let su2 = src.sigma_x2_2 + nv.var_z2;
    RateBounds {
        r1_min: 0.5 * (det_u / (su2 * nv.var_z1)).log2(),
        r2_min: 0.5 * (det_u / (su1 * nv.var_z2)).log2(),
        sum_min: 0.5 * (det_u / (nv.var_z1 * nv.var_z2)).log2(),
    }
}

/// MMSE distortions of `E[X | U]` in the expanded form.
pub fn bt_distortions(src: &GaussianSourcePair, nv: &NoiseVars) -> (f64, f64) {
    let det_u = src.q_u(nv).det();
    let one_m = 1.0 - src.rho * src.rho;
    let d1 = src.sigma_x1_2 * (src.sigma_x2_2 * one_m + nv.var_z2) * nv.var_z1 / det_u;
    let d2 = src.sigma_x2_2 * (src.sigma_x1_2 * one_m + nv.var_z1) * nv.var_z2 / det_u;
    (d1, d2)
}

/// The same distortions through the determinant form `|Q_{X1,U2}| var_z1 / |Q_U|`.
pub fn bt_distortions_det(src: &GaussianSourcePair, nv: &NoiseVars) -> (f64, f64) {
    let det_u = src.q_u(nv).det();
    (
        src.det_x1_u2(nv.var_z2) * nv.var_z1 / det_u,
        src.det_x2_u1(nv.var_z1) * nv.var_z2 / det_u,
    )
}

/// Operating point of the corner where encoder 2 performs Shannon
/// rate-distortion coding and encoder 1 WZ-codes against `U2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerParams {
    /// Encoder-2 target distortion (its shaping variance).
    pub sigma_d2_2: f64,
    pub var_z2: f64,
    pub var_z1: f64,
    /// Encoder-1 target distortion (its shaping variance).
    pub d1: f64,
    /// Achieved source-2 distortion after joint reconstruction.
    pub d2: f64,
    pub alpha2: f64,
    pub alpha1: f64,
    /// Coefficient of `Z2'` in the side information `Y1 = gamma1 Z2'`.
    pub gamma1: f64,
    pub sigma_x1_given_u2_2: f64,
    pub lmmse: Mat2,
}

impl CornerParams {
    /// Builds the operating point from the two shaping variances rather
    /// than from rates. `corner_params` is the special case
    /// `sigma_d2_2 = sigma_x2^2 2^{-2 R2}`, `d1 = sigma_{x1|u2}^2 2^{-2 R1}`.
    pub fn from_distortions(src: &GaussianSourcePair, sigma_d2_2: f64, d1: f64) -> Result<Self> {
        if !(sigma_d2_2 > 0.0 && sigma_d2_2 < src.sigma_x2_2) {
            return Err(Error::domain(format!(
                "encoder-2 distortion {sigma_d2_2} must lie in (0, {})",
                src.sigma_x2_2
            )));
        }
        let var_z2 = wz_noise_var(src.sigma_x2_2, sigma_d2_2)?;
        let sigma_u2_2 = src.sigma_x2_2 + var_z2;
        let alpha2 = (1.0 - sigma_d2_2 / src.sigma_x2_2).sqrt();
        let cond = src.sigma_x1_2 * (1.0 - alpha2 * alpha2 * src.rho * src.rho);
        if !(d1 > 0.0 && d1 < cond) {
            return Err(Error::domain(format!(
                "encoder-1 distortion {d1} must lie in (0, {cond})"
            )));
        }
        let var_z1 = wz_noise_var(cond, d1)?;
        let alpha1 = (1.0 - d1 / cond).sqrt();
        let gamma1 = src.rho * src.sigma1() / sigma_u2_2.sqrt();
        let nv = NoiseVars { var_z1, var_z2 };
        let (_, d2) = bt_distortions(src, &nv);
        let mut cp = CornerParams {
            sigma_d2_2,
            var_z2,
            var_z1,
            d1,
            d2,
            alpha2,
            alpha1,
            gamma1,
            sigma_x1_given_u2_2: cond,
            lmmse: Mat2::diag(0.0, 0.0),
        };
        cp.lmmse = lmmse_matrix(&cp, src);
        Ok(cp)
    }

    pub fn noise_vars(&self) -> NoiseVars {
        NoiseVars {
            var_z1: self.var_z1,
            var_z2: self.var_z2,
        }
    }

    pub fn sigma_u2_2(&self, src: &GaussianSourcePair) -> f64 {
        src.sigma_x2_2 + self.var_z2
    }
}

pub fn corner_params(src: &GaussianSourcePair, r1: f64, r2: f64) -> Result<CornerParams> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::domain(format!(
            "corner rates must be positive, got ({r1}, {r2})"
        )));
    }
    let sigma_d2_2 = src.sigma_x2_2 * (-2.0 * r2).exp2();
    let alpha2_sq = 1.0 - sigma_d2_2 / src.sigma_x2_2;
    let cond = src.sigma_x1_2 * (1.0 - alpha2_sq * src.rho * src.rho);
    let d1 = cond * (-2.0 * r1).exp2();
    CornerParams::from_distortions(src, sigma_d2_2, d1)
}

/// Limit form of the linear MMSE reconstruction matrix applied to `(Z1', Z2')`.
pub fn lmmse_matrix(cp: &CornerParams, src: &GaussianSourcePair) -> Mat2 {
    let sigma_u2 = (src.sigma_x2_2 + cp.var_z2).sqrt();
    let m21 = cp.alpha1 * src.cov12() * cp.var_z2 / src.det_x1_u2(cp.var_z2);
    Mat2::new(cp.alpha1, cp.gamma1, m21, src.sigma2() / sigma_u2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn wz_formulas() {
        assert!(close(wz_rate(1.0, 0.25).unwrap(), 1.0, 1e-15));
        assert_eq!(wz_rate(2.0, 2.0).unwrap(), 0.0);
        // 0.5 log2(6.4) = 1.3390359...
        assert!(close(wz_rate(1.0, 0.15625).unwrap(), 1.339_035_95, 1e-8));
        assert!(wz_rate(1.0, 1.5).is_err());
        assert!(close(wz_noise_var(1.0, 0.5).unwrap(), 1.0, 1e-15));
        assert!(close(wz_noise_var(2.5, 0.15625).unwrap(), 1.0 / 6.0, 1e-12));
        assert!(close(wz_noise_var(1.0, 0.25).unwrap(), 1.0 / 3.0, 1e-12));
        assert!(wz_noise_var(1.0, 1.0).is_err());
    }

    #[test]
    fn wz_rate_inverse_by_bisection() {
        // recover D from the rate by bisection on the monotone map D -> rate
        let target = wz_rate(1.0, 0.15625).unwrap();
        let (mut lo, mut hi) = (1e-9, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if wz_rate(1.0, mid).unwrap() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(close(lo, 0.15625, 1e-12));
    }

    #[test]
    fn rate_bounds_example() {
        let src = GaussianSourcePair::example();
        let nv = NoiseVars::new(1.0 / 3.0, 1.0 / 6.0).unwrap();
        assert!(close(src.q_u(&nv).det(), 32.0 / 9.0, 1e-12));
        let b = bt_rate_bounds(&src, &nv);
        assert!(close(b.r1_min, 1.0, 1e-12));
        // |Q_U| / (sigma_u1^2 var_z2) = (32/9) / ((17/6)(1/6)) = 7.5294...
        assert!(close(b.r2_min, 0.5 * (7.529_411_764_705_882f64).log2(), 1e-12));
        assert!(close(b.sum_min, 3.0, 1e-12));
        assert!(b.sum_min >= b.r1_min.max(b.r2_min));
    }

    #[test]
    fn rate_bounds_independent_sources() {
        let src = GaussianSourcePair::new(2.0, 3.0, 0.0).unwrap();
        let nv = NoiseVars::new(0.5, 0.7).unwrap();
        let b = bt_rate_bounds(&src, &nv);
        assert!(close(b.r1_min, 0.5 * (2.5f64 / 0.5).log2(), 1e-12));
        assert!(close(b.r2_min, 0.5 * (3.7f64 / 0.7).log2(), 1e-12));
        assert!(close(b.sum_min, b.r1_min + b.r2_min, 1e-12));
        let far = NoiseVars::new(1e12, 0.7).unwrap();
        assert!(bt_rate_bounds(&src, &far).r1_min < 1e-10);
    }

    #[test]
    fn distortions_example_and_oracle() {
        let src = GaussianSourcePair::example();
        let nv = NoiseVars::new(1.0 / 3.0, 1.0 / 6.0).unwrap();
        let (d1, d2) = bt_distortions(&src, &nv);
        assert!(close(d1, 0.25, 1e-12));
        assert!(close(d2, 0.144_531_25, 1e-12));
        let (e1, e2) = bt_distortions_det(&src, &nv);
        assert!(close(d1, e1, 1e-10) && close(d2, e2, 1e-10));
        // LMMSE error covariance Q_X - Q_X Q_U^{-1} Q_X
        let qx = src.covariance();
        let err = qx.sub(&(qx * src.q_u(&nv).inverse().unwrap() * qx));
        assert!(close(err.get(0, 0), d1, 1e-12));
        assert!(close(err.get(1, 1), d2, 1e-12));
    }

    #[test]
    fn distortion_limits() {
        let src = GaussianSourcePair::new(2.0, 3.0, 0.0).unwrap();
        let nv = NoiseVars::new(0.5, 0.7).unwrap();
        let (d1, d2) = bt_distortions(&src, &nv);
        assert!(close(d1, 2.0 * 0.5 / 2.5, 1e-12));
        assert!(close(d2, 3.0 * 0.7 / 3.7, 1e-12));
        let ex = GaussianSourcePair::example();
        let (d1, _) = bt_distortions(&ex, &NoiseVars::new(1e-12, 0.2).unwrap());
        assert!(d1 < 1e-11);
    }

    #[test]
    fn corner_example() {
        let src = GaussianSourcePair::example();
        let cp = corner_params(&src, 1.0, 2.0).unwrap();
        assert!(close(cp.sigma_d2_2, 0.15625, 1e-12));
        assert!(close(cp.var_z2, 1.0 / 6.0, 1e-12));
        assert!(close(cp.sigma_x1_given_u2_2, 1.0, 1e-12));
        assert!(close(cp.d1, 0.25, 1e-12));
        assert!(close(cp.var_z1, 1.0 / 3.0, 1e-12));
        assert!(close(cp.alpha2, 0.968_245_836_551_854_2, 1e-12));
        assert!(close(cp.alpha1, 0.866_025_403_784_438_6, 1e-12));
        assert!(close(cp.gamma1, 0.774_596_669_241_483_4, 1e-12));
        assert!(close(cp.d2, 0.144_531_25, 1e-12));
        // both forms of alpha2 and the determinant form of alpha1
        let su2 = cp.sigma_u2_2(&src);
        assert!(close(cp.alpha2, (src.sigma_x2_2 / su2).sqrt(), 1e-12));
        let det_u = src.q_u(&cp.noise_vars()).det();
        assert!(close(
            cp.alpha1 * cp.alpha1,
            src.det_x1_u2(cp.var_z2) / det_u,
            1e-12
        ));
    }

    #[test]
    fn corner_degenerate_cases() {
        let src = GaussianSourcePair::new(2.0, 3.0, 0.0).unwrap();
        let cp = corner_params(&src, 1.0, 1.5).unwrap();
        assert_eq!(cp.gamma1, 0.0);
        assert!(close(cp.sigma_x1_given_u2_2, 2.0, 1e-15));
        assert!(close(cp.d1, 2.0 / 4.0, 1e-12));
        assert!(close(cp.d2, 3.0 * (-3.0f64).exp2(), 1e-12));
        let ex = GaussianSourcePair::example();
        let cp = corner_params(&ex, 1e-9, 2.0).unwrap();
        assert!(close(cp.d1, cp.sigma_x1_given_u2_2, 1e-8));
        assert!(corner_params(&ex, 0.0, 2.0).is_err());
    }

    #[test]
    fn lmmse_example_and_oracle() {
        let src = GaussianSourcePair::example();
        let cp = corner_params(&src, 1.0, 2.0).unwrap();
        let l = cp.lmmse;
        let expect = Mat2::new(0.866025, 0.774597, 0.108253, 0.968246);
        assert!(l.max_abs_diff(&expect) < 1e-6);
        assert_eq!(l.get(1, 1), cp.alpha2.max(l.get(1, 1)).min(l.get(1, 1)));
        assert!(close(l.get(1, 1), cp.alpha2, 1e-12));

        // generic LMMSE E[X Z'^T] Q_Z'^{-1} under the limit model
        // Z2' = alpha2 X2 + Zt2, Z1' = alpha1 (X1 - gamma1 Z2') + Zt1 with
        // Zt_l independent of variance d_l
        let s = src.covariance();
        let e_x_z2 = [cp.alpha2 * s.get(0, 1), cp.alpha2 * s.get(1, 1)];
        let e_x_z1 = [
            cp.alpha1 * (s.get(0, 0) - cp.gamma1 * e_x_z2[0]),
            cp.alpha1 * (s.get(1, 0) - cp.gamma1 * e_x_z2[1]),
        ];
        let var_z2p = cp.alpha2.powi(2) * src.sigma_x2_2 + cp.sigma_d2_2;
        let var_z1_resid = src.sigma_x1_2 - 2.0 * cp.gamma1 * e_x_z2[0] + cp.gamma1.powi(2) * var_z2p;
        let var_z1p = cp.alpha1.powi(2) * var_z1_resid + cp.d1;
        let e_z1_z2 = cp.alpha1 * (e_x_z2[0] - cp.gamma1 * var_z2p);
        let exz = Mat2::new(e_x_z1[0], e_x_z2[0], e_x_z1[1], e_x_z2[1]);
        let qz = Mat2::new(var_z1p, e_z1_z2, e_z1_z2, var_z2p);
        let generic = exz * qz.inverse().unwrap();
        assert!(generic.max_abs_diff(&l) < 1e-10, "{generic:?} vs {l:?}");

        // error variances of the reconstruction under the same model
        let err = s.sub(&(generic * exz.transpose()));
        assert!(close(err.get(0, 0), cp.d1, 1e-10));
        assert!(close(err.get(1, 1), cp.d2, 1e-10));
    }

    #[test]
    fn lmmse_uncorrelated_sources() {
        let src = GaussianSourcePair::new(2.0, 3.0, 0.0).unwrap();
        let cp = corner_params(&src, 1.0, 1.5).unwrap();
        let l = cp.lmmse;
        assert_eq!(l.get(0, 1), 0.0);
        assert_eq!(l.get(1, 0), 0.0);
        assert!(close(l.get(0, 0), cp.alpha1, 0.0));
    }

    #[test]
    fn corner_rates_are_tight() {
        for &(v1, v2, rho, r1, r2) in &[
            (2.5, 2.5, 0.8, 1.0, 2.0),
            (1.0, 4.0, -0.3, 0.7, 1.2),
            (3.0, 0.5, 0.95, 2.0, 0.4),
        ] {
            let src = GaussianSourcePair::new(v1, v2, rho).unwrap();
            let cp = corner_params(&src, r1, r2).unwrap();
            let b = bt_rate_bounds(&src, &cp.noise_vars());
            assert!(close(b.r1_min, r1, 1e-10));
            let su2 = cp.sigma_u2_2(&src);
            assert!(close(0.5 * (su2 / cp.var_z2).log2(), r2, 1e-10));
            assert!(close(b.sum_min, r1 + r2, 1e-10));
        }
    }

    #[test]
    fn corner_relabeling() {
        let src = GaussianSourcePair::new(3.0, 1.5, 0.6).unwrap();
        let (r1, r2) = (0.8, 1.7);
        let cp = corner_params(&src, r1, r2).unwrap();
        let sw = corner_params(&src.swapped(), r2, r1).unwrap();
        // the swapped problem is the other corner of the same region
        let nv = sw.noise_vars().swapped();
        let b = bt_rate_bounds(&src, &nv);
        assert!(close(b.r2_min, r2, 1e-10));
        assert!(close(b.sum_min, r1 + r2, 1e-10));
        let (d1, d2) = bt_distortions(&src, &nv);
        assert_eq!((d2, d1), bt_distortions(&src.swapped(), &sw.noise_vars()));
        assert!(close(d1, sw.d2, 1e-12) && close(d2, sw.d1, 1e-12));
        // relabeling twice is the identity
        let back = corner_params(&src.swapped().swapped(), r1, r2).unwrap();
        assert_eq!(back, cp);
    }

    #[test]
    fn successive_decoding_identity() {
        // I(U1;X1|U2) as I(X1;U1) - I(U1;U2) and as the conditional form
        let src = GaussianSourcePair::example();
        for &(z1, z2) in &[(1.0 / 3.0, 1.0 / 6.0), (0.05, 2.0), (4.0, 0.01)] {
            let nv = NoiseVars::new(z1, z2).unwrap();
            let qu = src.q_u(&nv);
            let su1 = qu.get(0, 0);
            let su2 = qu.get(1, 1);
            let i_x1_u1 = 0.5 * (su1 / z1).log2();
            let i_u1_u2 = 0.5 * (su1 * su2 / qu.det()).log2();
            let cond_u1 = su1 - qu.get(0, 1).powi(2) / su2;
            let direct = 0.5 * (cond_u1 / z1).log2();
            assert!(close(i_x1_u1 - i_u1_u2, direct, 1e-10));
            assert!(close(direct, bt_rate_bounds(&src, &nv).r1_min, 1e-10));
        }
    }

    proptest! {
        #[test]
        fn noise_var_roundtrip(s2 in 1e-3f64..1e3, frac in 1e-6f64..0.999_999) {
            let d = s2 * frac;
            let z = wz_noise_var(s2, d).unwrap();
            let back = s2 * z / (s2 + z);
            prop_assert!((back - d).abs() <= 1e-12 * s2.max(1.0));
        }
    }
}
