use super::{bt_distortions, bt_rate_bounds, corner_params, GaussianSourcePair, NoiseVars};
use crate::{Error, Result};

const BISECT_STEPS: usize = 80;

/// A frontier point together with the noise variances producing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub nv: NoiseVars,
    pub d1: f64,
    pub d2: f64,
}

impl BoundaryPoint {
    fn at(src: &GaussianSourcePair, nv: NoiseVars) -> Self {
        let (d1, d2) = bt_distortions(src, &nv);
        Self { nv, d1, d2 }
    }
}

/// Pareto-minimal distortion pairs achievable at rates `(r1, r2)`.
/// See [`bt_boundary_points`].
pub fn bt_boundary(
    src: &GaussianSourcePair,
    r1: f64,
    r2: f64,
    grid_size: usize,
) -> Result<Vec<(f64, f64)>> {
    Ok(bt_boundary_points(src, r1, r2, grid_size)?
        .into_iter()
        .map(|p| (p.d1, p.d2))
        .collect())
}

/// Pareto-minimal boundary points at rates `(r1, r2)`.
///
/// Noise variances are swept over a log grid spanning `[1e-4, 1e4]` times
/// each source variance. For every grid value of `var_z1` the smallest
/// feasible `var_z2` is then located by bisection, which places the point
/// on the region boundary. Both corner points are inserted in closed form.
/// The result is sorted by `D1` ascending.
pub fn bt_boundary_points(
    src: &GaussianSourcePair,
    r1: f64,
    r2: f64,
    grid_size: usize,
) -> Result<Vec<BoundaryPoint>> {
    if grid_size < 2 {
        return Err(Error::domain(format!("grid_size must be at least 2, got {grid_size}")));
    }
    if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
        return Err(Error::InfeasibleRates { r1, r2 });
    }
    let grid = |var: f64, i: usize| var * 10f64.powf(-4.0 + 8.0 * i as f64 / (grid_size - 1) as f64);
    let feasible = |nv: &NoiseVars| bt_rate_bounds(src, nv).slack(r1, r2) >= 0.0;

    let mut points = Vec::new();
    for i in 0..grid_size {
        let z1 = grid(src.sigma_x1_2, i);
        let column: Vec<f64> = (0..grid_size)
            .map(|j| grid(src.sigma_x2_2, j))
            .filter(|&z2| feasible(&NoiseVars { var_z1: z1, var_z2: z2 }))
            .collect();
        let Some(&hi) = column.first() else { continue };
        let z2 = refine_z2(src, r1, r2, z1, hi);
        points.push(BoundaryPoint::at(src, NoiseVars { var_z1: z1, var_z2: z2 }));
    }
    if points.is_empty() {
        return Err(Error::InfeasibleRates { r1, r2 });
    }

    let a = corner_params(src, r1, r2)?;
    points.push(BoundaryPoint::at(src, a.noise_vars()));
    let b = corner_params(&src.swapped(), r2, r1)?;
    points.push(BoundaryPoint::at(src, b.noise_vars().swapped()));
    Ok(pareto_front(points))
}

/// Shrinks `var_z2` from the feasible value `hi` towards the boundary.
///
/// Lowering `var_z2` only loosens the encoder-1 bound, so the binding
/// constraints are the encoder-2 and sum-rate bounds, both monotone.
fn refine_z2(src: &GaussianSourcePair, r1: f64, r2: f64, z1: f64, hi: f64) -> f64 {
    let ok = |z2: f64| {
        let b = bt_rate_bounds(src, &NoiseVars { var_z1: z1, var_z2: z2 });
        b.slack(r1, r2) >= 0.0
    };
    let (mut lo_ln, mut hi_ln) = (hi.ln() - 60.0, hi.ln());
    if ok(lo_ln.exp()) {
        return lo_ln.exp();
    }
    for _ in 0..BISECT_STEPS {
        let mid = 0.5 * (lo_ln + hi_ln);
        if ok(mid.exp()) {
            hi_ln = mid;
        } else {
            lo_ln = mid;
        }
    }
    hi_ln.exp()
}

fn pareto_front(mut pts: Vec<BoundaryPoint>) -> Vec<BoundaryPoint> {
    pts.sort_by(|a, b| a.d1.total_cmp(&b.d1).then(a.d2.total_cmp(&b.d2)));
    let mut out: Vec<BoundaryPoint> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(q) if p.d2 >= q.d2 => {}
            _ => out.push(p),
        }
    }
    out
}
