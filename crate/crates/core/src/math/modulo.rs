use crate::{Error, Result};

/// The interval `[-A/2, A/2)` used by the scalar modulo operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModInterval {
    width: f64,
}

impl ModInterval {
    pub fn new(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::domain(format!(
                "modulo interval width must be positive and finite, got {width}"
            )));
        }
        Ok(Self { width })
    }

    /// The width `A`.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn half(&self) -> f64 {
        0.5 * self.width
    }

    /// Returns `(y, k)` with `y = x - k*A` and `y` in `[-A/2, A/2)`.
    pub fn reduce(&self, x: f64) -> Result<(f64, i64)> {
        if !x.is_finite() {
            return Err(Error::domain(format!("cannot reduce non-finite value {x}")));
        }
        Ok(self.reduce_finite(x))
    }

    /// Reduction without the finiteness check; `x` must be finite.
    #[inline]
    pub fn wrap(&self, x: f64) -> f64 {
        self.reduce_finite(x).0
    }

    #[inline]
    fn reduce_finite(&self, x: f64) -> (f64, i64) {
        let a = self.width;
        let h = 0.5 * a;
        let mut k = ((x + h) / a).floor();
        let mut y = x - k * a;
        // floor() can land one period off when x + A/2 rounds across an integer
        if y >= h {
            y -= a;
            k += 1.0;
        } else if y < -h {
            y += a;
            k -= 1.0;
        }
        if y >= h {
            y = -h;
        }
        (y, k as i64)
    }

    /// True if `x` lies in `[-A/2, A/2)`.
    pub fn contains(&self, x: f64) -> bool {
        x >= -self.half() && x < self.half()
    }
}

/// Entrywise modulo operator: `x mod A`.
pub fn mod_reduce(x: f64, interval: ModInterval) -> Result<(f64, i64)> {
    interval.reduce(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: f64) -> ModInterval {
        ModInterval::new(a).unwrap()
    }

    #[test]
    fn reduces_examples() {
        let (y, k) = mod_reduce(3.7, iv(2.0)).unwrap();
        assert!((y + 0.3).abs() < 1e-12);
        assert_eq!(k, 2);
        assert_eq!(mod_reduce(-1.0, iv(2.0)).unwrap(), (-1.0, 0));
        assert_eq!(mod_reduce(1.0, iv(2.0)).unwrap(), (-1.0, 1));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ModInterval::new(0.0).is_err());
        assert!(ModInterval::new(-1.0).is_err());
        assert!(ModInterval::new(f64::NAN).is_err());
        assert!(mod_reduce(f64::INFINITY, iv(1.0)).is_err());
        assert!(mod_reduce(f64::NAN, iv(1.0)).is_err());
    }

    proptest! {
        #[test]
        fn lands_in_interval(x in -1e6f64..1e6, a in 1e-3f64..1e3) {
            let i = iv(a);
            let (y, k) = i.reduce(x).unwrap();
            prop_assert!(i.contains(y));
            prop_assert!((x - k as f64 * a - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }

        #[test]
        fn is_periodic(x in -1e3f64..1e3, a in 0.1f64..10.0, n in -1000i64..1000) {
            let i = iv(a);
            let y0 = i.wrap(x);
            let y1 = i.wrap(x + n as f64 * a);
            // equal up to rounding, or both at opposite ends of the interval
            let d = (y0 - y1).abs();
            let tol = 1e-9 * (1.0 + x.abs() + (n as f64 * a).abs());
            prop_assert!(d <= tol || (a - d).abs() <= tol);
        }
    }
}
