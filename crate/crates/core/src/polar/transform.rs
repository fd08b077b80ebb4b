use crate::{Error, Result};

/// `x = u F^{⊗m}` over GF(2) with `F = [[1, 0], [1, 1]]`, natural order.
pub fn polar_transform(bits: &[u8]) -> Result<Vec<u8>> {
    if !bits.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(bits.len()));
    }
    let mut x: Vec<u8> = bits.iter().map(|b| b & 1).collect();
    transform_in_place(&mut x);
    Ok(x)
}

/// Length must be a power of two.
pub(crate) fn transform_in_place(x: &mut [u8]) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for block in x.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (p, q) in a.iter_mut().zip(b.iter()) {
                *p ^= *q;
            }
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        assert_eq!(polar_transform(&[1, 1]).unwrap(), vec![0, 1]);
        assert_eq!(polar_transform(&[1, 0, 0, 0]).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(polar_transform(&[0, 0, 0, 1]).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(polar_transform(&[1]).unwrap(), vec![1]);
        assert!(matches!(polar_transform(&[0, 1, 1]), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn matches_kronecker_generator() {
        // entry (r, c) of F^{⊗3} is 1 iff the bits of c are a subset of those of r
        let n = 8;
        for r in 0..n {
            let mut u = vec![0u8; n];
            u[r] = 1;
            let row: Vec<u8> = (0..n).map(|c| u8::from(c & !r == 0)).collect();
            assert_eq!(polar_transform(&u).unwrap(), row, "row {r}");
        }
    }

    proptest! {
        #[test]
        fn involution_and_linearity(a in prop::collection::vec(0u8..2, 64), b in prop::collection::vec(0u8..2, 64)) {
            let ta = polar_transform(&a).unwrap();
            prop_assert_eq!(polar_transform(&ta).unwrap(), a.clone());
            let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let tb = polar_transform(&b).unwrap();
            let sum: Vec<u8> = ta.iter().zip(&tb).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(polar_transform(&ab).unwrap(), sum);
        }
    }
}
