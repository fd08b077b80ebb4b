//! Successive cancellation primitives shared by the list engine and the
//! Monte Carlo construction.

use std::rc::Rc;

use crate::math::softplus;

pub(crate) const LLR_CLAMP: f64 = 1000.0;

/// Exact `2 atanh(tanh(a/2) tanh(b/2))`.
#[inline]
pub(crate) fn boxplus(a: f64, b: f64) -> f64 {
    let s = a.signum() * b.signum();
    s * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// `ln P(bit)` for `llr = ln(P(0) / P(1))`.
#[inline]
pub(crate) fn log_prob(llr: f64, bit: u8) -> f64 {
    if bit == 0 {
        -softplus(-llr)
    } else {
        -softplus(llr)
    }
}

/// `P(1)` for `llr = ln(P(0) / P(1))`.
#[inline]
pub(crate) fn prob_one(llr: f64) -> f64 {
    1.0 / (1.0 + llr.exp())
}

/// Level-`level` LLR of a symbol pmf given the lower bits `lower`.
pub(crate) fn level_llr(pmf: &[f64], level: usize, lower: usize) -> f64 {
    let step = 1usize << (level + 1);
    let (mut p0, mut p1) = (0.0, 0.0);
    let mut k = lower;
    while k < pmf.len() {
        p0 += pmf[k];
        p1 += pmf[k + (1 << level)];
        k += step;
    }
    if p0 <= 0.0 && p1 <= 0.0 {
        return 0.0;
    }
    (p0.ln() - p1.ln()).clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// LLR stages of one SC tree. Stage `d` holds the `n >> d` LLRs of the
/// active node at depth `d`; stages are shared between list paths until
/// written.
#[derive(Clone, Debug)]
pub(crate) struct LlrTree {
    stages: Vec<Rc<Vec<f64>>>,
}

impl LlrTree {
    pub(crate) fn new(channel: Vec<f64>) -> Self {
        let n = channel.len();
        let m = n.trailing_zeros() as usize;
        let mut stages = Vec::with_capacity(m + 1);
        stages.push(Rc::new(channel));
        for d in 1..=m {
            stages.push(Rc::new(vec![0.0; n >> d]));
        }
        Self { stages }
    }

    /// Updates the stages for leaf `phi` and returns its LLR.
    pub(crate) fn leaf(&mut self, phi: usize, sums: &PartialSums) -> f64 {
        let m = self.stages.len() - 1;
        let mut d = 0;
        if phi > 0 {
            d = m - 1 - phi.trailing_zeros() as usize;
            let src = Rc::clone(&self.stages[d]);
            let dst = Rc::make_mut(&mut self.stages[d + 1]);
            let half = dst.len();
            let left = &sums.left[d];
            for i in 0..half {
                let a = src[i];
                let b = src[i + half];
                dst[i] = if left[i] == 0 { b + a } else { b - a };
            }
            d += 1;
        }
        while d < m {
            let src = Rc::clone(&self.stages[d]);
            let dst = Rc::make_mut(&mut self.stages[d + 1]);
            let half = dst.len();
            for i in 0..half {
                dst[i] = boxplus(src[i], src[i + half]);
            }
            d += 1;
        }
        self.stages[m][0]
    }
}

/// Partial sums of decided bits. `left[d]` is the output of the left
/// child of the active node at depth `d`.
#[derive(Clone, Debug)]
pub(crate) struct PartialSums {
    left: Vec<Vec<u8>>,
    m: usize,
    codeword: Vec<u8>,
}

impl PartialSums {
    pub(crate) fn new(n: usize) -> Self {
        let m = n.trailing_zeros() as usize;
        Self {
            left: (0..m).map(|d| vec![0; n >> (d + 1)]).collect(),
            m,
            codeword: Vec::new(),
        }
    }

    /// Records the decision `bit` at leaf `phi`. After the last leaf the
    /// codeword is available through [`PartialSums::codeword`].
    pub(crate) fn commit(&mut self, phi: usize, bit: u8) {
        let m = self.m;
        let mut out = vec![bit];
        let mut d = m;
        loop {
            if d == 0 {
                self.codeword = out;
                return;
            }
            if (phi >> (m - d)) & 1 == 0 {
                self.left[d - 1] = out;
                return;
            }
            let l = &self.left[d - 1];
            let mut next = Vec::with_capacity(2 * out.len());
            next.extend(l.iter().zip(&out).map(|(a, b)| a ^ b));
            next.extend_from_slice(&out);
            out = next;
            d -= 1;
        }
    }

    pub(crate) fn codeword(&self) -> &[u8] {
        &self.codeword
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::polar_transform;

    #[test]
    fn boxplus_matches_tanh_rule() {
        for &(a, b) in &[(0.3, -1.2), (5.0, 4.0), (-20.0, 0.01), (0.0, 3.0), (12.0, -15.0)] {
            let direct = 2.0 * ((a / 2.0f64).tanh() * (b / 2.0f64).tanh()).atanh();
            assert!((boxplus(a, b) - direct).abs() < 1e-9, "{a} {b}");
        }
        // beyond the range of the tanh form, against the asymptotic expansion
        let expect = -40.0 + (-5.0f64).exp().ln_1p() - (-85.0f64).exp().ln_1p();
        assert!((boxplus(40.0, -45.0) - expect).abs() < 1e-12);
        assert!((boxplus(900.0, 950.0) - 900.0).abs() < 1e-9);
    }

    #[test]
    fn partial_sums_produce_the_transform() {
        let v = [1u8, 0, 1, 1, 0, 0, 1, 0];
        let mut ps = PartialSums::new(8);
        for (phi, &b) in v.iter().enumerate() {
            ps.commit(phi, b);
        }
        assert_eq!(ps.codeword(), polar_transform(&v).unwrap().as_slice());
    }

    #[test]
    fn level_llr_groups_by_lower_bits() {
        let pmf = [0.1, 0.2, 0.3, 0.4];
        assert!((level_llr(&pmf, 0, 0) - (0.4f64 / 0.6).ln()).abs() < 1e-12);
        assert!((level_llr(&pmf, 1, 0) - (0.1f64 / 0.3).ln()).abs() < 1e-12);
        assert!((level_llr(&pmf, 1, 1) - (0.2f64 / 0.4).ln()).abs() < 1e-12);
        assert_eq!(level_llr(&[0.0, 0.0, 1.0, 0.0], 1, 1), 0.0);
    }

    #[test]
    fn sc_leaf_llrs_are_exact_posteriors() {
        // for n = 4 the leaf LLR equals the brute-force conditional
        let n = 4;
        let p1 = [0.2, 0.7, 0.45, 0.9];
        let llr: Vec<f64> = p1.iter().map(|p: &f64| ((1.0 - p) / p).ln()).collect();
        let v = [1u8, 0, 1, 1];
        let mut tree = LlrTree::new(llr);
        let mut ps = PartialSums::new(n);
        for phi in 0..n {
            let got = tree.leaf(phi, &ps);
            let mut mass = [0.0f64; 2];
            for pat in 0..(1usize << n) {
                let u: Vec<u8> = (0..n).map(|i| ((pat >> i) & 1) as u8).collect();
                if u[..phi] != v[..phi] {
                    continue;
                }
                let x = polar_transform(&u).unwrap();
                let pr: f64 = x
                    .iter()
                    .zip(&p1)
                    .map(|(&b, &p)| if b == 1 { p } else { 1.0 - p })
                    .product();
                mass[u[phi] as usize] += pr;
            }
            assert!((got - (mass[0] / mass[1]).ln()).abs() < 1e-10, "phi {phi}");
            ps.commit(phi, v[phi]);
        }
    }
}
