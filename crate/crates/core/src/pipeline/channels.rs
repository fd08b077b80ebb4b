use crate::math::{SeededRandomSource, TruncGaussian};
use crate::polar::{ChannelDraw, TestChannel};
use crate::quantizer::{
    ideal_quantize, plain_posterior, shaping_posterior, wz_side_posterior, AskAlphabet,
    ShapingPosterior,
};

/// Test channel of a modulo encoder whose decoder sees
/// `Y' = X' - alpha Z mod A` with `Z ~ N(0, side_var)`.
#[derive(Debug, Clone)]
pub struct ModuloChannel {
    pub alphabet: AskAlphabet,
    pub shaping: TruncGaussian,
    pub alpha: f64,
    pub side_var: f64,
}

impl TestChannel for ModuloChannel {
    fn alphabet_size(&self) -> usize {
        self.alphabet.size()
    }

    fn draw(&mut self, rng: &mut SeededRandomSource) -> ChannelDraw {
        let iv = self.alphabet.interval();
        let xp = rng.uniform_range(-iv.half(), iv.half());
        let quant = shaping_posterior(xp, &self.alphabet, &self.shaping);
        let symbol = ideal_quantize(&quant, rng);
        let yp = iv.wrap(xp - self.alpha * rng.normal(self.side_var));
        let tau2 = self.alpha * self.alpha * self.side_var;
        let side = wz_side_posterior(yp, &self.alphabet, &self.shaping, tau2);
        ChannelDraw {
            quant: quant.into_pmf(),
            side: side.into_pmf(),
            symbol,
        }
    }
}

/// Test channel of a plain encoder of `gain X`, `X ~ N(0, sigma_x2)`,
/// whose decoder knows only the prior.
#[derive(Debug, Clone)]
pub struct PlainChannel {
    pub alphabet: AskAlphabet,
    pub gain: f64,
    pub sigma_x2: f64,
    pub sigma_d2: f64,
    pub prior: ShapingPosterior,
}

impl TestChannel for PlainChannel {
    fn alphabet_size(&self) -> usize {
        self.alphabet.size()
    }

    fn draw(&mut self, rng: &mut SeededRandomSource) -> ChannelDraw {
        let x = rng.normal(self.sigma_x2);
        let quant = plain_posterior(self.gain * x, &self.alphabet, self.sigma_d2);
        let symbol = ideal_quantize(&quant, rng);
        ChannelDraw {
            quant: quant.into_pmf(),
            side: self.prior.pmf().to_vec(),
            symbol,
        }
    }
}
