//! Security figures of the four-symbol and continuous schemes.

use num_traits::Zero;

use crate::error::Result;
use crate::protocol::{run_session, ContinuousAlice, ContinuousBob, ContinuousStrategy};
use crate::scalar::{Probability, Real};
use crate::security::montecarlo::{estimate, Estimate};
use crate::simple::{
    arc_overlap, continuous_accept_probability, continuous_mu, four_symbol_channel_law,
    four_symbol_verify, FourSymbolCodeword, InterpolationStrategy,
};
use crate::ExactProb;

#[derive(Debug, Clone, PartialEq)]
pub struct FourSymbolAnalysis {
    /// `Σ_s |P(s|0) - P(s|1)|` over received symbols.
    pub concealing_distance: ExactProb,
    pub soundness: ExactProb,
    /// Best probability of opening to the bit opposite the committed symbol.
    pub binding_flip: ExactProb,
    pub flip_commit: u8,
    pub flip_reveal: FourSymbolCodeword,
    /// `max over sent symbols of best_p0 + best_p1`.
    pub binding_sum_max: ExactProb,
}

fn accept_mass(law: &[[ExactProb; 4]; 4], sent: u8, reveal: FourSymbolCodeword) -> ExactProb {
    (0..4u8)
        .filter(|&r| four_symbol_verify(r, reveal).is_accept())
        .map(|r| law[sent as usize][r as usize].clone())
        .sum()
}

/// Enumerates the symbol channel against every honest commitment and every
/// (sent symbol, reveal) pair.
pub fn four_symbol_analysis() -> FourSymbolAnalysis {
    let law = four_symbol_channel_law();
    let half = ExactProb::new(1.into(), 2.into());

    // received[r][b]: probability of symbol r given bit b
    let mut received: [[ExactProb; 2]; 4] = std::array::from_fn(|_| [ExactProb::zero(), ExactProb::zero()]);
    let mut soundness = ExactProb::zero();
    for cw in FourSymbolCodeword::all() {
        let s = cw.symbol() as usize;
        for (r, slot) in received.iter_mut().enumerate() {
            slot[cw.b as usize] += half.clone() * law[s][r].clone();
        }
        soundness += ExactProb::new(1.into(), 4.into()) * accept_mass(&law, cw.symbol(), cw);
    }
    let concealing_distance = received.iter().map(|p| p[0].abs_diff(&p[1])).sum();

    let mut flip = (ExactProb::zero(), 0u8, FourSymbolCodeword::all()[0]);
    let mut sum_max = ExactProb::zero();
    for sent in 0..4u8 {
        let mut best = [ExactProb::zero(), ExactProb::zero()];
        for cw in FourSymbolCodeword::all() {
            let p = accept_mass(&law, sent, cw);
            if p > best[cw.b as usize] {
                best[cw.b as usize] = p.clone();
            }
            if cw.b != sent % 2 && p > flip.0 {
                flip = (p, sent, cw);
            }
        }
        let [b0, b1] = best;
        sum_max = sum_max.max(b0 + b1);
    }
    FourSymbolAnalysis {
        concealing_distance,
        soundness,
        binding_flip: flip.0,
        flip_commit: flip.1,
        flip_reveal: flip.2,
        binding_sum_max: sum_max,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousAnalysis<T> {
    /// `quarter_mass[b][k]`: probability, given bit `b`, that the received
    /// angle lies in `[kπ/2, (k+1)π/2)`.
    pub quarter_mass: [[T; 4]; 2],
    /// `Σ_k |quarter_mass[0][k] - quarter_mass[1][k]|`.
    pub concealing_distance: T,
    /// Minimum over honest codewords of the acceptance probability.
    pub soundness: T,
}

/// Every acceptance arc starts at a multiple of π/2, so the received-angle
/// law restricted to quarter arcs determines Bob's acceptance statistics.
pub fn continuous_analysis<T: Real>() -> ContinuousAnalysis<T> {
    let mut quarter_mass = [[T::zero(); 4]; 2];
    let quarter = T::FRAC_PI_2();
    let mut soundness = T::one();
    for cw in FourSymbolCodeword::all() {
        for (k, m) in quarter_mass[cw.b as usize].iter_mut().enumerate() {
            let start = T::lit(k as f64) * quarter;
            *m = *m + T::lit(0.5) * arc_overlap(cw.angle(), T::PI(), start, quarter) / T::PI();
        }
        soundness = soundness.min(continuous_accept_probability(cw.angle(), cw));
    }
    let concealing_distance = (0..4)
        .map(|k| (quarter_mass[0][k] - quarter_mass[1][k]).abs())
        .fold(T::zero(), |a, b| a + b);
    ContinuousAnalysis {
        quarter_mass,
        concealing_distance,
        soundness,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheatRow {
    pub alpha: f64,
    /// `(1 - α/2, (1 + α)/2)`.
    pub closed_form: (f64, f64),
    /// Arc-length probabilities.
    pub arc: (f64, f64),
    /// Session-level estimates for revealing bit 0 and bit 1.
    pub monte_carlo: Option<(Estimate, Estimate)>,
}

impl CheatRow {
    /// Whether both Monte Carlo estimates lie within `k` standard errors of
    /// the closed forms. `true` when no estimate was run.
    pub fn agrees(&self, k: f64) -> bool {
        self.monte_carlo.is_none_or(|(e0, e1)| {
            e0.agrees_with(self.closed_form.0, k) && e1.agrees_with(self.closed_form.1, k)
        })
    }
}

/// Fraction of full sessions in which the interpolating Alice gets
/// `reveal_bit` accepted.
pub fn interpolation_monte_carlo(alpha: f64, reveal_bit: u8, trials: u64, seed: u64) -> Result<Estimate> {
    let strategy = InterpolationStrategy::new(alpha)?;
    let mu = continuous_mu::<f64>();
    Ok(estimate(trials, seed, |rng| {
        let mut alice = ContinuousAlice::new(ContinuousStrategy::Interpolate {
            strategy,
            reveal_bit,
        });
        let t = run_session(&mut alice, &mut ContinuousBob, &mu, rng);
        t.outcome.accepted_bit() == Some(reveal_bit)
    }))
}

/// Interpolation-attack curve. With `trials = Some(n)` each α is also
/// estimated by `n` sessions per revealed bit; the seed for α index `i` and
/// bit `b` is `seed + 2i + b`.
pub fn cheat_curve_continuous(alphas: &[f64], trials: Option<u64>, seed: u64) -> Result<Vec<CheatRow>> {
    alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let s = InterpolationStrategy::new(alpha)?;
            let monte_carlo = match trials {
                Some(n) => {
                    let base = seed.wrapping_add(2 * i as u64);
                    Some((
                        interpolation_monte_carlo(alpha, 0, n, base)?,
                        interpolation_monte_carlo(alpha, 1, n, base.wrapping_add(1))?,
                    ))
                }
                None => None,
            };
            Ok(CheatRow {
                alpha,
                closed_form: s.closed_form(),
                arc: s.arc_probabilities(),
                monte_carlo,
            })
        })
        .collect()
}

/// The α grid `{0, 1/n, ..., 1}`.
pub fn alpha_grid(n: u32) -> Vec<f64> {
    (0..=n).map(|i| f64::from(i) / f64::from(n)).collect()
}
