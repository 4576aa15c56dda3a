//! Session-level estimates: full protocol runs through the engine.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{decode_commit, encode, lattice_mu, verify_reveal, LatticeCodeword, LatticeParams};
use crate::protocol::{
    FourSymbolAlice, FourSymbolBob, FourSymbolStrategy, run_parallel, run_session, LatticeAlice, LatticeAliceStrategy, LatticeBob, ParallelOutcome, PartyPair,
    Scheme,
};
use crate::security::montecarlo::{estimate, Estimate};
use crate::simple::{four_symbol_mu, FourSymbolCodeword};
use crate::{ExactProb, Verdict};
use rand::Rng;

/// Honest sessions with a uniform bit; success when Bob accepts that bit.
pub fn soundness_monte_carlo(scheme: Scheme<'_, f64>, trials: u64, seed: u64) -> Estimate {
    let mu = scheme.channel();
    estimate(trials, seed, |rng| {
        let bit = rng.random_range(0..2u8);
        let mut alice = scheme.honest_alice(bit);
        let mut bob = scheme.bob();
        run_session(alice.as_mut(), bob.as_mut(), &mu, rng).outcome.accepted_bit() == Some(bit)
    })
}

/// Four-symbol sessions where Alice sends `commit_symbol` and reveals
/// `reveal`; success when Bob accepts `reveal.b`.
pub fn four_symbol_cheat_monte_carlo(
    commit_symbol: u8,
    reveal: FourSymbolCodeword,
    trials: u64,
    seed: u64,
) -> Estimate {
    let mu = four_symbol_mu::<f64>();
    estimate(trials, seed, |rng| {
        let mut alice = FourSymbolAlice::new(FourSymbolStrategy::Cheat {
            commit_symbol,
            reveal,
        });
        let t = run_session(&mut alice, &mut FourSymbolBob, &mu, rng);
        t.outcome.accepted_bit() == Some(reveal.b)
    })
}

/// Sessions where Alice sends `v(commit)` and reveals `reveal`; success when
/// Bob accepts `parity(reveal)`.
pub fn lattice_cheat_monte_carlo(
    params: &LatticeParams<f64>,
    commit: &LatticeCodeword,
    reveal: &LatticeCodeword,
    trials: u64,
    seed: u64,
) -> Estimate {
    let mu = lattice_mu(params);
    let target = reveal.parity();
    estimate(trials, seed, |rng| {
        let mut alice = LatticeAlice::new(
            params,
            LatticeAliceStrategy::Fixed {
                commit: commit.clone(),
                reveal: reveal.clone(),
            },
        );
        let t = run_session(&mut alice, &mut LatticeBob::new(params), &mu, rng);
        t.outcome.accepted_bit() == Some(target)
    })
}

fn instance_parties<'a>(
    params: &'a LatticeParams<f64>,
    i: usize,
    commit: &LatticeCodeword,
    reveal: &LatticeCodeword,
    honest_bits: &[u8],
) -> PartyPair<'a, f64> {
    let strategy = if i == 0 {
        LatticeAliceStrategy::Fixed {
            commit: commit.clone(),
            reveal: reveal.clone(),
        }
    } else {
        LatticeAliceStrategy::Honest {
            bit: honest_bits[i - 1],
        }
    };
    (
        Box::new(LatticeAlice::new(params, strategy)),
        Box::new(LatticeBob::new(params)),
    )
}

/// `k` parallel instances: instance 0 plays the cheat `(commit, reveal)`,
/// the rest are honest. Exact probability that every instance accepts,
/// enumerated over the joint channel support `(2d)^k` with the honest
/// instances committing to `honest`.
pub fn parallel_flip_exact(
    params: &LatticeParams<f64>,
    k: usize,
    commit: &LatticeCodeword,
    reveal: &LatticeCodeword,
    honest: &LatticeCodeword,
    budget: u128,
) -> Result<ExactProb> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let support = lattice_mu(params).enumerate_support()?;
    let needed = (support.len() as u128)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::InvalidParams("joint support overflows".into()))?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let accepts = |sent: &LatticeCodeword, opened: &LatticeCodeword| -> Result<Vec<(bool, ExactProb)>> {
        let v = encode(params, sent)?;
        Ok(support
            .iter()
            .map(|(r, w)| {
                let ok = decode_commit(params, &r.apply(&v))
                    .is_some_and(|x| verify_reveal(params, &x, opened.parity(), opened) == Verdict::Accept);
                (ok, w.clone())
            })
            .collect())
    };
    let cheat = accepts(commit, reveal)?;
    let honest_row = accepts(honest, honest)?;

    // walk the joint support as a mixed-radix counter
    let mut total = ExactProb::zero();
    let mut idx = vec![0usize; k];
    loop {
        let mut ok = cheat[idx[0]].0;
        let mut w = cheat[idx[0]].1.clone();
        for &j in &idx[1..] {
            ok &= honest_row[j].0;
            w *= honest_row[j].1.clone();
        }
        if ok {
            total += w;
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < support.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Parallel runs of the same setting; success when all instances accept and
/// instance 0 opens to `parity(reveal)`. Honest instances use random bits.
pub fn parallel_flip_monte_carlo(
    params: &LatticeParams<f64>,
    k: usize,
    commit: &LatticeCodeword,
    reveal: &LatticeCodeword,
    trials: u64,
    seed: u64,
) -> Estimate {
    let mu = lattice_mu(params);
    estimate(trials, seed, |rng| {
        let bits: Vec<u8> = (1..k).map(|_| rng.random_range(0..2u8)).collect();
        let t = run_parallel(
            k,
            &mut |i| instance_parties(params, i, commit, reveal, &bits),
            &mu,
            rng,
        );
        match t.outcome {
            ParallelOutcome::Accepted(got) => got[0] == reveal.parity() && got[1..] == bits[..],
            ParallelOutcome::Aborted { .. } => false,
        }
    })
}

/// Rotation consistency over `trials` honest sessions: the largest
/// deviation between the two views of any vector message.
pub fn max_rotation_error(scheme: Scheme<'_, f64>, trials: u64, seed: u64) -> f64 {
    let mu = scheme.channel();
    crate::security::montecarlo::accumulate(
        trials,
        seed,
        0.0f64,
        |rng, acc| {
            let bit = rng.random_range(0..2u8);
            let mut alice = scheme.honest_alice(bit);
            let mut bob = scheme.bob();
            let t = run_session(alice.as_mut(), bob.as_mut(), &mu, rng);
            *acc = acc.max(t.rotation_consistency_error());
        },
        |a, b| *a = a.max(*b),
    )
}

