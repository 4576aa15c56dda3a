//! Checks that the twirl compiler reproduces the group-channel protocol.
//!
//! Finite groups are checked exactly: transcript laws are enumerated over
//! `G` for the channel run and over `G × G` for the compiled run. The Haar
//! case is checked through first and second moments of received vectors.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::protocol::{
    identity_support, run_session, transcript_law, twirl_compile, ContinuousAlice, ContinuousBob,
    ContinuousStrategy, EchoBob, FourSymbolAlice, FourSymbolBob, FourSymbolStrategy, Party,
    Payload, ProbeAlice, Role, TranscriptLaw,
};
use crate::security::montecarlo::accumulate;
use crate::simple::{FourSymbolCodeword, InterpolationStrategy};
use crate::so3::{Group, MisalignmentDistribution, Rotation, Vec3};
use crate::ExactProb;

/// Deterministic test protocols run through both constructions.
const PROTOCOLS: [&str; 4] = ["probe-echo", "four-symbol-honest", "four-symbol-cheat", "continuous-interpolate"];

fn make_parties(name: &str) -> (Box<dyn Party<f64>>, Box<dyn Party<f64>>) {
    match name {
        "probe-echo" => (
            Box::new(
                ProbeAlice::new(vec![Vec3::unit_x(), Vec3::new(0.6, 0.0, 0.8)]).expecting_echo(),
            ),
            Box::new(EchoBob),
        ),
        "four-symbol-honest" => (
            Box::new(FourSymbolAlice::new(FourSymbolStrategy::Honest { bit: 1 })),
            Box::new(FourSymbolBob),
        ),
        "four-symbol-cheat" => (
            Box::new(FourSymbolAlice::new(FourSymbolStrategy::Cheat {
                commit_symbol: 1,
                reveal: FourSymbolCodeword { a: 1, b: 0 },
            })),
            Box::new(FourSymbolBob),
        ),
        "continuous-interpolate" => (
            Box::new(ContinuousAlice::new(ContinuousStrategy::Interpolate {
                strategy: InterpolationStrategy::new(0.5).expect("valid alpha"),
                reveal_bit: 1,
            })),
            Box::new(ContinuousBob),
        ),
        other => unreachable!("unknown protocol {other}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolCheck {
    pub protocol: &'static str,
    /// Distinct transcripts in the channel-run law.
    pub support: usize,
    pub compiled_equal: bool,
    pub one_sided_equal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTwirlCheck {
    pub n: u32,
    /// Law of `U_B⁻¹ U_A` equals `uniform(Z_n)`.
    pub relative_frame_uniform: bool,
    pub protocols: Vec<ProtocolCheck>,
}

impl CyclicTwirlCheck {
    pub fn passed(&self) -> bool {
        self.relative_frame_uniform
            && self.protocols.iter().all(|p| p.compiled_equal && p.one_sided_equal)
    }
}

fn rotation_key(r: &Rotation<f64>) -> Vec<i64> {
    r.to_array().iter().map(|x| (x * 1e9).round() as i64).collect()
}

fn laws_equal(a: &TranscriptLaw, b: &TranscriptLaw) -> bool {
    let nonzero = |l: &TranscriptLaw| -> TranscriptLaw {
        l.iter().filter(|(_, p)| !p.is_zero()).map(|(k, p)| (k.clone(), p.clone())).collect()
    };
    nonzero(a) == nonzero(b)
}

/// Exact check for `G = Z_n`.
pub fn cyclic_twirl_check(n: u32) -> Result<CyclicTwirlCheck> {
    let mu = MisalignmentDistribution::<f64>::cyclic(n)?;
    let compiler = twirl_compile(&mu)?;
    let group = compiler.group().uniform::<f64>().enumerate_support()?;
    let id = identity_support::<f64>();

    let mut relative: BTreeMap<Vec<i64>, ExactProb> = BTreeMap::new();
    for (ua, pa) in &group {
        for (ub, pb) in &group {
            *relative.entry(rotation_key(&ub.inverse().compose(ua))).or_insert_with(ExactProb::zero) +=
                pa * pb;
        }
    }
    let uniform: BTreeMap<Vec<i64>, ExactProb> =
        group.iter().map(|(r, p)| (rotation_key(r), p.clone())).collect();

    let protocols = PROTOCOLS
        .iter()
        .map(|&name| {
            let alice = || make_parties(name).0;
            let bob = || make_parties(name).1;
            let channel = transcript_law(&id, &id, &group, &alice, &bob);
            let compiled = transcript_law(&group, &group, &id, &alice, &bob);
            let one_sided = transcript_law(&group, &id, &id, &alice, &bob);
            ProtocolCheck {
                protocol: name,
                support: channel.len(),
                compiled_equal: laws_equal(&channel, &compiled),
                one_sided_equal: laws_equal(&channel, &one_sided),
            }
        })
        .collect();

    Ok(CyclicTwirlCheck {
        n,
        relative_frame_uniform: relative == uniform,
        protocols,
    })
}

/// First and second moments of a set of unit vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: [f64; 3],
    /// `E[v vᵀ]`.
    pub second: [[f64; 3]; 3],
}

impl Moments {
    /// Largest deviation from the sphere moments `0` and `I/3`.
    pub fn max_delta(&self) -> f64 {
        let mut m = self.mean.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 / 3.0 } else { 0.0 };
                m = m.max((self.second[i][j] - target).abs());
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sums {
    n: u64,
    first: [f64; 3],
    second: [[f64; 3]; 3],
}

impl Sums {
    const ZERO: Sums = Sums {
        n: 0,
        first: [0.0; 3],
        second: [[0.0; 3]; 3],
    };

    fn add(&mut self, v: &Vec3<f64>) {
        let a = v.as_array();
        self.n += 1;
        for i in 0..3 {
            self.first[i] += a[i];
            for j in 0..3 {
                self.second[i][j] += a[i] * a[j];
            }
        }
    }

    fn merge(&mut self, o: &Sums) {
        self.n += o.n;
        for i in 0..3 {
            self.first[i] += o.first[i];
            for j in 0..3 {
                self.second[i][j] += o.second[i][j];
            }
        }
    }

    fn moments(&self) -> Moments {
        let n = self.n as f64;
        Moments {
            mean: self.first.map(|x| x / n),
            second: self.second.map(|row| row.map(|x| x / n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarTwirlCheck {
    pub samples: u64,
    pub seed: u64,
    pub threshold: f64,
    /// Bob's received vector over the Haar channel.
    pub channel: Moments,
    /// Bob's received vector in the compiled protocol over the noiseless channel.
    pub compiled: Moments,
}

impl HaarTwirlCheck {
    pub fn passed(&self) -> bool {
        self.channel.max_delta() < self.threshold && self.compiled.max_delta() < self.threshold
    }
}

pub const HAAR_MOMENT_THRESHOLD: f64 = 0.02;

fn first_received(view: &[crate::protocol::Message<f64>]) -> Option<Vec3<f64>> {
    view.iter().find(|m| m.is_from(Role::Alice)).and_then(|m| match m.payload {
        Payload::Vector(v) => Some(v),
        Payload::Classical(_) => None,
    })
}

/// Moment check for the Haar group. Both constructions send the same fixed
/// vector; the compiled run uses seed `seed + 1`.
pub fn haar_twirl_check(samples: u64, seed: u64) -> Result<HaarTwirlCheck> {
    if samples == 0 {
        return Err(Error::InvalidParams("samples must be at least 1".into()));
    }
    let mu = MisalignmentDistribution::<f64>::HaarSO3;
    let compiler = twirl_compile(&mu)?;
    debug_assert_eq!(compiler.group(), Group::Haar);
    let v = Vec3::new(0.6, 0.0, 0.8);

    let channel = accumulate(
        samples,
        seed,
        Sums::ZERO,
        |rng, acc| {
            let mut alice = ProbeAlice::new(vec![v]).expecting_echo();
            let t = run_session(&mut alice, &mut EchoBob, &mu, rng);
            acc.add(&first_received(&t.bob_view).expect("probe delivered"));
        },
        Sums::merge,
    );
    let compiled = accumulate(
        samples,
        seed.wrapping_add(1),
        Sums::ZERO,
        |rng, acc| {
            let alice: Box<dyn Party<f64>> = Box::new(ProbeAlice::new(vec![v]).expecting_echo());
            let t = compiler.run(alice, Box::new(EchoBob), rng);
            acc.add(&first_received(&t.bob_view).expect("probe delivered"));
        },
        Sums::merge,
    );
    Ok(HaarTwirlCheck {
        samples,
        seed,
        threshold: HAAR_MOMENT_THRESHOLD,
        channel: channel.moments(),
        compiled: compiled.moments(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups_pass() {
        for n in [1, 2, 4, 8] {
            let c = cyclic_twirl_check(n).unwrap();
            assert!(c.passed(), "{c:?}");
            if n > 1 {
                assert!(c.protocols.iter().any(|p| p.support > 1));
            }
        }
    }

    #[test]
    fn non_group_rejected() {
        let mu = MisalignmentDistribution::<f64>::two_point(vec![0.3, 0.4]).unwrap();
        let err = twirl_compile(&mu).unwrap_err();
        assert!(err.to_string().contains("not a uniform group distribution"));
    }

    #[test]
    fn unequal_laws_detected() {
        // a Z_4 channel run compared against a Z_2 compiled run must differ
        let z4 = MisalignmentDistribution::<f64>::cyclic(4).unwrap().enumerate_support().unwrap();
        let z2 = MisalignmentDistribution::<f64>::cyclic(2).unwrap().enumerate_support().unwrap();
        let id = identity_support::<f64>();
        let alice = || make_parties("probe-echo").0;
        let bob = || make_parties("probe-echo").1;
        let a = transcript_law(&id, &id, &z4, &alice, &bob);
        let b = transcript_law(&z2, &z2, &id, &alice, &bob);
        assert!(!laws_equal(&a, &b));
    }

    #[test]
    fn haar_moments_small_sample() {
        let h = haar_twirl_check(20_000, 42).unwrap();
        assert!(h.channel.max_delta() < 0.05);
        assert!(h.compiled.max_delta() < 0.05);
        assert_eq!(h, haar_twirl_check(20_000, 42).unwrap());
    }
}
