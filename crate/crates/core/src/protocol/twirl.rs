//! The group-twirl compiler.
//!
//! Given a protocol designed for a channel that is uniform over a group `G`,
//! each party privately draws `U ~ uniform(G)` once per session, applies it
//! to every vector it sends and applies `U⁻¹` to every vector it receives.
//! Over a noiseless channel the relative frame is then `U_B⁻¹ U_A`, again
//! uniform over `G`, so the compiled protocol reproduces the original one.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{run_with_rotation, Message, Party, PartyKind, Payload, Step, Transcript};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::so3::{Group, MisalignmentDistribution, Rotation};

/// Wraps a party so every vector it sends is pre-multiplied by its private
/// frame and every vector it sees is post-multiplied by the inverse.
pub struct Twirled<'a, T> {
    inner: Box<dyn Party<T> + 'a>,
    group: Option<Group>,
    frame: Option<Rotation<T>>,
}

impl<'a, T: Real> Twirled<'a, T> {
    /// Frame drawn from `uniform(group)` on the first step.
    pub fn new(inner: Box<dyn Party<T> + 'a>, group: Group) -> Self {
        Self {
            inner,
            group: Some(group),
            frame: None,
        }
    }

    pub fn with_frame(inner: Box<dyn Party<T> + 'a>, frame: Rotation<T>) -> Self {
        Self {
            inner,
            group: None,
            frame: Some(frame),
        }
    }

    pub fn frame(&self) -> Option<Rotation<T>> {
        self.frame
    }
}

impl<T: Real> Party<T> for Twirled<'_, T> {
    fn kind(&self) -> PartyKind {
        self.inner.kind()
    }

    fn step(&mut self, view: &[Message<T>], rng: &mut dyn RngCore) -> std::result::Result<Step<T>, String> {
        let frame = match (self.frame, self.group) {
            (Some(f), _) => f,
            (None, Some(g)) => *self.frame.insert(g.uniform::<T>().sample(rng)),
            (None, None) => Rotation::identity(),
        };
        let inverse = frame.inverse();
        let inner_view: Vec<Message<T>> = view
            .iter()
            .map(|m| Message {
                direction: m.direction,
                payload: m.payload.transformed(&inverse),
            })
            .collect();
        Ok(match self.inner.step(&inner_view, rng)? {
            Step::Send(p) => Step::Send(p.transformed(&frame)),
            other => other,
        })
    }
}

/// Compiler for protocols over a channel uniform on a group.
#[derive(Debug, Clone)]
pub struct TwirlCompiler {
    group: Group,
}

/// Accepts only channels that are uniform over a group.
pub fn twirl_compile<T: Real>(mu: &MisalignmentDistribution<T>) -> Result<TwirlCompiler> {
    mu.uniform_group()
        .map(|group| TwirlCompiler { group })
        .ok_or_else(|| Error::NotAGroup(mu.label()))
}

impl TwirlCompiler {
    pub fn group(&self) -> Group {
        self.group
    }

    /// The compiled protocol runs over the identity channel.
    pub fn channel<T: Real>(&self) -> MisalignmentDistribution<T> {
        MisalignmentDistribution::noiseless()
    }

    pub fn compile<'a, T: Real>(
        &self,
        alice: Box<dyn Party<T> + 'a>,
        bob: Box<dyn Party<T> + 'a>,
    ) -> (Twirled<'a, T>, Twirled<'a, T>) {
        (Twirled::new(alice, self.group), Twirled::new(bob, self.group))
    }

    /// Runs the compiled protocol and returns the session as the wrapped
    /// parties saw it; `rotation` is the effective frame `U_B⁻¹ U_A`.
    pub fn run<'a, T: Real>(
        &self,
        alice: Box<dyn Party<T> + 'a>,
        bob: Box<dyn Party<T> + 'a>,
        rng: &mut dyn RngCore,
    ) -> Transcript<T> {
        let (mut a, mut b) = self.compile(alice, bob);
        let outer = run_with_rotation(&mut a, &mut b, Rotation::identity(), rng);
        let fa = a.frame().unwrap_or_else(Rotation::identity);
        let fb = b.frame().unwrap_or_else(Rotation::identity);
        inner_transcript(&outer, &fa, &fb)
    }
}

/// Undoes the private frames of a twirled session.
pub fn inner_transcript<T: Real>(
    outer: &Transcript<T>,
    alice_frame: &Rotation<T>,
    bob_frame: &Rotation<T>,
) -> Transcript<T> {
    let undo = |view: &[Message<T>], frame: &Rotation<T>| -> Vec<Message<T>> {
        let inv = frame.inverse();
        view.iter()
            .map(|m| Message {
                direction: m.direction,
                payload: m.payload.transformed(&inv),
            })
            .collect()
    };
    Transcript {
        rotation: bob_frame.inverse().compose(&outer.rotation).compose(alice_frame),
        alice_view: undo(&outer.alice_view, alice_frame),
        bob_view: undo(&outer.bob_view, bob_frame),
        outcome: outer.outcome.clone(),
    }
}

/// Exact distribution over canonicalized transcripts.
pub type TranscriptLaw = BTreeMap<String, BigRational>;

fn quantize<T: Real>(x: T) -> i64 {
    (x.as_f64() * 1e9).round() as i64
}

/// Canonical key of a transcript: both views, the effective rotation and
/// the outcome, with reals quantized to 1e-9.
pub fn transcript_key<T: Real>(t: &Transcript<T>) -> String {
    let mut key = String::new();
    let rot: Vec<i64> = t.rotation.to_array().iter().map(|&x| quantize(x)).collect();
    key.push_str(&format!("R{rot:?}"));
    for (name, view) in [("A", &t.alice_view), ("B", &t.bob_view)] {
        key.push('|');
        key.push_str(name);
        for m in view {
            match &m.payload {
                Payload::Vector(v) => key.push_str(&format!(
                    "{:?}v[{},{},{}]",
                    m.direction,
                    quantize(v.x),
                    quantize(v.y),
                    quantize(v.z)
                )),
                Payload::Classical(c) => key.push_str(&format!("{:?}c{c:?}", m.direction)),
            }
        }
    }
    key.push_str(&format!("|{}", t.outcome));
    key
}

/// Enumerates the law of the wrapped parties' transcripts when Alice's frame,
/// Bob's frame and the channel rotation range over the given finite supports.
///
/// * channel run: trivial frames, channel = support of μ;
/// * compiled run: both frames over `G`, identity channel;
/// * one-sided run: only Alice's frame over `G`.
///
/// Parties are rebuilt for every branch and given the same fixed random
/// stream, so the law is exact for deterministic strategies.
pub fn transcript_law<'a, T: Real>(
    alice_frames: &[(Rotation<T>, BigRational)],
    bob_frames: &[(Rotation<T>, BigRational)],
    channel: &[(Rotation<T>, BigRational)],
    make_alice: &dyn Fn() -> Box<dyn Party<T> + 'a>,
    make_bob: &dyn Fn() -> Box<dyn Party<T> + 'a>,
) -> TranscriptLaw {
    let mut law = TranscriptLaw::new();
    for (fa, pa) in alice_frames {
        for (fb, pb) in bob_frames {
            for (r, pr) in channel {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let mut alice = Twirled::with_frame(make_alice(), *fa);
                let mut bob = Twirled::with_frame(make_bob(), *fb);
                let outer = run_with_rotation(&mut alice, &mut bob, *r, &mut rng);
                let key = transcript_key(&inner_transcript(&outer, fa, fb));
                *law.entry(key).or_insert_with(|| BigRational::from_integer(0.into())) +=
                    pa * pb * pr;
            }
        }
    }
    law
}

/// The trivial one-point frame support.
pub fn identity_support<T: Real>() -> Vec<(Rotation<T>, BigRational)> {
    vec![(Rotation::identity(), BigRational::one())]
}
