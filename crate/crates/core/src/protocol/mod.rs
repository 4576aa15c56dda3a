//! Two-party session engine over a misalignment channel.
//!
//! A session samples one rotation `R ~ μ` and applies it to every vector
//! Alice sends; vectors travelling from Bob to Alice get `R⁻¹`. Classical
//! payloads pass through untouched. Parties alternate turns starting with
//! Alice: a party keeps the turn while it sends and hands it over by
//! yielding. The session ends when either party finishes with an outcome.

mod parallel;
mod parties;
mod record;
mod twirl;

use std::fmt;

use rand::{Rng, RngCore};

use crate::scalar::Real;
use crate::so3::{MisalignmentDistribution, Rotation, Vec3};

pub use parallel::{run_parallel, run_parallel_with_rotations, ParallelOutcome, ParallelTranscript};
pub use parties::{
    ContinuousAlice, ContinuousBob, ContinuousStrategy, EchoBob, FourSymbolAlice, FourSymbolBob,
    FourSymbolStrategy, LatticeAlice, LatticeAliceStrategy, LatticeBob, ProbeAlice, Scheme,
};
pub use record::{parse_transcripts, render_transcript, replay_bob, SessionMeta};
pub use twirl::{identity_support, inner_transcript, transcript_key, transcript_law, twirl_compile, TranscriptLaw, TwirlCompiler, Twirled};

/// Upper bound on party steps in a single session.
pub const MAX_STEPS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn other(self) -> Self {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn from_sender(sender: Role) -> Self {
        match sender {
            Role::Alice => Direction::AliceToBob,
            Role::Bob => Direction::BobToAlice,
        }
    }

    pub fn sender(self) -> Role {
        match self {
            Direction::AliceToBob => Role::Alice,
            Direction::BobToAlice => Role::Bob,
        }
    }
}

/// Message contents. Only vectors are frame-sensitive.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload<T> {
    Vector(Vec3<T>),
    Classical(Vec<i64>),
}

impl<T: Real> Payload<T> {
    /// Applies `r` to a vector payload; classical data is returned unchanged.
    pub fn transformed(&self, r: &Rotation<T>) -> Self {
        match self {
            Payload::Vector(v) => Payload::Vector(r.apply(v)),
            Payload::Classical(c) => Payload::Classical(c.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message<T> {
    pub direction: Direction,
    pub payload: Payload<T>,
}

impl<T> Message<T> {
    pub fn is_from(&self, role: Role) -> bool {
        self.direction.sender() == role
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Outcome {
    Accepted(u8),
    Aborted(String),
}

impl Outcome {
    pub fn aborted(reason: impl Into<String>) -> Self {
        Outcome::Aborted(reason.into())
    }

    pub fn accepted_bit(&self) -> Option<u8> {
        match self {
            Outcome::Accepted(b) => Some(*b),
            Outcome::Aborted(_) => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Accepted(b) => write!(f, "accepted({b})"),
            Outcome::Aborted(r) => write!(f, "aborted({r})"),
        }
    }
}

/// What a party does when it has the turn.
#[derive(Debug, Clone, PartialEq)]
pub enum Step<T> {
    Send(Payload<T>),
    Yield,
    Finish(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartyKind {
    Honest,
    Adversarial { strategy: String, params: String },
}

/// Alice and Bob for one session.
pub type PartyPair<'a, T> = (Box<dyn Party<T> + 'a>, Box<dyn Party<T> + 'a>);

/// A protocol participant. `view` holds every message this party has sent
/// or received so far, as seen in its own frame.
pub trait Party<T: Real> {
    fn kind(&self) -> PartyKind {
        PartyKind::Honest
    }

    fn step(&mut self, view: &[Message<T>], rng: &mut dyn RngCore) -> Result<Step<T>, String>;
}

impl<T: Real, P: Party<T> + ?Sized> Party<T> for Box<P> {
    fn kind(&self) -> PartyKind {
        (**self).kind()
    }
    fn step(&mut self, view: &[Message<T>], rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        (**self).step(view, rng)
    }
}

/// Both parties' views of a finished session.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript<T> {
    pub rotation: Rotation<T>,
    pub alice_view: Vec<Message<T>>,
    pub bob_view: Vec<Message<T>>,
    pub outcome: Outcome,
}

impl<T: Real> Transcript<T> {
    /// Largest deviation between Alice's and Bob's copies of the vector
    /// messages after undoing the session rotation.
    pub fn rotation_consistency_error(&self) -> T {
        let inv = self.rotation.inverse();
        self.alice_view
            .iter()
            .zip(&self.bob_view)
            .filter_map(|(a, b)| match (&a.payload, &b.payload) {
                (Payload::Vector(va), Payload::Vector(vb)) => Some(match a.direction {
                    Direction::AliceToBob => self.rotation.apply(va).distance(vb),
                    Direction::BobToAlice => inv.apply(vb).distance(va),
                }),
                _ => None,
            })
            .fold(T::zero(), T::max)
    }
}

/// Runs one session: samples `R ~ mu` once and plays the parties against each other.
pub fn run_session<T: Real, R: Rng>(
    alice: &mut dyn Party<T>,
    bob: &mut dyn Party<T>,
    mu: &MisalignmentDistribution<T>,
    rng: &mut R,
) -> Transcript<T> {
    let rotation = mu.sample(rng);
    run_with_rotation(alice, bob, rotation, rng)
}

/// Runs one session with a fixed channel rotation.
pub fn run_with_rotation<T: Real>(
    alice: &mut dyn Party<T>,
    bob: &mut dyn Party<T>,
    rotation: Rotation<T>,
    rng: &mut dyn RngCore,
) -> Transcript<T> {
    let inverse = rotation.inverse();
    let mut alice_view = Vec::new();
    let mut bob_view = Vec::new();
    let mut turn = Role::Alice;
    let mut sent_this_turn = false;
    let mut idle_turns = 0;

    for _ in 0..MAX_STEPS {
        let (party, own_view): (&mut dyn Party<T>, &Vec<Message<T>>) = match turn {
            Role::Alice => (&mut *alice, &alice_view),
            Role::Bob => (&mut *bob, &bob_view),
        };
        let step = match party.step(own_view, rng) {
            Ok(s) => s,
            Err(e) => {
                return Transcript {
                    rotation,
                    alice_view,
                    bob_view,
                    outcome: Outcome::Aborted(format!("strategy error: {e}")),
                }
            }
        };
        match step {
            Step::Send(payload) => {
                let direction = Direction::from_sender(turn);
                let delivered = match turn {
                    Role::Alice => payload.transformed(&rotation),
                    Role::Bob => payload.transformed(&inverse),
                };
                let (sent, received) = match turn {
                    Role::Alice => (&mut alice_view, &mut bob_view),
                    Role::Bob => (&mut bob_view, &mut alice_view),
                };
                sent.push(Message { direction, payload });
                received.push(Message {
                    direction,
                    payload: delivered,
                });
                sent_this_turn = true;
            }
            Step::Yield => {
                if sent_this_turn {
                    idle_turns = 0;
                } else {
                    idle_turns += 1;
                    if idle_turns >= 2 {
                        return Transcript {
                            rotation,
                            alice_view,
                            bob_view,
                            outcome: Outcome::aborted("deadlock: both parties idle"),
                        };
                    }
                }
                sent_this_turn = false;
                turn = turn.other();
            }
            Step::Finish(outcome) => {
                return Transcript {
                    rotation,
                    alice_view,
                    bob_view,
                    outcome,
                }
            }
        }
    }
    Transcript {
        rotation,
        alice_view,
        bob_view,
        outcome: Outcome::aborted("step limit reached"),
    }
}
