//! Honest and adversarial parties for the three commitment schemes, plus
//! probe parties for channel tests.

use rand::{Rng, RngCore};

use super::{Message, Party, PartyKind, Payload, Role, Step};
use crate::lattice::{self, LatticeCodeword, LatticeParams};
use crate::scalar::Real;
use crate::simple::{self, FourSymbolCodeword, InterpolationStrategy};
use crate::so3::{MisalignmentDistribution, Vec3};
use crate::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Commit,
    CommitSent,
    Reveal,
    RevealSent,
}

impl Phase {
    /// Handles the turns on which Alice has nothing to send.
    fn idle<T>(&mut self) -> Step<T> {
        if *self == Phase::CommitSent {
            *self = Phase::Reveal;
        }
        Step::Yield
    }
}

fn first_from<T: Clone>(view: &[Message<T>], role: Role, vector: bool) -> Option<Payload<T>> {
    view.iter()
        .filter(|m| m.is_from(role))
        .map(|m| m.payload.clone())
        .find(|p| matches!(p, Payload::Vector(_)) == vector)
}

fn to_bits(b: i64) -> Result<u8, String> {
    u8::try_from(b)
        .ok()
        .filter(|&b| b <= 1)
        .ok_or_else(|| format!("value {b} is not a bit"))
}

/// Non-adaptive Alice behaviours for the lattice scheme.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeAliceStrategy<T> {
    Honest { bit: u8 },
    /// Commit honestly to `bit`, then reveal the committed point with
    /// coordinate `coord` moved by one (up, or down at the top edge).
    FlipCheat { bit: u8, coord: usize },
    /// Send `v(commit)` and reveal `reveal` with its own parity.
    Fixed {
        commit: LatticeCodeword,
        reveal: LatticeCodeword,
    },
    /// Send an arbitrary vector and reveal `reveal`.
    Payload { payload: Vec3<T>, reveal: LatticeCodeword },
}

pub struct LatticeAlice<'a, T> {
    params: &'a LatticeParams<T>,
    strategy: LatticeAliceStrategy<T>,
    phase: Phase,
    secret: Option<LatticeCodeword>,
}

impl<'a, T: Real> LatticeAlice<'a, T> {
    pub fn new(params: &'a LatticeParams<T>, strategy: LatticeAliceStrategy<T>) -> Self {
        Self {
            params,
            strategy,
            phase: Phase::Commit,
            secret: None,
        }
    }

    pub fn honest(params: &'a LatticeParams<T>, bit: u8) -> Self {
        Self::new(params, LatticeAliceStrategy::Honest { bit })
    }

    /// The point Alice committed to, once chosen.
    pub fn secret(&self) -> Option<&LatticeCodeword> {
        self.secret.as_ref()
    }

    fn commit_payload(&mut self, rng: &mut dyn RngCore) -> Result<Payload<T>, String> {
        let v = match &self.strategy {
            LatticeAliceStrategy::Honest { bit } | LatticeAliceStrategy::FlipCheat { bit, .. } => {
                let (a, v) = lattice::commit(self.params, *bit, rng);
                self.secret = Some(a);
                v
            }
            LatticeAliceStrategy::Fixed { commit, .. } => {
                self.secret = Some(commit.clone());
                lattice::encode(self.params, commit).map_err(|e| e.to_string())?
            }
            LatticeAliceStrategy::Payload { payload, .. } => *payload,
        };
        Ok(Payload::Vector(v))
    }

    fn reveal_payload(&self) -> Result<Payload<T>, String> {
        let revealed = match &self.strategy {
            LatticeAliceStrategy::Honest { .. } => self.secret.clone().ok_or("no commitment")?,
            LatticeAliceStrategy::FlipCheat { coord, .. } => {
                let a = self.secret.clone().ok_or("no commitment")?;
                if *coord >= a.dim() {
                    return Err(format!("flip coordinate {coord} out of range"));
                }
                let mut c = a.coords().to_vec();
                if c[*coord] + 1 < self.params.l() {
                    c[*coord] += 1;
                } else {
                    c[*coord] -= 1;
                }
                LatticeCodeword::new(c)
            }
            LatticeAliceStrategy::Fixed { reveal, .. } | LatticeAliceStrategy::Payload { reveal, .. } => {
                reveal.clone()
            }
        };
        let mut msg = vec![i64::from(revealed.parity())];
        msg.extend(revealed.coords().iter().map(|&c| i64::from(c)));
        Ok(Payload::Classical(msg))
    }
}

impl<T: Real> Party<T> for LatticeAlice<'_, T> {
    fn kind(&self) -> PartyKind {
        match &self.strategy {
            LatticeAliceStrategy::Honest { .. } => PartyKind::Honest,
            LatticeAliceStrategy::FlipCheat { bit, coord } => PartyKind::Adversarial {
                strategy: "flip-cheat".into(),
                params: format!("bit={bit} coord={coord}"),
            },
            LatticeAliceStrategy::Fixed { commit, reveal } => PartyKind::Adversarial {
                strategy: "fixed".into(),
                params: format!("commit={commit} reveal={reveal}"),
            },
            LatticeAliceStrategy::Payload { reveal, .. } => PartyKind::Adversarial {
                strategy: "payload".into(),
                params: format!("reveal={reveal}"),
            },
        }
    }

    fn step(&mut self, _view: &[Message<T>], rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        match self.phase {
            Phase::Commit => {
                let p = self.commit_payload(rng)?;
                self.phase = Phase::CommitSent;
                Ok(Step::Send(p))
            }
            Phase::Reveal => {
                let p = self.reveal_payload()?;
                self.phase = Phase::RevealSent;
                Ok(Step::Send(p))
            }
            Phase::CommitSent | Phase::RevealSent => Ok(self.phase.idle()),
        }
    }
}

/// Honest Bob for the lattice scheme. Decisions are a pure function of the view.
pub struct LatticeBob<'a, T> {
    params: &'a LatticeParams<T>,
}

impl<'a, T: Real> LatticeBob<'a, T> {
    pub fn new(params: &'a LatticeParams<T>) -> Self {
        Self { params }
    }
}

impl<T: Real> Party<T> for LatticeBob<'_, T> {
    fn step(&mut self, view: &[Message<T>], _rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        let received = match first_from(view, Role::Alice, true) {
            Some(Payload::Vector(v)) => v,
            _ => return Ok(Step::Yield),
        };
        let decoded = match lattice::decode_commit(self.params, &received) {
            Some(a) => a,
            None => return Ok(Step::Finish(super::Outcome::aborted("no codeword within eps"))),
        };
        let reveal = match first_from(view, Role::Alice, false) {
            Some(Payload::Classical(c)) => c,
            _ => return Ok(Step::Yield),
        };
        if reveal.len() != self.params.d() + 1 {
            return Ok(Step::Finish(super::Outcome::aborted("malformed reveal")));
        }
        let bit = match to_bits(reveal[0]) {
            Ok(b) => b,
            Err(_) => return Ok(Step::Finish(super::Outcome::aborted("malformed reveal"))),
        };
        let coords: Option<Vec<u32>> = reveal[1..].iter().map(|&c| u32::try_from(c).ok()).collect();
        let Some(coords) = coords else {
            return Ok(Step::Finish(super::Outcome::aborted("malformed reveal")));
        };
        let revealed = LatticeCodeword::new(coords);
        Ok(Step::Finish(
            match lattice::verify_reveal(self.params, &decoded, bit, &revealed) {
                Verdict::Accept => super::Outcome::Accepted(bit),
                Verdict::Abort => super::Outcome::aborted("reveal rejected"),
            },
        ))
    }
}

fn codeword_message<T>(c: FourSymbolCodeword) -> Payload<T> {
    Payload::Classical(vec![i64::from(c.a), i64::from(c.b)])
}

fn parse_codeword(c: &[i64]) -> Option<FourSymbolCodeword> {
    match c {
        [a, b] => FourSymbolCodeword::new(to_bits(*a).ok()?, to_bits(*b).ok()?).ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourSymbolStrategy {
    /// Random `a`, committed bit `bit`.
    Honest { bit: u8 },
    /// Send `commit_symbol`, later reveal `reveal`.
    Cheat {
        commit_symbol: u8,
        reveal: FourSymbolCodeword,
    },
}

pub struct FourSymbolAlice {
    strategy: FourSymbolStrategy,
    phase: Phase,
    codeword: Option<FourSymbolCodeword>,
}

impl FourSymbolAlice {
    pub fn new(strategy: FourSymbolStrategy) -> Self {
        Self {
            strategy,
            phase: Phase::Commit,
            codeword: None,
        }
    }
}

impl<T: Real> Party<T> for FourSymbolAlice {
    fn kind(&self) -> PartyKind {
        match self.strategy {
            FourSymbolStrategy::Honest { .. } => PartyKind::Honest,
            FourSymbolStrategy::Cheat {
                commit_symbol,
                reveal,
            } => PartyKind::Adversarial {
                strategy: "four-symbol-cheat".into(),
                params: format!("commit={commit_symbol} reveal={}", reveal.symbol()),
            },
        }
    }

    fn step(&mut self, _view: &[Message<T>], rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        if self.phase == Phase::Commit {
            let (sent, reveal) = match self.strategy {
                FourSymbolStrategy::Honest { bit } => {
                    let c = FourSymbolCodeword::new(rng.random_range(0..2), bit)
                        .map_err(|e| e.to_string())?;
                    (c.symbol(), c)
                }
                FourSymbolStrategy::Cheat {
                    commit_symbol,
                    reveal,
                } => (commit_symbol % 4, reveal),
            };
            self.codeword = Some(reveal);
            self.phase = Phase::CommitSent;
            return Ok(Step::Send(Payload::Vector(simple::symbol_vector(sent))));
        }
        if self.phase == Phase::Reveal {
            let reveal = self.codeword.ok_or("no commitment")?;
            self.phase = Phase::RevealSent;
            return Ok(Step::Send(codeword_message(reveal)));
        }
        Ok(self.phase.idle())
    }
}

pub struct FourSymbolBob;

impl<T: Real> Party<T> for FourSymbolBob {
    fn step(&mut self, view: &[Message<T>], _rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        let received = match first_from(view, Role::Alice, true) {
            Some(Payload::Vector(v)) => v,
            _ => return Ok(Step::Yield),
        };
        let Some(symbol) = simple::symbol_from_vector(&received) else {
            return Ok(Step::Finish(super::Outcome::aborted("not a symbol vector")));
        };
        let Some(Payload::Classical(c)) = first_from(view, Role::Alice, false) else {
            return Ok(Step::Yield);
        };
        let Some(revealed) = parse_codeword(&c) else {
            return Ok(Step::Finish(super::Outcome::aborted("malformed reveal")));
        };
        Ok(Step::Finish(match simple::four_symbol_verify(symbol, revealed) {
            Verdict::Accept => super::Outcome::Accepted(revealed.b),
            Verdict::Abort => super::Outcome::aborted("reveal rejected"),
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousStrategy<T> {
    Honest { bit: u8 },
    /// Send the interpolated vector, reveal `C_{0, reveal_bit}`.
    Interpolate {
        strategy: InterpolationStrategy<T>,
        reveal_bit: u8,
    },
}

pub struct ContinuousAlice<T> {
    strategy: ContinuousStrategy<T>,
    phase: Phase,
    codeword: Option<FourSymbolCodeword>,
}

impl<T: Real> ContinuousAlice<T> {
    pub fn new(strategy: ContinuousStrategy<T>) -> Self {
        Self {
            strategy,
            phase: Phase::Commit,
            codeword: None,
        }
    }
}

impl<T: Real> Party<T> for ContinuousAlice<T> {
    fn kind(&self) -> PartyKind {
        match self.strategy {
            ContinuousStrategy::Honest { .. } => PartyKind::Honest,
            ContinuousStrategy::Interpolate {
                strategy,
                reveal_bit,
            } => PartyKind::Adversarial {
                strategy: "interpolate".into(),
                params: format!("alpha={} reveal={reveal_bit}", strategy.alpha()),
            },
        }
    }

    fn step(&mut self, _view: &[Message<T>], rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        if self.phase == Phase::Commit {
            let (payload, reveal) = match self.strategy {
                ContinuousStrategy::Honest { bit } => {
                    let c = FourSymbolCodeword::new(rng.random_range(0..2), bit)
                        .map_err(|e| e.to_string())?;
                    (c.vector(), c)
                }
                ContinuousStrategy::Interpolate {
                    strategy,
                    reveal_bit,
                } => (
                    strategy.payload(),
                    FourSymbolCodeword::new(0, reveal_bit).map_err(|e| e.to_string())?,
                ),
            };
            self.codeword = Some(reveal);
            self.phase = Phase::CommitSent;
            return Ok(Step::Send(Payload::Vector(payload)));
        }
        if self.phase == Phase::Reveal {
            let reveal = self.codeword.ok_or("no commitment")?;
            self.phase = Phase::RevealSent;
            return Ok(Step::Send(codeword_message(reveal)));
        }
        Ok(self.phase.idle())
    }
}

pub struct ContinuousBob;

impl<T: Real> Party<T> for ContinuousBob {
    fn step(&mut self, view: &[Message<T>], _rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        let received = match first_from(view, Role::Alice, true) {
            Some(Payload::Vector(v)) => v,
            _ => return Ok(Step::Yield),
        };
        if simple::continuous_receive(&received).is_none() {
            return Ok(Step::Finish(super::Outcome::aborted("payload leaves the plane")));
        }
        let Some(Payload::Classical(c)) = first_from(view, Role::Alice, false) else {
            return Ok(Step::Yield);
        };
        let Some(revealed) = parse_codeword(&c) else {
            return Ok(Step::Finish(super::Outcome::aborted("malformed reveal")));
        };
        Ok(Step::Finish(
            match simple::continuous_verify_vector(&received, revealed) {
                Verdict::Accept => super::Outcome::Accepted(revealed.b),
                Verdict::Abort => super::Outcome::aborted("reveal rejected"),
            },
        ))
    }
}

/// Sends a fixed list of vectors, then either waits for Bob to finish or,
/// when expecting an echo, checks the vectors that come back.
pub struct ProbeAlice<T> {
    vectors: Vec<Vec3<T>>,
    expect_echo: bool,
    sent: bool,
}

impl<T: Real> ProbeAlice<T> {
    pub fn new(vectors: Vec<Vec3<T>>) -> Self {
        Self {
            vectors,
            expect_echo: false,
            sent: false,
        }
    }

    pub fn expecting_echo(mut self) -> Self {
        self.expect_echo = true;
        self
    }
}

impl<T: Real> Party<T> for ProbeAlice<T> {
    fn step(&mut self, view: &[Message<T>], _rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        let own = view.iter().filter(|m| m.is_from(Role::Alice)).count();
        if !self.sent {
            if own < self.vectors.len() {
                return Ok(Step::Send(Payload::Vector(self.vectors[own])));
            }
            self.sent = true;
            return Ok(Step::Yield);
        }
        if !self.expect_echo {
            return Ok(Step::Yield);
        }
        let echoed: Vec<Vec3<T>> = view
            .iter()
            .filter(|m| m.is_from(Role::Bob))
            .filter_map(|m| match m.payload {
                Payload::Vector(v) => Some(v),
                Payload::Classical(_) => None,
            })
            .collect();
        let ok = echoed.len() == self.vectors.len()
            && echoed
                .iter()
                .zip(&self.vectors)
                .all(|(e, v)| e.distance(v) <= T::geom_tol());
        Ok(Step::Finish(if ok {
            super::Outcome::Accepted(0)
        } else {
            super::Outcome::aborted("echo mismatch")
        }))
    }
}

/// Sends every received vector straight back, then yields.
pub struct EchoBob;

impl<T: Real> Party<T> for EchoBob {
    fn step(&mut self, view: &[Message<T>], _rng: &mut dyn RngCore) -> Result<Step<T>, String> {
        let incoming: Vec<Vec3<T>> = view
            .iter()
            .filter(|m| m.is_from(Role::Alice))
            .filter_map(|m| match m.payload {
                Payload::Vector(v) => Some(v),
                Payload::Classical(_) => None,
            })
            .collect();
        let returned = view.iter().filter(|m| m.is_from(Role::Bob)).count();
        match incoming.get(returned) {
            Some(v) => Ok(Step::Send(Payload::Vector(*v))),
            None => Ok(Step::Yield),
        }
    }
}

/// The three commitment schemes, for code that runs honest sessions generically.
#[derive(Debug, Clone, Copy)]
pub enum Scheme<'a, T> {
    Lattice(&'a LatticeParams<T>),
    FourSymbol,
    Continuous,
}

impl<'a, T: Real> Scheme<'a, T> {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Lattice(_) => "lattice",
            Scheme::FourSymbol => "four-symbol",
            Scheme::Continuous => "continuous",
        }
    }

    pub fn channel(&self) -> MisalignmentDistribution<T> {
        match self {
            Scheme::Lattice(p) => lattice::lattice_mu(p),
            Scheme::FourSymbol => simple::four_symbol_mu(),
            Scheme::Continuous => simple::continuous_mu(),
        }
    }

    pub fn honest_alice(&self, bit: u8) -> Box<dyn Party<T> + 'a> {
        match *self {
            Scheme::Lattice(p) => Box::new(LatticeAlice::honest(p, bit)),
            Scheme::FourSymbol => Box::new(FourSymbolAlice::new(FourSymbolStrategy::Honest { bit })),
            Scheme::Continuous => Box::new(ContinuousAlice::new(ContinuousStrategy::Honest { bit })),
        }
    }

    pub fn bob(&self) -> Box<dyn Party<T> + 'a> {
        match *self {
            Scheme::Lattice(p) => Box::new(LatticeBob::new(p)),
            Scheme::FourSymbol => Box::new(FourSymbolBob),
            Scheme::Continuous => Box::new(ContinuousBob),
        }
    }
}
