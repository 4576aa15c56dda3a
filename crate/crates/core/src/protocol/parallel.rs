//! Parallel repetition: `k` independent sessions committing `k` bits.

use rand::Rng;

use super::{run_with_rotation, Outcome, PartyPair, Transcript};
use crate::scalar::Real;
use crate::so3::{MisalignmentDistribution, Rotation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParallelOutcome {
    /// Every instance accepted; the committed bits in instance order.
    Accepted(Vec<u8>),
    Aborted { instance: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct ParallelTranscript<T> {
    pub sessions: Vec<Transcript<T>>,
    pub outcome: ParallelOutcome,
}

/// Runs `k` sessions, each with its own rotation drawn from `mu`.
/// `make_parties(i)` builds the parties of instance `i`.
pub fn run_parallel<'a, T: Real, R: Rng>(
    k: usize,
    make_parties: &mut dyn FnMut(usize) -> PartyPair<'a, T>,
    mu: &MisalignmentDistribution<T>,
    rng: &mut R,
) -> ParallelTranscript<T> {
    assert!(k >= 1, "parallel composition needs at least one instance");
    let rotations: Vec<Rotation<T>> = (0..k).map(|_| mu.sample(rng)).collect();
    run_parallel_with_rotations(&rotations, make_parties, rng)
}

pub fn run_parallel_with_rotations<'a, T: Real, R: Rng>(
    rotations: &[Rotation<T>],
    make_parties: &mut dyn FnMut(usize) -> PartyPair<'a, T>,
    rng: &mut R,
) -> ParallelTranscript<T> {
    let sessions: Vec<Transcript<T>> = rotations
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (mut alice, mut bob) = make_parties(i);
            run_with_rotation(alice.as_mut(), bob.as_mut(), *r, rng)
        })
        .collect();
    let mut bits = Vec::with_capacity(sessions.len());
    for (instance, s) in sessions.iter().enumerate() {
        match &s.outcome {
            Outcome::Accepted(b) => bits.push(*b),
            Outcome::Aborted(reason) => {
                let outcome = ParallelOutcome::Aborted {
                    instance,
                    reason: reason.clone(),
                };
                return ParallelTranscript { sessions, outcome };
            }
        }
    }
    ParallelTranscript {
        sessions,
        outcome: ParallelOutcome::Accepted(bits),
    }
}
