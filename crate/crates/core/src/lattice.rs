//! Lattice-angle commitment scheme.
//!
//! A lattice point `a ∈ {0..L-1}^d` is sent as the plane vector at angle
//! `α(a) = Σ a_i θ_i`. The channel rotates by `θ_j` or `2θ_j` for a uniform
//! `j`, which Bob sees as `a + e_j` or `a + 2e_j` after decoding against the
//! codebook `{0..L+1}^d`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::so3::{MisalignmentDistribution, Vec3};
use crate::Verdict;

/// Default cap on the number of codebook points enumerated during certification.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// Which reading of Bob's reveal-phase difference test to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Predicate {
    /// `decoded - revealed` must be exactly `e_k` or `2e_k`.
    Strict,
    /// As [`Predicate::Strict`], but a zero difference is also accepted.
    #[default]
    Lenient,
}

impl Predicate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Predicate::Strict => "strict",
            Predicate::Lenient => "lenient",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Predicate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(Predicate::Strict),
            "lenient" => Ok(Predicate::Lenient),
            other => Err(Error::InvalidParams(format!(
                "unknown predicate '{other}' (expected strict or lenient)"
            ))),
        }
    }
}

/// A lattice point. Honest commitments live in `{0..L-1}^d`, decoded
/// points in `{0..L+1}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeCodeword(Vec<u32>);

impl LatticeCodeword {
    pub fn new(coords: Vec<u32>) -> Self {
        Self(coords)
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `Σ a_i mod 2`.
    pub fn parity(&self) -> u8 {
        (self.0.iter().map(|&c| u64::from(c)).sum::<u64>() % 2) as u8
    }

    /// `self + step·e_coord`.
    pub fn shifted(&self, coord: usize, step: u32) -> Self {
        let mut c = self.0.clone();
        c[coord] += step;
        Self(c)
    }

    /// Mixed-radix index with the given base (little-endian in coordinate order).
    pub fn to_index(&self, base: u32) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * u64::from(base) + u64::from(c))
    }

    pub fn from_index(mut index: u64, base: u32, d: usize) -> Self {
        let mut c = Vec::with_capacity(d);
        for _ in 0..d {
            c.push((index % u64::from(base)) as u32);
            index /= u64::from(base);
        }
        Self(c)
    }

    /// Largest coordinate, or 0 for `d = 0`.
    pub fn max_coord(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for LatticeCodeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// One outcome of the lattice channel: coordinate `coord` advanced by `step ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseEvent {
    pub coord: usize,
    pub step: u32,
}

/// The `2d` noise events in the same order as the support of [`lattice_mu`]
/// (`θ_1, 2θ_1, θ_2, …`). Each has probability `1/(2d)`.
pub fn noise_support(d: usize) -> Vec<NoiseEvent> {
    (0..d)
        .flat_map(|coord| [1, 2].map(|step| NoiseEvent { coord, step }))
        .collect()
}

/// Rationally independent angles plus the certified codebook table.
#[derive(Debug, Clone)]
pub struct AngleBasis<T> {
    l: u32,
    angles: Vec<T>,
    scale: T,
    min_gap: T,
    /// `(α(x), index(x))` for every `x ∈ {0..L+1}^d`, sorted by angle.
    table: Vec<(T, u64)>,
}

impl<T: Real> AngleBasis<T> {
    /// `θ_i = c·√p_i` over the first `d` primes, scaled so `Σ (L+1)θ_i = π/2`.
    pub fn build(d: usize, l: u32) -> Result<Self> {
        Self::build_with_budget(d, l, DEFAULT_ENUMERATION_BUDGET)
    }

    pub fn build_with_budget(d: usize, l: u32, budget: u128) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        if l < 2 {
            return Err(Error::InvalidParams("L must be at least 2".into()));
        }
        let levels = l + 2;
        let needed = u128::from(levels)
            .checked_pow(d as u32)
            .unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }

        let roots: Vec<T> = first_primes(d)
            .into_iter()
            .map(|p| T::lit(p as f64).sqrt())
            .collect();
        let root_sum: T = roots.iter().copied().sum();
        let scale = T::FRAC_PI_2() / (T::lit(f64::from(l + 1)) * root_sum);
        let angles: Vec<T> = roots.iter().map(|&r| scale * r).collect();

        let mut table: Vec<(T, u64)> = (0..needed as u64)
            .map(|idx| {
                let x = LatticeCodeword::from_index(idx, levels, d);
                (angle_of(&angles, x.coords()), idx)
            })
            .collect();
        table.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite codebook angles"));

        let min_gap = table
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .fold(T::infinity(), T::min);
        if !(min_gap > T::zero()) {
            return Err(Error::InvalidParams(
                "codebook angles collide at this precision".into(),
            ));
        }
        Ok(Self {
            l,
            angles,
            scale,
            min_gap,
            table,
        })
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Smallest angular gap between distinct codebook points.
    pub fn min_gap(&self) -> T {
        self.min_gap
    }

    /// Number of codebook points, `(L+2)^d`.
    pub fn codebook_len(&self) -> usize {
        self.table.len()
    }

    /// Minimum chord length between distinct codebook vectors, `2 sin(min_gap/2)`.
    pub fn separation(&self) -> T {
        T::lit(2.0) * (self.min_gap / T::lit(2.0)).sin()
    }

    /// Supremum of admissible measurement precisions: any `eps` strictly below
    /// this keeps ε-balls around codewords disjoint.
    pub fn safe_eps(&self) -> T {
        (self.min_gap / T::lit(2.0)).sin()
    }

    /// Sorted `(angle, index)` codebook table.
    pub fn table(&self) -> &[(T, u64)] {
        &self.table
    }

    pub fn angle(&self, x: &LatticeCodeword) -> T {
        angle_of(&self.angles, x.coords())
    }
}

fn angle_of<T: Real>(angles: &[T], coords: &[u32]) -> T {
    angles
        .iter()
        .zip(coords)
        .map(|(&t, &c)| t * T::lit(f64::from(c)))
        .sum()
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(n);
    let mut candidate = 2u64;
    while primes.len() < n {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Scheme parameters: dimension, range, basis, Bob's precision and the
/// acceptance predicate.
#[derive(Debug, Clone)]
pub struct LatticeParams<T> {
    basis: AngleBasis<T>,
    eps_meas: T,
    predicate: Predicate,
}

impl<T: Real> LatticeParams<T> {
    pub fn new(d: usize, l: u32, eps_meas: T, predicate: Predicate) -> Result<Self> {
        Self::with_basis(AngleBasis::build(d, l)?, eps_meas, predicate)
    }

    /// Parameters with `eps_meas = safe_eps / 4`.
    pub fn with_default_eps(d: usize, l: u32, predicate: Predicate) -> Result<Self> {
        let basis = AngleBasis::build(d, l)?;
        let eps = basis.safe_eps() / T::lit(4.0);
        Self::with_basis(basis, eps, predicate)
    }

    /// Checks the separation condition `‖v(x) - v(y)‖ > 2 eps` over the codebook.
    pub fn with_basis(basis: AngleBasis<T>, eps_meas: T, predicate: Predicate) -> Result<Self> {
        if !(eps_meas >= T::zero() && eps_meas.is_finite()) {
            return Err(Error::InvalidParams(
                "eps_meas must be finite and nonnegative".into(),
            ));
        }
        let separation = basis.separation();
        let twice = T::lit(2.0) * eps_meas;
        if !(separation > twice) {
            return Err(Error::SeparationViolated {
                separation: separation.as_f64(),
                twice_eps: twice.as_f64(),
            });
        }
        Ok(Self {
            basis,
            eps_meas,
            predicate,
        })
    }

    pub fn with_predicate(&self, predicate: Predicate) -> Self {
        Self {
            predicate,
            ..self.clone()
        }
    }

    pub fn d(&self) -> usize {
        self.basis.dim()
    }

    pub fn l(&self) -> u32 {
        self.basis.l()
    }

    pub fn basis(&self) -> &AngleBasis<T> {
        &self.basis
    }

    pub fn eps_meas(&self) -> T {
        self.eps_meas
    }

    pub fn predicate(&self) -> Predicate {
        self.predicate
    }

    /// Base of the mixed-radix codebook index (`L + 2`).
    pub fn levels(&self) -> u32 {
        self.l() + 2
    }

    fn check_range(&self, a: &LatticeCodeword, max: u32) -> Result<()> {
        if a.dim() != self.d() {
            return Err(Error::InvalidParams(format!(
                "codeword has {} coordinates, expected {}",
                a.dim(),
                self.d()
            )));
        }
        match a.coords().iter().enumerate().find(|(_, &c)| c > max) {
            Some((index, &value)) => Err(Error::CoordinateOutOfRange { index, value, max }),
            None => Ok(()),
        }
    }

    /// True when every coordinate lies in `{0..L-1}`.
    pub fn is_honest_point(&self, a: &LatticeCodeword) -> bool {
        a.dim() == self.d() && a.coords().iter().all(|&c| c < self.l())
    }
}

/// `v(a) = (cos α(a), sin α(a), 0)` for `a ∈ {0..L+1}^d`.
pub fn encode<T: Real>(params: &LatticeParams<T>, a: &LatticeCodeword) -> Result<Vec3<T>> {
    params.check_range(a, params.l() + 1)?;
    Ok(Vec3::in_plane(params.basis.angle(a)))
}

/// Draws `a` uniformly from the parity-`b` points of `{0..L-1}^d` and returns
/// it with its payload.
pub fn commit<T: Real, R: Rng + ?Sized>(
    params: &LatticeParams<T>,
    bit: u8,
    rng: &mut R,
) -> (LatticeCodeword, Vec3<T>) {
    assert!(bit <= 1, "bit must be 0 or 1");
    let a = loop {
        let candidate = LatticeCodeword::new(
            (0..params.d())
                .map(|_| rng.random_range(0..params.l()))
                .collect(),
        );
        if candidate.parity() == bit {
            break candidate;
        }
    };
    let v = Vec3::in_plane(params.basis.angle(&a));
    (a, v)
}

/// Bob's measurement: the unique codeword within `eps_meas` of `received`,
/// or `None` (abort).
pub fn decode_commit<T: Real>(
    params: &LatticeParams<T>,
    received: &Vec3<T>,
) -> Option<LatticeCodeword> {
    let table = params.basis.table();
    let phi = received.azimuth();
    let pos = table.partition_point(|(angle, _)| *angle < phi);
    let lo = pos.saturating_sub(1);
    let hi = (pos + 1).min(table.len());
    table[lo..hi]
        .iter()
        .map(|&(angle, idx)| (Vec3::in_plane(angle).distance(received), idx))
        .filter(|(dist, _)| *dist <= params.eps_meas)
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"))
        .map(|(_, idx)| LatticeCodeword::from_index(idx, params.levels(), params.d()))
}

/// Direct sampler of the decoded-point law: `a + e_j` or `a + 2e_j`, `j` uniform.
pub fn apply_channel_noise<T: Real, R: Rng + ?Sized>(
    params: &LatticeParams<T>,
    a: &LatticeCodeword,
    rng: &mut R,
) -> LatticeCodeword {
    let j = rng.random_range(0..params.d());
    let step = if rng.random_bool(0.5) { 1 } else { 2 };
    a.shifted(j, step)
}

/// Whether `decoded - revealed` is an accepted difference under `predicate`.
///
/// Accepted differences are `e_k` and `2e_k`, plus `0` under the lenient reading.
pub fn difference_accepted(
    decoded: &LatticeCodeword,
    revealed: &LatticeCodeword,
    predicate: Predicate,
) -> bool {
    if decoded.dim() != revealed.dim() {
        return false;
    }
    let mut nonzero = 0usize;
    for (&x, &y) in decoded.coords().iter().zip(revealed.coords()) {
        let diff = i64::from(x) - i64::from(y);
        match diff {
            0 => {}
            1 | 2 => nonzero += 1,
            _ => return false,
        }
    }
    match nonzero {
        0 => predicate == Predicate::Lenient,
        1 => true,
        _ => false,
    }
}

/// Bob's reveal-phase check.
pub fn verify_reveal<T: Real>(
    params: &LatticeParams<T>,
    decoded: &LatticeCodeword,
    revealed_bit: u8,
    revealed: &LatticeCodeword,
) -> Verdict {
    let ok = params.is_honest_point(revealed)
        && revealed.parity() == revealed_bit
        && difference_accepted(decoded, revealed, params.predicate());
    Verdict::from_bool(ok)
}

/// The channel distribution realizing the lattice noise: a two-point mixture
/// over the basis angles.
pub fn lattice_mu<T: Real>(params: &LatticeParams<T>) -> MisalignmentDistribution<T> {
    MisalignmentDistribution::TwoPointAngleMixture(params.basis.angles().to_vec())
}
