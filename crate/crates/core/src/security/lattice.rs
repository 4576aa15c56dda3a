//! Exact security figures of the lattice scheme.
//!
//! Binding and concealing are computed in the lattice model, where Bob
//! decodes `a + e_j` or `a + 2e_j` with probability `1/(2d)` each.
//! Soundness and the finite-precision binding check run the real geometry
//! (encode, rotate, decode) instead.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{
    self, decode_commit, difference_accepted, encode, lattice_mu, noise_support, LatticeCodeword,
    LatticeParams, Predicate, DEFAULT_ENUMERATION_BUDGET,
};
use crate::scalar::{Probability, Real};
use crate::so3::Vec3;
use crate::Verdict;

fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

fn pow(base: u32, exp: usize) -> Result<u128> {
    u128::from(base)
        .checked_pow(exp as u32)
        .ok_or_else(|| Error::InvalidParams(format!("{base}^{exp} overflows")))
}

/// Exact concealing figures for one `(d, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcealingAnalysis<P> {
    /// `Σ_{a'} |P(a'|0) - P(a'|1)|`, twice the total-variation distance.
    pub distance: P,
    /// Probability (bit uniform) that the decoded point touches the boundary,
    /// i.e. has a coordinate outside `[2, L]`.
    pub boundary_mass: P,
    /// Largest `|P(a'|0) - P(a'|1)|` over points with every coordinate in `[2, L]`.
    pub interior_max_gap: P,
}

impl<P: Probability> ConcealingAnalysis<P> {
    pub fn total_variation(&self) -> P {
        self.distance.clone() / P::ratio(2, 1)
    }
}

/// `1 - ((L-1)/(L+2))^d`.
pub fn concealing_bound<P: Probability>(d: usize, l: u32) -> Result<P> {
    let den = pow(l + 2, d)?;
    let num = pow(l - 1, d)?;
    Ok(P::ratio(den - num, den))
}

pub fn concealing_exact<T: Real, P: Probability>(
    params: &LatticeParams<T>,
) -> Result<ConcealingAnalysis<P>> {
    concealing_exact_with_budget(params, DEFAULT_ENUMERATION_BUDGET)
}

/// Enumerates both parity classes of `{0..L-1}^d` against the `2d` noise
/// outcomes. Requires `L^d · 2d` within `budget`.
pub fn concealing_exact_with_budget<T: Real, P: Probability>(
    params: &LatticeParams<T>,
    budget: u128,
) -> Result<ConcealingAnalysis<P>> {
    let (d, l) = (params.d(), params.l());
    let honest = pow(l, d)?;
    check_budget(honest * 2 * d as u128, budget)?;
    let levels = params.levels();
    let events = noise_support(d);

    // counts[x][b]: number of (a, noise) pairs with parity(a) = b landing on x
    let mut counts = vec![[0u64; 2]; pow(levels, d)? as usize];
    let mut class = [0u128; 2];
    for idx in 0..honest as u64 {
        let a = LatticeCodeword::from_index(idx, l, d);
        let b = a.parity() as usize;
        class[b] += 1;
        for ev in &events {
            counts[a.shifted(ev.coord, ev.step).to_index(levels) as usize][b] += 1;
        }
    }
    if class.contains(&0) {
        return Err(Error::InvalidParams("a parity class is empty".into()));
    }

    // P(x|b) = counts[x][b] / (class[b] · 2d); work over the common denominator.
    let noise = 2 * d as u128;
    let den = class[0] * class[1] * noise;
    let mut distance = 0u128;
    let mut boundary = 0u128;
    let mut interior_gap = 0u128;
    for (idx, c) in counts.iter().enumerate() {
        let w0 = u128::from(c[0]) * class[1];
        let w1 = u128::from(c[1]) * class[0];
        let gap = w0.abs_diff(w1);
        distance += gap;
        let x = LatticeCodeword::from_index(idx as u64, levels, d);
        let interior = x.coords().iter().all(|&v| (2..=l).contains(&v));
        if interior {
            interior_gap = interior_gap.max(gap);
        } else {
            boundary += w0 + w1;
        }
    }
    Ok(ConcealingAnalysis {
        distance: P::ratio(distance, den),
        boundary_mass: P::ratio(boundary, 2 * den),
        interior_max_gap: P::ratio(interior_gap, den),
    })
}

/// Acceptance probability of revealing `reveal` after sending `v(commit)`,
/// in the lattice model.
pub fn reveal_probability<T: Real, P: Probability>(
    params: &LatticeParams<T>,
    commit: &LatticeCodeword,
    reveal: &LatticeCodeword,
    predicate: Predicate,
) -> P {
    let d = params.d();
    if !params.is_honest_point(reveal) {
        return P::zero();
    }
    let hits = noise_support(d)
        .iter()
        .filter(|ev| difference_accepted(&commit.shifted(ev.coord, ev.step), reveal, predicate))
        .count();
    P::ratio(hits as u128, 2 * d as u128)
}

/// Reveals that pass for at least one noise outcome, with their hit counts
/// out of `2d`.
fn reveal_candidates(
    params_l: u32,
    decoded: &[LatticeCodeword],
    predicate: Predicate,
) -> Vec<(LatticeCodeword, usize)> {
    let mut candidates = BTreeSet::new();
    for x in decoded {
        let d = x.dim();
        let mut diffs: Vec<(usize, u32)> = Vec::new();
        if predicate == Predicate::Lenient {
            diffs.push((0, 0));
        }
        for k in 0..d {
            diffs.push((k, 1));
            diffs.push((k, 2));
        }
        for (k, s) in diffs {
            if x.coords()[k] >= s {
                let mut c = x.coords().to_vec();
                c[k] -= s;
                if c.iter().all(|&v| v < params_l) {
                    candidates.insert(LatticeCodeword::new(c));
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(|a| {
            let hits = decoded
                .iter()
                .filter(|x| difference_accepted(x, &a, predicate))
                .count();
            (a, hits)
        })
        .collect()
}

/// Best reveal per parity.
fn best_by_parity(candidates: Vec<(LatticeCodeword, usize)>) -> [Option<(LatticeCodeword, usize)>; 2] {
    let mut best: [Option<(LatticeCodeword, usize)>; 2] = [None, None];
    for (a, hits) in candidates {
        let slot = &mut best[a.parity() as usize];
        if slot.as_ref().is_none_or(|(_, h)| hits > *h) {
            *slot = Some((a, hits));
        }
    }
    best
}

/// Highest acceptance probability per revealed bit for a commitment to `commit`.
pub fn best_reveals<T: Real, P: Probability>(
    params: &LatticeParams<T>,
    commit: &LatticeCodeword,
    predicate: Predicate,
) -> [P; 2] {
    let d = params.d();
    let decoded: Vec<LatticeCodeword> = noise_support(d)
        .iter()
        .map(|ev| commit.shifted(ev.coord, ev.step))
        .collect();
    best_by_parity(reveal_candidates(params.l(), &decoded, predicate))
        .map(|b| P::ratio(b.map_or(0, |(_, h)| h) as u128, 2 * d as u128))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingWitness<P> {
    pub probability: P,
    pub commit: LatticeCodeword,
    pub reveal: LatticeCodeword,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingAnalysis<P> {
    pub predicate: Predicate,
    /// Best probability of opening to the parity opposite the commit point.
    pub flip: BindingWitness<P>,
    /// `max over commits of best_p0 + best_p1`.
    pub sum_max: P,
    pub sum_commit: LatticeCodeword,
}

/// Per-coordinate representatives: the acceptance structure of a coordinate
/// depends only on which offsets in `-2..=2` keep it inside `{0..L-1}`.
fn coordinate_representatives(l: u32) -> Vec<u32> {
    let mut reps: Vec<u32> = [0, 1, 2, l.saturating_sub(2), l - 1, l, l + 1]
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    reps.retain(|&v| v <= l + 1);
    reps
}

/// Nondecreasing sequences of length `d` over `values` (coordinates are exchangeable).
fn multisets(values: &[u32], d: usize) -> Vec<Vec<u32>> {
    fn go(values: &[u32], start: usize, d: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..values.len() {
            cur.push(values[i]);
            go(values, i, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(values, 0, d, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Exhaustive search over non-adaptive cheats `(commit point, reveal)`.
///
/// Commit points range over `{0..L+1}^d`, reduced by coordinate symmetry
/// and by the boundary classes of each coordinate; reveals range over every
/// point that can pass for some noise outcome (offsets with `‖δ‖∞ ≤ 2`).
pub fn binding_search<T: Real, P: Probability>(
    params: &LatticeParams<T>,
    predicate: Predicate,
) -> BindingAnalysis<P> {
    let d = params.d();
    let l = params.l();
    let events = noise_support(d);
    let mut flip: Option<(usize, LatticeCodeword, LatticeCodeword)> = None;
    let mut sum: Option<(usize, LatticeCodeword)> = None;

    for coords in multisets(&coordinate_representatives(l), d) {
        let commit = LatticeCodeword::new(coords);
        let decoded: Vec<LatticeCodeword> = events
            .iter()
            .map(|ev| commit.shifted(ev.coord, ev.step))
            .collect();
        let best = best_by_parity(reveal_candidates(l, &decoded, predicate));
        let own = commit.parity() as usize;
        if let Some((reveal, hits)) = &best[1 - own] {
            if flip.as_ref().is_none_or(|(h, _, _)| hits > h) {
                flip = Some((*hits, commit.clone(), reveal.clone()));
            }
        }
        let total: usize = best.iter().map(|b| b.as_ref().map_or(0, |(_, h)| *h)).sum();
        if sum.as_ref().is_none_or(|(h, _)| total > *h) {
            sum = Some((total, commit.clone()));
        }
    }

    let denom = 2 * d as u128;
    let (hits, commit, reveal) = flip.unwrap_or_else(|| {
        let z = LatticeCodeword::zeros(d);
        (0, z.clone(), z)
    });
    let (sum_hits, sum_commit) = sum.expect("at least one commit point");
    BindingAnalysis {
        predicate,
        flip: BindingWitness {
            probability: P::ratio(hits as u128, denom),
            commit,
            reveal,
        },
        sum_max: P::ratio(sum_hits as u128, denom),
        sum_commit,
    }
}

/// Binding figures for an arbitrary payload vector under finite precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PayloadBinding<P> {
    /// Bob's decoding for each noise outcome (support order of the channel).
    pub decoded: Vec<Option<LatticeCodeword>>,
    /// Best acceptance probability when revealing bit 0 and bit 1.
    pub best: [P; 2],
    pub best_reveals: [Option<LatticeCodeword>; 2],
}

impl<P: Probability> PayloadBinding<P> {
    /// Probability with which Alice can open to her less favourable bit.
    pub fn cheat_probability(&self) -> P {
        let [a, b] = self.best.clone();
        if a < b {
            a
        } else {
            b
        }
    }

    pub fn sum(&self) -> P {
        self.best[0].clone() + self.best[1].clone()
    }
}

/// Sends `w` through every channel rotation, decodes with Bob's ε-ball rule
/// and finds the best reveal per bit.
pub fn binding_search_finite_precision<T: Real, P: Probability>(
    params: &LatticeParams<T>,
    w: &Vec3<T>,
    predicate: Predicate,
) -> Result<PayloadBinding<P>> {
    if (w.norm() - T::one()).abs() > T::geom_tol() {
        return Err(Error::InvalidParams("cheat payload must be a unit vector".into()));
    }
    let support = lattice_mu(params).enumerate_support()?;
    let decoded: Vec<Option<LatticeCodeword>> = support
        .iter()
        .map(|(r, _)| decode_commit(params, &r.apply(w)))
        .collect();
    let present: Vec<LatticeCodeword> = decoded.iter().flatten().cloned().collect();
    let best = best_by_parity(reveal_candidates(params.l(), &present, predicate));
    let denom = support.len() as u128;
    Ok(PayloadBinding {
        best: [0, 1].map(|b: usize| P::ratio(best[b].as_ref().map_or(0, |(_, h)| *h) as u128, denom)),
        best_reveals: best.map(|b| b.map(|(a, _)| a)),
        decoded,
    })
}

/// Honest acceptance probability by enumerating every honest commitment and
/// every channel rotation, through encode → rotate → decode → verify.
pub fn soundness_exact<T: Real, P: Probability>(params: &LatticeParams<T>, budget: u128) -> Result<P> {
    let (d, l) = (params.d(), params.l());
    let honest = pow(l, d)?;
    let support = lattice_mu(params).enumerate_support()?;
    check_budget(honest * support.len() as u128, budget)?;
    let mut accepted = 0u128;
    for idx in 0..honest as u64 {
        let a = LatticeCodeword::from_index(idx, l, d);
        let v = encode(params, &a)?;
        for (r, _) in &support {
            let ok = decode_commit(params, &r.apply(&v))
                .is_some_and(|x| lattice::verify_reveal(params, &x, a.parity(), &a) == Verdict::Accept);
            accepted += u128::from(ok);
        }
    }
    Ok(P::ratio(accepted, honest * support.len() as u128))
}
