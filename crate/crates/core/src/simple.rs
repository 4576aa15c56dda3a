//! The two warm-up schemes: a four-symbol cyclic channel and its
//! continuous-angle cousin with the interpolation attack.
//!
//! Both use the codewords `C_{a,b} = 2a + b`, sent as the plane vectors
//! `x̂, ŷ, -x̂, -ŷ` (symbol `s` at angle `sπ/2`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::so3::{wrap_angle, MisalignmentDistribution, Rotation, Vec3};
use crate::Verdict;

/// Maximum `|z|` of a normalized payload still treated as planar.
pub const PLANAR_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FourSymbolCodeword {
    /// Randomizing index.
    pub a: u8,
    /// Committed bit.
    pub b: u8,
}

impl FourSymbolCodeword {
    pub fn new(a: u8, b: u8) -> Result<Self> {
        if a > 1 || b > 1 {
            return Err(Error::InvalidParams(format!(
                "codeword indices must be bits, got a={a} b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// `2a + b`.
    pub fn symbol(&self) -> u8 {
        2 * self.a + self.b
    }

    pub fn from_symbol(s: u8) -> Result<Self> {
        if s > 3 {
            return Err(Error::InvalidParams(format!("symbol {s} outside 0..=3")));
        }
        Ok(Self { a: s / 2, b: s % 2 })
    }

    pub fn all() -> [Self; 4] {
        [0, 1, 2, 3].map(|s| Self { a: s / 2, b: s % 2 })
    }

    /// Angle of the codeword vector, `symbol·π/2`.
    pub fn angle<T: Real>(&self) -> T {
        T::FRAC_PI_2() * T::lit(f64::from(self.symbol()))
    }

    pub fn vector<T: Real>(&self) -> Vec3<T> {
        symbol_vector(self.symbol())
    }
}

/// `x̂, ŷ, -x̂, -ŷ` for symbols `0..=3`.
pub fn symbol_vector<T: Real>(s: u8) -> Vec3<T> {
    let (o, z) = (T::one(), T::zero());
    match s % 4 {
        0 => Vec3::new(o, z, z),
        1 => Vec3::new(z, o, z),
        2 => Vec3::new(-o, z, z),
        _ => Vec3::new(z, -o, z),
    }
}

/// Maps a received vector back to the axis symbol it lies on, if any.
pub fn symbol_from_vector<T: Real>(v: &Vec3<T>) -> Option<u8> {
    (0..4u8).find(|&s| symbol_vector::<T>(s).distance(v) <= T::geom_tol())
}

/// The symbol channel: outputs `i` or `i + 1 mod 4` with probability 1/2 each.
pub fn four_symbol_channel<R: Rng + ?Sized>(i: u8, rng: &mut R) -> u8 {
    assert!(i <= 3, "symbol outside 0..=3");
    if rng.random_bool(0.5) {
        (i + 1) % 4
    } else {
        i
    }
}

/// Exact transition matrix `P[out][in]` of the symbol channel, indexed `[input][output]`.
pub fn four_symbol_channel_law() -> [[BigRational; 4]; 4] {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    std::array::from_fn(|i| {
        std::array::from_fn(|o| {
            if o == i || o == (i + 1) % 4 {
                half.clone()
            } else {
                BigRational::zero()
            }
        })
    })
}

/// The rotation realization: identity or a quarter turn about ẑ, each 1/2.
pub fn four_symbol_mu<T: Real>() -> MisalignmentDistribution<T> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    MisalignmentDistribution::FiniteSupport(vec![
        (Rotation::identity(), half.clone()),
        (Rotation::about_z(T::FRAC_PI_2()), half),
    ])
}

/// Transition matrix obtained by sending the axis vectors through
/// [`four_symbol_mu`] and reading the symbol back.
pub fn realized_channel_law<T: Real>() -> Result<[[BigRational; 4]; 4]> {
    let support = four_symbol_mu::<T>().enumerate_support()?;
    let mut law: [[BigRational; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()));
    for (i, row) in law.iter_mut().enumerate() {
        let v = symbol_vector::<T>(i as u8);
        for (r, p) in &support {
            let out = symbol_from_vector(&r.apply(&v)).ok_or_else(|| {
                Error::InvalidDistribution("rotation leaves the symbol axes".into())
            })?;
            row[out as usize] += p.clone();
        }
    }
    Ok(law)
}

/// Bob accepts iff the revealed codeword could have produced `received`.
pub fn four_symbol_verify(received: u8, revealed: FourSymbolCodeword) -> Verdict {
    let s = revealed.symbol();
    Verdict::from_bool(received == s || received == (s + 1) % 4)
}

/// Channel of the continuous scheme: rotation about ẑ uniform on `[0, π]`.
pub fn continuous_mu<T: Real>() -> MisalignmentDistribution<T> {
    MisalignmentDistribution::UniformSegment(T::PI())
}

/// Bob's acceptance arc for a revealed codeword: `[angle, angle + π]`, closed.
pub fn accept_arc<T: Real>(revealed: FourSymbolCodeword) -> (T, T) {
    (revealed.angle(), T::PI())
}

/// Whether `angle` lies on the closed arc starting at `start` of length `len`.
pub fn on_arc<T: Real>(angle: T, start: T, len: T) -> bool {
    let offset = wrap_angle(angle - start);
    let tol = T::angle_tol();
    offset <= len + tol || offset >= T::TAU() - tol
}

/// Length of the intersection of two arcs (each of length at most 2π).
pub fn arc_overlap<T: Real>(a_start: T, a_len: T, b_start: T, b_len: T) -> T {
    let shift = wrap_angle(b_start - a_start);
    let overlap = |lo: T, hi: T| (hi.min(a_len) - lo.max(T::zero())).max(T::zero());
    overlap(shift, shift + b_len) + overlap(shift - T::TAU(), shift - T::TAU() + b_len)
}

/// Reveal check given the angle Alice sent and the realized channel shift.
pub fn continuous_commit_verify<T: Real>(
    sent_angle: T,
    revealed: FourSymbolCodeword,
    shift: T,
) -> Verdict {
    let (start, len) = accept_arc::<T>(revealed);
    Verdict::from_bool(on_arc(sent_angle + shift, start, len))
}

/// Bob's measurement in the continuous scheme: the azimuth of the normalized
/// payload, or `None` if it leaves the plane.
pub fn continuous_receive<T: Real>(payload: &Vec3<T>) -> Option<T> {
    let u = payload.normalized()?;
    if u.z.abs() > T::lit(PLANAR_TOLERANCE) {
        return None;
    }
    Some(u.azimuth())
}

/// Reveal check on a received vector.
pub fn continuous_verify_vector<T: Real>(received: &Vec3<T>, revealed: FourSymbolCodeword) -> Verdict {
    match continuous_receive(received) {
        Some(angle) => {
            let (start, len) = accept_arc::<T>(revealed);
            Verdict::from_bool(on_arc(angle, start, len))
        }
        None => Verdict::Abort,
    }
}

/// Exact acceptance probability of `revealed` when Alice sent `sent_angle`
/// over the `[0, π]` channel.
pub fn continuous_accept_probability<T: Real>(sent_angle: T, revealed: FourSymbolCodeword) -> T {
    let (start, len) = accept_arc::<T>(revealed);
    arc_overlap(sent_angle, T::PI(), start, len) / T::PI()
}

/// Alice sends `cos(απ/2) x̂ + sin(απ/2) ŷ` and later reveals either `C_{0,0}` or `C_{0,1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationStrategy<T> {
    alpha: T,
}

impl<T: Real> InterpolationStrategy<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha >= T::zero() && alpha <= T::one() {
            Ok(Self { alpha })
        } else {
            Err(Error::InvalidParams(format!(
                "interpolation alpha {alpha} outside [0, 1]"
            )))
        }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn angle(&self) -> T {
        self.alpha * T::FRAC_PI_2()
    }

    pub fn payload(&self) -> Vec3<T> {
        Vec3::in_plane(self.angle())
    }

    /// Closed forms `(1 - α/2, (1 + α)/2)`.
    pub fn closed_form(&self) -> (T, T) {
        let half = T::lit(0.5);
        (T::one() - self.alpha * half, (T::one() + self.alpha) * half)
    }

    /// Acceptance probabilities from arc geometry.
    pub fn arc_probabilities(&self) -> (T, T) {
        let zero = FourSymbolCodeword { a: 0, b: 0 };
        let one = FourSymbolCodeword { a: 0, b: 1 };
        (
            continuous_accept_probability(self.angle(), zero),
            continuous_accept_probability(self.angle(), one),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationRow<T> {
    pub alpha: T,
    pub p_accept_0: T,
    pub p_accept_1: T,
}

/// Arc-length acceptance probabilities for each α in the grid.
pub fn interpolation_curve<T: Real>(alphas: &[T]) -> Result<Vec<InterpolationRow<T>>> {
    alphas
        .iter()
        .map(|&alpha| {
            let (p0, p1) = InterpolationStrategy::new(alpha)?.arc_probabilities();
            Ok(InterpolationRow {
                alpha,
                p_accept_0: p0,
                p_accept_1: p1,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn codeword_symbols() {
        for s in 0..4 {
            let c = FourSymbolCodeword::from_symbol(s).unwrap();
            assert_eq!(c.symbol(), s);
        }
        assert!(FourSymbolCodeword::from_symbol(4).is_err());
        assert!(FourSymbolCodeword::new(2, 0).is_err());
        assert_eq!(FourSymbolCodeword::new(1, 0).unwrap().symbol(), 2);
    }

    #[test]
    fn channel_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000;
        let mut threes = 0;
        for _ in 0..n {
            let out = four_symbol_channel(3, &mut rng);
            assert!(out == 3 || out == 0);
            if out == 3 {
                threes += 1;
            }
        }
        let sigma = (0.25f64 / n as f64).sqrt();
        assert!((threes as f64 / n as f64 - 0.5).abs() <= 3.0 * sigma);
        for i in 0..4 {
            for _ in 0..50 {
                let out = four_symbol_channel(i, &mut rng);
                assert!((out + 4 - i) % 4 <= 1);
            }
        }
    }

    #[test]
    fn rotation_realization_is_exact() {
        assert_eq!(realized_channel_law::<f64>().unwrap(), four_symbol_channel_law());
    }

    #[test]
    fn verify_examples() {
        let zero = FourSymbolCodeword::from_symbol(0).unwrap();
        assert_eq!(four_symbol_verify(1, zero), Verdict::Accept);
        assert_eq!(four_symbol_verify(0, zero), Verdict::Accept);
        assert_eq!(four_symbol_verify(2, zero), Verdict::Abort);
        let three = FourSymbolCodeword::from_symbol(3).unwrap();
        assert_eq!(four_symbol_verify(0, three), Verdict::Accept);
    }

    #[test]
    fn arc_membership() {
        assert!(on_arc(0.0, 0.0, PI));
        assert!(on_arc(PI, 0.0, PI));
        assert!(!on_arc(PI + 1e-6, 0.0, PI));
        assert!(on_arc(-1e-12, 0.0, PI));
        assert!(on_arc(2.0 * PI + 0.5, 0.0, PI));
        assert!(on_arc(0.1, 3.0 * FRAC_PI_2, PI));
    }

    #[test]
    fn overlap_lengths() {
        assert!((arc_overlap(0.0, PI, FRAC_PI_2, PI) - FRAC_PI_2).abs() < 1e-12);
        assert!((arc_overlap(0.0, PI, PI, PI)).abs() < 1e-12);
        assert!((arc_overlap(3.0 * FRAC_PI_2, PI, 0.0, PI) - FRAC_PI_2).abs() < 1e-12);
        assert!((arc_overlap(0.0, 2.0 * PI, 1.0, PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn honest_continuous_always_accepts() {
        for c in FourSymbolCodeword::all() {
            assert!((continuous_accept_probability::<f64>(c.angle(), c) - 1.0).abs() < 1e-12);
            for k in 0..=100 {
                let shift = PI * k as f64 / 100.0;
                assert_eq!(continuous_commit_verify(c.angle(), c, shift), Verdict::Accept);
            }
        }
    }

    #[test]
    fn interpolation_endpoints() {
        let s = InterpolationStrategy::new(0.5f64).unwrap();
        assert_eq!(s.closed_form(), (0.75, 0.75));
        let (a0, a1) = s.arc_probabilities();
        assert!((a0 - 0.75).abs() < 1e-12 && (a1 - 0.75).abs() < 1e-12);

        let rows = interpolation_curve(&[0.0f64, 1.0]).unwrap();
        assert!((rows[0].p_accept_0 - 1.0).abs() < 1e-12);
        assert!((rows[0].p_accept_1 - 0.5).abs() < 1e-12);
        assert!((rows[1].p_accept_0 - 0.5).abs() < 1e-12);
        assert!((rows[1].p_accept_1 - 1.0).abs() < 1e-12);
        assert!(InterpolationStrategy::new(1.5f64).is_err());
    }

    #[test]
    fn curve_sums_to_three_halves() {
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        for row in interpolation_curve(&grid).unwrap() {
            assert!((row.p_accept_0 + row.p_accept_1 - 1.5).abs() <= 1e-12);
            let (c0, c1) = InterpolationStrategy::new(row.alpha).unwrap().closed_form();
            assert!((c0 - row.p_accept_0).abs() <= 1e-12);
            assert!((c1 - row.p_accept_1).abs() <= 1e-12);
        }
    }

    #[test]
    fn receive_rejects_out_of_plane() {
        assert!(continuous_receive(&Vec3::new(1.0, 0.0, 1e-3)).is_none());
        assert!(continuous_receive(&Vec3::<f64>::zero()).is_none());
        let a = continuous_receive(&Vec3::new(0.0, 2.0, 0.0)).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-15);
        let c = FourSymbolCodeword::new(0, 0).unwrap();
        assert_eq!(continuous_verify_vector(&Vec3::new(0.0, 0.0, 1.0), c), Verdict::Abort);
        assert_eq!(continuous_verify_vector(&Vec3::new(0.0, 1.0, 0.0), c), Verdict::Accept);
    }
}
