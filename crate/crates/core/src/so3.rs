//! Vectors, proper rotations and the misalignment distributions μ.
//!
//! Convention: [`Rotation::about_z`]`(θ)` is the counter-clockwise rotation,
//! so a plane vector at angle `α` is carried to angle `α + θ`. Every protocol
//! in the crate uses this one convention; encode/channel/decode agree on it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    /// Unit vector `(cos φ, sin φ, 0)`.
    pub fn in_plane(angle: T) -> Self {
        Self::new(angle.cos(), angle.sin(), T::zero())
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    /// Normalizes to unit length; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scale(T::one() / n))
        } else {
            None
        }
    }

    /// Azimuth `atan2(y, x)` in `(-π, π]`.
    pub fn azimuth(&self) -> T {
        self.y.atan2(self.x)
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> fmt::Display for Vec3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Element of SO(3), stored as a row-major orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T> {
    m: [[T; 3]; 3],
}

impl<T: Real> Rotation<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    /// Builds from a matrix, checking orthogonality and `det = +1`.
    pub fn from_matrix(m: [[T; 3]; 3]) -> Result<Self> {
        let r = Self { m };
        if r.is_proper(T::geom_tol()) {
            Ok(r)
        } else {
            Err(Error::InvalidParams("matrix is not a proper rotation".into()))
        }
    }

    /// Counter-clockwise rotation about ẑ: `(cos α, sin α, 0) ↦ (cos(α+θ), sin(α+θ), 0)`.
    ///
    /// This is the transpose of the matrix printed with `+sin θ` in the
    /// upper-right entry; see the crate docs for why the channel uses it.
    pub fn about_z(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[c, -s, z], [s, c, z], [z, z, o]],
        }
    }

    /// Rotation by `angle` about `axis` (normalized internally).
    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Option<Self> {
        let u = axis.normalized()?;
        let half = angle / T::lit(2.0);
        let (s, c) = half.sin_cos();
        Some(Self::from_unit_quaternion(c, u.x * s, u.y * s, u.z * s))
    }

    /// Matrix of the unit quaternion `w + xi + yj + zk`. The input must
    /// already be normalized.
    pub fn from_unit_quaternion(w: T, x: T, y: T, z: T) -> Self {
        let two = T::lit(2.0);
        let o = T::one();
        Self {
            m: [
                [
                    o - two * (y * y + z * z),
                    two * (x * y - z * w),
                    two * (x * z + y * w),
                ],
                [
                    two * (x * y + z * w),
                    o - two * (x * x + z * z),
                    two * (y * z - x * w),
                ],
                [
                    two * (x * z - y * w),
                    two * (y * z + x * w),
                    o - two * (x * x + y * y),
                ],
            ],
        }
    }

    pub fn matrix(&self) -> &[[T; 3]; 3] {
        &self.m
    }

    /// Matrix action `R v`.
    pub fn apply(&self, v: &Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Self { m: out }
    }

    pub fn inverse(&self) -> Self {
        let mut out = self.m;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[j][i];
            }
        }
        Self { m: out }
    }

    pub fn determinant(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `R Rᵀ = I` and `det R = 1`, elementwise within `tol`.
    pub fn is_proper(&self, tol: T) -> bool {
        let rrt = self.compose(&self.inverse());
        let id = Self::identity();
        let orth = (0..3).all(|i| (0..3).all(|j| (rrt.m[i][j] - id.m[i][j]).abs() <= tol));
        orth && (self.determinant() - T::one()).abs() <= tol
    }

    /// Largest elementwise difference between two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }

    /// Row-major entries.
    pub fn to_array(&self) -> [T; 9] {
        let m = &self.m;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }
}

impl<T: Real> Mul for Rotation<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<T: Real> Mul<Vec3<T>> for Rotation<T> {
    type Output = Vec3<T>;
    fn mul(self, rhs: Vec3<T>) -> Vec3<T> {
        self.apply(&rhs)
    }
}

/// Free-function form of [`Rotation::apply`].
pub fn rotate<T: Real>(r: &Rotation<T>, v: &Vec3<T>) -> Vec3<T> {
    r.apply(v)
}

/// Subgroups of SO(3) whose uniform distribution is supported by the twirl.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// Rotations by `2πk/n` about ẑ.
    Cyclic(u32),
    /// All rotations about ẑ.
    Circle,
    Haar,
}

impl Group {
    /// The uniform distribution over this group.
    pub fn uniform<T: Real>(&self) -> MisalignmentDistribution<T> {
        match self {
            Group::Cyclic(n) => MisalignmentDistribution::CyclicZ(*n),
            Group::Circle => MisalignmentDistribution::UniformSegment(T::TAU()),
            Group::Haar => MisalignmentDistribution::HaarSO3,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Group::Cyclic(_))
    }
}

/// A distribution μ over SO(3) modelling the unknown frame change.
#[derive(Debug, Clone, PartialEq)]
pub enum MisalignmentDistribution<T> {
    HaarSO3,
    /// Uniform over the `n` rotations by `2πk/n` about ẑ.
    CyclicZ(u32),
    /// Pick `j` uniformly, then rotate about ẑ by `θ_j` or `2θ_j` with
    /// probability 1/2 each.
    TwoPointAngleMixture(Vec<T>),
    /// Rotation about ẑ by an angle uniform on `[0, φ_max]`.
    UniformSegment(T),
    FiniteSupport(Vec<(Rotation<T>, BigRational)>),
}

impl<T: Real> MisalignmentDistribution<T> {
    pub fn cyclic(n: u32) -> Result<Self> {
        let mu = Self::CyclicZ(n);
        mu.validate()?;
        Ok(mu)
    }

    pub fn two_point(angles: Vec<T>) -> Result<Self> {
        let mu = Self::TwoPointAngleMixture(angles);
        mu.validate()?;
        Ok(mu)
    }

    pub fn segment(max_angle: T) -> Result<Self> {
        let mu = Self::UniformSegment(max_angle);
        mu.validate()?;
        Ok(mu)
    }

    pub fn finite(support: Vec<(Rotation<T>, BigRational)>) -> Result<Self> {
        let mu = Self::FiniteSupport(support);
        mu.validate()?;
        Ok(mu)
    }

    /// Point mass on the identity: the noiseless channel.
    pub fn noiseless() -> Self {
        Self::FiniteSupport(vec![(Rotation::identity(), BigRational::one())])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::HaarSO3 => Ok(()),
            Self::CyclicZ(n) => {
                if *n == 0 {
                    Err(Error::InvalidDistribution("CyclicZ needs n >= 1".into()))
                } else {
                    Ok(())
                }
            }
            Self::TwoPointAngleMixture(angles) => {
                if angles.is_empty() {
                    return Err(Error::InvalidDistribution(
                        "two-point mixture needs at least one angle".into(),
                    ));
                }
                if angles.iter().any(|t| !(t.is_finite() && *t > T::zero())) {
                    return Err(Error::InvalidDistribution(
                        "two-point mixture angles must be positive".into(),
                    ));
                }
                for (i, a) in angles.iter().enumerate() {
                    if angles[i + 1..].iter().any(|b| b == a) {
                        return Err(Error::InvalidDistribution(
                            "two-point mixture angles must be distinct".into(),
                        ));
                    }
                }
                Ok(())
            }
            Self::UniformSegment(max) => {
                if max.is_finite() && *max >= T::zero() {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution(
                        "segment length must be finite and nonnegative".into(),
                    ))
                }
            }
            Self::FiniteSupport(support) => {
                if support.is_empty() {
                    return Err(Error::InvalidDistribution("empty support".into()));
                }
                if support.iter().any(|(_, p)| p < &BigRational::zero()) {
                    return Err(Error::InvalidDistribution("negative probability".into()));
                }
                let total: BigRational = support.iter().map(|(_, p)| p.clone()).sum();
                if !total.is_one() {
                    return Err(Error::InvalidDistribution(format!(
                        "probabilities sum to {total}, not 1"
                    )));
                }
                if support.iter().any(|(r, _)| !r.is_proper(T::geom_tol())) {
                    return Err(Error::InvalidDistribution(
                        "support contains an improper rotation".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Short human-readable tag used in reports and transcripts.
    pub fn label(&self) -> String {
        match self {
            Self::HaarSO3 => "haar".into(),
            Self::CyclicZ(n) => format!("cyclic-z{n}"),
            Self::TwoPointAngleMixture(a) => format!("two-point-mixture(d={})", a.len()),
            Self::UniformSegment(m) => format!("uniform-segment({})", m.as_f64()),
            Self::FiniteSupport(s) => format!("finite-support({})", s.len()),
        }
    }

    /// The group this distribution is uniform over, if any.
    pub fn uniform_group(&self) -> Option<Group> {
        match self {
            Self::HaarSO3 => Some(Group::Haar),
            Self::CyclicZ(n) => Some(Group::Cyclic(*n)),
            Self::UniformSegment(m) if (*m - T::TAU()).abs() <= T::angle_tol() => Some(Group::Circle),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Self::HaarSO3 | Self::UniformSegment(_))
    }

    /// Number of support points for finite variants.
    pub fn support_len(&self) -> Option<usize> {
        match self {
            Self::CyclicZ(n) => Some(*n as usize),
            Self::TwoPointAngleMixture(a) => Some(2 * a.len()),
            Self::FiniteSupport(s) => Some(s.len()),
            _ => None,
        }
    }

    /// The `index`-th support rotation, in the order of [`enumerate_support`](Self::enumerate_support).
    pub fn rotation_at(&self, index: usize) -> Result<Rotation<T>> {
        match self {
            Self::CyclicZ(n) => {
                let angle = T::TAU() * T::lit(index as f64) / T::lit(*n as f64);
                Ok(Rotation::about_z(angle))
            }
            Self::TwoPointAngleMixture(angles) => {
                let theta = angles[index / 2];
                let mult = if index.is_multiple_of(2) { T::one() } else { T::lit(2.0) };
                Ok(Rotation::about_z(theta * mult))
            }
            Self::FiniteSupport(s) => Ok(s[index].0),
            Self::HaarSO3 => Err(Error::ContinuousDistribution("HaarSO3")),
            Self::UniformSegment(_) => Err(Error::ContinuousDistribution("UniformSegment")),
        }
    }

    /// Full support with exact probabilities.
    ///
    /// Order: `CyclicZ` by `k`; the two-point mixture as
    /// `(θ_1, 2θ_1, θ_2, 2θ_2, …)`; `FiniteSupport` as given.
    pub fn enumerate_support(&self) -> Result<Vec<(Rotation<T>, BigRational)>> {
        match self {
            Self::CyclicZ(n) => (0..*n as usize)
                .map(|k| Ok((self.rotation_at(k)?, ratio(1, *n as u64))))
                .collect(),
            Self::TwoPointAngleMixture(a) => {
                let each = ratio(1, 2 * a.len() as u64);
                (0..2 * a.len())
                    .map(|k| Ok((self.rotation_at(k)?, each.clone())))
                    .collect()
            }
            Self::FiniteSupport(s) => Ok(s.clone()),
            Self::HaarSO3 => Err(Error::ContinuousDistribution("HaarSO3")),
            Self::UniformSegment(_) => Err(Error::ContinuousDistribution("UniformSegment")),
        }
    }

    /// Draws a support index for finite variants.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        match self {
            Self::CyclicZ(n) => Ok(rng.random_range(0..*n as usize)),
            Self::TwoPointAngleMixture(a) => {
                let j = rng.random_range(0..a.len());
                let m = usize::from(rng.random_bool(0.5));
                Ok(2 * j + m)
            }
            Self::FiniteSupport(s) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (i, (_, p)) in s.iter().enumerate() {
                    acc += num_traits::ToPrimitive::to_f64(p).unwrap_or(0.0);
                    if u < acc {
                        return Ok(i);
                    }
                }
                // u landed in the rounding slack above the last cumulative sum
                Ok(s.iter().rposition(|(_, p)| !p.is_zero()).unwrap_or(0))
            }
            Self::HaarSO3 => Err(Error::ContinuousDistribution("HaarSO3")),
            Self::UniformSegment(_) => Err(Error::ContinuousDistribution("UniformSegment")),
        }
    }

    /// Draws one rotation. Deterministic given the state of `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rotation<T> {
        match self {
            Self::HaarSO3 => sample_haar(rng),
            Self::UniformSegment(max) => {
                let u: f64 = rng.random();
                Rotation::about_z(*max * T::lit(u))
            }
            _ => {
                let idx = self
                    .sample_index(rng)
                    .expect("finite variants always yield an index");
                self.rotation_at(idx).expect("index within support")
            }
        }
    }
}

/// Uniform rotation from a normalized 4D Gaussian quaternion.
pub fn sample_haar<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Rotation<T> {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-12 {
            return Rotation::from_unit_quaternion(
                T::lit(q[0] / n),
                T::lit(q[1] / n),
                T::lit(q[2] / n),
                T::lit(q[3] / n),
            );
        }
    }
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle<T: Real>(angle: T) -> T {
    let tau = T::TAU();
    let r = angle % tau;
    if r < T::zero() {
        r + tau
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angle_distance<T: Real>(a: T, b: T) -> T {
    let d = wrap_angle(a - b);
    d.min(T::TAU() - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: Vec3<f64>, b: Vec3<f64>) -> bool {
        a.distance(&b) <= 1e-9
    }

    #[test]
    fn identity_and_quarter_turn() {
        let x = Vec3::<f64>::unit_x();
        assert_eq!(Rotation::identity().apply(&x), x);
        let y = Rotation::about_z(FRAC_PI_2).apply(&x);
        assert!(close(y, Vec3::new(0.0, 1.0, 0.0)));
    }

    #[test]
    fn about_z_adds_angles() {
        let v = Vec3::in_plane(0.3);
        let w = Rotation::about_z(0.5).apply(&v);
        assert!(close(w, Vec3::in_plane(0.8)));
    }

    #[test]
    fn inverse_composition_restores_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let theta: f64 = rng.random_range(-PI..PI);
            let v = Vec3::new(rng.random(), rng.random(), rng.random());
            let back = Rotation::about_z(-theta).apply(&Rotation::about_z(theta).apply(&v));
            assert!(close(back, v));
        }
    }

    #[test]
    fn haar_rotations_are_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let r: Rotation<f64> = sample_haar(&mut rng);
            assert!(r.is_proper(1e-9));
            let id = r.inverse().compose(&r);
            assert!(id.max_abs_diff(&Rotation::identity()) <= 1e-9);
        }
    }

    #[test]
    fn axis_angle_matches_about_z() {
        let a = Rotation::from_axis_angle(Vec3::unit_z(), 0.7).unwrap();
        assert!(a.max_abs_diff(&Rotation::about_z(0.7)) <= 1e-12);
        assert!(Rotation::<f64>::from_axis_angle(Vec3::zero(), 1.0).is_none());
    }

    #[test]
    fn from_matrix_rejects_reflection() {
        let refl = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(Rotation::<f64>::from_matrix(refl).is_err());
        assert!(Rotation::<f64>::from_matrix(*Rotation::about_z(1.0).matrix()).is_ok());
    }

    #[test]
    fn cyclic_support_is_closed() {
        for n in 1..=8u32 {
            let mu = MisalignmentDistribution::<f64>::cyclic(n).unwrap();
            let support = mu.enumerate_support().unwrap();
            for (a, _) in &support {
                for (b, _) in &support {
                    let c = a.compose(b);
                    assert!(support.iter().any(|(s, _)| s.max_abs_diff(&c) <= 1e-9));
                }
            }
        }
    }

    #[test]
    fn cyclic_two_support() {
        let s = MisalignmentDistribution::<f64>::CyclicZ(2)
            .enumerate_support()
            .unwrap();
        assert_eq!(s.len(), 2);
        assert!(s[0].0.max_abs_diff(&Rotation::identity()) <= 1e-12);
        assert!(s[1].0.max_abs_diff(&Rotation::about_z(PI)) <= 1e-12);
        assert!(s.iter().all(|(_, p)| *p == ratio(1, 2)));
    }

    #[test]
    fn two_point_support() {
        let mu = MisalignmentDistribution::two_point(vec![0.1f64, 0.2_f64.sqrt()]).unwrap();
        let s = mu.enumerate_support().unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|(_, p)| *p == ratio(1, 4)));
        assert!(s[1].0.max_abs_diff(&Rotation::about_z(0.2)) <= 1e-12);
    }

    #[test]
    fn four_symbol_realization_support() {
        let mu = MisalignmentDistribution::finite(vec![
            (Rotation::<f64>::identity(), ratio(1, 2)),
            (Rotation::about_z(FRAC_PI_2), ratio(1, 2)),
        ])
        .unwrap();
        let s = mu.enumerate_support().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].1, ratio(1, 2));
    }

    #[test]
    fn continuous_variants_have_no_support() {
        assert_eq!(
            MisalignmentDistribution::<f64>::HaarSO3.enumerate_support(),
            Err(Error::ContinuousDistribution("HaarSO3"))
        );
        assert!(MisalignmentDistribution::<f64>::UniformSegment(PI)
            .enumerate_support()
            .is_err());
    }

    #[test]
    fn invalid_distributions() {
        assert!(MisalignmentDistribution::<f64>::cyclic(0).is_err());
        assert!(MisalignmentDistribution::<f64>::two_point(vec![]).is_err());
        assert!(MisalignmentDistribution::<f64>::two_point(vec![0.1, 0.1]).is_err());
        assert!(MisalignmentDistribution::<f64>::two_point(vec![-0.1]).is_err());
        assert!(MisalignmentDistribution::finite(vec![
            (Rotation::<f64>::identity(), ratio(1, 2)),
            (Rotation::about_z(1.0), ratio(1, 3)),
        ])
        .is_err());
    }

    #[test]
    fn cyclic_frequencies() {
        let mu = MisalignmentDistribution::<f64>::CyclicZ(4);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 4];
        for _ in 0..100_000 {
            counts[mu.sample_index(&mut rng).unwrap()] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1e5 - 0.25).abs() <= 0.01);
        }
    }

    #[test]
    fn two_point_frequencies() {
        let d = 3;
        let mu = MisalignmentDistribution::two_point(vec![0.1f64, 0.2, 0.3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut counts = vec![0usize; 2 * d];
        for _ in 0..n {
            counts[mu.sample_index(&mut rng).unwrap()] += 1;
        }
        let p = 1.0 / (2 * d) as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - p).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn finite_support_frequencies() {
        let mu = MisalignmentDistribution::finite(vec![
            (Rotation::<f64>::identity(), ratio(1, 4)),
            (Rotation::about_z(1.0), ratio(3, 4)),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..40_000)
            .filter(|_| mu.sample_index(&mut rng).unwrap() == 1)
            .count();
        assert!((hits as f64 / 40_000.0 - 0.75).abs() < 0.01);
    }

    #[test]
    fn haar_isotropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut mean = Vec3::<f64>::zero();
        for _ in 0..n {
            let r: Rotation<f64> = MisalignmentDistribution::HaarSO3.sample(&mut rng);
            mean = mean + r.apply(&Vec3::unit_x());
        }
        let mean = mean.scale(1.0 / n as f64);
        assert!(mean.norm() < 0.02, "mean {mean}");
    }

    #[test]
    fn segment_angles_stay_in_range() {
        let mu = MisalignmentDistribution::<f64>::segment(PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let w = mu.sample(&mut rng).apply(&Vec3::unit_x());
            assert!(w.y >= -1e-12);
        }
    }

    #[test]
    fn equal_seeds_equal_streams() {
        let mu = MisalignmentDistribution::two_point(vec![0.1f64, 0.2]).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<usize> = (0..500).map(|_| mu.sample_index(&mut a).unwrap()).collect();
        let ys: Vec<usize> = (0..500).map(|_| mu.sample_index(&mut b).unwrap()).collect();
        assert_eq!(xs, ys);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let r: Rotation<f64> = sample_haar(&mut a);
            let s: Rotation<f64> = sample_haar(&mut b);
            assert_eq!(
                r.to_array().map(f64::to_bits),
                s.to_array().map(f64::to_bits)
            );
        }
    }

    #[test]
    fn group_detection() {
        assert_eq!(MisalignmentDistribution::<f64>::CyclicZ(4).uniform_group(), Some(Group::Cyclic(4)));
        assert_eq!(MisalignmentDistribution::<f64>::HaarSO3.uniform_group(), Some(Group::Haar));
        assert_eq!(
            MisalignmentDistribution::<f64>::UniformSegment(std::f64::consts::TAU).uniform_group(),
            Some(Group::Circle)
        );
        assert_eq!(MisalignmentDistribution::<f64>::UniformSegment(PI).uniform_group(), None);
        assert_eq!(
            MisalignmentDistribution::two_point(vec![0.1f64]).unwrap().uniform_group(),
            None
        );
    }

    #[test]
    fn single_precision_geometry() {
        let v = Vec3::<f32>::in_plane(0.25);
        let w = Rotation::about_z(0.5f32).apply(&v);
        assert!(w.distance(&Vec3::in_plane(0.75)) < 1e-6);
        assert!(Rotation::about_z(1.3f32).is_proper(f32::geom_tol()));
    }

    #[test]
    fn wrap_and_distance() {
        assert!((wrap_angle(-0.5f64) - (std::f64::consts::TAU - 0.5)).abs() < 1e-12);
        assert!((angle_distance(0.1f64, std::f64::consts::TAU - 0.1) - 0.2).abs() < 1e-12);
    }
}
