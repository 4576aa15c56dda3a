//! Bit commitment over misaligned reference frames.
//!
//! Alice and Bob exchange 3-vectors through a channel that applies one
//! unknown rotation `R ~ μ` per session. This crate provides:
//!
//! * [`so3`]: vectors, rotations and the distributions μ;
//! * [`lattice`]: the lattice-angle scheme whose binding cheat probability
//!   falls as `1/d` and whose concealing distance vanishes as `L` grows;
//! * [`simple`]: the four-symbol and continuous-angle schemes;
//! * [`protocol`]: a two-party session engine, transcripts, parallel
//!   composition and the group-twirl compiler;
//! * [`security`]: exact and Monte Carlo soundness, concealing and binding.
//!
//! Geometry is generic over [`Real`] (`f32`/`f64`); exact enumerations are
//! generic over [`Probability`] and normally run with [`ExactProb`]. The
//! aliases below fix the double-precision types used by the engine and CLI.
//!
//! Rotation convention: [`so3::Rotation::about_z`]`(θ)` maps the plane angle
//! `α` to `α + θ`, so decoding a rotated codeword `a` yields `a + e_j` or
//! `a + 2e_j`.

pub mod error;
pub mod lattice;
pub mod protocol;
pub mod scalar;
pub mod security;
pub mod simple;
pub mod so3;

pub use error::{Error, Result};
pub use scalar::{Probability, Real};

pub type ExactProb = num_rational::BigRational;

pub type DVec3 = so3::Vec3<f64>;
pub type DRotation = so3::Rotation<f64>;
pub type DMisalignment = so3::MisalignmentDistribution<f64>;
pub type DAngleBasis = lattice::AngleBasis<f64>;
pub type DLatticeParams = lattice::LatticeParams<f64>;

/// Outcome of a single acceptance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Abort,
}

impl Verdict {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Abort
        }
    }

    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}
