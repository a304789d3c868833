//! Morse-oscillator transition dipoles and level-set tracking in parameter space.
//!
//! The library computes the ground-to-first-excited transition dipole moment
//! `d01 = |<0|r|1>|` of a Morse oscillator, samples it over a 2D (width, depth)
//! parameter rectangle under a scale map, extracts equal-`d01` contours, and
//! measures how those contours move as the scale changes.
//!
//! Units: `hbar = 1`, `mass = 1` throughout. All energies and lengths are
//! dimensionless in this convention; the depth parameter `lambda = sqrt(2C)/a`
//! fully determines the shape of the spectrum.
//!
//! Core math is generic over the floating-point scalar via [`Scalar`];
//! concrete `f64` aliases live at the crate root.

pub mod contour;
pub mod dipole;
pub mod eigen;
pub mod field;
pub mod field_io;
pub mod fixtures;
pub mod grid;
pub mod morse;
pub mod solver;
pub mod speed;
pub mod spline;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerics are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossy conversion from `f64` constants.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Reduced Planck constant in the unit convention of this crate.
pub const HBAR: f64 = 1.0;
/// Particle mass in the unit convention of this crate.
pub const MASS: f64 = 1.0;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input violates a precondition (invalid parameters, too few bound
    /// states, mismatched grids, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative refinement exhausted its budget. The best estimate
    /// reached so far is attached when one exists.
    #[error("convergence failure: {context}")]
    Convergence {
        context: String,
        best_estimate: Option<f64>,
    },
    /// File-format problem while loading persisted data.
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use contour::Contour;
pub use dipole::{dipole_01, transition_moment, DipoleResult};
pub use field::{apply_scale, velocity_field, ParamGrid, ScalarField2D};
pub use grid::RadialGrid;
pub use morse::MorseParams;
pub use solver::{BoundState, SolverConfig};
pub use speed::{SpeedSample, SpeedTable};

/// `f64` concrete aliases for the common types.
pub type MorseParams64 = MorseParams<f64>;
pub type RadialGrid64 = RadialGrid<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type BoundState64 = BoundState<f64>;
pub type ParamGrid64 = ParamGrid<f64>;
pub type ScalarField2D64 = ScalarField2D<f64>;
pub type Contour64 = Contour<f64>;
