//! Random geometric complexes: sampling, Vietoris–Rips and Čech
//! construction, Betti numbers over prime fields, a distance-ordered
//! discrete Morse field, component censuses and a Monte Carlo sweep harness.
//!
//! ```
//! use geocomplex::complex::rips_complex;
//! use geocomplex::geometry::{build_geometric_graph, sample_points, Density};
//! use geocomplex::homology::{betti_numbers, PrimeField};
//!
//! let cloud = sample_points(Density::cube(2)?, 200, 42)?;
//! let graph = build_geometric_graph(&cloud, 0.1)?;
//! let complex = rips_complex(&graph, 2)?;
//! let profile = betti_numbers(&complex, 1, PrimeField::default())?;
//! assert!(profile.betti(0) >= 1);
//! # Ok::<(), geocomplex::Error>(())
//! ```

pub mod census;
pub mod complex;
pub mod experiments;
pub mod geometry;
pub mod homology;
pub mod morse;

use thiserror::Error;

pub use census::CensusError;
pub use complex::ComplexError;
pub use experiments::ExperimentError;
pub use geometry::GeometryError;
pub use homology::HomologyError;
pub use morse::MorseError;

/// Any error raised by the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

impl Error {
    /// True when a face, matrix or subset budget stopped the computation.
    pub fn is_resource_exhausted(&self) -> bool {
        match self {
            Error::Complex(ComplexError::FaceBudgetExceeded { .. }) => true,
            Error::Homology(HomologyError::MatrixBudgetExceeded { .. }) => true,
            Error::Census(CensusError::SubsetBudgetExceeded(_)) => true,
            Error::Experiment(e) => e.is_resource_exhausted(),
            _ => false,
        }
    }
}
