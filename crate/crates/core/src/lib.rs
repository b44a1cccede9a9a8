//! Equivariant matrix-valued function algebras on the sphere for the binary
//! polyhedral subgroups of SU(2).
//!
//! The crate builds the finite subgroups of SU(2) as explicit matrix groups,
//! decomposes their regular representations numerically, reconstructs the
//! McKay graphs, and realizes the associated algebras of equivariant
//! polynomial matrix functions on the sphere. On top of that it synthesizes
//! the generator tuples of the four spectral presets (D4, E6, E7, E8),
//! classifies their irreducible *-representations, scans for exceptional
//! representations, and constructs the trivializing gauge of the associated
//! matrix bundle over the quotient sphere.

pub mod artifacts;
pub mod cli;
pub mod equivariant;
pub mod exceptional;
pub mod groups;
pub mod irreps;
pub mod linalg;
pub mod mckay;
pub mod presets;
pub mod sphere;
pub mod trivializer;

pub use equivariant::{BlockStructure, EquivariantPoly};
pub use groups::{FiniteSubgroup, GroupElement, GroupKind};
pub use irreps::{ConjugacyClasses, UnitaryIrrep};
pub use mckay::{DynkinType, McKayGraph};
pub use presets::{GeneratorSystem, PresetName, StarPreset, StarRepresentation};
pub use sphere::{FundamentalDomain, RotationImage, SpecialOrbit, SpecialPointKind};
pub use trivializer::{ClutchingData, GaugeField};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("group closure exceeded {0} elements; generators or tolerance are broken")]
    ClosureOverflow(usize),
    #[error("cyclic group of odd order {0} is not supported")]
    OddCycleUnsupported(usize),
    #[error("irreducible splitting stalled on a {dim}-dimensional subspace after {attempts} probes")]
    SplitFailure { dim: usize, attempts: usize },
    #[error("no irreducible matches the tautological character")]
    TautologicalNotFound,
    #[error("tensor multiplicity {0} is not integer to within 1e-6")]
    NonIntegerMultiplicity(f64),
    #[error("graph is not an affine ADE diagram")]
    NotAde,
    #[error("mesh resolution h = {0} is outside (0, 0.2]")]
    MeshTooCoarse(f64),
    #[error("product degree {0} exceeds the degree cap {1}")]
    DegreeOverflow(usize, usize),
    #[error("synthesis failed after {restarts} restarts; best residual {best:.3e}")]
    SynthesisFailed { restarts: usize, best: f64 },
    #[error("eigenvalue {value:.6} of generator {generator} is {distance:.3e} from the admissible roots")]
    SpectrumViolation {
        generator: usize,
        value: f64,
        distance: f64,
    },
    #[error("off-block mass {0:.3e} at a special point exceeds 1e-7")]
    BlockLeakage(f64),
    #[error("logarithm branch selection failed inside the commutant")]
    LogBranchFailure,
    #[error("gauge relaxation diverged at h = {h} after {sweeps} sweeps")]
    RelaxationDiverged { h: f64, sweeps: usize },
    #[error("block sizes at {point} differ: {left:?} vs {right:?}")]
    BlockSizeMismatch {
        point: char,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
