//! Downlink coverage analysis for 3D indoor terahertz networks.
//!
//! The library evaluates the coverage probability of a typical user in a
//! ceiling-mounted THz access-point deployment two independent ways:
//!
//! * **Analytically**, through the dominant-interferer framework: LoS
//!   probabilities under self/human/wall blockage, the 3D hitting
//!   probability of an interfering beam, the geometry of the regions where
//!   dominant interferers can exist, and the mean interferer counts that
//!   enter the coverage expression.
//! * **By Monte Carlo simulation** of full 3D scenes (Poisson access
//!   points, Boolean wall segments, rectangular human screens, sectored
//!   beams), which serves as the ground truth the analysis is validated
//!   against.
//!
//! Modules follow the pipeline: [`scenario`] owns the parameters,
//! [`specfun`] supplies Lambert W / Ei / quadrature, [`antenna`],
//! [`propagation`], [`blockage`] and [`hitting`] build the physical
//! primitives, [`dominant`] assembles the interferer-region geometry,
//! [`coverage`] produces coverage curves, and [`montecarlo`] estimates the
//! same quantities empirically.

pub mod antenna;
pub mod blockage;
pub mod coverage;
pub mod dominant;
pub mod hitting;
pub mod montecarlo;
pub mod propagation;
pub mod scenario;
pub mod specfun;

pub use antenna::{AntennaPattern, Boresight};
pub use blockage::LosModel;
pub use coverage::{Curve, CurvePoint, CoverageModel, CoverageResult, ModelKind, SweepVar};
pub use dominant::{DominantRegions, RegionBounds};
pub use hitting::HittingModel;
pub use montecarlo::{Estimate, Scene};
pub use propagation::{LinkBudget, Lobe};
pub use scenario::{DerivedParams, Environment, Scenario};
pub use specfun::QuadratureSpec;
