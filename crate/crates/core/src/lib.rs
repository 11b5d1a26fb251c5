//! Maximal representations of closed surface groups into `Sp(2n, R)`.
//!
//! The numerical types are generic over [`Real`]; the aliases below fix the
//! scalar to `f64`, which is what the default tolerances are tuned for.

pub mod hyperbolic;
pub mod linalg;
pub mod max_reps;
pub mod optimize;
pub mod scalar;
pub mod surface_group;
pub mod symplectic;
pub mod table;
pub mod tolerances;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use scalar::Real;
pub use tolerances::Tolerances;

pub type Mat2 = hyperbolic::Mat2<f64>;
pub type BoundaryPoint = hyperbolic::BoundaryPoint<f64>;
pub type TangentTriple = hyperbolic::TangentTriple<f64>;
pub type Hyperbolization = hyperbolic::Hyperbolization<f64>;
pub type SymplecticMatrix = symplectic::SymplecticMatrix<f64>;
pub type CompatibleJ = symplectic::CompatibleJ<f64>;
pub type Lagrangian = symplectic::Lagrangian<f64>;
pub type Frame = symplectic::Frame<f64>;
pub type PosDefForm = symplectic::PosDefForm<f64>;
pub type CausalCurve = symplectic::CausalCurve<f64>;
pub type Embedding = max_reps::Embedding<f64>;
pub type MaximalRep = max_reps::MaximalRep<f64>;
pub type BoundaryMap = max_reps::BoundaryMap<f64>;
