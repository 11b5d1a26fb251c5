use maxrep::hyperbolic::HyperbolicError;
use maxrep::max_reps::RepError;
use maxrep::surface_group::GroupError;
use maxrep::symplectic::SymplecticError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error("representation `{0}` has no boundary map; the lab needs a composition with a hyperbolization")]
    Unsupported(String),
    #[error("genus mismatch: representation has genus {rep}, input has genus {input}")]
    GenusMismatch { rep: u32, input: u32 },
    #[error("could not sample {wanted} distinct conjugacy classes (found {found} after {tries} draws)")]
    SamplerExhausted { wanted: usize, found: usize, tries: usize },
    #[error("word `{0}` is not hyperbolic under the hyperbolization")]
    NotHyperbolic(String),
}
