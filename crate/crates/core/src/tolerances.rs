//! Numerical tolerances, collected in one record so runs can snapshot them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `|det - 1|` for 2x2 matrices flagged as SL(2,R).
    pub unimodular: f64,
    /// Hyperbolization relator residual, entrywise.
    pub relator_h: f64,
    /// Generators must satisfy `|tr| > 2 + hyperbolic_margin`.
    pub hyperbolic_margin: f64,
    /// `||g^T Omega g - Omega||` for symplectic matrices.
    pub symplectic: f64,
    /// `||J^2 + I||` and asymmetry of `Omega J`.
    pub compatible_j: f64,
    /// Smallest admissible eigenvalue of a positive definite form.
    pub positive_definite: f64,
    /// Asymmetry allowed in a positive definite form.
    pub form_symmetry: f64,
    /// Isotropy residual of a Lagrangian basis.
    pub isotropy: f64,
    /// Smallest singular value for a basis to count as full rank.
    pub rank: f64,
    /// Smallest singular value of `[L1 | L2]` for transversality.
    pub transverse: f64,
    /// Principal-angle distance under which two Lagrangians are equal.
    pub lagrangian_equal: f64,
    /// Strictness margin for the open cones.
    pub cone_margin: f64,
    /// Allowed mass in the diagonal frame blocks of `J` for membership in the
    /// parallel set of a frame.
    pub frame_block: f64,
    /// Representation relator residual.
    pub relator_rep: f64,
    /// Allowed distance of the winding from an integer.
    pub winding: f64,
    /// Eigenvalue moduli must avoid `[1 - proximal, 1 + proximal]`.
    pub proximal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unimodular: 1e-9,
            relator_h: 1e-8,
            hyperbolic_margin: 1e-9,
            symplectic: 1e-9,
            compatible_j: 1e-9,
            positive_definite: 1e-12,
            form_symmetry: 1e-10,
            isotropy: 1e-9,
            rank: 1e-10,
            transverse: 1e-8,
            lagrangian_equal: 1e-8,
            cone_margin: 1e-12,
            frame_block: 1e-8,
            relator_rep: 1e-7,
            winding: 1e-3,
            proximal: 1e-6,
        }
    }
}
