use serde::{Deserialize, Serialize};

/// Tolerances and budgets shared by every numerical routine.
///
/// All fields have defaults, so a partial JSON document is a valid
/// configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericContext {
    /// Relative tolerance of [`crate::psd_check`]: PSD iff
    /// `λ_min ≥ −eps_psd · max(1, ‖M‖_∞)`.
    pub eps_psd: f64,
    /// Absolute tolerance for entrywise nonnegativity.
    pub eps_nn: f64,
    /// Residual target of the affine ∩ PSD feasibility engine.
    pub eps_feas: f64,
    /// Iteration budget of the alternating projections.
    pub max_iter: usize,
    /// Verification tolerance of LP points and Farkas rays.
    pub eps_lp: f64,
    /// Coefficient tolerance of the Polya test.
    pub eps_pnn: f64,
    /// Relative residual accepted for a completely positive decomposition.
    pub eps_cp: f64,
    /// Threshold below which a witness pairing certifies entanglement.
    pub eps_witness: f64,
    /// Largest spread of λ inside an orbit still counted as invariant.
    pub sd_invariance_tol: f64,
    /// Seed for every randomized routine.
    pub seed: u64,
    /// Number of restarts of the completely positive factorization.
    pub cp_restarts: usize,
    /// Refinement depth of the simplex grid search.
    pub grid_depth: u32,
    /// Enables the factorized Gauss–Newton refinement after the projections.
    pub polish: bool,
}

impl Default for NumericContext {
    fn default() -> Self {
        NumericContext {
            eps_psd: 1e-8,
            eps_nn: 1e-12,
            eps_feas: 1e-8,
            max_iter: 5000,
            eps_lp: 1e-9,
            eps_pnn: 1e-12,
            eps_cp: 1e-6,
            eps_witness: 1e-8,
            sd_invariance_tol: 1e-12,
            seed: 0x5eed_2024,
            cp_restarts: 32,
            grid_depth: 6,
            polish: true,
        }
    }
}

impl NumericContext {
    /// A copy with a different PSD tolerance.
    pub fn with_eps_psd(&self, eps: f64) -> Self {
        NumericContext { eps_psd: eps, ..self.clone() }
    }

    /// A copy with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        NumericContext { seed, ..self.clone() }
    }
}
