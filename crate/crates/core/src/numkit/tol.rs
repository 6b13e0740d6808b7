/// Algebraic identities (`J² = −I`, skewness, anticommutation).
pub const STRUCT_TOL: f64 = 1e-9;
/// Eigenvalue-equality tests (slant spread, classification).
pub const SPECTRAL_TOL: f64 = 1e-7;
/// Comparisons against finite-difference oracles.
pub const FD_TOL: f64 = 1e-6;

/// The three named tolerances, overridable per run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub spectral: f64,
    pub finite_difference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: STRUCT_TOL,
            spectral: SPECTRAL_TOL,
            finite_difference: FD_TOL,
        }
    }
}
