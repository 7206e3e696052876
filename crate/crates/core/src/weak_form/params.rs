use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Densities, viscosities and the surface-tension coefficient.
///
/// Invariants: `0 < β₁ ≤ β₂`, `μ₁, μ₂ > 0`, `σ ≥ 0` (`σ = 0` switches surface
/// tension off for control scenarios).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams<T> {
    /// Density of the inner phase.
    pub beta1: T,
    /// Density of the outer phase.
    pub beta2: T,
    pub mu1: T,
    pub mu2: T,
    pub sigma: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Inside `Ω⁻(t)`.
    Minus,
    /// Outside `Ω⁻(t)`.
    Plus,
}

impl<T: Real> MaterialParams<T> {
    /// Checks the invariants; the error path is a JSON pointer into the material block.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| Err(Error::Config { path: format!("/material/{field}"), message });
        if !(self.beta1 > T::zero()) {
            return bad("beta1", format!("density must be positive, got {}", self.beta1));
        }
        if !(self.beta1 <= self.beta2) {
            return bad("beta1", format!("requires beta1 <= beta2, got {} > {}", self.beta1, self.beta2));
        }
        if !(self.mu1 > T::zero()) {
            return bad("mu1", format!("viscosity must be positive, got {}", self.mu1));
        }
        if !(self.mu2 > T::zero()) {
            return bad("mu2", format!("viscosity must be positive, got {}", self.mu2));
        }
        if !(self.sigma >= T::zero()) {
            return bad("sigma", format!("surface tension must be non-negative, got {}", self.sigma));
        }
        Ok(())
    }

    pub fn density(&self, phase: Phase) -> T {
        match phase {
            Phase::Minus => self.beta1,
            Phase::Plus => self.beta2,
        }
    }

    pub fn viscosity(&self, phase: Phase) -> T {
        match phase {
            Phase::Minus => self.mu1,
            Phase::Plus => self.mu2,
        }
    }

    /// `ρ = (β₁ − β₂)χ + β₂`.
    pub fn density_from_indicator(&self, chi: T) -> T {
        (self.beta1 - self.beta2) * chi + self.beta2
    }

    /// `χ = (ρ − β₂)/(β₁ − β₂)`; `None` when the phases have equal density.
    pub fn indicator_from_density(&self, rho: T) -> Option<T> {
        (self.beta1 != self.beta2).then(|| (rho - self.beta2) / (self.beta1 - self.beta2))
    }

    /// `μ(ρ)` for `ρ ∈ {β₁, β₂}`, picking the nearer density.
    pub fn viscosity_of_density(&self, rho: T) -> T {
        if (rho - self.beta1).abs() <= (rho - self.beta2).abs() {
            self.mu1
        } else {
            self.mu2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_order_is_enforced_with_path() {
        let p = MaterialParams { beta1: 2.0, beta2: 1.0, mu1: 1.0, mu2: 1.0, sigma: 0.5 };
        match p.validate() {
            Err(Error::Config { path, .. }) => assert_eq!(path, "/material/beta1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn density_indicator_round_trip() {
        let p = MaterialParams { beta1: 1.0, beta2: 3.0, mu1: 1.0, mu2: 2.0, sigma: 0.5 };
        for chi in [0.0, 1.0] {
            assert_eq!(p.indicator_from_density(p.density_from_indicator(chi)), Some(chi));
        }
        assert_eq!(p.viscosity_of_density(3.0), 2.0);
    }
}
