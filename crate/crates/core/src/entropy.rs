//! Rényi and von Neumann entropies and the Petz Rényi divergence.
//!
//! All logarithms are natural.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_psd, eigh, hermitian_eig, ComplexMatrix, SpectralDecomposition, ToleranceConfig};
use crate::states::BipartiteState;

/// Threshold on `tr[Π_ρ Π_σ]` below which the supports count as orthogonal.
pub const OVERLAP_TOL: f64 = 1e-10;

/// Threshold on `‖(1 − Π_σ) ρ (1 − Π_σ)‖_∞` for `ρ ≪ σ`.
pub const DOMINATION_TOL: f64 = 1e-10;

/// Order `α ∈ [0, ∞]` with the special points tagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RenyiOrder {
    Zero,
    One,
    Infinity,
    Finite(f64),
}

impl RenyiOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(if alpha == 0.0 {
            Self::Zero
        } else if alpha == 1.0 {
            Self::One
        } else if alpha.is_infinite() {
            Self::Infinity
        } else {
            Self::Finite(alpha)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::One => 1.0,
            Self::Infinity => f64::INFINITY,
            Self::Finite(a) => a,
        }
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => write!(f, "inf"),
            other => write!(f, "{}", other.value()),
        }
    }
}

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(x),
            Self::PosInfinity => None,
        }
    }

    /// The value as an `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::PosInfinity => write!(f, "inf"),
        }
    }
}

/// Rényi entropy of a probability vector; entries at or below zero are
/// dropped (`0 log 0 = 0`).
pub fn renyi_from_spectrum(spectrum: &[f64], alpha: RenyiOrder) -> f64 {
    let p: Vec<f64> = spectrum.iter().copied().filter(|&l| l > 0.0).collect();
    match alpha {
        RenyiOrder::Zero => (p.len() as f64).ln(),
        RenyiOrder::One => -p.iter().map(|l| l * l.ln()).sum::<f64>(),
        RenyiOrder::Infinity => -p.iter().fold(0.0f64, |m, &l| m.max(l)).ln(),
        RenyiOrder::Finite(a) => p.iter().map(|l| l.powf(a)).sum::<f64>().ln() / (1.0 - a),
    }
}

/// `H_α(ρ)` for a density matrix.
pub fn renyi_entropy(rho: &ComplexMatrix, alpha: RenyiOrder, cfg: &ToleranceConfig) -> Result<f64> {
    let d = hermitian_eig(rho, cfg)?;
    check_psd(&d, cfg)?;
    Ok(renyi_from_spectrum(d.support_eigenvalues(), alpha))
}

/// Same as [`renyi_entropy`] for matrices built internally, which are
/// Hermitian only up to round-off.
pub(crate) fn renyi_entropy_unchecked(rho: &ComplexMatrix, alpha: RenyiOrder, cfg: &ToleranceConfig) -> Result<f64> {
    let d = eigh(rho, cfg)?;
    check_psd(&d, cfg)?;
    Ok(renyi_from_spectrum(d.support_eigenvalues(), alpha))
}

fn von_neumann(rho: &ComplexMatrix) -> Result<f64> {
    renyi_entropy_unchecked(rho, RenyiOrder::One, &ToleranceConfig::default())
}

/// `I(A:B) = H(A) + H(B) − H(AB)`.
pub fn mutual_information(rho: &BipartiteState) -> Result<f64> {
    Ok(von_neumann(&rho.rho_a())? + von_neumann(&rho.rho_b())? - von_neumann(rho.rho())?)
}

/// `H(A|B) = H(AB) − H(B)`.
pub fn conditional_entropy(rho: &BipartiteState) -> Result<f64> {
    Ok(von_neumann(rho.rho())? - von_neumann(&rho.rho_b())?)
}

/// Petz Rényi divergence `D_α(ρ‖σ) = (α−1)⁻¹ log tr[ρ^α σ^{1−α}]`.
///
/// For `α < 1` the value is finite iff `tr[Π_ρ Π_σ] > 0`; for `α ≥ 1` iff
/// `ρ ≪ σ`. `α = 1` gives the relative entropy. `σ` need not be normalized.
/// The order `∞` is rejected.
pub fn petz_divergence(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    alpha: RenyiOrder,
    cfg: &ToleranceConfig,
) -> Result<ExtendedReal> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let a = match alpha {
        RenyiOrder::Infinity => return Err(Error::InvalidOrder(f64::INFINITY)),
        other => other.value(),
    };
    let dr = eigh(rho, cfg)?;
    check_psd(&dr, cfg)?;
    let ds = eigh(sigma, cfg)?;
    check_psd(&ds, cfg)?;
    petz_from_decompositions(&dr, &ds, a)
}

pub(crate) fn petz_from_decompositions(
    dr: &SpectralDecomposition,
    ds: &SpectralDecomposition,
    a: f64,
) -> Result<ExtendedReal> {
    let pi_s = ds.map_on_support(|_| crate::linalg::ONE);
    if a < 1.0 {
        let pi_r = dr.map_on_support(|_| crate::linalg::ONE);
        if (&pi_r * &pi_s).trace().re <= OVERLAP_TOL {
            return Ok(ExtendedReal::PosInfinity);
        }
    } else {
        let n = pi_s.dim();
        let comp = &ComplexMatrix::identity(n) - &pi_s;
        let leak = &(&comp * &dr.reconstruct()) * &comp;
        let norm = leak.singular_values().into_iter().fold(0.0, f64::max);
        if norm > DOMINATION_TOL {
            return Ok(ExtendedReal::PosInfinity);
        }
    }

    if a == 1.0 {
        let log_r = dr.map_on_support(|l| crate::linalg::real(l.ln()));
        let log_s = ds.map_on_support(|l| crate::linalg::real(l.ln()));
        let r = dr.reconstruct();
        let value = (&r * &(&log_r - &log_s)).trace().re;
        return Ok(ExtendedReal::Finite(value));
    }

    let ra = crate::linalg::power_of(dr, a);
    let sb = crate::linalg::power_of(ds, 1.0 - a);
    let q = (&ra * &sb).trace().re;
    if !(q > 0.0) {
        return Ok(ExtendedReal::PosInfinity);
    }
    Ok(ExtendedReal::Finite(q.ln() / (a - 1.0)))
}

/// Umegaki relative entropy `D(ρ‖σ)`, finite iff `ρ ≪ σ`.
pub fn relative_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ExtendedReal> {
    petz_divergence(rho, sigma, RenyiOrder::One, cfg)
}
