//! Canonical and marginal-canonical purifications.
//!
//! A vector on `X ⊗ X*` is stored through its coefficient matrix: the
//! vector `(C ⊗ 1)|Ω⟩` has amplitude `C[i, j]` at flat index `i·d + j`.
//! For a bipartite state the factor order is `A, B, A*, B*`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::cf::{is_cf_invariant, CfConjugate};
use crate::error::{Error, Result};
use crate::linalg::{self, check_psd, hermitian_eig, ComplexMatrix, ToleranceConfig, ONE, ZERO};
use crate::states::{BipartiteState, PureVector};

/// Tolerance on unitarity and commutation of a twist.
pub const TWIST_TOL: f64 = 1e-10;

/// Tolerance of the defining equations in `classify_purification`.
pub const CLASSIFY_TOL: f64 = 1e-8;

/// `Σ_j |j⟩ ⊗ |j⟩`, not normalized.
pub fn omega_vector(d: usize) -> PureVector {
    let v = DVector::from_fn(d * d, |i, _| if i / d == i % d { ONE } else { ZERO });
    PureVector::new(v, vec![d, d]).expect("consistent dims")
}

/// The vector with coefficient matrix `c` on `X ⊗ X*`.
pub fn from_coefficients(c: &ComplexMatrix, dims: Vec<usize>) -> Result<PureVector> {
    let d = c.dim();
    let v = DVector::from_fn(d * d, |k, _| c[(k / d, k % d)]);
    let mut all = dims.clone();
    all.extend(dims);
    PureVector::new(v, all)
}

/// `√ρ_AB |Ω⟩_{AA*} ⊗ |Ω⟩_{BB*}` with factors ordered `A, B, A*, B*`.
pub fn canonical_purification(rho: &BipartiteState) -> Result<PureVector> {
    let c = linalg::psd_power(rho.rho(), 0.5, &ToleranceConfig::default())?;
    from_coefficients(&c, vec![rho.d_a(), rho.d_b()])
}

/// `tr_{BB*}` of the vector with coefficient matrix `c` on `AB ⊗ A*B*`,
/// returned as an operator on `A ⊗ A*`.
pub(crate) fn aa_star_marginal(c: &ComplexMatrix, d_a: usize, d_b: usize) -> ComplexMatrix {
    let cm = c.as_matrix();
    let k = DMatrix::from_fn(d_a * d_a, d_b * d_b, |r, s| {
        let (a, a_star) = (r / d_a, r % d_a);
        let (b, b_star) = (s / d_b, s % d_b);
        cm[(a * d_b + b, a_star * d_b + b_star)]
    });
    ComplexMatrix::from_matrix(&k * k.adjoint())
        .expect("square")
        .hermitian_part()
}

fn check_twist(rho: &ComplexMatrix, u: &ComplexMatrix) -> Result<()> {
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: u.dim(),
        });
    }
    let residual = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.dim()));
    if residual > TWIST_TOL {
        return Err(Error::NotUnitary { residual });
    }
    let residual = rho.commutator_norm(u);
    if residual > TWIST_TOL {
        return Err(Error::NotCommuting { residual });
    }
    Ok(())
}

/// `ρ̂_{AA*}`, the `AA*` marginal of the canonical purification. With a
/// twist `U` commuting with ρ, the marginal of `√ρ U |Ω⟩|Ω⟩` instead.
pub fn rho_hat_marginal(rho: &BipartiteState, twist: Option<&ComplexMatrix>) -> Result<ComplexMatrix> {
    let sqrt = linalg::psd_power(rho.rho(), 0.5, &ToleranceConfig::default())?;
    let c = match twist {
        Some(u) => {
            check_twist(rho.rho(), u)?;
            &sqrt * u
        }
        None => sqrt,
    };
    Ok(aa_star_marginal(&c, rho.d_a(), rho.d_b()))
}

/// `Σ_j e^{iθ_j} √p_j |e_j⟩ ⊗ |e_j⟩*` over the eigenbasis of `ρ_A`
/// (descending eigenvalues, largest entry of each eigenvector real positive).
pub fn purification_from_phases(rho: &ComplexMatrix, theta: &[f64]) -> Result<PureVector> {
    let cfg = ToleranceConfig::default();
    if theta.len() != rho.dim() {
        return Err(Error::LengthMismatch {
            expected: rho.dim(),
            found: theta.len(),
        });
    }
    let eig = hermitian_eig(rho, &cfg)?;
    check_psd(&eig, &cfg)?;
    let n = rho.dim();
    let v = eig.eigenvectors().as_matrix();
    let mut c = DMatrix::zeros(n, n);
    for j in 0..eig.support_rank() {
        let w = Complex64::from_polar(eig.eigenvalues()[j].sqrt(), theta[j]);
        let col = v.column(j);
        c += col * col.adjoint() * w;
    }
    from_coefficients(&ComplexMatrix::from_matrix(c)?, vec![n])
}

/// `√ρ U |Ω⟩` on `A ⊗ A*`.
pub fn purification_from_unitary(rho: &ComplexMatrix, u: &ComplexMatrix) -> Result<PureVector> {
    check_twist(rho, u)?;
    let sqrt = linalg::matrix_power_on_support(rho, 0.5, &ToleranceConfig::default())?;
    from_coefficients(&(&sqrt * u), vec![rho.dim()])
}

/// The most specific class a purification belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PurificationClass {
    Canonical,
    CfInvariant,
    MarginalCanonical,
    None,
}

/// Classifies a vector `v` on `A ⊗ A*` as a purification of `ρ_A`.
pub fn classify_purification(rho: &ComplexMatrix, v: &PureVector) -> Result<PurificationClass> {
    let d = rho.dim();
    if v.dims() != [d, d] {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: v.len(),
        });
    }
    let canonical = from_coefficients(
        &linalg::matrix_power_on_support(rho, 0.5, &ToleranceConfig::default())?,
        vec![d],
    )?;
    if (canonical.amplitudes() - v.amplitudes()).norm() <= CLASSIFY_TOL {
        return Ok(PurificationClass::Canonical);
    }
    let first_ok = v.reduced(&[0])?.max_abs_diff(rho) <= CLASSIFY_TOL;
    if !first_ok {
        return Ok(PurificationClass::None);
    }
    if is_cf_invariant(v, 0.0)?.residual <= CLASSIFY_TOL {
        return Ok(PurificationClass::CfInvariant);
    }
    if v.reduced(&[1])?.max_abs_diff(&rho.conj()) <= CLASSIFY_TOL {
        return Ok(PurificationClass::MarginalCanonical);
    }
    Ok(PurificationClass::None)
}

/// Residual of `v` from CF-invariance, for callers that only need the number.
pub fn cf_residual(v: &PureVector) -> Result<f64> {
    Ok(v.cf_apply()?.cf_distance(v))
}
