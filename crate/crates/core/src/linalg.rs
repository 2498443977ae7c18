//! Dense complex linear algebra on square matrices.
//!
//! Composite systems use the row-major index convention `i = a * d_B + b`
//! throughout: the first factor is the most significant digit.

use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Convenience constructor for a real-valued complex number.
#[inline]
pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch {
                expected: (m.nrows(), m.nrows()),
                found: (m.nrows(), m.ncols()),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(Self(m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { real(diag[i]) } else { ZERO })
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be `dim²`.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &DVector<Complex64>) -> Self {
        Self(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * real(s))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `max_{j,k} |M[j,k] - conj(M[k,j])|`
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol * (1.0 + self.max_abs())
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * real(0.5))
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.0 * v
    }

    /// `⟨v|M|v⟩`
    pub fn expectation(&self, v: &DVector<Complex64>) -> Complex64 {
        v.dotc(&(&self.0 * v))
    }

    /// Spectral norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        let c = &(self * other) - &(other * self);
        c.singular_values().into_iter().fold(0.0, f64::max)
    }

    /// Singular values in no particular order.
    pub fn singular_values(&self) -> Vec<f64> {
        self.0.clone().singular_values().iter().copied().collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Numerical tolerances shared by the spectral routines. All dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub hermit_tol: f64,
    pub psd_clip_tol: f64,
    pub support_rel_tol: f64,
    pub eig_residual_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermit_tol: 1e-12,
            psd_clip_tol: 1e-10,
            support_rel_tol: 1e-12,
            eig_residual_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("hermit_tol", self.hermit_tol),
            ("psd_clip_tol", self.psd_clip_tol),
            ("support_rel_tol", self.support_rel_tol),
            ("eig_residual_tol", self.eig_residual_tol),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }

    /// Eigenvalues strictly above this value belong to the support.
    pub fn support_threshold(&self, lambda_max: f64) -> f64 {
        self.support_rel_tol * lambda_max.max(1.0)
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    support_rank: usize,
    support_threshold: f64,
}

impl SpectralDecomposition {
    /// Assembles a decomposition; `eigenvalues` must already be sorted
    /// descending and paired with the columns of `eigenvectors`.
    pub(crate) fn from_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: ComplexMatrix,
        cfg: &ToleranceConfig,
    ) -> Self {
        let lmax = eigenvalues.first().copied().unwrap_or(0.0);
        let support_threshold = cfg.support_threshold(lmax);
        let support_rank = eigenvalues
            .iter()
            .filter(|&&l| l > support_threshold)
            .count();
        Self {
            eigenvalues,
            eigenvectors,
            support_rank,
            support_threshold,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, j: usize) -> DVector<Complex64> {
        self.eigenvectors.as_matrix().column(j).into_owned()
    }

    pub fn support_rank(&self) -> usize {
        self.support_rank
    }

    pub fn support_threshold(&self) -> f64 {
        self.support_threshold
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Eigenvalues above the support threshold, descending.
    pub fn support_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[..self.support_rank]
    }

    /// `V diag(f(λ_j)) V†`, with `f` applied on the support and zero elsewhere.
    pub fn map_on_support(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = self.eigenvectors.as_matrix();
        let mut scaled = v.clone();
        for j in 0..n {
            let factor = if j < self.support_rank {
                f(self.eigenvalues[j])
            } else {
                ZERO
            };
            for i in 0..n {
                scaled[(i, j)] *= factor;
            }
        }
        ComplexMatrix(scaled * v.adjoint())
    }

    /// `V diag(λ) V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = self.eigenvectors.as_matrix();
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= real(l);
            }
        }
        ComplexMatrix(scaled * v.adjoint())
    }
}

/// Eigendecomposition of the Hermitian part of `m` without the Hermiticity
/// check. Used internally on products that are Hermitian up to round-off.
pub(crate) fn eigh(m: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<SpectralDecomposition> {
    let h = m.hermitian_part();
    let n = h.dim();
    let scale = h.max_abs();
    let eig = h
        .as_matrix()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::NoConvergence {
            residual: f64::INFINITY,
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut vecs = DMatrix::<Complex64>::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        // Phase convention: largest-magnitude entry real and positive.
        let mut pivot = 0;
        for i in 1..n {
            if col[i].norm() > col[pivot].norm() * (1.0 + 1e-12) {
                pivot = i;
            }
        }
        let p = col[pivot];
        let phase = if p.norm() > 0.0 { p.conj() / p.norm() } else { ONE };
        for i in 0..n {
            vecs[(i, dst)] = col[i] * phase;
        }
    }

    let decomposition = SpectralDecomposition::from_parts(vals, ComplexMatrix(vecs), cfg);
    let residual = decomposition.reconstruct().max_abs_diff(&h);
    if residual > cfg.eig_residual_tol * (1.0 + scale) {
        return Err(Error::NoConvergence { residual });
    }
    Ok(decomposition)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eig(m: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<SpectralDecomposition> {
    let residual = m.hermitian_residual();
    if residual > cfg.hermit_tol * (1.0 + m.max_abs()) {
        return Err(Error::NonHermitian { residual });
    }
    eigh(m, cfg)
}

/// Fails with `NotPsd` when an eigenvalue lies below `-psd_clip_tol * λ_max`.
pub(crate) fn check_psd(d: &SpectralDecomposition, cfg: &ToleranceConfig) -> Result<()> {
    let lmin = d.min_eigenvalue();
    let floor = -cfg.psd_clip_tol * d.max_eigenvalue().max(0.0);
    if lmin < floor && lmin < -f64::MIN_POSITIVE {
        return Err(Error::NotPsd { eigenvalue: lmin });
    }
    Ok(())
}

/// `M^p` taken on the support of `M`. `p = 0` yields the support projector.
pub fn matrix_power_on_support(
    m: &ComplexMatrix,
    p: f64,
    cfg: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!("power {p} is not finite")));
    }
    let d = hermitian_eig(m, cfg)?;
    check_psd(&d, cfg)?;
    Ok(power_of(&d, p))
}

pub(crate) fn power_of(d: &SpectralDecomposition, p: f64) -> ComplexMatrix {
    if p == 0.0 {
        d.map_on_support(|_| ONE)
    } else if p == 1.0 {
        d.map_on_support(real)
    } else {
        d.map_on_support(|l| real(l.powf(p)))
    }
}

/// Power of a PSD matrix that is Hermitian only up to round-off.
pub(crate) fn psd_power(m: &ComplexMatrix, p: f64, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    let d = eigh(m, cfg)?;
    check_psd(&d, cfg)?;
    Ok(power_of(&d, p))
}

/// Orthogonal projector onto the support of a PSD matrix.
pub fn support_projector(m: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    matrix_power_on_support(m, 0.0, cfg)
}

/// Which factor of `A ⊗ B` to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace on `A ⊗ B`.
pub fn partial_trace(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let keep = match keep {
        Subsystem::A => [0],
        Subsystem::B => [1],
    };
    partial_trace_multi(m, &[d_a, d_b], &keep)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offsets into the full index for every multi-index over `subsystems`,
/// enumerated row-major in the order the subsystems are listed.
fn offsets(dims: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &s in subsystems {
        let mut next = Vec::with_capacity(out.len() * dims[s]);
        for &o in &out {
            for k in 0..dims[s] {
                next.push(o + k * st[s]);
            }
        }
        out = next;
    }
    out
}

fn check_subsystems(dims: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || seen[k] {
            return Err(Error::InvalidParameter(format!(
                "invalid subsystem list {keep:?} for {} factors",
                dims.len()
            )));
        }
        seen[k] = true;
    }
    Ok((0..dims.len()).filter(|&k| !seen[k]).collect())
}

/// Partial trace over every factor not listed in `keep`. The output factors
/// appear in the order given by `keep`, so a full `keep` permutes subsystems.
pub fn partial_trace_multi(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: m.dim(),
        });
    }
    let traced = check_subsystems(dims, keep)?;
    let ok = offsets(dims, keep);
    let ot = offsets(dims, &traced);
    let a = m.as_matrix();
    Ok(ComplexMatrix::from_fn(ok.len(), |i, j| {
        ot.iter().map(|&t| a[(ok[i] + t, ok[j] + t)]).sum()
    }))
}

/// Reorders tensor factors: output factor `s` is input factor `perm[s]`.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix> {
    if perm.len() != dims.len() {
        return Err(Error::LengthMismatch {
            expected: dims.len(),
            found: perm.len(),
        });
    }
    partial_trace_multi(m, dims, perm)
}

/// Reduced density matrix of the pure state `|v⟩⟨v|` on the listed factors.
pub fn reduced_from_vector(
    v: &DVector<Complex64>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != v.len() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: v.len(),
        });
    }
    let traced = check_subsystems(dims, keep)?;
    let ok = offsets(dims, keep);
    let ot = offsets(dims, &traced);
    let n = ok.len();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let s: Complex64 = ot.iter().map(|&t| v[ok[i] + t] * v[ok[j] + t].conj()).sum();
            out[(i, j)] = s;
            out[(j, i)] = s.conj();
        }
    }
    Ok(ComplexMatrix(out))
}

/// Kronecker product `M ⊗ N`.
pub fn tensor_product(m: &ComplexMatrix, n: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(m.as_matrix().kronecker(n.as_matrix()))
}

/// Schatten p-norm (a quasi-norm for `0 < p < 1`); `p = ∞` gives the
/// largest singular value.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidOrder(p));
    }
    let sv = m.singular_values();
    if p.is_infinite() {
        return Ok(sv.into_iter().fold(0.0, f64::max));
    }
    Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}
