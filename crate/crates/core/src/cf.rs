//! The antiunitary CF map on `A ⊗ A*`: complex conjugation in the
//! computational basis composed with the swap of the two factors.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, real, ComplexMatrix, SpectralDecomposition, ToleranceConfig, ONE, ZERO};
use crate::states::PureVector;

/// Tolerance for the CF-invariance preconditions on operator inputs.
pub const INPUT_TOL: f64 = 1e-10;

/// Spectral gap below which eigenvalues are treated as one eigenspace.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Swap operator on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, |r, c| {
        let (a, b) = (r / d, r % d);
        if c == b * d + a {
            ONE
        } else {
            ZERO
        }
    })
}

fn side(n: usize) -> Result<usize> {
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || d == 0 {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: n,
        });
    }
    Ok(d)
}

/// `(F v)*` for a vector of length `d²`.
pub(crate) fn cf_vector(v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let d = side(v.len())?;
    Ok(DVector::from_fn(v.len(), |i, _| v[(i % d) * d + i / d].conj()))
}

/// Types the CF map acts on.
pub trait CfConjugate: Sized {
    fn cf_apply(&self) -> Result<Self>;
    /// Euclidean (Frobenius for operators) norm used by the invariance test.
    fn cf_norm(&self) -> f64;
    fn cf_distance(&self, other: &Self) -> f64;
}

impl CfConjugate for PureVector {
    fn cf_apply(&self) -> Result<Self> {
        let dims = self.dims();
        if dims.len() != 2 || dims[0] != dims[1] {
            return Err(Error::DimensionMismatch {
                expected: dims[0] * dims[0],
                found: self.len(),
            });
        }
        PureVector::new(cf_vector(self.amplitudes())?, dims.to_vec())
    }

    fn cf_norm(&self) -> f64 {
        self.norm()
    }

    fn cf_distance(&self, other: &Self) -> f64 {
        (self.amplitudes() - other.amplitudes()).norm()
    }
}

impl CfConjugate for ComplexMatrix {
    /// `(F X F)*`
    fn cf_apply(&self) -> Result<Self> {
        let d = side(self.dim())?;
        let f = |i: usize| (i % d) * d + i / d;
        Ok(ComplexMatrix::from_fn(self.dim(), |r, c| self[(f(r), f(c))].conj()))
    }

    fn cf_norm(&self) -> f64 {
        self.frobenius_norm()
    }

    fn cf_distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }
}

/// Outcome of an invariance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfCheck {
    pub invariant: bool,
    pub residual: f64,
}

/// `residual = ‖CF(x) − x‖`, invariant iff `residual ≤ tol (1 + ‖x‖)`.
pub fn is_cf_invariant<T: CfConjugate>(x: &T, tol: f64) -> Result<CfCheck> {
    let residual = x.cf_apply()?.cf_distance(x);
    Ok(CfCheck {
        invariant: residual <= tol * (1.0 + x.cf_norm()),
        residual,
    })
}

/// Cached swap operator for a fixed local dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CfContext {
    d: usize,
    swap: ComplexMatrix,
}

impl CfContext {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            swap: swap_operator(d),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn swap(&self) -> &ComplexMatrix {
        &self.swap
    }

    pub fn apply_vector(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        self.swap.apply(v).map(|z| z.conj())
    }

    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        (&(&self.swap * x) * &self.swap).conj()
    }
}

fn operator_cf_residual(x: &ComplexMatrix) -> Result<f64> {
    Ok(x.cf_apply()?.max_abs_diff(x))
}

/// Invariant unit vector in the image of `p`, without precondition checks.
fn invariant_in_image(p: &ComplexMatrix) -> Result<DVector<Complex64>> {
    let m = p.as_matrix();
    let best = (0..m.ncols())
        .max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm()))
        .expect("non-empty");
    let col = m.column(best).into_owned();
    let phi = &col / real(col.norm());
    let cphi = cf_vector(&phi)?;
    let psi1 = &phi + &cphi;
    let psi2 = (&phi - &cphi) * Complex64::i();
    let psi = if psi1.norm() >= psi2.norm() { psi1 } else { psi2 };
    let n = psi.norm();
    Ok(psi / real(n))
}

/// A CF-invariant unit vector in the image of a CF-invariant projector.
pub fn cf_invariant_vector_in_image(p: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<PureVector> {
    cfg.validate()?;
    let d = side(p.dim())?;
    let scale = 1.0 + p.max_abs();
    let residual = (p * p).max_abs_diff(p).max(p.hermitian_residual());
    if residual > INPUT_TOL * scale || p.trace().re < 0.5 {
        return Err(Error::NotProjector { residual });
    }
    let residual = operator_cf_residual(p)?;
    if residual > INPUT_TOL * scale {
        return Err(Error::NotCfInvariantProjector { residual });
    }
    PureVector::new(invariant_in_image(p)?, vec![d, d])
}

/// Eigendecomposition of a Hermitian CF-invariant operator whose
/// eigenvectors are all CF-invariant. Eigenspaces are resolved by grouping
/// eigenvalues closer than `DEGENERACY_GAP (1 + |λ|_max)` and peeling off
/// invariant vectors one at a time.
pub fn cf_invariant_spectral_decomposition(
    x: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<SpectralDecomposition> {
    cfg.validate()?;
    side(x.dim())?;
    let scale = 1.0 + x.max_abs();
    let residual = x.hermitian_residual();
    if residual > INPUT_TOL * scale {
        return Err(Error::NonHermitian { residual });
    }
    let residual = operator_cf_residual(x)?;
    if residual > INPUT_TOL * scale {
        return Err(Error::NotCfInvariant { residual });
    }

    let plain = eigh(x, cfg)?;
    let vals = plain.eigenvalues();
    let n = vals.len();
    let lmax_abs = vals.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let gap = DEGENERACY_GAP * (1.0 + lmax_abs);

    let mut pairs: Vec<(f64, DVector<Complex64>)> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end - 1] - vals[end] <= gap {
            end += 1;
        }
        let mut found: Vec<DVector<Complex64>> = Vec::new();
        let mut proj = ComplexMatrix::zeros(n);
        for j in start..end {
            proj = &proj + &ComplexMatrix::outer(&plain.eigenvector(j));
        }
        for _ in start..end {
            let mut v = invariant_in_image(&proj)?;
            // Overlaps between invariant vectors are real, so this keeps v invariant.
            for f in &found {
                let c = f.dotc(&v).re;
                v -= f * real(c);
            }
            let nv = v.norm();
            v /= real(nv);
            proj = &proj - &ComplexMatrix::outer(&v);
            found.push(v);
        }
        for v in found {
            let q = x.expectation(&v).re;
            pairs.push((q, v));
        }
        start = end;
    }

    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vecs = ComplexMatrix::from_fn(n, |i, j| pairs[j].1[i]);
    let decomposition = SpectralDecomposition::from_parts(eigenvalues, vecs, cfg);
    let residual = decomposition.reconstruct().max_abs_diff(x);
    if residual > 1e-9 * scale {
        return Err(Error::NoConvergence { residual });
    }
    Ok(decomposition)
}

/// Turns a maximizer `φ` of `⟨·|X|·⟩` into a CF-invariant maximizer.
///
/// With `S = ½(|φ⟩⟨φ| + CF(|φ⟩⟨φ|))`, a nondegenerate top eigenvector of `S`
/// is rephased to invariance; otherwise `φ + CF(φ)` is used.
pub fn cf_symmetrize_optimizer(
    phi: &PureVector,
    x: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<PureVector> {
    let residual = operator_cf_residual(x)?;
    if residual > INPUT_TOL * (1.0 + x.max_abs()) {
        return Err(Error::NotCfInvariant { residual });
    }
    if x.dim() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: phi.len(),
        });
    }
    let d = side(phi.len())?;
    let v = phi.amplitudes();
    let cv = cf_vector(v)?;
    let s = (&ComplexMatrix::outer(v) + &ComplexMatrix::outer(&cv)).scale(0.5);
    let eig = eigh(&s, cfg)?;
    let vals = eig.eigenvalues();
    let gap = if vals.len() > 1 { vals[0] - vals[1] } else { f64::INFINITY };

    let out = if gap > DEGENERACY_GAP {
        let e = eig.eigenvector(0);
        let overlap = e.dotc(&cf_vector(&e)?);
        let phase = if overlap.norm() > 0.0 {
            (Complex64::i() * (overlap.arg() / 2.0)).exp()
        } else {
            ONE
        };
        e * phase
    } else {
        let w = v + &cv;
        let n = w.norm();
        w / real(n)
    };
    PureVector::new(out, vec![d, d])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_unit_vector;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn omega(d: usize) -> PureVector {
        let v = DVector::from_fn(d * d, |i, _| if i / d == i % d { ONE } else { ZERO });
        PureVector::new(v, vec![d, d]).unwrap()
    }

    fn basis(d: usize, i: usize) -> PureVector {
        PureVector::new(DVector::from_fn(d * d, |k, _| if k == i { ONE } else { ZERO }), vec![d, d]).unwrap()
    }

    /// Random Hermitian CF-invariant operator: `H + CF(H)`.
    fn random_invariant_hermitian(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
        let v = random_unit_vector(rng, d * d * d * d);
        let m = ComplexMatrix::from_fn(d * d, |i, j| v[i * d * d + j]).hermitian_part();
        &m + &m.cf_apply().unwrap()
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_operator(1), ComplexMatrix::identity(1));
        let f = swap_operator(2);
        let e01 = basis(2, 1);
        assert_eq!(f.apply(e01.amplitudes()), *basis(2, 2).amplitudes());
        let f3 = swap_operator(3);
        assert_eq!(&f3 * &f3, ComplexMatrix::identity(9));
        assert_eq!(f3.adjoint(), f3);
        assert_eq!(f3.conj(), f3);
    }

    #[test]
    fn cf_apply_examples() {
        let w = omega(3);
        assert_eq!(w.cf_apply().unwrap(), w);
        assert_eq!(basis(2, 1).cf_apply().unwrap(), basis(2, 2));
    }

    #[test]
    fn cf_apply_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..5 {
            let v = PureVector::new(random_unit_vector(&mut rng, d * d), vec![d, d]).unwrap();
            let back = v.cf_apply().unwrap().cf_apply().unwrap();
            assert!(back.cf_distance(&v) <= 1e-14);
            let m = ComplexMatrix::from_fn(d * d, |i, j| Complex64::new(i as f64 - 0.3, j as f64 * 0.7));
            let back = m.cf_apply().unwrap().cf_apply().unwrap();
            assert!(back.max_abs_diff(&m) <= 1e-14);
        }
    }

    #[test]
    fn context_matches_index_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ctx = CfContext::new(3);
        let v = random_unit_vector(&mut rng, 9);
        assert!((ctx.apply_vector(&v) - cf_vector(&v).unwrap()).norm() < 1e-15);
        let x = random_invariant_hermitian(&mut rng, 3);
        let y = ComplexMatrix::from_fn(9, |i, j| x[(i, j)] * Complex64::new(1.0, (i * j) as f64));
        assert!(ctx.apply_operator(&y).max_abs_diff(&y.cf_apply().unwrap()) < 1e-14);
    }

    #[test]
    fn antilinearity_breaks_invariance_of_i_omega() {
        let w = omega(2);
        let iw = w.scale(Complex64::i());
        let check = is_cf_invariant(&iw, 1e-10).unwrap();
        assert!(!check.invariant);
        assert_abs_diff_eq!(check.residual, 2.0 * w.norm(), epsilon = 1e-14);
        assert!(is_cf_invariant(&w, 1e-14).unwrap().invariant);
    }

    #[test]
    fn cf_apply_rejects_non_square_layout() {
        let v = PureVector::new(DVector::from_element(6, ONE), vec![2, 3]).unwrap();
        assert!(v.cf_apply().is_err());
        assert!(ComplexMatrix::identity(5).cf_apply().is_err());
    }

    #[test]
    fn vector_in_image_of_omega_projector() {
        let cfg = ToleranceConfig::default();
        let w = omega(3);
        let p = w.projector().scale(1.0 / 3.0);
        let v = cf_invariant_vector_in_image(&p, &cfg).unwrap();
        let expected = w.normalized();
        let overlap = v.inner(&expected).norm();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
        assert!(is_cf_invariant(&v, 1e-10).unwrap().invariant);
    }

    #[test]
    fn vector_in_image_of_identity() {
        let cfg = ToleranceConfig::default();
        let p = ComplexMatrix::identity(4);
        let v = cf_invariant_vector_in_image(&p, &cfg).unwrap();
        assert!(is_cf_invariant(&v, 1e-10).unwrap().residual <= 1e-10);
        assert!((p.apply(v.amplitudes()) - v.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn vector_in_image_of_rotated_rank_two() {
        let cfg = ToleranceConfig::default();
        // Two invariant basis vectors mixed by a complex unitary.
        let s = 0.5f64.sqrt();
        let e1 = (basis(2, 1).amplitudes() + basis(2, 2).amplitudes()) * real(s);
        let e2 = (basis(2, 1).amplitudes() - basis(2, 2).amplitudes()) * Complex64::new(0.0, s);
        let (c, t) = (0.6, Complex64::new(0.0, 0.8));
        let u1 = &e1 * real(c) + &e2 * t;
        let u2 = &e1 * (-t.conj()) + &e2 * real(c);
        let p = &ComplexMatrix::outer(&u1) + &ComplexMatrix::outer(&u2);
        let v = cf_invariant_vector_in_image(&p, &cfg).unwrap();
        assert!((p.apply(v.amplitudes()) - v.amplitudes()).norm() <= 1e-10);
        assert!(is_cf_invariant(&v, 1e-10).unwrap().residual <= 1e-10);
    }

    #[test]
    fn vector_in_image_preconditions() {
        let cfg = ToleranceConfig::default();
        let not_proj = ComplexMatrix::identity(4).scale(0.5);
        assert!(matches!(cf_invariant_vector_in_image(&not_proj, &cfg), Err(Error::NotProjector { .. })));
        // |01⟩⟨01| is a projector but CF maps it to |10⟩⟨10|.
        let p = basis(2, 1).projector();
        assert!(matches!(
            cf_invariant_vector_in_image(&p, &cfg),
            Err(Error::NotCfInvariantProjector { .. })
        ));
    }

    #[test]
    fn spectral_decomposition_of_swap() {
        let cfg = ToleranceConfig::default();
        let f = swap_operator(2);
        let d = cf_invariant_spectral_decomposition(&f, &cfg).unwrap();
        let expected = [1.0, 1.0, 1.0, -1.0];
        for (l, e) in d.eigenvalues().iter().zip(expected) {
            assert_abs_diff_eq!(*l, e, epsilon = 1e-12);
        }
        for j in 0..4 {
            let v = PureVector::new(d.eigenvector(j), vec![2, 2]).unwrap();
            assert!(is_cf_invariant(&v, 1e-8).unwrap().invariant);
        }
        assert!(d.reconstruct().max_abs_diff(&f) < 1e-9);
    }

    #[test]
    fn spectral_decomposition_of_identity() {
        let cfg = ToleranceConfig::default();
        let id = ComplexMatrix::identity(9);
        let d = cf_invariant_spectral_decomposition(&id, &cfg).unwrap();
        assert!(d.reconstruct().max_abs_diff(&id) < 1e-12);
        let v = d.eigenvectors();
        assert!((&v.adjoint() * v).max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn spectral_decomposition_rejects_bad_input() {
        let cfg = ToleranceConfig::default();
        let p = basis(2, 1).projector();
        assert!(matches!(cf_invariant_spectral_decomposition(&p, &cfg), Err(Error::NotCfInvariant { .. })));
        let m = ComplexMatrix::from_fn(4, |i, j| real((i * 4 + j) as f64));
        assert!(matches!(cf_invariant_spectral_decomposition(&m, &cfg), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn spectral_decomposition_random_invariant() {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..4 {
            let x = random_invariant_hermitian(&mut rng, d);
            let dec = cf_invariant_spectral_decomposition(&x, &cfg).unwrap();
            assert!(dec.reconstruct().max_abs_diff(&x) <= 1e-9);
            for j in 0..d * d {
                let v = PureVector::new(dec.eigenvector(j), vec![d, d]).unwrap();
                assert!(is_cf_invariant(&v, 1e-8).unwrap().invariant);
            }
        }
    }

    #[test]
    fn symmetrize_keeps_invariant_input() {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_invariant_hermitian(&mut rng, 2);
        let dec = cf_invariant_spectral_decomposition(&x, &cfg).unwrap();
        let phi = PureVector::new(dec.eigenvector(0), vec![2, 2]).unwrap();
        let psi = cf_symmetrize_optimizer(&phi, &x, &cfg).unwrap();
        assert_abs_diff_eq!(phi.inner(&psi).norm(), 1.0, epsilon = 1e-10);
        assert!(phi.inner(&psi).im.abs() < 1e-10);

        // Phase-stripping: e^{iπ/3} times an invariant top eigenvector.
        let rotated = phi.scale(Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3));
        let psi = cf_symmetrize_optimizer(&rotated, &x, &cfg).unwrap();
        assert!(is_cf_invariant(&psi, 1e-10).unwrap().invariant);
        let q0 = x.expectation(phi.amplitudes()).re;
        let q1 = x.expectation(psi.amplitudes()).re;
        assert_abs_diff_eq!(q0, q1, epsilon = 1e-10);
    }

    #[test]
    fn symmetrize_degenerate_branch() {
        let cfg = ToleranceConfig::default();
        // X = identity: every unit vector is optimal. φ = |01⟩ has CF(φ) = |10⟩
        // orthogonal to it, so S is degenerate.
        let x = ComplexMatrix::identity(4);
        let phi = basis(2, 1);
        let psi = cf_symmetrize_optimizer(&phi, &x, &cfg).unwrap();
        assert!(is_cf_invariant(&psi, 1e-12).unwrap().invariant);
        let expected = (basis(2, 1).amplitudes() + basis(2, 2).amplitudes()) * real(0.5f64.sqrt());
        assert!((psi.amplitudes() - expected).norm() < 1e-12);
        assert_abs_diff_eq!(x.expectation(psi.amplitudes()).re, 1.0, epsilon = 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn cf_preserves_rank_and_positivity(seed in 0u64..500, d in 1usize..4, rank in 1usize..4) {
            let cfg = ToleranceConfig::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = d * d;
            let r = rank.min(n);
            let mut m = ComplexMatrix::zeros(n);
            for _ in 0..r {
                m = &m + &ComplexMatrix::outer(&random_unit_vector(&mut rng, n));
            }
            let c = m.cf_apply().unwrap();
            let a = eigh(&m, &cfg).unwrap();
            let b = eigh(&c, &cfg).unwrap();
            proptest::prop_assert_eq!(a.support_rank(), b.support_rank());
            proptest::prop_assert!(b.min_eigenvalue() >= -1e-10);
        }

        #[test]
        fn cf_keeps_image_of_invariant_projector(seed in 0u64..500, d in 2usize..4) {
            let cfg = ToleranceConfig::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_invariant_hermitian(&mut rng, d);
            let dec = cf_invariant_spectral_decomposition(&x, &cfg).unwrap();
            let mut p = ComplexMatrix::zeros(d * d);
            for j in 0..2 {
                p = &p + &ComplexMatrix::outer(&dec.eigenvector(j));
            }
            let w = random_unit_vector(&mut rng, d * d);
            let v = p.apply(&w);
            let cv = cf_vector(&v).unwrap();
            proptest::prop_assert!((p.apply(&cv) - &cv).norm() <= 1e-10);
            proptest::prop_assert!((cv.norm() - v.norm()).abs() <= 1e-10);
        }
    }
}
