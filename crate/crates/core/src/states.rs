//! Density matrices on `A ⊗ B`: validation, random generation and the
//! standard constructors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_psd, eigh, partial_trace, permute_subsystems, real, ComplexMatrix, Subsystem,
    ToleranceConfig, ZERO,
};

/// Traces within this distance of one are left untouched so that
/// validating an already normalized state is bitwise idempotent.
const RENORMALIZE_EPS: f64 = 1e-13;

/// Maximum deviation of the input trace from one before it is rejected.
pub const TRACE_TOL: f64 = 1e-6;

/// Validated density matrix on `A ⊗ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    rho: ComplexMatrix,
    d_a: usize,
    d_b: usize,
    clip: f64,
}

impl BipartiteState {
    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    /// Magnitude of the most negative eigenvalue removed during validation.
    pub fn clip_magnitude(&self) -> f64 {
        self.clip
    }

    pub fn marginal(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.rho, self.d_a, self.d_b, keep).expect("dimensions checked at construction")
    }

    pub fn rho_a(&self) -> ComplexMatrix {
        self.marginal(Subsystem::A)
    }

    pub fn rho_b(&self) -> ComplexMatrix {
        self.marginal(Subsystem::B)
    }

    /// The same state read as a state on `B ⊗ A`.
    pub fn swapped(&self) -> Self {
        let rho = permute_subsystems(&self.rho, &[self.d_a, self.d_b], &[1, 0]).expect("valid dims");
        Self {
            rho,
            d_a: self.d_b,
            d_b: self.d_a,
            clip: self.clip,
        }
    }

    /// `ρ ⊗ σ` regrouped as a state on `(A₁A₂) ⊗ (B₁B₂)`.
    pub fn tensor(&self, other: &Self) -> Self {
        let big = linalg::tensor_product(&self.rho, &other.rho);
        let dims = [self.d_a, self.d_b, other.d_a, other.d_b];
        let rho = permute_subsystems(&big, &dims, &[0, 2, 1, 3]).expect("valid dims");
        Self {
            rho,
            d_a: self.d_a * other.d_a,
            d_b: self.d_b * other.d_b,
            clip: self.clip.max(other.clip),
        }
    }

    /// Isometric embedding into `C^{d_a'} ⊗ C^{d_b'}` by zero padding.
    pub fn embed(&self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a < self.d_a || d_b < self.d_b {
            return Err(Error::InvalidParameter(format!(
                "cannot embed ({}, {}) into ({d_a}, {d_b})",
                self.d_a, self.d_b
            )));
        }
        let map = |i: usize| (i / self.d_b) * d_b + i % self.d_b;
        let n = self.dim();
        let mut m = DMatrix::zeros(d_a * d_b, d_a * d_b);
        for i in 0..n {
            for j in 0..n {
                m[(map(i), map(j))] = self.rho[(i, j)];
            }
        }
        Ok(Self {
            rho: ComplexMatrix::from_matrix(m)?,
            d_a,
            d_b,
            clip: self.clip,
        })
    }

    /// Eigenvalues of ρ, descending.
    pub fn spectrum(&self, cfg: &ToleranceConfig) -> Result<Vec<f64>> {
        Ok(eigh(&self.rho, cfg)?.eigenvalues().to_vec())
    }
}

/// Checks that `m` is a density matrix on `C^{d_a} ⊗ C^{d_b}`, clips
/// round-off negative eigenvalues and fixes the trace to one.
pub fn validate_density(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    cfg: &ToleranceConfig,
) -> Result<BipartiteState> {
    cfg.validate()?;
    if d_a == 0 || d_b == 0 || m.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch {
            expected: d_a * d_b,
            found: m.dim(),
        });
    }
    let residual = m.hermitian_residual();
    if residual > cfg.hermit_tol * (1.0 + m.max_abs()) {
        return Err(Error::NonHermitian { residual });
    }
    let h = m.hermitian_part();
    let decomposition = eigh(&h, cfg)?;
    check_psd(&decomposition, cfg)?;

    let lmin = decomposition.min_eigenvalue();
    let (mut rho, clip) = if lmin < 0.0 {
        let clipped = decomposition.map_on_support(real);
        (clipped, -lmin)
    } else {
        (h, 0.0)
    };

    let tr = rho.trace().re;
    if !((tr - 1.0).abs() <= TRACE_TOL) {
        return Err(Error::TraceNotOne(tr));
    }
    if (tr - 1.0).abs() > RENORMALIZE_EPS {
        rho = rho.scale(1.0 / tr);
    }
    Ok(BipartiteState { rho, d_a, d_b, clip })
}

/// Mixes a master seed with a trial index (SplitMix64 finalizer) so trial
/// `k` can be generated independently of the others.
pub fn derive_seed(master: u64, k: u64) -> u64 {
    let mut z = master ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre density matrix `G G† / tr(G G†)` on `C^d`, with `G` a `d × rank`
/// matrix of standard complex Gaussians drawn from ChaCha8 seeded by `seed`.
pub fn random_density(seed: u64, d: usize, rank: usize) -> Result<ComplexMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, max: d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(d, rank, |_, _| complex_gaussian(&mut rng));
    let m = ComplexMatrix::from_matrix(&g * g.adjoint())?;
    let tr = m.trace().re;
    Ok(m.scale(1.0 / tr).hermitian_part())
}

/// Random bipartite state from the Ginibre ensemble of the given rank.
pub fn random_bipartite(seed: u64, d_a: usize, d_b: usize, rank: usize) -> Result<BipartiteState> {
    let rho = random_density(seed, d_a * d_b, rank)?;
    validate_density(&rho, d_a, d_b, &ToleranceConfig::default())
}

/// Random state vector on `C^d`, unit norm.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v / real(n)
}

/// `ρ_A ⊗ ρ_B`.
pub fn product_state(rho_a: &ComplexMatrix, rho_b: &ComplexMatrix) -> Result<BipartiteState> {
    let rho = linalg::tensor_product(rho_a, rho_b);
    validate_density(&rho, rho_a.dim(), rho_b.dim(), &ToleranceConfig::default())
}

/// `|v⟩⟨v|` for a unit vector on `A ⊗ B`.
pub fn pure_state(v: &PureVector) -> Result<BipartiteState> {
    if v.dims.len() != 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            found: v.dims.len(),
        });
    }
    let rho = ComplexMatrix::outer(&v.amplitudes);
    validate_density(&rho, v.dims[0], v.dims[1], &ToleranceConfig::default())
}

/// Joint probability mass function on `X × Y`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Pmf {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidPmf(format!("entry {v} is not a probability")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}")));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidPmf("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Uniformly random point of the simplex (normalized exponentials).
    pub fn random(seed: u64, rows: usize, cols: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<f64> = (0..rows * cols)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let total: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v /= total);
        Self::new(rows, cols, values)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.cols + y]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.rows).map(|x| (0..self.cols).map(|y| self.get(x, y)).sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.cols).map(|y| (0..self.rows).map(|x| self.get(x, y)).sum()).collect()
    }
}

/// State vector on a tensor product of factors with the given dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureVector {
    amplitudes: DVector<Complex64>,
    dims: Vec<usize>,
}

impl PureVector {
    pub fn new(amplitudes: DVector<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, dims })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.amplitudes.norm_squared() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            amplitudes: &self.amplitudes / real(n),
            dims: self.dims.clone(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            amplitudes: &self.amplitudes * c,
            dims: self.dims.clone(),
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Reduced state on the listed factors, in the order given.
    pub fn reduced(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        linalg::reduced_from_vector(&self.amplitudes, &self.dims, keep)
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }
}

/// `Σ_{x,y} P(x,y) |x⟩⟨x| ⊗ |y⟩⟨y|` in the computational basis.
pub fn cc_state(p: &Pmf, d_a: usize, d_b: usize) -> Result<BipartiteState> {
    if p.shape() != (d_a, d_b) {
        return Err(Error::ShapeMismatch {
            expected: (d_a, d_b),
            found: p.shape(),
        });
    }
    validate_density(&ComplexMatrix::from_real_diagonal(p.values()), d_a, d_b, &ToleranceConfig::default())
}

/// `Σ_x p_x |x⟩⟨x| ⊗ |x⟩⟨x|` with `B` at least as large as `A`.
pub fn copy_cc_state(p: &[f64], d_b: usize) -> Result<BipartiteState> {
    let d_a = p.len();
    if d_b < d_a {
        return Err(Error::DimensionMismatch {
            expected: d_a,
            found: d_b,
        });
    }
    let mut values = vec![0.0; d_a * d_b];
    for (x, &px) in p.iter().enumerate() {
        values[x * d_b + x] = px;
    }
    cc_state(&Pmf::new(d_a, d_b, values)?, d_a, d_b)
}

/// `ρ^m / tr ρ^m` with the power taken on the support; `m = 0` gives the
/// normalized support projector.
pub fn m_power_state(rho: &BipartiteState, m: f64) -> Result<BipartiteState> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("power m = {m} must be finite and nonnegative")));
    }
    if m == 1.0 {
        return Ok(rho.clone());
    }
    let cfg = ToleranceConfig::default();
    let powered = linalg::psd_power(&rho.rho, m, &cfg)?;
    let tr = powered.trace().re;
    validate_density(&powered.scale(1.0 / tr).hermitian_part(), rho.d_a, rho.d_b, &cfg)
}

/// `Σ_j |j⟩ ⊗ |j⟩ / √d`.
pub fn maximally_entangled(d: usize) -> PureVector {
    let amp = real(1.0 / (d as f64).sqrt());
    let v = DVector::from_fn(d * d, |i, _| if i / d == i % d { amp } else { ZERO });
    PureVector { amplitudes: v, dims: vec![d, d] }
}

/// The state `(1/d²)[|0⟩⟨0| ⊗ (1+F)/2 + |1⟩⟨1| ⊗ (1−F)/2]` on `A' ⊗ A ⊗ B`
/// with `F` the swap of `A` and `B`. Returned as a bipartite state with
/// `A'A` as the first factor (`d_a = 2d`, `A'` most significant) and `B`
/// as the second.
pub fn omega_symmetric_state(d: usize) -> Result<BipartiteState> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("omega state needs d >= 2, got {d}")));
    }
    let n = d * d;
    let f = crate::cf::swap_operator(d);
    let id = ComplexMatrix::identity(n);
    let sym = (&id + &f).scale(0.5);
    let anti = (&id - &f).scale(0.5);
    let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
    let omega = &linalg::tensor_product(&p0, &sym) + &linalg::tensor_product(&p1, &anti);
    validate_density(&omega.scale(1.0 / n as f64), 2 * d, d, &ToleranceConfig::default())
}
