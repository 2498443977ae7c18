//! The Rényi reflected entropy family and its deflected and minimized
//! variants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{renyi_entropy_unchecked, renyi_from_spectrum, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::{self, eigh, partial_trace, psd_power, real, ComplexMatrix, Subsystem, ToleranceConfig};
use crate::optim::nelder_mead;
use crate::purification::{aa_star_marginal, rho_hat_marginal};
use crate::states::{m_power_state, BipartiteState, Pmf};

/// Eigenvalues of ρ closer than this are treated as one eigenspace when
/// parameterizing its commutant.
pub const COMMUTANT_GAP: f64 = 1e-8;

/// `S_R^{(m,n)}(A:B) = H_n(AA*)` of the canonical purification of
/// `ρ^m / tr ρ^m`.
pub fn renyi_reflected(rho: &BipartiteState, m: f64, n: RenyiOrder) -> Result<f64> {
    let state = m_power_state(rho, m)?;
    let hat = rho_hat_marginal(&state, None)?;
    renyi_entropy_unchecked(&hat, n, &ToleranceConfig::default())
}

/// `S_R^{(∞)}(A:B) = −log λ_max(ρ̂_{AA*})`.
pub fn min_reflected(rho: &BipartiteState) -> Result<f64> {
    renyi_reflected(rho, 1.0, RenyiOrder::Infinity)
}

/// `S_R(A:B)`, the von Neumann member of the family.
pub fn reflected_entropy(rho: &BipartiteState) -> Result<f64> {
    renyi_reflected(rho, 1.0, RenyiOrder::One)
}

/// Rényi `s`-deflected entropy: `H_α(AA*)` of `ρ^{1/2 + is} |Ω⟩|Ω⟩`, with
/// the power taken on the support as `λ^{1/2} e^{is log λ}`.
pub fn deflected(rho: &BipartiteState, s: f64, alpha: RenyiOrder) -> Result<f64> {
    let cfg = ToleranceConfig::default();
    let eig = eigh(rho.rho(), &cfg)?;
    let c = eig.map_on_support(|l| Complex64::from_polar(l.sqrt(), s * l.ln()));
    let hat = aa_star_marginal(&c, rho.d_a(), rho.d_b());
    renyi_entropy_unchecked(&hat, alpha, &cfg)
}

/// How the commutant of ρ is parameterized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamMode {
    /// One phase per eigenvector (nondegenerate support spectrum).
    PhasesOnEigvecs,
    /// A `g × g` unitary `exp(iH)` per eigenspace of dimension `g`.
    BlockUnitaries,
}

/// A unitary commuting with ρ, written relative to ρ's eigenbasis.
///
/// Each support eigenspace of dimension `g` carries `g²` real parameters
/// defining a Hermitian generator `H` (diagonal first, then the real and
/// imaginary parts of the upper triangle row by row); the eigenspace
/// block of the unitary is `exp(iH)`. The kernel block is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryParam {
    mode: ParamMode,
    basis: ComplexMatrix,
    groups: Vec<usize>,
    params: Vec<f64>,
}

impl UnitaryParam {
    /// Identity parameterization for the commutant of `rho`.
    pub fn for_state(rho: &BipartiteState) -> Result<Self> {
        let eig = eigh(rho.rho(), &ToleranceConfig::default())?;
        let vals = eig.support_eigenvalues();
        let mut groups = Vec::new();
        let mut start = 0;
        while start < vals.len() {
            let mut end = start + 1;
            while end < vals.len() && vals[end - 1] - vals[end] <= COMMUTANT_GAP {
                end += 1;
            }
            groups.push(end - start);
            start = end;
        }
        let mode = if groups.iter().all(|&g| g == 1) {
            ParamMode::PhasesOnEigvecs
        } else {
            ParamMode::BlockUnitaries
        };
        let len = groups.iter().map(|g| g * g).sum();
        Ok(Self {
            mode,
            basis: eig.eigenvectors().clone(),
            groups,
            params: vec![0.0; len],
        })
    }

    pub fn mode(&self) -> ParamMode {
        self.mode
    }

    /// Dimensions of the support eigenspaces, in descending eigenvalue order.
    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        if params.len() != self.params.len() {
            return Err(Error::LengthMismatch {
                expected: self.params.len(),
                found: params.len(),
            });
        }
        Ok(Self {
            params,
            ..self.clone()
        })
    }

    fn blocks(&self) -> Vec<DMatrix<Complex64>> {
        let mut out = Vec::with_capacity(self.groups.len());
        let mut offset = 0;
        for &g in &self.groups {
            out.push(block_unitary(&self.params[offset..offset + g * g], g));
            offset += g * g;
        }
        out
    }

    /// The unitary on `A ⊗ B`.
    pub fn unitary(&self) -> ComplexMatrix {
        let v = self.basis.as_matrix();
        let n = v.nrows();
        let mut block = DMatrix::<Complex64>::identity(n, n);
        let mut start = 0;
        for (g, u) in self.groups.iter().zip(self.blocks()) {
            block.view_mut((start, start), (*g, *g)).copy_from(&u);
            start += g;
        }
        ComplexMatrix::from_matrix(v * block * v.adjoint()).expect("square")
    }
}

/// `exp(iH)` for the Hermitian `H` encoded by `p` (length `g²`).
fn block_unitary(p: &[f64], g: usize) -> DMatrix<Complex64> {
    if g == 1 {
        return DMatrix::from_element(1, 1, Complex64::from_polar(1.0, p[0]));
    }
    let mut h = DMatrix::<Complex64>::zeros(g, g);
    for j in 0..g {
        h[(j, j)] = real(p[j]);
    }
    let mut k = g;
    for j in 0..g {
        for l in j + 1..g {
            let z = Complex64::new(p[k], p[k + 1]);
            h[(j, l)] = z;
            h[(l, j)] = z.conj();
            k += 2;
        }
    }
    let h = ComplexMatrix::from_matrix(h).expect("square");
    let eig = eigh(&h, &ToleranceConfig::default()).expect("small Hermitian matrix");
    let v = eig.eigenvectors().as_matrix();
    let mut scaled = v.clone();
    for (j, &l) in eig.eigenvalues().iter().enumerate() {
        let e = Complex64::from_polar(1.0, l);
        for i in 0..g {
            scaled[(i, j)] *= e;
        }
    }
    scaled * v.adjoint()
}

/// Settings for [`minimized_reflected`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Objective evaluations allowed per simplex refinement.
    pub max_evals: usize,
    /// Coordinate-descent sweeps per start.
    pub sweeps: usize,
    /// Largest support rank for which all sign patterns are tried.
    pub sign_search_max_rank: usize,
    /// Random starting points in addition to the deterministic ones.
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_evals: 3000,
            sweeps: 3,
            sign_search_max_rank: 12,
            random_starts: 2,
            seed: 0x7e57,
        }
    }
}

/// Best unitary found by [`minimized_reflected`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizedReflected {
    pub value: f64,
    /// `S_R^{(n)}`, the value at `U = 1`.
    pub unminimized: f64,
    pub argmin: UnitaryParam,
    pub evaluations: usize,
    /// False when a simplex refinement ran out of budget.
    pub converged: bool,
}

struct Objective<'a> {
    rho: &'a BipartiteState,
    /// `√λ_g V_g` and `V_g†` per support eigenspace.
    left: Vec<DMatrix<Complex64>>,
    right: Vec<DMatrix<Complex64>>,
    template: UnitaryParam,
    n: RenyiOrder,
    cfg: ToleranceConfig,
    evaluations: usize,
}

impl<'a> Objective<'a> {
    fn new(rho: &'a BipartiteState, n: RenyiOrder) -> Result<Self> {
        let cfg = ToleranceConfig::default();
        let template = UnitaryParam::for_state(rho)?;
        let eig = eigh(rho.rho(), &cfg)?;
        let v = eig.eigenvectors().as_matrix();
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut start = 0;
        for &g in &template.groups {
            let cols = v.columns(start, g).into_owned();
            let mut scaled = cols.clone();
            for j in 0..g {
                let s = real(eig.eigenvalues()[start + j].max(0.0).sqrt());
                for i in 0..cols.nrows() {
                    scaled[(i, j)] *= s;
                }
            }
            right.push(cols.adjoint());
            left.push(scaled);
            start += g;
        }
        Ok(Self {
            rho,
            left,
            right,
            template,
            n,
            cfg,
            evaluations: 0,
        })
    }

    fn coefficients(&self, params: &[f64]) -> ComplexMatrix {
        let d = self.rho.dim();
        let mut c = DMatrix::<Complex64>::zeros(d, d);
        let mut offset = 0;
        for ((l, r), &g) in self.left.iter().zip(&self.right).zip(&self.template.groups) {
            let u = block_unitary(&params[offset..offset + g * g], g);
            c += l * u * r;
            offset += g * g;
        }
        ComplexMatrix::from_matrix(c).expect("square")
    }

    fn eval(&mut self, params: &[f64]) -> f64 {
        self.evaluations += 1;
        let hat = aa_star_marginal(&self.coefficients(params), self.rho.d_a(), self.rho.d_b());
        renyi_entropy_unchecked(&hat, self.n, &self.cfg).unwrap_or(f64::INFINITY)
    }
}

fn sign_patterns(obj: &mut Objective<'_>, max_rank: usize) -> (Vec<f64>, f64) {
    let len = obj.template.params.len();
    let zero = vec![0.0; len];
    let mut best = (zero.clone(), obj.eval(&zero));
    let rank: usize = obj.template.groups.iter().sum();
    if rank > max_rank || rank < 2 {
        return best;
    }
    // Diagonal-entry offsets of each eigenvector inside the parameter vector.
    let mut slots = Vec::with_capacity(rank);
    let mut offset = 0;
    for &g in &obj.template.groups {
        for j in 0..g {
            slots.push(offset + j);
        }
        offset += g * g;
    }
    // The global sign is irrelevant, so the last eigenvector stays fixed.
    for mask in 1u64..(1u64 << (rank - 1)) {
        let mut p = zero.clone();
        for (bit, &slot) in slots.iter().enumerate().take(rank - 1) {
            if mask >> bit & 1 == 1 {
                p[slot] = std::f64::consts::PI;
            }
        }
        let v = obj.eval(&p);
        if v < best.1 {
            best = (p, v);
        }
    }
    best
}

fn coordinate_descent(obj: &mut Objective<'_>, mut x: Vec<f64>, mut fx: f64, sweeps: usize) -> (Vec<f64>, f64) {
    use std::f64::consts::PI;
    const GRID: usize = 16;
    for _ in 0..sweeps {
        let before = fx;
        for k in 0..x.len() {
            let centre = x[k];
            let mut best = (centre, fx);
            for j in 1..GRID {
                let t = centre + 2.0 * PI * j as f64 / GRID as f64;
                x[k] = t;
                let v = obj.eval(&x);
                if v < best.1 {
                    best = (t, v);
                }
            }
            // Golden-section refinement inside the neighbouring grid cells.
            let h = 2.0 * PI / GRID as f64;
            let (mut a, mut b) = (best.0 - h, best.0 + h);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..30 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                x[k] = c;
                let fc = obj.eval(&x);
                x[k] = d;
                let fd = obj.eval(&x);
                if fc < fd {
                    b = d;
                } else {
                    a = c;
                }
            }
            x[k] = 0.5 * (a + b);
            let v = obj.eval(&x);
            if v < best.1 {
                best = (x[k], v);
            }
            x[k] = best.0;
            fx = best.1;
        }
        if before - fx < 1e-13 {
            break;
        }
    }
    (x, fx)
}

/// `S_R^{↓(n)}(A:B) = inf_U H_n(AA*)` of `√ρ U |Ω⟩|Ω⟩` over unitaries `U`
/// commuting with ρ.
///
/// Multi-start search: every ±1 sign pattern on the support eigenvectors
/// (when the rank is small), coordinate descent on the generator
/// parameters, then a simplex refinement. The identity is always among
/// the candidates, so the value never exceeds `S_R^{(n)}`.
pub fn minimized_reflected(rho: &BipartiteState, n: RenyiOrder, opts: &MinimizeOptions) -> Result<MinimizedReflected> {
    let mut obj = Objective::new(rho, n)?;
    let len = obj.template.params.len();
    let zero = vec![0.0; len];
    let unminimized = obj.eval(&zero);

    let mut starts: Vec<(Vec<f64>, f64)> = vec![(zero.clone(), unminimized)];
    let signs = sign_patterns(&mut obj, opts.sign_search_max_rank);
    if signs.1 < unminimized {
        starts.push(signs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let p: Vec<f64> = (0..len)
            .map(|_| std::f64::consts::PI * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let v = obj.eval(&p);
        starts.push((p, v));
    }

    let mut best = (zero, unminimized);
    let mut converged = true;
    for (x0, f0) in starts {
        if f0 < best.1 {
            best = (x0.clone(), f0);
        }
        if len == 0 {
            continue;
        }
        let (x1, f1) = coordinate_descent(&mut obj, x0, f0, opts.sweeps);
        if f1 < best.1 {
            best = (x1.clone(), f1);
        }
        let m = nelder_mead(&mut |x| obj.eval(x), &x1, 0.2, 1e-14, opts.max_evals);
        converged &= m.converged;
        if m.value < best.1 {
            best = (m.x, m.value);
        }
    }

    Ok(MinimizedReflected {
        value: best.1,
        unminimized,
        argmin: obj.template.with_params(best.0)?,
        evaluations: obj.evaluations,
        converged,
    })
}

/// `H_n(AA*)` for an explicit commuting unitary.
pub fn twisted_reflected(rho: &BipartiteState, u: &ComplexMatrix, n: RenyiOrder) -> Result<f64> {
    let hat = rho_hat_marginal(rho, Some(u))?;
    renyi_entropy_unchecked(&hat, n, &ToleranceConfig::default())
}

/// `S_R^{(α)}` of a CC state from the singular values of `M = √P`.
pub fn cc_reflected(p: &Pmf, alpha: RenyiOrder) -> Result<f64> {
    let (rows, cols) = p.shape();
    let m = DMatrix::from_fn(rows, cols, |x, y| p.get(x, y).sqrt());
    let sq: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
    Ok(renyi_from_spectrum(&sq, alpha))
}

/// `tr[K K†]` with `K = tr_A[√ρ_AB (√σ_A U_A ⊗ 1)]`.
pub fn eval_overlap_objective(rho: &BipartiteState, sigma_a: &ComplexMatrix, u_a: &ComplexMatrix) -> Result<f64> {
    let d_a = rho.d_a();
    if sigma_a.dim() != d_a || u_a.dim() != d_a {
        return Err(Error::DimensionMismatch {
            expected: d_a,
            found: if sigma_a.dim() != d_a { sigma_a.dim() } else { u_a.dim() },
        });
    }
    let residual = (&u_a.adjoint() * u_a).max_abs_diff(&ComplexMatrix::identity(d_a));
    if residual > 1e-10 {
        return Err(Error::NotUnitary { residual });
    }
    let cfg = ToleranceConfig::default();
    let sqrt_rho = psd_power(rho.rho(), 0.5, &cfg)?;
    let sqrt_sigma = linalg::matrix_power_on_support(sigma_a, 0.5, &cfg)?;
    let x = linalg::tensor_product(&(&sqrt_sigma * u_a), &ComplexMatrix::identity(rho.d_b()));
    let k = partial_trace(&(&sqrt_rho * &x), d_a, rho.d_b(), Subsystem::B)?;
    Ok((&k * &k.adjoint()).trace().re)
}
