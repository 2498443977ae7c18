//! Minimized Petz Rényi mutual informations and the maximized Petz
//! conditional entropy.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cf::cf_symmetrize_optimizer;
use crate::entropy::{conditional_entropy, mutual_information, ExtendedReal, DOMINATION_TOL, OVERLAP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    self, check_psd, eigh, partial_trace, psd_power, real, ComplexMatrix, SpectralDecomposition, Subsystem,
    ToleranceConfig, ONE,
};
use crate::purification::{from_coefficients, rho_hat_marginal};
use crate::states::{derive_seed, random_density, BipartiteState, PureVector};

/// Settings for the alternating minimization over `(σ_A, τ_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltMinOptions {
    pub objective_tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub restart_seed: u64,
}

impl Default for AltMinOptions {
    fn default() -> Self {
        Self {
            objective_tol: 1e-12,
            max_iters: 10_000,
            restarts: 8,
            restart_seed: 0x5eed,
        }
    }
}

impl AltMinOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.objective_tol > 0.0) {
            return Err(Error::InvalidTolerance {
                name: "objective_tol",
                value: self.objective_tol,
            });
        }
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::InvalidParameter("max_iters and restarts must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of the doubly minimized PRMI search.
#[derive(Debug, Clone, PartialEq)]
pub struct PrmiResult {
    pub value: ExtendedReal,
    pub sigma_opt: ComplexMatrix,
    pub tau_opt: ComplexMatrix,
    /// Iterations used by the winning restart.
    pub iterations: usize,
    pub converged: bool,
    pub best_restart: usize,
    /// Objective after each full iteration, one list per restart.
    pub traces: Vec<Vec<f64>>,
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) || alpha == 1.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    Ok(())
}

fn projector(d: &SpectralDecomposition) -> ComplexMatrix {
    d.map_on_support(|_| ONE)
}

/// Whether the finite branch applies: supports not orthogonal for
/// `α < 1`, `ρ_A ≪ σ_A` for `α > 1`.
fn finite_branch(rho_a: &ComplexMatrix, sigma: &SpectralDecomposition, alpha: f64, cfg: &ToleranceConfig) -> Result<bool> {
    let pi_s = projector(sigma);
    if alpha < 1.0 {
        let pi_r = projector(&eigh(rho_a, cfg)?);
        Ok((&pi_r * &pi_s).trace().re > OVERLAP_TOL)
    } else {
        let comp = &ComplexMatrix::identity(pi_s.dim()) - &pi_s;
        let leak = &(&comp * rho_a) * &comp;
        Ok(linalg::schatten_norm(&leak, f64::INFINITY)? <= DOMINATION_TOL)
    }
}

/// `X ⊗ 1` or `1 ⊗ X` on `A ⊗ B`.
fn lift(x: &ComplexMatrix, d_a: usize, d_b: usize, on: Subsystem) -> ComplexMatrix {
    match on {
        Subsystem::A => linalg::tensor_product(x, &ComplexMatrix::identity(d_b)),
        Subsystem::B => linalg::tensor_product(&ComplexMatrix::identity(d_a), x),
    }
}

/// `tr_{other}[(S ⊗ 1) ρ^α (S ⊗ 1)]` with `S = σ^{(1−α)/2}` placed on `on`;
/// the partial trace keeps the complementary factor.
fn q_matrix(rho_alpha: &ComplexMatrix, s_half: &ComplexMatrix, d_a: usize, d_b: usize, on: Subsystem) -> ComplexMatrix {
    let l = lift(s_half, d_a, d_b, on);
    let sandwiched = &(&l * rho_alpha) * &l;
    let keep = match on {
        Subsystem::A => Subsystem::B,
        Subsystem::B => Subsystem::A,
    };
    partial_trace(&sandwiched, d_a, d_b, keep)
        .expect("dims match")
        .hermitian_part()
}

struct Prepared {
    d_a: usize,
    d_b: usize,
    alpha: f64,
    rho_alpha: ComplexMatrix,
    cfg: ToleranceConfig,
}

impl Prepared {
    fn new(rho: &BipartiteState, alpha: f64) -> Result<Self> {
        let cfg = ToleranceConfig::default();
        let rho_alpha = psd_power(rho.rho(), alpha, &cfg)?;
        Ok(Self {
            d_a: rho.d_a(),
            d_b: rho.d_b(),
            alpha,
            rho_alpha,
            cfg,
        })
    }

    /// Unnormalized optimizer `Q^{1/α}` of the factor opposite to `on`.
    fn best_response(&self, fixed: &ComplexMatrix, on: Subsystem) -> Result<ComplexMatrix> {
        let s_half = psd_power(fixed, (1.0 - self.alpha) / 2.0, &self.cfg)?;
        let q = q_matrix(&self.rho_alpha, &s_half, self.d_a, self.d_b, on);
        psd_power(&q, 1.0 / self.alpha, &self.cfg)
    }

    /// `D_α(ρ ‖ σ ⊗ τ)`, or `+∞` when the trace term vanishes.
    fn objective(&self, sigma: &ComplexMatrix, tau: &ComplexMatrix) -> Result<f64> {
        let s = psd_power(sigma, 1.0 - self.alpha, &self.cfg)?;
        let t = psd_power(tau, 1.0 - self.alpha, &self.cfg)?;
        let q = (&self.rho_alpha * &linalg::tensor_product(&s, &t)).trace().re;
        if !(q > 0.0) {
            return Ok(f64::INFINITY);
        }
        Ok(q.ln() / (self.alpha - 1.0))
    }
}

fn normalized(m: ComplexMatrix) -> Option<ComplexMatrix> {
    let tr = m.trace().re;
    (tr > 0.0).then(|| m.scale(1.0 / tr))
}

/// `I_α^↓(ρ_AB‖σ_A) = min_τ D_α(ρ_AB ‖ σ_A ⊗ τ_B)` via its closed form
/// `α/(α−1) log tr[(tr_A[ρ^α σ^{1−α}])^{1/α}]`.
pub fn minimized_generalized_prmi(rho: &BipartiteState, sigma_a: &ComplexMatrix, alpha: f64) -> Result<ExtendedReal> {
    check_order(alpha)?;
    if sigma_a.dim() != rho.d_a() {
        return Err(Error::DimensionMismatch {
            expected: rho.d_a(),
            found: sigma_a.dim(),
        });
    }
    let cfg = ToleranceConfig::default();
    let ds = eigh(sigma_a, &cfg)?;
    check_psd(&ds, &cfg)?;
    if !finite_branch(&rho.rho_a(), &ds, alpha, &cfg)? {
        return Ok(ExtendedReal::PosInfinity);
    }
    let p = Prepared::new(rho, alpha)?;
    let tau = p.best_response(sigma_a, Subsystem::A)?;
    let tr = tau.trace().re;
    if !(tr > 0.0) {
        return Ok(ExtendedReal::PosInfinity);
    }
    Ok(ExtendedReal::Finite(alpha / (alpha - 1.0) * tr.ln()))
}

/// The unique minimizer `τ_B ∝ (tr_A[ρ^α σ^{1−α}])^{1/α}`.
pub fn optimal_tau(rho: &BipartiteState, sigma_a: &ComplexMatrix, alpha: f64) -> Result<ComplexMatrix> {
    check_order(alpha)?;
    let cfg = ToleranceConfig::default();
    let ds = eigh(sigma_a, &cfg)?;
    check_psd(&ds, &cfg)?;
    if !finite_branch(&rho.rho_a(), &ds, alpha, &cfg)? {
        return Err(Error::FiniteBranchViolated);
    }
    let p = Prepared::new(rho, alpha)?;
    normalized(p.best_response(sigma_a, Subsystem::A)?).ok_or(Error::FiniteBranchViolated)
}

/// `I_α^{↑↓}(A:B) = I_α^↓(ρ_AB ‖ ρ_A)`; `α = 1` gives the mutual information.
pub fn singly_minimized_prmi(rho: &BipartiteState, alpha: f64) -> Result<ExtendedReal> {
    if alpha == 1.0 {
        return Ok(ExtendedReal::Finite(mutual_information(rho)?));
    }
    minimized_generalized_prmi(rho, &rho.rho_a(), alpha)
}

struct Run {
    value: f64,
    sigma: ComplexMatrix,
    tau: ComplexMatrix,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

fn alternate(p: &Prepared, sigma0: ComplexMatrix, opts: &AltMinOptions) -> Result<Run> {
    let mut sigma = sigma0;
    let mut tau = match normalized(p.best_response(&sigma, Subsystem::A)?) {
        Some(t) => t,
        None => {
            return Ok(Run {
                value: f64::INFINITY,
                tau: ComplexMatrix::identity(p.d_b).scale(1.0 / p.d_b as f64),
                sigma,
                iterations: 0,
                converged: false,
                trace: vec![],
            })
        }
    };
    let mut value = p.objective(&sigma, &tau)?;
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let Some(next_sigma) = normalized(p.best_response(&tau, Subsystem::B)?) else {
            break;
        };
        let Some(next_tau) = normalized(p.best_response(&next_sigma, Subsystem::A)?) else {
            break;
        };
        let next = p.objective(&next_sigma, &next_tau)?;
        if next <= value {
            trace.push(next);
            sigma = next_sigma;
            tau = next_tau;
            let decrease = value - next;
            value = next;
            if decrease < opts.objective_tol {
                converged = true;
                break;
            }
        } else {
            // An increase can only come from round-off at the fixed point.
            converged = next - value <= 1e-12 * (1.0 + value.abs());
            break;
        }
    }
    Ok(Run {
        value,
        sigma,
        tau,
        iterations,
        converged,
        trace,
    })
}

/// `I_α^{↓↓}(A:B) = min_{σ_A, τ_B} D_α(ρ_AB ‖ σ_A ⊗ τ_B)` by alternating
/// exact minimization over the two marginals.
///
/// Restart 0 starts from `σ = ρ_A`, the others from random full-rank
/// states. The result is the best objective found, so it is always an
/// upper bound on the infimum; convexity of the joint problem is not
/// assumed.
pub fn doubly_minimized_prmi(rho: &BipartiteState, alpha: f64, opts: &AltMinOptions) -> Result<PrmiResult> {
    check_order(alpha)?;
    opts.validate()?;
    let p = Prepared::new(rho, alpha)?;
    let mut runs = Vec::with_capacity(opts.restarts);
    for r in 0..opts.restarts {
        let sigma0 = if r == 0 {
            rho.rho_a()
        } else {
            random_density(derive_seed(opts.restart_seed, r as u64), rho.d_a(), rho.d_a())?
        };
        runs.push(alternate(&p, sigma0, opts)?);
    }
    let best = (0..runs.len())
        .min_by(|&a, &b| runs[a].value.total_cmp(&runs[b].value).then(a.cmp(&b)))
        .expect("at least one restart");
    let traces = runs.iter().map(|r| r.trace.clone()).collect();
    let win = runs.swap_remove(best);
    let value = if win.value.is_finite() {
        ExtendedReal::Finite(win.value)
    } else {
        ExtendedReal::PosInfinity
    };
    Ok(PrmiResult {
        value,
        sigma_opt: win.sigma,
        tau_opt: win.tau,
        iterations: win.iterations,
        converged: win.converged,
        best_restart: best,
        traces,
    })
}

/// `I_{1/2}^↓(ρ_AB‖σ_A) = −log ⟨Ω| √σ ρ̂_{AA*} √σ |Ω⟩`.
pub fn prmi_half_via_purification(rho: &BipartiteState, sigma_a: &ComplexMatrix) -> Result<ExtendedReal> {
    let cfg = ToleranceConfig::default();
    if sigma_a.dim() != rho.d_a() {
        return Err(Error::DimensionMismatch {
            expected: rho.d_a(),
            found: sigma_a.dim(),
        });
    }
    let ds = eigh(sigma_a, &cfg)?;
    check_psd(&ds, &cfg)?;
    if !finite_branch(&rho.rho_a(), &ds, 0.5, &cfg)? {
        return Ok(ExtendedReal::PosInfinity);
    }
    let hat = rho_hat_marginal(rho, None)?;
    let chi = from_coefficients(&ds.map_on_support(|l| real(l.sqrt())), vec![rho.d_a()])?;
    let overlap = hat.expectation(chi.amplitudes()).re;
    if !(overlap > 0.0) {
        return Ok(ExtendedReal::PosInfinity);
    }
    Ok(ExtendedReal::Finite(-overlap.ln()))
}

/// `−log λ_max(ρ̂_{AA*})`.
pub fn prmi_half_via_max(rho: &BipartiteState) -> Result<f64> {
    let hat = rho_hat_marginal(rho, None)?;
    Ok(-eigh(&hat, &ToleranceConfig::default())?.max_eigenvalue().ln())
}

/// `H_α^↑(A|B) = log d_A − I_α^↓(ρ_AB ‖ 1_A/d_A)`; `α = 1` gives `H(A|B)`.
pub fn max_petz_conditional_entropy(rho: &BipartiteState, alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return conditional_entropy(rho);
    }
    let d = rho.d_a() as f64;
    let flat = ComplexMatrix::identity(rho.d_a()).scale(1.0 / d);
    let i = minimized_generalized_prmi(rho, &flat, alpha)?;
    Ok(d.ln() - i.value())
}

/// The chain of optimizers built from the top eigenvector of `ρ̂_{AA*}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerRelations {
    pub lambda_max: f64,
    /// Top eigenvector of `ρ̂_{AA*}`.
    pub phi: PureVector,
    /// CF-invariant optimizer obtained from `phi`.
    pub psi: PureVector,
    /// `√σ |Ω⟩`.
    pub chi: PureVector,
    /// `tr_{A*} |ψ⟩⟨ψ|`.
    pub sigma: ComplexMatrix,
    /// `⟨φ|ρ̂|φ⟩, ⟨ψ|ρ̂|ψ⟩, ⟨χ|ρ̂|χ⟩, exp(−I_{1/2}^↓(ρ‖σ))`.
    pub quotients: [f64; 4],
    /// Largest distance between a quotient and `lambda_max`.
    pub spread: f64,
    /// `‖(1 − Π_{ρ_A}) σ (1 − Π_{ρ_A})‖_∞`.
    pub domination_residual: f64,
}

pub fn extract_optimizer_relations(rho: &BipartiteState) -> Result<OptimizerRelations> {
    let cfg = ToleranceConfig::default();
    let d = rho.d_a();
    let hat = rho_hat_marginal(rho, None)?;
    let eig = eigh(&hat, &cfg)?;
    let lambda_max = eig.max_eigenvalue();
    let phi = PureVector::new(eig.eigenvector(0), vec![d, d])?;
    let psi = cf_symmetrize_optimizer(&phi, &hat, &cfg)?;

    let coeff = ComplexMatrix::from_fn(d, |i, j| psi.amplitudes()[i * d + j]);
    let sigma = (&coeff * &coeff.adjoint()).hermitian_part();
    let sqrt_sigma = psd_power(&sigma, 0.5, &cfg)?;
    let chi = from_coefficients(&sqrt_sigma, vec![d])?;

    let q = |v: &DVector<Complex64>| hat.expectation(v).re;
    let induced = minimized_generalized_prmi(rho, &sigma, 0.5)?.value();
    let quotients = [
        q(phi.amplitudes()),
        q(psi.amplitudes()),
        q(chi.amplitudes()),
        (-induced).exp(),
    ];
    let spread = quotients.iter().fold(0.0f64, |m, x| m.max((x - lambda_max).abs()));

    let pi = projector(&eigh(&rho.rho_a(), &cfg)?);
    let comp = &ComplexMatrix::identity(d) - &pi;
    let domination_residual = linalg::schatten_norm(&(&(&comp * &sigma) * &comp), f64::INFINITY)?;
    Ok(OptimizerRelations {
        lambda_max,
        phi,
        psi,
        chi,
        sigma,
        quotients,
        spread,
        domination_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::is_cf_invariant;
    use crate::entropy::{petz_divergence, RenyiOrder};
    use crate::fixtures;
    use crate::states::{maximally_entangled, product_state, pure_state, random_bipartite, random_unit_vector, Pmf, cc_state};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_tau(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d);
        for _ in 0..d {
            m = &m + &ComplexMatrix::outer(&random_unit_vector(rng, d));
        }
        m.scale(1.0 / m.trace().re)
    }

    fn divergence(rho: &BipartiteState, sigma: &ComplexMatrix, tau: &ComplexMatrix, alpha: f64) -> f64 {
        let prod = linalg::tensor_product(sigma, tau);
        petz_divergence(rho.rho(), &prod, RenyiOrder::new(alpha).unwrap(), &ToleranceConfig::default())
            .unwrap()
            .value()
    }

    fn product() -> BipartiteState {
        product_state(&random_density(1, 2, 2).unwrap(), &random_density(2, 3, 3).unwrap()).unwrap()
    }

    #[test]
    fn generalized_prmi_product_is_zero() {
        let rho = product();
        let v = minimized_generalized_prmi(&rho, &rho.rho_a(), 0.5).unwrap();
        assert_abs_diff_eq!(v.value(), 0.0, epsilon = 1e-12);
        assert!(minimized_generalized_prmi(&rho, &rho.rho_a(), 1.0).is_err());
        assert!(minimized_generalized_prmi(&rho, &rho.rho_a(), 0.0).is_err());
    }

    #[test]
    fn generalized_prmi_orthogonal_is_infinite() {
        let rho = cc_state(&Pmf::new(2, 2, vec![0.5, 0.5, 0.0, 0.0]).unwrap(), 2, 2).unwrap();
        let sigma = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let v = minimized_generalized_prmi(&rho, &sigma, 0.5).unwrap();
        assert_eq!(v, ExtendedReal::PosInfinity);
        assert!(matches!(optimal_tau(&rho, &sigma, 0.5), Err(Error::FiniteBranchViolated)));
        assert_eq!(prmi_half_via_purification(&rho, &sigma).unwrap(), ExtendedReal::PosInfinity);
    }

    fn bloch(r: [f64; 3]) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => real(0.5 * (1.0 + r[2])),
            (1, 1) => real(0.5 * (1.0 - r[2])),
            (0, 1) => Complex64::new(0.5 * r[0], -0.5 * r[1]),
            _ => Complex64::new(0.5 * r[0], 0.5 * r[1]),
        })
    }

    #[test]
    fn generalized_prmi_beats_random_search() {
        use rand::Rng;
        let rho = random_bipartite(3, 2, 2, 4).unwrap();
        let sigma = rho.rho_a();
        let v = minimized_generalized_prmi(&rho, &sigma, 0.5).unwrap().value();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let point = |centre: [f64; 3], radius: f64, rng: &mut ChaCha8Rng| loop {
            let r: [f64; 3] = std::array::from_fn(|k| centre[k] + radius * (2.0 * rng.random::<f64>() - 1.0));
            if r.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                return r;
            }
        };
        // 2000 uniform draws over the Bloch ball, then 8000 local draws.
        let mut best = ([0.0; 3], f64::INFINITY);
        for k in 0..10_000 {
            let (centre, radius) = if k < 2000 { ([0.0; 3], 1.0) } else { (best.0, 0.2 * 0.999f64.powi(k - 2000)) };
            let r = point(centre, radius, &mut rng);
            let value = divergence(&rho, &sigma, &bloch(r), 0.5);
            if value < best.1 {
                best = (r, value);
            }
        }
        assert!(v <= best.1 + 1e-12);
        assert!(best.1 - v <= 1e-4, "random search {} vs closed form {v}", best.1);
    }

    #[test]
    fn optimal_tau_examples() {
        let rho = product();
        for alpha in [0.5, 2.0, 3.0] {
            let tau = optimal_tau(&rho, &rho.rho_a(), alpha).unwrap();
            assert!(tau.max_abs_diff(&rho.rho_b()) < 1e-10);
        }
        let cc = cc_state(&Pmf::random(4, 3, 3).unwrap(), 3, 3).unwrap();
        let tau = optimal_tau(&cc, &cc.rho_a(), 0.7).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(tau[(i, j)].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn optimal_tau_is_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (seed, alpha) in [(5, 0.5), (6, 2.0), (7, 0.8)] {
            let rho = random_bipartite(seed, 2, 3, 6).unwrap();
            let sigma = random_tau(&mut rng, 2);
            let tau = optimal_tau(&rho, &sigma, alpha).unwrap();
            let at_opt = divergence(&rho, &sigma, &tau, alpha);
            let closed = minimized_generalized_prmi(&rho, &sigma, alpha).unwrap().value();
            assert_abs_diff_eq!(at_opt, closed, epsilon = 1e-10);
            for _ in 0..100 {
                assert!(at_opt <= divergence(&rho, &sigma, &random_tau(&mut rng, 3), alpha) + 1e-12);
            }
        }
    }

    #[test]
    fn singly_minimized_examples() {
        let rho = product();
        assert_abs_diff_eq!(singly_minimized_prmi(&rho, 0.5).unwrap().value(), 0.0, epsilon = 1e-12);
        let me = pure_state(&maximally_entangled(2)).unwrap();
        assert_abs_diff_eq!(singly_minimized_prmi(&me, 0.5).unwrap().value(), 2.0 * 2f64.ln(), epsilon = 1e-12);
        let r = random_bipartite(9, 2, 2, 3).unwrap();
        assert_abs_diff_eq!(
            singly_minimized_prmi(&r, 1.0).unwrap().value(),
            mutual_information(&r).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn doubly_minimized_product() {
        let rho = product();
        let r = doubly_minimized_prmi(&rho, 0.5, &AltMinOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value.value(), 0.0, epsilon = 1e-10);
        assert!(r.sigma_opt.max_abs_diff(&rho.rho_a()) < 1e-6);
        assert!(r.tau_opt.max_abs_diff(&rho.rho_b()) < 1e-6);
    }

    #[test]
    fn doubly_minimized_b9() {
        let rho = fixtures::b9_state().unwrap();
        let r = doubly_minimized_prmi(&rho, 0.5, &AltMinOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value.value(), -(2.0f64 / 3.0).ln(), epsilon = 1e-8);
        assert!(r.converged);
    }

    #[test]
    fn doubly_minimized_matches_eigenvalue_route() {
        for seed in 0..10 {
            let rho = random_bipartite(seed, 2, 2, 4).unwrap();
            let r = doubly_minimized_prmi(&rho, 0.5, &AltMinOptions::default()).unwrap();
            let m = prmi_half_via_max(&rho).unwrap();
            assert!((r.value.value() - m).abs() <= 1e-6, "seed {seed}: {} vs {m}", r.value.value());
        }
    }

    #[test]
    fn doubly_minimized_traces_are_monotone() {
        for (seed, alpha) in [(1, 0.5), (2, 0.7), (3, 1.5), (4, 2.0)] {
            let rho = random_bipartite(seed, 2, 3, 6).unwrap();
            let r = doubly_minimized_prmi(&rho, alpha, &AltMinOptions::default()).unwrap();
            for t in &r.traces {
                for w in t.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "alpha {alpha}: {} -> {}", w[0], w[1]);
                }
            }
            let single = singly_minimized_prmi(&rho, alpha).unwrap().value();
            assert!(r.value.value() <= single + 1e-12);
        }
    }

    #[test]
    fn doubly_minimized_is_symmetric() {
        let rho = random_bipartite(21, 2, 3, 5).unwrap();
        let opts = AltMinOptions::default();
        let ab = doubly_minimized_prmi(&rho, 0.5, &opts).unwrap().value.value();
        let ba = doubly_minimized_prmi(&rho.swapped(), 0.5, &opts).unwrap().value.value();
        assert_abs_diff_eq!(ab, ba, epsilon = 1e-6);
    }

    #[test]
    fn purification_route_examples() {
        let rho = random_bipartite(11, 2, 3, 6).unwrap();
        let single = singly_minimized_prmi(&rho, 0.5).unwrap().value();
        let via = prmi_half_via_purification(&rho, &rho.rho_a()).unwrap().value();
        assert_abs_diff_eq!(single, via, epsilon = 1e-9);

        let flat = ComplexMatrix::identity(2).scale(0.5);
        let via = prmi_half_via_purification(&rho, &flat).unwrap().value();
        let h = max_petz_conditional_entropy(&rho, 0.5).unwrap();
        assert_abs_diff_eq!(via, 2f64.ln() - h, epsilon = 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let sigma = random_tau(&mut rng, 2);
            let a = prmi_half_via_purification(&rho, &sigma).unwrap().value();
            let b = minimized_generalized_prmi(&rho, &sigma, 0.5).unwrap().value();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn max_route_examples() {
        assert_abs_diff_eq!(prmi_half_via_max(&product()).unwrap(), 0.0, epsilon = 1e-12);
        for d in [2, 3] {
            let me = pure_state(&maximally_entangled(d)).unwrap();
            assert_abs_diff_eq!(prmi_half_via_max(&me).unwrap(), 2.0 * (d as f64).ln(), epsilon = 1e-12);
        }
        let b9 = fixtures::b9_state().unwrap();
        assert_abs_diff_eq!(prmi_half_via_max(&b9).unwrap(), -(2.0f64 / 3.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn conditional_entropy_examples() {
        let mixed = crate::states::validate_density(&ComplexMatrix::identity(6).scale(1.0 / 6.0), 2, 3, &ToleranceConfig::default()).unwrap();
        assert_abs_diff_eq!(max_petz_conditional_entropy(&mixed, 0.5).unwrap(), 2f64.ln(), epsilon = 1e-12);
        let me = pure_state(&maximally_entangled(2)).unwrap();
        assert_abs_diff_eq!(max_petz_conditional_entropy(&me, 0.5).unwrap(), -(2f64.ln()), epsilon = 1e-12);
        for seed in 0..20 {
            let rho = random_bipartite(seed, 3, 2, 4).unwrap();
            assert!(max_petz_conditional_entropy(&rho, 0.5).unwrap() <= 3f64.ln() + 1e-9);
        }
    }

    #[test]
    fn optimizer_relations() {
        let rel = extract_optimizer_relations(&product()).unwrap();
        for q in rel.quotients {
            assert_abs_diff_eq!(q, 1.0, epsilon = 1e-10);
        }
        for seed in 0..10 {
            let rel = extract_optimizer_relations(&random_bipartite(seed, 2, 2, 4).unwrap()).unwrap();
            assert!(rel.spread <= 1e-8, "seed {seed}: {:?}", rel.quotients);
            assert!(rel.domination_residual <= 1e-8);
            assert!(is_cf_invariant(&rel.psi, 1e-10).unwrap().invariant);
        }
        let rel = extract_optimizer_relations(&fixtures::b9_state().unwrap()).unwrap();
        for q in rel.quotients {
            assert_abs_diff_eq!(q, 2.0 / 3.0, epsilon = 1e-10);
        }
    }
}
