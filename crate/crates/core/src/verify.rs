//! Executable checks of the identities and inequalities between the
//! measures, with machine-readable reports.

use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cf::{cf_invariant_spectral_decomposition, cf_symmetrize_optimizer, is_cf_invariant, CfConjugate};
use crate::entropy::{mutual_information, renyi_entropy, renyi_from_spectrum, RenyiOrder};
use crate::error::Result;
use crate::fixtures;
use crate::linalg::{eigh, reduced_from_vector, ComplexMatrix, ToleranceConfig, ONE, ZERO};
use crate::prmi::{
    doubly_minimized_prmi, extract_optimizer_relations, max_petz_conditional_entropy, prmi_half_via_max,
    singly_minimized_prmi, AltMinOptions,
};
use crate::purification::{canonical_purification, rho_hat_marginal};
use crate::reflected::{
    cc_reflected, deflected, eval_overlap_objective, min_reflected, minimized_reflected, renyi_reflected,
    MinimizeOptions,
};
use crate::states::{
    cc_state, copy_cc_state, derive_seed, m_power_state, maximally_entangled, product_state, pure_state,
    random_bipartite, random_density, random_unit_vector, validate_density, BipartiteState, Pmf, PureVector,
};

/// Outcome of one check. `passed` holds exactly when `residual ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub passed: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub state_descriptor: String,
    pub runtime_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    fn new(name: &str, lhs: f64, rhs: f64, residual: f64, tolerance: f64, desc: &str) -> Self {
        Self {
            check_name: name.to_string(),
            passed: residual <= tolerance,
            lhs,
            rhs,
            residual,
            tolerance,
            state_descriptor: desc.to_string(),
            runtime_ms: 0.0,
            error: None,
        }
    }

    /// `|lhs − rhs| ≤ tolerance`.
    pub fn equality(name: &str, lhs: f64, rhs: f64, tolerance: f64, desc: &str) -> Self {
        Self::new(name, lhs, rhs, (lhs - rhs).abs(), tolerance, desc)
    }

    /// `lhs ≤ rhs + tolerance`.
    pub fn at_most(name: &str, lhs: f64, rhs: f64, tolerance: f64, desc: &str) -> Self {
        Self::new(name, lhs, rhs, (lhs - rhs).max(0.0), tolerance, desc)
    }

    /// `lhs ≥ rhs − tolerance`.
    pub fn at_least(name: &str, lhs: f64, rhs: f64, tolerance: f64, desc: &str) -> Self {
        Self::new(name, lhs, rhs, (rhs - lhs).max(0.0), tolerance, desc)
    }

    /// A check whose computation failed.
    pub fn failed(name: &str, desc: &str, error: String) -> Self {
        Self {
            check_name: name.to_string(),
            passed: false,
            lhs: f64::NAN,
            rhs: f64::NAN,
            residual: f64::NAN,
            tolerance: 0.0,
            state_descriptor: desc.to_string(),
            runtime_ms: 0.0,
            error: Some(error),
        }
    }

    /// Recomputes the pass flag from the stored numbers.
    pub fn consistent(&self) -> bool {
        self.passed == (self.residual <= self.tolerance)
    }
}

fn timed(name: &str, desc: &str, f: impl FnOnce() -> Result<Vec<CheckReport>>) -> Vec<CheckReport> {
    let start = Instant::now();
    let mut out = f().unwrap_or_else(|e| vec![CheckReport::failed(name, desc, e.to_string())]);
    let ms = start.elapsed().as_secs_f64() * 1e3 / out.len().max(1) as f64;
    for r in &mut out {
        r.runtime_ms = ms;
    }
    out
}

const ORDER_GRID: [f64; 8] = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, f64::INFINITY];

fn order(a: f64) -> RenyiOrder {
    RenyiOrder::new(a).expect("grid orders are valid")
}

fn ln(x: f64) -> f64 {
    x.ln()
}

/// `S_R^{(∞)}` by eigenvalues against `I_{1/2}^{↓↓}` by alternating minimization.
pub fn check_theorem_equality(rho: &BipartiteState, tol: f64, desc: &str) -> Result<CheckReport> {
    let lhs = min_reflected(rho)?;
    let rhs = doubly_minimized_prmi(rho, 0.5, &AltMinOptions::default())?.value.value();
    Ok(CheckReport::equality("theorem_equality", lhs, rhs, tol, desc))
}

/// `S_R^{(m,∞)}(ρ)`, `S_R^{(∞)}(σ^{(m)})` and `I_{1/2}^{↓↓}(σ^{(m)})` agree.
pub fn check_mn_corollary(rho: &BipartiteState, m: f64, desc: &str) -> Result<CheckReport> {
    let a = renyi_reflected(rho, m, RenyiOrder::Infinity)?;
    let sigma = m_power_state(rho, m)?;
    let b = min_reflected(&sigma)?;
    let c = doubly_minimized_prmi(&sigma, 0.5, &AltMinOptions::default())?.value.value();
    let residual = (a - b).abs().max((a - c).abs()).max((b - c).abs());
    Ok(CheckReport::new(&format!("mn_corollary_m{m}"), a, c, residual, 1e-6, desc))
}

/// Every link of the lower/upper bound chain around `S_R^{(∞)}`.
pub fn check_bounds_chain(rho: &BipartiteState, desc: &str) -> Result<Vec<CheckReport>> {
    const SLACK: f64 = 1e-6;
    let sr2 = renyi_reflected(rho, 1.0, order(2.0))?;
    let sr_inf = min_reflected(rho)?;
    let i_dd = doubly_minimized_prmi(rho, 0.5, &AltMinOptions::default())?.value.value();
    let i_ud = singly_minimized_prmi(rho, 0.5)?.value();
    let flat = (rho.d_a() as f64).ln() - max_petz_conditional_entropy(rho, 0.5)?;
    let mi = mutual_information(rho)?;
    let sr = renyi_reflected(rho, 1.0, RenyiOrder::One)?;
    Ok(vec![
        CheckReport::at_most("bounds_half_sr2_le_sr_inf", 0.5 * sr2, sr_inf, SLACK, desc),
        CheckReport::equality("bounds_sr_inf_eq_i_dd", sr_inf, i_dd, SLACK, desc),
        CheckReport::at_most("bounds_sr_inf_le_i_ud", sr_inf, i_ud, SLACK, desc),
        CheckReport::at_most("bounds_sr_inf_le_log_da_minus_h_up", sr_inf, flat, SLACK, desc),
        CheckReport::at_most("bounds_i_ud_le_mi", i_ud, mi, SLACK, desc),
        CheckReport::at_most("bounds_mi_le_sr", mi, sr, SLACK, desc),
    ])
}

fn max_over_grid(mut f: impl FnMut(RenyiOrder) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for a in ORDER_GRID {
        worst = worst.max(f(order(a))?);
    }
    Ok(worst)
}

fn support_rank(m: &ComplexMatrix) -> Result<usize> {
    Ok(eigh(m, &ToleranceConfig::default())?.support_rank())
}

/// The property list of the reflected entropy, on fixtures generated from
/// `seed`: a random (2,3) state, a product state, a pure state, a CC state
/// and a copy-CC state.
pub fn check_properties(seed: u64) -> Result<Vec<CheckReport>> {
    const CLOSED: f64 = 1e-8;
    const INEQ: f64 = 1e-9;
    let desc = format!("seed={seed}");
    let desc = desc.as_str();
    let rho = random_bipartite(derive_seed(seed, 0), 2, 3, 6)?;
    let sr = |s: &BipartiteState, a: RenyiOrder| renyi_reflected(s, 1.0, a);
    let mut out = Vec::new();

    // (a) nonincreasing in the order
    let mut prev = f64::INFINITY;
    let mut rise = 0.0f64;
    for a in ORDER_GRID {
        let v = sr(&rho, order(a))?;
        rise = rise.max(v - prev);
        prev = v;
    }
    out.push(CheckReport::at_most("property_a_monotone", rise, 0.0, INEQ, desc));

    // (c) symmetry under exchanging A and B
    let swapped = rho.swapped();
    let diff = max_over_grid(|a| Ok((sr(&rho, a)? - sr(&swapped, a)?).abs()))?;
    out.push(CheckReport::at_most("property_c_symmetry", diff, 0.0, INEQ, desc));

    // (d) dimension bound
    let bound = 2.0 * ln(support_rank(&rho.rho_a())?.min(support_rank(&rho.rho_b())?) as f64);
    let top = max_over_grid(|a| sr(&rho, a))?;
    out.push(CheckReport::at_most("property_d_bound", top, bound, INEQ, desc));

    // (e) invariance under local isometric embeddings
    let embedded = rho.embed(3, 4)?;
    let diff = max_over_grid(|a| Ok((sr(&rho, a)? - sr(&embedded, a)?).abs()))?;
    out.push(CheckReport::at_most("property_e_isometry", diff, 0.0, INEQ, desc));

    // (f) additivity on tensor products
    let r1 = random_bipartite(derive_seed(seed, 1), 2, 2, 4)?;
    let r2 = random_bipartite(derive_seed(seed, 2), 2, 2, 2)?;
    let joint = r1.tensor(&r2);
    let mut diff = 0.0f64;
    for a in [0.5, 1.0, 2.0, f64::INFINITY] {
        let a = order(a);
        diff = diff.max((sr(&joint, a)? - sr(&r1, a)? - sr(&r2, a)?).abs());
    }
    out.push(CheckReport::at_most("property_f_additivity", diff, 0.0, CLOSED, desc));

    // (g) S_R = I(AA*:B) of the purification, and I(A:B) ≤ S_R
    let v = canonical_purification(&rho)?;
    let dims = [2, 3, 2, 3];
    let aa_b = reduced_from_vector(v.amplitudes(), &dims, &[0, 2, 1])?;
    let aa_b = validate_density(&aa_b, 4, 3, &ToleranceConfig::default())?;
    let s_r = sr(&rho, RenyiOrder::One)?;
    out.push(CheckReport::equality("property_g_purified_mi", s_r, mutual_information(&aa_b)?, CLOSED, desc));
    out.push(CheckReport::at_most("property_g_mi_le_sr", mutual_information(&rho)?, s_r, INEQ, desc));

    // (h) zero on product states, positive otherwise
    let prod = product_state(&random_density(derive_seed(seed, 3), 2, 2)?, &random_density(derive_seed(seed, 4), 3, 3)?)?;
    let top = max_over_grid(|a| Ok(sr(&prod, a)?.abs()))?;
    out.push(CheckReport::at_most("property_h_product_zero", top, 0.0, CLOSED, desc));
    out.push(CheckReport::at_least("property_h_correlated_positive", s_r, 1e-6, 0.0, desc));

    // (i) pure states: twice the marginal entropy
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(derive_seed(seed, 5));
    let psi = PureVector::new(random_unit_vector(&mut rng, 6), vec![2, 3])?;
    let pure = pure_state(&psi)?;
    let cfg = ToleranceConfig::default();
    let diff = max_over_grid(|a| Ok((sr(&pure, a)? - 2.0 * renyi_entropy(&pure.rho_a(), a, &cfg)?).abs()))?;
    out.push(CheckReport::at_most("property_i_pure", diff, 0.0, CLOSED, desc));

    // (j) CC states via the singular values of √P
    let pmf = Pmf::random(derive_seed(seed, 6), 3, 3)?;
    let cc = cc_state(&pmf, 3, 3)?;
    let diff = max_over_grid(|a| Ok((sr(&cc, a)? - cc_reflected(&pmf, a)?).abs()))?;
    out.push(CheckReport::at_most("property_j_cc", diff, 0.0, CLOSED, desc));

    // (k) copy-CC states: the marginal entropy
    let p = Pmf::random(derive_seed(seed, 7), 1, 3)?.values().to_vec();
    let copy = copy_cc_state(&p, 4)?;
    let diff = max_over_grid(|a| Ok((sr(&copy, a)? - renyi_from_spectrum(&p, a)).abs()))?;
    out.push(CheckReport::at_most("property_k_copy_cc", diff, 0.0, CLOSED, desc));
    Ok(out)
}

/// Minimized against plain reflected entropy for an integer order (or
/// infinity), and the deflected entropies on an s-grid against the
/// minimized value.
pub fn check_thm_minimized(rho: &BipartiteState, n: RenyiOrder, desc: &str) -> Result<Vec<CheckReport>> {
    let r = minimized_reflected(rho, n, &MinimizeOptions::default())?;
    let mut lowest = f64::INFINITY;
    for k in -4..=4 {
        lowest = lowest.min(deflected(rho, 0.5 * k as f64, n)?);
    }
    Ok(vec![
        CheckReport::equality(&format!("thm_minimized_n{n}"), r.value, r.unminimized, 1e-4, desc),
        CheckReport::at_least(&format!("deflected_above_minimized_n{n}"), lowest, r.value, 1e-6, desc),
    ])
}

/// On the b9 fixture the minimized entropy drops to `log 2` or below for
/// orders under 2 while the plain one stays above it.
pub fn check_remark02() -> Result<Vec<CheckReport>> {
    let rho = fixtures::b9_state()?;
    let ln2 = 2f64.ln();
    let desc = "fixture=b9";
    let mut out = Vec::new();
    for n in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let r = minimized_reflected(&rho, order(n), &MinimizeOptions::default())?;
        out.push(CheckReport::at_most(&format!("remark02_min_le_log2_n{n}"), r.value, ln2, 1e-9, desc));
        let gap = if [0.5, 1.0, 1.5].contains(&n) { 1e-3 } else { 1e-6 };
        out.push(CheckReport::at_most(&format!("remark02_gap_n{n}"), r.value + gap, r.unminimized, 0.0, desc));
    }
    let r = minimized_reflected(&rho, order(2.0), &MinimizeOptions::default())?;
    out.push(CheckReport::equality("remark02_plain_n2", r.unminimized, ln2, 1e-8, desc));
    out.push(CheckReport::equality("remark02_min_n2", r.value, ln2, 1e-8, desc));
    Ok(out)
}

/// The overlap objective on `|00⟩⟨00|` with the Hadamard and identity
/// twists, and the sign change of their difference.
pub fn check_counterexample_b3() -> Result<Vec<CheckReport>> {
    let rho = fixtures::b3_state()?;
    let h = fixtures::hadamard();
    let id = ComplexMatrix::identity(2);
    let p0 = fixtures::b3_crossing();
    let mut out = Vec::new();
    let diff = |p: f64| -> Result<f64> {
        let s = fixtures::b3_sigma(p);
        Ok(eval_overlap_objective(&rho, &s, &h)? - eval_overlap_objective(&rho, &s, &id)?)
    };
    for p in [0.1, p0, 0.95, 1.0] {
        let desc = format!("fixture=b3 p={p}");
        let s = fixtures::b3_sigma(p);
        let (xu, x1) = fixtures::b3_closed_forms(p);
        out.push(CheckReport::equality("b3_x_u", eval_overlap_objective(&rho, &s, &h)?, xu, 1e-12, &desc));
        out.push(CheckReport::equality("b3_x_1", eval_overlap_objective(&rho, &s, &id)?, x1, 1e-12, &desc));
    }
    out.push(CheckReport::at_most("b3_below_p0", diff(0.1)?, 0.0, 0.0, "fixture=b3 p=0.1"));
    out.push(CheckReport::at_least("b3_above_p0", diff(0.95)?, 0.0, 0.0, "fixture=b3 p=0.95"));
    out.push(CheckReport::equality("b3_at_p0", diff(p0)?, 0.0, 1e-12, "fixture=b3 p=p0"));
    out.push(CheckReport::at_most("b3_bracket_left", diff(p0 - 1e-6)?, 0.0, 0.0, "fixture=b3 p=p0-1e-6"));
    out.push(CheckReport::at_least("b3_bracket_right", diff(p0 + 1e-6)?, 0.0, 0.0, "fixture=b3 p=p0+1e-6"));
    Ok(out)
}

/// Mutual informations of the copy fixture and of the ω state.
pub fn check_fixture_b7_b8() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for d_a in [2, 3] {
        for d_b in [d_a, d_a + 1] {
            let desc = format!("fixture=b7 d_a={d_a} d_b={d_b}");
            let mi = mutual_information(&fixtures::b7_state(d_a, d_b)?)?;
            out.push(CheckReport::equality("b7_mutual_information", mi, ln(d_a as f64), 1e-10, &desc));
        }
    }
    for d in [2, 3] {
        let desc = format!("fixture=b8 d={d}");
        let mi = mutual_information(&crate::states::omega_symmetric_state(d)?)?;
        out.push(CheckReport::equality("b8_mutual_information", mi, fixtures::b8_mutual_information(d), 1e-10, &desc));
        out.push(CheckReport::at_most("b8_below_log_d", mi, ln(d as f64), 0.0, &desc));
    }
    Ok(out)
}

/// The four optimizers built from the top eigenvector of `ρ̂_{AA*}` reach
/// the same quotient, and `σ ≪ ρ_A`.
pub fn check_optimizer_relations(rho: &BipartiteState, desc: &str) -> Result<Vec<CheckReport>> {
    let r = extract_optimizer_relations(rho)?;
    Ok(vec![
        CheckReport::at_most("optimizer_quotients", r.spread, 0.0, 1e-8, desc),
        CheckReport::at_most("optimizer_domination", r.domination_residual, 0.0, 1e-8, desc),
    ])
}

/// Alternating minimization on a CC state against `−2 log σ_max(√P)`.
pub fn check_cc_classical(p: &Pmf, desc: &str) -> Result<CheckReport> {
    let (rows, cols) = p.shape();
    let rho = cc_state(p, rows, cols)?;
    let lhs = doubly_minimized_prmi(&rho, 0.5, &AltMinOptions::default())?.value.value();
    let rhs = cc_reflected(p, RenyiOrder::Infinity)?;
    Ok(CheckReport::equality("cc_classical", lhs, rhs, 1e-6, desc))
}

/// Maximally entangled states saturate at `2 log d`; the copy fixture has
/// `I = log d_A`.
pub fn check_equivalence() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for d in [2, 3] {
        let desc = format!("maximally_entangled d={d}");
        let rho = pure_state(&maximally_entangled(d))?;
        let target = 2.0 * ln(d as f64);
        for a in [0.5, 1.0, 2.0, f64::INFINITY] {
            let a = order(a);
            let v = renyi_reflected(&rho, 1.0, a)?;
            out.push(CheckReport::equality(&format!("equivalence_sr_{a}"), v, target, 1e-8, &desc));
        }
        out.push(CheckReport::equality("equivalence_mi", mutual_information(&rho)?, target, 1e-8, &desc));
    }
    Ok(out)
}

/// CF-map checks on one random state: involution, invariance of `ρ̂_{AA*}`,
/// the invariant eigendecomposition and both symmetrization branches.
pub fn check_cf_machinery(rho: &BipartiteState, seed: u64, desc: &str) -> Result<Vec<CheckReport>> {
    let cfg = ToleranceConfig::default();
    let d = rho.d_a();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let v = PureVector::new(random_unit_vector(&mut rng, d * d), vec![d, d])?;
    let twice = v.cf_apply()?.cf_apply()?;
    let mut out = vec![CheckReport::at_most("cf_involution", v.cf_distance(&twice), 0.0, 1e-14, desc)];

    let hat = rho_hat_marginal(rho, None)?;
    let inv = is_cf_invariant(&hat, 1e-10)?;
    out.push(CheckReport::at_most("cf_rho_hat_invariant", inv.residual, 0.0, 1e-10, desc));

    let dec = cf_invariant_spectral_decomposition(&hat, &cfg)?;
    let recon = dec.reconstruct().max_abs_diff(&hat);
    out.push(CheckReport::at_most("cf_decomposition_reconstructs", recon, 0.0, 1e-9, desc));
    let mut worst = 0.0f64;
    for j in 0..hat.dim() {
        let e = PureVector::new(dec.eigenvector(j), vec![d, d])?;
        worst = worst.max(e.cf_distance(&e.cf_apply()?));
    }
    out.push(CheckReport::at_most("cf_eigenvectors_invariant", worst, 0.0, 1e-8, desc));

    let plain = eigh(&hat, &cfg)?;
    let phi = PureVector::new(plain.eigenvector(0), vec![d, d])?;
    let psi = cf_symmetrize_optimizer(&phi, &hat, &cfg)?;
    let q = hat.expectation(psi.amplitudes()).re;
    out.push(CheckReport::equality("cf_symmetrize_top", q, plain.max_eigenvalue(), 1e-9, desc));

    // Degenerate branch: every vector maximizes the identity, and |01⟩ is
    // orthogonal to its own image.
    let id = ComplexMatrix::identity(4);
    let e01 = PureVector::new(DVector::from_fn(4, |i, _| if i == 1 { ONE } else { ZERO }), vec![2, 2])?;
    let psi = cf_symmetrize_optimizer(&e01, &id, &cfg)?;
    let q = id.expectation(psi.amplitudes()).re;
    out.push(CheckReport::equality("cf_symmetrize_degenerate", q, 1.0, 1e-9, "identity d=2"));
    let inv = is_cf_invariant(&psi, 1e-12)?;
    out.push(CheckReport::at_most("cf_symmetrize_degenerate_invariant", inv.residual, 0.0, 1e-12, "identity d=2"));
    Ok(out)
}

/// Raw state handed to the suite for validation before any check runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraState {
    pub name: String,
    pub matrix: ComplexMatrix,
    pub d_a: usize,
    pub d_b: usize,
}

/// Suite settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub master_seed: u64,
    /// Random states per dimension pair.
    pub trials: usize,
    pub dims: Vec<(usize, usize)>,
    /// Used when validating `extra_states`.
    pub tol: ToleranceConfig,
    pub extra_states: Vec<ExtraState>,
    /// Run the commutant optimization checks on the random states.
    pub minimized: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            master_seed: 0x5eed,
            trials: 3,
            dims: vec![(2, 2), (2, 3), (3, 3)],
            tol: ToleranceConfig::default(),
            extra_states: Vec::new(),
            minimized: true,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(crate::Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.dims.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(crate::Error::InvalidParameter("dimensions must be positive".into()));
        }
        self.tol.validate()
    }
}

/// Reports in registry order plus counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub reports: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.reports.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&serde_json::to_string(r).expect("report serializes"));
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} checks, {} passed, {} failed\n", self.reports.len(), self.passed(), self.failed());
        for r in self.reports.iter().filter(|r| !r.passed) {
            s.push_str(&format!(
                "FAIL {} [{}] residual {:e} > {:e}",
                r.check_name, r.state_descriptor, r.residual, r.tolerance
            ));
            if let Some(e) = &r.error {
                s.push_str(&format!(" ({e})"));
            }
            s.push('\n');
        }
        s
    }
}

fn validate_extra(x: &ExtraState, tol: &ToleranceConfig) -> CheckReport {
    let desc = format!("state={}", x.name);
    let tr = x.matrix.trace().re;
    match validate_density(&x.matrix, x.d_a, x.d_b, tol) {
        Ok(_) => CheckReport::equality("state_validation", tr, 1.0, crate::states::TRACE_TOL, &desc),
        Err(e) => {
            let mut r = CheckReport::failed("state_validation", &desc, e.to_string());
            r.lhs = tr;
            r.rhs = 1.0;
            r.tolerance = crate::states::TRACE_TOL;
            if (tr - 1.0).abs() > r.tolerance {
                r.residual = (tr - 1.0).abs();
            }
            r
        }
    }
}

/// Runs every check. Deterministic in `cfg.master_seed` apart from the
/// runtime fields.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut reports = Vec::new();
    for x in &cfg.extra_states {
        reports.push(validate_extra(x, &cfg.tol));
    }

    reports.extend(timed("theorem_equality", "fixture=b9", || {
        Ok(vec![check_theorem_equality(&fixtures::b9_state()?, 1e-6, "fixture=b9")?])
    }));
    reports.extend(timed("remark02", "fixture=b9", check_remark02));
    reports.extend(timed("counterexample_b3", "fixture=b3", check_counterexample_b3));
    reports.extend(timed("fixture_b7_b8", "fixtures=b7,b8", check_fixture_b7_b8));
    reports.extend(timed("equivalence", "maximally_entangled", check_equivalence));
    reports.extend(timed("properties", "properties", || check_properties(cfg.master_seed)));

    for (k, &(d_a, d_b)) in cfg.dims.iter().enumerate() {
        for t in 0..cfg.trials {
            let seed = derive_seed(cfg.master_seed, (k * cfg.trials + t) as u64);
            let desc = format!("seed={seed} dims={d_a}x{d_b}");
            let desc = desc.as_str();
            let rho = match random_bipartite(seed, d_a, d_b, d_a * d_b) {
                Ok(r) => r,
                Err(e) => {
                    reports.push(CheckReport::failed("random_state", desc, e.to_string()));
                    continue;
                }
            };
            reports.extend(timed("theorem_equality", desc, || Ok(vec![check_theorem_equality(&rho, 1e-6, desc)?])));
            reports.extend(timed("mn_corollary", desc, || {
                Ok(vec![check_mn_corollary(&rho, 0.0, desc)?, check_mn_corollary(&rho, 2.0, desc)?])
            }));
            reports.extend(timed("bounds_chain", desc, || check_bounds_chain(&rho, desc)));
            reports.extend(timed("optimizer_relations", desc, || check_optimizer_relations(&rho, desc)));
            reports.extend(timed("cf_machinery", desc, || check_cf_machinery(&rho, seed, desc)));
            reports.extend(timed("cc_classical", desc, || {
                Ok(vec![check_cc_classical(&Pmf::random(seed, d_a, d_b)?, desc)?])
            }));
            if cfg.minimized {
                for n in [order(2.0), order(3.0), RenyiOrder::Infinity] {
                    reports.extend(timed("thm_minimized", desc, || check_thm_minimized(&rho, n, desc)));
                }
            }
        }
    }
    Ok(SuiteReport { reports })
}

/// `S_R^{(∞)}` against the α = 1/2 alternating minimization value, for
/// one suite state.
pub fn theorem_row(seed: u64, d_a: usize, d_b: usize) -> Result<(f64, f64)> {
    let rho = random_bipartite(seed, d_a, d_b, d_a * d_b)?;
    let sr = prmi_half_via_max(&rho)?;
    let half = doubly_minimized_prmi(&rho, 0.5, &AltMinOptions::default())?.value.value();
    Ok((sr, half))
}
