//! Small states with known closed-form answers.

use crate::error::Result;
use crate::linalg::{real, ComplexMatrix};
use crate::states::{cc_state, copy_cc_state, validate_density, BipartiteState, Pmf};
use crate::ToleranceConfig;

/// `P = [[p, 0, p], [0, p, p], [p, p, 0]]` with `p = 1/6`.
pub fn b9_pmf() -> Pmf {
    let p = 1.0 / 6.0;
    Pmf::new(3, 3, vec![p, 0.0, p, 0.0, p, p, p, p, 0.0]).expect("valid pmf")
}

/// The CC state of [`b9_pmf`] on `C³ ⊗ C³`.
pub fn b9_state() -> Result<BipartiteState> {
    cc_state(&b9_pmf(), 3, 3)
}

/// Unitary commuting with [`b9_state`] that flips the sign of `|00⟩`.
pub fn b9_twist() -> ComplexMatrix {
    let mut d = vec![1.0; 9];
    d[0] = -1.0;
    ComplexMatrix::from_real_diagonal(&d)
}

/// `S_R^{(n)}` of [`b9_state`]: the Rényi entropy of `(2/3, 1/6, 1/6)`.
pub fn b9_reflected_closed_form(n: f64) -> f64 {
    let spec: [f64; 3] = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
    if n == 1.0 {
        return -spec.iter().map(|p| p * p.ln()).sum::<f64>();
    }
    if n.is_infinite() {
        return -spec[0].ln();
    }
    (2.0 * (1.0f64 / 6.0).powf(n) + (2.0f64 / 3.0).powf(n)).ln() / (1.0 - n)
}

/// Uniform copy state `(1/d_a) Σ_x |x⟩⟨x| ⊗ |x⟩⟨x|` with `d_b ≥ d_a`.
pub fn b7_state(d_a: usize, d_b: usize) -> Result<BipartiteState> {
    copy_cc_state(&vec![1.0 / d_a as f64; d_a], d_b)
}

/// Closed form of `I(A'A : B)` for the symmetric/antisymmetric ω state.
pub fn b8_mutual_information(d: usize) -> f64 {
    let d = d as f64;
    (d + 1.0) / (2.0 * d) * (2.0 * d * d / (d + 1.0)).ln()
        + (d - 1.0) / (2.0 * d) * (2.0 * d * d / (d - 1.0)).ln()
        + d.ln()
        - 2.0 * d.ln()
}

/// `|00⟩⟨00|` on `C² ⊗ C²`.
pub fn b3_state() -> Result<BipartiteState> {
    validate_density(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]), 2, 2, &ToleranceConfig::default())
}

/// `p|+⟩⟨+| + (1 − p)|−⟩⟨−|`.
pub fn b3_sigma(p: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| real(if i == j { 0.5 } else { p - 0.5 }))
}

/// Hadamard gate.
pub fn hadamard() -> ComplexMatrix {
    let s = 1.0 / 2f64.sqrt();
    ComplexMatrix::from_fn(2, |i, j| real(if i == 1 && j == 1 { -s } else { s }))
}

/// Closed forms of the overlap objective with the Hadamard and identity twists.
pub fn b3_closed_forms(p: f64) -> (f64, f64) {
    (p / 2.0, 0.5 * (p * (1.0 - p)).sqrt() + 0.25)
}

/// Root of `p/2 = ½√(p(1−p)) + ¼` in `[0, 1]`.
pub fn b3_crossing() -> f64 {
    (2.0 + 2f64.sqrt()) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn b9_pmf_sums_to_one() {
        assert_abs_diff_eq!(b9_pmf().values().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn b9_closed_form_values() {
        assert_abs_diff_eq!(b9_reflected_closed_form(2.0), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(b9_reflected_closed_form(1.0), 0.867563228481461, epsilon = 1e-12);
        assert_abs_diff_eq!(b9_reflected_closed_form(f64::INFINITY), (1.5f64).ln(), epsilon = 1e-15);
    }

    #[test]
    fn b3_crossing_is_a_root() {
        let p0 = b3_crossing();
        let (xu, x1) = b3_closed_forms(p0);
        assert_abs_diff_eq!(xu, x1, epsilon = 1e-15);
        let (xu, x1) = b3_closed_forms(1.0);
        assert_abs_diff_eq!(xu, 0.5);
        assert_abs_diff_eq!(x1, 0.25);
    }

    #[test]
    fn hadamard_is_unitary() {
        let h = hadamard();
        assert!((&h * &h).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn b8_closed_form_below_log_d() {
        for d in 2..6 {
            assert!(b8_mutual_information(d) < (d as f64).ln());
        }
        let expected = 0.75 * (8.0f64 / 3.0).ln() + 0.25 * 8f64.ln() + 2f64.ln() - 4f64.ln();
        assert_abs_diff_eq!(b8_mutual_information(2), expected, epsilon = 1e-15);
    }
}
