//! Curve and scatter data for plotting.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy::RenyiOrder;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::ComplexMatrix;
use crate::reflected::{eval_overlap_objective, renyi_reflected};
use crate::states::derive_seed;
use crate::verify::theorem_row;

/// Which data set to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    B9Curve,
    B3Crossing,
    TheoremScatter,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b9-curve" => Ok(Self::B9Curve),
            "b3-crossing" => Ok(Self::B3Crossing),
            "theorem-scatter" => Ok(Self::TheoremScatter),
            other => Err(Error::InvalidParameter(format!("unknown target {other:?}"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::B9Curve => "b9-curve",
            Self::B3Crossing => "b3-crossing",
            Self::TheoremScatter => "theorem-scatter",
        })
    }
}

/// `S_R^{(n)}` of the b9 fixture state next to `log 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B9Row {
    pub n: f64,
    pub sr_n: f64,
    pub log2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B3Row {
    pub p: f64,
    pub x_u: f64,
    pub x_1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub seed: u64,
    pub d_a: usize,
    pub d_b: usize,
    pub sr_inf: f64,
    pub i_half: f64,
    pub residual: f64,
}

pub const B9_HEADER: [&str; 3] = ["n", "sr_n", "log2"];
pub const B3_HEADER: [&str; 3] = ["p", "x_u", "x_1"];
pub const SCATTER_HEADER: [&str; 6] = ["seed", "d_a", "d_b", "sr_inf", "i_half", "residual"];

pub fn b9_row(n: f64) -> Result<B9Row> {
    let rho = fixtures::b9_state()?;
    Ok(B9Row {
        n,
        sr_n: renyi_reflected(&rho, 1.0, RenyiOrder::new(n)?)?,
        log2: 2f64.ln(),
    })
}

/// `n = 0.05, 0.10, …, 3.00`.
pub fn b9_curve() -> Result<Vec<B9Row>> {
    (1..=60).map(|k| b9_row(k as f64 / 20.0)).collect()
}

pub fn b3_row(p: f64) -> Result<B3Row> {
    let rho = fixtures::b3_state()?;
    let sigma = fixtures::b3_sigma(p);
    Ok(B3Row {
        p,
        x_u: eval_overlap_objective(&rho, &sigma, &fixtures::hadamard())?,
        x_1: eval_overlap_objective(&rho, &sigma, &ComplexMatrix::identity(2))?,
    })
}

/// `p = 0, 0.01, …, 1`.
pub fn b3_crossing() -> Result<Vec<B3Row>> {
    (0..=100).map(|k| b3_row(k as f64 / 100.0)).collect()
}

/// One row per random state, with the seeds the verification suite uses.
pub fn theorem_scatter(master_seed: u64, trials: usize, dims: &[(usize, usize)]) -> Result<Vec<ScatterRow>> {
    let mut rows = Vec::with_capacity(trials * dims.len());
    for (k, &(d_a, d_b)) in dims.iter().enumerate() {
        for t in 0..trials {
            let seed = derive_seed(master_seed, (k * trials + t) as u64);
            let (sr_inf, i_half) = theorem_row(seed, d_a, d_b)?;
            rows.push(ScatterRow {
                seed,
                d_a,
                d_b,
                sr_inf,
                i_half,
                residual: (sr_inf - i_half).abs(),
            });
        }
    }
    Ok(rows)
}
