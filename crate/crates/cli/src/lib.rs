//! Support code for the `refent` binary: the state file format, number
//! formatting and tolerance flags.

use std::path::Path;

use num_complex::Complex64;
use refent::{BipartiteState, ComplexMatrix, ToleranceConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Measure(#[from] refent::Error),
    #[error("{0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// On-disk state: factor dimensions and the row-major matrix over the
/// composite index `a·d_b + b`, each entry an `[re, im]` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d_a: usize,
    pub d_b: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_matrix(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Self {
        let n = m.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self { d_a, d_b, matrix }
    }

    pub fn from_state(s: &BipartiteState) -> Self {
        Self::from_matrix(s.rho(), s.d_a(), s.d_b())
    }

    /// The matrix exactly as stored, without validation.
    pub fn to_matrix(&self) -> std::result::Result<ComplexMatrix, String> {
        let n = self.d_a * self.d_b;
        if n == 0 {
            return Err("d_a and d_b must be positive".into());
        }
        if self.matrix.len() != n {
            return Err(format!("expected {n} rows, found {}", self.matrix.len()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(format!("row {i}: expected {n} entries, found {}", row.len()));
            }
            entries.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        ComplexMatrix::from_row_major(n, &entries).map_err(|e| e.to_string())
    }

    pub fn parse(text: &str, path: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: shown.clone(),
            source,
        })?;
        Self::parse(&text, &shown)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("state file serializes");
        std::fs::write(path, text + "\n").map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Reads and validates a state.
    pub fn load(path: &Path, cfg: &ToleranceConfig) -> CliResult<BipartiteState> {
        let file = Self::read(path)?;
        let m = file.to_matrix().map_err(|message| CliError::Format {
            path: path.display().to_string(),
            message,
        })?;
        Ok(refent::states::validate_density(&m, file.d_a, file.d_b, cfg)?)
    }
}

/// `x` with exactly `digits` significant digits, in plain notation when
/// the exponent is moderate.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // Rounding can carry into a new leading digit (9.99… → 10.0…).
    let s = if s.trim_start_matches('-').starts_with("10") && decimals > 0 && exp >= 0 {
        format!("{:.*}", decimals - 1, x)
    } else {
        s
    };
    s
}

/// Rewrites `--tol.NAME=VALUE` and `--tol.NAME VALUE` into `--tol NAME=VALUE`
/// so the argument parser sees a single repeatable option.
pub fn normalize_tol_flags<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.strip_prefix("--tol.") {
            Some(rest) if rest.contains('=') => {
                out.push("--tol".into());
                out.push(rest.to_string());
            }
            Some(rest) => {
                out.push("--tol".into());
                let value = it.next().unwrap_or_default();
                out.push(format!("{rest}={value}"));
            }
            None => out.push(a),
        }
    }
    out
}

/// Applies `NAME=VALUE` overrides to the default tolerances.
pub fn tolerance_config(overrides: &[String]) -> CliResult<ToleranceConfig> {
    let mut cfg = ToleranceConfig::default();
    for o in overrides {
        let (name, value) = o
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("tolerance override {o:?} is not NAME=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("tolerance {name}: {value:?} is not a number")))?;
        match name {
            "hermit_tol" => cfg.hermit_tol = value,
            "psd_clip_tol" => cfg.psd_clip_tol = value,
            "support_rel_tol" => cfg.support_rel_tol = value,
            "eig_residual_tol" => cfg.eig_residual_tol = value,
            other => return Err(CliError::Usage(format!("unknown tolerance {other:?}"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `2x3` → `(2, 3)`.
pub fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("dimensions {s:?} are not of the form AxB"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}
