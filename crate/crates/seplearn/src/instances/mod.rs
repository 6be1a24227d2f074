//! MILP data model, synthetic instance generators, instance file I/O, and a
//! brute-force optimum oracle for small instances.
//!
//! All instances are normalized to minimization with `<=`/`=`/`>=` rows;
//! maximize-form benchmark classes negate their objectives on construction.

mod brute;
mod generators;

pub use brute::{brute_force_opt, BruteForceOutcome, DEFAULT_VAR_LIMIT};
pub use generators::{
    generate_bin_packing, generate_comb_auction, generate_indep_set, generate_max_cut,
    generate_packing, BinPackingParams, CombAuctionParams, IndepSetParams, MaxCutParams,
    PackingParams,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// File format version written into every instance JSON document.
pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// Integrality tolerance used when checking assignments against the mask.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("validation error: {0}")]
    Invalid(String),
    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),
}

/// Sense of a linear constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowSense::Le => write!(f, "<="),
            RowSense::Eq => write!(f, "="),
            RowSense::Ge => write!(f, ">="),
        }
    }
}

/// One sparse constraint row `coeffs . x (sense) rhs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseRow {
    /// (column, coefficient) pairs, strictly increasing column index.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

impl SparseRow {
    pub fn new(mut coeffs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) -> Self {
        coeffs.sort_by_key(|&(j, _)| j);
        SparseRow { coeffs, sense, rhs }
    }

    /// Row activity at a point.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Whether the point satisfies the row within `tol`.
    pub fn satisfied(&self, x: &[f64], tol: f64) -> bool {
        let act = self.activity(x);
        match self.sense {
            RowSense::Le => act <= self.rhs + tol,
            RowSense::Ge => act >= self.rhs - tol,
            RowSense::Eq => (act - self.rhs).abs() <= tol,
        }
    }
}

/// Benchmark class of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceClass {
    Packing,
    BinPacking,
    MaxCut,
    CombAuction,
    IndepSet,
    Custom,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 5] = [
        InstanceClass::Packing,
        InstanceClass::BinPacking,
        InstanceClass::MaxCut,
        InstanceClass::CombAuction,
        InstanceClass::IndepSet,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceClass::Packing => "packing",
            InstanceClass::BinPacking => "bin_packing",
            InstanceClass::MaxCut => "max_cut",
            InstanceClass::CombAuction => "comb_auction",
            InstanceClass::IndepSet => "indep_set",
            InstanceClass::Custom => "custom",
        }
    }
}

impl std::str::FromStr for InstanceClass {
    type Err = InstanceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "packing" => Ok(InstanceClass::Packing),
            "bin_packing" => Ok(InstanceClass::BinPacking),
            "max_cut" => Ok(InstanceClass::MaxCut),
            "comb_auction" => Ok(InstanceClass::CombAuction),
            "indep_set" => Ok(InstanceClass::IndepSet),
            "custom" => Ok(InstanceClass::Custom),
            other => Err(InstanceError::Invalid(format!(
                "unknown instance class '{other}'"
            ))),
        }
    }
}

/// A sparse minimization-form MILP.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpInstance {
    pub format_version: u32,
    pub name: String,
    pub num_vars: usize,
    /// Dense objective (minimization).
    pub objective: Vec<f64>,
    pub rows: Vec<SparseRow>,
    /// Per-variable lower bounds; `-inf` allowed in principle but generated
    /// instances always carry finite boxes.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Integrality mask; `integrality[j]` means `x_j` must be integral.
    pub integrality: Vec<bool>,
    pub class_tag: InstanceClass,
    /// Generator provenance: distributions and drawn parameters, for the
    /// record. Not interpreted by the solver.
    #[serde(default)]
    pub gen_params: BTreeMap<String, String>,
}

/// A (candidate) solution with its minimization objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<f64>,
    pub objective: f64,
}

impl Assignment {
    /// Whether integrality holds on the instance's mask within [`INT_TOL`].
    pub fn is_integral_on(&self, inst: &MilpInstance) -> bool {
        self.values
            .iter()
            .zip(&inst.integrality)
            .all(|(&v, &is_int)| !is_int || (v - v.round()).abs() <= INT_TOL)
    }
}

impl MilpInstance {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_integer_vars(&self) -> usize {
        self.integrality.iter().filter(|&&b| b).count()
    }

    /// Structural validation: finite coefficients, consistent lengths,
    /// lb <= ub everywhere, in-range column indices.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.num_vars;
        if self.objective.len() != n
            || self.lower.len() != n
            || self.upper.len() != n
            || self.integrality.len() != n
        {
            return Err(InstanceError::Invalid(format!(
                "field lengths disagree with num_vars={n}"
            )));
        }
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(InstanceError::Invalid(format!(
                    "objective[{j}] is not finite"
                )));
            }
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(InstanceError::Invalid(format!(
                    "variable {j}: lb {} > ub {}",
                    self.lower[j], self.upper[j]
                )));
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() {
                return Err(InstanceError::Invalid(format!("variable {j}: NaN bound")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(InstanceError::Invalid(format!("row {i}: rhs not finite")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(InstanceError::Invalid(format!(
                        "row {i}: column index {j} out of range"
                    )));
                }
                if !a.is_finite() {
                    return Err(InstanceError::Invalid(format!(
                        "row {i}, column {j}: coefficient not finite"
                    )));
                }
            }
            for w in row.coeffs.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(InstanceError::Invalid(format!(
                        "row {i}: duplicate or unsorted column indices"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Boundedness check used by the generators: every variable must live in
    /// a finite box (the branch-and-cut engine assumes bounded LPs).
    pub fn has_finite_bounds(&self) -> bool {
        (0..self.num_vars).all(|j| self.lower[j].is_finite() && self.upper[j].is_finite())
    }

    /// Whether a point is feasible (rows + bounds + integrality) within `tol`.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        for j in 0..self.num_vars {
            if x[j] < self.lower[j] - tol || x[j] > self.upper[j] + tol {
                return false;
            }
            if self.integrality[j] && (x[j] - x[j].round()).abs() > INT_TOL {
                return false;
            }
        }
        self.rows.iter().all(|r| r.satisfied(x, tol))
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Write an instance as a JSON document. Coefficients serialize via the
/// shortest round-trip decimal form, so `read(write(x)) == x` exactly.
pub fn write_instance(inst: &MilpInstance, path: &Path) -> Result<(), InstanceError> {
    let body = serde_json::to_string_pretty(inst).map_err(|e| InstanceError::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    std::fs::write(path, body).map_err(|e| InstanceError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Read and validate an instance JSON document.
pub fn read_instance(path: &Path) -> Result<MilpInstance, InstanceError> {
    let body = std::fs::read_to_string(path).map_err(|e| InstanceError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let inst: MilpInstance = serde_json::from_str(&body).map_err(|e| InstanceError::Parse {
        path: path.display().to_string(),
        detail: format!("line {}, column {}: {}", e.line(), e.column(), e),
    })?;
    if inst.format_version != INSTANCE_FORMAT_VERSION {
        return Err(InstanceError::Parse {
            path: path.display().to_string(),
            detail: format!(
                "unsupported format_version {} (expected {})",
                inst.format_version, INSTANCE_FORMAT_VERSION
            ),
        });
    }
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_instance() -> MilpInstance {
        MilpInstance {
            format_version: INSTANCE_FORMAT_VERSION,
            name: "tiny".into(),
            num_vars: 2,
            objective: vec![-3.0, -2.0],
            rows: vec![SparseRow::new(vec![(0, 2.0), (1, 1.0)], RowSense::Le, 2.0)],
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
            integrality: vec![true, true],
            class_tag: InstanceClass::Custom,
            gen_params: BTreeMap::new(),
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let inst = generate_packing(7, 5, 42);
        write_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(serde_json::to_string(&inst).unwrap(), serde_json::to_string(&back).unwrap());
    }

    #[test]
    fn truncated_file_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let inst = tiny_instance();
        let body = serde_json::to_string(&inst).unwrap();
        std::fs::write(&path, &body[..body.len() / 2]).unwrap();
        match read_instance(&path) {
            Err(InstanceError::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn inverted_bounds_is_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad_bounds.json");
        let mut inst = tiny_instance();
        inst.lower[0] = 2.0; // lb > ub
        std::fs::write(&path, serde_json::to_string(&inst).unwrap()).unwrap();
        match read_instance(&path) {
            Err(InstanceError::Invalid(msg)) => assert!(msg.contains("lb")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_checker_agrees_with_rows() {
        let inst = tiny_instance();
        assert!(inst.is_feasible(&[1.0, 0.0], 1e-9));
        assert!(!inst.is_feasible(&[1.0, 1.0], 1e-9)); // 2+1 > 2
        assert!(!inst.is_feasible(&[0.5, 0.0], 1e-9)); // fractional
    }
}
