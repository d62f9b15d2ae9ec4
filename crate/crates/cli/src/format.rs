//! JSON weight and symbol files.
//!
//! Complex entries are `[re, im]`; a bare number is read as a real entry.
//! Files written here always use the pair form.

use std::io::Write;

use eigenbc_core::szego::TrigPolySymbol;
use eigenbc_core::{BoundaryWeight, ComplexMatrix, GaussianWeight};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::report::SciFormatter;
use crate::CliError;

/// Hermiticity threshold used when pointing at an offending entry.
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        Entry::Complex([z.re, z.im])
    }
}

pub type Rows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    pub d: usize,
    pub alpha: f64,
    #[serde(rename = "A")]
    pub a: Rows,
    #[serde(rename = "B_L", default, skip_serializing_if = "Option::is_none")]
    pub b_l: Option<Rows>,
    #[serde(rename = "B_R", default, skip_serializing_if = "Option::is_none")]
    pub b_r: Option<Rows>,
    #[serde(rename = "beta_L", default, skip_serializing_if = "Option::is_none")]
    pub beta_l: Option<f64>,
    #[serde(rename = "beta_R", default, skip_serializing_if = "Option::is_none")]
    pub beta_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolFile {
    pub d: usize,
    pub order: usize,
    /// `Ψ_0, Ψ_1, …, Ψ_N`; negative indices are the adjoints.
    pub coefficients: Vec<Rows>,
}

/// A validated weight together with any boundary overrides from the file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub weight: GaussianWeight,
    pub b_l: Option<BoundaryWeight>,
    pub b_r: Option<BoundaryWeight>,
}

pub fn rows_to_matrix(name: &str, rows: &Rows, n: usize) -> Result<ComplexMatrix, CliError> {
    if rows.len() != n {
        return Err(CliError::Input(format!("{name} has {} rows, expected {n}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::Input(format!("{name}[{i}] has {} entries, expected {n}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            let z = e.value();
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(CliError::Input(format!("{name}[{i}][{j}] is not finite")));
            }
            data.push(z);
        }
    }
    Ok(ComplexMatrix::from_vec(n, n, data)?)
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

/// Names the worst non-Hermitian entry pair, if any.
fn check_hermitian(name: &str, m: &ComplexMatrix) -> Result<(), CliError> {
    let n = m.rows();
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in i..n {
            let gap = (m[(i, j)] - m[(j, i)].conj()).norm();
            if gap > worst.0 {
                worst = (gap, i, j);
            }
        }
    }
    let (gap, i, j) = worst;
    if gap > HERMITIAN_TOL * (1.0 + m.norm()) {
        return Err(CliError::Input(format!(
            "{name} is not Hermitian: {name}[{i}][{j}] = {} but conj({name}[{j}][{i}]) = {}",
            m[(i, j)],
            m[(j, i)].conj()
        )));
    }
    Ok(())
}

fn boundary(name: &str, rows: &Option<Rows>, beta: Option<f64>, d: usize) -> Result<Option<BoundaryWeight>, CliError> {
    let Some(rows) = rows else {
        if beta.is_some() {
            return Err(CliError::Input(format!("beta given without {name}")));
        }
        return Ok(None);
    };
    let b = rows_to_matrix(name, rows, d)?;
    check_hermitian(name, &b)?;
    Ok(Some(BoundaryWeight::new(beta.unwrap_or(1.0), b)?))
}

impl WeightFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed weight file: {e}")))
    }

    pub fn from_weight(w: &GaussianWeight) -> Self {
        WeightFile {
            d: w.d(),
            alpha: w.alpha(),
            a: matrix_to_rows(w.matrix()),
            b_l: None,
            b_r: None,
            beta_l: None,
            beta_r: None,
        }
    }

    pub fn with_boundaries(mut self, b_l: &BoundaryWeight, b_r: &BoundaryWeight) -> Self {
        self.b_l = Some(matrix_to_rows(b_l.matrix()));
        self.b_r = Some(matrix_to_rows(b_r.matrix()));
        self.beta_l = Some(b_l.beta());
        self.beta_r = Some(b_r.beta());
        self
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        if self.d == 0 {
            return Err(CliError::Input("d must be positive".into()));
        }
        let a = rows_to_matrix("A", &self.a, 2 * self.d)?;
        check_hermitian("A", &a)?;
        let weight = GaussianWeight::new(self.alpha, a)?;
        Ok(Problem {
            weight,
            b_l: boundary("B_L", &self.b_l, self.beta_l, self.d)?,
            b_r: boundary("B_R", &self.b_r, self.beta_r, self.d)?,
        })
    }

    /// Serialized with 17 significant digits, so it re-parses bit for bit.
    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

impl SymbolFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed symbol file: {e}")))
    }

    pub fn symbol(&self) -> Result<TrigPolySymbol, CliError> {
        if self.coefficients.len() != self.order + 1 {
            return Err(CliError::Input(format!(
                "order {} needs {} coefficients, got {}",
                self.order,
                self.order + 1,
                self.coefficients.len()
            )));
        }
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, rows)| rows_to_matrix(&format!("coefficients[{i}]"), rows, self.d))
            .collect::<Result<Vec<_>, _>>()?;
        check_hermitian("coefficients[0]", &coeffs[0])?;
        Ok(TrigPolySymbol::new(self.d, coeffs)?)
    }
}

pub(crate) fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.write_all(b"\n").expect("in-memory write");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
