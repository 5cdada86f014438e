//! Regression problems in the standardized form every solver expects.
//!
//! Columns of the design are centered and scaled so that `sum_i x_ij^2 = n`,
//! and the response is centered. The per-column means and multipliers are kept
//! so coefficients can be mapped back to the original measurement scale.

use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Result, SlogError};

/// Metadata needed to undo [`standardize`].
///
/// A standardized entry is `(x_ij - column_means[j]) * column_scales[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub column_means: Array1<f64>,
    pub column_scales: Array1<f64>,
    pub response_mean: f64,
}

impl Standardization {
    /// Maps standardized coefficients to `(intercept, slopes)` on the raw scale.
    pub fn original_coefficients(&self, b: ArrayView1<f64>) -> (f64, Array1<f64>) {
        let slopes = &b * &self.column_scales;
        let intercept = self.response_mean - slopes.dot(&self.column_means);
        (intercept, slopes)
    }

    /// Fitted value on the raw response scale for a raw design row.
    pub fn predict_original(&self, b: ArrayView1<f64>, raw_row: ArrayView1<f64>) -> f64 {
        let (intercept, slopes) = self.original_coefficients(b);
        intercept + slopes.dot(&raw_row)
    }
}

#[derive(Debug, Clone)]
pub struct RegressionProblem {
    design: Array2<f64>,
    response: Array1<f64>,
    standardization: Standardization,
    xty: Array1<f64>,
    gram: OnceLock<Array2<f64>>,
}

impl RegressionProblem {
    fn from_parts(design: Array2<f64>, response: Array1<f64>, standardization: Standardization) -> Self {
        let xty = design.t().dot(&response);
        Self {
            design,
            response,
            standardization,
            xty,
            gram: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    pub fn p(&self) -> usize {
        self.design.ncols()
    }

    pub fn design(&self) -> ArrayView2<'_, f64> {
        self.design.view()
    }

    pub fn response(&self) -> ArrayView1<'_, f64> {
        self.response.view()
    }

    pub fn standardization(&self) -> &Standardization {
        &self.standardization
    }

    /// `X^T y`, computed once at construction.
    pub fn xty(&self) -> ArrayView1<'_, f64> {
        self.xty.view()
    }

    /// `X^T X`, computed lazily on first use.
    pub fn gram(&self) -> &Array2<f64> {
        self.gram.get_or_init(|| self.design.t().dot(&self.design))
    }

    pub fn residual(&self, b: ArrayView1<f64>) -> Array1<f64> {
        &self.response - &self.design.dot(&b)
    }

    /// Design and response mapped back to the raw scale (up to rounding).
    pub fn original_data(&self) -> (Array2<f64>, Array1<f64>) {
        let st = &self.standardization;
        let design = &self.design / &st.column_scales + &st.column_means;
        let response = self.response.mapv(|v| v + st.response_mean);
        (design, response)
    }

    /// Sub-problem on a subset of the columns, sharing the response.
    ///
    /// No re-standardization is applied: the selected columns already satisfy
    /// the scaling invariants.
    pub fn restrict_columns(&self, columns: &[usize]) -> Self {
        let design = self.design.select(Axis(1), columns);
        let st = &self.standardization;
        let standardization = Standardization {
            column_means: st.column_means.select(Axis(0), columns),
            column_scales: st.column_scales.select(Axis(0), columns),
            response_mean: st.response_mean,
        };
        Self::from_parts(design, self.response.clone(), standardization)
    }
}

/// Centers and scales the design so every column has `sum x^2 = n`, and centers the response.
pub fn standardize(raw_design: ArrayView2<f64>, raw_response: ArrayView1<f64>) -> Result<RegressionProblem> {
    let (n, p) = raw_design.dim();
    if raw_response.len() != n {
        return Err(SlogError::DimensionMismatch(format!(
            "response has {} entries but design has {n} rows",
            raw_response.len()
        )));
    }
    if n < 2 || p < 1 {
        return Err(SlogError::DimensionMismatch(format!(
            "need at least 2 rows and 1 column, got {n}x{p}"
        )));
    }
    if raw_design.iter().chain(raw_response.iter()).any(|v| !v.is_finite()) {
        return Err(SlogError::DimensionMismatch("non-finite entry in data".into()));
    }

    let nf = n as f64;
    let mut design = raw_design.to_owned();
    let mut means = Array1::zeros(p);
    let mut scales = Array1::zeros(p);
    for (j, mut col) in design.axis_iter_mut(Axis(1)).enumerate() {
        let mean = col.sum() / nf;
        let peak = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        col.mapv_inplace(|v| v - mean);
        let ss: f64 = col.iter().map(|v| v * v).sum();
        // Anything at the rounding level of the raw values counts as constant.
        let floor = nf * (16.0 * f64::EPSILON * peak).powi(2);
        if ss <= floor {
            return Err(SlogError::ConstantColumn(j));
        }
        let scale = (nf / ss).sqrt();
        col.mapv_inplace(|v| v * scale);
        means[j] = mean;
        scales[j] = scale;
    }

    let response_mean = raw_response.sum() / nf;
    let response = raw_response.mapv(|v| v - response_mean);

    Ok(RegressionProblem::from_parts(
        design,
        response,
        Standardization {
            column_means: means,
            column_scales: scales,
            response_mean,
        },
    ))
}
