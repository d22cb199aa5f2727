//! Dynamic mode decomposition with control on delay-embedded measurements.
//!
//! Column `j` of the stacked data matrix holds the measurements
//! `QX(jT), QX(jT+Δ), …, QX(jT+(N−1)Δ)` top to bottom; the shifted matrix
//! holds the same pattern started one sampling period later. The stacked
//! input matrix holds `u(jT), u(jT+T), …` — every sampling-grid input inside
//! the embedding window — which makes the linear relation between
//! consecutive stacks exact for zero-order-hold data even when `Δ > T`.

use ndarray::{concatenate, s, Array2, Axis};
use ndarray_linalg::{Eig, JobSvd, Norm, SVDDC};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// Delay-embedding configuration: stack depth `N`, stack spacing `Δ`
/// (a multiple of the sampling period) and the relative singular-value
/// truncation threshold for the regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConfig {
    pub stack_depth: usize,
    pub delta: f64,
    pub svd_tol: f64,
}

impl EmbeddingConfig {
    pub fn new(stack_depth: usize, delta: f64, svd_tol: f64) -> Result<Self> {
        if stack_depth == 0 {
            return Err(Error::Parameter("stack depth N must be >= 1".into()));
        }
        if !(delta > 0.0) {
            return Err(Error::Parameter(format!("delta = {delta} must be > 0")));
        }
        if !(svd_tol > 0.0 && svd_tol < 1.0) {
            return Err(Error::Parameter(format!("svd_tol = {svd_tol} must lie in (0, 1)")));
        }
        Ok(Self { stack_depth, delta, svd_tol })
    }

    /// `Δ/T` as an integer, validating that `Δ` is a multiple of `T`.
    pub fn stride(&self, dt: f64) -> Result<usize> {
        if !(dt > 0.0) {
            return Err(Error::Parameter(format!("sampling period {dt} must be > 0")));
        }
        let ratio = self.delta / dt;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-6 * rounded {
            return Err(Error::Parameter(format!(
                "delta = {} is not a positive multiple of the sampling period {dt}",
                self.delta
            )));
        }
        Ok(rounded as usize)
    }
}

/// The stacked regression data built from one trajectory.
#[derive(Debug, Clone)]
pub struct DataMatrices {
    /// `Nq × M` stacked measurements.
    pub zbar: Array2<f64>,
    /// `Nq × M` stacks shifted by one sampling period.
    pub zbar_prime: Array2<f64>,
    /// `N′p × M` stacked inputs, `N′ = (N−1)Δ/T + 1`.
    pub ubar: Array2<f64>,
    pub q: usize,
    pub p: usize,
    pub stack_depth: usize,
    /// `N′`: number of input samples per column.
    pub input_depth: usize,
}

impl DataMatrices {
    pub fn columns(&self) -> usize {
        self.zbar.ncols()
    }
}

/// Assemble the stacked data matrices for a trajectory.
pub fn build_data_matrices(traj: &Trajectory, cfg: &EmbeddingConfig) -> Result<DataMatrices> {
    let stride = cfg.stride(traj.dt)?;
    let n = cfg.stack_depth;
    let q = traj.q();
    let p = traj.p();
    let span = (n - 1) * stride;
    let required = span + 2;
    let k_s = traj.len();
    if k_s < required {
        return Err(Error::DataLength { required, actual: k_s });
    }
    let m_cols = k_s - span - 1;
    let input_depth = span + 1;

    let mut zbar = Array2::zeros((n * q, m_cols));
    let mut zbar_prime = Array2::zeros((n * q, m_cols));
    let mut ubar = Array2::zeros((input_depth * p, m_cols));
    for j in 0..m_cols {
        for l in 0..n {
            let src = traj.samples.row(j + l * stride);
            zbar.slice_mut(s![l * q..(l + 1) * q, j]).assign(&src);
            let src = traj.samples.row(j + 1 + l * stride);
            zbar_prime.slice_mut(s![l * q..(l + 1) * q, j]).assign(&src);
        }
        for r in 0..input_depth {
            let src = traj.inputs.row(j + r);
            ubar.slice_mut(s![r * p..(r + 1) * p, j]).assign(&src);
        }
    }
    Ok(DataMatrices {
        zbar,
        zbar_prime,
        ubar,
        q,
        p,
        stack_depth: n,
        input_depth,
    })
}

/// Result of the DMD-with-control regression and the eigendecomposition of
/// the shift operator estimate.
#[derive(Debug, Clone)]
pub struct DmdcResult {
    pub gamma: Array2<f64>,
    pub upsilon: Array2<f64>,
    /// Eigenvalues of `gamma`, sorted by (re, im).
    pub eigenvalues: Vec<Complex64>,
    /// Column `k` is the (unit-norm) eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Array2<Complex64>,
    /// `‖Z̄′ − ΓZ̄ − ΥŪ‖_F / ‖Z̄′‖_F`.
    pub residual: f64,
    pub rank_used: usize,
    pub singular_values: Vec<f64>,
    pub q: usize,
    pub stack_depth: usize,
    pub warnings: Vec<String>,
}

impl DmdcResult {
    /// Largest eigenpair residual `‖Γw − μw‖₂` over all pairs (unit-norm
    /// eigenvectors), for diagnostics against `‖Γ‖_F`.
    pub fn eigen_residual_max(&self) -> f64 {
        let gamma_c = self.gamma.mapv(|v| Complex64::new(v, 0.0));
        let mut worst = 0.0f64;
        for (k, &mu) in self.eigenvalues.iter().enumerate() {
            let w = self.eigenvectors.column(k).to_owned();
            let r = &gamma_c.dot(&w) - &w.mapv(|x| x * mu);
            let rn = r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(rn);
        }
        worst
    }

    pub fn gamma_norm(&self) -> f64 {
        self.gamma.norm_l2()
    }

    /// JSON document: eigenvalues as `[re, im]` pairs plus diagnostics and
    /// a config echo.
    pub fn to_json(&self, cfg: &EmbeddingConfig) -> serde_json::Value {
        json!({
            "eigenvalues": self.eigenvalues.iter().map(|v| vec![v.re, v.im]).collect::<Vec<_>>(),
            "residual": self.residual,
            "rank_used": self.rank_used,
            "singular_values": self.singular_values,
            "q": self.q,
            "warnings": self.warnings,
            "config": {
                "stack_depth": cfg.stack_depth,
                "delta": cfg.delta,
                "svd_tol": cfg.svd_tol,
            },
        })
    }
}

/// Least-squares estimate of `[Γ Υ]` from the truncated SVD of the stacked
/// regressor `[Z̄; Ū]`, followed by a dense eigendecomposition of `Γ`.
pub fn fit(data: &DataMatrices, cfg: &EmbeddingConfig) -> Result<DmdcResult> {
    let nq = data.zbar.nrows();
    let reg_rows = nq + data.ubar.nrows();
    let m_cols = data.columns();
    let mut warnings = Vec::new();
    if m_cols < reg_rows {
        warnings.push(format!(
            "regression is underdetermined: {m_cols} columns for {reg_rows} unknowns per row"
        ));
    }

    let regressor = concatenate(Axis(0), &[data.zbar.view(), data.ubar.view()])
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let (u_opt, sigma, vt_opt) = regressor.svddc(JobSvd::Some)?;
    let u = u_opt.ok_or_else(|| Error::Numerical("SVD returned no U".into()))?;
    let vt = vt_opt.ok_or_else(|| Error::Numerical("SVD returned no Vt".into()))?;

    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let threshold = cfg.svd_tol * sigma_max;
    let rank = sigma.iter().filter(|&&s| s > threshold && s > 0.0).count();
    if rank == 0 {
        return Err(Error::DegenerateData(
            "all singular values fall below the truncation threshold; \
             the trajectory spans a proper subspace and the regression is underdetermined"
                .into(),
        ));
    }

    // [Γ Υ] = Z̄′ V_r Σ_r⁻¹ U_rᵀ, assembled from the truncated factors.
    let v_r = vt.slice(s![..rank, ..]).t().to_owned();
    let mut projected = data.zbar_prime.dot(&v_r);
    for (j, &s_j) in sigma.iter().take(rank).enumerate() {
        projected.column_mut(j).mapv_inplace(|x| x / s_j);
    }
    let gamma_upsilon = projected.dot(&u.slice(s![.., ..rank]).t());
    let gamma = crate::linalg::dense_copy(gamma_upsilon.slice(s![.., ..nq]));
    let upsilon = crate::linalg::dense_copy(gamma_upsilon.slice(s![.., nq..]));

    let denom = data.zbar_prime.norm_l2();
    let residual = if denom == 0.0 {
        0.0
    } else {
        let misfit = &data.zbar_prime - &gamma.dot(&data.zbar) - &upsilon.dot(&data.ubar);
        misfit.norm_l2() / denom
    };

    let (eigenvalues, eigenvectors) = gamma.eig()?;
    // Sort eigenpairs by (re, im) for stable downstream artifacts.
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[a]
            .re
            .total_cmp(&eigenvalues[b].re)
            .then(eigenvalues[a].im.total_cmp(&eigenvalues[b].im))
    });
    let sorted_values: Vec<Complex64> = order.iter().map(|&k| eigenvalues[k]).collect();
    let mut sorted_vectors = Array2::zeros(eigenvectors.dim());
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.column_mut(dst).assign(&eigenvectors.column(src));
    }

    Ok(DmdcResult {
        gamma,
        upsilon,
        eigenvalues: sorted_values,
        eigenvectors: sorted_vectors,
        residual,
        rank_used: rank,
        singular_values: sigma.to_vec(),
        q: data.q,
        stack_depth: data.stack_depth,
        warnings,
    })
}

/// Deviations of `Γ` and `Υ` from the shift structure that an exact `Δ = T`
/// embedding must produce: every stack block except the newest is copied
/// verbatim from the previous stack, with no input contribution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompanionReport {
    /// Max deviation of the shift rows of `Γ` from `[0 I]`.
    pub shift_deviation: f64,
    /// Max magnitude in the corresponding rows of `Υ`.
    pub input_deviation: f64,
}

impl CompanionReport {
    pub fn max_deviation(&self) -> f64 {
        self.shift_deviation.max(self.input_deviation)
    }
}

/// Diagnostic check of the companion (shift) structure of an exact fit.
/// Never fails; returns the observed deviations.
pub fn companion_structure_check(result: &DmdcResult, q: usize) -> CompanionReport {
    let n = result.stack_depth;
    if n <= 1 {
        return CompanionReport {
            shift_deviation: 0.0,
            input_deviation: 0.0,
        };
    }
    let rows = (n - 1) * q;
    let mut shift_deviation = 0.0f64;
    for r in 0..rows {
        for c in 0..result.gamma.ncols() {
            let expected = if c == r + q { 1.0 } else { 0.0 };
            shift_deviation = shift_deviation.max((result.gamma[(r, c)] - expected).abs());
        }
    }
    let mut input_deviation = 0.0f64;
    for r in 0..rows {
        for c in 0..result.upsilon.ncols() {
            input_deviation = input_deviation.max(result.upsilon[(r, c)].abs());
        }
    }
    CompanionReport {
        shift_deviation,
        input_deviation,
    }
}
