//! From the identified shift-operator spectrum back to the network:
//! continuous-time eigenvalues `μ = log(μ̃)/T`, Laplacian eigenvalues
//! `λ = 1 / (Cᵀ(A−μI)⁻¹B)` and Laplacian eigenvector component ratios.

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigVals, Solve};
use num_complex::Complex64;

use crate::dmdc::DmdcResult;
use crate::dynamics::{MeasurementPlan, UnitDynamics};
use crate::error::{Error, Result};

/// Relative distance below which `μ` counts as an eigenvalue of `A`
/// (the spectral map has a pole there).
const UNIT_POLE_TOL: f64 = 1e-10;

/// Denominator components smaller than this fraction of `‖w̃‖_∞` make a
/// ratio replica unreliable.
const DENOM_TOL: f64 = 1e-6;

/// One identified eigenvalue of the network system.
#[derive(Debug, Clone, Copy)]
pub struct SystemEigen {
    /// Index of the originating eigenpair of `Γ`.
    pub gamma_index: usize,
    /// Eigenvalue of `Γ` (an estimate of `e^{μT}`).
    pub mu_tilde: Complex64,
    /// Principal-branch continuous-time eigenvalue `log(μ̃)/T`.
    pub mu: Complex64,
    /// Near-zero `μ̃`: an over-embedding artifact, excluded downstream.
    pub spurious: bool,
}

/// Map the eigenvalues of `Γ` to continuous time. Eigenvalues with
/// `|μ̃| < zero_tol` are flagged spurious instead of being mapped.
pub fn recover_mu(result: &DmdcResult, period: f64, zero_tol: f64) -> Result<Vec<SystemEigen>> {
    recover_mu_values(&result.eigenvalues, period, zero_tol)
}

pub fn recover_mu_values(
    mu_tildes: &[Complex64],
    period: f64,
    zero_tol: f64,
) -> Result<Vec<SystemEigen>> {
    if !(period > 0.0) {
        return Err(Error::Parameter(format!("period {period} must be > 0")));
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::Parameter(format!("zero_tol {zero_tol} must be >= 0")));
    }
    Ok(mu_tildes
        .iter()
        .enumerate()
        .map(|(gamma_index, &mu_tilde)| {
            let spurious = mu_tilde.norm() < zero_tol;
            let mu = if mu_tilde.norm() == 0.0 {
                Complex64::new(f64::NEG_INFINITY, 0.0)
            } else {
                mu_tilde.ln() / period
            };
            SystemEigen {
                gamma_index,
                mu_tilde,
                mu,
                spurious,
            }
        })
        .collect())
}

/// Laplacian eigenvalue for a system eigenvalue `μ ∉ eig(A)`:
/// `λ = 1 / (Cᵀ(A−μI)⁻¹B)`.
pub fn mu_to_lambda(mu: Complex64, unit: &UnitDynamics) -> Result<Complex64> {
    let a_eigs = unit_eigenvalues(unit)?;
    if is_unit_pole(mu, &a_eigs) {
        return Err(Error::ExcludedEigenvalue { mu });
    }
    let transfer = transfer_value(mu, unit)?;
    if !transfer.re.is_finite() || !transfer.im.is_finite() || transfer.norm() < 1e-150 {
        return Err(Error::PoleAtInfinity { mu });
    }
    let lambda = transfer.inv();
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::PoleAtInfinity { mu });
    }
    Ok(lambda)
}

fn unit_eigenvalues(unit: &UnitDynamics) -> Result<Vec<Complex64>> {
    Ok(unit.a().eigvals()?.to_vec())
}

fn is_unit_pole(mu: Complex64, a_eigs: &[Complex64]) -> bool {
    a_eigs
        .iter()
        .any(|&alpha| (mu - alpha).norm() <= UNIT_POLE_TOL * (1.0 + alpha.norm()))
}

/// `Cᵀ(A−μI)⁻¹B` by one complex solve.
fn transfer_value(mu: Complex64, unit: &UnitDynamics) -> Result<Complex64> {
    let m = unit.state_dim();
    let mut shifted: Array2<Complex64> = unit.a().mapv(|v| Complex64::new(v, 0.0));
    for i in 0..m {
        shifted[(i, i)] -= mu;
    }
    let b: Array1<Complex64> = unit.b().mapv(|v| Complex64::new(v, 0.0));
    let y = shifted.solve(&b)?;
    Ok(unit
        .c()
        .iter()
        .zip(y.iter())
        .map(|(&c, &yi)| yi * c)
        .sum())
}

/// A deduplicated Laplacian eigenvalue with the system eigenvalues that
/// produced it.
#[derive(Debug, Clone)]
pub struct EigenvalueGroup {
    pub lambda: Complex64,
    /// `(gamma_index, mu)` of every member.
    pub members: Vec<(usize, Complex64)>,
}

/// A mapping failure kept as a diagnostic instead of aborting the pipeline.
#[derive(Debug, Clone)]
pub struct MappingFailure {
    pub gamma_index: usize,
    pub mu: Complex64,
    pub reason: String,
}

/// The recovered Laplacian spectrum.
#[derive(Debug, Clone)]
pub struct LaplacianEstimate {
    /// Deduplicated eigenvalues, sorted by (re, im).
    pub lambdas: Vec<Complex64>,
    /// Group `k` backs `lambdas[k]`.
    pub groups: Vec<EigenvalueGroup>,
    /// Every successfully mapped eigenvalue before deduplication (the
    /// m-fold redundant multiset; its moments equal the spectral moments).
    pub raw_lambdas: Vec<(usize, Complex64)>,
    pub failures: Vec<MappingFailure>,
}

impl LaplacianEstimate {
    /// Raw mapped eigenvalues as a plain list.
    pub fn raw_values(&self) -> Vec<Complex64> {
        self.raw_lambdas.iter().map(|&(_, l)| l).collect()
    }

    /// CSV document `re,im,multiplicity,source_mu_list`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,multiplicity,source_mu_list\n");
        for group in &self.groups {
            let mus = group
                .members
                .iter()
                .map(|(_, mu)| format!("{:.16e}{:+.16e}i", mu.re, mu.im))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{}\n",
                group.lambda.re,
                group.lambda.im,
                group.members.len(),
                mus
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambdas": self.lambdas.iter().map(|l| vec![l.re, l.im]).collect::<Vec<_>>(),
            "groups": self.groups.iter().map(|g| serde_json::json!({
                "lambda": [g.lambda.re, g.lambda.im],
                "multiplicity": g.members.len(),
                "source_mu": g.members.iter().map(|(idx, mu)| serde_json::json!({
                    "gamma_index": idx,
                    "mu": [mu.re, mu.im],
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "raw_lambdas": self.raw_lambdas.iter().map(|(idx, l)| serde_json::json!({
                "gamma_index": idx,
                "lambda": [l.re, l.im],
            })).collect::<Vec<_>>(),
            "failures": self.failures.iter().map(|f| serde_json::json!({
                "gamma_index": f.gamma_index,
                "mu": [f.mu.re, f.mu.im],
                "reason": f.reason,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Map every non-spurious system eigenvalue to a Laplacian eigenvalue,
/// deduplicate by relative distance and enforce conjugate symmetry by
/// averaging conjugate pairs.
///
/// System eigenvalues that numerically coincide with eigenvalues of `A` are
/// assigned `λ = 0`: the transfer value has a pole there, which is exactly
/// the image of the zero Laplacian eigenvalue in the limit.
pub fn recover_laplacian(
    eigens: &[SystemEigen],
    unit: &UnitDynamics,
    dedup_tol: f64,
) -> Result<LaplacianEstimate> {
    if !(dedup_tol > 0.0) {
        return Err(Error::Parameter(format!("dedup_tol {dedup_tol} must be > 0")));
    }
    let active: Vec<&SystemEigen> = eigens.iter().filter(|e| !e.spurious).collect();
    if active.is_empty() {
        return Err(Error::Parameter(
            "no non-spurious system eigenvalues to map".into(),
        ));
    }

    let mut raw: Vec<(usize, Complex64)> = Vec::new();
    let mut failures = Vec::new();
    for eig in active {
        match mu_to_lambda(eig.mu, unit) {
            Ok(lambda) => raw.push((eig.gamma_index, lambda)),
            Err(Error::ExcludedEigenvalue { .. }) => {
                raw.push((eig.gamma_index, Complex64::new(0.0, 0.0)));
            }
            Err(err) => failures.push(MappingFailure {
                gamma_index: eig.gamma_index,
                mu: eig.mu,
                reason: err.to_string(),
            }),
        }
    }

    // Greedy dedup: nearest existing cluster within the relative tolerance.
    let mut sorted = raw.clone();
    sorted.sort_by(|a, b| a.1.re.total_cmp(&b.1.re).then(a.1.im.total_cmp(&b.1.im)));
    let mut centers: Vec<Complex64> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for &(idx, lambda) in &sorted {
        let mut best: Option<(usize, f64)> = None;
        for (c, &center) in centers.iter().enumerate() {
            let d = (lambda - center).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((c, d));
            }
        }
        match best {
            Some((c, d)) if d <= dedup_tol * (1.0 + centers[c].norm()) => {
                members[c].push(idx);
                // Running mean keeps the center representative.
                let k = members[c].len() as f64;
                centers[c] = centers[c] + (lambda - centers[c]) / k;
            }
            _ => {
                centers.push(lambda);
                members.push(vec![idx]);
            }
        }
    }

    // Conjugate symmetry: average each cluster with the nearest cluster to
    // its conjugate (possibly itself, which projects near-real values onto
    // the real axis).
    let ncl = centers.len();
    let mut paired = vec![false; ncl];
    for i in 0..ncl {
        if paired[i] {
            continue;
        }
        let target = centers[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for (j, &cj) in centers.iter().enumerate() {
            if paired[j] && j != i {
                continue;
            }
            let d = (cj - target).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d <= dedup_tol * (1.0 + centers[i].norm()) {
                let avg = (centers[i] + centers[j].conj()) / 2.0;
                centers[i] = avg;
                centers[j] = avg.conj();
                paired[i] = true;
                paired[j] = true;
            }
        }
    }

    let mu_of: std::collections::BTreeMap<usize, Complex64> = eigens
        .iter()
        .map(|e| (e.gamma_index, e.mu))
        .collect();
    let mut groups: Vec<EigenvalueGroup> = centers
        .into_iter()
        .zip(members)
        .map(|(lambda, idxs)| EigenvalueGroup {
            lambda,
            members: idxs.into_iter().map(|i| (i, mu_of[&i])).collect(),
        })
        .collect();
    groups.sort_by(|a, b| {
        a.lambda
            .re
            .total_cmp(&b.lambda.re)
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    let lambdas = groups.iter().map(|g| g.lambda).collect();
    Ok(LaplacianEstimate {
        lambdas,
        groups,
        raw_lambdas: raw,
        failures,
    })
}

/// One entry of the eigenvector ratio table: the estimated
/// `[Q₁v]_i / [Q₁v]_j` for one eigenvector of `Γ`.
#[derive(Debug, Clone)]
pub struct RatioEntry {
    pub eig_index: usize,
    pub i: usize,
    pub j: usize,
    /// Median over index replicas; `None` when every replica had a
    /// near-zero denominator.
    pub ratio: Option<Complex64>,
    /// Max deviation of any replica from the median.
    pub spread: f64,
    pub replicas: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RatioTable {
    pub entries: Vec<RatioEntry>,
}

impl RatioTable {
    /// Entry for a given eigenvector index and measured-node pair.
    pub fn get(&self, eig_index: usize, i: usize, j: usize) -> Option<&RatioEntry> {
        self.entries
            .iter()
            .find(|e| e.eig_index == eig_index && e.i == i && e.j == j)
    }

    /// CSV document `eig_index,i,j,ratio_re,ratio_im,spread`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eig_index,i,j,ratio_re,ratio_im,spread\n");
        for e in &self.entries {
            let (re, im) = e.ratio.map_or((f64::NAN, f64::NAN), |r| (r.re, r.im));
            out.push_str(&format!(
                "{},{},{},{re:.16e},{im:.16e},{:.16e}\n",
                e.eig_index, e.i, e.j, e.spread
            ));
        }
        out
    }
}

fn median_of(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Ratios of Laplacian eigenvector components for measured-node pairs.
///
/// Requires a factored plan `Q = Q₁ ⊗ Q₂` (node-major layout). Pair
/// indices are 0-based positions in the plan's node list. For each
/// eigenvector of `Γ`, the ratio is evaluated at every admissible index
/// replica `(l₁, l₂)` — stack level and measured state — and the
/// component-wise median is returned together with the spread.
pub fn eigenvector_ratios(
    result: &DmdcResult,
    plan: &MeasurementPlan,
    pairs: &[(usize, usize)],
) -> Result<RatioTable> {
    let (nodes, states) = plan
        .factored_form()
        .ok_or_else(|| Error::Parameter("eigenvector ratios need a factored plan Q1 x Q2".into()))?;
    let q1 = nodes.len();
    let q2 = states.len();
    let q = q1 * q2;
    if result.q != q {
        return Err(Error::Parameter(format!(
            "plan selects {q} signals but the fit used {}",
            result.q
        )));
    }
    let n_stack = result.stack_depth;
    for &(i, j) in pairs {
        if i >= q1 || j >= q1 {
            return Err(Error::Parameter(format!(
                "pair ({i}, {j}) out of range for q1 = {q1}"
            )));
        }
    }

    let mut entries = Vec::new();
    for eig_index in 0..result.eigenvalues.len() {
        let w = result.eigenvectors.column(eig_index);
        let w_max = w.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for &(i, j) in pairs {
            let mut ratios: Vec<Complex64> = Vec::with_capacity(n_stack * q2);
            for l1 in 0..n_stack {
                for l2 in 0..q2 {
                    let num = w[l1 * q + i * q2 + l2];
                    let den = w[l1 * q + j * q2 + l2];
                    if den.norm() >= DENOM_TOL * w_max {
                        ratios.push(num / den);
                    }
                }
            }
            if ratios.is_empty() {
                entries.push(RatioEntry {
                    eig_index,
                    i,
                    j,
                    ratio: None,
                    spread: f64::NAN,
                    replicas: 0,
                });
                continue;
            }
            let median = Complex64::new(
                median_of(ratios.iter().map(|r| r.re).collect()),
                median_of(ratios.iter().map(|r| r.im).collect()),
            );
            let spread = ratios
                .iter()
                .map(|r| (r - median).norm())
                .fold(0.0, f64::max);
            entries.push(RatioEntry {
                eig_index,
                i,
                j,
                ratio: Some(median),
                spread,
                replicas: ratios.len(),
            });
        }
    }
    Ok(RatioTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmdc::{build_data_matrices, fit, EmbeddingConfig};
    use crate::dynamics::{assemble, random_initial_state, random_sinusoids, simulate};
    use crate::graph::{exact_spectrum, generate_erdos_renyi, laplacian, WeightedDigraph};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn example_unit() -> UnitDynamics {
        UnitDynamics::new(
            array![[-1.0, -2.0], [1.0, -1.0]],
            array![1.0, 2.0],
            array![1.0, 1.0],
        )
        .unwrap()
    }

    fn consensus_unit() -> UnitDynamics {
        UnitDynamics::new(array![[-1.0]], array![0.1], array![1.0]).unwrap()
    }

    #[test]
    fn recover_mu_identity() {
        let eigens = recover_mu_values(&[Complex64::new(1.0, 0.0)], 0.1, 1e-6).unwrap();
        assert_abs_diff_eq!(eigens[0].mu.norm(), 0.0, epsilon = 1e-15);
        assert!(!eigens[0].spurious);
    }

    #[test]
    fn recover_mu_round_trip() {
        let mu = Complex64::new(-1.0, 2.0);
        let t = 0.01;
        let eigens = recover_mu_values(&[(mu * t).exp()], t, 1e-6).unwrap();
        assert!((eigens[0].mu - mu).norm() < 1e-10);
    }

    #[test]
    fn recover_mu_flags_exact_zero() {
        let eigens = recover_mu_values(&[Complex64::new(0.0, 0.0)], 0.1, 1e-6).unwrap();
        assert!(eigens[0].spurious);
    }

    #[test]
    fn over_embedding_yields_expected_spurious_count() {
        // n = 3, m = 2 (nm = 6) fitted with Nq = 8: exactly 2 spurious.
        let unit = example_unit();
        let g = generate_erdos_renyi(3, 0.8, (0.2, 1.5), true, 6).unwrap();
        let sys = assemble(&unit, &g, 2, &[(0, 1, 0), (2, 1, 1)]).unwrap();
        let plan = crate::dynamics::MeasurementPlan::factored(vec![0, 1], vec![0], 2).unwrap();
        let signal = random_sinusoids(2, (0.5, 1.0), (0.2, 1.0), 40).unwrap();
        let t = 0.05;
        let traj = simulate(&sys, &signal, &random_initial_state(6, 41), t, 6.0, &plan).unwrap();
        let cfg = EmbeddingConfig::new(4, t, 1e-10).unwrap();
        let result = fit(&build_data_matrices(&traj, &cfg).unwrap(), &cfg).unwrap();
        let eigens = recover_mu(&result, t, 1e-6).unwrap();
        let spurious = eigens.iter().filter(|e| e.spurious).count();
        assert_eq!(spurious, 2, "eigenvalues: {:?}", result.eigenvalues);
        // The genuine part of the spectrum is intact.
        let expected: Vec<Complex64> = sys
            .exact_eigenvalues()
            .unwrap()
            .iter()
            .map(|mu| (mu * t).exp())
            .collect();
        let genuine: Vec<Complex64> = eigens
            .iter()
            .filter(|e| !e.spurious)
            .map(|e| e.mu_tilde)
            .collect();
        let d = crate::linalg::max_matched_distance(&expected, &genuine);
        assert!(d < 1e-6, "genuine spectrum off by {d}");
    }

    #[test]
    fn mu_to_lambda_scalar_closed_form() {
        // A = -1, B = 0.1, C = 1: mu = -1 - 0.1 lambda.
        let unit = consensus_unit();
        let lambda = mu_to_lambda(Complex64::new(-1.5, 0.0), &unit).unwrap();
        assert_abs_diff_eq!(lambda.re, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lambda.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mu_to_lambda_round_trip_through_shifted_block() {
        let unit = example_unit();
        let lambda0 = Complex64::new(1.0, 0.0);
        let block = unit.shifted_block(lambda0);
        let mus = block.eigvals().unwrap();
        for &mu in mus.iter() {
            let lambda = mu_to_lambda(mu, &unit).unwrap();
            assert!((lambda - lambda0).norm() < 1e-10, "mu {mu} -> {lambda}");
        }
    }

    #[test]
    fn mu_to_lambda_rejects_unit_eigenvalue() {
        let unit = example_unit();
        let alpha = unit.a().eigvals().unwrap()[0];
        match mu_to_lambda(alpha, &unit) {
            Err(Error::ExcludedEigenvalue { .. }) => {}
            other => panic!("expected ExcludedEigenvalue, got {other:?}"),
        }
    }

    #[test]
    fn recover_laplacian_trivial_graph() {
        // n = 1: L = [0]; exact system eigenvalues are eig(A), which map to
        // the zero Laplacian eigenvalue in the pole limit.
        let unit = example_unit();
        let g = WeightedDigraph::empty(1, true).unwrap();
        let sys = assemble(&unit, &g, 1, &[(0, 1, 0)]).unwrap();
        let t = 0.05;
        let mus = sys.exact_eigenvalues().unwrap();
        let eigens = recover_mu_values(
            &mus.iter().map(|mu| (mu * t).exp()).collect::<Vec<_>>(),
            t,
            1e-6,
        )
        .unwrap();
        let est = recover_laplacian(&eigens, &unit, 1e-3).unwrap();
        assert_eq!(est.lambdas.len(), 1);
        assert!(est.lambdas[0].norm() < 1e-8, "lambda {:?}", est.lambdas);
        assert_eq!(est.groups[0].members.len(), 2);
    }

    #[test]
    fn recover_laplacian_full_small_system() {
        // Exact eigendecomposition of K feeds the map; recovered multiset
        // must match the exact Laplacian spectrum.
        let unit = example_unit();
        let g = generate_erdos_renyi(5, 0.6, (0.3, 2.0), true, 15).unwrap();
        let sys = assemble(&unit, &g, 1, &[]).unwrap();
        let t = 0.02;
        let mu_tildes: Vec<Complex64> = sys
            .exact_eigenvalues()
            .unwrap()
            .iter()
            .map(|mu| (mu * t).exp())
            .collect();
        let eigens = recover_mu_values(&mu_tildes, t, 1e-9).unwrap();
        let est = recover_laplacian(&eigens, &unit, 1e-6).unwrap();

        let exact = exact_spectrum(&laplacian(&g)).unwrap().eigenvalues;
        // Every exact eigenvalue has a recovered partner.
        for ex in &exact {
            let d = est
                .lambdas
                .iter()
                .map(|l| (l - ex).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6 * (1.0 + ex.norm()), "exact {ex} unmatched (d = {d})");
        }
    }

    #[test]
    fn dedup_groups_near_duplicates() {
        let unit = consensus_unit();
        // Two mu values mapping to nearly identical lambdas.
        let eigens = recover_mu_values(
            &[
                (Complex64::new(-1.5, 0.0) * 0.1).exp(),
                (Complex64::new(-1.5 + 1e-8, 0.0) * 0.1).exp(),
            ],
            0.1,
            1e-12,
        )
        .unwrap();
        let est = recover_laplacian(&eigens, &unit, 1e-3).unwrap();
        assert_eq!(est.lambdas.len(), 1);
        assert_eq!(est.groups[0].members.len(), 2);
    }

    #[test]
    fn conjugate_pairs_are_symmetrized() {
        let unit = example_unit();
        // lambda with nonzero imaginary part: map mu values for lambda and
        // its conjugate with a slight asymmetry.
        let lam = Complex64::new(2.0, 0.7);
        let mus_a = unit.shifted_block(lam).eigvals().unwrap();
        let mus_b = unit.shifted_block(lam.conj()).eigvals().unwrap();
        let t = 0.01;
        let tildes: Vec<Complex64> = mus_a
            .iter()
            .chain(mus_b.iter())
            .map(|mu| (mu * t).exp())
            .collect();
        let eigens = recover_mu_values(&tildes, t, 1e-12).unwrap();
        let est = recover_laplacian(&eigens, &unit, 1e-3).unwrap();
        assert_eq!(est.lambdas.len(), 2);
        assert!((est.lambdas[0] - est.lambdas[1].conj()).norm() < 1e-12);
    }

    #[test]
    fn ratio_of_node_with_itself_is_one() {
        let unit = example_unit();
        let g = generate_erdos_renyi(3, 0.8, (0.2, 1.5), true, 6).unwrap();
        let sys = assemble(&unit, &g, 1, &[(1, 1, 0)]).unwrap();
        let plan = crate::dynamics::MeasurementPlan::factored(vec![0, 1], vec![0], 2).unwrap();
        let signal = random_sinusoids(1, (0.5, 1.0), (0.2, 1.0), 9).unwrap();
        let t = 0.05;
        let traj = simulate(&sys, &signal, &random_initial_state(6, 10), t, 6.0, &plan).unwrap();
        let cfg = EmbeddingConfig::new(3, t, 1e-10).unwrap();
        let result = fit(&build_data_matrices(&traj, &cfg).unwrap(), &cfg).unwrap();
        let table = eigenvector_ratios(&result, &plan, &[(0, 0)]).unwrap();
        for entry in &table.entries {
            let r = entry.ratio.expect("self-ratio must be reliable");
            assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(entry.spread < 1e-12);
        }
    }

    #[test]
    fn ratios_require_factored_plan() {
        let unit = example_unit();
        let g = generate_erdos_renyi(3, 0.8, (0.2, 1.5), true, 6).unwrap();
        let sys = assemble(&unit, &g, 1, &[(1, 1, 0)]).unwrap();
        let plan = crate::dynamics::MeasurementPlan::from_selections(vec![(0, 0), (1, 0)], 2).unwrap();
        let signal = random_sinusoids(1, (0.5, 1.0), (0.2, 1.0), 9).unwrap();
        let t = 0.05;
        let traj = simulate(&sys, &signal, &random_initial_state(6, 10), t, 6.0, &plan).unwrap();
        let cfg = EmbeddingConfig::new(3, t, 1e-10).unwrap();
        let result = fit(&build_data_matrices(&traj, &cfg).unwrap(), &cfg).unwrap();
        assert!(eigenvector_ratios(&result, &plan, &[(0, 1)]).is_err());
    }
}
