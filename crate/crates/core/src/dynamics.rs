//! Networked LTI dynamics: assembly of the full system matrix
//! `K = I_n ⊗ A − L ⊗ BCᵀ`, exact zero-order-hold discretization and
//! sampled simulation.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::EigVals;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{laplacian, WeightedDigraph};
use crate::linalg::{expm, kron, sort_complex, vec_norm};

/// State norm beyond which a simulation is reported as diverged.
const DIVERGENCE_NORM: f64 = 1e150;

/// The per-node `(A, B, C)` triple: `ẋ = Ax + (coupling) + (input)`,
/// `y = Cᵀx`. Identical for every unit in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDynamics {
    a: Array2<f64>,
    b: Array1<f64>,
    c: Array1<f64>,
}

impl UnitDynamics {
    pub fn new(a: Array2<f64>, b: Array1<f64>, c: Array1<f64>) -> Result<Self> {
        let m = a.nrows();
        if a.ncols() != m || m == 0 {
            return Err(Error::Parameter(format!(
                "A must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.len() != m || c.len() != m {
            return Err(Error::Parameter(format!(
                "B and C must have length {m}, got {} and {}",
                b.len(),
                c.len()
            )));
        }
        if a.iter().chain(b.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("A, B, C entries must be finite".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn b(&self) -> &Array1<f64> {
        &self.b
    }

    pub fn c(&self) -> &Array1<f64> {
        &self.c
    }

    /// Rank-one coupling matrix `B Cᵀ`.
    pub fn bc_outer(&self) -> Array2<f64> {
        let m = self.state_dim();
        let mut out = Array2::zeros((m, m));
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self.b[i] * self.c[j];
            }
        }
        out
    }

    /// `A − λ B Cᵀ` over the complex field; the per-eigenvalue block whose
    /// spectrum makes up the spectrum of `K`.
    pub fn shifted_block(&self, lambda: Complex64) -> Array2<Complex64> {
        let m = self.state_dim();
        let mut out = self.a.mapv(|v| Complex64::new(v, 0.0));
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] -= lambda * self.b[i] * self.c[j];
            }
        }
        out
    }
}

/// The assembled network system `Ẋ = KX + Du(t)`.
#[derive(Debug, Clone)]
pub struct NetworkSystem {
    k: Array2<f64>,
    d: Array2<f64>,
    unit: UnitDynamics,
    graph: WeightedDigraph,
    n_channels: usize,
}

impl NetworkSystem {
    pub fn k(&self) -> &Array2<f64> {
        &self.k
    }

    pub fn d(&self) -> &Array2<f64> {
        &self.d
    }

    pub fn unit(&self) -> &UnitDynamics {
        &self.unit
    }

    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn state_dim(&self) -> usize {
        self.k.nrows()
    }

    pub fn channel_count(&self) -> usize {
        self.n_channels
    }

    /// Exact eigenvalues of `K`, sorted by real part.
    pub fn exact_eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut vals = self.k.eigvals()?.to_vec();
        sort_complex(&mut vals);
        Ok(vals)
    }

    /// Verify the sampling constraint `T · max |Im eig(K)| < π`; faster
    /// sampling is required for the principal-branch logarithm downstream
    /// to be alias-free.
    pub fn check_nyquist(&self, period: f64) -> Result<()> {
        let max_im = self
            .exact_eigenvalues()?
            .iter()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max);
        if period * max_im >= std::f64::consts::PI {
            return Err(Error::Parameter(format!(
                "sampling period {period} aliases: T * max|Im eig(K)| = {:.3} >= pi",
                period * max_im
            )));
        }
        Ok(())
    }
}

/// Build `K = I_n ⊗ A − L ⊗ BCᵀ` and the input map `D`, which has a one at
/// row `node·m + state` for every `(node, state, channel)` site.
pub fn assemble(
    unit: &UnitDynamics,
    graph: &WeightedDigraph,
    n_channels: usize,
    input_sites: &[(usize, usize, usize)],
) -> Result<NetworkSystem> {
    let n = graph.node_count();
    let m = unit.state_dim();
    let eye = Array2::eye(n);
    let l = laplacian(graph);
    let k = kron(&eye, unit.a()) - kron(l.matrix(), &unit.bc_outer());

    let mut d = Array2::zeros((n * m, n_channels.max(1)));
    if n_channels == 0 && !input_sites.is_empty() {
        return Err(Error::Parameter("input sites given but no channels".into()));
    }
    for &(node, state, channel) in input_sites {
        if node >= n || state >= m || channel >= n_channels {
            return Err(Error::Parameter(format!(
                "input site ({node}, {state}, {channel}) out of range for n={n}, m={m}, p={n_channels}"
            )));
        }
        d[(node * m + state, channel)] = 1.0;
    }
    Ok(NetworkSystem {
        k,
        d,
        unit: unit.clone(),
        graph: graph.clone(),
        n_channels: n_channels.max(1),
    })
}

/// Zero-order-hold step matrices: `K̃ = e^{KT}` and `D̃ = ∫₀ᵀ e^{Ks} ds · D`,
/// both read off one augmented matrix exponential so that singular `K` is
/// handled without a matrix inverse.
pub fn zoh_step_matrices(sys: &NetworkSystem, period: f64) -> Result<(Array2<f64>, Array2<f64>)> {
    if !(period > 0.0) {
        return Err(Error::Parameter(format!("sampling period {period} must be > 0")));
    }
    let nm = sys.state_dim();
    let p = sys.d.ncols();
    let mut aug = Array2::zeros((nm + p, nm + p));
    aug.slice_mut(s![..nm, ..nm]).assign(&(&sys.k * period));
    aug.slice_mut(s![..nm, nm..]).assign(&(&sys.d * period));
    let e = expm(&aug)?;
    let k_step = crate::linalg::dense_copy(e.slice(s![..nm, ..nm]));
    let d_step = crate::linalg::dense_copy(e.slice(s![..nm, nm..]));
    Ok((k_step, d_step))
}

/// One input channel of the excitation signal.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Zero,
    /// `amplitude · sin(omega·t + phase)`, `omega` in rad/s.
    Sinusoid { amplitude: f64, omega: f64, phase: f64 },
    /// Externally supplied samples held constant over `dt`-long intervals.
    Steps { values: Vec<f64>, dt: f64 },
}

impl Channel {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Channel::Zero => 0.0,
            Channel::Sinusoid { amplitude, omega, phase } => amplitude * (omega * t + phase).sin(),
            Channel::Steps { values, dt } => {
                if values.is_empty() {
                    return 0.0;
                }
                let idx = ((t / dt).floor().max(0.0) as usize).min(values.len() - 1);
                values[idx]
            }
        }
    }
}

/// A deterministic multi-channel input `u(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSignal {
    channels: Vec<Channel>,
}

impl InputSignal {
    pub fn new(channels: Vec<Channel>) -> Self {
        Self { channels }
    }

    pub fn zero(p: usize) -> Self {
        Self { channels: vec![Channel::Zero; p] }
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn eval(&self, t: f64) -> Array1<f64> {
        Array1::from_iter(self.channels.iter().map(|c| c.eval(t)))
    }
}

/// Draw `p` sinusoid channels with amplitude and frequency (in Hz) uniform
/// over the given ranges and phase uniform over `[0, 2π)`.
pub fn random_sinusoids(
    p: usize,
    amp_range: (f64, f64),
    freq_range: (f64, f64),
    seed: u64,
) -> Result<InputSignal> {
    for (name, range) in [("amplitude", amp_range), ("frequency", freq_range)] {
        if !(range.0.is_finite() && range.1.is_finite()) || range.0 > range.1 || range.0 < 0.0 {
            return Err(Error::Parameter(format!(
                "{name} range [{}, {}] must satisfy 0 <= lo <= hi",
                range.0, range.1
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |range: (f64, f64)| {
        if range.0 == range.1 {
            range.0
        } else {
            rng.random_range(range.0..range.1)
        }
    };
    let channels = (0..p)
        .map(|_| {
            let amplitude = draw(amp_range);
            let freq_hz = draw(freq_range);
            let phase = draw((0.0, 2.0 * std::f64::consts::PI));
            Channel::Sinusoid {
                amplitude,
                omega: 2.0 * std::f64::consts::PI * freq_hz,
                phase,
            }
        })
        .collect();
    Ok(InputSignal::new(channels))
}

/// Which entries of the full state vector are measured. Row `r` of the
/// measurement matrix `Q` selects index `node·m + state`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    selections: Vec<(usize, usize)>,
    factored: Option<(Vec<usize>, Vec<usize>)>,
    m: usize,
}

impl MeasurementPlan {
    /// Arbitrary list of measured `(node, state)` pairs; no Kronecker
    /// factorization is claimed.
    pub fn from_selections(selections: Vec<(usize, usize)>, m: usize) -> Result<Self> {
        if selections.is_empty() {
            return Err(Error::Parameter("measurement plan selects nothing".into()));
        }
        for &(_, state) in &selections {
            if state >= m {
                return Err(Error::Parameter(format!("measured state {state} >= m = {m}")));
            }
        }
        Ok(Self { selections, factored: None, m })
    }

    /// Factored plan `Q = Q₁ ⊗ Q₂`: every listed state of every listed
    /// node, node-major. This is the form required for eigenvector ratios.
    pub fn factored(nodes: Vec<usize>, states: Vec<usize>, m: usize) -> Result<Self> {
        if nodes.is_empty() || states.is_empty() {
            return Err(Error::Parameter("factored plan needs nodes and states".into()));
        }
        for &state in &states {
            if state >= m {
                return Err(Error::Parameter(format!("measured state {state} >= m = {m}")));
            }
        }
        let selections = nodes
            .iter()
            .flat_map(|&node| states.iter().map(move |&state| (node, state)))
            .collect();
        Ok(Self {
            selections,
            factored: Some((nodes, states)),
            m,
        })
    }

    pub fn q(&self) -> usize {
        self.selections.len()
    }

    pub fn unit_dim(&self) -> usize {
        self.m
    }

    pub fn selections(&self) -> &[(usize, usize)] {
        &self.selections
    }

    /// `(measured nodes, measured states)` when the plan is a Kronecker
    /// product `Q₁ ⊗ Q₂`.
    pub fn factored_form(&self) -> Option<(&[usize], &[usize])> {
        self.factored.as_ref().map(|(n, s)| (n.as_slice(), s.as_slice()))
    }

    /// Flat indices into the stacked state vector.
    pub fn flat_indices(&self, n_nodes: usize) -> Result<Vec<usize>> {
        self.selections
            .iter()
            .map(|&(node, state)| {
                if node >= n_nodes {
                    Err(Error::Parameter(format!("measured node {node} >= n = {n_nodes}")))
                } else {
                    Ok(node * self.m + state)
                }
            })
            .collect()
    }
}

/// Uniformly sampled measurements `QX(kT)` aligned with the inputs `u(kT)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    /// `K_s × q` measured samples.
    pub samples: Array2<f64>,
    /// `K_s × p` input samples.
    pub inputs: Array2<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn q(&self) -> usize {
        self.samples.ncols()
    }

    pub fn p(&self) -> usize {
        self.inputs.ncols()
    }

    /// Drop the first `skip` samples; measurement times shift accordingly.
    pub fn tail(&self, skip: usize) -> Trajectory {
        Trajectory {
            t0: self.t0 + skip as f64 * self.dt,
            dt: self.dt,
            samples: self.samples.slice(s![skip.., ..]).to_owned(),
            inputs: self.inputs.slice(s![skip.., ..]).to_owned(),
        }
    }

    /// Write as CSV with header `t,z1..zq,u1..up`, 17 significant digits.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = String::new();
        out.push('t');
        for j in 0..self.q() {
            out.push_str(&format!(",z{}", j + 1));
        }
        for j in 0..self.p() {
            out.push_str(&format!(",u{}", j + 1));
        }
        out.push('\n');
        for k in 0..self.len() {
            let t = self.t0 + k as f64 * self.dt;
            out.push_str(&format!("{t:.16e}"));
            for j in 0..self.q() {
                out.push_str(&format!(",{:.16e}", self.samples[(k, j)]));
            }
            for j in 0..self.p() {
                out.push_str(&format!(",{:.16e}", self.inputs[(k, j)]));
            }
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Trajectory> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text)
    }

    pub fn parse_csv(text: &str) -> Result<Trajectory> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty trajectory file".into(),
        })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.first() != Some(&"t") {
            return Err(Error::Parse {
                line: 1,
                msg: "header must start with `t`".into(),
            });
        }
        let q = cols.iter().filter(|c| c.starts_with('z')).count();
        let p = cols.iter().filter(|c| c.starts_with('u')).count();
        if q == 0 || 1 + q + p != cols.len() {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header `{header}` is not of the form t,z1..zq,u1..up"),
            });
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        let mut inputs = Vec::new();
        for (lineno, raw) in lines {
            let line = lineno + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
            if fields.len() != 1 + q + p {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} fields, got {}", 1 + q + p, fields.len()),
                });
            }
            let parse = |tok: &str| -> Result<f64> {
                tok.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad number `{tok}`"),
                })
            };
            times.push(parse(fields[0])?);
            for tok in &fields[1..1 + q] {
                samples.push(parse(tok)?);
            }
            for tok in &fields[1 + q..] {
                inputs.push(parse(tok)?);
            }
        }
        if times.len() < 2 {
            return Err(Error::Parse {
                line: times.len() + 1,
                msg: "trajectory needs at least 2 samples".into(),
            });
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::Parse {
                line: 3,
                msg: format!("non-increasing time step {dt}"),
            });
        }
        for (k, w) in times.windows(2).enumerate() {
            if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
                return Err(Error::Parse {
                    line: k + 3,
                    msg: "non-uniform sampling grid".into(),
                });
            }
        }
        let rows = times.len();
        Ok(Trajectory {
            t0: times[0],
            dt,
            samples: Array2::from_shape_vec((rows, q), samples)
                .map_err(|e| Error::Parameter(e.to_string()))?,
            inputs: Array2::from_shape_vec((rows, p), inputs)
                .map_err(|e| Error::Parameter(e.to_string()))?,
        })
    }
}

/// Simulate `X((k+1)T) = K̃ X(kT) + D̃ u(kT)` with the input held at the
/// left endpoint of each period, recording `QX(kT)` and `u(kT)` for every
/// sample instant from 0 through `t_end` (rounded to the nearest step).
pub fn simulate(
    sys: &NetworkSystem,
    signal: &InputSignal,
    x0: &Array1<f64>,
    period: f64,
    t_end: f64,
    plan: &MeasurementPlan,
) -> Result<Trajectory> {
    if !(period > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Parameter(format!(
            "need period > 0 and t_end >= 0, got {period} and {t_end}"
        )));
    }
    let nm = sys.state_dim();
    if x0.len() != nm {
        return Err(Error::Parameter(format!(
            "x0 has length {}, system expects {nm}",
            x0.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("x0 must be finite".into()));
    }
    if signal.channel_count() != sys.channel_count() {
        return Err(Error::Parameter(format!(
            "signal has {} channels, system expects {}",
            signal.channel_count(),
            sys.channel_count()
        )));
    }
    let n = sys.graph().node_count();
    if plan.unit_dim() != sys.unit().state_dim() {
        return Err(Error::Parameter("measurement plan unit dimension mismatch".into()));
    }
    let indices = plan.flat_indices(n)?;

    let steps = (t_end / period).round() as usize;
    let (k_step, d_step) = zoh_step_matrices(sys, period)?;

    let q = indices.len();
    let p = sys.channel_count();
    let mut samples = Array2::zeros((steps + 1, q));
    let mut inputs = Array2::zeros((steps + 1, p));
    let mut x = x0.clone();
    for k in 0..=steps {
        let u = signal.eval(k as f64 * period);
        for (col, &idx) in indices.iter().enumerate() {
            samples[(k, col)] = x[idx];
        }
        inputs.row_mut(k).assign(&u);
        if k < steps {
            x = k_step.dot(&x) + d_step.dot(&u);
            let norm = vec_norm(&x);
            if !norm.is_finite() || norm > DIVERGENCE_NORM {
                return Err(Error::Divergence { step: k + 1, norm });
            }
        }
    }
    Ok(Trajectory {
        t0: 0.0,
        dt: period,
        samples,
        inputs,
    })
}

/// Standard-normal initial state, reproducible per seed.
pub fn random_initial_state(dim: usize, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array1::from_iter((0..dim).map(|_| StandardNormal.sample(&mut rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_erdos_renyi;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    /// The two-state unit used throughout the worked examples.
    fn example_unit() -> UnitDynamics {
        UnitDynamics::new(
            array![[-1.0, -2.0], [1.0, -1.0]],
            array![1.0, 2.0],
            array![1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn assemble_empty_graph_is_block_diagonal() {
        let unit = example_unit();
        let g = WeightedDigraph::empty(3, true).unwrap();
        let sys = assemble(&unit, &g, 1, &[]).unwrap();
        let expected = kron(&Array2::eye(3), unit.a());
        assert_eq!(sys.k(), &expected);
    }

    #[test]
    fn assemble_off_diagonal_block_sign() {
        // For P2 with edge weight w, K[0..2, 2..4] = +w * BC^T.
        let unit = example_unit();
        let g = WeightedDigraph::from_weights(array![[0.0, 0.7], [0.7, 0.0]], true).unwrap();
        let sys = assemble(&unit, &g, 1, &[]).unwrap();
        let block = sys.k().slice(s![0..2, 2..4]).to_owned();
        let expected = unit.bc_outer() * 0.7;
        assert_abs_diff_eq!(block, expected, epsilon = 1e-15);
        // Diagonal block: A - d_0 BC^T.
        let diag = sys.k().slice(s![0..2, 0..2]).to_owned();
        let expected = unit.a() - &(unit.bc_outer() * 0.7);
        assert_abs_diff_eq!(diag, expected, epsilon = 1e-15);
    }

    #[test]
    fn assemble_input_map_matches_site_list() {
        let unit = example_unit();
        let g = WeightedDigraph::empty(5, true).unwrap();
        // Inputs on the second state of nodes 3 and 4 (1-based), i.e.
        // 0-based nodes 2 and 3.
        let sys = assemble(&unit, &g, 2, &[(2, 1, 0), (3, 1, 1)]).unwrap();
        let d = sys.d();
        assert_eq!(d.shape(), &[10, 2]);
        let mut expected = Array2::zeros((10, 2));
        expected[(5, 0)] = 1.0;
        expected[(7, 1)] = 1.0;
        assert_eq!(d, &expected);
    }

    #[test]
    fn assemble_rejects_out_of_range_site() {
        let unit = example_unit();
        let g = WeightedDigraph::empty(2, true).unwrap();
        assert!(assemble(&unit, &g, 1, &[(2, 0, 0)]).is_err());
        assert!(assemble(&unit, &g, 1, &[(0, 5, 0)]).is_err());
        assert!(assemble(&unit, &g, 1, &[(0, 0, 1)]).is_err());
    }

    fn scalar_system(k: f64) -> NetworkSystem {
        let unit = UnitDynamics::new(array![[k]], array![0.0], array![0.0]).unwrap();
        let g = WeightedDigraph::empty(1, true).unwrap();
        assemble(&unit, &g, 1, &[(0, 0, 0)]).unwrap()
    }

    #[test]
    fn zoh_scalar_singular_k() {
        let sys = scalar_system(0.0);
        let (k_step, d_step) = zoh_step_matrices(&sys, 0.5).unwrap();
        assert_abs_diff_eq!(k_step[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d_step[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zoh_scalar_closed_form() {
        let sys = scalar_system(-1.0);
        let (k_step, d_step) = zoh_step_matrices(&sys, 1.0).unwrap();
        assert_abs_diff_eq!(k_step[(0, 0)], (-1.0f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(d_step[(0, 0)], 1.0 - (-1.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn zoh_matches_inverse_formula_for_invertible_k() {
        use crate::linalg::solve_matrix;
        // Random stable 6x6 system: 3 nodes, m = 2.
        let unit = example_unit();
        let g = generate_erdos_renyi(3, 0.8, (0.2, 1.0), true, 2).unwrap();
        let sys = assemble(&unit, &g, 2, &[(0, 0, 0), (1, 1, 1)]).unwrap();
        let t = 0.3;
        let (k_step, d_step) = zoh_step_matrices(&sys, t).unwrap();
        // D_tilde = K^{-1} (e^{KT} - I) D when K is invertible.
        let rhs = (&k_step - &Array2::<f64>::eye(6)).dot(sys.d());
        let expected = solve_matrix(sys.k(), &rhs).unwrap();
        assert_abs_diff_eq!(d_step, expected, epsilon = 1e-10);
    }

    #[test]
    fn zoh_spectrum_consistency() {
        let unit = example_unit();
        let g = generate_erdos_renyi(4, 0.6, (0.1, 2.0), true, 8).unwrap();
        let sys = assemble(&unit, &g, 1, &[(0, 0, 0)]).unwrap();
        let t = 0.05;
        let (k_step, _) = zoh_step_matrices(&sys, t).unwrap();
        let cont: Vec<Complex64> = sys
            .exact_eigenvalues()
            .unwrap()
            .iter()
            .map(|mu| (mu * t).exp())
            .collect();
        let mut disc = k_step.eigvals().unwrap().to_vec();
        sort_complex(&mut disc);
        let d = crate::linalg::max_matched_distance(&cont, &disc);
        assert!(d < 1e-8, "spectra differ by {d}");
    }

    #[test]
    fn simulate_zero_everything_is_zero() {
        let sys = scalar_system(-1.0);
        let plan = MeasurementPlan::from_selections(vec![(0, 0)], 1).unwrap();
        let traj = simulate(
            &sys,
            &InputSignal::zero(1),
            &Array1::zeros(1),
            0.1,
            1.0,
            &plan,
        )
        .unwrap();
        assert_eq!(traj.len(), 11);
        assert_eq!(traj.samples.sum(), 0.0);
    }

    #[test]
    fn simulate_single_unit_matches_matrix_exponential() {
        let unit = example_unit();
        let g = WeightedDigraph::empty(1, true).unwrap();
        let sys = assemble(&unit, &g, 1, &[]).unwrap();
        let plan = MeasurementPlan::factored(vec![0], vec![0, 1], 2).unwrap();
        let x0 = array![1.0, 0.0];
        let t = 0.05;
        let traj = simulate(&sys, &InputSignal::zero(1), &x0, t, 1.0, &plan).unwrap();
        for k in 0..traj.len() {
            let e = expm(&(unit.a() * (k as f64 * t))).unwrap();
            let expected = e.dot(&x0);
            assert_abs_diff_eq!(traj.samples[(k, 0)], expected[0], epsilon = 1e-10);
            assert_abs_diff_eq!(traj.samples[(k, 1)], expected[1], epsilon = 1e-10);
        }
    }

    #[test]
    fn simulate_superposition() {
        let unit = example_unit();
        let g = generate_erdos_renyi(3, 0.7, (0.5, 1.5), true, 4).unwrap();
        let sys = assemble(&unit, &g, 2, &[(0, 1, 0), (2, 0, 1)]).unwrap();
        let plan = MeasurementPlan::factored(vec![0, 1, 2], vec![0], 2).unwrap();
        let signal = random_sinusoids(2, (0.5, 1.0), (0.2, 0.8), 17).unwrap();
        let x0 = random_initial_state(6, 3);
        let t = 0.02;
        let full = simulate(&sys, &signal, &x0, t, 1.0, &plan).unwrap();
        let free = simulate(&sys, &InputSignal::zero(2), &x0, t, 1.0, &plan).unwrap();
        let forced = simulate(&sys, &signal, &Array1::zeros(6), t, 1.0, &plan).unwrap();
        let recomposed = &free.samples + &forced.samples;
        assert_abs_diff_eq!(full.samples, recomposed, epsilon = 1e-10);
    }

    #[test]
    fn simulate_measurement_is_row_selection() {
        let unit = example_unit();
        let g = generate_erdos_renyi(3, 0.7, (0.5, 1.5), true, 4).unwrap();
        let sys = assemble(&unit, &g, 1, &[(1, 1, 0)]).unwrap();
        let signal = random_sinusoids(1, (0.5, 1.0), (0.2, 0.8), 2).unwrap();
        let x0 = random_initial_state(6, 5);
        let all = MeasurementPlan::factored(vec![0, 1, 2], vec![0, 1], 2).unwrap();
        let partial = MeasurementPlan::from_selections(vec![(2, 0), (0, 1)], 2).unwrap();
        let t = 0.05;
        let full = simulate(&sys, &signal, &x0, t, 0.5, &partial).unwrap();
        let complete = simulate(&sys, &signal, &x0, t, 0.5, &all).unwrap();
        // (2, 0) is flat index 4; (0, 1) is flat index 1.
        for k in 0..full.len() {
            assert_eq!(full.samples[(k, 0)], complete.samples[(k, 4)]);
            assert_eq!(full.samples[(k, 1)], complete.samples[(k, 1)]);
        }
    }

    #[test]
    fn simulate_reports_divergence() {
        // Unstable scalar system: x' = +40x.
        let sys = scalar_system(40.0);
        let plan = MeasurementPlan::from_selections(vec![(0, 0)], 1).unwrap();
        let err = simulate(
            &sys,
            &InputSignal::zero(1),
            &array![1.0],
            1.0,
            300.0,
            &plan,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "got {err:?}");
    }

    #[test]
    fn random_sinusoids_examples() {
        let zero_amp = random_sinusoids(3, (0.0, 0.0), (0.0, 1.0), 7).unwrap();
        for t in [0.0, 0.3, 1.7] {
            assert_eq!(zero_amp.eval(t).sum(), 0.0);
        }

        let a = random_sinusoids(2, (0.1, 1.0), (0.0, 1.0), 7).unwrap();
        let b = random_sinusoids(2, (0.1, 1.0), (0.0, 1.0), 7).unwrap();
        assert_eq!(a, b);

        let s = random_sinusoids(5, (0.0, 1.0), (0.0, 1.0), 13).unwrap();
        for ch in s.channels() {
            match ch {
                Channel::Sinusoid { omega, .. } => {
                    let hz = omega / (2.0 * std::f64::consts::PI);
                    assert!((0.0..=1.0).contains(&hz), "frequency {hz} out of range");
                }
                other => panic!("expected sinusoid, got {other:?}"),
            }
        }

        assert!(random_sinusoids(1, (1.0, 0.5), (0.0, 1.0), 0).is_err());
    }

    #[test]
    fn trajectory_csv_round_trip_is_exact() {
        let unit = example_unit();
        let g = generate_erdos_renyi(2, 1.0, (1.0, 1.0), false, 0).unwrap();
        let sys = assemble(&unit, &g, 1, &[(0, 1, 0)]).unwrap();
        let plan = MeasurementPlan::factored(vec![0, 1], vec![0], 2).unwrap();
        let signal = random_sinusoids(1, (0.3, 0.9), (0.1, 0.9), 21).unwrap();
        let traj = simulate(&sys, &signal, &random_initial_state(4, 9), 0.01, 0.3, &plan).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        traj.write_csv(&path).unwrap();
        let back = Trajectory::read_csv(&path).unwrap();
        assert_eq!(traj, back);
    }

    #[test]
    fn trajectory_tail_shifts_origin() {
        let traj = Trajectory {
            t0: 0.0,
            dt: 0.5,
            samples: array![[1.0], [2.0], [3.0]],
            inputs: array![[0.0], [0.1], [0.2]],
        };
        let tail = traj.tail(1);
        assert_eq!(tail.t0, 0.5);
        assert_eq!(tail.samples, array![[2.0], [3.0]]);
    }
}
