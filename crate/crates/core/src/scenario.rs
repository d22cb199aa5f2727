//! Scenario documents: a single JSON config that fixes the graph, the unit
//! dynamics, inputs, measurements, timing, embedding and analysis options
//! of one end-to-end run. All seeds live in the document, so a scenario
//! determines its artifacts bit for bit.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::dynamics::{InputSignal, MeasurementPlan, UnitDynamics};
use crate::error::{Error, Result};
use crate::graph::{self, WeightedDigraph};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub graph: GraphSpec,
    pub unit: UnitSpec,
    pub inputs: InputSpec,
    pub measurement: MeasurementSpec,
    pub timing: TimingSpec,
    #[serde(default)]
    pub initial_state: InitialStateSpec,
    pub embedding: EmbeddingSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    ErdosRenyi {
        n: usize,
        p: f64,
        weight_range: (f64, f64),
        directed: bool,
        seed: u64,
    },
    PlantedPartition {
        clusters: usize,
        cluster_size: usize,
        p_in: f64,
        p_out: f64,
        weight_range: (f64, f64),
        seed: u64,
    },
    DegreeTargeted {
        n: usize,
        mean_edges: f64,
        sd_edges: f64,
        weight_range: (f64, f64),
        seed: u64,
    },
    Hub {
        n: usize,
        hub_degree: usize,
        p_background: f64,
        seed: u64,
    },
    EdgeList {
        path: String,
        undirected: bool,
    },
    JsonFile {
        path: String,
    },
}

impl GraphSpec {
    /// Node count when it is known without touching the filesystem.
    pub fn declared_node_count(&self) -> Option<usize> {
        match self {
            GraphSpec::ErdosRenyi { n, .. }
            | GraphSpec::DegreeTargeted { n, .. }
            | GraphSpec::Hub { n, .. } => Some(*n),
            GraphSpec::PlantedPartition { clusters, cluster_size, .. } => {
                Some(clusters * cluster_size)
            }
            GraphSpec::EdgeList { .. } | GraphSpec::JsonFile { .. } => None,
        }
    }

    /// Mean edge weight implied by the generator (used to turn a mean
    /// degree into a mean edge count) unless the scenario overrides it.
    pub fn default_mean_weight(&self) -> Option<f64> {
        match self {
            GraphSpec::ErdosRenyi { weight_range, .. }
            | GraphSpec::PlantedPartition { weight_range, .. }
            | GraphSpec::DegreeTargeted { weight_range, .. } => {
                Some((weight_range.0 + weight_range.1) / 2.0)
            }
            GraphSpec::Hub { .. } => Some(1.0),
            GraphSpec::EdgeList { .. } | GraphSpec::JsonFile { .. } => None,
        }
    }

    pub fn build(&self, base_dir: &Path) -> Result<WeightedDigraph> {
        match self {
            GraphSpec::ErdosRenyi { n, p, weight_range, directed, seed } => {
                graph::generate_erdos_renyi(*n, *p, *weight_range, *directed, *seed)
            }
            GraphSpec::PlantedPartition {
                clusters,
                cluster_size,
                p_in,
                p_out,
                weight_range,
                seed,
            } => graph::generate_planted_partition(
                *clusters,
                *cluster_size,
                *p_in,
                *p_out,
                *weight_range,
                *seed,
            ),
            GraphSpec::DegreeTargeted { n, mean_edges, sd_edges, weight_range, seed } => {
                graph::generate_degree_targeted(*n, *mean_edges, *sd_edges, *weight_range, *seed)
            }
            GraphSpec::Hub { n, hub_degree, p_background, seed } => {
                graph::generate_hub(*n, *hub_degree, *p_background, *seed)
            }
            GraphSpec::EdgeList { path, undirected } => {
                graph::load_edge_list(base_dir.join(path), *undirected)
            }
            GraphSpec::JsonFile { path } => WeightedDigraph::load_json(base_dir.join(path)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitSpec {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl UnitSpec {
    pub fn build(&self) -> Result<UnitDynamics> {
        let m = self.a.len();
        if self.a.iter().any(|row| row.len() != m) {
            return Err(Error::Scenario("unit.a must be a square matrix".into()));
        }
        let flat: Vec<f64> = self.a.iter().flatten().copied().collect();
        let a = Array2::from_shape_vec((m, m), flat)
            .map_err(|e| Error::Scenario(e.to_string()))?;
        UnitDynamics::new(a, Array1::from(self.b.clone()), Array1::from(self.c.clone()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub channels: usize,
    pub sites: SiteSpec,
    pub signal: SignalSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SiteSpec {
    /// Explicit `(node, state, channel)` triples.
    Explicit { sites: Vec<(usize, usize, usize)> },
    /// Channel `c` drives the given state of every node in the `c`-th of
    /// `channels` contiguous node blocks.
    Blocks { state: usize },
}

impl SiteSpec {
    pub fn resolve(&self, n: usize, channels: usize) -> Vec<(usize, usize, usize)> {
        match self {
            SiteSpec::Explicit { sites } => sites.clone(),
            SiteSpec::Blocks { state } => {
                let mut out = Vec::with_capacity(n);
                if channels == 0 {
                    return out;
                }
                let base = n / channels;
                for node in 0..n {
                    let channel = if base == 0 { 0 } else { (node / base).min(channels - 1) };
                    out.push((node, *state, channel));
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    RandomSinusoids {
        amp_range: (f64, f64),
        freq_range: (f64, f64),
        seed: u64,
    },
    Zero,
}

impl SignalSpec {
    pub fn build(&self, channels: usize) -> Result<InputSignal> {
        match self {
            SignalSpec::RandomSinusoids { amp_range, freq_range, seed } => {
                crate::dynamics::random_sinusoids(channels, *amp_range, *freq_range, *seed)
            }
            SignalSpec::Zero => Ok(InputSignal::zero(channels)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    /// Measured nodes (factored plan) — used with `states`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<usize>>,
    /// Measured per-unit states (factored plan).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<usize>>,
    /// Arbitrary `(node, state)` selections (non-factored plan).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selections: Option<Vec<(usize, usize)>>,
}

impl MeasurementSpec {
    pub fn build(&self, m: usize) -> Result<MeasurementPlan> {
        match (&self.nodes, &self.states, &self.selections) {
            (Some(nodes), Some(states), None) => {
                MeasurementPlan::factored(nodes.clone(), states.clone(), m)
            }
            (None, None, Some(selections)) => {
                MeasurementPlan::from_selections(selections.clone(), m)
            }
            _ => Err(Error::Scenario(
                "measurement must give either nodes+states or selections".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSpec {
    pub sample_period: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    RandomNormal { seed: u64 },
    Zero,
}

impl Default for InitialStateSpec {
    fn default() -> Self {
        InitialStateSpec::RandomNormal { seed: 0 }
    }
}

impl InitialStateSpec {
    pub fn build(&self, dim: usize) -> Array1<f64> {
        match self {
            InitialStateSpec::RandomNormal { seed } => {
                crate::dynamics::random_initial_state(dim, *seed)
            }
            InitialStateSpec::Zero => Array1::zeros(dim),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub stack_depth: usize,
    pub delta: f64,
    #[serde(default = "default_svd_tol")]
    pub svd_tol: f64,
}

fn default_svd_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default)]
    pub hull_mode: bool,
    /// Number of clusters for ratio-based clustering; clustering is skipped
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_count: Option<usize>,
    /// Node id (must be measured) whose components anchor the ratios.
    #[serde(default)]
    pub reference_node: usize,
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
    #[serde(default = "default_dedup_tol")]
    pub dedup_tol: f64,
    #[serde(default = "default_zero_sep_frac")]
    pub zero_sep_frac: f64,
    /// Override for the mean edge weight used to derive edge counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_edge_weight: Option<f64>,
    /// Seed for the k-means restarts.
    #[serde(default)]
    pub cluster_seed: u64,
}

fn default_zero_tol() -> f64 {
    1e-6
}

fn default_dedup_tol() -> f64 {
    1e-3
}

fn default_zero_sep_frac() -> f64 {
    crate::analysis::DEFAULT_ZERO_SEP_FRAC
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            hull_mode: false,
            cluster_count: None,
            reference_node: 0,
            zero_tol: default_zero_tol(),
            dedup_tol: default_dedup_tol(),
            zero_sep_frac: default_zero_sep_frac(),
            mean_edge_weight: None,
            cluster_seed: 0,
        }
    }
}

impl Scenario {
    /// Parse and validate a scenario document; deserialization errors name
    /// the offending path.
    pub fn from_json_str(text: &str) -> Result<Scenario> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Scenario(format!("{}: {}", e.path(), e.inner())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Static validation of everything that does not require building the
    /// graph.
    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::Scenario(format!(
                "unsupported version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        let unit = self.unit.build()?;
        let m = unit.state_dim();
        if !(self.timing.sample_period > 0.0) {
            return Err(Error::Scenario("timing.sample_period must be > 0".into()));
        }
        if self.timing.t_end < self.timing.sample_period {
            return Err(Error::Scenario(
                "timing.t_end must cover at least one sampling period".into(),
            ));
        }
        let embedding = crate::dmdc::EmbeddingConfig::new(
            self.embedding.stack_depth,
            self.embedding.delta,
            self.embedding.svd_tol,
        )?;
        embedding.stride(self.timing.sample_period)?;

        let plan = self.measurement.build(m)?;
        if let Some(n) = self.graph.declared_node_count() {
            plan.flat_indices(n)?;
            for &(node, state, channel) in &self.inputs.sites.resolve(n, self.inputs.channels) {
                if node >= n || state >= m || channel >= self.inputs.channels.max(1) {
                    return Err(Error::Scenario(format!(
                        "input site ({node}, {state}, {channel}) out of range"
                    )));
                }
            }
        }
        if self.analysis.cluster_count == Some(0) {
            return Err(Error::Scenario("analysis.cluster_count must be >= 1".into()));
        }
        if let (Some(nodes), _) = (&self.measurement.nodes, &self.measurement.states) {
            if self.analysis.cluster_count.is_some() || !nodes.is_empty() {
                // Reference node must be measured for ratio work.
                if !nodes.contains(&self.analysis.reference_node) {
                    return Err(Error::Scenario(format!(
                        "analysis.reference_node {} is not among the measured nodes",
                        self.analysis.reference_node
                    )));
                }
            }
        }
        Ok(())
    }

    /// Position of the reference node inside the measured-node list.
    pub fn reference_index(&self) -> Option<usize> {
        self.measurement
            .nodes
            .as_ref()
            .and_then(|nodes| nodes.iter().position(|&n| n == self.analysis.reference_node))
    }

    /// Mean edge weight to use for edge-count estimates.
    pub fn mean_edge_weight(&self) -> Option<f64> {
        self.analysis
            .mean_edge_weight
            .or_else(|| self.graph.default_mean_weight())
    }

    /// Replace every random seed in the document with values derived from
    /// `seed` (graph, signal, initial state, clustering).
    pub fn override_seeds(&mut self, seed: u64) {
        match &mut self.graph {
            GraphSpec::ErdosRenyi { seed: s, .. }
            | GraphSpec::PlantedPartition { seed: s, .. }
            | GraphSpec::DegreeTargeted { seed: s, .. }
            | GraphSpec::Hub { seed: s, .. } => *s = seed,
            GraphSpec::EdgeList { .. } | GraphSpec::JsonFile { .. } => {}
        }
        if let SignalSpec::RandomSinusoids { seed: s, .. } = &mut self.inputs.signal {
            *s = seed.wrapping_add(1);
        }
        if let InitialStateSpec::RandomNormal { seed: s } = &mut self.initial_state {
            *s = seed.wrapping_add(2);
        }
        self.analysis.cluster_seed = seed.wrapping_add(3);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_scenario_json() -> String {
        r#"{
            "version": 1,
            "graph": {"type": "erdos_renyi", "n": 4, "p": 0.5,
                      "weight_range": [0.5, 1.5], "directed": true, "seed": 3},
            "unit": {"a": [[-1.0, -2.0], [1.0, -1.0]], "b": [1.0, 2.0], "c": [1.0, 1.0]},
            "inputs": {"channels": 1,
                       "sites": {"type": "explicit", "sites": [[0, 1, 0]]},
                       "signal": {"type": "random_sinusoids", "amp_range": [0.0, 1.0],
                                  "freq_range": [0.0, 1.0], "seed": 5}},
            "measurement": {"nodes": [0, 1], "states": [0]},
            "timing": {"sample_period": 0.01, "t_end": 2.0},
            "initial_state": {"type": "random_normal", "seed": 7},
            "embedding": {"stack_depth": 4, "delta": 0.02, "svd_tol": 1e-10},
            "analysis": {"reference_node": 1}
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_validates_minimal_scenario() {
        let s = Scenario::from_json_str(&minimal_scenario_json()).unwrap();
        assert_eq!(s.graph.declared_node_count(), Some(4));
        assert_eq!(s.reference_index(), Some(1));
        assert_eq!(s.mean_edge_weight(), Some(1.0));
    }

    #[test]
    fn missing_field_error_names_the_path() {
        let broken = minimal_scenario_json().replace("\"p\": 0.5,", "");
        let err = Scenario::from_json_str(&broken).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("graph"), "message was: {msg}");
        assert!(msg.contains('p'), "message was: {msg}");
    }

    #[test]
    fn unknown_field_is_rejected() {
        let broken = minimal_scenario_json()
            .replace("\"version\": 1,", "\"version\": 1, \"typo_field\": true,");
        assert!(Scenario::from_json_str(&broken).is_err());
    }

    #[test]
    fn delta_must_be_multiple_of_period() {
        let broken = minimal_scenario_json().replace("\"delta\": 0.02", "\"delta\": 0.015");
        assert!(Scenario::from_json_str(&broken).is_err());
    }

    #[test]
    fn reference_node_must_be_measured() {
        let broken = minimal_scenario_json().replace("\"reference_node\": 1", "\"reference_node\": 3");
        assert!(Scenario::from_json_str(&broken).is_err());
    }

    #[test]
    fn seed_override_touches_every_seed() {
        let mut s = Scenario::from_json_str(&minimal_scenario_json()).unwrap();
        s.override_seeds(100);
        match s.graph {
            GraphSpec::ErdosRenyi { seed, .. } => assert_eq!(seed, 100),
            _ => unreachable!(),
        }
        match s.inputs.signal {
            SignalSpec::RandomSinusoids { seed, .. } => assert_eq!(seed, 101),
            _ => unreachable!(),
        }
        match s.initial_state {
            InitialStateSpec::RandomNormal { seed } => assert_eq!(seed, 102),
            _ => unreachable!(),
        }
    }

    #[test]
    fn block_sites_partition_nodes() {
        let sites = SiteSpec::Blocks { state: 0 }.resolve(7, 3);
        assert_eq!(sites.len(), 7);
        // Blocks of floor(7/3) = 2 nodes; the remainder joins the last.
        let channels: Vec<usize> = sites.iter().map(|&(_, _, c)| c).collect();
        assert_eq!(channels, vec![0, 0, 1, 1, 2, 2, 2]);
    }
}
