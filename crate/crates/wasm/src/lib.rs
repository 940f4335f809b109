//! Browser bindings. Every operation takes and returns a JSON string so the
//! page needs no generated type glue; the `*_json` functions are plain Rust
//! and carry the logic, the `#[wasm_bindgen]` wrappers only convert errors.

use iacm::approx::MAX_APPROX_RANGE;
use iacm::synth::{random_scm, sample_scm, NoiseKind};
use iacm::{
    calc_causal_probabilities, discover, iacm, CausalModelSpec, DiscoveryConfig, DiscoveryVerdict, DiscreteDistribution,
    EmpiricalInputs, ErrorMode, ModelVariant,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Counts or probabilities; rows are normalized independently where needed.
#[derive(Debug, Deserialize)]
pub struct TableRequest {
    #[serde(default = "default_model")]
    pub model: String,
    /// `joint[x][y]`, always indexed by X first.
    pub joint: Vec<Vec<f64>>,
    /// `interventional[a][v]`: frequency of the effect value `v` under `do(cause = a)`.
    /// For `y_to_x*` models the cause is Y and `v` ranges over X.
    pub interventional: Vec<Vec<f64>>,
    #[serde(default)]
    pub error_mode: ErrorMode,
}

fn default_model() -> String {
    "x_to_y".into()
}

#[derive(Debug, Deserialize)]
pub struct SimulationRequest {
    #[serde(default = "default_noise")]
    pub noise: NoiseKind,
    pub b_x: usize,
    pub b_y: usize,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub error_mode: ErrorMode,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_noise() -> NoiseKind {
    NoiseKind::Additive
}

fn default_epsilon() -> f64 {
    iacm::discovery::DEFAULT_EPSILON
}

#[derive(Debug, Serialize)]
pub struct ApproximationSummary {
    pub model: String,
    pub s_value: f64,
    #[serde(with = "iacm::serde_ext")]
    pub global_error: f64,
    #[serde(with = "iacm::serde_ext")]
    pub local_error: f64,
    /// Axis names of the extended space, cause first.
    pub axes: Vec<String>,
    pub axis_sizes: Vec<usize>,
    pub p_tilde: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub f: Vec<usize>,
    pub p_x: Vec<f64>,
    pub p_n: Vec<f64>,
    /// Observed joint counts `[x][y]` of the observational rows.
    pub joint_counts: Vec<Vec<usize>>,
    pub verdict: DiscoveryVerdict,
    pub correct: bool,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn normalize(row: &[f64]) -> Result<Vec<f64>, String> {
    if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err("entries must be finite and non-negative".into());
    }
    let total: f64 = row.iter().sum();
    if total <= 0.0 {
        return Err("every table and row needs positive mass".into());
    }
    Ok(row.iter().map(|v| v / total).collect())
}

fn rectangular(t: &[Vec<f64>], what: &str) -> Result<(usize, usize), String> {
    let rows = t.len();
    let cols = t.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 || t.iter().any(|r| r.len() != cols) {
        return Err(format!("{what} must be a rectangular table with at least 2 rows and 2 columns"));
    }
    Ok((rows, cols))
}

/// Builds inputs with the cause on the first axis.
fn inputs(req: &TableRequest, reversed: bool) -> Result<EmpiricalInputs, String> {
    let (b_x, b_y) = rectangular(&req.joint, "joint")?;
    if b_x > MAX_APPROX_RANGE || b_y > MAX_APPROX_RANGE {
        return Err(format!("ranges above {MAX_APPROX_RANGE} are not supported"));
    }
    let (b_c, b_e) = if reversed { (b_y, b_x) } else { (b_x, b_y) };
    let mass: Vec<f64> = if reversed {
        (0..b_y).flat_map(|y| req.joint.iter().map(move |r| r[y])).collect()
    } else {
        req.joint.iter().flatten().copied().collect()
    };
    let joint = DiscreteDistribution::from_sizes(&[b_c, b_e], normalize(&mass)?).map_err(err)?;
    let (rows, cols) = rectangular(&req.interventional, "interventional")?;
    if (rows, cols) != (b_c, b_e) {
        return Err(format!(
            "interventional table must be {b_c}x{b_e} (one row per cause value), got {rows}x{cols}"
        ));
    }
    let marginals = req
        .interventional
        .iter()
        .map(|r| DiscreteDistribution::from_sizes(&[b_e], normalize(r)?).map_err(err))
        .collect::<Result<Vec<_>, _>>()?;
    EmpiricalInputs::new(joint, marginals).map_err(err)
}

/// Projects the tables onto a bivariate model.
pub fn approximate_json(request: &str) -> Result<String, String> {
    let req: TableRequest = serde_json::from_str(request).map_err(err)?;
    let variant: ModelVariant = req.model.parse().map_err(err)?;
    if variant.is_trivariate() {
        return Err(format!("{variant} needs a third variable; use the command-line tool"));
    }
    let inputs = inputs(&req, variant.is_reversed())?;
    let (b_x, b_y) = if variant.is_reversed() {
        (inputs.b_y(), inputs.b_x())
    } else {
        (inputs.b_x(), inputs.b_y())
    };
    let spec = CausalModelSpec::bivariate(variant, b_x, b_y);
    let r = iacm(&inputs, &spec, req.error_mode).map_err(err)?;
    let layout = spec.layout().map_err(err)?;
    let summary = ApproximationSummary {
        model: variant.name(),
        s_value: r.s_value,
        global_error: r.global_error,
        local_error: r.local_error,
        axes: layout.axis_names.clone(),
        axis_sizes: layout.shape.axis_sizes().to_vec(),
        p_tilde: r.p_tilde.mass().to_vec(),
    };
    serde_json::to_string(&summary).map_err(err)
}

/// PN, PS and PNS of binary tables under the better-fitting monotone model.
pub fn causation_json(request: &str) -> Result<String, String> {
    let req: TableRequest = serde_json::from_str(request).map_err(err)?;
    let inputs = inputs(&req, false)?;
    let report = calc_causal_probabilities(&inputs, req.error_mode).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

/// Draws a random X -> Y model, samples it and runs discovery on the sample.
pub fn simulate_json(request: &str) -> Result<String, String> {
    let req: SimulationRequest = serde_json::from_str(request).map_err(err)?;
    if req.b_x > MAX_APPROX_RANGE || req.b_y > MAX_APPROX_RANGE {
        return Err(format!("ranges above {MAX_APPROX_RANGE} are not supported"));
    }
    if req.b_x < 2 || req.b_y < 2 {
        return Err("ranges must be at least 2".into());
    }
    if req.n < 4 || req.n > 1_000_000 {
        return Err("sample size must be between 4 and 1000000".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let scm = random_scm(req.b_x, req.b_y, req.noise, req.n, &mut rng);
    let sample = sample_scm(&scm).map_err(err)?;
    let mut joint_counts = vec![vec![0; req.b_y]; req.b_x];
    for (x, y) in sample.observational() {
        joint_counts[x][y] += 1;
    }
    let cfg = DiscoveryConfig {
        error_mode: req.error_mode,
        epsilon: req.epsilon,
        seed: req.seed,
        ..DiscoveryConfig::default()
    };
    let verdict = discover(&sample.explicit(), req.b_x, req.b_y, &cfg).map_err(err)?;
    let summary = SimulationSummary {
        correct: verdict.decision == iacm::Decision::XToY,
        f: scm.f,
        p_x: scm.p_x,
        p_n: scm.p_n,
        joint_counts,
        verdict,
    };
    serde_json::to_string(&summary).map_err(err)
}

#[wasm_bindgen]
pub fn approximate(request: &str) -> Result<String, JsError> {
    approximate_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn causation(request: &str) -> Result<String, JsError> {
    causation_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(request: &str) -> Result<String, JsError> {
    simulate_json(request).map_err(|e| JsError::new(&e))
}
