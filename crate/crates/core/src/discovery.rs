//! Bivariate causal discovery by comparing approximation errors.
//!
//! Both orientations are projected onto their model; the one with the smaller
//! error wins unless the errors are within `epsilon` of each other. For binary
//! data where monotone models fit as well as the unrestricted one, near-ties
//! are broken by the probability of necessity and sufficiency instead.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{approximation_error, EmpiricalInputs, ErrorMode};
use crate::causation::{calc_causal_probabilities, CausationReport, Direction};
use crate::dist::discretize_equal_frequency;
use crate::error::{contract, IacmError, Result};
use crate::models::{swap_columns, CausalModelSpec, ModelVariant};

pub const DEFAULT_EPSILON: f64 = 0.01;
/// Two PNS values closer than this count as equal.
const PNS_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreprocessMode {
    /// First half observational, second half interventional.
    #[default]
    None,
    /// Per cause value, split the rows at random into equal halves.
    Split,
    /// Like `Split`, then resample interventional groups up to a common size.
    SplitAndBalance,
}

impl std::str::FromStr for PreprocessMode {
    type Err = IacmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PreprocessMode::None),
            "split" => Ok(PreprocessMode::Split),
            "split_and_balance" | "split-and-balance" => Ok(PreprocessMode::SplitAndBalance),
            other => Err(contract(format!("unknown preprocessing mode '{other}'"))),
        }
    }
}

/// Observational rows plus effect values grouped by the intervened cause value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnvSplit {
    pub observational: Vec<(usize, usize)>,
    pub interventional: Vec<Vec<usize>>,
}

impl EnvSplit {
    /// Groups interventional `(cause, effect)` rows by cause value.
    pub fn from_pools(observational: Vec<(usize, usize)>, interventional: &[(usize, usize)], b_cause: usize) -> Result<Self> {
        let mut groups = vec![Vec::new(); b_cause];
        for &(c, e) in interventional {
            groups
                .get_mut(c)
                .ok_or_else(|| contract(format!("cause value {c} outside range {b_cause}")))?
                .push(e);
        }
        Ok(Self {
            observational,
            interventional: groups,
        })
    }

    pub fn inputs(&self, b_cause: usize, b_effect: usize, alpha: f64) -> Result<EmpiricalInputs> {
        EmpiricalInputs::from_rows(&self.observational, &self.interventional, b_cause, b_effect, alpha)
    }
}

/// Splits `(cause, effect)` rows into observational and interventional parts
/// with respect to the cause (first column).
pub fn preprocess(rows: &[(usize, usize)], mode: PreprocessMode, b_cause: usize, seed: u64) -> Result<EnvSplit> {
    if rows.is_empty() {
        return Err(IacmError::InsufficientData("no rows to preprocess".into()));
    }
    if let Some(&(c, _)) = rows.iter().find(|(c, _)| *c >= b_cause) {
        return Err(contract(format!("cause value {c} outside range {b_cause}")));
    }
    match mode {
        PreprocessMode::None => {
            let n_obs = rows.len().div_ceil(2);
            EnvSplit::from_pools(rows[..n_obs].to_vec(), &rows[n_obs..], b_cause)
        }
        PreprocessMode::Split | PreprocessMode::SplitAndBalance => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut split = EnvSplit {
                observational: Vec::new(),
                interventional: vec![Vec::new(); b_cause],
            };
            for a in 0..b_cause {
                let mut subset: Vec<(usize, usize)> = rows.iter().copied().filter(|&(c, _)| c == a).collect();
                subset.shuffle(&mut rng);
                let n_obs = subset.len().div_ceil(2);
                split.observational.extend_from_slice(&subset[..n_obs]);
                split.interventional[a].extend(subset[n_obs..].iter().map(|&(_, e)| e));
            }
            if mode == PreprocessMode::SplitAndBalance {
                let target = split.interventional.iter().map(Vec::len).max().unwrap_or(0);
                for group in split.interventional.iter_mut().filter(|g| !g.is_empty()) {
                    let original = group.len();
                    while group.len() < target {
                        let pick = group[rng.random_range(0..original)];
                        group.push(pick);
                    }
                }
            }
            Ok(split)
        }
    }
}

/// Input data for [`discover`], in `(x, y)` categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiscoveryData {
    /// Unlabeled rows, split by the configured preprocessing.
    Pooled(Vec<(usize, usize)>),
    /// Rows already labeled by environment. `do_x` rows were sampled under
    /// interventions on `x`, `do_y` rows under interventions on `y`.
    Explicit {
        observational: Vec<(usize, usize)>,
        do_x: Vec<(usize, usize)>,
        do_y: Vec<(usize, usize)>,
    },
}

impl DiscoveryData {
    pub fn len(&self) -> usize {
        match self {
            DiscoveryData::Pooled(r) => r.len(),
            DiscoveryData::Explicit {
                observational,
                do_x,
                do_y,
            } => observational.len() + do_x.len() + do_y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same data with the roles of `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        match self {
            DiscoveryData::Pooled(r) => DiscoveryData::Pooled(swap_columns(r)),
            DiscoveryData::Explicit {
                observational,
                do_x,
                do_y,
            } => DiscoveryData::Explicit {
                observational: swap_columns(observational),
                do_x: swap_columns(do_y),
                do_y: swap_columns(do_x),
            },
        }
    }

    /// Splits with respect to the first column. Explicit data without
    /// interventions on it leaves every group empty (uniform fallback).
    pub fn split(&self, b_cause: usize, mode: PreprocessMode, seed: u64) -> Result<EnvSplit> {
        match self {
            DiscoveryData::Pooled(rows) => preprocess(rows, mode, b_cause, seed),
            DiscoveryData::Explicit {
                observational, do_x, ..
            } => EnvSplit::from_pools(observational.clone(), do_x, b_cause),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    pub mode: PreprocessMode,
    pub error_mode: ErrorMode,
    pub epsilon: f64,
    /// Tolerance of the monotone-fit test; defaults to `epsilon`.
    pub epsilon_mono: f64,
    /// Allow the PNS tie-break for binary data.
    pub monotone_path: bool,
    /// Use the best of the four additive-noise objectives instead of the plain one (binary only).
    pub anm_objectives: bool,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            mode: PreprocessMode::None,
            error_mode: ErrorMode::Local,
            epsilon: DEFAULT_EPSILON,
            epsilon_mono: DEFAULT_EPSILON,
            monotone_path: true,
            anm_objectives: false,
            alpha: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    #[serde(rename = "x->y")]
    XToY,
    #[serde(rename = "y->x")]
    YToX,
    #[serde(rename = "no_decision")]
    NoDecision,
}

impl Decision {
    pub fn mirrored(self) -> Self {
        match self {
            Decision::XToY => Decision::YToX,
            Decision::YToX => Decision::XToY,
            Decision::NoDecision => Decision::NoDecision,
        }
    }
}

impl From<Direction> for Decision {
    fn from(d: Direction) -> Self {
        match d {
            Direction::XToY => Decision::XToY,
            Direction::YToX => Decision::YToX,
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::XToY => "x->y",
            Decision::YToX => "y->x",
            Decision::NoDecision => "no_decision",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryVerdict {
    pub decision: Decision,
    #[serde(with = "crate::serde_ext")]
    pub d_xy: f64,
    #[serde(with = "crate::serde_ext")]
    pub d_yx: f64,
    #[serde(with = "crate::serde_ext::option")]
    pub pns_xy: Option<f64>,
    #[serde(with = "crate::serde_ext::option")]
    pub pns_yx: Option<f64>,
    pub used_monotone_path: bool,
    pub epsilon: f64,
}

impl DiscoveryVerdict {
    /// The verdict for the same data with `x` and `y` exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            decision: self.decision.mirrored(),
            d_xy: self.d_yx,
            d_yx: self.d_xy,
            pns_xy: self.pns_yx,
            pns_yx: self.pns_xy,
            ..self.clone()
        }
    }
}

fn forward_error(inputs: &EmpiricalInputs, cfg: &DiscoveryConfig) -> Result<f64> {
    let (b_c, b_e) = (inputs.b_x(), inputs.b_y());
    if cfg.anm_objectives && b_c == 2 && b_e == 2 {
        let mut best = f64::INFINITY;
        for k in 1..=4 {
            best = best.min(approximation_error(inputs, &CausalModelSpec::bivariate(ModelVariant::Anm(k), 2, 2), cfg.error_mode)?);
        }
        return Ok(best);
    }
    approximation_error(inputs, &CausalModelSpec::bivariate(ModelVariant::XToY, b_c, b_e), cfg.error_mode)
}

/// Whether a monotone model fits (binary) inputs about as well as the unrestricted model.
pub fn monotone_preferred(inputs: &EmpiricalInputs, cfg: &DiscoveryConfig) -> Result<bool> {
    if inputs.b_x() != 2 || inputs.b_y() != 2 {
        return Err(IacmError::BinaryOnly {
            b_x: inputs.b_x(),
            b_y: inputs.b_y(),
        });
    }
    let err = |v| approximation_error(inputs, &CausalModelSpec::bivariate(v, 2, 2), cfg.error_mode);
    let plain = err(ModelVariant::XToY)?;
    let mono = err(ModelVariant::XToYMonoInc)?.min(err(ModelVariant::XToYMonoDec)?);
    Ok(mono.is_finite() && mono <= plain + cfg.epsilon_mono)
}

fn monotone_reports(
    fwd: &EmpiricalInputs,
    rev: &EmpiricalInputs,
    cfg: &DiscoveryConfig,
) -> Result<Option<(CausationReport, CausationReport)>> {
    if !(monotone_preferred(fwd, cfg)? && monotone_preferred(rev, cfg)?) {
        return Ok(None);
    }
    let xy = calc_causal_probabilities(fwd, cfg.error_mode)?;
    let mut yx = calc_causal_probabilities(rev, cfg.error_mode)?;
    yx.direction_assumed = Direction::YToX;
    Ok(Some((xy, yx)))
}

/// Decides the causal direction between `x` (first column) and `y`.
pub fn discover(data: &DiscoveryData, b_x: usize, b_y: usize, cfg: &DiscoveryConfig) -> Result<DiscoveryVerdict> {
    if data.len() < 4 {
        return Err(IacmError::InsufficientData(format!(
            "discovery needs at least 4 rows, got {}",
            data.len()
        )));
    }
    let fwd = data.split(b_x, cfg.mode, cfg.seed)?.inputs(b_x, b_y, cfg.alpha)?;
    let rev = data.swapped().split(b_y, cfg.mode, cfg.seed)?.inputs(b_y, b_x, cfg.alpha)?;

    let mut verdict = DiscoveryVerdict {
        decision: Decision::NoDecision,
        d_xy: f64::INFINITY,
        d_yx: f64::INFINITY,
        pns_xy: None,
        pns_yx: None,
        used_monotone_path: false,
        epsilon: cfg.epsilon,
    };

    let binary = b_x == 2 && b_y == 2;
    let reports = if binary && cfg.monotone_path {
        monotone_reports(&fwd, &rev, cfg)?
    } else {
        None
    };
    if let Some((xy, yx)) = reports {
        verdict.used_monotone_path = true;
        verdict.d_xy = xy.error();
        verdict.d_yx = yx.error();
        verdict.pns_xy = Some(xy.pns);
        verdict.pns_yx = Some(yx.pns);
        if (verdict.d_xy - verdict.d_yx).abs() < cfg.epsilon {
            verdict.decision = if (xy.pns - yx.pns).abs() <= PNS_TIE_TOL {
                Decision::NoDecision
            } else if xy.pns > yx.pns {
                Decision::XToY
            } else {
                Decision::YToX
            };
            return Ok(verdict);
        }
    } else {
        verdict.d_xy = forward_error(&fwd, cfg)?;
        verdict.d_yx = forward_error(&rev, cfg)?;
        if (verdict.d_xy - verdict.d_yx).abs() < cfg.epsilon {
            return Ok(verdict);
        }
    }

    verdict.decision = if verdict.d_xy.is_infinite() && verdict.d_yx.is_infinite() {
        Decision::NoDecision
    } else if verdict.d_xy < verdict.d_yx {
        Decision::XToY
    } else {
        Decision::YToX
    };
    Ok(verdict)
}

/// Discrete labels for one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Categorized {
    pub labels: Vec<usize>,
    pub bins: usize,
    pub degraded: bool,
}

/// Label-encodes a column with at most `bins` distinct values (sorted order),
/// otherwise bins it by equal-frequency quantiles.
pub fn categorize(values: &[f64], bins: usize) -> Result<Categorized> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= bins {
        let labels = values
            .iter()
            .map(|v| distinct.partition_point(|d| d < v))
            .collect();
        return Ok(Categorized {
            labels,
            bins,
            degraded: false,
        });
    }
    let d = discretize_equal_frequency(values, bins)?;
    Ok(Categorized {
        labels: d.labels,
        bins,
        degraded: d.degraded,
    })
}

/// Range size used for both variables: 2 if either is binary, else 3.
pub fn default_bins(distinct_x: usize, distinct_y: usize) -> usize {
    if distinct_x <= 2 || distinct_y <= 2 {
        2
    } else {
        3
    }
}

pub fn count_distinct(values: &[f64]) -> usize {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}
