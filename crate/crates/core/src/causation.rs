//! Probabilities of causation for binary cause and effect.
//!
//! The empirical inputs are projected onto the increasing and the decreasing
//! monotone model. Whichever fits better (ties go to increasing) provides the
//! distribution on which PN, PS and PNS are evaluated.

use serde::{Deserialize, Serialize};

use crate::approx::{iacm, ApproximationResult, EmpiricalInputs, ErrorMode};
use crate::dist::DiscreteDistribution;
use crate::error::{contract, IacmError, Result};
use crate::models::{CausalModelSpec, ModelVariant};

/// Denominators at or below this are treated as zero.
const DENOMINATOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "x->y")]
    XToY,
    #[serde(rename = "y->x")]
    YToX,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::XToY => Direction::YToX,
            Direction::YToX => Direction::XToY,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::XToY => "x->y",
            Direction::YToX => "y->x",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotoneKind {
    Increasing,
    Decreasing,
}

/// PN and PS are `None` when their denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalProbabilities {
    #[serde(with = "crate::serde_ext::option")]
    pub pn: Option<f64>,
    #[serde(with = "crate::serde_ext::option")]
    pub ps: Option<f64>,
    pub pns: f64,
}

/// Observational and interventional summaries of a binary projected distribution.
struct BinarySummary {
    /// `joint[x][y] = P(X = x, Y = y)`
    joint: [[f64; 2]; 2],
    /// `do_one[a] = P^{do(x = a)}(Y = 1)`
    do_one: [f64; 2],
}

impl BinarySummary {
    fn new(p: &DiscreteDistribution) -> Result<Self> {
        if p.shape().axis_sizes() != [2, 2, 2, 2] {
            return Err(contract(format!(
                "expected a distribution over (x, y, y_0, y_1) with binary ranges, got {:?}",
                p.shape().axis_sizes()
            )));
        }
        let mut joint = [[0.0; 2]; 2];
        let mut do_one = [0.0; 2];
        for (cell, &m) in p.mass().iter().enumerate() {
            let (x, y, y0, y1) = (cell >> 3, (cell >> 2) & 1, (cell >> 1) & 1, cell & 1);
            joint[x][y] += m;
            do_one[0] += m * y0 as f64;
            do_one[1] += m * y1 as f64;
        }
        Ok(Self { joint, do_one })
    }

    fn p_y(&self, y: usize) -> f64 {
        self.joint[0][y] + self.joint[1][y]
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > DENOMINATOR_TOL).then(|| num / den)
}

/// PN, PS, PNS of `X = 1` for `Y = 1` under an increasing monotone model.
pub fn probabilities_increasing(p_tilde: &DiscreteDistribution) -> Result<CausalProbabilities> {
    let s = BinarySummary::new(p_tilde)?;
    let p_y1 = s.p_y(1);
    Ok(CausalProbabilities {
        pn: ratio(p_y1 - s.do_one[0], s.joint[1][1]),
        ps: ratio(s.do_one[1] - p_y1, s.joint[0][0]),
        pns: s.do_one[1] - s.do_one[0],
    })
}

/// PN, PS, PNS of `X = 0` for `Y = 1` under a decreasing monotone model.
pub fn probabilities_decreasing(p_tilde: &DiscreteDistribution) -> Result<CausalProbabilities> {
    let s = BinarySummary::new(p_tilde)?;
    let p_y0 = s.p_y(0);
    let do_zero = [1.0 - s.do_one[0], 1.0 - s.do_one[1]];
    Ok(CausalProbabilities {
        pn: ratio(do_zero[1] - p_y0, s.joint[0][1]),
        ps: ratio(p_y0 - do_zero[0], s.joint[1][0]),
        pns: s.do_one[0] - s.do_one[1],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausationReport {
    pub direction_assumed: Direction,
    pub monotone_kind: MonotoneKind,
    #[serde(with = "crate::serde_ext::option")]
    pub pn: Option<f64>,
    #[serde(with = "crate::serde_ext::option")]
    pub ps: Option<f64>,
    pub pns: f64,
    /// Approximation error to the increasing monotone model.
    #[serde(with = "crate::serde_ext")]
    pub d_increasing: f64,
    /// Approximation error to the decreasing monotone model.
    #[serde(with = "crate::serde_ext")]
    pub d_decreasing: f64,
    pub error_mode: ErrorMode,
}

impl CausationReport {
    /// Error of the selected monotone model.
    pub fn error(&self) -> f64 {
        self.d_increasing.min(self.d_decreasing)
    }
}

fn project(inputs: &EmpiricalInputs, variant: ModelVariant, mode: ErrorMode) -> Result<Option<ApproximationResult>> {
    match iacm(inputs, &CausalModelSpec::bivariate(variant, 2, 2), mode) {
        Ok(r) => Ok(Some(r)),
        Err(IacmError::DegenerateModel) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Projects onto both monotone models and evaluates the better fit.
pub fn calc_causal_probabilities(inputs: &EmpiricalInputs, mode: ErrorMode) -> Result<CausationReport> {
    if inputs.b_x() != 2 || inputs.b_y() != 2 {
        return Err(IacmError::BinaryOnly {
            b_x: inputs.b_x(),
            b_y: inputs.b_y(),
        });
    }
    let inc = project(inputs, ModelVariant::XToYMonoInc, mode)?;
    let dec = project(inputs, ModelVariant::XToYMonoDec, mode)?;
    let err = |r: &Option<ApproximationResult>| r.as_ref().map_or(f64::INFINITY, |r| r.error());
    let (d_increasing, d_decreasing) = (err(&inc), err(&dec));

    let (kind, probs) = match (inc, dec) {
        (None, None) => return Err(IacmError::NoMonotoneModel),
        (Some(i), _) if d_increasing <= d_decreasing => {
            (MonotoneKind::Increasing, probabilities_increasing(&i.p_tilde)?)
        }
        (_, Some(d)) => (MonotoneKind::Decreasing, probabilities_decreasing(&d.p_tilde)?),
        (Some(i), None) => (MonotoneKind::Increasing, probabilities_increasing(&i.p_tilde)?),
    };
    Ok(CausationReport {
        direction_assumed: Direction::XToY,
        monotone_kind: kind,
        pn: probs.pn,
        ps: probs.ps,
        pns: probs.pns,
        d_increasing,
        d_decreasing,
        error_mode: mode,
    })
}
