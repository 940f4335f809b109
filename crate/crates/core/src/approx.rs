//! Projection of empirical marginals onto a causal model.
//!
//! The marginals pin down a polytope of joint distributions `P^` over the
//! extended space. The model's support mass `S(P^)` is maximized over that
//! polytope with the simplex solver; the closest model distribution in
//! relative entropy is then `P^` restricted to the support and rescaled by
//! `1 / S`, at a global error of `-ln S`.

use serde::{Deserialize, Serialize};

use crate::dist::{
    empirical_joint_smoothed, empirical_marginal, kl_divergence, marginalize, DiscreteDistribution,
    MarginalSelector, Shape,
};
use crate::error::{contract, IacmError, Result};
use crate::lp::{solve, LpProblem, LpStatus};
use crate::models::{build_support, CausalModelSpec, ModelLayout};

/// Largest bivariate range for which the projection is attempted.
pub const MAX_APPROX_RANGE: usize = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMode {
    /// `-ln S` over the whole extended space.
    Global,
    /// Relative entropy between the observed marginals of the projection and of `P^`.
    #[default]
    Local,
}

impl std::str::FromStr for ErrorMode {
    type Err = IacmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(ErrorMode::Global),
            "local" => Ok(ErrorMode::Local),
            other => Err(contract(format!("unknown error mode '{other}'"))),
        }
    }
}

/// Observational joint of (cause, effect) plus one effect marginal per cause value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalInputs {
    pub joint: DiscreteDistribution,
    pub interventional: Vec<DiscreteDistribution>,
    /// `true` where no interventional rows existed and a uniform marginal was substituted.
    pub fallback_used: Vec<bool>,
}

impl EmpiricalInputs {
    pub fn new(joint: DiscreteDistribution, interventional: Vec<DiscreteDistribution>) -> Result<Self> {
        let sizes = joint.shape().axis_sizes();
        if sizes.len() != 2 {
            return Err(contract("observational joint must have two axes"));
        }
        let (b_x, b_y) = (sizes[0], sizes[1]);
        if interventional.len() != b_x {
            return Err(contract(format!(
                "expected {b_x} interventional marginals, got {}",
                interventional.len()
            )));
        }
        if interventional.iter().any(|d| d.shape().axis_sizes() != [b_y]) {
            return Err(contract(format!("interventional marginals must range over {b_y} values")));
        }
        Ok(Self {
            joint,
            fallback_used: vec![false; b_x],
            interventional,
        })
    }

    /// Builds inputs from category rows; `interventional[a]` holds effect values observed under `do(cause = a)`.
    pub fn from_rows(
        observational: &[(usize, usize)],
        interventional: &[Vec<usize>],
        b_x: usize,
        b_y: usize,
        alpha: f64,
    ) -> Result<Self> {
        if interventional.len() > b_x {
            return Err(contract(format!(
                "{} interventional groups for a cause with {b_x} values",
                interventional.len()
            )));
        }
        let joint = empirical_joint_smoothed(observational, b_x, b_y, alpha)?;
        let mut marginals = Vec::with_capacity(b_x);
        let mut fallback_used = Vec::with_capacity(b_x);
        for a in 0..b_x {
            match interventional.get(a).filter(|v| !v.is_empty()) {
                Some(values) => {
                    marginals.push(empirical_marginal(values, b_y, alpha)?);
                    fallback_used.push(false);
                }
                None => {
                    marginals.push(DiscreteDistribution::uniform(Shape::new(vec![b_y])?));
                    fallback_used.push(true);
                }
            }
        }
        let mut inputs = Self::new(joint, marginals)?;
        inputs.fallback_used = fallback_used;
        Ok(inputs)
    }

    pub fn b_x(&self) -> usize {
        self.joint.shape().axis_sizes()[0]
    }

    pub fn b_y(&self) -> usize {
        self.joint.shape().axis_sizes()[1]
    }

    /// Targets in constraint-block order: interventional marginals, then the joint.
    pub fn targets(&self) -> Vec<DiscreteDistribution> {
        let mut t = self.interventional.clone();
        t.push(self.joint.clone());
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationResult {
    pub model: CausalModelSpec,
    /// Maximizer of the objective over the marginal polytope.
    pub p_hat: DiscreteDistribution,
    /// Projection of `p_hat` onto the model.
    pub p_tilde: DiscreteDistribution,
    /// Optimal objective value (support mass for plain models).
    pub s_value: f64,
    #[serde(with = "crate::serde_ext")]
    pub global_error: f64,
    #[serde(with = "crate::serde_ext")]
    pub local_error: f64,
    pub error_mode: ErrorMode,
    pub fallback_used: Vec<bool>,
}

impl ApproximationResult {
    /// The error selected by `error_mode`.
    pub fn error(&self) -> f64 {
        match self.error_mode {
            ErrorMode::Global => self.global_error,
            ErrorMode::Local => self.local_error,
        }
    }
}

/// Dense 0/1 constraint matrix of a model layout, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl ConstraintMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Constraint matrix for the bivariate model with ranges `b_x`, `b_y`.
pub fn create_constraint_matrix(b_x: usize, b_y: usize) -> Result<ConstraintMatrix> {
    check_bivariate_range(b_x, b_y)?;
    let layout = CausalModelSpec::bivariate(crate::models::ModelVariant::XToY, b_x, b_y).layout()?;
    Ok(constraint_matrix_for(&layout))
}

fn check_bivariate_range(b_x: usize, b_y: usize) -> Result<()> {
    if !(2..=MAX_APPROX_RANGE).contains(&b_x) || !(2..=MAX_APPROX_RANGE).contains(&b_y) {
        return Err(IacmError::UnsupportedModel(format!(
            "approximation supports ranges 2..={MAX_APPROX_RANGE}, got ({b_x}, {b_y})"
        )));
    }
    Ok(())
}

/// Row 0 sums every cell; then each block contributes one row per marginal
/// cell (mixed-radix over the block axes) except the last.
pub fn constraint_matrix_for(layout: &ModelLayout) -> ConstraintMatrix {
    let shape = &layout.shape;
    let sizes = shape.axis_sizes();
    let cols = shape.cells();
    let block_rows: Vec<usize> = layout
        .blocks
        .iter()
        .map(|b| b.axes.iter().map(|&a| sizes[a]).product::<usize>() - 1)
        .collect();
    let rows = 1 + block_rows.iter().sum::<usize>();
    let mut data = vec![0.0; rows * cols];
    data[..cols].iter_mut().for_each(|v| *v = 1.0);

    let mut coords = vec![0; sizes.len()];
    for col in 0..cols {
        shape.coords_into(col, &mut coords);
        let mut offset = 1;
        for (block, &n) in layout.blocks.iter().zip(&block_rows) {
            let k = block.axes.iter().fold(0, |acc, &a| acc * sizes[a] + coords[a]);
            if k < n {
                data[(offset + k) * cols + col] = 1.0;
            }
            offset += n;
        }
    }
    ConstraintMatrix { rows, cols, data }
}

/// Right-hand side matching [`create_constraint_matrix`].
pub fn get_constraint_distribution(inputs: &EmpiricalInputs) -> Vec<f64> {
    constraint_rhs(&inputs.targets())
}

fn constraint_rhs(targets: &[DiscreteDistribution]) -> Vec<f64> {
    let mut c = vec![1.0];
    for t in targets {
        let m = t.mass();
        // each block is forced to total exactly one: the dropped last cell takes the remainder
        let mut acc = 0.0;
        for &v in &m[..m.len() - 1] {
            let v = v.min(1.0 - acc).max(0.0);
            acc += v;
            c.push(v);
        }
    }
    c
}

/// Projects bivariate empirical inputs onto `spec`.
///
/// For the reversed (`y_to_x*`) variants the inputs must already be oriented
/// with `Y` as the cause: joint over `(y, x)` and one `X` marginal per value of `Y`.
pub fn iacm(inputs: &EmpiricalInputs, spec: &CausalModelSpec, mode: ErrorMode) -> Result<ApproximationResult> {
    if spec.variant.is_trivariate() {
        return Err(IacmError::UnsupportedModel(format!(
            "{} needs trivariate inputs",
            spec.variant
        )));
    }
    let layout = spec.layout()?;
    let sizes = layout.shape.axis_sizes();
    check_bivariate_range(sizes[0], sizes[1])?;
    if (inputs.b_x(), inputs.b_y()) != (sizes[0], sizes[1]) {
        return Err(contract(format!(
            "inputs range over ({}, {}), model {} expects ({}, {})",
            inputs.b_x(),
            inputs.b_y(),
            spec.variant,
            sizes[0],
            sizes[1]
        )));
    }
    let mut result = approximate(spec, &inputs.targets(), mode)?;
    result.fallback_used = inputs.fallback_used.clone();
    Ok(result)
}

/// Maps a degenerate projection to an infinite error.
pub fn approximation_error(inputs: &EmpiricalInputs, spec: &CausalModelSpec, mode: ErrorMode) -> Result<f64> {
    match iacm(inputs, spec, mode) {
        Ok(r) => Ok(r.error()),
        Err(IacmError::DegenerateModel) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Projects arbitrary block targets (in `layout.blocks` order) onto `spec`.
pub fn approximate(
    spec: &CausalModelSpec,
    targets: &[DiscreteDistribution],
    mode: ErrorMode,
) -> Result<ApproximationResult> {
    let layout = spec.layout()?;
    if targets.len() != layout.blocks.len() {
        return Err(contract(format!(
            "{} marginal targets for {} constraint blocks",
            targets.len(),
            layout.blocks.len()
        )));
    }
    let sizes = layout.shape.axis_sizes();
    for (t, block) in targets.iter().zip(&layout.blocks) {
        let expected: Vec<usize> = block.axes.iter().map(|&a| sizes[a]).collect();
        if t.shape().axis_sizes() != expected.as_slice() {
            return Err(contract(format!(
                "target for block {} has shape {:?}, expected {expected:?}",
                block.label,
                t.shape().axis_sizes()
            )));
        }
    }

    let support = build_support(spec)?;
    let a = constraint_matrix_for(&layout);
    let b = constraint_rhs(targets);
    let prob = LpProblem::new(a.rows, a.cols, a.data, b, support.objective_coeffs.clone())?;
    let sol = solve(&prob);
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(IacmError::InfeasibleConstraints {
                residual: sol.infeasibility,
            })
        }
        status => return Err(IacmError::Solver(format!("{status:?} after {} pivots", sol.iterations))),
    }

    let total: f64 = sol.p.iter().sum();
    let p_hat = DiscreteDistribution::new(layout.shape.clone(), sol.p.iter().map(|v| v / total).collect())?;
    let s_value = prob.objective_at(p_hat.mass());
    let support_mass: f64 = support.members().map(|i| p_hat.mass()[i]).sum();
    if support_mass <= 0.0 || s_value <= 0.0 {
        return Err(IacmError::DegenerateModel);
    }
    let tilde: Vec<f64> = p_hat
        .mass()
        .iter()
        .zip(&support.member_flags)
        .map(|(&p, &m)| if m { p / support_mass } else { 0.0 })
        .collect();
    let p_tilde = DiscreteDistribution::new(layout.shape.clone(), tilde)?;

    let observed = MarginalSelector::new(layout.observed_axes.clone())?;
    let local_error = kl_divergence(&marginalize(&p_tilde, &observed)?, &marginalize(&p_hat, &observed)?)?;
    Ok(ApproximationResult {
        model: *spec,
        global_error: -s_value.ln(),
        local_error,
        s_value,
        p_hat,
        p_tilde,
        error_mode: mode,
        fallback_used: Vec::new(),
    })
}

/// Pairs `x_t` with `y_{t+lag}`; rows must be in time order.
pub fn shift_for_time_lag<A: Clone, B: Clone>(rows: &[(A, B)], lag: usize) -> Result<Vec<(A, B)>> {
    if lag >= rows.len() {
        return Err(IacmError::InsufficientData(format!(
            "lag {lag} leaves no pairs from {} rows",
            rows.len()
        )));
    }
    Ok(rows[..rows.len() - lag]
        .iter()
        .zip(&rows[lag..])
        .map(|((x, _), (_, y))| (x.clone(), y.clone()))
        .collect())
}

/// Samples for the trivariate models. `do_z[a]` holds `(x, y)` rows under
/// `do(Z = a)`, `do_x[b]` holds `y` values under `do(X = b)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrivariateSample {
    /// `(x, y, z)` rows; `z` is ignored by the hidden-`Z` variants.
    pub observed: Vec<(usize, usize, usize)>,
    pub do_z: Vec<Vec<(usize, usize)>>,
    pub do_x: Vec<Vec<usize>>,
}

/// Empirical block targets for a trivariate model, with fallback flags per block.
pub fn trivariate_targets(
    spec: &CausalModelSpec,
    sample: &TrivariateSample,
    alpha: f64,
) -> Result<(Vec<DiscreteDistribution>, Vec<bool>)> {
    use crate::models::ModelVariant as V;
    let layout = spec.layout()?;
    if !spec.variant.is_trivariate() {
        return Err(IacmError::UnsupportedModel(format!("{} is bivariate", spec.variant)));
    }
    let (b_x, b_y, b_z) = (spec.b_x, spec.b_y, spec.b_z.unwrap_or(2));
    if sample.observed.is_empty() {
        return Err(IacmError::InsufficientData("no observational rows".into()));
    }
    let uniform = |sizes: Vec<usize>| Shape::new(sizes).map(DiscreteDistribution::uniform);
    let mut targets = Vec::new();
    let mut fallback = Vec::new();
    let mut push = |dist: Option<Result<DiscreteDistribution>>, sizes: Vec<usize>| -> Result<()> {
        match dist {
            Some(d) => {
                targets.push(d?);
                fallback.push(false);
            }
            None => {
                targets.push(uniform(sizes)?);
                fallback.push(true);
            }
        }
        Ok(())
    };
    let z_rows = |a: usize| sample.do_z.get(a).filter(|r| !r.is_empty());
    let x_rows = |b: usize| sample.do_x.get(b).filter(|r| !r.is_empty());
    match spec.variant {
        V::ZConfounder | V::ZConfounderHidden => {
            for a in 0..b_z {
                push(z_rows(a).map(|r| empirical_joint_smoothed(r, b_x, b_y, alpha)), vec![b_x, b_y])?;
            }
        }
        V::ZChain | V::ZChainHidden => {
            for a in 0..b_z {
                let xs = z_rows(a).map(|r| r.iter().map(|&(x, _)| x).collect::<Vec<_>>());
                push(xs.map(|v| empirical_marginal(&v, b_x, alpha)), vec![b_x])?;
            }
            for b in 0..b_x {
                push(x_rows(b).map(|v| empirical_marginal(v, b_y, alpha)), vec![b_y])?;
            }
        }
        V::ZCollider | V::ZColliderHidden => {
            for a in 0..b_z {
                let ys = z_rows(a).map(|r| r.iter().map(|&(_, y)| y).collect::<Vec<_>>());
                push(ys.map(|v| empirical_marginal(&v, b_y, alpha)), vec![b_y])?;
            }
            for b in 0..b_x {
                push(x_rows(b).map(|v| empirical_marginal(v, b_y, alpha)), vec![b_y])?;
            }
        }
        _ => unreachable!("checked trivariate above"),
    }
    let observed = if spec.variant.observes_z() {
        let mut counts = vec![0.0; b_x * b_y * b_z];
        for &(x, y, z) in &sample.observed {
            if x >= b_x || y >= b_y || z >= b_z {
                return Err(contract(format!("category ({x}, {y}, {z}) out of range")));
            }
            counts[(x * b_y + y) * b_z + z] += 1.0;
        }
        let total = counts.iter().sum::<f64>() + alpha * counts.len() as f64;
        DiscreteDistribution::from_sizes(&[b_x, b_y, b_z], counts.iter().map(|c| (c + alpha) / total).collect())?
    } else {
        let pairs: Vec<(usize, usize)> = sample.observed.iter().map(|&(x, y, _)| (x, y)).collect();
        empirical_joint_smoothed(&pairs, b_x, b_y, alpha)?
    };
    targets.push(observed);
    fallback.push(false);
    debug_assert_eq!(targets.len(), layout.blocks.len());
    Ok((targets, fallback))
}
