//! Dense probability distributions over finite product spaces.
//!
//! Cells are addressed by a mixed-radix flat index with the first axis most
//! significant. For the bivariate models the axis order is
//! `(x, y, y_1, ..., y_bx)`, so with binary ranges the flat index written in
//! base 2 reads exactly like the pattern strings `xyy0y1` (e.g. `0110` = 6).

use serde::{Deserialize, Serialize};

use crate::error::{contract, IacmError, Result};

/// Entries must sum to one within this tolerance once constructed.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Inputs whose total is off by at most this much are renormalized on construction.
pub const RENORMALIZE_TOL: f64 = 1e-6;

/// Sizes of the axes of a finite product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Shape {
    axis_sizes: Vec<usize>,
}

impl Shape {
    pub fn new(axis_sizes: Vec<usize>) -> Result<Self> {
        if axis_sizes.is_empty() {
            return Err(contract("shape needs at least one axis"));
        }
        if axis_sizes.contains(&0) {
            return Err(contract(format!("zero-sized axis in {axis_sizes:?}")));
        }
        Ok(Self { axis_sizes })
    }

    pub fn axis_sizes(&self) -> &[usize] {
        &self.axis_sizes
    }

    pub fn num_axes(&self) -> usize {
        self.axis_sizes.len()
    }

    /// Total number of cells.
    pub fn cells(&self) -> usize {
        self.axis_sizes.iter().product()
    }

    /// Flat index of a coordinate tuple.
    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.axis_sizes.len());
        coords
            .iter()
            .zip(&self.axis_sizes)
            .fold(0, |acc, (&c, &s)| acc * s + c)
    }

    /// Coordinates of a flat index, written into `out`.
    pub fn coords_into(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &size) in out.iter_mut().zip(&self.axis_sizes).rev() {
            *slot = index % size;
            index /= size;
        }
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.axis_sizes.len()];
        self.coords_into(index, &mut out);
        out
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = IacmError;

    fn try_from(value: Vec<usize>) -> Result<Self> {
        Shape::new(value)
    }
}

impl From<Shape> for Vec<usize> {
    fn from(shape: Shape) -> Self {
        shape.axis_sizes
    }
}

/// Ordered subset of axes kept by a marginalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalSelector {
    axes: Vec<usize>,
}

impl MarginalSelector {
    pub fn new(axes: Vec<usize>) -> Result<Self> {
        if axes.is_empty() {
            return Err(contract("marginal selector must keep at least one axis"));
        }
        if axes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(contract(format!("selector axes not strictly increasing: {axes:?}")));
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    fn check(&self, shape: &Shape) -> Result<()> {
        match self.axes.last() {
            Some(&last) if last < shape.num_axes() => Ok(()),
            _ => Err(contract(format!(
                "selector {:?} out of bounds for {} axes",
                self.axes,
                shape.num_axes()
            ))),
        }
    }
}

#[derive(Deserialize)]
struct RawDistribution {
    shape: Shape,
    mass: Vec<f64>,
}

/// A probability vector over every cell of a [`Shape`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DiscreteDistribution {
    shape: Shape,
    mass: Vec<f64>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = IacmError;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        DiscreteDistribution::new(raw.shape, raw.mass)
    }
}

impl DiscreteDistribution {
    /// Validates and, if the total is within [`RENORMALIZE_TOL`] of one, renormalizes.
    pub fn new(shape: Shape, mut mass: Vec<f64>) -> Result<Self> {
        if mass.len() != shape.cells() {
            return Err(contract(format!(
                "mass has {} entries, shape {:?} has {} cells",
                mass.len(),
                shape.axis_sizes(),
                shape.cells()
            )));
        }
        if let Some(bad) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(contract(format!("invalid probability entry {bad}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > RENORMALIZE_TOL {
            return Err(contract(format!("probabilities sum to {total}, expected 1")));
        }
        if total != 1.0 {
            mass.iter_mut().for_each(|m| *m /= total);
        }
        Ok(Self { shape, mass })
    }

    pub fn from_sizes(axis_sizes: &[usize], mass: Vec<f64>) -> Result<Self> {
        Self::new(Shape::new(axis_sizes.to_vec())?, mass)
    }

    pub fn uniform(shape: Shape) -> Self {
        let n = shape.cells();
        Self {
            mass: vec![1.0 / n as f64; n],
            shape,
        }
    }

    pub fn point_mass(shape: Shape, coords: &[usize]) -> Result<Self> {
        if coords.len() != shape.num_axes()
            || coords.iter().zip(shape.axis_sizes()).any(|(c, s)| c >= s)
        {
            return Err(contract(format!("coordinates {coords:?} out of range")));
        }
        let mut mass = vec![0.0; shape.cells()];
        mass[shape.index(coords)] = 1.0;
        Ok(Self { shape, mass })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    pub fn prob(&self, coords: &[usize]) -> f64 {
        self.mass[self.shape.index(coords)]
    }

    /// Largest absolute difference between two distributions on the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Sums out every axis not kept by `sel`.
pub fn marginalize(p: &DiscreteDistribution, sel: &MarginalSelector) -> Result<DiscreteDistribution> {
    sel.check(p.shape())?;
    let sizes = p.shape().axis_sizes();
    let kept: Vec<usize> = sel.axes().iter().map(|&a| sizes[a]).collect();
    let out_shape = Shape::new(kept)?;
    let mut out = vec![0.0; out_shape.cells()];
    let mut coords = vec![0; sizes.len()];
    for (i, &m) in p.mass().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        p.shape().coords_into(i, &mut coords);
        let j = sel.axes().iter().fold(0, |acc, &a| acc * sizes[a] + coords[a]);
        out[j] += m;
    }
    Ok(DiscreteDistribution {
        shape: out_shape,
        mass: out,
    })
}

/// Relative entropy `D(P || Q)` in nats, `+inf` when `Q` misses part of the support of `P`.
pub fn kl_divergence(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    if p.shape() != q.shape() {
        return Err(contract(format!(
            "shape mismatch: {:?} vs {:?}",
            p.shape().axis_sizes(),
            q.shape().axis_sizes()
        )));
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.mass().iter().zip(q.mass()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi / qi).ln();
    }
    Ok(total.max(0.0))
}

/// Joint relative frequencies of `(x, y)` category pairs.
pub fn empirical_joint(rows: &[(usize, usize)], b_x: usize, b_y: usize) -> Result<DiscreteDistribution> {
    empirical_joint_smoothed(rows, b_x, b_y, 0.0)
}

/// Like [`empirical_joint`] with additive smoothing `alpha` per cell.
pub fn empirical_joint_smoothed(
    rows: &[(usize, usize)],
    b_x: usize,
    b_y: usize,
    alpha: f64,
) -> Result<DiscreteDistribution> {
    if rows.is_empty() {
        return Err(IacmError::InsufficientData("no rows for empirical joint".into()));
    }
    let shape = Shape::new(vec![b_x, b_y])?;
    let mut counts = vec![0.0; shape.cells()];
    for &(x, y) in rows {
        if x >= b_x || y >= b_y {
            return Err(contract(format!("category ({x}, {y}) outside {b_x}x{b_y}")));
        }
        counts[x * b_y + y] += 1.0;
    }
    normalize_counts(shape, counts, alpha)
}

/// Relative frequencies of single categories.
pub fn empirical_marginal(values: &[usize], b: usize, alpha: f64) -> Result<DiscreteDistribution> {
    if values.is_empty() {
        return Err(IacmError::InsufficientData("no rows for empirical marginal".into()));
    }
    let shape = Shape::new(vec![b])?;
    let mut counts = vec![0.0; b];
    for &v in values {
        if v >= b {
            return Err(contract(format!("category {v} outside range {b}")));
        }
        counts[v] += 1.0;
    }
    normalize_counts(shape, counts, alpha)
}

fn normalize_counts(shape: Shape, mut counts: Vec<f64>, alpha: f64) -> Result<DiscreteDistribution> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(contract(format!("smoothing must be a nonnegative number, got {alpha}")));
    }
    let total: f64 = counts.iter().sum::<f64>() + alpha * counts.len() as f64;
    counts.iter_mut().for_each(|c| *c = (*c + alpha) / total);
    DiscreteDistribution::new(shape, counts)
}

/// Category labels produced by [`discretize_equal_frequency`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discretization {
    pub labels: Vec<usize>,
    /// Fewer distinct labels than requested bins (ties or too few distinct values).
    pub degraded: bool,
}

/// Quantile binning: a value lands in bin `floor(rank * bins / n)`, where `rank`
/// is the number of strictly smaller values, so ties always share a bin.
pub fn discretize_equal_frequency(values: &[f64], bins: usize) -> Result<Discretization> {
    if bins < 2 {
        return Err(contract(format!("need at least 2 bins, got {bins}")));
    }
    if values.is_empty() {
        return Err(IacmError::InsufficientData("no values to discretize".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(contract("cannot discretize NaN"));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut labels = vec![0; n];
    let mut rank = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && values[order[pos - 1]] != values[i] {
            rank = pos;
        }
        labels[i] = rank * bins / n;
    }
    let mut seen = vec![false; bins];
    labels.iter().for_each(|&l| seen[l] = true);
    let degraded = seen.iter().any(|s| !s);
    Ok(Discretization { labels, degraded })
}
