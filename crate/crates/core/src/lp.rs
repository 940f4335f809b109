//! Dense two-phase primal simplex for `max c'p  s.t.  A p = b, p >= 0`.
//!
//! Entering columns are chosen by largest reduced cost until a run of
//! degenerate pivots trips [`DEGENERACY_LIMIT`], after which Bland's rule is
//! used for the rest of the solve. Leaving rows break ratio ties by the
//! smallest basic variable index. Nothing is randomized, so identical inputs
//! always produce the identical vertex.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEASIBILITY_TOL: f64 = 1e-7;
const OPTIMALITY_TOL: f64 = 1e-10;
const DEGENERACY_LIMIT: usize = 50;
const MAX_ITERATIONS: usize = 100_000;

/// Equality-constrained LP in standard form; `a` is row-major `m x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl LpProblem {
    pub fn new(rows: usize, cols: usize, a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.len() != rows * cols || b.len() != rows || c.len() != cols {
            return Err(contract(format!(
                "inconsistent LP dimensions: A has {} entries for {rows}x{cols}, b {}, c {}",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        if a.iter().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(contract("LP data must be finite"));
        }
        Ok(Self { rows, cols, a, b, c })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn objective_at(&self, p: &[f64]) -> f64 {
        self.c.iter().zip(p).map(|(c, p)| c * p).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point, meaningful only when `status == Optimal`.
    pub p: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Phase-one infeasibility when the problem is infeasible.
    pub infeasibility: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// `max_i |(A p - b)_i|`
    pub max_residual: f64,
    pub min_component: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.max_residual <= FEASIBILITY_TOL && self.min_component >= -1e-9
    }
}

pub fn feasibility_check(prob: &LpProblem, p: &[f64]) -> Result<FeasibilityReport> {
    if p.len() != prob.cols {
        return Err(contract(format!("point has {} entries, LP has {} columns", p.len(), prob.cols)));
    }
    let max_residual = (0..prob.rows)
        .map(|i| {
            let ax: f64 = prob.row(i).iter().zip(p).map(|(a, x)| a * x).sum();
            (ax - prob.b[i]).abs()
        })
        .fold(0.0, f64::max);
    let min_component = p.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FeasibilityReport {
        max_residual,
        min_component,
    })
}

struct Tableau {
    /// Active constraint rows; `width = cols + artificials + 1` (last = rhs).
    data: Vec<f64>,
    rows: usize,
    width: usize,
    cols: usize,
    basis: Vec<usize>,
    /// Original row index of each active row.
    origin: Vec<usize>,
    /// Reduced cost row (same width, last entry = -objective).
    cost: Vec<f64>,
    degenerate_run: usize,
    bland: bool,
    iterations: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn new(prob: &LpProblem) -> Self {
        let (m, n) = (prob.rows, prob.cols);
        let width = n + m + 1;
        let mut data = vec![0.0; m * width];
        for i in 0..m {
            let sign = if prob.b[i] < 0.0 { -1.0 } else { 1.0 };
            let row = &mut data[i * width..(i + 1) * width];
            for (dst, &src) in row[..n].iter_mut().zip(prob.row(i)) {
                *dst = sign * src;
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * prob.b[i];
        }
        Self {
            data,
            rows: m,
            width,
            cols: n,
            basis: (n..n + m).collect(),
            origin: (0..m).collect(),
            cost: vec![0.0; width],
            degenerate_run: 0,
            bland: false,
            iterations: 0,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    /// Sets the reduced-cost row for maximizing `obj` (indexed over all columns).
    fn price(&mut self, obj: &[f64]) {
        let w = self.width;
        self.cost.iter_mut().for_each(|v| *v = 0.0);
        for (c, &o) in self.cost[..w - 1].iter_mut().zip(obj) {
            *c = -o;
        }
        for i in 0..self.rows {
            let cb = obj[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (cj, &aij) in self.cost.iter_mut().zip(row) {
                    *cj += cb * aij;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let inv = 1.0 / self.data[r * w + e];
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.data[r * w + e] = 1.0;
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + e];
            if f != 0.0 {
                let row = &mut self.data[i * w..(i + 1) * w];
                for (v, &p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[e] = 0.0;
            }
        }
        let f = self.cost[e];
        if f != 0.0 {
            for (v, &p) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.cost[e] = 0.0;
        }
        self.basis[r] = e;
        self.iterations += 1;
    }

    fn step(&mut self, allowed: usize) -> Step {
        let entering = if self.bland {
            (0..allowed).find(|&j| self.cost[j] < -OPTIMALITY_TOL)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..allowed {
                let d = self.cost[j];
                if d < -OPTIMALITY_TOL && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
            best.map(|(j, _)| j)
        };
        let Some(e) = entering else {
            return Step::Optimal;
        };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, e);
            if a > PIVOT_TOL {
                let ratio = self.rhs(i).max(0.0) / a;
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, ratio)) = leave else {
            return Step::Unbounded;
        };
        if ratio <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run > DEGENERACY_LIMIT {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }
        self.pivot(r, e);
        Step::Pivoted
    }

    fn run(&mut self, allowed: usize) -> std::result::Result<Step, ()> {
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(());
            }
            match self.step(allowed) {
                Step::Pivoted => continue,
                done => return Ok(done),
            }
        }
    }

    /// Pivots basic artificials out, dropping rows that are linearly dependent.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows {
            if self.basis[i] < self.cols {
                i += 1;
                continue;
            }
            let best = (0..self.cols)
                .map(|j| (j, self.at(i, j).abs()))
                .filter(|&(_, v)| v > 1e-9)
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            match best {
                Some((j, _)) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    let w = self.width;
                    self.data.drain(i * w..(i + 1) * w);
                    self.basis.remove(i);
                    self.origin.remove(i);
                    self.rows -= 1;
                }
            }
        }
    }
}

/// Solves the LP. Infeasibility and unboundedness are reported in the status.
pub fn solve(prob: &LpProblem) -> LpSolution {
    let (m, n) = (prob.rows, prob.cols);
    let failed = |status, iterations, infeasibility| LpSolution {
        status,
        p: vec![0.0; n],
        objective: f64::NAN,
        iterations,
        infeasibility,
    };
    let mut t = Tableau::new(prob);

    let mut phase_one = vec![0.0; n + m];
    phase_one[n..].iter_mut().for_each(|v| *v = -1.0);
    t.price(&phase_one);
    if t.run(n + m).is_err() {
        return failed(LpStatus::NumericalFailure, t.iterations, f64::NAN);
    }
    let infeasibility = (0..t.rows)
        .filter(|&i| t.basis[i] >= n)
        .map(|i| t.rhs(i).abs())
        .sum::<f64>();
    if infeasibility > FEASIBILITY_TOL {
        return failed(LpStatus::Infeasible, t.iterations, infeasibility);
    }
    t.expel_artificials();

    let mut phase_two = prob.c.clone();
    phase_two.resize(n + m, 0.0);
    t.price(&phase_two);
    t.degenerate_run = 0;
    match t.run(n) {
        Err(()) => return failed(LpStatus::NumericalFailure, t.iterations, 0.0),
        Ok(Step::Unbounded) => return failed(LpStatus::Unbounded, t.iterations, 0.0),
        Ok(_) => {}
    }

    let mut p = vec![0.0; n];
    for i in 0..t.rows {
        p[t.basis[i]] = t.rhs(i);
    }
    if let Some(refined) = refine_basic_solution(prob, &t.basis, &t.origin) {
        if refined.iter().all(|&v| v >= -1e-9) {
            p = refined;
        }
    }
    p.iter_mut().for_each(|v| {
        if *v < 0.0 {
            *v = 0.0
        }
    });
    let report = feasibility_check(prob, &p).expect("dimensions match");
    if report.max_residual > FEASIBILITY_TOL {
        return failed(LpStatus::NumericalFailure, t.iterations, report.max_residual);
    }
    LpSolution {
        objective: prob.objective_at(&p),
        status: LpStatus::Optimal,
        p,
        iterations: t.iterations,
        infeasibility: 0.0,
    }
}

/// Recomputes the basic variables from the original data, `B x_B = b`.
fn refine_basic_solution(prob: &LpProblem, basis: &[usize], origin: &[usize]) -> Option<Vec<f64>> {
    let k = basis.len();
    let mut mat: Vec<f64> = Vec::with_capacity(k * (k + 1));
    for &r in origin {
        for &j in basis {
            mat.push(prob.a(r, j));
        }
        mat.push(prob.b[r]);
    }
    let xb = gauss_solve(&mut mat, k)?;
    let mut p = vec![0.0; prob.cols];
    for (&j, v) in basis.iter().zip(xb) {
        p[j] = v;
    }
    Some(p)
}

/// Solves a `k x k` system stored as an augmented row-major matrix.
pub(crate) fn gauss_solve(mat: &mut [f64], k: usize) -> Option<Vec<f64>> {
    let w = k + 1;
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| mat[a * w + col].abs().total_cmp(&mat[b * w + col].abs()))?;
        if mat[piv * w + col].abs() < 1e-12 {
            return None;
        }
        if piv != col {
            for j in 0..w {
                mat.swap(piv * w + j, col * w + j);
            }
        }
        let d = mat[col * w + col];
        for row in col + 1..k {
            let f = mat[row * w + col] / d;
            if f != 0.0 {
                for j in col..w {
                    mat[row * w + j] -= f * mat[col * w + j];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|j| mat[row * w + j] * x[j]).sum();
        x[row] = (mat[row * w + k] - s) / mat[row * w + row];
    }
    Some(x)
}
