//! Synthetic cyclic noise models with ground truth `X -> Y`, and a benchmark
//! harness that tallies how often discovery recovers the direction.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::discovery::{categorize, default_bins, discover, Decision, DiscoveryConfig, DiscoveryData};
use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `Y = f(X) + N mod b_y`
    Additive,
    /// `Y = f(X) * N mod b_y`
    Multiplicative,
}

impl NoiseKind {
    pub fn combine(self, fx: usize, n: usize, b_y: usize) -> usize {
        match self {
            NoiseKind::Additive => (fx + n) % b_y,
            NoiseKind::Multiplicative => (fx * n) % b_y,
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = crate::error::IacmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(NoiseKind::Additive),
            "multiplicative" => Ok(NoiseKind::Multiplicative),
            other => Err(contract(format!("unknown noise kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseKind::Additive => "additive",
            NoiseKind::Multiplicative => "multiplicative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmConfig {
    pub b_x: usize,
    pub b_y: usize,
    pub noise_kind: NoiseKind,
    pub f: Vec<usize>,
    pub p_x: Vec<f64>,
    /// Distribution of the noise over `0..b_y`.
    pub p_n: Vec<f64>,
    pub n_obs: usize,
    pub n_int_per_value: usize,
    pub seed: u64,
}

impl ScmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b_x < 2 || self.b_y < 2 {
            return Err(contract(format!("ranges must be at least 2, got ({}, {})", self.b_x, self.b_y)));
        }
        if self.f.len() != self.b_x || self.f.iter().any(|&v| v >= self.b_y) {
            return Err(contract("f must map 0..b_x into 0..b_y"));
        }
        if self.f.iter().all(|&v| v == self.f[0]) {
            return Err(contract("f must not be constant"));
        }
        for (name, p, len) in [("p_x", &self.p_x, self.b_x), ("p_n", &self.p_n, self.b_y)] {
            let valid = p.len() == len && p.iter().all(|v| v.is_finite() && *v >= 0.0) && p.iter().sum::<f64>() > 0.0;
            if !valid {
                return Err(contract(format!("{name} must be {len} non-negative weights")));
            }
        }
        Ok(())
    }

    /// Analytic observational joint `P(x, y)`, row-major in `x`.
    pub fn joint(&self) -> Vec<f64> {
        let zx: f64 = self.p_x.iter().sum();
        let zn: f64 = self.p_n.iter().sum();
        let mut p = vec![0.0; self.b_x * self.b_y];
        for x in 0..self.b_x {
            for (n, &pn) in self.p_n.iter().enumerate() {
                let y = self.noise_kind.combine(self.f[x], n, self.b_y);
                p[x * self.b_y + y] += self.p_x[x] / zx * pn / zn;
            }
        }
        p
    }
}

/// Flat Dirichlet draw via normalized exponentials.
pub fn flat_dirichlet<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Uniformly random non-constant table `0..b_x -> 0..b_y`.
pub fn random_function<R: Rng + ?Sized>(b_x: usize, b_y: usize, rng: &mut R) -> Vec<usize> {
    loop {
        let f: Vec<usize> = (0..b_x).map(|_| rng.random_range(0..b_y)).collect();
        if f.iter().any(|&v| v != f[0]) {
            return f;
        }
    }
}

/// Draws a random model; interventions get `n_obs / b_x` rows per value.
pub fn random_scm<R: Rng + ?Sized>(b_x: usize, b_y: usize, noise_kind: NoiseKind, n_obs: usize, rng: &mut R) -> ScmConfig {
    ScmConfig {
        b_x,
        b_y,
        noise_kind,
        f: random_function(b_x, b_y, rng),
        p_x: flat_dirichlet(b_x, rng),
        p_n: flat_dirichlet(b_y, rng),
        n_obs,
        n_int_per_value: n_obs / b_x,
        seed: rng.random(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Environment {
    Observational,
    /// `do(X = a)`
    Intervention(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub x: usize,
    pub y: usize,
    pub env: Environment,
}

/// Observational block followed by one block per intervened value of `X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSample {
    pub rows: Vec<LabeledRow>,
}

impl SyntheticSample {
    pub fn observational(&self) -> Vec<(usize, usize)> {
        self.filtered(|e| e == Environment::Observational)
    }

    pub fn interventional(&self) -> Vec<(usize, usize)> {
        self.filtered(|e| e != Environment::Observational)
    }

    fn filtered(&self, keep: impl Fn(Environment) -> bool) -> Vec<(usize, usize)> {
        self.rows.iter().filter(|r| keep(r.env)).map(|r| (r.x, r.y)).collect()
    }

    /// All rows in order, without labels.
    pub fn pooled(&self) -> Vec<(usize, usize)> {
        self.rows.iter().map(|r| (r.x, r.y)).collect()
    }

    pub fn explicit(&self) -> DiscoveryData {
        DiscoveryData::Explicit {
            observational: self.observational(),
            do_x: self.interventional(),
            do_y: Vec::new(),
        }
    }
}

pub fn sample_scm(cfg: &ScmConfig) -> Result<SyntheticSample> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let px = WeightedIndex::new(&cfg.p_x).map_err(|e| contract(e.to_string()))?;
    let pn = WeightedIndex::new(&cfg.p_n).map_err(|e| contract(e.to_string()))?;
    let mut rows = Vec::with_capacity(cfg.n_obs + cfg.b_x * cfg.n_int_per_value);
    let mut draw = |x: usize, env, rng: &mut ChaCha8Rng| {
        let y = cfg.noise_kind.combine(cfg.f[x], pn.sample(rng), cfg.b_y);
        rows.push(LabeledRow { x, y, env });
    };
    for _ in 0..cfg.n_obs {
        let x = px.sample(&mut rng);
        draw(x, Environment::Observational, &mut rng);
    }
    for a in 0..cfg.b_x {
        for _ in 0..cfg.n_int_per_value {
            draw(a, Environment::Intervention(a), &mut rng);
        }
    }
    Ok(SyntheticSample { rows })
}

/// Maps a synthetic sample to the ranges discovery runs on (2 if either
/// variable is binary, else 3), binning wider ranges by equal frequency.
pub fn discretized_rows(rows: &[(usize, usize)], b_x: usize, b_y: usize) -> Result<(Vec<(usize, usize)>, usize)> {
    let xs: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1 as f64).collect();
    let bins = default_bins(b_x, b_y);
    let cx = categorize(&xs, bins)?;
    let cy = categorize(&ys, bins)?;
    Ok((cx.labels.into_iter().zip(cy.labels).collect(), bins))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkMethod {
    pub name: String,
    pub config: DiscoveryConfig,
}

impl BenchmarkMethod {
    pub fn iacm() -> Self {
        Self {
            name: "IACM".into(),
            config: DiscoveryConfig::default(),
        }
    }

    pub fn iacm_plus() -> Self {
        Self {
            name: "IACM+".into(),
            config: DiscoveryConfig {
                anm_objectives: true,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub ranges: Vec<(usize, usize)>,
    pub noise_kind: NoiseKind,
    pub n_models: usize,
    pub n_samples: usize,
    pub methods: Vec<BenchmarkMethod>,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            ranges: vec![(2, 2), (3, 3)],
            noise_kind: NoiseKind::Additive,
            n_models: 200,
            n_samples: 1000,
            methods: vec![BenchmarkMethod::iacm()],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub b_x: usize,
    pub b_y: usize,
    pub method: String,
    pub correct: usize,
    pub wrong: usize,
    pub no_decision: usize,
    /// Instances where discovery returned an error.
    pub failed: usize,
    pub total: usize,
}

impl BenchmarkRow {
    fn pct(&self, k: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * k as f64 / self.total as f64
        }
    }

    pub fn correct_rate(&self) -> f64 {
        self.pct(self.correct)
    }

    pub fn wrong_rate(&self) -> f64 {
        self.pct(self.wrong)
    }

    /// Errors count as no decision.
    pub fn none_rate(&self) -> f64 {
        self.pct(self.no_decision + self.failed)
    }

    /// `correct,wrong,none` in rounded percent.
    pub fn cell(&self) -> String {
        format!(
            "{:.0},{:.0},{:.0}",
            self.correct_rate(),
            self.wrong_rate(),
            self.none_rate()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub noise_kind: NoiseKind,
    pub n_models: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub rows: Vec<BenchmarkRow>,
}

impl BenchmarkReport {
    pub fn row(&self, b_x: usize, b_y: usize, method: &str) -> Option<&BenchmarkRow> {
        self.rows
            .iter()
            .find(|r| r.b_x == b_x && r.b_y == b_y && r.method == method)
    }

    /// One line per range configuration, one `correct,wrong,none` column per method.
    pub fn to_table(&self) -> String {
        let mut methods: Vec<&str> = Vec::new();
        let mut ranges: Vec<(usize, usize)> = Vec::new();
        for r in &self.rows {
            if !methods.contains(&r.method.as_str()) {
                methods.push(&r.method);
            }
            if !ranges.contains(&(r.b_x, r.b_y)) {
                ranges.push((r.b_x, r.b_y));
            }
        }
        let mut grid: Vec<Vec<String>> = vec![std::iter::once("b_x,b_y".to_string())
            .chain(methods.iter().map(|m| m.to_string()))
            .collect()];
        for &(bx, by) in &ranges {
            let mut line = vec![format!("{bx},{by}")];
            for m in &methods {
                line.push(self.row(bx, by, m).map_or_else(|| "-".into(), BenchmarkRow::cell));
            }
            grid.push(line);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|c| grid.iter().map(|l| l[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = format!(
            "# {} noise, {} models x {} samples, seed {}\n",
            self.noise_kind, self.n_models, self.n_samples, self.seed
        );
        for line in grid {
            let cells: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Per-instance stream so results do not depend on evaluation order.
fn instance_rng(seed: u64, range_index: usize, model: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((range_index as u64) << 32) | model as u64);
    rng
}

fn run_instance(cfg: &BenchmarkConfig, range_index: usize, model: usize) -> Result<Vec<Decision>> {
    let (b_x, b_y) = cfg.ranges[range_index];
    let mut rng = instance_rng(cfg.seed, range_index, model);
    let scm = random_scm(b_x, b_y, cfg.noise_kind, cfg.n_samples, &mut rng);
    let sample = sample_scm(&scm)?;
    let (rows, bins) = discretized_rows(&sample.pooled(), b_x, b_y)?;
    let data = DiscoveryData::Pooled(rows);
    cfg.methods
        .iter()
        .map(|m| {
            let dc = DiscoveryConfig {
                seed: scm.seed,
                ..m.config
            };
            discover(&data, bins, bins, &dc).map(|v| v.decision)
        })
        .collect()
}

fn map_instances<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    if cfg.n_models == 0 {
        return Err(contract("n_models must be at least 1"));
    }
    if cfg.methods.is_empty() {
        return Err(contract("at least one method is required"));
    }
    for &(b_x, b_y) in &cfg.ranges {
        if b_x < 2 || b_y < 2 {
            return Err(contract(format!("invalid range configuration ({b_x}, {b_y})")));
        }
    }
    let mut rows = Vec::new();
    for (ri, &(b_x, b_y)) in cfg.ranges.iter().enumerate() {
        let outcomes = map_instances(cfg.n_models, |m| run_instance(cfg, ri, m));
        for (mi, method) in cfg.methods.iter().enumerate() {
            let mut row = BenchmarkRow {
                b_x,
                b_y,
                method: method.name.clone(),
                correct: 0,
                wrong: 0,
                no_decision: 0,
                failed: 0,
                total: cfg.n_models,
            };
            for o in &outcomes {
                match o.as_ref().map(|d| d[mi]) {
                    Ok(Decision::XToY) => row.correct += 1,
                    Ok(Decision::YToX) => row.wrong += 1,
                    Ok(Decision::NoDecision) => row.no_decision += 1,
                    Err(_) => row.failed += 1,
                }
            }
            rows.push(row);
        }
    }
    Ok(BenchmarkReport {
        noise_kind: cfg.noise_kind,
        n_models: cfg.n_models,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(noise_kind: NoiseKind, f: Vec<usize>, p_n: Vec<f64>) -> ScmConfig {
        let b_x = f.len();
        ScmConfig {
            b_x,
            b_y: p_n.len(),
            noise_kind,
            f,
            p_x: vec![1.0 / b_x as f64; b_x],
            p_n,
            n_obs: 300,
            n_int_per_value: 100,
            seed: 5,
        }
    }

    #[test]
    fn noiseless_additive_identity() {
        let s = sample_scm(&cfg(NoiseKind::Additive, vec![0, 1, 2], vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.rows.len(), 600);
        assert!(s.rows.iter().all(|r| r.y == r.x));
    }

    #[test]
    fn annihilating_multiplicative_noise() {
        let s = sample_scm(&cfg(NoiseKind::Multiplicative, vec![1, 2, 0], vec![1.0, 0.0, 0.0])).unwrap();
        assert!(s.rows.iter().all(|r| r.y == 0));
    }

    #[test]
    fn intervention_blocks_hold_x_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_scm(3, 4, NoiseKind::Additive, 90, &mut rng);
        let s = sample_scm(&c).unwrap();
        assert_eq!(s.observational().len(), 90);
        for r in &s.rows {
            if let Environment::Intervention(a) = r.env {
                assert_eq!(r.x, a);
            }
        }
        assert_eq!(s.interventional().len(), 90);
    }

    #[test]
    fn random_functions_are_never_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..10_000 {
            let (bx, by) = (2 + i % 4, 2 + (i / 4) % 3);
            let f = random_function(bx, by, &mut rng);
            assert!(f.iter().any(|&v| v != f[0]));
            assert!(f.iter().all(|&v| v < by));
        }
    }

    #[test]
    fn dirichlet_draws_are_on_the_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut mean = [0.0; 3];
        for _ in 0..3000 {
            let p = flat_dirichlet(3, &mut rng);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (m, v) in mean.iter_mut().zip(p) {
                *m += v / 3000.0;
            }
        }
        for m in mean {
            assert!((m - 1.0 / 3.0).abs() < 0.02);
        }
    }

    #[test]
    fn analytic_joint_examples() {
        let c = cfg(NoiseKind::Multiplicative, vec![1, 2], vec![0.5, 0.25, 0.25]);
        // x=0: f=1, y = n; x=1: f=2, y = 2n mod 3 = (0, 2, 1)
        let j = c.joint();
        let want = [0.25, 0.125, 0.125, 0.25, 0.125, 0.125];
        for (a, b) in j.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(sample_scm(&cfg(NoiseKind::Additive, vec![1, 1], vec![0.5, 0.5])).is_err());
        assert!(sample_scm(&cfg(NoiseKind::Additive, vec![0, 2], vec![0.5, 0.5])).is_err());
        let mut c = cfg(NoiseKind::Additive, vec![0, 1], vec![0.5, 0.5]);
        c.p_x = vec![0.0, 0.0];
        assert!(sample_scm(&c).is_err());
    }

    #[test]
    fn wide_ranges_are_binned() {
        let rows: Vec<(usize, usize)> = (0..100).map(|i| (i % 2, i % 10)).collect();
        let (r, bins) = discretized_rows(&rows, 2, 10).unwrap();
        assert_eq!(bins, 2);
        assert!(r.iter().all(|&(x, y)| x < 2 && y < 2));
        let rows: Vec<(usize, usize)> = (0..100).map(|i| (i % 5, (i / 5) % 5)).collect();
        let (r, bins) = discretized_rows(&rows, 5, 5).unwrap();
        assert_eq!(bins, 3);
        assert!(r.iter().all(|&(x, y)| x < 3 && y < 3));
    }

    #[test]
    fn report_counts_partition_the_instances() {
        let c = BenchmarkConfig {
            ranges: vec![(2, 2), (3, 3)],
            n_models: 12,
            n_samples: 200,
            methods: vec![BenchmarkMethod::iacm(), BenchmarkMethod::iacm_plus()],
            seed: 11,
            ..Default::default()
        };
        let r = run_benchmark(&c).unwrap();
        assert_eq!(r.rows.len(), 4);
        for row in &r.rows {
            assert_eq!(row.correct + row.wrong + row.no_decision + row.failed, row.total);
            let s = row.correct_rate() + row.wrong_rate() + row.none_rate();
            assert!((s - 100.0).abs() < 1e-9);
        }
        assert_eq!(r, run_benchmark(&c).unwrap());
        let table = r.to_table();
        assert!(table.contains("IACM+"));
        assert_eq!(table.lines().count(), 4);
        let back: BenchmarkReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn zero_models_rejected() {
        let c = BenchmarkConfig {
            n_models: 0,
            ..Default::default()
        };
        assert!(run_benchmark(&c).is_err());
    }
}
