//! CSV ingestion: column selection, environment labels, time lag and
//! conversion of raw cells to categories.

use std::collections::BTreeMap;
use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use iacm::approx::{shift_for_time_lag, TrivariateSample};
use iacm::discovery::{categorize, default_bins, DiscoveryData};

/// Which variable an environment intervenes on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Env {
    Obs,
    Do(Target, String),
}

impl Env {
    /// `obs`, `do:<v>` (on x), or `do:x=<v>` / `do:y=<v>` / `do:z=<v>`.
    pub fn parse(label: &str) -> Result<Self> {
        let label = label.trim();
        if label == "obs" {
            return Ok(Env::Obs);
        }
        let rest = label
            .strip_prefix("do:")
            .ok_or_else(|| anyhow!("environment '{label}' is neither 'obs' nor 'do:...'"))?;
        let (target, value) = match rest.split_once('=') {
            Some(("x", v)) => (Target::X, v),
            Some(("y", v)) => (Target::Y, v),
            Some(("z", v)) => (Target::Z, v),
            Some((var, _)) => bail!("environment '{label}' intervenes on unknown variable '{var}'"),
            None => (Target::X, rest),
        };
        if value.is_empty() {
            bail!("environment '{label}' has no intervention value");
        }
        Ok(Env::Do(target, value.to_string()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ColumnSpec {
    pub x: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
    pub env: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
struct RawRow {
    x: String,
    y: String,
    z: Option<String>,
    env: Env,
}

/// Rows of a CSV file after column selection; cells are still raw strings.
#[derive(Debug, Clone)]
pub struct Dataset {
    rows: Vec<RawRow>,
    labeled: bool,
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .or_else(|| name.parse::<usize>().ok().filter(|&i| i < headers.len()))
        .ok_or_else(|| anyhow!("unknown column '{name}'"))
}

impl Dataset {
    pub fn from_path(path: &str, cols: &ColumnSpec) -> Result<Self> {
        let mut text = String::new();
        if path == "-" {
            std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        } else {
            text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        }
        Self::from_csv(&text, cols)
    }

    /// Header row required. Defaults: first column is `x`, second is `y`,
    /// a column named `env` (if any) holds environment labels.
    pub fn from_csv(text: &str, cols: &ColumnSpec) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().context("reading CSV header")?.clone();
        let env_default = headers.iter().position(|h| h == "env");
        let data_columns: Vec<usize> = (0..headers.len()).filter(|&i| Some(i) != env_default).collect();
        let pick = |name: &Option<String>, fallback: usize| -> Result<usize> {
            match name {
                Some(n) => column_index(&headers, n),
                None => data_columns
                    .get(fallback)
                    .copied()
                    .ok_or_else(|| anyhow!("CSV needs at least {} data columns", fallback + 1)),
            }
        };
        let xi = pick(&cols.x, 0)?;
        let yi = pick(&cols.y, 1)?;
        let zi = cols.z.as_ref().map(|n| column_index(&headers, n)).transpose()?;
        let ei = match &cols.env {
            Some(n) => Some(column_index(&headers, n)?),
            None => env_default,
        };

        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.with_context(|| format!("malformed CSV record {}", line + 2))?;
            let cell = |i: usize| -> Result<String> {
                record
                    .get(i)
                    .map(str::to_string)
                    .ok_or_else(|| anyhow!("record {} has no column {i}", line + 2))
            };
            let env = match ei {
                Some(i) => Env::parse(&cell(i)?).with_context(|| format!("record {}", line + 2))?,
                None => Env::Obs,
            };
            let mut row = RawRow {
                x: cell(xi)?,
                y: cell(yi)?,
                z: zi.map(cell).transpose()?,
                env,
            };
            if let Env::Do(target, value) = &row.env {
                let slot = match target {
                    Target::X => Some(&mut row.x),
                    Target::Y => Some(&mut row.y),
                    Target::Z => row.z.as_mut(),
                };
                if let Some(slot) = slot {
                    if slot.is_empty() {
                        *slot = value.clone();
                    } else if !same_value(slot, value) {
                        bail!("record {}: value '{slot}' contradicts intervention '{value}'", line + 2);
                    }
                }
            }
            rows.push(row);
        }
        Ok(Self {
            rows,
            labeled: ei.is_some(),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Pairs `x_t` with `y_{t+lag}` within each environment, keeping file order.
    pub fn with_lag(&self, lag: usize) -> Result<Self> {
        if lag == 0 {
            return Ok(self.clone());
        }
        let mut groups: BTreeMap<&Env, Vec<&RawRow>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry(&r.env).or_default().push(r);
        }
        let mut rows = Vec::new();
        for group in groups.values() {
            let pairs: Vec<(&RawRow, &RawRow)> = group.iter().map(|r| (*r, *r)).collect();
            for (a, b) in shift_for_time_lag(&pairs, lag)? {
                rows.push(RawRow {
                    y: b.y.clone(),
                    ..a.clone()
                });
            }
        }
        Ok(Self {
            rows,
            labeled: self.labeled,
        })
    }

    fn column(&self, f: impl Fn(&RawRow) -> Option<&String>) -> Vec<&String> {
        self.rows.iter().filter_map(f).collect()
    }

    /// Range sizes to use: explicit overrides, else 2 if `x` or `y` is binary, else 3.
    pub fn ranges(&self, bx: Option<usize>, by: Option<usize>, bz: Option<usize>) -> (usize, usize, usize) {
        let dx = distinct(&self.column(|r| Some(&r.x)));
        let dy = distinct(&self.column(|r| Some(&r.y)));
        let dz = distinct(&self.column(|r| r.z.as_ref()));
        let b = default_bins(dx, dy);
        (bx.unwrap_or(b), by.unwrap_or(b), bz.unwrap_or(default_bins(dz, dz)))
    }

    fn encode(&self, bins: (usize, usize, usize)) -> Result<Vec<Encoded>> {
        let xs = encode_column(&self.column(|r| Some(&r.x)), bins.0).context("column x")?;
        let ys = encode_column(&self.column(|r| Some(&r.y)), bins.1).context("column y")?;
        let has_z = self.rows.iter().all(|r| r.z.is_some()) && !self.rows.is_empty() && self.rows[0].z.is_some();
        let zs = if has_z {
            Some(encode_column(&self.column(|r| r.z.as_ref()), bins.2).context("column z")?)
        } else {
            None
        };
        Ok((0..self.rows.len())
            .map(|i| Encoded {
                x: xs[i],
                y: ys[i],
                z: zs.as_ref().map(|z| z[i]),
                env: self.rows[i].env.clone(),
            })
            .collect())
    }

    /// Bivariate discovery data: labeled files keep their environments,
    /// unlabeled ones are split by the configured preprocessing.
    pub fn discovery_data(&self, b_x: usize, b_y: usize) -> Result<DiscoveryData> {
        let rows = self.encode((b_x, b_y, 2))?;
        if !self.labeled {
            return Ok(DiscoveryData::Pooled(rows.iter().map(|r| (r.x, r.y)).collect()));
        }
        let pick = |env: &dyn Fn(&Env) -> bool| -> Vec<(usize, usize)> {
            rows.iter().filter(|r| env(&r.env)).map(|r| (r.x, r.y)).collect()
        };
        if rows.iter().any(|r| matches!(r.env, Env::Do(Target::Z, _))) {
            bail!("do:z environments need a trivariate model");
        }
        Ok(DiscoveryData::Explicit {
            observational: pick(&|e| *e == Env::Obs),
            do_x: pick(&|e| matches!(e, Env::Do(Target::X, _))),
            do_y: pick(&|e| matches!(e, Env::Do(Target::Y, _))),
        })
    }

    pub fn trivariate_sample(&self, bins: (usize, usize, usize)) -> Result<TrivariateSample> {
        let rows = self.encode(bins)?;
        let mut sample = TrivariateSample {
            observed: Vec::new(),
            do_z: vec![Vec::new(); bins.2],
            do_x: vec![Vec::new(); bins.0],
        };
        for r in rows {
            match r.env {
                Env::Obs => {
                    let z = r.z.ok_or_else(|| anyhow!("trivariate models need a z column (--z)"))?;
                    sample.observed.push((r.x, r.y, z));
                }
                Env::Do(Target::Z, _) => {
                    let z = r.z.ok_or_else(|| anyhow!("do:z environments need a z column (--z)"))?;
                    sample.do_z[z].push((r.x, r.y));
                }
                Env::Do(Target::X, _) => sample.do_x[r.x].push(r.y),
                Env::Do(Target::Y, _) => bail!("trivariate models take no interventions on y"),
            }
        }
        Ok(sample)
    }
}

struct Encoded {
    x: usize,
    y: usize,
    z: Option<usize>,
    env: Env,
}

fn same_value(a: &str, b: &str) -> bool {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(u), Ok(v)) => u == v,
        _ => a == b,
    }
}

fn distinct(values: &[&String]) -> usize {
    let mut v: Vec<&str> = values.iter().map(|s| s.as_str()).collect();
    if v.iter().all(|s| s.parse::<f64>().is_ok()) {
        let mut f: Vec<f64> = v.iter().map(|s| s.parse().unwrap()).collect();
        f.sort_by(f64::total_cmp);
        f.dedup();
        return f.len();
    }
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Numeric columns are label-encoded or binned; text columns are label-encoded
/// in sorted order and must not have more categories than `bins`.
fn encode_column(values: &[&String], bins: usize) -> Result<Vec<usize>> {
    if values.iter().all(|s| s.parse::<f64>().is_ok()) {
        let numeric: Vec<f64> = values.iter().map(|s| s.parse().unwrap()).collect();
        return Ok(categorize(&numeric, bins)?.labels);
    }
    let mut levels: Vec<&str> = values.iter().map(|s| s.as_str()).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() > bins {
        bail!("{} text categories do not fit into {bins} values", levels.len());
    }
    Ok(values
        .iter()
        .map(|s| levels.binary_search(&s.as_str()).unwrap())
        .collect())
}
