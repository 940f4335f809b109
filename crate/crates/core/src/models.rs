//! Causal model variants and their support sets.
//!
//! Every model is described by a [`ModelLayout`]: the axes of the extended
//! variable set (observed variables plus one copy of each effect per
//! intervention value), the marginal blocks that empirical data constrain,
//! and a cell predicate that says whether a cell survives the invariance
//! zero patterns of the model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::Shape;
use crate::error::{IacmError, Result};

/// Largest range size accepted for bivariate support construction.
pub const MAX_BIVARIATE_RANGE: usize = 5;
/// Upper bound on the extended space of trivariate models.
pub const MAX_TRIVARIATE_CELLS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelVariant {
    XToY,
    YToX,
    XToYMonoInc,
    XToYMonoDec,
    YToXMonoInc,
    YToXMonoDec,
    /// Additive-noise penalized objective `S_k`, `k` in `1..=4`.
    Anm(u8),
    ZConfounder,
    ZConfounderHidden,
    ZChain,
    ZChainHidden,
    ZCollider,
    ZColliderHidden,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 16] = [
        ModelVariant::XToY,
        ModelVariant::YToX,
        ModelVariant::XToYMonoInc,
        ModelVariant::XToYMonoDec,
        ModelVariant::YToXMonoInc,
        ModelVariant::YToXMonoDec,
        ModelVariant::Anm(1),
        ModelVariant::Anm(2),
        ModelVariant::Anm(3),
        ModelVariant::Anm(4),
        ModelVariant::ZConfounder,
        ModelVariant::ZConfounderHidden,
        ModelVariant::ZChain,
        ModelVariant::ZChainHidden,
        ModelVariant::ZCollider,
        ModelVariant::ZColliderHidden,
    ];

    pub fn name(self) -> String {
        match self {
            ModelVariant::XToY => "x_to_y".into(),
            ModelVariant::YToX => "y_to_x".into(),
            ModelVariant::XToYMonoInc => "x_to_y_mono_inc".into(),
            ModelVariant::XToYMonoDec => "x_to_y_mono_dec".into(),
            ModelVariant::YToXMonoInc => "y_to_x_mono_inc".into(),
            ModelVariant::YToXMonoDec => "y_to_x_mono_dec".into(),
            ModelVariant::Anm(k) => format!("anm_s{k}"),
            ModelVariant::ZConfounder => "z_confounder".into(),
            ModelVariant::ZConfounderHidden => "z_confounder_hidden".into(),
            ModelVariant::ZChain => "z_chain".into(),
            ModelVariant::ZChainHidden => "z_chain_hidden".into(),
            ModelVariant::ZCollider => "z_collider".into(),
            ModelVariant::ZColliderHidden => "z_collider_hidden".into(),
        }
    }

    pub fn is_trivariate(self) -> bool {
        matches!(
            self,
            ModelVariant::ZConfounder
                | ModelVariant::ZConfounderHidden
                | ModelVariant::ZChain
                | ModelVariant::ZChainHidden
                | ModelVariant::ZCollider
                | ModelVariant::ZColliderHidden
        )
    }

    /// Whether the observed variable `Z` is an axis of the extended space.
    pub fn observes_z(self) -> bool {
        matches!(
            self,
            ModelVariant::ZConfounder | ModelVariant::ZChain | ModelVariant::ZCollider
        )
    }

    /// True for variants whose objective is the plain support indicator.
    pub fn is_plain(self) -> bool {
        !matches!(self, ModelVariant::Anm(_))
    }

    /// True for the `y_to_x*` variants, which take inputs with `Y` as the cause.
    pub fn is_reversed(self) -> bool {
        matches!(
            self,
            ModelVariant::YToX | ModelVariant::YToXMonoInc | ModelVariant::YToXMonoDec
        )
    }

    /// The `x_to_y*` counterpart of a reversed variant.
    pub fn forward(self) -> Self {
        match self {
            ModelVariant::YToX => ModelVariant::XToY,
            ModelVariant::YToXMonoInc => ModelVariant::XToYMonoInc,
            ModelVariant::YToXMonoDec => ModelVariant::XToYMonoDec,
            other => other,
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ModelVariant {
    type Err = IacmError;

    fn from_str(s: &str) -> Result<Self> {
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| IacmError::UnsupportedModel(format!("unknown model '{s}'")))
    }
}

impl TryFrom<String> for ModelVariant {
    type Error = IacmError;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<ModelVariant> for String {
    fn from(v: ModelVariant) -> Self {
        v.name()
    }
}

/// A model variant together with the range sizes of its variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CausalModelSpec {
    pub variant: ModelVariant,
    pub b_x: usize,
    pub b_y: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_z: Option<usize>,
}

impl CausalModelSpec {
    pub fn bivariate(variant: ModelVariant, b_x: usize, b_y: usize) -> Self {
        Self {
            variant,
            b_x,
            b_y,
            b_z: None,
        }
    }

    pub fn trivariate(variant: ModelVariant, b_x: usize, b_y: usize, b_z: usize) -> Self {
        Self {
            variant,
            b_x,
            b_y,
            b_z: Some(b_z),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unsupported = |why: String| Err(IacmError::UnsupportedModel(why));
        let v = self.variant;
        if self.b_x < 2 || self.b_y < 2 {
            return unsupported(format!("{v}: ranges must be at least 2, got ({}, {})", self.b_x, self.b_y));
        }
        if v.is_trivariate() {
            let Some(b_z) = self.b_z else {
                return unsupported(format!("{v} needs a range for Z"));
            };
            if b_z < 2 {
                return unsupported(format!("{v}: range of Z must be at least 2"));
            }
            let cells = self.layout_unchecked().shape.cells();
            if cells > MAX_TRIVARIATE_CELLS {
                return unsupported(format!(
                    "{v}: extended space has {cells} cells, limit is {MAX_TRIVARIATE_CELLS}"
                ));
            }
            return Ok(());
        }
        if self.b_z.is_some() {
            return unsupported(format!("{v} is bivariate, no Z range expected"));
        }
        if self.b_x > MAX_BIVARIATE_RANGE || self.b_y > MAX_BIVARIATE_RANGE {
            return unsupported(format!(
                "{v}: ranges above {MAX_BIVARIATE_RANGE} not supported, got ({}, {})",
                self.b_x, self.b_y
            ));
        }
        let needs_binary = !matches!(v.forward(), ModelVariant::XToY);
        if needs_binary && (self.b_x != 2 || self.b_y != 2) {
            return unsupported(format!("{v} is defined for binary X and Y only"));
        }
        Ok(())
    }

    /// Extended variable layout of the model (see [`ModelLayout`]).
    pub fn layout(&self) -> Result<ModelLayout> {
        self.validate()?;
        Ok(self.layout_unchecked())
    }

    fn layout_unchecked(&self) -> ModelLayout {
        let v = self.variant;
        if v.is_trivariate() {
            return trivariate_layout(v, self.b_x, self.b_y, self.b_z.unwrap_or(2));
        }
        let (cause, effect) = if v.is_reversed() {
            (self.b_y, self.b_x)
        } else {
            (self.b_x, self.b_y)
        };
        bivariate_layout(v.forward(), cause, effect, v.is_reversed())
    }
}

/// A group of axes whose joint marginal is pinned by data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintBlock {
    pub axes: Vec<usize>,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    /// `coords[2 + x] == y`; plus an optional forbidden `(y_0, y_1)` pair.
    Bivariate { forbidden_pair: Option<(usize, usize)> },
    Confounder { observed: bool, b_z: usize },
    Chain { observed: bool, b_z: usize },
    Collider { observed: bool, b_z: usize, b_x: usize },
}

/// Axes, constraint blocks and membership rule of a model's extended space.
#[derive(Debug, Clone)]
pub struct ModelLayout {
    pub variant: ModelVariant,
    pub shape: Shape,
    pub axis_names: Vec<String>,
    /// Interventional blocks first, the observational block last.
    pub blocks: Vec<ConstraintBlock>,
    /// Axes of the observational block; the local error compares this marginal.
    pub observed_axes: Vec<usize>,
    /// Bivariate YtoX variants live on column-swapped data.
    pub swapped: bool,
    rule: Rule,
}

fn bivariate_layout(forward: ModelVariant, b_cause: usize, b_effect: usize, swapped: bool) -> ModelLayout {
    let (c, e) = if swapped { ("y", "x") } else { ("x", "y") };
    let mut sizes = vec![b_cause, b_effect];
    let mut names = vec![c.to_string(), e.to_string()];
    let mut blocks = Vec::with_capacity(b_cause + 1);
    for a in 0..b_cause {
        sizes.push(b_effect);
        names.push(format!("{e}_{a}"));
        blocks.push(ConstraintBlock {
            axes: vec![2 + a],
            label: format!("{e}_{a}"),
        });
    }
    blocks.push(ConstraintBlock {
        axes: vec![0, 1],
        label: format!("{c},{e}"),
    });
    let forbidden_pair = match forward {
        ModelVariant::XToYMonoInc => Some((1, 0)),
        ModelVariant::XToYMonoDec => Some((0, 1)),
        _ => None,
    };
    let variant = match (forward, swapped) {
        (ModelVariant::XToY, true) => ModelVariant::YToX,
        (ModelVariant::XToYMonoInc, true) => ModelVariant::YToXMonoInc,
        (ModelVariant::XToYMonoDec, true) => ModelVariant::YToXMonoDec,
        (v, _) => v,
    };
    ModelLayout {
        variant,
        shape: Shape::new(sizes).expect("positive axis sizes"),
        axis_names: names,
        blocks,
        observed_axes: vec![0, 1],
        swapped,
        rule: Rule::Bivariate { forbidden_pair },
    }
}

fn trivariate_layout(v: ModelVariant, b_x: usize, b_y: usize, b_z: usize) -> ModelLayout {
    let observed = v.observes_z();
    let mut sizes = vec![b_x, b_y];
    let mut names = vec!["x".to_string(), "y".to_string()];
    if observed {
        sizes.push(b_z);
        names.push("z".into());
    }
    let base = sizes.len();
    let mut blocks = Vec::new();
    let rule = match v {
        ModelVariant::ZConfounder | ModelVariant::ZConfounderHidden => {
            for a in 0..b_z {
                sizes.extend([b_x, b_y]);
                names.extend([format!("x_{a}"), format!("y_{a}")]);
                blocks.push(ConstraintBlock {
                    axes: vec![base + 2 * a, base + 2 * a + 1],
                    label: format!("x_{a},y_{a}"),
                });
            }
            Rule::Confounder { observed, b_z }
        }
        ModelVariant::ZChain | ModelVariant::ZChainHidden => {
            for a in 0..b_z {
                sizes.push(b_x);
                names.push(format!("x_{a}"));
                blocks.push(ConstraintBlock {
                    axes: vec![base + a],
                    label: format!("x_{a}"),
                });
            }
            for b in 0..b_x {
                sizes.push(b_y);
                names.push(format!("y_{b}"));
                blocks.push(ConstraintBlock {
                    axes: vec![base + b_z + b],
                    label: format!("y_{b}"),
                });
            }
            Rule::Chain { observed, b_z }
        }
        ModelVariant::ZCollider | ModelVariant::ZColliderHidden => {
            for a in 0..b_z {
                sizes.push(b_y);
                names.push(format!("y_z{a}"));
                blocks.push(ConstraintBlock {
                    axes: vec![base + a],
                    label: format!("y_z{a}"),
                });
            }
            for b in 0..b_x {
                sizes.push(b_y);
                names.push(format!("y_x{b}"));
                blocks.push(ConstraintBlock {
                    axes: vec![base + b_z + b],
                    label: format!("y_x{b}"),
                });
            }
            Rule::Collider { observed, b_z, b_x }
        }
        _ => unreachable!("bivariate variant in trivariate layout"),
    };
    let observed_axes: Vec<usize> = (0..base).collect();
    blocks.push(ConstraintBlock {
        axes: observed_axes.clone(),
        label: if observed { "x,y,z".into() } else { "x,y".into() },
    });
    ModelLayout {
        variant: v,
        shape: Shape::new(sizes).expect("positive axis sizes"),
        axis_names: names,
        blocks,
        observed_axes,
        swapped: false,
        rule,
    }
}

impl ModelLayout {
    /// Whether the cell at `coords` can carry mass under the model.
    pub fn admits(&self, coords: &[usize]) -> bool {
        let (x, y) = (coords[0], coords[1]);
        match self.rule {
            Rule::Bivariate { forbidden_pair } => {
                coords[2 + x] == y && forbidden_pair.is_none_or(|pair| (coords[2], coords[3]) != pair)
            }
            Rule::Confounder { observed, b_z } => {
                let base = if observed { 3 } else { 2 };
                let one_mismatch = |a: usize| {
                    let (xa, ya) = (coords[base + 2 * a], coords[base + 2 * a + 1]);
                    (xa != x && ya == y) || (xa == x && ya != y)
                };
                if observed {
                    !one_mismatch(coords[2])
                } else {
                    !(0..b_z).any(one_mismatch)
                }
            }
            Rule::Chain { observed, b_z } => {
                let base = if observed { 3 } else { 2 };
                let y_at_x = coords[base + b_z + x];
                let violates = |a: usize| {
                    let xa = coords[base + a];
                    (xa != x && y_at_x == y) || (xa == x && y_at_x != y)
                };
                if observed {
                    !violates(coords[2])
                } else {
                    !(0..b_z).any(violates)
                }
            }
            Rule::Collider { observed, b_z, b_x: _ } => {
                let base = if observed { 3 } else { 2 };
                let yb = coords[base + b_z + x];
                let violates = |a: usize| {
                    let ya = coords[base + a];
                    (ya == y && yb != y) || (ya != y && yb == y) || (ya != y && yb == ya)
                };
                if observed {
                    !violates(coords[2])
                } else {
                    !(0..b_z).any(violates)
                }
            }
        }
    }
}

/// Dense support indicator plus objective coefficients of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    pub shape: Shape,
    pub member_flags: Vec<bool>,
    pub objective_coeffs: Vec<f64>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.member_flags.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.member_flags
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }
}

pub fn build_support(spec: &CausalModelSpec) -> Result<SupportSet> {
    let layout = spec.layout()?;
    let member_flags = member_flags(&layout);
    let objective_coeffs = objective_for(spec.variant, &member_flags);
    Ok(SupportSet {
        shape: layout.shape,
        member_flags,
        objective_coeffs,
    })
}

pub fn build_objective(spec: &CausalModelSpec) -> Result<Vec<f64>> {
    build_support(spec).map(|s| s.objective_coeffs)
}

fn member_flags(layout: &ModelLayout) -> Vec<bool> {
    let mut coords = vec![0; layout.shape.num_axes()];
    (0..layout.shape.cells())
        .map(|i| {
            layout.shape.coords_into(i, &mut coords);
            layout.admits(&coords)
        })
        .collect()
}

/// Coefficients of the additive-noise objectives over the 16 binary cells.
const ANM_OBJECTIVES: [[(usize, f64); 6]; 4] = [
    [(0b0000, 2.0), (0b0001, 2.0), (0b0110, 1.0), (0b0111, 1.0), (0b1000, 1.0), (0b1010, 1.0)],
    [(0b0110, 1.0), (0b0111, 1.0), (0b1000, 1.0), (0b1010, 1.0), (0b1101, 2.0), (0b1111, 2.0)],
    [(0b0000, 1.0), (0b0001, 1.0), (0b0110, 2.0), (0b0111, 2.0), (0b1101, 1.0), (0b1111, 1.0)],
    [(0b0000, 1.0), (0b0001, 1.0), (0b1000, 2.0), (0b1010, 2.0), (0b1101, 1.0), (0b1111, 1.0)],
];

fn objective_for(variant: ModelVariant, flags: &[bool]) -> Vec<f64> {
    match variant {
        ModelVariant::Anm(k) => {
            let mut c = vec![0.0; flags.len()];
            for &(cell, w) in &ANM_OBJECTIVES[usize::from(k - 1)] {
                c[cell] = w;
            }
            c
        }
        _ => flags.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
    }
}

/// Relabeling that turns a YtoX question into an XtoY question on swapped data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoleSwap {
    /// XtoY-family spec to run on the (possibly swapped) rows.
    pub spec: CausalModelSpec,
    pub swap_columns: bool,
}

impl RoleSwap {
    pub fn apply(&self, rows: &[(usize, usize)]) -> Vec<(usize, usize)> {
        if self.swap_columns {
            swap_columns(rows)
        } else {
            rows.to_vec()
        }
    }
}

pub fn swap_columns(rows: &[(usize, usize)]) -> Vec<(usize, usize)> {
    rows.iter().map(|&(x, y)| (y, x)).collect()
}

pub fn swap_roles(spec: &CausalModelSpec) -> Result<RoleSwap> {
    spec.validate()?;
    let v = spec.variant;
    if v.is_trivariate() {
        return Err(IacmError::UnsupportedModel(format!("{v}: role swap is bivariate only")));
    }
    if v.is_reversed() {
        Ok(RoleSwap {
            spec: CausalModelSpec::bivariate(v.forward(), spec.b_y, spec.b_x),
            swap_columns: true,
        })
    } else {
        Ok(RoleSwap {
            spec: *spec,
            swap_columns: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::empirical_joint;

    fn binary(v: ModelVariant) -> CausalModelSpec {
        CausalModelSpec::bivariate(v, 2, 2)
    }

    fn members(v: ModelVariant) -> Vec<usize> {
        build_support(&binary(v)).unwrap().members().collect()
    }

    #[test]
    fn binary_x_to_y_support() {
        assert_eq!(members(ModelVariant::XToY), vec![0, 1, 6, 7, 8, 10, 13, 15]);
    }

    #[test]
    fn monotone_supports_drop_one_contrast() {
        assert_eq!(members(ModelVariant::XToYMonoInc), vec![0, 1, 7, 8, 13, 15]);
        assert_eq!(members(ModelVariant::XToYMonoDec), vec![0, 6, 7, 8, 10, 15]);
        let inc = build_support(&binary(ModelVariant::XToYMonoInc)).unwrap();
        let shape = inc.shape.clone();
        for i in inc.members() {
            let c = shape.coords(i);
            assert_ne!((c[2], c[3]), (1, 0));
        }
        let plain = members(ModelVariant::XToY);
        let mut union: Vec<usize> = members(ModelVariant::XToYMonoInc);
        union.extend(members(ModelVariant::XToYMonoDec));
        union.sort();
        union.dedup();
        assert_eq!(union, plain);
        let both: Vec<usize> = members(ModelVariant::XToYMonoInc)
            .into_iter()
            .filter(|i| members(ModelVariant::XToYMonoDec).contains(i))
            .collect();
        assert!(both.len() < plain.len());
    }

    #[test]
    fn ternary_support_matches_lemma_predicate() {
        let s = build_support(&CausalModelSpec::bivariate(ModelVariant::XToY, 3, 3)).unwrap();
        assert_eq!(s.shape.cells(), 243);
        assert_eq!(s.len(), 81);
        // zero condition: cell is forbidden iff for its own x the copy y_x disagrees with y
        for i in 0..243 {
            let (x, y) = ((i / 81) % 3, (i / 27) % 3);
            let ys = [(i / 9) % 3, (i / 3) % 3, i % 3];
            assert_eq!(s.member_flags[i], ys[x] == y, "cell {i}");
        }
    }

    #[test]
    fn support_counts_for_all_ranges() {
        for bx in 2..=5 {
            for by in 2..=5 {
                let s = build_support(&CausalModelSpec::bivariate(ModelVariant::XToY, bx, by)).unwrap();
                assert_eq!(s.len(), bx * by.pow(bx as u32), "({bx}, {by})");
            }
        }
    }

    #[test]
    fn reversed_support_lives_on_swapped_axes() {
        let s = build_support(&CausalModelSpec::bivariate(ModelVariant::YToX, 2, 3)).unwrap();
        assert_eq!(s.shape.axis_sizes(), &[3, 2, 2, 2, 2]);
        assert_eq!(s.len(), 3 * 2usize.pow(3));
    }

    #[test]
    fn anm_objectives_expand_delta_terms() {
        let plain = build_objective(&binary(ModelVariant::XToY)).unwrap();
        // S1 = S + P00 - P11, S2 = S + P11 - P00, S3 = S + P01 - P10, S4 = S + P10 - P01
        let signs = [((0, 0), (1, 1)), ((1, 1), (0, 0)), ((0, 1), (1, 0)), ((1, 0), (0, 1))];
        for (k, (plus, minus)) in signs.into_iter().enumerate() {
            let c = build_objective(&binary(ModelVariant::Anm(k as u8 + 1))).unwrap();
            for i in 0..16 {
                let xy = (i >> 3, (i >> 2) & 1);
                let mut expected = plain[i];
                if plain[i] > 0.0 && xy == plus {
                    expected += 1.0;
                }
                if plain[i] > 0.0 && xy == minus {
                    expected -= 1.0;
                }
                assert_eq!(c[i], expected, "S{} cell {i:04b}", k + 1);
            }
        }
        let s3 = build_objective(&binary(ModelVariant::Anm(3))).unwrap();
        let nz: Vec<(usize, f64)> = s3.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, &w)| (i, w)).collect();
        assert_eq!(nz, vec![(0, 1.0), (1, 1.0), (6, 2.0), (7, 2.0), (13, 1.0), (15, 1.0)]);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let bad = [
            CausalModelSpec::bivariate(ModelVariant::XToYMonoInc, 3, 2),
            CausalModelSpec::bivariate(ModelVariant::Anm(1), 2, 3),
            CausalModelSpec::bivariate(ModelVariant::XToY, 1, 2),
            CausalModelSpec::bivariate(ModelVariant::XToY, 6, 2),
            CausalModelSpec::bivariate(ModelVariant::ZChain, 2, 2),
            CausalModelSpec::trivariate(ModelVariant::ZConfounder, 3, 3, 3),
        ];
        for spec in bad {
            assert!(
                matches!(build_support(&spec), Err(IacmError::UnsupportedModel(_))),
                "{spec:?}"
            );
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in ModelVariant::ALL {
            assert_eq!(v.name().parse::<ModelVariant>().unwrap(), v);
        }
        assert!("x_causes_y".parse::<ModelVariant>().is_err());
    }

    #[test]
    fn swap_roles_examples() {
        let swap = swap_roles(&CausalModelSpec::bivariate(ModelVariant::YToX, 2, 3)).unwrap();
        assert_eq!(swap.spec, CausalModelSpec::bivariate(ModelVariant::XToY, 3, 2));
        assert_eq!(swap.apply(&[(0, 1)]), vec![(1, 0)]);

        let diag = vec![(0, 0), (1, 1), (1, 1)];
        assert_eq!(
            empirical_joint(&swap.apply(&diag), 2, 2).unwrap(),
            empirical_joint(&diag, 2, 2).unwrap()
        );

        let rows = vec![(0, 1), (2, 0), (1, 1), (2, 1), (0, 0), (2, 1)];
        let fwd = empirical_joint(&rows, 3, 2).unwrap();
        let rev = empirical_joint(&swap.apply(&rows), 2, 3).unwrap();
        for x in 0..3 {
            for y in 0..2 {
                assert_eq!(fwd.prob(&[x, y]), rev.prob(&[y, x]));
            }
        }
    }
}
