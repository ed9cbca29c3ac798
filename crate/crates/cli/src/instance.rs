//! Instance files: a measure, named families and operators, and check requests.

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use ckg_core::{CMatrix, LinearMap, MeasurePoints, OperatorFamily};

use crate::error::{CliError, Result};
use crate::json::{self, Complex};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: String,
    pub field: String,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub operators: Vec<OperatorSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub weights: Vec<f64>,
    pub block_dims: Vec<usize>,
}

/// One family; `blocks[i]` is the `d_i x domain_dim` matrix of node `i`, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    pub domain_dim: usize,
    pub blocks: Vec<Vec<Vec<Complex>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Complex>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: CheckKind,
    /// Expected verdict; `true` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckKind {
    FrameBounds {
        family: String,
        operator: String,
    },
    VerifyDual {
        family: String,
        dual: String,
        operator: String,
    },
    CanonicalDual {
        family: String,
        operator: String,
    },
    Douglas {
        left: String,
        right: String,
    },
    Atomic {
        family: String,
        operator: String,
    },
    SubspaceDual {
        family: String,
        dual: String,
        operator: String,
    },
    OperatorAlgebra {
        family: String,
        k1: String,
        k2: String,
        alpha: f64,
        beta: f64,
    },
    OrthogonalCombine {
        family: String,
        other: String,
        u: String,
        v: String,
        operator: String,
    },
    RangeCombine {
        family: String,
        other: String,
        u1: String,
        u2: String,
        operator: String,
    },
    PositivePerturb {
        family: String,
        u: String,
        power: u32,
        operator: String,
    },
    RestrictedDual {
        family: String,
        dual: String,
        operator: String,
    },
}

impl CheckKind {
    pub fn label(&self) -> &'static str {
        match self {
            CheckKind::FrameBounds { .. } => "frame_bounds",
            CheckKind::VerifyDual { .. } => "verify_dual",
            CheckKind::CanonicalDual { .. } => "canonical_dual",
            CheckKind::Douglas { .. } => "douglas",
            CheckKind::Atomic { .. } => "atomic",
            CheckKind::SubspaceDual { .. } => "subspace_dual",
            CheckKind::OperatorAlgebra { .. } => "operator_algebra",
            CheckKind::OrthogonalCombine { .. } => "orthogonal_combine",
            CheckKind::RangeCombine { .. } => "range_combine",
            CheckKind::PositivePerturb { .. } => "positive_perturb",
            CheckKind::RestrictedDual { .. } => "restricted_dual",
        }
    }

    /// Referenced families (first) and operators, with the square size each operator needs
    /// relative to the first family (`None` for Douglas operands).
    fn references(&self) -> (Vec<&str>, Vec<(&str, &'static str)>) {
        use CheckKind::*;
        match self {
            FrameBounds { family, operator }
            | CanonicalDual { family, operator }
            | Atomic { family, operator } => (vec![family], vec![(operator, "operator")]),
            VerifyDual { family, dual, operator }
            | SubspaceDual { family, dual, operator }
            | RestrictedDual { family, dual, operator } => {
                (vec![family, dual], vec![(operator, "operator")])
            }
            Douglas { left, right } => (vec![], vec![(left, "left"), (right, "right")]),
            OperatorAlgebra { family, k1, k2, .. } => (vec![family], vec![(k1, "k1"), (k2, "k2")]),
            OrthogonalCombine { family, other, u, v, operator } => (
                vec![family, other],
                vec![(u, "u"), (v, "v"), (operator, "operator")],
            ),
            RangeCombine { family, other, u1, u2, operator } => (
                vec![family, other],
                vec![(u1, "u1"), (u2, "u2"), (operator, "operator")],
            ),
            PositivePerturb { family, u, operator, .. } => {
                (vec![family], vec![(u, "u"), (operator, "operator")])
            }
        }
    }
}

impl CheckSpec {
    pub fn new(name: impl Into<String>, kind: CheckKind, expect: Option<bool>) -> Self {
        CheckSpec {
            name: name.into(),
            kind,
            expect,
        }
    }

    pub fn expected(&self) -> bool {
        self.expect.unwrap_or(true)
    }
}

/// A validated instance, with matrices ready for the core routines.
#[derive(Debug, Clone)]
pub struct Instance {
    pub space: Arc<MeasurePoints>,
    pub families: IndexMap<String, OperatorFamily>,
    pub operators: IndexMap<String, LinearMap>,
    pub checks: Vec<CheckSpec>,
}

impl Instance {
    pub fn family(&self, name: &str) -> &OperatorFamily {
        &self.families[name]
    }

    pub fn operator(&self, name: &str) -> &LinearMap {
        &self.operators[name]
    }
}

impl MeasureSpec {
    pub fn from_points(points: &MeasurePoints) -> Self {
        MeasureSpec {
            weights: points.weights().to_vec(),
            block_dims: points.block_dims().to_vec(),
        }
    }
}

fn rows_of(m: &CMatrix) -> Vec<Vec<Complex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Complex(m[(i, j)])).collect())
        .collect()
}

impl FamilySpec {
    pub fn from_family(name: impl Into<String>, family: &OperatorFamily) -> Self {
        FamilySpec {
            name: name.into(),
            domain_dim: family.domain_dim(),
            blocks: family.blocks().iter().map(rows_of).collect(),
        }
    }
}

impl OperatorSpec {
    pub fn from_map(name: impl Into<String>, map: &LinearMap) -> Self {
        OperatorSpec {
            name: name.into(),
            rows: map.rows(),
            cols: map.cols(),
            entries: rows_of(map.matrix()),
        }
    }
}

fn matrix_from_rows(object: &str, rows: &[Vec<Complex>], nrows: usize, ncols: usize) -> Result<CMatrix> {
    if rows.len() != nrows {
        return Err(CliError::shape(object, format!("{nrows} rows"), format!("{} rows", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(CliError::shape(
                format!("{object} row {i}"),
                format!("{ncols} entries"),
                format!("{} entries", row.len()),
            ));
        }
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j].0))
}

fn unique<'a>(section: &str, names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for (i, name) in names.enumerate() {
        if !seen.insert(name) {
            return Err(CliError::schema(
                format!("{section}[{i}].name"),
                format!("duplicate name `{name}`"),
            ));
        }
    }
    Ok(())
}

impl InstanceFile {
    pub fn new(space: &MeasurePoints) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION.into(),
            field: "complex".into(),
            measure: MeasureSpec::from_points(space),
            families: Vec::new(),
            operators: Vec::new(),
            checks: Vec::new(),
        }
    }

    /// Parses JSON text; does not validate shapes (see [`InstanceFile::validate`]).
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            use serde_json::error::Category;
            match e.classify() {
                Category::Data => CliError::schema("instance", e.to_string()),
                _ => CliError::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                },
            }
        })
    }

    pub fn to_json(&self) -> String {
        json::to_string(self)
    }

    pub fn validate(&self) -> Result<Instance> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::schema(
                "schema_version",
                format!("unsupported version `{}`, expected `{SCHEMA_VERSION}`", self.schema_version),
            ));
        }
        if self.field != "complex" {
            return Err(CliError::schema("field", format!("`{}` is not supported, use `complex`", self.field)));
        }
        let m = &self.measure;
        if m.weights.is_empty() {
            return Err(CliError::schema("measure.weights", "at least one node is required"));
        }
        if m.weights.len() != m.block_dims.len() {
            return Err(CliError::shape(
                "measure.block_dims",
                format!("{} entries", m.weights.len()),
                format!("{} entries", m.block_dims.len()),
            ));
        }
        if let Some((index, &weight)) = m.weights.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
            return Err(CliError::NonPositiveWeight { index, weight });
        }
        if let Some(i) = m.block_dims.iter().position(|&d| d == 0) {
            return Err(CliError::schema(format!("measure.block_dims[{i}]"), "block dimensions must be positive"));
        }
        let space = Arc::new(MeasurePoints::new(m.weights.clone(), m.block_dims.clone())?);

        unique("families", self.families.iter().map(|f| f.name.as_str()))?;
        unique("operators", self.operators.iter().map(|o| o.name.as_str()))?;
        unique("checks", self.checks.iter().map(|c| c.name.as_str()))?;

        let mut families = IndexMap::new();
        for f in &self.families {
            let object = format!("family `{}`", f.name);
            if f.domain_dim == 0 {
                return Err(CliError::schema(format!("{object}.domain_dim"), "must be positive"));
            }
            if f.blocks.len() != space.len() {
                return Err(CliError::shape(
                    &object,
                    format!("{} blocks", space.len()),
                    format!("{} blocks", f.blocks.len()),
                ));
            }
            let blocks = f
                .blocks
                .iter()
                .zip(space.block_dims())
                .enumerate()
                .map(|(i, (rows, &d))| matrix_from_rows(&format!("{object} block {i}"), rows, d, f.domain_dim))
                .collect::<Result<Vec<_>>>()?;
            families.insert(f.name.clone(), OperatorFamily::new(space.clone(), f.domain_dim, blocks)?);
        }

        let mut operators = IndexMap::new();
        for o in &self.operators {
            let object = format!("operator `{}`", o.name);
            if o.rows == 0 || o.cols == 0 {
                return Err(CliError::schema(format!("{object}"), "dimensions must be positive"));
            }
            let m = matrix_from_rows(&object, &o.entries, o.rows, o.cols)?;
            operators.insert(o.name.clone(), LinearMap::new(m)?);
        }

        for (i, check) in self.checks.iter().enumerate() {
            let (fams, ops) = check.kind.references();
            for name in &fams {
                if !families.contains_key(*name) {
                    return Err(CliError::schema(format!("checks[{i}]"), format!("unknown family `{name}`")));
                }
            }
            for (name, _) in &ops {
                if !operators.contains_key(*name) {
                    return Err(CliError::schema(format!("checks[{i}]"), format!("unknown operator `{name}`")));
                }
            }
            if let Some(first) = fams.first() {
                let n = families[*first].domain_dim();
                for other in &fams[1..] {
                    let d = families[*other].domain_dim();
                    if d != n {
                        return Err(CliError::shape(format!("family `{other}` in check `{}`", check.name), format!("domain dimension {n}"), format!("domain dimension {d}")));
                    }
                }
                for (name, role) in &ops {
                    let op: &LinearMap = &operators[*name];
                    if op.rows() != n || op.cols() != n {
                        return Err(CliError::shape(
                            format!("{role} `{name}` in check `{}`", check.name),
                            format!("{n}x{n}"),
                            format!("{}x{}", op.rows(), op.cols()),
                        ));
                    }
                }
            } else if let [(l, _), (r, _)] = ops.as_slice() {
                let (a, b): (&LinearMap, &LinearMap) = (&operators[*l], &operators[*r]);
                if a.rows() != b.rows() {
                    return Err(CliError::shape(
                        format!("right `{r}` in check `{}`", check.name),
                        format!("{} rows", a.rows()),
                        format!("{} rows", b.rows()),
                    ));
                }
            }
            if let CheckKind::OperatorAlgebra { alpha, beta, .. } = check.kind {
                if alpha == 0.0 || beta == 0.0 {
                    return Err(CliError::schema(format!("checks[{i}]"), "alpha and beta must be nonzero"));
                }
            }
            if let CheckKind::PositivePerturb { power: 0, .. } = check.kind {
                return Err(CliError::schema(format!("checks[{i}].power"), "must be positive"));
            }
        }

        Ok(Instance {
            space,
            families,
            operators,
            checks: self.checks.clone(),
        })
    }

    pub fn load(path: &Path) -> Result<(InstanceFile, Instance)> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file = InstanceFile::parse(&text)?;
        let instance = file.validate()?;
        Ok((file, instance))
    }

    pub fn add_family(&mut self, name: &str, family: &OperatorFamily) {
        self.families.push(FamilySpec::from_family(name, family));
    }

    pub fn add_operator(&mut self, name: &str, map: &LinearMap) {
        self.operators.push(OperatorSpec::from_map(name, map));
    }

    pub fn add_check(&mut self, name: &str, kind: CheckKind, expect: Option<bool>) {
        self.checks.push(CheckSpec::new(name, kind, expect));
    }
}
