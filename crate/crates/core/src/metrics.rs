//! Method and class metrics.
//!
//! Metric names are the public vocabulary of reports and threshold
//! configuration. `ATFD` is shared by both scopes: per method it counts the
//! foreign attributes that method reads, per class the union over its methods.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::model::{CodeModel, Expr, IntegrityError, MethodEntity, Stmt, StmtKind, TypeEntity, Visibility};

pub const MLOC: &str = "MLOC";
pub const CYCLO: &str = "CYCLO";
pub const MAXNESTING: &str = "MAXNESTING";
pub const NOAV: &str = "NOAV";
pub const NOP: &str = "NOP";
pub const ATFD: &str = "ATFD";
pub const FDP: &str = "FDP";
pub const LAA: &str = "LAA";
pub const FANOUT: &str = "FANOUT";
pub const CLOC: &str = "CLOC";
pub const WMC: &str = "WMC";
pub const NOM: &str = "NOM";
pub const NOA: &str = "NOA";
pub const NOPA: &str = "NOPA";
pub const NOAM: &str = "NOAM";
pub const TCC: &str = "TCC";
pub const WOC: &str = "WOC";
pub const AMW: &str = "AMW";

pub const METHOD_METRICS: [&str; 9] = [MLOC, CYCLO, MAXNESTING, NOAV, NOP, ATFD, FDP, LAA, FANOUT];
pub const CLASS_METRICS: [&str; 10] = [CLOC, WMC, NOM, NOA, NOPA, NOAM, TCC, WOC, AMW, ATFD];

/// Every distinct metric name, sorted.
pub fn catalog() -> BTreeSet<&'static str> {
    METHOD_METRICS.iter().chain(CLASS_METRICS.iter()).copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Method,
    Class,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricVector {
    /// Qualified class name or method qualified name.
    pub entity: String,
    pub file: String,
    pub scope: Scope,
    #[serde(serialize_with = "serialize_values")]
    pub values: BTreeMap<String, f64>,
}

impl MetricVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// Whole numbers are written as JSON integers.
pub(crate) fn serialize_values<S: Serializer>(values: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(values.len()))?;
    for (k, v) in values {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            map.serialize_entry(k, &(*v as i64))?;
        } else {
            map.serialize_entry(k, v)?;
        }
    }
    map.end()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricOptions {
    /// Restrict TCC to non-private methods.
    pub tcc_visible_only: bool,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self { tcc_visible_only: true }
    }
}

fn expr_decisions(e: &Expr) -> u32 {
    let mut n = 0;
    e.walk(&mut |x| match x {
        Expr::Ternary { .. } => n += 1,
        Expr::Binary { op, .. } if op == "&&" || op == "||" => n += 1,
        _ => {}
    });
    n
}

/// 1 + decision points (if, loops, case arms, catch, ternary, `&&`, `||`).
pub fn compute_cyclo(body: &Stmt) -> u32 {
    let mut n = 1;
    body.walk(&mut |s| {
        if matches!(
            s.kind,
            StmtKind::If
                | StmtKind::For
                | StmtKind::While
                | StmtKind::Do
                | StmtKind::CaseArm
                | StmtKind::Catch
        ) {
            n += 1;
        }
        n += s.exprs.iter().map(expr_decisions).sum::<u32>();
    });
    n
}

/// Deepest nesting of control structures; `else if` chains stay flat.
pub fn compute_max_nesting(body: &Stmt) -> u32 {
    fn go(s: &Stmt, level: u32) -> u32 {
        let here = if s.kind.is_nesting() { level + 1 } else { level };
        let mut max = here;
        for c in &s.children {
            let d = if c.kind == StmtKind::ElseArm
                && c.children.len() == 1
                && c.children[0].kind == StmtKind::If
            {
                go(&c.children[0], here - 1)
            } else {
                go(c, here)
            };
            max = max.max(d);
        }
        max
    }
    go(body, 0)
}

fn vector(entity: String, file: &str, scope: Scope, pairs: &[(&str, f64)]) -> MetricVector {
    MetricVector {
        entity,
        file: file.to_string(),
        scope,
        values: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

pub fn compute_method_metrics(model: &CodeModel, method: &MethodEntity) -> Result<MetricVector, IntegrityError> {
    let owner = model.type_entity(method.owner)?;
    let entity = model.method_qualified_name(method)?;
    let nop = method.params.len() as f64;
    let Some(body) = &method.body else {
        return Ok(vector(
            entity,
            &owner.file,
            Scope::Method,
            &[
                (MLOC, 0.0),
                (CYCLO, 0.0),
                (MAXNESTING, 0.0),
                (NOAV, 0.0),
                (NOP, nop),
                (ATFD, 0.0),
                (FDP, 0.0),
                (LAA, 1.0),
                (FANOUT, 0.0),
            ],
        ));
    };

    let own_fields: BTreeSet<&str> = method
        .accessed_fields
        .iter()
        .filter(|f| f.own)
        .map(|f| f.name.as_str())
        .collect();
    let foreign: BTreeSet<(u32, &str)> = method
        .accessed_fields
        .iter()
        .filter(|f| !f.own)
        .map(|f| (f.owner.0, f.name.as_str()))
        .collect();
    let providers: BTreeSet<u32> = foreign.iter().map(|(o, _)| *o).collect();
    let own_count = method.accessed_fields.iter().filter(|f| f.own).count();
    let total = method.accessed_fields.len();
    let laa = if total == 0 { 1.0 } else { own_count as f64 / total as f64 };
    let noav = method.used_params.len() + method.locals.len() + own_fields.len() + foreign.len();
    let fanout: BTreeSet<u32> = method
        .invoked
        .iter()
        .filter_map(|i| i.target)
        .filter(|t| *t != method.owner)
        .map(|t| t.0)
        .collect();

    Ok(vector(
        entity,
        &owner.file,
        Scope::Method,
        &[
            (MLOC, method.loc as f64),
            (CYCLO, compute_cyclo(body) as f64),
            (MAXNESTING, compute_max_nesting(body) as f64),
            (NOAV, noav as f64),
            (NOP, nop),
            (ATFD, foreign.len() as f64),
            (FDP, providers.len() as f64),
            (LAA, laa),
            (FANOUT, fanout.len() as f64),
        ],
    ))
}

/// Class metrics. TCC pairs are connected when both methods touch a common
/// own attribute; accessors and constructors never take part.
pub fn compute_class_metrics(model: &CodeModel, ty: &TypeEntity, opts: MetricOptions) -> MetricVector {
    let methods: Vec<&MethodEntity> = model.methods_of(ty).collect();
    let fields: Vec<_> = model.fields_of(ty).collect();

    let wmc: u32 = methods
        .iter()
        .map(|m| m.body.as_ref().map(compute_cyclo).unwrap_or(0))
        .sum();
    let nom = methods.len();
    let nopa = fields
        .iter()
        .filter(|f| f.visibility == Visibility::Public && !(f.is_static && f.is_final))
        .count();
    let noam = methods.iter().filter(|m| m.is_accessor()).count();

    let visible: Vec<BTreeSet<&str>> = methods
        .iter()
        .filter(|m| !m.is_constructor && !m.is_accessor())
        .filter(|m| !opts.tcc_visible_only || m.visibility != Visibility::Private)
        .map(|m| {
            m.accessed_fields
                .iter()
                .filter(|f| f.own)
                .map(|f| f.name.as_str())
                .collect()
        })
        .collect();
    let tcc = if visible.len() < 2 {
        0.0
    } else {
        let mut connected = 0usize;
        for i in 0..visible.len() {
            for j in i + 1..visible.len() {
                if !visible[i].is_disjoint(&visible[j]) {
                    connected += 1;
                }
            }
        }
        let pairs = visible.len() * (visible.len() - 1) / 2;
        connected as f64 / pairs as f64
    };

    let public_methods: Vec<&&MethodEntity> = methods
        .iter()
        .filter(|m| !m.is_constructor && m.visibility == Visibility::Public)
        .collect();
    let public_fields = fields.iter().filter(|f| f.visibility == Visibility::Public).count();
    let public_members = public_methods.len() + public_fields;
    let functional = public_methods.iter().filter(|m| !m.is_accessor()).count();
    let woc = if public_members == 0 {
        0.0
    } else {
        functional as f64 / public_members as f64
    };
    let amw = if nom == 0 { 0.0 } else { wmc as f64 / nom as f64 };

    let atfd: BTreeSet<(u32, &str)> = methods
        .iter()
        .flat_map(|m| m.accessed_fields.iter())
        .filter(|f| !f.own)
        .map(|f| (f.owner.0, f.name.as_str()))
        .collect();

    vector(
        ty.qualified_name.clone(),
        &ty.file,
        Scope::Class,
        &[
            (CLOC, ty.loc as f64),
            (WMC, wmc as f64),
            (NOM, nom as f64),
            (NOA, fields.len() as f64),
            (NOPA, nopa as f64),
            (NOAM, noam as f64),
            (TCC, tcc),
            (WOC, woc),
            (AMW, amw),
            (ATFD, atfd.len() as f64),
        ],
    )
}

/// Class vector and method vectors of one type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeMeasures {
    pub class: MetricVector,
    pub methods: Vec<MetricVector>,
}

/// Measure every type of the model, in type id order.
pub fn measure_all(model: &CodeModel, opts: MetricOptions) -> Result<Vec<TypeMeasures>, IntegrityError> {
    model
        .types
        .par_iter()
        .map(|ty| {
            let methods = model
                .methods_of(ty)
                .map(|m| compute_method_metrics(model, m))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TypeMeasures {
                class: compute_class_metrics(model, ty, opts),
                methods,
            })
        })
        .collect()
}
