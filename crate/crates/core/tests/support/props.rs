//! Property bodies shared by the property tests and the acceptance run.
//! Each returns `Err` on the first violated assertion.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use tdmap_core::config::Config;
use tdmap_core::features::{build_reference_graph, find_controllers, identify_features};
use tdmap_core::frontend::{build_model, parse_unit};
use tdmap_core::metrics::*;
use tdmap_core::model::CodeModel;
use tdmap_core::smells::{detect_class_smells, detect_method_smells, finding_key, SmellFinding, SmellType, ThresholdConfig, Tighten};

use crate::gen;

pub const CASES: u32 = 200;

fn model_of(files: &[(String, String)]) -> CodeModel {
    build_model(files.iter().map(|(p, s)| parse_unit(s, p).unwrap()).collect()).unwrap()
}

fn vectors(model: &CodeModel) -> BTreeMap<String, BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for tm in measure_all(model, Config::default().metric_options()).unwrap() {
        out.insert(tm.class.entity.clone(), tm.class.values.clone());
        for m in tm.methods {
            out.insert(m.entity, m.values);
        }
    }
    out
}

fn vector(entity: &str, scope: Scope, values: &[(&str, f64)]) -> MetricVector {
    MetricVector {
        entity: entity.into(),
        file: "X.java".into(),
        scope,
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

prop_compose! {
    fn method_vector(i: usize)(
        mloc in 0u32..140, cyclo in 1u32..16, nest in 0u32..8, noav in 0u32..14,
        atfd in 0u32..10, fdp in 0u32..6, laa in 0.0f64..=1.0,
    ) -> MetricVector {
        vector(&format!("X#m{i}()"), Scope::Method, &[
            (MLOC, mloc as f64), (CYCLO, cyclo as f64), (MAXNESTING, nest as f64),
            (NOAV, noav as f64), (NOP, 0.0), (ATFD, atfd as f64), (FDP, fdp as f64),
            (LAA, laa), (FANOUT, 0.0),
        ])
    }
}

prop_compose! {
    pub fn class_case()(
        cloc in 0u32..500, wmc in 0u32..140, nopa in 0u32..8, noam in 0u32..14,
        tcc in 0.0f64..=1.0, woc in 0.0f64..=1.0, atfd in 0u32..12,
        m0 in method_vector(0), m1 in method_vector(1), m2 in method_vector(2),
    ) -> (MetricVector, Vec<MetricVector>) {
        let cv = vector("X", Scope::Class, &[
            (CLOC, cloc as f64), (WMC, wmc as f64), (NOM, 3.0), (NOA, 0.0),
            (NOPA, nopa as f64), (NOAM, noam as f64), (TCC, tcc), (WOC, woc),
            (AMW, wmc as f64 / 3.0), (ATFD, atfd as f64),
        ]);
        (cv, vec![m0, m1, m2])
    }
}

fn detect(cv: &MetricVector, ms: &[MetricVector], cfg: &ThresholdConfig) -> Vec<SmellFinding> {
    let mut out = Vec::new();
    for m in ms {
        out.extend(detect_method_smells(m, cfg).unwrap());
    }
    let class = detect_class_smells(cv, &out, cfg).unwrap();
    out.extend(class);
    out
}

fn per_entity(fs: &[SmellFinding]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for f in fs {
        *m.entry(f.entity_key.clone()).or_default() += 1;
    }
    m
}

/// Tightening one threshold never adds a finding. The only allowed new
/// key is a BrainClass on a class that was a GodClass before, since
/// BrainClass is defined on non-God classes.
pub fn tightening_never_grows_findings(
    (cv, ms): (MetricVector, Vec<MetricVector>),
    term: usize,
    factor: f64,
) -> Result<(), TestCaseError> {
    let base = ThresholdConfig::default();
    let mut tight = base.clone();
    let (name, dir) = ThresholdConfig::TERMS[term];
    let t = tight.get_mut(name).unwrap();
    *t = match dir {
        Tighten::Raise => *t * (1.0 + factor),
        Tighten::Lower => *t * (1.0 - factor),
    };
    prop_assert!(tight.validate().is_ok());

    let before = detect(&cv, &ms, &base);
    let after = detect(&cv, &ms, &tight);
    prop_assert!(after.len() <= before.len());
    let b = per_entity(&before);
    for (e, n) in per_entity(&after) {
        prop_assert!(n <= b.get(&e).copied().unwrap_or(0), "{e} grew under {name}");
    }
    let bk: BTreeSet<String> = before.iter().map(finding_key).collect();
    for f in &after {
        let k = finding_key(f);
        let swapped = f.smell == SmellType::BrainClass && bk.contains(&format!("GodClass|{}", f.entity_key));
        prop_assert!(bk.contains(&k) || swapped, "{k} appeared under {name}");
    }
    Ok(())
}

pub fn model_and_features_ignore_input_order(seed: u64, shuffle: u64) -> Result<(), TestCaseError> {
    let g = gen::generate(seed, &gen::Plain);
    let units: Vec<_> = g.files.iter().map(|(p, s)| parse_unit(s, p).unwrap()).collect();
    let mut shuffled = units.clone();
    shuffled.shuffle(&mut StdRng::seed_from_u64(shuffle));
    let a = build_model(units).unwrap();
    let b = build_model(shuffled).unwrap();
    prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let cfg = Config::default().features;
    prop_assert_eq!(identify_features(&a, &cfg), identify_features(&b, &cfg));
    Ok(())
}

pub fn renaming_identifiers_keeps_metrics(seed: u64, salt: u64) -> Result<(), TestCaseError> {
    let plain = gen::generate(seed, &gen::Plain);
    let renamed = gen::generate(seed, &gen::Renamed::new(salt));
    let va = vectors(&model_of(&plain.files));
    let vb = vectors(&model_of(&renamed.files));
    prop_assert_eq!(va.len(), vb.len());
    let pairs = plain.classes.iter().zip(&renamed.classes).chain(plain.methods.iter().zip(&renamed.methods));
    for (ka, kb) in pairs {
        prop_assert_eq!(&va[ka], &vb[kb], "{} vs {}", ka, kb);
    }
    Ok(())
}

pub fn generated_projects_respect_metric_invariants(seed: u64) -> Result<(), TestCaseError> {
    let g = gen::generate(seed, &gen::Plain);
    let model = model_of(&g.files);
    prop_assert!(model.files.values().all(|f| f.parse_gaps == 0));
    for tm in measure_all(&model, Config::default().metric_options()).unwrap() {
        let wmc: f64 = tm.methods.iter().map(|m| m.get(CYCLO).unwrap()).sum();
        prop_assert_eq!(tm.class.get(WMC), Some(wmc));
        for r in [TCC, WOC] {
            let v = tm.class.get(r).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
        for m in &tm.methods {
            let laa = m.get(LAA).unwrap();
            prop_assert!((0.0..=1.0).contains(&laa));
            prop_assert!(m.get(CYCLO).unwrap() <= wmc);
        }
    }
    let graph = build_reference_graph(&model);
    let files: BTreeSet<&String> = model.files.keys().collect();
    for c in find_controllers(&graph) {
        prop_assert_eq!(graph.in_degree(&c), 0);
    }
    for f in identify_features(&model, &Config::default().features) {
        prop_assert!(f.files.contains(&f.controller));
        let set: BTreeSet<&String> = f.files.iter().collect();
        prop_assert!(set.is_subset(&files));
        for member in f.files.iter().filter(|m| **m != f.controller) {
            for next in graph.successors(member) {
                prop_assert!(set.contains(next), "{} leaves feature {}", next, f.name);
            }
        }
    }
    Ok(())
}
