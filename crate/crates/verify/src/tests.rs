use std::collections::BTreeSet;

use jacobi_core::lmo::GeneratorTable;
use jacobi_core::modules::ModuleCache;
use jacobi_core::BigInt;

use crate::{cases, find, group_name, run_case, Context, Report};

const TABLE: &str = include_str!("../../core/data/generators.json");

#[test]
fn one_case_per_criterion() {
    let crit: Vec<u32> = cases().iter().map(|c| c.criterion).collect();
    assert_eq!(crit, (1..=14).collect::<Vec<_>>());
    let ids: BTreeSet<&str> = cases().iter().map(|c| c.id).collect();
    assert_eq!(ids.len(), 14);
    let slow: Vec<u32> = cases().iter().filter(|c| c.slow).map(|c| c.criterion).collect();
    assert_eq!(slow, vec![6, 9, 14]);
    assert!(find("no-such-case").is_err());
}

#[test]
fn torsion_case_passes_and_reports() {
    let table = GeneratorTable::load().unwrap();
    let cache = ModuleCache::new(None);
    let cx = Context { cache: &cache, table: &table };
    let r = run_case("a62-torsion", &cx).unwrap();
    assert!(r.pass, "{}", r.text());
    assert!(r.text().starts_with("[PASS] a62-torsion"));
    assert!(r.checks.iter().any(|c| c.detail.contains("1, 1, 3")), "{}", r.text());

    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("elapsed_ms"));
    let back: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);

    let again = run_case("a62-torsion", &cx).unwrap();
    assert_eq!(again.without_timing(), r.clone().without_timing());
    assert!(!serde_json::to_string(&r.without_timing()).unwrap().contains("elapsed_ms"));
}

#[test]
fn sabotaged_table_fails_only_table_checks() {
    let good = "\"log\": \"strut(1+,1-) + strut(1+,2-) - 1";
    assert!(TABLE.contains(good));
    let bad = TABLE.replacen(good, "\"log\": \"strut(1+,1-) + strut(1+,2-) + 1", 1);
    let table = GeneratorTable::from_json(&bad).unwrap();
    let cache = ModuleCache::new(None);
    let cx = Context { cache: &cache, table: &table };
    assert!(!run_case("delta-lemma", &cx).unwrap().pass);
    assert!(run_case("sl2-prism", &cx).unwrap().pass);
    assert!(run_case("a62-aaab", &cx).unwrap().pass);

    let table = GeneratorTable::load().unwrap();
    let cx = Context { cache: &cache, table: &table };
    assert!(run_case("delta-lemma", &cx).unwrap().pass);
}

#[test]
fn group_names() {
    assert_eq!(group_name(0, &[]), "0");
    assert_eq!(group_name(1, &[BigInt::from(3)]), "ℤ/3 ⊕ ℤ");
    assert_eq!(group_name(2, &[]), "ℤ^2");
}
