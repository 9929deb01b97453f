//! One pass/fail line per acceptance criterion. Exits non-zero when any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;

use metacat_cli::bench::run_bench;
use metacat_core::dedup::find_duplicates;
use metacat_core::enrich::detect_language;
use metacat_core::license::{
    check_compatibility, compose, relicensing_candidates, Duty, LicenseDb, LicenseSpec, Permission, Prohibition,
};
use metacat_core::model::to_graph;
use metacat_core::quality::{
    evaluate_all, read_dqv, registry, to_dqv, ExternalStores, MetricResult, NotComputedLog, NotComputedReason, Outcome,
    QualityConfig,
};
use metacat_core::rdf::{split_dataset_graphs, Graph, Iri, Subject, Term, Triple};
use metacat_core::search::scan::ScanEngine;
use metacat_core::search::{Bm25Params, DocEntry, InvertedIndex, SearchQuery, SortOrder, SynonymTable, TextFields};
use metacat_core::testkit::{self, TestRng};
use metacat_core::vocab::{dqv, rdf};

type CheckResult = Result<String, String>;

fn check(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn at(text: &str) -> chrono::DateTime<chrono::Utc> {
    text.parse().unwrap()
}

fn quality_range() -> CheckResult {
    let start = Instant::now();
    let config = QualityConfig::at(at("2021-06-01T00:00:00Z"));
    let stores = ExternalStores::new(LicenseDb::bundled());
    let log = NotComputedLog::new();
    let mut rng = testkit::rng(2024);
    let (mut scored, mut errors) = (0usize, 0usize);
    for i in 0..1000 {
        let record = testkit::random_record(&mut rng, i);
        let results = catch_unwind(AssertUnwindSafe(|| evaluate_all(&record, &to_graph(&record), &config, &stores, &log)))
            .map_err(|_| format!("evaluation panicked on record {i}"))?;
        check(results.len() == 48, || format!("record {i}: {} results", results.len()))?;
        for r in &results {
            match r.outcome {
                Outcome::Score(s) => {
                    check(s <= 5, || format!("record {i} metric {}: score {s}", r.metric))?;
                    scored += 1;
                }
                Outcome::NotComputed(NotComputedReason::EvaluationError) => errors += 1,
                Outcome::NotComputed(_) => {}
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("1000 records, {scored} scores in 0..=5, {errors} evaluation errors, no panics, {secs:.2} s"))
}

fn measurement_nodes(g: &Graph) -> BTreeSet<Subject> {
    let class = Term::Iri(dqv::quality_measurement());
    g.iter().filter(|t| t.predicate == rdf::type_() && t.object == class).map(|t| t.subject.clone()).collect()
}

fn config_semantics() -> CheckResult {
    let stores = ExternalStores::new(LicenseDb::bundled());
    let mut rng = testkit::rng(41);
    let mut logged = 0;
    for i in 0..100 {
        let record = testkit::random_record(&mut rng, i);
        let slice = to_graph(&record);
        let early = QualityConfig::at(at("2019-01-01T00:00:00Z"));
        let log = NotComputedLog::new();
        let first = evaluate_all(&record, &slice, &early, &stores, &log);
        check(first[40].id == 41 && first[40].outcome == Outcome::NotComputed(NotComputedReason::SkippedLongRunning), || {
            format!("record {i}: metric 41 is {:?}", first[40].outcome)
        })?;
        let missing: Vec<String> = first
            .iter()
            .filter(|r| r.score().is_none())
            .map(|r| format!("{}\t{}", record.iri, r.metric))
            .collect();
        let lines = log.lines();
        check(lines.len() == missing.len(), || format!("record {i}: {} log lines for {} gaps", lines.len(), missing.len()))?;
        let prefixes: BTreeSet<String> = lines.iter().map(|l| l.rsplit_once('\t').unwrap().0.to_owned()).collect();
        check(prefixes == missing.iter().cloned().collect(), || format!("record {i}: log lines do not match gaps"))?;
        logged += lines.len();

        let quiet = QualityConfig { log_if_not_computed: false, ..early.clone() };
        let quiet_log = NotComputedLog::new();
        evaluate_all(&record, &slice, &quiet, &stores, &quiet_log);
        check(quiet_log.is_empty(), || "log written with log_if_not_computed=false".into())?;

        // a later evaluation time changes time-dependent scores; the rerun replaces nodes
        let later = QualityConfig::at(at("2031-01-01T00:00:00Z"));
        let second = evaluate_all(&record, &slice, &later, &stores, &NotComputedLog::new());
        let g1 = to_dqv(&record.iri, &first, true, &Graph::new());
        let g2 = to_dqv(&record.iri, &second, true, &g1);
        let nodes = measurement_nodes(&g2);
        let scored = second.iter().filter(|r| r.score().is_some()).count();
        check(nodes.len() == scored, || format!("record {i}: {} nodes for {scored} scores", nodes.len()))?;
        for node in &nodes {
            let values = g2.with_subject(node).filter(|t| t.predicate == dqv::value()).count();
            check(values == 1, || format!("record {i}: node {node:?} has {values} values"))?;
        }
        check(g2.len() == 4 * scored, || format!("record {i}: {} triples for {scored} scores", g2.len()))?;
    }
    Ok(format!("metric 41 skipped, {logged} log lines matched gaps one to one, reruns left no duplicate nodes (100 records)"))
}

fn random_results(rng: &mut TestRng) -> Vec<MetricResult> {
    let mut out = Vec::new();
    for d in registry() {
        for _ in 0..rng.gen_range(0..=2) {
            let outcome = if rng.gen_bool(0.85) {
                Outcome::Score(rng.gen_range(0..=5))
            } else {
                Outcome::NotComputed(NotComputedReason::EvaluationError)
            };
            out.push(MetricResult { id: d.id, metric: d.key.to_owned(), outcome });
        }
    }
    out
}

fn dqv_round_trip() -> CheckResult {
    let mut rng = testkit::rng(99);
    let mut total = 0;
    for i in 0..100 {
        let dataset = Iri::new(format!("https://example.org/dataset/{i}")).unwrap();
        let results = random_results(&mut rng);
        let graph = to_dqv(&dataset, &results, true, &Graph::new());
        let text = metacat_core::rdf::write_ntriples(&graph);
        let parsed = metacat_core::rdf::parse_ntriples(&text).map_err(|e| e.to_string())?;
        let mut expected: Vec<(String, u8)> =
            results.iter().filter_map(|r| r.score().map(|s| (r.metric.clone(), s))).collect();
        expected.sort();
        let got = read_dqv(&parsed, &dataset);
        check(got == expected, || format!("set {i}: {} pairs recovered, {} expected", got.len(), expected.len()))?;
        total += expected.len();
    }
    Ok(format!("100 result sets, {total} (metric, value) pairs recovered exactly, repeats included"))
}

fn members(records: &[metacat_core::model::DatasetRecord], t: f64) -> Vec<Vec<Iri>> {
    find_duplicates(records, t).into_iter().map(|c| c.members).collect()
}

fn dedup_oracle() -> CheckResult {
    for seed in 0..30 {
        let mut rng = testkit::rng(seed);
        let (records, planted) = testkit::planted_corpus(&mut rng, 200, 15);
        check(members(&records, 1.0) == planted, || format!("seed {seed}: planted clusters not recovered"))?;
    }
    let mut compared = 0;
    for seed in 0..30 {
        let mut rng = testkit::rng(1000 + seed);
        let records = testkit::near_duplicate_corpus(&mut rng, 200);
        for t in [0.5, 0.8, 0.9] {
            check(members(&records, t) == testkit::brute_force_duplicates(&records, t), || {
                format!("seed {seed} threshold {t}: differs from all-pairs oracle")
            })?;
            compared += 1;
        }
    }
    let mut rng = testkit::rng(7);
    for case in 0..500 {
        let records = testkit::near_duplicate_corpus(&mut rng, 30);
        let lo: f64 = rng.gen_range(0.3..1.0);
        let hi = (lo + rng.gen_range(0.0..0.5)).min(1.0);
        let low = members(&records, lo);
        for c in members(&records, hi) {
            check(low.iter().any(|l| c.iter().all(|m| l.contains(m))), || {
                format!("case {case}: cluster at {hi} not contained in one at {lo}")
            })?;
        }
    }
    Ok(format!("30 planted corpora at 1.0, {compared} oracle comparisons at 0.5/0.8/0.9, 500 monotonicity cases"))
}

fn slicing_partition() -> CheckResult {
    let mut slices = 0;
    for seed in 0..100 {
        let mut rng = testkit::rng(5000 + seed);
        let g = testkit::random_catalog_graph(&mut rng);
        let parts = split_dataset_graphs(&g);
        let mut union: BTreeSet<Triple> = BTreeSet::new();
        let mut reachable: BTreeSet<Triple> = BTreeSet::new();
        for (root, slice) in &parts {
            let expected = testkit::reachable_from(&g, root);
            check(slice.iter().all(|t| expected.contains(t)), || format!("seed {seed}: slice of {root} has unreachable triples"))?;
            union.extend(slice.iter().cloned());
            reachable.extend(expected);
        }
        check(union == reachable, || format!("seed {seed}: union of slices differs from the reachable set"))?;
        slices += parts.len();
    }
    Ok(format!("100 graphs, {slices} slices"))
}

fn search_correctness() -> CheckResult {
    let (mut text, mut faceted, mut bbox, mut distance) = (0, 0, 0, 0);
    for seed in 0..100 {
        let mut rng = testkit::rng(seed);
        let docs = testkit::random_doc_corpus(&mut rng, 50);
        let synonyms = testkit::test_synonyms();
        let params = Bm25Params::default();
        let index = InvertedIndex::build_with(docs.clone(), params, synonyms.clone()).map_err(|e| e.to_string())?;
        let scan = ScanEngine::new(docs, params, synonyms.clone()).map_err(|e| e.to_string())?;
        for q in 0..10 {
            let query = testkit::random_query(&mut rng);
            let oracle = testkit::oracle_search(index.docs(), &query, &synonyms, &params);
            let got = index.search(&query).map_err(|e| e.to_string())?;
            let ctx = || format!("seed {seed} query {q}");
            check(got.total == oracle.total, || format!("{}: total {} vs {}", ctx(), got.total, oracle.total))?;
            check(got.facets == oracle.facets, || format!("{}: facet counts differ", ctx()))?;
            check(got.hits.len() == oracle.hits.len(), || format!("{}: page length differs", ctx()))?;
            for (h, o) in got.hits.iter().zip(&oracle.hits) {
                check(h.doc.dataset == o.dataset, || format!("{}: ranking differs", ctx()))?;
                check((h.score - o.score).abs() <= 1e-9 * o.score.abs().max(1.0), || format!("{}: score differs", ctx()))?;
                let same_distance = match (h.distance_km, o.distance_km) {
                    (Some(a), Some(b)) => (a - b).abs() < 1e-6,
                    (a, b) => a == b,
                };
                check(same_distance, || format!("{}: distance differs", ctx()))?;
            }
            check(scan.search(&query).map_err(|e| e.to_string())? == got, || format!("{}: scan baseline differs", ctx()))?;
            text += usize::from(!query.text.trim().is_empty());
            faceted += usize::from(!query.filters.is_empty());
            bbox += usize::from(query.bbox.is_some());
            distance += usize::from(matches!(query.sort, SortOrder::Distance(_)));
        }
    }

    let doc = |id: &str, title: &str| {
        let mut d = DocEntry::new(Iri::new(format!("https://example.org/{id}")).unwrap());
        d.texts.insert("de".into(), TextFields { title: title.into(), ..TextFields::default() });
        d
    };
    let table = SynonymTable::from_entries([("stadtbahn", vec!["straßenbahn"])]);
    let index = InvertedIndex::build_with(
        vec![doc("tram", "Stadtbahn"), doc("bus", "Buslinien"), doc("air", "Luftqualität")],
        Bm25Params::default(),
        table,
    )
    .map_err(|e| e.to_string())?;
    let mut q = SearchQuery::text("Straßenbahn");
    q.synonyms = true;
    let on: Vec<String> = index.search(&q).unwrap().hits.iter().map(|h| h.doc.dataset.to_string()).collect();
    q.synonyms = false;
    let off = index.search(&q).unwrap().total;
    check(on == ["https://example.org/tram"] && off == 0, || format!("Stadtbahn scenario: on={on:?} off={off}"))?;
    Ok(format!(
        "1000 queries equal the oracle ({text} text, {faceted} faceted, {bbox} bbox, {distance} distance-sorted); Stadtbahn found only with synonyms"
    ))
}

fn search_performance() -> CheckResult {
    let start = Instant::now();
    let r = run_bench(50_000, 200, 7);
    let secs = start.elapsed().as_secs_f64();
    let line = format!(
        "simple {:.1}x ({:.0} vs {:.0} us), faceted {:.1}x ({:.0} vs {:.0} us), {secs:.1} s",
        r.simple.speedup,
        r.simple.index_median_us,
        r.simple.scan_median_us,
        r.faceted.speedup,
        r.faceted.index_median_us,
        r.faceted.scan_median_us
    );
    check(r.simple.speedup >= 2.0 && r.faceted.speedup >= 5.0 && secs < 300.0, || line.clone())?;
    Ok(line)
}

/// Attribute bitmasks, computed without the library's set logic.
fn bits(l: &LicenseSpec) -> (u8, u8, u8) {
    let mask = |hits: Vec<bool>| hits.iter().enumerate().fold(0u8, |m, (i, &b)| if b { m | 1 << i } else { m });
    (
        mask(Permission::ALL.iter().map(|p| l.permissions.contains(p)).collect()),
        mask(Duty::ALL.iter().map(|d| l.duties.contains(d)).collect()),
        mask(Prohibition::ALL.iter().map(|p| l.prohibitions.contains(p)).collect()),
    )
}

fn license_oracle(inputs: &[LicenseSpec], db: &[LicenseSpec]) -> Vec<String> {
    let sa = 1u8 << Duty::ALL.iter().position(|d| *d == Duty::ShareAlike).unwrap();
    let prohibited_perms = |prohib: u8| {
        Prohibition::ALL
            .iter()
            .enumerate()
            .filter(|(i, _)| prohib & (1 << i) != 0)
            .fold(0u8, |m, (_, p)| m | 1 << Permission::ALL.iter().position(|x| *x == p.permission()).unwrap())
    };
    let (mut perms, mut duties, mut prohib) = (0b1111u8, 0u8, 0u8);
    for l in inputs {
        let (p, d, x) = bits(l);
        perms &= p;
        duties |= d;
        prohib |= x;
    }
    let pinned: Vec<&LicenseSpec> = inputs.iter().filter(|l| bits(l).1 & sa != 0).collect();
    let pins: BTreeSet<&str> = pinned.iter().map(|l| l.id.as_str()).collect();
    if pins.len() > 1 || pinned.iter().any(|l| bits(l).0 & prohibited_perms(prohib) != 0) {
        return Vec::new();
    }
    let mut out: Vec<String> = db
        .iter()
        .filter(|l| {
            let (p, d, x) = bits(l);
            p & !perms == 0 && d & duties == duties && x & prohib == prohib && pins.iter().all(|id| *id == l.id.as_str())
        })
        .map(|l| l.id.to_string())
        .collect();
    out.sort();
    out
}

fn license_algebra() -> CheckResult {
    let mut rng = testkit::rng(12);
    for case in 0..1000 {
        let n = rng.gen_range(1..6);
        let inputs: Vec<LicenseSpec> = (0..n).map(|_| testkit::random_license(&mut rng, 8)).collect();
        let base = compose(&inputs).map_err(|e| e.to_string())?;
        let mut reversed = inputs.clone();
        reversed.reverse();
        check(compose(&reversed).unwrap() == base, || format!("case {case}: not commutative"))?;
        let doubled: Vec<LicenseSpec> = inputs.iter().chain(&inputs).cloned().collect();
        check(compose(&doubled).unwrap() == base, || format!("case {case}: not idempotent"))?;
        let single = &inputs[..1];
        check(check_compatibility(single).unwrap().compatible, || format!("case {case}: single input incompatible"))?;
    }
    let db = LicenseDb::bundled().licenses();
    let mut subsets = 0;
    for mask in 1u32..(1 << db.len()) {
        if mask.count_ones() > 4 {
            continue;
        }
        let inputs: Vec<LicenseSpec> = (0..db.len()).filter(|i| mask & (1 << i) != 0).map(|i| db[i].clone()).collect();
        let got: Vec<String> = relicensing_candidates(&inputs, db).into_iter().map(|l| l.id.to_string()).collect();
        check(got == license_oracle(&inputs, db), || format!("subset {mask:b}: candidates differ"))?;
        subsets += 1;
    }
    for l in db {
        check(check_compatibility(std::slice::from_ref(l)).unwrap().compatible, || format!("{} alone is incompatible", l.id))?;
    }
    Ok(format!("1000 random compositions, {subsets} subsets of {} licenses match enumeration", db.len()))
}

fn language_detection() -> CheckResult {
    let sentences = testkit::language_sentences();
    let correct = sentences.iter().filter(|(lang, text)| detect_language(text).is_some_and(|g| g.lang == *lang)).count();
    let line = format!("{correct}/{} correct", sentences.len());
    check(sentences.len() == 200 && correct * 10 >= sentences.len() * 9, || line.clone())?;
    Ok(line)
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn pipeline_determinism() -> CheckResult {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pipeline/pipeline.properties");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut trees = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_metacat"))
            .args(["run", "-c"])
            .arg(&config)
            .arg("-o")
            .arg(&out)
            .args(["--at", "2021-01-01T00:00:00Z"])
            .output()
            .map_err(|e| e.to_string())?;
        check(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
        trees.push(tree(&out));
    }
    let secs = start.elapsed().as_secs_f64();
    let slices = trees[0].keys().filter(|k| k.starts_with("datasets")).count();
    check(slices == 10, || format!("{slices} dataset files"))?;
    check(trees[0] == trees[1], || "output trees differ".into())?;
    check(secs < 10.0, || format!("took {secs:.1} s"))?;
    let bytes: usize = trees[0].values().map(Vec::len).sum();
    Ok(format!("{} files ({bytes} bytes) identical across two runs, {secs:.2} s", trees[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> CheckResult); 10] = [
        ("quality-range", quality_range),
        ("quality-config", config_semantics),
        ("dqv-round-trip", dqv_round_trip),
        ("dedup-oracle", dedup_oracle),
        ("slicing-partition", slicing_partition),
        ("search-correctness", search_correctness),
        ("search-performance", search_performance),
        ("license-algebra", license_algebra),
        ("language-detection", language_detection),
        ("pipeline-determinism", pipeline_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    std::panic::set_hook(Box::new(|_| {}));
    let (mut ran, mut failed) = (0, 0);
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name:<22} {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name:<22} {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
