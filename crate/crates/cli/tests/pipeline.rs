use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use chrono::{DateTime, Utc};
use metacat_cli::{run_pipeline, CliError, PipelineConfig};
use metacat_core::rdf::{parse_ntriples, Iri};
use metacat_core::search::{InvertedIndex, SearchQuery};
use metacat_core::vocab::dqv;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/pipeline")
}

fn at() -> DateTime<Utc> {
    "2021-01-01T00:00:00Z".parse().unwrap()
}

fn fixture_config(out: &Path) -> PipelineConfig {
    let mut c = PipelineConfig::load(&fixture_dir().join("pipeline.properties")).unwrap();
    c.redirect_output(out);
    c
}

/// Every file under `dir`, keyed by relative path.
fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn output_layout_matches_the_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let report = run_pipeline(&fixture_config(tmp.path()), at()).unwrap();
    assert_eq!((report.files, report.datasets, report.clusters), (2, 10, 1));
    assert!(report.skipped.is_empty());
    assert!(report.clean.empty_removed >= 2, "{:?}", report.clean);
    assert!(report.clean.language_removed >= 1);
    assert!(report.clean.formats_normalized >= 3);

    let files = tree(tmp.path());
    let slices: Vec<_> = files.keys().filter(|k| k.starts_with("datasets")).collect();
    assert_eq!(slices.len(), 10);
    for f in ["index.bin", "quality.nt", "links.nt", "duplicates.csv", "not-computed.log"] {
        assert!(files.contains_key(f), "{f} missing");
    }

    let links = String::from_utf8(files["links.nt"].clone()).unwrap();
    assert_eq!(links.lines().count(), 1);
    assert!(links.contains("dataset/stadtbahn") && links.contains("ds/fahrplan"));

    // four triples per measurement, one measurement per computed metric
    let dqv_graph = parse_ntriples(std::str::from_utf8(&files["quality.nt"]).unwrap()).unwrap();
    assert_eq!(dqv_graph.len(), 4 * report.measurements);
    let per_measurement = dqv_graph.iter().filter(|t| t.predicate == dqv::computed_on()).count();
    assert_eq!(per_measurement, report.measurements);

    let log = String::from_utf8(files["not-computed.log"].clone()).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), report.not_computed);
    assert!(lines.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(report.measurements + report.not_computed, 48 * 10);
    assert!(lines.iter().all(|l| l.split('\t').count() == 3));
    // the duplicate cluster store is present, so the cluster metrics are computed
    assert!(!lines.iter().any(|l| l.contains("dataset/stadtbahn\t") && l.ends_with("not_applicable") && l.contains("cluster")));

    let index = InvertedIndex::from_bytes(&files["index.bin"]).unwrap();
    assert_eq!(index.len(), 10);
    let hits = index.search(&SearchQuery::text("stadtbahn")).unwrap();
    assert_eq!(hits.total, 2);
    let leipzig = index.get(&Iri::new("https://data.example.org/dataset/luftqualitaet").unwrap()).unwrap();
    assert!(leipzig.texts.contains_key("de"), "untagged German text was not tagged: {:?}", leipzig.texts.keys());
    assert!(leipzig.point.is_some());
    assert!(leipzig.quality.is_some());
}

#[test]
fn runs_are_byte_identical_and_fast() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let start = Instant::now();
    run_pipeline(&fixture_config(a.path()), at()).unwrap();
    run_pipeline(&fixture_config(b.path()), at()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 10.0);
    let first = tree(a.path());
    assert_eq!(first, tree(b.path()));

    // rerunning into the same directory replaces stale slices and reproduces the tree
    fs::write(a.path().join("datasets/stale.nt"), "").unwrap();
    run_pipeline(&fixture_config(a.path()), at()).unwrap();
    assert_eq!(first, tree(a.path()));
}

#[test]
fn evaluation_time_changes_only_time_dependent_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_pipeline(&fixture_config(a.path()), at()).unwrap();
    run_pipeline(&fixture_config(b.path()), "2030-01-01T00:00:00Z".parse().unwrap()).unwrap();
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
    for (k, v) in &ta {
        if k.starts_with("datasets") || k == "links.nt" {
            assert_eq!(v, &tb[k], "{k}");
        }
    }
    assert_ne!(ta["quality.nt"], tb["quality.nt"]);
}

#[test]
fn stages_can_be_disabled() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = fixture_config(tmp.path());
    c.quality_enabled = false;
    c.dedup_enabled = false;
    let report = run_pipeline(&c, at()).unwrap();
    assert_eq!((report.clusters, report.measurements), (0, 0));
    let files = tree(tmp.path());
    assert!(!files.contains_key("quality.nt") && !files.contains_key("links.nt"));
    let index = InvertedIndex::from_bytes(&files["index.bin"]).unwrap();
    assert!(index.docs().iter().all(|d| d.quality.is_none()));

    let tmp = tempfile::tempdir().unwrap();
    let mut c = fixture_config(tmp.path());
    c.clean_enabled = false;
    c.language_tags = false;
    c.places = false;
    let report = run_pipeline(&c, at()).unwrap();
    assert_eq!(report.clean, Default::default());
    let index = InvertedIndex::from_bytes(&fs::read(tmp.path().join("index.bin")).unwrap()).unwrap();
    let doc = index.get(&Iri::new("https://data.example.org/dataset/luftqualitaet").unwrap()).unwrap();
    assert!(doc.texts.contains_key("") && doc.point.is_none());
}

#[test]
fn prior_measurements_are_replaced_or_kept() {
    let other = "<https://w3id.org/metacat/measurement/x> <http://www.w3.org/ns/dqv#computedOn> <https://elsewhere.example/ds> .\n\
                 <https://w3id.org/metacat/measurement/x> <http://www.w3.org/ns/dqv#value> \"3\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n";
    let own = "<https://old.example/m1> <http://www.w3.org/ns/dqv#computedOn> <https://data.example.org/dataset/minimal> .\n\
               <https://data.example.org/dataset/minimal> <http://www.w3.org/ns/dqv#hasQualityMeasurement> <https://old.example/m1> .\n";
    for remove in [true, false] {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(tmp.path().join("quality.nt"), format!("{other}{own}")).unwrap();
        let mut c = fixture_config(tmp.path());
        c.remove_measurements = remove;
        run_pipeline(&c, at()).unwrap();
        let text = fs::read_to_string(tmp.path().join("quality.nt")).unwrap();
        assert!(text.contains("elsewhere.example/ds"), "unrelated measurements must survive");
        assert_eq!(text.contains("old.example/m1"), !remove);
    }
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.properties");
    fs::write(&path, body).unwrap();
    path
}

fn exit_code(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_metacat")).args(args).output().unwrap();
    out.status.code().unwrap()
}

#[test]
fn library_errors_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let c = PipelineConfig::parse("io.input=nowhere\nio.output=out", tmp.path()).unwrap();
    let err = run_pipeline(&c, at()).unwrap_err();
    assert!(matches!(err, CliError::MissingInput(_)) && err.exit_code() == 2);

    let broken = fixture_dir().join("broken.nt");
    let c = PipelineConfig::parse(&format!("io.input={}\nio.output=out", broken.display()), tmp.path()).unwrap();
    match run_pipeline(&c, at()).unwrap_err() {
        CliError::Parse { file, line, .. } => assert_eq!((file, line), (broken, 2)),
        other => panic!("{other}"),
    }
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let input = fixture_dir().join("input");
    let good = write_config(tmp.path(), &format!("io.input={}\nio.output=out\n", input.display()));
    let good = good.to_str().unwrap();
    assert_eq!(exit_code(&["run", "-c", good, "--at", "2021-01-01T00:00:00Z"]), 0);
    assert!(tmp.path().join("out/index.bin").exists());

    let missing = write_config(tmp.path(), "io.input=missing\nio.output=out\n");
    assert_eq!(exit_code(&["run", "-c", missing.to_str().unwrap()]), 2);

    let broken = fixture_dir().join("broken.nt");
    let parse = write_config(tmp.path(), &format!("io.input={}\nio.output=out\n", broken.display()));
    assert_eq!(exit_code(&["run", "-c", parse.to_str().unwrap()]), 3);

    let bad = write_config(tmp.path(), &format!("io.input={}\nio.output=out\ndedup.threshold=2\n", input.display()));
    assert_eq!(exit_code(&["run", "-c", bad.to_str().unwrap()]), 4);
    assert_eq!(exit_code(&["run", "-c", tmp.path().join("absent.properties").to_str().unwrap()]), 4);
    assert_eq!(exit_code(&["run", "-c", good, "--at", "yesterday"]), 4);
}

#[test]
fn batch_subcommands_write_their_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = fixture_dir().join("input");
    let links = tmp.path().join("links.nt");
    let out = Command::new(env!("CARGO_BIN_EXE_metacat"))
        .args(["dedup", "-i", input.to_str().unwrap(), "--links", links.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
    assert_eq!(fs::read_to_string(&links).unwrap().lines().count(), 1);

    let dqv_path = tmp.path().join("q.nt");
    let log = tmp.path().join("nc.log");
    let status = Command::new(env!("CARGO_BIN_EXE_metacat"))
        .args(["quality", "-i", input.to_str().unwrap(), "-o", dqv_path.to_str().unwrap()])
        .args(["--log", log.to_str().unwrap(), "--at", "2021-01-01T00:00:00Z"])
        .status()
        .unwrap();
    assert!(status.success());
    let g = parse_ntriples(&fs::read_to_string(&dqv_path).unwrap()).unwrap();
    assert_eq!(g.len() % 4, 0);
    assert!(!fs::read_to_string(&log).unwrap().is_empty());

    assert_eq!(exit_code(&["dedup", "-i", "/nonexistent/x.nt"]), 2);
    assert_eq!(exit_code(&["dedup", "-i", input.to_str().unwrap(), "--threshold", "0"]), 4);
}

#[test]
fn extracted_synonyms_feed_the_next_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    run_pipeline(&fixture_config(&first), at()).unwrap();

    let table = tmp.path().join("synonyms.tsv");
    let status = Command::new(env!("CARGO_BIN_EXE_metacat"))
        .args(["synonyms", "extract", "--lexicon"])
        .arg(fixture_dir().join("lexicon.nt"))
        .arg("--index")
        .arg(first.join("index.bin"))
        .arg("-o")
        .arg(&table)
        .status()
        .unwrap();
    assert!(status.success());
    let tsv = fs::read_to_string(&table).unwrap();
    let headwords: Vec<&str> = tsv.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(headwords, ["luft", "stadtbahn"]);

    let second = tmp.path().join("second");
    let mut c = fixture_config(&second);
    c.synonyms = Some(table);
    run_pipeline(&c, at()).unwrap();
    let index = InvertedIndex::from_bytes(&fs::read(second.join("index.bin")).unwrap()).unwrap();
    let mut q = SearchQuery::text("Straßenbahn");
    assert_eq!(index.search(&q).unwrap().total, 0);
    q.synonyms = true;
    assert_eq!(index.search(&q).unwrap().total, 2);
}
