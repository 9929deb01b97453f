use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rayon::prelude::*;

use metacat_core::clean::{clean, CleanReport};
use metacat_core::dedup::{emit_links, find_duplicates, write_report, DuplicateCluster};
use metacat_core::enrich::{annotate_places, refine_language_tags, Gazetteer, LanguageDetector};
use metacat_core::license::LicenseDb;
use metacat_core::model::{from_graph, to_graph, DatasetRecord};
use metacat_core::quality::{
    aggregate_score, evaluate_all, to_dqv, ClusterStore, CommunityStore, ExternalStores, MetricResult,
    NotComputedLog, ProviderStore, QualityConfig,
};
use metacat_core::rdf::{parse_document, parse_ntriples, split_dataset_graphs, write_ntriples, Graph, Iri, Subject};
use metacat_core::search::{Bm25Params, DocEntry, InvertedIndex, SynonymTable};
use metacat_core::util::short_hash;
use metacat_core::vocab::dqv;

use crate::{CliError, PipelineConfig};

/// Datasets whose slice could not be mapped, with the reason.
pub type Skipped = Vec<(Iri, String)>;

#[derive(Debug, Default)]
pub struct RunReport {
    pub files: usize,
    pub triples: usize,
    pub datasets: usize,
    pub skipped: Skipped,
    pub clean: CleanReport,
    pub clusters: usize,
    pub measurements: usize,
    pub not_computed: usize,
}

/// The input files in processing order: `path` itself, or every `.nt`/`.ttl`
/// file below it sorted by relative path.
pub fn input_files(path: &Path) -> Result<Vec<(PathBuf, String)>, CliError> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_owned()));
    }
    if path.is_file() {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(vec![(path.to_owned(), name)]);
    }
    let mut out = Vec::new();
    let mut stack = vec![path.to_owned()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).map_err(CliError::io(&dir))? {
            let p = entry.map_err(CliError::io(&dir))?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "nt" || e == "ttl") {
                let rel = p.strip_prefix(path).unwrap_or(&p).to_string_lossy().replace('\\', "/");
                out.push((p, rel));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(out)
}

/// Parses and merges every input file.
pub fn read_input(path: &Path) -> Result<(Graph, usize), CliError> {
    let files = input_files(path)?;
    let mut graph = Graph::new();
    for (file, name) in &files {
        let text = fs::read_to_string(file).map_err(CliError::io(file))?;
        let g = parse_document(&text, name).map_err(|e| CliError::Parse {
            file: file.clone(),
            line: e.line,
            column: e.column,
            message: e.message,
        })?;
        graph.extend_from(&g);
    }
    Ok((graph, files.len()))
}

/// Maps every dataset slice to a record without cleaning or enrichment.
pub fn read_records(path: &Path) -> Result<(Vec<DatasetRecord>, Skipped), CliError> {
    let (graph, _) = read_input(path)?;
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (iri, slice) in split_dataset_graphs(&graph) {
        match from_graph(&slice, &iri) {
            Ok(mut r) => {
                r.canonicalize();
                records.push(r);
            }
            Err(e) => skipped.push((iri, e.to_string())),
        }
    }
    Ok((records, skipped))
}

fn read_store<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, metacat_core::quality::StoreError>) -> Result<T, CliError> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_owned()));
    }
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    parse(&text).map_err(|e| CliError::Parse { file: path.to_owned(), line: e.line, column: 1, message: e.message })
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    fs::write(path, bytes).map_err(CliError::io(path))
}

pub fn quality_config(config: &PipelineConfig, at: DateTime<Utc>) -> Result<QualityConfig, CliError> {
    let q = QualityConfig {
        include_long_running: config.include_long_running,
        log_if_not_computed: config.log_if_not_computed,
        remove_measurements: config.remove_measurements,
        evaluation_time: at,
        weights: config.weights.clone(),
        min_description_words: config.min_description_words,
    };
    q.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(q)
}

/// Splits `prior` by the dataset each measurement was computed on. Triples
/// that belong to none of `datasets` are returned under `None`.
fn partition_prior(prior: Graph, datasets: &BTreeSet<Iri>) -> (BTreeMap<Iri, Graph>, Graph) {
    let computed_on = dqv::computed_on();
    let owner: HashMap<Subject, Iri> = prior
        .iter()
        .filter(|t| t.predicate == computed_on)
        .filter_map(|t| Some((t.subject.clone(), t.object.as_iri()?.clone())))
        .filter(|(_, d)| datasets.contains(d))
        .collect();
    let link = dqv::has_quality_measurement();
    let mut per: BTreeMap<Iri, Graph> = BTreeMap::new();
    let mut rest = Graph::new();
    for t in prior.iter() {
        let by_subject = owner.get(&t.subject);
        let by_link = (t.predicate == link).then(|| t.object.as_subject().and_then(|o| owner.get(&o))).flatten();
        match by_subject.or(by_link) {
            Some(d) => {
                per.entry(d.clone()).or_default().insert(t.clone());
            }
            None => {
                rest.insert(t.clone());
            }
        }
    }
    (per, rest)
}

fn remove_stale(dir: &Path, keep: &BTreeSet<String>) -> Result<(), CliError> {
    if !dir.exists() {
        return Ok(());
    }
    for entry in fs::read_dir(dir).map_err(CliError::io(dir))? {
        let p = entry.map_err(CliError::io(dir))?.path();
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if name.ends_with(".nt") && !keep.contains(&name) {
            fs::remove_file(&p).map_err(CliError::io(&p))?;
        }
    }
    Ok(())
}

/// Runs read, clean, enrich, dedup, quality, write and index with `at` as the
/// evaluation time. Output is a pure function of the input files, the
/// configuration, `at` and any `quality.nt` already in the output directory.
pub fn run_pipeline(config: &PipelineConfig, at: DateTime<Utc>) -> Result<RunReport, CliError> {
    let quality_config = quality_config(config, at)?;
    let providers = config.providers.as_deref().map(|p| read_store(p, ProviderStore::parse)).transpose()?;
    let community = config.community.as_deref().map(|p| read_store(p, CommunityStore::parse)).transpose()?;
    let synonyms = match &config.synonyms {
        None => SynonymTable::new(),
        Some(path) => {
            if !path.exists() {
                return Err(CliError::MissingInput(path.clone()));
            }
            let text = fs::read_to_string(path).map_err(CliError::io(path))?;
            SynonymTable::parse(&text)
                .map_err(|e| CliError::Parse { file: path.clone(), line: e.line, column: 1, message: e.message })?
        }
    };

    let (graph, files) = read_input(&config.input)?;
    let mut report = RunReport { files, triples: graph.len(), ..RunReport::default() };

    let detector = LanguageDetector::bundled();
    let gazetteer = Gazetteer::bundled();
    let slices = split_dataset_graphs(&graph);
    let mapped: Vec<Result<(DatasetRecord, CleanReport), (Iri, String)>> = slices
        .par_iter()
        .map(|(iri, slice)| {
            let (slice, clean_report) =
                if config.clean_enabled { clean(slice, &config.clean) } else { (slice.clone(), CleanReport::default()) };
            let mut record = from_graph(&slice, iri).map_err(|e| (iri.clone(), e.to_string()))?;
            if config.language_tags {
                record = refine_language_tags(&record, config.language_threshold, detector);
            }
            if config.places {
                record = annotate_places(&record, gazetteer);
            }
            record.canonicalize();
            Ok((record, clean_report))
        })
        .collect();
    let mut records = Vec::with_capacity(mapped.len());
    for m in mapped {
        match m {
            Ok((record, r)) => {
                report.clean.add(&r);
                records.push(record);
            }
            Err(skip) => report.skipped.push(skip),
        }
    }
    records.sort_by(|a, b| a.iri.cmp(&b.iri));
    report.datasets = records.len();

    let clusters: Vec<DuplicateCluster> =
        if config.dedup_enabled { find_duplicates(&records, config.dedup_threshold) } else { Vec::new() };
    report.clusters = clusters.len();

    let out = &config.output;
    let datasets_dir = out.join("datasets");
    fs::create_dir_all(&datasets_dir).map_err(CliError::io(&datasets_dir))?;
    let slices: Vec<(String, Graph)> = records
        .par_iter()
        .map(|r| (format!("{}.nt", short_hash(r.iri.as_str())), to_graph(r)))
        .collect();
    let names: BTreeSet<String> = slices.iter().map(|(n, _)| n.clone()).collect();
    remove_stale(&datasets_dir, &names)?;
    for (name, g) in &slices {
        write(&datasets_dir.join(name), write_ntriples(g))?;
    }

    if config.dedup_enabled {
        write(&out.join("links.nt"), write_ntriples(&emit_links(&clusters)))?;
        let mut csv = Vec::new();
        write_report(&clusters, &mut csv).map_err(|e| CliError::Config(format!("duplicate report: {e}")))?;
        write(&out.join("duplicates.csv"), csv)?;
    }

    let mut results: Vec<Option<Vec<MetricResult>>> = vec![None; records.len()];
    if config.quality_enabled {
        let members: Vec<Vec<Iri>> = clusters.iter().map(|c| c.members.clone()).collect();
        let cluster_store = config.dedup_enabled.then(|| ClusterStore::new(&records, &members));
        let stores = ExternalStores {
            license_db: LicenseDb::bundled(),
            provider_db: providers.as_ref(),
            community_db: community.as_ref(),
            clusters: cluster_store.as_ref(),
            url_prober: None,
        };
        let log = NotComputedLog::new();
        let computed: Vec<Vec<MetricResult>> = records
            .par_iter()
            .zip(&slices)
            .map(|(r, (_, slice))| evaluate_all(r, slice, &quality_config, &stores, &log))
            .collect();

        let quality_path = out.join("quality.nt");
        let prior = if quality_path.exists() {
            let text = fs::read_to_string(&quality_path).map_err(CliError::io(&quality_path))?;
            parse_ntriples(&text).map_err(|e| CliError::Parse {
                file: quality_path.clone(),
                line: e.line,
                column: e.column,
                message: e.message,
            })?
        } else {
            Graph::new()
        };
        let iris: BTreeSet<Iri> = records.iter().map(|r| r.iri.clone()).collect();
        let (mut per, mut dqv_graph) = partition_prior(prior, &iris);
        let parts: Vec<Graph> = records
            .par_iter()
            .zip(&computed)
            .map(|(r, res)| to_dqv(&r.iri, res, config.remove_measurements, &per.get(&r.iri).cloned().unwrap_or_default()))
            .collect();
        per.clear();
        for part in &parts {
            dqv_graph.extend_from(part);
        }
        report.measurements = computed.iter().flatten().filter(|r| r.score().is_some()).count();
        write(&quality_path, write_ntriples(&dqv_graph))?;

        let mut lines = log.lines();
        lines.sort();
        report.not_computed = lines.len();
        let mut text = lines.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        write(&out.join("not-computed.log"), text)?;
        results = computed.into_iter().map(Some).collect();
    }

    let entries: Vec<DocEntry> = records
        .iter()
        .zip(&results)
        .map(|(r, res)| DocEntry::from_record(r, res.as_deref().and_then(aggregate_score)))
        .collect();
    let index = InvertedIndex::build_with(entries, Bm25Params::default(), synonyms)
        .map_err(|e| CliError::Config(format!("index: {e}")))?;
    write(&config.index_output, index.to_bytes())?;
    Ok(report)
}

/// Distinct lowercase tokens of every indexed text field.
pub fn corpus_terms(index: &InvertedIndex) -> BTreeSet<String> {
    use metacat_core::search::{tokenize, Field};
    index
        .docs()
        .iter()
        .flat_map(|d| Field::ALL.into_iter().flat_map(move |f| tokenize(&d.field_text(f))))
        .collect()
}
