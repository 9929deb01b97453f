use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};

use metacat_cli::pipeline::{corpus_terms, read_input, read_records};
use metacat_cli::{bench, run_pipeline, CliError, PipelineConfig};
use metacat_client::Client;
use metacat_core::api::parse_search_params;
use metacat_core::dedup::{emit_links, find_duplicates, write_report};
use metacat_core::license::LicenseDb;
use metacat_core::quality::{evaluate_all, to_dqv, ExternalStores, NotComputedLog, QualityConfig};
use metacat_core::model::to_graph;
use metacat_core::rdf::{write_ntriples, Graph, Iri};
use metacat_core::search::{extract_synonyms, InvertedIndex};
use metacat_service::{router, AppState, Snapshot};

#[derive(Parser)]
#[command(name = "metacat", version, about = "Clean, enrich, score, deduplicate and index DCAT catalogs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full batch pipeline described by a properties file.
    Run {
        #[arg(long, short)]
        config: PathBuf,
        /// Overrides `io.output`.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        at: At,
    },
    /// Serve the HTTP API over a pipeline output directory.
    Serve(ServeArgs),
    /// Find duplicate datasets by distribution URL similarity; writes a CSV report.
    Dedup {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = metacat_cli::config::DEFAULT_DEDUP_THRESHOLD)]
        threshold: f64,
        /// Also write owl:sameAs links as N-Triples.
        #[arg(long)]
        links: Option<PathBuf>,
    },
    /// Score datasets with the quality metrics; writes DQV N-Triples.
    Quality {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Where to write the not-computed log.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        include_long_running: bool,
        #[command(flatten)]
        at: At,
    },
    #[command(subcommand)]
    Synonyms(SynonymsCommand),
    /// Compare index and linear-scan latency on a synthetic corpus.
    Bench {
        #[arg(long, default_value_t = 50_000)]
        docs: usize,
        #[arg(long, default_value_t = 200)]
        queries: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Query a running server.
    Search(SearchArgs),
    /// Fetch one dataset and its quality scores from a running server.
    Dataset {
        #[arg(long, default_value = "http://127.0.0.1:8080/")]
        server: String,
        iri: String,
    },
    /// Check license compatibility on a running server.
    Licenses {
        #[arg(long, default_value = "http://127.0.0.1:8080/")]
        server: String,
        #[arg(required = true)]
        licenses: Vec<String>,
    },
}

#[derive(Subcommand)]
enum SynonymsCommand {
    /// Build a synonym table from a lexicon restricted to an index's vocabulary.
    Extract {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct At {
    /// Evaluation time (RFC 3339); defaults to now.
    #[arg(long)]
    at: Option<String>,
}

impl At {
    fn resolve(&self) -> anyhow::Result<DateTime<Utc>> {
        match &self.at {
            None => Ok(Utc::now()),
            Some(text) => Ok(DateTime::parse_from_rfc3339(text)
                .map_err(|e| CliError::Config(format!("--at `{text}`: {e}")))?
                .with_timezone(&Utc)),
        }
    }
}

#[derive(Args)]
struct ServeArgs {
    /// Takes the output directory, index path, port and CORS origin from here.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Pipeline output directory; overrides the config.
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long)]
    index: Option<PathBuf>,
    #[arg(long)]
    port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    #[arg(long)]
    cors_origin: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value = "http://127.0.0.1:8080/")]
    server: String,
    /// Free-text query.
    #[arg(default_value = "")]
    text: String,
    /// Facet filter `field=value`, repeatable (category, publisher, catalog, license).
    #[arg(long = "facet")]
    facets: Vec<String>,
    /// Require all values of a facet field instead of any.
    #[arg(long = "all")]
    all: Vec<String>,
    /// `swLat,swLon,neLat,neLon`.
    #[arg(long)]
    bbox: Option<String>,
    /// Sort by distance from `lat,lon`.
    #[arg(long)]
    near: Option<String>,
    #[arg(long)]
    synonyms: bool,
    #[arg(long, default_value_t = 1)]
    page: usize,
    #[arg(long, default_value_t = 10)]
    size: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run { config, output, at } => run(&config, output.as_deref(), at.resolve()?),
        Command::Serve(args) => serve(args),
        Command::Dedup { input, threshold, links } => dedup(&input, threshold, links.as_deref()),
        Command::Quality { input, output, log, include_long_running, at } => {
            quality(&input, output.as_deref(), log.as_deref(), include_long_running, at.resolve()?)
        }
        Command::Synonyms(SynonymsCommand::Extract { lexicon, index, output }) => {
            synonyms(&lexicon, &index, output.as_deref())
        }
        Command::Bench { docs, queries, seed } => {
            if docs == 0 || queries == 0 {
                bail!(CliError::Config("--docs and --queries must be positive".into()));
            }
            let report = bench::run_bench(docs, queries, seed);
            print_json(&report)?;
            Ok(())
        }
        Command::Search(args) => search(args),
        Command::Dataset { server, iri } => dataset(&server, &iri),
        Command::Licenses { server, licenses } => check_licenses(&server, &licenses),
    }
}

fn run(config_path: &Path, output: Option<&Path>, at: DateTime<Utc>) -> anyhow::Result<()> {
    let mut config = PipelineConfig::load(config_path)?;
    for key in &config.unknown_keys {
        eprintln!("warning: unknown configuration key `{key}`");
    }
    if let Some(dir) = output {
        config.redirect_output(dir);
    }
    let report = run_pipeline(&config, at)?;
    for (iri, reason) in &report.skipped {
        eprintln!("warning: skipped <{iri}>: {reason}");
    }
    println!(
        "{} files, {} triples, {} datasets, {} skipped, {} duplicate clusters, {} measurements, {} not computed",
        report.files,
        report.triples,
        report.datasets,
        report.skipped.len(),
        report.clusters,
        report.measurements,
        report.not_computed
    );
    println!("output written to {}", config.output.display());
    Ok(())
}

fn runtime() -> anyhow::Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let config = args.config.as_deref().map(PipelineConfig::load).transpose()?;
    let dir = match (&args.dir, &config) {
        (Some(dir), _) => dir.clone(),
        (None, Some(c)) => c.output.clone(),
        (None, None) => bail!(CliError::Config("serve needs --config or --dir".into())),
    };
    let index = args.index.clone().or_else(|| config.as_ref().map(|c| c.index_output.clone()));
    let index_path = index.clone().unwrap_or_else(|| dir.join("index.bin"));
    if !index_path.exists() {
        bail!(CliError::MissingInput(index_path));
    }
    let port = args.port.or(config.as_ref().map(|c| c.port)).unwrap_or(metacat_cli::config::DEFAULT_PORT);
    let cors = args.cors_origin.clone().or_else(|| config.as_ref().and_then(|c| c.cors_origin.clone()));

    let snapshot = Snapshot::load(&dir, index.as_deref()).with_context(|| format!("loading {}", dir.display()))?;
    let datasets = snapshot.index.len();
    let app = router(AppState::new(snapshot), cors.as_deref()).map_err(|e| CliError::Config(e.to_string()))?;
    runtime()?.block_on(async move {
        let addr = SocketAddr::new(args.host, port);
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        eprintln!("serving {datasets} datasets on http://{}/", listener.local_addr()?);
        metacat_service::serve(listener, app, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        Ok(())
    })
}

fn dedup(input: &Path, threshold: f64, links: Option<&Path>) -> anyhow::Result<()> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        bail!(CliError::Config(format!("threshold {threshold} must lie in (0, 1]")));
    }
    let (records, skipped) = read_records(input)?;
    for (iri, reason) in &skipped {
        eprintln!("warning: skipped <{iri}>: {reason}");
    }
    let clusters = find_duplicates(&records, threshold);
    write_report(&clusters, std::io::stdout().lock())?;
    if let Some(path) = links {
        fs::write(path, write_ntriples(&emit_links(&clusters))).with_context(|| path.display().to_string())?;
    }
    eprintln!("{} datasets, {} clusters", records.len(), clusters.len());
    Ok(())
}

fn quality(
    input: &Path,
    output: Option<&Path>,
    log_path: Option<&Path>,
    include_long_running: bool,
    at: DateTime<Utc>,
) -> anyhow::Result<()> {
    let config = QualityConfig { include_long_running, ..QualityConfig::at(at) };
    let (records, skipped) = read_records(input)?;
    for (iri, reason) in &skipped {
        eprintln!("warning: skipped <{iri}>: {reason}");
    }
    let stores = ExternalStores::new(LicenseDb::bundled());
    let log = NotComputedLog::new();
    let mut graph = Graph::new();
    for record in &records {
        let results = evaluate_all(record, &to_graph(record), &config, &stores, &log);
        graph.extend_from(&to_dqv(&record.iri, &results, true, &Graph::new()));
    }
    let text = write_ntriples(&graph);
    match output {
        Some(path) => fs::write(path, text).with_context(|| path.display().to_string())?,
        None => print_text(&text)?,
    }
    if let Some(path) = log_path {
        let mut lines = log.lines();
        lines.sort();
        let body: String = lines.iter().map(|l| format!("{l}\n")).collect();
        fs::write(path, body).with_context(|| path.display().to_string())?;
    }
    Ok(())
}

fn synonyms(lexicon: &Path, index_path: &Path, output: Option<&Path>) -> anyhow::Result<()> {
    let (graph, _) = read_input(lexicon)?;
    if !index_path.exists() {
        bail!(CliError::MissingInput(index_path.to_owned()));
    }
    let bytes = fs::read(index_path).with_context(|| index_path.display().to_string())?;
    let index = InvertedIndex::from_bytes(&bytes).with_context(|| index_path.display().to_string())?;
    let table = extract_synonyms(&graph, &corpus_terms(&index));
    match output {
        Some(path) => fs::write(path, table.to_tsv()).with_context(|| path.display().to_string())?,
        None => print_text(&table.to_tsv())?,
    }
    eprintln!("{} headwords", table.len());
    Ok(())
}

fn search(args: SearchArgs) -> anyhow::Result<()> {
    let mut params: Vec<(String, String)> = vec![
        ("q".into(), args.text),
        ("page".into(), args.page.to_string()),
        ("size".into(), args.size.to_string()),
        ("synonyms".into(), args.synonyms.to_string()),
    ];
    for facet in &args.facets {
        let Some((field, value)) = facet.split_once('=') else {
            bail!(CliError::Config(format!("--facet `{facet}` is not field=value")));
        };
        params.push((field.trim().to_owned(), value.to_owned()));
    }
    for field in &args.all {
        params.push((format!("facet_mode.{field}"), "and".into()));
    }
    if let Some(bbox) = args.bbox {
        params.push(("bbox".into(), bbox));
    }
    if let Some(near) = &args.near {
        let Some((lat, lon)) = near.split_once(',') else {
            bail!(CliError::Config(format!("--near `{near}` is not lat,lon")));
        };
        params.extend([("sort".into(), "distance".into()), ("lat".into(), lat.trim().into()), ("lon".into(), lon.trim().into())]);
    }
    // unknown facet fields are ignored by the server, so reject them here
    for (key, _) in &params[4..] {
        if !matches!(key.as_str(), "bbox" | "sort" | "lat" | "lon") && !key.starts_with("facet_mode.") {
            key.parse::<metacat_core::search::FacetField>().map_err(|e| CliError::Config(e.to_string()))?;
        }
    }
    let query = parse_search_params(&params).map_err(|e| CliError::Config(e.message))?;
    let client = Client::new(&args.server)?;
    let response = runtime()?.block_on(client.search(&query))?;
    print_json(&response)?;
    Ok(())
}

fn dataset(server: &str, iri: &str) -> anyhow::Result<()> {
    let iri = Iri::new(iri).map_err(|e| CliError::Config(e.to_string()))?;
    let client = Client::new(server)?;
    let (dataset, quality) = runtime()?.block_on(async { tokio::try_join!(client.dataset(&iri), client.quality(&iri)) })?;
    print_json(&serde_json::json!({ "dataset": dataset, "quality": quality }))?;
    Ok(())
}

fn check_licenses(server: &str, licenses: &[String]) -> anyhow::Result<()> {
    let iris = licenses
        .iter()
        .map(|l| Iri::new(l.as_str()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let client = Client::new(server)?;
    let verdict = runtime()?.block_on(client.check_licenses(&iris))?;
    print_json(&verdict)?;
    Ok(())
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_text(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    print_text(&format!("{}\n", serde_json::to_string_pretty(value)?))
}
