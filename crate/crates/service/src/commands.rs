use crate::api;
use crate::artifacts::{self, ArtifactError};
use crate::cli::*;
use crate::engine::Engine;
use anyhow::{bail, Context};
use aspectsim_core::calibrate::{sweep, threshold_grid, SweepTable};
use aspectsim_core::corpus::{build_citation_graph, load_corpus, CorpusFormat, IngestConfig};
use aspectsim_core::embedding::{AspectId, Projection, TextMode, TopologyParams, TrainingMode};
use aspectsim_core::patterns::TrackQuery;
use aspectsim_core::pipeline::{embed_all, BuildOptions};
use aspectsim_core::report::{citation_report, topic_report, CitationReport, TopicReport};
use aspectsim_core::simstore::{build_store, exact_mode_override, Thresholds};
use aspectsim_core::synthetic::{generate, SyntheticSpec};
use serde::Deserialize;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use tracing::info;

/// Optional settings file; command-line flags win over it.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub ingest: Option<IngestConfig>,
    pub topology: Option<TopologyParams>,
    pub thresholds: Option<Thresholds>,
}

pub fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => ingest(&a, &config),
        Command::Embed(a) => embed(&a, &config),
        Command::Classify(a) => classify(&a, &config),
        Command::Calibrate(a) => calibrate(&a),
        Command::Report { which } => report(&which),
        Command::Serve(a) => serve(&a),
        Command::Synth(a) => synth(&a),
    }
}

fn ingest(a: &IngestArgs, config: &Config) -> anyhow::Result<()> {
    let format = match a.format {
        Some(f) => f.into(),
        None => CorpusFormat::from_path(&a.input).with_context(|| {
            format!(
                "cannot tell the format of {}; pass --format",
                a.input.display()
            )
        })?,
    };
    let ingest = config.ingest.clone().unwrap_or_else(|| match a.preset {
        Preset::Default => IngestConfig::default(),
        Preset::Vispubdata => IngestConfig::vispubdata(),
    });
    let loaded = load_corpus(&a.input, format, &ingest)?;
    let r = &loaded.report;
    info!(
        rows = r.rows_read,
        loaded = r.articles_loaded,
        rejected = r.rejected.len(),
        dropped_references = r.dropped_references,
        "ingested"
    );
    artifacts::save_corpus(&a.dir.out, &loaded.corpus)?;
    artifacts::write_json(&artifacts::ingest_report_path(&a.dir.out), r)?;
    println!(
        "{} articles, checksum {}",
        loaded.corpus.len(),
        loaded.corpus.checksum()
    );
    Ok(())
}

fn embed(a: &EmbedArgs, config: &Config) -> anyhow::Result<()> {
    let dir = &a.dir.out;
    let corpus = artifacts::load_corpus(dir)?;
    let checksum = corpus.checksum();
    let mut topology = config.topology.clone().unwrap_or_default();
    if let Some(seed) = a.seed {
        topology.rng_seed = seed;
    }
    topology.mode = if a.deterministic {
        TrainingMode::Deterministic
    } else {
        TrainingMode::Parallel { threads: a.threads }
    };
    let text = match (&a.text_vectors, a.projection_dim) {
        (Some(_), Some(_)) => bail!("--text-vectors and --projection-dim exclude each other"),
        (Some(p), None) => TextMode::Imported(p.clone()),
        (None, dim) => TextMode::Builtin {
            projection: dim.map(|dim| Projection {
                dim,
                seed: a.seed.unwrap_or(Projection::default().seed),
            }),
        },
    };
    let opts = BuildOptions {
        topology,
        text,
        ..Default::default()
    };
    let graph = build_citation_graph(&corpus);
    let started = std::time::Instant::now();
    let (vectors, fit) = embed_all(&corpus, &graph, &opts)?;
    info!(elapsed = ?started.elapsed(), "embedded");
    for v in &vectors {
        artifacts::save_vectors(dir, v, &checksum)?;
    }
    artifacts::save_text_fit(dir, fit.as_ref(), &checksum)?;
    println!("embedded {} articles x 4 aspects", corpus.len());
    Ok(())
}

fn read_thresholds(path: Option<&Path>, config: &Config) -> anyhow::Result<Thresholds> {
    let th = match path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => config.thresholds.unwrap_or_default(),
    };
    th.validate()?;
    Ok(th)
}

fn classify(a: &ClassifyArgs, config: &Config) -> anyhow::Result<()> {
    let dir = &a.dir.out;
    let corpus = artifacts::load_corpus(dir)?;
    let checksum = corpus.checksum();
    let th = read_thresholds(a.thresholds.as_deref(), config)?;
    let vectors = AspectId::ALL
        .into_iter()
        .map(|aspect| artifacts::load_vectors(dir, aspect, &checksum))
        .collect::<Result<Vec<_>, ArtifactError>>()?;
    let started = std::time::Instant::now();
    let mut stores = vectors
        .iter()
        .map(|v| build_store(v, th.get(v.aspect)))
        .collect::<Result<Vec<_>, _>>()?;
    if a.exact_mode {
        let exact = exact_mode_override(&build_citation_graph(&corpus), &corpus, &th);
        stores[AspectId::Topology.index()] = exact.topology;
        stores[AspectId::Authors.index()] = exact.authors;
    }
    info!(elapsed = ?started.elapsed(), "classified");
    for s in &stores {
        artifacts::save_store(dir, s, &checksum)?;
        let c = s.counts();
        println!(
            "{:<9} {:>10} similar {:>10} uncertain {:>12} dissimilar",
            s.aspect(),
            c.similar,
            c.uncertain,
            c.dissimilar
        );
    }
    Ok(())
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(str::parse)
        .collect::<Result<_, _>>()
        .context("grid must be from:to:step")?;
    let [from, to, step] = parts[..] else {
        bail!("grid must be from:to:step")
    };
    if !(step > 0.0 && from <= to) {
        bail!("grid needs from <= to and a positive step");
    }
    Ok(threshold_grid(from, to, step))
}

fn output(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(bytes).context("writing stdout"),
    }
}

fn calibrate(a: &CalibrateArgs) -> anyhow::Result<()> {
    let dir = &a.dir.out;
    let corpus = artifacts::load_corpus(dir)?;
    let checksum = corpus.checksum();
    let grid = parse_grid(&a.grid)?;
    let exact = exact_mode_override(
        &build_citation_graph(&corpus),
        &corpus,
        &Thresholds::default(),
    );
    let tables = vec![
        sweep(
            &artifacts::load_vectors(dir, AspectId::Topology, &checksum)?,
            &exact.topology,
            &grid,
        )?,
        sweep(
            &artifacts::load_vectors(dir, AspectId::Authors, &checksum)?,
            &exact.authors,
            &grid,
        )?,
    ];
    let bytes = match a.format {
        OutputFormat::Json => serde_json::to_vec_pretty(&tables)?,
        OutputFormat::Csv => sweep_csv(&tables)?,
    };
    output(a.report.as_deref(), &bytes)
}

fn sweep_csv(tables: &[SweepTable]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "aspect",
        "threshold",
        "tp",
        "fp",
        "fn",
        "precision",
        "recall",
        "f1",
    ])?;
    for t in tables {
        for r in &t.rows {
            w.write_record([
                t.aspect.to_string(),
                r.threshold.to_string(),
                r.true_positives.to_string(),
                r.false_positives.to_string(),
                r.false_negatives.to_string(),
                format!("{:.6}", r.precision),
                format!("{:.6}", r.recall),
                format!("{:.6}", r.f1),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}

fn report(which: &ReportKind) -> anyhow::Result<()> {
    match which {
        ReportKind::UseCase1(a) => {
            let e = Engine::load(&a.dir.out, a.exact_mode)?;
            let r = citation_report(&e.corpus, &e.graph, &e.model)?;
            let bytes = match a.format {
                OutputFormat::Json => serde_json::to_vec_pretty(&r)?,
                OutputFormat::Csv => citation_csv(&r)?,
            };
            output(a.report.as_deref(), &bytes)
        }
        ReportKind::UseCase2 {
            common: a,
            keyword,
            author,
        } => {
            let e = Engine::load(&a.dir.out, a.exact_mode)?;
            let q = TrackQuery {
                keyword: Some(keyword.clone()),
                author: author.clone(),
            };
            let r = topic_report(&q, None, &e.corpus, &e.model)?;
            let bytes = match a.format {
                OutputFormat::Json => serde_json::to_vec_pretty(&r)?,
                OutputFormat::Csv => topic_csv(&r)?,
            };
            output(a.report.as_deref(), &bytes)
        }
    }
}

/// One table: coverage rows first, then one row per missing citation.
pub fn citation_csv(r: &CitationReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "kind",
        "a",
        "b",
        "pair_count",
        "covered_articles",
        "covered_fraction",
        "text_score",
        "author_score",
        "author_class",
    ])?;
    for (kind, s) in [
        ("intra_set_citation", &r.intra_set_citation),
        ("self_citation", &r.self_citation),
        ("direct_citation", &r.direct_citation),
        ("direct_self_citation", &r.direct_self_citation),
    ] {
        w.write_record([
            kind,
            "",
            "",
            &s.pair_count.to_string(),
            &s.covered_articles.to_string(),
            &format!("{:.6}", s.covered_fraction),
            "",
            "",
            "",
        ])?;
    }
    for m in &r.missing_citations {
        let class = serde_json::to_value(m.author_class)?;
        w.write_record([
            "missing_citation",
            m.a.as_str(),
            m.b.as_str(),
            "",
            "",
            "",
            &format!("{:.6}", m.text_score),
            &format!("{:.6}", m.author_score),
            class.as_str().unwrap_or_default(),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn topic_csv(r: &TopicReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "cluster",
        "size",
        "tracked",
        "tracked_fraction",
        "avg_score",
        "members",
    ])?;
    for (k, c) in r.clusters.iter().enumerate() {
        let members: Vec<&str> = c.members.iter().map(|m| m.as_str()).collect();
        w.write_record([
            &k.to_string(),
            &c.size.to_string(),
            &c.tracked.to_string(),
            &format!("{:.6}", c.tracked_fraction),
            &format!("{:.6}", c.avg_score),
            &members.join(" "),
        ])?;
    }
    Ok(w.into_inner()?)
}

fn serve(a: &ServeArgs) -> anyhow::Result<()> {
    if let Some(w) = &a.watch_dir {
        if !w.is_dir() {
            bail!("watch directory {} does not exist", w.display());
        }
    }
    let engine = Engine::load(&a.dir.out, a.exact_mode)?.with_watch_dir(a.watch_dir.clone());
    let app = api::router(Arc::new(engine));
    let addr = format!("{}:{}", a.bind, a.port);
    tokio::runtime::Runtime::new()?.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        info!(%addr, "serving");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .context("server error")
    })
}

fn synth(a: &SynthArgs) -> anyhow::Result<()> {
    let s = generate(&SyntheticSpec {
        articles: a.articles,
        seed: a.seed,
        ..Default::default()
    });
    artifacts::write_json(&a.out, &s.corpus.articles())?;
    println!(
        "{} articles, {} planted duplicate pairs",
        s.corpus.len(),
        s.planted.len()
    );
    Ok(())
}
