//! One function per subcommand.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context as _, Result};
use chrono::Datelike;
use legaldata_core::analytics::{
    digest_to_script, median_wordcount_by_judge, readability_trend, weekly_digest, weekly_volume, Classifier, IsoWeek,
    KeywordClassifier, Summarizer, TemplateSummarizer, TopicFilter,
};
use legaldata_core::report::{table, tsv};
use legaldata_core::{coverage_stats, validate_record, ChannelKind, CorpusSnapshot, DocumentKind, SourceDescriptor};
use legaldata_ingest::{load_registry, run_source, HttpFetcher, IngestOptions, IngestReport, IngestState, Outcome};
use legaldata_service::{router, serve_http, serve_stdio, McpServer, ServiceState};
use legaldata_store::{export_parquet, load_parquet, Store};
use serde_json::json;

use crate::{Command, Context, DigestArgs, Format, IngestArgs, JudgeArgs, Model, ReadabilityArgs, VolumeView};

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Ran, but reported failures (failed items, rejected rows, violations).
    Failed,
}

pub fn dispatch(command: &Command, ctx: &mut Context<'_>) -> Result<Status> {
    match command {
        Command::Ingest(a) => ingest(a, ctx),
        Command::ServeApi(a) => serve_api(a.reload_secs, ctx),
        Command::ServeMcp(a) => serve_mcp(a.listen.is_some(), a.reload_secs, ctx),
        Command::ExportParquet(a) => export(&a.dir, ctx),
        Command::ImportParquet(a) => import(&a.dir, ctx),
        Command::Stats => stats(ctx),
        Command::Readability(a) => readability(a, ctx),
        Command::WordcountByJudge(a) => wordcount(a, ctx),
        Command::WeeklyVolume(a) => volume(a.dataset.as_str(), &a.topic, a.view, ctx),
        Command::Digest(a) => digest(a, ctx),
        Command::Validate(_) => validate(ctx),
    }
}

fn open_read(ctx: &Context<'_>) -> Result<Store> {
    Store::open_read_only(&ctx.config.corpus).with_context(|| format!("opening corpus {}", ctx.config.corpus.display()))
}

fn snapshot(ctx: &Context<'_>) -> Result<CorpusSnapshot> {
    Ok(open_read(ctx)?.snapshot())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn topic(s: &str) -> Result<TopicFilter> {
    TopicFilter::from_str(s).map_err(anyhow::Error::msg)
}

/// Registry entries with relative repo/drop paths resolved against the
/// registry file's directory.
fn registry(path: &Path) -> Result<Vec<SourceDescriptor>> {
    let mut sources = load_registry(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    for s in &mut sources {
        for p in [&mut s.repo_path, &mut s.drop_path].into_iter().flatten() {
            if Path::new(p.as_str()).is_relative() {
                *p = base.join(p.as_str()).to_string_lossy().into_owned();
            }
        }
    }
    Ok(sources)
}

fn ingest(args: &IngestArgs, ctx: &mut Context<'_>) -> Result<Status> {
    let path = ctx
        .config
        .registry
        .clone()
        .context("no source registry: pass --registry or set `registry` in the config file")?;
    let channels: Vec<ChannelKind> =
        args.channels.iter().map(|c| ChannelKind::from_str(c).map_err(anyhow::Error::msg)).collect::<Result<_>>()?;
    let sources: Vec<SourceDescriptor> = registry(&path)?
        .into_iter()
        .filter(|s| args.sources.is_empty() || args.sources.contains(&s.dataset))
        .filter(|s| channels.is_empty() || channels.contains(&s.channel))
        .collect();
    if sources.is_empty() {
        bail!("no source in {} matches the --source/--channel filters", path.display());
    }
    let store =
        Store::open(&ctx.config.corpus).with_context(|| format!("opening corpus {}", ctx.config.corpus.display()))?;
    let state = IngestState::for_corpus(&ctx.config.corpus);
    let fetcher = HttpFetcher::new(Duration::from_secs_f64(ctx.config.fetch_timeout));
    let options = IngestOptions {
        politeness_delay: ctx.config.politeness_delay.map(Duration::from_secs_f64),
        ..Default::default()
    };

    let mut results: Vec<(&SourceDescriptor, Result<IngestReport, String>)> = Vec::new();
    for s in &sources {
        tracing::info!(dataset = %s.dataset, channel = %s.channel, "running source");
        let r = run_source(s, &fetcher, &store, &state, &options).map_err(|e| e.to_string());
        results.push((s, r));
    }
    let failed = results.iter().any(|(_, r)| r.as_ref().map_or(true, |r| r.failed > 0));

    let report = match ctx.format {
        Format::Json => {
            let list: Vec<_> = results
                .iter()
                .map(|(s, r)| match r {
                    Ok(r) => json!({ "dataset": s.dataset, "channel": s.channel, "report": r }),
                    Err(e) => json!({ "dataset": s.dataset, "channel": s.channel, "error": e }),
                })
                .collect();
            to_json(&json!({ "version": store.version(), "sources": list }))?
        }
        fmt => {
            let header = ["dataset", "channel", "fetched", "new", "updated", "duplicate", "skipped", "failed"];
            let rows: Vec<[String; 8]> = results
                .iter()
                .map(|(s, r)| match r {
                    Ok(r) => [
                        s.dataset.clone(),
                        s.channel.to_string(),
                        r.fetched.to_string(),
                        r.new.to_string(),
                        r.updated.to_string(),
                        r.duplicate.to_string(),
                        r.skipped.to_string(),
                        r.failed.to_string(),
                    ],
                    Err(_) => {
                        let mut row: [String; 8] = Default::default();
                        row[0] = s.dataset.clone();
                        row[1] = s.channel.to_string();
                        row[7] = "error".into();
                        row
                    }
                })
                .collect();
            let mut out = if fmt == Format::Tsv {
                tsv(&header, &rows)
            } else {
                table(&header, &rows, &[false, false, true, true, true, true, true, true])
            };
            for (s, r) in &results {
                match r {
                    Err(e) => out.push_str(&format!("\n{} {}: error: {e}", s.dataset, s.channel)),
                    Ok(r) => {
                        for i in r.items.iter().filter(|i| matches!(i.outcome, Outcome::Skipped | Outcome::Failed)) {
                            let note = i.note.as_deref().unwrap_or("");
                            out.push_str(&format!("\n{} {}: {} {}: {note}", s.dataset, s.channel, i.outcome, i.item));
                        }
                        for w in &r.warnings {
                            out.push_str(&format!("\n{} {}: warning: {w}", s.dataset, s.channel));
                        }
                    }
                }
            }
            if !out.ends_with('\n') {
                out.push('\n');
            }
            out
        }
    };
    ctx.emit(&report)?;
    Ok(if failed { Status::Failed } else { Status::Ok })
}

fn init_logging() {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into());
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}

/// Polls the store and swaps newer versions into `state`.
fn spawn_reloader(store: Store, state: Arc<ServiceState>, secs: u64) {
    if secs == 0 {
        return;
    }
    std::thread::spawn(move || loop {
        std::thread::sleep(Duration::from_secs(secs));
        match store.reload() {
            Ok(snapshot) if snapshot.version() != state.version() => {
                tracing::info!(version = snapshot.version(), "serving new corpus version");
                state.replace(snapshot);
            }
            Ok(_) => {}
            Err(e) => tracing::warn!("reload failed: {e}"),
        }
    });
}

fn serving_state(ctx: &Context<'_>, reload_secs: u64) -> Result<Arc<ServiceState>> {
    let store = open_read(ctx)?;
    let state = Arc::new(ServiceState::new(store.snapshot(), ctx.config.tokenizer()?));
    spawn_reloader(store, state.clone(), reload_secs);
    Ok(state)
}

fn runtime() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

fn serve_api(reload_secs: u64, ctx: &mut Context<'_>) -> Result<Status> {
    init_logging();
    let state = serving_state(ctx, reload_secs)?;
    let addr = ctx.config.api_listen;
    runtime()?.block_on(serve_http(router(state), addr)).with_context(|| format!("serving on {addr}"))?;
    Ok(Status::Ok)
}

fn serve_mcp(http: bool, reload_secs: u64, ctx: &mut Context<'_>) -> Result<Status> {
    init_logging();
    let state = serving_state(ctx, reload_secs)?;
    let server = McpServer::new(state, ctx.config.truncation_limit);
    if http {
        let addr = ctx.config.mcp_listen;
        runtime()?
            .block_on(serve_http(Arc::new(server).router(), addr))
            .with_context(|| format!("serving on {addr}"))?;
    } else {
        serve_stdio(&server, std::io::stdin().lock(), &mut *ctx.stdout)?;
    }
    Ok(Status::Ok)
}

fn export(dir: &Path, ctx: &mut Context<'_>) -> Result<Status> {
    let snapshot = snapshot(ctx)?;
    let manifest = export_parquet(&snapshot, dir, &ctx.config.tokenizer()?)?;
    let report = match ctx.format {
        Format::Json => to_json(&json!({ "version": manifest.version, "files": manifest.files }))?,
        fmt => {
            let rows: Vec<[String; 3]> =
                manifest.files.iter().map(|f| [f.path.clone(), f.kind.to_string(), f.rows.to_string()]).collect();
            let header = ["file", "kind", "rows"];
            match fmt {
                Format::Tsv => tsv(&header, &rows),
                _ => format!("corpus version {}\n{}", manifest.version, table(&header, &rows, &[false, false, true])),
            }
        }
    };
    ctx.emit(&report)?;
    Ok(Status::Ok)
}

fn import(dir: &Path, ctx: &mut Context<'_>) -> Result<Status> {
    let loaded = load_parquet(dir)?;
    let store =
        Store::open(&ctx.config.corpus).with_context(|| format!("opening corpus {}", ctx.config.corpus.display()))?;
    let records: Vec<_> = loaded.snapshot.records().cloned().collect();
    let write = store.upsert(records)?;
    let report = match ctx.format {
        Format::Json => to_json(&json!({ "write": write, "rejected": loaded.rejected }))?,
        fmt => {
            let header = ["inserted", "updated", "unchanged", "rejected", "version"];
            let row = [[
                write.inserted.to_string(),
                write.updated.to_string(),
                write.unchanged.to_string(),
                loaded.rejected.len().to_string(),
                write.version.to_string(),
            ]];
            let mut out = if fmt == Format::Tsv { tsv(&header, &row) } else { table(&header, &row, &[true; 5]) };
            for r in &loaded.rejected {
                out.push_str(&format!("rejected {} row {}: {}\n", r.file.display(), r.row, r.reasons.join("; ")));
            }
            out
        }
    };
    ctx.emit(&report)?;
    Ok(if loaded.rejected.is_empty() { Status::Ok } else { Status::Failed })
}

fn stats(ctx: &mut Context<'_>) -> Result<Status> {
    let report = coverage_stats(&snapshot(ctx)?, &ctx.config.tokenizer()?);
    let text = match ctx.format {
        Format::Table => report.to_table(),
        Format::Tsv => report.to_tsv(),
        Format::Json => to_json(&report)?,
    };
    ctx.emit(&text)?;
    Ok(Status::Ok)
}

fn readability(args: &ReadabilityArgs, ctx: &mut Context<'_>) -> Result<Status> {
    let snap = snapshot(ctx)?;
    let years: Vec<i32> = snap
        .records()
        .filter(|r| r.dataset == args.dataset && r.kind == DocumentKind::Case)
        .filter_map(|r| r.date().map(|d| d.year()))
        .collect();
    let (Some(first), Some(last)) =
        (args.from_year.or(years.iter().min().copied()), args.to_year.or(years.iter().max().copied()))
    else {
        bail!("no dated decisions in dataset {}; pass --from-year and --to-year", args.dataset);
    };
    let trend = readability_trend(&snap, &args.dataset, first, last)?;
    let text = match ctx.format {
        Format::Table => trend.to_table(),
        Format::Tsv => trend.to_tsv(),
        Format::Json => to_json(&trend)?,
    };
    ctx.emit(&text)?;
    Ok(Status::Ok)
}

fn wordcount(args: &JudgeArgs, ctx: &mut Context<'_>) -> Result<Status> {
    let snap = snapshot(ctx)?;
    let mut report = median_wordcount_by_judge(&snap, &args.dataset, topic(&args.topic)?, args.from, args.to);
    let text = match ctx.format {
        Format::Table => format!(
            "{}unattributed decisions: {}\ndecisions without English text: {}\n",
            report.to_table(args.extremes),
            report.unattributed,
            report.without_english_text
        ),
        Format::Tsv => report.to_tsv(args.extremes),
        Format::Json => {
            if let Some(n) = args.extremes {
                report.rows = report.extremes(n).into_iter().cloned().collect();
            }
            to_json(&report)?
        }
    };
    ctx.emit(&text)?;
    Ok(Status::Ok)
}

fn volume(dataset: &str, topic_name: &str, view: VolumeView, ctx: &mut Context<'_>) -> Result<Status> {
    let snap = snapshot(ctx)?;
    if !snap.records().any(|r| r.dataset == dataset) {
        bail!("no documents in dataset {dataset}");
    }
    let v = weekly_volume(&snap, dataset, topic(topic_name)?);
    let text = match (ctx.format, view) {
        (Format::Json, _) => to_json(&v)?,
        (Format::Tsv, VolumeView::Weeks) => v.weeks_tsv(),
        (Format::Tsv, VolumeView::Years) => v.years_tsv(),
        (Format::Table, view) => {
            let weeks: Vec<[String; 4]> = v
                .weeks
                .iter()
                .map(|p| {
                    [p.week.to_string(), p.week.monday().to_string(), p.words.to_string(), p.decisions.to_string()]
                })
                .collect();
            let years: Vec<[String; 3]> = v
                .years
                .iter()
                .map(|y| [y.year.to_string(), format!("{:.1}", y.median_weekly_words), y.weeks.to_string()])
                .collect();
            let weeks_table = table(&["Week", "Monday", "Words", "Decisions"], &weeks, &[false, false, true, true]);
            let years_table = table(&["Year", "Median Weekly Words", "Weeks"], &years, &[false, true, true]);
            match view {
                VolumeView::Weeks => format!("{weeks_table}\n{years_table}"),
                VolumeView::Years => years_table,
            }
        }
    };
    ctx.emit(&text)?;
    Ok(Status::Ok)
}

fn script_path(args: &DigestArgs, out: Option<&Path>) -> Option<PathBuf> {
    args.script_out.clone().or_else(|| {
        out.map(|o| {
            let stem = o.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "digest".into());
            o.with_file_name(format!("{stem}.script.txt"))
        })
    })
}

fn digest(args: &DigestArgs, ctx: &mut Context<'_>) -> Result<Status> {
    let snap = snapshot(ctx)?;
    let week = IsoWeek::from_str(&args.week)?;
    let topic = topic(&args.topic)?;
    let (memo, script) = match args.model {
        Model::Builtin => {
            let (c, s): (&dyn Classifier, &dyn Summarizer) = (&KeywordClassifier::default(), &TemplateSummarizer);
            let memo = weekly_digest(&snap, &args.dataset, week, topic, c, s)?;
            let script = args.script.then(|| digest_to_script(&memo));
            (memo, script)
        }
        Model::Remote => remote_digest(&snap, args, week, topic)?,
    };
    let memo_text = match ctx.format {
        Format::Json => to_json(&json!({ "memo": memo, "script": script }))?,
        _ => memo.render(),
    };
    match (script, ctx.format) {
        (Some(script), Format::Table | Format::Tsv) => match script_path(args, ctx.out.as_deref()) {
            Some(path) => {
                ctx.emit(&memo_text)?;
                std::fs::write(&path, script).with_context(|| format!("writing {}", path.display()))?;
            }
            None => ctx.emit(&format!("{memo_text}\n{script}"))?,
        },
        _ => ctx.emit(&memo_text)?,
    }
    Ok(Status::Ok)
}

#[cfg(feature = "remote-model")]
fn remote_digest(
    snap: &CorpusSnapshot,
    args: &DigestArgs,
    week: IsoWeek,
    topic: TopicFilter,
) -> Result<(legaldata_core::analytics::DigestMemo, Option<String>)> {
    use legaldata_core::analytics::remote::{ChatClient, ModelClassifier, ModelSummarizer};
    let client = ChatClient::from_env()?;
    let summarizer = ModelSummarizer::new(client.clone());
    let memo = weekly_digest(snap, &args.dataset, week, topic, &ModelClassifier::new(client), &summarizer)?;
    let script = if args.script { Some(summarizer.script(&memo)?) } else { None };
    Ok((memo, script))
}

#[cfg(not(feature = "remote-model"))]
fn remote_digest(
    _: &CorpusSnapshot,
    _: &DigestArgs,
    _: IsoWeek,
    _: TopicFilter,
) -> Result<(legaldata_core::analytics::DigestMemo, Option<String>)> {
    bail!("--model remote needs a build with the `remote-model` feature")
}

fn validate(ctx: &mut Context<'_>) -> Result<Status> {
    let snap = snapshot(ctx)?;
    let mut problems: Vec<[String; 2]> = Vec::new();
    for r in snap.records() {
        for v in validate_record(r) {
            problems.push([r.key().to_string(), v.to_string()]);
        }
    }
    if let Some(path) = ctx.config.registry.clone() {
        if let Err(e) = registry(&path) {
            problems.push([path.display().to_string(), e.to_string()]);
        }
    }
    let text = match ctx.format {
        Format::Json => to_json(&json!({
            "records": snap.len(),
            "problems": problems.iter().map(|[w, p]| json!({ "where": w, "problem": p })).collect::<Vec<_>>(),
        }))?,
        Format::Tsv => tsv(&["where", "problem"], &problems),
        Format::Table if problems.is_empty() => format!("{} records checked, no problems\n", snap.len()),
        Format::Table => table(&["Where", "Problem"], &problems, &[false, false]),
    };
    ctx.emit(&text)?;
    Ok(if problems.is_empty() { Status::Ok } else { Status::Failed })
}
