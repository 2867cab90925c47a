use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;
use toroshrink::drf::{compose, lower_milnor_drf, nm_derivations, nm_drf, DiscFn, DrfError};
use toroshrink::linkio::{Builtin, LinkData, LinkError, NmLinkSpec, PdCode, PdError, WirtingerPresentation};
use toroshrink::milnor::{MilnorContext, MilnorError, MilnorRecord, MultiIndex};
use toroshrink::shrink::{decide, Horizons, LinkSequence, Outcome, ShrinkError};

mod report;

/// Exit code for errors; 0, 1 and 2 are shrink verdicts.
const EXIT_ERROR: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Pd { path: PathBuf, source: PdError },
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Milnor(#[from] MilnorError),
    #[error(transparent)]
    Drf(#[from] DrfError),
    #[error(transparent)]
    Shrink(#[from] ShrinkError),
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("unknown check `{0}`; run `toroshrink report --list` for the ids")]
    UnknownCheck(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser)]
#[command(name = "toroshrink", version, about = "Milnor invariants, disc replicating functions and shrinkability verdicts")]
#[command(after_help = "Exit codes: 0 shrinks (or success), 1 does not shrink (or a failed check), 2 unknown, 3 error.")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Byte-stable output: timings are left out.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a link diagram.
    #[command(subcommand)]
    Link(LinkCommand),
    /// Milnor invariants of a link.
    Milnor(MilnorArgs),
    /// Disc replicating functions of (n,m)-links.
    #[command(subcommand)]
    Drf(DrfCommand),
    /// Decide whether the decomposition defined by a link sequence shrinks.
    Shrink(ShrinkArgs),
    /// Re-run the reproduction checks and print a pass/fail table.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum LinkCommand {
    /// Components, crossings, Wirtinger relators and linking matrix.
    Info(LinkSource),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct LinkSource {
    /// File holding a PD code such as `X[1,3,2,4] X[3,1,4,2]`.
    #[arg(long)]
    pd: Option<PathBuf>,
    /// hopf, whitehead, borromean (alias bing), unlink(k) or nm(n,m).
    #[arg(long)]
    builtin: Option<Builtin>,
}

impl LinkSource {
    fn describe(&self) -> String {
        match (&self.pd, &self.builtin) {
            (Some(p), _) => format!("pd {}", p.display()),
            (_, Some(b)) => format!("builtin {b}"),
            _ => unreachable!("clap requires one source"),
        }
    }

    fn load(&self) -> Result<PdCode, CliError> {
        if let Some(path) = &self.pd {
            let text = read(path)?;
            return PdCode::parse(&text).map_err(|source| CliError::Pd { path: path.clone(), source });
        }
        match self.builtin.expect("clap requires one source").link()? {
            LinkData::Diagram(pd) => Ok(pd),
            LinkData::Presentation(_) => Err(CliError::Usage("builtin has no diagram".into())),
        }
    }
}

#[derive(Args)]
struct MilnorArgs {
    #[command(flatten)]
    source: LinkSource,
    /// Multi-index such as `0,0,1,1`; repeat for several. Without one, every
    /// index up to `--max-len` is listed.
    #[arg(long)]
    index: Vec<MultiIndex>,
    /// Longest multi-index listed when no `--index` is given.
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    /// Lower central series class to work modulo; at least the index length.
    #[arg(long)]
    class: Option<usize>,
    /// Number components from 1 in `--index` and in the output.
    #[arg(long)]
    one_based: bool,
}

#[derive(Subcommand)]
enum DrfCommand {
    /// D(k) for one link.
    Eval {
        /// nm(n,m), whitehead or bing.
        #[arg(long)]
        link: NmLinkSpec,
        #[arg(long)]
        k: BigUint,
        /// Use the lower bound built from Milnor invariants instead of the exact formula.
        #[arg(long)]
        lower: bool,
    },
    /// k, D_1(k), D_2(D_1(k)), ... along a list of links.
    Orbit {
        /// Repeat once per link, in order.
        #[arg(long, required = true)]
        link: Vec<NmLinkSpec>,
        #[arg(long)]
        k: BigUint,
        /// Repeat the list this many times.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[arg(long)]
        lower: bool,
    },
}

#[derive(Args)]
struct ShrinkArgs {
    /// JSON link sequence, optionally wrapped as {"sequence": ..., "horizons": ...}.
    #[arg(long)]
    config: PathBuf,
    /// Orbit horizons `k_max=..,m_max=..,p_max=..`; overrides the config file.
    #[arg(long, env = Horizons::ENV)]
    horizon: Option<Horizons>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run only this check; repeat for several.
    #[arg(long)]
    only: Vec<String>,
    /// List the check ids and exit.
    #[arg(long)]
    list: bool,
}

/// Envelope for JSON output.
#[derive(Serialize)]
struct RunReport {
    tool: &'static str,
    version: &'static str,
    input: Value,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

struct Output {
    input: Value,
    results: Value,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let start = Instant::now();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let text = match cli.format {
        Format::Text => out.text,
        Format::Json => {
            let report = RunReport {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                input: out.input,
                results: out.results,
                elapsed_ms: (!cli.deterministic).then(|| start.elapsed().as_secs_f64() * 1e3),
            };
            serde_json::to_string_pretty(&report).expect("serializable") + "\n"
        }
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(EXIT_ERROR);
    }
    ExitCode::from(out.code)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Link(LinkCommand::Info(source)) => link_info(source),
        Command::Milnor(args) => milnor(args),
        Command::Drf(cmd) => drf(cmd),
        Command::Shrink(args) => shrink(args),
        Command::Report(args) => run_report(args, !cli.deterministic),
    }
}

fn link_info(source: &LinkSource) -> Result<Output, CliError> {
    let pd = source.load()?;
    let relators = WirtingerPresentation::from_pd(&pd).relators.len();
    let lk = pd.linking_matrix();
    let mut text = format!(
        "components: {}\ncrossings: {}\nwirtinger relators: {}\nlinking matrix:\n",
        pd.component_count(),
        pd.crossing_count(),
        relators
    );
    for row in &lk {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
        text.push_str(&cells.join(" "));
        text.push('\n');
    }
    Ok(Output {
        input: json!({"command": "link info", "link": source.describe()}),
        results: json!({
            "components": pd.component_count(),
            "crossings": pd.crossing_count(),
            "relators": relators,
            "linking_matrix": lk,
        }),
        text,
        code: 0,
    })
}

fn milnor(args: &MilnorArgs) -> Result<Output, CliError> {
    let link = LinkData::Diagram(args.source.load()?);
    let n = link.component_count();
    let shift = usize::from(args.one_based);
    let indices = args
        .index
        .iter()
        .map(|idx| {
            let entries = idx
                .entries()
                .iter()
                .map(|&e| e.checked_sub(shift).ok_or_else(|| CliError::Usage("components are numbered from 1".into())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MultiIndex::new(entries, n)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let longest = indices.iter().map(MultiIndex::len).max().unwrap_or(args.max_len);
    let class = args.class.unwrap_or(longest).max(longest);
    let ctx = MilnorContext::new(&link, class)?;
    let records: Vec<MilnorRecord> = if indices.is_empty() {
        ctx.all_upto_length(args.max_len)?
    } else {
        indices.iter().map(|i| ctx.mubar(i)).collect::<Result<_, _>>()?
    };
    let show = |idx: &MultiIndex| {
        idx.entries().iter().map(|e| (e + shift).to_string()).collect::<Vec<_>>().join(",")
    };
    let mut text = format!("{:<12} {:>8} {:>8} {:>8}\n", "index", "mu", "delta", "mu-bar");
    for r in &records {
        text.push_str(&format!("{:<12} {:>8} {:>8} {:>8}\n", show(&r.index), r.mu, r.delta, r.signed));
    }
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            json!({
                "index": show(&r.index),
                "mu": r.mu.to_string(),
                "delta": r.delta.to_string(),
                "mubar": r.mubar.to_string(),
                "signed": r.signed.to_string(),
            })
        })
        .collect();
    Ok(Output {
        input: json!({"command": "milnor", "link": args.source.describe(), "class": class, "one_based": args.one_based}),
        results: json!({"components": n, "records": rows}),
        text,
        code: 0,
    })
}

fn disc_fn(link: NmLinkSpec, lower: bool) -> Result<DiscFn, CliError> {
    Ok(if lower { lower_milnor_drf(&nm_derivations(link))? } else { nm_drf(link) })
}

fn drf(cmd: &DrfCommand) -> Result<Output, CliError> {
    match cmd {
        DrfCommand::Eval { link, k, lower } => {
            let v = disc_fn(*link, *lower)?.evaluate(k)?;
            Ok(Output {
                input: json!({"command": "drf eval", "link": link.to_string(), "k": k.to_string(), "lower": lower}),
                results: json!({"value": v.to_string()}),
                text: format!("D_{link}({k}) = {v}\n"),
                code: 0,
            })
        }
        DrfCommand::Orbit { link, k, repeat, lower } => {
            let fs = link.iter().map(|&l| disc_fn(l, *lower)).collect::<Result<Vec<_>, _>>()?;
            let fs: Vec<DiscFn> = fs.iter().cycle().take(fs.len() * repeat).cloned().collect();
            let orbit = compose(&fs, k)?;
            let values: Vec<String> = orbit.values.iter().map(ToString::to_string).collect();
            let direction = orbit.direction.map(|d| serde_json::to_value(d).expect("unit variant"));
            let links: Vec<String> = link.iter().map(ToString::to_string).collect();
            Ok(Output {
                input: json!({"command": "drf orbit", "links": links, "k": k.to_string(), "repeat": repeat, "lower": lower}),
                results: json!({"values": values, "direction": direction}),
                text: values.join(" -> ") + "\n",
                code: 0,
            })
        }
    }
}

fn shrink(args: &ShrinkArgs) -> Result<Output, CliError> {
    let text = read(&args.config)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: args.config.clone(), source })?;
    let (seq_value, config_horizons) = match value.get("sequence") {
        Some(seq) => {
            let h = match value.get("horizons") {
                Some(h) => Some(
                    serde_json::from_value::<Horizons>(h.clone())
                        .map_err(|source| CliError::Json { path: args.config.clone(), source })?,
                ),
                None => None,
            };
            (seq.clone(), h)
        }
        None => (value, None),
    };
    let seq = LinkSequence::from_value(&seq_value)?;
    let horizons = match args.horizon.or(config_horizons) {
        Some(h) => Horizons::new(h.k_max, h.m_max, h.p_max)?,
        None => Horizons::default(),
    };
    let d = decide(&seq, horizons)?;
    let v = &d.verdict;
    let mut text = format!("sequence: {seq}\nverdict: {} ({})\n", v.outcome, v.criterion);
    if let Some(c) = &v.certificate {
        text.push_str(&format!("certificate: {}\n", serde_json::to_string(c).expect("serializable")));
    }
    if let Some(e) = &v.evidence {
        text.push_str(&format!(
            "evidence: {} of {} orbits reached 0 within {} steps; {} unresolved{}\n",
            e.reached_zero,
            e.orbits,
            e.horizons.p_max,
            e.unresolved,
            if e.sequence_exhausted { "; sequence exhausted" } else { "" }
        ));
    }
    text.push_str("criteria:\n");
    for r in &d.criteria {
        let said = r.outcome.map_or("-".to_string(), |o| o.to_string());
        let note = r.note.as_deref().map(|n| format!("  {n}")).unwrap_or_default();
        text.push_str(&format!("  {:<18} {said}{note}\n", r.criterion.to_string()));
    }
    let code = match v.outcome {
        Outcome::Shrinks => 0,
        Outcome::DoesNotShrink => 1,
        Outcome::Unknown => 2,
    };
    Ok(Output {
        input: json!({"command": "shrink", "config": args.config.display().to_string(), "sequence": seq, "horizons": horizons}),
        results: serde_json::to_value(&d).expect("serializable"),
        text,
        code,
    })
}

fn run_report(args: &ReportArgs, timing: bool) -> Result<Output, CliError> {
    if args.list {
        let text: String = report::CHECKS.iter().map(|c| format!("{:<28} {}\n", c.id, c.about)).collect();
        let ids: Vec<Value> = report::CHECKS.iter().map(|c| json!({"id": c.id, "about": c.about})).collect();
        return Ok(Output { input: json!({"command": "report", "list": true}), results: Value::Array(ids), text, code: 0 });
    }
    let results = report::run(&args.only, timing)?;
    let passed = results.iter().filter(|r| r.passed).count();
    let mut text = String::new();
    for r in &results {
        let time = r.elapsed_ms.map(|t| format!(" ({t:.1} ms)")).unwrap_or_default();
        text.push_str(&format!(
            "{} {:<28} {}{time}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.detail
        ));
    }
    text.push_str(&format!("{passed}/{} checks passed\n", results.len()));
    Ok(Output {
        input: json!({"command": "report", "only": args.only}),
        results: serde_json::to_value(&results).expect("serializable"),
        code: u8::from(passed != results.len()),
        text,
    })
}
