//! Command-line front end: `run`, `stream` and `bench`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::bench::{generate, BenchSpec, Generator};
use crate::engine::{compare_modes, EngineError, EvictionConfig, Mode, Session, SessionConfig, ShotResult};
use crate::grounder::{Budget, EvictionPolicy};
use crate::model::NonGroundProgram;
use crate::syntax::{parse_facts, parse_program};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

const SCHEMA: u32 = 1;
const END_SHOT: &str = "#endshot.";

#[derive(Debug, Parser)]
#[command(name = "overground", version, about = "Multi-shot answer set solving with an overgrounded cache")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a program against a sequence of shot files.
    Run(RunArgs),
    /// Read shots from standard input, each closed by `#endshot.`.
    Stream(SessionArgs),
    /// Generate a synthetic workload and compare incremental against scratch.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Incremental,
    Scratch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Oldest,
    #[value(alias = "least_triggered")]
    LeastTriggered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorArg {
    ReachStream,
    GridAgent,
}

/// `None` means all answer sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct MaxModels(Option<usize>);

fn parse_max_models(s: &str) -> Result<MaxModels, String> {
    match s {
        "all" | "0" => Ok(MaxModels(None)),
        n => n.parse().map(|n| MaxModels(Some(n))).map_err(|_| format!("expected a number or `all`, got `{n}`")),
    }
}

#[derive(Debug, Args)]
struct SessionArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long, value_enum, default_value = "incremental")]
    mode: ModeArg,
    /// Answer sets per shot: a number or `all`.
    #[arg(long, value_parser = parse_max_models, default_value = "all")]
    max_models: MaxModels,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
    /// Leave timings out so output can be diffed.
    #[arg(long)]
    no_timings: bool,
    /// Write the session state here after the last shot.
    #[arg(long)]
    save_state: Option<PathBuf>,
    /// Resume from a saved state before the first shot.
    #[arg(long)]
    load_state: Option<PathBuf>,
    /// Evict cached rules at shot boundaries (default policy when only a
    /// budget is given: oldest).
    #[arg(long, value_enum)]
    evict: Option<PolicyArg>,
    #[arg(long)]
    budget_rules: Option<usize>,
    #[arg(long)]
    budget_bytes: Option<usize>,
    /// Check every shot against the brute-force oracle.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    session: SessionArgs,
    #[arg(long, num_args = 1.., required = true)]
    shots: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "reach-stream")]
    generator: GeneratorArg,
    #[arg(long, default_value_t = 500)]
    nodes: u32,
    #[arg(long, default_value_t = 50)]
    shots: usize,
    #[arg(long, default_value_t = 10)]
    edges_per_shot: usize,
    #[arg(long, default_value_t = 8)]
    side: u32,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_max_models, default_value = "all")]
    max_models: MaxModels,
    /// Also write the generated program and shot files here.
    #[arg(long)]
    emit_dir: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = if e.is_invariant_failure() { EXIT_INVARIANT } else { EXIT_INPUT };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(&a, stdout),
        Command::Stream(a) => stream(&a, stdin, stdout, stderr),
        Command::Bench(a) => bench(&a, stdout),
    };
    let _ = stdout.flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<NonGroundProgram, Failure> {
    parse_program(&read(path)?).map_err(|e| Failure::input(format!("{}:\n{e}", path.display())))
}

fn session_config(a: &SessionArgs) -> Result<SessionConfig, Failure> {
    let budget = match (a.budget_rules, a.budget_bytes) {
        (Some(_), Some(_)) => return Err(Failure::input("give at most one of --budget-rules and --budget-bytes")),
        (Some(n), None) => Some(Budget::Rules(n)),
        (None, Some(n)) => Some(Budget::Bytes(n)),
        (None, None) => None,
    };
    let eviction = match (a.evict, budget) {
        (None, None) => None,
        (Some(_), None) => return Err(Failure::input("--evict needs --budget-rules or --budget-bytes")),
        (policy, Some(budget)) => {
            let policy = match policy {
                Some(PolicyArg::LeastTriggered) => EvictionPolicy::LeastTriggered,
                _ => EvictionPolicy::Oldest,
            };
            Some(EvictionConfig { policy, budget })
        }
    };
    let mode = match a.mode {
        ModeArg::Incremental => Mode::Incremental,
        ModeArg::Scratch => Mode::Scratch,
    };
    Ok(SessionConfig {
        mode,
        max_models: a.max_models.0,
        eviction,
        oracle_check: a.oracle_check,
        ..SessionConfig::default()
    })
}

fn open_session(a: &SessionArgs) -> Result<Session, Failure> {
    let program = load_program(&a.program)?;
    let config = session_config(a)?;
    match &a.load_state {
        Some(path) => {
            let file = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            Ok(Session::load_state(program, config, BufReader::new(file))?)
        }
        None => Ok(Session::new(program, config)?),
    }
}

fn save(session: &Session, a: &SessionArgs) -> Result<(), Failure> {
    if let Some(path) = &a.save_state {
        let file = File::create(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        session.save_state(BufWriter::new(file))?;
    }
    Ok(())
}

fn write_answer_sets(out: &mut dyn Write, label: u64, r: &ShotResult) -> std::io::Result<()> {
    writeln!(out, "%% shot {label}")?;
    for line in &r.rendered {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn us(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e7).round() / 10.0
}

fn shot_summary(r: &ShotResult, timings: bool) -> String {
    let g = &r.grounding;
    let mut s = format!(
        "answer_sets={} new_rules={} new_domain_atoms={} cache_rules={} cache_bytes={} evicted={}",
        r.rendered.len(),
        g.new_rules,
        g.new_domain_atoms,
        g.cache_size_rules,
        g.cache_size_bytes_estimate,
        r.evicted
    );
    if timings {
        let t = &r.timings;
        s += &format!(
            " ground_us={} project_us={} solve_us={} total_us={}",
            us(t.ground),
            us(t.project),
            us(t.solve),
            us(r.wall_time_total)
        );
    }
    s
}

fn shot_json(label: u64, r: &ShotResult, timings: bool) -> Json {
    let mut v = json!({
        "shot": label,
        "answer_sets": r.rendered.len(),
        "exhausted": r.exhausted,
        "grounding": r.grounding,
        "evicted": r.evicted,
        "solved_rules": r.solved_rules,
        "solve": r.solve_stats,
    });
    if timings {
        let t = &r.timings;
        v["timings_us"] = json!({
            "evict": us(t.evict),
            "ground": us(t.ground),
            "project": us(t.project),
            "solve": us(t.solve),
            "total": us(r.wall_time_total),
        });
    }
    v
}

fn write_report(out: &mut dyn Write, a: &SessionArgs, results: &[(u64, ShotResult)]) -> std::io::Result<()> {
    let timings = !a.no_timings;
    writeln!(out, "%% report")?;
    match a.report {
        ReportFormat::Text => {
            for (label, r) in results {
                writeln!(out, "shot {label}: {}", shot_summary(r, timings))?;
            }
            if timings {
                let sum = |f: fn(&ShotResult) -> Duration| results.iter().map(|(_, r)| f(r)).sum::<Duration>();
                writeln!(
                    out,
                    "total: ground_us={} solve_us={} total_us={}",
                    us(sum(|r| r.timings.ground)),
                    us(sum(|r| r.timings.solve)),
                    us(sum(|r| r.wall_time_total))
                )?;
            }
        }
        ReportFormat::Json => {
            let mode = match a.mode {
                ModeArg::Incremental => "incremental",
                ModeArg::Scratch => "scratch",
            };
            let report = json!({
                "schema": SCHEMA,
                "mode": mode,
                "shots": results.iter().map(|(l, r)| shot_json(*l, r, timings)).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
        }
    }
    Ok(())
}

fn run(a: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut session = open_session(&a.session)?;
    let mut shots = Vec::with_capacity(a.shots.len());
    for path in &a.shots {
        let facts = parse_facts(&read(path)?).map_err(|e| Failure::input(format!("{}:\n{e}", path.display())))?;
        shots.push(facts);
    }
    let mut results = Vec::with_capacity(shots.len());
    for facts in &shots {
        let r = session.process_shot(facts)?;
        write_answer_sets(out, r.shot_index, &r)?;
        results.push((r.shot_index, r));
    }
    write_report(out, &a.session, &results)?;
    save(&session, &a.session)?;
    Ok(EXIT_OK)
}

/// Splits streamed text into closed shots. Comments are dropped so that a
/// `#endshot.` inside one does not count.
#[derive(Debug, Default)]
struct ShotBuffer {
    pending: String,
}

impl ShotBuffer {
    fn feed(&mut self, line: &str) -> Vec<String> {
        let line = line.split_once('%').map_or(line, |(code, _)| code);
        let mut closed = Vec::new();
        let mut rest = line;
        while let Some((before, after)) = rest.split_once(END_SHOT) {
            self.pending.push_str(before);
            closed.push(std::mem::take(&mut self.pending));
            rest = after;
        }
        self.pending.push_str(rest);
        self.pending.push('\n');
        closed
    }

    fn leftover(&self) -> Option<&str> {
        let t = self.pending.trim();
        (!t.is_empty()).then_some(t)
    }
}

fn stream(a: &SessionArgs, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut session = open_session(a)?;
    let mut buffer = ShotBuffer::default();
    let mut label = session.shots_processed();
    let mut code = EXIT_OK;
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        for text in buffer.feed(line.trim_end_matches(['\n', '\r'])) {
            label += 1;
            let facts = match parse_facts(&text) {
                Ok(f) => f,
                Err(e) => {
                    writeln!(err, "shot {label}: skipped\n{e}")?;
                    code = EXIT_INPUT;
                    continue;
                }
            };
            let r = match session.process_shot(&facts) {
                Ok(r) => r,
                Err(e) if e.is_invariant_failure() => return Err(e.into()),
                Err(e) => {
                    writeln!(err, "shot {label}: {e}")?;
                    return Err(Failure {
                        code: EXIT_INPUT,
                        message: "stream aborted: engine state may be partial".into(),
                    });
                }
            };
            write_answer_sets(out, label, &r)?;
            match a.report {
                ReportFormat::Text => writeln!(out, "%% {}", shot_summary(&r, !a.no_timings))?,
                ReportFormat::Json => {
                    let mut v = shot_json(label, &r, !a.no_timings);
                    v["schema"] = json!(SCHEMA);
                    writeln!(out, "{v}")?;
                }
            }
            out.flush()?;
        }
    }
    if let Some(rest) = buffer.leftover() {
        writeln!(err, "warning: ignoring input after the last `{END_SHOT}`: {rest}")?;
    }
    save(&session, a)?;
    Ok(code)
}

fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (generator, params) = match a.generator {
        GeneratorArg::ReachStream => (
            Generator::ReachStream { nodes: a.nodes, shots: a.shots, edges_per_shot: a.edges_per_shot },
            json!({ "nodes": a.nodes, "shots": a.shots, "edges_per_shot": a.edges_per_shot }),
        ),
        GeneratorArg::GridAgent => {
            (Generator::GridAgent { side: a.side, steps: a.steps }, json!({ "side": a.side, "steps": a.steps }))
        }
    };
    let name = match a.generator {
        GeneratorArg::ReachStream => "reach-stream",
        GeneratorArg::GridAgent => "grid-agent",
    };
    let workload = generate(&BenchSpec { generator, seed: a.seed }).map_err(Failure::input)?;
    if let Some(dir) = &a.emit_dir {
        workload.emit(dir)?;
    }
    let program = parse_program(&workload.program).map_err(|e| Failure::input(e.to_string()))?;
    let config = SessionConfig { max_models: a.max_models.0, ..SessionConfig::default() };

    let mut report = json!({ "schema": SCHEMA, "generator": name, "params": params, "seed": a.seed });
    let code = match compare_modes(&program, &workload.shots, &config) {
        Ok(c) => {
            let speedup =
                if c.incremental_ground_us > 0.0 { c.scratch_ground_us / c.incremental_ground_us } else { 0.0 };
            report["answer_sets_equal"] = json!(true);
            report["shots"] = json!(c.shots);
            report["cumulative_us"] = json!({
                "incremental_ground": c.incremental_ground_us,
                "scratch_ground": c.scratch_ground_us,
                "incremental_total": c.incremental_total_us,
                "scratch_total": c.scratch_total_us,
            });
            report["ground_ratio"] = json!(c.ground_ratio);
            report["speedup"] = json!(speedup);
            report["cache_growth"] = json!(c.per_shot.iter().map(|s| s.cache_size_rules).collect::<Vec<_>>());
            report["per_shot"] = serde_json::to_value(&c.per_shot).expect("report serializes");
            EXIT_OK
        }
        Err(e @ EngineError::ModeMismatch { .. }) => {
            report["answer_sets_equal"] = json!(false);
            report["mismatch"] = json!(e.to_string());
            EXIT_INVARIANT
        }
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
    Ok(code)
}
