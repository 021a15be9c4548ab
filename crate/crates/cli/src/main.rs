use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use abfold::analysis::{cluster_solutions, mirror, superposed_rmsd, DEFAULT_CLUSTER_THRESHOLD};
use abfold::harness::{fit_exponential, run_experiment, summarize, ExperimentSummary, ResultsStore};
use abfold::io::{self, parse_angle_blocks};
use abfold::localmove::AngleMode;
use abfold::model::{self, compute_positions, corpus::CORPUS, reported_energy, Conformation, Sequence};
use abfold::optimizer::{self, Ablation, OptimizerConfig, Stopping};
use abfold::Error;

const RESULTS_ENV: &str = "ABFOLD_RESULTS_DIR";

#[derive(Parser)]
#[command(name = "abfold", version, about = "AB off-lattice protein folding with DE and local moves")]
struct Cli {
    /// Print energies with full precision instead of 4 decimals.
    #[arg(long, global = true)]
    full_precision: bool,
    /// Machine-readable key=value / JSON output.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the optimizer once.
    Optimize(OptimizeArgs),
    /// Energy of a conformation file.
    Evaluate(EvaluateArgs),
    /// Many independent runs with statistics.
    Experiment(ExperimentArgs),
    /// Statistics over a runs.jsonl file.
    Stats(StatsArgs),
    /// Fit y = a * b^L to "L y" lines.
    Fit(FitArgs),
    /// Superposed RMSD between conformations, or clustering.
    Rmsd(RmsdArgs),
    /// Mirror a conformation through the XY-plane.
    Mirror(MirrorArgs),
    /// List the built-in sequences.
    Sequences(SequencesArgs),
}

#[derive(Args, Clone)]
struct SeqArgs {
    /// Built-in sequence label.
    #[arg(long, conflicts_with = "seq_file")]
    seq: Option<String>,
    /// FASTA-like sequence file (first record is used).
    #[arg(long)]
    seq_file: Option<PathBuf>,
    /// Sequence file holds amino-acid codes to reduce to A/B.
    #[arg(long, requires = "seq_file")]
    kd: bool,
}

impl SeqArgs {
    fn resolve(&self) -> Result<Sequence, CliError> {
        match (&self.seq, &self.seq_file) {
            (Some(label), _) => Ok(model::lookup(label)?),
            (None, Some(path)) => Ok(io::read_fasta(path, self.kd)?.remove(0)),
            (None, None) => Err(CliError::Usage("give --seq or --seq-file".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Offset,
    Absolute,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 {
        Ok(f as u64)
    } else {
        Err(format!("not a non-negative integer: {s}"))
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// Evaluation budget (accepts 1e7 style).
    #[arg(long, value_parser = parse_count)]
    nse: Option<u64>,
    /// Same as --nse; reads better next to --target.
    #[arg(long, value_parser = parse_count, conflicts_with = "nse")]
    nse_cap: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time: Option<f64>,
    /// Stop once this reported energy is reached.
    #[arg(long, allow_negative_numbers = true)]
    target: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    np: Option<usize>,
    #[arg(long)]
    pb: Option<u64>,
    #[arg(long)]
    lb: Option<u64>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    no_local_search: bool,
    #[arg(long)]
    no_component_reinit: bool,
    #[arg(long)]
    no_temporal_locality: bool,
    #[arg(long, value_enum, default_value = "offset")]
    angle_mode: ModeArg,
}

impl RunArgs {
    fn config(&self) -> OptimizerConfig {
        let defaults = OptimizerConfig::default();
        OptimizerConfig {
            np: self.np.unwrap_or(defaults.np),
            pb: self.pb,
            lb: self.lb,
            c: self.c,
            seed: self.seed,
            stopping: Stopping { nse_limit: self.nse.or(self.nse_cap), time_limit: self.time, target: self.target },
            ablation: Ablation {
                local_search: !self.no_local_search,
                component_reinit: !self.no_component_reinit,
                temporal_locality: !self.no_temporal_locality,
            },
            angle_mode: match self.angle_mode {
                ModeArg::Offset => AngleMode::Offset,
                ModeArg::Absolute => AngleMode::Absolute,
            },
            trace: false,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Where to write the best conformation (degrees).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Write the convergence trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print "-" instead of the wall time, for reproducible output.
    #[arg(long)]
    no_time: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// Conformation file (label line, then angles).
    conf: PathBuf,
    /// Angles in the file are degrees (the default).
    #[arg(long, conflicts_with = "radians")]
    degrees: bool,
    /// Angles in the file are radians.
    #[arg(long)]
    radians: bool,
    /// Print the raw model energy instead of the reported (negated) one.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment description; run flags are ignored when given,
    /// but --runs and --jobs still override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
    /// Number of runs [default: 1].
    #[arg(long)]
    runs: Option<usize>,
    /// Worker threads [default: 1].
    #[arg(long)]
    jobs: Option<usize>,
    /// Results directory; defaults to $ABFOLD_RESULTS_DIR/<label>.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Do not persist records.
    #[arg(long)]
    no_store: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// runs.jsonl file or a results directory.
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    target: Option<f64>,
}

#[derive(Args)]
struct FitArgs {
    /// File with one "L y" pair per line; "-" reads stdin.
    input: PathBuf,
}

#[derive(Args)]
struct RmsdArgs {
    /// Conformation files; every block of every file is used.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long)]
    radians: bool,
    /// Cluster all conformations instead of comparing the first two.
    #[arg(long)]
    cluster: bool,
    #[arg(long, default_value_t = DEFAULT_CLUSTER_THRESHOLD)]
    threshold: f64,
    /// Sequence used to report per-cluster best energies.
    #[command(flatten)]
    seq: SeqArgs,
}

#[derive(Args)]
struct MirrorArgs {
    conf: PathBuf,
    #[arg(long)]
    radians: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SequencesArgs {
    #[arg(long)]
    label: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Model(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

struct Out {
    full: bool,
    machine: bool,
}

impl Out {
    fn energy(&self, e: f64) -> String {
        if self.full || self.machine {
            format!("{e}")
        } else {
            format!("{e:.4}")
        }
    }
}

fn results_root() -> PathBuf {
    std::env::var_os(RESULTS_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"))
}

fn label_or(seq: &Sequence, fallback: &str) -> String {
    if seq.label().is_empty() {
        fallback.to_string()
    } else {
        seq.label().to_string()
    }
}

fn cmd_optimize(out: &Out, args: &OptimizeArgs) -> Result<String, CliError> {
    let seq = args.run.seq.resolve()?;
    let mut config = args.run.config();
    config.trace = args.trace.is_some();
    let result = optimizer::run(&seq, &config)?;
    let label = label_or(&seq, "seq");
    let conf_path = match &args.out {
        Some(p) => p.clone(),
        None => {
            let dir = results_root();
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
            dir.join(format!("{label}_seed{}.conf", config.seed))
        }
    };
    io::write_conformation(&conf_path, &label, &result.best, true)?;
    if let Some(p) = &args.trace {
        std::fs::write(p, io::format_trace(&result.trace)).map_err(|e| Error::Io { path: p.clone(), source: e })?;
    }
    let secs = if args.no_time { "-".to_string() } else { format!("{:.3}", result.seconds) };
    let mut s = String::new();
    if out.machine {
        let _ = writeln!(s, "label={label}");
        let _ = writeln!(s, "energy={}", result.best_reported);
        let _ = writeln!(s, "nse={}", result.nse);
        let _ = writeln!(s, "seconds={secs}");
        let _ = writeln!(s, "stop={:?}", result.stop);
        if let Some(h) = result.hit {
            let _ = writeln!(s, "hit={h}");
        }
        let _ = writeln!(s, "conformation={}", conf_path.display());
    } else {
        let _ = writeln!(s, "{label} {} {} {secs}", out.energy(result.best_reported), result.nse);
    }
    Ok(s)
}

fn read_conf(path: &Path, radians: bool) -> Result<(String, Conformation), CliError> {
    Ok(io::read_conformation(path, !radians)?)
}

fn cmd_evaluate(_: &Out, args: &EvaluateArgs) -> Result<String, CliError> {
    let (label, conf) = read_conf(&args.conf, args.radians)?;
    let seq = match (&args.seq.seq, &args.seq.seq_file) {
        (None, None) => model::lookup(&label)?,
        _ => args.seq.resolve()?,
    };
    let raw = model::energy(&seq, &conf)?;
    let e = if args.raw { raw } else { reported_energy(raw) };
    // Evaluation always prints full precision.
    Ok(format!("{e}\n"))
}

fn summary_text(out: &Out, s: &ExperimentSummary) -> Result<String, CliError> {
    if out.machine {
        return Ok(serde_json::to_string(s).map_err(Error::from)? + "\n");
    }
    let opt = |v: Option<f64>, f: &dyn Fn(f64) -> String| v.map(f).unwrap_or_else(|| "-".into());
    let sci = |v: f64| format!("{v:.3e}");
    let mut t = String::new();
    let _ = writeln!(t, "runs      {}", s.runs);
    let _ = writeln!(t, "E_mean    {}", out.energy(s.e_mean));
    let _ = writeln!(t, "E_best    {}", out.energy(s.e_best));
    let _ = writeln!(t, "E_std     {}", out.energy(s.e_std));
    let _ = writeln!(t, "hit_r     {}", opt(s.hit_r, &|v| format!("{v}")));
    let _ = writeln!(t, "NSE_mean  {}", opt(s.nse_mean, &sci));
    let _ = writeln!(t, "NSE_std   {}", opt(s.nse_std, &sci));
    let _ = writeln!(t, "CI95      {} {}", opt(s.ci95_low, &sci), opt(s.ci95_high, &sci));
    let _ = writeln!(t, "t_mean    {:.3}", s.t_mean);
    let _ = writeln!(t, "v_mean    {:.3e}", s.v_mean);
    Ok(t)
}

fn cmd_experiment(out: &Out, args: &ExperimentArgs) -> Result<String, CliError> {
    let (seq, config, runs, jobs) = match &args.config {
        Some(path) => {
            let cfg = io::read_experiment_config(path)?;
            let jobs = args.jobs.or(cfg.jobs).unwrap_or(1);
            (cfg.sequence.resolve()?, cfg.optimizer, args.runs.unwrap_or(cfg.runs), jobs)
        }
        None => (args.run.seq.resolve()?, args.run.config(), args.runs.unwrap_or(1), args.jobs.unwrap_or(1)),
    };
    let store = if args.no_store {
        None
    } else {
        let dir = args.out_dir.clone().unwrap_or_else(|| results_root().join(label_or(&seq, "seq")));
        Some(ResultsStore::open(dir)?)
    };
    let (_, summary) = run_experiment(&seq, &config, runs, jobs, store.as_ref())?;
    summary_text(out, &summary)
}

fn cmd_stats(out: &Out, args: &StatsArgs) -> Result<String, CliError> {
    let store = if args.input.is_dir() {
        ResultsStore::open(&args.input)?
    } else {
        let dir = args.input.parent().map(Path::to_path_buf).unwrap_or_default();
        if args.input.file_name().is_some_and(|n| n != "runs.jsonl") {
            return Err(CliError::Usage("stats expects a results directory or a runs.jsonl file".into()));
        }
        ResultsStore::open(dir)?
    };
    let records = store.load_runs()?;
    summary_text(out, &summarize(&records, args.target)?)
}

fn cmd_fit(out: &Out, args: &FitArgs) -> Result<String, CliError> {
    let text = if args.input.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Io { path: "-".into(), source: e })?
    } else {
        std::fs::read_to_string(&args.input).map_err(|e| Error::Io { path: args.input.clone(), source: e })?
    };
    let mut points = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::Parse { line: Some(no + 1), msg: format!("bad number in {line:?}") })?;
        if nums.len() != 2 {
            return Err(Error::Parse { line: Some(no + 1), msg: "expected two values: L y".into() }.into());
        }
        points.push((nums[0], nums[1]));
    }
    let (a, b) = fit_exponential(&points)?;
    Ok(if out.machine { format!("a={a}\nb={b}\n") } else { format!("{a:.4} * {b:.4}^L\n") })
}

fn cmd_rmsd(out: &Out, args: &RmsdArgs) -> Result<String, CliError> {
    let mut confs = Vec::new();
    for path in &args.files {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        for block in parse_angle_blocks(&text)? {
            confs.push((block.label.clone(), block.to_conformation(!args.radians)?));
        }
    }
    if !args.cluster {
        if confs.len() < 2 {
            return Err(CliError::Usage("need two conformations to compare".into()));
        }
        let r = superposed_rmsd(&compute_positions(&confs[0].1), &compute_positions(&confs[1].1))?;
        return Ok(format!("{}\n", if out.full || out.machine { format!("{r}") } else { format!("{r:.4}") }));
    }
    let seq = match (&args.seq.seq, &args.seq.seq_file) {
        (None, None) => None,
        _ => Some(args.seq.resolve()?),
    };
    let entries: Vec<(Conformation, f64)> = confs
        .iter()
        .map(|(_, c)| {
            let e = match &seq {
                Some(s) => reported_energy(model::energy(s, c)?),
                None => f64::NAN,
            };
            Ok((c.clone(), e))
        })
        .collect::<Result<_, Error>>()?;
    let clusters = cluster_solutions(&entries, args.threshold)?;
    let mut s = String::new();
    let _ = writeln!(s, "clusters {}", clusters.len());
    for (k, c) in clusters.iter().enumerate() {
        let members: Vec<String> = c.members.iter().map(|m| (m + 1).to_string()).collect();
        let best = if c.best_energy.is_finite() { out.energy(c.best_energy) } else { "-".into() };
        let _ = writeln!(s, "{} {} {} {}", k + 1, c.members.len(), best, members.join(","));
    }
    Ok(s)
}

fn cmd_mirror(_: &Out, args: &MirrorArgs) -> Result<String, CliError> {
    let (label, conf) = read_conf(&args.conf, args.radians)?;
    let text = io::format_conformation(&label, &mirror(&conf), !args.radians);
    match &args.out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn cmd_sequences(out: &Out, args: &SequencesArgs) -> Result<String, CliError> {
    let rows: Vec<_> = CORPUS
        .iter()
        .filter(|e| args.label.as_ref().is_none_or(|l| e.label.eq_ignore_ascii_case(l)))
        .collect();
    if rows.is_empty() {
        return Err(Error::UnknownSequence(args.label.clone().unwrap_or_default()).into());
    }
    let mut s = String::new();
    for e in rows {
        let (l, d) = (e.residues.len(), 2 * e.residues.len() - 5);
        if out.machine {
            let _ = writeln!(s, "label={} length={l} dimension={d} residues={}", e.label, e.residues);
        } else {
            let _ = writeln!(s, "{} {l} {d} {}", e.label, e.residues);
        }
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { full: cli.full_precision, machine: cli.machine };
    let result = match &cli.command {
        Command::Optimize(a) => cmd_optimize(&out, a),
        Command::Evaluate(a) => cmd_evaluate(&out, a),
        Command::Experiment(a) => cmd_experiment(&out, a),
        Command::Stats(a) => cmd_stats(&out, a),
        Command::Fit(a) => cmd_fit(&out, a),
        Command::Rmsd(a) => cmd_rmsd(&out, a),
        Command::Mirror(a) => cmd_mirror(&out, a),
        Command::Sequences(a) => cmd_sequences(&out, a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Model(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 3 } else { 4 })
        }
    }
}
