//! Multi-run experiments, run statistics and asymptotic fitting.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Sequence;
use crate::optimizer::{self, OptimizerConfig, RunOutcome};

/// Result of one independent run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Best reported energy.
    pub e: f64,
    pub nse: u64,
    /// Wall time in seconds.
    pub t: f64,
    /// Evaluations per second.
    pub v: f64,
    /// Whether the target was reached; `None` without a target.
    pub hit: Option<bool>,
}

impl RunRecord {
    pub fn from_outcome(run: usize, seed: u64, out: &RunOutcome) -> Self {
        let t = out.seconds.max(f64::MIN_POSITIVE);
        Self { run, seed, e: out.best_reported, nse: out.nse, t, v: out.nse as f64 / t, hit: out.hit }
    }
}

/// Aggregate statistics over a set of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub runs: usize,
    pub hits: usize,
    pub e_mean: f64,
    pub e_best: f64,
    pub e_std: f64,
    /// Percentage of runs that reached the target; `None` without a target.
    pub hit_r: Option<f64>,
    pub nse_mean: Option<f64>,
    pub nse_std: Option<f64>,
    pub t_mean: f64,
    pub v_mean: f64,
    pub ci95_low: Option<f64>,
    pub ci95_high: Option<f64>,
}

fn mean(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    xs.sum::<f64>() / n
}

/// Sample standard deviation (divisor `N - 1`); zero for a single value.
fn sample_std(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs.clone());
    (xs.map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// 95% confidence multipliers `1 -/+ 1.96 / sqrt(hits)`.
pub fn ci95_multipliers(hits: usize) -> (f64, f64) {
    let h = 1.96 / (hits as f64).sqrt();
    (1.0 - h, 1.0 + h)
}

/// Summarizes runs. With a target, hits are recomputed from the energies;
/// otherwise each record's own flag is used.
pub fn summarize(records: &[RunRecord], target: Option<f64>) -> Result<ExperimentSummary> {
    if records.is_empty() {
        return Err(Error::EmptyInput("run records"));
    }
    let hit_of = |r: &RunRecord| match target {
        Some(t) => Some(optimizer::hits_target(r.e, t)),
        None => r.hit,
    };
    let has_target = records.iter().any(|r| hit_of(r).is_some());
    // Sorting keeps the sums independent of record order.
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.e.total_cmp(&b.e).then(a.nse.cmp(&b.nse)).then(a.t.total_cmp(&b.t)));
    let e = sorted.iter().map(|r| r.e);
    let mut hits: Vec<f64> =
        sorted.iter().filter(|r| hit_of(r) == Some(true)).map(|r| r.nse as f64).collect();
    hits.sort_by(f64::total_cmp);
    let mut times: Vec<f64> = sorted.iter().map(|r| r.t).collect();
    times.sort_by(f64::total_cmp);
    let mut speeds: Vec<f64> = sorted.iter().map(|r| r.v).collect();
    speeds.sort_by(f64::total_cmp);

    let n = records.len();
    let nh = hits.len();
    let (nse_mean, nse_std, ci) = if has_target && nh > 0 {
        let m = mean(hits.iter().copied());
        let (lo, hi) = ci95_multipliers(nh);
        (Some(m), Some(sample_std(hits.iter().copied())), Some((lo * m, hi * m)))
    } else {
        (None, None, None)
    };
    Ok(ExperimentSummary {
        runs: n,
        hits: nh,
        e_mean: mean(e.clone()),
        e_best: e.fold(f64::NEG_INFINITY, f64::max),
        e_std: sample_std(sorted.iter().map(|r| r.e)),
        hit_r: has_target.then(|| 100.0 * nh as f64 / n as f64),
        nse_mean,
        nse_std,
        t_mean: mean(times.iter().copied()),
        v_mean: mean(speeds.iter().copied()),
        ci95_low: ci.map(|c| c.0),
        ci95_high: ci.map(|c| c.1),
    })
}

/// The `k` prefixes of `seq` obtained by dropping its last `1..=k` monomers.
pub fn make_subsequences(seq: &Sequence, k: usize) -> Result<Vec<Sequence>> {
    if seq.len() < k + 3 {
        return Err(Error::Domain(format!(
            "cannot drop {k} monomers from a chain of {} and keep at least 3",
            seq.len()
        )));
    }
    (1..=k).map(|i| seq.truncated(i)).collect()
}

/// Least-squares fit of `y = a * b^L` in log space. Returns `(a, b)`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(l, y)) = points.iter().find(|(l, y)| *y <= 0.0 || !y.is_finite() || !l.is_finite()) {
        return Err(Error::Domain(format!("point ({l}, {y}) cannot be fitted in log space")));
    }
    let n = points.len() as f64;
    let lx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ly = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - lx) * (p.0 - lx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - lx) * (p.1.ln() - ly)).sum();
    let scale = points.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    if sxx <= 1e-12 * scale * scale {
        return Err(Error::RankDeficient);
    }
    let slope = sxy / sxx;
    let intercept = ly - slope * lx;
    Ok((intercept.exp(), slope.exp()))
}

/// Seed for run `index`: SplitMix64 finalizer over `base + index * golden`.
///
/// Adding runs never changes the seeds of earlier runs.
pub fn derive_seed(base: u64, index: usize) -> u64 {
    let mut z = base.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Where a sequence for an experiment comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSpec {
    Label(String),
    Inline { label: String, residues: String },
}

impl SequenceSpec {
    pub fn resolve(&self) -> Result<Sequence> {
        match self {
            SequenceSpec::Label(l) => crate::model::lookup(l),
            SequenceSpec::Inline { label, residues } => Sequence::parse(label.clone(), residues),
        }
    }
}

/// A full experiment description, loadable from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sequence: SequenceSpec,
    pub runs: usize,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

/// Append-only results directory: `runs.jsonl` plus `summary.json`.
#[derive(Debug, Clone)]
pub struct ResultsStore {
    dir: PathBuf,
}

impl ResultsStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn runs_path(&self) -> PathBuf {
        self.dir.join("runs.jsonl")
    }

    pub fn summary_path(&self) -> PathBuf {
        self.dir.join("summary.json")
    }

    /// Records already present; a truncated last line is ignored.
    pub fn load_runs(&self) -> Result<Vec<RunRecord>> {
        let path = self.runs_path();
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let lines: Vec<String> =
            BufReader::new(file).lines().collect::<std::io::Result<_>>().map_err(|e| Error::io(&path, e))?;
        let mut out = Vec::new();
        let last = lines.len().saturating_sub(1);
        for (i, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<RunRecord>(line) {
                Ok(r) => out.push(r),
                Err(_) if i == last => break,
                Err(e) => return Err(Error::parse(i + 1, e.to_string())),
            }
        }
        Ok(out)
    }

    pub fn append(&self, record: &RunRecord) -> Result<()> {
        let path = self.runs_path();
        let mut f = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| Error::io(&path, e))?;
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        f.write_all(line.as_bytes()).map_err(|e| Error::io(&path, e))
    }

    /// Replaces `runs.jsonl` with exactly `records`.
    pub fn rewrite(&self, records: &[RunRecord]) -> Result<()> {
        let path = self.runs_path();
        let mut text = String::new();
        for r in records {
            text.push_str(&serde_json::to_string(r)?);
            text.push('\n');
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn write_summary(&self, summary: &ExperimentSummary) -> Result<()> {
        let path = self.summary_path();
        let text = serde_json::to_string_pretty(summary)?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }
}

/// Runs `n_runs` independent optimizations on up to `jobs` threads.
///
/// Run `i` uses `derive_seed(config.seed, i)`. Records come back sorted by
/// run index. With a store, runs already on disk are reused and new records
/// are appended as they finish, so an interrupted experiment resumes.
pub fn run_experiment(
    seq: &Sequence,
    config: &OptimizerConfig,
    n_runs: usize,
    jobs: usize,
    store: Option<&ResultsStore>,
) -> Result<(Vec<RunRecord>, ExperimentSummary)> {
    if n_runs == 0 {
        return Err(Error::EmptyInput("experiment with zero runs"));
    }
    config.validate(seq.dimension())?;
    let mut records: Vec<RunRecord> = match store {
        Some(s) => s.load_runs()?.into_iter().filter(|r| r.run < n_runs).collect(),
        None => Vec::new(),
    };
    records.sort_by_key(|r| r.run);
    records.dedup_by_key(|r| r.run);
    if let Some(s) = store {
        s.rewrite(&records)?;
    }
    let pending: Vec<usize> = (0..n_runs).filter(|i| records.binary_search_by_key(i, |r| r.run).is_err()).collect();

    let queue = Mutex::new(pending.into_iter());
    let (tx, rx) = mpsc::channel::<Result<RunRecord>>();
    let mut first_error = None;
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || loop {
                let Some(i) = queue.lock().expect("queue lock").next() else { break };
                let seed = derive_seed(config.seed, i);
                let res = optimizer::run(seq, &config.clone().with_seed(seed))
                    .map(|out| RunRecord::from_outcome(i, seed, &out));
                let failed = res.is_err();
                if tx.send(res).is_err() || failed {
                    break;
                }
            });
        }
        drop(tx);
        for res in rx {
            match res {
                Ok(r) => {
                    if let Some(s) = store {
                        if let Err(e) = s.append(&r) {
                            first_error.get_or_insert(e);
                        }
                    }
                    records.push(r);
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                    // Drain the queue so idle workers stop.
                    queue.lock().expect("queue lock").by_ref().for_each(drop);
                }
            }
        }
    });
    if let Some(e) = first_error {
        return Err(e);
    }
    records.sort_by_key(|r| r.run);
    let summary = summarize(&records, config.stopping.target)?;
    if let Some(s) = store {
        s.write_summary(&summary)?;
    }
    Ok((records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Stopping;

    fn rec(run: usize, e: f64, nse: u64, hit: Option<bool>) -> RunRecord {
        RunRecord { run, seed: 0, e, nse, t: 2.0, v: nse as f64 / 2.0, hit }
    }

    #[test]
    fn three_element_summary() {
        let rs = [rec(0, 1.0, 10, None), rec(1, 2.0, 20, None), rec(2, 3.0, 30, None)];
        let s = summarize(&rs, None).unwrap();
        assert_eq!((s.e_mean, s.e_best, s.e_std), (2.0, 3.0, 1.0));
        assert_eq!(s.hit_r, None);
        assert_eq!(s.nse_mean, None);
        assert_eq!(s.t_mean, 2.0);
        assert_eq!(s.v_mean, 10.0);

        let s = summarize(&rs, Some(2.0)).unwrap();
        assert_eq!(s.hits, 2);
        assert_eq!(s.nse_mean, Some(25.0));
        assert_eq!(s.nse_std, Some(50f64.sqrt()));
        assert!((s.hit_r.unwrap() - 200.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn hit_ratio_is_a_percentage() {
        let rs: Vec<_> = (0..100).map(|i| rec(i, 1.0, 5, Some(i < 17))).collect();
        let s = summarize(&rs, None).unwrap();
        assert_eq!(s.hit_r, Some(17.0));
        let none: Vec<_> = (0..5).map(|i| rec(i, 1.0, 5, Some(false))).collect();
        let s = summarize(&none, None).unwrap();
        assert_eq!((s.hit_r, s.nse_mean, s.nse_std, s.ci95_low), (Some(0.0), None, None, None));
    }

    #[test]
    fn ci_multipliers() {
        let (lo, hi) = ci95_multipliers(100);
        assert!((lo - 0.804).abs() < 1e-12 && (hi - 1.196).abs() < 1e-12);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(summarize(&[], None), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn subsequences() {
        let cb3 = crate::model::lookup("1CB3").unwrap();
        let subs: Vec<String> = make_subsequences(&cb3, 6).unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(
            subs,
            ["BABBBAABBAAA", "BABBBAABBAA", "BABBBAABBA", "BABBBAABB", "BABBBAAB", "BABBBAA"]
        );
        assert!(make_subsequences(&cb3, 0).unwrap().is_empty());
        assert!(make_subsequences(&cb3, 11).is_err());
        let f13 = crate::model::lookup("F13").unwrap();
        assert_eq!(make_subsequences(&f13, 1).unwrap()[0].to_string(), "ABBABBABABBA");
    }

    #[test]
    fn exponential_fit() {
        let pts: Vec<_> = (7..10).map(|l| (l as f64, 2.0 * 3f64.powi(l))).collect();
        let (a, b) = fit_exponential(&pts).unwrap();
        assert!((a - 2.0).abs() < 1e-9 * 2.0);
        assert!((b - 3.0).abs() < 1e-9 * 3.0);
        assert!(matches!(fit_exponential(&[(5.0, 1.0), (5.0, 2.0)]), Err(Error::RankDeficient)));
        assert!(matches!(fit_exponential(&[(5.0, 1.0), (6.0, 0.0)]), Err(Error::Domain(_))));
        assert!(fit_exponential(&[(5.0, 1.0)]).is_err());
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 1000);
        assert_eq!(derive_seed(42, 3), seeds[3]);
        assert_ne!(derive_seed(43, 3), seeds[3]);
    }

    #[test]
    fn experiment_is_independent_of_jobs_and_resumable() {
        let seq = crate::model::lookup("1BXP").unwrap();
        let cfg = OptimizerConfig::default().with_stopping(Stopping::nse(3000)).with_seed(5);
        let (a, sa) = run_experiment(&seq, &cfg, 4, 1, None).unwrap();
        let (b, _) = run_experiment(&seq, &cfg, 4, 3, None).unwrap();
        let energies = |rs: &[RunRecord]| rs.iter().map(|r| (r.run, r.seed, r.e, r.nse)).collect::<Vec<_>>();
        assert_eq!(energies(&a), energies(&b));
        assert_eq!(sa.runs, 4);

        let dir = tempfile::tempdir().unwrap();
        let store = ResultsStore::open(dir.path()).unwrap();
        run_experiment(&seq, &cfg, 2, 1, Some(&store)).unwrap();
        assert_eq!(store.load_runs().unwrap().len(), 2);
        let (c, _) = run_experiment(&seq, &cfg, 4, 2, Some(&store)).unwrap();
        assert_eq!(energies(&c), energies(&a));
        assert_eq!(store.load_runs().unwrap().len(), 4);
        let summary: ExperimentSummary =
            serde_json::from_str(&fs::read_to_string(store.summary_path()).unwrap()).unwrap();
        assert_eq!(summary.runs, 4);
    }

    #[test]
    fn truncated_last_line_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let store = ResultsStore::open(dir.path()).unwrap();
        store.append(&rec(0, 1.0, 3, None)).unwrap();
        fs::OpenOptions::new().append(true).open(store.runs_path()).unwrap().write_all(b"{\"run\":1,").unwrap();
        assert_eq!(store.load_runs().unwrap().len(), 1);
    }
}
