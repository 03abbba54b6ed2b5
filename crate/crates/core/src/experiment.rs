//! Experiment configuration, execution and file emission.
//!
//! An [`ExperimentConfig`] fully determines a run: frame labels, confusion
//! matrix, ground-truth segments, rules, run count, seed and decision
//! criterion. `run_experiment` executes the Monte-Carlo campaign and writes
//! `summary.csv`, `latency.csv`, `meta.txt` and `plot.gp` into the output
//! directory. `meta.txt` embeds the resolved config as TOML so the run can
//! be reproduced exactly from it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fusion::FusionRule;
use crate::propositions::Frame;
use crate::simulation::{
    run_monte_carlo, MonteCarloSummary, Scenario, GENERATOR_ID,
};
use crate::tracker::{ConfusionMatrix, DecisionCriterion};
use crate::Result;

/// The good classifier of the two-classifier comparison.
pub const BUILTIN_C1: [[f64; 2]; 2] = [[0.95, 0.05], [0.05, 0.95]];
/// The poor classifier.
pub const BUILTIN_C2: [[f64; 2]; 2] = [[0.75, 0.25], [0.25, 0.75]];

/// Default ground truth: 120 scans starting on Cargo with three Fighter
/// episodes of 20, 10 and 5 scans.
pub const DEFAULT_SEGMENTS: [(&str, usize); 7] = [
    ("Cargo", 20),
    ("Fighter", 20),
    ("Cargo", 30),
    ("Fighter", 10),
    ("Cargo", 25),
    ("Fighter", 5),
    ("Cargo", 10),
];

pub const DEFAULT_RUNS: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

/// A fully resolved experiment description. The confusion matrix is stored
/// inline so a config echoed into `meta.txt` reproduces the run without
/// access to the original matrix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub labels: Vec<String>,
    /// Source tag of the matrix: "c1", "c2" or the path it was loaded from.
    pub classifier: String,
    pub matrix: Vec<Vec<f64>>,
    pub segments: Vec<(String, usize)>,
    pub rules: Vec<FusionRule>,
    pub runs: usize,
    pub seed: u64,
    pub criterion: DecisionCriterion,
    pub out: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            labels: vec!["Fighter".into(), "Cargo".into()],
            classifier: "c1".into(),
            matrix: BUILTIN_C1.iter().map(|r| r.to_vec()).collect(),
            segments: DEFAULT_SEGMENTS
                .iter()
                .map(|&(l, d)| (l.to_string(), d))
                .collect(),
            rules: FusionRule::ALL.to_vec(),
            runs: DEFAULT_RUNS,
            seed: DEFAULT_SEED,
            criterion: DecisionCriterion::MaxBelief,
            out: "out".into(),
        }
    }
}

/// Optional fields as they appear in a TOML config file; unset fields fall
/// back to the defaults. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    labels: Option<Vec<String>>,
    classifier: Option<String>,
    matrix: Option<Vec<Vec<f64>>>,
    segments: Option<Vec<(String, usize)>>,
    rules: Option<Vec<FusionRule>>,
    runs: Option<usize>,
    seed: Option<u64>,
    criterion: Option<DecisionCriterion>,
    out: Option<String>,
}

impl ExperimentConfig {
    /// Merge a TOML config file over the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let file: ConfigFile = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config = ExperimentConfig::default();
        if let Some(labels) = file.labels {
            config.labels = labels;
        }
        if let Some(segments) = file.segments {
            config.segments = segments;
        }
        if let Some(rules) = file.rules {
            config.rules = rules;
        }
        if let Some(runs) = file.runs {
            config.runs = runs;
        }
        if let Some(seed) = file.seed {
            config.seed = seed;
        }
        if let Some(criterion) = file.criterion {
            config.criterion = criterion;
        }
        if let Some(out) = file.out {
            config.out = out;
        }
        match (file.classifier, file.matrix) {
            (Some(name), None) => config.set_classifier(&name)?,
            (name, Some(matrix)) => {
                config.classifier = name.unwrap_or_else(|| "inline".into());
                config.matrix = matrix;
            }
            (None, None) => {}
        }
        config.validate()?;
        Ok(config)
    }

    /// Resolve a classifier selector: builtin `c1`/`c2` or a matrix file
    /// whose first line lists the frame labels.
    pub fn set_classifier(&mut self, selector: &str) -> Result<()> {
        match selector {
            "c1" => {
                self.classifier = "c1".into();
                self.matrix = BUILTIN_C1.iter().map(|r| r.to_vec()).collect();
            }
            "c2" => {
                self.classifier = "c2".into();
                self.matrix = BUILTIN_C2.iter().map(|r| r.to_vec()).collect();
            }
            path => {
                let (labels, matrix) = load_confusion_file(Path::new(path))?;
                self.classifier = path.to_string();
                self.labels = labels;
                self.matrix = matrix;
            }
        }
        Ok(())
    }

    /// Check the config and build the runtime objects it describes.
    pub fn validate(&self) -> Result<(Frame, ConfusionMatrix, Scenario)> {
        let frame = Frame::new(self.labels.clone())?;
        let cm = ConfusionMatrix::new(&frame, self.matrix.clone())?;
        let mut segments = Vec::with_capacity(self.segments.len());
        for (label, duration) in &self.segments {
            let idx = frame
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            segments.push((idx, *duration));
        }
        let scenario = Scenario::new(&frame, segments)?;
        if self.rules.is_empty() {
            return Err(Error::Config("at least one fusion rule required".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        Ok((frame, cm, scenario))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Stable FNV-1a hash of the canonical TOML form.
    pub fn hash(&self) -> String {
        format!("fnv1a64:{:016x}", fnv1a64(self.to_toml().as_bytes()))
    }
}

fn fnv1a64(data: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Confusion matrix file: first line frame labels, then one
/// whitespace-separated probability row per line.
pub fn load_confusion_file(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let labels: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: empty matrix file", path.display())))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse().map_err(|e| {
                    Error::Parse(format!(
                        "{} row {}: bad probability {tok:?}: {e}",
                        path.display(),
                        i + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok((labels, rows))
}

/// Scenario file: one `label duration` pair per line.
pub fn load_scenario_file(path: &Path) -> Result<Vec<(String, usize)>> {
    let text = fs::read_to_string(path)?;
    let mut segments = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label = parts.next().unwrap().to_string();
        let duration: usize = parts
            .next()
            .ok_or_else(|| {
                Error::Parse(format!(
                    "{} line {}: expected `label duration`",
                    path.display(),
                    i + 1
                ))
            })?
            .parse()
            .map_err(|e| {
                Error::Parse(format!("{} line {}: bad duration: {e}", path.display(), i + 1))
            })?;
        segments.push((label, duration));
    }
    Ok(segments)
}

/// Files written by a successful experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub summary_csv: PathBuf,
    pub latency_csv: PathBuf,
    pub meta: PathBuf,
    pub plot_script: PathBuf,
    pub summary: MonteCarloSummary,
}

/// Format with 12 significant digits, dot-decimal.
fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// Emission order of the per-rule column blocks; fixed so the header never
/// shifts when a rule subset is requested.
const COLUMN_RULES: [FusionRule; 2] = [FusionRule::Dempster, FusionRule::Pcr5];

fn summary_csv(summary: &MonteCarloSummary, labels: &[String]) -> String {
    let m = labels.len();
    let mut out = String::from("scan,truth");
    for rule in COLUMN_RULES {
        for label in labels {
            out.push_str(&format!(",m_{label}_{rule}"));
        }
        out.push_str(&format!(",m_ignorance_{rule},correct_rate_{rule}"));
    }
    out.push('\n');
    for k in 0..summary.truth.len() {
        out.push_str(&format!("{},{}", k + 1, labels[summary.truth[k]]));
        for rule in COLUMN_RULES {
            match summary.rule(rule) {
                Some(rs) if rs.usable() => {
                    for i in 0..m {
                        out.push(',');
                        out.push_str(&fmt_sig(rs.mean_singleton_masses[k][i]));
                    }
                    out.push(',');
                    out.push_str(&fmt_sig(rs.mean_ignorance[k]));
                    out.push(',');
                    out.push_str(&fmt_sig(rs.accuracy[k]));
                }
                _ => {
                    for _ in 0..m + 2 {
                        out.push(',');
                    }
                }
            }
        }
        out.push('\n');
    }
    out
}

fn latency_csv(summary: &MonteCarloSummary, labels: &[String]) -> String {
    let mut out = String::from("switch,scan,new_type");
    for rule in COLUMN_RULES {
        out.push_str(&format!(
            ",mean_latency_{rule},median_latency_{rule},censor_rate_{rule}"
        ));
    }
    out.push('\n');
    for (si, sw) in summary.switches.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}",
            si + 1,
            sw.scan + 1,
            labels[sw.new_type]
        ));
        for rule in COLUMN_RULES {
            match summary.rule(rule) {
                Some(rs) if rs.usable() => {
                    let stats = &rs.switch_latency[si];
                    out.push(',');
                    if let Some(mean) = stats.mean {
                        out.push_str(&fmt_sig(mean));
                    }
                    out.push(',');
                    if let Some(median) = stats.median {
                        out.push_str(&fmt_sig(median));
                    }
                    out.push(',');
                    out.push_str(&fmt_sig(stats.censor_rate));
                }
                _ => out.push_str(",,,"),
            }
        }
        out.push('\n');
    }
    out
}

fn plot_script(config: &ExperimentConfig) -> String {
    let m = config.labels.len();
    let mut out = String::new();
    out.push_str("# Mean belief-mass curves per rule, one plot per type.\n");
    out.push_str("# Usage: gnuplot plot.gp   (run from the output directory)\n");
    out.push_str("set datafile separator comma\n");
    out.push_str("set key outside\n");
    out.push_str("set xlabel 'scan'\n");
    out.push_str("set yrange [0:1.05]\n");
    out.push_str("set term pngcairo size 960,600\n");
    for (i, label) in config.labels.iter().enumerate() {
        let dempster_col = 3 + i;
        let pcr5_col = 3 + (m + 2) + i;
        out.push_str(&format!("set output 'mass_{label}.png'\n"));
        out.push_str(&format!("set title 'Mean belief mass for {label} Type'\n"));
        out.push_str(&format!(
            "plot 'summary.csv' using 1:{dempster_col} with linespoints pt 2 lc rgb 'red' \
             title 'Dempster', \\\n     'summary.csv' using 1:{pcr5_col} with linespoints \
             pt 6 lc rgb 'blue' title 'PCR5'\n"
        ));
    }
    out
}

fn meta_text(config: &ExperimentConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("version = {:?}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("generator = {GENERATOR_ID:?}\n"));
    out.push_str(&format!("config_hash = {:?}\n", config.hash()));
    out.push_str("\n[config]\n");
    out.push_str(&config.to_toml());
    out
}

/// Re-read the `[config]` table of a `meta.txt`; together with the seed it
/// contains, this reproduces the run exactly.
pub fn parse_meta(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    #[derive(Deserialize)]
    struct Meta {
        config: ExperimentConfig,
    }
    let meta: Meta = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(meta.config)
}

/// Run the configured Monte-Carlo campaign and write all output files.
/// Returns `Error::RuleUnusable` (after writing) when a requested rule
/// failed on every run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (_frame, cm, scenario) = config.validate()?;
    let summary = run_monte_carlo(
        &scenario,
        &cm,
        &config.rules,
        config.criterion,
        config.runs,
        config.seed,
    )?;

    let out_dir = PathBuf::from(&config.out);
    fs::create_dir_all(&out_dir)?;
    let summary_path = out_dir.join("summary.csv");
    let latency_path = out_dir.join("latency.csv");
    let meta_path = out_dir.join("meta.txt");
    let plot_path = out_dir.join("plot.gp");
    fs::write(&summary_path, summary_csv(&summary, &config.labels))?;
    fs::write(&latency_path, latency_csv(&summary, &config.labels))?;
    fs::write(&meta_path, meta_text(config))?;
    fs::write(&plot_path, plot_script(config))?;

    for rs in &summary.rules {
        if !rs.usable() {
            return Err(Error::RuleUnusable {
                rule: rs.rule.to_string(),
                runs: summary.n_runs,
            });
        }
    }

    Ok(ExperimentOutput {
        summary_csv: summary_path,
        latency_csv: latency_path,
        meta: meta_path,
        plot_script: plot_path,
        summary,
    })
}
