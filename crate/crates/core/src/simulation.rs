//! Ground-truth scenarios, stochastic classifier sampling, and the seeded
//! Monte-Carlo harness with latency and belief-curve metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::belief::Bba;
use crate::error::Error;
use crate::fusion::FusionRule;
use crate::propositions::Frame;
use crate::tracker::{ConfusionMatrix, DecisionCriterion, Declaration, TrackerState};
use crate::Result;

/// Identifier of the PRNG scheme pinned into run metadata: per-scan draws
/// come from ChaCha8, per-run seeds from a SplitMix64 hash of
/// (master seed, run index).
pub const GENERATOR_ID: &str = "chacha8/splitmix64-v1";

/// Ground-truth type sequence as ordered (type, duration) segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    frame: Frame,
    segments: Vec<(usize, usize)>,
}

/// A ground-truth type change: first scan (0-based) of the new segment,
/// the new type, and the segment length used as the latency censoring cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Switch {
    pub scan: usize,
    pub new_type: usize,
    pub window: usize,
}

impl Scenario {
    pub fn new(frame: &Frame, segments: Vec<(usize, usize)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptySegment { index: 0 });
        }
        for (i, &(type_index, duration)) in segments.iter().enumerate() {
            if type_index >= frame.size() {
                return Err(Error::BadDeclaration {
                    index: type_index,
                    size: frame.size(),
                });
            }
            if duration == 0 {
                return Err(Error::EmptySegment { index: i });
            }
            if i + 1 < segments.len() && segments[i + 1].0 == type_index {
                return Err(Error::AdjacentSegments {
                    index: i,
                    label: frame.label(type_index).to_string(),
                });
            }
        }
        Ok(Scenario {
            frame: frame.clone(),
            segments,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn segments(&self) -> &[(usize, usize)] {
        &self.segments
    }

    pub fn total_scans(&self) -> usize {
        self.segments.iter().map(|&(_, d)| d).sum()
    }

    /// Per-scan truth vector.
    pub fn truth(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total_scans());
        for &(type_index, duration) in &self.segments {
            out.extend(std::iter::repeat(type_index).take(duration));
        }
        out
    }

    /// All type changes after the opening segment.
    pub fn switches(&self) -> Vec<Switch> {
        let mut out = Vec::new();
        let mut scan = 0;
        for (i, &(type_index, duration)) in self.segments.iter().enumerate() {
            if i > 0 {
                out.push(Switch {
                    scan,
                    new_type: type_index,
                    window: duration,
                });
            }
            scan += duration;
        }
        out
    }
}

/// Categorical draw of a declaration from the confusion-matrix row of the
/// true type.
pub fn sample_declaration<R: Rng>(true_type: usize, cm: &ConfusionMatrix, rng: &mut R) -> usize {
    let row = cm.row(true_type);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    row.len() - 1
}

/// Per-rule trajectory of a single run. Vectors are truncated at the
/// failing scan when the rule errored out (Dempster total conflict).
#[derive(Debug, Clone, PartialEq)]
pub struct RuleRun {
    pub rule: FusionRule,
    /// Per scan, mass of each singleton.
    pub singleton_masses: Vec<Vec<f64>>,
    /// Per scan, mass of total ignorance Θ.
    pub ignorance_mass: Vec<f64>,
    pub decisions: Vec<usize>,
    /// Scan (1-based) at which the rule failed, if it did.
    pub failed_at: Option<usize>,
}

impl RuleRun {
    pub fn failed(&self) -> bool {
        self.failed_at.is_some()
    }
}

/// One Monte-Carlo run: the shared declaration sequence and the trajectory
/// of every requested rule over it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub declarations: Vec<usize>,
    pub rules: Vec<RuleRun>,
}

/// Both rules consume the identical declaration sequence so the comparison
/// is fair; the sequence is drawn once from the run's seeded generator.
pub fn run_single(
    scenario: &Scenario,
    cm: &ConfusionMatrix,
    rules: &[FusionRule],
    criterion: DecisionCriterion,
    seed: u64,
) -> Result<RunResult> {
    if rules.is_empty() {
        return Err(Error::Config("at least one fusion rule required".into()));
    }
    crate::propositions::check_same_frame(scenario.frame(), cm.frame())?;
    let frame = scenario.frame();
    let truth = scenario.truth();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let declarations: Vec<usize> = truth
        .iter()
        .map(|&t| sample_declaration(t, cm, &mut rng))
        .collect();

    let mut rule_runs = Vec::with_capacity(rules.len());
    for &rule in rules {
        let mut state = TrackerState::new(frame, rule, criterion);
        let mut run = RuleRun {
            rule,
            singleton_masses: Vec::with_capacity(truth.len()),
            ignorance_mass: Vec::with_capacity(truth.len()),
            decisions: Vec::with_capacity(truth.len()),
            failed_at: None,
        };
        for (k, &declared) in declarations.iter().enumerate() {
            let decl = Declaration {
                scan: k + 1,
                declared,
            };
            match state.step(decl, cm) {
                Ok(out) => {
                    let masses: Vec<f64> = (0..frame.size())
                        .map(|i| out.posterior.mass(&frame.singleton(i)))
                        .collect();
                    run.singleton_masses.push(masses);
                    run.ignorance_mass.push(out.posterior.mass(&frame.full_set()));
                    run.decisions.push(out.decision);
                    state = out.state;
                }
                Err(_) => {
                    run.failed_at = Some(k + 1);
                    break;
                }
            }
        }
        rule_runs.push(run);
    }
    Ok(RunResult {
        declarations,
        rules: rule_runs,
    })
}

/// Latency of each switch for one run: `Some(d)` when the decision first
/// matches the new truth `d` scans after the switch, `None` when it never
/// does within the segment (censored at the segment length).
pub fn switch_latencies(decisions: &[usize], scenario: &Scenario) -> Vec<Option<usize>> {
    scenario
        .switches()
        .iter()
        .map(|sw| (0..sw.window).find(|&d| decisions[sw.scan + d] == sw.new_type))
        .collect()
}

/// Latency distribution of one switch under one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyStats {
    /// Mean over uncensored runs; `None` when every run was censored.
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub censor_rate: f64,
    pub uncensored: usize,
    pub censored: usize,
}

impl LatencyStats {
    fn from_samples(samples: &[Option<usize>]) -> Self {
        let mut detected: Vec<usize> = samples.iter().filter_map(|&s| s).collect();
        detected.sort_unstable();
        let censored = samples.len() - detected.len();
        let mean = if detected.is_empty() {
            None
        } else {
            Some(detected.iter().sum::<usize>() as f64 / detected.len() as f64)
        };
        let median = if detected.is_empty() {
            None
        } else if detected.len() % 2 == 1 {
            Some(detected[detected.len() / 2] as f64)
        } else {
            let hi = detected.len() / 2;
            Some((detected[hi - 1] + detected[hi]) as f64 / 2.0)
        };
        let censor_rate = if samples.is_empty() {
            0.0
        } else {
            censored as f64 / samples.len() as f64
        };
        LatencyStats {
            mean,
            median,
            censor_rate,
            uncensored: detected.len(),
            censored,
        }
    }
}

/// Aggregated trajectory of one rule over all non-failed runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSummary {
    pub rule: FusionRule,
    /// Runs that reached the final scan without a rule failure.
    pub completed_runs: usize,
    pub failures: usize,
    /// Per scan, mean mass of each singleton over completed runs.
    pub mean_singleton_masses: Vec<Vec<f64>>,
    pub mean_ignorance: Vec<f64>,
    /// Per scan, fraction of completed runs whose decision matched truth.
    pub accuracy: Vec<f64>,
    /// One entry per scenario switch.
    pub switch_latency: Vec<LatencyStats>,
}

impl RuleSummary {
    /// A rule with zero completed runs cannot be compared meaningfully.
    pub fn usable(&self) -> bool {
        self.completed_runs > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub n_runs: usize,
    pub frame: Frame,
    pub truth: Vec<usize>,
    pub switches: Vec<Switch>,
    pub rules: Vec<RuleSummary>,
    pub master_seed: u64,
    pub generator: &'static str,
}

impl MonteCarloSummary {
    pub fn rule(&self, rule: FusionRule) -> Option<&RuleSummary> {
        self.rules.iter().find(|r| r.rule == rule)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-run seed derived from the master seed and run index.
pub fn run_seed(master_seed: u64, run_index: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(run_index as u64))
}

/// Runs are independent and executed in parallel; the reduction walks them
/// in run-index order, so the summary is bit-identical for a given
/// (scenario, matrix, rules, criterion, seed, n_runs) regardless of the
/// thread count.
pub fn run_monte_carlo(
    scenario: &Scenario,
    cm: &ConfusionMatrix,
    rules: &[FusionRule],
    criterion: DecisionCriterion,
    n_runs: usize,
    master_seed: u64,
) -> Result<MonteCarloSummary> {
    if n_runs == 0 {
        return Err(Error::Config("n_runs must be at least 1".into()));
    }
    let results: Vec<RunResult> = (0..n_runs)
        .into_par_iter()
        .map(|i| run_single(scenario, cm, rules, criterion, run_seed(master_seed, i)))
        .collect::<Result<_>>()?;

    let k_max = scenario.total_scans();
    let m = scenario.frame().size();
    let truth = scenario.truth();
    let switches = scenario.switches();

    let mut summaries = Vec::with_capacity(rules.len());
    for (ri, &rule) in rules.iter().enumerate() {
        let mut mass_sums = vec![vec![0.0f64; m]; k_max];
        let mut ignorance_sums = vec![0.0f64; k_max];
        let mut correct = vec![0usize; k_max];
        let mut latency_samples: Vec<Vec<Option<usize>>> = vec![Vec::new(); switches.len()];
        let mut completed = 0usize;
        let mut failures = 0usize;
        for result in &results {
            let run = &result.rules[ri];
            if run.failed() {
                failures += 1;
                continue;
            }
            completed += 1;
            for k in 0..k_max {
                for i in 0..m {
                    mass_sums[k][i] += run.singleton_masses[k][i];
                }
                ignorance_sums[k] += run.ignorance_mass[k];
                if run.decisions[k] == truth[k] {
                    correct[k] += 1;
                }
            }
            for (si, lat) in switch_latencies(&run.decisions, scenario)
                .into_iter()
                .enumerate()
            {
                latency_samples[si].push(lat);
            }
        }
        let denom = completed.max(1) as f64;
        summaries.push(RuleSummary {
            rule,
            completed_runs: completed,
            failures,
            mean_singleton_masses: mass_sums
                .into_iter()
                .map(|row| row.into_iter().map(|s| s / denom).collect())
                .collect(),
            mean_ignorance: ignorance_sums.into_iter().map(|s| s / denom).collect(),
            accuracy: correct.into_iter().map(|c| c as f64 / denom).collect(),
            switch_latency: latency_samples
                .iter()
                .map(|s| LatencyStats::from_samples(s))
                .collect(),
        });
    }

    Ok(MonteCarloSummary {
        n_runs,
        frame: scenario.frame().clone(),
        truth,
        switches,
        rules: summaries,
        master_seed,
        generator: GENERATOR_ID,
    })
}

/// Re-run a single trajectory as a plain fusion fold; used to cross-check
/// that the tracker's state loop matches `fusion::fold`.
pub fn fold_posterior(
    frame: &Frame,
    rule: FusionRule,
    cm: &ConfusionMatrix,
    declarations: &[usize],
) -> Result<Bba> {
    let observations: Vec<Bba> = declarations
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            crate::tracker::observation_bba(
                frame,
                Declaration {
                    scan: k + 1,
                    declared: d,
                },
                cm,
            )
        })
        .collect::<Result<_>>()?;
    crate::fusion::fold(rule, &Bba::vacuous(frame), observations.iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc() -> Frame {
        Frame::new(["Fighter", "Cargo"]).unwrap()
    }

    fn c1(frame: &Frame) -> ConfusionMatrix {
        ConfusionMatrix::new(frame, vec![vec![0.95, 0.05], vec![0.05, 0.95]]).unwrap()
    }

    #[test]
    fn scenario_validation() {
        let frame = fc();
        assert!(Scenario::new(&frame, vec![(1, 120)]).is_ok());
        assert!(matches!(
            Scenario::new(&frame, vec![(1, 20), (1, 10)]),
            Err(Error::AdjacentSegments { .. })
        ));
        assert!(matches!(
            Scenario::new(&frame, vec![(1, 0)]),
            Err(Error::EmptySegment { .. })
        ));
        let s = Scenario::new(&frame, vec![(1, 20), (0, 20), (1, 30)]).unwrap();
        assert_eq!(s.total_scans(), 70);
        assert_eq!(s.truth().len(), 70);
        let switches = s.switches();
        assert_eq!(switches.len(), 2);
        assert_eq!(switches[0].scan, 20);
        assert_eq!(switches[0].new_type, 0);
        assert_eq!(switches[0].window, 20);
    }

    #[test]
    fn identity_matrix_declares_truth() {
        let frame = fc();
        let cm = ConfusionMatrix::identity(&frame);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in 0..2 {
            for _ in 0..100 {
                assert_eq!(sample_declaration(t, &cm, &mut rng), t);
            }
        }
    }

    #[test]
    fn declaration_frequencies_match_rows() {
        let frame = fc();
        let cm = c1(&frame);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| sample_declaration(0, &cm, &mut rng) == 0)
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.95).abs() < 0.01, "empirical {freq}");

        let c2 = ConfusionMatrix::new(&frame, vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
        let hits = (0..n)
            .filter(|_| sample_declaration(1, &c2, &mut rng) == 1)
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.75).abs() < 0.01, "empirical {freq}");
    }

    #[test]
    fn perfect_classifier_constant_truth_always_correct() {
        let frame = fc();
        let cm = ConfusionMatrix::identity(&frame);
        let scenario = Scenario::new(&frame, vec![(1, 40)]).unwrap();
        let result = run_single(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            5,
        )
        .unwrap();
        for run in &result.rules {
            assert!(!run.failed());
            assert!(run.decisions.iter().all(|&d| d == 1), "{}", run.rule);
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let frame = fc();
        let cm = c1(&frame);
        let scenario = Scenario::new(&frame, vec![(1, 20), (0, 10), (1, 10)]).unwrap();
        let a = run_single(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            42,
        )
        .unwrap();
        let b = run_single(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            42,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tracker_loop_matches_fold() {
        let frame = fc();
        let cm = c1(&frame);
        let scenario = Scenario::new(&frame, vec![(1, 15), (0, 10)]).unwrap();
        let result = run_single(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            123,
        )
        .unwrap();
        for run in &result.rules {
            let folded =
                fold_posterior(&frame, run.rule, &cm, &result.declarations).unwrap();
            let last = run.singleton_masses.last().unwrap();
            for i in 0..frame.size() {
                assert_eq!(folded.mass(&frame.singleton(i)), last[i], "{}", run.rule);
            }
        }
    }

    #[test]
    fn latency_zero_when_decisions_track_truth() {
        let frame = fc();
        let scenario = Scenario::new(&frame, vec![(1, 10), (0, 5), (1, 5)]).unwrap();
        let decisions = scenario.truth();
        let lats = switch_latencies(&decisions, &scenario);
        assert_eq!(lats, vec![Some(0), Some(0)]);
    }

    #[test]
    fn latency_censored_when_never_detected() {
        let frame = fc();
        let scenario = Scenario::new(&frame, vec![(1, 10), (0, 5)]).unwrap();
        let decisions = vec![1; 15];
        let lats = switch_latencies(&decisions, &scenario);
        assert_eq!(lats, vec![None]);
        let stats = LatencyStats::from_samples(&lats);
        assert_eq!(stats.mean, None);
        assert_eq!(stats.censor_rate, 1.0);
    }

    #[test]
    fn monte_carlo_single_run_equals_run_single() {
        let frame = fc();
        let cm = c1(&frame);
        let scenario = Scenario::new(&frame, vec![(1, 10), (0, 10)]).unwrap();
        let summary = run_monte_carlo(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            1,
            77,
        )
        .unwrap();
        let single = run_single(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            run_seed(77, 0),
        )
        .unwrap();
        for (rs, rr) in summary.rules.iter().zip(&single.rules) {
            assert_eq!(rs.completed_runs, 1);
            assert_eq!(rs.mean_singleton_masses, rr.singleton_masses);
            assert_eq!(rs.mean_ignorance, rr.ignorance_mass);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let frame = fc();
        let cm = c1(&frame);
        let scenario = Scenario::new(&frame, vec![(1, 20), (0, 10)]).unwrap();
        let a = run_monte_carlo(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            50,
            7,
        )
        .unwrap();
        let b = run_monte_carlo(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            50,
            7,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_masses_sum_to_one() {
        let frame = fc();
        let cm = c1(&frame);
        let scenario = Scenario::new(&frame, vec![(1, 20), (0, 10), (1, 10)]).unwrap();
        let summary = run_monte_carlo(
            &scenario,
            &cm,
            &FusionRule::ALL,
            DecisionCriterion::MaxBelief,
            100,
            3,
        )
        .unwrap();
        for rs in &summary.rules {
            assert_eq!(rs.failures, 0);
            for k in 0..scenario.total_scans() {
                let total: f64 = rs.mean_singleton_masses[k].iter().sum::<f64>()
                    + rs.mean_ignorance[k];
                assert!((total - 1.0).abs() < 1e-9, "{} scan {k}: {total}", rs.rule);
            }
        }
    }
}
