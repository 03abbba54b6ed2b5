//! Sequential target type tracker: observation bba construction from
//! classifier declarations, fusion with the running prior, and decision
//! extraction over singletons.

use serde::{Deserialize, Serialize};

use crate::belief::Bba;
use crate::error::Error;
use crate::fusion::{combine, FusionRule};
use crate::propositions::Frame;
use crate::Result;

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Row-stochastic classifier model: `rows[i][j] = P(declared = Tj | true = Ti)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    frame: Frame,
    rows: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn new(frame: &Frame, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = frame.size();
        if rows.len() != m {
            return Err(Error::ConfusionShape {
                expected: m,
                rows: rows.len(),
                row: 0,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::ConfusionShape {
                    expected: m,
                    rows: rows.len(),
                    row: i,
                    cols: row.len(),
                });
            }
            let mut sum = 0.0;
            for (j, &value) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                    return Err(Error::ConfusionEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
                sum += value;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::ConfusionRowSum {
                    row: i,
                    sum,
                    tolerance: ROW_SUM_TOLERANCE,
                });
            }
        }
        Ok(ConfusionMatrix {
            frame: frame.clone(),
            rows,
        })
    }

    pub fn identity(frame: &Frame) -> Self {
        let m = frame.size();
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        ConfusionMatrix {
            frame: frame.clone(),
            rows,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.rows[i][i]
    }
}

/// A classifier output: at scan `k`, type `declared` was announced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Declaration {
    pub scan: usize,
    pub declared: usize,
}

/// How the winning singleton is extracted from a posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionCriterion {
    /// Argmax of Bel over the singletons.
    #[serde(rename = "belief")]
    MaxBelief,
    /// Argmax of the pignistic probability.
    #[serde(rename = "pignistic")]
    MaxPignistic,
}

/// Immutable tracker state; `step` returns the successor state.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerState {
    frame: Frame,
    rule: FusionRule,
    criterion: DecisionCriterion,
    prior: Bba,
    last_decision: Option<usize>,
    scan: usize,
}

/// Result of one tracking step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: TrackerState,
    pub decision: usize,
    pub posterior: Bba,
}

impl TrackerState {
    /// Vacuous prior, scan counter at zero, no decision yet.
    pub fn new(frame: &Frame, rule: FusionRule, criterion: DecisionCriterion) -> Self {
        TrackerState {
            frame: frame.clone(),
            rule,
            criterion,
            prior: Bba::vacuous(frame),
            last_decision: None,
            scan: 0,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn rule(&self) -> FusionRule {
        self.rule
    }

    pub fn prior(&self) -> &Bba {
        &self.prior
    }

    pub fn scan(&self) -> usize {
        self.scan
    }

    /// `None` until the first step has produced a decision.
    pub fn last_decision(&self) -> Option<usize> {
        self.last_decision
    }

    /// Fuse the next declaration into the running prior and decide.
    /// Declarations must arrive in scan order (`decl.scan == self.scan + 1`).
    pub fn step(&self, decl: Declaration, cm: &ConfusionMatrix) -> Result<StepOutcome> {
        if decl.scan != self.scan + 1 {
            return Err(Error::ScanOrder {
                expected: self.scan + 1,
                got: decl.scan,
            });
        }
        let obs = observation_bba(&self.frame, decl, cm)?;
        let posterior = combine(self.rule, &self.prior, &obs).map_err(|e| Error::FusionStep {
            index: decl.scan,
            source: Box::new(e),
        })?;
        let decision = decide(&posterior, self.criterion, self.last_decision)?;
        Ok(StepOutcome {
            state: TrackerState {
                frame: self.frame.clone(),
                rule: self.rule,
                criterion: self.criterion,
                prior: posterior.clone(),
                last_decision: Some(decision),
                scan: decl.scan,
            },
            decision,
            posterior,
        })
    }
}

/// Observation bba from a declaration: the declared singleton carries the
/// classifier's diagonal confidence, the remainder goes to total ignorance.
/// Off-diagonal confusion entries are deliberately unused.
pub fn observation_bba(frame: &Frame, decl: Declaration, cm: &ConfusionMatrix) -> Result<Bba> {
    crate::propositions::check_same_frame(frame, cm.frame())?;
    if decl.declared >= frame.size() {
        return Err(Error::BadDeclaration {
            index: decl.declared,
            size: frame.size(),
        });
    }
    let confidence = cm.diagonal(decl.declared);
    let mut assignments = vec![(frame.singleton(decl.declared), confidence)];
    if confidence < 1.0 {
        assignments.push((frame.full_set(), 1.0 - confidence));
    }
    Bba::new(frame, assignments)
}

/// Argmax over singleton scores with deterministic tie handling: an exact
/// tie keeps the previous decision when it is among the winners, otherwise
/// the lowest frame index wins.
pub fn decide(bba: &Bba, criterion: DecisionCriterion, previous: Option<usize>) -> Result<usize> {
    let frame = bba.frame();
    let scores: Vec<f64> = match criterion {
        DecisionCriterion::MaxBelief => (0..frame.size())
            .map(|i| bba.belief(&frame.singleton(i)))
            .collect::<Result<_>>()?,
        DecisionCriterion::MaxPignistic => bba.pignistic(),
    };
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if let Some(prev) = previous {
        if scores[prev] == best {
            return Ok(prev);
        }
    }
    Ok(scores.iter().position(|&s| s == best).unwrap_or(0))
}
