//! Two-source combination: conjunctive consensus, conflict measurement,
//! Dempster's rule and PCR5, plus sequential folding for observation streams.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::belief::Bba;
use crate::error::Error;
use crate::propositions::{check_same_frame, Proposition};
use crate::Result;

/// Below this, a PCR5 proportionalization denominator counts as zero and
/// the fraction is discarded.
const DENOMINATOR_FLOOR: f64 = 1e-15;

/// Dempster's rule is refused when 1 − k12 falls under this guard.
const TOTAL_CONFLICT_GUARD: f64 = 1e-12;

/// Selector for the two combination rules under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionRule {
    Dempster,
    Pcr5,
}

impl FusionRule {
    pub const ALL: [FusionRule; 2] = [FusionRule::Dempster, FusionRule::Pcr5];

    pub fn name(&self) -> &'static str {
        match self {
            FusionRule::Dempster => "dempster",
            FusionRule::Pcr5 => "pcr5",
        }
    }
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dempster" => Ok(FusionRule::Dempster),
            "pcr5" => Ok(FusionRule::Pcr5),
            other => Err(Error::Parse(format!(
                "unknown fusion rule {other:?} (expected dempster or pcr5)"
            ))),
        }
    }
}

/// Partial and total conflict of a two-source conjunctive combination.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictReport {
    /// k12, the mass the conjunctive consensus puts on ∅.
    pub total: f64,
    /// Mass product per unordered focal pair (X1, X2) with X1 ∩ X2 = ∅.
    pub partials: BTreeMap<(Proposition, Proposition), f64>,
}

/// Unnormalized conjunctive consensus, with the ∅ mass reported separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjunctive {
    /// Masses over the non-empty intersections; totals 1 − k12.
    pub masses: BTreeMap<Proposition, f64>,
    pub conflict: ConflictReport,
}

/// Sum contributions in an order independent of which source came first:
/// sorted by target, then unordered pair key, then the value bits.
fn accumulate(mut contribs: Vec<(Proposition, (u32, u32), f64)>) -> BTreeMap<Proposition, f64> {
    contribs.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.to_bits().cmp(&b.2.to_bits()))
    });
    let mut out: BTreeMap<Proposition, f64> = BTreeMap::new();
    for (target, _, value) in contribs {
        *out.entry(target).or_insert(0.0) += value;
    }
    out
}

fn pair_key(a: &Proposition, b: &Proposition) -> (u32, u32) {
    (a.bits().min(b.bits()), a.bits().max(b.bits()))
}

/// Conjunctive consensus m12(X) = Σ m1(X1)·m2(X2) over X1 ∩ X2 = X.
pub fn conjunctive(m1: &Bba, m2: &Bba) -> Result<Conjunctive> {
    check_same_frame(m1.frame(), m2.frame())?;
    let frame = m1.frame();
    let mut contribs = Vec::new();
    let mut partials: BTreeMap<(Proposition, Proposition), f64> = BTreeMap::new();
    for (x1, w1) in m1.focal() {
        for (x2, w2) in m2.focal() {
            let product = w1 * w2;
            let meet = frame.proposition_from_bits(x1.bits() & x2.bits());
            if meet.is_empty() {
                let key = if x1.bits() <= x2.bits() {
                    (x1.clone(), x2.clone())
                } else {
                    (x2.clone(), x1.clone())
                };
                *partials.entry(key).or_insert(0.0) += product;
            } else {
                contribs.push((meet, pair_key(x1, x2), product));
            }
        }
    }
    let total = partials.values().sum();
    Ok(Conjunctive {
        masses: accumulate(contribs),
        conflict: ConflictReport { total, partials },
    })
}

/// The degree of conflict k12 between two sources.
pub fn total_conflict(m1: &Bba, m2: &Bba) -> Result<f64> {
    Ok(conjunctive(m1, m2)?.conflict.total)
}

/// Dempster's rule: conjunctive consensus renormalized by 1/(1 − k12).
pub fn dempster(m1: &Bba, m2: &Bba) -> Result<Bba> {
    let conj = conjunctive(m1, m2)?;
    let k12 = conj.conflict.total;
    if 1.0 - k12 <= TOTAL_CONFLICT_GUARD {
        return Err(Error::TotalConflict { k12 });
    }
    Ok(Bba::renormalized(m1.frame().clone(), conj.masses))
}

/// PCR5: conjunctive consensus plus proportional redistribution of every
/// partial conflicting mass back to the two propositions that produced it.
///
/// For each conflicting pair (X1 from source 1, X2 from source 2), X1
/// receives m1(X1)²·m2(X2)/(m1(X1)+m2(X2)) and X2 the complementary share;
/// fractions with a vanishing denominator are discarded. Defined for any
/// degree of conflict, including k12 = 1.
pub fn pcr5(m1: &Bba, m2: &Bba) -> Result<Bba> {
    check_same_frame(m1.frame(), m2.frame())?;
    let frame = m1.frame();
    let mut contribs = Vec::new();
    for (x1, w1) in m1.focal() {
        for (x2, w2) in m2.focal() {
            let meet_bits = x1.bits() & x2.bits();
            let key = pair_key(x1, x2);
            if meet_bits != 0 {
                contribs.push((frame.proposition_from_bits(meet_bits), key, w1 * w2));
            } else {
                let denom = w1 + w2;
                if denom >= DENOMINATOR_FLOOR {
                    contribs.push((x1.clone(), key, w1 * w1 * w2 / denom));
                    contribs.push((x2.clone(), key, w2 * w2 * w1 / denom));
                }
            }
        }
    }
    Ok(Bba::renormalized(frame.clone(), accumulate(contribs)))
}

/// Apply the selected rule to one pair of sources.
pub fn combine(rule: FusionRule, m1: &Bba, m2: &Bba) -> Result<Bba> {
    match rule {
        FusionRule::Dempster => dempster(m1, m2),
        FusionRule::Pcr5 => pcr5(m1, m2),
    }
}

/// Left fold of an observation stream in arrival order. Rule errors carry
/// the index of the failing step.
pub fn fold<'a, I>(rule: FusionRule, prior: &Bba, observations: I) -> Result<Bba>
where
    I: IntoIterator<Item = &'a Bba>,
{
    let mut acc = prior.clone();
    for (index, obs) in observations.into_iter().enumerate() {
        acc = combine(rule, &acc, obs).map_err(|e| Error::FusionStep {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(acc)
}
