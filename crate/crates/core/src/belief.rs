//! Basic belief assignments and their derived functions.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::propositions::{check_same_frame, Frame, Proposition};
use crate::Result;

/// Focal elements with smaller mass are pruned and the assignment
/// renormalized. The floor only guards against subnormal drift; it is kept
/// far below any mass the sequential tracker legitimately produces, because
/// Dempster's slow recovery after a type switch lives in the tiny-mass tail.
pub const MASS_FLOOR: f64 = 1e-300;

/// Accepted deviation of user-supplied masses from a total of 1.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-6;

/// A normalized basic belief assignment over the power set of a frame.
///
/// Only focal elements (non-empty propositions with positive mass) are
/// stored; `m(∅) = 0` holds by construction. Values are immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct Bba {
    frame: Frame,
    masses: BTreeMap<Proposition, f64>,
}

impl Bba {
    /// Build a BBA from explicit assignments. Duplicate propositions are
    /// merged by summation; masses must be non-negative and total 1 within
    /// [`INPUT_SUM_TOLERANCE`] before exact renormalization.
    pub fn new<I>(frame: &Frame, assignments: I) -> Result<Bba>
    where
        I: IntoIterator<Item = (Proposition, f64)>,
    {
        let mut masses: BTreeMap<Proposition, f64> = BTreeMap::new();
        for (prop, mass) in assignments {
            check_same_frame(frame, prop.frame())?;
            if prop.is_empty() {
                return Err(Error::EmptyFocal);
            }
            if mass < 0.0 || !mass.is_finite() {
                return Err(Error::NegativeMass {
                    proposition: prop.to_string(),
                    mass,
                });
            }
            *masses.entry(prop).or_insert(0.0) += mass;
        }
        let sum: f64 = masses.values().sum();
        if (sum - 1.0).abs() > INPUT_SUM_TOLERANCE {
            return Err(Error::MassSum {
                sum,
                tolerance: INPUT_SUM_TOLERANCE,
            });
        }
        Ok(Self::renormalized(frame.clone(), masses))
    }

    /// Total ignorance: all mass on θ1 ∪ … ∪ θM.
    pub fn vacuous(frame: &Frame) -> Bba {
        let mut masses = BTreeMap::new();
        masses.insert(frame.full_set(), 1.0);
        Bba {
            frame: frame.clone(),
            masses,
        }
    }

    /// Prune sub-floor masses and renormalize to an exact machine sum.
    /// The caller guarantees non-negative masses with a positive total.
    pub(crate) fn renormalized(frame: Frame, masses: BTreeMap<Proposition, f64>) -> Bba {
        let mut kept: BTreeMap<Proposition, f64> = masses
            .into_iter()
            .filter(|(p, m)| !p.is_empty() && *m >= MASS_FLOOR)
            .collect();
        let sum: f64 = kept.values().sum();
        debug_assert!(sum > 0.0, "renormalized() needs positive surviving mass");
        for m in kept.values_mut() {
            *m /= sum;
        }
        Bba {
            frame,
            masses: kept,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Focal elements in canonical (bit-set) order.
    pub fn focal(&self) -> impl Iterator<Item = (&Proposition, f64)> {
        self.masses.iter().map(|(p, &m)| (p, m))
    }

    pub fn focal_count(&self) -> usize {
        self.masses.len()
    }

    /// Mass of a proposition (0 for non-focal ones).
    pub fn mass(&self, prop: &Proposition) -> f64 {
        self.masses.get(prop).copied().unwrap_or(0.0)
    }

    /// Bel(x) = Σ m(Y) over focal Y ⊆ x.
    pub fn belief(&self, x: &Proposition) -> Result<f64> {
        check_same_frame(&self.frame, x.frame())?;
        if x.is_empty() {
            return Ok(0.0);
        }
        Ok(self
            .masses
            .iter()
            .filter(|(p, _)| p.bits() & !x.bits() == 0)
            .map(|(_, &m)| m)
            .sum())
    }

    /// Pl(x) = Σ m(Y) over focal Y with Y ∩ x ≠ ∅.
    pub fn plausibility(&self, x: &Proposition) -> Result<f64> {
        check_same_frame(&self.frame, x.frame())?;
        if x.is_empty() {
            return Ok(0.0);
        }
        Ok(self
            .masses
            .iter()
            .filter(|(p, _)| p.bits() & x.bits() != 0)
            .map(|(_, &m)| m)
            .sum())
    }

    /// Pignistic probability over the singletons: each focal mass is split
    /// equally among its members.
    pub fn pignistic(&self) -> Vec<f64> {
        let mut betp = vec![0.0; self.frame.size()];
        for (prop, &mass) in &self.masses {
            let share = mass / prop.cardinality() as f64;
            for i in prop.members() {
                betp[i] += share;
            }
        }
        betp
    }

    /// Classical reliability discounting: m'(X) = α·m(X) for X ≠ Θ and the
    /// stripped mass 1−α moved onto total ignorance.
    pub fn discount(&self, alpha: f64) -> Result<Bba> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::InvalidReliability(alpha));
        }
        let theta = self.frame.full_set();
        let mut masses: BTreeMap<Proposition, f64> = BTreeMap::new();
        for (prop, &mass) in &self.masses {
            masses.insert(prop.clone(), alpha * mass);
        }
        *masses.entry(theta).or_insert(0.0) += 1.0 - alpha;
        Ok(Self::renormalized(self.frame.clone(), masses))
    }

    /// One focal element per line: `proposition<TAB>mass`, 17 significant
    /// digits, propositions in the "|" grammar.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (prop, &mass) in &self.masses {
            out.push_str(&format!("{prop}\t{mass:.16e}\n"));
        }
        out
    }

    pub fn from_text(frame: &Frame, text: &str) -> Result<Bba> {
        let mut assignments = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prop_text, mass_text) = line.split_once('\t').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `proposition<TAB>mass`", lineno + 1))
            })?;
            let prop = frame.parse_proposition(prop_text)?;
            let mass: f64 = mass_text.trim().parse().map_err(|e| {
                Error::Parse(format!("line {}: bad mass {mass_text:?}: {e}", lineno + 1))
            })?;
            assignments.push((prop, mass));
        }
        Bba::new(frame, assignments)
    }
}

impl fmt::Display for Bba {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (prop, &mass) in &self.masses {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "m({prop})={mass:.6}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc() -> Frame {
        Frame::new(["Fighter", "Cargo"]).unwrap()
    }

    #[test]
    fn make_bba_valid_and_invalid() {
        let frame = fc();
        let f = frame.singleton(0);
        let theta = frame.full_set();
        let bba = Bba::new(&frame, [(f.clone(), 0.95), (theta.clone(), 0.05)]).unwrap();
        assert_eq!(bba.focal_count(), 2);
        assert!((bba.mass(&f) - 0.95).abs() < 1e-15);

        let c = frame.singleton(1);
        assert!(matches!(
            Bba::new(&frame, [(f.clone(), 0.5), (c, 0.6)]),
            Err(Error::MassSum { .. })
        ));
        assert!(matches!(
            Bba::new(&frame, [(f.clone(), -0.1), (theta.clone(), 1.1)]),
            Err(Error::NegativeMass { .. })
        ));
        assert!(matches!(
            Bba::new(&frame, [(frame.empty_set(), 0.0), (theta, 1.0)]),
            Err(Error::EmptyFocal)
        ));

        let certain = Bba::new(&frame, [(f.clone(), 1.0)]).unwrap();
        assert_eq!(certain.focal_count(), 1);
        assert_eq!(certain.mass(&f), 1.0);
    }

    #[test]
    fn duplicates_merge_by_summation() {
        let frame = fc();
        let f = frame.singleton(0);
        let bba = Bba::new(&frame, [(f.clone(), 0.4), (f.clone(), 0.6)]).unwrap();
        assert_eq!(bba.focal_count(), 1);
        assert_eq!(bba.mass(&f), 1.0);
    }

    #[test]
    fn vacuous_has_single_ignorance_focal() {
        let frame = Frame::new(["Friend", "Foe", "Neutral"]).unwrap();
        let v = Bba::vacuous(&frame);
        assert_eq!(v.mass(&frame.full_set()), 1.0);
        assert_eq!(v.belief(&frame.singleton(0)).unwrap(), 0.0);
        assert_eq!(v.plausibility(&frame.singleton(0)).unwrap(), 1.0);
    }

    #[test]
    fn belief_plausibility_hand_case() {
        let frame = fc();
        let f = frame.singleton(0);
        let bba = Bba::new(&frame, [(f.clone(), 0.6), (frame.full_set(), 0.4)]).unwrap();
        assert!((bba.belief(&f).unwrap() - 0.6).abs() < 1e-15);
        assert!((bba.plausibility(&f).unwrap() - 1.0).abs() < 1e-15);
        assert!((bba.belief(&frame.full_set()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(bba.belief(&frame.empty_set()).unwrap(), 0.0);
    }

    #[test]
    fn belief_rejects_foreign_frames() {
        let bba = Bba::vacuous(&fc());
        let other = Frame::new(["X", "Y"]).unwrap();
        assert!(bba.belief(&other.singleton(0)).is_err());
    }

    #[test]
    fn pignistic_hand_cases() {
        let frame = fc();
        let f = frame.singleton(0);
        let bba = Bba::new(&frame, [(f.clone(), 0.6), (frame.full_set(), 0.4)]).unwrap();
        let betp = bba.pignistic();
        assert!((betp[0] - 0.8).abs() < 1e-12);
        assert!((betp[1] - 0.2).abs() < 1e-12);

        let certain = Bba::new(&frame, [(f, 1.0)]).unwrap();
        assert_eq!(certain.pignistic(), vec![1.0, 0.0]);

        let betp = Bba::vacuous(&frame).pignistic();
        assert_eq!(betp, vec![0.5, 0.5]);
    }

    #[test]
    fn discount_hand_cases() {
        let frame = fc();
        let f = frame.singleton(0);
        let bba = Bba::new(&frame, [(f.clone(), 0.95), (frame.full_set(), 0.05)]).unwrap();

        let same = bba.discount(1.0).unwrap();
        assert!((same.mass(&f) - 0.95).abs() < 1e-15);

        let vac = bba.discount(0.0).unwrap();
        assert_eq!(vac, Bba::vacuous(&frame));

        let d = bba.discount(0.9).unwrap();
        assert!((d.mass(&f) - 0.855).abs() < 1e-12);
        assert!((d.mass(&frame.full_set()) - 0.145).abs() < 1e-12);

        assert!(bba.discount(1.5).is_err());
        assert!(bba.discount(-0.1).is_err());
    }

    #[test]
    fn discount_composes_multiplicatively() {
        let frame = fc();
        let bba = Bba::new(&frame, [(frame.singleton(0), 0.7), (frame.full_set(), 0.3)]).unwrap();
        let twice = bba.discount(0.8).unwrap().discount(0.5).unwrap();
        let once = bba.discount(0.4).unwrap();
        for (p, m) in once.focal() {
            assert!((twice.mass(p) - m).abs() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        let frame = fc();
        let bba = Bba::new(
            &frame,
            [
                (frame.singleton(0), 1.0 / 3.0),
                (frame.singleton(1), 0.25),
                (frame.full_set(), 1.0 - 0.25 - 1.0 / 3.0),
            ],
        )
        .unwrap();
        let text = bba.to_text();
        let back = Bba::from_text(&frame, &text).unwrap();
        for (p, m) in bba.focal() {
            assert_eq!(back.mass(p), m, "17-significant-digit round trip");
        }
    }
}
