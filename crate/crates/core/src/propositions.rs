//! Frames of discernment and proposition algebra.
//!
//! Two proposition families are supported: classical power-set elements
//! ([`Proposition`], bit-sets over singleton indices) and Dedekind-lattice
//! elements ([`HyperProposition`], canonical antichains of intersection
//! terms). The lattice path is capped at [`MAX_HYPER_FRAME`] singletons so
//! every operation stays exactly enumerable.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::Error;
use crate::Result;

/// Largest frame size for which hyper-power-set operations are offered.
pub const MAX_HYPER_FRAME: usize = 4;

#[derive(Debug)]
struct FrameInner {
    labels: Vec<String>,
}

/// Ordered set of exhaustive, exclusive singleton type labels.
///
/// Cloning is cheap; two frames compare equal when their label lists match.
#[derive(Debug, Clone)]
pub struct Frame {
    inner: Arc<FrameInner>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if labels.len() > 32 {
            return Err(Error::Parse(format!(
                "frame of {} labels exceeds the 32-singleton bit-set limit",
                labels.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for (i, label) in labels.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(Error::BlankLabel(i));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Frame {
            inner: Arc::new(FrameInner { labels }),
        })
    }

    pub fn size(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.labels.iter().position(|l| l == label)
    }

    /// Singleton proposition {θi}.
    pub fn singleton(&self, index: usize) -> Proposition {
        debug_assert!(index < self.size());
        Proposition {
            frame: self.clone(),
            bits: 1 << index,
        }
    }

    /// The total ignorance proposition θ1 ∪ … ∪ θM.
    pub fn full_set(&self) -> Proposition {
        Proposition {
            frame: self.clone(),
            bits: self.full_bits(),
        }
    }

    pub fn empty_set(&self) -> Proposition {
        Proposition {
            frame: self.clone(),
            bits: 0,
        }
    }

    pub fn proposition<I: IntoIterator<Item = usize>>(&self, members: I) -> Result<Proposition> {
        let mut bits = 0u32;
        for i in members {
            if i >= self.size() {
                return Err(Error::BadDeclaration {
                    index: i,
                    size: self.size(),
                });
            }
            bits |= 1 << i;
        }
        Ok(Proposition {
            frame: self.clone(),
            bits,
        })
    }

    pub(crate) fn proposition_from_bits(&self, bits: u32) -> Proposition {
        debug_assert_eq!(bits & !self.full_bits(), 0);
        Proposition {
            frame: self.clone(),
            bits,
        }
    }

    pub(crate) fn full_bits(&self) -> u32 {
        if self.size() == 32 {
            u32::MAX
        } else {
            (1u32 << self.size()) - 1
        }
    }

    /// Parse the "|"-joined label grammar, e.g. `"Fighter|Cargo"`.
    pub fn parse_proposition(&self, text: &str) -> Result<Proposition> {
        let text = text.trim();
        if text.is_empty() || text == "∅" {
            return Ok(self.empty_set());
        }
        let mut bits = 0u32;
        for part in text.split('|') {
            let label = part.trim();
            let idx = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            bits |= 1 << idx;
        }
        Ok(Proposition {
            frame: self.clone(),
            bits,
        })
    }

    fn same_as(&self, other: &Frame) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for Frame {}

impl Hash for Frame {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.labels.hash(state);
    }
}

impl PartialOrd for Frame {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frame {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            Ordering::Equal
        } else {
            self.inner.labels.cmp(&other.inner.labels)
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner.labels.join("|"))
    }
}

pub(crate) fn check_same_frame(left: &Frame, right: &Frame) -> Result<()> {
    if left.same_as(right) {
        Ok(())
    } else {
        Err(Error::FrameMismatch {
            left: left.to_string(),
            right: right.to_string(),
        })
    }
}

/// A power-set element: subset of the frame's singletons, stored as a bit-set.
#[derive(Debug, Clone)]
pub struct Proposition {
    frame: Frame,
    bits: u32,
}

impl Proposition {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn union(&self, other: &Proposition) -> Result<Proposition> {
        check_same_frame(&self.frame, &other.frame)?;
        Ok(self.frame.proposition_from_bits(self.bits | other.bits))
    }

    pub fn intersection(&self, other: &Proposition) -> Result<Proposition> {
        check_same_frame(&self.frame, &other.frame)?;
        Ok(self.frame.proposition_from_bits(self.bits & other.bits))
    }

    pub fn complement(&self) -> Proposition {
        self.frame
            .proposition_from_bits(!self.bits & self.frame.full_bits())
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_singleton(&self) -> bool {
        self.bits.count_ones() == 1
    }

    pub fn cardinality(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// The singleton index when this proposition holds exactly one element.
    pub fn singleton_index(&self) -> Option<usize> {
        if self.is_singleton() {
            Some(self.bits.trailing_zeros() as usize)
        } else {
            None
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.frame.size() && self.bits & (1 << index) != 0
    }

    pub fn is_subset_of(&self, other: &Proposition) -> Result<bool> {
        check_same_frame(&self.frame, &other.frame)?;
        Ok(self.bits & !other.bits == 0)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.frame.size()).filter(move |i| self.bits & (1 << i) != 0)
    }
}

impl PartialEq for Proposition {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.frame == other.frame
    }
}

impl Eq for Proposition {}

impl Hash for Proposition {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
        self.frame.hash(state);
    }
}

impl PartialOrd for Proposition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Proposition {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.frame == other.frame {
            self.bits.cmp(&other.bits)
        } else {
            self.frame
                .labels()
                .cmp(other.frame.labels())
                .then(self.bits.cmp(&other.bits))
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let mut first = true;
        for i in self.members() {
            if !first {
                write!(f, "|")?;
            }
            write!(f, "{}", self.frame.label(i))?;
            first = false;
        }
        Ok(())
    }
}

/// Pairwise singleton exclusivity constraints (θi ∩ θj = ∅).
///
/// The free model carries no constraints; Shafer's model carries all pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Exclusivity {
    pairs: BTreeSet<(usize, usize)>,
}

impl Exclusivity {
    /// Free DSm model: no exclusivity at all.
    pub fn free() -> Self {
        Self::default()
    }

    /// Shafer's model: every pair of distinct singletons is exclusive.
    pub fn shafer(frame: &Frame) -> Self {
        let mut pairs = BTreeSet::new();
        for i in 0..frame.size() {
            for j in i + 1..frame.size() {
                pairs.insert((i, j));
            }
        }
        Exclusivity { pairs }
    }

    pub fn with_pair(mut self, i: usize, j: usize) -> Self {
        if i != j {
            self.pairs.insert((i.min(j), i.max(j)));
        }
        self
    }

    /// True when an intersection term over the given singleton bits is
    /// contradicted by some constraint.
    pub fn contradicts(&self, term_bits: u32) -> bool {
        self.pairs
            .iter()
            .any(|&(i, j)| term_bits & (1 << i) != 0 && term_bits & (1 << j) != 0)
    }
}

/// A hyper-power-set (Dedekind lattice) element in canonical form:
/// a union of intersection terms stored as a minimal antichain.
///
/// Each term is a bit-set of singleton indices and denotes the intersection
/// of those singletons; the element is the union over its terms. An empty
/// term list is the distinguished ∅ value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperProposition {
    frame: Frame,
    terms: Vec<u16>,
}

fn check_hyper_capacity(frame: &Frame) -> Result<()> {
    if frame.size() > MAX_HYPER_FRAME {
        Err(Error::HyperCapacity {
            size: frame.size(),
            max: MAX_HYPER_FRAME,
        })
    } else {
        Ok(())
    }
}

/// Keep only the minimal terms under subset order: in a union of
/// intersections, any term that contains another term is absorbed by it.
fn canonicalize(mut terms: Vec<u16>) -> Vec<u16> {
    terms.sort_unstable();
    terms.dedup();
    let minimal: Vec<u16> = terms
        .iter()
        .copied()
        .filter(|&t| !terms.iter().any(|&s| s != t && s & t == s))
        .collect();
    let mut out = minimal;
    out.sort_unstable_by_key(|t| (t.count_ones(), *t));
    out
}

impl HyperProposition {
    /// The distinguished empty element.
    pub fn empty(frame: &Frame) -> Result<Self> {
        check_hyper_capacity(frame)?;
        Ok(HyperProposition {
            frame: frame.clone(),
            terms: Vec::new(),
        })
    }

    pub fn singleton(frame: &Frame, index: usize) -> Result<Self> {
        check_hyper_capacity(frame)?;
        if index >= frame.size() {
            return Err(Error::BadDeclaration {
                index,
                size: frame.size(),
            });
        }
        Ok(HyperProposition {
            frame: frame.clone(),
            terms: vec![1 << index],
        })
    }

    /// Build from explicit intersection terms, reducing to canonical form.
    pub fn from_terms<I, T>(frame: &Frame, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = usize>,
    {
        check_hyper_capacity(frame)?;
        let mut bits_terms = Vec::new();
        for term in terms {
            let mut bits = 0u16;
            for i in term {
                if i >= frame.size() {
                    return Err(Error::BadDeclaration {
                        index: i,
                        size: frame.size(),
                    });
                }
                bits |= 1 << i;
            }
            if bits == 0 {
                return Err(Error::Parse("empty intersection term".to_string()));
            }
            bits_terms.push(bits);
        }
        Ok(HyperProposition {
            frame: frame.clone(),
            terms: canonicalize(bits_terms),
        })
    }

    /// Lift a power-set proposition (union of singletons) into the lattice.
    pub fn from_proposition(prop: &Proposition) -> Result<Self> {
        check_hyper_capacity(prop.frame())?;
        let terms = prop.members().map(|i| 1u16 << i).collect();
        Ok(HyperProposition {
            frame: prop.frame().clone(),
            terms: canonicalize(terms),
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical antichain of intersection terms, each a singleton bit-set.
    pub fn terms(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.terms.iter().map(move |&t| {
            (0..self.frame.size())
                .filter(|i| t & (1 << i) != 0)
                .collect()
        })
    }

    /// Meet (∩) in the free model: distribute over the unions and reduce.
    pub fn meet(&self, other: &HyperProposition) -> Result<HyperProposition> {
        check_same_frame(&self.frame, &other.frame)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &a in &self.terms {
            for &b in &other.terms {
                terms.push(a | b);
            }
        }
        Ok(HyperProposition {
            frame: self.frame.clone(),
            terms: canonicalize(terms),
        })
    }

    /// Join (∪): merge the term sets and reduce.
    pub fn join(&self, other: &HyperProposition) -> Result<HyperProposition> {
        check_same_frame(&self.frame, &other.frame)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(HyperProposition {
            frame: self.frame.clone(),
            terms: canonicalize(terms),
        })
    }

    /// Drop terms contradicted by the given exclusivity constraints.
    /// Under all pairwise constraints this is the Shafer-model reduction.
    pub fn reduce(&self, constraints: &Exclusivity) -> HyperProposition {
        let terms: Vec<u16> = self
            .terms
            .iter()
            .copied()
            .filter(|&t| !constraints.contradicts(t as u32))
            .collect();
        HyperProposition {
            frame: self.frame.clone(),
            terms: canonicalize(terms),
        }
    }

    /// When every term is a plain singleton, the element is a power-set
    /// proposition; returns it, or `None` if a genuine intersection remains.
    pub fn as_proposition(&self) -> Option<Proposition> {
        let mut bits = 0u32;
        for &t in &self.terms {
            if t.count_ones() != 1 {
                return None;
            }
            bits |= t as u32;
        }
        Some(self.frame.proposition_from_bits(bits))
    }

    /// Free-model truth table: bit `a` (an assignment marking which
    /// singletons contain the point) is set iff some term is a subset of
    /// the assignment. Two elements are semantically equal iff their
    /// tables agree.
    pub fn truth_table(&self) -> u16 {
        let points = 1u32 << self.frame.size();
        let mut table = 0u16;
        for a in 0..points as u16 {
            if self.terms.iter().any(|&t| t & a == t) {
                table |= 1 << a;
            }
        }
        table
    }
}

impl fmt::Display for HyperProposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "∅");
        }
        for (ti, &t) in self.terms.iter().enumerate() {
            if ti > 0 {
                write!(f, "|")?;
            }
            let mut first = true;
            for i in 0..self.frame.size() {
                if t & (1 << i) != 0 {
                    if !first {
                        write!(f, "&")?;
                    }
                    write!(f, "{}", self.frame.label(i))?;
                    first = false;
                }
            }
        }
        Ok(())
    }
}

/// All distinct elements of D^Θ (including ∅), each in canonical form.
///
/// Enumerates the antichains of non-empty singleton subsets directly; the
/// empty antichain stands for ∅.
pub fn enumerate_hyper_power_set(frame: &Frame) -> Result<Vec<HyperProposition>> {
    check_hyper_capacity(frame)?;
    let m = frame.size();
    let subsets: Vec<u16> = (1..(1u16 << m)).collect();
    let n = subsets.len();
    let mut out = Vec::new();
    for pick in 0u32..(1u32 << n) {
        let chosen: Vec<u16> = (0..n)
            .filter(|&i| pick & (1 << i) != 0)
            .map(|i| subsets[i])
            .collect();
        let is_antichain = chosen
            .iter()
            .all(|&t| !chosen.iter().any(|&s| s != t && s & t == s));
        if is_antichain {
            out.push(HyperProposition {
                frame: frame.clone(),
                terms: canonicalize(chosen),
            });
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Parse the "|"/"&" grammar into a lattice element, e.g. `"A&B|C"`.
pub fn parse_hyper(frame: &Frame, text: &str) -> Result<HyperProposition> {
    let text = text.trim();
    if text.is_empty() || text == "∅" {
        return HyperProposition::empty(frame);
    }
    let mut terms: Vec<Vec<usize>> = Vec::new();
    for part in text.split('|') {
        let mut term = Vec::new();
        for label in part.split('&') {
            let label = label.trim();
            let idx = frame
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            term.push(idx);
        }
        terms.push(term);
    }
    HyperProposition::from_terms(frame, terms)
}
