//! Shared test oracles, kept independent of the library's fusion path:
//! everything here works on dense mass vectors indexed by subset bits and
//! enumerates pairs explicitly.
#![allow(dead_code)] // each test target uses a different subset

use belief_fusion::propositions::Frame;
use belief_fusion::Bba;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense mass vector over all 2^M subsets (index = subset bits).
pub fn dense_masses(bba: &Bba) -> Vec<f64> {
    let frame = bba.frame();
    let size = 1usize << frame.size();
    let mut out = vec![0.0; size];
    for (prop, mass) in bba.focal() {
        out[prop.bits() as usize] = mass;
    }
    out
}

/// Brute-force conjunctive consensus: m12[x] over every subset pair.
pub fn conjunctive_oracle(m1: &[f64], m2: &[f64]) -> Vec<f64> {
    let size = m1.len();
    let mut out = vec![0.0; size];
    for x1 in 0..size {
        for x2 in 0..size {
            out[x1 & x2] += m1[x1] * m2[x2];
        }
    }
    out
}

/// Dempster closed form: conjunctive then normalize by 1 - k12.
pub fn dempster_oracle(m1: &[f64], m2: &[f64]) -> Option<Vec<f64>> {
    let mut conj = conjunctive_oracle(m1, m2);
    let k12 = conj[0];
    if 1.0 - k12 <= 1e-12 {
        return None;
    }
    conj[0] = 0.0;
    Some(conj.iter().map(|&m| m / (1.0 - k12)).collect())
}

/// Term-by-term PCR5 evaluation: for every non-empty X, the conjunctive
/// mass plus, over every Y ≠ X with X ∩ Y = ∅, the two proportional
/// conflict fractions; zero denominators are discarded.
pub fn pcr5_oracle(m1: &[f64], m2: &[f64]) -> Vec<f64> {
    let size = m1.len();
    let conj = conjunctive_oracle(m1, m2);
    let mut out = vec![0.0; size];
    for x in 1..size {
        let mut mass = conj[x];
        for y in 0..size {
            if y == x || x & y != 0 {
                continue;
            }
            let d1 = m1[x] + m2[y];
            if d1 >= 1e-15 {
                mass += m1[x] * m1[x] * m2[y] / d1;
            }
            let d2 = m2[x] + m1[y];
            if d2 >= 1e-15 {
                mass += m2[x] * m2[x] * m1[y] / d2;
            }
        }
        out[x] = mass;
    }
    out
}

pub fn total_conflict_oracle(m1: &[f64], m2: &[f64]) -> f64 {
    conjunctive_oracle(m1, m2)[0]
}

/// Seeded random BBA: each non-empty subset becomes focal with probability
/// 1/2 (at least one guaranteed), masses uniform then normalized.
pub fn random_bba<R: Rng>(frame: &Frame, rng: &mut R) -> Bba {
    let size = 1u32 << frame.size();
    loop {
        let mut assignments = Vec::new();
        let mut total = 0.0;
        for bits in 1..size {
            if rng.random::<f64>() < 0.5 {
                let mass: f64 = rng.random();
                total += mass;
                let members = (0..frame.size()).filter(|i| bits & (1 << i) != 0);
                assignments.push((frame.proposition(members).unwrap(), mass));
            }
        }
        if assignments.is_empty() || total < 1e-3 {
            continue;
        }
        let assignments: Vec<_> = assignments
            .into_iter()
            .map(|(p, m)| (p, m / total))
            .collect();
        return Bba::new(frame, assignments).unwrap();
    }
}

/// The seeded corpus used by the oracle-equivalence checks: `count` random
/// BBA pairs alternating between frames of 2 and 3 singletons.
pub fn random_corpus(count: usize, seed: u64) -> Vec<(Bba, Bba)> {
    let frame2 = Frame::new(["A", "B"]).unwrap();
    let frame3 = Frame::new(["A", "B", "C"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let frame = if i % 2 == 0 { &frame2 } else { &frame3 };
            (random_bba(frame, &mut rng), random_bba(frame, &mut rng))
        })
        .collect()
}

/// Count monotone Boolean functions on `m` variables with f(∅) = 0 by raw
/// truth-table enumeration; this equals |D^Θ| for a frame of `m` singletons.
pub fn monotone_function_count(m: usize) -> usize {
    assert!(m <= 4, "truth-table oracle is exponential");
    let points = 1usize << m;
    let tables = 1u64 << points;
    let mut count = 0usize;
    for f in 0..tables {
        if f & 1 != 0 {
            continue; // f(∅) must be 0
        }
        let mut monotone = true;
        'outer: for a in 0..points {
            for b in 0..points {
                if a & b == a && (f >> a) & 1 > (f >> b) & 1 {
                    monotone = false;
                    break 'outer;
                }
            }
        }
        if monotone {
            count += 1;
        }
    }
    count
}
