//! Independent brute-force oracles for the derived counts.
//!
//! Nothing here goes through the crate's enumeration or stabilization code:
//! compositions come from a full `[0, k]^n` odometer and runs use a naive
//! simulator on plain vectors.

use std::collections::{BTreeMap, HashSet};

use sandpile_core::{
    canonical_rotation, cross_check, residue_histogram, reverse_bfs_successful, weak_compositions,
    CycleConfig, FiringPolicy, DEFAULT_STATE_BUDGET,
};

fn odometer_compositions(k: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut digits = vec![0u32; n];
    loop {
        if digits.iter().sum::<u32>() == k {
            out.push(digits.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if digits[i] < k {
                digits[i] += 1;
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn brute_residue(counts: &[u32]) -> u32 {
    let n = counts.len() as u32;
    counts.iter().zip(1u32..).map(|(&c, i)| i * c).sum::<u32>() % n
}

/// Fires the highest-count vertex first (ties: rightmost) until stable or a
/// state repeats; returns the number of firings when it terminates.
fn naive_terminates(start: &[u32]) -> Option<u32> {
    let n = start.len();
    let mut state = start.to_vec();
    let mut seen = HashSet::new();
    let mut firings = 0;
    loop {
        if state.iter().all(|&c| c < 2) {
            return Some(firings);
        }
        if !seen.insert(state.clone()) {
            return None;
        }
        let (i, _) = state
            .iter()
            .enumerate()
            .max_by_key(|&(i, &c)| (c, i))
            .unwrap();
        state[i] -= 2;
        state[(i + 1) % n] += 1;
        state[(i + n - 1) % n] += 1;
        firings += 1;
    }
}

fn brute_histogram(k: u32, n: usize) -> BTreeMap<u32, u64> {
    let mut h = BTreeMap::new();
    for c in odometer_compositions(k, n) {
        *h.entry(brute_residue(&c)).or_insert(0) += 1;
    }
    h
}

#[test]
fn oracle_reproduces_frozen_counts() {
    // frozen from the oracle before being used elsewhere
    assert_eq!(
        brute_histogram(3, 3),
        BTreeMap::from([(0, 4), (1, 3), (2, 3)])
    );
    assert_eq!(
        brute_histogram(4, 4),
        BTreeMap::from([(0, 10), (1, 8), (2, 9), (3, 8)])
    );
    assert_eq!(brute_histogram(0, 4), BTreeMap::from([(0, 1)]));
    let successes = |n: usize| {
        odometer_compositions(n as u32, n)
            .iter()
            .filter(|c| naive_terminates(c).is_some())
            .count()
    };
    assert_eq!(successes(3), 4);
    assert_eq!(successes(4), 9);
    assert_eq!(successes(5), 26);
    assert_eq!(successes(6), 76);
}

#[test]
fn enumeration_matches_odometer() {
    for n in 3..=6 {
        for k in 0..=6 {
            let mut expected = odometer_compositions(k, n);
            expected.sort_unstable_by(|a, b| b.cmp(a));
            let got: Vec<Vec<u32>> = weak_compositions(k, n)
                .unwrap()
                .map(CycleConfig::into_counts)
                .collect();
            assert_eq!(got, expected, "k={k} n={n}");
        }
    }
}

#[test]
fn histograms_match_oracle() {
    for n in 3..=6 {
        for k in 0..=7 {
            let got: BTreeMap<u32, u64> = residue_histogram(n, k)
                .unwrap()
                .into_iter()
                .map(|(r, c)| (r.value(), c))
                .collect();
            assert_eq!(got, brute_histogram(k, n), "n={n} k={k}");
        }
    }
}

#[test]
fn cross_check_matches_oracle() {
    for n in 3..=6 {
        let report = cross_check(n, FiringPolicy::LowestIndex, DEFAULT_STATE_BUDGET).unwrap();
        let naive: Vec<_> = odometer_compositions(n as u32, n)
            .into_iter()
            .filter_map(|c| naive_terminates(&c).map(|d| (c, d)))
            .collect();
        assert_eq!(report.successful_count, naive.len() as u64);
        let set = reverse_bfs_successful(n).unwrap();
        assert_eq!(set.len(), naive.len());
        for (counts, firings) in naive {
            let c = CycleConfig::new(counts).unwrap();
            assert_eq!(set.depth(&c), Some(firings), "{c}");
        }
    }
}

#[test]
fn canonical_rotation_matches_exhaustive_scan() {
    for counts in odometer_compositions(4, 4)
        .into_iter()
        .chain(odometer_compositions(5, 5))
    {
        let n = counts.len();
        let best = (0..n)
            .map(|s| {
                let mut r = counts.clone();
                r.rotate_left(s);
                r
            })
            .min()
            .unwrap();
        let c = CycleConfig::new(counts).unwrap();
        assert_eq!(canonical_rotation(&c).into_counts(), best);
    }
}

#[test]
fn rotation_by_hand() {
    // [0,3,0,1] shifted by two: vertex i's chips land on vertex i+2
    let c = CycleConfig::new(vec![0, 3, 0, 1]).unwrap();
    let mut manual = vec![0u32; 4];
    for (i, &v) in c.counts().iter().enumerate() {
        manual[(i + 2) % 4] = v;
    }
    assert_eq!(manual, vec![0, 1, 0, 3]);
    assert_eq!(c.rotate(2).into_counts(), manual);
}
