//! Weak compositions, the reverse-reachable set, and rotation classes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::config::{check_cycle_size, CycleConfig};
use crate::error::{Result, SandpileError};

/// `C(n, k)`, or `None` if the result does not fit in a `u64`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    u64::try_from(acc).ok()
}

/// All ways of writing `k` as an ordered sum of `n` non-negative parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositionSpace {
    k: u32,
    n: usize,
}

impl CompositionSpace {
    pub fn new(k: u32, n: usize) -> Result<Self> {
        check_cycle_size(n)?;
        Ok(CompositionSpace { k, n })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(k + n - 1, n - 1)`.
    pub fn count(&self) -> u64 {
        binomial(u64::from(self.k) + self.n as u64 - 1, self.n as u64 - 1)
            .expect("composition count overflows u64")
    }

    pub fn iter(&self) -> WeakCompositions {
        WeakCompositions::with_prefix(self.n, vec![], self.k)
    }

    /// Splits the stream by the count at vertex 1, in stream order
    /// (`k` first). Concatenating the parts reproduces [`iter`](Self::iter).
    pub fn by_leading_count(&self) -> Vec<WeakCompositions> {
        (0..=self.k)
            .rev()
            .map(|first| WeakCompositions::with_prefix(self.n, vec![first], self.k - first))
            .collect()
    }
}

impl IntoIterator for CompositionSpace {
    type Item = CycleConfig;
    type IntoIter = WeakCompositions;

    fn into_iter(self) -> WeakCompositions {
        self.iter()
    }
}

/// Lexicographically descending stream of weak compositions, starting at
/// `[k, 0, ..., 0]` and ending at `[0, ..., 0, k]`.
#[derive(Debug, Clone)]
pub struct WeakCompositions {
    current: Option<Vec<u32>>,
    /// Positions before this index are held fixed.
    fixed: usize,
}

impl WeakCompositions {
    fn with_prefix(n: usize, mut prefix: Vec<u32>, rest: u32) -> Self {
        let fixed = prefix.len();
        debug_assert!(fixed < n);
        prefix.push(rest);
        prefix.resize(n, 0);
        WeakCompositions {
            current: Some(prefix),
            fixed,
        }
    }

    fn advance(counts: &mut [u32], fixed: usize) -> bool {
        let n = counts.len();
        // rightmost non-last free position that can give a chip away
        let Some(j) = (fixed..n - 1).rev().find(|&j| counts[j] > 0) else {
            return false;
        };
        counts[j] -= 1;
        let tail: u32 = counts[j + 1..].iter().sum::<u32>() + 1;
        counts[j + 1] = tail;
        counts[j + 2..].iter_mut().for_each(|c| *c = 0);
        true
    }
}

impl Iterator for WeakCompositions {
    type Item = CycleConfig;

    fn next(&mut self) -> Option<CycleConfig> {
        let counts = self.current.take()?;
        let mut successor = counts.clone();
        if Self::advance(&mut successor, self.fixed) {
            self.current = Some(successor);
        }
        Some(CycleConfig::from_vec_unchecked(counts))
    }
}

/// Every length-`n` configuration holding `k` chips, in lexicographically
/// descending order.
pub fn weak_compositions(k: u32, n: usize) -> Result<WeakCompositions> {
    Ok(CompositionSpace::new(k, n)?.iter())
}

/// Configurations reachable from the all-ones state by reverse firing,
/// with the minimal number of reverse moves needed to reach each one.
#[derive(Debug, Clone)]
pub struct SuccessfulSet {
    n: usize,
    depths: HashMap<CycleConfig, u32>,
    bfs_order: Vec<CycleConfig>,
}

impl SuccessfulSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bfs_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bfs_order.is_empty()
    }

    pub fn contains(&self, config: &CycleConfig) -> bool {
        self.depths.contains_key(config)
    }

    pub fn depth(&self, config: &CycleConfig) -> Option<u32> {
        self.depths.get(config).copied()
    }

    pub fn max_depth(&self) -> u32 {
        self.bfs_order.last().map(|c| self.depths[c]).unwrap_or(0)
    }

    /// Members in discovery order (non-decreasing depth).
    pub fn bfs_order(&self) -> &[CycleConfig] {
        &self.bfs_order
    }

    /// Members in the same lexicographically descending order as
    /// [`weak_compositions`].
    pub fn members_sorted(&self) -> Vec<CycleConfig> {
        let mut members = self.bfs_order.clone();
        members.sort_unstable_by(|a, b| b.cmp(a));
        members
    }
}

/// Breadth-first closure of the all-ones configuration under reverse firing,
/// trying vertices in ascending order.
pub fn reverse_bfs_successful(n: usize) -> Result<SuccessfulSet> {
    let start = CycleConfig::terminal(n)?;
    let mut depths = HashMap::from([(start.clone(), 0u32)]);
    let mut bfs_order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);

    while let Some(current) = queue.pop_front() {
        let depth = depths[&current];
        for vertex in 1..=n {
            let Ok(prev) = current.reverse_fire(vertex) else {
                continue;
            };
            if depths.contains_key(&prev) {
                continue;
            }
            depths.insert(prev.clone(), depth + 1);
            bfs_order.push(prev.clone());
            queue.push_back(prev);
        }
    }
    Ok(SuccessfulSet {
        n,
        depths,
        bfs_order,
    })
}

/// Lexicographically smallest of the `n` rotations.
pub fn canonical_rotation(config: &CycleConfig) -> CycleConfig {
    let counts = config.counts();
    let n = counts.len();
    let best = (1..n).fold(0usize, |best, s| {
        let candidate = counts[s..].iter().chain(&counts[..s]);
        let current = counts[best..].iter().chain(&counts[..best]);
        if candidate.lt(current) {
            s
        } else {
            best
        }
    });
    let mut out = counts.to_vec();
    out.rotate_left(best);
    CycleConfig::from_vec_unchecked(out)
}

/// A rotation-equivalence class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationClass {
    pub representative: CycleConfig,
    /// Distinct members, ascending.
    pub members: Vec<CycleConfig>,
}

/// Groups configurations by [`canonical_rotation`]. Classes are ordered by
/// representative; duplicates in the input are ignored.
pub fn cyclic_classes<'a, I>(configs: I) -> Result<Vec<RotationClass>>
where
    I: IntoIterator<Item = &'a CycleConfig>,
{
    let mut groups: BTreeMap<CycleConfig, BTreeSet<CycleConfig>> = BTreeMap::new();
    let mut expected_n = None;
    for config in configs {
        match expected_n {
            None => expected_n = Some(config.n()),
            Some(expected) if expected != config.n() => {
                return Err(SandpileError::MixedCycleSizes {
                    expected,
                    found: config.n(),
                });
            }
            Some(_) => {}
        }
        groups
            .entry(canonical_rotation(config))
            .or_default()
            .insert(config.clone());
    }
    Ok(groups
        .into_iter()
        .map(|(representative, members)| RotationClass {
            representative,
            members: members.into_iter().collect(),
        })
        .collect())
}
