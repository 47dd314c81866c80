//! Configurations on the cycle and the local moves between them.
//!
//! Vertices are numbered `1..=n` at every public boundary. Vertex 1 and
//! vertex `n` are neighbours.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SandpileError};

/// Smallest cycle on which firing has two distinct neighbours.
pub const MIN_CYCLE_SIZE: usize = 3;

pub(crate) fn check_cycle_size(n: usize) -> Result<()> {
    if n < MIN_CYCLE_SIZE {
        Err(SandpileError::UnsupportedCycleSize(n))
    } else {
        Ok(())
    }
}

/// Weighted position sum `(sum of i * counts[i]) mod n`, always in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Residue(u32);

impl Residue {
    pub fn value(self) -> u32 {
        self.0
    }

    /// Reduces `value` modulo `n`.
    pub fn new(value: u64, n: usize) -> Self {
        Residue((value % n as u64) as u32)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Chip counts on the vertices of a cycle of length `n >= 3`.
///
/// Values are immutable: every move returns a new configuration. The textual
/// form is the comma-separated counts, vertex 1 first, e.g. `0,3,0,1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleConfig {
    counts: Vec<u32>,
}

impl CycleConfig {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        check_cycle_size(counts.len())?;
        Ok(CycleConfig { counts })
    }

    /// Builds a configuration from signed input, rejecting negative entries.
    pub fn from_signed(counts: &[i64]) -> Result<Self> {
        check_cycle_size(counts.len())?;
        let counts = counts
            .iter()
            .enumerate()
            .map(|(i, &value)| {
                if value < 0 {
                    Err(SandpileError::NegativeCount {
                        vertex: i + 1,
                        value,
                    })
                } else {
                    u32::try_from(value).map_err(|_| SandpileError::CountOverflow {
                        vertex: i + 1,
                        value,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CycleConfig { counts })
    }

    /// Skips validation; callers guarantee `counts.len() >= 3`.
    pub(crate) fn from_vec_unchecked(counts: Vec<u32>) -> Self {
        debug_assert!(counts.len() >= MIN_CYCLE_SIZE);
        CycleConfig { counts }
    }

    /// The all-ones configuration, the unique stable state with `n` chips.
    pub fn terminal(n: usize) -> Result<Self> {
        check_cycle_size(n)?;
        Ok(CycleConfig { counts: vec![1; n] })
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.counts
    }

    /// Chip count at a 1-based vertex.
    pub fn get(&self, vertex: usize) -> Result<u32> {
        let idx = self.index_of(vertex)?;
        Ok(self.counts[idx])
    }

    pub fn total_chips(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn invariant(&self) -> Residue {
        let n = self.n() as u64;
        let sum = self.counts.iter().enumerate().fold(0u64, |acc, (i, &c)| {
            (acc + (i as u64 + 1) * (u64::from(c) % n)) % n
        });
        Residue::new(sum, self.n())
    }

    /// Moves the chips at vertex `i` to vertex `i + shift` (mod `n`).
    pub fn rotate(&self, shift: i64) -> Self {
        let s = shift.rem_euclid(self.n() as i64) as usize;
        let mut counts = self.counts.clone();
        counts.rotate_right(s);
        CycleConfig { counts }
    }

    /// Reverses the vertex order: vertex `j` receives the count of `n + 1 - j`.
    pub fn reflect(&self) -> Self {
        let mut counts = self.counts.clone();
        counts.reverse();
        CycleConfig { counts }
    }

    pub fn is_stable(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }

    /// 1-based indices of vertices holding at least two chips, ascending.
    pub fn unstable_vertices(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= 2)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Fires `vertex`: it loses two chips and each cyclic neighbour gains one.
    pub fn fire(&self, vertex: usize) -> Result<Self> {
        let idx = self.index_of(vertex)?;
        let count = self.counts[idx];
        if count < 2 {
            return Err(SandpileError::StableVertex { vertex, count });
        }
        let mut counts = self.counts.clone();
        fire_in_place(&mut counts, idx);
        Ok(CycleConfig { counts })
    }

    /// Inverse of [`fire`](Self::fire): `vertex` gains two chips taken one
    /// from each neighbour.
    pub fn reverse_fire(&self, vertex: usize) -> Result<Self> {
        let idx = self.index_of(vertex)?;
        let (left, right) = neighbours(self.n(), idx);
        if self.counts[left] == 0 || self.counts[right] == 0 {
            return Err(SandpileError::ReverseWouldGoNegative { vertex });
        }
        let mut counts = self.counts.clone();
        counts[left] -= 1;
        counts[right] -= 1;
        counts[idx] += 2;
        Ok(CycleConfig { counts })
    }

    fn index_of(&self, vertex: usize) -> Result<usize> {
        if vertex == 0 || vertex > self.n() {
            Err(SandpileError::VertexOutOfRange {
                vertex,
                n: self.n(),
            })
        } else {
            Ok(vertex - 1)
        }
    }
}

/// 0-based indices of the left and right neighbours of `idx`.
#[inline]
pub(crate) fn neighbours(n: usize, idx: usize) -> (usize, usize) {
    ((idx + n - 1) % n, (idx + 1) % n)
}

/// Fires 0-based `idx`; the caller has checked `counts[idx] >= 2`.
#[inline]
pub(crate) fn fire_in_place(counts: &mut [u32], idx: usize) {
    let (left, right) = neighbours(counts.len(), idx);
    counts[idx] -= 2;
    counts[left] += 1;
    counts[right] += 1;
}

/// Residue of the all-ones configuration: `n(n+1)/2 mod n`, which is `0` for
/// odd `n` and `n/2` for even `n`.
pub fn terminal_invariant(n: usize) -> Result<Residue> {
    check_cycle_size(n)?;
    Ok(Residue(if n.is_multiple_of(2) {
        (n / 2) as u32
    } else {
        0
    }))
}

impl fmt::Display for CycleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for CycleConfig {
    type Err = SandpileError;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: String| SandpileError::Parse {
            input: s.to_string(),
            reason,
        };
        let values = s
            .split(',')
            .map(|part| {
                if part.is_empty() || part.trim() != part {
                    return Err(parse_err(format!("malformed entry {part:?}")));
                }
                part.parse::<i64>()
                    .map_err(|e| parse_err(format!("entry {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CycleConfig::from_signed(&values)
    }
}

impl Serialize for CycleConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CycleConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(counts: &[u32]) -> CycleConfig {
        CycleConfig::new(counts.to_vec()).unwrap()
    }

    #[test]
    fn make_config_validates() {
        assert_eq!(cfg(&[3, 0, 0]).n(), 3);
        assert_eq!(cfg(&[1, 1, 1, 1]).n(), 4);
        assert_eq!(
            CycleConfig::new(vec![1, 0]),
            Err(SandpileError::UnsupportedCycleSize(2))
        );
        assert_eq!(
            CycleConfig::from_signed(&[1, -1, 0]),
            Err(SandpileError::NegativeCount {
                vertex: 2,
                value: -1
            })
        );
        assert!(CycleConfig::new(vec![]).is_err());
    }

    #[test]
    fn total_chips() {
        assert_eq!(cfg(&[3, 0, 0]).total_chips(), 3);
        assert_eq!(cfg(&[0, 3, 0, 1]).total_chips(), 4);
        assert_eq!(cfg(&[0; 5]).total_chips(), 0);
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(cfg(&[1; 10]).invariant().value(), 5);
        assert_eq!(cfg(&[0, 3, 0, 1, 1, 1, 1, 1, 1, 1]).invariant().value(), 5);
        assert_eq!(cfg(&[3, 0, 0]).invariant().value(), 0);
    }

    #[test]
    fn terminal_config_and_residue() {
        assert_eq!(CycleConfig::terminal(4).unwrap(), cfg(&[1, 1, 1, 1]));
        assert_eq!(CycleConfig::terminal(10).unwrap(), cfg(&[1; 10]));
        assert_eq!(CycleConfig::terminal(3).unwrap(), cfg(&[1, 1, 1]));
        assert!(CycleConfig::terminal(2).is_err());

        assert_eq!(terminal_invariant(10).unwrap().value(), 5);
        assert_eq!(terminal_invariant(3).unwrap().value(), 0);
        assert_eq!(terminal_invariant(4).unwrap().value(), 2);
        assert!(terminal_invariant(1).is_err());
        for n in 3..40 {
            assert_eq!(
                terminal_invariant(n).unwrap(),
                CycleConfig::terminal(n).unwrap().invariant()
            );
        }
    }

    #[test]
    fn rotate_and_reflect() {
        assert_eq!(cfg(&[3, 0, 0]).rotate(1), cfg(&[0, 3, 0]));
        assert_eq!(cfg(&[3, 0, 0]).rotate(0), cfg(&[3, 0, 0]));
        assert_eq!(cfg(&[0, 3, 0, 1]).rotate(2), cfg(&[0, 1, 0, 3]));
        assert_eq!(cfg(&[0, 3, 0, 1]).rotate(-1), cfg(&[3, 0, 1, 0]));
        assert_eq!(cfg(&[0, 3, 0, 1]).rotate(7), cfg(&[0, 3, 0, 1]).rotate(3));

        assert_eq!(cfg(&[2, 1, 0]).reflect(), cfg(&[0, 1, 2]));
        assert_eq!(cfg(&[1, 1, 1]).reflect(), cfg(&[1, 1, 1]));
        assert_eq!(cfg(&[0, 3, 0, 1]).reflect(), cfg(&[1, 0, 3, 0]));
    }

    #[test]
    fn fire_examples() {
        assert_eq!(cfg(&[3, 0, 0]).fire(1).unwrap(), cfg(&[1, 1, 1]));
        assert_eq!(cfg(&[0, 3, 0, 1]).fire(2).unwrap(), cfg(&[1, 1, 1, 1]));
        assert_eq!(
            cfg(&[1, 1, 1]).fire(1),
            Err(SandpileError::StableVertex {
                vertex: 1,
                count: 1
            })
        );
        // wraparound on the last vertex
        assert_eq!(cfg(&[0, 0, 2]).fire(3).unwrap(), cfg(&[1, 1, 0]));
        assert!(matches!(
            cfg(&[2, 0, 0]).fire(4),
            Err(SandpileError::VertexOutOfRange { vertex: 4, n: 3 })
        ));
        assert!(cfg(&[2, 0, 0]).fire(0).is_err());
    }

    #[test]
    fn reverse_fire_examples() {
        let a = cfg(&[1, 1, 1, 1]).reverse_fire(2).unwrap();
        assert_eq!(a, cfg(&[0, 3, 0, 1]));
        let b = a.reverse_fire(3).unwrap();
        assert_eq!(b, cfg(&[0, 2, 2, 0]));
        assert_eq!(
            b.reverse_fire(1),
            Err(SandpileError::ReverseWouldGoNegative { vertex: 1 })
        );
    }

    #[test]
    fn stability() {
        assert!(cfg(&[1, 1, 1, 1]).is_stable());
        assert!(cfg(&[1, 1, 1, 1]).unstable_vertices().is_empty());
        assert!(!cfg(&[0, 3, 0, 1]).is_stable());
        assert_eq!(cfg(&[0, 3, 0, 1]).unstable_vertices(), vec![2]);
        assert_eq!(cfg(&[2, 2, 0, 0]).unstable_vertices(), vec![1, 2]);
    }

    #[test]
    fn text_form() {
        let c: CycleConfig = "0,3,0,1".parse().unwrap();
        assert_eq!(c, cfg(&[0, 3, 0, 1]));
        assert_eq!(c.to_string(), "0,3,0,1");
        assert!("0, 3,0".parse::<CycleConfig>().is_err());
        assert!("0,,3".parse::<CycleConfig>().is_err());
        assert!("1,x,0".parse::<CycleConfig>().is_err());
        assert!(matches!(
            "1,-2,3".parse::<CycleConfig>(),
            Err(SandpileError::NegativeCount {
                vertex: 2,
                value: -2
            })
        ));
        assert_eq!(
            "1,0".parse::<CycleConfig>(),
            Err(SandpileError::UnsupportedCycleSize(2))
        );
    }
}
