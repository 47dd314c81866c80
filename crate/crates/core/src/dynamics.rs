//! Deterministic stabilization under a fixed firing policy.
//!
//! For fixed `n` and chip total the state space is finite and every policy is
//! a function of the current state, so a run either reaches a stable
//! configuration or revisits a state. Revisits are detected exactly with a
//! visited-state map keyed on the full count vector.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{fire_in_place, CycleConfig};
use crate::error::{Result, SandpileError};

/// Default number of distinct states a single run may visit.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

/// Which unstable vertices fire on a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiringPolicy {
    /// Fire the unstable vertex with the smallest index.
    #[default]
    LowestIndex,
    /// Fire the unstable vertex with the largest index.
    HighestIndex,
    /// Fire every unstable vertex at once.
    ParallelSweep,
}

impl FiringPolicy {
    pub const ALL: [FiringPolicy; 3] = [
        FiringPolicy::LowestIndex,
        FiringPolicy::HighestIndex,
        FiringPolicy::ParallelSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FiringPolicy::LowestIndex => "lowest-index",
            FiringPolicy::HighestIndex => "highest-index",
            FiringPolicy::ParallelSweep => "parallel-sweep",
        }
    }
}

impl fmt::Display for FiringPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FiringPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FiringPolicy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown policy {s:?} (expected lowest-index, highest-index or parallel-sweep)"
                )
            })
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StabilizationOutcome {
    Terminated {
        #[serde(rename = "final")]
        final_config: CycleConfig,
        /// Individual vertex firings performed.
        firings_total: u64,
        /// Firings per vertex, vertex 1 first.
        odometer: Vec<u64>,
    },
    Recurrent {
        /// Individual vertex firings performed before the repeated state was reached.
        firings_total: u64,
        /// Step index at which the repeated state first occurred.
        steps_to_cycle: u64,
        /// Steps between the two occurrences.
        cycle_length: u64,
    },
}

impl StabilizationOutcome {
    pub fn is_terminated(&self) -> bool {
        matches!(self, StabilizationOutcome::Terminated { .. })
    }

    pub fn firings_total(&self) -> u64 {
        match *self {
            StabilizationOutcome::Terminated { firings_total, .. }
            | StabilizationOutcome::Recurrent { firings_total, .. } => firings_total,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StabilizationOutcome::Terminated { .. } => "Terminated",
            StabilizationOutcome::Recurrent { .. } => "Recurrent",
        }
    }
}

/// One entry of a run: the state and the vertices fired from it (1-based).
/// A stable state appears with an empty `fired` list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub state: CycleConfig,
    pub fired: Vec<usize>,
}

/// Selects and fires in place. `fired` receives the 0-based vertices.
/// Returns `false` when the state is already stable.
fn step_in_place(counts: &mut [u32], policy: FiringPolicy, fired: &mut Vec<usize>) -> bool {
    fired.clear();
    match policy {
        FiringPolicy::LowestIndex => fired.extend(counts.iter().position(|&c| c >= 2)),
        FiringPolicy::HighestIndex => fired.extend(counts.iter().rposition(|&c| c >= 2)),
        FiringPolicy::ParallelSweep => fired.extend(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c >= 2)
                .map(|(i, _)| i),
        ),
    }
    // Simultaneous firing: every selected vertex had >= 2 chips before the
    // step and only gains chips from earlier fires, so sequential application
    // never underflows and yields the same result.
    for &idx in fired.iter() {
        fire_in_place(counts, idx);
    }
    !fired.is_empty()
}

/// Performs one step of `policy`, returning the new state and the fired
/// vertices in ascending 1-based order.
pub fn step(config: &CycleConfig, policy: FiringPolicy) -> Result<(CycleConfig, Vec<usize>)> {
    let mut counts = config.counts().to_vec();
    let mut fired = Vec::new();
    if !step_in_place(&mut counts, policy, &mut fired) {
        return Err(SandpileError::NothingToFire(config.to_string()));
    }
    Ok((
        CycleConfig::from_vec_unchecked(counts),
        fired.into_iter().map(|i| i + 1).collect(),
    ))
}

/// Runs `policy` until the configuration is stable or a state repeats.
///
/// Fails with [`SandpileError::BudgetExhausted`] if more than `state_budget`
/// distinct unstable states would be visited.
pub fn stabilize(
    config: &CycleConfig,
    policy: FiringPolicy,
    state_budget: usize,
) -> Result<StabilizationOutcome> {
    if state_budget == 0 {
        return Err(SandpileError::ZeroBudget);
    }
    let n = config.n();
    let mut counts = config.counts().to_vec();
    let mut visited: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut odometer = vec![0u64; n];
    let mut fired = Vec::with_capacity(n);
    let mut firings_total = 0u64;
    let mut step_index = 0u64;

    loop {
        if counts.iter().all(|&c| c <= 1) {
            return Ok(StabilizationOutcome::Terminated {
                final_config: CycleConfig::from_vec_unchecked(counts),
                firings_total,
                odometer,
            });
        }
        if let Some(&first) = visited.get(&counts) {
            return Ok(StabilizationOutcome::Recurrent {
                firings_total,
                steps_to_cycle: first,
                cycle_length: step_index - first,
            });
        }
        if visited.len() >= state_budget {
            return Err(SandpileError::BudgetExhausted {
                budget: state_budget,
                config: config.to_string(),
            });
        }
        visited.insert(counts.clone(), step_index);
        step_in_place(&mut counts, policy, &mut fired);
        for &idx in &fired {
            odometer[idx] += 1;
        }
        firings_total += fired.len() as u64;
        step_index += 1;
    }
}

/// The prefix of the run [`stabilize`] would perform, limited to `max_steps`
/// firing steps. The run also ends at a stable state (included with an empty
/// fired list) or just before a state would repeat.
pub fn trace(config: &CycleConfig, policy: FiringPolicy, max_steps: usize) -> Vec<TraceStep> {
    let mut counts = config.counts().to_vec();
    let mut visited: HashMap<Vec<u32>, ()> = HashMap::new();
    let mut fired = Vec::new();
    let mut out = Vec::new();
    loop {
        if counts.iter().all(|&c| c <= 1) {
            out.push(TraceStep {
                state: CycleConfig::from_vec_unchecked(counts),
                fired: Vec::new(),
            });
            break;
        }
        if out.len() >= max_steps || visited.contains_key(&counts) {
            break;
        }
        visited.insert(counts.clone(), ());
        let before = CycleConfig::from_vec_unchecked(counts.clone());
        step_in_place(&mut counts, policy, &mut fired);
        out.push(TraceStep {
            state: before,
            fired: fired.iter().map(|i| i + 1).collect(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(counts: &[u32]) -> CycleConfig {
        CycleConfig::new(counts.to_vec()).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(
            step(&cfg(&[2, 2, 0, 0]), FiringPolicy::LowestIndex).unwrap(),
            (cfg(&[0, 3, 0, 1]), vec![1])
        );
        assert_eq!(
            step(&cfg(&[2, 2, 0, 0]), FiringPolicy::HighestIndex).unwrap(),
            (cfg(&[3, 0, 1, 0]), vec![2])
        );
        let (next, fired) = step(&cfg(&[2, 2, 0, 0]), FiringPolicy::ParallelSweep).unwrap();
        assert_eq!(fired, vec![1, 2]);
        // same as firing 1 then 2 one after the other
        let sequential = cfg(&[2, 2, 0, 0]).fire(1).unwrap().fire(2).unwrap();
        assert_eq!(next, sequential);
        assert_eq!(next, cfg(&[1, 1, 1, 1]));

        for policy in FiringPolicy::ALL {
            assert!(matches!(
                step(&cfg(&[1, 1, 1]), policy),
                Err(SandpileError::NothingToFire(_))
            ));
        }
    }

    #[test]
    fn parallel_sweep_adjacent_on_triangle() {
        // every vertex of C_3 is adjacent to both others
        let (next, fired) = step(&cfg(&[2, 2, 2]), FiringPolicy::ParallelSweep).unwrap();
        assert_eq!(fired, vec![1, 2, 3]);
        assert_eq!(next, cfg(&[2, 2, 2]));
    }

    #[test]
    fn stabilize_examples() {
        let budget = DEFAULT_STATE_BUDGET;
        assert_eq!(
            stabilize(&cfg(&[0, 3, 0, 1]), FiringPolicy::LowestIndex, budget).unwrap(),
            StabilizationOutcome::Terminated {
                final_config: cfg(&[1, 1, 1, 1]),
                firings_total: 1,
                odometer: vec![0, 1, 0, 0],
            }
        );
        let out = stabilize(&cfg(&[0, 2, 2, 0]), FiringPolicy::LowestIndex, budget).unwrap();
        assert_eq!(out.firings_total(), 2);
        assert!(out.is_terminated());

        assert_eq!(
            stabilize(&cfg(&[2, 1, 0]), FiringPolicy::LowestIndex, budget).unwrap(),
            StabilizationOutcome::Recurrent {
                firings_total: 3,
                steps_to_cycle: 0,
                cycle_length: 3,
            }
        );
        assert_eq!(
            stabilize(&cfg(&[1, 1, 1, 1]), FiringPolicy::ParallelSweep, budget).unwrap(),
            StabilizationOutcome::Terminated {
                final_config: cfg(&[1, 1, 1, 1]),
                firings_total: 0,
                odometer: vec![0; 4],
            }
        );
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        assert_eq!(
            stabilize(&cfg(&[2, 1, 0]), FiringPolicy::LowestIndex, 2),
            Err(SandpileError::BudgetExhausted {
                budget: 2,
                config: "2,1,0".into()
            })
        );
        // three distinct states fit exactly
        assert!(stabilize(&cfg(&[2, 1, 0]), FiringPolicy::LowestIndex, 3).is_ok());
        assert_eq!(
            stabilize(&cfg(&[1, 1, 1]), FiringPolicy::LowestIndex, 0),
            Err(SandpileError::ZeroBudget)
        );
    }

    #[test]
    fn trace_examples() {
        assert_eq!(
            trace(&cfg(&[0, 3, 0, 1]), FiringPolicy::LowestIndex, 10),
            vec![
                TraceStep {
                    state: cfg(&[0, 3, 0, 1]),
                    fired: vec![2]
                },
                TraceStep {
                    state: cfg(&[1, 1, 1, 1]),
                    fired: vec![]
                },
            ]
        );
        for policy in FiringPolicy::ALL {
            assert_eq!(
                trace(&cfg(&[1, 1, 1]), policy, 10),
                vec![TraceStep {
                    state: cfg(&[1, 1, 1]),
                    fired: vec![]
                }]
            );
        }
        let t = trace(&cfg(&[2, 1, 0]), FiringPolicy::LowestIndex, 3);
        assert_eq!(t.len(), 3);
        let last = t.last().unwrap();
        assert_eq!(last.state.fire(last.fired[0]).unwrap(), cfg(&[2, 1, 0]));
        // the run stops at the repeat even with a larger limit
        assert_eq!(trace(&cfg(&[2, 1, 0]), FiringPolicy::LowestIndex, 100), t);
        assert_eq!(
            trace(&cfg(&[2, 1, 0]), FiringPolicy::LowestIndex, 1).len(),
            1
        );
    }

    #[test]
    fn policy_names_round_trip() {
        for p in FiringPolicy::ALL {
            assert_eq!(p.name().parse::<FiringPolicy>().unwrap(), p);
        }
        assert!("random".parse::<FiringPolicy>().is_err());
    }
}
