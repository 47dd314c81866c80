//! The residue classifier and the exhaustive three-way cross-check.
//!
//! For `k = n` a configuration is called successful when it reaches the
//! all-ones state. Three independent procedures decide this:
//!
//! * the residue test: `invariant(c) == terminal_invariant(n)`;
//! * simulation: [`stabilize`] returns `Terminated`;
//! * reverse reachability: `c` is in [`reverse_bfs_successful`]`(n)`.
//!
//! [`cross_check`] runs all three over every weak composition of `n` into
//! `n` parts and reports any configuration on which they disagree.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{terminal_invariant, CycleConfig, Residue};
use crate::dynamics::{stabilize, FiringPolicy};
use crate::enumeration::{reverse_bfs_successful, CompositionSpace, SuccessfulSet};
use crate::error::{Result, SandpileError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Successful,
    Unsuccessful,
}

impl Verdict {
    pub fn from_bool(successful: bool) -> Self {
        if successful {
            Verdict::Successful
        } else {
            Verdict::Unsuccessful
        }
    }

    pub fn is_successful(self) -> bool {
        self == Verdict::Successful
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Invariant,
    Simulation,
    ReverseBFS,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub config_invariant: Residue,
    pub target_invariant: Residue,
    pub method: Method,
    /// Firings to reach the terminal state, when simulation found it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub firings_total: Option<u64>,
}

fn require_k_equals_n(config: &CycleConfig) -> Result<()> {
    let chips = config.total_chips();
    if chips != config.n() as u64 {
        return Err(SandpileError::ChipsNotEqualToSize {
            config: config.to_string(),
            chips,
            n: config.n(),
        });
    }
    Ok(())
}

fn classification(
    config: &CycleConfig,
    verdict: Verdict,
    method: Method,
) -> Result<Classification> {
    Ok(Classification {
        verdict,
        config_invariant: config.invariant(),
        target_invariant: terminal_invariant(config.n())?,
        method,
        firings_total: None,
    })
}

/// Successful iff the configuration's residue equals the all-ones residue.
pub fn classify_by_invariant(config: &CycleConfig) -> Result<Classification> {
    require_k_equals_n(config)?;
    let target = terminal_invariant(config.n())?;
    classification(
        config,
        Verdict::from_bool(config.invariant() == target),
        Method::Invariant,
    )
}

/// Successful iff stabilization under `policy` terminates.
pub fn classify_by_simulation(
    config: &CycleConfig,
    policy: FiringPolicy,
    budget: usize,
) -> Result<Classification> {
    require_k_equals_n(config)?;
    let outcome = stabilize(config, policy, budget)?;
    let mut out = classification(
        config,
        Verdict::from_bool(outcome.is_terminated()),
        Method::Simulation,
    )?;
    if outcome.is_terminated() {
        out.firings_total = Some(outcome.firings_total());
    }
    Ok(out)
}

/// Successful iff the configuration is in `set`.
pub fn classify_by_reverse_bfs(
    config: &CycleConfig,
    set: &SuccessfulSet,
) -> Result<Classification> {
    require_k_equals_n(config)?;
    if set.n() != config.n() {
        return Err(SandpileError::MixedCycleSizes {
            expected: set.n(),
            found: config.n(),
        });
    }
    classification(
        config,
        Verdict::from_bool(set.contains(config)),
        Method::ReverseBFS,
    )
}

/// A configuration on which the three procedures disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub config: CycleConfig,
    pub invariant: Verdict,
    pub simulation: Verdict,
    pub reverse_bfs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub total_configs: u64,
    /// Configurations per residue; residues that never occur are omitted.
    pub residue_histogram: BTreeMap<Residue, u64>,
    /// Configurations whose simulation terminated.
    pub successful_count: u64,
    /// Sorted by the configurations' textual form.
    pub mismatches: Vec<Mismatch>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

struct ConfigCheck {
    residue: Residue,
    simulated: bool,
    mismatch: Option<Mismatch>,
}

fn check_one(
    config: &CycleConfig,
    target: Residue,
    successful: &SuccessfulSet,
    policy: FiringPolicy,
    budget: usize,
) -> Result<ConfigCheck> {
    let residue = config.invariant();
    let by_invariant = residue == target;
    let simulated = stabilize(config, policy, budget)?.is_terminated();
    let in_set = successful.contains(config);
    let mismatch = (by_invariant != simulated || simulated != in_set).then(|| Mismatch {
        config: config.clone(),
        invariant: Verdict::from_bool(by_invariant),
        simulation: Verdict::from_bool(simulated),
        reverse_bfs: in_set,
    });
    Ok(ConfigCheck {
        residue,
        simulated,
        mismatch,
    })
}

/// Runs the residue test, simulation, and reverse-reachability membership on
/// every configuration of `n` chips on `n` vertices.
///
/// Work is spread over the rayon pool; the report does not depend on
/// scheduling (apart from `elapsed_ms`).
pub fn cross_check(n: usize, policy: FiringPolicy, budget: usize) -> Result<VerificationReport> {
    let started = Instant::now();
    if budget == 0 {
        return Err(SandpileError::ZeroBudget);
    }
    let chips = u32::try_from(n).map_err(|_| SandpileError::UnsupportedCycleSize(n))?;
    let space = CompositionSpace::new(chips, n)?;
    let target = terminal_invariant(n)?;
    let successful = reverse_bfs_successful(n)?;

    let configs: Vec<CycleConfig> = space.iter().collect();
    let checks: Vec<Result<ConfigCheck>> = configs
        .par_iter()
        .map(|c| check_one(c, target, &successful, policy, budget))
        .collect();

    let mut residue_histogram = BTreeMap::new();
    let mut successful_count = 0u64;
    let mut mismatches = Vec::new();
    for check in checks {
        let check = check?;
        *residue_histogram.entry(check.residue).or_insert(0u64) += 1;
        successful_count += u64::from(check.simulated);
        mismatches.extend(check.mismatch);
    }
    mismatches.sort_by_cached_key(|m: &Mismatch| m.config.to_string());

    Ok(VerificationReport {
        n,
        total_configs: configs.len() as u64,
        residue_histogram,
        successful_count,
        mismatches,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Number of configurations of `k` chips on `n` vertices per residue.
/// Residues that never occur are omitted.
pub fn residue_histogram(n: usize, k: u32) -> Result<BTreeMap<Residue, u64>> {
    let mut histogram = BTreeMap::new();
    for config in CompositionSpace::new(k, n)? {
        *histogram.entry(config.invariant()).or_insert(0u64) += 1;
    }
    Ok(histogram)
}
