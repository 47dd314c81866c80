//! Chip-firing on the cycle graph `C_n`.
//!
//! A configuration places a non-negative number of chips on each of the `n`
//! vertices of a cycle. Any vertex holding two or more chips may fire: it
//! loses two chips and each of its two neighbours gains one. With exactly
//! `n` chips on `n` vertices the only stable configuration is all-ones, and
//! whether a configuration reaches it is decided by the weighted residue
//! `(sum of i * counts[i]) mod n` (positions 1-based).
//!
//! The crate provides the configuration type and the firing primitives
//! ([`config`]), deterministic stabilization with exact recurrence detection
//! ([`dynamics`]), enumeration of weak compositions and of the reverse-reachable
//! set ([`enumeration`]), and the exhaustive cross-check that compares the
//! residue test against simulation and reverse reachability ([`verify`]).

pub mod config;
pub mod dynamics;
pub mod enumeration;
mod error;
pub mod verify;

pub use config::{terminal_invariant, CycleConfig, Residue, MIN_CYCLE_SIZE};
pub use dynamics::{
    stabilize, step, trace, FiringPolicy, StabilizationOutcome, TraceStep, DEFAULT_STATE_BUDGET,
};
pub use enumeration::{
    binomial, canonical_rotation, cyclic_classes, reverse_bfs_successful, weak_compositions,
    CompositionSpace, RotationClass, SuccessfulSet, WeakCompositions,
};
pub use error::{Result, SandpileError};
pub use verify::{
    classify_by_invariant, classify_by_reverse_bfs, classify_by_simulation, cross_check,
    residue_histogram, Classification, Method, Mismatch, Verdict, VerificationReport,
};
