//! Propagation engines.
//!
//! All engines share the same shape: build counters from the current
//! domains, seed a work list, then pop, validate, eliminate and update
//! until the list runs dry. Counters are indexed by positions in the
//! original domains; entries involving dead values are left stale and
//! never read again.

use std::time::Instant;

use crate::instance::{Instance, Var};
use crate::trace::{Reduction, ReductionReport, Trace};

pub mod ac;
mod blocks;
pub mod cns;
pub mod ns;
pub mod scss;
pub mod ss;

pub use ac::establish_ac;
pub use cns::{cns_to_convergence, cns_to_convergence_with, CnsCounters};
pub use ns::{ns_to_convergence, ns_to_convergence_with};
pub use scss::{check_scss, scss_to_convergence, scss_to_convergence_with, ScssCounters};
pub use ss::{init_ss_counters, ss_to_convergence, ss_to_convergence_with, SsCounters};

pub const DEBUG_ENV: &str = "SUBSENSE_DEBUG_RECOMPUTE";

#[derive(Clone, Debug, Default)]
pub struct EngineOptions {
    /// After every elimination, rebuild all counters from scratch and
    /// compare. Quadratic slowdown or worse; for testing only.
    pub debug_recompute: bool,
}

impl EngineOptions {
    pub fn from_env() -> Self {
        EngineOptions {
            debug_recompute: std::env::var(DEBUG_ENV).is_ok_and(|v| !v.is_empty() && v != "0"),
        }
    }

    pub fn checked() -> Self {
        EngineOptions {
            debug_recompute: true,
        }
    }
}

/// Current domains as seen by an engine.
#[derive(Clone, Debug)]
pub(crate) struct Live {
    mask: Vec<Vec<bool>>,
    len: Vec<usize>,
}

impl Live {
    pub(crate) fn of(inst: &Instance) -> Live {
        Live {
            mask: (0..inst.num_vars())
                .map(|i| inst.live_mask(i).to_vec())
                .collect(),
            len: inst.domain_sizes(),
        }
    }

    #[inline]
    pub(crate) fn has(&self, i: Var, p: usize) -> bool {
        self.mask[i][p]
    }

    pub(crate) fn len(&self, i: Var) -> usize {
        self.len[i]
    }

    pub(crate) fn remove(&mut self, i: Var, p: usize) {
        debug_assert!(self.mask[i][p]);
        self.mask[i][p] = false;
        self.len[i] -= 1;
    }

    pub(crate) fn positions(&self, i: Var) -> impl Iterator<Item = usize> + '_ {
        self.mask[i]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(p, _)| p)
    }

    pub(crate) fn masks(&self) -> &[Vec<bool>] {
        &self.mask
    }
}

/// Bookkeeping common to every run.
pub(crate) struct Run {
    pub(crate) trace: Trace,
    pub(crate) report: ReductionReport,
    started: Instant,
}

impl Run {
    pub(crate) fn start(inst: &Instance) -> Run {
        Run {
            trace: Trace::new(inst.name()),
            report: ReductionReport {
                initial_size: inst.total_size(),
                ..ReductionReport::default()
            },
            started: Instant::now(),
        }
    }

    pub(crate) fn violation(&mut self, msgs: Vec<String>) {
        if msgs.is_empty() {
            return;
        }
        self.report.integrity_violations += msgs.len();
        if self.report.first_violation.is_none() {
            let at = self.trace.len();
            self.report.first_violation = Some(format!("after step {at}: {}", msgs[0]));
        }
    }

    pub(crate) fn finish(mut self, inst: &Instance, live: &Live, updates: u64) -> Reduction {
        let instance = inst.with_live(live.masks());
        self.report.updates = updates;
        self.report.micros = self.started.elapsed().as_micros();
        self.report.final_size = instance.total_size();
        self.report.unsatisfiable |= instance.is_wiped_out();
        for r in &self.trace.steps {
            self.report.tally(r.rule());
        }
        Reduction {
            instance,
            trace: self.trace,
            report: self.report,
        }
    }
}

/// Compares two tables entry by entry and describes the first few
/// differences.
pub(crate) fn diff_into<T: PartialEq + std::fmt::Debug>(
    out: &mut Vec<String>,
    what: impl Fn() -> String,
    kept: T,
    fresh: T,
) {
    if kept != fresh && out.len() < 8 {
        out.push(format!(
            "{}: kept {:?}, recomputed {:?}",
            what(),
            kept,
            fresh
        ));
    }
}
