use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use super::{gen_random_so2, GeneratorConfig};
use crate::bv::{formula_size, lower_indexing, solve_bv2, SolveBudget, SolveError};
use crate::reduction::{reduce_so2_to_bv2, ReduceOptions, ReductionError};
use crate::smtlib::{emit_smt2, run_external_solver, EmitError, ExternalStatus, ExternalVerdict, SolverConfig, SolverError};
use crate::so2::{decide_so2_bruteforce, So2Config, So2Error, So2Formula};
use crate::Status;

#[derive(Debug, Clone, Default)]
pub struct CrossCheckOptions {
    pub so2: So2Config,
    pub budget: SolveBudget,
    /// Also ask an external solver about the lowered reduction.
    pub solver: Option<SolverConfig>,
}

#[derive(Debug, Error)]
pub enum CrossCheckError {
    #[error(transparent)]
    So2(#[from] So2Error),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    /// At least one side ran out of budget; nothing to compare.
    Skipped,
    Disagree,
}

#[derive(Debug, Clone)]
pub struct InstanceRecord {
    pub seed: Option<u64>,
    /// Formula text, kept for replay.
    pub source: String,
    pub so2: Status,
    pub bv2: Status,
    pub external: Option<ExternalVerdict>,
    pub so2_size: u64,
    pub bv2_size: u64,
    pub so2_time: Duration,
    pub bv2_time: Duration,
    pub agreement: Agreement,
}

impl InstanceRecord {
    pub fn size_ratio(&self) -> f64 {
        self.bv2_size as f64 / self.so2_size as f64
    }
}

/// Decides `phi` directly and through the reduction, and compares.
///
/// The external solver, when configured, is only consulted for instances
/// that both internal deciders settled. A `sat`/`unsat` answer that differs,
/// or an unparseable answer, counts as a disagreement; `unknown` does not.
pub fn cross_check(phi: &So2Formula, options: &CrossCheckOptions) -> Result<InstanceRecord, CrossCheckError> {
    let t0 = Instant::now();
    let so2 = decide_so2_bruteforce(phi, &options.so2)?.status();
    let so2_time = t0.elapsed();

    let reduced = reduce_so2_to_bv2(phi, ReduceOptions { relax_order: options.so2.relax_order })?.formula;
    let t1 = Instant::now();
    let bv2 = solve_bv2(&reduced, &options.budget)?.status();
    let bv2_time = t1.elapsed();

    let mut agreement = match (so2.is_decided() && bv2.is_decided(), so2 == bv2) {
        (false, _) => Agreement::Skipped,
        (true, true) => Agreement::Agree,
        (true, false) => Agreement::Disagree,
    };

    let external = match &options.solver {
        Some(cfg) if agreement == Agreement::Agree => {
            let script = emit_smt2(&lower_indexing(&reduced))?;
            let v = run_external_solver(&script, cfg)?;
            let expected = if bv2 == Status::Sat { ExternalStatus::Sat } else { ExternalStatus::Unsat };
            if v.status == ExternalStatus::Error || (v.status != ExternalStatus::Unknown && v.status != expected) {
                agreement = Agreement::Disagree;
            }
            Some(v)
        }
        _ => None,
    };

    Ok(InstanceRecord {
        seed: None,
        source: phi.to_string(),
        so2,
        bv2,
        external,
        so2_size: phi.size(),
        bv2_size: formula_size(&reduced),
        so2_time,
        bv2_time,
        agreement,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub instances: usize,
    pub agreed: usize,
    /// Resource-exceeded instances, counted but never failed.
    pub skipped: usize,
    pub disagreed: usize,
    pub external_checked: usize,
    pub external_unknown: usize,
    pub max_size_ratio: f64,
}

#[derive(Debug, Clone, Default)]
pub struct CrossCheckReport {
    pub records: Vec<InstanceRecord>,
    pub summary: Summary,
}

impl CrossCheckReport {
    pub fn from_records(records: Vec<InstanceRecord>) -> Self {
        let mut s = Summary { instances: records.len(), ..Summary::default() };
        for r in &records {
            match r.agreement {
                Agreement::Agree => s.agreed += 1,
                Agreement::Skipped => s.skipped += 1,
                Agreement::Disagree => s.disagreed += 1,
            }
            if let Some(v) = &r.external {
                s.external_checked += 1;
                s.external_unknown += usize::from(v.status == ExternalStatus::Unknown);
            }
            s.max_size_ratio = s.max_size_ratio.max(r.size_ratio());
        }
        Self { records, summary: s }
    }

    pub fn failed(&self) -> bool {
        self.summary.disagreed > 0
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &InstanceRecord> {
        self.records.iter().filter(|r| r.agreement == Agreement::Disagree)
    }
}

/// Cross-checks one generated formula per seed. Instances run in parallel;
/// records come back in seed order.
pub fn cross_check_seeds(
    seeds: impl IntoIterator<Item = u64>,
    generator: &GeneratorConfig,
    options: &CrossCheckOptions,
) -> Result<CrossCheckReport, CrossCheckError> {
    let seeds: Vec<u64> = seeds.into_iter().collect();
    let records = seeds
        .par_iter()
        .map(|&seed| {
            let phi = gen_random_so2(&generator.with_seed(seed));
            let mut r = cross_check(&phi, options)?;
            r.seed = Some(seed);
            Ok(r)
        })
        .collect::<Result<Vec<_>, CrossCheckError>>()?;
    Ok(CrossCheckReport::from_records(records))
}

/// Runs batches of consecutive seeds from `first_seed` until `max_instances`
/// have run, `time_limit` has passed, or a batch contains a disagreement.
pub fn fuzz(
    first_seed: u64,
    max_instances: u64,
    time_limit: Option<Duration>,
    generator: &GeneratorConfig,
    options: &CrossCheckOptions,
) -> Result<CrossCheckReport, CrossCheckError> {
    const BATCH: u64 = 64;
    let start = Instant::now();
    let mut records = Vec::new();
    let mut next = first_seed;
    let end = first_seed.saturating_add(max_instances);
    while next < end {
        let stop = end.min(next.saturating_add(BATCH));
        let batch = cross_check_seeds(next..stop, generator, options)?;
        let failed = batch.failed();
        records.extend(batch.records);
        next = stop;
        if failed || time_limit.is_some_and(|t| start.elapsed() >= t) {
            break;
        }
    }
    Ok(CrossCheckReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so2::parse_so2;

    const EXAMPLE: &str = "exists f:3 . forall p:0 . forall q:0 . !f(p, p, q) & f(p, q & !q, q)";

    #[test]
    fn example_agrees_unsat() {
        let r = cross_check(&parse_so2(EXAMPLE).unwrap(), &CrossCheckOptions::default()).unwrap();
        assert_eq!((r.so2, r.bv2, r.agreement), (Status::Unsat, Status::Unsat, Agreement::Agree));
        assert!(r.size_ratio() > 1.0);
    }

    #[test]
    fn single_proposition_agrees_sat() {
        let r = cross_check(&parse_so2("exists p:0 . p()").unwrap(), &CrossCheckOptions::default()).unwrap();
        assert_eq!((r.so2, r.bv2, r.agreement), (Status::Sat, Status::Sat, Agreement::Agree));
    }

    #[test]
    fn budget_overflow_is_skipped() {
        let phi = parse_so2("exists f:4 . exists g:4 . f(0,0,0,0) & g(1,1,1,1)").unwrap();
        let r = cross_check(&phi, &CrossCheckOptions::default()).unwrap();
        assert_eq!(r.agreement, Agreement::Skipped);
        let report = CrossCheckReport::from_records(vec![r]);
        assert!(!report.failed());
        assert_eq!(report.summary.skipped, 1);
    }

    #[test]
    fn batches_keep_seed_order() {
        let report = cross_check_seeds([5, 3, 9, 1], &GeneratorConfig::default(), &CrossCheckOptions::default()).unwrap();
        let seeds: Vec<_> = report.records.iter().map(|r| r.seed.unwrap()).collect();
        assert_eq!(seeds, vec![5, 3, 9, 1]);
        assert!(!report.failed());
    }

    #[test]
    fn fuzz_stops_at_instance_budget() {
        let report = fuzz(100, 70, None, &GeneratorConfig::default(), &CrossCheckOptions::default()).unwrap();
        assert_eq!(report.records.len(), 70);
        assert_eq!(report.records.last().unwrap().seed, Some(169));
    }
}
