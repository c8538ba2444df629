//! Parallel drivers. Every unit of work is a pure function of its inputs
//! and results are collected in schedule order, so output does not depend
//! on the thread count.

use rayon::prelude::*;
use residua_core::algebra::AlgebraElement;
use residua_core::baumslag::{run_trial, BaumslagError, SearchBounds, SearchReport, Variant};
use residua_core::permrep::{experiment_cell, experiment_setup, ExperimentOptions, ExperimentRow, PermError};
use residua_core::tower::{SubgroupDescriptor, TowerDescriptor};

/// Runs `f` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Parallel form of the seeded counterexample search. The first violating
/// trial in trial order is reported.
pub fn baumslag_search(
    seed: u64,
    bounds: &SearchBounds,
    trials: u64,
    variant: Variant,
) -> Result<SearchReport, BaumslagError> {
    let rows: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(seed, t, bounds, variant))
        .collect();
    let mut report = SearchReport::default();
    for row in rows {
        let row = row?;
        if row.w_trivial && !row.hypothesis_holds {
            report.tightness.push(row.trial);
        }
        report.rows.push(row);
    }
    Ok(report)
}

/// Parallel form of the strong-convergence experiment.
pub fn permrep_experiment(
    tower: &TowerDescriptor,
    y: &SubgroupDescriptor,
    z: &AlgebraElement,
    sizes: &[usize],
    seeds: &[u64],
    opts: &ExperimentOptions,
) -> Result<Vec<ExperimentRow>, PermError> {
    let setup = experiment_setup(tower, y, z, opts)?;
    let cells: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    cells
        .par_iter()
        .map(|&(n, s)| experiment_cell(&setup, n, s, opts))
        .collect()
}
