//! Parallel trial execution.
//!
//! Every trial draws from its own counter-derived stream and outcomes are
//! collected in index order, so results are identical for any thread count.

use lvs_core::simulator::{
    nmi_sweep_comparison_with, simulate_with, Experiment, ExperimentConfig, Hypothesis, PairedSweep, RunData,
    TrialOutcome,
};
use rayon::prelude::*;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `threads = None` uses every available core.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        Ok(Self { pool: builder.build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn trials(
        &self,
        exp: &Experiment,
        hypothesis: Hypothesis,
        n: usize,
    ) -> lvs_core::Result<Vec<TrialOutcome>> {
        self.pool
            .install(|| (0..n as u64).into_par_iter().map(|i| exp.trial(hypothesis, i)).collect())
    }

    pub fn simulate(&self, config: &ExperimentConfig) -> lvs_core::Result<RunData> {
        simulate_with(config, &|e, h, n| self.trials(e, h, n))
    }

    pub fn paired(&self, config: &ExperimentConfig) -> lvs_core::Result<PairedSweep> {
        nmi_sweep_comparison_with(config, &|e, h, n| self.trials(e, h, n))
    }
}
