use std::fmt::Write as _;

use crate::trace::RunTrace;
use crate::Result;

use super::scaling::{c1_assumption_holds, empirical_c1, window_counts, WindowCounts};

/// Headline numbers for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub problem: String,
    pub solver: String,
    pub iterations: usize,
    pub evaluations: u64,
    pub stop: String,
    pub k_epsilon: Option<usize>,
    pub successful: usize,
    pub unsuccessful: usize,
    pub final_alpha: Option<f64>,
    pub final_mu: Option<f64>,
    pub final_hypervolume: Option<f64>,
    pub final_archive_size: usize,
    pub c1: Option<f64>,
    pub c1_assumption: bool,
    /// Counts and `|L|` over the measured window.
    pub window: WindowCounts,
}

pub fn summarize(trace: &RunTrace) -> Result<RunSummary> {
    let last = trace.records.last();
    let successful = trace.records.iter().filter(|r| r.status.is_success()).count();
    Ok(RunSummary {
        problem: trace.meta.problem.clone(),
        solver: trace.meta.solver.as_str().into(),
        iterations: trace.iterations(),
        evaluations: trace.evaluations,
        stop: trace.stop.as_str().into(),
        k_epsilon: trace.k_epsilon(),
        successful,
        unsuccessful: trace.iterations() - successful,
        final_alpha: last.map(|r| r.alpha),
        final_mu: trace.final_mu,
        final_hypervolume: last.and_then(|r| r.hi_after.or(r.hi_before)),
        final_archive_size: last.map_or(0, |r| r.archive_size),
        c1: empirical_c1(trace),
        c1_assumption: c1_assumption_holds(trace),
        window: window_counts(trace)?,
    })
}

impl RunSummary {
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6e}"));
        let mut s = String::new();
        let _ = writeln!(s, "problem            {}", self.problem);
        let _ = writeln!(s, "solver             {}", self.solver);
        let _ = writeln!(s, "stop               {}", self.stop);
        let _ = writeln!(s, "iterations         {}", self.iterations);
        let _ = writeln!(s, "evaluations        {}", self.evaluations);
        let _ = writeln!(
            s,
            "k_epsilon          {}",
            self.k_epsilon.map_or("-".into(), |k| k.to_string())
        );
        let _ = writeln!(s, "successful         {}", self.successful);
        let _ = writeln!(s, "unsuccessful       {}", self.unsuccessful);
        let _ = writeln!(s, "final alpha        {}", opt(self.final_alpha));
        let _ = writeln!(s, "final mu           {}", opt(self.final_mu));
        let _ = writeln!(s, "final hypervolume  {}", opt(self.final_hypervolume));
        let _ = writeln!(s, "archive size       {}", self.final_archive_size);
        let _ = writeln!(s, "empirical C1       {}", opt(self.c1));
        let _ = writeln!(s, "mu_D > 0 throughout {}", self.c1_assumption);
        match self.window.window {
            Some((k0, j1)) => {
                let _ = writeln!(
                    s,
                    "window [{k0}, {j1}]    |S| = {}, |U| = {}, |L| = {}",
                    self.window.successful, self.window.unsuccessful, self.window.chains
                );
            }
            None => {
                let _ = writeln!(s, "window             none");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minmax::{minmax_run, MinMaxConfig};
    use crate::problems::dennis_woods_bi;

    #[test]
    fn summary_counts_add_up() {
        let cfg = MinMaxConfig {
            directions: crate::directions::DirectionFamily::Rotated { level: 2 },
            epsilon: Some(0.1),
            ..MinMaxConfig::default()
        };
        let t = minmax_run(&dennis_woods_bi(), &[3.0, 4.0], &cfg).unwrap();
        let s = summarize(&t).unwrap();
        assert_eq!(s.successful + s.unsuccessful, s.iterations);
        assert_eq!(s.k_epsilon, t.k_epsilon());
        let (k0, j1) = s.window.window.unwrap();
        assert_eq!(s.window.successful + s.window.unsuccessful, j1 - k0 + 1);
        assert!(s.to_text().contains("|L| = 1"));
    }
}
