//! Repetition-based wall-clock timing and the worker-pool setup.

use std::time::Instant;

use crate::error::{Error, Result};

/// Wall-clock samples (seconds) of repeated runs, warm-up excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub samples: Vec<f64>,
}

impl Timing {
    pub fn median(&self) -> f64 {
        let mut s = self.samples.clone();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        if n == 0 {
            return f64::NAN;
        }
        if n % 2 == 1 {
            s[n / 2]
        } else {
            0.5 * (s[n / 2 - 1] + s[n / 2])
        }
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// Runs `f` once to warm up, then `reps` timed times on a monotonic clock.
/// Returns the timing and the output of the last run.
pub fn measure<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(Timing, T)> {
    if reps == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    if reps == 1 {
        log::warn!("a single repetition gives no estimate of timing variance");
    }
    let mut last = f()?;
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        last = f()?;
        samples.push(start.elapsed().as_secs_f64());
    }
    Ok((Timing { samples }, last))
}

/// Sizes the global worker pool from `WTEN_THREADS` (unset or 0 = one
/// worker per core) and returns the worker count in effect. Only the first
/// call in a process can change the pool.
pub fn init_threads() -> usize {
    let requested = std::env::var("WTEN_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(requested)
        .build_global()
    {
        log::debug!("worker pool already initialised: {e}");
    }
    rayon::current_num_threads()
}
