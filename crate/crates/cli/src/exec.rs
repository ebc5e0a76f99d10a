//! Deterministic parallel trial execution.
//!
//! Trials are split into contiguous index chunks handed out by an atomic
//! counter; every chunk's results are kept with its index and re-assembled
//! in order, so the output vector is a pure function of the trial closure —
//! the worker count never changes a byte of downstream output.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

pub fn run_trials<T, F>(workers: usize, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let workers = workers.max(1);
    if workers == 1 || trials < 64 {
        return (0..trials).map(f).collect();
    }
    let chunk = (trials / (workers as u64 * 16)).max(1);
    let n_chunks = trials.div_ceil(chunk);
    let next = AtomicU64::new(0);
    let done: Mutex<Vec<(u64, Vec<T>)>> = Mutex::new(Vec::with_capacity(n_chunks as usize));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= n_chunks {
                    break;
                }
                let start = c * chunk;
                let end = trials.min(start + chunk);
                let out: Vec<T> = (start..end).map(&f).collect();
                done.lock().unwrap().push((c, out));
            });
        }
    });
    let mut chunks = done.into_inner().unwrap();
    chunks.sort_unstable_by_key(|(c, _)| *c);
    let mut result = Vec::with_capacity(trials as usize);
    for (_, mut v) in chunks {
        result.append(&mut v);
    }
    result
}
