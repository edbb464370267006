//! Worker-thread cap and the channel-parallel execution helper.
//!
//! All reductions are sequential within a channel, so distributing channels
//! over threads never changes results. The cap comes from `set_thread_cap`,
//! or from the `FST_THREADS` environment variable (read once), or defaults to
//! the available parallelism.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

/// 0 means "not set explicitly".
static THREAD_CAP: AtomicUsize = AtomicUsize::new(0);

fn env_cap() -> usize {
    static ENV_CAP: OnceLock<usize> = OnceLock::new();
    *ENV_CAP.get_or_init(|| {
        std::env::var("FST_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or(0)
    })
}

/// Caps the number of worker threads used by channel-parallel operations.
/// A cap of 0 restores the automatic behavior (`FST_THREADS` or all cores).
pub fn set_thread_cap(cap: usize) {
    THREAD_CAP.store(cap, Ordering::Relaxed);
}

/// Effective upper bound on worker threads.
pub fn thread_cap() -> usize {
    let explicit = THREAD_CAP.load(Ordering::Relaxed);
    if explicit >= 1 {
        return explicit;
    }
    let env = env_cap();
    if env >= 1 {
        return env;
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Minimum total elements before spawning threads is worth it.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Runs `op` over each `plane`-sized chunk of `data` (one chunk per channel),
/// possibly across threads. `op` receives the absolute channel index.
pub(crate) fn for_each_channel<T, F>(data: &mut [T], plane: usize, op: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    let channels = data.len().checked_div(plane).unwrap_or(0);
    debug_assert_eq!(channels * plane, data.len());
    let threads = thread_cap().min(channels).max(1);

    if threads <= 1 || data.len() < PARALLEL_THRESHOLD {
        for (k, chunk) in data.chunks_mut(plane).enumerate() {
            op(k, chunk);
        }
        return;
    }

    let per_thread = channels.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, block) in data.chunks_mut(per_thread * plane).enumerate() {
            let op = &op;
            scope.spawn(move || {
                for (i, chunk) in block.chunks_mut(plane).enumerate() {
                    op(t * per_thread + i, chunk);
                }
            });
        }
    });
}
