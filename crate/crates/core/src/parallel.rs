//! Order-preserving map over an index range.
//!
//! With the `parallel` feature the work is spread over a rayon pool; without
//! it, or with a single worker, it runs on the calling thread. Results come
//! back in index order either way, so callers can merge deterministically.

use std::ops::Range;

/// `f(i)` for every `i` in `range`, in order.
pub fn map_range<T, F>(range: Range<u64>, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers != 1 {
        use rayon::prelude::*;
        let run = || range.clone().into_par_iter().map(&f).collect();
        if workers == 0 {
            return run();
        }
        return rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| range.clone().map(&f).collect());
    }
    let _ = workers;
    range.map(f).collect()
}

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Worker count meaning "use every available core".
pub const ALL_CORES: usize = 0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_range(0..1000, 1, |i| i * i);
        let par = map_range(0..1000, 4, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(map_range(0..1000, ALL_CORES, |i| i * i), seq);
        assert_eq!(seq[31], 961);
    }
}
