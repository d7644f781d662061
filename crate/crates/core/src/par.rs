//! Data-parallel map with a sequential fallback.
//!
//! Results always come back in input order, so anything folded from them is
//! independent of the worker count.

/// `items.map(f)` on `workers` threads. One worker, or a build without the
/// `parallel` feature, runs on the calling thread.
pub fn map_ordered<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
    }
    let _ = workers;
    items.iter().map(f).collect()
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_ordered(&items, 1, |x| x * x);
        for w in [2, 4, 8] {
            assert_eq!(map_ordered(&items, w, |x| x * x), seq);
        }
    }
}
