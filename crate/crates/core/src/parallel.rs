//! Deterministic data-parallel maps.

use rayon::prelude::*;

/// `items.map(f)` on `jobs` threads, results in input order. Each result
/// depends only on its own item, so output is independent of `jobs`.
pub fn ordered_map<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let a = ordered_map(1, &items, |x| x * x);
        let b = ordered_map(8, &items, |x| x * x);
        assert_eq!(a, b);
    }
}
