//! Order-preserving fan-out helpers.
//!
//! Grid cells, sweep rows, and benchmark trials are independent; the
//! orchestration code maps a pure function over `0..n` and collects results
//! in index order, so parallel and sequential execution produce identical
//! output. With the `parallel` feature (on by default) [`indexed_map`] runs
//! on the rayon pool; without it, it degrades to [`indexed_map_seq`].

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is enabled.
/// Results are collected in index order either way.
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        indexed_map_seq(n, f)
    }
}

/// Sequential fallback with the same contract as [`indexed_map`].
pub fn indexed_map_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_mappers_preserve_index_order() {
        let par = indexed_map(100, |i| i * i);
        let seq = indexed_map_seq(100, |i| i * i);
        assert_eq!(par, seq);
        assert_eq!(par[7], 49);
    }
}
