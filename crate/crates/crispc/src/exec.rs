//! Execution strategy for the data-parallel passes.
//!
//! Hot loops (the κ map over axioms, model-search sharding, benchmark
//! sweeps) run through these helpers. With the `parallel` feature (default)
//! they dispatch to rayon; without it only the sequential path exists.
//! Output order is the input order in both modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Mode {
    #[cfg(feature = "parallel")]
    fn default() -> Mode {
        Mode::Parallel
    }

    #[cfg(not(feature = "parallel"))]
    fn default() -> Mode {
        Mode::Sequential
    }
}

/// Order-preserving map.
pub fn map_ordered<T, U, F>(mode: Mode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        Mode::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Mode::Parallel => items.par_iter().map(f).collect(),
    }
}

/// Order-preserving map over an index range.
pub fn map_range<U, F>(mode: Mode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match mode {
        Mode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_ordered_preserves_order() {
        let items: Vec<u32> = (0..1000).collect();
        let seq = map_ordered(Mode::Sequential, &items, |x| x * 2);
        assert_eq!(seq, (0..1000).map(|x| x * 2).collect::<Vec<_>>());
        #[cfg(feature = "parallel")]
        {
            let par = map_ordered(Mode::Parallel, &items, |x| x * 2);
            assert_eq!(seq, par);
        }
    }
}
