//! Execution strategy for verifier sweeps.
//!
//! All verifiers enumerate independent work items (basis tuples, section
//! samples) and merge per-item results. [`ExecMode::Sequential`] is always
//! available; [`ExecMode::Parallel`] fans the sweep out over rayon and is only
//! present with the `parallel` feature (the default). Result order is the item
//! order in both modes, so reports are deterministic regardless of scheduling.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Map `f` over `items`, preserving input order in the output.
pub fn map_collect<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send + Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(|t| f(t)).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(|t| f(t)).collect()
        }
    }
}

/// Map `f` over `items` and keep only the `Some` results, input order.
pub fn filter_map_collect<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send + Sync,
    U: Send,
    F: Fn(&T) -> Option<U> + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().filter_map(|t| f(t)).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().filter_map(|t| f(t)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_preserve_order() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_collect(ExecMode::Sequential, items.clone(), |x| x * x);
        assert_eq!(seq[10], 100);
        #[cfg(feature = "parallel")]
        {
            let par = map_collect(ExecMode::Parallel, items, |x| x * x);
            assert_eq!(seq, par);
        }
    }
}
