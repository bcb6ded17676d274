//! Execution policy for the data-parallel loops (grid scans, batch assembly,
//! randomized suites).
//!
//! Every parallel path is an order-preserving map: results are collected by
//! index and never reduced in a data-dependent order, so `Sequential` and
//! `Parallel` produce bit-identical output. Without the `parallel` feature
//! the `Parallel` policy silently runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Reference single-threaded order.
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually fan out to a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Evaluate `f(0), f(1), .., f(len - 1)` and return the results in index order.
    pub fn map_indexed<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Like [`Execution::map_indexed`] for fallible work. The error reported is
    /// the one with the lowest index, matching the sequential short-circuit.
    pub fn try_map_indexed<T, E, F>(self, len: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        if self.is_parallel() {
            self.map_indexed(len, f).into_iter().collect()
        } else {
            (0..len).map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_and_keep_order() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = Execution::Sequential.map_indexed(1000, f);
        let b = Execution::Parallel.map_indexed(1000, f);
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_wins() {
        let f = |i: usize| if i % 7 == 3 { Err(i) } else { Ok(i) };
        assert_eq!(Execution::Parallel.try_map_indexed(100, f), Err(3));
        assert_eq!(Execution::Sequential.try_map_indexed(100, f), Err(3));
    }
}
