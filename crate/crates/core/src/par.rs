//! Data-parallel helpers with a sequential fallback.
//!
//! Every caller picks an [`Execution`]; `Parallel` only takes effect when the
//! crate is built with the `parallel` feature, otherwise it runs the same
//! closures sequentially. Results never depend on the execution mode: the
//! reductions here are order-independent (minimum of a total order, or an
//! order-preserving map).

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Smallest key produced by `f` over `items`.
pub fn min_over_slice<T, K, F>(exec: Execution, items: &[T], f: F) -> Option<K>
where
    T: Sync,
    K: Ord + Send,
    F: Fn(&T) -> Option<K> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().filter_map(f).min();
    }
    let _ = exec;
    items.iter().filter_map(f).min()
}

/// Smallest key produced by `f` over the integers of `range`.
pub fn min_over_range<K, F>(exec: Execution, range: Range<u64>, f: F) -> Option<K>
where
    K: Ord + Send,
    F: Fn(u64) -> Option<K> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().filter_map(f).min();
    }
    let _ = exec;
    range.filter_map(f).min()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert_eq!(map(exec, &items, |x| x * 2)[999], 1998);
            assert_eq!(
                min_over_slice(exec, &items, |&x| (x % 7 == 3 && x > 500).then_some(x)),
                Some(507)
            );
            assert_eq!(min_over_range(exec, 10..20, |x| Some(20 - x)), Some(1));
            assert_eq!(min_over_range(exec, 0..0, Some), None::<u64>);
        }
    }
}
