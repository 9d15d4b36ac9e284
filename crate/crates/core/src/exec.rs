//! Data-parallel map over index ranges.
//!
//! With the `parallel` feature, [`Execution::Parallel`] fans work out over the
//! current rayon pool; without it, every execution mode runs serially. Results
//! are always collected in index order, and reductions happen afterwards in a
//! single fixed order, so output is bit-identical for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluates `f(i)` for `i in 0..len` and returns the results in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Serial => (0..len).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..len).into_par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => (0..len).map(f).collect(),
        }
    }

    /// Like [`Execution::map`] over a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        self.map(items.len(), |i| f(&items[i]))
    }
}

/// Runs `f` inside a rayon pool with `threads` workers (ignored without the
/// `parallel` feature).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| ((i as f64) * 0.37).sin();
        let a = Execution::Serial.map(1000, f);
        let b = with_threads(Some(4), || Execution::Parallel.map(1000, f));
        assert_eq!(a, b);
    }
}
