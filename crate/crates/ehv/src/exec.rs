//! Scoped-thread executor; results come back in index order, so sums are
//! the same for any thread count.

use ehv_core::quadrature::Executor;

#[derive(Clone, Copy, Debug)]
pub struct Threads {
    pub n: usize,
}

impl Threads {
    pub fn new(n: usize) -> Self {
        Threads { n: n.max(1) }
    }

    /// `EHV_THREADS`, else the available parallelism.
    pub fn from_env() -> Self {
        let n = std::env::var("EHV_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        Threads::new(n)
    }
}

impl Executor for Threads {
    fn map<R: Send, F: Fn(usize) -> R + Sync>(&self, n: usize, f: F) -> Vec<R> {
        if self.n == 1 || n < 2 * self.n {
            return (0..n).map(f).collect();
        }
        let chunk = n.div_ceil(self.n);
        let f = &f;
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|lo| s.spawn(move || (lo..(lo + chunk).min(n)).map(f).collect::<Vec<R>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let v = Threads::new(4).map(1000, |k| k * k);
        assert!(v.iter().enumerate().all(|(k, &x)| x == k * k));
    }
}
