//! Float helpers shared across the crate.

/// log(2 cosh u), stable for any |u| (never overflows).
#[inline]
pub fn log_2cosh(u: f64) -> f64 {
    let a = libm::fabs(u);
    a + libm::log1p(libm::exp(-2.0 * a))
}

/// Pairwise (cascade) summation. Deterministic for a given slice order and
/// accurate to O(log n) rounding errors, so accumulations do not drift when
/// sample counts grow large.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2, "need at least two samples");
    let mean = pairwise_sum(xs) / n as f64;
    let mut dev = alloc::vec::Vec::with_capacity(n);
    for &x in xs {
        dev.push((x - mean) * (x - mean));
    }
    let var = pairwise_sum(&dev) / (n as f64 - 1.0);
    (mean, libm::sqrt(var / n as f64))
}
