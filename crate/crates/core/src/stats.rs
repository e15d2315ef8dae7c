//! Summation and test-statistic helpers shared by the estimator and the
//! validation suites.

use crate::scalar::Real;

/// Pairwise (cascade) summation; error grows like O(log n) rather than
/// O(n), which keeps aggregated probabilities reproducible.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    if xs.len() <= 32 {
        let mut acc = T::zero();
        for x in xs {
            acc += *x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean<T: Real>(xs: &[T]) -> T {
    assert!(!xs.is_empty(), "mean of empty slice");
    pairwise_sum(xs) / T::from_usize(xs.len()).expect("length fits scalar")
}

/// Sample standard deviation with one delta degree of freedom; zero for
/// fewer than two samples.
pub fn sample_std<T: Real>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::zero();
    }
    let m = mean(xs);
    let sq: Vec<T> = xs.iter().map(|x| (*x - m) * (*x - m)).collect();
    let denom = T::from_usize(xs.len() - 1).expect("length fits scalar");
    (pairwise_sum(&sq) / denom).sqrt()
}

/// Standard error of a binomial frequency estimate.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    assert!(n > 0);
    (p * (1.0 - p) / n as f64).sqrt()
}

fn rank_vector(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("comparable values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // Tied entries share the average of their positions (1-based).
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation in [-1, 1].
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let rx = rank_vector(xs);
    let ry = rank_vector(ys);
    let mx = mean(&rx);
    let my = mean(&ry);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..xs.len() {
        let dx = rx[i] - mx;
        let dy = ry[i] - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

/// Two-sided Kolmogorov-Smirnov distance between a sample and a reference
/// CDF. The sample is sorted in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_by(|a, b| a.partial_cmp(b).expect("comparable samples"));
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        let upper = (i + 1) as f64 / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    d
}

/// Asymptotic Kolmogorov-Smirnov critical value at the 0.01 significance
/// level for large n.
pub fn ks_critical_001(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
