use serde::Serialize;

use crate::scalar::Real;

/// Count, mean, population standard deviation, extremes and quartiles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary<T> {
    pub count: usize,
    pub mean: T,
    pub std: T,
    pub min: T,
    pub q25: T,
    pub median: T,
    pub q75: T,
    pub max: T,
}

/// Statistic labels in report order.
pub const STATISTICS: [&str; 7] = ["mean", "std", "min", "25%", "50%", "75%", "max"];

impl<T: Real> Summary<T> {
    /// `None` for an empty input or one containing NaN.
    pub fn of(values: &[T]) -> Option<Self> {
        if values.is_empty() || values.iter().any(|v| v.is_nan()) {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
        let n = T::from_count(values.len());
        let mean = values.iter().copied().sum::<T>() / n;
        let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
        Some(Summary {
            count: values.len(),
            mean,
            std: var.sqrt(),
            min: sorted[0],
            q25: quantile_sorted(&sorted, T::lit(0.25)),
            median: quantile_sorted(&sorted, T::lit(0.5)),
            q75: quantile_sorted(&sorted, T::lit(0.75)),
            max: sorted[sorted.len() - 1],
        })
    }

    /// Values in [`STATISTICS`] order.
    pub fn row(&self) -> [T; 7] {
        [self.mean, self.std, self.min, self.q25, self.median, self.q75, self.max]
    }
}

/// Linear interpolation between order statistics at position `q * (n - 1)`.
pub fn quantile_sorted<T: Real>(sorted: &[T], q: T) -> T {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let pos = q * T::from_count(sorted.len() - 1);
    let lo = pos.floor();
    let i = lo.to_usize().expect("non-negative position");
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = pos - lo;
    sorted[i] + (sorted[i + 1] - sorted[i]) * frac
}
