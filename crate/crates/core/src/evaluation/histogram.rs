use std::io::{self, Write};

use chrono::{DateTime, Datelike};

use crate::scalar::Real;

/// One histogram bin covering `[lower, upper)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bin<T> {
    pub lower: T,
    pub upper: T,
    pub count: usize,
}

/// Log-spaced bins over decades that cover the positive values, with
/// `bins_per_decade` bins each. Zeros get a leading `[0, 0]` bin; negative
/// and non-finite values are ignored.
pub fn log_histogram<T: Real>(values: &[T], bins_per_decade: usize) -> Vec<Bin<T>> {
    assert!(bins_per_decade > 0, "bins_per_decade must be positive");
    let zeros = values.iter().filter(|v| v.is_zero()).count();
    let positive: Vec<T> = values.iter().copied().filter(|v| *v > T::zero() && v.is_finite()).collect();
    let mut bins = Vec::new();
    if zeros > 0 {
        bins.push(Bin { lower: T::zero(), upper: T::zero(), count: zeros });
    }
    if positive.is_empty() {
        return bins;
    }
    let lo = positive.iter().fold(T::infinity(), |a, &b| a.min(b)).log10().floor();
    let hi = positive.iter().fold(T::zero(), |a, &b| a.max(b)).log10().floor() + T::one();
    let decades = (hi - lo).to_usize().expect("finite range");
    let k = T::from_count(bins_per_decade);
    let edge = |i: usize| T::lit(10.0).powf(lo + T::from_count(i) / k);
    let first = bins.len();
    for i in 0..decades * bins_per_decade {
        bins.push(Bin { lower: edge(i), upper: edge(i + 1), count: 0 });
    }
    for v in positive {
        let pos = ((v.log10() - lo) * k).floor().to_usize().unwrap_or(0);
        let mut i = pos.min(decades * bins_per_decade - 1);
        // guard against rounding at the bin edges
        while i > 0 && v < bins[first + i].lower {
            i -= 1;
        }
        while i + 1 < decades * bins_per_decade && v >= bins[first + i].upper {
            i += 1;
        }
        bins[first + i].count += 1;
    }
    bins
}

pub fn write_histogram_csv<T: Real, W: Write>(bins: &[Bin<T>], mut w: W) -> io::Result<()> {
    writeln!(w, "lower,upper,count")?;
    for b in bins {
        writeln!(w, "{},{},{}", b.lower, b.upper, b.count)?;
    }
    Ok(())
}

/// Counts per calendar month (UTC), contiguous from the first to the last
/// month present. Labels are `YYYY-MM`.
pub fn monthly_histogram(timestamps: &[i64]) -> Vec<(String, usize)> {
    let months: Vec<i64> = timestamps
        .iter()
        .filter_map(|&t| DateTime::from_timestamp(t, 0))
        .map(|d| i64::from(d.year()) * 12 + i64::from(d.month0()))
        .collect();
    let (Some(&first), Some(&last)) = (months.iter().min(), months.iter().max()) else {
        return Vec::new();
    };
    let mut counts = vec![0usize; (last - first + 1) as usize];
    for m in months {
        counts[(m - first) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let m = first + i as i64;
            (format!("{:04}-{:02}", m.div_euclid(12), m.rem_euclid(12) + 1), c)
        })
        .collect()
}

pub fn write_monthly_csv<W: Write>(months: &[(String, usize)], mut w: W) -> io::Result<()> {
    writeln!(w, "month,count")?;
    for (m, c) in months {
        writeln!(w, "{m},{c}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decades_and_zeros() {
        let bins = log_histogram(&[0.0f64, 1.0, 5.0, 10.0, 99.0, 100.0], 1);
        let counts: Vec<usize> = bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, [1, 2, 2, 1]);
        assert_eq!(bins[1].lower, 1.0);
        assert!((bins[3].upper - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn finer_bins_conserve_counts() {
        let xs: Vec<f64> = (1..=500).map(|i| i as f64 * 0.37).collect();
        let bins = log_histogram(&xs, 5);
        assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 500);
        for b in &bins {
            let inside = xs.iter().filter(|&&x| x >= b.lower && x < b.upper).count();
            assert_eq!(inside, b.count);
        }
    }

    #[test]
    fn empty_input() {
        assert!(log_histogram::<f64>(&[], 3).is_empty());
        assert!(monthly_histogram(&[]).is_empty());
    }

    #[test]
    fn months_are_contiguous() {
        // 2018-11-15, 2019-01-01, 2019-01-31
        let h = monthly_histogram(&[1_542_240_000, 1_546_300_800, 1_548_892_800]);
        assert_eq!(h, vec![("2018-11".into(), 1), ("2018-12".into(), 0), ("2019-01".into(), 2)]);
    }
}
