//! Sample quantiles by linear interpolation between order statistics
//! (Hyndman-Fan type 7, the R and NumPy default).

/// Quantile `p` of ascending `sorted` values; `None` for an empty slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Option<f64> {
    debug_assert!((0.0..=1.0).contains(&p));
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Quantile `p` of unsorted values.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, p)
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

/// Ascending multiset supporting insert and remove in `O(n)`.
#[derive(Debug, Clone, Default)]
pub(crate) struct SortedWindow {
    values: Vec<f64>,
}

impl SortedWindow {
    pub fn insert(&mut self, x: f64) {
        let i = self.values.partition_point(|&v| v < x);
        self.values.insert(i, x);
    }

    pub fn remove(&mut self, x: f64) {
        let i = self.values.partition_point(|&v| v < x);
        debug_assert!(self.values.get(i) == Some(&x));
        self.values.remove(i);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}
