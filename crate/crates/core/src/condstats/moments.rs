use serde::{Deserialize, Serialize};

/// Count, sum and sum of squares of integer-valued terms.
///
/// Exact integer arithmetic makes merging commutative and associative, so
/// per-day partials combine to the same bits in any order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub count: u64,
    pub sum: i128,
    pub sum_sq: i128,
}

impl ExactMoments {
    #[inline]
    pub fn push(&mut self, x: i64) {
        let x = x as i128;
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &ExactMoments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum as f64 / self.count as f64
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let n = self.count as i128;
        let centered = n * self.sum_sq - self.sum * self.sum;
        centered as f64 / (n * (n - 1)) as f64
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}
