//! Compensated (error-feedback) accumulation for the large weighted sums.
//!
//! Totals reach ~x^3 (~1e18 at x = 1e6) while summands sit near n^2, so a
//! bare f64 accumulator loses the low digits the decomposition identity
//! needs. Neumaier's variant of Kahan summation keeps the running error.

/// Kahan–Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both compensation terms.
    /// Used to combine per-block partial sums in a fixed order.
    pub fn merge(&mut self, other: NeumaierSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
