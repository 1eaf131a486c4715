//! Online accumulators for the per-cycle and per-attempt statistics.

/// Welford running mean and variance.
#[derive(Debug, Clone, Default)]
pub(crate) struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean; zero when fewer than two samples exist.
    pub fn std_err(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// Running means, variances and covariance of a pair, for the
/// ratio-of-means estimator `mean(y) / mean(x)`.
#[derive(Debug, Clone, Default)]
pub(crate) struct RatioStats {
    n: u64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl RatioStats {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
    }

    /// Delta-method standard error of `mean(y) / mean(x)` evaluated at `ratio`.
    pub fn ratio_std_err(&self, ratio: f64) -> f64 {
        if self.n < 2 || self.mean_x == 0.0 {
            return 0.0;
        }
        let dof = (self.n - 1) as f64;
        let var = (self.m2_y - 2.0 * ratio * self.c_xy + ratio * ratio * self.m2_x) / dof;
        (var.max(0.0) / self.n as f64).sqrt() / self.mean_x
    }
}
