//! Small statistics helpers shared by the Monte Carlo engine and the tests.

/// 97.5% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and `cdf`.
/// Sorts `samples` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (hi - f).max(f - lo)
        })
        .fold(0.0, f64::max)
}

/// A point estimate with a 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn lower(&self) -> f64 {
        self.value - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.value + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.half_width
    }
}

/// Proportion estimate: normal approximation, Wilson score when `p(1-p)n < 10`.
pub fn proportion(successes: u64, n: u64) -> Estimate {
    if n == 0 {
        return Estimate::default();
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let spread = p * (1.0 - p) * nf;
    let half_width = if spread >= 10.0 {
        Z95 * (p * (1.0 - p) / nf).sqrt()
    } else {
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt()
    };
    Estimate { value: p, half_width }
}

/// Running sum and sum of squares, merged in a fixed order for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        };
        Estimate {
            value: self.mean(),
            half_width: Z95 * se,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_grid_is_half_step() {
        let mut xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn proportions() {
        let e = proportion(500, 1000);
        assert!((e.half_width - Z95 * (0.25f64 / 1000.0).sqrt()).abs() < 1e-15);
        let w = proportion(0, 1000);
        assert_eq!(w.value, 0.0);
        assert!(w.half_width > 0.0 && w.half_width < 0.01);
        let one = proportion(1000, 1000);
        assert!(one.half_width > 0.0);
        assert_eq!(proportion(0, 0), Estimate::default());
    }

    #[test]
    fn moments() {
        let mut m = Moments::default();
        for x in [1.0, 2.0, 3.0, 4.0] {
            m.push(x);
        }
        assert_eq!(m.mean(), 2.5);
        assert!((m.variance() - 5.0 / 3.0).abs() < 1e-15);
        let mut a = Moments::default();
        a.merge(&m);
        assert_eq!(a, m);
    }
}
