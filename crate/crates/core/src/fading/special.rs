//! Modified Bessel function I0 and the first-order Marcum Q-function.

use crate::error::{Error, Result};
use crate::quad::Integrator;

/// Crossover between the power series and the large-argument expansion of I0.
const I0_SERIES_LIMIT: f64 = 20.0;

/// Poisson means above this are handled by direct integration instead of the series.
const MARCUM_SERIES_MAX_LAMBDA: f64 = 600.0;

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
        k += 1.0;
    }
}

/// Asymptotic series of `sqrt(2 pi x) e^{-x} I0(x)`.
fn i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if next < 1e-17 * sum || next > term {
            return sum;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
}

pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        i0_series(x)
    } else {
        x.exp() / (2.0 * std::f64::consts::PI * x).sqrt() * i0_asymptotic_scaled(x)
    }
}

/// Exponentially scaled `e^{-|x|} I0(x)`; finite for every finite argument.
pub fn bessel_i0e(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        i0_series(x) * (-x).exp()
    } else {
        i0_asymptotic_scaled(x) / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// First-order Marcum Q-function Q1(a, b).
///
/// For moderate `a` the noncentral chi-square Poisson mixture is summed in
/// whichever direction (Q or 1 - Q) keeps every term positive and the result
/// away from cancellation. Very large `a` falls back to integrating the
/// defining Rician-tail integral with a scaled Bessel kernel.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
        return Err(Error::invalid(format!("Marcum Q needs finite non-negative arguments, got ({a}, {b})")));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok((-0.5 * b * b).exp());
    }
    let lambda = 0.5 * a * a;
    let y = 0.5 * b * b;
    if lambda <= MARCUM_SERIES_MAX_LAMBDA {
        if b >= a {
            Ok(poisson_mixture_upper(lambda, y))
        } else {
            Ok(1.0 - poisson_mixture_lower(lambda, y))
        }
    } else {
        marcum_q1_integral(a, b)
    }
}

/// sum_j Pois(j; lambda) * P(Pois(y) <= j), i.e. Q1 directly.
fn poisson_mixture_upper(lambda: f64, y: f64) -> f64 {
    let ln_lambda = lambda.ln();
    let ln_y = y.ln();
    let mut ln_p = -lambda;
    let mut ln_yi = -y;
    let mut cdf_y = ln_yi.exp();
    let mut sum = ln_p.exp() * cdf_y;
    let mut j = 0.0f64;
    let limit = lambda + y + 60.0 * (lambda + y).sqrt() + 200.0;
    loop {
        j += 1.0;
        ln_p += ln_lambda - j.ln();
        ln_yi += ln_y - j.ln();
        cdf_y = (cdf_y + ln_yi.exp()).min(1.0);
        let p = ln_p.exp();
        sum += p * cdf_y;
        if j > lambda + 1.0 {
            // Remaining Poisson mass is dominated by a geometric tail of ratio lambda / j.
            let tail = p / (1.0 - lambda / (j + 1.0));
            if tail <= 1e-17 * sum || tail < 1e-300 {
                break;
            }
        }
        if j > limit {
            break;
        }
    }
    sum.min(1.0)
}

/// sum_i Pois(i; y) * P(Pois(lambda) < i), i.e. 1 - Q1.
fn poisson_mixture_lower(lambda: f64, y: f64) -> f64 {
    let ln_lambda = lambda.ln();
    let ln_y = y.ln();
    let mut ln_p = -lambda;
    let mut ln_yi = -y;
    let mut cdf_lambda = 0.0f64;
    let mut sum = 0.0f64;
    let mut i = 0.0f64;
    let limit = lambda + y + 60.0 * (lambda + y).sqrt() + 200.0;
    loop {
        // P(Pois(lambda) < i+1) picks up the mass at i.
        cdf_lambda = (cdf_lambda + ln_p.exp()).min(1.0);
        i += 1.0;
        ln_p += ln_lambda - i.ln();
        ln_yi += ln_y - i.ln();
        let w = ln_yi.exp();
        sum += w * cdf_lambda;
        if i > y + 1.0 {
            let tail = w / (1.0 - y / (i + 1.0));
            if tail <= 1e-17 * sum.max(1e-300) || tail < 1e-300 {
                break;
            }
        }
        if i > limit {
            break;
        }
    }
    sum.min(1.0)
}

fn marcum_q1_integral(a: f64, b: f64) -> Result<f64> {
    // x e^{-(x-a)^2/2} I0e(a x) is the Rice density with the growth of I0 cancelled.
    let kernel = |x: f64| x * (-0.5 * (x - a) * (x - a)).exp() * bessel_i0e(a * x);
    let q = Integrator::new(0.0, 1e-13, 4000);
    const SPAN: f64 = 40.0;
    if b >= a {
        Ok(q.integrate(kernel, b, b.max(a) + SPAN)?.value.min(1.0))
    } else {
        let lo = (a - SPAN).max(0.0);
        if b <= lo {
            return Ok(1.0);
        }
        Ok((1.0 - q.integrate(kernel, lo, b)?.value).max(0.0))
    }
}

/// Shape polynomial of the closed-form Marcum approximation.
pub fn marcum_approx_shape(a: f64) -> f64 {
    2.174 - 0.592 * a + 0.593 * a * a - 0.092 * a.powi(3) + 0.005 * a.powi(4)
}

/// Log-scale polynomial of the closed-form Marcum approximation.
pub fn marcum_approx_log_scale(a: f64) -> f64 {
    -0.840 + 0.327 * a - 0.740 * a * a + 0.083 * a.powi(3) - 0.004 * a.powi(4)
}

/// `exp(-e^{nu(a)} b^{mu(a)})`, a cheap stand-in for Q1(a, b).
pub fn marcum_q1_approx(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    (-marcum_approx_log_scale(a).exp() * b.powf(marcum_approx_shape(a))).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain power series of I0, summed to convergence; test-only oracle.
    fn i0_reference(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..500 {
            if k > 0 {
                term *= (x * x / 4.0) / (k as f64 * k as f64);
            }
            sum += term;
        }
        sum
    }

    /// Composite Simpson of the Rice density from b to a far cutoff.
    fn marcum_reference(a: f64, b: f64) -> f64 {
        let upper = a.max(b) + 40.0;
        let n = 400_000;
        let h = (upper - b) / n as f64;
        let f = |x: f64| x * (-(x * x + a * a) / 2.0).exp() * i0_reference(a * x);
        let mut s = f(b) + f(upper);
        for i in 1..n {
            let x = b + h * i as f64;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn i0_accuracy_across_crossover() {
        for &x in &[0.0, 1e-3, 0.5, 1.0, 5.0, 10.0, 19.99, 20.0, 20.01, 25.0, 40.0, 80.0] {
            let r = i0_reference(x);
            let v = bessel_i0(x);
            assert!(((v - r) / r).abs() < 1e-12, "x={x}: {v} vs {r}");
            let e = bessel_i0e(x);
            assert!(((e - r * (-x).exp()) / (r * (-x).exp())).abs() < 1e-12);
        }
        assert_eq!(bessel_i0(0.0), 1.0);
        assert!(bessel_i0e(1e6) > 0.0);
    }

    #[test]
    fn marcum_identities() {
        for &a in &[0.0, 0.5, 4.472, 30.0, 100.0] {
            assert_eq!(marcum_q1(a, 0.0).unwrap(), 1.0);
        }
        for &b in &[0.1, 1.0, 3.0, 6.0] {
            let q = marcum_q1(0.0, b).unwrap();
            assert!((q - (-b * b / 2.0f64).exp()).abs() < 1e-10);
        }
        assert!(marcum_q1(-1.0, 1.0).is_err());
        assert!(marcum_q1(1.0, -1e-9).is_err());
        assert!(marcum_q1(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn marcum_matches_quadrature_oracle() {
        for &(a, b) in &[(1.0, 1.0), (4.472, 3.815), (4.472, 6.0), (2.0, 0.3), (0.2, 2.5), (10.0, 12.0)] {
            let q = marcum_q1(a, b).unwrap();
            let r = marcum_reference(a, b);
            assert!((q - r).abs() < 1e-8, "Q1({a},{b}) = {q} vs oracle {r}");
        }
    }

    #[test]
    fn marcum_tails_keep_relative_accuracy() {
        // Deep upper tail and near-one region, checked against the integral route.
        for &(a, b) in &[(3.0, 12.0), (5.0, 0.5), (30.0, 29.0), (30.0, 31.0)] {
            let s = marcum_q1(a, b).unwrap();
            let i = marcum_q1_integral(a, b).unwrap();
            assert!(((s - i) / i).abs() < 1e-9, "({a},{b}) {s} vs {i}");
        }
    }

    #[test]
    fn marcum_large_argument_branch() {
        let a = (2.0e6f64).sqrt();
        assert!((marcum_q1(a, a).unwrap() - 0.5).abs() < 1e-3);
        assert!(marcum_q1(a, a - 10.0).unwrap() > 1.0 - 1e-15);
        assert!(marcum_q1(a, a + 10.0).unwrap() < 1e-15);
        // Continuity across the series/integral switch.
        let a0 = (2.0 * MARCUM_SERIES_MAX_LAMBDA).sqrt();
        let series = marcum_q1(a0, a0 + 0.7).unwrap();
        let integral = marcum_q1_integral(a0, a0 + 0.7).unwrap();
        assert!((series - integral).abs() < 1e-11, "{series} vs {integral}");
    }

    #[test]
    fn marcum_monotone_in_b() {
        let mut prev = 1.0;
        for i in 1..=400 {
            let b = 0.025 * i as f64;
            let q = marcum_q1(4.472, b).unwrap();
            assert!(q <= prev);
            prev = q;
        }
    }

    #[test]
    fn approximation_constants() {
        assert_eq!(marcum_approx_shape(0.0), 2.174);
        assert_eq!(marcum_approx_log_scale(0.0), -0.840);
        assert_eq!(marcum_q1_approx(4.0, 0.0), 1.0);
    }
}
