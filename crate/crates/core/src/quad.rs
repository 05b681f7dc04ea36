//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |I|)`. The final subdivision can be
//! frozen as a [`Partition`] and reused on a nearby integrand, which keeps
//! finite-difference derivatives of integrals free of adaptivity noise.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One application of the 15-point Kronrod rule with the embedded 7-point Gauss rule.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            abs_tol: 1e-9,
            rel_tol: 1e-6,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

/// Frozen subdivision of an integration range.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pieces: Vec<(f64, f64)>,
}

impl Partition {
    pub fn uniform(a: f64, b: f64, n: usize) -> Self {
        let n = n.max(1);
        let h = (b - a) / n as f64;
        let pieces = (0..n)
            .map(|i| {
                let lo = a + h * i as f64;
                let hi = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
                (lo, hi)
            })
            .collect();
        Partition { pieces }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Kronrod sum of `f` over the frozen pieces.
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.pieces.iter().map(|&(a, b)| gk15(&mut f, a, b).0).sum()
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Self {
        Integrator {
            abs_tol,
            rel_tol,
            max_subdivisions,
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        self.integrate_with_partition(f, a, b).map(|(i, _)| i)
    }

    pub fn integrate_with_partition<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
    ) -> Result<(Integral, Partition)> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Numeric(format!("integration limits [{a}, {b}] not finite")));
        }
        if a == b {
            let empty = Integral {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
                intervals: 0,
            };
            return Ok((empty, Partition { pieces: Vec::new() }));
        }
        if b < a {
            let (mut i, p) = self.integrate_with_partition(f, b, a)?;
            i.value = -i.value;
            return Ok((i, p));
        }

        let mut evaluations = 15;
        let (value, error) = gk15(&mut f, a, b);
        let mut heap = BinaryHeap::new();
        heap.push(Piece { a, b, value, error });
        let mut total = value;
        let mut total_err = error;
        let mut frozen: Vec<Piece> = Vec::new();

        loop {
            if !total.is_finite() || !total_err.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite integrand on [{a}, {b}] after {evaluations} evaluations"
                )));
            }
            if total_err <= self.abs_tol.max(self.rel_tol * total.abs()) {
                break;
            }
            if heap.len() + frozen.len() >= self.max_subdivisions {
                return Err(Error::Numeric(format!(
                    "quadrature on [{a}, {b}] did not converge: estimate {total:e}, error {total_err:e} \
                     after {} subintervals and {evaluations} evaluations",
                    heap.len() + frozen.len()
                )));
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            // Interval exhausted at machine resolution: keep it as is.
            if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs() {
                frozen.push(worst);
                if heap.is_empty() {
                    break;
                }
                continue;
            }
            let (lv, le) = gk15(&mut f, worst.a, mid);
            let (rv, re) = gk15(&mut f, mid, worst.b);
            evaluations += 30;
            total += lv + rv - worst.value;
            total_err += le + re - worst.error;
            heap.push(Piece {
                a: worst.a,
                b: mid,
                value: lv,
                error: le,
            });
            heap.push(Piece {
                a: mid,
                b: worst.b,
                value: rv,
                error: re,
            });
        }

        let mut pieces: Vec<Piece> = heap.into_vec();
        pieces.extend(frozen);
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        // Re-sum in a fixed order so the result does not depend on heap history.
        let value = pieces.iter().map(|p| p.value).sum();
        let abs_error = pieces.iter().map(|p| p.error).sum();
        let intervals = pieces.len();
        let partition = Partition {
            pieces: pieces.iter().map(|p| (p.a, p.b)).collect(),
        };
        Ok((
            Integral {
                value,
                abs_error,
                evaluations,
                intervals,
            },
            partition,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_exact() {
        let q = Integrator::default();
        let r = q.integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn peaked_and_reversed() {
        let q = Integrator::new(1e-12, 1e-10, 2000);
        let r = q.integrate(|x| (-(x - 0.3) * (x - 0.3) / 2e-6).exp(), 0.0, 1.0).unwrap();
        let exact = (2.0 * std::f64::consts::PI * 1e-6).sqrt();
        assert!(((r.value - exact) / exact).abs() < 1e-9, "{}", r.value);
        let back = q.integrate(f64::sin, std::f64::consts::PI, 0.0).unwrap();
        assert!((back.value + 2.0).abs() < 1e-12);
        assert_eq!(q.integrate(f64::sin, 1.0, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn frozen_partition_reproduces() {
        let q = Integrator::default();
        let (r, p) = q.integrate_with_partition(|x| 1.0 / (1.0 + x * x), 0.0, 50.0).unwrap();
        assert_eq!(p.apply(|x| 1.0 / (1.0 + x * x)), r.value);
        assert!((r.value - 50f64.atan()).abs() < 1e-8);
        let u = Partition::uniform(0.0, 1.0, 4);
        assert_eq!(u.len(), 4);
        assert!((u.apply(|x| x.exp()) - (1f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn failures_are_reported() {
        let q = Integrator::new(1e-14, 1e-14, 20);
        assert!(matches!(q.integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0), Err(Error::Numeric(_))));
        assert!(q.integrate(|_| f64::NAN, 0.0, 1.0).is_err());
        assert!(q.integrate(|x| x, 0.0, f64::INFINITY).is_err());
    }
}
