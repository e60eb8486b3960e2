//! Globally adaptive Gauss–Kronrod (7/15 point) quadrature.
//!
//! Intervals are bisected in order of their local error estimate until the
//! summed estimate drops below `max(abs_tol, rel_tol·|I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
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
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

impl Quadrature {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<QuadResult> {
        if a == b {
            return Ok(QuadResult {
                value: 0.0,
                error: 0.0,
                intervals: 0,
            });
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("quadrature bounds must be finite"));
        }
        let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };

        let (value, error) = kronrod(&mut f, lo, hi);
        let mut total = value;
        let mut total_err = error;
        let mut heap = BinaryHeap::new();
        heap.push(Piece {
            a: lo,
            b: hi,
            value,
            error,
        });

        while total_err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_intervals {
                return Err(Error::NoConvergence(format!(
                    "quadrature error {total_err:.3e} after {} intervals",
                    heap.len()
                )));
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            let (lv, le) = kronrod(&mut f, worst.a, mid);
            let (rv, re) = kronrod(&mut f, mid, worst.b);
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

        // Re-sum to shed the drift of the running total.
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        Ok(QuadResult {
            value: sign * value,
            error,
            intervals: heap.len(),
        })
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    Quadrature::with_abs_tol(abs_tol)
        .integrate(f, a, b)
        .map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(v, 64.0 / 6.0 - 8.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-11);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let v = integrate(f64::cos, 1.0, 0.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, -(1.0f64).sin(), epsilon = 1e-12);
    }

    #[test]
    fn gives_up_loudly() {
        let q = Quadrature {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        assert!(q.integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0).is_err());
    }
}
