//! Globally adaptive Gauss–Kronrod (7/15) integration.
//!
//! Semi-infinite ranges are mapped onto `[0, 1)` with
//! `x = a + scale * t / (1 - t)`, so exponentially decaying integrands need no
//! truncation.

use std::cmp::Ordering;
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

/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn abs(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrates `f` over the finite intervals delimited by `breakpoints`
/// (strictly increasing, at least two entries).
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    if breakpoints.len() < 2 {
        return Err(Error::domain("integrate", "need at least two breakpoints"));
    }
    if breakpoints.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("integrate", "breakpoints must be finite"));
    }
    let guarded = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if w[1] < w[0] {
            return Err(Error::domain("integrate", "breakpoints must be increasing"));
        }
        if w[1] > w[0] {
            heap.push(kronrod(&guarded, w[0], w[1]));
            evaluations += 15;
        }
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(Integral {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::NonConvergence(format!(
                "estimated error {error:e} above target {target:e} after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept its contribution
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        heap.push(kronrod(&guarded, worst.a, mid));
        heap.push(kronrod(&guarded, mid, worst.b));
        evaluations += 30;
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    integrate_pieces(f, &[a, b], tol)
}

/// `∫_a^∞ f(x) dx` through `x = a + scale * t/(1-t)`. `scale` should be
/// comparable to the decay length of `f`. Extra interior cut points in the
/// original variable may be passed in `cuts` to help the first subdivision.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    cuts: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain("integrate_to_infinity", "scale must be positive"));
    }
    let to_t = |x: f64| {
        let u = (x - a) / scale;
        u / (1.0 + u)
    };
    let mut points = vec![0.0];
    points.extend(
        cuts.iter()
            .filter(|&&c| c > a && c.is_finite())
            .map(|&c| to_t(c)),
    );
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let g = |t: f64| {
        let one_minus = 1.0 - t;
        let x = a + scale * t / one_minus;
        f(x) * scale / (one_minus * one_minus)
    };
    integrate_pieces(g, &points, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x + 1.0, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r.value - 10.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_to_infinity(|x| (-2.0 * x).exp(), 1.0, 0.5, &[], Tolerance::default())
            .unwrap();
        assert!((r.value - 0.5 * (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn sharp_feature_needs_subdivision() {
        // ∫_0^1 sqrt(x) dx = 2/3, endpoint singularity in the derivative
        let r = integrate(|x| x.sqrt(), 0.0, 1.0, Tolerance::abs(1e-12)).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
        assert!(r.evaluations > 15);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let tol = Tolerance {
            abs: 1e-300,
            rel: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x| (50.0 * x).sin(), 0.0, 10.0, tol);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }
}
