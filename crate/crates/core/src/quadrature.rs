//! Adaptive Gauss–Kronrod (7/15) integration and tabulated primitives.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`]. The target is `max(abs_tol, rel_tol * |I|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn tight() -> Self {
        Tolerance {
            abs_tol: 1e-300,
            rel_tol: 1e-13,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (v, e, _) = gk15_floor(f, a, b);
    (v, e)
}

/// As [`gk15`], also returning the rounding floor `50 eps ∫|f|` of the panel.
fn gk15_floor<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let ah = half.abs();
    let value = res_k * half;
    res_abs *= ah;
    res_asc *= ah;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, floor)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrate `f` over `[points[0], points.last()]`, starting from the panels
/// delimited by `points` (sorted, at least two entries). Global adaptive
/// bisection of the panel with the largest error estimate.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "integration needs at least two points".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0;
    let push = |heap: &mut BinaryHeap<Panel>, a: f64, b: f64| {
        let (value, error, floor) = gk15_floor(&f, a, b);
        heap.push(Panel {
            a,
            b,
            value,
            error,
            floor,
        });
        (value, error)
    };
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            continue;
        }
        let (v, e) = push(&mut heap, w[0], w[1]);
        evals += 15;
        total += v;
        total_err += e;
    }
    let target = |t: f64| tol.abs_tol.max(tol.rel_tol * t.abs());
    // panels that cannot improve: rounding-limited or too narrow to split
    let mut done: Vec<Panel> = Vec::new();
    let mut narrow_err = 0.0;
    while total_err > target(total) {
        if !total.is_finite() || !total_err.is_finite() || heap.len() >= tol.max_intervals {
            return Err(Error::ToleranceNotMet {
                achieved: total_err,
                requested: target(total),
            });
        }
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if p.error <= 1.000_001 * p.floor {
            done.push(p);
            continue;
        }
        if mid <= p.a || mid >= p.b || (p.b - p.a) < 1e-13 * p.a.abs().max(p.b.abs()).max(1.0)
        {
            narrow_err += p.error;
            done.push(p);
            continue;
        }
        let (v1, e1) = push(&mut heap, p.a, mid);
        let (v2, e2) = push(&mut heap, mid, p.b);
        evals += 30;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
    }
    // recompute sums to shed accumulated rounding from the running updates
    let value: f64 = heap.iter().chain(done.iter()).map(|p| p.value).sum();
    let error: f64 = heap.iter().chain(done.iter()).map(|p| p.error).sum();
    if narrow_err > target(value) {
        return Err(Error::ToleranceNotMet {
            achieved: error,
            requested: target(value),
        });
    }
    Ok(Estimate {
        value,
        error,
        evaluations: evals,
    })
}

/// Primitive `t -> ∫_a^t f` of a smooth function on `[a, b]`, stored at
/// equally spaced nodes and completed by a single Kronrod panel.
#[derive(Clone, Debug)]
pub struct CumulativeTable {
    a: f64,
    b: f64,
    width: f64,
    values: Vec<f64>,
    f: fn(f64) -> f64,
}

impl CumulativeTable {
    pub fn new(f: fn(f64) -> f64, a: f64, b: f64, panels: usize) -> Result<Self> {
        let width = (b - a) / panels as f64;
        let mut values = Vec::with_capacity(panels + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for k in 0..panels {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == panels { b } else { lo + width };
            let est = integrate(
                f,
                lo,
                hi,
                Tolerance {
                    abs_tol: 1e-17,
                    rel_tol: 1e-15,
                    max_intervals: 200,
                },
            )?;
            acc += est.value;
            values.push(acc);
        }
        Ok(CumulativeTable {
            a,
            b,
            width,
            values,
            f,
        })
    }

    /// `∫_a^t f`, with `t` clamped to `[a, b]`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.a, self.b);
        let k = (((t - self.a) / self.width) as usize).min(self.values.len() - 2);
        let lo = self.a + k as f64 * self.width;
        if t == lo {
            return self.values[k];
        }
        self.values[k] + gk15(&self.f, lo, t).0
    }

    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_over_half_period() {
        let e = integrate(f64::sin, 0.0, PI, Tolerance::default()).unwrap();
        assert!((e.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_with_breaks() {
        let e = integrate_with_breaks(
            |x: f64| (-x * x).exp(),
            &[-12.0, -1.0, 0.0, 1.0, 12.0],
            Tolerance::tight(),
        )
        .unwrap();
        assert!((e.value - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn kink_converges() {
        let e = integrate(|x: f64| x.abs(), -1.0, 2.0, Tolerance::tight()).unwrap();
        assert!((e.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tol = Tolerance {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, tol);
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn cumulative_table_matches_closed_form() {
        let t = CumulativeTable::new(f64::cos, 0.0, 2.0, 32).unwrap();
        for &x in &[0.0f64, 0.013, 0.5, 1.234_567, 2.0, 3.0] {
            let want = x.min(2.0_f64).sin();
            assert!((t.eval(x) - want).abs() < 1e-15, "{x}");
        }
    }
}
