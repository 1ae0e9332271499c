//! Single and glued domain-wall mass functions and their antiderivatives.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::CumulativeTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallKind {
    Mollifier,
    Tanh,
    Sgn,
    CustomSampled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wall {
    pub center: f64,
    /// +1 if the wall rises from −κ∞ to +κ∞, −1 otherwise.
    pub sign: f64,
}

/// Smooth compactly supported bump `amplitude·exp(1 − 1/(1 − s²))`,
/// `s = (x − center)/half_width`, added on top of a profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn value(&self, x: f64) -> f64 {
        self.amplitude * unit_bump((x - self.center) / self.half_width)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.half_width;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s * s;
        self.amplitude * unit_bump(s) * (-2.0 * s / (d * d)) / self.half_width
    }

    /// `∫_{-∞}^x` of the bump.
    fn primitive(&self, x: f64) -> f64 {
        let s = (x - self.center) / self.half_width;
        self.amplitude * self.half_width * bump_table().eval(s)
    }
}

fn unit_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Piecewise-linear wall shape given by samples; constant beyond the ends.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledWall {
    xs: Vec<f64>,
    ks: Vec<f64>,
    /// `∫_{xs[0]}^{xs[i]}` of the interpolant
    cumulative: Vec<f64>,
    zero_offset: f64,
}

impl SampledWall {
    fn new(xs: Vec<f64>, ks: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ks.len() {
            return Err(Error::InvalidParameter(
                "sampled wall needs at least two (x, kappa) pairs".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "sample abscissae must be strictly increasing".into(),
            ));
        }
        if !(xs[0] < 0.0 && *xs.last().unwrap() > 0.0) {
            return Err(Error::InvalidParameter(
                "samples must straddle the wall center 0".into(),
            ));
        }
        let mut cumulative = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cumulative[i] = cumulative[i - 1] + 0.5 * (ks[i] + ks[i - 1]) * (xs[i] - xs[i - 1]);
        }
        let mut w = SampledWall {
            xs,
            ks,
            cumulative,
            zero_offset: 0.0,
        };
        w.zero_offset = w.primitive_from_start(0.0);
        Ok(w)
    }

    fn locate(&self, t: f64) -> usize {
        match self.xs.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        }
    }

    fn value(&self, t: f64) -> f64 {
        let n = self.xs.len();
        if t <= self.xs[0] {
            return self.ks[0];
        }
        if t >= self.xs[n - 1] {
            return self.ks[n - 1];
        }
        let i = self.locate(t);
        let w = (t - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ks[i] + w * (self.ks[i + 1] - self.ks[i])
    }

    fn slope(&self, t: f64) -> f64 {
        let n = self.xs.len();
        if t <= self.xs[0] || t >= self.xs[n - 1] {
            return 0.0;
        }
        let i = self.locate(t);
        (self.ks[i + 1] - self.ks[i]) / (self.xs[i + 1] - self.xs[i])
    }

    fn primitive_from_start(&self, t: f64) -> f64 {
        let n = self.xs.len();
        if t <= self.xs[0] {
            return self.ks[0] * (t - self.xs[0]);
        }
        if t >= self.xs[n - 1] {
            return self.cumulative[n - 1] + self.ks[n - 1] * (t - self.xs[n - 1]);
        }
        let i = self.locate(t);
        let v = self.value(t);
        self.cumulative[i] + 0.5 * (self.ks[i] + v) * (t - self.xs[i])
    }
}

/// A single or glued domain-wall mass function κ (or κ^δ).
#[derive(Clone, Debug)]
pub struct MassProfile {
    kind: WallKind,
    kappa_inf: f64,
    walls: Vec<Wall>,
    core_half_width: f64,
    half_spacing: Option<f64>,
    sampled: Option<Arc<SampledWall>>,
    bumps: Vec<Bump>,
    /// Midpoints between consecutive centers; segment `j` lies between
    /// `boundaries[j-1]` and `boundaries[j]`.
    boundaries: Vec<f64>,
}

/// Unit-amplitude mollifier wall shape built from ν(ξ) = e^{−1/ξ}.
pub fn mollifier_shape(x: f64) -> f64 {
    if x >= 1.0 {
        return 1.0;
    }
    if x <= -1.0 {
        return -1.0;
    }
    let a = nu(0.5 * (1.0 + x));
    let b = nu(0.5 * (1.0 - x));
    (a - b) / (a + b)
}

fn mollifier_shape_derivative(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let u = 0.5 * (1.0 + x);
    let v = 0.5 * (1.0 - x);
    let a = nu(u);
    let b = nu(v);
    let s = a + b;
    a * b * (1.0 / (u * u) + 1.0 / (v * v)) / (s * s)
}

fn nu(xi: f64) -> f64 {
    if xi > 0.0 {
        (-1.0 / xi).exp()
    } else {
        0.0
    }
}

fn mollifier_table() -> &'static CumulativeTable {
    static TABLE: OnceLock<CumulativeTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        CumulativeTable::new(mollifier_shape, 0.0, 1.0, 64).expect("mollifier primitive table")
    })
}

fn bump_table() -> &'static CumulativeTable {
    static TABLE: OnceLock<CumulativeTable> = OnceLock::new();
    TABLE.get_or_init(|| CumulativeTable::new(unit_bump, -1.0, 1.0, 64).expect("bump table"))
}

/// c₀ = ∫₀¹ (1 − m(y)) dy for the unit mollifier wall m, so that
/// K(x) = κ∞(|x| − c₀) for |x| ≥ 1.
pub fn mollifier_deficit() -> f64 {
    1.0 - mollifier_table().total()
}

/// `ln cosh t`, accurate for large |t|.
pub fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl MassProfile {
    /// Single wall centered at 0 with κ(+∞) = +κ∞.
    pub fn single(kind: WallKind, kappa_inf: f64) -> Result<Self> {
        if !(kappa_inf > 0.0 && kappa_inf.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa_inf must be positive, got {kappa_inf}"
            )));
        }
        let core_half_width = match kind {
            WallKind::Mollifier | WallKind::Sgn => 1.0,
            WallKind::Tanh => f64::INFINITY,
            WallKind::CustomSampled => {
                return Err(Error::InvalidParameter(
                    "custom-sampled walls are built from samples".into(),
                ))
            }
        };
        Ok(MassProfile {
            kind,
            kappa_inf,
            walls: vec![Wall {
                center: 0.0,
                sign: 1.0,
            }],
            core_half_width,
            half_spacing: None,
            sampled: None,
            bumps: Vec::new(),
            boundaries: Vec::new(),
        })
    }

    /// Single wall from (x, κ) samples, linearly interpolated. The samples
    /// must run from −κ∞ to +κ∞; κ is held constant beyond the sample range.
    pub fn custom(xs: Vec<f64>, ks: Vec<f64>) -> Result<Self> {
        let (left, right) = match (ks.first(), ks.last()) {
            (Some(&l), Some(&r)) => (l, r),
            _ => return Err(Error::InvalidParameter("no samples given".into())),
        };
        if right == 0.0 || (left + right).abs() > 1e-12 * right.abs() {
            return Err(Error::InvalidParameter(format!(
                "sampled wall must run between -kappa_inf and +kappa_inf, got {left} .. {right}"
            )));
        }
        // a falling wall is stored as the rising shape with sign −1
        let sign = right.signum();
        let ks = ks.into_iter().map(|k| sign * k).collect();
        let w = SampledWall::new(xs, ks)?;
        let core_half_width = w.xs[0].abs().max(w.xs.last().unwrap().abs());
        Ok(MassProfile {
            kind: WallKind::CustomSampled,
            kappa_inf: right.abs(),
            walls: vec![Wall { center: 0.0, sign }],
            core_half_width,
            half_spacing: None,
            sampled: Some(Arc::new(w)),
            bumps: Vec::new(),
            boundaries: Vec::new(),
        })
    }

    /// n copies of this single wall at centers −(n−1)δ, …, (n−1)δ with
    /// alternating signs, the rightmost one positive.
    pub fn glue(&self, n: usize, half_spacing: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("wall count must be at least 1".into()));
        }
        if !self.is_single() {
            return Err(Error::InvalidParameter("glue needs a single-wall base".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        if !(half_spacing > 0.0 && half_spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half spacing must be positive, got {half_spacing}"
            )));
        }
        if self.core_half_width.is_finite() && half_spacing <= self.core_half_width {
            return Err(Error::SpacingTooSmall {
                half_spacing,
                core_half_width: self.core_half_width,
            });
        }
        let centers: Vec<f64> = (0..n)
            .map(|j| (2.0 * j as f64 - (n as f64 - 1.0)) * half_spacing)
            .collect();
        let mut p = self.glue_at_centers(&centers)?;
        p.half_spacing = Some(half_spacing);
        Ok(p)
    }

    /// Glue at arbitrary increasing centers; signs alternate, rightmost positive.
    pub fn glue_at_centers(&self, centers: &[f64]) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidParameter("no wall centers given".into()));
        }
        if !self.is_single() {
            return Err(Error::InvalidParameter("glue needs a single-wall base".into()));
        }
        if centers.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "wall centers must be strictly increasing".into(),
            ));
        }
        if self.core_half_width.is_finite() {
            for w in centers.windows(2) {
                let hs = 0.5 * (w[1] - w[0]);
                if hs <= self.core_half_width {
                    return Err(Error::SpacingTooSmall {
                        half_spacing: hs,
                        core_half_width: self.core_half_width,
                    });
                }
            }
        }
        let n = centers.len();
        let walls = centers
            .iter()
            .enumerate()
            .map(|(j, &c)| Wall {
                center: c,
                sign: if (n - 1 - j) % 2 == 0 { 1.0 } else { -1.0 },
            })
            .collect();
        let boundaries = centers.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(MassProfile {
            kind: self.kind,
            kappa_inf: self.kappa_inf,
            walls,
            core_half_width: self.core_half_width,
            half_spacing: None,
            sampled: self.sampled.clone(),
            bumps: self.bumps.clone(),
            boundaries,
        })
    }

    /// The same profile plus a compactly supported bump.
    pub fn with_bump(&self, bump: Bump) -> Result<Self> {
        if !(bump.half_width > 0.0 && bump.amplitude.is_finite() && bump.center.is_finite()) {
            return Err(Error::InvalidParameter("bump needs positive width".into()));
        }
        let mut p = self.clone();
        p.bumps.push(bump);
        Ok(p)
    }

    pub fn kind(&self) -> WallKind {
        self.kind
    }

    pub fn kappa_inf(&self) -> f64 {
        self.kappa_inf
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn centers(&self) -> Vec<f64> {
        self.walls.iter().map(|w| w.center).collect()
    }

    pub fn core_half_width(&self) -> f64 {
        self.core_half_width
    }

    pub fn half_spacing(&self) -> Option<f64> {
        self.half_spacing
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn is_single(&self) -> bool {
        self.walls.len() == 1
    }

    pub fn n_walls(&self) -> usize {
        self.walls.len()
    }

    /// Largest |center|.
    pub fn outer_extent(&self) -> f64 {
        self.walls
            .iter()
            .map(|w| w.center.abs())
            .fold(0.0, f64::max)
    }

    /// Whether the single-wall shape is odd about its center.
    pub fn is_odd_shape(&self) -> bool {
        match &self.sampled {
            None => true,
            Some(w) => {
                let probe = |t: f64| w.value(t) + w.value(-t);
                w.xs.iter().all(|&t| probe(t).abs() <= 1e-12 * self.kappa_inf)
            }
        }
    }

    /// κ(+∞) (`right = true`) or κ(−∞).
    pub fn kappa_at_infinity(&self, right: bool) -> f64 {
        if right {
            self.walls.last().unwrap().sign * self.kappa_inf
        } else {
            -self.walls[0].sign * self.kappa_inf
        }
    }

    /// Wall shape centered at 0 with positive sign.
    pub fn shape(&self, t: f64) -> f64 {
        match self.kind {
            WallKind::Mollifier => self.kappa_inf * mollifier_shape(t),
            WallKind::Tanh => self.kappa_inf * t.tanh(),
            WallKind::Sgn => {
                if t > 0.0 {
                    self.kappa_inf
                } else if t < 0.0 {
                    -self.kappa_inf
                } else {
                    0.0
                }
            }
            WallKind::CustomSampled => self.sampled.as_ref().unwrap().value(t),
        }
    }

    /// Derivative of [`shape`](Self::shape); zero for sgn away from 0, slope of
    /// the interpolant for sampled walls.
    pub fn shape_derivative(&self, t: f64) -> f64 {
        match self.kind {
            WallKind::Mollifier => self.kappa_inf * mollifier_shape_derivative(t),
            WallKind::Tanh => {
                let s = 1.0 / t.cosh();
                self.kappa_inf * s * s
            }
            WallKind::Sgn => 0.0,
            WallKind::CustomSampled => self.sampled.as_ref().unwrap().slope(t),
        }
    }

    /// `∫₀^t` of the shape.
    pub fn shape_primitive(&self, t: f64) -> f64 {
        match self.kind {
            WallKind::Mollifier => {
                let a = t.abs();
                let table = mollifier_table();
                if a >= 1.0 {
                    self.kappa_inf * (table.total() + (a - 1.0))
                } else {
                    self.kappa_inf * table.eval(a)
                }
            }
            WallKind::Tanh => self.kappa_inf * ln_cosh(t),
            WallKind::Sgn => self.kappa_inf * t.abs(),
            WallKind::CustomSampled => {
                let w = self.sampled.as_ref().unwrap();
                w.primitive_from_start(t) - w.zero_offset
            }
        }
    }

    /// Index of the segment containing x.
    pub fn segment(&self, x: f64) -> usize {
        self.boundaries.partition_point(|&b| b <= x)
    }

    /// Segment boundaries (midpoints between consecutive centers).
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn kappa(&self, x: f64) -> f64 {
        let w = self.walls[self.segment(x)];
        let mut k = w.sign * self.shape(x - w.center);
        for b in &self.bumps {
            k += b.value(x);
        }
        k
    }

    pub fn kappa_prime(&self, x: f64) -> f64 {
        let w = self.walls[self.segment(x)];
        let mut k = w.sign * self.shape_derivative(x - w.center);
        for b in &self.bumps {
            k += b.derivative(x);
        }
        k
    }

    /// Points where κ is not smooth or changes character: centers, core
    /// edges, segment boundaries, bump supports. Sorted, deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        for w in &self.walls {
            pts.push(w.center);
            if self.core_half_width.is_finite() {
                pts.push(w.center - self.core_half_width);
                pts.push(w.center + self.core_half_width);
            }
            if let Some(s) = &self.sampled {
                pts.push(w.center + s.xs[0]);
                pts.push(w.center + *s.xs.last().unwrap());
            }
        }
        pts.extend_from_slice(&self.boundaries);
        for b in &self.bumps {
            pts.push(b.center - b.half_width);
            pts.push(b.center);
            pts.push(b.center + b.half_width);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        pts
    }

    /// Interior knots where κ has a kink (sampled walls), in absolute
    /// coordinates. Empty for analytic kinds.
    pub fn kinks(&self) -> Vec<f64> {
        let Some(s) = &self.sampled else {
            return Vec::new();
        };
        let mut pts = Vec::new();
        for w in &self.walls {
            for &x in &s.xs {
                pts.push(w.center + x);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts
    }

    pub fn antiderivative(&self) -> Antiderivative {
        Antiderivative::new(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AntiderivativeRule {
    /// ln cosh for tanh walls, |x| for sgn walls.
    ClosedForm,
    /// Tabulated quadrature of the wall shape (mollifier).
    Tabulated,
    /// Exact integral of the piecewise-linear interpolant.
    PiecewiseExact,
}

/// K(x) = ∫₀^x κ for a (glued) profile, assembled from the single-wall
/// primitive on each segment.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    profile: MassProfile,
    rule: AntiderivativeRule,
    tolerance: f64,
    /// additive constant per segment making the glued primitive continuous
    offsets: Vec<f64>,
    at_zero: f64,
}

impl Antiderivative {
    pub fn new(profile: &MassProfile) -> Self {
        let rule = match profile.kind {
            WallKind::Tanh | WallKind::Sgn => AntiderivativeRule::ClosedForm,
            WallKind::Mollifier => AntiderivativeRule::Tabulated,
            WallKind::CustomSampled => AntiderivativeRule::PiecewiseExact,
        };
        let tolerance = match (rule, profile.bumps.is_empty()) {
            (AntiderivativeRule::Tabulated, _) | (_, false) => 1e-14 * profile.kappa_inf,
            _ => 0.0,
        };
        let walls = &profile.walls;
        let mut offsets = vec![0.0; walls.len()];
        for j in 1..walls.len() {
            let b = profile.boundaries[j - 1];
            let left = walls[j - 1].sign * profile.shape_primitive(b - walls[j - 1].center);
            let right = walls[j].sign * profile.shape_primitive(b - walls[j].center);
            offsets[j] = offsets[j - 1] + left - right;
        }
        let mut a = Antiderivative {
            profile: profile.clone(),
            rule,
            tolerance,
            offsets,
            at_zero: 0.0,
        };
        a.at_zero = a.raw(0.0);
        a
    }

    fn raw(&self, x: f64) -> f64 {
        let p = &self.profile;
        let j = p.segment(x);
        let w = p.walls[j];
        let mut v = w.sign * p.shape_primitive(x - w.center) + self.offsets[j];
        for b in &p.bumps {
            v += b.primitive(x);
        }
        v
    }

    /// K(x) = ∫₀^x κ(y) dy.
    pub fn eval(&self, x: f64) -> f64 {
        self.raw(x) - self.at_zero
    }

    pub fn rule(&self) -> AntiderivativeRule {
        self.rule
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn profile(&self) -> &MassProfile {
        &self.profile
    }
}
