//! Closed-form zero modes, their translates, overlaps and residuals.
//!
//! A mode is `γ·d·exp(−σK(x−c))` with a constant direction `d = (1, ±i)`.
//! Overlaps reduce to a spinor contraction times a scalar quadrature, so
//! entries that vanish by contraction come out exactly zero.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mass_profiles::{Antiderivative, MassProfile};
use crate::quadrature::{integrate_with_breaks, Tolerance};

pub type Spinor = [Complex64; 2];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Improper integrals are cut at this many decay lengths from the modes.
pub const TRUNCATION: f64 = 40.0;

pub fn sigma1(v: Spinor) -> Spinor {
    [v[1], v[0]]
}

pub fn i_sigma3(v: Spinor) -> Spinor {
    [I * v[0], -I * v[1]]
}

/// `⟨a, b⟩ = conj(a)·b`.
pub fn contract(a: Spinor, b: Spinor) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

#[derive(Clone, Debug)]
pub struct AnalyticMode {
    direction: Spinor,
    exponent: Arc<Antiderivative>,
    center: f64,
    exponent_sign: f64,
    gamma: f64,
    conjugated: bool,
}

impl AnalyticMode {
    pub fn direction(&self) -> Spinor {
        self.direction
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    pub fn exponent_sign(&self) -> f64 {
        self.exponent_sign
    }

    /// Mass function whose antiderivative sets the exponent.
    pub fn exponent_profile(&self) -> &MassProfile {
        self.exponent.profile()
    }

    /// `γ·exp(−σK(x−c))`.
    pub fn scalar(&self, x: f64) -> f64 {
        self.gamma * (-self.exponent_sign * self.exponent.eval(x - self.center)).exp()
    }

    pub fn eval(&self, x: f64) -> Spinor {
        let s = self.scalar(x);
        [self.direction[0] * s, self.direction[1] * s]
    }

    /// Mass the mode is an exact zero mode for: α′ = −σ·m(x)·α.
    pub fn local_mass(&self, x: f64) -> f64 {
        self.exponent.profile().kappa(x - self.center)
    }

    pub fn derivative(&self, x: f64) -> Spinor {
        let f = -self.exponent_sign * self.local_mass(x);
        let v = self.eval(x);
        [v[0] * f, v[1] * f]
    }

    /// `(iσ₃∂ₓ + κσ₁)` applied to the mode at x, for the mass `profile`.
    pub fn apply_dirac(&self, profile: &MassProfile, x: f64) -> Spinor {
        let s = self.scalar(x);
        let m = -self.exponent_sign * self.local_mass(x);
        let k = profile.kappa(x);
        let a = i_sigma3(self.direction);
        let b = sigma1(self.direction);
        [
            s * (a[0] * m + b[0] * k),
            s * (a[1] * m + b[1] * k),
        ]
    }

    /// Half-width of the region outside which the mode is negligible.
    fn reach(&self) -> f64 {
        let p = self.exponent.profile();
        let core = if p.core_half_width().is_finite() {
            p.core_half_width()
        } else {
            5.0 / p.kappa_inf()
        };
        p.outer_extent() + core + TRUNCATION / p.kappa_inf()
    }

    fn domain(&self) -> (f64, f64) {
        let r = self.reach();
        (self.center - r, self.center + r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.exponent
            .profile()
            .breakpoints()
            .into_iter()
            .map(|b| b + self.center)
            .collect()
    }
}

/// Breakpoints for integrating products of `modes` against `profile`.
fn panel_points(modes: &[&AnalyticMode], profile: Option<&MassProfile>) -> Vec<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for m in modes {
        let (a, b) = m.domain();
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let mut pts = vec![lo, hi];
    for m in modes {
        pts.extend(m.breakpoints());
    }
    if let Some(p) = profile {
        pts.extend(p.breakpoints());
    }
    pts.retain(|&x| x >= lo && x <= hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

fn quad<F: Fn(f64) -> f64>(f: F, pts: &[f64]) -> Result<f64> {
    Ok(integrate_with_breaks(f, pts, Tolerance::tight())?.value)
}

fn norm_gamma(exponent: &Antiderivative, sign: f64) -> Result<f64> {
    let p = exponent.profile();
    let probe = AnalyticMode {
        direction: [Complex64::new(1.0, 0.0), I],
        exponent: Arc::new(exponent.clone()),
        center: 0.0,
        exponent_sign: sign,
        gamma: 1.0,
        conjugated: false,
    };
    let pts = panel_points(&[&probe], Some(p));
    let n2 = quad(
        |x| {
            let s = probe.scalar(x);
            s * s
        },
        &pts,
    )?;
    if !(n2 > 0.0 && n2.is_finite()) {
        return Err(Error::IntegrationFailure(format!(
            "zero-mode normalization integral is {n2}"
        )));
    }
    Ok(1.0 / (2.0 * n2).sqrt())
}

/// Normalized kernel element of the single-wall operator: γ(1,i)e^{−K} if
/// κ(+∞) > 0, γ(1,−i)e^{+K} otherwise.
pub fn zero_mode(profile: &MassProfile) -> Result<AnalyticMode> {
    if !profile.is_single() {
        return Err(Error::InvalidParameter(
            "zero_mode needs a single-wall profile".into(),
        ));
    }
    build_zero_mode(profile)
}

fn build_zero_mode(profile: &MassProfile) -> Result<AnalyticMode> {
    let right = profile.kappa_at_infinity(true);
    let left = profile.kappa_at_infinity(false);
    if right * left >= 0.0 {
        return Err(Error::NoExactZeroMode {
            walls: profile.n_walls(),
        });
    }
    let (sign, direction) = if right > 0.0 {
        (1.0, [Complex64::new(1.0, 0.0), I])
    } else {
        (-1.0, [Complex64::new(1.0, 0.0), -I])
    };
    let exponent = profile.antiderivative();
    let gamma = norm_gamma(&exponent, sign)?;
    Ok(AnalyticMode {
        direction,
        exponent: Arc::new(exponent),
        center: 0.0,
        exponent_sign: sign,
        gamma,
        conjugated: false,
    })
}

/// Zero modes of the single walls of `base.glue(n, δ)`, translated to the
/// wall centers. Ordered from the rightmost wall to the leftmost one (for
/// n = 2: R, L; for n = 3: R, 0, L). Negative walls get the conjugated mode.
pub fn shifted_modes(base: &MassProfile, n: usize, half_spacing: f64) -> Result<Vec<AnalyticMode>> {
    let glued = base.glue(n, half_spacing)?;
    shifted_modes_at(base, &glued.centers())
}

/// As [`shifted_modes`] for arbitrary increasing centers.
pub fn shifted_modes_at(base: &MassProfile, centers: &[f64]) -> Result<Vec<AnalyticMode>> {
    if !base.is_single() {
        return Err(Error::InvalidParameter("shifted modes need a single-wall base".into()));
    }
    if centers.is_empty() || centers.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "centers must be a nonempty increasing list".into(),
        ));
    }
    // the rising version of the base wall carries the exponent for all walls
    let rising = base.glue_at_centers(&[0.0])?;
    let prototype = build_zero_mode(&rising)?;
    let n = centers.len();
    Ok(centers
        .iter()
        .enumerate()
        .rev()
        .map(|(j, &c)| {
            let negative = (n - 1 - j) % 2 == 1;
            let mut m = prototype.clone();
            m.center = c;
            if negative {
                m.direction = [m.direction[0].conj(), m.direction[1].conj()];
                m.conjugated = true;
            }
            m
        })
        .collect())
}

/// Kernel element of a glued profile with odd wall count.
#[derive(Clone, Debug)]
pub struct ExactOddZeroMode {
    pub mode: AnalyticMode,
}

impl ExactOddZeroMode {
    pub fn gamma(&self) -> f64 {
        self.mode.gamma
    }

    pub fn eval(&self, x: f64) -> Spinor {
        self.mode.eval(x)
    }
}

pub fn exact_zero_mode(glued: &MassProfile) -> Result<ExactOddZeroMode> {
    if glued.n_walls() % 2 == 0 {
        return Err(Error::NoExactZeroMode {
            walls: glued.n_walls(),
        });
    }
    Ok(ExactOddZeroMode {
        mode: build_zero_mode(glued)?,
    })
}

/// `⟨a, b⟩`.
pub fn inner(a: &AnalyticMode, b: &AnalyticMode) -> Result<Complex64> {
    let c = contract(a.direction, b.direction);
    if c == Complex64::new(0.0, 0.0) {
        return Ok(c);
    }
    let pts = panel_points(&[a, b], None);
    Ok(c * quad(|x| a.scalar(x) * b.scalar(x), &pts)?)
}

/// `⟨a, D b⟩` with `D = iσ₃∂ₓ + κσ₁` for the mass `profile`.
pub fn interaction(a: &AnalyticMode, profile: &MassProfile, b: &AnalyticMode) -> Result<Complex64> {
    let c3 = contract(a.direction, i_sigma3(b.direction));
    let c1 = contract(a.direction, sigma1(b.direction));
    let zero = Complex64::new(0.0, 0.0);
    let pts = panel_points(&[a, b], Some(profile));
    let mut total = zero;
    if c3 != zero {
        let v = quad(
            |x| a.scalar(x) * b.scalar(x) * (-b.exponent_sign * b.local_mass(x)),
            &pts,
        )?;
        total += c3 * v;
    }
    if c1 != zero {
        let v = quad(|x| a.scalar(x) * b.scalar(x) * profile.kappa(x), &pts)?;
        total += c1 * v;
    }
    Ok(total)
}

/// `‖(iσ₃∂ₓ + κσ₁) mode‖` for the mass `profile`.
pub fn residual_norm(profile: &MassProfile, mode: &AnalyticMode) -> Result<f64> {
    let pts = panel_points(&[mode], Some(profile));
    let v = quad(
        |x| {
            let r = mode.apply_dirac(profile, x);
            r[0].norm_sqr() + r[1].norm_sqr()
        },
        &pts,
    )?;
    Ok(v.max(0.0).sqrt())
}

pub fn norm(mode: &AnalyticMode) -> Result<f64> {
    Ok(inner(mode, mode)?.re.sqrt())
}

/// Gram matrix `G_ij = ⟨m_i, m_j⟩`, row-major.
pub fn gram(modes: &[AnalyticMode]) -> Result<Vec<Vec<Complex64>>> {
    let n = modes.len();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = inner(&modes[i], &modes[j])?;
            g[i][j] = v;
            g[j][i] = v.conj();
        }
    }
    Ok(g)
}

/// Interaction matrix `A_ij = ⟨m_i, D m_j⟩`, row-major.
pub fn interaction_matrix(modes: &[AnalyticMode], profile: &MassProfile) -> Result<Vec<Vec<Complex64>>> {
    let n = modes.len();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = interaction(&modes[i], profile, &modes[j])?;
        }
    }
    Ok(a)
}

/// `Σ b_j m_j` as an evaluable spinor field.
#[derive(Clone, Debug)]
pub struct ModeCombination {
    pub coefficients: Vec<Complex64>,
    pub modes: Vec<AnalyticMode>,
}

impl ModeCombination {
    pub fn eval(&self, x: f64) -> Spinor {
        let mut v = [Complex64::new(0.0, 0.0); 2];
        for (b, m) in self.coefficients.iter().zip(&self.modes) {
            let s = m.eval(x);
            v[0] += b * s[0];
            v[1] += b * s[1];
        }
        v
    }

    pub fn apply_dirac(&self, profile: &MassProfile, x: f64) -> Spinor {
        let mut v = [Complex64::new(0.0, 0.0); 2];
        for (b, m) in self.coefficients.iter().zip(&self.modes) {
            let s = m.apply_dirac(profile, x);
            v[0] += b * s[0];
            v[1] += b * s[1];
        }
        v
    }

    pub fn norm(&self) -> Result<f64> {
        let g = gram(&self.modes)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (i, bi) in self.coefficients.iter().enumerate() {
            for (j, bj) in self.coefficients.iter().enumerate() {
                s += bi.conj() * g[i][j] * bj;
            }
        }
        Ok(s.re.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass_profiles::{mollifier_deficit, WallKind};

    fn mollifier() -> MassProfile {
        MassProfile::single(WallKind::Mollifier, 1.0).unwrap()
    }

    fn tanh() -> MassProfile {
        MassProfile::single(WallKind::Tanh, 1.0).unwrap()
    }

    #[test]
    fn tanh_normalization() {
        // ∫ sech² = 2, so γ = 1/√(2·2)
        let oracle = integrate_with_breaks(
            |x: f64| 1.0 / (x.cosh() * x.cosh()),
            &[-50.0, 0.0, 50.0],
            Tolerance::tight(),
        )
        .unwrap()
        .value;
        assert!((oracle - 2.0).abs() < 1e-13);
        let m = zero_mode(&tanh()).unwrap();
        assert!((m.gamma() - 0.5).abs() < 1e-13);
        for &x in &[-3.0, 0.0, 1.7] {
            let v = m.eval(x);
            let s = 0.5 / f64::cosh(x);
            assert!((v[0] - Complex64::new(s, 0.0)).norm() < 1e-14);
            assert!((v[1] - Complex64::new(0.0, s)).norm() < 1e-14);
        }
    }

    #[test]
    fn mollifier_gamma_and_tail() {
        let m = zero_mode(&mollifier()).unwrap();
        assert!((m.gamma() - 0.578_111_450_822_389_4).abs() < 1e-12);
        assert!((norm(&m).unwrap() - 1.0).abs() < 1e-12);
        let r = m.scalar(5.0) / m.scalar(4.0);
        assert!((r - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn flipped_wall_mode() {
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let ks: Vec<f64> = xs.iter().map(|&x| -mollifier().kappa(x)).collect();
        let p = MassProfile::custom(xs, ks).unwrap();
        assert_eq!(p.kappa_at_infinity(true), -1.0);
        let m = zero_mode(&p).unwrap();
        assert_eq!(m.direction()[1], -I);
        assert!(residual_norm(&p, &m).unwrap() < 1e-10);
        assert!((norm(&m).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decay_envelope_bounded() {
        let m = zero_mode(&mollifier()).unwrap();
        let mut sup: f64 = 0.0;
        for i in 0..=600 {
            let x = -30.0 + 0.1 * i as f64;
            let v = m.eval(x);
            sup = sup.max((v[0].norm_sqr() + v[1].norm_sqr()).sqrt() * x.abs().exp());
        }
        // γ√2 e^{c₀} is the exact envelope constant outside the core
        let c = m.gamma() * 2f64.sqrt() * mollifier_deficit().exp();
        assert!(sup <= c * (1.0 + 1e-12), "{sup} {c}");
    }

    #[test]
    fn two_wall_orthogonality() {
        let modes = shifted_modes(&mollifier(), 2, 3.0).unwrap();
        assert_eq!(modes[0].center(), 3.0);
        assert_eq!(modes[1].center(), -3.0);
        assert!(modes[1].is_conjugated());
        assert_eq!(inner(&modes[1], &modes[0]).unwrap(), Complex64::new(0.0, 0.0));
        let g = gram(&modes).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[i][j] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn three_wall_overlaps() {
        let base = tanh();
        let modes = shifted_modes(&base, 3, 3.0).unwrap();
        let (r, z, l) = (&modes[0], &modes[1], &modes[2]);
        assert_eq!(inner(l, z).unwrap().norm(), 0.0);
        assert_eq!(inner(z, r).unwrap().norm(), 0.0);
        let lr = inner(l, r).unwrap().norm();
        assert!(lr > 0.0);
        // |⟨L,R⟩| ≲ C e^{−4δ}; for sech profiles C ~ 4·(2δ)·γ²
        assert!(lr < 50.0 * (-12.0f64).exp(), "{lr}");
    }

    #[test]
    fn three_wall_outer_overlap_decay() {
        let base = mollifier();
        let c = {
            let m = shifted_modes(&base, 3, 2.0).unwrap();
            inner(&m[2], &m[0]).unwrap().norm() * (8.0f64).exp()
        };
        for d in [3.0, 4.0, 5.0, 6.0] {
            let m = shifted_modes(&base, 3, d).unwrap();
            let v = inner(&m[2], &m[0]).unwrap().norm();
            assert!(v > 0.0);
            // δe^{−4δ} shape: constant measured at δ=2 times a linear factor
            assert!(v <= c * d / 2.0 * (-4.0 * d).exp() * 1.0001, "{d} {v}");
        }
    }

    #[test]
    fn exact_mode_single_wall_agrees() {
        let base = mollifier();
        let e = exact_zero_mode(&base).unwrap();
        let z = zero_mode(&base).unwrap();
        for i in 0..200 {
            let x = -10.0 + 0.1 * i as f64;
            let a = e.eval(x);
            let b = z.eval(x);
            assert!((a[0] - b[0]).norm() < 1e-12 && (a[1] - b[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_mode_three_walls() {
        let glued = mollifier().glue(3, 2.0).unwrap();
        let e = exact_zero_mode(&glued).unwrap();
        assert!(residual_norm(&glued, &e.mode).unwrap() <= 1e-9);
        assert!((norm(&e.mode).unwrap() - 1.0).abs() < 1e-10);
        assert!(matches!(
            exact_zero_mode(&mollifier().glue(2, 2.0).unwrap()),
            Err(Error::NoExactZeroMode { walls: 2 })
        ));
    }

    #[test]
    fn residuals_of_shifted_modes() {
        let base = mollifier();
        let own = zero_mode(&base).unwrap();
        assert!(residual_norm(&base, &own).unwrap() <= 1e-10);
        let res = |d: f64| {
            let g = base.glue(2, d).unwrap();
            let m = shifted_modes(&base, 2, d).unwrap();
            residual_norm(&g, &m[0]).unwrap()
        };
        let (r4, r5) = (res(4.0), res(5.0));
        assert!(r4 <= 2.0 * (-8.0f64).exp());
        let ratio = r5 / r4;
        let want = (-2.0f64).exp();
        assert!((ratio / want - 1.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn two_wall_interaction() {
        let base = mollifier();
        let g0 = zero_mode(&base).unwrap().gamma();
        let k = base.antiderivative();
        for d in [2.0, 3.0, 4.0, 5.0] {
            let glued = base.glue(2, d).unwrap();
            let m = shifted_modes(&base, 2, d).unwrap();
            let a = interaction_matrix(&m, &glued).unwrap();
            let want = 2.0 * g0 * g0 * (-2.0 * k.eval(d)).exp();
            assert!((a[1][0] - Complex64::new(0.0, want)).norm() <= 1e-8, "{d}");
            assert!((a[0][1] - Complex64::new(0.0, -want)).norm() <= 1e-8, "{d}");
            // tight relative agreement as well
            assert!((a[1][0].im / want - 1.0).abs() < 1e-10);
            assert_eq!(a[0][0].norm(), 0.0);
            assert_eq!(a[1][1].norm(), 0.0);
        }
    }
}
