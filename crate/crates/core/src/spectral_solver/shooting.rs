//! Independent eigenvalue oracle: shoot the first-order system from both ends.
//!
//! With `β = Uα = (ip, q)` and real `E`, `𝒟α = Eα` is the real system
//! `p′ = κp − Eq`, `q′ = Ep − κq`. The Prüfer angle `θ = atan2(q, p)` obeys
//! `θ′ = E − κ sin 2θ`. The left solution starts on the decaying constant-mass
//! solution at `−X`, the right one at `+X`; `E` is an eigenvalue exactly when
//! the angle mismatch `Δ(E) = θ_L(0) − θ_R(0)` is a multiple of `π`. `Δ` is
//! increasing in `E`, so every multiple of `π` inside the window brackets one
//! eigenvalue.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic_modes::Spinor;
use crate::error::{Error, Result};
use crate::mass_profiles::MassProfile;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingOptions {
    /// Largest RK4 step.
    pub step: f64,
    /// Integration starts this many decay lengths `1/κ∞` beyond the outermost center.
    pub reach: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            step: 1e-3,
            reach: 30.0,
        }
    }
}

struct Sweep {
    xs: Vec<f64>,
    ys: Vec<[f64; 2]>,
    logs: Vec<f64>,
    theta: f64,
    /// (first index, step count, step) of each uniform segment
    segments: Vec<(usize, usize, f64)>,
}

fn mesh(profile: &MassProfile, opts: &ShootingOptions) -> Vec<f64> {
    let x_max = profile.outer_extent() + opts.reach / profile.kappa_inf();
    let mut pts: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .chain(profile.kinks())
        .filter(|x| x.abs() < x_max)
        .chain([-x_max, 0.0, x_max])
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    pts
}

fn start_angle(m: f64, energy: f64, left: bool) -> f64 {
    let s = (m * m - energy * energy).sqrt();
    match (left, m > 0.0) {
        (true, true) => energy.atan2(m + s),
        (true, false) => (-(m.abs() + s)).atan2(energy),
        (false, true) => (m + s).atan2(energy),
        (false, false) => (-energy).atan2(s + m.abs()),
    }
}

fn sweep(profile: &MassProfile, energy: f64, nodes: &[f64], opts: &ShootingOptions, left: bool, record: bool) -> Result<Sweep> {
    let m = profile.kappa_at_infinity(!left);
    let mut theta = start_angle(m, energy, left);
    let mut y = [theta.cos(), theta.sin()];
    let mut log = 0.0;
    let mut out = Sweep {
        xs: Vec::new(),
        ys: Vec::new(),
        logs: Vec::new(),
        theta,
        segments: Vec::new(),
    };
    let f = |k: f64, y: [f64; 2]| [k * y[0] - energy * y[1], energy * y[0] - k * y[1]];
    if record {
        out.xs.push(nodes[0]);
        out.ys.push(y);
        out.logs.push(0.0);
    }
    for w in nodes.windows(2) {
        let len = w[1] - w[0];
        let mut steps = ((len.abs() / opts.step).ceil() as usize).max(2);
        steps += steps % 2;
        let h = len / steps as f64;
        if record {
            out.segments.push((out.xs.len() - 1, steps, h.abs()));
        }
        for s in 0..steps {
            let x = w[0] + s as f64 * h;
            let (k0, km, k1) = (profile.kappa(x), profile.kappa(x + 0.5 * h), profile.kappa(x + h));
            let a = f(k0, y);
            let b = f(km, [y[0] + 0.5 * h * a[0], y[1] + 0.5 * h * a[1]]);
            let c = f(km, [y[0] + 0.5 * h * b[0], y[1] + 0.5 * h * b[1]]);
            let d = f(k1, [y[0] + h * c[0], y[1] + h * c[1]]);
            let next = [
                y[0] + h / 6.0 * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0]),
                y[1] + h / 6.0 * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1]),
            ];
            let r = next[0].hypot(next[1]);
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::IntegrationFailure(format!(
                    "shooting solution degenerated near x = {x} at E = {energy}"
                )));
            }
            let next = [next[0] / r, next[1] / r];
            theta += (y[0] * next[1] - y[1] * next[0]).atan2(y[0] * next[0] + y[1] * next[1]);
            log += r.ln();
            y = next;
            if record {
                out.xs.push(if s + 1 == steps { w[1] } else { x + h });
                out.ys.push(y);
                out.logs.push(log);
            }
        }
    }
    out.theta = theta;
    Ok(out)
}

fn halves(profile: &MassProfile, opts: &ShootingOptions) -> (Vec<f64>, Vec<f64>) {
    let pts = mesh(profile, opts);
    let left: Vec<f64> = pts.iter().copied().filter(|&x| x <= 0.0).collect();
    let right: Vec<f64> = pts.iter().rev().copied().filter(|&x| x >= 0.0).collect();
    (left, right)
}

/// The angle mismatch `Δ(E) = θ_L(0) − θ_R(0)`.
pub fn matching_angle(profile: &MassProfile, energy: f64, opts: &ShootingOptions) -> Result<f64> {
    let (left, right) = halves(profile, opts);
    let l = sweep(profile, energy, &left, opts, true, false)?;
    let r = sweep(profile, energy, &right, opts, false, false)?;
    Ok(l.theta - r.theta)
}

fn check_window(profile: &MassProfile, lo: f64, hi: f64) -> Result<()> {
    let k = profile.kappa_inf();
    if !(lo < hi) || !(lo > -k) || !(hi < k) {
        return Err(Error::InvalidWindow { lo, hi, kappa_inf: k });
    }
    Ok(())
}

/// Solve `g(E) = 0` on a bracket with the Illinois variant of regula falsi.
pub(crate) fn illinois<G: Fn(f64) -> Result<f64>>(g: G, mut a: f64, mut b: f64, mut ga: f64, mut gb: f64, tol: f64) -> Result<f64> {
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut c = (a * gb - b * ga) / (gb - ga);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let gc = g(c)?;
        if gc == 0.0 {
            return Ok(c);
        }
        if gc.signum() == gb.signum() {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
        // fall back to plain bisection when the bracket stalls on one side
        if (b - a).abs() > tol {
            let mid = 0.5 * (a + b);
            let gm = g(mid)?;
            if gm == 0.0 {
                return Ok(mid);
            }
            if gm.signum() == ga.signum() {
                a = mid;
                ga = gm;
            } else {
                b = mid;
                gb = gm;
            }
            side = 0;
        }
    }
    Ok(if ga.abs() < gb.abs() { a } else { b })
}

/// Gap eigenvalues inside the open window `(lo, hi)`, each to within `tol`.
pub fn shooting_oracle(profile: &MassProfile, window: (f64, f64), tol: f64) -> Result<Vec<f64>> {
    shooting_oracle_with(profile, window, tol, &ShootingOptions::default())
}

pub fn shooting_oracle_with(
    profile: &MassProfile,
    (lo, hi): (f64, f64),
    tol: f64,
    opts: &ShootingOptions,
) -> Result<Vec<f64>> {
    check_window(profile, lo, hi)?;
    let pi = std::f64::consts::PI;
    let d_lo = matching_angle(profile, lo, opts)?;
    let d_hi = matching_angle(profile, hi, opts)?;
    let (k_min, k_max) = ((d_lo / pi).floor() as i64 + 1, (d_hi / pi).ceil() as i64 - 1);
    let mut roots = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let target = k as f64 * pi;
            let g = |e: f64| matching_angle(profile, e, opts).map(|d| d - target);
            illinois(g, lo, hi, d_lo - target, d_hi - target, tol)
        })
        .collect::<Result<Vec<f64>>>()?;
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// A normalized eigenfunction from shooting, on the integration mesh with
/// composite Simpson weights.
#[derive(Clone, Debug)]
pub struct ShotMode {
    pub energy: f64,
    pub xs: Vec<f64>,
    pub values: Vec<Spinor>,
    pub weights: Vec<f64>,
}

impl ShotMode {
    /// `‖f‖` by the same quadrature.
    pub fn norm_of<F: Fn(f64) -> Spinor>(&self, f: F) -> f64 {
        self.xs
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| {
                let v = f(x);
                w * (v[0].norm_sqr() + v[1].norm_sqr())
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self, f⟩` by the same quadrature.
    pub fn inner_with<F: Fn(f64) -> Spinor>(&self, f: F) -> Complex64 {
        self.xs
            .iter()
            .zip(&self.values)
            .zip(&self.weights)
            .map(|((&x, a), w)| {
                let v = f(x);
                (a[0].conj() * v[0] + a[1].conj() * v[1]) * *w
            })
            .sum()
    }

    /// `min_φ ‖e^{iφ}self − f‖`.
    pub fn aligned_distance<F: Fn(f64) -> Spinor + Copy>(&self, f: F) -> f64 {
        let nf = self.norm_of(f);
        (1.0 + nf * nf - 2.0 * self.inner_with(f).norm()).max(0.0).sqrt()
    }
}

/// Eigenfunction at a previously located eigenvalue.
pub fn shooting_eigenfunction(profile: &MassProfile, energy: f64, opts: &ShootingOptions) -> Result<ShotMode> {
    let k = profile.kappa_inf();
    if !(energy.abs() < k) {
        return Err(Error::InvalidWindow {
            lo: energy,
            hi: energy,
            kappa_inf: k,
        });
    }
    let (left, right) = halves(profile, opts);
    let l = sweep(profile, energy, &left, opts, true, true)?;
    let r = sweep(profile, energy, &right, opts, false, true)?;
    let (yl, yr) = (*l.ys.last().unwrap(), *r.ys.last().unwrap());
    let sign = (yl[0] * yr[0] + yl[1] * yr[1]).signum();
    let (ll, lr) = (*l.logs.last().unwrap(), *r.logs.last().unwrap());
    let mut xs = l.xs.clone();
    let mut pq: Vec<[f64; 2]> = l
        .ys
        .iter()
        .zip(&l.logs)
        .map(|(y, g)| {
            let s = (g - ll).exp();
            [y[0] * s, y[1] * s]
        })
        .collect();
    let mut weights = vec![0.0; l.xs.len()];
    for &(start, steps, h) in &l.segments {
        simpson(&mut weights[start..=start + steps], h);
    }
    let offset = xs.len() - 1;
    let nr = r.xs.len();
    // the right sweep runs from +X down to 0; append it reversed, skipping x = 0
    for idx in (0..nr - 1).rev() {
        xs.push(r.xs[idx]);
        let s = sign * (r.logs[idx] - lr).exp();
        pq.push([r.ys[idx][0] * s, r.ys[idx][1] * s]);
    }
    weights.resize(xs.len(), 0.0);
    for &(start, steps, h) in &r.segments {
        // right index i maps to offset + (nr - 1 - i)
        let hi = offset + (nr - 1 - start);
        let lo = hi - steps;
        simpson(&mut weights[lo..=hi], h);
    }
    let norm2: f64 = pq.iter().zip(&weights).map(|(v, w)| w * (v[0] * v[0] + v[1] * v[1])).sum();
    let scale = 1.0 / norm2.sqrt();
    let c = std::f64::consts::FRAC_1_SQRT_2 * scale;
    let values = pq
        .iter()
        .map(|&[p, q]| [Complex64::new(q, p) * c, Complex64::new(p, q) * c])
        .collect();
    Ok(ShotMode {
        energy,
        xs,
        values,
        weights,
    })
}

fn simpson(w: &mut [f64], h: f64) {
    let n = w.len() - 1;
    for (i, wi) in w.iter_mut().enumerate() {
        let c = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        *wi += c * h / 3.0;
    }
}
