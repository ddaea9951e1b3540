//! Exact scattered field of a penetrable disk under plane-wave incidence,
//! by separation of variables in disk-centered polar coordinates.
//!
//! Serves both as the fast forward engine for disk scenes and as the oracle
//! the boundary-integral solver is validated against.
//!
//! With incidence direction `eta` at angle `alpha`, the fields in the frame
//! of the disk (radius `a`, center `c`) are
//!
//! ```text
//! u_inc = e^{i k0 eta.c} sum_n i^n          J_n(k0 r) e^{i n (psi - alpha)}
//! u_dif = e^{i k0 eta.c} sum_n i^n b_{|n|}  H_n(k0 r) e^{i n (psi - alpha)}
//! u_int = e^{i k0 eta.c} sum_n i^n c_{|n|}  J_n(k* r) e^{i n (psi - alpha)}
//! ```
//!
//! and for each mode the pair `(b_n, c_n)` enforces continuity of `u` and of
//! `(1/mu) du/dr` at `r = a`. The per-mode system depends on `|n|` only,
//! which makes the stored coefficients symmetric in the order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{bessel_j, deriv_h1, deriv_j, hankel1};
use crate::types::{DiskScatterer, PhysicalParams, Point2, Scene};

/// `i^n` for any signed `n`, exact.
pub(crate) fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Truncation order for a disk of size parameter `k0 a`.
pub fn auto_truncation(k0a: f64) -> usize {
    (k0a + 4.0 * k0a.cbrt() + 10.0).ceil() as usize
}

/// Scattered- and interior-mode coefficients of one disk under one incidence.
#[derive(Debug, Clone)]
pub struct ModalCoefficients {
    truncation: usize,
    /// `b_{|n|}`, indexed by `|n| = 0..=N`.
    b: Vec<Complex64>,
    /// `c_{|n|}`, indexed by `|n| = 0..=N`.
    c: Vec<Complex64>,
    disk: DiskScatterer,
    params: PhysicalParams,
    eta: Point2,
    /// Incidence angle `alpha = atan2(eta_2, eta_1)`.
    alpha: f64,
    /// Plane-wave phase at the disk center, `e^{i k0 eta . c}`.
    center_phase: Complex64,
}

impl ModalCoefficients {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn disk(&self) -> DiskScatterer {
        self.disk
    }

    pub fn incidence(&self) -> Point2 {
        self.eta
    }

    /// Scattered-mode coefficient for any order in `-N..=N`.
    pub fn b(&self, n: i32) -> Complex64 {
        self.b[n.unsigned_abs() as usize]
    }

    /// Interior-mode coefficient for any order in `-N..=N`.
    pub fn c(&self, n: i32) -> Complex64 {
        self.c[n.unsigned_abs() as usize]
    }

    /// Test hook: scales every scattered coefficient by `1 + delta`, which
    /// breaks the transmission matching by a relative `delta`.
    pub fn with_scattering_perturbation(&self, delta: f64) -> ModalCoefficients {
        let mut out = self.clone();
        for b in &mut out.b {
            *b *= 1.0 + delta;
        }
        out
    }

    fn frame(&self, x: Point2) -> (f64, f64) {
        let d = x - self.disk.center;
        (d.norm(), d.x2.atan2(d.x1) - self.alpha)
    }

    /// Scattered field `u_dif` at a point strictly outside the disk.
    pub fn scattered_field(&self, x: Point2) -> Result<Complex64> {
        let (rho, theta) = self.frame(x);
        if rho <= self.disk.radius {
            return Err(Error::domain(
                "x",
                format!(
                    "field point at distance {rho} from the center is not \
                     strictly outside the disk of radius {}",
                    self.disk.radius
                ),
            ));
        }
        let k0 = self.params.k0;
        let mut sum = self.b[0] * hankel1(0, k0 * rho)?;
        for n in 1..=self.truncation {
            let h = hankel1(n as u32, k0 * rho)?;
            sum += 2.0 * (n as f64 * theta).cos() * i_pow(n as i32) * self.b[n] * h;
        }
        Ok(self.center_phase * sum)
    }

    /// Total field at a point inside the disk (`rho <= a`).
    pub fn interior_field(&self, x: Point2) -> Result<Complex64> {
        let (rho, theta) = self.frame(x);
        if rho > self.disk.radius {
            return Err(Error::domain(
                "x",
                "interior_field needs a point inside the disk".to_string(),
            ));
        }
        let ks = self.params.k_star;
        let mut sum = self.c[0] * Complex64::from(bessel_j(0, ks * rho)?);
        for n in 1..=self.truncation {
            let j = bessel_j(n as u32, ks * rho)?;
            sum += 2.0 * (n as f64 * theta).cos() * j * i_pow(n as i32) * self.c[n];
        }
        Ok(self.center_phase * sum)
    }

    /// Maximum moduli of the two transmission jumps over `n_samples` points
    /// of the boundary circle: `(jump of u, jump of (1/mu) du/dnu)`.
    pub fn boundary_residuals(&self, n_samples: usize) -> Result<(f64, f64)> {
        let a = self.disk.radius;
        let k0 = self.params.k0;
        let ks = self.params.k_star;
        let p = &self.params;
        let nmax = self.truncation;

        // Radial tables at r = a.
        let mut h = Vec::with_capacity(nmax + 1);
        let mut hp = Vec::with_capacity(nmax + 1);
        let mut js = Vec::with_capacity(nmax + 1);
        let mut jsp = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax as u32 {
            h.push(hankel1(n, k0 * a)?);
            hp.push(deriv_h1(n, k0 * a)?);
            js.push(bessel_j(n, ks * a)?);
            jsp.push(deriv_j(n, ks * a)?);
        }

        let mut jump_u = 0.0_f64;
        let mut jump_flux = 0.0_f64;
        for m in 0..n_samples {
            let psi = 2.0 * std::f64::consts::PI * m as f64 / n_samples as f64;
            let theta = psi - self.alpha;
            let radial = Point2::new(psi.cos(), psi.sin());
            let point = self.disk.center + radial * a;

            let u_inc = (Complex64::i() * k0 * self.eta.dot(point)).exp();
            let du_inc = Complex64::i() * k0 * self.eta.dot(radial) * u_inc;

            let mut u_dif = self.b[0] * h[0];
            let mut du_dif = self.b[0] * hp[0] * k0;
            let mut u_int = self.c[0] * js[0];
            let mut du_int = self.c[0] * jsp[0] * ks;
            for n in 1..=nmax {
                let w = 2.0 * (n as f64 * theta).cos() * i_pow(n as i32);
                u_dif += w * self.b[n] * h[n];
                du_dif += w * self.b[n] * hp[n] * k0;
                u_int += w * self.c[n] * js[n];
                du_int += w * self.c[n] * jsp[n] * ks;
            }
            u_dif *= self.center_phase;
            du_dif *= self.center_phase;
            u_int *= self.center_phase;
            du_int *= self.center_phase;

            let ju = (u_inc + u_dif - u_int).norm();
            let jf = ((du_inc + du_dif) / p.mu0 - du_int / p.mu_star).norm();
            jump_u = jump_u.max(ju);
            jump_flux = jump_flux.max(jf);
        }
        Ok((jump_u, jump_flux))
    }
}

/// Solves the per-mode transmission systems for a disk scene.
///
/// `truncation = None` applies the [`auto_truncation`] rule.
pub fn modal_coefficients(
    scene: &Scene,
    eta: Point2,
    truncation: Option<usize>,
) -> Result<ModalCoefficients> {
    let disk = scene
        .object
        .as_disk()
        .ok_or_else(|| Error::domain("scene.object", "the modal series engine needs a disk"))?;
    if (eta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::domain(
            "eta",
            format!("incidence must be a unit vector, |eta| = {}", eta.norm()),
        ));
    }
    let p = scene.params;
    let a = disk.radius;
    let nmax = truncation.unwrap_or_else(|| auto_truncation(p.k0 * a));

    let q0 = p.k0 / p.mu0;
    let qs = p.k_star / p.mu_star;
    let mut b = Vec::with_capacity(nmax + 1);
    let mut c = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax as u32 {
        let j0r = bessel_j(n, p.k0 * a)?;
        let j0p = deriv_j(n, p.k0 * a)?;
        let h = hankel1(n, p.k0 * a)?;
        let hp = deriv_h1(n, p.k0 * a)?;
        let jsr = bessel_j(n, p.k_star * a)?;
        let jsp = deriv_j(n, p.k_star * a)?;

        // [ h       -jsr    ] [b]   [ -j0r     ]
        // [ q0 hp   -qs jsp ] [c] = [ -q0 j0p  ]
        let det = jsr * (q0 * hp) - h * (qs * jsp);
        if det.norm() < 1e-300 {
            return Err(Error::Resonance { mode: n as i32 });
        }
        let num_b = Complex64::from(j0r * qs * jsp - jsr * q0 * j0p);
        let num_c = q0 * (j0r * hp - h * j0p);
        b.push(num_b / det);
        c.push(num_c / det);
    }

    Ok(ModalCoefficients {
        truncation: nmax,
        b,
        c,
        disk,
        params: p,
        eta,
        alpha: eta.x2.atan2(eta.x1),
        center_phase: (Complex64::i() * p.k0 * eta.dot(disk.center)).exp(),
    })
}

/// Splits a complex field value into `(amplitude, phase)` with the phase in
/// `(-pi, pi]` and the phase of zero defined as zero.
pub fn amplitude_phase(u: Complex64) -> (f64, f64) {
    let amplitude = u.norm();
    if amplitude == 0.0 {
        return (0.0, 0.0);
    }
    let mut phase = u.im.atan2(u.re);
    if phase <= -std::f64::consts::PI {
        phase = std::f64::consts::PI;
    }
    (amplitude, phase)
}
