//! Stereographic transfer between R^n and S^n: the conformal factor, the
//! exact chordal-distance identity, the flat-space kernel operator, the
//! planar bubble solution, and the covariance check between the two charts.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, SphereGrid};
use crate::kernel::{normalization_constant, tilde_i_at_point};
use crate::special::composite_gauss;

/// Inverse stereographic projection R^n -> S^n (n = x.len() <= 3):
/// xi_j = 2 x_j / (1 + |x|^2), xi_{n+1} = (1 - |x|^2) / (1 + |x|^2).
pub fn inverse_projection(x: &[f64]) -> [f64; 4] {
    assert!(x.len() <= 3, "ambient dimension is capped at 4");
    let r2: f64 = x.iter().map(|c| c * c).sum();
    let denom = 1.0 + r2;
    let mut xi = [0.0; 4];
    for (j, &c) in x.iter().enumerate() {
        xi[j] = 2.0 * c / denom;
    }
    xi[x.len()] = (1.0 - r2) / denom;
    xi
}

/// Forward projection S^n -> R^n; returns None at the south pole.
pub fn project(xi: &[f64; 4], n: usize) -> Option<Vec<f64>> {
    let denom = 1.0 + xi[n];
    if denom.abs() < 1e-14 {
        return None;
    }
    Some(xi[..n].iter().map(|c| c / denom).collect())
}

/// Conformal factor phi(x) = (2 / (1 + |x|^2))^((n - alpha)/2) with n = x.len().
pub fn conformal_factor(x: &[f64], alpha: f64) -> f64 {
    let n = x.len() as f64;
    let r2: f64 = x.iter().map(|c| c * c).sum();
    (2.0 / (1.0 + r2)).powf((n - alpha) / 2.0)
}

/// Residual of the chordal-distance identity
/// |S(x) - S(y)| = sqrt(4 |x - y|^2 / ((1 + |x|^2)(1 + |y|^2))).
pub fn distance_identity_residual(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let xi = inverse_projection(x);
    let eta = inverse_projection(y);
    let lhs = crate::kernel::chordal_distance(&xi, &eta);
    let dx2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let rx: f64 = 1.0 + x.iter().map(|c| c * c).sum::<f64>();
    let ry: f64 = 1.0 + y.iter().map(|c| c * c).sum::<f64>();
    let rhs = (4.0 * dx2 / (rx * ry)).sqrt();
    (lhs - rhs).abs()
}

/// Quadrature grid over a truncated ball in R^n (n = 1 or 2).
#[derive(Debug, Clone)]
pub struct FlatGrid {
    n: usize,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    truncation_radius: f64,
}

impl FlatGrid {
    /// Symmetric composite-Gauss grid on [-T, T]; `radial_breaks` starts at 0
    /// and ends at the truncation radius. Panel edges double as safe kernel
    /// evaluation points.
    pub fn line(radial_breaks: &[f64], per_panel: usize) -> FlatGrid {
        assert!(radial_breaks.len() >= 2 && radial_breaks[0] == 0.0);
        let (r, w) = composite_gauss(radial_breaks, per_panel);
        let mut points = Vec::with_capacity(2 * r.len());
        let mut weights = Vec::with_capacity(2 * r.len());
        for (&ri, &wi) in r.iter().zip(&w) {
            points.push([ri, 0.0]);
            weights.push(wi);
            points.push([-ri, 0.0]);
            weights.push(wi);
        }
        FlatGrid { n: 1, points, weights, truncation_radius: *radial_breaks.last().unwrap() }
    }

    /// Polar product grid on the disc of radius `radial_breaks.last()`.
    pub fn polar(radial_breaks: &[f64], per_panel: usize, angles: usize) -> FlatGrid {
        assert!(radial_breaks.len() >= 2 && radial_breaks[0] == 0.0);
        assert!(angles >= 4);
        let (r, w) = composite_gauss(radial_breaks, per_panel);
        let dphi = 2.0 * PI / angles as f64;
        let mut points = Vec::with_capacity(r.len() * angles);
        let mut weights = Vec::with_capacity(r.len() * angles);
        for (&ri, &wi) in r.iter().zip(&w) {
            for j in 0..angles {
                let phi = dphi * j as f64;
                points.push([ri * phi.cos(), ri * phi.sin()]);
                weights.push(wi * ri * dphi);
            }
        }
        FlatGrid { n: 2, points, weights, truncation_radius: *radial_breaks.last().unwrap() }
    }

    /// Wraps externally supplied nodes and weights.
    pub fn from_parts(n: usize, points: Vec<[f64; 2]>, weights: Vec<f64>, truncation_radius: f64) -> FlatGrid {
        assert!(n == 1 || n == 2);
        assert_eq!(points.len(), weights.len());
        FlatGrid { n, points, weights, truncation_radius }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    pub fn sample<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Vec<f64> {
        self.points.iter().map(|p| f(&p[..self.n])).collect()
    }
}

fn flat_distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    (dx * dx + dy * dy).sqrt()
}

/// Kernel sum over the truncated ball at an arbitrary evaluation point:
/// sum of |x - y_j|^(alpha - n) h_j w_j (no normalization constant).
pub fn flat_kernel_sum(fgrid: &FlatGrid, alpha: f64, h: &[f64], x: &[f64; 2]) -> f64 {
    let e = alpha - fgrid.n as f64;
    fgrid
        .points
        .iter()
        .zip(&fgrid.weights)
        .zip(h)
        .map(|((p, w), hv)| {
            let d = flat_distance(x, p);
            if d == 0.0 { 0.0 } else { d.powf(e) * w * hv }
        })
        .sum()
}

/// Flat-space normalized operator c_{n,alpha} * kernel sum at every node of
/// the grid. Truncation error is the caller's concern (see the tail models).
pub fn apply_flat_operator(fgrid: &FlatGrid, alpha: f64, h: &[f64]) -> Result<Vec<f64>> {
    if h.len() != fgrid.len() {
        return Err(Error::LengthMismatch { expected: fgrid.len(), got: h.len() });
    }
    let c = normalization_constant(fgrid.n, alpha)?;
    Ok(fgrid
        .points
        .iter()
        .map(|x| c * flat_kernel_sum(fgrid, alpha, h, x))
        .collect())
}

/// Planar bubble u_eps(x) = (eps^2 + |x|^2) / eps.
pub fn bubble(eps: f64, x: &[f64; 2]) -> f64 {
    (eps * eps + x[0] * x[0] + x[1] * x[1]) / eps
}

/// Closed-form tail of the bubble integral outside radius T:
/// |x|^2 * pi eps^3 / (2 (eps^2+T^2)^2) + pi eps^3 (1/(eps^2+T^2)
/// - eps^2/(2 (eps^2+T^2)^2)); the angular cross term vanishes exactly.
fn bubble_tail(eps: f64, x: &[f64; 2], truncation: f64) -> f64 {
    let s = eps * eps + truncation * truncation;
    let x2 = x[0] * x[0] + x[1] * x[1];
    let e3 = eps * eps * eps;
    x2 * PI * e3 / (2.0 * s * s) + PI * e3 * (1.0 / s - eps * eps / (2.0 * s * s))
}

/// Result of the planar bubble verification.
#[derive(Debug, Clone, Copy)]
pub struct BubbleCheck {
    /// max relative residual of (2/pi) T(x) against u_eps(x) with the
    /// analytic tail included
    pub residual: f64,
    /// same residual with the tail dropped; must be strictly larger
    pub residual_without_tail: f64,
}

/// Verifies that (2/pi) times the truncated quadratic-kernel integral of
/// u_eps^{-3} reproduces u_eps at the sample points.
pub fn bubble_residual(eps: f64, sample_points: &[[f64; 2]], truncation_radius: f64) -> BubbleCheck {
    assert!(eps > 0.0 && truncation_radius > eps);
    let max_sample = sample_points
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
        .fold(0.0f64, f64::max);
    assert!(truncation_radius > 4.0 * max_sample, "truncation must dwarf the samples");
    let breaks = [0.0, 0.5 * eps, eps, 3.0 * eps, 10.0 * eps, 30.0 * eps, truncation_radius];
    let grid = FlatGrid::polar(&breaks, 24, 16);
    let density = grid.sample(|y| bubble(eps, &[y[0], y[1]]).powi(-3));
    let mut residual = 0.0f64;
    let mut residual_raw = 0.0f64;
    for x in sample_points {
        let truncated = flat_kernel_sum(&grid, 4.0, &density, x);
        let expect = bubble(eps, x);
        let with_tail = (2.0 / PI) * (truncated + bubble_tail(eps, x, truncation_radius));
        let without = (2.0 / PI) * truncated;
        residual = residual.max((with_tail - expect).abs() / expect);
        residual_raw = residual_raw.max((without - expect).abs() / expect);
    }
    BubbleCheck { residual, residual_without_tail: residual_raw }
}

/// Result of the two-chart covariance comparison.
#[derive(Debug, Clone)]
pub struct CovarianceCheck {
    pub discrepancy: f64,
    pub curved_side: Vec<f64>,
    pub flat_side: Vec<f64>,
}

/// Compares the normalized sphere operator of u composed with the projection
/// against the conformal-factor-weighted flat operator, each side evaluated
/// with its own quadrature.
///
/// `u` is evaluated on both charts, so it is supplied as a function on R^n
/// together with its limit at infinity (the value at the south pole).
pub fn verify_sphere_covariance(
    n: usize,
    alpha: f64,
    u: &dyn Fn(&[f64]) -> f64,
    u_at_infinity: f64,
    flat: &FlatGrid,
    sphere_resolution: usize,
    eval_points: &[[f64; 2]],
) -> Result<CovarianceCheck> {
    if n != flat.n() {
        return Err(Error::InvalidDimension(n));
    }
    let sphere = SphereGrid::build(n, sphere_resolution)?;
    let u_on_sphere = GridFunction::from_fn(&sphere, |xi| match project(xi, n) {
        Some(x) => u(&x),
        None => u_at_infinity,
    });
    let c = normalization_constant(n, alpha)?;
    let conformal_power = (n as f64 + alpha) / (n as f64 - alpha);
    let weighted: Vec<f64> = flat
        .points()
        .iter()
        .map(|p| {
            let x = &p[..n];
            conformal_factor(x, alpha).powf(conformal_power) * u(x)
        })
        .collect();
    // analytic leading tail of the flat integral: the weight decays like
    // 2^((n+alpha)/2) |y|^-(n+alpha), so the integrand outside T contributes
    // u_inf * 2^((n+alpha)/2) * |S^(n-1)|_flat * T^-n / n
    let angular = if n == 1 { 2.0 } else { 2.0 * PI };
    let tail = u_at_infinity * 2f64.powf((n as f64 + alpha) / 2.0) * angular
        * flat.truncation_radius().powi(-(n as i32))
        / n as f64;
    let mut curved_side = Vec::with_capacity(eval_points.len());
    let mut flat_side = Vec::with_capacity(eval_points.len());
    for p in eval_points {
        let x = &p[..n];
        let xi = inverse_projection(x);
        curved_side.push(tilde_i_at_point(&sphere, alpha, &u_on_sphere, &xi)?);
        let flat_sum = flat_kernel_sum(flat, alpha, &weighted, p) + tail;
        flat_side.push(c * flat_sum / conformal_factor(x, alpha));
    }
    let scale = curved_side
        .iter()
        .chain(&flat_side)
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let discrepancy = curved_side
        .iter()
        .zip(&flat_side)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale;
    Ok(CovarianceCheck { discrepancy, curved_side, flat_side })
}

/// Default flat grid for the covariance check at dimension n.
pub fn covariance_flat_grid(n: usize, truncation: f64, per_panel: usize) -> FlatGrid {
    let mut breaks = vec![0.0, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0];
    breaks.retain(|&b| b < truncation);
    breaks.push(truncation);
    if n == 1 {
        FlatGrid::line(&breaks, per_panel)
    } else {
        FlatGrid::polar(&breaks, per_panel, 48)
    }
}
