//! Chordal distances, the kernel normalization constant, and dense Nystrom
//! realizations of the supercritical integral operators.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, SphereGrid};
use crate::special::{composite_gauss, gamma, zeta};

/// Euclidean distance between two points of S^n in the ambient space.
pub fn chordal_distance(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for d in 0..4 {
        let t = a[d] - b[d];
        s += t * t;
    }
    s.sqrt()
}

/// Normalization constant c_{n,alpha} with 1/c = 2^(alpha-1) |S^(n-1)|
/// Gamma(n/2) Gamma(alpha/2) / Gamma((n+alpha)/2).
pub fn normalization_constant(n: usize, alpha: f64) -> Result<f64> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidDimension(n));
    }
    if alpha <= 0.0 || (alpha - n as f64).abs() < 1e-12 {
        return Err(Error::AlphaInvalid { n, alpha });
    }
    let equator = match n {
        1 => 2.0, // |S^0| is two points
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    };
    let nf = n as f64;
    let inv = 2f64.powf(alpha - 1.0) * equator * gamma(nf / 2.0) * gamma(alpha / 2.0)
        / gamma((nf + alpha) / 2.0);
    Ok(1.0 / inv)
}

/// Independent quadrature of the defining integral of 1/c_{n,alpha}.
///
/// Reduces to the geodesic polar angle: |S^(n-1)| times the integral over
/// [0, pi] of (2 sin(g/2))^(alpha-n) sin^(n-1)(g), evaluated on a composite
/// Gauss rule graded toward g = 0 where fractional powers lose smoothness.
/// `resolution` bounds the total number of 1-d nodes.
pub fn chordal_moment_quadrature(n: usize, alpha: f64, resolution: usize) -> Result<f64> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidDimension(n));
    }
    if alpha <= 0.0 || (alpha - n as f64).abs() < 1e-12 {
        return Err(Error::AlphaInvalid { n, alpha });
    }
    let equator = match n {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    };
    let breaks = [0.0, PI / 256.0, PI / 64.0, PI / 16.0, PI / 4.0, PI];
    let per_panel = (resolution / (breaks.len() - 1)).max(4);
    let (x, w) = composite_gauss(&breaks, per_panel);
    let s = alpha - n as f64;
    let quad: f64 = x
        .iter()
        .zip(&w)
        .map(|(&g, &wg)| wg * (2.0 * (g / 2.0).sin()).powf(s) * g.sin().powi(n as i32 - 1))
        .sum();
    Ok(equator * quad)
}

/// Dense realization of f -> integral of R(eta) f(eta) |xi - eta|^(alpha-n).
///
/// Entries are `A[i][j] = R_j |xi_i - xi_j|^(alpha-n) w_j`. On the uniform
/// circle grid the diagonal carries the Euler-Maclaurin constant of the
/// |angle|^(alpha-1) kink, -2 zeta(1-alpha) h^alpha R_i; everywhere else it
/// is exactly zero because the kernel vanishes at zero distance.
#[derive(Debug)]
pub struct KernelOperator {
    grid: Arc<SphereGrid>,
    alpha: f64,
    r_weight: GridFunction,
    matrix: Vec<f64>,
}

/// Raises a chordal distance to alpha - n, with the two exponents the
/// acceptance problems use short-circuited.
#[inline]
fn kernel_power(d: f64, exponent: f64) -> f64 {
    if exponent == 1.0 {
        d
    } else if exponent == 2.0 {
        d * d
    } else {
        d.powf(exponent)
    }
}

/// Euler-Maclaurin diagonal constant for the uniform circle rule; zero for
/// every other grid family.
fn circle_diagonal_correction(grid: &SphereGrid, alpha: f64) -> f64 {
    match grid.circle_spacing() {
        Some(h) => -2.0 * zeta(1.0 - alpha) * h.powf(alpha),
        None => 0.0,
    }
}

/// Assembles the dense kernel operator for alpha > n and strictly positive R.
pub fn assemble_kernel(
    grid: &Arc<SphereGrid>,
    alpha: f64,
    r_weight: &GridFunction,
) -> Result<KernelOperator> {
    if alpha <= grid.n() as f64 {
        return Err(Error::AlphaNotSupercritical { n: grid.n(), alpha });
    }
    if !r_weight.lives_on(grid) {
        return Err(Error::GridMismatch);
    }
    r_weight.require_positive()?;
    let m = grid.len();
    let exponent = alpha - grid.n() as f64;
    let points = grid.points();
    let weights = grid.weights();
    let rv = r_weight.values();
    let diag = circle_diagonal_correction(grid, alpha);
    let mut matrix = vec![0.0; m * m];
    matrix
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(i, row)| {
            for j in 0..m {
                if j == i {
                    row[j] = diag * rv[i];
                } else {
                    row[j] = rv[j] * kernel_power(chordal_distance(&points[i], &points[j]), exponent) * weights[j];
                }
            }
        });
    Ok(KernelOperator { grid: Arc::clone(grid), alpha, r_weight: r_weight.clone(), matrix })
}

impl KernelOperator {
    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r_weight(&self) -> &GridFunction {
        &self.r_weight
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.grid.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.grid.len();
        &self.matrix[i * m..(i + 1) * m]
    }

    /// Matrix-vector product realizing I_{alpha,R} f at every node.
    ///
    /// Rows are summed sequentially so results do not depend on the thread
    /// count.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if !f.lives_on(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let m = self.grid.len();
        let fv = f.values();
        let mut out = vec![0.0; m];
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let row = &self.matrix[i * m..(i + 1) * m];
            *o = row.iter().zip(fv).map(|(a, b)| a * b).sum();
        });
        GridFunction::new(&self.grid, out)
    }

    /// Writes the dense matrix as CSV rows (debugging aid, not a stable format).
    pub fn write_matrix_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        for i in 0..self.grid.len() {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Normalized operator: c_{n,alpha} times the quadrature of
/// |xi - eta|^(alpha-n) h(eta), so that the constant one maps to one.
pub fn apply_tilde_i(grid: &Arc<SphereGrid>, alpha: f64, h: &GridFunction) -> Result<GridFunction> {
    if !h.lives_on(grid) {
        return Err(Error::GridMismatch);
    }
    let c = normalization_constant(grid.n(), alpha)?;
    let exponent = alpha - grid.n() as f64;
    let points = grid.points();
    let weights = grid.weights();
    let hv = h.values();
    let diag = if alpha > grid.n() as f64 { circle_diagonal_correction(grid, alpha) } else { 0.0 };
    let m = grid.len();
    let mut out = vec![0.0; m];
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        let mut sum = diag * hv[i];
        for j in 0..m {
            if j != i {
                sum += kernel_power(chordal_distance(&points[i], &points[j]), exponent)
                    * weights[j]
                    * hv[j];
            }
        }
        *o = c * sum;
    });
    GridFunction::new(grid, out)
}

/// Evaluates the normalized operator at an arbitrary point of the sphere
/// (not necessarily a node). No diagonal correction applies off the grid.
pub fn tilde_i_at_point(
    grid: &Arc<SphereGrid>,
    alpha: f64,
    h: &GridFunction,
    point: &[f64; 4],
) -> Result<f64> {
    if !h.lives_on(grid) {
        return Err(Error::GridMismatch);
    }
    let c = normalization_constant(grid.n(), alpha)?;
    let exponent = alpha - grid.n() as f64;
    let sum: f64 = grid
        .points()
        .iter()
        .zip(grid.weights())
        .zip(h.values())
        .map(|((p, w), v)| kernel_power(chordal_distance(point, p), exponent) * w * v)
        .sum();
    Ok(c * sum)
}
