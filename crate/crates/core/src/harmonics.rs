//! Low-degree spherical harmonics built from harmonic polynomials, used as
//! curvature presets and as the weak-form test basis.
//!
//! Re/Im of (x_i + i x_j)^k is harmonic in any ambient dimension, so its
//! restriction to the sphere is a degree-k spherical harmonic. Together with
//! the zonal Legendre polynomials in the last coordinate this gives a cheap
//! spanning family through degree four.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, SphereGrid};

/// Re and Im of (x + i y)^k.
pub fn complex_power(x: f64, y: f64, k: u32) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..k {
        let (r, i) = (re * x - im * y, re * y + im * x);
        re = r;
        im = i;
    }
    (re, im)
}

/// Legendre polynomial P_k for k <= 4 (zonal harmonics in one coordinate).
pub fn legendre(k: u32, z: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => z,
        2 => 0.5 * (3.0 * z * z - 1.0),
        3 => 0.5 * (5.0 * z * z * z - 3.0 * z),
        4 => 0.125 * (35.0 * z.powi(4) - 30.0 * z * z + 3.0),
        _ => panic!("zonal harmonics implemented through degree 4"),
    }
}

/// Evaluates the indexed degree-k harmonic at an embedded point.
///
/// Indices enumerate Re/Im of (x_i + i x_j)^k over coordinate pairs i < j,
/// followed by the zonal P_k in the last coordinate (n >= 2 only).
pub fn harmonic(n: usize, degree: u32, index: usize, p: &[f64; 4]) -> Result<f64> {
    if degree == 0 {
        return Ok(1.0);
    }
    if degree > 4 {
        return Err(Error::InvalidConfig(format!(
            "harmonics are implemented through degree 4 (got {degree})"
        )));
    }
    let dim = n + 1;
    let mut cursor = 0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let (re, im) = complex_power(p[i], p[j], degree);
            if cursor == index {
                return Ok(re);
            }
            cursor += 1;
            if cursor == index {
                return Ok(im);
            }
            cursor += 1;
        }
    }
    // the Legendre zonal in the polar coordinate is a harmonic on S^2 only
    if n == 2 && cursor == index {
        return Ok(legendre(degree, p[dim - 1]));
    }
    Err(Error::InvalidConfig(format!(
        "harmonic index {index} out of range for n = {n}, degree = {degree}"
    )))
}

/// Number of harmonics `harmonic` exposes at a given degree.
pub fn harmonic_count(n: usize, degree: u32) -> usize {
    if degree == 0 {
        return 1;
    }
    let dim = n + 1;
    let pairs = dim * (dim - 1) / 2;
    2 * pairs + usize::from(n == 2)
}

/// Samples one harmonic onto a grid.
pub fn harmonic_on_grid(
    grid: &Arc<SphereGrid>,
    degree: u32,
    index: usize,
) -> Result<GridFunction> {
    let n = grid.n();
    // probe once so an out-of-range index reports an error
    harmonic(n, degree, index, &grid.points()[0])?;
    Ok(GridFunction::from_fn(grid, |p| harmonic(n, degree, index, p).unwrap()))
}

/// Smoothed indicator of the geodesic cap of radius `radius` around `center`:
/// a C^1 quadratic hinge in the chordal dot product.
pub fn cap_bump(grid: &Arc<SphereGrid>, center: &[f64; 4], radius: f64) -> GridFunction {
    let threshold = radius.cos();
    GridFunction::from_fn(grid, |p| {
        let t: f64 = (0..4).map(|d| p[d] * center[d]).sum();
        let s = (t - threshold) / (1.0 - threshold);
        if s > 0.0 {
            s * s
        } else {
            0.0
        }
    })
}

/// Constant, harmonics through degree `max_degree`, and three smoothed caps:
/// the default basis for weak-form testing.
pub fn default_test_basis(grid: &Arc<SphereGrid>, max_degree: u32) -> Vec<GridFunction> {
    let mut basis = vec![GridFunction::constant(grid, 1.0)];
    for degree in 1..=max_degree {
        for index in 0..harmonic_count(grid.n(), degree) {
            basis.push(harmonic_on_grid(grid, degree, index).unwrap());
        }
    }
    let mut north = [0.0; 4];
    north[grid.n()] = 1.0;
    let mut south = [0.0; 4];
    south[grid.n()] = -1.0;
    let east = {
        let mut e = [0.0; 4];
        e[0] = 1.0;
        e
    };
    for c in [north, south, east] {
        basis.push(cap_bump(grid, &c, 0.6));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::integrate;

    #[test]
    fn circle_harmonics_are_trig() {
        let g = SphereGrid::build(1, 32).unwrap();
        let f = harmonic_on_grid(&g, 2, 0).unwrap();
        for (i, p) in g.points().iter().enumerate() {
            let theta = p[1].atan2(p[0]);
            assert!((f.values()[i] - (2.0 * theta).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonics_integrate_to_zero_on_s2() {
        let g = SphereGrid::build(2, 12).unwrap();
        for degree in 1..=4 {
            for index in 0..harmonic_count(2, degree) {
                let f = harmonic_on_grid(&g, degree, index).unwrap();
                let q = integrate(&g, &f).unwrap();
                assert!(q.abs() < 1e-10, "degree {degree} index {index}: {q}");
            }
        }
    }

    #[test]
    fn even_harmonics_are_antipodally_symmetric() {
        let g = SphereGrid::build(3, 6).unwrap();
        for index in 0..harmonic_count(3, 2) {
            let f = harmonic_on_grid(&g, 2, index).unwrap();
            assert!(crate::grid::is_antipodally_symmetric(&f, 1e-13));
        }
    }

    #[test]
    fn out_of_range_index_rejected() {
        let g = SphereGrid::build(1, 8).unwrap();
        let count = harmonic_count(1, 2);
        assert_eq!(count, 2);
        assert!(harmonic_on_grid(&g, 2, count).is_err());
    }

    #[test]
    fn cap_bump_is_localized() {
        let g = SphereGrid::build(2, 12).unwrap();
        let north = [0.0, 0.0, 1.0, 0.0];
        let b = cap_bump(&g, &north, 0.5);
        for (i, p) in g.points().iter().enumerate() {
            if p[2] < 0.5f64.cos() {
                assert_eq!(b.values()[i], 0.0);
            } else {
                assert!(b.values()[i] > 0.0);
            }
        }
    }
}
