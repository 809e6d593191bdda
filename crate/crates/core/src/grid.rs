//! Antipodally closed quadrature grids on S^n (n = 1, 2, 3) and functions
//! sampled on them.
//!
//! Construction keeps the antipodal involution structural: the second half of
//! every angular axis is built by negating the first half, so paired nodes are
//! exact sign flips of each other and paired weights are bit-identical.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::special::gauss_legendre;

/// Quadrature grid on S^n embedded in R^{n+1}.
///
/// Points are stored padded to four coordinates; the unused trailing entries
/// are zero so chordal distances can ignore the dimension.
#[derive(Debug)]
pub struct SphereGrid {
    n: usize,
    resolution: usize,
    points: Vec<[f64; 4]>,
    weights: Vec<f64>,
    antipode: Vec<usize>,
}

/// Surface measure of S^n for n = 1, 2, 3.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        _ => panic!("unsupported sphere dimension {n}"),
    }
}

impl SphereGrid {
    /// Builds the grid for dimension `n` at the given mesh parameter.
    ///
    /// n = 1: uniform angles with trapezoid weights. n = 2: Gauss-Legendre in
    /// cos(polar) times a uniform azimuth. n = 3: Gauss-Chebyshev (second
    /// kind) in the hyperpolar angle times the S^2 product rule. The
    /// resolution must be even so the antipodal map lands on nodes.
    pub fn build(n: usize, resolution: usize) -> Result<Arc<SphereGrid>> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidDimension(n));
        }
        if resolution < 4 || resolution % 2 != 0 {
            return Err(Error::InvalidResolution(resolution));
        }
        let grid = match n {
            1 => Self::build_circle(resolution),
            2 => Self::build_s2(resolution),
            _ => Self::build_s3(resolution),
        };
        Ok(Arc::new(grid))
    }

    fn build_circle(m: usize) -> SphereGrid {
        let mut points = vec![[0.0; 4]; m];
        let w = 2.0 * PI / m as f64;
        for i in 0..m / 2 {
            let theta = 2.0 * PI * i as f64 / m as f64;
            points[i] = [theta.cos(), theta.sin(), 0.0, 0.0];
            points[i + m / 2] = [-points[i][0], -points[i][1], 0.0, 0.0];
        }
        let antipode = (0..m).map(|i| (i + m / 2) % m).collect();
        SphereGrid { n: 1, resolution: m, points, weights: vec![w; m], antipode }
    }

    /// Uniform azimuth cos/sin table with the second half as exact negations.
    fn azimuth_table(m: usize) -> Vec<(f64, f64)> {
        let mut t = vec![(0.0, 0.0); m];
        for j in 0..m / 2 {
            let phi = 2.0 * PI * j as f64 / m as f64;
            t[j] = (phi.cos(), phi.sin());
            t[j + m / 2] = (-t[j].0, -t[j].1);
        }
        t
    }

    fn build_s2(m: usize) -> SphereGrid {
        let (z, zw) = gauss_legendre(m);
        let az = Self::azimuth_table(m);
        let wphi = 2.0 * PI / m as f64;
        let count = m * m;
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut antipode = vec![0usize; count];
        let rho: Vec<f64> = z.iter().map(|zi| (1.0 - zi * zi).sqrt()).collect();
        for k in 0..m {
            for j in 0..m {
                points.push([rho[k] * az[j].0, rho[k] * az[j].1, z[k], 0.0]);
                weights.push(zw[k] * wphi);
            }
        }
        for k in 0..m {
            for j in 0..m {
                antipode[k * m + j] = (m - 1 - k) * m + (j + m / 2) % m;
            }
        }
        SphereGrid { n: 2, resolution: m, points, weights, antipode }
    }

    fn build_s3(m: usize) -> SphereGrid {
        // hyperpolar angle chi: Gauss-Chebyshev second kind handles the
        // sin^2(chi) surface factor exactly; nodes chi_k = k pi / (m+1)
        let mut cchi = vec![0.0; m];
        let mut schi = vec![0.0; m];
        let mut wchi = vec![0.0; m];
        for a in 0..m / 2 {
            let chi = (a + 1) as f64 * PI / (m + 1) as f64;
            cchi[a] = chi.cos();
            schi[a] = chi.sin();
            wchi[a] = PI / (m + 1) as f64 * schi[a] * schi[a];
            cchi[m - 1 - a] = -cchi[a];
            schi[m - 1 - a] = schi[a];
            wchi[m - 1 - a] = wchi[a];
        }
        let (t, tw) = gauss_legendre(m); // t = cos(theta) on the S^2 factor
        let st: Vec<f64> = t.iter().map(|ti| (1.0 - ti * ti).sqrt()).collect();
        let az = Self::azimuth_table(m);
        let wphi = 2.0 * PI / m as f64;
        let count = m * m * m;
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut antipode = vec![0usize; count];
        for a in 0..m {
            for b in 0..m {
                for j in 0..m {
                    points.push([
                        schi[a] * st[b] * az[j].0,
                        schi[a] * st[b] * az[j].1,
                        schi[a] * t[b],
                        cchi[a],
                    ]);
                    weights.push(wchi[a] * tw[b] * wphi);
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for j in 0..m {
                    let idx = (a * m + b) * m + j;
                    antipode[idx] = ((m - 1 - a) * m + (m - 1 - b)) * m + (j + m / 2) % m;
                }
            }
        }
        SphereGrid { n: 3, resolution: m, points, weights, antipode }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 4]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn antipode(&self) -> &[usize] {
        &self.antipode
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Node spacing 2 pi / m of the uniform circle grid.
    pub fn circle_spacing(&self) -> Option<f64> {
        (self.n == 1).then(|| 2.0 * PI / self.resolution as f64)
    }

    /// Writes one CSV row per node: index, coordinates, weight, antipode index.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let dim = self.n + 1;
        let coord_header: Vec<String> = (0..dim).map(|d| format!("x{d}")).collect();
        writeln!(out, "index,{},weight,antipode", coord_header.join(","))?;
        for (i, p) in self.points.iter().enumerate() {
            let coords: Vec<String> = p[..dim].iter().map(|c| format!("{c:.17e}")).collect();
            writeln!(out, "{i},{},{:.17e},{}", coords.join(","), self.weights[i], self.antipode[i])?;
        }
        Ok(())
    }
}

/// Real values sampled at the nodes of one grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: &Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid: Arc::clone(grid), values })
    }

    pub fn constant(grid: &Arc<SphereGrid>, c: f64) -> Self {
        Self { grid: Arc::clone(grid), values: vec![c; grid.len()] }
    }

    pub fn from_fn<F: FnMut(&[f64; 4]) -> f64>(grid: &Arc<SphereGrid>, mut f: F) -> Self {
        let values = grid.points().iter().map(|p| f(p)).collect();
        Self { grid: Arc::clone(grid), values }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    pub fn lives_on(&self, grid: &Arc<SphereGrid>) -> bool {
        Arc::ptr_eq(&self.grid, grid)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Fails unless every value is strictly positive.
    pub fn require_positive(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::NonpositiveValue { index: i, value: v });
            }
        }
        Ok(())
    }
}

/// Quadrature of `f` over the sphere: sum of w_i f_i.
pub fn integrate(grid: &Arc<SphereGrid>, f: &GridFunction) -> Result<f64> {
    if !f.lives_on(grid) {
        return Err(Error::GridMismatch);
    }
    Ok(grid.weights().iter().zip(f.values()).map(|(w, v)| w * v).sum())
}

/// Even part of `f` under the antipodal map; idempotent bit for bit.
pub fn symmetrize(f: &GridFunction) -> GridFunction {
    let grid = f.grid();
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| 0.5 * (v + f.values()[grid.antipode()[i]]))
        .collect();
    GridFunction { grid: Arc::clone(grid), values }
}

/// True when max_i |f_i - f_{antipode(i)}| <= tol * max_i |f_i|.
pub fn is_antipodally_symmetric(f: &GridFunction, tol: f64) -> bool {
    antipodal_defect(f) <= tol * f.max_abs()
}

/// Maximum antipodal mismatch max_i |f_i - f_{antipode(i)}|.
pub fn antipodal_defect(f: &GridFunction) -> f64 {
    let anti = f.grid().antipode();
    f.values()
        .iter()
        .enumerate()
        .fold(0.0f64, |m, (i, &v)| m.max((v - f.values()[anti[i]]).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_arguments() {
        assert!(SphereGrid::build(0, 8).is_err());
        assert!(SphereGrid::build(4, 8).is_err());
        assert!(SphereGrid::build(1, 7).is_err());
        assert!(SphereGrid::build(1, 2).is_err());
    }

    #[test]
    fn circle_m8_nodes_and_weights() {
        let g = SphereGrid::build(1, 8).unwrap();
        assert_eq!(g.len(), 8);
        for (i, p) in g.points().iter().enumerate() {
            let theta = 2.0 * PI * i as f64 / 8.0;
            assert!((p[0] - theta.cos()).abs() < 1e-14);
            assert!((p[1] - theta.sin()).abs() < 1e-14);
            assert_eq!(g.weights()[i], PI / 4.0);
            assert_eq!(g.antipode()[i], (i + 4) % 8);
        }
        assert!((g.total_weight() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn grid_invariants_all_dimensions() {
        for (n, m) in [(1usize, 16usize), (2, 12), (3, 8)] {
            let g = SphereGrid::build(n, m).unwrap();
            let area = sphere_area(n);
            assert!((g.total_weight() - area).abs() / area < 1e-12, "area n={n}");
            for (i, p) in g.points().iter().enumerate() {
                let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-14, "norm n={n} i={i}");
                let a = g.antipode()[i];
                assert_ne!(a, i, "fixed point n={n}");
                assert_eq!(g.antipode()[a], i, "involution n={n}");
                for d in 0..4 {
                    assert!((g.points()[a][d] + p[d]).abs() < 1e-14, "antipodal point n={n}");
                }
                assert_eq!(g.weights()[a], g.weights()[i], "antipodal weight n={n}");
                assert!(g.weights()[i] > 0.0);
            }
        }
    }

    #[test]
    fn integrate_constants_and_odd_function() {
        let g1 = SphereGrid::build(1, 16).unwrap();
        let one = GridFunction::constant(&g1, 1.0);
        assert!((integrate(&g1, &one).unwrap() - 2.0 * PI).abs() < 1e-13);

        let g3 = SphereGrid::build(3, 6).unwrap();
        let one3 = GridFunction::constant(&g3, 1.0);
        assert!((integrate(&g3, &one3).unwrap() - 2.0 * PI * PI).abs() < 1e-12);

        let g2 = SphereGrid::build(2, 16).unwrap();
        let odd = GridFunction::from_fn(&g2, |p| p[2]);
        assert!(integrate(&g2, &odd).unwrap().abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_grid_mismatch() {
        let g = SphereGrid::build(1, 8).unwrap();
        let h = SphereGrid::build(1, 8).unwrap();
        let f = GridFunction::constant(&h, 1.0);
        assert!(matches!(integrate(&g, &f), Err(Error::GridMismatch)));
    }

    #[test]
    fn symmetrize_examples() {
        let g = SphereGrid::build(1, 32).unwrap();
        // already symmetric -> unchanged
        let even = GridFunction::from_fn(&g, |p| 1.0 + p[0] * p[0]);
        let s = symmetrize(&even);
        for (a, b) in s.values().iter().zip(even.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        // cos(theta) kills to zero, 1 + cos(theta) averages to one
        let cosf = GridFunction::from_fn(&g, |p| p[0]);
        for v in symmetrize(&cosf).values() {
            assert!(v.abs() < 1e-16);
        }
        let shifted = GridFunction::from_fn(&g, |p| 1.0 + p[0]);
        for v in symmetrize(&shifted).values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetry_predicate_examples() {
        let g = SphereGrid::build(1, 32).unwrap();
        let one = GridFunction::constant(&g, 1.0);
        assert!(is_antipodally_symmetric(&one, 1e-14));
        // cos(2 theta) has period pi
        let c2 = GridFunction::from_fn(&g, |p| p[0] * p[0] - p[1] * p[1]);
        assert!(is_antipodally_symmetric(&c2, 1e-14));
        let c1 = GridFunction::from_fn(&g, |p| p[0]);
        assert!(!is_antipodally_symmetric(&c1, 1e-6));
    }

    #[test]
    fn low_degree_harmonics_integrate_to_zero() {
        // degree 1..4 harmonics on S^1 and S^2 vanish under quadrature
        let g1 = SphereGrid::build(1, 16).unwrap();
        for k in 1..=4i32 {
            let (c, s) = harmonic_pair_values(&g1, k as u32);
            assert!(c.abs() < 1e-12, "cos {k}");
            assert!(s.abs() < 1e-12, "sin {k}");
        }
        let g2 = SphereGrid::build(2, 12).unwrap();
        for k in 1..=4u32 {
            let (c, s) = harmonic_pair_values(&g2, k);
            assert!(c.abs() < 1e-10, "S2 pair re {k}");
            assert!(s.abs() < 1e-10, "S2 pair im {k}");
        }
        // zonal Legendre polynomials in z on S^2
        let legendre = [
            |z: f64| z,
            |z: f64| 0.5 * (3.0 * z * z - 1.0),
            |z: f64| 0.5 * (5.0 * z * z * z - 3.0 * z),
            |z: f64| 0.125 * (35.0 * z.powi(4) - 30.0 * z * z + 3.0),
        ];
        for (k, p) in legendre.iter().enumerate() {
            let f = GridFunction::from_fn(&g2, |q| p(q[2]));
            assert!(integrate(&g2, &f).unwrap().abs() < 1e-10, "zonal {}", k + 1);
        }
    }

    fn harmonic_pair_values(g: &Arc<SphereGrid>, k: u32) -> (f64, f64) {
        // Re/Im of (x0 + i x1)^k restricted to the sphere
        let re = GridFunction::from_fn(g, |p| complex_power(p[0], p[1], k).0);
        let im = GridFunction::from_fn(g, |p| complex_power(p[0], p[1], k).1);
        (integrate(g, &re).unwrap(), integrate(g, &im).unwrap())
    }

    fn complex_power(x: f64, y: f64, k: u32) -> (f64, f64) {
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..k {
            let (r, i) = (re * x - im * y, re * y + im * x);
            re = r;
            im = i;
        }
        (re, im)
    }

    #[test]
    fn csv_export_round_numbers() {
        let g = SphereGrid::build(1, 8).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 9);
        assert!(text.starts_with("index,x0,x1,weight,antipode"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn symmetrize_is_idempotent_bitwise(values in prop::collection::vec(-1e3f64..1e3, 16)) {
            let g = SphereGrid::build(1, 16).unwrap();
            let f = GridFunction::new(&g, values).unwrap();
            let once = symmetrize(&f);
            let twice = symmetrize(&once);
            for (a, b) in once.values().iter().zip(twice.values()) {
                prop_assert_eq!(a, b);
            }
            prop_assert!(antipodal_defect(&once) == 0.0);
        }

        #[test]
        fn symmetrize_preserves_integral(values in prop::collection::vec(-1e3f64..1e3, 16)) {
            let g = SphereGrid::build(1, 16).unwrap();
            let f = GridFunction::new(&g, values).unwrap();
            let before = integrate(&g, &f).unwrap();
            let after = integrate(&g, &symmetrize(&f)).unwrap();
            let scale = f.max_abs().max(1.0) * g.total_weight();
            prop_assert!((before - after).abs() <= 1e-14 * scale);
        }
    }
}
