//! Conformal rescaling of discrete Green matrices, the induced integral
//! operator on a sampled manifold, the exact covariance identity it obeys,
//! and curvature-density extraction by linear solve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sampled manifold: volume weights and a symmetric Green matrix with
/// strictly positive off-diagonal entries. The diagonal is excluded from
/// every sum. The dimension label must differ from two, where the Green
/// exponent (alpha - n)/(2 - n) degenerates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteManifold {
    n: usize,
    volumes: Vec<f64>,
    green: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    coordinates: Option<Vec<Vec<f64>>>,
}

impl DiscreteManifold {
    pub fn new(
        n: usize,
        volumes: Vec<f64>,
        green: Vec<Vec<f64>>,
        coordinates: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if n == 2 {
            return Err(Error::InvalidManifold("dimension label 2 is excluded".into()));
        }
        let count = volumes.len();
        if count == 0 {
            return Err(Error::InvalidManifold("empty manifold".into()));
        }
        if green.len() != count || green.iter().any(|row| row.len() != count) {
            return Err(Error::InvalidManifold("green matrix shape mismatch".into()));
        }
        if volumes.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidManifold("volumes must be positive".into()));
        }
        let scale = green
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        for x in 0..count {
            for y in 0..x {
                if (green[x][y] - green[y][x]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidManifold("green matrix must be symmetric".into()));
                }
                if !(green[x][y] > 0.0) {
                    return Err(Error::InvalidManifold(
                        "green matrix must be positive off the diagonal".into(),
                    ));
                }
            }
        }
        if let Some(coords) = &coordinates {
            if coords.len() != count {
                return Err(Error::InvalidManifold("coordinates length mismatch".into()));
            }
        }
        // force exact symmetry so downstream identities are bit-clean
        let mut green = green;
        for x in 0..count {
            for y in 0..x {
                green[x][y] = green[y][x];
            }
        }
        Ok(Self { n, volumes, green, coordinates })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: DiscreteManifold = serde_json::from_str(text)?;
        Self::new(raw.n, raw.volumes, raw.green, raw.coordinates)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.volumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volumes.is_empty()
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn green(&self) -> &[Vec<f64>] {
        &self.green
    }

    pub fn coordinates(&self) -> Option<&[Vec<f64>]> {
        self.coordinates.as_deref()
    }

    /// Exponent (alpha - n) / (2 - n) applied to the Green matrix.
    pub fn green_exponent(&self, alpha: f64) -> f64 {
        (alpha - self.n as f64) / (2.0 - self.n as f64)
    }
}

/// Positive conformal factor attached to an (alpha, n) pair.
#[derive(Debug, Clone)]
pub struct ConformalFactor {
    pub phi: Vec<f64>,
    pub alpha: f64,
    pub n: usize,
}

impl ConformalFactor {
    pub fn new(phi: Vec<f64>, alpha: f64, n: usize) -> Result<Self> {
        for (i, &v) in phi.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::NonpositiveValue { index: i, value: v });
            }
        }
        if (alpha - n as f64).abs() < 1e-12 {
            return Err(Error::AlphaInvalid { n, alpha });
        }
        Ok(Self { phi, alpha, n })
    }
}

/// Conformally rescaled Green matrix `G1[y][x] = phi_y^-1 phi_x^-1 G0[y][x]`;
/// symmetry is preserved exactly by mirroring the lower triangle.
pub fn conformal_green(m: &DiscreteManifold, factor: &ConformalFactor) -> Result<Vec<Vec<f64>>> {
    if factor.phi.len() != m.len() {
        return Err(Error::LengthMismatch { expected: m.len(), got: factor.phi.len() });
    }
    let count = m.len();
    let mut g1 = vec![vec![0.0; count]; count];
    for y in 0..count {
        for x in 0..=y {
            let v = m.green[y][x] / (factor.phi[y] * factor.phi[x]);
            g1[y][x] = v;
            g1[x][y] = v;
        }
    }
    Ok(g1)
}

fn operator_with(
    green: &[Vec<f64>],
    exponent: f64,
    f: &[f64],
    volumes: &[f64],
) -> Vec<f64> {
    let count = volumes.len();
    (0..count)
        .map(|x| {
            let mut sum = 0.0;
            for y in 0..count {
                if y != x {
                    sum += green[y][x].powf(exponent) * f[y] * volumes[y];
                }
            }
            sum
        })
        .collect()
}

/// Integral operator x -> sum over y != x of [G(y,x)]^((alpha-n)/(2-n))
/// f(y) V(y).
pub fn manifold_operator(
    m: &DiscreteManifold,
    alpha: f64,
    f: &[f64],
    volumes: &[f64],
) -> Result<Vec<f64>> {
    if (alpha - m.n as f64).abs() < 1e-12 {
        return Err(Error::AlphaInvalid { n: m.n, alpha });
    }
    if f.len() != m.len() || volumes.len() != m.len() {
        return Err(Error::LengthMismatch { expected: m.len(), got: f.len() });
    }
    Ok(operator_with(&m.green, m.green_exponent(alpha), f, volumes))
}

/// Checks the conformal covariance identity: the operator under the metric
/// g1 = phi^(4/(n-alpha)) g0 (Green matrix rescaled, volumes scaled by
/// phi^(2n/(n-alpha))) equals phi^((alpha-n)/(n-2)) times the g0 operator of
/// phi^(2n/(n-alpha) + (alpha-n)/(n-2)) u. Exact algebra on discrete data.
pub fn verify_covariance_identity(
    m: &DiscreteManifold,
    factor: &ConformalFactor,
    u: &[f64],
) -> Result<f64> {
    if u.len() != m.len() {
        return Err(Error::LengthMismatch { expected: m.len(), got: u.len() });
    }
    let nf = m.n as f64;
    let alpha = factor.alpha;
    let exponent = m.green_exponent(alpha);
    let vol_power = 2.0 * nf / (nf - alpha);
    let prefactor_power = (alpha - nf) / (nf - 2.0);

    // left side: the operator of u in the g1 data
    let g1 = conformal_green(m, factor)?;
    let v1: Vec<f64> = m
        .volumes
        .iter()
        .zip(&factor.phi)
        .map(|(v, p)| p.powf(vol_power) * v)
        .collect();
    let lhs = operator_with(&g1, exponent, u, &v1);

    // right side: rescaled g0 operator of the conformally weighted density
    let weighted: Vec<f64> = u
        .iter()
        .zip(&factor.phi)
        .map(|(ui, p)| p.powf(vol_power + prefactor_power) * ui)
        .collect();
    let base = operator_with(&m.green, exponent, &weighted, &m.volumes);
    let rhs: Vec<f64> = base
        .iter()
        .zip(&factor.phi)
        .map(|(b, p)| p.powf(prefactor_power) * b)
        .collect();

    let scale = lhs
        .iter()
        .chain(&rhs)
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    Ok(lhs
        .iter()
        .zip(&rhs)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
        / scale)
}

/// Recovers the curvature density q from phi = K diag(phi^((n+alpha)/(n-alpha)) V) q.
///
/// With zero regularization the square system is solved by partial-pivot LU;
/// otherwise ridge-regularized normal equations with the ridge scaled to the
/// largest singular value. Returns the density and the relative solve
/// residual, which stays visible so ill-conditioning is never silent.
pub fn extract_q_alpha(
    m: &DiscreteManifold,
    alpha: f64,
    factor: &ConformalFactor,
    regularization: f64,
) -> Result<(Vec<f64>, f64)> {
    if factor.phi.len() != m.len() {
        return Err(Error::LengthMismatch { expected: m.len(), got: factor.phi.len() });
    }
    let count = m.len();
    let exponent = m.green_exponent(alpha);
    let nf = m.n as f64;
    let source_power = (nf + alpha) / (nf - alpha);
    // B[x][y] = K[x][y] * phi_y^source_power * V_y
    let mut b = vec![0.0; count * count];
    for x in 0..count {
        for y in 0..count {
            if y != x {
                b[x * count + y] =
                    m.green[y][x].powf(exponent) * factor.phi[y].powf(source_power) * m.volumes[y];
            }
        }
    }
    let q = if regularization == 0.0 {
        lu_solve(b.clone(), count, factor.phi.clone())?
    } else {
        let sigma = largest_singular_value(&b, count);
        let ridge = (regularization * sigma).powi(2);
        // normal equations B^T B + ridge I
        let mut normal = vec![0.0; count * count];
        for i in 0..count {
            for j in 0..count {
                let mut s = 0.0;
                for k in 0..count {
                    s += b[k * count + i] * b[k * count + j];
                }
                normal[i * count + j] = s + if i == j { ridge } else { 0.0 };
            }
        }
        let mut rhs = vec![0.0; count];
        for (i, r) in rhs.iter_mut().enumerate() {
            *r = (0..count).map(|k| b[k * count + i] * factor.phi[k]).sum();
        }
        cholesky_solve(normal, count, rhs)?
    };
    // report ||B q - phi|| / ||phi||
    let mut num = 0.0;
    let mut den = 0.0;
    for x in 0..count {
        let bx: f64 = (0..count).map(|y| b[x * count + y] * q[y]).sum();
        num += (bx - factor.phi[x]).powi(2);
        den += factor.phi[x].powi(2);
    }
    Ok((q, (num / den).sqrt()))
}

/// Finds the positive factor solving phi = K (q_target phi^((n+alpha)/(n-alpha)) V)
/// by a damped fixed-point iteration in log space. Used to build consistent
/// forward instances for the extraction round trip.
pub fn consistent_factor(
    m: &DiscreteManifold,
    alpha: f64,
    q_target: &[f64],
    damping: f64,
    max_iterations: usize,
    tolerance: f64,
) -> Result<ConformalFactor> {
    if q_target.len() != m.len() {
        return Err(Error::LengthMismatch { expected: m.len(), got: q_target.len() });
    }
    let nf = m.n as f64;
    let source_power = (nf + alpha) / (nf - alpha);
    let exponent = m.green_exponent(alpha);
    let count = m.len();
    let mut log_phi = vec![0.0f64; count];
    for _ in 0..max_iterations {
        let density: Vec<f64> = (0..count)
            .map(|y| q_target[y] * (source_power * log_phi[y]).exp())
            .collect();
        let image = operator_with(&m.green, exponent, &density, &m.volumes);
        let mut shift = 0.0f64;
        let mut next = vec![0.0; count];
        for x in 0..count {
            if !(image[x] > 0.0) {
                return Err(Error::InvalidManifold("fixed-point image left the positive cone".into()));
            }
            next[x] = (1.0 - damping) * log_phi[x] + damping * image[x].ln();
            shift = shift.max((next[x] - log_phi[x]).abs());
        }
        log_phi = next;
        if shift < tolerance {
            break;
        }
    }
    ConformalFactor::new(log_phi.iter().map(|l| l.exp()).collect(), alpha, m.n)
}

fn lu_solve(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Result<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best < 1e-300 {
            return Err(Error::SingularSystem);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Ok(x)
}

fn cholesky_solve(mut a: Vec<f64>, n: usize, b: Vec<f64>) -> Result<Vec<f64>> {
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::SingularSystem);
                }
                a[i * n + i] = s.sqrt();
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * y[k];
        }
        y[i] = s / a[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= a[k * n + i] * x[k];
        }
        x[i] = s / a[i * n + i];
    }
    Ok(x)
}

fn largest_singular_value(b: &[f64], n: usize) -> f64 {
    // power iteration on B^T B
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma2 = 0.0;
    for _ in 0..60 {
        let mut bv = vec![0.0; n];
        for x in 0..n {
            bv[x] = (0..n).map(|y| b[x * n + y] * v[y]).sum();
        }
        let mut btbv = vec![0.0; n];
        for y in 0..n {
            btbv[y] = (0..n).map(|x| b[x * n + y] * bv[x]).sum();
        }
        let norm = btbv.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        sigma2 = norm;
        for (vi, t) in v.iter_mut().zip(&btbv) {
            *vi = t / norm;
        }
    }
    sigma2.sqrt()
}

/// The 24 unit vectors (+-1, +-1, 0, 0)/sqrt(2) and their coordinate
/// permutations: a vertex-transitive sample of S^3, antipodally closed.
pub fn twenty_four_cell() -> Vec<[f64; 4]> {
    let s = 1.0 / 2f64.sqrt();
    let mut points = Vec::with_capacity(24);
    for i in 0..4 {
        for j in (i + 1)..4 {
            for (si, sj) in [(s, s), (s, -s), (-s, s), (-s, -s)] {
                let mut p = [0.0; 4];
                p[i] = si;
                p[j] = sj;
                points.push(p);
            }
        }
    }
    points
}

/// Round-sphere manifold sample: Green matrix proportional to the chordal
/// distance to the power 2 - n, equal volumes.
pub fn round_sphere_manifold(points: &[[f64; 4]], n: usize, green_scale: f64) -> Result<DiscreteManifold> {
    let count = points.len();
    let mut green = vec![vec![0.0; count]; count];
    for y in 0..count {
        for x in 0..y {
            let d = crate::kernel::chordal_distance(&points[y], &points[x]);
            let v = green_scale * d.powf(2.0 - n as f64);
            green[y][x] = v;
            green[x][y] = v;
        }
    }
    for (y, row) in green.iter_mut().enumerate() {
        row[y] = 0.0; // diagonal is never read
    }
    let coordinates = Some(points.iter().map(|p| p.to_vec()).collect());
    DiscreteManifold::new(n, vec![1.0; count], green, coordinates)
}
