//! Scalar special functions and one-dimensional quadrature rules used by the
//! grid builders and kernel normalization.

use std::f64::consts::PI;

/// Gamma function via the Lanczos approximation (g = 7, 9 coefficients).
///
/// Relative accuracy is better than 1e-13 on the positive real axis, which is
/// where every caller in this crate evaluates it.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection formula
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Riemann zeta function on the real line (s != 1).
///
/// Euler-Maclaurin summation for s > 0.5 and the functional equation below it.
/// Used for the Euler-Maclaurin constant of the circle kernel quadrature.
pub fn zeta(s: f64) -> f64 {
    assert!((s - 1.0).abs() > 1e-12, "zeta pole at s = 1");
    if s.abs() < 1e-12 {
        return -0.5;
    }
    if s < 0.5 {
        // zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
        return 2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(1.0 - s)
            * zeta(1.0 - s);
    }
    let n = 24usize;
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 1..n {
        sum += (k as f64).powf(-s);
    }
    // tail: integral + boundary + Bernoulli corrections B2/2!, B4/4!, B6/6!
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    let mut term = s * nf.powf(-s - 1.0);
    tail += term / 12.0;
    term *= (s + 1.0) * (s + 2.0) / (nf * nf);
    tail -= term / 720.0;
    term *= (s + 3.0) * (s + 4.0) / (nf * nf);
    tail += term / 30_240.0;
    sum + tail
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending, mirrored so that
/// `nodes[m-1-i] == -nodes[i]` and `weights[m-1-i] == weights[i]` bit for bit.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Newton iteration on P_m from the Tricomi-style initial guess
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_pair(m, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(m, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // guess starts near +1, so index i holds the i-th largest root
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_m at x.
fn legendre_pair(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule over consecutive panels.
///
/// `breakpoints` must be strictly increasing; each panel carries `per_panel`
/// nodes mapped affinely from [-1, 1].
pub fn composite_gauss(breakpoints: &[f64], per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(breakpoints.len() >= 2);
    let (gx, gw) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(per_panel * (breakpoints.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breakpoints.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        assert!(b > a, "breakpoints must be increasing");
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&x, &w) in gx.iter().zip(&gw) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gamma_half_integers() {
        // Gamma(1/2) = sqrt(pi), Gamma(3/2) = sqrt(pi)/2, Gamma(7/2) = 15 sqrt(pi)/8
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-13);
        assert!(rel(gamma(1.5), PI.sqrt() / 2.0) < 1e-13);
        assert!(rel(gamma(3.5), 15.0 * PI.sqrt() / 8.0) < 1e-13);
    }

    #[test]
    fn gamma_integers() {
        for (n, fact) in [(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (5.0, 24.0), (7.0, 720.0)] {
            assert!(rel(gamma(n), fact) < 1e-13, "Gamma({n})");
        }
    }

    #[test]
    fn gamma_recurrence() {
        for &x in &[0.3, 1.7, 2.25, 4.9] {
            assert!(rel(gamma(x + 1.0), x * gamma(x)) < 1e-12);
        }
    }

    #[test]
    fn zeta_exact_values() {
        assert!(rel(zeta(2.0), PI * PI / 6.0) < 1e-13);
        assert!(rel(zeta(4.0), PI.powi(4) / 90.0) < 1e-13);
        assert!(rel(zeta(-1.0), -1.0 / 12.0) < 1e-12);
        assert!(rel(zeta(-3.0), 1.0 / 120.0) < 1e-12);
        assert!(zeta(0.0).abs() - 0.5 < 1e-12);
        // trivial zeros at negative even integers
        assert!(zeta(-2.0).abs() < 1e-14);
        assert!(zeta(-4.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_reflection_consistency() {
        // compare the reflection path against the alternating eta series,
        // an independent route valid for s > 0
        let eta = |s: f64| {
            let mut sum = 0.0;
            // Euler transform of the alternating series
            let n = 40usize;
            for k in 0..n {
                let mut binom = 1.0f64;
                let mut inner = 0.0;
                for j in 0..=k {
                    inner += binom * ((j + 1) as f64).powf(-s) * if j % 2 == 0 { 1.0 } else { -1.0 };
                    binom *= (k - j) as f64 / (j + 1) as f64;
                }
                sum += inner / 2f64.powi(k as i32 + 1);
            }
            sum
        };
        for &s in &[1.5, 2.5, 3.5] {
            let via_eta = eta(s) / (1.0 - 2f64.powf(1.0 - s));
            assert!(rel(zeta(s), via_eta) < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn gauss_legendre_m4_matches_reference() {
        let (x, w) = gauss_legendre(4);
        let xr = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
        let wr = [0.347_854_845_137_453_85, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_85];
        for i in 0..4 {
            assert!((x[i] - xr[i]).abs() < 1e-14);
            assert!((w[i] - wr[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_polynomial_exactness() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact through degree 2m-1 = 15
        for k in (2..=14).step_by(2) {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            let exact = 2.0 / (k as f64 + 1.0);
            assert!((q - exact).abs() < 1e-13, "degree {k}");
        }
    }

    #[test]
    fn gauss_legendre_mirror_is_exact() {
        let (x, w) = gauss_legendre(16);
        for i in 0..16 {
            assert_eq!(x[15 - i], -x[i]);
            assert_eq!(w[15 - i], w[i]);
        }
    }

    #[test]
    fn composite_gauss_integrates_smooth_function() {
        let (x, w) = composite_gauss(&[0.0, 0.5, 1.0, 2.0], 12);
        let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.exp()).sum();
        assert!(rel(q, 2f64.exp() - 1.0) < 1e-14);
    }
}
