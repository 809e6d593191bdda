//! The variational machinery: the bilinear kernel energy, the weighted
//! sub-unit-exponent functional, their quotient, its gradient with respect to
//! the quadrature inner product, and the Euler-Lagrange diagnostics.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{antipodal_defect, GridFunction, SphereGrid};
use crate::kernel::{assemble_kernel, KernelOperator};

/// Precomputed problem data for one (grid, alpha, R) triple.
///
/// p = 2n/(n+alpha) lies in (0, 1), so the weighted functional is positively
/// homogeneous but not a norm; q = p - 1 = (n-alpha)/(n+alpha) is the
/// negative Euler-Lagrange exponent.
#[derive(Debug)]
pub struct FunctionalContext {
    grid: Arc<SphereGrid>,
    alpha: f64,
    r_weight: GridFunction,
    kernel: KernelOperator,
    p: f64,
    q: f64,
}

impl FunctionalContext {
    pub fn new(grid: &Arc<SphereGrid>, alpha: f64, r_weight: &GridFunction) -> Result<Self> {
        if alpha <= grid.n() as f64 {
            return Err(Error::AlphaNotSupercritical { n: grid.n(), alpha });
        }
        if !r_weight.lives_on(grid) {
            return Err(Error::GridMismatch);
        }
        r_weight.require_positive()?;
        let defect = antipodal_defect(r_weight);
        if defect > 1e-12 * r_weight.max_abs() {
            return Err(Error::AsymmetricWeight { defect });
        }
        let kernel = assemble_kernel(grid, alpha, r_weight)?;
        let n = grid.n() as f64;
        let p = 2.0 * n / (n + alpha);
        Ok(Self {
            grid: Arc::clone(grid),
            alpha,
            r_weight: r_weight.clone(),
            kernel,
            p,
            q: p - 1.0,
        })
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r_weight(&self) -> &GridFunction {
        &self.r_weight
    }

    pub fn kernel(&self) -> &KernelOperator {
        &self.kernel
    }

    pub fn exponent_p(&self) -> f64 {
        self.p
    }

    pub fn exponent_q(&self) -> f64 {
        self.q
    }

    /// I_{alpha,R} f: one dense matrix-vector product.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.kernel.apply(f)
    }
}

/// Everything one pass over the kernel image yields for a positive iterate.
#[derive(Debug)]
pub struct Evaluation {
    /// I_{alpha,R} f at every node
    pub operator_image: GridFunction,
    /// H_{alpha,R}(f, f)
    pub energy: f64,
    /// weighted p-mass: sum of w_i R_i f_i^p
    pub mass_p: f64,
    /// quotient J = energy / mass_p^(2/p)
    pub quotient: f64,
    /// Euler-Lagrange multiplier energy / mass_p
    pub lambda: f64,
}

impl FunctionalContext {
    pub fn evaluate(&self, f: &GridFunction) -> Result<Evaluation> {
        f.require_positive()?;
        let image = self.apply(f)?;
        let w = self.grid.weights();
        let rv = self.r_weight.values();
        let mut energy = 0.0;
        let mut mass_p = 0.0;
        for i in 0..self.grid.len() {
            energy += w[i] * rv[i] * f.values()[i] * image.values()[i];
            mass_p += w[i] * rv[i] * f.values()[i].powf(self.p);
        }
        let quotient = energy / mass_p.powf(2.0 / self.p);
        Ok(Evaluation { operator_image: image, energy, mass_p, quotient, lambda: energy / mass_p })
    }
}

/// H_{alpha,R}(f, g): the double kernel integral; symmetric in its arguments.
pub fn bilinear_h(ctx: &FunctionalContext, f: &GridFunction, g: &GridFunction) -> Result<f64> {
    if !f.lives_on(ctx.grid()) || !g.lives_on(ctx.grid()) {
        return Err(Error::GridMismatch);
    }
    let kg = ctx.apply(g)?;
    let w = ctx.grid.weights();
    let rv = ctx.r_weight.values();
    Ok((0..ctx.grid.len())
        .map(|i| w[i] * rv[i] * f.values()[i] * kg.values()[i])
        .sum())
}

/// Weighted functional (sum of w R f^p)^(1/p); degree-one homogeneous.
pub fn weighted_p_norm(ctx: &FunctionalContext, f: &GridFunction) -> Result<f64> {
    if !f.lives_on(ctx.grid()) {
        return Err(Error::GridMismatch);
    }
    f.require_positive()?;
    let w = ctx.grid.weights();
    let rv = ctx.r_weight.values();
    let mass: f64 = (0..ctx.grid.len())
        .map(|i| w[i] * rv[i] * f.values()[i].powf(ctx.p))
        .sum();
    Ok(mass.powf(1.0 / ctx.p))
}

/// The quotient J_{alpha,R}(f) = H(f,f) / ||f||^2; invariant under scaling.
pub fn quotient_j(ctx: &FunctionalContext, f: &GridFunction) -> Result<f64> {
    Ok(ctx.evaluate(f)?.quotient)
}

/// Gradient of J with respect to the quadrature-weighted inner product
/// <u, v> = sum of w_i u_i v_i:
/// (2 R_i / S^(2/p)) [ (I f)_i - lambda f_i^(p-1) ], lambda = H/S.
pub fn gradient_j(ctx: &FunctionalContext, f: &GridFunction) -> Result<GridFunction> {
    let eval = ctx.evaluate(f)?;
    gradient_from_eval(ctx, f, &eval)
}

pub(crate) fn gradient_from_eval(
    ctx: &FunctionalContext,
    f: &GridFunction,
    eval: &Evaluation,
) -> Result<GridFunction> {
    let scale = 2.0 / eval.mass_p.powf(2.0 / ctx.p);
    let rv = ctx.r_weight.values();
    let values = (0..ctx.grid.len())
        .map(|i| {
            scale
                * rv[i]
                * (eval.operator_image.values()[i] - eval.lambda * f.values()[i].powf(ctx.q))
        })
        .collect();
    GridFunction::new(&ctx.grid, values)
}

/// Relative Euler-Lagrange defect max |(I f)_i - lambda f_i^q| / (lambda f_i^q).
pub fn el_residual(ctx: &FunctionalContext, f: &GridFunction) -> Result<f64> {
    let eval = ctx.evaluate(f)?;
    Ok(residual_from_eval(ctx, f, &eval))
}

pub(crate) fn residual_from_eval(ctx: &FunctionalContext, f: &GridFunction, eval: &Evaluation) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..ctx.grid.len() {
        let target = eval.lambda * f.values()[i].powf(ctx.q);
        worst = worst.max((eval.operator_image.values()[i] - target).abs() / target);
    }
    worst
}

/// Integrated form of the Euler-Lagrange equation against test functions.
///
/// For each phi compares the integral of f^q R phi with the double integral
/// of R R f |.|^(alpha-n) phi; `f` must already carry multiplier one. The
/// relative scale uses absolute-value integrals so sign-cancelling test
/// functions cannot zero the denominator.
pub fn weak_form_test(
    ctx: &FunctionalContext,
    f: &GridFunction,
    test_basis: &[GridFunction],
) -> Result<f64> {
    f.require_positive()?;
    let image = ctx.apply(f)?;
    let w = ctx.grid.weights();
    let rv = ctx.r_weight.values();
    let mut worst = 0.0f64;
    for phi in test_basis {
        if !phi.lives_on(ctx.grid()) {
            return Err(Error::GridMismatch);
        }
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut lhs_abs = 0.0;
        let mut rhs_abs = 0.0;
        for i in 0..ctx.grid.len() {
            let fq = f.values()[i].powf(ctx.q);
            let base = w[i] * rv[i] * phi.values()[i];
            let base_abs = w[i] * rv[i] * phi.values()[i].abs();
            lhs += base * fq;
            rhs += base * image.values()[i];
            lhs_abs += base_abs * fq;
            rhs_abs += base_abs * image.values()[i];
        }
        worst = worst.max((lhs - rhs).abs() / (lhs_abs + rhs_abs));
    }
    Ok(worst)
}

/// Brute-force estimate of the reversed kernel inequality constant: the
/// smallest quotient value projected gradient descent reaches from `trials`
/// random positive starts. Intended for contexts with R identically one.
pub fn hls_lower_bound(ctx: &FunctionalContext, trials: usize, seed: u64) -> Result<f64> {
    if trials < 100 {
        return Err(Error::InvalidConfig(format!(
            "the lower-bound search needs at least 100 trials (got {trials})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for trial in 0..trials {
        let f0 = if trial == 0 {
            GridFunction::constant(&ctx.grid, 1.0)
        } else {
            GridFunction::new(
                &ctx.grid,
                (0..ctx.grid.len()).map(|_| rng.random_range(0.05..1.05)).collect(),
            )?
        };
        let reached = descend_positive(ctx, f0, 200)?;
        best = best.min(reached);
    }
    Ok(best)
}

/// Plain projected gradient descent over the positive cone (no antipodal
/// symmetrization); returns the final quotient value.
fn descend_positive(ctx: &FunctionalContext, start: GridFunction, max_iter: usize) -> Result<f64> {
    let mut f = start;
    let mut eval = ctx.evaluate(&f)?;
    for _ in 0..max_iter {
        let grad = gradient_from_eval(ctx, &f, &eval)?;
        let g2: f64 = ctx
            .grid
            .weights()
            .iter()
            .zip(grad.values())
            .map(|(w, g)| w * g * g)
            .sum();
        if g2 == 0.0 {
            break;
        }
        let mean: f64 = crate::grid::integrate(&ctx.grid, &f)? / ctx.grid.total_weight();
        let floor = 1e-8 * mean;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = GridFunction::new(
                &ctx.grid,
                f.values()
                    .iter()
                    .zip(grad.values())
                    .map(|(fi, gi)| (fi - step * gi).max(floor))
                    .collect(),
            )?;
            if let Ok(cand_eval) = ctx.evaluate(&candidate) {
                if cand_eval.quotient <= eval.quotient - 1e-4 * step * g2 {
                    f = candidate;
                    eval = cand_eval;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(eval.quotient)
}
