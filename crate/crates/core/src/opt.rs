//! Dense BFGS with backtracking line search, used for the ansatz
//! parameters and the orbital-rotation steps. Gradients are either
//! supplied analytically or taken by central differences (the fallback
//! for shot-noisy objectives).

use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct OptConfig<F> {
    pub grad_tol: F,
    pub f_tol: F,
    pub max_iters: usize,
    /// central-difference step for numeric gradients
    pub numeric_step: F,
}

impl<F: Scalar> Default for OptConfig<F> {
    fn default() -> Self {
        Self {
            grad_tol: F::fl(8e-5),
            f_tol: F::fl(1e-6),
            max_iters: 200,
            numeric_step: F::fl(1e-5),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptResult<F> {
    pub x: Vec<F>,
    pub value: F,
    pub grad_inf_norm: F,
    pub n_evals: usize,
    pub converged: bool,
}

/// Minimize with an analytic gradient.
pub fn minimize<F: Scalar>(
    f: &mut dyn FnMut(&[F]) -> F,
    grad: &mut dyn FnMut(&[F]) -> Vec<F>,
    x0: &[F],
    config: &OptConfig<F>,
) -> OptResult<F> {
    minimize_impl(f, &mut |x, _| grad(x), x0, config)
}

/// Minimize with central-difference gradients of `f` itself.
pub fn minimize_numeric<F: Scalar>(
    f: &mut dyn FnMut(&[F]) -> F,
    x0: &[F],
    config: &OptConfig<F>,
) -> OptResult<F> {
    let step = config.numeric_step;
    let mut g = move |x: &[F], f: &mut dyn FnMut(&[F]) -> F| {
        let mut out = Vec::with_capacity(x.len());
        let mut xp = x.to_vec();
        for i in 0..x.len() {
            xp[i] = x[i] + step;
            let fp = f(&xp);
            xp[i] = x[i] - step;
            let fm = f(&xp);
            xp[i] = x[i];
            out.push((fp - fm) / (F::fl(2.0) * step));
        }
        out
    };
    minimize_impl(f, &mut g, x0, config)
}

fn minimize_impl<F: Scalar>(
    f: &mut dyn FnMut(&[F]) -> F,
    grad: &mut dyn FnMut(&[F], &mut dyn FnMut(&[F]) -> F) -> Vec<F>,
    x0: &[F],
    config: &OptConfig<F>,
) -> OptResult<F> {
    let n = x0.len();
    let mut x = DVector::from_vec(x0.to_vec());
    let mut n_evals = 1usize;
    let mut fx = f(x.as_slice());
    if n == 0 {
        return OptResult {
            x: vec![],
            value: fx,
            grad_inf_norm: F::zero(),
            n_evals,
            converged: true,
        };
    }
    let mut g = DVector::from_vec(grad(x.as_slice(), f));
    let mut h_inv = DMatrix::<F>::identity(n, n);
    let mut best_x = x.clone();
    let mut best_f = fx;
    let mut converged = false;
    let mut grad_norm = g.amax();

    for _iter in 0..config.max_iters {
        grad_norm = g.amax();
        if grad_norm <= config.grad_tol {
            converged = true;
            break;
        }
        let mut dir = -(&h_inv * &g);
        // guard against ascent directions from a stale Hessian
        if dir.dot(&g) >= F::zero() {
            h_inv = DMatrix::identity(n, n);
            dir = -g.clone();
        }
        // backtracking Armijo line search
        let slope = dir.dot(&g);
        let mut alpha = F::one();
        let c1 = F::fl(1e-4);
        let mut accepted = false;
        let mut x_new = x.clone();
        let mut f_new = fx;
        for _bt in 0..40 {
            x_new = &x + &dir * alpha;
            f_new = f(x_new.as_slice());
            n_evals += 1;
            if f_new <= fx + c1 * alpha * slope {
                accepted = true;
                break;
            }
            alpha *= F::fl(0.5);
        }
        if !accepted {
            break;
        }
        let g_new = DVector::from_vec(grad(x_new.as_slice(), f));
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > F::fl(1e-12) {
            // BFGS inverse update
            let rho = F::one() / sy;
            let hy = &h_inv * &y;
            let yhy = y.dot(&hy);
            let term1 = (&s * s.transpose()) * (rho * rho * yhy + rho);
            let term2 = (&hy * s.transpose() + &s * hy.transpose()) * rho;
            h_inv = h_inv + term1 - term2;
        }
        let df = (fx - f_new).abs();
        x = x_new;
        fx = f_new;
        g = g_new;
        if fx < best_f {
            best_f = fx;
            best_x = x.clone();
        }
        if df <= config.f_tol && g.amax() <= config.grad_tol {
            converged = true;
            grad_norm = g.amax();
            break;
        }
    }
    if fx > best_f {
        x = best_x;
        fx = best_f;
    }
    OptResult {
        x: x.as_slice().to_vec(),
        value: fx,
        grad_inf_norm: grad_norm,
        n_evals,
        converged,
    }
}
