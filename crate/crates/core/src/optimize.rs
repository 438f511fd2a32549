//! Bounded-step BFGS with central-difference gradients.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Stop once successive energies differ by less than this (Hartree)...
    pub energy_tol: f64,
    /// ...and the largest gradient component is below this.
    pub gradient_tol: f64,
    /// Central-difference step.
    pub gradient_step: f64,
    pub max_iterations: usize,
    /// Largest allowed change of any parameter in one step.
    pub max_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            energy_tol: 1e-7,
            gradient_tol: 1e-5,
            gradient_step: 1e-6,
            max_iterations: 500,
            max_step: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.energy_tol > 0.0 && self.gradient_tol > 0.0 && self.gradient_step > 0.0) {
            return Err(Error::Config("optimizer tolerances and step must be positive".into()));
        }
        if self.max_step <= 0.0 {
            return Err(Error::Config("max_step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub value: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub n_iterations: usize,
    pub n_evaluations: usize,
    pub converged: bool,
    /// Starting point followed by every accepted iterate.
    pub trace: Vec<IterationRecord>,
}

struct Counted<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    count: usize,
}

impl Counted<'_> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.count += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::Internal(format!("objective returned {v}")));
        }
        Ok(v)
    }

    fn gradient(&mut self, x: &[f64], h: f64) -> Result<DVector<f64>> {
        let mut g = DVector::zeros(x.len());
        let mut probe = x.to_vec();
        for k in 0..x.len() {
            probe[k] = x[k] + h;
            let fp = self.eval(&probe)?;
            probe[k] = x[k] - h;
            let fm = self.eval(&probe)?;
            probe[k] = x[k];
            g[k] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    }
}

/// Minimizes `f` from `x0`.
pub fn minimize(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizeResult> {
    config.validate()?;
    let n = x0.len();
    let mut obj = Counted { f, count: 0 };
    let mut x = DVector::from_column_slice(x0);
    let mut fx = obj.eval(x.as_slice())?;
    let mut trace = vec![IterationRecord {
        value: fx,
        x: x0.to_vec(),
    }];
    if n == 0 {
        return Ok(OptimizeResult {
            x: Vec::new(),
            value: fx,
            n_iterations: 0,
            n_evaluations: obj.count,
            converged: true,
            trace,
        });
    }
    let mut g = obj.gradient(x.as_slice(), config.gradient_step)?;
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut fresh_hessian = true;
    let mut last_change = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        let gmax = g.amax();
        if gmax < config.gradient_tol && (last_change < config.energy_tol || gmax < 1e-3 * config.gradient_tol) {
            converged = true;
            break;
        }
        let mut p = -(&hinv * &g);
        let mut slope = g.dot(&p);
        if slope >= 0.0 {
            hinv = DMatrix::identity(n, n);
            fresh_hessian = true;
            p = -g.clone();
            slope = g.dot(&p);
        }
        let pmax = p.amax();
        if pmax > config.max_step {
            p *= config.max_step / pmax;
            slope = g.dot(&p);
        }
        // backtracking Armijo search
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = &x + &p * alpha;
            let ft = obj.eval(trial.as_slice())?;
            if ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if !fresh_hessian {
                hinv = DMatrix::identity(n, n);
                fresh_hessian = true;
                continue;
            }
            // no descent possible along the gradient: a numerical minimum
            converged = g.amax() < 10.0 * config.gradient_tol;
            break;
        };
        iterations += 1;
        let g_new = obj.gradient(x_new.as_slice(), config.gradient_step)?;
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-14 * s.norm() * y.norm() && sy > 0.0 {
            if fresh_hessian {
                hinv = DMatrix::identity(n, n) * (sy / y.dot(&y));
            }
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            // H ← H + ρ²(sᵀy + yᵀHy) ssᵀ − ρ(H y sᵀ + s yᵀ H)
            hinv += (&s * s.transpose()) * (rho * rho * (sy + yhy)) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
            fresh_hessian = false;
        }
        last_change = (fx - f_new).abs();
        x = x_new;
        fx = f_new;
        g = g_new;
        trace.push(IterationRecord {
            value: fx,
            x: x.as_slice().to_vec(),
        });
    }
    Ok(OptimizeResult {
        x: x.as_slice().to_vec(),
        value: fx,
        n_iterations: iterations,
        n_evaluations: obj.count,
        converged,
        trace,
    })
}
