//! BDF time stepping for `M u' + L u = 0`: one BDF-1 step to start, BDF-2
//! afterwards. Each system matrix is factorized (or preconditioned) once.

use std::cell::OnceCell;

use crate::linalg::{CsrMatrix, LinearSolver, SolverKind};
use crate::{Error, Result};

pub struct TimeIntegrator {
    pub tau: f64,
    mass: CsrMatrix,
    operator: CsrMatrix,
    solver: SolverKind,
    bdf1: OnceCell<LinearSolver>,
    bdf2: OnceCell<LinearSolver>,
}

impl TimeIntegrator {
    /// `operator` is the full spatial form, e.g. `A + beta h^-2 K`.
    pub fn new(mass: CsrMatrix, operator: CsrMatrix, tau: f64, solver: SolverKind) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Config(format!(
                "time step must be positive, got {tau}"
            )));
        }
        if !mass.same_pattern(&operator) {
            return Err(Error::DimensionMismatch {
                expected: mass.nnz(),
                found: operator.nnz(),
            });
        }
        Ok(Self {
            tau,
            mass,
            operator,
            solver,
            bdf1: OnceCell::new(),
            bdf2: OnceCell::new(),
        })
    }

    /// Convenience constructor for `A + factor * K`.
    pub fn with_penalty(
        mass: CsrMatrix,
        stiffness: &CsrMatrix,
        penalty: Option<(&CsrMatrix, f64)>,
        tau: f64,
        solver: SolverKind,
    ) -> Result<Self> {
        let operator = match penalty {
            Some((k, f)) => CsrMatrix::linear_combination(&[(1.0, stiffness), (f, k)])?,
            None => stiffness.clone(),
        };
        Self::new(mass, operator, tau, solver)
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn operator(&self) -> &CsrMatrix {
        &self.operator
    }

    /// Both system matrices share one pattern, so the second factorization
    /// reuses the symbolic analysis of the first.
    fn lhs<'a>(
        &'a self,
        cell: &'a OnceCell<LinearSolver>,
        other: &OnceCell<LinearSolver>,
        mass_factor: f64,
    ) -> Result<&'a LinearSolver> {
        if let Some(s) = cell.get() {
            return Ok(s);
        }
        let a = CsrMatrix::linear_combination(&[(mass_factor, &self.mass), (1.0, &self.operator)])?;
        let s = match other.get() {
            Some(like) => LinearSolver::new_like(a, self.solver, like)?,
            None => LinearSolver::new(a, self.solver)?,
        };
        Ok(cell.get_or_init(|| s))
    }

    /// Solves `(M/tau + L) u1 = (M/tau) u0`.
    pub fn step_bdf1(&self, u0: &[f64]) -> Result<Vec<f64>> {
        let solver = self.lhs(&self.bdf1, &self.bdf2, 1.0 / self.tau)?;
        let mut rhs = self.mass.mul_vec(u0);
        rhs.iter_mut().for_each(|v| *v /= self.tau);
        let mut u = u0.to_vec();
        solver.solve(&rhs, &mut u)?;
        Ok(u)
    }

    /// Solves `(3M/(2 tau) + L) u = (M/tau)(2 u_m - u_{m-1}/2)`.
    pub fn step_bdf2(&self, um: &[f64], um1: &[f64]) -> Result<Vec<f64>> {
        let solver = self.lhs(&self.bdf2, &self.bdf1, 1.5 / self.tau)?;
        let w: Vec<f64> = um.iter().zip(um1).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let mut rhs = self.mass.mul_vec(&w);
        rhs.iter_mut().for_each(|v| *v /= self.tau);
        let mut u = um.to_vec();
        solver.solve(&rhs, &mut u)?;
        Ok(u)
    }

    /// Number of steps to reach `t`, which must be an integer multiple of `tau`.
    pub fn steps_to(&self, t: f64) -> Result<usize> {
        let n = (t / self.tau).round();
        if n < 0.0 || (n * self.tau - t).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(Error::Config(format!(
                "time {t} is not a multiple of the step {}",
                self.tau
            )));
        }
        Ok(n as usize)
    }

    /// Integrates from `u0` over `n_steps` steps. `observe(step, u)` is called
    /// after every step; step 0 is the initial state.
    pub fn integrate<F>(&self, u0: Vec<f64>, n_steps: usize, mut observe: F) -> Result<Vec<f64>>
    where
        F: FnMut(usize, &[f64]) -> Result<()>,
    {
        observe(0, &u0)?;
        if n_steps == 0 {
            return Ok(u0);
        }
        let wrap = |step: usize| {
            move |e: Error| Error::Step {
                step,
                source: Box::new(e),
            }
        };
        let mut prev = u0;
        let mut cur = self.step_bdf1(&prev).map_err(wrap(1))?;
        observe(1, &cur)?;
        for step in 2..=n_steps {
            let next = self.step_bdf2(&cur, &prev).map_err(wrap(step))?;
            prev = std::mem::replace(&mut cur, next);
            observe(step, &cur)?;
        }
        Ok(cur)
    }
}
