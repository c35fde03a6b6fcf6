//! ADAPT-VQE micro-iterations on a statevector simulator: gradient
//! screening over the operator pool, joint parameter re-optimization,
//! shot-noise sampling, RDM measurement, and CNOT accounting.

use crate::jordan_wigner::{jordan_wigner_sum, singlet_excitation_terms};
use crate::opt::{minimize, minimize_numeric, OptConfig};
use crate::pauli::{PauliError, QubitHamiltonian};
use crate::pool::PoolOperator;
use crate::problem::Tensor4;
use crate::scalar::Scalar;
use crate::statevector::StateVector;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AdaptError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("operator pool is empty")]
    EmptyPool,
    #[error("ansatz references pool operator {0}, pool has {1}")]
    BadOperatorId(usize, usize),
}

/// Expectation-value evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ShotModel {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

impl ShotModel {
    pub fn is_sampled(&self) -> bool {
        matches!(self, ShotModel::Sampled { .. })
    }
}

/// <psi|H|psi>, either exact or with independent per-Pauli-term binomial
/// sampling of each <P> at the given shot budget.
pub fn expectation<F: Scalar>(
    state: &StateVector<F>,
    h: &QubitHamiltonian<F>,
    shots: &ShotModel,
    rng: &mut ChaCha8Rng,
) -> Result<F, PauliError> {
    match shots {
        ShotModel::Exact => state.expectation_exact(h),
        ShotModel::Sampled { shots, .. } => {
            let mut e = h.constant;
            for (c, p) in &h.terms {
                let v = state.expectation_pauli(p)?.to_f64();
                let prob = ((1.0 + v) / 2.0).clamp(0.0, 1.0);
                let dist = Binomial::new(*shots, prob).expect("valid probability");
                let k = dist.sample(rng);
                let est = 2.0 * k as f64 / *shots as f64 - 1.0;
                e += *c * F::fl(est);
            }
            Ok(e)
        }
    }
}

/// One-shot convenience wrapper: deterministic for a fixed seed.
pub fn expectation_seeded<F: Scalar>(
    state: &StateVector<F>,
    h: &QubitHamiltonian<F>,
    shots: &ShotModel,
) -> Result<F, PauliError> {
    let seed = match shots {
        ShotModel::Sampled { seed, .. } => *seed,
        ShotModel::Exact => 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    expectation(state, h, shots, &mut rng)
}

/// A|psi> for a generator A = sum_k i c_k P_k.
fn apply_generator<F: Scalar>(
    state: &StateVector<F>,
    op: &PoolOperator<F>,
) -> Result<StateVector<F>, PauliError> {
    let mut out = StateVector {
        amps: vec![num_complex::Complex::new(F::zero(), F::zero()); state.dim()],
        n_qubits: state.n_qubits,
    };
    for (c, p) in &op.strings {
        let pv = state.apply_pauli(p)?;
        let ic = num_complex::Complex::new(F::zero(), *c);
        for (o, v) in out.amps.iter_mut().zip(&pv.amps) {
            *o += ic * v;
        }
    }
    Ok(out)
}

/// exp(theta A)|psi> for an anti-hermitian pool generator, by Taylor
/// series with scaling. Exactly unitary up to truncation, so particle
/// number and S_z survive even when the generator's strings do not
/// commute with each other.
pub fn apply_pool_exponential<F: Scalar>(
    state: &mut StateVector<F>,
    op: &PoolOperator<F>,
    theta: F,
) -> Result<(), PauliError> {
    if theta == F::zero() || op.strings.is_empty() {
        return Ok(());
    }
    let a_bound: F = op.strings.iter().fold(F::zero(), |a, (c, _)| a + c.abs());
    let mut halvings = 0u32;
    let mut bound = (theta.abs() * a_bound).to_f64();
    while bound > 0.5 && halvings < 24 {
        bound /= 2.0;
        halvings += 1;
    }
    let steps = 1u64 << halvings;
    let theta_s = theta / F::fl(steps as f64);
    for _ in 0..steps {
        let mut term = state.clone();
        let mut acc = state.clone();
        for k in 1..=30u32 {
            let scaled = apply_generator(&term, op)?;
            let factor = theta_s / F::fl(k as f64);
            term = StateVector {
                amps: scaled
                    .amps
                    .iter()
                    .map(|a| a * num_complex::Complex::new(factor, F::zero()))
                    .collect(),
                n_qubits: scaled.n_qubits,
            };
            for (o, v) in acc.amps.iter_mut().zip(&term.amps) {
                *o += v;
            }
            if term.norm() < F::fl(1e-17) {
                break;
            }
        }
        *state = acc;
    }
    Ok(())
}

/// <psi|[H, A]|psi> = 2 Re <H psi | A psi>: the energy derivative at
/// theta = 0 of appending exp(theta A).
pub fn pool_gradient<F: Scalar>(
    state: &StateVector<F>,
    h: &QubitHamiltonian<F>,
    op: &PoolOperator<F>,
) -> Result<F, PauliError> {
    let hpsi = state.apply_hamiltonian(h)?;
    let apsi = apply_generator(state, op)?;
    Ok(F::fl(2.0) * hpsi.inner(&apsi).re)
}

/// Ordered ansatz: (pool operator id, theta) with a running CNOT total.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdaptAnsatz<F> {
    pub entries: Vec<(usize, F)>,
    pub cnot_total: usize,
}

impl<F: Scalar> AdaptAnsatz<F> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            cnot_total: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn thetas(&self) -> Vec<F> {
        self.entries.iter().map(|(_, t)| *t).collect()
    }

    pub fn set_thetas(&mut self, thetas: &[F]) {
        for ((_, t), v) in self.entries.iter_mut().zip(thetas) {
            *t = *v;
        }
    }
}

/// Total staircase CNOTs of an ansatz: the sum of its operators' fixed
/// per-operator costs.
pub fn cnot_count<F: Scalar>(
    ansatz: &AdaptAnsatz<F>,
    pool: &[PoolOperator<F>],
) -> Result<usize, AdaptError> {
    let mut total = 0;
    for (id, _) in &ansatz.entries {
        let op = pool.get(*id).ok_or(AdaptError::BadOperatorId(*id, pool.len()))?;
        total += op.cnot_cost();
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    GradientConverged,
    EnergyConverged,
    MaxIterations,
}

/// One line of the iteration trace (line-oriented JSON in the CLI logs).
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub op_id: Option<usize>,
    pub op_desc: String,
    pub grad_norm: f64,
    pub energy: f64,
    pub cnot_count: usize,
}

#[derive(Debug, Clone)]
pub struct AdaptOutcome<F> {
    pub ansatz: AdaptAnsatz<F>,
    pub trace: Vec<IterationRecord>,
    pub energy: F,
    pub converged: bool,
    pub reason: StopReason,
}

#[derive(Debug, Clone)]
pub struct AdaptConfig<F> {
    /// pool-gradient 2-norm threshold
    pub grad_norm_tol: F,
    /// energy-change threshold between accepted iterations
    pub energy_tol: F,
    pub max_iterations: usize,
    pub shots: ShotModel,
    pub opt: OptConfig<F>,
}

impl<F: Scalar> Default for AdaptConfig<F> {
    fn default() -> Self {
        Self {
            grad_norm_tol: F::fl(8e-5),
            energy_tol: F::fl(1e-6),
            max_iterations: 60,
            shots: ShotModel::Exact,
            opt: OptConfig::default(),
        }
    }
}

/// Statevector ADAPT-VQE engine over a fixed Hamiltonian and pool.
pub struct AdaptVqe<F> {
    pub hamiltonian: QubitHamiltonian<F>,
    pub pool: Vec<PoolOperator<F>>,
    pub reference: StateVector<F>,
    pub config: AdaptConfig<F>,
    rng: ChaCha8Rng,
}

impl<F: Scalar> AdaptVqe<F> {
    pub fn new(
        hamiltonian: QubitHamiltonian<F>,
        pool: Vec<PoolOperator<F>>,
        reference: StateVector<F>,
        config: AdaptConfig<F>,
    ) -> Self {
        let seed = match config.shots {
            ShotModel::Sampled { seed, .. } => seed,
            ShotModel::Exact => 0,
        };
        Self {
            hamiltonian,
            pool,
            reference,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn build_state(&self, ansatz: &AdaptAnsatz<F>) -> Result<StateVector<F>, AdaptError> {
        let mut state = self.reference.clone();
        for (id, theta) in &ansatz.entries {
            let op = self
                .pool
                .get(*id)
                .ok_or(AdaptError::BadOperatorId(*id, self.pool.len()))?;
            apply_pool_exponential(&mut state, op, *theta)?;
        }
        Ok(state)
    }

    /// Energy in the configured shot mode (advances the sampling stream).
    pub fn energy(&mut self, state: &StateVector<F>) -> Result<F, AdaptError> {
        Ok(expectation(
            state,
            &self.hamiltonian,
            &self.config.shots,
            &mut self.rng,
        )?)
    }

    /// Exact pool gradients |<[H,A]>| for the current state.
    pub fn pool_gradients(&self, state: &StateVector<F>) -> Result<Vec<F>, AdaptError> {
        let hpsi = state.apply_hamiltonian(&self.hamiltonian)?;
        let mut out = Vec::with_capacity(self.pool.len());
        for op in &self.pool {
            let apsi = apply_generator(state, op)?;
            out.push(F::fl(2.0) * hpsi.inner(&apsi).re);
        }
        Ok(out)
    }

    /// Exact energy and per-entry analytic gradient by the adjoint sweep.
    pub fn energy_and_gradient(
        &self,
        ansatz: &AdaptAnsatz<F>,
    ) -> Result<(F, Vec<F>), AdaptError> {
        let psi = self.build_state(ansatz)?;
        let mut lam = psi.apply_hamiltonian(&self.hamiltonian)?;
        let energy = psi.inner(&lam).re;
        let mut phi = psi;
        let mut grads = vec![F::zero(); ansatz.len()];
        for (k, (id, theta)) in ansatz.entries.iter().enumerate().rev() {
            let op = &self.pool[*id];
            // d/dtheta exp(theta A) = A exp(theta A): 2 Re <lam| A |phi>
            let aphi = apply_generator(&phi, op)?;
            grads[k] = F::fl(2.0) * lam.inner(&aphi).re;
            apply_pool_exponential(&mut phi, op, -*theta)?;
            apply_pool_exponential(&mut lam, op, -*theta)?;
        }
        Ok((energy, grads))
    }

    /// Joint quasi-Newton re-optimization of all thetas. Exact mode uses
    /// the adjoint gradient; sampled mode falls back to central
    /// differences over the noisy objective.
    pub fn optimize_parameters(
        &mut self,
        ansatz: &mut AdaptAnsatz<F>,
    ) -> Result<(F, bool), AdaptError> {
        if ansatz.is_empty() {
            let state = self.build_state(ansatz)?;
            return Ok((self.energy(&state)?, true));
        }
        let x0 = ansatz.thetas();
        match self.config.shots {
            ShotModel::Exact => {
                // borrow dance: clone lightweight views for the closures
                let engine: &AdaptVqe<F> = self;
                let template = ansatz.clone();
                let mut f = |x: &[F]| {
                    let mut a = template.clone();
                    a.set_thetas(x);
                    let s = engine.build_state(&a).expect("state build");
                    s.expectation_exact(&engine.hamiltonian).expect("energy")
                };
                let mut g = |x: &[F]| {
                    let mut a = template.clone();
                    a.set_thetas(x);
                    engine.energy_and_gradient(&a).expect("gradient").1
                };
                let r = minimize(&mut f, &mut g, &x0, &self.config.opt);
                ansatz.set_thetas(&r.x);
                Ok((r.value, r.converged))
            }
            ShotModel::Sampled { shots, .. } => {
                let template = ansatz.clone();
                let hamiltonian = self.hamiltonian.clone();
                let pool = &self.pool;
                let reference = &self.reference;
                let rng = &mut self.rng;
                let shot_model = ShotModel::Sampled { shots, seed: 0 };
                let mut f = |x: &[F]| {
                    let mut a = template.clone();
                    a.set_thetas(x);
                    let mut s = reference.clone();
                    for (id, theta) in &a.entries {
                        apply_pool_exponential(&mut s, &pool[*id], *theta).expect("apply");
                    }
                    expectation(&s, &hamiltonian, &shot_model, rng).expect("energy")
                };
                // noisy objective: larger steps, fewer iterations
                let cfg = OptConfig {
                    numeric_step: F::fl(5e-2),
                    max_iters: 25,
                    grad_tol: self.config.opt.grad_tol,
                    f_tol: self.config.opt.f_tol,
                };
                let r = minimize_numeric(&mut f, &x0, &cfg);
                ansatz.set_thetas(&r.x);
                // fresh measurement at the accepted parameters
                let state = self.build_state(ansatz)?;
                let e = self.energy(&state)?;
                Ok((e, r.converged))
            }
        }
    }

    /// One ADAPT macro step: screen the pool, append the largest-gradient
    /// operator (ties break to the lowest id), re-optimize all thetas.
    pub fn adapt_iteration(
        &mut self,
        ansatz: &mut AdaptAnsatz<F>,
    ) -> Result<IterationRecord, AdaptError> {
        if self.pool.is_empty() {
            return Err(AdaptError::EmptyPool);
        }
        let state = self.build_state(ansatz)?;
        let grads = self.pool_gradients(&state)?;
        let grad_norm = grads
            .iter()
            .fold(F::zero(), |a, g| a + *g * *g)
            .sqrt();
        let iteration = ansatz.len();
        if grad_norm <= self.config.grad_norm_tol {
            let e = self.energy(&state)?;
            return Ok(IterationRecord {
                iteration,
                op_id: None,
                op_desc: "converged".to_string(),
                grad_norm: grad_norm.to_f64(),
                energy: e.to_f64(),
                cnot_count: ansatz.cnot_total,
            });
        }
        let mut best = 0usize;
        for (i, g) in grads.iter().enumerate() {
            if g.abs() > grads[best].abs() {
                best = i;
            }
        }
        ansatz.entries.push((best, F::zero()));
        let (energy, _) = self.optimize_parameters(ansatz)?;
        ansatz.cnot_total += self.pool[best].cnot_cost();
        Ok(IterationRecord {
            iteration: iteration + 1,
            op_id: Some(best),
            op_desc: self.pool[best].kind.to_string(),
            grad_norm: grad_norm.to_f64(),
            energy: energy.to_f64(),
            cnot_count: ansatz.cnot_total,
        })
    }

    /// Grow the ansatz until the pool-gradient norm or the energy change
    /// crosses its threshold, or the iteration cap is reached.
    pub fn run(&mut self) -> Result<AdaptOutcome<F>, AdaptError> {
        let mut ansatz = AdaptAnsatz::new();
        let mut trace = Vec::new();
        let mut prev_energy: Option<F> = None;
        let mut reason = StopReason::MaxIterations;
        let mut converged = false;
        let mut energy = {
            let s = self.build_state(&ansatz)?;
            self.energy(&s)?
        };
        for _ in 0..self.config.max_iterations {
            let record = self.adapt_iteration(&mut ansatz)?;
            let appended = record.op_id.is_some();
            energy = F::fl(record.energy);
            trace.push(record);
            if !appended {
                converged = true;
                reason = StopReason::GradientConverged;
                break;
            }
            if let Some(prev) = prev_energy {
                if (prev - energy).abs() <= self.config.energy_tol {
                    converged = true;
                    reason = StopReason::EnergyConverged;
                    break;
                }
            }
            prev_energy = Some(energy);
        }
        Ok(AdaptOutcome {
            ansatz,
            trace,
            energy,
            converged,
            reason,
        })
    }
}

/// Spin-summed active-space RDMs measured on a state:
/// D_pq = <E_pq>, d_pqrs = <E_pq E_rs> - d_qr D_ps.
pub fn measure_rdms<F: Scalar>(
    state: &StateVector<F>,
    n_orbitals: usize,
) -> Result<(DMatrix<F>, Tensor4<F>), AdaptError> {
    let n_modes = 2 * n_orbitals;
    if state.n_qubits != n_modes {
        return Err(AdaptError::Pauli(PauliError::QubitMismatch(
            state.n_qubits,
            n_modes,
        )));
    }
    // w[pq] = E_pq |psi>
    let mut w = Vec::with_capacity(n_orbitals * n_orbitals);
    for p in 0..n_orbitals {
        for q in 0..n_orbitals {
            let strings = jordan_wigner_sum(
                &singlet_excitation_terms::<F>(p, q, n_orbitals),
                n_modes,
            )
            .expect("indices in range");
            let mut acc = StateVector {
                amps: vec![num_complex::Complex::new(F::zero(), F::zero()); state.dim()],
                n_qubits: n_modes,
            };
            for (c, pstr) in strings {
                let pv = state.apply_pauli(&pstr)?;
                for (o, v) in acc.amps.iter_mut().zip(&pv.amps) {
                    *o += c * v;
                }
            }
            w.push(acc);
        }
    }
    let at = |p: usize, q: usize| &w[p * n_orbitals + q];
    let mut d1 = DMatrix::zeros(n_orbitals, n_orbitals);
    for p in 0..n_orbitals {
        for q in 0..n_orbitals {
            d1[(p, q)] = state.inner(at(p, q)).re;
        }
    }
    let mut d2 = Tensor4::zeros(n_orbitals);
    for p in 0..n_orbitals {
        for q in 0..n_orbitals {
            for r in 0..n_orbitals {
                for s in 0..n_orbitals {
                    let mut v = at(q, p).inner(at(r, s)).re;
                    if q == r {
                        v -= d1[(p, s)];
                    }
                    d2.set(p, q, r, s, v);
                }
            }
        }
    }
    Ok((d1, d2))
}
