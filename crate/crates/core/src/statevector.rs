//! Dense statevector simulation: Pauli application, Pauli-string
//! exponentials, and exact expectation values.

use crate::pauli::{quarter_phase, PauliError, PauliString, QubitHamiltonian};
use crate::scalar::Scalar;
use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<F> {
    pub amps: Vec<Complex<F>>,
    pub n_qubits: usize,
}

impl<F: Scalar> StateVector<F> {
    /// |basis_index> on n qubits; bit q of the index is qubit q.
    pub fn computational_basis(n_qubits: usize, basis_index: u64) -> Self {
        let mut amps = vec![Complex::new(F::zero(), F::zero()); 1 << n_qubits];
        amps[basis_index as usize] = Complex::new(F::one(), F::zero());
        Self { amps, n_qubits }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> F {
        self.amps
            .iter()
            .fold(F::zero(), |a, c| a + c.norm_sqr())
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex<F> {
        let mut s = Complex::new(F::zero(), F::zero());
        for (a, b) in self.amps.iter().zip(&other.amps) {
            s += a.conj() * b;
        }
        s
    }

    /// P|psi> as a new state.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self, PauliError> {
        if p.n_qubits != self.n_qubits {
            return Err(PauliError::QubitMismatch(p.n_qubits, self.n_qubits));
        }
        let mut out = vec![Complex::new(F::zero(), F::zero()); self.amps.len()];
        for (b, amp) in self.amps.iter().enumerate() {
            if amp.re == F::zero() && amp.im == F::zero() {
                continue;
            }
            let (target, k) = p.apply_to_basis(b as u64);
            out[target as usize] = quarter_phase::<F>(k) * amp;
        }
        Ok(Self {
            amps: out,
            n_qubits: self.n_qubits,
        })
    }

    /// In-place exp(i theta P)|psi> = cos(theta)|psi> + i sin(theta) P|psi>.
    pub fn apply_pauli_exponential(&mut self, p: &PauliString, theta: F) -> Result<(), PauliError> {
        if p.n_qubits != self.n_qubits {
            return Err(PauliError::QubitMismatch(p.n_qubits, self.n_qubits));
        }
        if theta == F::zero() {
            return Ok(());
        }
        let c = theta.cos();
        let s = theta.sin();
        let is = Complex::new(F::zero(), s);
        if p.x == 0 {
            // diagonal string: P|b> = (+-1)|b>
            for (b, amp) in self.amps.iter_mut().enumerate() {
                let sign = if (b as u64 & p.z).count_ones() % 2 == 0 {
                    F::one()
                } else {
                    -F::one()
                };
                *amp *= Complex::new(c, s * sign);
            }
            return Ok(());
        }
        for b in 0..self.amps.len() {
            let partner = (b as u64 ^ p.x) as usize;
            if partner < b {
                continue;
            }
            let (_, k_b) = p.apply_to_basis(b as u64); // P|b> = i^k_b |partner>
            let (_, k_p) = p.apply_to_basis(partner as u64);
            let ab = self.amps[b];
            let ap = self.amps[partner];
            self.amps[b] = ab * c + is * quarter_phase::<F>(k_p) * ap;
            self.amps[partner] = ap * c + is * quarter_phase::<F>(k_b) * ab;
        }
        Ok(())
    }

    /// <psi|P|psi>; real because letter strings are hermitian.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<F, PauliError> {
        if p.n_qubits != self.n_qubits {
            return Err(PauliError::QubitMismatch(p.n_qubits, self.n_qubits));
        }
        let mut acc = Complex::new(F::zero(), F::zero());
        for (b, amp) in self.amps.iter().enumerate() {
            if amp.re == F::zero() && amp.im == F::zero() {
                continue;
            }
            let (target, k) = p.apply_to_basis(b as u64);
            acc += self.amps[target as usize].conj() * quarter_phase::<F>(k) * amp;
        }
        Ok(acc.re)
    }

    /// H|psi> including the constant term.
    pub fn apply_hamiltonian(&self, h: &QubitHamiltonian<F>) -> Result<Self, PauliError> {
        let mut out = Self {
            amps: self
                .amps
                .iter()
                .map(|a| a * Complex::new(h.constant, F::zero()))
                .collect(),
            n_qubits: self.n_qubits,
        };
        for (c, p) in &h.terms {
            if p.n_qubits != self.n_qubits {
                return Err(PauliError::QubitMismatch(p.n_qubits, self.n_qubits));
            }
            for (b, amp) in self.amps.iter().enumerate() {
                if amp.re == F::zero() && amp.im == F::zero() {
                    continue;
                }
                let (target, k) = p.apply_to_basis(b as u64);
                out.amps[target as usize] += quarter_phase::<F>(k) * amp * Complex::new(*c, F::zero());
            }
        }
        Ok(out)
    }

    /// Exact <psi|H|psi>.
    pub fn expectation_exact(&self, h: &QubitHamiltonian<F>) -> Result<F, PauliError> {
        let mut e = h.constant;
        for (c, p) in &h.terms {
            e += *c * self.expectation_pauli(p)?;
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_of_z_on_zero_state_is_global_phase() {
        let mut s = StateVector::<f64>::computational_basis(1, 0);
        let z = PauliString::parse("Z").unwrap();
        let theta = 0.37;
        s.apply_pauli_exponential(&z, theta).unwrap();
        assert_relative_eq!(s.amps[0].re, theta.cos(), max_relative = 1e-14);
        assert_relative_eq!(s.amps[0].im, theta.sin(), max_relative = 1e-14);
    }

    #[test]
    fn zero_angle_is_identity() {
        let mut s = StateVector::<f64>::computational_basis(2, 2);
        let p = PauliString::parse("XY").unwrap();
        let before = s.clone();
        s.apply_pauli_exponential(&p, 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn exponential_matches_dense_oracle() {
        // dense 2^n x 2^n matrix exponential via series, n = 3
        let n = 3;
        let p = PauliString::parse("XYZ").unwrap();
        let theta = 0.61;
        // build dense P
        let dim = 1 << n;
        let mut dense = vec![vec![Complex::new(0.0, 0.0); dim]; dim];
        for b in 0..dim as u64 {
            let (t, k) = p.apply_to_basis(b);
            dense[t as usize][b as usize] = quarter_phase::<f64>(k);
        }
        // exp(i theta P) = cos I + i sin P exactly (P^2 = I); still sum the
        // series independently as the oracle
        let mut u = vec![vec![Complex::new(0.0, 0.0); dim]; dim];
        let mut term = vec![vec![Complex::new(0.0, 0.0); dim]; dim];
        for d in 0..dim {
            term[d][d] = Complex::new(1.0, 0.0);
            u[d][d] = Complex::new(1.0, 0.0);
        }
        for k in 1..40 {
            // term <- term * (i theta P) / k
            let mut next = vec![vec![Complex::new(0.0, 0.0); dim]; dim];
            for r in 0..dim {
                for c in 0..dim {
                    let mut acc = Complex::new(0.0, 0.0);
                    for m in 0..dim {
                        acc += term[r][m] * dense[m][c];
                    }
                    next[r][c] = acc * Complex::new(0.0, theta) / Complex::new(k as f64, 0.0);
                }
            }
            for r in 0..dim {
                for c in 0..dim {
                    u[r][c] += next[r][c];
                }
            }
            term = next;
        }
        // random-ish normalized state
        let mut s = StateVector::<f64>::computational_basis(n, 0);
        for (i, a) in s.amps.iter_mut().enumerate() {
            *a = Complex::new(1.0 + i as f64, 0.3 * i as f64);
        }
        let norm = s.norm();
        for a in s.amps.iter_mut() {
            *a /= Complex::new(norm, 0.0);
        }
        let mut expect = vec![Complex::new(0.0, 0.0); dim];
        for r in 0..dim {
            for c in 0..dim {
                expect[r] += u[r][c] * s.amps[c];
            }
        }
        s.apply_pauli_exponential(&p, theta).unwrap();
        for r in 0..dim {
            assert!((s.amps[r] - expect[r]).norm() < 1e-10);
        }
        assert_relative_eq!(s.norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn expectation_z_on_zero() {
        let s = StateVector::<f64>::computational_basis(1, 0);
        let h = QubitHamiltonian::<f64> {
            terms: vec![(1.0, PauliString::parse("Z").unwrap())],
            constant: 0.0,
            n_qubits: 1,
        };
        assert_eq!(s.expectation_exact(&h).unwrap(), 1.0);
    }

    #[test]
    fn constant_only_hamiltonian() {
        let s = StateVector::<f64>::computational_basis(2, 3);
        let h = QubitHamiltonian::<f64> {
            terms: vec![],
            constant: -2.5,
            n_qubits: 2,
        };
        assert_eq!(s.expectation_exact(&h).unwrap(), -2.5);
    }

    #[test]
    fn qubit_mismatch_rejected() {
        let mut s = StateVector::<f64>::computational_basis(2, 0);
        let p = PauliString::parse("XYZ").unwrap();
        assert!(s.apply_pauli_exponential(&p, 0.1).is_err());
    }
}
