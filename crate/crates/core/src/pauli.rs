//! Pauli strings in symplectic (x, z) bitmask representation and real
//! linear combinations of them.

use crate::scalar::Scalar;
use num_complex::Complex;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("invalid pauli letter '{0}'")]
    BadLetter(char),
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("more than 64 qubits are not supported")]
    TooManyQubits,
    #[error("hamiltonian coefficient has imaginary part {0:.3e} after canonicalization")]
    NonHermitian(f64),
}

/// Tensor product of single-qubit Paulis; qubit q is bit q of the masks.
/// The letter is I when neither mask has the bit, X for x-only, Z for
/// z-only, Y for both.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub n_qubits: usize,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            x: 0,
            z: 0,
            n_qubits,
        }
    }

    pub fn from_masks(x: u64, z: u64, n_qubits: usize) -> Result<Self, PauliError> {
        if n_qubits > 64 {
            return Err(PauliError::TooManyQubits);
        }
        Ok(Self { x, z, n_qubits })
    }

    /// Parse a label like "XIZY"; character 0 addresses qubit 0.
    pub fn parse(label: &str) -> Result<Self, PauliError> {
        if label.len() > 64 {
            return Err(PauliError::TooManyQubits);
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, c) in label.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                'Z' => z |= 1 << q,
                other => return Err(PauliError::BadLetter(other)),
            }
        }
        Ok(Self {
            x,
            z,
            n_qubits: label.len(),
        })
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Action on a computational basis state: P|b> = phase |b ^ x>.
    /// The returned phase is a quarter power of i with a sign from the
    /// z-mask parity.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (u64, u8) {
        let quarter = (self.y_count() + 2 * (b & self.z).count_ones()) % 4;
        (b ^ self.x, quarter as u8)
    }

    /// Product of two letter strings: returns (i^k, product string).
    pub fn mul(&self, other: &Self) -> Result<(u8, Self), PauliError> {
        if self.n_qubits != other.n_qubits {
            return Err(PauliError::QubitMismatch(self.n_qubits, other.n_qubits));
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y1 = self.y_count();
        let y2 = other.y_count();
        let y3 = (x & z).count_ones();
        let swaps = (self.z & other.x).count_ones();
        // i^{y1 + y2 - y3 + 2 swaps}
        let k = (y1 + y2 + 4 - (y3 % 4) + 2 * swaps) % 4;
        Ok((
            k as u8,
            Self {
                x,
                z,
                n_qubits: self.n_qubits,
            },
        ))
    }

    /// Strings either commute or anticommute; true if they commute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let a = (self.x & other.z).count_ones();
        let b = (self.z & other.x).count_ones();
        (a + b) % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// i^k as a complex number.
pub fn quarter_phase<F: Scalar>(k: u8) -> Complex<F> {
    match k % 4 {
        0 => Complex::new(F::one(), F::zero()),
        1 => Complex::new(F::zero(), F::one()),
        2 => Complex::new(-F::one(), F::zero()),
        _ => Complex::new(F::zero(), -F::one()),
    }
}

/// Real linear combination of Pauli strings plus a constant, with a
/// deterministic term order.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitHamiltonian<F> {
    pub terms: Vec<(F, PauliString)>,
    pub constant: F,
    pub n_qubits: usize,
}

impl<F: Scalar> QubitHamiltonian<F> {
    /// Merge complex-coefficient terms, fold identities into the constant,
    /// drop negligible terms, and verify hermiticity (real coefficients).
    pub fn from_complex_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (Complex<F>, PauliString)>,
        constant: F,
    ) -> Result<Self, PauliError> {
        let mut merged: HashMap<(u64, u64), Complex<F>> = HashMap::new();
        for (c, p) in terms {
            if p.n_qubits != n_qubits {
                return Err(PauliError::QubitMismatch(p.n_qubits, n_qubits));
            }
            let e = merged
                .entry((p.x, p.z))
                .or_insert_with(|| Complex::new(F::zero(), F::zero()));
            *e += c;
        }
        let tol = F::fl(1e-12);
        let mut out = Vec::new();
        let mut constant = constant;
        for ((x, z), c) in merged {
            if c.norm_sqr().sqrt() < tol {
                continue;
            }
            if c.im.abs() > F::fl(1e-10) {
                return Err(PauliError::NonHermitian(c.im.to_f64()));
            }
            let p = PauliString { x, z, n_qubits };
            if p.is_identity() {
                constant += c.re;
            } else {
                out.push((c.re, p));
            }
        }
        out.sort_by_key(|(_, p)| (p.z, p.x));
        Ok(Self {
            terms: out,
            constant,
            n_qubits,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest absolute coefficient (scale estimate).
    pub fn max_coeff(&self) -> F {
        self.terms
            .iter()
            .fold(F::zero(), |a, (c, _)| a.max(c.abs()))
    }
}
