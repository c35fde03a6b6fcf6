//! Jordan-Wigner mapping of fermionic operator products to Pauli strings.
//!
//! Mode p maps to a_p = Z_0 ... Z_{p-1} (X_p + i Y_p)/2; the adjoint gets
//! the conjugate sign on the Y branch.

use crate::pauli::{PauliError, PauliString};
use crate::scalar::Scalar;
use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum JwError {
    #[error("mode index {0} out of range for {1} modes")]
    ModeOutOfRange(usize, usize),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// One product of creation/annihilation operators with a coefficient;
/// `ops` are applied right to left, stored left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm<F> {
    pub coeff: Complex<F>,
    /// (mode, is_creation)
    pub ops: Vec<(usize, bool)>,
}

impl<F: Scalar> FermionTerm<F> {
    pub fn new(coeff: Complex<F>, ops: Vec<(usize, bool)>) -> Self {
        Self { coeff, ops }
    }

    pub fn real(coeff: F, ops: Vec<(usize, bool)>) -> Self {
        Self {
            coeff: Complex::new(coeff, F::zero()),
            ops,
        }
    }
}

/// Map one fermionic term to its Pauli-string expansion (unmerged).
pub fn jordan_wigner<F: Scalar>(
    term: &FermionTerm<F>,
    n_modes: usize,
) -> Result<Vec<(Complex<F>, PauliString)>, JwError> {
    for &(mode, _) in &term.ops {
        if mode >= n_modes {
            return Err(JwError::ModeOutOfRange(mode, n_modes));
        }
    }
    let half = F::fl(0.5);
    let mut acc: Vec<(Complex<F>, PauliString)> =
        vec![(term.coeff, PauliString::identity(n_modes))];
    for &(mode, creation) in &term.ops {
        let chain: u64 = (1u64 << mode) - 1;
        let x_str = PauliString::from_masks(1 << mode, chain, n_modes)?;
        let y_str = PauliString::from_masks(1 << mode, chain | (1 << mode), n_modes)?;
        let x_coeff = Complex::new(half, F::zero());
        let y_coeff = if creation {
            Complex::new(F::zero(), -half)
        } else {
            Complex::new(F::zero(), half)
        };
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (c, p) in &acc {
            for (branch_c, branch_p) in [(x_coeff, &x_str), (y_coeff, &y_str)] {
                let (k, prod) = p.mul(branch_p)?;
                next.push((*c * branch_c * crate::pauli::quarter_phase::<F>(k), prod));
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Map several terms and merge identical strings (first-seen order).
pub fn jordan_wigner_sum<F: Scalar>(
    terms: &[FermionTerm<F>],
    n_modes: usize,
) -> Result<Vec<(Complex<F>, PauliString)>, JwError> {
    let mut order: Vec<PauliString> = Vec::new();
    let mut coeffs: std::collections::HashMap<(u64, u64), Complex<F>> =
        std::collections::HashMap::new();
    for term in terms {
        for (c, p) in jordan_wigner(term, n_modes)? {
            let key = (p.x, p.z);
            if !coeffs.contains_key(&key) {
                order.push(p);
            }
            *coeffs
                .entry(key)
                .or_insert_with(|| Complex::new(F::zero(), F::zero())) += c;
        }
    }
    let tol = F::fl(1e-12);
    Ok(order
        .into_iter()
        .filter_map(|p| {
            let c = coeffs[&(p.x, p.z)];
            if c.norm_sqr().sqrt() < tol {
                None
            } else {
                Some((c, p))
            }
        })
        .collect())
}

/// Spin-summed singlet excitation E_pq = sum_sigma a+_{p sigma} a_{q sigma}
/// as fermionic terms; spatial orbital p of spin sigma is mode
/// p + sigma * n_orbitals (alpha block first).
pub fn singlet_excitation_terms<F: Scalar>(p: usize, q: usize, n_orb: usize) -> Vec<FermionTerm<F>> {
    vec![
        FermionTerm::real(F::one(), vec![(p, true), (q, false)]),
        FermionTerm::real(F::one(), vec![(p + n_orb, true), (q + n_orb, false)]),
    ]
}
