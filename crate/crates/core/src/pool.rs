//! ADAPT operator pool: spin-complemented singlet-preserving single and
//! double excitations over the active spatial orbitals, with cached
//! Pauli decompositions and CNOT-staircase costs.

use crate::jordan_wigner::{jordan_wigner_sum, FermionTerm, JwError};
use crate::pauli::PauliString;
use crate::scalar::Scalar;

/// Excitation kind with spatial-orbital labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    /// E_pq - E_qp (excite q -> p), p > q
    Single { p: usize, q: usize },
    /// E_pq E_rs - E_sr E_qp, p > q, r > s, (p,q) <= (r,s)
    Double { p: usize, q: usize, r: usize, s: usize },
}

impl std::fmt::Display for PoolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoolKind::Single { p, q } => write!(f, "single {q}->{p}"),
            PoolKind::Double { p, q, r, s } => write!(f, "double {q}->{p},{s}->{r}"),
        }
    }
}

/// Anti-hermitian generator A = sum_k i c_k P_k; the ansatz applies
/// exp(theta A) as the ordered product of exp(i theta c_k P_k).
#[derive(Debug, Clone)]
pub struct PoolOperator<F> {
    pub id: usize,
    pub kind: PoolKind,
    /// (c_k, P_k) with real c_k
    pub strings: Vec<(F, PauliString)>,
}

impl<F: Scalar> PoolOperator<F> {
    /// CNOT-staircase cost: 2 (weight - 1) per exponentiated string.
    pub fn cnot_cost(&self) -> usize {
        self.strings
            .iter()
            .map(|(_, p)| 2 * (p.weight().saturating_sub(1)))
            .sum()
    }
}

fn generator_strings<F: Scalar>(
    terms: &[FermionTerm<F>],
    n_modes: usize,
) -> Result<Vec<(F, PauliString)>, JwError> {
    let strings = jordan_wigner_sum(terms, n_modes)?;
    let mut out = Vec::with_capacity(strings.len());
    for (c, p) in strings {
        // anti-hermitian generators decompose with purely imaginary
        // coefficients; store A = sum i c_k P_k via the real c_k
        debug_assert!(
            c.re.abs() < F::fl(1e-12),
            "generator string {p} has real part {:?}",
            c.re.to_f64()
        );
        out.push((c.im, p));
    }
    out.sort_by_key(|(_, p)| (p.z, p.x));
    Ok(out)
}

fn singlet_e<F: Scalar>(p: usize, q: usize, n_orb: usize, coeff: F) -> Vec<FermionTerm<F>> {
    vec![
        FermionTerm::real(coeff, vec![(p, true), (q, false)]),
        FermionTerm::real(coeff, vec![(p + n_orb, true), (q + n_orb, false)]),
    ]
}

fn product_terms<F: Scalar>(
    a: &[FermionTerm<F>],
    b: &[FermionTerm<F>],
) -> Vec<FermionTerm<F>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for ta in a {
        for tb in b {
            let mut ops = ta.ops.clone();
            ops.extend_from_slice(&tb.ops);
            out.push(FermionTerm {
                coeff: ta.coeff * tb.coeff,
                ops,
            });
        }
    }
    out
}

/// Build the full singles-plus-doubles pool for `n_orb` active orbitals.
pub fn build_pool<F: Scalar>(n_orb: usize) -> Vec<PoolOperator<F>> {
    let n_modes = 2 * n_orb;
    let mut pool = Vec::new();
    let one = F::one();

    // singles: E_pq - E_qp for p > q
    for p in 0..n_orb {
        for q in 0..p {
            let mut terms = singlet_e(p, q, n_orb, one);
            terms.extend(singlet_e(q, p, n_orb, -one));
            let strings = generator_strings(&terms, n_modes).expect("pool indices in range");
            pool.push(PoolOperator {
                id: pool.len(),
                kind: PoolKind::Single { p, q },
                strings,
            });
        }
    }

    // doubles: E_pq E_rs - E_sr E_qp for p > q, r > s, (p,q) <= (r,s)
    let mut pairs = Vec::new();
    for p in 0..n_orb {
        for q in 0..p {
            pairs.push((p, q));
        }
    }
    for (i, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[i..] {
            let e_pq = singlet_e(p, q, n_orb, one);
            let e_rs = singlet_e(r, s, n_orb, one);
            let e_sr = singlet_e(s, r, n_orb, one);
            let e_qp = singlet_e(q, p, n_orb, one);
            let mut terms = product_terms(&e_pq, &e_rs);
            for mut t in product_terms(&e_sr, &e_qp) {
                t.coeff = -t.coeff;
                terms.push(t);
            }
            let strings = generator_strings(&terms, n_modes).expect("pool indices in range");
            if strings.is_empty() {
                continue;
            }
            pool.push(PoolOperator {
                id: pool.len(),
                kind: PoolKind::Double { p, q, r, s },
                strings,
            });
        }
    }
    pool
}
