//! Electronic-structure problem containers shared by the qubit and
//! determinant solver routes.

use crate::scalar::Scalar;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("one-electron matrix not hermitian (max asymmetry {0:.3e})")]
    NonHermitianOneElectron(f64),
    #[error("two-electron tensor violates 8-fold symmetry (max {0:.3e})")]
    AsymmetricTwoElectron(f64),
    #[error("environment one-electron matrix not hermitian (max asymmetry {0:.3e})")]
    NonHermitianEnvironment(f64),
    #[error("electron count {0} impossible for {1} orbitals")]
    BadElectronCount(usize, usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Dense four-index tensor in chemists' notation g[(pq|rs)].
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4<F> {
    pub n: usize,
    data: Vec<F>,
}

impl<F: Scalar> Tensor4<F> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![F::zero(); n * n * n * n],
        }
    }

    #[inline]
    fn idx(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> F {
        self.data[self.idx(p, q, r, s)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: F) {
        let i = self.idx(p, q, r, s);
        self.data[i] = v;
    }

    /// Set all eight chemists'-symmetry partners of (pq|rs).
    pub fn set_symmetric(&mut self, p: usize, q: usize, r: usize, s: usize, v: F) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.set(a, b, c, d, v);
        }
    }

    /// Largest violation of the 8-fold real-orbital symmetry.
    pub fn max_symmetry_violation(&self) -> F {
        let mut worst = F::zero();
        for p in 0..self.n {
            for q in 0..=p {
                for r in 0..self.n {
                    for s in 0..=r {
                        let v = self.get(p, q, r, s);
                        for w in [
                            self.get(q, p, r, s),
                            self.get(p, q, s, r),
                            self.get(r, s, p, q),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |a, v| a.max(v.abs()))
    }

    /// Restrict to a contiguous orbital window [start, start+len).
    pub fn window(&self, start: usize, len: usize) -> Tensor4<F> {
        let mut out = Tensor4::zeros(len);
        for p in 0..len {
            for q in 0..len {
                for r in 0..len {
                    for s in 0..len {
                        out.set(p, q, r, s, self.get(start + p, start + q, start + r, start + s));
                    }
                }
            }
        }
        out
    }
}

/// Active-space electronic problem: integrals over the active window, the
/// accumulated scalar core energy, and an optional folded environment
/// one-electron operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSpaceProblem<F> {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    /// twice the spin projection (FCIDUMP MS2)
    pub ms2: i64,
    pub h: DMatrix<F>,
    pub g: Tensor4<F>,
    pub core_energy: F,
    pub env_one_electron: Option<DMatrix<F>>,
}

impl<F: Scalar> ActiveSpaceProblem<F> {
    pub fn validate(&self) -> Result<(), ProblemError> {
        if self.h.nrows() != self.n_orbitals || self.h.ncols() != self.n_orbitals {
            return Err(ProblemError::ShapeMismatch(format!(
                "h is {}x{}, expected {0}",
                self.h.nrows(),
                self.h.ncols(),
            )));
        }
        if self.g.n != self.n_orbitals {
            return Err(ProblemError::ShapeMismatch(format!(
                "g has {} orbitals, expected {}",
                self.g.n, self.n_orbitals
            )));
        }
        let tol = F::fl(1e-8);
        let h_asym = (&self.h - self.h.transpose()).amax();
        if h_asym > tol {
            return Err(ProblemError::NonHermitianOneElectron(h_asym.to_f64()));
        }
        let g_asym = self.g.max_symmetry_violation();
        if g_asym > tol {
            return Err(ProblemError::AsymmetricTwoElectron(g_asym.to_f64()));
        }
        if let Some(env) = &self.env_one_electron {
            if env.shape() != self.h.shape() {
                return Err(ProblemError::ShapeMismatch(
                    "environment matrix shape".to_string(),
                ));
            }
            let asym = (env - env.transpose()).amax();
            if asym > tol {
                return Err(ProblemError::NonHermitianEnvironment(asym.to_f64()));
            }
        }
        if self.n_electrons > 2 * self.n_orbitals {
            return Err(ProblemError::BadElectronCount(
                self.n_electrons,
                self.n_orbitals,
            ));
        }
        Ok(())
    }

    /// Effective one-electron matrix including the environment operator.
    pub fn one_electron_effective(&self) -> DMatrix<F> {
        match &self.env_one_electron {
            Some(env) => &self.h + env,
            None => self.h.clone(),
        }
    }

    pub fn n_alpha(&self) -> usize {
        (self.n_electrons as i64 + self.ms2) as usize / 2
    }

    pub fn n_beta(&self) -> usize {
        self.n_electrons - self.n_alpha()
    }
}

/// Electronic energy from spin-summed RDMs:
/// E = sum h_pq D_pq + 1/2 sum g_pqrs d_pqrs + core.
pub fn energy_from_rdms<F: Scalar>(
    h: &DMatrix<F>,
    g: &Tensor4<F>,
    d1: &DMatrix<F>,
    d2: &Tensor4<F>,
    core: F,
) -> F {
    let n = h.nrows();
    let mut e = core;
    for p in 0..n {
        for q in 0..n {
            e += h[(p, q)] * d1[(p, q)];
        }
    }
    let half = F::fl(0.5);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    e += half * g.get(p, q, r, s) * d2.get(p, q, r, s);
                }
            }
        }
    }
    e
}

/// Full-orbital-space problem as read from an integrals file.
#[derive(Debug, Clone, PartialEq)]
pub struct FullProblem<F> {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub ms2: i64,
    pub h: DMatrix<F>,
    pub g: Tensor4<F>,
    /// nuclear repulsion plus any constant from the integrals file
    pub core_constant: F,
}

impl<F: Scalar> FullProblem<F> {
    /// View the full space as an all-active problem.
    pub fn as_active(&self) -> ActiveSpaceProblem<F> {
        ActiveSpaceProblem {
            n_orbitals: self.n_orbitals,
            n_electrons: self.n_electrons,
            ms2: self.ms2,
            h: self.h.clone(),
            g: self.g.clone(),
            core_energy: self.core_constant,
            env_one_electron: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor4_symmetry_fill() {
        let mut g = Tensor4::<f64>::zeros(3);
        g.set_symmetric(0, 1, 2, 2, 0.7);
        assert_eq!(g.get(1, 0, 2, 2), 0.7);
        assert_eq!(g.get(2, 2, 0, 1), 0.7);
        assert_eq!(g.get(2, 2, 1, 0), 0.7);
        assert_eq!(g.max_symmetry_violation(), 0.0);
        g.set(0, 1, 2, 2, 0.9);
        assert!(g.max_symmetry_violation() > 0.19);
    }

    #[test]
    fn validation_catches_asymmetry() {
        let mut p = ActiveSpaceProblem::<f64> {
            n_orbitals: 2,
            n_electrons: 2,
            ms2: 0,
            h: DMatrix::zeros(2, 2),
            g: Tensor4::zeros(2),
            core_energy: 0.0,
            env_one_electron: None,
        };
        p.validate().unwrap();
        p.h[(0, 1)] = 1e-6;
        assert!(matches!(
            p.validate(),
            Err(ProblemError::NonHermitianOneElectron(_))
        ));
    }

    #[test]
    fn spin_sector_counts() {
        let p = ActiveSpaceProblem::<f64> {
            n_orbitals: 6,
            n_electrons: 6,
            ms2: 0,
            h: DMatrix::zeros(6, 6),
            g: Tensor4::zeros(6),
            core_energy: 0.0,
            env_one_electron: None,
        };
        assert_eq!(p.n_alpha(), 3);
        assert_eq!(p.n_beta(), 3);
    }
}
