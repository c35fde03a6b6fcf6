//! Classical polarizable-embedding engine: permanent-multipole fields,
//! induced-dipole self-consistency, environment operators folded into
//! one-electron matrices, and the direct environment EFG contribution.

mod potential;

pub use potential::{parse_potential_file, parse_potential_str, write_potential_file};

use crate::efg::EfgTensor;
use crate::multipole::{contract, interaction_tensor, Moment, MultipoleSet};
use crate::scalar::Scalar;
use crate::siteints::SiteIntegralSet;
use crate::{Mat3, Vec3};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PeError {
    #[error("potential file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("sites {0} and {1} share a position")]
    DuplicatePosition(usize, usize),
    #[error("site {0}: polarizability not symmetric positive semidefinite")]
    BadPolarizability(usize),
    #[error("site {0}: polarizability singular, cannot build response matrix")]
    SingularPolarizability(usize),
    #[error("probe point coincides with site {0}")]
    SingularGeometry(usize),
    #[error("response matrix ill-conditioned (cond ~ {cond:.3e}), residual {residual:.3e}")]
    IllConditioned { cond: f64, residual: f64 },
    #[error("induced-dipole iteration did not converge in {sweeps} sweeps (delta {delta:.3e})")]
    IterativeNonConvergence { sweeps: usize, delta: f64 },
    #[error("site integrals cover {got} sites, environment has {want}")]
    MissingSiteIntegrals { got: usize, want: usize },
    #[error("site {0} integrals (order {1}) are not hermitian")]
    NonHermitianIntegrals(usize, usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// One expansion site: permanent multipoles plus a polarizability.
/// Sites sharing an exclusion group neither polarize each other nor see
/// each other's permanent fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizableSite<F> {
    pub position: Vec3<F>,
    pub multipoles: MultipoleSet<F>,
    pub polarizability: Mat3<F>,
    pub group: usize,
}

impl<F: Scalar> PolarizableSite<F> {
    pub fn is_polarizable(&self) -> bool {
        self.polarizability != Mat3::zeros()
    }
}

/// Ordered list of polarizable sites.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnvironmentModel<F> {
    sites: Vec<PolarizableSite<F>>,
}

impl<F: Scalar> EnvironmentModel<F> {
    pub fn new(sites: Vec<PolarizableSite<F>>) -> Result<Self, PeError> {
        for i in 0..sites.len() {
            for j in (i + 1)..sites.len() {
                if sites[i].position == sites[j].position {
                    return Err(PeError::DuplicatePosition(i, j));
                }
            }
            let a = &sites[i].polarizability;
            if (a - a.transpose()).amax() > F::fl(1e-12) {
                return Err(PeError::BadPolarizability(i));
            }
            let eig = a.symmetric_eigen();
            let min = eig.eigenvalues.min();
            let max = eig.eigenvalues.amax();
            if min < -F::fl(1e-10) * max.max(F::one()) {
                return Err(PeError::BadPolarizability(i));
            }
        }
        Ok(Self { sites })
    }

    pub fn empty() -> Self {
        Self { sites: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[PolarizableSite<F>] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &PolarizableSite<F> {
        &self.sites[i]
    }

    /// Indices of sites with a non-zero polarizability; only these enter
    /// the response system.
    pub fn polarizable_indices(&self) -> Vec<usize> {
        self.sites
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_polarizable())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Dense classical response matrix over the polarizable sites:
/// diagonal blocks alpha_s^-1, off-diagonal blocks -T^(2)_ss'.
#[derive(Debug, Clone)]
pub struct ResponseMatrix<F> {
    pub matrix: DMatrix<F>,
    pub site_indices: Vec<usize>,
}

pub fn build_response_matrix<F: Scalar>(
    env: &EnvironmentModel<F>,
) -> Result<ResponseMatrix<F>, PeError> {
    let idx = env.polarizable_indices();
    let m = idx.len();
    let mut b = DMatrix::zeros(3 * m, 3 * m);
    for (bi, &si) in idx.iter().enumerate() {
        let site = env.site(si);
        let inv = site
            .polarizability
            .try_inverse()
            .ok_or(PeError::SingularPolarizability(si))?;
        for a in 0..3 {
            for c in 0..3 {
                b[(3 * bi + a, 3 * bi + c)] = inv[(a, c)];
            }
        }
        for (bj, &sj) in idx.iter().enumerate() {
            if bi == bj {
                continue;
            }
            let other = env.site(sj);
            if other.group == site.group {
                continue; // excluded pair: zero block
            }
            let r = site.position - other.position;
            let t2 = interaction_tensor(2, &r)
                .map_err(|_| PeError::DuplicatePosition(si, sj))?
                .matrix();
            for a in 0..3 {
                for c in 0..3 {
                    b[(3 * bi + a, 3 * bj + c)] = -t2[(a, c)];
                }
            }
        }
    }
    Ok(ResponseMatrix {
        matrix: b,
        site_indices: idx,
    })
}

/// Electric field at `point` from the permanent multipoles of all sites,
/// omitting sites in `skip_group` (the probe's own exclusion group).
pub fn static_field<F: Scalar>(
    env: &EnvironmentModel<F>,
    point: &Vec3<F>,
    skip_group: Option<usize>,
) -> Result<Vec3<F>, PeError> {
    let mut field = Vec3::zeros();
    for (i, site) in env.sites().iter().enumerate() {
        if skip_group == Some(site.group) {
            continue;
        }
        if site.multipoles.is_zero() {
            continue;
        }
        let r = point - site.position;
        if r == Vec3::zeros() {
            return Err(PeError::SingularGeometry(i));
        }
        field += field_from_multipoles(&site.multipoles, &r)?;
    }
    Ok(field)
}

/// Field at r from multipoles at the origin: -grad of the multipole
/// potential, i.e. -q T^(1) + T^(2) mu - 1/2 Theta : T^(3).
fn field_from_multipoles<F: Scalar>(
    m: &MultipoleSet<F>,
    r: &Vec3<F>,
) -> Result<Vec3<F>, PeError> {
    let mut f = Vec3::zeros();
    if m.charge != F::zero() {
        let t1 = interaction_tensor(1, r).map_err(|_| PeError::SingularGeometry(0))?;
        f -= contract(&t1, &Moment::Charge(m.charge)).unwrap().vector();
    }
    if m.dipole != Vec3::zeros() {
        let t2 = interaction_tensor(2, r).map_err(|_| PeError::SingularGeometry(0))?;
        f -= contract(&t2, &Moment::Dipole(m.dipole)).unwrap().vector();
    }
    if m.quadrupole != Mat3::zeros() {
        let t3 = interaction_tensor(3, r).map_err(|_| PeError::SingularGeometry(0))?;
        f -= contract(&t3, &Moment::Quadrupole(m.quadrupole))
            .unwrap()
            .vector();
    }
    Ok(f)
}

/// Stacked permanent-multipole fields at every polarizable site, honoring
/// exclusion groups. QM (electron + nucleus) contributions are added by
/// the caller.
pub fn static_fields_at_sites<F: Scalar>(
    env: &EnvironmentModel<F>,
) -> Result<DVector<F>, PeError> {
    let idx = env.polarizable_indices();
    let mut f = DVector::zeros(3 * idx.len());
    for (bi, &si) in idx.iter().enumerate() {
        let here = env.site(si);
        let v = static_field(env, &here.position, Some(here.group))?;
        for a in 0..3 {
            f[3 * bi + a] = v[a];
        }
    }
    Ok(f)
}

/// How to solve B mu = F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMode<F> {
    /// Dense LU with iterative refinement; residual must reach 1e-10.
    Direct,
    /// Jacobi fixed point mu <- alpha (F + T^(2) mu).
    Iterative { tol: F, max_sweeps: usize },
}

impl<F: Scalar> SolveMode<F> {
    /// Dense below 3000 sites, fixed-point iteration above.
    pub fn auto(n_polarizable: usize) -> Self {
        if n_polarizable <= 3000 {
            SolveMode::Direct
        } else {
            SolveMode::Iterative {
                tol: F::fl(1e-8),
                max_sweeps: 200,
            }
        }
    }
}

/// Induced dipoles solving B mu = F, kept alongside the site mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedDipoles<F> {
    pub mu: DVector<F>,
    pub site_indices: Vec<usize>,
    pub residual_inf: F,
    pub sweeps: Option<usize>,
}

impl<F: Scalar> InducedDipoles<F> {
    pub fn zeros(env: &EnvironmentModel<F>) -> Self {
        let idx = env.polarizable_indices();
        Self {
            mu: DVector::zeros(3 * idx.len()),
            site_indices: idx,
            residual_inf: F::zero(),
            sweeps: None,
        }
    }

    /// Dipole on environment site `i` (zero if the site is not polarizable).
    pub fn site_dipole(&self, i: usize) -> Vec3<F> {
        match self.site_indices.iter().position(|&s| s == i) {
            Some(b) => Vec3::new(self.mu[3 * b], self.mu[3 * b + 1], self.mu[3 * b + 2]),
            None => Vec3::zeros(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> F {
        let mut m = F::zero();
        for i in 0..self.mu.len().min(other.mu.len()) {
            m = m.max((self.mu[i] - other.mu[i]).abs());
        }
        m
    }
}

pub fn solve_induced_dipoles<F: Scalar>(
    b: &ResponseMatrix<F>,
    fields: &DVector<F>,
    mode: SolveMode<F>,
) -> Result<InducedDipoles<F>, PeError> {
    if fields.len() != b.matrix.nrows() {
        return Err(PeError::ShapeMismatch(format!(
            "field vector {} vs response matrix {}",
            fields.len(),
            b.matrix.nrows()
        )));
    }
    if fields.is_empty() {
        return Ok(InducedDipoles {
            mu: DVector::zeros(0),
            site_indices: b.site_indices.clone(),
            residual_inf: F::zero(),
            sweeps: None,
        });
    }
    match mode {
        SolveMode::Direct => {
            let lu = b.matrix.clone().lu();
            let mut mu = lu
                .solve(fields)
                .ok_or(PeError::SingularPolarizability(usize::MAX))?;
            // iterative refinement toward the 1e-10 residual contract
            for _ in 0..2 {
                let r = fields - &b.matrix * &mu;
                if r.amax() <= F::fl(1e-10) {
                    break;
                }
                if let Some(d) = lu.solve(&r) {
                    mu += d;
                }
            }
            let residual = (fields - &b.matrix * &mu).amax();
            if residual > F::fl(1e-10) {
                let u = lu.u();
                let mut dmax = F::zero();
                let mut dmin = F::fl(f64::INFINITY);
                for i in 0..u.nrows().min(u.ncols()) {
                    let d = u[(i, i)].abs();
                    dmax = dmax.max(d);
                    dmin = dmin.min(d);
                }
                let cond = if dmin > F::zero() {
                    (dmax / dmin).to_f64()
                } else {
                    f64::INFINITY
                };
                return Err(PeError::IllConditioned {
                    cond,
                    residual: residual.to_f64(),
                });
            }
            Ok(InducedDipoles {
                mu,
                site_indices: b.site_indices.clone(),
                residual_inf: residual,
                sweeps: None,
            })
        }
        SolveMode::Iterative { tol, max_sweeps } => {
            let m = b.site_indices.len();
            // alpha blocks are the inverses of B's diagonal blocks
            let mut alphas = Vec::with_capacity(m);
            for bi in 0..m {
                let mut blk = Mat3::zeros();
                for a in 0..3 {
                    for c in 0..3 {
                        blk[(a, c)] = b.matrix[(3 * bi + a, 3 * bi + c)];
                    }
                }
                alphas.push(
                    blk.try_inverse()
                        .ok_or(PeError::SingularPolarizability(b.site_indices[bi]))?,
                );
            }
            let mut mu = DVector::zeros(3 * m);
            let mut delta = F::fl(f64::INFINITY);
            let mut used = 0;
            for sweep in 0..max_sweeps {
                let mut next = DVector::zeros(3 * m);
                for bi in 0..m {
                    let mut f = Vec3::new(fields[3 * bi], fields[3 * bi + 1], fields[3 * bi + 2]);
                    for bj in 0..m {
                        if bi == bj {
                            continue;
                        }
                        // off-diagonal block of B is -T^(2); the fixed point
                        // adds +T^(2) mu
                        for a in 0..3 {
                            for c in 0..3 {
                                f[a] -= b.matrix[(3 * bi + a, 3 * bj + c)] * mu[3 * bj + c];
                            }
                        }
                    }
                    let v = alphas[bi] * f;
                    for a in 0..3 {
                        next[3 * bi + a] = v[a];
                    }
                }
                delta = (&next - &mu).amax();
                mu = next;
                used = sweep + 1;
                if delta <= tol {
                    break;
                }
            }
            if delta > tol {
                return Err(PeError::IterativeNonConvergence {
                    sweeps: used,
                    delta: delta.to_f64(),
                });
            }
            let residual = (fields - &b.matrix * &mu).amax();
            Ok(InducedDipoles {
                mu,
                site_indices: b.site_indices.clone(),
                residual_inf: residual,
                sweeps: Some(used),
            })
        }
    }
}

/// Direct environment contribution to the EFG at `point`: permanent
/// multipoles through T^(k+2) with the (-1)^k/k! prefactors, plus the
/// induced dipoles through T^(3) scaled by `induced_factor` (0.5 as
/// printed; 1.0 selectable).
pub fn environment_efg<F: Scalar>(
    env: &EnvironmentModel<F>,
    induced: &InducedDipoles<F>,
    point: &Vec3<F>,
    induced_factor: F,
) -> Result<EfgTensor<F>, PeError> {
    let mut total = Mat3::zeros();
    for (i, site) in env.sites().iter().enumerate() {
        let r = point - site.position;
        if r == Vec3::zeros() {
            return Err(PeError::SingularGeometry(i));
        }
        let m = &site.multipoles;
        if m.charge != F::zero() {
            let t2 = interaction_tensor(2, &r).unwrap();
            total += contract(&t2, &Moment::Charge(m.charge)).unwrap().matrix();
        }
        if m.dipole != Vec3::zeros() {
            let t3 = interaction_tensor(3, &r).unwrap();
            total += contract(&t3, &Moment::Dipole(m.dipole)).unwrap().matrix();
        }
        if m.quadrupole != Mat3::zeros() {
            let t4 = interaction_tensor(4, &r).unwrap();
            total += contract(&t4, &Moment::Quadrupole(m.quadrupole))
                .unwrap()
                .matrix();
        }
        let mu = induced.site_dipole(i);
        if mu != Vec3::zeros() {
            let t3 = interaction_tensor(3, &r).unwrap();
            // +factor * sum_gamma mu_gamma T^(3): the printed induced term
            // has no (-1) sign, so undo the one in `contract`
            total -= contract(&t3, &Moment::Dipole(mu)).unwrap().matrix() * induced_factor;
        }
    }
    EfgTensor::from_matrix(total).map_err(|e| PeError::ShapeMismatch(e.to_string()))
}

/// Environment operators in the MO basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedOperator<F> {
    /// permanent-multipole electrostatic operator
    pub v_es: DMatrix<F>,
    /// induced-dipole operator
    pub v_ind: DMatrix<F>,
}

impl<F: Scalar> FoldedOperator<F> {
    pub fn zeros(n: usize) -> Self {
        Self {
            v_es: DMatrix::zeros(n, n),
            v_ind: DMatrix::zeros(n, n),
        }
    }

    pub fn combined(&self) -> DMatrix<F> {
        &self.v_es + &self.v_ind
    }
}

/// Fold the environment into one-electron MO matrices:
/// v_es = sum_s (q_s t0 - sum_a mu_a t1_a + sum_ab Theta_ab t2_ab),
/// v_ind = -sum_s mu_ind_s . t1_s.
pub fn fold_environment_operator<F: Scalar>(
    env: &EnvironmentModel<F>,
    induced: Option<&InducedDipoles<F>>,
    t: &SiteIntegralSet<F>,
) -> Result<FoldedOperator<F>, PeError> {
    if t.sites.len() != env.len() {
        return Err(PeError::MissingSiteIntegrals {
            got: t.sites.len(),
            want: env.len(),
        });
    }
    let n = t.n_orb;
    let herm = |m: &DMatrix<F>, site: usize, order: usize| -> Result<(), PeError> {
        if m.nrows() != n || m.ncols() != n {
            return Err(PeError::ShapeMismatch(format!(
                "site {site} order {order}: {}x{} vs n_orb {n}",
                m.nrows(),
                m.ncols()
            )));
        }
        if (m - m.transpose()).amax() > F::fl(1e-10) {
            return Err(PeError::NonHermitianIntegrals(site, order));
        }
        Ok(())
    };
    let mut v_es = DMatrix::zeros(n, n);
    let mut v_ind = DMatrix::zeros(n, n);
    for (i, (site, ints)) in env.sites().iter().zip(&t.sites).enumerate() {
        herm(&ints.t0, i, 0)?;
        for a in 0..3 {
            herm(&ints.t1[a], i, 1)?;
        }
        for c in 0..6 {
            herm(&ints.t2[c], i, 2)?;
        }
        let m = &site.multipoles;
        if m.charge != F::zero() {
            v_es += &ints.t0 * m.charge;
        }
        for a in 0..3 {
            if m.dipole[a] != F::zero() {
                v_es -= &ints.t1[a] * m.dipole[a];
            }
        }
        // printed explicit form: full double sum over ab, so off-diagonal
        // components count twice
        for (k, &(a, b)) in crate::efg::COMPONENT_PAIRS.iter().enumerate() {
            let theta = m.quadrupole[(a, b)];
            if theta != F::zero() {
                let w = if a == b { F::one() } else { F::fl(2.0) };
                v_es += &ints.t2[k] * (theta * w);
            }
        }
        if let Some(ind) = induced {
            let mu = ind.site_dipole(i);
            for a in 0..3 {
                if mu[a] != F::zero() {
                    v_ind -= &ints.t1[a] * mu[a];
                }
            }
        }
    }
    Ok(FoldedOperator { v_es, v_ind })
}

/// -1/2 Tr(D v_ind): the term separating the free energy from the plain
/// embedding expectation.
pub fn induction_energy_correction<F: Scalar>(
    v_ind: &DMatrix<F>,
    density: &DMatrix<F>,
) -> Result<F, PeError> {
    if v_ind.shape() != density.shape() || !v_ind.is_square() {
        return Err(PeError::ShapeMismatch(format!(
            "v_ind {:?} vs density {:?}",
            v_ind.shape(),
            density.shape()
        )));
    }
    let mut tr = F::zero();
    for p in 0..v_ind.nrows() {
        for q in 0..v_ind.ncols() {
            tr += density[(p, q)] * v_ind[(q, p)];
        }
    }
    Ok(-F::fl(0.5) * tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siteints::SiteIntegrals;
    use approx::assert_relative_eq;

    fn site(
        pos: [f64; 3],
        q: f64,
        alpha_iso: f64,
        group: usize,
    ) -> PolarizableSite<f64> {
        PolarizableSite {
            position: Vec3::new(pos[0], pos[1], pos[2]),
            multipoles: MultipoleSet::point_charge(q),
            polarizability: Mat3::identity() * alpha_iso,
            group,
        }
    }

    #[test]
    fn response_matrix_single_site() {
        let env = EnvironmentModel::new(vec![site([0.0; 3], 0.0, 2.0, 0)]).unwrap();
        let b = build_response_matrix(&env).unwrap();
        assert_eq!(b.matrix.nrows(), 3);
        for i in 0..3 {
            assert_relative_eq!(b.matrix[(i, i)], 0.5);
        }
    }

    #[test]
    fn response_matrix_two_sites() {
        let env = EnvironmentModel::new(vec![
            site([0.0, 0.0, 0.0], 0.0, 1.0, 0),
            site([0.0, 0.0, 1.0], 0.0, 1.0, 1),
        ])
        .unwrap();
        let b = build_response_matrix(&env).unwrap();
        // off-diagonal block -T^(2) = -diag(-1,-1,2)
        assert_relative_eq!(b.matrix[(0, 3)], 1.0);
        assert_relative_eq!(b.matrix[(1, 4)], 1.0);
        assert_relative_eq!(b.matrix[(2, 5)], -2.0);
        assert_relative_eq!(b.matrix[(3, 0)], 1.0);
    }

    #[test]
    fn response_matrix_exclusion_zeroes_block() {
        let env = EnvironmentModel::new(vec![
            site([0.0, 0.0, 0.0], 0.0, 1.0, 7),
            site([0.0, 0.0, 1.0], 0.0, 1.0, 7),
        ])
        .unwrap();
        let b = build_response_matrix(&env).unwrap();
        for a in 0..3 {
            for c in 0..3 {
                assert_eq!(b.matrix[(a, 3 + c)], 0.0);
            }
        }
    }

    #[test]
    fn singular_polarizability_rejected() {
        let mut s = site([0.0; 3], 0.0, 1.0, 0);
        s.polarizability[(2, 2)] = 0.0;
        let env = EnvironmentModel::new(vec![s]).unwrap();
        assert!(matches!(
            build_response_matrix(&env),
            Err(PeError::SingularPolarizability(0))
        ));
    }

    #[test]
    fn duplicate_positions_rejected() {
        let e = EnvironmentModel::new(vec![site([0.0; 3], 1.0, 1.0, 0), site([0.0; 3], -1.0, 1.0, 1)])
            .unwrap_err();
        assert_eq!(e, PeError::DuplicatePosition(0, 1));
    }

    #[test]
    fn static_field_single_charge() {
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, 1.0], 1.0, 0.0, 0)]).unwrap();
        let f = static_field(&env, &Vec3::zeros(), None).unwrap();
        assert_relative_eq!(f.z, -1.0);
        assert_eq!(f.x, 0.0);
    }

    #[test]
    fn static_field_zero_multipoles() {
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, 1.0], 0.0, 1.0, 0)]).unwrap();
        let f = static_field(&env, &Vec3::zeros(), None).unwrap();
        assert_eq!(f, Vec3::zeros());
    }

    #[test]
    fn static_field_mirror_charges() {
        let env = EnvironmentModel::new(vec![
            site([0.0, 0.0, 1.0], 1.0, 0.0, 0),
            site([0.0, 0.0, -1.0], -1.0, 0.0, 1),
        ])
        .unwrap();
        let f = static_field(&env, &Vec3::zeros(), None).unwrap();
        assert_relative_eq!(f.z, -2.0);
        assert_eq!(f.x, 0.0);
        assert_eq!(f.y, 0.0);
    }

    #[test]
    fn induced_dipoles_single_site() {
        let env = EnvironmentModel::new(vec![site([0.0; 3], 0.0, 1.0, 0)]).unwrap();
        let b = build_response_matrix(&env).unwrap();
        let f = DVector::from_vec(vec![0.0, 0.0, 0.1]);
        let mu = solve_induced_dipoles(&b, &f, SolveMode::Direct).unwrap();
        assert_relative_eq!(mu.site_dipole(0).z, 0.1, max_relative = 1e-14);
    }

    #[test]
    fn induced_dipoles_zero_field() {
        let env = EnvironmentModel::new(vec![
            site([0.0, 0.0, 0.0], 0.0, 1.0, 0),
            site([0.0, 0.0, 3.0], 0.0, 1.0, 1),
        ])
        .unwrap();
        let b = build_response_matrix(&env).unwrap();
        let f = DVector::zeros(6);
        let mu = solve_induced_dipoles(&b, &f, SolveMode::Direct).unwrap();
        assert_eq!(mu.mu.amax(), 0.0);
    }

    #[test]
    fn direct_solve_matches_fixed_point_oracle() {
        let env = EnvironmentModel::new(vec![
            site([0.0, 0.0, 0.0], 0.0, 1.0, 0),
            site([0.0, 0.0, 2.0], 0.0, 1.0, 1),
        ])
        .unwrap();
        let b = build_response_matrix(&env).unwrap();
        let f = DVector::from_vec(vec![0.02, 0.0, 0.05, -0.01, 0.03, 0.0]);
        let direct = solve_induced_dipoles(&b, &f, SolveMode::Direct).unwrap();

        // independent fixed-point oracle: mu <- alpha (F + T^(2) mu)
        let t2 = interaction_tensor::<f64>(2, &Vec3::new(0.0, 0.0, 2.0))
            .unwrap()
            .matrix();
        let mut mu = [Vec3::<f64>::zeros(); 2];
        for _ in 0..200 {
            let f0 = Vec3::new(f[0], f[1], f[2]) + t2 * mu[1];
            let f1 = Vec3::new(f[3], f[4], f[5]) + t2 * mu[0];
            let next = [f0, f1];
            let delta = (next[0] - mu[0]).amax().max((next[1] - mu[1]).amax());
            mu = next;
            if delta < 1e-12 {
                break;
            }
        }
        assert_relative_eq!(direct.site_dipole(0).z, mu[0].z, epsilon = 1e-10);
        assert_relative_eq!(direct.site_dipole(1).x, mu[1].x, epsilon = 1e-10);

        let iter = solve_induced_dipoles(
            &b,
            &f,
            SolveMode::Iterative {
                tol: 1e-12,
                max_sweeps: 500,
            },
        )
        .unwrap();
        assert!(direct.max_abs_diff(&iter) < 1e-10);
    }

    #[test]
    fn environment_efg_single_charge() {
        let d = 1.5;
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, d], 1.0, 0.0, 0)]).unwrap();
        let mu = InducedDipoles::zeros(&env);
        let t = environment_efg(&env, &mu, &Vec3::zeros(), 0.5).unwrap();
        let ref_t2 = interaction_tensor::<f64>(2, &Vec3::new(0.0, 0.0, -d))
            .unwrap()
            .matrix();
        assert_relative_eq!(t.matrix()[(2, 2)], ref_t2[(2, 2)], max_relative = 1e-12);
        assert!(t.trace().abs() < 1e-12);
    }

    #[test]
    fn environment_efg_zero() {
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, 1.0], 0.0, 1.0, 0)]).unwrap();
        let mu = InducedDipoles::zeros(&env);
        let t = environment_efg(&env, &mu, &Vec3::zeros(), 0.5).unwrap();
        assert_eq!(t.matrix().norm(), 0.0);
    }

    #[test]
    fn environment_efg_factor_toggle_doubles_induced() {
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, 2.0], 0.0, 1.0, 0)]).unwrap();
        let mut mu = InducedDipoles::zeros(&env);
        mu.mu[2] = 0.3;
        let half = environment_efg(&env, &mu, &Vec3::zeros(), 0.5).unwrap();
        let full = environment_efg(&env, &mu, &Vec3::zeros(), 1.0).unwrap();
        assert_relative_eq!(
            full.matrix()[(2, 2)],
            2.0 * half.matrix()[(2, 2)],
            max_relative = 1e-14
        );
    }

    #[test]
    fn fold_zero_multipoles() {
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, 1.0], 0.0, 1.0, 0)]).unwrap();
        let t = SiteIntegralSet::random_symmetric(2, 1, 42);
        let folded = fold_environment_operator(&env, None, &t).unwrap();
        assert_eq!(folded.v_es.amax(), 0.0);
        assert_eq!(folded.v_ind.amax(), 0.0);
    }

    #[test]
    fn fold_charge_identity() {
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, 1.0], -0.5, 1.0, 0)]).unwrap();
        let mut t = SiteIntegralSet::zeros(2, 1);
        t.sites[0].t0 = DMatrix::identity(2, 2);
        let folded = fold_environment_operator(&env, None, &t).unwrap();
        assert_relative_eq!(folded.v_es[(0, 0)], -0.5);
        assert_relative_eq!(folded.v_es[(1, 1)], -0.5);
        assert_eq!(folded.v_es[(0, 1)], 0.0);
    }

    #[test]
    fn fold_induced_dipole_sign() {
        let env = EnvironmentModel::new(vec![site([0.0, 0.0, 1.0], 0.0, 1.0, 0)]).unwrap();
        let mut t = SiteIntegralSet::zeros(2, 1);
        t.sites[0].t1[2][(0, 1)] = 0.7;
        t.sites[0].t1[2][(1, 0)] = 0.7;
        let mut mu = InducedDipoles::zeros(&env);
        mu.mu[2] = 0.2;
        let folded = fold_environment_operator(&env, Some(&mu), &t).unwrap();
        assert_relative_eq!(folded.v_ind[(0, 1)], -0.2 * 0.7);
    }

    #[test]
    fn fold_missing_integrals() {
        let env = EnvironmentModel::new(vec![
            site([0.0, 0.0, 1.0], 0.0, 1.0, 0),
            site([0.0, 0.0, 2.0], 0.0, 1.0, 1),
        ])
        .unwrap();
        let t = SiteIntegralSet::zeros(2, 1);
        assert!(matches!(
            fold_environment_operator(&env, None, &t),
            Err(PeError::MissingSiteIntegrals { got: 1, want: 2 })
        ));
    }

    #[test]
    fn induction_correction_cases() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(induction_energy_correction(&z, &z).unwrap(), 0.0);

        let d = DMatrix::<f64>::identity(4, 4) * 2.0;
        let v = DMatrix::<f64>::identity(4, 4);
        assert_relative_eq!(induction_energy_correction(&v, &d).unwrap(), -4.0);

        // random hermitian pair vs elementwise scalar-sum oracle
        let mut rng = 1234u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let n = 5;
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut b = DMatrix::<f64>::zeros(n, n);
        for p in 0..n {
            for q in p..n {
                let x = next();
                a[(p, q)] = x;
                a[(q, p)] = x;
                let y = next();
                b[(p, q)] = y;
                b[(q, p)] = y;
            }
        }
        let mut oracle = 0.0;
        for p in 0..n {
            for q in 0..n {
                oracle += a[(p, q)] * b[(p, q)];
            }
        }
        oracle *= -0.5;
        assert_relative_eq!(
            induction_energy_correction(&a, &b).unwrap(),
            oracle,
            epsilon = 1e-12
        );

        let bad = DMatrix::<f64>::zeros(2, 3);
        assert!(induction_energy_correction(&bad, &bad).is_err());
    }
}
