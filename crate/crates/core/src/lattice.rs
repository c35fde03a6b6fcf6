//! Finite embedding clusters from a crystal unit cell: replicate every
//! cell image within a cutoff of the central cell and carve out
//! per-molecule QM regions.

use crate::constants::ANGSTROM_TO_BOHR;
use crate::multipole::MultipoleSet;
use crate::pe::{EnvironmentModel, PeError, PolarizableSite};
use crate::scalar::Scalar;
use crate::{Mat3, Vec3};
use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("cell file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("lattice vectors are linearly dependent")]
    DegenerateLattice,
    #[error("negative cutoff")]
    NegativeCutoff,
    #[error("molecule index {0} out of range (cell has {1})")]
    MoleculeIndex(usize, usize),
    #[error("no environment parameters for element '{0}'")]
    MissingParams(String),
    #[error(transparent)]
    Environment(#[from] PeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<F> {
    pub element: String,
    /// bohr
    pub position: Vec3<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Molecule<F> {
    pub atoms: Vec<Atom<F>>,
}

impl<F: Scalar> Molecule<F> {
    pub fn translated(&self, shift: &Vec3<F>) -> Molecule<F> {
        Molecule {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    element: a.element.clone(),
                    position: a.position + shift,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell<F> {
    /// lattice vectors in bohr
    pub vectors: [Vec3<F>; 3],
    pub molecules: Vec<Molecule<F>>,
}

impl<F: Scalar> UnitCell<F> {
    pub fn new(vectors: [Vec3<F>; 3], molecules: Vec<Molecule<F>>) -> Result<Self, LatticeError> {
        let det = Mat3::from_columns(&vectors).determinant();
        if det.abs() < F::fl(1e-12) {
            return Err(LatticeError::DegenerateLattice);
        }
        if molecules.iter().any(|m| m.atoms.is_empty()) {
            return Err(LatticeError::Parse {
                line: 0,
                msg: "empty molecule".into(),
            });
        }
        Ok(Self { vectors, molecules })
    }

    pub fn translation(&self, image: [i64; 3]) -> Vec3<F> {
        self.vectors[0] * F::fl(image[0] as f64)
            + self.vectors[1] * F::fl(image[1] as f64)
            + self.vectors[2] * F::fl(image[2] as f64)
    }

    /// Distance between consecutive lattice planes normal to each axis.
    fn plane_spacings(&self) -> [F; 3] {
        let vol = Mat3::from_columns(&self.vectors).determinant().abs();
        let cross = |a: &Vec3<F>, b: &Vec3<F>| a.cross(b).norm();
        [
            vol / cross(&self.vectors[1], &self.vectors[2]),
            vol / cross(&self.vectors[2], &self.vectors[0]),
            vol / cross(&self.vectors[0], &self.vectors[1]),
        ]
    }
}

/// Which images count as "within the cutoff".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InclusionCriterion {
    /// || i a + j b + k c || <= cutoff (default)
    #[default]
    OriginDistance,
    /// closest approach between the central cell box and the image box
    BoxClosestApproach,
}

#[derive(Debug, Clone)]
pub struct Supercell<F> {
    pub cell: UnitCell<F>,
    /// integer translations, lexicographically ordered, containing (0,0,0)
    pub images: Vec<[i64; 3]>,
}

impl<F: Scalar> Supercell<F> {
    pub fn n_images(&self) -> usize {
        self.images.len()
    }

    pub fn n_molecules(&self) -> usize {
        self.images.len() * self.cell.molecules.len()
    }

    /// Flattened molecules with image provenance; the central image's
    /// molecules come in cell order at the positions where image == (0,0,0).
    pub fn molecules(&self) -> impl Iterator<Item = ([i64; 3], usize, Molecule<F>)> + '_ {
        self.images.iter().flat_map(move |&img| {
            let shift = self.cell.translation(img);
            self.cell
                .molecules
                .iter()
                .enumerate()
                .map(move |(mi, m)| (img, mi, m.translated(&shift)))
        })
    }
}

/// Exact distance from point `t` to the zonotope {x a + y b + z c :
/// x,y,z in [-1,1]}, by enumerating the 27 possible active sets.
fn box_distance<F: Scalar>(t: &Vec3<F>, vectors: &[Vec3<F>; 3]) -> F {
    let mut best = F::fl(f64::INFINITY);
    // pattern digit: 0 => clamped -1, 1 => free, 2 => clamped +1
    for pattern in 0..27usize {
        let digits = [pattern % 3, (pattern / 3) % 3, pattern / 9];
        let mut r = *t;
        let mut free: Vec<usize> = Vec::new();
        for (i, &d) in digits.iter().enumerate() {
            match d {
                0 => r += vectors[i],
                2 => r -= vectors[i],
                _ => free.push(i),
            }
        }
        // least squares over the free coefficients
        let f = free.len();
        let mut x = [F::zero(); 3];
        let solved = match f {
            0 => true,
            _ => {
                let mut g = nalgebra::DMatrix::<F>::zeros(f, f);
                let mut rhs = nalgebra::DVector::<F>::zeros(f);
                for (a, &ia) in free.iter().enumerate() {
                    for (b, &ib) in free.iter().enumerate() {
                        g[(a, b)] = vectors[ia].dot(&vectors[ib]);
                    }
                    rhs[a] = vectors[ia].dot(&r);
                }
                match g.lu().solve(&rhs) {
                    Some(sol) => {
                        let mut ok = true;
                        for (a, &ia) in free.iter().enumerate() {
                            x[ia] = sol[a];
                            if sol[a].abs() > F::one() + F::fl(1e-12) {
                                ok = false;
                            }
                        }
                        ok
                    }
                    None => false,
                }
            }
        };
        if !solved {
            continue;
        }
        let mut res = r;
        for &ia in &free {
            res -= vectors[ia] * x[ia];
        }
        best = best.min(res.norm());
    }
    best
}

/// All images whose criterion distance is within `cutoff` (bohr),
/// lexicographically ordered.
pub fn build_supercell<F: Scalar>(
    cell: &UnitCell<F>,
    cutoff: F,
    criterion: InclusionCriterion,
) -> Result<Supercell<F>, LatticeError> {
    if cutoff < F::zero() {
        return Err(LatticeError::NegativeCutoff);
    }
    let spacings = cell.plane_spacings();
    for s in &spacings {
        if !(*s > F::zero()) {
            return Err(LatticeError::DegenerateLattice);
        }
    }
    // generous index bound: box criterion reaches at most one zonotope
    // radius further than the origin criterion
    let zono = cell.vectors[0].norm() + cell.vectors[1].norm() + cell.vectors[2].norm();
    let reach = cutoff + zono;
    let bound = |s: F| (reach / s).to_f64().floor() as i64 + 1;
    let (bi, bj, bk) = (bound(spacings[0]), bound(spacings[1]), bound(spacings[2]));

    let mut images = Vec::new();
    for i in -bi..=bi {
        for j in -bj..=bj {
            for k in -bk..=bk {
                let t = cell.translation([i, j, k]);
                let d = match criterion {
                    InclusionCriterion::OriginDistance => t.norm(),
                    InclusionCriterion::BoxClosestApproach => box_distance(&t, &cell.vectors),
                };
                if d <= cutoff {
                    images.push([i, j, k]);
                }
            }
        }
    }
    images.sort();
    debug_assert!(images.binary_search(&[0, 0, 0]).is_ok());
    Ok(Supercell {
        cell: cell.clone(),
        images,
    })
}

/// Environment parameters assigned to one atom kind when its molecule sits
/// in the environment.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomParams<F> {
    pub charge: F,
    pub dipole: Vec3<F>,
    pub quadrupole: Mat3<F>,
    pub polarizability: Mat3<F>,
}

pub type ParamTable<F> = HashMap<String, AtomParams<F>>;

/// One QM molecule embedded in the rest of the supercell.
#[derive(Debug, Clone)]
pub struct EmbeddingJob<F> {
    pub index: usize,
    pub qm: Molecule<F>,
    pub environment: EnvironmentModel<F>,
}

/// One job per requested central-cell molecule: the QM region is that
/// molecule, the environment is every other molecule's atoms as
/// polarizable sites, exclusion groups assigned per molecule.
pub fn make_jobs<F: Scalar>(
    supercell: &Supercell<F>,
    central_molecules: &[usize],
    params: &ParamTable<F>,
) -> Result<Vec<EmbeddingJob<F>>, LatticeError> {
    let n_mols = supercell.cell.molecules.len();
    for &mi in central_molecules {
        if mi >= n_mols {
            return Err(LatticeError::MoleculeIndex(mi, n_mols));
        }
    }
    let all: Vec<([i64; 3], usize, Molecule<F>)> = supercell.molecules().collect();
    let mut jobs = Vec::with_capacity(central_molecules.len());
    for (job_index, &mi) in central_molecules.iter().enumerate() {
        let mut sites = Vec::new();
        let mut group = 0usize;
        let mut qm = None;
        for (img, idx, mol) in &all {
            if *img == [0, 0, 0] && *idx == mi {
                qm = Some(mol.clone());
                continue;
            }
            for atom in &mol.atoms {
                let p = params
                    .get(&atom.element)
                    .ok_or_else(|| LatticeError::MissingParams(atom.element.clone()))?;
                sites.push(PolarizableSite {
                    position: atom.position,
                    multipoles: MultipoleSet {
                        charge: p.charge,
                        dipole: p.dipole,
                        quadrupole: p.quadrupole,
                    },
                    polarizability: p.polarizability,
                    group,
                });
            }
            group += 1;
        }
        jobs.push(EmbeddingJob {
            index: job_index,
            qm: qm.expect("central molecule present"),
            environment: EnvironmentModel::new(sites)?,
        });
    }
    Ok(jobs)
}

/// Parse a cell file: `@CELL` with a unit header (AA|AU) and three lattice
/// vectors, then `@MOLECULE` blocks of `element x y z` lines.
pub fn parse_cell_str<F: Scalar>(text: &str) -> Result<UnitCell<F>, LatticeError> {
    let mut vectors: Option<[Vec3<F>; 3]> = None;
    let mut scale = F::one();
    let mut molecules: Vec<Molecule<F>> = Vec::new();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let l = match l.find('!') {
                Some(p) => &l[..p],
                None => l,
            };
            (i + 1, l.trim())
        })
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    let perr = |line: usize, msg: &str| LatticeError::Parse {
        line,
        msg: msg.to_string(),
    };

    while let Some((ln, line)) = lines.next() {
        let upper = line.to_uppercase();
        if upper.starts_with("@CELL") {
            let (uln, unit) = lines.next().ok_or_else(|| perr(ln, "missing unit header"))?;
            scale = match unit.to_uppercase().as_str() {
                "AA" => F::fl(ANGSTROM_TO_BOHR),
                "AU" => F::one(),
                _ => return Err(perr(uln, "unit must be AA or AU")),
            };
            let mut vs = [Vec3::zeros(); 3];
            for v in vs.iter_mut() {
                let (vln, vline) = lines.next().ok_or_else(|| perr(uln, "missing lattice vector"))?;
                let toks: Vec<&str> = vline.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(perr(vln, "lattice vector needs 3 components"));
                }
                let c: Vec<f64> = toks
                    .iter()
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| perr(vln, "bad lattice vector component"))?;
                *v = Vec3::new(F::fl(c[0]), F::fl(c[1]), F::fl(c[2])) * scale;
            }
            vectors = Some(vs);
        } else if upper.starts_with("@MOLECULE") {
            let mut atoms = Vec::new();
            while let Some(&(aln, aline)) = lines.peek() {
                if aline.starts_with('@') {
                    break;
                }
                lines.next();
                let toks: Vec<&str> = aline.split_whitespace().collect();
                if toks.len() != 4 {
                    return Err(perr(aln, "atom line must be: element x y z"));
                }
                let c: Vec<f64> = toks[1..]
                    .iter()
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| perr(aln, "bad atom coordinate"))?;
                atoms.push(Atom {
                    element: toks[0].to_string(),
                    position: Vec3::new(F::fl(c[0]), F::fl(c[1]), F::fl(c[2])) * scale,
                });
            }
            if atoms.is_empty() {
                return Err(perr(ln, "empty @MOLECULE block"));
            }
            molecules.push(Molecule { atoms });
        } else {
            return Err(perr(ln, "unknown section"));
        }
    }
    let vectors = vectors.ok_or_else(|| perr(0, "missing @CELL section"))?;
    UnitCell::new(vectors, molecules)
}

pub fn parse_cell_file<F: Scalar>(path: impl AsRef<Path>) -> Result<UnitCell<F>, LatticeError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| LatticeError::Parse {
        line: 0,
        msg: format!("{}: {e}", path.as_ref().display()),
    })?;
    parse_cell_str(&text)
}
