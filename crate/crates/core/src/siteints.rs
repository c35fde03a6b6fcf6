//! Companion site-integrals file: per environment site, MO matrices of the
//! potential-derivative integrals t^(k) for k = 0, 1, 2, plus optional QM
//! nuclei and field-gradient probe integrals.
//!
//! Line format mirrors the integrals file: `value p q` with 1-based
//! indices, symmetric fill, `!` comments. Blocks:
//!
//! ```text
//! @NORB 4
//! @NSITES 2
//! @SITE 1 ORDER 0          ! then value p q lines
//! @SITE 1 ORDER 1 Z
//! @SITE 1 ORDER 2 XY
//! @NUCLEI                  ! then Z x y z lines (bohr)
//! @PROBE O1 17O 0.0 0.0 0.7
//! @PROBEINTS O1 XX         ! then value p q lines
//! ```

use crate::efg::PropertyIntegrals;
use crate::scalar::Scalar;
use crate::Vec3;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SiteIntsError {
    #[error("site integrals, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn err(line: usize, msg: impl Into<String>) -> SiteIntsError {
    SiteIntsError::Parse {
        line,
        msg: msg.into(),
    }
}

/// t^(k) MO matrices for one expansion site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteIntegrals<F> {
    pub t0: DMatrix<F>,
    /// x, y, z
    pub t1: [DMatrix<F>; 3],
    /// xx, xy, xz, yy, yz, zz
    pub t2: [DMatrix<F>; 6],
}

impl<F: Scalar> SiteIntegrals<F> {
    pub fn zeros(n: usize) -> Self {
        Self {
            t0: DMatrix::zeros(n, n),
            t1: std::array::from_fn(|_| DMatrix::zeros(n, n)),
            t2: std::array::from_fn(|_| DMatrix::zeros(n, n)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteIntegralSet<F> {
    pub n_orb: usize,
    pub sites: Vec<SiteIntegrals<F>>,
}

impl<F: Scalar> SiteIntegralSet<F> {
    pub fn zeros(n_orb: usize, n_sites: usize) -> Self {
        Self {
            n_orb,
            sites: (0..n_sites).map(|_| SiteIntegrals::zeros(n_orb)).collect(),
        }
    }

    /// Deterministic random symmetric matrices, scaled small; used by the
    /// bundled model fixtures.
    pub fn random_symmetric(n_orb: usize, n_sites: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_sym = |scale: f64| {
            let mut m = DMatrix::zeros(n_orb, n_orb);
            for p in 0..n_orb {
                for q in p..n_orb {
                    let v = F::fl(scale * (rng.gen::<f64>() - 0.5));
                    m[(p, q)] = v;
                    m[(q, p)] = v;
                }
            }
            m
        };
        let sites = (0..n_sites)
            .map(|_| SiteIntegrals {
                t0: rand_sym(0.2),
                t1: std::array::from_fn(|_| rand_sym(0.1)),
                t2: std::array::from_fn(|_| rand_sym(0.05)),
            })
            .collect();
        Self { n_orb, sites }
    }
}

/// Field-gradient probe: a point, its isotope, and the six property
/// integral matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe<F> {
    pub label: String,
    pub isotope: String,
    pub position: Vec3<F>,
    pub integrals: PropertyIntegrals<F>,
}

/// Full contents of a companion file.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionData<F> {
    pub site_integrals: SiteIntegralSet<F>,
    /// QM nuclei (charge, position in bohr)
    pub nuclei: Vec<(F, Vec3<F>)>,
    pub probes: Vec<Probe<F>>,
}

const T1_COMPS: [&str; 3] = ["X", "Y", "Z"];
const T2_COMPS: [&str; 6] = ["XX", "XY", "XZ", "YY", "YZ", "ZZ"];

pub fn parse_companion_str<F: Scalar>(text: &str) -> Result<CompanionData<F>, SiteIntsError> {
    let mut n_orb = None;
    let mut n_sites = None;
    let mut set: Option<SiteIntegralSet<F>> = None;
    let mut nuclei = Vec::new();
    let mut probes: Vec<Probe<F>> = Vec::new();

    #[derive(PartialEq)]
    enum Block {
        None,
        Site(usize, usize, usize), // site index, order, component index
        Nuclei,
        ProbeInts(usize, usize), // probe index, component index
    }
    let mut block = Block::None;

    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = match raw.find('!') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if line.starts_with('@') {
            let key = toks[0].to_uppercase();
            match key.as_str() {
                "@NORB" => {
                    n_orb = Some(
                        toks.get(1)
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err(ln, "@NORB needs an integer"))?,
                    );
                    block = Block::None;
                }
                "@NSITES" => {
                    n_sites = Some(
                        toks.get(1)
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err(ln, "@NSITES needs an integer"))?,
                    );
                    block = Block::None;
                }
                "@SITE" => {
                    let (norb, nsites) = match (n_orb, n_sites) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return Err(err(ln, "@NORB and @NSITES must precede @SITE")),
                    };
                    if set.is_none() {
                        set = Some(SiteIntegralSet::zeros(norb, nsites));
                    }
                    let id: usize = toks
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(ln, "@SITE needs a site id"))?;
                    if id == 0 || id > nsites {
                        return Err(err(ln, format!("site id {id} out of range 1..{nsites}")));
                    }
                    if toks.get(2).map(|t| t.to_uppercase()) != Some("ORDER".into()) {
                        return Err(err(ln, "expected ORDER after site id"));
                    }
                    let order: usize = toks
                        .get(3)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err(ln, "ORDER needs 0, 1 or 2"))?;
                    let comp = match order {
                        0 => 0,
                        1 => {
                            let c = toks.get(4).map(|t| t.to_uppercase()).unwrap_or_default();
                            T1_COMPS
                                .iter()
                                .position(|&x| x == c)
                                .ok_or_else(|| err(ln, "ORDER 1 needs component X|Y|Z"))?
                        }
                        2 => {
                            let c = toks.get(4).map(|t| t.to_uppercase()).unwrap_or_default();
                            T2_COMPS
                                .iter()
                                .position(|&x| x == c)
                                .ok_or_else(|| err(ln, "ORDER 2 needs component XX..ZZ"))?
                        }
                        k => return Err(err(ln, format!("order {k} not supported"))),
                    };
                    block = Block::Site(id - 1, order, comp);
                }
                "@NUCLEI" => block = Block::Nuclei,
                "@PROBE" => {
                    if toks.len() != 6 {
                        return Err(err(ln, "@PROBE label isotope x y z"));
                    }
                    let norb = n_orb.ok_or_else(|| err(ln, "@NORB must precede @PROBE"))?;
                    let pos = Vec3::new(
                        F::fl(toks[3].parse().map_err(|_| err(ln, "bad probe x"))?),
                        F::fl(toks[4].parse().map_err(|_| err(ln, "bad probe y"))?),
                        F::fl(toks[5].parse().map_err(|_| err(ln, "bad probe z"))?),
                    );
                    probes.push(Probe {
                        label: toks[1].to_string(),
                        isotope: toks[2].to_string(),
                        position: pos,
                        integrals: PropertyIntegrals::zeros(norb),
                    });
                    block = Block::None;
                }
                "@PROBEINTS" => {
                    if toks.len() != 3 {
                        return Err(err(ln, "@PROBEINTS label component"));
                    }
                    let pi = probes
                        .iter()
                        .position(|p| p.label == toks[1])
                        .ok_or_else(|| err(ln, format!("unknown probe '{}'", toks[1])))?;
                    let c = toks[2].to_uppercase();
                    let comp = T2_COMPS
                        .iter()
                        .position(|&x| x == c)
                        .ok_or_else(|| err(ln, "component must be XX..ZZ"))?;
                    block = Block::ProbeInts(pi, comp);
                }
                other => return Err(err(ln, format!("unknown section '{other}'"))),
            }
            continue;
        }
        // data line
        match block {
            Block::None => return Err(err(ln, "data line outside any block")),
            Block::Nuclei => {
                if toks.len() != 4 {
                    return Err(err(ln, "nucleus line must be: Z x y z"));
                }
                let z: f64 = toks[0].parse().map_err(|_| err(ln, "bad charge"))?;
                let x: f64 = toks[1].parse().map_err(|_| err(ln, "bad x"))?;
                let y: f64 = toks[2].parse().map_err(|_| err(ln, "bad y"))?;
                let zz: f64 = toks[3].parse().map_err(|_| err(ln, "bad z"))?;
                nuclei.push((F::fl(z), Vec3::new(F::fl(x), F::fl(y), F::fl(zz))));
            }
            Block::Site(site, order, comp) => {
                let (v, p, q) = parse_record::<F>(&toks, ln, n_orb.unwrap())?;
                let s = &mut set.as_mut().unwrap().sites[site];
                let m = match order {
                    0 => &mut s.t0,
                    1 => &mut s.t1[comp],
                    _ => &mut s.t2[comp],
                };
                m[(p, q)] = v;
                m[(q, p)] = v;
            }
            Block::ProbeInts(pi, comp) => {
                let (v, p, q) = parse_record::<F>(&toks, ln, n_orb.unwrap())?;
                let m = &mut probes[pi].integrals.comps[comp];
                m[(p, q)] = v;
                m[(q, p)] = v;
            }
        }
    }

    let norb = n_orb.ok_or_else(|| err(0, "missing @NORB"))?;
    let nsites = n_sites.unwrap_or(0);
    Ok(CompanionData {
        site_integrals: set.unwrap_or_else(|| SiteIntegralSet::zeros(norb, nsites)),
        nuclei,
        probes,
    })
}

fn parse_record<F: Scalar>(
    toks: &[&str],
    ln: usize,
    n_orb: usize,
) -> Result<(F, usize, usize), SiteIntsError> {
    if toks.len() != 3 {
        return Err(err(ln, "record must be: value p q"));
    }
    let v: f64 = toks[0].parse().map_err(|_| err(ln, "bad value"))?;
    let p: usize = toks[1].parse().map_err(|_| err(ln, "bad p"))?;
    let q: usize = toks[2].parse().map_err(|_| err(ln, "bad q"))?;
    if p == 0 || q == 0 || p > n_orb || q > n_orb {
        return Err(err(ln, format!("indices ({p},{q}) out of range 1..{n_orb}")));
    }
    Ok((F::fl(v), p - 1, q - 1))
}

pub fn parse_companion_file<F: Scalar>(
    path: impl AsRef<Path>,
) -> Result<CompanionData<F>, SiteIntsError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| err(0, format!("{}: {e}", path.as_ref().display())))?;
    parse_companion_str(&text)
}

/// Serialize companion data (used to emit the bundled fixtures).
pub fn write_companion_file<F: Scalar>(data: &CompanionData<F>) -> String {
    let mut out = String::new();
    let n = data.site_integrals.n_orb;
    out.push_str(&format!("@NORB {n}\n@NSITES {}\n", data.site_integrals.sites.len()));
    let emit_matrix = |out: &mut String, m: &DMatrix<F>| {
        for p in 0..n {
            for q in p..n {
                let v = m[(p, q)].to_f64();
                if v != 0.0 {
                    out.push_str(&format!("{v:.16e} {} {}\n", p + 1, q + 1));
                }
            }
        }
    };
    for (i, s) in data.site_integrals.sites.iter().enumerate() {
        out.push_str(&format!("@SITE {} ORDER 0\n", i + 1));
        emit_matrix(&mut out, &s.t0);
        for (c, name) in T1_COMPS.iter().enumerate() {
            out.push_str(&format!("@SITE {} ORDER 1 {name}\n", i + 1));
            emit_matrix(&mut out, &s.t1[c]);
        }
        for (c, name) in T2_COMPS.iter().enumerate() {
            out.push_str(&format!("@SITE {} ORDER 2 {name}\n", i + 1));
            emit_matrix(&mut out, &s.t2[c]);
        }
    }
    if !data.nuclei.is_empty() {
        out.push_str("@NUCLEI\n");
        for (z, p) in &data.nuclei {
            out.push_str(&format!(
                "{} {:.12} {:.12} {:.12}\n",
                z.to_f64(),
                p.x.to_f64(),
                p.y.to_f64(),
                p.z.to_f64()
            ));
        }
    }
    for probe in &data.probes {
        out.push_str(&format!(
            "@PROBE {} {} {:.12} {:.12} {:.12}\n",
            probe.label,
            probe.isotope,
            probe.position.x.to_f64(),
            probe.position.y.to_f64(),
            probe.position.z.to_f64()
        ));
        for (c, name) in T2_COMPS.iter().enumerate() {
            out.push_str(&format!("@PROBEINTS {} {name}\n", probe.label));
            emit_matrix(&mut out, &probe.integrals.comps[c]);
        }
    }
    out
}
