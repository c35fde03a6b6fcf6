//! Potential-file parser: `@COORDINATES` / `@MULTIPOLES` / `@POLARIZABILITIES`
//! / `@EXCLISTS` sections, `!` comments, whitespace separated.

use super::{EnvironmentModel, PeError, PolarizableSite};
use crate::constants::ANGSTROM_TO_BOHR;
use crate::multipole::MultipoleSet;
use crate::scalar::Scalar;
use crate::{Mat3, Vec3};
use std::path::Path;

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
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
            .collect();
        Self { lines, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let r = self.peek();
        if r.is_some() {
            self.pos += 1;
        }
        r
    }
}

fn err(line: usize, msg: impl Into<String>) -> PeError {
    PeError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f<F: Scalar>(tok: &str, line: usize) -> Result<F, PeError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("expected number, got '{tok}'")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite value '{tok}'")));
    }
    Ok(F::fl(v))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, PeError> {
    tok.parse()
        .map_err(|_| err(line, format!("expected integer, got '{tok}'")))
}

/// Parse an environment from potential-file text.
pub fn parse_potential_str<F: Scalar>(text: &str) -> Result<EnvironmentModel<F>, PeError> {
    let mut lines = Lines::new(text);
    let mut positions: Vec<Vec3<F>> = Vec::new();
    let mut multipoles: Vec<MultipoleSet<F>> = Vec::new();
    let mut alphas: Vec<Mat3<F>> = Vec::new();
    let mut excl: Vec<Vec<usize>> = Vec::new();
    let mut seen_coords = false;

    while let Some((ln, line)) = lines.next() {
        let upper = line.to_uppercase();
        if upper.starts_with("@COORDINATES") {
            let (cln, count_line) = lines
                .next()
                .ok_or_else(|| err(ln, "missing site count after @COORDINATES"))?;
            let n = parse_usize(count_line.split_whitespace().next().unwrap_or(""), cln)?;
            let (uln, unit_line) = lines
                .next()
                .ok_or_else(|| err(cln, "missing unit header (AA|AU)"))?;
            let scale = match unit_line.to_uppercase().as_str() {
                "AA" => F::fl(ANGSTROM_TO_BOHR),
                "AU" => F::one(),
                other => return Err(err(uln, format!("unknown unit '{other}', expected AA or AU"))),
            };
            for _ in 0..n {
                let (sln, sline) = lines
                    .next()
                    .ok_or_else(|| err(uln, "unexpected end of @COORDINATES block"))?;
                let toks: Vec<&str> = sline.split_whitespace().collect();
                if toks.len() != 4 {
                    return Err(err(sln, "coordinate line must be: label x y z"));
                }
                let x: F = parse_f(toks[1], sln)?;
                let y: F = parse_f(toks[2], sln)?;
                let z: F = parse_f(toks[3], sln)?;
                positions.push(Vec3::new(x * scale, y * scale, z * scale));
            }
            multipoles = vec![MultipoleSet::zero(); positions.len()];
            alphas = vec![Mat3::zeros(); positions.len()];
            excl = vec![Vec::new(); positions.len()];
            seen_coords = true;
        } else if upper.starts_with("@MULTIPOLES") {
            if !seen_coords {
                return Err(err(ln, "@MULTIPOLES before @COORDINATES"));
            }
            while let Some((oln, oline)) = lines.peek() {
                let up = oline.to_uppercase();
                if !up.starts_with("ORDER") {
                    break;
                }
                lines.next();
                let toks: Vec<&str> = oline.split_whitespace().collect();
                let order = parse_usize(toks.get(1).copied().unwrap_or(""), oln)?;
                let (cln, cline) = lines
                    .next()
                    .ok_or_else(|| err(oln, "missing entry count after ORDER"))?;
                let m = parse_usize(cline.split_whitespace().next().unwrap_or(""), cln)?;
                for _ in 0..m {
                    let (sln, sline) = lines
                        .next()
                        .ok_or_else(|| err(cln, "unexpected end of multipole block"))?;
                    let toks: Vec<&str> = sline.split_whitespace().collect();
                    let want = match order {
                        0 => 2,
                        1 => 4,
                        2 => 7,
                        k => return Err(err(oln, format!("multipole order {k} not supported"))),
                    };
                    if toks.len() != want {
                        return Err(err(sln, format!("expected site-id plus {} values", want - 1)));
                    }
                    let id = parse_usize(toks[0], sln)?;
                    if id == 0 || id > positions.len() {
                        return Err(err(sln, format!("site id {id} out of range 1..{}", positions.len())));
                    }
                    let site = &mut multipoles[id - 1];
                    match order {
                        0 => site.charge = parse_f(toks[1], sln)?,
                        1 => {
                            site.dipole = Vec3::new(
                                parse_f(toks[1], sln)?,
                                parse_f(toks[2], sln)?,
                                parse_f(toks[3], sln)?,
                            )
                        }
                        _ => {
                            let v: Vec<F> = toks[1..]
                                .iter()
                                .map(|t| parse_f(t, sln))
                                .collect::<Result<_, _>>()?;
                            // xx xy xz yy yz zz
                            site.quadrupole = Mat3::new(
                                v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5],
                            );
                        }
                    }
                }
            }
        } else if upper.starts_with("@POLARIZABILITIES") {
            if !seen_coords {
                return Err(err(ln, "@POLARIZABILITIES before @COORDINATES"));
            }
            while let Some((oln, oline)) = lines.peek() {
                if !oline.to_uppercase().starts_with("ORDER") {
                    break;
                }
                lines.next();
                let toks: Vec<&str> = oline.split_whitespace().collect();
                if toks.len() < 3 || toks[1] != "1" || toks[2] != "1" {
                    return Err(err(oln, "only ORDER 1 1 polarizabilities are supported"));
                }
                let (cln, cline) = lines
                    .next()
                    .ok_or_else(|| err(oln, "missing entry count after ORDER 1 1"))?;
                let m = parse_usize(cline.split_whitespace().next().unwrap_or(""), cln)?;
                for _ in 0..m {
                    let (sln, sline) = lines
                        .next()
                        .ok_or_else(|| err(cln, "unexpected end of polarizability block"))?;
                    let toks: Vec<&str> = sline.split_whitespace().collect();
                    if toks.len() != 7 {
                        return Err(err(sln, "expected site-id plus 6 upper-triangle values"));
                    }
                    let id = parse_usize(toks[0], sln)?;
                    if id == 0 || id > positions.len() {
                        return Err(err(sln, format!("site id {id} out of range")));
                    }
                    let v: Vec<F> = toks[1..]
                        .iter()
                        .map(|t| parse_f(t, sln))
                        .collect::<Result<_, _>>()?;
                    alphas[id - 1] =
                        Mat3::new(v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5]);
                }
            }
        } else if upper.starts_with("@EXCLISTS") {
            if !seen_coords {
                return Err(err(ln, "@EXCLISTS before @COORDINATES"));
            }
            let (cln, cline) = lines
                .next()
                .ok_or_else(|| err(ln, "missing count line after @EXCLISTS"))?;
            let toks: Vec<&str> = cline.split_whitespace().collect();
            let m = parse_usize(toks[0], cln)?;
            for _ in 0..m {
                let (sln, sline) = lines
                    .next()
                    .ok_or_else(|| err(cln, "unexpected end of @EXCLISTS block"))?;
                let ids: Vec<usize> = sline
                    .split_whitespace()
                    .map(|t| parse_usize(t, sln))
                    .collect::<Result<_, _>>()?;
                if ids.is_empty() {
                    continue;
                }
                let me = ids[0];
                if me == 0 || me > positions.len() {
                    return Err(err(sln, format!("site id {me} out of range")));
                }
                for &other in &ids[1..] {
                    if other == 0 {
                        continue; // zero padding
                    }
                    if other > positions.len() {
                        return Err(err(sln, format!("excluded site id {other} out of range")));
                    }
                    excl[me - 1].push(other - 1);
                }
            }
        } else {
            return Err(err(ln, format!("unknown section '{line}'")));
        }
    }

    if !seen_coords {
        return Err(err(0, "missing @COORDINATES section"));
    }

    // exclusion groups = connected components of the pairwise exclusion lists
    let n = positions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, list) in excl.iter().enumerate() {
        for &j in list {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut group_of_root = std::collections::HashMap::new();
    let mut sites = Vec::with_capacity(n);
    for i in 0..n {
        let root = find(&mut parent, i);
        let next_id = group_of_root.len();
        let group = *group_of_root.entry(root).or_insert(next_id);
        sites.push(PolarizableSite {
            position: positions[i],
            multipoles: multipoles[i].clone(),
            polarizability: alphas[i],
            group,
        });
    }
    EnvironmentModel::new(sites)
}

pub fn parse_potential_file<F: Scalar>(path: impl AsRef<Path>) -> Result<EnvironmentModel<F>, PeError> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| PeError::Parse {
        line: 0,
        msg: format!("{}: {e}", path.as_ref().display()),
    })?;
    parse_potential_str(&text)
}

/// Serialize an environment back to the potential-file format (AU).
pub fn write_potential_file<F: Scalar>(env: &EnvironmentModel<F>) -> String {
    let mut out = String::new();
    out.push_str("@COORDINATES\n");
    out.push_str(&format!("{}\nAU\n", env.len()));
    for s in env.sites() {
        out.push_str(&format!(
            "X {:.10} {:.10} {:.10}\n",
            s.position.x.to_f64(),
            s.position.y.to_f64(),
            s.position.z.to_f64()
        ));
    }
    out.push_str("@MULTIPOLES\nORDER 0\n");
    out.push_str(&format!("{}\n", env.len()));
    for (i, s) in env.sites().iter().enumerate() {
        out.push_str(&format!("{} {:.10}\n", i + 1, s.multipoles.charge.to_f64()));
    }
    out.push_str("ORDER 1\n");
    out.push_str(&format!("{}\n", env.len()));
    for (i, s) in env.sites().iter().enumerate() {
        let d = s.multipoles.dipole;
        out.push_str(&format!(
            "{} {:.10} {:.10} {:.10}\n",
            i + 1,
            d.x.to_f64(),
            d.y.to_f64(),
            d.z.to_f64()
        ));
    }
    out.push_str("ORDER 2\n");
    out.push_str(&format!("{}\n", env.len()));
    for (i, s) in env.sites().iter().enumerate() {
        let q = s.multipoles.quadrupole;
        out.push_str(&format!(
            "{} {:.10} {:.10} {:.10} {:.10} {:.10} {:.10}\n",
            i + 1,
            q[(0, 0)].to_f64(),
            q[(0, 1)].to_f64(),
            q[(0, 2)].to_f64(),
            q[(1, 1)].to_f64(),
            q[(1, 2)].to_f64(),
            q[(2, 2)].to_f64()
        ));
    }
    out.push_str("@POLARIZABILITIES\nORDER 1 1\n");
    out.push_str(&format!("{}\n", env.len()));
    for (i, s) in env.sites().iter().enumerate() {
        let a = s.polarizability;
        out.push_str(&format!(
            "{} {:.10} {:.10} {:.10} {:.10} {:.10} {:.10}\n",
            i + 1,
            a[(0, 0)].to_f64(),
            a[(0, 1)].to_f64(),
            a[(0, 2)].to_f64(),
            a[(1, 1)].to_f64(),
            a[(1, 2)].to_f64(),
            a[(2, 2)].to_f64()
        ));
    }
    // exclusion lists: every other member of the same group
    let mut groups: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for (i, s) in env.sites().iter().enumerate() {
        groups.entry(s.group).or_default().push(i);
    }
    let max_len = groups.values().map(|v| v.len()).max().unwrap_or(1);
    out.push_str("@EXCLISTS\n");
    out.push_str(&format!("{} {}\n", env.len(), max_len));
    for (i, s) in env.sites().iter().enumerate() {
        let mut row = vec![i + 1];
        for &j in &groups[&s.group] {
            if j != i {
                row.push(j + 1);
            }
        }
        while row.len() < max_len {
            row.push(0);
        }
        let row: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_site_round_trip() {
        let text = "\
! single site
@COORDINATES
1
AU
O 0.0 0.0 0.0
@MULTIPOLES
ORDER 0
1
1 -0.67
@POLARIZABILITIES
ORDER 1 1
1
1 5.0 0.0 0.0 5.0 0.0 5.0
";
        let env = parse_potential_str::<f64>(text).unwrap();
        assert_eq!(env.len(), 1);
        assert_eq!(env.site(0).multipoles.charge, -0.67);
        assert_eq!(env.site(0).polarizability[(0, 0)], 5.0);
        assert_eq!(env.site(0).polarizability[(2, 2)], 5.0);
    }

    #[test]
    fn empty_order_one_block_leaves_dipoles_zero() {
        let text = "\
@COORDINATES
2
AU
O 0.0 0.0 0.0
H 0.0 0.0 1.8
@MULTIPOLES
ORDER 0
2
1 -0.6
2 0.6
ORDER 1
0
";
        let env = parse_potential_str::<f64>(text).unwrap();
        assert_eq!(env.site(0).multipoles.dipole, crate::Vec3::zeros());
        assert_eq!(env.site(1).multipoles.dipole, crate::Vec3::zeros());
    }

    #[test]
    fn duplicate_coordinates_rejected() {
        let text = "\
@COORDINATES
2
AU
O 0.0 0.0 0.0
O 0.0 0.0 0.0
";
        assert!(matches!(
            parse_potential_str::<f64>(text),
            Err(PeError::DuplicatePosition(0, 1))
        ));
    }

    #[test]
    fn angstrom_conversion() {
        let text = "\
@COORDINATES
1
AA
O 0.529177210903 0.0 0.0
";
        let env = parse_potential_str::<f64>(text).unwrap();
        assert_relative_eq!(env.site(0).position.x, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn exclists_become_groups() {
        let text = "\
@COORDINATES
4
AU
O 0.0 0.0 0.0
H 0.0 0.0 1.8
O 5.0 0.0 0.0
H 5.0 0.0 1.8
@EXCLISTS
4 2
1 2
2 1
3 4
4 3
";
        let env = parse_potential_str::<f64>(text).unwrap();
        assert_eq!(env.site(0).group, env.site(1).group);
        assert_eq!(env.site(2).group, env.site(3).group);
        assert_ne!(env.site(0).group, env.site(2).group);
    }

    #[test]
    fn malformed_section_is_an_error() {
        let text = "@COORDINATES\n1\nAU\nO 0.0 0.0\n";
        assert!(matches!(
            parse_potential_str::<f64>(text),
            Err(PeError::Parse { .. })
        ));
        let text2 = "@NONSENSE\n";
        assert!(matches!(
            parse_potential_str::<f64>(text2),
            Err(PeError::Parse { .. })
        ));
    }

    #[test]
    fn writer_round_trips() {
        let text = "\
@COORDINATES
2
AU
O 0.0 0.0 0.0
H 0.0 0.0 1.8
@MULTIPOLES
ORDER 0
2
1 -0.6
2 0.6
ORDER 1
1
1 0.1 -0.2 0.05
@POLARIZABILITIES
ORDER 1 1
2
1 5.0 0.1 0.0 5.0 0.0 4.5
2 2.0 0.0 0.0 2.0 0.0 2.0
@EXCLISTS
2 2
1 2
2 1
";
        let env = parse_potential_str::<f64>(text).unwrap();
        let round = parse_potential_str::<f64>(&write_potential_file(&env)).unwrap();
        assert_eq!(env, round);
    }
}
