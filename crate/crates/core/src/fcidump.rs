//! FCIDUMP-style integrals files: namelist header with NORB/NELEC/MS2,
//! then `value p q r s` records in chemists' notation, 1-based, with
//! zero indices marking one-electron and constant entries.

use crate::problem::{FullProblem, Tensor4};
use crate::scalar::Scalar;
use nalgebra::DMatrix;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FcidumpError {
    #[error("fcidump, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("fcidump header missing {0}")]
    MissingKey(&'static str),
    #[error("orbital index {0} out of range 1..{1}")]
    IndexRange(usize, usize),
}

fn err(line: usize, msg: impl Into<String>) -> FcidumpError {
    FcidumpError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_fcidump_str<F: Scalar>(text: &str) -> Result<FullProblem<F>, FcidumpError> {
    // header: everything up to a terminator (&END, /END, or /)
    let mut header = String::new();
    let mut body_start = 0usize;
    for (i, line) in text.lines().enumerate() {
        let upper = line.to_uppercase();
        header.push(' ');
        header.push_str(&upper);
        if upper.contains("&END") || upper.contains("$END") || upper.contains('/') {
            body_start = i + 1;
            break;
        }
    }
    let header = header
        .replace("&FCI", " ")
        .replace("$FCI", " ")
        .replace("&END", " ")
        .replace("$END", " ")
        .replace('/', " ");
    let mut norb = None;
    let mut nelec = None;
    let mut ms2: i64 = 0;
    // tolerate "KEY=VAL," and "KEY = VAL" forms; ORBSYM lists are skipped
    let cleaned = header.replace('=', " = ").replace(',', " , ");
    let toks: Vec<&str> = cleaned.split_whitespace().collect();
    let mut i = 0;
    while i < toks.len() {
        let key = toks[i];
        if (key == "NORB" || key == "NELEC" || key == "MS2") && i + 2 < toks.len() + 1 {
            // find the value after '='
            let mut j = i + 1;
            if toks.get(j) == Some(&"=") {
                j += 1;
            }
            let val = toks
                .get(j)
                .ok_or_else(|| err(0, format!("missing value for {key}")))?;
            let parsed: i64 = val
                .trim_end_matches(',')
                .parse()
                .map_err(|_| err(0, format!("bad value for {key}: '{val}'")))?;
            match key {
                "NORB" => norb = Some(parsed as usize),
                "NELEC" => nelec = Some(parsed as usize),
                _ => ms2 = parsed,
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    let norb = norb.ok_or(FcidumpError::MissingKey("NORB"))?;
    let nelec = nelec.ok_or(FcidumpError::MissingKey("NELEC"))?;

    let mut h = DMatrix::zeros(norb, norb);
    let mut g = Tensor4::zeros(norb);
    let mut constant = F::zero();
    for (i, line) in text.lines().enumerate().skip(body_start) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(err(i + 1, "record must be: value p q r s"));
        }
        let v: f64 = toks[0]
            .parse()
            .map_err(|_| err(i + 1, format!("bad value '{}'", toks[0])))?;
        let idx: Vec<usize> = toks[1..]
            .iter()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| err(i + 1, "bad orbital index"))?;
        let (p, q, r, s) = (idx[0], idx[1], idx[2], idx[3]);
        for &x in &idx {
            if x > norb {
                return Err(FcidumpError::IndexRange(x, norb));
            }
        }
        let v = F::fl(v);
        if p == 0 && q == 0 && r == 0 && s == 0 {
            constant = v;
        } else if r == 0 && s == 0 {
            if p == 0 || q == 0 {
                return Err(err(i + 1, "one-electron record needs p, q > 0"));
            }
            h[(p - 1, q - 1)] = v;
            h[(q - 1, p - 1)] = v;
        } else if p == 0 || q == 0 || r == 0 || s == 0 {
            return Err(err(i + 1, "mixed zero and non-zero indices"));
        } else {
            g.set_symmetric(p - 1, q - 1, r - 1, s - 1, v);
        }
    }
    Ok(FullProblem {
        n_orbitals: norb,
        n_electrons: nelec,
        ms2,
        h,
        g,
        core_constant: constant,
    })
}

pub fn parse_fcidump_file<F: Scalar>(path: impl AsRef<Path>) -> Result<FullProblem<F>, FcidumpError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| err(0, format!("{}: {e}", path.as_ref().display())))?;
    parse_fcidump_str(&text)
}

/// Serialize a problem in FCIDUMP layout (unique integrals only).
pub fn write_fcidump<F: Scalar>(problem: &FullProblem<F>) -> String {
    let n = problem.n_orbitals;
    let mut out = format!(
        "&FCI NORB={}, NELEC={}, MS2={},\n ORBSYM={}\n ISYM=1,\n&END\n",
        n,
        problem.n_electrons,
        problem.ms2,
        "1,".repeat(n)
    );
    let tiny = 1e-14;
    for p in 0..n {
        for q in 0..=p {
            for r in 0..=p {
                let s_max = if r == p { q } else { r };
                for s in 0..=s_max {
                    let v = problem.g.get(p, q, r, s).to_f64();
                    if v.abs() > tiny {
                        out.push_str(&format!(
                            "{v:24.16e} {} {} {} {}\n",
                            p + 1,
                            q + 1,
                            r + 1,
                            s + 1
                        ));
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = problem.h[(p, q)].to_f64();
            if v.abs() > tiny {
                out.push_str(&format!("{v:24.16e} {} {} 0 0\n", p + 1, q + 1));
            }
        }
    }
    out.push_str(&format!("{:24.16e} 0 0 0 0\n", problem.core_constant.to_f64()));
    out
}
