//! Extended-FCIDUMP reader and writer.
//!
//! Header: `&FCI NORB=n,NELEC=m,MS2=s,COMPLEX={0|1},GAMMA={0|1} &END`.
//! Body lines are `re [im] p q r s` with 1-based indices in chemist
//! convention (the `im` column is present iff `COMPLEX=1`): four nonzero
//! indices give `(pq|rs)`, `p q 0 0` gives the one-body `h_pq`, and
//! `0 0 0 0` is the constant. Unique entries are expanded to the full
//! tensors using the declared symmetry; inconsistent duplicates are errors.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, Array4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{eri_images, ActiveSpaceHamiltonian, SYMMETRY_TOL};

/// A parsed file: the Hamiltonian plus the header's electron bookkeeping.
#[derive(Debug, Clone)]
pub struct LoadedFcidump {
    pub ham: ActiveSpaceHamiltonian,
    pub n_elec: usize,
    pub ms2: i64,
}

impl LoadedFcidump {
    pub fn n_alpha(&self) -> usize {
        (self.n_elec as i64 + self.ms2) as usize / 2
    }

    pub fn n_beta(&self) -> usize {
        (self.n_elec as i64 - self.ms2) as usize / 2
    }
}

pub fn load_hamiltonian(path: impl AsRef<Path>) -> Result<LoadedFcidump> {
    let text = std::fs::read_to_string(path)?;
    parse_fcidump(&text)
}

pub fn parse_fcidump(text: &str) -> Result<LoadedFcidump> {
    let mut lines = text.lines().enumerate();

    // header may span several lines; collect tokens until &END
    let mut header_tokens: Vec<String> = Vec::new();
    let mut header_done = false;
    let mut body_start = 0;
    for (idx, line) in lines.by_ref() {
        let cleaned = line.replace(',', " ");
        for tok in cleaned.split_whitespace() {
            if tok == "&END" || tok == "/" {
                header_done = true;
                break;
            }
            header_tokens.push(tok.to_string());
        }
        if header_done {
            body_start = idx + 1;
            break;
        }
    }
    if !header_done {
        return Err(Error::Parse { line: 1, msg: "missing &END in header".into() });
    }
    if header_tokens.first().map(String::as_str) != Some("&FCI") {
        return Err(Error::Parse { line: 1, msg: "header must start with &FCI".into() });
    }

    let mut norb: Option<usize> = None;
    let mut n_elec: usize = 0;
    let mut ms2: i64 = 0;
    let mut complex = false;
    let mut gamma = false;
    for tok in &header_tokens[1..] {
        let (key, value) = tok.split_once('=').ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("malformed header token '{tok}'"),
        })?;
        let parse_int = |v: &str| -> Result<i64> {
            v.trim().parse().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("invalid integer '{v}' for {key}"),
            })
        };
        match key {
            "NORB" => norb = Some(parse_int(value)? as usize),
            "NELEC" => n_elec = parse_int(value)? as usize,
            "MS2" => ms2 = parse_int(value)?,
            "COMPLEX" => complex = parse_int(value)? != 0,
            "GAMMA" => gamma = parse_int(value)? != 0,
            _ => {} // tolerate extra keys (ORBSYM etc.)
        }
    }
    let n = norb.ok_or(Error::Parse { line: 1, msg: "header missing NORB".into() })?;

    let mut ham = ActiveSpaceHamiltonian::zero(n, 0.0, gamma, "");
    let mut h_set = Array2::<bool>::from_elem((n, n), false);
    let mut eri_set = Array4::<bool>::from_elem((n, n, n, n), false);
    let mut e0_set = false;

    let expected_tokens = if complex { 6 } else { 5 };
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != expected_tokens {
            return Err(Error::Parse {
                line: line_no,
                msg: format!(
                    "expected {expected_tokens} fields for COMPLEX={} but found {}",
                    complex as u8,
                    toks.len()
                ),
            });
        }
        let parse_f = |tok: &str| -> Result<f64> {
            tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid value '{tok}'"),
            })
        };
        let re = parse_f(toks[0])?;
        let im = if complex { parse_f(toks[1])? } else { 0.0 };
        let idx_base = if complex { 2 } else { 1 };
        let mut ix = [0usize; 4];
        for (k, slot) in ix.iter_mut().enumerate() {
            let v: i64 = toks[idx_base + k].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid index '{}'", toks[idx_base + k]),
            })?;
            if v < 0 || v as usize > n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("index {v} out of range 0..={n}"),
                });
            }
            *slot = v as usize;
        }
        let v = Complex64::new(re, im);
        if gamma && im.abs() > SYMMETRY_TOL {
            return Err(Error::Parse {
                line: line_no,
                msg: "imaginary entry in a gamma-point file".into(),
            });
        }

        match ix {
            [0, 0, 0, 0] => {
                if e0_set && (ham.e0 - re).abs() > SYMMETRY_TOL {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "conflicting constant entries".into(),
                    });
                }
                ham.e0 = re;
                e0_set = true;
            }
            [p, q, 0, 0] if p > 0 && q > 0 => {
                let (p, q) = (p - 1, q - 1);
                for (pp, qq, vv) in [(p, q, v), (q, p, v.conj())] {
                    if h_set[[pp, qq]] && (ham.h[[pp, qq]] - vv).norm() > SYMMETRY_TOL {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("conflicting duplicate for h[{},{}]", pp + 1, qq + 1),
                        });
                    }
                    ham.h[[pp, qq]] = vv;
                    h_set[[pp, qq]] = true;
                }
                if gamma && p != q && v.im.abs() > SYMMETRY_TOL {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "complex one-body entry in a gamma-point file".into(),
                    });
                }
            }
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => {
                for (im_idx, vv) in eri_images(p - 1, q - 1, r - 1, s - 1, v, gamma) {
                    if eri_set[im_idx] && (ham.eri[im_idx] - vv).norm() > SYMMETRY_TOL {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!(
                                "conflicting duplicate for ({},{}|{},{})",
                                im_idx[0] + 1,
                                im_idx[1] + 1,
                                im_idx[2] + 1,
                                im_idx[3] + 1
                            ),
                        });
                    }
                    ham.eri[im_idx] = vv;
                    eri_set[im_idx] = true;
                }
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("malformed index pattern {ix:?}"),
                });
            }
        }
    }

    ham.validate()?;
    Ok(LoadedFcidump { ham, n_elec, ms2 })
}

/// Write the unique entries of a Hamiltonian in the extended format.
/// Floats are printed in shortest round-trip form, so save/load is
/// bit-exact.
pub fn format_fcidump(ham: &ActiveSpaceHamiltonian, n_elec: usize, ms2: i64) -> String {
    let n = ham.num_orbitals();
    let complex = !ham.gamma_point;
    let mut out = String::new();
    writeln!(
        out,
        "&FCI NORB={n},NELEC={n_elec},MS2={ms2},COMPLEX={},GAMMA={} &END",
        complex as u8, ham.gamma_point as u8
    )
    .unwrap();

    let fmt_value = |out: &mut String, v: Complex64| {
        // +0.0 normalizes negative zero so re-serialization is stable
        let (re, im) = (v.re + 0.0, v.im + 0.0);
        if complex {
            write!(out, "{re:e} {im:e}").unwrap();
        } else {
            write!(out, "{re:e}").unwrap();
        }
    };

    // two-body: one canonical representative per symmetry orbit
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ham.eri[[p, q, r, s]];
                    if v.norm() == 0.0 {
                        continue;
                    }
                    let orbit_min = eri_images(p, q, r, s, v, ham.gamma_point)
                        .iter()
                        .map(|(ix, _)| *ix)
                        .min()
                        .unwrap();
                    if orbit_min != [p, q, r, s] {
                        continue;
                    }
                    fmt_value(&mut out, v);
                    writeln!(out, " {} {} {} {}", p + 1, q + 1, r + 1, s + 1).unwrap();
                }
            }
        }
    }
    // one-body upper triangle
    for p in 0..n {
        for q in p..n {
            let v = ham.h[[p, q]];
            if v.norm() == 0.0 {
                continue;
            }
            fmt_value(&mut out, v);
            writeln!(out, " {} {} 0 0", p + 1, q + 1).unwrap();
        }
    }
    fmt_value(&mut out, Complex64::new(ham.e0, 0.0));
    writeln!(out, " 0 0 0 0").unwrap();
    out
}

pub fn save_hamiltonian(
    ham: &ActiveSpaceHamiltonian,
    n_elec: usize,
    ms2: i64,
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, format_fcidump(ham, n_elec, ms2))?;
    Ok(())
}
