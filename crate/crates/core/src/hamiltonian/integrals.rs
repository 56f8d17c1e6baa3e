//! Spatial-orbital integral container and FCIDUMP reading/writing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Entries smaller than this are dropped when parsing.
pub const INTEGRAL_FLOOR: f64 = 1e-12;

const DUPLICATE_TOL: f64 = 1e-10;

/// One- and two-electron integrals over real spatial orbitals.
///
/// `h2` is stored in chemists' notation `(pq|rs)` with all eight
/// permutations populated.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    n_spatial: usize,
    n_electrons: usize,
    two_ms: i32,
    pub e_nuclear: f64,
    h1: Vec<f64>,
    h2: Vec<f64>,
    pub orbital_energies: Option<Vec<f64>>,
}

impl MolecularIntegrals {
    pub fn new(n_spatial: usize, n_electrons: usize, two_ms: i32) -> Result<Self> {
        if n_electrons > 2 * n_spatial {
            return Err(Error::InvalidIntegrals(format!(
                "{n_electrons} electrons do not fit in {n_spatial} orbitals"
            )));
        }
        if (n_electrons as i32 + two_ms) % 2 != 0 || two_ms.unsigned_abs() as usize > n_electrons {
            return Err(Error::InvalidIntegrals(format!(
                "MS2={two_ms} inconsistent with {n_electrons} electrons"
            )));
        }
        Ok(MolecularIntegrals {
            n_spatial,
            n_electrons,
            two_ms,
            e_nuclear: 0.0,
            h1: vec![0.0; n_spatial * n_spatial],
            h2: vec![0.0; n_spatial.pow(4)],
            orbital_energies: None,
        })
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn two_ms(&self) -> i32 {
        self.two_ms
    }

    pub fn n_alpha(&self) -> usize {
        ((self.n_electrons as i32 + self.two_ms) / 2) as usize
    }

    pub fn n_beta(&self) -> usize {
        ((self.n_electrons as i32 - self.two_ms) / 2) as usize
    }

    #[inline]
    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_spatial + q]
    }

    /// Chemists' `(pq|rs)`.
    #[inline]
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    pub fn set_h1(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_spatial;
        self.h1[p * n + q] = v;
        self.h1[q * n + p] = v;
    }

    /// Set `(pq|rs)` and its seven symmetry partners.
    pub fn set_h2(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_spatial;
        for (a, b, c, d) in permutations(p, q, r, s) {
            self.h2[((a * n + b) * n + c) * n + d] = v;
        }
    }

    /// Largest deviation from the h1 and 8-fold h2 symmetries.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n_spatial;
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                worst = worst.max((self.h1(p, q) - self.h1(q, p)).abs());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, q, r, s);
                        for (a, b, c, d) in permutations(p, q, r, s) {
                            worst = worst.max((v - self.h2(a, b, c, d)).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.symmetry_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidIntegrals(format!(
                "permutation symmetry broken by {defect:e}"
            )));
        }
        if let Some(e) = &self.orbital_energies {
            if e.len() != self.n_spatial {
                return Err(Error::InvalidIntegrals("orbital energy count != NORB".into()));
            }
        }
        Ok(())
    }

    /// Relabel orbitals: new orbital `i` is old orbital `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_spatial;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidIntegrals("not a permutation".into()));
        }
        let mut out = self.clone();
        for p in 0..n {
            for q in 0..n {
                out.h1[p * n + q] = self.h1(perm[p], perm[q]);
                for r in 0..n {
                    for s in 0..n {
                        out.h2[((p * n + q) * n + r) * n + s] =
                            self.h2(perm[p], perm[q], perm[r], perm[s]);
                    }
                }
            }
        }
        out.orbital_energies = self
            .orbital_energies
            .as_ref()
            .map(|e| perm.iter().map(|&p| e[p]).collect());
        Ok(out)
    }

    pub fn from_fcidump_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        parse_fcidump(&text)
    }

    /// FCIDUMP text with one record per symmetry-unique nonzero integral.
    pub fn to_fcidump(&self) -> String {
        let n = self.n_spatial;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "&FCI NORB={},NELEC={},MS2={},\n&END",
            n, self.n_electrons, self.two_ms
        );
        let rec = |out: &mut String, v: f64, i: usize, j: usize, k: usize, l: usize| {
            let _ = writeln!(out, "{v:24.16e} {i:3} {j:3} {k:3} {l:3}");
        };
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if pair(i, j) < pair(k, l) {
                            continue;
                        }
                        let v = self.h2(i, j, k, l);
                        if v != 0.0 {
                            rec(&mut out, v, i + 1, j + 1, k + 1, l + 1);
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let v = self.h1(i, j);
                if v != 0.0 {
                    rec(&mut out, v, i + 1, j + 1, 0, 0);
                }
            }
        }
        if let Some(e) = &self.orbital_energies {
            for (i, v) in e.iter().enumerate() {
                rec(&mut out, *v, i + 1, 0, 0, 0);
            }
        }
        rec(&mut out, self.e_nuclear, 0, 0, 0, 0);
        out
    }
}

fn pair(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

fn permutations(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

fn canonical(p: usize, q: usize, r: usize, s: usize) -> (usize, usize, usize, usize) {
    let (a, b) = if p >= q { (p, q) } else { (q, p) };
    let (c, d) = if r >= s { (r, s) } else { (s, r) };
    if pair(a, b) >= pair(c, d) {
        (a, b, c, d)
    } else {
        (c, d, a, b)
    }
}

#[derive(Debug, Default)]
struct Header {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
    current: Option<String>,
}

fn parse_header_tokens(body: &str, line: usize, header: &mut Header) -> Result<()> {
    for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        if let Some((key, value)) = tok.split_once('=') {
            let key = key.trim().to_ascii_uppercase();
            let value = value.trim();
            let bad = |what: &str| Error::Parse {
                line,
                msg: format!("malformed header value for {what}: {value:?}"),
            };
            match key.as_str() {
                "NORB" => header.norb = Some(value.parse().map_err(|_| bad("NORB"))?),
                "NELEC" => header.nelec = Some(value.parse().map_err(|_| bad("NELEC"))?),
                "MS2" => header.ms2 = Some(value.parse().map_err(|_| bad("MS2"))?),
                "" => {
                    return Err(Error::Parse {
                        line,
                        msg: "header assignment without a key".into(),
                    })
                }
                _ => {}
            }
            header.current = Some(key);
        } else if header.current.is_none() {
            return Err(Error::Parse {
                line,
                msg: format!("unexpected header token {tok:?}"),
            });
        }
    }
    Ok(())
}

fn parse_value(tok: &str) -> Option<f64> {
    tok.parse::<f64>()
        .ok()
        .or_else(|| tok.replace(['D', 'd'], "E").parse().ok())
}

/// Parse FCIDUMP text into fully symmetry-expanded integrals.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = Header::default();

    // Namelist header: from &FCI up to &END or '/'.
    let mut started = false;
    let mut last_header_line = 0;
    for (line, raw) in lines.by_ref() {
        let trimmed = raw.trim();
        if trimmed.is_empty() && !started {
            continue;
        }
        last_header_line = line;
        let mut body = trimmed;
        if !started {
            let upper = body.to_ascii_uppercase();
            if !upper.starts_with("&FCI") {
                return Err(Error::Parse {
                    line,
                    msg: "expected &FCI namelist header".into(),
                });
            }
            started = true;
            body = &body[4..];
        }
        let upper = body.to_ascii_uppercase();
        let end = upper.find("&END").or_else(|| upper.find('/'));
        let (content, done) = match end {
            Some(pos) => (&body[..pos], true),
            None => (body, false),
        };
        parse_header_tokens(content, line, &mut header)?;
        if done {
            break;
        }
    }
    if !started {
        return Err(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        });
    }
    let norb = header.norb.ok_or_else(|| Error::Parse {
        line: last_header_line,
        msg: "header lacks NORB".into(),
    })?;
    let nelec = header.nelec.ok_or_else(|| Error::Parse {
        line: last_header_line,
        msg: "header lacks NELEC".into(),
    })?;
    let mut ints = MolecularIntegrals::new(norb, nelec, header.ms2.unwrap_or(0)).map_err(|e| {
        Error::Parse {
            line: last_header_line,
            msg: e.to_string(),
        }
    })?;

    let mut seen: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
    let mut orbital_energies = vec![None; norb];
    for (line, raw) in lines {
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `value i j k l`, got {raw:?}"),
            });
        }
        let value = parse_value(toks[0]).ok_or_else(|| Error::Parse {
            line,
            msg: format!("bad value {:?}", toks[0]),
        })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            *slot = tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad index {tok:?}"),
            })?;
            if *slot > norb {
                return Err(Error::OrbitalIndexOutOfRange {
                    line,
                    index: *slot,
                    norb,
                });
            }
        }
        let [i, j, k, l] = idx;
        let key = match (i, j, k, l) {
            (0, 0, 0, 0) => (0, 0, 0, 0),
            (i, 0, 0, 0) => {
                if let Some(prev) = orbital_energies[i - 1] {
                    check_duplicate(line, prev, value, "orbital energy")?;
                }
                orbital_energies[i - 1] = Some(value);
                continue;
            }
            (i, j, 0, 0) if j > 0 => {
                let (a, b) = if i >= j { (i, j) } else { (j, i) };
                (a, b, 0, 0)
            }
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => canonical(i, j, k, l),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unrecognized index pattern {i} {j} {k} {l}"),
                })
            }
        };
        if let Some(prev) = seen.get(&key) {
            check_duplicate(line, *prev, value, "integral")?;
            continue;
        }
        seen.insert(key, value);
        match key {
            (0, 0, 0, 0) => ints.e_nuclear = value,
            _ if value.abs() < INTEGRAL_FLOOR => {}
            (a, b, 0, 0) => ints.set_h1(a - 1, b - 1, value),
            (a, b, c, d) => ints.set_h2(a - 1, b - 1, c - 1, d - 1, value),
        }
    }
    if orbital_energies.iter().all(Option::is_some) && norb > 0 {
        ints.orbital_energies = Some(orbital_energies.into_iter().flatten().collect());
    }
    Ok(ints)
}

fn check_duplicate(line: usize, prev: f64, value: f64, what: &str) -> Result<()> {
    if (prev - value).abs() > DUPLICATE_TOL {
        return Err(Error::InconsistentIntegral {
            line,
            msg: format!("{what} given as {prev} and {value}"),
        });
    }
    Ok(())
}
