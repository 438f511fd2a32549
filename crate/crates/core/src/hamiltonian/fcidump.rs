//! FCIDUMP reader and writer.
//!
//! Records are `value i j k l` with 1-based indices and chemist-notation
//! two-electron values `(ij|kl)`, which are stored as `⟨ik|jl⟩`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::integrals::MolecularIntegrals;
use crate::error::{Error, Result};

const DUPLICATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    Offset,
    One(usize, usize),
    Two(usize, usize, usize, usize),
}

fn canonical_chemist(i: usize, j: usize, k: usize, l: usize) -> Slot {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    let (k, l) = if k >= l { (k, l) } else { (l, k) };
    if (i, j) >= (k, l) {
        Slot::Two(i, j, k, l)
    } else {
        Slot::Two(k, l, i, j)
    }
}

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
}

fn parse_header(text: &str, first_line: usize) -> Result<Header> {
    let mut values: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    let body = text
        .trim()
        .trim_start_matches('&')
        .trim_start_matches(|c: char| c.is_ascii_alphabetic());
    for token in body.split(|c: char| c == ',' || c.is_whitespace()) {
        let token = token.trim();
        if token.is_empty() || token == "/" || token.eq_ignore_ascii_case("&END") {
            continue;
        }
        if let Some((key, value)) = token.split_once('=') {
            let key = key.trim().to_ascii_uppercase();
            let entry = values.entry(key.clone()).or_default();
            if !value.trim().is_empty() {
                entry.push(value.trim().to_string());
            }
            current = Some(key);
        } else if let Some(key) = &current {
            values.get_mut(key).unwrap().push(token.to_string());
        } else {
            return Err(Error::parse(first_line, format!("unexpected header token {token:?}")));
        }
    }
    let scalar = |key: &str| -> Result<i64> {
        let v = values
            .get(key)
            .and_then(|v| v.first())
            .ok_or_else(|| Error::parse(first_line, format!("header is missing {key}")))?;
        v.parse::<i64>()
            .map_err(|_| Error::parse(first_line, format!("invalid {key} value {v:?}")))
    };
    let norb = scalar("NORB")?;
    let nelec = scalar("NELEC")?;
    let ms2 = match values.get("MS2") {
        Some(_) => scalar("MS2")?,
        None => 0,
    };
    if norb <= 0 || nelec < 0 {
        return Err(Error::parse(first_line, "NORB must be positive and NELEC nonnegative"));
    }
    Ok(Header {
        norb: norb as usize,
        nelec: nelec as usize,
        ms2,
    })
}

/// Parses FCIDUMP text into physicist-notation integrals.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::parse(1, "empty input"))?;
    if !lines[start].trim_start().to_ascii_uppercase().starts_with("&FCI") {
        return Err(Error::parse(start + 1, "expected &FCI header"));
    }
    let mut end = None;
    for (k, line) in lines.iter().enumerate().skip(start) {
        let t = line.trim().to_ascii_uppercase();
        if t.ends_with("&END") || t == "/" || t.ends_with('/') {
            end = Some(k);
            break;
        }
    }
    let end = end.ok_or_else(|| Error::parse(start + 1, "header is not terminated"))?;
    let header_text = lines[start..=end].join(" ");
    let header = parse_header(&header_text, start + 1)?;

    let n = header.norb;
    let twice_sz = header.ms2;
    let nelec = header.nelec as i64;
    if (nelec + twice_sz) % 2 != 0 || twice_sz.abs() > nelec {
        return Err(Error::parse(start + 1, "NELEC and MS2 are inconsistent"));
    }
    let n_alpha = ((nelec + twice_sz) / 2) as usize;
    let n_beta = ((nelec - twice_sz) / 2) as usize;
    if n_alpha > n || n_beta > n {
        return Err(Error::parse(start + 1, "more electrons per spin than orbitals"));
    }

    let mut ints = MolecularIntegrals::zeros(n, n_alpha, n_beta);
    let mut seen: HashMap<Slot, f64> = HashMap::new();
    for (k, raw) in lines.iter().enumerate().skip(end + 1) {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::parse(line_no, "expected `value i j k l`"));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid value {:?}", fields[0])))?;
        let mut idx = [0usize; 4];
        for (slot, field) in idx.iter_mut().zip(&fields[1..]) {
            *slot = field
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid index {field:?}")))?;
            if *slot > n {
                return Err(Error::parse(line_no, format!("index {} exceeds NORB={n}", *slot)));
            }
        }
        let slot = match idx {
            [0, 0, 0, 0] => Slot::Offset,
            [i, 0, 0, 0] if i > 0 => continue, // orbital energy, not needed
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (a, b) = if i >= j { (i, j) } else { (j, i) };
                Slot::One(a - 1, b - 1)
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => canonical_chemist(i - 1, j - 1, k - 1, l - 1),
            _ => return Err(Error::parse(line_no, "unrecognised index pattern")),
        };
        if let Some(prev) = seen.insert(slot, value) {
            if (prev - value).abs() > DUPLICATE_TOL {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate record conflicts with earlier value {prev}"),
                ));
            }
        }
        match slot {
            Slot::Offset => ints.e_offset = value,
            Slot::One(a, b) => {
                ints.h[(a, b)] = value;
                ints.h[(b, a)] = value;
            }
            Slot::Two(i, j, k, l) => ints.set_g_symmetric(i, k, j, l, value),
        }
    }
    Ok(ints)
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<MolecularIntegrals> {
    let text = std::fs::read_to_string(path)?;
    parse_fcidump(&text)
}

/// Serializes integrals with one record per symmetry-unique element.
pub fn write_fcidump(ints: &MolecularIntegrals) -> String {
    let n = ints.n_orbitals;
    let mut out = String::new();
    let ms2 = ints.n_alpha as i64 - ints.n_beta as i64;
    let _ = writeln!(
        out,
        " &FCI NORB={},NELEC={},MS2={},\n  ORBSYM={}\n  ISYM=1,\n &END",
        n,
        ints.n_electrons(),
        ms2,
        "1,".repeat(n)
    );
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if (i, j) < (k, l) {
                        continue;
                    }
                    let v = ints.g(i, k, j, l);
                    if v != 0.0 {
                        let _ = writeln!(out, "{:e} {} {} {} {}", v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.h[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "{:e} {} {} 0 0", v, i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, "{:e} 0 0 0 0", ints.e_offset);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_orbital_records() {
        let text = "&FCI NORB=1, NELEC=2, MS2=0 &END\n-1.25 1 1 0 0\n0.7 0 0 0 0\n";
        let ints = parse_fcidump(text).unwrap();
        assert_eq!(ints.h[(0, 0)], -1.25);
        assert_eq!(ints.e_offset, 0.7);
        assert!(ints.g.iter().all(|&v| v == 0.0));
        assert_eq!((ints.n_alpha, ints.n_beta), (1, 1));
    }

    #[test]
    fn chemist_record_fills_eight_physicist_slots() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n/\n0.5 1 2 1 1\n";
        let ints = parse_fcidump(text).unwrap();
        // (12|11) with 0-based orbitals is ⟨01|10⟩ and its images
        for (r, s, t, u) in [(0, 0, 1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0)] {
            assert_eq!(ints.g(r, s, t, u), 0.5, "({r}{s}|{t}{u})");
        }
        assert_eq!(ints.g.iter().filter(|&&v| v != 0.0).count(), 4);
    }

    #[test]
    fn open_shell_counts_from_ms2() {
        let text = "&FCI NORB=3,NELEC=3,MS2=1 &END\n0.0 0 0 0 0\n";
        let ints = parse_fcidump(text).unwrap();
        assert_eq!((ints.n_alpha, ints.n_beta), (2, 1));
    }

    #[test]
    fn fortran_exponents_are_accepted() {
        let text = "&FCI NORB=1,NELEC=2,MS2=0 &END\n-1.5D+00 1 1 0 0\n";
        assert_eq!(parse_fcidump(text).unwrap().h[(0, 0)], -1.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("&FCI NELEC=2 &END\n", 1),
            ("&FCI NORB=1,NELEC=2 &END\n0.1 2 1 0 0\n", 2),
            ("&FCI NORB=1,NELEC=2 &END\n0.1 1 1 0 0\n0.2 1 1 0 0\n", 3),
            ("&FCI NORB=2,NELEC=2 &END\n0.1 1 2 1 1\n0.3 2 1 1 1\n", 3),
            ("&FCI NORB=1,NELEC=2 &END\n0.1 1 1\n", 2),
            ("&FCI NORB=1,NELEC=2\n0.1 1 1 0 0\n", 1),
        ];
        for (text, line) in cases {
            match parse_fcidump(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn consistent_duplicates_are_accepted() {
        let text = "&FCI NORB=2,NELEC=2 &END\n0.1 1 2 1 1\n0.1 2 1 1 1\n0.1 1 1 2 1\n";
        assert_eq!(parse_fcidump(text).unwrap().g(0, 0, 1, 0), 0.1);
    }
}
