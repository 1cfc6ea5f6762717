//! Group definition files and the built-in catalog of affine primitive
//! groups for the table degrees.
//!
//! File format (UTF-8, line oriented):
//!
//! ```text
//! # comment lines are allowed; the first one is kept as a note
//! affine p e name
//! a11 a12 ... (e*e entries, row-major, integers mod p) [| t1 ... te]
//! ```
//!
//! One generator per line; the optional `| t1 .. te` suffix is a translation
//! part. The catalog ships matrix generators only: they are compact and the
//! loader re-derives and re-verifies the permutation group.

use crate::affine::{AffineGen, AffineGroup, AffineGroupSpec};
use crate::error::Error;
use crate::linalg::Mat;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Parses a group file; returns the spec and an optional note comment.
pub fn parse_group_file(text: &str) -> Result<(AffineGroupSpec, Option<String>), Error> {
    let mut note = None;
    let mut header: Option<(u16, usize, String, usize)> = None;
    let mut gens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if note.is_none() && !c.trim().is_empty() {
                note = Some(c.trim().to_string());
            }
            continue;
        }
        if header.is_none() {
            let mut it = line.split_whitespace();
            let tag = it.next().unwrap_or_default();
            if tag != "affine" {
                return Err(Error::parse_at(
                    format!("expected header starting with 'affine', got {tag:?}"),
                    lineno + 1,
                    1,
                ));
            }
            let p: u16 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse_at("bad prime".into(), lineno + 1, 8))?;
            let e: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse_at("bad exponent".into(), lineno + 1, 10))?;
            let name: String = it.collect::<Vec<_>>().join(" ");
            if name.is_empty() {
                return Err(Error::parse_at("missing group name".into(), lineno + 1, 12));
            }
            header = Some((p, e, name, lineno + 1));
            continue;
        }
        let (p, e, _, _) = header.as_ref().unwrap();
        let (mat_part, trans_part) = match line.split_once('|') {
            Some((m, t)) => (m, Some(t)),
            None => (line, None),
        };
        let mut entries = Vec::new();
        for (col, tok) in mat_part.split_whitespace().enumerate() {
            let v: u16 = tok.parse().map_err(|_| {
                Error::parse_at(format!("bad matrix entry {tok:?}"), lineno + 1, col + 1)
            })?;
            entries.push(v % p);
        }
        if entries.len() != e * e {
            return Err(Error::parse_at(
                format!("expected {} matrix entries, got {}", e * e, entries.len()),
                lineno + 1,
                1,
            ));
        }
        let translation = match trans_part {
            None => None,
            Some(t) => {
                let mut tv = Vec::new();
                for (col, tok) in t.split_whitespace().enumerate() {
                    let v: u16 = tok.parse().map_err(|_| {
                        Error::parse_at(
                            format!("bad translation entry {tok:?}"),
                            lineno + 1,
                            col + 1,
                        )
                    })?;
                    tv.push(v % p);
                }
                if tv.len() != *e {
                    return Err(Error::parse_at(
                        format!("expected {e} translation entries, got {}", tv.len()),
                        lineno + 1,
                        1,
                    ));
                }
                Some(tv)
            }
        };
        gens.push(AffineGen {
            matrix: Mat::new(*p, *e, entries),
            translation,
        });
    }
    let (p, e, name, hline) = header.ok_or_else(|| Error::parse("missing header line".into()))?;
    if gens.is_empty() {
        return Err(Error::parse_at("no generators".into(), hline, 1));
    }
    let spec = AffineGroupSpec::new(p, e, name, gens);
    spec.validate()?;
    Ok((spec, note))
}

/// Serializes a spec in the group file format; `parse_group_file` inverts it.
pub fn save_group_file(spec: &AffineGroupSpec, note: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(n) = note {
        out.push_str(&format!("# {n}\n"));
    }
    out.push_str(&format!("affine {} {} {}\n", spec.p, spec.e, spec.name));
    for g in &spec.generators {
        let entries: Vec<String> = g.matrix.entries().iter().map(|x| x.to_string()).collect();
        out.push_str(&entries.join(" "));
        if let Some(t) = &g.translation {
            let tv: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            out.push_str(" | ");
            out.push_str(&tv.join(" "));
        }
        out.push('\n');
    }
    out
}

pub fn load_group_file(path: &std::path::Path) -> Result<(AffineGroupSpec, Option<String>), Error> {
    parse_group_file(&std::fs::read_to_string(path)?)
}

/// One built-in catalog entry.
pub struct CatalogEntry {
    pub name: &'static str,
    pub degree: usize,
    pub text: &'static str,
}

macro_rules! entry {
    ($name:literal, $degree:literal, $file:literal) => {
        CatalogEntry {
            name: $name,
            degree: $degree,
            text: include_str!(concat!("../catalog/", $file)),
        }
    };
}

/// The built-in catalog, ordered by degree then name. Orders and primitivity
/// are re-verified on load; the matrix data is self-checking.
pub static CATALOG: &[CatalogEntry] = &[
    entry!("AGL(1,8)", 8, "d008_agl_1_8.group"),
    entry!("AGammaL(1,8)", 8, "d008_agammal_1_8.group"),
    entry!("ASL(3,2)", 8, "d008_asl_3_2.group"),
    entry!("AGL(2,3)", 9, "d009_agl_2_3.group"),
    entry!("ASL(2,3)", 9, "d009_asl_2_3.group"),
    entry!("AGammaL(1,9)", 9, "d009_agammal_1_9.group"),
    entry!("3^2:D(2*4)", 9, "d009_d8.group"),
    entry!("3^2:Q8", 9, "d009_q8.group"),
    entry!("2^4:5", 16, "d016_2_4_5.group"),
    entry!("AGammaL(1,16)", 16, "d016_agammal_1_16.group"),
    entry!("ASL(2,4)", 16, "d016_asl_2_4.group"),
    entry!("AGL(2,4)", 16, "d016_agl_2_4.group"),
    entry!("2^4.PSL(4,2)", 16, "d016_2_4_psl_4_2.group"),
    entry!("AGL(2,5)", 25, "d025_agl_2_5.group"),
    entry!("ASL(2,5)", 25, "d025_asl_2_5.group"),
    entry!("5^2:Q8:3", 25, "d025_q8_3.group"),
    entry!("5^2:4xD(2*3)", 25, "d025_4xd6.group"),
    entry!("5^2:D(2*4)", 25, "d025_d8.group"),
    entry!("AGL(3,3)", 27, "d027_agl_3_3.group"),
    entry!("ASL(3,3)", 27, "d027_asl_3_3.group"),
    entry!("3^3:A(4)", 27, "d027_a4.group"),
    entry!("3^3:S(4)", 27, "d027_s4.group"),
    entry!("3^3:A(4)x2", 27, "d027_a4x2.group"),
    entry!("3^3:S(4)x2", 27, "d027_s4x2.group"),
    entry!("ASL(5,2)", 32, "d032_asl_5_2.group"),
    entry!("7^2:S(3)", 49, "d049_s3.group"),
    entry!("7^2:D(2*6)", 49, "d049_d12.group"),
    entry!("3^4:2.A(5)", 81, "d081_2a5.group"),
    entry!("ASL(2,11):2", 121, "d121_asl_2_11_2.group"),
    entry!("5^3:S(5)", 125, "d125_s5.group"),
    entry!("7^3:PSL(2,7)", 343, "d343_psl_2_7.group"),
];

pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name).collect()
}

pub fn catalog_by_degree(degree: usize) -> Vec<&'static CatalogEntry> {
    CATALOG.iter().filter(|e| e.degree == degree).collect()
}

fn registry() -> &'static Mutex<HashMap<String, Arc<AffineGroup>>> {
    static REG: OnceLock<Mutex<HashMap<String, Arc<AffineGroup>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Loads a built-in catalog group by name, building and caching it.
pub fn load(name: &str) -> Result<Arc<AffineGroup>, Error> {
    if let Some(g) = registry().lock().unwrap().get(name) {
        return Ok(g.clone());
    }
    let entry = CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownGroup(name.to_string()))?;
    let (spec, _) = parse_group_file(entry.text)?;
    let built = Arc::new(AffineGroup::build(spec)?);
    registry()
        .lock()
        .unwrap()
        .insert(name.to_string(), built.clone());
    Ok(built)
}

/// Loads either a catalog name or a path to a group file.
pub fn load_name_or_path(selector: &str) -> Result<Arc<AffineGroup>, Error> {
    if CATALOG.iter().any(|e| e.name == selector) {
        return load(selector);
    }
    let path = std::path::Path::new(selector);
    if path.exists() {
        let (spec, _) = load_group_file(path)?;
        return Ok(Arc::new(AffineGroup::build(spec)?));
    }
    Err(Error::UnknownGroup(selector.to_string()))
}
