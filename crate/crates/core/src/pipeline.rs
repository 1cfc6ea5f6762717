//! End-to-end runs per (degree, group, genus): label classes, enumerate and
//! filter ramification types, screen structure constants, decide generation,
//! compute braid orbits, and emit censuses comparable against the shipped
//! reference fixtures.

use crate::affine::AffineGroup;
use crate::braid;
use crate::catalog;
use crate::classes::Labeling;
use crate::error::Error;
use crate::lift::{projection_fiber_orbits, QuotientSetup};
use crate::search::SearchCtx;
use crate::types::{
    enumerate_types, scott_filter, scott_sum, structure_constant, MinusIdentityFilter,
    RamificationType, ScottData, Verdict,
};
use serde::{Deserialize, Serialize};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    Direct,
    ProjectionFiber,
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Engine, Error> {
        match s {
            "direct" => Ok(Engine::Direct),
            "projection-fiber" => Ok(Engine::ProjectionFiber),
            other => Err(Error::Other(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub degree: usize,
    pub genus: usize,
    /// restrict to one catalog group (or group-file path)
    pub group: Option<String>,
    pub engine: Engine,
    /// maximum branch-point count; 0 means derived from the index bound
    pub r_max: usize,
    pub form_cap: usize,
    pub probe_budget: usize,
    pub cache_dir: Option<PathBuf>,
    /// include work beyond the desk-scale caps
    pub stretch: bool,
}

impl RunConfig {
    pub fn new(degree: usize, genus: usize) -> RunConfig {
        RunConfig {
            degree,
            genus,
            group: None,
            engine: Engine::Direct,
            r_max: 0,
            form_cap: 40_000_000,
            probe_budget: 10_000_000,
            cache_dir: None,
            stretch: false,
        }
    }
}

/// One census line: a generating type with its orbit count and largest
/// orbit length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub group: String,
    pub degree: usize,
    pub r: usize,
    pub type_string: String,
    pub orbits: usize,
    pub largest: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Census {
    pub rows: Vec<CensusRow>,
    /// per-type rows that could not be decided within the caps
    pub unknown: Vec<(String, String, String)>,
}

impl Census {
    pub fn totals_by_r(&self) -> BTreeMap<usize, usize> {
        let mut map = BTreeMap::new();
        for row in &self.rows {
            *map.entry(row.r).or_insert(0) += row.orbits;
        }
        map
    }

    pub fn total_components(&self) -> usize {
        self.rows.iter().map(|r| r.orbits).sum()
    }

    pub fn sort(&mut self) {
        let group_rank = |g: &str| {
            catalog::CATALOG
                .iter()
                .position(|e| e.name == g)
                .unwrap_or(usize::MAX)
        };
        self.rows.sort_by(|a, b| {
            group_rank(&a.group)
                .cmp(&group_rank(&b.group))
                .then(a.group.cmp(&b.group))
                .then(a.r.cmp(&b.r))
                .then(a.type_string.cmp(&b.type_string))
        });
    }
}

/// Everything needed to analyze one group.
pub struct Session {
    pub name: String,
    pub aff: Arc<AffineGroup>,
    pub labeling: Arc<Labeling>,
    pub ctx: SearchCtx,
    pub scott: ScottData,
    pub minus: MinusIdentityFilter,
}

impl Session {
    pub fn open(selector: &str) -> Result<Session, Error> {
        let aff = catalog::load_name_or_path(selector)?;
        let labeling = Arc::new(Labeling::compute(aff.group_classes()?)?);
        let ctx = SearchCtx::new(aff.group.clone(), labeling.clone());
        let scott = ScottData::compute(&aff, &labeling);
        let minus = MinusIdentityFilter::new(&aff);
        Ok(Session {
            name: aff.spec.name.clone(),
            aff,
            labeling,
            ctx,
            scott,
            minus,
        })
    }

    pub fn quotient_setup(&self) -> Result<QuotientSetup, Error> {
        QuotientSetup::with_g_labeling(self.aff.clone(), self.labeling.clone())
    }
}

/// Status of one enumerated type after the filters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TypeReport {
    pub type_string: String,
    pub r: usize,
    pub rh_sum: usize,
    pub scott_sum: usize,
    pub status: String,
    pub structure_constant: Option<u128>,
}

/// Enumerates and filters the types of a session; the survivors are the
/// candidates for the orbit stages.
pub fn type_reports(
    session: &Session,
    genus: usize,
    r_max: usize,
) -> Result<(Vec<TypeReport>, Vec<RamificationType>), Error> {
    let degree = session.aff.degree;
    let r_cap = if r_max == 0 { 2 * (degree + genus) } else { r_max };
    let types = enumerate_types(&session.labeling, degree, genus, r_cap);
    let mut reports = Vec::new();
    let mut survivors = Vec::new();
    for ty in types {
        let rh = ty.rh_sum(&session.labeling);
        let ssum = scott_sum(&ty, &session.scott);
        let scott_v = scott_filter(&ty, &session.scott);
        let minus_v = if scott_v == Verdict::Keep {
            session
                .minus
                .verdict(&ty, &session.aff, &session.labeling, &session.scott)
        } else {
            Verdict::Keep
        };
        let (status, keep) = match (&scott_v, &minus_v) {
            (Verdict::Drop(r), _) => (format!("dropped: {r}"), false),
            (_, Verdict::Drop(r)) => (format!("dropped: {r}"), false),
            _ => ("kept".to_string(), true),
        };
        let sc = if keep {
            match structure_constant(&ty, &session.ctx.mult) {
                Ok(v) => v,
                Err(Error::ResourceCap(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let keep = keep && sc != Some(0);
        let status = if sc == Some(0) {
            "dropped: zero structure constant".to_string()
        } else {
            status
        };
        if keep {
            survivors.push(ty.clone());
        }
        reports.push(TypeReport {
            type_string: ty.display(&session.labeling),
            r: ty.r(),
            rh_sum: rh,
            scott_sum: ssum,
            status,
            structure_constant: sc,
        });
    }
    Ok((reports, survivors))
}

/// Orbit census for one type under the selected engine. The triple path is
/// always the double-coset one; the projection-fiber engine covers r >= 4
/// when the type is identity-free in the quotient.
pub fn orbits_for_type(
    session: &Session,
    ty: &RamificationType,
    engine: Engine,
    form_cap: usize,
    probe_budget: usize,
) -> Result<Vec<usize>, Error> {
    if ty.r() == 3 || engine == Engine::Direct {
        let census = braid::braid_orbits(&session.ctx, ty, form_cap)?;
        return Ok(census.lengths());
    }
    let setup = session.quotient_setup()?;
    let outcome = projection_fiber_orbits(&setup, ty, form_cap, probe_budget)?;
    Ok(outcome.lengths)
}

fn cache_key(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update([0u8]);
    }
    hex::encode(hasher.finalize())
}

#[derive(Serialize, Deserialize)]
struct CacheEnvelope<T> {
    version: u32,
    payload: T,
}

const CACHE_VERSION: u32 = 1;

fn cache_read<T: serde::de::DeserializeOwned>(dir: &Path, key: &str) -> Option<T> {
    let path = dir.join(format!("{key}.json"));
    let text = std::fs::read_to_string(path).ok()?;
    let env: CacheEnvelope<T> = serde_json::from_str(&text).ok()?;
    (env.version == CACHE_VERSION).then_some(env.payload)
}

fn cache_write<T: Serialize>(dir: &Path, key: &str, value: &T) {
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let env = CacheEnvelope {
        version: CACHE_VERSION,
        payload: value,
    };
    let Ok(text) = serde_json::to_string(&env) else {
        return;
    };
    let tmp = dir.join(format!(".{key}.tmp"));
    if std::fs::write(&tmp, text).is_ok() {
        let _ = std::fs::rename(tmp, dir.join(format!("{key}.json")));
    }
}

/// Spec text of a group, used to key cache entries by content.
fn group_content(name: &str) -> String {
    catalog::CATALOG
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.text.to_string())
        .unwrap_or_else(|| name.to_string())
}

/// Known desk-infeasible cases, run only under `--stretch`: the full
/// degree-32/64/128 tables and the largest degree-8/16 frontiers.
fn is_stretch_case(degree: usize, ty_r: usize, largest_class: u128) -> bool {
    if matches!(degree, 32 | 64 | 128) {
        return true;
    }
    if degree == 16 && ty_r >= 6 && largest_class > 2_000 {
        return true;
    }
    if degree == 8 && ty_r >= 7 {
        return true;
    }
    false
}

/// The full methodology for one degree / group selection.
pub fn run_pipeline(config: &RunConfig) -> Result<Census, Error> {
    let selectors: Vec<String> = match &config.group {
        Some(g) => vec![g.clone()],
        None => catalog::catalog_by_degree(config.degree)
            .iter()
            .map(|e| e.name.to_string())
            .collect(),
    };
    if selectors.is_empty() {
        return Err(Error::Other(format!(
            "no catalog groups at degree {}",
            config.degree
        )));
    }
    let mut census = Census::default();
    for selector in selectors {
        let session = Session::open(&selector)?;
        let content = group_content(&session.name);

        // stage: types + filters + structure screen
        let stage_key = cache_key(&[
            "types",
            &content,
            &config.genus.to_string(),
            &config.r_max.to_string(),
        ]);
        let survivors: Vec<String> = match config
            .cache_dir
            .as_deref()
            .and_then(|d| cache_read::<Vec<String>>(d, &stage_key))
        {
            Some(v) => v,
            None => {
                let (_, survivors) = type_reports(&session, config.genus, config.r_max)?;
                let v: Vec<String> = survivors
                    .iter()
                    .map(|t| t.display(&session.labeling))
                    .collect();
                if let Some(d) = config.cache_dir.as_deref() {
                    cache_write(d, &stage_key, &v);
                }
                v
            }
        };

        // independent (group, type) jobs run under the rayon pool; the rows
        // are re-sorted afterwards so the result is thread-count independent
        let outcomes: Vec<Result<(String, Option<Vec<usize>>, Option<String>), Error>> =
            survivors
                .par_iter()
                .map(|type_string| {
                    let ty = RamificationType::parse(type_string, &session.labeling)?;
                    let largest_class = ty
                        .entries
                        .iter()
                        .map(|&p| session.labeling.classes[p].size)
                        .max()
                        .unwrap_or(0);
                    if !config.stretch && is_stretch_case(config.degree, ty.r(), largest_class) {
                        return Ok((
                            type_string.clone(),
                            None,
                            Some("skipped: stretch case (rerun with --stretch)".to_string()),
                        ));
                    }
                    let row_key = cache_key(&[
                        "orbits",
                        &content,
                        type_string,
                        &format!("{:?}", config.engine),
                    ]);
                    if let Some(v) = config
                        .cache_dir
                        .as_deref()
                        .and_then(|d| cache_read::<Vec<usize>>(d, &row_key))
                    {
                        return Ok((type_string.clone(), Some(v), None));
                    }
                    match orbits_for_type(
                        &session,
                        &ty,
                        config.engine,
                        config.form_cap,
                        config.probe_budget,
                    ) {
                        Ok(lengths) => {
                            if let Some(d) = config.cache_dir.as_deref() {
                                cache_write(d, &row_key, &lengths);
                            }
                            Ok((type_string.clone(), Some(lengths), None))
                        }
                        Err(Error::ResourceCap(msg)) => {
                            Ok((type_string.clone(), None, Some(format!("unknown: {msg}"))))
                        }
                        Err(e) => Err(e),
                    }
                })
                .collect();
        for outcome in outcomes {
            let (type_string, lengths, note) = outcome?;
            if let Some(note) = note {
                census
                    .unknown
                    .push((session.name.clone(), type_string, note));
                continue;
            }
            if let Some(lengths) = lengths {
                if !lengths.is_empty() {
                    let ty = RamificationType::parse(&type_string, &session.labeling)?;
                    census.rows.push(CensusRow {
                        group: session.name.clone(),
                        degree: config.degree,
                        r: ty.r(),
                        type_string,
                        orbits: lengths.len(),
                        largest: lengths[0],
                    });
                }
            }
        }
    }
    census.sort();
    Ok(census)
}

/// Byte-stable CSV: `group,degree,r,type,orbits,largest`.
pub fn emit_csv(census: &Census) -> String {
    let mut out = String::from("group,degree,r,type,orbits,largest\n");
    for row in &census.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.group, row.degree, row.r, row.type_string, row.orbits, row.largest
        ));
    }
    out
}

pub fn emit_markdown(census: &Census) -> String {
    let mut out = String::from("| group | r | type | orbits | largest |\n|---|---|---|---|---|\n");
    for row in &census.rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            row.group, row.r, row.type_string, row.orbits, row.largest
        ));
    }
    out
}

pub fn emit_json(census: &Census) -> String {
    serde_json::to_string_pretty(census).expect("census serializes")
}

/// Splits a census row on commas outside parentheses (group names and type
/// strings both contain parenthesized commas).
fn split_census_fields(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in line.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur.trim().to_string());
    out
}

/// Parses census/fixture CSV (comments with `#` allowed).
pub fn parse_census_csv(text: &str) -> Result<Vec<CensusRow>, Error> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("group,") {
            continue;
        }
        let parts = split_census_fields(line);
        if parts.len() != 6 {
            return Err(Error::parse_at(
                format!("expected 6 fields, got {}", parts.len()),
                lineno + 1,
                1,
            ));
        }
        let degree: usize = parts[1]
            .parse()
            .map_err(|_| Error::parse_at("bad degree".into(), lineno + 1, 2))?;
        let r: usize = parts[2]
            .parse()
            .map_err(|_| Error::parse_at("bad r".into(), lineno + 1, 3))?;
        let orbits: usize = parts[4]
            .parse()
            .map_err(|_| Error::parse_at("bad orbit count".into(), lineno + 1, 5))?;
        let largest: usize = parts[5]
            .parse()
            .map_err(|_| Error::parse_at("bad largest length".into(), lineno + 1, 6))?;
        rows.push(CensusRow {
            group: parts[0].clone(),
            degree,
            r,
            type_string: parts[3].clone(),
            orbits,
            largest,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiffReport {
    pub matched: usize,
    pub mismatched: Vec<String>,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
}

impl DiffReport {
    pub fn clean(&self) -> bool {
        self.mismatched.is_empty() && self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Per-row comparison of a census against a fixture; rows are keyed by
/// (group, type).
pub fn diff_rows(census: &[CensusRow], fixture: &[CensusRow]) -> DiffReport {
    let mut report = DiffReport::default();
    let census_map: BTreeMap<(String, String), &CensusRow> = census
        .iter()
        .map(|r| ((r.group.clone(), r.type_string.clone()), r))
        .collect();
    let fixture_map: BTreeMap<(String, String), &CensusRow> = fixture
        .iter()
        .map(|r| ((r.group.clone(), r.type_string.clone()), r))
        .collect();
    for (key, want) in &fixture_map {
        match census_map.get(key) {
            None => report
                .missing
                .push(format!("{} {} missing from census", key.0, key.1)),
            Some(got) => {
                if got.orbits != want.orbits || got.largest != want.largest {
                    report.mismatched.push(format!(
                        "{} {}: expected {}x largest {}, got {}x largest {}",
                        key.0, key.1, want.orbits, want.largest, got.orbits, got.largest
                    ));
                } else {
                    report.matched += 1;
                }
            }
        }
    }
    for key in census_map.keys() {
        if !fixture_map.contains_key(key) {
            report
                .extra
                .push(format!("{} {} not in fixture", key.0, key.1));
        }
    }
    report
}

/// Reference censuses transcribed from the published tables.
pub mod fixtures {
    /// Degree 9, genus 1: the five derived-length-two groups, 63 components.
    pub const DEGREE9: &str = include_str!("../fixtures/degree9.csv");
    /// Degree 8 spot checks for ASL(3,2).
    pub const DEGREE8_SPOTS: &str = include_str!("../fixtures/degree8_spots.csv");
    /// Degree 25 and 27 triple rows for the four reference groups.
    pub const TRIPLES_25_27: &str = include_str!("../fixtures/triples_25_27.csv");
}
