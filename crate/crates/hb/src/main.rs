use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use hb_core::braid;
use hb_core::catalog;
use hb_core::lift::{self, QuotientSetup};
use hb_core::pipeline::{
    self, diff_rows, emit_csv, emit_json, emit_markdown, parse_census_csv, Engine, RunConfig,
    Session,
};
use hb_core::search::{self, GeneratingVerdict};
use hb_core::types::RamificationType;
use std::path::PathBuf;

/// Genus systems of affine primitive permutation groups: class labeling,
/// ramification types, generating tuples, and braid orbits on Nielsen
/// classes.
#[derive(Parser)]
#[command(name = "hb", version, about)]
struct Cli {
    /// Cache directory for pipeline stages (also HB_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in group catalog
    ListCatalog,
    /// Print a catalog group (or group file) and its basic invariants
    ShowGroup { group: String },
    /// Print the labeled class table of a group
    Classes { group: String },
    /// Enumerate and filter ramification types
    Types {
        group: String,
        #[arg(long, default_value_t = 1)]
        genus: usize,
        /// largest branch-point count (0 = derived bound)
        #[arg(long, default_value_t = 0)]
        r_max: usize,
    },
    /// Decide whether a type is generating and list seed tuples
    CheckType { group: String, r#type: String },
    /// Compute the braid orbits of one type
    Orbits {
        group: String,
        r#type: String,
        #[arg(long, default_value = "direct")]
        engine: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long, default_value_t = 40_000_000)]
        form_cap: usize,
    },
    /// Run the full pipeline for a degree (or one group) and emit the census
    Run {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        genus: usize,
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value = "direct")]
        engine: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        /// include cases beyond the desk-scale caps
        #[arg(long)]
        stretch: bool,
    },
    /// Compare a census file against a fixture; nonzero exit on mismatch
    Diff {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long)]
        census: PathBuf,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cache_dir = cli
        .cache_dir
        .or_else(|| std::env::var_os("HB_CACHE_DIR").map(PathBuf::from));
    match cli.command {
        Command::ListCatalog => {
            println!(
                "{:<16} {:>7} {:>14} {:>12}",
                "name", "degree", "order", "stabilizer"
            );
            for entry in catalog::CATALOG {
                let g = catalog::load(entry.name)?;
                println!(
                    "{:<16} {:>7} {:>14} {:>12}",
                    entry.name,
                    entry.degree,
                    g.group.order(),
                    g.stabilizer.order()
                );
            }
        }
        Command::ShowGroup { group } => {
            let aff = catalog::load_name_or_path(&group)?;
            print!("{}", catalog::save_group_file(&aff.spec, None));
            println!("# degree {}", aff.degree);
            println!("# order {}", aff.group.order());
            println!("# socle order {}", aff.socle.order());
            println!("# point stabilizer order {}", aff.stabilizer.order());
            println!("# primitive: yes (checked on load)");
        }
        Command::Classes { group } => {
            let session = Session::open(&group)?;
            println!(
                "{:<6} {:>6} {:>14} {:>6} {:>5} {:>14}",
                "label", "order", "centralizer", "index", "fix", "size"
            );
            for (label, order, cent, index, fix, size) in session.labeling.table() {
                println!(
                    "{:<6} {:>6} {:>14} {:>6} {:>5} {:>14}",
                    label, order, cent, index, fix, size
                );
            }
        }
        Command::Types {
            group,
            genus,
            r_max,
        } => {
            let session = Session::open(&group)?;
            let (reports, _) = pipeline::type_reports(&session, genus, r_max)?;
            println!("type,r,rh_sum,scott_sum,status,structure_constant");
            for rep in reports {
                println!(
                    "{},{},{},{},{},{}",
                    rep.type_string,
                    rep.r,
                    rep.rh_sum,
                    rep.scott_sum,
                    rep.status,
                    rep.structure_constant
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| "unknown".into())
                );
            }
        }
        Command::CheckType { group, r#type } => {
            let session = Session::open(&group)?;
            let ty = RamificationType::parse(&r#type, &session.labeling)?;
            let verdict = search::is_generating_type(&session.ctx, &ty, 600_000)?;
            let seeds = search::enumerate_tuples(&session.ctx, &ty)?;
            let verdict_str = match (&verdict, seeds.is_empty()) {
                (GeneratingVerdict::Yes, _) => "yes",
                (GeneratingVerdict::No, _) => "no",
                (GeneratingVerdict::Unknown(_), false) => "yes",
                (GeneratingVerdict::Unknown(_), true) => "unknown",
            };
            let out = serde_json::json!({
                "generating": verdict_str,
                "triples": if ty.r() == 3 { seeds.len() } else { 0 },
                "tuple_classes": seeds.len(),
                "seeds": seeds
                    .iter()
                    .take(10)
                    .map(|t| t.elems.iter().map(|p| p.image_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Orbits {
            group,
            r#type,
            engine,
            format,
            form_cap,
        } => {
            let engine: Engine = engine.parse()?;
            let session = Session::open(&group)?;
            let ty = RamificationType::parse(&r#type, &session.labeling)?;
            let start = std::time::Instant::now();
            let mut lift_reports = serde_json::Value::Null;
            let (lengths, stored_forms) = match engine {
                Engine::Direct => {
                    let census = braid::braid_orbits(&session.ctx, &ty, form_cap)?;
                    let forms: usize = census.orbits.iter().map(|o| o.total_forms).sum();
                    (census.lengths(), forms)
                }
                Engine::ProjectionFiber => {
                    let setup: QuotientSetup = session.quotient_setup()?;
                    let out = lift::projection_fiber_orbits(&setup, &ty, form_cap, 10_000_000)?;
                    let forms: usize = out
                        .quotient_census
                        .orbits
                        .iter()
                        .map(|o| o.total_forms)
                        .sum();
                    lift_reports = serde_json::json!({
                        "quotient_type": out.quotient_type.display(&setup.m_labeling),
                        "per_orbit": out.reports,
                        "resolutions": out.resolutions,
                    });
                    (out.lengths, forms)
                }
            };
            let elapsed = start.elapsed();
            match format.as_str() {
                "csv" => {
                    println!("orbits,largest,lengths,wall_ms,stored_forms");
                    println!(
                        "{},{},{},{},{}",
                        lengths.len(),
                        lengths.first().copied().unwrap_or(0),
                        lengths
                            .iter()
                            .map(|l| l.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                        elapsed.as_millis(),
                        stored_forms
                    );
                }
                _ => {
                    let mut out = serde_json::json!({
                        "group": session.name,
                        "type": ty.display(&session.labeling),
                        "engine": format!("{engine:?}"),
                        "orbits": lengths.len(),
                        "lengths": lengths,
                        "largest": lengths.first().copied().unwrap_or(0),
                        "wall_ms": elapsed.as_millis(),
                        "stored_forms": stored_forms,
                    });
                    if !lift_reports.is_null() {
                        out["lift"] = lift_reports;
                    }
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
            }
        }
        Command::Run {
            degree,
            genus,
            group,
            engine,
            out,
            format,
            stretch,
        } => {
            let mut config = RunConfig::new(degree, genus);
            config.group = group;
            config.engine = engine.parse()?;
            config.cache_dir = cache_dir;
            config.stretch = stretch;
            let census = pipeline::run_pipeline(&config)?;
            let text = match format.as_str() {
                "json" => emit_json(&census),
                "md" => emit_markdown(&census),
                _ => emit_csv(&census),
            };
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    let file = dir.join(format!("census_d{degree}_g{genus}.{format}"));
                    std::fs::write(&file, &text)?;
                    println!("wrote {}", file.display());
                }
                None => print!("{text}"),
            }
            if !census.unknown.is_empty() {
                eprintln!("# unresolved rows:");
                for (g, t, why) in &census.unknown {
                    eprintln!("#   {g} {t}: {why}");
                }
            }
            eprintln!(
                "# components: {} (by r: {:?})",
                census.total_components(),
                census.totals_by_r()
            );
        }
        Command::Diff { fixture, census } => {
            let fixture_rows = parse_census_csv(&std::fs::read_to_string(&fixture)?)?;
            let census_rows = parse_census_csv(&std::fs::read_to_string(&census)?)?;
            let report = diff_rows(&census_rows, &fixture_rows);
            println!("matched: {}", report.matched);
            for m in &report.mismatched {
                println!("mismatch: {m}");
            }
            for m in &report.missing {
                println!("missing: {m}");
            }
            for m in &report.extra {
                println!("extra: {m}");
            }
            if !report.clean() {
                bail!("census differs from fixture");
            }
        }
    }
    Ok(())
}
