use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use octacover::coverage::{certify_covering, CoverageStatus};
use octacover::density::{density, multiplicity_excess, origin_anchor, theorem_report, CaseUsed};
use octacover::io::{read_lattice, read_polytope, read_translates, write_translates};
use octacover::octahedron::{
    covering_lattice_nine_eighths, neighbor_set, parallelohedron_p, verify_basic_facts, LatticeBasis,
    TranslateSet,
};
use octacover::overlap::{config_lower_bound, exact_pair_volume, pair_bound_floor};
use octacover::scalar::{dual_format, format_rational, parse_rational, rational_to_f64};
use octacover::search::{lattice_density_with_step, minimize_density, InitialState, SearchParams};
use octacover::slice::{find_good_height, slice};
use octacover::{Polytope3, Rational, Vec3};

#[derive(Parser, Debug)]
#[command(name = "octacover", version, about = "Exact tools for translative coverings of space by octahedra")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "OCTACOVER_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the basic volume and containment identities.
    VerifyFacts(OutArg),
    /// Exact volume of (C3 + xi) ∩ (C3 + xj).
    PairVolume {
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        xj: String,
    },
    /// Classify two slices at height z0 and print the closed-form bound.
    PairBound {
        /// Anchor translate, x,y,z
        #[arg(long, allow_hyphen_values = true)]
        anchor: String,
        /// Second translate, x,y,z
        #[arg(long, allow_hyphen_values = true)]
        other: String,
        /// Slicing height
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
    },
    /// Good height for the neighbours of the translate containing the origin.
    GoodHeight(InputArg),
    /// Certify that the translates cover a region (default P).
    Certify {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        region: RegionArg,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Density of the translates inside a region (default P).
    Density {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        region: RegionArg,
        /// Also certify and report the pairwise-overlap decomposition.
        #[arg(long)]
        excess: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Certify, measure and localize; exits 1 unless θ ≥ 1 + 4/6^10.
    Theorem {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Anneal towards a thin covering of P.
    Search(SearchArgs),
    /// Density of a lattice covering.
    Lattice {
        /// Lattice JSON; default is the 9/8 covering lattice.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Scale the basis by this factor.
        #[arg(long, default_value = "1")]
        scale: String,
        /// Region JSON; default is the fundamental cell.
        #[arg(long)]
        region: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArg,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct InputArg {
    /// Translates JSON, {"translates": [[x,y,z], ...]}.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct RegionArg {
    /// Region JSON, {"vertices": [...]}; default is P.
    #[arg(long)]
    region: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArg {
    /// Grid step h for covering certification.
    #[arg(long, default_value = "1/32")]
    grid: String,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Starting translates; default is the 9/8 lattice.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "1/8")]
    grid: String,
    #[arg(long, default_value = "1/4")]
    step: String,
    #[arg(long, default_value_t = 0.9997)]
    step_decay: f64,
    #[arg(long, default_value_t = 2e-4)]
    temp: f64,
    #[arg(long, default_value_t = 0.9995)]
    temp_decay: f64,
    #[arg(long, default_value_t = 0.25)]
    delete_probability: f64,
    /// Best state as translates JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// θ against iteration, for plotting.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn rational_arg(s: &str, what: &str) -> Result<Rational> {
    parse_rational(s.trim()).with_context(|| format!("invalid {what} {s:?}"))
}

fn vec_arg(s: &str, what: &str) -> Result<Vec3> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        bail!("{what} must be three comma-separated numbers, got {s:?}");
    }
    Ok(Vec3::new(
        rational_arg(parts[0], what)?,
        rational_arg(parts[1], what)?,
        rational_arg(parts[2], what)?,
    ))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn translates(path: &Path) -> Result<TranslateSet> {
    read_translates(&read(path)?).with_context(|| format!("bad translates file {}", path.display()))
}

fn region(arg: &RegionArg) -> Result<Polytope3> {
    match &arg.region {
        Some(p) => read_polytope(&read(p)?).with_context(|| format!("bad region file {}", p.display())),
        None => Ok(parallelohedron_p()),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit<T: Serialize>(out: &OutArg, value: &T) -> Result<()> {
    if let Some(path) = &out.out {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        write(path, &text)?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::VerifyFacts(out) => {
            let report = verify_basic_facts();
            for c in &report.checks {
                let mark = if c.pass { "ok  " } else { "FAIL" };
                println!("{mark} {:<18} {}", c.name, c.computed);
            }
            emit(&out, &report)?;
            Ok(report.all_pass())
        }
        Command::PairVolume { xi, xj } => {
            let v = exact_pair_volume(&vec_arg(&xi, "--xi")?, &vec_arg(&xj, "--xj")?);
            println!("{}", dual_format(&v));
            Ok(true)
        }
        Command::PairBound { anchor, other, z0 } => {
            let z0 = rational_arg(&z0, "--z0")?;
            let (xa, xk) = (vec_arg(&anchor, "--anchor")?, vec_arg(&other, "--other")?);
            let (Some(a), Some(k)) = (slice(&xa, &z0, 0), slice(&xk, &z0, 1)) else {
                bail!("both translates must meet the plane z = {}", format_rational(&z0));
            };
            let b = config_lower_bound(&a, &k)?;
            let exact = exact_pair_volume(&xa, &xk);
            println!("configuration {:?}, covered vertices {}", b.config.kind, b.config.covered_vertices);
            println!("certificate   {:?}", b.certificate);
            println!("bound         {}", dual_format(&b.value));
            println!("exact volume  {}", dual_format(&exact));
            println!("in window     {}", b.in_window);
            Ok(b.value <= exact)
        }
        Command::GoodHeight(input) => {
            let x = translates(&input.input)?;
            let anchor = origin_anchor(&x)?;
            let n = neighbor_set(&x, anchor)?;
            match find_good_height(&n) {
                Ok(z) => {
                    println!("anchor {anchor}, m = {}, z0 = {}", n.len() - 1, dual_format(&z));
                    Ok(true)
                }
                Err(octacover::Error::NoFeasibleHeight) => {
                    println!("anchor {anchor}, m = {}: no good height", n.len() - 1);
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Certify { input, region: r, grid, out } => {
            let x = translates(&input.input)?;
            let cert = certify_covering(&x, &region(&r)?, &rational_arg(&grid.grid, "--grid")?)?;
            match &cert.status {
                CoverageStatus::Certified => println!("certified ({} cells, {} by margin)", cert.cells_checked, cert.margin_cells),
                CoverageStatus::Gap { gap_cells, witnesses } => {
                    println!("gap: {gap_cells} of {} cells", cert.cells_checked);
                    for w in witnesses {
                        println!("  uncovered point {w}");
                    }
                }
            }
            emit(&out, &cert)?;
            Ok(cert.is_certified())
        }
        Command::Density { input, region: r, excess, out } => {
            let x = translates(&input.input)?;
            let region = region(&r)?;
            let theta = density(&x, &region);
            println!("theta {}", dual_format(&theta));
            if excess {
                let m = multiplicity_excess(&x, &region)?;
                println!("excess        {}", dual_format(&m.excess));
                println!("pairwise sum  {}", dual_format(&m.pairwise_sum));
                println!("residue       {}", dual_format(&m.residue));
                emit(&out, &serde_json::json!({ "theta": format_rational(&theta), "theta_float": rational_to_f64(&theta), "excess": m }))?;
            } else {
                emit(&out, &serde_json::json!({ "theta": format_rational(&theta), "theta_float": rational_to_f64(&theta) }))?;
            }
            Ok(true)
        }
        Command::Theorem { input, grid, out } => {
            let x = translates(&input.input)?;
            let r = theorem_report(&x, &rational_arg(&grid.grid, "--grid")?)?;
            println!("theta         {}", dual_format(&r.theta));
            println!("covered       {}", r.coverage.as_ref().is_some_and(|c| c.certified));
            println!("case          {:?}", r.case_used);
            if let (Some(a), Some(m)) = (r.anchor, r.m) {
                println!("anchor        {a} (m = {m})");
            }
            if let Some(z) = &r.good_height {
                println!("good height   {}", dual_format(z));
            }
            if r.case_used == CaseUsed::Case2 {
                let best = r.certificates.iter().map(|c| c.proven()).max();
                if let Some(b) = best {
                    println!("best overlap  {} (floor {})", dual_format(&b), dual_format(&pair_bound_floor()));
                }
            }
            if let Some(b) = &r.lower_bound {
                println!("lower bound   {}", dual_format(b));
            }
            println!("bound         {}", dual_format(&r.theorem_bound));
            println!("satisfied     {}", r.bound_satisfied);
            if let Some(n) = &r.note {
                println!("note          {n}");
            }
            emit(&out, &r)?;
            Ok(r.bound_satisfied)
        }
        Command::Search(a) => {
            let initial = match &a.input {
                Some(p) => InitialState::Set(translates(p)?),
                None => InitialState::Lattice,
            };
            let params = SearchParams {
                initial,
                iterations: a.iters,
                step0: rational_arg(&a.step, "--step")?,
                step_decay: a.step_decay,
                temp0: a.temp,
                temp_decay: a.temp_decay,
                delete_probability: a.delete_probability,
                grid_step: rational_arg(&a.grid, "--grid")?,
                seed: a.seed,
            };
            let t = minimize_density(&params)?;
            println!("initial theta {}", dual_format(&t.initial_theta));
            println!("best theta    {} at iteration {}", dual_format(&t.best_theta), t.best_iteration);
            println!("translates    {}", t.best.len());
            println!("accepted      {} of {}", t.accepted_count(), t.records.len());
            if let Some(p) = &a.out {
                write(p, &write_translates(&t.best))?;
            }
            if let Some(p) = &a.trace {
                write(p, &t.to_csv())?;
            }
            if let Some(p) = &a.plot {
                write(p, &t.plot_data())?;
            }
            Ok(t.best_theta >= octacover::density::theorem_bound())
        }
        Command::Lattice { input, scale, region, grid, out } => {
            let basis: LatticeBasis = match &input {
                Some(p) => read_lattice(&read(p)?).with_context(|| format!("bad lattice file {}", p.display()))?,
                None => covering_lattice_nine_eighths(),
            };
            let basis = basis.scaled(&rational_arg(&scale, "--scale")?)?;
            let region = match &region {
                Some(p) => read_polytope(&read(p)?)?,
                None => basis.fundamental_cell(),
            };
            match lattice_density_with_step(&basis, &region, &rational_arg(&grid.grid, "--grid")?) {
                Ok(d) => {
                    println!("determinant   {}", dual_format(basis.determinant()));
                    println!("density       {}", dual_format(&d.intrinsic));
                    println!("in region     {} ({} translates)", dual_format(&d.region_value), d.translates);
                    emit(&out, &d)?;
                    Ok(true)
                }
                Err(octacover::Error::NotACovering { gaps }) => {
                    println!("not a covering: {gaps} gap cells");
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}
