//! `flatfold`: command-line front end.
//!
//! JSON goes to stdout, diagnostics to stderr. Exit status is 0 on success,
//! 1 when the analysis reports a failure and 2 on bad input.

mod output;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use flatfold_core::angle::parse_rational;
use flatfold_core::folding::verify_folding_properties;
use flatfold_core::link::link_of_vertex;
use flatfold_core::rationality::{check_extrational, check_rational, shear_spectrum};
use flatfold_core::witness::{witness_at, SearchParams};
use flatfold_core::{
    check_local_cat0, load_complex, patches, trace, unfold_all, Angle, AngleValue, BranchPolicy,
    EdgeId, Endpoint, FoldError, LinkDirection, Location, TriangleComplex, WitnessError,
};

use output::to_canonical;

#[derive(Parser)]
#[command(name = "flatfold", version, about = "Analysis of piecewise-Euclidean triangle complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Length budget for traces and connection searches.
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// Launch offsets per edge for the connection search.
    #[arg(long, global = true)]
    offsets: Option<usize>,
    /// Longest word checked by the free-subgroup certificate.
    #[arg(long = "word-length", global = true)]
    word_length: Option<usize>,
    /// Numeric tolerance for perpendicular arrivals.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Also write an SVG picture to this path.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a complex; print counts and classification.
    Validate { file: PathBuf },
    /// Link condition at every vertex.
    Check { file: PathBuf },
    /// Vertex links with girth and decomposition.
    Links {
        file: PathBuf,
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Unfold until no link is unfoldable.
    Unfold { file: PathBuf },
    /// Trace a geodesic launched from a point of an edge.
    Trace {
        file: PathBuf,
        /// Edge as `A:B`.
        #[arg(long)]
        edge: String,
        /// Distance from the lower-id end of the edge.
        #[arg(long)]
        offset: f64,
        /// Triangle to launch into, as `A:B:C`.
        #[arg(long)]
        triangle: String,
        /// Launch angle from the high end, in units of π (`1/2` is perpendicular).
        #[arg(long, default_value = "1/2")]
        angle: String,
        /// Follow every branch at branching edges.
        #[arg(long)]
        enumerate: bool,
    },
    /// Patches off the branching locus.
    Patches { file: PathBuf },
    /// Rationality, extrationality and the shear spectrum of each patch.
    Rational { file: PathBuf },
    /// Free-subgroup witness at a thick edge.
    Witness {
        file: PathBuf,
        /// Edge as `A:B`; defaults to the first thick edge.
        #[arg(long)]
        edge: Option<String>,
    },
    /// Draw vertex links or patch developments.
    Render {
        file: PathBuf,
        #[arg(long, value_parser = ["links", "patches"], default_value = "links")]
        what: String,
    },
}

enum Failure {
    Input(String),
    Analysis(String),
}

type Outcome = Result<(String, bool), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn load(path: &Path) -> Result<TriangleComplex, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    load_complex(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_svg(common: &Common, svg: impl FnOnce() -> String) -> Result<(), Failure> {
    if let Some(path) = &common.svg {
        std::fs::write(path, svg()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn report<T: Serialize>(t: &T, ok: bool) -> Outcome {
    Ok((to_canonical(t), ok))
}

fn validate(x: &TriangleComplex) -> Outcome {
    let b = x.branching_locus();
    let label = |e: &EdgeId| x.edge_label(*e);
    report(
        &json!({
            "vertices": x.vertex_count(),
            "edges": x.edge_count(),
            "triangles": x.triangle_count(),
            "euler_characteristic": x.euler_characteristic(),
            "classification": x.classify(),
            "branching_edges": b.edges.iter().map(label).collect::<Vec<_>>(),
        }),
        true,
    )
}

fn links(x: &TriangleComplex, vertex: Option<&str>) -> Outcome {
    let vs = match vertex {
        Some(n) => vec![x.vertex_by_name(n).map_err(input)?],
        None => x.vertices().collect(),
    };
    let out: Vec<_> = vs
        .into_iter()
        .map(|v| {
            let l = link_of_vertex(x, v).expect("vertex exists");
            json!({
                "vertex": x.vertex_name(v),
                "link": l,
                "girth": l.girth(),
                "decomposition": l.decompose(),
                "unfoldable": l.find_unfoldable(),
            })
        })
        .collect();
    report(&out, true)
}

fn unfold(x: &TriangleComplex) -> Outcome {
    let u = unfold_all(x);
    let check = verify_folding_properties(x, &u.result, &u.vertex_map, true);
    let ok = check.is_ok();
    let (props, err) = match check {
        Ok(r) => (Some(r), None),
        Err(FoldError::PropertyViolation(w)) => (None, Some(w)),
        Err(e) => return Err(Failure::Analysis(e.to_string())),
    };
    report(
        &json!({
            "steps": u.steps,
            "result": u.result.to_doc(),
            "properties": props,
            "violation": err,
        }),
        ok,
    )
}

fn trace_cmd(
    x: &TriangleComplex,
    common: &Common,
    edge: &str,
    offset: f64,
    triangle: &str,
    angle: &str,
    enumerate: bool,
) -> Outcome {
    let e = x.parse_edge(edge).map_err(input)?;
    let t = x.parse_triangle(triangle).map_err(input)?;
    let a = Angle::from_pi(parse_rational(angle).map_err(input)?);
    let launch = Endpoint {
        location: Location::Edge { edge: e, offset },
        direction: LinkDirection::Edge {
            triangle: t,
            angle_from_hi: AngleValue::exact(a, x.atom_env()).map_err(input)?,
        },
    };
    let policy = if enumerate {
        BranchPolicy::Enumerate { max_paths: 4096, stop_at: vec![] }
    } else {
        BranchPolicy::Stop
    };
    let paths = trace(x, &launch, common.budget.unwrap_or(10.0), &policy).map_err(input)?;
    write_svg(common, || render::paths_svg(x, &paths))?;
    report(&paths, true)
}

fn rational(x: &TriangleComplex) -> Outcome {
    let r = check_rational(x);
    let ext = check_extrational(x);
    let ok = matches!(&ext, Ok(e) if e.pass);
    let spectra: Vec<_> = patches(x)
        .iter()
        .map(|p| match shear_spectrum(x, p) {
            Ok(s) => json!({ "patch": p.id, "spectrum": s }),
            Err(e) => json!({ "patch": p.id, "error": e.to_string() }),
        })
        .collect();
    let ext = match ext {
        Ok(e) => serde_json::to_value(e).expect("report serializes"),
        Err(e) => json!({ "error": e.to_string() }),
    };
    report(&json!({ "rational": r, "extrational": ext, "spectra": spectra }), ok)
}

fn witness(x: &TriangleComplex, common: &Common, edge: Option<&str>) -> Outcome {
    let e = match edge {
        Some(s) => x.parse_edge(s).map_err(input)?,
        None => x
            .edge_ids()
            .find(|&e| x.edge_degree(e) >= 3)
            .ok_or_else(|| Failure::Analysis("no thick edge".into()))?,
    };
    let mut params = SearchParams::default();
    if let Some(b) = common.budget {
        params.budget = b;
    }
    if let Some(n) = common.offsets {
        params.offsets = n;
    }
    if let Some(t) = common.tolerance {
        params.tolerance = t;
    }
    let n = common.word_length.unwrap_or(4);
    match witness_at(x, e, &params, n) {
        Ok((conns, w)) => {
            report(&json!({ "edge": x.edge_label(e), "connections": conns, "witness": w }), w.complete)
        }
        Err(WitnessError::Geodesic(g)) => Err(input(g)),
        Err(err) => report(&json!({ "edge": x.edge_label(e), "error": err.to_string() }), false),
    }
}

fn run(cli: &Cli) -> Outcome {
    let common = &cli.common;
    match &cli.command {
        Command::Validate { file } => validate(&load(file)?),
        Command::Check { file } => {
            let r = check_local_cat0(&load(file)?);
            report(&r, r.pass)
        }
        Command::Links { file, vertex } => {
            let x = load(file)?;
            write_svg(common, || render::links_svg(&x))?;
            links(&x, vertex.as_deref())
        }
        Command::Unfold { file } => unfold(&load(file)?),
        Command::Trace { file, edge, offset, triangle, angle, enumerate } => {
            trace_cmd(&load(file)?, common, edge, *offset, triangle, angle, *enumerate)
        }
        Command::Patches { file } => {
            let x = load(file)?;
            let ps = patches(&x);
            write_svg(common, || render::patches_svg(&x, &ps))?;
            report(&ps, true)
        }
        Command::Rational { file } => rational(&load(file)?),
        Command::Witness { file, edge } => witness(&load(file)?, common, edge.as_deref()),
        Command::Render { file, what } => {
            let x = load(file)?;
            let svg = if what == "links" { render::links_svg(&x) } else { render::patches_svg(&x, &patches(&x)) };
            match &common.svg {
                Some(_) => write_svg(common, || svg.clone())?,
                None => emit(&svg),
            }
            Ok((String::new(), true))
        }
    }
}

/// Writes to stdout, treating a closed pipe as a normal end of output.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("flatfold: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((out, ok)) => {
            emit(&out);
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("flatfold: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Analysis(msg)) => {
            eprintln!("flatfold: {msg}");
            ExitCode::from(1)
        }
    }
}
