use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hermite_g1::diagnostics::Sphericity;
use hermite_g1::io::{export_obj, load_network_json, FormatError, NetworkInput};
use hermite_g1::mesh::{
    edge_topology, tessellate_network, weld, EdgeTopology, TessellateError, Tessellation, WELD_TOL,
};
use hermite_g1::network::{
    demo_cube, NetworkError, NetworkOptions, NetworkReport, SolvedNetwork, TwistPolicy,
};
use hermite_g1::{ExecutionMode, TriangleMesh};

#[derive(Parser)]
#[command(
    name = "hermite-g1",
    version,
    about = "G1 bicubic Hermite patch networks over quad meshes"
)]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json_report: bool,
    /// Solve corners and tessellate patches on all cores.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TwistArg {
    Zero,
    Adini,
}

#[derive(Subcommand)]
enum Command {
    /// Valence-3 cube demo with radial corner normals.
    DemoCube {
        /// OBJ output path.
        #[arg(long)]
        out: PathBuf,
        /// Quads per patch side in the tessellation.
        #[arg(long, default_value_t = 16)]
        res: usize,
        /// Seed tangent length as a multiple of the edge chord.
        #[arg(long, default_value_t = 1.0)]
        chord_scale: f64,
        #[arg(long, value_enum, default_value_t = TwistArg::Zero)]
        twist: TwistArg,
        /// Half edge length of the cube.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Merge coincident boundary vertices in the OBJ.
        #[arg(long)]
        weld: bool,
    },
    /// Solve a JSON network and export the tessellation.
    Solve {
        /// Network JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// OBJ output path.
        #[arg(long)]
        out: PathBuf,
        /// Quads per patch side in the tessellation.
        #[arg(long, default_value_t = 16)]
        res: usize,
        /// Merge coincident boundary vertices in the OBJ.
        #[arg(long)]
        weld: bool,
    },
    /// Check corner residuals and shared-edge gaps of a solved JSON network.
    Verify {
        /// Network JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Samples per shared edge.
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
    /// Evaluate one patch at a parameter point.
    Eval {
        /// Network JSON file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Face index in input order.
        #[arg(long)]
        face: usize,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        v: f64,
    },
}

struct Failure {
    category: &'static str,
    code: u8,
    detail: String,
}

impl Failure {
    fn input(category: &'static str, detail: impl ToString) -> Self {
        Self {
            category,
            code: 2,
            detail: detail.to_string(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { .. } => Failure::input("io", e),
            FormatError::Parse { .. } => Failure::input("parse", e),
            FormatError::Schema(_) => Failure::input("schema", e),
            FormatError::Network(n) => n.into(),
        }
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::Corner { .. } | NetworkError::Face { .. } => Failure::input("solve", e),
            _ => Failure::input("network", e),
        }
    }
}

impl From<TessellateError> for Failure {
    fn from(e: TessellateError) -> Self {
        match e {
            TessellateError::Resolution(_) => Failure::input("usage", e),
            TessellateError::NoValidNormal => Failure {
                category: "internal",
                code: 3,
                detail: e.to_string(),
            },
        }
    }
}

const VIOLATION: u8 = 1;

fn mode(cli: &Cli) -> ExecutionMode {
    if cli.parallel {
        ExecutionMode::Parallel
    } else {
        ExecutionMode::Sequential
    }
}

fn load(path: &Path, mode: ExecutionMode) -> Result<(NetworkInput, SolvedNetwork), Failure> {
    let input = load_network_json(path)?;
    let net = input.build()?;
    let options = NetworkOptions {
        mode,
        ..input.options
    };
    let solved = net.solve(&options)?;
    Ok((input, solved))
}

fn tessellate_all(
    solved: &SolvedNetwork,
    res: usize,
    mode: ExecutionMode,
) -> Result<Vec<Tessellation>, Failure> {
    let tess = tessellate_network(solved, res, mode)?;
    for (f, t) in tess.iter().enumerate() {
        for w in &t.warnings {
            eprintln!(
                "warning: face {f} grid point ({}, {}) has degenerate tangents, normal taken from ({}, {})",
                w.i, w.j, w.borrowed_from.0, w.borrowed_from.1
            );
        }
    }
    Ok(tess)
}

fn write_meshes(
    out: &Path,
    tess: &[Tessellation],
    welded: Option<&TriangleMesh>,
) -> Result<(), Failure> {
    let meshes: Vec<TriangleMesh> = match welded {
        Some(w) => vec![w.clone()],
        None => tess.iter().map(|t| t.mesh.clone()).collect(),
    };
    export_obj(&meshes, out).map_err(|e| Failure::input("io", e))
}

fn print_report(report: &NetworkReport) {
    for c in &report.corners {
        println!(
            "corner {:>4}  valence {}  residual u {:.3e}  v {:.3e}  {}",
            c.corner,
            c.valence,
            c.residuals.max_u,
            c.residuals.max_v,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    for e in &report.edges {
        println!(
            "edge ({:>4}, {:>4})  faces ({}, {})  c0 gap {:.3e}  max normal angle {:.6e} rad  {}",
            e.corners.0,
            e.corners.1,
            e.faces.0,
            e.faces.1,
            e.c0_gap,
            e.max_normal_angle,
            if e.passed { "ok" } else { "FAIL" }
        );
    }
    println!(
        "max corner residual {:.3e} (tol {:.0e}), max c0 gap {:.3e} (tol {:.3e}), max normal angle {:.6e} rad",
        report.max_corner_residual, report.residual_tol, report.max_c0_gap, report.c0_tol, report.max_normal_angle
    );
    println!(
        "invariants: {}",
        if report.passed { "PASS" } else { "FAIL" }
    );
}

fn print_topology(topo: &EdgeTopology) {
    println!(
        "welded mesh: {} edges, {} boundary, {} non-manifold, {} inconsistent -> {}",
        topo.edges,
        topo.boundary_edges,
        topo.non_manifold_edges,
        topo.inconsistent_edges,
        if topo.is_watertight() {
            "watertight"
        } else {
            "open"
        }
    );
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let mode = mode(cli);
    match &cli.command {
        Command::DemoCube {
            out,
            res,
            chord_scale,
            twist,
            scale,
            weld: weld_out,
        } => {
            if !(*scale > 0.0 && scale.is_finite()) {
                return Err(Failure::input(
                    "usage",
                    format!("--scale must be positive, got {scale}"),
                ));
            }
            let twist = match twist {
                TwistArg::Zero => TwistPolicy::Zero,
                TwistArg::Adini => TwistPolicy::Adini,
            };
            let options = NetworkOptions {
                chord_scale: *chord_scale,
                twist,
                mode,
                ..Default::default()
            };
            let solved = demo_cube(*scale).solve(&options)?;
            let report = solved.verify(33, mode);
            let tess = tessellate_all(&solved, *res, mode)?;
            let merged = TriangleMesh::merged(tess.iter().map(|t| &t.mesh));
            let welded = weld(&merged, WELD_TOL * scale);
            let topo = edge_topology(&welded);
            let sphere = Sphericity::measure(&solved, &merged, 3f64.sqrt() * scale);
            write_meshes(out, &tess, weld_out.then_some(&welded))?;

            if cli.json_report {
                let v = json!({ "report": report, "topology": topo, "sphericity": sphere, "vertices": merged.vertices.len() });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("report serializes")
                );
            } else {
                print_report(&report);
                print_topology(&topo);
                println!(
                    "sphericity: target radius {:.9}, radius range [{:.9}, {:.9}], relative deviation [{:+.6e}, {:+.6e}]",
                    sphere.target_radius, sphere.min_radius, sphere.max_radius, sphere.min_rel_deviation, sphere.max_rel_deviation
                );
                let mid: Vec<String> = sphere
                    .mid_face_rel_deviation
                    .iter()
                    .map(|d| format!("{d:+.6e}"))
                    .collect();
                println!("mid-face relative deviation: {}", mid.join(" "));
                println!(
                    "corner radius deviation: {:.3e}",
                    sphere.corner_abs_deviation
                );
                println!(
                    "wrote {} ({} vertices)",
                    out.display(),
                    if *weld_out {
                        welded.vertices.len()
                    } else {
                        merged.vertices.len()
                    }
                );
            }
            Ok(if report.passed && topo.is_watertight() {
                0
            } else {
                VIOLATION
            })
        }
        Command::Solve {
            input,
            out,
            res,
            weld: weld_out,
        } => {
            let (_, solved) = load(input, mode)?;
            let tess = tessellate_all(&solved, *res, mode)?;
            let welded = weld_out.then(|| {
                let merged = TriangleMesh::merged(tess.iter().map(|t| &t.mesh));
                weld(&merged, WELD_TOL * solved.network.model_scale())
            });
            write_meshes(out, &tess, welded.as_ref())?;
            let report = solved.verify(33, mode);
            if cli.json_report {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                println!(
                    "solved {} corners, {} patches; max corner residual {:.3e}, max c0 gap {:.3e}",
                    solved.corners.len(),
                    solved.patches.len(),
                    report.max_corner_residual,
                    report.max_c0_gap
                );
                println!("wrote {}", out.display());
            }
            Ok(0)
        }
        Command::Verify { input, samples } => {
            let (_, solved) = load(input, mode)?;
            let report = solved.verify(*samples, mode);
            if cli.json_report {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                print_report(&report);
            }
            Ok(if report.passed { 0 } else { VIOLATION })
        }
        Command::Eval { input, face, u, v } => {
            let (_, solved) = load(input, mode)?;
            let g = solved.patches.get(*face).ok_or_else(|| {
                Failure::input(
                    "usage",
                    format!("face {face} out of range ({} faces)", solved.patches.len()),
                )
            })?;
            let (p, pu, pv) = (g.eval(*u, *v), g.partial_u(*u, *v), g.partial_v(*u, *v));
            let n = g.unit_normal(*u, *v);
            if cli.json_report {
                let v = json!({
                    "position": p, "partial_u": pu, "partial_v": pv,
                    "normal": n.as_ref().ok(), "normal_error": n.as_ref().err().map(|e| e.to_string()),
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("report serializes")
                );
            } else {
                let fmt = |x: &hermite_g1::Vec3| format!("{:.17e} {:.17e} {:.17e}", x.x, x.y, x.z);
                println!("position  {}", fmt(&p));
                println!("partial_u {}", fmt(&pu));
                println!("partial_v {}", fmt(&pv));
                match n {
                    Ok(n) => println!("normal    {}", fmt(&n)),
                    Err(e) => println!("normal    undefined ({e})"),
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error[{}]: {}", f.category, f.detail);
            ExitCode::from(f.code)
        }
    }
}
