use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aniso_torsion::experiments::{
    run_bound_matrix, run_convergence, run_rectangle_limit, run_triangle_limit, ExperimentConfig,
};
use aniso_torsion::Result;

#[derive(Parser)]
#[command(
    name = "aniso-torsion",
    version,
    about = "Anisotropic p-torsion rigidity, torsion maximum and inradius for convex planar bodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// plain key=value config file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// norm spec: euclidean | lr:r=<f>,w=<f,f> | quad:q11=<f>,q12=<f>,q22=<f> | rot:angle=<rad>,base=<spec>
    #[arg(long)]
    norm: Option<String>,
    /// comma-separated exponents, each > 1
    #[arg(long)]
    p: Option<String>,
    /// target mesh size
    #[arg(long)]
    h: Option<f64>,
    /// output directory for CSV tables and JSON summaries
    #[arg(long)]
    out: Option<PathBuf>,
    /// slack for bound checks
    #[arg(long)]
    tol: Option<f64>,
    /// relative regularization parameter for the solver
    #[arg(long)]
    delta: Option<f64>,
    /// Newton iteration cap
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// continuation in p: on|off
    #[arg(long, value_parser = ["on", "off"])]
    continuation: Option<String>,
    /// seed for the random convex hull
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Thinning rectangles: Psi increases to its sharp limit 1/(q+1)
    RectLimit {
        #[command(flatten)]
        common: Common,
        /// comma-separated decreasing half-thicknesses
        #[arg(long)]
        eps: Option<String>,
        /// rectangle half-length
        #[arg(long = "rect-a")]
        rect_a: Option<f64>,
        /// cells across the short side of the structured mesh
        #[arg(long)]
        nx: Option<usize>,
    },
    /// Thinning isosceles triangles: Phi decreases to 1/3 (euclidean, p=2)
    TriangleLimit {
        #[command(flatten)]
        common: Common,
        /// comma-separated triangle parameters in (0, 1/sqrt 2)
        #[arg(long)]
        a: Option<String>,
    },
    /// Full shape x norm x p matrix of bound checks; exits nonzero on failure
    BoundMatrix {
        #[command(flatten)]
        common: Common,
    },
    /// Discrete rigidity vs the closed form on nested Wulff meshes
    Convergence {
        #[command(flatten)]
        common: Common,
        /// number of uniform refinements
        #[arg(long)]
        levels: Option<usize>,
    },
}

fn build_config(common: &Common, extra: &[(&str, Option<String>)]) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let overrides: Vec<(&str, Option<String>)> = vec![
        ("norm", common.norm.clone()),
        ("p", common.p.clone()),
        ("h", common.h.map(|v| v.to_string())),
        ("tol", common.tol.map(|v| v.to_string())),
        ("delta", common.delta.map(|v| v.to_string())),
        ("max-iters", common.max_iters.map(|v| v.to_string())),
        ("continuation", common.continuation.clone()),
        ("seed", common.seed.map(|v| v.to_string())),
    ];
    for (key, value) in overrides.iter().chain(extra) {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(out) = &common.out {
        cfg.out_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::RectLimit {
            common,
            eps,
            rect_a,
            nx,
        } => {
            let cfg = build_config(
                &common,
                &[
                    ("eps", eps),
                    ("rect-a", rect_a.map(|v| v.to_string())),
                    ("nx", nx.map(|v| v.to_string())),
                ],
            )?;
            let rows = run_rectangle_limit(&cfg)?;
            println!(
                "{:>10} {:>14} {:>12} {:>12} {:>12}  status",
                "eps", "T_p", "R_F", "Psi", "deficit"
            );
            let mut ok = true;
            for r in &rows {
                println!(
                    "{:>10.4} {:>14.6e} {:>12.6} {:>12.8} {:>12.4e}  {}",
                    r.eps, r.t, r.r_f, r.psi, r.deficit, r.status
                );
                ok &= r.status == "ok";
            }
            Ok(ok)
        }
        Command::TriangleLimit { common, a } => {
            let cfg = build_config(&common, &[("a", a)])?;
            let rows = run_triangle_limit(&cfg)?;
            println!(
                "{:>8} {:>12} {:>14} {:>12} {:>12} {:>10}  status",
                "a", "Phi", "T_2", "M", "M(E_a)", "ratio"
            );
            let mut ok = true;
            for r in &rows {
                println!(
                    "{:>8.4} {:>12.8} {:>14.6e} {:>12.6e} {:>12.6e} {:>10.6}  {}",
                    r.a, r.phi, r.t, r.m, r.m_ellipse, r.ratio, r.status
                );
                ok &= r.status == "ok";
            }
            Ok(ok)
        }
        Command::BoundMatrix { common } => {
            let cfg = build_config(&common, &[])?;
            let (rows, all_pass) = run_bound_matrix(&cfg)?;
            println!(
                "{:<12} {:<12} {:>4} {:>12} {:>12} {:>6}  status",
                "shape", "norm", "p", "Phi", "Psi", "pass"
            );
            for r in &rows {
                let (phi, psi) = r
                    .report
                    .as_ref()
                    .map(|x| (x.phi, x.psi))
                    .unwrap_or((f64::NAN, f64::NAN));
                println!(
                    "{:<12} {:<12} {:>4} {:>12.8} {:>12.8} {:>6}  {}",
                    r.shape, r.norm, r.p, phi, psi, r.pass, r.status
                );
            }
            println!(
                "{} rows, {}",
                rows.len(),
                if all_pass { "all pass" } else { "FAILURES" }
            );
            Ok(all_pass)
        }
        Command::Convergence { common, levels } => {
            let cfg = build_config(&common, &[("levels", levels.map(|v| v.to_string()))])?;
            let rows = run_convergence(&cfg)?;
            println!("{:>12} {:>16} {:>12} {:>8}", "h", "T_h", "rel_error", "order");
            for r in &rows {
                println!(
                    "{:>12.6} {:>16.10e} {:>12.4e} {:>8.3}",
                    r.h, r.t, r.rel_error, r.order
                );
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
