//! Command-line front end. Every subcommand prints a small CSV-style block
//! on stdout; the exit code is nonzero only when a verifier check that was
//! expected to pass fails (or on outright input errors).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use mbtorsion_core::capacity;
use mbtorsion_core::experiments::{
    read_csv, run_sweep, verify_lemma1, verify_prop1, verify_theorem1, write_csv, SweepConfig,
};
use mbtorsion_core::geometry::{DomainSpec, ObstacleSpec};
use mbtorsion_core::heatkernel::{time_grid, HeatKernel};
use mbtorsion_core::mesh::build_mesh;
use mbtorsion_core::operators::assemble_operator;
use mbtorsion_core::radial_oracle::oracle_run;
use mbtorsion_core::solvers::{full_spectrum, lowest_eigenpairs, solve_torsion};

#[derive(Parser)]
#[command(
    name = "mbtorsion",
    version,
    about = "Mixed-boundary torsion laboratory: solvers, diagnostics and verifiers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve -Laplace u = 1 with a reflecting outer boundary and an
    /// absorbing scaled obstacle; print a summary of u.
    Torsion {
        /// Outer domain, e.g. disk:r=1 or square:side=1
        #[arg(long)]
        domain: String,
        /// Unscaled obstacle, e.g. disk:r=1
        #[arg(long)]
        obstacle: String,
        /// Obstacle scale factor
        #[arg(long)]
        eps: f64,
        /// Grid spacing
        #[arg(long)]
        h: f64,
    },
    /// Lowest eigenvalues of the (mixed or reflecting) operator.
    Eigen {
        #[arg(long)]
        domain: String,
        /// Optional obstacle; omit for the pure reflecting spectrum
        #[arg(long)]
        obstacle: Option<String>,
        /// Obstacle scale factor (used only with --obstacle)
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        h: f64,
        /// Number of eigenpairs
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Heat-kernel equilibration diagnostics of a reflecting domain.
    Php {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        h: f64,
        /// Time grid a:b:n in units of the inverse spectral gap
        #[arg(long)]
        tgrid: String,
    },
    /// Grid capacity of an obstacle with box-size extrapolation
    /// (boxes of side box/2 and box).
    Capacity {
        /// Obstacle, e.g. ball:r=1
        #[arg(long)]
        obstacle: String,
        /// Larger computational box side length
        #[arg(long = "box")]
        box_side: f64,
        #[arg(long)]
        h: f64,
    },
    /// Radial reference solve of a concentric configuration.
    Oracle {
        /// Dimension, 2 or 3
        #[arg(long)]
        m: usize,
        /// Inner absorbing radius
        #[arg(long)]
        epsr: f64,
        /// Outer reflecting radius
        #[arg(long = "R", default_value_t = 1.0)]
        r_outer: f64,
        /// Radial grid intervals (Richardson over N and 2N)
        #[arg(long = "N", default_value_t = 4000)]
        n: usize,
    },
    /// Run a sweep described by a JSON config and write rows as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `output` entry
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verifier and exit nonzero if it fails.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Product law on a sweep file: floor, monotone limit, decay rate.
    Theorem1 {
        /// Sweep CSV produced by `mbtorsion sweep`
        #[arg(long = "in")]
        input: PathBuf,
        /// Dimension of the swept configuration
        #[arg(long)]
        m: usize,
    },
    /// Capacity scaling limit on a sweep file of concentric rows.
    Lemma1 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        /// Obstacle capacity coefficient; defaults to the unit ball's
        /// (2*pi in the plane by convention, 4*pi in space)
        #[arg(long)]
        capk: Option<f64>,
        /// Domain measure; defaults to the unit disk/ball
        #[arg(long)]
        vold: Option<f64>,
    },
    /// Equilibration properties of a reflecting planar domain.
    Prop1 {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        h: f64,
    },
}

fn parse_tgrid(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("time grid must look like a:b:n, got {s:?}");
    }
    let a: f64 = parts[0].parse().context("time grid start")?;
    let b: f64 = parts[1].parse().context("time grid end")?;
    let n: usize = parts[2].parse().context("time grid count")?;
    if !(a > 0.0 && b > a && n >= 2) {
        bail!("time grid needs 0 < a < b and n >= 2, got {s:?}");
    }
    Ok((a, b, n))
}

fn run(cmd: Cmd) -> anyhow::Result<bool> {
    match cmd {
        Cmd::Torsion {
            domain,
            obstacle,
            eps,
            h,
        } => {
            let d = DomainSpec::<f64>::parse(&domain)?;
            let k = ObstacleSpec::<f64>::parse(&obstacle)?.scaled(eps)?;
            let mesh = build_mesh(&d, Some(&k), h)?;
            let a = assemble_operator(&mesh);
            let u = solve_torsion(&a, &mesh, 1e-10, None)?;
            println!("sup_u,min_u,active_cells,cg_iterations");
            println!(
                "{:.16e},{:.16e},{},{}",
                u.sup,
                u.min,
                mesh.n_active(),
                u.cg_iterations
            );
            Ok(true)
        }
        Cmd::Eigen {
            domain,
            obstacle,
            eps,
            h,
            k,
        } => {
            let d = DomainSpec::<f64>::parse(&domain)?;
            let scaled = obstacle
                .map(|o| ObstacleSpec::<f64>::parse(&o)?.scaled(eps))
                .transpose()?;
            let mesh = build_mesh(&d, scaled.as_ref(), h)?;
            let a = assemble_operator(&mesh);
            let dec = lowest_eigenpairs(&a, k, 1e-8, 1e-10)?;
            println!("index,lambda,residual");
            for i in 0..k {
                println!(
                    "{i},{:.16e},{:.16e}",
                    dec.eigenvalues[i], dec.residuals[i]
                );
            }
            Ok(true)
        }
        Cmd::Php { domain, h, tgrid } => {
            let (a, b, n) = parse_tgrid(&tgrid)?;
            let d = DomainSpec::<f64>::parse(&domain)?;
            let mesh = build_mesh(&d, None, h)?;
            let op = assemble_operator(&mesh);
            let dec = full_spectrum(&op)?;
            let kernel = HeatKernel::new(dec)?;
            let mu = kernel.spectral_gap();
            let ts = time_grid(a / mu, b / mu, n);
            println!("t,deficit,trace");
            for &t in &ts {
                println!(
                    "{:.16e},{:.16e},{:.16e}",
                    t,
                    kernel.php_deficit(t)?,
                    kernel.trace(t)
                );
            }
            match kernel.fit_php_constants(&ts) {
                Ok(c) => println!(
                    "# t1={:.16e},c1={:.16e},c2={:.16e}",
                    c.t1, c.c1, c.c2
                ),
                Err(e) => println!("# fit unavailable: {e}"),
            }
            Ok(true)
        }
        Cmd::Capacity {
            obstacle,
            box_side,
            h,
        } => {
            let k = ObstacleSpec::<f64>::parse(&obstacle)?;
            let result = capacity::capacity_extrapolated(&k, box_side / 2.0, box_side, h)?;
            println!("value,method,extrapolated");
            println!(
                "{:.16e},{},{:.16e}",
                result.value,
                result.method,
                result
                    .extrapolated
                    .expect("the extrapolating run always fills this field")
            );
            Ok(true)
        }
        Cmd::Oracle {
            m,
            epsr,
            r_outer,
            n,
        } => {
            let run = oracle_run(m, epsr, r_outer, n)?;
            println!("lambda,sup_u,product");
            println!(
                "{:.16e},{:.16e},{:.16e}",
                run.lambda, run.sup_u, run.product
            );
            Ok(true)
        }
        Cmd::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg: SweepConfig =
                serde_json::from_str(&text).context("parsing the sweep config")?;
            let dest = out
                .or_else(|| cfg.output.as_ref().map(PathBuf::from))
                .context("no output path: pass --out or set \"output\" in the config")?;
            let outcome = run_sweep(&cfg)?;
            for f in &outcome.failures {
                eprintln!("failed: eps={} path={}: {}", f.epsilon, f.path, f.message);
            }
            write_csv(&dest, &outcome.rows)?;
            println!(
                "wrote {} rows ({} failures) to {}",
                outcome.rows.len(),
                outcome.failures.len(),
                dest.display()
            );
            Ok(true)
        }
        Cmd::Verify { what } => {
            let report = match what {
                VerifyCmd::Theorem1 { input, m } => verify_theorem1(&read_csv(&input)?, m),
                VerifyCmd::Lemma1 {
                    input,
                    m,
                    capk,
                    vold,
                } => {
                    let pi = std::f64::consts::PI;
                    let (capk_default, vold_default) = if m == 2 {
                        (2.0 * pi, pi)
                    } else {
                        (4.0 * pi, 4.0 / 3.0 * pi)
                    };
                    verify_lemma1(
                        &read_csv(&input)?,
                        m,
                        capk.unwrap_or(capk_default),
                        vold.unwrap_or(vold_default),
                    )?
                }
                VerifyCmd::Prop1 { domain, h } => {
                    let d = DomainSpec::<f64>::parse(&domain)?;
                    verify_prop1(&d, h)?
                }
            };
            print!("{report}");
            Ok(report.pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
