//! Command-line front end. Exit code 0 only when every asserted invariant
//! of the invoked operation passes.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use qmgeo::campaign::{run_campaign, CampaignConfig};
use qmgeo::chain::desnowflake;
use qmgeo::cube::fuzz_length_volume;
use qmgeo::gen::{generate, Generated, GeneratorSpec};
use qmgeo::group::{
    conformal_elevator, entropy, limit_set_sample, orbit_ball, parse_group_spec, BoundaryPoint,
};
use qmgeo::hyperbolic::{
    four_point_delta, gromov_products, visual_metric, BasedSpace, BoundarySample, BoundarySource,
};
use qmgeo::io::{read_gromov_matrix, read_metric_input, save_report, write_point_cloud};
use qmgeo::metric::Validation;
use qmgeo::plot::emit_plot_data;
use qmgeo::{Error, Result};

#[derive(Parser)]
#[command(name = "qmgeo", version, about = "desk-scale metric geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic space (point cloud CSV) or validate a group preset.
    Gen {
        /// circle_snowflake | sphere_snowflake | koch_curve | euclidean_cloud |
        /// tree_metric | schottky | psl2z | cyclic
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        level: u32,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain-metric de-snowflake report over a k window.
    Desnowflake {
        #[arg(long)]
        input: PathBuf,
        /// Snowflake the ingested metric by this exponent first (clouds are
        /// read with their Euclidean metric).
        #[arg(long)]
        metric_pow: Option<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        kmin: u32,
        #[arg(long)]
        kmax: u32,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Length-volume fuzzing over random box covers.
    CubeCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        instances: usize,
        #[arg(long, default_value_t = 200)]
        max_sets: usize,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Four-point hyperbolicity defect of a distance matrix.
    Hyperbolicity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        base: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Visual quasi-metric report from a Gromov-product matrix.
    Visual {
        #[arg(long)]
        gromov: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Orbit ball of a group preset.
    Orbit {
        #[arg(long)]
        group: String,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long, default_value_t = 400)]
        cap: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Entropy fit over a window of an orbit report.
    Entropy {
        #[arg(long)]
        orbit: PathBuf,
        /// lo:hi
        #[arg(long)]
        window: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conformal elevator certificate at (p, r, L).
    Elevator {
        #[arg(long)]
        group: String,
        /// Boundary base point as a fraction of the circle.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long = "L")]
        l: f64,
        #[arg(long, default_value_t = 6)]
        budget: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a campaign config.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Project a report JSON onto a flat CSV view.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        view: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            eps,
            level,
            dim,
            radius,
            length,
            seed,
            out,
        } => {
            let spec = match kind.as_str() {
                "circle_snowflake" => GeneratorSpec::CircleSnowflake { n, eps },
                "sphere_snowflake" => GeneratorSpec::SphereSnowflake { n, eps, seed },
                "koch_curve" => GeneratorSpec::KochCurve { level },
                "euclidean_cloud" => GeneratorSpec::EuclideanCloud { n, dim, seed },
                "tree_metric" => GeneratorSpec::TreeMetric { n, seed },
                "schottky" => GeneratorSpec::Schottky { radius },
                "psl2z" => GeneratorSpec::Psl2z,
                "cyclic" => GeneratorSpec::Cyclic { length },
                other => {
                    return Err(Error::parameter(format!("unknown generator kind '{other}'")))
                }
            };
            match generate(&spec)? {
                Generated::Space(s) => {
                    let path = out.ok_or_else(|| {
                        Error::parameter("space generators need --out for the CSV")
                    })?;
                    if s.coords().is_some() {
                        write_point_cloud(&path, &s)?;
                    } else {
                        qmgeo::io::write_distance_matrix(&path, &s)?;
                    }
                    eprintln!("wrote {} points to {}", s.len(), path.display());
                }
                Generated::Model(m) => {
                    eprintln!(
                        "group '{}' valid: {} generators (closed under inverses)",
                        m.label(),
                        m.generators().len()
                    );
                }
            }
            Ok(())
        }
        Command::Desnowflake {
            input,
            metric_pow,
            eps,
            kmin,
            kmax,
            pairs,
            seed,
            out,
        } => {
            let space = Arc::new(read_metric_input(&input, metric_pow, Validation::Off)?);
            let report = desnowflake(space, eps, (kmin, kmax), pairs, seed)?;
            save_report(&out, "desnowflake", Some(seed), &report)?;
            eprintln!(
                "band [{:.4}, {:.4}] ratio {:.3} over k in {:?}",
                report.band.0,
                report.band.1,
                report.band_ratio(),
                report.k_window
            );
            Ok(())
        }
        Command::CubeCheck {
            n,
            instances,
            max_sets,
            grid,
            seed,
            out,
        } => {
            let report = fuzz_length_volume(n, instances, max_sets, seed, grid)?;
            save_report(&out, "cube_fuzz", Some(seed), &report)?;
            eprintln!(
                "{} instances, {} violations, {} retries",
                report.instances.len(),
                report.violations.len(),
                report.retries
            );
            if !report.all_hold() {
                return Err(Error::Invariant(
                    "length-volume inequality violated; dump written".into(),
                ));
            }
            Ok(())
        }
        Command::Hyperbolicity { input, base, out } => {
            let space = Arc::new(read_metric_input(&input, None, Validation::Auto)?);
            let based = BasedSpace::new(space.clone(), base)?;
            let table = gromov_products(&based);
            table.verify_bounds(1e-9 * space.diam())?;
            let delta = four_point_delta(&table);
            save_report(
                &out,
                "hyperbolicity",
                None,
                &serde_json::json!({ "base": base, "points": space.len(), "delta": delta }),
            )?;
            eprintln!("delta = {delta}");
            Ok(())
        }
        Command::Visual { gromov, eps, out } => {
            let (n, vals) = read_gromov_matrix(&gromov)?;
            let sample = BoundarySample::new(
                (0..n).map(|i| format!("b{i}")).collect(),
                vals,
                BoundarySource::Analytic,
            )?;
            let report = visual_metric(&sample, eps)?;
            save_report(&out, "visual", None, &report)?;
            eprintln!(
                "K = {:.4}, applicable = {}",
                report.k_fitted, report.applicable
            );
            Ok(())
        }
        Command::Orbit {
            group,
            radius,
            cap,
            seed,
            out,
        } => {
            let model = parse_group_spec(&group)?;
            let orbit = orbit_ball(&model, radius, cap)?;
            save_report(
                &out,
                "orbit",
                Some(seed),
                &serde_json::json!({
                    "group": group,
                    "radius": orbit.radius,
                    "grid": orbit.grid,
                    "truncated": orbit.truncated,
                    "points": orbit.dists.len(),
                }),
            )?;
            eprintln!(
                "{} orbit points within R = {radius}{}",
                orbit.dists.len(),
                if orbit.truncated { " (truncated)" } else { "" }
            );
            Ok(())
        }
        Command::Entropy { orbit, window, out } => {
            let text = std::fs::read_to_string(&orbit)?;
            let report: serde_json::Value = serde_json::from_str(&text)?;
            let payload = &report["payload"];
            let grid: Vec<(f64, usize)> = serde_json::from_value(payload["grid"].clone())
                .map_err(|e| Error::Parse(format!("orbit report grid: {e}")))?;
            let truncated = payload["truncated"].as_bool().unwrap_or(true);
            let radius = payload["radius"].as_f64().unwrap_or(0.0);
            let ob = qmgeo::group::OrbitBall {
                radius,
                margin: 0.0,
                word_cap: 0,
                dists: Vec::new(),
                grid,
                grid_step: 0.25,
                truncated,
                words_expanded: 0,
            };
            let (lo, hi) = parse_window(&window)?;
            let est = entropy(&ob, (lo, hi))?;
            if let Some(path) = out {
                save_report(&path, "entropy", None, &est)?;
            }
            eprintln!("slope = {:.4} +- {:.4}", est.slope, est.stderr);
            Ok(())
        }
        Command::Elevator {
            group,
            p,
            r,
            l,
            budget,
            seed,
            out,
        } => {
            let model = parse_group_spec(&group)?;
            let p_angle = p * std::f64::consts::TAU;
            // sample the limit set; for circle-filling groups add a local
            // cluster so the recipe scales stay resolved
            let mut pts = vec![BoundaryPoint::circle(p_angle)];
            let ls = limit_set_sample(&model, 7, seed)?;
            pts.extend(ls.points);
            if model.label().contains("octagon") || model.label() == "psl2z" {
                pts.extend(qmgeo::campaign::elevator_circle_sample(p_angle, r, 0, seed));
            }
            let cert = conformal_elevator(&model, &pts, 0, r, l, budget)?;
            if let Some(path) = out {
                save_report(&path, "elevator", Some(seed), &cert)?;
            }
            eprintln!(
                "separation {:.4}; constants: global {:.3}, near {:.3}, ball {:.3}, omega_L {:.3}",
                cert.separation, cert.c_global, cert.c_near, cert.c_ball, cert.omega_l
            );
            Ok(())
        }
        Command::Campaign { config, outdir } => {
            let text = std::fs::read_to_string(&config)?;
            let config: CampaignConfig = serde_json::from_str(&text)?;
            let manifest = run_campaign(&config, &outdir)?;
            for s in &manifest.stages {
                eprintln!("{:<20} {:<14} {:>6} ms  {}", s.id, s.op, s.wall_ms, s.status);
            }
            if manifest.overall_ok {
                Ok(())
            } else {
                Err(Error::Invariant("campaign had failing stages".into()))
            }
        }
        Command::Plot { report, view, out } => {
            let text = std::fs::read_to_string(&report)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let csv = emit_plot_data(&value, &view)?;
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("window '{s}' must be lo:hi")))?;
    Ok((
        lo.parse().map_err(|e| Error::Parse(format!("{e}")))?,
        hi.parse().map_err(|e| Error::Parse(format!("{e}")))?,
    ))
}
