//! Campaign orchestration: a seeded pipeline of operations producing one
//! JSON report per stage plus a manifest with hashes and wall times.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::{generate, Generated, GeneratorSpec};
use crate::group::{
    conformal_elevator, entropy, limit_set_sample, orbit_ball, parse_group_spec, BoundaryPoint,
};
use crate::hyperbolic::{
    four_point_delta, gromov_products, visual_metric, BasedSpace, BoundarySample,
};
use crate::io::{report_sha256, save_report};
use crate::metric::{FiniteMetricSpace, Validation};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub schema: u32,
    pub seed: u64,
    pub pipeline: Vec<Stage>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stage {
    pub id: String,
    #[serde(default)]
    pub needs: Vec<String>,
    #[serde(flatten)]
    pub op: StageOp,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum StageOp {
    /// Generate a space or model; spaces can be saved as point clouds.
    Gen { spec: GeneratorSpec, save: Option<String> },
    /// De-snowflake a generated space.
    Desnowflake {
        input: String,
        eps: f64,
        kmin: u32,
        kmax: u32,
        pairs: usize,
    },
    /// Length-volume fuzzing campaign.
    CubeFuzz {
        n: usize,
        instances: usize,
        max_sets: usize,
        grid: Option<usize>,
    },
    /// Four-point delta of a generated space.
    Hyperbolicity { input: String, base: usize },
    /// Visual metric sweep over a model's limit set.
    VisualSweep {
        group: String,
        depth: u32,
        max_points: usize,
        eps_grid: Vec<f64>,
    },
    /// Orbit ball and entropy fit.
    Entropy {
        group: String,
        radius: f64,
        cap: u32,
        window: (f64, f64),
    },
    /// Elevator certificates over seeded (p, r, L) draws.
    ElevatorSweep {
        group: String,
        runs: usize,
        r_range: (f64, f64),
        ls: Vec<f64>,
        budget: u32,
    },
    /// Module invariant battery.
    Invariants,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub id: String,
    pub op: String,
    pub status: String,
    pub error: Option<String>,
    pub outputs: Vec<(String, String)>,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
    pub overall_ok: bool,
}

/// Execute the pipeline; stage failures are recorded, dependents skipped,
/// independent stages proceed.
pub fn run_campaign(config: &CampaignConfig, outdir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(outdir)?;
    let mut spaces: BTreeMap<String, Arc<FiniteMetricSpace>> = BTreeMap::new();
    let mut failed: Vec<String> = Vec::new();
    let mut records = Vec::new();

    for stage in &config.pipeline {
        let started = Instant::now();
        let opname = stage_op_name(&stage.op);
        if stage.needs.iter().any(|n| failed.contains(n)) {
            records.push(StageRecord {
                id: stage.id.clone(),
                op: opname.into(),
                status: "skipped".into(),
                error: Some("a dependency failed".into()),
                outputs: Vec::new(),
                wall_ms: 0,
            });
            continue;
        }
        let result = run_stage(stage, config.seed, outdir, &mut spaces);
        let wall_ms = started.elapsed().as_millis();
        match result {
            Ok(outputs) => records.push(StageRecord {
                id: stage.id.clone(),
                op: opname.into(),
                status: "ok".into(),
                error: None,
                outputs,
                wall_ms,
            }),
            Err(e) => {
                failed.push(stage.id.clone());
                records.push(StageRecord {
                    id: stage.id.clone(),
                    op: opname.into(),
                    status: "failed".into(),
                    error: Some(e.to_string()),
                    outputs: Vec::new(),
                    wall_ms,
                });
            }
        }
    }

    let overall_ok = records.iter().all(|r| r.status == "ok");
    let manifest = Manifest {
        schema: crate::io::SCHEMA_VERSION,
        seed: config.seed,
        stages: records,
        overall_ok,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(outdir.join("manifest.json"), json)?;
    Ok(manifest)
}

fn stage_op_name(op: &StageOp) -> &'static str {
    match op {
        StageOp::Gen { .. } => "gen",
        StageOp::Desnowflake { .. } => "desnowflake",
        StageOp::CubeFuzz { .. } => "cube_fuzz",
        StageOp::Hyperbolicity { .. } => "hyperbolicity",
        StageOp::VisualSweep { .. } => "visual_sweep",
        StageOp::Entropy { .. } => "entropy",
        StageOp::ElevatorSweep { .. } => "elevator_sweep",
        StageOp::Invariants => "invariants",
    }
}

fn write_stage_report<T: Serialize>(
    outdir: &Path,
    id: &str,
    kind: &str,
    seed: u64,
    payload: &T,
) -> Result<Vec<(String, String)>> {
    let file = format!("{id}.json");
    let json = save_report(&outdir.join(&file), kind, Some(seed), payload)?;
    Ok(vec![(file, report_sha256(json.as_bytes()))])
}

fn run_stage(
    stage: &Stage,
    seed: u64,
    outdir: &Path,
    spaces: &mut BTreeMap<String, Arc<FiniteMetricSpace>>,
) -> Result<Vec<(String, String)>> {
    match &stage.op {
        StageOp::Gen { spec, save } => {
            match generate(spec)? {
                Generated::Space(s) => {
                    let mut outputs = Vec::new();
                    if let Some(name) = save {
                        let path: PathBuf = outdir.join(name);
                        if s.coords().is_some() {
                            crate::io::write_point_cloud(&path, &s)?;
                        } else {
                            crate::io::write_distance_matrix(&path, &s)?;
                        }
                        let bytes = std::fs::read(&path)?;
                        outputs.push((name.clone(), report_sha256(&bytes)));
                    }
                    spaces.insert(stage.id.clone(), Arc::new(s));
                    Ok(outputs)
                }
                Generated::Model(_) => Ok(Vec::new()),
            }
        }
        StageOp::Desnowflake {
            input,
            eps,
            kmin,
            kmax,
            pairs,
        } => {
            let space = spaces
                .get(input)
                .ok_or_else(|| Error::Config(format!("unknown input stage '{input}'")))?;
            let rep = crate::chain::desnowflake(space.clone(), *eps, (*kmin, *kmax), *pairs, seed)?;
            write_stage_report(outdir, &stage.id, "desnowflake", seed, &rep)
        }
        StageOp::CubeFuzz {
            n,
            instances,
            max_sets,
            grid,
        } => {
            let rep = crate::cube::fuzz_length_volume(*n, *instances, *max_sets, seed, *grid)?;
            if !rep.all_hold() {
                // persist the falsification dump before failing
                let _ = write_stage_report(outdir, &stage.id, "cube_fuzz", seed, &rep)?;
                return Err(Error::Invariant(format!(
                    "{} length-volume violations (dump written)",
                    rep.violations.len()
                )));
            }
            write_stage_report(outdir, &stage.id, "cube_fuzz", seed, &rep)
        }
        StageOp::Hyperbolicity { input, base } => {
            let space = spaces
                .get(input)
                .ok_or_else(|| Error::Config(format!("unknown input stage '{input}'")))?;
            let based = BasedSpace::new(space.clone(), *base)?;
            let table = gromov_products(&based);
            table.verify_bounds(1e-9 * space.diam())?;
            let delta = four_point_delta(&table);
            write_stage_report(
                outdir,
                &stage.id,
                "hyperbolicity",
                seed,
                &serde_json::json!({ "base": base, "delta": delta, "points": space.len() }),
            )
        }
        StageOp::VisualSweep {
            group,
            depth,
            max_points,
            eps_grid,
        } => {
            let model = parse_group_spec(group)?;
            let ls = limit_set_sample(&model, *depth, seed)?;
            if let Some(w) = &ls.warning {
                return Err(Error::Resolution(w.clone()));
            }
            let pts: Vec<BoundaryPoint> =
                thin_points(&ls.points, *max_points);
            let sample = BoundarySample::from_boundary_points(&pts)?;
            let mut rows = Vec::new();
            for &eps in eps_grid {
                let rep = visual_metric(&sample, eps)?;
                rows.push(serde_json::json!({
                    "eps": eps,
                    "k": rep.k_fitted,
                    "applicable": rep.applicable,
                    "lower_bound_ok": rep.lower_bound_ok,
                }));
            }
            write_stage_report(
                outdir,
                &stage.id,
                "visual_sweep",
                seed,
                &serde_json::json!({ "group": group, "points": pts.len(), "rows": rows }),
            )
        }
        StageOp::Entropy {
            group,
            radius,
            cap,
            window,
        } => {
            let model = parse_group_spec(group)?;
            let orbit = orbit_ball(&model, *radius, *cap)?;
            let est = entropy(&orbit, *window)?;
            write_stage_report(
                outdir,
                &stage.id,
                "entropy",
                seed,
                &serde_json::json!({
                    "group": group,
                    "grid": orbit.grid,
                    "truncated": orbit.truncated,
                    "slope": est.slope,
                    "stderr": est.stderr,
                    "window": est.window,
                }),
            )
        }
        StageOp::ElevatorSweep {
            group,
            runs,
            r_range,
            ls,
            budget,
        } => {
            let model = parse_group_spec(group)?;
            let sweep = crate::campaign::elevator_sweep(&model, *runs, *r_range, ls, *budget, seed)?;
            write_stage_report(outdir, &stage.id, "elevator_sweep", seed, &sweep)
        }
        StageOp::Invariants => {
            let rep = run_invariant_battery(seed)?;
            write_stage_report(outdir, &stage.id, "invariants", seed, &rep)
        }
    }
}

fn thin_points(points: &[BoundaryPoint], max: usize) -> Vec<BoundaryPoint> {
    if points.len() <= max {
        return points.to_vec();
    }
    let stride = points.len() / max;
    points.iter().step_by(stride.max(1)).take(max).cloned().collect()
}

/// Seeded (p, r, L) elevator sweep over a cocompact-type model's circle
/// boundary. Samples are uniform circle points plus a log-spaced cluster
/// around each run's base point, so the recipe scales stay resolved.
#[derive(Debug, Clone, Serialize)]
pub struct ElevatorSweep {
    pub runs: Vec<ElevatorRun>,
    /// max/min of each certificate constant across runs.
    pub spread_c_global: f64,
    pub spread_c_near: f64,
    pub spread_c_ball: f64,
    pub spread_omega: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ElevatorRun {
    pub r: f64,
    pub l: f64,
    pub c_global: f64,
    pub c_near: f64,
    pub c_ball: f64,
    pub far_diam: f64,
    pub omega_l: f64,
    pub separation: f64,
}

pub fn elevator_sweep(
    model: &crate::group::GroupActionModel,
    runs: usize,
    r_range: (f64, f64),
    ls: &[f64],
    budget: u32,
    seed: u64,
) -> Result<ElevatorSweep> {
    use rand::Rng;
    use rand::SeedableRng;
    if runs == 0 || ls.is_empty() {
        return Err(Error::parameter("need runs > 0 and a nonempty L list"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(runs);
    for idx in 0..runs {
        let l = ls[idx % ls.len()];
        // keep L r <= 1 so the far set is never empty on the circle
        let r_hi = r_range.1.min(1.0 / l);
        let lo = r_range.0.min(r_hi / 2.0);
        let r = lo * (r_hi / lo).powf(rng.gen_range(0.0..1.0f64));
        let p_angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let sample = elevator_circle_sample(p_angle, r, 1024, seed.wrapping_add(idx as u64));
        let cert = conformal_elevator(model, &sample, 0, r, l, budget)?;
        out.push(ElevatorRun {
            r,
            l,
            c_global: cert.c_global,
            c_near: cert.c_near,
            c_ball: cert.c_ball,
            far_diam: cert.far_diam,
            omega_l: cert.omega_l,
            separation: cert.separation,
        });
    }
    let spread = |f: fn(&ElevatorRun) -> f64| -> f64 {
        let vals: Vec<f64> = out.iter().map(f).collect();
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        hi / lo
    };
    Ok(ElevatorSweep {
        spread_c_global: spread(|r| r.c_global),
        spread_c_near: spread(|r| r.c_near),
        spread_c_ball: spread(|r| r.c_ball),
        spread_omega: spread(|r| r.omega_l),
        runs: out,
    })
}

/// Boundary sample for elevator runs on a group whose limit set fills the
/// circle: uniform points plus a two-sided log-spaced cluster around the
/// base angle down to r/100.
pub fn elevator_circle_sample(
    p_angle: f64,
    r: f64,
    uniform: usize,
    seed: u64,
) -> Vec<BoundaryPoint> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![BoundaryPoint::circle(p_angle)];
    let mut s = 2.0 * r;
    while s > r / 100.0 {
        for sign in [-1.0f64, 1.0] {
            let jitter = 1.0 + 0.04 * (rng.gen_range(0.0..1.0f64) - 0.5);
            let theta = 2.0 * (s * jitter / 2.0).min(1.0).asin();
            pts.push(BoundaryPoint::circle(p_angle + sign * theta));
        }
        s *= 0.85;
    }
    for _ in 0..uniform {
        pts.push(BoundaryPoint::circle(rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    pts
}

/// The module invariant battery: cross-ratio identities, net invariants,
/// chain-table symmetry and triangle inequality, Gromov-product bounds,
/// and determinism per seed.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub checks: Vec<(String, bool)>,
}

pub fn run_invariant_battery(seed: u64) -> Result<InvariantReport> {
    use crate::metric::{cross_ratio, max_separated_net, Quadruple};
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut push = |name: &str, ok: bool| -> Result<()> {
        checks.push((name.into(), ok));
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("battery check failed: {name}")))
        }
    };

    // cross-ratio identities on a seeded cloud
    let cloud = crate::gen::euclidean_cloud(24, 3, seed)?;
    let mut ok = true;
    for (a, b, c, d) in [(0usize, 1usize, 2usize, 3usize), (5, 9, 11, 2), (20, 3, 7, 14)] {
        let q = Quadruple::new(a, b, c, d)?;
        let cr = cross_ratio(&cloud, q)?;
        let swapped = cross_ratio(&cloud, q.swap_first_two())?;
        ok &= (cr * swapped - 1.0).abs() <= 1e-12 * (cr * swapped).max(1.0);
        // scalar relabeling invariance
        let scaled_dist: Vec<f64> = cloud.raw_dist().iter().map(|d| d * 3.7).collect();
        let scaled = FiniteMetricSpace::new("scaled", cloud.len(), scaled_dist, None, Validation::Off)?;
        let cr2 = cross_ratio(&scaled, q)?;
        ok &= ((cr2 / cr) - 1.0).abs() <= 1e-12;
    }
    push("cross_ratio_identities", ok)?;

    // net invariants
    let circle = crate::gen::circle_snowflake(256, 1.0)?;
    let mut ok = true;
    for s in 0..4u64 {
        let net = max_separated_net(&circle, 0.11, seed.wrapping_add(s))?;
        ok &= net.verify(&circle).is_ok();
    }
    push("net_separation_and_maximality", ok)?;

    // chain table symmetry + triangle (exact integers)
    let space = Arc::new(crate::gen::circle_snowflake(512, 1.0)?);
    let cover = crate::chain::build_cover(space.clone(), 1.0, 3, seed)?;
    cover.verify()?;
    let nerve = crate::chain::build_nerve(cover);
    let probes = [(0usize, 200usize, 400usize), (17, 100, 311)];
    let mut ok = true;
    for &(x, y, z) in &probes {
        let t = crate::chain::chain_distance(&nerve, &[(x, y), (y, x), (y, z), (x, z)])?;
        let xy = t.entries[0].balls;
        let yx = t.entries[1].balls;
        ok &= xy == yx;
        if let (Some(xy), Some(yz), Some(xz)) =
            (t.entries[0].balls, t.entries[2].balls, t.entries[3].balls)
        {
            ok &= xz <= xy + yz;
            ok &= xz >= 1;
        }
    }
    push("chain_table_symmetry_triangle", ok)?;

    // gromov bounds on a seeded tree
    let tree = Arc::new(crate::gen::tree_metric(64, seed)?);
    let table = gromov_products(&BasedSpace::new(tree.clone(), 0)?);
    push("gromov_product_bounds", table.verify_bounds(0.0).is_ok())?;
    push("tree_delta_zero", four_point_delta(&table) == 0.0)?;

    // determinism per seed: regenerate and byte-compare
    let a = serde_json::to_string(&crate::gen::euclidean_cloud(40, 2, seed)?.raw_dist())?;
    let b = serde_json::to_string(&crate::gen::euclidean_cloud(40, 2, seed)?.raw_dist())?;
    push("generator_determinism", a == b)?;
    let o1 = crate::group::orbit_ball(&parse_group_spec("schottky:0.6")?, 6.0, 30)?;
    let o2 = crate::group::orbit_ball(&parse_group_spec("schottky:0.6")?, 6.0, 30)?;
    push("orbit_determinism", o1.dists == o2.dists)?;

    Ok(InvariantReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_battery_passes() {
        let rep = run_invariant_battery(41).unwrap();
        assert!(rep.checks.iter().all(|(_, ok)| *ok));
        assert!(rep.checks.len() >= 6);
    }

    #[test]
    fn campaign_runs_and_skips_dependents() {
        let dir = tempfile::tempdir().unwrap();
        let config = CampaignConfig {
            schema: 1,
            seed: 5,
            pipeline: vec![
                Stage {
                    id: "good".into(),
                    needs: vec![],
                    op: StageOp::Gen {
                        spec: GeneratorSpec::CircleSnowflake { n: 64, eps: 1.0 },
                        save: Some("circle.csv".into()),
                    },
                },
                Stage {
                    id: "bad".into(),
                    needs: vec![],
                    op: StageOp::Desnowflake {
                        input: "missing".into(),
                        eps: 1.0,
                        kmin: 1,
                        kmax: 3,
                        pairs: 10,
                    },
                },
                Stage {
                    id: "child_of_bad".into(),
                    needs: vec!["bad".into()],
                    op: StageOp::Invariants,
                },
                Stage {
                    id: "independent".into(),
                    needs: vec!["good".into()],
                    op: StageOp::Desnowflake {
                        input: "good".into(),
                        eps: 1.0,
                        kmin: 1,
                        kmax: 2,
                        pairs: 10,
                    },
                },
            ],
        };
        let manifest = run_campaign(&config, dir.path()).unwrap();
        assert!(!manifest.overall_ok);
        let status: Vec<&str> = manifest.stages.iter().map(|s| s.status.as_str()).collect();
        assert_eq!(status, vec!["ok", "failed", "skipped", "ok"]);
        assert!(dir.path().join("manifest.json").exists());
        assert!(dir.path().join("circle.csv").exists());
    }

    #[test]
    fn empty_pipeline_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let config = CampaignConfig {
            schema: 1,
            seed: 1,
            pipeline: vec![],
        };
        let manifest = run_campaign(&config, dir.path()).unwrap();
        assert!(manifest.overall_ok);
        assert!(dir.path().join("manifest.json").exists());
    }

    #[test]
    fn rerun_is_byte_identical_modulo_manifest() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let config = CampaignConfig {
            schema: 1,
            seed: 9,
            pipeline: vec![
                Stage {
                    id: "c".into(),
                    needs: vec![],
                    op: StageOp::Gen {
                        spec: GeneratorSpec::CircleSnowflake { n: 1024, eps: 1.0 },
                        save: Some("c.csv".into()),
                    },
                },
                Stage {
                    id: "d".into(),
                    needs: vec!["c".into()],
                    op: StageOp::Desnowflake {
                        input: "c".into(),
                        eps: 1.0,
                        kmin: 1,
                        kmax: 4,
                        pairs: 20,
                    },
                },
            ],
        };
        run_campaign(&config, dir1.path()).unwrap();
        run_campaign(&config, dir2.path()).unwrap();
        for f in ["c.csv", "d.json"] {
            let a = std::fs::read(dir1.path().join(f)).unwrap();
            let b = std::fs::read(dir2.path().join(f)).unwrap();
            assert_eq!(a, b, "{f} must be byte-identical across reruns");
        }
    }
}
