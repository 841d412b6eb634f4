//! Acceptance suite. Each test prints one `criterion N ... PASS|FAIL` line and
//! then asserts it. Oracles here are written independently of the library.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{Matrix3, Matrix3x4, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use tricore::alignment::fit_similarity;
use tricore::experiments::{
    read_cameras, read_correspondences, read_points, run_sensitivity, run_sfm_real, run_sfm_synth, synth_trial_set,
    write_cameras, write_correspondences, write_csv_to, write_points, CorrespondenceSet, ErrorKind, Method,
    SensitivityConfig, SfmRealConfig, SfmSynthConfig, TrialRecord,
};
use tricore::geometry::rotation_angle_between;
use tricore::relpose::relative_pose;
use tricore::synth::{make_box_scene, make_conf, sample_sphere_points, SPHERE_RADIUS};
use tricore::triangulation::{angular_l1_twoview, angular_l2_twoview, l1_twoview, l2_twoview, midpoint};
use tricore::viewgraph::{solve_viewing_graph, Edge, ViewingGraph};
use tricore::{Camera, Pixel, Point3, Pose, Vec3};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let took = start.elapsed();
    (took < limit, format!("runtime {:.2}s < {}s", took.as_secs_f64(), limit.as_secs()))
}

// ---------------------------------------------------------------------------
// 1. zero-noise exactness

const EXACT_POINT_TOL: f64 = 1e-9;
const EXACT_PIPELINE_TOL: f64 = 1e-6;

#[test]
fn criterion_1_zero_noise_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut scenes: Vec<(Vec<Camera>, Vec<Point3>)> = (1..=3)
        .map(|c| (make_conf(c).unwrap().to_vec(), sample_sphere_points(&mut rng, 100)))
        .collect();
    for n in [2, 3] {
        let s = make_box_scene(2, n, 100).unwrap();
        scenes.push((s.cameras, s.points));
    }
    for (cams, pts) in &scenes {
        for p in pts {
            let px: Vec<Pixel> = cams.iter().map(|c| c.project(p).unwrap()).collect();
            for m in Method::ALL {
                if m.two_view_only() && cams.len() != 2 {
                    continue;
                }
                let r = m.triangulate(cams, &px).unwrap();
                worst = worst.max((r.point - p).norm());
            }
        }
    }
    let mut worst_pipe: f64 = 0.0;
    for n in [2, 3] {
        let methods = if n == 2 { Method::ALL.to_vec() } else { Method::default_set(3) };
        let cfg = SfmSynthConfig { trials: 10, pixel_noise: 0.0, methods, ..SfmSynthConfig::new(n) };
        for r in run_sfm_synth(&cfg).unwrap() {
            worst_pipe = worst_pipe.max(if r.failed() { f64::INFINITY } else { r.value });
        }
    }
    let (fast, rt) = within(start, Duration::from_secs(10));
    let pass = worst < EXACT_POINT_TOL && worst_pipe < EXACT_PIPELINE_TOL && fast;
    report(
        1,
        "zero-noise exactness",
        pass,
        &format!("max point error {worst:.2e} < {EXACT_POINT_TOL:e}; max pipeline error {worst_pipe:.2e} < {EXACT_PIPELINE_TOL:e}; {rt}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 2. oracle optimality

const ORACLE_TOL: f64 = 1e-9;
const GRADIENT_TOL: f64 = 1e-6;
const SWEEP_SAMPLES: usize = 100_000;

fn camera_matrix(c: &Camera) -> Matrix3x4<f64> {
    let k = Matrix3::new(c.calib.fx, c.calib.skew, c.calib.cx, 0.0, c.calib.fy, c.calib.cy, 0.0, 0.0, 1.0);
    let r = *c.pose.rotation.matrix();
    let t = -r * c.pose.center.coords;
    k * Matrix3x4::from_columns(&[r.column(0).into(), r.column(1).into(), r.column(2).into(), t])
}

/// Minimum of a function of one angle on [0, π): dense samples, then golden
/// section around the best few local minima.
fn sweep_min(f: impl Fn(f64) -> f64) -> f64 {
    let h = PI / SWEEP_SAMPLES as f64;
    let vals: Vec<f64> = (0..SWEEP_SAMPLES).map(|k| f(k as f64 * h)).collect();
    let mut minima: Vec<usize> = (0..SWEEP_SAMPLES)
        .filter(|&k| {
            let prev = vals[(k + SWEEP_SAMPLES - 1) % SWEEP_SAMPLES];
            let next = vals[(k + 1) % SWEEP_SAMPLES];
            vals[k] <= prev && vals[k] <= next
        })
        .collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for &k in minima.iter().take(8) {
        let (mut a, mut b) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..90 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = f(x2);
            }
        }
        best = best.min(f1).min(f2);
    }
    best
}

fn line_distance(l: &Vector3<f64>, u: &Pixel) -> f64 {
    (l.x * u.x + l.y * u.y + l.z).abs() / (l.x * l.x + l.y * l.y).sqrt()
}

/// Per-image distances to the epipolar line pair selected by `theta`.
fn pencil(c1: &Camera, c2: &Camera) -> impl Fn(f64, &Pixel, &Pixel) -> (f64, f64) {
    let p1 = camera_matrix(c1);
    let p2 = camera_matrix(c2);
    let e1 = p1 * c2.pose.center.to_homogeneous();
    let e2 = p2 * c1.pose.center.to_homogeneous();
    let p1_pinv = p1.pseudo_inverse(1e-15).unwrap();
    let e2x = Matrix3::new(0.0, -e2.z, e2.y, e2.z, 0.0, -e2.x, -e2.y, e2.x, 0.0);
    let f = e2x * p2 * p1_pinv;
    move |theta, u1, u2| {
        let d = Vector3::new(theta.cos(), theta.sin(), 0.0);
        (line_distance(&e1.cross(&d), u1), line_distance(&(f * d), u2))
    }
}

fn reprojection(cams: &[Camera; 2], px: &[Pixel; 2], p: &Point3) -> [f64; 2] {
    [0, 1].map(|k| {
        let x = camera_matrix(&cams[k]) * p.to_homogeneous();
        ((x.x / x.z - px[k].x).powi(2) + (x.y / x.z - px[k].y).powi(2)).sqrt()
    })
}

fn world_ray(c: &Camera, u: &Pixel) -> Vec3 {
    let k = Matrix3::new(c.calib.fx, c.calib.skew, c.calib.cx, 0.0, c.calib.fy, c.calib.cy, 0.0, 0.0, 1.0);
    (c.pose.rotation.matrix().transpose() * k.try_inverse().unwrap() * Vec3::new(u.x, u.y, 1.0)).normalize()
}

fn midpoint_cost(origins: &[Point3], dirs: &[Vec3], x: &Vector3<f64>) -> f64 {
    origins
        .iter()
        .zip(dirs)
        .map(|(o, d)| {
            let v = x - o.coords;
            (v - d * d.dot(&v)).norm_squared()
        })
        .sum()
}

fn nelder_mead(f: &dyn Fn(&[f64; 7]) -> f64, start: [f64; 7], step: f64, iters: usize) -> f64 {
    let mut s: Vec<([f64; 7], f64)> = vec![(start, f(&start))];
    for k in 0..7 {
        let mut x = start;
        x[k] += step;
        s.push((x, f(&x)));
    }
    for _ in 0..iters {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut c = [0.0; 7];
        for (x, _) in &s[..7] {
            for k in 0..7 {
                c[k] += x[k] / 7.0;
            }
        }
        let worst = s[7];
        let along = |t: f64| {
            let mut y = [0.0; 7];
            for k in 0..7 {
                y[k] = c[k] + t * (worst.0[k] - c[k]);
            }
            (y, f(&y))
        };
        let r = along(-1.0);
        if r.1 < s[0].1 {
            let e = along(-2.0);
            s[7] = if e.1 < r.1 { e } else { r };
        } else if r.1 < s[6].1 {
            s[7] = r;
        } else {
            let k = along(0.5);
            if k.1 < worst.1 {
                s[7] = k;
            } else {
                let best = s[0].0;
                for v in s.iter_mut().skip(1) {
                    for k in 0..7 {
                        v.0[k] = best[k] + 0.5 * (v.0[k] - best[k]);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    s.iter().map(|v| v.1).fold(f64::INFINITY, f64::min)
}

fn similarity_objective(x: &[f64; 7], est: &[Point3], gt: &[Point3]) -> f64 {
    let r = nalgebra::Rotation3::from_scaled_axis(Vec3::new(x[1], x[2], x[3]));
    let t = Vec3::new(x[4], x[5], x[6]);
    est.iter().zip(gt).map(|(e, g)| (x[0].exp() * (r * e.coords) + t - g.coords).norm_squared()).sum()
}

#[test]
fn criterion_2_oracle_optimality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_gap = [f64::NEG_INFINITY; 4];
    let mut worst_grad: f64 = 0.0;
    for conf in 1..=3 {
        let cams = make_conf(conf).unwrap();
        let lines = pencil(&cams[0], &cams[1]);
        let b = cams[1].pose.center - cams[0].pose.center;
        // Plane normals containing the baseline, from a fixed helper axis.
        let helper = if b.x.abs() < 0.5 * b.norm() { Vec3::x() } else { Vec3::z() };
        let na = b.cross(&helper).normalize();
        let nb = b.cross(&na).normalize();
        for _ in 0..100 {
            let p = sample_sphere_points(&mut rng, 1)[0];
            let px: [Pixel; 2] = [0, 1].map(|k| {
                let u = cams[k].project(&p).unwrap();
                let dx: f64 = StandardNormal.sample(&mut rng);
                let dy: f64 = StandardNormal.sample(&mut rng);
                Pixel::new(u.x + dx, u.y + dy)
            });
            let l2 = sweep_min(|t| {
                let (a, b) = lines(t, &px[0], &px[1]);
                a * a + b * b
            });
            let l1 = sweep_min(|t| {
                let (a, b) = lines(t, &px[0], &px[1]);
                a + b
            });
            let f = [world_ray(&cams[0], &px[0]), world_ray(&cams[1], &px[1])];
            let ang = |phi: f64| {
                let n = phi.cos() * na + phi.sin() * nb;
                [f[0].dot(&n).abs(), f[1].dot(&n).abs()]
            };
            let al1 = sweep_min(|phi| ang(phi).iter().sum());
            let al2 = sweep_min(|phi| ang(phi).iter().map(|v| v * v).sum());

            let x = l2_twoview(&cams[0], &cams[1], &px[0], &px[1]).unwrap().point;
            let r = reprojection(&cams, &px, &x);
            worst_gap[0] = worst_gap[0].max(r[0] * r[0] + r[1] * r[1] - l2);
            let x = l1_twoview(&cams[0], &cams[1], &px[0], &px[1]).unwrap().point;
            let r = reprojection(&cams, &px, &x);
            worst_gap[1] = worst_gap[1].max(r[0] + r[1] - l1);
            let rays = [cams[0].line_of_sight(&px[0]), cams[1].line_of_sight(&px[1])];
            let plane = |x: Point3| b.cross(&(x - cams[0].pose.center)).normalize();
            let n = plane(angular_l1_twoview(&rays[0], &rays[1]).unwrap().point);
            worst_gap[2] = worst_gap[2].max(f[0].dot(&n).abs() + f[1].dot(&n).abs() - al1);
            let n = plane(angular_l2_twoview(&rays[0], &rays[1]).unwrap().point);
            worst_gap[3] = worst_gap[3].max(f[0].dot(&n).powi(2) + f[1].dot(&n).powi(2) - al2);

            let m = midpoint(&rays).unwrap().point.coords;
            let origins = [cams[0].pose.center, cams[1].pose.center];
            let h = 1e-5;
            let grad = Vec3::from_fn(|k, _| {
                let mut e = Vec3::zeros();
                e[k] = h;
                (midpoint_cost(&origins, &f, &(m + e)) - midpoint_cost(&origins, &f, &(m - e))) / (2.0 * h)
            });
            worst_grad = worst_grad.max(grad.norm());
        }
    }
    let mut worst_sim = f64::NEG_INFINITY;
    for _ in 0..100 {
        let gt: Vec<Point3> = (0..10).map(|_| Point3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        let axis = Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let rot = nalgebra::Rotation3::from_scaled_axis(axis);
        let s: f64 = rng.random_range(0.3..3.0);
        let est: Vec<Point3> = gt
            .iter()
            .map(|g| Point3::from(rot * (g.coords * s) + Vec3::new(1.0, -2.0, 0.5) + 0.1 * Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        let sim = fit_similarity(&est, &gt).unwrap();
        let ours = sim.objective(&est, &gt);
        let f = |x: &[f64; 7]| similarity_objective(x, &est, &gt);
        let sv = sim.rotation.scaled_axis();
        let t = sim.translation;
        let mut best = nelder_mead(&f, [sim.scale.ln(), sv.x, sv.y, sv.z, t.x, t.y, t.z], 1e-3, 2000);
        for _ in 0..100 {
            let mut x = [0.0; 7];
            x[0] = rng.random_range(-1.5..1.5);
            for v in &mut x[1..4] {
                *v = rng.random_range(-1.8..1.8);
            }
            for v in &mut x[4..] {
                *v = rng.random_range(-5.0..5.0);
            }
            best = best.min(nelder_mead(&f, x, 0.5, 400));
        }
        worst_sim = worst_sim.max(ours - best);
    }
    let (fast, rt) = within(start, Duration::from_secs(60));
    let pass = worst_gap.iter().all(|g| *g <= ORACLE_TOL) && worst_grad < GRADIENT_TOL && worst_sim <= ORACLE_TOL && fast;
    report(
        2,
        "oracle optimality",
        pass,
        &format!(
            "cost minus sweep minimum: l2 {:.1e}, l1 {:.1e}, angular-l1 {:.1e}, angular-l2 {:.1e} <= {ORACLE_TOL:e}; \
             midpoint gradient {worst_grad:.1e} < {GRADIENT_TOL:e}; alignment minus optimizer {worst_sim:.1e} <= {ORACLE_TOL:e}; {rt}",
            worst_gap[0], worst_gap[1], worst_gap[2], worst_gap[3]
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 3. relative pose and viewing graph

const POSE_TOL: f64 = 1e-6;
const GRAPH_TOL: f64 = 1e-9;

#[test]
fn criterion_3_relative_pose_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rot: f64 = 0.0;
    let mut worst_dir: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..100 {
        let mut v = || Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let c1 = Point3::from(v().normalize() * 8.0);
        let c2 = c1 + v() * 3.0;
        let t1 = Point3::from(v() * 0.5);
        let t2 = Point3::from(v() * 0.5);
        let p1 = Pose::look_at(c1, t1).unwrap();
        let p2 = Pose::look_at(c2, t2).unwrap();
        let pts: Vec<Point3> = (0..20).map(|_| Point3::from(v() * 1.5)).filter(|p| p1.to_camera(p).z > 0.1 && p2.to_camera(p).z > 0.1).collect();
        let b1: Vec<Vec3> = pts.iter().map(|p| p1.to_camera(p).normalize()).collect();
        let b2: Vec<Vec3> = pts.iter().map(|p| p2.to_camera(p).normalize()).collect();
        match relative_pose(&b1, &b2) {
            Ok((_, sel)) => {
                let true_rot = p2.rotation * p1.rotation.inverse();
                let true_dir = (p1.rotation * (c2 - c1)).normalize();
                worst_rot = worst_rot.max(rotation_angle_between(&sel.pose.rotation, &true_rot));
                worst_dir = worst_dir.max(sel.pose.direction.cross(&true_dir).norm().atan2(sel.pose.direction.dot(&true_dir)));
            }
            Err(_) => failures += 1,
        }
    }
    let scene = make_box_scene(0, 3, 20).unwrap();
    let poses: Vec<Pose> = scene.cameras.iter().map(|c| c.pose).collect();
    let mut edges = vec![];
    for i in 0..3 {
        for j in i + 1..3 {
            let rot = poses[j].rotation * poses[i].rotation.inverse();
            let dir = poses[i].rotation * (poses[j].center - poses[i].center);
            edges.push(Edge { i, j, pose: tricore::relpose::RelativePose::new(rot, dir).unwrap() });
        }
    }
    let solved = solve_viewing_graph(&ViewingGraph::new(3, edges).unwrap()).unwrap();
    let truth: Vec<Point3> = poses.iter().map(|p| p.center).collect();
    let sim = fit_similarity(&solved.centers, &truth).unwrap();
    let graph_err = solved.centers.iter().zip(&truth).map(|(c, t)| (sim.apply(c) - t).norm()).fold(0.0, f64::max);
    let pass = failures == 0 && worst_rot < POSE_TOL && worst_dir < POSE_TOL && graph_err < GRAPH_TOL;
    report(
        3,
        "relative pose and viewing graph",
        pass,
        &format!("{failures} failures; rotation {worst_rot:.1e} rad, direction {worst_dir:.1e} rad < {POSE_TOL:e}; graph centers {graph_err:.1e} < {GRAPH_TOL:e}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 4. sensitivity ordering

fn mean_by_level(records: &[TrialRecord], method: &str, level: f64) -> (f64, usize) {
    let vals: Vec<f64> = records.iter().filter(|r| r.method == method && r.level == level && !r.failed()).map(|r| r.value).collect();
    let failed = records.iter().filter(|r| r.method == method && r.level == level && r.failed()).count();
    (vals.iter().sum::<f64>() / vals.len() as f64, failed)
}

#[test]
fn criterion_4_sensitivity_midpoint_beats_l2() {
    let start = Instant::now();
    let mut all_pass = true;
    let mut lines = vec![];
    for conf in 1..=3 {
        for kind in [ErrorKind::Position, ErrorKind::Distance, ErrorKind::Angle] {
            let cfg = SensitivityConfig { methods: vec![Method::Midpoint, Method::L2], ..SensitivityConfig::new(conf, kind) };
            let recs = run_sensitivity(&cfg).unwrap();
            let mut violations = vec![];
            let mut failed = 0;
            for level in (3..=10).map(f64::from) {
                let (mid, f1) = mean_by_level(&recs, "midpoint", level);
                let (l2, f2) = mean_by_level(&recs, "l2", level);
                failed += f1 + f2;
                if !(mid <= l2) {
                    violations.push(format!("level {level}: {mid:.4e} > {l2:.4e}"));
                }
            }
            let ok = violations.is_empty() && failed == 0;
            all_pass &= ok;
            lines.push(format!(
                "  conf {conf} {kind}: {} ({failed} failed trials){}",
                if ok { "ok" } else { "violated" },
                if violations.is_empty() { String::new() } else { format!(" {}", violations.join(", ")) }
            ));
        }
    }
    let (fast, rt) = within(start, Duration::from_secs(120));
    let pass = all_pass && fast;
    report(4, "sensitivity: midpoint mean error <= l2 at levels 3..10", pass, &rt);
    for l in lines {
        println!("{l}");
    }
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 5. full reconstruction ordering

#[test]
fn criterion_5_sfm_midpoint_beats_l2() {
    let start = Instant::now();
    let mut details = vec![];
    let mut pass = true;
    for (n, l2) in [(2, Method::L2), (3, Method::L2Refine)] {
        let cfg = SfmSynthConfig { methods: vec![Method::Midpoint, l2], ..SfmSynthConfig::new(n) };
        let recs = run_sfm_synth(&cfg).unwrap();
        let failed = recs.iter().filter(|r| r.failed()).count();
        let mean = |m: Method| {
            let v: Vec<f64> = recs.iter().filter(|r| r.method == m.name() && !r.failed()).map(|r| r.value).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let (a, b) = (mean(Method::Midpoint), mean(l2));
        let ok = a <= b && failed == 0;
        pass &= ok;
        details.push(format!("{n} cameras: midpoint {a:.6e} vs {} {b:.6e}, {failed} failed", l2.name()));
    }
    let (fast, rt) = within(start, Duration::from_secs(300));
    pass &= fast;
    report(5, "sfm: midpoint mean-of-means <= l2", pass, &format!("{}; {rt}", details.join("; ")));
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 6. determinism and format round trip

fn csv_bytes(records: &[TrialRecord]) -> Vec<u8> {
    let mut out = vec![];
    write_csv_to(&mut out, records).unwrap();
    out
}

#[test]
fn criterion_6_determinism_and_round_trip() {
    let sens = SensitivityConfig { levels: vec![1.0, 5.0], trials: 20, ..SensitivityConfig::new(3, ErrorKind::Angle) };
    let sens_same = csv_bytes(&run_sensitivity(&sens).unwrap()) == csv_bytes(&run_sensitivity(&sens).unwrap());
    let sfm = SfmSynthConfig { trials: 20, ..SfmSynthConfig::new(3) };
    let sfm_a = run_sfm_synth(&sfm).unwrap();
    let sfm_same = csv_bytes(&sfm_a) == csv_bytes(&run_sfm_synth(&sfm).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let mut round_trip = true;
    for n in [2, 3] {
        let cfg = SfmSynthConfig { trials: 1, seed: 5, ..SfmSynthConfig::new(n) };
        let synth = run_sfm_synth(&cfg).unwrap();
        let set = synth_trial_set(&cfg, 0).unwrap();
        let (c, o, g) = (dir.path().join("cams.txt"), dir.path().join("obs.txt"), dir.path().join("gt.txt"));
        write_cameras(&c, set.cameras()).unwrap();
        write_correspondences(&o, &set.observations()).unwrap();
        write_points(&g, set.ground_truth().unwrap()).unwrap();
        let loaded = CorrespondenceSet::new(read_cameras(&c).unwrap(), &read_correspondences(&o).unwrap())
            .unwrap()
            .with_ground_truth(read_points(&g).unwrap())
            .unwrap();
        let real = run_sfm_real(&loaded, &SfmRealConfig { runs: 1, ..SfmRealConfig::new(n) }).unwrap();
        round_trip &= real.len() == synth.len()
            && real.iter().zip(&synth).all(|(a, b)| a.method == b.method && a.value.to_bits() == b.value.to_bits());
    }
    let pass = sens_same && sfm_same && round_trip;
    report(
        6,
        "determinism and format round trip",
        pass,
        &format!("sensitivity csv identical: {sens_same}; sfm csv identical: {sfm_same}; loader round trip identical: {round_trip}"),
    );
    assert!(pass);
}

#[test]
fn sphere_radius_matches_scene_scale() {
    assert_eq!(SPHERE_RADIUS, 0.25);
}
