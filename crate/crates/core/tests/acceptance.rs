//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rfprint::classify::{svm_train, SvmParams};
use rfprint::dsp::{design_butterworth_bandpass, stft, BandpassSpec, MfpExtractor, WindowKind};
use rfprint::features::{cumulative_explained_variance, pca_fit, PcaTarget};
use rfprint::pipeline::{movement_report, stft_sweep, workflow_eval, ExperimentKind, PipelineConfig, Report, SimulatedSource, StftSweepOptions};
use rfprint::simulate::{
    synth_movement, AxisSet, DatasetConfig, EmissionModel, MovementGrid, MovementSpec, WorkflowGrid, BASELINE_DISTANCE_MM,
    BASELINE_SPEED_MM_S, DISTANCES_MM, SPEEDS_MM_S,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn complex_noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| {
                    // Reduce k·t mod n first so the angle stays exact.
                    let ang = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, ang)
                })
                .sum()
        })
        .collect()
}

fn window_reference(kind: WindowKind, n: usize) -> Vec<f64> {
    let c = |k: f64, i: usize| (2.0 * PI * k * i as f64 / n as f64).cos();
    (0..n)
        .map(|i| match kind {
            WindowKind::Hann => 0.5 - 0.5 * c(1.0, i),
            WindowKind::Hamming => 0.54 - 0.46 * c(1.0, i),
            WindowKind::Blackman => 0.42 - 0.5 * c(1.0, i) + 0.08 * c(2.0, i),
        })
        .collect()
}

fn dsp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut stft_err, mut mfp_err) = (0.0f64, 0.0f64);
    let mut cases = 0;
    for (fft_len, hop) in [(256, 128), (512, 512), (1024, 512)] {
        for kind in WindowKind::ALL {
            let x = complex_noise(&mut rng, 8192);
            let s = stft(&x, fft_len, hop, kind, 2e6).map_err(|e| e.to_string())?;
            let w = window_reference(kind, fft_len);
            let frames = (x.len() - fft_len) / hop + 1;
            check(s.frames() == frames, || format!("frame count {} != {frames}", s.frames()))?;

            let mut naive_mfp = vec![0.0; fft_len];
            for m in 0..frames {
                let seg: Vec<Complex64> = (0..fft_len).map(|n| x[m * hop + n] * w[n]).collect();
                for (v, want) in naive_dft(&seg).iter().enumerate() {
                    stft_err = stft_err.max((s.value(v, m) - want).norm());
                }
            }
            // Naive double loop over the crate's STFT values.
            for (v, acc) in naive_mfp.iter_mut().enumerate() {
                for m in 0..frames {
                    *acc += s.value(v, m).norm();
                }
                *acc /= frames as f64;
            }
            let got = MfpExtractor::new(fft_len, hop, kind).and_then(|e| e.mfp(&x, 2e6)).map_err(|e| e.to_string())?;
            for (a, b) in got.values.iter().zip(&naive_mfp) {
                mfp_err = mfp_err.max((a - b).abs());
            }
            cases += 1;
        }
    }
    check(stft_err <= 1e-9, || format!("STFT max-abs error {stft_err:e}"))?;
    check(mfp_err <= 1e-12, || format!("MFP max-abs error {mfp_err:e}"))?;
    Ok(format!("{cases} signals; STFT err {stft_err:.1e}, MFP err {mfp_err:.1e}"))
}

fn filter_contract() -> Outcome {
    let fs = 2e6;
    let f = design_butterworth_bandpass(&BandpassSpec::new(10e3, 500e3, 5), fs).map_err(|e| e.to_string())?;
    let target = -20.0 * 2f64.sqrt().log10();
    let lo = f.magnitude_db(10e3, fs);
    let hi = f.magnitude_db(500e3, fs);
    check((lo - target).abs() <= 0.1, || format!("|H(10 kHz)| = {lo:.4} dB"))?;
    check((hi - target).abs() <= 0.1, || format!("|H(500 kHz)| = {hi:.4} dB"))?;
    let a1k = -f.magnitude_db(1e3, fs);
    let a1m = -f.magnitude_db(1e6, fs);
    check(a1k >= 40.0, || format!("attenuation at 1 kHz only {a1k:.1} dB"))?;
    check(a1m >= 40.0, || format!("attenuation at 1 MHz only {a1m:.1} dB"))?;
    check(f.sections.len() == 5, || format!("{} sections", f.sections.len()))?;
    check(f.is_stable(), || "unstable section".into())?;
    // Poles from each section's denominator must lie inside the unit circle.
    let max_pole = f
        .sections
        .iter()
        .map(|s| {
            let disc = Complex64::new(s.a1 * s.a1 - 4.0 * s.a2, 0.0).sqrt();
            let p1 = (-s.a1 + disc) / 2.0;
            let p2 = (-s.a1 - disc) / 2.0;
            p1.norm().max(p2.norm())
        })
        .fold(0.0, f64::max);
    check(max_pole < 1.0, || format!("pole radius {max_pole}"))?;
    Ok(format!(
        "cut-offs {lo:.4} / {hi:.4} dB, attenuation {a1k:.1} dB @ 1 kHz, {} @ 1 MHz, max pole radius {max_pole:.6}",
        if a1m.is_infinite() { "inf dB".to_string() } else { format!("{a1m:.1} dB") }
    ))
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues descending with matching unit eigenvectors.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> Vec<(f64, Vec<f64>)> {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n).map(|j| (a[j][j], v.iter().map(|r| r[j]).collect())).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    pairs
}

fn pca_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut var_err, mut vec_err) = (0.0f64, 0.0f64);
    let mut thresholds = 0;
    for case in 0..200 {
        let n = rng.gen_range(2..=60);
        let d = rng.gen_range(1..=16);
        let scales: Vec<f64> = (0..d).map(|_| rng.gen_range(0.2..2.0)).collect();
        let x: Vec<Vec<f64>> = (0..n).map(|_| scales.iter().map(|s| s * rng.gen_range(-1.0..1.0)).collect()).collect();

        let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
        let cov: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| x.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / n as f64).collect())
            .collect();
        let total: f64 = (0..d).map(|i| cov[i][i]).sum();
        let eig = jacobi_eigen(cov);
        let k_max = (n - 1).min(d);

        let model = pca_fit(&x, PcaTarget::Components(k_max)).map_err(|e| format!("case {case} (n={n}, d={d}): {e}"))?;
        for (i, (lam, vec)) in eig.iter().take(k_max).enumerate() {
            var_err = var_err.max((model.explained_variance[i] - lam).abs());
            let dotp: f64 = model.components[i].iter().zip(vec).map(|(a, b)| a * b).sum();
            let sign = dotp.signum();
            for (a, b) in model.components[i].iter().zip(vec) {
                vec_err = vec_err.max((a - sign * b).abs());
            }
        }

        // Threshold selection must pick the smallest k reaching tau.
        for _ in 0..5 {
            let tau: f64 = rng.gen_range(0.05..1.0);
            let m = pca_fit(&x, PcaTarget::Threshold { tau, cap: None }).map_err(|e| e.to_string())?;
            let k = m.n_components();
            let cum: Vec<f64> = eig.iter().scan(0.0, |acc, (l, _)| {
                *acc += l / total;
                Some(*acc)
            }).collect();
            check(cum[k - 1] >= tau - 1e-9, || format!("case {case}: k={k} explains {} < tau {tau}", cum[k - 1]))?;
            check(k == 1 || cum[k - 2] < tau, || format!("case {case}: k={k} not minimal for tau {tau}"))?;
            let own = cumulative_explained_variance(&m);
            check((own[k - 1] - cum[k - 1]).abs() <= 1e-8, || format!("case {case}: cumulative ratio mismatch"))?;
            thresholds += 1;
        }
    }
    check(var_err <= 1e-8, || format!("explained variance error {var_err:e}"))?;
    check(vec_err <= 1e-8, || format!("component error {vec_err:e}"))?;
    Ok(format!("200 matrices, {thresholds} thresholds; variance err {var_err:.1e}, component err {vec_err:.1e}"))
}

/// Projected accelerated gradient on the box-and-equality constrained dual.
/// Returns (alpha, bias).
fn qp_oracle(k: &[f64], y: &[f64], c: f64) -> (Vec<f64>, f64) {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let project = |v: &[f64]| -> Vec<f64> {
        let clip = |mu: f64| -> Vec<f64> { v.iter().zip(y).map(|(vi, yi)| (vi - mu * yi).clamp(0.0, c)).collect() };
        let resid = |mu: f64| -> f64 { clip(mu).iter().zip(y).map(|(a, yi)| a * yi).sum() };
        let (mut lo, mut hi) = (-1.0, 1.0);
        while resid(lo) < 0.0 {
            lo *= 2.0;
        }
        while resid(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if resid(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        clip(0.5 * (lo + hi))
    };
    let lip = (0..n).map(|i| (0..n).map(|j| q(i, j).abs()).sum::<f64>()).fold(1e-12, f64::max);
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..20_000 {
        let g: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q(i, j) * z[j]).sum::<f64>() - 1.0).collect();
        let step: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - gi / lip).collect();
        let next = project(&step);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = next.iter().zip(&a).map(|(n1, a0)| n1 + (t - 1.0) / t_next * (n1 - a0)).collect();
        a = next;
        t = t_next;
    }
    let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q(i, j) * a[j]).sum::<f64>() - 1.0).collect();
    let eps = 1e-7 * c;
    let (mut ub, mut lb, mut s, mut cnt) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0);
    for i in 0..n {
        let yg = y[i] * grad[i];
        if a[i] >= c - eps {
            if y[i] < 0.0 {
                ub = ub.min(yg)
            } else {
                lb = lb.max(yg)
            }
        } else if a[i] <= eps {
            if y[i] > 0.0 {
                ub = ub.min(yg)
            } else {
                lb = lb.max(yg)
            }
        } else {
            s += yg;
            cnt += 1;
        }
    }
    let rho = if cnt > 0 { s / cnt as f64 } else { (ub + lb) / 2.0 };
    (a, -rho)
}

fn svm_oracle() -> Outcome {
    const TOL: f64 = 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut compared, mut boundary, mut worst_kkt) = (0usize, 0usize, 0.0f64);
    for case in 0..500 {
        let n = rng.gen_range(2..=15);
        let dim = rng.gen_range(1..=3);
        let c = [0.1, 1.0, 10.0][rng.gen_range(0..3)];
        let gap = rng.gen_range(0.0..1.5);
        let mut y: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let x: Vec<Vec<f64>> = y
            .iter()
            .map(|yi| (0..dim).map(|j| rng.gen_range(-1.0..1.0) + if j == 0 { yi * gap / 2.0 } else { 0.0 }).collect())
            .collect();
        let labels: Vec<&str> = y.iter().map(|&v| if v > 0.0 { "a" } else { "b" }).collect();
        let params = SvmParams::linear(c);
        let model = svm_train(&x, &labels, &params).map_err(|e| format!("case {case}: {e}"))?;
        let mach = &model.machines[0];
        check(model.classes == ["a", "b"] && mach.positive == 0, || "unexpected class order".into())?;

        // Recover per-point alphas; support vectors keep training order.
        let mut alpha = vec![0.0; n];
        let mut next = 0;
        for (i, xi) in x.iter().enumerate() {
            if next < mach.support_vectors.len() && mach.support_vectors[next] == *xi && mach.signs[next] == y[i] {
                alpha[i] = mach.alphas[next];
                next += 1;
            }
        }
        check(next == mach.support_vectors.len(), || format!("case {case}: could not align support vectors"))?;
        let eq: f64 = alpha.iter().zip(&y).map(|(a, yi)| a * yi).sum();
        check(eq.abs() <= 1e-9 * c * n as f64, || format!("case {case}: sum alpha*y = {eq:e}"))?;
        for i in 0..n {
            let m = y[i] * mach.decision(&params, &x[i]);
            let viol = if alpha[i] <= 0.0 {
                (1.0 - m).max(0.0)
            } else if alpha[i] >= c * (1.0 - 1e-12) {
                (m - 1.0).max(0.0)
            } else {
                (m - 1.0).abs()
            };
            check(alpha[i] >= 0.0 && alpha[i] <= c * (1.0 + 1e-12), || format!("case {case}: alpha {} outside [0, C]", alpha[i]))?;
            worst_kkt = worst_kkt.max(viol);
        }

        let kmat: Vec<f64> = x.iter().flat_map(|a| x.iter().map(move |b| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>())).collect();
        let (oa, ob) = qp_oracle(&kmat, &y, c);
        let oracle_f = |p: &[f64]| -> f64 {
            x.iter().zip(&oa).zip(&y).map(|((xi, a), yi)| a * yi * xi.iter().zip(p).map(|(u, v)| u * v).sum::<f64>()).sum::<f64>() + ob
        };
        let probes: Vec<Vec<f64>> = x.iter().cloned().chain((0..10).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())).collect();
        for p in &probes {
            let fo = oracle_f(p);
            // Inside the solver tolerance the sign is not determined.
            if fo.abs() <= TOL {
                boundary += 1;
                continue;
            }
            let want = if fo > 0.0 { "a" } else { "b" };
            let got = model.predict_one(p).map_err(|e| e.to_string())?;
            check(got == want, || format!("case {case}: predicted {got}, oracle {want} (f = {fo:e})"))?;
            compared += 1;
        }
    }
    check(worst_kkt <= TOL, || format!("KKT violation {worst_kkt:e}"))?;
    Ok(format!("500 datasets, {compared} labels agree ({boundary} within ±{TOL} of the boundary skipped); worst KKT violation {worst_kkt:.1e}"))
}

fn read_tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn rfprint(args: &[&str], cwd: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rfprint")).args(args).current_dir(cwd).output().map_err(|e| e.to_string())?;
    check(out.status.success(), || format!("rfprint {args:?}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let sim = |out: &str, seed: &str| {
        rfprint(
            &["simulate", "--out", out, "--seed", seed, "--movement-reps", "2", "--workflow-reps", "2", "--duration-s", "0.05"],
            dir,
        )
    };
    sim("a", "17")?;
    sim("b", "17")?;
    sim("c", "18")?;
    let (ta, tb, tc) = (read_tree(&dir.join("a")), read_tree(&dir.join("b")), read_tree(&dir.join("c")));
    check(ta.len() > 400, || format!("only {} files", ta.len()))?;
    check(ta == tb, || "datasets with the same seed differ".into())?;
    check(ta != tc, || "datasets with different seeds are identical".into())?;
    let bytes: usize = ta.iter().map(|(_, b)| b.len()).sum();

    let train = |data: &str, out: &str| rfprint(&["train", "--manifest", &format!("{data}/manifest.csv"), "-o", out, "--kind", "all", "--fft-len", "4096"], dir);
    train("a", "a.model")?;
    train("b", "b.model")?;
    let ma = std::fs::read(dir.join("a.model")).map_err(|e| e.to_string())?;
    let mb = std::fs::read(dir.join("b.model")).map_err(|e| e.to_string())?;
    check(ma == mb, || "model files differ".into())?;
    Ok(format!("{} files ({bytes} bytes) and {}-byte model identical across runs", ta.len(), ma.len()))
}

fn movement_source(distances: Vec<f64>, speeds: Vec<f64>, reps: usize, seed: u64) -> SimulatedSource {
    let mut data = DatasetConfig::desk(seed);
    data.workflows = None;
    data.movements = Some(MovementGrid {
        classes: AxisSet::all(),
        distances_mm: distances,
        speeds_mm_s: speeds,
        reps,
    });
    SimulatedSource::new(data)
}

fn footer(report: &Report) -> Result<Vec<f64>, String> {
    let (_, cells) = report.tables[0].footer.as_ref().ok_or("report has no accuracy row")?;
    cells.iter().map(|c| c.ok_or_else(|| "missing accuracy cell".to_string())).collect()
}

fn baseline() -> Outcome {
    let source = movement_source(vec![BASELINE_DISTANCE_MM], vec![BASELINE_SPEED_MM_S], 100, 1);
    let report = movement_report(&source, &PipelineConfig::default(), ExperimentKind::Baseline).map_err(|e| e.to_string())?;
    let acc = footer(&report)?[0];
    let test_n = report.metrics[0].1.total();
    check(test_n == 140, || format!("test split has {test_n} samples"))?;
    check(acc >= 0.95, || format!("accuracy {acc:.4}"))?;
    Ok(format!("700 recordings, accuracy {acc:.4} on {test_n} held out"))
}

fn sweeps() -> Outcome {
    let cfg = PipelineConfig::default();
    let by_d = movement_report(&movement_source(DISTANCES_MM.to_vec(), vec![BASELINE_SPEED_MM_S], 30, 5), &cfg, ExperimentKind::DistanceSweep)
        .map_err(|e| e.to_string())?;
    let by_s = movement_report(&movement_source(vec![BASELINE_DISTANCE_MM], SPEEDS_MM_S.to_vec(), 30, 6), &cfg, ExperimentKind::SpeedSweep)
        .map_err(|e| e.to_string())?;
    for (r, cols) in [(&by_d, DISTANCES_MM.len()), (&by_s, SPEEDS_MM_S.len())] {
        for t in &r.tables {
            check(t.shape() == (7, cols), || format!("{} {} table is {:?}", r.kind, t.name, t.shape()))?;
        }
    }
    let acc_d = footer(&by_d)?;
    let acc_s = footer(&by_s)?;
    let min = acc_d.iter().chain(&acc_s).copied().fold(1.0, f64::min);
    check(min >= 0.5, || format!("accuracy cell {min:.3}; distance {acc_d:?}, speed {acc_s:?}"))?;

    let model = EmissionModel::default();
    let quiet = EmissionModel::default().noiseless();
    for axes in AxisSet::all() {
        for d in DISTANCES_MM {
            let specs: Vec<MovementSpec> = SPEEDS_MM_S.iter().map(|&s| MovementSpec::new(axes, s, d).unwrap()).collect();
            let expected: Vec<f64> = specs.iter().map(|sp| model.burst_energy(sp, 2e6, 0.25)).collect();
            check(expected.windows(2).all(|w| w[1] >= w[0]), || format!("{} d={d}: energy {expected:?}", axes.label()))?;
            let measured: Vec<f64> = specs
                .iter()
                .map(|sp| synth_movement(sp, &quiet, 2e6, 0.25, 9).map(|r| r.samples().iter().map(|z| z.norm_sqr()).sum::<f64>()))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            // Rendered tones carry random phases, so allow rounding-level slack.
            check(measured.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-3)), || format!("{} d={d}: rendered energy {measured:?}", axes.label()))?;
        }
    }
    Ok(format!("7x6 and 7x5 grids, min accuracy {min:.3}; energy non-decreasing in speed for 42 axis/distance pairs"))
}

fn workflows() -> Outcome {
    let mut data = DatasetConfig::desk(8);
    data.movements = None;
    data.workflows = Some(WorkflowGrid::standard(33));
    let report = workflow_eval(&SimulatedSource::new(data), &PipelineConfig::default()).map_err(|e| e.to_string())?;
    check(report.warnings.is_empty(), || report.warnings.join("; "))?;
    let rates = report.table("recovery_rate").ok_or("no recovery_rate table")?;
    check(rates.columns == ["Set 1", "Set 2", "Set 3"], || format!("columns {:?}", rates.columns))?;
    check(rates.shape().0 == 4, || format!("{} workflow rows", rates.shape().0))?;
    let set1: Vec<Option<f64>> = rates.rows.iter().map(|(_, v)| v[0]).collect();
    check(set1.iter().all(|v| *v == Some(1.0)), || format!("set 1 recovery {set1:?}"))?;
    let acc = footer(&report)?;
    check(acc[0] == 1.0, || format!("set 1 accuracy {}", acc[0]))?;
    check(acc[1] >= 0.88 && acc[2] >= 0.88, || format!("accuracy {acc:?}"))?;
    Ok(format!("accuracy per set {:.3} / {:.3} / {:.3}", acc[0], acc[1], acc[2]))
}

fn stft_grid() -> Outcome {
    let source = movement_source(vec![BASELINE_DISTANCE_MM], vec![BASELINE_SPEED_MM_S], 20, 3);
    let report = stft_sweep(&source, &PipelineConfig::default(), &StftSweepOptions::default()).map_err(|e| e.to_string())?;
    let acc = report.table("accuracy").ok_or("no accuracy table")?;
    let time = report.table("time_ms").ok_or("no time_ms table")?;
    check(acc.shape() == (3, 3) && time.shape() == (3, 3), || "grid is not 3x3".into())?;
    check(acc.cells().all(|c| matches!(c, Some(v) if (0.0..=1.0).contains(&v))), || "accuracy cell missing or out of range".into())?;
    let mut lines = Vec::new();
    for (window, t) in &time.rows {
        let t: Vec<f64> = t.iter().map(|c| c.unwrap_or(f64::NAN)).collect();
        check(t.windows(2).all(|w| w[1] > w[0]), || format!("{window} times not increasing: {t:?}"))?;
        lines.push(format!("{window} {:.2}/{:.2}/{:.2} ms", t[0], t[1], t[2]));
    }
    let min_acc = acc.cells().flatten().fold(1.0, f64::min);
    Ok(format!("{}; min accuracy {min_acc:.3}", lines.join(", ")))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "STFT and MFP match brute-force references", limit: Duration::from_secs(10), run: dsp_oracle },
        Criterion { id: 2, name: "band-pass filter contract", limit: Duration::from_secs(1), run: filter_contract },
        Criterion { id: 3, name: "PCA matches covariance eigendecomposition", limit: Duration::from_secs(30), run: pca_oracle },
        Criterion { id: 4, name: "SVM matches dual QP oracle and KKT", limit: Duration::from_secs(120), run: svm_oracle },
        Criterion { id: 5, name: "simulate and train are deterministic", limit: Duration::from_secs(600), run: determinism },
        Criterion { id: 6, name: "baseline movement accuracy >= 0.95", limit: Duration::from_secs(600), run: baseline },
        Criterion { id: 7, name: "distance and speed sweeps", limit: Duration::from_secs(1800), run: sweeps },
        Criterion { id: 8, name: "workflow reconstruction", limit: Duration::from_secs(600), run: workflows },
        Criterion { id: 9, name: "STFT window and length sweep", limit: Duration::from_secs(600), run: stft_grid },
    ];
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.limit => Err(format!("{detail}; took {:.1} s, limit {} s", took.as_secs_f64(), c.limit.as_secs())),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {}: {detail} [{:.1} s]", c.id, c.name, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {}: {why} [{:.1} s]", c.id, c.name, took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
