use std::path::Path;
use std::process::{Command, Output};

fn rfprint(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfprint"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("run rfprint")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn simulate(dir: &Path) {
    ok(&rfprint(
        &["simulate", "--out", "data", "--no-workflows", "--movement-reps", "1", "--duration-s", "0.01", "--seed", "4"],
        dir,
    ));
}

#[test]
fn train_predict_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    simulate(dir);
    std::fs::write(dir.join("cfg.txt"), "# small frames for short clips\nfft_len=2048\nseed=3\n").unwrap();
    let out = ok(&rfprint(&["train", "--manifest", "data/manifest.csv", "-o", "m.model", "--config", "cfg.txt"], dir));
    assert!(out.contains("training accuracy"));
    let model = std::fs::read_to_string(dir.join("m.model")).unwrap();
    assert!(model.contains("config.fft_len=2048"));

    let out = ok(&rfprint(&["predict", "--model", "m.model", "data/movements/XZ_d50_s100_r000.cf32"], dir));
    assert!(out.trim_end().ends_with("\tXZ"), "{out}");

    let out = ok(&rfprint(&["eval", "--manifest", "data/manifest.csv", "--model", "m.model", "--csv", "r.csv"], dir));
    assert!(out.contains("held-out"));
    let csv = std::fs::read_to_string(dir.join("r.csv")).unwrap();
    assert!(csv.starts_with("experiment,table,row,column,value\n"));

    let out = ok(&rfprint(&["band-explore", "--manifest", "data/manifest.csv", "--csv", "psd.csv"], dir));
    assert!(out.contains("peaks (Hz)"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    simulate(dir);
    std::fs::write(dir.join("cfg.txt"), "fft_len=2048\n").unwrap();
    ok(&rfprint(
        &["train", "--manifest", "data/manifest.csv", "-o", "m.model", "--config", "cfg.txt", "--fft-len", "1024", "--window", "blackman"],
        dir,
    ));
    let model = std::fs::read_to_string(dir.join("m.model")).unwrap();
    assert!(model.contains("config.fft_len=1024"));
    assert!(model.contains("config.window=blackman"));
}

#[test]
fn failures_exit_nonzero_with_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cases: [(&[&str], &str); 4] = [
        (&["train", "--manifest", "missing.csv", "-o", "m.model"], "manifest:"),
        (&["predict", "--model", "missing.model", "x.cf32"], "model file:"),
        (&["train", "--manifest", "missing.csv", "-o", "m", "--band-high-hz", "2000000"], "config:"),
        (&["eval", "--manifest", "missing.csv", "--experiment", "baseline", "--window", "kaiser"], "config:"),
    ];
    for (args, stage) in cases {
        let out = rfprint(args, dir);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with(&format!("error: {stage}")), "{args:?}: {err}");
    }
}

#[test]
fn unreadable_sample_names_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    simulate(dir);
    for e in std::fs::read_dir(dir.join("data/movements")).unwrap() {
        let p = e.unwrap().path();
        if p.file_name().unwrap().to_str().unwrap().starts_with("Y_") {
            std::fs::remove_file(p).unwrap();
        }
    }
    let out = rfprint(&["train", "--manifest", "data/manifest.csv", "-o", "m.model", "--fft-len", "2048"], dir);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ingest:") && err.contains("movements/Y_"), "{err}");
}

#[test]
fn workflow_eval_reports_missing_sets() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(&rfprint(&["simulate", "--out", "wf", "--no-movements", "--workflow-reps", "5", "--seed", "2"], dir));
    // Keep only set 1.
    let path = dir.join("wf/manifest.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| l.starts_with("path") || l.contains("/set1/")).collect();
    std::fs::write(&path, kept.join("\n") + "\n").unwrap();

    let out = rfprint(&["workflow-eval", "--manifest", "wf/manifest.csv", "--fft-len", "8192"], dir);
    let stdout = ok(&out);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("set 2 missing") && stderr.contains("set 3 missing"), "{stderr}");
    assert!(stdout.contains("Set 1") && stdout.contains("Pick-and-Place"));
}
