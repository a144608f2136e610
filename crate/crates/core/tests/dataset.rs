use rfprint::iq::load_raw_cf32;
use rfprint::manifest::{Manifest, SampleKind};
use rfprint::simulate::{generate_dataset, DatasetConfig, PlannedSample, WorkflowGrid, MANIFEST_FILE, SIMULATION_META_FILE};

fn tiny(seed: u64) -> DatasetConfig {
    let mut cfg = DatasetConfig::desk(seed);
    cfg.movement_duration_s = 0.002;
    cfg.workflows = None;
    cfg
}

#[test]
fn movement_grid_writes_210_files() {
    let dir = tempfile::tempdir().unwrap();
    let written = generate_dataset(&tiny(1), dir.path()).unwrap();
    assert_eq!(written.len(), 210);

    let manifest = Manifest::load(dir.path().join(MANIFEST_FILE)).unwrap();
    assert_eq!(manifest.rows, written.rows);
    for row in &manifest.rows {
        let rec = load_raw_cf32(manifest.resolve(row), 2e6).unwrap();
        assert_eq!(rec.len(), 4000, "{}", row.path);
    }
    let meta = std::fs::read_to_string(dir.path().join(SIMULATION_META_FILE)).unwrap();
    assert!(meta.contains("synthetic=true"));
}

#[test]
fn generation_is_a_pure_function_of_config() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = tiny(9);
    cfg.movements.as_mut().unwrap().classes.truncate(2);
    cfg.workflows = Some(WorkflowGrid {
        reps: 1,
        ..WorkflowGrid::standard(1)
    });
    let ma = generate_dataset(&cfg, a.path()).unwrap();
    generate_dataset(&cfg, b.path()).unwrap();
    for row in &ma.rows {
        let fa = std::fs::read(a.path().join(&row.path)).unwrap();
        let fb = std::fs::read(b.path().join(&row.path)).unwrap();
        assert!(fa == fb, "{} differs", row.path);
    }
    assert_eq!(
        std::fs::read(a.path().join(MANIFEST_FILE)).unwrap(),
        std::fs::read(b.path().join(MANIFEST_FILE)).unwrap()
    );
    assert!(ma.rows.iter().any(|r| r.kind == SampleKind::Workflow && r.set_id == Some(3)));
}

#[test]
fn paper_scale_counts() {
    let plan = DatasetConfig::paper_scale(0).plan();
    let movements = plan.iter().filter(|p| matches!(p, PlannedSample::Movement { .. })).count();
    let workflows = plan.len() - movements;
    assert!(movements >= 7800, "{movements}");
    assert_eq!(workflows, 396);
}
