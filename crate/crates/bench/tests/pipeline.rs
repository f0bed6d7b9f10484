use std::fs;
use std::path::Path;
use std::process::Command;

use rotaq_bench::report::{fit_report, scaling_csv};
use rotaq_bench::{emit_reports, run_experiment, Clocks, Dataset, Plan};

const PLAN: &str = r#"
name = "small grid"
seed = 11

[grid]
residues = [2, 3]
rotamers = [2, 3]

[[method]]
kind = "sv-qaoa"
trajectories = 3
p = 2
max_iterations = 40
fit_start_m = 4

[[method]]
kind = "sa"
trajectories = 5
fit_start_m = 4
sa = { max_iterations = 100 }
"#;

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn grid_run_resume_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("results");
    let plan = Plan::from_toml(PLAN).unwrap();

    let first = run_experiment(&plan, &out, Some(2)).unwrap();
    assert_eq!(first.computed.len(), 8);
    assert!(first.skipped.is_empty());

    let data = Dataset::load(&out).unwrap();
    assert_eq!(data.cells.len(), 8);
    assert_eq!(data.labels(), vec!["sv-qaoa".to_string(), "sa".to_string()]);
    for c in &data.cells {
        let records = data.records(c).unwrap();
        assert_eq!(records.len(), c.spec.trajectories);
        for r in records.iter().filter(|r| r.converged) {
            assert!((r.best_energy.unwrap() - c.spec.ground_energy).abs() <= 1e-9);
        }
    }
    // Sizes within a method are in qubit order.
    let ms: Vec<usize> = data.cells_for("sa").map(|c| c.spec.num_qubits).collect();
    assert_eq!(ms, vec![4, 6, 6, 9]);

    // A complete rerun does nothing.
    let again = run_experiment(&plan, &out, Some(2)).unwrap();
    assert!(again.computed.is_empty());
    assert_eq!(again.skipped.len(), 8);

    // Dropping one summary recomputes exactly that cell, with the same result.
    let victim = data.cells[5].spec.key();
    let path = out.join("cells").join(format!("{victim}.summary.json"));
    let before = fs::read(&path).unwrap();
    fs::remove_file(&path).unwrap();
    let resumed = run_experiment(&plan, &out, Some(1)).unwrap();
    assert_eq!(resumed.computed, vec![victim]);
    assert_eq!(fs::read(&path).unwrap(), before);

    // Reports are byte-identical across reruns.
    let r1 = tmp.path().join("r1");
    let r2 = tmp.path().join("r2");
    emit_reports(&data, &r1, Clocks::default(), 3).unwrap();
    emit_reports(&Dataset::load(&out).unwrap(), &r2, Clocks::default(), 3).unwrap();
    let a = read_dir_sorted(&r1);
    assert_eq!(a, read_dir_sorted(&r2));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        vec!["depth_table.csv", "fits.json", "scaling.csv", "success_sa.csv", "success_sv-qaoa.csv"]
    );
    let success = String::from_utf8(a[3].1.clone()).unwrap();
    assert_eq!(success.lines().next(), Some("Res.,Rot.,Total,Success Ratio"));
    assert_eq!(success.lines().count(), 5);
    assert_eq!(scaling_csv(&data).lines().count(), 9);

    let fits = fit_report(&data, None, Clocks::default());
    assert_eq!(fits.fits.len(), 2);
}

#[test]
fn changed_settings_make_new_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = Plan::from_toml(PLAN).unwrap();
    let mut small = plan.clone();
    small.grid = Some(rotaq_bench::plan::Grid {
        residues: vec![2],
        rotamers: vec![2],
    });
    run_experiment(&small, tmp.path(), None).unwrap();
    small.methods[1].trajectories = 6;
    let r = run_experiment(&small, tmp.path(), None).unwrap();
    assert_eq!(r.computed.len(), 1);
    assert_eq!(r.skipped.len(), 1);
    // The index only lists the plan's current cells.
    assert_eq!(Dataset::load(tmp.path()).unwrap().cells.len(), 2);
}

#[test]
fn oversized_instance_needs_a_reference_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[grid]\nresidues=[9]\nrotamers=[8]\n[[method]]\nkind=\"sa\"\ntrajectories=1\n";
    let plan = Plan::from_toml(text).unwrap();
    let err = run_experiment(&plan, tmp.path(), None).unwrap_err();
    assert!(err.to_string().contains("ground_energy"), "{err}");
}

#[test]
fn empty_results_directory_reports_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let data = Dataset::load(tmp.path()).unwrap();
    let files = emit_reports(&data, &tmp.path().join("rep"), Clocks::default(), 2).unwrap();
    assert_eq!(files.len(), 3);
    assert_eq!(
        fs::read_to_string(tmp.path().join("rep/scaling.csv")).unwrap(),
        "M,N,n,method,mean_cost,std_cost,convergence_ratio,converged,trajectories\n"
    );
}

#[test]
fn cli_depth_table_and_run() {
    let bin = env!("CARGO_BIN_EXE_bench");
    let out = Command::new(bin).args(["depth-table", "--max-size", "3"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2,2,XY-QAOA,6,9,"));
    assert!(text.contains("3,3,Baseline,16,16,"));

    let tmp = tempfile::tempdir().unwrap();
    let plan = tmp.path().join("plan.toml");
    fs::write(
        &plan,
        "seed = 2\n[grid]\nresidues=[2]\nrotamers=[2, 3]\n[[method]]\nkind=\"sa-discrete\"\ntrajectories=4\n",
    )
    .unwrap();
    let res = tmp.path().join("res");
    let status = Command::new(bin)
        .env("BENCH_WORKERS", "1")
        .args(["run", "--plan", plan.to_str().unwrap(), "--out", res.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(bin)
        .args(["report", "--in", res.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(res.join("reports/success_sa-discrete.csv").exists());

    let bad = Command::new(bin)
        .env("BENCH_WORKERS", "zero")
        .args(["run", "--plan", plan.to_str().unwrap(), "--out", res.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
