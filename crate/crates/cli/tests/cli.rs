use std::process::{Command, Output};

fn ccl(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ccl"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("CCL_WORKERS", w),
        None => cmd.env_remove("CCL_WORKERS"),
    };
    cmd.output().expect("spawn ccl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn point_on_the_box_rarefaction() {
    let o = ccl(&["point", "-p", "burgers_box", "--x", "0.25", "--t", "0.5"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,t,u,J"));
    let r = &rows(&text)[0];
    assert_eq!(&r[..3], &[0.25, 0.5, 0.5]);
}

#[test]
fn traffic_reports_density_column() {
    let o = ccl(&["point", "-p", "lwr_traffic", "--x", "-29", "--t", "1"], None);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,t,u,J,q"));
    let r = &rows(&text)[0];
    assert_eq!(r[4], -r[2]);
    assert!((r[4] - 0.2).abs() < 1e-6);
}

#[test]
fn grid_is_identical_across_worker_counts() {
    let args = ["grid", "-p", "burgers_wiggly", "--nx", "60", "--nt", "7", "--parallel"];
    let one = ccl(&args, Some("1"));
    let four = ccl(&args, Some("4"));
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    assert_eq!(text.lines().count(), 1 + 60 * 7);
    // t-major: the first nx rows share the first time level
    let r = rows(&text);
    assert!(r[..60].iter().all(|row| row[1] == r[0][1]));
    assert!(r[60][1] > r[0][1]);
}

#[test]
fn reconstruct_lists_the_box_shock() {
    let o = ccl(&["reconstruct", "-p", "burgers_box", "--t", "1", "--samples", "11"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    let shocks: Vec<&str> = text.lines().filter(|l| l.starts_with("shock,")).collect();
    assert_eq!(shocks.len(), 1);
    let x: f64 = shocks[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!((x - 1.5).abs() < 1e-9);
    assert_eq!(text.lines().filter(|l| l.starts_with("sample,")).count(), 11);
}

#[test]
fn table_gate_sets_exit_code() {
    let ok = ccl(&["table", "-p", "burgers_box", "--nx", "10", "--nt", "10"], None);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("problem,nx,nt,x_min,x_max,t_min,t_max,max_abs,l1,excluded,runtime_s,points_per_s\n"));
    let fail = ccl(&["table", "-p", "burgers_box", "--nx", "10", "--nt", "10", "--gate=-1"], None);
    assert_eq!(fail.status.code(), Some(4));
    // the table still reaches stderr
    assert!(String::from_utf8_lossy(&fail.stderr).contains("burgers_box,10,10"));
    let none = ccl(&["table", "-p", "burgers_nwave"], None);
    assert_eq!(none.status.code(), Some(2));
}

#[test]
fn configuration_and_solver_errors() {
    assert_eq!(ccl(&["point", "-p", "no_such_problem", "--x", "0", "--t", "1"], None).status.code(), Some(2));
    assert_eq!(ccl(&["point", "-p", "burgers_box", "--x", "0", "--t", "1"], Some("zero")).status.code(), Some(2));
    assert_eq!(ccl(&["point", "-p", "burgers_box", "--x", "0", "--t", "-1"], None).status.code(), Some(3));
    assert_eq!(ccl(&["fv-compare", "-p", "harmonic_box", "--t", "1"], None).status.code(), Some(2));
}

#[test]
fn json_document_matches_catalog_problem() {
    let dir = std::env::temp_dir().join(format!("ccl-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sine.json");
    let doc = ccl(&["list", "--json", "burgers_sine"], None);
    assert!(doc.status.success());
    std::fs::write(&path, &doc.stdout).unwrap();

    let out = dir.join("grid.csv");
    let from_file = ccl(
        &["grid", "-p", path.to_str().unwrap(), "--nx", "9", "--nt", "3", "-o", out.to_str().unwrap()],
        None,
    );
    assert!(from_file.status.success(), "{}", String::from_utf8_lossy(&from_file.stderr));
    assert!(from_file.stdout.is_empty());
    let catalog = ccl(&["grid", "-p", "burgers_sine", "--nx", "9", "--nt", "3"], None);
    let a = rows(&std::fs::read_to_string(&out).unwrap());
    let b = rows(&stdout(&catalog));
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        assert!((ra[2] - rb[2]).abs() < 1e-12, "{ra:?} vs {rb:?}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fv_compare_writes_both_columns() {
    let o = ccl(&["fv-compare", "-p", "burgers_nwave", "--t", "1", "--ncells", "1000"], Some("2"));
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,fv,pointwise"));
    assert_eq!(text.lines().count(), 1001);
    let stderr = String::from_utf8_lossy(&o.stderr);
    let l1: f64 = stderr.rsplit("l1 = ").next().unwrap().trim().parse().unwrap();
    assert!(l1 < 5e-2, "{stderr}");
}
