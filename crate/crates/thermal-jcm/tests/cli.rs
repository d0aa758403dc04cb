use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-jcm"))
        .args(args)
        .current_dir(dir)
        .env_remove("THERMAL_JCM_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn table_one_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["reproduce", "--table", "1", "--out", "t1.csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "label,min,max");
    assert_eq!(lines.len(), 7);
    let first: Vec<f64> = lines[1].split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    assert!((first[0] + 0.227).abs() < 2e-3 && (first[1] - 0.199).abs() < 2e-3, "{first:?}");
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t1.json")).unwrap()).unwrap();
    assert_eq!(meta["subcommand"], "reproduce");
    assert_eq!(meta["config"]["table"], "1");
    assert!(meta["version"].is_string());
}

#[test]
fn figure_one_has_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["reproduce", "--figure", "1", "--svg", "f1.svg"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("figure1.csv")).unwrap();
    assert!(csv.starts_with("t,sigma_z,w0_1,w1_1,w2_1,w3_1,w0_2,w1_2,w2_2,w3_2\n"));
    assert_eq!(csv.lines().count(), 10_002);
    // atom starts in the ground state at zero temperature
    let s0: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((s0 + 1.0).abs() < 1e-12);
    for line in csv.lines().skip(1) {
        assert!(line.split(',').all(|x| x.parse::<f64>().unwrap().is_finite()));
    }
    assert!(fs::read_to_string(dir.path().join("f1.svg")).unwrap().contains("<polyline"));
}

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep-theta", "--alpha", "4", "--points", "9", "--out"];
    let a = [&args[..], &["a.csv"]].concat();
    let b = [&args[..], &["b.csv"]].concat();
    assert_eq!(code(&bin(dir.path(), &a)), 0);
    assert_eq!(code(&bin(dir.path(), &b)), 0);
    let fa = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(fa, fs::read(dir.path().join("b.csv")).unwrap());
    assert!(String::from_utf8(fa).unwrap().starts_with("theta,t_max,t_min,T,ln_T\n"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_thermal-jcm"))
            .args(["sweep-theta", "--points", "5", "--out", out])
            .current_dir(dir.path())
            .env("THERMAL_JCM_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1", "one.csv")), 0);
    assert_eq!(code(&run("3", "three.csv")), 0);
    assert_eq!(fs::read(dir.path().join("one.csv")).unwrap(), fs::read(dir.path().join("three.csv")).unwrap());
    let bad = run("zero", "x.csv");
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("THERMAL_JCM_THREADS"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "# short trace\nalpha = 2\nt1 = 1\nsteps = 4\nout = from_file.csv\n").unwrap();
    let o = bin(dir.path(), &["inversion", "--config", "run.cfg", "--steps", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("from_file.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("from_file.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["alpha"], 2.0);
    assert_eq!(meta["config"]["steps"], 2);
}

#[test]
fn inconsistent_thermal_spec_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(dir.path(), &["inversion", "--beta", "1", "--theta", "0.1"])), 1);
    fs::write(dir.path().join("c.cfg"), "beta=1\ntheta=0.1\n").unwrap();
    let o = bin(dir.path(), &["inversion", "--config", "c.cfg"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("inconsistent thermal spec"));
}

#[test]
fn unknown_flag_and_domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(dir.path(), &["inversion", "--bogus", "1"])), 1);
    assert_eq!(code(&bin(dir.path(), &["nonsense"])), 1);
    let o = bin(dir.path(), &["inversion", "--kappa", "0"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate coupling"));
    assert_eq!(code(&bin(dir.path(), &["reproduce", "--figure", "12"])), 1);
}

#[test]
fn guard_trip_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["oracle-compare", "--alpha", "3", "--dim", "12"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("increase dim"));
}

#[test]
fn verify_subset_and_list() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["verify", "--identity", "comm_a_bn", "--identity", "arrangement_3", "--max-power", "3", "--dim", "16"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    let list = bin(dir.path(), &["verify", "--list"]);
    assert!(String::from_utf8_lossy(&list.stdout).contains("evolution_matrix"));
    assert_eq!(code(&bin(dir.path(), &["verify", "--identity", "nope"])), 1);
}

#[test]
fn failed_check_still_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    // an impossible tolerance forces a verification failure
    let o = bin(dir.path(), &["short-time", "--nbar", "0", "--rel-tol", "1e-12"]);
    assert_eq!(code(&o), 2);
    assert!(dir.path().join("short-time.csv").exists());
    let meta = fs::read_to_string(dir.path().join("short-time.json")).unwrap();
    assert!(meta.contains("failure"));
}

#[test]
fn spectrum_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(dir.path(), &["spectrum"])), 0);
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("kappa,n_ground,gap"));
    assert_eq!(lines.next(), Some("0,-1,1"));
    assert!(csv.lines().last().unwrap().starts_with("10,24,"));
}

#[test]
fn library_entry_point_reports_help() {
    assert_eq!(thermal_jcm::run(["thermal-jcm", "--version"]), 0);
    assert_eq!(thermal_jcm::run(["thermal-jcm", "reproduce"]), 1);
}
