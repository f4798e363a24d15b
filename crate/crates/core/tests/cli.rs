use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sweep-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn sweep(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sweep"));
    cmd.args(args);
    if let Some(n) = threads {
        cmd.env("SWEEP_THREADS", n.to_string());
    }
    cmd.output().unwrap()
}

const RUN: [&str; 12] = [
    "--lattice", "rhombic-open", "-L", "4,5", "-p", "0.01:0.03:0.01", "--alpha", "1", "-N", "1,4", "--trials", "40",
];

#[test]
fn repeated_runs_write_identical_csv() {
    let dir = scratch("repeat");
    let mut csvs = Vec::new();
    for (i, threads) in [1, 8, 1].into_iter().enumerate() {
        let out = dir.join(format!("run{i}.csv"));
        let mut args = RUN.to_vec();
        args.extend(["--seed", "5", "--out", out.to_str().unwrap()]);
        let o = sweep(&args, Some(threads));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(fs::read(&out).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    assert!(text.starts_with("L,p,q,N,trials,failures,p_L,ci_low,ci_high,seed\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2);
}

#[test]
fn dumped_spec_reproduces_the_run() {
    let dir = scratch("spec");
    let mut args = RUN.to_vec();
    args.extend(["--seed", "9"]);
    let direct = sweep(&args, None);
    assert!(direct.status.success());
    args.push("--dump-spec");
    let spec = sweep(&args, None);
    assert!(spec.status.success());
    let path = dir.join("spec.json");
    fs::write(&path, &spec.stdout).unwrap();
    let replay = sweep(&["--spec", path.to_str().unwrap()], None);
    assert!(replay.status.success());
    assert_eq!(direct.stdout, replay.stdout);
}

#[test]
fn trial_records_and_fit_summary() {
    let dir = scratch("fit");
    let (csv, jsonl) = (dir.join("agg.csv"), dir.join("trials.jsonl"));
    let o = sweep(
        &[
            "--lattice", "rhombic-periodic", "-L", "4,6", "-p", "0.15,0.2,0.25,0.3", "--alpha", "1", "--trials", "60",
            "--out", csv.to_str().unwrap(), "--trials-out", jsonl.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    let records = fs::read_to_string(&jsonl).unwrap();
    assert_eq!(records.lines().count(), 2 * 4 * 60);
    let first: serde_json::Value = serde_json::from_str(records.lines().next().unwrap()).unwrap();
    assert!(first.get("seed").is_some() && first.get("outcome").is_some());
    let fit = sweep(&["--fit-sustainable", csv.to_str().unwrap()], None);
    assert!(fit.status.success());
    assert!(String::from_utf8_lossy(&fit.stdout).contains("N=1 crossing"));
}

#[test]
fn export_lattice_lists_every_element() {
    let path = scratch("export").join("l3.txt");
    let o = sweep(&["--lattice", "rhombic-open", "-L", "3", "--export-lattice", path.to_str().unwrap()], None);
    assert!(o.status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("lattice rhombic-open 3\n"));
    assert!(text.lines().any(|l| l.starts_with("f ")));
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        vec!["-L", "4", "-p", "1.5"],
        vec!["-p", "0.1"],
        vec!["--lattice", "rhombic-periodic", "-L", "3", "-p", "0.1"],
        vec!["-L", "4", "-p", "0.1", "--order", "+++,---"],
    ] {
        let o = sweep(&args, None);
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
    assert!(!sweep(&["-L", "4", "-p", "0.1"], Some(0)).status.success());
}
