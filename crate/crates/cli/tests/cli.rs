use std::process::{Command, Output};

fn jacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(rel: &str) -> String {
    format!("{}/../../data/{rel}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn dims_of_circle_space() {
    let o = jacobi(&["dims", "--space", "A", "--skeleton", "O", "--cap", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("skeleton\trelation-set\tdegree\traw-count\trank\tdim"));
    let dims: Vec<&str> = lines.map(|l| l.split('\t').next_back().unwrap()).collect();
    assert_eq!(dims, ["1", "1", "2", "3", "6"]);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["zk", "--tangle", &data("tangles/hopf.tng"), "--cap", "2"];
    let a = jacobi(&args);
    let b = jacobi(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_exit_codes() {
    let o = jacobi(&["verify", "ek-degree2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ek-degree2\tPASS"));
    let bad = jacobi(&["verify", "nonsense"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn guard_trips_name_skeleton_and_degree() {
    let o = jacobi(&["--guard-diagrams", "10", "dims", "--space", "A", "--skeleton", "O", "--cap", "4"]);
    assert!(!o.status.success());
    let msg = String::from_utf8(o.stderr).unwrap();
    assert!(msg.contains("resource guard") && msg.contains("degree"), "{msg}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = std::env::temp_dir().join(format!("jacobi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.tng");
    std::fs::write(&bad, "cn\ncn\n").unwrap();
    let o = jacobi(&["zk", "--tangle", bad.to_str().unwrap(), "--cap", "1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8(o.stderr).unwrap().contains("generator 2"));
}

#[test]
fn associator_file_round_trips_through_zk() {
    let dir = std::env::temp_dir().join(format!("jacobi-assoc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("phi.txt");
    assert!(jacobi(&["assoc", "solve", "--hcap", "3", "--out", file.to_str().unwrap()]).status.success());
    let tangle = data("tangles/unknot.tng");
    let with_file = jacobi(&["zk", "--tangle", &tangle, "--cap", "3", "--assoc", file.to_str().unwrap()]);
    let solved = jacobi(&["zk", "--tangle", &tangle, "--cap", "3"]);
    assert!(with_file.status.success());
    assert_eq!(with_file.stdout, solved.stdout);
}
