use std::path::Path;
use std::process::{Command, Output};

fn pairinv(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pairinv"));
    cmd.args(args).env_remove("PAIRINV_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("PAIRINV_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bracket_prints_reference_values() {
    let o = pairinv(&["bracket", "--mode", "traceless", "--n", "4", "B^2", "A^4B"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-4*T(A^3B^2) - 4*T(A^2BAB)");
    let o = pairinv(&["bracket", "--mode", "generic", "--n", "4", "X", "Y"], None);
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pairinv(&["table", "--n", "5", "--max-degree", "6"], None).status.code(), Some(2));
    assert_eq!(pairinv(&["bracket", "A^2", "Q"], None).status.code(), Some(2));
    assert_eq!(pairinv(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn mine_verify_hilbert_map_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rel = dir.path().join("rel3.txt");
    let log = dir.path().join("log3.txt");
    let rel_s = rel.to_str().unwrap();
    let o = pairinv(
        &["mine", "--n", "3", "--max-degree", "12", "--out", rel_s, "--log", log.to_str().unwrap()],
        Some(dir.path()),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&rel).unwrap();
    assert!(text.starts_with("# relations v1 n=3 max_degree=12"));
    assert_eq!(text.lines().filter(|l| l.starts_with("(6,6):")).count(), 1);
    assert!(std::fs::read_to_string(&log).unwrap().contains("bidegree (6,6)"));
    assert!(dir.path().join("brackets-v1.txt").exists());

    let o = pairinv(&["verify", "--n", "3", "--relations", rel_s, "--trials", "5"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 of 1 relations vanish"));

    let o = pairinv(&["hilbert", "--n", "3", "--max-degree", "12", "--relations", rel_s], None);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "12 2051 238 239 1 0"), "{}", stdout(&o));

    let image = dir.path().join("cm3.txt");
    let o = pairinv(
        &["map", "--n", "3", "--target", "cm", "--relations", rel_s, "--out", image.to_str().unwrap()],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("convention a10"));
    assert!(std::fs::read_to_string(&image).unwrap().contains("target=cm3"));
    let o = pairinv(&["verify", "--n", "3", "--relations", image.to_str().unwrap()], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("sampler=cm"));
}

#[test]
fn verify_reports_a_false_relation() {
    let dir = tempfile::tempdir().unwrap();
    let rel = dir.path().join("bad.txt");
    std::fs::write(&rel, "# relations v1 n=3 max_degree=4 seed=1\n(2,2): a4^2 - a3*a5\n").unwrap();
    let o = pairinv(&["verify", "--n", "3", "--relations", rel.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn hilbert_without_relations_flags_the_deficit() {
    let o = pairinv(&["hilbert", "--n", "3", "--max-degree", "12"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn table_writes_header_and_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.txt");
    let o = pairinv(&["--jobs", "1", "table", "--n", "4", "--max-degree", "5", "--out", out.to_str().unwrap()], None);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# expr-table v1 n=4"));
    assert!(text.contains("order=grevlex"));
}

#[test]
fn accounting_matches() {
    let o = pairinv(&["accounting"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("primary=17 secondary=48"));
    assert!(stdout(&o).lines().any(|l| l == "match"));
}

#[test]
fn corrupt_cache_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("brackets-v1.txt"), "garbage\n").unwrap();
    let o = pairinv(&["bracket", "B^2", "A^4B"], Some(dir.path()));
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignoring bracket cache"));
}
