use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nilmodel"))
}

fn configs(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    p.to_string_lossy().into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nilmodel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn bch_class_2() {
    let o = run(&["bch", "--class", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "X + Y + 1/2 [X,Y]\n");
}

#[test]
fn bch_class_3_has_twelfths() {
    let o = run(&["bch", "--class", "3"]);
    assert_eq!(
        stdout(&o),
        "X + Y + 1/2 [X,Y] + 1/12 [X,[X,Y]] - 1/12 [Y,[X,Y]]\n"
    );
}

#[test]
fn words_class_1() {
    let o = run(&["words", "--class", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("sum class 1: w=x y, m=1, n=2,"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn word_certificate_hashes() {
    let o = run(&[
        "words",
        "--class",
        "2",
        "--iterate",
        "3",
        "--json",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["pass"], true);
    let full = v["result"]["certificates"].as_array().unwrap();
    let hashes = v["certificates"].as_array().unwrap();
    assert_eq!(full.len(), 2);
    for (c, h) in full.iter().zip(hashes) {
        let expected = hex::encode(Sha256::digest(c.to_string().as_bytes()));
        assert_eq!(h["sha256"], expected.as_str());
        assert_eq!(h["target"], c["target"]);
    }
    assert_eq!(full[0]["word"], "x y^2 x");
    assert_eq!(full[0]["m"], "2");
    assert_eq!(v["result"]["iterated"]["multiplier"], "4");
    assert_eq!(v["result"]["iterated"]["verified"], true);
}

#[test]
fn counterexample_passes() {
    let o = run(&["verify", "counterexample", "--k", "3", "--n-max", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("min_nonzero_k_fold 22/9"), "{s}");
    assert!(s.contains("bound_k_minus_1 PASS"));
    assert!(s.ends_with("powers PASS\n"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["bch"],
        vec!["verify", "counterexample", "--k", "1", "--n-max", "8"],
        vec!["pisot", "gen", "--max-exp", "3", "--d", "4"],
        vec!["pisot", "gen", "--max-exp", "3", "--a", "2", "--b", "0"],
        vec!["scheme", "build", "--config", "/nonexistent/scheme.toml"],
        vec!["decompose", "--builtin", "octonions"],
        vec!["verify", "delone"],
    ] {
        let o = run(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn window_dimension_mismatch_exits_2() {
    let cfg = tmp("badwindow.toml");
    std::fs::write(
        &cfg,
        "[field]\nd = 2\n[algebra]\nbuiltin = \"heisenberg\"\n[lattice]\ndenominators = [1, 1, 2]\n[window]\nbounds = [\"1\"]\n[region]\nradius = 4\n",
    )
    .unwrap();
    let o = run(&["modelset", "gen", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("window"));
}

#[test]
fn closure_failure_exits_1_with_witness() {
    let cfg = tmp("unclosed.toml");
    std::fs::write(
        &cfg,
        "[field]\nd = 2\n[algebra]\nbuiltin = \"heisenberg\"\n[lattice]\ndenominators = [1, 1, 1]\n",
    )
    .unwrap();
    let o = run(&[
        "scheme",
        "build",
        "--json",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["pass"], false);
    assert_eq!(v["result"]["closure"]["witness"]["coordinate"], 2);
}

#[test]
fn scheme_build_filiform() {
    let o = run(&["scheme", "build", "--config", &configs("filiform4.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("weights [1, 1, 2, 3]"));
}

#[test]
fn pisot_failure_exits_1() {
    let o = run(&["verify", "delone", "--pisot-max-exp", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("covering_stable FAIL"));
}

#[test]
fn extend_hom_examples() {
    let o = run(&[
        "extend-hom",
        "--json",
        "--spec",
        &configs("abelianize.toml"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(
        v["result"]["matrix"],
        serde_json::json!([["1", "0", "0"], ["0", "1", "0"]])
    );
    let o = run(&["extend-hom", "--json", "--spec", &configs("not_a_hom.toml")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        json(&o)["result"]["witness"],
        serde_json::json!({ "i": 1, "j": 2 })
    );
}

#[test]
fn decompose_mixed_basis() {
    let o = run(&[
        "decompose",
        "--json",
        "--algebra",
        &configs("h3_plus_line.alg"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["factor_dims"], serde_json::json!([1, 3]));
    let o = run(&["decompose", "--json", "--builtin", "filiform4"]);
    assert_eq!(json(&o)["result"]["factor_dims"], serde_json::json!([4]));
}

#[test]
fn modelset_jsonl_and_csv() {
    let h3 = configs("heisenberg.toml");
    let o = run(&["modelset", "gen", "--config", &h3, "--radius", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    let head: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(head["config"]["patch"]["radius"], "2");
    assert_eq!(head["config"]["seed"], 0);
    let n: usize = head["result"]["points"].as_str().unwrap().parse().unwrap();
    assert_eq!(lines.count(), n);
    let o = run(&["plot-data", "--config", &h3, "--radius", "2"]);
    let s = stdout(&o);
    assert!(s.starts_with("x1,x2,x3,star1,star2,star3\n"));
    assert_eq!(s.lines().count(), n + 1);
}

#[test]
fn out_file_gets_artifact() {
    let path = tmp("powers.json");
    let o = run(&[
        "verify",
        "powers",
        "--config",
        &configs("heisenberg.toml"),
        "--radius",
        "10",
        "--k",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# nilmodel"));
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "verify powers");
    assert_eq!(v["pass"], true);
}

#[test]
fn tolerance_is_recorded() {
    let o = run(&[
        "verify",
        "delone",
        "--json",
        "--tolerance",
        "0.25",
        "--config",
        &configs("heisenberg.toml"),
        "--radius",
        "4",
    ]);
    assert_eq!(json(&o)["config"]["thresholds"]["covering_rel_tol"], 0.25);
}

#[test]
fn output_is_byte_deterministic() {
    let h3 = configs("heisenberg.toml");
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "verify", "approx", "--config", &h3, "--radius", "6", "--full",
        ],
        vec![
            "verify",
            "logimage",
            "--config",
            &h3,
            "--radius",
            "6",
            "--small",
            "1",
            "--large",
            "3/2",
            "--samples",
            "50",
        ],
        vec!["modelset", "gen", "--config", &h3, "--radius", "3"],
        vec!["words", "--class", "3"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let mut outs = Vec::new();
        for threads in ["1", "4"] {
            let path = tmp(&format!("det{i}-{threads}"));
            let mut a = args.clone();
            a.extend([
                "--threads",
                threads,
                "--seed",
                "11",
                "--out",
                path.to_str().unwrap(),
            ]);
            let o = run(&a);
            assert!(
                matches!(o.status.code(), Some(0 | 1)),
                "{a:?}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
            outs.push((o.status.code(), o.stdout, std::fs::read(&path).unwrap()));
        }
        assert!(outs[0] == outs[1], "{args:?} differs across runs");
    }
}
