use std::process::{Command, Output};

fn permuton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permuton"))
        .args(args)
        .env_remove("PERMUTON_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_commands() {
    let o = permuton(&["expectation", "--pattern", "132"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).split_whitespace().next(), Some("1/8"));
    let o = permuton(&["joint", "--patterns", "12,123"]);
    assert_eq!(stdout(&o).split_whitespace().next(), Some("43/280"));
    let o = permuton(&["moment", "--pattern", "12", "--order", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], "7/40");
    assert_eq!(v["order"], 3);
}

#[test]
fn exit_codes() {
    let o = permuton(&["decompose", "--perm", "2 4 1 3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not separable"));
    let o = permuton(&["moment", "--pattern", "12", "--order", "4", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(3));
    let o = permuton(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
    let o = permuton(&["expectation"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_lists_every_subcommand() {
    let o = permuton(&["--help"]);
    assert!(o.status.success());
    let help = stdout(&o);
    for cmd in [
        "sample-perm",
        "sample-tree",
        "occ",
        "decompose",
        "expectation",
        "moment",
        "joint",
        "lambda-estimate",
        "occ-dist",
        "tree-uniformity",
        "sign-balance",
        "leaf-stat",
        "permuton",
        "excursion",
    ] {
        assert!(help.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn seed_comes_from_environment_and_is_echoed() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_permuton"))
            .args(["sample-perm", "--n", "30"])
            .env("PERMUTON_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b) = (run("42"), run("42"));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("# seed=42\n"));
    let o = permuton(&["sample-perm", "--n", "5"]);
    assert!(stdout(&o).starts_with("# seed="));
}

#[test]
fn sampled_permutation_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["text", "csv", "json"] {
        let path = dir.path().join(format!("perm.{format}"));
        let path = path.to_str().unwrap();
        let o = permuton(&[
            "sample-perm", "--n", "20", "--seed", "3", "--format", format, "--output", path,
        ]);
        assert!(o.status.success());
        let o = permuton(&["decompose", "--perm", &format!("@{path}")]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let tree = stdout(&o);
        // Decomposing and reading the tree back gives the same permutation.
        let t: permuton::SignedTree = tree.trim().parse().unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let p = permuton::cli::parse_permutation_text(&text).unwrap();
        assert_eq!(t.perm(), p);
    }
}

#[test]
fn experiment_reports() {
    let o = permuton(&[
        "tree-uniformity", "--k", "3", "--n", "50", "--trials", "200", "--seed", "1",
        "--format", "json", "--threads", "1",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["experiment"], "tree-uniformity");
    assert_eq!(v["params"]["seed"], 1);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "uniform_binary_shapes"));

    let o = permuton(&[
        "lambda-estimate", "--pattern", "12", "--excursions", "5", "--grid", "64", "--points",
        "50", "--seed", "2", "--format", "csv",
    ]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("# seed=2"));
    assert_eq!(lines.next(), Some("index,value"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = |t: &'static str| {
        vec![
            "occ-dist", "--pattern", "12", "--n", "200", "--perms", "12", "--trials", "100",
            "--seed", "6", "--format", "json", "--threads", t,
        ]
    };
    assert_eq!(permuton(&args("1")).stdout, permuton(&args("3")).stdout);
}

#[test]
fn permuton_grid_rows_run_upward() {
    let o = permuton(&["permuton", "--perm", "21", "--resolution", "2", "--format", "csv"]);
    assert_eq!(stdout(&o), "0,0.5\n0.5,0\n");
}
