use std::path::Path;
use std::process::{Command, Output};

const WHEEL: &str = "5 8\n0 1\n0 2\n0 3\n0 4\n1 2\n2 3\n3 4\n1 4\n";

fn starc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starc"))
        .args(args)
        .env_remove("STARC_EXT_SYNTH")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn rpn_eval_single_edge() {
    let o = starc(&["rpn", "eval", "0 1 &", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 1\n");
}

#[test]
fn rpn_eval_rejects_bad_program() {
    let o = starc(&["rpn", "eval", "0 &", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rpn_find_wheel() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w4.txt", WHEEL);
    let o = starc(&["rpn", "find", &f, "--max-ops", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    let program = lines.next().unwrap();
    let ops: usize = lines.next().unwrap().trim_start_matches("ops: ").parse().unwrap();
    assert!(ops <= 6);
    let eval = starc(&["rpn", "eval", program, "--n", "5"]);
    let mut edges: Vec<&str> = WHEEL.lines().skip(1).collect();
    edges.sort_unstable();
    assert_eq!(stdout(&eval).lines().collect::<Vec<_>>(), edges);

    let o = starc(&["rpn", "find", &f, "--max-ops", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("not found within budget"));
}

#[test]
fn analyze_reports() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w4.txt", WHEEL);
    let o = starc(&["analyze", &f, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["aut_order"], "8");
    assert_eq!(v["star_greedy"], 8);
    assert!(v["star_opt"].as_u64().unwrap() <= 6);

    let e = write(dir.path(), "empty.txt", "7 0\n");
    let v: serde_json::Value = serde_json::from_slice(&starc(&["analyze", &e, "--json"]).stdout).unwrap();
    assert_eq!(v["complexity"]["c_bits"], v["complexity"]["kappa"]);

    let o = starc(&["analyze", &f, "--exact-max-ops", "6", "--truncate-budget", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("exact_note: budget exceeded"));
}

#[test]
fn missing_external_tool_keeps_native_result() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w4.txt", WHEEL);
    let o = starc(&["analyze", &f, "--ext-synth", "definitely-not-a-tool-xyz {in}"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("star_greedy: 8"));
    assert!(out.contains("star_ext: -"));
    assert!(out.contains("ext_note:"));
}

#[test]
fn er_is_deterministic_across_threads_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let o = starc(&[
            "--threads",
            threads,
            "er",
            "--n",
            "24",
            "--count",
            "10",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("1", "a.csv");
    let b = run("2", "b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("id,n,p,edges,c_bits,kappa,log2_aut,star_greedy,star_opt,star_ext,star_exact,seed\n"));
    assert_eq!(text.lines().count(), 11);

    let svg = dir.path().join("fig.svg");
    let o = starc(&[
        "plot",
        dir.path().join("a.csv").to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(svg).unwrap();
    assert_eq!(svg.matches("<circle").count(), 20);
    assert!(svg.contains(">star_greedy</text>") && svg.contains(">star_opt</text>"));
}

#[test]
fn plot_missing_column_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.csv", "c_bits,star_opt\n1,2\n");
    let o = starc(&["plot", &f, "--out", dir.path().join("x.svg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("enum");
    let o = starc(&["enumerate", "--n", "6", "--s-max", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("s=3: 6"));
    assert!(text.contains("marginals consistent: true"));
    assert!(text.contains("note: s=1:"));
    for f in ["exact_vs_opt.csv", "opt_vs_greedy.csv", "classes.csv", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let o = starc(&[
        "enumerate",
        "--n",
        "8",
        "--s-max",
        "5",
        "--truncate-budget",
        "500",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let table = std::fs::read_to_string(out.join("exact_vs_opt.csv")).unwrap();
    assert!(table.starts_with("# truncated"));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(starc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(starc(&["er", "--count", "many"]).status.code(), Some(1));
    assert_eq!(starc(&["--help"]).status.code(), Some(0));
    assert_eq!(starc(&["analyze", "/no/such/file"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.txt", "3 1\n0 0\n");
    assert_eq!(starc(&["analyze", &f]).status.code(), Some(2));
}
