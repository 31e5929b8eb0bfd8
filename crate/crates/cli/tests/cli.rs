use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const C4: &str = "GRAPH v1\nN 4 M 4\n0 1\n0 3\n1 2\n2 3\n";

fn lcspanner(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcspanner"))
        .current_dir(dir)
        .args(args)
        .env_remove("LCSPAN_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn girth_of_four_cycle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c4.graph"), C4).unwrap();
    let out = lcspanner(dir.path(), &["girth", "c4.graph"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "4");
}

#[test]
fn verification_failure_prints_the_witness() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c4.graph"), C4).unwrap();
    let out = lcspanner(dir.path(), &["spanner-greedy", "c4.graph", "--k", "3", "-o", "h.subset"]);
    assert_eq!(out.status.code(), Some(0));

    let ok = lcspanner(dir.path(), &["spanner-verify", "c4.graph", "h.subset", "--k", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = lcspanner(dir.path(), &["spanner-verify", "c4.graph", "h.subset", "--k", "2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("edge 3 (2, 3)"), "{}", stdout(&bad));
}

#[test]
fn input_and_resource_errors_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.graph"), "GRAPH v1\nN 2 M 1\n0 0\n").unwrap();
    assert_eq!(lcspanner(dir.path(), &["girth", "bad.graph"]).status.code(), Some(2));
    assert_eq!(lcspanner(dir.path(), &["girth", "missing.graph"]).status.code(), Some(2));
    assert_eq!(lcspanner(dir.path(), &["gen-3sat5", "--vars", "4"]).status.code(), Some(2));

    let k6: String = {
        let mut s = String::from("GRAPH v1\nN 6 M 15\n");
        for u in 0..6 {
            for v in u + 1..6 {
                s.push_str(&format!("{u} {v}\n"));
            }
        }
        s
    };
    fs::write(dir.path().join("k6.graph"), k6).unwrap();
    let out = lcspanner(dir.path(), &["solve-spanner-exact", "k6.graph", "--k", "2", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_lcspanner"))
        .current_dir(dir.path())
        .args(["solve-spanner-exact", "k6.graph", "--k", "2"])
        .env("LCSPAN_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn planted_pipeline_writes_a_verified_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = lcspanner(
        dir.path(),
        &[
            "pipeline", "--vars", "3", "--ell", "1", "--alpha", "4", "--k", "3", "--seed", "7", "--planted",
            "--out-dir", "run",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    for name in [
        "formula.cnf",
        "label_cover.lc",
        "regularized.lc",
        "repeated.lc",
        "sampled.lc",
        "stripped.lc",
        "planted.label",
        "minrep.graph",
        "gadget.graph",
        "spanner.subset",
        "proper.subset",
        "cover.txt",
        "trace.json",
    ] {
        assert!(run.join(name).is_file(), "missing {name}");
    }
    let trace: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["schema"], "pipeline_trace_v1");
    assert_eq!(trace["supergirth"], "infinite");
    assert_eq!(trace["outcome"]["spanner_verified"], true);

    let verify = lcspanner(&run, &["spanner-verify", "gadget.graph", "spanner.subset", "--k", "3"]);
    assert_eq!(verify.status.code(), Some(0));
    let girth = lcspanner(&run, &["girth", "stripped.lc"]);
    assert_eq!(stdout(&girth).trim(), "inf");
}

#[test]
fn staged_commands_reproduce_the_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let steps: &[&[&str]] = &[
        &["gen-3sat5", "--vars", "6", "--seed", "3", "--planted", "-o", "f.cnf"],
        &["lc-from-3sat", "f.cnf", "-o", "a.lc"],
        &["regularize", "a.lc", "-o", "r.lc"],
        &["subsample", "r.lc", "--alpha", "1", "--k", "4", "--seed", "3", "-o", "s.lc"],
        &["strip-cycles", "s.lc", "--k", "4", "-o", "t.lc"],
        &["spanner-reduce", "t.lc", "--k", "3", "--copies", "3", "-o", "g.graph", "--meta", "g.json"],
        &["spanner-greedy", "g.graph", "--k", "3", "-o", "greedy.subset"],
        &["cover-from-spanner", "t.lc", "greedy.subset", "--k", "3", "--copies", "3", "-o", "c.cover"],
        &["spanner-from-cover", "t.lc", "c.cover", "--k", "3", "--copies", "3", "-o", "h.subset"],
        &["spanner-verify", "g.graph", "h.subset", "--k", "3"],
        &["make-proper", "t.lc", "h.subset", "--k", "3", "--copies", "3", "-o", "p.subset"],
        &["spanner-verify", "g.graph", "p.subset", "--k", "3"],
        &["cover-from-spanner", "t.lc", "h.subset", "--k", "3", "--copies", "3", "-o", "back.cover"],
        &["minrep-expand", "t.lc", "-o", "m.graph"],
    ];
    for args in steps {
        let out = lcspanner(d, args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("g.json")).unwrap()).unwrap();
    assert_eq!(meta["schema"], "spanner_meta_v1");
    assert_eq!(meta["x"], 3);

    let short = lcspanner(d, &["spanner-reduce", "r.lc", "--k", "3"]);
    assert_eq!(short.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&short.stderr).contains("supergirth"));
}

#[test]
fn exact_solvers_on_a_tiny_instance() {
    let dir = tempfile::tempdir().unwrap();
    // XOR 4-cycle: three equality constraints and one inequality.
    let xor = "LC v1\nA 2 B 2 SA 2 SB 2 M 4\n\
               E 0 0 2\n0 0\n1 1\nE 0 1 2\n0 0\n1 1\nE 1 0 2\n0 0\n1 1\nE 1 1 2\n0 1\n1 0\n";
    fs::write(dir.path().join("xor.lc"), xor).unwrap();
    let value = lcspanner(dir.path(), &["solve-lc-exact", "xor.lc", "-o", "best.label"]);
    assert_eq!(value.status.code(), Some(0), "{}", String::from_utf8_lossy(&value.stderr));
    assert!(stdout(&value).starts_with("value 3/4"), "{}", stdout(&value));
    assert!(dir.path().join("best.label").is_file());
    let cover = lcspanner(dir.path(), &["solve-cover-exact", "xor.lc", "-o", "min.cover"]);
    assert_eq!(stdout(&cover).trim(), "minimum REP-cover size 5");
    let girth = lcspanner(dir.path(), &["girth", "xor.lc"]);
    assert_eq!(stdout(&girth).trim(), "4");
}

#[test]
fn artifacts_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = Command::new(env!("CARGO_BIN_EXE_lcspanner"))
            .current_dir(dir.path())
            .args(["pipeline", "--vars", "6", "--alpha", "1", "--k", "3", "--seed", "5", "--copies", "floor", "--planted"])
            .args(["--meta", "--out-dir", name])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let mut files: Vec<_> = fs::read_dir(dir.path().join(name))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        runs.push(files);
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);

    let stats = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_lcspanner"))
            .current_dir(dir.path())
            .args(["stats", "a/regularized.lc", "--alpha", "2", "--trials", "500", "--seed", "9"])
            .args(["--labeling", "a/planted.label"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    assert_eq!(stats("1"), stats("4"));
}
