use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const K4: &str = "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

fn cavity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn manifest(output: &Path) -> Value {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    read_json(Path::new(&name))
}

fn gen_graph(dir: &TempDir, name: &str, z: &str, n: &str, seed: &str) -> PathBuf {
    let out = dir.path().join(name);
    let r = cavity(&["graph-gen", "--model", "gnp", "--z", z, "--n", n, "--seed", seed, "-o", path_str(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    out
}

#[test]
fn graph_gen_writes_edges_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = gen_graph(&dir, "g.edges", "3", "1000", "7");
    let text = std::fs::read_to_string(&out).unwrap();
    let header: Vec<usize> = text.lines().next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(header[0], 1000);
    assert_eq!(text.lines().count(), header[1] + 1);
    let g = cavity_core::io::parse_edge_list(&text).unwrap();
    assert!((g.mean_degree() - 3.0).abs() < 0.3);

    let m = manifest(&out);
    assert_eq!(m["command"], "graph-gen");
    assert_eq!(m["seeds"], serde_json::json!([7]));
    assert_eq!(m["parameters"]["n"], 1000);
    assert_eq!(m["parameters"]["model"], "gnp");
    assert!(m["wall_time"].as_f64().unwrap() >= 0.0);
    assert!(m["versions"].as_str().unwrap().contains("cavity-core"));
}

#[test]
fn missing_seed_is_generated_and_recorded() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.edges");
    let r = cavity(&["graph-gen", "--model", "regular", "--z", "3", "--n", "50", "-o", path_str(&out)]);
    assert!(r.status.success());
    let seed = manifest(&out)["seeds"][0].as_u64().unwrap();
    let again = dir.path().join("again.edges");
    let s = seed.to_string();
    cavity(&["graph-gen", "--model", "regular", "--z", "3", "--n", "50", "--seed", &s, "-o", path_str(&again)]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn coloring_k4_with_three_colors_fails() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("k4.edges");
    std::fs::write(&graph, K4).unwrap();
    let out = dir.path().join("k4.json");
    let r = cavity(&["color", "--graph", path_str(&graph), "--q", "3", "--seed", "1", "-o", path_str(&out)]);
    assert_eq!(r.status.code(), Some(1));
    let report = read_json(&out);
    assert_eq!(report["status"], "failed");
    assert!(report["failure"]["stage"].is_string());
    assert_eq!(manifest(&out)["results"]["status"], "failed");

    let ok = dir.path().join("k4q4.json");
    let col = dir.path().join("k4q4.col");
    let r = cavity(&[
        "color", "--graph", path_str(&graph), "--q", "4", "--seed", "1", "--coloring-out", path_str(&col), "-o",
        path_str(&ok),
    ]);
    assert!(r.status.success());
    let s = cavity_core::io::parse_coloring(&std::fs::read_to_string(&col).unwrap(), 4, 4).unwrap();
    let g = cavity_core::io::parse_edge_list(K4).unwrap();
    assert_eq!(cavity_core::coloring::energy(&g, &s).unwrap(), 0);
}

#[test]
fn bethe_csv_switches_on_at_the_onset() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bethe.csv");
    let r = cavity(&["bethe", "--z", "4", "--betaJ-grid", "0:1:0.01", "-o", path_str(&out)]);
    assert!(r.status.success());
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["betaJ", "m_C", "m", "E_link"]);
    let onset = (1.0f64 / 3.0).atanh();
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let bj: f64 = rec[0].parse().unwrap();
        let mc: f64 = rec[1].parse().unwrap();
        if bj < onset {
            assert_eq!(mc, 0.0, "βJ={bj}");
        } else {
            assert!(mc > 0.0, "βJ={bj}");
        }
        rows += 1;
    }
    assert_eq!(rows, 101);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x");
    let o = path_str(&out);
    assert_eq!(cavity(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cavity(&["bethe", "--z", "4", "-o", o]).status.code(), Some(2));
    assert_eq!(cavity(&["bethe", "--z", "4", "--betaJ-grid", "1:0:0.1", "-o", o]).status.code(), Some(2));
    assert_eq!(cavity(&["graph-gen", "--model", "gnp", "--z", "-1", "--n", "10", "-o", o]).status.code(), Some(2));
    assert_eq!(cavity(&["matching-ensemble", "--n", "3", "--samples", "1", "-o", o]).status.code(), Some(2));
    assert_eq!(
        cavity(&["matching-ensemble", "--n", "3", "--dist", "uniform-linear", "--A", "2", "--samples", "10", "-o", o])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_graph_file_is_a_failure() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("bad.edges");
    std::fs::write(&graph, "3 1\n2 1\n").unwrap();
    let out = dir.path().join("out.json");
    let r = cavity(&["sp-run", "--graph", path_str(&graph), "--q", "3", "--seed", "0", "-o", path_str(&out)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("i < j"));
}

#[test]
fn wp_from_a_legal_coloring_never_repaints() {
    let dir = TempDir::new().unwrap();
    let graph = gen_graph(&dir, "g.edges", "3", "500", "3");
    let report = dir.path().join("c.json");
    let col = dir.path().join("c.col");
    let r = cavity(&[
        "color", "--graph", path_str(&graph), "--q", "3", "--seed", "3", "--coloring-out", path_str(&col), "-o",
        path_str(&report),
    ]);
    assert!(r.status.success());
    let out = dir.path().join("wp.json");
    let r = cavity(&[
        "wp-run", "--graph", path_str(&graph), "--q", "3", "--init", "coloring", "--coloring", path_str(&col),
        "--seed", "1", "-o", path_str(&out),
    ]);
    assert!(r.status.success());
    let wp = read_json(&out);
    assert_eq!(wp["status"], "converged");
    assert_eq!(wp["transitions"]["other"], 0);
    assert_eq!(wp["histogram"]["contradiction"], 0);
}

/// Runs the same argv twice into different directories and compares the
/// primary outputs byte for byte.
fn assert_reproducible(args: impl Fn(&Path) -> Vec<String>, extra: &[&str]) {
    let runs: Vec<TempDir> = (0..2).map(|_| TempDir::new().unwrap()).collect();
    for dir in &runs {
        let argv = args(dir.path());
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let r = cavity(&argv);
        assert!(r.status.code() == Some(0) || r.status.code() == Some(1), "{argv:?}: {r:?}");
    }
    for name in std::iter::once("out").chain(extra.iter().copied()) {
        let a = std::fs::read(runs[0].path().join(name)).unwrap();
        let b = std::fs::read(runs[1].path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn every_subcommand_is_seed_reproducible() {
    let shared = TempDir::new().unwrap();
    let graph = gen_graph(&shared, "g.edges", "4.2", "2000", "11");
    let g = graph.to_str().unwrap().to_string();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let out = |d: &Path| d.join("out").to_str().unwrap().to_string();

    assert_reproducible(
        |d| [s(&["graph-gen", "--model", "poisson-m", "--z", "3", "--n", "3000", "--seed", "5", "-o"]), vec![out(d)]].concat(),
        &[],
    );
    assert_reproducible(|d| [s(&["bethe", "--z", "3", "--betaJ-grid", "0:2:0.05", "-o"]), vec![out(d)]].concat(), &[]);
    assert_reproducible(
        |d| [s(&["matching-ensemble", "--n", "5,20", "--dist", "uniform-linear", "--A", "0.5", "--samples", "50", "--seed", "9", "-o"]), vec![out(d)]].concat(),
        &[],
    );
    assert_reproducible(|d| [s(&["wp-run", "--q", "3", "--seed", "4", "--graph", &g, "-o"]), vec![out(d)]].concat(), &[]);
    assert_reproducible(|d| [s(&["sp-run", "--q", "3", "--seed", "4", "--graph", &g, "-o"]), vec![out(d)]].concat(), &[]);
    assert_reproducible(
        |d| {
            let col = d.join("col").to_str().unwrap().to_string();
            [s(&["color", "--q", "3", "--seed", "4", "--graph", &g, "--coloring-out", &col, "-o"]), vec![out(d)]].concat()
        },
        &["col"],
    );
    assert_reproducible(
        |d| {
            [
                s(&[
                    "complexity-scan", "--q", "3", "--z-min", "4.2", "--z-max", "4.8", "--step", "0.3", "-S", "1000",
                    "--sweeps", "20", "--samples", "1000", "--bisections", "1", "--seed", "2", "-o",
                ]),
                vec![out(d)],
            ]
            .concat()
        },
        &[],
    );
}
