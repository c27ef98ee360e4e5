//! End-to-end tests of the `idc-bench` binary and its library entry points.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::Parser;
use idc_bench::args::Command as Sub;
use idc_bench::commands::{adversarial_stream, release_online};
use idc_bench::record::read_csv;
use idc_bench::{exit, Cli, ResultRecord, SCHEMA_VERSION};
use idc_release::graph::gnp;
use idc_release::idc::{FriezeKannan, Idc};
use idc_release::io::{read_graph, read_weighted, write_graph};
use idc_release::{compile_cut_query, DataHistogram, QueryTag, Universe};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_idc-bench"));
    c.env("RUST_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn idc-bench")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn records(path: &Path) -> Vec<ResultRecord> {
    read_csv(fs::File::open(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Row-major upper-triangular index of the pair `i < j`.
fn pair(v: usize, i: usize, j: usize) -> usize {
    i * v - i * (i + 1) / 2 + (j - i - 1)
}

/// Symmetric matrix with zero diagonal from a pair vector.
fn matrix(v: usize, w: &[f64]) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; v]; v];
    for i in 0..v {
        for j in i + 1..v {
            m[i][j] = w[pair(v, i, j)];
            m[j][i] = w[pair(v, i, j)];
        }
    }
    m
}

fn block_sum(m: &[Vec<f64>], s: &[usize], t: &[usize]) -> f64 {
    s.iter().flat_map(|&i| t.iter().map(move |&j| (i, j))).map(|(i, j)| m[i][j]).sum()
}

/// `max_{S,T} |M(S,T)|` by enumerating S; the best T for a fixed S takes
/// every column of one sign.
fn cut_norm(m: &[Vec<f64>]) -> f64 {
    let v = m.len();
    let mut best = 0.0f64;
    for mask in 0u32..1 << v {
        let mut cols = vec![0.0; v];
        for (_, row) in m.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1) {
            cols.iter_mut().zip(row).for_each(|(c, x)| *c += x);
        }
        let pos: f64 = cols.iter().filter(|c| **c > 0.0).sum();
        let neg: f64 = cols.iter().filter(|c| **c < 0.0).sum();
        best = best.max(pos).max(-neg);
    }
    best
}

#[test]
fn gen_graph_extremes_and_edge_count() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.txt");
    for (p, want) in [("0", 0.0), ("1", 45.0)] {
        ok(&["gen-graph", "--v", "10", "--p", p, "--out", s(&path)]);
        let g = read_graph(std::io::BufReader::new(fs::File::open(&path).unwrap())).unwrap();
        assert_eq!(g.n(), want, "p = {p}");
    }
    // |E| ~ Bin(N, p): every seed lands within three standard deviations
    let (v, p) = (40usize, 0.3);
    let n = (v * (v - 1) / 2) as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    for seed in 0..10 {
        let out = ok(&["gen-graph", "--v", "40", "--p", "0.3", "--seed", &seed.to_string()]);
        let g = read_graph(&out[..]).unwrap();
        assert!((g.n() - n * p).abs() <= 3.0 * sd, "seed {seed}: {} edges", g.n());
    }
    assert_eq!(code(&["gen-graph", "--v", "1", "--p", "0.5"]), exit::CONFIG);
}

#[test]
fn uniform_query_streams_are_reproducible_and_fair() {
    let a = ok(&["gen-queries", "--v", "20", "--k", "2000", "--seed", "7"]);
    assert_eq!(a, ok(&["gen-queries", "--v", "20", "--k", "2000", "--seed", "7"]));
    assert_ne!(a, ok(&["gen-queries", "--v", "20", "--k", "2000", "--seed", "8"]));

    let mut in_s = [0usize; 20];
    let mut in_t = [0usize; 20];
    let lines: Vec<&str> = std::str::from_utf8(&a).unwrap().lines().collect();
    assert_eq!(lines.len(), 2000);
    for line in &lines {
        let QueryTag::Cut(c) = serde_json::from_str(line).unwrap() else { panic!("not a cut: {line}") };
        c.s.iter().for_each(|&i| in_s[i] += 1);
        c.t.iter().for_each(|&i| in_t[i] += 1);
    }
    // membership ~ Bin(2000, 1/2): sd ~ 22.4, allow 4.5 sd over 40 counts
    for f in in_s.iter().chain(&in_t) {
        assert!((*f as f64 - 1000.0).abs() < 100.0, "frequency {f}");
    }
    // the adversarial mode reads the graph exactly and is gated
    if !cfg!(feature = "test-hooks") {
        assert_eq!(code(&["gen-queries", "--v", "8", "--k", "3", "--mode", "adversarial"]), exit::CONFIG);
    }
}

#[test]
fn adversarial_stream_picks_the_max_gap_cut() {
    let v = 8;
    let g = gnp(v, 0.5, &mut ChaCha20Rng::seed_from_u64(4)).unwrap();
    let (alpha, k) = (1.0, 12);
    let cuts = adversarial_stream(&g, k, alpha).unwrap();
    assert_eq!(cuts.len(), k);

    // replay the hypothesis and compare each cut with the exact maximum
    let u = *g.universe();
    let fk = FriezeKannan::new(u, g.n2()).unwrap();
    let mut h = fk.init();
    let mut updates = 0;
    for c in &cuts {
        let diff: Vec<f64> = g.weights().iter().zip(&h.weights).map(|(a, b)| a - b).collect();
        let m = matrix(v, &diff);
        let best = cut_norm(&m);
        let got = block_sum(&m, &c.s, &c.t).abs();
        assert!((got - best).abs() <= 1e-9 * best.max(1.0), "gap {got} vs max {best}");
        if got / 2.0 >= alpha {
            let q = compile_cut_query(&c.s, &c.t, &u).unwrap();
            h = fk.update(&h, &q, q.canonical(g.weights()).unwrap(), alpha).unwrap();
            updates += 1;
        }
    }
    assert!(updates > 0);
}

#[test]
fn zero_noise_online_errors_stay_below_the_threshold() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("online.csv");
    for idc in ["fk", "mw"] {
        let cli = Cli::try_parse_from([
            "idc-bench", "release-online", "--gen-v", "8", "--gen-p", "0.5", "--idc", idc, "--eps", "1",
            "--alpha-auto", "--k", "200", "--trials", "5", "--no-timing", "--out", s(&out),
        ])
        .unwrap();
        let Sub::ReleaseOnline(mut a) = cli.command else { unreachable!() };
        a.run.zero_noise = true;
        let status = release_online(&a).unwrap();
        assert!(!status.exhausted);
        let recs = records(&out);
        assert_eq!(recs.len(), 5);
        for r in &recs {
            let t = r.threshold.unwrap();
            assert!(r.max_error.unwrap() <= t + 1e-9, "{idc}: max error {:?} > T = {t}", r.max_error);
            assert_eq!(r.queries_answered, Some(200));
            assert!(r.updates.unwrap() <= r.budget.unwrap());
        }
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.txt");
    ok(&["gen-graph", "--v", "8", "--p", "0.5", "--out", s(&g)]);

    // usage errors
    assert_eq!(code(&["release-online", "--eps", "1", "--alpha", "1"]), exit::CONFIG);
    assert_eq!(code(&["release-online", "--graph", "/nonexistent/graph.txt", "--eps", "1", "--alpha", "1"]), exit::CONFIG);
    assert_eq!(code(&["release-online", "--graph", s(&g), "--eps", "-1", "--alpha", "1"]), exit::CONFIG);
    assert_eq!(code(&["release-online", "--graph", s(&g), "--eps", "1"]), exit::CONFIG);
    assert_eq!(code(&["release-offline", "--graph", s(&g), "--idc", "mm", "--eps", "1", "--alpha", "3"]), exit::CONFIG);
    // the median mechanism enumerates far more than the cap here
    assert_eq!(code(&["release-online", "--graph", s(&g), "--idc", "mm", "--eps", "1", "--alpha", "1"]), exit::TOY_SCALE_CAP);
    // a threshold far below the noise-free error forces an update per query
    let args = [
        "release-online", "--graph", s(&g), "--eps", "1000", "--alpha", "3", "--k", "500", "--sigma-const", "0.01",
        "--t-const", "0.01", "--out", &format!("{}/x.csv", dir.path().display()),
    ];
    assert_eq!(code(&args), exit::BUDGET_EXHAUSTED);
    let r = &records(&dir.path().join("x.csv"))[0];
    assert_eq!(r.exhausted, Some(true));
    assert_eq!(r.updates, r.budget);
    assert_eq!(code(&["release-online", "--graph", s(&g), "--eps", "1", "--alpha", "30", "--no-timing"]), exit::OK);
}

#[test]
fn rr_synth_reports_exact_residuals_on_small_graphs() {
    let dir = TempDir::new().unwrap();
    let g_path = dir.path().join("g.txt");
    let released = dir.path().join("released.txt");
    let out = dir.path().join("rr.csv");
    let g = gnp(10, 0.4, &mut ChaCha20Rng::seed_from_u64(11)).unwrap();
    write_graph(&g, fs::File::create(&g_path).unwrap()).unwrap();

    ok(&[
        "rr-synth", "--graph", s(&g_path), "--eps", "1", "--oracle", "none", "--sample-cuts", "200", "--no-timing",
        "--write-graph", s(&released), "--out", s(&out),
    ]);
    let r = &records(&out)[0];
    let (v, w) = read_weighted(std::io::BufReader::new(fs::File::open(&released).unwrap())).unwrap();
    assert_eq!(v, 10);
    assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
    let diff: Vec<f64> = g.weights().iter().zip(&w).map(|(a, b)| a - b).collect();
    let want = 0.5 * cut_norm(&matrix(10, &diff));
    let clip = r.residual_clip.unwrap();
    assert!((clip - want).abs() <= 1e-9 * want, "{clip} vs {want}");
    assert_eq!(r.bruteforce_max_error, Some(clip));
    assert!(r.sampled_max_error.unwrap() <= clip + 1e-9);
    assert_eq!((r.residual_projected, r.residual_rounded), (None, None));
    assert_eq!(r.privacy_eps, Some(1.0));
    assert_eq!(r.privacy_delta, Some(0.0));

    ok(&["rr-synth", "--graph", s(&g_path), "--eps", "1", "--round", "--no-timing", "--out", s(&out)]);
    let r = &records(&out)[0];
    assert!(r.residual_clip.is_some() && r.residual_projected.is_some() && r.residual_rounded.is_some());
    assert_eq!(r.bruteforce_max_error, r.residual_rounded);

    // too large to enumerate: the exact columns stay empty
    ok(&["rr-synth", "--gen-v", "16", "--gen-p", "0.5", "--eps", "1", "--oracle", "none", "--out", s(&out)]);
    let r = &records(&out)[0];
    assert_eq!((r.bruteforce_max_error, r.residual_clip), (None, None));
    assert!(r.sampled_max_error.is_some());
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[test]
fn bench_fk_accuracy_grows_like_the_fourth_root_of_the_universe() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    // a fixed edge count keeps ||D||_2^2 constant while |X| grows; a large
    // epsilon keeps the update budget well above one, where it stops rounding
    ok(&[
        "bench", "--vs", "8,12,16,24,32,48", "--edges", "24", "--epss", "1000", "--mechanism", "online", "--idc", "fk", "--trials", "3",
        "--sample-cuts", "100", "--no-timing", "--out", s(&out),
    ]);
    let recs = records(&out);
    assert_eq!(recs.len(), 18);
    assert!(recs.iter().all(|r| r.n2 == 24.0));
    let pts = |f: fn(&ResultRecord) -> Option<f64>| -> Vec<(f64, f64)> {
        recs.iter().map(|r| (r.universe_size as f64, f(r).unwrap())).collect()
    };
    let solved = log_slope(&pts(|r| r.bound_alpha));
    let targeted = log_slope(&pts(|r| r.alpha));
    let measured = log_slope(&pts(|r| r.max_error));
    println!("slope vs |X|: solved alpha {solved:.3}, auto alpha {targeted:.3}, measured max error {measured:.3}");
    assert!((solved - 0.25).abs() <= 0.05, "solved slope {solved}");
    assert!((targeted - 0.25).abs() <= 0.05, "auto alpha slope {targeted}");
}

#[test]
fn outputs_are_deterministic_without_timing() {
    let dir = TempDir::new().unwrap();
    let args = |out: &PathBuf| {
        vec![
            "bench".to_string(), "--vs".into(), "8,10".into(), "--mechanism".into(), "online,ic,rr".into(),
            "--trials".into(), "3".into(), "--k".into(), "40".into(), "--sample-cuts".into(), "50".into(),
            "--no-timing".into(), "--out".into(), out.display().to_string(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = bin().args(args(&a)).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // a different thread count must not change anything either
    let out = bin().args(args(&b)).env("IDC_RELEASE_THREADS", "1").output().unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(records(&a).len(), 2 * 3 * 5);
}

#[test]
fn json_and_csv_share_one_schema() {
    let dir = TempDir::new().unwrap();
    let csv_out = dir.path().join("r.csv");
    let json_out = dir.path().join("r.json");
    let common = [
        "release-offline", "--gen-v", "8", "--gen-p", "0.5", "--eps", "4", "--alpha", "2", "--beta", "0.1", "--gamma", "1e-5",
        "--trials", "2", "--no-timing",
    ];
    ok(&[&common[..], &["--out", s(&csv_out)]].concat());
    ok(&[&common[..], &["--format", "json", "--out", s(&json_out)]].concat());

    let from_csv = records(&csv_out);
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(&json_out).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], SCHEMA_VERSION);
    assert_eq!(doc["config"]["alpha"], 2.0);
    let from_json: Vec<ResultRecord> = serde_json::from_value(doc["records"].clone()).unwrap();
    assert_eq!(from_csv, from_json);
    for r in &from_csv {
        assert_eq!(r.schema_version, SCHEMA_VERSION);
        assert_eq!(r.privacy_status, "certified");
        assert!(r.updates.unwrap() <= r.budget.unwrap());
        assert!(r.bruteforce_max_error.is_some());
    }

    // the CSV header lists exactly the record's fields, and the sidecar holds the config
    let header = fs::read_to_string(&csv_out).unwrap().lines().next().unwrap().to_string();
    let fields: Vec<String> = serde_json::to_value(ResultRecord::default())
        .unwrap()
        .as_object()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    let mut cols: Vec<String> = header.split(',').map(String::from).collect();
    cols.sort();
    let mut fields = fields;
    fields.sort();
    assert_eq!(cols, fields);
    let side: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("r.csv.config.json")).unwrap()).unwrap();
    assert_eq!(side["eps"], 4.0);
}

#[test]
fn svd_distinguisher_is_reported_as_refused() {
    let out = ok(&["release-offline", "--gen-v", "8", "--gen-p", "0.5", "--eps", "1", "--alpha", "2", "--distinguisher", "svd", "--no-timing"]);
    let r = &read_csv(&out[..]).unwrap()[0];
    assert_eq!(r.privacy_status, "refused");
    assert_eq!((r.privacy_eps, r.privacy_delta), (None, None));
}

#[test]
fn online_privacy_column_matches_the_accountant() {
    let g: DataHistogram = gnp(8, 0.5, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.txt");
    write_graph(&g, fs::File::create(&path).unwrap()).unwrap();
    // at the default constant the reported guarantee is the target itself
    let out = ok(&["release-online", "--graph", s(&path), "--eps", "0.5", "--alpha", "50", "--no-timing"]);
    let r = &read_csv(&out[..]).unwrap()[0];
    assert!((r.privacy_eps.unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(r.privacy_delta, Some(1e-6));
    assert_eq!(r.universe_size, Universe::graph(8).unwrap().size());
    assert_eq!(r.n, g.n());
    assert_eq!(r.idc.as_deref(), Some(FriezeKannan::new(*g.universe(), g.n2()).unwrap().name()));
}

#[cfg(feature = "test-hooks")]
#[test]
fn test_hook_flags_are_exposed() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.txt");
    ok(&["gen-graph", "--v", "8", "--p", "0.5", "--out", s(&g)]);
    let out = ok(&["gen-queries", "--v", "8", "--k", "5", "--mode", "adversarial", "--graph", s(&g)]);
    assert_eq!(std::str::from_utf8(&out).unwrap().lines().count(), 5);
    let out = ok(&["release-online", "--graph", s(&g), "--eps", "1", "--alpha-auto", "--zero-noise", "--no-timing"]);
    let r = &read_csv(&out[..]).unwrap()[0];
    assert!(r.max_error.unwrap() <= r.threshold.unwrap());
}
