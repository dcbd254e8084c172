//! End-to-end runs of the `walkrank` binary: ingest -> train -> rank ->
//! evaluate -> inspect, plus exit-code conventions.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn walkrank(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkrank"))
        .args(args)
        .current_dir(dir)
        .env_remove("WALKRANK_CONFIG")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path) -> PathBuf {
    let triples = fixture("apicidin.nt");
    let metapath = dir.join("metapath.txt");
    std::fs::write(&metapath, "pubchem_compound\ngene\npubchem_compound\n").unwrap();
    let pairs = dir.join("pairs.csv");
    let mut csv = String::from("source,target,label\n");
    let compound = "http://chem2bio2rdf.org/pubchem/resource/pubchem_compound/467801";
    for gene in ["HDAC5", "HDAC6", "NCOR2", "HDAC1"] {
        csv.push_str(&format!(
            "{compound},http://chem2bio2rdf.org/uniprot/resource/gene/{gene},1\n"
        ));
    }
    for gene in ["F3", "HD1B"] {
        csv.push_str(&format!(
            "{compound},http://chem2bio2rdf.org/uniprot/resource/gene/{gene},0\n"
        ));
    }
    std::fs::write(&pairs, csv).unwrap();

    let config_path = dir.join("walkrank.toml");
    let out_dir = dir.join("out");
    let config = format!(
        r#"
seed = 42

[paths]
triples = "{}"
metapath = "{}"
test_sets = ["{}"]
output_dir = "{}"

[walk]
strategy = "metapath"
walk_length = 9
walks_per_node = 12

[train]
dim = 16
epochs = 3
window = 3

[baseline]
n_pos = 10
n_neg = 10

[evaluate]
k_values = [1, 2, 4]
"#,
        triples.display(),
        metapath.display(),
        pairs.display(),
        out_dir.display(),
    );
    std::fs::write(&config_path, config).unwrap();
    config_path
}

#[test]
fn full_pipeline_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let config_arg = config.to_str().unwrap();

    let out = walkrank(&["--config", config_arg, "ingest"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("17 nodes, 16 edges"), "{stdout}");
    assert!(stdout.contains("pubchem_compound: 1"), "{stdout}");
    assert!(stdout.contains("gene: 16"), "{stdout}");

    let out = walkrank(&["--config", config_arg, "walk"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let corpus = std::fs::read_to_string(dir.path().join("out/corpus_metapath.txt")).unwrap();
    assert!(corpus.starts_with("# strategy=metapath seed=42"));
    // 1 compound start node at 12 walks per node.
    assert_eq!(corpus.lines().count(), 1 + 12);

    let out = walkrank(&["--config", config_arg, "train"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/embeddings_metapath.txt")).unwrap();
    // Header `N D`: D is the configured dimension, N matches the rows that
    // follow (nodes never visited by a metapath walk get no embedding).
    let header: Vec<usize> = text
        .lines()
        .next()
        .unwrap()
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(header[1], 16);
    assert_eq!(header[0], text.lines().count() - 1);
    assert!(header[0] >= 10 && header[0] <= 17, "rows {}", header[0]);
    let manifest = std::fs::read_to_string(dir.path().join("out/manifest_metapath.txt")).unwrap();
    assert!(manifest.contains("strategy: metapath"));
    assert!(manifest.contains("seed: 42"));
    assert!(manifest.contains("epoch_mean_loss"));

    let compound = "http://chem2bio2rdf.org/pubchem/resource/pubchem_compound/467801";
    let out = walkrank(
        &[
            "--config",
            config_arg,
            "rank",
            "--source",
            compound,
            "--k",
            "20",
            "--target-type",
            "gene",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ranking = std::fs::read_to_string(dir.path().join("out/ranking.csv")).unwrap();
    let lines: Vec<&str> = ranking.lines().collect();
    assert_eq!(lines[0], "target,score");
    // K = 20 exceeds the candidate count, so every embedded gene appears.
    assert!((11..=17).contains(&lines.len()), "{}", lines.len());
    let scores: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    for pair in scores.windows(2) {
        assert!(pair[0] >= pair[1], "scores not non-increasing: {scores:?}");
    }

    let out = walkrank(&["--config", config_arg, "inspect"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("nodes: 17"));
    assert!(stdout.contains("rows: "));
}

/// A denser bipartite graph where compound-gene non-edges exist, so the
/// baseline can sample negatives.
fn write_eval_config(dir: &Path) -> PathBuf {
    let triples = dir.join("dense.nt");
    let mut text = String::new();
    for c in 0..6 {
        for g in 0..8 {
            if (c * 3 + g * 5) % 7 < 4 {
                text.push_str(&format!("<d/compound/c{c}> <binds> <d/gene/g{g}> .\n"));
            }
        }
    }
    std::fs::write(&triples, text).unwrap();

    let pairs = dir.join("pairs.csv");
    let mut csv = String::from("source,target,label\n");
    for (c, g, label) in [
        (0, 0, 1),
        (0, 6, 1),
        (0, 2, 0),
        (1, 3, 1),
        (1, 1, 0),
        (2, 0, 0),
        (2, 1, 1),
        (3, 2, 1),
        (3, 4, 0),
    ] {
        csv.push_str(&format!("d/compound/c{c},d/gene/g{g},{label}\n"));
    }
    std::fs::write(&pairs, csv).unwrap();

    let config_path = dir.join("eval.toml");
    let out_dir = dir.join("out");
    let config = format!(
        r#"
seed = 7

[paths]
triples = "{}"
test_sets = ["{}"]
output_dir = "{}"

[walk]
strategy = "uniform"
walk_length = 10
walks_per_node = 10

[train]
dim = 12
epochs = 3
window = 3

[baseline]
n_pos = 12
n_neg = 12

[evaluate]
k_values = [1, 2, 4]
"#,
        triples.display(),
        pairs.display(),
        out_dir.display(),
    );
    std::fs::write(&config_path, config).unwrap();
    config_path
}

#[test]
fn evaluate_compares_baseline_and_topk() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_eval_config(dir.path());
    let config_arg = config.to_str().unwrap();

    assert!(walkrank(&["--config", config_arg, "ingest"], dir.path()).status.success());
    assert!(walkrank(&["--config", config_arg, "train"], dir.path()).status.success());
    let out = walkrank(&["--config", config_arg, "evaluate"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report = std::fs::read_to_string(dir.path().join("out/report_pairs.csv")).unwrap();
    assert!(report.starts_with("strategy,method,k,accuracy,f1,precision,recall"));
    // 1 baseline row + 3 K rows.
    assert_eq!(report.lines().count(), 1 + 1 + 3);
    assert!(report.contains("uniform,logreg,,"));
    assert!(report.contains("uniform,topK,1,"));
    for k in [1, 2, 4] {
        let pred_path = dir.path().join(format!("out/predictions_pairs_k{k}.csv"));
        let preds = std::fs::read_to_string(&pred_path).unwrap();
        assert!(preds.starts_with("source,target,score,rank,predicted_label"));
    }
    assert!(dir.path().join("out/baseline_uniform.txt").exists());
    assert!(dir.path().join("out/baseline_links.csv").exists());

    // Identical seed and inputs reproduce the report byte for byte.
    let first = std::fs::read(dir.path().join("out/report_pairs.csv")).unwrap();
    assert!(walkrank(&["--config", config_arg, "evaluate"], dir.path()).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("out/report_pairs.csv")).unwrap());

    // A test set that is entirely out of vocabulary is a data error.
    let oov = dir.path().join("oov.csv");
    std::fs::write(&oov, "source,target,label\nno/such/node,d/gene/g0,1\n").unwrap();
    let oov_config = dir.path().join("oov.toml");
    let text = std::fs::read_to_string(&config).unwrap().replace(
        &format!("test_sets = [\"{}\"]", dir.path().join("pairs.csv").display()),
        &format!("test_sets = [\"{}\"]", oov.display()),
    );
    std::fs::write(&oov_config, text).unwrap();
    let out = walkrank(
        &["--config", oov_config.to_str().unwrap(), "evaluate"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no evaluable pairs"));
}

#[test]
fn rerunning_ingest_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let config_arg = config.to_str().unwrap();
    let cache = dir.path().join("out/graph.bin");

    assert!(walkrank(&["--config", config_arg, "ingest"], dir.path()).status.success());
    let first = std::fs::read(&cache).unwrap();
    assert!(walkrank(&["--config", config_arg, "ingest"], dir.path()).status.success());
    assert_eq!(first, std::fs::read(&cache).unwrap());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // Nonexistent config file.
    let out = walkrank(&["--config", "missing.toml", "inspect"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // Invalid strategy name.
    let config = write_config(dir.path());
    let config_arg = config.to_str().unwrap();
    assert!(walkrank(&["--config", config_arg, "ingest"], dir.path()).status.success());
    let out = walkrank(
        &["--config", config_arg, "walk", "--strategy", "bogus"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let config_arg = config.to_str().unwrap();

    // Walk before ingest: missing graph cache.
    let out = walkrank(&["--config", config_arg, "walk"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    // Empty triples file.
    let empty = dir.path().join("empty.nt");
    std::fs::write(&empty, "").unwrap();
    let out = walkrank(
        &[
            "--config",
            config_arg,
            "ingest",
            "--triples",
            empty.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("empty graph"), "{stderr}");

    // Malformed triple line carries its line number.
    let bad = dir.path().join("bad.nt");
    std::fs::write(&bad, "<a> <p> <b> .\nbroken\n").unwrap();
    let out = walkrank(
        &[
            "--config",
            config_arg,
            "ingest",
            "--triples",
            bad.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn unknown_rank_source_suggests_prefix_matches() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let config_arg = config.to_str().unwrap();
    assert!(walkrank(&["--config", config_arg, "ingest"], dir.path()).status.success());
    assert!(walkrank(&["--config", config_arg, "train"], dir.path()).status.success());

    let out = walkrank(
        &[
            "--config",
            config_arg,
            "rank",
            "--source",
            "http://chem2bio2rdf.org/uniprot/resource/gene/HDAC99",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nearest by prefix"), "{stderr}");
    assert!(stderr.contains("gene/HDAC9"), "{stderr}");
}

#[test]
fn metapath_with_absent_head_type_names_the_type() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let config_arg = config.to_str().unwrap();
    assert!(walkrank(&["--config", config_arg, "ingest"], dir.path()).status.success());

    let mp = dir.path().join("bad_metapath.txt");
    std::fs::write(&mp, "pathway\ngene\npathway\n").unwrap();
    let out = walkrank(
        &[
            "--config",
            config_arg,
            "walk",
            "--metapath",
            mp.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pathway"));
}

#[test]
fn env_var_supplies_default_config_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_walkrank"))
        .args(["ingest"])
        .current_dir(dir.path())
        .env("WALKRANK_CONFIG", &config)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/graph.bin").exists());
}
