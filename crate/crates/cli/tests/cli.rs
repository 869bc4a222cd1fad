use std::path::Path;

use mtpa_cli::{run, EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE};

fn mtpa(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("mtpa").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn row<'a>(csv: &'a str, prefix: &str) -> Vec<&'a str> {
    csv.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("no row {prefix}")).split(',').collect()
}

#[test]
fn solve_single_type_weight_two_is_one_half() {
    let (code, out, err) = mtpa(&["solve", "--n", "1", "--m", "2", "--dmax", "50"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().next(), Some("d_1,mass,provenance"));
    let mass: f64 = row(&out, "2,")[1].parse().unwrap();
    assert!((mass - 0.5).abs() < 1e-15);
    // 2 M (M+1) / (d (d+1) (d+2)) at d = 50.
    let tail: f64 = row(&out, "50,")[1].parse().unwrap();
    assert!((tail - 12.0 / (50.0 * 51.0 * 52.0)).abs() < 1e-15);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let (code, _, err) = mtpa(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!err.is_empty());
}

#[test]
fn help_exits_zero() {
    assert_eq!(mtpa(&["--help"]).0, EXIT_OK);
}

#[test]
fn bad_matrix_names_the_row() {
    let (code, _, err) = mtpa(&["solve", "--n", "2", "--m", "1", "--f", "0.5,0.5,0.3,0.6"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("F row 2"), "{err}");
}

#[test]
fn missing_config_is_usage_error() {
    let (code, _, err) = mtpa(&["compare", "--config", "/nonexistent/run.toml"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("parse error"), "{err}");
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("c.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn compare_passes_and_fails_on_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "model = \"urn\"\nN = 2\nM = 1\nF = [0.8, 0.2, 0.4, 0.6]\n[harness]\nsteps = 20000\nreplicates = 4\n\
         [tolerance]\npsi = 0.05\npass_fraction = 0.75\n",
    );
    let out = dir.path().join("out");
    let (code, stdout, err) = mtpa(&["compare", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{stdout}{err}");
    assert!(stdout.contains("PASS"));
    for f in ["replicates.csv", "psi.csv", "summary.txt", "manifest.toml"] {
        assert!(out.join(f).exists(), "{f}");
    }

    // Ten steps cannot bring psi within 1e-6 of the limit.
    let strict = write_config(
        dir.path(),
        "model = \"urn\"\nN = 2\nM = 1\nF = [0.8, 0.2, 0.4, 0.6]\n[harness]\nsteps = 10\n[tolerance]\npsi = 1e-6\n",
    );
    let (code, stdout, _) = mtpa(&["compare", "--config", &strict, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_TOLERANCE);
    assert!(stdout.contains("FAIL"));
}

#[test]
fn manifest_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let (code, _, err) = mtpa(&[
        "simulate-graph",
        "--n",
        "2",
        "--m",
        "2",
        "--f",
        "symmetric-0.9",
        "--steps",
        "500",
        "--snapshot-every",
        "100",
        "--replicates",
        "2",
        "--seed",
        "17",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let manifest = first.join("manifest.toml");
    let (code, _, err) =
        mtpa(&["simulate-graph", "--config", manifest.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    for f in ["psi.csv", "distribution.csv", "manifest.toml"] {
        assert_eq!(std::fs::read(first.join(f)).unwrap(), std::fs::read(second.join(f)).unwrap(), "{f}");
    }
    let text = std::fs::read_to_string(&manifest).unwrap();
    let digest = mtpa::io::sha256_hex(&std::fs::read(first.join("psi.csv")).unwrap());
    assert!(text.contains(&format!("\"psi.csv\" = \"{digest}\"")));
    assert!(text.contains("master_seed = 17"));
}

#[test]
fn diagnose_np_el_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let (code, _, err) = mtpa(&[
        "diagnose",
        "--n",
        "2",
        "--m",
        "1",
        "--f",
        "0.9,0.1,0.1,0.9",
        "--quantity",
        "NP_EL",
        "--degree",
        "2,1",
        "--type",
        "1",
        "--steps",
        "10000",
        "--snapshot-every",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let csv = std::fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("replicate,n,value_1,limit_1"));
    let last: Vec<f64> = csv.lines().last().unwrap().split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 10000.0);
    assert!((last[2] - 0.5).abs() < 1e-15);
    assert!((last[1] - 0.5).abs() < 1e-3);
}

#[test]
fn diagnose_rejects_unknown_quantity() {
    let (code, _, err) = mtpa(&["diagnose", "--n", "1", "--m", "1", "--quantity", "ZETA", "--out", "/tmp/mtpa-unused"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("ZETA"));
}

#[test]
fn audit_of_bernoulli_sampler_is_clean() {
    let (code, out, err) = mtpa(&["audit", "--n", "2", "--m", "1", "--f", "0.8,0.2,0.4,0.6", "--samples", "2000"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("PASS constant column weight"));
}

#[test]
fn solve_unperturbed_with_degenerate_psi() {
    let (code, out, err) = mtpa(&["solve-unperturbed", "--psi", "1,0", "--m", "1", "--dmax", "5"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let mass: f64 = row(&out, "1,0,")[2].parse().unwrap();
    assert!((mass - 2.0 / 3.0).abs() < 1e-15);
}
