use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revival")).args(args).output().expect("spawn revival")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const BIPERIODIC: &str = "[family]\nkind = \"biperiodic\"\nn_added = 25\nharmonic_count = 5\n\n[evolution]\nrows = 16\n";

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Parses a 16-bit PGM into rows of pixels.
fn pgm_rows(bytes: &[u8]) -> Vec<Vec<u16>> {
    let text_end = bytes.iter().enumerate().filter(|(_, &b)| b == b'\n').nth(2).unwrap().0 + 1;
    let header = std::str::from_utf8(&bytes[..text_end]).unwrap();
    let mut it = header.split_whitespace();
    assert_eq!(it.next(), Some("P5"));
    let w: usize = it.next().unwrap().parse().unwrap();
    let h: usize = it.next().unwrap().parse().unwrap();
    assert_eq!(it.next(), Some("65535"));
    let px: Vec<u16> =
        bytes[text_end..].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    assert_eq!(px.len(), w * h);
    px.chunks(w).map(|r| r.to_vec()).collect()
}

#[test]
fn design_writes_default_grid_and_levels() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bi.toml", BIPERIODIC);
    let out = tmp.path().join("bi");
    let o = run(&["design", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("potential.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4097 + 1);
    let meta = std::fs::read_to_string(out.join("potential.json")).unwrap();
    assert!(meta.contains("\"generated_by\""));
    assert!(meta.contains("\"n_points\": 4097"));
    let levels = std::fs::read_to_string(out.join("levels.txt")).unwrap();
    assert!(levels.starts_with("# base harmonic"));

    // the written artifacts verify on their own
    let o = run(&[
        "verify",
        "--potential",
        s(&out.join("potential.csv")),
        "--levels",
        s(&out.join("levels.txt")),
        "--tolerance",
        "1e-4",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.starts_with("index,target,computed,abs_error\n"));
    assert_eq!(report.lines().count(), 1 + 30 + 1);
}

#[test]
fn primes_fifty_levels_and_base() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "p.toml", "[family]\nkind = \"primes\"\ncount = 50\n");
    let out = tmp.path().join("p");
    let o = run(&["design", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let levels = std::fs::read_to_string(out.join("levels.txt")).unwrap();
    assert!(levels.starts_with("# base constant 233\n"));
    let values: Vec<&str> = levels.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(values.len(), 50);
    assert_eq!(values[0], "2/1");
    assert_eq!(values[49], "229/1");
}

#[test]
fn empty_addition_list_reproduces_base() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "h.toml",
        "[family]\nkind = \"harmonic\"\ncount = 4\n[grid]\nhalf_width = 6.0\nn_points = 121\n",
    );
    let o = run(&["design", "--config", s(&cfg), "--out", s(tmp.path())]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("potential.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let (x, v) = line.split_once(',').unwrap();
        let (x, v): (f64, f64) = (x.parse().unwrap(), v.parse().unwrap());
        assert_eq!(v, 0.5 * x * x);
    }
}

#[test]
fn verify_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bi.toml", BIPERIODIC);
    let out = s(tmp.path());
    let ok = run(&["verify", "--config", s(&cfg), "--tolerance", "1e-4", "--out", out]);
    assert_eq!(ok.status.code(), Some(0));
    let strict = run(&["verify", "--config", s(&cfg), "--tolerance", "1e-12", "--out", out]);
    assert_eq!(strict.status.code(), Some(2));
    let missing = run(&[
        "verify",
        "--potential",
        s(&tmp.path().join("nope.csv")),
        "--levels",
        s(&tmp.path().join("nope.txt")),
        "--out",
        out,
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn bad_configs_fail_cleanly() {
    let tmp = TempDir::new().unwrap();
    let typo = write_config(tmp.path(), "t.toml", "[family]\nkind = \"primes\"\ncount = 5\nnoise = 1\n");
    let o = run(&["levels", "--config", s(&typo)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("noise"));

    // a custom level above the constant base names the offending level
    let above = write_config(
        tmp.path(),
        "a.toml",
        "[family]\nkind = \"custom\"\nlevels = [\"1/2\", 3]\n[base]\nkind = \"constant\"\nvalue = 2.0\n",
    );
    let o = run(&["design", "--config", s(&above), "--out", s(tmp.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3/1"));
}

#[test]
fn levels_prints_revival_parameters() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bi.toml", BIPERIODIC);
    let o = run(&["levels", "--config", s(&cfg)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("-49/1\n"));
    assert!(text.contains("# a = 1/2, b = 0/1"));
    assert!(text.contains("(2π × 2/1)"));
}

#[test]
fn carpet_revives_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bi.toml", BIPERIODIC);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = run(&["carpet", "--config", s(&cfg), "--out", s(dir)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["carpet.pgm", "autocorr.csv", "carpet.json"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let csv = std::fs::read_to_string(a.join("autocorr.csv")).unwrap();
    assert!(csv.starts_with("t,re,im,abs\n"));
    let last_abs: f64 = csv.lines().last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(last_abs >= 0.999);
    let rows = pgm_rows(&std::fs::read(a.join("carpet.pgm")).unwrap());
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[0].len(), 4097);
}

#[test]
fn eigenstate_packet_gives_constant_carpet() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "e.toml",
        "[family]\nkind = \"harmonic\"\ncount = 5\n[grid]\nn_points = 801\n\
         [evolution]\nrows = 8\nt_max = 3.7\npacket = { kind = \"eigenstate\", index = 2 }\n",
    );
    let o = run(&["carpet", "--config", s(&cfg), "--out", s(tmp.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = pgm_rows(&std::fs::read(tmp.path().join("carpet.pgm")).unwrap());
    for row in &rows {
        for (p, q) in row.iter().zip(&rows[0]) {
            assert!(p.abs_diff(*q) <= 1);
        }
    }
}

#[test]
fn prime_carpet_revival_row_matches_first_row() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "p.toml",
        "[family]\nkind = \"primes\"\ncount = 15\n[evolution]\nrows = 9\nt_max = \"Nrev:1\"\n\
         packet = { kind = \"gaussians\", terms = [{ center = -0.5, width = 0.3 }, { center = 1.0, width = 0.6, amplitude = 0.5 }] }\n",
    );
    let o = run(&["carpet", "--config", s(&cfg), "--out", s(tmp.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = pgm_rows(&std::fs::read(tmp.path().join("carpet.pgm")).unwrap());
    let worst = rows[0].iter().zip(rows.last().unwrap()).map(|(p, q)| p.abs_diff(*q)).max().unwrap();
    assert!(f64::from(worst) / 65535.0 <= 1e-3, "worst pixel difference {worst}");
    // the middle row is not a revival
    let mid = &rows[rows.len() / 2];
    assert!(rows[0].iter().zip(mid).any(|(p, q)| p.abs_diff(*q) > 1000));
}

#[test]
fn evolve_writes_state_and_cross_check() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "ev.toml",
        "[family]\nkind = \"biperiodic\"\nn_added = 4\nharmonic_count = 3\n[grid]\nn_points = 1025\n\
         [evolution]\nrows = 4\nt_max = \"Nrev:0.5\"\nunitary_steps = 2000\n",
    );
    let o = run(&["evolve", "--config", s(&cfg), "--out", s(tmp.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let state = std::fs::read_to_string(tmp.path().join("state.csv")).unwrap();
    assert!(state.starts_with("x,re,im,abs\n"));
    assert_eq!(state.lines().count(), 1026);
    let coeffs = std::fs::read_to_string(tmp.path().join("coefficients.csv")).unwrap();
    assert_eq!(coeffs.lines().count(), 1 + 7);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("evolve.json")).unwrap()).unwrap();
    assert!(meta["unitary_distance"].as_f64().unwrap() < 1e-6);
    // every default is echoed back
    assert_eq!(meta["config"]["grid"]["stencil"], "five_point");
    assert_eq!(meta["config"]["evolution"]["basis"], 7);
}
