//! Files, determinism and the command-line surface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use zeta_moments::correlation::{ShiftedCorrelation, SignalComponent};
use zeta_moments::harness::{
    cache_warm, load_config, parse_config, run_experiment, write_scan_csv, write_trace_csv, CacheError, CacheGrid,
    CacheOrigin, ConfigError, ExperimentConfig,
};

const SMALL_SUITE: &str = "
[experiment stair]
oracle = zdef
kernel = moment_over_s
sigma = 3/2
r = 2.5
domain = symmetric
t_max = 400
tol_rel = 0.05

[experiment lemma]
oracle = lemma_sin
kernel = sin_kernel
a = 0.6931471805599453
sigma = 1.5
domain = symmetric
t_max = 200
tol_rel = 0.02
";

fn small_suite() -> Vec<ExperimentConfig> {
    parse_config(SMALL_SUITE).unwrap()
}

#[test]
fn cache_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("half.cache");
    let (grid, origin) = cache_warm(0.5, 0.0, 0.05, 7601, &path).unwrap();
    assert_eq!(origin, CacheOrigin::Computed);
    assert_eq!(grid.count, 7601);
    assert_eq!(grid.samples.len(), 7601);
    assert!((grid.t_end() - 380.0).abs() < 1e-9);

    let header = fs::read_to_string(&path).unwrap().lines().next().unwrap().to_string();
    assert!(header.starts_with("# zeta-cache v1 sigma=0.5 t0=0 dt=0.05 n=7601"), "{header}");

    let loaded = CacheGrid::load(&path).unwrap();
    assert_eq!(loaded, grid);
    for (a, b) in loaded.samples.iter().zip(&grid.samples) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}

#[test]
fn second_warm_loads_instead_of_computing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.cache");
    let (first, o1) = cache_warm(0.75, 10.0, 0.1, 500, &path).unwrap();
    let stamp = fs::metadata(&path).unwrap().modified().unwrap();
    let (second, o2) = cache_warm(0.75, 10.0, 0.1, 500, &path).unwrap();
    assert_eq!((o1, o2), (CacheOrigin::Computed, CacheOrigin::Loaded));
    assert_eq!(first, second);
    assert_eq!(fs::metadata(&path).unwrap().modified().unwrap(), stamp, "file was rewritten");
}

#[test]
fn mismatched_cache_is_incompatible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.cache");
    cache_warm(0.5, 0.0, 0.1, 50, &path).unwrap();
    for (sigma, t0, dt, n) in [(0.75, 0.0, 0.1, 50), (0.5, 1.0, 0.1, 50), (0.5, 0.0, 0.05, 50), (0.5, 0.0, 0.1, 51)] {
        match cache_warm(sigma, t0, dt, n, &path) {
            Err(CacheError::IncompatibleCache { .. }) => {}
            other => panic!("({sigma}, {t0}, {dt}, {n}): {other:?}"),
        }
    }
}

#[test]
fn malformed_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cache");
    fs::write(&path, "# zeta-cache v1 sigma=0.5 t0=0 dt=0.1 n=2\n0,1,0\n0.1,oops,0\n").unwrap();
    assert!(matches!(CacheGrid::load(&path), Err(CacheError::Malformed { .. })));
    fs::write(&path, "# zeta-cache v1 sigma=0.5 t0=0 dt=0.1 n=3\n0,1,0\n").unwrap();
    assert!(CacheGrid::load(&path).is_err());
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(job)
}

fn trace_csv(cfg: &ExperimentConfig) -> Vec<u8> {
    let mut out = Vec::new();
    write_trace_csv(&run_experiment(cfg).unwrap().trace, &mut out).unwrap();
    out
}

#[test]
fn output_is_independent_of_worker_count() {
    for cfg in small_suite() {
        let one = in_pool(1, || trace_csv(&cfg));
        let four = in_pool(4, || trace_csv(&cfg));
        assert_eq!(one, four, "{}", cfg.experiment_id);
        assert_eq!(one, trace_csv(&cfg));
    }
    let scan = |threads| {
        in_pool(threads, || {
            let scan = ShiftedCorrelation::new(0.5, SignalComponent::Abs).scan(0.0, 40.0, 5.0, 6.0, 0.25).unwrap();
            let mut out = Vec::new();
            write_scan_csv(&scan, &mut out).unwrap();
            out
        })
    };
    assert_eq!(scan(1), scan(3));
}

#[test]
fn trace_csv_schema() {
    let csv = String::from_utf8(trace_csv(&small_suite()[1])).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,element,partial_sum,cesaro_mean"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 200);
    assert!(rows[0].starts_with("1,"));
    assert!(rows.iter().all(|r| r.split(',').count() == 4));
}

#[test]
fn config_errors_are_reported() {
    assert!(matches!(
        parse_config("[experiment a]\nkernel = moment_over_s\nsigma = 1.5\nt_max = 10\nasymptote = none\nsigmaa = 2\n"),
        Err(ConfigError::Syntax { line: 6, .. })
    ));
    assert!(matches!(
        parse_config("[experiment a]\nkernel = moment_over_s\nsigma = 1.5\nt_max = -3\nasymptote = none\n"),
        Err(ConfigError::Invalid { .. })
    ));
    assert!(matches!(
        parse_config("[experiment a]\nkernel = sin_kernel\nsigma = 1.5\nt_max = 10\nasymptote = none\n"),
        Err(ConfigError::Syntax { .. })
    ));
    assert!(matches!(load_config(Path::new("/nonexistent/suite.conf")), Err(ConfigError::Io(_))));
    let shipped = load_config(Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/acceptance.conf"))).unwrap();
    assert_eq!(shipped.len(), 30);
}

fn zmoments(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zmoments")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn cli_zeta_point_values() {
    let o = zmoments(&["zeta", "--sigma", "2", "--t", "0"]);
    assert!(o.status.success());
    let re: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);

    let o = zmoments(&["zeta", "--sigma", "0", "--t", "0", "--derivative", "1"]);
    let re: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    assert!((re + (2.0 * std::f64::consts::PI).ln() / 2.0).abs() < 1e-8);

    assert_eq!(zmoments(&["zeta", "--sigma", "1", "--t", "0"]).status.code(), Some(2));
}

#[test]
fn cli_verify_exit_status_reflects_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.conf");
    fs::write(&good, SMALL_SUITE).unwrap();
    let o = zmoments(&["verify", "--config", good.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("stair") && stdout(&o).contains("Match"));
    assert!(dir.path().join("verify.txt").exists());

    let bad = dir.path().join("bad.conf");
    fs::write(&bad, SMALL_SUITE.replace("oracle = zdef", "asymptote = 3.0")).unwrap();
    let o = zmoments(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Mismatch"));

    let broken = dir.path().join("broken.conf");
    fs::write(&broken, "[experiment x]\nnonsense\n").unwrap();
    assert_eq!(zmoments(&["verify", "--config", broken.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cli_trace_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("s.conf");
    fs::write(&conf, SMALL_SUITE).unwrap();
    let mut files = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}"));
        let o = zmoments(&[
            "trace", "stair", "--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", workers,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(fs::read(out.join("stair.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(zmoments(&["trace", "nope", "--config", conf.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cli_cache_and_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("z.cache");
    let warm = || zmoments(&["cache", "warm", "--sigma", "0.5", "--count", "2001", "--path", cache.to_str().unwrap()]);
    let first = warm();
    assert!(stdout(&first).starts_with("computed 2001 samples"), "{}", stdout(&first));
    assert!(stdout(&warm()).starts_with("loaded"));

    let o = zmoments(&["correlate", "--rho", "5", "--seg-len", "40", "--cache", cache.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("rho,cor,cov,var_f,var_g,e_f,e_g"));
    let cor: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(cor.abs() <= 1.0);

    let o = zmoments(&[
        "rho-scan", "--from", "5", "--to", "6", "--step", "0.5", "--seg-len", "40", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("rho-scan-s0.5-abs-l0.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    // cache at the wrong σ
    let o = zmoments(&["correlate", "--sigma", "0.75", "--rho", "5", "--cache", cache.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cli_periodicity_report() {
    let o = zmoments(&["periodicity"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("8.46"), "{out}");
    assert!(out.to_lowercase().contains("period"), "{out}");
}
