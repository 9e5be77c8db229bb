use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

const HALF_EXP_M4: f64 = 0.009157819444367090146859;
const HALF_ERFC_2: f64 = 0.002338867490523632918966;

fn binrx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binrx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> HashMap<String, String> {
    let out = binrx(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(" = ").expect("key = value line");
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn value(r: &HashMap<String, String>, key: &str) -> f64 {
    r[key].parse().unwrap()
}

struct Table {
    manifest: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Self {
        let manifest: Vec<String> = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(str::to_string)
            .collect();
        let mut data = text.lines().skip(manifest.len());
        let header = data
            .next()
            .unwrap()
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = data
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Self {
            manifest,
            header,
            rows,
        }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    fn get(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }

    fn data_text(text: &str) -> String {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn csv_run(args: &[&str], path: &Path) -> String {
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--output", p]);
    let out = binrx(&full);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::read_to_string(path).unwrap()
}

fn assert_scientific(field: &str) {
    let (mantissa, exponent) = field.split_once('e').unwrap_or_else(|| panic!("{field}"));
    exponent.parse::<i32>().unwrap();
    let digits = mantissa.chars().filter(char::is_ascii_digit).count();
    assert!(digits >= 10, "{field}");
}

#[test]
fn sql_reports_both_branches() {
    let r = report(&["sql", "--nbar", "2", "--sigma", "0"]);
    assert!((value(&r, "perr_sql") - HALF_ERFC_2).abs() < 1e-15);
    assert_eq!(r["sql_branch"], "bpsk/hom");
    assert!((value(&r, "perr_ook_dd") - HALF_EXP_M4).abs() < 1e-15);

    let r = report(&["sql", "--nbar", "2", "--sigma", "1.0"]);
    assert!((value(&r, "perr_sql") - HALF_EXP_M4).abs() < 1e-15);
    assert_eq!(r["sql_branch"], "ook/dd");

    let r = report(&["sql", "--nbar", "0", "--sigma", "0"]);
    assert_eq!(value(&r, "perr_sql"), 0.5);
}

#[test]
fn sql_sampling_and_efficiency() {
    let r = report(&[
        "sql", "--nbar", "2", "--sigma", "0.3", "--trials", "200000", "--seed", "5",
    ]);
    assert!(value(&r, "z_ook_dd").abs() < 4.0);
    assert!(value(&r, "z_bpsk_hom").abs() < 4.0);
    let scaled = report(&[
        "sql",
        "--nbar",
        "4",
        "--efficiency",
        "0.5",
        "--sigma",
        "0.3",
    ]);
    let plain = report(&["sql", "--nbar", "2", "--sigma", "0.3"]);
    assert_eq!(scaled["perr_sql"], plain["perr_sql"]);
}

#[test]
fn exit_codes() {
    assert_eq!(binrx(&["sql"]).status.code(), Some(2));
    assert_eq!(binrx(&["sql", "--nbar", "two"]).status.code(), Some(2));
    assert_eq!(binrx(&["sql", "--nbar=-1"]).status.code(), Some(2));
    assert_eq!(
        binrx(&["optimize", "--nbar", "1", "--pnr", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        binrx(&["sql", "--nbar", "1", "--efficiency", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        binrx(&["sweep-nbar", "--output", "/nonexistent-dir/x.csv"])
            .status
            .code(),
        Some(3)
    );
    // count means up to ~200 at σ = 1 are beyond the order-512 rule
    assert_eq!(
        binrx(&["pk", "--alpha", "7", "--beta", "7", "--sigma", "1"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn sweep_nbar_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nbar.csv");
    let first = csv_run(&["sweep-nbar", "--nbar-max", "3", "--step", "0.5"], &path);
    let t = Table::parse(&first);
    assert!(t.manifest.iter().any(|l| l == "# command = sweep-nbar"));
    assert!(t.manifest.iter().any(|l| l.starts_with("# timestamp = ")));
    assert!(t
        .manifest
        .iter()
        .any(|l| l.starts_with("# tool_version = binrx ")));
    assert_eq!(
        t.header,
        [
            "nbar",
            "psd_w_per_hz",
            "perr_ook_dd",
            "perr_bpsk_hom",
            "perr_kennedy",
            "perr_helstrom"
        ]
    );
    assert_eq!(t.rows.len(), 7);
    t.rows.iter().flatten().for_each(|f| assert_scientific(f));
    for name in [
        "perr_ook_dd",
        "perr_bpsk_hom",
        "perr_kennedy",
        "perr_helstrom",
    ] {
        assert_eq!(t.get(0, name), 0.5);
    }
    let psd = t.get(2, "psd_w_per_hz");
    assert!((psd - 1.281577972354147548e-19).abs() < 1e-31);

    let second = csv_run(&["sweep-nbar", "--nbar-max", "3", "--step", "0.5"], &path);
    assert_eq!(Table::data_text(&first), Table::data_text(&second));
}

#[test]
fn sweep_sigma_small_grid_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sigma.csv");
    let args = [
        "sweep-sigma",
        "--nbar",
        "1",
        "--sigma-max",
        "0.2",
        "--step",
        "0.1",
        "--pnr",
        "2,1",
        "--grid",
        "21",
        "--beta-grid",
        "21",
        "--helstrom-grid",
        "15",
        "--jobs",
        "2",
    ];
    let first = csv_run(&args, &path);
    let t = Table::parse(&first);
    assert_eq!(
        t.header,
        [
            "sigma",
            "perr_sql",
            "perr_helstrom",
            "perr_helstrom_optimal",
            "perr_pnr1",
            "perr_pnr2",
            "alpha0",
            "alpha1",
            "beta",
            "threshold_k",
            "orientation",
        ]
    );
    assert_eq!(t.rows.len(), 3);
    for r in 0..3 {
        assert!(t.get(r, "perr_pnr2") <= t.get(r, "perr_pnr1"));
        assert!(t.get(r, "perr_helstrom_optimal") <= t.get(r, "perr_helstrom") + 1e-6);
        assert!(t.get(r, "threshold_k") < 2.0);
        let (a0, a1) = (t.get(r, "alpha0"), t.get(r, "alpha1"));
        assert!((a0 * a0 + a1 * a1 - 2.0).abs() < 1e-10);
    }
    let second = csv_run(&args, &path);
    assert_eq!(Table::data_text(&first), Table::data_text(&second));
}

#[test]
fn sweep_sigma_noiseless_pnr_columns_are_nested() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sigma0.csv");
    let text = csv_run(
        &[
            "sweep-sigma",
            "--nbar",
            "2",
            "--sigma-max",
            "0",
            "--helstrom-grid",
            "31",
        ],
        &path,
    );
    let t = Table::parse(&text);
    assert_eq!(t.rows.len(), 1);
    let p: Vec<f64> = [1, 2, 3, 8]
        .iter()
        .map(|k| t.get(0, &format!("perr_pnr{k}")))
        .collect();
    assert!(p[3] <= p[2] && p[2] <= p[1] && p[1] <= p[0], "{p:?}");
}

#[test]
fn sweep_sigma_reproduces_both_noise_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("regimes.csv");
    let text = csv_run(
        &[
            "sweep-sigma",
            "--nbar",
            "2",
            "--sigma-min",
            "0.1",
            "--sigma-max",
            "0.45",
            "--step",
            "0.35",
            "--pnr",
            "8",
            "--helstrom-grid",
            "31",
        ],
        &path,
    );
    let t = Table::parse(&text);
    assert_eq!(t.get(0, "sigma"), 0.1);
    assert!(t.get(0, "perr_pnr8") < t.get(0, "perr_sql"));
    assert_eq!(t.get(1, "sigma"), 0.45);
    assert_eq!(t.rows[1][t.col("threshold_k")], "0");
}

#[test]
fn optimize_reports() {
    let r = report(&["optimize", "--nbar", "2", "--sigma", "0", "--pnr", "8"]);
    assert!(value(&r, "perr") <= 1.6773e-4);

    let r = report(&[
        "optimize", "--nbar", "0.0001", "--sigma", "0.2", "--pnr", "1",
    ]);
    let p = value(&r, "perr");
    assert!(p > 0.49 && p < 0.5, "{p}");
}

#[test]
fn optimize_validates_against_sampling_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let r = report(&[
        "optimize",
        "--nbar",
        "2",
        "--sigma",
        "0.45",
        "--pnr",
        "8",
        "--validate",
        "1000000",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(value(&r, "z_score").abs() < 4.0);
    assert_eq!(r["threshold_k"], "0");
    let t = Table::parse(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(t.header, ["iteration", "perr"]);
    let last = t.get(t.rows.len() - 1, "perr");
    assert_eq!(format!("{last:.12e}"), r["perr"]);
}

#[test]
fn pk_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pk.csv");
    let text = csv_run(
        &["pk", "--alpha", "1.2", "--beta", "-0.4", "--sigma", "0.3"],
        &path,
    );
    let t = Table::parse(&text);
    let total: f64 = (0..t.rows.len()).map(|r| t.get(r, "p")).sum();
    assert!((total - 1.0).abs() < 1e-9);

    // σ = 0 reduces to a Poisson law with mean |α + β|² = 0.64
    let text = csv_run(&["pk", "--alpha", "1.2", "--beta", "-0.4"], &path);
    let t = Table::parse(&text);
    assert!((t.get(0, "p") - (-0.64f64).exp()).abs() < 1e-12);
}

#[test]
fn helstrom_reports() {
    let r = report(&["helstrom", "--nbar", "2"]);
    assert!((value(&r, "perr_helstrom") - 8.387269160402486357e-5).abs() < 1e-8);
    let r = report(&[
        "helstrom",
        "--nbar",
        "2",
        "--sigma",
        "50",
        "--modulation",
        "ook",
    ]);
    assert!((value(&r, "perr_helstrom") - HALF_EXP_M4).abs() < 1e-6);
    let by_angle = report(&["helstrom", "--nbar", "2", "--theta", "2.356194490192345"]);
    assert!((value(&by_angle, "perr_helstrom") - 8.387269160402486357e-5).abs() < 1e-8);
}
