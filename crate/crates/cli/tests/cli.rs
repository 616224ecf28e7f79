use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn shiftdist(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftdist"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_spec(dir: &Path) -> PathBuf {
    let path = dir.join("markov.toml");
    std::fs::write(&path, "kind = \"markov\"\ntransition = [[0.9, 0.1], [0.2, 0.8]]\n").unwrap();
    path
}

#[test]
fn gen_perturb_dist_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d);
    let o = shiftdist(&["gen", "--spec", "markov.toml", "--n", "5000", "--seed", "3", "x.bin"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::metadata(d.join("x.bin")).unwrap().len(), 5000);

    let o = shiftdist(
        &["perturb", "x.bin", "y.rle", "--channel", "indel", "--eps", "0.05", "--certificate", "cert.txt"],
        d,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = shiftdist(&["dist", "x.bin", "y.rle", "--checkpoints", "100,1000,5000"], d);
    assert!(o.status.success());
    let csv = stdout(&o);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,dbar_n,fbar_n");
    assert_eq!(lines.len(), 4);
    let last: Vec<f64> = lines[3].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 5000.0);
    assert!(last[2] <= last[1]);

    // A valid certificate passes at its own rate and fails at zero.
    let pairs = std::fs::read_to_string(d.join("cert.txt")).unwrap().lines().count();
    let eps_cert = format!("{}", 1.0 - pairs as f64 / 5000.0);
    let o = shiftdist(&["dist", "x.bin", "y.rle", "--certificate", "cert.txt", "--eps", &eps_cert], d);
    assert_eq!(o.status.code(), Some(0));
    let o = shiftdist(&["dist", "x.bin", "y.rle", "--certificate", "cert.txt", "--eps", "0"], d);
    assert_eq!(o.status.code(), Some(2));

    let o = shiftdist(&["dist", "x.bin", "y.rle", "--metric", "dbar", "--checkpoints", "5000"], d);
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn entropy_table_and_units() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d);
    shiftdist(&["gen", "--spec", "markov.toml", "--n", "100000", "w.bin"], d);
    let nats = stdout(&shiftdist(&["entropy", "w.bin", "--m", "4"], d));
    let bits = stdout(&shiftdist(&["entropy", "w.bin", "--m", "4", "--unit", "bits"], d));
    assert!(nats.starts_with("m,H_m,ratio,slope,n,flag\n"));
    assert_eq!(nats.lines().count(), 5);
    let slope = |csv: &str| -> f64 { csv.lines().nth(4).unwrap().split(',').nth(3).unwrap().parse().unwrap() };
    assert!((slope(&nats) - 0.3835).abs() < 0.02);
    assert!((slope(&bits) * std::f64::consts::LN_2 - slope(&nats)).abs() < 1e-12);
}

#[test]
fn induce_histogram_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("w.rle"), "alphabet 2\n0:2 1:1 0:1 1:2\n").unwrap();
    let o = shiftdist(&["induce", "w.rle", "--mark", "1"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "r,count,mass\n1,1,0.5\n2,1,0.5\n");
    let o = shiftdist(&["induce", "w.rle", "--mark", "1", "--emit", "svg", "-o", "h.svg"], d);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(d.join("h.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn abramov_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d);
    let o = shiftdist(&["abramov", "--spec", "markov.toml", "--n", "50000", "--m", "4", "--seeds", "3"], d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 4);
    // An impossible tolerance turns into a criterion failure.
    let o = shiftdist(
        &["abramov", "--spec", "markov.toml", "--n", "50000", "--m", "4", "--seeds", "3", "--tolerance", "0"],
        d,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn continuity_writes_outputs_and_plot_rerenders() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_spec(d);
    std::fs::write(
        d.join("exp.toml"),
        "spec_file = \"markov.toml\"\nn = 20000\nm = 6\neps = [0.01, 0.1]\nseeds = [1, 2]\n\n[output]\ncsv = \"out.csv\"\nsvg = \"out.svg\"\n",
    )
    .unwrap();
    let o = shiftdist(&["continuity", "--config", "exp.toml"], d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.join("out.csv")).unwrap();
    assert_eq!(csv, stdout(&o));
    assert_eq!(csv.lines().count(), 5);
    let o = shiftdist(&["plot", "out.csv"], d);
    assert_eq!(stdout(&o), std::fs::read_to_string(d.join("out.svg")).unwrap());

    // Invalid configs are usage errors, not criterion failures.
    std::fs::write(
        d.join("bad.toml"),
        "spec_file = \"markov.toml\"\nn = 20000\nm = 6\neps = [0.1]\nseeds = [1]\nslack = -1.0\n",
    )
    .unwrap();
    assert_eq!(shiftdist(&["continuity", "--config", "bad.toml"], d).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(shiftdist(&["dist"], d).status.code(), Some(1));
    assert_eq!(shiftdist(&["entropy", "missing.bin", "--m", "2"], d).status.code(), Some(1));
    assert_eq!(shiftdist(&["continuity"], d).status.code(), Some(1));
    assert_eq!(shiftdist(&["--help"], d).status.code(), Some(0));
}

#[test]
fn shipped_configs_parse() {
    let dir = configs();
    for name in ["markov", "bernoulli_half", "bernoulli_fifth", "mixture", "periodic"] {
        let d = tempfile::tempdir().unwrap();
        let spec = dir.join(format!("{name}.toml"));
        let o = shiftdist(&["gen", "--spec", spec.to_str().unwrap(), "--n", "1000", "w.bin"], d.path());
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["continuity_markov", "continuity_mixture", "abramov"] {
        let cfg = shiftdist::harness::ExperimentConfig::from_file(&dir.join(format!("{name}.toml"))).unwrap();
        let spec = cfg.process_spec().unwrap();
        cfg.validate(spec.alphabet().size()).unwrap();
    }
}
