use std::path::Path;
use std::process::{Command, Output};

use tetra_bridge::stochastic::q_normal;
use tetra_bridge::RealMat;
use tetra_bridge_cli::io::{self, Kind, MatrixFile};

const BIN: &str = env!("CARGO_BIN_EXE_tetra-bridge");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("TETRA_BRIDGE_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn put(dir: &Path, name: &str, file: &MatrixFile) -> String {
    let p = dir.join(name);
    std::fs::write(&p, file.to_json()).unwrap();
    p.to_string_lossy().into_owned()
}

fn depolarizing(p: f64) -> RealMat {
    let flat = RealMat::from_fn(4, 4, |_, _| 0.25);
    &RealMat::identity(4).scale(p) + &flat.scale(1.0 - p)
}

fn matrix(m: &RealMat) -> MatrixFile {
    MatrixFile::matrix(Kind::StochasticMatrix, m, None)
}

#[test]
fn validate_identity_and_negative_entry() {
    let dir = tempfile::tempdir().unwrap();
    let id = put(dir.path(), "id.json", &matrix(&RealMat::identity(4)));
    let o = run(&["validate", &id]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("doubly stochastic: true"));

    let mut bad = RealMat::identity(4);
    bad[(2, 1)] = -0.2;
    bad[(1, 1)] = 1.2;
    let bad = put(dir.path(), "bad.json", &matrix(&bad));
    let o = run(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("negative entry Q[2][1] = -0.2"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn validate_prob_vec_reports_bloch_vector() {
    let dir = tempfile::tempdir().unwrap();
    let p = put(
        dir.path(),
        "p.json",
        &MatrixFile::prob_vec([0.4, 0.3, 0.2, 0.1]),
    );
    let o = run(&["validate", &p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("r: (0.4, 0.2, 0)"), "{}", stdout(&o));

    let bad = put(
        dir.path(),
        "bad.json",
        &MatrixFile::prob_vec([0.5, 0.5, 0.5, -0.5]),
    );
    assert_eq!(run(&["validate", &bad]).status.code(), Some(1));
}

#[test]
fn parse_and_io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{not json").unwrap();
    assert_eq!(
        run(&["validate", junk.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["validate", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn environment_tolerance_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let id = put(dir.path(), "id.json", &matrix(&RealMat::identity(4)));
    let o = Command::new(BIN)
        .args(["validate", &id])
        .env("TETRA_BRIDGE_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("tolerance entry: 1e-6"));
    let o = Command::new(BIN)
        .args(["validate", &id])
        .env("TETRA_BRIDGE_TOL", "loose")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn to_channel_depolarizing_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let q = put(dir.path(), "dep.json", &matrix(&depolarizing(0.5)));
    let out = dir.path().join("ch.json");
    let o = run(&["to-channel", &q, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("summary: depolarizing, λ=(0.5, 0.5, 0.5), CP TP unital"),
        "{}",
        stdout(&o)
    );

    let superop = io::load(&dir.path().join("ch.superop.json")).unwrap().file;
    let expected = tetra_bridge::qchannel::superoperator(&depolarizing(0.5)).unwrap();
    assert_eq!(superop.complex(), expected);
    let choi = dir.path().join("ch.choi.json");
    let o = run(&["validate", choi.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("CP: true"));
}

#[test]
fn to_channel_rejects_non_cp_normal_form() {
    let dir = tempfile::tempdir().unwrap();
    let q = put(dir.path(), "qn.json", &matrix(&q_normal(&[1.0, 1.0, -1.0])));
    let o = run(&["to-channel", &q, "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fields"]["CP"], serde_json::json!(false));
    let min = v["fields"]["min Choi eigenvalue"].as_f64().unwrap();
    assert!((min + 0.5).abs() < 1e-12);
}

#[test]
fn to_channel_on_qutrit_sic() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let q = tetra_bridge::stochastic::random_column_stochastic(9, &mut rng);
    let dir = tempfile::tempdir().unwrap();
    let path = put(dir.path(), "q9.json", &matrix(&q));
    let out = dir.path().join("q9_choi.json");
    let o = run(&[
        "to-channel",
        &path,
        "--basis",
        "sic",
        "--emit",
        "choi",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("CP TP"));
    assert_eq!(io::load(&out).unwrap().file.dim, 9);
    // orthonormal basis is qubit only
    assert_eq!(run(&["to-channel", &path]).status.code(), Some(2));
}

fn generator(h_vec: [f64; 3]) -> MatrixFile {
    MatrixFile::matrix(
        Kind::Generator,
        &tetra_bridge::lindblad::h_normal(&h_vec),
        None,
    )
}

#[test]
fn lindblad_examples() {
    let dir = tempfile::tempdir().unwrap();
    let good = put(dir.path(), "good.json", &generator([-1.0, -1.0, -1.0]));
    let o = run(&["lindblad", &good, "--time", "0.1,1,5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fields"]["Lindblad certified"], serde_json::json!(true));
    for t in ["t=0.1", "t=1", "t=5"] {
        assert!(v["fields"][t]["residual"].as_f64().unwrap() < 1e-8);
    }

    let bad = put(dir.path(), "bad.json", &generator([1.0, 0.0, 0.0]));
    let o = run(&["lindblad", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(
        text.contains("classical generator: false") && text.contains("Lindblad certified: false")
    );
    assert!(
        text.contains("negative rate") && text.contains("min omega-perp eigenvalue -0.5"),
        "{text}"
    );

    let zero = put(dir.path(), "zero.json", &generator([0.0, 0.0, 0.0]));
    let o = run(&["lindblad", &zero]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("identity dynamics"));
}

fn read_rows(csv: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,p0,p1,p2,p3,r1,r2,r3,q1,q2,q3"));
    lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn evolve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = put(
        dir.path(),
        "p.json",
        &MatrixFile::prob_vec([1.0, 0.0, 0.0, 0.0]),
    );
    let q = put(dir.path(), "dep.json", &matrix(&depolarizing(0.5)));
    let out = dir.path().join("t.csv");
    let o = run(&[
        "evolve",
        &q,
        &p,
        "--steps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[1][1..5], &[0.625, 0.125, 0.125, 0.125]);

    let id = put(dir.path(), "id.json", &matrix(&RealMat::identity(4)));
    let p2 = put(
        dir.path(),
        "p2.json",
        &MatrixFile::prob_vec([0.4, 0.3, 0.2, 0.1]),
    );
    run(&[
        "evolve",
        &id,
        &p2,
        "--steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = read_rows(&out);
    assert!(rows.windows(2).all(|w| w[0][1..] == w[1][1..]));

    let lambda = [0.5, -0.4, -0.3];
    let qn = put(dir.path(), "qn.json", &matrix(&q_normal(&lambda)));
    run(&[
        "evolve",
        &qn,
        &p2,
        "--steps",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = read_rows(&out);
    let r0 = [rows[0][5], rows[0][6], rows[0][7]];
    for i in 0..3 {
        assert!((rows[4][5 + i] - lambda[i].powi(4) * r0[i]).abs() < 1e-14);
        assert!((rows[4][8 + i] - rows[4][5 + i]).abs() < 1e-12);
    }
}

#[test]
fn random_corpus_is_deterministic_and_valid() {
    for kind in ["doubly", "lambda", "generator"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for d in [&a, &b] {
            let o = run(&[
                "random",
                "--kind",
                kind,
                "--count",
                "3",
                "--seed",
                "7",
                "--out",
                d.path().to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
        }
        for i in 0..3 {
            let name = format!("{kind}_{i:04}.json");
            let x = std::fs::read(a.path().join(&name)).unwrap();
            let y = std::fs::read(b.path().join(&name)).unwrap();
            assert_eq!(x, y);
            let path = a.path().join(&name);
            let o = run(&["validate", path.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{kind}: {}", stdout(&o));
            if kind == "lambda" {
                assert!(stdout(&o).contains("tetrahedron margins"));
            }
        }
    }
}
