use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use tetra_bridge::numkernel::{c64, gamma_involution, hermitian_eig};
use tetra_bridge::stochastic::{self, StochasticFlags, SUM_TOL};
use tetra_bridge::tetra::{self, BlochVec, ProbVec4};
use tetra_bridge::{gmap, lindblad, qchannel, ComplexMat, RealMat, EIGEN_FLOOR};

use crate::io::{self, Kind, MatrixFile};
use crate::report::{short, Report};
use crate::{Basis, CliError, Emit, RandomKind};

const AGREEMENT_TOL: f64 = 1e-9;
const GENERATOR_ATTEMPTS: usize = 10_000;

fn triple(v: &[f64; 3]) -> String {
    format!("({}, {}, {})", short(v[0]), short(v[1]), short(v[2]))
}

pub fn validate(path: &Path, tol: f64) -> Result<Report, CliError> {
    let loaded = io::load(path)?;
    let mut r = Report::new(format!("validate {}", path.display()));
    r.input(&loaded);
    r.set("kind", loaded.file.kind.tag());
    match loaded.file.kind {
        Kind::StochasticMatrix => validate_matrix(&mut r, &loaded.file.real(), tol)?,
        Kind::ProbVec => validate_prob(&mut r, &loaded.file.entries, tol),
        Kind::Generator => validate_generator(&mut r, loaded.file.real(), tol)?,
        Kind::ChannelReport => validate_channel(&mut r, &loaded.file)?,
    }
    Ok(r)
}

fn stochastic_fields(r: &mut Report, flags: &StochasticFlags) {
    r.set("stochastic", flags.is_stochastic);
    r.set("doubly stochastic", flags.is_doubly_stochastic);
    r.set("symmetric", flags.is_symmetric);
    r.set("min entry", flags.min_entry);
    r.set("max column-sum deviation", flags.max_column_deviation);
}

fn locate_failure(q: &RealMat, flags: &StochasticFlags) -> String {
    if flags.min_entry < -flags.tol {
        let (i, j) = flags.min_entry_at;
        return format!("negative entry Q[{i}][{j}] = {}", flags.min_entry);
    }
    let n = q.rows();
    let (j, sum) = (0..n)
        .map(|j| (j, (0..n).map(|i| q[(i, j)]).sum::<f64>()))
        .max_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
        .expect("nonempty matrix");
    format!("column {j} sums to {sum}")
}

fn validate_matrix(r: &mut Report, q: &RealMat, tol: f64) -> Result<(), CliError> {
    r.tolerance("entry", tol);
    r.tolerance("sum", SUM_TOL);
    let flags = stochastic::classify(q, tol)?;
    stochastic_fields(r, &flags);
    if !flags.is_stochastic {
        r.fail(locate_failure(q, &flags));
        return Ok(());
    }
    if q.rows() != 4 {
        return Ok(());
    }
    let m = stochastic::validate(q, tol)?;
    let affine = stochastic::to_affine(&m)?;
    r.list("t", &affine.t);
    r.list("Lambda", affine.lambda_mat.as_slice());
    if m.is_doubly_stochastic() {
        r.tolerance("translation", stochastic::TRANSLATION_TOL);
        let nf = stochastic::normal_form(&m)?;
        let member = tetra::in_tetrahedron(&BlochVec::new(nf.lambda), tol);
        r.list("lambda", &nf.lambda);
        r.list("tetrahedron margins", &member.margins);
    }
    Ok(())
}

fn validate_prob(r: &mut Report, entries: &[f64], tol: f64) {
    r.tolerance("entry", tetra_bridge::DEFAULT_TOL);
    r.tolerance("sum", tetra::PROB_SUM_TOL);
    let p = [entries[0], entries[1], entries[2], entries[3]];
    match ProbVec4::new(p) {
        Ok(p) => {
            let b = tetra::prob_to_bloch(&p);
            let member = tetra::in_tetrahedron(&b, tol);
            r.list("r", &b.r);
            r.list("tetrahedron margins", &member.margins);
        }
        Err(e) => r.fail(e.to_string()),
    }
}

fn validate_generator(r: &mut Report, h: RealMat, tol: f64) -> Result<(), CliError> {
    r.tolerance("rate", tol);
    r.tolerance("structure", lindblad::GENERATOR_TOL);
    let g = match lindblad::Generator4::new(h, tol) {
        Ok(g) => g,
        Err(e) => {
            r.fail(e.to_string());
            return Ok(());
        }
    };
    r.set("classical generator", g.is_classical_generator);
    r.set("min off-diagonal rate", g.min_off_diagonal);
    let nf = lindblad::gen_normal_form(&g)?;
    r.list("h", &nf.h_vec);
    if !g.is_classical_generator {
        r.fail(negative_rate(g.h()));
    }
    Ok(())
}

fn negative_rate(h: &RealMat) -> String {
    let mut worst = (0, 1, f64::INFINITY);
    for i in 0..4 {
        for j in 0..4 {
            if i != j && h[(i, j)] < worst.2 {
                worst = (i, j, h[(i, j)]);
            }
        }
    }
    format!(
        "negative rate H[{}][{}] = {}",
        worst.0,
        worst.1,
        short(worst.2)
    )
}

/// Partial trace of a Choi matrix over the output factor.
fn trace_out_output(choi: &ComplexMat, d: usize) -> ComplexMat {
    ComplexMat::from_fn(d, d, |b, e| {
        (0..d).fold(c64(0.0, 0.0), |acc, a| acc + choi[(a * d + b, a * d + e)])
    })
}

fn validate_channel(r: &mut Report, file: &MatrixFile) -> Result<(), CliError> {
    r.tolerance("eigenvalue floor", EIGEN_FLOOR);
    r.tolerance("channel", qchannel::CHANNEL_TOL);
    let n = file.dim;
    let d = (1..=n)
        .find(|d| d * d == n)
        .ok_or_else(|| CliError::Usage(format!("channel dimension {n} is not a square")))?;
    let m = file.complex();
    let choi = match file.label.as_deref() {
        Some("choi") => m,
        _ => gamma_involution(&m)?.scale(c64(1.0 / d as f64, 0.0)),
    };
    let eig = match hermitian_eig(&choi) {
        Ok(eig) => eig,
        Err(e) => {
            r.fail(e.to_string());
            return Ok(());
        }
    };
    let cp = eig.min_eigenvalue() >= -EIGEN_FLOOR;
    let tp_defect = trace_out_output(&choi, d)
        .distance(&ComplexMat::identity(d).scale(c64(1.0 / d as f64, 0.0)));
    let tp = tp_defect <= qchannel::CHANNEL_TOL;
    r.set("CP", cp);
    r.set("TP", tp);
    r.list("Choi eigenvalues", &eig.eigenvalues);
    r.set("min Choi eigenvalue", eig.min_eigenvalue());
    if !(cp && tp) {
        r.fail("not a CPTP map");
    }
    Ok(())
}

/// `pI + (1−p)·J/4` detection on a 4×4 matrix.
fn depolarizing_parameter(q: &RealMat) -> Option<f64> {
    let diag = q[(0, 0)];
    let off = q[(0, 1)];
    let same = (0..4).all(|i| {
        (0..4).all(|j| {
            let want = if i == j { diag } else { off };
            (q[(i, j)] - want).abs() <= 1e-12
        })
    });
    (same && (diag + 3.0 * off - 1.0).abs() <= 1e-12).then_some(diag - off)
}

fn suffixed(out: &Path, tag: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "json".into());
    out.with_file_name(format!("{stem}.{tag}.{ext}"))
}

pub fn to_channel(
    path: &Path,
    basis: Basis,
    emit: Emit,
    out: Option<&Path>,
    tol: f64,
) -> Result<Report, CliError> {
    let loaded = io::load_kind(path, &[Kind::StochasticMatrix])?;
    let q = loaded.file.real();
    let mut r = Report::new(format!("to-channel {}", path.display()));
    r.input(&loaded);
    r.tolerance("entry", tol);
    r.tolerance("channel", qchannel::CHANNEL_TOL);
    r.tolerance("eigenvalue floor", EIGEN_FLOOR);
    let flags = stochastic::classify(&q, tol)?;
    r.set("input stochastic", flags.is_stochastic);
    r.set("input doubly stochastic", flags.is_doubly_stochastic);

    let (superop, choi, cp, tp, unital, eigenvalues) = match basis {
        Basis::Orthonormal => {
            if q.rows() != 4 {
                return Err(CliError::Usage(format!(
                    "orthonormal basis needs a 4x4 matrix, got {0}x{0}",
                    q.rows()
                )));
            }
            r.set("basis", "orthonormal");
            let ch = qchannel::map_to_channel(&q)?;
            let cert = qchannel::certify(&ch, qchannel::CHANNEL_TOL)?;
            (
                ch.superop,
                ch.choi,
                cert.completely_positive,
                cert.trace_preserving,
                cert.unital,
                cert.choi_eigenvalues,
            )
        }
        Basis::Sic => {
            let d = match q.rows() {
                4 => 2,
                9 => 3,
                n => {
                    return Err(CliError::Usage(format!(
                        "SIC basis needs a 4x4 or 9x9 matrix, got {n}x{n}"
                    )))
                }
            };
            let pair = gmap::sic_basis(d)?;
            r.set("basis", format!("sic d={d}"));
            let g_flags = pair.g_flags();
            r.set("G max column-sum deviation", g_flags.max_column_deviation);
            let ch = gmap::build_channel(&q, &pair)?;
            (
                ch.superop,
                ch.choi,
                ch.completely_positive,
                ch.trace_preserving,
                ch.unital,
                ch.choi_eigenvalues,
            )
        }
    };
    let min_eig = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    r.set("CP", cp);
    r.set("TP", tp);
    r.set("unital", unital);
    r.list("Choi eigenvalues", &eigenvalues);
    r.set("min Choi eigenvalue", min_eig);

    let mut summary = Vec::new();
    if basis == Basis::Orthonormal && flags.is_doubly_stochastic {
        let nf = stochastic::normal_form(&stochastic::validate(&q, tol)?)?;
        r.list("lambda", &nf.lambda);
        if let Some(p) = depolarizing_parameter(&q) {
            r.set("depolarizing p", p);
            summary.push("depolarizing".to_string());
        }
        summary.push(format!("λ={}", triple(&nf.lambda)));
    }
    if cp && tp {
        let mut tags = String::from("CP TP");
        if unital {
            tags.push_str(" unital");
        }
        summary.push(tags);
    } else {
        summary.push(format!(
            "CP: {cp}, TP: {tp}, min Choi eigenvalue {}",
            short(min_eig)
        ));
    }
    r.set("summary", summary.join(", "));

    if let Some(out) = out {
        let files: Vec<(PathBuf, MatrixFile)> = match emit {
            Emit::Superop => vec![(out.to_path_buf(), MatrixFile::channel(&superop, "superop"))],
            Emit::Choi => vec![(out.to_path_buf(), MatrixFile::channel(&choi, "choi"))],
            Emit::Both => vec![
                (
                    suffixed(out, "superop"),
                    MatrixFile::channel(&superop, "superop"),
                ),
                (suffixed(out, "choi"), MatrixFile::channel(&choi, "choi")),
            ],
        };
        for (p, f) in files {
            let digest = io::write(&p, &f.to_json())?;
            r.output(&p, digest);
        }
    }
    if !(cp && tp) {
        r.fail("image is not a CPTP map");
    }
    Ok(r)
}

pub fn lindblad(path: &Path, times: &[f64], tol: f64) -> Result<Report, CliError> {
    let loaded = io::load_kind(path, &[Kind::Generator])?;
    let mut r = Report::new(format!("lindblad {}", path.display()));
    r.input(&loaded);
    r.tolerance("rate", tol);
    r.tolerance("structure", lindblad::GENERATOR_TOL);
    r.tolerance("certificate", lindblad::CERT_TOL);
    r.tolerance("eigenvalue floor", EIGEN_FLOOR);
    r.tolerance("exponential", lindblad::EXP_TOL);
    let g = match lindblad::Generator4::new(loaded.file.real(), tol) {
        Ok(g) => g,
        Err(e) => {
            r.fail(e.to_string());
            return Ok(r);
        }
    };
    let nf = lindblad::gen_normal_form(&g)?;
    r.set("classical generator", g.is_classical_generator);
    r.set("min off-diagonal rate", g.min_off_diagonal);
    r.list("h", &nf.h_vec);
    let cert = lindblad::lindblad_certify(&lindblad::map_generator(&g)?)?;
    r.set("hermiticity preserving", cert.hermitian_ok);
    r.set("trace annihilating", cert.dual_unital_ok);
    r.set("conditionally positive", cert.conditional_positivity_ok);
    r.set("Lindblad certified", cert.certified());
    r.list("omega-perp spectrum", &cert.omega_perp_spectrum);
    if g.h().max_abs() == 0.0 {
        r.note("zero generator: identity dynamics");
    }
    let both = g.is_classical_generator && cert.certified();
    for s in lindblad::exp_report(&g, times)? {
        r.set(
            &format!("t={}", s.time),
            json!({
                "residual": s.residual,
                "exp(tH) stochastic": s.classical_stochastic,
                "exp(tL) CP": s.quantum_cp,
                "min entry": s.min_classical_entry,
                "min Choi eigenvalue": s.min_choi_eigenvalue,
            }),
        );
        if both && !s.ok() {
            r.fail(format!("exponential consistency fails at t={}", s.time));
        }
    }
    if !g.is_classical_generator {
        r.fail(negative_rate(g.h()));
    }
    if !cert.certified() {
        r.fail(format!(
            "not a Lindblad generator: min omega-perp eigenvalue {}",
            short(cert.min_eigenvalue())
        ));
    }
    Ok(r)
}

pub fn evolve(
    qpath: &Path,
    ppath: &Path,
    steps: usize,
    out: &Path,
    tol: f64,
) -> Result<Report, CliError> {
    let ql = io::load_kind(qpath, &[Kind::StochasticMatrix])?;
    let pl = io::load_kind(ppath, &[Kind::ProbVec])?;
    let mut r = Report::new(format!(
        "evolve {} {} --steps {steps}",
        qpath.display(),
        ppath.display()
    ));
    r.input(&ql);
    r.input(&pl);
    r.tolerance("entry", tol);
    r.tolerance("agreement", AGREEMENT_TOL);
    let q = ql.file.real();
    if q.rows() != 4 {
        return Err(CliError::Usage(format!(
            "evolve needs a 4x4 matrix, got {0}x{0}",
            q.rows()
        )));
    }
    let m = stochastic::validate(&q, tol)?;
    stochastic_fields(&mut r, &m.flags);
    if !m.is_stochastic() {
        r.fail(locate_failure(&q, &m.flags));
        return Ok(r);
    }
    let e = &pl.file.entries;
    let p0 = match ProbVec4::new([e[0], e[1], e[2], e[3]]) {
        Ok(p) => p,
        Err(err) => {
            r.fail(err.to_string());
            return Ok(r);
        }
    };
    let classical = stochastic::step(&m, &p0, steps)?;
    let channel = qchannel::map_to_channel(&q)?;
    let mut rho = qchannel::density_from_bloch(&tetra::prob_to_bloch(&p0).r);

    let mut csv_out = csv::Writer::from_writer(Vec::new());
    let header = [
        "step", "p0", "p1", "p2", "p3", "r1", "r2", "r3", "q1", "q2", "q3",
    ];
    csv_out
        .write_record(header)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut max_gap: f64 = 0.0;
    for (n, p) in classical.iter().enumerate() {
        if n > 0 {
            rho = channel.act(&rho);
        }
        let rc = tetra::prob_to_bloch(p).r;
        let rq = qchannel::bloch_vector(&rho);
        for i in 0..3 {
            max_gap = max_gap.max((rc[i] - rq[i]).abs());
        }
        let mut row = vec![n.to_string()];
        row.extend(
            p.as_array()
                .iter()
                .chain(&rc)
                .chain(&rq)
                .map(|x| x.to_string()),
        );
        csv_out
            .write_record(&row)
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = csv_out
        .into_inner()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is ASCII");
    let digest = io::write(out, &text)?;
    r.set("steps", steps as f64);
    r.list("final p", &classical[steps].as_array());
    r.set("max classical/quantum Bloch gap", max_gap);
    r.output(out, digest);
    if m.is_doubly_stochastic() && max_gap > AGREEMENT_TOL {
        r.fail(format!("trajectories disagree by {max_gap:e}"));
    }
    Ok(r)
}

fn uniform_h<R: Rng>(rng: &mut R) -> [f64; 3] {
    std::array::from_fn(|_| rng.gen_range(-2.0..2.0))
}

fn random_generator<R: Rng>(rng: &mut R, tol: f64) -> Result<lindblad::Generator4, CliError> {
    for _ in 0..GENERATOR_ATTEMPTS {
        let h = uniform_h(rng);
        let g = lindblad::Generator4::from_normal(&h, &stochastic::random_rotation(rng), tol)?;
        if g.is_classical_generator
            && lindblad::lindblad_certify(&lindblad::map_generator(&g)?)?.certified()
        {
            return Ok(g);
        }
    }
    Err(tetra_bridge::Error::SamplingExhausted {
        attempts: GENERATOR_ATTEMPTS,
    }
    .into())
}

/// `kind` objects from `ChaCha8Rng::seed_from_u64(seed)`, written as
/// `{kind}_{i:04}.json` under `out`.
pub fn random(
    count: usize,
    seed: u64,
    kind: RandomKind,
    out: &Path,
    tol: f64,
) -> Result<Report, CliError> {
    let mut r = Report::new(format!(
        "random --kind {} --count {count} --seed {seed}",
        kind.tag()
    ));
    r.tolerance("entry", tol);
    r.set("generator", "ChaCha8Rng::seed_from_u64");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let file = match kind {
            RandomKind::Doubly => {
                let m = stochastic::random_doubly_stochastic(&mut rng)?;
                MatrixFile::matrix(Kind::StochasticMatrix, m.q(), None)
            }
            RandomKind::Lambda => {
                let l = tetra::sample_tetrahedron(&mut rng).r;
                let label = format!(
                    "lambda=({}, {}, {})",
                    io::num17(l[0]),
                    io::num17(l[1]),
                    io::num17(l[2])
                );
                MatrixFile::matrix(
                    Kind::StochasticMatrix,
                    &stochastic::q_normal(&l),
                    Some(label),
                )
            }
            RandomKind::Generator => {
                let g = random_generator(&mut rng, tol)?;
                MatrixFile::matrix(Kind::Generator, g.h(), None)
            }
        };
        let path = out.join(format!("{}_{i:04}.json", kind.tag()));
        let text = file.to_json();
        // every emitted object has to pass its own validator
        let back = io::parse(&text).map_err(|message| CliError::Parse {
            path: path.clone(),
            message,
        })?;
        let passes = match kind {
            RandomKind::Doubly | RandomKind::Lambda => {
                stochastic::classify(&back.real(), tol)?.is_stochastic
            }
            RandomKind::Generator => {
                lindblad::Generator4::new(back.real(), tol)?.is_classical_generator
            }
        };
        if !passes {
            r.fail(format!("{} does not pass validation", path.display()));
        }
        let digest = io::write(&path, &text)?;
        r.output(&path, digest);
    }
    r.set("count", count as f64);
    Ok(r)
}
