//! qcat — batch front door: config parsing, experiment orchestration over
//! N-sweeps, artifact serialization.
//!
//! Exit codes: 0 success, 2 validation, 3 math-invariant failure, 4 resource
//! budget exceeded.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qcat::config::{parse_matrix, ExperimentConfig, KappaPolicy};
use qcat::entropy::{
    build_partition, c_bound_estimate, classical_entropy, classical_extrapolation,
    entropy_certificate, eup_check, quantum_entropy, subadditivity_check,
    ClassicalMeasure, EntropyReport, QuantumEntropyPoint,
};
use qcat::error::{QcatError, Result};
use qcat::linalg::{self, CMat, CVec, C};
use qcat::quantization::TrigObservable;
use qcat::spectra::{
    classical_period, egorov_drift, eigensystem, husimi_grid, measure_of_state, EigenData,
    Quantizer,
};
use qcat::symplectic::{
    check_quantizable, ehrenfest_times, entropy_bounds, lyapunov_data, AdaptedFrame,
    IntSymplecticMatrix,
};
use qcat::torus::{check_intertwining, propagator, QuantumTorus, TorusState};
use qcat::{io, Result as QResult};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "qcat", version, about = "quantized toral automorphism laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each one overrides the matching config
/// key when present.
#[derive(Args, Debug, Clone)]
struct Overrides {
    /// TOML experiment config; flags below override file keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// row-major integer matrix, rows `;`-separated: "2,1;1,1"
    #[arg(long)]
    matrix: Option<String>,
    /// comma-separated N list, e.g. "16,32,64"
    #[arg(long = "n", alias = "N", value_name = "N[,N...]")]
    n: Option<String>,
    /// "auto" or comma-separated floats of length 2d
    #[arg(long)]
    kappa: Option<String>,
    /// weyl | anti_wick | op_plus
    #[arg(long)]
    quantizer: Option<String>,
    /// partition cell count per axis
    #[arg(long = "k", alias = "K")]
    k: Option<usize>,
    /// partition support radius δ₀
    #[arg(long)]
    delta0: Option<f64>,
    /// quadrature grid points per axis
    #[arg(long)]
    grid: Option<usize>,
    /// refinement depth m
    #[arg(long)]
    m: Option<usize>,
    /// Ehrenfest block size m₀
    #[arg(long)]
    m0: Option<usize>,
    /// propagator power n (default: n_E(N))
    #[arg(long = "n-power", value_name = "n")]
    n_power: Option<i64>,
    /// Ehrenfest cutoff ε
    #[arg(long)]
    epsilon: Option<f64>,
    /// neutral-block exponent ε₀
    #[arg(long)]
    epsilon0: Option<f64>,
    /// Theorem 5.2 sampling exponent δ
    #[arg(long)]
    delta: Option<f64>,
    /// c-bound sample count
    #[arg(long)]
    samples: Option<usize>,
    /// c-bound refinement rounds
    #[arg(long)]
    refine_rounds: Option<usize>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// artifact directory
    #[arg(long)]
    output: Option<PathBuf>,
    /// eigenvector selection at degenerate eigenphases
    #[arg(long, value_parser = ["first", "random-seeded", "all"], default_value = "first")]
    eigvec_policy: String,
    /// Husimi grid resolution per axis (default 4N)
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Symplectic/quantizability check, Lyapunov data, entropy bounds
    AnalyzeMatrix(Overrides),
    /// Build M_κ(A) per N; emit the operator container and defect report
    Propagator(Overrides),
    /// Full eigensystem per N; eigenvector container + phase report
    Eigenstates(Overrides),
    /// Husimi densities of selected eigenstates as CSV
    Husimi(Overrides),
    /// Semiclassical measures of selected eigenstates
    Measure(Overrides),
    /// Classical + quantum entropies and the subadditivity chain
    Entropy(Overrides),
    /// Randomized Maassen–Uffink suite
    EupCheck(Overrides),
    /// ĉ(A,n) sampling vs the Theorem-5.2 envelope
    CBound(Overrides),
    /// Egorov drift of eigenstate measures
    Egorov(Overrides),
    /// Corollary-5.1 entropy certificate
    Certify(Overrides),
}

#[derive(Serialize)]
struct Artifact<T: Serialize> {
    version: String,
    config: ExperimentConfig,
    report: T,
}

fn artifact<T: Serialize>(cfg: &ExperimentConfig, report: T) -> Artifact<T> {
    Artifact {
        version: VERSION.to_string(),
        config: cfg.clone(),
        report,
    }
}

fn load_config(ov: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match &ov.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(m) = &ov.matrix {
        cfg.matrix = m.clone();
    }
    if let Some(ns) = &ov.n {
        let mut list = Vec::new();
        for tok in ns.split(',') {
            let v: u64 = tok.trim().parse().map_err(|_| {
                QcatError::Validation(format!("n_list: not a positive integer: {:?}", tok.trim()))
            })?;
            list.push(v);
        }
        cfg.n_list = list;
    }
    if let Some(k) = &ov.kappa {
        cfg.kappa = if k == "auto" {
            KappaPolicy::Named("auto".into())
        } else {
            let mut v = Vec::new();
            for tok in k.split(',') {
                let x: f64 = tok.trim().parse().map_err(|_| {
                    QcatError::Validation(format!("kappa: not a float: {:?}", tok.trim()))
                })?;
                v.push(x);
            }
            KappaPolicy::Explicit(v)
        };
    }
    if let Some(q) = &ov.quantizer {
        cfg.quantizer = q.clone();
    }
    if let Some(k) = ov.k {
        cfg.partition.k = k;
    }
    if let Some(d0) = ov.delta0 {
        cfg.partition.delta0 = d0;
    }
    if let Some(g) = ov.grid {
        cfg.partition.g = g;
    }
    if let Some(m) = ov.m {
        cfg.entropy.m = m;
    }
    if let Some(m0) = ov.m0 {
        cfg.entropy.m0 = m0;
    }
    if let Some(n) = ov.n_power {
        cfg.entropy.n = Some(n);
    }
    if let Some(e) = ov.epsilon {
        cfg.entropy.epsilon = e;
    }
    if let Some(e0) = ov.epsilon0 {
        cfg.entropy.epsilon0 = e0;
    }
    if let Some(d) = ov.delta {
        cfg.entropy.delta = d;
    }
    if let Some(s) = ov.samples {
        cfg.sampling.samples = s;
    }
    if let Some(r) = ov.refine_rounds {
        cfg.sampling.refine_rounds = r;
    }
    if let Some(s) = ov.seed {
        cfg.sampling.seed = s;
    }
    if let Some(o) = &ov.output {
        cfg.output = o.clone();
    }
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output)?;
    Ok(cfg)
}

fn resolve_kappa(cfg: &ExperimentConfig, a: &IntSymplecticMatrix, n: u64) -> Result<Vec<f64>> {
    match &cfg.kappa {
        KappaPolicy::Named(_) => Ok(qcat::torus::find_kappa(a, n)?.remove(0)),
        KappaPolicy::Explicit(v) => {
            if v.len() != 2 * a.d {
                return Err(QcatError::Validation(format!(
                    "kappa: expected length {} for d = {}, got {}",
                    2 * a.d,
                    a.d,
                    v.len()
                )));
            }
            Ok(v.clone())
        }
    }
}

fn frame_for(a: &IntSymplecticMatrix, epsilon0: f64) -> Result<AdaptedFrame> {
    if a.d == 1 {
        AdaptedFrame::d1_hyperbolic(a)
    } else {
        AdaptedFrame::standard(&lyapunov_data(a)?, epsilon0)
    }
}

/// Eigenvector indices selected by `--eigvec-policy`.
fn select_indices(policy: &str, eig: &EigenData, seed: u64) -> Vec<usize> {
    let dim = eig.eigenphases.len();
    match policy {
        "all" => (0..dim).collect(),
        "random-seeded" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            vec![rng.gen_range(0..dim)]
        }
        _ => vec![0],
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qcat: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> QResult<i32> {
    match cli.command {
        Command::AnalyzeMatrix(ov) => analyze_matrix(&ov),
        Command::Propagator(ov) => cmd_propagator(&ov),
        Command::Eigenstates(ov) => cmd_eigenstates(&ov),
        Command::Husimi(ov) => cmd_husimi(&ov),
        Command::Measure(ov) => cmd_measure(&ov),
        Command::Entropy(ov) => cmd_entropy(&ov),
        Command::EupCheck(ov) => cmd_eup_check(&ov),
        Command::CBound(ov) => cmd_c_bound(&ov),
        Command::Egorov(ov) => cmd_egorov(&ov),
        Command::Certify(ov) => cmd_certify(&ov),
    }
}

#[derive(Serialize)]
struct MatrixAnalysis {
    matrix: Vec<Vec<i64>>,
    d: usize,
    symplectic: bool,
    quantizable: bool,
    lyapunov: Option<qcat::symplectic::LyapunovData>,
    lambda_zero: Option<f64>,
    lambda_plus: Option<f64>,
    ehrenfest: Vec<EhrenfestRow>,
}

#[derive(Serialize)]
struct EhrenfestRow {
    n: u64,
    m_e: i64,
    n_e: i64,
}

fn analyze_matrix(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let quantizable = check_quantizable(&a);
    let lyap = lyapunov_data(&a).ok();
    let bounds = lyap.as_ref().map(entropy_bounds);
    let ehrenfest = match &lyap {
        Some(l) if l.lambda_max > 0.0 => cfg
            .n_list
            .iter()
            .map(|&n| {
                let (m_e, n_e) = ehrenfest_times(n, cfg.entropy.epsilon, l);
                EhrenfestRow { n, m_e, n_e }
            })
            .collect(),
        _ => Vec::new(),
    };
    let report = MatrixAnalysis {
        matrix: a.entries.clone(),
        d: a.d,
        symplectic: true,
        quantizable,
        lyapunov: lyap,
        lambda_zero: bounds.map(|b| b.0),
        lambda_plus: bounds.map(|b| b.1),
        ehrenfest,
    };
    let path = cfg.output.join("matrix_analysis.json");
    io::write_json(&path, &artifact(&cfg, &report))?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    if !quantizable {
        eprintln!("qcat: matrix is not quantizable (tr condition fails)");
        return Ok(2);
    }
    Ok(0)
}

#[derive(Serialize)]
struct PropagatorReport {
    n: u64,
    kappa: Vec<f64>,
    intertwining_defect: f64,
    unitarity_defect: f64,
    operator_file: String,
}

fn cmd_propagator(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let mut reports = Vec::new();
    for &n in &cfg.n_list {
        let kappa = resolve_kappa(&cfg, &a, n)?;
        let qt = QuantumTorus::new(n, a.d, kappa.clone())?;
        let m = propagator(&a, &qt)?;
        let file = format!("propagator_N{n}.qcat");
        io::write_operator(&cfg.output.join(&file), &m)?;
        reports.push(PropagatorReport {
            n,
            kappa,
            intertwining_defect: check_intertwining(&m, &a, &qt)?,
            unitarity_defect: m.unitarity_defect(),
            operator_file: file,
        });
    }
    let path = cfg.output.join("propagator_report.json");
    io::write_json(&path, &artifact(&cfg, &reports))?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[derive(Serialize)]
struct EigenReport {
    n: u64,
    kappa: Vec<f64>,
    eigenphases: Vec<f64>,
    max_residual: f64,
    unitarity_defect: f64,
    classical_period: Option<u64>,
    eigenvector_file: String,
    selected_indices: Vec<usize>,
}

fn build_eigensystem(
    cfg: &ExperimentConfig,
    a: &IntSymplecticMatrix,
    n: u64,
) -> Result<(QuantumTorus, EigenData)> {
    let kappa = resolve_kappa(cfg, a, n)?;
    let qt = QuantumTorus::new(n, a.d, kappa)?;
    let m = propagator(a, &qt)?;
    let eig = eigensystem(&m)?;
    Ok((qt, eig))
}

fn cmd_eigenstates(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let mut reports = Vec::new();
    for &n in &cfg.n_list {
        let (qt, eig) = build_eigensystem(&cfg, &a, n)?;
        let file = format!("eigenvectors_N{n}.qcat");
        let as_op = qcat::torus::TorusOperator {
            matrix: eig.eigenvectors.clone(),
            qt: qt.clone(),
        };
        io::write_operator(&cfg.output.join(&file), &as_op)?;
        let selected = select_indices(&ov.eigvec_policy, &eig, cfg.sampling.seed);
        for &idx in &selected {
            let psi = eig.state(idx, &qt);
            io::write_state(&cfg.output.join(format!("eigenstate_N{n}_{idx}.qcat")), &psi)?;
        }
        reports.push(EigenReport {
            n,
            kappa: qt.kappa.clone(),
            eigenphases: eig.eigenphases.to_vec(),
            max_residual: eig.residuals.iter().cloned().fold(0.0, f64::max),
            unitarity_defect: eig.unitarity_defect(),
            classical_period: classical_period(&a, n, 200),
            eigenvector_file: file,
            selected_indices: selected,
        });
    }
    let path = cfg.output.join("eigenstates_report.json");
    io::write_json(&path, &artifact(&cfg, &reports))?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_husimi(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let mut written = Vec::new();
    for &n in &cfg.n_list {
        let (qt, eig) = build_eigensystem(&cfg, &a, n)?;
        let res = ov.resolution.unwrap_or(4 * n as usize);
        for &idx in &select_indices(&ov.eigvec_policy, &eig, cfg.sampling.seed) {
            let psi = eig.state(idx, &qt);
            let grid = husimi_grid(&qt, &psi, res)?;
            let file = format!("husimi_N{n}_{idx}.csv");
            io::write_husimi_csv(&cfg.output.join(&file), &qt, &grid)?;
            written.push(file);
        }
    }
    let path = cfg.output.join("husimi_report.json");
    io::write_json(&path, &artifact(&cfg, &written))?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[derive(Serialize)]
struct MeasureRow {
    n: u64,
    eigenphase_index: usize,
    eigenphase: f64,
    quantizer: Quantizer,
    observable: String,
    value_re: f64,
    value_im: f64,
}

fn cmd_measure(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let quantizer = cfg.quantizer_parsed()?;
    let obs = TrigObservable::cos_x1(a.d);
    let frame = frame_for(&a, cfg.entropy.epsilon0).ok();
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let (qt, eig) = build_eigensystem(&cfg, &a, n)?;
        let aw_grid = 12 * n as usize;
        for &idx in &select_indices(&ov.eigvec_policy, &eig, cfg.sampling.seed) {
            let psi = eig.state(idx, &qt);
            let v = measure_of_state(&qt, &psi, quantizer, &obs, frame.as_ref(), aw_grid)?;
            rows.push(MeasureRow {
                n,
                eigenphase_index: idx,
                eigenphase: eig.eigenphases[idx],
                quantizer,
                observable: "cos_x1".into(),
                value_re: v.re,
                value_im: v.im,
            });
        }
    }
    let path = cfg.output.join("measure_report.json");
    io::write_json(&path, &artifact(&cfg, &rows))?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_entropy(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let quantizer = cfg.quantizer_parsed()?;
    let lyap = lyapunov_data(&a)?;
    let bounds = entropy_bounds(&lyap);
    let frame = frame_for(&a, cfg.entropy.epsilon0)?;
    let part = build_partition(cfg.partition.k, cfg.partition.delta0, cfg.partition.g, a.d)?;
    let h_classical = classical_entropy(
        &ClassicalMeasure::Lebesgue,
        cfg.partition.k,
        &a,
        cfg.entropy.m.max(1),
        cfg.partition.g,
    )?;
    let extrap = classical_extrapolation(&h_classical);
    let mut csv = String::from("N,m,quantizer,h,certificate,lambda_zero,lambda_plus\n");
    let mut reports = Vec::new();
    for &n in &cfg.n_list {
        let (qt, eig) = build_eigensystem(&cfg, &a, n)?;
        let mut h_quantum = Vec::new();
        for &idx in &select_indices(&ov.eigvec_policy, &eig, cfg.sampling.seed) {
            let psi = eig.state(idx, &qt);
            for m in 0..=cfg.entropy.m {
                let h = quantum_entropy(&qt, &psi, &part, &a, m, quantizer, Some(&frame), 0)?;
                let denom = if m == 0 { 1.0 } else { 2.0 * m as f64 };
                csv.push_str(&format!(
                    "{n},{m},{},{:.17e},,{:.17e},{:.17e}\n",
                    cfg.quantizer, h / denom, bounds.0, bounds.1
                ));
                h_quantum.push(QuantumEntropyPoint {
                    m,
                    quantizer,
                    value: h,
                });
            }
            let sub =
                subadditivity_check(&qt, &psi, &part, &a, cfg.entropy.m0, cfg.entropy.epsilon, quantizer, Some(&frame))?;
            reports.push(serde_json::json!({
                "n": n,
                "eigenphase_index": idx,
                "report": EntropyReport {
                    h_classical: h_classical.clone(),
                    h_classical_extrapolation: extrap,
                    h_quantum: h_quantum.clone(),
                    lambda_bounds: bounds,
                    c_estimate: None,
                    certificate: None,
                    eta_convention: EntropyReport::eta_note(),
                },
                "subadditivity": sub,
            }));
        }
    }
    std::fs::write(cfg.output.join("entropy_table.csv"), csv)?;
    let path = cfg.output.join("entropy_report.json");
    io::write_json(&path, &artifact(&cfg, &reports))?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[derive(Serialize)]
struct EupSuiteReport {
    n: u64,
    trials: usize,
    min_margin: f64,
    max_renorm_defect: f64,
    dft_equality_gap: f64,
}

/// Random orthonormal-projector families from eigh of seeded Hermitian
/// matrices; U likewise unitary; ψ random normalized.
fn cmd_eup_check(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let mut reports = Vec::new();
    for &n in &cfg.n_list {
        let dim = n as usize;
        if dim < 2 {
            return Err(QcatError::Validation("eup-check needs N >= 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.sampling.seed ^ n);
        let trials = cfg.sampling.samples.max(1);
        let mut min_margin = f64::INFINITY;
        let mut max_defect = 0.0f64;
        for _ in 0..trials {
            let herm = random_hermitian(&mut rng, dim);
            let (_, basis) = linalg::eigh(&herm);
            let cut = 1 + rng.gen_range(0..dim - 1);
            let pi1 = projector_from_columns(&basis, 0, cut);
            let pi2 = projector_from_columns(&basis, cut, dim);
            let herm_u = random_hermitian(&mut rng, dim);
            let (_, u) = linalg::eigh(&herm_u);
            let psi = random_state(&mut rng, dim);
            let rep = eup_check(&[pi1, pi2], &u, &psi)?;
            min_margin = min_margin.min(rep.margin);
            max_defect = max_defect.max(rep.renorm_defect);
        }
        // basis-projector / Fourier exactness: rank-1 basis projectors, U = DFT
        let pis: Vec<CMat> = (0..dim)
            .map(|i| {
                let mut p = CMat::zeros((dim, dim));
                p[[i, i]] = C::new(1.0, 0.0);
                p
            })
            .collect();
        let scale = 1.0 / (dim as f64).sqrt();
        let dft = CMat::from_shape_fn((dim, dim), |(r, c)| {
            C::from_polar(
                scale,
                -2.0 * std::f64::consts::PI * (r as f64) * (c as f64) / dim as f64,
            )
        });
        let e0 = {
            let mut v = CVec::zeros(dim);
            v[0] = C::new(1.0, 0.0);
            v
        };
        let dft_rep = eup_check(&pis, &dft, &e0)?;
        let gap = (dft_rep.lhs - dft_rep.rhs).abs();
        reports.push(EupSuiteReport {
            n,
            trials,
            min_margin,
            max_renorm_defect: max_defect,
            dft_equality_gap: gap,
        });
    }
    let path = cfg.output.join("eup_report.json");
    io::write_json(&path, &artifact(&cfg, &reports))?;
    println!("wrote {}", path.display());
    let worst = reports
        .iter()
        .map(|r| r.min_margin)
        .fold(f64::INFINITY, f64::min);
    if worst < -1e-8 {
        return Err(QcatError::MathInvariant(format!(
            "EUP margin {worst:.3e} below tolerance"
        )));
    }
    Ok(0)
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    let x = CMat::from_shape_fn((dim, dim), |_| {
        C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    (&x + &linalg::adjoint(&x)).mapv(|z| z * 0.5)
}

fn projector_from_columns(basis: &CMat, from: usize, to: usize) -> CMat {
    let cols = basis.slice(ndarray::s![.., from..to]).to_owned();
    linalg::mul_a_bh(&cols, &cols)
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> CVec {
    let mut v = CVec::from_shape_fn(dim, |_| {
        C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / nrm);
    v
}

#[derive(Serialize)]
struct CBoundRow {
    n: u64,
    n_power: i64,
    c_hat: f64,
    theorem_rhs: f64,
    trend_statistic: f64,
    det_b: f64,
}

fn cmd_c_bound(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let lyap = lyapunov_data(&a)?;
    let frame = frame_for(&a, cfg.entropy.epsilon0)?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let kappa = resolve_kappa(&cfg, &a, n)?;
        let qt = QuantumTorus::new(n, a.d, kappa)?;
        let m = propagator(&a, &qt)?;
        let (_, n_e) = ehrenfest_times(n, cfg.entropy.epsilon, &lyap);
        let n_power = cfg.entropy.n.unwrap_or(n_e).min(n_e);
        let est = c_bound_estimate(
            &qt,
            &frame,
            &a,
            &m,
            n_power,
            cfg.sampling.samples,
            cfg.sampling.refine_rounds,
            cfg.sampling.seed,
            cfg.entropy.delta,
            cfg.entropy.epsilon,
        )?;
        let det_b = qcat::quantization::GaussianFrame::new(&frame, &qt).det_b;
        let trend = est.c_hat.ln() + n_power as f64 * lyap.lambda_zero - det_b.abs().ln();
        rows.push(CBoundRow {
            n,
            n_power,
            c_hat: est.c_hat,
            theorem_rhs: est.theorem_rhs,
            trend_statistic: trend,
            det_b,
        });
    }
    let path = cfg.output.join("c_bound_report.json");
    io::write_json(&path, &artifact(&cfg, &rows))?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[derive(Serialize)]
struct EgorovRow {
    n: u64,
    eigenphase_index: usize,
    quantizer: Quantizer,
    t_max: i64,
    drifts: Vec<f64>,
}

fn cmd_egorov(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let quantizer = cfg.quantizer_parsed()?;
    let lyap = lyapunov_data(&a)?;
    let frame = frame_for(&a, cfg.entropy.epsilon0)?;
    let obs = TrigObservable::cos_x1(a.d);
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let (qt, eig) = build_eigensystem(&cfg, &a, n)?;
        let (m_e, _) = ehrenfest_times(n, cfg.entropy.epsilon, &lyap);
        let aw_grid = 12 * n as usize;
        for &idx in &select_indices(&ov.eigvec_policy, &eig, cfg.sampling.seed) {
            let psi = eig.state(idx, &qt);
            let drifts = egorov_drift(&qt, &psi, &obs, &a, quantizer, Some(&frame), aw_grid, m_e)?;
            rows.push(EgorovRow {
                n,
                eigenphase_index: idx,
                quantizer,
                t_max: m_e,
                drifts,
            });
        }
    }
    let path = cfg.output.join("egorov_report.json");
    io::write_json(&path, &artifact(&cfg, &rows))?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_certify(ov: &Overrides) -> Result<i32> {
    let cfg = load_config(ov)?;
    let a = parse_matrix(&cfg.matrix)?;
    let lyap = lyapunov_data(&a)?;
    let frame = frame_for(&a, cfg.entropy.epsilon0)?;
    let part = build_partition(cfg.partition.k, cfg.partition.delta0, cfg.partition.g, a.d)?;
    let mut reports = Vec::new();
    for &n in &cfg.n_list {
        let kappa = resolve_kappa(&cfg, &a, n)?;
        let qt = QuantumTorus::new(n, a.d, kappa)?;
        let m = propagator(&a, &qt)?;
        let eig = eigensystem(&m)?;
        let (_, n_e) = ehrenfest_times(n, cfg.entropy.epsilon, &lyap);
        let n_power = cfg.entropy.n.unwrap_or(n_e).min(n_e);
        let g_quad = (n as usize / 4).max(4);
        for &idx in &select_indices(&ov.eigvec_policy, &eig, cfg.sampling.seed) {
            let psi: TorusState = eig.state(idx, &qt);
            let cert = entropy_certificate(
                &qt,
                &psi,
                &part,
                &a,
                cfg.entropy.m,
                n_power,
                &frame,
                &m,
                g_quad,
                g_quad,
            )?;
            reports.push(serde_json::json!({
                "n": n,
                "eigenphase_index": idx,
                "certificate": cert,
            }));
        }
    }
    let path = cfg.output.join("certificate_report.json");
    io::write_json(&path, &artifact(&cfg, &reports))?;
    println!("wrote {}", path.display());
    Ok(0)
}
