use std::io::Read;
use std::path::PathBuf;

use eigenbc_core::invariant::{self, FreeEnergyMethod, InvariantBoundaries};
use eigenbc_core::numkit;
use eigenbc_core::symbol::{self, SymbolSpectrum, Zero};
use eigenbc_core::szego::{self, TrigPolySymbol};
use eigenbc_core::{oracles, process, ComplexMatrix, GaussianWeight};
use serde_json::{json, Value};

use crate::format::{Problem, SymbolFile, WeightFile};
use crate::report::{cx, cvec, mat};
use crate::{fixtures, read_input, Cli, CliError, Command, Method, Outcome};

/// Rows of the Szegő table never go below this length.
const MIN_TABLE_P: usize = 4;

fn load(path: &PathBuf, stdin: &mut dyn Read) -> Result<Problem, CliError> {
    WeightFile::parse(&read_input(path, stdin)?)?.problem()
}

fn ok(value: Value) -> Result<Outcome, CliError> {
    Ok(Outcome { value, code: 0 })
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate { file } => ok(validate(&load(file, stdin)?)),
        Command::Spectrum { file } => ok(spectrum(&load(file, stdin)?.weight)?),
        Command::Boundaries { file } => ok(boundaries(&load(file, stdin)?.weight)?),
        Command::FreeEnergy { file, method, p } => ok(free_energy(&load(file, stdin)?.weight, *method, *p)?),
        Command::Covariance { file, p } => ok(covariance(&load(file, stdin)?, *p, cli.tol)?),
        Command::Sample { file, p, n, seed } => ok(sample(&load(file, stdin)?, *p, *n, *seed)?),
        Command::Szego { file, p, order_n } => {
            let sym = match (file, order_n) {
                (Some(f), None) => {
                    let w = load(f, stdin)?.weight;
                    TrigPolySymbol::from_order_one(&symbol::OrderOneSymbol::from_weight(&w))?
                }
                (None, Some(f)) => SymbolFile::parse(&read_input(f, stdin)?)?.symbol()?,
                _ => return Err(CliError::Input("szego needs a weight file or --order-n".into())),
            };
            ok(szego_report(&sym, *p)?)
        }
        Command::Verify { files, random, seed } => verify(files, *random, *seed, cli.tol, stdin),
    }
}

fn validate(pb: &Problem) -> Value {
    let w = &pb.weight;
    let rank = w.d() - w.deficiency();
    json!({
        "d": w.d(),
        "alpha": w.alpha(),
        "hermitian": true,
        "positive_definite": true,
        "min_eigenvalue": numkit::min_hermitian_eigenvalue(w.matrix()),
        "rank_A_LR": rank,
        "deficiency": w.deficiency(),
        "regime": if w.full_rank() { "I" } else { "I'" },
        "boundary_overrides": pb.b_l.is_some() || pb.b_r.is_some(),
    })
}

fn zero_json(z: &Zero) -> Value {
    json!({
        "w": cx(z.w),
        "modulus": z.w.norm(),
        "u": cvec(&z.u),
        "alpha": cx(z.alpha),
        "residue": mat(&z.residue()),
    })
}

fn columns(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.cols()).map(|j| cvec(&m.col(j))).collect())
}

fn spectrum(w: &GaussianWeight) -> Result<Value, CliError> {
    let s = symbol::compute_spectrum(w)?;
    Ok(json!({
        "d": s.d,
        "k": s.k,
        "zeros_inside": s.zeros_inside.iter().map(zero_json).collect::<Vec<_>>(),
        "zeros_outside": s.zeros_outside.iter().map(zero_json).collect::<Vec<_>>(),
        "ker_A_LR": columns(&s.ker_lr),
        "ker_A_RL": columns(&s.ker_rl),
        "decay_rate": s.decay_rate(),
    }))
}

fn spectral(w: &GaussianWeight) -> Result<(SymbolSpectrum, InvariantBoundaries), CliError> {
    let s = symbol::compute_spectrum(w)?;
    let ib = invariant::invariant_boundaries(w, &s)?;
    Ok((s, ib))
}

fn boundaries(w: &GaussianWeight) -> Result<Value, CliError> {
    let (_, ib) = spectral(w)?;
    Ok(json!({
        "W_lt1": mat(&ib.w_lt1),
        "W_gt1_inv": mat(&ib.w_gt1_inv),
        "B_L": mat(&ib.b_l),
        "B_R": mat(&ib.b_r),
        "lambda": ib.lambda,
        "free_energy": ib.free_energy,
        "basis_condition": ib.basis_condition,
        "ill_conditioned": ib.ill_conditioned(),
    }))
}

fn free_energy(w: &GaussianWeight, method: Method, p: Option<usize>) -> Result<Value, CliError> {
    let (name, f) = match method {
        Method::Eigen => ("eigen", invariant::free_energy(w, &symbol::compute_spectrum(w)?, FreeEnergyMethod::Eigen)?),
        Method::Integral => ("integral", invariant::integral_free_energy(w, numkit::DEFAULT_QUADRATURE_NODES)?),
        Method::Dft => {
            let p = p.ok_or_else(|| CliError::Input("--method dft needs --p".into()))?;
            if p < 2 {
                return Err(CliError::Input("--method dft needs --p >= 2".into()));
            }
            ("dft", process::log_periodic_partition(w, p)? / p as f64)
        }
    };
    let mut v = json!({ "method": name, "free_energy": f, "lambda": f.exp() });
    if method == Method::Dft {
        v["p"] = json!(p);
    }
    Ok(v)
}

fn chain(pb: &Problem, p: usize) -> Result<(process::ChainLaw, &'static str), CliError> {
    if p == 0 {
        return Err(CliError::Input("--p must be at least 1".into()));
    }
    let w = &pb.weight;
    let (bl, br, origin) = match (&pb.b_l, &pb.b_r) {
        (Some(l), Some(r)) => (l.clone(), r.clone(), "file"),
        _ => {
            let (_, ib) = spectral(w)?;
            let (l, r) = ib.boundary_weights()?;
            let origin = if pb.b_l.is_some() || pb.b_r.is_some() { "mixed" } else { "invariant" };
            (pb.b_l.clone().unwrap_or(l), pb.b_r.clone().unwrap_or(r), origin)
        }
    };
    Ok((process::assemble_chain(w, &bl, &br, p)?, origin))
}

fn covariance(pb: &Problem, p: usize, tol: f64) -> Result<Value, CliError> {
    let (law, origin) = chain(pb, p)?;
    let n = p + 1;
    let blocks: Vec<Value> = (0..n)
        .map(|i| Value::Array((0..n).map(|j| mat(&law.sigma_block(i, j))).collect()))
        .collect();
    Ok(json!({
        "p": p,
        "d": law.d,
        "boundaries": origin,
        "toeplitz": law.is_toeplitz(tol),
        "blocks": blocks,
    }))
}

fn sample(pb: &Problem, p: usize, n: usize, seed: u64) -> Result<Value, CliError> {
    let (law, origin) = chain(pb, p)?;
    let draws = process::sample(&law, n, seed)?;
    let draws: Vec<Value> = draws
        .iter()
        .map(|x| Value::Array(x.chunks(law.d).map(cvec).collect()))
        .collect();
    Ok(json!({
        "p": p,
        "d": law.d,
        "n": n,
        "seed": seed,
        "boundaries": origin,
        "draws": draws,
    }))
}

fn szego_report(sym: &TrigPolySymbol, p: usize) -> Result<Value, CliError> {
    if p == 0 {
        return Err(CliError::Input("--p must be at least 1".into()));
    }
    let (work, blocked) = if sym.order() >= 2 {
        (szego::block_reduce(sym)?, true)
    } else {
        (sym.clone(), false)
    };
    let ct = szego::corrected_toeplitz(&work, p)?;
    let plain = szego::plain_toeplitz_det(&work, p)?;
    let table = szego::asymptotic_report(&work, p.max(MIN_TABLE_P))?;
    Ok(json!({
        "d": sym.d(),
        "order": sym.order(),
        "blocked": blocked,
        "block_d": work.d(),
        "p": p,
        "g": ct.g,
        "g_quadrature": ct.g_quadrature,
        "kappa": ct.kappa,
        "corrected_det": ct.det(),
        "corrected_log_det": ct.log_det(),
        "plain_det": plain,
        "ratio": plain / ct.det(),
        "G_L": ct.matrix.g_l.as_ref().map(mat),
        "G_R": ct.matrix.g_r.as_ref().map(mat),
        "table": table
            .iter()
            .map(|r| json!({ "p": r.p, "plain": r.plain, "corrected": r.corrected, "ratio": r.ratio }))
            .collect::<Vec<_>>(),
    }))
}

fn reference_checks(name: &str, w: &GaussianWeight, tol: f64) -> Result<Vec<oracles::Check>, CliError> {
    let targets: Vec<(&str, ComplexMatrix)> = match name {
        "ou" => vec![
            ("B_L = 3/4", ComplexMatrix::from_real_rows(&[&[0.75]])),
            ("B_R = 3/4", ComplexMatrix::from_real_rows(&[&[0.75]])),
        ],
        "rd" => {
            let b = ComplexMatrix::from_real_rows(&[&[0.6, 0.0], &[0.0, 1.0]]);
            vec![("B_L = diag(3/5, 1)", b.clone()), ("B_R = diag(3/5, 1)", b)]
        }
        _ => return Ok(Vec::new()),
    };
    let (_, ib) = spectral(w)?;
    Ok(targets
        .into_iter()
        .enumerate()
        .map(|(i, (what, target))| {
            let got = if i == 0 { &ib.b_l } else { &ib.b_r };
            oracles::Check {
                name: what.into(),
                discrepancy: got.distance(&target),
                tolerance: tol,
            }
        })
        .collect())
}

fn verify(
    files: &[PathBuf],
    random: Option<usize>,
    seed: u64,
    tol: f64,
    stdin: &mut dyn Read,
) -> Result<Outcome, CliError> {
    let mut cases: Vec<(String, GaussianWeight)> = Vec::new();
    if files.is_empty() {
        cases.push(("ou".into(), fixtures::ou()));
        cases.push(("rd".into(), fixtures::rd()));
    }
    for f in files {
        cases.push((f.display().to_string(), load(f, stdin)?.weight));
    }
    let n_random = random.unwrap_or(if files.is_empty() { 10 } else { 0 });
    for i in 0..n_random {
        let w = fixtures::random(seed, i)?;
        cases.push((format!("random(d={}, seed={})", w.d(), seed + i as u64), w));
    }

    let mut code = 0;
    let mut report = Vec::new();
    for (name, w) in &cases {
        let checks = reference_checks(name, w, tol).and_then(|mut extra| {
            let mut all = oracles::cross_check(w, tol)?;
            all.append(&mut extra);
            Ok(all)
        });
        match checks {
            Ok(checks) => {
                let passed = checks.iter().all(|c| c.passed());
                if !passed {
                    code = code.max(3);
                }
                report.push(json!({
                    "case": name,
                    "passed": passed,
                    "checks": checks
                        .iter()
                        .map(|c| json!({
                            "name": c.name,
                            "discrepancy": c.discrepancy,
                            "tolerance": c.tolerance,
                            "passed": c.passed(),
                        }))
                        .collect::<Vec<_>>(),
                }));
            }
            Err(e) => {
                code = code.max(e.exit_code());
                report.push(json!({ "case": name, "passed": false, "error": e.to_string() }));
            }
        }
    }
    Ok(Outcome {
        value: json!({ "tolerance": tol, "passed": code == 0, "cases": report }),
        code,
    })
}
