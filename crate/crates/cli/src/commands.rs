use std::collections::BTreeMap;
use std::path::Path;

use schmidt_core::distill::{
    distillability_check, paper_example_state, reduction_criterion, screen_batch, BoundChoice,
    DistillCertificate,
};
use schmidt_core::io::DensityMatrixFile;
use schmidt_core::optimize::{figure1_grid, maximize_rrn_lower_bound, sweep_figure1, OptimizerConfig};
use schmidt_core::robustness::{
    conjectured_ball_radius, gen_schmidt_bounds, generalized_robustness_pure, random_robustness_pure,
    random_schmidt_upper, random_schmidt_upper_weak, robustness_pure, BoundReport,
};
use schmidt_core::states::{
    isotropic_schmidt_number, isotropic_threshold, max_entangled, schmidt_decompose, subset_mixture,
    IsotropicParams, PureState,
};
use schmidt_core::twirl::verify_thm3_construction;
use schmidt_core::witness::{canonical_witness, witness_value};
use schmidt_core::{BipartiteOperator, Complex64, Execution};
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{emit_json, object, to_value, CliError, CliResult};

/// Coefficients from the command line: zero-padded to `d` if given, then
/// normalized, with a warning when the input norm was visibly off.
fn pure_state_from_cli(coeffs: &[f64], d: Option<usize>) -> CliResult<PureState> {
    if coeffs.iter().any(|c| *c < 0.0 || !c.is_finite()) {
        return Err(CliError::Validation(
            "Schmidt coefficients must be finite and nonnegative".into(),
        ));
    }
    let mut c = coeffs.to_vec();
    if let Some(d) = d {
        if c.len() > d {
            return Err(CliError::Validation(format!(
                "{} coefficients exceed local dimension {d}",
                c.len()
            )));
        }
        c.resize(d, 0.0);
    }
    let (state, norm) = PureState::normalizing(c)?;
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: coefficients had norm {norm}; normalized");
    }
    Ok(state)
}

fn convention(normalized_identity: bool) -> Value {
    json!(if normalized_identity { "normalized-identity" } else { "unnormalized-identity" })
}

fn bound(report: BoundReport, normalized_identity: bool) -> Value {
    let r = if normalized_identity { report.with_normalized_identity() } else { report };
    to_value(&r)
}

fn execution(cli_sequential: bool) -> Execution {
    if cli_sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load_state(path: &Path) -> CliResult<BipartiteOperator> {
    Ok(DensityMatrixFile::read(path)?.to_operator()?)
}

fn bound_choice(b: BoundArg) -> BoundChoice {
    match b {
        BoundArg::Theorem5 => BoundChoice::Theorem5,
        BoundArg::Weak => BoundChoice::Weak,
        BoundArg::Conjecture1 => BoundChoice::Conjecture1,
    }
}

fn certificate_json(cert: &DistillCertificate, reduction: Value) -> Value {
    let mut v = to_value(cert);
    if let Value::Object(map) = &mut v {
        map.insert("reduction".into(), reduction);
        if cert.conjectural {
            map.insert("status".into(), json!("CONJECTURAL"));
        }
    }
    v
}

pub fn run(cli: Cli) -> CliResult<()> {
    let det = cli.deterministic;
    let exec = execution(cli.sequential);
    match cli.command {
        Command::Schmidt(SchmidtCmd::Decompose { vec, coeffs, tol }) => {
            let amplitudes: Vec<Complex64> = match (vec, coeffs) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
                    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| {
                        CliError::Validation(format!("{}: expected [[re, im], ...]: {e}", path.display()))
                    })?;
                    pairs.into_iter().map(|[r, i]| Complex64::new(r, i)).collect()
                }
                (None, Some(c)) => {
                    let d = c.len();
                    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if !(norm > 0.0) {
                        return Err(CliError::Validation("coefficients have zero norm".into()));
                    }
                    if (norm - 1.0).abs() > 1e-6 {
                        eprintln!("warning: coefficients had norm {norm}; normalized");
                    }
                    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
                    for (i, x) in c.iter().enumerate() {
                        v[i * d + i] = Complex64::new(x / norm, 0.0);
                    }
                    v
                }
                (None, None) => unreachable!("clap requires one of --vec/--coeffs"),
            };
            let sd = schmidt_decompose(&amplitudes, tol)?;
            emit_json(
                object(vec![
                    ("coeffs", to_value(&sd.state.coeffs())),
                    ("rank", json!(sd.rank)),
                    ("local_dim", json!(sd.state.local_dim())),
                ]),
                det,
            )
        }

        Command::Witness(WitnessCmd::Canonical { d, k, state }) => {
            let w = canonical_witness(d, k)?;
            let on_p_plus = witness_value(&w, &max_entangled(d)?)?;
            let mut fields = vec![
                ("d", json!(d)),
                ("schmidt_class", json!(k)),
                ("trace", json!(w.trace())),
                ("value_on_p_plus", json!(on_p_plus)),
                ("isotropic_boundary_beta", json!(isotropic_threshold(d, k))),
            ];
            if let Some(path) = state {
                let rho = load_state(&path)?;
                let value = witness_value(&w, &rho)?;
                fields.push(("value", json!(value)));
                fields.push(("normalized_value", json!(value / w.trace())));
                fields.push(("detected", json!(value < 0.0)));
            }
            emit_json(object(fields), det)
        }

        Command::Robustness(RobustnessCmd::Pure(args)) => {
            let psi = pure_state_from_cli(&args.coeffs, args.d)?;
            let ni = args.normalized_identity;
            emit_json(
                object(vec![
                    ("coeffs", to_value(&psi.coeffs())),
                    ("identity_convention", convention(ni)),
                    ("R_s", bound(robustness_pure(&psi), ni)),
                    ("R_g", bound(generalized_robustness_pure(&psi), ni)),
                    ("R_r", bound(random_robustness_pure(&psi), ni)),
                ]),
                det,
            )
        }

        Command::Robustness(RobustnessCmd::Schmidt { coeffs: args, n }) => {
            let psi = pure_state_from_cli(&args.coeffs, args.d)?;
            let ni = args.normalized_identity;
            let d = psi.local_dim();
            let (lower, upper) = gen_schmidt_bounds(&psi, n)?;
            let mut fields = vec![
                ("coeffs", to_value(&psi.coeffs())),
                ("n", json!(n)),
                ("identity_convention", convention(ni)),
                ("generalized_lower", bound(lower, ni)),
                ("generalized_upper", bound(upper, ni)),
            ];
            if n < d {
                fields.push(("random_upper", bound(random_schmidt_upper(&psi, n)?, ni)));
                fields.push(("random_upper_weak", bound(random_schmidt_upper_weak(d, n)?, ni)));
            }
            emit_json(object(fields), det)
        }

        Command::Isotropic { d, beta } => {
            let p = IsotropicParams::new(d, beta)?;
            let sn = isotropic_schmidt_number(p);
            let mut fields = vec![
                ("d", json!(d)),
                ("beta", json!(beta)),
                ("schmidt_number", json!(sn)),
            ];
            if sn > 1 {
                fields.push(("beta_lower_exclusive", json!(isotropic_threshold(d, sn - 1))));
            }
            if sn < d {
                fields.push(("beta_upper_inclusive", json!(isotropic_threshold(d, sn))));
            }
            emit_json(object(fields), det)
        }

        Command::Construct(ConstructCmd::SubsetMix { d, n, coeffs, out }) => {
            let weights = match coeffs {
                Some(c) => Some(normalized_unsorted(&c)?),
                None => None,
            };
            let mix = subset_mixture(d, n, weights.as_deref())?;
            let mut meta = BTreeMap::new();
            meta.insert("construction".to_string(), "subset-mix".to_string());
            meta.insert("d".to_string(), d.to_string());
            meta.insert("n".to_string(), n.to_string());
            let file = DensityMatrixFile::from_operator(&mix, meta)?;
            match out {
                Some(path) => {
                    file.write(&path)?;
                    emit_json(
                        object(vec![
                            ("written", json!(path.display().to_string())),
                            ("trace", json!(mix.trace())),
                        ]),
                        det,
                    )
                }
                None => {
                    println!("{}", file.to_json());
                    Ok(())
                }
            }
        }

        Command::Construct(ConstructCmd::TwirlVerify { d, n }) => {
            let report = verify_thm3_construction(d, n)?;
            emit_json(to_value(&report), det)?;
            report.ok()?;
            Ok(())
        }

        Command::Distill(DistillCmd::Check { files, bound }) => {
            let choice = bound_choice(bound);
            let states = files
                .iter()
                .map(|p| load_state(p))
                .collect::<CliResult<Vec<_>>>()?;
            let certs = screen_batch(&states, choice, exec);
            let mut out = Vec::with_capacity(states.len());
            for ((path, rho), cert) in files.iter().zip(&states).zip(certs) {
                let cert = cert?;
                let reduction = to_value(&reduction_criterion(rho)?);
                let mut v = certificate_json(&cert, reduction);
                if let Value::Object(map) = &mut v {
                    map.insert("file".into(), json!(path.display().to_string()));
                }
                out.push(v);
            }
            if out.len() == 1 {
                emit_json(out.pop().unwrap(), det)
            } else {
                emit_json(object(vec![("results", Value::Array(out))]), det)
            }
        }

        Command::Distill(DistillCmd::Example) => {
            let rho = paper_example_state();
            let cert = distillability_check(&rho, BoundChoice::Theorem5)?;
            let reduction = reduction_criterion(&rho)?;
            let mut v = certificate_json(&cert, json!(reduction.verdict));
            if let Value::Object(map) = &mut v {
                map.insert("reduction_details".into(), to_value(&reduction));
            }
            emit_json(v, det)
        }

        Command::BallRadius { k, dmax } => {
            let dmax = dmax.unwrap_or(4 * k.max(1));
            let b = conjectured_ball_radius(k, dmax)?;
            let mut v = to_value(&b);
            if let Value::Object(map) = &mut v {
                map.insert("status".into(), json!("CONJECTURAL"));
            }
            emit_json(v, det)
        }

        Command::Optimize(OptimizeCmd::Rrn { b, n, search, normalized_identity }) => {
            let psi = normalized_unsorted(&b)?;
            let cfg = OptimizerConfig {
                restarts: search.restarts,
                seed: search.seed,
                execution: exec,
                ..Default::default()
            };
            let mut r = maximize_rrn_lower_bound(&psi, n, &cfg)?;
            if normalized_identity {
                let f = (psi.len() * psi.len()) as f64;
                r.best_value *= f;
                r.raw_value *= f;
            }
            let mut v = to_value(&r);
            if let Value::Object(map) = &mut v {
                map.insert("identity_convention".into(), convention(normalized_identity));
                map.insert("b".into(), to_value(&psi));
                map.insert("n".into(), json!(n));
            }
            emit_json(v, det)
        }

        Command::Sweep(SweepCmd::Figure1 { points, n, d, search }) => {
            let cfg = OptimizerConfig {
                restarts: search.restarts,
                seed: search.seed,
                execution: exec,
                ..Default::default()
            };
            let rows = sweep_figure1(n, d, &figure1_grid(points), &cfg)?;
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let mut header = vec!["a1sq".to_string(), "bound".into(), "fit".into()];
            header.extend((1..=d).map(|i| format!("best_a{i}")));
            let io_err = |e: csv::Error| CliError::Validation(format!("writing CSV: {e}"));
            w.write_record(&header).map_err(io_err)?;
            for row in rows {
                let nums = [row.a1sq, row.bound, row.fit].into_iter().chain(row.best_a);
                let mut record = Vec::with_capacity(3 + d);
                for x in nums {
                    if !x.is_finite() {
                        return Err(CliError::Numerical(format!("non-finite sweep value {x}")));
                    }
                    record.push(x.to_string());
                }
                w.write_record(&record).map_err(io_err)?;
            }
            w.flush().map_err(|e| CliError::Validation(format!("writing CSV: {e}")))
        }
    }
}

/// Normalizes without reordering (positions matter for the optimizer).
fn normalized_unsorted(c: &[f64]) -> CliResult<Vec<f64>> {
    if c.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(CliError::Validation("coefficients must be finite and nonnegative".into()));
    }
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(CliError::Validation("coefficients have zero norm".into()));
    }
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: coefficients had norm {norm}; normalized");
    }
    Ok(c.iter().map(|x| x / norm).collect())
}
