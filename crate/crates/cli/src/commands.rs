use std::path::Path;

use fiberqm::io::{state_to_json, StateData};
use fiberqm::measurement::{measure, sample_measurement_with, DEFAULT_DEGENERACY_TOL};
use fiberqm::observables::{evolve_fiber, expectation};
use fiberqm::separability::{numerical_rank, schmidt_coefficients};
use fiberqm::{
    evolve_free, from_fiber, indistinguishability_report, to_fiber, Branches, Factor, FactorVector,
    HermiteBasis, PointerPartition, TensorState, C64,
};
use serde_json::{json, Map, Value};

use crate::args::{
    BasisArgs, Cli, Command, ConvertArgs, EvolveArgs, ExpectArgs, MakeArgs, MeasureArgs,
    PointerDemoArgs, Representation, StateArg,
};
use crate::error::{CliError, CliResult};
use crate::format::{
    num, nums, print_stderr, print_stdout, read_observable, read_state, render, render_compact,
    require_same_basis, write_text,
};

pub fn run(cli: &Cli) -> CliResult<()> {
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        return Err(CliError::usage(
            "--tol",
            format!("must lie in (0, 1), got {}", cli.tol),
        ));
    }
    match &cli.command {
        Command::Make(a) => make(cli, a),
        Command::Convert(a) => convert(cli, a),
        Command::Expect(a) => expect(cli, a),
        Command::Schmidt(a) => schmidt(cli, a),
        Command::Measure(a) => measure_cmd(cli, a),
        Command::Evolve(a) => evolve(cli, a),
        Command::PointerDemo(a) => pointer_demo(cli, a),
    }
}

/// Send the primary artifact to `--out` (summary on stdout) or to stdout
/// (summary on stderr).
fn emit(cli: &Cli, primary: &str, summary: Option<&Value>) -> CliResult<()> {
    match &cli.out {
        Some(path) => {
            write_text(path, primary)?;
            if let Some(s) = summary {
                print_stdout(&render(s))?;
            }
        }
        None => {
            print_stdout(primary)?;
            if let Some(s) = summary {
                print_stderr(&render(s));
            }
        }
    }
    Ok(())
}

fn bases(b: &BasisArgs) -> CliResult<(HermiteBasis, HermiteBasis)> {
    let one = |flag: &str, order: usize| {
        let quad = b.quad.unwrap_or(2 * order);
        HermiteBasis::new(b.dim, order, quad).map_err(|e| CliError::usage(flag, e.to_string()))
    };
    Ok((one("--nv", b.nv)?, one("--nw", b.nw)?))
}

fn parse_complex(flag: &str, text: &str) -> CliResult<C64> {
    let bad = || CliError::usage(flag, format!("expected `re` or `re:im`, found {text:?}"));
    let mut parts = text.trim().splitn(2, ':');
    let re: f64 = parts
        .next()
        .unwrap_or("")
        .trim()
        .parse()
        .map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(s) => s.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

/// Comma-separated coefficients, zero-padded to the basis size.
pub fn parse_coefficients(flag: &str, text: &str, basis: &HermiteBasis) -> CliResult<FactorVector> {
    let mut coeffs = text
        .split(',')
        .map(|t| parse_complex(flag, t))
        .collect::<CliResult<Vec<_>>>()?;
    if coeffs.len() > basis.size() {
        return Err(CliError::usage(
            flag,
            format!(
                "{} coefficients given for a basis of size {}",
                coeffs.len(),
                basis.size()
            ),
        ));
    }
    coeffs.resize(basis.size(), C64::new(0.0, 0.0));
    FactorVector::from_slice(basis, &coeffs).map_err(|e| CliError::from_lib(flag, e))
}

fn rank_of(s: &TensorState, tol: f64) -> usize {
    if s.is_zero() {
        return 0;
    }
    numerical_rank(&schmidt_coefficients(s).expect("nonzero"), tol)
}

fn make(cli: &Cli, a: &MakeArgs) -> CliResult<()> {
    let (bv, bw) = bases(&a.basis)?;
    let product = a.psi.is_some() || a.phi.is_some();
    let modes = [product, a.bell, a.random].iter().filter(|&&m| m).count();
    if modes != 1 {
        return Err(CliError::usage(
            "--psi/--phi, --bell, --random",
            "choose exactly one way to build the state",
        ));
    }
    let unit = |b: &HermiteBasis, i: usize, flag: &str| {
        FactorVector::unit(b, i).map_err(|e| CliError::from_lib(flag, e))
    };

    let mut state = if a.random {
        TensorState::random(&bv, &bw, cli.seed, a.rank)
            .map_err(|e| CliError::from_lib("--rank", e))?
    } else if a.bell {
        let h = C64::new(0.5f64.sqrt(), 0.0);
        let s0 = TensorState::product(&unit(&bv, 0, "--nv")?, &unit(&bw, 0, "--nw")?);
        let s1 = TensorState::product(&unit(&bv, 1, "--nv")?, &unit(&bw, 1, "--nw")?);
        TensorState::superpose(h, &s0, h, &s1).map_err(|e| CliError::from_lib("--bell", e))?
    } else {
        let psi = parse_coefficients("--psi", need(&a.psi, "--psi")?, &bv)?;
        let phi = parse_coefficients("--phi", need(&a.phi, "--phi")?, &bw)?;
        let first = TensorState::product(&psi, &phi);
        if a.psi2.is_some() || a.phi2.is_some() {
            let psi2 = parse_coefficients("--psi2", need(&a.psi2, "--psi2")?, &bv)?;
            let phi2 = parse_coefficients("--phi2", need(&a.phi2, "--phi2")?, &bw)?;
            let ca = parse_complex("--a", &a.a)?;
            let cb = parse_complex("--b", &a.b)?;
            TensorState::superpose(ca, &first, cb, &TensorState::product(&psi2, &phi2))
                .map_err(|e| CliError::from_lib("--psi2", e))?
        } else {
            first.scale(parse_complex("--a", &a.a)?)
        }
    };
    if a.normalize {
        state = state
            .normalized()
            .map_err(|e| CliError::from_lib("--normalize", e))?;
    }

    let summary = json!({"norm": num(state.norm()), "rank": rank_of(&state, cli.tol)});
    emit(
        cli,
        &render_compact(&state_to_json(&StateData::Tensor(state))),
        Some(&summary),
    )
}

fn convert(cli: &Cli, a: &ConvertArgs) -> CliResult<()> {
    let input = read_state(&a.state)?;
    let target = a.to.unwrap_or(match input {
        StateData::Tensor(_) => Representation::Fiber,
        StateData::Fiber(_) => Representation::Tensor,
    });
    let (output, back) = match (&input, target) {
        (StateData::Tensor(s), Representation::Fiber) => {
            let f = to_fiber(s);
            let back = from_fiber(&f).into_amplitudes();
            (StateData::Fiber(f), back)
        }
        (StateData::Fiber(f), Representation::Tensor) => {
            let s = from_fiber(f);
            let back = to_fiber(&s).values().clone();
            (StateData::Tensor(s), back)
        }
        (same, _) => (same.clone(), same.amplitudes().clone()),
    };
    let roundtrip = input
        .amplitudes()
        .iter()
        .zip(back.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let summary = json!({
        "representation": output.representation(),
        "max_roundtrip_error": num(roundtrip),
    });
    emit(
        cli,
        &render_compact(&state_to_json(&output)),
        Some(&summary),
    )
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    v.as_deref()
        .ok_or_else(|| CliError::usage(flag, "required together with its partner flag"))
}

fn nonzero(s: TensorState, file: &Path) -> CliResult<TensorState> {
    if s.is_zero() {
        return Err(CliError::Numerical(format!(
            "{}: state is zero",
            file.display()
        )));
    }
    Ok(s)
}

fn factor_basis(s: &TensorState, factor: Factor) -> &HermiteBasis {
    match factor {
        Factor::First => s.basis_v(),
        Factor::Second => s.basis_w(),
    }
}

fn expect(cli: &Cli, a: &ExpectArgs) -> CliResult<()> {
    let s = nonzero(read_state(&a.state)?.to_tensor(), &a.state)?;
    let q = read_observable(&a.observable)?;
    let factor = a.factor.into();
    require_same_basis(
        factor_basis(&s, factor),
        &a.state,
        q.basis(),
        &a.observable,
        "measured factor",
    )?;
    let e = expectation(&q, &s, factor).map_err(|e| CliError::from_lib("expect", e))?;
    emit(cli, &render(&json!({"expectation": num(e)})), None)
}

fn schmidt(cli: &Cli, a: &StateArg) -> CliResult<()> {
    let s = nonzero(read_state(&a.state)?.to_tensor(), &a.state)?;
    let sv = schmidt_coefficients(&s).map_err(|e| CliError::from_lib("schmidt", e))?;
    let rank = numerical_rank(&sv, cli.tol);
    emit(
        cli,
        &render(&json!({"singular_values": nums(&sv), "rank": rank, "decomposable": rank == 1})),
        None,
    )
}

fn measure_cmd(cli: &Cli, a: &MeasureArgs) -> CliResult<()> {
    if a.shots == 0 {
        return Err(CliError::usage("--shots", "must be at least 1"));
    }
    let s = nonzero(read_state(&a.state)?.to_tensor(), &a.state)?;
    let q = read_observable(&a.observable)?;
    let factor = a.factor.into();
    require_same_basis(
        factor_basis(&s, factor),
        &a.state,
        q.basis(),
        &a.observable,
        "measured factor",
    )?;
    let lib = |e| CliError::from_lib("measure", e);
    let outcomes = measure(&q, &s, factor, DEFAULT_DEGENERACY_TOL).map_err(lib)?;
    let hist = sample_measurement_with(&q, &s, factor, cli.seed, a.shots).map_err(lib)?;

    let outcomes: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({"eigenvalue": num(o.eigenvalue), "probability": num(o.probability)}))
        .collect();
    let mut histogram = Map::new();
    for (e, count) in &hist.bins {
        histogram.insert(num(*e).to_string(), Value::from(*count));
    }
    emit(
        cli,
        &render(&json!({"outcomes": outcomes, "histogram": histogram})),
        None,
    )
}

fn evolve(cli: &Cli, a: &EvolveArgs) -> CliResult<()> {
    if !a.time.is_finite() {
        return Err(CliError::usage("--time", "must be finite"));
    }
    let out = match read_state(&a.state)? {
        StateData::Tensor(s) => StateData::Tensor(evolve_free(&s, a.time)),
        StateData::Fiber(f) => StateData::Fiber(evolve_fiber(&f, a.time)),
    };
    let norm = match &out {
        StateData::Tensor(s) => s.norm(),
        StateData::Fiber(f) => f.norm(),
    };
    let summary = json!({"time": num(a.time), "norm": num(norm)});
    emit(cli, &render_compact(&state_to_json(&out)), Some(&summary))
}

fn pointer_demo(cli: &Cli, a: &PointerDemoArgs) -> CliResult<()> {
    let (bv, bw) = bases(&a.basis)?;
    let p =
        PointerPartition::parse(&bw, &a.classes).map_err(|e| CliError::from_lib("--classes", e))?;
    if !(0.0..=1.0).contains(&a.alpha2) {
        return Err(CliError::usage(
            "--alpha2",
            format!("must lie in [0, 1], got {}", a.alpha2),
        ));
    }
    if a.trials == 0 {
        return Err(CliError::usage("--trials", "must be at least 1"));
    }
    let branches = Branches::random(&bv, &p, a.alpha2, cli.seed)
        .map_err(|e| CliError::from_lib("--classes", e))?;
    let report = indistinguishability_report(&branches, &p, a.trials, cli.seed.wrapping_add(1))
        .map_err(|e| CliError::from_lib("pointer-demo", e))?;

    if let Some(path) = &a.csv {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record([
            "trial",
            "e_entangled",
            "e_surrogate",
            "deviation",
            "class_values",
        ])?;
        for t in &report.trials {
            let values: Vec<String> = t.class_values.iter().map(|&v| num(v).to_string()).collect();
            w.write_record([
                t.trial.to_string(),
                num(t.e_entangled).to_string(),
                num(t.e_surrogate).to_string(),
                num(t.deviation).to_string(),
                values.join(";"),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }

    emit(
        cli,
        &render(&json!({
            "max_deviation": num(report.max_deviation),
            "rank_entangled": report.rank_entangled,
            "rank_surrogate": report.rank_surrogate,
            "positive_control_gap": num(report.positive_control_gap),
        })),
        None,
    )
}
