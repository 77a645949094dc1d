use std::fs;
use std::path::{Path, PathBuf};

use lpw::exponents::{check_hypotheses, gain_report, ExponentInputs};
use lpw::iteration::{decay_bound, hypothesis_holds, DecaySequence, IterationParams};
use lpw::lp::shell_table_csv;
use lpw::probe::{run_probe, EquationKind, EquationSpec, ProbeOptions};
use lpw::psido::registry;
use lpw::verify;
use lpw::{Error, GridSpec};
use serde_json::{json, Value};

use crate::{Check, Command, ExponentArgs, GridArgs, IterateArgs, ProbeArgs};

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonContraction(_) | Error::NotElliptic { .. } => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Print the report and name the estimate on failure.
fn finish(report: Value, out: Option<&PathBuf>) -> Outcome {
    emit(&report, out.map(PathBuf::as_path))?;
    let pass = report["pass"].as_bool().unwrap_or(false);
    if !pass {
        let name = report["estimate"].as_str().unwrap_or("check");
        eprintln!("FAIL: {name}");
    }
    Ok(pass)
}

fn grid_of(args: &GridArgs, dim: usize, points: usize) -> Result<GridSpec, Failure> {
    Ok(GridSpec::new(args.n.unwrap_or(dim), args.points.unwrap_or(points))?)
}

fn symbols(names: &Option<Vec<String>>, defaults: &[&str], dim: usize) -> Result<Vec<lpw::psido::Symbol>, Failure> {
    match names {
        Some(list) => Ok(list
            .iter()
            .map(|n| registry::lookup(n, dim))
            .collect::<lpw::Result<Vec<_>>>()?),
        None => Ok(verify::lookup_all(defaults, dim)?),
    }
}

fn shell_range(from: usize, to: usize) -> Result<Vec<usize>, Failure> {
    if to < from + 1 {
        return Err(Failure::usage(format!("shell range {from}..={to} needs two shells")));
    }
    Ok((from..=to).collect())
}

pub fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Verify { check } => run_check(check),
        Command::Exponents(a) => exponents(a),
        Command::Iterate(a) => iterate(a),
        Command::Probe(a) => probe(a),
    }
}

fn run_check(check: Check) -> Outcome {
    match check {
        Check::Partition(g) => {
            let grid = grid_of(&g, 2, 128)?;
            let rep = verify::partition_check(grid, g.seed)?;
            finish(serde_json::to_value(rep)?, g.out.as_ref())
        }
        Check::Bernstein { grid: g, from, to } => {
            let grid = grid_of(&g, 2, 512)?;
            let rep = verify::bernstein_check(grid, &shell_range(from, to)?, g.seed)?;
            finish(serde_json::to_value(rep)?, g.out.as_ref())
        }
        Check::Apbound { grid: g, symbols: names, p } => {
            let grid = grid_of(&g, 2, 256)?;
            let syms = symbols(&names, &verify::SHELL_MAPPING_SYMBOLS, grid.dim())?;
            let part = lpw::lp::LpPartition::build(grid)?;
            let shells: Vec<usize> = (1..=part.resolved()).collect();
            let rep = verify::shell_mapping_check(grid, &syms, &shells, p, g.seed)?;
            finish(serde_json::to_value(rep)?, g.out.as_ref())
        }
        Check::Commutator {
            grid: g,
            symbols: names,
            from,
            to,
            remainder_points,
        } => {
            let grid = grid_of(&g, 1, 1 << 16)?;
            let syms = symbols(&names, &verify::COMMUTATOR_SYMBOLS, grid.dim())?;
            let multipliers = verify::lookup_all(&["laplacian", "bessel:1"], grid.dim())?;
            let comm = verify::commutator_check(grid, &syms, &multipliers, &shell_range(from, to)?, g.seed)?;
            let rgrid = GridSpec::new(1, remainder_points)?;
            let first = syms
                .iter()
                .find(|s| s.kind() != lpw::psido::SymbolKind::Multiplier)
                .map(|s| registry::lookup(s.name(), 1))
                .transpose()?
                .unwrap_or(registry::lookup(verify::COMMUTATOR_SYMBOLS[1], 1)?);
            let rem = verify::remainder_check(&first, rgrid, &[8, 9, 10, 11, 12])?;
            let pass = comm.pass && rem.pass;
            if !comm.pass {
                eprintln!("FAIL: {}", comm.estimate);
            }
            if !rem.pass {
                eprintln!("FAIL: {}", rem.estimate);
            }
            emit(
                &json!({ "commutator": comm, "remainder": rem, "pass": pass }),
                g.out.as_deref(),
            )?;
            Ok(pass)
        }
        Check::Paraproduct { grid: g, zone_points } => {
            let grid = grid_of(&g, 2, 256)?;
            let brute = GridSpec::new(grid.dim(), (grid.points() / 2).max(16))?;
            let cover = verify::cover_check(grid, brute, g.seed)?;
            let zones = verify::zone_estimate_check(GridSpec::new(1, zone_points)?, &verify::zone_branch_inputs())?;
            let pass = cover.pass && zones.pass;
            if !cover.pass {
                eprintln!("FAIL: {}", cover.estimate);
            }
            if !zones.pass {
                eprintln!("FAIL: {}", zones.estimate);
            }
            emit(&json!({ "cover": cover, "zones": zones, "pass": pass }), g.out.as_deref())?;
            Ok(pass)
        }
        Check::Mapping { grid: g, symbols: names } => {
            let grid = grid_of(&g, 2, 128)?;
            let syms = symbols(&names, &verify::SHELL_MAPPING_SYMBOLS, grid.dim())?;
            let pairs: Vec<(f64, f64)> = [0.0, 0.5, 1.0]
                .iter()
                .flat_map(|&s| [1.5, 2.0, 4.0].map(|p| (s, p)))
                .collect();
            let rep = verify::mapping_check(grid, &syms, &pairs, g.seed)?;
            finish(serde_json::to_value(rep)?, g.out.as_ref())
        }
    }
}

fn exponents(a: ExponentArgs) -> Outcome {
    let h = ExponentInputs::new(a.n, a.alpha, a.beta, a.gamma, a.s, a.p);
    let hyp = check_hypotheses(&h);
    if !hyp.holds {
        return Err(Failure::usage(format!(
            "hypotheses violated: {}",
            hyp.violations.join("; ")
        )));
    }
    let g = gain_report(&h)?;
    let mut v = serde_json::to_value(&g)?;
    v["q"] = json!(g.params.q);
    v["hypotheses"] = serde_json::to_value(hyp)?;
    emit(&v, a.out.as_deref())?;
    Ok(true)
}

fn read_sequence(path: &Path) -> Result<Vec<f64>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Failure::usage(e.to_string()))?;
        let Some(last) = rec.iter().last() else { continue };
        if last.is_empty() {
            continue;
        }
        match last.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if row == 0 => {}
            Err(_) => return Err(Failure::usage(format!("row {}: {last:?} is not a number", row + 1))),
        }
    }
    Ok(values)
}

fn iterate(a: IterateArgs) -> Outcome {
    let seq = DecaySequence::new(read_sequence(&a.input)?)?;
    let params = IterationParams::new(a.eps, a.delta, a.start)?;
    let check = hypothesis_holds(&seq, &params);
    let bound = if check.holds {
        Some(decay_bound(&seq, &params)?)
    } else {
        None
    };
    emit(
        &json!({
            "holds": check.holds,
            "first_violation": check.first_violation,
            "M": bound.map(|b| b.m),
            "M_from_start": bound.map(|b| b.m_from_start),
        }),
        a.out.as_deref(),
    )?;
    Ok(check.holds)
}

fn parse_grid(text: &str) -> Result<GridSpec, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Failure::usage(format!("--grid expects n,N, got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let n = parts[0].parse().map_err(|_| bad())?;
    let points = parts[1].parse().map_err(|_| bad())?;
    Ok(GridSpec::new(n, points)?)
}

fn probe(a: ProbeArgs) -> Outcome {
    let kind = EquationKind::parse(&a.equation)
        .ok_or_else(|| Failure::usage(format!("unknown equation {:?} (ns, biharmonic, gjms)", a.equation)))?;
    let grid = parse_grid(&a.grid)?;
    let mut spec = EquationSpec::builtin(kind, grid.dim())?;
    spec.amplitude = a.amplitude;
    spec.seed = a.seed;
    if let Some(s) = a.s {
        spec.s = s;
    }
    if let Some(p) = a.p {
        spec.p_exp = p;
    }
    spec.validate()?;
    let opts = ProbeOptions {
        rho: a.rho,
        ..ProbeOptions::default()
    };
    let report = run_probe(&spec, grid, &opts)?;
    if let Some(path) = &a.csv {
        fs::write(path, shell_table_csv(&report.decay.a))?;
    }
    let mut v = serde_json::to_value(&report)?;
    v["a_k"] = report
        .decay
        .a
        .iter()
        .enumerate()
        .map(|(k, x)| json!({ "k": k, "a_k": x }))
        .collect();
    v["fit"] = serde_json::to_value(report.decay.fit)?;
    emit(&v, a.out.as_deref())?;
    if !report.pass {
        eprintln!(
            "FAIL: measured gain {:.3} below predicted {:.3} minus tolerance",
            report.decay.epsilon_measured, report.decay.epsilon_theory
        );
    }
    Ok(report.pass)
}
