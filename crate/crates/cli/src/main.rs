use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use hyperwell::asymptotics::harmonic_asymptote;
use hyperwell::exact::{alpha_roots, alpha_window, assemble_polynomial_solution, beta_n, is_physical, polynomial_solutions};
use hyperwell::spectrum::{critical_alpha, critical_table, eigenvalues, spectrum, CriticalValue, Eigenvalue, ScanConfig, Status};
use hyperwell::{ModelContext, Parity, Precision};
use hyperwell_cli::audit;
use hyperwell_cli::output::{fmt_sig, Diagnostics, OutputRecord, Table};
use hyperwell_oracle::{fd_spectrum, OracleConfig, OracleParity};

/// Exit status for runs that finished but left a root unconverged.
const EXIT_UNCONVERGED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "hyperwell", version, about = "Bound states of v(z) = -v0 sinh^4(z)/cosh^6(z)")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Mantissa bits for the recurrence (53 = binary64).
    #[arg(long, global = true, env = "HYPERWELL_PRECISION_BITS")]
    precision: Option<u32>,
    /// Significant digits in tables.
    #[arg(long, global = true, default_value_t = 12)]
    digits: usize,
    /// Emit one JSON object instead of CSV.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV (the default).
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ParityArg {
    Even,
    Odd,
    Both,
}

impl ParityArg {
    fn parities(self) -> Vec<Parity> {
        match self {
            ParityArg::Even => vec![Parity::Even],
            ParityArg::Odd => vec![Parity::Odd],
            ParityArg::Both => vec![Parity::Even, Parity::Odd],
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound-state energies from the series solver.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long, value_enum, default_value_t = ParityArg::Both)]
        parity: ParityArg,
        /// Final truncation order of the schedule; no automatic extension.
        #[arg(long = "N-max")]
        n_max: Option<usize>,
    },
    /// Polynomial solutions for one truncation degree.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ParityArg::Both)]
        parity: ParityArg,
        /// Add window bounds and the root census.
        #[arg(long)]
        all_roots: bool,
    },
    /// Couplings at which a new level appears at zero energy.
    Critical {
        #[arg(long, value_enum, default_value_t = ParityArg::Both)]
        parity: ParityArg,
        #[arg(long, default_value_t = 9)]
        k_max: usize,
        #[arg(long = "N-max", default_value_t = 60)]
        n_max: usize,
    },
    /// Levels over a range of v0, for plotting.
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        v0_from: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0_to: f64,
        #[arg(long)]
        steps: usize,
        /// Only this level.
        #[arg(long)]
        nu: Option<usize>,
        #[arg(long)]
        with_asymptote: bool,
        /// Add the polynomial solutions with v0 inside the range.
        #[arg(long)]
        with_exact_overlay: bool,
    },
    /// Finite-difference eigenvalues.
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long = "L", default_value_t = 12.0)]
        l: f64,
        #[arg(long = "M", default_value_t = 4001)]
        m: usize,
        #[arg(long, default_value_t = 64)]
        k: usize,
    },
    /// Oracle comparison, Hellmann-Feynman, node counts and alternation.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
    },
}

struct Run {
    record: OutputRecord,
    table: Table,
    exit: u8,
}

fn precision(common: &Common) -> Precision {
    common.precision.map_or(Precision::Double, Precision::from_bits)
}

fn scan_config(common: &Common, n_max: Option<usize>) -> ScanConfig {
    let mut cfg = match n_max {
        Some(n) => ScanConfig::up_to(n),
        None => ScanConfig::default(),
    };
    cfg.precision = precision(common);
    cfg
}

fn status_exit(any_unconverged: bool) -> u8 {
    if any_unconverged {
        EXIT_UNCONVERGED
    } else {
        0
    }
}

const EIGEN_HEADER: [&str; 7] = ["nu", "parity", "beta", "epsilon", "N_final", "drift", "status"];

fn eigen_row(e: &Eigenvalue, d: usize) -> Vec<String> {
    vec![
        e.nu.to_string(),
        e.parity.to_string(),
        fmt_sig(e.beta, d),
        fmt_sig(e.epsilon, d),
        e.n_final.to_string(),
        fmt_sig(e.drift, 3),
        e.status.as_str().into(),
    ]
}

fn cmd_spectrum(c: &Common, v0: f64, parity: ParityArg, n_max: Option<usize>) -> Result<Run> {
    let cfg = scan_config(c, n_max);
    cfg.validate()?;
    let mut diag = Diagnostics {
        n_schedule: Some(cfg.n_schedule.clone()),
        ..Default::default()
    };
    let mut states: Vec<Eigenvalue>;
    let mut unconverged = Vec::new();
    if parity == ParityArg::Both {
        let sp = spectrum(v0, &cfg)?;
        diag.warnings = sp.warnings.clone();
        unconverged.extend(sp.even.unconverged());
        unconverged.extend(sp.odd.unconverged());
        states = sp.states;
    } else {
        let p = parity.parities()[0];
        let rep = eigenvalues(&ModelContext::from_v0(p, v0)?, &cfg)?;
        diag.warnings = rep.scan.warnings.clone();
        unconverged = rep.unconverged();
        for e in &unconverged {
            diag.warnings.push(format!(
                "{p} chain at beta={:.6e} unconverged at N={} (drift {:.2e})",
                e.beta, e.n_final, e.drift
            ));
        }
        states = rep.converged;
    }
    states.sort_by_key(|s| s.nu);
    if states.is_empty() {
        diag.notes.push("0 states".into());
    }
    let mut table = Table::new(&EIGEN_HEADER);
    for e in &states {
        table.push(eigen_row(e, c.digits));
    }
    Ok(Run {
        record: OutputRecord::new(
            "spectrum",
            json!({"v0": v0, "parity": parity, "precision": cfg.precision, "n_max": n_max}),
            json!({"states": states, "unconverged": unconverged}),
            diag,
        ),
        table,
        exit: status_exit(!unconverged.is_empty()),
    })
}

fn cmd_exact(c: &Common, n: usize, parity: ParityArg, all_roots: bool) -> Result<Run> {
    let d = c.digits;
    let mut header = vec!["n", "i", "parity", "alpha", "beta", "epsilon", "v0", "status"];
    if all_roots {
        header.extend(["alpha_lower", "alpha_upper", "real_roots", "complex_roots"]);
    }
    let mut table = Table::new(&header);
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    let mut census = Vec::new();
    for p in parity.parities() {
        let roots = alpha_roots(p, n, 1e-30)?;
        let (lo, hi) = alpha_window(p, n);
        census.push(json!({
            "parity": p, "n": n, "degree": roots.degree,
            "real": roots.real_count, "complex": roots.complex_count(),
            "alpha_window": [lo, hi],
        }));
        let mut i = 0;
        for r in &roots.roots {
            let alpha = r.to_f64();
            let beta = beta_n(p, alpha, n);
            let ok = is_physical(p, n, r);
            let idx = if ok {
                i += 1;
                let sol = assemble_polynomial_solution(p, n, i, r.clone())?;
                accepted.push(sol.to_record(d as u32));
                i.to_string()
            } else {
                rejected.push(json!({
                    "parity": p, "n": n, "alpha": alpha,
                    "alpha_interval": [r.interval().0.to_string(), r.interval().1.to_string()],
                }));
                String::new()
            };
            let mut row = vec![
                n.to_string(),
                idx,
                p.to_string(),
                fmt_sig(alpha, d),
                fmt_sig(beta, d),
                fmt_sig(-beta * beta, d),
                fmt_sig(alpha * alpha, d),
                if ok { "accepted" } else { "rejected" }.into(),
            ];
            if all_roots {
                row.extend([
                    fmt_sig(lo, d),
                    fmt_sig(hi, d),
                    roots.real_count.to_string(),
                    roots.complex_count().to_string(),
                ]);
            }
            table.push(row);
        }
    }
    Ok(Run {
        record: OutputRecord::new(
            "exact",
            json!({"n": n, "parity": parity, "all_roots": all_roots}),
            json!({"accepted": accepted, "rejected": rejected, "census": census}),
            Diagnostics::default(),
        ),
        table,
        exit: 0,
    })
}

fn cmd_critical(c: &Common, parity: ParityArg, k_max: usize, n_max: usize) -> Result<Run> {
    let cfg = scan_config(c, Some(n_max));
    cfg.validate()?;
    let (values, reports): (Vec<CriticalValue>, _) = match parity {
        ParityArg::Both => critical_table(k_max, &cfg)?,
        one => {
            let p = one.parities()[0];
            let ks: Vec<usize> = (1..=k_max).filter(|&k| hyperwell::spectrum::parity_of_k(k) == p).collect();
            if ks.is_empty() {
                anyhow::bail!(hyperwell::Error::InvalidInput(format!("no {p} K up to {k_max}")));
            }
            let r = critical_alpha(p, &ks, &cfg)?;
            (r.values.clone(), vec![r])
        }
    };
    let mut diag = Diagnostics {
        n_schedule: Some(cfg.n_schedule.clone()),
        ..Default::default()
    };
    let mut missing = Vec::new();
    for r in &reports {
        diag.warnings.extend(r.scan.warnings.iter().cloned());
        diag.notes.push(format!("{} parity evaluated with {} precision", r.parity, r.precision));
        missing.extend(r.missing.iter().copied());
    }
    missing.sort_unstable();
    for k in &missing {
        diag.warnings.push(format!("no root found for K={k}"));
    }
    for v in values.iter().filter(|v| v.status != Status::Converged) {
        diag.warnings.push(format!(
            "K={} did not meet the stability rule by N={} (last drift {:.2e})",
            v.k, v.n_final, v.drift
        ));
    }
    let mut table = Table::new(&["K", "parity", "alpha_K", "v0_K", "N_final", "drift", "status"]);
    for v in &values {
        // full round-trip precision: v0_K is exactly the square of alpha_K
        table.push(vec![
            v.k.to_string(),
            v.parity.to_string(),
            format!("{}", v.alpha_k),
            format!("{}", v.v0_k),
            v.n_final.to_string(),
            fmt_sig(v.drift, 3),
            v.status.as_str().into(),
        ]);
    }
    Ok(Run {
        record: OutputRecord::new(
            "critical",
            json!({"parity": parity, "k_max": k_max, "n_max": n_max, "precision": cfg.precision}),
            json!({"values": values, "missing": missing}),
            diag,
        ),
        table,
        exit: status_exit(!missing.is_empty()),
    })
}

#[derive(Serialize)]
struct ScanRow {
    kind: &'static str,
    v0: f64,
    nu: Option<usize>,
    parity: Parity,
    epsilon: f64,
    asymptote: Option<f64>,
    n: Option<usize>,
    i: Option<usize>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    c: &Common,
    from: f64,
    to: f64,
    steps: usize,
    nu: Option<usize>,
    with_asymptote: bool,
    with_exact: bool,
) -> Result<Run> {
    if steps == 0 || !(from > 0.0 && to >= from && to.is_finite()) {
        anyhow::bail!(hyperwell::Error::InvalidInput(format!(
            "need 0 < v0-from <= v0-to and steps >= 1, got {from}, {to}, {steps}"
        )));
    }
    let cfg = scan_config(c, None);
    let grid: Vec<f64> = (0..steps)
        .map(|s| if steps == 1 { from } else { from + (to - from) * s as f64 / (steps - 1) as f64 })
        .collect();
    let spectra = grid
        .par_iter()
        .map(|&v0| spectrum(v0, &cfg))
        .collect::<hyperwell::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut diag = Diagnostics {
        n_schedule: Some(cfg.n_schedule.clone()),
        ..Default::default()
    };
    let mut any_unconverged = false;
    for sp in &spectra {
        diag.warnings.extend(sp.warnings.iter().map(|w| format!("v0={}: {w}", sp.v0)));
        any_unconverged |= !sp.even.unconverged().is_empty() || !sp.odd.unconverged().is_empty();
        for s in sp.states.iter().filter(|s| nu.is_none_or(|n| n == s.nu)) {
            rows.push(ScanRow {
                kind: "numeric",
                v0: sp.v0,
                nu: Some(s.nu),
                parity: s.parity,
                epsilon: s.epsilon,
                asymptote: with_asymptote.then(|| harmonic_asymptote(sp.v0, s.nu)),
                n: None,
                i: None,
            });
        }
    }
    if with_exact {
        for p in [Parity::Even, Parity::Odd] {
            // the window keeps α² above (4n + 3 + 2γ)²
            for n in (0..).take_while(|&n| {
                let m = (4 * n + 3) as f64 + 2.0 * p.gamma() as f64;
                m * m < to
            }) {
                for s in polynomial_solutions(p, n)? {
                    let v0 = s.v0();
                    if v0 >= from && v0 <= to {
                        rows.push(ScanRow {
                            kind: "exact",
                            v0,
                            nu: None,
                            parity: p,
                            epsilon: s.epsilon,
                            asymptote: None,
                            n: Some(s.n),
                            i: Some(s.i),
                        });
                    }
                }
            }
        }
    }
    let d = c.digits;
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| fmt_sig(v, d));
    let opt_u = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    let mut table = Table::new(&["kind", "v0", "nu", "parity", "epsilon", "asymptote", "n", "i"]);
    for r in &rows {
        table.push(vec![
            r.kind.into(),
            fmt_sig(r.v0, d),
            opt_u(r.nu),
            r.parity.to_string(),
            fmt_sig(r.epsilon, d),
            opt(r.asymptote),
            opt_u(r.n),
            opt_u(r.i),
        ]);
    }
    Ok(Run {
        record: OutputRecord::new(
            "scan",
            json!({"v0_from": from, "v0_to": to, "steps": steps, "nu": nu,
                   "with_asymptote": with_asymptote, "with_exact_overlay": with_exact,
                   "precision": cfg.precision}),
            serde_json::to_value(&rows)?,
            diag,
        ),
        table,
        exit: status_exit(any_unconverged),
    })
}

fn oracle_parity_str(p: OracleParity) -> &'static str {
    match p {
        OracleParity::Even => "even",
        OracleParity::Odd => "odd",
    }
}

fn cmd_oracle(c: &Common, v0: f64, l: f64, m: usize, k: usize) -> Result<Run> {
    let cfg = OracleConfig::new(l, m, k)?;
    let s = fd_spectrum(v0, &cfg)?;
    let d = c.digits;
    let mut table = Table::new(&["nu", "parity", "epsilon", "nodes", "boundary_ratio"]);
    let mut states = Vec::new();
    for (nu, st) in s.states.iter().enumerate() {
        table.push(vec![
            nu.to_string(),
            oracle_parity_str(st.parity).into(),
            fmt_sig(st.epsilon, d),
            st.nodes.to_string(),
            fmt_sig(st.boundary_ratio, 3),
        ]);
        states.push(json!({
            "nu": nu, "parity": oracle_parity_str(st.parity), "epsilon": st.epsilon,
            "nodes": st.nodes, "boundary_ratio": st.boundary_ratio,
        }));
    }
    let diag = Diagnostics {
        warnings: s.warnings.clone(),
        notes: vec![format!("{} negative eigenvalues (h = {})", s.negative_count, cfg.h())],
        ..Default::default()
    };
    Ok(Run {
        record: OutputRecord::new(
            "oracle",
            json!({"v0": v0, "L": l, "M": m, "k": k}),
            json!({"states": states, "negative_count": s.negative_count}),
            diag,
        ),
        table,
        exit: 0,
    })
}

fn verdict(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.into()
}

fn cmd_check(c: &Common, v0: f64) -> Result<Run> {
    let cfg = scan_config(c, None);
    let r = audit::check(v0, &cfg, &OracleConfig::default())?;
    let d = c.digits;
    let mut table = Table::new(&["audit", "nu", "value", "reference", "diff", "tolerance", "result"]);
    let o = &r.oracle;
    table.push(vec![
        "oracle_count".into(),
        String::new(),
        o.series_count.to_string(),
        o.oracle_count.to_string(),
        String::new(),
        String::new(),
        verdict(o.count_ok()),
    ]);
    for m in &o.matches {
        table.push(vec![
            "oracle_level".into(),
            m.nu.to_string(),
            fmt_sig(m.series, d),
            m.oracle.map_or(String::new(), |x| fmt_sig(x, d)),
            fmt_sig(m.diff, 3),
            fmt_sig(m.tolerance, 3),
            verdict(m.pass),
        ]);
    }
    for h in &r.hellmann_feynman {
        table.push(vec![
            "hellmann_feynman".into(),
            h.nu.to_string(),
            fmt_sig(h.check.lhs, d),
            fmt_sig(h.check.rhs, d),
            fmt_sig(h.check.abs_diff, 3),
            fmt_sig(audit::HF_RELATIVE_TOLERANCE * h.check.rhs.abs(), 3),
            verdict(h.pass),
        ]);
    }
    for n in &r.nodes {
        table.push(vec![
            "nodes".into(),
            n.nu.to_string(),
            n.nodes.to_string(),
            n.nu.to_string(),
            String::new(),
            String::new(),
            verdict(n.pass),
        ]);
    }
    table.push(vec![
        "alternation".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        verdict(r.alternation_ok),
    ]);
    let mut warnings = r.warnings.clone();
    warnings.extend(r.oracle.warnings.iter().cloned());
    let pass = r.pass();
    Ok(Run {
        record: OutputRecord::new(
            "check",
            json!({"v0": v0, "precision": cfg.precision}),
            serde_json::to_value(&r)?,
            Diagnostics {
                n_schedule: Some(cfg.n_schedule.clone()),
                warnings,
                notes: vec![if pass { "all audits pass" } else { "audit failure" }.into()],
            },
        ),
        table,
        exit: status_exit(!pass),
    })
}

fn dispatch(cli: &Cli) -> Result<Run> {
    let c = &cli.common;
    match cli.command {
        Command::Spectrum { v0, parity, n_max } => cmd_spectrum(c, v0, parity, n_max),
        Command::Exact { n, parity, all_roots } => cmd_exact(c, n, parity, all_roots),
        Command::Critical { parity, k_max, n_max } => cmd_critical(c, parity, k_max, n_max),
        Command::Scan {
            v0_from,
            v0_to,
            steps,
            nu,
            with_asymptote,
            with_exact_overlay,
        } => cmd_scan(c, v0_from, v0_to, steps, nu, with_asymptote, with_exact_overlay),
        Command::Oracle { v0, l, m, k } => cmd_oracle(c, v0, l, m, k),
        Command::Check { v0 } => cmd_check(c, v0),
    }
}

fn is_usage_error(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        matches!(cause.downcast_ref::<hyperwell::Error>(), Some(hyperwell::Error::InvalidInput(_)))
            || cause.downcast_ref::<hyperwell_oracle::OracleError>().is_some()
    })
}

fn emit(run: &Run, json_out: bool) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if json_out {
        run.record.write(&mut out)?;
    } else {
        run.table.write_csv(&mut out)?;
        let mut err = io::stderr().lock();
        for w in &run.record.diagnostics.warnings {
            writeln!(err, "warning: {w}")?;
        }
        for n in &run.record.diagnostics.notes {
            writeln!(err, "note: {n}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if is_usage_error(&e) { EXIT_USAGE } else { EXIT_UNCONVERGED });
        }
    };
    if let Err(e) = emit(&run, cli.common.json) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_UNCONVERGED);
    }
    ExitCode::from(run.exit)
}
