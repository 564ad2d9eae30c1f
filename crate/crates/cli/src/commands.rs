use std::io::Write;

use phiscan_core::checkpoint::CheckpointPolicy;
use phiscan_core::constants::{
    euler_gamma, exp_gamma, mertens_reference, shared_zeta_table, compute_b1,
};
use phiscan_core::density::{density_estimate, omega_normal_order, theorem4_exceptions};
use phiscan_core::mertens::{mertens_ap_scan, mertens_scan, MertensConfig};
use phiscan_core::primorial::{primorial_scan, prime_power_tail, PrimorialConfig, ScanBound};
use phiscan_core::sieve::{totient_of, totient_table, SieveConfig};
use phiscan_core::theta::{theta_at, theta_scan, ThetaConfig};
use phiscan_core::{Error, Outcome, ScanConstants, Verdict};

use crate::output::{float_text, Field, Format, Sink};
use crate::{CheckpointArgs, Checks, Cli, CliError, Command, ConstantArgs, Emit};

type Out<'a> = &'a mut dyn Write;

pub(crate) fn dispatch<W: Write>(cli: &Cli, w: &mut W) -> Result<Checks, CliError> {
    let out: Out = w;
    let f = cli.format;
    match &cli.command {
        Command::Nicolas {
            pmax,
            kmax,
            emit,
            ratio,
            prop6_b,
            constants,
        } => {
            let bound = match (pmax, kmax) {
                (Some(p), _) => ScanBound::PMax(*p),
                (None, Some(k)) => ScanBound::KMax(*k),
                (None, None) => unreachable!("clap requires one bound"),
            };
            nicolas(f, out, bound, *emit, *ratio, *prop6_b, constants)
        }
        Command::Theta {
            xmax,
            checkpoints,
            cheb_a,
            cheb_b,
            wirsing_b,
        } => {
            let mut cfg = ThetaConfig::new(*xmax);
            cfg.checkpoints = policy(checkpoints);
            cfg.cheb_a = *cheb_a;
            cfg.cheb_b = *cheb_b;
            cfg.wirsing_b = *wirsing_b;
            theta(f, out, &cfg)
        }
        Command::Mertens { xmax, checkpoints, c } => {
            let mut cfg = MertensConfig::new(*xmax, mertens_reference().to_tracked());
            cfg.checkpoints = policy(checkpoints);
            cfg.elementary_c = *c;
            mertens(f, out, &cfg)
        }
        Command::MertensAp {
            q,
            a,
            xmax,
            checkpoints,
        } => mertens_ap(f, out, *q, *a, *xmax, &policy(checkpoints)),
        Command::Constants { digits, constants } => constants_cmd(f, out, *digits, constants),
        Command::Density { nmax, t } => density(f, out, nmax, t),
        Command::Thm4 { nmax, c0 } => thm4(f, out, nmax, *c0),
        Command::Omega { nmax } => omega(f, out, nmax),
        Command::Tail { pk, constants } => tail(f, out, pk, constants),
    }
}

fn policy(c: &CheckpointArgs) -> CheckpointPolicy {
    if c.dense {
        CheckpointPolicy::Dense
    } else if !c.at.is_empty() {
        CheckpointPolicy::Explicit(c.at.clone())
    } else {
        CheckpointPolicy::Grid { ratio: c.ratio }
    }
}

fn verdict(v: &Verdict) -> Field {
    v.outcome.as_str().into()
}

fn check_limit(limit: u64) -> Result<(), CliError> {
    SieveConfig::new(limit).validate()?;
    Ok(())
}

fn scan_constants(c: &ConstantArgs) -> Result<ScanConstants, CliError> {
    Ok(ScanConstants::compute(c.zeta_limit, c.n_max)?)
}

const NICOLAS_COLUMNS: &[&str] = &[
    "k",
    "p_k",
    "log_N",
    "loglog_N",
    "lhs_log",
    "lhs_err",
    "nicolas_margin",
    "nicolas_err",
    "nicolas_verdict",
    "rs_margin",
    "rs_verdict",
    "prop6_diff",
    "prop6_ratio",
    "tail",
    "tail_times_logN",
];

/// The k of the single Rosser–Schoenfeld exception, N = 223092870.
const RS_EXCEPTION_K: u64 = 9;
/// Allowed growth between consecutive checkpoint values of the double-log ratio.
const PROP6_SLACK: f64 = 1.1;

fn nicolas(
    f: Format,
    out: Out,
    bound: ScanBound,
    emit: Emit,
    ratio: f64,
    prop6_b: f64,
    consts: &ConstantArgs,
) -> Result<Checks, CliError> {
    if let ScanBound::PMax(p) = bound {
        check_limit(p)?;
    }
    let mut cfg = PrimorialConfig::new(bound, scan_constants(consts)?);
    cfg.checkpoints = CheckpointPolicy::Grid { ratio };
    cfg.prop6_b = prop6_b;
    let mut sink = Sink::new(f, NICOLAS_COLUMNS, out)?;
    let mut checks = Checks::default();
    let mut prev_ratio: Option<f64> = None;
    for r in primorial_scan(&cfg)? {
        let r = r?;
        let k = r.k;
        checks.expect(r.nicolas.holds(), || format!("k={k}: Nicolas inequality not certified"));
        if k >= 3 {
            checks.expect(r.nicolas.margin > 10.0 * r.nicolas.margin_err, || {
                format!("k={k}: Nicolas margin below 10x its error")
            });
        }
        if let Some(rs) = &r.rosser_schoenfeld {
            let expected = if k == RS_EXCEPTION_K {
                Outcome::Fails
            } else {
                Outcome::Holds
            };
            checks.expect(rs.outcome == expected, || {
                format!("k={k}: Rosser-Schoenfeld verdict {} (expected {})", rs.outcome, expected)
            });
        }
        if let Some(p6) = &r.prop6 {
            if k >= 5 && prop6_b == 1.0 {
                checks.expect(p6.ratio.hi() <= 1.0, || format!("k={k}: double-log ratio above 1"));
            }
            if r.checkpoint && r.p_k >= 1000 && prop6_b == 1.0 {
                let v = p6.ratio.value();
                if let Some(prev) = prev_ratio {
                    checks.expect(v <= PROP6_SLACK * prev, || {
                        format!("k={k}: double-log ratio rose from {prev:e} to {v:e}")
                    });
                }
                prev_ratio = Some(v);
            }
        }
        if k >= 2 {
            checks.expect(r.tail_times_log_n.hi() <= 1.0, || format!("k={k}: T*log N above 1"));
        }
        if emit == Emit::Grid && !r.checkpoint {
            continue;
        }
        let rs = r.rosser_schoenfeld.as_ref();
        sink.row(vec![
            k.into(),
            r.p_k.into(),
            r.log_n.value().into(),
            r.loglog_n.value().into(),
            r.lhs_log.value().into(),
            r.lhs_log.err().into(),
            r.nicolas.margin.into(),
            r.nicolas.margin_err.into(),
            verdict(&r.nicolas),
            rs.map(|v| v.margin).into(),
            rs.map_or(Field::Missing, verdict),
            r.prop6.map(|p| p.diff.value()).into(),
            r.prop6.map(|p| p.ratio.value()).into(),
            r.tail.value().into(),
            r.tail_times_log_n.value().into(),
        ])?;
    }
    sink.finish()?;
    Ok(checks)
}

const THETA_COLUMNS: &[&str] = &[
    "x", "theta", "theta_err", "e_abs", "rh_bound", "rh_verdict", "cheb_lo", "cheb_hi",
];

/// The conditional ϑ band is only claimed from here on.
const RH_THETA_FROM: u64 = 599;

fn theta(f: Format, out: Out, cfg: &ThetaConfig) -> Result<Checks, CliError> {
    check_limit(cfg.limit)?;
    let mut cols = THETA_COLUMNS.to_vec();
    if cfg.wirsing_b.is_some() {
        cols.push("wirsing_ratio");
    }
    let mut sink = Sink::new(f, &cols, out)?;
    let mut checks = Checks::default();
    for r in theta_scan(cfg)? {
        let r = r?;
        let x = r.x;
        if x >= RH_THETA_FROM {
            checks.expect(!r.rh_band_ok.fails(), || format!("x={x}: |x - theta| outside band"));
        }
        if let (Some(lo), Some(hi)) = (r.chebyshev_lo_ok, r.chebyshev_hi_ok) {
            checks.expect(lo && hi, || format!("x={x}: Chebyshev band violated"));
        }
        let mut row = vec![
            x.into(),
            r.theta.value().into(),
            r.theta.err().into(),
            r.e_abs.value().into(),
            r.rh_bound.value().into(),
            verdict(&r.rh_band_ok),
            r.chebyshev_lo_ok.into(),
            r.chebyshev_hi_ok.into(),
        ];
        if cfg.wirsing_b.is_some() {
            row.push(r.wirsing_ratio.into());
        }
        sink.row(row)?;
    }
    sink.finish()?;
    Ok(checks)
}

const MERTENS_COLUMNS: &[&str] = &[
    "x",
    "sum_recip",
    "sum_err",
    "residual",
    "residual_err",
    "dusart_band",
    "rh_band",
    "elementary_band",
    "within_dusart",
    "within_rh",
    "within_elementary",
];

fn mertens(f: Format, out: Out, cfg: &MertensConfig) -> Result<Checks, CliError> {
    check_limit(cfg.limit)?;
    let mut sink = Sink::new(f, MERTENS_COLUMNS, out)?;
    let mut checks = Checks::default();
    for r in mertens_scan(cfg)? {
        let r = r?;
        let x = r.x;
        if x >= 10 {
            checks.expect(r.within_elementary.holds(), || format!("x={x}: outside c/log x"));
        }
        if x >= 1_000_000 {
            checks.expect(r.within_dusart.holds(), || format!("x={x}: outside Dusart band"));
        }
        sink.row(vec![
            x.into(),
            r.sum_recip.value().into(),
            r.sum_recip.err().into(),
            r.residual.value().into(),
            r.residual.err().into(),
            r.dusart_band.into(),
            r.rh_band.into(),
            r.elementary_band.into(),
            verdict(&r.within_dusart),
            verdict(&r.within_rh),
            verdict(&r.within_elementary),
        ])?;
    }
    sink.finish()?;
    Ok(checks)
}

fn mertens_ap(
    f: Format,
    out: Out,
    q: u64,
    a: u64,
    limit: u64,
    policy: &CheckpointPolicy,
) -> Result<Checks, CliError> {
    check_limit(limit)?;
    let scan = mertens_ap_scan(q, a, limit, policy)?;
    let cols = ["q", "a", "x", "sum", "sum_err", "centered", "B_aq_estimate", "spread"];
    let mut sink = Sink::new(f, &cols, out)?;
    let last = scan.records.len().saturating_sub(1);
    for (i, r) in scan.records.iter().enumerate() {
        let (est, spread) = if i == last {
            (Field::Float(scan.estimate), Field::Float(scan.spread))
        } else {
            (Field::Missing, Field::Missing)
        };
        sink.row(vec![
            q.into(),
            scan.a.into(),
            r.x.into(),
            r.sum.value().into(),
            r.sum.err().into(),
            r.centered.value().into(),
            est,
            spread,
        ])?;
    }
    sink.finish()?;
    Ok(Checks::default())
}

/// Digits available in the embedded literals.
const MAX_DIGITS: usize = 50;

fn constants_cmd(f: Format, out: Out, digits: usize, c: &ConstantArgs) -> Result<Checks, CliError> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::Config(format!("--digits must be in 1..={MAX_DIGITS}")).into());
    }
    let computed = compute_b1(c.zeta_limit, c.n_max)?;
    let gamma = euler_gamma();
    let eg = exp_gamma();
    let reference = mertens_reference();
    let lines: Vec<(&str, String, f64, String)> = vec![
        ("gamma", gamma.digits(digits), gamma.tail_bound, "literal".into()),
        ("exp_gamma", eg.digits(digits), eg.tail_bound, "exp of gamma".into()),
        ("B1", reference.digits(digits), reference.tail_bound, "literal".into()),
        (
            "B1_computed",
            computed.digits(digits),
            computed.tail_bound,
            format!("gamma minus prime zeta series, primes <= {}, n <= {}", c.zeta_limit, c.n_max),
        ),
    ];
    match f {
        Format::Csv => {
            for (name, value, bound, _) in &lines {
                writeln!(out, "{name}={value}")?;
                writeln!(out, "{name}_bound={}", float_text(*bound))?;
            }
        }
        Format::Jsonl => {
            let cols = ["name", "value", "bound", "source"];
            let mut sink = Sink::new(f, &cols, out)?;
            for (name, value, bound, source) in lines {
                sink.row(vec![name.into(), value.into(), bound.into(), source.into()])?;
            }
            sink.finish()?;
        }
    }
    Ok(Checks::default())
}

fn table_for(nmax: &[u64]) -> Result<phiscan_core::TotientTable, CliError> {
    let top = nmax.iter().copied().max().unwrap_or(1);
    Ok(totient_table(top)?)
}

fn density(
    f: Format,
    out: Out,
    nmax: &[u64],
    ts: &[phiscan_core::Threshold],
) -> Result<Checks, CliError> {
    let table = table_for(nmax)?;
    let cols = [
        "t",
        "n_limit",
        "count",
        "density",
        "prediction_as_written",
        "prediction_consistent",
    ];
    let mut sink = Sink::new(f, &cols, out)?;
    let mut checks = Checks::default();
    for &n in nmax {
        let mut prev: Option<(f64, f64)> = None;
        for &t in ts {
            let r = density_estimate(&table, t, n)?;
            if let Some((pt, pd)) = prev {
                if t.value() >= pt {
                    checks.expect(r.density <= pd, || {
                        format!("n={n}: density rose between t={pt} and t={t}")
                    });
                }
            }
            prev = Some((t.value(), r.density));
            sink.row(vec![
                t.to_string().into(),
                n.into(),
                r.count.into(),
                r.density.into(),
                r.prediction_as_written.into(),
                r.prediction_consistent.into(),
            ])?;
        }
    }
    sink.finish()?;
    Ok(checks)
}

fn thm4(f: Format, out: Out, nmax: &[u64], c0: f64) -> Result<Checks, CliError> {
    let table = table_for(nmax)?;
    let cols = ["n_limit", "c0", "count", "indeterminate", "fraction", "first_exceptions"];
    let mut sink = Sink::new(f, &cols, out)?;
    let mut checks = Checks::default();
    let mut prev: Option<(u64, f64)> = None;
    for &n in nmax {
        let r = theorem4_exceptions(&table, n, c0)?;
        if let Some((pn, pf)) = prev {
            if n > pn {
                checks.expect(r.fraction <= pf, || {
                    format!("exception fraction rose from {pf:e} at {pn} to {:e} at {n}", r.fraction)
                });
            }
        }
        if c0 <= 0.1 && n >= 1_000_000 {
            checks.expect(r.count == 0, || format!("{} exceptions at n_limit {n}", r.count));
        }
        checks.expect(r.indeterminate == 0, || format!("{} undecided at {n}", r.indeterminate));
        prev = Some((n, r.fraction));
        let first: Vec<String> = r.first_exceptions.iter().map(u64::to_string).collect();
        sink.row(vec![
            n.into(),
            c0.into(),
            r.count.into(),
            r.indeterminate.into(),
            r.fraction.into(),
            first.join(" ").into(),
        ])?;
    }
    sink.finish()?;
    Ok(checks)
}

fn omega(f: Format, out: Out, nmax: &[u64]) -> Result<Checks, CliError> {
    let table = table_for(nmax)?;
    let b1 = mertens_reference().to_f64();
    let cols = ["n_limit", "sum", "mean_omega", "loglog_plus_B1", "max_omega", "argmax"];
    let mut sink = Sink::new(f, &cols, out)?;
    for &n in nmax {
        let r = omega_normal_order(&table, n, b1)?;
        sink.row(vec![
            n.into(),
            r.sum.into(),
            r.mean_omega.into(),
            r.loglog_plus_b1.into(),
            (r.max_omega as u64).into(),
            r.argmax.into(),
        ])?;
    }
    sink.finish()?;
    Ok(Checks::default())
}

fn tail(f: Format, out: Out, pk: &[u64], c: &ConstantArgs) -> Result<Checks, CliError> {
    let zeta = shared_zeta_table(c.zeta_limit, c.n_max)?;
    let cols = ["p_k", "n_max", "tail", "tail_err", "tail_times_logN"];
    let mut sink = Sink::new(f, &cols, out)?;
    let mut checks = Checks::default();
    for &p in pk {
        check_limit(p)?;
        if p < 2 || totient_of(p) != p - 1 {
            return Err(Error::Config(format!("{p} is not a prime")).into());
        }
        let t = prime_power_tail(p, c.n_max, &zeta)?;
        let tl = t.mul(theta_at(p)?)?;
        if p > 2 {
            checks.expect(tl.hi() <= 1.0, || format!("p={p}: T*log N above 1"));
        }
        sink.row(vec![
            p.into(),
            (c.n_max as u64).into(),
            t.value().into(),
            t.err().into(),
            tl.value().into(),
        ])?;
    }
    sink.finish()?;
    Ok(checks)
}
