//! One function per subcommand, each producing a [`Report`].

use std::path::Path;

use serde_json::{json, Value};
use treeshift::counts::{exact_total, GeneralCountState, GoldenChain, RatioPoint};
use treeshift::enumeration::{enumerate_pattern_with, intermediate_estimates_with, Pattern};
use treeshift::numerics::{delta_size, parse_rational, Integer, Interval, Rational, RationalPolynomial};
use treeshift::poly_verify::{certify_monotone, MonotonicityCertificate};
use treeshift::reproduce::{reproduce_all, CellStatus};
use treeshift::simplex_map::{
    apply_t_with, critical_k0_with, fixed_point_with, g_function, period2_orbit_with, Arity, MapParams, MapPoint,
    Stability,
};
use treeshift::strip::{
    bounds_lu_with, dim_increase_check_with, general_series_with, general_strip_sequence_with, series_partial_with,
    strip_sequence_with,
};
use treeshift::{Error, TransitionMatrix};

use crate::config::{CliError, RunConfig};
use crate::output::{rational_string, Field, Kind, Report};

/// Exact integers and rationals longer than this many digits are shown as enclosures.
const SHOW_DIGITS: usize = 4096;
/// Exact orbit points are rounded to enclosures beyond this many bits.
const EXACT_ORBIT_BITS: u32 = 512;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn level_arg(n: i64, min: i64) -> Result<u32, CliError> {
    if n < min {
        return Err(usage(format!("--n must be at least {min}, got {n}")));
    }
    u32::try_from(n).map_err(|_| usage(format!("--n {n} is too large")))
}

/// Decimal digit count of a number given by an enclosure of its natural log.
fn digits_from_log(log: &Interval) -> Field {
    let ln10 = Interval::from_i64(10, log.prec()).ln().expect("10 > 0");
    let l10 = log / &ln10;
    let lo = l10.lo().to_f64().floor() as i64 + 1;
    let hi = l10.hi().to_f64().floor() as i64 + 1;
    if lo == hi {
        Field::Int(lo)
    } else {
        Field::Text(format!("{lo}..{hi}"))
    }
}

fn show_big(z: &Integer) -> Field {
    if z.significant_bits() as usize > SHOW_DIGITS * 3 {
        Field::Null
    } else {
        Field::Big(z.clone())
    }
}

fn show_rational(q: &Rational) -> Option<Field> {
    let bits = q.numer().significant_bits().max(q.denom().significant_bits()) as usize;
    (bits <= SHOW_DIGITS * 3).then(|| Field::Rat(q.clone()))
}

fn ratio_text(p: &RatioPoint, prec: u32) -> Field {
    match p.as_exact() {
        Some(v) if v.iter().all(|q| show_rational(q).is_some()) => {
            Field::Text(v.iter().map(rational_string).collect::<Vec<_>>().join(";"))
        }
        _ => Field::Text(
            p.to_intervals(prec)
                .iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(";"),
        ),
    }
}

pub fn counts(cfg: &RunConfig, k: u32, n: i64) -> Result<Report, CliError> {
    let n = level_arg(n, 0)?;
    let prec = cfg.precision_bits;
    let mut rep = Report::new(
        "counts",
        &[
            ("n", Kind::Scalar),
            ("digits", Kind::Scalar),
            ("B", Kind::Scalar),
            ("B0", Kind::Scalar),
            ("r", Kind::Scalar),
            ("upper", Kind::Interval),
        ],
    );
    rep.meta("k", json!(k));
    match cfg.matrix()? {
        None => {
            for level in GoldenChain::new(k, prec, cfg.cap())?.skip(1).take(n as usize + 1) {
                let lvl = level.n as u32;
                let upper = level.log_total.div_integer(&delta_size(k, lvl));
                let (digits, b, b0, r) = match &level.exact {
                    Some(s) => {
                        let total = s.total();
                        (
                            Field::Int(total.to_string_radix(10).trim_start_matches('-').len() as i64),
                            show_big(&total),
                            show_big(s.b0()),
                            show_rational(&s.ratio()).unwrap_or(Field::Iv(level.ratio.clone())),
                        )
                    }
                    None => (
                        digits_from_log(&level.log_total),
                        Field::Null,
                        Field::Null,
                        Field::Iv(level.ratio.clone()),
                    ),
                };
                rep.push(vec![Field::Int(i64::from(lvl)), digits, b, b0, r, Field::Log(upper)]);
            }
        }
        Some(m) => {
            rep.meta("dimension", json!(m.dim()));
            let mut s = GeneralCountState::initial(&m, k, prec)?;
            for lvl in 0..=n {
                if lvl > 0 {
                    s = s.step(cfg.cap())?;
                }
                let small = s.log_mag().hi().to_f64() < (SHOW_DIGITS as f64) * std::f64::consts::LN_10;
                let b = if small && lvl <= cfg.exact_depth_cap {
                    Field::Big(exact_total(&m, k, lvl)?)
                } else {
                    Field::Null
                };
                rep.push(vec![
                    Field::Int(i64::from(lvl)),
                    digits_from_log(s.log_mag()),
                    b,
                    Field::Null,
                    ratio_text(s.ratios(), prec),
                    Field::Log(s.entropy_upper_bound()),
                ]);
            }
        }
    }
    Ok(rep)
}

pub fn strip_entropy(cfg: &RunConfig, k: u32, n: i64) -> Result<Report, CliError> {
    let n = level_arg(n, 1)?;
    let prec = cfg.precision_bits;
    let mut rep = Report::new(
        "strip-entropy",
        &[("n", Kind::Scalar), ("lambda_digits", Kind::Scalar), ("h", Kind::Interval)],
    );
    rep.meta("k", json!(k));
    let rows = match cfg.matrix()? {
        None => strip_sequence_with(k, n, prec, cfg.cap())?.into_iter().skip(1).collect::<Vec<_>>(),
        Some(m) => general_strip_sequence_with(&m, k, n, prec, cfg.cap())?,
    };
    for s in rows {
        rep.push(vec![Field::Int(i64::from(s.n)), digits_from_log(&s.log_lambda), Field::Log(s.h)]);
    }
    Ok(rep)
}

pub fn series(cfg: &RunConfig, k: u32, terms: u32) -> Result<Report, CliError> {
    let prec = cfg.precision_bits;
    let m = cfg.matrix()?;
    let mut rep = Report::new(
        "series",
        &[
            ("N", Kind::Scalar),
            ("partial", Kind::Interval),
            ("tail", Kind::Interval),
            ("enclosure", Kind::Interval),
        ],
    );
    rep.meta("k", json!(k));
    for t in 0..=terms {
        let acc = match &m {
            None => series_partial_with(k, t, prec, cfg.cap())?,
            Some(m) => general_series_with(m, k, t, prec, cfg.cap())?,
        };
        let enc = acc.enclosure();
        rep.push(vec![
            Field::Int(i64::from(t)),
            Field::Log(acc.partial),
            Field::Log(acc.tail),
            Field::Log(enc),
        ]);
    }
    Ok(rep)
}

pub fn bounds(cfg: &RunConfig, k: u32) -> Result<Report, CliError> {
    let prec = cfg.precision_bits;
    let b = bounds_lu_with(k, prec)?;
    let mut rep = Report::new("bounds", &[("quantity", Kind::Scalar), ("value", Kind::Interval)]);
    rep.meta("k", json!(k));
    let separated = b.lower.certainly_lt(&b.upper);
    rep.push(vec![Field::Text("L".into()), Field::Log(b.lower)]);
    rep.push(vec![Field::Text("U".into()), Field::Log(b.upper)]);
    rep.push(vec![Field::Text("L (closed form)".into()), Field::Log(b.lower_closed)]);
    rep.push(vec![Field::Text("U (closed form)".into()), Field::Log(b.upper_closed)]);
    rep.meta("lower_below_upper", json!(separated));
    if !separated {
        rep.ok = false;
        rep.diagnostics.push(format!("L({k}) and U({k}) are not separated"));
    }
    if k >= 6 {
        match dim_increase_check_with(k, prec) {
            Ok(v) => {
                rep.push(vec![Field::Text("2^(a+a^3), a=(k-1)/k".into()), Field::Iv(v.lhs)]);
                rep.push(vec![Field::Text("1+x^(k-1), x=1+2^(1-k)".into()), Field::Iv(v.rhs)]);
                rep.push(vec![Field::Text(format!("U({})", k - 1)), Field::Log(v.upper_prev)]);
                rep.meta("exceeds_previous_arity", json!(true));
            }
            Err(e @ Error::Inconclusive(_)) => {
                rep.ok = false;
                rep.meta("exceeds_previous_arity", json!(false));
                rep.diagnostics.push(e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rep)
}

fn parse_point(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',')
        .map(|t| parse_rational(t).map_err(|e| usage(format!("bad start coordinate {t:?}: {e}"))))
        .collect()
}

fn coarsen(p: MapPoint, prec: u32) -> MapPoint {
    let big = |q: &Rational| q.numer().significant_bits().max(q.denom().significant_bits()) > EXACT_ORBIT_BITS;
    match p {
        MapPoint::Exact(q) if big(&q) => MapPoint::Scalar(Interval::from_rational(&q, prec)),
        MapPoint::Simplex(r) if r.as_exact().is_some_and(|v| v.iter().any(big)) => {
            MapPoint::Simplex(RatioPoint::Enclosure(r.to_intervals(prec)))
        }
        other => other,
    }
}

pub fn map_orbit(cfg: &RunConfig, k: &str, start: Option<&str>, steps: usize) -> Result<Report, CliError> {
    let prec = cfg.precision_bits;
    let arity = Arity::parse(k)?;
    let (params, mut x, columns): (MapParams, MapPoint, Vec<(String, Kind)>) = match cfg.matrix()? {
        Some(m) => {
            let kk = arity
                .as_integer()
                .ok_or_else(|| usage("the simplex map needs an integer --k"))?;
            let d = m.dim();
            let p = match start {
                Some(s) => RatioPoint::exact(parse_point(s)?)?,
                None => RatioPoint::barycenter(d),
            };
            let mut cols = vec![("step".to_string(), Kind::Scalar)];
            cols.extend((0..d).map(|i| (format!("r{i}"), Kind::Interval)));
            (MapParams::simplex(m, kk)?, MapPoint::Simplex(p), cols)
        }
        None => {
            let q = parse_rational(start.unwrap_or("0"))?;
            if q.cmp0().is_lt() || q > 1 {
                return Err(usage(format!("start {q} is not inside [0, 1]")));
            }
            let p = match arity.as_integer() {
                Some(_) => MapPoint::Exact(q),
                None => MapPoint::Scalar(Interval::from_rational(&q, prec)),
            };
            let cols = vec![
                ("step".to_string(), Kind::Scalar),
                ("exact".to_string(), Kind::Scalar),
                ("x".to_string(), Kind::Interval),
            ];
            (MapParams::interval_map(arity), p, cols)
        }
    };
    let mut rep = Report::new("map-orbit", &[]);
    rep.columns = columns;
    rep.meta("k", json!(k));
    for step in 0..=steps {
        let mut row = vec![Field::Int(step as i64)];
        match &x {
            MapPoint::Exact(q) => {
                row.push(Field::Rat(q.clone()));
                row.push(Field::Iv(Interval::from_rational(q, prec)));
            }
            MapPoint::Scalar(i) => {
                row.push(Field::Null);
                row.push(Field::Iv(i.clone()));
            }
            MapPoint::Simplex(p) => row.extend(p.to_intervals(prec).into_iter().map(Field::Iv)),
        }
        rep.push(row);
        if step < steps {
            x = coarsen(apply_t_with(&params, &x, prec)?, prec);
        }
    }
    Ok(rep)
}

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Attracting => "attracting",
        Stability::Repelling => "repelling",
        Stability::Marginal => "inconclusive",
    }
}

pub fn fixed_point(cfg: &RunConfig, k: &str, period2: bool) -> Result<Report, CliError> {
    let prec = cfg.precision_bits;
    let params = MapParams::interval_map(Arity::parse(k)?);
    let width = Rational::from((Integer::from(1), Integer::from(1) << (prec - 8)));
    let fp = fixed_point_with(&params, &width, prec)?;
    let mut rep = Report::new(
        "fixed-point",
        &[("quantity", Kind::Scalar), ("value", Kind::Interval), ("note", Kind::Scalar)],
    );
    rep.meta("k", json!(k));
    rep.push(vec![Field::Text("u".into()), Field::Iv(fp.u), Field::Null]);
    rep.push(vec![
        Field::Text("T'(u)".into()),
        Field::Iv(fp.derivative),
        Field::Text(stability_name(fp.stability).into()),
    ]);
    if period2 {
        let p = period2_orbit_with(&params, 1_000_000, prec)?;
        let note = if p.merged {
            "merged with the fixed point"
        } else if p.attracting {
            "attracting 2-cycle"
        } else {
            "2-cycle"
        };
        rep.push(vec![Field::Text("p1".into()), Field::Iv(p.p1), Field::Text(note.into())]);
        rep.push(vec![Field::Text("p2".into()), Field::Iv(p.p2), Field::Text(note.into())]);
        rep.meta("period2_iterations", json!(p.iterations));
    }
    Ok(rep)
}

pub fn critical_k0(cfg: &RunConfig, tol: &str) -> Result<Report, CliError> {
    let prec = cfg.precision_bits;
    let tol_q = parse_rational(tol)?;
    let k0 = critical_k0_with(&tol_q, prec)?;
    let g = g_function(&k0)?;
    let mut rep = Report::new("critical-k0", &[("quantity", Kind::Scalar), ("value", Kind::Interval)]);
    rep.meta("tolerance", json!(rational_string(&tol_q)));
    rep.push(vec![Field::Text("k0".into()), Field::Iv(k0)]);
    rep.push(vec![Field::Text("g(k0)".into()), Field::Iv(g)]);
    Ok(rep)
}

fn coeff_list(p: &RationalPolynomial) -> Value {
    Value::Array(p.coeffs().iter().map(|c| json!(rational_string(c))).collect())
}

fn sign_str(q: &Rational) -> &'static str {
    match q.cmp0() {
        std::cmp::Ordering::Less => "-",
        std::cmp::Ordering::Equal => "0",
        std::cmp::Ordering::Greater => "+",
    }
}

fn certificate_json(c: &MonotonicityCertificate, reference: Option<&[(&str, bool); 4]>) -> Value {
    let at_1 = c.q_k.eval(&Rational::from(1));
    json!({
        "k": c.k,
        "A": coeff_list(&c.a_k),
        "b": coeff_list(&c.b_k),
        "d": coeff_list(&c.d_k),
        "q": coeff_list(&c.q_k),
        "printed": {
            "A": coeff_list(&c.printed.a),
            "b": coeff_list(&c.printed.b),
            "d": coeff_list(&c.printed.d),
            "q": coeff_list(&c.printed.q),
        },
        "remainder_zero": c.remainder_zero,
        "sturm": { "interval": "(0, 1]", "roots": c.roots_in_01 },
        "endpoint_signs": {
            "q_at_0": sign_str(&c.value_at_0),
            "q_at_1": sign_str(&at_1),
        },
        "q_at_0": rational_string(&c.value_at_0),
        "q_at_1": rational_string(&at_1),
        "sign_split_ok": c.sign_split_ok,
        "p_k_rational_root_free": c.p_k_rational_root_free,
        "levels_checked": c.levels_checked,
        "valid": c.is_valid(),
        "reference": reference.map(|r| {
            Value::Object(r.iter().map(|(name, ok)| (name.to_string(), json!(ok))).collect())
        }),
    })
}

pub fn verify_monotonicity(
    ks: &[u32],
    emit_cert: Option<&Path>,
    paper_golden: bool,
) -> Result<Report, CliError> {
    let mut rep = Report::new(
        "verify-monotonicity",
        &[
            ("k", Kind::Scalar),
            ("remainder_zero", Kind::Scalar),
            ("roots_in_(0,1]", Kind::Scalar),
            ("q(0)", Kind::Scalar),
            ("q(1)", Kind::Scalar),
            ("valid", Kind::Scalar),
            ("reference", Kind::Scalar),
        ],
    );
    let mut certs = Vec::new();
    for &k in ks {
        let c = certify_monotone(k)?;
        let reference = if paper_golden { c.matches_reference()? } else { None };
        let ref_field = match (&reference, paper_golden) {
            (_, false) => Field::Text("not checked".into()),
            (None, true) => Field::Text("no listing".into()),
            (Some(r), true) => {
                let bad: Vec<&str> = r.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
                if bad.is_empty() {
                    Field::Text("match".into())
                } else {
                    rep.ok = false;
                    rep.diagnostics
                        .push(format!("k = {k}: coefficient lists differ from the reference for {}", bad.join(", ")));
                    Field::Text(format!("mismatch: {}", bad.join(",")))
                }
            }
        };
        if !c.is_valid() {
            rep.ok = false;
            rep.diagnostics.push(format!("k = {k}: certificate is not valid"));
        }
        rep.push(vec![
            Field::Int(i64::from(k)),
            Field::Bool(c.remainder_zero),
            Field::Int(c.roots_in_01 as i64),
            Field::Rat(c.value_at_0.clone()),
            Field::Rat(c.q_k.eval(&Rational::from(1))),
            Field::Bool(c.is_valid()),
            ref_field,
        ]);
        certs.push(certificate_json(&c, reference.as_ref()));
    }
    if let Some(path) = emit_cert {
        let doc = if certs.len() == 1 {
            certs.pop().expect("one certificate")
        } else {
            Value::Array(certs)
        };
        let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        crate::output::write_atomic(path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(rep)
}

pub fn enumerate(cfg: &RunConfig, k: u32, depth: u32, cap: usize) -> Result<Report, CliError> {
    let m = cfg.matrix()?.unwrap_or_else(TransitionMatrix::golden);
    let mut rep = Report::new(
        "enumerate",
        &[
            ("n", Kind::Scalar),
            ("nodes", Kind::Scalar),
            ("brute_force", Kind::Scalar),
            ("recursion", Kind::Scalar),
            ("agree", Kind::Scalar),
        ],
    );
    rep.meta("k", json!(k));
    for n in 0..=depth {
        let pattern = Pattern::ball(k, n)?;
        let brute = enumerate_pattern_with(&m, &pattern, cap)?;
        let rec = exact_total(&m, k, n)?;
        let agree = brute.count == rec;
        if !agree {
            rep.ok = false;
            rep.diagnostics
                .push(format!("n = {n}: enumeration gives {}, recursion gives {rec}", brute.count));
        }
        rep.push(vec![
            Field::Int(i64::from(n)),
            Field::Int(pattern.len() as i64),
            Field::Big(brute.count),
            Field::Big(rec),
            Field::Bool(agree),
        ]);
    }
    Ok(rep)
}

pub fn intermediate(cfg: &RunConfig, k: u32, nmax: usize) -> Result<Report, CliError> {
    if nmax < 1 {
        return Err(usage("--nmax must be at least 1"));
    }
    let m = cfg.matrix()?.unwrap_or_else(TransitionMatrix::golden);
    let rows = intermediate_estimates_with(&m, k, nmax, cfg.precision_bits)?;
    let mut rep = Report::new(
        "intermediate",
        &[
            ("n", Kind::Scalar),
            ("q", Kind::Scalar),
            ("log_q_over_n", Kind::Interval),
            ("tail_max", Kind::Interval),
            ("tail_min", Kind::Interval),
        ],
    );
    rep.meta("k", json!(k));
    for r in rows {
        rep.push(vec![
            Field::Int(r.n as i64),
            show_big(&r.q),
            Field::Log(r.estimate),
            Field::Log(r.tail_max),
            Field::Log(r.tail_min),
        ]);
    }
    Ok(rep)
}

pub fn reproduce(cfg: &RunConfig) -> Result<Report, CliError> {
    let report = reproduce_all(cfg.precision_bits, cfg.seed)?;
    let mut rep = Report::new(
        "reproduce-paper",
        &[
            ("section", Kind::Scalar),
            ("cell", Kind::Scalar),
            ("expected", Kind::Scalar),
            ("computed", Kind::Scalar),
            ("status", Kind::Scalar),
        ],
    );
    let count = |s: CellStatus| report.cells.iter().filter(|c| c.status == s).count();
    rep.meta("pass", json!(count(CellStatus::Pass)));
    rep.meta("fail", json!(count(CellStatus::Fail)));
    rep.meta("erratum", json!(count(CellStatus::Erratum)));
    rep.meta("seed", json!(cfg.seed));
    rep.ok = report.passed();
    for c in &report.cells {
        match c.status {
            CellStatus::Fail => rep.diagnostics.push(format!(
                "FAIL {} {}: expected {}, computed {}",
                c.section, c.label, c.expected, c.computed
            )),
            CellStatus::Erratum => rep.diagnostics.push(format!(
                "ERRATUM {} {}: printed {}, computed {}",
                c.section, c.label, c.expected, c.computed
            )),
            CellStatus::Pass => {}
        }
        rep.push(vec![
            Field::Text(c.section.into()),
            Field::Text(c.label.clone()),
            Field::Text(c.expected.clone()),
            Field::Text(c.computed.clone()),
            Field::Text(c.status.as_str().into()),
        ]);
    }
    Ok(rep)
}
