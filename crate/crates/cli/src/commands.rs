use freebeta_core::analysis::{hilbert_score, potential_derivative, stieltjes_density, EpsilonLadder};
use freebeta_core::distributions::{
    classify_meixner, exact_moments, s_transform_of, standardize_to_meixner, t_coeffs_of, Family,
};
use freebeta_core::fock::{fbp_operator, vacuum_moments};
use freebeta_core::ncl::{
    enumerate_nc, enumerate_ncl, fbp_moment, gamma_poly, statistics_counts, GammaRoute, LinkedPartition, MAX_EXHAUSTIVE_N,
};
use freebeta_core::randmat::{histogram, ks_distance, sample_many, FisherSampleConfig};
use freebeta_core::rational::{format_rational, parse_rational, to_f64, Rational};
use freebeta_core::transforms::s_to_moments;
use freebeta_core::verify;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{Report, Table};

type CmdResult = Result<Report, CliError>;

fn exact(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn need<'a, T>(v: &'a Option<T>, flag: &str, family: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Usage(format!("--{flag} is required for {family}")))
}

fn rational_flag(v: &Option<String>, flag: &str, family: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(need(v, flag, family)?)?)
}

fn positive_n(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

pub fn family_of(args: &FamilyArgs) -> Result<Family, CliError> {
    let name = match args.family {
        FamilyName::Fbp => "fbp",
        FamilyName::FreePoisson => "free-poisson",
        FamilyName::InverseFreePoisson => "inverse-free-poisson",
        FamilyName::FreeF => "free-f",
        FamilyName::FreeT => "free-t",
        FamilyName::FreeBeta => "free-beta",
        FamilyName::Meixner => "meixner",
    };
    let a = || rational_flag(&args.a, "a", name);
    let b = || rational_flag(&args.b, "b", name);
    Ok(match args.family {
        FamilyName::Fbp => Family::free_beta_prime(a()?, b()?)?,
        FamilyName::FreePoisson => Family::free_poisson(a()?)?,
        FamilyName::InverseFreePoisson => Family::inverse_free_poisson(b()?)?,
        FamilyName::FreeF => Family::free_f(a()?, b()?)?,
        FamilyName::FreeT => Family::free_t(rational_flag(&args.m, "m", name)?)?,
        FamilyName::FreeBeta => Family::free_beta(a()?, b()?)?,
        FamilyName::Meixner => Family::free_meixner(*need(&args.theta, "theta", name)?, *need(&args.tau, "tau", name)?)?,
    })
}

fn route_name(r: MomentRoute) -> &'static str {
    match r {
        MomentRoute::Ncl => "ncl",
        MomentRoute::Closed => "closed",
        MomentRoute::Fock => "fock",
        MomentRoute::STransform => "s-transform",
        MomentRoute::All => "all",
    }
}

pub fn moments(args: &MomentsArgs) -> CmdResult {
    positive_n(args.n)?;
    let f = family_of(&args.family)?;
    let available: Vec<MomentRoute> = match &f {
        Family::FreeBetaPrime { .. } => vec![MomentRoute::Ncl, MomentRoute::Closed, MomentRoute::Fock, MomentRoute::STransform],
        Family::FreePoisson { .. } | Family::InverseFreePoisson { .. } | Family::FreeF { .. } => {
            vec![MomentRoute::Closed, MomentRoute::STransform]
        }
        Family::FreeT { .. } | Family::FreeBeta { .. } => vec![MomentRoute::Closed],
        Family::FreeMeixnerStd { .. } => return Err(CliError::Usage("free Meixner moments are not exact rationals".into())),
    };
    let routes: Vec<MomentRoute> = match args.route {
        MomentRoute::All => available.into_iter().filter(|r| *r != MomentRoute::Ncl || args.n <= MAX_EXHAUSTIVE_N).collect(),
        r if available.contains(&r) => vec![r],
        r => return Err(CliError::Usage(format!("route {} is not available for {f}", route_name(r)))),
    };
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    for &r in &routes {
        let values = match (r, &f) {
            (MomentRoute::Ncl, Family::FreeBetaPrime { a, b }) => {
                (1..=args.n).map(|k| fbp_moment(a, b, k)).collect::<Result<Vec<_>, _>>()?
            }
            (MomentRoute::Fock, Family::FreeBetaPrime { a, b }) => {
                vacuum_moments(&fbp_operator(a, b, args.n)?, args.n)?[1..].to_vec()
            }
            (MomentRoute::STransform, _) => s_to_moments(&s_transform_of(&f, args.n)?, args.n)?.moments()[1..].to_vec(),
            _ => exact_moments(&f, args.n)?.moments()[1..].to_vec(),
        };
        columns.push(values);
    }
    let names: Vec<&str> = routes.iter().map(|&r| route_name(r)).collect();
    let mut headers = vec!["n"];
    headers.extend(&names);
    headers.push("agree");
    let mut table = Table::new(&headers);
    let mut all_agree = true;
    for k in 0..args.n {
        let agree = columns.iter().all(|c| c[k] == columns[0][k]);
        all_agree &= agree;
        let mut row = vec![json!(k + 1)];
        row.extend(columns.iter().map(|c| exact(&c[k])));
        row.push(json!(agree));
        table.push(row);
    }
    Ok(Report::new(json!({ "family": f.to_string(), "all_agree": all_agree }), &names).with_table(table))
}

pub fn density(args: &DensityArgs) -> CmdResult {
    let f = family_of(&args.family)?;
    let (lo, hi) = f.support();
    let (from, to) = (args.from.unwrap_or(lo), args.to.unwrap_or(hi));
    if args.points < 2 || !(to > from) {
        return Err(CliError::Usage("need --points >= 2 and --to > --from".into()));
    }
    let ladder = EpsilonLadder::default();
    let mut headers = vec!["x", "density"];
    if args.numeric {
        headers.push("stieltjes");
    }
    let mut table = Table::new(&headers);
    for k in 0..args.points {
        let x = from + (to - from) * k as f64 / (args.points - 1) as f64;
        let mut row = vec![float(x), float(f.density(x))];
        if args.numeric {
            row.push(if x > lo && x < hi { float(stieltjes_density(&f, x, &ladder)?) } else { Value::Null });
        }
        table.push(row);
    }
    let mut provenance = vec!["closed-form density"];
    if args.numeric {
        provenance.push("stieltjes inversion");
    }
    Ok(Report::new(json!({ "family": f.to_string(), "support": [lo, hi], "atoms": atoms_json(&f) }), &provenance)
        .with_table(table))
}

fn atoms_json(f: &Family) -> Value {
    Value::Array(f.atoms().into_iter().map(|(x, m)| json!({ "x": x, "mass": m })).collect())
}

pub fn support(args: &FamilyArgs) -> CmdResult {
    let f = family_of(args)?;
    let (lo, hi) = f.support();
    let mut table = Table::new(&["kind", "x", "mass"]);
    table.push(vec![json!("lower"), float(lo), Value::Null]);
    table.push(vec![json!("upper"), float(hi), Value::Null]);
    for (x, m) in f.atoms() {
        table.push(vec![json!("atom"), float(x), float(m)]);
    }
    Ok(Report::new(
        json!({ "family": f.to_string(), "lower": lo, "upper": hi, "atoms": atoms_json(&f) }),
        &["closed-form support"],
    )
    .with_table(table))
}

pub fn block_notation(p: &LinkedPartition) -> String {
    p.blocks()
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn enumerate(args: &EnumerateArgs) -> CmdResult {
    let parts = if args.noncrossing { enumerate_nc(args.n)? } else { enumerate_ncl(args.n)? };
    let results = json!({ "n": args.n, "count": parts.len() });
    let mut table = Table::new(&["partition"]);
    if args.list {
        for p in &parts {
            table.push(vec![json!(block_notation(p))]);
        }
    }
    let report = Report::new(results, &["card arrangements along Motzkin paths"]);
    Ok(if args.list { report.with_table(table) } else { report })
}

pub fn ncl_stats(args: &SizeArgs) -> CmdResult {
    let counts = statistics_counts(args.n)?;
    let mut table = Table::new(&["dc", "sc", "sg", "count"]);
    for (s, c) in &counts {
        table.push(vec![json!(s.dc), json!(s.sc), json!(s.sg), json!(c)]);
    }
    let total: u64 = counts.values().sum();
    Ok(Report::new(json!({ "n": args.n, "total": total }), &["card arrangements along Motzkin paths"]).with_table(table))
}

pub fn gamma_gf(args: &GammaArgs) -> CmdResult {
    positive_n(args.n)?;
    let (al, be, ga) = (parse_rational(&args.alpha)?, parse_rational(&args.beta)?, parse_rational(&args.gamma)?);
    let routes: Vec<(&str, GammaRoute)> = match args.route {
        GammaRouteArg::Brute => vec![("brute", GammaRoute::Brute)],
        GammaRouteArg::Cf => vec![("cf", GammaRoute::ContinuedFraction)],
        GammaRouteArg::Closed => vec![("closed", GammaRoute::Closed)],
        GammaRouteArg::All => {
            let mut v = vec![("cf", GammaRoute::ContinuedFraction), ("closed", GammaRoute::Closed)];
            if args.n <= MAX_EXHAUSTIVE_N {
                v.insert(0, ("brute", GammaRoute::Brute));
            }
            v
        }
    };
    let names: Vec<&str> = routes.iter().map(|r| r.0).collect();
    let mut headers = vec!["n"];
    headers.extend(&names);
    headers.push("agree");
    let mut table = Table::new(&headers);
    let mut all_agree = true;
    for n in 1..=args.n {
        let vals = routes.iter().map(|&(_, r)| gamma_poly(n, &al, &be, &ga, r)).collect::<Result<Vec<_>, _>>()?;
        let agree = vals.iter().all(|v| *v == vals[0]);
        all_agree &= agree;
        let mut row = vec![json!(n)];
        row.extend(vals.iter().map(exact));
        row.push(json!(agree));
        table.push(row);
    }
    Ok(Report::new(json!({ "all_agree": all_agree }), &names).with_table(table))
}

pub fn t_coeffs(args: &TCoeffsArgs) -> CmdResult {
    let (a, b) = (parse_rational(&args.a)?, parse_rational(&args.b)?);
    let t = t_coeffs_of(&a, &b, args.n)?;
    let mut table = Table::new(&["k", "alpha"]);
    for (k, x) in t.alphas().iter().enumerate() {
        table.push(vec![json!(k), exact(x)]);
    }
    Ok(Report::new(json!({}), &["closed-form T-transform"]).with_table(table))
}

pub fn meixner(args: &MeixnerArgs) -> CmdResult {
    match (&args.a, &args.b, args.theta, args.tau) {
        (Some(a), Some(b), None, None) => {
            let p = standardize_to_meixner(&parse_rational(a)?, &parse_rational(b)?)?;
            let class = classify_meixner(p.theta, p.tau)?;
            Ok(Report::new(
                json!({
                    "theta": p.theta,
                    "tau": p.tau,
                    "theta_squared": exact(&p.theta_squared),
                    "tau_exact": exact(&p.tau_exact),
                    "discriminant": exact(&p.discriminant),
                    "class": class.label(),
                    "freely_infinitely_divisible": class.is_freely_infinitely_divisible(),
                }),
                &["standardization of the free beta prime law"],
            ))
        }
        (None, None, Some(theta), Some(tau)) => {
            let class = classify_meixner(theta, tau)?;
            Ok(Report::new(
                json!({
                    "theta": theta,
                    "tau": tau,
                    "discriminant": theta * theta - 4.0 * tau,
                    "class": class.label(),
                    "freely_infinitely_divisible": class.is_freely_infinitely_divisible(),
                }),
                &["classification by parameters"],
            ))
        }
        _ => Err(CliError::Usage("give either --a and --b, or --theta and --tau".into())),
    }
}

pub fn score_check(args: &ScoreArgs) -> CmdResult {
    let f = family_of(&args.family)?;
    if args.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let ladder = EpsilonLadder::default();
    let (lo, hi) = f.support();
    let mut table = Table::new(&["x", "score", "potential_derivative", "residual"]);
    let mut worst: f64 = 0.0;
    for k in 1..=args.points {
        let x = lo + (hi - lo) * k as f64 / (args.points + 1) as f64;
        let (h, v) = (hilbert_score(&f, x, &ladder)?, potential_derivative(&f, x)?);
        worst = worst.max((h - v).abs());
        table.push(vec![float(x), float(h), float(v), float((h - v).abs())]);
    }
    Ok(Report::new(
        json!({ "family": f.to_string(), "sup_residual": worst, "tol": args.tol, "passed": worst <= args.tol }),
        &["richardson-extrapolated boundary values"],
    )
    .with_table(table))
}

pub fn mc_fisher(args: &FisherArgs) -> CmdResult {
    let (a, b) = (parse_rational(&args.a)?, parse_rational(&args.b)?);
    let law = Family::free_f(a.clone(), b.clone())?;
    if args.seeds == 0 {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }
    let cfgs = (0..args.seeds)
        .map(|k| FisherSampleConfig::new(args.p, to_f64(&a), to_f64(&b), args.seed + k))
        .collect::<Result<Vec<_>, _>>()?;
    let spectra = sample_many(&cfgs).into_iter().collect::<Result<Vec<_>, _>>()?;
    let ks = spectra.iter().map(|e| ks_distance(e, &law)).collect::<Result<Vec<_>, _>>()?;
    let mut sorted = ks.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let mut table = Table::new(&["bin_left", "bin_right", "empirical_density", "theoretical_density"]);
    for bin in histogram(&spectra[0], &law, args.bins)? {
        table.push(vec![float(bin.left), float(bin.right), float(bin.empirical_density), float(bin.theoretical_density)]);
    }
    let seeds: Vec<u64> = cfgs.iter().map(|c| c.seed).collect();
    Ok(Report::new(
        json!({
            "n1": cfgs[0].n1(),
            "n2": cfgs[0].n2(),
            "seeds": seeds,
            "ks": ks,
            "median_ks": median,
            "law": law.to_string(),
        }),
        &["chacha20 gaussian entries", "cholesky whitening", "householder tridiagonal ql"],
    )
    .with_table(table))
}

pub fn run_verify(args: &VerifyArgs) -> CmdResult {
    let outcomes = verify::run_all(!args.all);
    let mut table = Table::new(&["id", "name", "passed", "detail", "seconds"]);
    for o in &outcomes {
        eprintln!("{o}");
        table.push(vec![json!(o.id), json!(o.name), json!(o.passed), json!(o.detail), float(o.elapsed.as_secs_f64())]);
    }
    let failed: Vec<String> =
        outcomes.iter().filter(|o| !o.passed).map(|o| format!("[{}] {}: {}", o.id, o.name, o.detail)).collect();
    let passed = failed.is_empty();
    let mut report =
        Report::new(json!({ "passed": passed, "checks_run": outcomes.len() }), &["acceptance suite"]).with_table(table);
    if !passed {
        report.failure = Some(failed.join("; "));
    }
    Ok(report)
}
