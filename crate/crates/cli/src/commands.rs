use num_complex::Complex64;
use quadint::base_functions::{base_space, integral_in_original_coords, integrals_in_space};
use quadint::normal_form::{to_normal_form, NormalForm};
use quadint::oracle::{
    brute_force_integrals, brute_force_symmetry_fields, rk4_conservation, spans_equal, MAX_UNKNOWNS,
};
use quadint::planar::planar_report;
use quadint::resonance::{admissible_degrees, admissible_symmetry_degrees, symmetry_degree_admissible};
use quadint::spectral::find_balances;
use quadint::{BalanceData, Error, Mode, MultiPoly};

use crate::report::{
    balance_report, degree_report, integral_report, planar_verdict_report, strings, CrossCheck, IntegralReport,
    OracleDegree, OracleSection, PlanarSection, Report, SymmetryDegree, VerifySection,
};
use crate::{CliError, Job, VerifyArgs};

/// Largest degree the analyze command cross-checks by brute force.
const CROSS_CHECK_MAX: u32 = 6;

fn balances(job: &Job) -> Result<Vec<BalanceData>, CliError> {
    match find_balances(&job.system, &job.options) {
        Ok(b) if b.is_empty() => Err(CliError::Unsupported("no balances".into())),
        Ok(b) => Ok(b),
        Err(e) => Err(e.into()),
    }
}

fn first_normal_form(job: &Job, bals: &[BalanceData]) -> Option<NormalForm> {
    bals.iter()
        .filter(|b| b.diagonalizable)
        .find_map(|b| to_normal_form(&job.system, b).ok())
}

fn pulled_back(job: &Job, nf: &NormalForm, f_y: &MultiPoly) -> IntegralReport {
    match integral_in_original_coords(&job.system, nf, f_y) {
        Ok(f) => integral_report(&job.system, &f),
        Err(_) => {
            let raw = f_y
                .substitute_linear(nf.inverse_transform())
                .map(|f| f.normalize_leading().to_string())
                .unwrap_or_default();
            IntegralReport {
                polynomial: raw,
                verified: false,
                mode: nf.mode().to_string(),
            }
        }
    }
}

fn degree_list(ms: &[u32]) -> String {
    let parts: Vec<String> = ms.iter().map(u32::to_string).collect();
    parts.join(", ")
}

pub fn analyze(job: &Job) -> Result<Report, CliError> {
    let mut report = job.empty_report("analyze");
    let bals = balances(job)?;
    report.balances = bals.iter().map(balance_report).collect();
    let admissible = admissible_degrees(&bals, job.max_degree);
    report.admissible_degrees = Some(admissible.clone());
    report.symmetry_degrees = Some(admissible_symmetry_degrees(&bals, job.max_degree as i32));

    if admissible.is_empty() {
        report.verdict = format!(
            "no polynomial first integrals of degree 1..={}: no degree meets the resonance condition",
            job.max_degree
        );
    } else {
        let nf = first_normal_form(job, &bals).ok_or_else(|| {
            CliError::Unsupported("no balance with a diagonalizable Kovalevskaya matrix".into())
        })?;
        for &m in &admissible {
            let space = match base_space(&nf, m) {
                Ok(s) => s,
                // admissible at every balance, so this balance has a resonance
                Err(Error::EmptyResonance(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let ints = integrals_in_space(&nf, &space)?;
            let reports = ints.iter().map(|f| pulled_back(job, &nf, f)).collect();
            report.degrees.push(degree_report(&space, reports));
        }
        let found: Vec<u32> = report
            .degrees
            .iter()
            .filter(|d| !d.integrals.is_empty())
            .map(|d| d.m)
            .collect();
        report.verdict = if found.is_empty() {
            format!(
                "no polynomial first integrals of degree 1..={}; resonant degrees {} are obstructed",
                job.max_degree,
                degree_list(&admissible)
            )
        } else {
            format!("first integrals at degrees {}", degree_list(&found))
        };
    }

    if job.mode() == Mode::Exact {
        for m in 1..=job.max_degree.min(CROSS_CHECK_MAX) {
            let oracle = match brute_force_integrals(&job.system, m) {
                Ok(k) => k,
                Err(Error::Precondition(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let ours: Vec<MultiPoly> = report
                .degrees
                .iter()
                .filter(|d| d.m == m)
                .flat_map(|d| d.integrals.iter())
                .filter_map(|i| MultiPoly::parse(&i.polynomial, job.system.n(), Mode::Exact).ok())
                .collect();
            report.cross_check.push(CrossCheck {
                m,
                pipeline_dimension: ours.len(),
                oracle_dimension: oracle.len(),
                agrees: spans_equal(&ours, &oracle),
            });
        }
    }
    Ok(report)
}

pub fn planar(job: &Job) -> Result<Report, CliError> {
    if job.system.n() != 2 {
        return Err(CliError::Validation(format!(
            "planar needs n = 2, got n = {}",
            job.system.n()
        )));
    }
    let mut report = job.empty_report("planar");
    let pr = planar_report(&job.system, &job.options, job.max_degree)?;
    let setup = &pr.setup;
    report.balances = setup.balances.iter().map(balance_report).collect();
    let verdicts: Vec<_> = pr
        .verdicts
        .iter()
        .map(|v| planar_verdict_report(&job.system, v))
        .collect();
    let mut verdict = match pr.period {
        Some(p) => format!("integrals at M = {p}l"),
        None => "no polynomial first integrals".to_string(),
    };
    if let Some(first) = verdicts.iter().find_map(|v| v.integral.as_ref()) {
        verdict.push_str(&format!("; lowest degree integral {}", first.polynomial));
    }
    let bad: Vec<u32> = verdicts.iter().filter(|v| !v.consistent).map(|v| v.m).collect();
    if !bad.is_empty() {
        verdict.push_str(&format!("; construction and classification disagree at M = {}", degree_list(&bad)));
    }
    report.verdict = verdict;
    report.planar = Some(PlanarSection {
        rho1: setup.rho1.to_string(),
        rho2: setup.rho2.to_string(),
        c1: strings(&setup.c1.c),
        c2: strings(&setup.c2.c),
        p_form: setup.p_form.iter().map(|f| f.display_with("p").to_string()).collect(),
        a: setup.reduction.as_ref().map(|r| r.a.to_string()),
        b: setup.reduction.as_ref().map(|r| r.b.to_string()),
        extra_balances: setup.extra_balances(),
        period: pr.period,
        verdicts,
    });
    Ok(report)
}

pub fn oracle(job: &Job) -> Result<Report, CliError> {
    let mut report = job.empty_report("oracle");
    let sys = &job.system;
    let mut integrals = Vec::new();
    for m in 1..=job.max_degree {
        integrals.push(match brute_force_integrals(sys, m) {
            Ok(k) => OracleDegree {
                m,
                skipped: false,
                dimension: Some(k.len()),
                basis: k.iter().map(MultiPoly::to_string).collect(),
            },
            Err(Error::Precondition(_)) => OracleDegree {
                m,
                skipped: true,
                dimension: None,
                basis: Vec::new(),
            },
            Err(e) => return Err(e.into()),
        });
    }
    // exponents when available; the search itself needs none
    let bals = find_balances(sys, &job.options).unwrap_or_default();
    let mut symmetry_fields = Vec::new();
    for m in -1..=job.max_degree as i32 {
        let admissible = !bals.is_empty() && bals.iter().all(|b| symmetry_degree_admissible(&b.exponents, m));
        symmetry_fields.push(match brute_force_symmetry_fields(sys, m) {
            Ok(s) => SymmetryDegree {
                m,
                admissible,
                skipped: false,
                dimension: Some(s.basis.len()),
                contains_field: s.contains_field,
                quotient_dimension: Some(s.quotient_dimension),
                basis: s
                    .basis
                    .iter()
                    .map(|w| w.w.iter().map(MultiPoly::to_string).collect())
                    .collect(),
            },
            Err(Error::Precondition(_)) => SymmetryDegree {
                m,
                admissible,
                skipped: true,
                dimension: None,
                contains_field: None,
                quotient_dimension: None,
                basis: Vec::new(),
            },
            Err(e) => return Err(e.into()),
        });
    }
    report.balances = bals.iter().map(balance_report).collect();
    let found: Vec<u32> = integrals
        .iter()
        .filter(|d| d.dimension.is_some_and(|k| k > 0))
        .map(|d| d.m)
        .collect();
    let skipped = integrals.iter().filter(|d| d.skipped).count();
    report.verdict = if found.is_empty() {
        format!("brute force finds no first integrals of degree 1..={}", job.max_degree)
    } else {
        format!("brute force finds first integrals at degrees {}", degree_list(&found))
    };
    if skipped > 0 {
        report
            .verdict
            .push_str(&format!("; {skipped} degrees skipped above {MAX_UNKNOWNS} unknowns"));
    }
    report.oracle = Some(OracleSection {
        integrals,
        symmetry_fields,
    });
    Ok(report)
}

pub fn verify(job: &Job, args: &VerifyArgs) -> Result<Report, CliError> {
    let sys = &job.system;
    let n = sys.n();
    if args.x0.len() != n {
        return Err(CliError::Validation(format!(
            "--x0 has {} entries, expected {n}",
            args.x0.len()
        )));
    }
    if !(args.dt > 0.0 && args.t_end > 0.0) {
        return Err(CliError::Validation("--dt and --t-end must be positive".into()));
    }
    let f = MultiPoly::parse(&args.poly, n, job.mode())
        .map_err(|e| CliError::Validation(format!("--poly: {e}")))?;
    let exact = integral_report(sys, &f);
    let x0: Vec<Complex64> = args.x0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let drift = rk4_conservation(sys, &f, &x0, args.t_end, args.dt)?;
    let mut report = job.empty_report("verify");
    report.verdict = format!(
        "{}; max relative drift {:e} over t in [0, {}]",
        if exact.verified {
            "first integral (Lie derivative vanishes)"
        } else {
            "not a first integral (Lie derivative is nonzero)"
        },
        drift.max_drift,
        drift.t_reached
    );
    report.verify = Some(VerifySection {
        polynomial: exact.polynomial,
        lie_derivative_zero: exact.verified,
        mode: exact.mode,
        x0: args.x0.clone(),
        t_end: args.t_end,
        dt: args.dt,
        max_drift: drift.max_drift,
        steps: drift.steps,
        t_reached: drift.t_reached,
        partial: drift.partial,
    });
    Ok(report)
}
