//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use clap::Parser;
use num_complex::Complex64;
use quadint::base_functions::{base_space, first_integrals, integral_in_original_coords};
use quadint::normal_form::{to_normal_form, NormalForm, OperatorKind};
use quadint::oracle::{
    brute_force_integrals, brute_force_symmetry_fields, rk4_conservation, rk4_conservation_extended, spans_equal,
};
use quadint::planar::{lemma9_admissible, theorem10_classify};
use quadint::resonance::{admissible_degrees, enumerate_jm, symmetry_degree_admissible};
use quadint::spectral::find_balances;
use quadint::{catalog, Error, Matrix, Mode, MultiPoly, QuadraticSystem, Scalar, SpectralOptions};
use quadint_cli::{execute, Cli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn report_for(args: &[&str]) -> Result<serde_json::Value, String> {
    let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
    let report = execute(&cli.command).map_err(|e| e.to_string())?;
    serde_json::to_value(&report).map_err(|e| e.to_string())
}

fn strs(v: &serde_json::Value) -> Vec<String> {
    v.as_array()
        .map(|a| a.iter().filter_map(|x| x.as_str().map(String::from)).collect())
        .unwrap_or_default()
}

/// Planar systems with integer coefficients in −9..=9.
fn random_planar(seed: u64) -> QuadraticSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut terms = Vec::new();
        for i in 0..2 {
            for (j, k) in [(0, 0), (0, 1), (1, 1)] {
                terms.push((i, j, k, Scalar::from_i64(rng.random_range(-9..=9), Mode::Exact)));
            }
        }
        let sys = QuadraticSystem::from_monomial_coeffs(2, &terms).unwrap();
        if sys.fields().iter().all(|f| !f.is_zero()) {
            return sys;
        }
    }
}

/// Reduced forms with integrable exponent pairs, mixed by seeded changes of
/// variables, so the corpus contains systems that do have integrals.
fn synthesized() -> Vec<QuadraticSystem> {
    let pairs = [(3, 1, 3, 2), (2, 1, 2, 1), (4, 1, 4, 3), (6, 1, 6, 5), (2, 1, 3, 1), (3, 1, 3, 1), (2, 1, 4, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    pairs
        .iter()
        .map(|&(a, b, c, d)| {
            let base = catalog::planar_reduced(&q(a, b), &q(c, d));
            let l = loop {
                let rows: Vec<Vec<Scalar>> = (0..2)
                    .map(|_| (0..2).map(|_| Scalar::from_i64(rng.random_range(-3..=3), Mode::Exact)).collect())
                    .collect();
                let m = Matrix::from_rows(rows);
                if !m.determinant().unwrap().is_zero() {
                    break m;
                }
            };
            QuadraticSystem::from_fields(base.transformed_fields(&l).unwrap()).unwrap()
        })
        .collect()
}

const RANDOM_SYSTEMS: u64 = 50;

fn corpus() -> Vec<(String, QuadraticSystem)> {
    let mut out = vec![
        ("halphen".to_string(), catalog::halphen()),
        ("tsy512".to_string(), catalog::tsy512()),
    ];
    out.extend((0..RANDOM_SYSTEMS).map(|s| (format!("random seed {s}"), random_planar(s))));
    out.extend(synthesized().into_iter().enumerate().map(|(i, s)| (format!("synthesized #{i}"), s)));
    out
}

fn normal_forms(sys: &QuadraticSystem) -> Vec<NormalForm> {
    find_balances(sys, &SpectralOptions::default())
        .unwrap_or_default()
        .iter()
        .filter(|b| b.diagonalizable)
        .filter_map(|b| to_normal_form(sys, b).ok())
        .collect()
}

fn halphen_negative() -> Outcome {
    let start = Instant::now();
    let r = report_for(&["quadint", "analyze", "--example", "halphen", "--max-degree", "20"])?;
    let bals = r["balances"].as_array().cloned().unwrap_or_default();
    ensure(bals.len() == 1, || format!("{} balances", bals.len()))?;
    ensure(strs(&bals[0]["c"]) == ["1", "1", "1"], || format!("balance {:?}", strs(&bals[0]["c"])))?;
    ensure(strs(&bals[0]["exponents"]) == ["-1", "-1", "-1"], || {
        format!("exponents {:?}", strs(&bals[0]["exponents"]))
    })?;
    ensure(bals[0]["mode"] == "exact", || "balance not exact".into())?;
    let adm = r["admissible_degrees"].as_array().map_or(usize::MAX, Vec::len);
    ensure(adm == 0, || format!("{adm} admissible degrees"))?;
    let sys = catalog::halphen();
    for m in 1..=6 {
        let k = brute_force_integrals(&sys, m).map_err(|e| e.to_string())?;
        ensure(k.is_empty(), || format!("oracle kernel at M={m} has dimension {}", k.len()))?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("c=(1,1,1), exponents (-1,-1,-1), no admissible M<=20, oracle {{0}} for M<=6, {:.2?}", start.elapsed()))
}

fn halphen_symmetry() -> Outcome {
    let start = Instant::now();
    let sys = catalog::halphen();
    let bal = &find_balances(&sys, &SpectralOptions::default()).map_err(|e| e.to_string())?[0];
    let admissible: Vec<i32> = (-1..=20).filter(|&m| symmetry_degree_admissible(&bal.exponents, m)).collect();
    ensure(admissible.iter().all(|m| [-1, 0, 1].contains(m)), || {
        format!("admissible at {admissible:?}")
    })?;
    for m in [-1, 0] {
        let s = brute_force_symmetry_fields(&sys, m).map_err(|e| e.to_string())?;
        ensure(s.basis.is_empty(), || format!("kernel at M={m} has dimension {}", s.basis.len()))?;
    }
    let s = brute_force_symmetry_fields(&sys, 1).map_err(|e| e.to_string())?;
    ensure(s.basis.len() == 1 && s.contains_field == Some(true), || {
        format!("M=1 kernel dimension {}, contains field {:?}", s.basis.len(), s.contains_field)
    })?;
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "admissible M = {admissible:?} (within {{-1,0,1}}), kernel {{0}} at M=-1,0, span{{D+}} at M=1, {:.2?}",
        start.elapsed()
    ))
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let r = report_for(&["quadint", "planar", "--example", "tsy512", "--max-degree", "12"])?;
    let mut pairs: Vec<Vec<String>> = r["balances"]
        .as_array()
        .cloned()
        .unwrap_or_default()
        .iter()
        .map(|b| strs(&b["exponents"]))
        .collect();
    pairs.sort();
    let want = vec![vec!["-1".to_string(), "3".to_string()], vec!["-1".to_string(), "3/2".to_string()]];
    ensure(pairs == want, || format!("exponent pairs {pairs:?}"))?;
    let verdicts = r["planar"]["verdicts"].as_array().cloned().unwrap_or_default();
    let classified: Vec<u64> = verdicts
        .iter()
        .filter(|v| v["classified"] == true)
        .filter_map(|v| v["m"].as_u64())
        .collect();
    ensure(classified == [3, 6, 9, 12], || format!("classified at {classified:?}"))?;
    let f3 = verdicts
        .iter()
        .find(|v| v["m"] == 3)
        .and_then(|v| v["integral"]["polynomial"].as_str())
        .unwrap_or("<none>")
        .to_string();
    let expected = MultiPoly::parse("x1^3 + x1^2*x2 - x1*x2^2 - x2^3", 2, Mode::Exact).unwrap();
    let got = MultiPoly::parse(&f3, 2, Mode::Exact).map_err(|e| format!("{f3}: {e}"))?;
    ensure(got == expected, || format!("F3 = {f3}"))?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("pairs (-1,3),(-1,3/2); integrals at M in {{3,6,9,12}}; F3 = {f3}; {:.2?}", start.elapsed()))
}

fn pipeline_oracle() -> Outcome {
    let start = Instant::now();
    let mut systems: Vec<(String, QuadraticSystem)> =
        (0..RANDOM_SYSTEMS).map(|s| (format!("seed {s}"), random_planar(s))).collect();
    systems.extend(synthesized().into_iter().enumerate().map(|(i, s)| (format!("synthesized #{i}"), s)));
    let (mut compared, mut ruled_out, mut with_integrals, mut no_nf) = (0, 0, 0, 0);
    for (label, sys) in &systems {
        let bals = find_balances(sys, &SpectralOptions::default()).map_err(|e| format!("{label}: {e}"))?;
        let admissible = admissible_degrees(&bals, 6);
        let nf = bals
            .iter()
            .filter(|b| b.diagonalizable)
            .filter_map(|b| to_normal_form(sys, b).ok())
            .min_by_key(|nf| nf.mode() != Mode::Exact);
        for m in 1..=6 {
            let oracle = brute_force_integrals(sys, m).map_err(|e| format!("{label}: {e}"))?;
            if !admissible.contains(&m) {
                ensure(oracle.is_empty(), || format!("{label} M={m}: ruled out but oracle has {}", oracle.len()))?;
                ruled_out += 1;
                continue;
            }
            let Some(nf) = &nf else {
                no_nf += 1;
                continue;
            };
            let ours: Vec<MultiPoly> = first_integrals(nf, m)
                .map_err(|e| format!("{label} M={m}: {e}"))?
                .iter()
                .map(|f| integral_in_original_coords(sys, nf, f))
                .collect::<Result<_, Error>>()
                .map_err(|e| format!("{label} M={m}: {e}"))?;
            ensure(ours.iter().all(|f| f.mode() == Mode::Exact), || {
                format!("{label} M={m}: integral not exact")
            })?;
            ensure(spans_equal(&ours, &oracle), || {
                format!("{label} M={m}: pipeline {} vs oracle {}", ours.len(), oracle.len())
            })?;
            compared += 1;
            if !ours.is_empty() {
                with_integrals += 1;
            }
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{} systems: {compared} (system, M) spans equal ({with_integrals} nonzero), {ruled_out} ruled out with oracle {{0}}, {no_nf} without normal form; {:.2?}",
        systems.len(),
        start.elapsed()
    ))
}

fn fixed_point() -> Outcome {
    let mut checked = 0;
    let mut float = 0;
    for (label, sys) in corpus() {
        for bal in find_balances(&sys, &SpectralOptions::default()).map_err(|e| format!("{label}: {e}"))? {
            let kc = bal.k.mul_vec(&bal.c).map_err(|e| e.to_string())?;
            let defect: Vec<Scalar> = kc.iter().zip(&bal.c).map(|(a, b)| a + b).collect();
            match bal.mode() {
                Mode::Exact => ensure(defect.iter().all(Scalar::is_zero), || format!("{label}: K c != -c"))?,
                Mode::Float => {
                    float += 1;
                    let d = defect.iter().map(Scalar::norm).fold(0.0, f64::max);
                    ensure(d <= 1e-9, || format!("{label}: |K c + c| = {d:e}"))?
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} balances ({float} float) satisfy K c = -c"))
}

fn dimension_bound() -> Outcome {
    let mut checked = 0;
    for (label, sys) in corpus() {
        for nf in normal_forms(&sys) {
            for m in 1..=8 {
                let jm = enumerate_jm(nf.exponent_tail(), m);
                match base_space(&nf, m) {
                    Ok(space) => {
                        let d = space.dimension();
                        ensure(d >= 1 && d <= jm.len(), || format!("{label} M={m}: d={d}, |J|={}", jm.len()))?;
                        checked += 1;
                    }
                    Err(Error::EmptyResonance(_)) => ensure(jm.is_empty(), || format!("{label} M={m}"))?,
                    Err(e) => return Err(format!("{label} M={m}: {e}")),
                }
            }
        }
    }
    Ok(format!("1 <= d <= |J(M)| in {checked} (balance, M) cases with J(M) nonempty, M <= 8"))
}

fn base_contract() -> Outcome {
    let (mut bases, mut integrals, mut float_nf) = (0, 0, 0);
    for (label, sys) in corpus() {
        for nf in normal_forms(&sys) {
            if nf.mode() != Mode::Exact {
                float_nf += 1;
                continue;
            }
            for m in 1..=8 {
                let space = match base_space(&nf, m) {
                    Ok(s) => s,
                    Err(Error::EmptyResonance(_)) => continue,
                    Err(e) => return Err(format!("{label} M={m}: {e}")),
                };
                for b in &space.basis {
                    let dp = nf.apply(OperatorKind::DPlus, &b.p).map_err(|e| e.to_string())?;
                    let ddp = nf.apply(OperatorKind::DMinus, &dp).map_err(|e| e.to_string())?;
                    ensure(ddp.is_zero(), || format!("{label} M={m}: D-(D+P) = {ddp}"))?;
                    bases += 1;
                }
                for f in first_integrals(&nf, m).map_err(|e| e.to_string())? {
                    let fx = integral_in_original_coords(&sys, &nf, &f).map_err(|e| format!("{label} M={m}: {e}"))?;
                    let d = fx.lie_derivative(sys.fields()).map_err(|e| e.to_string())?;
                    ensure(d.is_zero() && fx.mode() == Mode::Exact, || format!("{label} M={m}: D+F = {d}"))?;
                    integrals += 1;
                }
            }
        }
    }
    Ok(format!(
        "{bases} base functions with D-(D+P) = 0 and {integrals} integrals with D+F = 0, exact; {float_nf} float normal forms skipped"
    ))
}

fn conservation() -> Outcome {
    let sys = catalog::tsy512();
    let f3 = MultiPoly::parse("x1^3 + x1^2*x2 - x1*x2^2 - x2^3", 2, Mode::Exact).unwrap();
    let x0 = [Complex64::new(0.1, 0.0), Complex64::new(0.05, 0.0)];
    let coarse = rk4_conservation(&sys, &f3, &x0, 1.0, 1e-3).map_err(|e| e.to_string())?;
    let fine = rk4_conservation(&sys, &f3, &x0, 1.0, 5e-4).map_err(|e| e.to_string())?;
    ensure(!coarse.partial && coarse.max_drift <= 1e-6, || format!("drift {:e}", coarse.max_drift))?;
    // double-precision drift is roundoff; the scheme error needs more digits
    let ext_coarse = rk4_conservation_extended(&sys, &f3, &[0.1, 0.05], 1.0, 1e-3).map_err(|e| e.to_string())?;
    let ext_fine = rk4_conservation_extended(&sys, &f3, &[0.1, 0.05], 1.0, 5e-4).map_err(|e| e.to_string())?;
    let ratio = ext_coarse.max_drift / ext_fine.max_drift;
    ensure(ratio >= 8.0, || format!("halving ratio {ratio:.2}"))?;
    Ok(format!(
        "f64 drift {:.2e} (dt/2: {:.2e}); double-double drift {:.2e} -> {:.2e}, halving ratio {ratio:.1}",
        coarse.max_drift, fine.max_drift, ext_coarse.max_drift, ext_fine.max_drift
    ))
}

fn classification_grid() -> Outcome {
    let mut values = std::collections::BTreeSet::new();
    for den in 1..=12i64 {
        for num in -6..=30i64 {
            values.insert(Scalar::ratio(num, den).to_string());
        }
    }
    let grid: Vec<Scalar> = values.iter().map(|s| Scalar::parse(s, Mode::Exact).unwrap()).collect();
    let mut points = 0usize;
    let mut disagreements = Vec::new();
    for r1 in &grid {
        for r2 in &grid {
            for m in 1..=10 {
                points += 1;
                if theorem10_classify(r1, r2, m) != lemma9_admissible(r1, r2, m) {
                    disagreements.push(format!("({r1}, {r2}, {m})"));
                }
            }
        }
    }
    ensure(disagreements.is_empty(), || format!("disagreements at {}", disagreements.join(", ")))?;
    Ok(format!("{} rationals, {points} (rho1, rho2, M) points, 0 disagreements", grid.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Halphen has no polynomial integrals", halphen_negative),
        ("Halphen symmetry fields", halphen_symmetry),
        ("worked planar example", worked_example),
        ("pipeline matches brute force", pipeline_oracle),
        ("balances are fixed by K", fixed_point),
        ("base space dimension bound", dimension_bound),
        ("base function contract", base_contract),
        ("numerical conservation", conservation),
        ("classification rules agree", classification_grid),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
