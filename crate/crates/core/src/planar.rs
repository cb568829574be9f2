//! Complete answer for planar systems
//!
//! ```text
//! ẋ₁ = a₁x₁² + b₁x₁x₂ + d₂x₂²
//! ẋ₂ = a₂x₂² + b₂x₁x₂ + d₁x₁²
//! ```
//!
//! Two independent balances `c⁽¹⁾, c⁽²⁾` with exponents `ρ₁, ρ₂` reduce the
//! system, via `x = C p`, to `ṗ₁ = −p₁² + (ρ₂−1)p₁p₂`,
//! `ṗ₂ = −p₂² + (ρ₁−1)p₁p₂`. When `ρ₁ ≠ −1` the further change
//! `p = [[1, ρ₂−1], [0, ρ₁+1]] y` gives the normal form with
//! `φ₁ = a y₂²`, `φ₂ = b y₂²`, where `a = (ρ₂−1)(ρ₁+ρ₂)` and
//! `b = (ρ₁−1)(ρ₂−1) − ρ₁ − 1`.
//!
//! A degree-`M` integral exists iff both exponents are positive rationals
//! with `1/ρ₁ + 1/ρ₂ ≤ 1` and `M/ρᵢ ∈ ℕ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::base_functions::integral_in_original_coords;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::normal_form::{to_normal_form_with, NormalForm, OperatorKind};
use crate::oracle::brute_force_integrals;
use crate::poly::{Monomial, MultiPoly};
use crate::scalar::{Mode, Scalar};
use crate::spectral::{find_balances, BalanceData, SpectralOptions};
use crate::system::{catalog, QuadraticSystem};

/// Float tolerance for the reduced-form checks.
const PLANAR_TOL: f64 = 1e-8;

/// `(a₁, b₁, d₂, a₂, b₂, d₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarCoefficients {
    pub a1: Scalar,
    pub b1: Scalar,
    pub d2: Scalar,
    pub a2: Scalar,
    pub b2: Scalar,
    pub d1: Scalar,
}

impl PlanarCoefficients {
    pub fn of(sys: &QuadraticSystem) -> Self {
        let two = Scalar::from_i64(2, sys.mode());
        PlanarCoefficients {
            a1: sys.coeff(0, 0, 0).clone(),
            b1: &two * sys.coeff(0, 0, 1),
            d2: sys.coeff(0, 1, 1).clone(),
            a2: sys.coeff(1, 1, 1).clone(),
            b2: &two * sys.coeff(1, 0, 1),
            d1: sys.coeff(1, 0, 0).clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlanarReduction {
    pub a: Scalar,
    pub b: Scalar,
    /// `x = L y`.
    pub transform: Matrix,
    pub normal_form: NormalForm,
}

#[derive(Clone, Debug)]
pub struct PlanarSetup {
    pub coefficients: PlanarCoefficients,
    /// Every balance found, in deterministic order.
    pub balances: Vec<BalanceData>,
    /// The pair used; `c1` carries the larger exponent.
    pub c1: BalanceData,
    pub c2: BalanceData,
    pub rho1: Scalar,
    pub rho2: Scalar,
    /// The field in `p` coordinates.
    pub p_form: Vec<MultiPoly>,
    /// `None` when `ρ₁ = −1`.
    pub reduction: Option<PlanarReduction>,
}

impl PlanarSetup {
    /// Balances beyond the two used.
    pub fn extra_balances(&self) -> usize {
        self.balances.len().saturating_sub(2)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum VerdictSource {
    /// The base function and its residual `δ`.
    BaseFunction,
    /// No `k` with `kρ₁ = M`, so no resonance.
    NoResonance,
    /// `ρ₁ = −1`: brute force.
    Oracle,
}

#[derive(Clone, Debug)]
pub struct DegreeVerdict {
    pub m: u32,
    pub classified: bool,
    pub admissible: bool,
    pub k: Option<u32>,
    pub alpha: Vec<Scalar>,
    pub delta: Option<Scalar>,
    /// `a α_{M−k−1} + b M α_{M−k}`.
    pub delta_formula: Option<Scalar>,
    /// In original coordinates, leading coefficient 1.
    pub integral: Option<MultiPoly>,
    pub source: VerdictSource,
}

impl DegreeVerdict {
    /// The computed answer agrees with the classification.
    pub fn consistent(&self) -> bool {
        self.integral.is_some() == self.classified && self.classified == self.admissible
    }
}

#[derive(Clone, Debug)]
pub struct PlanarReport {
    pub setup: PlanarSetup,
    pub verdicts: Vec<DegreeVerdict>,
    /// Integrals exist exactly at multiples of this degree.
    pub period: Option<u64>,
}

fn pair_independent(u: &[Scalar], v: &[Scalar]) -> bool {
    let det = &(&u[0] * &v[1]) - &(&u[1] * &v[0]);
    !det.is_negligible(PLANAR_TOL * (u[0].norm() + u[1].norm()) * (v[0].norm() + v[1].norm()))
}

fn close(a: &Scalar, b: &Scalar, scale: f64) -> bool {
    a.approx_eq(b, PLANAR_TOL * scale.max(1.0))
}

fn polys_close(p: &MultiPoly, q: &MultiPoly) -> bool {
    let scale = p.max_coeff_norm().max(q.max_coeff_norm());
    let mode = p.mode().join(q.mode());
    let d = &p.to_mode(mode) - &q.to_mode(mode);
    match mode {
        Mode::Exact => d.is_zero(),
        Mode::Float => d.terms().all(|(_, c)| c.is_negligible(PLANAR_TOL * scale.max(1.0))),
    }
}

/// Balances, exponent pair, reduced form and (for `ρ₁ ≠ −1`) normal form.
pub fn planar_analyze(sys: &QuadraticSystem, opts: &SpectralOptions) -> Result<PlanarSetup> {
    if sys.n() != 2 {
        return Err(Error::Precondition(format!("planar analysis needs n = 2, got {}", sys.n())));
    }
    let balances = match find_balances(sys, opts) {
        Ok(b) => b,
        Err(Error::NoBalance) => return Err(Error::TooFewBalances(0)),
        Err(e) => return Err(e),
    };
    let mut pair = None;
    'outer: for i in 0..balances.len() {
        for j in i + 1..balances.len() {
            if pair_independent(&balances[i].c, &balances[j].c) {
                pair = Some((i, j));
                break 'outer;
            }
        }
    }
    let (i, j) = pair.ok_or(Error::TooFewBalances(balances.len()))?;
    let (mut c1, mut c2) = (balances[i].clone(), balances[j].clone());
    if c2.exponents[1].value_cmp(&c1.exponents[1]) == std::cmp::Ordering::Greater {
        std::mem::swap(&mut c1, &mut c2);
    }
    let rho1 = c1.exponents[1].clone();
    let rho2 = c2.exponents[1].clone();
    let mode = sys.mode().join(c1.mode()).join(c2.mode());
    let c = Matrix::from_columns(&[c1.c.clone(), c2.c.clone()]).to_mode(mode);
    let p_form = sys.to_mode(mode).transformed_fields(&c)?;
    let expected = catalog::planar_reduced(&rho1, &rho2).to_mode(mode);
    for (got, want) in p_form.iter().zip(expected.fields()) {
        if !polys_close(got, want) {
            return Err(Error::ShapeViolation(format!(
                "reduced planar form {} differs from {}",
                got.display_with("p"),
                want.display_with("p")
            )));
        }
    }
    let minus_one = Scalar::from_i64(-1, rho1.mode());
    let reduction = if close(&rho1, &minus_one, 1.0) {
        None
    } else {
        Some(reduce(sys, &c, &rho1, &rho2)?)
    };
    Ok(PlanarSetup {
        coefficients: PlanarCoefficients::of(sys),
        balances,
        c1,
        c2,
        rho1,
        rho2,
        p_form,
        reduction,
    })
}

/// `a = (ρ₂−1)(ρ₁+ρ₂)`, `b = (ρ₁−1)(ρ₂−1) − ρ₁ − 1`.
pub fn normal_form_constants(rho1: &Scalar, rho2: &Scalar) -> (Scalar, Scalar) {
    let one = Scalar::one(rho1.mode().join(rho2.mode()));
    let a = &(rho2 - &one) * &(rho1 + rho2);
    let b = &(&(&(rho1 - &one) * &(rho2 - &one)) - rho1) - &one;
    (a, b)
}

fn reduce(sys: &QuadraticSystem, c: &Matrix, rho1: &Scalar, rho2: &Scalar) -> Result<PlanarReduction> {
    let mode = c.mode().join(rho1.mode()).join(rho2.mode());
    let one = Scalar::one(mode);
    let l5 = Matrix::from_rows(vec![
        vec![one.clone(), rho2 - &one],
        vec![Scalar::zero(mode), rho1 + &one],
    ]);
    let transform = c.to_mode(mode).mul(&l5)?;
    let exps = [Scalar::from_i64(-1, mode), rho1.to_mode(mode)];
    let normal_form = to_normal_form_with(sys, &exps, &transform)?;
    let (a, b) = normal_form_constants(rho1, rho2);
    let y2sq = Monomial::new(vec![0, 2]);
    let phi = normal_form.phi();
    let want = [MultiPoly::term(y2sq.clone(), a.clone()), MultiPoly::term(y2sq, b.clone())];
    for (got, w) in phi.iter().zip(&want) {
        if !polys_close(got, w) {
            return Err(Error::ShapeViolation(format!(
                "planar normal form tail {} differs from {}",
                got.display_with("y"),
                w.display_with("y")
            )));
        }
    }
    Ok(PlanarReduction {
        a,
        b,
        transform,
        normal_form,
    })
}

/// `α₀ = 1`,
/// `αᵢ = −(b(k+i−1)αᵢ₋₁ + a(M−k−i+2)αᵢ₋₂) / (ρ₁(k+i) − M)` for `i = 1..M−k`.
pub fn alpha_sequence(a: &Scalar, b: &Scalar, rho1: &Scalar, m: u32, k: u32) -> Result<Vec<Scalar>> {
    let mode = a.mode().join(b.mode()).join(rho1.mode());
    let s = |v: i64| Scalar::from_i64(v, mode);
    if k == 0 || k > m {
        return Err(Error::Precondition(format!("k = {k} outside 1..={m}")));
    }
    if rho1.is_zero() || !close(&(&s(k as i64) * rho1), &s(m as i64), m as f64) {
        return Err(Error::Precondition(format!("k·rho1 != M for k = {k}, M = {m}")));
    }
    let mut alpha = vec![s(1)];
    for i in 1..=(m - k) {
        let den = &(rho1 * &s((k + i) as i64)) - &s(m as i64);
        let mut num = &(b * &s((k + i - 1) as i64)) * &alpha[i as usize - 1];
        if i >= 2 {
            let t = &(a * &s((m - k + 2 - i) as i64)) * &alpha[i as usize - 2];
            num = &num + &t;
        }
        alpha.push(-&(&num / &den));
    }
    Ok(alpha)
}

/// `P = Σⱼ αⱼ y₁^{M−k−j} y₂^{k+j}`.
pub fn planar_base_function(alpha: &[Scalar], m: u32, k: u32) -> Result<MultiPoly> {
    if alpha.len() as u32 != m - k + 1 {
        return Err(Error::Precondition(format!(
            "expected {} coefficients, got {}",
            m - k + 1,
            alpha.len()
        )));
    }
    let mode = alpha[0].mode();
    Ok(MultiPoly::from_terms(
        2,
        mode,
        alpha
            .iter()
            .enumerate()
            .map(|(j, c)| (Monomial::new(vec![m - k - j as u32, k + j as u32]), c.clone())),
    ))
}

/// The coefficient `δ` in `D₊P = δ y₂^{M+1}`.
pub fn residual_delta(nf: &NormalForm, p: &MultiPoly) -> Result<Scalar> {
    let m = match p.homogeneity() {
        Some(crate::poly::Homogeneity::Homogeneous(d)) => d,
        _ => return Err(Error::Precondition("P must be homogeneous and nonzero".into())),
    };
    let dp = nf.apply(OperatorKind::DPlus, p)?;
    let top = Monomial::new(vec![0, m + 1]);
    let scale = p.max_coeff_norm();
    for (mono, c) in dp.terms() {
        let stray = match c {
            Scalar::Exact(_) => !c.is_zero(),
            Scalar::Float(_) => !c.is_negligible(PLANAR_TOL * scale.max(1.0)),
        };
        if *mono != top && stray {
            return Err(Error::Verification(format!(
                "D+P has a term outside y2^{}",
                m + 1
            )));
        }
    }
    Ok(dp.coeff(&top))
}

/// `a α_{M−k−1} + b M α_{M−k}` (with `α₋₁ = 0`).
pub fn delta_formula(a: &Scalar, b: &Scalar, alpha: &[Scalar], m: u32) -> Scalar {
    let mode = a.mode().join(b.mode());
    let last = alpha.len() - 1;
    let mut d = &(b * &Scalar::from_i64(m as i64, mode)) * &alpha[last];
    if last >= 1 {
        d = &d + &(a * &alpha[last - 1]);
    }
    d
}

/// Exact positive rational value, snapping floats.
fn positive_rational(r: &Scalar) -> Option<BigRational> {
    let snapped = r.snap(1000, 1e-9)?;
    let q = snapped.as_rational()?.clone();
    q.is_positive().then_some(q)
}

fn rational_of(r: &Scalar) -> Option<BigRational> {
    r.snap(1000, 1e-9)?.as_rational().cloned()
}

/// Positive rationals with `1/ρ₁ + 1/ρ₂ ≤ 1` and `M/ρᵢ ∈ ℕ`.
pub fn theorem10_classify(rho1: &Scalar, rho2: &Scalar, m: u32) -> bool {
    let (Some(r1), Some(r2)) = (positive_rational(rho1), positive_rational(rho2)) else {
        return false;
    };
    if r1.recip() + r2.recip() > BigRational::one() {
        return false;
    }
    let mm = BigRational::from_integer(BigInt::from(m));
    m >= 1 && (&mm / &r1).is_integer() && (&mm / &r2).is_integer()
}

/// Some `k ∈ 1..M−1` with `ρ₁ = M/k` and `ρ₂ = M/j` for a `j ∈ 1..=M−k`.
pub fn lemma9_admissible(rho1: &Scalar, rho2: &Scalar, m: u32) -> bool {
    let (Some(r1), Some(r2)) = (rational_of(rho1), rational_of(rho2)) else {
        return false;
    };
    let frac = |p: u32, q: u32| BigRational::new(BigInt::from(p), BigInt::from(q));
    (1..m).any(|k| r1 == frac(m, k) && (1..=m - k).any(|j| r2 == frac(m, j)))
}

/// Smallest degree with an integral, when the exponents admit any.
pub fn integral_period(rho1: &Scalar, rho2: &Scalar) -> Option<u64> {
    let r1 = positive_rational(rho1)?;
    let r2 = positive_rational(rho2)?;
    if r1.recip() + r2.recip() > BigRational::one() {
        return None;
    }
    r1.numer().lcm(r2.numer()).to_u64()
}

/// The integer `k` with `kρ₁ = M`, `1 ≤ k ≤ M`.
fn resonant_k(rho1: &Scalar, m: u32) -> Option<u32> {
    if rho1.is_zero() {
        return None;
    }
    let k = (&Scalar::from_i64(m as i64, rho1.mode()) / rho1).as_integer(1e-9)?;
    (1..=m as i64).contains(&k).then_some(k as u32)
}

/// Verdict for one degree.
pub fn classify_degree(sys: &QuadraticSystem, setup: &PlanarSetup, m: u32) -> Result<DegreeVerdict> {
    let (rho1, rho2) = (&setup.rho1, &setup.rho2);
    let mut v = DegreeVerdict {
        m,
        classified: theorem10_classify(rho1, rho2, m),
        admissible: lemma9_admissible(rho1, rho2, m),
        k: None,
        alpha: Vec::new(),
        delta: None,
        delta_formula: None,
        integral: None,
        source: VerdictSource::NoResonance,
    };
    let Some(red) = &setup.reduction else {
        v.source = VerdictSource::Oracle;
        v.integral = brute_force_integrals(sys, m)?.into_iter().next();
        return Ok(v);
    };
    let Some(k) = resonant_k(rho1, m) else {
        return Ok(v);
    };
    v.source = VerdictSource::BaseFunction;
    v.k = Some(k);
    let alpha = alpha_sequence(&red.a, &red.b, rho1, m, k)?;
    let p = planar_base_function(&alpha, m, k)?;
    let nf = &red.normal_form;
    let delta = residual_delta(nf, &p)?;
    v.delta_formula = Some(delta_formula(&red.a, &red.b, &alpha, m));
    let zero = match delta {
        Scalar::Exact(_) => delta.is_zero(),
        Scalar::Float(_) => delta.is_negligible(PLANAR_TOL * p.max_coeff_norm().max(1.0)),
    };
    if zero {
        v.integral = Some(integral_in_original_coords(sys, nf, &p.to_mode(nf.mode()))?);
    }
    v.alpha = alpha;
    v.delta = Some(delta);
    Ok(v)
}

/// Full planar report for degrees `1..=m_max`.
pub fn planar_report(sys: &QuadraticSystem, opts: &SpectralOptions, m_max: u32) -> Result<PlanarReport> {
    let setup = planar_analyze(sys, opts)?;
    let verdicts = (1..=m_max)
        .map(|m| classify_degree(sys, &setup, m))
        .collect::<Result<Vec<_>>>()?;
    let period = integral_period(&setup.rho1, &setup.rho2);
    Ok(PlanarReport {
        setup,
        verdicts,
        period,
    })
}
