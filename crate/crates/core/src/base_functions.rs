//! Base functions: homogeneous `P` of degree `M` with `D₋(D₊P) = 0`.
//!
//! For a seed `z ∈ J(M)` with `|z| = n` and `a = M − n`, write
//! `P = Σⱼ y₁^{a−j} Iₙ₊ⱼ` with `Iₖ` homogeneous of degree `k` in
//! `y₂…yₙ`. The `y₁`-dependent part of `D₊P` vanishes iff
//!
//! ```text
//! (A₀ − M) Iₙ       = 0
//! (A₀ − M) Iₙ₊ₛ     = −A₊ Iₙ₊ₛ₋₁ − (a + 2 − s) φ₁ Iₙ₊ₛ₋₂,   s = 1..a
//! ```
//!
//! and then `D₊P = A₊ I_M + φ₁ I_{M−1}`. `A₀` is diagonal on monomials,
//! so each level is solved coefficientwise; a nonzero right-hand side at a
//! resonant monomial obstructs the seed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::normal_form::{NormalForm, OperatorKind};
use crate::poly::{Monomial, MultiPoly};
use crate::resonance::{enumerate_jm, ResonanceSet, RES_TOL};
use crate::scalar::{Mode, Scalar};
use crate::system::QuadraticSystem;

/// Relative tolerance for float-mode zero tests on cascade outputs.
pub const CASCADE_TOL: f64 = 1e-8;

/// Denominator bound when rationalizing float integrals.
const SNAP_MAX_DEN: u64 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    Seed(Vec<u32>),
    /// Combination of obstructed seeds whose obstructions cancel.
    Combination(Vec<(Vec<u32>, Scalar)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseFunction {
    pub origin: Origin,
    /// Homogeneous of degree `M` in `y₁…yₙ`.
    pub p: MultiPoly,
    /// `D₊P`, free of `y₁`.
    pub residual: MultiPoly,
    /// `Iₙ, …, I_M`; empty for combinations.
    pub chain: Vec<MultiPoly>,
}

/// First resonant monomial where a cascade level had a nonzero right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub seed: Vec<u32>,
    /// Degree of the level.
    pub level: u32,
    /// Exponents of `y₂…yₙ`.
    pub monomial: Vec<u32>,
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CascadeOutcome {
    Base(BaseFunction),
    Obstructed(Obstruction),
}

#[derive(Clone, Debug)]
pub struct BaseSpace {
    pub m: u32,
    pub resonance: ResonanceSet,
    pub basis: Vec<BaseFunction>,
    pub obstructed: Vec<Obstruction>,
}

impl BaseSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

struct RawCascade {
    chain: Vec<MultiPoly>,
    p: MultiPoly,
    obstructions: Vec<Obstruction>,
}

fn tail_monomial(n: usize, z: &[u32]) -> Monomial {
    let mut e = Vec::with_capacity(n);
    e.push(0);
    e.extend_from_slice(z);
    Monomial::new(e)
}

fn negligible(c: &Scalar, scale: f64) -> bool {
    match c {
        Scalar::Exact(q) => q.is_zero(),
        Scalar::Float(_) => c.is_negligible(CASCADE_TOL * scale.max(1.0)),
    }
}

fn is_resonant(w: &Scalar) -> bool {
    match w {
        Scalar::Exact(q) => q.is_zero(),
        Scalar::Float(_) => w.is_negligible(RES_TOL),
    }
}

/// Runs every level, zeroing obstructed coefficients and recording them.
fn run_cascade(nf: &NormalForm, z: &[u32], m: u32) -> Result<RawCascade> {
    let n = nf.n();
    let mode = nf.mode();
    if z.len() != n - 1 {
        return Err(Error::InvalidSeed(format!("{z:?} has wrong length")));
    }
    let norm: u32 = z.iter().sum();
    let dot = z
        .iter()
        .zip(nf.exponent_tail())
        .fold(Scalar::zero(mode), |s, (&k, r)| &s + &(&Scalar::from_i64(k as i64, mode) * r));
    let target = Scalar::from_i64(m as i64, mode);
    if norm > m || !is_resonant(&(&dot - &target)) {
        return Err(Error::InvalidSeed(format!("{z:?} is not in J({m})")));
    }
    let a = m - norm;
    let phi1 = &nf.phi()[0];
    let mut chain = vec![MultiPoly::term(tail_monomial(n, z), Scalar::one(mode))];
    let mut obstructions = Vec::new();
    for s in 1..=a {
        let prev = &chain[s as usize - 1];
        let mut rhs = -&nf.apply(OperatorKind::APlus, prev)?;
        if s >= 2 {
            let w = Scalar::from_i64((a + 2 - s) as i64, mode);
            rhs = &rhs - &(phi1 * &chain[s as usize - 2]).scale(&w);
        }
        let scale = rhs.max_coeff_norm();
        let mut level = MultiPoly::zero(n, mode);
        for (mono, d) in rhs.terms() {
            let w = mono
                .exponents()
                .iter()
                .zip(nf.exponents())
                .skip(1)
                .fold(Scalar::zero(mode), |acc, (&k, r)| {
                    &acc + &(&Scalar::from_i64(k as i64, mode) * r)
                });
            let w = &w - &target;
            if is_resonant(&w) {
                if !negligible(d, scale) {
                    obstructions.push(Obstruction {
                        seed: z.to_vec(),
                        level: norm + s,
                        monomial: mono.exponents()[1..].to_vec(),
                        value: d.clone(),
                    });
                }
                continue;
            }
            level.add_term(mono.clone(), d / &w);
        }
        chain.push(level);
    }
    let p = assemble(&chain, m, norm);
    Ok(RawCascade {
        chain,
        p,
        obstructions,
    })
}

/// Builds `P` from the chain through `P_{l+1} = (M − l) ∫P_l dy₁ + I_{l+1}`.
pub fn assemble(chain: &[MultiPoly], m: u32, norm: u32) -> MultiPoly {
    let mut p = chain[0].clone();
    for (j, next) in chain.iter().enumerate().skip(1) {
        let l = norm + j as u32 - 1;
        let factor = Scalar::from_i64((m - l) as i64, p.mode());
        p = &integrate_y1(&p).scale(&factor) + next;
    }
    p
}

fn integrate_y1(p: &MultiPoly) -> MultiPoly {
    let mode = p.mode();
    MultiPoly::from_terms(
        p.nvars(),
        mode,
        p.terms().map(|(m, c)| {
            let e = m.exponent(0) + 1;
            (m.with_exponent(0, e), c / &Scalar::from_i64(e as i64, mode))
        }),
    )
}

/// The intermediate `P_{n+p} = Σⱼ C(a−j, p−j) y₁^{p−j} I_{n+j}`.
pub fn closed_form_level(chain: &[MultiPoly], a: u32, p: u32) -> MultiPoly {
    let mode = chain[0].mode();
    let n = chain[0].nvars();
    let mut out = MultiPoly::zero(n, mode);
    for j in 0..=p {
        let c = binomial((a - j) as u64, (p - j) as u64);
        let y1 = Monomial::var(n, 0);
        let mut t = chain[j as usize].scale(&Scalar::from_i64(c as i64, mode));
        for _ in 0..(p - j) {
            t = &t * &MultiPoly::term(y1.clone(), Scalar::one(mode));
        }
        out = &out + &t;
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Splits `D₊P` into its `y₁`-free part and the rest.
fn split_y1(q: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let mut free = MultiPoly::zero(q.nvars(), q.mode());
    let mut dep = MultiPoly::zero(q.nvars(), q.mode());
    for (m, c) in q.terms() {
        if m.exponent(0) == 0 {
            free.add_term(m.clone(), c.clone());
        } else {
            dep.add_term(m.clone(), c.clone());
        }
    }
    (free, dep)
}

fn checked_base(nf: &NormalForm, origin: Origin, p: MultiPoly, chain: Vec<MultiPoly>) -> Result<BaseFunction> {
    let dp = nf.apply(OperatorKind::DPlus, &p)?;
    let (residual, dep) = split_y1(&dp);
    let scale = p.max_coeff_norm();
    if dep.terms().any(|(_, c)| !negligible(c, scale)) {
        return Err(Error::Verification(format!(
            "D-(D+P) does not vanish for {origin:?}"
        )));
    }
    let residual = match nf.mode() {
        Mode::Exact => residual,
        Mode::Float => residual.prune(CASCADE_TOL * scale.max(1.0)),
    };
    Ok(BaseFunction {
        origin,
        p,
        residual,
        chain,
    })
}

/// One seed of `J(M)` through the cascade.
pub fn solve_cascade(nf: &NormalForm, z: &[u32], m: u32) -> Result<CascadeOutcome> {
    let raw = run_cascade(nf, z, m)?;
    if let Some(first) = raw.obstructions.into_iter().next() {
        return Ok(CascadeOutcome::Obstructed(first));
    }
    checked_base(nf, Origin::Seed(z.to_vec()), raw.p, raw.chain).map(CascadeOutcome::Base)
}

/// All base functions of degree `m`: one per unobstructed seed, plus the
/// combinations of obstructed seeds whose obstructions cancel.
pub fn base_space(nf: &NormalForm, m: u32) -> Result<BaseSpace> {
    let resonance = enumerate_jm(nf.exponent_tail(), m);
    if resonance.is_empty() {
        return Err(Error::EmptyResonance(m));
    }
    let raws: Vec<RawCascade> = resonance
        .members
        .par_iter()
        .map(|z| run_cascade(nf, z, m))
        .collect::<Result<_>>()?;

    let mut basis = Vec::new();
    let mut obstructed = Vec::new();
    let mut blocked: Vec<(Vec<u32>, MultiPoly, MultiPoly)> = Vec::new();
    for (z, raw) in resonance.members.iter().zip(raws) {
        if raw.obstructions.is_empty() {
            basis.push(checked_base(nf, Origin::Seed(z.clone()), raw.p, raw.chain)?);
        } else {
            obstructed.push(raw.obstructions[0].clone());
            let dp = nf.apply(OperatorKind::DPlus, &raw.p)?;
            let (_, dep) = split_y1(&dp);
            blocked.push((z.clone(), raw.p, dep));
        }
    }
    if !blocked.is_empty() {
        let deps: Vec<&MultiPoly> = blocked.iter().map(|b| &b.2).collect();
        let scale = blocked.iter().map(|b| b.1.max_coeff_norm()).fold(1.0, f64::max);
        for lambda in combination_kernel(&deps, nf.mode(), scale) {
            let mut p = MultiPoly::zero(nf.n(), nf.mode());
            let mut parts = Vec::new();
            for ((z, pz, _), l) in blocked.iter().zip(&lambda) {
                if !negligible(l, 1.0) {
                    p = &p + &pz.scale(l);
                    parts.push((z.clone(), l.clone()));
                }
            }
            basis.push(checked_base(nf, Origin::Combination(parts), p, Vec::new())?);
        }
    }
    if basis.is_empty() {
        return Err(Error::Verification(format!(
            "no base function of degree {m} despite nonempty J({m})"
        )));
    }
    Ok(BaseSpace {
        m,
        resonance,
        basis,
        obstructed,
    })
}

/// Kernel of the map `λ ↦ Σ λᵢ qᵢ`, tiny float entries zeroed first.
fn combination_kernel(polys: &[&MultiPoly], mode: Mode, scale: f64) -> Vec<Vec<Scalar>> {
    let mut monos: Vec<Monomial> = polys
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    monos.sort();
    monos.dedup();
    let mut mat = Matrix::zeros(monos.len(), polys.len(), mode);
    for (j, p) in polys.iter().enumerate() {
        for (i, c) in p.coefficients_on(&monos).into_iter().enumerate() {
            if !negligible(&c, scale) {
                mat.set(i, j, c.to_mode(mode));
            }
        }
    }
    if monos.is_empty() {
        return Matrix::identity(polys.len(), mode).to_rows();
    }
    mat.kernel()
}

/// Homogeneous degree-`m` first integrals of the normal form: the kernel of
/// the residual map on the base space. Each is verified and normalized.
pub fn first_integrals(nf: &NormalForm, m: u32) -> Result<Vec<MultiPoly>> {
    let space = match base_space(nf, m) {
        Ok(s) => s,
        Err(Error::EmptyResonance(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    integrals_in_space(nf, &space)
}

pub fn integrals_in_space(nf: &NormalForm, space: &BaseSpace) -> Result<Vec<MultiPoly>> {
    let residuals: Vec<&MultiPoly> = space.basis.iter().map(|b| &b.residual).collect();
    let scale = space
        .basis
        .iter()
        .map(|b| b.p.max_coeff_norm())
        .fold(1.0, f64::max);
    let mut out = Vec::new();
    for mu in combination_kernel(&residuals, nf.mode(), scale) {
        let mut f = MultiPoly::zero(nf.n(), nf.mode());
        for (b, c) in space.basis.iter().zip(&mu) {
            f = &f + &b.p.scale(c);
        }
        if nf.mode() == Mode::Float {
            f = f.prune(CASCADE_TOL * f.max_coeff_norm());
        }
        let f = f.normalize_leading();
        let d = nf.apply(OperatorKind::DPlus, &f)?;
        if d.terms().any(|(_, c)| !negligible(c, f.max_coeff_norm())) {
            return Err(Error::Verification(
                "combination of base functions is not a first integral".into(),
            ));
        }
        out.push(f);
    }
    Ok(out)
}

/// Pulls a normal-form integral back to `x`: `F(x) = F_y(L⁻¹ x)`, checked
/// against the original system and scaled to leading coefficient 1.
/// Float results are replaced by a small-denominator rational version when
/// that version is an exact integral of an exact system.
pub fn integral_in_original_coords(sys: &QuadraticSystem, nf: &NormalForm, f_y: &MultiPoly) -> Result<MultiPoly> {
    let mode = nf.mode().join(f_y.mode());
    let f = f_y.to_mode(mode).substitute_linear(&nf.inverse_transform().to_mode(mode))?;
    let f = match mode {
        Mode::Exact => f,
        Mode::Float => f.prune(CASCADE_TOL * f.max_coeff_norm()),
    };
    let f = f.normalize_leading();
    let fields: Vec<MultiPoly> = sys.fields().iter().map(|g| g.to_mode(mode)).collect();
    let d = f.lie_derivative(&fields)?;
    let scale = f.max_coeff_norm() * fields.iter().map(MultiPoly::max_coeff_norm).fold(1.0, f64::max);
    if d.terms().any(|(_, c)| !negligible(c, scale)) {
        return Err(Error::Verification(
            "pulled-back integral has nonzero Lie derivative".into(),
        ));
    }
    if mode == Mode::Float && sys.mode() == Mode::Exact {
        if let Some(exact) = rationalized(&f) {
            if exact.lie_derivative(sys.fields())?.is_zero() {
                return Ok(exact);
            }
        }
    }
    Ok(f)
}

fn rationalized(f: &MultiPoly) -> Option<MultiPoly> {
    let mut out = MultiPoly::zero(f.nvars(), Mode::Exact);
    for (m, c) in f.terms() {
        out.add_term(m.clone(), c.snap(SNAP_MAX_DEN, 1e-9)?);
    }
    Some(out)
}
