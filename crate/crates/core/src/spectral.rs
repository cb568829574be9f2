//! Balances `f(c) + c = 0`, Kovalevskaya matrices `K = Df(c) + I`, their
//! exponents and eigenvectors, and the transform `L = (c, J₂, …, Jₙ)`.
//!
//! Planar systems are solved algebraically: a balance `c = −v/λ` lies on a
//! direction `v` with `f(v) = λv`, so the directions are the roots of the
//! binary cubic `v₁f₂(v) − v₂f₁(v)`. Higher dimensions use seeded multi-start
//! damped Newton in complex arithmetic. Float results are snapped to small
//! rationals and kept exact whenever the exact residual vanishes.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{deflate, lu_solve, polynomial_roots, Matrix};
use crate::scalar::{Mode, Scalar};
use crate::system::QuadraticSystem;

#[derive(Clone, Debug)]
pub struct SpectralOptions {
    /// Forced float mode skips every exact attempt.
    pub mode: Mode,
    /// Multi-start Newton starts (n ≥ 3).
    pub starts: usize,
    pub seed: u64,
    pub dedup_tol: f64,
    pub residual_tol: f64,
    /// Residual every reported float balance must reach after polishing.
    pub polish_tol: f64,
    pub cond_max: f64,
    pub snap_max_den: u64,
    pub snap_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            mode: Mode::Exact,
            starts: 200,
            seed: 0,
            dedup_tol: 1e-8,
            residual_tol: 1e-9,
            polish_tol: 1e-12,
            cond_max: 1e8,
            snap_max_den: 1000,
            snap_tol: 1e-7,
        }
    }
}

/// Spectrum of a Kovalevskaya matrix with `ρ₁ = −1` first.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigensystem {
    pub exponents: Vec<Scalar>,
    /// `eigvecs[i]` belongs to `exponents[i]`; shorter than `n` when the
    /// matrix is defective.
    pub eigvecs: Vec<Vec<Scalar>>,
    pub diagonalizable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceData {
    pub c: Vec<Scalar>,
    pub k: Matrix,
    pub exponents: Vec<Scalar>,
    pub eigvecs: Vec<Vec<Scalar>>,
    pub diagonalizable: bool,
    /// `L = (c, J₂, …, Jₙ)` when diagonalizable.
    pub transform: Option<Matrix>,
}

impl BalanceData {
    /// Exact iff the balance, its matrix and its transform are exact.
    pub fn mode(&self) -> Mode {
        let m = self
            .c
            .iter()
            .fold(self.k.mode(), |m, s| m.join(s.mode()));
        match &self.transform {
            Some(l) => m.join(l.mode()),
            None => m,
        }
    }

    /// `ρ₂, …, ρₙ`.
    pub fn exponent_tail(&self) -> &[Scalar] {
        &self.exponents[1..]
    }

    /// `‖K·c + c‖∞`; exactly 0 for exact balances.
    pub fn lemma1_defect(&self) -> f64 {
        let kc = self.k.mul_vec(&self.c).expect("square K");
        kc.iter()
            .zip(&self.c)
            .map(|(a, b)| (a + b).norm())
            .fold(0.0, f64::max)
    }
}

/// `f(c) + c`.
pub fn residual(sys: &QuadraticSystem, c: &[Scalar]) -> Result<Vec<Scalar>> {
    if c.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            expected: sys.n(),
            found: c.len(),
        });
    }
    Ok(sys
        .eval(c)
        .iter()
        .zip(c)
        .map(|(f, ci)| f + ci)
        .collect())
}

fn residual_norm(sys: &QuadraticSystem, c: &[Complex64]) -> f64 {
    sys.eval_complex(c)
        .iter()
        .zip(c)
        .map(|(f, ci)| (f + ci).norm())
        .fold(0.0, f64::max)
}

fn inf_norm(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// All nonzero balances found, each with its spectral data, in
/// deterministic (lexicographic) order.
pub fn find_balances(sys: &QuadraticSystem, opts: &SpectralOptions) -> Result<Vec<BalanceData>> {
    let points = find_balance_points(sys, opts)?;
    let sys = effective_system(sys, opts);
    let data: Vec<BalanceData> = points
        .iter()
        .filter_map(|c| balance_data(&sys, c, opts).ok())
        .collect();
    if data.is_empty() {
        return Err(Error::NoBalance);
    }
    Ok(data)
}

fn effective_system(sys: &QuadraticSystem, opts: &SpectralOptions) -> QuadraticSystem {
    sys.to_mode(sys.mode().join(opts.mode))
}

/// Balance vectors only.
pub fn find_balance_points(
    sys: &QuadraticSystem,
    opts: &SpectralOptions,
) -> Result<Vec<Vec<Scalar>>> {
    if sys.n() < 2 {
        return Err(Error::Precondition("dimension must be at least 2".into()));
    }
    let sys = effective_system(sys, opts);
    let mut points = if sys.n() == 2 {
        planar_balances(&sys, opts)
    } else {
        newton_balances(&sys, opts)
    };
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.value_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    if points.is_empty() {
        return Err(Error::NoBalance);
    }
    Ok(points)
}

/// Exact and float roots of `Σ coeffs[k] tᵏ`: numeric roots (and cluster
/// means) are snapped to rationals and confirmed by exact deflation. Returns
/// exact roots with multiplicities and the remaining numeric roots.
pub(crate) fn split_roots(
    coeffs: &[Scalar],
    max_den: u64,
) -> (Vec<(Scalar, usize)>, Vec<Complex64>) {
    let mut rest: Vec<Scalar> = coeffs.to_vec();
    while rest.last().is_some_and(Scalar::is_zero) {
        rest.pop();
    }
    let numeric = polynomial_roots(&rest.iter().map(Scalar::to_complex).collect::<Vec<_>>());
    let exact_input = rest.iter().all(Scalar::is_exact);
    let mut exact = Vec::new();
    if exact_input {
        let mut candidates = numeric.clone();
        for r in &numeric {
            let near: Vec<&Complex64> = numeric.iter().filter(|z| (*z - r).norm() < 1e-3).collect();
            if near.len() > 1 {
                candidates.push(near.iter().copied().sum::<Complex64>() / near.len() as f64);
            }
        }
        for cand in candidates {
            if rest.len() <= 1 {
                break;
            }
            for tol in [1e-10, 1e-7, 1e-4] {
                let Some(s) = Scalar::complex(cand).snap(max_den, tol) else {
                    continue;
                };
                let mut mult = 0;
                loop {
                    let (q, rem) = deflate(&rest, &s);
                    if !rem.is_zero() || rest.len() <= 1 {
                        break;
                    }
                    rest = q;
                    mult += 1;
                }
                if mult > 0 {
                    exact.push((s, mult));
                    break;
                }
            }
        }
    }
    let leftover = if exact_input {
        polynomial_roots(&rest.iter().map(Scalar::to_complex).collect::<Vec<_>>())
    } else {
        numeric
    };
    (exact, leftover)
}

fn planar_balances(sys: &QuadraticSystem, opts: &SpectralOptions) -> Vec<Vec<Scalar>> {
    let mode = sys.mode();
    let a = |i, j, k| sys.coeff(i, j, k).clone();
    let two = Scalar::from_i64(2, mode);
    // g(s) = f2(1,s) − s·f1(1,s), ascending coefficients
    let g = vec![
        a(1, 0, 0),
        &(&two * &a(1, 0, 1)) - &a(0, 0, 0),
        &a(1, 1, 1) - &(&two * &a(0, 0, 1)),
        -a(0, 1, 1),
    ];
    let mut directions: Vec<Vec<Scalar>> = Vec::new();
    if g.iter().all(Scalar::is_zero) {
        // f(v) ∥ v everywhere: a continuum of balances; sample fixed directions
        for (x, y) in [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1)] {
            directions.push(vec![Scalar::from_i64(x, mode), Scalar::from_i64(y, mode)]);
        }
    } else {
        if g[3].is_zero() {
            directions.push(vec![Scalar::zero(mode), Scalar::one(mode)]);
        }
        let (exact, floats) = split_roots(&g, 1_000_000);
        for (s, _) in exact {
            directions.push(vec![Scalar::one(mode), s]);
        }
        for z in floats {
            directions.push(vec![Scalar::one(Mode::Float), Scalar::complex(z)]);
        }
    }
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    for v in directions {
        let fv = sys.eval(&v);
        let lambda = if !v[0].is_zero() { &fv[0] / &v[0] } else { &fv[1] / &v[1] };
        if lambda.is_negligible(1e-10) {
            continue;
        }
        let c: Vec<Scalar> = v.iter().map(|vi| -(vi / &lambda)).collect();
        let c = if c.iter().all(Scalar::is_exact) {
            Some(c)
        } else {
            polish(sys, &c.iter().map(Scalar::to_complex).collect::<Vec<_>>(), opts)
                .map(|z| finalize_point(sys, &z, opts))
        };
        if let Some(c) = c {
            if !is_duplicate(&out, &c, opts.dedup_tol) {
                out.push(c);
            }
        }
        if out.len() >= 3 && g.iter().all(Scalar::is_zero) {
            break;
        }
    }
    out
}

fn is_duplicate(points: &[Vec<Scalar>], c: &[Scalar], tol: f64) -> bool {
    points.iter().any(|p| {
        let scale = p.iter().map(Scalar::norm).fold(1.0, f64::max);
        p.iter()
            .zip(c)
            .all(|(a, b)| a.approx_eq(b, tol * scale))
    })
}

/// Snaps a converged float balance to exact form when the system is exact
/// and the snapped vector is an exact solution.
fn finalize_point(sys: &QuadraticSystem, z: &[Complex64], opts: &SpectralOptions) -> Vec<Scalar> {
    if sys.mode() == Mode::Exact {
        let snapped: Option<Vec<Scalar>> = z
            .iter()
            .map(|x| Scalar::complex(*x).snap(opts.snap_max_den, opts.snap_tol))
            .collect();
        if let Some(c) = snapped {
            if residual(sys, &c).is_ok_and(|r| r.iter().all(Scalar::is_zero)) {
                return c;
            }
        }
    }
    z.iter().map(|x| Scalar::complex(*x)).collect()
}

/// Damped Newton on `f(c) + c = 0` from `start`; `None` if it stalls,
/// converges to the origin, or misses `polish_tol`.
fn polish(sys: &QuadraticSystem, start: &[Complex64], opts: &SpectralOptions) -> Option<Vec<Complex64>> {
    let n = sys.n();
    let mut x = start.to_vec();
    let mut r = residual_norm(sys, &x);
    let mut extra = 0;
    for _ in 0..200 {
        let fx = sys.eval_complex(&x);
        let rhs = DVector::from_iterator(n, fx.iter().zip(&x).map(|(f, c)| -(f + c)));
        let mut jac = sys.jacobian_complex(&x);
        for i in 0..n {
            jac[(i, i)] += Complex64::new(1.0, 0.0);
        }
        let step = lu_solve(jac, rhs)?;
        if step.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return None;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, s)| a + s * t).collect();
            let rt = residual_norm(sys, &trial);
            if rt.is_finite() && (rt < r || rt <= f64::EPSILON * 4.0) {
                x = trial;
                r = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let scale = inf_norm(&x).max(1.0);
        if r <= 1e-14 * scale * scale {
            extra += 1;
            if extra >= 3 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    let scale = inf_norm(&x).max(1.0);
    if inf_norm(&x) < 1e-6 || r > opts.polish_tol * scale * scale {
        return None;
    }
    Some(x)
}

fn newton_balances(sys: &QuadraticSystem, opts: &SpectralOptions) -> Vec<Vec<Scalar>> {
    let n = sys.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<Complex64>> = (0..opts.starts)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    let converged: Vec<Vec<Complex64>> = starts
        .par_iter()
        .filter_map(|s| polish(sys, s, opts))
        .collect();
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    for z in converged {
        let c = finalize_point(sys, &z, opts);
        if !is_duplicate(&out, &c, opts.dedup_tol) {
            out.push(c);
        }
    }
    out
}

/// `K = Df(c) + I`; `c` must be a balance.
pub fn kovalevskaya_matrix(sys: &QuadraticSystem, c: &[Scalar], tol: f64) -> Result<Matrix> {
    let r = residual(sys, c)?;
    let scale = c.iter().map(Scalar::norm).fold(1.0, f64::max);
    let bad = r.iter().map(Scalar::norm).fold(0.0, f64::max);
    let exact = c.iter().all(Scalar::is_exact) && sys.mode() == Mode::Exact;
    if (exact && !r.iter().all(Scalar::is_zero)) || (!exact && bad > tol * scale * scale) {
        return Err(Error::NotABalance { residual: bad });
    }
    let jac = sys.jacobian(c);
    Ok(jac.shifted(&Scalar::from_i64(-1, jac.mode())))
}

fn normalize_exact(v: &[Scalar]) -> Vec<Scalar> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(p) => {
            let inv = p.inv().expect("nonzero");
            v.iter().map(|x| x * &inv).collect()
        }
        None => v.to_vec(),
    }
}

fn normalize_float(v: &[Scalar]) -> Vec<Scalar> {
    let z: Vec<Complex64> = v.iter().map(Scalar::to_complex).collect();
    let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v.to_vec();
    }
    // fix the phase: first non-negligible entry real positive
    let phase = z
        .iter()
        .find(|x| x.norm() > 1e-8 * norm)
        .map(|x| x.conj() / x.norm())
        .unwrap_or(Complex64::new(1.0, 0.0));
    z.iter()
        .map(|x| {
            let mut y = x * phase / norm;
            if y.im.abs() < 1e-15 {
                y.im = 0.0;
            }
            Scalar::complex(y)
        })
        .collect()
}

fn rank_of(columns: &[Vec<Scalar>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    Matrix::from_columns(columns).rank()
}

struct Cluster {
    value: Scalar,
    mult: usize,
}

/// Spectrum and eigenvectors of `K`, with `ρ₁ = −1` first and `J₁ = c`.
/// Remaining exponents follow in ascending (real, imaginary) order.
pub fn kovalevskaya_exponents(k: &Matrix, c: &[Scalar], opts: &SpectralOptions) -> Result<Eigensystem> {
    let n = k.rows();
    if k.cols() != n || c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: k.cols().max(c.len()),
        });
    }
    let exact_k = k.mode() == Mode::Exact && c.iter().all(Scalar::is_exact);
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut all_exact = false;
    if exact_k {
        let cp = k.char_poly()?;
        let (exact, leftover) = split_roots(&cp, opts.snap_max_den);
        if leftover.is_empty() {
            all_exact = true;
            clusters = exact
                .into_iter()
                .map(|(value, mult)| Cluster { value, mult })
                .collect();
        }
    }
    if !all_exact {
        clusters = numeric_clusters(k, opts);
    }
    let work = if all_exact { k.clone() } else { k.to_mode(Mode::Float) };
    let minus_one = Scalar::from_i64(-1, Mode::Exact);
    let trivial_idx = clusters
        .iter()
        .position(|cl| cl.value.approx_eq(&minus_one, 1e-6))
        .ok_or(Error::MissingTrivialExponent)?;
    clusters.sort_by(|a, b| a.value.value_cmp(&b.value));
    let trivial_idx = clusters
        .iter()
        .position(|cl| cl.value.approx_eq(&minus_one, 1e-6))
        .unwrap_or(trivial_idx);

    let c_work: Vec<Scalar> = c.iter().map(|x| x.to_mode(work.mode())).collect();
    let mut exponents = vec![Scalar::from_i64(-1, Mode::Exact)];
    let mut eigvecs = vec![c_work.clone()];
    let mut complete = true;
    let order: Vec<usize> = std::iter::once(trivial_idx)
        .chain((0..clusters.len()).filter(|&i| i != trivial_idx))
        .collect();
    for idx in order {
        let cl = &clusters[idx];
        let shift = cl.value.to_mode(work.mode());
        let kernel = work.shifted(&shift).kernel_with_tol(1e-8);
        let is_trivial = idx == trivial_idx;
        let wanted = if is_trivial { cl.mult - 1 } else { cl.mult };
        let mut chosen: Vec<Vec<Scalar>> = if is_trivial { vec![c_work.clone()] } else { Vec::new() };
        for v in kernel {
            if chosen.len() == wanted + usize::from(is_trivial) {
                break;
            }
            let v = if all_exact { normalize_exact(&v) } else { normalize_float(&v) };
            let mut trial = chosen.clone();
            trial.push(v.clone());
            if rank_of(&trial) == trial.len() {
                chosen = trial;
            }
        }
        let found = chosen.len() - usize::from(is_trivial);
        if found < wanted {
            complete = false;
        }
        for _ in 0..wanted {
            exponents.push(cl.value.clone());
        }
        let start = usize::from(is_trivial);
        eigvecs.extend(chosen.into_iter().skip(start));
    }
    let mut diagonalizable = complete && eigvecs.len() == n;
    if diagonalizable && !all_exact {
        diagonalizable = Matrix::from_columns(&eigvecs).condition_number() < opts.cond_max;
    }
    // keep eigvecs aligned with exponents when defective
    if !diagonalizable {
        eigvecs.truncate(eigvecs.len().min(n));
    }
    Ok(Eigensystem {
        exponents,
        eigvecs,
        diagonalizable,
    })
}

fn numeric_clusters(k: &Matrix, opts: &SpectralOptions) -> Vec<Cluster> {
    let ev = k.eigenvalues_numeric();
    let mut used = vec![false; ev.len()];
    let mut out = Vec::new();
    for i in 0..ev.len() {
        if used[i] {
            continue;
        }
        let tol = 1e-6 * ev[i].norm().max(1.0);
        let members: Vec<usize> = (i..ev.len())
            .filter(|&j| !used[j] && (ev[j] - ev[i]).norm() <= tol)
            .collect();
        for &j in &members {
            used[j] = true;
        }
        let mean = members.iter().map(|&j| ev[j]).sum::<Complex64>() / members.len() as f64;
        // simple eigenvalues are accurate to near roundoff, so a snap that
        // moves one further than 1e-9 is a coincidence, not a rational
        let confirm = if members.len() == 1 {
            opts.snap_tol.min(1e-9 * mean.norm().max(1.0))
        } else {
            opts.snap_tol
        };
        let value = Scalar::complex(mean)
            .snap(opts.snap_max_den, opts.snap_tol)
            .filter(|s| (s.to_complex() - mean).norm() <= confirm)
            .unwrap_or_else(|| Scalar::complex(mean));
        out.push(Cluster {
            value,
            mult: members.len(),
        });
    }
    out
}

/// `L = (c, J₂, …, Jₙ)`, checked against `L⁻¹KL = diag(ρ)`.
pub fn diagonalizing_transform(bal: &BalanceData) -> Result<Matrix> {
    if !bal.diagonalizable || bal.eigvecs.len() != bal.c.len() {
        return Err(Error::NotDiagonalizable);
    }
    let l = Matrix::from_columns(&bal.eigvecs);
    let inv = l.inverse()?;
    let d = inv.mul(&bal.k)?.mul(&l)?;
    let target = Matrix::diagonal(&bal.exponents);
    let defect = d.sub(&target)?;
    let exact = d.mode() == Mode::Exact && target.mode() == Mode::Exact;
    let ok = if exact {
        defect.is_zero(0.0)
    } else {
        defect.max_abs() <= 1e-9 * bal.k.max_abs().max(1.0)
    };
    if !ok {
        return Err(Error::Verification(format!(
            "L^-1 K L differs from diag(rho) by {:e}",
            defect.max_abs()
        )));
    }
    Ok(l)
}

/// Full spectral data for one balance.
pub fn balance_data(sys: &QuadraticSystem, c: &[Scalar], opts: &SpectralOptions) -> Result<BalanceData> {
    let k = kovalevskaya_matrix(sys, c, opts.residual_tol)?;
    let eig = kovalevskaya_exponents(&k, c, opts)?;
    let mut bal = BalanceData {
        c: c.to_vec(),
        k,
        exponents: eig.exponents,
        eigvecs: eig.eigvecs,
        diagonalizable: eig.diagonalizable,
        transform: None,
    };
    if bal.diagonalizable {
        match diagonalizing_transform(&bal) {
            Ok(l) => bal.transform = Some(l),
            Err(_) => bal.diagonalizable = false,
        }
    }
    Ok(bal)
}
