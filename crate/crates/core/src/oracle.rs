//! Brute-force checks that do not rely on balances or normal forms.
//!
//! First integrals and symmetry fields of a fixed degree are kernels of
//! explicit linear maps on monomial coefficients. Conservation along
//! trajectories is checked with fixed-step RK4, in double or double-double
//! precision.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{monomials_of_degree, Monomial, MultiPoly};
use crate::scalar::{Mode, Scalar};
use crate::system::QuadraticSystem;

/// Largest number of unknowns a brute-force kernel will accept.
pub const MAX_UNKNOWNS: usize = 5000;

/// A polynomial vector field `W = Σ wᵢ ∂/∂xᵢ` with `wᵢ` of degree `M + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryField {
    pub degree: i32,
    pub w: Vec<MultiPoly>,
}

#[derive(Clone, Debug)]
pub struct SymmetrySearch {
    pub degree: i32,
    pub basis: Vec<SymmetryField>,
    /// At degree 1: whether the field itself lies in the kernel.
    pub contains_field: Option<bool>,
    /// Dimension modulo `span{D₊}` at degree 1, the full dimension otherwise.
    pub quotient_dimension: usize,
}

fn check_size(unknowns: usize) -> Result<()> {
    if unknowns > MAX_UNKNOWNS {
        return Err(Error::Precondition(format!(
            "{unknowns} unknowns exceed the brute-force cap of {MAX_UNKNOWNS}"
        )));
    }
    Ok(())
}

/// Matrix whose columns are the images, on `codomain`, of a list of polynomials.
fn image_matrix(images: &[Vec<MultiPoly>], codomain: &[Monomial], mode: Mode) -> Matrix {
    let block = codomain.len();
    let rows = block * images.first().map_or(0, Vec::len);
    let cols: Vec<Vec<Scalar>> = images
        .par_iter()
        .map(|parts| {
            let mut col = Vec::with_capacity(rows);
            for p in parts {
                col.extend(p.coefficients_on(codomain).into_iter().map(|c| c.to_mode(mode)));
            }
            col
        })
        .collect();
    if cols.is_empty() {
        return Matrix::zeros(rows, 0, mode);
    }
    let mut m = Matrix::from_columns(&cols);
    if m.mode() != mode {
        m = m.to_mode(mode);
    }
    m
}

/// Basis of `{F homogeneous of degree m : D₊F = 0}`, each normalized to
/// leading coefficient 1.
pub fn brute_force_integrals(sys: &QuadraticSystem, m: u32) -> Result<Vec<MultiPoly>> {
    let n = sys.n();
    let mode = sys.mode();
    let dom = monomials_of_degree(n, m);
    check_size(dom.len())?;
    let cod = monomials_of_degree(n, m + 1);
    let images: Vec<Vec<MultiPoly>> = dom
        .par_iter()
        .map(|mono| {
            let p = MultiPoly::term(mono.clone(), Scalar::one(mode));
            vec![p.lie_derivative(sys.fields()).expect("same dimension")]
        })
        .collect();
    let mat = image_matrix(&images, &cod, mode);
    Ok(kernel_polys(&mat, &dom, mode))
}

fn kernel_polys(mat: &Matrix, dom: &[Monomial], mode: Mode) -> Vec<MultiPoly> {
    let n = dom.first().map_or(0, Monomial::nvars);
    mat.kernel()
        .into_iter()
        .map(|v| {
            let p = MultiPoly::from_terms(n, mode, dom.iter().cloned().zip(v));
            let p = match mode {
                Mode::Exact => p,
                Mode::Float => p.prune(1e-10 * p.max_coeff_norm()),
            };
            p.normalize_leading()
        })
        .collect()
}

/// `[W, V]ᵢ = W(vᵢ) − V(wᵢ)`.
pub fn commutator(w: &[MultiPoly], v: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
    w.iter()
        .zip(v)
        .map(|(wi, vi)| Ok(&vi.lie_derivative(w)? - &wi.lie_derivative(v)?))
        .collect()
}

/// Basis of `{W : [W, D₊] = 0}` with components homogeneous of degree `m + 1`.
pub fn brute_force_symmetry_fields(sys: &QuadraticSystem, m: i32) -> Result<SymmetrySearch> {
    if m < -1 {
        return Err(Error::Precondition(format!("symmetry degree {m} < -1")));
    }
    let n = sys.n();
    let mode = sys.mode();
    let deg = (m + 1) as u32;
    let monos = monomials_of_degree(n, deg);
    check_size(n * monos.len())?;
    let cod = monomials_of_degree(n, deg + 1);
    let unknowns: Vec<(usize, Monomial)> = (0..n)
        .flat_map(|i| monos.iter().map(move |mo| (i, mo.clone())))
        .collect();
    let images: Vec<Vec<MultiPoly>> = unknowns
        .par_iter()
        .map(|(i, mono)| {
            let mut w = vec![MultiPoly::zero(n, mode); n];
            w[*i] = MultiPoly::term(mono.clone(), Scalar::one(mode));
            commutator(&w, sys.fields()).expect("same dimension")
        })
        .collect();
    let mat = image_matrix(&images, &cod, mode);
    let basis: Vec<SymmetryField> = mat
        .kernel()
        .into_iter()
        .map(|v| {
            let mut w = vec![MultiPoly::zero(n, mode); n];
            for ((i, mono), c) in unknowns.iter().zip(v) {
                w[*i].add_term(mono.clone(), c);
            }
            SymmetryField { degree: m, w }
        })
        .collect();
    let (contains_field, quotient_dimension) = if m == 1 {
        let mut vecs: Vec<Vec<Scalar>> = basis.iter().map(|f| field_coords(&f.w, &monos)).collect();
        let r0 = rank_of(&vecs, mode);
        vecs.push(field_coords(sys.fields(), &monos));
        let r1 = rank_of(&vecs, mode);
        let inside = r1 == r0;
        (Some(inside), if inside { r0.saturating_sub(1) } else { r0 })
    } else {
        (None, basis.len())
    };
    Ok(SymmetrySearch {
        degree: m,
        basis,
        contains_field,
        quotient_dimension,
    })
}

fn field_coords(w: &[MultiPoly], monos: &[Monomial]) -> Vec<Scalar> {
    w.iter().flat_map(|p| p.coefficients_on(monos)).collect()
}

fn rank_of(vectors: &[Vec<Scalar>], mode: Mode) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols: Vec<Vec<Scalar>> = vectors
        .iter()
        .map(|v| v.iter().map(|c| c.to_mode(mode)).collect())
        .collect();
    Matrix::from_columns(&cols).rank()
}

/// Dimension of the span of homogeneous polynomials.
pub fn span_rank(polys: &[MultiPoly]) -> usize {
    if polys.is_empty() {
        return 0;
    }
    let mode = polys.iter().fold(Mode::Exact, |m, p| m.join(p.mode()));
    let mut monos: Vec<Monomial> = polys
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    monos.sort();
    monos.dedup();
    let vecs: Vec<Vec<Scalar>> = polys.iter().map(|p| p.coefficients_on(&monos)).collect();
    rank_of(&vecs, mode)
}

/// Whether two lists of polynomials span the same space.
pub fn spans_equal(a: &[MultiPoly], b: &[MultiPoly]) -> bool {
    let ra = span_rank(a);
    let rb = span_rank(b);
    if ra != rb {
        return false;
    }
    let both: Vec<MultiPoly> = a.iter().chain(b).cloned().collect();
    span_rank(&both) == ra
}

#[derive(Clone, Debug, PartialEq)]
pub struct Drift {
    /// `max |F(x(t)) − F(x₀)| / max(1, |F(x₀)|)` over accepted steps.
    pub max_drift: f64,
    pub steps: usize,
    pub t_reached: f64,
    /// The trajectory blew up after 10% of the interval.
    pub partial: bool,
    pub halvings: u32,
}

const BLOWUP_NORM: f64 = 1e150;
const MAX_HALVINGS: u32 = 40;

trait Real:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn ratio(p: f64, q: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Real for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn ratio(p: f64, q: f64) -> Self {
        Complex64::new(p / q, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn ratio(p: f64, q: f64) -> Self {
        dd_div(TwoFloat::from(p), TwoFloat::from(q))
    }
    fn magnitude(self) -> f64 {
        self.hi().abs()
    }
}

/// Polynomial with coefficients converted to the integration scalar.
struct Compiled<T> {
    terms: Vec<(Vec<u32>, T)>,
}

impl<T: Real> Compiled<T> {
    fn eval(&self, x: &[T]) -> T {
        let mut s = T::from_f64(0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * *xi;
                }
            }
            s = s + t;
        }
        s
    }
}

fn compile<T: Real>(p: &MultiPoly, conv: &impl Fn(&Scalar) -> Result<T>) -> Result<Compiled<T>> {
    Ok(Compiled {
        terms: p
            .terms()
            .map(|(m, c)| Ok((m.exponents().to_vec(), conv(c)?)))
            .collect::<Result<_>>()?,
    })
}

fn integrate<T: Real>(
    field: &[Compiled<T>],
    f: &Compiled<T>,
    x0: &[T],
    t_end: f64,
    dt: f64,
) -> Result<Drift> {
    if dt.is_nan() || dt <= 0.0 || t_end.is_nan() || t_end < 0.0 {
        return Err(Error::Precondition("need dt > 0 and t_end >= 0".into()));
    }
    let n = x0.len();
    let eval = |x: &[T]| -> Vec<T> { field.iter().map(|g| g.eval(x)).collect() };
    let axpy = |x: &[T], k: &[T], h: T| -> Vec<T> { x.iter().zip(k).map(|(a, b)| *a + *b * h).collect() };
    let f0 = f.eval(x0);
    let denom = f0.magnitude().max(1.0);
    let mut x = x0.to_vec();
    let mut t = 0.0f64;
    let mut h = dt;
    let mut out = Drift {
        max_drift: 0.0,
        steps: 0,
        t_reached: 0.0,
        partial: false,
        halvings: 0,
    };
    let finite = |v: &[T]| v.iter().all(|z| z.magnitude().is_finite() && z.magnitude() < BLOWUP_NORM);
    while t < t_end - 1e-15 * t_end.max(1.0) {
        let step = h.min(t_end - t);
        let hh = T::from_f64(step);
        let half = T::from_f64(step / 2.0);
        let k1 = eval(&x);
        let k2 = eval(&axpy(&x, &k1, half));
        let k3 = eval(&axpy(&x, &k2, half));
        let k4 = eval(&axpy(&x, &k3, hh));
        let sixth = T::ratio(1.0, 6.0);
        let two = T::from_f64(2.0);
        let next: Vec<T> = (0..n)
            .map(|i| x[i] + hh * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
            .collect();
        if !finite(&next) {
            if out.halvings < MAX_HALVINGS {
                h /= 2.0;
                out.halvings += 1;
                continue;
            }
            if t < 0.1 * t_end {
                return Err(Error::BlowUp { t });
            }
            out.partial = true;
            break;
        }
        x = next;
        t += step;
        out.steps += 1;
        let d = (f.eval(&x) - f0).magnitude() / denom;
        if !d.is_finite() {
            if t < 0.1 * t_end {
                return Err(Error::BlowUp { t });
            }
            out.partial = true;
            break;
        }
        out.max_drift = out.max_drift.max(d);
    }
    out.t_reached = t;
    Ok(out)
}

/// Fixed-step RK4 in complex double precision.
pub fn rk4_conservation(sys: &QuadraticSystem, f: &MultiPoly, x0: &[Complex64], t_end: f64, dt: f64) -> Result<Drift> {
    check_dims(sys, f, x0.len())?;
    let conv = |c: &Scalar| Ok(c.to_complex());
    let field: Vec<Compiled<Complex64>> = sys.fields().iter().map(|g| compile(g, &conv)).collect::<Result<_>>()?;
    integrate(&field, &compile(f, &conv)?, x0, t_end, dt)
}

/// Fixed-step RK4 in double-double precision, for real systems. Resolves
/// scheme error far below double-precision roundoff.
pub fn rk4_conservation_extended(sys: &QuadraticSystem, f: &MultiPoly, x0: &[f64], t_end: f64, dt: f64) -> Result<Drift> {
    check_dims(sys, f, x0.len())?;
    let conv = |c: &Scalar| -> Result<TwoFloat> {
        match c {
            Scalar::Exact(q) if q.im.is_zero() => Ok(rational_to_twofloat(&q.re)),
            Scalar::Float(z) if z.im == 0.0 => Ok(TwoFloat::from(z.re)),
            _ => Err(Error::Precondition("extended RK4 needs real coefficients".into())),
        }
    };
    let field: Vec<Compiled<TwoFloat>> = sys.fields().iter().map(|g| compile(g, &conv)).collect::<Result<_>>()?;
    let x0: Vec<TwoFloat> = x0.iter().map(|&v| TwoFloat::from(v)).collect();
    integrate(&field, &compile(f, &conv)?, &x0, t_end, dt)
}

fn check_dims(sys: &QuadraticSystem, f: &MultiPoly, len: usize) -> Result<()> {
    for found in [f.nvars(), len] {
        if found != sys.n() {
            return Err(Error::DimensionMismatch {
                expected: sys.n(),
                found,
            });
        }
    }
    Ok(())
}

fn bigint_to_twofloat(v: &BigInt) -> TwoFloat {
    let hi = v.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return TwoFloat::from(hi);
    }
    let rest = v - float_to_bigint(hi);
    TwoFloat::from(hi) + TwoFloat::from(rest.to_f64().unwrap_or(0.0))
}

fn float_to_bigint(x: f64) -> BigInt {
    num_traits::FromPrimitive::from_f64(x).unwrap_or_else(BigInt::zero)
}

fn rational_to_twofloat(q: &BigRational) -> TwoFloat {
    dd_div(bigint_to_twofloat(q.numer()), bigint_to_twofloat(q.denom()))
}

/// `a / b` by three correction steps. twofloat's own quotient forms
/// `1 − b·(1/b)` without a fused multiply-add and keeps only double accuracy.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}
