//! Two-mode scalar field: exact Gaussian rationals or complex doubles.
//!
//! Every coefficient in the crate (system tensors, balances, exponents,
//! polynomial coefficients) is a [`Scalar`]. Arithmetic between two exact
//! values stays exact; anything touching a float value is carried out in
//! complex double precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Magnitude below which a float coefficient counts as zero.
pub const FLOAT_ZERO_TOL: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    /// The mode of a result combining values of modes `self` and `other`.
    pub fn join(self, other: Mode) -> Mode {
        if self == Mode::Exact && other == Mode::Exact {
            Mode::Exact
        } else {
            Mode::Float
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(ParseError::new(0, format!("unknown mode `{other}`"))),
        }
    }
}

/// `re + im·i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_integer(v: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(GaussianRational::new(&self.re / &d, -&self.im / &d))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn add(&self, o: &Self) -> Self {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }

    fn sub(&self, o: &Self) -> Self {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::real(&self.re * &o.re);
        }
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

/// A coefficient value, tagged with its arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussianRational),
    Float(Complex64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Scalar {
        Scalar::from_i64(0, mode)
    }

    pub fn one(mode: Mode) -> Scalar {
        Scalar::from_i64(1, mode)
    }

    pub fn from_i64(v: i64, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(GaussianRational::from_integer(v)),
            Mode::Float => Scalar::Float(Complex64::new(v as f64, 0.0)),
        }
    }

    /// Exact `num/den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar::Exact(GaussianRational::real(BigRational::new(
            BigInt::from(num),
            BigInt::from(den),
        )))
    }

    pub fn rational(r: BigRational) -> Scalar {
        Scalar::Exact(GaussianRational::real(r))
    }

    pub fn float(re: f64) -> Scalar {
        Scalar::Float(Complex64::new(re, 0.0))
    }

    pub fn complex(z: Complex64) -> Scalar {
        debug_assert!(z.re.is_finite() && z.im.is_finite(), "non-finite scalar");
        Scalar::Float(z)
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Exact zero in exact mode; magnitude below [`FLOAT_ZERO_TOL`] in float mode.
    pub fn is_zero(&self) -> bool {
        self.is_negligible(FLOAT_ZERO_TOL)
    }

    /// Like [`Scalar::is_zero`] with an explicit float threshold.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(z) => z.norm() < tol,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.re.is_one() && q.im.is_zero(),
            Scalar::Float(z) => (z - Complex64::new(1.0, 0.0)).norm() < FLOAT_ZERO_TOL,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => q.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_mode(&self, mode: Mode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(q), Mode::Float) => Scalar::Float(q.to_complex()),
            _ => self.clone(),
        }
    }

    /// The rational value, when exact and real.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) if q.im.is_zero() => Some(&q.re),
            _ => None,
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    /// Integer value when the scalar is (exactly, or within `tol`) a real integer.
    pub fn as_integer(&self, tol: f64) -> Option<i64> {
        match self {
            Scalar::Exact(q) => {
                if q.im.is_zero() && q.re.is_integer() {
                    q.re.to_integer().to_i64()
                } else {
                    None
                }
            }
            Scalar::Float(z) => {
                let r = z.re.round();
                if (z - Complex64::new(r, 0.0)).norm() <= tol && r.abs() < 9.0e15 {
                    Some(r as i64)
                } else {
                    None
                }
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(q) => q.inv().map(Scalar::Exact),
            Scalar::Float(z) => {
                if z.norm() == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(z.inv()))
                }
            }
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one(self.mode());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Equality: exact for two exact values, within `tol` otherwise.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }

    /// Total order on values: by real part, then imaginary part.
    pub fn value_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.re.cmp(&b.re).then(a.im.cmp(&b.im)),
            _ => {
                let (a, b) = (self.to_complex(), other.to_complex());
                a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
            }
        }
    }

    /// Replace a float by the nearest Gaussian rational with denominators
    /// at most `max_den`, if one lies within `tol` in each part.
    pub fn snap(&self, max_den: u64, tol: f64) -> Option<Scalar> {
        match self {
            Scalar::Exact(_) => Some(self.clone()),
            Scalar::Float(z) => {
                let re = rationalize(z.re, max_den, tol)?;
                let im = rationalize(z.im, max_den, tol)?;
                Some(Scalar::Exact(GaussianRational::new(re, im)))
            }
        }
    }

    /// Parse a scalar literal: `3`, `-3/4`, `0.25`, `2i`, `(1/2-3i)`, `1e-3`.
    /// Decimal literals become exact rationals in exact mode.
    pub fn parse(text: &str, mode: Mode) -> Result<Scalar, ParseError> {
        crate::poly::parse_scalar(text, mode)
    }
}

/// Best rational approximation with denominator ≤ `max_den` via continued
/// fractions, accepted only when within `tol` of `x`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x.abs() <= tol {
        return Some(BigRational::zero());
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut frac = x;
    let max_den = BigInt::from(max_den);
    for _ in 0..64 {
        let a = frac.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        let cand = BigRational::new(h2.clone(), k2.clone());
        if (cand.to_f64().unwrap_or(f64::NAN) - x).abs() <= tol {
            return Some(cand);
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let rem = frac - a;
        if rem.abs() < 1e-300 {
            break;
        }
        frac = 1.0 / rem;
    }
    None
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn fmt_f64(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('e') || s.contains('.') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rational(&self.re, f);
        }
        if self.re.is_zero() {
            fmt_rational(&self.im, f)?;
            return f.write_str("i");
        }
        f.write_str("(")?;
        fmt_rational(&self.re, f)?;
        f.write_str(if self.im.is_negative() { "-" } else { "+" })?;
        fmt_rational(&self.im.abs(), f)?;
        f.write_str("i)")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    f.write_str(&fmt_f64(z.re))
                } else if z.re == 0.0 {
                    write!(f, "{}i", fmt_f64(z.im))
                } else {
                    let sign = if z.im < 0.0 { "-" } else { "+" };
                    write!(f, "({}{}{}i)", fmt_f64(z.re), sign, fmt_f64(z.im.abs()))
                }
            }
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_i64(v, Mode::Exact)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::rational(r)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::complex(z)
    }
}

fn binary(
    a: &Scalar,
    b: &Scalar,
    exact: impl FnOnce(&GaussianRational, &GaussianRational) -> GaussianRational,
    float: impl FnOnce(Complex64, Complex64) -> Complex64,
) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
        _ => {
            let z = float(a.to_complex(), b.to_complex());
            debug_assert!(z.re.is_finite() && z.im.is_finite(), "non-finite scalar");
            Scalar::Float(z)
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        binary(self, rhs, |x, y| x.add(y), |x, y| x + y)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        binary(self, rhs, |x, y| x.sub(y), |x, y| x - y)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        binary(self, rhs, |x, y| x.mul(y), |x, y| x * y)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero.
    fn div(self, rhs: &Scalar) -> Scalar {
        binary(
            self,
            rhs,
            |x, y| x.mul(&y.inv().expect("division by zero")),
            |x, y| x / y,
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(GaussianRational::new(-q.re.clone(), -q.im.clone())),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
