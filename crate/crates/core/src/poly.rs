//! Sparse multivariate polynomials over [`Scalar`].
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is graded
//! lexicographic with `x1 > x2 > … > xn`. Iteration is therefore ascending;
//! printing walks the map backwards so the leading term comes first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, ParseError, Result};
use crate::linalg::Matrix;
use crate::scalar::{GaussianRational, Mode, Scalar};

/// Exponent vector `x1^e1 ⋯ xn^en`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// `x_{index+1}` (zero-based index).
    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Same monomial with the exponent of `index` replaced.
    pub fn with_exponent(&self, index: usize, e: u32) -> Monomial {
        let mut v = self.0.clone();
        v[index] = e;
        Monomial(v)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{var}{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree `degree` in `nvars` variables, ascending
/// in graded-lex order.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    monomials_with_support(nvars, degree, 0)
}

/// Monomials of total degree `degree` involving only variables
/// `first..nvars` (zero-based); earlier variables have exponent 0.
pub fn monomials_with_support(nvars: usize, degree: u32, first: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    if first > nvars || (first == nvars && degree > 0) {
        return out;
    }
    let mut cur = vec![0u32; nvars];
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Monomial>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(Monomial(cur.clone()));
            cur[pos] = 0;
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(cur, pos + 1, left - e, out);
        }
        cur[pos] = 0;
    }
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    if first == nvars {
        out.push(Monomial(cur));
        return out;
    }
    rec(&mut cur, first, degree, &mut out);
    out.sort();
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Homogeneous(u32),
    Inhomogeneous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    mode: Mode,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(nvars: usize, mode: Mode) -> Self {
        MultiPoly {
            nvars,
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    /// The coordinate `x_{index+1}` (zero-based index).
    pub fn var(nvars: usize, index: usize, mode: Mode) -> Self {
        Self::term(Monomial::var(nvars, index), Scalar::one(mode))
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(m.nvars(), c.mode());
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from (monomial, coefficient) pairs; repeated
    /// monomials are summed. Coefficients are converted to `mode`.
    pub fn from_terms(
        nvars: usize,
        mode: Mode,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Self {
        let mut p = Self::zero(nvars, mode);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial dimension mismatch");
            p.add_term(m, c.to_mode(mode));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.mode))
    }

    /// Adds `c·m` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        if c.mode() != self.mode {
            self.promote(c.mode());
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn promote(&mut self, mode: Mode) {
        let joined = self.mode.join(mode);
        if joined != self.mode {
            *self = self.to_mode(joined);
        }
    }

    pub fn to_mode(&self, mode: Mode) -> Self {
        if mode == self.mode {
            return self.clone();
        }
        MultiPoly {
            nvars: self.nvars,
            mode,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.to_mode(mode)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Drops coefficients with magnitude below `tol` (float mode only).
    pub fn prune(&self, tol: f64) -> Self {
        let mut p = self.clone();
        p.terms.retain(|_, c| !c.is_negligible(tol));
        p
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn homogeneity(&self) -> Option<Homogeneity> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        if degs.all(|e| e == d) {
            Some(Homogeneity::Homogeneous(d))
        } else {
            Some(Homogeneity::Inhomogeneous)
        }
    }

    /// Degree `M` with `U F = M·F`, where `U = Σ xᵢ ∂/∂xᵢ`.
    pub fn euler_degree(&self) -> Result<Homogeneity> {
        self.homogeneity().ok_or(Error::ZeroPolynomial)
    }

    /// Graded-lex largest term.
    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Rescales so the leading coefficient is 1.
    pub fn normalize_leading(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => {
                let inv = c.inv().expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(Scalar::norm).fold(0.0, f64::max)
    }

    /// True if no monomial involves variable `index` (zero-based).
    pub fn is_free_of(&self, index: usize) -> bool {
        self.terms.keys().all(|m| m.exponent(index) == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self, negate: bool) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), if negate { -c } else { c.clone() });
        }
        out
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.mode.join(other.mode));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.nvars, self.mode.join(c.mode()));
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, Scalar::one(self.mode));
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// ∂/∂x_var with `var` one-based (`1..=n`).
    pub fn differentiate(&self, var: usize) -> Result<Self> {
        if var == 0 || var > self.nvars {
            return Err(Error::IndexOutOfRange {
                index: var,
                n: self.nvars,
            });
        }
        Ok(self.partial(var - 1))
    }

    /// ∂/∂x_{index+1}, zero-based.
    pub(crate) fn partial(&self, index: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.mode);
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            if e == 0 {
                continue;
            }
            let k = Scalar::from_i64(e as i64, self.mode);
            out.add_term(m.with_exponent(index, e - 1), c * &k);
        }
        out
    }

    /// Lie derivative `Σᵢ Vᵢ ∂F/∂xᵢ` along the vector field `field`.
    pub fn lie_derivative(&self, field: &[MultiPoly]) -> Result<Self> {
        if field.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: field.len(),
            });
        }
        let mut out = Self::zero(self.nvars, self.mode);
        for (i, v) in field.iter().enumerate() {
            if v.nvars != self.nvars {
                return Err(Error::DimensionMismatch {
                    expected: self.nvars,
                    found: v.nvars,
                });
            }
            if v.mode != self.mode {
                return Err(Error::ModeMismatch);
            }
            let d = self.partial(i);
            if d.is_zero() {
                continue;
            }
            out = out.add_unchecked(&d.mul_unchecked(v), false);
        }
        Ok(out)
    }

    /// `F(L·y)`: substitutes `xᵢ = Σⱼ Lᵢⱼ yⱼ`.
    pub fn substitute_linear(&self, l: &Matrix) -> Result<Self> {
        if l.rows() != self.nvars || l.cols() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: l.rows().max(l.cols()),
            });
        }
        let mode = self.mode.join(l.mode());
        let n = self.nvars;
        let forms: Vec<MultiPoly> = (0..n)
            .map(|i| {
                MultiPoly::from_terms(
                    n,
                    mode,
                    (0..n).map(|j| (Monomial::var(n, j), l.get(i, j).clone())),
                )
            })
            .collect();
        // powers[i][e] = forms[i]^e, filled on demand
        let mut powers: Vec<Vec<MultiPoly>> = forms
            .iter()
            .map(|_| vec![MultiPoly::constant(n, Scalar::one(mode))])
            .collect();
        let mut out = Self::zero(n, mode);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(n, c.to_mode(mode));
            for (i, &e) in m.exponents().iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_unchecked(&forms[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul_unchecked(&powers[i][e as usize]);
                }
            }
            out = out.add_unchecked(&t, false);
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero(self.mode);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(m.exponents()) {
                if e > 0 {
                    t = &t * &xi.pow(e);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(x)
                    .fold(c.to_complex(), |t, (&e, xi)| t * xi.powu(e))
            })
            .sum()
    }

    /// Coefficient vector on the given monomial basis.
    pub fn coefficients_on(&self, basis: &[Monomial]) -> Vec<Scalar> {
        basis.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn display_with<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, var }
    }

    /// Parses the text format, e.g. `x1^3 + x1^2*x2 - 3/4*x1*x2^2 + (1+2i)*x2^3`.
    /// Variable names are a letter prefix followed by a one-based index.
    pub fn parse(text: &str, nvars: usize, mode: Mode) -> std::result::Result<Self, ParseError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            nvars,
            mode,
        };
        let poly = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(ParseError::new(p.pos, "unexpected trailing input"));
        }
        Ok(poly)
    }
}

struct PolyDisplay<'a> {
    poly: &'a MultiPoly,
    var: &'a str,
}

fn is_negative_real(c: &Scalar) -> bool {
    match c {
        Scalar::Exact(q) => q.im.is_zero() && q.re < BigRational::zero(),
        Scalar::Float(z) => z.im == 0.0 && z.re < 0.0,
    }
}

fn is_real(c: &Scalar) -> bool {
    match c {
        Scalar::Exact(q) => q.im.is_zero(),
        Scalar::Float(z) => z.im == 0.0,
    }
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = is_negative_real(c);
            let mag = if neg { -c } else { c.clone() };
            match (idx == 0, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            let constant = m.degree() == 0;
            let unit = match &mag {
                Scalar::Exact(q) => q.re.is_one() && q.im.is_zero(),
                Scalar::Float(z) => z.re == 1.0 && z.im == 0.0,
            };
            if constant {
                write!(f, "{mag}")?;
                continue;
            }
            if !unit {
                if is_real(&mag) {
                    write!(f, "{mag}*")?;
                } else {
                    // complex values print parenthesized already unless purely imaginary
                    let s = mag.to_string();
                    if s.starts_with('(') {
                        write!(f, "{s}*")?;
                    } else {
                        write!(f, "({s})*")?;
                    }
                }
            }
            m.write(f, self.var)?;
        }
        Ok(())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("x"))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    /// Panics on dimension mismatch; mixed modes promote to float.
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "dimension mismatch");
        self.add_unchecked(rhs, false)
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "dimension mismatch");
        self.add_unchecked(rhs, true)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&Scalar::from_i64(-1, self.mode))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    mode: Mode,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, msg)
    }

    fn expr(&mut self) -> std::result::Result<MultiPoly, ParseError> {
        let mut acc = MultiPoly::zero(self.nvars, self.mode);
        let mut sign = 1i64;
        match self.peek() {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => {
                    sign = 1;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -1;
                    self.pos += 1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> std::result::Result<MultiPoly, ParseError> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.power()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn power(&mut self) -> std::result::Result<MultiPoly, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.digits().ok_or_else(|| self.err("expected exponent"))?;
            let e: u32 = e.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into())
    }

    fn primary(&mut self) -> std::result::Result<MultiPoly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let value = self.number()?;
                let value = if self.src.get(self.pos) == Some(&b'i')
                    && !self
                        .src
                        .get(self.pos + 1)
                        .is_some_and(|b| b.is_ascii_alphanumeric())
                {
                    self.pos += 1;
                    &value * &imaginary_unit(self.mode)
                } else {
                    value
                };
                Ok(MultiPoly::constant(self.nvars, value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                match self.digits() {
                    Some(d) => {
                        let idx: usize = d.parse().map_err(|_| self.err("bad variable index"))?;
                        if idx == 0 || idx > self.nvars {
                            return Err(ParseError::new(
                                start,
                                format!("variable index {idx} out of range 1..={}", self.nvars),
                            ));
                        }
                        Ok(MultiPoly::var(self.nvars, idx - 1, self.mode))
                    }
                    None if name == b"i" => {
                        Ok(MultiPoly::constant(self.nvars, imaginary_unit(self.mode)))
                    }
                    None => Err(ParseError::new(start, "expected variable index")),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// digits [. digits] [e [sign] digits] [/ digits]
    fn number(&mut self) -> std::result::Result<Scalar, ParseError> {
        let start = self.pos;
        let int_part = self.digits().unwrap_or_default();
        let mut frac_part = String::new();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac_part = self.digits().unwrap_or_default();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseError::new(start, "expected number"));
        }
        let mut exp: i64 = 0;
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E'))
            && self
                .src
                .get(self.pos + 1)
                .is_some_and(|b| b.is_ascii_digit() || *b == b'-' || *b == b'+')
        {
            self.pos += 1;
            let mut neg = false;
            if let Some(&s) = self.src.get(self.pos) {
                if s == b'-' || s == b'+' {
                    neg = s == b'-';
                    self.pos += 1;
                }
            }
            let d = self.digits().ok_or_else(|| self.err("expected exponent digits"))?;
            exp = d.parse().map_err(|_| self.err("exponent too large"))?;
            if neg {
                exp = -exp;
            }
        }
        let mut den: Option<BigInt> = None;
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let d = self.digits().ok_or_else(|| self.err("expected denominator"))?;
            let d: BigInt = d.parse().map_err(|_| self.err("bad denominator"))?;
            if d.is_zero() {
                return Err(ParseError::new(start, "zero denominator"));
            }
            den = Some(d);
        }
        let text = String::from_utf8_lossy(&self.src[start..self.pos]).to_string();
        match self.mode {
            Mode::Exact => {
                let digits = format!("{int_part}{frac_part}");
                let mantissa: BigInt = digits
                    .parse()
                    .map_err(|_| ParseError::new(start, "bad number"))?;
                let scale = exp - frac_part.len() as i64;
                let ten = BigInt::from(10);
                let mut r = BigRational::from_integer(mantissa);
                if scale >= 0 {
                    r *= BigRational::from_integer(Pow::pow(&ten, scale as u64));
                } else {
                    r /= BigRational::from_integer(Pow::pow(&ten, (-scale) as u64));
                }
                if let Some(d) = den {
                    r /= BigRational::from_integer(d);
                }
                Ok(Scalar::Exact(GaussianRational::real(r)))
            }
            Mode::Float => {
                let (num_text, den_text) = match text.split_once('/') {
                    Some((a, b)) => (a.to_string(), Some(b.to_string())),
                    None => (text.clone(), None),
                };
                let mut v: f64 = num_text
                    .parse()
                    .map_err(|_| ParseError::new(start, "bad number"))?;
                if let Some(d) = den_text {
                    let d: f64 = d.parse().map_err(|_| ParseError::new(start, "bad number"))?;
                    v /= d;
                }
                Ok(Scalar::float(v))
            }
        }
    }
}

fn imaginary_unit(mode: Mode) -> Scalar {
    match mode {
        Mode::Exact => Scalar::Exact(GaussianRational::new(
            BigRational::zero(),
            BigRational::one(),
        )),
        Mode::Float => Scalar::complex(Complex64::new(0.0, 1.0)),
    }
}

pub(crate) fn parse_scalar(text: &str, mode: Mode) -> std::result::Result<Scalar, ParseError> {
    let p = MultiPoly::parse(text, 0, mode)?;
    Ok(p.coeff(&Monomial::one(0)).to_mode(mode))
}
