//! Quadratic homogeneous vector fields `ẋᵢ = Σⱼₖ aᵢⱼₖ xⱼ xₖ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Homogeneity, Monomial, MultiPoly};
use crate::scalar::{Mode, Scalar};

/// Coefficient tensor `aᵢⱼₖ`, kept symmetric in `(j, k)`, together with the
/// component polynomials `fᵢ` it defines.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSystem {
    n: usize,
    mode: Mode,
    tensor: Vec<Scalar>,
    fields: Vec<MultiPoly>,
}

impl QuadraticSystem {
    /// Builds from an arbitrary (not necessarily symmetric) tensor; the
    /// stored tensor is `(aᵢⱼₖ + aᵢₖⱼ)/2`.
    pub fn from_tensor(n: usize, a: impl Fn(usize, usize, usize) -> Scalar) -> Self {
        let mut raw = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    raw.push(a(i, j, k));
                }
            }
        }
        let mode = raw.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
        let half = match mode {
            Mode::Exact => Scalar::ratio(1, 2),
            Mode::Float => Scalar::float(0.5),
        };
        let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        let mut tensor = vec![Scalar::zero(mode); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = &raw[idx(i, j, k)] + &raw[idx(i, k, j)];
                    tensor[idx(i, j, k)] = (&s * &half).to_mode(mode);
                }
            }
        }
        Self::from_symmetric(n, mode, tensor)
    }

    /// `terms` lists `(i, j, k, c)` meaning `fᵢ` contains `c·xⱼxₖ`
    /// (zero-based indices). Repeated entries are summed.
    pub fn from_monomial_coeffs(n: usize, terms: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let mode = terms.iter().fold(Mode::Exact, |m, t| m.join(t.3.mode()));
        let mut fields = vec![MultiPoly::zero(n, mode); n];
        for (i, j, k, c) in terms {
            for &idx in [i, j, k].iter() {
                if *idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx + 1, n });
                }
            }
            let m = Monomial::var(n, *j).mul(&Monomial::var(n, *k));
            fields[*i].add_term(m, c.to_mode(mode));
        }
        Self::from_fields(fields)
    }

    /// Builds from component polynomials, each of which must be zero or
    /// homogeneous of degree 2.
    pub fn from_fields(fields: Vec<MultiPoly>) -> Result<Self> {
        let n = fields.len();
        let mode = fields.iter().fold(Mode::Exact, |m, f| m.join(f.mode()));
        let mut tensor = vec![Scalar::zero(mode); n * n * n];
        for (i, f) in fields.iter().enumerate() {
            if f.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.nvars(),
                });
            }
            match f.homogeneity() {
                None | Some(Homogeneity::Homogeneous(2)) => {}
                _ => return Err(Error::NotQuadratic),
            }
            for (m, c) in f.terms() {
                let vars: Vec<usize> = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .flat_map(|(v, &e)| std::iter::repeat_n(v, e as usize))
                    .collect();
                let (j, k) = (vars[0], vars[1]);
                let c = c.to_mode(mode);
                if j == k {
                    tensor[(i * n + j) * n + k] = c;
                } else {
                    let half = match mode {
                        Mode::Exact => Scalar::ratio(1, 2),
                        Mode::Float => Scalar::float(0.5),
                    };
                    let h = &c * &half;
                    tensor[(i * n + j) * n + k] = h.clone();
                    tensor[(i * n + k) * n + j] = h;
                }
            }
        }
        Ok(Self::from_symmetric(n, mode, tensor))
    }

    fn from_symmetric(n: usize, mode: Mode, tensor: Vec<Scalar>) -> Self {
        let mut fields = Vec::with_capacity(n);
        for i in 0..n {
            let mut f = MultiPoly::zero(n, mode);
            for j in 0..n {
                for k in 0..n {
                    let m = Monomial::var(n, j).mul(&Monomial::var(n, k));
                    f.add_term(m, tensor[(i * n + j) * n + k].clone());
                }
            }
            fields.push(f);
        }
        QuadraticSystem {
            n,
            mode,
            tensor,
            fields,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `aᵢⱼₖ`, zero-based.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.tensor[(i * self.n + j) * self.n + k]
    }

    pub fn fields(&self) -> &[MultiPoly] {
        &self.fields
    }

    pub fn to_mode(&self, mode: Mode) -> Self {
        if mode == self.mode {
            return self.clone();
        }
        QuadraticSystem {
            n: self.n,
            mode,
            tensor: self.tensor.iter().map(|s| s.to_mode(mode)).collect(),
            fields: self.fields.iter().map(|f| f.to_mode(mode)).collect(),
        }
    }

    pub fn eval(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.fields.iter().map(|f| f.eval(x)).collect()
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let a: Vec<Complex64> = self.tensor.iter().map(Scalar::to_complex).collect();
        (0..n)
            .map(|i| {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    for k in 0..n {
                        s += a[(i * n + j) * n + k] * x[j] * x[k];
                    }
                }
                s
            })
            .collect()
    }

    /// `∂fᵢ/∂xⱼ = 2 Σₖ aᵢⱼₖ xₖ`.
    pub fn jacobian(&self, x: &[Scalar]) -> Matrix {
        let n = self.n;
        let mode = x.iter().fold(self.mode, |m, s| m.join(s.mode()));
        let two = Scalar::from_i64(2, mode);
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s = (0..n).fold(Scalar::zero(mode), |acc, k| {
                            &acc + &(self.coeff(i, j, k) * &x[k])
                        });
                        &two * &s
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(rows)
    }

    pub fn jacobian_complex(&self, x: &[Complex64]) -> nalgebra::DMatrix<Complex64> {
        let n = self.n;
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let s: Complex64 = x.iter().enumerate().map(|(k, xk)| self.coeff(i, j, k).to_complex() * xk).sum();
            s * 2.0
        })
    }

    /// Pushes the field through `x = L y`: returns `L⁻¹ f(L y)`.
    pub fn transformed_fields(&self, l: &Matrix) -> Result<Vec<MultiPoly>> {
        let inv = l.inverse()?;
        let subs: Vec<MultiPoly> = self
            .fields
            .iter()
            .map(|f| f.substitute_linear(l))
            .collect::<Result<_>>()?;
        let mode = self.mode.join(l.mode());
        Ok((0..self.n)
            .map(|i| {
                let mut g = MultiPoly::zero(self.n, mode);
                for (j, s) in subs.iter().enumerate() {
                    let c = inv.get(i, j);
                    if !c.is_zero() {
                        g = &g + &s.scale(c);
                    }
                }
                g
            })
            .collect())
    }
}

/// Built-in example systems.
pub mod catalog {
    use super::*;

    /// Halphen's system:
    /// `ẋ₁ = x₂x₃ − x₁x₃ − x₁x₂` and cyclic permutations.
    pub fn halphen() -> QuadraticSystem {
        let p = |s: &str| MultiPoly::parse(s, 3, Mode::Exact).expect("valid literal");
        QuadraticSystem::from_fields(vec![
            p("x3*x2 - x1*x3 - x1*x2"),
            p("x1*x3 - x2*x1 - x2*x3"),
            p("x2*x1 - x3*x2 - x3*x1"),
        ])
        .expect("quadratic")
    }

    /// `ẋ₁ = x₁² − 9x₂²`, `ẋ₂ = −3x₁² − 8x₁x₂ + 3x₂²`; exponent pairs
    /// (−1, 3) and (−1, 3/2), cubic integral `x₁³ + x₁²x₂ − x₁x₂² − x₂³`.
    pub fn tsy512() -> QuadraticSystem {
        let p = |s: &str| MultiPoly::parse(s, 2, Mode::Exact).expect("valid literal");
        QuadraticSystem::from_fields(vec![p("x1^2 - 9*x2^2"), p("-3*x1^2 - 8*x1*x2 + 3*x2^2")])
            .expect("quadratic")
    }

    /// `ẋᵢ = −xᵢ²`.
    pub fn decoupled(n: usize) -> QuadraticSystem {
        let fields = (0..n)
            .map(|i| {
                MultiPoly::term(
                    Monomial::var(n, i).mul(&Monomial::var(n, i)),
                    Scalar::from(-1),
                )
            })
            .collect();
        QuadraticSystem::from_fields(fields).expect("quadratic")
    }

    /// The planar reduced form `ṗ₁ = −p₁² + (ρ₂−1)p₁p₂`,
    /// `ṗ₂ = −p₂² + (ρ₁−1)p₁p₂`, whose balances `(1,0)` and `(0,1)` carry
    /// exponents `ρ₁` and `ρ₂` respectively.
    pub fn planar_reduced(rho1: &Scalar, rho2: &Scalar) -> QuadraticSystem {
        let one = Scalar::one(rho1.mode().join(rho2.mode()));
        QuadraticSystem::from_monomial_coeffs(
            2,
            &[
                (0, 0, 0, Scalar::from_i64(-1, one.mode())),
                (0, 0, 1, rho2 - &one),
                (1, 1, 1, Scalar::from_i64(-1, one.mode())),
                (1, 0, 1, rho1 - &one),
            ],
        )
        .expect("valid indices")
    }
}
