//! Balance-adapted coordinates and the graded operators acting on them.
//!
//! With `x = L y`, `L = (c, J₂, …, Jₙ)`, the field becomes
//!
//! ```text
//! ẏ₁ = −y₁² + φ₁(y₂,…,yₙ)
//! ẏᵢ = (ρᵢ − 1) y₁ yᵢ + φᵢ(y₂,…,yₙ)
//! ```
//!
//! and `D₊ = (−y₁² + φ₁)∂₁ + y₁(A₀ − Ũ) + A₊`, `D₀ = −y₁∂₁ + A₀`.
//! In these coordinates `D₋ = Σ cᵢ ∂/∂xᵢ` is `+∂/∂y₁`; that sign is the
//! one for which `[D₋, D₊] = D₀ − U` and `[D₀, D₋] = D₋` hold.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{monomials_of_degree, monomials_with_support, Monomial, MultiPoly};
use crate::scalar::{Mode, Scalar};
use crate::spectral::BalanceData;
use crate::system::QuadraticSystem;

/// Relative tolerance for the float-mode shape check.
pub const SHAPE_TOL: f64 = 1e-8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `Σₖ φₖ ∂/∂yₖ`, k ≥ 2.
    APlus,
    /// `Σₖ ρₖ yₖ ∂/∂yₖ`, k ≥ 2.
    AZero,
    /// `Σₖ yₖ ∂/∂yₖ`, k ≥ 2.
    UTilde,
    /// `Σᵢ ρᵢ yᵢ ∂/∂yᵢ`.
    DZero,
    /// `∂/∂y₁`.
    DMinus,
    /// The transformed vector field.
    DPlus,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::APlus,
        OperatorKind::AZero,
        OperatorKind::UTilde,
        OperatorKind::DZero,
        OperatorKind::DMinus,
        OperatorKind::DPlus,
    ];

    /// Acts on polynomials in `y₂…yₙ` only.
    pub fn is_tail(self) -> bool {
        matches!(self, OperatorKind::APlus | OperatorKind::AZero | OperatorKind::UTilde)
    }

    /// Change in total degree.
    pub fn degree_shift(self) -> i32 {
        match self {
            OperatorKind::APlus | OperatorKind::DPlus => 1,
            OperatorKind::DMinus => -1,
            _ => 0,
        }
    }
}

#[derive(Debug)]
pub struct NormalForm {
    n: usize,
    mode: Mode,
    exponents: Vec<Scalar>,
    phi: Vec<MultiPoly>,
    field: Vec<MultiPoly>,
    transform: Matrix,
    inverse: Matrix,
    cache: Mutex<HashMap<(OperatorKind, u32), Matrix>>,
}

impl Clone for NormalForm {
    fn clone(&self) -> Self {
        NormalForm {
            n: self.n,
            mode: self.mode,
            exponents: self.exponents.clone(),
            phi: self.phi.clone(),
            field: self.field.clone(),
            transform: self.transform.clone(),
            inverse: self.inverse.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

/// Normal form at a diagonalizable balance, using its transform.
pub fn to_normal_form(sys: &QuadraticSystem, bal: &BalanceData) -> Result<NormalForm> {
    let l = match (&bal.transform, bal.diagonalizable) {
        (Some(l), true) => l,
        _ => return Err(Error::NotDiagonalizable),
    };
    to_normal_form_with(sys, &bal.exponents, l)
}

/// Normal form for an explicit transform whose columns are eigenvectors of
/// `K` for `exponents` (first column the balance itself).
pub fn to_normal_form_with(sys: &QuadraticSystem, exponents: &[Scalar], l: &Matrix) -> Result<NormalForm> {
    let n = sys.n();
    if exponents.len() != n || l.rows() != n || l.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: exponents.len(),
        });
    }
    let mode = exponents
        .iter()
        .fold(sys.mode().join(l.mode()), |m, r| m.join(r.mode()));
    let inverse = l.to_mode(mode).inverse()?;
    let raw: Vec<MultiPoly> = sys
        .to_mode(mode)
        .transformed_fields(&l.to_mode(mode))?
        .into_iter()
        .map(|g| g.to_mode(mode))
        .collect();
    let exps: Vec<Scalar> = exponents.iter().map(|r| r.to_mode(mode)).collect();
    let scale = raw.iter().map(MultiPoly::max_coeff_norm).fold(1.0, f64::max);
    let tol = SHAPE_TOL * scale;

    let mut phi = Vec::with_capacity(n);
    let mut field = Vec::with_capacity(n);
    for (i, g) in raw.iter().enumerate() {
        let mut expected = Monomial::var(n, 0);
        let mut want = Scalar::from_i64(-1, mode);
        if i > 0 {
            expected = expected.mul(&Monomial::var(n, i));
            want = &exps[i] - &Scalar::one(mode);
        } else {
            expected = expected.mul(&Monomial::var(n, 0));
        }
        let got = g.coeff(&expected);
        let ok = match mode {
            Mode::Exact => got == want,
            Mode::Float => got.approx_eq(&want, tol),
        };
        if !ok {
            return Err(Error::ShapeViolation(format!(
                "component {}: coefficient of {} is {got}, expected {want}",
                i + 1,
                MultiPoly::term(expected.clone(), Scalar::one(mode)).display_with("y"),
            )));
        }
        let mut tail = MultiPoly::zero(n, mode);
        for (m, c) in g.terms() {
            if m.exponent(0) == 0 {
                tail.add_term(m.clone(), c.clone());
            } else if *m != expected {
                let stray = match mode {
                    Mode::Exact => true,
                    Mode::Float => !c.is_negligible(tol),
                };
                if stray {
                    return Err(Error::ShapeViolation(format!(
                        "component {}: unexpected term {c} at y1-dependent monomial",
                        i + 1
                    )));
                }
            }
        }
        let mut gi = tail.clone();
        gi.add_term(expected, want);
        phi.push(tail);
        field.push(gi);
    }
    Ok(NormalForm {
        n,
        mode,
        exponents: exps,
        phi,
        field,
        transform: l.to_mode(mode),
        inverse,
        cache: Mutex::new(HashMap::new()),
    })
}

impl NormalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `ρ₁ = −1, ρ₂, …, ρₙ`.
    pub fn exponents(&self) -> &[Scalar] {
        &self.exponents
    }

    pub fn exponent_tail(&self) -> &[Scalar] {
        &self.exponents[1..]
    }

    /// `φ₁, …, φₙ`, polynomials in `y₂…yₙ` (stored in all `n` variables).
    pub fn phi(&self) -> &[MultiPoly] {
        &self.phi
    }

    /// The transformed vector field.
    pub fn field(&self) -> &[MultiPoly] {
        &self.field
    }

    pub fn transform(&self) -> &Matrix {
        &self.transform
    }

    pub fn inverse_transform(&self) -> &Matrix {
        &self.inverse
    }

    /// `L g(L⁻¹ x)`: the original field recovered from the normal form.
    pub fn original_fields(&self) -> Result<Vec<MultiPoly>> {
        let subs: Vec<MultiPoly> = self
            .field
            .iter()
            .map(|g| g.substitute_linear(&self.inverse))
            .collect::<Result<_>>()?;
        Ok((0..self.n)
            .map(|i| {
                let mut f = MultiPoly::zero(self.n, self.mode);
                for (j, s) in subs.iter().enumerate() {
                    let c = self.transform.get(i, j);
                    if !c.is_zero() {
                        f = &f + &s.scale(c);
                    }
                }
                f
            })
            .collect())
    }

    /// Applies an operator to a polynomial in `y₁…yₙ`.
    pub fn apply(&self, kind: OperatorKind, p: &MultiPoly) -> Result<MultiPoly> {
        if p.nvars() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.nvars(),
            });
        }
        let p = &p.to_mode(self.mode.join(p.mode()));
        let n = self.n;
        let mode = p.mode();
        Ok(match kind {
            OperatorKind::DMinus => p.partial(0),
            OperatorKind::DPlus => {
                let field: Vec<MultiPoly> = self.field.iter().map(|g| g.to_mode(mode)).collect();
                p.lie_derivative(&field)?
            }
            OperatorKind::APlus => {
                let mut out = MultiPoly::zero(n, mode);
                for k in 1..n {
                    let d = p.partial(k);
                    if !d.is_zero() {
                        out = &out + &(&d * &self.phi[k].to_mode(mode));
                    }
                }
                out
            }
            OperatorKind::AZero | OperatorKind::UTilde | OperatorKind::DZero => {
                let first = if kind == OperatorKind::DZero { 0 } else { 1 };
                let mut out = MultiPoly::zero(n, mode);
                for (m, c) in p.terms() {
                    let mut w = Scalar::zero(mode);
                    for k in first..n {
                        let e = Scalar::from_i64(m.exponent(k) as i64, mode);
                        let r = match kind {
                            OperatorKind::UTilde => Scalar::one(mode),
                            _ => self.exponents[k].to_mode(mode),
                        };
                        w = &w + &(&e * &r);
                    }
                    out.add_term(m.clone(), c * &w);
                }
                out
            }
        })
    }

    /// Domain basis of `kind` in degree `l`, ascending graded-lex.
    pub fn domain_basis(&self, kind: OperatorKind, l: u32) -> Vec<Monomial> {
        if kind.is_tail() {
            monomials_with_support(self.n, l, 1)
        } else {
            monomials_of_degree(self.n, l)
        }
    }

    /// Codomain basis of `kind` applied in degree `l`.
    pub fn codomain_basis(&self, kind: OperatorKind, l: u32) -> Vec<Monomial> {
        let target = l as i64 + kind.degree_shift() as i64;
        if target < 0 {
            return Vec::new();
        }
        self.domain_basis(kind, target as u32)
    }

    /// Matrix of `kind` on degree-`l` polynomials: column `j` holds the
    /// image of the `j`-th domain monomial in codomain coordinates.
    pub fn operator_matrix(&self, kind: OperatorKind, l: u32) -> Result<Matrix> {
        if let Some(m) = self.cache.lock().expect("cache poisoned").get(&(kind, l)) {
            return Ok(m.clone());
        }
        let dom = self.domain_basis(kind, l);
        let cod = self.codomain_basis(kind, l);
        let mut m = Matrix::zeros(cod.len(), dom.len(), self.mode);
        let index: HashMap<&Monomial, usize> = cod.iter().enumerate().map(|(i, b)| (b, i)).collect();
        for (j, mono) in dom.iter().enumerate() {
            let img = self.apply(kind, &MultiPoly::term(mono.clone(), Scalar::one(self.mode)))?;
            for (mi, c) in img.terms() {
                match index.get(mi) {
                    Some(&i) => m.set(i, j, c.clone()),
                    None => {
                        return Err(Error::Verification(format!(
                            "{kind:?} image leaves its codomain in degree {l}"
                        )))
                    }
                }
            }
        }
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert((kind, l), m.clone());
        Ok(m)
    }

    /// `D₊` assembled from its pieces: `(−y₁² + φ₁)∂₁ + y₁(A₀ − Ũ) + A₊`,
    /// where the tail operators act on the `y₂…yₙ` variables of each term.
    pub fn d_plus_from_pieces(&self, p: &MultiPoly) -> Result<MultiPoly> {
        let n = self.n;
        let mode = self.mode.join(p.mode());
        let p = p.to_mode(mode);
        let y1 = MultiPoly::var(n, 0, mode);
        let mut first = self.phi[0].to_mode(mode);
        first.add_term(Monomial::var(n, 0).mul(&Monomial::var(n, 0)), Scalar::from_i64(-1, mode));
        let mut out = &first * &p.partial(0);
        let a0 = self.apply(OperatorKind::AZero, &p)?;
        let u = self.apply(OperatorKind::UTilde, &p)?;
        out = &out + &(&y1 * &(&a0 - &u));
        out = &out + &self.apply(OperatorKind::APlus, &p)?;
        Ok(out)
    }
}
