//! Resonance lattices and the exponent-only necessary conditions for
//! polynomial first integrals and symmetry fields.
//!
//! `J(M)` is the set of non-negative integer vectors `z = (z₂,…,zₙ)` with
//! `z·ρ = M` and `|z| ≤ M`, where `ρ = (ρ₂,…,ρₙ)` are the non-trivial
//! Kovalevskaya exponents of a balance.

use crate::poly::Monomial;
use crate::scalar::Scalar;
use crate::spectral::BalanceData;

/// Tolerance on `|z·ρ − M|` when some exponent is a float.
pub const RES_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceSet {
    pub m: u32,
    /// Sorted by `|z|`, ties ascending in graded-lex order.
    pub members: Vec<Vec<u32>>,
}

impl ResonanceSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, z: &[u32]) -> bool {
        self.members.iter().any(|m| m == z)
    }
}

/// All `z ≥ 0` with `|z| ≤ max_norm` and `z·rho = target`.
///
/// Exact comparison when every input is exact, otherwise `tol`.
pub fn lattice_solutions(rho: &[Scalar], target: &Scalar, max_norm: u32, tol: f64) -> Vec<Vec<u32>> {
    let exact = target.is_exact() && rho.iter().all(Scalar::is_exact);
    let mut out = Vec::new();
    if rho.is_empty() {
        let zero = Scalar::zero(target.mode());
        if hits(&zero, target, exact, tol) {
            out.push(Vec::new());
        }
        return out;
    }
    let mut z = vec![0u32; rho.len()];
    let start = Scalar::zero(target.mode());
    walk(rho, target, exact, tol, 0, max_norm, &start, &mut z, &mut out);
    out.sort_by(|a, b| Monomial::new(a.clone()).cmp(&Monomial::new(b.clone())));
    out
}

fn hits(sum: &Scalar, target: &Scalar, exact: bool, tol: f64) -> bool {
    if exact {
        sum == target
    } else {
        (sum.to_complex() - target.to_complex()).norm() <= tol
    }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    rho: &[Scalar],
    target: &Scalar,
    exact: bool,
    tol: f64,
    pos: usize,
    left: u32,
    partial: &Scalar,
    z: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if pos == rho.len() {
        if hits(partial, target, exact, tol) {
            out.push(z.clone());
        }
        return;
    }
    let mut sum = partial.clone();
    for e in 0..=left {
        z[pos] = e;
        walk(rho, target, exact, tol, pos + 1, left - e, &sum, z, out);
        sum = &sum + &rho[pos];
    }
    z[pos] = 0;
}

pub fn enumerate_jm(rho_tail: &[Scalar], m: u32) -> ResonanceSet {
    enumerate_jm_with_tol(rho_tail, m, RES_TOL)
}

pub fn enumerate_jm_with_tol(rho_tail: &[Scalar], m: u32, tol: f64) -> ResonanceSet {
    let mode = rho_tail.first().map(Scalar::mode).unwrap_or(crate::Mode::Exact);
    let target = Scalar::from_i64(m as i64, mode);
    ResonanceSet {
        m,
        members: lattice_solutions(rho_tail, &target, m, tol),
    }
}

/// Necessary condition for a homogeneous degree-`m` first integral.
pub fn integral_degree_admissible(rho_tail: &[Scalar], m: u32) -> bool {
    !enumerate_jm(rho_tail, m).is_empty()
}

/// Necessary condition for a homogeneous degree-`m + 1` symmetry field:
/// some `k ≥ 0` with `|k| ≤ m + 1` and `k·ρ_tail = m + ρᵢ` for an `i`.
pub fn symmetry_degree_admissible(rho_full: &[Scalar], m: i32) -> bool {
    if m < -1 || rho_full.is_empty() {
        return false;
    }
    let tail = &rho_full[1..];
    let max_norm = (m + 1) as u32;
    rho_full.iter().any(|rho_i| {
        let target = &Scalar::from_i64(m as i64, rho_i.mode()) + rho_i;
        !lattice_solutions(tail, &target, max_norm, RES_TOL).is_empty()
    })
}

/// Degrees `1..=m_max` admissible at every balance.
pub fn admissible_degrees(balances: &[BalanceData], m_max: u32) -> Vec<u32> {
    (1..=m_max)
        .filter(|&m| {
            balances
                .iter()
                .all(|b| integral_degree_admissible(b.exponent_tail(), m))
        })
        .collect()
}

/// Symmetry degrees `-1..=m_max` admissible at every balance.
pub fn admissible_symmetry_degrees(balances: &[BalanceData], m_max: i32) -> Vec<i32> {
    (-1..=m_max)
        .filter(|&m| {
            balances
                .iter()
                .all(|b| symmetry_degree_admissible(&b.exponents, m))
        })
        .collect()
}
