//! Output document.

use quadint::base_functions::{BaseSpace, Origin};
use quadint::planar::{DegreeVerdict, VerdictSource};
use quadint::{BalanceData, Matrix, Mode, MultiPoly, QuadraticSystem, Scalar};
use serde::Serialize;

use crate::spec::SystemSpec;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub spec: SystemSpec,
    pub settings: Settings,
    pub fields: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub balances: Vec<BalanceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible_degrees: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_degrees: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub degrees: Vec<DegreeReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cross_check: Vec<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planar: Option<PlanarSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub mode: String,
    pub max_degree: u32,
    pub seed: u64,
    pub starts: usize,
    pub residual_tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub c: Vec<String>,
    pub k: Vec<Vec<String>>,
    pub exponents: Vec<String>,
    pub diagonalizable: bool,
    pub mode: String,
    /// `‖K·c + c‖∞`.
    pub fixed_point_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub polynomial: String,
    /// The Lie derivative along the system vanishes.
    pub verified: bool,
    pub mode: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub seed: Vec<u32>,
    pub level: u32,
    pub monomial: Vec<u32>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub m: u32,
    pub resonance: Vec<Vec<u32>>,
    pub dimension: usize,
    pub base_functions: Vec<String>,
    pub obstructions: Vec<ObstructionReport>,
    pub integrals: Vec<IntegralReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub m: u32,
    pub pipeline_dimension: usize,
    pub oracle_dimension: usize,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanarSection {
    pub rho1: String,
    pub rho2: String,
    pub c1: Vec<String>,
    pub c2: Vec<String>,
    pub p_form: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    pub extra_balances: usize,
    pub period: Option<u64>,
    pub verdicts: Vec<PlanarVerdictReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanarVerdictReport {
    pub m: u32,
    pub classified: bool,
    pub admissible: bool,
    pub consistent: bool,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral: Option<IntegralReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSection {
    pub integrals: Vec<OracleDegree>,
    pub symmetry_fields: Vec<SymmetryDegree>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleDegree {
    pub m: u32,
    pub skipped: bool,
    pub dimension: Option<usize>,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryDegree {
    pub m: i32,
    pub admissible: bool,
    pub skipped: bool,
    pub dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contains_field: Option<bool>,
    pub quotient_dimension: Option<usize>,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySection {
    pub polynomial: String,
    pub lie_derivative_zero: bool,
    pub mode: String,
    pub x0: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub max_drift: f64,
    pub steps: usize,
    pub t_reached: f64,
    pub partial: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

pub fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

pub fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| strings(r)).collect()
}

pub fn balance_report(b: &BalanceData) -> BalanceReport {
    BalanceReport {
        c: strings(&b.c),
        k: matrix_strings(&b.k),
        exponents: strings(&b.exponents),
        diagonalizable: b.diagonalizable,
        mode: b.mode().to_string(),
        fixed_point_defect: b.lemma1_defect(),
    }
}

/// Relative tolerance on a float Lie derivative.
const VERIFY_TOL: f64 = 1e-9;

pub fn integral_report(sys: &QuadraticSystem, f: &MultiPoly) -> IntegralReport {
    let verified = match f.lie_derivative(sys.fields()) {
        Ok(d) => match d.mode() {
            Mode::Exact => d.is_zero(),
            Mode::Float => d.max_coeff_norm() <= VERIFY_TOL * f.max_coeff_norm().max(1.0),
        },
        Err(_) => false,
    };
    IntegralReport {
        polynomial: f.to_string(),
        verified,
        mode: f.mode().to_string(),
    }
}

pub fn degree_report(space: &BaseSpace, integrals: Vec<IntegralReport>) -> DegreeReport {
    DegreeReport {
        m: space.m,
        resonance: space.resonance.members.clone(),
        dimension: space.dimension(),
        base_functions: space
            .basis
            .iter()
            .map(|b| match &b.origin {
                Origin::Seed(z) => format!("seed {z:?}"),
                Origin::Combination(parts) => {
                    let terms: Vec<String> = parts.iter().map(|(z, c)| format!("{c}*{z:?}")).collect();
                    format!("combination {}", terms.join(" + "))
                }
            })
            .collect(),
        obstructions: space
            .obstructed
            .iter()
            .map(|o| ObstructionReport {
                seed: o.seed.clone(),
                level: o.level,
                monomial: o.monomial.clone(),
                value: o.value.to_string(),
            })
            .collect(),
        integrals,
    }
}

pub fn planar_verdict_report(sys: &QuadraticSystem, v: &DegreeVerdict) -> PlanarVerdictReport {
    PlanarVerdictReport {
        m: v.m,
        classified: v.classified,
        admissible: v.admissible,
        consistent: v.consistent(),
        source: match v.source {
            VerdictSource::BaseFunction => "base function",
            VerdictSource::NoResonance => "no resonance",
            VerdictSource::Oracle => "oracle",
        }
        .to_string(),
        k: v.k,
        alpha: strings(&v.alpha),
        delta: v.delta.as_ref().map(Scalar::to_string),
        delta_formula: v.delta_formula.as_ref().map(Scalar::to_string),
        integral: v.integral.as_ref().map(|f| integral_report(sys, f)),
    }
}
