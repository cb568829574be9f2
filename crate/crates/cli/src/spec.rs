//! Input document: a quadratic system and run options.

use std::collections::BTreeMap;

use quadint::{Mode, QuadraticSystem, Scalar};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeOpt {
    Exact,
    Float,
}

impl From<ModeOpt> for Mode {
    fn from(m: ModeOpt) -> Mode {
        match m {
            ModeOpt::Exact => Mode::Exact,
            ModeOpt::Float => Mode::Float,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Text(String),
    Number(f64),
}

impl Coeff {
    fn to_scalar(&self, mode: Mode) -> Result<Scalar, String> {
        match self {
            Coeff::Text(s) => Scalar::parse(s.trim(), mode).map_err(|e| e.to_string()),
            // the shortest round-trip decimal, so 0.1 stays 1/10 in exact mode
            Coeff::Number(x) => match mode {
                Mode::Exact => Scalar::parse(&format!("{x:?}"), mode).map_err(|e| e.to_string()),
                Mode::Float => Ok(Scalar::float(*x)),
            },
        }
    }
}

/// `fᵢ` contains `coeff·xⱼxₖ`; indices are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeOpt>,
    #[serde(default, alias = "M_max", skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dedup_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: usize,
    pub terms: Vec<Term>,
    #[serde(default)]
    pub options: Options,
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<SystemSpec, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Validation(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    /// Spec listing every nonzero monomial coefficient of `sys`.
    pub fn from_system(sys: &QuadraticSystem) -> SystemSpec {
        let n = sys.n();
        let mut terms = Vec::new();
        for (i, f) in sys.fields().iter().enumerate() {
            for (m, c) in f.terms() {
                let vars: Vec<usize> = (0..n)
                    .flat_map(|v| std::iter::repeat_n(v + 1, m.exponent(v) as usize))
                    .collect();
                terms.push(Term {
                    i: i + 1,
                    j: vars[0],
                    k: vars[1],
                    coeff: Coeff::Text(c.to_string()),
                });
            }
        }
        SystemSpec {
            n,
            terms,
            options: Options::default(),
        }
        .canonical()
        .expect("catalog systems are valid")
    }

    fn check(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(CliError::Validation("n must be at least 1".into()));
        }
        for (t, term) in self.terms.iter().enumerate() {
            for (name, v) in [("i", term.i), ("j", term.j), ("k", term.k)] {
                if v == 0 || v > self.n {
                    return Err(CliError::Validation(format!(
                        "terms[{t}].{name} = {v} is outside 1..={}",
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }

    /// Scalar mode of the run: the option if given, exact otherwise.
    pub fn mode(&self) -> Mode {
        self.options.mode.map_or(Mode::Exact, Mode::from)
    }

    /// Sorted terms with `j ≤ k`, duplicates summed and zeros dropped.
    pub fn canonical(&self) -> Result<SystemSpec, CliError> {
        self.check()?;
        let mode = self.mode();
        let mut sums: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        for (t, term) in self.terms.iter().enumerate() {
            let c = term
                .coeff
                .to_scalar(mode)
                .map_err(|e| CliError::Validation(format!("terms[{t}].coeff: {e}")))?;
            let key = (term.i, term.j.min(term.k), term.j.max(term.k));
            let entry = sums.entry(key).or_insert_with(|| Scalar::zero(mode));
            *entry = &*entry + &c;
        }
        let terms = sums
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((i, j, k), c)| Term {
                i,
                j,
                k,
                coeff: match c {
                    Scalar::Float(z) if z.im == 0.0 => Coeff::Number(z.re),
                    c => Coeff::Text(c.to_string()),
                },
            })
            .collect();
        Ok(SystemSpec {
            n: self.n,
            terms,
            options: self.options.clone(),
        })
    }

    pub fn to_system(&self) -> Result<QuadraticSystem, CliError> {
        let canon = self.canonical()?;
        let mode = self.mode();
        let terms: Vec<(usize, usize, usize, Scalar)> = canon
            .terms
            .iter()
            .map(|t| {
                let c = t.coeff.to_scalar(mode).expect("checked by canonical");
                (t.i - 1, t.j - 1, t.k - 1, c)
            })
            .collect();
        let sys = QuadraticSystem::from_monomial_coeffs(self.n, &terms)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(sys.to_mode(mode.join(sys.mode())))
    }
}
