//! Measurement outcomes and the outcome kernel p(O_A, O_B | λ, M_A, M_B).
//!
//! Outcomes given the hidden variables depend on the context only through the
//! induced settings; the kernel therefore stores one exact-rational
//! distribution over the four joint outcomes per (λ, sector).

use crate::exact::{check_distribution, rational_from_str, rational_to_string, ratio};
use crate::scenario::SettingPair;
use crate::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// One wing's outcome, valued ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    fn bit(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

/// A joint outcome (O_A, O_B). Canonical index order:
/// (+1,+1), (+1,−1), (−1,+1), (−1,−1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomePair(pub Outcome, pub Outcome);

impl OutcomePair {
    pub const ALL: [OutcomePair; 4] = [
        OutcomePair(Outcome::Plus, Outcome::Plus),
        OutcomePair(Outcome::Plus, Outcome::Minus),
        OutcomePair(Outcome::Minus, Outcome::Plus),
        OutcomePair(Outcome::Minus, Outcome::Minus),
    ];

    pub fn index(self) -> usize {
        self.0.bit() * 2 + self.1.bit()
    }

    pub fn from_index(i: usize) -> OutcomePair {
        Self::ALL[i]
    }
}

impl fmt::Display for OutcomePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}, {:+})", self.0.value(), self.1.value())
    }
}

/// An exact distribution over the four joint outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeDistribution(pub [BigRational; 4]);

impl OutcomeDistribution {
    pub fn point_mass(pair: OutcomePair) -> Self {
        let mut entries = [
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        ];
        entries[pair.index()] = BigRational::one();
        OutcomeDistribution(entries)
    }

    pub fn probability(&self, pair: OutcomePair) -> &BigRational {
        &self.0[pair.index()]
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        check_distribution(&self.0, what)
    }

    pub fn to_f64(&self) -> [f64; 4] {
        std::array::from_fn(|i| crate::exact::rational_to_f64(&self.0[i]))
    }
}

/// The table p(O_A, O_B | λ, M_A, M_B): `rows[λ][sector]` is a distribution
/// over the four joint outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeKernel {
    rows: Vec<[OutcomeDistribution; 4]>,
}

impl OutcomeKernel {
    pub fn from_rows(rows: Vec<[OutcomeDistribution; 4]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ModelValidation("kernel with no λ values".into()));
        }
        for (lambda, row) in rows.iter().enumerate() {
            for pair in SettingPair::ALL {
                row[pair.index()]
                    .validate(&format!("kernel row λ={lambda}, settings {pair}"))?;
            }
        }
        Ok(Self { rows })
    }

    /// Deterministic kernel: λ value i always produces `outcomes[i]`,
    /// independent of the settings.
    pub fn deterministic(outcomes: &[OutcomePair]) -> Result<Self> {
        let rows = outcomes
            .iter()
            .map(|&o| std::array::from_fn(|_| OutcomeDistribution::point_mass(o)))
            .collect();
        Self::from_rows(rows)
    }

    /// λ-injective readout: λ value i is read out as the i-th joint outcome.
    /// Maximally sensitive to hidden-variables table differences. Λ ≤ 4.
    pub fn injective(lambda_count: usize) -> Result<Self> {
        if lambda_count == 0 || lambda_count > 4 {
            return Err(Error::ModelValidation(format!(
                "injective kernel needs 1 <= lambda_count <= 4, got {lambda_count}"
            )));
        }
        let outcomes: Vec<OutcomePair> = (0..lambda_count).map(OutcomePair::from_index).collect();
        Self::deterministic(&outcomes)
    }

    /// The default demo kernel: Λ=4, λ=(a,b) ∈ {±1}² read out as O_A=a, O_B=b.
    pub fn readout() -> Self {
        Self::injective(4).expect("readout kernel is valid")
    }

    /// Kernel whose outcome distribution does not depend on λ at all
    /// (uniform over the four joint outcomes).
    pub fn constant(lambda_count: usize) -> Result<Self> {
        if lambda_count == 0 {
            return Err(Error::ModelValidation("kernel with no λ values".into()));
        }
        let quarter = OutcomeDistribution(std::array::from_fn(|_| ratio(1, 4)));
        let rows = (0..lambda_count)
            .map(|_| std::array::from_fn(|_| quarter.clone()))
            .collect();
        Self::from_rows(rows)
    }

    pub fn lambda_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, lambda: usize, settings: SettingPair) -> &OutcomeDistribution {
        &self.rows[lambda][settings.index()]
    }

    /// Standalone kernel JSON: `{lambda_count, rows}` with `rows[λ][sector]`
    /// holding four "n/d" outcome probabilities.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&KernelRepr::from(self)).expect("kernel serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: KernelRepr =
            serde_json::from_str(text).map_err(|e| Error::ModelValidation(e.to_string()))?;
        repr.build()
    }

    /// p(o | λ, settings).
    pub fn probability(&self, lambda: usize, settings: SettingPair, pair: OutcomePair) -> &BigRational {
        &self.rows[lambda][settings.index()].0[pair.index()]
    }
}

/// Wire form: rows[λ][sector][outcome] as "n/d" strings; sectors in the
/// canonical order (Mx,Mx), (Mx,Mz), (Mz,Mx), (Mz,Mz).
#[derive(Serialize, Deserialize)]
pub(crate) struct KernelRepr {
    pub lambda_count: usize,
    pub rows: Vec<Vec<Vec<String>>>,
}

impl From<&OutcomeKernel> for KernelRepr {
    fn from(k: &OutcomeKernel) -> Self {
        KernelRepr {
            lambda_count: k.lambda_count(),
            rows: k
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|dist| dist.0.iter().map(rational_to_string).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl KernelRepr {
    pub fn build(&self) -> Result<OutcomeKernel> {
        if self.rows.len() != self.lambda_count {
            return Err(Error::ModelValidation(format!(
                "kernel declares lambda_count={} but has {} rows",
                self.lambda_count,
                self.rows.len()
            )));
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        for (lambda, row) in self.rows.iter().enumerate() {
            if row.len() != 4 {
                return Err(Error::ModelValidation(format!(
                    "kernel row λ={lambda} has {} sectors, expected 4",
                    row.len()
                )));
            }
            let mut sectors = Vec::with_capacity(4);
            for cell in row {
                if cell.len() != 4 {
                    return Err(Error::ModelValidation(format!(
                        "kernel row λ={lambda} has a {}-outcome cell, expected 4",
                        cell.len()
                    )));
                }
                let mut entries = Vec::with_capacity(4);
                for s in cell {
                    entries.push(rational_from_str(s).map_err(Error::ModelValidation)?);
                }
                sectors.push(OutcomeDistribution(
                    entries.try_into().expect("length checked"),
                ));
            }
            rows.push(sectors.try_into().map_err(|_| {
                Error::ModelValidation("kernel row shape".into())
            })?);
        }
        OutcomeKernel::from_rows(rows)
    }
}
