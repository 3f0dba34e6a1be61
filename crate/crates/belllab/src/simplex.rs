//! Lattice points of the discretized probability simplex.
//!
//! A hidden-variables distribution over Λ values with resolution L is a
//! vector of Λ nonnegative integer numerators summing to L; the probability
//! of value λ is `numerators[λ]/L` exactly. There are
//! V(Λ, L) = C(L + Λ − 1, Λ − 1) such points.
//!
//! The canonical enumeration order is reverse-lexicographic on the numerator
//! vector, starting at (L, 0, …, 0) and ending at (0, …, 0, L). Ranks are
//! positions in that order; `unrank` lets callers partition the range and
//! enumerate independent chunks in parallel.

use crate::{Error, Result};
use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// One point of the discretized simplex: Λ numerators over a common
/// denominator L, with `sum(numerators) == L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDistribution {
    numerators: Vec<u64>,
    denominator: u64,
}

impl LatticeDistribution {
    pub fn new(numerators: Vec<u64>, denominator: u64) -> Result<Self> {
        if numerators.is_empty() || denominator == 0 {
            return Err(Error::DegenerateSimplex {
                lambda_count: numerators.len(),
                denominator,
            });
        }
        let sum: u64 = numerators.iter().sum();
        if sum != denominator {
            return Err(Error::UnnormalizedLattice {
                sum,
                denominator,
            });
        }
        Ok(Self {
            numerators,
            denominator,
        })
    }

    /// The point (L, 0, …, 0): all mass on the first λ value.
    pub fn first(lambda_count: usize, denominator: u64) -> Result<Self> {
        if lambda_count == 0 || denominator == 0 {
            return Err(Error::DegenerateSimplex {
                lambda_count,
                denominator,
            });
        }
        let mut numerators = vec![0; lambda_count];
        numerators[0] = denominator;
        Ok(Self {
            numerators,
            denominator,
        })
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn lambda_count(&self) -> usize {
        self.numerators.len()
    }

    /// Exact probability of λ value `i`.
    pub fn probability(&self, i: usize) -> num_rational::BigRational {
        crate::exact::ratio(self.numerators[i], self.denominator)
    }
}

/// V(Λ, L) = C(L + Λ − 1, Λ − 1): the number of lattice points.
pub fn count_configurations(lambda_count: usize, denominator: u64) -> Result<BigUint> {
    if lambda_count == 0 || denominator == 0 {
        return Err(Error::DegenerateSimplex {
            lambda_count,
            denominator,
        });
    }
    let n = BigUint::from(denominator) + BigUint::from(lambda_count - 1);
    Ok(binomial(n, BigUint::from(lambda_count - 1)))
}

/// Streaming enumeration of all V(Λ, L) lattice points in canonical order.
/// O(Λ) memory; no list is materialized.
pub fn enumerate_configurations(
    lambda_count: usize,
    denominator: u64,
) -> Result<ConfigurationIter> {
    let first = LatticeDistribution::first(lambda_count, denominator)?;
    Ok(ConfigurationIter {
        next: Some(first.numerators),
        denominator,
    })
}

/// Enumeration resumed from rank `start` (for range-partitioned parallel scans).
pub fn enumerate_from_rank(
    lambda_count: usize,
    denominator: u64,
    start: &BigUint,
) -> Result<ConfigurationIter> {
    let d = unrank(lambda_count, denominator, start)?;
    Ok(ConfigurationIter {
        next: Some(d.numerators),
        denominator,
    })
}

pub struct ConfigurationIter {
    next: Option<Vec<u64>>,
    denominator: u64,
}

impl Iterator for ConfigurationIter {
    type Item = LatticeDistribution;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        self.next = successor(&current);
        Some(LatticeDistribution {
            numerators: current,
            denominator: self.denominator,
        })
    }
}

/// Successor in reverse-lexicographic order, or None after (0, …, 0, L).
/// Decrement the rightmost movable slot and gather everything to its right
/// (plus the moved unit) into the next slot.
fn successor(c: &[u64]) -> Option<Vec<u64>> {
    let k = c.len();
    let j = (0..k - 1).rev().find(|&j| c[j] > 0)?;
    let mut next = c.to_vec();
    let tail: u64 = c[j + 1..].iter().sum();
    next[j] -= 1;
    next[j + 1..].iter_mut().for_each(|x| *x = 0);
    next[j + 1] = tail + 1;
    Some(next)
}

/// Position of `d` in the canonical order, in [0, V).
pub fn rank(d: &LatticeDistribution) -> BigUint {
    let k = d.numerators.len();
    let mut r = BigUint::zero();
    let mut rem = d.denominator;
    for (i, &v) in d.numerators.iter().enumerate() {
        // Points that agree on the prefix and carry more mass at slot i come
        // first; their count telescopes to one binomial via the hockey stick.
        if rem > v {
            let parts = (k - i - 1) as u64;
            r += binomial(
                BigUint::from(rem - v - 1 + parts),
                BigUint::from(parts),
            );
        }
        rem -= v;
    }
    r
}

/// Inverse of [`rank`]: the lattice point at position `r`.
pub fn unrank(lambda_count: usize, denominator: u64, r: &BigUint) -> Result<LatticeDistribution> {
    let total = count_configurations(lambda_count, denominator)?;
    if r >= &total {
        return Err(Error::RankOutOfRange {
            lambda_count,
            denominator,
            rank: r.clone(),
            total,
        });
    }
    let mut r = r.clone();
    let mut rem = denominator;
    let mut numerators = vec![0u64; lambda_count];
    for (i, slot) in numerators.iter_mut().enumerate() {
        let parts = (lambda_count - i - 1) as u64;
        if parts == 0 {
            *slot = rem;
            break;
        }
        // Largest value first: skip whole blocks of completions.
        let mut v = rem;
        loop {
            let block = binomial(BigUint::from(rem - v + parts - 1), BigUint::from(parts - 1));
            if r < block {
                *slot = v;
                rem -= v;
                break;
            }
            r -= block;
            v -= 1;
        }
    }
    Ok(LatticeDistribution {
        numerators,
        denominator,
    })
}

/// `count_configurations` result as u64, or a budget error. Guards every
/// enumeration loop whose cost is proportional to V.
pub fn count_within_budget(lambda_count: usize, denominator: u64, budget: u64) -> Result<u64> {
    let v = count_configurations(lambda_count, denominator)?;
    match v.to_u64() {
        Some(v) if v <= budget => Ok(v),
        _ => Err(Error::BudgetExceeded {
            required: v,
            budget,
        }),
    }
}
