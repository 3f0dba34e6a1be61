//! Sub-ensemble sequence entropy and the spontaneous entropy drop.
//!
//! In a superdeterministic model satisfying constraint (m), every run belongs
//! to the sub-ensemble E = (i, j) of the mechanisms λ is correlated with, and
//! consistency forces E = (γ_A, γ_B): the experimenters' choices always
//! coincide with the sub-ensemble sequence. Over N₀ runs there are
//! W = N^(2N₀) possible sequences; the experimenters' ignorance of the actual
//! one carries Shannon entropy S = −Σ_k p(k) log₂ p(k), which collapses to 0
//! the moment the choices are made. The drop ΔS = −S equals minus the mutual
//! information between the sequence and the choices; for the uniform prior
//! ΔS = −2·N₀·log₂N.
//!
//! Dense priors are materialized only up to W ≤ 2²⁰ entries; uniform and
//! per-run product priors have closed-form entropies at any size.

use crate::models::SuperdetModel;
use crate::par::pairwise_sum;
use crate::scenario::Context;
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest W for which a dense prior vector may be materialized.
pub const DENSE_W_LIMIT: u64 = 1 << 20;

/// Tolerance for Σp(k) = 1 on float-valued priors.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Reference per-run mutual information (bits) between λ and the settings in
/// the most economical single-mechanism superdeterministic model reported in
/// the literature.
pub const MI_REFERENCE_BITS: f64 = 0.08;

/// A sub-ensemble label E = (i, j): λ is correlated with mechanism i at wing
/// A and mechanism j at wing B. 1-based, like γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubEnsemble {
    pub i: u32,
    pub j: u32,
}

impl SubEnsemble {
    pub fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    /// Index in [0, N²), i-major.
    pub fn index(&self, n: u32) -> u64 {
        (self.i as u64 - 1) * n as u64 + (self.j as u64 - 1)
    }

    pub fn from_index(n: u32, index: u64) -> Self {
        Self {
            i: (index / n as u64) as u32 + 1,
            j: (index % n as u64) as u32 + 1,
        }
    }
}

impl fmt::Display for SubEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// A length-N₀ sequence of sub-ensemble labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubEnsembleSequence {
    n: u32,
    entries: Vec<SubEnsemble>,
}

impl SubEnsembleSequence {
    pub fn new(n: u32, entries: Vec<SubEnsemble>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidContext("N must be >= 1".into()));
        }
        for e in &entries {
            if e.i == 0 || e.i > n || e.j == 0 || e.j > n {
                return Err(Error::InvalidContext(format!(
                    "sub-ensemble {e} outside [1, {n}]²"
                )));
            }
        }
        Ok(Self { n, entries })
    }

    pub fn entries(&self) -> &[SubEnsemble] {
        &self.entries
    }

    /// Position of this sequence among all W = N^(2N₀), base-N² big-endian.
    pub fn index(&self) -> u64 {
        let base = (self.n as u64) * (self.n as u64);
        self.entries
            .iter()
            .fold(0, |acc, e| acc * base + e.index(self.n))
    }

    pub fn from_index(n: u32, n0: u64, mut index: u64) -> Result<Self> {
        let base = (n as u64) * (n as u64);
        let mut entries = vec![SubEnsemble::new(1, 1); n0 as usize];
        for slot in entries.iter_mut().rev() {
            *slot = SubEnsemble::from_index(n, index % base);
            index /= base;
        }
        if index != 0 {
            return Err(Error::InvalidContext(
                "sequence index out of range".into(),
            ));
        }
        Self::new(n, entries)
    }
}

/// W = N^(2N₀): the number of sub-ensemble sequences over N₀ runs.
pub fn sequence_count(n: u32, n0: u64) -> BigUint {
    BigUint::from(n).pow(2 * n0)
}

/// Subjective probabilities over the W sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum SequencePrior {
    /// p(k) = 1/W.
    Uniform { n: u32, n0: u64 },
    /// Independent runs: p(k) = Π_r marginal[r][label of run r].
    Product { n: u32, per_run: Vec<Vec<f64>> },
    /// Explicit vector p(k), canonical sequence order; W ≤ 2²⁰ only.
    Dense { n: u32, n0: u64, probs: Vec<f64> },
}

impl SequencePrior {
    pub fn uniform(n: u32, n0: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidContext("N must be >= 1".into()));
        }
        Ok(SequencePrior::Uniform { n, n0 })
    }

    pub fn product(n: u32, per_run: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidContext("N must be >= 1".into()));
        }
        let labels = (n as usize) * (n as usize);
        for (r, row) in per_run.iter().enumerate() {
            if row.len() != labels {
                return Err(Error::InvalidContext(format!(
                    "run {r} marginal has {} entries, expected N²={labels}",
                    row.len()
                )));
            }
            validate_probs(row, &format!("run {r} marginal"))?;
        }
        Ok(SequencePrior::Product { n, per_run })
    }

    pub fn dense(n: u32, n0: u64, probs: Vec<f64>) -> Result<Self> {
        let w = sequence_count(n, n0);
        if w > BigUint::from(DENSE_W_LIMIT) {
            return Err(Error::BudgetExceeded {
                required: w,
                budget: DENSE_W_LIMIT,
            });
        }
        use num_traits::ToPrimitive;
        let w = w.to_u64().expect("within dense limit");
        if probs.len() as u64 != w {
            return Err(Error::InvalidContext(format!(
                "dense prior has {} entries, expected W={w}",
                probs.len()
            )));
        }
        validate_probs(&probs, "dense prior")?;
        Ok(SequencePrior::Dense { n, n0, probs })
    }

    pub fn n0(&self) -> u64 {
        match self {
            SequencePrior::Uniform { n0, .. } | SequencePrior::Dense { n0, .. } => *n0,
            SequencePrior::Product { per_run, .. } => per_run.len() as u64,
        }
    }

    pub fn n(&self) -> u32 {
        match self {
            SequencePrior::Uniform { n, .. }
            | SequencePrior::Product { n, .. }
            | SequencePrior::Dense { n, .. } => *n,
        }
    }
}

fn validate_probs(probs: &[f64], what: &str) -> Result<()> {
    if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::NegativeProbability {
            context: what.to_string(),
        });
    }
    let sum = pairwise_sum(probs);
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::UnnormalizedDistribution {
            context: format!("{what} (sum = {sum})"),
        });
    }
    Ok(())
}

/// S = −Σ_k p(k) log₂ p(k), in bits; 0·log 0 reads as 0.
pub fn sequence_entropy(prior: &SequencePrior) -> f64 {
    match prior {
        SequencePrior::Uniform { n, n0 } => 2.0 * (*n0 as f64) * (*n as f64).log2(),
        SequencePrior::Product { per_run, .. } => {
            per_run.iter().map(|row| dense_entropy_bits(row)).sum()
        }
        SequencePrior::Dense { probs, .. } => dense_entropy_bits(probs),
    }
}

/// Entropy of an explicit probability vector, deterministic pairwise sum.
pub fn dense_entropy_bits(probs: &[f64]) -> f64 {
    -crate::par::pairwise_sum_by(probs.len(), |k| {
        let p = probs[k];
        if p > 0.0 {
            p * p.log2()
        } else {
            0.0
        }
    })
}

/// ΔS = Σ_k p(k) log₂ p(k) = −S: the spontaneous drop once the choices fix
/// the sequence. Always ≤ 0; equals −H(k : {γ_A, γ_B}).
pub fn entropy_drop(prior: &SequencePrior) -> f64 {
    -sequence_entropy(prior)
}

/// Per-run mutual information H(E : γ_A, γ_B) = 2 log₂ N for the uniform prior.
pub fn per_run_mutual_information(n: u32) -> f64 {
    2.0 * (n as f64).log2()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MutualInformationReport {
    pub per_run_bits: f64,
    pub total_bits: f64,
    /// Per-run MI over the 0.08-bit literature reference.
    pub ratio_to_reference: f64,
}

/// Per-run and sequence-level mutual information against the 0.08-bit
/// reference value.
pub fn mutual_information_vs_reference(n: u32, n0: u64) -> MutualInformationReport {
    let per_run_bits = per_run_mutual_information(n);
    MutualInformationReport {
        per_run_bits,
        total_bits: per_run_bits * n0 as f64,
        ratio_to_reference: per_run_bits / MI_REFERENCE_BITS,
    }
}

/// Outcome of a coincidence check over simulated runs.
#[derive(Debug, Clone)]
pub struct CoincidenceReport {
    pub consistent: bool,
    pub violations: Vec<CoincidenceViolation>,
}

#[derive(Debug, Clone)]
pub struct CoincidenceViolation {
    pub run: usize,
    pub expected: SubEnsemble,
    pub found: SubEnsemble,
}

/// Checks the functional relationship E = (γ_A, γ_B) on a list of runs.
/// Defined only for models satisfying constraint (m); otherwise λ is
/// correlated with several mechanisms and sub-ensembles do not exist.
pub fn verify_coincidence(
    model: &SuperdetModel,
    runs: &[(Context, SubEnsemble)],
) -> Result<CoincidenceReport> {
    if !model.check_constraint_m() {
        return Err(Error::SubEnsemblesUndefined);
    }
    let violations: Vec<CoincidenceViolation> = runs
        .iter()
        .enumerate()
        .filter_map(|(run, (context, found))| {
            let expected = SubEnsemble::new(context.gamma_a(), context.gamma_b());
            (*found != expected).then_some(CoincidenceViolation {
                run,
                expected,
                found: *found,
            })
        })
        .collect();
    Ok(CoincidenceReport {
        consistent: violations.is_empty(),
        violations,
    })
}

/// CLI-facing report: {N, N0, W, S_bits, delta_S_bits, per_run_MI_bits,
/// ratio_to_ref}; W as a decimal string.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyWire {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "N0")]
    pub n0: u64,
    #[serde(rename = "W", with = "crate::exact::serde_biguint_dec")]
    pub w: BigUint,
    #[serde(rename = "S_bits")]
    pub s_bits: f64,
    #[serde(rename = "delta_S_bits")]
    pub delta_s_bits: f64,
    #[serde(rename = "per_run_MI_bits")]
    pub per_run_mi_bits: f64,
    pub ratio_to_ref: f64,
}

pub fn entropy_report(prior: &SequencePrior) -> EntropyWire {
    let n = prior.n();
    let n0 = prior.n0();
    let s = sequence_entropy(prior);
    let mi = mutual_information_vs_reference(n, n0);
    EntropyWire {
        n,
        n0,
        w: sequence_count(n, n0),
        s_bits: s,
        delta_s_bits: -s,
        per_run_mi_bits: mi.per_run_bits,
        ratio_to_ref: mi.ratio_to_reference,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::big;
    use crate::kernel::OutcomeKernel;
    use crate::scenario::Setting::{Mx, Mz};
    use crate::simplex::LatticeDistribution;

    fn uniform_dense(n: u32, n0: u64) -> SequencePrior {
        use num_traits::ToPrimitive;
        let w = sequence_count(n, n0).to_u64().unwrap();
        SequencePrior::dense(n, n0, vec![1.0 / w as f64; w as usize]).unwrap()
    }

    #[test]
    fn uniform_entropy_is_log2_w() {
        let p = SequencePrior::uniform(2, 2).unwrap();
        assert_eq!(sequence_entropy(&p), 4.0);
        let p = SequencePrior::uniform(16, 1).unwrap();
        assert_eq!(sequence_entropy(&p), 8.0);
        let p = SequencePrior::uniform(1, 5).unwrap();
        assert_eq!(sequence_entropy(&p), 0.0);
        assert_eq!(entropy_drop(&p), 0.0); // W = 1
    }

    #[test]
    fn point_mass_entropy_is_zero() {
        let mut probs = vec![0.0; 16];
        probs[3] = 1.0;
        let p = SequencePrior::dense(2, 2, probs).unwrap();
        assert_eq!(sequence_entropy(&p), 0.0);
    }

    #[test]
    fn entropy_drop_matches_closed_form_against_dense_oracle() {
        for n in 1..=4u32 {
            for n0 in 1..=3u64 {
                let closed = entropy_drop(&SequencePrior::uniform(n, n0).unwrap());
                let dense = entropy_drop(&uniform_dense(n, n0));
                let expected = -2.0 * n0 as f64 * (n as f64).log2();
                assert!((closed - expected).abs() < 1e-12, "N={n}, N0={n0}");
                assert!((dense - expected).abs() < 1e-12, "N={n}, N0={n0}");
            }
        }
    }

    #[test]
    fn product_prior_entropy_is_additive() {
        // Two independent runs with different per-run marginals (N=2).
        let r0 = vec![0.5, 0.25, 0.125, 0.125];
        let r1 = vec![0.25, 0.25, 0.25, 0.25];
        let product = SequencePrior::product(2, vec![r0.clone(), r1.clone()]).unwrap();
        // Dense materialization of the same prior.
        let mut probs = Vec::with_capacity(16);
        for a in &r0 {
            for b in &r1 {
                probs.push(a * b);
            }
        }
        let dense = SequencePrior::dense(2, 2, probs).unwrap();
        let lhs = sequence_entropy(&product);
        let rhs = sequence_entropy(&dense);
        assert!((lhs - rhs).abs() < 1e-12);
        assert!((lhs - (dense_entropy_bits(&r0) + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn entropy_drop_is_invariant_under_relabeling() {
        // Relabel sub-ensembles by a fixed permutation applied at every run.
        let n = 2u32;
        let n0 = 2u64;
        let probs: Vec<f64> = (0..16).map(|k| (k + 1) as f64 / 136.0).collect();
        let prior = SequencePrior::dense(n, n0, probs.clone()).unwrap();
        let perm = [2u64, 0, 3, 1]; // permutation of the 4 labels
        let mut relabeled = vec![0.0; 16];
        for (k, &p) in probs.iter().enumerate() {
            let seq = SubEnsembleSequence::from_index(n, n0, k as u64).unwrap();
            let entries = seq
                .entries()
                .iter()
                .map(|e| SubEnsemble::from_index(n, perm[e.index(n) as usize]))
                .collect();
            let image = SubEnsembleSequence::new(n, entries).unwrap();
            relabeled[image.index() as usize] = p;
        }
        let relabeled = SequencePrior::dense(n, n0, relabeled).unwrap();
        assert!((entropy_drop(&prior) - entropy_drop(&relabeled)).abs() < 1e-12);
    }

    #[test]
    fn invalid_priors_rejected() {
        assert!(SequencePrior::dense(2, 2, vec![1.0 / 18.0; 18]).is_err()); // wrong length
        assert!(SequencePrior::dense(2, 2, vec![0.9 / 16.0; 16]).is_err()); // unnormalized
        let mut probs = vec![1.0 / 16.0; 16];
        probs[0] = -1.0 / 16.0;
        probs[1] = 3.0 / 16.0;
        assert!(SequencePrior::dense(2, 2, probs).is_err()); // negative
        assert!(matches!(
            SequencePrior::dense(16, 3, vec![]),
            Err(Error::BudgetExceeded { .. })
        )); // W = 16⁶ > 2²⁰
        assert!(SequencePrior::product(2, vec![vec![0.5, 0.5]]).is_err()); // wrong row len
    }

    #[test]
    fn sequence_index_round_trip() {
        let n = 3u32;
        let n0 = 2u64;
        for k in 0..81u64 {
            let seq = SubEnsembleSequence::from_index(n, n0, k).unwrap();
            assert_eq!(seq.index(), k);
        }
        assert!(SubEnsembleSequence::from_index(n, n0, 81).is_err());
        assert_eq!(sequence_count(n, n0), big(81));
    }

    #[test]
    fn mutual_information_examples() {
        let r = mutual_information_vs_reference(16, 1);
        assert_eq!(r.per_run_bits, 8.0);
        assert!((r.ratio_to_reference - 100.0).abs() < 1e-9);
        assert_eq!(mutual_information_vs_reference(1, 5).per_run_bits, 0.0);
        let r = mutual_information_vs_reference(4, 1);
        assert_eq!(r.per_run_bits, 4.0);
        assert!((r.ratio_to_reference - 50.0).abs() < 1e-9);
    }

    fn constrained_model(n: u32) -> SuperdetModel {
        let table = LatticeDistribution::new(vec![1, 1, 1, 1], 4).unwrap();
        SuperdetModel::make_constrained(
            n,
            OutcomeKernel::readout(),
            std::array::from_fn(|_| table.clone()),
        )
        .unwrap()
    }

    #[test]
    fn coincidence_check_accepts_matching_runs() {
        let model = constrained_model(2);
        let c = Context::new(vec![Mx, Mz], vec![Mz, Mx], 2, 1).unwrap();
        let runs = vec![(c.clone(), SubEnsemble::new(2, 1))];
        let report = verify_coincidence(&model, &runs).unwrap();
        assert!(report.consistent);

        let runs = vec![(c, SubEnsemble::new(1, 2))];
        let report = verify_coincidence(&model, &runs).unwrap();
        assert!(!report.consistent);
        assert_eq!(report.violations[0].expected, SubEnsemble::new(2, 1));
    }

    #[test]
    fn coincidence_check_requires_constraint_m() {
        // Perturb one context table so (m) fails.
        let model = constrained_model(2);
        let mut tables = model.tables().to_vec();
        tables[0] = LatticeDistribution::new(vec![4, 0, 0, 0], 4).unwrap();
        let broken = SuperdetModel::new(2, OutcomeKernel::readout(), tables).unwrap();
        assert!(!broken.check_constraint_m());
        match verify_coincidence(&broken, &[]) {
            Err(Error::SubEnsemblesUndefined) => {}
            other => panic!("expected SubEnsemblesUndefined, got {other:?}"),
        }
    }

    #[test]
    fn entropy_wire_has_the_documented_fields() {
        let report = entropy_report(&SequencePrior::uniform(2, 3).unwrap());
        let json = serde_json::to_string(&report).unwrap();
        for field in [
            "\"N\":2",
            "\"N0\":3",
            "\"W\":\"64\"",
            "\"S_bits\":6.0",
            "\"delta_S_bits\":-6.0",
            "\"per_run_MI_bits\":2.0",
            "\"ratio_to_ref\":25.0",
        ] {
            assert!(json.contains(field), "missing {field} in {json}");
        }
    }
}
