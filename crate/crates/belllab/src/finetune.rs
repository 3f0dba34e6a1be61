//! The overhead fine-tuning parameter F.
//!
//! A model's Ω hidden-variables distributions range over V(Λ, L) lattice
//! configurations each, for V^Ω joint configurations in total. Requiring the
//! measurement statistics to depend only on the settings cuts this to N_f,
//! and F = 1 − N_f / V^Ω.
//!
//! Two models are counted here. The literature-style constrained model keeps
//! one free table per sector, N_f = V⁴, so F = 1 − V^(4−Ω) in closed form.
//! The general model is constrained only by same-sector statistic equality:
//! with v_j the number of configurations whose statistics match configuration
//! j under the sector's kernel, each sector contributes Σ_j v_j^(Ω/4 − 1),
//! and N_f is the product over the four sectors.
//!
//! All counts are exact big integers. 1−F underflows any float for realistic
//! Ω, so reports always carry log10(1−F) and keep the exact rational F only
//! while the decimal representation stays under [`EXACT_DIGIT_BUDGET`] digits.

use crate::exact::{log10_biguint, serde_biguint_dec, serde_opt_biguint_dec};
use crate::kernel::OutcomeKernel;
use crate::models::SectorWeights;
use crate::scenario::{context_count, SettingPair};
use crate::simplex::{
    count_configurations, count_within_budget, enumerate_from_rank, LatticeDistribution,
};
use crate::{par, Error, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Default cap on the number of lattice configurations a brute-force count
/// may enumerate.
pub const DEFAULT_CONFIG_BUDGET: u64 = 1_000_000;

/// Exact big-rational results are kept while their decimal form stays under
/// this many digits; beyond it only log10(1−F) is reported.
pub const EXACT_DIGIT_BUDGET: f64 = 10_000.0;

/// Work unit for parallel scans over the configuration stream.
const SCAN_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FineTuneMode {
    #[serde(rename = "constrained-closed-form")]
    ConstrainedClosedForm,
    #[serde(rename = "general-bruteforce")]
    GeneralBruteForce,
}

/// Result of a fine-tuning computation. `f_exact` and `n_f` are populated
/// when they fit the digit budget; `log10_one_minus_f` is always present
/// (0 means F = 0, −∞ means complete fine-tuning beyond float range).
#[derive(Debug, Clone)]
pub struct FineTuningReport {
    pub mode: FineTuneMode,
    pub n: u32,
    pub lambda_count: usize,
    pub l: u64,
    pub omega: BigUint,
    pub v_total: BigUint,
    pub n_f: Option<BigUint>,
    pub f_exact: Option<BigRational>,
    pub log10_one_minus_f: f64,
}

impl FineTuningReport {
    pub fn to_wire(&self) -> FineTuningWire {
        FineTuningWire {
            mode: self.mode,
            n: self.n,
            lambda_count: self.lambda_count,
            l: self.l,
            omega: self.omega.clone(),
            v: self.v_total.clone(),
            n_f: self.n_f.clone(),
            log10_one_minus_f: self.log10_one_minus_f,
        }
    }
}

/// Wire form: {mode, N, lambda_count, L, omega, v, n_f, log10_one_minus_F},
/// big integers as decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FineTuningWire {
    pub mode: FineTuneMode,
    #[serde(rename = "N")]
    pub n: u32,
    pub lambda_count: usize,
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(with = "serde_biguint_dec")]
    pub omega: BigUint,
    #[serde(with = "serde_biguint_dec")]
    pub v: BigUint,
    #[serde(with = "serde_opt_biguint_dec")]
    pub n_f: Option<BigUint>,
    #[serde(rename = "log10_one_minus_F")]
    pub log10_one_minus_f: f64,
}

// ---------------------------------------------------------------------------
// Constrained (literature-style) model: closed form
// ---------------------------------------------------------------------------

/// F for the constrained model: N_f = V⁴ and F = 1 − V^(4−Ω).
/// F = 0 exactly when N = 1 (or when V = 1, a one-point simplex).
pub fn f_constrained(n: u32, lambda_count: usize, l: u64) -> Result<FineTuningReport> {
    if n == 0 {
        return Err(Error::InvalidContext("N must be >= 1".into()));
    }
    let v = count_configurations(lambda_count, l)?;
    let omega = context_count(n)?;
    let log10_v = log10_biguint(&v);

    let n_f = if 4.0 * log10_v < EXACT_DIGIT_BUDGET {
        Some(v.clone().pow(4u32))
    } else {
        None
    };

    let (f_exact, log10_one_minus_f) = if n == 1 || v.is_one() {
        (Some(BigRational::zero()), 0.0)
    } else {
        let exponent = &omega - 4u32; // Ω > 4 here since N > 1
        let exact_digits = omega.to_f64().map(|o| (o - 4.0) * log10_v);
        match (exponent.to_u64(), exact_digits) {
            (Some(e), Some(d)) if d < EXACT_DIGIT_BUDGET => {
                // F = (V^(Ω−4) − 1) / V^(Ω−4).
                let denom = v.clone().pow(e);
                let log = -log10_biguint(&denom);
                let f = BigRational::new((&denom - 1u32).into(), denom.into());
                (Some(f), log)
            }
            _ => {
                let omega_f = omega.to_f64().unwrap_or(f64::INFINITY);
                (None, -(omega_f - 4.0) * log10_v)
            }
        }
    };

    Ok(FineTuningReport {
        mode: FineTuneMode::ConstrainedClosedForm,
        n,
        lambda_count,
        l,
        omega,
        v_total: v,
        n_f,
        f_exact,
        log10_one_minus_f,
    })
}

// ---------------------------------------------------------------------------
// General model: brute-force configuration counting
// ---------------------------------------------------------------------------

/// v^j for a single unconstrained configuration: the number of lattice
/// configurations whose outcome statistics under this sector's kernel equal
/// configuration j's, for all four outcome pairs. Direct scan of the stream.
pub fn count_vj(
    kernel: &OutcomeKernel,
    sector: SettingPair,
    config: &LatticeDistribution,
) -> Result<BigUint> {
    if kernel.lambda_count() != config.lambda_count() {
        return Err(Error::LambdaMismatch {
            kernel: kernel.lambda_count(),
            table: config.lambda_count(),
        });
    }
    let lambda_count = config.lambda_count();
    let l = config.denominator();
    let v = count_within_budget(lambda_count, l, u64::MAX)?;
    let weights = SectorWeights::new(kernel, sector);
    let target = weights.signature(config.numerators());

    let chunks = v.div_ceil(SCAN_CHUNK) as usize;
    let partial = par::map_indexed(chunks, |b| {
        let start = b as u64 * SCAN_CHUNK;
        let len = SCAN_CHUNK.min(v - start);
        enumerate_from_rank(lambda_count, l, &start.into())
            .expect("rank in range")
            .take(len as usize)
            .filter(|d| weights.signature(d.numerators()) == target)
            .count() as u64
    });
    Ok(BigUint::from(partial.iter().sum::<u64>()))
}

/// v^j for every configuration j of one sector, in canonical j order.
/// Configurations are grouped by their exact statistic signature, so v_j is
/// the size of j's equivalence class; cost is one signature per point.
pub fn sector_config_counts(
    kernel: &OutcomeKernel,
    sector: SettingPair,
    lambda_count: usize,
    l: u64,
    budget: u64,
) -> Result<Vec<u64>> {
    sector_counts_impl(kernel, sector, lambda_count, l, budget, false)
}

/// Sequential twin of [`sector_config_counts`] (bench baseline).
pub fn sector_config_counts_seq(
    kernel: &OutcomeKernel,
    sector: SettingPair,
    lambda_count: usize,
    l: u64,
    budget: u64,
) -> Result<Vec<u64>> {
    sector_counts_impl(kernel, sector, lambda_count, l, budget, true)
}

fn sector_counts_impl(
    kernel: &OutcomeKernel,
    sector: SettingPair,
    lambda_count: usize,
    l: u64,
    budget: u64,
    sequential: bool,
) -> Result<Vec<u64>> {
    if kernel.lambda_count() != lambda_count {
        return Err(Error::LambdaMismatch {
            kernel: kernel.lambda_count(),
            table: lambda_count,
        });
    }
    let v = count_within_budget(lambda_count, l, budget)?;
    let weights = SectorWeights::new(kernel, sector);

    let chunks = v.div_ceil(SCAN_CHUNK) as usize;
    let compute = |b: usize| -> Vec<[BigUint; 4]> {
        let start = b as u64 * SCAN_CHUNK;
        let len = SCAN_CHUNK.min(v - start);
        enumerate_from_rank(lambda_count, l, &start.into())
            .expect("rank in range")
            .take(len as usize)
            .map(|d| weights.signature(d.numerators()))
            .collect()
    };
    let sig_chunks = if sequential {
        par::map_indexed_seq(chunks, compute)
    } else {
        par::map_indexed(chunks, compute)
    };
    let signatures: Vec<[BigUint; 4]> = sig_chunks.into_iter().flatten().collect();

    let mut class_size: HashMap<&[BigUint; 4], u64> = HashMap::new();
    for sig in &signatures {
        *class_size.entry(sig).or_insert(0) += 1;
    }
    Ok(signatures.iter().map(|sig| class_size[sig]).collect())
}

/// F for the general model, counting every sector's admissible
/// configurations by brute force: N_f = Π_sectors Σ_j v_j^(Ω/4 − 1).
pub fn f_general(
    kernel: &OutcomeKernel,
    n: u32,
    lambda_count: usize,
    l: u64,
    budget: u64,
) -> Result<FineTuningReport> {
    let profile = SectorProfile::compute(kernel, lambda_count, l, budget)?;
    profile.report(n)
}

/// log10(1−F) for the general model across several N. The per-sector counts
/// do not depend on N, so they are computed once and reused.
pub fn f_general_limit_study(
    kernel: &OutcomeKernel,
    lambda_count: usize,
    l: u64,
    n_list: &[u32],
    budget: u64,
) -> Result<Vec<LimitStudyRow>> {
    let profile = SectorProfile::compute(kernel, lambda_count, l, budget)?;
    n_list
        .iter()
        .map(|&n| {
            let report = profile.report(n)?;
            Ok(LimitStudyRow {
                n,
                log10_one_minus_f: report.log10_one_minus_f,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LimitStudyRow {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "log10_one_minus_F")]
    pub log10_one_minus_f: f64,
}

/// Per-sector v_j vectors for one (kernel, Λ, L); N-independent.
pub struct SectorProfile {
    lambda_count: usize,
    l: u64,
    v_total: BigUint,
    counts: [Vec<u64>; 4],
}

impl SectorProfile {
    pub fn compute(
        kernel: &OutcomeKernel,
        lambda_count: usize,
        l: u64,
        budget: u64,
    ) -> Result<Self> {
        let v_total = count_configurations(lambda_count, l)?;
        let counts_vec: Vec<Vec<u64>> = SettingPair::ALL
            .iter()
            .map(|&pair| sector_config_counts(kernel, pair, lambda_count, l, budget))
            .collect::<Result<_>>()?;
        let counts: [Vec<u64>; 4] = counts_vec.try_into().expect("four sectors");
        Ok(Self {
            lambda_count,
            l,
            v_total,
            counts,
        })
    }

    pub fn counts(&self, sector: SettingPair) -> &[u64] {
        &self.counts[sector.index()]
    }

    pub fn report(&self, n: u32) -> Result<FineTuningReport> {
        if n == 0 {
            return Err(Error::InvalidContext("N must be >= 1".into()));
        }
        let omega = context_count(n)?;
        if self.v_total.is_one() {
            // One-point simplex: every distribution is pinned; nothing to tune.
            return Ok(FineTuningReport {
                mode: FineTuneMode::GeneralBruteForce,
                n,
                lambda_count: self.lambda_count,
                l: self.l,
                omega,
                v_total: self.v_total.clone(),
                n_f: Some(BigUint::one()),
                f_exact: Some(BigRational::zero()),
                log10_one_minus_f: 0.0,
            });
        }
        let log10_v = log10_biguint(&self.v_total);
        let omega_f = omega.to_f64().unwrap_or(f64::INFINITY);
        // Each sector constrains m = Ω/4 − 1 peer distributions.
        let m_exact = (&omega / 4u32 - 1u32).to_u64();
        let m_f = omega_f / 4.0 - 1.0;

        let v_u64 = self.v_total.to_u64().expect("counted within a u64 budget");
        let log10_one_minus_f = if omega_f.is_finite() {
            let log10_n_f: f64 = self
                .counts
                .iter()
                .map(|c| log10_power_sum(c, m_f))
                .sum();
            log10_n_f - omega_f * log10_v
        } else if self.counts.iter().all(|c| c.iter().all(|&v| v == v_u64)) {
            // No constraint binds at any Ω: F stays 0.
            0.0
        } else {
            f64::NEG_INFINITY
        };

        // Exact path while V^Ω stays printable.
        let (n_f, f_exact) = match m_exact {
            Some(m) if omega_f * log10_v < EXACT_DIGIT_BUDGET => {
                let n_f: BigUint = self
                    .counts
                    .iter()
                    .map(|c| exact_power_sum(c, m))
                    .product();
                let denom = self
                    .v_total
                    .clone()
                    .pow(omega.to_u64().expect("printable Ω fits u64"));
                let f = BigRational::one()
                    - BigRational::new(n_f.clone().into(), denom.into());
                (Some(n_f), Some(f))
            }
            _ => (None, None),
        };

        Ok(FineTuningReport {
            mode: FineTuneMode::GeneralBruteForce,
            n,
            lambda_count: self.lambda_count,
            l: self.l,
            omega,
            v_total: self.v_total.clone(),
            n_f,
            f_exact,
            log10_one_minus_f,
        })
    }
}

/// log10 Σ_j v_j^m via a stable log-sum-exp in base 10 (all v_j ≥ 1).
fn log10_power_sum(counts: &[u64], m: f64) -> f64 {
    let logs: Vec<f64> = counts.iter().map(|&v| m * (v as f64).log10()).collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|&lg| 10f64.powf(lg - max)).sum();
    max + sum.log10()
}

fn exact_power_sum(counts: &[u64], m: u64) -> BigUint {
    counts
        .iter()
        .map(|&v| BigUint::from(v).pow(m))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{big, ratio};
    use crate::simplex::enumerate_configurations;

    fn lattice(nums: &[u64], l: u64) -> LatticeDistribution {
        LatticeDistribution::new(nums.to_vec(), l).unwrap()
    }

    const SECTOR: SettingPair = SettingPair::ALL[0];

    #[test]
    fn constrained_n1_has_no_fine_tuning() {
        for lambda_count in 1..=5 {
            for l in 1..=5 {
                let r = f_constrained(1, lambda_count, l).unwrap();
                assert_eq!(r.f_exact, Some(BigRational::zero()));
                assert_eq!(r.log10_one_minus_f, 0.0);
                assert_eq!(r.omega, big(4));
            }
        }
    }

    #[test]
    fn constrained_closed_form_small_case() {
        // N=2, Λ=2, L=2: V=3, Ω=64, F = 1 − 3^(−60).
        let r = f_constrained(2, 2, 2).unwrap();
        assert_eq!(r.v_total, big(3));
        assert_eq!(r.omega, big(64));
        assert_eq!(r.n_f, Some(big(81)));
        let denom = big(3).pow(60u32);
        let expected = BigRational::one() - BigRational::new(1.into(), denom.into());
        assert_eq!(r.f_exact, Some(expected));
        let want = -60.0 * 3f64.log10();
        assert!((r.log10_one_minus_f - want).abs() < 1e-9);
    }

    #[test]
    fn constrained_tends_to_complete_tuning_in_lambda() {
        // Fixed N=2, L=2: log10(1−F) strictly decreases as Λ grows.
        let logs: Vec<f64> = (2..8)
            .map(|lc| f_constrained(2, lc, 2).unwrap().log10_one_minus_f)
            .collect();
        for w in logs.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn count_vj_injective_kernel_isolates_configs() {
        let kernel = OutcomeKernel::injective(2).unwrap();
        assert_eq!(
            count_vj(&kernel, SECTOR, &lattice(&[1, 0], 1)).unwrap(),
            big(1)
        );
        assert_eq!(
            count_vj(&kernel, SECTOR, &lattice(&[1, 1], 2)).unwrap(),
            big(1)
        );
    }

    #[test]
    fn count_vj_constant_kernel_accepts_everything() {
        let kernel = OutcomeKernel::constant(2).unwrap();
        for l in 1..=4 {
            let v = count_configurations(2, l).unwrap();
            for config in enumerate_configurations(2, l).unwrap() {
                assert_eq!(count_vj(&kernel, SECTOR, &config).unwrap(), v);
            }
        }
    }

    #[test]
    fn count_vj_rejects_lambda_mismatch() {
        let kernel = OutcomeKernel::injective(3).unwrap();
        assert!(count_vj(&kernel, SECTOR, &lattice(&[1, 0], 1)).is_err());
    }

    #[test]
    fn sector_counts_match_per_config_counts() {
        // Mixed kernel: λ=0 and λ=1 share a readout, λ=2 is distinct, so some
        // classes have more than one member.
        let kernel = OutcomeKernel::deterministic(&[
            crate::kernel::OutcomePair::from_index(0),
            crate::kernel::OutcomePair::from_index(0),
            crate::kernel::OutcomePair::from_index(3),
        ])
        .unwrap();
        let counts = sector_config_counts(&kernel, SECTOR, 3, 3, 1_000).unwrap();
        let by_scan: Vec<u64> = enumerate_configurations(3, 3)
            .unwrap()
            .map(|d| {
                count_vj(&kernel, SECTOR, &d)
                    .unwrap()
                    .to_u64()
                    .unwrap()
            })
            .collect();
        assert_eq!(counts, by_scan);
        assert!(counts.iter().any(|&v| v > 1));
        // Σ_j v_j ≥ V, equality iff all v_j = 1.
        let v = counts.len() as u64;
        assert!(counts.iter().sum::<u64>() >= v);
        let injective = OutcomeKernel::injective(3).unwrap();
        let iso = sector_config_counts(&injective, SECTOR, 3, 3, 1_000).unwrap();
        assert_eq!(iso.iter().sum::<u64>(), iso.len() as u64);
        assert!(iso.iter().all(|&v| v == 1));
    }

    #[test]
    fn sector_counts_seq_matches_parallel() {
        let kernel = OutcomeKernel::readout();
        let a = sector_config_counts(&kernel, SECTOR, 4, 8, 100_000).unwrap();
        let b = sector_config_counts_seq(&kernel, SECTOR, 4, 8, 100_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn general_f_n1_is_zero() {
        let kernel = OutcomeKernel::injective(2).unwrap();
        let r = f_general(&kernel, 1, 2, 2, 1_000).unwrap();
        assert_eq!(r.f_exact, Some(BigRational::zero()));
        assert_eq!(r.n_f, Some(big(81))); // V⁴ with V = 3
    }

    #[test]
    fn general_f_constant_kernel_is_zero() {
        for n in 1..=3 {
            let kernel = OutcomeKernel::constant(2).unwrap();
            let r = f_general(&kernel, n, 2, 1, 1_000).unwrap();
            assert_eq!(r.f_exact, Some(BigRational::zero()), "N={n}");
        }
    }

    #[test]
    fn general_f_injective_small_case() {
        // Λ=2, L=1, injective, N=2: per sector Σ_j v_j^15 = 2, N_f = 2⁴ = 16,
        // F = 1 − 16/2^64.
        let kernel = OutcomeKernel::injective(2).unwrap();
        let r = f_general(&kernel, 2, 2, 1, 1_000).unwrap();
        assert_eq!(r.n_f, Some(big(16)));
        let denom = big(2).pow(64u32);
        let expected = BigRational::one() - BigRational::new(big(16).into(), denom.into());
        assert_eq!(r.f_exact, Some(expected));
        let want = 16f64.log10() - 64.0 * 2f64.log10();
        assert!((r.log10_one_minus_f - want).abs() < 1e-9);
    }

    #[test]
    fn limit_study_strictly_decreases_for_injective_kernel() {
        let kernel = OutcomeKernel::injective(2).unwrap();
        let rows = f_general_limit_study(&kernel, 2, 1, &[2, 3, 4], 1_000).unwrap();
        assert_eq!(rows.len(), 3);
        for w in rows.windows(2) {
            assert!(w[1].log10_one_minus_f < w[0].log10_one_minus_f);
        }
        // Constant kernel: flat at zero.
        let kernel = OutcomeKernel::constant(2).unwrap();
        let rows = f_general_limit_study(&kernel, 2, 1, &[1, 2, 3], 1_000).unwrap();
        for row in rows {
            assert!(row.log10_one_minus_f.abs() < 1e-9);
        }
        // Far beyond float range (Ω overflows f64) the report degrades to the
        // correct limit instead of NaN.
        let injective = OutcomeKernel::injective(2).unwrap();
        let rows = f_general_limit_study(&injective, 2, 1, &[600], 1_000).unwrap();
        assert_eq!(rows[0].log10_one_minus_f, f64::NEG_INFINITY);
        let rows = f_general_limit_study(&kernel, 2, 1, &[600], 1_000).unwrap();
        assert_eq!(rows[0].log10_one_minus_f, 0.0);
    }

    #[test]
    fn general_f_between_zero_and_one_for_mixed_kernel() {
        // Kernel with 1 ≤ v_j < V for some j: two λ values share a readout.
        let kernel = OutcomeKernel::deterministic(&[
            crate::kernel::OutcomePair::from_index(0),
            crate::kernel::OutcomePair::from_index(0),
            crate::kernel::OutcomePair::from_index(1),
        ])
        .unwrap();
        for n in 2..=3u32 {
            let r = f_general(&kernel, n, 3, 2, 1_000).unwrap();
            let f = r.f_exact.clone().unwrap();
            assert!(f > BigRational::zero(), "N={n}");
            assert!(f < BigRational::one(), "N={n}");
            // The constrained model is at least as fine-tuned.
            let con = f_constrained(n, 3, 2).unwrap();
            assert!(con.f_exact.unwrap() >= f);
        }
    }

    #[test]
    fn reported_f_always_lies_in_unit_interval() {
        let kernels = [
            OutcomeKernel::injective(3).unwrap(),
            OutcomeKernel::constant(3).unwrap(),
            OutcomeKernel::deterministic(&[
                crate::kernel::OutcomePair::from_index(0),
                crate::kernel::OutcomePair::from_index(0),
                crate::kernel::OutcomePair::from_index(2),
            ])
            .unwrap(),
        ];
        for n in 1..=3u32 {
            for l in 1..=3u64 {
                let con = f_constrained(n, 3, l).unwrap();
                assert!(con.log10_one_minus_f <= 0.0);
                if let Some(f) = &con.f_exact {
                    assert!(*f >= BigRational::zero() && *f < BigRational::one());
                }
                for kernel in &kernels {
                    let gen = f_general(kernel, n, 3, l, 10_000).unwrap();
                    assert!(gen.log10_one_minus_f <= 1e-12);
                    let f = gen.f_exact.expect("small cases stay exact");
                    assert!(f >= BigRational::zero() && f < BigRational::one());
                }
            }
        }
    }

    #[test]
    fn budget_refusal_carries_work_estimate() {
        let kernel = OutcomeKernel::readout();
        match f_general(&kernel, 2, 4, 100, 10) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, count_configurations(4, 100).unwrap());
                assert_eq!(budget, 10);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn wire_format_round_trip() {
        let r = f_constrained(2, 2, 2).unwrap();
        let json = serde_json::to_string(&r.to_wire()).unwrap();
        assert!(json.contains("\"mode\":\"constrained-closed-form\""));
        assert!(json.contains("\"omega\":\"64\""));
        let back: FineTuningWire = serde_json::from_str(&json).unwrap();
        assert_eq!(back.n_f, Some(big(81)));
        assert_eq!(back.v, big(3));

        // F drops to log-space past the digit budget: V(80,80) ≈ 10^46.5, so
        // V^(Ω−4) has ~26,600 digits at N=3, while n_f = V⁴ stays printable.
        let r = f_constrained(3, 80, 80).unwrap();
        assert!(r.f_exact.is_none());
        assert!(r.n_f.is_some());
        assert!(r.log10_one_minus_f < -20_000.0);

        // n_f itself goes to null once V⁴ exceeds the budget:
        // V(4200, 4200) ≈ 10^2528, so V⁴ has ~10,100 digits.
        let r = f_constrained(2, 4200, 4200).unwrap();
        assert!(r.n_f.is_none());
        let json = serde_json::to_string(&r.to_wire()).unwrap();
        assert!(json.contains("\"n_f\":null"));
        let back: FineTuningWire = serde_json::from_str(&json).unwrap();
        assert_eq!(back.n_f, None);
        let _ = ratio(1, 2);
    }
}
