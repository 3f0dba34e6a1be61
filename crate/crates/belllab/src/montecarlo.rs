//! Seeded simulation of experimental runs under any model class.
//!
//! Each run draws, in this fixed order: the mechanism outputs α_1..α_N and
//! β_1..β_N, the choices γ_A and γ_B, the hidden variable λ from the model's
//! table at the sampled context, and finally the joint outcome from the
//! kernel row at (λ, M_A, M_B). Run r uses the counter-based stream
//! `CounterRng::split(seed, r)`, so records are byte-identical however many
//! threads generate them. The causal diagrams put λ before the choices in
//! time; the joint factorization makes the sampling order irrelevant, and
//! this one is convenient for conditioning.

use crate::entropy::SubEnsemble;
use crate::kernel::OutcomePair;
use crate::models::{CausalModel, ChoicePrior, SuperdetModel};
use crate::rng::CounterRng;
use crate::scenario::{Context, Setting, SettingPair};
use crate::{par, Error, Result};
use num_bigint::BigUint;
use num_rational::BigRational;

/// One simulated run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub run: u64,
    pub context: Context,
    /// E = (γ_A, γ_B); present only when the model satisfies constraint (m),
    /// otherwise sub-ensembles are undefined.
    pub sub_ensemble: Option<SubEnsemble>,
    pub lambda: usize,
    pub outcomes: OutcomePair,
}

/// Simulate `n_runs` runs. Reproducible given (model, n_runs, seed, prior).
pub fn simulate(
    model: &CausalModel,
    n_runs: u64,
    seed: u64,
    prior: &ChoicePrior,
) -> Result<Vec<RunRecord>> {
    simulate_impl(model, n_runs, seed, prior, false)
}

/// Sequential twin of [`simulate`] (bench baseline; identical output).
pub fn simulate_seq(
    model: &CausalModel,
    n_runs: u64,
    seed: u64,
    prior: &ChoicePrior,
) -> Result<Vec<RunRecord>> {
    simulate_impl(model, n_runs, seed, prior, true)
}

fn simulate_impl(
    model: &CausalModel,
    n_runs: u64,
    seed: u64,
    prior: &ChoicePrior,
    sequential: bool,
) -> Result<Vec<RunRecord>> {
    if n_runs == 0 {
        return Err(Error::InvalidContext("n_runs must be >= 1".into()));
    }
    if let CausalModel::Superdeterministic(m) = model {
        if m.n() != prior.n() {
            return Err(Error::ContextDimensionMismatch {
                context_n: prior.n(),
                model_n: m.n(),
            });
        }
    }
    let sampler = Sampler::prepare(model, prior);
    let runs = n_runs as usize;
    // Chunked so rayon's per-task overhead is amortized; run r always draws
    // from stream r, so chunking cannot change any record.
    const RUN_CHUNK: usize = 1024;
    let chunks = runs.div_ceil(RUN_CHUNK);
    let gen = |b: usize| -> Vec<RunRecord> {
        let lo = b * RUN_CHUNK;
        let hi = (lo + RUN_CHUNK).min(runs);
        (lo..hi)
            .map(|r| {
                let mut rng = CounterRng::split(seed, r as u64);
                sampler.draw_run(r as u64, &mut rng)
            })
            .collect()
    };
    let blocks = if sequential {
        par::map_indexed_seq(chunks, gen)
    } else {
        par::map_indexed(chunks, gen)
    };
    Ok(blocks.into_iter().flatten().collect())
}

/// Pre-resolved integer sampling weights for one simulation.
struct Sampler<'a> {
    model: &'a CausalModel,
    prior: PreparedPrior,
    /// Joint kernel weights per (λ, sector): cumulative-ready numerators.
    kernel_weights: Vec<[WeightedChoice; 4]>,
    /// Retro/nonlocal hidden-variable weights (superdet reads its tables).
    hv_weights: HvWeights,
    track_sub_ensembles: bool,
}

enum HvWeights {
    Superdet,
    /// p(λ | M_B), by setting bit.
    BySetting([WeightedChoice; 2]),
    Single(WeightedChoice),
}

/// Discrete distribution with exact integer weights; native-width weights
/// sample without allocation.
enum WeightedChoice {
    Small { weights: Vec<u64>, total: u64 },
    Big { weights: Vec<BigUint>, total: BigUint },
}

impl WeightedChoice {
    fn from_rationals(probs: &[BigRational]) -> Self {
        use num_traits::ToPrimitive;
        let mut denom = num_bigint::BigInt::from(1);
        for p in probs {
            denom = num_integer::lcm(denom, p.denom().clone());
        }
        let weights: Vec<BigUint> = probs
            .iter()
            .map(|p| (p.numer() * &denom / p.denom()).magnitude().clone())
            .collect();
        let total: BigUint = weights.iter().sum();
        match total.to_u64() {
            Some(t) => Self::Small {
                weights: weights.iter().map(|w| w.to_u64().expect("below total")).collect(),
                total: t,
            },
            None => Self::Big { weights, total },
        }
    }

    fn from_numerators(numerators: &[u64], total: u64) -> Self {
        Self::Small {
            weights: numerators.to_vec(),
            total,
        }
    }

    fn sample(&self, rng: &mut CounterRng) -> usize {
        match self {
            Self::Small { weights, total } => {
                let mut draw = rng.below_u64(*total);
                for (i, &w) in weights.iter().enumerate() {
                    if draw < w {
                        return i;
                    }
                    draw -= w;
                }
                unreachable!("draw below total weight")
            }
            Self::Big { weights, total } => {
                let mut draw = rng.below_biguint(total);
                for (i, w) in weights.iter().enumerate() {
                    if &draw < w {
                        return i;
                    }
                    draw -= w;
                }
                unreachable!("draw below total weight")
            }
        }
    }
}

struct PreparedPrior {
    /// Per-mechanism Bernoulli as a two-way choice: index 1 means Mz.
    alpha_z: Vec<WeightedChoice>,
    beta_z: Vec<WeightedChoice>,
    gamma_a: WeightedChoice,
    gamma_b: WeightedChoice,
}

impl PreparedPrior {
    fn new(prior: &ChoicePrior) -> Self {
        use num_traits::One;
        let bern = |p: &BigRational| {
            WeightedChoice::from_rationals(&[BigRational::one() - p, p.clone()])
        };
        Self {
            alpha_z: (1..=prior.n()).map(|i| bern(prior.alpha_z(i))).collect(),
            beta_z: (1..=prior.n()).map(|i| bern(prior.beta_z(i))).collect(),
            gamma_a: WeightedChoice::from_rationals(prior.gamma_a()),
            gamma_b: WeightedChoice::from_rationals(prior.gamma_b()),
        }
    }

    fn draw_context(&self, rng: &mut CounterRng) -> Context {
        let mut wing = |probs: &[WeightedChoice]| -> Vec<Setting> {
            probs
                .iter()
                .map(|p| Setting::from_bit(p.sample(rng) as u64))
                .collect()
        };
        let alpha = wing(&self.alpha_z);
        let beta = wing(&self.beta_z);
        let gamma_a = self.gamma_a.sample(rng) as u32 + 1;
        let gamma_b = self.gamma_b.sample(rng) as u32 + 1;
        Context::new(alpha, beta, gamma_a, gamma_b).expect("prior yields valid contexts")
    }
}

impl<'a> Sampler<'a> {
    fn prepare(model: &'a CausalModel, prior: &ChoicePrior) -> Self {
        let joint;
        let (kernel, hv_weights, track) = match model {
            CausalModel::Superdeterministic(m) => {
                (m.kernel(), HvWeights::Superdet, m.check_constraint_m())
            }
            CausalModel::Retrocausal(m) => {
                joint = m.joint_kernel();
                let by_setting = std::array::from_fn(|bit| {
                    WeightedChoice::from_rationals(m.hv_given_setting(Setting::from_bit(bit as u64)))
                });
                (&joint, HvWeights::BySetting(by_setting), false)
            }
            CausalModel::Nonlocal(m) => {
                joint = m.joint_kernel();
                (
                    &joint,
                    HvWeights::Single(WeightedChoice::from_rationals(m.hv())),
                    false,
                )
            }
        };
        let kernel_weights = (0..kernel.lambda_count())
            .map(|lambda| {
                std::array::from_fn(|p| {
                    WeightedChoice::from_rationals(&kernel.row(lambda, SettingPair::from_index(p)).0)
                })
            })
            .collect();
        Sampler {
            model,
            prior: PreparedPrior::new(prior),
            kernel_weights,
            hv_weights,
            track_sub_ensembles: track,
        }
    }

    fn draw_run(&self, run: u64, rng: &mut CounterRng) -> RunRecord {
        let context = self.prior.draw_context(rng);
        let settings = context.induced_settings();
        let lambda = match (&self.hv_weights, self.model) {
            (HvWeights::Superdet, CausalModel::Superdeterministic(m)) => {
                let table = m.table(&context).expect("dimension checked");
                WeightedChoice::from_numerators(table.numerators(), table.denominator())
                    .sample(rng)
            }
            (HvWeights::BySetting(tables), _) => tables[settings.1.bit() as usize].sample(rng),
            (HvWeights::Single(table), _) => table.sample(rng),
            _ => unreachable!("hv weights match the model class"),
        };
        let outcomes = OutcomePair::from_index(
            self.kernel_weights[lambda][settings.index()].sample(rng),
        );
        RunRecord {
            run,
            context: context.clone(),
            sub_ensemble: self
                .track_sub_ensembles
                .then(|| SubEnsemble::new(context.gamma_a(), context.gamma_b())),
            lambda,
            outcomes,
        }
    }
}

// ---------------------------------------------------------------------------
// Empirical tallies
// ---------------------------------------------------------------------------

/// Outcome counts per context and per sector.
#[derive(Debug, Clone)]
pub struct EmpiricalTable {
    n: u32,
    n_runs: u64,
    by_context: Vec<[u64; 4]>,
    by_sector: [[u64; 4]; 4],
}

impl EmpiricalTable {
    pub fn from_runs(n: u32, runs: &[RunRecord]) -> Result<Self> {
        let omega = crate::scenario::context_count_u64(n)?;
        let mut by_context = vec![[0u64; 4]; omega as usize];
        let mut by_sector = [[0u64; 4]; 4];
        for r in runs {
            if r.context.n() != n {
                return Err(Error::ContextDimensionMismatch {
                    context_n: r.context.n(),
                    model_n: n,
                });
            }
            let o = r.outcomes.index();
            by_context[r.context.index() as usize][o] += 1;
            by_sector[r.context.induced_settings().index()][o] += 1;
        }
        Ok(Self {
            n,
            n_runs: runs.len() as u64,
            by_context,
            by_sector,
        })
    }

    pub fn n_runs(&self) -> u64 {
        self.n_runs
    }

    pub fn context_counts(&self, context: &Context) -> [u64; 4] {
        self.by_context[context.index() as usize]
    }

    pub fn sector_counts(&self, settings: SettingPair) -> [u64; 4] {
        self.by_sector[settings.index()]
    }

    pub fn sector_visits(&self, settings: SettingPair) -> u64 {
        self.by_sector[settings.index()].iter().sum()
    }

    /// All (context index, counts) cells with at least one visit.
    pub fn visited_contexts(&self) -> impl Iterator<Item = (u64, &[u64; 4])> {
        self.by_context
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().any(|&x| x > 0))
            .map(|(i, c)| (i as u64, c))
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

// ---------------------------------------------------------------------------
// Mechanism-dependence demonstration
// ---------------------------------------------------------------------------

/// Default two-proportion z threshold for declaring an empirical gap.
pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;

/// Empirical demonstration that a condition-(ii)-violating model's statistics
/// depend on how the settings were chosen.
#[derive(Debug, Clone)]
pub struct MechanismDependenceReport {
    /// Two same-sector contexts with unequal analytic statistics.
    pub context_a: Context,
    pub context_b: Context,
    pub analytic_a: [f64; 4],
    pub analytic_b: [f64; 4],
    /// The outcome cell with the largest analytic frequency gap, and the gap.
    pub witness_outcome: OutcomePair,
    pub analytic_gap: f64,
    pub visits_a: u64,
    pub visits_b: u64,
    pub freq_a: f64,
    pub freq_b: f64,
    pub z_statistic: f64,
    pub z_threshold: f64,
    pub demonstrated: bool,
}

/// Simulates runs conditioned on a witness pair of same-sector contexts
/// (each drawn with probability 1/2) and tests the empirical frequency gap
/// at the most discriminating outcome with a two-proportion z statistic.
/// Models satisfying condition (ii) are rejected: there is no dependence to
/// demonstrate.
pub fn mechanism_dependence_demo(
    model: &SuperdetModel,
    n_runs: u64,
    seed: u64,
    z_threshold: f64,
) -> Result<MechanismDependenceReport> {
    let condition = model.check_condition_ii();
    if condition.holds {
        return Err(Error::NoDependenceToDemonstrate);
    }
    let (ctx_a, ctx_b) = condition.witnesses[0].clone();
    let stats_a = model.statistics(&ctx_a)?;
    let stats_b = model.statistics(&ctx_b)?;
    let analytic_a = stats_a.to_f64();
    let analytic_b = stats_b.to_f64();
    let witness_idx = (0..4)
        .max_by(|&i, &j| {
            let gi = (analytic_a[i] - analytic_b[i]).abs();
            let gj = (analytic_a[j] - analytic_b[j]).abs();
            gi.total_cmp(&gj)
        })
        .expect("four outcomes");
    let analytic_gap = (analytic_a[witness_idx] - analytic_b[witness_idx]).abs();

    // Conditioned simulation: runs see only the two witness contexts.
    let table_a = model.table(&ctx_a)?;
    let table_b = model.table(&ctx_b)?;
    let choice_a = WeightedChoice::from_numerators(table_a.numerators(), table_a.denominator());
    let choice_b = WeightedChoice::from_numerators(table_b.numerators(), table_b.denominator());
    let kernel_weights: Vec<WeightedChoice> = (0..model.lambda_count())
        .map(|lambda| {
            WeightedChoice::from_rationals(
                &model.kernel().row(lambda, ctx_a.induced_settings()).0,
            )
        })
        .collect();

    let mut hits = [[0u64; 2]; 2]; // [context][hit at witness outcome]
    for r in 0..n_runs {
        let mut rng = CounterRng::split(seed, r);
        let pick_b = rng.below_u64(2) == 1;
        let lambda = if pick_b {
            choice_b.sample(&mut rng)
        } else {
            choice_a.sample(&mut rng)
        };
        let outcome = kernel_weights[lambda].sample(&mut rng);
        let row = &mut hits[usize::from(pick_b)];
        row[0] += 1;
        if outcome == witness_idx {
            row[1] += 1;
        }
    }
    let (n_a, x_a) = (hits[0][0], hits[0][1]);
    let (n_b, x_b) = (hits[1][0], hits[1][1]);
    let freq_a = x_a as f64 / n_a.max(1) as f64;
    let freq_b = x_b as f64 / n_b.max(1) as f64;
    let z_statistic = two_proportion_z(x_a, n_a, x_b, n_b);

    Ok(MechanismDependenceReport {
        context_a: ctx_a,
        context_b: ctx_b,
        analytic_a,
        analytic_b,
        witness_outcome: OutcomePair::from_index(witness_idx),
        analytic_gap,
        visits_a: n_a,
        visits_b: n_b,
        freq_a,
        freq_b,
        z_statistic,
        z_threshold,
        demonstrated: z_statistic > z_threshold,
    })
}

/// Two-proportion z statistic with a pooled variance estimate. Returns +∞
/// for a maximal gap the pooled estimate cannot scale (p̂ ∈ {0, 1} with
/// unequal frequencies).
pub fn two_proportion_z(x_a: u64, n_a: u64, x_b: u64, n_b: u64) -> f64 {
    if n_a == 0 || n_b == 0 {
        return 0.0;
    }
    let p_a = x_a as f64 / n_a as f64;
    let p_b = x_b as f64 / n_b as f64;
    let pooled = (x_a + x_b) as f64 / (n_a + n_b) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n_a as f64 + 1.0 / n_b as f64);
    if var == 0.0 {
        return if p_a == p_b { 0.0 } else { f64::INFINITY };
    }
    (p_a - p_b).abs() / var.sqrt()
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

/// Fixed column order: run,alpha,beta,gA,gB,MA,MB,lambda,OA,OB.
pub const CSV_HEADER: &str = "run,alpha,beta,gA,gB,MA,MB,lambda,OA,OB";

pub fn runs_to_csv(runs: &[RunRecord]) -> String {
    let mut out = String::with_capacity(32 * (runs.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in runs {
        let c = &r.context;
        let settings = c.induced_settings();
        let alpha: String = c.alpha().iter().map(|s| s.as_char()).collect();
        let beta: String = c.beta().iter().map(|s| s.as_char()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.run,
            alpha,
            beta,
            c.gamma_a(),
            c.gamma_b(),
            settings.0.as_char(),
            settings.1.as_char(),
            r.lambda,
            r.outcomes.0.value(),
            r.outcomes.1.value(),
        ));
    }
    out
}

/// The (context, E) pairs of runs that carry a sub-ensemble, for
/// [`crate::entropy::verify_coincidence`].
pub fn coincidence_pairs(runs: &[RunRecord]) -> Vec<(Context, SubEnsemble)> {
    runs.iter()
        .filter_map(|r| r.sub_ensemble.map(|e| (r.context.clone(), e)))
        .collect()
}
