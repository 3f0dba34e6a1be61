//! The three causal model classes as explicit factorizations.
//!
//! Superdeterministic models carry one hidden-variables table per context,
//! p(λ | {α}, γ_A, {β}, γ_B); the causal structure makes this table
//! independent of (M_A, M_B) given the context, and measurement statistics
//! may therefore depend on how settings are chosen, not just on what they
//! are. Condition (ii) — statistics equal across every same-settings pair of
//! contexts — is what the model must be tuned to satisfy.
//!
//! Retrocausal models correlate λ with the setting it is causally affected
//! by, p(λ | M_B); nonlocal models use an unconditioned p(λ) and let M_B act
//! on O_A through the kernel. Both factorizations depend on the context only
//! through the induced settings, so condition (ii) holds identically and the
//! mechanism/choice variables can be summed out (`reduce`).

use crate::exact::check_distribution;
use crate::kernel::{OutcomeDistribution, OutcomeKernel, OutcomePair};
use crate::scenario::{
    context_count_u64, contexts_by_settings, enumerate_contexts, Context, Setting, SettingPair,
};
use crate::simplex::LatticeDistribution;
use crate::{Error, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// Default cap on the number of witness pairs a condition-(ii) report keeps.
pub const DEFAULT_WITNESS_CAP: usize = 8;

// ---------------------------------------------------------------------------
// Exact statistic signatures
// ---------------------------------------------------------------------------

/// Integer form of one sector's kernel column. For lattice tables over a
/// common denominator, the statistics vector of a table equals its signature
/// up to one fixed positive factor per outcome, so exact equality of
/// statistics reduces to equality of integer signatures.
pub struct SectorWeights {
    weights: [Vec<BigUint>; 4],
}

impl SectorWeights {
    pub fn new(kernel: &OutcomeKernel, settings: SettingPair) -> Self {
        let weights = std::array::from_fn(|o| {
            let pair = OutcomePair::from_index(o);
            let mut scale = BigUint::one();
            for lambda in 0..kernel.lambda_count() {
                let den = kernel
                    .probability(lambda, settings, pair)
                    .denom()
                    .magnitude();
                scale = num_integer::lcm(scale, den.clone());
            }
            (0..kernel.lambda_count())
                .map(|lambda| {
                    let p = kernel.probability(lambda, settings, pair);
                    p.numer().magnitude() * (&scale / p.denom().magnitude())
                })
                .collect()
        });
        Self { weights }
    }

    /// Signature of a table given by its numerators.
    pub fn signature(&self, numerators: &[u64]) -> [BigUint; 4] {
        std::array::from_fn(|o| {
            self.weights[o]
                .iter()
                .zip(numerators)
                .map(|(w, &n)| w * n)
                .sum()
        })
    }
}

// ---------------------------------------------------------------------------
// Superdeterministic models
// ---------------------------------------------------------------------------

/// A superdeterministic model: an outcome kernel plus one lattice table
/// p(λ | context) for each of the Ω contexts, all over a common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperdetModel {
    n: u32,
    kernel: OutcomeKernel,
    denominator: u64,
    tables: Vec<LatticeDistribution>,
}

impl SuperdetModel {
    /// `tables[i]` is the table of the context with canonical index `i`.
    pub fn new(n: u32, kernel: OutcomeKernel, tables: Vec<LatticeDistribution>) -> Result<Self> {
        let omega = context_count_u64(n)?;
        if tables.len() as u64 != omega {
            return Err(Error::ModelValidation(format!(
                "expected {omega} context tables for N={n}, got {}",
                tables.len()
            )));
        }
        let denominator = tables[0].denominator();
        for t in &tables {
            if t.lambda_count() != kernel.lambda_count() {
                return Err(Error::LambdaMismatch {
                    kernel: kernel.lambda_count(),
                    table: t.lambda_count(),
                });
            }
            if t.denominator() != denominator {
                return Err(Error::DenominatorMismatch {
                    expected: denominator,
                    found: t.denominator(),
                });
            }
        }
        Ok(Self {
            n,
            kernel,
            denominator,
            tables,
        })
    }

    /// The literature-style constrained model: a single table per induced
    /// settings pair, copied to every context of that sector. Satisfies
    /// constraints (m) and (n), hence condition (ii), by construction.
    pub fn make_constrained(
        n: u32,
        kernel: OutcomeKernel,
        sector_tables: [LatticeDistribution; 4],
    ) -> Result<Self> {
        let omega = context_count_u64(n)?;
        let mut tables = Vec::with_capacity(omega as usize);
        for c in enumerate_contexts(n)? {
            tables.push(sector_tables[c.induced_settings().index()].clone());
        }
        Self::new(n, kernel, tables)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambda_count(&self) -> usize {
        self.kernel.lambda_count()
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn kernel(&self) -> &OutcomeKernel {
        &self.kernel
    }

    pub fn tables(&self) -> &[LatticeDistribution] {
        &self.tables
    }

    pub fn table(&self, context: &Context) -> Result<&LatticeDistribution> {
        if context.n() != self.n {
            return Err(Error::ContextDimensionMismatch {
                context_n: context.n(),
                model_n: self.n,
            });
        }
        Ok(&self.tables[context.index() as usize])
    }

    /// p(O_A, O_B | context): the λ-mixture of kernel rows under this
    /// context's table. Exact; sums to one.
    pub fn statistics(&self, context: &Context) -> Result<OutcomeDistribution> {
        let table = self.table(context)?;
        let settings = context.induced_settings();
        Ok(mixture(&self.kernel, settings, |lambda| {
            table.probability(lambda)
        }))
    }

    /// Constraint (m): the table is a function of (γ_A, γ_B) and the outputs
    /// of the two mechanisms actually used — λ carries no correlation with
    /// unused mechanisms.
    pub fn check_constraint_m(&self) -> bool {
        let mut seen: HashMap<(u32, u32, u64, u64), &LatticeDistribution> = HashMap::new();
        for c in enumerate_contexts(self.n).expect("validated N") {
            let used = c.induced_settings();
            let key = (c.gamma_a(), c.gamma_b(), used.0.bit(), used.1.bit());
            let table = &self.tables[c.index() as usize];
            match seen.entry(key) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    if *e.get() != table {
                        return false;
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(table);
                }
            }
        }
        true
    }

    /// Constraint (n): the table depends on the context only through the
    /// induced settings — λ is correlated with every mechanism the same way.
    pub fn check_constraint_n(&self) -> bool {
        let mut seen: HashMap<usize, &LatticeDistribution> = HashMap::new();
        for c in enumerate_contexts(self.n).expect("validated N") {
            let key = c.induced_settings().index();
            let table = &self.tables[c.index() as usize];
            match seen.entry(key) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    if *e.get() != table {
                        return false;
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(table);
                }
            }
        }
        true
    }

    /// Condition (ii): within every sector, all contexts produce exactly the
    /// same outcome statistics.
    pub fn check_condition_ii(&self) -> ConditionReport {
        self.check_condition_ii_with_cap(DEFAULT_WITNESS_CAP)
    }

    pub fn check_condition_ii_with_cap(&self, witness_cap: usize) -> ConditionReport {
        let mut witnesses = Vec::new();
        for (pair, members) in contexts_by_settings(self.n).expect("validated N") {
            let weights = SectorWeights::new(&self.kernel, pair);
            // Group the sector by exact statistics; one group means no pair differs.
            let mut groups: Vec<([BigUint; 4], &Context)> = Vec::new();
            for c in &members {
                let sig = weights.signature(self.tables[c.index() as usize].numerators());
                if !groups.iter().any(|(s, _)| *s == sig) {
                    groups.push((sig, c));
                }
            }
            if groups.len() > 1 {
                let anchor = groups[0].1;
                for (_, other) in groups.iter().skip(1) {
                    if witnesses.len() >= witness_cap {
                        break;
                    }
                    witnesses.push(((*anchor).clone(), (*other).clone()));
                }
            }
        }
        ConditionReport {
            holds: witnesses.is_empty(),
            witnesses,
        }
    }
}

/// Result of a condition-(ii) check: `witnesses` holds same-sector context
/// pairs with unequal statistics (up to the configured cap).
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub holds: bool,
    pub witnesses: Vec<(Context, Context)>,
}

fn mixture<'a, F>(kernel: &OutcomeKernel, settings: SettingPair, weight: F) -> OutcomeDistribution
where
    F: Fn(usize) -> BigRational + 'a,
{
    let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
    for lambda in 0..kernel.lambda_count() {
        let w = weight(lambda);
        if w.is_zero() {
            continue;
        }
        let row = kernel.row(lambda, settings);
        for (acc, p) in out.iter_mut().zip(row.0.iter()) {
            *acc += p * &w;
        }
    }
    OutcomeDistribution(out)
}

// ---------------------------------------------------------------------------
// Wing kernels and the retrocausal / nonlocal classes
// ---------------------------------------------------------------------------

/// p(O | λ, setting) for one wing: `rows[λ][setting][outcome]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WingKernel {
    rows: Vec<[[BigRational; 2]; 2]>,
}

impl WingKernel {
    pub fn new(rows: Vec<[[BigRational; 2]; 2]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ModelValidation("wing kernel with no λ values".into()));
        }
        for (lambda, row) in rows.iter().enumerate() {
            for s in Setting::ALL {
                check_distribution(&row[s.bit() as usize], &format!("wing kernel λ={lambda}, {s}"))?;
            }
        }
        Ok(Self { rows })
    }

    pub fn lambda_count(&self) -> usize {
        self.rows.len()
    }

    pub fn probability(&self, lambda: usize, setting: Setting, plus: bool) -> &BigRational {
        &self.rows[lambda][setting.bit() as usize][if plus { 0 } else { 1 }]
    }

    pub fn rows(&self) -> &[[[BigRational; 2]; 2]] {
        &self.rows
    }
}

/// p(O_A | λ, M_A, M_B) for the nonlocal wing A: `rows[λ][settings pair][outcome]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonlocalWingKernel {
    rows: Vec<[[BigRational; 2]; 4]>,
}

impl NonlocalWingKernel {
    pub fn new(rows: Vec<[[BigRational; 2]; 4]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ModelValidation("wing kernel with no λ values".into()));
        }
        for (lambda, row) in rows.iter().enumerate() {
            for pair in SettingPair::ALL {
                check_distribution(
                    &row[pair.index()],
                    &format!("nonlocal wing kernel λ={lambda}, settings {pair}"),
                )?;
            }
        }
        Ok(Self { rows })
    }

    pub fn lambda_count(&self) -> usize {
        self.rows.len()
    }

    pub fn probability(&self, lambda: usize, settings: SettingPair, plus: bool) -> &BigRational {
        &self.rows[lambda][settings.index()][if plus { 0 } else { 1 }]
    }

    pub fn rows(&self) -> &[[[BigRational; 2]; 4]] {
        &self.rows
    }
}

/// Retrocausal model: M_B causally affects λ backwards in time, so λ is
/// conditioned on the actual setting, not on how it was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetrocausalModel {
    p_oa: WingKernel,
    p_ob: WingKernel,
    /// p(λ | M_B), indexed by the M_B bit.
    hv_by_setting: [Vec<BigRational>; 2],
}

impl RetrocausalModel {
    pub fn new(
        p_oa: WingKernel,
        p_ob: WingKernel,
        hv_by_setting: [Vec<BigRational>; 2],
    ) -> Result<Self> {
        let lambda_count = p_oa.lambda_count();
        if p_ob.lambda_count() != lambda_count {
            return Err(Error::LambdaMismatch {
                kernel: lambda_count,
                table: p_ob.lambda_count(),
            });
        }
        for (s, hv) in Setting::ALL.iter().zip(hv_by_setting.iter()) {
            if hv.len() != lambda_count {
                return Err(Error::LambdaMismatch {
                    kernel: lambda_count,
                    table: hv.len(),
                });
            }
            check_distribution(hv, &format!("p(λ | M_B={s})"))?;
        }
        Ok(Self {
            p_oa,
            p_ob,
            hv_by_setting,
        })
    }

    pub fn lambda_count(&self) -> usize {
        self.p_oa.lambda_count()
    }

    pub fn p_oa(&self) -> &WingKernel {
        &self.p_oa
    }

    pub fn p_ob(&self) -> &WingKernel {
        &self.p_ob
    }

    pub fn hv_given_setting(&self, m_b: Setting) -> &[BigRational] {
        &self.hv_by_setting[m_b.bit() as usize]
    }

    /// The joint kernel p(O_A|λ,M_A)·p(O_B|λ,M_B) assembled per sector.
    pub fn joint_kernel(&self) -> OutcomeKernel {
        product_kernel(self.lambda_count(), |lambda, pair, o| {
            self.p_oa.probability(lambda, pair.0, o.0 == crate::kernel::Outcome::Plus)
                * self.p_ob.probability(lambda, pair.1, o.1 == crate::kernel::Outcome::Plus)
        })
    }

    /// Statistics at the induced settings; equal for all contexts of a sector
    /// by construction.
    pub fn statistics(&self, settings: SettingPair) -> OutcomeDistribution {
        let hv = self.hv_given_setting(settings.1);
        mixture(&self.joint_kernel(), settings, |lambda| hv[lambda].clone())
    }

    pub fn statistics_for_context(&self, context: &Context) -> OutcomeDistribution {
        self.statistics(context.induced_settings())
    }

    /// Sum out {α}, γ_A, {β}, γ_B against a choice prior, leaving
    /// {p(O_A|λ,M_A), p(O_B|λ,M_B), p(λ|M_B), p(M_A), p(M_B)}.
    pub fn reduce(&self, prior: &ChoicePrior) -> ReducedRetrocausal {
        ReducedRetrocausal {
            p_oa: self.p_oa.clone(),
            p_ob: self.p_ob.clone(),
            hv_by_setting: self.hv_by_setting.clone(),
            p_ma: prior.setting_distribution_a(),
            p_mb: prior.setting_distribution_b(),
        }
    }
}

/// Nonlocal model: M_B acts on O_A directly through the kernel; λ needs no
/// correlation with settings at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonlocalModel {
    p_oa: NonlocalWingKernel,
    p_ob: WingKernel,
    hv: Vec<BigRational>,
}

impl NonlocalModel {
    pub fn new(p_oa: NonlocalWingKernel, p_ob: WingKernel, hv: Vec<BigRational>) -> Result<Self> {
        let lambda_count = p_oa.lambda_count();
        if p_ob.lambda_count() != lambda_count {
            return Err(Error::LambdaMismatch {
                kernel: lambda_count,
                table: p_ob.lambda_count(),
            });
        }
        if hv.len() != lambda_count {
            return Err(Error::LambdaMismatch {
                kernel: lambda_count,
                table: hv.len(),
            });
        }
        check_distribution(&hv, "p(λ)")?;
        Ok(Self { p_oa, p_ob, hv })
    }

    pub fn lambda_count(&self) -> usize {
        self.p_oa.lambda_count()
    }

    pub fn p_oa(&self) -> &NonlocalWingKernel {
        &self.p_oa
    }

    pub fn p_ob(&self) -> &WingKernel {
        &self.p_ob
    }

    pub fn hv(&self) -> &[BigRational] {
        &self.hv
    }

    pub fn joint_kernel(&self) -> OutcomeKernel {
        product_kernel(self.lambda_count(), |lambda, pair, o| {
            self.p_oa.probability(lambda, pair, o.0 == crate::kernel::Outcome::Plus)
                * self.p_ob.probability(lambda, pair.1, o.1 == crate::kernel::Outcome::Plus)
        })
    }

    pub fn statistics(&self, settings: SettingPair) -> OutcomeDistribution {
        mixture(&self.joint_kernel(), settings, |lambda| self.hv[lambda].clone())
    }

    pub fn statistics_for_context(&self, context: &Context) -> OutcomeDistribution {
        self.statistics(context.induced_settings())
    }

    /// Reduced parameter set {p(O_A|λ,M_A,M_B), p(O_B|λ,M_B), p(λ), p(M_A), p(M_B)}.
    pub fn reduce(&self, prior: &ChoicePrior) -> ReducedNonlocal {
        ReducedNonlocal {
            p_oa: self.p_oa.clone(),
            p_ob: self.p_ob.clone(),
            hv: self.hv.clone(),
            p_ma: prior.setting_distribution_a(),
            p_mb: prior.setting_distribution_b(),
        }
    }
}

fn product_kernel<F>(lambda_count: usize, prob: F) -> OutcomeKernel
where
    F: Fn(usize, SettingPair, OutcomePair) -> BigRational,
{
    let rows = (0..lambda_count)
        .map(|lambda| {
            std::array::from_fn(|p| {
                let pair = SettingPair::from_index(p);
                OutcomeDistribution(std::array::from_fn(|o| {
                    prob(lambda, pair, OutcomePair::from_index(o))
                }))
            })
        })
        .collect();
    OutcomeKernel::from_rows(rows).expect("wing kernels are normalized")
}

/// Retrocausal parameters after summing out the mechanism/choice variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedRetrocausal {
    pub p_oa: WingKernel,
    pub p_ob: WingKernel,
    pub hv_by_setting: [Vec<BigRational>; 2],
    /// p(M_A), indexed by the setting bit.
    pub p_ma: [BigRational; 2],
    pub p_mb: [BigRational; 2],
}

impl ReducedRetrocausal {
    pub fn statistics(&self, settings: SettingPair) -> OutcomeDistribution {
        let hv = &self.hv_by_setting[settings.1.bit() as usize];
        let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for (lambda, w) in hv.iter().enumerate() {
            for (o, acc) in out.iter_mut().enumerate() {
                let pair = OutcomePair::from_index(o);
                *acc += self
                    .p_oa
                    .probability(lambda, settings.0, pair.0 == crate::kernel::Outcome::Plus)
                    * self
                        .p_ob
                        .probability(lambda, settings.1, pair.1 == crate::kernel::Outcome::Plus)
                    * w;
            }
        }
        OutcomeDistribution(out)
    }
}

/// Nonlocal parameters after summing out the mechanism/choice variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedNonlocal {
    pub p_oa: NonlocalWingKernel,
    pub p_ob: WingKernel,
    pub hv: Vec<BigRational>,
    pub p_ma: [BigRational; 2],
    pub p_mb: [BigRational; 2],
}

impl ReducedNonlocal {
    pub fn statistics(&self, settings: SettingPair) -> OutcomeDistribution {
        let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for (lambda, w) in self.hv.iter().enumerate() {
            for (o, acc) in out.iter_mut().enumerate() {
                let pair = OutcomePair::from_index(o);
                *acc += self
                    .p_oa
                    .probability(lambda, settings, pair.0 == crate::kernel::Outcome::Plus)
                    * self
                        .p_ob
                        .probability(lambda, settings.1, pair.1 == crate::kernel::Outcome::Plus)
                    * w;
            }
        }
        OutcomeDistribution(out)
    }
}

// ---------------------------------------------------------------------------
// Choice priors
// ---------------------------------------------------------------------------

/// Distribution of the experimenters' free inputs: mechanism outputs are
/// independent Bernoulli draws (probability of Mz per mechanism) and the
/// chosen mechanism indices have arbitrary distributions. Defaults to
/// uniform everywhere; how choices are made carries no significance in any
/// computed quantity, so this is exposed only as configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoicePrior {
    alpha_z: Vec<BigRational>,
    beta_z: Vec<BigRational>,
    gamma_a: Vec<BigRational>,
    gamma_b: Vec<BigRational>,
}

impl ChoicePrior {
    pub fn uniform(n: u32) -> Self {
        let half = crate::exact::ratio(1, 2);
        let even = crate::exact::ratio(1, n as u64);
        Self {
            alpha_z: vec![half.clone(); n as usize],
            beta_z: vec![half; n as usize],
            gamma_a: vec![even.clone(); n as usize],
            gamma_b: vec![even; n as usize],
        }
    }

    pub fn new(
        alpha_z: Vec<BigRational>,
        beta_z: Vec<BigRational>,
        gamma_a: Vec<BigRational>,
        gamma_b: Vec<BigRational>,
    ) -> Result<Self> {
        let n = alpha_z.len();
        if n == 0 || beta_z.len() != n || gamma_a.len() != n || gamma_b.len() != n {
            return Err(Error::ModelValidation(
                "choice prior component lengths must all equal N >= 1".into(),
            ));
        }
        for (what, p) in alpha_z.iter().map(|p| ("alpha", p)).chain(beta_z.iter().map(|p| ("beta", p))) {
            if p.is_negative() || p > &BigRational::one() {
                return Err(Error::ModelValidation(format!(
                    "{what} mechanism probability outside [0,1]"
                )));
            }
        }
        check_distribution(&gamma_a, "p(γ_A)")?;
        check_distribution(&gamma_b, "p(γ_B)")?;
        Ok(Self {
            alpha_z,
            beta_z,
            gamma_a,
            gamma_b,
        })
    }

    pub fn n(&self) -> u32 {
        self.alpha_z.len() as u32
    }

    /// P(α_i = Mz) for the 1-based mechanism `i`.
    pub fn alpha_z(&self, i: u32) -> &BigRational {
        &self.alpha_z[(i - 1) as usize]
    }

    pub fn beta_z(&self, i: u32) -> &BigRational {
        &self.beta_z[(i - 1) as usize]
    }

    pub fn gamma_a(&self) -> &[BigRational] {
        &self.gamma_a
    }

    pub fn gamma_b(&self) -> &[BigRational] {
        &self.gamma_b
    }

    /// p(M_A) = Σ_i p(γ_A=i)·p(α_i = ·), indexed by the setting bit.
    pub fn setting_distribution_a(&self) -> [BigRational; 2] {
        marginal_setting(&self.gamma_a, &self.alpha_z)
    }

    pub fn setting_distribution_b(&self) -> [BigRational; 2] {
        marginal_setting(&self.gamma_b, &self.beta_z)
    }

    /// Probability of drawing a full context under this prior.
    pub fn context_probability(&self, context: &Context) -> BigRational {
        let mut p = self.gamma_a[(context.gamma_a() - 1) as usize].clone()
            * &self.gamma_b[(context.gamma_b() - 1) as usize];
        for (i, s) in context.alpha().iter().enumerate() {
            p *= bernoulli(&self.alpha_z[i], *s);
        }
        for (i, s) in context.beta().iter().enumerate() {
            p *= bernoulli(&self.beta_z[i], *s);
        }
        p
    }
}

fn bernoulli(p_z: &BigRational, s: Setting) -> BigRational {
    match s {
        Setting::Mz => p_z.clone(),
        Setting::Mx => BigRational::one() - p_z,
    }
}

fn marginal_setting(gamma: &[BigRational], z_probs: &[BigRational]) -> [BigRational; 2] {
    let p_z: BigRational = gamma
        .iter()
        .zip(z_probs)
        .map(|(g, z)| g * z)
        .fold(BigRational::zero(), |acc, x| acc + x);
    [BigRational::one() - &p_z, p_z]
}

// ---------------------------------------------------------------------------
// The model-class enum (file format lives in `modelfile`)
// ---------------------------------------------------------------------------

/// Any of the three model classes, as loaded from a model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CausalModel {
    Superdeterministic(SuperdetModel),
    Retrocausal(RetrocausalModel),
    Nonlocal(NonlocalModel),
}

impl CausalModel {
    pub fn class_name(&self) -> &'static str {
        match self {
            CausalModel::Superdeterministic(_) => "superdeterministic",
            CausalModel::Retrocausal(_) => "retrocausal",
            CausalModel::Nonlocal(_) => "nonlocal",
        }
    }

    pub fn lambda_count(&self) -> usize {
        match self {
            CausalModel::Superdeterministic(m) => m.lambda_count(),
            CausalModel::Retrocausal(m) => m.lambda_count(),
            CausalModel::Nonlocal(m) => m.lambda_count(),
        }
    }

    /// Statistics for a context; superdeterministic models require the
    /// context dimension to match.
    pub fn statistics(&self, context: &Context) -> Result<OutcomeDistribution> {
        match self {
            CausalModel::Superdeterministic(m) => m.statistics(context),
            CausalModel::Retrocausal(m) => Ok(m.statistics_for_context(context)),
            CausalModel::Nonlocal(m) => Ok(m.statistics_for_context(context)),
        }
    }
}
