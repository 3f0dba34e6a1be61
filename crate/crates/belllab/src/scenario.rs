//! Discrete variable spaces of the Bell scenario.
//!
//! Each wing has N setting mechanisms; mechanism outputs are `{α} ∈ {Mx,Mz}^N`
//! at wing A and `{β}` at wing B. The experimenters pick mechanisms γ_A and
//! γ_B (1-based), and the actual settings are `M_A = α[γ_A]`, `M_B = β[γ_B]`.
//! A [`Context`] is the full tuple ({α}, {β}, γ_A, γ_B); there are
//! Ω = N²·2^(2N) of them, split into four equal sectors by induced settings.
//!
//! Canonical context order (fixes reproducible indices): γ_A-major, then γ_B,
//! then {α} read as a 2^N bitstring with Mx=0, Mz=1 and α_1 as the most
//! significant bit, then {β} the same way.

use crate::{Error, Result};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A measurement setting: one of the two local spin measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    Mx,
    Mz,
}

impl Setting {
    pub const ALL: [Setting; 2] = [Setting::Mx, Setting::Mz];

    /// Mx=0, Mz=1: the bit used in bitstring packing and table indexing.
    pub fn bit(self) -> u64 {
        match self {
            Setting::Mx => 0,
            Setting::Mz => 1,
        }
    }

    pub fn from_bit(b: u64) -> Setting {
        if b & 1 == 0 {
            Setting::Mx
        } else {
            Setting::Mz
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Setting::Mx => 'x',
            Setting::Mz => 'z',
        }
    }

    pub fn from_char(c: char) -> Result<Setting> {
        match c {
            'x' => Ok(Setting::Mx),
            'z' => Ok(Setting::Mz),
            other => Err(Error::InvalidContext(format!(
                "setting character '{other}' (expected 'x' or 'z')"
            ))),
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.as_char())
    }
}

/// An induced settings pair (M_A, M_B); the four values index the sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SettingPair(pub Setting, pub Setting);

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair(Setting::Mx, Setting::Mx),
        SettingPair(Setting::Mx, Setting::Mz),
        SettingPair(Setting::Mz, Setting::Mx),
        SettingPair(Setting::Mz, Setting::Mz),
    ];

    /// Sector index in [0, 4): 2·bit(M_A) + bit(M_B).
    pub fn index(self) -> usize {
        (2 * self.0.bit() + self.1.bit()) as usize
    }

    pub fn from_index(i: usize) -> SettingPair {
        Self::ALL[i]
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Wire form of a context: {"alpha":"xz..","beta":"zz..","gA":1,"gB":2}.
#[derive(Serialize, Deserialize)]
struct ContextRepr {
    alpha: String,
    beta: String,
    #[serde(rename = "gA")]
    gamma_a: u32,
    #[serde(rename = "gB")]
    gamma_b: u32,
}

/// One conditioning cell: all mechanism outputs plus the experimenters'
/// choices for a single run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ContextRepr", into = "ContextRepr")]
pub struct Context {
    alpha: Vec<Setting>,
    beta: Vec<Setting>,
    gamma_a: u32,
    gamma_b: u32,
}

impl Context {
    pub fn new(alpha: Vec<Setting>, beta: Vec<Setting>, gamma_a: u32, gamma_b: u32) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::InvalidContext("empty mechanism list".into()));
        }
        if beta.len() != n {
            return Err(Error::InvalidContext(format!(
                "wing sizes differ: |alpha|={n}, |beta|={}",
                beta.len()
            )));
        }
        for (name, g) in [("gA", gamma_a), ("gB", gamma_b)] {
            if g == 0 || g as usize > n {
                return Err(Error::InvalidContext(format!(
                    "{name}={g} outside [1, {n}]"
                )));
            }
        }
        Ok(Self {
            alpha,
            beta,
            gamma_a,
            gamma_b,
        })
    }

    pub fn n(&self) -> u32 {
        self.alpha.len() as u32
    }

    pub fn alpha(&self) -> &[Setting] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Setting] {
        &self.beta
    }

    /// 1-based index of the mechanism chosen at wing A.
    pub fn gamma_a(&self) -> u32 {
        self.gamma_a
    }

    pub fn gamma_b(&self) -> u32 {
        self.gamma_b
    }

    /// The actual settings `(M_A, M_B) = (α[γ_A], β[γ_B])`.
    pub fn induced_settings(&self) -> SettingPair {
        SettingPair(
            self.alpha[(self.gamma_a - 1) as usize],
            self.beta[(self.gamma_b - 1) as usize],
        )
    }

    /// Position in the canonical enumeration of contexts for this N.
    pub fn index(&self) -> u64 {
        let n = self.alpha.len() as u64;
        let choice = (self.gamma_a as u64 - 1) * n + (self.gamma_b as u64 - 1);
        (choice * (1 << n) + pack_bits(&self.alpha)) * (1 << n) + pack_bits(&self.beta)
    }
}

impl From<Context> for ContextRepr {
    fn from(c: Context) -> Self {
        ContextRepr {
            alpha: c.alpha.iter().map(|s| s.as_char()).collect(),
            beta: c.beta.iter().map(|s| s.as_char()).collect(),
            gamma_a: c.gamma_a,
            gamma_b: c.gamma_b,
        }
    }
}

impl TryFrom<ContextRepr> for Context {
    type Error = Error;

    fn try_from(r: ContextRepr) -> Result<Self> {
        let parse = |s: &str| s.chars().map(Setting::from_char).collect::<Result<Vec<_>>>();
        Context::new(parse(&r.alpha)?, parse(&r.beta)?, r.gamma_a, r.gamma_b)
    }
}

impl fmt::Display for Context {
    /// The canonical serialization; also used as the table key in model files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alpha: String = self.alpha.iter().map(|s| s.as_char()).collect();
        let beta: String = self.beta.iter().map(|s| s.as_char()).collect();
        write!(
            f,
            "{{\"alpha\":\"{alpha}\",\"beta\":\"{beta}\",\"gA\":{},\"gB\":{}}}",
            self.gamma_a, self.gamma_b
        )
    }
}

fn pack_bits(settings: &[Setting]) -> u64 {
    settings.iter().fold(0, |acc, s| (acc << 1) | s.bit())
}

fn unpack_bits(mut bits: u64, n: u32) -> Vec<Setting> {
    let mut out = vec![Setting::Mx; n as usize];
    for i in (0..n as usize).rev() {
        out[i] = Setting::from_bit(bits);
        bits >>= 1;
    }
    out
}

/// Ω = N²·2^(2N): the number of independent contexts (= hidden-variables
/// distributions in a general superdeterministic model).
pub fn context_count(n: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidContext("N must be >= 1".into()));
    }
    Ok((BigUint::from(n) * BigUint::from(n)) << (2 * n as usize))
}

/// Largest N whose Ω fits in u64; enumeration is only possible far below this.
const MAX_ENUMERABLE_N: u32 = 27;

/// Ω as u64, for enumeration and table indexing.
pub fn context_count_u64(n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidContext("N must be >= 1".into()));
    }
    if n > MAX_ENUMERABLE_N {
        return Err(Error::ScenarioTooLarge { n });
    }
    Ok(((n as u64) * (n as u64)) << (2 * n))
}

/// The context at canonical position `index`, inverse of [`Context::index`].
pub fn context_from_index(n: u32, index: u64) -> Result<Context> {
    let total = context_count_u64(n)?;
    if index >= total {
        return Err(Error::InvalidContext(format!(
            "context index {index} out of range [0, {total})"
        )));
    }
    let width = n as u64;
    let beta_bits = index & ((1 << n) - 1);
    let rest = index >> n;
    let alpha_bits = rest & ((1 << n) - 1);
    let choice = rest >> n;
    Context::new(
        unpack_bits(alpha_bits, n),
        unpack_bits(beta_bits, n),
        (choice / width) as u32 + 1,
        (choice % width) as u32 + 1,
    )
}

/// All contexts in canonical order.
pub fn enumerate_contexts(n: u32) -> Result<impl Iterator<Item = Context>> {
    let total = context_count_u64(n)?;
    Ok((0..total).map(move |i| context_from_index(n, i).expect("index in range")))
}

/// Partition of all contexts into the four sectors by induced settings.
/// Every sector has exactly Ω/4 contexts.
pub fn contexts_by_settings(n: u32) -> Result<BTreeMap<SettingPair, Vec<Context>>> {
    let mut map: BTreeMap<SettingPair, Vec<Context>> =
        SettingPair::ALL.iter().map(|&p| (p, Vec::new())).collect();
    for c in enumerate_contexts(n)? {
        map.get_mut(&c.induced_settings()).expect("all pairs present").push(c);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use Setting::{Mx, Mz};

    #[test]
    fn induced_settings_examples() {
        let c = Context::new(vec![Mx, Mz], vec![Mz, Mz], 2, 1).unwrap();
        assert_eq!(c.induced_settings(), SettingPair(Mz, Mz));
        let c = Context::new(vec![Mx], vec![Mx], 1, 1).unwrap();
        assert_eq!(c.induced_settings(), SettingPair(Mx, Mx));
        let c = Context::new(vec![Mx, Mx, Mz], vec![Mx, Mz, Mx], 3, 2).unwrap();
        assert_eq!(c.induced_settings(), SettingPair(Mz, Mz));
    }

    #[test]
    fn invalid_contexts_rejected() {
        assert!(Context::new(vec![], vec![], 1, 1).is_err());
        assert!(Context::new(vec![Mx], vec![Mx, Mz], 1, 1).is_err());
        assert!(Context::new(vec![Mx], vec![Mx], 0, 1).is_err());
        assert!(Context::new(vec![Mx], vec![Mx], 1, 2).is_err());
    }

    #[test]
    fn context_counts() {
        assert_eq!(context_count(1).unwrap().to_u64(), Some(4));
        assert_eq!(context_count(2).unwrap().to_u64(), Some(64));
        assert_eq!(context_count(3).unwrap().to_u64(), Some(576));
        assert_eq!(context_count_u64(4).unwrap(), 4096);
        assert!(context_count(0).is_err());
    }

    #[test]
    fn enumeration_matches_count_and_is_a_bijection() {
        for n in 1..=4 {
            let all: Vec<Context> = enumerate_contexts(n).unwrap().collect();
            assert_eq!(all.len() as u64, context_count_u64(n).unwrap());
            for (i, c) in all.iter().enumerate() {
                assert_eq!(c.index(), i as u64);
                assert_eq!(&context_from_index(n, i as u64).unwrap(), c);
            }
        }
    }

    #[test]
    fn sectors_partition_evenly() {
        for n in 1..=4 {
            let sectors = contexts_by_settings(n).unwrap();
            let omega = context_count_u64(n).unwrap();
            assert_eq!(sectors.len(), 4);
            let mut seen = 0;
            for (pair, members) in &sectors {
                assert_eq!(members.len() as u64, omega / 4, "sector {pair} at N={n}");
                for c in members {
                    assert_eq!(c.induced_settings(), *pair);
                    seen += 1;
                }
            }
            assert_eq!(seen, omega);
        }
    }

    #[test]
    fn canonical_order_is_gamma_major_then_bitstrings() {
        // N=2: the first 16 contexts all have γ_A=γ_B=1; alpha advances as a
        // 2-bit string before gamma moves, and beta is the fastest axis.
        let all: Vec<Context> = enumerate_contexts(2).unwrap().collect();
        assert_eq!(all[0].alpha(), &[Mx, Mx]);
        assert_eq!(all[0].beta(), &[Mx, Mx]);
        assert_eq!((all[0].gamma_a(), all[0].gamma_b()), (1, 1));
        assert_eq!(all[1].beta(), &[Mx, Mz]);
        assert_eq!(all[4].alpha(), &[Mx, Mz]);
        assert_eq!((all[16].gamma_a(), all[16].gamma_b()), (1, 2));
        assert_eq!((all[32].gamma_a(), all[32].gamma_b()), (2, 1));
    }

    #[test]
    fn json_round_trip_matches_compact_form() {
        let c = Context::new(vec![Mx, Mz], vec![Mz, Mz], 1, 2).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"alpha":"xz","beta":"zz","gA":1,"gB":2}"#);
        assert_eq!(json, c.to_string());
        let back: Context = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        // Malformed settings string is rejected.
        assert!(serde_json::from_str::<Context>(
            r#"{"alpha":"xq","beta":"zz","gA":1,"gB":2}"#
        )
        .is_err());
    }
}
