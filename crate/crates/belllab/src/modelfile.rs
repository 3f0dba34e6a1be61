//! The on-disk model format.
//!
//! One JSON object with fields `{class, lambda_count, denominator, kernel,
//! tables}`. Hidden-variables tables are lattice numerators over the common
//! `denominator`; the `tables` keys depend on the class:
//!
//! * `superdeterministic` — one entry per context, keyed by the canonical
//!   context serialization (the compact JSON string of the context);
//! * `retrocausal` — p(λ | M_B), keyed by the M_B character `"x"` / `"z"`;
//! * `nonlocal` — the single p(λ), keyed by `"*"`.
//!
//! Kernels carry exact rationals as `"n/d"` strings.

use crate::kernel::KernelRepr;
use crate::models::{
    CausalModel, NonlocalModel, NonlocalWingKernel, RetrocausalModel, SuperdetModel, WingKernel,
};
use crate::scenario::{context_count_u64, Context, Setting};
use crate::simplex::LatticeDistribution;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
#[serde(tag = "class")]
enum ModelRepr {
    #[serde(rename = "superdeterministic")]
    Superdeterministic {
        lambda_count: usize,
        denominator: u64,
        kernel: KernelRepr,
        tables: BTreeMap<String, Vec<u64>>,
    },
    #[serde(rename = "retrocausal")]
    Retrocausal {
        lambda_count: usize,
        denominator: u64,
        kernel: WingPairRepr,
        tables: BTreeMap<String, Vec<u64>>,
    },
    #[serde(rename = "nonlocal")]
    Nonlocal {
        lambda_count: usize,
        denominator: u64,
        kernel: NonlocalPairRepr,
        tables: BTreeMap<String, Vec<u64>>,
    },
}

/// Factorized kernel of a retrocausal model: `p_oa[λ][M_A][O_A]`,
/// `p_ob[λ][M_B][O_B]`, rationals as strings.
#[derive(Serialize, Deserialize)]
struct WingPairRepr {
    p_oa: Vec<Vec<Vec<String>>>,
    p_ob: Vec<Vec<Vec<String>>>,
}

/// Factorized kernel of a nonlocal model: `p_oa[λ][(M_A,M_B) sector][O_A]`.
#[derive(Serialize, Deserialize)]
struct NonlocalPairRepr {
    p_oa: Vec<Vec<Vec<String>>>,
    p_ob: Vec<Vec<Vec<String>>>,
}

pub fn to_json(model: &CausalModel) -> String {
    let repr = match model {
        CausalModel::Superdeterministic(m) => ModelRepr::Superdeterministic {
            lambda_count: m.lambda_count(),
            denominator: m.denominator(),
            kernel: KernelRepr::from(m.kernel()),
            tables: superdet_tables(m),
        },
        CausalModel::Retrocausal(m) => {
            let (denominator, tables) = hv_tables(&[
                ("x", m.hv_given_setting(Setting::Mx)),
                ("z", m.hv_given_setting(Setting::Mz)),
            ]);
            ModelRepr::Retrocausal {
                lambda_count: m.lambda_count(),
                denominator,
                kernel: WingPairRepr {
                    p_oa: wing_to_repr(m.p_oa()),
                    p_ob: wing_to_repr(m.p_ob()),
                },
                tables,
            }
        }
        CausalModel::Nonlocal(m) => {
            let (denominator, tables) = hv_tables(&[("*", m.hv())]);
            ModelRepr::Nonlocal {
                lambda_count: m.lambda_count(),
                denominator,
                kernel: NonlocalPairRepr {
                    p_oa: nonlocal_wing_to_repr(m.p_oa()),
                    p_ob: wing_to_repr(m.p_ob()),
                },
                tables,
            }
        }
    };
    serde_json::to_string_pretty(&repr).expect("model serialization")
}

pub fn from_json(text: &str) -> Result<CausalModel> {
    let repr: ModelRepr =
        serde_json::from_str(text).map_err(|e| Error::ModelValidation(e.to_string()))?;
    match repr {
        ModelRepr::Superdeterministic {
            lambda_count,
            denominator,
            kernel,
            tables,
        } => {
            let kernel = kernel.build()?;
            if kernel.lambda_count() != lambda_count {
                return Err(Error::LambdaMismatch {
                    kernel: kernel.lambda_count(),
                    table: lambda_count,
                });
            }
            let n = infer_n(&tables)?;
            let omega = context_count_u64(n)?;
            let mut slots: Vec<Option<LatticeDistribution>> = vec![None; omega as usize];
            for (key, numerators) in &tables {
                let context: Context = serde_json::from_str(key).map_err(|e| {
                    Error::ModelValidation(format!("bad context key {key}: {e}"))
                })?;
                if context.n() != n {
                    return Err(Error::ModelValidation(format!(
                        "context key {key} has N={}, expected {n}",
                        context.n()
                    )));
                }
                let dist = LatticeDistribution::new(numerators.clone(), denominator)?;
                let idx = context.index() as usize;
                if slots[idx].replace(dist).is_some() {
                    return Err(Error::ModelValidation(format!("duplicate table for {key}")));
                }
            }
            let tables: Vec<LatticeDistribution> = slots
                .into_iter()
                .enumerate()
                .map(|(i, d)| {
                    d.ok_or_else(|| {
                        Error::ModelValidation(format!("missing table for context index {i}"))
                    })
                })
                .collect::<Result<_>>()?;
            Ok(CausalModel::Superdeterministic(SuperdetModel::new(
                n, kernel, tables,
            )?))
        }
        ModelRepr::Retrocausal {
            lambda_count,
            denominator,
            kernel,
            tables,
        } => {
            let p_oa = wing_from_repr(&kernel.p_oa, lambda_count)?;
            let p_ob = wing_from_repr(&kernel.p_ob, lambda_count)?;
            let hv_x = lattice_to_rationals(&tables, "x", denominator, lambda_count)?;
            let hv_z = lattice_to_rationals(&tables, "z", denominator, lambda_count)?;
            Ok(CausalModel::Retrocausal(RetrocausalModel::new(
                p_oa,
                p_ob,
                [hv_x, hv_z],
            )?))
        }
        ModelRepr::Nonlocal {
            lambda_count,
            denominator,
            kernel,
            tables,
        } => {
            let p_oa = nonlocal_wing_from_repr(&kernel.p_oa, lambda_count)?;
            let p_ob = wing_from_repr(&kernel.p_ob, lambda_count)?;
            let hv = lattice_to_rationals(&tables, "*", denominator, lambda_count)?;
            Ok(CausalModel::Nonlocal(NonlocalModel::new(p_oa, p_ob, hv)?))
        }
    }
}

fn superdet_tables(m: &SuperdetModel) -> BTreeMap<String, Vec<u64>> {
    crate::scenario::enumerate_contexts(m.n())
        .expect("validated N")
        .map(|c| {
            let nums = m.tables()[c.index() as usize].numerators().to_vec();
            (c.to_string(), nums)
        })
        .collect()
}

/// Rational hv distributions → numerators over their least common denominator.
fn hv_tables(entries: &[(&str, &[BigRational])]) -> (u64, BTreeMap<String, Vec<u64>>) {
    use num_traits::ToPrimitive;
    let mut denom = BigInt::from(1);
    for (_, hv) in entries {
        for p in *hv {
            denom = num_integer::lcm(denom, p.denom().clone());
        }
    }
    let tables = entries
        .iter()
        .map(|(key, hv)| {
            let nums = hv
                .iter()
                .map(|p| {
                    (p.numer() * &denom / p.denom())
                        .to_u64()
                        .expect("hv numerators over the common denominator must fit u64")
                })
                .collect();
            (key.to_string(), nums)
        })
        .collect();
    (
        denom
            .to_u64()
            .expect("hv distributions must share a common denominator that fits u64"),
        tables,
    )
}

fn lattice_to_rationals(
    tables: &BTreeMap<String, Vec<u64>>,
    key: &str,
    denominator: u64,
    lambda_count: usize,
) -> Result<Vec<BigRational>> {
    let numerators = tables
        .get(key)
        .ok_or_else(|| Error::ModelValidation(format!("missing hv table \"{key}\"")))?;
    if numerators.len() != lambda_count {
        return Err(Error::LambdaMismatch {
            kernel: lambda_count,
            table: numerators.len(),
        });
    }
    let dist = LatticeDistribution::new(numerators.clone(), denominator)?;
    Ok((0..lambda_count).map(|i| dist.probability(i)).collect())
}

fn infer_n(tables: &BTreeMap<String, Vec<u64>>) -> Result<u32> {
    let key = tables
        .keys()
        .next()
        .ok_or_else(|| Error::ModelValidation("model has no context tables".into()))?;
    let context: Context = serde_json::from_str(key)
        .map_err(|e| Error::ModelValidation(format!("bad context key {key}: {e}")))?;
    Ok(context.n())
}

fn wing_to_repr(w: &WingKernel) -> Vec<Vec<Vec<String>>> {
    w.rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|dist| dist.iter().map(crate::exact::rational_to_string).collect())
                .collect()
        })
        .collect()
}

fn nonlocal_wing_to_repr(w: &NonlocalWingKernel) -> Vec<Vec<Vec<String>>> {
    w.rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|dist| dist.iter().map(crate::exact::rational_to_string).collect())
                .collect()
        })
        .collect()
}

fn parse_cells<const K: usize>(
    rows: &[Vec<Vec<String>>],
    lambda_count: usize,
    what: &str,
) -> Result<Vec<[[BigRational; 2]; K]>> {
    if rows.len() != lambda_count {
        return Err(Error::LambdaMismatch {
            kernel: lambda_count,
            table: rows.len(),
        });
    }
    rows.iter()
        .enumerate()
        .map(|(lambda, row)| {
            if row.len() != K {
                return Err(Error::ModelValidation(format!(
                    "{what} row λ={lambda} has {} cells, expected {K}",
                    row.len()
                )));
            }
            let mut out: [[BigRational; 2]; K] =
                std::array::from_fn(|_| std::array::from_fn(|_| BigRational::from_integer(0.into())));
            for (k, cell) in row.iter().enumerate() {
                if cell.len() != 2 {
                    return Err(Error::ModelValidation(format!(
                        "{what} cell λ={lambda},{k} has {} outcomes, expected 2",
                        cell.len()
                    )));
                }
                for (o, s) in cell.iter().enumerate() {
                    out[k][o] =
                        crate::exact::rational_from_str(s).map_err(Error::ModelValidation)?;
                }
            }
            Ok(out)
        })
        .collect()
}

fn wing_from_repr(rows: &[Vec<Vec<String>>], lambda_count: usize) -> Result<WingKernel> {
    WingKernel::new(parse_cells::<2>(rows, lambda_count, "wing kernel")?)
}

fn nonlocal_wing_from_repr(
    rows: &[Vec<Vec<String>>],
    lambda_count: usize,
) -> Result<NonlocalWingKernel> {
    NonlocalWingKernel::new(parse_cells::<4>(rows, lambda_count, "nonlocal wing kernel")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::kernel::OutcomeKernel;

    fn lattice(nums: &[u64], l: u64) -> LatticeDistribution {
        LatticeDistribution::new(nums.to_vec(), l).unwrap()
    }

    fn sample_superdet() -> CausalModel {
        CausalModel::Superdeterministic(
            SuperdetModel::make_constrained(
                2,
                OutcomeKernel::readout(),
                [
                    lattice(&[2, 1, 1, 0], 4),
                    lattice(&[1, 2, 0, 1], 4),
                    lattice(&[0, 1, 2, 1], 4),
                    lattice(&[1, 0, 1, 2], 4),
                ],
            )
            .unwrap(),
        )
    }

    fn half_wing(lambda_count: usize) -> WingKernel {
        WingKernel::new(
            (0..lambda_count)
                .map(|_| std::array::from_fn(|_| [ratio(1, 2), ratio(1, 2)]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn superdeterministic_round_trip() {
        let model = sample_superdet();
        let json = to_json(&model);
        assert!(json.contains("\"class\": \"superdeterministic\""));
        let back = from_json(&json).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn retrocausal_round_trip() {
        let model = CausalModel::Retrocausal(
            RetrocausalModel::new(
                half_wing(3),
                half_wing(3),
                [
                    vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)],
                    vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)],
                ],
            )
            .unwrap(),
        );
        let json = to_json(&model);
        let back = from_json(&json).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn nonlocal_round_trip() {
        let p_oa = NonlocalWingKernel::new(
            (0..2)
                .map(|_| std::array::from_fn(|_| [ratio(1, 4), ratio(3, 4)]))
                .collect(),
        )
        .unwrap();
        let model = CausalModel::Nonlocal(
            NonlocalModel::new(p_oa, half_wing(2), vec![ratio(2, 5), ratio(3, 5)]).unwrap(),
        );
        let json = to_json(&model);
        let back = from_json(&json).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn validation_failures_are_reported() {
        assert!(matches!(from_json("{"), Err(Error::ModelValidation(_))));
        assert!(matches!(
            from_json(r#"{"class":"weird"}"#),
            Err(Error::ModelValidation(_))
        ));
        // A table missing for one context.
        let json = to_json(&sample_superdet());
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let tables = v["tables"].as_object_mut().unwrap();
        let key = tables.keys().next().unwrap().clone();
        tables.remove(&key);
        let broken = serde_json::to_string(&v).unwrap();
        assert!(matches!(
            from_json(&broken),
            Err(Error::ModelValidation(_))
        ));
    }
}
