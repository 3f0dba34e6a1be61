//! Exact arithmetic helpers shared across the crate.
//!
//! Counts are `BigUint`, probabilities are `BigRational`. Floating point
//! appears only in log-space reporting (`log10 *`) and entropy values.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const LOG10_2: f64 = std::f64::consts::LOG10_2;

pub fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Exact rational n/d.
pub fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// log10 of a positive big integer, accurate to ~1 ulp of the mantissa even
/// when the value has thousands of digits.
pub fn log10_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log10 of zero");
    if let Some(f) = x.to_f64() {
        if f.is_finite() {
            return f.log10();
        }
    }
    // Take the top 64 bits as mantissa, account for the shifted-out bits.
    let bits = x.bits();
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64-bit window");
    ((top as f64).log2() + shift as f64) * LOG10_2
}

/// Number of decimal digits of `x` (approximate, used only for print budgets).
pub fn decimal_digits(x: &BigUint) -> u64 {
    if x.is_zero() {
        return 1;
    }
    log10_biguint(x).floor() as u64 + 1
}

/// Rational → f64, safe for ratios whose parts exceed f64 range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    if let (Some(n), Some(d)) = (num.to_f64(), den.to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let ln = log10_biguint(num.magnitude());
    let ld = log10_biguint(den.magnitude());
    sign * 10f64.powf(ln - ld)
}

/// Checks Σ entries == 1 and entries ≥ 0; `what` names the offending table in errors.
pub fn check_distribution(entries: &[BigRational], what: &str) -> crate::Result<()> {
    let mut sum = BigRational::zero();
    for e in entries {
        if e.is_negative() {
            return Err(crate::Error::NegativeProbability {
                context: what.to_string(),
            });
        }
        sum += e;
    }
    if !sum.is_one() {
        return Err(crate::Error::UnnormalizedDistribution {
            context: format!("{what} (sum = {sum})"),
        });
    }
    Ok(())
}

/// Serde adapter: `BigUint` as a decimal string (no precision loss in JSON).
pub mod serde_biguint_dec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: `Option<BigUint>` as decimal string or null.
pub mod serde_opt_biguint_dec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter: `BigRational` as a "numerator/denominator" string ("3" for integers).
pub mod serde_rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::rational_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::rational_from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub fn rational_to_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_from_str(s: &str) -> std::result::Result<BigRational, String> {
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|e| e.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(format!("zero denominator in rational '{s}'"));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}
