//! Exact nonnegative counts.
//!
//! Values stay in a `u128` until an operation overflows, then move to a
//! `BigUint`. A `Big` value is always larger than `u128::MAX`, so the
//! representation is canonical and derived equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BigCount {
    Small(u128),
    Big(BigUint),
}

impl BigCount {
    pub const ZERO: BigCount = BigCount::Small(0);
    pub const ONE: BigCount = BigCount::Small(1);

    fn from_biguint(v: BigUint) -> Self {
        match v.to_u128() {
            Some(s) => BigCount::Small(s),
            None => BigCount::Big(v),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            BigCount::Small(s) => BigUint::from(*s),
            BigCount::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, BigCount::Small(0))
    }

    pub fn as_u128(&self) -> Option<u128> {
        match self {
            BigCount::Small(s) => Some(*s),
            BigCount::Big(_) => None,
        }
    }

    pub fn pow2(exp: u32) -> Self {
        if exp < 128 {
            BigCount::Small(1u128 << exp)
        } else {
            BigCount::Big(BigUint::one() << exp as usize)
        }
    }
}

impl Default for BigCount {
    fn default() -> Self {
        BigCount::ZERO
    }
}

impl From<u128> for BigCount {
    fn from(v: u128) -> Self {
        BigCount::Small(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount::Small(v as u128)
    }
}

impl From<u32> for BigCount {
    fn from(v: u32) -> Self {
        BigCount::Small(v as u128)
    }
}

impl From<usize> for BigCount {
    fn from(v: usize) -> Self {
        BigCount::Small(v as u128)
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount::from_biguint(v)
    }
}

impl Add for &BigCount {
    type Output = BigCount;
    fn add(self, rhs: &BigCount) -> BigCount {
        if let (BigCount::Small(a), BigCount::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_add(*b) {
                return BigCount::Small(s);
            }
        }
        BigCount::from_biguint(self.to_biguint() + rhs.to_biguint())
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        &self + &rhs
    }
}

impl AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        *self = &*self + rhs;
    }
}

impl AddAssign for BigCount {
    fn add_assign(&mut self, rhs: BigCount) {
        *self = &*self + &rhs;
    }
}

impl AddAssign<u128> for BigCount {
    fn add_assign(&mut self, rhs: u128) {
        *self = &*self + &BigCount::Small(rhs);
    }
}

impl Mul for &BigCount {
    type Output = BigCount;
    fn mul(self, rhs: &BigCount) -> BigCount {
        if let (BigCount::Small(a), BigCount::Small(b)) = (self, rhs) {
            if let Some(p) = a.checked_mul(*b) {
                return BigCount::Small(p);
            }
        }
        BigCount::from_biguint(self.to_biguint() * rhs.to_biguint())
    }
}

impl Mul for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: BigCount) -> BigCount {
        &self * &rhs
    }
}

impl MulAssign<&BigCount> for BigCount {
    fn mul_assign(&mut self, rhs: &BigCount) {
        *self = &*self * rhs;
    }
}

impl Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::ZERO, |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a BigCount> for BigCount {
    fn sum<I: Iterator<Item = &'a BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::ZERO, |acc, x| &acc + x)
    }
}

impl Product for BigCount {
    fn product<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::ONE, |acc, x| &acc * &x)
    }
}

impl Ord for BigCount {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BigCount::Small(a), BigCount::Small(b)) => a.cmp(b),
            (BigCount::Small(_), BigCount::Big(_)) => Ordering::Less,
            (BigCount::Big(_), BigCount::Small(_)) => Ordering::Greater,
            (BigCount::Big(a), BigCount::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for BigCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BigCount::Small(s) => write!(f, "{s}"),
            BigCount::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BigCount {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(crate::Error::invalid(format!("not a decimal count: {s:?}")));
        }
        let v = BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| crate::Error::invalid(format!("not a decimal count: {s:?}")))?;
        Ok(BigCount::from_biguint(v))
    }
}

// Counts travel as decimal strings so no consumer ever rounds them.
impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Zero for BigCount {
    fn zero() -> Self {
        BigCount::ZERO
    }
    fn is_zero(&self) -> bool {
        BigCount::is_zero(self)
    }
}

impl One for BigCount {
    fn one() -> Self {
        BigCount::ONE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promotes_on_overflow_and_demotes_when_small() {
        let max = BigCount::Small(u128::MAX);
        let over = &max + &BigCount::ONE;
        assert!(matches!(over, BigCount::Big(_)));
        assert_eq!(over.to_string(), "340282366920938463463374607431768211456");
        assert_eq!(BigCount::from(BigUint::from(7u32)), BigCount::Small(7));
        assert_eq!(BigCount::pow2(128), over);
    }

    #[test]
    fn product_of_large_values_is_exact() {
        let d7: BigCount = "2414682040998".parse().unwrap();
        let cube = &(&d7 * &d7) * &d7;
        assert_eq!(cube.to_string(), "14079260882101017427338656343098491992");
        let big = &cube * &cube;
        assert!(matches!(big, BigCount::Big(_)));
        assert_eq!(
            big.to_string(),
            "198225586986259919350269047756281658666260479743944732692660711184488128064"
        );
    }

    #[test]
    fn rejects_non_decimal_text() {
        assert!("".parse::<BigCount>().is_err());
        assert!("-1".parse::<BigCount>().is_err());
        assert!("1e5".parse::<BigCount>().is_err());
    }

    #[test]
    fn serializes_as_string() {
        let v = BigCount::from(2414682040998u64);
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"2414682040998\"");
        let back: BigCount = serde_json::from_str("\"2414682040998\"").unwrap();
        assert_eq!(back, v);
    }
}
