//! Integer lists: the multiset encoding of a factorial ratio.
//!
//! Positive entries are numerator factorials, negated entries denominator
//! factorials. A list never holds 0 and never holds both `v` and `-v`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntList {
    entries: Vec<i64>,
}

/// Positives ascending, then negatives by ascending magnitude.
fn order_key(v: &i64) -> (bool, u64) {
    (*v < 0, v.unsigned_abs())
}

impl IntList {
    /// Validates and canonicalizes. Repeated entries are fine; `v` with `-v`
    /// is not.
    pub fn new(raw: &[i64]) -> Result<IntList> {
        let mut entries = raw.to_vec();
        if entries.contains(&0) {
            return Err(Error::ZeroEntry);
        }
        entries.sort_by_key(order_key);
        for w in entries.windows(1) {
            let v = w[0];
            if v > 0
                && entries
                    .binary_search_by_key(&order_key(&-v), order_key)
                    .is_ok()
            {
                return Err(Error::Degenerate(v));
            }
        }
        Ok(IntList { entries })
    }

    /// Multiset union of `raw` with `v, -v` pairs cancelled until nothing
    /// degenerate is left. Zero entries are an error.
    pub fn cancelled(raw: impl IntoIterator<Item = i64>) -> Result<IntList> {
        let mut net: BTreeMap<u64, i64> = BTreeMap::new();
        for v in raw {
            if v == 0 {
                return Err(Error::ZeroEntry);
            }
            *net.entry(v.unsigned_abs()).or_default() += v.signum();
        }
        Ok(IntList::from_net(&net))
    }

    fn from_net(net: &BTreeMap<u64, i64>) -> IntList {
        let mut entries = Vec::new();
        for (&m, &c) in net {
            let v = m as i64;
            let v = if c < 0 { -v } else { v };
            entries.extend(std::iter::repeat_n(v, c.unsigned_abs() as usize));
        }
        entries.sort_by_key(order_key);
        IntList { entries }
    }

    pub fn empty() -> IntList {
        IntList::default()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> i128 {
        self.entries.iter().map(|&v| v as i128).sum()
    }

    /// Number of negative entries minus number of positive entries.
    pub fn height(&self) -> i64 {
        self.entries
            .iter()
            .map(|&v| if v < 0 { 1 } else { -1 })
            .sum()
    }

    pub fn positives(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.iter().copied().filter(|&v| v > 0)
    }

    /// Magnitudes of the negative entries.
    pub fn negatives(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.iter().copied().filter(|&v| v < 0).map(|v| -v)
    }

    /// gcd of the absolute values; 0 for the empty list.
    pub fn content(&self) -> u64 {
        self.entries
            .iter()
            .fold(0u64, |g, &v| g.gcd(&v.unsigned_abs()))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn max_abs(&self) -> u64 {
        self.entries
            .iter()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn to_primitive(&self) -> (IntList, u64) {
        let g = self.content();
        if g <= 1 {
            return (self.clone(), g.max(1));
        }
        let entries = self.entries.iter().map(|&v| v / g as i64).collect();
        (IntList { entries }, g)
    }

    pub fn dilate(&self, k: i64) -> Result<IntList> {
        if k == 0 {
            return Err(Error::ZeroDilation);
        }
        let entries = self
            .entries
            .iter()
            .map(|&v| v.checked_mul(k).ok_or(Error::Overflow("dilation")))
            .collect::<Result<Vec<_>>>()?;
        // scaling by k < 0 flips the sign pattern, so the order changes
        IntList::new(&entries)
    }

    pub fn negate(&self) -> IntList {
        self.dilate(-1).expect("negation cannot fail")
    }

    /// Concatenation with cancellation of `v, -v` pairs. May be empty.
    pub fn concat(&self, other: &IntList) -> IntList {
        IntList::cancelled(self.entries.iter().chain(&other.entries).copied())
            .expect("list entries are nonzero")
    }

    /// Net count per magnitude: positive copies minus negative copies.
    pub fn net_counts(&self) -> BTreeMap<u64, i64> {
        let mut net = BTreeMap::new();
        for &v in &self.entries {
            *net.entry(v.unsigned_abs()).or_default() += v.signum();
        }
        net
    }

    /// The unique list `c` with `concat(b, c) == self`.
    pub fn remove(&self, b: &IntList) -> IntList {
        self.concat(&b.negate())
    }

    /// Number of entries divisible by `p`, and their sum.
    pub fn multiples_of(&self, p: i64) -> (usize, i128) {
        self.entries
            .iter()
            .filter(|&&v| v % p == 0)
            .fold((0, 0), |(n, s), &v| (n + 1, s + v as i128))
    }

    /// Bracketed text form, e.g. `[1,30,-6,-10,-15]`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for IntList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for IntList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"[30,1,-15,-10,-6]"`, `"30,1,-15,-10,-6"` or a JSON array, without
/// validating list invariants.
pub fn parse_integers(text: &str) -> Result<Vec<i64>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(t)
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.replace('\u{2212}', "-")
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
        })
        .collect()
}

impl FromStr for IntList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntList::new(&parse_integers(s)?)
    }
}

impl TryFrom<Vec<i64>> for IntList {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        IntList::new(&v)
    }
}

impl Serialize for IntList {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        IntList::new(&v).map_err(serde::de::Error::custom)
    }
}

#[macro_export]
macro_rules! list {
    ($($v:expr),* $(,)?) => {
        $crate::list::IntList::new(&[$($v),*]).expect("valid list literal")
    };
}
