//! Decision procedures on concrete lists.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::list::IntList;
use crate::rat::Rat;
use crate::step;

/// `(1/12) * sum over i, j of gcd(a_i, a_j)^2 / (a_i a_j)`.
pub fn norm(a: &IntList) -> Result<Rat> {
    if a.is_empty() {
        return Err(Error::EmptyList);
    }
    if let Some(r) = norm_small(a.entries()) {
        return Ok(r);
    }
    let mut acc = Rat::zero();
    let e = a.entries();
    for &x in e {
        for &y in e {
            let g = BigInt::from(x.unsigned_abs().gcd(&y.unsigned_abs()));
            acc = acc + Rat::new(&g * &g, BigInt::from(x) * BigInt::from(y));
        }
    }
    Ok(acc / Rat::from_int(12))
}

/// Over `L = lcm |a_i|` every term is `g^2 (L/a_i)(L/a_j) / L^2`.
pub(crate) fn norm_small(e: &[i64]) -> Option<Rat> {
    let (num, l) = norm_parts(e)?;
    Some(Rat::new(num, 12 * l * l))
}

/// `12 N L^2` and `L`, in `i128`.
pub(crate) fn norm_parts(e: &[i64]) -> Option<(i128, i128)> {
    let mut l: i128 = 1;
    for &v in e {
        l = l.lcm(&(v.unsigned_abs() as i128));
        if l > 1 << 40 {
            return None;
        }
    }
    let co: Vec<i128> = e.iter().map(|&v| l / v as i128).collect();
    // diagonal terms are each exactly L^2
    let mut s: i128 = (e.len() as i128).checked_mul(l * l)?;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let g = e[i].unsigned_abs().gcd(&e[j].unsigned_abs()) as i128;
            s = s.checked_add(2 * (g * g).checked_mul(co[i] * co[j])?)?;
        }
    }
    Some((s, l))
}

/// Outcome of the Landau test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RatioVerdict {
    Integral {
        height: i64,
        value_range: Vec<i64>,
    },
    NotIntegral {
        witness_x: Rat,
        value: i64,
        value_range: Vec<i64>,
    },
    Invalid {
        reason: String,
    },
}

impl RatioVerdict {
    pub fn is_integral(&self) -> bool {
        matches!(self, RatioVerdict::Integral { .. })
    }

    pub fn height(&self) -> Option<i64> {
        match self {
            RatioVerdict::Integral { height, .. } => Some(*height),
            _ => None,
        }
    }

    pub fn value_range(&self) -> Option<&[i64]> {
        match self {
            RatioVerdict::Integral { value_range, .. }
            | RatioVerdict::NotIntegral { value_range, .. } => Some(value_range),
            RatioVerdict::Invalid { .. } => None,
        }
    }
}

/// Sweep summary: `F` at every breakpoint, folded.
struct Profile {
    range: BTreeSet<i64>,
    first_bad: Option<(Rat, i64)>,
}

const PAR_THRESHOLD: usize = 1 << 14;

fn profile(a: &IntList, lo: i64, hi: i64) -> Profile {
    if let Some(g) = step::SmallGrid::new(a) {
        let e = a.entries();
        let eval = |t: &i128| step::floor_sum_at(e, *t, g.lcm) as i64;
        let vals: Vec<i64> = if g.ticks.len() >= PAR_THRESHOLD {
            g.ticks.par_iter().map(eval).collect()
        } else {
            g.ticks.iter().map(eval).collect()
        };
        let first_bad = first_out(&vals, lo, hi).map(|i| (Rat::new(g.ticks[i], g.lcm), vals[i]));
        return Profile {
            range: vals.into_iter().collect(),
            first_bad,
        };
    }
    let (pts, vals) = step::floor_sum_profile_big(a);
    let vals: Vec<i64> = vals
        .iter()
        .map(|v| step::to_i64(v).expect("floor sum fits in i64"))
        .collect();
    let first_bad = first_out(&vals, lo, hi).map(|i| (pts[i].clone(), vals[i]));
    Profile {
        range: vals.into_iter().collect(),
        first_bad,
    }
}

/// Index of the first value below `lo`, else the first above `hi`. A
/// value above the height forces one below zero elsewhere, so the first
/// negative value is the witness of choice.
fn first_out(vals: &[i64], lo: i64, hi: i64) -> Option<usize> {
    vals.iter()
        .position(|&v| v < lo)
        .or_else(|| vals.iter().position(|&v| v > hi))
}

fn shape_problem(a: &IntList) -> Option<String> {
    if a.is_empty() {
        return Some("empty list".into());
    }
    if a.sum() != 0 {
        return Some(format!("sum is {}, not 0", a.sum()));
    }
    if a.height() < 1 {
        return Some(format!("height is {}, not positive", a.height()));
    }
    None
}

/// Landau test: `F(x) >= 0` just right of every breakpoint.
pub fn is_integral_ratio(a: &IntList) -> RatioVerdict {
    if let Some(reason) = shape_problem(a) {
        return RatioVerdict::Invalid { reason };
    }
    let h = a.height();
    let p = profile(a, 0, h);
    let value_range: Vec<i64> = p.range.into_iter().collect();
    match p.first_bad {
        None => RatioVerdict::Integral {
            height: h,
            value_range,
        },
        Some((witness_x, value)) => RatioVerdict::NotIntegral {
            witness_x,
            value,
            value_range,
        },
    }
}

/// Values of `F` over `[0, 1)`.
pub fn value_range(a: &IntList) -> Result<BTreeSet<i64>> {
    if a.is_empty() {
        return Err(Error::EmptyList);
    }
    if a.sum() != 0 {
        return Err(Error::Precondition(
            "value range needs a zero-sum list".into(),
        ));
    }
    Ok(profile(a, i64::MIN, i64::MAX).range)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub integral: bool,
    pub first_failure: Option<u64>,
    pub checked: u64,
}

/// Direct check that `prod (p n)! / prod (q n)!` is an integer for
/// `n = 1..=n_max`, with arbitrary-precision factorials.
pub fn factorial_oracle(a: &IntList, n_max: u64) -> Result<OracleOutcome> {
    if a.sum() != 0 {
        return Err(Error::Precondition(
            "factorial oracle needs a zero-sum list".into(),
        ));
    }
    let top = a.max_abs() * n_max;
    let mut fact: Vec<BigUint> = Vec::with_capacity(top as usize + 1);
    fact.push(BigUint::one());
    for k in 1..=top {
        let next = &fact[k as usize - 1] * BigUint::from(k);
        fact.push(next);
    }
    for n in 1..=n_max {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for &v in a.entries() {
            let f = &fact[(v.unsigned_abs() * n) as usize];
            if v > 0 {
                num *= f;
            } else {
                den *= f;
            }
        }
        if !(num % den).is_zero() {
            return Ok(OracleOutcome {
                integral: false,
                first_failure: Some(n),
                checked: n,
            });
        }
    }
    Ok(OracleOutcome {
        integral: true,
        first_failure: None,
        checked: n_max,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    Neither,
}

/// Jump of `sum floor(b_j x)` at each breakpoint: `+1` per positive entry
/// with `b_j x` integral, `-1` per negative one.
pub fn monotonicity(b: &IntList) -> Result<Monotonicity> {
    let bp = step::breakpoints(b)?;
    let (mut up, mut down) = (false, false);
    for x in bp.points() {
        let jump: i64 = b
            .entries()
            .iter()
            .filter(|&&v| (x * &Rat::from_int(v)).is_integer())
            .map(|&v| v.signum())
            .sum();
        up |= jump > 0;
        down |= jump < 0;
    }
    Ok(match (up, down) {
        (true, true) => Monotonicity::Neither,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (false, false) => Monotonicity::Constant,
    })
}

pub fn is_monotone(b: &IntList) -> Result<bool> {
    Ok(monotonicity(b)? != Monotonicity::Neither)
}

/// Clause-by-clause report of a separation witness `a = B b + C c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub preconditions: bool,
    pub concatenation: bool,
    pub divisibility: bool,
    pub gcd_condition: bool,
    pub norm_inequality: bool,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.preconditions
            && self.concatenation
            && self.divisibility
            && self.gcd_condition
            && self.norm_inequality
    }

    pub fn failed_clause(&self) -> Option<&'static str> {
        [
            (self.preconditions, "preconditions"),
            (self.concatenation, "concatenation"),
            (self.divisibility, "divisibility"),
            (self.gcd_condition, "gcd_condition"),
            (self.norm_inequality, "norm_inequality"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, name)| name)
    }
}

/// Checks a stated `k`-separation of `a` into `big_b * b + big_c * c` and the
/// norm bound `N(a) >= (1 - 1/k)(N(b) + N(c))` it implies.
pub fn separation_report(
    a: &IntList,
    big_b: i64,
    b: &IntList,
    big_c: i64,
    c: &IntList,
    k: i64,
) -> SeparationReport {
    let preconditions = k >= 2
        && big_b != 0
        && big_c != 0
        && b.is_primitive()
        && c.is_primitive()
        && !b.is_empty()
        && !c.is_empty()
        && b.len() < a.len()
        && c.len() < a.len()
        && big_b.unsigned_abs().gcd(&big_c.unsigned_abs()) == 1;
    let mut report = SeparationReport {
        preconditions,
        concatenation: false,
        divisibility: false,
        gcd_condition: false,
        norm_inequality: false,
    };
    if !preconditions {
        return report;
    }
    let (Ok(bb), Ok(cc)) = (b.dilate(big_b), c.dilate(big_c)) else {
        return report;
    };
    report.concatenation = bb.concat(&cc) == *a;
    let kb = big_b % k == 0;
    let kc = big_c % k == 0;
    let coprime = |x: i64| x.unsigned_abs().gcd(&k.unsigned_abs()) == 1;
    report.divisibility = (kb && coprime(big_c)) || (kc && coprime(big_b));
    if report.divisibility {
        // the side divisible by k: gcd(k x, y) = gcd(x, y) for x there, y opposite
        let (div_side, other) = if kb { (&bb, &cc) } else { (&cc, &bb) };
        report.gcd_condition = div_side.entries().iter().all(|&x| {
            other.entries().iter().all(|&y| {
                let (x, y) = (x.unsigned_abs() as u128, y.unsigned_abs() as u128);
                (k.unsigned_abs() as u128 * x).gcd(&y) == x.gcd(&y)
            })
        });
    }
    if let (Ok(na), Ok(nb), Ok(nc)) = (norm(a), norm(b), norm(c)) {
        let factor = Rat::one() - Rat::new(1, k);
        report.norm_inequality = na >= factor * (nb + nc);
    }
    report
}

pub fn verify_separation(
    a: &IntList,
    big_b: i64,
    b: &IntList,
    big_c: i64,
    c: &IntList,
    k: i64,
) -> bool {
    separation_report(a, big_b, b, big_c, c, k).holds()
}

/// A list is a height-one integral ratio exactly when it has odd length,
/// height one, zero sum and norm `1/4`.
pub fn is_height_one_ratio(a: &IntList) -> bool {
    if a.len() % 2 == 0 || a.height() != 1 || a.sum() != 0 {
        return false;
    }
    match norm_parts(a.entries()) {
        Some((s, l)) => 4 * s == 12 * l * l,
        None => norm(a).map(|n| n == Rat::new(1, 4)).unwrap_or(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::list;
    use proptest::prelude::*;

    #[test]
    fn norms() {
        assert_eq!(norm(&list![1, -2]).unwrap(), Rat::new(1, 12));
        assert_eq!(norm(&list![1, -4]).unwrap(), Rat::new(1, 8));
        for k in [1, -7, 1000, 123_456_789] {
            assert_eq!(norm(&list![k]).unwrap(), Rat::new(1, 12));
        }
        assert_eq!(norm(&IntList::empty()), Err(Error::EmptyList));
    }

    #[test]
    fn landau_verdicts() {
        let cheb = is_integral_ratio(&list![30, 1, -15, -10, -6]);
        assert_eq!(
            cheb,
            RatioVerdict::Integral {
                height: 1,
                value_range: vec![0, 1]
            }
        );
        assert_eq!(is_integral_ratio(&list![5, -2, -3]).height(), Some(1));
        match is_integral_ratio(&list![5, 4, -3, -3, -3]) {
            RatioVerdict::NotIntegral {
                witness_x, value, ..
            } => {
                assert_eq!(witness_x, Rat::new(1, 3));
                assert_eq!(value, -1);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            is_integral_ratio(&list![42, 1, -14, -21, -6, -2]).height(),
            Some(2)
        );
        assert!(matches!(
            is_integral_ratio(&list![3, -1]),
            RatioVerdict::Invalid { .. }
        ));
        assert!(matches!(
            is_integral_ratio(&list![1, -2, 1]),
            RatioVerdict::Invalid { .. }
        ));
    }

    #[test]
    fn verdict_json() {
        let v = is_integral_ratio(&list![5, 4, -3, -3, -3]);
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"status\":\"not_integral\""));
        assert!(s.contains("\"witness_x\":\"1/3\""));
        assert_eq!(serde_json::from_str::<RatioVerdict>(&s).unwrap(), v);
    }

    #[test]
    fn oracle() {
        let cheb = factorial_oracle(&list![30, 1, -15, -10, -6], 20).unwrap();
        assert!(cheb.integral);
        let bad = factorial_oracle(&list![5, 4, -3, -3, -3], 5).unwrap();
        assert_eq!(bad.first_failure, Some(1));
        assert!(
            factorial_oracle(&list![6, -1, -2, -3], 20)
                .unwrap()
                .integral
        );
        assert!(factorial_oracle(&list![2, -1], 3).is_err());
    }

    #[test]
    fn monotone_lists() {
        assert_eq!(
            monotonicity(&list![1, -2]).unwrap(),
            Monotonicity::Decreasing
        );
        assert!(is_monotone(&list![1, -2, -3, 6]).unwrap());
        // every jump of floor(x) + floor(-3x) + floor(9x) is nonnegative
        assert_eq!(
            monotonicity(&list![1, -3, 9]).unwrap(),
            Monotonicity::Increasing
        );
        assert!(!is_monotone(&list![2, -3]).unwrap());
        assert!(!is_monotone(&list![1, -3, -9, 27, 5]).unwrap());
        assert_eq!(
            monotonicity(&list![3, -1]).unwrap(),
            Monotonicity::Increasing
        );
        for b in [
            list![-1, 2, 3],
            list![2, -3, -4],
            list![1, -2, 4],
            list![1, -2, -5, 10],
        ] {
            assert!(is_monotone(&b).unwrap(), "{b}");
        }
    }

    #[test]
    fn ranges() {
        let r = |a: IntList| value_range(&a).unwrap().into_iter().collect::<Vec<_>>();
        assert_eq!(r(list![30, 1, -15, -10, -6]), vec![0, 1]);
        assert_eq!(r(list![2, -1, -1]), vec![0, 1]);
        assert!(r(list![5, 4, -3, -3, -3]).contains(&-1));
    }

    #[test]
    fn separation_witness() {
        let a = list![6, -1, -2, -3];
        let b = list![6, -1, -5];
        let c = list![5, -2, -3];
        let rep = separation_report(&a, 1, &b, 1, &c, 2);
        assert!(rep.preconditions && rep.concatenation);
        // neither multiplier is divisible by k
        assert!(!rep.divisibility);
        assert_eq!(rep.failed_clause(), Some("divisibility"));
        // the norm inequality itself: 1/3 >= (1/2)(1/4 + 1/4)
        assert!(rep.norm_inequality);
        let rep = separation_report(&a, 1, &a, 1, &c, 2);
        assert!(!rep.preconditions);
        assert!(!verify_separation(&a, 1, &a, 1, &c, 2));
    }

    #[test]
    fn separation_holds_on_a_dilated_witness() {
        // 3[1,-2] + 1[1]: k = 3 divides B, gcd(3x, 1) = gcd(x, 1)
        let a = list![3, -6, 1];
        let rep = separation_report(&a, 3, &list![1, -2], 1, &list![1], 3);
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn height_one_characterization() {
        assert!(is_height_one_ratio(&list![30, 1, -15, -10, -6]));
        assert!(is_height_one_ratio(&list![5, -2, -3]));
        assert!(!is_height_one_ratio(&list![6, -1, -2, -3]));
        assert!(!is_height_one_ratio(&list![5, 4, -3, -3, -3]));
    }

    fn arb_list() -> impl Strategy<Value = IntList> {
        prop::collection::vec((1i64..=50, any::<bool>()), 1..=6).prop_filter_map(
            "degenerate",
            |v| {
                IntList::new(
                    &v.iter()
                        .map(|&(m, s)| if s { m } else { -m })
                        .collect::<Vec<_>>(),
                )
                .ok()
            },
        )
    }

    fn zero_sum_list(max: i64, len: usize) -> impl Strategy<Value = IntList> {
        prop::collection::vec(-max..=max, 2..len).prop_filter_map("invalid", |mut v| {
            let s: i64 = v.iter().sum();
            v.push(-s);
            IntList::new(&v).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn gcd_norm_equals_integral_norm(a in arb_list()) {
            prop_assert_eq!(norm(&a).unwrap(), step::norm_by_integral(&a).unwrap());
        }
    }

    proptest! {
        #[test]
        fn dilation_invariance(a in zero_sum_list(12, 6), k in 1i64..6) {
            let d = a.dilate(k).unwrap();
            prop_assert_eq!(norm(&d).unwrap(), norm(&a).unwrap());
            let (va, vd) = (is_integral_ratio(&a), is_integral_ratio(&d));
            prop_assert_eq!(
                std::mem::discriminant(&va),
                std::mem::discriminant(&vd)
            );
            prop_assert_eq!(va.height(), vd.height());
        }

        #[test]
        fn landau_implies_oracle(a in zero_sum_list(8, 6)) {
            if is_integral_ratio(&a).is_integral() {
                prop_assert!(factorial_oracle(&a, 50).unwrap().integral);
            }
        }

        #[test]
        fn value_sets_agree(a in zero_sum_list(15, 6)) {
            if a.height() >= 1 {
                let h = a.height();
                let integral = is_integral_ratio(&a).is_integral();
                let bp = step::breakpoints(&a).unwrap();
                let in_set = bp.points().iter().all(|x| {
                    let v = step::a_eval(&a, x).unwrap() + Rat::new(h, 2);
                    v.is_integer() && v >= 0 && v <= h
                });
                prop_assert_eq!(integral, in_set);
            }
        }

        #[test]
        fn monotone_direction_follows_sum(b in arb_list()) {
            match monotonicity(&b).unwrap() {
                Monotonicity::Increasing => prop_assert!(b.sum() >= 0),
                Monotonicity::Decreasing => prop_assert!(b.sum() <= 0),
                Monotonicity::Constant => prop_assert_eq!(b.sum(), 0),
                Monotonicity::Neither => {}
            }
        }
    }
}
