//! Saw-tooth evaluation, floor sums, breakpoints and the exact integral norm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::list::IntList;
use crate::rat::Rat;

/// `1/2 - {x}`; at integers this is `1/2`.
pub fn psi(x: &Rat) -> Rat {
    Rat::half() - x.fract()
}

/// Right-continuous list function: the sum of `psi(a_j x)` with each term
/// at an integer argument replaced by its limit from the right.
pub fn a_eval(a: &IntList, x: &Rat) -> Result<Rat> {
    if a.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut total = Rat::zero();
    for &v in a.entries() {
        let y = x * &Rat::from_int(v);
        total = total
            + if y.is_integer() {
                if v > 0 {
                    Rat::half()
                } else {
                    -Rat::half()
                }
            } else {
                psi(&y)
            };
    }
    Ok(total)
}

/// Sum of `floor(p x)` over positive entries `p` minus the sum of `floor(n x)`
/// over negative entries `-n`.
///
/// Every term is a floor of an increasing function of `x`, so the sum is
/// already right-continuous and the pointwise value is the right limit.
/// The flag is accepted for symmetry with callers that think in terms of
/// one-sided limits; both settings return the same number.
pub fn floor_sum(a: &IntList, x: &Rat, right_limit: bool) -> BigInt {
    let _ = right_limit;
    let mut total = BigInt::zero();
    for &v in a.entries() {
        let term = (x * &Rat::from_int(v.abs())).floor();
        if v > 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Sorted distinct points of `[0, 1)` where some `a_j x` is an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Breakpoints {
    points: Vec<Rat>,
}

impl Breakpoints {
    pub fn points(&self) -> &[Rat] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Midpoint of each gap, the last one wrapping to 1.
    pub fn midpoints(&self) -> Vec<Rat> {
        let one = Rat::one();
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let next = self.points.get(i + 1).unwrap_or(&one);
                (p + next) / Rat::from_int(2)
            })
            .collect()
    }
}

pub fn breakpoints(a: &IntList) -> Result<Breakpoints> {
    if a.is_empty() {
        return Err(Error::EmptyList);
    }
    let points = match SmallGrid::new(a) {
        Some(g) => g.ticks.iter().map(|&t| Rat::new(t, g.lcm)).collect(),
        None => {
            let mut pts: Vec<BigRational> = Vec::new();
            for m in magnitudes(a) {
                for k in 0..m {
                    pts.push(BigRational::new(k.into(), m.into()));
                }
            }
            pts.sort();
            pts.dedup();
            pts.into_iter().map(Rat::from).collect()
        }
    };
    Ok(Breakpoints { points })
}

fn magnitudes(a: &IntList) -> Vec<u64> {
    let mut m: Vec<u64> = a.entries().iter().map(|v| v.unsigned_abs()).collect();
    m.sort_unstable();
    m.dedup();
    m
}

/// Breakpoints written over the common denominator `lcm |a_j|`, for lists
/// where that denominator is small enough for `i128` sweeps.
pub(crate) struct SmallGrid {
    pub lcm: i128,
    pub ticks: Vec<i128>,
}

const GRID_LCM_LIMIT: i128 = 1 << 40;

impl SmallGrid {
    pub fn new(a: &IntList) -> Option<SmallGrid> {
        let mags = magnitudes(a);
        let mut lcm: i128 = 1;
        for &m in &mags {
            lcm = lcm.lcm(&(m as i128));
            if lcm > GRID_LCM_LIMIT {
                return None;
            }
        }
        let mut ticks = Vec::new();
        for &m in &mags {
            let step = lcm / m as i128;
            ticks.extend((0..m as i128).map(|k| k * step));
        }
        ticks.sort_unstable();
        ticks.dedup();
        Some(SmallGrid { lcm, ticks })
    }
}

/// Floor of `v * t / l` approached from the right in `t`.
#[inline]
pub(crate) fn right_floor(v: i128, t: i128, l: i128) -> i128 {
    let num = v * t;
    let q = num.div_euclid(l);
    if v < 0 && num.rem_euclid(l) == 0 {
        q - 1
    } else {
        q
    }
}

/// `F` at `t / l` (right-continuous, so no tie handling is needed).
#[inline]
pub(crate) fn floor_sum_at(entries: &[i64], t: i128, l: i128) -> i128 {
    entries
        .iter()
        .map(|&v| {
            let f = (v.unsigned_abs() as i128 * t).div_euclid(l);
            if v > 0 {
                f
            } else {
                -f
            }
        })
        .sum()
}

/// `int_0^1 a(x)^2 dx`, integrating the affine piece on each breakpoint
/// interval in closed form.
pub fn norm_by_integral(a: &IntList) -> Result<Rat> {
    if a.is_empty() {
        return Err(Error::EmptyList);
    }
    if let Some(r) = SmallGrid::new(a).and_then(|g| integral_small(a, &g)) {
        return Ok(r);
    }
    Ok(integral_big(a))
}

/// On `[t0/L, t1/L)` the list function is `len/2 - s x + sum floor(a_j x)`
/// with the floors taken just right of `t0/L`. Scaling by `2L` keeps every
/// endpoint value an integer, and the square of an affine function
/// integrates to `(t1 - t0)/L * (f0^2 + f0 f1 + f1^2) / 3`.
fn integral_small(a: &IntList, g: &SmallGrid) -> Option<Rat> {
    let l = g.lcm;
    let s = a.sum();
    let len = a.len() as i128;
    let mut acc: i128 = 0;
    for (i, &t0) in g.ticks.iter().enumerate() {
        let t1 = g.ticks.get(i + 1).copied().unwrap_or(l);
        let floors: i128 = a
            .entries()
            .iter()
            .map(|&v| right_floor(v as i128, t0, l))
            .sum();
        // 2L * (len/2 + floors) - 2 s t
        let base = l.checked_mul(len.checked_add(floors.checked_mul(2)?)?)?;
        let f0 = base.checked_sub(s.checked_mul(2 * t0)?)?;
        let f1 = base.checked_sub(s.checked_mul(2 * t1)?)?;
        let q = f0
            .checked_mul(f0)?
            .checked_add(f0.checked_mul(f1)?)?
            .checked_add(f1.checked_mul(f1)?)?;
        acc = acc.checked_add(q.checked_mul(t1 - t0)?)?;
    }
    // sum / (3 * (2L)^2 * L)
    let den = BigInt::from(12) * BigInt::from(l).pow(3);
    Some(Rat::new(BigInt::from(acc), den))
}

fn integral_big(a: &IntList) -> Rat {
    let bp = breakpoints(a).expect("nonempty");
    let s = Rat::from_int(BigInt::from(a.sum()));
    let half_len = Rat::new(a.len() as i64, 2);
    let three = Rat::from_int(3);
    let mids = bp.midpoints();
    let mut acc = Rat::zero();
    for (i, x0) in bp.points().iter().enumerate() {
        let x1 = bp.points().get(i + 1).cloned().unwrap_or_else(Rat::one);
        let xm = &mids[i];
        let floors: BigInt = a
            .entries()
            .iter()
            .map(|&v| (xm * &Rat::from_int(v)).floor())
            .sum();
        let c = &half_len + &Rat::from_int(floors);
        let f0 = &c - &(&s * x0);
        let f1 = &c - &(&s * &x1);
        let q = &(&f0 * &f0) + &(&(&f0 * &f1) + &(&f1 * &f1));
        acc = acc + &(&(&x1 - x0) * &q) / &three;
    }
    acc
}

/// Generic `F` profile for lists whose grid does not fit the small kernel.
pub(crate) fn floor_sum_profile_big(a: &IntList) -> (Vec<Rat>, Vec<BigInt>) {
    let bp = breakpoints(a).expect("nonempty");
    let vals = bp.points().iter().map(|x| floor_sum(a, x, true)).collect();
    (bp.points, vals)
}

pub(crate) fn to_i64(b: &BigInt) -> Option<i64> {
    b.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::list;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(&r(1, 4)), r(1, 4));
        assert_eq!(psi(&Rat::zero()), Rat::half());
        assert_eq!(psi(&r(-1, 3)), r(-1, 6));
    }

    #[test]
    fn list_function_right_limits() {
        let cheb = list![30, 1, -15, -10, -6];
        let at = a_eval(&cheb, &r(1, 30)).unwrap();
        let right = a_eval(&cheb, &(r(1, 30) + r(1, 1000))).unwrap();
        assert_eq!(at, right);
        assert_eq!(at, Rat::half());
        assert_eq!(a_eval(&list![1], &Rat::zero()).unwrap(), Rat::half());
        assert_eq!(a_eval(&list![1, -2], &r(1, 2)).unwrap(), r(-1, 2));
        assert_eq!(
            a_eval(&IntList::empty(), &Rat::zero()),
            Err(Error::EmptyList)
        );
    }

    #[test]
    fn floor_sums() {
        let cheb = list![30, 1, -15, -10, -6];
        let v = floor_sum(&cheb, &r(1, 30), true);
        assert!(v == BigInt::from(0) || v == BigInt::from(1));
        assert_eq!(
            floor_sum(&list![5, 4, -3, -3, -3], &r(1, 3), false),
            BigInt::from(-1)
        );
        assert_eq!(floor_sum(&cheb, &Rat::zero(), true), BigInt::from(0));
    }

    #[test]
    fn breakpoint_sets() {
        let pts = |a: IntList| breakpoints(&a).unwrap().points().to_vec();
        assert_eq!(pts(list![1, -2]), vec![Rat::zero(), r(1, 2)]);
        assert_eq!(pts(list![3, -1]), vec![Rat::zero(), r(1, 3), r(2, 3)]);
        let cheb = pts(list![30, 1, -15, -10, -6]);
        assert_eq!(cheb.len(), 30);
        assert!(cheb.iter().enumerate().all(|(m, p)| *p == r(m as i64, 30)));
    }

    #[test]
    fn integral_norms() {
        assert_eq!(norm_by_integral(&list![1]).unwrap(), r(1, 12));
        assert_eq!(norm_by_integral(&list![1, -3, 9]).unwrap(), r(17, 108));
        assert_eq!(norm_by_integral(&list![1, -2, -3, 4]).unwrap(), r(1, 6));
    }

    #[test]
    fn big_path_matches_small_path() {
        for a in [
            list![1, -3, 9],
            list![30, 1, -15, -10, -6],
            list![7, -2, 5, -11],
        ] {
            let g = SmallGrid::new(&a).unwrap();
            assert_eq!(integral_small(&a, &g).unwrap(), integral_big(&a));
        }
        // lcm far beyond the small-grid limit
        let a = list![20_011, -20_021, 20_023, -3];
        assert!(SmallGrid::new(&a).is_none());
        assert_eq!(
            norm_by_integral(&a).unwrap(),
            crate::criteria::norm(&a).unwrap()
        );
    }

    fn zero_sum_list() -> impl Strategy<Value = IntList> {
        prop::collection::vec(-30i64..30, 2..6).prop_filter_map("invalid", |mut v| {
            let s: i64 = v.iter().sum();
            v.push(-s);
            IntList::new(&v).ok()
        })
    }

    fn off_grid(a: &IntList, num: i64, den: i64) -> Option<Rat> {
        let x = Rat::new(num, den);
        a.entries()
            .iter()
            .all(|&v| !(&x * &Rat::from_int(v)).is_integer())
            .then_some(x)
    }

    proptest! {
        #[test]
        fn list_function_minus_floor_sum_is_constant(
            a in zero_sum_list(),
            xs in prop::collection::vec((0i64..997, 997i64..998), 1..6),
        ) {
            let expected = Rat::new(-a.height(), 2);
            for (n, d) in xs {
                if let Some(x) = off_grid(&a, n, d) {
                    let diff = a_eval(&a, &x).unwrap() - Rat::from_int(floor_sum(&a, &x, false));
                    prop_assert_eq!(diff, expected.clone());
                }
            }
        }

        #[test]
        fn odd_and_periodic(a in zero_sum_list(), n in 1i64..1000) {
            if let Some(x) = off_grid(&a, n, 1009) {
                let v = a_eval(&a, &x).unwrap();
                prop_assert_eq!(-v.clone(), a_eval(&a, &(Rat::one() - x.clone())).unwrap());
                prop_assert_eq!(v, a_eval(&a, &(x + Rat::one())).unwrap());
            }
        }

        #[test]
        fn floor_sum_constant_on_gaps(a in zero_sum_list()) {
            let bp = breakpoints(&a).unwrap();
            for (x, m) in bp.points().iter().zip(bp.midpoints()) {
                prop_assert_eq!(floor_sum(&a, x, true), floor_sum(&a, &m, false));
            }
        }
    }
}
