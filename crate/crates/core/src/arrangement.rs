//! Exact sweeps of sums of saw-tooth terms over the unit torus.
//!
//! A term is `psi(c x + d y)`. Its value just past a point is taken in the
//! direction `(eps, eps^2)`, so a term sitting exactly on one of its lines
//! resolves to the side given by `sign(c)`, or `sign(d)` for a horizontal
//! line. With that convention every sampled point reports the value of some
//! open cell, and sampling all line crossings plus all gap midpoints reaches
//! every cell.

use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frac::{gap_midpoints, sort_dedup, Frac};

/// Linear form `c x + d y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form2 {
    pub c: i64,
    pub d: i64,
}

/// Folded result of a sweep. Values are `offset + sum floor(form)` with the
/// floors taken as right limits; for zero-sum forms this equals the sum of
/// saw-tooth terms plus `offset - len/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SweepStats {
    pub min: i64,
    pub max: i64,
    pub points: u64,
    /// Smallest `(y, x)` whose value leaves `[lo, hi]`.
    pub first_out: Option<(Frac, Frac, i64)>,
}

impl SweepStats {
    fn merge(mut self, o: SweepStats) -> SweepStats {
        self.min = self.min.min(o.min);
        self.max = self.max.max(o.max);
        self.points += o.points;
        if self.first_out.is_none() {
            self.first_out = o.first_out;
        }
        self
    }
}

#[inline]
fn right_floor(num: i128, den: i128, sign: i64) -> i128 {
    let q = num.div_euclid(den);
    if sign < 0 && num.rem_euclid(den) == 0 {
        q - 1
    } else {
        q
    }
}

fn lift(forms: &[Form2]) -> Vec<(i128, i128, i64)> {
    forms
        .iter()
        .map(|f| {
            let sign = if f.c != 0 { f.c.signum() } else { f.d.signum() };
            (f.c as i128, f.d as i128, sign)
        })
        .collect()
}

/// Right-limit floor sum of the forms at `(x, y)`.
pub(crate) fn floor_sum_2d(forms: &[Form2], x: Frac, y: Frac) -> Result<i128> {
    let lifted = lift(forms);
    eval_point(&lifted, x, y).ok_or(Error::Overflow("two-dimensional sweep"))
}

#[inline]
fn eval_point(forms: &[(i128, i128, i64)], x: Frac, y: Frac) -> Option<i128> {
    let den = x.d.checked_mul(y.d)?;
    let mut total: i128 = 0;
    for &(c, d, sign) in forms {
        let num = c
            .checked_mul(x.n)?
            .checked_mul(y.d)?
            .checked_add(d.checked_mul(y.n)?.checked_mul(x.d)?)?;
        total += right_floor(num, den, sign);
    }
    Some(total)
}

/// y-coordinates in `[0, 1)` of every crossing of two lines, plus every
/// horizontal line.
pub(crate) fn critical_ys(forms: &[Form2]) -> Vec<Frac> {
    let mut ys = vec![Frac::ZERO];
    let mut distinct: Vec<Form2> = forms.to_vec();
    distinct.sort_by_key(|f| (f.c, f.d));
    distinct.dedup();
    for f in &distinct {
        if f.c == 0 {
            let m = f.d.unsigned_abs() as i128;
            ys.extend((0..m).map(|k| Frac::new(k, m)));
        }
    }
    for (i, f) in distinct.iter().enumerate() {
        for g in &distinct[i + 1..] {
            let delta = (f.c as i128 * g.d as i128 - g.c as i128 * f.d as i128).abs();
            if delta == 0 {
                continue;
            }
            let step = (f.c as i128).gcd(&(g.c as i128));
            if step == 0 {
                continue;
            }
            let count = delta / step;
            ys.extend((0..count).map(|j| Frac::new(j * step, delta)));
        }
    }
    sort_dedup(&mut ys);
    ys
}

/// Points where some non-horizontal line meets the horizontal line at `y`.
fn crossings_at(forms: &[Form2], y: Frac) -> Vec<Frac> {
    let mut xs = vec![Frac::ZERO];
    for f in forms {
        if f.c == 0 {
            continue;
        }
        let c = f.c as i128;
        for m in 0..c.abs() {
            // (m - d y) / c
            let num = m * y.d - f.d as i128 * y.n;
            xs.push(Frac::new(num, c * y.d).wrap());
        }
    }
    sort_dedup(&mut xs);
    xs
}

/// Sweeps every cell, edge and vertex of the arrangement on the torus.
/// Slices in `y` run in parallel; results merge in `y` order, so the
/// reported point is the lexicographically smallest `(y, x)` out of range.
pub(crate) fn sweep(forms: &[Form2], offset: i64, lo: i64, hi: i64) -> Result<SweepStats> {
    let crit = critical_ys(forms);
    let mids = gap_midpoints(&crit);
    let mut ys: Vec<Frac> = crit.into_iter().chain(mids).collect();
    sort_dedup(&mut ys);
    let lifted = lift(forms);
    let slices: Vec<Option<SweepStats>> = ys
        .par_iter()
        .map(|&y| slice(forms, &lifted, y, offset, lo, hi))
        .collect();
    let mut acc: Option<SweepStats> = None;
    for s in slices {
        let s = s.ok_or(Error::Overflow("two-dimensional sweep"))?;
        acc = Some(match acc {
            None => s,
            Some(a) => a.merge(s),
        });
    }
    Ok(acc.expect("at least one slice"))
}

fn slice(
    forms: &[Form2],
    lifted: &[(i128, i128, i64)],
    y: Frac,
    offset: i64,
    lo: i64,
    hi: i64,
) -> Option<SweepStats> {
    let crossings = crossings_at(forms, y);
    let mids = gap_midpoints(&crossings);
    let mut xs: Vec<Frac> = crossings.into_iter().chain(mids).collect();
    sort_dedup(&mut xs);
    let mut stats = SweepStats {
        min: i64::MAX,
        max: i64::MIN,
        points: 0,
        first_out: None,
    };
    for x in xs {
        let v = offset as i128 + eval_point(lifted, x, y)?;
        let v = i64::try_from(v).ok()?;
        stats.min = stats.min.min(v);
        stats.max = stats.max.max(v);
        stats.points += 1;
        if stats.first_out.is_none() && (v < lo || v > hi) {
            stats.first_out = Some((y, x, v));
        }
    }
    Some(stats)
}

/// One-variable term `psi(alpha x + beta)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ShiftedTerm {
    pub alpha: i128,
    pub beta: Frac,
}

/// Twice the right-limit value of `sum psi(alpha x + beta)` at `x`.
fn twice_shifted_sum(terms: &[ShiftedTerm], x: Frac) -> Frac {
    let mut total = Frac::ZERO;
    for t in terms {
        let f = x.scale(t.alpha).add(t.beta);
        let twice = if f.is_integer() {
            Frac::int(t.alpha.signum())
        } else {
            // 1 - 2{f}
            Frac::ONE.sub(f.wrap().scale(2))
        };
        total = total.add(twice);
    }
    total
}

/// Distinct values of twice the sum of the terms over `[0, 1)`. The terms
/// must have integer slopes summing to zero, so the sum is constant between
/// consecutive breakpoints and its right limits there are all its values.
pub(crate) fn shifted_values(terms: &[ShiftedTerm]) -> BTreeSet<Frac> {
    debug_assert_eq!(terms.iter().map(|t| t.alpha).sum::<i128>(), 0);
    let mut xs = vec![Frac::ZERO];
    for t in terms {
        if t.alpha == 0 {
            continue;
        }
        for m in 0..t.alpha.abs() {
            xs.push(Frac::int(m).sub(t.beta).div_int(t.alpha).wrap());
        }
    }
    sort_dedup(&mut xs);
    xs.iter().map(|&x| twice_shifted_sum(terms, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(v: &[(i64, i64)]) -> Vec<Form2> {
        v.iter().map(|&(c, d)| Form2 { c, d }).collect()
    }

    #[test]
    fn crossing_heights() {
        // x + y and x - y cross where 2y is an integer
        let ys = critical_ys(&forms(&[(1, 1), (1, -1)]));
        assert_eq!(ys, vec![Frac::ZERO, Frac::new(1, 2)]);
        let ys = critical_ys(&forms(&[(0, 3), (1, 0)]));
        assert_eq!(ys, vec![Frac::ZERO, Frac::new(1, 3), Frac::new(2, 3)]);
    }

    #[test]
    fn binomial_plane_stays_in_range() {
        // psi(x) + psi(y) - psi(x + y) family [a, b, -(a+b)] has values {0, 1}
        let f = forms(&[(1, 1), (-1, 0), (0, -1)]);
        let s = sweep(&f, 2, 0, 1).unwrap();
        assert_eq!((s.min, s.max), (0, 1));
        assert!(s.first_out.is_none());
    }

    #[test]
    fn failing_plane_reports_smallest_point() {
        // psi(2x) + psi(2y) - psi(x) - psi(y): not a valid height-0 family
        let f = forms(&[(2, 0), (0, 2), (-1, 0), (0, -1)]);
        let s = sweep(&f, 2, 0, 0).unwrap();
        let (y, x, _) = s.first_out.unwrap();
        assert_eq!((y, x), (Frac::ZERO, Frac::new(1, 2)));
    }

    #[test]
    fn shifted_terms() {
        // psi(x) - psi(x + 1/2) takes the values 1/2 and -1/2
        let terms = [
            ShiftedTerm {
                alpha: 1,
                beta: Frac::ZERO,
            },
            ShiftedTerm {
                alpha: -1,
                beta: Frac::new(-1, 2),
            },
        ];
        let vals: Vec<Frac> = shifted_values(&terms).into_iter().collect();
        assert_eq!(vals, vec![Frac::int(-1), Frac::int(1)]);
    }
}
