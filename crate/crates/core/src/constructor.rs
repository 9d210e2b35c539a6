//! Two-parameter families built from a pair of lists.
//!
//! Given primitive lists `a` and `b` with `b` monotone, coprime nonzero sums
//! `u` and `v`, and `v a + (-u) b` integral of height `D`, the family
//! `alpha a + beta b + [-(alpha u + beta v)]` is integral of height `D + 1`
//! wherever no entry vanishes and the height does not collapse.

use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{self, Form2, ShiftedTerm};
use crate::criteria::{is_integral_ratio, is_monotone};
use crate::error::{Error, Result};
use crate::family::AffineList;
use crate::frac::Frac;
use crate::list::IntList;

/// Validated hypotheses of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionInput {
    a: IntList,
    b: IntList,
    u: i64,
    v: i64,
    base: IntList,
    base_height: i64,
}

fn sum_i64(l: &IntList) -> Result<i64> {
    i64::try_from(l.sum()).map_err(|_| Error::Overflow("list sum"))
}

fn gcd(mut x: i64, mut y: i64) -> i64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x.abs()
}

impl ConstructionInput {
    /// Checks every hypothesis, in the order primitivity, sums, coprimality,
    /// monotonicity, base integrality.
    pub fn build(a: &IntList, b: &IntList) -> Result<ConstructionInput> {
        if !a.is_primitive() {
            return Err(Error::NotPrimitive("a"));
        }
        if !b.is_primitive() {
            return Err(Error::NotPrimitive("b"));
        }
        let u = sum_i64(a)?;
        let v = sum_i64(b)?;
        if u == 0 {
            return Err(Error::ZeroSum("a"));
        }
        if v == 0 {
            return Err(Error::ZeroSum("b"));
        }
        if gcd(u, v) != 1 {
            return Err(Error::SumsNotCoprime { u, v });
        }
        if !is_monotone(b)? {
            return Err(Error::NotMonotone);
        }
        let t = Self::assume_unchecked(a, b)?;
        if !is_integral_ratio(&t.base).is_integral() {
            return Err(Error::BaseNotIntegral(t.base.to_text()));
        }
        Ok(t)
    }

    /// Assembles the input without checking monotonicity, coprimality or
    /// integrality. Meant for probing what breaks when a hypothesis fails.
    pub fn assume_unchecked(a: &IntList, b: &IntList) -> Result<ConstructionInput> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyList);
        }
        let u = sum_i64(a)?;
        let v = sum_i64(b)?;
        if u == 0 {
            return Err(Error::ZeroSum("a"));
        }
        if v == 0 {
            return Err(Error::ZeroSum("b"));
        }
        let base_raw = a
            .dilate(v)?
            .entries()
            .iter()
            .chain(b.dilate(-u)?.entries())
            .copied()
            .collect::<Vec<_>>();
        let base = IntList::cancelled(base_raw)?;
        let base_height = base.height();
        Ok(ConstructionInput {
            a: a.clone(),
            b: b.clone(),
            u,
            v,
            base,
            base_height,
        })
    }

    pub fn a(&self) -> &IntList {
        &self.a
    }

    pub fn b(&self) -> &IntList {
        &self.b
    }

    pub fn u(&self) -> i64 {
        self.u
    }

    pub fn v(&self) -> i64 {
        self.v
    }

    /// `v a + (-u) b`, with cancelling pairs removed.
    pub fn base(&self) -> &IntList {
        &self.base
    }

    pub fn base_height(&self) -> i64 {
        self.base_height
    }
}

/// Shorthand for [`ConstructionInput::build`].
pub fn build_input(a: &IntList, b: &IntList) -> Result<ConstructionInput> {
    ConstructionInput::build(a, b)
}

/// The two-parameter family over `(alpha, beta)`, claiming height `D + 1`.
/// Parameters of either sign are allowed; instances must be primitive.
pub fn emit_family(t: &ConstructionInput) -> AffineList {
    let mut entries: Vec<Vec<i64>> = Vec::with_capacity(t.a.len() + t.b.len() + 1);
    entries.extend(t.a.entries().iter().map(|&x| vec![x, 0]));
    entries.extend(t.b.entries().iter().map(|&y| vec![0, y]));
    entries.push(vec![-t.u, -t.v]);
    AffineList::new(2, entries, Vec::new(), true, Some(t.base_height + 1))
        .expect("constructed family is well formed")
}

/// Outcome of the checks behind the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofChecks {
    /// `a(v x) + b(-u x)` stays in `{-D/2, ..., D/2}`.
    pub base_bound: bool,
    /// `a(x) + b(y) + psi(-u x - v y)` stays in `{-(D+1)/2, ..., (D+1)/2}`.
    pub plane_bound: bool,
    /// `a(v x) + b(-u (x + k/(u v)))` stays in `{-D/2, ..., D/2}` for every
    /// `k` in `0..|u v|`.
    pub shifted_bound: bool,
    /// Smallest `k` where the shifted bound fails.
    pub first_bad_shift: Option<u64>,
}

impl ProofChecks {
    pub fn all_hold(&self) -> bool {
        self.base_bound && self.plane_bound && self.shifted_bound
    }
}

/// Twice the values must be integers of the parity of `d` within `[-d, d]`.
fn within_half_steps(terms: &[ShiftedTerm], d: i64) -> bool {
    arrangement::shifted_values(terms).into_iter().all(|w| {
        w.is_integer() && {
            let k = w.n;
            k.abs() <= d as i128 && (k - d as i128).rem_euclid(2) == 0
        }
    })
}

fn line_terms(t: &ConstructionInput, k: i64) -> Vec<ShiftedTerm> {
    let (u, v) = (t.u as i128, t.v as i128);
    let mut terms: Vec<ShiftedTerm> =
        t.a.entries()
            .iter()
            .map(|&x| ShiftedTerm {
                alpha: x as i128 * v,
                beta: Frac::ZERO,
            })
            .collect();
    // psi(-b_j u x - b_j k / v)
    terms.extend(t.b.entries().iter().map(|&y| ShiftedTerm {
        alpha: -(y as i128) * u,
        beta: Frac::new(-(y as i128) * k as i128, v),
    }));
    terms
}

/// Runs every check exactly: the base line, the shifted lines, and a full
/// sweep of the plane arrangement.
pub fn proof_checks(t: &ConstructionInput) -> Result<ProofChecks> {
    let d = t.base_height;
    let base_bound = within_half_steps(&line_terms(t, 0), d);
    let shifts = (t.u as i128 * t.v as i128).unsigned_abs();
    let shifts = u64::try_from(shifts).map_err(|_| Error::Overflow("shift count"))?;
    let first_bad_shift = (0..shifts)
        .into_par_iter()
        .filter(|&k| !within_half_steps(&line_terms(t, k as i64), d))
        .min();

    let mut forms: Vec<Form2> = t.a.entries().iter().map(|&c| Form2 { c, d: 0 }).collect();
    forms.extend(t.b.entries().iter().map(|&y| Form2 { c: 0, d: y }));
    forms.push(Form2 { c: -t.u, d: -t.v });
    let len = forms.len() as i64;
    // sum psi + (D+1)/2 = offset + floor sum, with offset = (len + D + 1)/2
    let plane_bound = if (len + d + 1) % 2 != 0 || d + 1 < 0 {
        false
    } else {
        let stats = arrangement::sweep(&forms, (len + d + 1) / 2, 0, d + 1)?;
        stats.first_out.is_none()
    };

    Ok(ProofChecks {
        base_bound,
        plane_bound,
        shifted_bound: first_bad_shift.is_none(),
        first_bad_shift,
    })
}

/// True iff every check of [`proof_checks`] holds. Always exact.
pub fn check_proof_inequalities(t: &ConstructionInput) -> Result<bool> {
    Ok(proof_checks(t)?.all_hold())
}
