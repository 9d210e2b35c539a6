//! Exhaustive search for lists of small norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::norm_parts;
use crate::error::{Error, Result};
use crate::list::IntList;
use crate::rat::Rat;

/// Shapes that account for small norms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// `[1]` up to sign.
    Single,
    /// `[a, b]`.
    Pair,
    /// `[a, -2a, b]`.
    HalfPair,
    /// `[a, -2a, b, -2b]`.
    TwoHalfPairs,
    /// A known list, up to sign.
    Listed { id: String },
}

fn has_half_pair(e: &[i64], i: usize, j: usize) -> bool {
    e[j] as i128 == -2 * e[i] as i128 || e[i] as i128 == -2 * e[j] as i128
}

/// Classifies `a` against the parametric shapes, then against `listed`.
pub fn classify(a: &IntList, listed: &[(String, IntList)]) -> Option<Shape> {
    let e = a.entries();
    match e.len() {
        1 => return Some(Shape::Single),
        2 => return Some(Shape::Pair),
        3 => {
            if (0..3).any(|i| (i + 1..3).any(|j| has_half_pair(e, i, j))) {
                return Some(Shape::HalfPair);
            }
        }
        4 => {
            let splits = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
            if splits
                .iter()
                .any(|&((i, j), (k, l))| has_half_pair(e, i, j) && has_half_pair(e, k, l))
            {
                return Some(Shape::TwoHalfPairs);
            }
        }
        _ => {}
    }
    let neg = a.negate();
    listed
        .iter()
        .find(|(_, l)| l == a || *l == neg)
        .map(|(id, _)| Shape::Listed { id: id.clone() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallNormHit {
    pub list: IntList,
    pub norm: Rat,
    pub shape: Option<Shape>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub max_len: usize,
    pub bound: i64,
    pub below: Rat,
    /// Lists examined, one per pair `{a, -a}`.
    pub examined: u64,
    pub hits: Vec<SmallNormHit>,
}

impl EnumerationReport {
    /// Hits matching no shape.
    pub fn exceptions(&self) -> Vec<&SmallNormHit> {
        self.hits.iter().filter(|h| h.shape.is_none()).collect()
    }
}

fn to_i128_pair(r: &Rat) -> Result<(i128, i128)> {
    let (n, d) = r.to_i64_pair().ok_or(Error::Overflow("norm threshold"))?;
    Ok((n as i128, d as i128))
}

/// Of `a` and `-a`, keeps the one whose entry of least magnitude is
/// positive.
fn sign_representative(v: &[i64]) -> bool {
    v.iter()
        .min_by_key(|x| x.unsigned_abs())
        .is_some_and(|&x| x > 0)
}

fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

/// Visits multisets of nonzero values in `[-bound, bound]`, as
/// nondecreasing index sequences into `values`.
fn visit(
    values: &[i64],
    start: usize,
    cur: &mut Vec<i64>,
    max_len: usize,
    f: &mut dyn FnMut(&[i64]),
) {
    if !cur.is_empty() {
        f(cur);
    }
    if cur.len() == max_len {
        return;
    }
    for i in start..values.len() {
        let v = values[i];
        if cur.contains(&-v) {
            continue;
        }
        cur.push(v);
        visit(values, i, cur, max_len, f);
        cur.pop();
    }
}

/// Every primitive non-degenerate list of length at most `max_len` with
/// entries in `[-bound, bound]` and norm below `below`, one per sign pair.
/// Hits come sorted by length, then by entries.
pub fn enumerate_small_norm(
    max_len: usize,
    bound: i64,
    below: &Rat,
    listed: &[(String, IntList)],
) -> Result<EnumerationReport> {
    if bound < 1 || max_len == 0 {
        return Err(Error::Precondition(
            "enumeration needs positive bounds".into(),
        ));
    }
    let (bn, bd) = to_i128_pair(below)?;
    let values: Vec<i64> = (-bound..=bound).filter(|&v| v != 0).collect();
    let per_first: Vec<(u64, Vec<IntList>)> = (0..values.len())
        .into_par_iter()
        .map(|first| {
            let mut examined = 0u64;
            let mut found = Vec::new();
            let mut cur = vec![values[first]];
            let mut check = |e: &[i64]| {
                if e.iter().fold(0u64, |g, &v| gcd(g, v.unsigned_abs())) != 1
                    || !sign_representative(e)
                {
                    return;
                }
                examined += 1;
                if let Some((s, l)) = norm_parts(e) {
                    // s / (12 L^2) < bn / bd
                    if s * bd < 12 * l * l * bn {
                        found.push(e.to_vec());
                    }
                }
            };
            visit(&values, first, &mut cur, max_len, &mut check);
            let lists = found
                .into_iter()
                .filter_map(|e| IntList::new(&e).ok())
                .collect();
            (examined, lists)
        })
        .collect();
    let mut examined = 0;
    let mut lists = Vec::new();
    for (n, l) in per_first {
        examined += n;
        lists.extend(l);
    }
    lists.sort_by(|a, b| (a.len(), a.entries()).cmp(&(b.len(), b.entries())));
    lists.dedup();
    let hits = lists
        .into_iter()
        .map(|list| {
            let norm = crate::criteria::norm(&list)?;
            let shape = classify(&list, listed);
            Ok(SmallNormHit { list, norm, shape })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnumerationReport {
        max_len,
        bound,
        below: below.clone(),
        examined,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::list;

    #[test]
    fn shapes() {
        assert_eq!(classify(&list![-1], &[]), Some(Shape::Single));
        assert_eq!(classify(&list![5, -7], &[]), Some(Shape::Pair));
        assert_eq!(classify(&list![3, -6, 7], &[]), Some(Shape::HalfPair));
        assert_eq!(
            classify(&list![-3, 6, 5, -10], &[]),
            Some(Shape::TwoHalfPairs)
        );
        assert_eq!(classify(&list![1, -3, 9], &[]), None);
        let listed = vec![("x".to_string(), list![1, -3, 9])];
        assert_eq!(
            classify(&list![-1, 3, -9], &listed),
            Some(Shape::Listed { id: "x".into() })
        );
    }

    #[test]
    fn smallest_norms_in_a_small_box() {
        // nothing below 1/12 at all; at 1/12 exactly [1] and [1, -2]
        let r = enumerate_small_norm(4, 8, &Rat::new(1, 12), &[]).unwrap();
        assert!(r.hits.is_empty());
        let r = enumerate_small_norm(4, 8, &Rat::new(1, 9), &[]).unwrap();
        let lists: Vec<IntList> = r.hits.iter().map(|h| h.list.clone()).collect();
        assert_eq!(lists, vec![list![1], list![1, -2]]);
    }

    #[test]
    fn zero_sum_lists_of_odd_length_have_norm_at_least_a_quarter() {
        // the sum is a half-integer plus an integer, so |a(x)| >= 1/2
        let r = enumerate_small_norm(5, 12, &Rat::new(1, 4), &[]).unwrap();
        for h in &r.hits {
            if h.list.sum() == 0 {
                assert_eq!(h.list.len() % 2, 0, "{}", h.list);
            }
        }
    }

    #[test]
    fn zero_sum_small_norm_lists_are_the_two_known_ones() {
        let r = enumerate_small_norm(5, 12, &Rat::new(31, 180), &[]).unwrap();
        let zero_sum: Vec<IntList> = r
            .hits
            .iter()
            .filter(|h| h.list.sum() == 0)
            .map(|h| h.list.clone())
            .collect();
        let expect = [list![1, -2, -3, 4], list![1, -3, -4, 6]];
        assert_eq!(zero_sum.len(), 2);
        for l in &zero_sum {
            assert!(expect.contains(l) || expect.contains(&l.negate()), "{l}");
            assert_eq!(crate::criteria::norm(l).unwrap(), Rat::new(1, 6));
        }
    }
}
