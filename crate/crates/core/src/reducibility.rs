//! Reducibility of height-2 lists.
//!
//! A list is reducible when it splits, after removing cancelling pairs, into
//! two height-1 integral lists. Reducibility is only ever shown by an explicit
//! split. Irreducibility is certified from the residues of the entries modulo
//! a prime `p >= 11`, using the known shape of height-1 lists: either sporadic
//! (entries built from the primes 2, 3, 5, 7 only) or one of the infinite
//! families `[a+b, -a, -b]` and `[2a, -a, 2b, -b, -(a+b)]`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::is_integral_ratio;
use crate::error::{Error, Result};
use crate::family::AffineList;
use crate::list::IntList;

/// A split of a list into two height-1 integral lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub b: IntList,
    pub c: IntList,
    /// Values `v > 0` with `v` in one part and `-v` in the other.
    pub canceled: Vec<u64>,
}

impl Decomposition {
    /// Rechecks that the parts recombine to `a` and are both integral of
    /// height 1.
    pub fn is_valid_for(&self, a: &IntList) -> bool {
        let joined = IntList::cancelled(self.b.entries().iter().chain(self.c.entries()).copied());
        let height_one = |l: &IntList| is_integral_ratio(l).height() == Some(1);
        matches!(joined, Ok(j) if &j == a) && height_one(&self.b) && height_one(&self.c)
    }
}

fn part(entries: impl IntoIterator<Item = i64>) -> Option<IntList> {
    let v: Vec<i64> = entries.into_iter().collect();
    let l = IntList::new(&v).ok()?;
    (l.sum() == 0 && l.height() == 1).then_some(l)
}

fn try_split(a: &[i64], mask: u32, extra: &[i64]) -> Option<Decomposition> {
    let pick = |inside: bool| {
        a.iter()
            .enumerate()
            .filter(move |(i, _)| (mask >> i & 1 == 1) == inside)
            .map(|(_, &x)| x)
    };
    let b = part(pick(true).chain(extra.iter().copied()))?;
    let c = part(pick(false).chain(extra.iter().map(|&t| -t)))?;
    if !is_integral_ratio(&b).is_integral() || !is_integral_ratio(&c).is_integral() {
        return None;
    }
    let mut canceled: Vec<u64> = extra.iter().map(|t| t.unsigned_abs()).collect();
    canceled.sort_unstable();
    Some(Decomposition { b, c, canceled })
}

/// Signed values added to the first part (their negatives go to the second)
/// so that the first part sums to zero.
fn balancing_sets(sigma: i128, pairs: usize, bound: i64) -> Vec<Vec<i64>> {
    let fits = |t: i128| t != 0 && t.abs() <= bound as i128;
    match pairs {
        0 => {
            if sigma == 0 {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        1 => {
            if fits(-sigma) {
                vec![vec![-sigma as i64]]
            } else {
                vec![]
            }
        }
        _ => {
            let mut out = Vec::new();
            for t1 in (-bound..=bound).filter(|&t| t != 0) {
                let t2 = -sigma - t1 as i128;
                if !fits(t2) {
                    continue;
                }
                let t2 = t2 as i64;
                if (t1.unsigned_abs(), t1) <= (t2.unsigned_abs(), t2) {
                    out.push(vec![t1, t2]);
                }
            }
            out
        }
    }
}

/// Bounded search for a split into two height-1 integral lists, allowing up
/// to `max_pairs` cancelling pairs `(v, -v)` with `v <= cancel_bound`.
/// Splits with fewer pairs are tried first; within that, the first part
/// always holds the first entry and masks are tried in increasing order.
/// `None` only means nothing was found within the bounds.
pub fn search_decomposition(
    a: &IntList,
    cancel_bound: i64,
    max_pairs: usize,
) -> Result<Option<Decomposition>> {
    let e = a.entries();
    if e.len() > 24 {
        return Err(Error::Precondition(format!(
            "list of length {} is too long for split search",
            e.len()
        )));
    }
    if e.is_empty() {
        return Ok(None);
    }
    let masks: Vec<u32> = (0..1u32 << e.len()).filter(|m| m & 1 == 1).collect();
    let pairs_cap = max_pairs.min(2);
    for pairs in 0..=pairs_cap {
        let found = masks.par_iter().find_map_first(|&mask| {
            let sigma: i128 = e
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x as i128)
                .sum();
            balancing_sets(sigma, pairs, cancel_bound)
                .into_iter()
                .find_map(|extra| try_split(e, mask, &extra))
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    if max_pairs > 2 {
        return Err(Error::Precondition(
            "split search supports at most two cancelling pairs".into(),
        ));
    }
    Ok(None)
}

/// [`search_decomposition`] with cancellation up to the largest entry and two
/// pairs.
pub fn search_decomposition_default(a: &IntList) -> Result<Option<Decomposition>> {
    let bound = i64::try_from(a.max_abs()).map_err(|_| Error::Overflow("cancel bound"))?;
    search_decomposition(a, bound, 2)
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: i64) -> Result<()> {
    if p >= 11 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::BadPrime(p))
    }
}

fn split_by(a: &IntList, p: i64) -> (Vec<i64>, Vec<i64>) {
    a.entries().iter().partition(|&&x| x % p == 0)
}

/// `p` divides some but not all entries and the multiples do not sum to
/// zero.
fn divisibility_hypothesis(a: &IntList, p: i64) -> bool {
    let (count, sum) = a.multiples_of(p);
    count > 0 && count < a.len() && sum != 0
}

/// True when no split into two dilates of sporadic height-1 lists exists:
/// `p` divides some but not all entries and those multiples do not sum to
/// zero.
pub fn lemma61_check(a: &IntList, p: i64) -> Result<bool> {
    check_prime(p)?;
    Ok(divisibility_hypothesis(a, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
}

fn sorted(mut v: Vec<i128>) -> Vec<i128> {
    v.sort_unstable();
    v
}

/// Shapes a list must have if it splits as one sporadic list plus one list
/// from an infinite family. An empty result rules that split out.
pub fn lemma62_cases(a: &IntList, p: i64) -> Result<Vec<Case>> {
    check_prime(p)?;
    if !divisibility_hypothesis(a, p) {
        return Err(Error::HypothesisNotMet(format!(
            "{p} must divide some but not all entries, with multiples not summing to zero"
        )));
    }
    let (mult, non) = split_by(a, p);
    let mut cases = Vec::new();
    let k = mult.len();
    if k == 1 || (k % 2 == 0 && k >= 4) {
        cases.push(Case::I);
    }
    if k == 2
        && (mult[0] as i128 == -2 * mult[1] as i128 || mult[1] as i128 == -2 * mult[0] as i128)
    {
        cases.push(Case::II);
    }
    if non.len() == 3 && has_half_pair_with_third(&non, p) {
        cases.push(Case::III);
    }
    Ok(cases)
}

/// Three values containing `-b, 2b` whose third is `-b` modulo `p`.
fn has_half_pair_with_third(non: &[i64], p: i64) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let k = 3 - i - j;
            let b = -(non[i] as i128);
            if non[j] as i128 == 2 * b && (non[k] as i128 + b).rem_euclid(p as i128) == 0 {
                return true;
            }
        }
    }
    false
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

fn case_63_i(non: &[i64], p: i64) -> bool {
    if non.len() != 3 {
        return false;
    }
    let p = p as i128;
    let r: Vec<i128> = non.iter().map(|&x| (x as i128).rem_euclid(p)).collect();
    (0..3).any(|k| {
        let (i, j) = match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        r[i] != 0 && r[i] == r[j] && (r[k] + 2 * r[i]).rem_euclid(p) == 0
    })
}

fn case_63_ii(non: &[i64], mult: &[i64]) -> bool {
    if non.len() != 5 || mult.len() != 3 {
        return false;
    }
    let target = sorted(mult.iter().map(|&m| m as i128).collect());
    permutations(5).into_iter().any(|o| {
        let n = |i: usize| non[o[i]] as i128;
        // order: 4x, -x, 2y, -y, -z
        let x = -n(1);
        let y = -n(3);
        let z = -n(4);
        if n(0) != 4 * x || n(2) != 2 * y {
            return false;
        }
        sorted(vec![2 * z - 4 * x, -(z - 2 * x), -(x + y)]) == target
            || sorted(vec![2 * (z - x), -(z - x), -(2 * x + y)]) == target
    })
}

fn case_63_iii(non: &[i64], mult: &[i64]) -> bool {
    if non.len() != 5 || mult.len() != 3 {
        return false;
    }
    let target = sorted(mult.iter().map(|&m| m as i128).collect());
    permutations(5).into_iter().any(|o| {
        let n = |i: usize| non[o[i]] as i128;
        // order: x, 2y, -y, 2z, -z
        let x = n(0);
        let y = -n(2);
        let z = -n(4);
        if n(1) != 2 * y || n(3) != 2 * z {
            return false;
        }
        let first = x % 2 == 0 && sorted(vec![-(x / 2 + y), -(x + 2 * z), x / 2 + z]) == target;
        first || sorted(vec![x - y, -2 * (2 * x + z), 2 * x + z]) == target
    })
}

/// Multiset of entries as net counts per value.
fn counts(v: &[i64]) -> BTreeMap<i64, i64> {
    let mut m = BTreeMap::new();
    for &x in v {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

fn take(m: &mut BTreeMap<i64, i64>, x: i64) -> bool {
    match m.get_mut(&x) {
        Some(c) if *c > 0 => {
            *c -= 1;
            true
        }
        _ => false,
    }
}

/// Whether `a` is `[2a,-a,2b,-b,2c,-c,2d,-d,-(a+b),-(c+d)]` or
/// `[2a,-a,2b,-b,-(a+b),c+d,-c,-d]` with positive parameters.
pub fn matches_two_family_shape(a: &IntList) -> bool {
    let pos: Vec<i64> = a.positives().collect();
    let neg: Vec<i64> = a.negatives().map(|m| -m).collect();
    match (pos.len(), neg.len()) {
        (4, 6) => {
            // every positive 2t has -t among the negatives
            let mut rest = counts(&neg);
            let mut halves = Vec::new();
            for &q in &pos {
                if q % 2 != 0 || !take(&mut rest, -q / 2) {
                    return false;
                }
                halves.push(q / 2);
            }
            let left: Vec<i64> = rest
                .iter()
                .flat_map(|(&v, &c)| std::iter::repeat_n(v, c.max(0) as usize))
                .collect();
            if left.len() != 2 {
                return false;
            }
            let (h, l) = (&halves, &left);
            [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)]
                .iter()
                .any(|&(i, j, k, m)| {
                    let s1 = -(h[i] + h[j]);
                    let s2 = -(h[k] + h[m]);
                    (l[0] == s1 && l[1] == s2) || (l[0] == s2 && l[1] == s1)
                })
        }
        (3, 5) => (0..3).any(|odd| {
            let mut rest = counts(&neg);
            let mut halves = Vec::new();
            for (i, &q) in pos.iter().enumerate() {
                if i == odd {
                    continue;
                }
                if q % 2 != 0 || !take(&mut rest, -q / 2) {
                    return false;
                }
                halves.push(q / 2);
            }
            if !take(&mut rest, -(halves[0] + halves[1])) {
                return false;
            }
            let left: Vec<i64> = rest
                .iter()
                .flat_map(|(&v, &c)| std::iter::repeat_n(v, c.max(0) as usize))
                .collect();
            left.len() == 2 && -(left[0] + left[1]) == pos[odd]
        }),
        _ => false,
    }
}

/// Shapes a list must have if it splits as two lists from the infinite
/// families. An empty result rules that split out.
pub fn lemma63_cases(a: &IntList, p: i64) -> Result<Vec<Case>> {
    check_prime(p)?;
    let (count, sum) = a.multiples_of(p);
    if count < 3 || count % 2 == 0 || sum == 0 {
        return Err(Error::HypothesisNotMet(format!(
            "needs an odd number, at least 3, of multiples of {p} with nonzero sum"
        )));
    }
    let (mult, non) = split_by(a, p);
    let mut cases = Vec::new();
    if case_63_i(&non, p) {
        cases.push(Case::I);
    }
    if case_63_ii(&non, &mult) {
        cases.push(Case::II);
    }
    if case_63_iii(&non, &mult) {
        cases.push(Case::III);
    }
    if matches_two_family_shape(a) {
        cases.push(Case::IV);
    }
    Ok(cases)
}

/// Slots of the infinite families as forms in `(x, y)`.
const BINOMIAL: [(i64, i64); 3] = [(1, 1), (-1, 0), (0, -1)];
const FIVE_TERM: [(i64, i64); 5] = [(2, 0), (-1, 0), (0, 2), (0, -1), (-1, -1)];

fn infinite_family_member(c: &IntList) -> bool {
    let pos: Vec<i64> = c.positives().collect();
    let neg: Vec<i64> = c.negatives().collect();
    match (pos.len(), neg.len()) {
        (1, 2) => c.sum() == 0,
        (2, 3) => {
            let (x2, y2) = (pos[0], pos[1]);
            if x2 % 2 != 0 || y2 % 2 != 0 {
                return false;
            }
            let mut want = vec![x2 / 2, y2 / 2, (x2 + y2) / 2];
            want.sort_unstable();
            want == neg
        }
        _ => false,
    }
}

/// Exhaustive search for a split of `a` into two lists from the infinite
/// families, allowing any number of cancelling pairs. `None` when `a` has
/// fewer than 5 entries, where the search is not known to be complete.
///
/// With at least 5 entries, each part keeps two of its slots with
/// independent forms uncancelled: otherwise the other part would need more
/// than 5 entries. Those two slots pin `(x, y)` to entries of `a`, so trying
/// every pair of slots against every pair of positions finds every split.
pub fn two_family_split(a: &IntList) -> Option<Option<Decomposition>> {
    let e = a.entries();
    if e.len() < 5 {
        return None;
    }
    let shapes: [&[(i64, i64)]; 2] = [&BINOMIAL, &FIVE_TERM];
    for shape in shapes {
        for (i, &(p1, q1)) in shape.iter().enumerate() {
            for (j, &(p2, q2)) in shape.iter().enumerate() {
                let det = p1 as i128 * q2 as i128 - p2 as i128 * q1 as i128;
                if i == j || det == 0 {
                    continue;
                }
                for (s, &u) in e.iter().enumerate() {
                    for (t, &w) in e.iter().enumerate() {
                        if s == t {
                            continue;
                        }
                        let (u, w) = (u as i128, w as i128);
                        let xn = u * q2 as i128 - w * q1 as i128;
                        let yn = p1 as i128 * w - p2 as i128 * u;
                        if xn % det != 0 || yn % det != 0 {
                            continue;
                        }
                        let (x, y) = (xn / det, yn / det);
                        if x < 1 || y < 1 {
                            continue;
                        }
                        let Some(b) = shape
                            .iter()
                            .map(|&(p, q)| i64::try_from(p as i128 * x + q as i128 * y).ok())
                            .collect::<Option<Vec<i64>>>()
                        else {
                            continue;
                        };
                        if let Some(d) = split_off(e, &b) {
                            return Some(Some(d));
                        }
                    }
                }
            }
        }
    }
    Some(None)
}

/// With `b` taken as one part, the other part is what remains of `a` after
/// removing `b`, cancelled entries of `b` turning into their negatives.
fn split_off(a: &[i64], b: &[i64]) -> Option<Decomposition> {
    let b = IntList::cancelled(b.iter().copied()).ok()?;
    let c = IntList::cancelled(a.iter().copied().chain(b.entries().iter().map(|&x| -x))).ok()?;
    if c.is_empty() || !infinite_family_member(&c) {
        return None;
    }
    let mut in_c = counts(c.entries());
    let mut canceled: Vec<u64> = b
        .entries()
        .iter()
        .filter(|&&x| take(&mut in_c, -x))
        .map(|x| x.unsigned_abs())
        .collect();
    canceled.sort_unstable();
    Some(Decomposition { b, c, canceled })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Irreducible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibilityCertificate {
    pub p: i64,
    pub lemma61: bool,
    pub cases62: Vec<Case>,
    /// `None` when the count of multiples of `p` is not odd and at least 3.
    pub cases63: Option<Vec<Case>>,
    /// Two infinite-family lists have at most 10 entries between them, and
    /// exactly 10 only when concatenated without cancellation. Set when this
    /// alone rules out a split into two such lists.
    pub length_rules_out_two_families: bool,
    /// Result of the exhaustive search over splits into two infinite-family
    /// lists; `None` below 5 entries, where it does not apply.
    pub two_family_search_empty: Option<bool>,
    pub conclusion: Conclusion,
}

/// Splits into two infinite-family lists are impossible for more than 10
/// entries, and for exactly 10 unless the list is the plain concatenation
/// of two five-entry lists.
fn length_excludes_two_families(a: &IntList) -> bool {
    match a.len() {
        n if n > 10 => true,
        10 => !matches_two_family_shape(a),
        _ => false,
    }
}

/// Certificate of irreducibility for a primitive height-2 integral list.
/// Never claims reducibility; `Inconclusive` means only that this prime does
/// not settle the question.
pub fn certify_irreducible(a: &IntList, p: i64) -> Result<IrreducibilityCertificate> {
    check_prime(p)?;
    require_height_two(a)?;
    certify_unchecked(a, p)
}

fn require_height_two(a: &IntList) -> Result<()> {
    if is_integral_ratio(a).height() != Some(2) {
        return Err(Error::Precondition(format!(
            "{} is not an integral ratio of height 2",
            a.to_text()
        )));
    }
    Ok(())
}

fn certify_unchecked(a: &IntList, p: i64) -> Result<IrreducibilityCertificate> {
    let lemma61 = a.is_primitive() && divisibility_hypothesis(a, p);
    let mut cert = IrreducibilityCertificate {
        p,
        lemma61,
        cases62: Vec::new(),
        cases63: None,
        length_rules_out_two_families: false,
        two_family_search_empty: None,
        conclusion: Conclusion::Inconclusive,
    };
    if !lemma61 {
        return Ok(cert);
    }
    cert.cases62 = lemma62_cases(a, p)?;
    cert.cases63 = lemma63_cases(a, p).ok();
    cert.length_rules_out_two_families = length_excludes_two_families(a);
    cert.two_family_search_empty = two_family_split(a).map(|found| found.is_none());
    let two_families_excluded = cert.length_rules_out_two_families
        || cert.cases63.as_ref().is_some_and(|c| c.is_empty())
        || cert.two_family_search_empty == Some(true);
    if cert.cases62.is_empty() && two_families_excluded {
        cert.conclusion = Conclusion::Irreducible;
    }
    Ok(cert)
}

/// Tries every prime from 11 up to the largest entry and returns the first
/// certificate that concludes irreducibility.
pub fn certify_with_any_prime(a: &IntList) -> Result<Option<IrreducibilityCertificate>> {
    require_height_two(a)?;
    let top = i64::try_from(a.max_abs()).map_err(|_| Error::Overflow("prime bound"))?;
    for p in (11..=top).filter(|&p| is_prime(p)) {
        if a.multiples_of(p).0 == 0 {
            continue;
        }
        let cert = certify_unchecked(a, p)?;
        if cert.conclusion == Conclusion::Irreducible {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// An instance of a family together with its certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedInstance {
    pub params: Vec<i64>,
    pub list: IntList,
    pub certificate: IrreducibilityCertificate,
}

/// Parameter vectors of max-norm exactly `r`, lexicographic.
fn shell(d: usize, r: i64) -> Vec<Vec<i64>> {
    crate::family::grid(d, r)
        .into_iter()
        .filter(|p| p.iter().map(|t| t.abs()).max() == Some(r))
        .collect()
}

/// Searches instances of a family, by increasing parameter size up to
/// `bound`, for a height-2 integral instance certified irreducible by some
/// prime. Instances with a parameter divisible by a prime `>= 11` are tried
/// first within each size.
pub fn find_certified_instance(f: &AffineList, bound: i64) -> Result<Option<CertifiedInstance>> {
    let has_big_prime_factor = |p: &[i64]| {
        p.iter()
            .any(|&t| t != 0 && (11..=t.abs()).any(|q| is_prime(q) && t % q == 0))
    };
    for r in 1..=bound {
        let mut cands = shell(f.dim(), r);
        cands.sort_by_key(|p| !has_big_prime_factor(p));
        let hit = cands.par_iter().find_map_first(|params| {
            let list = f.instantiate(params).ok()?;
            if !list.is_primitive() || list.height() != 2 {
                return None;
            }
            // cheap residue tests before the integrality check
            let top = i64::try_from(list.max_abs()).ok()?;
            let mut primes = (11..=top).filter(|&p| is_prime(p)).filter(|&p| {
                divisibility_hypothesis(&list, p)
                    && lemma62_cases(&list, p).is_ok_and(|c| c.is_empty())
            });
            let first = primes.next()?;
            require_height_two(&list).ok()?;
            let certificate = std::iter::once(first)
                .chain(primes)
                .filter_map(|p| certify_unchecked(&list, p).ok())
                .find(|c| c.conclusion == Conclusion::Irreducible)?;
            (certificate.conclusion == Conclusion::Irreducible).then(|| CertifiedInstance {
                params: params.clone(),
                list,
                certificate,
            })
        });
        if hit.is_some() {
            return Ok(hit);
        }
    }
    Ok(None)
}
