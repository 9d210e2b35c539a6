//! Embedded catalog of known lists, families and constructions, each with
//! expectations that one verification routine can confirm.
//!
//! Entries whose printed source text is inconsistent carry a `correction`;
//! the stored data is the corrected form and the printed text is kept next
//! to it.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructor::{self, emit_family};
use crate::criteria::{self, is_integral_ratio, is_monotone};
use crate::error::{Error, Result};
use crate::family::{
    self, params_gcd, parse_forms, verify_family_exact, verify_family_sampled, AffineList,
    Constraint, FamilyVerdict,
};
use crate::list::IntList;
use crate::rat::Rat;
use crate::reducibility::{
    self, certify_with_any_prime, search_decomposition_default, Decomposition,
};
use crate::step;

const EMBEDDED: &str = include_str!("../data/catalog.json");

/// Parameter bound for instance checks of identities.
pub const IDENTITY_GRID: i64 = 20;
/// Parameter bound when searching for a certified irreducible instance.
pub const CERTIFY_BOUND: i64 = 110;
/// Parameter bound for running the split search on identity instances.
pub const SPLIT_SEARCH_GRID: i64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    /// Text as printed; `None` for entries the printed source omits.
    pub printed: Option<String>,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Sampled,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListPair {
    pub a: IntList,
    pub b: IntList,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// A list with a known norm.
    Norm { list: IntList, norm: Rat },
    /// An integral ratio of known height.
    Ratio { list: IntList, height: i64 },
    /// A family equal to the concatenation of its parts.
    Identity { family: String, parts: Vec<String> },
    Family {
        family: String,
        #[serde(default)]
        height: Option<i64>,
        method: Method,
        #[serde(default)]
        certify: bool,
        /// Lists from which the construction rebuilds this family.
        #[serde(default)]
        construction: Option<ListPair>,
        #[serde(default)]
        constraints: Vec<Constraint>,
        #[serde(default)]
        sample_bound: Option<i64>,
        #[serde(default)]
        oracle_n: Option<u64>,
        #[serde(default)]
        norm_limit: Option<Rat>,
    },
    /// Inputs of the construction with the expected base list.
    Construction {
        a: IntList,
        b: IntList,
        base: IntList,
        printed_base: String,
        #[serde(default)]
        printed_b: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub scope: String,
    #[serde(flatten)]
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<Correction>,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn embedded() -> Catalog {
        Catalog::from_json(EMBEDDED).expect("embedded catalog is valid")
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let mut entries: Vec<CatalogEntry> =
            serde_json::from_str(text).map_err(|e| Error::Catalog(e.to_string()))?;
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = entries.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::Catalog(format!("duplicate id {}", w[0].id)));
        }
        Ok(Catalog { entries })
    }

    /// Entries sorted by id.
    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn scopes(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.scope.as_str()).collect()
    }

    pub fn in_scope<'a>(&'a self, scope: &'a str) -> impl Iterator<Item = &'a CatalogEntry> + 'a {
        self.entries
            .iter()
            .filter(move |e| scope == "all" || e.scope == scope)
    }

    /// Lists with a stored norm, keyed by id, for shape matching.
    pub fn small_norm_lists(&self) -> Vec<(String, IntList)> {
        self.entries
            .iter()
            .filter_map(|e| match &e.payload {
                Payload::Norm { list, .. } => Some((e.id.clone(), list.clone())),
                _ => None,
            })
            .collect()
    }

    /// Small-norm lists as printed: corrected entries appear in their printed
    /// form, entries absent from print are left out.
    pub fn printed_small_norm_lists(&self) -> Result<Vec<(String, IntList)>> {
        let mut out = Vec::new();
        for e in &self.entries {
            let Payload::Norm { list, .. } = &e.payload else {
                continue;
            };
            match &e.correction {
                None => out.push((e.id.clone(), list.clone())),
                Some(Correction {
                    printed: Some(p), ..
                }) => {
                    out.push((e.id.clone(), p.parse()?));
                }
                Some(Correction { printed: None, .. }) => {}
            }
        }
        Ok(out)
    }

    /// Verifies every entry in `scope` (`"all"` for everything), in
    /// parallel, reporting in id order.
    pub fn verify(&self, scope: &str) -> Result<CatalogReport> {
        let chosen: Vec<&CatalogEntry> = self.in_scope(scope).collect();
        if chosen.is_empty() {
            return Err(Error::Catalog(format!("no entries in scope {scope:?}")));
        }
        let entries: Vec<EntryReport> = chosen.par_iter().map(|e| verify_entry(e)).collect();
        Ok(CatalogReport::new(scope, entries))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Check {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub id: String,
    pub scope: String,
    pub passed: bool,
    /// Set when the entry carries a correction against the printed text.
    pub flagged: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub scope: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub flagged: usize,
    pub entries: Vec<EntryReport>,
}

impl CatalogReport {
    fn new(scope: &str, entries: Vec<EntryReport>) -> CatalogReport {
        let passed = entries.iter().filter(|e| e.passed).count();
        CatalogReport {
            scope: scope.into(),
            total: entries.len(),
            passed,
            failed: entries.len() - passed,
            flagged: entries.iter().filter(|e| e.flagged).count(),
            entries,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn entry(&self, id: &str) -> Option<&EntryReport> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// Runs every expectation of one entry.
pub fn verify_entry(e: &CatalogEntry) -> EntryReport {
    let checks = match &e.payload {
        Payload::Norm { list, norm } => check_norm(list, norm),
        Payload::Ratio { list, height } => check_ratio(list, *height),
        Payload::Identity { family, parts } => check_identity(family, parts),
        Payload::Family { .. } => check_family(&e.payload),
        Payload::Construction { .. } => check_construction(&e.payload, e.correction.is_some()),
    };
    EntryReport {
        id: e.id.clone(),
        scope: e.scope.clone(),
        passed: checks.iter().all(|c| c.passed),
        flagged: e.correction.is_some(),
        checks,
    }
}

fn check_norm(list: &IntList, expected: &Rat) -> Vec<Check> {
    let by_gcd = criteria::norm(list);
    let by_integral = step::norm_by_integral(list);
    vec![
        Check::from_result(
            "norm",
            by_gcd.map(|n| (&n == expected, format!("{n}, expected {expected}"))),
        ),
        Check::from_result(
            "norm_by_integral",
            by_integral.map(|n| (&n == expected, format!("{n}, expected {expected}"))),
        ),
    ]
}

fn check_ratio(list: &IntList, height: i64) -> Vec<Check> {
    let v = is_integral_ratio(list);
    let landau = Check::new(
        "landau",
        v.height() == Some(height),
        serde_json::to_string(&v).unwrap_or_default(),
    );
    let oracle = Check::from_result(
        "factorial_oracle",
        criteria::factorial_oracle(list, 30).map(|o| (o.integral, format!("n <= {}", o.checked))),
    );
    vec![landau, oracle]
}

/// Multiset of forms after removing pairs `f, -f`.
fn cancel_forms(forms: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let mut counts: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for f in forms {
        if f.iter().all(|&c| c == 0) {
            continue;
        }
        let neg: Vec<i64> = f.iter().map(|c| -c).collect();
        match counts.get_mut(&neg) {
            Some(c) if *c > 0 => *c -= 1,
            _ => *counts.entry(f).or_insert(0) += 1,
        }
    }
    let mut out = Vec::new();
    for (f, c) in counts {
        for _ in 0..c {
            out.push(f.clone());
        }
    }
    out
}

/// Result of checking that a family equals the concatenation of its parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    /// Forms agree after cancellation.
    pub symbolic: bool,
    /// Coprime tuples checked by instantiation.
    pub instances: u64,
    /// First tuple where the instances disagree.
    pub instance_mismatch: Option<Vec<i64>>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.symbolic && self.instance_mismatch.is_none()
    }
}

struct ParsedIdentity {
    family: AffineList,
    parts: Vec<AffineList>,
}

fn parse_identity(family: &str, parts: &[String]) -> Result<ParsedIdentity> {
    let (names, left) = parse_forms(family, None)?;
    let d = names.len();
    let family = AffineList::new(d, left, Vec::new(), true, None)?;
    let parts = parts
        .iter()
        .map(|p| {
            let (_, forms) = parse_forms(p, Some(&names))?;
            AffineList::new(d, forms, Vec::new(), false, None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParsedIdentity { family, parts })
}

fn parts_instance(parts: &[AffineList], params: &[i64]) -> Result<Vec<IntList>> {
    parts
        .iter()
        .map(|p| {
            let raw = p.raw_values(params)?;
            IntList::cancelled(raw.into_iter().filter(|&v| v != 0))
        })
        .collect()
}

/// Checks `family = part_1 + part_2 + ...` on forms, and on every coprime
/// parameter tuple in `[-bound, bound]^d`.
pub fn verify_decomposition_identity(
    family: &str,
    parts: &[String],
    bound: i64,
) -> Result<IdentityCheck> {
    let id = parse_identity(family, parts)?;
    let left = cancel_forms(id.family.entries().to_vec());
    let right = cancel_forms(id.parts.iter().flat_map(|p| p.entries().to_vec()).collect());
    let symbolic = left == right;
    let tuples: Vec<Vec<i64>> = family::grid(id.family.dim(), bound)
        .into_iter()
        .filter(|p| params_gcd(p) == 1)
        .collect();
    let instances = tuples.len() as u64;
    let instance_mismatch = tuples.into_par_iter().find_first(|p| {
        let l = IntList::cancelled(
            id.family
                .raw_values(p)
                .unwrap_or_default()
                .into_iter()
                .filter(|&v| v != 0),
        );
        let r = parts_instance(&id.parts, p)
            .and_then(|ls| IntList::cancelled(ls.iter().flat_map(|l| l.entries().to_vec())));
        match (l, r) {
            (Ok(l), Ok(r)) => l != r,
            _ => true,
        }
    });
    Ok(IdentityCheck {
        symbolic,
        instances,
        instance_mismatch,
    })
}

/// How the height-2 instances of a reducible family were handled.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibleInstances {
    pub height_two: u64,
    /// Instances where the identity's parts are both integral of height 1.
    pub split_by_parts: u64,
    /// Instances split only by the bounded search.
    pub split_by_search: u64,
    /// Instances whose split search also ran and found a witness.
    pub searched: u64,
    pub unsplit: Vec<Vec<i64>>,
    /// Instances wrongly certified irreducible; must stay empty.
    pub certified: Vec<Vec<i64>>,
}

/// For each height-2 instance of a reducible family on the grid: finds a
/// split (from the identity's parts, else by search) and confirms that no
/// prime certifies irreducibility. Small tuples also run the split search
/// even when the parts already split.
pub fn check_reducible_instances(
    family: &str,
    parts: &[String],
    bound: i64,
    search_bound: i64,
) -> Result<ReducibleInstances> {
    let id = parse_identity(family, parts)?;
    let tuples: Vec<Vec<i64>> = family::grid(id.family.dim(), bound)
        .into_iter()
        .filter(|p| params_gcd(p) == 1)
        .collect();
    #[derive(Default)]
    struct One {
        by_parts: bool,
        by_search: bool,
        searched: bool,
        unsplit: bool,
        certified: bool,
    }
    let per: Vec<Option<(Vec<i64>, One)>> = tuples
        .into_par_iter()
        .map(|p| {
            let list = id.family.instantiate_unchecked(&p).ok()?;
            if list.height() != 2 || !is_integral_ratio(&list).is_integral() {
                return None;
            }
            let mut one = One::default();
            let parts = parts_instance(&id.parts, &p).ok()?;
            let from_parts = (parts.len() == 2).then(|| Decomposition {
                b: parts[0].clone(),
                c: parts[1].clone(),
                canceled: Vec::new(),
            });
            one.by_parts = from_parts.is_some_and(|d| d.is_valid_for(&list));
            let small = p.iter().all(|t| t.abs() <= search_bound);
            if small || !one.by_parts {
                let found = search_decomposition_default(&list)
                    .ok()
                    .flatten()
                    .filter(|d| d.is_valid_for(&list));
                one.searched = small && found.is_some();
                one.by_search = !one.by_parts && found.is_some();
            }
            one.unsplit = !one.by_parts && !one.by_search;
            one.certified =
                list.is_primitive() && certify_with_any_prime(&list).ok().flatten().is_some();
            Some((p, one))
        })
        .collect();
    let mut r = ReducibleInstances::default();
    for (p, one) in per.into_iter().flatten() {
        r.height_two += 1;
        r.split_by_parts += one.by_parts as u64;
        r.split_by_search += one.by_search as u64;
        r.searched += one.searched as u64;
        if one.unsplit {
            r.unsplit.push(p.clone());
        }
        if one.certified {
            r.certified.push(p);
        }
    }
    Ok(r)
}

fn check_identity(family: &str, parts: &[String]) -> Vec<Check> {
    let ident = Check::from_result(
        "identity",
        verify_decomposition_identity(family, parts, IDENTITY_GRID).map(|c| {
            (
                c.holds(),
                format!(
                    "symbolic {}, {} coprime tuples, mismatch {:?}",
                    c.symbolic, c.instances, c.instance_mismatch
                ),
            )
        }),
    );
    let reduc = Check::from_result(
        "reducible_instances",
        check_reducible_instances(family, parts, IDENTITY_GRID, SPLIT_SEARCH_GRID).map(|r| {
            (
                r.height_two > 0 && r.unsplit.is_empty() && r.certified.is_empty(),
                format!(
                    "{} height-2 instances, {} split by parts, {} by search, {} searched, \
                     unsplit {:?}, certified {:?}",
                    r.height_two,
                    r.split_by_parts,
                    r.split_by_search,
                    r.searched,
                    r.unsplit,
                    r.certified
                ),
            )
        }),
    );
    vec![ident, reduc]
}

fn verdict_text(v: &FamilyVerdict) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

/// Whether `f` has the forms of `g` after flipping the signs of some
/// parameters.
pub fn same_up_to_parameter_signs(f: &AffineList, g: &AffineList) -> bool {
    if f.dim() != g.dim() {
        return false;
    }
    (0..1u32 << f.dim()).any(|mask| {
        let flipped: Vec<Vec<i64>> = f
            .entries()
            .iter()
            .map(|e| {
                e.iter()
                    .enumerate()
                    .map(|(i, &c)| if mask >> i & 1 == 1 { -c } else { c })
                    .collect()
            })
            .collect();
        cancel_forms(flipped) == cancel_forms(g.entries().to_vec())
    })
}

fn load_family(payload: &Payload) -> Result<AffineList> {
    let Payload::Family {
        family,
        height,
        constraints,
        ..
    } = payload
    else {
        return Err(Error::Catalog("not a family entry".into()));
    };
    AffineList::parse_shorthand(family)?
        .with_constraints(constraints.clone())?
        .with_height(*height)
}

/// The family of a catalog entry, with its claimed height and constraints.
pub fn entry_family(e: &CatalogEntry) -> Result<AffineList> {
    load_family(&e.payload)
}

fn certify_check(f: &AffineList) -> Check {
    Check::from_result(
        "certified_instance",
        reducibility::find_certified_instance(f, CERTIFY_BOUND).map(|hit| match hit {
            Some(h) => (
                true,
                format!(
                    "params {:?}, {} with p = {}",
                    h.params, h.list, h.certificate.p
                ),
            ),
            None => (
                false,
                format!("no certified instance with parameters <= {CERTIFY_BOUND}"),
            ),
        }),
    )
}

fn check_family(payload: &Payload) -> Vec<Check> {
    let Payload::Family {
        method,
        certify,
        construction,
        sample_bound,
        oracle_n,
        norm_limit,
        ..
    } = payload
    else {
        unreachable!("family payload");
    };
    let f = match load_family(payload) {
        Ok(f) => f,
        Err(e) => return vec![Check::new("parse", false, e.to_string())],
    };
    let mut checks = Vec::new();
    match method {
        Method::Exact => checks.push(Check::from_result(
            "exact",
            verify_family_exact(&f).map(|v| (v.passed(), verdict_text(&v))),
        )),
        Method::Sampled => checks.push(Check::from_result(
            "sampled",
            verify_family_sampled(&f, sample_bound.unwrap_or(6), oracle_n.unwrap_or(30)).map(|v| {
                let ok =
                    matches!(v, FamilyVerdict::VerifiedSampled { instances, .. } if instances > 0);
                (ok, verdict_text(&v))
            }),
        )),
        Method::Fails => {
            checks.push(Check::from_result(
                "exact_fails",
                verify_family_exact(&f)
                    .map(|v| (matches!(v, FamilyVerdict::Fails { .. }), verdict_text(&v))),
            ));
            checks.push(Check::from_result(
                "sampled_fails",
                verify_family_sampled(&f, sample_bound.unwrap_or(30), oracle_n.unwrap_or(0)).map(
                    |v| match &v {
                        FamilyVerdict::FailsInstance { list, .. } => {
                            (list.is_primitive(), verdict_text(&v))
                        }
                        _ => (false, verdict_text(&v)),
                    },
                ),
            ));
        }
    }
    if let Some(expected) = norm_limit {
        checks.push(Check::from_result(
            "norm_limit",
            family::family_norm_limit(&f, None).map(|n| {
                (
                    &n.limit == expected,
                    format!("{}, expected {expected}", n.limit),
                )
            }),
        ));
    }
    if let Some(pair) = construction {
        checks.push(Check::from_result(
            "construction",
            constructor::build_input(&pair.a, &pair.b).and_then(|t| {
                let g = emit_family(&t);
                let same = same_up_to_parameter_signs(&g, &f);
                let v = verify_family_exact(&g)?;
                Ok((
                    same && v.passed() && g.claimed_height() == f.claimed_height(),
                    format!("same forms {same}, emitted family {}", verdict_text(&v)),
                ))
            }),
        ));
    }
    if *certify {
        checks.push(certify_check(&f));
    }
    checks
}

/// Report on one construction entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionReport {
    pub base: IntList,
    pub base_matches_expected: bool,
    pub base_matches_printed: bool,
    pub base_integral_height_one: bool,
    pub b_monotone: bool,
    pub family: FamilyVerdict,
    pub proof_checks: constructor::ProofChecks,
}

/// Rebuilds a construction entry and runs every check on it.
pub fn verify_construction(e: &CatalogEntry) -> Result<ConstructionReport> {
    let Payload::Construction {
        a,
        b,
        base,
        printed_base,
        ..
    } = &e.payload
    else {
        return Err(Error::Catalog(format!("{} is not a construction", e.id)));
    };
    let t = constructor::build_input(a, b)?;
    let printed: Option<IntList> = printed_base.parse().ok();
    Ok(ConstructionReport {
        base: t.base().clone(),
        base_matches_expected: t.base() == base,
        base_matches_printed: printed.as_ref() == Some(t.base()),
        base_integral_height_one: is_integral_ratio(t.base()).height() == Some(1),
        b_monotone: is_monotone(b)?,
        family: verify_family_exact(&emit_family(&t))?,
        proof_checks: constructor::proof_checks(&t)?,
    })
}

fn check_construction(payload: &Payload, flagged: bool) -> Vec<Check> {
    let e = CatalogEntry {
        id: String::new(),
        scope: String::new(),
        payload: payload.clone(),
        correction: None,
    };
    let r = match verify_construction(&e) {
        Ok(r) => r,
        Err(err) => return vec![Check::new("build", false, err.to_string())],
    };
    let mut checks = vec![
        Check::new("b_monotone", r.b_monotone, ""),
        Check::new("base", r.base_matches_expected, r.base.to_text()),
        Check::new(
            "base_printed",
            r.base_matches_printed || flagged,
            if r.base_matches_printed {
                "matches".to_string()
            } else {
                "differs from print; see correction".to_string()
            },
        ),
        Check::new("base_integral", r.base_integral_height_one, ""),
        Check::new("family_exact", r.family.passed(), verdict_text(&r.family)),
        Check::new(
            "proof_checks",
            r.proof_checks.all_hold(),
            serde_json::to_string(&r.proof_checks).unwrap_or_default(),
        ),
    ];
    if let Payload::Construction { a, b, .. } = payload {
        if let Ok(f) = constructor::build_input(a, b).map(|t| emit_family(&t)) {
            checks.push(certify_check(&f));
        }
    }
    checks
}
