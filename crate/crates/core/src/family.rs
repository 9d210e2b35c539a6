//! Parametric lists: entries are homogeneous integer linear forms in up to
//! four parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arrangement::{self, Form2};
use crate::criteria::{self, RatioVerdict};
use crate::error::{Error, Result};
use crate::frac::Frac;
use crate::list::IntList;
use crate::rat::Rat;

pub const MAX_PARAMS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">0")]
    Positive,
    #[serde(rename = ">=0")]
    NonNegative,
}

/// `sum coeffs[p] * t_p  (> 0 | >= 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint(pub Vec<i64>, pub Relation);

impl Constraint {
    pub fn positive(coeffs: Vec<i64>) -> Constraint {
        Constraint(coeffs, Relation::Positive)
    }

    pub fn holds(&self, params: &[i64]) -> bool {
        let v = dot(&self.0, params);
        match self.1 {
            Relation::Positive => v > 0,
            Relation::NonNegative => v >= 0,
        }
    }
}

fn dot(coeffs: &[i64], params: &[i64]) -> i128 {
    coeffs
        .iter()
        .zip(params)
        .map(|(&c, &t)| c as i128 * t as i128)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineList {
    d: usize,
    entries: Vec<Vec<i64>>,
    constraints: Vec<Constraint>,
    coprime: bool,
    height: Option<i64>,
}

impl AffineList {
    pub fn new(
        d: usize,
        entries: Vec<Vec<i64>>,
        constraints: Vec<Constraint>,
        coprime: bool,
        height: Option<i64>,
    ) -> Result<AffineList> {
        if d == 0 || d > MAX_PARAMS {
            return Err(Error::InvalidFamily(format!(
                "parameter count {d} outside 1..={MAX_PARAMS}"
            )));
        }
        if entries.is_empty() {
            return Err(Error::InvalidFamily("no entries".into()));
        }
        for e in &entries {
            if e.len() != d {
                return Err(Error::InvalidFamily(format!(
                    "entry {e:?} needs {d} coefficients"
                )));
            }
            if e.iter().all(|&c| c == 0) {
                return Err(Error::InvalidFamily("an entry is identically zero".into()));
            }
        }
        for c in &constraints {
            if c.0.len() != d {
                return Err(Error::InvalidFamily(format!(
                    "constraint {:?} needs {d} coefficients",
                    c.0
                )));
            }
        }
        if let Some(h) = height {
            if h < 1 {
                return Err(Error::InvalidFamily(format!(
                    "claimed height {h} is not positive"
                )));
            }
        }
        let f = AffineList {
            d,
            entries,
            constraints,
            coprime,
            height,
        };
        if height.is_some() && !f.has_zero_sum() {
            return Err(Error::InvalidFamily(
                "a family claiming a height needs coefficient sums of zero".into(),
            ));
        }
        Ok(f)
    }

    /// Parses the comma-separated shorthand, e.g. `"6a,b,-2a,-3a,-6b,-(a-5b)"`.
    /// Parameters are the letters used, in alphabetical order.
    pub fn parse_shorthand(text: &str) -> Result<AffineList> {
        let (_, entries) = parse_forms(text, None)?;
        let d = entries[0].len();
        AffineList::new(d, entries, Vec::new(), true, None)
    }

    pub fn with_height(mut self, h: Option<i64>) -> Result<AffineList> {
        self.height = h;
        AffineList::new(self.d, self.entries, self.constraints, self.coprime, h)
    }

    pub fn with_constraints(mut self, c: Vec<Constraint>) -> Result<AffineList> {
        self.constraints = c;
        AffineList::new(
            self.d,
            self.entries,
            self.constraints,
            self.coprime,
            self.height,
        )
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn coprime_required(&self) -> bool {
        self.coprime
    }

    pub fn claimed_height(&self) -> Option<i64> {
        self.height
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_zero_sum(&self) -> bool {
        (0..self.d).all(|p| self.entries.iter().map(|e| e[p] as i128).sum::<i128>() == 0)
    }

    pub fn admits(&self, params: &[i64]) -> bool {
        params.len() == self.d
            && self.constraints.iter().all(|c| c.holds(params))
            && (!self.coprime || params_gcd(params) == 1)
    }

    /// Entry values before zero-dropping and cancellation.
    pub fn raw_values(&self, params: &[i64]) -> Result<Vec<i64>> {
        self.entries
            .iter()
            .map(|e| i64::try_from(dot(e, params)).map_err(|_| Error::Overflow("instantiation")))
            .collect()
    }

    /// Substitutes parameters; zero entries are dropped and `v, -v` pairs
    /// cancel.
    pub fn instantiate(&self, params: &[i64]) -> Result<IntList> {
        if params.len() != self.d {
            return Err(Error::ConstraintViolation(format!(
                "expected {} parameters, got {}",
                self.d,
                params.len()
            )));
        }
        if let Some(c) = self.constraints.iter().find(|c| !c.holds(params)) {
            return Err(Error::ConstraintViolation(format!(
                "{} fails at {params:?}",
                describe_constraint(c)
            )));
        }
        if self.coprime && params_gcd(params) != 1 {
            return Err(Error::ConstraintViolation(format!(
                "parameters {params:?} are not coprime"
            )));
        }
        self.instantiate_unchecked(params)
    }

    /// Instantiation without checking constraints or coprimality.
    pub fn instantiate_unchecked(&self, params: &[i64]) -> Result<IntList> {
        let vals = self.raw_values(params)?;
        let list = IntList::cancelled(vals.into_iter().filter(|&v| v != 0))?;
        if list.is_empty() {
            return Err(Error::ZeroList);
        }
        Ok(list)
    }

    /// Claimed height, or else the largest height among instances on a
    /// small admissible grid with no vanishing entry.
    pub fn nominal_height(&self) -> Option<i64> {
        if self.height.is_some() {
            return self.height;
        }
        let mut best: Option<i64> = None;
        for p in grid(self.d, 6) {
            if !self.admits(&p) {
                continue;
            }
            let Ok(vals) = self.raw_values(&p) else {
                continue;
            };
            if vals.contains(&0) {
                continue;
            }
            if let Ok(l) = self.instantiate_unchecked(&p) {
                best = Some(best.map_or(l.height(), |b| b.max(l.height())));
            }
        }
        best
    }

    pub(crate) fn forms2(&self) -> Result<Vec<Form2>> {
        if self.d != 2 {
            return Err(Error::DimensionUnsupported(self.d));
        }
        Ok(self
            .entries
            .iter()
            .map(|e| Form2 { c: e[0], d: e[1] })
            .collect())
    }

    /// Shorthand text with parameters named `a, b, c, d`.
    pub fn to_shorthand(&self) -> String {
        let names = default_names(self.d);
        self.entries
            .iter()
            .map(|e| format_form(e, &names))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Same forms as a multiset, ignoring constraints and claims.
    pub fn same_forms(&self, other: &AffineList) -> bool {
        let mut a = self.entries.clone();
        let mut b = other.entries.clone();
        a.sort();
        b.sort();
        a == b
    }
}

pub(crate) fn params_gcd(p: &[i64]) -> u64 {
    p.iter().fold(0u64, |g, &t| g.gcd(&t.unsigned_abs()))
}

/// All tuples in `[-bound, bound]^d`, lexicographic.
pub(crate) fn grid(d: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * (2 * bound as usize + 1));
        for p in &out {
            for t in -bound..=bound {
                let mut q = p.clone();
                q.push(t);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn default_names(d: usize) -> Vec<char> {
    ['a', 'b', 'c', 'd'][..d].to_vec()
}

fn format_form(e: &[i64], names: &[char]) -> String {
    let mut s = String::new();
    for (&c, &n) in e.iter().zip(names) {
        if c == 0 {
            continue;
        }
        if c < 0 {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if c.unsigned_abs() != 1 {
            s.push_str(&c.unsigned_abs().to_string());
        }
        s.push(n);
    }
    s
}

fn describe_constraint(c: &Constraint) -> String {
    let names = default_names(c.0.len());
    let rel = match c.1 {
        Relation::Positive => "> 0",
        Relation::NonNegative => ">= 0",
    };
    format!("{} {rel}", format_form(&c.0, &names))
}

impl fmt::Display for AffineList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_shorthand())
    }
}

impl FromStr for AffineList {
    type Err = Error;

    /// Accepts the JSON object form or the shorthand.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Ok(serde_json::from_str(s)?)
        } else {
            AffineList::parse_shorthand(s)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConstraintsJson {
    One(Constraint),
    Many(Vec<Constraint>),
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    d: usize,
    entries: Vec<Vec<i64>>,
    #[serde(default = "no_constraints")]
    constraints: ConstraintsJson,
    #[serde(default = "yes")]
    coprime: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    height: Option<i64>,
}

fn no_constraints() -> ConstraintsJson {
    ConstraintsJson::Many(Vec::new())
}

fn yes() -> bool {
    true
}

impl Serialize for AffineList {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let constraints = if self.constraints.len() == 1 {
            ConstraintsJson::One(self.constraints[0].clone())
        } else {
            ConstraintsJson::Many(self.constraints.clone())
        };
        FamilyJson {
            d: self.d,
            entries: self.entries.clone(),
            constraints,
            coprime: self.coprime,
            height: self.height,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FamilyJson::deserialize(d)?;
        let constraints = match j.constraints {
            ConstraintsJson::One(c) => vec![c],
            ConstraintsJson::Many(v) => v,
        };
        AffineList::new(j.d, j.entries, constraints, j.coprime, j.height)
            .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// shorthand parser

/// Linear form with a constant part; the constant must vanish at the end.
#[derive(Clone, Debug, Default)]
struct Lin {
    k: i128,
    v: BTreeMap<char, i128>,
}

impl Lin {
    fn constant(k: i128) -> Lin {
        Lin {
            k,
            v: BTreeMap::new(),
        }
    }

    fn var(c: char) -> Lin {
        Lin {
            k: 0,
            v: BTreeMap::from([(c, 1)]),
        }
    }

    fn is_const(&self) -> bool {
        self.v.values().all(|&c| c == 0)
    }

    fn add(mut self, o: &Lin, sign: i128) -> Lin {
        self.k += sign * o.k;
        for (&c, &x) in &o.v {
            *self.v.entry(c).or_default() += sign * x;
        }
        self
    }

    fn scale(mut self, m: i128) -> Lin {
        self.k *= m;
        for x in self.v.values_mut() {
            *x *= m;
        }
        self
    }

    fn mul(self, o: Lin) -> Result<Lin> {
        if self.is_const() {
            Ok(o.scale(self.k))
        } else if o.is_const() {
            Ok(self.scale(o.k))
        } else {
            Err(Error::Parse("product of two parameters".into()))
        }
    }
}

struct Parser<'a> {
    s: &'a [char],
    i: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.s.get(self.i).copied()
    }

    fn err(&self, what: &str) -> Error {
        let text: String = self.s.iter().collect();
        Error::Parse(format!("{what} at position {} in {text:?}", self.i))
    }

    fn signs(&mut self) -> i128 {
        let mut sign = 1;
        while let Some(c) = self.peek() {
            match c {
                '+' => {}
                '-' => sign = -sign,
                _ => break,
            }
            self.i += 1;
        }
        sign
    }

    fn expr(&mut self) -> Result<Lin> {
        let mut acc = Lin::default();
        let mut sign = self.signs();
        loop {
            let t = self.term()?;
            acc = acc.add(&t, sign);
            match self.peek() {
                Some('+') | Some('-') => sign = self.signs(),
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Lin> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            if c == '(' || c.is_ascii_alphanumeric() {
                let f = self.factor()?;
                acc = acc.mul(f)?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Lin> {
        match self.peek() {
            Some('(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.i += 1;
                }
                let n: String = self.s[start..self.i].iter().collect();
                n.parse::<i128>()
                    .map(Lin::constant)
                    .map_err(|_| self.err("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.i += 1;
                Ok(Lin::var(c))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

fn parse_lin(text: &str) -> Result<Lin> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser { s: &chars, i: 0 };
    let e = p.expr()?;
    if p.i != chars.len() {
        return Err(p.err("unexpected character"));
    }
    Ok(e)
}

fn normalize(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            '\u{2212}' | '\u{2013}' => '-',
            '\u{2113}' => 'l',
            c => c,
        })
        .filter(|c| !c.is_whitespace())
        .collect()
}

/// Splits at commas outside brackets and parentheses.
fn split_top(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced brackets in {text:?}")));
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in {text:?}")));
    }
    out.push(cur);
    Ok(out)
}

fn strip_outer(text: &str) -> &str {
    if !text.starts_with('[') || !text.ends_with(']') {
        return text;
    }
    let mut depth = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if depth == 0 {
            return if i == text.len() - 1 {
                &text[1..i]
            } else {
                text
            };
        }
    }
    text
}

/// Parses shorthand into coefficient vectors. With `vars` given, those
/// letters (in that order) are the parameters; otherwise the letters that
/// occur, sorted. Items of the form `k[1,-2,...]` expand to `k` times each
/// integer.
pub fn parse_forms(text: &str, vars: Option<&[char]>) -> Result<(Vec<char>, Vec<Vec<i64>>)> {
    let norm = normalize(text);
    let body = strip_outer(&norm);
    if body.is_empty() {
        return Err(Error::Parse("empty family".into()));
    }
    let mut lins = Vec::new();
    for item in split_top(body)? {
        if item.is_empty() {
            return Err(Error::Parse(format!("empty item in {text:?}")));
        }
        if let Some(open) = item.find('[') {
            let close = item
                .rfind(']')
                .filter(|&c| c == item.len() - 1)
                .ok_or_else(|| Error::Parse(format!("bad scaled list {item:?}")))?;
            let prefix = &item[..open];
            let mult = match prefix {
                "" | "+" => Lin::constant(1),
                "-" => Lin::constant(-1),
                p => parse_lin(p)?,
            };
            for v in split_top(&item[open + 1..close])? {
                let k = parse_lin(&v)?;
                if !k.is_const() {
                    return Err(Error::Parse(format!(
                        "scaled list entry {v:?} is not an integer"
                    )));
                }
                lins.push(mult.clone().scale(k.k));
            }
        } else {
            lins.push(parse_lin(&item)?);
        }
    }
    let names: Vec<char> = match vars {
        Some(v) => v.to_vec(),
        None => {
            let mut all: Vec<char> = lins
                .iter()
                .flat_map(|l| l.v.iter().filter(|(_, &x)| x != 0).map(|(&c, _)| c))
                .collect();
            all.sort_unstable();
            all.dedup();
            all
        }
    };
    if names.is_empty() || names.len() > MAX_PARAMS {
        return Err(Error::Parse(format!(
            "family needs 1..={MAX_PARAMS} parameters, found {}",
            names.len()
        )));
    }
    let mut out = Vec::with_capacity(lins.len());
    for l in lins {
        if l.k != 0 {
            return Err(Error::Parse(format!(
                "entry in {text:?} has a constant term"
            )));
        }
        if let Some((c, _)) = l.v.iter().find(|(c, &x)| x != 0 && !names.contains(c)) {
            return Err(Error::Parse(format!("unknown parameter {c:?}")));
        }
        let coeffs = names
            .iter()
            .map(|n| {
                let x = l.v.get(n).copied().unwrap_or(0);
                i64::try_from(x).map_err(|_| Error::Overflow("coefficient"))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(coeffs);
    }
    Ok((names, out))
}

// ---------------------------------------------------------------------------
// verification

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FamilyVerdict {
    VerifiedExact {
        height: i64,
        min: i64,
        max: i64,
        points: u64,
    },
    VerifiedSampled {
        bound: i64,
        instances: u64,
    },
    Fails {
        x: Rat,
        y: Rat,
        value: i64,
    },
    FailsInstance {
        params: Vec<i64>,
        list: IntList,
        n: Option<u64>,
        witness_x: Option<Rat>,
    },
}

impl FamilyVerdict {
    pub fn passed(&self) -> bool {
        matches!(
            self,
            FamilyVerdict::VerifiedExact { .. } | FamilyVerdict::VerifiedSampled { .. }
        )
    }
}

fn sweep_height(f: &AffineList) -> Result<i64> {
    if !f.has_zero_sum() {
        return Err(Error::InvalidFamily("coefficient sums are not zero".into()));
    }
    let h = f
        .nominal_height()
        .ok_or_else(|| Error::InvalidFamily("no admissible instance to fix the height".into()))?;
    if (f.len() as i64 - h) % 2 != 0 {
        return Err(Error::InvalidFamily(format!(
            "length {} and height {h} differ in parity",
            f.len()
        )));
    }
    Ok(h)
}

/// Decides `0 <= F2(x, y) <= D` on the whole torus, where `F2` is the sum of
/// saw-tooth terms of all forms shifted by `D/2`. Passing certifies every
/// instance of height `D` without vanishing entries, whatever the sign
/// constraints.
pub fn verify_family_exact(f: &AffineList) -> Result<FamilyVerdict> {
    let forms = f.forms2()?;
    let h = sweep_height(f)?;
    let offset = (f.len() as i64 + h) / 2;
    let stats = arrangement::sweep(&forms, offset, 0, h)?;
    Ok(match stats.first_out {
        None => FamilyVerdict::VerifiedExact {
            height: h,
            min: stats.min,
            max: stats.max,
            points: stats.points,
        },
        Some((y, x, value)) => FamilyVerdict::Fails {
            x: x.to_rat(),
            y: y.to_rat(),
            value,
        },
    })
}

/// `F2` at one point, with the sweep's right-limit convention.
pub fn evaluate_at(f: &AffineList, x: &Rat, y: &Rat) -> Result<i64> {
    let forms = f.forms2()?;
    let h = sweep_height(f)?;
    let offset = (f.len() as i64 + h) / 2;
    let to_frac = |r: &Rat| Frac::from_rat(r).ok_or(Error::Overflow("evaluation point"));
    let v = arrangement::floor_sum_2d(&forms, to_frac(x)?, to_frac(y)?)?;
    i64::try_from(offset as i128 + v).map_err(|_| Error::Overflow("evaluation"))
}

/// Smallest `F2` over a product grid of points.
pub fn min_over_grid(f: &AffineList, xs: &[Rat], ys: &[Rat]) -> Result<i64> {
    let mut best = i64::MAX;
    for y in ys {
        for x in xs {
            best = best.min(evaluate_at(f, x, y)?);
        }
    }
    Ok(best)
}

/// Outcome for one parameter tuple of a sampled run.
#[derive(Clone, Debug)]
enum Sampled {
    Skipped,
    Passed,
    Failed(FamilyVerdict),
}

fn sample_one(f: &AffineList, h: i64, params: Vec<i64>, n_max: u64) -> Sampled {
    if !f.constraints.iter().all(|c| c.holds(&params)) || params_gcd(&params) != 1 {
        return Sampled::Skipped;
    }
    let Ok(list) = f.instantiate_unchecked(&params) else {
        return Sampled::Skipped;
    };
    if list.height() != h || list.sum() != 0 {
        return Sampled::Skipped;
    }
    let verdict = criteria::is_integral_ratio(&list);
    let oracle = criteria::factorial_oracle(&list, n_max).ok();
    let n = oracle.as_ref().and_then(|o| o.first_failure);
    match verdict {
        RatioVerdict::Integral { .. } if n.is_none() => Sampled::Passed,
        RatioVerdict::NotIntegral { witness_x, .. } => {
            Sampled::Failed(FamilyVerdict::FailsInstance {
                params,
                list,
                n,
                witness_x: Some(witness_x),
            })
        }
        _ => Sampled::Failed(FamilyVerdict::FailsInstance {
            params,
            list,
            n,
            witness_x: None,
        }),
    }
}

/// Runs the Landau test and the factorial oracle on every admissible
/// primitive tuple with entries in `[-bound, bound]`, keeping instances of
/// the family's height. Tuples are visited in lexicographic order and the
/// first failure in that order is reported.
pub fn verify_family_sampled(f: &AffineList, bound: i64, n_max: u64) -> Result<FamilyVerdict> {
    let h = f
        .nominal_height()
        .ok_or_else(|| Error::InvalidFamily("no admissible instance to fix the height".into()))?;
    let tuples = grid(f.d, bound);
    let results: Vec<Sampled> = tuples
        .into_par_iter()
        .map(|p| sample_one(f, h, p, n_max))
        .collect();
    let mut instances = 0;
    for r in results {
        match r {
            Sampled::Skipped => {}
            Sampled::Passed => instances += 1,
            Sampled::Failed(v) => return Ok(v),
        }
    }
    Ok(FamilyVerdict::VerifiedSampled { bound, instances })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormLimit {
    pub limit: Rat,
    pub params: Vec<i64>,
    pub instance: IntList,
    pub instance_norm: Rat,
}

/// Primitive direction of a coefficient vector (first nonzero positive)
/// and the signed multiple.
fn direction(e: &[i64]) -> (Vec<i64>, i64) {
    let g = e.iter().fold(0u64, |g, &c| g.gcd(&c.unsigned_abs())) as i64;
    let first = *e.iter().find(|&&c| c != 0).expect("nonzero form");
    let r = if first < 0 { -g } else { g };
    (e.iter().map(|&c| c / r).collect(), r)
}

const LIMIT_PRIMES: [i64; 2] = [10_007, 1_000_003];

/// Limit of the norm as the parameters grow coprimely: only pairs of forms
/// on a common direction keep a gcd proportional to the parameters, and
/// such a pair `r w, s w` contributes `gcd(r, s)^2 / (r s)`. Also reports
/// one large representative instance and its exact norm. With `direction`
/// given, that tuple is the representative and must be primitive.
pub fn family_norm_limit(f: &AffineList, direction_hint: Option<&[i64]>) -> Result<NormLimit> {
    if f.d != 2 {
        return Err(Error::DimensionUnsupported(f.d));
    }
    let mut by_dir: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    for e in &f.entries {
        let (w, r) = direction(e);
        by_dir.entry(w).or_default().push(r);
    }
    let mut limit = Rat::zero();
    for rs in by_dir.values() {
        for &r in rs {
            for &s in rs {
                let g = r.unsigned_abs().gcd(&s.unsigned_abs()) as i64;
                limit = limit + Rat::new(g * g, r * s);
            }
        }
    }
    let limit = limit / Rat::from_int(12);
    let params = match direction_hint {
        Some(p) => {
            if p.len() != 2 {
                return Err(Error::Precondition("direction needs two parameters".into()));
            }
            if params_gcd(p) != 1 {
                return Err(Error::NotPrimitive("direction"));
            }
            p.to_vec()
        }
        None => representative(f)?,
    };
    let instance = f.instantiate_unchecked(&params)?;
    let instance_norm = criteria::norm(&instance)?;
    Ok(NormLimit {
        limit,
        params,
        instance,
        instance_norm,
    })
}

fn representative(f: &AffineList) -> Result<Vec<i64>> {
    let [p, q] = LIMIT_PRIMES;
    let candidates = [
        [p, q],
        [q, p],
        [p, -q],
        [-p, q],
        [q, -p],
        [-q, p],
        [-p, -q],
        [-q, -p],
    ];
    let target = f.nominal_height();
    let good = |c: &[i64; 2]| {
        f.constraints.iter().all(|k| k.holds(c)) && f.raw_values(c).is_ok_and(|v| !v.contains(&0))
    };
    candidates
        .iter()
        .find(|c| {
            good(c)
                && f.instantiate_unchecked(&c[..])
                    .is_ok_and(|l| Some(l.height()) == target)
        })
        .or_else(|| candidates.iter().find(|c| good(c)))
        .map(|c| c.to_vec())
        .ok_or_else(|| Error::InvalidFamily("no large admissible instance".into()))
}
