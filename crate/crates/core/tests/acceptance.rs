//! Acceptance criteria. Each prints one PASS/FAIL line; a criterion also
//! fails when it runs over its time budget.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use fratio::catalog::{
    check_reducible_instances, entry_family, verify_construction, verify_decomposition_identity,
    Catalog, CatalogEntry, Payload, CERTIFY_BOUND, IDENTITY_GRID, SPLIT_SEARCH_GRID,
};
use fratio::constructor::{build_input, emit_family, proof_checks};
use fratio::criteria::{factorial_oracle, is_integral_ratio, is_monotone, norm, RatioVerdict};
use fratio::family::{
    evaluate_at, family_norm_limit, min_over_grid, verify_family_exact, verify_family_sampled,
    AffineList, FamilyVerdict,
};
use fratio::reducibility::{find_certified_instance, matches_two_family_shape, Conclusion};
use fratio::small_norm::{classify, enumerate_small_norm};
use fratio::step::norm_by_integral;
use fratio::{list, IntList, Rat};

const SECOND: Duration = Duration::from_secs(1);
const MINUTE: Duration = Duration::from_secs(60);

/// Largest gap allowed between the limit norm and the norm of the large
/// representative instance in the negative control.
fn norm_limit_tolerance() -> Rat {
    Rat::new(1, 1000)
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn scope<'a>(c: &'a Catalog, s: &'a str) -> Vec<&'a CatalogEntry> {
    c.in_scope(s).collect()
}

fn chebyshev() -> Outcome {
    let a = list![30, 1, -15, -10, -6];
    let v = is_integral_ratio(&a);
    ensure(
        v == RatioVerdict::Integral {
            height: 1,
            value_range: vec![0, 1],
        },
        format!("verdict {v:?}"),
    )?;
    let o = factorial_oracle(&a, 100).map_err(|e| e.to_string())?;
    ensure(o.integral && o.checked == 100, format!("oracle {o:?}"))?;
    Ok("Integral, height 1, values {0, 1}; oracle agrees for n <= 100".into())
}

fn norm_catalog(c: &Catalog) -> Outcome {
    let mut seen = BTreeSet::new();
    let mut printed = 0;
    for e in scope(c, "small_norm") {
        let Payload::Norm { list, norm: want } = &e.payload else {
            return Err(format!("{} is not a norm entry", e.id));
        };
        let by_gcd = norm(list).map_err(|x| x.to_string())?;
        let by_integral = norm_by_integral(list).map_err(|x| x.to_string())?;
        ensure(
            &by_gcd == want && &by_integral == want,
            format!("{}: {by_gcd} and {by_integral}, expected {want}", e.id),
        )?;
        seen.insert(want.to_string());
        if !matches!(&e.correction, Some(k) if k.printed.is_none()) {
            printed += 1;
        }
    }
    ensure(printed == 24, format!("{printed} printed lists"))?;
    let want: BTreeSet<String> = ["1/12", "1/9", "1/8", "17/108", "1/6"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    ensure(seen == want, format!("norm values {seen:?}"))?;
    Ok(format!(
        "{printed} printed lists plus 2 additions, norms {seen:?}"
    ))
}

fn enumeration(c: &Catalog) -> Outcome {
    let listed = c.small_norm_lists();
    let r = enumerate_small_norm(5, 18, &Rat::new(31, 180), &listed).map_err(|e| e.to_string())?;
    let exceptions = r.exceptions();
    ensure(
        exceptions.is_empty(),
        format!(
            "exceptions {:?}",
            exceptions
                .iter()
                .map(|h| h.list.to_text())
                .collect::<Vec<_>>()
        ),
    )?;
    // against the list as printed, exactly the two additions and the
    // corrected typo are missing
    let printed = c.printed_small_norm_lists().map_err(|e| e.to_string())?;
    let missing: BTreeSet<String> = r
        .hits
        .iter()
        .filter(|h| classify(&h.list, &printed).is_none())
        .map(|h| h.list.to_text())
        .collect();
    let want: BTreeSet<String> = [list![1, 12, -3], list![1, 12, -4], list![2, 3, -4, -6, 12]]
        .iter()
        .map(IntList::to_text)
        .collect();
    ensure(missing == want, format!("missing from print {missing:?}"))?;
    Ok(format!(
        "{} lists examined, {} below 31/180, 0 exceptions",
        r.examined,
        r.hits.len()
    ))
}

fn table_rows(c: &Catalog) -> Outcome {
    let rows = scope(c, "construction");
    ensure(rows.len() == 43, format!("{} rows", rows.len()))?;
    let mut differ = Vec::new();
    for e in &rows {
        let r = verify_construction(e).map_err(|x| format!("{}: {x}", e.id))?;
        ensure(r.b_monotone, format!("{}: b not monotone", e.id))?;
        ensure(
            r.base_matches_expected,
            format!("{}: base {}", e.id, r.base),
        )?;
        ensure(
            r.base_integral_height_one,
            format!("{}: base not Integral(1)", e.id),
        )?;
        ensure(r.family.passed(), format!("{}: {:?}", e.id, r.family))?;
        if !r.base_matches_printed {
            ensure(
                e.correction.is_some(),
                format!("{}: differs from print unflagged", e.id),
            )?;
            differ.push(e.id.clone());
        }
    }
    ensure(
        differ == ["construction.07", "construction.35"],
        format!("rows differing from print {differ:?}"),
    )?;
    let row29 = c.get("construction.29").ok_or("row 29 missing")?;
    ensure(row29.correction.is_some(), "row 29 formatting not flagged")?;
    Ok(format!(
        "43 rows; base differs from print in {differ:?}; row 29 formatting flagged"
    ))
}

fn families(c: &Catalog) -> Outcome {
    let reducible = scope(c, "reducible");
    ensure(
        reducible.len() == 16,
        format!("{} identities", reducible.len()),
    )?;
    let mut tuples = 0;
    for e in &reducible {
        let Payload::Identity { family, parts } = &e.payload else {
            return Err(format!("{} is not an identity", e.id));
        };
        let r = verify_decomposition_identity(family, parts, IDENTITY_GRID)
            .map_err(|x| format!("{}: {x}", e.id))?;
        ensure(r.holds(), format!("{}: {r:?}", e.id))?;
        tuples += r.instances;
    }
    let irreducible = scope(c, "irreducible");
    ensure(
        irreducible.len() == 12,
        format!("{} families", irreducible.len()),
    )?;
    for e in &irreducible {
        let f = entry_family(e).map_err(|x| x.to_string())?;
        let v = verify_family_exact(&f).map_err(|x| format!("{}: {x}", e.id))?;
        ensure(
            matches!(v, FamilyVerdict::VerifiedExact { height: 2, .. }),
            format!("{}: {v:?}", e.id),
        )?;
    }
    // the nine points with x, y in {0, 1/4, 3/4} reach the minimum
    let last = c.get("irreducible.12").ok_or("irreducible.12 missing")?;
    let f = entry_family(last).map_err(|x| x.to_string())?;
    let FamilyVerdict::VerifiedExact { min, .. } =
        verify_family_exact(&f).map_err(|x| x.to_string())?
    else {
        return Err("irreducible.12 does not verify".into());
    };
    let pts = [Rat::zero(), Rat::new(1, 4), Rat::new(3, 4)];
    let nine = min_over_grid(&f, &pts, &pts).map_err(|x| x.to_string())?;
    ensure(
        nine == min && min == 0,
        format!("nine-point minimum {nine}, sweep minimum {min}"),
    )?;
    Ok(format!(
        "16 identities over {tuples} coprime tuples, 12 families exact, nine-point minimum {nine} = sweep minimum"
    ))
}

fn negative_control() -> Outcome {
    let f = AffineList::parse_shorthand("3a,18a,-a,-9a,-b,-11a+b").map_err(|e| e.to_string())?;
    let v = verify_family_exact(&f).map_err(|e| e.to_string())?;
    let FamilyVerdict::Fails { x, y, value } = &v else {
        return Err(format!("exact sweep passed: {v:?}"));
    };
    let at = evaluate_at(&f, x, y).map_err(|e| e.to_string())?;
    ensure(
        at == *value && !(0..=1).contains(&at),
        format!("witness re-evaluates to {at}"),
    )?;
    let s = verify_family_sampled(&f, 30, 0).map_err(|e| e.to_string())?;
    let FamilyVerdict::FailsInstance { params, list, .. } = &s else {
        return Err(format!("no failing instance: {s:?}"));
    };
    ensure(
        list.is_primitive() && params.iter().all(|p| p.abs() <= 30),
        format!("instance {params:?} {list}"),
    )?;
    ensure(
        !is_integral_ratio(list).is_integral(),
        format!("{list} passes the Landau test"),
    )?;
    let n = family_norm_limit(&f, None).map_err(|e| e.to_string())?;
    ensure(n.limit == Rat::new(37, 108), format!("limit {}", n.limit))?;
    let gap = (n.instance_norm.clone() - n.limit.clone()).abs();
    ensure(
        gap < norm_limit_tolerance(),
        format!("instance norm {} is {gap} from the limit", n.instance_norm),
    )?;
    Ok(format!(
        "fails at (x, y) = ({x}, {y}) with value {value}; instance {params:?} = {list}; limit 37/108, \
         instance {:?} within {gap}",
        n.params
    ))
}

fn irreducibility(c: &Catalog) -> Outcome {
    let mut certified = 0;
    let mut targets: Vec<(String, AffineList)> = Vec::new();
    for e in scope(c, "irreducible") {
        targets.push((e.id.clone(), entry_family(e).map_err(|x| x.to_string())?));
    }
    for e in scope(c, "construction") {
        let Payload::Construction { a, b, .. } = &e.payload else {
            continue;
        };
        let t = build_input(a, b).map_err(|x| format!("{}: {x}", e.id))?;
        targets.push((e.id.clone(), emit_family(&t)));
    }
    for id in ["external.wider", "external.askey"] {
        let e = c.get(id).ok_or(format!("{id} missing"))?;
        targets.push((id.to_string(), entry_family(e).map_err(|x| x.to_string())?));
    }
    let mut askey_note = String::new();
    for (id, f) in &targets {
        let hit = find_certified_instance(f, CERTIFY_BOUND)
            .map_err(|x| format!("{id}: {x}"))?
            .ok_or(format!(
                "{id}: no certified instance with parameters <= {CERTIFY_BOUND}"
            ))?;
        ensure(
            hit.certificate.conclusion == Conclusion::Irreducible,
            format!("{id}: {:?}", hit.certificate),
        )?;
        if id == "external.askey" {
            let largest = *hit.list.entries().iter().max().unwrap_or(&0);
            ensure(
                largest % 2 == 1 && !matches_two_family_shape(&hit.list),
                format!("Askey instance {} has largest entry {largest}", hit.list),
            )?;
            askey_note = format!("Askey {:?} largest entry {largest} odd", hit.params);
        }
        certified += 1;
    }
    let mut split = 0;
    for e in scope(c, "reducible") {
        let Payload::Identity { family, parts } = &e.payload else {
            continue;
        };
        let r = check_reducible_instances(family, parts, IDENTITY_GRID, SPLIT_SEARCH_GRID)
            .map_err(|x| format!("{}: {x}", e.id))?;
        ensure(
            r.certified.is_empty() && r.unsplit.is_empty() && r.searched == r.height_two,
            format!("{}: {r:?}", e.id),
        )?;
        split += r.height_two;
    }
    Ok(format!(
        "{certified} families certified ({askey_note}); search splits all {split} reducible instances, none certified"
    ))
}

fn proof_properties(c: &Catalog) -> Outcome {
    let mut n = 0;
    for e in scope(c, "construction") {
        let Payload::Construction { a, b, .. } = &e.payload else {
            continue;
        };
        let t = build_input(a, b).map_err(|x| format!("{}: {x}", e.id))?;
        let p = proof_checks(&t).map_err(|x| format!("{}: {x}", e.id))?;
        ensure(p.all_hold(), format!("{}: {p:?}", e.id))?;
        ensure(
            is_monotone(b).unwrap_or(false),
            format!("{}: b not monotone", e.id),
        )?;
        n += 1;
    }
    ensure(n == 43, format!("{n} rows"))?;
    Ok("base, shifted and plane bounds hold on all 43 rows".into())
}

fn gessel(c: &Catalog) -> Outcome {
    let e = c.get("external.gessel").ok_or("external.gessel missing")?;
    let f = entry_family(e).map_err(|x| x.to_string())?;
    ensure(
        f.dim() == 4 && f.claimed_height() == Some(3),
        "not a 4-parameter height-3 family",
    )?;
    let v = verify_family_sampled(&f, 6, 30).map_err(|x| x.to_string())?;
    match v {
        FamilyVerdict::VerifiedSampled { instances, .. } if instances > 0 => Ok(format!(
            "{instances} coprime tuples with parameters <= 6, oracle to n = 30"
        )),
        other => Err(format!("{other:?}")),
    }
}

#[test]
fn acceptance_criteria() {
    let c = Catalog::embedded();
    type Criterion<'a> = (&'a str, Duration, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("chebyshev", SECOND, Box::new(chebyshev)),
        ("norm catalog", SECOND, Box::new(|| norm_catalog(&c))),
        (
            "small-norm enumeration",
            10 * MINUTE,
            Box::new(|| enumeration(&c)),
        ),
        ("table rows", 5 * MINUTE, Box::new(|| table_rows(&c))),
        (
            "identities and families",
            5 * MINUTE,
            Box::new(|| families(&c)),
        ),
        ("negative control", MINUTE, Box::new(negative_control)),
        (
            "irreducibility",
            10 * MINUTE,
            Box::new(|| irreducibility(&c)),
        ),
        (
            "proof properties",
            5 * MINUTE,
            Box::new(|| proof_properties(&c)),
        ),
        ("gessel sampling", 5 * MINUTE, Box::new(|| gessel(&c))),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("over budget: {d}")),
            Err(d) => (false, d),
        };
        // straight to the process stdout so the lines survive test capture
        let _ = writeln!(
            std::io::stdout().lock(),
            "criterion {}: {} {name} ({:.2?}, budget {:?}) {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took,
            budget
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
