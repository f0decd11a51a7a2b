//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! nonzero when a criterion fails for a reason not listed in `KNOWN`.

use std::io::Write;
use std::process::{Command, Stdio};

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use serrekit::ci_lattice::{
    build_lattice, degree_tuples, gram_filtration, residual_sublattice, split_family, verify_identities,
};
use serrekit::dimension_calculus::{
    fdim_algebra, hochschild_level, obstruction_from_dims, rederive_serre_dims, refined_ax_dims, serre_dims,
    serre_invariance_obstruction, spherical_twist_dims, Extended, FDim, FDimOp,
};
use serrekit::functor_words::{
    equal_words, evaluate, expand_twist_factorization, normalize, parse_word_in, rules, serre_power_words,
    standard_models, Cat, Equality, Side,
};
use serrekit::lattice::Comparison;
use serrekit::quadric_spinor::{restricted_spinor_pair_test, verify_quadric_divisor_identity, verify_refined_identity};
use serrekit::{CompleteIntersection, Int, Rational};

/// Criteria expected to fail, with the reason printed next to them.
const KNOWN: &[(u32, &str)] =
    &[(4, "with parities n-3 the spinor-pair test fails for every even d; it passes for all d with parities d-1")];

struct Verdict {
    passed: bool,
    detail: String,
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(Int::from(a), Int::from(b))
}

/// Fano complete intersections in P^n with all degrees at least 2.
fn fano_family(max_n: usize, max_k: usize) -> Vec<CompleteIntersection> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for k in 1..=max_k {
            for d in degree_tuples(n, k) {
                let x = CompleteIntersection::projective(n, &d).unwrap();
                if x.index() >= 1 {
                    out.push(x);
                }
            }
        }
    }
    out
}

fn serre_dimension_table() -> Verdict {
    let cubic = serre_dims(&CompleteIntersection::projective(5, &[3]).unwrap()).unwrap();
    let x23 = serre_dims(&CompleteIntersection::projective(5, &[2, 3]).unwrap()).unwrap();
    if cubic != (q(2, 1), q(2, 1)) || x23 != (q(7, 3), q(2, 1)) {
        return verdict(false, format!("examples gave {cubic:?} and {x23:?}"));
    }
    let family = fano_family(12, 4);
    for x in &family {
        let (dim, ind) = (x.dim(), x.index());
        let (dmax, dmin) = (x.degrees()[0], *x.degrees().last().unwrap());
        let expected = (q(dim * dmax - 2 * ind, dmax), q(dim * dmin - 2 * ind, dmin));
        let got = serre_dims(x).unwrap();
        if got != expected {
            return verdict(false, format!("{x}: {got:?} vs {expected:?}"));
        }
        if (got.0 == got.1) != (dmax == dmin) {
            return verdict(false, format!("{x}: equal dimensions do not track equal degrees"));
        }
        if q(hochschild_level(x), 1) > got.0 {
            return verdict(false, format!("{x}: hl exceeds usdim"));
        }
    }
    verdict(true, format!("(2,2), (7/3,2) and {} Fano complete intersections", family.len()))
}

fn hypersurface_rotation_order() -> Verdict {
    let mut count = 0;
    for n in 2..=8usize {
        for d in 2..=n as i64 {
            let x = CompleteIntersection::projective(n, &[d]).unwrap();
            let l = build_lattice(&x).unwrap();
            let res = l.residual().unwrap();
            let rot = res.restrict(&l.rotation_operator().unwrap()).unwrap();
            let p = rot.pow(d * (n as i64 + 1 - d)).unwrap();
            if !p.matrix.is_identity() {
                return verdict(false, format!("{x}: rotation power is not the identity"));
            }
            count += 1;
        }
    }
    verdict(true, format!("{count} hypersurfaces"))
}

fn main_identity_sweep() -> Verdict {
    let family = split_family(9, 3);
    for x in &family {
        let rep = verify_identities(x);
        if let Some(c) = rep.first_failure() {
            return verdict(false, format!("{x}: {} ({})", c.name, c.detail));
        }
        let routes = rep.checks.iter().filter(|c| c.name.contains("Serre by mutation = Serre by rotation")).count();
        if routes == 0 {
            return verdict(false, format!("{x}: no route comparison ran"));
        }
    }
    verdict(true, format!("{} split presentations", family.len()))
}

fn quadric_divisors() -> Verdict {
    let (mut total, mut identity_ok, mut literal_ok, mut alternate_ok) = (0, 0, 0, 0);
    for n in [5i64, 7, 9] {
        for d in 1..=n - 2 {
            total += 1;
            if verify_quadric_divisor_identity(n, d).is_ok_and(|r| r.passed()) {
                identity_ok += 1;
            }
            if restricted_spinor_pair_test(n, d, n - 3).unwrap() {
                literal_ok += 1;
            }
            if restricted_spinor_pair_test(n, d, d - 1).unwrap() {
                alternate_ok += 1;
            }
        }
    }
    let detail = format!(
        "identity {identity_ok}/{total}; pair test parities n-3 {literal_ok}/{total}; parities d-1 {alternate_ok}/{total}"
    );
    verdict(identity_ok == total && literal_ok == total, detail)
}

fn refined_identity() -> Verdict {
    for n in [5, 7] {
        let rep = verify_refined_identity(n).unwrap();
        if let Some(c) = rep.first_failure() {
            return verdict(false, format!("n={n}: {}", c.name));
        }
    }
    let dims = refined_ax_dims(5).unwrap();
    verdict(dims == (q(3, 1), q(7, 3)), format!("n = 5, 7 identities; dims {} {}", dims.0, dims.1))
}

fn rank_and_filtration() -> Verdict {
    let mut count = 0;
    for n in 1..=9usize {
        for k in 1..=3 {
            for degrees in degree_tuples(n, k) {
                let x = CompleteIntersection::projective(n, &degrees).unwrap();
                let g = gram_filtration(&x).unwrap();
                let dim = x.dim() as usize;
                let deg = Int::from(x.degree());
                for p in 0..=dim {
                    for r in 0..=dim {
                        let v = &g[(p, r)];
                        let ok = match (p + r).cmp(&dim) {
                            std::cmp::Ordering::Greater => *v == Int::from(0),
                            std::cmp::Ordering::Equal => *v == deg || *v == -deg.clone(),
                            std::cmp::Ordering::Less => true,
                        };
                        if !ok {
                            return verdict(false, format!("{x}: entry ({p},{r}) = {v}"));
                        }
                    }
                }
                let rank = residual_sublattice(&build_lattice(&x).unwrap()).unwrap().rank() as i64;
                let expected: i64 = degrees.iter().map(|d| d - 1).sum();
                if rank != expected || rank < 1 {
                    return verdict(false, format!("{x}: residual rank {rank}, expected {expected}"));
                }
                count += 1;
            }
        }
    }
    verdict(true, format!("{count} complete intersections"))
}

fn shift_ext(e: &Extended, n: i64) -> Extended {
    match e {
        Extended::Finite(r) => Extended::Finite(r + q(n, 1)),
        inf => inf.clone(),
    }
}

fn scale_ext(e: &Extended, p: i64) -> Extended {
    match e {
        Extended::Finite(r) => Extended::Finite(r * q(p, 1)),
        inf => inf.clone(),
    }
}

fn neg_ext(e: &Extended) -> Extended {
    match e {
        Extended::NegInf => Extended::PosInf,
        Extended::PosInf => Extended::NegInf,
        Extended::Finite(r) => Extended::Finite(-r.clone()),
    }
}

fn ext_strategy() -> impl Strategy<Value = Extended> {
    prop_oneof![
        8 => (-50i64..50, 1i64..12).prop_map(|(a, b)| Extended::ratio(a, b)),
        1 => Just(Extended::NegInf),
        1 => Just(Extended::PosInf),
    ]
}

fn ledger_closure() -> Verdict {
    // the default split is the smallest degree, which the ledger needs
    for x in fano_family(12, 4) {
        let r = rederive_serre_dims(&x).unwrap();
        if !r.consistent() {
            return verdict(false, format!("{x}: ledger does not reproduce the Serre dimensions"));
        }
    }
    let mut runner = TestRunner::deterministic();
    let strategy = (ext_strategy(), ext_strategy(), -20i64..20, 1i64..9);
    for _ in 0..200 {
        let (a, b, n, p) = strategy.new_tree(&mut runner).unwrap().current();
        let (upper, lower) = if a >= b { (a, b) } else { (b, a) };
        let f = FDim::new(upper.clone(), lower.clone()).unwrap();
        let shifted = fdim_algebra(&f, FDimOp::Shift(n)).unwrap();
        let powered = fdim_algebra(&f, FDimOp::Power(p)).unwrap();
        let inverted = fdim_algebra(&f, FDimOp::Invert).unwrap();
        let ok = f.lower() <= f.upper()
            && (shifted.upper(), shifted.lower()) == (&shift_ext(&upper, n), &shift_ext(&lower, n))
            && (powered.upper(), powered.lower()) == (&scale_ext(&upper, p), &scale_ext(&lower, p))
            && (inverted.upper(), inverted.lower()) == (&neg_ext(&lower), &neg_ext(&upper))
            && [&shifted, &powered, &inverted].iter().all(|g| g.lower() <= g.upper());
        if !ok {
            return verdict(false, format!("F-dimension rules fail on {f}"));
        }
    }
    for d in 1..=10 {
        let t = spherical_twist_dims(d).unwrap();
        if (t.upper(), t.lower()) != (&Extended::int(0), &Extended::int(1 - d)) {
            return verdict(false, format!("{d}-spherical twist gave {t}"));
        }
    }
    verdict(true, "ledger closure, 200 random F-dimensions, spherical twists d <= 10")
}

fn obstruction() -> Verdict {
    let family = fano_family(12, 4);
    for x in &family {
        let unequal = x.degrees().iter().any(|&d| d != x.degrees()[0]);
        if serre_invariance_obstruction(x).unwrap() != unequal {
            return verdict(false, format!("{x}: obstruction disagrees with the degrees"));
        }
    }
    let (u, l) = refined_ax_dims(5).unwrap();
    verdict(
        obstruction_from_dims(&u, &l),
        format!("{} Fano complete intersections and the refined n = 5 case", family.len()),
    )
}

fn rewriting_soundness() -> Verdict {
    let models = standard_models();
    let mut instances = 0;
    for model in &models {
        let (m, d) = model.params();
        for (lhs, rhs, cat) in rule_instances(m, d) {
            let a = evaluate(&parse_word_in(&lhs, Some(cat)).unwrap(), model).unwrap();
            let b = evaluate(&parse_word_in(&rhs, Some(cat)).unwrap(), model).unwrap();
            if a.compare(&b) != Comparison::Equal {
                return verdict(false, format!("{}: {lhs} = {rhs} fails", model.name));
            }
            instances += 1;
        }
        if d == m {
            let t = parse_word_in("T_D", Some(Cat::D)).unwrap();
            let e = expand_twist_factorization(&t, m, d).unwrap();
            if evaluate(&t, model).unwrap().compare(&evaluate(&e, model).unwrap()) != Comparison::Equal {
                return verdict(false, format!("{}: twist factorization fails", model.name));
            }
            instances += 1;
        }
    }
    if rules().len() != 10 {
        return verdict(false, "rule table does not have ten rules");
    }

    for text in ["T_C ∘ T_Cinv ∘ a_C ∘ S_C", "S_D ∘ Psi ∘ S_C^-1 ∘ T_C^2", "t_R ∘ S_R ∘ O_Bprime ∘ T_RD"]
    {
        let w = parse_word_in(text, None).unwrap();
        for params in [None, Some((3, 2))] {
            let once = normalize(&w, params).unwrap();
            if normalize(&once, params).unwrap() != once {
                return verdict(false, format!("normalize is not idempotent on {text}"));
            }
        }
    }

    let mut agreeing = 0;
    for model in &models {
        let (m, d) = model.params();
        let ok = [Side::Source, Side::Target].iter().all(|&side| {
            let (a, b) = serre_power_words(m, d, side).unwrap();
            matches!(equal_words(&a, &b, std::slice::from_ref(model)), Ok(Equality::EqualInAllModels(_)))
        });
        if !ok {
            return verdict(false, format!("{}: Serre power identity not equal", model.name));
        }
        agreeing += 1;
    }

    let false_identities = [
        ("T_C", "id", Cat::C),
        ("Psi ∘ T_C ∘ [1]", "T_D ∘ Psi", Cat::C),
        ("S_R", "s_R", Cat::RD),
        ("L_B", "R_B", Cat::C),
        ("S_C", "a_C^-1", Cat::C),
        ("O_B", "O_Bprime", Cat::RD),
        ("T_D", "a_D^-1", Cat::D),
    ];
    let mut caught = 0;
    for (a, b, cat) in false_identities {
        let a = parse_word_in(a, Some(cat)).unwrap();
        let b = parse_word_in(b, Some(cat)).unwrap();
        if matches!(equal_words(&a, &b, &models), Ok(Equality::DistinguishedBy { .. })) {
            caught += 1;
        } else {
            return verdict(false, format!("{a} = {b} was not refuted"));
        }
    }
    verdict(
        agreeing >= 5 && caught >= 5,
        format!(
            "{instances} rule instances; Serre power identity in {agreeing} models; {caught} false identities refuted"
        ),
    )
}

fn rule_instances(m: i64, d: i64) -> Vec<(String, String, Cat)> {
    let s = |a: &str, b: &str, c| (a.to_string(), b.to_string(), c);
    let mut out = vec![
        s("T_Cinv", "T_C^-1", Cat::C),
        s("T_Dinv", "T_D^-1", Cat::D),
        s("O_Bprime", "O_B^-1", Cat::RD),
        s("Psi ∘ T_C ∘ [1]", "T_D ∘ [-1] ∘ Psi", Cat::C),
        s("S_D ∘ Psi ∘ S_C^-1", "T_D^-1 ∘ Psi ∘ [1]", Cat::C),
        s("PsiR", "S_C ∘ PsiL ∘ S_D^-1", Cat::D),
        s("S_C ∘ T_C", "T_C ∘ S_C", Cat::C),
        s("S_D ∘ a_D", "a_D ∘ S_D", Cat::D),
        s("T_C ∘ a_C", "a_C ∘ T_C", Cat::C),
        s("T_RC", &format!("O_B^{{{}}} ∘ t_R", -d), Cat::RC),
        s("T_RD", &format!("O_B^{{{}}} ∘ t_R", -d), Cat::RD),
        s("S_R", &format!("O_B^{{{}}} ∘ s_R", -m), Cat::RC),
        s("S_R", &format!("O_B^{{{}}} ∘ s_R", d - m), Cat::RD),
    ];
    for cat in [Cat::RC, Cat::RD] {
        out.push(s("s_R ∘ t_R", "t_R ∘ s_R", cat));
        out.push(s("O_B ∘ s_R", "s_R ∘ O_B", cat));
    }
    out
}

fn cli(args: &[&str], stdin: Option<&str>) -> (i32, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_serrekit"));
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped()).stdin(Stdio::piped());
    let mut child = cmd.spawn().expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn interface() -> Verdict {
    let report = ["report", "--pn", "5", "--degrees", "2,3", "--json"];
    let (c1, a) = cli(&report, None);
    let (c2, b) = cli(&report, None);
    if c1 != 0 || c2 != 0 || a != b {
        return verdict(false, "report is not deterministic");
    }
    let json: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let entry = &json["entries"][0];
    if json["schema_version"] != 1
        || entry["usdim"] != "7/3"
        || entry["lsdim"] != "2"
        || entry["serre_invariant_possible"] != false
    {
        return verdict(false, "report values are off");
    }
    let batch = "{\"n\": 5, \"degrees\": [3]}\n{\"weights\": [1, 1, 2], \"degrees\": [2]}\n";
    let (cb1, ba) = cli(&["report", "--batch", "-", "--json"], Some(batch));
    let (cb2, bb) = cli(&["report", "--batch", "-", "--json"], Some(batch));
    let cases: &[(&[&str], Option<&str>, i32)] = &[
        (&["verify", "--refined", "--max-n", "7"], None, 0),
        (&["words", "S_D ∘ Psi ∘ S_C^-1", "T_D^-1 ∘ Psi ∘ [1]"], None, 0),
        (&["words", "T_C", "id"], None, 1),
        (&["words", "Psi ∘ T_C ∘ [1]", "T_D ∘ Psi", "--model", "ci:P5:3"], None, 1),
        (&["words", "T_C ∘ "], None, 2),
        (&["words", "T_C", "--model", "ci:P5:9"], None, 2),
        (&["report", "--pn", "3", "--degrees", "5"], None, 2),
        (&["report", "--pn", "5", "--degrees", "x"], None, 2),
        (&["report", "--batch", "-"], Some("{\"n\": 5}\n"), 2),
        (&["frobnicate"], None, 2),
    ];
    for (args, stdin, expected) in cases {
        let (code, _) = cli(args, *stdin);
        if code != *expected {
            return verdict(false, format!("`{}` exited {code}, expected {expected}", args.join(" ")));
        }
    }
    verdict(cb1 == 0 && cb2 == 0 && ba == bb, format!("byte-identical reports; {} exit-code cases", cases.len() + 2))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "Serre dimension table", serre_dimension_table),
        (2, "hypersurface rotation order", hypersurface_rotation_order),
        (3, "Serre functor identity for split presentations", main_identity_sweep),
        (4, "quadric divisor identity and spinor pair", quadric_divisors),
        (5, "refined (2, n-2) identity", refined_identity),
        (6, "residual rank and filtration pairing", rank_and_filtration),
        (7, "dimension ledger closure", ledger_closure),
        (8, "Serre-invariance obstruction", obstruction),
        (9, "rewriting soundness", rewriting_soundness),
        (10, "determinism and exit codes", interface),
    ];
    let mut unexpected = 0;
    for (id, title, run) in criteria {
        let v = run();
        let known = KNOWN.iter().find(|(k, _)| *k == id).map(|(_, why)| *why);
        let tag = if v.passed { "PASS" } else { "FAIL" };
        let note = match (v.passed, known) {
            (false, Some(why)) => format!(" [known: {why}]"),
            (true, Some(_)) => " [listed as known failure but passed]".into(),
            _ => String::new(),
        };
        println!("{tag} {id:>2} {title}: {}{note}", v.detail);
        if !v.passed && known.is_none() {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
