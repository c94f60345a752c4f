//! One line per acceptance criterion. Every count is compared exactly; the
//! only tolerances are the time budgets below and the angle tolerance of the
//! PL coordinates, which is not exercised here.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;

use treecell::differential::verify_d_squared;
use treecell::enumerate::enumerate_family;
use treecell::hochschild::{
    brace, check_dg_action, check_gerstenhaber_homology, check_stasheff, AInfAlgebra, Cochain,
};
use treecell::models::{model_homology, retract_chain, Refinement};
use treecell::operad::{check_operad_axioms, check_pi_morphism, pi_inf_chain};
use treecell::polytope::{
    assoc_complex, blowup_stages, boundary_sum_check, bracketing_f_vector, cyclo_complex,
    incidence_check, Model,
};
use treecell::{ChainElement, Family};

const D2_BUDGET: Duration = Duration::from_secs(120);
const FVEC_BUDGET: Duration = Duration::from_secs(60);
const INCIDENCE_BUDGET: Duration = Duration::from_secs(300);
const HOMOLOGY_BUDGET: Duration = Duration::from_secs(300);
const OPERAD_SAMPLES: usize = 200;
const SEED: u64 = 20240611;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(start: Instant, budget: Duration) -> (bool, String) {
    let t = start.elapsed();
    (
        t <= budget,
        format!("{:.2}s of {}s", t.as_secs_f64(), budget.as_secs()),
    )
}

fn d_squared() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut trees = 0;
    for (family, top) in [(Family::Bipart, 4), (Family::Stable, 4), (Family::Ht, 3)] {
        for n in 1..=top {
            let r = verify_d_squared(family, n).unwrap();
            trees += r.trees_checked;
            if !r.passed() {
                bad.push(format!("{}({n})", family.name()));
            }
        }
    }
    let (fast, time) = within(start, D2_BUDGET);
    outcome(
        bad.is_empty() && fast,
        format!("{trees} trees, failing {bad:?}, {time}"),
    )
}

fn f_vectors() -> Outcome {
    let start = Instant::now();
    let expected: [(&str, usize, Vec<usize>); 5] = [
        ("K", 4, vec![5, 5, 1]),
        ("K", 5, vec![14, 21, 9, 1]),
        ("W", 2, vec![2, 1]),
        ("W", 3, vec![6, 6, 1]),
        ("W", 4, vec![20, 30, 12, 1]),
    ];
    let mut bad = Vec::new();
    for (p, n, want) in &expected {
        let cyclic = *p == "W";
        let c = if cyclic {
            cyclo_complex(*n, Model::Coarse)
        } else {
            assoc_complex(*n, Model::Coarse)
        }
        .unwrap();
        let got = c.f_vector();
        if &got != want || bracketing_f_vector(*n, cyclic) != *want || c.euler_characteristic() != 1
        {
            bad.push(format!("{p}{n} = {got:?}"));
        }
    }
    let (fast, time) = within(start, FVEC_BUDGET);
    outcome(
        bad.is_empty() && fast,
        format!("5 polytopes, failing {bad:?}, {time}"),
    )
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn cubical_counts() -> Outcome {
    let catalan = binomial(6, 3) / 4;
    let k4 = assoc_complex(4, Model::Cubical).unwrap();
    let squares = *k4.f_vector().last().unwrap();
    let stages = |n: usize| {
        blowup_stages(n)
            .unwrap()
            .iter()
            .map(|s| (s.shape.to_string(), s.count))
            .collect::<Vec<_>>()
    };
    let w3 = stages(3);
    let w4 = stages(4);
    let ok = squares == catalan
        && w3 == vec![("Δ²".to_string(), 1), ("Δ¹×I".to_string(), 3)]
        && w4
            == vec![
                ("Δ³".to_string(), 1),
                ("Δ²×I".to_string(), 4),
                ("I³".to_string(), 10),
            ];
    outcome(
        ok,
        format!("K4 squares {squares} (Catalan {catalan}), W3 {w3:?}, W4 {w4:?}"),
    )
}

fn incidence() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 2..=5 {
        let r = incidence_check(&cyclo_complex(n, Model::Cubical).unwrap());
        ok &= r.passed();
        parts.push(format!("n={n} top {} types {:?}", r.top_cells, r.codim_one));
    }
    let (fast, time) = within(start, INCIDENCE_BUDGET);
    outcome(ok && fast, format!("{}, {time}", parts.join("; ")))
}

fn boundary_sum() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 2..=4 {
        let r = boundary_sum_check(&cyclo_complex(n, Model::Cubical).unwrap()).unwrap();
        ok &= r.passed() && r.surviving.keys().all(|k| matches!(k, 'a' | 'f'));
        parts.push(format!(
            "n={n} survivors {:?} facets {}",
            r.surviving, r.facets
        ));
    }
    outcome(ok, parts.join("; "))
}

fn operad_axioms() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for family in [Family::Bipart, Family::Stable, Family::Ht] {
        let r = check_operad_axioms(family, 3, OPERAD_SAMPLES, SEED).unwrap();
        ok &= r.passed();
        parts.push(format!("{} {} checks", family.name(), r.checks));
    }
    outcome(
        ok,
        format!(
            "{} ({OPERAD_SAMPLES} sampled triples each)",
            parts.join(", ")
        ),
    )
}

fn projection() -> Outcome {
    let r = check_pi_morphism(4, OPERAD_SAMPLES, SEED).unwrap();
    outcome(
        r.passed(),
        format!(
            "chain map {}, section {}, composition {}",
            r.chain_map_checks, r.section_checks, r.morphism_checks
        ),
    )
}

fn refinement() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let r = Refinement::new(n).unwrap().check().unwrap();
        ok &= r.passed() && r.fibre_total == r.fine_cells;
        parts.push(format!("n={n} fibres {}/{}", r.fibre_total, r.fine_cells));
        for t in enumerate_family(Family::Stable, n).unwrap() {
            let x = ChainElement::from_tree(Family::Stable, t);
            ok &= retract_chain(&x).unwrap() == pi_inf_chain(&x);
        }
    }
    outcome(
        ok,
        format!(
            "{}, retraction equals the projection on every stable tree",
            parts.join("; ")
        ),
    )
}

/// Coefficients of `prod_{k<n} (1 + k t)`.
fn configuration_poincare(n: usize) -> Vec<usize> {
    let mut p = vec![1];
    for k in 1..n {
        let mut q = vec![0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            q[i] += c;
            q[i + 1] += k * c;
        }
        p = q;
    }
    p
}

fn homology() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 2..=3 {
        let h = model_homology(n).unwrap();
        let want = configuration_poincare(n);
        ok &= h.agree() && h.results.iter().all(|(_, hom, _)| hom.betti == want);
        parts.push(format!(
            "n={n} ranks {:?} (oracle {want:?})",
            h.results[0].1.betti
        ));
    }
    let (fast, time) = within(start, HOMOLOGY_BUDGET);
    outcome(ok && fast, format!("{}, {time}", parts.join("; ")))
}

/// The cochain sending one tuple of basis vectors to one basis vector.
fn entry(inputs: &[usize], out: usize) -> Cochain {
    let mut c = Cochain::zero();
    c.add_entry(inputs.to_vec(), out, BigRational::one());
    c
}

fn hochschild() -> Outcome {
    let algebras = [
        AInfAlgebra::dual_numbers(),
        AInfAlgebra::koszul_dga(),
        AInfAlgebra::massey_example(),
    ];
    let stasheff = algebras.iter().all(|a| check_stasheff(a).passed());
    // arities (3, 1, 1) give arity 3; arity 2 with one arity 1 argument gives two summands
    let a = &algebras[0];
    let h3 = entry(&[0, 0, 0], 0);
    let g = entry(&[1], 0);
    let arity = brace(a, &h3, &[&g, &g]).arities() == vec![3];
    let two = brace(a, &entry(&[0, 0], 0), &[&g]);
    let summands = two
        .iter()
        .map(|(i, o, _)| (i.clone(), o))
        .collect::<Vec<_>>()
        == vec![(vec![0, 1], 0), (vec![1, 0], 0)];
    let mut dg = true;
    let mut nonzero = 0;
    for (i, a) in algebras.iter().enumerate() {
        let r2 = check_dg_action(a, 2, 12, SEED).unwrap();
        dg &= r2.passed();
        nonzero += r2.nonzero;
        if i < 2 {
            let r3 = check_dg_action(a, 3, 4, SEED).unwrap();
            dg &= r3.passed();
            nonzero += r3.nonzero;
        }
    }
    let g = check_gerstenhaber_homology(a, 3).unwrap();
    outcome(
        stasheff && arity && summands && dg && g.passed(),
        format!(
            "Stasheff {stasheff}, brace bookkeeping {}, dg action {dg} ({nonzero} nonzero checks), HH dims {:?} with {} identities checked",
            arity && summands,
            g.dims,
            g.checks
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("d squared vanishes", d_squared),
        ("f-vectors", f_vectors),
        ("cubical decompositions", cubical_counts),
        ("cyclohedron incidences", incidence),
        ("boundary of the oriented sum", boundary_sum),
        ("operad axioms", operad_axioms),
        ("projection to bipartite trees", projection),
        ("refinement and retraction", refinement),
        ("homology of the models", homology),
        ("Hochschild suite", hochschild),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria {failed:?}");
        std::process::exit(1);
    }
}
