//! The differentials on the three tree complexes and the `d^2 = 0` check.
//!
//! Signs come from an ordered list of odd coordinates attached to each tree.
//! Every term is computed on a tagged copy of the tree so the coordinates can
//! be followed through the move; the sign of a term is the orientation of the
//! face times the sign of the permutation relating the surviving coordinates
//! to the coordinates of the new tree.
//!
//! * bipartite trees: one coordinate per black child of a white vertex, in
//!   planar order of the white vertices. A white vertex of arity `k` is a
//!   simplex `Δ^k` and its angle `j` is the face opposite vertex `j`.
//! * stable trees: one coordinate per edge, except a planting edge. Inserting
//!   an edge wedges it in front of the orientation.
//! * trees with heights: the bipartite coordinates followed by the edges of
//!   height `v`, each an interval whose ends are the contraction and height 1.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::chain::{is_planting, ChainElement};
use crate::enumerate::enumerate_family;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::surgery::{collapse_angle, contract_edge, insertions};
use crate::tree::{reorder_sign, EdgeKind, Height, Node, Path, Tree};

fn sign_pow(k: usize) -> i32 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Tags of the simplex coordinates: black children of white vertices.
fn simplex_coordinates(t: &Tree) -> Vec<(Path, Vec<u32>)> {
    let mut blocks = Vec::new();
    t.for_each(|p, n| {
        if n.is_white() {
            blocks.push((
                p.clone(),
                n.children
                    .iter()
                    .filter(|c| c.is_black())
                    .map(|c| c.tag)
                    .collect(),
            ));
        }
    });
    blocks
}

/// Full coordinate list of a bipartite tree or a tree with heights.
fn angle_coordinates(t: &Tree) -> Vec<u32> {
    let mut out: Vec<u32> = simplex_coordinates(t)
        .into_iter()
        .flat_map(|(_, b)| b)
        .collect();
    for e in t.var_edges() {
        out.push(t.node(&e).unwrap().tag);
    }
    out
}

/// Stable-tree generators: every edge except a planting edge, in preorder.
fn edge_generators(t: &Tree) -> Vec<u32> {
    let planting = is_planting(t.root());
    let mut out = Vec::new();
    t.for_each(|p, n| {
        if !p.is_empty() && !(planting && p.len() == 1) {
            out.push(n.tag);
        }
    });
    out
}

fn without(v: &[u32], x: u32) -> Vec<u32> {
    v.iter().copied().filter(|&y| y != x).collect()
}

/// Signed angle collapses of a tagged tree, shared by the bipartite and
/// height differentials.
fn angle_terms(t: &Tree, coords: &[u32], out: &mut Vec<(Tree, i32)>) {
    let mut before = 0usize;
    for (w, block) in simplex_coordinates(t) {
        let node = t.node(&w).unwrap();
        let k = node.arity();
        if k > 0 && block.len() == k {
            for j in 0..=k {
                let removed = match j {
                    0 => node.children[0].tag,
                    _ if j == k => node.children[k - 1].tag,
                    _ => node.children[j].tag,
                };
                let Ok(t2) = collapse_angle(t, &w, j) else {
                    continue;
                };
                let rest = without(coords, removed);
                let sign = sign_pow(before + j + 1) * reorder_sign(&rest, &angle_coordinates(&t2));
                out.push((t2, sign));
            }
        }
        before += block.len();
    }
}

/// Differential of a single basis tree, in the complex of `family`.
pub fn diff_tree(family: Family, t: &Tree) -> ChainElement {
    let parent = family.parent();
    let t = t.tagged();
    let mut terms: Vec<(Tree, i32)> = Vec::new();
    match parent {
        Family::Bipart => {
            let coords = angle_coordinates(&t);
            angle_terms(&t, &coords, &mut terms);
        }
        Family::Ht => {
            let coords = angle_coordinates(&t);
            angle_terms(&t, &coords, &mut terms);
            for e in t.var_edges() {
                let tag = t.node(&e).unwrap().tag;
                let q = coords.iter().position(|&c| c == tag).unwrap();
                let rest = without(&coords, tag);
                let contracted = contract_edge(&t, &e).expect("var edge is an edge");
                let s = reorder_sign(&rest, &angle_coordinates(&contracted));
                terms.push((contracted, -sign_pow(q) * s));
                let mut fixed = t.clone();
                fixed.node_mut(&e).unwrap().height = Some(Height::One);
                terms.push((fixed, sign_pow(q)));
            }
        }
        _ => {
            for (t2, e, sign) in stable_terms(&t) {
                let _ = e;
                terms.push((t2, sign));
            }
        }
    }
    let mut out = ChainElement::zero(family);
    for (t2, s) in terms {
        if parent.contains(&t2) {
            out.add_signed(t2, s);
        }
    }
    out
}

/// Stable insertions of a tagged tree with their signs and the vertex of the
/// original tree the new edge contracts to.
fn stable_terms(t: &Tree) -> Vec<(Tree, Path, i32)> {
    let gens = edge_generators(t);
    let fresh = t.root().max_tag() + 1;
    let mut out = Vec::new();
    for (t2, e) in insertions(t, &[EdgeKind::Black, EdgeKind::Mixed]) {
        if !Family::Stable.contains(&t2) || t2 == *t {
            continue;
        }
        let g2 = edge_generators(&t2);
        let Some(pos) = g2.iter().position(|&g| g == fresh) else {
            continue;
        };
        let sign = sign_pow(pos) * reorder_sign(&gens, &without(&g2, fresh));
        // the vertex of `t` the new edge came out of
        let v = if e.len() == 1 && t2.root().tag == 0 {
            vec![0]
        } else {
            e[..e.len() - 1].to_vec()
        };
        out.push((t2, v, sign));
    }
    out
}

/// The stable differential grouped by the vertex of the tree that is being
/// split; summing the groups gives [`diff_tree`] on stable trees.
pub fn diff_stable_local(t: &Tree) -> Vec<(Path, ChainElement)> {
    let tagged = t.tagged();
    let mut groups: Vec<(Path, ChainElement)> = Vec::new();
    for (t2, v, s) in stable_terms(&tagged) {
        match groups.iter_mut().find(|(p, _)| *p == v) {
            Some((_, c)) => c.add_signed(t2, s),
            None => {
                let mut c = ChainElement::zero(Family::Stable);
                c.add_signed(t2, s);
                groups.push((v, c));
            }
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    groups
}

/// The differential of the complex the chain's family belongs to.
pub fn differential(x: &ChainElement) -> ChainElement {
    x.map_linear(x.family, |t| diff_tree(x.family, t))
}

fn expect_parent(x: &ChainElement, f: Family) -> Result<()> {
    if x.family.parent() == f {
        Ok(())
    } else {
        Err(Error::FamilyMismatch { expected: f })
    }
}

pub fn diff_bipart(x: &ChainElement) -> Result<ChainElement> {
    expect_parent(x, Family::Bipart)?;
    Ok(differential(x))
}

pub fn diff_stable(x: &ChainElement) -> Result<ChainElement> {
    expect_parent(x, Family::Stable)?;
    Ok(differential(x))
}

pub fn diff_ht(x: &ChainElement) -> Result<ChainElement> {
    expect_parent(x, Family::Ht)?;
    Ok(differential(x))
}

#[derive(Clone, Debug)]
pub struct D2Report {
    pub family: Family,
    pub n: usize,
    pub trees_checked: usize,
    pub failures: Vec<(Tree, ChainElement)>,
}

impl D2Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "d_squared",
            "family": self.family.name(),
            "n": self.n,
            "trees_checked": self.trees_checked,
            "passed": self.passed(),
            "failures": self.failures.iter().map(|(t, r)| json!({"tree": t.to_compact(), "residue": r.to_string()})).collect::<Vec<_>>(),
        })
    }
}

/// Applies the differential twice to every tree of `family` with `n` labels.
pub fn verify_d_squared(family: Family, n: usize) -> Result<D2Report> {
    let trees = enumerate_family(family, n)?;
    let mut failures = Vec::new();
    for t in &trees {
        let dd = differential(&diff_tree(family, t));
        if !dd.is_zero() {
            failures.push((t.clone(), dd));
        }
    }
    Ok(D2Report {
        family,
        n,
        trees_checked: trees.len(),
        failures,
    })
}

/// A node helper for tests and callers that build corollas.
pub fn black_corolla(labels: impl IntoIterator<Item = u32>) -> Tree {
    Tree::new(Node::black(labels.into_iter().map(Node::leaf).collect()))
        .expect("corolla is a valid tree")
}

/// Integer coefficient helper.
pub fn coeff(x: &ChainElement, t: &str) -> BigInt {
    x.coefficient(&Tree::parse_compact(t).expect("valid tree"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surgery::preimages_by_search;
    use num_traits::Signed;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    #[test]
    fn bipartite_small() {
        let d = diff_tree(Family::Bipart, &t("b(w1(b(w2)))"));
        assert_eq!(d.len(), 2);
        assert_eq!(coeff(&d, "b(w1 w2)"), -coeff(&d, "b(w2 w1)"));
        assert!(diff_tree(Family::Bipart, &t("b(w1 w2 w3)")).is_zero());
    }

    #[test]
    fn term_count_equals_effective_angles() {
        for tr in enumerate_family(Family::Bipart, 2).unwrap() {
            let po = crate::planar::planar_order(&tr);
            assert_eq!(
                diff_tree(Family::Bipart, &tr).len(),
                po.effective_white_angles.len(),
                "{tr}"
            );
        }
    }

    #[test]
    fn heights_single_var_edge() {
        let d = diff_tree(Family::Ht, &t("b(b:v(w1 w2) w3)"));
        assert_eq!(d.len(), 2);
        assert_eq!(coeff(&d, "b(w1 w2 w3)"), -coeff(&d, "b(b:1(w1 w2) w3)"));
    }

    #[test]
    fn stable_corolla_of_arity_three() {
        let d = diff_tree(Family::Pp, &black_corolla(1..=3));
        assert_eq!(d.len(), 2);
        assert_eq!(coeff(&d, "b(b(w1 w2) w3)").abs(), BigInt::from(1));
        assert_eq!(coeff(&d, "b(w1 b(w2 w3))").abs(), BigInt::from(1));
    }

    #[test]
    fn d_squared_small() {
        for f in [Family::Bipart, Family::Stable, Family::Ht] {
            for n in 1..=3 {
                let r = verify_d_squared(f, n).unwrap();
                assert!(r.passed(), "{f} {n}: {:?}", r.failures.first());
            }
        }
    }

    #[test]
    fn local_grouping_agrees() {
        for tr in enumerate_family(Family::Stable, 3).unwrap() {
            let mut sum = ChainElement::zero(Family::Stable);
            for (_, c) in diff_stable_local(&tr) {
                sum = sum.add(&c);
            }
            assert_eq!(sum, diff_tree(Family::Stable, &tr), "{tr}");
        }
    }

    #[test]
    fn stable_terms_match_brute_force_preimages() {
        let all3 = enumerate_family(Family::Stable, 3).unwrap();
        for tr in &all3 {
            let d = diff_tree(Family::Stable, tr);
            let dim = crate::chain::dimension(Family::Stable, tr);
            let mut found: Vec<Tree> =
                preimages_by_search(tr, &all3, &[EdgeKind::Black, EdgeKind::Mixed])
                    .into_iter()
                    .map(|(x, _)| x)
                    .filter(|x| crate::chain::dimension(Family::Stable, x) + 1 == dim)
                    .collect();
            found.sort();
            found.dedup();
            let mut terms: Vec<Tree> = d.terms().map(|(x, _)| x.clone()).collect();
            terms.sort();
            assert_eq!(terms, found, "{tr}");
        }
    }

    #[test]
    fn family_mismatch() {
        let x = ChainElement::from_tree(Family::Bipart, t("b(w1)"));
        assert!(diff_stable(&x).is_err());
        assert!(diff_bipart(&x).is_ok());
    }
}
