//! The three cell models of the little discs: `K1` indexed by bipartite trees,
//! `Kinf` by stable trees and `Kht` by stably bipartite trees with heights.
//!
//! A `Kinf` cell is a product of cyclohedra (white vertices) and associahedra
//! (black vertices). Subdividing every factor cubically turns it into a union
//! of `Kht` cells: the subdivided cell of a stable tree `T` consists of the
//! trees obtained by replacing each vertex of `T` by a cell of the cubical
//! cyclohedron or associahedron, the original black edges getting height 1.
//! The refinement map sends a `Kht` cell to the smallest `Kinf` cell whose
//! subdivision contains it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::chain::{dimension, is_planting, ChainElement};
use crate::complex::{CellComplex, Homology};
use crate::differential::{diff_tree, differential};
use crate::enumerate::{enumerate_family, enumerate_family_capped};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::operad::pi_inf_chain;
use crate::surgery::contract_edge;
use crate::tree::{Height, Node, Tree};

/// Largest arity for which the models are built.
pub const MODEL_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    K1,
    Kinf,
    Kht,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::K1, ModelKind::Kinf, ModelKind::Kht];

    pub fn family(self) -> Family {
        match self {
            ModelKind::K1 => Family::Bipart,
            ModelKind::Kinf => Family::Stable,
            ModelKind::Kht => Family::Ht,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::K1 => "K1",
            ModelKind::Kinf => "Kinf",
            ModelKind::Kht => "Kht",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelKind> {
        match s.to_ascii_lowercase().as_str() {
            "k1" => Ok(ModelKind::K1),
            "kinf" | "k_inf" | "kinfty" => Ok(ModelKind::Kinf),
            "kht" | "k_ht" => Ok(ModelKind::Kht),
            _ => Err(Error::Parse(format!(
                "unknown model {s:?} (expected K1, Kinf or Kht)"
            ))),
        }
    }
}

/// The cellular chain complex of a model in arity `n`.
pub fn build_model(kind: ModelKind, n: usize) -> Result<CellComplex> {
    build_model_capped(kind, n, MODEL_CAP)
}

pub fn build_model_capped(kind: ModelKind, n: usize, cap: usize) -> Result<CellComplex> {
    let f = kind.family();
    let trees = enumerate_family_capped(f, n, cap)?;
    CellComplex::from_cells(format!("{kind}({n})"), f, trees, |t| diff_tree(f, t))
}

/// Homology of a built complex, refusing complexes with `d^2 != 0`.
pub fn homology(c: &CellComplex) -> Result<Homology> {
    if let Some((t, r)) = c.d_squared_failures().into_iter().next() {
        return Err(Error::CorruptComplex(format!("d^2 of {t} is {r}")));
    }
    Ok(c.homology())
}

pub fn euler_characteristic(c: &CellComplex) -> i64 {
    c.euler_characteristic()
}

/// Homology of the three models in one arity.
#[derive(Clone, Debug)]
pub struct ModelHomology {
    pub n: usize,
    pub results: Vec<(ModelKind, Homology, i64)>,
}

impl ModelHomology {
    /// Whether all models have the same homology and it is torsion free.
    pub fn agree(&self) -> bool {
        let first = &self.results[0].1;
        self.results
            .iter()
            .all(|(_, h, _)| h == first && h.torsion.iter().all(Vec::is_empty))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "agree": self.agree(),
            "models": self.results.iter().map(|(k, h, chi)| json!({
                "model": k.name(),
                "homology": h.to_json(),
                "euler_characteristic": chi,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn model_homology(n: usize) -> Result<ModelHomology> {
    let mut results = Vec::new();
    for kind in ModelKind::ALL {
        let c = build_model(kind, n)?;
        let mut h = homology(&c)?;
        while h.betti.len() > 1
            && h.betti.last() == Some(&0)
            && h.torsion.last().is_some_and(Vec::is_empty)
        {
            h.betti.pop();
            h.torsion.pop();
        }
        results.push((kind, h, c.euler_characteristic()));
    }
    Ok(ModelHomology { n, results })
}

// ---------------------------------------------------------------------------
// Refinement

fn cartesian(options: &[Vec<Node>]) -> Vec<Vec<Node>> {
    let mut out: Vec<Vec<Node>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for o in opts {
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Glues `branches` into the leaves of a cell tree `s`. The leaf labelled
/// `offset + j` receives branch `j`; a white vertex labelled 1 of a
/// cyclohedron cell becomes the vertex being replaced (label `own`).
fn graft(s: &Node, branches: &[Node], offset: u32, own: Option<u32>) -> Node {
    let mut m = s.clone();
    m.tag = 0;
    m.children = s
        .children
        .iter()
        .map(|c| {
            if c.is_white()
                && c.labels.first().is_some_and(|&l| own.is_none() || l != 1)
                && c.is_leaf()
            {
                let mut b = branches[(c.labels[0] - offset) as usize].clone();
                b.height = if s.is_black() && b.is_black() {
                    Some(Height::One)
                } else {
                    None
                };
                b
            } else {
                graft(c, branches, offset, own)
            }
        })
        .collect();
    if let (Some(l), true) = (own, s.is_white()) {
        m.labels = vec![l];
    }
    m
}

/// Contracts black edges between two vertices of arity one. They arise when
/// a white branch is glued to a point of a cyclohedron cell, and the branch
/// root and the point are the same vertex.
fn fuse(mut n: Node) -> Node {
    while n.is_black() && n.arity() == 1 && n.children[0].is_black() && n.children[0].arity() == 1 {
        let c = n.children.remove(0);
        n.children = c.children;
    }
    n.children = n.children.into_iter().map(fuse).collect();
    n
}

struct Subdivider {
    cyc: HashMap<usize, Vec<Tree>>,
    ass: HashMap<usize, Vec<Tree>>,
}

impl Subdivider {
    fn cells(&mut self, family: Family, k: usize) -> Result<Vec<Tree>> {
        let map = if family == Family::CycHt {
            &mut self.cyc
        } else {
            &mut self.ass
        };
        if let Some(v) = map.get(&k) {
            return Ok(v.clone());
        }
        let v = enumerate_family(family, k)?;
        map.insert(k, v.clone());
        Ok(v)
    }

    /// Every subdivision cell of the subtree at `x`, as a subtree.
    fn realize(&mut self, x: &Node) -> Result<Vec<Node>> {
        if x.is_leaf() {
            return Ok(vec![x.clone()]);
        }
        let options: Vec<Vec<Node>> = x
            .children
            .iter()
            .map(|c| self.realize(c))
            .collect::<Result<_>>()?;
        let branches = cartesian(&options);
        let mut out = Vec::new();
        if x.is_white() {
            let own = x.labels[0];
            for s in self.cells(Family::CycHt, x.arity() + 1)? {
                for b in &branches {
                    out.push(graft(s.root(), b, 2, Some(own)));
                }
            }
        } else {
            for s in self.cells(Family::AssHt, x.arity())? {
                for b in &branches {
                    out.push(graft(s.root(), b, 1, None));
                }
            }
        }
        Ok(out)
    }

    /// The trees with heights subdividing the cell of a stable tree.
    fn closure(&mut self, t: &Tree) -> Result<Vec<Tree>> {
        let root = t.root();
        let mut out = Vec::new();
        if is_planting(root) {
            for c in self.realize(&root.children[0])? {
                let mut c = c;
                c.height = None;
                let r = if c.is_black() {
                    c
                } else {
                    Node::black(vec![c])
                };
                out.push(Tree::new(fuse(r))?);
            }
        } else {
            for r in self.realize(root)? {
                out.push(Tree::new(fuse(r))?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// The subdivision of `Kinf(n)` by `Kht(n)`.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub n: usize,
    pub coarse: Family,
    pub fine: Family,
    cap: usize,
    keep: fn(&Tree) -> bool,
    /// Trees with heights in the closed cell of each stable tree.
    pub closures: BTreeMap<Tree, Vec<Tree>>,
    /// The smallest stable cell containing each tree with heights.
    pub refine: BTreeMap<Tree, Tree>,
    /// Trees with heights sharing the minimal dimension, when not unique.
    pub ambiguous: Vec<Tree>,
    /// Trees with heights not covered by any stable cell.
    pub uncovered: Vec<Tree>,
    /// Trees produced by the subdivision that are not trees with heights.
    pub invalid: Vec<Tree>,
}

impl Refinement {
    /// The subdivision of `Kinf(n)` by `Kht(n)`.
    pub fn new(n: usize) -> Result<Refinement> {
        Refinement::between(Family::Stable, Family::Ht, n, MODEL_CAP)
    }

    /// The subdivision of the complex of `coarse` trees (a stable family) by
    /// the complex of `fine` trees (a family with heights).
    pub fn between(coarse: Family, fine: Family, n: usize, cap: usize) -> Result<Refinement> {
        Refinement::between_where(coarse, fine, n, cap, |_| true)
    }

    /// As [`Refinement::between`], keeping only the cells that satisfy `keep`
    /// on both sides.
    pub fn between_where(
        coarse: Family,
        fine: Family,
        n: usize,
        cap: usize,
        keep: fn(&Tree) -> bool,
    ) -> Result<Refinement> {
        let stable: Vec<Tree> = enumerate_family_capped(coarse, n, cap)?
            .into_iter()
            .filter(keep)
            .collect();
        let ht: Vec<Tree> = enumerate_family_capped(fine, n, cap)?
            .into_iter()
            .filter(keep)
            .collect();
        let mut sub = Subdivider {
            cyc: HashMap::new(),
            ass: HashMap::new(),
        };
        let mut closures = BTreeMap::new();
        let mut containing: BTreeMap<Tree, Vec<Tree>> = BTreeMap::new();
        let mut invalid = Vec::new();
        for s in &stable {
            let cl = sub.closure(s)?;
            for t in &cl {
                if fine.contains(t) {
                    containing.entry(t.clone()).or_default().push(s.clone());
                } else {
                    invalid.push(t.clone());
                }
            }
            closures.insert(s.clone(), cl);
        }
        let mut refine = BTreeMap::new();
        let mut ambiguous = Vec::new();
        let mut uncovered = Vec::new();
        for t in ht {
            let Some(cands) = containing.get(&t) else {
                uncovered.push(t);
                continue;
            };
            let best = cands.iter().map(|s| dimension(coarse, s)).min().unwrap();
            let minimal: Vec<&Tree> = cands
                .iter()
                .filter(|s| dimension(coarse, s) == best)
                .collect();
            if minimal.len() > 1 {
                ambiguous.push(t.clone());
            }
            refine.insert(t, minimal[0].clone());
        }
        Ok(Refinement {
            n,
            coarse,
            fine,
            cap,
            keep,
            closures,
            refine,
            ambiguous,
            uncovered,
            invalid,
        })
    }

    /// The open cells of `Kht(n)` inside the open cell of `s`.
    pub fn fibre(&self, s: &Tree) -> Vec<Tree> {
        self.refine
            .iter()
            .filter(|(_, r)| *r == s)
            .map(|(t, _)| t.clone())
            .collect()
    }

    pub fn fibres(&self) -> BTreeMap<Tree, Vec<Tree>> {
        let mut out: BTreeMap<Tree, Vec<Tree>> = self
            .closures
            .keys()
            .map(|s| (s.clone(), Vec::new()))
            .collect();
        for (t, s) in &self.refine {
            out.get_mut(s)
                .expect("refinement lands in a stable tree")
                .push(t.clone());
        }
        out
    }

    pub fn check(&self) -> Result<RefinementReport> {
        let fibres = self.fibres();
        let total: usize = fibres.values().map(Vec::len).sum();
        let ht_count = enumerate_family_capped(self.fine, self.n, self.cap)?
            .into_iter()
            .filter(self.keep)
            .count();
        let mut failures = Vec::new();
        for t in self
            .ambiguous
            .iter()
            .chain(&self.uncovered)
            .chain(&self.invalid)
        {
            failures.push(format!("{t}: not in exactly one minimal cell"));
        }
        // Each open cell is a disjoint union of open cubical cells, so its
        // Euler characteristic is (-1)^dim, and it has exactly one top cell
        // per top cell of the subdivision, all of the same dimension.
        for (s, fib) in &fibres {
            let d = dimension(self.coarse, s);
            let chi: i64 = fib
                .iter()
                .map(|t| {
                    if dimension(self.fine, t).is_multiple_of(2) {
                        1
                    } else {
                        -1
                    }
                })
                .sum();
            if chi != if d.is_multiple_of(2) { 1 } else { -1 } {
                failures.push(format!("{s}: open cell has Euler characteristic {chi}"));
            }
            if fib.iter().any(|t| dimension(self.fine, t) > d)
                || !fib.iter().any(|t| dimension(self.fine, t) == d)
            {
                failures.push(format!("{s}: fibre dimensions do not reach {d}"));
            }
        }
        // Boundary terms should refine into the closed cell.
        let mut faces = FacePoset {
            family: self.coarse,
            memo: HashMap::new(),
        };
        let mut boundary_violations = Vec::new();
        for (t, s) in &self.refine {
            for (b, _) in diff_tree(self.fine, t).terms() {
                if let Some(rb) = self.refine.get(b) {
                    if rb != s && !faces.faces(s).contains(rb) {
                        boundary_violations.push((t.clone(), b.clone(), rb.clone(), s.clone()));
                    }
                }
            }
        }
        Ok(RefinementReport {
            n: self.n,
            coarse_cells: fibres.len(),
            fibre_total: total,
            fine_cells: ht_count,
            failures,
            boundary_violations,
        })
    }
}

struct FacePoset {
    family: Family,
    memo: HashMap<Tree, BTreeSet<Tree>>,
}

impl FacePoset {
    /// Every proper face of a stable cell.
    fn faces(&mut self, s: &Tree) -> BTreeSet<Tree> {
        if let Some(f) = self.memo.get(s) {
            return f.clone();
        }
        let mut out = BTreeSet::new();
        for (b, _) in diff_tree(self.family, s).terms() {
            out.insert(b.clone());
            out.extend(self.faces(b));
        }
        self.memo.insert(s.clone(), out.clone());
        out
    }
}

#[derive(Clone, Debug)]
pub struct RefinementReport {
    pub n: usize,
    pub coarse_cells: usize,
    pub fibre_total: usize,
    pub fine_cells: usize,
    pub failures: Vec<String>,
    /// `(t, b, refine(b), refine(t))` where the boundary term `b` of `t`
    /// refines outside the closed cell of `refine(t)`. This happens for
    /// bipartite cells with two nested points of arity one, whose faces are
    /// interior cells of a cyclohedron while the matching stable face is
    /// subdivided by the stem of height 1.
    pub boundary_violations: Vec<(Tree, Tree, Tree, Tree)>,
}

impl RefinementReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.fibre_total == self.fine_cells
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "coarse_cells": self.coarse_cells,
            "fibre_total": self.fibre_total,
            "fine_cells": self.fine_cells,
            "passed": self.passed(),
            "failures": self.failures,
            "boundary_violations": self.boundary_violations.iter().map(|(t, b, rb, s)| json!({
                "cell": t.to_compact(),
                "face": b.to_compact(),
                "face_refines_to": rb.to_compact(),
                "cell_refines_to": s.to_compact(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The smallest `Kinf` cell containing the `Kht` cell of `t`.
pub fn refine(t: &Tree) -> Result<Tree> {
    if !Family::Ht.contains(t) {
        return Err(Error::FamilyMismatch {
            expected: Family::Ht,
        });
    }
    let mut t = t.clone();
    t.clear_tags();
    let r = Refinement::new(t.n_white())?;
    r.refine
        .get(&t)
        .cloned()
        .ok_or_else(|| Error::Constraint(format!("{t} lies in no stable cell")))
}

// ---------------------------------------------------------------------------
// Retraction

/// The retraction onto `K1` on a single tree with heights: contract every
/// black edge. The cell keeps its dimension only without edges of height `v`.
fn retract_ht(t: &Tree) -> ChainElement {
    let mut out = ChainElement::zero(Family::Bipart);
    if !t.var_edges().is_empty() {
        return out;
    }
    let mut cur = t.clone();
    while let Some(e) = cur.black_edges().pop() {
        cur = contract_edge(&cur, &e).expect("black edge of the tree");
    }
    out.add_term(cur, BigInt::from(1));
    out
}

/// The cellular retraction of `Kinf` or `Kht` onto `K1`.
pub fn retract_chain(x: &ChainElement) -> Result<ChainElement> {
    match x.family.parent() {
        Family::Stable => Ok(pi_inf_chain(x)),
        Family::Ht => Ok(x.map_linear(Family::Bipart, retract_ht)),
        Family::Bipart => Ok(x.map_linear(Family::Bipart, |t| {
            ChainElement::from_tree(Family::Bipart, t.clone())
        })),
        _ => Err(Error::FamilyMismatch {
            expected: Family::Ht,
        }),
    }
}

/// Trees on which the retraction fails to commute with the differential.
pub fn retract_chain_map_failures(family: Family, n: usize) -> Result<Vec<Tree>> {
    let mut out = Vec::new();
    for t in enumerate_family(family, n)? {
        let x = ChainElement::from_tree(family, t.clone());
        let lhs = differential(&retract_chain(&x)?);
        let rhs = retract_chain(&differential(&x))?;
        if lhs != rhs {
            out.push(t);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::pi_inf;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    #[test]
    fn small_models() {
        let k1 = build_model(ModelKind::K1, 2).unwrap();
        assert_eq!(k1.f_vector(), vec![2, 2]);
        assert_eq!(k1.euler_characteristic(), 0);
        let kinf = build_model(ModelKind::Kinf, 1).unwrap();
        assert_eq!(kinf.f_vector(), vec![1]);
        assert_eq!(
            build_model(ModelKind::Kht, 2)
                .unwrap()
                .euler_characteristic(),
            0
        );
        assert!(matches!(
            build_model(ModelKind::K1, 5),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn homology_of_circle_and_arity_three() {
        let h2 = model_homology(2).unwrap();
        assert!(h2.agree());
        assert_eq!(h2.results[0].1.betti, vec![1, 1]);
        let h3 = model_homology(3).unwrap();
        assert!(h3.agree());
        assert_eq!(h3.results[0].1.betti, vec![1, 3, 2]);
    }

    #[test]
    fn refinement_partitions() {
        for n in 1..=3 {
            let r = Refinement::new(n).unwrap();
            let rep = r.check().unwrap();
            assert!(rep.passed(), "{:#}", rep.to_json());
            for (t, _, _, _) in &rep.boundary_violations {
                assert!(Family::Bipart.contains(t), "{t}");
            }
        }
        let rep = Refinement::new(3).unwrap().check().unwrap();
        assert_eq!(rep.fine_cells, 96);
        assert_eq!(rep.coarse_cells, 48);
        assert_eq!(rep.boundary_violations.len(), 24);
    }

    #[test]
    fn refine_examples() {
        // all black edges of height 1: the stable tree itself
        assert_eq!(refine(&t("b(b:1(w1 w2) w3)")).unwrap(), t("b(b(w1 w2) w3)"));
        // a var edge lies inside the associahedron of the contracted vertex
        assert_eq!(refine(&t("b(b:v(w1 w2) w3)")).unwrap(), t("b(w1 w2 w3)"));
        assert!(refine(&t("b(w1 w2)")).is_ok());
    }

    #[test]
    fn retraction() {
        for s in enumerate_family(Family::Stable, 3).unwrap() {
            let x = ChainElement::from_tree(Family::Stable, s.clone());
            assert_eq!(retract_chain(&x).unwrap(), pi_inf(&s));
        }
        for b in enumerate_family(Family::Bipart, 3).unwrap() {
            if Family::Ht.contains(&b) {
                let x = ChainElement::from_tree(Family::Ht, b.clone());
                assert_eq!(
                    retract_chain(&x).unwrap(),
                    ChainElement::from_tree(Family::Bipart, b)
                );
            }
        }
        let x = ChainElement::from_tree(Family::Ht, t("b(b:v(w1 w2) w3)"));
        assert!(retract_chain(&x).unwrap().is_zero());
        for f in [Family::Stable, Family::Ht] {
            assert!(retract_chain_map_failures(f, 3).unwrap().is_empty(), "{f}");
        }
    }
}
