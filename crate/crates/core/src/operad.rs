//! Operad structures on the tree complexes and the comparison maps between
//! stable and bipartite trees.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::chain::{dimension, is_planting, ChainElement};
use crate::differential::differential;
use crate::enumerate::enumerate_family;
use crate::error::{Error, Result};
use crate::family::{is_bijectively_labelled, Family};
use crate::tree::{reorder_sign, Color, Height, Node, Path, Tree};

/// Whether every black vertex other than a planting root has arity two.
fn all_black_binary(t: &Tree) -> bool {
    let planting = is_planting(t.root());
    let mut ok = true;
    t.for_each(|p, n| {
        if n.is_black() && !(p.is_empty() && planting) && n.arity() != 2 {
            ok = false;
        }
    });
    ok
}

/// Merges every black child of a black vertex into it, keeping the tag of
/// the lowest vertex of each black cluster.
fn contract_black(n: &Node) -> Node {
    let mut m = n.clone();
    m.children.clear();
    for c in &n.children {
        let c2 = contract_black(c);
        if n.is_black() && c2.is_black() {
            m.children.extend(c2.children);
        } else {
            m.children.push(c2);
        }
    }
    m.height = None;
    m
}

/// Puts a black vertex of arity one into every white edge. The new black
/// vertex takes over the tag of the edge it subdivides.
fn subdivide_white(n: &Node, fresh: &mut u32) -> Node {
    let mut m = n.clone();
    m.children = n
        .children
        .iter()
        .map(|c| {
            let mut c2 = subdivide_white(c, fresh);
            if n.is_white() && c.is_white() {
                let tag = c2.tag;
                c2.tag = *fresh;
                *fresh += 1;
                Node {
                    color: Color::Black,
                    labels: Vec::new(),
                    height: None,
                    children: vec![c2],
                    tag,
                }
            } else {
                c2
            }
        })
        .collect();
    m
}

/// Edges of a stable tree with their lower end, except the planting edge.
fn stable_generators(t: &Tree) -> (Vec<u32>, Vec<u32>) {
    let planting = is_planting(t.root());
    let mut below_black = Vec::new();
    let mut below_white = Vec::new();
    fn go(n: &Node, depth: usize, planting: bool, bb: &mut Vec<u32>, bw: &mut Vec<u32>) {
        for c in &n.children {
            if !(depth == 0 && planting) {
                if n.is_black() {
                    bb.push(c.tag);
                } else {
                    bw.push(c.tag);
                }
            }
            go(c, depth + 1, planting, bb, bw);
        }
    }
    go(t.root(), 0, planting, &mut below_black, &mut below_white);
    (below_black, below_white)
}

fn all_edge_tags(t: &Tree) -> Vec<u32> {
    let planting = is_planting(t.root());
    let mut out = Vec::new();
    t.for_each(|p, n| {
        if !p.is_empty() && !(planting && p.len() == 1) {
            out.push(n.tag);
        }
    });
    out
}

fn bipart_coordinates(t: &Tree) -> Vec<u32> {
    let mut out = Vec::new();
    t.for_each(|_, n| {
        if n.is_white() {
            out.extend(n.children.iter().filter(|c| c.is_black()).map(|c| c.tag));
        }
    });
    out
}

/// The bipartite tree underlying a stable tree whose black vertices are all
/// binary, with the orientation sign relating the two cells.
pub fn pi_inf_term(t: &Tree) -> Option<(Tree, i32)> {
    if !all_black_binary(t) {
        return None;
    }
    let tagged = t.tagged();
    let mut fresh = tagged.root().max_tag() + 1;
    let flat = contract_black(tagged.root());
    let bip = Tree::from_node_unchecked(subdivide_white(&flat, &mut fresh));
    let (bb, _) = stable_generators(&tagged);
    let mut target = bb;
    target.extend(bipart_coordinates(&bip));
    let sign = reorder_sign(&all_edge_tags(&tagged), &target);
    let mut bip = bip;
    bip.clear_tags();
    Some((bip, sign))
}

/// The projection from stable trees to bipartite trees: zero on trees with a
/// black vertex of arity above two.
pub fn pi_inf(t: &Tree) -> ChainElement {
    let mut c = ChainElement::zero(Family::Bipart);
    if let Some((b, s)) = pi_inf_term(t) {
        c.add_signed(b, s);
    }
    c
}

pub fn pi_inf_chain(x: &ChainElement) -> ChainElement {
    x.map_linear(Family::Bipart, pi_inf)
}

/// Removes black vertices of arity one below the root and replaces every
/// black vertex of arity above two by a left comb of binary vertices.
pub fn i_inf(t: &Tree) -> Tree {
    fn go(n: &Node) -> Node {
        let children: Vec<Node> = n
            .children
            .iter()
            .map(|c| {
                if c.is_black() && c.arity() == 1 {
                    go(&c.children[0])
                } else {
                    go(c)
                }
            })
            .collect();
        if n.is_white() || children.len() <= 2 {
            let mut m = n.clone();
            m.children = children;
            return m;
        }
        let mut it = children.into_iter();
        let first = Node::black(vec![it.next().unwrap(), it.next().unwrap()]);
        it.fold(first, |comb, c| Node::black(vec![comb, c]))
    }
    Tree::new(go(t.root())).expect("i_inf produces a valid tree")
}

/// [`i_inf`] with the sign that makes `pi_inf(i_inf_chain(t)) = t`.
pub fn i_inf_chain(t: &Tree) -> ChainElement {
    let s = i_inf(t);
    let sign = pi_inf_term(&s).map_or(1, |(_, e)| e);
    let mut c = ChainElement::zero(Family::Stable);
    c.add_signed(s, sign);
    c
}

/// An element of one of the tree operads together with its arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadElement {
    pub chain: ChainElement,
    pub arity: usize,
}

impl OperadElement {
    /// Checks that every term is labelled by exactly `1..=arity`.
    pub fn new(chain: ChainElement, arity: usize) -> Result<OperadElement> {
        for (t, _) in chain.terms() {
            if !is_bijectively_labelled(t) || t.n_white() != arity {
                return Err(Error::ArityMismatch(format!("{t} is not {arity}-labelled")));
            }
        }
        Ok(OperadElement { chain, arity })
    }

    pub fn from_tree(family: Family, t: Tree) -> OperadElement {
        let arity = t.n_white();
        OperadElement {
            chain: ChainElement::from_tree(family, t),
            arity,
        }
    }

    pub fn compose(&self, i: usize, other: &OperadElement) -> Result<OperadElement> {
        let chain = compose(&self.chain, i, &other.chain)?;
        Ok(OperadElement {
            chain,
            arity: self.arity + other.arity - 1,
        })
    }
}

/// A place a branch can be glued to, listed in the order of a walk around
/// the inserted tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Slot {
    /// Angle `position` at the vertex, i.e. a new child at that index.
    Angle(Path, usize),
    /// A new vertex on the black edge below the vertex, branch on the left.
    EdgeLeft(Path),
    /// As `EdgeLeft` with the branch on the right of the edge.
    EdgeRight(Path),
}

fn slots(root: &Node, parent: Family, skip_root_angles: bool) -> Vec<Slot> {
    fn go(n: &Node, path: &mut Path, parent: Family, skip: bool, out: &mut Vec<Slot>) {
        let angles = !skip && (parent == Family::Stable || n.is_white());
        if angles {
            out.push(Slot::Angle(path.clone(), 0));
        }
        for (j, c) in n.children.iter().enumerate() {
            path.push(j);
            let glue = parent == Family::Ht && n.is_black() && c.is_black();
            if glue {
                out.push(Slot::EdgeLeft(path.clone()));
            }
            go(c, path, parent, false, out);
            if glue {
                out.push(Slot::EdgeRight(path.clone()));
            }
            path.pop();
            if angles {
                out.push(Slot::Angle(path.clone(), j + 1));
            }
        }
    }
    let mut out = Vec::new();
    go(root, &mut Vec::new(), parent, skip_root_angles, &mut out);
    out
}

/// Weakly increasing maps from `k` branches to `s` slots.
fn distributions(k: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, s: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in from..s {
            cur.push(x);
            go(k, s, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if s > 0 || k == 0 {
        go(k, s, 0, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Left,
    Right,
}

/// One way of subdividing a black edge: the glued branches from bottom to
/// top with their sides, and the heights of the pieces from bottom to top.
#[derive(Clone, Debug)]
struct EdgeSplit {
    branches: Vec<(Node, Side)>,
    heights: Vec<Height>,
}

/// All vertical orders interleaving the left branches (bottom to top) with
/// the right branches (bottom to top), each with every admissible height
/// pattern.
fn edge_splits(left: &[Node], right_top_down: &[Node], h: Height) -> Vec<EdgeSplit> {
    let right: Vec<Node> = right_top_down.iter().rev().cloned().collect();
    let mut orders: Vec<Vec<(Node, Side)>> = Vec::new();
    fn shuffle(
        l: &[Node],
        r: &[Node],
        cur: &mut Vec<(Node, Side)>,
        out: &mut Vec<Vec<(Node, Side)>>,
    ) {
        if l.is_empty() && r.is_empty() {
            out.push(cur.clone());
            return;
        }
        if let Some((x, rest)) = l.split_first() {
            cur.push((x.clone(), Side::Left));
            shuffle(rest, r, cur, out);
            cur.pop();
        }
        if let Some((x, rest)) = r.split_first() {
            cur.push((x.clone(), Side::Right));
            shuffle(l, rest, cur, out);
            cur.pop();
        }
    }
    shuffle(left, &right, &mut Vec::new(), &mut orders);
    let pieces = left.len() + right.len() + 1;
    let mut out = Vec::new();
    for o in orders {
        match h {
            Height::Var => out.push(EdgeSplit {
                branches: o,
                heights: vec![Height::Var; pieces],
            }),
            Height::One => {
                for q in 0..pieces {
                    let heights = (0..pieces)
                        .map(|r| if r == q { Height::One } else { Height::Var })
                        .collect();
                    out.push(EdgeSplit {
                        branches: o.clone(),
                        heights,
                    });
                }
            }
        }
    }
    out
}

/// Rebuilds the inserted tree with branches placed at angles and edge
/// splits applied.
fn rebuild(
    n: &Node,
    path: &mut Path,
    angles: &HashMap<(Path, usize), Vec<Node>>,
    splits: &HashMap<Path, EdgeSplit>,
) -> Node {
    let mut m = n.clone();
    m.children.clear();
    let here = path.clone();
    let at = |j: usize, m: &mut Node| {
        if let Some(bs) = angles.get(&(here.clone(), j)) {
            m.children.extend(bs.iter().cloned());
        }
    };
    at(0, &mut m);
    for (j, c) in n.children.iter().enumerate() {
        path.push(j);
        let mut c2 = rebuild(c, path, angles, splits);
        if let Some(split) = splits.get(path) {
            c2 = apply_split(c2, split);
        }
        path.pop();
        m.children.push(c2);
        at(j + 1, &mut m);
    }
    m
}

/// Subdivides the edge below `top` by the split's branches. Pieces of height
/// `v` carry, from bottom to top, the tags of the glued branches followed by
/// the tag of the original edge; a piece of height 1 takes whatever tag is
/// left over, which is never a coordinate.
fn apply_split(top: Node, split: &EdgeSplit) -> Node {
    let m = split.branches.len();
    let mut tags: Vec<u32> = split.branches.iter().map(|(b, _)| b.tag).collect();
    tags.push(top.tag);
    let one = split.heights.iter().position(|h| *h == Height::One);
    let piece_tags: Vec<u32> = match one {
        None => tags,
        Some(q) => {
            // the var pieces take the branch tags in order, the 1-piece the edge tag
            let mut var_tags = tags[..m].iter().copied();
            (0..=m)
                .map(|r| {
                    if r == q {
                        tags[m]
                    } else {
                        var_tags.next().unwrap()
                    }
                })
                .collect()
        }
    };
    let mut node = top;
    node.height = Some(split.heights[m]);
    node.tag = piece_tags[m];
    for j in (0..m).rev() {
        let (b, side) = &split.branches[j];
        let mut children = b.children.clone();
        match side {
            Side::Left => children.push(node),
            Side::Right => children.insert(0, node),
        }
        node = Node {
            color: Color::Black,
            labels: Vec::new(),
            height: Some(split.heights[j]),
            children,
            tag: piece_tags[j],
        };
    }
    node
}

fn coordinates(parent: Family, t: &Tree) -> Vec<u32> {
    match parent {
        Family::Stable => all_edge_tags(t),
        _ => {
            let mut c = bipart_coordinates(t);
            for e in t.var_edges() {
                c.push(t.node(&e).unwrap().tag);
            }
            c
        }
    }
}

fn retag(n: &mut Node, next: &mut u32) {
    n.tag = *next;
    *next += 1;
    for c in &mut n.children {
        retag(c, next);
    }
}

/// `t ∘_i s` on basis trees of the family's operad.
pub fn compose_trees(family: Family, t: &Tree, i: usize, s: &Tree) -> Result<ChainElement> {
    let parent = family.parent();
    let n = t.n_white();
    let m = s.n_white() as u32;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { slot: i, arity: n });
    }
    let iu = i as u32;
    let mut t = t.relabeled(|l| if l > iu { l + m - 1 } else { l });
    let mut s = s.relabeled(|l| l + iu - 1);
    let mut next = 1;
    retag(t.root_mut(), &mut next);
    retag(s.root_mut(), &mut next);

    let vp = t
        .find_label(iu)
        .ok_or_else(|| Error::ArityMismatch(format!("no white vertex labelled {i}")))?;
    let v = t.node(&vp).unwrap().clone();
    if v.labels.len() != 1 {
        return Err(Error::ArityMismatch(format!(
            "vertex {i} carries several labels"
        )));
    }
    let (idx, pp) = vp.split_last().map(|(l, p)| (*l, p.to_vec())).unwrap();
    let branches = v.children.clone();

    // the inserted tree without its planting
    let s_planting = is_planting(s.root());
    let mut core = if parent == Family::Stable && s_planting {
        s.root().children[0].clone()
    } else {
        s.root().clone()
    };
    if parent != Family::Stable {
        core.height = None;
    }
    let merge_root = parent != Family::Stable;
    let slot_list = slots(&core, parent, false);

    let base_sign_order: Vec<u32> = {
        let mut o = coordinates(parent, &t);
        o.extend(coordinates(parent, &s));
        o
    };

    let mut out = ChainElement::zero(family);
    for dist in distributions(branches.len(), slot_list.len()) {
        let mut angles: HashMap<(Path, usize), Vec<Node>> = HashMap::new();
        let mut left: HashMap<Path, Vec<Node>> = HashMap::new();
        let mut right: HashMap<Path, Vec<Node>> = HashMap::new();
        for (b, &k) in branches.iter().zip(&dist) {
            match &slot_list[k] {
                Slot::Angle(p, j) => angles.entry((p.clone(), *j)).or_default().push(b.clone()),
                Slot::EdgeLeft(p) => left.entry(p.clone()).or_default().push(b.clone()),
                Slot::EdgeRight(p) => right.entry(p.clone()).or_default().push(b.clone()),
            }
        }
        let mut edges: Vec<Path> = left.keys().chain(right.keys()).cloned().collect();
        edges.sort();
        edges.dedup();
        // every combination of splits over the affected edges
        let mut combos: Vec<HashMap<Path, EdgeSplit>> = vec![HashMap::new()];
        for e in &edges {
            let h = core_node(&core, e).height.unwrap_or(Height::Var);
            let options = edge_splits(
                left.get(e).map_or(&[][..], Vec::as_slice),
                right.get(e).map_or(&[][..], Vec::as_slice),
                h,
            );
            let mut next_combos = Vec::new();
            for c in &combos {
                for o in &options {
                    let mut c2 = c.clone();
                    c2.insert(e.clone(), o.clone());
                    next_combos.push(c2);
                }
            }
            combos = next_combos;
        }
        for splits in combos {
            let built = rebuild(&core, &mut Vec::new(), &angles, &splits);
            let mut tt = t.clone();
            let root_planting = is_planting(tt.root());
            if merge_root {
                let p = tt.node_mut(&pp).unwrap();
                p.children.splice(idx..idx + 1, built.children);
            } else if pp.is_empty() && root_planting && built.is_black() {
                let mut r = built;
                r.tag = 0;
                r.height = None;
                *tt.root_mut() = r;
            } else {
                let mut r = built;
                r.tag = v.tag;
                r.height = None;
                tt.node_mut(&pp).unwrap().children[idx] = r;
            }
            let mut root = tt.into_root();
            root.normalize_heights(None);
            let tree = Tree::from_node_unchecked(root);
            if !parent.contains(&tree) {
                continue;
            }
            // the walk runs down the right side of an edge, reversing that coordinate
            // and var pieces above a piece of height 1 are measured from the top
            let reversed = splits
                .values()
                .flat_map(|sp| sp.branches.iter())
                .filter(|(_, side)| *side == Side::Right)
                .count()
                + splits
                    .values()
                    .map(|sp| {
                        sp.heights
                            .iter()
                            .position(|h| *h == Height::One)
                            .map_or(0, |q| sp.heights.len() - 1 - q)
                    })
                    .sum::<usize>();
            let sign = reorder_sign(&base_sign_order, &coordinates(parent, &tree))
                * if reversed % 2 == 0 { 1 } else { -1 };
            out.add_signed(tree, sign);
        }
    }
    Ok(out)
}

fn core_node<'a>(n: &'a Node, p: &[usize]) -> &'a Node {
    p.iter().fold(n, |n, &i| &n.children[i])
}

/// Bilinear extension of [`compose_trees`].
pub fn compose(a: &ChainElement, i: usize, b: &ChainElement) -> Result<ChainElement> {
    if a.family.parent() != b.family.parent() {
        return Err(Error::FamilyMismatch { expected: a.family });
    }
    let mut out = ChainElement::zero(a.family);
    for (ta, ca) in a.terms() {
        for (tb, cb) in b.terms() {
            let c = compose_trees(a.family, ta, i, tb)?;
            out.add_assign_scaled(&c, &(ca * cb));
        }
    }
    Ok(out)
}

/// Height composition; the same procedure as [`compose`] on trees with heights.
pub fn compose_ht(a: &ChainElement, i: usize, b: &ChainElement) -> Result<ChainElement> {
    if a.family.parent() != Family::Ht {
        return Err(Error::FamilyMismatch {
            expected: Family::Ht,
        });
    }
    compose(a, i, b)
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub family: Option<Family>,
    pub checks: usize,
    pub unit_checks: usize,
    pub sequential_checks: usize,
    pub parallel_checks: usize,
    pub derivation_checks: usize,
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "operad_axioms",
            "family": self.family.map(Family::name),
            "checks": self.checks,
            "unit": self.unit_checks,
            "sequential": self.sequential_checks,
            "parallel": self.parallel_checks,
            "derivation": self.derivation_checks,
            "passed": self.passed(),
            "failures": self.failures,
        })
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

fn one(f: Family, t: &Tree) -> ChainElement {
    ChainElement::from_tree(f, t.clone())
}

fn sign_of(k: usize) -> BigInt {
    if k.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Checks the derivation property of the differential for one pair.
pub fn check_derivation(f: Family, a: &Tree, i: usize, b: &Tree) -> Result<bool> {
    let (ca, cb) = (one(f, a), one(f, b));
    let lhs = differential(&compose(&ca, i, &cb)?);
    let r1 = compose(&differential(&ca), i, &cb)?;
    let r2 = compose(&ca, i, &differential(&cb))?.scale(&sign_of(dimension(f, a)));
    Ok(lhs == r1.add(&r2))
}

/// `(a ∘_i b) ∘_{i+j-1} c = a ∘_i (b ∘_j c)`.
pub fn check_sequential(
    f: Family,
    a: &Tree,
    i: usize,
    b: &Tree,
    j: usize,
    c: &Tree,
) -> Result<bool> {
    let (ca, cb, cc) = (one(f, a), one(f, b), one(f, c));
    let lhs = compose(&compose(&ca, i, &cb)?, i + j - 1, &cc)?;
    let rhs = compose(&ca, i, &compose(&cb, j, &cc)?)?;
    Ok(lhs == rhs)
}

/// `(a ∘_i b) ∘_{k+|b|-1} c = ± (a ∘_k c) ∘_i b` for `i < k`.
pub fn check_parallel(f: Family, a: &Tree, i: usize, b: &Tree, k: usize, c: &Tree) -> Result<bool> {
    let (ca, cb, cc) = (one(f, a), one(f, b), one(f, c));
    let lhs = compose(&compose(&ca, i, &cb)?, k + b.n_white() - 1, &cc)?;
    let rhs = compose(&compose(&ca, k, &cc)?, i, &cb)?;
    let s = sign_of(dimension(f, b) * dimension(f, c));
    Ok(lhs == rhs.scale(&s))
}

/// The unit of the operad: a single white vertex planted on a black root.
pub fn unit_tree() -> Tree {
    Tree::parse_compact("b(w1)").expect("unit tree")
}

/// Verifies the operad axioms and the derivation property: exhaustively on
/// trees of arity at most 2, then on `samples` random triples of arity at
/// most `n_cap` drawn with the given seed.
pub fn check_operad_axioms(
    family: Family,
    n_cap: usize,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let f = family.parent();
    let mut rep = AxiomReport {
        family: Some(family),
        ..AxiomReport::default()
    };
    let mut small: Vec<Tree> = Vec::new();
    for n in 1..=2 {
        small.extend(enumerate_family(family, n)?);
    }
    let unit = unit_tree();
    for a in &small {
        for i in 1..=a.n_white() {
            let ok = compose_trees(f, a, i, &unit)? == one(f, a);
            rep.record(ok, || format!("right unit fails for {a} at {i}"));
            rep.unit_checks += 1;
        }
        let ok = compose_trees(f, &unit, 1, a)? == one(f, a);
        rep.record(ok, || format!("left unit fails for {a}"));
        rep.unit_checks += 1;
    }
    let triple = |rep: &mut AxiomReport, a: &Tree, b: &Tree, c: &Tree| -> Result<()> {
        let (na, nb) = (a.n_white(), b.n_white());
        for i in 1..=na {
            let ok = check_derivation(f, a, i, b)?;
            rep.record(ok, || format!("derivation fails for {a} o_{i} {b}"));
            rep.derivation_checks += 1;
            for j in 1..=nb {
                let ok = check_sequential(f, a, i, b, j, c)?;
                rep.record(ok, || {
                    format!("sequential associativity fails for {a} o_{i} ({b} o_{j} {c})")
                });
                rep.sequential_checks += 1;
            }
            for k in i + 1..=na {
                let ok = check_parallel(f, a, i, b, k, c)?;
                rep.record(ok, || {
                    format!("parallel associativity fails for {a}, {b} at {i}, {c} at {k}")
                });
                rep.parallel_checks += 1;
            }
        }
        Ok(())
    };
    for a in &small {
        for b in &small {
            for c in &small {
                triple(&mut rep, a, b, c)?;
            }
        }
    }
    let mut pool: Vec<Tree> = Vec::new();
    for n in 1..=n_cap {
        pool.extend(enumerate_family(family, n)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = pool.choose(&mut rng).unwrap();
        let b = pool.choose(&mut rng).unwrap();
        let c = pool.choose(&mut rng).unwrap();
        triple(&mut rep, a, b, c)?;
    }
    Ok(rep)
}

#[derive(Clone, Debug, Default)]
pub struct PiReport {
    pub chain_map_checks: usize,
    pub section_checks: usize,
    pub morphism_checks: usize,
    pub failures: Vec<String>,
}

impl PiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": "pi_morphism",
            "chain_map": self.chain_map_checks,
            "section": self.section_checks,
            "morphism": self.morphism_checks,
            "passed": self.passed(),
            "failures": self.failures,
        })
    }
}

/// Verifies the projection on stable trees of arity at most `n_cap`. It
/// must commute with the differentials and invert the section on bipartite
/// trees. Compositions are checked exhaustively for arity 2 factors and on
/// `samples` random pairs of arity up to 3.
pub fn check_pi_morphism(n_cap: usize, samples: usize, seed: u64) -> Result<PiReport> {
    let mut rep = PiReport::default();
    let push = |rep: &mut PiReport, ok: bool, what: String| {
        if !ok && rep.failures.len() < 20 {
            rep.failures.push(what);
        }
    };
    for n in 1..=n_cap {
        for t in enumerate_family(Family::Stable, n)? {
            let ok =
                pi_inf_chain(&differential(&one(Family::Stable, &t))) == differential(&pi_inf(&t));
            push(&mut rep, ok, format!("chain map fails on {t}"));
            rep.chain_map_checks += 1;
        }
        for t in enumerate_family(Family::Bipart, n)? {
            let ok = pi_inf_chain(&i_inf_chain(&t)) == one(Family::Bipart, &t);
            push(&mut rep, ok, format!("section fails on {t}"));
            rep.section_checks += 1;
        }
    }
    let pair = |rep: &mut PiReport, a: &Tree, b: &Tree| -> Result<()> {
        for i in 1..=a.n_white() {
            let lhs = pi_inf_chain(&compose_trees(Family::Stable, a, i, b)?);
            let rhs = compose(&pi_inf(a), i, &pi_inf(b))?;
            push(rep, lhs == rhs, format!("morphism fails on {a} o_{i} {b}"));
            rep.morphism_checks += 1;
        }
        Ok(())
    };
    let small: Vec<Tree> = (1..=2)
        .map(|n| enumerate_family(Family::Stable, n))
        .collect::<Result<Vec<_>>>()?
        .concat();
    for a in &small {
        for b in &small {
            pair(&mut rep, a, b)?;
        }
    }
    let pool: Vec<Tree> = (1..=3)
        .map(|n| enumerate_family(Family::Stable, n))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = pool.choose(&mut rng).unwrap();
        let b = pool.choose(&mut rng).unwrap();
        pair(&mut rep, a, b)?;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::differential::diff_tree;
    use crate::enumerate::enumerate_family;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    #[test]
    fn fat_black_vertex_maps_to_zero() {
        assert!(pi_inf(&t("b(w1 w2 w3)")).is_zero());
        assert_eq!(pi_inf(&t("b(w1(w2))")).len(), 1);
    }

    #[test]
    fn pi_is_a_chain_map() {
        for n in 1..=3 {
            for tr in enumerate_family(Family::Stable, n).unwrap() {
                let lhs = pi_inf_chain(&diff_tree(Family::Stable, &tr));
                let rhs = crate::differential::differential(&pi_inf(&tr));
                assert_eq!(lhs, rhs, "{tr}");
            }
        }
    }

    #[test]
    fn pi_after_i_is_identity() {
        for n in 1..=3 {
            for tr in enumerate_family(Family::Bipart, n).unwrap() {
                let s = i_inf(&tr);
                assert!(Family::Stable.contains(&s), "{tr} -> {s}");
                assert_eq!(
                    pi_inf_chain(&i_inf_chain(&tr)),
                    ChainElement::from_tree(Family::Bipart, tr.clone())
                );
            }
        }
    }

    #[test]
    fn axioms_exhaustive_arity_two() {
        for f in [Family::Bipart, Family::Stable, Family::Ht] {
            let r = check_operad_axioms(f, 2, 0, 1).unwrap();
            println!("{f}: {} checks", r.checks);
            assert!(r.passed(), "{f}: {:#?}", r.failures);
        }
    }

    #[test]
    fn unit_and_arity() {
        let a = t("b(w1(b(w2)))");
        let u = unit_tree();
        assert_eq!(
            compose_trees(Family::Bipart, &a, 2, &u).unwrap(),
            ChainElement::from_tree(Family::Bipart, a.clone())
        );
        let c = compose_trees(Family::Bipart, &a, 1, &t("b(w1 w2)")).unwrap();
        for (x, _) in c.terms() {
            assert_eq!(x.n_white(), 3);
        }
        assert!(compose_trees(Family::Bipart, &a, 3, &u).is_err());
    }

    #[test]
    fn bipartite_terms_are_branch_distributions() {
        // one branch over vertex 1 and three white angles in the inserted tree
        let c = compose_trees(Family::Bipart, &t("b(w1(b(w2)))"), 1, &t("b(w1 w2)")).unwrap();
        assert_eq!(c.len(), 2);
        let c = compose_trees(Family::Bipart, &t("b(w1(b(w2)))"), 1, &t("b(w1(b(w2)))")).unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn glue_into_edges() {
        let a = t("b(w1(b(w2)))");
        // height v edge: one summand per side
        let v = compose_trees(Family::Ht, &a, 1, &t("b(b:v(w1 w2) w3)")).unwrap();
        assert_eq!(
            v.coefficient(&t("b(b:v(w4 b:v(w1 w2)) w3)"))
                .magnitude()
                .to_string(),
            "1"
        );
        // height 1 edge: both positions of the 1
        let one = compose_trees(Family::Ht, &a, 1, &t("b(b:1(w1 w2) w3)")).unwrap();
        assert_eq!(
            one.coefficient(&t("b(b:1(w4 b:v(w1 w2)) w3)"))
                .magnitude()
                .to_string(),
            "1"
        );
        assert_eq!(
            one.coefficient(&t("b(b:v(w4 b:1(w1 w2)) w3)"))
                .magnitude()
                .to_string(),
            "1"
        );
        // no branches: plain substitution
        let plain = compose_trees(Family::Ht, &t("b(w1 w2)"), 1, &t("b(b:1(w1 w2) w3)")).unwrap();
        assert_eq!(plain.len(), 1);
    }

    #[test]
    fn sub_operads_are_closed() {
        for (f, parent) in [(Family::Pp, Family::Stable), (Family::Cor, Family::Bipart)] {
            let small: Vec<Tree> = (1..=3)
                .flat_map(|n| enumerate_family(f, n).unwrap())
                .collect();
            for a in &small {
                for b in &small {
                    for i in 1..=a.n_white() {
                        for (x, _) in compose_trees(parent, a, i, b).unwrap().terms() {
                            assert!(f.contains(x), "{a} o_{i} {b} gives {x}");
                        }
                    }
                }
            }
        }
    }
}
