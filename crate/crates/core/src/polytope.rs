//! Associahedra and cyclohedra as cell complexes of trees.
//!
//! Each polytope has a coarse decomposition (its faces, indexed by planar
//! stable trees) and a cubical refinement indexed by trees with heights. The
//! faces are also described by bracketings: intervals of the word `1..n` for
//! the associahedron `K_n`, and tubes of the `n`-cycle for the cyclohedron
//! `W_n`. The bracketings are enumerated independently of the trees and serve
//! as a counting oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::chain::{dimension, ChainElement};
use crate::complex::CellComplex;
use crate::differential::diff_tree;
use crate::enumerate::enumerate_family_capped;
use crate::error::{Error, Result};
use crate::family::{is_planar_labelled, Family};
use crate::models::{Refinement, RefinementReport};
use crate::tree::{Height, Node, Path, Tree};

/// Largest `n` for the associahedron complexes.
pub const ASSOC_CAP: usize = 6;
/// Largest `n` for the cyclohedron complexes.
pub const CYCLO_CAP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Coarse,
    Cubical,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Model> {
        match s.to_ascii_lowercase().as_str() {
            "coarse" => Ok(Model::Coarse),
            "cubical" => Ok(Model::Cubical),
            _ => Err(Error::Parse(format!(
                "unknown model {s:?} (expected coarse or cubical)"
            ))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Coarse => "coarse",
            Model::Cubical => "cubical",
        })
    }
}

fn complex_of(name: String, family: Family, trees: Vec<Tree>) -> Result<CellComplex> {
    CellComplex::from_cells(name, family, trees, |t| diff_tree(family, t))
}

fn planar_pp(n: usize) -> Result<Vec<Tree>> {
    Ok(enumerate_family_capped(Family::Pp, n, ASSOC_CAP)?
        .into_iter()
        .filter(is_planar_labelled)
        .collect())
}

/// The associahedron `K_n`, `n` the number of inputs.
pub fn assoc_complex(n: usize, model: Model) -> Result<CellComplex> {
    if n < 2 {
        return Err(Error::Constraint("the associahedron needs n >= 2".into()));
    }
    match model {
        Model::Coarse => complex_of(format!("K{n} coarse"), Family::Pp, planar_pp(n)?),
        Model::Cubical => complex_of(
            format!("K{n} cubical"),
            Family::AssHt,
            enumerate_family_capped(Family::AssHt, n, ASSOC_CAP)?,
        ),
    }
}

/// The cyclohedron `W_n`.
pub fn cyclo_complex(n: usize, model: Model) -> Result<CellComplex> {
    let (f, name) = match model {
        Model::Coarse => (Family::Cyclo, format!("W{n} coarse")),
        Model::Cubical => (Family::CycHt, format!("W{n} cubical")),
    };
    complex_of(name, f, enumerate_family_capped(f, n, CYCLO_CAP)?)
}

/// The cubical complex refines the coarse one.
pub fn refinement_check(cyclic: bool, n: usize) -> Result<RefinementReport> {
    let r = if cyclic {
        Refinement::between(Family::Cyclo, Family::CycHt, n, CYCLO_CAP)?
    } else {
        // only the planar labelling is a cell of K_n
        Refinement::between_where(Family::Pp, Family::AssHt, n, ASSOC_CAP, is_planar_labelled)?
    };
    r.check()
}

/// The simplex `Delta^n` as the faces of a white vertex of arity `n`.
pub fn simplex_complex(n: usize) -> Result<CellComplex> {
    let mut children = Vec::new();
    for l in 2..=n as u32 + 1 {
        children.push(Node::black(vec![Node::leaf(l)]));
    }
    let top = Tree::new(Node::black(vec![Node::white(1, children)]))?;
    let mut cells = BTreeSet::new();
    let mut queue = vec![top];
    while let Some(t) = queue.pop() {
        if cells.insert(t.clone()) {
            queue.extend(
                diff_tree(Family::Bipart, &t)
                    .terms()
                    .map(|(s, _)| s.clone()),
            );
        }
    }
    complex_of(
        format!("Delta{n}"),
        Family::Bipart,
        cells.into_iter().collect(),
    )
}

// ---------------------------------------------------------------------------
// Bracketings

/// A face of `K_n` (linear) or `W_n` (cyclic).
///
/// Linear brackets are leaf intervals `(i, j)`, `1 <= i < j <= n`, excluding
/// the whole word. Cyclic brackets are tubes of the `n`-cycle whose vertices
/// are the gaps between consecutive points `1, ..., n` on a circle: gap `i`
/// lies between points `i` and `i + 1` (mod `n`). A tube is stored as
/// `(first gap, number of gaps)`, with at most `n - 1` gaps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bracketing {
    pub n: usize,
    pub cyclic: bool,
    pub brackets: BTreeSet<(usize, usize)>,
}

impl Bracketing {
    pub fn dimension(&self) -> usize {
        let top = if self.cyclic { self.n - 1 } else { self.n - 2 };
        top - self.brackets.len()
    }

    fn gaps(&self, b: (usize, usize)) -> BTreeSet<usize> {
        (0..b.1).map(|k| (b.0 - 1 + k) % self.n + 1).collect()
    }

    fn compatible(&self, a: (usize, usize), b: (usize, usize)) -> bool {
        if self.cyclic {
            let (ga, gb) = (self.gaps(a), self.gaps(b));
            if ga.is_subset(&gb) || gb.is_subset(&ga) {
                return true;
            }
            let n = self.n;
            ga.is_disjoint(&gb)
                && !ga
                    .iter()
                    .any(|&g| gb.contains(&(g % n + 1)) || gb.contains(&((g + n - 2) % n + 1)))
        } else {
            let nested = (a.0 <= b.0 && b.1 <= a.1) || (b.0 <= a.0 && a.1 <= b.1);
            nested || a.1 < b.0 || b.1 < a.0
        }
    }

    pub fn is_valid(&self) -> bool {
        let bs: Vec<_> = self.brackets.iter().copied().collect();
        bs.iter()
            .all(|&b| candidates(self.n, self.cyclic).contains(&b))
            && bs
                .iter()
                .enumerate()
                .all(|(i, &a)| bs[i + 1..].iter().all(|&b| self.compatible(a, b)))
    }
}

impl fmt::Display for Bracketing {
    /// Linear bracketings print as words, `((a1a2)a3)`; cyclic ones as the
    /// list of tubes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cyclic {
            let tubes: Vec<String> = self
                .brackets
                .iter()
                .map(|&b| {
                    format!(
                        "{{{}}}",
                        self.gaps(b)
                            .iter()
                            .map(|g| format!("g{g}"))
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            return write!(f, "[{}]", tubes.join(" "));
        }
        let mut s = String::from("(");
        for i in 1..=self.n {
            for _ in self.brackets.iter().filter(|b| b.0 == i) {
                s.push('(');
            }
            s.push_str(&format!("a{i}"));
            for _ in self.brackets.iter().filter(|b| b.1 == i) {
                s.push(')');
            }
        }
        s.push(')');
        f.write_str(&s)
    }
}

fn candidates(n: usize, cyclic: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if cyclic {
        for len in 1..n {
            for start in 1..=n {
                out.push((start, len));
            }
        }
    } else {
        for i in 1..=n {
            for j in i + 1..=n {
                if !(i == 1 && j == n) {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

/// Every bracketing of the word (or cycle) of length `n`.
pub fn enumerate_bracketings(n: usize, cyclic: bool) -> Vec<Bracketing> {
    let cands = candidates(n, cyclic);
    let mut out = Vec::new();
    let mut cur = Bracketing {
        n,
        cyclic,
        brackets: BTreeSet::new(),
    };
    fn go(i: usize, cands: &[(usize, usize)], cur: &mut Bracketing, out: &mut Vec<Bracketing>) {
        if i == cands.len() {
            out.push(cur.clone());
            return;
        }
        go(i + 1, cands, cur, out);
        let c = cands[i];
        if cur.brackets.iter().all(|&b| cur.compatible(b, c)) {
            cur.brackets.insert(c);
            go(i + 1, cands, cur, out);
            cur.brackets.remove(&c);
        }
    }
    go(0, &cands, &mut cur, &mut out);
    out
}

/// Face counts by dimension, from bracketings alone.
pub fn bracketing_f_vector(n: usize, cyclic: bool) -> Vec<usize> {
    let top = if cyclic { n - 1 } else { n - 2 };
    let mut f = vec![0; top + 1];
    for b in enumerate_bracketings(n, cyclic) {
        f[b.dimension()] += 1;
    }
    f
}

fn labels_below(n: &Node, out: &mut Vec<u32>) {
    out.extend_from_slice(&n.labels);
    for c in &n.children {
        labels_below(c, out);
    }
}

/// The bracketing of a coarse cell of `K_n` (planar stable tree with white
/// leaves) or `W_n` (cyclohedron tree).
pub fn to_bracketing(t: &Tree, cyclic: bool) -> Result<Bracketing> {
    let n = t.n_white();
    if !cyclic {
        if !(Family::Pp.contains(t) && is_planar_labelled(t)) {
            return Err(Error::FamilyMismatch {
                expected: Family::Pp,
            });
        }
        let mut brackets = BTreeSet::new();
        t.for_each(|p, v| {
            if !p.is_empty() && v.is_black() {
                let mut ls = Vec::new();
                labels_below(v, &mut ls);
                brackets.insert((
                    *ls.iter().min().unwrap() as usize,
                    *ls.iter().max().unwrap() as usize,
                ));
            }
        });
        return Ok(Bracketing {
            n,
            cyclic: false,
            brackets,
        });
    }
    if !Family::Cyclo.contains(t) {
        return Err(Error::FamilyMismatch {
            expected: Family::Cyclo,
        });
    }
    // Read the tree as rooted at label 1. The old root becomes the letter
    // a1 on the circle and label 1 marks where the circle is cut: just after
    // the largest label that precedes it in planar order.
    let one = t.find_label(1).expect("cyclohedron trees carry label 1");
    let mut order = Vec::new();
    labels_below(t.root(), &mut order);
    let cut = order
        .iter()
        .take_while(|&&l| l != 1)
        .max()
        .map_or(1, |&m| m as usize);
    let mut brackets = BTreeSet::new();
    let mut err = None;
    t.for_each(|p, v| {
        if !v.is_black() {
            return;
        }
        let tube = if one.starts_with(p) {
            // the letters on the far side of v from label 1
            let mut inner = Vec::new();
            labels_below(&v.children[one[p.len()]], &mut inner);
            let outside: Vec<usize> = (2..=n).filter(|l| !inner.contains(&(*l as u32))).collect();
            if outside.len() + 1 == n {
                (cut % n + 1, n - 1)
            } else if outside.is_empty() {
                return;
            } else {
                // an arc m..n, 1, 2..j of the circle
                let want: BTreeSet<usize> = outside.iter().copied().chain([1]).collect();
                let arc = |s: usize| {
                    (0..=outside.len())
                        .map(|k| (s - 1 + k) % n + 1)
                        .collect::<BTreeSet<_>>()
                };
                let Some(start) = (1..=n).find(|&s| arc(s) == want) else {
                    err = Some(Error::Constraint(format!(
                        "the letters {want:?} of {t} are not an arc"
                    )));
                    return;
                };
                (start, outside.len())
            }
        } else {
            let mut ls = Vec::new();
            labels_below(v, &mut ls);
            let a = *ls.iter().min().unwrap() as usize;
            let b = *ls.iter().max().unwrap() as usize;
            if b - a + 1 != ls.len() {
                err = Some(Error::Constraint(format!(
                    "cluster {ls:?} of {t} is not an interval"
                )));
            }
            (a, b - a)
        };
        // W_1 is a point and has no tubes
        if tube.1 > 0 {
            brackets.insert(tube);
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Bracketing {
        n,
        cyclic: true,
        brackets,
    })
}

/// The coarse cell of a bracketing.
pub fn from_bracketing(b: &Bracketing) -> Result<Tree> {
    if !b.is_valid() {
        return Err(Error::Constraint(format!("incompatible brackets {b}")));
    }
    if b.cyclic {
        for t in enumerate_family_capped(Family::Cyclo, b.n, CYCLO_CAP)? {
            if &to_bracketing(&t, true)? == b {
                return Ok(t);
            }
        }
        return Err(Error::Constraint(format!("no cell for {b}")));
    }
    fn build(i: usize, j: usize, bs: &BTreeSet<(usize, usize)>) -> Node {
        if i == j {
            return Node::leaf(i as u32);
        }
        let mut children = Vec::new();
        let mut k = i;
        while k <= j {
            // the largest bracket starting at k strictly inside [i, j]
            let inner = bs
                .iter()
                .filter(|&&(a, c)| a == k && c <= j && (a, c) != (i, j))
                .map(|&(_, c)| c)
                .max();
            match inner {
                Some(c) => {
                    children.push(build(k, c, bs));
                    k = c + 1;
                }
                None => {
                    children.push(Node::leaf(k as u32));
                    k += 1;
                }
            }
        }
        Node::black(children)
    }
    Tree::new(build(1, b.n, &b.brackets))
}

// ---------------------------------------------------------------------------
// Cells of the cubical cyclohedron

fn potentially_unstable(t: &Tree, p: &Path) -> bool {
    let v = t.node(p).unwrap();
    let parent_white = p
        .split_last()
        .is_some_and(|(_, q)| t.node(q).unwrap().is_white());
    v.is_black() && (parent_white || v.children.iter().any(|c| c.is_white() && !c.is_leaf()))
}

fn has_internal_white(t: &Tree) -> bool {
    let mut found = false;
    t.for_each(|_, v| found |= v.is_white() && !v.is_leaf());
    found
}

/// Ways a cell of the cubical cyclohedron fails the shape of a top cell:
/// `'1'` for a black edge of height 1, and `'b'..'e'` for the vertex defects
/// (an extra flag at a vertex).
fn defects(t: &Tree) -> Vec<char> {
    let mut out = Vec::new();
    t.for_each(|p, v| {
        if v.height == Some(Height::One) {
            out.push('1');
        }
        if !v.is_black() {
            return;
        }
        let pu = potentially_unstable(t, p);
        let allowed = if pu { 1 } else { 2 };
        if v.arity() > allowed {
            let kind = match (p.is_empty(), pu) {
                (false, true) => 'b',
                (false, false) => 'c',
                (true, false) => 'd',
                (true, true) => 'e',
            };
            for _ in allowed..v.arity() {
                out.push(kind);
            }
        }
    });
    out
}

/// Whether a cell has the shape of a top cell of the cubical cyclohedron.
pub fn is_top_shape(t: &Tree) -> bool {
    has_internal_white(t) && defects(t).is_empty() && t.black_edges().len() == t.var_edges().len()
}

/// Type `'a'..'f'` of a codimension-one cell of the cubical cyclohedron.
pub fn codim_one_type(t: &Tree) -> Option<char> {
    let d = defects(t);
    if !has_internal_white(t) {
        return d.is_empty().then_some('f');
    }
    match d.as_slice() {
        ['1'] => Some('a'),
        [k] => Some(*k),
        _ => None,
    }
}

fn cofaces(c: &CellComplex, d: usize) -> Vec<Vec<(usize, BigInt)>> {
    let mut out = vec![Vec::new(); c.cells.get(d).map_or(0, Vec::len)];
    if let Some(cols) = c.boundary.get(d + 1) {
        for (j, col) in cols.iter().enumerate() {
            for (i, k) in col {
                out[*i].push((j, k.clone()));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct IncidenceReport {
    pub n: usize,
    pub top_cells: usize,
    pub codim_one: BTreeMap<char, usize>,
    pub failures: Vec<String>,
}

impl IncidenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "top_cells": self.top_cells,
            "codim_one": self.codim_one.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "passed": self.passed(),
            "failures": self.failures,
        })
    }
}

/// Checks the incidences of the cubical cyclohedron `c`. Top cells must have
/// the right dimension and shape, and so must the 0-cells. Every
/// codimension-one cell is classified by type and must bound the expected
/// number of top cells.
pub fn incidence_check(c: &CellComplex) -> IncidenceReport {
    let n = c.cells.iter().flatten().next().map_or(0, Tree::n_white);
    let mut failures = Vec::new();
    let top = c.top_dimension().unwrap_or(0);
    if top + 1 != n {
        failures.push(format!("dimension {top}, expected {}", n.saturating_sub(1)));
    }
    for t in &c.cells[top] {
        if !is_top_shape(t) {
            failures.push(format!("top cell {t} does not have the top shape"));
        }
    }
    for (d, cells) in c.cells.iter().enumerate() {
        for t in cells {
            if d < top && is_top_shape(t) {
                failures.push(format!("{t} has the top shape in dimension {d}"));
            }
        }
    }
    for t in &c.cells[0] {
        let mut leaves = true;
        t.for_each(|_, v| leaves &= !v.is_white() || v.is_leaf());
        if !leaves || !t.var_edges().is_empty() {
            failures.push(format!(
                "0-cell {t} has an internal white vertex or an edge of height v"
            ));
        }
    }
    // every chain of faces from a top cell to a vertex has n cells
    for d in 0..top {
        for (i, co) in cofaces(c, d).iter().enumerate() {
            if co.is_empty() {
                failures.push(format!(
                    "{} (dim {d}) is not a face of any cell",
                    c.cells[d][i]
                ));
            }
        }
    }
    for d in 1..=top {
        for (i, col) in c.boundary[d].iter().enumerate() {
            if col.is_empty() {
                failures.push(format!("{} (dim {d}) has empty boundary", c.cells[d][i]));
            }
        }
    }
    let mut counts = BTreeMap::new();
    if top >= 1 {
        for (i, co) in cofaces(c, top - 1).iter().enumerate() {
            let t = &c.cells[top - 1][i];
            let Some(kind) = codim_one_type(t) else {
                failures.push(format!("{t}: codimension-one cell of no type"));
                continue;
            };
            *counts.entry(kind).or_insert(0) += 1;
            let expected = if matches!(kind, 'a' | 'f') { 1 } else { 2 };
            if co.len() != expected || co.iter().any(|(_, k)| !k.abs().is_one()) {
                failures.push(format!(
                    "{t}: type ({kind}) bounds {} top cells, expected {expected}",
                    co.len()
                ));
            }
        }
    }
    IncidenceReport {
        n,
        top_cells: c.cells[top].len(),
        codim_one: counts,
        failures,
    }
}

#[derive(Clone, Debug)]
pub struct BoundarySumReport {
    pub n: usize,
    /// Orientation signs of the top cells.
    pub orientation: Vec<i32>,
    /// Surviving terms of the boundary of the oriented sum, by type.
    pub surviving: BTreeMap<char, usize>,
    /// Facets of the coarse polytope covered by the surviving terms.
    pub facets: usize,
    pub failures: Vec<String>,
}

impl BoundarySumReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "orientation": self.orientation,
            "surviving": self.surviving.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "facets": self.facets,
            "passed": self.passed(),
            "failures": self.failures,
        })
    }
}

/// Orients the top cells of the cubical cyclohedron so that the interior
/// codimension-one cells cancel, then checks that the boundary of the sum
/// consists of the cells of types (a) and (f), covering the facets of `W_n`.
pub fn boundary_sum_check(c: &CellComplex) -> Result<BoundarySumReport> {
    let n = c.cells.iter().flatten().next().map_or(0, Tree::n_white);
    let mut failures = Vec::new();
    let Some(top) = c.top_dimension().filter(|&d| d > 0) else {
        return Ok(BoundarySumReport {
            n,
            orientation: vec![1],
            surviving: BTreeMap::new(),
            facets: 0,
            failures,
        });
    };
    let co = cofaces(c, top - 1);
    let tops = c.cells[top].len();
    let mut sign = vec![0i32; tops];
    sign[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(j) = queue.pop_front() {
        for (i, k) in &c.boundary[top][j] {
            if let [(a, ka), (b, kb)] = co[*i].as_slice() {
                let (other, ko) = if *a == j { (*b, kb) } else { (*a, ka) };
                // sign[j] * k + sign[other] * ko = 0
                let want = if (k * sign[j]) == -(ko.clone()) {
                    1
                } else {
                    -1
                };
                if sign[other] == 0 {
                    sign[other] = want;
                    queue.push_back(other);
                } else if sign[other] != want {
                    failures.push(format!("orientation clash at {}", c.cells[top - 1][*i]));
                }
            }
        }
    }
    if sign.contains(&0) {
        failures.push("top cells are not connected through interior faces".into());
    }
    let mut boundary = ChainElement::zero(c.family);
    for (j, s) in sign.iter().enumerate() {
        boundary.add_assign_scaled(&c.boundary_chain(top, j), &BigInt::from(*s));
    }
    let mut surviving = BTreeMap::new();
    for (t, k) in boundary.terms() {
        let kind = codim_one_type(t);
        match kind {
            Some(x @ ('a' | 'f')) if k.abs().is_one() => *surviving.entry(x).or_insert(0) += 1,
            _ => failures.push(format!("{t} survives with coefficient {k} (type {kind:?})")),
        }
    }
    for (i, cells) in co.iter().enumerate() {
        let t = &c.cells[top - 1][i];
        if cells.len() == 1 && boundary.coefficient(t).is_zero() {
            failures.push(format!("boundary cell {t} cancelled"));
        }
    }
    let r = Refinement::between(Family::Cyclo, Family::CycHt, n, CYCLO_CAP)?;
    let facets: BTreeSet<&Tree> = boundary
        .terms()
        .filter_map(|(t, _)| r.refine.get(t))
        .collect();
    for f in &facets {
        if dimension(Family::Cyclo, f) + 2 != n {
            failures.push(format!("surviving terms refine to {f}, not a facet"));
        }
    }
    Ok(BoundarySumReport {
        n,
        orientation: sign,
        surviving,
        facets: facets.len(),
        failures,
    })
}

// ---------------------------------------------------------------------------
// Blow-up

/// A product `Delta^simplex x I^cube`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub simplex: usize,
    pub cube: usize,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sup = |k: usize| -> String {
            const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
            k.to_string()
                .chars()
                .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
                .collect()
        };
        match (self.simplex, self.cube) {
            (s, 0) => write!(f, "Δ{}", sup(s)),
            (1, c) if c >= 2 => write!(f, "I{}", sup(c + 1)),
            (0, 1) => write!(f, "I"),
            (0, c) => write!(f, "I{}", sup(c)),
            (s, 1) => write!(f, "Δ{}×I", sup(s)),
            (s, c) => write!(f, "Δ{}×I{}", sup(s), sup(c)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub depth: usize,
    pub shape: Shape,
    pub count: usize,
}

/// Groups the top cells of the cubical `W_n` by depth, the number of edges
/// of height `v`. The special white vertex of a cell of depth `d` has arity
/// `n - 1 - d`, so its cell is `Delta^(n-1-d) x I^d`.
pub fn blowup_stages(n: usize) -> Result<Vec<Stage>> {
    let c = cyclo_complex(n, Model::Cubical)?;
    let top = c.top_dimension().unwrap_or(0);
    let mut by_depth: BTreeMap<usize, (Shape, usize)> = BTreeMap::new();
    for t in &c.cells[top] {
        let depth = t.var_edges().len();
        let one = t.find_label(1).expect("label 1");
        let arity = t.node(&one).unwrap().arity();
        if depth + arity + 1 != n {
            return Err(Error::Constraint(format!(
                "{t}: depth {depth} plus valence {} is not {n}",
                arity + 1
            )));
        }
        let e = by_depth.entry(depth).or_insert((
            Shape {
                simplex: arity,
                cube: depth,
            },
            0,
        ));
        e.1 += 1;
    }
    Ok(by_depth
        .into_iter()
        .map(|(depth, (shape, count))| Stage {
            depth,
            shape,
            count,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// PL coordinates

/// Weights for a point of a cell: one value per edge of height `v` and one
/// list of angle weights per white vertex of positive arity, indexed by the
/// path of the vertex. Angle `j` of a vertex with children `c1..ck` lies
/// before `c(j+1)`; the last one closes the circle.
#[derive(Clone, Debug, Default)]
pub struct Weights {
    pub edges: HashMap<Path, f64>,
    pub angles: HashMap<Path, Vec<f64>>,
}

/// Tolerance for the angle-sum condition.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

impl Weights {
    /// The barycentre of the cell of `t`.
    pub fn barycentre(t: &Tree) -> Weights {
        let mut w = Weights::default();
        for e in t.var_edges() {
            w.edges.insert(e, 0.5);
        }
        t.for_each(|p, v| {
            if v.is_white() && v.arity() > 0 {
                let k = v.arity() + 1;
                w.angles.insert(p.clone(), vec![1.0 / k as f64; k]);
            }
        });
        w
    }
}

/// A coordinate name: black edges are named by the labels above them, and
/// for every white vertex `v` and label `l` above it the position on `v` of
/// the branch holding `l`.
fn edge_key(ls: &[u32]) -> String {
    format!(
        "e{{{}}}",
        ls.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    )
}

/// Embeds a point of the cell of `t` (a tree with heights, or a coarse tree
/// read with all black edges of height 1) into coordinates indexed by names
/// shared across cells. Weights may be 0 on the closed cell; a var edge of
/// weight 0 gives the same point as the contracted tree.
pub fn pl_coordinates(t: &Tree, w: &Weights) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let mut err = None;
    t.for_each(|p, v| {
        if !p.is_empty() && v.is_black() && t.node(&p[..p.len() - 1]).unwrap().is_black() {
            let x = match v.height {
                Some(Height::Var) => match w.edges.get(p) {
                    Some(&x) if (0.0..=1.0).contains(&x) => x,
                    Some(&x) => {
                        err = Some(Error::Constraint(format!("edge weight {x} outside [0, 1]")));
                        x
                    }
                    None => {
                        err = Some(Error::Constraint(format!(
                            "no weight for the edge at {p:?}"
                        )));
                        0.0
                    }
                },
                _ => 1.0,
            };
            if x > 0.0 {
                let mut ls = Vec::new();
                labels_below(v, &mut ls);
                ls.sort_unstable();
                out.insert(edge_key(&ls), x);
            }
        }
        if v.is_white() && v.arity() > 0 {
            let Some(a) = w.angles.get(p) else {
                err = Some(Error::Constraint(format!("no angle weights at {p:?}")));
                return;
            };
            if a.len() != v.arity() + 1 || a.iter().any(|x| !(0.0..=1.0).contains(x)) {
                err = Some(Error::Constraint(format!(
                    "bad angle weights {a:?} at {p:?}"
                )));
                return;
            }
            let sum: f64 = a.iter().sum();
            if (sum - 1.0).abs() > ANGLE_TOLERANCE {
                err = Some(Error::Constraint(format!(
                    "angle weights at {p:?} sum to {sum}"
                )));
                return;
            }
            let own = v.labels[0];
            let mut pos = 0.0;
            for (j, c) in v.children.iter().enumerate() {
                pos += a[j];
                let mut ls = Vec::new();
                labels_below(c, &mut ls);
                for l in ls {
                    out.insert(format!("p{own}:{l}"), pos);
                }
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// The cells of a complex as an `nOFF` file: the 0-cells at their PL
/// coordinates and the 2-cells as polygons through their vertices.
pub fn to_off(c: &CellComplex) -> Result<String> {
    let verts = c.cells.first().cloned().unwrap_or_default();
    let coords: Vec<BTreeMap<String, f64>> = verts
        .iter()
        .map(|t| pl_coordinates(t, &Weights::barycentre(t)))
        .collect::<Result<_>>()?;
    let names: BTreeSet<&String> = coords.iter().flat_map(|m| m.keys()).collect();
    let names: Vec<&String> = names.into_iter().collect();
    let ends = |e: usize| -> Vec<usize> {
        c.boundary
            .get(1)
            .map_or(Vec::new(), |b| b[e].iter().map(|x| x.0).collect())
    };
    let mut faces = Vec::new();
    if let Some(cols) = c.boundary.get(2) {
        for col in cols {
            let edges: Vec<Vec<usize>> = col.iter().map(|(e, _)| ends(*e)).collect();
            if edges.iter().any(|e| e.len() != 2) {
                return Err(Error::Constraint(
                    "a 2-cell has an edge without two ends".into(),
                ));
            }
            let mut cycle = vec![edges[0][0], edges[0][1]];
            let mut used = vec![false; edges.len()];
            used[0] = true;
            while cycle.len() < edges.len() {
                let last = *cycle.last().unwrap();
                let Some(k) = (0..edges.len()).find(|&k| !used[k] && edges[k].contains(&last))
                else {
                    return Err(Error::Constraint(
                        "the boundary of a 2-cell is not a cycle".into(),
                    ));
                };
                used[k] = true;
                cycle.push(if edges[k][0] == last {
                    edges[k][1]
                } else {
                    edges[k][0]
                });
            }
            faces.push(cycle);
        }
    }
    let edges = c.cells.get(1).map_or(0, Vec::len);
    let mut s = format!(
        "nOFF\n{}\n{} {} {}\n",
        names.len(),
        verts.len(),
        faces.len(),
        edges
    );
    for m in &coords {
        let row: Vec<String> = names
            .iter()
            .map(|k| format!("{}", m.get(*k).copied().unwrap_or(0.0)))
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    for f in &faces {
        s.push_str(&format!(
            "{} {}\n",
            f.len(),
            f.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
        ));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    #[test]
    fn associahedra() {
        assert_eq!(
            assoc_complex(4, Model::Coarse).unwrap().f_vector(),
            vec![5, 5, 1]
        );
        assert_eq!(
            assoc_complex(5, Model::Coarse).unwrap().f_vector(),
            vec![14, 21, 9, 1]
        );
        let cube = assoc_complex(4, Model::Cubical).unwrap();
        assert_eq!(cube.f_vector()[2], 5);
        assert_eq!(cube.euler_characteristic(), 1);
        for n in 2..=5 {
            assert_eq!(
                assoc_complex(n, Model::Coarse).unwrap().f_vector(),
                bracketing_f_vector(n, false)
            );
        }
    }

    #[test]
    fn cyclohedra() {
        assert_eq!(
            cyclo_complex(2, Model::Coarse).unwrap().f_vector(),
            vec![2, 1]
        );
        assert_eq!(
            cyclo_complex(3, Model::Coarse).unwrap().f_vector(),
            vec![6, 6, 1]
        );
        assert_eq!(
            cyclo_complex(4, Model::Coarse).unwrap().f_vector(),
            vec![20, 30, 12, 1]
        );
        for n in 1..=4 {
            let c = cyclo_complex(n, Model::Cubical).unwrap();
            assert_eq!(c.euler_characteristic(), 1);
            assert!(c.d_squared_is_zero());
        }
    }

    #[test]
    fn bracketing_words() {
        let b = to_bracketing(&t("b(b(w1 w2) w3)"), false).unwrap();
        assert_eq!(b.to_string(), "((a1a2)a3)");
        assert_eq!(from_bracketing(&b).unwrap(), t("b(b(w1 w2) w3)"));
        assert!(to_bracketing(&t("b(w1 w2 w3 w4)"), false)
            .unwrap()
            .brackets
            .is_empty());
        for s in planar_pp(4).unwrap() {
            assert_eq!(
                from_bracketing(&to_bracketing(&s, false).unwrap()).unwrap(),
                s
            );
        }
    }

    #[test]
    fn tubings_match_cyclohedron_faces() {
        for n in 1..=4 {
            let trees = enumerate_family_capped(Family::Cyclo, n, CYCLO_CAP).unwrap();
            let images: BTreeSet<Bracketing> = trees
                .iter()
                .map(|s| to_bracketing(s, true).unwrap())
                .collect();
            assert_eq!(images.len(), trees.len());
            assert!(images.iter().all(Bracketing::is_valid));
            for s in &trees {
                let b = to_bracketing(s, true).unwrap();
                assert_eq!(b.dimension(), dimension(Family::Cyclo, s), "{s}");
                // faces add exactly one tube
                for (f, _) in diff_tree(Family::Cyclo, s).terms() {
                    let bf = to_bracketing(f, true).unwrap();
                    assert!(
                        b.brackets.is_subset(&bf.brackets)
                            && bf.brackets.len() == b.brackets.len() + 1,
                        "{s} -> {f}"
                    );
                }
            }
        }
    }

    #[test]
    fn cyclohedron_incidences() {
        for n in 2..=4 {
            let c = cyclo_complex(n, Model::Cubical).unwrap();
            let r = incidence_check(&c);
            assert!(r.passed(), "{:#}", r.to_json());
        }
    }

    #[test]
    fn boundary_of_the_oriented_sum() {
        let r = boundary_sum_check(&cyclo_complex(3, Model::Cubical).unwrap()).unwrap();
        assert!(r.passed(), "{:#}", r.to_json());
        assert_eq!(r.surviving.get(&'a'), Some(&3));
        assert_eq!(r.facets, 6);
        let r = boundary_sum_check(&cyclo_complex(4, Model::Cubical).unwrap()).unwrap();
        assert!(r.passed(), "{:#}", r.to_json());
        assert_eq!(r.facets, 12);
    }

    #[test]
    fn blowup() {
        let s = |k, c| Shape {
            simplex: k,
            cube: c,
        };
        assert_eq!(
            blowup_stages(3).unwrap(),
            vec![
                Stage {
                    depth: 0,
                    shape: s(2, 0),
                    count: 1
                },
                Stage {
                    depth: 1,
                    shape: s(1, 1),
                    count: 3
                }
            ]
        );
        let w4 = blowup_stages(4).unwrap();
        assert_eq!(
            w4.iter().map(|x| (x.depth, x.count)).collect::<Vec<_>>(),
            vec![(0, 1), (1, 4), (2, 10)]
        );
        assert_eq!(w4[2].shape.to_string(), "I³");
        assert_eq!(w4[1].shape.to_string(), "Δ²×I");
    }

    #[test]
    fn refinements() {
        for n in 2..=4 {
            let r = refinement_check(false, n).unwrap();
            assert!(
                r.passed() && r.boundary_violations.is_empty(),
                "{:#}",
                r.to_json()
            );
            let r = refinement_check(true, n).unwrap();
            assert!(
                r.passed() && r.boundary_violations.is_empty(),
                "{:#}",
                r.to_json()
            );
        }
    }

    #[test]
    fn pl_points() {
        let v = t("b(b:1(w1 w2) w3)");
        let x = pl_coordinates(&v, &Weights::default()).unwrap();
        assert!(x.values().all(|&c| c == 0.0 || c == 1.0));
        // a square of the cubical K_4 and one of its faces agree on the face
        let sq = t("b(b:v(b:v(w1 w2) w3) w4)");
        let mut w = Weights::default();
        let es = sq.var_edges();
        w.edges.insert(es[0].clone(), 0.3);
        w.edges.insert(es[1].clone(), 0.0);
        let face = t("b(b:v(w1 w2 w3) w4)");
        let mut wf = Weights::default();
        wf.edges.insert(face.var_edges()[0].clone(), 0.3);
        assert_eq!(
            pl_coordinates(&sq, &w).unwrap(),
            pl_coordinates(&face, &wf).unwrap()
        );
        let star = t("b(w1(b(w2) b(w3)))");
        let mut bad = Weights::default();
        bad.angles.insert(vec![0], vec![0.5, 0.5, 0.5]);
        assert!(pl_coordinates(&star, &bad).is_err());
    }

    #[test]
    fn simplices() {
        assert_eq!(simplex_complex(2).unwrap().f_vector(), vec![3, 3, 1]);
        assert_eq!(simplex_complex(3).unwrap().f_vector(), vec![4, 6, 4, 1]);
    }

    #[test]
    fn off_export() {
        let off = to_off(&assoc_complex(4, Model::Coarse).unwrap()).unwrap();
        assert!(off.starts_with("nOFF"));
        assert_eq!(
            off.lines()
                .nth(2)
                .unwrap()
                .split(' ')
                .take(2)
                .collect::<Vec<_>>(),
            vec!["5", "1"]
        );
    }
}
