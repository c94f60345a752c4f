//! Elementary surgery on trees. Edges can be contracted or inserted and white
//! angles collapsed. A vertex can also be replaced by a whole tree.
//!
//! Throughout, the `tag` of a node names the edge directly below it. Surgery
//! keeps the tags of edges that survive and gives fresh tags to new edges, so
//! callers can follow edges (and the coordinates attached to them) through a
//! move.

use crate::error::{Error, Result};
use crate::tree::{Color, EdgeKind, Node, Path, Tree};

fn split_edge(e: &[usize]) -> Result<(usize, &[usize])> {
    e.split_last()
        .map(|(l, p)| (*l, p))
        .ok_or_else(|| Error::NotAnEdge(e.to_vec()))
}

/// Contracts the edge whose upper vertex sits at `e`.
///
/// A black edge gives a black vertex, any other edge a white one whose labels
/// are the union of the labels of its ends. If the root turns white it is
/// planted again under a new black root of valence one.
pub fn contract_edge(t: &Tree, e: &[usize]) -> Result<Tree> {
    let (last, parent_path) = split_edge(e)?;
    if t.node(e).is_none() {
        return Err(Error::NotAnEdge(e.to_vec()));
    }
    let mut t = t.clone();
    let parent = t
        .node_mut(parent_path)
        .expect("parent of an existing vertex");
    let child = parent.children.remove(last);
    let kind = EdgeKind::of(parent.color, child.color);
    parent.children.splice(last..last, child.children);
    if kind != EdgeKind::Black {
        parent.color = Color::White;
        parent.labels.extend_from_slice(&child.labels);
        parent.labels.sort_unstable();
        parent.labels.dedup();
        parent.height = None;
        for c in &mut parent.children {
            c.height = None;
        }
    }
    let mut root = t.into_root();
    if root.is_white() {
        root = Node {
            color: Color::Black,
            labels: Vec::new(),
            height: None,
            children: vec![root],
            tag: 0,
        };
    }
    Ok(Tree::from_node_unchecked(root))
}

/// Collapses the angle in slot `position` at the white vertex `w`.
///
/// With children `c1..ck`, angle 0 lies between the outgoing flag and `c1`,
/// angle `i` between `ci` and `c(i+1)`, angle `k` between `ck` and the
/// outgoing flag. The two far ends of the angle are identified; they must both
/// be black. The identified vertex keeps the tag of the lower of the two (the
/// parent) or of the left one (two children).
pub fn collapse_angle(t: &Tree, w: &[usize], position: usize) -> Result<Tree> {
    let bad = || Error::NotEffectiveAngle {
        path: w.to_vec(),
        angle: position,
    };
    let node = t.node(w).ok_or_else(bad)?;
    let k = node.arity();
    if !node.is_white() || k == 0 || position > k {
        return Err(bad());
    }
    let mut t = t.clone();
    if position > 0 && position < k {
        let wn = t.node_mut(w).unwrap();
        if !(wn.children[position - 1].is_black() && wn.children[position].is_black()) {
            return Err(bad());
        }
        let right = wn.children.remove(position);
        wn.children[position - 1].children.extend(right.children);
        return Ok(t);
    }
    let (widx, parent_path) = split_edge(w).map_err(|_| bad())?;
    let parent_is_black = t.node(parent_path).map(Node::is_black).unwrap_or(false);
    let outer = if position == 0 { 0 } else { k - 1 };
    if !parent_is_black || !t.node(w).unwrap().children[outer].is_black() {
        return Err(bad());
    }
    let parent = t.node_mut(parent_path).unwrap();
    let moved = parent.children[widx].children.remove(outer);
    let at = if position == 0 { widx } else { widx + 1 };
    parent.children.splice(at..at, moved.children);
    Ok(t)
}

/// Every pair `(t', e)` with `t'/e = t` and `e` of one of the `allowed`
/// kinds (black or mixed), without any family condition. The returned trees
/// keep the tags of `t`; the new edge `e` carries a fresh tag.
pub fn insertions(t: &Tree, allowed: &[EdgeKind]) -> Vec<(Tree, Path)> {
    let mut out = Vec::new();
    let fresh = t.root().max_tag() + 1;
    let paths = t.paths();
    for p in paths {
        let n = t.node(&p).unwrap();
        let k = n.arity();
        if n.is_black() && allowed.contains(&EdgeKind::Black) {
            for i in 0..k {
                for j in i + 1..=k {
                    let mut tt = t.clone();
                    let v = tt.node_mut(&p).unwrap();
                    let middle: Vec<Node> = v.children.drain(i..j).collect();
                    let upper = Node {
                        color: Color::Black,
                        labels: Vec::new(),
                        height: None,
                        children: middle,
                        tag: fresh,
                    };
                    v.children.insert(i, upper);
                    let mut e = p.clone();
                    e.push(i);
                    out.push((tt, e));
                }
            }
        }
        if n.is_white() && allowed.contains(&EdgeKind::Mixed) {
            // black vertex above the white one
            for i in 0..k {
                for j in i + 1..=k {
                    let mut tt = t.clone();
                    let v = tt.node_mut(&p).unwrap();
                    let middle: Vec<Node> = v.children.drain(i..j).collect();
                    let b = Node {
                        color: Color::Black,
                        labels: Vec::new(),
                        height: None,
                        children: middle,
                        tag: fresh,
                    };
                    v.children.insert(i, b);
                    let mut e = p.clone();
                    e.push(i);
                    out.push((tt, e));
                }
            }
            // black vertex below the white one; the old edge below w now ends at b
            let planted_child = p.len() == 1 && t.root().arity() == 1;
            for i in 0..=k {
                for j in i..=k {
                    let mut tt = t.clone();
                    let v = tt.node_mut(&p).unwrap();
                    let mut rest = std::mem::take(&mut v.children);
                    let middle: Vec<Node> = rest.drain(i..j).collect();
                    let upper = Node {
                        color: Color::White,
                        labels: std::mem::take(&mut v.labels),
                        height: None,
                        children: middle,
                        tag: fresh,
                    };
                    rest.insert(i, upper);
                    v.color = Color::Black;
                    v.children = rest;
                    let mut e = p.clone();
                    e.push(i);
                    out.push((tt.clone(), e));
                    if planted_child {
                        let mut b = tt.into_root().children.remove(0);
                        b.height = None;
                        b.tag = 0;
                        out.push((Tree::from_node_unchecked(b), vec![i]));
                    }
                }
            }
        }
    }
    out
}

/// Replaces the vertex at `v` by the tree `s`, whose leaves (in planar order)
/// are glued to the children of `v`. A white vertex sitting on a root of
/// valence one is replaced and the root edge is then contracted.
pub fn replace_vertex(t: &Tree, v: &[usize], s: &Tree) -> Result<Tree> {
    let target = t.node(v).ok_or_else(|| Error::NotAnEdge(v.to_vec()))?;
    let leaves = count_leaves(s.root());
    if leaves != target.arity() {
        return Err(Error::ArityMismatch(format!(
            "replacing tree has {leaves} leaves but the vertex has arity {}",
            target.arity()
        )));
    }
    fn graft(n: &Node, branches: &mut std::vec::IntoIter<Node>) -> Node {
        if n.is_leaf() && n.is_white() {
            return branches.next().expect("leaf count checked");
        }
        let mut m = n.clone();
        m.children = n.children.iter().map(|c| graft(c, branches)).collect();
        m
    }
    let mut branches = target.children.clone().into_iter();
    let mut new = graft(s.root(), &mut branches);
    new.height = target.height;
    new.tag = target.tag;
    let white_on_planted_root = target.is_white() && v.len() == 1 && t.root().arity() == 1;
    if v.is_empty() {
        new.height = None;
        return Ok(Tree::from_node_unchecked(new));
    }
    let mut t = t.clone();
    *t.node_mut(v).unwrap() = new;
    let mut root = t.into_root();
    root.normalize_heights(None);
    if white_on_planted_root {
        let mut r = root.children.remove(0);
        r.height = None;
        root = r;
    }
    Tree::new(root)
}

fn count_leaves(n: &Node) -> usize {
    if n.is_leaf() {
        usize::from(n.is_white())
    } else {
        n.children.iter().map(count_leaves).sum()
    }
}

/// All trees `t'` that contain an edge `e` with `t'/e = t`, found by brute
/// force over a candidate list. Used as an independent check of
/// [`insertions`].
pub fn preimages_by_search<'a>(
    t: &Tree,
    candidates: impl IntoIterator<Item = &'a Tree>,
    allowed: &[EdgeKind],
) -> Vec<(Tree, Path)> {
    let mut out = Vec::new();
    for c in candidates {
        for e in c.edges() {
            if !allowed.contains(&c.edge_kind(&e).unwrap()) {
                continue;
            }
            if let Ok(r) = contract_edge(c, &e) {
                if &r == t {
                    out.push((c.clone(), e));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    #[test]
    fn contract_black_edge() {
        let r = contract_edge(&t("b(b(w1 w2) w3)"), &[0]).unwrap();
        assert_eq!(r, t("b(w1 w2 w3)"));
    }

    #[test]
    fn contract_white_edge_unites_labels() {
        let r = contract_edge(&t("b(w1(w2))"), &[0, 0]).unwrap();
        assert_eq!(r, t("b(w1,2)"));
    }

    #[test]
    fn contract_mixed_edge_is_white() {
        let r = contract_edge(&t("b(w1(b(w2 w3)))"), &[0, 0]).unwrap();
        assert_eq!(r, t("b(w1(w2 w3))"));
        // at the root: the white result is planted again
        let r = contract_edge(&t("b(w1 w2)"), &[1]).unwrap();
        assert_eq!(r, t("b(w2(w1))"));
    }

    #[test]
    fn contract_rejects_non_edges() {
        assert!(contract_edge(&t("b(w1)"), &[]).is_err());
        assert!(contract_edge(&t("b(w1)"), &[3]).is_err());
    }

    #[test]
    fn collapse_between_two_black_children() {
        let r = collapse_angle(&t("b(w1(b(w2) b(w3)))"), &[0], 1).unwrap();
        assert_eq!(r, t("b(w1(b(w2 w3)))"));
        let r = collapse_angle(&t("b(w1(b(w2) b(w3)))"), &[0], 0).unwrap();
        assert_eq!(r, t("b(w2 w1(b(w3)))"));
        let r = collapse_angle(&t("b(w1(b(w2) b(w3)))"), &[0], 2).unwrap();
        assert_eq!(r, t("b(w1(b(w2)) w3)"));
        assert!(collapse_angle(&t("b(w1)"), &[0], 0).is_err());
    }

    #[test]
    fn insertions_invert_contraction() {
        let kinds = [EdgeKind::Black, EdgeKind::Mixed];
        for s in ["b(w1 w2 w3)", "b(w1(w2 w3))", "b(w1(b(w2 w3)) w4)"] {
            let tr = t(s);
            for (tp, e) in insertions(&tr, &kinds) {
                let mut tp = tp;
                tp.clear_tags();
                assert_eq!(contract_edge(&tp, &e).unwrap(), tr, "{s} via {tp}");
            }
        }
    }

    #[test]
    fn corolla_black_splits() {
        let ins: Vec<_> = insertions(&t("b(w1 w2 w3)"), &[EdgeKind::Black])
            .into_iter()
            .filter(|(tp, _)| crate::family::Family::Pp.contains(tp))
            .collect();
        assert_eq!(ins.len(), 2);
        // with a fourth leaf the inner brackets of (a1 a2 a3 a4) appear
        let ins: Vec<_> = insertions(&t("b(w1 w2 w3 w4)"), &[EdgeKind::Black])
            .into_iter()
            .filter(|(tp, _)| crate::family::Family::Pp.contains(tp))
            .collect();
        assert_eq!(ins.len(), 5);
    }

    #[test]
    fn replace_by_corolla_is_identity() {
        let tr = t("b(w1(b(w2 w3)) w4)");
        let r = replace_vertex(&tr, &[0, 0], &t("b(w8 w9)")).unwrap();
        assert_eq!(r, tr);
    }

    #[test]
    fn replacing_vertices_by_fibres_reconstitutes() {
        let original = t("b(b(w1 w2) w3 b(w4(b(w5 w6))))");
        let contracted = contract_edge(&contract_edge(&original, &[2]).unwrap(), &[0]).unwrap();
        assert_eq!(contracted, t("b(w1 w2 w3 w4(b(w5 w6)))"));
        let fibre = t("b(b(w0 w0) w0 b(w0))");
        assert_eq!(replace_vertex(&contracted, &[], &fibre).unwrap(), original);
    }

    #[test]
    fn replace_arity_mismatch() {
        assert!(matches!(
            replace_vertex(&t("b(w1 w2)"), &[], &t("b(w1 w2 w3)")),
            Err(Error::ArityMismatch(_))
        ));
    }

    #[test]
    fn replace_white_on_planted_root() {
        let r = replace_vertex(&t("b(w1(b(w2) b(w3)))"), &[0], &t("b(w5(w7) w8)")).unwrap();
        assert_eq!(r, t("b(w5(b(w2)) b(w3))"));
    }
}
