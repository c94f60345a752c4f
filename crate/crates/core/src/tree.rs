//! Planar planted black/white trees.
//!
//! A tree is stored as an owned recursive [`Node`] whose `children` vector is
//! the planar order of the incoming flags. The planted (marked) flag is a
//! virtual parent flag at the root and is never stored as an edge.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

/// Height of a black edge in a tree with heights: variable (`v`) or fixed at one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Height {
    Var,
    One,
}

/// Kind of an edge, read off the colors of its two endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Black,
    White,
    Mixed,
}

impl EdgeKind {
    pub fn of(a: Color, b: Color) -> EdgeKind {
        match (a, b) {
            (Color::Black, Color::Black) => EdgeKind::Black,
            (Color::White, Color::White) => EdgeKind::White,
            _ => EdgeKind::Mixed,
        }
    }
}

/// Address of a vertex: child indices from the root.
pub type Path = Vec<usize>;

/// A vertex together with the subtree above it.
///
/// `height` is the height of the edge to the parent. `tag` is scratch identity
/// used while tracking vertices through surgery. Comparisons and hashing
/// ignore it.
#[derive(Clone, Debug)]
pub struct Node {
    pub color: Color,
    pub labels: Vec<u32>,
    pub height: Option<Height>,
    pub children: Vec<Node>,
    pub tag: u32,
}

impl Node {
    pub fn black(children: Vec<Node>) -> Node {
        Node {
            color: Color::Black,
            labels: Vec::new(),
            height: None,
            children,
            tag: 0,
        }
    }

    pub fn white(label: u32, children: Vec<Node>) -> Node {
        Node {
            color: Color::White,
            labels: vec![label],
            height: None,
            children,
            tag: 0,
        }
    }

    pub fn leaf(label: u32) -> Node {
        Node::white(label, Vec::new())
    }

    pub fn with_height(mut self, h: Height) -> Node {
        self.height = Some(h);
        self
    }

    pub fn is_white(&self) -> bool {
        self.color == Color::White
    }

    pub fn is_black(&self) -> bool {
        self.color == Color::Black
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn key(&self) -> (Color, &Vec<u32>, Option<Height>, &Vec<Node>) {
        (self.color, &self.labels, self.height, &self.children)
    }

    pub fn count_vertices(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(Node::count_vertices)
            .sum::<usize>()
    }

    pub fn count_white(&self) -> usize {
        usize::from(self.is_white()) + self.children.iter().map(Node::count_white).sum::<usize>()
    }

    pub(crate) fn clear_tags(&mut self) {
        self.tag = 0;
        for c in &mut self.children {
            c.clear_tags();
        }
    }

    /// Assigns tags `start, start+1, ...` in preorder; returns the next free tag.
    pub(crate) fn assign_tags(&mut self, start: u32) -> u32 {
        self.tag = start;
        let mut next = start + 1;
        for c in &mut self.children {
            next = c.assign_tags(next);
        }
        next
    }

    pub(crate) fn max_tag(&self) -> u32 {
        self.children
            .iter()
            .map(Node::max_tag)
            .fold(self.tag, u32::max)
    }

    /// Drops heights on every edge that is not black–black.
    pub(crate) fn normalize_heights(&mut self, parent: Option<Color>) {
        if parent != Some(Color::Black) || self.color != Color::Black {
            self.height = None;
        }
        let c = self.color;
        for ch in &mut self.children {
            ch.normalize_heights(Some(c));
        }
    }

    pub(crate) fn relabel(&mut self, f: &impl Fn(u32) -> u32) {
        for l in &mut self.labels {
            *l = f(*l);
        }
        self.labels.sort_unstable();
        for c in &mut self.children {
            c.relabel(f);
        }
    }

    pub(crate) fn walk_preorder<'a>(
        &'a self,
        path: &mut Path,
        f: &mut impl FnMut(&Path, &'a Node),
    ) {
        f(path, self);
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.walk_preorder(path, f);
            path.pop();
        }
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Node {}

impl Hash for Node {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// A validated planar planted black/white tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    root: Node,
}

impl Tree {
    /// Validates the structural invariants: black root without height, white
    /// leaves, labels only on white vertices.
    pub fn new(root: Node) -> Result<Tree> {
        if root.color != Color::Black {
            return Err(Error::InvalidTree("root must be black".into()));
        }
        if root.height.is_some() {
            return Err(Error::InvalidTree("root carries no edge height".into()));
        }
        fn check(n: &Node, is_root: bool) -> Result<()> {
            if !is_root && n.is_leaf() && n.is_black() {
                return Err(Error::InvalidTree("black leaf".into()));
            }
            if n.is_black() && !n.labels.is_empty() {
                return Err(Error::InvalidTree("black vertex carries labels".into()));
            }
            if n.labels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidTree(
                    "labels must be a strictly increasing set".into(),
                ));
            }
            n.children.iter().try_for_each(|c| check(c, false))
        }
        check(&root, true)?;
        fn check_heights(n: &Node, parent: Option<Color>) -> Result<()> {
            if n.height.is_some() && !(parent == Some(Color::Black) && n.is_black()) {
                return Err(Error::InvalidTree(
                    "heights are only allowed on black edges".into(),
                ));
            }
            n.children
                .iter()
                .try_for_each(|c| check_heights(c, Some(n.color)))
        }
        check_heights(&root, None)?;
        if root.is_leaf() {
            return Err(Error::InvalidTree(
                "root must have at least one child".into(),
            ));
        }
        let mut root = root;
        root.clear_tags();
        Ok(Tree { root })
    }

    /// Builds a tree from a node already known to be valid, keeping tags.
    pub(crate) fn from_node_unchecked(root: Node) -> Tree {
        debug_assert!(root.is_black());
        Tree { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub(crate) fn root_mut(&mut self) -> &mut Node {
        &mut self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn node(&self, path: &[usize]) -> Option<&Node> {
        let mut n = &self.root;
        for &i in path {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    pub(crate) fn node_mut(&mut self, path: &[usize]) -> Option<&mut Node> {
        let mut n = &mut self.root;
        for &i in path {
            n = n.children.get_mut(i)?;
        }
        Some(n)
    }

    pub fn clear_tags(&mut self) {
        self.root.clear_tags();
    }

    pub(crate) fn tagged(&self) -> Tree {
        let mut t = self.clone();
        t.root.assign_tags(1);
        t
    }

    /// Number of white vertices.
    pub fn n_white(&self) -> usize {
        self.root.count_white()
    }

    /// Sorted union of all white labels.
    pub fn labels(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each(|_, n| out.extend_from_slice(&n.labels));
        out.sort_unstable();
        out
    }

    /// Preorder visit of every vertex with its path.
    pub fn for_each<'a>(&'a self, mut f: impl FnMut(&Path, &'a Node)) {
        let mut p = Vec::new();
        self.root.walk_preorder(&mut p, &mut f);
    }

    pub fn paths(&self) -> Vec<Path> {
        let mut v = Vec::new();
        self.for_each(|p, _| v.push(p.clone()));
        v
    }

    pub fn white_paths(&self) -> Vec<Path> {
        let mut v = Vec::new();
        self.for_each(|p, n| {
            if n.is_white() {
                v.push(p.clone())
            }
        });
        v
    }

    /// Path of the white vertex carrying `label`.
    pub fn find_label(&self, label: u32) -> Option<Path> {
        let mut found = None;
        self.for_each(|p, n| {
            if found.is_none() && n.labels.contains(&label) {
                found = Some(p.clone());
            }
        });
        found
    }

    /// Edges as paths to their upper endpoint, in preorder.
    pub fn edges(&self) -> Vec<Path> {
        self.paths().into_iter().filter(|p| !p.is_empty()).collect()
    }

    pub fn edge_kind(&self, e: &[usize]) -> Option<EdgeKind> {
        let (last, parent) = e.split_last()?;
        let p = self.node(parent)?;
        let c = p.children.get(*last)?;
        Some(EdgeKind::of(p.color, c.color))
    }

    /// Root of valence one over a white vertex: the planting is then only a marker.
    pub fn is_planted_white(&self) -> bool {
        self.root.arity() == 1 && self.root.children[0].is_white()
    }

    /// Black vertices that count as cells: every black vertex except a
    /// valence-one root over a white vertex.
    pub fn generator_blacks(&self) -> Vec<Path> {
        let planted = self.is_planted_white();
        let mut v = Vec::new();
        self.for_each(|p, n| {
            if n.is_black() && !(p.is_empty() && planted) {
                v.push(p.clone())
            }
        });
        v
    }

    pub fn black_edges(&self) -> Vec<Path> {
        self.edges()
            .into_iter()
            .filter(|e| self.edge_kind(e) == Some(EdgeKind::Black))
            .collect()
    }

    pub fn var_edges(&self) -> Vec<Path> {
        self.black_edges()
            .into_iter()
            .filter(|e| self.node(e).and_then(|n| n.height) == Some(Height::Var))
            .collect()
    }

    /// Replaces labels through `f` (used for operadic renumbering).
    pub fn relabeled(&self, f: impl Fn(u32) -> u32) -> Tree {
        let mut t = self.clone();
        t.root.relabel(&f);
        t
    }

    /// Compact one-line serialization used for canonical ordering and display.
    pub fn to_compact(&self) -> String {
        fn go(n: &Node, out: &mut String) {
            match n.color {
                Color::Black => out.push('b'),
                Color::White => {
                    out.push('w');
                    let ls: Vec<String> = n.labels.iter().map(u32::to_string).collect();
                    out.push_str(&ls.join(","));
                }
            }
            match n.height {
                Some(Height::Var) => out.push_str(":v"),
                Some(Height::One) => out.push_str(":1"),
                None => {}
            }
            if !n.children.is_empty() {
                out.push('(');
                for (i, c) in n.children.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    go(c, out);
                }
                out.push(')');
            }
        }
        let mut s = String::new();
        go(&self.root, &mut s);
        s
    }

    /// Parses the compact form produced by [`Tree::to_compact`].
    pub fn parse_compact(s: &str) -> Result<Tree> {
        let bytes: Vec<char> = s
            .chars()
            .filter(|c| !c.is_whitespace() || *c == ' ')
            .collect();
        let mut pos = 0usize;
        fn skip_ws(b: &[char], pos: &mut usize) {
            while *pos < b.len() && b[*pos] == ' ' {
                *pos += 1;
            }
        }
        fn parse(b: &[char], pos: &mut usize) -> Result<Node> {
            skip_ws(b, pos);
            let bad = |m: &str| Error::Parse(m.to_string());
            let mut node = match b.get(*pos) {
                Some('b') => {
                    *pos += 1;
                    Node::black(Vec::new())
                }
                Some('w') => {
                    *pos += 1;
                    let mut labels = Vec::new();
                    let mut cur = String::new();
                    while let Some(c) = b.get(*pos) {
                        if c.is_ascii_digit() {
                            cur.push(*c);
                        } else if *c == ',' {
                            labels.push(cur.parse::<u32>().map_err(|_| bad("bad label"))?);
                            cur.clear();
                        } else {
                            break;
                        }
                        *pos += 1;
                    }
                    if !cur.is_empty() {
                        labels.push(cur.parse::<u32>().map_err(|_| bad("bad label"))?);
                    }
                    labels.sort_unstable();
                    Node {
                        color: Color::White,
                        labels,
                        height: None,
                        children: Vec::new(),
                        tag: 0,
                    }
                }
                _ => return Err(bad("expected 'b' or 'w'")),
            };
            if b.get(*pos) == Some(&':') {
                *pos += 1;
                node.height = match b.get(*pos) {
                    Some('v') => Some(Height::Var),
                    Some('1') => Some(Height::One),
                    _ => return Err(bad("expected height 'v' or '1'")),
                };
                *pos += 1;
            }
            if b.get(*pos) == Some(&'(') {
                *pos += 1;
                loop {
                    skip_ws(b, pos);
                    if b.get(*pos) == Some(&')') {
                        *pos += 1;
                        break;
                    }
                    node.children.push(parse(b, pos)?);
                }
            }
            Ok(node)
        }
        let node = parse(&bytes, &mut pos)?;
        skip_ws(&bytes, &mut pos);
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input at {pos}")));
        }
        Tree::new(node)
    }

    /// JSON value in the `{"c","l","h","ch"}` schema.
    pub fn to_json(&self) -> Value {
        fn go(n: &Node) -> Value {
            let mut m = serde_json::Map::new();
            m.insert(
                "c".into(),
                Value::from(if n.is_black() { "b" } else { "w" }),
            );
            if n.is_white() {
                m.insert("l".into(), Value::from(n.labels.clone()));
            }
            match n.height {
                Some(Height::Var) => {
                    m.insert("h".into(), Value::from("v"));
                }
                Some(Height::One) => {
                    m.insert("h".into(), Value::from("1"));
                }
                None => {}
            }
            if !n.children.is_empty() {
                m.insert(
                    "ch".into(),
                    Value::Array(n.children.iter().map(go).collect()),
                );
            }
            Value::Object(m)
        }
        go(&self.root)
    }

    pub fn from_json(v: &Value) -> Result<Tree> {
        fn go(v: &Value) -> Result<Node> {
            let obj = v
                .as_object()
                .ok_or_else(|| Error::Parse("tree node must be an object".into()))?;
            let color = match obj.get("c").and_then(Value::as_str) {
                Some("b") => Color::Black,
                Some("w") => Color::White,
                _ => {
                    return Err(Error::Parse(
                        "node color \"c\" must be \"b\" or \"w\"".into(),
                    ))
                }
            };
            let mut labels: Vec<u32> = match obj.get("l") {
                None => Vec::new(),
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .and_then(|x| u32::try_from(x).ok())
                            .ok_or_else(|| {
                                Error::Parse("labels must be non-negative integers".into())
                            })
                    })
                    .collect::<Result<_>>()?,
                Some(_) => return Err(Error::Parse("\"l\" must be an array".into())),
            };
            labels.sort_unstable();
            let height = match obj.get("h").and_then(Value::as_str) {
                None => None,
                Some("v") => Some(Height::Var),
                Some("1") => Some(Height::One),
                Some(other) => return Err(Error::Parse(format!("unknown height {other:?}"))),
            };
            let children = match obj.get("ch") {
                None => Vec::new(),
                Some(Value::Array(a)) => a.iter().map(go).collect::<Result<_>>()?,
                Some(_) => return Err(Error::Parse("\"ch\" must be an array".into())),
            };
            Ok(Node {
                color,
                labels,
                height,
                children,
                tag: 0,
            })
        }
        Tree::new(go(v)?)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// Sign of the permutation that sorts `v` (entries must be distinct).
pub(crate) fn perm_sign<T: Ord>(v: &[T]) -> i32 {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].cmp(&v[b]));
    let mut seen = vec![false; v.len()];
    let mut sign = 1;
    for i in 0..v.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = idx[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Sign of the permutation carrying the sequence `from` onto `to` (same elements).
pub(crate) fn reorder_sign<T: Eq + Hash + Copy>(from: &[T], to: &[T]) -> i32 {
    assert_eq!(
        from.len(),
        to.len(),
        "reorder between sequences of different length"
    );
    let pos: std::collections::HashMap<T, usize> =
        to.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mapped: Vec<usize> = from
        .iter()
        .map(|x| *pos.get(x).expect("element missing from target order"))
        .collect();
    perm_sign(&mapped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_round_trip() {
        assert!(Tree::parse_compact("b(w1(b(w2 w3:v)) w4)").is_err());
        let h = Tree::parse_compact("b(b:v(w1 w2) w3)").unwrap();
        assert_eq!(Tree::parse_compact(&h.to_compact()).unwrap(), h);
        let t = Tree::parse_compact("b(w1(b(w2 w3)) w4)").unwrap();
        assert_eq!(Tree::parse_compact(&t.to_compact()).unwrap(), t);
        assert_eq!(Tree::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn rejects_white_root_and_black_leaf() {
        assert!(matches!(
            Tree::new(Node::leaf(1)),
            Err(Error::InvalidTree(_))
        ));
        assert!(Tree::new(Node::black(vec![Node::black(vec![])])).is_err());
    }

    #[test]
    fn tags_do_not_affect_equality() {
        let a = Tree::parse_compact("b(w1 w2)").unwrap();
        let b = a.tagged();
        assert_eq!(a, b);
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(perm_sign(&[0, 1, 2]), 1);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[2, 0, 1]), 1);
        assert_eq!(reorder_sign(&['a', 'b', 'c'], &['c', 'a', 'b']), 1);
        assert_eq!(reorder_sign(&['a', 'b'], &['b', 'a']), -1);
    }
}
