//! Exhaustive enumeration of the tree families.
//!
//! Shapes are generated recursively, one vertex at a time, keeping only
//! vertices that pass the family's local condition; the subtree lists are
//! memoized on (color, parent color, number of white vertices). Labels and
//! heights are assigned afterwards.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::tree::{Color, Height, Node, Tree};

/// Largest label count enumerated unless a caller raises the cap.
pub const DEFAULT_CAP: usize = 6;

struct ShapeGen {
    family: Family,
    memo: HashMap<(Color, Option<Color>, usize), Vec<Node>>,
    seq_memo: HashMap<(Color, usize), Vec<Vec<Node>>>,
}

impl ShapeGen {
    fn subtrees(&mut self, color: Color, parent: Option<Color>, whites: usize) -> Vec<Node> {
        let key = (color, parent, whites);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut candidates = Vec::new();
        match color {
            Color::White if whites >= 1 => candidates = self.sequences(color, whites - 1),
            // A black vertex of arity one over a black vertex only occurs
            // below a white vertex, which keeps the recursion finite.
            Color::Black if whites >= 1 => {
                for w in self.subtrees(Color::White, Some(Color::Black), whites) {
                    candidates.push(vec![w]);
                }
                if parent == Some(Color::White) {
                    for b in self.subtrees(Color::Black, Some(Color::Black), whites) {
                        candidates.push(vec![b]);
                    }
                }
                for first in 1..whites {
                    let mut heads = self.subtrees(Color::White, Some(Color::Black), first);
                    heads.extend(self.subtrees(Color::Black, Some(Color::Black), first));
                    let tails = self.sequences(Color::Black, whites - first);
                    for h in &heads {
                        for t in &tails {
                            let mut s = Vec::with_capacity(t.len() + 1);
                            s.push(h.clone());
                            s.extend(t.iter().cloned());
                            candidates.push(s);
                        }
                    }
                }
            }
            _ => {}
        }
        let mut out = Vec::new();
        for children in candidates {
            let n = Node {
                color,
                labels: Vec::new(),
                height: None,
                children,
                tag: 0,
            };
            if self.family.shape_ok(&n, parent) {
                out.push(n);
            }
        }
        self.memo.insert(key, out.clone());
        out
    }

    /// Ordered lists of subtrees hanging off a vertex of color `parent`,
    /// carrying `whites` white vertices in total.
    fn sequences(&mut self, parent: Color, whites: usize) -> Vec<Vec<Node>> {
        if whites == 0 {
            return vec![Vec::new()];
        }
        if let Some(v) = self.seq_memo.get(&(parent, whites)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for first in 1..=whites {
            let mut heads = self.subtrees(Color::White, Some(parent), first);
            heads.extend(self.subtrees(Color::Black, Some(parent), first));
            if heads.is_empty() {
                continue;
            }
            let tails = self.sequences(parent, whites - first);
            for h in &heads {
                for t in &tails {
                    let mut s = Vec::with_capacity(t.len() + 1);
                    s.push(h.clone());
                    s.extend(t.iter().cloned());
                    out.push(s);
                }
            }
        }
        self.seq_memo.insert((parent, whites), out.clone());
        out
    }
}

/// Unlabelled shapes of the family with `n` white vertices.
fn shapes(family: Family, n: usize) -> Vec<Node> {
    let mut g = ShapeGen {
        family,
        memo: HashMap::new(),
        seq_memo: HashMap::new(),
    };
    g.subtrees(Color::Black, None, n)
}

fn white_slots(n: &Node, out: &mut Vec<bool>) {
    if n.is_white() {
        out.push(n.is_leaf());
    }
    for c in &n.children {
        white_slots(c, out);
    }
}

fn apply_labels(n: &Node, labels: &mut std::slice::Iter<'_, u32>) -> Node {
    let mut m = n.clone();
    if m.is_white() {
        m.labels = vec![*labels.next().expect("one label per white vertex")];
    }
    m.children = n.children.iter().map(|c| apply_labels(c, labels)).collect();
    m
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (1..=n as u32).collect();
    fn heap(k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k.is_multiple_of(2) {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

/// Label sequences (in planar order of white vertices) allowed for a shape.
fn labellings(family: Family, shape: &Node, n: usize) -> Vec<Vec<u32>> {
    let mut leaves = Vec::new();
    white_slots(shape, &mut leaves);
    match family {
        Family::AssHt => vec![(1..=n as u32).collect()],
        Family::Cyclo | Family::CycHt => {
            let internal: Vec<usize> = (0..leaves.len()).filter(|&i| !leaves[i]).collect();
            let place_one = |pos: usize| {
                let mut next = 2u32;
                (0..leaves.len())
                    .map(|i| {
                        if i == pos {
                            1
                        } else {
                            next += 1;
                            next - 1
                        }
                    })
                    .collect::<Vec<u32>>()
            };
            match internal.as_slice() {
                [] => (0..leaves.len()).map(place_one).collect(),
                [i] => vec![place_one(*i)],
                _ => Vec::new(),
            }
        }
        _ => permutations(n),
    }
}

fn black_edge_count(n: &Node) -> usize {
    n.children
        .iter()
        .map(|c| usize::from(n.is_black() && c.is_black()) + black_edge_count(c))
        .sum()
}

fn apply_heights(n: &Node, bits: &mut impl Iterator<Item = Height>) -> Node {
    let mut m = n.clone();
    let black = n.is_black();
    m.children = n
        .children
        .iter()
        .map(|c| {
            let h = if black && c.is_black() {
                Some(bits.next().expect("one height per black edge"))
            } else {
                None
            };
            let mut cc = apply_heights(c, bits);
            cc.height = h;
            cc
        })
        .collect();
    m
}

/// Every `n`-labelled tree of the family, sorted and without duplicates.
pub fn enumerate_family(family: Family, n: usize) -> Result<Vec<Tree>> {
    enumerate_family_capped(family, n, DEFAULT_CAP)
}

pub fn enumerate_family_capped(family: Family, n: usize, cap: usize) -> Result<Vec<Tree>> {
    if n == 0 {
        return Err(Error::Constraint("trees need at least one label".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "label count",
            n,
            cap,
        });
    }
    let mut out = Vec::new();
    for shape in shapes(family, n) {
        for labels in labellings(family, &shape, n) {
            let labelled = apply_labels(&shape, &mut labels.iter());
            if family.has_heights() {
                let m = black_edge_count(&labelled);
                for mask in 0..(1u64 << m) {
                    let mut bits = (0..m).map(|i| {
                        if mask >> i & 1 == 1 {
                            Height::One
                        } else {
                            Height::Var
                        }
                    });
                    let t = Tree::new(apply_heights(&labelled, &mut bits))?;
                    out.push(t);
                }
            } else {
                out.push(Tree::new(labelled)?);
            }
        }
    }
    out.retain(|t| family.contains(t));
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(f: Family, n: usize) -> usize {
        enumerate_family(f, n).unwrap().len()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(Family::Bipart, 1), 1);
        assert_eq!(count(Family::Bipart, 2), 4);
        assert_eq!(count(Family::Stable, 1), 1);
        assert_eq!(count(Family::Stable, 2), 4);
        assert_eq!(count(Family::Cor, 3), 6);
    }

    #[test]
    fn planar_binary_trees_are_catalan() {
        let binary = |n| {
            enumerate_family(Family::AssHt, n)
                .unwrap()
                .into_iter()
                .filter(|t| {
                    let mut ok = true;
                    t.for_each(|_, v| ok &= v.is_white() || v.arity() == 2);
                    ok && t.var_edges().len() == t.black_edges().len()
                })
                .count()
        };
        assert_eq!(binary(3), 2);
        assert_eq!(binary(4), 5);
        assert_eq!(binary(5), 14);
    }

    #[test]
    fn rejects_zero_and_cap() {
        assert!(enumerate_family(Family::Bipart, 0).is_err());
        assert!(matches!(
            enumerate_family_capped(Family::Bipart, 4, 3),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn members_pass_their_predicate() {
        for f in crate::family::ALL_FAMILIES {
            for n in 1..=3 {
                for t in enumerate_family(f, n).unwrap() {
                    assert!(f.contains(&t), "{f} {t}");
                }
            }
        }
    }
}
