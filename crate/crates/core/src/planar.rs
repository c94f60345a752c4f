//! The planar order on the pieces of a tree.
//!
//! Flags at a vertex are numbered by slot: slot 0 is the outgoing flag (the
//! planted flag at the root) and slot `i + 1` is the flag towards child `i`.
//! Going around the tree from the planted flag visits `2|E| + 1` flags.

use serde::Serialize;

use crate::tree::{Node, Path, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Flag {
    pub vertex: Path,
    pub slot: usize,
}

/// The angle at `vertex` between the flags in slots `position` and
/// `position + 1` (cyclically).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Angle {
    pub vertex: Path,
    pub position: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PlanarOrder {
    pub flags: Vec<Flag>,
    pub vertices: Vec<Path>,
    pub white_vertices: Vec<Path>,
    pub angles: Vec<Angle>,
    pub white_angles: Vec<Angle>,
    pub effective_white_angles: Vec<Angle>,
    /// Edges, each named by the path of its upper vertex.
    pub edges: Vec<Path>,
}

/// Number of flags at a vertex; the root counts its planted flag.
pub fn valence(n: &Node) -> usize {
    n.arity() + 1
}

pub fn planar_order(t: &Tree) -> PlanarOrder {
    let mut po = PlanarOrder::default();
    // first-appearance index of every flag, used to order angles
    let mut first: std::collections::HashMap<Flag, usize> = std::collections::HashMap::new();
    fn walk(
        n: &Node,
        path: &mut Path,
        po: &mut PlanarOrder,
        first: &mut std::collections::HashMap<Flag, usize>,
    ) {
        let out = Flag {
            vertex: path.clone(),
            slot: 0,
        };
        first.insert(out.clone(), po.flags.len());
        po.flags.push(out);
        po.vertices.push(path.clone());
        if n.is_white() {
            po.white_vertices.push(path.clone());
        }
        if !path.is_empty() {
            po.edges.push(path.clone());
        }
        for (i, c) in n.children.iter().enumerate() {
            let f = Flag {
                vertex: path.clone(),
                slot: i + 1,
            };
            first.insert(f.clone(), po.flags.len());
            po.flags.push(f);
            path.push(i);
            walk(c, path, po, first);
            path.pop();
        }
    }
    let mut path = Vec::new();
    walk(t.root(), &mut path, &mut po, &mut first);

    let mut keyed = Vec::new();
    t.for_each(|p, n| {
        let k = valence(n);
        for j in 0..k {
            let a = first[&Flag {
                vertex: p.clone(),
                slot: j,
            }];
            let b = first[&Flag {
                vertex: p.clone(),
                slot: (j + 1) % k,
            }];
            keyed.push((
                (a.min(b), j),
                Angle {
                    vertex: p.clone(),
                    position: j,
                },
                n.is_white(),
                k >= 2,
            ));
        }
    });
    keyed.sort_by_key(|x| x.0);
    for (_, a, white, effective) in keyed {
        if white {
            po.white_angles.push(a.clone());
            if effective {
                po.effective_white_angles.push(a.clone());
            }
        }
        po.angles.push(a);
    }
    po
}

/// Angles in the order the walk around the tree passes through them: at a
/// vertex, angle `j` comes right after the subtree of child `j - 1`.
pub fn walk_angles(t: &Tree) -> Vec<Angle> {
    fn go(n: &Node, path: &mut Path, out: &mut Vec<Angle>) {
        out.push(Angle {
            vertex: path.clone(),
            position: 0,
        });
        for (i, c) in n.children.iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
            out.push(Angle {
                vertex: path.clone(),
                position: i + 1,
            });
        }
    }
    let mut out = Vec::new();
    go(t.root(), &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    #[test]
    fn flag_count_is_twice_edges_plus_one() {
        for s in [
            "b(w1)",
            "b(w1 w2)",
            "b(w1(b(w2 w3)) w4)",
            "b(b:v(w1 w2) w3)",
        ] {
            let tr = t(s);
            let po = planar_order(&tr);
            assert_eq!(po.flags.len(), 2 * po.edges.len() + 1, "{s}");
        }
        assert_eq!(planar_order(&t("b(w1)")).flags.len(), 3);
    }

    #[test]
    fn combs_have_different_edge_orders() {
        let left = planar_order(&t("b(b(w1 w2) w3)"));
        let right = planar_order(&t("b(w1 b(w2 w3))"));
        assert_ne!(left.edges, right.edges);
        assert_eq!(left.edges, vec![vec![0], vec![0, 0], vec![0, 1], vec![1]]);
    }

    #[test]
    fn effective_white_angles() {
        let po = planar_order(&t("b(w1(b(w2) b(w3)) w4)"));
        // w1 has three angles, the leaves have none that are effective
        assert_eq!(po.effective_white_angles.len(), 3);
        assert_eq!(po.white_angles.len(), 3 + 3);
        assert_eq!(walk_angles(&t("b(w1 w2)")).len(), 1 + 1 + 1 + 1 + 1);
    }

    #[test]
    fn equal_trees_have_equal_orders() {
        let a = planar_order(&t("b(w1(b(w2 w3)) w4)"));
        let b = planar_order(&t("b(w1(b(w2 w3)) w4)"));
        assert_eq!(a.flags, b.flags);
        assert_eq!(a.angles, b.angles);
    }
}
