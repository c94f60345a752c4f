//! Membership predicates for the tree families.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tree::{Color, Node, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// All edges mixed.
    Bipart,
    /// No black vertex of arity one except a root planted over a white vertex.
    Stable,
    /// No white edges and no unstable arity-one black vertices; no heights.
    StablyBipartite,
    /// Stably bipartite with a height `v` or `1` on every black edge.
    Ht,
    /// Stable with every white vertex a leaf.
    Pp,
    /// Bipartite with every white vertex a leaf.
    Cor,
    /// Stable, at most one internal white vertex (labelled 1), remaining
    /// leaves labelled in planar order.
    Cyclo,
    /// Heights analogue of [`Family::Cyclo`].
    CycHt,
    /// Heights analogue of planar-labelled [`Family::Pp`].
    AssHt,
}

pub const ALL_FAMILIES: [Family; 9] = [
    Family::Bipart,
    Family::Stable,
    Family::StablyBipartite,
    Family::Ht,
    Family::Pp,
    Family::Cor,
    Family::Cyclo,
    Family::CycHt,
    Family::AssHt,
];

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Bipart => "bipart",
            Family::Stable => "stable",
            Family::StablyBipartite => "stably_bipartite",
            Family::Ht => "ht",
            Family::Pp => "pp",
            Family::Cor => "cor",
            Family::Cyclo => "cyclo",
            Family::CycHt => "cyc_ht",
            Family::AssHt => "ass_ht",
        }
    }

    /// Whether the trees of this family carry heights on black edges.
    pub fn has_heights(self) -> bool {
        matches!(self, Family::Ht | Family::CycHt | Family::AssHt)
    }

    /// The family whose differential and operad structure this family uses.
    pub fn parent(self) -> Family {
        match self {
            Family::Bipart | Family::Cor => Family::Bipart,
            Family::Stable | Family::Pp | Family::Cyclo => Family::Stable,
            Family::StablyBipartite | Family::Ht | Family::CycHt | Family::AssHt => Family::Ht,
        }
    }

    /// Local condition at one vertex, given the color of its parent.
    ///
    /// Every family condition except the labelling constraints is local, which
    /// is what makes memoized shape generation possible.
    pub(crate) fn node_ok(self, n: &Node, parent: Option<Color>) -> bool {
        let heights_ok = if self.has_heights() {
            n.children
                .iter()
                .all(|c| (n.is_black() && c.is_black()) == c.height.is_some())
        } else {
            n.children.iter().all(|c| c.height.is_none())
        };
        heights_ok && self.shape_ok(n, parent)
    }

    /// [`Family::node_ok`] without the condition on heights.
    pub(crate) fn shape_ok(self, n: &Node, parent: Option<Color>) -> bool {
        let whites_leaves = matches!(self, Family::Pp | Family::Cor | Family::AssHt);
        if whites_leaves && n.is_white() && !n.is_leaf() {
            return false;
        }
        match self {
            Family::Bipart | Family::Cor => n.children.iter().all(|c| c.color != n.color),
            Family::Stable | Family::Pp | Family::Cyclo => stable_ok(n, parent),
            Family::StablyBipartite | Family::Ht | Family::CycHt | Family::AssHt => {
                stably_bipartite_ok(n, parent)
            }
        }
    }

    /// Full membership test, including labelling conditions.
    pub fn contains(self, t: &Tree) -> bool {
        fn all_nodes(f: Family, n: &Node, parent: Option<Color>) -> bool {
            f.node_ok(n, parent) && n.children.iter().all(|c| all_nodes(f, c, Some(n.color)))
        }
        all_nodes(self, t.root(), None) && labels_ok(self, t)
    }
}

fn stable_ok(n: &Node, parent: Option<Color>) -> bool {
    if n.is_white() {
        return true;
    }
    match parent {
        None => n.arity() >= 2 || (n.arity() == 1 && n.children[0].is_white()),
        Some(_) => n.arity() >= 2,
    }
}

fn stably_bipartite_ok(n: &Node, parent: Option<Color>) -> bool {
    if n.is_white() {
        return n.children.iter().all(Node::is_black);
    }
    if n.arity() != 1 {
        return true;
    }
    let child = &n.children[0];
    match parent {
        None => child.is_white(),
        Some(Color::Black) => child.is_white() && !child.is_leaf(),
        // A black edge between two arity-one vertices carries no geometry.
        Some(Color::White) => child.is_white() || child.arity() != 1,
    }
}

/// Each white vertex carries one label and the labels are exactly `1..=n`.
pub fn is_bijectively_labelled(t: &Tree) -> bool {
    let mut ok = true;
    let mut labels = Vec::new();
    t.for_each(|_, n| {
        if n.is_white() {
            if n.labels.len() != 1 {
                ok = false;
            } else {
                labels.push(n.labels[0]);
            }
        }
    });
    labels.sort_unstable();
    ok && labels.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
}

/// White labels read in planar order are `1, 2, ..., n`.
pub fn is_planar_labelled(t: &Tree) -> bool {
    let mut seq = Vec::new();
    t.for_each(|_, n| seq.extend_from_slice(&n.labels));
    seq.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
}

/// The cyclohedron labelling: at most one internal white vertex, labelled 1,
/// and the leaves other than label 1 appear as `2, ..., n` in planar order.
pub fn is_cyclo_labelled(t: &Tree) -> bool {
    let mut internal = Vec::new();
    let mut rest = Vec::new();
    t.for_each(|_, n| {
        if n.is_white() {
            if !n.is_leaf() {
                internal.push(n.labels.clone());
            }
            if n.labels != [1] {
                rest.extend_from_slice(&n.labels);
            }
        }
    });
    let internal_ok = match internal.as_slice() {
        [] => true,
        [l] => l == &[1],
        _ => false,
    };
    internal_ok && rest.iter().enumerate().all(|(i, &l)| l as usize == i + 2)
}

fn labels_ok(f: Family, t: &Tree) -> bool {
    if !is_bijectively_labelled(t) {
        return false;
    }
    match f {
        Family::Cyclo | Family::CycHt => is_cyclo_labelled(t),
        Family::AssHt => is_planar_labelled(t),
        _ => true,
    }
}

/// Every family the tree belongs to.
pub fn classify(t: &Tree) -> BTreeSet<Family> {
    ALL_FAMILIES
        .iter()
        .copied()
        .filter(|f| f.contains(t))
        .collect()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family, Error> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        ALL_FAMILIES
            .iter()
            .copied()
            .find(|f| f.name() == norm)
            .or(match norm.as_str() {
                "inf" | "t_inf" | "infinity" => Some(Family::Stable),
                "bipartite" => Some(Family::Bipart),
                _ => None,
            })
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    #[test]
    fn smallest_tree_is_in_every_unheighted_family() {
        let c = classify(&t("b(w1)"));
        for f in [
            Family::Bipart,
            Family::Stable,
            Family::StablyBipartite,
            Family::Pp,
            Family::Cor,
            Family::Cyclo,
        ] {
            assert!(c.contains(&f), "{f}");
        }
        // No black edges, so the empty height function makes it a tree with heights too.
        assert!(c.contains(&Family::Ht));
    }

    #[test]
    fn white_edge_excludes_stably_bipartite() {
        let c = classify(&t("b(w1(w2))"));
        assert!(!c.contains(&Family::StablyBipartite));
        assert!(!c.contains(&Family::Bipart));
        assert!(c.contains(&Family::Stable));
    }

    #[test]
    fn arity_one_black_excludes_stable() {
        let c = classify(&t("b(w1(b(w2)))"));
        assert!(!c.contains(&Family::Stable));
        assert!(c.contains(&Family::Bipart));
    }

    #[test]
    fn stably_bipartite_conditions() {
        // arity one, both edges black
        assert!(!Family::StablyBipartite.contains(&t("b(b(b(w1 w2)) w3)")));
        // arity one, black parent edge and a leaf edge
        assert!(!Family::StablyBipartite.contains(&t("b(b(w1) w2)")));
        // arity one, black parent edge and a non-leaf white child is fine
        assert!(Family::StablyBipartite.contains(&t("b(b(w1(b(w2))) w3)")));
        // root of valence one over a black vertex
        assert!(!Family::StablyBipartite.contains(&t("b(b(w1 w2))")));
    }

    #[test]
    fn cyclo_labelling() {
        assert!(Family::Cyclo.contains(&t("b(w1(w2 w3))")));
        assert!(Family::Cyclo.contains(&t("b(w2 w1 w3)")));
        assert!(!Family::Cyclo.contains(&t("b(w3 w1 w2)")));
        assert!(!Family::Cyclo.contains(&t("b(w2(w1 w3))")));
    }

    #[test]
    fn parse_names() {
        for f in ALL_FAMILIES {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("nope".parse::<Family>().is_err());
    }
}
