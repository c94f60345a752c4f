//! Finite integer combinations of trees.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::family::Family;
use crate::tree::{Height, Node, Tree};

/// A formal sum of trees of one family with nonzero integer coefficients,
/// kept in canonical tree order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainElement {
    pub family: Family,
    terms: BTreeMap<Tree, BigInt>,
}

impl ChainElement {
    pub fn zero(family: Family) -> ChainElement {
        ChainElement {
            family,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_tree(family: Family, t: Tree) -> ChainElement {
        let mut c = ChainElement::zero(family);
        c.add_term(t, BigInt::one());
        c
    }

    pub fn add_term(&mut self, mut t: Tree, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        t.clear_tags();
        let entry = self.terms.entry(t);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_signed(&mut self, t: Tree, sign: i32) {
        self.add_term(t, BigInt::from(sign));
    }

    pub fn add_assign_scaled(&mut self, other: &ChainElement, k: &BigInt) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c * k);
        }
    }

    pub fn add(&self, other: &ChainElement) -> ChainElement {
        let mut r = self.clone();
        r.add_assign_scaled(other, &BigInt::one());
        r
    }

    pub fn sub(&self, other: &ChainElement) -> ChainElement {
        let mut r = self.clone();
        r.add_assign_scaled(other, &-BigInt::one());
        r
    }

    pub fn scale(&self, k: &BigInt) -> ChainElement {
        let mut r = ChainElement::zero(self.family);
        r.add_assign_scaled(self, k);
        r
    }

    pub fn neg(&self) -> ChainElement {
        self.scale(&-BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &Tree) -> BigInt {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    /// Applies a linear map given on basis trees.
    pub fn map_linear(&self, target: Family, f: impl Fn(&Tree) -> ChainElement) -> ChainElement {
        let mut r = ChainElement::zero(target);
        for (t, c) in &self.terms {
            r.add_assign_scaled(&f(t), c);
        }
        r
    }

    /// The common cell dimension of all terms, if they agree.
    pub fn degree(&self) -> Option<usize> {
        let mut dims = self.terms.keys().map(|t| dimension(self.family, t));
        let first = dims.next()?;
        dims.all(|d| d == first).then_some(first)
    }

    /// Sum of absolute values of coefficients.
    pub fn weight(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family.name(),
            "terms": self.terms.iter().map(|(t, c)| json!({"coeff": c.to_string(), "tree": t.to_json()})).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ChainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Whether the root only plants a white vertex (valence one over white).
pub fn is_planting(root: &Node) -> bool {
    root.arity() == 1 && root.children[0].is_white()
}

/// Cell dimension of a tree in the model attached to its family.
///
/// Bipartite trees: the sum of white arities. Stable trees: the sum of white
/// arities plus `arity - 2` for every black vertex except a planting root.
/// Trees with heights: the sum of white arities plus the number of edges of
/// height `v`.
pub fn dimension(family: Family, t: &Tree) -> usize {
    let mut white = 0usize;
    let mut black_excess = 0isize;
    let mut var = 0usize;
    let planting = is_planting(t.root());
    t.for_each(|p, n| {
        if n.is_white() {
            white += n.arity();
        } else if !(p.is_empty() && planting) {
            black_excess += n.arity() as isize - 2;
        }
        if n.height == Some(Height::Var) {
            var += 1;
        }
    });
    match family.parent() {
        Family::Bipart => white,
        Family::Stable => (white as isize + black_excess).max(0) as usize,
        _ => white + var,
    }
}
