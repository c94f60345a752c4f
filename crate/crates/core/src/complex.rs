//! Finite cellular chain complexes over the integers and their homology.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::chain::{dimension, ChainElement};
use crate::error::{Error, Result};
use crate::family::Family;
use crate::tree::Tree;

/// Sparse column: nonzero entries `(row, coefficient)`.
pub type Column = Vec<(usize, BigInt)>;

/// A chain complex whose basis in each degree is a list of trees.
///
/// `boundary[d][i]` is the boundary of cell `i` of dimension `d`, written in
/// the basis of dimension `d - 1`.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub name: String,
    pub family: Family,
    pub cells: Vec<Vec<Tree>>,
    pub boundary: Vec<Vec<Column>>,
    index: HashMap<Tree, (usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub betti: Vec<usize>,
    /// Torsion coefficients in each degree (invariant factors greater than one).
    pub torsion: Vec<Vec<BigInt>>,
}

impl Homology {
    pub fn to_json(&self) -> Value {
        json!({
            "betti": self.betti,
            "torsion": self.torsion.iter().map(|t| t.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

impl CellComplex {
    /// Builds the complex spanned by `trees`, graded by the family dimension,
    /// with boundary `diff`. Every boundary term must be one of the cells.
    pub fn from_cells(
        name: impl Into<String>,
        family: Family,
        trees: impl IntoIterator<Item = Tree>,
        diff: impl Fn(&Tree) -> ChainElement,
    ) -> Result<CellComplex> {
        Self::from_graded(
            name,
            family,
            trees.into_iter().map(|t| (dimension(family, &t), t)),
            diff,
        )
    }

    /// Like [`CellComplex::from_cells`] with explicit degrees.
    pub fn from_graded(
        name: impl Into<String>,
        family: Family,
        cells: impl IntoIterator<Item = (usize, Tree)>,
        diff: impl Fn(&Tree) -> ChainElement,
    ) -> Result<CellComplex> {
        let mut by_dim: Vec<Vec<Tree>> = Vec::new();
        let mut index = HashMap::new();
        for (d, mut t) in cells {
            t.clear_tags();
            if index.contains_key(&t) {
                continue;
            }
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            index.insert(t.clone(), (d, by_dim[d].len()));
            by_dim[d].push(t);
        }
        let mut boundary = Vec::with_capacity(by_dim.len());
        for (d, cells) in by_dim.iter().enumerate() {
            let mut cols = Vec::with_capacity(cells.len());
            for t in cells {
                let dt = diff(t);
                let mut col = Vec::new();
                for (s, c) in dt.terms() {
                    match index.get(s) {
                        Some(&(ds, i)) if ds + 1 == d => col.push((i, c.clone())),
                        Some(&(ds, _)) => {
                            return Err(Error::CorruptComplex(format!(
                                "boundary of {t} (dim {d}) contains {s} of dim {ds}"
                            )))
                        }
                        None => {
                            return Err(Error::CorruptComplex(format!(
                                "boundary of {t} leaves the complex at {s}"
                            )))
                        }
                    }
                }
                col.sort_by_key(|e| e.0);
                cols.push(col);
            }
            boundary.push(cols);
        }
        Ok(CellComplex {
            name: name.into(),
            family,
            cells: by_dim,
            boundary,
            index,
        })
    }

    pub fn top_dimension(&self) -> Option<usize> {
        self.cells.iter().rposition(|c| !c.is_empty())
    }

    /// Number of cells in each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(d, c)| {
                if d % 2 == 0 {
                    c.len() as i64
                } else {
                    -(c.len() as i64)
                }
            })
            .sum()
    }

    pub fn position(&self, t: &Tree) -> Option<(usize, usize)> {
        let mut t = t.clone();
        t.clear_tags();
        self.index.get(&t).copied()
    }

    pub fn cell(&self, d: usize, i: usize) -> &Tree {
        &self.cells[d][i]
    }

    /// The boundary of a cell as a chain.
    pub fn boundary_chain(&self, d: usize, i: usize) -> ChainElement {
        let mut c = ChainElement::zero(self.family);
        if d > 0 {
            for (j, k) in &self.boundary[d][i] {
                c.add_term(self.cells[d - 1][*j].clone(), k.clone());
            }
        }
        c
    }

    /// Dense matrix of the boundary map from degree `d` to `d - 1`.
    pub fn boundary_matrix(&self, d: usize) -> Vec<Vec<BigInt>> {
        let rows = if d == 0 { 0 } else { self.cells[d - 1].len() };
        let cols = self.cells.get(d).map_or(0, Vec::len);
        let mut m = vec![vec![BigInt::zero(); cols]; rows];
        if d > 0 && d < self.boundary.len() {
            for (j, col) in self.boundary[d].iter().enumerate() {
                for (i, c) in col {
                    m[*i][j] = c.clone();
                }
            }
        }
        m
    }

    /// Cells whose boundary squared is nonzero, with the residue.
    pub fn d_squared_failures(&self) -> Vec<(Tree, ChainElement)> {
        let mut out = Vec::new();
        for d in 2..self.cells.len() {
            for (i, col) in self.boundary[d].iter().enumerate() {
                let mut acc: HashMap<usize, BigInt> = HashMap::new();
                for (j, c) in col {
                    for (k, e) in &self.boundary[d - 1][*j] {
                        *acc.entry(*k).or_default() += c * e;
                    }
                }
                let mut residue = ChainElement::zero(self.family);
                for (k, c) in acc {
                    residue.add_term(self.cells[d - 2][k].clone(), c);
                }
                if !residue.is_zero() {
                    out.push((self.cells[d][i].clone(), residue));
                }
            }
        }
        out
    }

    pub fn d_squared_is_zero(&self) -> bool {
        self.d_squared_failures().is_empty()
    }

    /// Integral homology, computed from Smith normal forms of the boundary maps.
    pub fn homology(&self) -> Homology {
        let n = self.cells.len();
        let invariants: Vec<Vec<BigInt>> = (0..=n)
            .map(|d| {
                if d == 0 || d >= n {
                    Vec::new()
                } else {
                    smith_invariants(self.boundary_matrix(d))
                }
            })
            .collect();
        let mut betti = Vec::with_capacity(n);
        let mut torsion = Vec::with_capacity(n);
        for d in 0..n {
            let rank_out = invariants[d].len();
            let rank_in = invariants[d + 1].len();
            betti.push(self.cells[d].len() - rank_out - rank_in);
            torsion.push(
                invariants[d + 1]
                    .iter()
                    .filter(|x| !x.is_one())
                    .cloned()
                    .collect(),
            );
        }
        Homology { betti, torsion }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "family": self.family.name(),
            "f_vector": self.f_vector(),
            "euler_characteristic": self.euler_characteristic(),
            "cells": self.cells.iter().enumerate().map(|(d, cs)| cs.iter().enumerate().map(|(i, t)| json!({
                "dim": d,
                "tree": t.to_compact(),
                "boundary": self.boundary[d][i].iter().map(|(j, c)| json!([j, c.to_string()])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
#[allow(clippy::needless_range_loop)] // row operations read one row while writing another
pub fn smith_invariants(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..cols {
                    let v = &q * &m[t][j];
                    m[i][j] -= v;
                }
                if !m[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for i in t..rows {
                    let v = &q * &m[i][t];
                    m[i][j] -= v;
                }
                if !m[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // the pivot must divide every remaining entry
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            let v = m[i][j].clone();
                            m[t][j] += v;
                        }
                        continue;
                    }
                }
            }
            // move a smaller remainder into the pivot position
            let mut best = (t, t);
            for i in t..rows {
                if !m[i][t].is_zero() && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !m[t][j].is_zero() && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                m.swap(t, best.0);
            }
            if best.1 != t {
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn smith_forms() {
        assert_eq!(
            smith_invariants(mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])),
            vec![2.into(), 6.into(), 12.into()]
        );
        assert_eq!(
            smith_invariants(mat(&[&[1, 1], &[1, 1]])),
            vec![BigInt::one()]
        );
        assert_eq!(
            smith_invariants(mat(&[&[2, 0], &[0, 3]])),
            vec![BigInt::one(), 6.into()]
        );
        assert!(smith_invariants(Vec::new()).is_empty());
    }
}
