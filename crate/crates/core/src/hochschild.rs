//! Hochschild cochains of a finite-dimensional A-infinity algebra and the
//! action of stable trees on them.
//!
//! All computations take place on the suspension `V = sA`, where `|sa| =
//! |a| - 1`. There every structure map `m_k` has degree 1, a cochain is any
//! multilinear map `V^k -> V`, and the only signs are Koszul signs. The
//! degree of a cochain is read off entry by entry, so sums of cochains of
//! different degrees or arities are handled without extra bookkeeping.
//!
//! A stable tree acts as a flow chart: a white vertex labelled `j` applies
//! the brace `f_j{...}` to the results of its children and a black vertex
//! applies the brace `m{...}` of the whole structure. When `m = m_2` this is
//! the strict product of the children. With higher `m_k` the extra slots
//! stay free, and only this reading commutes with the differentials.
//!
//! Black vertices other than a planting root are odd, so they pick up the
//! Koszul sign of the cochains preceding them. The cell of a tree and its
//! operation are then related by the orientation sign [`action_sign`].

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::chain::{dimension, is_planting, ChainElement};
use crate::differential::diff_tree;
use crate::enumerate::enumerate_family;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::tree::{Node, Tree};

pub type Q = BigRational;

/// Default bound on the arity of cochains.
pub const DEFAULT_CAP: usize = 5;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn parity_sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(a, b))
        }
        None => Ok(Q::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// A multilinear map `V^k -> V`, stored sparsely: every input tuple of basis
/// indices maps to an output vector. Several arities may be present.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cochain {
    pub entries: BTreeMap<Vec<usize>, BTreeMap<usize, Q>>,
}

impl Cochain {
    pub fn zero() -> Cochain {
        Cochain::default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_entry(&mut self, inputs: Vec<usize>, out: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let row = self.entries.entry(inputs.clone()).or_default();
        let v = row.entry(out).or_insert_with(Q::zero);
        *v += c;
        if v.is_zero() {
            row.remove(&out);
            if row.is_empty() {
                self.entries.remove(&inputs);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, usize, &Q)> {
        self.entries
            .iter()
            .flat_map(|(i, row)| row.iter().map(move |(o, c)| (i, *o, c)))
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.add_scaled(other, &Q::one())
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add_scaled(other, &-Q::one())
    }

    pub fn add_scaled(&self, other: &Cochain, k: &Q) -> Cochain {
        let mut out = self.clone();
        for (i, o, c) in other.iter() {
            out.add_entry(i.clone(), o, c * k);
        }
        out
    }

    pub fn scale(&self, k: &Q) -> Cochain {
        Cochain::zero().add_scaled(self, k)
    }

    /// The arities present.
    pub fn arities(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.entries.keys().map(Vec::len).collect();
        a.dedup();
        a.sort_unstable();
        a.dedup();
        a
    }

    pub fn max_arity(&self) -> usize {
        self.entries.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn up_to_arity(&self, k: usize) -> Cochain {
        Cochain {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| i.len() <= k)
                .map(|(i, e)| (i.clone(), e.clone()))
                .collect(),
        }
    }

    pub fn arity_part(&self, k: usize) -> Cochain {
        Cochain {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| i.len() == k)
                .map(|(i, r)| (i.clone(), r.clone()))
                .collect(),
        }
    }

    /// The degree, if all entries share one.
    pub fn degree(&self, a: &AInfAlgebra) -> Option<i64> {
        let mut d = None;
        for (i, o, _) in self.iter() {
            let e = a.entry_degree(i, o);
            if d.is_some_and(|d| d != e) {
                return None;
            }
            d = Some(e);
        }
        d
    }

    /// The cochain split into parts of a single degree.
    pub fn homogeneous_parts(&self, a: &AInfAlgebra) -> BTreeMap<i64, Cochain> {
        let mut out: BTreeMap<i64, Cochain> = BTreeMap::new();
        for (i, o, c) in self.iter() {
            out.entry(a.entry_degree(i, o))
                .or_default()
                .add_entry(i.clone(), o, c.clone());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.iter()
                .map(|(i, o, c)| json!([i, o, c.to_string()]))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Cochain> {
        let mut out = Cochain::zero();
        for e in v
            .as_array()
            .ok_or_else(|| Error::Parse("a cochain is a list of entries".into()))?
        {
            let (i, o, c) = parse_entry(e)?;
            out.add_entry(i, o, c);
        }
        Ok(out)
    }
}

fn parse_entry(e: &Value) -> Result<(Vec<usize>, usize, Q)> {
    let bad = || {
        Error::Parse(format!(
            "bad entry {e}, expected [inputs, output, coefficient]"
        ))
    };
    let arr = e.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
    let inputs = arr[0]
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    let out = arr[1].as_u64().ok_or_else(bad)? as usize;
    let c = match &arr[2] {
        Value::String(s) => parse_q(s)?,
        Value::Number(n) => q(n.as_i64().ok_or_else(bad)?),
        _ => return Err(bad()),
    };
    Ok((inputs, out, c))
}

/// A finite-dimensional A-infinity algebra over the rationals.
///
/// `mu[k]` lists the structure constants of `mu_k: A^k -> A`, of degree
/// `2 - k`, as `(inputs, output, coefficient)`. The maps `m_k` on `sA` are
/// `m_k = s mu_k (s^-1)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfAlgebra {
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    pub mu: BTreeMap<usize, Vec<(Vec<usize>, usize, Q)>>,
    pub cap: usize,
}

impl AInfAlgebra {
    pub fn new(basis: &[(&str, i64)]) -> AInfAlgebra {
        AInfAlgebra {
            names: basis.iter().map(|b| b.0.to_string()).collect(),
            degrees: basis.iter().map(|b| b.1).collect(),
            mu: BTreeMap::new(),
            cap: DEFAULT_CAP,
        }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Adds a structure constant of `mu_k`.
    pub fn set(&mut self, inputs: &[usize], out: usize, c: Q) -> Result<()> {
        let k = inputs.len();
        if k == 0 {
            return Err(Error::Constraint("mu_k needs k >= 1".into()));
        }
        if inputs.iter().chain([&out]).any(|&i| i >= self.dim()) {
            return Err(Error::Constraint(format!(
                "basis index out of range in {inputs:?} -> {out}"
            )));
        }
        let d = self.degrees[out] - inputs.iter().map(|&i| self.degrees[i]).sum::<i64>();
        if d != 2 - k as i64 {
            return Err(Error::Constraint(format!(
                "mu_{k}{inputs:?} -> {out} has degree {d}, expected {}",
                2 - k as i64
            )));
        }
        self.mu
            .entry(k)
            .or_default()
            .push((inputs.to_vec(), out, c));
        Ok(())
    }

    /// Degree in `sA` of a basis element.
    pub fn shifted(&self, i: usize) -> i64 {
        self.degrees[i] - 1
    }

    fn entry_degree(&self, inputs: &[usize], out: usize) -> i64 {
        self.shifted(out) - inputs.iter().map(|&i| self.shifted(i)).sum::<i64>()
    }

    /// The structure map `m_k` on `sA`.
    pub fn m(&self, k: usize) -> Cochain {
        let mut out = Cochain::zero();
        for (inputs, o, c) in self.mu.get(&k).into_iter().flatten() {
            // (s^-1)^k: the j-th desuspension passes the earlier inputs
            let odd = inputs
                .iter()
                .enumerate()
                .map(|(j, &i)| (k - 1 - j) as i64 * self.shifted(i))
                .sum::<i64>()
                % 2
                != 0;
            out.add_entry(inputs.clone(), *o, c * parity_sign(odd));
        }
        out
    }

    /// `m = m_1 + m_2 + ...`.
    pub fn m_all(&self) -> Cochain {
        self.mu
            .keys()
            .fold(Cochain::zero(), |acc, &k| acc.add(&self.m(k)))
    }

    /// Whether `m_2` is the only structure map.
    pub fn is_associative(&self) -> bool {
        self.mu.iter().all(|(&k, e)| k == 2 || e.is_empty())
    }

    pub fn max_mu(&self) -> usize {
        self.mu.keys().copied().max().unwrap_or(0)
    }

    /// The identity of `V` as a cochain of arity one.
    pub fn identity(&self) -> Cochain {
        let mut out = Cochain::zero();
        for i in 0..self.dim() {
            out.add_entry(vec![i], i, Q::one());
        }
        out
    }

    /// An element of `A` as a cochain of arity zero.
    pub fn element(&self, coeffs: &[(usize, Q)]) -> Cochain {
        let mut out = Cochain::zero();
        for (i, c) in coeffs {
            out.add_entry(Vec::new(), *i, c.clone());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "basis": self.names.iter().zip(&self.degrees).map(|(n, d)| json!({"name": n, "degree": d})).collect::<Vec<_>>(),
            "mu": self.mu.iter().map(|(k, es)| {
                (k.to_string(), Value::Array(es.iter().map(|(i, o, c)| json!([i, o, c.to_string()])).collect()))
            }).collect::<serde_json::Map<_, _>>(),
            "cap": self.cap,
        })
    }

    pub fn from_json(v: &Value) -> Result<AInfAlgebra> {
        let basis = v["basis"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing basis".into()))?;
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for b in basis {
            names.push(
                b["name"]
                    .as_str()
                    .ok_or_else(|| Error::Parse(format!("basis element {b} has no name")))?
                    .to_string(),
            );
            degrees.push(
                b["degree"]
                    .as_i64()
                    .ok_or_else(|| Error::Parse(format!("basis element {b} has no degree")))?,
            );
        }
        let mut a = AInfAlgebra {
            names,
            degrees,
            mu: BTreeMap::new(),
            cap: DEFAULT_CAP,
        };
        if let Some(c) = v.get("cap") {
            a.cap = c
                .as_u64()
                .ok_or_else(|| Error::Parse("cap must be a number".into()))?
                as usize;
        }
        if let Some(mu) = v.get("mu") {
            for (k, es) in mu
                .as_object()
                .ok_or_else(|| Error::Parse("mu must map arities to entries".into()))?
            {
                for e in es
                    .as_array()
                    .ok_or_else(|| Error::Parse(format!("mu_{k} must be a list")))?
                {
                    let (i, o, c) = parse_entry(e)?;
                    if i.len().to_string() != *k {
                        return Err(Error::Parse(format!("entry {e} listed under mu_{k}")));
                    }
                    a.set(&i, o, c)?;
                }
            }
        }
        Ok(a)
    }

    /// The dual numbers `Q[e]/(e^2)` in degree 0.
    pub fn dual_numbers() -> AInfAlgebra {
        let mut a = AInfAlgebra::new(&[("1", 0), ("e", 0)]);
        for (i, j, o) in [(0, 0, 0), (0, 1, 1), (1, 0, 1)] {
            a.set(&[i, j], o, Q::one()).unwrap();
        }
        a
    }

    /// The free graded commutative algebra on `u` (degree -1) and `x`
    /// (degree 0) truncated by `x^2 = 0`, with `du = x`.
    pub fn koszul_dga() -> AInfAlgebra {
        let mut a = AInfAlgebra::new(&[("1", 0), ("u", -1), ("x", 0), ("ux", -1)]);
        a.set(&[1], 2, Q::one()).unwrap();
        // d(ux) = du x - u dx = x^2 = 0
        for i in 0..4 {
            a.set(&[0, i], i, Q::one()).unwrap();
            if i != 0 {
                a.set(&[i, 0], i, Q::one()).unwrap();
            }
        }
        a.set(&[1, 2], 3, Q::one()).unwrap();
        a.set(&[2, 1], 3, Q::one()).unwrap();
        a
    }

    /// A strictly unital algebra with `mu_3(x, x, x) = y`, `|x| = 1` and
    /// `|y| = 2`, where all other products of `x` and `y` vanish.
    pub fn massey_example() -> AInfAlgebra {
        let mut a = AInfAlgebra::new(&[("1", 0), ("x", 1), ("y", 2)]);
        for i in 0..3 {
            a.set(&[0, i], i, Q::one()).unwrap();
            if i != 0 {
                a.set(&[i, 0], i, Q::one()).unwrap();
            }
        }
        a.set(&[1, 1, 1], 2, Q::one()).unwrap();
        a
    }

    /// The test algebras by name.
    pub fn named(name: &str) -> Result<AInfAlgebra> {
        match name {
            "dual" | "dual-numbers" => Ok(AInfAlgebra::dual_numbers()),
            "dga" | "koszul" => Ok(AInfAlgebra::koszul_dga()),
            "massey" | "mu3" => Ok(AInfAlgebra::massey_example()),
            _ => Err(Error::Parse(format!(
                "unknown algebra {name:?} (expected dual, dga or mu3)"
            ))),
        }
    }
}

/// Entries of a cochain grouped by output, with their degrees.
type ByOutput<'a> = HashMap<usize, Vec<(&'a Vec<usize>, &'a Q, i64)>>;

fn by_output<'a>(a: &AInfAlgebra, g: &'a Cochain) -> ByOutput<'a> {
    let mut out: ByOutput = HashMap::new();
    for (i, o, c) in g.iter() {
        out.entry(o).or_default().push((i, c, a.entry_degree(i, o)));
    }
    out
}

/// `h` with `gs` plugged into increasing slots. With `full` every slot is
/// filled. The sign is the Koszul sign of each `g_j` passing the inputs to
/// its left.
fn insert(a: &AInfAlgebra, h: &Cochain, gs: &[&Cochain], full: bool) -> Cochain {
    let idx: Vec<ByOutput> = gs.iter().map(|g| by_output(a, g)).collect();
    let mut out = Cochain::zero();
    for (hin, hout, hc) in h.iter() {
        let len = hin.len();
        if gs.len() > len || (full && gs.len() != len) {
            continue;
        }
        let mut state = Fill {
            a,
            hin,
            idx: &idx,
            out: &mut out,
            hout,
            acc: Vec::new(),
        };
        state.go(0, 0, 0, false, hc.clone());
    }
    out
}

struct Fill<'a, 'b> {
    a: &'a AInfAlgebra,
    hin: &'a [usize],
    idx: &'a [ByOutput<'b>],
    out: &'a mut Cochain,
    hout: usize,
    acc: Vec<usize>,
}

impl Fill<'_, '_> {
    /// Slot `slot` of `h`, next argument `j`, parity of the degrees of the
    /// inputs placed so far.
    fn go(&mut self, slot: usize, j: usize, left: i64, odd: bool, c: Q) {
        let k = self.idx.len();
        if j == k {
            let mut inputs = self.acc.clone();
            inputs.extend_from_slice(&self.hin[slot..]);
            self.out.add_entry(inputs, self.hout, c * parity_sign(odd));
            return;
        }
        if self.hin.len() - slot < k - j {
            return;
        }
        // slot receives g_j
        let target = self.hin[slot];
        if let Some(entries) = self.idx[j].get(&target) {
            for (gin, gc, gd) in entries.clone() {
                let sign = gd * left % 2 != 0;
                let before = self.acc.len();
                self.acc.extend_from_slice(gin);
                let l2 = left + gin.iter().map(|&i| self.a.shifted(i)).sum::<i64>();
                self.go(slot + 1, j + 1, l2, odd ^ sign, &c * gc);
                self.acc.truncate(before);
            }
        }
        // slot stays an input
        if self.hin.len() - slot > k - j {
            self.acc.push(target);
            let l2 = left + self.a.shifted(target);
            self.go(slot + 1, j, l2, odd, c);
            self.acc.pop();
        }
    }
}

/// The brace `h{g_1, ..., g_k}`: the sum over all ways of plugging the
/// `g_j` into distinct slots of `h` in order.
pub fn brace(a: &AInfAlgebra, h: &Cochain, gs: &[&Cochain]) -> Cochain {
    if gs.is_empty() {
        return h.clone();
    }
    insert(a, h, gs, false)
}

/// `m_l(g_1, ..., g_l)`, every slot filled.
pub fn mu_compose(a: &AInfAlgebra, gs: &[&Cochain]) -> Result<Cochain> {
    let l = gs.len();
    if l > a.cap {
        return Err(Error::CapExceeded {
            what: "arity of mu",
            n: l,
            cap: a.cap,
        });
    }
    Ok(insert(a, &a.m(l), gs, true))
}

/// The brace `m{g_1, ..., g_l}` of the full structure, free inputs allowed.
/// Only the components of `m` whose output stays within the cap are used.
pub fn mu_brace(a: &AInfAlgebra, gs: &[&Cochain]) -> Result<Cochain> {
    let l = gs.len();
    let used: usize = gs.iter().map(|g| g.max_arity()).sum();
    if used > a.cap {
        return Err(Error::ArityOverflow(format!(
            "inputs of total arity {used} exceed the cap {}",
            a.cap
        )));
    }
    let mut m = Cochain::zero();
    for k in l.max(1)..=a.cap - used + l {
        m = m.add(&a.m(k));
    }
    Ok(insert(a, &m, gs, false))
}

/// The Gerstenhaber product `m{f} - (-1)^|f| f{m}`, the differential of the
/// Hochschild complex.
pub fn hochschild_differential(a: &AInfAlgebra, f: &Cochain) -> Result<Cochain> {
    let m = a.m_all();
    let mut out = brace(a, &m, &[f]);
    for (d, part) in f.homogeneous_parts(a) {
        out = out.add_scaled(&brace(a, &part, &[&m]), &-parity_sign(d % 2 != 0));
    }
    check_cap(a, &out)?;
    Ok(out)
}

fn check_cap(a: &AInfAlgebra, c: &Cochain) -> Result<()> {
    if c.max_arity() > a.cap {
        return Err(Error::ArityOverflow(format!(
            "a cochain of arity {} exceeds the cap {}",
            c.max_arity(),
            a.cap
        )));
    }
    Ok(())
}

/// The Gerstenhaber bracket `f{g} - (-1)^(|f||g|) g{f}`.
pub fn bracket(a: &AInfAlgebra, f: &Cochain, g: &Cochain) -> Cochain {
    let mut out = Cochain::zero();
    for (df, fp) in f.homogeneous_parts(a) {
        for (dg, gp) in g.homogeneous_parts(a) {
            out = out
                .add(&brace(a, &fp, &[&gp]))
                .add_scaled(&brace(a, &gp, &[&fp]), &-parity_sign(df * dg % 2 != 0));
        }
    }
    out
}

/// The cup product `m_2(f, g)`.
pub fn cup(a: &AInfAlgebra, f: &Cochain, g: &Cochain) -> Cochain {
    insert(a, &a.m(2), &[f, g], true)
}

fn evaluate_node(a: &AInfAlgebra, v: &Node, root: bool, fs: &[Cochain]) -> Result<Cochain> {
    let results = v
        .children
        .iter()
        .map(|c| evaluate_node(a, c, false, fs))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Cochain> = results.iter().collect();
    let out = if v.is_white() {
        let j = *v
            .labels
            .first()
            .ok_or_else(|| Error::InvalidTree("white vertex without a label".into()))?
            as usize;
        let f = fs.get(j - 1).ok_or(Error::IndexOutOfRange {
            slot: j,
            arity: fs.len(),
        })?;
        brace(a, f, &refs)
    } else if root && is_planting(v) {
        results.into_iter().next().unwrap()
    } else {
        mu_brace(a, &refs)?
    };
    check_cap(a, &out)?;
    Ok(out)
}

/// The operation of a stable tree on the cochains `fs`, `f_j` sitting at the
/// white vertex labelled `j`.
pub fn evaluate_tree(a: &AInfAlgebra, t: &Tree, fs: &[Cochain]) -> Result<Cochain> {
    if !Family::Stable.contains(t) {
        return Err(Error::FamilyMismatch {
            expected: Family::Stable,
        });
    }
    if fs.len() != t.n_white() {
        return Err(Error::ArityMismatch(format!(
            "{t} takes {} cochains, got {}",
            t.n_white(),
            fs.len()
        )));
    }
    let out = evaluate_node(a, t.root(), true, fs)?;
    Ok(out.scale(&input_order_sign(a, t, fs)?))
}

/// The Koszul sign of the operation written as a word: each black vertex
/// other than a planting root is an odd symbol and each white vertex carries
/// its cochain. The word starts with the black vertices in preorder and the
/// cochains in label order, and is moved into the preorder of the tree.
fn input_order_sign(a: &AInfAlgebra, t: &Tree, fs: &[Cochain]) -> Result<Q> {
    let mut degrees = Vec::new();
    for f in fs {
        // the zero cochain has every degree; any choice gives 0
        degrees.push(if f.is_zero() {
            0
        } else {
            f.degree(a)
                .ok_or_else(|| Error::Constraint("cochains must be homogeneous".into()))?
        });
    }
    let mut odd = false;
    let mut seen: Vec<usize> = Vec::new();
    t.for_each(|p, v| {
        if v.is_white() {
            let j = v.labels[0] as usize - 1;
            for &i in &seen {
                if i > j {
                    odd ^= degrees[i] * degrees[j] % 2 != 0;
                }
            }
            seen.push(j);
        } else if !(p.is_empty() && is_planting(v)) {
            odd ^= seen.iter().map(|&i| degrees[i]).sum::<i64>() % 2 != 0;
        }
    });
    Ok(parity_sign(odd))
}

/// The operation of a chain of stable trees.
pub fn evaluate_chain(a: &AInfAlgebra, x: &ChainElement, fs: &[Cochain]) -> Result<Cochain> {
    let mut out = Cochain::zero();
    for (t, k) in x.terms() {
        out = out.add_scaled(&evaluate_tree(a, t, fs)?, &Q::from_integer(k.clone()));
    }
    Ok(out)
}

/// Degree of the operation of a tree on `sA`: one for each black vertex
/// other than a planting root.
pub fn operation_degree(t: &Tree) -> i64 {
    let mut k = 0;
    t.for_each(|p, v| {
        if v.is_black() && !(p.is_empty() && is_planting(v)) {
            k += 1;
        }
    });
    k
}

#[derive(Clone, Debug)]
pub struct StasheffReport {
    /// Number of nonzero entries of the relation in each arity.
    pub violations: BTreeMap<usize, usize>,
    pub first: Option<(Vec<usize>, usize, Q)>,
    pub cap: usize,
}

impl StasheffReport {
    pub fn passed(&self) -> bool {
        self.violations.values().all(|&v| v == 0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cap": self.cap,
            "passed": self.passed(),
            "violations": self.violations.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "first": self.first.as_ref().map(|(i, o, c)| json!([i, o, c.to_string()])),
        })
    }
}

/// Checks the relations `sum m_r{m_s} = 0` in every arity up to the cap.
pub fn check_stasheff(a: &AInfAlgebra) -> StasheffReport {
    let m = a.m_all();
    let rel = brace(a, &m, &[&m]);
    let mut violations: BTreeMap<usize, usize> = (1..=a.cap).map(|k| (k, 0)).collect();
    let mut first = None;
    for (i, o, c) in rel.iter() {
        if i.len() <= a.cap {
            *violations.get_mut(&i.len()).unwrap() += 1;
            first.get_or_insert_with(|| (i.clone(), o, c.clone()));
        }
    }
    StasheffReport {
        violations,
        first,
        cap: a.cap,
    }
}

/// A random cochain of one arity and one degree with small integer
/// coefficients, or `None` if no entry has the requested degree.
pub fn random_cochain(
    a: &AInfAlgebra,
    arity: usize,
    degree: i64,
    rng: &mut impl Rng,
) -> Option<Cochain> {
    let d = a.dim();
    let mut slots = Vec::new();
    let mut inputs = vec![0usize; arity];
    loop {
        for o in 0..d {
            if a.entry_degree(&inputs, o) == degree {
                slots.push((inputs.clone(), o));
            }
        }
        // next tuple
        let mut k = arity;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            inputs[k] += 1;
            if inputs[k] < d {
                break;
            }
            inputs[k] = 0;
        }
        if inputs.iter().all(|&i| i == 0) {
            break;
        }
    }
    if slots.is_empty() {
        return None;
    }
    let mut out = Cochain::zero();
    for (i, o) in &slots {
        if rng.gen_bool(0.6) {
            out.add_entry(i.clone(), *o, q(rng.gen_range(-2..=2)));
        }
    }
    if out.is_zero() {
        let (i, o) = &slots[rng.gen_range(0..slots.len())];
        out.add_entry(i.clone(), *o, Q::one());
    }
    Some(out)
}

/// The degrees available for cochains of the given arity.
fn degrees_of_arity(a: &AInfAlgebra, arity: usize) -> Vec<i64> {
    let lo = a.degrees.iter().map(|&d| d - 1).min().unwrap_or(0);
    let hi = a.degrees.iter().map(|&d| d - 1).max().unwrap_or(0);
    let k = arity as i64;
    (lo - k * hi..=hi - k * lo).collect()
}

pub fn random_homogeneous(a: &AInfAlgebra, arity: usize, rng: &mut impl Rng) -> Cochain {
    let ds = degrees_of_arity(a, arity);
    loop {
        let d = ds[rng.gen_range(0..ds.len())];
        if let Some(c) = random_cochain(a, arity, d, rng) {
            return c;
        }
    }
}

/// `[delta, tau](f) = delta(tau(f)) - (-1)^|tau| sum_i (-1)^(|f_1|+...+|f_(i-1)|) tau(f_1, ..., delta f_i, ..., f_n)`.
pub fn commutator_with_delta(a: &AInfAlgebra, t: &Tree, fs: &[Cochain]) -> Result<Cochain> {
    let mut out = hochschild_differential(a, &evaluate_tree(a, t, fs)?)?;
    let outer = parity_sign(operation_degree(t) % 2 != 0);
    let mut before = 0i64;
    for i in 0..fs.len() {
        let mut gs = fs.to_vec();
        gs[i] = hochschild_differential(a, &fs[i])?;
        let s = &outer * parity_sign(before % 2 != 0);
        out = out.add_scaled(&evaluate_tree(a, t, &gs)?, &-s);
        before += fs[i]
            .degree(a)
            .ok_or_else(|| Error::Constraint("sample cochains must be homogeneous".into()))?;
    }
    Ok(out)
}

/// The orientation of a stable tree as an operation relative to its cell:
/// the sign of the labels read in preorder, times `(-1)^dim`, times `-1` for
/// each white vertex preceding a black vertex other than a planting root.
pub fn action_sign(t: &Tree) -> i32 {
    let mut odd = !dimension(Family::Stable, t).is_multiple_of(2);
    let mut seen: Vec<u32> = Vec::new();
    t.for_each(|p, v| {
        if v.is_white() {
            let j = v.labels[0];
            odd ^= seen.iter().filter(|&&i| i > j).count() % 2 != 0;
            seen.push(j);
        } else if !(p.is_empty() && is_planting(v)) {
            odd ^= !seen.len().is_multiple_of(2);
        }
    });
    if odd {
        -1
    } else {
        1
    }
}

#[derive(Clone, Debug)]
pub struct DgReport {
    pub n: usize,
    pub trees: usize,
    pub checks: usize,
    /// Checks in which the two sides are not both zero.
    pub nonzero: usize,
    pub failures: Vec<String>,
}

impl DgReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({"n": self.n, "trees": self.trees, "checks": self.checks, "nonzero": self.nonzero, "passed": self.passed(), "failures": self.failures})
    }
}

/// Checks `sum_s k_s sigma(s) s(f) = sigma(tau) [delta, tau](f)` on random
/// homogeneous cochains for every stable tree `tau` with `n` white vertices,
/// where `d tau = sum_s k_s s` and `sigma` is [`action_sign`]. Both sides are
/// compared in arities up to the cap, where the truncated structure is exact.
pub fn check_dg_action(a: &AInfAlgebra, n: usize, samples: usize, seed: u64) -> Result<DgReport> {
    if n > 3 {
        return Err(Error::CapExceeded {
            what: "n",
            n,
            cap: 3,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trees = enumerate_family(Family::Stable, n)?;
    let mut work = a.clone();
    work.cap = a.cap + (n + 2) * a.max_mu().max(2);
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut nonzero = 0;
    for t in &trees {
        let d = diff_tree(Family::Stable, t);
        for _ in 0..samples {
            let mut arities: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            while arities.iter().sum::<usize>() > a.cap.saturating_sub(1) {
                let i = arities.iter().position(|&x| x > 0).unwrap();
                arities[i] -= 1;
            }
            let fs: Vec<Cochain> = arities
                .iter()
                .map(|&k| random_homogeneous(a, k, &mut rng))
                .collect();
            let mut lhs = Cochain::zero();
            for (s, k) in d.terms() {
                let w = Q::from_integer(k * BigInt::from(action_sign(s)));
                lhs = lhs.add_scaled(&evaluate_tree(&work, s, &fs)?, &w);
            }
            let rhs = commutator_with_delta(&work, t, &fs)?.scale(&q(action_sign(t) as i64));
            checks += 1;
            let (lhs, rhs) = (lhs.up_to_arity(a.cap), rhs.up_to_arity(a.cap));
            if !rhs.is_zero() {
                nonzero += 1;
            }
            if lhs != rhs {
                failures.push(format!("{t} on arities {arities:?}"));
                break;
            }
        }
    }
    Ok(DgReport {
        n,
        trees: trees.len(),
        checks,
        nonzero,
        failures,
    })
}

/// The operation of a chain, each tree twisted by [`action_sign`].
pub fn act(a: &AInfAlgebra, x: &ChainElement, fs: &[Cochain]) -> Result<Cochain> {
    let mut out = Cochain::zero();
    for (t, k) in x.terms() {
        out = out.add_scaled(
            &evaluate_tree(a, t, fs)?,
            &Q::from_integer(k * BigInt::from(action_sign(t))),
        );
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CompositionReport {
    pub n: usize,
    pub checks: usize,
    pub nonzero: usize,
    pub failures: Vec<String>,
}

impl CompositionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({"n": self.n, "checks": self.checks, "nonzero": self.nonzero, "passed": self.passed(), "failures": self.failures})
    }
}

/// Checks that the twisted action respects operad composition:
/// `act(tau o_i sigma)(f) = c act(tau)(f_1, .., act(sigma)(f_i, ..), ..)`
/// for every pair of stable trees with `n` inputs in total, where
/// `c = (-1)^((i-1) deg sigma + (n_tau - i) dim sigma)` and each `f_j` with
/// `j < i` contributes its Koszul sign against `sigma`.
pub fn check_composition(
    a: &AInfAlgebra,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<CompositionReport> {
    if n > 3 {
        return Err(Error::CapExceeded {
            what: "n",
            n,
            cap: 3,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = a.clone();
    work.cap = a.cap + (n + 2) * a.max_mu().max(2);
    let (mut checks, mut nonzero, mut failures) = (0, 0, Vec::new());
    for p in 1..=n {
        let q_ = n + 1 - p;
        let outer = enumerate_family(Family::Stable, p)?;
        let inner = enumerate_family(Family::Stable, q_)?;
        for t in &outer {
            for s in &inner {
                for i in 1..=p {
                    let composite = crate::operad::compose_trees(Family::Stable, t, i, s)?;
                    let fixed = (i - 1) * operation_degree(s) as usize
                        + (p - i) * dimension(Family::Stable, s);
                    for _ in 0..samples {
                        let fs: Vec<Cochain> = (0..n)
                            .map(|_| random_homogeneous(a, rng.gen_range(0..=1), &mut rng))
                            .collect();
                        let lhs = act(&work, &composite, &fs)?;
                        let mut args = fs[..i - 1].to_vec();
                        args.push(act(
                            &work,
                            &ChainElement::from_tree(Family::Stable, s.clone()),
                            &fs[i - 1..i - 1 + q_],
                        )?);
                        args.extend_from_slice(&fs[i - 1 + q_..]);
                        let before: i64 =
                            fs[..i - 1].iter().map(|f| f.degree(a).unwrap_or(0)).sum();
                        let odd = (fixed as i64 + before * operation_degree(s)) % 2 != 0;
                        let rhs = act(
                            &work,
                            &ChainElement::from_tree(Family::Stable, t.clone()),
                            &args,
                        )?
                        .scale(&parity_sign(odd));
                        let (lhs, rhs) = (lhs.up_to_arity(a.cap), rhs.up_to_arity(a.cap));
                        checks += 1;
                        if !rhs.is_zero() {
                            nonzero += 1;
                        }
                        if lhs != rhs {
                            failures.push(format!("{t} o{i} {s}"));
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(CompositionReport {
        n,
        checks,
        nonzero,
        failures,
    })
}

// ---------------------------------------------------------------------------
// Linear algebra over the rationals

/// Row reduction of a list of vectors; returns the pivot rows.
fn echelon(rows: &[Vec<Q>]) -> Vec<(usize, Vec<Q>)> {
    let mut basis: Vec<(usize, Vec<Q>)> = Vec::new();
    for r in rows {
        if let Some(v) = reduce(&basis, r.clone()) {
            basis.push(v);
        }
    }
    basis
}

fn reduce(basis: &[(usize, Vec<Q>)], mut v: Vec<Q>) -> Option<(usize, Vec<Q>)> {
    for (p, b) in basis {
        if !v[*p].is_zero() {
            let k = v[*p].clone() / &b[*p];
            for (x, y) in v.iter_mut().zip(b) {
                *x -= &k * y;
            }
        }
    }
    let p = v.iter().position(|x| !x.is_zero())?;
    Some((p, v))
}

/// Coordinates of cochains of one arity.
struct Coords {
    index: HashMap<(Vec<usize>, usize), usize>,
    keys: Vec<(Vec<usize>, usize)>,
}

impl Coords {
    fn new(a: &AInfAlgebra, arity: usize) -> Coords {
        let d = a.dim();
        let mut keys = Vec::new();
        let total = d.pow(arity as u32);
        for mut code in 0..total {
            let mut inputs = vec![0; arity];
            for k in (0..arity).rev() {
                inputs[k] = code % d;
                code /= d;
            }
            for o in 0..d {
                keys.push((inputs.clone(), o));
            }
        }
        let index = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        Coords { index, keys }
    }

    fn vector(&self, c: &Cochain) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.keys.len()];
        for (i, o, x) in c.iter() {
            v[self.index[&(i.clone(), o)]] = x.clone();
        }
        v
    }

    fn cochain(&self, v: &[Q]) -> Cochain {
        let mut out = Cochain::zero();
        for (k, x) in self.keys.iter().zip(v) {
            out.add_entry(k.0.clone(), k.1, x.clone());
        }
        out
    }
}

/// Hochschild cohomology of an algebra with `mu_2` only, by arity.
pub struct HochschildCohomology {
    pub dims: Vec<usize>,
    /// Cocycles representing a basis of each group.
    pub classes: Vec<Vec<Cochain>>,
    coboundaries: Vec<Vec<(usize, Vec<Q>)>>,
    coords: Vec<Coords>,
}

impl HochschildCohomology {
    /// Groups in arities `0..=top`.
    pub fn compute(a: &AInfAlgebra, top: usize) -> Result<HochschildCohomology> {
        if !a.is_associative() {
            return Err(Error::Constraint(
                "cohomology is computed for associative algebras".into(),
            ));
        }
        let coords: Vec<Coords> = (0..=top + 1).map(|k| Coords::new(a, k)).collect();
        let mut images: Vec<Vec<Vec<Q>>> = vec![Vec::new(); top + 2];
        let mut kernels = Vec::new();
        for k in 0..=top {
            let mut imgs = Vec::new();
            for key in &coords[k].keys {
                let mut e = Cochain::zero();
                e.add_entry(key.0.clone(), key.1, Q::one());
                imgs.push(coords[k + 1].vector(&hochschild_differential(a, &e)?));
            }
            kernels.push(kernel(&imgs));
            images[k + 1] = imgs;
        }
        let coboundaries: Vec<Vec<(usize, Vec<Q>)>> =
            (0..=top).map(|k| echelon(&images[k])).collect();
        let mut dims = Vec::new();
        let mut classes = Vec::new();
        for k in 0..=top {
            let mut basis = coboundaries[k].clone();
            let mut reps = Vec::new();
            for z in &kernels[k] {
                if let Some(v) = reduce(&basis, z.clone()) {
                    basis.push(v);
                    reps.push(coords[k].cochain(z));
                }
            }
            dims.push(reps.len());
            classes.push(reps);
        }
        Ok(HochschildCohomology {
            dims,
            classes,
            coboundaries,
            coords,
        })
    }

    /// Whether a cochain of arity `k` is a coboundary.
    pub fn is_coboundary(&self, k: usize, c: &Cochain) -> bool {
        if c.is_zero() {
            return true;
        }
        if c.arities() != [k] || k >= self.coboundaries.len() {
            return false;
        }
        reduce(&self.coboundaries[k], self.coords[k].vector(c)).is_none()
    }
}

/// A basis of the kernel of the linear map whose columns are `cols`.
fn kernel(cols: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = cols.len();
    let m = cols.first().map_or(0, Vec::len);
    // rows of the matrix
    let mut rows: Vec<Vec<Q>> = (0..m)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let k = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &k * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); n];
        v[free] = Q::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -rows[i][free].clone();
        }
        out.push(v);
    }
    out
}

#[derive(Clone, Debug)]
pub struct GerstenhaberReport {
    pub dims: Vec<usize>,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl GerstenhaberReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({"dims": self.dims, "checks": self.checks, "passed": self.passed(), "failures": self.failures})
    }
}

/// Checks the Gerstenhaber identities on cocycle representatives in arities
/// `0..=top`, up to coboundaries. Signs use the degrees on `sA`, where the
/// bracket has degree 0 and the cup product degree 1. Each of these must be
/// a coboundary:
///
/// * `f g + (-1)^(|f||g|) g f`,
/// * `[f, g] + (-1)^(|f||g|) [g, f]`,
/// * `[f, g h] - (-1)^|f| ([f, g] h + (-1)^(|f||g|) g [f, h])`,
/// * `(-1)^(|f||h|) [f, [g, h]] + (-1)^(|g||f|) [g, [h, f]] + (-1)^(|h||g|) [h, [f, g]]`.
pub fn check_gerstenhaber_homology(a: &AInfAlgebra, top: usize) -> Result<GerstenhaberReport> {
    let hh = HochschildCohomology::compute(a, top)?;
    let mut failures = Vec::new();
    let mut checks = 0;
    let classes: Vec<(usize, &Cochain, i64)> = hh
        .classes
        .iter()
        .enumerate()
        .flat_map(|(k, cs)| cs.iter().map(move |c| (k, c, c.degree(a).unwrap_or(0))))
        .collect();
    let s = |x: i64| parity_sign(x % 2 != 0);
    let mut check = |what: &str, k: usize, c: Cochain| {
        checks += 1;
        if hochschild_differential(a, &c).map_or(true, |d| !d.is_zero()) || !hh.is_coboundary(k, &c)
        {
            failures.push(format!("{what} fails in arity {k}"));
        }
    };
    for &(p, f, df) in &classes {
        for &(q_, g, dg) in &classes {
            if p + q_ <= top {
                check(
                    "graded commutativity of the cup product",
                    p + q_,
                    cup(a, f, g).add_scaled(&cup(a, g, f), &s(df * dg)),
                );
            }
            if p + q_ >= 1 && p + q_ - 1 <= top {
                check(
                    "antisymmetry of the bracket",
                    p + q_ - 1,
                    bracket(a, f, g).add_scaled(&bracket(a, g, f), &s(df * dg)),
                );
            }
            for &(r, h, dh) in &classes {
                if p + q_ + r >= 1 && p + q_ + r - 1 <= top {
                    let rhs = cup(a, &bracket(a, f, g), h)
                        .add_scaled(&cup(a, g, &bracket(a, f, h)), &s(df * dg));
                    check(
                        "the derivation rule",
                        p + q_ + r - 1,
                        bracket(a, f, &cup(a, g, h)).add_scaled(&rhs, &-s(df)),
                    );
                }
                if p + q_ + r >= 2 && p + q_ + r - 2 <= top {
                    let c = bracket(a, f, &bracket(a, g, h))
                        .scale(&s(df * dh))
                        .add(&bracket(a, g, &bracket(a, h, f)).scale(&s(dg * df)))
                        .add(&bracket(a, h, &bracket(a, f, g)).scale(&s(dh * dg)));
                    check("the Jacobi identity", p + q_ + r - 2, c);
                }
            }
        }
    }
    failures.sort();
    failures.dedup();
    Ok(GerstenhaberReport {
        dims: hh.dims,
        checks,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse_compact(s).unwrap()
    }

    fn c(entries: &[(&[usize], usize, i64)]) -> Cochain {
        let mut out = Cochain::zero();
        for (i, o, k) in entries {
            out.add_entry(i.to_vec(), *o, q(*k));
        }
        out
    }

    #[test]
    fn stasheff_relations() {
        for a in [
            AInfAlgebra::dual_numbers(),
            AInfAlgebra::koszul_dga(),
            AInfAlgebra::massey_example(),
        ] {
            let r = check_stasheff(&a);
            assert!(r.passed(), "{}", r.to_json());
        }
        // a non-associative product fails in arity 3
        let mut a = AInfAlgebra::new(&[("x", 0)]);
        a.set(&[0, 0], 0, q(2)).unwrap();
        a.set(&[0, 0], 0, q(-1)).unwrap();
        assert!(check_stasheff(&a).passed());
        let mut b = AInfAlgebra::new(&[("1", 0), ("e", 0)]);
        b.set(&[1, 1], 0, Q::one()).unwrap();
        b.set(&[0, 1], 1, Q::one()).unwrap();
        let r = check_stasheff(&b);
        assert!(!r.passed() && r.violations[&3] > 0);
        assert!(b.clone().set(&[0], 1, Q::one()).is_err() || b.degrees[1] - b.degrees[0] == 1);
    }

    #[test]
    fn braces() {
        let a = AInfAlgebra::dual_numbers();
        let h = c(&[(&[1, 1], 0, 1), (&[0, 1], 1, 3)]);
        let g = c(&[(&[0], 1, 1)]);
        assert_eq!(brace(&a, &h, &[]), h);
        // h(g(x1), x2) + h(x1, g(x2)): g of degree 0 carries no signs
        let b = brace(&a, &h, &[&g]);
        let expected = c(&[(&[0, 1], 0, 1), (&[1, 0], 0, 1), (&[0, 0], 1, 3)]);
        assert_eq!(b, expected);
        let h3 = c(&[(&[0, 0, 0], 0, 1)]);
        let one = c(&[(&[0], 0, 1)]);
        assert_eq!(brace(&a, &h3, &[&one, &one]).arities(), vec![3]);
        // more arguments than slots give 0
        assert!(brace(&a, &g, &[&one, &one]).is_zero());
    }

    #[test]
    fn cup_on_dual_numbers() {
        let a = AInfAlgebra::dual_numbers();
        let f = c(&[(&[1], 1, 1)]);
        let g = c(&[(&[1], 0, 2)]);
        // m_2(sa, sb) = -s(ab) in degree 0, and f passes no odd inputs
        let direct = {
            let mut out = Cochain::zero();
            for x in 0..2 {
                for y in 0..2 {
                    for (fo, fc) in f.entries.get(&vec![x]).into_iter().flatten() {
                        for (go, gc) in g.entries.get(&vec![y]).into_iter().flatten() {
                            for (i, o, k) in &a.mu[&2] {
                                if *i == vec![*fo, *go] {
                                    let sign = if (x as i64 + 1) % 2 == 1 { -1 } else { 1 };
                                    out.add_entry(vec![x, y], *o, -(fc * gc * k) * q(sign));
                                }
                            }
                        }
                    }
                }
            }
            out
        };
        assert_eq!(mu_compose(&a, &[&f, &g]).unwrap(), direct);
        let id = a.identity();
        assert_eq!(mu_compose(&a, &[&id, &id]).unwrap(), a.m(2));
        assert_eq!(mu_compose(&a, &[&f, &g]).unwrap().arities(), vec![2]);
    }

    #[test]
    fn trees_as_operations() {
        let a = AInfAlgebra::dual_numbers();
        let f1 = c(&[(&[1], 1, 1), (&[0], 0, 1)]);
        let f2 = c(&[(&[1, 1], 0, 1)]);
        let fs = vec![f1.clone(), f2.clone()];
        assert_eq!(evaluate_tree(&a, &t("b(w1)"), &fs[..1]).unwrap(), f1);
        assert_eq!(
            evaluate_tree(&a, &t("b(w1 w2)"), &fs).unwrap(),
            cup(&a, &f1, &f2)
        );
        assert_eq!(
            evaluate_tree(&a, &t("b(w1(w2))"), &fs).unwrap(),
            brace(&a, &f1, &[&f2])
        );
        // two-level white trees factor through nested braces
        let f3 = c(&[(&[0], 1, 1)]);
        let fs3 = vec![f1.clone(), f2.clone(), f3.clone()];
        let nested = brace(&a, &f1, &[&brace(&a, &f2, &[&f3])]);
        assert_eq!(
            evaluate_tree(&a, &t("b(w1(w2(w3)))"), &fs3).unwrap(),
            nested
        );
        assert!(evaluate_tree(&a, &t("b(w1 w2)"), &fs[..1]).is_err());
    }

    #[test]
    fn hochschild_coboundary() {
        let a = AInfAlgebra::dual_numbers();
        // derivation e -> e
        let f = c(&[(&[1], 1, 1)]);
        assert!(hochschild_differential(&a, &f).unwrap().is_zero());
        // classical coboundary x f(y) - f(xy) + f(x) y up to a global sign
        let g = c(&[(&[0], 1, 1)]);
        let d = hochschild_differential(&a, &g).unwrap();
        let mut classical = Cochain::zero();
        let mul = |x: usize, y: usize| a.mu[&2].iter().find(|e| e.0 == vec![x, y]).map(|e| e.1);
        let gv = |x: usize| if x == 0 { Some(1) } else { None };
        for x in 0..2 {
            for y in 0..2 {
                if let Some(fy) = gv(y) {
                    if let Some(o) = mul(x, fy) {
                        classical.add_entry(vec![x, y], o, q(1));
                    }
                }
                if let Some(xy) = mul(x, y) {
                    if let Some(o) = gv(xy) {
                        classical.add_entry(vec![x, y], o, q(-1));
                    }
                }
                if let Some(fx) = gv(x) {
                    if let Some(o) = mul(fx, y) {
                        classical.add_entry(vec![x, y], o, q(1));
                    }
                }
            }
        }
        assert!(d == classical || d == classical.scale(&q(-1)), "{d:?}");
        // the unit is a cocycle, while the identity map gives sum (k - 1) m_k
        assert!(hochschild_differential(&a, &a.element(&[(0, Q::one())]))
            .unwrap()
            .is_zero());
        assert_eq!(hochschild_differential(&a, &a.identity()).unwrap(), a.m(2));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for alg in [
            AInfAlgebra::dual_numbers(),
            AInfAlgebra::koszul_dga(),
            AInfAlgebra::massey_example(),
        ] {
            for k in 0..=2 {
                let f = random_homogeneous(&alg, k, &mut rng);
                let dd = hochschild_differential(&alg, &hochschild_differential(&alg, &f).unwrap())
                    .unwrap();
                assert!(dd.is_zero());
            }
        }
    }

    #[test]
    fn dual_numbers_cohomology() {
        let a = AInfAlgebra::dual_numbers();
        let r = check_gerstenhaber_homology(&a, 3).unwrap();
        // the 2-periodic bimodule resolution gives A, ker 2e, A/(e), ker 2e
        assert_eq!(r.dims, vec![2, 1, 1, 1]);
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn algebra_json_round_trip() {
        for a in [
            AInfAlgebra::dual_numbers(),
            AInfAlgebra::koszul_dga(),
            AInfAlgebra::massey_example(),
        ] {
            assert_eq!(AInfAlgebra::from_json(&a.to_json()).unwrap(), a);
        }
        let bad = json!({"basis": [{"name": "x", "degree": 0}], "mu": {"2": [[[0, 0], 0, "1/0"]]}});
        assert!(AInfAlgebra::from_json(&bad).is_err());
        let c = c(&[(&[0, 1], 1, -3)]);
        assert_eq!(Cochain::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn black_vertices_use_every_component() {
        // with a nonzero mu_3 the cup tree picks up m_3(f, g, x)
        let a = AInfAlgebra::massey_example();
        let f = c(&[(&[], 1, 1)]);
        let got = evaluate_tree(&a, &t("b(w1 w2)"), &[f.clone(), f.clone()]).unwrap();
        assert_eq!(got.arities(), vec![1]);
        assert_eq!(got, mu_brace(&a, &[&f, &f]).unwrap());
        assert!(mu_compose(&a, &[&f, &f]).unwrap().is_zero());
    }

    #[test]
    fn dg_action() {
        for a in [
            AInfAlgebra::dual_numbers(),
            AInfAlgebra::koszul_dga(),
            AInfAlgebra::massey_example(),
        ] {
            for n in 1..=3 {
                let r = check_dg_action(&a, n, 8, 7).unwrap();
                assert!(r.passed(), "{:?}", r.failures);
                if n > 1 {
                    assert!(r.nonzero > 0);
                }
            }
        }
        assert!(check_dg_action(&AInfAlgebra::dual_numbers(), 4, 1, 0).is_err());
    }

    #[test]
    fn action_signs() {
        assert_eq!(action_sign(&t("b(w1 w2)")), 1);
        assert_eq!(action_sign(&t("b(w2 w1)")), -1);
        assert_eq!(action_sign(&t("b(w1(w2))")), -1);
        assert_eq!(action_sign(&t("b(w1 b(w2 w3))")), -1);
        assert_eq!(action_sign(&t("b(w1(w2 w3))")), 1);
    }

    #[test]
    fn action_respects_composition() {
        for a in [
            AInfAlgebra::dual_numbers(),
            AInfAlgebra::koszul_dga(),
            AInfAlgebra::massey_example(),
        ] {
            let r = check_composition(&a, 3, 4, 9).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
            assert!(r.nonzero > 0);
        }
    }

    #[test]
    fn differential_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for mut a in [
            AInfAlgebra::dual_numbers(),
            AInfAlgebra::koszul_dga(),
            AInfAlgebra::massey_example(),
        ] {
            a.cap = 8;
            for k in 0..=2 {
                let f = random_homogeneous(&a, k, &mut rng);
                let dd =
                    hochschild_differential(&a, &hochschild_differential(&a, &f).unwrap()).unwrap();
                assert!(dd.is_zero());
            }
        }
    }
}
