//! Python bindings. Trees and chains cross the boundary as compact strings,
//! reports as JSON text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use treecell::differential::{diff_tree, verify_d_squared};
use treecell::enumerate::enumerate_family;
use treecell::hochschild::{
    check_composition, check_dg_action, check_gerstenhaber_homology, check_stasheff, AInfAlgebra,
};
use treecell::models::model_homology;
use treecell::operad::{compose_trees, pi_inf};
use treecell::polytope::{assoc_complex, cyclo_complex, to_off, Model};
use treecell::{CellComplex, Family, Tree};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn family(name: &str) -> PyResult<Family> {
    name.parse().map_err(err)
}

fn tree(family: Family, s: &str) -> PyResult<Tree> {
    let t = Tree::parse_compact(s).map_err(err)?;
    if !family.contains(&t) {
        return Err(err(format!("{t} is not a tree of the family {family}")));
    }
    Ok(t)
}

fn polytope(name: &str, n: usize, model: &str) -> PyResult<CellComplex> {
    let model: Model = model.parse().map_err(err)?;
    match name {
        "K" | "k" => assoc_complex(n, model),
        "W" | "w" => cyclo_complex(n, model),
        _ => return Err(err(format!("unknown polytope {name:?} (expected K or W)"))),
    }
    .map_err(err)
}

/// The trees of a family with `n` labels, as compact strings.
#[pyfunction]
fn enumerate(family_name: &str, n: usize) -> PyResult<Vec<String>> {
    Ok(enumerate_family(family(family_name)?, n)
        .map_err(err)?
        .iter()
        .map(Tree::to_compact)
        .collect())
}

/// The differential of a tree.
#[pyfunction]
fn differential(family_name: &str, t: &str) -> PyResult<String> {
    let f = family(family_name)?;
    Ok(diff_tree(f, &tree(f, t)?).to_string())
}

/// Whether the differential squares to zero on every tree with `n` labels.
#[pyfunction]
fn d_squared_vanishes(family_name: &str, n: usize) -> PyResult<bool> {
    Ok(verify_d_squared(family(family_name)?, n)
        .map_err(err)?
        .passed())
}

/// The partial composition `t o_i s`.
#[pyfunction]
fn compose(family_name: &str, t: &str, i: usize, s: &str) -> PyResult<String> {
    let f = family(family_name)?;
    Ok(compose_trees(f.parent(), &tree(f, t)?, i, &tree(f, s)?)
        .map_err(err)?
        .to_string())
}

/// The projection of a stable tree onto bipartite trees.
#[pyfunction]
fn project(t: &str) -> PyResult<String> {
    Ok(pi_inf(&tree(Family::Stable, t)?).to_string())
}

#[pyfunction]
#[pyo3(signature = (name, n, model = "coarse"))]
fn f_vector(name: &str, n: usize, model: &str) -> PyResult<Vec<usize>> {
    Ok(polytope(name, n, model)?.f_vector())
}

#[pyfunction]
#[pyo3(signature = (name, n, model = "coarse"))]
fn off(name: &str, n: usize, model: &str) -> PyResult<String> {
    to_off(&polytope(name, n, model)?).map_err(err)
}

/// Homology of the three models in arity `n`, as JSON.
#[pyfunction]
fn homology(n: usize) -> PyResult<String> {
    Ok(model_homology(n).map_err(err)?.to_json().to_string())
}

/// Runs one check on a named algebra (dual, dga, mu3) and returns the report
/// as JSON. `check` is one of stasheff, dg, composition, gerstenhaber.
#[pyfunction]
#[pyo3(signature = (algebra, check, n = 2, samples = 8, seed = 1))]
fn hochschild_check(
    algebra: &str,
    check: &str,
    n: usize,
    samples: usize,
    seed: u64,
) -> PyResult<String> {
    let a = AInfAlgebra::named(algebra).map_err(err)?;
    let report = match check {
        "stasheff" => check_stasheff(&a).to_json(),
        "dg" => check_dg_action(&a, n, samples, seed)
            .map_err(err)?
            .to_json(),
        "composition" => check_composition(&a, n, samples, seed)
            .map_err(err)?
            .to_json(),
        "gerstenhaber" => check_gerstenhaber_homology(&a, 3).map_err(err)?.to_json(),
        _ => return Err(err(format!("unknown check {check:?}"))),
    };
    Ok(report.to_string())
}

#[pymodule(name = "treecell")]
fn treecell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(differential, m)?)?;
    m.add_function(wrap_pyfunction!(d_squared_vanishes, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(f_vector, m)?)?;
    m.add_function(wrap_pyfunction!(off, m)?)?;
    m.add_function(wrap_pyfunction!(homology, m)?)?;
    m.add_function(wrap_pyfunction!(hochschild_check, m)?)?;
    Ok(())
}
