//! Exact combinatorics of black/white trees.
//!
//! Three families of black/white trees form dg-operads, see [`Family`].
//! They index CW and cubical models of associahedra and cyclohedra, as well
//! as cell models of the little discs with maps between them. Stable trees
//! also act on the Hochschild cochains of an A-infinity algebra.

pub mod chain;
pub mod complex;
pub mod differential;
pub mod enumerate;
pub mod error;
pub mod family;
pub mod hochschild;
pub mod models;
pub mod operad;
pub mod planar;
pub mod polytope;
pub mod surgery;
pub mod tree;

pub use chain::ChainElement;
pub use complex::CellComplex;
pub use error::{Error, Result};
pub use family::Family;
pub use tree::{Color, EdgeKind, Height, Node, Path, Tree};
