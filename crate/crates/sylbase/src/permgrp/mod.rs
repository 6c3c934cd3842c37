//! Permutation groups with stabilizer chains, matrix groups over small fields acting on
//! projective points, Sylow 2-subgroups, coset actions, base-size certificates, and
//! brute-force wreath-product enumerators.

mod action;
mod catalog;
mod chain;
mod field;
mod matrix;
mod perm;
mod wreath;

pub use action::{base_size_two_or_three, coset_action, has_regular_orbit, sylow2, BaseSizeReport, CosetAction, SylowOptions};
pub use catalog::{group_catalog, lookup_group, parse_catalog, GroupCatalogEntry, Recipe};
pub use chain::{orbits_of, PermGroup};
pub use field::Field;
pub use matrix::{projective_action, MatrixGF, ProjectiveSpace, Semilinear};
pub use perm::Permutation;
pub use wreath::{enumerate_wreath_model, oracle_grid, BlockGroup, OracleOutcome, OracleQuery, WreathCounts, WreathModel};
