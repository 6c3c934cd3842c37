use std::sync::OnceLock;

use super::chain::PermGroup;
use super::field::Field;
use super::matrix::{projective_action, MatrixGF, Semilinear};
use super::perm::Permutation;
use crate::error::{Error, Result};

/// How a catalog group is constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recipe {
    /// Explicit generators in 1-based cycle notation.
    Permutations { degree: usize, perms: Vec<String> },
    /// Projective action of (semi)linear maps on `PG(dim − 1, field)`.
    Matrices { field: u32, dim: usize, gens: Vec<(bool, Vec<u32>)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCatalogEntry {
    pub name: String,
    pub description: String,
    pub anchor: String,
    pub order: u128,
    /// Expected base size of a Sylow 2-subgroup.
    pub base_size: u8,
    pub recipe: Recipe,
}

impl GroupCatalogEntry {
    /// Constructs the group and checks its order against the entry.
    pub fn build(&self) -> Result<PermGroup> {
        let group = match &self.recipe {
            Recipe::Permutations { degree, perms } => {
                let gens = perms
                    .iter()
                    .map(|p| Permutation::from_cycles(*degree, p))
                    .collect::<Result<Vec<_>>>()?;
                PermGroup::new(*degree, gens)?
            }
            Recipe::Matrices { field, dim, gens } => {
                let f = Field::new(*field)?;
                let maps = gens
                    .iter()
                    .map(|(frob, e)| {
                        MatrixGF::new(*dim, e.clone(), &f)
                            .map(|matrix| Semilinear { matrix, frobenius_power: u32::from(*frob) })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (space, perms) = projective_action(&f, &maps)?;
                PermGroup::new(space.len(), perms)?
            }
        };
        let got = group.order_u128();
        if got != self.order {
            return Err(Error::Consistency(format!(
                "catalog group {} has order {got}, expected {}",
                self.name, self.order
            )));
        }
        Ok(group)
    }
}

/// Parses the catalog format: `[name]` sections of `key = value` lines, `#` comments.
pub fn parse_catalog(text: &str) -> Result<Vec<GroupCatalogEntry>> {
    struct Draft {
        name: String,
        fields: Vec<(String, String, usize)>,
        at: usize,
    }
    let mut drafts: Vec<Draft> = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line = raw.trim();
        let here = offset;
        offset += raw.len();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            drafts.push(Draft { name: name.trim().to_string(), fields: Vec::new(), at: here });
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { offset: here, message: "expected 'key = value'".into() })?;
        let d = drafts
            .last_mut()
            .ok_or_else(|| Error::Parse { offset: here, message: "field before any [section]".into() })?;
        d.fields.push((k.trim().to_string(), v.trim().to_string(), here));
    }
    let mut out: Vec<GroupCatalogEntry> = Vec::new();
    for d in drafts {
        if out.iter().any(|e| e.name == d.name) {
            return Err(Error::Parse { offset: d.at, message: format!("duplicate entry {}", d.name) });
        }
        let get = |key: &str| d.fields.iter().find(|(k, _, _)| k == key).map(|(_, v, o)| (v.as_str(), *o));
        let need = |key: &str| {
            get(key).ok_or_else(|| Error::Parse { offset: d.at, message: format!("{} lacks '{key}'", d.name) })
        };
        let num = |key: &str| -> Result<u128> {
            let (v, o) = need(key)?;
            v.parse().map_err(|_| Error::Parse { offset: o, message: format!("bad number for '{key}'") })
        };
        let recipe = if get("degree").is_some() {
            let perms = d.fields.iter().filter(|(k, _, _)| k == "perm").map(|(_, v, _)| v.clone()).collect();
            Recipe::Permutations { degree: num("degree")? as usize, perms }
        } else {
            let mut gens = Vec::new();
            for (_, v, o) in d.fields.iter().filter(|(k, _, _)| k == "gen") {
                let (frob, body) = match v.strip_prefix("frob") {
                    Some(rest) => (true, rest),
                    None => (false, v.as_str()),
                };
                let entries = body
                    .split_whitespace()
                    .map(|t| t.parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse { offset: *o, message: "bad matrix entry".into() })?;
                gens.push((frob, entries));
            }
            Recipe::Matrices { field: num("field")? as u32, dim: num("dim")? as usize, gens }
        };
        let base_size = num("base_size")?;
        if !(2..=3).contains(&base_size) {
            return Err(Error::Parse { offset: d.at, message: "base_size must be 2 or 3".into() });
        }
        out.push(GroupCatalogEntry {
            name: d.name.clone(),
            description: get("description").map(|(v, _)| v.to_string()).unwrap_or_default(),
            anchor: get("anchor").map(|(v, _)| v.to_string()).unwrap_or_default(),
            order: num("order")?,
            base_size: base_size as u8,
            recipe,
        });
    }
    Ok(out)
}

const BUILTIN: &str = include_str!("../../data/permgrp/catalog.txt");

/// The shipped catalog.
pub fn group_catalog() -> &'static [GroupCatalogEntry] {
    static CELL: OnceLock<Vec<GroupCatalogEntry>> = OnceLock::new();
    CELL.get_or_init(|| parse_catalog(BUILTIN).expect("shipped catalog parses"))
}

pub fn lookup_group(name: &str) -> Result<&'static GroupCatalogEntry> {
    group_catalog()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Catalog(format!("unknown group '{name}'")))
}
