use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::chain::{orbits_of, PermGroup};
use super::perm::Permutation;
use crate::error::{domain, Error, Result};

/// Tuning for [`sylow2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SylowOptions {
    pub seed: u64,
    /// Random 2-elements tried before falling back to enumeration.
    pub random_budget: usize,
    /// Largest group order for which the exhaustive fallback runs.
    pub exhaustive_cap: u128,
}

impl Default for SylowOptions {
    fn default() -> Self {
        SylowOptions { seed: 2024, random_budget: 400, exhaustive_cap: 1_000_000 }
    }
}

fn normalizes(p: &PermGroup, x: &Permutation) -> bool {
    p.generators().iter().all(|g| p.contains(&g.conjugate_by(x)))
}

/// Tries to enlarge `p` by `x`; returns the new group if `⟨p, x⟩` is still a 2-group.
fn extend(p: &PermGroup, x: &Permutation) -> Result<Option<PermGroup>> {
    if x.is_identity() || p.contains(x) || !x.order().is_power_of_two() {
        return Ok(None);
    }
    let mut gens = p.generators().to_vec();
    gens.push(x.clone());
    if normalizes(p, x) {
        return PermGroup::new(p.degree(), gens).map(Some);
    }
    let q = PermGroup::new(p.degree(), gens)?;
    Ok(q.order_u128().is_power_of_two().then_some(q))
}

/// A Sylow 2-subgroup of `g`.
///
/// Random 2-parts are added while the closure stays a 2-group; if that stalls, every element
/// is scanned for a 2-element normalizing the current subgroup, which always exists below a
/// Sylow subgroup. Returns an error rather than a smaller 2-subgroup.
pub fn sylow2(g: &PermGroup, opts: SylowOptions) -> Result<PermGroup> {
    let order = g.order_u128();
    let target = 1u128 << order.trailing_zeros();
    let mut p = PermGroup::trivial(g.degree());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_budget {
        if p.order_u128() == target {
            break;
        }
        let x = g.random_element(&mut rng).two_part();
        if let Some(bigger) = extend(&p, &x)? {
            p = bigger;
        }
    }
    if p.order_u128() < target && order <= opts.exhaustive_cap {
        let elements = g.elements(opts.exhaustive_cap)?;
        while p.order_u128() < target {
            let found = elements
                .iter()
                .filter(|x| !x.is_identity() && x.order().is_power_of_two() && !p.contains(x))
                .find(|x| normalizes(&p, x))
                .cloned();
            match found {
                Some(x) => p = extend(&p, &x)?.expect("normalizing 2-element extends"),
                None => break,
            }
        }
    }
    if p.order_u128() != target {
        return Err(Error::SearchFailed(format!(
            "reached a 2-subgroup of order {} of the required {target}",
            p.order_u128()
        )));
    }
    Ok(p)
}

/// `G` acting on the right cosets of `H`, with the coset `H` as point `0`.
#[derive(Debug, Clone)]
pub struct CosetAction {
    pub group: PermGroup,
    pub point: usize,
    subgroup: PermGroup,
    reps: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl CosetAction {
    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    fn coset_of(&self, g: &Permutation) -> usize {
        self.index[&self.subgroup.canonical_coset_rep(g)]
    }

    /// The permutation of cosets induced by an element of `G`.
    pub fn image(&self, g: &Permutation) -> Permutation {
        let images = self.reps.iter().map(|r| self.coset_of(&r.compose(g)) as u32).collect();
        Permutation::from_images(images).expect("right multiplication permutes cosets")
    }

    /// The image of a subgroup of `G` acting on the cosets.
    pub fn image_group(&self, k: &PermGroup) -> Result<PermGroup> {
        PermGroup::new(self.degree(), k.generators().iter().map(|g| self.image(g)).collect())
    }
}

/// Builds the action of `g` on the right cosets of `h`, refusing indices above `index_cap`.
pub fn coset_action(g: &PermGroup, h: &PermGroup, index_cap: u128) -> Result<CosetAction> {
    if g.degree() != h.degree() || !h.is_subgroup_of(g) {
        return domain("the subgroup is not contained in the group");
    }
    let idx = g.order_u128() / h.order_u128();
    if idx > index_cap {
        return Err(Error::Resource(format!("index {idx} exceeds the cap {index_cap}")));
    }
    let id = Permutation::identity(g.degree());
    let start = h.canonical_coset_rep(&id);
    let mut reps = vec![start.clone()];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut k = 0;
    while k < reps.len() {
        for s in g.generators() {
            let c = h.canonical_coset_rep(&reps[k].compose(s));
            if !index.contains_key(&c) {
                index.insert(c.clone(), reps.len());
                reps.push(c);
            }
        }
        k += 1;
    }
    debug_assert_eq!(reps.len() as u128, idx);
    let gens = g
        .generators()
        .iter()
        .map(|s| {
            let images = reps.iter().map(|r| index[&h.canonical_coset_rep(&r.compose(s))] as u32).collect();
            Permutation::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    let group = PermGroup::new(reps.len(), gens)?;
    Ok(CosetAction { group, point: 0, subgroup: h.clone(), reps, index })
}

/// A point whose orbit under `h` has length `|h|`, if one exists.
pub fn has_regular_orbit(h: &PermGroup) -> Option<usize> {
    let n = h.order_u128();
    orbits_of(h.degree(), h.generators())
        .into_iter()
        .find(|o| o.len() as u128 == n)
        .map(|o| o[0])
}

/// Outcome of [`base_size_two_or_three`]: `witness` is a base of `G` on `G/H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseSizeReport {
    pub base_size: u8,
    pub witness: Vec<usize>,
    pub degree: usize,
    pub sylow_order: u128,
}

/// Decides whether `b(G, H)` is 2 or 3 for `H ≤ G` by exhaustive orbit computations.
pub fn base_size_two_or_three(g: &PermGroup, h: &PermGroup, index_cap: u128) -> Result<BaseSizeReport> {
    let act = coset_action(g, h, index_cap)?;
    let hs = act.image_group(h)?;
    let report = |base_size, witness| BaseSizeReport {
        base_size,
        witness,
        degree: act.degree(),
        sylow_order: h.order_u128(),
    };
    if let Some(w) = has_regular_orbit(&hs) {
        return Ok(report(2, vec![act.point, w]));
    }
    for orbit in orbits_of(hs.degree(), hs.generators()) {
        let beta = orbit[0];
        let stab = hs.stabilizer(beta)?;
        if let Some(gamma) = has_regular_orbit(&stab) {
            return Ok(report(3, vec![act.point, beta, gamma]));
        }
    }
    Err(Error::SearchFailed("no base of size at most three".into()))
}
