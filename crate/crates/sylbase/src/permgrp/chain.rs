use std::collections::HashSet;

use rand::Rng;

use super::perm::Permutation;
use crate::arith::Integer;
use crate::error::{domain, Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Level {
    point: usize,
    /// Strong generators first introduced at this depth; level `i` uses those of levels `i..`.
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    pos: Vec<u32>,
    reps: Vec<Permutation>,
    inv_reps: Vec<Permutation>,
    /// `(orbit index, global generator id)` pairs whose Schreier generator already sifted.
    checked: HashSet<(u32, u32)>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut pos = vec![NONE; degree];
        pos[point] = 0;
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            pos,
            reps: vec![Permutation::identity(degree)],
            inv_reps: vec![Permutation::identity(degree)],
            checked: HashSet::new(),
        }
    }
}

/// A permutation group with a stabilizer chain built by deterministic Schreier–Sims.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
    /// Global ids of strong generators, parallel to `levels[i].gens`.
    gen_ids: Vec<Vec<u32>>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self> {
        Self::with_base(degree, gens, &[])
    }

    /// Builds the chain with `prefix` as the first base points.
    pub fn with_base(degree: usize, gens: Vec<Permutation>, prefix: &[usize]) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return domain(format!("generator of degree {} in a group of degree {degree}", g.degree()));
        }
        if let Some(&p) = prefix.iter().find(|&&p| p >= degree) {
            return domain(format!("base point {p} outside degree {degree}"));
        }
        let mut g = PermGroup { degree, generators: gens.clone(), levels: Vec::new(), gen_ids: Vec::new() };
        for &p in prefix {
            g.push_level(p);
        }
        let mut next_id = 0u32;
        for s in gens.into_iter().filter(|s| !s.is_identity()) {
            let depth = g.levels.iter().take_while(|l| s.apply(l.point) == l.point).count();
            if depth == g.levels.len() {
                g.push_level(s.first_moved_point().expect("non-identity"));
            }
            g.levels[depth].gens.push(s);
            g.gen_ids[depth].push(next_id);
            next_id += 1;
        }
        g.schreier_sims(next_id);
        Ok(g)
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: Vec::new(), levels: Vec::new(), gen_ids: Vec::new() }
    }

    fn push_level(&mut self, point: usize) {
        self.levels.push(Level::new(point, self.degree));
        self.gen_ids.push(Vec::new());
    }

    fn level_gens(&self, i: usize) -> impl Iterator<Item = (&Permutation, u32)> {
        self.levels[i..]
            .iter()
            .zip(&self.gen_ids[i..])
            .flat_map(|(l, ids)| l.gens.iter().zip(ids.iter().copied()))
    }

    fn extend_orbit(&mut self, i: usize) {
        let gens: Vec<Permutation> = self.level_gens(i).map(|(g, _)| g.clone()).collect();
        let level = &mut self.levels[i];
        let mut k = 0;
        while k < level.orbit.len() {
            let b = level.orbit[k];
            for s in &gens {
                let c = s.apply(b);
                if level.pos[c] == NONE {
                    let rep = level.reps[k].compose(s);
                    level.pos[c] = level.orbit.len() as u32;
                    level.orbit.push(c);
                    level.inv_reps.push(rep.inverse());
                    level.reps.push(rep);
                }
            }
            k += 1;
        }
    }

    fn schreier_sims(&mut self, mut next_id: u32) {
        if self.levels.is_empty() {
            return;
        }
        for i in 0..self.levels.len() {
            self.extend_orbit(i);
        }
        let mut i = self.levels.len() - 1;
        loop {
            self.extend_orbit(i);
            let gens: Vec<(Permutation, u32)> = self.level_gens(i).map(|(g, id)| (g.clone(), id)).collect();
            let mut restart = None;
            'scan: for k in 0..self.levels[i].orbit.len() {
                for (s, id) in &gens {
                    if self.levels[i].checked.contains(&(k as u32, *id)) {
                        continue;
                    }
                    let level = &self.levels[i];
                    let b = level.orbit[k];
                    let target = level.pos[s.apply(b)] as usize;
                    let sg = level.reps[k].compose(s).compose(&level.inv_reps[target]);
                    let (h, j) = self.sift(sg, i + 1);
                    if h.is_identity() {
                        self.levels[i].checked.insert((k as u32, *id));
                        continue;
                    }
                    if j == self.levels.len() {
                        self.push_level(h.first_moved_point().expect("non-identity"));
                    }
                    self.levels[j].gens.push(h);
                    self.gen_ids[j].push(next_id);
                    next_id += 1;
                    for l in i + 1..=j {
                        self.extend_orbit(l);
                    }
                    restart = Some(j);
                    break 'scan;
                }
            }
            match restart {
                Some(j) => i = j,
                None if i == 0 => break,
                None => i -= 1,
            }
        }
        for l in &mut self.levels {
            l.checked = HashSet::new();
        }
    }

    /// Strips `g` through levels `from..`; returns the residue and the level where it stopped.
    fn sift(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let b = g.apply(level.point);
            let k = level.pos[b];
            if k == NONE {
                return (g, j);
            }
            g = g.compose(&level.inv_reps[k as usize]);
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        self.levels.iter().flat_map(|l| l.gens.iter().cloned()).collect()
    }

    /// Basic orbit lengths along the chain.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> Integer {
        self.levels.iter().map(|l| Integer::from(l.orbit.len())).product()
    }

    /// The order as `u128`; chains here never exceed that range.
    pub fn order_u128(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, _) = self.sift(g.clone(), 0);
        h.is_identity()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Generators of the stabilizer of `point`, from a chain rebuilt with `point` first.
    pub fn stabilizer(&self, point: usize) -> Result<PermGroup> {
        let g = PermGroup::with_base(self.degree, self.strong_generators(), &[point])?;
        let gens = g.level_gens(1).map(|(s, _)| s.clone()).collect();
        PermGroup::new(self.degree, gens)
    }

    /// A uniformly random element, as a product of random transversal elements.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Permutation {
        let mut acc = Permutation::identity(self.degree);
        for level in self.levels.iter().rev() {
            let k = rng.gen_range(0..level.reps.len());
            acc = acc.compose(&level.reps[k]);
        }
        acc
    }

    /// All elements, refusing groups larger than `cap`.
    pub fn elements(&self, cap: u128) -> Result<Vec<Permutation>> {
        let n = self.order_u128();
        if n > cap {
            return Err(Error::Resource(format!("group of order {n} exceeds the enumeration cap {cap}")));
        }
        let mut acc = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(acc.len() * level.reps.len());
            for a in &acc {
                for r in &level.reps {
                    next.push(a.compose(r));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// The canonical element of the right coset `Hg`, where `self` is `H`.
    ///
    /// Level by level, the representative is adjusted by a transversal element so that the
    /// image of each base point is as small as possible; the result depends only on `Hg`.
    pub fn canonical_coset_rep(&self, g: &Permutation) -> Permutation {
        let mut c = g.clone();
        for level in &self.levels {
            let (k, _) = level
                .orbit
                .iter()
                .enumerate()
                .min_by_key(|(_, &b)| c.apply(b))
                .expect("orbits are non-empty");
            c = level.reps[k].compose(&c);
        }
        c
    }

    /// Orbits of the group on points, each sorted, listed by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(self.degree, &self.generators)
    }
}

/// Orbits of `⟨gens⟩` on `{0..degree−1}`.
pub fn orbits_of(degree: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let b = orbit[k];
            for g in gens {
                let c = g.apply(b);
                if !seen[c] {
                    seen[c] = true;
                    orbit.push(c);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(n: usize) -> PermGroup {
        let cyc: Vec<u32> = (0..n as u32).map(|i| (i + 1) % n as u32).collect();
        let mut t: Vec<u32> = (0..n as u32).collect();
        t.swap(0, 1);
        PermGroup::new(
            n,
            vec![Permutation::from_images(cyc).unwrap(), Permutation::from_images(t).unwrap()],
        )
        .unwrap()
    }

    fn closure(degree: usize, gens: &[Permutation]) -> HashSet<Permutation> {
        let mut set = HashSet::new();
        let id = Permutation::identity(degree);
        set.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = x.compose(g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    #[test]
    fn orders() {
        assert_eq!(sym(8).order(), Integer::from(40320));
        assert_eq!(PermGroup::new(5, vec![Permutation::identity(5)]).unwrap().order(), Integer::from(1));
        assert_eq!(PermGroup::new(5, vec![]).unwrap().order(), Integer::from(1));
        assert!(PermGroup::new(5, vec![Permutation::identity(4)]).is_err());
        // A_5 from two 3-cycles-ish generators.
        let a = Permutation::from_cycles(5, "(1,2,3)").unwrap();
        let b = Permutation::from_cycles(5, "(1,2,3,4,5)").unwrap();
        assert_eq!(PermGroup::new(5, vec![a, b]).unwrap().order(), Integer::from(60));
    }

    #[test]
    fn membership_matches_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gens = vec![
            Permutation::from_cycles(7, "(1,2,3,4,5,6,7)").unwrap(),
            Permutation::from_cycles(7, "(2,3)(4,7)").unwrap(),
        ];
        let g = PermGroup::new(7, gens.clone()).unwrap();
        assert_eq!(g.order(), Integer::from(168));
        let all = closure(7, &gens);
        assert_eq!(all.len(), 168);
        let s7 = sym(7);
        for _ in 0..100 {
            let x = s7.random_element(&mut rng);
            assert_eq!(g.contains(&x), all.contains(&x));
            let y = g.random_element(&mut rng);
            assert!(g.contains(&y));
        }
        let mut el = g.elements(1000).unwrap();
        el.sort();
        el.dedup();
        assert_eq!(el.len(), 168);
        assert!(sym(9).elements(1000).is_err());
    }

    #[test]
    fn stabilizers_and_prefix() {
        let s6 = sym(6);
        let st = s6.stabilizer(3).unwrap();
        assert_eq!(st.order(), Integer::from(120));
        assert!(st.generators().iter().all(|g| g.apply(3) == 3));
        let g = PermGroup::with_base(6, s6.generators().to_vec(), &[5, 4]).unwrap();
        assert_eq!(g.base()[..2], [5, 4]);
        assert_eq!(g.order(), Integer::from(720));
        assert_eq!(s6.orbits().len(), 1);
    }
}
