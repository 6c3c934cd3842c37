use std::collections::HashMap;

use super::field::Field;
use super::perm::Permutation;
use crate::error::{domain, Result};

/// A square matrix over a small finite field, row-major, acting on row vectors from the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixGF {
    dim: usize,
    entries: Vec<u32>,
}

impl MatrixGF {
    pub fn new(dim: usize, entries: Vec<u32>, field: &Field) -> Result<Self> {
        if entries.len() != dim * dim || dim == 0 {
            return domain(format!("{} entries do not form a {dim}x{dim} matrix", entries.len()));
        }
        if let Some(e) = entries.iter().find(|&&e| e >= field.size()) {
            return domain(format!("entry {e} is not an element of GF({})", field.size()));
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.dim + c]
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        let n = self.dim;
        let mut out = vec![0u32; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    acc = f.add(acc, f.mul(self.get(r, k), other.get(k, c)));
                }
                out[r * n + c] = acc;
            }
        }
        Self { dim: n, entries: out }
    }

    pub fn add(&self, other: &Self, f: &Field) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.add(a, b)).collect();
        Self { dim: self.dim, entries }
    }

    pub fn map(&self, g: impl Fn(u32) -> u32) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&a| g(a)).collect() }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = vec![0u32; n * n];
        for r in 0..n {
            for c in 0..n {
                out[c * n + r] = self.get(r, c);
            }
        }
        Self { dim: n, entries: out }
    }

    pub fn rank(&self, f: &Field) -> usize {
        let n = self.dim;
        let mut m: Vec<Vec<u32>> = (0..n).map(|r| self.entries[r * n..(r + 1) * n].to_vec()).collect();
        let mut rank = 0;
        for c in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, piv);
            let inv = f.inv(m[rank][c]);
            for r in 0..n {
                if r != rank && m[r][c] != 0 {
                    let factor = f.mul(m[r][c], inv);
                    for cc in 0..n {
                        let v = f.mul(factor, m[rank][cc]);
                        m[r][cc] = f.sub(m[r][cc], v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, f: &Field) -> bool {
        self.rank(f) == self.dim
    }

    pub fn apply_row(&self, v: &[u32], f: &Field) -> Vec<u32> {
        (0..self.dim)
            .map(|c| v.iter().enumerate().fold(0, |acc, (r, &x)| f.add(acc, f.mul(x, self.get(r, c)))))
            .collect()
    }
}

/// A semilinear map `v ↦ (vM)^{σ^e}` with `σ` the Frobenius automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semilinear {
    pub matrix: MatrixGF,
    pub frobenius_power: u32,
}

impl From<MatrixGF> for Semilinear {
    fn from(matrix: MatrixGF) -> Self {
        Semilinear { matrix, frobenius_power: 0 }
    }
}

/// The points of `PG(d−1, q)` as normalized vectors (first non-zero coordinate 1).
#[derive(Debug, Clone)]
pub struct ProjectiveSpace {
    pub dim: usize,
    pub points: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl ProjectiveSpace {
    pub fn new(dim: usize, f: &Field) -> Self {
        let q = f.size() as usize;
        let mut points = Vec::new();
        for code in 0..q.pow(dim as u32) {
            let v: Vec<u32> = (0..dim).map(|i| ((code / q.pow((dim - 1 - i) as u32)) % q) as u32).collect();
            if v.iter().find(|&&x| x != 0) == Some(&1) {
                points.push(v);
            }
        }
        let index = points.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        ProjectiveSpace { dim, points, index }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn normalize(&self, v: &[u32], f: &Field) -> Option<usize> {
        let lead = *v.iter().find(|&&x| x != 0)?;
        let s = f.inv(lead);
        let w: Vec<u32> = v.iter().map(|&x| f.mul(x, s)).collect();
        self.index.get(&w).copied()
    }
}

/// Permutations induced on projective points by invertible semilinear maps.
pub fn projective_action(f: &Field, maps: &[Semilinear]) -> Result<(ProjectiveSpace, Vec<Permutation>)> {
    let dim = match maps.first() {
        Some(m) => m.matrix.dim(),
        None => return domain("projective action needs at least one generator"),
    };
    let space = ProjectiveSpace::new(dim, f);
    let mut perms = Vec::with_capacity(maps.len());
    for m in maps {
        if m.matrix.dim() != dim {
            return domain("generators of different dimensions");
        }
        if !m.matrix.is_invertible(f) {
            return domain("singular matrix in a projective action");
        }
        let images = space
            .points
            .iter()
            .map(|v| {
                let mut w = m.matrix.apply_row(v, f);
                for _ in 0..m.frobenius_power {
                    w = w.into_iter().map(|x| f.frobenius(x)).collect();
                }
                space.normalize(&w, f).expect("non-zero image") as u32
            })
            .collect();
        perms.push(Permutation::from_images(images)?);
    }
    Ok((space, perms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Integer;
    use crate::permgrp::PermGroup;

    fn m(f: &Field, dim: usize, e: &[u32]) -> MatrixGF {
        MatrixGF::new(dim, e.to_vec(), f).unwrap()
    }

    #[test]
    fn pgl2_7_and_pgammal2_9() {
        let f7 = Field::new(7).unwrap();
        let gens = vec![m(&f7, 2, &[3, 0, 0, 1]).into(), m(&f7, 2, &[6, 1, 6, 0]).into()];
        let (space, perms) = projective_action(&f7, &gens).unwrap();
        assert_eq!(space.len(), 8);
        assert_eq!(PermGroup::new(8, perms).unwrap().order(), Integer::from(336));

        let f9 = Field::new(9).unwrap();
        let w = f9.primitive();
        let a = m(&f9, 2, &[w, 0, 0, 1]);
        let b = m(&f9, 2, &[2, 1, 2, 0]);
        let frob = Semilinear { matrix: MatrixGF::identity(2), frobenius_power: 1 };
        let (space, perms) = projective_action(&f9, &[a.into(), b.into(), frob]).unwrap();
        assert_eq!(space.len(), 10);
        assert_eq!(PermGroup::new(10, perms).unwrap().order(), Integer::from(1440));
    }

    #[test]
    fn singular_rejected_and_rank() {
        let f3 = Field::new(3).unwrap();
        assert!(projective_action(&f3, &[m(&f3, 2, &[1, 1, 1, 1]).into()]).is_err());
        assert_eq!(m(&f3, 3, &[1, 2, 0, 2, 1, 0, 0, 0, 1]).rank(&f3), 2);
        assert_eq!(ProjectiveSpace::new(4, &f3).len(), 40);
        assert!(MatrixGF::new(2, vec![0, 1, 3, 0], &f3).is_err());
    }
}
