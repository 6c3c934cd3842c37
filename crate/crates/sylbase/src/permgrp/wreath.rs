//! Brute-force enumeration of wreath products `A wr S_m [× T]` with eigenvalue bookkeeping.
//!
//! An element is `(b₁, …, b_m; π; t)`. It squares to the identity iff `π² = 1`, `bᵢ² = 1`
//! at fixed points of `π`, `b_j = bᵢ⁻¹` on each 2-cycle `(i j)`, and `t² = 1`. For such an
//! element the (−1)-eigenspace has dimension `Σ tag(bᵢ)` over fixed points, plus the block
//! dimension for each 2-cycle, plus `tag(t)`.

use std::collections::HashMap;

use serde::Serialize;

use super::field::Field;
use super::matrix::MatrixGF;
use crate::arith::{int, Integer, Sign};
use crate::error::{domain, Error, Result};
use crate::involutions::{self, InvolutionClassLabel, OrthTail};

/// Largest block for which a multiplication table is stored.
const TABLE_LIMIT: usize = 1024;

/// A finite group given by inverse map, involution tags and optionally a Cayley table.
#[derive(Debug, Clone)]
pub struct BlockGroup {
    pub name: String,
    /// Dimension of the natural module.
    pub dim: u32,
    inv: Vec<u32>,
    /// `Some(dim E₋)` for elements squaring to the identity.
    tag: Vec<Option<u32>>,
    mul: Option<Vec<u32>>,
    identity: u32,
    /// The scalar `−I`, when it lies in the group.
    minus_one: Option<u32>,
}

impl BlockGroup {
    pub fn order(&self) -> usize {
        self.inv.len()
    }

    /// `⟨ω⟩ ≅ C_n` inside `GL₁`: `ω^k` has `−1` eigenvalue iff `k = n/2`.
    pub fn cyclic(n: usize) -> BlockGroup {
        let inv = (0..n).map(|k| ((n - k) % n) as u32).collect();
        let tag = (0..n)
            .map(|k| match k {
                0 => Some(0),
                k if 2 * k == n => Some(1),
                _ => None,
            })
            .collect();
        let mul = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
        let minus_one = (n % 2 == 0).then_some((n / 2) as u32);
        BlockGroup { name: format!("C{n}"), dim: 1, inv, tag, mul: Some(mul), identity: 0, minus_one }
    }

    /// `D_{2n} ≅ O₂^±` with rotations `r^k` at `k` and reflections `s r^k` at `n + k`.
    pub fn dihedral(n: usize) -> Result<BlockGroup> {
        if n < 2 || n % 2 == 1 {
            return domain("dihedral blocks need an even rotation order");
        }
        let code = |s: usize, k: usize| (s * n + k % n) as u32;
        let mut mul = vec![0u32; 4 * n * n];
        for a in 0..2 * n {
            for b in 0..2 * n {
                let (sa, ka) = (a / n, a % n);
                let (sb, kb) = (b / n, b % n);
                // (s^a r^k)(s^b r^l) = s^{a+b} r^{(−1)^b k + l}
                let k = if sb == 1 { (n - ka) % n + kb } else { ka + kb };
                mul[a * 2 * n + b] = code((sa + sb) % 2, k);
            }
        }
        let inv = (0..2 * n).map(|a| if a < n { code(0, n - a) } else { a as u32 }).collect();
        let tag = (0..2 * n)
            .map(|a| match a {
                0 => Some(0),
                a if a == n / 2 => Some(2),
                a if a >= n => Some(1),
                _ => None,
            })
            .collect();
        Ok(BlockGroup {
            name: format!("D{}", 2 * n),
            dim: 2,
            inv,
            tag,
            mul: Some(mul),
            identity: 0,
            minus_one: Some((n / 2) as u32),
        })
    }

    /// Generalized quaternion `Q_{2n} = ⟨a, b | aⁿ = 1, b² = a^{n/2}, aᵇ = a⁻¹⟩ ≤ SL₂`.
    pub fn quaternion(n: usize) -> Result<BlockGroup> {
        if n < 4 || n % 4 != 0 {
            return domain("quaternion blocks need n divisible by 4");
        }
        let code = |e: usize, k: usize| (e * n + k % n) as u32;
        let mut mul = vec![0u32; 4 * n * n];
        for x in 0..2 * n {
            for y in 0..2 * n {
                let (e, k) = (x / n, x % n);
                let (f, l) = (y / n, y % n);
                // a^k b^e · a^l b^f = a^{k + (−1)^e l} b^{e+f}, and b² = a^{n/2}.
                let mut kk = if e == 1 { k + (n - l) } else { k + l };
                if e + f == 2 {
                    kk += n / 2;
                }
                mul[x * 2 * n + y] = code((e + f) % 2, kk);
            }
        }
        let mut g = BlockGroup {
            name: format!("Q{}", 2 * n),
            dim: 2,
            inv: vec![0; 2 * n],
            tag: vec![None; 2 * n],
            mul: Some(mul),
            identity: 0,
            minus_one: Some((n / 2) as u32),
        };
        g.fill_inverse_and_tags(|x| match x {
            0 => 0,
            _ => 2,
        });
        Ok(g)
    }

    fn fill_inverse_and_tags(&mut self, tag_of_square_root: impl Fn(u32) -> u32) {
        let table = self.mul.as_ref().expect("table present");
        let n = self.inv.len();
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == self.identity {
                    self.inv[a] = b as u32;
                }
            }
            self.tag[a] = (table[a * n + a] == self.identity).then(|| tag_of_square_root(a as u32));
        }
    }

    /// `GL₂(q)` by enumerating invertible matrices.
    pub fn gl2(q: u32) -> Result<BlockGroup> {
        let f = Field::new(q)?;
        let mut mats = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    for d in f.elements() {
                        if f.sub(f.mul(a, d), f.mul(b, c)) != 0 {
                            mats.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        Self::from_matrices(format!("GL2({q})"), &f, mats)
    }

    /// `SL₂(q) = Sp₂(q)`.
    pub fn sl2(q: u32) -> Result<BlockGroup> {
        let f = Field::new(q)?;
        let mut mats = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    for d in f.elements() {
                        if f.sub(f.mul(a, d), f.mul(b, c)) == 1 {
                            mats.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        Self::from_matrices(format!("SL2({q})"), &f, mats)
    }

    /// `GU₂(q)` for the identity Hermitian form over `GF(q²)`.
    ///
    /// Rows `(a, b)` of norm 1 followed by `λ(−b^q, a^q)` with `N(λ) = 1`.
    pub fn gu2(q: u32) -> Result<BlockGroup> {
        let f = Field::new(q * q)?;
        let conj = |x: u32| f.pow(x, u64::from(q));
        let norm = |x: u32| f.mul(x, conj(x));
        let unit: Vec<u32> = f.elements().filter(|&x| norm(x) == 1).collect();
        let mut mats = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                if f.add(norm(a), norm(b)) != 1 {
                    continue;
                }
                for &l in &unit {
                    mats.push([a, b, f.mul(l, f.neg(conj(b))), f.mul(l, conj(a))]);
                }
            }
        }
        Self::from_matrices(format!("GU2({q})"), &f, mats)
    }

    fn from_matrices(name: String, f: &Field, mats: Vec<[u32; 4]>) -> Result<BlockGroup> {
        let index: HashMap<[u32; 4], u32> = mats.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        let n = mats.len();
        let mut inv = vec![0u32; n];
        let mut tag = vec![None; n];
        let mut identity = None;
        let mut minus_one = None;
        let one = 1u32;
        let m1 = f.neg(1);
        for (i, &[a, b, c, d]) in mats.iter().enumerate() {
            let det_inv = f.inv(f.sub(f.mul(a, d), f.mul(b, c)));
            let adj = [f.mul(d, det_inv), f.mul(f.neg(b), det_inv), f.mul(f.neg(c), det_inv), f.mul(a, det_inv)];
            inv[i] = *index
                .get(&adj)
                .ok_or_else(|| Error::Consistency(format!("{name} is not closed under inverses")))?;
            let sq = [
                f.add(f.mul(a, a), f.mul(b, c)),
                f.add(f.mul(a, b), f.mul(b, d)),
                f.add(f.mul(c, a), f.mul(d, c)),
                f.add(f.mul(c, b), f.mul(d, d)),
            ];
            if sq == [one, 0, 0, one] {
                let plus = MatrixGF::new(2, vec![f.add(a, 1), b, c, f.add(d, 1)], f)?;
                tag[i] = Some(2 - plus.rank(f) as u32);
            }
            if [a, b, c, d] == [one, 0, 0, one] {
                identity = Some(i as u32);
            }
            if [a, b, c, d] == [m1, 0, 0, m1] {
                minus_one = Some(i as u32);
            }
        }
        let identity = identity.ok_or_else(|| Error::Consistency(format!("{name} lacks the identity")))?;
        let mul = (n <= TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; n * n];
            for (i, x) in mats.iter().enumerate() {
                for (j, y) in mats.iter().enumerate() {
                    let p = [
                        f.add(f.mul(x[0], y[0]), f.mul(x[1], y[2])),
                        f.add(f.mul(x[0], y[1]), f.mul(x[1], y[3])),
                        f.add(f.mul(x[2], y[0]), f.mul(x[3], y[2])),
                        f.add(f.mul(x[2], y[1]), f.mul(x[3], y[3])),
                    ];
                    t[i * n + j] = index[&p];
                }
            }
            t
        });
        Ok(BlockGroup { name, dim: 2, inv, tag, mul, identity, minus_one })
    }
}

/// `block wr S_m`, optionally times a tail group fixed by the permutation part.
#[derive(Debug, Clone)]
pub struct WreathModel {
    pub block: BlockGroup,
    pub m: usize,
    pub tail: Option<BlockGroup>,
}

impl WreathModel {
    pub fn size(&self) -> u128 {
        let fact: u128 = (1..=self.m as u128).product();
        let base = (self.block.order() as u128).saturating_pow(self.m as u32);
        base.saturating_mul(fact).saturating_mul(self.tail.as_ref().map_or(1, |t| t.order() as u128))
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{} wr S{}", self.block.name, self.m);
        if let Some(t) = &self.tail {
            s.push_str(&format!(" x {}", t.name));
        }
        s
    }
}

/// Counts gathered by [`enumerate_wreath_model`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WreathCounts {
    pub size: u128,
    /// `by_type[k]` counts involutions whose (−1)-eigenspace has dimension `k`.
    pub by_type: Vec<u64>,
    /// Non-identity elements with `y² = 1`.
    pub square_identity: u64,
    /// Elements with `y² = −I`; `None` when the blocks carry no multiplication table or no `−I`.
    pub square_minus_identity: Option<u64>,
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

/// Enumerates every element of the model and classifies the ones squaring into the centre.
pub fn enumerate_wreath_model(model: &WreathModel, cap: u128) -> Result<WreathCounts> {
    let size = model.size();
    if size > cap {
        return Err(Error::Resource(format!("{} has {size} elements, above the cap {cap}", model.describe())));
    }
    let a = &model.block;
    let ord = a.order();
    let m = model.m;
    let trivial_tail = BlockGroup::cyclic(1);
    let t = model.tail.as_ref().unwrap_or(&trivial_tail);
    let max_dim = (a.dim as usize) * m + t.dim as usize;
    let mut by_type = vec![0u64; max_dim + 1];
    let mut square_identity = 0u64;
    let minus = match (&a.mul, a.minus_one, &t.mul, model.tail.is_some()) {
        (Some(am), Some(z), Some(tm), true) => t.minus_one.map(|tz| (am, z, Some((tm, tz)))),
        (Some(am), Some(z), _, false) => Some((am, z, None)),
        _ => None,
    };
    let mut square_minus = minus.as_ref().map(|_| 0u64);
    let mut b = vec![0usize; m];
    for pi in permutations(m) {
        let involutive_pi = (0..m).all(|i| pi[pi[i]] == i);
        let swaps = (0..m).filter(|&i| pi[i] > i).count() as u32;
        loop {
            for tail in 0..t.order() {
                let mut square_is_one = involutive_pi && t.tag[tail].is_some();
                let mut dim = 0u32;
                if square_is_one {
                    for i in 0..m {
                        let j = pi[i];
                        if j == i {
                            match a.tag[b[i]] {
                                Some(k) => dim += k,
                                None => {
                                    square_is_one = false;
                                    break;
                                }
                            }
                        } else if a.inv[b[i]] as usize != b[j] {
                            square_is_one = false;
                            break;
                        }
                    }
                }
                if square_is_one {
                    let is_identity = b.iter().all(|&x| x as u32 == a.identity) && tail as u32 == t.identity && pi.iter().enumerate().all(|(i, &j)| i == j);
                    if !is_identity {
                        square_identity += 1;
                        dim += swaps * a.dim + t.tag[tail].expect("checked");
                        by_type[dim as usize] += 1;
                    }
                } else if let (Some((am, z, tail_tab)), Some(cnt)) = (&minus, square_minus.as_mut()) {
                    if involutive_pi {
                        let square_block = |x: usize, y: usize| am[x * ord + y];
                        let blocks_ok = (0..m).all(|i| square_block(b[i], b[pi[i]]) == *z);
                        let tail_ok = match tail_tab {
                            Some((tm, tz)) => tm[tail * t.order() + tail] == *tz,
                            None => true,
                        };
                        if blocks_ok && tail_ok {
                            *cnt += 1;
                        }
                    }
                }
            }
            // Odometer over block tuples.
            let mut i = 0;
            while i < m {
                b[i] += 1;
                if b[i] < ord {
                    break;
                }
                b[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
        }
    }
    Ok(WreathCounts { size, by_type, square_identity, square_minus_identity: square_minus })
}

/// A counting formula paired with the wreath model that checks it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OracleQuery {
    /// `t₁` images in `GL₁^ε(q) wr S_n`.
    CyclicT1 { n: u64, q: u64, eps: Sign },
    /// `t₂` images in `GU₁(q) wr S_n`.
    UnitaryT2 { n: u64, q: u64 },
    /// `t₁` images in `(GL₂^ε(q) wr S_m) [⊕ GL₁^ε(q)]`.
    Rank2T1 { m: u64, q: u64, eps: Sign, plus_point: bool },
    /// `t₁ = (−I₂, I_{n−2})` images in `Sp₂(q) wr S_m`.
    SymplecticT1 { m: u64, q: u64 },
    /// `s₁` or `s₂` images in `(O₂^ε(q) wr S_m) ⊥ tail`.
    Orthogonal { m: u64, q: u64, eps_block: Sign, tail: OrthTail, k: u64 },
    /// `i₂` of `Q_{2(q−ε)} wr S₂`, with `ε ≡ q (mod 4)`.
    QuaternionI2 { q: u64 },
    /// The `t₁` and `t₂` counts of the symplectic profile via the quaternion model.
    Psp4Lifts { q: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleOutcome {
    pub query: String,
    pub model: String,
    pub model_size: u128,
    pub closed_form: Vec<String>,
    pub brute_force: Vec<String>,
}

impl OracleOutcome {
    pub fn agrees(&self) -> bool {
        self.closed_form == self.brute_force
    }
}

fn quaternion_eps(q: u64) -> Sign {
    if q % 4 == 1 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn minus_shift(q: u64, eps: Sign) -> usize {
    match eps {
        Sign::Plus => (q - 1) as usize,
        Sign::Minus => (q + 1) as usize,
    }
}

impl OracleQuery {
    /// The model whose enumeration checks this query.
    pub fn model(&self) -> Result<WreathModel> {
        Ok(match *self {
            OracleQuery::CyclicT1 { n, q, eps } => {
                WreathModel { block: BlockGroup::cyclic(minus_shift(q, eps)), m: n as usize, tail: None }
            }
            OracleQuery::UnitaryT2 { n, q } => {
                WreathModel { block: BlockGroup::cyclic(minus_shift(q, Sign::Minus)), m: n as usize, tail: None }
            }
            OracleQuery::Rank2T1 { m, q, eps, plus_point } => {
                let block = match eps {
                    Sign::Plus => BlockGroup::gl2(q as u32)?,
                    Sign::Minus => BlockGroup::gu2(q as u32)?,
                };
                let tail = plus_point.then(|| BlockGroup::cyclic(minus_shift(q, eps)));
                WreathModel { block, m: m as usize, tail }
            }
            OracleQuery::SymplecticT1 { m, q } => {
                WreathModel { block: BlockGroup::sl2(q as u32)?, m: m as usize, tail: None }
            }
            OracleQuery::Orthogonal { m, q, eps_block, tail, .. } => {
                let block = BlockGroup::dihedral(minus_shift(q, eps_block))?;
                match tail {
                    OrthTail::None => WreathModel { block, m: m as usize, tail: None },
                    OrthTail::O1 => WreathModel { block, m: m as usize, tail: Some(BlockGroup::cyclic(2)) },
                    OrthTail::O2Plus => WreathModel {
                        block,
                        m: m as usize - 1,
                        tail: Some(BlockGroup::dihedral(minus_shift(q, Sign::Plus))?),
                    },
                    OrthTail::O2Minus => WreathModel {
                        block,
                        m: m as usize - 1,
                        tail: Some(BlockGroup::dihedral(minus_shift(q, Sign::Minus))?),
                    },
                }
            }
            OracleQuery::QuaternionI2 { q } | OracleQuery::Psp4Lifts { q } => WreathModel {
                block: BlockGroup::quaternion(minus_shift(q, quaternion_eps(q)))?,
                m: 2,
                tail: None,
            },
        })
    }

    /// Closed-form values, in the same order as [`Self::brute_force`].
    pub fn closed_form(&self) -> Result<Vec<Integer>> {
        let qi = |q: u64| Integer::from(q);
        Ok(match *self {
            OracleQuery::CyclicT1 { n, q, eps } => vec![involutions::count_t1_wreath_cyclic(n, &qi(q), eps)?.value],
            OracleQuery::UnitaryT2 { n, q } => vec![involutions::count_t2_wreath_gu1(n, &qi(q))?.value],
            OracleQuery::Rank2T1 { m, q, eps, plus_point } => {
                vec![involutions::count_t1_wreath_gl2(m, &qi(q), eps, plus_point)?.value]
            }
            OracleQuery::SymplecticT1 { m, q } => vec![involutions::count_t1_wreath_sp2(m, &qi(q))?.value],
            OracleQuery::Orthogonal { m, q, eps_block, tail, k } => {
                vec![involutions::count_orth_wreath(m, &qi(q), eps_block, tail, InvolutionClassLabel::s(k))?.value]
            }
            OracleQuery::QuaternionI2 { q } => vec![involutions::quaternion_wreath_i2(&qi(q))?],
            OracleQuery::Psp4Lifts { q } => {
                let p = involutions::psp4_involution_profile(&qi(q))?;
                vec![p.count_t1, p.count_t2_like]
            }
        })
    }

    /// Values read off the enumeration.
    pub fn brute_force(&self, counts: &WreathCounts) -> Result<Vec<Integer>> {
        let at = |k: usize| int(counts.by_type.get(k).copied().unwrap_or(0) as i64);
        Ok(match *self {
            OracleQuery::CyclicT1 { .. } | OracleQuery::Rank2T1 { .. } => vec![at(1)],
            OracleQuery::UnitaryT2 { .. } | OracleQuery::SymplecticT1 { .. } => vec![at(2)],
            OracleQuery::Orthogonal { k, .. } => vec![at(k as usize)],
            OracleQuery::QuaternionI2 { .. } => vec![int(counts.square_identity as i64)],
            OracleQuery::Psp4Lifts { .. } => {
                let minus = counts
                    .square_minus_identity
                    .ok_or_else(|| Error::Consistency("quaternion model lacks -I".into()))?;
                // Images in the projective group pair y with −y; −I itself is excluded.
                vec![int((counts.square_identity as i64 - 1) / 2), int(minus as i64 / 2)]
            }
        })
    }

    pub fn label(&self) -> String {
        match *self {
            OracleQuery::CyclicT1 { n, q, eps } => format!("cyclic{eps}-wr n={n} q={q} t1"),
            OracleQuery::UnitaryT2 { n, q } => format!("gu1-wr n={n} q={q} t2"),
            OracleQuery::Rank2T1 { m, q, eps, plus_point } => {
                format!("rank2{eps}-wr m={m} q={q} t1{}", if plus_point { " +point" } else { "" })
            }
            OracleQuery::SymplecticT1 { m, q } => format!("sp2-wr m={m} q={q} t1"),
            OracleQuery::Orthogonal { m, q, eps_block, tail, k } => {
                format!("orth{eps_block}-wr m={m} q={q} tail={tail:?} s{k}")
            }
            OracleQuery::QuaternionI2 { q } => format!("quat-wr q={q} square-identity"),
            OracleQuery::Psp4Lifts { q } => format!("quat-wr q={q} lifts"),
        }
    }

    pub fn run(&self, cap: u128) -> Result<OracleOutcome> {
        let model = self.model()?;
        let counts = enumerate_wreath_model(&model, cap)?;
        let show = |v: Vec<Integer>| v.into_iter().map(|x| x.to_string()).collect();
        Ok(OracleOutcome {
            query: self.label(),
            model: model.describe(),
            model_size: counts.size,
            closed_form: show(self.closed_form()?),
            brute_force: show(self.brute_force(&counts)?),
        })
    }
}

impl std::str::FromStr for OracleQuery {
    type Err = Error;

    /// Parses the labels produced by [`OracleQuery::label`]. `gl1-wr` is accepted for
    /// `cyclic+-wr`, and `gu1-wr ... t1` for `cyclic--wr`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Usage(format!("model spec '{text}': {msg}"));
        let mut words = text.split_whitespace();
        let head = words.next().ok_or_else(|| bad("empty"))?;
        let kind = head.strip_suffix("-wr").ok_or_else(|| bad("first word must end in -wr"))?;
        let mut keys: HashMap<&str, &str> = HashMap::new();
        let mut flags = Vec::new();
        for w in words {
            match w.split_once('=') {
                Some((k, v)) => {
                    keys.insert(k, v);
                }
                None => flags.push(w),
            }
        }
        let num = |k: &str| -> Result<u64> {
            keys.get(k)
                .ok_or_else(|| bad(&format!("missing {k}=")))?
                .parse()
                .map_err(|_| bad(&format!("{k} is not a number")))
        };
        let has = |f: &str| flags.contains(&f);
        let sign_of = |c: char| if c == '+' { Sign::Plus } else { Sign::Minus };
        let q = num("q")?;
        let query = match kind {
            "gl1" | "cyclic+" if has("t1") => OracleQuery::CyclicT1 { n: num("n")?, q, eps: Sign::Plus },
            "gu1" | "cyclic-" if has("t1") => OracleQuery::CyclicT1 { n: num("n")?, q, eps: Sign::Minus },
            "gu1" if has("t2") => OracleQuery::UnitaryT2 { n: num("n")?, q },
            "rank2+" | "rank2-" if has("t1") => OracleQuery::Rank2T1 {
                m: num("m")?,
                q,
                eps: sign_of(kind.chars().last().unwrap_or('+')),
                plus_point: has("+point"),
            },
            "sp2" if has("t1") => OracleQuery::SymplecticT1 { m: num("m")?, q },
            "orth+" | "orth-" => {
                let tail = match keys.get("tail").copied().unwrap_or("None") {
                    "None" => OrthTail::None,
                    "O1" => OrthTail::O1,
                    "O2Plus" => OrthTail::O2Plus,
                    "O2Minus" => OrthTail::O2Minus,
                    t => return Err(bad(&format!("unknown tail {t}"))),
                };
                let k = match flags.as_slice() {
                    ["s1"] => 1,
                    ["s2"] => 2,
                    _ => return Err(bad("expected class s1 or s2")),
                };
                let eps_block = sign_of(kind.chars().last().unwrap_or('+'));
                OracleQuery::Orthogonal { m: num("m")?, q, eps_block, tail, k }
            }
            "quat" if has("square-identity") => OracleQuery::QuaternionI2 { q },
            "quat" if has("lifts") => OracleQuery::Psp4Lifts { q },
            _ => return Err(bad("unknown model or class")),
        };
        // Rank-two blocks are stored as full multiplication tables.
        if matches!(query, OracleQuery::Rank2T1 { .. } | OracleQuery::SymplecticT1 { .. }) && q > 25 {
            return Err(Error::Resource(format!("rank-two block tables need q <= 25, got {q}")));
        }
        match query.model() {
            Ok(_) => Ok(query),
            Err(Error::Resource(m)) => Err(Error::Resource(m)),
            Err(e) => Err(bad(&e.to_string())),
        }
    }
}

/// Every oracle configuration over `qs` whose model has at most `cap` elements.
pub fn oracle_grid(qs: &[u64], cap: u128) -> Result<Vec<OracleQuery>> {
    let mut out = Vec::new();
    let fits = |q: &OracleQuery| -> Result<bool> { Ok(q.model()?.size() <= cap) };
    for &q in qs {
        for eps in [Sign::Plus, Sign::Minus] {
            for n in 2.. {
                let query = OracleQuery::CyclicT1 { n, q, eps };
                if !fits(&query)? {
                    break;
                }
                out.push(query);
            }
            for plus_point in [false, true] {
                for m in 1.. {
                    let query = OracleQuery::Rank2T1 { m, q, eps, plus_point };
                    if !fits(&query)? {
                        break;
                    }
                    out.push(query);
                }
            }
        }
        for m in 1.. {
            let query = OracleQuery::SymplecticT1 { m, q };
            if !fits(&query)? {
                break;
            }
            out.push(query);
        }
        for n in 4.. {
            let query = OracleQuery::UnitaryT2 { n, q };
            if !fits(&query)? {
                break;
            }
            out.push(query);
        }
        let configs = [
            (Sign::Plus, OrthTail::O1),
            (Sign::Minus, OrthTail::O1),
            (Sign::Plus, OrthTail::None),
            (Sign::Minus, OrthTail::None),
            (Sign::Minus, OrthTail::O2Plus),
            (Sign::Plus, OrthTail::O2Minus),
        ];
        for (eps_block, tail) in configs {
            for k in [1, 2] {
                for m in 2.. {
                    let query = OracleQuery::Orthogonal { m, q, eps_block, tail, k };
                    if !fits(&query)? {
                        break;
                    }
                    out.push(query);
                }
            }
        }
        out.push(OracleQuery::QuaternionI2 { q });
        if q >= 5 {
            out.push(OracleQuery::Psp4Lifts { q });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: u128 = 1_000_000;

    #[test]
    fn labels_round_trip() {
        for query in oracle_grid(&[3, 5], CAP).unwrap() {
            assert_eq!(query.label().parse::<OracleQuery>().unwrap(), query);
        }
        let gl1: OracleQuery = "gl1-wr n=4 q=5 t1".parse().unwrap();
        assert_eq!(gl1, OracleQuery::CyclicT1 { n: 4, q: 5, eps: Sign::Plus });
        for bad in ["", "gl1 n=4 q=5 t1", "gl1-wr n=4 t1", "gl1-wr n=4 q=5", "quat-wr q=4 lifts", "orth+-wr m=2 q=3 s3"] {
            assert!(matches!(bad.parse::<OracleQuery>(), Err(Error::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn block_orders() {
        for q in [3u32, 5, 7, 9] {
            let qq = q as usize;
            assert_eq!(BlockGroup::gl2(q).unwrap().order(), (qq * qq - 1) * (qq * qq - qq));
            assert_eq!(BlockGroup::gu2(q).unwrap().order(), qq * (qq * qq - 1) * (qq + 1));
            assert_eq!(BlockGroup::sl2(q).unwrap().order(), qq * (qq * qq - 1));
        }
        assert_eq!(BlockGroup::quaternion(4).unwrap().order(), 8);
        assert!(BlockGroup::quaternion(6).is_err());
        assert!(BlockGroup::dihedral(3).is_err());
    }

    #[test]
    fn block_tables_are_groups() {
        let blocks = [
            BlockGroup::cyclic(6),
            BlockGroup::dihedral(4).unwrap(),
            BlockGroup::quaternion(8).unwrap(),
            BlockGroup::gl2(3).unwrap(),
            BlockGroup::gu2(3).unwrap(),
        ];
        for g in blocks {
            let n = g.order();
            let t = g.mul.as_ref().unwrap();
            for a in 0..n {
                assert_eq!(t[a * n + g.inv[a] as usize], g.identity, "{}", g.name);
                assert_eq!(t[a * n + g.identity as usize], a as u32);
                for b in 0..n {
                    for c in 0..n {
                        let ab = t[a * n + b] as usize;
                        let bc = t[b * n + c] as usize;
                        assert_eq!(t[ab * n + c], t[a * n + bc], "{}", g.name);
                    }
                }
            }
        }
    }

    #[test]
    fn spec_examples() {
        let q = OracleQuery::CyclicT1 { n: 4, q: 5, eps: Sign::Plus };
        let out = q.run(CAP).unwrap();
        assert_eq!(out.model_size, 6144);
        assert_eq!(out.brute_force, vec!["28"]);
        assert!(out.agrees());
        let quat = OracleQuery::QuaternionI2 { q: 5 }.run(CAP).unwrap();
        assert_eq!(quat.model_size, 128);
        assert_eq!(quat.brute_force, vec!["11"]);
        let orth = OracleQuery::Orthogonal { m: 2, q: 5, eps_block: Sign::Plus, tail: OrthTail::O1, k: 1 };
        assert_eq!(orth.run(CAP).unwrap().brute_force, vec!["9"]);
        let psua = OracleQuery::UnitaryT2 { n: 4, q: 3 }.run(CAP).unwrap();
        assert_eq!(psua.brute_force, vec!["102"]);
        let gu = OracleQuery::Rank2T1 { m: 2, q: 3, eps: Sign::Minus, plus_point: false }.run(CAP).unwrap();
        assert_eq!(gu.brute_force, vec!["12"]);
        let lifts = OracleQuery::Psp4Lifts { q: 7 }.run(CAP).unwrap();
        assert_eq!(lifts.model_size, 512);
        assert!(lifts.agrees());
    }

    #[test]
    fn quaternion_lifts_classify_by_square() {
        // y² = 1 with y ≠ ±1 has a 2-dimensional (−1)-eigenspace; y² = −1 has none.
        for q in [5u64, 7, 9] {
            let model = OracleQuery::Psp4Lifts { q }.model().unwrap();
            let c = enumerate_wreath_model(&model, CAP).unwrap();
            let noncentral = c.square_identity - 1;
            assert_eq!(c.by_type[2], noncentral);
            assert_eq!(c.by_type[4], 1);
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let big = OracleQuery::CyclicT1 { n: 9, q: 9, eps: Sign::Plus };
        assert!(matches!(big.run(CAP), Err(Error::Resource(_))));
    }
}
