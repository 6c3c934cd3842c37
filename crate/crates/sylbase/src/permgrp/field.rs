use crate::arith::{is_small_prime, prime_power};
use crate::error::{domain, Result};

/// The field `GF(p^k)` for small `p^k`, with elements encoded as `c₀ + c₁p + … + c_{k−1}p^{k−1}`
/// where `Σ cᵢ xⁱ` is the residue modulo the lexicographically first monic irreducible
/// polynomial of degree `k` over `GF(p)`.
#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    k: u32,
    size: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    primitive: u32,
    /// Coefficients `m₀..m_{k−1}` of the defining polynomial `x^k + Σ mᵢxⁱ`.
    modulus: Vec<u32>,
}

const MAX_FIELD: u32 = 1024;

impl Field {
    pub fn new(q: u32) -> Result<Field> {
        let (p, k) = prime_power(u64::from(q)).ok_or_else(|| crate::Error::Domain(format!("{q} is not a prime power")))?;
        if q > MAX_FIELD {
            return domain(format!("field size {q} exceeds {MAX_FIELD}"));
        }
        let (p, k) = (p as u32, k);
        debug_assert!(is_small_prime(u64::from(p)));
        let modulus = if k == 1 { vec![0] } else { first_irreducible(p, k) };
        let size = q;
        let digits = |x: u32| -> Vec<u32> { (0..k).map(|i| (x / p.pow(i)) % p).collect() };
        let encode = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let n = size as usize;
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for a in 0..size {
            let da = digits(a);
            for b in 0..size {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * size + b) as usize] = encode(&s);
                let prod = poly_mul_mod(&da, &db, &modulus, p);
                mul[(a * size + b) as usize] = encode(&prod);
            }
        }
        let mut neg = vec![0u32; n];
        let mut inv = vec![0u32; n];
        for a in 0..size {
            for b in 0..size {
                if add[(a * size + b) as usize] == 0 {
                    neg[a as usize] = b;
                }
                if mul[(a * size + b) as usize] == 1 {
                    inv[a as usize] = b;
                }
            }
        }
        let mut f = Field { p, k, size, add, mul, neg, inv, primitive: 0, modulus };
        f.primitive = (1..size)
            .find(|&g| f.mult_order(g) == size - 1)
            .expect("multiplicative group is cyclic");
        Ok(f)
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.size + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.size + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `0` maps to `0`.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// A generator of the multiplicative group (smallest code).
    pub fn primitive(&self) -> u32 {
        self.primitive
    }

    /// `a ↦ a^p`.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, u64::from(self.p))
    }

    fn mult_order(&self, a: u32) -> u32 {
        let mut x = a;
        let mut o = 1;
        while x != 1 {
            x = self.mul(x, a);
            o += 1;
            if o > self.size {
                return 0;
            }
        }
        o
    }

    /// The integer `v mod p` as a field element.
    pub fn from_int(&self, v: i64) -> u32 {
        v.rem_euclid(i64::from(self.p)) as u32
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.size
    }
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = a.len();
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    if k == 1 {
        return vec![prod[0]];
    }
    for d in (k..2 * k - 1).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        // x^d = x^{d−k} · x^k and x^k ≡ −Σ mᵢ xⁱ.
        for (i, &m) in modulus.iter().enumerate() {
            let idx = d - k + i;
            prod[idx] = (prod[idx] + c * (p - m % p)) % p;
        }
    }
    prod.truncate(k);
    prod
}

/// Lower coefficients of the lexicographically first monic irreducible polynomial of degree `k`.
fn first_irreducible(p: u32, k: u32) -> Vec<u32> {
    let total = p.pow(k);
    (0..total)
        .map(|code| (0..k).map(|i| (code / p.pow(i)) % p).collect::<Vec<u32>>())
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree `1..=k/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len();
    let mut full = m.to_vec();
    full.push(1);
    for d in 1..=k / 2 {
        for code in 0..p.pow(d as u32) {
            let mut f: Vec<u32> = (0..d).map(|i| (code / p.pow(i as u32)) % p).collect();
            f.push(1);
            if poly_rem(&full, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let df = f.len() - 1;
    while r.len() > df {
        let c = *r.last().expect("non-empty");
        let shift = r.len() - 1 - df;
        for (i, &fi) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * fi) % p;
        }
        r.pop();
    }
    r
}
