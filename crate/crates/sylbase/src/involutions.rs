//! Involution class sizes in groups of Lie type and involution counts in wreath overgroups.
//!
//! Class sizes are exact rationals so that bounds of the shape `½(q/(q+1))q^k` stay exact.
//! Counts refer to images of the named type inside the overgroup `L`; drivers use them as
//! upper bounds for a Sylow 2-subgroup `H ≤ L`.

use num_integer::Integer as _;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::{binomial, exact_sqrt, gcd, int, ipow, rat, ratio, Integer, Rational, Sign};
use crate::error::{domain, Error, Result};
use crate::orders::{index_ratio, order_of, Family, GroupId, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    TK,
    TKPrime,
    SK,
    Gamma1,
    GraphMinus3,
    FieldType,
    Other,
}

/// Involution class label: `t_k`, `t_k'`, `s_k`, `γ₁`, and a few unindexed kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvolutionClassLabel {
    pub kind: LabelKind,
    pub k: Option<u64>,
}

impl InvolutionClassLabel {
    pub fn new(kind: LabelKind, k: Option<u64>) -> Result<Self> {
        let indexed = matches!(kind, LabelKind::TK | LabelKind::TKPrime | LabelKind::SK);
        match (indexed, k) {
            (true, Some(v)) if v >= 1 => Ok(Self { kind, k }),
            (false, None) => Ok(Self { kind, k }),
            _ => domain(format!("label {kind:?} with index {k:?} is malformed")),
        }
    }

    pub fn t(k: u64) -> Self {
        Self { kind: LabelKind::TK, k: Some(k) }
    }

    pub fn t_prime(k: u64) -> Self {
        Self { kind: LabelKind::TKPrime, k: Some(k) }
    }

    pub fn s(k: u64) -> Self {
        Self { kind: LabelKind::SK, k: Some(k) }
    }

    pub fn gamma1() -> Self {
        Self { kind: LabelKind::Gamma1, k: None }
    }

    pub fn graph_minus3() -> Self {
        Self { kind: LabelKind::GraphMinus3, k: None }
    }
}

impl fmt::Display for InvolutionClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.k.unwrap_or(0);
        match self.kind {
            LabelKind::TK => write!(f, "t{k}"),
            LabelKind::TKPrime => write!(f, "t{k}'"),
            LabelKind::SK => write!(f, "s{k}"),
            LabelKind::Gamma1 => f.write_str("gamma1"),
            LabelKind::GraphMinus3 => f.write_str("graph(-I3)"),
            LabelKind::FieldType => f.write_str("field"),
            LabelKind::Other => f.write_str("other"),
        }
    }
}

/// A specific class label, or every involution class not otherwise singled out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    Label(InvolutionClassLabel),
    AllOthers,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Label(l) => l.fmt(f),
            Category::AllOthers => f.write_str("all-others"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSizeBound {
    pub category: Category,
    pub value: Rational,
    pub is_exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountScope {
    ExactInL,
    UpperBoundInH,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBound {
    pub label: InvolutionClassLabel,
    pub value: Integer,
    pub scope: CountScope,
}

fn exact(category: Category, value: Rational) -> ClassSizeBound {
    ClassSizeBound { category, value, is_exact: true }
}

fn lower(category: Category, value: Rational) -> ClassSizeBound {
    ClassSizeBound { category, value, is_exact: false }
}

fn gid(family: Family, n: u64, variant: Variant) -> Result<GroupId> {
    GroupId::new(family, n, variant)
}

fn gl(family: Family, n: u64) -> Result<GroupId> {
    gid(family, n, Variant::GL)
}

fn sp(n: u64) -> Result<GroupId> {
    gid(Family::Symplectic, n, Variant::SL)
}

/// `SO^ε_k` at the SO level; `k` odd ignores `ε`.
fn so(k: u64, eps: Sign) -> Result<GroupId> {
    let family = if k % 2 == 1 {
        Family::OrthogonalOdd
    } else if eps == Sign::Plus {
        Family::OrthogonalPlus
    } else {
        Family::OrthogonalMinus
    };
    gid(family, k, Variant::SO)
}

fn half(v: Integer) -> Rational {
    ratio(v, int(2))
}

fn idx(num: &[GroupId], den: &[GroupId], q: &Integer) -> Result<Integer> {
    index_ratio(num, den, q)
}

fn checked_odd_q(q: &Integer) -> Result<()> {
    if q.is_even() || *q < int(3) {
        return domain(format!("class sizes need odd q >= 3, got {q}"));
    }
    Ok(())
}

/// `|GL^ε_n(q)| / (|GL^ε_{n−k}(q)||GL^ε_k(q)|)`.
pub fn linear_tk_class(family: Family, n: u64, k: u64, q: &Integer) -> Result<Integer> {
    if k == 0 || 2 * k > n {
        return domain(format!("t{k} needs 1 <= k <= n/2 (n = {n})"));
    }
    idx(&[gl(family, n)?], &[gl(family, n - k)?, gl(family, k)?], q)
}

/// `|Sp_n(q)| / (|Sp_{n−2k}(q)||Sp_{2k}(q)|)`.
pub fn symplectic_tk_class(n: u64, k: u64, q: &Integer) -> Result<Integer> {
    if k == 0 || 4 * k > n {
        return domain(format!("t{k} needs 1 <= k <= n/4 (n = {n})"));
    }
    let rest = n - 2 * k;
    if rest == 0 {
        return domain("symplectic t_k needs a complement");
    }
    idx(&[sp(n)?], &[sp(rest)?, sp(2 * k)?], q)
}

/// Class of `(−I_{n−k}, I_k)` in an orthogonal group of sign `eps` (ignored for odd `n`).
///
/// For odd `k` both pieces are odd-dimensional; for even `k` the small piece is of minus type
/// and the complement takes the sign making the total form of type `eps`.
pub fn orthogonal_sk_class(n: u64, eps: Sign, k: u64, q: &Integer) -> Result<Rational> {
    if k == 0 || k >= n {
        return domain(format!("s{k} needs 1 <= k < n (n = {n})"));
    }
    let big = so(n, eps)?;
    let (a, b) = if n % 2 == 1 {
        if k % 2 == 0 {
            (so(n - k, Sign::Plus)?, so(k, Sign::Minus)?)
        } else {
            (so(n - k, Sign::Minus)?, so(k, Sign::Plus)?)
        }
    } else if k % 2 == 1 {
        (so(n - k, Sign::Plus)?, so(k, Sign::Plus)?)
    } else {
        (so(n - k, eps.neg())?, so(k, Sign::Minus)?)
    };
    Ok(half(idx(&[big], &[a, b], q)?))
}

#[cfg(test)]
/// The alternative even-`k` class where both pieces carry type `+` and `eps`.
fn orthogonal_sk_class_alt(n: u64, eps: Sign, k: u64, q: &Integer) -> Result<Rational> {
    let big = so(n, eps)?;
    Ok(half(idx(&[big], &[so(n - k, eps)?, so(k, Sign::Plus)?], q)?))
}

fn q0_of(q: &Integer) -> Option<Integer> {
    exact_sqrt(q).filter(|r| *r > Integer::one())
}

/// Class-size value for the given category, following the part of the classification
/// that applies to `g` (linear/unitary `n ≥ 5` or `n = 4`, symplectic `n ≥ 6` or `n = 4`,
/// odd orthogonal `n ≥ 7`, even orthogonal `n ≥ 8`).
pub fn class_size_bound(g: &GroupId, q: &Integer, category: Category) -> Result<ClassSizeBound> {
    checked_odd_q(q)?;
    if g.variant != Variant::Simple {
        return domain(format!("class sizes are stated for simple groups, got {g}"));
    }
    let n = g.n;
    let label = match category {
        Category::Label(l) => Some(l),
        Category::AllOthers => None,
    };
    let unsupported = |l: InvolutionClassLabel| -> Result<ClassSizeBound> {
        domain(format!("label {l} is not covered for {g}"))
    };
    match g.family {
        Family::Linear | Family::Unitary => {
            let fam = g.family;
            let eps = fam.eps();
            let e = eps.to_int();
            if n >= 5 {
                let d = gcd(&Integer::from(n), &(q - &e))?;
                match label {
                    Some(l) if l == InvolutionClassLabel::t(1) => {
                        Ok(exact(category, rat(linear_tk_class(fam, n, 1, q)?)))
                    }
                    Some(l) if l.kind == LabelKind::TK => {
                        Ok(exact(category, rat(linear_tk_class(fam, n, l.k.unwrap_or(0), q)?)))
                    }
                    Some(l) => unsupported(l),
                    None => {
                        let sq = q0_of(q);
                        if fam == Family::Linear && n == 5 && sq.is_some() {
                            let q0 = sq.expect("square");
                            let v = ipow(q, 5)
                                * (q + 1)
                                * (ipow(&q0, 3) - 1)
                                * (q * q + 1)
                                * (ipow(&q0, 5) - 1);
                            Ok(lower(category, ratio(v, d)))
                        } else if n == 6 {
                            let v = int(2) * ipow(q, 6) * (ipow(q, 3) - &e) * (ipow(q, 5) - &e);
                            Ok(lower(category, ratio(v, d)))
                        } else {
                            Ok(lower(category, rat(linear_tk_class(fam, n, 2, q)?)))
                        }
                    }
                }
            } else if n == 4 {
                match label {
                    Some(l) if l == InvolutionClassLabel::gamma1() => {
                        let v = q * q * (ipow(q, 3) - &e);
                        Ok(lower(category, half(v)))
                    }
                    Some(l) if l == InvolutionClassLabel::t(1) => {
                        Ok(exact(category, rat(linear_tk_class(fam, 4, 1, q)?)))
                    }
                    Some(l) => unsupported(l),
                    None => Ok(lower(category, rat(linear_tk_class(fam, 4, 1, q)?))),
                }
            } else {
                domain(format!("linear/unitary class sizes need n >= 4, got {n}"))
            }
        }
        Family::Symplectic => {
            if n >= 6 {
                match label {
                    Some(l) if l.kind == LabelKind::TK && 4 * l.k.unwrap_or(0) <= n => {
                        Ok(exact(category, rat(symplectic_tk_class(n, l.k.unwrap_or(0), q)?)))
                    }
                    Some(l) => unsupported(l),
                    None => {
                        let v = match (n, q0_of(q)) {
                            (6, Some(q0)) => {
                                half(ipow(&q0, 9) * (q + 1) * (q * q + 1) * (ipow(q, 3) + 1))
                            }
                            (6, None) => {
                                half(ipow(q, 6) * (q - 1) * (q * q + 1) * (ipow(q, 3) - 1))
                            }
                            (8, _) => half(ipow(q, 8) * (q * q - 1) * (ipow(q, 6) - 1)),
                            _ => rat(symplectic_tk_class(n, 2, q)?),
                        };
                        Ok(lower(category, v))
                    }
                }
            } else if n == 4 {
                match label {
                    Some(l) if l == InvolutionClassLabel::t(2) || l == InvolutionClassLabel::t_prime(2) => {
                        Ok(lower(category, half(q * q * (q * q - 1))))
                    }
                    Some(l) => unsupported(l),
                    None => {
                        let v = match q0_of(q) {
                            Some(_) => half(q * q * (q + 1) * (q * q + 1)),
                            None => half(ipow(q, 3) * (q - 1) * (q * q + 1)),
                        };
                        Ok(lower(category, v))
                    }
                }
            } else {
                domain(format!("symplectic class sizes need n >= 4, got {n}"))
            }
        }
        Family::OrthogonalOdd => {
            if n < 7 {
                return domain(format!("odd orthogonal class sizes need n >= 7, got {n}"));
            }
            let m = n / 2;
            match label {
                Some(l)
                    if l == InvolutionClassLabel::s(1)
                        || l == InvolutionClassLabel::t(m)
                        || l == InvolutionClassLabel::t_prime(m) =>
                {
                    Ok(lower(category, half(ipow(q, m) * (ipow(q, m) - 1))))
                }
                Some(l) if l.kind == LabelKind::SK => {
                    Ok(exact(category, orthogonal_sk_class(n, Sign::Plus, l.k.unwrap_or(0), q)?))
                }
                Some(l) => unsupported(l),
                None => {
                    let v = ipow(q, n - 2) * (ipow(q, n - 1) - 1);
                    Ok(lower(category, ratio(v, int(2) * (q + 1))))
                }
            }
        }
        Family::OrthogonalPlus | Family::OrthogonalMinus => {
            if n < 8 {
                return domain(format!("even orthogonal class sizes need n >= 8, got {n}"));
            }
            let eps = g.family.eps();
            let e = eps.to_int();
            let m = n / 2;
            match label {
                Some(l) if l == InvolutionClassLabel::gamma1() || l == InvolutionClassLabel::s(1) => {
                    Ok(lower(category, half(ipow(q, m - 1) * (ipow(q, m) - &e))))
                }
                Some(l) if l == InvolutionClassLabel::graph_minus3() => {
                    Ok(exact(category, orthogonal_sk_class(n, eps, 3, q)?))
                }
                Some(l) if l.kind == LabelKind::SK => {
                    Ok(exact(category, orthogonal_sk_class(n, eps, l.k.unwrap_or(0), q)?))
                }
                Some(l) => unsupported(l),
                None => {
                    let v = ipow(q, n - 2) * (ipow(q, m) - &e) * (ipow(q, m - 1) - &e);
                    Ok(lower(category, ratio(v, int(2) * (q + 1))))
                }
            }
        }
        _ => domain(format!("{g} is not classical; use exceptional_class_size_min")),
    }
}

/// The uniform lower bound `f_G(q)` on involution class sizes in exceptional groups.
pub fn exceptional_class_size_min(g: &GroupId, q: &Integer) -> Result<Rational> {
    checked_odd_q(q)?;
    let gamma = ratio(q - 1, q.clone());
    let v = match g.family {
        Family::E8 => rat(ipow(q, 112)),
        Family::E7 => ratio(int(1), int(2)) * gamma * rat(ipow(q, 54)),
        Family::E6 | Family::TwistedE6 => {
            let delta = ratio(int(1), gcd(&int(3), &(q - g.family.eps().to_int()))?);
            gamma * delta * rat(ipow(q, 26))
        }
        Family::F4 => rat(ipow(q, 16)),
        Family::ThreeD4 => rat(ipow(q, 14)),
        Family::G2 => rat(ipow(q, 7)),
        Family::TwoG2 => return domain("no uniform class-size bound is tabulated for 2G2"),
        _ => return domain(format!("{g} is not exceptional")),
    };
    Ok(v)
}

/// `|L^ε_4(q)| / |PSp_4(q)|`, the exact size of the `γ₁` class in `PGL^ε_4(q)`.
pub fn gamma1_class_l4(family: Family, q: &Integer) -> Result<Integer> {
    let g = GroupId::simple(family, 4)?;
    let s = GroupId::simple(Family::Symplectic, 4)?;
    idx(&[g], &[s], q)
}

/// `|GU_4(q)| / (2|GU_2(q)|²)`, the `t₂` class in `U_4(q)`.
pub fn u4_t2_class(q: &Integer) -> Result<Rational> {
    let g4 = gl(Family::Unitary, 4)?;
    let g2 = gl(Family::Unitary, 2)?;
    Ok(half(idx(&[g4], &[g2, g2], q)?))
}

/// `|GL_4(q)| / (2|GL_2(q²)|)`.
pub fn l4_field_extension_class(q: &Integer) -> Result<Rational> {
    let q2 = q * q;
    let num = order_of(&gl(Family::Linear, 4)?, q)?;
    let den = int(2) * order_of(&gl(Family::Linear, 2)?, &q2)?;
    Ok(Rational::new(num, den))
}

/// `|Sp_4(q)| / (2|Sp_2(q)|²)`: the class of `(−I₂, I₂)` in `PSp_4(q)`.
pub fn psp4_t1_class(q: &Integer) -> Result<Rational> {
    Ok(half(idx(&[sp(4)?], &[sp(2)?, sp(2)?], q)?))
}

/// `|Sp_4(q)| / (2|Sp_2(q²)|)`.
pub fn psp4_sp2q2_class(q: &Integer) -> Result<Rational> {
    let num = order_of(&sp(4)?, q)?;
    let den = int(2) * order_of(&sp(2)?, &(q * q))?;
    Ok(Rational::new(num, den))
}

/// `|Sp_4(q)| / (2|GU_2(q)|)`.
pub fn psp4_gu2_class(q: &Integer) -> Result<Rational> {
    Ok(half(idx(&[sp(4)?], &[gl(Family::Unitary, 2)?], q)?))
}

/// `|Sp_8(q)| / (2|Sp_4(q²)|)`.
pub fn psp8_sp4q2_class(q: &Integer) -> Result<Rational> {
    let num = order_of(&sp(8)?, q)?;
    let den = int(2) * order_of(&sp(4)?, &(q * q))?;
    Ok(Rational::new(num, den))
}

/// `|Sp_6(q)| / (2|GU_3(q)|)`.
pub fn psp6_gu3_class(q: &Integer) -> Result<Rational> {
    Ok(half(idx(&[sp(6)?], &[gl(Family::Unitary, 3)?], q)?))
}

/// `|G₀| / |Sp_n(q)|` for `G₀ = U_n(q)`, `n` even.
pub fn unitary_over_sp(n: u64, q: &Integer) -> Result<Rational> {
    let num = order_of(&GroupId::simple(Family::Unitary, n)?, q)?;
    Ok(Rational::new(num, order_of(&sp(n)?, q)?))
}

/// `¼q^{3n−9}`, a floor for the `(−I₃, I_{n−3})` orthogonal class.
pub fn orthogonal_s3_floor(n: u64, q: &Integer) -> Rational {
    ratio(ipow(q, 3 * n - 9), int(4))
}

/// `½(q/(q+1))q^{6n−18}`, a floor for the unitary `t₃` class.
pub fn unitary_t3_floor(n: u64, q: &Integer) -> Rational {
    ratio(ipow(q, 6 * n - 17), int(2) * (q + 1))
}

/// `½q^{4n−16}`, a floor for the symplectic `t₂` class.
pub fn symplectic_t2_floor(n: u64, q: &Integer) -> Rational {
    half(ipow(q, 4 * n - 16))
}

/// `⅛q^{12}(q³+1)(q⁵+1)(q⁷+1)`, a floor for `|U_8(q)| / |Sp_8(q)|`.
pub fn u8_gamma1_floor(q: &Integer) -> Rational {
    ratio(ipow(q, 12) * (ipow(q, 3) + 1) * (ipow(q, 5) + 1) * (ipow(q, 7) + 1), int(8))
}

fn count(label: InvolutionClassLabel, value: Integer) -> CountBound {
    CountBound { label, value, scope: CountScope::ExactInL }
}

/// `t₁` images in `GL^ε_1(q) wr S_n`: `n + C(n,2)(q − ε)`.
pub fn count_t1_wreath_cyclic(n: u64, q: &Integer, eps: Sign) -> Result<CountBound> {
    checked_odd_q(q)?;
    if n < 2 {
        return domain("wreath counts need n >= 2");
    }
    let v = Integer::from(n) + binomial(n, 2) * (q - eps.to_int());
    Ok(count(InvolutionClassLabel::t(1), v))
}

/// `t₁` images in `GL_1(q) wr S_n`.
pub fn count_t1_wreath_gl1(n: u64, q: &Integer) -> Result<CountBound> {
    count_t1_wreath_cyclic(n, q, Sign::Plus)
}

/// `t₁` images in `(GL^ε_2(q) wr S_m) [⊕ GL^ε_1(q)]`: `m·q(q + ε)` plus one for the extra point.
pub fn count_t1_wreath_gl2(m: u64, q: &Integer, eps: Sign, plus_point: bool) -> Result<CountBound> {
    checked_odd_q(q)?;
    if m < 1 {
        return domain("wreath counts need m >= 1");
    }
    let mut v = Integer::from(m) * q * (q + eps.to_int());
    if plus_point {
        v += 1;
    }
    Ok(count(InvolutionClassLabel::t(1), v))
}

/// `t₁` images in `Sp_2(q) wr S_m`: `m + C(m,2)·q(q²−1)`.
pub fn count_t1_wreath_sp2(m: u64, q: &Integer) -> Result<CountBound> {
    checked_odd_q(q)?;
    if m < 1 {
        return domain("wreath counts need m >= 1");
    }
    let v = Integer::from(m) + binomial(m, 2) * q * (q * q - 1);
    Ok(count(InvolutionClassLabel::t(1), v))
}

/// `t₂` images in `GU_1(q) wr S_n`: `½n(n−1)(1 + (n−2)(q+1) + ¼(n−2)(n−3)(q+1)²)`.
pub fn count_t2_wreath_gu1(n: u64, q: &Integer) -> Result<CountBound> {
    checked_odd_q(q)?;
    if n < 4 {
        return domain("t2 count needs n >= 4");
    }
    let c = q + 1;
    let nn = Integer::from(n);
    // Expanded over a common denominator of 8 to stay integral.
    let inner = int(4) + int(4) * Integer::from(n - 2) * &c + Integer::from((n - 2) * (n - 3)) * &c * &c;
    let v = &nn * (&nn - 1) * inner / 8;
    Ok(count(InvolutionClassLabel::t(2), v))
}

/// `γ₁` images in `GL^ε_1(q) wr S_n` for even `n`: `n!/((n/2)! 2^{n/2}) · (q − ε)^{n/2 − 1}`.
pub fn count_gamma1_wreath(n: u64, q: &Integer, eps: Sign) -> Result<CountBound> {
    checked_odd_q(q)?;
    if n < 2 || n % 2 == 1 {
        return domain("gamma1 count needs even n >= 2");
    }
    let h = n / 2;
    let matchings: Integer = (1..=n).map(Integer::from).product::<Integer>()
        / ((1..=h).map(Integer::from).product::<Integer>() * crate::arith::pow2(h));
    let v = matchings * ipow(&(q - eps.to_int()), h - 1);
    Ok(count(InvolutionClassLabel::gamma1(), v))
}

/// Orthogonal summand appended to the block decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrthTail {
    None,
    O1,
    O2Plus,
    O2Minus,
}

/// `s₁` / `s₂` images in `(O^{ε}_2(q) wr S_m) ⊥ tail`.
///
/// With a two-dimensional tail the wreath part has `m − 1` blocks.
pub fn count_orth_wreath(
    m: u64,
    q: &Integer,
    eps_block: Sign,
    tail: OrthTail,
    label: InvolutionClassLabel,
) -> Result<CountBound> {
    checked_odd_q(q)?;
    if m < 2 {
        return domain("orthogonal wreath counts need m >= 2");
    }
    let k = match label {
        l if l == InvolutionClassLabel::s(1) => 1,
        l if l == InvolutionClassLabel::s(2) => 2,
        l => return domain(format!("orthogonal wreath counts cover s1 and s2, not {l}")),
    };
    let allowed = matches!(
        (eps_block, tail),
        (_, OrthTail::O1) | (_, OrthTail::None) | (Sign::Minus, OrthTail::O2Plus) | (Sign::Plus, OrthTail::O2Minus)
    );
    if !allowed {
        return domain(format!("unsupported configuration O2{eps_block} blocks with tail {tail:?}"));
    }
    let r = q - eps_block.to_int();
    let pair = &r * &r + int(2) * &r;
    let mm = Integer::from(m);
    let v = match tail {
        OrthTail::O1 | OrthTail::None => {
            let one = Integer::from(u8::from(tail == OrthTail::O1));
            if k == 1 {
                &mm * &r + one
            } else {
                &mm + &mm * &r * one + binomial(m, 2) * pair
            }
        }
        OrthTail::O2Plus | OrthTail::O2Minus => {
            let r_tail = q - if tail == OrthTail::O2Plus { int(1) } else { int(-1) };
            let b = Integer::from(m - 1);
            if k == 1 {
                &b * &r + r_tail
            } else {
                &b + &b * &r * &r_tail + binomial(m - 1, 2) * pair + 1
            }
        }
    };
    Ok(count(label, v))
}

/// Involution profile of a Sylow 2-subgroup of `PGSp_4(q)`, `q` an odd prime `≥ 5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Psp4Profile {
    pub i2_h: Integer,
    pub count_t1: Integer,
    pub count_t2_like: Integer,
    pub count_t1prime_bound: Integer,
}

/// Closed forms for both residues of `q` mod 4.
pub fn psp4_involution_profile(q: &Integer) -> Result<Psp4Profile> {
    checked_odd_q(q)?;
    if *q < int(5) {
        return domain("the PSp4 profile needs q >= 5");
    }
    let q2 = q * q;
    let p = if q.mod_floor(&int(4)) == Integer::one() {
        Psp4Profile {
            i2_h: &q2 + int(4) * q - 2,
            count_t1: q.clone(),
            count_t2_like: (&q2 + int(4) * q - 1) / 2,
            count_t1prime_bound: (&q2 + int(2) * q - 3) / 2,
        }
    } else {
        Psp4Profile {
            i2_h: &q2 + int(8) * q + 10,
            count_t1: q + 2,
            count_t2_like: (&q2 + int(8) * q + 11) / 2,
            count_t1prime_bound: (&q2 + int(6) * q + 5) / 2,
        }
    };
    debug_assert_eq!(&p.i2_h - &p.count_t1 - &p.count_t2_like, p.count_t1prime_bound);
    Ok(p)
}

/// `i₂(Q_{2(q−ε)} wr S₂)` with `ε ≡ q (mod 4)`: the non-identity elements squaring to 1.
pub fn quaternion_wreath_i2(q: &Integer) -> Result<Integer> {
    checked_odd_q(q)?;
    let eps = if q.mod_floor(&int(4)) == Integer::one() { 1 } else { -1 };
    Ok(int(2) * (q - int(eps)) + 3)
}

/// Involution census of a Sylow 2-subgroup of `Aut(PΩ⁺₈(9))`: `(s₁ count, all other involutions)`.
pub fn census_o8plus_q9() -> (CountBound, CountBound) {
    let i2 = 14495;
    let s1 = 32;
    (
        CountBound { label: InvolutionClassLabel::s(1), value: int(s1), scope: CountScope::UpperBoundInH },
        CountBound {
            label: InvolutionClassLabel { kind: LabelKind::Other, k: None },
            value: int(i2 - s1),
            scope: CountScope::UpperBoundInH,
        },
    )
}

/// Applies a `k`-fold multiplicity (used for triality-fused classes).
pub fn scaled(c: CountBound, factor: u64) -> CountBound {
    CountBound { value: c.value * Integer::from(factor), ..c }
}

impl CountBound {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl From<CountBound> for Integer {
    fn from(c: CountBound) -> Integer {
        c.value
    }
}

impl std::str::FromStr for OrthTail {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(OrthTail::None),
            "o1" | "O1" => Ok(OrthTail::O1),
            "o2plus" | "O2plus" => Ok(OrthTail::O2Plus),
            "o2minus" | "O2minus" => Ok(OrthTail::O2Minus),
            _ => Err(Error::Usage(format!("unknown tail '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Family::*;

    fn simple(f: Family, n: u64) -> GroupId {
        GroupId::simple(f, n).unwrap()
    }

    fn value(f: Family, n: u64, q: i64, c: Category) -> Rational {
        class_size_bound(&simple(f, n), &int(q), c).unwrap().value
    }

    const T1: Category = Category::Label(InvolutionClassLabel { kind: LabelKind::TK, k: Some(1) });

    #[test]
    fn class_size_examples() {
        let b = class_size_bound(&simple(Linear, 5), &int(3), T1).unwrap();
        assert_eq!(b.value, rat(int(9801)));
        assert!(b.is_exact);
        let t2 = Category::Label(InvolutionClassLabel::t(2));
        assert_eq!(value(Symplectic, 4, 5, t2), rat(int(300)));
        let g = Category::Label(InvolutionClassLabel::graph_minus3());
        assert_eq!(value(OrthogonalPlus, 16, 3, g), rat("2279214355760562960".parse().unwrap()));
        let s4 = Category::Label(InvolutionClassLabel::s(4));
        assert_eq!(value(OrthogonalPlus, 16, 3, s4), rat("40320213639146662987584".parse().unwrap()));
    }

    #[test]
    fn closed_forms_match_indices() {
        for q in [3i64, 5, 7, 9, 17, 31] {
            let qq = int(q);
            for n in 5..=12u64 {
                for (fam, e) in [(Linear, int(1)), (Unitary, int(-1))] {
                    let t1 = linear_tk_class(fam, n, 1, &qq).unwrap();
                    let en = if n % 2 == 0 { int(1) } else { e.clone() };
                    assert_eq!(t1 * (&qq - &e), ipow(&qq, n - 1) * (ipow(&qq, n) - en));
                }
            }
            for n in (6..=16u64).step_by(2) {
                let t1 = symplectic_tk_class(n, 1, &qq).unwrap();
                assert_eq!(t1 * (&qq * &qq - 1), ipow(&qq, n - 2) * (ipow(&qq, n) - 1));
            }
            for n in (7..=21u64).step_by(2) {
                let m = n / 2;
                let s1 = half(idx(&[so(n, Sign::Plus).unwrap()], &[so(n - 1, Sign::Minus).unwrap()], &qq).unwrap());
                assert_eq!(s1, value(OrthogonalOdd, n, q, Category::Label(InvolutionClassLabel::s(1))));
                let s2 = orthogonal_sk_class(n, Sign::Plus, 2, &qq).unwrap();
                assert_eq!(s2, value(OrthogonalOdd, n, q, Category::AllOthers));
                assert_eq!(s1, half(ipow(&qq, m) * (ipow(&qq, m) - 1)));
            }
            for n in (8..=20u64).step_by(2) {
                for (fam, eps) in [(OrthogonalPlus, Sign::Plus), (OrthogonalMinus, Sign::Minus)] {
                    let g1 = Category::Label(InvolutionClassLabel::gamma1());
                    assert_eq!(orthogonal_sk_class(n, eps, 1, &qq).unwrap(), value(fam, n, q, g1));
                    assert_eq!(orthogonal_sk_class(n, eps, 2, &qq).unwrap(), value(fam, n, q, Category::AllOthers));
                }
            }
        }
    }

    #[test]
    fn square_field_branches_are_indices() {
        let q = int(9);
        let q0 = int(3);
        let l5 = order_of(&simple(Linear, 5), &q).unwrap();
        let su5 = order_of(&gid(Unitary, 5, Variant::SL).unwrap(), &q0).unwrap();
        assert_eq!(value(Linear, 5, 9, Category::AllOthers), Rational::new(l5, su5));
        let psp6 = order_of(&simple(Symplectic, 6), &q).unwrap();
        let sp6 = order_of(&sp(6).unwrap(), &q0).unwrap();
        assert_eq!(value(Symplectic, 6, 9, Category::AllOthers), Rational::new(psp6, sp6));
        let psp4 = order_of(&simple(Symplectic, 4), &q).unwrap();
        let sp4 = order_of(&sp(4).unwrap(), &q0).unwrap();
        assert_eq!(value(Symplectic, 4, 9, Category::AllOthers), Rational::new(psp4, sp4));
    }

    #[test]
    fn named_classes_match_closed_forms() {
        for q in [3i64, 5, 7, 9, 17] {
            let qq = int(q);
            let q2 = &qq * &qq;
            assert_eq!(psp4_t1_class(&qq).unwrap(), half(&q2 * (&q2 + 1)));
            assert_eq!(psp4_sp2q2_class(&qq).unwrap(), half(&q2 * (&q2 - 1)));
            assert_eq!(psp4_gu2_class(&qq).unwrap(), half(ipow(&qq, 3) * (&qq - 1) * (&q2 + 1)));
            assert_eq!(psp8_sp4q2_class(&qq).unwrap(), half(ipow(&qq, 8) * (&q2 - 1) * (ipow(&qq, 6) - 1)));
            assert_eq!(psp6_gu3_class(&qq).unwrap(), half(ipow(&qq, 6) * (&qq - 1) * (&q2 + 1) * (ipow(&qq, 3) - 1)));
            assert_eq!(u4_t2_class(&qq).unwrap(), half(ipow(&qq, 4) * (&q2 - &qq + 1) * (&q2 + 1)));
            assert_eq!(l4_field_extension_class(&qq).unwrap(), half(ipow(&qq, 4) * (&qq - 1) * (ipow(&qq, 3) - 1)));
            let o8 = orthogonal_sk_class(8, Sign::Plus, 3, &qq).unwrap();
            assert_eq!(o8, half(ipow(&qq, 7) * (&q2 + 1) * (ipow(&qq, 6) - 1)));
            let g = gamma1_class_l4(Unitary, &qq).unwrap();
            let d = gcd(&int(4), &(&qq + 1)).unwrap();
            assert_eq!(g * &d, int(2) * &q2 * (ipow(&qq, 3) + 1));
            let u6 = unitary_over_sp(6, &qq).unwrap();
            let d6 = gcd(&int(6), &(&qq + 1)).unwrap();
            assert_eq!(u6 * rat(d6), rat(ipow(&qq, 6) * (ipow(&qq, 3) + 1) * (ipow(&qq, 5) + 1)));
        }
    }

    #[test]
    fn floors_are_below_indices() {
        for q in [3i64, 5, 7, 9, 17, 31, 127] {
            let qq = int(q);
            for n in (7..=31u64).step_by(2) {
                let exact = half(idx(&[so(n, Sign::Plus).unwrap()], &[so(n - 3, Sign::Minus).unwrap(), so(3, Sign::Plus).unwrap()], &qq).unwrap());
                assert!(orthogonal_s3_floor(n, &qq) < exact);
            }
            for n in (8..=30u64).step_by(2) {
                for eps in [Sign::Plus, Sign::Minus] {
                    assert!(orthogonal_s3_floor(n, &qq) < orthogonal_sk_class(n, eps, 3, &qq).unwrap());
                }
            }
            for n in 6..=30u64 {
                assert!(unitary_t3_floor(n, &qq) < rat(linear_tk_class(Unitary, n, 3, &qq).unwrap()));
            }
            for n in (10..=30u64).step_by(2) {
                assert!(symplectic_t2_floor(n, &qq) < rat(symplectic_tk_class(n, 2, &qq).unwrap()));
            }
            assert!(u8_gamma1_floor(&qq) <= unitary_over_sp(8, &qq).unwrap());
        }
    }

    #[test]
    fn exceptional_minimums() {
        let g2 = GroupId::exceptional(G2).unwrap();
        assert_eq!(exceptional_class_size_min(&g2, &int(5)).unwrap(), rat(int(78125)));
        let f4 = GroupId::exceptional(F4).unwrap();
        assert_eq!(exceptional_class_size_min(&f4, &int(3)).unwrap(), rat(int(43046721)));
        let e6 = GroupId::exceptional(TwistedE6).unwrap();
        assert_eq!(exceptional_class_size_min(&e6, &int(3)).unwrap(), ratio(int(2) * ipow(&int(3), 26), int(3)));
        let e6p = GroupId::exceptional(E6).unwrap();
        assert_eq!(exceptional_class_size_min(&e6p, &int(7)).unwrap(), ratio(int(6) * ipow(&int(7), 25), int(3)));
        assert!(exceptional_class_size_min(&GroupId::exceptional(TwoG2).unwrap(), &int(27)).is_err());
    }

    #[test]
    fn out_of_hypothesis_queries_fail() {
        let g = simple(Linear, 5);
        assert!(class_size_bound(&g, &int(4), T1).is_err());
        assert!(class_size_bound(&simple(Linear, 3), &int(3), T1).is_err());
        assert!(class_size_bound(&simple(OrthogonalOdd, 5), &int(3), Category::AllOthers).is_err());
        let gm = Category::Label(InvolutionClassLabel::gamma1());
        assert!(class_size_bound(&simple(Symplectic, 8), &int(3), gm).is_err());
        assert!(InvolutionClassLabel::new(LabelKind::TK, None).is_err());
        assert!(InvolutionClassLabel::new(LabelKind::Gamma1, Some(1)).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_t1_wreath_gl1(4, &int(5)).unwrap().value, int(28));
        assert_eq!(count_t1_wreath_gl1(2, &int(3)).unwrap().value, int(4));
        assert_eq!(count_t1_wreath_gl1(5, &int(9)).unwrap().value, int(85));
        assert_eq!(count_t1_wreath_gl2(2, &int(7), Sign::Plus, true).unwrap().value, int(113));
        assert_eq!(count_t1_wreath_gl2(2, &int(3), Sign::Minus, false).unwrap().value, int(12));
        assert_eq!(count_t1_wreath_gl2(1, &int(3), Sign::Plus, false).unwrap().value, int(12));
        assert_eq!(count_t2_wreath_gu1(7, &int(3)).unwrap().value, int(2121));
        assert_eq!(count_t2_wreath_gu1(4, &int(3)).unwrap().value, int(102));
        assert_eq!(count_t2_wreath_gu1(5, &int(3)).unwrap().value, int(370));
        let s1 = InvolutionClassLabel::s(1);
        let s2 = InvolutionClassLabel::s(2);
        assert_eq!(count_orth_wreath(4, &int(5), Sign::Plus, OrthTail::O1, s1).unwrap().value, int(17));
        assert_eq!(count_orth_wreath(4, &int(3), Sign::Minus, OrthTail::None, s1).unwrap().value, int(16));
        assert_eq!(count_orth_wreath(5, &int(3), Sign::Minus, OrthTail::O2Plus, s2).unwrap().value, int(181));
        assert!(count_orth_wreath(5, &int(3), Sign::Plus, OrthTail::O2Plus, s2).is_err());
        assert_eq!(count_gamma1_wreath(4, &int(257), Sign::Plus).unwrap().value, int(768));
        assert_eq!(count_gamma1_wreath(6, &int(7), Sign::Minus).unwrap().value, int(15 * 64));
    }

    #[test]
    fn orth_counts_match_displayed_forms() {
        for q in [3i64, 5, 7, 9, 17] {
            let qq = int(q);
            for m in 2..=20u64 {
                let mm = Integer::from(m);
                let s1 = InvolutionClassLabel::s(1);
                let s2 = InvolutionClassLabel::s(2);
                let c = |e, t, l| count_orth_wreath(m, &qq, e, t, l).unwrap().value;
                let r_p = &qq - 1;
                let r_m = &qq + 1;
                let half_pair = |r: &Integer| binomial(m, 2) * (r * r + int(2) * r);
                let half_pair1 = |r: &Integer| binomial(m - 1, 2) * (r * r + int(2) * r);
                assert_eq!(c(Sign::Plus, OrthTail::O1, s1), &mm * &r_p + 1);
                assert_eq!(c(Sign::Minus, OrthTail::O1, s1), &mm * &r_m + 1);
                assert_eq!(c(Sign::Minus, OrthTail::O1, s2), &mm * (&qq + 2) + half_pair(&r_m));
                assert_eq!(c(Sign::Plus, OrthTail::None, s2), &mm + half_pair(&r_p));
                assert_eq!(c(Sign::Minus, OrthTail::O2Plus, s1), &mm * &r_m - 2);
                assert_eq!(c(Sign::Plus, OrthTail::O2Minus, s1), &mm * &r_p + 2);
                let tail2 = (&mm - 1) * &qq * &qq + 1;
                assert_eq!(c(Sign::Minus, OrthTail::O2Plus, s2), half_pair1(&r_m) + &tail2);
                assert_eq!(c(Sign::Plus, OrthTail::O2Minus, s2), half_pair1(&r_p) + &tail2);
            }
        }
    }

    #[test]
    fn psp4_profile_examples() {
        let p5 = psp4_involution_profile(&int(5)).unwrap();
        assert_eq!((p5.i2_h.clone(), p5.count_t1.clone(), p5.count_t2_like.clone(), p5.count_t1prime_bound.clone()), (int(43), int(5), int(22), int(16)));
        let p7 = psp4_involution_profile(&int(7)).unwrap();
        assert_eq!((p7.i2_h, p7.count_t1), (int(115), int(9)));
        for q in [5i64, 7, 13, 17, 31, 127, 257, 8191, 65537] {
            let p = psp4_involution_profile(&int(q)).unwrap();
            assert_eq!(p.i2_h - p.count_t1 - p.count_t2_like, p.count_t1prime_bound);
        }
        assert!(psp4_involution_profile(&int(8)).is_err());
    }

    /// Every displayed alternative for the non-`t₁` classes is at least the "all others" value.
    #[test]
    fn all_others_is_the_minimum_of_encoded_expressions() {
        let qs = [3i64, 5, 7, 9, 17, 31, 127, 257];
        for &q in &qs {
            let qq = int(q);
            for fam in [Linear, Unitary] {
                for n in 5..=20u64 {
                    let floor = value(fam, n, q, Category::AllOthers);
                    for k in 2..=n / 2 {
                        assert!(floor <= rat(linear_tk_class(fam, n, k, &qq).unwrap()), "{fam} n={n} q={q} k={k}");
                    }
                    let g0 = order_of(&simple(fam, n), &qq).unwrap();
                    let other = if n % 2 == 0 {
                        order_of(&simple(Symplectic, n), &qq).unwrap()
                    } else {
                        order_of(&simple(OrthogonalOdd, n), &qq).unwrap()
                    };
                    assert!(floor <= Rational::new(g0, other), "{fam} graph n={n} q={q}");
                }
            }
            for n in (6..=24u64).step_by(2) {
                let floor = value(Symplectic, n, q, Category::AllOthers);
                for k in 2..=n / 4 {
                    assert!(floor <= rat(symplectic_tk_class(n, k, &qq).unwrap()));
                }
                if n >= 8 {
                    let m = n / 2;
                    if m % 2 == 0 {
                        let num = order_of(&sp(n).unwrap(), &qq).unwrap();
                        let den = int(2) * order_of(&sp(m).unwrap(), &(&qq * &qq)).unwrap();
                        assert!(floor <= Rational::new(num, den), "Sp{n} over F_q2 at q={q}");
                    }
                }
            }
            for n in (7..=25u64).step_by(2) {
                let floor = value(OrthogonalOdd, n, q, Category::AllOthers);
                for k in (2..n - 1).step_by(2) {
                    assert!(floor <= orthogonal_sk_class(n, Sign::Plus, k, &qq).unwrap());
                    let alt = half(idx(&[so(n, Sign::Plus).unwrap()], &[so(n - k, Sign::Plus).unwrap(), so(k, Sign::Plus).unwrap()], &qq).unwrap());
                    assert!(floor <= alt);
                }
            }
            for n in (8..=24u64).step_by(2) {
                for (fam, eps) in [(OrthogonalPlus, Sign::Plus), (OrthogonalMinus, Sign::Minus)] {
                    let floor = value(fam, n, q, Category::AllOthers);
                    for k in 2..=n / 2 {
                        assert!(floor <= orthogonal_sk_class(n, eps, k, &qq).unwrap(), "{fam} n={n} k={k} q={q}");
                        if k % 2 == 0 {
                            assert!(floor <= orthogonal_sk_class_alt(n, eps, k, &qq).unwrap());
                        }
                    }
                }
            }
        }
    }
}
