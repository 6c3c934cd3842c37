//! Orders of Sylow 2-subgroups of simple groups of Lie type in odd characteristic.

use num_integer::Integer as _;
use num_traits::One;

use crate::arith::{factorial_two_part, gcd, int, ipow, two_part, two_part_power, Integer, Sign};
use crate::error::{domain, Result};
use crate::orders::{Family, GroupId, Variant};

/// Inputs for the Sylow order of `G₀` and of an almost simple overgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SylowContext {
    pub group: GroupId,
    pub q: Integer,
    /// `(q² − 1)₂`.
    pub alpha: Integer,
    /// 1 iff `q = 9`.
    pub beta: u32,
    /// Upper bound on `|G : G₀|₂` supplied by the caller.
    pub outer_two_part_bound: Integer,
}

impl SylowContext {
    /// Builds the context, deriving `alpha` and `beta` from `q`.
    pub fn new(group: GroupId, q: &Integer, outer_two_part_bound: Integer) -> Result<SylowContext> {
        if q.is_even() || *q < int(3) {
            return domain(format!("Sylow 2-orders need odd q >= 3, got {q}"));
        }
        if outer_two_part_bound < Integer::one() {
            return domain("outer 2-part bound must be positive");
        }
        let ctx = SylowContext {
            group,
            q: q.clone(),
            alpha: two_part_power(q, 2, Sign::Plus)?,
            beta: u32::from(*q == int(9)),
            outer_two_part_bound,
        };
        debug_assert_eq!(ctx.alpha, two_part(&(q * q - 1))?);
        Ok(ctx)
    }

    /// Context for the simple group itself (outer bound 1).
    pub fn simple(group: GroupId, q: &Integer) -> Result<SylowContext> {
        SylowContext::new(group, q, Integer::one())
    }
}

fn q_minus_two_part(q: &Integer, eps: Sign) -> Result<Integer> {
    two_part(&(q - eps.to_int()))
}

/// `|H₀|` for `H₀` a Sylow 2-subgroup of the simple group `G₀`.
pub fn sylow2_order_socle(ctx: &SylowContext) -> Result<Integer> {
    use Family::*;
    let g = &ctx.group;
    if g.variant != Variant::Simple {
        return domain(format!("Sylow table rows describe simple groups, got {g}"));
    }
    let q = &ctx.q;
    let a = &ctx.alpha;
    let n = g.n;
    let m = n / 2;
    let fact = factorial_two_part;
    let v = match g.family {
        Linear | Unitary => {
            let eps = g.family.eps();
            let qe = q_minus_two_part(q, eps)?;
            if n % 2 == 1 {
                if n < 3 {
                    return domain("linear/unitary row needs n >= 3 for odd n");
                }
                ipow(a, m) * ipow(&qe, m) * fact(m)
            } else {
                let d = gcd(&Integer::from(n), &(q - eps.to_int()))?;
                let d2 = two_part(&d)?;
                ipow(a, m) * ipow(&qe, m - 1) * fact(m) / d2
            }
        }
        Symplectic => ipow(a, m) * fact(m) / 2,
        OrthogonalOdd => ipow(a, m) * fact(m) / 2,
        OrthogonalPlus => {
            if m < 3 {
                return domain("POmega+ row needs m >= 3");
            }
            let d = gcd(&int(4), &(ipow(q, m) - 1))?;
            if m % 2 == 0 {
                ipow(a, m) * fact(m) / (2 * d)
            } else {
                ipow(a, m - 1) * q_minus_two_part(q, Sign::Plus)? * fact(m - 1) / d
            }
        }
        OrthogonalMinus => {
            if m < 3 {
                return domain("POmega- row needs m >= 3");
            }
            if m % 2 == 0 {
                ipow(a, m - 1) * fact(m - 1)
            } else {
                let d = gcd(&int(4), &(ipow(q, m) + 1))?;
                ipow(a, m - 1) * q_minus_two_part(q, Sign::Minus)? * fact(m - 1) / d
            }
        }
        E8 => int(64) * ipow(a, 8),
        E7 => int(4) * ipow(a, 7),
        E6 | TwistedE6 => {
            let qe = q_minus_two_part(q, g.family.eps())?;
            int(8) * ipow(a, 4) * &qe * &qe
        }
        F4 => int(8) * ipow(a, 4),
        ThreeD4 => a * a,
        G2 => {
            if *q < int(5) {
                return domain("G2 row needs q >= 5");
            }
            a * a
        }
        TwoG2 => {
            let ok = u64::try_from(q)
                .ok()
                .and_then(crate::arith::prime_power)
                .is_some_and(|(p, f)| p == 3 && f % 2 == 1 && f >= 3);
            if !ok {
                return domain(format!("2G2 row needs q = 3^(2k+1) >= 27, got {q}"));
            }
            a.clone()
        }
    };
    Ok(v)
}

/// `|H| = |H₀| · |G : G₀|₂`, using the caller's outer bound.
pub fn sylow2_order_full(ctx: &SylowContext) -> Result<Integer> {
    Ok(sylow2_order_socle(ctx)? * &ctx.outer_two_part_bound)
}

/// `2^{c+β}(q+1)^d`, an upper bound for `|H|` in an almost simple group with exceptional socle.
pub fn exceptional_sylow_bound(family: Family, q: &Integer) -> Result<Integer> {
    use Family::*;
    let (c, d) = match family {
        E8 => (14, 8),
        E7 => (10, 7),
        E6 | TwistedE6 => (8, 6),
        F4 => (7, 4),
        ThreeD4 => (2, 2),
        G2 => (3, 2),
        _ => return domain(format!("no exceptional Sylow bound for {}", family.key())),
    };
    if q.is_even() || *q < int(3) {
        return domain(format!("Sylow bounds need odd q >= 3, got {q}"));
    }
    let beta = u64::from(*q == int(9));
    Ok(crate::arith::pow2(c + beta) * ipow(&(q + 1), d))
}

/// Whether `(family, n)` satisfies a table row condition.
pub fn row_applies(family: Family, n: u64) -> bool {
    use Family::*;
    match family {
        Linear | Unitary => n >= 2,
        Symplectic => n >= 2 && n % 2 == 0,
        OrthogonalOdd => n >= 3 && n % 2 == 1,
        OrthogonalPlus | OrthogonalMinus => n >= 6 && n % 2 == 0,
        _ => n == 0,
    }
}

/// Result of comparing one table row with the order catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyRow {
    pub group: GroupId,
    pub q: Integer,
    pub table: Integer,
    pub catalog: Integer,
}

impl ConsistencyRow {
    pub fn agrees(&self) -> bool {
        self.table == self.catalog
    }
}

/// Compares every applicable row against the 2-part of the catalog order.
///
/// Cells rejected by a row guard (e.g. `G2` at `q = 3`) are skipped.
pub fn master_consistency(
    families: &[Family],
    n_range: std::ops::RangeInclusive<u64>,
    qs: &[Integer],
) -> Result<Vec<ConsistencyRow>> {
    let mut out = Vec::new();
    for &family in families {
        let ns: Vec<u64> = if family.is_classical() {
            n_range.clone().filter(|&n| row_applies(family, n)).collect()
        } else {
            vec![0]
        };
        for n in ns {
            let group = GroupId::simple(family, n)?;
            for q in qs {
                let ctx = SylowContext::simple(group, q)?;
                let table = match sylow2_order_socle(&ctx) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let catalog = two_part(&crate::orders::order_of(&group, q)?)?;
                out.push(ConsistencyRow { group, q: q.clone(), table, catalog });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(f: Family, n: u64, q: i64, outer: i64) -> SylowContext {
        SylowContext::new(GroupId::simple(f, n).unwrap(), &int(q), int(outer)).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(sylow2_order_socle(&ctx(Family::Symplectic, 4, 3, 1)).unwrap(), int(64));
        assert_eq!(sylow2_order_socle(&ctx(Family::Linear, 5, 9, 1)).unwrap(), int(1 << 15));
        assert_eq!(sylow2_order_socle(&ctx(Family::TwoG2, 0, 27, 1)).unwrap(), int(8));
        assert_eq!(sylow2_order_full(&ctx(Family::Symplectic, 4, 3, 2)).unwrap(), int(128));
        let e6 = ctx(Family::E6, 0, 5, 4);
        assert_eq!(sylow2_order_socle(&e6).unwrap(), int(1 << 19));
        assert_eq!(sylow2_order_full(&e6).unwrap(), int(1 << 21));
    }

    #[test]
    fn context_invariants() {
        let c = ctx(Family::Linear, 4, 9, 1);
        assert_eq!(c.alpha, int(16));
        assert_eq!(c.beta, 1);
        assert_eq!(ctx(Family::Linear, 4, 7, 1).beta, 0);
        assert!(SylowContext::simple(GroupId::simple(Family::Linear, 4).unwrap(), &int(4)).is_err());
    }

    #[test]
    fn guards() {
        assert!(sylow2_order_socle(&ctx(Family::TwoG2, 0, 3, 1)).is_err());
        assert!(sylow2_order_socle(&ctx(Family::G2, 0, 3, 1)).is_err());
        let sl = GroupId::new(Family::Linear, 4, Variant::SL).unwrap();
        assert!(sylow2_order_socle(&SylowContext::simple(sl, &int(3)).unwrap()).is_err());
    }

    #[test]
    fn exceptional_bounds_dominate_socle() {
        assert_eq!(exceptional_sylow_bound(Family::G2, &int(5)).unwrap(), int(288));
        assert!(exceptional_sylow_bound(Family::TwoG2, &int(27)).is_err());
        for f in [Family::E8, Family::E7, Family::E6, Family::TwistedE6, Family::F4, Family::ThreeD4, Family::G2] {
            for q in [5i64, 7, 9, 17, 31, 127] {
                let h0 = sylow2_order_socle(&ctx(f, 0, q, 1)).unwrap();
                assert!(h0 <= exceptional_sylow_bound(f, &int(q)).unwrap(), "{} q={q}", f.key());
            }
        }
    }

    #[test]
    fn consistency_small_grid() {
        let qs: Vec<Integer> = [3, 5, 7, 9].into_iter().map(int).collect();
        let rows = master_consistency(&Family::ALL, 2..=12, &qs).unwrap();
        assert!(rows.len() > 100);
        for r in rows {
            assert!(r.agrees(), "{} at q = {}: {} vs {}", r.group, r.q, r.table, r.catalog);
        }
    }
}
