//! Bound terms for every case of every driver.
//!
//! A plan lists the stages of a case in the order they are tried. Terms whose `a` bounds `|H|`
//! are checked against the Sylow order of the socle times the 2-part of `|Out(G₀)|`.

use num_integer::Integer as _;

use super::BoundTerm;
use crate::arith::{factorial_two_part, gcd, int, ipow, pow2, two_part, Integer, Rational, Sign};
use crate::error::{Error, Result};
use crate::involutions::{
    census_o8plus_q9, class_size_bound, count_gamma1_wreath, count_orth_wreath, count_t1_wreath_cyclic,
    count_t1_wreath_gl1, count_t1_wreath_gl2, count_t1_wreath_sp2, count_t2_wreath_gu1, exceptional_class_size_min,
    gamma1_class_l4, l4_field_extension_class, linear_tk_class, orthogonal_s3_floor, psp4_gu2_class,
    psp4_involution_profile, psp4_sp2q2_class, psp4_t1_class, psp6_gu3_class, psp8_sp4q2_class, scaled,
    symplectic_t2_floor, u4_t2_class, u8_gamma1_floor, unitary_t3_floor, Category, CountBound,
    InvolutionClassLabel as Label, OrthTail,
};
use crate::orders::{Family, GroupId};
use crate::sylow::{exceptional_sylow_bound, sylow2_order_socle, SylowContext};

use super::Driver;

/// The stages of one case at one cell.
#[derive(Debug, Clone)]
pub(super) struct Plan {
    pub case_id: String,
    /// The cell is handed to direct computation before any bound is needed (if it is certified).
    pub pre_delegated: bool,
    /// Empty only for pre-delegated cells outside the range of the closed forms.
    pub stages: Vec<Vec<BoundTerm>>,
}

struct Cx {
    g: GroupId,
    n: u64,
    m: u64,
    q: Integer,
    beta: u64,
}

impl Cx {
    fn qm(&self) -> Integer {
        &self.q - 1
    }

    fn qp(&self) -> Integer {
        &self.q + 1
    }

    fn is(&self, v: i64) -> bool {
        self.q == int(v)
    }

    fn class(&self, c: Category) -> Result<Rational> {
        Ok(class_size_bound(&self.g, &self.q, c)?.value)
    }

    fn label(&self, l: Label) -> Result<Rational> {
        self.class(Category::Label(l))
    }

    /// 2-part bound for `|G : G₀|` used in the `|H|` consistency check.
    fn outer(&self) -> Result<Option<Integer>> {
        use Family::*;
        let q = &self.q;
        let b = self.beta;
        let m = self.m;
        let v = match self.g.family {
            Linear | Unitary => {
                let e = self.g.family.eps().to_int();
                let d = gcd(&Integer::from(self.n), &(q - e))?;
                pow2(1 + b) * two_part(&d)?
            }
            Symplectic | OrthogonalOdd => pow2(1 + b),
            OrthogonalPlus => {
                let d = gcd(&int(4), &(ipow(q, m) - 1))?;
                pow2(b) * int(if self.n == 8 || d == int(4) { 8 } else { 4 })
            }
            OrthogonalMinus => {
                let d = gcd(&int(4), &(ipow(q, m) + 1))?;
                pow2(b) * int(if d == int(4) { 8 } else { 4 })
            }
            E8 | F4 | ThreeD4 => pow2(b),
            G2 if self.is(3) => return Ok(None),
            E7 | E6 | TwistedE6 | G2 => pow2(1 + b),
            TwoG2 => return Ok(None),
        };
        Ok(Some(v))
    }

    /// A term whose `a` is an upper bound for `|H|`, checked against `|H₀|·|Out|₂`.
    fn order(&self, a: Integer, a_src: String, b: Rational, b_src: &str) -> Result<BoundTerm> {
        if let Some(outer) = self.outer()? {
            let h0 = if self.g.family.is_classical() {
                sylow2_order_socle(&SylowContext::simple(self.g, &self.q)?)?
            } else {
                exceptional_sylow_bound(self.g.family, &self.q)? / &outer
            };
            let need = h0 * outer;
            if a < need {
                return Err(Error::Consistency(format!(
                    "{} q={}: |H| bound {a} ({a_src}) is below |H0|*|Out|_2 = {need}",
                    self.g, self.q
                )));
            }
        }
        BoundTerm::new(a, b, a_src, b_src)
    }
}

fn cnt(c: CountBound, a_src: &str, b: Rational, b_src: &str) -> Result<BoundTerm> {
    BoundTerm::new(c.value, b, a_src, b_src)
}

fn plan_of(case_id: impl Into<String>, pre_delegated: bool, stages: Vec<Vec<BoundTerm>>) -> Option<Plan> {
    Some(Plan { case_id: case_id.into(), pre_delegated, stages })
}

fn q_is_1_mod_4(q: &Integer) -> bool {
    q.mod_floor(&int(4)) == int(1)
}

/// The plan for `(n, q)` under `driver`, or `None` if the cell lies outside the driver.
pub(super) fn plan(driver: Driver, group: GroupId, n: u64, q: &Integer) -> Result<Option<Plan>> {
    let cx = Cx { g: group, n, m: n / 2, q: q.clone(), beta: u64::from(*q == int(9)) };
    match driver {
        Driver::Ex => ex(&cx),
        Driver::Psl => psl(&cx),
        Driver::Psu => psu(&cx),
        Driver::Psp => psp(&cx),
        Driver::OOdd => o_odd(&cx),
        Driver::OEvenPlus => o_even_plus(&cx),
        Driver::OEvenMinus => o_even_minus(&cx),
    }
}

fn ex(cx: &Cx) -> Result<Option<Plan>> {
    let f = cx.g.family;
    let a = exceptional_sylow_bound(f, &cx.q)?;
    let b = exceptional_class_size_min(&cx.g, &cx.q)?;
    let term = cx.order(a, "2^(c+b)(q+1)^d".into(), b, "f_G(q)")?;
    Ok(plan_of(format!("ex/{}", f.key()), false, vec![vec![term]]))
}

fn psl(cx: &Cx) -> Result<Option<Plan>> {
    let (n, m, b) = (cx.n, cx.m, cx.beta);
    let q = &cx.q;
    let b1 = || cx.label(Label::t(1));
    let t1_gl1 = || cnt(count_t1_wreath_gl1(n, q)?, "t1 in GL1 wr Sn", b1()?, "t1 class");
    if n % 2 == 1 {
        if q_is_1_mod_4(q) {
            let a2 = cx.order(pow2(n + b) * ipow(&cx.qm(), n - 1), "2^(n+b)(q-1)^(n-1)".into(), cx.class(Category::AllOthers)?, "t2 class")?;
            return Ok(plan_of("psl/case1", n == 5 && cx.is(9), vec![vec![t1_gl1()?, a2]]));
        }
        let a1 = cnt(count_t1_wreath_gl2(m, q, Sign::Plus, true)?, "t1 in (GL2 wr Sm)+GL1", b1()?, "t1 class")?;
        let a2 = cx.order(pow2(3 * m + 1) * ipow(&cx.qp(), m), "2^(3m+1)(q+1)^m".into(), cx.class(Category::AllOthers)?, "t2 class")?;
        return Ok(plan_of("psl/case2", n == 5 && cx.is(3), vec![vec![a1, a2]]));
    }
    if q_is_1_mod_4(q) {
        match n {
            4 => {
                let a2 = cnt(count_gamma1_wreath(4, q, Sign::Plus)?, "gamma1 in GL1 wr S4", cx.label(Label::gamma1())?, "|G0|/|PSp4(q)|")?;
                let a3 = cx.order(pow2(4 + b) * ipow(&cx.qm(), 3), "2^(4+b)(q-1)^3".into(), l4_field_extension_class(q)?, "|GL4(q)|/2|GL2(q^2)|")?;
                let pre = [5, 9, 17].iter().any(|&v| cx.is(v));
                Ok(plan_of("psl/case3/n4", pre, vec![vec![t1_gl1()?, a2, a3]]))
            }
            6 => {
                let a2 = cx.order(pow2(5 + b) * ipow(&cx.qm(), 5), "2^(5+b)(q-1)^5".into(), cx.class(Category::AllOthers)?, "|G0|/|PSp6(q)|")?;
                Ok(plan_of("psl/case3/n6", cx.is(5) || cx.is(9), vec![vec![t1_gl1()?, a2]]))
            }
            _ => {
                let a2 = cx.order(pow2(n + 1 + b) * ipow(&cx.qm(), n - 1), "2^(n+1+b)(q-1)^(n-1)".into(), cx.label(Label::t(2))?, "t2 class")?;
                Ok(plan_of("psl/case3/large", false, vec![vec![t1_gl1()?, a2]]))
            }
        }
    } else {
        let a1 = cnt(count_t1_wreath_gl2(m, q, Sign::Plus, false)?, "t1 in GL2 wr Sm", b1()?, "t1 class")?;
        match n {
            4 => {
                let a2 = cx.order(pow2(5) * ipow(&cx.qp(), 2), "2^5(q+1)^2".into(), cx.label(Label::gamma1())?, "|G0|/|PSp4(q)|")?;
                Ok(plan_of("psl/case4/n4", false, vec![vec![a1, a2]]))
            }
            6 => {
                let a2 = cx.order(pow2(7) * ipow(&cx.qp(), 3), "2^7(q+1)^3".into(), cx.class(Category::AllOthers)?, "|G0|/|PSp6(q)|")?;
                Ok(plan_of("psl/case4/n6", cx.is(3), vec![vec![a1, a2]]))
            }
            _ => {
                let a2 = cx.order(pow2(3 * m) * ipow(&cx.qp(), m), "2^(3m)(q+1)^m".into(), cx.label(Label::t(2))?, "t2 class")?;
                Ok(plan_of("psl/case4/large", false, vec![vec![a1, a2]]))
            }
        }
    }
}

fn psu(cx: &Cx) -> Result<Option<Plan>> {
    let (n, m, b) = (cx.n, cx.m, cx.beta);
    let q = &cx.q;
    let b1 = || cx.label(Label::t(1));
    let b2_t2 = || cx.label(Label::t(2));
    let cyc = || cnt(count_t1_wreath_cyclic(n, q, Sign::Minus)?, "t1 in GU1 wr Sn", b1()?, "t1 class");
    let t2_gu1 = |b2: Rational| cnt(count_t2_wreath_gu1(n, q)?, "t2 in GU1 wr Sn", b2, "t2 class");
    let fact = factorial_two_part(n);
    if n % 2 == 1 {
        if q_is_1_mod_4(q) {
            let a1 = cnt(count_t1_wreath_gl2(m, q, Sign::Minus, true)?, "t1 in (GU2 wr Sm)+GU1", b1()?, "t1 class")?;
            let a2 = cx.order(pow2(n + m + b) * ipow(&cx.qm(), m), "2^(n+m+b)(q-1)^m".into(), b2_t2()?, "t2 class")?;
            return Ok(plan_of("psu/case1", false, vec![vec![a1, a2]]));
        }
        let s1 = vec![cyc()?, cx.order(pow2(n) * ipow(&cx.qp(), n - 1), "2^n(q+1)^(n-1)".into(), b2_t2()?, "t2 class")?];
        let h = int(2) * ipow(&cx.qp(), n - 1) * &fact;
        let s2 = vec![cyc()?, cx.order(h.clone(), "2(q+1)^(n-1)(n!)_2".into(), b2_t2()?, "t2 class")?];
        let mut stages = vec![s1, s2];
        if n >= 7 {
            stages.push(vec![
                cyc()?,
                t2_gu1(b2_t2()?)?,
                cx.order(h, "2(q+1)^(n-1)(n!)_2".into(), unitary_t3_floor(n, q), "q^(6n-17)/2(q+1)")?,
            ]);
        }
        return Ok(plan_of("psu/case2", false, stages));
    }
    if q_is_1_mod_4(q) {
        let a1 = || cnt(count_t1_wreath_gl2(m, q, Sign::Minus, false)?, "t1 in GU2 wr Sm", b1()?, "t1 class");
        match n {
            4 => {
                let pre = [5, 9, 17].iter().any(|&v| cx.is(v));
                let mut stages = vec![vec![
                    a1()?,
                    cx.order(pow2(5 + b) * ipow(&cx.qm(), 2), "2^(5+b)(q-1)^2".into(), cx.label(Label::gamma1())?, "|G0|/|Sp4(q)|")?,
                ]];
                if cx.is(257) {
                    stages.push(vec![
                        a1()?,
                        BoundTerm::new(pow2(20), Rational::from_integer(gamma1_class_l4(Family::Unitary, q)?), "|H1| = 2^20", "|U4(q)|/|PSp4(q)|")?,
                        cx.order(pow2(21), "|H| = 2^21".into(), u4_t2_class(q)?, "|GU4(q)|/2|GU2(q)|^2")?,
                    ]);
                }
                Ok(plan_of("psu/case3/n4", pre, stages))
            }
            6 => {
                let a2 = cx.order(pow2(7 + b) * ipow(&cx.qm(), 3), "2^(7+b)(q-1)^3".into(), cx.class(Category::AllOthers)?, "|G0|/|Sp6(q)|")?;
                Ok(plan_of("psu/case3/n6", false, vec![vec![a1()?, a2]]))
            }
            _ => {
                let a2 = cx.order(pow2(3 * m + b) * ipow(&cx.qm(), m), "2^(3m+b)(q-1)^m".into(), b2_t2()?, "t2 class")?;
                Ok(plan_of("psu/case3/large", false, vec![vec![a1()?, a2]]))
            }
        }
    } else {
        match n {
            4 => {
                let a2 = cnt(count_gamma1_wreath(4, q, Sign::Minus)?, "gamma1 in GU1 wr S4", cx.label(Label::gamma1())?, "|G0|/|Sp4(q)|")?;
                let a3 = cx.order(pow2(4) * ipow(&cx.qp(), 3), "2^4(q+1)^3".into(), u4_t2_class(q)?, "|GU4(q)|/2|GU2(q)|^2")?;
                Ok(plan_of("psu/case4/n4", false, vec![vec![cyc()?, a2, a3]]))
            }
            6 => {
                let others = cx.class(Category::AllOthers)?;
                let mut stages =
                    vec![vec![cyc()?, cx.order(pow2(5) * ipow(&cx.qp(), 5), "2^5(q+1)^5".into(), others.clone(), "|G0|/|Sp6(q)|")?]];
                if cx.is(7) {
                    stages.push(vec![
                        cyc()?,
                        cnt(count_gamma1_wreath(6, q, Sign::Minus)?, "gamma1 in GU1 wr S6", others, "|G0|/|Sp6(q)|")?,
                        cx.order(pow2(20), "|H| <= 2^20".into(), Rational::from_integer(linear_tk_class(Family::Unitary, 6, 2, q)?), "t2 class")?,
                    ]);
                }
                Ok(plan_of("psu/case4/n6", cx.is(3), stages))
            }
            _ => {
                let (case, b3, b3_src) = if n == 8 {
                    ("psu/case4/n8", u8_gamma1_floor(q), "q^12(q^3+1)(q^5+1)(q^7+1)/8")
                } else {
                    ("psu/case4/large", unitary_t3_floor(n, q), "q^(6n-17)/2(q+1)")
                };
                let a3 = cx.order(pow2(n + 1) * ipow(&cx.qp(), n - 1), "2^(n+1)(q+1)^(n-1)".into(), b3, b3_src)?;
                Ok(plan_of(case, false, vec![vec![cyc()?, t2_gu1(b2_t2()?)?, a3]]))
            }
        }
    }
}

fn psp(cx: &Cx) -> Result<Option<Plan>> {
    let (n, m, b) = (cx.n, cx.m, cx.beta);
    let q = &cx.q;
    if n == 4 {
        let pre = *q <= int(17);
        if *q < int(5) {
            return Ok(plan_of("psp/case2/n4", pre, Vec::new()));
        }
        let p = psp4_involution_profile(q)?;
        let eps = if q_is_1_mod_4(q) { 1 } else { -1 };
        let terms = vec![
            BoundTerm::new(p.count_t1, psp4_t1_class(q)?, "t1 involutions lifting to Sp4", "|Sp4(q)|/2|Sp2(q)|^2")?,
            BoundTerm::new(p.count_t1prime_bound, psp4_sp2q2_class(q)?, "i2(H) - t1 - t2", "|Sp4(q)|/2|Sp2(q^2)|")?,
            cx.order(pow2(3 + b) * ipow(&(q - int(eps)), 2), "|D_2(q-e) wr S2|".into(), psp4_gu2_class(q)?, "|Sp4(q)|/2|GU2(q)|")?,
        ];
        return Ok(plan_of("psp/case2/n4", pre, vec![terms]));
    }
    let a1 = cnt(count_t1_wreath_sp2(m, q)?, "t1 in Sp2 wr Sm", cx.label(Label::t(1))?, "t1 class")?;
    let (case, a2) = match n {
        6 => ("psp/case1/n6", cx.order(pow2(4 + b) * ipow(&cx.qp(), 3), "2^(4+b)(q+1)^3".into(), psp6_gu3_class(q)?, "|Sp6(q)|/2|GU3(q)|")?),
        8 => ("psp/case1/n8", cx.order(pow2(7 + b) * ipow(&cx.qp(), 4), "2^(7+b)(q+1)^4".into(), psp8_sp4q2_class(q)?, "|Sp8(q)|/2|Sp4(q^2)|")?),
        _ => ("psp/case1/large", cx.order(pow2(n + b) * ipow(&cx.qp(), m), "2^(n+b)(q+1)^m".into(), symplectic_t2_floor(n, q), "q^(4n-16)/2")?),
    };
    Ok(plan_of(case, false, vec![vec![a1, a2]]))
}

fn o_odd(cx: &Cx) -> Result<Option<Plan>> {
    let (n, m, b) = (cx.n, cx.m, cx.beta);
    let q = &cx.q;
    let b1 = cx.label(Label::s(1))?;
    let b2 = cx.class(Category::AllOthers)?;
    let fact = factorial_two_part(m);
    if q_is_1_mod_4(q) {
        let a1 = cnt(count_orth_wreath(m, q, Sign::Plus, OrthTail::O1, Label::s(1))?, "s1 in (O2+ wr Sm)+O1", b1, "s1 class")?;
        let s1 = vec![a1.clone(), cx.order(pow2(n - 1 + b) * ipow(&cx.qm(), m), "2^(n-1+b)(q-1)^m".into(), b2.clone(), "s2 class")?];
        let s2 = vec![a1, cx.order(pow2(m + b) * ipow(&cx.qm(), m) * fact, "2^(m+b)(q-1)^m(m!)_2".into(), b2, "s2 class")?];
        return Ok(plan_of("o_odd/case1", false, vec![s1, s2]));
    }
    let a1 = cnt(count_orth_wreath(m, q, Sign::Minus, OrthTail::O1, Label::s(1))?, "s1 in (O2- wr Sm)+O1", b1, "s1 class")?;
    if cx.is(3) {
        let a2 = cnt(count_orth_wreath(m, q, Sign::Minus, OrthTail::O1, Label::s(2))?, "s2 in (O2- wr Sm)+O1", b2, "s2 class")?;
        let b3 = orthogonal_s3_floor(n, q);
        let mut stages = vec![vec![
            a1.clone(),
            a2.clone(),
            cx.order(pow2(n - 1) * ipow(&cx.qp(), m), "2^(n-1)(q+1)^m".into(), b3.clone(), "q^(3n-9)/4")?,
        ]];
        if n == 15 {
            stages.push(vec![a1, a2, cx.order(pow2(11) * ipow(&cx.qp(), 7), "2^11(q+1)^7".into(), b3, "q^(3n-9)/4")?]);
        }
        return Ok(plan_of("o_odd/case2/q3", n <= 13, stages));
    }
    let s1 = vec![a1.clone(), cx.order(pow2(n - 1) * ipow(&cx.qp(), m), "2^(n-1)(q+1)^m".into(), b2.clone(), "s2 class")?];
    let s2 = vec![a1, cx.order(pow2(m) * ipow(&cx.qp(), m) * fact, "2^m(q+1)^m(m!)_2".into(), b2, "s2 class")?];
    Ok(plan_of("o_odd/case2", false, vec![s1, s2]))
}

/// `s₁`, `s₂` terms shared by the even-dimensional orthogonal cases.
fn orth_pair(cx: &Cx, eps: Sign, tail: OrthTail, shape: &str) -> Result<(BoundTerm, BoundTerm)> {
    let (m, q) = (cx.m, &cx.q);
    let a1 = cnt(count_orth_wreath(m, q, eps, tail, Label::s(1))?, &format!("s1 in {shape}"), cx.label(Label::s(1))?, "s1 class")?;
    let a2 = cnt(count_orth_wreath(m, q, eps, tail, Label::s(2))?, &format!("s2 in {shape}"), cx.label(Label::s(2))?, "s2 class")?;
    Ok((a1, a2))
}

fn o_even_plus(cx: &Cx) -> Result<Option<Plan>> {
    let (n, m, b) = (cx.n, cx.m, cx.beta);
    let q = &cx.q;
    let floor = orthogonal_s3_floor(n, q);
    let graph = || cx.label(Label::graph_minus3());
    if n == 8 {
        if cx.is(9) {
            let (s1, rest) = census_o8plus_q9();
            let terms = vec![
                cnt(s1, "s1 in a Sylow 2-subgroup of Aut(G0)", cx.label(Label::s(1))?, "s1 class")?,
                cnt(rest, "other involutions of that subgroup", cx.label(Label::s(2))?, "s2 class")?,
            ];
            return Ok(plan_of("o_even_plus/case1/n8-q9", false, vec![terms]));
        }
        let (eps, r, case, shape) = if q_is_1_mod_4(q) {
            (Sign::Plus, cx.qm(), "o_even_plus/case1/n8", "O2+ wr S4")
        } else {
            (Sign::Minus, cx.qp(), "o_even_plus/case2/n8", "O2- wr S4")
        };
        let (a1, _) = orth_pair(cx, eps, OrthTail::None, shape)?;
        let s2 = scaled(count_orth_wreath(m, q, eps, OrthTail::None, Label::s(2))?, 3);
        let a2 = cnt(s2, &format!("3 x s2 in {shape} (triality)"), cx.label(Label::s(2))?, "s2 class")?;
        let a3 = cx.order(pow2(7) * ipow(&r, 4), format!("2^7(q{}1)^4", if eps == Sign::Plus { "-" } else { "+" }), graph()?, "|SO8+(q)|/2|SO5(q)||SO3(q)|")?;
        return Ok(plan_of(case, case.ends_with("case2/n8") && cx.is(3), vec![vec![a1, a2, a3]]));
    }
    if q_is_1_mod_4(q) {
        let (a1, a2) = orth_pair(cx, Sign::Plus, OrthTail::None, "O2+ wr Sm")?;
        let a3 = cx.order(pow2(n + b) * ipow(&cx.qm(), m), "2^(n+b)(q-1)^m".into(), floor, "q^(3n-9)/4")?;
        return Ok(plan_of("o_even_plus/case1/large", false, vec![vec![a1, a2, a3]]));
    }
    if m % 2 == 0 {
        let (a1, a2) = orth_pair(cx, Sign::Minus, OrthTail::None, "O2- wr Sm")?;
        let mut stages = vec![vec![
            a1.clone(),
            a2.clone(),
            cx.order(pow2(n) * ipow(&cx.qp(), m), "2^n(q+1)^m".into(), floor.clone(), "q^(3n-9)/4")?,
        ]];
        if cx.is(3) && n == 20 {
            stages.push(vec![a1, a2, cx.order(pow2(18) * ipow(&int(4), 10), "2^18 4^10".into(), floor, "q^(3n-9)/4")?]);
        } else if cx.is(3) && n == 16 {
            stages.push(vec![
                a1,
                a2,
                BoundTerm::new(pow2(30), graph()?, "|H1| = 2^30", "|SO16+(3)|/2|SO13(3)||SO3(3)|")?,
                cx.order(pow2(31), "|H| = 2^31".into(), cx.label(Label::s(4))?, "|SO16+(3)|/2|SO12-(3)||SO4-(3)|")?,
            ]);
        }
        return Ok(plan_of("o_even_plus/case2/m-even", false, stages));
    }
    let (a1, a2) = orth_pair(cx, Sign::Minus, OrthTail::O2Plus, "(O2- wr S(m-1)) + O2+")?;
    let mut stages = vec![vec![
        a1.clone(),
        a2.clone(),
        cx.order(pow2(n) * ipow(&cx.qp(), m - 1), "2^n(q+1)^(m-1)".into(), floor.clone(), "q^(3n-9)/4")?,
    ]];
    if cx.is(3) && n == 14 {
        stages.push(vec![a1, a2, cx.order(pow2(24), "|H| <= 2^24".into(), floor, "q^(3n-9)/4")?]);
    }
    Ok(plan_of("o_even_plus/case2/m-odd", false, stages))
}

fn o_even_minus(cx: &Cx) -> Result<Option<Plan>> {
    let (n, m, b) = (cx.n, cx.m, cx.beta);
    let q = &cx.q;
    let floor = orthogonal_s3_floor(n, q);
    if q_is_1_mod_4(q) {
        let (a1, a2) = orth_pair(cx, Sign::Plus, OrthTail::O2Minus, "(O2+ wr S(m-1)) + O2-")?;
        let a3 = cx.order(pow2(n + b) * ipow(&cx.qm(), m - 1), "2^(n+b)(q-1)^(m-1)".into(), floor, "q^(3n-9)/4")?;
        return Ok(plan_of("o_even_minus/case1", false, vec![vec![a1, a2, a3]]));
    }
    if m % 2 == 0 {
        let (a1, a2) = orth_pair(cx, Sign::Minus, OrthTail::O2Plus, "(O2- wr S(m-1)) + O2+")?;
        let a3 = cx.order(pow2(n - 1) * ipow(&cx.qp(), m - 1), "2^(n-1)(q+1)^(m-1)".into(), floor, "q^(3n-9)/4")?;
        return Ok(plan_of("o_even_minus/case2/m-even", false, vec![vec![a1, a2, a3]]));
    }
    let (a1, a2) = orth_pair(cx, Sign::Minus, OrthTail::None, "O2- wr Sm")?;
    let mut stages = vec![vec![
        a1.clone(),
        a2.clone(),
        cx.order(pow2(n - 1) * ipow(&cx.qp(), m), "2^(n-1)(q+1)^m".into(), floor.clone(), "q^(3n-9)/4")?,
    ]];
    if cx.is(3) && n >= 14 {
        stages.push(vec![a1, a2, cx.order(pow2(3 * m) * factorial_two_part(m), "2^(3m)(m!)_2".into(), floor, "q^(3n-9)/4")?]);
    }
    Ok(plan_of("o_even_minus/case2/m-odd", false, stages))
}
