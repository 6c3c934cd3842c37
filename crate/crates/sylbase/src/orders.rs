//! Group order formulas: a factored notation, its parser, and a data-driven catalog.
//!
//! Formulas use the notation `m*q^E(q^a-1)(q^b+1).../D(q^c-1)...`, where every part
//! is optional. The catalog ships one text file per family under `data/orders/`.

use num_integer::Integer as _;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::arith::{gcd, int, ipow, Integer, Sign};
use crate::error::{domain, Error, Result};

/// A cyclotomic factor `(q^degree − sign)`.
pub type Factor = (u64, Sign);

/// `multiplier · q^q_exponent · Π(q^d − s) / (divisor · Π(q^d' − s'))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredOrder {
    pub q_exponent: u64,
    pub factors: Vec<Factor>,
    pub divisor: Integer,
    pub multiplier: Integer,
    /// Cyclotomic factors of the denominator (used by `3D4`); empty for most entries.
    pub den_factors: Vec<Factor>,
}

impl FactoredOrder {
    pub fn one() -> Self {
        FactoredOrder {
            q_exponent: 0,
            factors: Vec::new(),
            divisor: Integer::one(),
            multiplier: Integer::one(),
            den_factors: Vec::new(),
        }
    }

    /// Sorts factors by degree, `(q^d+1)` before `(q^d-1)`.
    fn canonicalize(&mut self) {
        let key = |(d, s): &Factor| (*d, *s == Sign::Plus);
        self.factors.sort_by_key(key);
        self.den_factors.sort_by_key(key);
    }

    /// Evaluates at `q`, failing if the denominator does not divide the numerator.
    pub fn eval(&self, q: &Integer) -> Result<Integer> {
        self.eval_with(q, false)
    }

    /// Evaluates with the unitary substitution `q → −q` (absolute value taken).
    pub fn eval_unitary(&self, q: &Integer) -> Result<Integer> {
        self.eval_with(q, true)
    }

    fn eval_with(&self, q: &Integer, flip: bool) -> Result<Integer> {
        let term = |(d, s): &Factor| -> Integer {
            let s = if flip { flip_sign(*d, *s) } else { *s };
            ipow(q, *d) - s.to_int()
        };
        let mut num = &self.multiplier * ipow(q, self.q_exponent);
        for f in &self.factors {
            num *= term(f);
        }
        let mut den = self.divisor.clone();
        for f in &self.den_factors {
            den *= term(f);
        }
        if den.is_zero() {
            return Err(Error::Consistency(format!("zero denominator in {self} at q = {q}")));
        }
        let (quot, rem) = num.div_rem(&den);
        if !rem.is_zero() {
            return Err(Error::Consistency(format!(
                "{self} is not integral at q = {q}"
            )));
        }
        Ok(num_traits::Signed::abs(&quot))
    }
}

/// Sign of `(q^d − s)` after substituting `q → −q` and dropping the overall sign.
fn flip_sign(d: u64, s: Sign) -> Sign {
    if d % 2 == 1 {
        s.neg()
    } else {
        s
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, (d, s): &Factor) -> fmt::Result {
    let op = match s {
        Sign::Plus => '-',
        Sign::Minus => '+',
    };
    if *d == 1 {
        write!(f, "(q{op}1)")
    } else {
        write!(f, "(q^{d}{op}1)")
    }
}

impl fmt::Display for FactoredOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body_empty = self.q_exponent == 0 && self.factors.is_empty();
        if !self.multiplier.is_one() {
            if body_empty {
                write!(f, "{}", self.multiplier)?;
            } else {
                write!(f, "{}*", self.multiplier)?;
            }
        } else if body_empty {
            f.write_str("1")?;
        }
        match self.q_exponent {
            0 => {}
            1 => f.write_str("q")?,
            e => write!(f, "q^{e}")?,
        }
        for fac in &self.factors {
            write_factor(f, fac)?;
        }
        if !self.divisor.is_one() || !self.den_factors.is_empty() {
            f.write_str("/")?;
            if !self.divisor.is_one() {
                write!(f, "{}", self.divisor)?;
            }
            for fac in &self.den_factors {
                write_factor(f, fac)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.pos, message: message.into() })
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<Integer> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn small(&mut self) -> Result<u64> {
        let start = self.pos;
        let v = self.number()?;
        u64::try_from(v).or_else(|_| {
            self.pos = start;
            self.err("exponent too large")
        })
    }

    /// `q` or `q^E`.
    fn q_power(&mut self) -> Result<u64> {
        self.expect(b'q')?;
        if self.eat(b'^') {
            self.small()
        } else {
            Ok(1)
        }
    }

    /// `(q^d-1)` or `(q^d+1)`.
    fn factor(&mut self) -> Result<Factor> {
        self.expect(b'(')?;
        let d = self.q_power()?;
        if d == 0 {
            return self.err("factor degree must be positive");
        }
        let sign = if self.eat(b'-') {
            Sign::Plus
        } else if self.eat(b'+') {
            Sign::Minus
        } else {
            return self.err("expected '-' or '+'");
        };
        if !self.eat(b'1') {
            return self.err("expected '1'");
        }
        self.expect(b')')?;
        Ok((d, sign))
    }
}

/// Parses the factored order notation.
pub fn parse_order_formula(text: &str) -> Result<FactoredOrder> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let mut out = FactoredOrder::one();
    if matches!(p.peek(), Some(b'0'..=b'9')) {
        let m = p.number()?;
        if m.is_zero() {
            p.pos = 0;
            return p.err("multiplier must be positive");
        }
        out.multiplier = m;
        if p.peek().is_none() {
            return Ok(out);
        }
        if p.peek() != Some(b'/') {
            p.expect(b'*')?;
        }
    }
    if p.peek() == Some(b'q') {
        out.q_exponent = p.q_power()?;
    }
    while p.peek() == Some(b'(') {
        out.factors.push(p.factor()?);
    }
    if p.eat(b'/') {
        let at = p.pos;
        if matches!(p.peek(), Some(b'0'..=b'9')) {
            out.divisor = p.number()?;
            if out.divisor.is_zero() {
                p.pos = at;
                return p.err("divisor must be non-zero");
            }
        }
        while p.peek() == Some(b'(') {
            out.den_factors.push(p.factor()?);
        }
        if p.pos == at {
            return p.err("expected a divisor after '/'");
        }
    }
    if p.peek().is_some() {
        return p.err("unexpected character");
    }
    if text.is_empty() {
        return p.err("empty formula");
    }
    out.canonicalize();
    Ok(out)
}

/// Families of simple groups of Lie type and the associated classical groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Linear,
    Unitary,
    Symplectic,
    OrthogonalOdd,
    OrthogonalPlus,
    OrthogonalMinus,
    E8,
    E7,
    E6,
    TwistedE6,
    F4,
    ThreeD4,
    G2,
    TwoG2,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::Linear,
        Family::Unitary,
        Family::Symplectic,
        Family::OrthogonalOdd,
        Family::OrthogonalPlus,
        Family::OrthogonalMinus,
        Family::E8,
        Family::E7,
        Family::E6,
        Family::TwistedE6,
        Family::F4,
        Family::ThreeD4,
        Family::G2,
        Family::TwoG2,
    ];

    pub fn is_classical(self) -> bool {
        matches!(
            self,
            Family::Linear
                | Family::Unitary
                | Family::Symplectic
                | Family::OrthogonalOdd
                | Family::OrthogonalPlus
                | Family::OrthogonalMinus
        )
    }

    /// The sign `ε` carried by the family (`−` for unitary, twisted and minus-type).
    pub fn eps(self) -> Sign {
        match self {
            Family::Unitary | Family::OrthogonalMinus | Family::TwistedE6 => Sign::Minus,
            _ => Sign::Plus,
        }
    }

    /// Short machine name used in reports and data files.
    pub fn key(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Unitary => "unitary",
            Family::Symplectic => "symplectic",
            Family::OrthogonalOdd => "orthogonal-odd",
            Family::OrthogonalPlus => "orthogonal-plus",
            Family::OrthogonalMinus => "orthogonal-minus",
            Family::E8 => "E8",
            Family::E7 => "E7",
            Family::E6 => "E6",
            Family::TwistedE6 => "2E6",
            Family::F4 => "F4",
            Family::ThreeD4 => "3D4",
            Family::G2 => "G2",
            Family::TwoG2 => "2G2",
        }
    }

    pub fn from_key(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown family '{s}'")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Which group of the isogeny chain is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    Simple,
    GL,
    SL,
    SO,
    Omega,
}

/// A group of Lie type: family, natural-module dimension (0 for exceptional) and variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId {
    pub family: Family,
    pub n: u64,
    pub variant: Variant,
}

impl GroupId {
    pub fn new(family: Family, n: u64, variant: Variant) -> Result<GroupId> {
        use Family::*;
        use Variant::*;
        let ok_variant = match family {
            Linear | Unitary => matches!(variant, Simple | GL | SL),
            Symplectic => matches!(variant, Simple | SL),
            OrthogonalOdd | OrthogonalPlus | OrthogonalMinus => {
                matches!(variant, Simple | SO | Omega)
            }
            _ => variant == Simple,
        };
        if !ok_variant {
            return domain(format!("variant {variant:?} is not defined for {family}"));
        }
        let min = match (family, variant) {
            (Linear | Unitary, Simple) => 2,
            (Linear | Unitary, _) => 1,
            (Symplectic, _) => 2,
            (OrthogonalOdd, Simple) => 3,
            (OrthogonalOdd, _) => 1,
            (OrthogonalPlus | OrthogonalMinus, Simple) => 6,
            (OrthogonalPlus | OrthogonalMinus, _) => 2,
            _ => 0,
        };
        let parity_ok = match family {
            Symplectic | OrthogonalPlus | OrthogonalMinus => n % 2 == 0,
            OrthogonalOdd => n % 2 == 1,
            Linear | Unitary => true,
            _ => n == 0,
        };
        if !parity_ok || n < min {
            return domain(format!("dimension {n} is not admissible for {family} ({variant:?})"));
        }
        Ok(GroupId { family, n, variant })
    }

    pub fn simple(family: Family, n: u64) -> Result<GroupId> {
        GroupId::new(family, n, Variant::Simple)
    }

    pub fn exceptional(family: Family) -> Result<GroupId> {
        GroupId::new(family, 0, Variant::Simple)
    }

    /// Catalog entry name for this group.
    fn entry_name(&self) -> String {
        use Family::*;
        use Variant::*;
        let n = self.n;
        match (self.family, self.variant) {
            (Linear | Unitary, GL) => format!("GL{n}"),
            (Linear | Unitary, _) => format!("SL{n}"),
            (Symplectic, SL) => format!("Sp{n}"),
            (Symplectic, _) => format!("PSp{n}"),
            (OrthogonalOdd, SO) => format!("SO{n}"),
            (OrthogonalOdd, _) => format!("Omega{n}"),
            (OrthogonalPlus, Omega) => format!("Omega+{n}"),
            (OrthogonalPlus, _) => format!("SO+{n}"),
            (OrthogonalMinus, Omega) => format!("Omega-{n}"),
            (OrthogonalMinus, _) => format!("SO-{n}"),
            (f, _) => f.key().to_string(),
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Family::*;
        use Variant::*;
        let n = self.n;
        match (self.family, self.variant) {
            (Linear, Simple) => write!(f, "L{n}"),
            (Unitary, Simple) => write!(f, "U{n}"),
            (Linear, GL) => write!(f, "GL{n}"),
            (Linear, _) => write!(f, "SL{n}"),
            (Unitary, GL) => write!(f, "GU{n}"),
            (Unitary, _) => write!(f, "SU{n}"),
            (Symplectic, Simple) => write!(f, "PSp{n}"),
            (Symplectic, _) => write!(f, "Sp{n}"),
            (OrthogonalOdd, SO) => write!(f, "SO{n}"),
            (OrthogonalOdd, _) => write!(f, "Omega{n}"),
            (OrthogonalPlus, Simple) => write!(f, "POmega+{n}"),
            (OrthogonalPlus, SO) => write!(f, "SO+{n}"),
            (OrthogonalPlus, _) => write!(f, "Omega+{n}"),
            (OrthogonalMinus, Simple) => write!(f, "POmega-{n}"),
            (OrthogonalMinus, SO) => write!(f, "SO-{n}"),
            (OrthogonalMinus, _) => write!(f, "Omega-{n}"),
            (fam, _) => f.write_str(fam.key()),
        }
    }
}

const CATALOG_FILES: [(&str, &str); 6] = [
    ("linear", include_str!("../data/orders/linear.txt")),
    ("symplectic", include_str!("../data/orders/symplectic.txt")),
    ("orthogonal_odd", include_str!("../data/orders/orthogonal_odd.txt")),
    ("orthogonal_plus", include_str!("../data/orders/orthogonal_plus.txt")),
    ("orthogonal_minus", include_str!("../data/orders/orthogonal_minus.txt")),
    ("exceptional", include_str!("../data/orders/exceptional.txt")),
];

/// Parsed catalog: entry name to formula.
#[derive(Debug, Default)]
pub struct Catalog {
    entries: HashMap<String, FactoredOrder>,
}

impl Catalog {
    /// Parses `NAME := FORMULA` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Catalog> {
        let mut cat = Catalog::default();
        cat.extend(text)?;
        Ok(cat)
    }

    fn extend(&mut self, text: &str) -> Result<()> {
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let body = line.split('#').next().unwrap_or("");
            if !body.trim().is_empty() {
                let (name, formula) = body.split_once(":=").ok_or(Error::Parse {
                    offset,
                    message: "expected 'NAME := FORMULA'".into(),
                })?;
                let formula_start = offset + name.len() + 2;
                let lead = formula.len() - formula.trim_start().len();
                let parsed = parse_order_formula(formula.trim()).map_err(|e| match e {
                    Error::Parse { offset: o, message } => Error::Parse {
                        offset: formula_start + lead + o,
                        message,
                    },
                    other => other,
                })?;
                let name = name.trim().to_string();
                if self.entries.insert(name.clone(), parsed).is_some() {
                    return Err(Error::Parse { offset, message: format!("duplicate entry {name}") });
                }
            }
            offset += line.len();
        }
        Ok(())
    }

    /// The built-in catalog, parsed once.
    pub fn builtin() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| {
            let mut cat = Catalog::default();
            for (name, text) in CATALOG_FILES {
                if let Err(e) = cat.extend(text) {
                    panic!("built-in order catalog '{name}' is malformed: {e}");
                }
            }
            cat
        })
    }

    pub fn get(&self, name: &str) -> Option<&FactoredOrder> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Raw catalog text per family file, for auditing.
pub fn catalog_sources() -> &'static [(&'static str, &'static str)] {
    &CATALOG_FILES
}

fn check_q(g: &GroupId, q: &Integer) -> Result<()> {
    let small = u64::try_from(q).ok();
    let is_pp = match small {
        Some(v) => crate::arith::prime_power(v).is_some(),
        None => true,
    };
    if *q < int(2) || !is_pp {
        return Err(Error::Catalog(format!("q = {q} is not a prime power")));
    }
    if g.family == Family::TwoG2 {
        let ok = small
            .and_then(crate::arith::prime_power)
            .is_some_and(|(p, f)| p == 3 && f % 2 == 1);
        if !ok {
            return Err(Error::Catalog(format!("2G2 needs q = 3^(2k+1), got {q}")));
        }
    }
    Ok(())
}

/// Exact order of `g` over `F_q`.
pub fn order_of(g: &GroupId, q: &Integer) -> Result<Integer> {
    check_q(g, q)?;
    let name = g.entry_name();
    let entry = Catalog::builtin()
        .get(&name)
        .ok_or_else(|| Error::Catalog(format!("no catalog entry {name} for {g}")))?;
    let base = if g.family == Family::Unitary {
        entry.eval_unitary(q)?
    } else {
        entry.eval(q)?
    };
    let extra = simple_divisor(g, q)?;
    let (quot, rem) = base.div_rem(&extra);
    if !rem.is_zero() {
        return Err(Error::Consistency(format!("|{g}| at q = {q} is not divisible by {extra}")));
    }
    Ok(quot)
}

/// Divisor applied on top of the catalog formula (centre orders that depend on `q`).
fn simple_divisor(g: &GroupId, q: &Integer) -> Result<Integer> {
    use Family::*;
    if g.variant != Variant::Simple {
        return Ok(Integer::one());
    }
    let n = Integer::from(g.n);
    match g.family {
        Linear => gcd(&n, &(q - 1)),
        Unitary => gcd(&n, &(q + 1)),
        OrthogonalPlus => gcd(&int(4), &(ipow(q, g.n / 2) - 1)),
        OrthogonalMinus => gcd(&int(4), &(ipow(q, g.n / 2) + 1)),
        E7 => gcd(&int(2), &(q - 1)),
        E6 => gcd(&int(3), &(q - 1)),
        TwistedE6 => gcd(&int(3), &(q + 1)),
        _ => Ok(Integer::one()),
    }
}

/// `Π|num| / Π|den|`, which must be an integer.
pub fn index_ratio(num: &[GroupId], den: &[GroupId], q: &Integer) -> Result<Integer> {
    let mut a = Integer::one();
    for g in num {
        a *= order_of(g, q)?;
    }
    let mut b = Integer::one();
    for g in den {
        b *= order_of(g, q)?;
    }
    let (quot, rem) = a.div_rem(&b);
    if !rem.is_zero() {
        return Err(Error::Consistency(format!(
            "index ratio {num:?} / {den:?} is not integral at q = {q}"
        )));
    }
    Ok(quot)
}
