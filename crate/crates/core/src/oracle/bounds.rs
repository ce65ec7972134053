//! Descriptional-complexity bounds, evaluated as enclosing intervals and
//! compared against the measured size of an operation's result.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::{self, Interval, Precision};
use crate::error::{Error, Result};
use crate::ops::IntegerMatrix;
use crate::set::{Metrics, SemilinearSet};

/// Starting precision, in decimal digits.
pub const DEFAULT_PRECISION: u32 = 32;
/// Escalation stops once this precision has been tried.
pub const PRECISION_CAP: u32 = 512;

/// Values whose log₂ exceeds this are only tracked in log space.
const LIN_CAP: i64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperationKind {
    Union,
    Intersect,
    IntersectMany,
    Preimage,
    Decompose,
    ComplementLinearOrigin,
    ComplementLinear,
    ComplementIndependent,
    Complement,
}

impl OperationKind {
    pub const ALL: [OperationKind; 9] = [
        OperationKind::Union,
        OperationKind::Intersect,
        OperationKind::IntersectMany,
        OperationKind::Preimage,
        OperationKind::Decompose,
        OperationKind::ComplementLinearOrigin,
        OperationKind::ComplementLinear,
        OperationKind::ComplementIndependent,
        OperationKind::Complement,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OperationKind::Union => "union",
            OperationKind::Intersect => "intersect",
            OperationKind::IntersectMany => "intersect-many",
            OperationKind::Preimage => "preimage",
            OperationKind::Decompose => "decompose",
            OperationKind::ComplementLinearOrigin => "complement-linear-origin",
            OperationKind::ComplementLinear => "complement-linear",
            OperationKind::ComplementIndependent => "complement-independent",
            OperationKind::Complement => "complement",
        }
    }
}

impl fmt::Display for OperationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperationKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Certified,
    Inconclusive,
    Violated,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Certified => "CERTIFIED",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Violated => "VIOLATED",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Size data of one operand or result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperandInfo {
    pub dim: usize,
    pub raw: Metrics,
    /// Metrics after splitting every component into singleton-constant ones.
    pub expanded: Metrics,
    /// Largest constant set of any component.
    pub max_const_card: usize,
}

impl OperandInfo {
    pub fn of(s: &SemilinearSet) -> Self {
        OperandInfo {
            dim: s.dim(),
            raw: s.metrics(),
            expanded: s.expand_constants().metrics(),
            max_const_card: s
                .components()
                .iter()
                .map(|c| c.constants().len())
                .max()
                .unwrap_or(0),
        }
    }
}

/// One inequality `measured ≤ formula`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub quantity: &'static str,
    pub formula: &'static str,
    pub measured: BigUint,
    /// Enclosure of the formula; in log₂ units when `log_scale` is set.
    pub lower: String,
    pub upper: String,
    pub log_scale: bool,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub kind: OperationKind,
    pub dim: usize,
    pub operands: Vec<Metrics>,
    /// Named formula parameters (m, n, ℓ, q, a_k, b, ...) rendered as intervals.
    pub parameters: Vec<(String, String)>,
    /// Which cardinality `q` was taken from, if the formula uses one.
    pub q_source: Option<&'static str>,
    pub result: Metrics,
    pub checks: Vec<BoundCheck>,
    pub status: Status,
    /// Decimal digits used for the final evaluation.
    pub precision: u32,
}

// ---------------------------------------------------------------------------
// Formula trees

#[derive(Debug, Clone)]
enum Expr {
    Num(BigInt),
    E,
    Sqrt(Box<Expr>),
    Log2(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

fn num(v: impl Into<BigInt>) -> Expr {
    Expr::Num(v.into())
}

fn nat(v: &BigUint) -> Expr {
    Expr::Num(BigInt::from_biguint(Sign::Plus, v.clone()))
}

impl Expr {
    fn pow(self, e: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(e))
    }
    fn sqrt(self) -> Expr {
        Expr::Sqrt(Box::new(self))
    }
    fn log2(self) -> Expr {
        Expr::Log2(Box::new(self))
    }
    fn max(self, o: Expr) -> Expr {
        Expr::Max(Box::new(self), Box::new(o))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $v:ident) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $f(self, o: Expr) -> Expr {
                Expr::$v(Box::new(self), Box::new(o))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

/// `base^{e/2}` with an exact square root when `e` is even.
fn half_power(base: u64, e: u64) -> Expr {
    let whole = num(base).pow(num(e / 2));
    if e.is_multiple_of(2) {
        whole
    } else {
        whole * num(base).sqrt()
    }
}

/// Value enclosure in linear and/or log₂ form. `lin` is absent for values
/// too large to hold; `lg` is filled on demand and only for positive values.
#[derive(Debug, Clone)]
struct Value {
    lin: Option<Interval>,
    lg: Option<Interval>,
}

impl Value {
    fn unknown() -> Self {
        Value {
            lin: None,
            lg: None,
        }
    }

    fn from_lin(iv: Interval) -> Self {
        Value {
            lin: Some(iv),
            lg: None,
        }
    }

    fn from_lg(lg: Interval, p: Precision) -> Self {
        let lin = (lg.hi <= cap()).then(|| lg.exp2(p));
        Value { lin, lg: Some(lg) }
    }

    fn is_exact_zero(&self) -> bool {
        self.lin.as_ref().is_some_and(Interval::is_zero)
    }

    fn lg(&mut self, p: Precision) -> Option<&Interval> {
        if self.lg.is_none() {
            if let Some(l) = self.lin.as_ref().filter(|l| l.is_positive()) {
                self.lg = Some(l.log2(p));
            }
        }
        self.lg.as_ref()
    }

    /// Cheap upper estimate of log₂ of the upper endpoint.
    fn bits_hint(&self) -> Option<u64> {
        let l = self.lin.as_ref()?;
        if !l.hi.is_positive() {
            return Some(0);
        }
        let c = l.hi.ceil().to_integer();
        Some(c.magnitude().bits())
    }
}

fn cap() -> BigRational {
    BigRational::from_integer(LIN_CAP.into())
}

fn eval(e: &Expr, p: Precision) -> Value {
    match e {
        Expr::Num(v) => Value::from_lin(Interval::from_int(v.clone())),
        Expr::E => Value::from_lin(interval::e(p)),
        Expr::Sqrt(x) => {
            let mut v = eval(x, p);
            if let Some(l) = v.lin.as_ref().filter(|l| !l.lo.is_negative()) {
                return Value::from_lin(l.sqrt(p));
            }
            match v.lg(p) {
                Some(g) => Value::from_lg(
                    g.mul(&Interval::point(BigRational::new(1.into(), 2.into())), p),
                    p,
                ),
                None => Value::unknown(),
            }
        }
        Expr::Log2(x) => match eval(x, p).lg(p) {
            Some(g) => Value::from_lin(g.clone()),
            None => Value::unknown(),
        },
        Expr::Add(a, b) => {
            let (mut a, mut b) = (eval(a, p), eval(b, p));
            if let (Some(x), Some(y)) = (&a.lin, &b.lin) {
                return Value::from_lin(x.add(y, p));
            }
            if a.is_exact_zero() {
                return b;
            }
            if b.is_exact_zero() {
                return a;
            }
            match (a.lg(p).cloned(), b.lg(p)) {
                (Some(x), Some(y)) => {
                    let hi = (&x.hi).max(&y.hi).clone() + BigRational::one();
                    let lo = (&x.lo).max(&y.lo).clone();
                    Value::from_lg(Interval::new(lo, hi), p)
                }
                _ => Value::unknown(),
            }
        }
        Expr::Sub(a, b) => {
            let (a, b) = (eval(a, p), eval(b, p));
            match (&a.lin, &b.lin) {
                (Some(x), Some(y)) => Value::from_lin(x.sub(y, p)),
                _ => Value::unknown(),
            }
        }
        Expr::Mul(a, b) => {
            let (mut a, mut b) = (eval(a, p), eval(b, p));
            if a.is_exact_zero() || b.is_exact_zero() {
                return Value::from_lin(Interval::from_int(0));
            }
            if let (Some(x), Some(y)) = (a.bits_hint(), b.bits_hint()) {
                if (x + y) as i64 <= LIN_CAP {
                    let (x, y) = (
                        a.lin.as_ref().expect("hinted"),
                        b.lin.as_ref().expect("hinted"),
                    );
                    return Value::from_lin(x.mul(y, p));
                }
            }
            match (a.lg(p).cloned(), b.lg(p)) {
                (Some(x), Some(y)) => Value::from_lg(x.add(y, p), p),
                _ => Value::unknown(),
            }
        }
        Expr::Div(a, b) => {
            let (mut a, mut b) = (eval(a, p), eval(b, p));
            if let (Some(x), Some(y)) = (&a.lin, &b.lin) {
                if y.is_positive() {
                    return Value::from_lin(x.div(y, p));
                }
            }
            match (a.lg(p).cloned(), b.lg(p)) {
                (Some(x), Some(y)) => Value::from_lg(x.sub(y, p), p),
                _ => Value::unknown(),
            }
        }
        Expr::Pow(base, ex) => {
            let (mut b, x) = (eval(base, p), eval(ex, p));
            let Some(xl) = x.lin else {
                return Value::unknown();
            };
            if let Some(n) = xl.is_exact_integer() {
                if n.is_zero() {
                    return Value::from_lin(Interval::from_int(1));
                }
                if b.is_exact_zero() && n.is_positive() {
                    return b;
                }
                if let (Some(bits), Some(nu)) = (b.bits_hint(), n.to_u64()) {
                    let positive = b.lin.as_ref().is_some_and(|l| !l.lo.is_negative());
                    if positive && bits.checked_mul(nu).is_some_and(|t| t as i64 <= LIN_CAP) {
                        return Value::from_lin(b.lin.as_ref().expect("hinted").pow(nu, p));
                    }
                }
            } else if b.is_exact_zero() && xl.is_positive() {
                return b;
            }
            match b.lg(p) {
                Some(g) => Value::from_lg(xl.mul(g, p), p),
                None => Value::unknown(),
            }
        }
        Expr::Max(a, b) => {
            let (mut a, mut b) = (eval(a, p), eval(b, p));
            if let (Some(x), Some(y)) = (&a.lin, &b.lin) {
                return Value::from_lin(x.max(y));
            }
            match (a.lg(p).cloned(), b.lg(p).cloned()) {
                (Some(x), Some(y)) => Value::from_lg(x.max(&y), p),
                (None, Some(_)) if a.lin.as_ref().is_some_and(|l| !l.hi.is_positive()) => b,
                (Some(_), None) if b.lin.as_ref().is_some_and(|l| !l.hi.is_positive()) => a,
                _ => Value::unknown(),
            }
        }
    }
}

fn render(v: &Value) -> (String, String, bool) {
    match (&v.lin, &v.lg) {
        (Some(l), _) => (
            Interval::render(&l.lo, false),
            Interval::render(&l.hi, true),
            false,
        ),
        (None, Some(g)) => (
            Interval::render(&g.lo, false),
            Interval::render(&g.hi, true),
            true,
        ),
        _ => ("-inf".into(), "inf".into(), false),
    }
}

fn render_param(v: &Value) -> String {
    let (lo, hi, log) = render(v);
    let body = if lo == hi {
        lo
    } else {
        format!("[{lo}, {hi}]")
    };
    if log {
        format!("2^{body}")
    } else {
        body
    }
}

fn compare(measured: &BigUint, v: &Value, p: Precision) -> Status {
    let x = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, measured.clone()));
    if let Some(l) = &v.lin {
        return match interval::locate(&x, l) {
            std::cmp::Ordering::Less => Status::Certified,
            std::cmp::Ordering::Greater => Status::Violated,
            std::cmp::Ordering::Equal => Status::Inconclusive,
        };
    }
    let Some(g) = &v.lg else {
        return Status::Inconclusive;
    };
    if measured.is_zero() {
        return Status::Certified;
    }
    let lx = interval::log2_rational(&x, p);
    if lx.hi <= g.lo {
        Status::Certified
    } else if lx.lo > g.hi {
        Status::Violated
    } else {
        Status::Inconclusive
    }
}

// ---------------------------------------------------------------------------
// Formulas per operation

struct Plan {
    params: Vec<(&'static str, Expr)>,
    q_source: Option<&'static str>,
    checks: Vec<(&'static str, &'static str, BigUint, Expr)>,
}

fn ceil_log2(x: usize) -> u64 {
    if x <= 1 {
        0
    } else {
        u64::from(usize::BITS - (x - 1).leading_zeros())
    }
}

fn join_all<'a>(ms: impl Iterator<Item = &'a Metrics>) -> Metrics {
    ms.fold(Metrics::default(), |acc, m| acc.join(m))
}

fn expect_operands(kind: OperationKind, ops: &[OperandInfo], n: usize) -> Result<()> {
    if ops.len() != n {
        return Err(Error::Schema(format!(
            "{kind} expects {n} operand(s), got {}",
            ops.len()
        )));
    }
    Ok(())
}

fn plan(
    kind: OperationKind,
    ops: &[OperandInfo],
    out: &OperandInfo,
    matrix: Option<&IntegerMatrix>,
) -> Result<Plan> {
    let r = &out.raw;
    let size = BigUint::from(r.index_size);
    let pn = r.max_period_norm.clone();
    let cn = r.max_const_norm.clone();
    let k = out.dim as u64;
    let ku = || num(k);
    let kk = || half_power(k, k);

    let plan = match kind {
        OperationKind::Union => {
            expect_operands(kind, ops, 2)?;
            let j = join_all(ops.iter().map(|o| &o.raw));
            Plan {
                params: vec![
                    ("n", nat(&j.max_period_norm)),
                    ("l", nat(&j.max_const_norm)),
                ],
                q_source: None,
                checks: vec![
                    (
                        "index_size",
                        "|I1|+|I2|",
                        size,
                        num(ops[0].raw.index_size) + num(ops[1].raw.index_size),
                    ),
                    ("max_period_norm", "n", pn, nat(&j.max_period_norm)),
                    ("max_const_norm", "l", cn, nat(&j.max_const_norm)),
                ],
            }
        }
        OperationKind::Intersect => {
            expect_operands(kind, ops, 2)?;
            let j = join_all(ops.iter().map(|o| &o.expanded));
            let (m, n, l) = (j.max_period_card, &j.max_period_norm, &j.max_const_norm);
            let per = || num(3) * num(m).pow(num(2)) * kk() * nat(n).pow(num(k + 1));
            Plan {
                params: vec![("m", num(m)), ("n", nat(n)), ("l", nat(l))],
                q_source: None,
                checks: vec![
                    (
                        "index_size",
                        "|I1||I2|",
                        size,
                        num(ops[0].expanded.index_size) * num(ops[1].expanded.index_size),
                    ),
                    ("max_period_norm", "3m^2 k^(k/2) n^(k+1)", pn, per()),
                    (
                        "max_const_norm",
                        "(3m^2 k^(k/2) n^(k+1) + 1) l",
                        cn,
                        (per() + num(1)) * nat(l),
                    ),
                ],
            }
        }
        OperationKind::IntersectMany => {
            if ops.is_empty() {
                return Err(Error::NoOperands);
            }
            let j = join_all(ops.iter().map(|o| &o.raw));
            let (n, l) = (&j.max_period_norm, &j.max_const_norm);
            let pmax = j.index_size;
            let q = ceil_log2(ops.len());
            let ak = || num(4).pow(num(k + 1)) * kk();
            let akn = || ak() * nat(n);
            Plan {
                params: vec![
                    ("p", num(pmax)),
                    ("n", nat(n)),
                    ("l", nat(l)),
                    ("q", num(q)),
                    ("a_k", ak()),
                ],
                q_source: Some("operand count |X|"),
                checks: vec![
                    (
                        "index_size",
                        "p^(2^q) (l+1)^(k 2^(q+1)) (a_k n+1)^(4(3k+2)^(q+1))",
                        size,
                        num(pmax).pow(num(2).pow(num(q)))
                            * (nat(l) + num(1)).pow(ku() * num(2).pow(num(q + 1)))
                            * (akn() + num(1))
                                .pow(num(4) * (num(3) * ku() + num(2)).pow(num(q + 1))),
                    ),
                    (
                        "max_period_norm",
                        "(a_k n)^((3k+1)^q)",
                        pn,
                        akn().pow((num(3) * ku() + num(1)).pow(num(q))),
                    ),
                    (
                        "max_const_norm",
                        "(a_k n+1)^((3k+2)^q) l",
                        cn,
                        (akn() + num(1)).pow((num(3) * ku() + num(2)).pow(num(q))) * nat(l),
                    ),
                ],
            }
        }
        OperationKind::Preimage => {
            expect_operands(kind, ops, 1)?;
            let h = matrix.ok_or_else(|| Error::Schema("preimage needs a matrix".into()))?;
            let s = &ops[0].expanded;
            let (m, n, l) = (s.max_period_card, &s.max_period_norm, &s.max_const_norm);
            let k1 = h.col_count() as u64;
            let k2 = ops[0].dim as u64;
            let mu = m as u64;
            let f = || {
                num(k1 + mu + 1)
                    * half_power(k2, (k1 + mu).min(k2))
                    * (nat(&h.norm()) + num(1)).pow(num(k1.min(k2)))
                    * (nat(n) + num(1)).pow(num(mu.min(k2)))
            };
            Plan {
                params: vec![
                    ("k1", num(k1)),
                    ("k2", num(k2)),
                    ("m", num(m)),
                    ("n", nat(n)),
                    ("l", nat(l)),
                    ("H", nat(&h.norm())),
                ],
                q_source: None,
                checks: vec![
                    ("index_size", "|I|", size, num(s.index_size)),
                    (
                        "max_period_norm",
                        "(k1+m+1) k2^(min(k1+m,k2)/2) (|H|+1)^min(k1,k2) (n+1)^min(m,k2)",
                        pn,
                        f(),
                    ),
                    (
                        "max_const_norm",
                        "(k1+m+1) k2^(min(k1+m,k2)/2) (|H|+1)^min(k1,k2) (n+1)^min(m,k2) l",
                        cn,
                        f() * nat(l),
                    ),
                ],
            }
        }
        OperationKind::Decompose => {
            expect_operands(kind, ops, 1)?;
            let s = &ops[0].expanded;
            let (m, n, l) = (
                s.max_period_card as u64,
                &s.max_period_norm,
                &s.max_const_norm,
            );
            let count = if m == 0 {
                num(1)
            } else {
                let fact = |x: u64| (1..=x).fold(BigInt::one(), |a, i| a * i);
                Expr::Num(fact(m + 1) * fact(m)) / num(2).pow(num(m))
                    * (kk() * nat(n).pow(num(k)) + num(1)).pow(num(m - 1))
            };
            Plan {
                params: vec![("m", num(m)), ("n", nat(n)), ("l", nat(l))],
                q_source: None,
                checks: vec![
                    (
                        "index_size",
                        "(m+1)! m! / 2^m (k^(k/2) n^k + 1)^(m-1)",
                        size,
                        count,
                    ),
                    ("max_period_norm", "n", pn, nat(n)),
                    (
                        "max_const_norm",
                        "l + (m+1)(m+2)/2 k^(k/2) n^(k+1)",
                        cn,
                        nat(l) + num((m + 1) * (m + 2) / 2) * kk() * nat(n).pow(num(k + 1)),
                    ),
                ],
            }
        }
        OperationKind::ComplementLinearOrigin => {
            expect_operands(kind, ops, 1)?;
            let s = &ops[0].expanded;
            let n1 = (&s.max_period_norm).max(&BigUint::one()).clone();
            let f = || (num(2) * ku() + num(1)) * kk() * nat(&n1).pow(ku());
            Plan {
                params: vec![("n", nat(&s.max_period_norm))],
                q_source: None,
                checks: vec![
                    (
                        "index_size",
                        "2^k + k - 1",
                        size,
                        num(2).pow(ku()) + ku() - num(1),
                    ),
                    ("max_period_norm", "(2k+1) k^(k/2) max(n,1)^k", pn, f()),
                    ("max_const_norm", "(2k+1) k^(k/2) max(n,1)^k", cn, f()),
                ],
            }
        }
        OperationKind::ComplementLinear => {
            expect_operands(kind, ops, 1)?;
            let s = &ops[0].expanded;
            let (n, l) = (&s.max_period_norm, &s.max_const_norm);
            let f = || (num(2) * ku() + num(1)) * kk() * (nat(n) + num(1)).pow(ku());
            Plan {
                params: vec![("n", nat(n)), ("l", nat(l))],
                q_source: None,
                checks: vec![
                    (
                        "index_size",
                        "2^k + 2k - 1",
                        size,
                        num(2).pow(ku()) + num(2) * ku() - num(1),
                    ),
                    ("max_period_norm", "(2k+1) k^(k/2) (n+1)^k", pn, f()),
                    (
                        "max_const_norm",
                        "(2k+1) k^(k/2) (n+1)^k + l",
                        cn,
                        f() + nat(l),
                    ),
                    (
                        "max_const_card",
                        "max(4^k k^(k^2/2+k) (n+1)^(k^2), l)",
                        BigUint::from(out.max_const_card),
                        (num(4).pow(ku())
                            * half_power(k, k * k + 2 * k)
                            * (nat(n) + num(1)).pow(num(k * k)))
                        .max(nat(l)),
                    ),
                ],
            }
        }
        OperationKind::ComplementIndependent => {
            expect_operands(kind, ops, 1)?;
            let s = &ops[0].expanded;
            let (n, l) = (&s.max_period_norm, &s.max_const_norm);
            let q = ceil_log2(s.index_size);
            let base = || num(4) * ku() * (nat(n) + num(1));
            Plan {
                params: vec![("n", nat(n)), ("l", nat(l)), ("q", num(q))],
                q_source: Some("component count |I|"),
                checks: vec![
                    (
                        "index_size",
                        "(4k(n+1))^(5(k+2)(3k+2)^(q+1)) (l+1)^(k 2^(q+1))",
                        size,
                        base().pow(
                            num(5) * (ku() + num(2)) * (num(3) * ku() + num(2)).pow(num(q + 1)),
                        ) * (nat(l) + num(1)).pow(ku() * num(2).pow(num(q + 1))),
                    ),
                    (
                        "max_period_norm",
                        "(4k(n+1))^((k+2)(3k+1)^q)",
                        pn,
                        base().pow((ku() + num(2)) * (num(3) * ku() + num(1)).pow(num(q))),
                    ),
                    (
                        "max_const_norm",
                        "(4k(n+1))^((k+2)(3k+2)^q + k) (l+1)",
                        cn,
                        base().pow((ku() + num(2)) * (num(3) * ku() + num(2)).pow(num(q)) + ku())
                            * (nat(l) + num(1)),
                    ),
                ],
            }
        }
        OperationKind::Complement => {
            expect_operands(kind, ops, 1)?;
            let s = &ops[0].expanded;
            let (m, n, l) = (
                s.max_period_card as u64,
                &s.max_period_norm,
                &s.max_const_norm,
            );
            let i = s.index_size;
            let lg3k2 = || (num(3) * ku() + num(2)).log2();
            let root = || ku().sqrt() * (nat(n) + num(2));
            let b = || {
                root().pow(ku() * lg3k2() * num(3 * m + 1) + num(3))
                    * (num(3) * ku() + num(2))
                        .pow(num(7) - (num(2) * Expr::E.log2() + num(1)) * num(m))
                    * num(i).pow(lg3k2())
            };
            let two_b = || num(2).pow(b());
            let card_exp = root().pow(num(k * (3 * m + 1) + 8))
                / (num(2) * Expr::E.pow(num(2))).pow(num(m))
                * num(i);
            Plan {
                params: vec![
                    ("m", num(m)),
                    ("n", nat(n)),
                    ("l", nat(l)),
                    ("|I|", num(i)),
                    ("b", b()),
                ],
                q_source: None,
                checks: vec![
                    (
                        "index_size",
                        "2^b (l+2)^((sqrt(k)(n+2))^(k(3m+1)+8) (2e^2)^(-m) |I|)",
                        size,
                        two_b() * (nat(l) + num(2)).pow(card_exp),
                    ),
                    ("max_period_norm", "2^b", pn, two_b()),
                    (
                        "max_const_norm",
                        "2^b (l+1)",
                        cn,
                        two_b() * (nat(l) + num(1)),
                    ),
                ],
            }
        }
    };
    Ok(plan)
}

fn evaluate(
    kind: OperationKind,
    ops: &[OperandInfo],
    out: &OperandInfo,
    plan: &Plan,
    digits: u32,
) -> BoundReport {
    let p = Precision::from_digits(digits);
    let mut parameters: Vec<(String, String)> = vec![
        ("k".into(), out.dim.to_string()),
        (
            "nu".into(),
            join_all(ops.iter().map(|o| &o.raw)).nu.to_string(),
        ),
    ];
    parameters.extend(
        plan.params
            .iter()
            .map(|(name, e)| (name.to_string(), render_param(&eval(e, p)))),
    );
    let checks: Vec<BoundCheck> = plan
        .checks
        .iter()
        .map(|(quantity, formula, measured, e)| {
            let v = eval(e, p);
            let (lower, upper, log_scale) = render(&v);
            BoundCheck {
                quantity,
                formula,
                measured: measured.clone(),
                lower,
                upper,
                log_scale,
                status: compare(measured, &v, p),
            }
        })
        .collect();
    let status = checks
        .iter()
        .map(|c| c.status)
        .max()
        .unwrap_or(Status::Certified);
    BoundReport {
        kind,
        dim: out.dim,
        operands: ops.iter().map(|o| o.raw.clone()).collect(),
        parameters,
        q_source: plan.q_source,
        result: out.raw.clone(),
        checks,
        status,
        precision: digits,
    }
}

/// Evaluates the size bounds of `kind` for the given operands and result,
/// doubling the precision while the outcome is undecided.
pub fn bound_report(
    kind: OperationKind,
    operands: &[OperandInfo],
    result: &OperandInfo,
    matrix: Option<&IntegerMatrix>,
    precision: u32,
) -> Result<BoundReport> {
    let plan = plan(kind, operands, result, matrix)?;
    let mut digits = precision.clamp(1, PRECISION_CAP);
    loop {
        let report = evaluate(kind, operands, result, &plan, digits);
        if report.status != Status::Inconclusive || digits >= PRECISION_CAP {
            return Ok(report);
        }
        digits = (digits * 2).min(PRECISION_CAP);
    }
}

/// [`bound_report`] on concrete sets.
pub fn certify_operation(
    kind: OperationKind,
    inputs: &[SemilinearSet],
    output: &SemilinearSet,
    matrix: Option<&IntegerMatrix>,
    precision: u32,
) -> Result<BoundReport> {
    let ops: Vec<OperandInfo> = inputs.iter().map(OperandInfo::of).collect();
    bound_report(kind, &ops, &OperandInfo::of(output), matrix, precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::SemilinearSet;

    fn value(e: &Expr) -> Value {
        eval(e, Precision::from_digits(DEFAULT_PRECISION))
    }

    #[test]
    fn kind_names_round_trip() {
        for k in OperationKind::ALL {
            assert_eq!(k.name().parse::<OperationKind>().unwrap(), k);
        }
        assert!(matches!(
            "frobnicate".parse::<OperationKind>(),
            Err(Error::UnknownKind(_))
        ));
    }

    #[test]
    fn a_k_for_one_is_sixteen() {
        let v = value(&(num(4).pow(num(2)) * half_power(1, 1)));
        assert_eq!(v.lin.unwrap(), Interval::from_int(16));
    }

    #[test]
    fn intersection_period_bound_is_27() {
        let op = |n: u64| OperandInfo {
            dim: 1,
            raw: Metrics {
                index_size: 1,
                max_period_card: 1,
                max_period_norm: n.into(),
                max_const_norm: 0u8.into(),
                nu: n.into(),
            },
            expanded: Metrics {
                index_size: 1,
                max_period_card: 1,
                max_period_norm: n.into(),
                max_const_norm: 0u8.into(),
                nu: n.into(),
            },
            max_const_card: 1,
        };
        let out = OperandInfo::of(&SemilinearSet::linear(&[0], &[&[6]]).unwrap());
        let r = bound_report(
            OperationKind::Intersect,
            &[op(2), op(3)],
            &out,
            None,
            DEFAULT_PRECISION,
        )
        .unwrap();
        let c = &r.checks[1];
        assert_eq!(c.quantity, "max_period_norm");
        assert_eq!((c.lower.as_str(), c.upper.as_str()), ("27", "27"));
        assert_eq!(c.status, Status::Certified);
        assert_eq!(r.status, Status::Certified);
    }

    #[test]
    fn union_bound_is_sum() {
        let a = SemilinearSet::linear(&[0], &[&[2]]).unwrap();
        let b = SemilinearSet::linear(&[1], &[&[2]]).unwrap();
        let u = crate::ops::union(&a, &b).unwrap();
        let r =
            certify_operation(OperationKind::Union, &[a, b], &u, None, DEFAULT_PRECISION).unwrap();
        assert_eq!(r.checks[0].upper, "2");
        assert_eq!(r.checks[0].measured, 2u8.into());
        assert_eq!(r.status, Status::Certified);
    }

    #[test]
    fn oversized_result_is_violated() {
        let a = SemilinearSet::linear(&[0], &[&[2]]).unwrap();
        let big = SemilinearSet::linear(&[0], &[&[7]]).unwrap();
        let r = certify_operation(
            OperationKind::Union,
            &[a.clone(), a],
            &big,
            None,
            DEFAULT_PRECISION,
        )
        .unwrap();
        assert_eq!(r.status, Status::Violated);
    }

    #[test]
    fn log_space_comparison() {
        let huge = num(2).pow(num(3).pow(num(20)));
        let v = value(&huge);
        assert!(v.lin.is_none());
        let p = Precision::from_digits(DEFAULT_PRECISION);
        assert_eq!(
            compare(&(BigUint::one() << 1000u32), &v, p),
            Status::Certified
        );
        let tiny = value(&num(2).pow(num(10)));
        assert_eq!(compare(&BigUint::from(1025u32), &tiny, p), Status::Violated);
    }

    #[test]
    fn complement_formula_evaluates() {
        let s = SemilinearSet::linear(&[1], &[&[2]]).unwrap();
        let odd_free = SemilinearSet::linear(&[0], &[&[2]]).unwrap();
        let r = certify_operation(
            OperationKind::Complement,
            &[s],
            &odd_free,
            None,
            DEFAULT_PRECISION,
        )
        .unwrap();
        assert_eq!(r.status, Status::Certified, "{r:?}");
    }

    #[test]
    fn precision_monotone() {
        let s = SemilinearSet::linear(&[3, 1], &[&[2, 1], &[1, 3]]).unwrap();
        let out = SemilinearSet::linear(&[0, 0], &[&[1, 0], &[0, 1]]).unwrap();
        let mut prev = None;
        for d in [8, 16, 32, 64, 128] {
            let r = certify_operation(
                OperationKind::Complement,
                std::slice::from_ref(&s),
                &out,
                None,
                d,
            )
            .unwrap();
            if let Some(p) = prev {
                assert!(!(p == Status::Certified && r.status == Status::Violated));
                assert!(!(p == Status::Violated && r.status == Status::Certified));
            }
            prev = Some(r.status);
        }
    }
}
