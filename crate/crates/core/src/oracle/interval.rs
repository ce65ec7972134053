//! Rational intervals with outward rounding.
//!
//! Endpoints are exact rationals; after every operation they are rounded
//! outward to a fixed number of significant bits so that sizes stay bounded.
//! Transcendental atoms (`ln 2`, `log₂`, `exp`, `e`, square roots) come from
//! truncated series with explicit remainder bounds, so every interval is
//! guaranteed to contain the true real value.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

/// Working precision in significant bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    bits: u64,
}

impl Precision {
    /// Precision equivalent to `digits` decimal digits, plus guard bits.
    pub fn from_digits(digits: u32) -> Self {
        let bits = (u64::from(digits) * 3322).div_ceil(1000) + 16;
        Precision { bits }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        int(BigInt::one() << (e as u64))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << ((-e) as u64))
    }
}

/// floor(log2 |q|) for q ≠ 0.
fn ilog2(q: &BigRational) -> i64 {
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^e ≤ |q| < 2^{e+1} after adjustment.
    let probe = |e: i64| -> bool {
        // |q| >= 2^e
        if e >= 0 {
            n >= &(d << (e as u64))
        } else {
            (n << ((-e) as u64)) >= *d
        }
    };
    if !probe(e) {
        e -= 1;
    }
    e
}

fn round(q: &BigRational, p: Precision, up: bool) -> BigRational {
    if q.is_zero() {
        return q.clone();
    }
    if q.is_integer() && q.numer().magnitude().bits() <= p.bits {
        return q.clone();
    }
    let shift = p.bits as i64 - ilog2(q);
    let scaled = q * pow2(shift);
    let r = if up { scaled.ceil() } else { scaled.floor() };
    r * pow2(-shift)
}

pub fn round_down(q: &BigRational, p: Precision) -> BigRational {
    round(q, p, false)
}

pub fn round_up(q: &BigRational, p: Precision) -> BigRational {
    round(q, p, true)
}

impl Interval {
    pub fn point(q: BigRational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::point(int(v))
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        Self::from_int(BigInt::from_biguint(Sign::Plus, v.clone()))
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    fn rounded(lo: BigRational, hi: BigRational, p: Precision) -> Self {
        Interval {
            lo: round_down(&lo, p),
            hi: round_up(&hi, p),
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_exact_integer(&self) -> Option<BigInt> {
        (self.is_point() && self.lo.is_integer()).then(|| self.lo.to_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn add(&self, o: &Interval, p: Precision) -> Interval {
        Self::rounded(&self.lo + &o.lo, &self.hi + &o.hi, p)
    }

    pub fn sub(&self, o: &Interval, p: Precision) -> Interval {
        Self::rounded(&self.lo - &o.hi, &self.hi - &o.lo, p)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, o: &Interval, p: Precision) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().expect("four").clone();
        let hi = c.iter().max().expect("four").clone();
        Self::rounded(lo, hi, p)
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Interval, p: Precision) -> Interval {
        assert!(
            o.lo.is_positive() || o.hi.is_negative(),
            "divisor interval contains zero"
        );
        let inv = Interval {
            lo: o.hi.recip(),
            hi: o.lo.recip(),
        };
        self.mul(&inv, p)
    }

    /// Integer power of a non-negative interval.
    pub fn pow(&self, mut e: u64, p: Precision) -> Interval {
        assert!(!self.lo.is_negative(), "pow expects a non-negative base");
        let mut base = self.clone();
        let mut acc = Interval::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, p);
            }
        }
        acc
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: (&self.lo).max(&o.lo).clone(),
            hi: (&self.hi).max(&o.hi).clone(),
        }
    }

    pub fn sqrt(&self, p: Precision) -> Interval {
        Interval {
            lo: sqrt_bound(&self.lo, p, false),
            hi: sqrt_bound(&self.hi, p, true),
        }
    }

    /// log₂ of a positive interval.
    pub fn log2(&self, p: Precision) -> Interval {
        assert!(self.lo.is_positive(), "log2 of a non-positive interval");
        Interval {
            lo: log2_rational(&self.lo, p).lo,
            hi: log2_rational(&self.hi, p).hi,
        }
    }

    pub fn exp2(&self, p: Precision) -> Interval {
        Interval {
            lo: exp2_rational(&self.lo, p).lo,
            hi: exp2_rational(&self.hi, p).hi,
        }
    }

    /// Shortest-ish decimal rendering of an endpoint, rounded outward.
    pub fn render(q: &BigRational, up: bool) -> String {
        if q.is_integer() {
            return q.to_integer().to_string();
        }
        let scale = BigInt::from(10u32).pow(6);
        let scaled = q * int(scale.clone());
        let r = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
        let (whole, frac) = r.div_mod_floor(&scale);
        format!("{whole}.{:06}", frac)
    }
}

fn sqrt_bound(q: &BigRational, p: Precision, up: bool) -> BigRational {
    assert!(!q.is_negative(), "sqrt of a negative value");
    if q.is_zero() {
        return q.clone();
    }
    let w = p.bits + 2;
    let scaled = q * pow2(2 * w as i64);
    let n = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let n = n.to_biguint().expect("non-negative");
    let mut s = n.sqrt();
    if up && &s * &s < n {
        s += 1u8;
    }
    BigRational::new(BigInt::from_biguint(Sign::Plus, s), BigInt::one() << w)
}

/// `q·2^w` rounded to an integer in the given direction.
fn fixed(q: &BigRational, w: u64, up: bool) -> BigInt {
    let s = q * int(BigInt::one() << w);
    if up { s.ceil() } else { s.floor() }.to_integer()
}

/// `(a·b) >> w` rounded in the given direction, for non-negative operands.
fn fmul(a: &BigInt, b: &BigInt, w: u64, up: bool) -> BigInt {
    let prod = a * b;
    let mut r = &prod >> w;
    if up && (&r << w) != prod {
        r += 1;
    }
    r
}

fn fdiv(a: &BigInt, d: u64, up: bool) -> BigInt {
    if up {
        a.div_ceil(&BigInt::from(d))
    } else {
        a.div_floor(&BigInt::from(d))
    }
}

fn from_fixed(lo: BigInt, hi: BigInt, w: u64, p: Precision) -> Interval {
    let scale = BigInt::one() << w;
    Interval::new(
        round_down(&BigRational::new(lo, scale.clone()), p),
        round_up(&BigRational::new(hi, scale), p),
    )
}

/// One directed bound of Σ_{i≥0} z^{2i+1}/(2i+1), scaled by 2^w.
fn atanh_fixed(z: &BigRational, w: u64, stop: &BigInt, up: bool) -> BigInt {
    let zf = fixed(z, w, up);
    let z2 = fmul(&zf, &zf, w, up);
    let mut pw = zf;
    let mut sum = BigInt::zero();
    let mut k: u64 = 1;
    while &pw >= stop {
        sum += fdiv(&pw, k, up);
        pw = fmul(&pw, &z2, w, up);
        k += 2;
    }
    if up {
        // Tail ≤ z^k/(1 − z²) ≤ (4/3)·z^k for z ≤ 1/2; pw itself is the next power.
        sum += fdiv(&(pw * 4), 3, true) + 1;
    }
    sum
}

/// Σ_{i≥0} z^{2i+1}/(2i+1) for 0 ≤ z ≤ 1/2, as an enclosing interval.
fn atanh_series(z: &BigRational, p: Precision) -> Interval {
    if z.is_zero() {
        return Interval::from_int(0);
    }
    let w = p.bits + 32;
    let stop = BigInt::one() << 16;
    let lo = atanh_fixed(z, w, &stop, false);
    let hi = atanh_fixed(z, w, &stop, true);
    from_fixed(lo, hi, w, p)
}

thread_local! {
    static CONSTANTS: RefCell<HashMap<(u8, u64), Interval>> = RefCell::new(HashMap::new());
}

fn cached(tag: u8, p: Precision, f: impl FnOnce() -> Interval) -> Interval {
    if let Some(v) = CONSTANTS.with(|c| c.borrow().get(&(tag, p.bits)).cloned()) {
        return v;
    }
    let v = f();
    CONSTANTS.with(|c| c.borrow_mut().insert((tag, p.bits), v.clone()));
    v
}

/// ln 2 = 2·atanh(1/3).
pub fn ln2(p: Precision) -> Interval {
    cached(0, p, || {
        let s = atanh_series(&BigRational::new(1.into(), 3.into()), p);
        s.mul(&Interval::from_int(2), p)
    })
}

/// log₂ q for rational q > 0.
pub fn log2_rational(q: &BigRational, p: Precision) -> Interval {
    assert!(q.is_positive(), "log2 of a non-positive value");
    let e = ilog2(q);
    let f = q * pow2(-e);
    let whole = Interval::from_int(e);
    if f.is_one() {
        return whole;
    }
    // ln f = 2·atanh((f−1)/(f+1)), z ≤ 1/3 for f ∈ [1, 2).
    let z = (&f - BigRational::one()) / (&f + BigRational::one());
    let ln_f = atanh_series(&z, p).mul(&Interval::from_int(2), p);
    whole.add(&ln_f.div(&ln2(p), p), p)
}

/// One directed bound of Σ u^i/i!, scaled by 2^w.
fn exp_fixed(u: &BigRational, w: u64, stop: &BigInt, up: bool) -> BigInt {
    let uf = fixed(u, w, up);
    let mut term = BigInt::one() << w;
    let mut sum = term.clone();
    let mut i: u64 = 1;
    while &term >= stop {
        term = fdiv(&fmul(&term, &uf, w, up), i, up);
        sum += &term;
        i += 1;
    }
    if up {
        // For u ≤ 1 the remaining tail is below 3·(last term).
        sum += term * 3 + 1;
    }
    sum
}

/// exp(u) for rational 0 ≤ u ≤ 1.
fn exp_unit(u: &BigRational, p: Precision) -> Interval {
    debug_assert!(!u.is_negative() && u <= &BigRational::one());
    let w = p.bits + 32;
    let stop = BigInt::one() << 16;
    let lo = exp_fixed(u, w, &stop, false);
    let hi = exp_fixed(u, w, &stop, true);
    from_fixed(lo, hi, w, p)
}

/// Euler's number.
pub fn e(p: Precision) -> Interval {
    cached(1, p, || exp_unit(&BigRational::one(), p))
}

/// 2^q for rational q.
pub fn exp2_rational(q: &BigRational, p: Precision) -> Interval {
    let whole = q.floor();
    let frac = q - &whole;
    let scale = Interval::point(pow2(
        i64::try_from(whole.to_integer()).expect("exponent fits in i64"),
    ));
    if frac.is_zero() {
        return scale;
    }
    // 2^frac = exp(frac·ln2), frac·ln2 ∈ [0, 0.7).
    let t = Interval::point(frac).mul(&ln2(p), p);
    let lo = exp_unit(&t.lo.max(BigRational::zero()), p).lo;
    let hi = exp_unit(&t.hi.min(BigRational::one()), p).hi;
    scale.mul(&Interval::new(lo, hi), p)
}

/// Compares a non-negative integer with an interval: `Less` if certainly
/// `x ≤ lo`, `Greater` if certainly `x > hi`, `Equal` when undecided.
pub fn locate(x: &BigRational, iv: &Interval) -> Ordering {
    if x <= &iv.lo {
        Ordering::Less
    } else if x > &iv.hi {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::from_digits(32)
    }

    fn approx(iv: &Interval) -> f64 {
        let lo: f64 = iv.lo.numer().to_string().parse::<f64>().unwrap()
            / iv.lo.denom().to_string().parse::<f64>().unwrap();
        lo
    }

    fn contains(iv: &Interval, v: f64) -> bool {
        let lo = approx(iv);
        let hi: f64 = iv.hi.numer().to_string().parse::<f64>().unwrap()
            / iv.hi.denom().to_string().parse::<f64>().unwrap();
        lo <= v + 1e-12 && v - 1e-12 <= hi
    }

    #[test]
    fn constants_enclose_known_values() {
        assert!(contains(&ln2(p()), std::f64::consts::LN_2));
        assert!(contains(&e(p()), std::f64::consts::E));
        let w = &ln2(p()).hi - &ln2(p()).lo;
        assert!(w < pow2(-100));
    }

    #[test]
    fn log_and_exp() {
        assert_eq!(log2_rational(&int(8), p()), Interval::from_int(3));
        assert!(contains(&log2_rational(&int(10), p()), 10f64.log2()));
        assert!(contains(
            &log2_rational(&BigRational::new(1.into(), 3.into()), p()),
            (1.0f64 / 3.0).log2()
        ));
        assert!(contains(
            &exp2_rational(&BigRational::new(7.into(), 2.into()), p()),
            2f64.powf(3.5)
        ));
        assert_eq!(exp2_rational(&int(-3), p()), Interval::point(pow2(-3)));
    }

    #[test]
    fn sqrt_is_exact_on_squares() {
        assert_eq!(Interval::from_int(49).sqrt(p()), Interval::from_int(7));
        let r = Interval::from_int(3).sqrt(p());
        assert!(contains(&r, 3f64.sqrt()));
        assert!(r.lo < r.hi);
    }

    #[test]
    fn rounding_is_outward() {
        let third = BigRational::new(1.into(), 3.into());
        let q = Precision::from_digits(4);
        assert!(round_down(&third, q) <= third);
        assert!(round_up(&third, q) >= third);
        assert_eq!(round_down(&int(12345), q), int(12345));
    }

    #[test]
    fn pow_matches_exact() {
        let r = Interval::from_int(3).pow(5, p());
        assert_eq!(r, Interval::from_int(243));
    }
}
