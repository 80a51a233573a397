//! Exact coefficient ring: Laurent polynomials in `s = q^{1/2}` with Gaussian
//! rational coefficients, plus the q-combinatorics built on top of them
//! (basic integers, basic factorials, Gaussian binomials).
//!
//! Every value is kept in canonical sparse form, so structural equality is
//! mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// An exact complex rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat::new(&self.re / &norm, -&self.im / &norm))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn json_parts(&self) -> [Value; 4] {
        [
            json!(self.re.numer().to_string()),
            json!(self.re.denom().to_string()),
            json!(self.im.numer().to_string()),
            json!(self.im.denom().to_string()),
        ]
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", fmt_rational(&self.im))
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                let mag = self.im.abs();
                if mag.is_one() {
                    write!(f, "({} {} i)", fmt_rational(&self.re), sign)
                } else {
                    write!(f, "({} {} {}*i)", fmt_rational(&self.re), sign, fmt_rational(&mag))
                }
            }
        }
    }
}

/// Laurent polynomial in `s = q^{1/2}`: the key of `terms` is the exponent of
/// `s`, so `q^k` is stored under `2k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentScalar {
    terms: BTreeMap<i32, GaussRat>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        LaurentScalar::default()
    }

    pub fn one() -> Self {
        LaurentScalar::constant(GaussRat::one())
    }

    pub fn i() -> Self {
        LaurentScalar::constant(GaussRat::i())
    }

    pub fn from_int(n: i64) -> Self {
        LaurentScalar::constant(GaussRat::from_int(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        LaurentScalar::constant(GaussRat::from_ratio(num, den))
    }

    pub fn constant(c: GaussRat) -> Self {
        LaurentScalar::monomial(c, 0)
    }

    /// `c · s^exp`.
    pub fn monomial(c: GaussRat, s_exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(s_exp, c);
        }
        LaurentScalar { terms }
    }

    /// `q^k` for integer `k`.
    pub fn q_pow(k: i32) -> Self {
        LaurentScalar::s_pow(2 * k)
    }

    /// `s^e = q^{e/2}`.
    pub fn s_pow(e: i32) -> Self {
        LaurentScalar::monomial(GaussRat::one(), e)
    }

    /// `q`.
    pub fn q() -> Self {
        LaurentScalar::q_pow(1)
    }

    /// Builds a scalar from `(s_exponent, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I: IntoIterator<Item = (i32, GaussRat)>>(it: I) -> Self {
        let mut out = LaurentScalar::zero();
        for (e, c) in it {
            out.add_term(e, &c);
        }
        out
    }

    fn add_term(&mut self, e: i32, c: &GaussRat) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(e).or_insert_with(GaussRat::zero);
            *slot = &*slot + c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(GaussRat::is_one)
    }

    /// Iterates terms in increasing `s`-exponent.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &GaussRat)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single term of a monomial scalar.
    pub fn as_monomial(&self) -> Option<(i32, &GaussRat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// True when every exponent is even, i.e. the value is a Laurent polynomial in `q`.
    pub fn is_integral_in_q(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return LaurentScalar::zero();
        }
        LaurentScalar {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplies by `s^e`.
    pub fn shift(&self, e: i32) -> Self {
        LaurentScalar {
            terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect(),
        }
    }

    /// The substitution `q -> q^{-1}` (so `s -> s^{-1}`).
    pub fn invert_q(&self) -> Self {
        LaurentScalar {
            terms: self.terms.iter().map(|(k, c)| (-k, c.clone())).collect(),
        }
    }

    /// Coefficient-wise complex conjugation (q treated as real).
    pub fn conj(&self) -> Self {
        LaurentScalar {
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentScalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a unit of the ring, which is exactly a nonzero monomial.
    pub fn inverse(&self) -> Option<Self> {
        let (e, c) = self.as_monomial()?;
        Some(LaurentScalar::monomial(c.inv()?, -e))
    }

    /// Exact division; fails unless `divisor` divides `self` with zero remainder.
    pub fn div_exact(&self, divisor: &LaurentScalar) -> Result<LaurentScalar> {
        if divisor.is_zero() {
            return Err(Error::InexactDivision("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(LaurentScalar::zero());
        }
        let dmax = divisor.max_exponent().unwrap();
        let dlead_inv = divisor.terms[&dmax].inv().unwrap();
        let dmin = divisor.min_exponent().unwrap();
        let mut rem = self.clone();
        let mut quot = LaurentScalar::zero();
        // Long division from the top; the quotient's lowest exponent is bounded
        // below by min(self) - min(divisor).
        let floor = self.min_exponent().unwrap() - dmin;
        while let Some(rmax) = rem.max_exponent() {
            let e = rmax - dmax;
            if e < floor {
                return Err(Error::InexactDivision(format!("{self} / {divisor}")));
            }
            let c = &rem.terms[&rmax] * &dlead_inv;
            let step = LaurentScalar::monomial(c.clone(), e);
            rem = &rem - &(&step * divisor);
            quot.add_term(e, &c);
        }
        Ok(quot)
    }

    /// Numeric value at a real positive `q` (so `s = sqrt(q)` is unambiguous).
    pub fn specialize(&self, q: f64) -> Result<Complex64> {
        if q.is_nan() || q <= 0.0 || !q.is_finite() {
            return Err(Error::Specialize(format!(
                "q must be real and positive in float mode, got {q}"
            )));
        }
        let s = q.sqrt();
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| c.to_complex() * s.powi(*e))
            .sum())
    }

    /// Exact value at a rational `q`; requires every exponent to be even.
    pub fn specialize_exact(&self, q: &BigRational) -> Result<GaussRat> {
        if q.is_zero() {
            return Err(Error::Specialize("q = 0".into()));
        }
        if !self.is_integral_in_q() {
            return Err(Error::Specialize(
                "half-integer power of q present in exact mode".into(),
            ));
        }
        let mut acc = GaussRat::zero();
        for (e, c) in &self.terms {
            let k = e / 2;
            let p = if k >= 0 {
                num_traits::pow(q.clone(), k as usize)
            } else {
                num_traits::pow(q.recip(), (-k) as usize)
            };
            acc = &acc + &c.clone().scale_real(&p);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    let [a, b, d, f] = c.json_parts();
                    json!([e, a, b, d, f])
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Json("scalar must be an array".into()))?;
        let mut out = LaurentScalar::zero();
        for t in arr {
            let t = t
                .as_array()
                .filter(|t| t.len() == 5)
                .ok_or_else(|| Error::Json("scalar term must have 5 entries".into()))?;
            let e = t[0]
                .as_i64()
                .ok_or_else(|| Error::Json("exponent must be an integer".into()))?;
            let int = |v: &Value| -> Result<BigInt> {
                let s = match v {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(Error::Json("expected integer".into())),
                };
                s.parse::<BigInt>()
                    .map_err(|_| Error::Json(format!("bad integer `{s}`")))
            };
            let den = |v: &Value| -> Result<BigInt> {
                let d = int(v)?;
                if d.is_zero() {
                    Err(Error::Json("zero denominator".into()))
                } else {
                    Ok(d)
                }
            };
            let re = BigRational::new(int(&t[1])?, den(&t[2])?);
            let im = BigRational::new(int(&t[3])?, den(&t[4])?);
            out.add_term(e as i32, &GaussRat::new(re, im));
        }
        Ok(out)
    }

    /// Renders a single term (`c·s^e`) without its sign; returns `(negative, text)`.
    fn render_term(e: i32, c: &GaussRat) -> (bool, String) {
        let qpart = match e {
            0 => None,
            2 => Some("q".to_string()),
            e if e % 2 == 0 => Some(format!("q^{}", e / 2)),
            e => Some(format!("q^({e}/2)")),
        };
        let (neg, mag) = if c.is_real() {
            (c.re.is_negative(), GaussRat::real(c.re.abs()))
        } else if c.re.is_zero() {
            (c.im.is_negative(), GaussRat::new(BigRational::zero(), c.im.abs()))
        } else {
            (false, c.clone())
        };
        let text = match (mag.is_one(), qpart) {
            (true, Some(qp)) => qp,
            (_, None) => mag.to_string(),
            (false, Some(qp)) => format!("{mag}*{qp}"),
        };
        (neg, text)
    }

    /// Monomials render as a bare signed term; longer sums are parenthesized.
    pub(crate) fn render_factor(&self) -> (bool, String) {
        match self.as_monomial() {
            Some((e, c)) => LaurentScalar::render_term(e, c),
            None => (false, format!("({self})")),
        }
    }
}

impl GaussRat {
    fn scale_real(self, r: &BigRational) -> GaussRat {
        GaussRat::new(self.re * r, self.im * r)
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let (neg, text) = LaurentScalar::render_term(*e, c);
            match (idx, neg) {
                (0, false) => write!(f, "{text}")?,
                (0, true) => write!(f, "-{text}")?,
                (_, false) => write!(f, " + {text}")?,
                (_, true) => write!(f, " - {text}")?,
            }
        }
        Ok(())
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Add for LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: LaurentScalar) -> LaurentScalar {
        &self + &rhs
    }
}

impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, rhs: &LaurentScalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c);
        }
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl Sub for LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: LaurentScalar) -> LaurentScalar {
        &self - &rhs
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Mul for LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: LaurentScalar) -> LaurentScalar {
        &self * &rhs
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

/// The basic integer `<n>` together with its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QInteger {
    pub n: u32,
    pub value: LaurentScalar,
}

impl QInteger {
    pub fn new(n: i64) -> Result<Self> {
        let value = basic_integer(n)?;
        Ok(QInteger { n: n as u32, value })
    }
}

/// `<n> = (q^n - 1)/(q - 1) = 1 + q + ... + q^{n-1}`.
pub fn basic_integer(n: i64) -> Result<LaurentScalar> {
    basic_integer_in(n, &LaurentScalar::q())
}

/// The basic integer in an arbitrary base `x`: `1 + x + ... + x^{n-1}`.
pub fn basic_integer_in(n: i64, base: &LaurentScalar) -> Result<LaurentScalar> {
    if n < 0 {
        return Err(Error::OutOfRange(format!("basic integer of negative n = {n}")));
    }
    let mut acc = LaurentScalar::zero();
    let mut p = LaurentScalar::one();
    for _ in 0..n {
        acc += &p;
        p = &p * base;
    }
    Ok(acc)
}

/// `<n>! = <1><2>...<n>` in base `x`.
pub fn basic_factorial_in(n: i64, base: &LaurentScalar) -> Result<LaurentScalar> {
    if n < 0 {
        return Err(Error::OutOfRange(format!("factorial of negative n = {n}")));
    }
    let mut acc = LaurentScalar::one();
    for k in 1..=n {
        acc = &acc * &basic_integer_in(k, base)?;
    }
    Ok(acc)
}

pub fn basic_factorial(n: i64) -> Result<LaurentScalar> {
    basic_factorial_in(n, &LaurentScalar::q())
}

/// Classical `n!` as a constant scalar.
pub fn classical_factorial(n: i64) -> Result<LaurentScalar> {
    if n < 0 {
        return Err(Error::OutOfRange(format!("factorial of negative n = {n}")));
    }
    let f: BigInt = (1..=n).map(BigInt::from).product();
    Ok(LaurentScalar::constant(GaussRat::real(BigRational::from_integer(f))))
}

/// Gaussian binomial `<n>!/(<k>!<n-k>!)` in base `x`, computed by exact division.
pub fn q_binomial(n: i64, k: i64, base: &LaurentScalar) -> Result<LaurentScalar> {
    if k < 0 || n < 0 || k > n {
        return Err(Error::OutOfRange(format!("q-binomial ({n} choose {k})")));
    }
    let num = basic_factorial_in(n, base)?;
    let den = &basic_factorial_in(k, base)? * &basic_factorial_in(n - k, base)?;
    num.div_exact(&den)
}

/// `eps(q|n) = q^{n(n-1)/2}`.
pub fn eps_power(n: i64) -> LaurentScalar {
    LaurentScalar::s_pow((n * (n - 1)) as i32)
}

/// `eps(q^{-1}|n) = q^{-n(n-1)/2}`.
pub fn eps_power_inv(n: i64) -> LaurentScalar {
    eps_power(n).invert_q()
}

/// `(-q)^{m}` for half-integer `m = two_m / 2`, on the branch `(-q)^{1/2} = i q^{1/2}`.
pub fn neg_q_power(two_m: i32) -> LaurentScalar {
    let phase = match two_m.rem_euclid(4) {
        0 => GaussRat::one(),
        1 => GaussRat::i(),
        2 => GaussRat::from_int(-1),
        _ => -&GaussRat::i(),
    };
    LaurentScalar::monomial(phase, two_m)
}
