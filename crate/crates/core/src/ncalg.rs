//! Noncommutative polynomial rings presented by quadratic rewrite rules.
//!
//! An [`AlgebraSpec`] fixes a totally ordered generator list and, for every
//! out-of-order pair `g_hi g_lo`, a rule rewriting it into strictly smaller
//! words. Normal ordering fires rules until every word is non-decreasing
//! (a PBW word). The stock presentations live in [`specs`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qcoeff::LaurentScalar;

/// Default number of rule applications allowed in one normalization.
pub const REWRITE_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorSort {
    MatrixElement,
    ConjugateMatrixElement,
    SpinorComponent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub sort: GeneratorSort,
    pub order_index: usize,
}

/// A word over generator indices, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the first adjacent pair `w[i] > w[i+1]`.
    fn first_descent(&self) -> Option<usize> {
        self.0.windows(2).position(|p| p[0] > p[1])
    }

    pub fn is_normal(&self) -> bool {
        self.first_descent().is_none()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn count(&self, g: u16) -> usize {
        self.0.iter().filter(|&&x| x == g).count()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Linear combination of words with [`LaurentScalar`] coefficients.
///
/// Values produced by an [`AlgebraSpec`] are always normal-ordered; the raw
/// constructors here do not normalize.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, LaurentScalar>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        NCPoly::scalar(LaurentScalar::one())
    }

    pub fn scalar(c: LaurentScalar) -> Self {
        NCPoly::term(c, Word::empty())
    }

    pub fn term(c: LaurentScalar, w: Word) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        NCPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, LaurentScalar)>>(it: I) -> Self {
        let mut p = NCPoly::zero();
        for (w, c) in it {
            p.add_term(w, &c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, w: Word, c: &LaurentScalar) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(w.clone()).or_default();
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &LaurentScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> LaurentScalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// The constant term's coefficient.
    pub fn constant_part(&self) -> LaurentScalar {
        self.coefficient(&Word::empty())
    }

    /// `Some(c)` when the polynomial is a pure scalar.
    pub fn as_scalar(&self) -> Option<LaurentScalar> {
        match self.terms.len() {
            0 => Some(LaurentScalar::zero()),
            1 => self.terms.get(&Word::empty()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &LaurentScalar) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero();
        }
        NCPoly::from_terms(self.terms.iter().map(|(w, x)| (w.clone(), x * c)))
    }

    /// Applies a map to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&LaurentScalar) -> LaurentScalar) -> NCPoly {
        NCPoly::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), f(c))))
    }

    /// Largest generator index appearing, if any.
    fn max_generator(&self) -> Option<u16> {
        self.terms.keys().flat_map(|w| w.0.iter().copied()).max()
    }

    pub fn mentions(&self, g: u16) -> bool {
        self.terms.keys().any(|w| w.0.contains(&g))
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Add for NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: NCPoly) -> NCPoly {
        &self + &rhs
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), &-c);
        }
        out
    }
}

impl Sub for NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: NCPoly) -> NCPoly {
        &self - &rhs
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(&LaurentScalar::from_int(-1))
    }
}

impl Mul<&LaurentScalar> for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &LaurentScalar) -> NCPoly {
        self.scale(rhs)
    }
}

/// `g_hi g_lo -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub hi: u16,
    pub lo: u16,
    pub rhs: NCPoly,
}

/// A generator set with its rewrite system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    name: String,
    generators: Vec<Generator>,
    rules: Vec<Option<NCPoly>>,
    budget: usize,
}

impl AlgebraSpec {
    pub fn builder(name: impl Into<String>) -> SpecBuilder {
        SpecBuilder {
            name: name.into(),
            generators: Vec::new(),
            rules: Vec::new(),
            budget: REWRITE_BUDGET,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<u16> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .map(|i| i as u16)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn has_generator(&self, name: &str) -> bool {
        self.generators.iter().any(|g| g.name == name)
    }

    pub fn generator_name(&self, idx: u16) -> &str {
        &self.generators[idx as usize].name
    }

    /// The generator as a degree-one polynomial.
    pub fn gen(&self, name: &str) -> Result<NCPoly> {
        Ok(NCPoly::term(
            LaurentScalar::one(),
            Word(vec![self.index_of(name)?]),
        ))
    }

    pub fn rule(&self, hi: u16, lo: u16) -> Option<&NCPoly> {
        let n = self.generators.len();
        self.rules
            .get(hi as usize * n + lo as usize)
            .and_then(|r| r.as_ref())
    }

    pub fn rules(&self) -> Vec<RewriteRule> {
        let n = self.generators.len() as u16;
        let mut out = Vec::new();
        for hi in 0..n {
            for lo in 0..hi {
                if let Some(rhs) = self.rule(hi, lo) {
                    out.push(RewriteRule {
                        hi,
                        lo,
                        rhs: rhs.clone(),
                    });
                }
            }
        }
        out
    }

    /// A copy with one rule replaced. Fails if the new rule is not strictly
    /// decreasing.
    pub fn with_rule(&self, hi: &str, lo: &str, rhs: NCPoly) -> Result<AlgebraSpec> {
        let (h, l) = (self.index_of(hi)?, self.index_of(lo)?);
        validate_rule(h, l, &rhs, self.len())?;
        let mut out = self.clone();
        let n = out.generators.len();
        out.rules[h as usize * n + l as usize] = Some(rhs);
        Ok(out)
    }

    pub fn with_budget(mut self, budget: usize) -> AlgebraSpec {
        self.budget = budget;
        self
    }

    fn check_words(&self, p: &NCPoly) -> Result<()> {
        match p.max_generator() {
            Some(g) if g as usize >= self.generators.len() => Err(Error::SpecMismatch(format!(
                "generator index {g} outside `{}`",
                self.name
            ))),
            _ => Ok(()),
        }
    }

    /// Rewrites an arbitrary linear combination of words into PBW form.
    pub fn normal_order_terms<I>(&self, input: I) -> Result<NCPoly>
    where
        I: IntoIterator<Item = (Word, LaurentScalar)>,
    {
        let mut pending: BTreeMap<Word, LaurentScalar> = BTreeMap::new();
        let n = self.generators.len();
        for (w, c) in input {
            if let Some(&g) = w.0.iter().max() {
                if g as usize >= n {
                    return Err(Error::SpecMismatch(format!(
                        "generator index {g} outside `{}`",
                        self.name
                    )));
                }
            }
            accumulate(&mut pending, w, &c);
        }
        let mut out = NCPoly::zero();
        let mut steps = 0usize;
        // Rules only produce smaller words, so popping the largest pending
        // word finalizes it: nothing processed later can contribute to it.
        while let Some((w, c)) = pending.pop_last() {
            let Some(i) = w.first_descent() else {
                out.terms.insert(w, c);
                continue;
            };
            steps += 1;
            if steps > self.budget {
                return Err(Error::RewriteBudget(self.budget));
            }
            let rhs = self.rule(w.0[i], w.0[i + 1]).ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "no rule for {} {}",
                    self.generator_name(w.0[i]),
                    self.generator_name(w.0[i + 1])
                ))
            })?;
            for (rw, rc) in rhs.terms() {
                let mut v = Vec::with_capacity(w.len() + rw.len());
                v.extend_from_slice(&w.0[..i]);
                v.extend_from_slice(&rw.0);
                v.extend_from_slice(&w.0[i + 2..]);
                accumulate(&mut pending, Word(v), &(&c * rc));
            }
        }
        Ok(out)
    }

    /// Normal-orders a polynomial whose words may be out of order.
    pub fn normal_order(&self, p: &NCPoly) -> Result<NCPoly> {
        self.normal_order_terms(p.terms().map(|(w, c)| (w.clone(), c.clone())))
    }

    /// Normal form of a single word given by generator names.
    pub fn word(&self, names: &[&str]) -> Result<NCPoly> {
        let w = names
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<Vec<_>>>()?;
        self.normal_order_terms([(Word(w), LaurentScalar::one())])
    }

    pub fn multiply(&self, p1: &NCPoly, p2: &NCPoly) -> Result<NCPoly> {
        self.check_words(p1)?;
        self.check_words(p2)?;
        let mut raw = Vec::with_capacity(p1.len() * p2.len());
        for (w1, c1) in p1.terms() {
            for (w2, c2) in p2.terms() {
                raw.push((w1.concat(w2), c1 * c2));
            }
        }
        self.normal_order_terms(raw)
    }

    /// Ordered product of a sequence of factors.
    pub fn product<'a, I: IntoIterator<Item = &'a NCPoly>>(&self, factors: I) -> Result<NCPoly> {
        let mut acc = NCPoly::one();
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, p: &NCPoly, n: u32) -> Result<NCPoly> {
        let mut acc = NCPoly::one();
        for _ in 0..n {
            acc = self.multiply(&acc, p)?;
        }
        Ok(acc)
    }

    /// `p1 p2 - p2 p1`.
    pub fn commutator(&self, p1: &NCPoly, p2: &NCPoly) -> Result<NCPoly> {
        Ok(&self.multiply(p1, p2)? - &self.multiply(p2, p1)?)
    }

    /// Algebra substitution: each generator `g` with an entry in `images` is
    /// replaced by that polynomial, all others are kept. Products are formed
    /// in word order and normal-ordered in `self`.
    pub fn substitute(&self, p: &NCPoly, images: &HashMap<u16, NCPoly>) -> Result<NCPoly> {
        let mut out = NCPoly::zero();
        let mut cache: HashMap<u16, NCPoly> = HashMap::new();
        for (w, c) in p.terms() {
            let mut acc = NCPoly::scalar(c.clone());
            for &g in &w.0 {
                let img = cache.entry(g).or_insert_with(|| {
                    images.get(&g).cloned().unwrap_or_else(|| {
                        NCPoly::term(LaurentScalar::one(), Word(vec![g]))
                    })
                });
                acc = self.multiply(&acc, img)?;
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Replaces every occurrence of the pair `a d` (with only generators
    /// strictly between them in the order in between) using `a d = 1 + k b c`,
    /// i.e. works modulo the ideal `(a d - k b c - 1)`.
    pub fn reduce_unimodular(&self, p: &NCPoly, block: &MatrixBlock) -> Result<NCPoly> {
        let mut cur = p.clone();
        loop {
            let mut keep = NCPoly::zero();
            let mut raw: Vec<(Word, LaurentScalar)> = Vec::new();
            let mut changed = false;
            for (w, c) in cur.terms() {
                let last_a = w.0.iter().rposition(|&g| g == block.a);
                let first_d = w.0.iter().position(|&g| g == block.d);
                let (Some(ia), Some(id)) = (last_a, first_d) else {
                    keep.add_term(w.clone(), c);
                    continue;
                };
                if ia > id {
                    keep.add_term(w.clone(), c);
                    continue;
                }
                let seg = &w.0[ia + 1..id];
                if seg.iter().any(|&g| g <= block.a || g >= block.d) {
                    return Err(Error::InvalidSpec(
                        "unimodular reduction needs a and d separated only by generators between them"
                            .into(),
                    ));
                }
                // d·seg = mu·seg·d, so a·seg·d = mu^{-1}·(a d)·seg.
                let mut moved = vec![block.d];
                moved.extend_from_slice(seg);
                let nf = self.normal_order_terms([(Word(moved), LaurentScalar::one())])?;
                let mut target = seg.to_vec();
                target.push(block.d);
                let mu = nf.coefficient(&Word(target));
                if nf.len() != 1 || mu.inverse().is_none() {
                    return Err(Error::InvalidSpec(
                        "d does not q-commute past the middle segment".into(),
                    ));
                }
                let factor = c * &mu.inverse().unwrap();
                let prefix = &w.0[..ia];
                let suffix = &w.0[id + 1..];
                let mut one_word = prefix.to_vec();
                one_word.extend_from_slice(seg);
                one_word.extend_from_slice(suffix);
                raw.push((Word(one_word), factor.clone()));
                let mut bc_word = prefix.to_vec();
                bc_word.push(block.b);
                bc_word.push(block.c);
                bc_word.extend_from_slice(seg);
                bc_word.extend_from_slice(suffix);
                raw.push((Word(bc_word), &factor * &block.det_coeff));
                changed = true;
            }
            if !changed {
                return Ok(cur);
            }
            cur = &keep + &self.normal_order_terms(raw)?;
        }
    }

    /// Numeric value under a commutative assignment of the generators.
    pub fn substitute_numeric(
        &self,
        p: &NCPoly,
        assignment: &HashMap<String, Complex64>,
        q: f64,
    ) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (w, c) in p.terms() {
            let mut v = c.specialize(q)?;
            for &g in &w.0 {
                let name = self.generator_name(g);
                v *= assignment
                    .get(name)
                    .ok_or_else(|| Error::MissingAssignment(name.to_string()))?;
            }
            total += v;
        }
        Ok(total)
    }

    /// Specializes coefficients at `q` and keeps words: used for `q = 1`
    /// comparisons where the exact coefficients collapse.
    pub fn specialize_coefficients(&self, p: &NCPoly, q: f64) -> Result<Vec<(Word, Complex64)>> {
        p.terms()
            .map(|(w, c)| Ok((w.clone(), c.specialize(q)?)))
            .collect()
    }

    /// Overlap check on every triple `g_k g_j g_i` with `k > j > i`: both
    /// first rewrites must lead to the same normal form. Returns the failing
    /// overlaps with their residuals.
    pub fn check_confluence(&self) -> Result<Vec<(Word, NCPoly)>> {
        let n = self.generators.len() as u16;
        let mut failures = Vec::new();
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let w = Word(vec![k, j, i]);
                    let left = self.rewrite_at(&w, 0)?;
                    let right = self.rewrite_at(&w, 1)?;
                    let res = &left - &right;
                    if !res.is_zero() {
                        failures.push((w, res));
                    }
                }
            }
        }
        Ok(failures)
    }

    fn rewrite_at(&self, w: &Word, pos: usize) -> Result<NCPoly> {
        let rhs = self
            .rule(w.0[pos], w.0[pos + 1])
            .ok_or_else(|| Error::InvalidSpec("missing rule".into()))?;
        let raw = rhs.terms().map(|(rw, rc)| {
            let mut v = w.0[..pos].to_vec();
            v.extend_from_slice(&rw.0);
            v.extend_from_slice(&w.0[pos + 2..]);
            (Word(v), rc.clone())
        });
        self.normal_order_terms(raw.collect::<Vec<_>>())
    }

    /// Canonical text: terms in graded-lex order, `coeff*g1*g2*...`.
    pub fn render(&self, p: &NCPoly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (w, c)) in p.terms().enumerate() {
            let (neg, coeff) = c.render_factor();
            let names: Vec<&str> = w.0.iter().map(|&g| self.generator_name(g)).collect();
            let body = match (coeff.as_str(), names.is_empty()) {
                (_, true) => coeff.clone(),
                ("1", false) => names.join("*"),
                (_, false) => format!("{}*{}", coeff, names.join("*")),
            };
            match (idx, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }

    pub fn to_json(&self, p: &NCPoly) -> Value {
        Value::Array(
            p.terms()
                .map(|(w, c)| {
                    let names: Vec<&str> = w.0.iter().map(|&g| self.generator_name(g)).collect();
                    json!({ "word": names, "coeff": c.to_json() })
                })
                .collect(),
        )
    }

    pub fn from_json(&self, v: &Value) -> Result<NCPoly> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Json("polynomial must be an array".into()))?;
        let mut raw = Vec::new();
        for t in arr {
            let word = t
                .get("word")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Json("missing `word`".into()))?;
            let w = word
                .iter()
                .map(|g| {
                    g.as_str()
                        .ok_or_else(|| Error::Json("generator must be a string".into()))
                        .and_then(|s| self.index_of(s))
                })
                .collect::<Result<Vec<_>>>()?;
            let c = LaurentScalar::from_json(
                t.get("coeff")
                    .ok_or_else(|| Error::Json("missing `coeff`".into()))?,
            )?;
            raw.push((Word(w), c));
        }
        self.normal_order_terms(raw)
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {}", self.name)?;
        for r in self.rules() {
            let hi = self.generator_name(r.hi);
            let lo = self.generator_name(r.lo);
            writeln!(f, "  {hi}*{lo} -> {}", self.render(&r.rhs))?;
        }
        Ok(())
    }
}

fn accumulate(map: &mut BTreeMap<Word, LaurentScalar>, w: Word, c: &LaurentScalar) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&w) {
        Some(slot) => {
            *slot += c;
            if slot.is_zero() {
                map.remove(&w);
            }
        }
        None => {
            map.insert(w, c.clone());
        }
    }
}

fn validate_rule(hi: u16, lo: u16, rhs: &NCPoly, n: usize) -> Result<()> {
    if hi <= lo {
        return Err(Error::InvalidSpec(format!(
            "rule lhs ({hi},{lo}) is not an out-of-order pair"
        )));
    }
    let lhs = Word(vec![hi, lo]);
    for (w, _) in rhs.terms() {
        if w >= &lhs {
            return Err(Error::InvalidSpec(format!(
                "rule rhs word {:?} is not smaller than lhs {:?}",
                w.0, lhs.0
            )));
        }
        if w.0.iter().any(|&g| g as usize >= n) {
            return Err(Error::InvalidSpec("rule mentions unknown generator".into()));
        }
    }
    Ok(())
}

/// Indices of a 2x2 quantum-matrix block `[[a, b], [c, d]]` inside a spec, with
/// the coefficient `k` of its unit determinant `a d - k b c = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixBlock {
    pub a: u16,
    pub b: u16,
    pub c: u16,
    pub d: u16,
    pub det_coeff: LaurentScalar,
}

impl MatrixBlock {
    pub fn find(spec: &AlgebraSpec, names: [&str; 4], det_coeff: LaurentScalar) -> Result<Self> {
        Ok(MatrixBlock {
            a: spec.index_of(names[0])?,
            b: spec.index_of(names[1])?,
            c: spec.index_of(names[2])?,
            d: spec.index_of(names[3])?,
            det_coeff,
        })
    }

    pub fn entries(&self) -> [u16; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

type PendingRule = (String, String, Vec<(LaurentScalar, Vec<String>)>);

pub struct SpecBuilder {
    name: String,
    generators: Vec<(String, GeneratorSort)>,
    rules: Vec<PendingRule>,
    budget: usize,
}

impl SpecBuilder {
    pub fn generator(mut self, name: &str, sort: GeneratorSort) -> Self {
        self.generators.push((name.to_string(), sort));
        self
    }

    /// `hi lo -> sum coeff * word`.
    pub fn rule(mut self, hi: &str, lo: &str, rhs: Vec<(LaurentScalar, Vec<&str>)>) -> Self {
        self.rules.push((
            hi.to_string(),
            lo.to_string(),
            rhs.into_iter()
                .map(|(c, w)| (c, w.into_iter().map(String::from).collect()))
                .collect(),
        ));
        self
    }

    /// `hi lo -> coeff * lo hi`.
    pub fn q_commute(self, hi: &str, lo: &str, coeff: LaurentScalar) -> Self {
        self.rule(hi, lo, vec![(coeff, vec![lo, hi])])
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Finishes the spec. Out-of-order pairs without an explicit rule commute.
    pub fn build(self) -> Result<AlgebraSpec> {
        let n = self.generators.len();
        let mut generators = Vec::with_capacity(n);
        for (i, (name, sort)) in self.generators.iter().enumerate() {
            if generators.iter().any(|g: &Generator| &g.name == name) {
                return Err(Error::InvalidSpec(format!("duplicate generator `{name}`")));
            }
            generators.push(Generator {
                name: name.clone(),
                sort: *sort,
                order_index: i,
            });
        }
        let idx = |s: &str| -> Result<u16> {
            generators
                .iter()
                .position(|g| g.name == s)
                .map(|i| i as u16)
                .ok_or_else(|| Error::UnknownGenerator(s.to_string()))
        };
        let mut rules: Vec<Option<NCPoly>> = vec![None; n * n];
        for (hi, lo, rhs) in &self.rules {
            let (h, l) = (idx(hi)?, idx(lo)?);
            let mut poly = NCPoly::zero();
            for (c, w) in rhs {
                let w = w.iter().map(|g| idx(g)).collect::<Result<Vec<_>>>()?;
                poly.add_term(Word(w), c);
            }
            validate_rule(h, l, &poly, n)?;
            let slot = &mut rules[h as usize * n + l as usize];
            if slot.is_some() {
                return Err(Error::InvalidSpec(format!("two rules for {hi} {lo}")));
            }
            *slot = Some(poly);
        }
        for h in 0..n {
            for l in 0..h {
                let slot = &mut rules[h * n + l];
                if slot.is_none() {
                    *slot = Some(NCPoly::term(
                        LaurentScalar::one(),
                        Word(vec![l as u16, h as u16]),
                    ));
                }
            }
        }
        Ok(AlgebraSpec {
            name: self.name,
            generators,
            rules,
            budget: self.budget,
        })
    }
}

/// Stock presentations.
pub mod specs {
    use super::*;

    /// Coefficient of `b c` in the reordering `d a -> a d + k b c` that makes
    /// `a d - q b c` central: `k = q^{-1} - q`.
    pub fn da_coefficient() -> LaurentScalar {
        LaurentScalar::q_pow(-1) - LaurentScalar::q()
    }

    /// Adds the quantum-matrix relations for `[[a,b],[c,d]]` with deformation
    /// parameter `p` (p = q for the defining copy, p = q^{-1} for the conjugate
    /// copy): `ab = p ba, ac = p ca, bd = p db, cd = p dc, bc = cb,
    /// da = ad + (p^{-1} - p) bc`.
    pub fn quantum_matrix_rules(
        builder: SpecBuilder,
        names: [&str; 4],
        p: &LaurentScalar,
        da_coeff: LaurentScalar,
    ) -> SpecBuilder {
        let [a, b, c, d] = names;
        let pinv = p.inverse().expect("deformation parameter must be a unit");
        builder
            .q_commute(b, a, pinv.clone())
            .q_commute(c, a, pinv.clone())
            .q_commute(d, b, pinv.clone())
            .q_commute(d, c, pinv)
            .q_commute(c, b, LaurentScalar::one())
            .rule(
                d,
                a,
                vec![(LaurentScalar::one(), vec![a, d]), (da_coeff, vec![b, c])],
            )
    }

    pub const T_NAMES: [&str; 4] = ["a", "b", "c", "d"];
    pub const TBAR_NAMES: [&str; 4] = ["abar", "bbar", "cbar", "dbar"];

    fn matrix_generators(builder: SpecBuilder, names: [&str; 4], sort: GeneratorSort) -> SpecBuilder {
        names
            .iter()
            .fold(builder, |b, n| b.generator(n, sort))
    }

    /// `SL_q(2)`: generators `a < b < c < d`.
    pub fn slq2() -> AlgebraSpec {
        slq2_with_da(da_coefficient())
    }

    /// `SL_q(2)` with an arbitrary `d a` rule coefficient (for mutation checks).
    pub fn slq2_with_da(da_coeff: LaurentScalar) -> AlgebraSpec {
        let b = matrix_generators(AlgebraSpec::builder("sl"), T_NAMES, GeneratorSort::MatrixElement);
        quantum_matrix_rules(b, T_NAMES, &LaurentScalar::q(), da_coeff)
            .build()
            .expect("stock spec is valid")
    }

    /// The conjugate relations obtained by an order-reversing antilinear star
    /// with real q: the same presentation with `q -> q^{-1}`.
    pub fn conjugate_rules(builder: SpecBuilder, da_coeff: &LaurentScalar) -> SpecBuilder {
        quantum_matrix_rules(
            builder,
            TBAR_NAMES,
            &LaurentScalar::q_pow(-1),
            da_coeff.invert_q(),
        )
    }

    /// Two commuting copies: `a..d` and `abar..dbar`.
    pub fn slq2_with_conjugate() -> AlgebraSpec {
        slq2_with_conjugate_da(da_coefficient())
    }

    pub fn slq2_with_conjugate_da(da_coeff: LaurentScalar) -> AlgebraSpec {
        let b = matrix_generators(AlgebraSpec::builder("slbar"), T_NAMES, GeneratorSort::MatrixElement);
        let b = matrix_generators(b, TBAR_NAMES, GeneratorSort::ConjugateMatrixElement);
        let b = quantum_matrix_rules(b, T_NAMES, &LaurentScalar::q(), da_coeff.clone());
        conjugate_rules(b, &da_coeff).build().expect("stock spec is valid")
    }

    /// Two mutually commuting copies of `SL_q(2)`, named `a1..d1` and `a2..d2`.
    pub fn slq2_doubled() -> AlgebraSpec {
        let n1 = ["a1", "b1", "c1", "d1"];
        let n2 = ["a2", "b2", "c2", "d2"];
        let b = matrix_generators(AlgebraSpec::builder("sl2x"), n1, GeneratorSort::MatrixElement);
        let b = matrix_generators(b, n2, GeneratorSort::MatrixElement);
        let b = quantum_matrix_rules(b, n1, &LaurentScalar::q(), da_coefficient());
        quantum_matrix_rules(b, n2, &LaurentScalar::q(), da_coefficient())
            .build()
            .expect("stock spec is valid")
    }

    /// Adds a quantum-plane relation `second first = coeff * first second`
    /// between two spinor components (`first` ordered before `second`).
    pub fn plane_rule(builder: SpecBuilder, first: &str, second: &str, coeff: LaurentScalar) -> SpecBuilder {
        builder.q_commute(second, first, coeff)
    }

    /// `SL_q(2)` plus two contravariant spinors `x1, x2` (xi^A) and
    /// `y1, y2` (chi^A). With `plane` set each spinor obeys
    /// `s^1 s^2 = q s^2 s^1`; distinct spinors and matrix entries commute.
    pub fn spinor(plane: bool) -> AlgebraSpec {
        spinor_with(da_coefficient(), plane)
    }

    pub fn spinor_with(da_coeff: LaurentScalar, plane: bool) -> AlgebraSpec {
        let b = matrix_generators(AlgebraSpec::builder(if plane { "plane" } else { "spinor" }), T_NAMES, GeneratorSort::MatrixElement);
        let b = ["x1", "x2", "y1", "y2"]
            .iter()
            .fold(b, |b, n| b.generator(n, GeneratorSort::SpinorComponent));
        let mut b = quantum_matrix_rules(b, T_NAMES, &LaurentScalar::q(), da_coeff);
        if plane {
            // x1 x2 = q x2 x1  <=>  x2 x1 -> q^{-1} x1 x2
            b = plane_rule(b, "x1", "x2", LaurentScalar::q_pow(-1));
            b = plane_rule(b, "y1", "y2", LaurentScalar::q_pow(-1));
        }
        b.build().expect("stock spec is valid")
    }

    /// Everything the command line knows: both matrix copies, two upper
    /// spinors with plane relations, and the covariant plane `c1, c2` with
    /// `c2 c1 = q c1 c2`.
    pub fn full() -> AlgebraSpec {
        let b = matrix_generators(AlgebraSpec::builder("full"), T_NAMES, GeneratorSort::MatrixElement);
        let b = matrix_generators(b, TBAR_NAMES, GeneratorSort::ConjugateMatrixElement);
        let b = ["x1", "x2", "y1", "y2", "c1", "c2"]
            .iter()
            .fold(b, |b, n| b.generator(n, GeneratorSort::SpinorComponent));
        let b = quantum_matrix_rules(b, T_NAMES, &LaurentScalar::q(), da_coefficient());
        let b = conjugate_rules(b, &da_coefficient());
        let b = plane_rule(b, "x1", "x2", LaurentScalar::q_pow(-1));
        let b = plane_rule(b, "y1", "y2", LaurentScalar::q_pow(-1));
        let b = plane_rule(b, "c1", "c2", LaurentScalar::q());
        b.build().expect("stock spec is valid")
    }

    /// Looks up a stock spec by its command-line name.
    pub fn by_name(name: &str) -> Option<AlgebraSpec> {
        match name {
            "sl" => Some(slq2()),
            "slbar" => Some(slq2_with_conjugate()),
            "spinor" => Some(spinor(false)),
            "plane" => Some(spinor(true)),
            "full" => Some(full()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 5] = ["sl", "slbar", "spinor", "plane", "full"];

    /// `a d - q b c` in a spec containing the block `[[a,b],[c,d]]`.
    pub fn q_determinant(spec: &AlgebraSpec, names: [&str; 4], k: &LaurentScalar) -> Result<NCPoly> {
        let [a, b, c, d] = names;
        Ok(&spec.word(&[a, d])? - &spec.word(&[b, c])?.scale(k))
    }

    /// Block handle for the defining copy (`a d - q b c = 1`).
    pub fn t_block(spec: &AlgebraSpec) -> Result<MatrixBlock> {
        MatrixBlock::find(spec, T_NAMES, LaurentScalar::q())
    }

    /// Block handle for the conjugate copy (`abar dbar - q^{-1} bbar cbar = 1`).
    pub fn tbar_block(spec: &AlgebraSpec) -> Result<MatrixBlock> {
        MatrixBlock::find(spec, TBAR_NAMES, LaurentScalar::q_pow(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::specs::*;
    use super::*;

    fn q() -> LaurentScalar {
        LaurentScalar::q()
    }

    fn qi() -> LaurentScalar {
        LaurentScalar::q_pow(-1)
    }

    #[test]
    fn normal_order_examples() {
        let s = slq2();
        assert_eq!(s.word(&["b", "a"]).unwrap(), s.word(&["a", "b"]).unwrap().scale(&qi()));
        assert_eq!(s.word(&["c", "b"]).unwrap(), s.word(&["b", "c"]).unwrap());
        let expected = &s.word(&["a", "d"]).unwrap() - &s.word(&["b", "c"]).unwrap().scale(&(q() - qi()));
        assert_eq!(s.word(&["d", "a"]).unwrap(), expected);
    }

    #[test]
    fn normal_order_is_idempotent() {
        let s = slq2();
        let p = s.word(&["d", "c", "b", "a", "d"]).unwrap();
        assert_eq!(s.normal_order(&p).unwrap(), p);
        assert!(p.terms().all(|(w, _)| w.is_normal()));
    }

    #[test]
    fn multiply_examples() {
        let s = slq2();
        let ab = s.word(&["a", "b"]).unwrap();
        let cd = s.word(&["c", "d"]).unwrap();
        assert_eq!(s.multiply(&ab, &cd).unwrap(), s.word(&["a", "b", "c", "d"]).unwrap());
        let delta = q_determinant(&s, T_NAMES, &q()).unwrap();
        for g in T_NAMES {
            let g = s.gen(g).unwrap();
            assert!(s.commutator(&delta, &g).unwrap().is_zero());
        }
    }

    #[test]
    fn quantum_plane_product() {
        let s = spinor(true);
        // x1 x2 = q x2 x1; with order x1 < x2 the normal form of x2 x1 is q^{-1} x1 x2
        let x1x2 = s.word(&["x1", "x2"]).unwrap();
        let x2x1 = s.word(&["x2", "x1"]).unwrap();
        assert_eq!(x1x2, x2x1.scale(&q()));
    }

    #[test]
    fn commutator_examples() {
        let s = slq2();
        let (a, b, c) = (s.gen("a").unwrap(), s.gen("b").unwrap(), s.gen("c").unwrap());
        assert!(s.commutator(&b, &c).unwrap().is_zero());
        let expected = s.word(&["a", "b"]).unwrap().scale(&(LaurentScalar::one() - qi()));
        assert_eq!(s.commutator(&a, &b).unwrap(), expected);
    }

    #[test]
    fn unimodular_examples() {
        let s = slq2();
        let blk = t_block(&s).unwrap();
        let ad = s.word(&["a", "d"]).unwrap();
        let expected = &NCPoly::one() + &s.word(&["b", "c"]).unwrap().scale(&q());
        assert_eq!(s.reduce_unimodular(&ad, &blk).unwrap(), expected);
        let a = s.gen("a").unwrap();
        assert_eq!(s.reduce_unimodular(&a, &blk).unwrap(), a);
        let add = s.word(&["a", "d", "d"]).unwrap();
        let expected = &s.gen("d").unwrap() + &s.word(&["b", "c", "d"]).unwrap().scale(&q());
        assert_eq!(s.reduce_unimodular(&add, &blk).unwrap(), expected);
    }

    #[test]
    fn unimodular_reduction_is_idempotent_and_kills_delta_minus_one() {
        let s = slq2();
        let blk = t_block(&s).unwrap();
        let delta = q_determinant(&s, T_NAMES, &q()).unwrap();
        let r = s.reduce_unimodular(&(&delta - &NCPoly::one()), &blk).unwrap();
        assert!(r.is_zero());
        let p = s.word(&["a", "a", "b", "d", "d", "c"]).unwrap();
        let r1 = s.reduce_unimodular(&p, &blk).unwrap();
        assert_eq!(s.reduce_unimodular(&r1, &blk).unwrap(), r1);
        for (w, _) in r1.terms() {
            assert!(!(w.0.contains(&blk.a) && w.0.contains(&blk.d)));
        }
    }

    #[test]
    fn conjugate_copy_reduction() {
        let s = slq2_with_conjugate();
        let blk = tbar_block(&s).unwrap();
        let delta = q_determinant(&s, TBAR_NAMES, &qi()).unwrap();
        assert!(s.reduce_unimodular(&(&delta - &NCPoly::one()), &blk).unwrap().is_zero());
        for g in TBAR_NAMES {
            assert!(s.commutator(&delta, &s.gen(g).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn substitute_numeric_examples() {
        let s = slq2();
        let delta = q_determinant(&s, T_NAMES, &q()).unwrap();
        let assign = |v: [f64; 4]| -> HashMap<String, Complex64> {
            T_NAMES
                .iter()
                .zip(v)
                .map(|(n, x)| (n.to_string(), Complex64::new(x, 0.0)))
                .collect()
        };
        let one = s.substitute_numeric(&delta, &assign([1.0, 0.0, 0.0, 1.0]), 1.0).unwrap();
        assert!((one - 1.0).norm() < 1e-15);
        let v = s.substitute_numeric(&delta, &assign([2.0, 1.0, 1.0, 1.0]), 1.0).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        let da = s.word(&["d", "a"]).unwrap();
        let v = s.substitute_numeric(&da, &assign([2.0, 1.0, 1.0, 1.0]), 1.0).unwrap();
        assert!((v - 2.0).norm() < 1e-15);
        let mut partial = assign([2.0, 1.0, 1.0, 1.0]);
        partial.remove("c");
        assert!(matches!(
            s.substitute_numeric(&delta, &partial, 1.0),
            Err(Error::MissingAssignment(_))
        ));
    }

    #[test]
    fn stock_specs_are_confluent() {
        for name in NAMES {
            let s = by_name(name).unwrap();
            assert!(s.check_confluence().unwrap().is_empty(), "{name}");
        }
        assert!(slq2_doubled().check_confluence().unwrap().is_empty());
    }

    #[test]
    fn flipped_da_rule_breaks_centrality() {
        let s = slq2_with_da(-da_coefficient());
        let delta = q_determinant(&s, T_NAMES, &q()).unwrap();
        let a = s.gen("a").unwrap();
        assert!(!s.commutator(&delta, &a).unwrap().is_zero());
    }

    #[test]
    fn bad_rules_rejected() {
        let r = AlgebraSpec::builder("bad")
            .generator("x", GeneratorSort::SpinorComponent)
            .generator("y", GeneratorSort::SpinorComponent)
            .rule("y", "x", vec![(LaurentScalar::one(), vec!["y", "x"])])
            .build();
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
        let r = AlgebraSpec::builder("bad")
            .generator("x", GeneratorSort::SpinorComponent)
            .generator("x", GeneratorSort::SpinorComponent)
            .build();
        assert!(r.is_err());
        assert!(matches!(slq2().gen("z"), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let s = slq2().with_budget(3);
        let long = Word(vec![3, 2, 1, 0, 3, 2, 1, 0]);
        let r = s.normal_order_terms([(long, LaurentScalar::one())]);
        assert!(matches!(r, Err(Error::RewriteBudget(3))));
    }

    #[test]
    fn spec_mismatch_detected() {
        let s = slq2();
        let foreign = full().gen("c2").unwrap();
        assert!(matches!(s.multiply(&foreign, &foreign), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn render_delta() {
        let s = slq2();
        let delta = q_determinant(&s, T_NAMES, &q()).unwrap();
        assert_eq!(s.render(&delta), "a*d - q*b*c");
        assert_eq!(s.render(&NCPoly::zero()), "0");
        assert_eq!(s.render(&s.word(&["d", "a"]).unwrap()), "a*d + (-q + q^-1)*b*c");
    }

    #[test]
    fn json_roundtrip() {
        let s = slq2();
        let p = s.word(&["d", "c", "a"]).unwrap();
        assert_eq!(s.from_json(&s.to_json(&p)).unwrap(), p);
    }
}
