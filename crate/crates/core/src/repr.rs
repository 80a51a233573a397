//! Spin-j tower on the quantum plane: monomial vectors, their representation
//! matrices (by direct expansion and by closed formula), the quadratic
//! invariants and the graded binomial identity.
//!
//! Half-integers are passed doubled: `j2 = 2j`, `m2 = 2m`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ncalg::{specs, AlgebraSpec, GeneratorSort, NCPoly, Word};
use crate::qcoeff::{
    basic_factorial_in, classical_factorial, eps_power, eps_power_inv, neg_q_power, q_binomial,
    GaussRat, LaurentScalar,
};
use crate::spinor::NCMatrix;

/// Largest `2j` accepted by the expansion routines.
pub const MAX_J2: i64 = 6;

/// Lower spinor on the quantum plane `c2 c1 = q c1 c2`.
pub const CHI: [&str; 2] = ["c1", "c2"];
/// Its tilde partner, same relation.
pub const XI: [&str; 2] = ["e1", "e2"];

/// `SL_q(2)` with the two planes `e1, e2` and `c1, c2`; the planes commute
/// with each other and with the matrix entries.
pub fn repr_spec() -> AlgebraSpec {
    repr_spec_with(specs::da_coefficient())
}

pub fn repr_spec_with(da_coeff: LaurentScalar) -> AlgebraSpec {
    let mut b = AlgebraSpec::builder("repr");
    for n in specs::T_NAMES {
        b = b.generator(n, GeneratorSort::MatrixElement);
    }
    for n in XI.iter().chain(CHI.iter()) {
        b = b.generator(n, GeneratorSort::SpinorComponent);
    }
    let b = specs::quantum_matrix_rules(b, specs::T_NAMES, &LaurentScalar::q(), da_coeff);
    let b = specs::plane_rule(b, XI[0], XI[1], LaurentScalar::q());
    specs::plane_rule(b, CHI[0], CHI[1], LaurentScalar::q())
        .build()
        .expect("stock spec is valid")
}

pub const T1: [&str; 4] = ["a1", "b1", "c1'", "d1"];
pub const T2: [&str; 4] = ["a2", "b2", "c2'", "d2"];

/// Two commuting matrix copies `T1`, `T2` and the plane `c1, c2`.
pub fn doubled_repr_spec() -> AlgebraSpec {
    let mut b = AlgebraSpec::builder("repr2");
    for n in T1.iter().chain(T2.iter()) {
        b = b.generator(n, GeneratorSort::MatrixElement);
    }
    for n in CHI {
        b = b.generator(n, GeneratorSort::SpinorComponent);
    }
    let b = specs::quantum_matrix_rules(b, T1, &LaurentScalar::q(), specs::da_coefficient());
    let b = specs::quantum_matrix_rules(b, T2, &LaurentScalar::q(), specs::da_coefficient());
    specs::plane_rule(b, CHI[0], CHI[1], LaurentScalar::q())
        .build()
        .expect("stock spec is valid")
}

fn check_jm(j2: i64, m2: i64) -> Result<()> {
    if j2 < 0 || m2.abs() > j2 || (j2 - m2) % 2 != 0 {
        return Err(Error::OutOfRange(format!("(j, m) = ({}/2, {}/2)", j2, m2)));
    }
    Ok(())
}

fn check_bound(j2: i64) -> Result<()> {
    if !(0..=MAX_J2).contains(&j2) {
        return Err(Error::OutOfRange(format!("2j = {j2} outside 0..={MAX_J2}")));
    }
    Ok(())
}

/// `m = j, j-1, ..., -j` as doubled values.
pub fn m_values(j2: i64) -> Vec<i64> {
    (0..=j2).map(|k| j2 - 2 * k).collect()
}

/// Readings of the factorials in the normalizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorialConvention {
    Classical,
    /// `<n>` in base `q`.
    Basic,
    /// `<n>` in base `q^2`.
    BasicSquared,
    /// `<n>` in base `q^{-2}`.
    BasicInverseSquared,
    /// `[n] = (q^n - q^{-n})/(q - q^{-1})`.
    Symmetric,
}

impl FactorialConvention {
    pub const ALL: [FactorialConvention; 5] = [
        FactorialConvention::Classical,
        FactorialConvention::Basic,
        FactorialConvention::BasicSquared,
        FactorialConvention::BasicInverseSquared,
        FactorialConvention::Symmetric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FactorialConvention::Classical => "classical",
            FactorialConvention::Basic => "basic(q)",
            FactorialConvention::BasicSquared => "basic(q^2)",
            FactorialConvention::BasicInverseSquared => "basic(q^-2)",
            FactorialConvention::Symmetric => "symmetric",
        }
    }

    pub fn factorial(&self, n: i64) -> Result<LaurentScalar> {
        match self {
            FactorialConvention::Classical => classical_factorial(n),
            FactorialConvention::Basic => basic_factorial_in(n, &LaurentScalar::q()),
            FactorialConvention::BasicSquared => basic_factorial_in(n, &LaurentScalar::q_pow(2)),
            FactorialConvention::BasicInverseSquared => basic_factorial_in(n, &LaurentScalar::q_pow(-2)),
            // [n]! = q^{-n(n-1)/2} <n>_{q^2}!
            FactorialConvention::Symmetric => {
                Ok(basic_factorial_in(n, &LaurentScalar::q_pow(2))?.shift(-(n * (n - 1)) as i32))
            }
        }
    }

    /// `n! / (k! (n-k)!)`, exact.
    pub fn binomial(&self, n: i64, k: i64) -> Result<LaurentScalar> {
        match self {
            FactorialConvention::Classical => {
                let num = classical_factorial(n)?;
                let den = &classical_factorial(k)? * &classical_factorial(n - k)?;
                num.div_exact(&den)
            }
            FactorialConvention::Basic => q_binomial(n, k, &LaurentScalar::q()),
            FactorialConvention::BasicSquared => q_binomial(n, k, &LaurentScalar::q_pow(2)),
            FactorialConvention::BasicInverseSquared => q_binomial(n, k, &LaurentScalar::q_pow(-2)),
            FactorialConvention::Symmetric => {
                Ok(q_binomial(n, k, &LaurentScalar::q_pow(2))?.shift(-(2 * k * (n - k)) as i32))
            }
        }
    }
}

impl fmt::Display for FactorialConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Prefactor attached to the tilde vector: the printed `eps(q|j-m)`, or the
/// inverted `eps(q^{-1}|j-m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TildePrefactor {
    Printed,
    Inverted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReprConvention {
    pub factorial: FactorialConvention,
    pub tilde: TildePrefactor,
}

impl ReprConvention {
    pub fn printed(factorial: FactorialConvention) -> Self {
        ReprConvention {
            factorial,
            tilde: TildePrefactor::Printed,
        }
    }
}

impl Default for ReprConvention {
    fn default() -> Self {
        ReprConvention::printed(FactorialConvention::Classical)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Tilde,
}

/// Unnormalized spin-j vector with its exact squared normalizations.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinVector {
    pub j2: i64,
    pub variant: Variant,
    /// Indexed by `m = j, j-1, ..., -j`.
    pub components: Vec<NCPoly>,
    pub norm_sq: Vec<LaurentScalar>,
}

fn power_word(spec: &AlgebraSpec, parts: &[(&str, i64)]) -> Result<NCPoly> {
    let mut w = Vec::new();
    for (name, k) in parts {
        let g = spec.index_of(name)?;
        w.extend(std::iter::repeat_n(g, *k as usize));
    }
    spec.normal_order_terms([(Word(w), LaurentScalar::one())])
}

/// Prefactor of component `m` (without normalization).
pub fn prefactor(j2: i64, m2: i64, variant: Variant, tilde: TildePrefactor) -> LaurentScalar {
    let jp = (j2 + m2) / 2;
    let jm = (j2 - m2) / 2;
    match (variant, tilde) {
        (Variant::Plain, _) => eps_power_inv(jp),
        (Variant::Tilde, TildePrefactor::Printed) => eps_power(jm),
        (Variant::Tilde, TildePrefactor::Inverted) => eps_power_inv(jm),
    }
}

/// Component `m`: plain `eps(q^{-1}|j+m) s2^{j+m} s1^{j-m}`, tilde
/// `eps(q|j-m) s1^{j+m} s2^{j-m}`, for the plane `names = [s1, s2]`.
pub fn vector_v(
    spec: &AlgebraSpec,
    names: [&str; 2],
    j2: i64,
    m2: i64,
    variant: Variant,
    conv: &ReprConvention,
) -> Result<(NCPoly, LaurentScalar)> {
    check_jm(j2, m2)?;
    let jp = (j2 + m2) / 2;
    let jm = (j2 - m2) / 2;
    let word = match variant {
        Variant::Plain => power_word(spec, &[(names[1], jp), (names[0], jm)])?,
        Variant::Tilde => power_word(spec, &[(names[0], jp), (names[1], jm)])?,
    };
    let pre = prefactor(j2, m2, variant, conv.tilde);
    let norm = &conv.factorial.factorial(jp)? * &conv.factorial.factorial(jm)?;
    Ok((word.scale(&pre), norm))
}

pub fn spin_vector(
    spec: &AlgebraSpec,
    names: [&str; 2],
    j2: i64,
    variant: Variant,
    conv: &ReprConvention,
) -> Result<SpinVector> {
    let mut components = Vec::new();
    let mut norm_sq = Vec::new();
    for m2 in m_values(j2) {
        let (c, n) = vector_v(spec, names, j2, m2, variant, conv)?;
        components.push(c);
        norm_sq.push(n);
    }
    Ok(SpinVector {
        j2,
        variant,
        components,
        norm_sq,
    })
}

/// Column action on `(s2, s1)`: `s2 -> t00 s2 + t01 s1`, `s1 -> t10 s2 + t11 s1`.
pub fn column_images(spec: &AlgebraSpec, t: &NCMatrix, names: [&str; 2]) -> Result<HashMap<u16, NCPoly>> {
    let s1 = spec.gen(names[0])?;
    let s2 = spec.gen(names[1])?;
    let img2 = &spec.multiply(t.get(0, 0), &s2)? + &spec.multiply(t.get(0, 1), &s1)?;
    let img1 = &spec.multiply(t.get(1, 0), &s2)? + &spec.multiply(t.get(1, 1), &s1)?;
    let mut out = HashMap::new();
    out.insert(spec.index_of(names[1])?, img2);
    out.insert(spec.index_of(names[0])?, img1);
    Ok(out)
}

fn is_spinor(spec: &AlgebraSpec, g: u16) -> bool {
    spec.generators()[g as usize].sort == GeneratorSort::SpinorComponent
}

/// Splits every word as (matrix part, spinor part) and groups by spinor part.
fn group_by_spinor_word(spec: &AlgebraSpec, p: &NCPoly) -> BTreeMap<Word, NCPoly> {
    let mut out: BTreeMap<Word, NCPoly> = BTreeMap::new();
    for (w, c) in p.terms() {
        let cut = w.0.iter().position(|&g| is_spinor(spec, g)).unwrap_or(w.len());
        let head = Word(w.0[..cut].to_vec());
        let tail = Word(w.0[cut..].to_vec());
        let slot = out.entry(tail).or_default();
        *slot = &*slot + &NCPoly::term(c.clone(), head);
    }
    out
}

/// Where a representation matrix came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Derived,
    Formula,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::Derived => "derived",
            Provenance::Formula => "formula",
        }
    }
}

/// Representation matrix on the unnormalized basis, rows and columns ordered
/// `m = j .. -j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DMatrix {
    pub j2: i64,
    pub entries: NCMatrix,
    pub norm_sq: Vec<LaurentScalar>,
    pub provenance: Provenance,
}

pub fn j_label(j2: i64) -> String {
    if j2 % 2 == 0 {
        (j2 / 2).to_string()
    } else {
        format!("{j2}/2")
    }
}

impl DMatrix {
    pub fn dim(&self) -> usize {
        (self.j2 + 1) as usize
    }

    pub fn to_json(&self) -> Value {
        json!({
            "j": j_label(self.j2),
            "basis": "unnormalized",
            "entries": self.entries.to_json()["entries"].clone(),
            "norm_sq": self.norm_sq.iter().map(LaurentScalar::to_json).collect::<Vec<_>>(),
            "provenance": self.provenance.name(),
        })
    }
}

/// `V_m(T v) = sum_{m'} D(m, m') V_{m'}(v)` for the plain vector on `names`,
/// read off by PBW coefficient extraction.
pub fn derive_dmatrix_in(spec: &Arc<AlgebraSpec>, t: &NCMatrix, names: [&str; 2], j2: i64) -> Result<DMatrix> {
    check_bound(j2)?;
    let conv = ReprConvention::default();
    let basis = spin_vector(spec, names, j2, Variant::Plain, &conv)?;
    let images = column_images(spec, t, names)?;
    let n = basis.components.len();
    // each basis vector is a single word: remember word -> (index, coefficient)
    let mut lookup: HashMap<Word, (usize, LaurentScalar)> = HashMap::new();
    for (k, v) in basis.components.iter().enumerate() {
        let (w, c) = v
            .terms()
            .next()
            .map(|(w, c)| (w.clone(), c.clone()))
            .ok_or_else(|| Error::Residual("empty basis vector".into()))?;
        lookup.insert(w, (k, c));
    }
    let mut entries = vec![NCPoly::zero(); n * n];
    for (row, v) in basis.components.iter().enumerate() {
        let image = spec.substitute(v, &images)?;
        for (tail, head) in group_by_spinor_word(spec, &image) {
            let (col, c) = lookup
                .get(&tail)
                .ok_or_else(|| Error::Residual(format!("word outside the spin-{} basis", j_label(j2))))?;
            let inv = c
                .inverse()
                .ok_or_else(|| Error::InexactDivision("basis prefactor is not a unit".into()))?;
            entries[row * n + col] = &entries[row * n + col] + &head.scale(&inv);
        }
    }
    Ok(DMatrix {
        j2,
        entries: NCMatrix::new(spec, n, n, entries)?,
        norm_sq: basis.norm_sq,
        provenance: Provenance::Derived,
    })
}

/// [`derive_dmatrix_in`] for the generator matrix of [`repr_spec`].
pub fn derive_dmatrix(j2: i64) -> Result<DMatrix> {
    let spec = Arc::new(repr_spec());
    let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES)?;
    derive_dmatrix_in(&spec, &t, CHI, j2)
}

/// `Vt'_m = sum_{m'} Vt_{m'} Dt(m', m)` for the tilde vector on `names`
/// (rows `m'`, columns `m`).
pub fn derive_tilde_dmatrix_in(
    spec: &Arc<AlgebraSpec>,
    t: &NCMatrix,
    names: [&str; 2],
    j2: i64,
    conv: &ReprConvention,
) -> Result<DMatrix> {
    check_bound(j2)?;
    let basis = spin_vector(spec, names, j2, Variant::Tilde, conv)?;
    let images = column_images(spec, t, names)?;
    let n = basis.components.len();
    let mut lookup: HashMap<Word, (usize, LaurentScalar)> = HashMap::new();
    for (k, v) in basis.components.iter().enumerate() {
        let (w, c) = v.terms().next().map(|(w, c)| (w.clone(), c.clone())).unwrap();
        lookup.insert(w, (k, c));
    }
    let mut entries = vec![NCPoly::zero(); n * n];
    for (col, v) in basis.components.iter().enumerate() {
        let image = spec.substitute(v, &images)?;
        for (tail, head) in group_by_spinor_word(spec, &image) {
            let (row, c) = lookup
                .get(&tail)
                .ok_or_else(|| Error::Residual("word outside the tilde basis".into()))?;
            let inv = c.inverse().ok_or_else(|| Error::InexactDivision("prefactor".into()))?;
            entries[row * n + col] = &entries[row * n + col] + &head.scale(&inv);
        }
    }
    Ok(DMatrix {
        j2,
        entries: NCMatrix::new(spec, n, n, entries)?,
        norm_sq: basis.norm_sq,
        provenance: Provenance::Derived,
    })
}

/// Exponent `sigma(j, m, m', t)` as a quadratic form with rational
/// coefficients over the monomials listed in [`QuadForm::MONOMIALS`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    pub coeffs: [BigRational; 15],
}

impl QuadForm {
    /// Monomials in `(j, m, m', t)`, index order of `coeffs`.
    pub const MONOMIALS: [&'static str; 15] = [
        "1", "j", "m", "m'", "t", "j^2", "m^2", "m'^2", "t^2", "j*m", "j*m'", "j*t", "m*m'", "m*t", "m'*t",
    ];

    pub fn zero() -> Self {
        QuadForm {
            coeffs: std::array::from_fn(|_| BigRational::zero()),
        }
    }

    pub fn from_ints(c: [i64; 15]) -> Self {
        QuadForm {
            coeffs: std::array::from_fn(|k| BigRational::from_integer(BigInt::from(c[k]))),
        }
    }

    /// Values of the monomials at doubled arguments.
    pub fn features(j2: i64, m2: i64, mp2: i64, t: i64) -> [BigRational; 15] {
        let h = |x: i64| BigRational::new(BigInt::from(x), BigInt::from(2));
        let (j, m, mp, t) = (h(j2), h(m2), h(mp2), BigRational::from_integer(BigInt::from(t)));
        [
            BigRational::from_integer(BigInt::from(1)),
            j.clone(),
            m.clone(),
            mp.clone(),
            t.clone(),
            &j * &j,
            &m * &m,
            &mp * &mp,
            &t * &t,
            &j * &m,
            &j * &mp,
            &j * &t,
            &m * &mp,
            &m * &t,
            &mp * &t,
        ]
    }

    pub fn eval(&self, j2: i64, m2: i64, mp2: i64, t: i64) -> BigRational {
        let f = QuadForm::features(j2, m2, mp2, t);
        self.coeffs.iter().zip(f.iter()).fold(BigRational::zero(), |acc, (c, x)| acc + c * x)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, m) in self.coeffs.iter().zip(QuadForm::MONOMIALS) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*{m}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// The undetermined pieces of the closed formula: the exponent `sigma` and
/// the normalization `N` (always 1 on the unnormalized basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaConvention {
    pub sigma: QuadForm,
}

impl FormulaConvention {
    /// `sigma = t^2 + t (m + m') + 2 m'^2 - m^2`.
    pub fn frozen() -> Self {
        let mut c = [0i64; 15];
        c[8] = 1; // t^2
        c[13] = 1; // m t
        c[14] = 1; // m' t
        c[7] = 2; // m'^2
        c[6] = -1; // m^2
        FormulaConvention {
            sigma: QuadForm::from_ints(c),
        }
    }
}

/// Range of the summation index for entry `(m, m')`.
pub fn t_range(j2: i64, m2: i64, mp2: i64) -> std::ops::RangeInclusive<i64> {
    let jm = (j2 - m2) / 2;
    let jmp = (j2 - mp2) / 2;
    let lo = 0.max(-(m2 + mp2) / 2);
    let hi = jm.min(jmp);
    lo..=hi
}

/// The exponent of `q` fixed by `eps(q|j-m)/eps(q|j-m')`, in units of `q^{1/2}`.
fn formula_prefactor_s_exp(j2: i64, m2: i64, mp2: i64) -> i32 {
    let jm = (j2 - m2) / 2;
    let jmp = (j2 - mp2) / 2;
    (jm * (jm - 1) - jmp * (jmp - 1)) as i32
}

/// Total exponent `sigma - j^2` of the remaining power of `q`. Only the sum
/// needs to be a half-integer: `q^{-j^2}` alone is a quarter power for odd `2j`.
pub fn formula_exponent(conv: &FormulaConvention, j2: i64, m2: i64, mp2: i64, t: i64) -> BigRational {
    let j = BigRational::new(BigInt::from(j2), BigInt::from(2));
    conv.sigma.eval(j2, m2, mp2, t) - &j * &j
}

/// The summand without `q^{sigma - j^2}`: the epsilon ratio, the two binomials
/// in base `q^2`, and the normal-ordered monomial
/// `b^{j-m'-t} a^{m+m'+t} d^t c^{j-m-t}`.
pub fn formula_summand(spec: &AlgebraSpec, j2: i64, m2: i64, mp2: i64, t: i64) -> Result<NCPoly> {
    let jm = (j2 - m2) / 2;
    let jp = (j2 + m2) / 2;
    let jmp = (j2 - mp2) / 2;
    let q2 = LaurentScalar::q_pow(2);
    let coeff = &q_binomial(jp, jmp - t, &q2)? * &q_binomial(jm, t, &q2)?;
    let coeff = coeff.shift(formula_prefactor_s_exp(j2, m2, mp2));
    let word = power_word(
        spec,
        &[("b", jmp - t), ("a", (m2 + mp2) / 2 + t), ("d", t), ("c", jm - t)],
    )?;
    Ok(word.scale(&coeff))
}

/// The closed-form matrix with the given convention.
pub fn formula_dmatrix(j2: i64, conv: &FormulaConvention) -> Result<DMatrix> {
    check_bound(j2)?;
    let spec = Arc::new(repr_spec());
    let ms = m_values(j2);
    let n = ms.len();
    let mut entries = Vec::with_capacity(n * n);
    for &m2 in &ms {
        for &mp2 in &ms {
            let mut acc = NCPoly::zero();
            for t in t_range(j2, m2, mp2) {
                let total = formula_exponent(conv, j2, m2, mp2, t);
                let doubled = &total * BigRational::from_integer(BigInt::from(2));
                let s_exp = Some(doubled.clone())
                    .filter(BigRational::is_integer)
                    .and_then(|d| d.to_integer().to_i32())
                    .ok_or_else(|| Error::OutOfRange(format!("exponent {total} is not a half-integer")))?;
                acc = &acc + &formula_summand(&spec, j2, m2, mp2, t)?.scale(&LaurentScalar::s_pow(s_exp));
            }
            entries.push(acc);
        }
    }
    let norm_sq = spin_vector(&spec, CHI, j2, Variant::Plain, &ReprConvention::default())?.norm_sq;
    Ok(DMatrix {
        j2,
        entries: NCMatrix::new(&spec, n, n, entries)?,
        norm_sq,
        provenance: Provenance::Formula,
    })
}

/// Entrywise residuals `x - y` that are nonzero, with their positions.
pub fn compare_dmatrices(x: &DMatrix, y: &DMatrix) -> Result<Vec<(usize, usize, NCPoly)>> {
    if x.j2 != y.j2 {
        return Err(Error::Dimension("different spins".into()));
    }
    let n = x.dim();
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let d = x.entries.get(r, c) - y.entries.get(r, c);
            if !d.is_zero() {
                out.push((r, c, d));
            }
        }
    }
    Ok(out)
}

/// Diagonal `x^j, x^{j-1}, ..., x^{-j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub j2: i64,
    pub diagonal: Vec<LaurentScalar>,
}

/// `C^j(-q)` on the branch `(-q)^{1/2} = i q^{1/2}`.
pub fn c_matrix_neg_q(j2: i64) -> CMatrix {
    CMatrix {
        j2,
        diagonal: m_values(j2).into_iter().map(|m2| neg_q_power(m2 as i32)).collect(),
    }
}

/// `C^j(q)`.
pub fn c_matrix(j2: i64) -> CMatrix {
    CMatrix {
        j2,
        diagonal: m_values(j2).into_iter().map(|m2| LaurentScalar::s_pow(m2 as i32)).collect(),
    }
}

/// `(2j)! * sum_m Vt_m C^j(-q)_m V_m / norm_m`, i.e. the invariant scaled by
/// the top factorial so that only binomials appear. `tilde` and `plain` name
/// the two planes (they may coincide).
pub fn q_sum(
    spec: &AlgebraSpec,
    tilde: [&str; 2],
    plain: [&str; 2],
    j2: i64,
    conv: &ReprConvention,
) -> Result<NCPoly> {
    check_bound(j2)?;
    let c = c_matrix_neg_q(j2);
    let mut acc = NCPoly::zero();
    for (k, m2) in m_values(j2).into_iter().enumerate() {
        let (vt, _) = vector_v(spec, tilde, j2, m2, Variant::Tilde, conv)?;
        let (v, _) = vector_v(spec, plain, j2, m2, Variant::Plain, conv)?;
        let weight = &c.diagonal[k] * &conv.factorial.binomial(j2, (j2 + m2) / 2)?;
        acc = &acc + &spec.multiply(&vt, &v)?.scale(&weight);
    }
    Ok(acc)
}

/// The invariant for spin `j` pairing the tilde plane `e1, e2` with `c1, c2`.
pub fn invariant_q(j2: i64, conv: &ReprConvention) -> Result<NCPoly> {
    q_sum(&repr_spec(), XI, CHI, j2, conv)
}

/// `Q(T) - Q` after unimodular reduction, with both planes transformed by the
/// same generator matrix.
pub fn q_invariance_residual(j2: i64, conv: &ReprConvention) -> Result<NCPoly> {
    let spec = Arc::new(repr_spec());
    let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES)?;
    let q0 = q_sum(&spec, XI, CHI, j2, conv)?;
    let mut images = column_images(&spec, &t, XI)?;
    images.extend(column_images(&spec, &t, CHI)?);
    let moved = spec.substitute(&q0, &images)?;
    let blk = specs::t_block(&spec)?;
    spec.reduce_unimodular(&(&moved - &q0), &blk)
}

/// Outcome of the graded binomial identity for one `2j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionLine {
    pub j2: i64,
    /// Conventions under which `(i chi eps^ chi)^{2j} = (2j)! sum Vt V (-q)^m`.
    pub closing: Vec<FactorialConvention>,
    /// Residual for each convention tried.
    pub residuals: Vec<(FactorialConvention, NCPoly)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub tilde: TildePrefactor,
    pub lines: Vec<ExpansionLine>,
    /// `c1 c2 . c2 c1 = c2 c1 . c1 c2` on the plane.
    pub lemma: bool,
}

impl ExpansionReport {
    /// A convention closing every line, if one exists.
    pub fn resolved(&self) -> Option<FactorialConvention> {
        FactorialConvention::ALL
            .into_iter()
            .find(|c| self.lines.iter().all(|l| l.closing.contains(c)))
    }
}

/// `chi_A eps^{AB} chi_B` on the lower plane `c1, c2`.
pub fn lower_form(spec: &AlgebraSpec, names: [&str; 2]) -> Result<NCPoly> {
    let eps_hat = crate::spinor::EpsilonTensor::contravariant();
    let x = [spec.gen(names[0])?, spec.gen(names[1])?];
    let mut acc = NCPoly::zero();
    for a in 0..2 {
        for b in 0..2 {
            let e = eps_hat.at(a, b);
            if !e.is_zero() {
                acc = &acc + &spec.multiply(&x[a], &x[b])?.scale(e);
            }
        }
    }
    Ok(acc)
}

/// Expands `(i chi eps^ chi)^{2j}` on the plane and compares it with
/// `(2j)! sum_m Vt(jm) V(jm) (-q)^m` built from the same plane.
pub fn check_expansion(j2_max: i64, tilde: TildePrefactor) -> Result<ExpansionReport> {
    check_bound(j2_max)?;
    let spec = repr_spec();
    let base = lower_form(&spec, CHI)?.scale(&LaurentScalar::i());
    let mut lines = Vec::new();
    for j2 in 0..=j2_max {
        let lhs = spec.pow(&base, j2 as u32)?;
        let mut closing = Vec::new();
        let mut residuals = Vec::new();
        for f in FactorialConvention::ALL {
            let conv = ReprConvention { factorial: f, tilde };
            let rhs = q_sum(&spec, CHI, CHI, j2, &conv)?;
            let r = &lhs - &rhs;
            if r.is_zero() {
                closing.push(f);
            }
            residuals.push((f, r));
        }
        lines.push(ExpansionLine { j2, closing, residuals });
    }
    let w12 = spec.word(&[CHI[0], CHI[1]])?;
    let w21 = spec.word(&[CHI[1], CHI[0]])?;
    let lemma = spec.multiply(&w12, &w21)? == spec.multiply(&w21, &w12)?;
    Ok(ExpansionReport { tilde, lines, lemma })
}

/// Specializes every coefficient of a matrix at `q = 1` and evaluates the
/// generators numerically.
pub fn evaluate_at_one(
    m: &NCMatrix,
    assignment: &HashMap<String, num_complex::Complex64>,
) -> Result<Vec<Vec<num_complex::Complex64>>> {
    let mut out = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let mut row = Vec::with_capacity(m.cols());
        for c in 0..m.cols() {
            row.push(m.spec().substitute_numeric(m.get(r, c), assignment, 1.0)?);
        }
        out.push(row);
    }
    Ok(out)
}

/// `true` when all coefficients of `p` are Gaussian rationals with zero
/// `q`-dependence after evaluation at an exact `q`.
pub fn specialize_poly(p: &NCPoly, q: &BigRational) -> Result<Vec<(Word, GaussRat)>> {
    p.terms().map(|(w, c)| Ok((w.clone(), c.specialize_exact(q)?))).collect()
}

/// Classical spin-j matrix of a numeric 2x2 matrix: the symmetric power on
/// commuting `x1, x2` with `x2 -> a x2 + b x1`, `x1 -> c x2 + d x1` and
/// `V_m = x2^{j+m} x1^{j-m}`. Rows and columns ordered `m = j .. -j`.
pub fn symmetric_power(j2: i64, t: &crate::spinor::numeric::CMat2) -> Vec<Vec<num_complex::Complex64>> {
    use num_complex::Complex64;
    // polynomials in x2 / x1 of fixed total degree, indexed by the power of x2
    let mul = |p: &[Complex64], r: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); p.len() + r.len() - 1];
        for (i, x) in p.iter().enumerate() {
            for (k, y) in r.iter().enumerate() {
                out[i + k] += x * y;
            }
        }
        out
    };
    // index 0 = x1, index 1 = x2
    let img2 = [t[0][1], t[0][0]];
    let img1 = [t[1][1], t[1][0]];
    let mut rows = Vec::new();
    for m2 in m_values(j2) {
        let jp = (j2 + m2) / 2;
        let jm = (j2 - m2) / 2;
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..jp {
            p = mul(&p, &img2);
        }
        for _ in 0..jm {
            p = mul(&p, &img1);
        }
        // column m' collects x2^{j+m'}
        rows.push(m_values(j2).into_iter().map(|mp2| p[((j2 + mp2) / 2) as usize]).collect());
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_examples() {
        let spec = repr_spec();
        let conv = ReprConvention::default();
        let (v, n) = vector_v(&spec, CHI, 1, 1, Variant::Plain, &conv).unwrap();
        assert_eq!(v, spec.gen("c2").unwrap());
        assert!(n.is_one());
        let (v, _) = vector_v(&spec, CHI, 1, -1, Variant::Plain, &conv).unwrap();
        assert_eq!(v, spec.gen("c1").unwrap());
        let (v, n) = vector_v(&spec, CHI, 2, 0, Variant::Plain, &conv).unwrap();
        assert_eq!(v, spec.word(&["c2", "c1"]).unwrap());
        assert!(n.is_one());
        assert!(vector_v(&spec, CHI, 2, 1, Variant::Plain, &conv).is_err());
    }

    #[test]
    fn spin_half_is_the_generator_matrix() {
        let d = derive_dmatrix(1).unwrap();
        let spec = d.entries.spec().clone();
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        assert_eq!(d.entries, t);
    }

    #[test]
    fn spin_one_entries_are_quadratic() {
        let d = derive_dmatrix(2).unwrap();
        for e in d.entries.entries() {
            assert!(e.terms().all(|(w, _)| w.len() == 2));
        }
        let spec = d.entries.spec();
        assert_eq!(d.entries.get(0, 0), &spec.word(&["a", "a"]).unwrap());
    }

    #[test]
    fn factorial_conventions() {
        for f in FactorialConvention::ALL {
            assert!(f.factorial(0).unwrap().is_one());
            assert!(f.binomial(4, 0).unwrap().is_one());
            let one = BigRational::from_integer(BigInt::from(1));
            let b = f.binomial(4, 2).unwrap().specialize_exact(&one).unwrap();
            assert_eq!(b, GaussRat::from_int(6), "{f}");
        }
        let sym = FactorialConvention::Symmetric.binomial(2, 1).unwrap();
        assert_eq!(sym, &LaurentScalar::q() + &LaurentScalar::q_pow(-1));
    }

    #[test]
    fn expansion_low_grades() {
        let r = check_expansion(1, TildePrefactor::Printed).unwrap();
        assert!(r.lemma);
        assert_eq!(r.lines[0].closing.len(), FactorialConvention::ALL.len());
        assert_eq!(r.lines[1].closing.len(), FactorialConvention::ALL.len());
    }

    #[test]
    fn spin_half_invariant() {
        for f in FactorialConvention::ALL {
            assert!(q_invariance_residual(1, &ReprConvention::printed(f)).unwrap().is_zero());
        }
    }

    #[test]
    fn bound_enforced() {
        assert!(derive_dmatrix(7).is_err());
        assert!(derive_dmatrix(-1).is_err());
    }

    #[test]
    fn dmatrix_json_shape() {
        let d = derive_dmatrix(1).unwrap();
        let v = d.to_json();
        assert_eq!(v["j"], "1/2");
        assert_eq!(v["basis"], "unnormalized");
        assert_eq!(v["entries"].as_array().unwrap().len(), 2);
    }
}
