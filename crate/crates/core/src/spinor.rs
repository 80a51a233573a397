//! Epsilon-metric spinor calculus over an [`AlgebraSpec`].
//!
//! Index convention: an [`NCMatrix`] entry `(r, c)` is `T^r_c` with the
//! generator matrix `[[a, b], [c, d]]`. The default spinor action is the right
//! action `xi'^C = xi^A T[A][C]`; see [`TransformMode`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ncalg::{AlgebraSpec, MatrixBlock, NCPoly, Word};
use crate::qcoeff::LaurentScalar;

/// A 2x2 matrix of scalars.
pub type Mat2 = [[LaurentScalar; 2]; 2];

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |r: usize, c: usize| &(&x[r][0] * &y[0][c]) + &(&x[r][1] * &y[1][c]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat2_transpose(x: &Mat2) -> Mat2 {
    [
        [x[0][0].clone(), x[1][0].clone()],
        [x[0][1].clone(), x[1][1].clone()],
    ]
}

pub fn mat2_diag(x: LaurentScalar, y: LaurentScalar) -> Mat2 {
    [[x, LaurentScalar::zero()], [LaurentScalar::zero(), y]]
}

pub fn mat2_identity() -> Mat2 {
    mat2_diag(LaurentScalar::one(), LaurentScalar::one())
}

pub fn mat2_scale(x: &Mat2, k: &LaurentScalar) -> Mat2 {
    [
        [&x[0][0] * k, &x[0][1] * k],
        [&x[1][0] * k, &x[1][1] * k],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsVariant {
    Covariant,
    Contravariant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonTensor {
    pub variant: EpsVariant,
    pub entries: Mat2,
}

impl EpsilonTensor {
    /// `eps_{12} = q^{-1/2}`, `eps_{21} = -q^{1/2}`.
    pub fn covariant() -> Self {
        EpsilonTensor {
            variant: EpsVariant::Covariant,
            entries: [
                [LaurentScalar::zero(), LaurentScalar::s_pow(-1)],
                [-LaurentScalar::s_pow(1), LaurentScalar::zero()],
            ],
        }
    }

    /// `eps^{12} = q^{1/2}`, `eps^{21} = -q^{-1/2}`.
    pub fn contravariant() -> Self {
        EpsilonTensor {
            variant: EpsVariant::Contravariant,
            entries: [
                [LaurentScalar::zero(), LaurentScalar::s_pow(1)],
                [-LaurentScalar::s_pow(-1), LaurentScalar::zero()],
            ],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &LaurentScalar {
        &self.entries[r][c]
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.entries
    }

    pub fn transpose(&self) -> Mat2 {
        mat2_transpose(&self.entries)
    }

    /// The same tensor with `q -> q^{-1}`.
    pub fn invert_q(&self) -> Mat2 {
        let f = |x: &LaurentScalar| x.invert_q();
        [
            [f(&self.entries[0][0]), f(&self.entries[0][1])],
            [f(&self.entries[1][0]), f(&self.entries[1][1])],
        ]
    }

    pub fn with_negated_entry(&self, row: usize, col: usize) -> Self {
        let mut out = self.clone();
        out.entries[row][col] = -&out.entries[row][col];
        out
    }

    pub fn to_ncmatrix(&self, spec: &Arc<AlgebraSpec>) -> NCMatrix {
        NCMatrix::from_scalars(spec, 2, 2, self.entries.iter().flatten().cloned().collect())
            .expect("2x2")
    }
}

/// A rectangular matrix of polynomials sharing one algebra.
#[derive(Clone, Debug)]
pub struct NCMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<NCPoly>,
    spec: Arc<AlgebraSpec>,
}

impl PartialEq for NCMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl NCMatrix {
    pub fn new(spec: &Arc<AlgebraSpec>, rows: usize, cols: usize, entries: Vec<NCPoly>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(NCMatrix {
            rows,
            cols,
            entries,
            spec: Arc::clone(spec),
        })
    }

    pub fn from_scalars(
        spec: &Arc<AlgebraSpec>,
        rows: usize,
        cols: usize,
        entries: Vec<LaurentScalar>,
    ) -> Result<Self> {
        NCMatrix::new(spec, rows, cols, entries.into_iter().map(NCPoly::scalar).collect())
    }

    pub fn from_mat2(spec: &Arc<AlgebraSpec>, m: &Mat2) -> Self {
        NCMatrix::from_scalars(spec, 2, 2, m.iter().flatten().cloned().collect()).expect("2x2")
    }

    /// A matrix of generators given by name, row-major.
    pub fn from_generators(spec: &Arc<AlgebraSpec>, rows: usize, cols: usize, names: &[&str]) -> Result<Self> {
        let entries = names.iter().map(|n| spec.gen(n)).collect::<Result<Vec<_>>>()?;
        NCMatrix::new(spec, rows, cols, entries)
    }

    /// `[[a, b], [c, d]]` for the four given generator names.
    pub fn generator_matrix(spec: &Arc<AlgebraSpec>, names: [&str; 4]) -> Result<Self> {
        NCMatrix::from_generators(spec, 2, 2, &names)
    }

    pub fn identity(spec: &Arc<AlgebraSpec>, n: usize) -> Self {
        let mut entries = vec![NCPoly::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = NCPoly::one();
        }
        NCMatrix::new(spec, n, n, entries).expect("square")
    }

    pub fn zeros(spec: &Arc<AlgebraSpec>, rows: usize, cols: usize) -> Self {
        NCMatrix::new(spec, rows, cols, vec![NCPoly::zero(); rows * cols]).expect("nonempty")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spec(&self) -> &Arc<AlgebraSpec> {
        &self.spec
    }

    pub fn get(&self, r: usize, c: usize) -> &NCPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: NCPoly) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn entries(&self) -> &[NCPoly] {
        &self.entries
    }

    fn same_spec(&self, other: &NCMatrix) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!(
                "`{}` vs `{}`",
                self.spec.name(),
                other.spec.name()
            )))
        }
    }

    pub fn mul(&self, other: &NCMatrix) -> Result<NCMatrix> {
        self.same_spec(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = NCPoly::zero();
                for k in 0..self.cols {
                    acc = &acc + &self.spec.multiply(self.get(r, k), other.get(k, c))?;
                }
                entries.push(acc);
            }
        }
        NCMatrix::new(&self.spec, self.rows, other.cols, entries)
    }

    fn zip(&self, other: &NCMatrix, f: impl Fn(&NCPoly, &NCPoly) -> NCPoly) -> Result<NCMatrix> {
        self.same_spec(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("shapes differ".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(x, y)| f(x, y)).collect();
        NCMatrix::new(&self.spec, self.rows, self.cols, entries)
    }

    pub fn add(&self, other: &NCMatrix) -> Result<NCMatrix> {
        self.zip(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &NCMatrix) -> Result<NCMatrix> {
        self.zip(other, |x, y| x - y)
    }

    pub fn scale(&self, k: &LaurentScalar) -> NCMatrix {
        self.map_entries(|p| p.scale(k))
    }

    pub fn map_entries(&self, f: impl Fn(&NCPoly) -> NCPoly) -> NCMatrix {
        NCMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
            spec: Arc::clone(&self.spec),
        }
    }

    pub fn try_map(&self, f: impl Fn(&NCPoly) -> Result<NCPoly>) -> Result<NCMatrix> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        NCMatrix::new(&self.spec, self.rows, self.cols, entries)
    }

    pub fn transpose(&self) -> NCMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        NCMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
            spec: Arc::clone(&self.spec),
        }
    }

    /// Entrywise star, then transpose.
    pub fn dagger(&self) -> Result<NCMatrix> {
        Ok(self.try_map(|p| star(&self.spec, p))?.transpose())
    }

    /// Entrywise image of generators under the bar pairing, without reversal
    /// or conjugation: `[[a,b],[c,d]] -> [[abar,bbar],[cbar,dbar]]`.
    pub fn bar(&self) -> Result<NCMatrix> {
        self.try_map(|p| rename_bar(&self.spec, p))
    }

    pub fn reduce_unimodular(&self, block: &MatrixBlock) -> Result<NCMatrix> {
        self.try_map(|p| self.spec.reduce_unimodular(p, block))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = self.get(r, c);
                    if r == c {
                        e == &NCPoly::one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(NCPoly::is_zero)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|r| Value::Array((0..self.cols).map(|c| self.spec.to_json(self.get(r, c))).collect()))
            .collect();
        json!({ "rows": self.rows, "cols": self.cols, "entries": rows })
    }

    pub fn from_json(spec: &Arc<AlgebraSpec>, v: &Value) -> Result<Self> {
        let dim = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Json(format!("missing `{k}`")))
        };
        let (rows, cols) = (dim("rows")?, dim("cols")?);
        let grid = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("missing `entries`".into()))?;
        let mut entries = Vec::new();
        for row in grid {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Json("row must be an array".into()))?;
            if row.len() != cols {
                return Err(Error::Dimension("ragged matrix".into()));
            }
            for e in row {
                entries.push(spec.from_json(e)?);
            }
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension("row count mismatch".into()));
        }
        NCMatrix::new(spec, rows, cols, entries)
    }
}

impl fmt::Display for NCMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|c| self.spec.render(self.get(r, c))).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn bar_partner(spec: &AlgebraSpec, g: u16) -> Result<u16> {
    let name = spec.generator_name(g);
    let partner = match name.strip_suffix("bar") {
        Some(base) => base.to_string(),
        None => format!("{name}bar"),
    };
    spec.index_of(&partner)
}

fn rename_bar(spec: &AlgebraSpec, p: &NCPoly) -> Result<NCPoly> {
    let mut raw = Vec::with_capacity(p.len());
    for (w, c) in p.terms() {
        let v = w.0.iter().map(|&g| bar_partner(spec, g)).collect::<Result<Vec<_>>>()?;
        raw.push((Word(v), c.clone()));
    }
    spec.normal_order_terms(raw)
}

/// The antilinear anti-involution exchanging each generator with its barred
/// partner: words are reversed and coefficients conjugated (q real).
pub fn star(spec: &AlgebraSpec, p: &NCPoly) -> Result<NCPoly> {
    let mut raw = Vec::with_capacity(p.len());
    for (w, c) in p.terms() {
        let v = w
            .0
            .iter()
            .rev()
            .map(|&g| bar_partner(spec, g))
            .collect::<Result<Vec<_>>>()?;
        raw.push((Word(v), c.conj()));
    }
    spec.normal_order_terms(raw)
}

/// The two extractions of the q-determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct QDet {
    /// From `M^t eps M = eps * det`.
    pub from_left: NCPoly,
    /// From `M eps M^t = eps * det`.
    pub from_right: NCPoly,
}

fn extract_det(m: &NCMatrix, eps: &EpsilonTensor, left: bool) -> Result<NCPoly> {
    let e = NCMatrix::from_mat2(m.spec(), eps.matrix());
    let prod = if left {
        m.transpose().mul(&e)?.mul(m)?
    } else {
        m.mul(&e)?.mul(&m.transpose())?
    };
    let pivot = eps
        .at(0, 1)
        .inverse()
        .ok_or_else(|| Error::InconsistentDeterminant("epsilon_12 is not a unit".into()))?;
    let det = prod.get(0, 1).scale(&pivot);
    let expected = e.map_entries(|x| x.clone()).try_map(|x| m.spec().multiply(x, &det))?;
    if prod != expected {
        return Err(Error::InconsistentDeterminant(format!(
            "{} is not proportional to epsilon",
            if left { "M^t eps M" } else { "M eps M^t" }
        )));
    }
    Ok(det)
}

/// Both extractions of `det_q M`; an error if either product is not a
/// multiple of epsilon.
pub fn q_det_pair(m: &NCMatrix, eps: &EpsilonTensor) -> Result<QDet> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension("q-determinant needs a 2x2 matrix".into()));
    }
    Ok(QDet {
        from_left: extract_det(m, eps, true)?,
        from_right: extract_det(m, eps, false)?,
    })
}

/// `det_q M`, requiring the two extractions to agree.
pub fn q_det(m: &NCMatrix, eps: &EpsilonTensor) -> Result<NCPoly> {
    let d = q_det_pair(m, eps)?;
    if d.from_left != d.from_right {
        return Err(Error::InconsistentDeterminant(format!(
            "{} vs {}",
            m.spec().render(&d.from_left),
            m.spec().render(&d.from_right)
        )));
    }
    Ok(d.from_left)
}

/// `S(T) = [[d, -q^{-1} b], [-q c, a]]` for `T = [[a, b], [c, d]]`.
pub fn antipode(t: &NCMatrix) -> Result<NCMatrix> {
    if t.rows() != 2 || t.cols() != 2 {
        return Err(Error::Dimension("antipode needs a 2x2 matrix".into()));
    }
    let entries = vec![
        t.get(1, 1).clone(),
        -&t.get(0, 1).scale(&LaurentScalar::q_pow(-1)),
        -&t.get(1, 0).scale(&LaurentScalar::q()),
        t.get(0, 0).clone(),
    ];
    NCMatrix::new(t.spec(), 2, 2, entries)
}

/// `-eps T eps`, the inverse of `T^t` when `det_q T = 1`.
pub fn transpose_inverse(t: &NCMatrix, eps: &EpsilonTensor) -> Result<NCMatrix> {
    let e = NCMatrix::from_mat2(t.spec(), eps.matrix());
    Ok(e.mul(t)?.mul(&e)?.scale(&LaurentScalar::from_int(-1)))
}

/// `T_A^C T_B^D eps_CD` with `T_A^C = T[A][C]`, i.e. `T eps T^t`.
pub fn epsilon_image(t: &NCMatrix, eps: &EpsilonTensor) -> Result<NCMatrix> {
    let e = NCMatrix::from_mat2(t.spec(), eps.matrix());
    t.mul(&e)?.mul(&t.transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinorExpr {
    pub components: [NCPoly; 2],
    pub variance: Variance,
    pub dotted: bool,
}

impl SpinorExpr {
    pub fn new(components: [NCPoly; 2], variance: Variance, dotted: bool) -> Self {
        SpinorExpr {
            components,
            variance,
            dotted,
        }
    }

    pub fn upper(c1: NCPoly, c2: NCPoly) -> Self {
        SpinorExpr::new([c1, c2], Variance::Upper, false)
    }

    pub fn lower(c1: NCPoly, c2: NCPoly) -> Self {
        SpinorExpr::new([c1, c2], Variance::Lower, false)
    }

    /// Components given by generator names.
    pub fn from_generators(spec: &AlgebraSpec, names: [&str; 2], variance: Variance) -> Result<Self> {
        Ok(SpinorExpr::new([spec.gen(names[0])?, spec.gen(names[1])?], variance, false))
    }

    pub fn dotted(mut self) -> Self {
        self.dotted = true;
        self
    }

    pub fn component(&self, i: usize) -> &NCPoly {
        &self.components[i]
    }
}

fn combine(m: &Mat2, v: &[NCPoly; 2], row_vector: bool) -> [NCPoly; 2] {
    // row_vector: out_B = sum_A v_A m[A][B]; otherwise out_A = sum_B m[A][B] v_B
    let out = |k: usize| {
        let (i0, i1) = if row_vector {
            (&m[0][k], &m[1][k])
        } else {
            (&m[k][0], &m[k][1])
        };
        &v[0].scale(i0) + &v[1].scale(i1)
    };
    [out(0), out(1)]
}

/// `xi_B = xi^A eps_AB`, or with `tilde` the other contraction
/// `chi~_A = eps_AB chi^B`.
pub fn lower_index(x: &SpinorExpr, eps: &EpsilonTensor, tilde: bool) -> Result<SpinorExpr> {
    if x.variance != Variance::Upper {
        return Err(Error::Dimension("lowering needs an upper spinor".into()));
    }
    Ok(SpinorExpr::new(
        combine(eps.matrix(), &x.components, !tilde),
        Variance::Lower,
        x.dotted,
    ))
}

/// `xi^B = eps^BA xi_A`, or with `tilde` `chi^C = chi~_A eps^AC`.
pub fn raise_index(x: &SpinorExpr, eps_hat: &EpsilonTensor, tilde: bool) -> Result<SpinorExpr> {
    if x.variance != Variance::Lower {
        return Err(Error::Dimension("raising needs a lower spinor".into()));
    }
    Ok(SpinorExpr::new(
        combine(eps_hat.matrix(), &x.components, tilde),
        Variance::Upper,
        x.dotted,
    ))
}

/// `xi^A eps_AB chi^B`, normal-ordered.
pub fn invariant_form(spec: &AlgebraSpec, xi: &SpinorExpr, chi: &SpinorExpr, eps: &EpsilonTensor) -> Result<NCPoly> {
    if xi.variance != Variance::Upper || chi.variance != Variance::Upper {
        return Err(Error::Dimension("invariant form pairs two upper spinors".into()));
    }
    let mut acc = NCPoly::zero();
    for a in 0..2 {
        for b in 0..2 {
            let e = eps.at(a, b);
            if e.is_zero() {
                continue;
            }
            acc = &acc + &spec.multiply(&xi.components[a], &chi.components[b])?.scale(e);
        }
    }
    Ok(acc)
}

/// `xi_B chi^B`.
pub fn contract(spec: &AlgebraSpec, lower: &SpinorExpr, upper: &SpinorExpr) -> Result<NCPoly> {
    if lower.variance != Variance::Lower || upper.variance != Variance::Upper {
        return Err(Error::Dimension("contraction pairs a lower with an upper spinor".into()));
    }
    let mut acc = NCPoly::zero();
    for b in 0..2 {
        acc = &acc + &spec.multiply(&lower.components[b], &upper.components[b])?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformMode {
    /// `xi'^C = xi^A T[A][C]` on upper spinors.
    Right,
    /// `xi'^A = T[A][C] xi^C` on upper spinors.
    Left,
    /// `xi'_B = xi_D (-eps T eps)[D][B]` on lower spinors.
    Covariant,
    /// Right action of the supplied (barred) matrix on dotted upper spinors.
    Conjugate,
}

/// Applies `t` to a spinor. Components are placed to the left of matrix
/// entries in every product.
pub fn transform(x: &SpinorExpr, t: &NCMatrix, mode: TransformMode, eps: &EpsilonTensor) -> Result<SpinorExpr> {
    if t.rows() != 2 || t.cols() != 2 {
        return Err(Error::Dimension("spinor transforms need a 2x2 matrix".into()));
    }
    let ok = match mode {
        TransformMode::Right | TransformMode::Left => x.variance == Variance::Upper && !x.dotted,
        TransformMode::Covariant => x.variance == Variance::Lower,
        TransformMode::Conjugate => x.variance == Variance::Upper && x.dotted,
    };
    if !ok {
        return Err(Error::Dimension(format!(
            "{mode:?} action does not apply to a {:?}{} spinor",
            x.variance,
            if x.dotted { " dotted" } else { "" }
        )));
    }
    let spec = t.spec();
    let m = match mode {
        TransformMode::Covariant => transpose_inverse(t, eps)?,
        _ => t.clone(),
    };
    let mut out = [NCPoly::zero(), NCPoly::zero()];
    for (k, slot) in out.iter_mut().enumerate() {
        for a in 0..2 {
            let entry = match mode {
                TransformMode::Left => m.get(k, a),
                _ => m.get(a, k),
            };
            *slot = &*slot + &spec.multiply(&x.components[a], entry)?;
        }
    }
    Ok(SpinorExpr::new(out, x.variance, x.dotted))
}

/// From `xi^A eps_AB chi^B = 0` for generic components, the ratio `lambda`
/// with `xi^1 chi^2 = lambda xi^2 chi^1`.
pub fn plane_relation_from_form(
    spec: &AlgebraSpec,
    xi: [&str; 2],
    chi: [&str; 2],
    eps: &EpsilonTensor,
) -> Result<LaurentScalar> {
    let x = SpinorExpr::from_generators(spec, xi, Variance::Upper)?;
    let y = SpinorExpr::from_generators(spec, chi, Variance::Upper)?;
    let form = invariant_form(spec, &x, &y, eps)?;
    let w12 = spec.word(&[xi[0], chi[1]])?;
    let w21 = spec.word(&[xi[1], chi[0]])?;
    let (Some((k12, c12)), Some((k21, c21))) = (single_term(&w12), single_term(&w21)) else {
        return Err(Error::Residual("components do not form single words".into()));
    };
    let alpha = form.coefficient(&k12).div_exact(&c12)?;
    let beta = form.coefficient(&k21).div_exact(&c21)?;
    let rest = &form - &(&w12.scale(&alpha) + &w21.scale(&beta));
    if !rest.is_zero() {
        return Err(Error::Residual(spec.render(&rest)));
    }
    (-&beta).div_exact(&alpha)
}

fn single_term(p: &NCPoly) -> Option<(Word, LaurentScalar)> {
    let mut it = p.terms();
    let (w, c) = it.next()?;
    if it.next().is_some() {
        return None;
    }
    Some((w.clone(), c.clone()))
}

/// Numeric 2x2 matrix helpers for the classical limit.
pub mod numeric {
    use num_complex::Complex64;

    pub type CMat2 = [[Complex64; 2]; 2];

    pub fn det(m: &CMat2) -> Complex64 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `q`-determinant `ad - q bc` of a matrix with commuting entries.
    pub fn q_det(m: &CMat2, q: f64) -> Complex64 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0] * q
    }

    pub fn antipode(m: &CMat2, q: f64) -> CMat2 {
        [[m[1][1], -m[0][1] / q], [-m[1][0] * q, m[0][0]]]
    }

    pub fn mul(x: &CMat2, y: &CMat2) -> CMat2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = x[r][0] * y[0][c] + x[r][1] * y[1][c];
            }
        }
        out
    }
}

/// Assignment of the four generator names to numbers.
pub fn numeric_assignment(
    names: [&str; 4],
    m: &numeric::CMat2,
) -> HashMap<String, num_complex::Complex64> {
    names
        .iter()
        .zip([m[0][0], m[0][1], m[1][0], m[1][1]])
        .map(|(n, v)| (n.to_string(), v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::specs;

    fn sl() -> Arc<AlgebraSpec> {
        Arc::new(specs::slq2())
    }

    fn s(e: i32) -> LaurentScalar {
        LaurentScalar::s_pow(e)
    }

    #[test]
    fn epsilon_side_conditions() {
        let e = EpsilonTensor::covariant();
        let sq = mat2_mul(e.matrix(), e.matrix());
        assert_eq!(sq, mat2_scale(&mat2_identity(), &LaurentScalar::from_int(-1)));
        let eet = mat2_mul(e.matrix(), &e.transpose());
        assert_eq!(eet, mat2_diag(LaurentScalar::q_pow(-1), LaurentScalar::q()));
        let hat = EpsilonTensor::contravariant();
        assert_eq!(&e.invert_q(), hat.matrix());
        assert_eq!(hat.matrix(), &mat2_scale(&e.transpose(), &LaurentScalar::from_int(-1)));
    }

    #[test]
    fn q_det_examples() {
        let spec = sl();
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        let eps = EpsilonTensor::covariant();
        let d = q_det(&t, &eps).unwrap();
        assert_eq!(spec.render(&d), "a*d - q*b*c");
        assert_eq!(q_det(&NCMatrix::identity(&spec, 2), &eps).unwrap(), NCPoly::one());
        let diag = NCMatrix::from_mat2(&spec, &mat2_diag(LaurentScalar::from_int(2), LaurentScalar::from_int(3)));
        assert_eq!(q_det(&diag, &eps).unwrap(), NCPoly::scalar(LaurentScalar::from_int(6)));
    }

    #[test]
    fn q_det_rejects_non_quantum_matrix() {
        let spec = sl();
        let m = NCMatrix::from_mat2(
            &spec,
            &[
                [LaurentScalar::from_int(2), LaurentScalar::from_int(1)],
                [LaurentScalar::from_int(1), LaurentScalar::from_int(1)],
            ],
        );
        assert!(matches!(
            q_det(&m, &EpsilonTensor::covariant()),
            Err(Error::InconsistentDeterminant(_))
        ));
    }

    #[test]
    fn antipode_inverts_after_reduction() {
        let spec = sl();
        let blk = specs::t_block(&spec).unwrap();
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        let st = antipode(&t).unwrap();
        assert!(t.mul(&st).unwrap().reduce_unimodular(&blk).unwrap().is_identity());
        assert!(st.mul(&t).unwrap().reduce_unimodular(&blk).unwrap().is_identity());
        let ti = transpose_inverse(&t, &EpsilonTensor::covariant()).unwrap();
        assert!(t.transpose().mul(&ti).unwrap().reduce_unimodular(&blk).unwrap().is_identity());
        assert_ne!(ti, st.transpose());
    }

    #[test]
    fn numeric_antipode_is_adjugate() {
        use num_complex::Complex64 as C;
        let m = [[C::new(2.0, 0.0), C::new(1.0, 0.0)], [C::new(1.0, 0.0), C::new(1.0, 0.0)]];
        let s = numeric::antipode(&m, 1.0);
        assert_eq!(s, [[C::new(1.0, 0.0), C::new(-1.0, 0.0)], [C::new(-1.0, 0.0), C::new(2.0, 0.0)]]);
    }

    #[test]
    fn lowering_and_raising() {
        let spec = specs::spinor(false);
        let eps = EpsilonTensor::covariant();
        let hat = EpsilonTensor::contravariant();
        let xi = SpinorExpr::from_generators(&spec, ["x1", "x2"], Variance::Upper).unwrap();
        let low = lower_index(&xi, &eps, false).unwrap();
        assert_eq!(low.components[0], spec.gen("x2").unwrap().scale(&-s(1)));
        assert_eq!(low.components[1], spec.gen("x1").unwrap().scale(&s(-1)));
        assert_eq!(raise_index(&low, &hat, false).unwrap(), xi);
        let tl = lower_index(&xi, &eps, true).unwrap();
        assert_eq!(raise_index(&tl, &hat, true).unwrap(), xi);
        let unit = SpinorExpr::lower(NCPoly::zero(), NCPoly::one());
        let up = raise_index(&unit, &hat, false).unwrap();
        assert_eq!(up.components, [NCPoly::scalar(s(1)), NCPoly::zero()]);
    }

    #[test]
    fn invariant_form_expansion() {
        let spec = specs::spinor(false);
        let eps = EpsilonTensor::covariant();
        let xi = SpinorExpr::from_generators(&spec, ["x1", "x2"], Variance::Upper).unwrap();
        let chi = SpinorExpr::from_generators(&spec, ["y1", "y2"], Variance::Upper).unwrap();
        let f = invariant_form(&spec, &xi, &chi, &eps).unwrap();
        let expected = &spec.word(&["x1", "y2"]).unwrap().scale(&s(-1)) - &spec.word(&["x2", "y1"]).unwrap().scale(&s(1));
        assert_eq!(f, expected);
        let plane = specs::spinor(true);
        let xi = SpinorExpr::from_generators(&plane, ["x1", "x2"], Variance::Upper).unwrap();
        assert!(invariant_form(&plane, &xi, &xi, &eps).unwrap().is_zero());
    }

    #[test]
    fn form_zero_gives_plane_relation() {
        let spec = specs::spinor(false);
        let lambda = plane_relation_from_form(&spec, ["x1", "x2"], ["y1", "y2"], &EpsilonTensor::covariant()).unwrap();
        assert_eq!(lambda, LaurentScalar::q());
    }

    #[test]
    fn transforms_preserve_the_form() {
        let spec = Arc::new(specs::spinor(false));
        let blk = specs::t_block(&spec).unwrap();
        let eps = EpsilonTensor::covariant();
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        let xi = SpinorExpr::from_generators(&spec, ["x1", "x2"], Variance::Upper).unwrap();
        let chi = SpinorExpr::from_generators(&spec, ["y1", "y2"], Variance::Upper).unwrap();
        let before = invariant_form(&spec, &xi, &chi, &eps).unwrap();
        for mode in [TransformMode::Right, TransformMode::Left] {
            let xt = transform(&xi, &t, mode, &eps).unwrap();
            let ct = transform(&chi, &t, mode, &eps).unwrap();
            let after = invariant_form(&spec, &xt, &ct, &eps).unwrap();
            assert_eq!(spec.reduce_unimodular(&after, &blk).unwrap(), before, "{mode:?}");
        }
        let low = lower_index(&xi, &eps, false).unwrap();
        let lt = transform(&low, &t, TransformMode::Covariant, &eps).unwrap();
        let ct = transform(&chi, &t, TransformMode::Right, &eps).unwrap();
        let after = contract(&spec, &lt, &ct).unwrap();
        let before = contract(&spec, &low, &chi).unwrap();
        assert_eq!(spec.reduce_unimodular(&after, &blk).unwrap(), before);
        // lowering commutes with the transformation
        let xt = transform(&xi, &t, TransformMode::Right, &eps).unwrap();
        let lowered_after = lower_index(&xt, &eps, false).unwrap();
        for k in 0..2 {
            let d = &lowered_after.components[k] - &lt.components[k];
            assert!(spec.reduce_unimodular(&d, &blk).unwrap().is_zero());
        }
    }

    #[test]
    fn identity_transform_and_mode_errors() {
        let spec = Arc::new(specs::spinor(false));
        let eps = EpsilonTensor::covariant();
        let one = NCMatrix::identity(&spec, 2);
        let xi = SpinorExpr::from_generators(&spec, ["x1", "x2"], Variance::Upper).unwrap();
        assert_eq!(transform(&xi, &one, TransformMode::Right, &eps).unwrap(), xi);
        assert!(transform(&xi, &one, TransformMode::Covariant, &eps).is_err());
        assert!(transform(&xi, &one, TransformMode::Conjugate, &eps).is_err());
    }

    #[test]
    fn epsilon_is_invariant() {
        let spec = sl();
        let blk = specs::t_block(&spec).unwrap();
        let eps = EpsilonTensor::covariant();
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        let img = epsilon_image(&t, &eps).unwrap().reduce_unimodular(&blk).unwrap();
        assert_eq!(img, eps.to_ncmatrix(&spec));
    }

    #[test]
    fn dagger_of_generator_matrix() {
        let spec = Arc::new(specs::slq2_with_conjugate());
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        let expected = NCMatrix::from_generators(&spec, 2, 2, &["abar", "cbar", "bbar", "dbar"]).unwrap();
        assert_eq!(t.dagger().unwrap(), expected);
        assert_eq!(t.bar().unwrap().transpose(), expected);
        let ab = spec.word(&["a", "b"]).unwrap();
        let st = star(&spec, &ab).unwrap();
        assert_eq!(st, spec.word(&["bbar", "abar"]).unwrap());
        assert_eq!(star(&spec, &st).unwrap(), ab);
    }

    #[test]
    fn conjugate_determinant() {
        let spec = Arc::new(specs::slq2_with_conjugate());
        let tb = NCMatrix::generator_matrix(&spec, specs::TBAR_NAMES).unwrap();
        let eps_bar = EpsilonTensor {
            variant: EpsVariant::Covariant,
            entries: EpsilonTensor::covariant().invert_q(),
        };
        let d = q_det(&tb, &eps_bar).unwrap();
        assert_eq!(spec.render(&d), "abar*dbar - q^-1*bbar*cbar");
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        let d = q_det(&t, &EpsilonTensor::covariant()).unwrap();
        let dstar = star(&spec, &d).unwrap();
        assert_eq!(dstar, q_det(&tb, &eps_bar).unwrap());
    }

    #[test]
    fn ncmatrix_json_roundtrip() {
        let spec = sl();
        let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES).unwrap();
        let m = t.mul(&t).unwrap();
        assert_eq!(NCMatrix::from_json(&spec, &m.to_json()).unwrap(), m);
    }
}
