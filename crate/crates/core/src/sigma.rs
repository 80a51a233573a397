//! The sigma-matrix sector: Pauli set, its epsilon-raised partner, the
//! deformed metric, bispinor/vector maps and the 4x4 vector representation.

use std::array;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::ncalg::{specs, AlgebraSpec, NCPoly};
use crate::qcoeff::{GaussRat, LaurentScalar};
use crate::spinor::{mat2_mul, mat2_transpose, numeric::CMat2, EpsilonTensor, Mat2, NCMatrix};

pub type Mat4 = [[LaurentScalar; 4]; 4];

fn int(n: i64) -> LaurentScalar {
    LaurentScalar::from_int(n)
}

fn half() -> LaurentScalar {
    LaurentScalar::from_ratio(1, 2)
}

fn trace(m: &Mat2) -> LaurentScalar {
    &m[0][0] + &m[1][1]
}

/// `(1, sigma_1, sigma_2, sigma_3)`.
pub fn pauli() -> [Mat2; 4] {
    let z = LaurentScalar::zero;
    let i = LaurentScalar::i;
    [
        [[int(1), z()], [z(), int(1)]],
        [[z(), int(1)], [int(1), z()]],
        [[z(), -i()], [i(), z()]],
        [[int(1), z()], [z(), int(-1)]],
    ]
}

/// The raised set as listed in closed form.
pub fn printed_bar_sigma() -> [Mat2; 4] {
    let z = LaurentScalar::zero;
    let q = LaurentScalar::q;
    let qi = || LaurentScalar::q_pow(-1);
    let i = LaurentScalar::i;
    [
        [[q(), z()], [z(), qi()]],
        [[z(), int(-1)], [int(-1), z()]],
        [[z(), i()], [-i(), z()]],
        [[-q(), z()], [z(), qi()]],
    ]
}

/// The metric as listed in closed form.
pub fn printed_eta() -> Mat4 {
    let z = LaurentScalar::zero;
    let plus = &(&LaurentScalar::q() + &LaurentScalar::q_pow(-1)) * &half();
    let minus = &(&LaurentScalar::q() - &LaurentScalar::q_pow(-1)) * &half();
    [
        [plus.clone(), z(), z(), minus.clone()],
        [z(), int(-1), z(), z()],
        [z(), z(), int(-1), z()],
        [minus, z(), z(), -plus],
    ]
}

pub fn minkowski() -> Mat4 {
    mat4_diag([int(1), int(-1), int(-1), int(-1)])
}

pub fn mat4_diag(d: [LaurentScalar; 4]) -> Mat4 {
    array::from_fn(|r| array::from_fn(|c| if r == c { d[r].clone() } else { LaurentScalar::zero() }))
}

pub fn mat4_identity() -> Mat4 {
    mat4_diag([int(1), int(1), int(1), int(1)])
}

pub fn mat4_mul(x: &Mat4, y: &Mat4) -> Mat4 {
    array::from_fn(|r| {
        array::from_fn(|c| {
            let mut acc = LaurentScalar::zero();
            for k in 0..4 {
                acc += &(&x[r][k] * &y[k][c]);
            }
            acc
        })
    })
}

pub fn mat4_transpose(x: &Mat4) -> Mat4 {
    array::from_fn(|r| array::from_fn(|c| x[c][r].clone()))
}

fn det_rec(m: &[Vec<LaurentScalar>]) -> LaurentScalar {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = LaurentScalar::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentScalar>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][c] * &det_rec(&minor);
        acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

pub fn mat4_det(m: &Mat4) -> LaurentScalar {
    let rows: Vec<Vec<LaurentScalar>> = m.iter().map(|r| r.to_vec()).collect();
    det_rec(&rows)
}

/// Exact inverse over the Laurent ring; fails unless the determinant is a unit.
pub fn mat4_inverse(m: &Mat4) -> Result<Mat4> {
    let det = mat4_det(m);
    let inv = det.inverse().ok_or_else(|| {
        Error::InexactDivision(format!("determinant {det} is not a unit of the coefficient ring"))
    })?;
    let cof = |r: usize, c: usize| -> LaurentScalar {
        let minor: Vec<Vec<LaurentScalar>> = (0..4)
            .filter(|&i| i != r)
            .map(|i| (0..4).filter(|&j| j != c).map(|j| m[i][j].clone()).collect())
            .collect();
        let d = det_rec(&minor);
        if (r + c).is_multiple_of(2) {
            d
        } else {
            -d
        }
    };
    Ok(array::from_fn(|r| array::from_fn(|c| &cof(c, r) * &inv)))
}

/// Exact inverse of a rational matrix by Gauss-Jordan elimination.
pub fn invert_exact(m: &[Vec<GaussRat>]) -> Option<Vec<Vec<GaussRat>>> {
    let n = m.len();
    let mut a: Vec<Vec<GaussRat>> = m
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut v = row.clone();
            v.extend((0..n).map(|c| if c == r { GaussRat::one() } else { GaussRat::zero() }));
            v
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * p);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Both sets of sigma matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSet {
    pub sigma: [Mat2; 4],
    pub bar_sigma: [Mat2; 4],
}

/// `bar_sigma^m = eps^ . (sigma^m)^t . (eps^)^t`, i.e. both indices raised
/// with the contravariant epsilon.
pub fn compute_bar_sigma(eps_hat: &EpsilonTensor) -> SigmaSet {
    let sigma = pauli();
    let e = eps_hat.matrix();
    let et = mat2_transpose(e);
    let bar_sigma = array::from_fn(|m| mat2_mul(&mat2_mul(e, &mat2_transpose(&sigma[m])), &et));
    SigmaSet { sigma, bar_sigma }
}

/// [`compute_bar_sigma`] with the closed-form list enforced.
pub fn build_bar_sigma(eps_hat: &EpsilonTensor) -> Result<SigmaSet> {
    let set = compute_bar_sigma(eps_hat);
    let printed = printed_bar_sigma();
    for m in 0..4 {
        if set.bar_sigma[m] != printed[m] {
            return Err(Error::Residual(format!("raised sigma {m} differs from the closed form")));
        }
    }
    Ok(set)
}

impl SigmaSet {
    /// `G^{mn} = 1/2 Tr(bar_sigma^m sigma^n)`.
    pub fn contraction(&self) -> Mat4 {
        array::from_fn(|m| array::from_fn(|n| &trace(&mat2_mul(&self.bar_sigma[m], &self.sigma[n])) * &half()))
    }

    /// `sigma_b = sum_n sigma^n lower[n][b]`.
    pub fn lowered_sigma(&self, lower: &Mat4) -> [Mat2; 4] {
        array::from_fn(|b| combine(&self.sigma, |n| lower[n][b].clone()))
    }

    /// `bar_sigma_n = sum_m lower[n][m] bar_sigma^m`.
    pub fn lowered_bar_sigma(&self, lower: &Mat4) -> [Mat2; 4] {
        array::from_fn(|n| combine(&self.bar_sigma, |m| lower[n][m].clone()))
    }

    pub fn specialize_exact(&self, q: &BigRational) -> Result<([CMat2Exact; 4], [CMat2Exact; 4])> {
        let f = |m: &Mat2| -> Result<CMat2Exact> {
            Ok([
                [m[0][0].specialize_exact(q)?, m[0][1].specialize_exact(q)?],
                [m[1][0].specialize_exact(q)?, m[1][1].specialize_exact(q)?],
            ])
        };
        let s = [f(&self.sigma[0])?, f(&self.sigma[1])?, f(&self.sigma[2])?, f(&self.sigma[3])?];
        let b = [
            f(&self.bar_sigma[0])?,
            f(&self.bar_sigma[1])?,
            f(&self.bar_sigma[2])?,
            f(&self.bar_sigma[3])?,
        ];
        Ok((s, b))
    }
}

pub type CMat2Exact = [[GaussRat; 2]; 2];

fn combine(set: &[Mat2; 4], coeff: impl Fn(usize) -> LaurentScalar) -> Mat2 {
    array::from_fn(|r| {
        array::from_fn(|c| {
            let mut acc = LaurentScalar::zero();
            for (k, m) in set.iter().enumerate() {
                acc += &(&m[r][c] * &coeff(k));
            }
            acc
        })
    })
}

/// Raised and lowered deformed metric.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiMetricQ {
    pub upper: Mat4,
    pub lower: Mat4,
}

/// The metric defined by the trace contraction, with its exact inverse.
pub fn eta(set: &SigmaSet) -> Result<MinkowskiMetricQ> {
    let upper = set.contraction();
    let lower = mat4_inverse(&upper)?;
    Ok(MinkowskiMetricQ { upper, lower })
}

/// Entries where the contraction differs from the closed-form metric.
pub fn eta_mismatches(set: &SigmaSet) -> Vec<(usize, usize, LaurentScalar, LaurentScalar)> {
    let g = set.contraction();
    let p = printed_eta();
    let mut out = Vec::new();
    for r in 0..4 {
        for c in 0..4 {
            if g[r][c] != p[r][c] {
                out.push((r, c, g[r][c].clone(), p[r][c].clone()));
            }
        }
    }
    out
}

pub fn is_symmetric(m: &Mat4) -> bool {
    (0..4).all(|r| (0..4).all(|c| m[r][c] == m[c][r]))
}

/// Determinant of the `{0, 3}` block.
pub fn time_z_block_det(m: &Mat4) -> LaurentScalar {
    &(&m[0][0] * &m[3][3]) - &(&m[0][3] * &m[3][0])
}

/// Residual of `sum_n sigma^n[A][X] bar_sigma_n[Y][B] - 2 delta_XY delta_AB`,
/// indexed `[A][X][Y][B]`.
pub fn completeness_residual(set: &SigmaSet, lower: &Mat4) -> [[[[LaurentScalar; 2]; 2]; 2]; 2] {
    let bar_low = set.lowered_bar_sigma(lower);
    array::from_fn(|a| {
        array::from_fn(|x| {
            array::from_fn(|y| {
                array::from_fn(|b| {
                    let mut acc = LaurentScalar::zero();
                    for n in 0..4 {
                        acc += &(&set.sigma[n][a][x] * &bar_low[n][y][b]);
                    }
                    if x == y && a == b {
                        acc = &acc - &int(2);
                    }
                    acc
                })
            })
        })
    })
}

pub fn residual_is_zero(r: &[[[[LaurentScalar; 2]; 2]; 2]; 2]) -> bool {
    r.iter().flatten().flatten().flatten().all(LaurentScalar::is_zero)
}

/// Completeness evaluated at an exact rational `q` with the lowered metric
/// taken as the inverse of the closed-form metric (computed numerically-exact
/// since that inverse leaves the Laurent ring). Returns the largest residual
/// entry, zero when the relation holds.
pub fn completeness_with_printed_inverse(set: &SigmaSet, q: &BigRational) -> Result<GaussRat> {
    let p = printed_eta();
    let rows: Vec<Vec<GaussRat>> = p
        .iter()
        .map(|r| r.iter().map(|x| x.specialize_exact(q)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let inv = invert_exact(&rows).ok_or_else(|| Error::Residual("closed-form metric is singular".into()))?;
    let (s, b) = set.specialize_exact(q)?;
    let mut worst = GaussRat::zero();
    for a in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                for bb in 0..2 {
                    let mut acc = GaussRat::zero();
                    for n in 0..4 {
                        for m in 0..4 {
                            acc = &acc + &(&(&s[n][a][x] * &inv[n][m]) * &b[m][y][bb]);
                        }
                    }
                    if x == y && a == bb {
                        acc = &acc - &GaussRat::from_int(2);
                    }
                    if !acc.is_zero() {
                        worst = acc;
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Specializes a scalar 4x4 matrix at `q = 1`.
pub fn mat4_at_one(m: &Mat4) -> Result<[[GaussRat; 4]; 4]> {
    let one = BigRational::from_integer(BigInt::from(1));
    let mut out: [[GaussRat; 4]; 4] = array::from_fn(|_| array::from_fn(|_| GaussRat::zero()));
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = m[r][c].specialize_exact(&one)?;
        }
    }
    Ok(out)
}

/// Results of the undeformed relations evaluated on the `q = 1` limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalLimits {
    /// `bar_sigma = (1, -sigma_vec)`.
    pub bar_sigma_is_parity: bool,
    /// `bar_sigma^m sigma^n + bar_sigma^n sigma^m = 2 eta^{mn} 1`.
    pub anticommutator: bool,
    /// `Tr bar_sigma^m sigma^n = 2 eta^{mn}`.
    pub trace: bool,
    /// `bar_sigma^m . sigma_n = 2 delta^m_n`.
    pub trace_lowered: bool,
    /// `sum_n sigma_n[A][X] bar_sigma^n[Y][B] = 2 delta delta`.
    pub completeness: bool,
    /// The metric reduces to `diag(1, -1, -1, -1)`.
    pub metric: bool,
}

impl ClassicalLimits {
    pub fn all(&self) -> bool {
        self.bar_sigma_is_parity
            && self.anticommutator
            && self.trace
            && self.trace_lowered
            && self.completeness
            && self.metric
    }
}

pub fn classical_limits(set: &SigmaSet) -> Result<ClassicalLimits> {
    let one = BigRational::from_integer(BigInt::from(1));
    let (s, b) = set.specialize_exact(&one)?;
    let eta1 = mat4_at_one(&minkowski())?;
    let g = mat4_at_one(&set.contraction())?;
    let metric = g == eta1;
    let zero = GaussRat::zero;
    let neg = |m: &CMat2Exact| -> CMat2Exact { array::from_fn(|r| array::from_fn(|c| -&m[r][c])) };
    let bar_sigma_is_parity = b[0] == s[0] && (1..4).all(|k| b[k] == neg(&s[k]));
    let mul = |x: &CMat2Exact, y: &CMat2Exact| -> CMat2Exact {
        array::from_fn(|r| array::from_fn(|c| &(&x[r][0] * &y[0][c]) + &(&x[r][1] * &y[1][c])))
    };
    let two = GaussRat::from_int(2);
    let mut anticommutator = true;
    let mut trace = true;
    for m in 0..4 {
        for n in 0..4 {
            let x = mul(&b[m], &s[n]);
            let y = mul(&b[n], &s[m]);
            let target = &two * &eta1[m][n];
            for r in 0..2 {
                for c in 0..2 {
                    let want = if r == c { target.clone() } else { zero() };
                    if &x[r][c] + &y[r][c] != want {
                        anticommutator = false;
                    }
                }
            }
            if &x[0][0] + &x[1][1] != target {
                trace = false;
            }
        }
    }
    let low: Vec<CMat2Exact> = (0..4)
        .map(|n| array::from_fn(|r| array::from_fn(|c| &s[n][r][c] * &eta1[n][n])))
        .collect();
    let mut trace_lowered = true;
    for m in 0..4 {
        for n in 0..4 {
            let x = mul(&b[m], &low[n]);
            let want = if m == n { two.clone() } else { zero() };
            if &x[0][0] + &x[1][1] != want {
                trace_lowered = false;
            }
        }
    }
    let mut completeness = true;
    for a in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                for bb in 0..2 {
                    let mut acc = zero();
                    for n in 0..4 {
                        acc = &acc + &(&low[n][a][x] * &b[n][y][bb]);
                    }
                    let want = if a == bb && x == y { two.clone() } else { zero() };
                    if acc != want {
                        completeness = false;
                    }
                }
            }
        }
    }
    Ok(ClassicalLimits {
        bar_sigma_is_parity,
        anticommutator,
        trace,
        trace_lowered,
        completeness,
        metric,
    })
}

fn scalar_matrix(spec: &Arc<AlgebraSpec>, m: &Mat2) -> NCMatrix {
    NCMatrix::from_mat2(spec, m)
}

fn nc_trace(m: &NCMatrix) -> NCPoly {
    m.get(0, 0) + m.get(1, 1)
}

/// `X = sum_b x^b sigma_b`.
pub fn vector_to_bispinor(spec: &Arc<AlgebraSpec>, set: &SigmaSet, lower: &Mat4, x: &[NCPoly; 4]) -> Result<NCMatrix> {
    let low = set.lowered_sigma(lower);
    let mut acc = NCMatrix::zeros(spec, 2, 2);
    for b in 0..4 {
        let term = scalar_matrix(spec, &low[b]).try_map(|e| spec.multiply(e, &x[b]))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `x^a = 1/2 Tr(bar_sigma^a X)`.
pub fn bispinor_to_vector(set: &SigmaSet, x: &NCMatrix) -> Result<[NCPoly; 4]> {
    if x.rows() != 2 || x.cols() != 2 {
        return Err(Error::Dimension("bispinor must be 2x2".into()));
    }
    let spec = x.spec();
    let mut out: [NCPoly; 4] = Default::default();
    for (a, slot) in out.iter_mut().enumerate() {
        let prod = scalar_matrix(spec, &set.bar_sigma[a]).mul(x)?;
        *slot = nc_trace(&prod).scale(&half());
    }
    Ok(out)
}

/// `M^a_b = 1/2 Tr(bar_sigma^a T sigma_b T^dagger)` over a spec holding both
/// matrix copies.
pub fn vector_rep(t: &NCMatrix, set: &SigmaSet, lower: &Mat4) -> Result<NCMatrix> {
    let spec = t.spec();
    let td = t.dagger()?;
    let low = set.lowered_sigma(lower);
    let mut entries = Vec::with_capacity(16);
    let sandwiches: Vec<NCMatrix> = (0..4)
        .map(|b| t.mul(&scalar_matrix(spec, &low[b]))?.mul(&td))
        .collect::<Result<_>>()?;
    for a in 0..4 {
        let left = scalar_matrix(spec, &set.bar_sigma[a]);
        for sw in &sandwiches {
            entries.push(nc_trace(&left.mul(sw)?).scale(&half()));
        }
    }
    NCMatrix::new(spec, 4, 4, entries)
}

/// Numeric 4x4 evaluation of a symbolic matrix.
pub fn evaluate4(
    m: &NCMatrix,
    assignment: &HashMap<String, Complex64>,
    q: f64,
) -> Result<[[Complex64; 4]; 4]> {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, slot) in row.iter_mut().enumerate() {
            *slot = m.spec().substitute_numeric(m.get(r, c), assignment, q)?;
        }
    }
    Ok(out)
}

/// Assigns `T` and its complex conjugate to the two matrix copies.
pub fn conjugate_pair_assignment(t: &CMat2) -> HashMap<String, Complex64> {
    let vals = [t[0][0], t[0][1], t[1][0], t[1][1]];
    let mut out = HashMap::new();
    for (k, v) in vals.iter().enumerate() {
        out.insert(specs::T_NAMES[k].to_string(), *v);
        out.insert(specs::TBAR_NAMES[k].to_string(), v.conj());
    }
    out
}

/// `det_q M = M00 M11 - q M01 M10` with entries in written order.
pub fn det_q_formula(m: &NCMatrix) -> Result<NCPoly> {
    let spec = m.spec();
    let d = spec.multiply(m.get(0, 0), m.get(1, 1))?;
    let o = spec.multiply(m.get(0, 1), m.get(1, 0))?;
    Ok(&d - &o.scale(&LaurentScalar::q()))
}

/// Both matrix copies plus four commuting bispinor entries `x11 .. x22`.
pub fn bispinor_spec() -> AlgebraSpec {
    bispinor_spec_with(specs::da_coefficient())
}

pub fn bispinor_spec_with(da_coeff: LaurentScalar) -> AlgebraSpec {
    use crate::ncalg::GeneratorSort;
    let mut b = AlgebraSpec::builder("bispinor");
    for n in specs::T_NAMES {
        b = b.generator(n, GeneratorSort::MatrixElement);
    }
    for n in specs::TBAR_NAMES {
        b = b.generator(n, GeneratorSort::ConjugateMatrixElement);
    }
    for n in ["x11", "x12", "x21", "x22"] {
        b = b.generator(n, GeneratorSort::SpinorComponent);
    }
    let b = specs::quantum_matrix_rules(b, specs::T_NAMES, &LaurentScalar::q(), da_coeff.clone());
    specs::conjugate_rules(b, &da_coeff).build().expect("stock spec is valid")
}

/// `det_q(T X T^dagger) - det_q(X)` reduced with both unit determinants, for
/// the generic bispinor.
pub fn detq_nonconservation_witness() -> Result<NCPoly> {
    let spec = Arc::new(bispinor_spec());
    let t = NCMatrix::generator_matrix(&spec, specs::T_NAMES)?;
    let x = NCMatrix::from_generators(&spec, 2, 2, &["x11", "x12", "x21", "x22"])?;
    let xp = t.mul(&x)?.mul(&t.dagger()?)?;
    let diff = &det_q_formula(&xp)? - &det_q_formula(&x)?;
    let r = spec.reduce_unimodular(&diff, &specs::t_block(&spec)?)?;
    spec.reduce_unimodular(&r, &specs::tbar_block(&spec)?)
}

/// True when every coefficient of `p` vanishes at `q = 1`.
pub fn vanishes_at_one(p: &NCPoly) -> Result<bool> {
    let one = BigRational::from_integer(BigInt::from(1));
    for (_, c) in p.terms() {
        if !c.specialize_exact(&one)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
