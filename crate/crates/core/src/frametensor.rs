//! Central tensors over frame indices and degree-p frame tensor fields.
//!
//! A field of degree p is `Σ_A t_A θ^{a₁}⊗…⊗θ^{a_p}` with the algebra-valued
//! coefficients `t_A` written to the left of the basis monomial. Because the
//! frame commutes with the algebra this representation is unique, and every
//! map with central (plain complex) coefficients acts by a numeric contraction
//! over the frame indices only.
//!
//! Positions are 1-based throughout: a central tensor of rank 2k applied at
//! position `i` acts on slots `i, …, i+k−1`, so `σ₁₂` is position 1.
//!
//! A rank-2k central tensor `M^{A}{}_{C}` is read as the operator
//! `θ^A ↦ M^A_C θ^C`. Applying `M` and then `M′` gives the tensor
//! `Σ_B M^A_B M′^B_C`, i.e. the matrix product `M·M′` with rows indexed by the
//! upper multi-index.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};
use crate::matalg::{AlgebraElement, C64, ONE, ZERO};

pub(crate) fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

/// Row-major flat index of a multi-index.
pub fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

pub fn unflatten(mut flat: usize, n: usize, degree: usize) -> Vec<usize> {
    let mut out = vec![0; degree];
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    out
}

/// `new[o][l][c][r] = Σ_a m[a][c] · old[o][l][a][r]`, where `a`, `c` range
/// over `width` consecutive slots of a degree-`degree` multi-index starting at
/// 0-based slot `start`, `l` and `r` are the untouched slots on either side and
/// each multi-index entry is a block of `block` complex numbers.
fn contract_window(
    data: &[C64],
    n: usize,
    degree: usize,
    block: usize,
    m: &[C64],
    start: usize,
    width: usize,
) -> Vec<C64> {
    let left = pow(n, start);
    let mid = pow(n, width);
    let right = pow(n, degree - start - width) * block;
    let stride = mid * right;
    let outer = data.len() / (left * stride);
    let mut out = vec![ZERO; data.len()];
    for o in 0..outer * left {
        let base = o * stride;
        for a in 0..mid {
            let src = &data[base + a * right..base + (a + 1) * right];
            if src.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            for c in 0..mid {
                let coef = m[a * mid + c];
                if coef.re == 0.0 && coef.im == 0.0 {
                    continue;
                }
                let dst = &mut out[base + c * right..base + (c + 1) * right];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += coef * s;
                }
            }
        }
    }
    out
}

/// A tensor with plain complex entries over frame indices `0..n`, index order
/// upper indices first then lower ones: `S^{ab}{}_{cd}` is `get(&[a,b,c,d])`.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralTensor {
    n: usize,
    rank: usize,
    data: Vec<C64>,
}

impl CentralTensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Self {
            n,
            rank,
            data: vec![ZERO; pow(n, rank)],
        }
    }

    pub fn from_data(n: usize, rank: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != pow(n, rank) {
            return Err(Error::Shape(format!(
                "rank-{rank} tensor over {n} indices needs {} entries, got {}",
                pow(n, rank),
                data.len()
            )));
        }
        Ok(Self { n, rank, data })
    }

    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let data = (0..pow(n, rank))
            .map(|flat| f(&unflatten(flat, n, rank)))
            .collect();
        Self { n, rank, data }
    }

    /// The identity operator δ on degree-k fields (rank 2k).
    pub fn identity(n: usize, k: usize) -> Self {
        let m = pow(n, k);
        let mut t = Self::zeros(n, 2 * k);
        for a in 0..m {
            t.data[a * m + a] = ONE;
        }
        t
    }

    /// `S^{ab}{}_{cd} = δ^a_d δ^b_c`.
    pub fn flip(n: usize) -> Self {
        Self::from_fn(n, 4, |i| if i[0] == i[3] && i[1] == i[2] { ONE } else { ZERO })
    }

    /// `P^{ab}{}_{cd} = ½(δ^a_c δ^b_d − δ^a_d δ^b_c)`.
    pub fn antisymmetrizer(n: usize) -> Self {
        Self::from_fn(n, 4, |i| {
            let mut v = 0.0;
            if i[0] == i[2] && i[1] == i[3] {
                v += 0.5;
            }
            if i[0] == i[3] && i[1] == i[2] {
                v -= 0.5;
            }
            C64::new(v, 0.0)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        debug_assert_eq!(idx.len(), self.rank);
        self.data[flatten(idx, self.n)]
    }

    pub fn set(&mut self, idx: &[usize], v: C64) {
        debug_assert_eq!(idx.len(), self.rank);
        let f = flatten(idx, self.n);
        self.data[f] = v;
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.rank != other.rank {
            return Err(Error::Shape(format!(
                "rank-{} over {} vs rank-{} over {}",
                self.rank, self.n, other.rank, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { data, ..*self })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Reorders indices: entry `idx` of the result is entry `idx∘perm` of
    /// `self`, i.e. `out[i₀,…] = self[i_{perm[0]}, …]`.
    pub fn permute_indices(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        Self::from_fn(self.n, self.rank, |idx| {
            let src: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            self.get(&src)
        })
    }

    fn half_rank(&self) -> Result<usize> {
        if !self.rank.is_multiple_of(2) {
            return Err(Error::Shape(format!("rank {} is not an operator rank", self.rank)));
        }
        Ok(self.rank / 2)
    }

    /// The operator as an `n^k × n^k` matrix, rows indexed by the upper
    /// multi-index.
    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        let m = pow(self.n, self.half_rank()?);
        Ok(DMatrix::from_row_slice(m, m, &self.data))
    }

    pub fn from_matrix(n: usize, k: usize, m: &DMatrix<C64>) -> Result<Self> {
        let dim = pow(n, k);
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::Shape(format!(
                "expected {dim}x{dim} operator matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let data = (0..dim * dim).map(|f| m[(f / dim, f % dim)]).collect();
        Ok(Self { n, rank: 2 * k, data })
    }

    /// `self` followed by `next` (both operators on the same degree).
    pub fn then(&self, next: &Self) -> Result<Self> {
        self.check_same_shape(next)?;
        if self.half_rank()? == 0 {
            return Ok(self.scale(next.data[0]));
        }
        self.then_at(next, 1)
    }

    /// `self` followed by the operator `m` (rank 2w) acting at 1-based
    /// position `pos` of the output.
    pub fn then_at(&self, m: &Self, pos: usize) -> Result<Self> {
        let k = self.half_rank()?;
        let w = m.half_rank()?;
        if m.n != self.n {
            return Err(Error::FrameMismatch {
                expected: self.n,
                found: m.n,
            });
        }
        if pos == 0 || pos + w - 1 > k {
            return Err(Error::PositionOutOfRange {
                pos,
                width: w,
                degree: k,
            });
        }
        // rows of `self` are independent degree-k scalar fields
        let data = contract_window(&self.data, self.n, k, 1, &m.data, pos - 1, w);
        Ok(Self { data, ..*self })
    }

    /// `m` embedded at position `pos` of degree-k tensors: `1^{⊗(pos−1)} ⊗ m ⊗ 1…`.
    pub fn lift(m: &Self, k: usize, pos: usize) -> Result<Self> {
        Self::identity(m.n, k).then_at(m, pos)
    }

    /// Tensor product of operators: `(A⊗B)^{A₁A₂}{}_{C₁C₂} = A^{A₁}_{C₁} B^{A₂}_{C₂}`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::FrameMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let k1 = self.half_rank()?;
        let k2 = other.half_rank()?;
        let (m1, m2) = (pow(self.n, k1), pow(self.n, k2));
        let a = self.to_matrix()?;
        let b = other.to_matrix()?;
        let prod = a.kronecker(&b);
        debug_assert_eq!(prod.nrows(), m1 * m2);
        Self::from_matrix(self.n, k1 + k2, &prod)
    }
}

/// A degree-p element of Ω¹⊗…⊗Ω¹ with coefficients in M_N(ℂ).
#[derive(Clone, Debug, PartialEq)]
pub struct FrameTensorField {
    n: usize,
    dim: usize,
    degree: usize,
    /// `n^degree` column-major `dim×dim` blocks.
    data: Vec<C64>,
    wedge_mask: BTreeSet<usize>,
}

impl FrameTensorField {
    pub fn zeros(n: usize, dim: usize, degree: usize) -> Self {
        Self {
            n,
            dim,
            degree,
            data: vec![ZERO; pow(n, degree) * dim * dim],
            wedge_mask: BTreeSet::new(),
        }
    }

    /// Degree-0 field holding `f`.
    pub fn scalar(n: usize, f: &AlgebraElement) -> Self {
        let mut t = Self::zeros(n, f.dim(), 0);
        t.data.copy_from_slice(f.as_slice());
        t
    }

    /// The basis monomial `θ^{a₁}⊗…⊗θ^{a_p}` (0-based frame indices) with
    /// coefficient 1.
    pub fn basis(n: usize, dim: usize, indices: &[usize]) -> Self {
        Self::monomial(n, indices, &AlgebraElement::identity(dim))
    }

    /// `f θ^{a₁}⊗…⊗θ^{a_p}`.
    pub fn monomial(n: usize, indices: &[usize], f: &AlgebraElement) -> Self {
        let mut t = Self::zeros(n, f.dim(), indices.len());
        t.set_coeff(indices, f);
        t
    }

    pub fn from_coeffs(n: usize, degree: usize, coeffs: &[AlgebraElement]) -> Result<Self> {
        if coeffs.len() != pow(n, degree) {
            return Err(Error::Shape(format!(
                "degree-{degree} field over {n} frame indices needs {} coefficients, got {}",
                pow(n, degree),
                coeffs.len()
            )));
        }
        let dim = coeffs.first().map(|c| c.dim()).unwrap_or(1);
        let mut t = Self::zeros(n, dim, degree);
        for (flat, c) in coeffs.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
            t.block_mut(flat).copy_from_slice(c.as_slice());
        }
        Ok(t)
    }

    pub fn from_fn(
        n: usize,
        dim: usize,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> AlgebraElement,
    ) -> Self {
        let mut t = Self::zeros(n, dim, degree);
        for flat in 0..pow(n, degree) {
            let c = f(&unflatten(flat, n, degree));
            assert_eq!(c.dim(), dim, "coefficient dimension");
            t.block_mut(flat).copy_from_slice(c.as_slice());
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Matrix dimension N of the coefficients.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        pow(self.n, self.degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn wedge_mask(&self) -> &BTreeSet<usize> {
        &self.wedge_mask
    }

    fn bs(&self) -> usize {
        self.dim * self.dim
    }

    fn block(&self, flat: usize) -> &[C64] {
        let bs = self.bs();
        &self.data[flat * bs..(flat + 1) * bs]
    }

    fn block_mut(&mut self, flat: usize) -> &mut [C64] {
        let bs = self.bs();
        &mut self.data[flat * bs..(flat + 1) * bs]
    }

    fn block_view(&self, flat: usize) -> DMatrixView<'_, C64> {
        DMatrixView::from_slice(self.block(flat), self.dim, self.dim)
    }

    pub fn coeff(&self, idx: &[usize]) -> AlgebraElement {
        assert_eq!(idx.len(), self.degree);
        self.coeff_flat(flatten(idx, self.n))
    }

    pub fn coeff_flat(&self, flat: usize) -> AlgebraElement {
        AlgebraElement::from_matrix(self.block_view(flat).into_owned())
            .expect("blocks are square")
    }

    pub fn coeffs(&self) -> Vec<AlgebraElement> {
        (0..self.len()).map(|f| self.coeff_flat(f)).collect()
    }

    pub fn set_coeff(&mut self, idx: &[usize], f: &AlgebraElement) {
        assert_eq!(idx.len(), self.degree);
        assert_eq!(f.dim(), self.dim);
        let flat = flatten(idx, self.n);
        self.block_mut(flat).copy_from_slice(f.as_slice());
    }

    pub fn add_to_coeff(&mut self, idx: &[usize], f: &AlgebraElement) {
        let flat = flatten(idx, self.n);
        for (d, s) in self.block_mut(flat).iter_mut().zip(f.as_slice()) {
            *d += s;
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::FrameMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn check_same_degree(&self, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_degree(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        let wedge_mask = self.wedge_mask.intersection(&other.wedge_mask).copied().collect();
        Ok(Self {
            data,
            wedge_mask,
            ..*self
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * c).collect(),
            wedge_mask: self.wedge_mask.clone(),
            ..*self
        }
    }

    fn map_blocks(&self, f: impl Fn(DMatrixView<'_, C64>) -> DMatrix<C64>) -> Self {
        let mut out = Self::zeros(self.n, self.dim, self.degree);
        for flat in 0..self.len() {
            let m = f(self.block_view(flat));
            out.block_mut(flat).copy_from_slice(m.as_slice());
        }
        out.wedge_mask = self.wedge_mask.clone();
        out
    }

    /// `f·T`: every coefficient becomes `f·t_A`.
    pub fn left_mul(&self, f: &AlgebraElement) -> Result<Self> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        Ok(self.map_blocks(|b| f.matrix() * b))
    }

    /// `T·f`: since `[f, θ^a] = 0` every coefficient becomes `t_A·f`.
    pub fn right_mul(&self, f: &AlgebraElement) -> Result<Self> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        Ok(self.map_blocks(|b| b * f.matrix()))
    }

    /// Adjoint of every coefficient, basis untouched.
    pub fn adjoint_coeffs(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    /// `(t_A θ^A) ⊗ (u_B θ^B) = t_A u_B θ^A ⊗ θ^B`.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zeros(self.n, self.dim, self.degree + other.degree);
        let m2 = other.len();
        for a in 0..self.len() {
            let left = self.block_view(a);
            if left.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            for b in 0..m2 {
                let prod = left * other.block_view(b);
                out.block_mut(a * m2 + b).copy_from_slice(prod.as_slice());
            }
        }
        out.wedge_mask = self
            .wedge_mask
            .iter()
            .copied()
            .chain(other.wedge_mask.iter().map(|&p| p + self.degree))
            .collect();
        Ok(out)
    }

    /// New coefficient at `(…, c₁…c_k, …)` is `Σ_A M^{A}{}_{C} t_{(…, A, …)}`
    /// with the window starting at 1-based position `pos`.
    pub fn apply_central_at(&self, m: &CentralTensor, pos: usize) -> Result<Self> {
        if m.n() != self.n {
            return Err(Error::FrameMismatch {
                expected: self.n,
                found: m.n(),
            });
        }
        if !m.rank().is_multiple_of(2) {
            return Err(Error::Shape(format!("rank {} is not an operator rank", m.rank())));
        }
        let k = m.rank() / 2;
        if pos == 0 || pos + k - 1 > self.degree {
            return Err(Error::PositionOutOfRange {
                pos,
                width: k,
                degree: self.degree,
            });
        }
        let data = contract_window(&self.data, self.n, self.degree, self.bs(), m.data(), pos - 1, k);
        // masks overlapping the touched window no longer hold
        let wedge_mask = self
            .wedge_mask
            .iter()
            .copied()
            .filter(|&p| p + 1 < pos || p >= pos + k)
            .collect();
        Ok(Self {
            data,
            wedge_mask,
            ..*self
        })
    }

    /// Projects slots `(pos, pos+1)` onto 2-forms with the projector `p`.
    pub fn wedge_project(&self, pos: usize, p: &CentralTensor) -> Result<Self> {
        if p.rank() != 4 {
            return Err(Error::Shape("wedge projector must have rank 4".into()));
        }
        let mut out = self.apply_central_at(p, pos)?;
        out.wedge_mask.insert(pos);
        Ok(out)
    }

    /// Permutes tensor slots: slot `j` of the result holds slot `perm[j]` of
    /// `self` (0-based). Coefficients are carried along unchanged.
    pub fn permute_slots(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.degree);
        let mut out = Self::zeros(self.n, self.dim, self.degree);
        for flat in 0..self.len() {
            let idx = unflatten(flat, self.n, self.degree);
            let src: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            let from = flatten(&src, self.n);
            let block = self.block(from).to_vec();
            out.block_mut(flat).copy_from_slice(&block);
        }
        out
    }

    /// Maximum Frobenius norm over all coefficients.
    pub fn max_coeff_norm(&self) -> f64 {
        let bs = self.bs();
        self.data
            .chunks(bs)
            .map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_coeff_norm())
    }
}
