//! The generalized permutation σ, its lifts σ_{i(i+1)}, braid checks and
//! block extensions.
//!
//! A word is a list of 1-based positions; the rightmost letter acts first.
//! `[1, 2, 1]` is σ₁₂σ₂₃σ₁₂.

use crate::error::{Error, Result};
use crate::frametensor::{CentralTensor, FrameTensorField};
use crate::matalg::checked_inverse;

/// Condition number above which σ⁻¹ is treated as unavailable.
pub const INVERSE_COND_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct Braiding {
    n: usize,
    s: CentralTensor,
    s_inv: Option<CentralTensor>,
    cond: f64,
}

impl Braiding {
    pub fn new(s: CentralTensor) -> Result<Self> {
        if s.rank() != 4 {
            return Err(Error::Shape(format!("S must have rank 4, got {}", s.rank())));
        }
        let n = s.n();
        let (s_inv, cond) = match checked_inverse(&s.to_matrix()?, INVERSE_COND_LIMIT) {
            Some((inv, cond)) => (Some(CentralTensor::from_matrix(n, 2, &inv)?), cond),
            None => (None, f64::INFINITY),
        };
        Ok(Self { n, s, s_inv, cond })
    }

    /// σ = ε, the plain flip.
    pub fn flip(n: usize) -> Self {
        Self::new(CentralTensor::flip(n)).expect("flip is rank 4")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> &CentralTensor {
        &self.s
    }

    /// σ⁻¹, absent when S is singular or its condition number exceeds
    /// [`INVERSE_COND_LIMIT`].
    pub fn s_inv(&self) -> Option<&CentralTensor> {
        self.s_inv.as_ref()
    }

    pub fn condition_number(&self) -> f64 {
        self.cond
    }
}

/// `S^{ab}{}_{cd} = T^{ab}{}_{ef}(δ^e_cδ^f_d − P^{ef}{}_{cd}) − δ^a_cδ^b_d`.
pub fn sigma_from_tau(t: &CentralTensor, p: &CentralTensor) -> Result<Braiding> {
    if t.rank() != 4 || p.rank() != 4 || t.n() != p.n() {
        return Err(Error::Shape("tau and P must be rank-4 tensors over the same frame".into()));
    }
    let n = p.n();
    let id = CentralTensor::identity(n, 2);
    let s = t.then(&id.sub(p)?)?.sub(&id)?;
    Braiding::new(s)
}

/// max |(S + δ)∘P|.
pub fn check_sigma_consistency(s: &CentralTensor, p: &CentralTensor) -> Result<f64> {
    let id = CentralTensor::identity(s.n(), 2);
    Ok(s.add(&id)?.then(p)?.max_abs())
}

pub fn apply_sigma_at(t: &FrameTensorField, b: &Braiding, pos: usize) -> Result<FrameTensorField> {
    t.apply_central_at(&b.s, pos)
}

/// The degree-`degree` operator of a word in the lifted generator `gen`
/// (rank 4), rightmost letter acting first.
pub fn word_operator(gen: &CentralTensor, degree: usize, letters: &[usize]) -> Result<CentralTensor> {
    let mut op = CentralTensor::identity(gen.n(), degree);
    for &pos in letters.iter().rev() {
        op = op.then_at(gen, pos)?;
    }
    Ok(op)
}

/// Applies a word to a field, rightmost letter first.
pub fn apply_word(t: &FrameTensorField, gen: &CentralTensor, letters: &[usize]) -> Result<FrameTensorField> {
    letters
        .iter()
        .rev()
        .try_fold(t.clone(), |acc, &pos| acc.apply_central_at(gen, pos))
}

/// max |σ₁₂σ₂₃σ₁₂ − σ₂₃σ₁₂σ₂₃|.
pub fn check_braid(b: &Braiding) -> Result<f64> {
    let lhs = word_operator(&b.s, 3, &[1, 2, 1])?;
    let rhs = word_operator(&b.s, 3, &[2, 1, 2])?;
    lhs.max_abs_diff(&rhs)
}

/// `J^{ab}{}_{pq}J^{pc}{}_{dr}J^{qr}{}_{ef}`.
pub fn yang_baxter_lhs(j: &CentralTensor) -> CentralTensor {
    let n = j.n();
    CentralTensor::from_fn(n, 6, |i| {
        let (a, b, c, d, e, f) = (i[0], i[1], i[2], i[3], i[4], i[5]);
        let mut acc = crate::matalg::ZERO;
        for p in 0..n {
            for q in 0..n {
                let x = j.get(&[a, b, p, q]);
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for r in 0..n {
                    acc += x * j.get(&[p, c, d, r]) * j.get(&[q, r, e, f]);
                }
            }
        }
        acc
    })
}

/// `J^{bc}{}_{pq}J^{aq}{}_{rf}J^{rp}{}_{de}`.
pub fn yang_baxter_rhs(j: &CentralTensor) -> CentralTensor {
    let n = j.n();
    CentralTensor::from_fn(n, 6, |i| {
        let (a, b, c, d, e, f) = (i[0], i[1], i[2], i[3], i[4], i[5]);
        let mut acc = crate::matalg::ZERO;
        for p in 0..n {
            for q in 0..n {
                let x = j.get(&[b, c, p, q]);
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for r in 0..n {
                    acc += x * j.get(&[a, q, r, f]) * j.get(&[r, p, d, e]);
                }
            }
        }
        acc
    })
}

pub fn check_yang_baxter(j: &CentralTensor) -> Result<f64> {
    if j.rank() != 4 {
        return Err(Error::Shape(format!("J must have rank 4, got {}", j.rank())));
    }
    yang_baxter_lhs(j).max_abs_diff(&yang_baxter_rhs(j))
}

/// Word moving a leading p-block past a trailing k-block:
/// σ(ξ⊗ζ) for ξ of degree p and ζ of degree k.
pub fn block_word(p: usize, k: usize) -> Vec<usize> {
    let mut applied = Vec::with_capacity(p * k);
    for j in 0..k {
        for i in (1..=p).rev() {
            applied.push(i + j);
        }
    }
    applied.reverse();
    applied
}

/// The extended braiding on Ω^{⊗p} ⊗ Ω^{⊗k}, as a rank-2(p+k) operator.
pub fn extend_sigma_block(b: &Braiding, p: usize, k: usize) -> Result<CentralTensor> {
    if p == 0 || k == 0 {
        return Err(Error::Shape("block sizes must be positive".into()));
    }
    word_operator(&b.s, p + k, &block_word(p, k))
}

/// The block braiding of sizes (p, k) sitting at 0-based slot `offset` of a
/// degree-`degree` tensor.
fn block_at(b: &Braiding, p: usize, k: usize, offset: usize, degree: usize) -> Result<CentralTensor> {
    CentralTensor::lift(&extend_sigma_block(b, p, k)?, degree, offset + 1)
}

/// Largest difference between the direct block braiding and every recursive
/// bracketing, over all (p, k) with p + k ≤ `max_degree`.
pub fn check_block_unambiguity(b: &Braiding, max_degree: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for total in 3..=max_degree {
        for p in 1..total {
            let k = total - p;
            let direct = extend_sigma_block(b, p, k)?;
            // (ξ⊗η)⊗ζ: move ζ past η, then past ξ
            for p1 in 1..p {
                let p2 = p - p1;
                let alt = block_at(b, p2, k, p1, total)?.then(&block_at(b, p1, k, 0, total)?)?;
                worst = worst.max(alt.max_abs_diff(&direct)?);
            }
            // ξ⊗(η⊗ζ): move η past ξ, then ζ past ξ
            for k1 in 1..k {
                let k2 = k - k1;
                let alt = block_at(b, p, k1, 0, total)?.then(&block_at(b, p, k2, k1, total)?)?;
                worst = worst.max(alt.max_abs_diff(&direct)?);
            }
        }
    }
    Ok(worst)
}

/// Braid equation for block braidings on X⊗Y⊗Z with all block sizes ≥ 1 and
/// total degree ≤ `max_degree`.
pub fn check_block_braid(b: &Braiding, max_degree: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in 1..=max_degree {
        for q in 1..=max_degree {
            for r in 1..=max_degree {
                let total = p + q + r;
                if total > max_degree {
                    continue;
                }
                let lhs = block_at(b, p, q, 0, total)?
                    .then(&block_at(b, p, r, q, total)?)?
                    .then(&block_at(b, q, r, 0, total)?)?;
                let rhs = block_at(b, q, r, p, total)?
                    .then(&block_at(b, p, r, 0, total)?)?
                    .then(&block_at(b, p, q, r, total)?)?;
                worst = worst.max(lhs.max_abs_diff(&rhs)?);
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeSide {
    /// Ω²⊗Ω¹ → Ω¹⊗Ω²
    TwoOne,
    /// Ω¹⊗Ω² → Ω²⊗Ω¹
    OneTwo,
}

/// σ on Ω²⊗Ω¹ or Ω¹⊗Ω². The input must already be P-invariant on its wedge
/// pair within `tol`.
pub fn sigma_on_wedge(
    b: &Braiding,
    p: &CentralTensor,
    side: WedgeSide,
    t: &FrameTensorField,
    tol: f64,
) -> Result<FrameTensorField> {
    if t.degree() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            found: t.degree(),
        });
    }
    let (in_pos, blocks, out_pos) = match side {
        WedgeSide::TwoOne => (1, (2, 1), 2),
        WedgeSide::OneTwo => (2, (1, 2), 1),
    };
    let defect = t.apply_central_at(p, in_pos)?.max_coeff_diff(t)?;
    if defect > tol {
        return Err(Error::Invariant {
            name: "input_wedge_projected",
            detail: format!("input is not P-invariant at position {in_pos} (defect {defect:e})"),
        });
    }
    let sigma = extend_sigma_block(b, blocks.0, blocks.1)?;
    t.apply_central_at(&sigma, 1)?.wedge_project(out_pos, p)
}
