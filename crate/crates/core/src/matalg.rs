//! Arithmetic in the underlying algebra M_N(ℂ).

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };
pub const I: C64 = Complex { re: 0.0, im: 1.0 };

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// An element of M_N(ℂ).
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement(DMatrix<C64>);

impl AlgebraElement {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::Shape(format!(
                "algebra element must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    /// Builds from row-major rows. Panics on ragged input; use
    /// [`AlgebraElement::from_matrix`] for fallible construction.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        assert!(n > 0 && rows.iter().all(|r| r.len() == n), "rows must form a square grid");
        Self(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn scalar(dim: usize, c: C64) -> Self {
        Self(DMatrix::identity(dim, dim) * c)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Conjugate transpose; the *-operation of the algebra.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column-major view of the entries.
    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    /// ‖A + A*‖_F; zero iff A is antihermitian.
    pub fn antihermitian_residual(&self) -> f64 {
        (&self.0 + self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// `AB − BA`.
pub fn commutator(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_dim(b)?;
    Ok(AlgebraElement(&a.0 * &b.0 - &b.0 * &a.0))
}

/// max over the generators of ‖[λ_a, A]‖_F. Zero iff `a` commutes with every
/// generator, which is how membership in the center is tested.
pub fn centrality_residual(a: &AlgebraElement, generators: &[AlgebraElement]) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in generators {
        worst = worst.max(commutator(g, a)?.frobenius_norm());
    }
    Ok(worst)
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        AlgebraElement(&self.0 * &rhs.0)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-&self.0)
    }
}

/// Inverse of a square complex matrix together with its 2-norm condition
/// number. `None` when the matrix is numerically singular or the condition
/// number exceeds `cond_limit`.
pub(crate) fn checked_inverse(m: &DMatrix<C64>, cond_limit: f64) -> Option<(DMatrix<C64>, f64)> {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min == 0.0 {
        return None;
    }
    let cond = max / min;
    if !cond.is_finite() || cond > cond_limit {
        return None;
    }
    m.clone().try_inverse().map(|inv| (inv, cond))
}

/// Minimum-norm least-squares solution of `x · a = b` for row vectors `x`, `b`.
pub(crate) fn solve_row_min_norm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    // x a = b  <=>  aᵀ xᵀ = bᵀ
    let at = a.transpose();
    let svd = at.svd(true, true);
    let sol = svd
        .solve(&b.transpose(), 1e-12)
        .expect("svd computed with both factors");
    sol.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_lambda(k: usize) -> AlgebraElement {
        let h = -0.5 * I;
        let rows = match k {
            1 => vec![vec![ZERO, h], vec![h, ZERO]],
            2 => vec![vec![ZERO, -h * I], vec![h * I, ZERO]],
            _ => vec![vec![h, ZERO], vec![ZERO, -h]],
        };
        AlgebraElement::from_rows(&rows)
    }

    #[test]
    fn adjoint_examples() {
        let id = AlgebraElement::identity(2);
        assert_eq!(id.adjoint(), id);

        let a = AlgebraElement::from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]);
        let expected = AlgebraElement::from_rows(&[vec![ZERO, ZERO], vec![ONE, ZERO]]);
        assert_eq!(a.adjoint(), expected);

        for k in 1..=3 {
            let l = pauli_lambda(k);
            assert_eq!(l.adjoint(), -&l);
            assert!(l.antihermitian_residual() < 1e-15);
        }
    }

    #[test]
    fn commutator_examples() {
        let l1 = pauli_lambda(1);
        let l2 = pauli_lambda(2);
        let l3 = pauli_lambda(3);
        assert_eq!(commutator(&l1, &l1).unwrap().frobenius_norm(), 0.0);
        assert!((&commutator(&l1, &l2).unwrap() - &l3).frobenius_norm() < 1e-15);
        let id = AlgebraElement::identity(2);
        assert_eq!(commutator(&id, &l2).unwrap().frobenius_norm(), 0.0);

        let big = AlgebraElement::identity(3);
        assert!(matches!(
            commutator(&l1, &big),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn centrality_examples() {
        let gens = [pauli_lambda(1), pauli_lambda(2), pauli_lambda(3)];
        let three = AlgebraElement::scalar(2, c64(3.0, 0.0));
        assert_eq!(centrality_residual(&three, &gens).unwrap(), 0.0);
        assert_eq!(centrality_residual(&AlgebraElement::zeros(2), &gens).unwrap(), 0.0);
        // [λ₁, λ₃] = −λ₂ and ‖λ₂‖_F = 1/√2
        let r = centrality_residual(&gens[2], &gens).unwrap();
        assert!((r - gens[1].frobenius_norm()).abs() < 1e-15);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inverse_refuses_singular() {
        let m = DMatrix::from_element(2, 2, ONE);
        assert!(checked_inverse(&m, 1e12).is_none());
        let (inv, cond) = checked_inverse(&DMatrix::identity(3, 3), 1e12).unwrap();
        assert_eq!(inv, DMatrix::identity(3, 3));
        assert!((cond - 1.0).abs() < 1e-12);
    }
}
