//! The star structure on forms: I, J, the involutions ȷ_n built from
//! reduced words, and the reality conditions.
//!
//! ȷ_n is antilinear. On a field `t_A θ^A` it acts as
//! `t_A ↦ Σ_A J^{(n)A}{}_C t_A*` at index C, so a composite of antilinear maps
//! conjugates the tensor of every second factor.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::braiding::{word_operator, Braiding};
use crate::calculus::{differential0, differential1, FrameGeometry};
use crate::connection::{check_equi, dn, Connection};
use crate::error::{Error, Result};
use crate::fixtures::random_element;
use crate::frametensor::{pow, unflatten, CentralTensor, FrameTensorField};
use crate::matalg::{AlgebraElement, ONE, ZERO};

/// A word in adjacent generators on `n` strands; rightmost letter acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationWord {
    n: usize,
    letters: Vec<usize>,
}

impl PermutationWord {
    pub fn new(n: usize, letters: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&i| i == 0 || i >= n) {
            return Err(Error::PositionOutOfRange {
                pos: bad,
                width: 2,
                degree: n,
            });
        }
        Ok(Self { n, letters })
    }

    /// W₂ = [1], W_n = W_{n−1} ++ [n−1, …, 1].
    pub fn reverse(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Shape(format!("reverse word needs n ≥ 2, got {n}")));
        }
        let mut letters = vec![1];
        for m in 3..=n {
            letters.extend((1..m).rev());
        }
        Self::new(n, letters)
    }

    /// A second reduced word for ε_n: W′₂ = [1],
    /// W′_n = (W′_{n−1} shifted by one) ++ [1, …, n−1].
    pub fn alternative(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Shape(format!("reverse word needs n ≥ 2, got {n}")));
        }
        let mut letters = vec![1];
        for m in 3..=n {
            let mut next: Vec<usize> = letters.iter().map(|i| i + 1).collect();
            next.extend(1..m);
            letters = next;
        }
        Self::new(n, letters)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// The word read as transpositions acting on `(1, …, n)`.
    pub fn evaluate(&self) -> Vec<usize> {
        let mut seq: Vec<usize> = (1..=self.n).collect();
        for &i in self.letters.iter().rev() {
            seq.swap(i - 1, i);
        }
        seq
    }

    /// The word in σ as a rank-2n operator.
    pub fn sigma_operator(&self, b: &Braiding) -> Result<CentralTensor> {
        word_operator(b.s(), self.n, &self.letters)
    }
}

/// ℓ_n on basis monomials: θ^A ↦ θ^{rev A}.
pub fn reversal(n: usize, degree: usize) -> CentralTensor {
    CentralTensor::from_fn(n, 2 * degree, |i| {
        let (up, down) = i.split_at(degree);
        if up.iter().rev().eq(down.iter()) {
            ONE
        } else {
            ZERO
        }
    })
}

/// `I^{ab}{}_{cd} = −P^{ba}{}_{cd}`.
pub fn build_i(p: &CentralTensor) -> CentralTensor {
    p.permute_indices(&[1, 0, 2, 3]).scale(-ONE)
}

/// `J^{ab}{}_{cd} = S^{ba}{}_{cd}`.
pub fn build_j(s: &CentralTensor) -> CentralTensor {
    s.permute_indices(&[1, 0, 2, 3])
}

/// J^{(n)} from an explicit word: ℓ_n followed by the σ-word.
pub fn build_jn_with_word(b: &Braiding, word: &PermutationWord) -> Result<CentralTensor> {
    reversal(b.n(), word.n()).then(&word.sigma_operator(b)?)
}

/// J^{(n)} from the canonical reverse word; J^{(1)} = δ.
pub fn build_jn(b: &Braiding, order: usize) -> Result<CentralTensor> {
    match order {
        0 => Err(Error::Shape("ȷ_n needs n ≥ 1".into())),
        1 => Ok(CentralTensor::identity(b.n(), 1)),
        _ => build_jn_with_word(b, &PermutationWord::reverse(order)?),
    }
}

/// The recursive decompositions of ȷ₃ and ȷ₄:
/// `σ₁₂σ₂₃ε₂₃ε₁₂(ȷ₁⊗ȷ₂)`, `σ₁₂σ₂₃σ₃₄ε₃₄ε₂₃ε₁₂(ȷ₁⊗ȷ₃)` and
/// `σ₂₃σ₃₄σ₁₂σ₂₃ε₂₃ε₁₂ε₃₄ε₂₃(ȷ₂⊗ȷ₂)`.
pub fn recursive_forms(b: &Braiding) -> Result<Vec<(usize, CentralTensor)>> {
    let n = b.n();
    let flip = CentralTensor::flip(n);
    let j1 = CentralTensor::identity(n, 1);
    let j2 = build_j(b.s());
    let j3 = build_jn(b, 3)?;

    let chain = |start: CentralTensor, eps: &[usize], sig: &[usize]| -> Result<CentralTensor> {
        let mut op = start;
        for &e in eps {
            op = op.then_at(&flip, e)?;
        }
        for &s in sig {
            op = op.then_at(b.s(), s)?;
        }
        Ok(op)
    };
    Ok(vec![
        (3, chain(j1.kron(&j2)?, &[1, 2], &[2, 1])?),
        (4, chain(j1.kron(&j3)?, &[1, 2, 3], &[3, 2, 1])?),
        (4, chain(j2.kron(&j2)?, &[2, 3, 1, 2], &[2, 1, 3, 2])?),
    ])
}

/// The star of a degree-p field, given J^{(p)} (ignored for p = 0).
pub fn star_form(t: &FrameTensorField, jn: &CentralTensor) -> Result<FrameTensorField> {
    if t.degree() == 0 {
        return Ok(t.adjoint_coeffs());
    }
    if jn.rank() != 2 * t.degree() {
        return Err(Error::DegreeMismatch {
            expected: t.degree(),
            found: jn.rank() / 2,
        });
    }
    t.adjoint_coeffs().apply_central_at(jn, 1)
}

/// max |conj(J)∘J − δ| for an antilinear map with tensor J.
pub fn involutivity_residual(j: &CentralTensor) -> Result<f64> {
    let k = j.rank() / 2;
    j.conj().then(j)?.max_abs_diff(&CentralTensor::identity(j.n(), k))
}

pub fn check_jn_involutive(b: &Braiding, order: usize) -> Result<f64> {
    involutivity_residual(&build_jn(b, order)?)
}

/// `(S^{ba}{}_{cd})* S^{dc}{}_{ef} = δ^a_eδ^b_f`.
pub fn check_sigma_unitarity(s: &CentralTensor) -> Result<f64> {
    involutivity_residual(&build_j(s))
}

/// Residual of `σ_{i(i+1)}ℓ_n = ℓ_nσ⁻¹_{(n−i)(n+1−i)}`; `None` when σ⁻¹ is
/// unavailable.
pub fn check_fifa(b: &Braiding, order: usize, i: usize) -> Result<Option<f64>> {
    let Some(s_inv) = b.s_inv() else {
        return Ok(None);
    };
    if i == 0 || i >= order {
        return Err(Error::PositionOutOfRange {
            pos: i,
            width: 2,
            degree: order,
        });
    }
    let l = reversal(b.n(), order);
    let lhs = l.then(&CentralTensor::lift(b.s(), order, i)?)?;
    let rhs = CentralTensor::lift(s_inv, order, order - i)?.conj().then(&l)?;
    Ok(Some(lhs.max_abs_diff(&rhs)?))
}

/// Residual of `σ₁₂⁻¹ȷ₄ = ȷ₄σ₁₂`; `None` when σ⁻¹ is unavailable.
pub fn check_sigma_inv_j4(b: &Braiding) -> Result<Option<f64>> {
    let Some(s_inv) = b.s_inv() else {
        return Ok(None);
    };
    let j4 = build_jn(b, 4)?;
    let lhs = j4.then(&CentralTensor::lift(s_inv, 4, 1)?)?;
    let rhs = CentralTensor::lift(b.s(), 4, 1)?.conj().then(&j4)?;
    Ok(Some(lhs.max_abs_diff(&rhs)?))
}

/// Worst of the product-compatibility identities linking P, I and J:
/// `P*J = I`, `IP = I`, `I*I = P` and `(P^{ab}{}_{cd})*P^{dc}{}_{ef} = P^{ba}{}_{ef}`.
pub fn check_product_compatibility(p: &CentralTensor, s: &CentralTensor) -> Result<f64> {
    let i = build_i(p);
    let j = build_j(s);
    let swapped_upper = p.permute_indices(&[1, 0, 2, 3]);
    let r = [
        p.conj().then(&j)?.max_abs_diff(&i)?,
        i.then(p)?.max_abs_diff(&i)?,
        i.conj().then(&i)?.max_abs_diff(p)?,
        p.conj()
            .then(&swapped_upper)?
            .max_abs_diff(&swapped_upper)?,
    ];
    Ok(r.into_iter().fold(0.0, f64::max))
}

/// Star of a 2-form through the tensor product: `π ∘ ȷ₂`, i.e.
/// `c_{ab}θ^a⊗θ^b ↦ c*_{ab}J^{ab}{}_{pq}P^{pq}{}_{cd}θ^c⊗θ^d`.
pub fn star_two_form(t: &FrameTensorField, p: &CentralTensor, s: &CentralTensor) -> Result<FrameTensorField> {
    t.adjoint_coeffs().apply_central_at(&build_j(s).then(p)?, 1)
}

/// Worst of `(θ^aθ^b)* + θ^bθ^a` and of `(df dg)* + dg* df*` over seeded
/// pairs, all in the P-projected representation with the star taken as
/// `π ∘ ȷ₂`.
pub fn check_wedge_star(geom: &FrameGeometry, seed: u64, samples: usize) -> Result<f64> {
    let p = &geom.p;
    let basis_star = p.conj().then(&build_j(&geom.s))?.then(p)?;
    let mut worst = basis_star.add(&p.permute_indices(&[1, 0, 2, 3]))?.max_abs();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f = random_element(&mut rng, geom.dim);
        let g = random_element(&mut rng, geom.dim);
        let dg = differential0(&g, geom)?;
        let dfdg = differential1(&dg.left_mul(&f)?, geom)?;
        let lhs = star_two_form(&dfdg, p, &geom.s)?;
        let rhs = differential0(&g.adjoint(), geom)?
            .tensor_product(&differential0(&f.adjoint(), geom)?)?
            .wedge_project(1, p)?
            .scale(-ONE);
        worst = worst.max(lhs.max_coeff_diff(&rhs)?);
    }
    Ok(worst)
}

/// max |S^{ab}{}_{cd}g^{cd} − (g^{ba})*|.
pub fn check_metric_reality(g: &CentralTensor, s: &CentralTensor) -> Result<f64> {
    let n = g.n();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut acc = -g.get(&[b, a]).conj();
            for c in 0..n {
                for d in 0..n {
                    acc += s.get(&[a, b, c, d]) * g.get(&[c, d]);
                }
            }
            worst = worst.max(acc.norm());
        }
    }
    Ok(worst)
}

/// max over (a, b, c) of `‖(ω^a{}_{bc})* − ω^a{}_{de}(J^{de}{}_{bc})*‖_F`.
pub fn check_connection_reality(conn: &Connection, j: &CentralTensor) -> f64 {
    let n = conn.n();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut m = conn.omega(a, b, c).adjoint();
                for d in 0..n {
                    for e in 0..n {
                        let jv = j.get(&[d, e, b, c]).conj();
                        if jv != ZERO {
                            m = &m - &conn.omega(a, d, e).scale(jv);
                        }
                    }
                }
                worst = worst.max(m.frobenius_norm());
            }
        }
    }
    worst
}

/// The four-term second reality condition
/// `J^{ab}{}_{pe}ω^p{}_{cd} − J^{ap}{}_{de}ω^b{}_{cp} + J^{ab}{}_{pq}J^{rp}{}_{cd}ω^q{}_{re} − J^{qb}{}_{cp}J^{rp}{}_{de}ω^a{}_{qr}`.
pub fn real2nd_residual(conn: &Connection, j: &CentralTensor) -> f64 {
    let n = conn.n();
    let dim = conn.dim();
    let mut worst = 0.0f64;
    let mut idx = [0usize; 5];
    for flat in 0..pow(n, 5) {
        let u = unflatten(flat, n, 5);
        idx.copy_from_slice(&u);
        let [a, b, c, d, e] = idx;
        let mut m = AlgebraElement::zeros(dim);
        for p in 0..n {
            let x = j.get(&[a, b, p, e]);
            if x != ZERO {
                m = &m + &conn.omega(p, c, d).scale(x);
            }
            let y = j.get(&[a, p, d, e]);
            if y != ZERO {
                m = &m - &conn.omega(b, c, p).scale(y);
            }
            for q in 0..n {
                let x = j.get(&[a, b, p, q]);
                for r in 0..n {
                    if x != ZERO {
                        let w = x * j.get(&[r, p, c, d]);
                        if w != ZERO {
                            m = &m + &conn.omega(q, r, e).scale(w);
                        }
                    }
                    let w = j.get(&[q, b, c, p]) * j.get(&[r, p, d, e]);
                    if w != ZERO {
                        m = &m - &conn.omega(a, q, r).scale(w);
                    }
                }
            }
        }
        worst = worst.max(m.frobenius_norm());
    }
    worst
}

/// max over basis monomials θ^A of degree `order` of
/// `‖D_n(ȷ_n θ^A) − ȷ_{n+1}(D_n θ^A)‖`.
pub fn check_dn_reality(conn: &Connection, geom: &FrameGeometry, b: &Braiding, order: usize) -> Result<f64> {
    let jn = build_jn(b, order)?;
    let jn1 = build_jn(b, order + 1)?;
    let mut worst = 0.0f64;
    for flat in 0..pow(geom.n, order) {
        let basis = geom.frame_basis(&unflatten(flat, geom.n, order));
        let lhs = dn(conn, geom, b.s(), &star_form(&basis, &jn)?)?;
        let rhs = star_form(&dn(conn, geom, b.s(), &basis)?, &jn1)?;
        worst = worst.max(lhs.max_coeff_diff(&rhs)?);
    }
    Ok(worst)
}

/// The three equivalent forms of the second reality condition together with
/// the first one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D2Reality {
    pub real1st: f64,
    pub dopo: f64,
    pub real2nd: f64,
    pub equi: f64,
}

impl D2Reality {
    /// The three forms must agree (all ≤ tol or all > tol) up to a 10× band.
    /// The equivalence presupposes the first reality condition, so nothing
    /// is enforced when it fails.
    pub fn consistent(&self, tol: f64) -> bool {
        if self.real1st > tol {
            return true;
        }
        let r = [self.dopo, self.real2nd, self.equi];
        let any_small = r.iter().any(|&x| x <= tol);
        let any_large = r.iter().any(|&x| x > 10.0 * tol);
        !(any_small && any_large)
    }

    pub fn worst(&self) -> f64 {
        self.dopo.max(self.real2nd).max(self.equi)
    }
}

pub fn check_d2_reality(conn: &Connection, geom: &FrameGeometry, b: &Braiding) -> Result<D2Reality> {
    let j = build_j(b.s());
    Ok(D2Reality {
        real1st: check_connection_reality(conn, &j),
        dopo: check_dn_reality(conn, geom, b, 2)?,
        real2nd: real2nd_residual(conn, &j),
        equi: check_equi(conn, geom, b.s())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{phase_twist_braiding, su2_flip_geometry};
    use crate::matalg::c64;
    use std::f64::consts::PI;

    #[test]
    fn reverse_words() {
        assert_eq!(PermutationWord::reverse(2).unwrap().letters(), &[1]);
        assert_eq!(PermutationWord::reverse(3).unwrap().letters(), &[1, 2, 1]);
        assert_eq!(PermutationWord::reverse(4).unwrap().letters(), &[1, 2, 1, 3, 2, 1]);
        assert_eq!(PermutationWord::reverse(5).unwrap().evaluate(), vec![5, 4, 3, 2, 1]);
        assert!(PermutationWord::reverse(1).is_err());
        assert_eq!(PermutationWord::alternative(3).unwrap().letters(), &[2, 1, 2]);
        assert_eq!(PermutationWord::alternative(4).unwrap().letters(), &[3, 2, 3, 1, 2, 3]);
        for n in 2..=6 {
            let expected: Vec<usize> = (1..=n).rev().collect();
            assert_eq!(PermutationWord::alternative(n).unwrap().evaluate(), expected);
        }
        assert!(PermutationWord::new(3, vec![3]).is_err());
    }

    #[test]
    fn i_and_j_tensors() {
        let p = CentralTensor::antisymmetrizer(3);
        assert_eq!(build_i(&p), p);
        assert_eq!(build_i(&CentralTensor::zeros(3, 4)).max_abs(), 0.0);
        assert_eq!(build_j(&CentralTensor::flip(3)), CentralTensor::identity(3, 2));

        let (b, pt) = phase_twist_braiding(3, &[(0, 1, c64(0.0, PI / 5.0).exp())]).unwrap();
        let j = build_j(b.s());
        let lam = b.s().get(&[0, 1, 1, 0]);
        assert_eq!(j.get(&[1, 0, 1, 0]), lam);
        assert!(check_sigma_unitarity(b.s()).unwrap() < 1e-15);
        assert!(check_product_compatibility(&pt, b.s()).unwrap() < 1e-15);
        assert!(check_product_compatibility(&p, &CentralTensor::flip(3)).unwrap() < 1e-15);
    }

    #[test]
    fn flip_jn_is_identity() {
        let b = Braiding::flip(2);
        for order in 1..=5 {
            let j = build_jn(&b, order).unwrap();
            assert_eq!(j, CentralTensor::identity(2, order));
        }
        assert_eq!(build_jn(&b, 2).unwrap(), build_j(b.s()));
    }

    #[test]
    fn star_on_forms() {
        let g = su2_flip_geometry();
        let j1 = CentralTensor::identity(3, 1);
        let xi = g.frame_basis(&[0]).left_mul(&g.lambda[0]).unwrap();
        let s = star_form(&xi, &j1).unwrap();
        assert_eq!(s.coeff(&[0]), -&g.lambda[0]);

        let th = crate::calculus::dirac_form(&g);
        assert!(star_form(&th, &j1).unwrap().max_coeff_diff(&th.scale(-ONE)).unwrap() < 1e-15);

        let b = Braiding::flip(3);
        let mono = g.frame_basis(&[0, 2]);
        let j2 = build_jn(&b, 2).unwrap();
        assert_eq!(star_form(&mono, &j2).unwrap(), mono);
        assert!(star_form(&mono, &j1).is_err());
    }

    #[test]
    fn flip_fifa_and_metric_reality() {
        let b = Braiding::flip(3);
        assert_eq!(check_fifa(&b, 3, 1).unwrap(), Some(0.0));
        assert_eq!(check_sigma_inv_j4(&b).unwrap(), Some(0.0));

        let g = CentralTensor::identity(3, 1);
        assert_eq!(check_metric_reality(&g, b.s()).unwrap(), 0.0);
        let mut bad = g.clone();
        bad.set(&[0, 1], c64(0.0, 0.5));
        bad.set(&[1, 0], c64(0.0, -0.2));
        assert!(check_metric_reality(&bad, b.s()).unwrap() > 1e-3);
    }
}
