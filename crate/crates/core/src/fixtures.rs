//! Built-in geometries and braidings, and seeded random generators.
//!
//! Pauli matrices: σ₁ = [[0,1],[1,0]], σ₂ = [[0,−i],[i,0]], σ₃ = [[1,0],[0,−1]];
//! the su2 frame uses λ_a = −(i/2)σ_a so that [λ₁, λ₂] = λ₃.
//!
//! Random entries are drawn uniformly from the complex unit square
//! `[0,1) + i[0,1)` with ChaCha8 seeded by `seed_from_u64`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::braiding::{sigma_from_tau, Braiding};
use crate::calculus::FrameGeometry;
use crate::connection::{torsion_free_chi, torsion_free_connection, Connection};
use crate::error::{Error, Result};
use crate::frametensor::{CentralTensor, FrameTensorField};
use crate::matalg::{c64, AlgebraElement, C64, I, ONE, ZERO};

pub fn pauli(k: usize) -> AlgebraElement {
    let rows = match k {
        0 => vec![vec![ZERO, ONE], vec![ONE, ZERO]],
        1 => vec![vec![ZERO, -I], vec![I, ZERO]],
        2 => vec![vec![ONE, ZERO], vec![ZERO, -ONE]],
        _ => panic!("Pauli index {k} out of range"),
    };
    AlgebraElement::from_rows(&rows)
}

/// λ_a = −(i/2)σ_a, a = 0, 1, 2.
pub fn su2_lambdas() -> Vec<AlgebraElement> {
    (0..3).map(|k| pauli(k).scale(c64(0.0, -0.5))).collect()
}

/// ε_{abc} on 0-based indices.
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn epsilon_f(scale: impl Fn(usize, usize) -> C64) -> CentralTensor {
    // F^c_{ab} stored as [c, a, b]
    CentralTensor::from_fn(3, 3, |i| scale(i[1], i[2]) * levi_civita(i[1], i[2], i[0]))
}

/// N = 2, n = 3, P the antisymmetrizer, σ the flip, F^c{}_{ab} = ε_{abc},
/// K = 0, g = δ.
pub fn su2_flip_geometry() -> FrameGeometry {
    let mut g = FrameGeometry::new(
        su2_lambdas(),
        CentralTensor::antisymmetrizer(3),
        CentralTensor::flip(3),
    )
    .expect("three generators");
    g.f = epsilon_f(|_, _| ONE);
    g
}

/// The su2 flip geometry with χ = ½ε added to D_(0) = 0, which is torsion-free.
pub fn su2_torsionfree_connection() -> (FrameGeometry, Connection) {
    let mut g = su2_flip_geometry();
    g.chi = Some(torsion_free_chi(&g).expect("projector solve"));
    let conn = torsion_free_connection(&g).expect("shapes agree");
    (g, conn)
}

/// `S^{ab}{}_{cd} = Λ_{ab}δ^a_dδ^b_c` with `P = (δ − S)/2`.
///
/// Requires |Λ_{ab}| = 1, Λ_{ab}Λ_{ba} = 1 and Λ_{aa} = 1.
pub fn phase_twist_from_matrix(lam: &DMatrix<C64>, tol: f64) -> Result<(Braiding, CentralTensor)> {
    let n = lam.nrows();
    if lam.ncols() != n {
        return Err(Error::Shape("phase matrix must be square".into()));
    }
    for a in 0..n {
        for b in 0..n {
            let l = lam[(a, b)];
            let bad = if (l.norm() - 1.0).abs() > tol {
                Some("|Λ_ab| = 1")
            } else if (l * lam[(b, a)] - ONE).norm() > tol {
                Some("Λ_ab Λ_ba = 1")
            } else if a == b && (l - ONE).norm() > tol {
                Some("Λ_aa = 1")
            } else {
                None
            };
            if let Some(rule) = bad {
                return Err(Error::Invariant {
                    name: "phase_twist",
                    detail: format!("{rule} fails at ({a},{b})"),
                });
            }
        }
    }
    let s = CentralTensor::from_fn(n, 4, |i| {
        if i[0] == i[3] && i[1] == i[2] {
            lam[(i[0], i[1])]
        } else {
            ZERO
        }
    });
    let p = CentralTensor::identity(n, 2).sub(&s)?.scale(c64(0.5, 0.0));
    Ok((Braiding::new(s)?, p))
}

/// Phase twist with the listed entries `Λ_{ab}` (a ≠ b); `Λ_{ba}` is forced to
/// the inverse and unlisted entries are 1.
pub fn phase_twist_braiding(n: usize, phases: &[(usize, usize, C64)]) -> Result<(Braiding, CentralTensor)> {
    let mut lam = DMatrix::from_element(n, n, ONE);
    for &(a, b, z) in phases {
        if a >= n || b >= n || a == b {
            return Err(Error::Invariant {
                name: "phase_twist",
                detail: format!("phase position ({a},{b}) must be off-diagonal and below {n}"),
            });
        }
        lam[(a, b)] = z;
        lam[(b, a)] = ONE / z;
    }
    phase_twist_from_matrix(&lam, 1e-12)
}

/// Phase twist with every upper-triangular phase drawn from `seed`.
pub fn random_phase_twist(n: usize, seed: u64) -> (Braiding, CentralTensor) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phases = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            phases.push((a, b, c64(0.0, angle).exp()));
        }
    }
    phase_twist_braiding(n, &phases).expect("unit phases satisfy the constraints")
}

/// su2 λ's with a phase twist in the (1,2) slot. F^c{}_{ab} =
/// ½ε_{abc}(1 + Λ_{ba}) and K = 0 satisfy the structure condition.
pub fn su2_phase_twist_geometry(phase: C64) -> Result<FrameGeometry> {
    let (b, p) = phase_twist_braiding(3, &[(0, 1, phase)])?;
    let s = b.s().clone();
    let mut g = FrameGeometry::new(su2_lambdas(), p, s.clone())?;
    g.f = epsilon_f(|a, bb| (ONE + s.get(&[bb, a, a, bb])) * 0.5);
    Ok(g)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    c64(rng.random::<f64>(), rng.random::<f64>())
}

pub fn random_element<R: Rng>(rng: &mut R, dim: usize) -> AlgebraElement {
    AlgebraElement::from_matrix(DMatrix::from_fn(dim, dim, |_, _| random_complex(rng))).expect("square")
}

/// (A − A*)/2 for a random A.
pub fn random_antihermitian<R: Rng>(rng: &mut R, dim: usize) -> AlgebraElement {
    let a = random_element(rng, dim);
    (&a - &a.adjoint()).scale(c64(0.5, 0.0))
}

pub fn random_field<R: Rng>(rng: &mut R, n: usize, dim: usize, degree: usize) -> FrameTensorField {
    FrameTensorField::from_fn(n, dim, degree, |_| random_element(rng, dim))
}

pub fn random_central<R: Rng>(rng: &mut R, n: usize, rank: usize) -> CentralTensor {
    CentralTensor::from_fn(n, rank, |_| random_complex(rng))
}

/// A random τ over `n` frame indices.
pub fn random_tau(seed: u64, n: usize) -> CentralTensor {
    random_central(&mut ChaCha8Rng::seed_from_u64(seed), n, 4)
}

/// Orthogonal projector on the n² space from a random Hermitian matrix:
/// eigenvalues are rounded to 0 or 1 at the threshold ½. A rank of 0 or n²
/// falls back to keeping the upper half of the spectrum.
pub fn random_projector<R: Rng>(rng: &mut R, n: usize) -> CentralTensor {
    let m = n * n;
    let a = DMatrix::from_fn(m, m, |_, _| random_complex(rng));
    let h = (&a + a.adjoint()) * c64(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut keep: Vec<bool> = eig.eigenvalues.iter().map(|&v| v > 0.5).collect();
    let rank = keep.iter().filter(|&&k| k).count();
    if rank == 0 || rank == m {
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        let cut = vals[m / 2];
        keep = eig.eigenvalues.iter().map(|&v| v >= cut).collect();
    }
    let mut p = DMatrix::<C64>::zeros(m, m);
    for (k, &on) in keep.iter().enumerate() {
        if on {
            let v = eig.eigenvectors.column(k);
            p += v * v.adjoint();
        }
    }
    CentralTensor::from_matrix(n, 2, &p).expect("square")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomF {
    /// F = 0, K = 0.
    Zero,
    /// Random P-reduced F, K = 0; the structure condition generally fails.
    Random,
    /// F and K fitted to the structure condition by least squares.
    Fitted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomGeometryOptions {
    pub n: usize,
    pub dim: usize,
    pub f: RandomF,
}

impl Default for RandomGeometryOptions {
    fn default() -> Self {
        Self {
            n: 3,
            dim: 2,
            f: RandomF::Zero,
        }
    }
}

/// Seeded random geometry: antihermitian λ, a random projector P, σ from a
/// random τ, g = δ, and F/K per `opts.f`.
pub fn random_geometry(seed: u64, opts: RandomGeometryOptions) -> FrameGeometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = opts.n;
    let lambda: Vec<AlgebraElement> = (0..n).map(|_| random_antihermitian(&mut rng, opts.dim)).collect();
    let p = random_projector(&mut rng, n);
    let tau = random_central(&mut rng, n, 4);
    let b = sigma_from_tau(&tau, &p).expect("shapes agree");
    let mut g = FrameGeometry::new(lambda, p, b.s().clone()).expect("non-empty frame");
    g.tau = Some(tau);
    match opts.f {
        RandomF::Zero => {}
        RandomF::Random => {
            let raw = random_central(&mut rng, n, 3);
            g.f = reduce_rank3(&raw, &g.p);
        }
        RandomF::Fitted => {
            let (f, k) = fit_structure(&g);
            g.f = f;
            g.k = k;
        }
    }
    g
}

/// `X^a{}_{bc}P^{bc}{}_{de}`.
pub fn reduce_rank3(x: &CentralTensor, p: &CentralTensor) -> CentralTensor {
    let n = p.n();
    let xm = DMatrix::from_row_slice(n, n * n, x.data());
    let red = xm * p.to_matrix().expect("rank 4");
    CentralTensor::from_fn(n, 3, |i| red[(i[0], i[1] * n + i[2])])
}

/// Least-squares central F, K with 2λ_cλ_dP^{cd}{}_{ab} ≈ λ_cF^c{}_{ab} + K_{ab}.
pub fn fit_structure(geom: &FrameGeometry) -> (CentralTensor, CentralTensor) {
    let n = geom.n;
    let dim = geom.dim;
    let mut basis: Vec<&[C64]> = geom.lambda.iter().map(|l| l.as_slice()).collect();
    let id = AlgebraElement::identity(dim);
    basis.push(id.as_slice());
    let design = DMatrix::from_fn(dim * dim, n + 1, |r, c| basis[c][r]);
    let svd = design.svd(true, true);

    let mut f = CentralTensor::zeros(n, 3);
    let mut k = CentralTensor::zeros(n, 2);
    for a in 0..n {
        for b in 0..n {
            let mut target = AlgebraElement::zeros(dim);
            for c in 0..n {
                for d in 0..n {
                    let w = geom.p.get(&[c, d, a, b]) * 2.0;
                    if w != ZERO {
                        target = &target + &(&geom.lambda[c] * &geom.lambda[d]).scale(w);
                    }
                }
            }
            let rhs = DMatrix::from_column_slice(dim * dim, 1, target.as_slice());
            let sol = svd.solve(&rhs, 1e-12).expect("both factors computed");
            for c in 0..n {
                f.set(&[c, a, b], sol[(c, 0)]);
            }
            k.set(&[a, b], sol[(n, 0)]);
        }
    }
    (f, k)
}

/// A σ with σ-unitary J that violates the braid equation:
/// J = (1 + iA)(1 − iA)⁻¹ for a random real symmetric A, S^{ab}{}_{cd} = J^{ba}{}_{cd}.
pub fn braid_violating_unitary(seed: u64, n: usize) -> Braiding {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n * n;
    let raw = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() - 0.5);
    let a = (&raw + raw.transpose()).map(|x| c64(x, 0.0));
    let id = DMatrix::<C64>::identity(m, m);
    let inv = (&id - &a * I).try_inverse().expect("1 − iA is invertible for real symmetric A");
    let j = (&id + &a * I) * inv;
    let jt = CentralTensor::from_matrix(n, 2, &j).expect("square");
    Braiding::new(crate::involution::build_j(&jt)).expect("rank 4")
}

/// Registered fixture names.
pub const FIXTURE_NAMES: &[&str] = &["su2-flip", "su2-torsion-free", "su2-phase-twist", "phase-twist", "random"];

/// Parameters for a named fixture.
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureSpec {
    pub name: String,
    pub seed: u64,
    /// Frame dimension for braiding-only and random fixtures.
    pub n: usize,
    /// Twist angle φ, Λ₁₂ = e^{iφ}.
    pub phase: f64,
}

impl FixtureSpec {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            seed: 42,
            n: 3,
            phase: std::f64::consts::PI / 5.0,
        }
    }
}

/// What a fixture produces.
#[derive(Clone, Debug)]
pub enum Fixture {
    Geometry(Box<FrameGeometry>),
    Braiding(Braiding),
}

pub fn build_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    let twist = c64(0.0, spec.phase).exp();
    Ok(match spec.name.as_str() {
        "su2-flip" => Fixture::Geometry(Box::new(su2_flip_geometry())),
        "su2-torsion-free" => Fixture::Geometry(Box::new(su2_torsionfree_connection().0)),
        "su2-phase-twist" => Fixture::Geometry(Box::new(su2_phase_twist_geometry(twist)?)),
        "phase-twist" => Fixture::Braiding(random_phase_twist(spec.n, spec.seed).0),
        "random" => Fixture::Geometry(Box::new(random_geometry(
            spec.seed,
            RandomGeometryOptions {
                n: spec.n,
                dim: 2,
                f: RandomF::Fitted,
            },
        ))),
        other => return Err(Error::UnknownFixture(other.to_string())),
    })
}
