//! The frame differential calculus: d on functions and 1-forms, the Dirac
//! form θ, the Maurer–Cartan coefficients and the structure checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixtures::random_element;
use crate::frametensor::{pow, CentralTensor, FrameTensorField};
use crate::matalg::{c64, commutator, AlgebraElement, C64};

/// A frame geometry over M_N(ℂ).
///
/// `f` holds `F^a{}_{bc}` (rank 3), `k` holds `K_{ab}` (rank 2), `metric`
/// holds `g^{ab}`. `omega`, when present, is the flat `n³` list of connection
/// coefficients `ω^a{}_{bc}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameGeometry {
    pub dim: usize,
    pub n: usize,
    pub lambda: Vec<AlgebraElement>,
    pub p: CentralTensor,
    pub s: CentralTensor,
    pub tau: Option<CentralTensor>,
    pub f: CentralTensor,
    pub k: CentralTensor,
    pub metric: Option<CentralTensor>,
    pub omega: Option<Vec<AlgebraElement>>,
    pub chi: Option<CentralTensor>,
}

fn check_shape(t: &CentralTensor, n: usize, rank: usize, what: &str) -> Result<()> {
    if t.n() != n || t.rank() != rank {
        return Err(Error::Shape(format!(
            "{what} must be rank {rank} over {n} frame indices, got rank {} over {}",
            t.rank(),
            t.n()
        )));
    }
    Ok(())
}

/// ‖P∘P − P‖ as max entry.
pub fn projector_residual(p: &CentralTensor) -> f64 {
    p.then(p).and_then(|pp| pp.max_abs_diff(p)).unwrap_or(f64::INFINITY)
}

/// max |F^a{}_{bc}P^{bc}{}_{de} − F^a{}_{de}|.
pub fn p_reduction_residual(f: &CentralTensor, p: &CentralTensor) -> f64 {
    let n = p.n();
    let fm = nalgebra::DMatrix::from_row_slice(n, n * n, f.data());
    let reduced = &fm * p.to_matrix().expect("rank 4");
    (reduced - fm).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl FrameGeometry {
    /// A geometry with `F = 0`, `K = 0`, `g = δ` and no connection data.
    pub fn new(lambda: Vec<AlgebraElement>, p: CentralTensor, s: CentralTensor) -> Result<Self> {
        let n = lambda.len();
        if n == 0 {
            return Err(Error::Shape("at least one frame generator is required".into()));
        }
        let dim = lambda[0].dim();
        let metric = CentralTensor::identity(n, 1);
        Ok(Self {
            dim,
            n,
            lambda,
            p,
            s,
            tau: None,
            f: CentralTensor::zeros(n, 3),
            k: CentralTensor::zeros(n, 2),
            metric: Some(metric),
            omega: None,
            chi: None,
        })
    }

    /// Shape checks plus the named load-time invariants.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.n;
        if self.lambda.len() != n {
            return Err(Error::Shape(format!(
                "expected {n} frame generators, got {}",
                self.lambda.len()
            )));
        }
        for l in &self.lambda {
            if l.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: l.dim(),
                });
            }
        }
        check_shape(&self.p, n, 4, "P")?;
        check_shape(&self.s, n, 4, "S")?;
        check_shape(&self.f, n, 3, "F")?;
        check_shape(&self.k, n, 2, "K")?;
        if let Some(t) = &self.tau {
            check_shape(t, n, 4, "tau")?;
        }
        if let Some(g) = &self.metric {
            check_shape(g, n, 2, "metric")?;
        }
        if let Some(c) = &self.chi {
            check_shape(c, n, 3, "chi")?;
        }
        if let Some(w) = &self.omega {
            if w.len() != pow(n, 3) {
                return Err(Error::Shape(format!(
                    "omega needs {} coefficients, got {}",
                    pow(n, 3),
                    w.len()
                )));
            }
            if let Some(bad) = w.iter().find(|x| x.dim() != self.dim) {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: bad.dim(),
                });
            }
        }

        if let Some((a, l)) = self
            .lambda
            .iter()
            .enumerate()
            .find(|(_, l)| l.antihermitian_residual() > tol)
        {
            return Err(Error::Invariant {
                name: "lambda_antihermitian",
                detail: format!("lambda[{a}] has ‖λ+λ*‖ = {:e}", l.antihermitian_residual()),
            });
        }
        let pr = projector_residual(&self.p);
        if pr > tol {
            return Err(Error::Invariant {
                name: "P_projector",
                detail: format!("‖P∘P − P‖ = {pr:e}"),
            });
        }
        let fr = p_reduction_residual(&self.f, &self.p);
        if fr > tol {
            return Err(Error::Invariant {
                name: "F_P_reduced",
                detail: format!("‖F∘P − F‖ = {fr:e}"),
            });
        }
        Ok(())
    }

    pub fn frame_basis(&self, indices: &[usize]) -> FrameTensorField {
        FrameTensorField::basis(self.n, self.dim, indices)
    }

    fn check_dim(&self, f: &AlgebraElement) -> Result<()> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        Ok(())
    }
}

/// θ = −λ_a θ^a.
pub fn dirac_form(geom: &FrameGeometry) -> FrameTensorField {
    FrameTensorField::from_fn(geom.n, geom.dim, 1, |i| -&geom.lambda[i[0]])
}

/// df = [λ_a, f] θ^a.
pub fn differential0(f: &AlgebraElement, geom: &FrameGeometry) -> Result<FrameTensorField> {
    geom.check_dim(f)?;
    let coeffs = geom
        .lambda
        .iter()
        .map(|l| commutator(l, f))
        .collect::<Result<Vec<_>>>()?;
    FrameTensorField::from_coeffs(geom.n, 1, &coeffs)
}

/// `C^a{}_{bc} = F^a{}_{bc} − 2λ_e(P^{ae}{}_{bc} + P^{ea}{}_{bc})`, flat over
/// `(a, b, c)`.
pub fn maurer_cartan(geom: &FrameGeometry) -> Vec<AlgebraElement> {
    let n = geom.n;
    let mut out = Vec::with_capacity(pow(n, 3));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut m = AlgebraElement::scalar(geom.dim, geom.f.get(&[a, b, c]));
                for (e, l) in geom.lambda.iter().enumerate() {
                    let w = geom.p.get(&[a, e, b, c]) + geom.p.get(&[e, a, b, c]);
                    if w != C64::new(0.0, 0.0) {
                        m = &m - &l.scale(w * 2.0);
                    }
                }
                out.push(m);
            }
        }
    }
    out
}

/// d(ξ_a θ^a) = [λ_b, ξ_a] θ^b θ^a − ½ ξ_a C^a{}_{bc} θ^b θ^c, projected by P.
pub fn differential1(xi: &FrameTensorField, geom: &FrameGeometry) -> Result<FrameTensorField> {
    if xi.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: xi.degree(),
        });
    }
    geom.check_dim(&AlgebraElement::identity(xi.dim()))?;
    let n = geom.n;
    let c = maurer_cartan(geom);
    let xs = xi.coeffs();
    let half = c64(0.5, 0.0);
    let raw = FrameTensorField::from_fn(n, geom.dim, 2, |i| {
        let (b, a) = (i[0], i[1]);
        let mut m = commutator(&geom.lambda[b], &xs[a]).expect("dims checked");
        for (e, x) in xs.iter().enumerate() {
            let ce = &c[(e * n + b) * n + a];
            m = &m - &(x * ce).scale(half);
        }
        m
    });
    raw.wedge_project(1, &geom.p)
}

/// max over (a, b) of ‖2λ_cλ_dP^{cd}{}_{ab} − λ_cF^c{}_{ab} − K_{ab}‖_F.
pub fn check_structure(geom: &FrameGeometry) -> f64 {
    let n = geom.n;
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut m = AlgebraElement::scalar(geom.dim, -geom.k.get(&[a, b]));
            for c in 0..n {
                for d in 0..n {
                    let w = geom.p.get(&[c, d, a, b]) * 2.0;
                    if w != C64::new(0.0, 0.0) {
                        m = &m + &(&geom.lambda[c] * &geom.lambda[d]).scale(w);
                    }
                }
                let fc = geom.f.get(&[c, a, b]);
                if fc != C64::new(0.0, 0.0) {
                    m = &m - &geom.lambda[c].scale(fc);
                }
            }
            worst = worst.max(m.frobenius_norm());
        }
    }
    worst
}

/// Max-coeff norm of dθ + θ² + ½K_{ab}θ^aθ^b, the sign that follows from the
/// structure condition as checked by [`check_structure`].
pub fn check_theta_squared(geom: &FrameGeometry) -> Result<f64> {
    let theta = dirac_form(geom);
    let dtheta = differential1(&theta, geom)?;
    let theta2 = theta.tensor_product(&theta)?.wedge_project(1, &geom.p)?;
    Ok(dtheta.add(&theta2)?.add(&k_form(geom)?)?.max_coeff_norm())
}

fn seeded_elements(geom: &FrameGeometry, seed: u64, count: usize) -> Vec<AlgebraElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_element(&mut rng, geom.dim)).collect()
}

/// max ‖d(df)‖ over `samples` seeded random f.
pub fn check_d_squared(geom: &FrameGeometry, seed: u64, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for f in seeded_elements(geom, seed, samples) {
        let ddf = differential1(&differential0(&f, geom)?, geom)?;
        worst = worst.max(ddf.max_coeff_norm());
    }
    Ok(worst)
}

/// max ‖d(fg) − (df)g − f(dg)‖ over seeded pairs.
pub fn check_d_leibniz(geom: &FrameGeometry, seed: u64, samples: usize) -> Result<f64> {
    let els = seeded_elements(geom, seed, 2 * samples);
    let mut worst = 0.0f64;
    for pair in els.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let lhs = differential0(&(f * g), geom)?;
        let rhs = differential0(f, geom)?
            .right_mul(g)?
            .add(&differential0(g, geom)?.left_mul(f)?)?;
        worst = worst.max(lhs.max_coeff_diff(&rhs)?);
    }
    Ok(worst)
}

/// max ‖df + [θ, f]‖ over seeded f, with [θ, f] = θf − fθ on the frame.
pub fn check_df_commutator(geom: &FrameGeometry, seed: u64, samples: usize) -> Result<f64> {
    let theta = dirac_form(geom);
    let mut worst = 0.0f64;
    for f in seeded_elements(geom, seed, samples) {
        let bracket = theta.right_mul(&f)?.sub(&theta.left_mul(&f)?)?;
        let df = differential0(&f, geom)?;
        worst = worst.max(df.add(&bracket)?.max_coeff_norm());
    }
    Ok(worst)
}

/// The 2-form `½K_{ab}θ^aθ^b`, handy when comparing against dθ + θ².
pub fn k_form(geom: &FrameGeometry) -> Result<FrameTensorField> {
    FrameTensorField::from_fn(geom.n, geom.dim, 2, |i| {
        AlgebraElement::scalar(geom.dim, geom.k.get(i) * 0.5)
    })
    .wedge_project(1, &geom.p)
}
