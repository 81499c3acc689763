//! Covariant derivatives on tensor powers of 1-forms, torsion, metric
//! compatibility and curvature.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::braiding::apply_word;
use crate::calculus::{differential0, differential1, maurer_cartan, FrameGeometry};
use crate::error::{Error, Result};
use crate::fixtures::{random_element, random_field};
use crate::frametensor::{flatten, pow, unflatten, CentralTensor, FrameTensorField};
use crate::matalg::{c64, centrality_residual, checked_inverse, commutator, solve_row_min_norm, AlgebraElement, C64, ZERO};

/// A connection given by `Dθ^a = −ω^a{}_{bc} θ^b⊗θ^c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    n: usize,
    dim: usize,
    omega: Vec<AlgebraElement>,
}

impl Connection {
    /// `omega` is flat over `(a, b, c)`.
    pub fn new(n: usize, omega: Vec<AlgebraElement>) -> Result<Self> {
        if omega.len() != pow(n, 3) {
            return Err(Error::Shape(format!(
                "omega needs {} coefficients, got {}",
                pow(n, 3),
                omega.len()
            )));
        }
        let dim = omega[0].dim();
        if let Some(bad) = omega.iter().find(|w| w.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { n, dim, omega })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self, a: usize, b: usize, c: usize) -> &AlgebraElement {
        &self.omega[(a * self.n + b) * self.n + c]
    }

    pub fn omega_all(&self) -> &[AlgebraElement] {
        &self.omega
    }

    /// D + χ for a central χ (rank 3): ω ↦ ω + χ.
    pub fn with_chi(&self, chi: &CentralTensor) -> Result<Self> {
        if chi.rank() != 3 || chi.n() != self.n {
            return Err(Error::Shape("chi must be rank 3 over the frame".into()));
        }
        let omega = self
            .omega
            .iter()
            .zip(chi.data())
            .map(|(w, &x)| w + &AlgebraElement::scalar(self.dim, x))
            .collect();
        Ok(Self { omega, ..*self })
    }

    /// ω + Δ for an arbitrary algebra-valued Δ.
    pub fn perturbed(&self, delta: &[AlgebraElement]) -> Result<Self> {
        if delta.len() != self.omega.len() {
            return Err(Error::Shape("perturbation must match omega".into()));
        }
        let omega = self.omega.iter().zip(delta).map(|(w, d)| w + d).collect();
        Ok(Self { omega, ..*self })
    }

    /// Dθ^a.
    pub fn d_theta(&self, a: usize) -> FrameTensorField {
        FrameTensorField::from_fn(self.n, self.dim, 2, |i| -self.omega(a, i[0], i[1]))
    }

    /// The explicit connection of the geometry if it carries `omega`,
    /// otherwise D_(0) plus the geometry's χ (if any).
    pub fn from_geometry(geom: &FrameGeometry) -> Result<Self> {
        if let Some(w) = &geom.omega {
            return Self::new(geom.n, w.clone());
        }
        let d0 = d0_connection(geom, &geom.s);
        match &geom.chi {
            Some(chi) => d0.with_chi(chi),
            None => Ok(d0),
        }
    }
}

/// `ω_(0)^a{}_{bd} = −λ_bδ^a_d + λ_cS^{ac}{}_{bd}`.
pub fn d0_connection(geom: &FrameGeometry, s: &CentralTensor) -> Connection {
    let n = geom.n;
    let mut omega = Vec::with_capacity(pow(n, 3));
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                let mut w = if a == d {
                    -&geom.lambda[b]
                } else {
                    AlgebraElement::zeros(geom.dim)
                };
                for (c, l) in geom.lambda.iter().enumerate() {
                    let sv = s.get(&[a, c, b, d]);
                    if sv != ZERO {
                        w = &w + &l.scale(sv);
                    }
                }
                omega.push(w);
            }
        }
    }
    Connection {
        n,
        dim: geom.dim,
        omega,
    }
}

/// Minimum-norm central χ with `χ^a{}_{de}P^{de}{}_{bc} = ½F^a{}_{bc}`, which
/// makes D_(0) + χ torsion-free.
pub fn torsion_free_chi(geom: &FrameGeometry) -> Result<CentralTensor> {
    let n = geom.n;
    let pm = geom.p.to_matrix()?;
    let mut data = Vec::with_capacity(pow(n, 3));
    for a in 0..n {
        let target = nalgebra::DMatrix::from_fn(1, n * n, |_, j| geom.f.data()[a * n * n + j] * 0.5);
        let x = solve_row_min_norm(&pm, &target);
        data.extend(x.iter().copied());
    }
    CentralTensor::from_data(n, 3, data)
}

/// D_(0) + χ with χ from [`torsion_free_chi`].
pub fn torsion_free_connection(geom: &FrameGeometry) -> Result<Connection> {
    d0_connection(geom, &geom.s).with_chi(&torsion_free_chi(geom)?)
}

fn check_degree(t: &FrameTensorField, expected: usize) -> Result<()> {
    if t.degree() != expected {
        return Err(Error::DegreeMismatch {
            expected,
            found: t.degree(),
        });
    }
    Ok(())
}

/// `df_A ⊗ θ^A` for a field `f_A θ^A`: coefficient `[λ_b, f_A]` at `(b, A)`.
fn d_coefficients(geom: &FrameGeometry, t: &FrameTensorField) -> Result<FrameTensorField> {
    let m = t.len();
    let mut out = FrameTensorField::zeros(geom.n, geom.dim, t.degree() + 1);
    for flat in 0..m {
        let f = t.coeff_flat(flat);
        if f.frobenius_norm() == 0.0 {
            continue;
        }
        let tail = unflatten(flat, geom.n, t.degree());
        for (b, l) in geom.lambda.iter().enumerate() {
            let mut idx = vec![b];
            idx.extend_from_slice(&tail);
            out.set_coeff(&idx, &commutator(l, &f)?);
        }
    }
    Ok(out)
}

/// Replaces slot `i` (1-based) by the pair `(p, q)` with coefficient
/// `−Σ_a t_{…a…} ω^a{}_{pq}`.
fn insert_connection(conn: &Connection, t: &FrameTensorField, i: usize) -> FrameTensorField {
    let n = conn.n;
    let deg = t.degree();
    let mut out = FrameTensorField::zeros(n, conn.dim, deg + 1);
    for flat in 0..t.len() {
        let f = t.coeff_flat(flat);
        if f.frobenius_norm() == 0.0 {
            continue;
        }
        let idx = unflatten(flat, n, deg);
        let a = idx[i - 1];
        for p in 0..n {
            for q in 0..n {
                let w = conn.omega(a, p, q);
                if w.frobenius_norm() == 0.0 {
                    continue;
                }
                let mut o = idx[..i - 1].to_vec();
                o.push(p);
                o.push(q);
                o.extend_from_slice(&idx[i..]);
                out.add_to_coeff(&o, &-&(&f * w));
            }
        }
    }
    out
}

/// `D_n = Σ_i σ₁₂…σ_{(i−1)i} (1^{⊗(i−1)} ⊗ D ⊗ 1^{⊗(n−i)})`, extended to
/// arbitrary coefficients by the left Leibniz rule.
pub fn dn(conn: &Connection, geom: &FrameGeometry, s: &CentralTensor, t: &FrameTensorField) -> Result<FrameTensorField> {
    let deg = t.degree();
    if deg == 0 {
        return Err(Error::DegreeMismatch { expected: 1, found: 0 });
    }
    let mut out = d_coefficients(geom, t)?;
    for i in 1..=deg {
        let term = insert_connection(conn, t, i);
        let word: Vec<usize> = (1..i).collect();
        out = out.add(&apply_word(&term, s, &word)?)?;
    }
    Ok(out)
}

/// D(ξ_aθ^a) = dξ_a⊗θ^a + ξ_a Dθ^a.
pub fn covariant_derivative(conn: &Connection, geom: &FrameGeometry, xi: &FrameTensorField) -> Result<FrameTensorField> {
    check_degree(xi, 1)?;
    let mut out = d_coefficients(geom, xi)?;
    for a in 0..geom.n {
        let x = xi.coeff(&[a]);
        out = out.add(&conn.d_theta(a).left_mul(&x)?)?;
    }
    Ok(out)
}

/// D₂ from its frame form:
/// `D₂(θ^a⊗θ^b) = −(ω^a{}_{pq}δ^b_r + S^{ac}{}_{pq}ω^b{}_{cr}) θ^p⊗θ^q⊗θ^r`.
pub fn d2(conn: &Connection, geom: &FrameGeometry, s: &CentralTensor, t: &FrameTensorField) -> Result<FrameTensorField> {
    check_degree(t, 2)?;
    let n = geom.n;
    let mut out = d_coefficients(geom, t)?;
    for a in 0..n {
        for b in 0..n {
            let f = t.coeff(&[a, b]);
            if f.frobenius_norm() == 0.0 {
                continue;
            }
            for p in 0..n {
                for q in 0..n {
                    out.add_to_coeff(&[p, q, b], &-&(&f * conn.omega(a, p, q)));
                    for c in 0..n {
                        let sv = s.get(&[a, c, p, q]);
                        if sv == ZERO {
                            continue;
                        }
                        for r in 0..n {
                            let w = (&f * conn.omega(b, c, r)).scale(-sv);
                            out.add_to_coeff(&[p, q, r], &w);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// D₂(ξ⊗η) = Dξ⊗η + σ₁₂(ξ⊗Dη).
pub fn d2_product(
    conn: &Connection,
    geom: &FrameGeometry,
    s: &CentralTensor,
    xi: &FrameTensorField,
    eta: &FrameTensorField,
) -> Result<FrameTensorField> {
    let first = covariant_derivative(conn, geom, xi)?.tensor_product(eta)?;
    let second = xi
        .tensor_product(&covariant_derivative(conn, geom, eta)?)?
        .apply_central_at(s, 1)?;
    first.add(&second)
}

/// D(fξ) − df⊗ξ − fDξ.
pub fn left_leibniz_residual(
    conn: &Connection,
    geom: &FrameGeometry,
    f: &AlgebraElement,
    xi: &FrameTensorField,
) -> Result<f64> {
    let lhs = covariant_derivative(conn, geom, &xi.left_mul(f)?)?;
    let rhs = differential0(f, geom)?
        .tensor_product(xi)?
        .add(&covariant_derivative(conn, geom, xi)?.left_mul(f)?)?;
    lhs.max_coeff_diff(&rhs)
}

/// D(ξf) − σ(ξ⊗df) − (Dξ)f.
pub fn right_leibniz_residual(
    conn: &Connection,
    geom: &FrameGeometry,
    s: &CentralTensor,
    f: &AlgebraElement,
    xi: &FrameTensorField,
) -> Result<f64> {
    let lhs = covariant_derivative(conn, geom, &xi.right_mul(f)?)?;
    let rhs = xi
        .tensor_product(&differential0(f, geom)?)?
        .apply_central_at(s, 1)?
        .add(&covariant_derivative(conn, geom, xi)?.right_mul(f)?)?;
    lhs.max_coeff_diff(&rhs)
}

/// Worst (left, right) Leibniz residuals over `samples` seeded pairs (f, ξ).
pub fn leibniz_residuals(
    conn: &Connection,
    geom: &FrameGeometry,
    s: &CentralTensor,
    seed: u64,
    samples: usize,
) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut left, mut right) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let f = random_element(&mut rng, geom.dim);
        let xi = random_field(&mut rng, geom.n, geom.dim, 1);
        left = left.max(left_leibniz_residual(conn, geom, &f, &xi)?);
        right = right.max(right_leibniz_residual(conn, geom, s, &f, &xi)?);
    }
    Ok((left, right))
}

#[derive(Clone, Debug)]
pub struct Torsion {
    /// Θ^a = dθ^a − π∘Dθ^a.
    pub forms: Vec<FrameTensorField>,
    /// max over a of the max-coeff norm of Θ^a.
    pub form_norm: f64,
    /// max over (a, b, c) of ‖ω^a{}_{de}P^{de}{}_{bc} − ½C^a{}_{bc}‖_F.
    pub algebraic_residual: f64,
}

pub fn torsion(conn: &Connection, geom: &FrameGeometry) -> Result<Torsion> {
    let n = geom.n;
    let mut forms = Vec::with_capacity(n);
    for a in 0..n {
        let dtheta = differential1(&geom.frame_basis(&[a]), geom)?;
        let pd = conn.d_theta(a).wedge_project(1, &geom.p)?;
        forms.push(dtheta.sub(&pd)?);
    }
    let form_norm = forms.iter().map(|f| f.max_coeff_norm()).fold(0.0, f64::max);

    let c = maurer_cartan(geom);
    let mut algebraic_residual = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                let mut m = c[(a * n + b) * n + cc].scale(c64(-0.5, 0.0));
                for d in 0..n {
                    for e in 0..n {
                        let pv = geom.p.get(&[d, e, b, cc]);
                        if pv != ZERO {
                            m = &m + &conn.omega(a, d, e).scale(pv);
                        }
                    }
                }
                algebraic_residual = algebraic_residual.max(m.frobenius_norm());
            }
        }
    }
    Ok(Torsion {
        forms,
        form_norm,
        algebraic_residual,
    })
}

/// g(T) = Σ coeff_{ab} g^{ab}.
pub fn metric_eval(g: &CentralTensor, t: &FrameTensorField) -> Result<AlgebraElement> {
    check_degree(t, 2)?;
    let n = t.n();
    let mut out = AlgebraElement::zeros(t.dim());
    for a in 0..n {
        for b in 0..n {
            let gv = g.get(&[a, b]);
            if gv != ZERO {
                out = &out + &t.coeff(&[a, b]).scale(gv);
            }
        }
    }
    Ok(out)
}

/// Least-squares `c` with `S^{ab}{}_{cd}g^{cd} ≈ c g^{ab}` and the residual
/// max entry at that `c`.
pub fn check_metric_symmetry(g: &CentralTensor, s: &CentralTensor) -> Result<(f64, C64)> {
    let n = g.n();
    let norm2: f64 = g.data().iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(Error::Singular("metric (g = 0)"));
    }
    let sg = CentralTensor::from_fn(n, 2, |i| {
        let mut acc = ZERO;
        for c in 0..n {
            for d in 0..n {
                acc += s.get(&[i[0], i[1], c, d]) * g.get(&[c, d]);
            }
        }
        acc
    });
    let dot: C64 = g.data().iter().zip(sg.data()).map(|(x, y)| x.conj() * y).sum();
    let c = dot / norm2;
    Ok((sg.max_abs_diff(&g.scale(c))?, c))
}

/// Residuals of `ω^a{}_{bc} + ω_{cd}{}^e S^{ad}{}_{be}` (lowering with the
/// inverse metric `g_{ab}`) and of `S^{ae}{}_{df}g^{fg}S^{bc}{}_{eg} − g^{ab}δ^c_d`.
pub fn check_metric_compatibility(conn: &Connection, s: &CentralTensor, g: &CentralTensor) -> Result<(f64, f64)> {
    let n = g.n();
    let gm = nalgebra::DMatrix::from_row_slice(n, n, g.data());
    let (ginv, _) = checked_inverse(&gm, 1e12).ok_or(Error::Singular("metric"))?;

    // ω_{cd}{}^e = g_{cx} ω^x{}_{dy} g^{ye}
    let mut lowered = vec![AlgebraElement::zeros(conn.dim); pow(n, 3)];
    for c in 0..n {
        for d in 0..n {
            for e in 0..n {
                let mut acc = AlgebraElement::zeros(conn.dim);
                for x in 0..n {
                    for y in 0..n {
                        let w = ginv[(c, x)] * g.get(&[y, e]);
                        if w != ZERO {
                            acc = &acc + &conn.omega(x, d, y).scale(w);
                        }
                    }
                }
                lowered[flatten(&[c, d, e], n)] = acc;
            }
        }
    }
    let mut r1 = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut m = conn.omega(a, b, c).clone();
                for d in 0..n {
                    for e in 0..n {
                        let sv = s.get(&[a, d, b, e]);
                        if sv != ZERO {
                            m = &m + &lowered[flatten(&[c, d, e], n)].scale(sv);
                        }
                    }
                }
                r1 = r1.max(m.frobenius_norm());
            }
        }
    }

    let mut r2 = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = ZERO;
                    for e in 0..n {
                        for f in 0..n {
                            let x = s.get(&[a, e, d, f]);
                            if x == ZERO {
                                continue;
                            }
                            for gg in 0..n {
                                acc += x * g.get(&[f, gg]) * s.get(&[b, c, e, gg]);
                            }
                        }
                    }
                    if c == d {
                        acc -= g.get(&[a, b]);
                    }
                    r2 = r2.max(acc.norm());
                }
            }
        }
    }
    Ok((r1, r2))
}

#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub n: usize,
    /// `R^a{}_{bcd}`, flat over `(a, b, c, d)`.
    pub r: Vec<AlgebraElement>,
    /// `R^a{}_c = ½R^a{}_{bcd}g^{db}`, flat over `(a, c)`; absent without a metric.
    pub ricci: Option<Vec<AlgebraElement>>,
    /// max over entries of R of the centrality residual.
    pub centrality_residual: f64,
    /// Curv(θ^a) as degree-3 fields.
    pub forms: Vec<FrameTensorField>,
}

impl CurvatureData {
    pub fn r(&self, a: usize, b: usize, c: usize, d: usize) -> &AlgebraElement {
        &self.r[flatten(&[a, b, c, d], self.n)]
    }

    /// max ‖R^a{}_{bcd}P^{cd}{}_{ef} − R^a{}_{bef}‖.
    pub fn p_reduction_residual(&self, p: &CentralTensor) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for e in 0..n {
                    for f in 0..n {
                        let mut m = -self.r(a, b, e, f);
                        for c in 0..n {
                            for d in 0..n {
                                let pv = p.get(&[c, d, e, f]);
                                if pv != ZERO {
                                    m = &m + &self.r(a, b, c, d).scale(pv);
                                }
                            }
                        }
                        worst = worst.max(m.frobenius_norm());
                    }
                }
            }
        }
        worst
    }
}

/// π₁₂∘D₂∘D applied to a 1-form.
pub fn curvature_of_field(
    conn: &Connection,
    geom: &FrameGeometry,
    s: &CentralTensor,
    xi: &FrameTensorField,
) -> Result<FrameTensorField> {
    d2(conn, geom, s, &covariant_derivative(conn, geom, xi)?)?.wedge_project(1, &geom.p)
}

pub fn curvature(conn: &Connection, geom: &FrameGeometry, s: &CentralTensor) -> Result<CurvatureData> {
    let n = geom.n;
    let forms = (0..n)
        .map(|a| curvature_of_field(conn, geom, s, &geom.frame_basis(&[a])))
        .collect::<Result<Vec<_>>>()?;
    let mut r = Vec::with_capacity(pow(n, 4));
    for form in &forms {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    r.push(form.coeff(&[c, d, b]).scale(c64(-2.0, 0.0)));
                }
            }
        }
    }
    let ricci = geom.metric.as_ref().map(|g| {
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for c in 0..n {
                let mut acc = AlgebraElement::zeros(geom.dim);
                for b in 0..n {
                    for d in 0..n {
                        let gv = g.get(&[d, b]);
                        if gv != ZERO {
                            acc = &acc + &r[flatten(&[a, b, c, d], n)].scale(gv * 0.5);
                        }
                    }
                }
                out.push(acc);
            }
        }
        out
    });
    let mut centrality = 0.0f64;
    for x in &r {
        centrality = centrality.max(centrality_residual(x, &geom.lambda)?);
    }
    Ok(CurvatureData {
        n,
        r,
        ricci,
        centrality_residual: centrality,
        forms,
    })
}

/// `ξ_aθ²⊗θ^a + π₁₂σ₁₂σ₂₃σ₁₂(ξ⊗θ⊗θ)`, the curvature of D_(0) on ξ.
pub fn curvature_d0_formula(geom: &FrameGeometry, s: &CentralTensor, xi: &FrameTensorField) -> Result<FrameTensorField> {
    check_degree(xi, 1)?;
    let theta = crate::calculus::dirac_form(geom);
    let tt = theta.tensor_product(&theta)?;
    let mut first = FrameTensorField::zeros(geom.n, geom.dim, 3);
    for a in 0..geom.n {
        let term = tt.tensor_product(&geom.frame_basis(&[a]))?.left_mul(&xi.coeff(&[a]))?;
        first = first.add(&term)?;
    }
    let second = apply_word(&xi.tensor_product(&tt)?, s, &[1, 2, 1])?;
    first.add(&second)?.wedge_project(1, &geom.p)
}

/// max over a of the difference between the curvature of D_(0) on θ^a and
/// the closed formula.
pub fn check_curvature_closed_form(geom: &FrameGeometry, s: &CentralTensor) -> Result<f64> {
    let conn = d0_connection(geom, s);
    let mut worst = 0.0f64;
    for a in 0..geom.n {
        let xi = geom.frame_basis(&[a]);
        let direct = curvature_of_field(&conn, geom, s, &xi)?;
        worst = worst.max(direct.max_coeff_diff(&curvature_d0_formula(geom, s, &xi)?)?);
    }
    Ok(worst)
}

/// Largest deviation of Curv_(0) on seeded 1-forms ξ from its left-linear
/// extension `ξ_aθ²⊗θ^a + π₁₂σ₁₂σ₂₃σ₁₂(ξ⊗θ⊗θ)`. Zero when π∘D_(0)∘d = 0.
pub fn curvature_d0_general_defect(geom: &FrameGeometry, s: &CentralTensor, seed: u64, samples: usize) -> Result<f64> {
    let conn = d0_connection(geom, s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let xi = random_field(&mut rng, geom.n, geom.dim, 1);
        let direct = curvature_of_field(&conn, geom, s, &xi)?;
        worst = worst.max(direct.max_coeff_diff(&curvature_d0_formula(geom, s, &xi)?)?);
    }
    Ok(worst)
}

/// max ‖Curv(fθ^a) − f Curv(θ^a)‖ over seeded f and all a.
pub fn check_curvature_left_linearity(
    conn: &Connection,
    geom: &FrameGeometry,
    s: &CentralTensor,
    seed: u64,
    samples: usize,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<FrameTensorField> = (0..geom.n)
        .map(|a| curvature_of_field(conn, geom, s, &geom.frame_basis(&[a])))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = random_element(&mut rng, geom.dim);
        for (a, ca) in base.iter().enumerate() {
            let lhs = curvature_of_field(conn, geom, s, &geom.frame_basis(&[a]).left_mul(&f)?)?;
            worst = worst.max(lhs.max_coeff_diff(&ca.left_mul(&f)?)?);
        }
    }
    Ok(worst)
}

/// max over `2 ≤ i ≤ degree` and basis monomials of
/// `‖D_n(σ_{(i−1)i}θ^A) − σ_{i(i+1)}D_n(θ^A)‖`.
pub fn check_dn_sigma_lemma(conn: &Connection, geom: &FrameGeometry, s: &CentralTensor, degree: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for flat in 0..pow(geom.n, degree) {
        let basis = geom.frame_basis(&unflatten(flat, geom.n, degree));
        let dbasis = dn(conn, geom, s, &basis)?;
        for i in 2..=degree {
            let lhs = dn(conn, geom, s, &basis.apply_central_at(s, i - 1)?)?;
            let rhs = dbasis.apply_central_at(s, i)?;
            worst = worst.max(lhs.max_coeff_diff(&rhs)?);
        }
    }
    Ok(worst)
}

/// max over basis monomials θ^a⊗θ^b of `‖D₂(σ(θ^a⊗θ^b)) − σ₂₃D₂(θ^a⊗θ^b)‖`.
pub fn check_equi(conn: &Connection, geom: &FrameGeometry, s: &CentralTensor) -> Result<f64> {
    check_dn_sigma_lemma(conn, geom, s, 2)
}
