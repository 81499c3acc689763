use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stehbein::braiding::apply_word;
use stehbein::calculus::{dirac_form, differential1};
use stehbein::connection::{
    check_curvature_closed_form, check_curvature_left_linearity, check_dn_sigma_lemma, check_metric_compatibility,
    check_metric_symmetry, covariant_derivative, curvature, curvature_of_field, d0_connection, d2, d2_product, dn,
    leibniz_residuals, metric_eval, torsion, torsion_free_chi, torsion_free_connection,
};
use stehbein::fixtures::{
    random_element, random_field, random_geometry, su2_flip_geometry, su2_phase_twist_geometry,
    su2_torsionfree_connection, RandomF, RandomGeometryOptions,
};
use stehbein::matalg::{c64, ZERO};
use stehbein::{AlgebraElement, CentralTensor, Connection, FrameGeometry, FrameTensorField};

fn eps(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn random_f0(seed: u64) -> FrameGeometry {
    random_geometry(seed, RandomGeometryOptions { f: RandomF::Zero, ..Default::default() })
}

#[test]
fn d0_vanishes_for_su2_flip() {
    let g = su2_flip_geometry();
    let c = d0_connection(&g, &g.s);
    assert!(c.omega_all().iter().all(|w| w.frobenius_norm() == 0.0));
    for a in 0..3 {
        let d = covariant_derivative(&c, &g, &g.frame_basis(&[a])).unwrap();
        assert_eq!(d.max_coeff_norm(), 0.0);
    }
}

#[test]
fn d0_matches_its_defining_formula() {
    // D_(0)θ^a = −θ⊗θ^a + σ(θ^a⊗θ), expanded with field operations
    for g in [
        su2_phase_twist_geometry(c64(0.0, std::f64::consts::PI / 5.0).exp()).unwrap(),
        random_f0(3),
    ] {
        let conn = d0_connection(&g, &g.s);
        let theta = dirac_form(&g);
        for a in 0..g.n {
            let basis = g.frame_basis(&[a]);
            let expected = theta
                .tensor_product(&basis)
                .unwrap()
                .scale(c64(-1.0, 0.0))
                .add(&basis.tensor_product(&theta).unwrap().apply_central_at(&g.s, 1).unwrap())
                .unwrap();
            assert!(conn.d_theta(a).max_coeff_diff(&expected).unwrap() <= 1e-14);
        }
    }
}

#[test]
fn leibniz_rules_for_d0_plus_chi() {
    let (g, conn) = su2_torsionfree_connection();
    let (left, right) = leibniz_residuals(&conn, &g, &g.s, 7, 50).unwrap();
    assert!(left <= 1e-10 && right <= 1e-10, "{left} {right}");

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let delta: Vec<AlgebraElement> =
        (0..27).map(|_| random_element(&mut rng, 2).scale(c64(0.3, 0.0))).collect();
    let bent = conn.perturbed(&delta).unwrap();
    let (left, right) = leibniz_residuals(&bent, &g, &g.s, 7, 50).unwrap();
    assert!(left <= 1e-10, "left rule holds by construction: {left}");
    assert!(right > 1e-3, "right rule must break: {right}");

    // central perturbations keep both rules
    let chi = CentralTensor::from_fn(3, 3, |i| c64(0.1 * i[0] as f64, -0.2 * i[2] as f64));
    let (left, right) = leibniz_residuals(&conn.with_chi(&chi).unwrap(), &g, &g.s, 3, 20).unwrap();
    assert!(left <= 1e-10 && right <= 1e-10);
}

#[test]
fn torsion_of_d0_on_su2_is_d_theta() {
    let g = su2_flip_geometry();
    let t = torsion(&d0_connection(&g, &g.s), &g).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let expected = AlgebraElement::scalar(2, c64(-0.5 * eps(a, b, c), 0.0));
                assert!((&t.forms[a].coeff(&[b, c]) - &expected).frobenius_norm() <= 1e-15);
            }
        }
    }
    assert!(t.form_norm > 1e-3 && t.algebraic_residual > 1e-3);
}

#[test]
fn torsion_free_chi_on_su2_is_half_epsilon() {
    let g = su2_flip_geometry();
    let chi = torsion_free_chi(&g).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                assert!((chi.get(&[a, b, c]) - c64(0.5 * eps(a, b, c), 0.0)).norm() <= 1e-14);
            }
        }
    }
    let t = torsion(&torsion_free_connection(&g).unwrap(), &g).unwrap();
    assert!(t.algebraic_residual <= 1e-12 && t.form_norm <= 1e-12);
}

#[test]
fn torsion_cross_check_agrees() {
    let mut cases: Vec<(FrameGeometry, Connection)> = Vec::new();
    let g = su2_flip_geometry();
    cases.push((g.clone(), d0_connection(&g, &g.s)));
    cases.push(su2_torsionfree_connection());
    for seed in 0..10 {
        let f = if seed % 2 == 0 { RandomF::Zero } else { RandomF::Random };
        let g = random_geometry(seed, RandomGeometryOptions { f, ..Default::default() });
        cases.push((g.clone(), d0_connection(&g, &g.s)));
    }
    for (g, c) in &cases {
        let t = torsion(c, g).unwrap();
        let small = t.form_norm <= 1e-10 && t.algebraic_residual <= 1e-10;
        let large = t.form_norm > 1e-3 && t.algebraic_residual > 1e-3;
        assert!(small || large, "{} vs {}", t.form_norm, t.algebraic_residual);
    }
}

#[test]
fn d0_is_torsion_free_when_f_vanishes() {
    for seed in 0..5 {
        let g = random_f0(seed);
        let t = torsion(&d0_connection(&g, &g.s), &g).unwrap();
        assert!(t.form_norm <= 1e-12, "seed {seed}: {}", t.form_norm);
    }
}

#[test]
fn dn_low_degrees_reduce_to_d_and_d2() {
    let (g, conn) = su2_torsionfree_connection();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let xi = random_field(&mut rng, 3, 2, 1);
    let d1 = dn(&conn, &g, &g.s, &xi).unwrap();
    assert!(d1.max_coeff_diff(&covariant_derivative(&conn, &g, &xi).unwrap()).unwrap() <= 1e-14);
    let t = random_field(&mut rng, 3, 2, 2);
    let a = dn(&conn, &g, &g.s, &t).unwrap();
    let b = d2(&conn, &g, &g.s, &t).unwrap();
    assert!(a.max_coeff_diff(&b).unwrap() <= 1e-14);
}

#[test]
fn d2_agrees_with_its_defining_form_on_products() {
    let (g, conn) = su2_torsionfree_connection();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let xi = random_field(&mut rng, 3, 2, 1);
        let eta = random_field(&mut rng, 3, 2, 1);
        let direct = d2(&conn, &g, &g.s, &xi.tensor_product(&eta).unwrap()).unwrap();
        let product = d2_product(&conn, &g, &g.s, &xi, &eta).unwrap();
        assert!(direct.max_coeff_diff(&product).unwrap() <= 1e-12);
    }
}

/// D₃ = D⊗1⊗1 + σ₁₂(1⊗D⊗1) + σ₁₂σ₂₃(1⊗1⊗D) on ξ⊗η⊗ζ, term by term.
fn d3_oracle(
    conn: &Connection,
    g: &FrameGeometry,
    xi: &FrameTensorField,
    eta: &FrameTensorField,
    zeta: &FrameTensorField,
) -> FrameTensorField {
    let d = |x: &FrameTensorField| covariant_derivative(conn, g, x).unwrap();
    let first = d(xi).tensor_product(eta).unwrap().tensor_product(zeta).unwrap();
    let second = xi
        .tensor_product(&d(eta))
        .unwrap()
        .tensor_product(zeta)
        .unwrap()
        .apply_central_at(&g.s, 1)
        .unwrap();
    let third = xi
        .tensor_product(eta)
        .unwrap()
        .tensor_product(&d(zeta))
        .unwrap()
        .apply_central_at(&g.s, 2)
        .unwrap()
        .apply_central_at(&g.s, 1)
        .unwrap();
    first.add(&second).unwrap().add(&third).unwrap()
}

#[test]
fn d3_matches_term_by_term_evaluation() {
    let mut cases = vec![su2_torsionfree_connection()];
    let g = su2_phase_twist_geometry(c64(0.0, 0.7).exp()).unwrap();
    cases.push((g.clone(), d0_connection(&g, &g.s)));
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (g, conn) in &cases {
        for _ in 0..3 {
            let [xi, eta, zeta]: [FrameTensorField; 3] = std::array::from_fn(|_| random_field(&mut rng, 3, 2, 1));
            let t = xi.tensor_product(&eta).unwrap().tensor_product(&zeta).unwrap();
            let ours = dn(conn, g, &g.s, &t).unwrap();
            let oracle = d3_oracle(conn, g, &xi, &eta, &zeta);
            assert!(ours.max_coeff_diff(&oracle).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn d3_of_basis_vanishes_for_flat_flip() {
    let mut g = su2_flip_geometry();
    g.lambda = vec![AlgebraElement::zeros(2); 3];
    let conn = d0_connection(&g, &g.s);
    let out = dn(&conn, &g, &g.s, &g.frame_basis(&[0, 1, 2])).unwrap();
    assert_eq!(out.max_coeff_norm(), 0.0);
}

#[test]
fn curvature_of_d0_on_su2_vanishes() {
    let g = su2_flip_geometry();
    let data = curvature(&d0_connection(&g, &g.s), &g, &g.s).unwrap();
    assert!(data.r.iter().all(|x| x.frobenius_norm() == 0.0));
    assert!(data.ricci.unwrap().iter().all(|x| x.frobenius_norm() == 0.0));
}

#[test]
fn curvature_of_torsion_free_su2_matches_epsilon_oracle() {
    // ω^a_{bc} = ½ε_{abc}, flip σ:
    // Curv(θ^a) has raw coefficient ¼ε_{abr}ε_{bpq} + ¼ε_{aqc}ε_{cpr} on θ^p⊗θ^q⊗θ^r
    let (g, conn) = su2_torsionfree_connection();
    let data = curvature(&conn, &g, &g.s).unwrap();
    let raw = |a: usize, p: usize, q: usize, r: usize| {
        (0..3).map(|b| 0.25 * eps(a, b, r) * eps(b, p, q) + 0.25 * eps(a, q, b) * eps(b, p, r)).sum::<f64>()
    };
    let mut nonzero = 0.0f64;
    for a in 0..3 {
        for p in 0..3 {
            for q in 0..3 {
                for r in 0..3 {
                    let projected = 0.5 * (raw(a, p, q, r) - raw(a, q, p, r));
                    let coeff = data.forms[a].coeff(&[p, q, r]);
                    assert!((&coeff - &AlgebraElement::scalar(2, c64(projected, 0.0))).frobenius_norm() <= 1e-14);
                    let rr = data.r(a, r, p, q);
                    assert!((rr - &AlgebraElement::scalar(2, c64(-2.0 * projected, 0.0))).frobenius_norm() <= 1e-14);
                    nonzero = nonzero.max(projected.abs());
                }
            }
        }
    }
    assert!(nonzero > 0.1);
    assert!(data.p_reduction_residual(&g.p) <= 1e-14);
    assert!(data.centrality_residual <= 1e-14);
    let ricci = data.ricci.as_ref().unwrap();
    for a in 0..3 {
        for c in 0..3 {
            let mut expected = AlgebraElement::zeros(2);
            for b in 0..3 {
                expected = &expected + &data.r(a, b, c, b).scale(c64(0.5, 0.0));
            }
            assert!((&ricci[a * 3 + c] - &expected).frobenius_norm() <= 1e-15);
        }
    }
}

#[test]
fn curvature_matches_brute_force_composition() {
    // π₁₂ ∘ D₂ ∘ D with D(θ^a) split as Σ_c (−ω^a_{bc}θ^b) ⊗ θ^c
    for (g, conn) in [su2_torsionfree_connection(), {
        let g = random_f0(2);
        let c = d0_connection(&g, &g.s);
        (g, c)
    }] {
        for a in 0..g.n {
            let mut total = FrameTensorField::zeros(g.n, g.dim, 3);
            for c in 0..g.n {
                let left = FrameTensorField::from_fn(g.n, g.dim, 1, |i| -conn.omega(a, i[0], c));
                let term = d2_product(&conn, &g, &g.s, &left, &g.frame_basis(&[c])).unwrap();
                total = total.add(&term).unwrap();
            }
            let brute = total.wedge_project(1, &g.p).unwrap();
            let ours = curvature_of_field(&conn, &g, &g.s, &g.frame_basis(&[a])).unwrap();
            assert!(ours.max_coeff_diff(&brute).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn curvature_closed_form_and_left_linearity() {
    let g = su2_flip_geometry();
    assert!(check_curvature_closed_form(&g, &g.s).unwrap() <= 1e-10);
    for seed in 0..5 {
        let g = random_f0(seed);
        assert!(check_curvature_closed_form(&g, &g.s).unwrap() <= 1e-10, "seed {seed}");
    }
    let (g, conn) = su2_torsionfree_connection();
    assert!(check_curvature_left_linearity(&conn, &g, &g.s, 1, 10).unwrap() <= 1e-10);
}

#[test]
fn dn_sigma_lemma_up_to_degree_four() {
    let (g, conn) = su2_torsionfree_connection();
    for n in 2..=4 {
        assert!(check_dn_sigma_lemma(&conn, &g, &g.s, n).unwrap() <= 1e-10);
    }
    let g = su2_phase_twist_geometry(c64(0.0, 1.1).exp()).unwrap();
    let conn = d0_connection(&g, &g.s);
    for n in 2..=4 {
        assert!(check_dn_sigma_lemma(&conn, &g, &g.s, n).unwrap() <= 1e-10);
    }
}

#[test]
fn metric_evaluation() {
    let g = CentralTensor::identity(3, 1);
    let m = metric_eval(&g, &FrameTensorField::basis(3, 2, &[0, 0])).unwrap();
    assert_eq!(m, AlgebraElement::identity(2));
    let m = metric_eval(&g, &FrameTensorField::basis(3, 2, &[0, 1])).unwrap();
    assert_eq!(m.frobenius_norm(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = random_field(&mut rng, 3, 2, 2);
    let f = random_element(&mut rng, 2);
    let gm = CentralTensor::from_fn(3, 2, |i| c64(1.0 + i[0] as f64, 0.5 * i[1] as f64));
    let lhs = metric_eval(&gm, &t.left_mul(&f).unwrap()).unwrap();
    assert!((&lhs - &(&f * &metric_eval(&gm, &t).unwrap())).frobenius_norm() <= 1e-12);
    let rhs = metric_eval(&gm, &t.right_mul(&f).unwrap()).unwrap();
    assert!((&rhs - &(&metric_eval(&gm, &t).unwrap() * &f)).frobenius_norm() <= 1e-12);
}

#[test]
fn metric_symmetry_factors() {
    let delta = CentralTensor::identity(3, 1);
    let (r, c) = check_metric_symmetry(&delta, &CentralTensor::flip(3)).unwrap();
    assert_eq!((r, c), (0.0, c64(1.0, 0.0)));
    let g = su2_phase_twist_geometry(c64(0.0, 0.9).exp()).unwrap();
    let (r, c) = check_metric_symmetry(&delta, &g.s).unwrap();
    assert!(r <= 1e-15 && (c - c64(1.0, 0.0)).norm() <= 1e-15);
    let minus = CentralTensor::identity(3, 2).scale(c64(-1.0, 0.0));
    let (r, c) = check_metric_symmetry(&delta, &minus).unwrap();
    assert!(r <= 1e-15 && (c + c64(1.0, 0.0)).norm() <= 1e-15);
    assert!(check_metric_symmetry(&CentralTensor::zeros(3, 2), &minus).is_err());
}

#[test]
fn metric_compatibility_forms() {
    let g = su2_flip_geometry();
    let delta = CentralTensor::identity(3, 1);
    let (r1, r2) = check_metric_compatibility(&d0_connection(&g, &g.s), &g.s, &delta).unwrap();
    assert_eq!((r1, r2), (0.0, 0.0));
    let mut bent = CentralTensor::flip(3);
    bent.set(&[0, 1, 1, 0], c64(1.1, 0.0));
    let (_, r2) = check_metric_compatibility(&d0_connection(&g, &g.s), &bent, &delta).unwrap();
    assert!(r2 > 1e-3);
    assert!(check_metric_compatibility(&d0_connection(&g, &g.s), &g.s, &CentralTensor::zeros(3, 2)).is_err());
}

#[test]
fn d_of_theta_on_su2_matches_torsion_of_zero_connection() {
    let g = su2_flip_geometry();
    let zero = Connection::new(3, vec![AlgebraElement::zeros(2); 27]).unwrap();
    let t = torsion(&zero, &g).unwrap();
    for a in 0..3 {
        let d = differential1(&g.frame_basis(&[a]), &g).unwrap();
        assert_eq!(t.forms[a].max_coeff_diff(&d).unwrap(), 0.0);
    }
    assert!(apply_word(&g.frame_basis(&[0, 1, 2]), &g.s, &[1, 2, 1]).unwrap().coeff(&[2, 1, 0]).frobenius_norm() > 0.0);
    assert_eq!(ZERO, c64(0.0, 0.0));
}
