use serde_json::{json, Value};
use stehbein::calculus::projector_residual;
use stehbein::connection::curvature;
use stehbein::fixtures::{build_fixture, random_geometry, su2_torsionfree_connection, FixtureSpec};
use stehbein::io::{
    braiding_to_value, curvature_to_value, fixture_to_value, geometry_to_value, jn_to_value, load_geometry,
    parse_input, to_pretty_json, value_to_geometry,
};
use stehbein::involution::build_jn;
use stehbein::matalg::c64;
use stehbein::{Braiding, CentralTensor, Error, Input};

fn su2_value() -> Value {
    fixture_to_value(&build_fixture(&FixtureSpec::new("su2-flip")).unwrap())
}

#[test]
fn fixture_files_round_trip_bit_exactly() {
    for name in ["su2-flip", "su2-torsion-free", "su2-phase-twist", "random"] {
        let v = fixture_to_value(&build_fixture(&FixtureSpec::new(name)).unwrap());
        let text = to_pretty_json(&v);
        let Input::Geometry(g) = parse_input(&text, 1e-9).unwrap() else {
            panic!("{name} should load as a geometry");
        };
        assert_eq!(*g, value_to_geometry(&v).unwrap());
        assert_eq!(to_pretty_json(&geometry_to_value(&g)), text, "{name}");
    }
}

#[test]
fn load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("su2.json");
    std::fs::write(&path, to_pretty_json(&su2_value())).unwrap();
    let g = load_geometry(&path, 1e-9).unwrap();
    assert_eq!((g.dim, g.n), (2, 3));
    assert!(matches!(load_geometry(&dir.path().join("missing.json"), 1e-9), Err(Error::Parse(_))));
}

#[test]
fn file_format_conventions() {
    let v = su2_value();
    assert_eq!(v["matrix_dim"], json!(2));
    assert_eq!(v["frame_dim"], json!(3));
    // λ₁ = −(i/2)·Pauli₁, entry (0,1) is [0, −0.5]
    assert_eq!(v["lambda"][0][0][1], json!([0.0, -0.5]));
    // P^{01}{}_{01} = ½, P^{01}{}_{10} = −½
    assert_eq!(v["P"][0][1][0][1], json!([0.5, 0.0]));
    assert_eq!(v["P"][0][1][1][0], json!([-0.5, 0.0]));
    // flip: S^{01}{}_{10} = 1
    assert_eq!(v["S"][0][1][1][0], json!([1.0, 0.0]));
}

#[test]
fn non_antihermitian_lambda_is_rejected() {
    let mut v = su2_value();
    v["lambda"][0][0][0] = json!([1.0, 0.0]);
    let err = parse_input(&v.to_string(), 1e-9).unwrap_err();
    assert!(matches!(err, Error::Invariant { name: "lambda_antihermitian", .. }), "{err}");
}

#[test]
fn non_projector_is_rejected() {
    // sA with A the antisymmetrizer: (sA)² − sA = (s² − s)A and max|A| = ½,
    // so s² − s = 0.6 gives residual 0.3
    let s = (1.0 + 3.4f64.sqrt()) / 2.0;
    let p = CentralTensor::antisymmetrizer(3).scale(c64(s, 0.0));
    assert!((projector_residual(&p) - 0.3).abs() <= 1e-12);
    let mut g = value_to_geometry(&su2_value()).unwrap();
    g.p = p;
    let err = parse_input(&geometry_to_value(&g).to_string(), 1e-9).unwrap_err();
    assert!(matches!(err, Error::Invariant { name: "P_projector", .. }), "{err}");
}

#[test]
fn tau_replaces_s() {
    let mut v = su2_value();
    let obj = v.as_object_mut().unwrap();
    obj.remove("S");
    let tau = CentralTensor::identity(3, 2).scale(c64(2.0, 0.0));
    obj.insert("tau".into(), stehbein::io::tensor_to_value(&tau));
    let Input::Geometry(g) = parse_input(&v.to_string(), 1e-9).unwrap() else {
        panic!("geometry expected");
    };
    assert!(g.s.max_abs_diff(&CentralTensor::flip(3)).unwrap() <= 1e-15);
}

#[test]
fn malformed_inputs_are_parse_errors() {
    let cases = [
        "not json".to_string(),
        "[1, 2]".to_string(),
        json!({ "matrix_dim": 2, "frame_dim": 3 }).to_string(),
        {
            let mut v = su2_value();
            v.as_object_mut().unwrap().remove("P");
            v.to_string()
        },
        {
            let mut v = su2_value();
            v.as_object_mut().unwrap().remove("S");
            v.to_string()
        },
        {
            let mut v = su2_value();
            v["lambda"][1][0] = json!([[0.0, 0.0]]);
            v.to_string()
        },
        {
            let mut v = su2_value();
            v["P"][0][0][0][0] = json!("x");
            v.to_string()
        },
        json!({ "n": 2 }).to_string(),
    ];
    for text in &cases {
        let err = parse_input(text, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{text}: {err}");
    }
}

#[test]
fn braiding_only_files() {
    let b = Braiding::flip(2);
    let v = braiding_to_value(&b);
    assert_eq!(v["n"], json!(2));
    let Input::Braiding(back) = parse_input(&v.to_string(), 1e-9).unwrap() else {
        panic!("braiding expected");
    };
    assert_eq!(back, b);
    assert_eq!(parse_input(&v.to_string(), 1e-9).unwrap().geometry(), None);
    let g = random_geometry(1, Default::default());
    let input = parse_input(&geometry_to_value(&g).to_string(), 1e-9).unwrap();
    assert_eq!(input.braiding().unwrap().s(), &g.s);
}

#[test]
fn jn_and_curvature_documents() {
    let j = build_jn(&Braiding::flip(2), 3).unwrap();
    let v = jn_to_value(3, &j);
    assert_eq!(v["order"], json!(3));
    assert_eq!(v["J"][0][1][1][0][1][1], json!([1.0, 0.0]));
    assert_eq!(v["J"][0][1][1][1][1][0], json!([0.0, 0.0]));

    let (g, conn) = su2_torsionfree_connection();
    let data = curvature(&conn, &g, &g.s).unwrap();
    let v = curvature_to_value(&data);
    assert_eq!(v["R"].as_array().unwrap().len(), 3);
    assert_eq!(v["Ricci"][0][0].as_array().unwrap().len(), 2);
    assert_eq!(v["centrality_residual"], json!(data.centrality_residual));
}
