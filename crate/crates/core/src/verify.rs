//! Runs every consistency and reality check on an input and collects the
//! residuals into a [`VerificationReport`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::braiding::{
    check_block_braid, check_block_unambiguity, check_braid, check_sigma_consistency, check_yang_baxter, Braiding,
};
use crate::calculus::{
    check_d_leibniz, check_d_squared, check_df_commutator, check_structure, check_theta_squared, FrameGeometry,
};
use crate::connection::{
    check_curvature_closed_form, check_curvature_left_linearity, curvature_d0_general_defect, check_dn_sigma_lemma, check_metric_compatibility,
    check_metric_symmetry, curvature, leibniz_residuals, torsion, torsion_free_chi, Connection, CurvatureData,
};
use crate::error::{Error, Result};
use crate::involution::{
    build_j, build_jn, build_jn_with_word, check_d2_reality, check_dn_reality, check_fifa, check_metric_reality,
    check_product_compatibility, check_sigma_inv_j4, check_sigma_unitarity, check_wedge_star, involutivity_residual,
    recursive_forms, PermutationWord,
};
use crate::io::Input;

pub const REPORT_SCHEMA_ID: &str = "https://stehbein.dev/schema/verification-report-v1.json";
pub const REPORT_SCHEMA: &str = include_str!("../schema/verification-report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub equation_anchor: String,
    /// `None` for skipped checks.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub tolerance: f64,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line per check plus a totals line.
    pub fn human_summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let residual = c.residual.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
            out.push_str(&format!("{status:<5} {:<28} {residual:>10}", c.name));
            if !c.note.is_empty() {
                out.push_str("  ");
                out.push_str(&c.note);
            }
            out.push('\n');
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{} checks: {} passed, {} failed, {} skipped\n",
            s.total, s.passed, s.failed, s.skipped
        ));
        out
    }
}

/// Check groups in report order, with the identity each one tests.
pub const CHECKS: &[(&str, &str)] = &[
    ("structure", "2 λ_c λ_d P^{cd}_{ab} − λ_c F^c_{ab} − K_{ab} = 0"),
    ("theta-squared", "dθ + θ² = −½ K_{ab} θ^a θ^b"),
    ("d-squared", "d² f = 0"),
    ("d-leibniz", "d(fg) = (df) g + f dg"),
    ("df-commutator", "df = −[θ, f]"),
    ("sigma-consistency", "π ∘ (σ + 1) = 0"),
    ("product-compatibility", "(P^{ab}_{cd})* J^{cd}_{ef} = I^{ab}_{cd}P^{cd}_{ef} = I^{ab}_{ef}"),
    ("wedge-star", "(ξη)* = −η*ξ*"),
    ("braid", "σ₁₂σ₂₃σ₁₂ = σ₂₃σ₁₂σ₂₃"),
    ("yb", "J^{ab}_{pq}J^{pc}_{dr}J^{qr}_{ef} = J^{bc}_{pq}J^{aq}_{rf}J^{rp}_{de}"),
    ("sigma-unitarity", "(S^{ba}_{cd})* S^{dc}_{ef} = δ^a_e δ^b_f"),
    ("weak-yb-i", "I^{ab}_{cd} = −P^{ba}_{cd} weak Yang–Baxter form"),
    ("block-unambiguity", "σ((ξ⊗η)⊗ζ) = σ₁₂σ₂₃(ξ⊗η⊗ζ), σ(ξ⊗(η⊗ζ)) = σ₂₃σ₁₂(ξ⊗η⊗ζ)"),
    ("block-braid", "σ₁₂σ₂₃σ₁₂ = σ₂₃σ₁₂σ₂₃ on tensor blocks"),
    ("jn", "(J^{(n)})* J^{(n)} = 1"),
    ("jn-words", "ȷ_n independent of the reduced word for ε_n"),
    ("fifa", "σ_{i(i+1)} ℓ_n = ℓ_n σ⁻¹_{(n−i)(n+1−i)}"),
    ("sigma-inv-j4", "σ₁₂⁻¹ ȷ₄ = ȷ₄ σ₁₂"),
    ("leibniz-left", "D(fξ) = df ⊗ ξ + f Dξ"),
    ("leibniz-right", "D(ξf) = σ(ξ ⊗ df) + (Dξ) f"),
    ("torsion", "Θ^a = dθ^a − π∘Dθ^a  ⇔  ω^a_{de}P^{de}_{bc} = ½C^a_{bc}"),
    ("metric-symmetry", "g ∘ σ ∝ g"),
    ("metric-compatibility", "ω^a_{bc} + ω_{cd}^e S^{ad}_{be} = 0;  S^{ae}_{df} g^{fg} S^{bc}_{eg} = g^{ab} δ^c_d"),
    ("metric-reality", "S^{ab}_{cd} g^{cd} = (g^{ba})*"),
    ("connection-reality", "(ω^a_{bc})* = ω^a_{de} (J^{de}_{bc})*"),
    ("d2-reality", "D₂ ∘ ȷ₂ = ȷ₃ ∘ D₂  ⇔  four-term condition  ⇔  D₂ ∘ σ = σ₂₃ ∘ D₂"),
    ("dn-lemma", "D_n ∘ σ_{(i−1)i} = σ_{i(i+1)} ∘ D_n"),
    ("dn-reality", "D_n ∘ ȷ_n = ȷ_{n+1} ∘ D_n"),
    ("curvature-closed-form", "Curv_(0)(θ^a) = θ²⊗θ^a + π₁₂σ₁₂σ₂₃σ₁₂(θ^a⊗θ⊗θ)"),
    ("curvature-left-linear", "Curv(fξ) = f Curv(ξ)"),
];

pub fn known_checks() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|(n, _)| *n)
}

fn anchor(group: &str) -> &'static str {
    CHECKS
        .iter()
        .find(|(n, _)| *n == group)
        .map(|(_, a)| *a)
        .expect("every recorded group is registered")
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    /// Selected groups; `None` runs everything applicable.
    pub checks: Option<BTreeSet<String>>,
    /// Highest ȷ_n / D_n order.
    pub max_order: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            checks: None,
            max_order: 4,
            seed: 42,
        }
    }
}

impl VerifyOptions {
    /// Parses a comma list of groups, rejecting unknown names.
    pub fn select(&mut self, list: &str) -> Result<()> {
        let mut set = BTreeSet::new();
        for raw in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if !known_checks().any(|k| k == raw) {
                return Err(Error::Parse(format!("unknown check `{raw}`")));
            }
            set.insert(raw.to_string());
        }
        self.checks = Some(set);
        Ok(())
    }

    fn wants(&self, group: &str) -> bool {
        self.checks.as_ref().is_none_or(|s| s.contains(group))
    }
}

enum Outcome {
    Residual(f64, String),
    Skip(String),
}

fn res(r: f64) -> Result<Outcome> {
    Ok(Outcome::Residual(r, String::new()))
}

fn res_note(r: f64, note: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Residual(r, note.into()))
}

fn skip(note: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Skip(note.into()))
}

struct Runner<'a> {
    opts: &'a VerifyOptions,
    checks: Vec<CheckResult>,
}

impl Runner<'_> {
    fn record(&mut self, group: &str, name: &str, f: impl FnOnce() -> Result<Outcome>) -> Result<()> {
        if !self.opts.wants(group) {
            return Ok(());
        }
        let tol = self.opts.tol;
        let (residual, status, note) = match f()? {
            Outcome::Residual(r, note) => {
                let status = if r <= tol { Status::Pass } else { Status::Fail };
                (Some(r), status, note)
            }
            Outcome::Skip(note) => (None, Status::Skipped, note),
        };
        self.checks.push(CheckResult {
            name: name.to_string(),
            equation_anchor: anchor(group).to_string(),
            residual,
            tolerance: tol,
            status,
            note,
        });
        Ok(())
    }

    fn group(&mut self, group: &str, f: impl FnOnce() -> Result<Outcome>) -> Result<()> {
        self.record(group, group, f)
    }

    fn skip_all(&mut self, groups: &[&str], note: &str) -> Result<()> {
        for g in groups {
            self.group(g, || skip(note))?;
        }
        Ok(())
    }
}

const GEOMETRY_GROUPS: &[&str] = &[
    "structure",
    "theta-squared",
    "d-squared",
    "d-leibniz",
    "df-commutator",
    "sigma-consistency",
    "product-compatibility",
    "wedge-star",
];

const CONNECTION_GROUPS: &[&str] = &[
    "leibniz-left",
    "leibniz-right",
    "torsion",
    "metric-symmetry",
    "metric-compatibility",
    "metric-reality",
    "connection-reality",
    "d2-reality",
    "dn-lemma",
    "dn-reality",
    "curvature-closed-form",
    "curvature-left-linear",
];

pub fn run_verify(input: &Input, opts: &VerifyOptions) -> Result<VerificationReport> {
    let mut run = Runner { opts, checks: Vec::new() };
    let b = input.braiding()?;
    let geom = input.geometry();
    let seed = opts.seed;
    let tol = opts.tol;
    const NO_GEOMETRY: &str = "requires a geometry; input is a braiding-only file";

    match geom {
        Some(g) => geometry_checks(&mut run, g, seed)?,
        None => run.skip_all(GEOMETRY_GROUPS, NO_GEOMETRY)?,
    }

    let braid = check_braid(&b)?;
    run.group("braid", || res(braid))?;
    run.group("yb", || res(check_yang_baxter(&build_j(b.s()))?))?;
    run.group("sigma-unitarity", || res(check_sigma_unitarity(b.s())?))?;
    run.group("weak-yb-i", || skip("not checked: the weak form is not specified"))?;
    run.group("block-unambiguity", || res(check_block_unambiguity(&b, 4)?))?;
    run.group("block-braid", || res(check_block_braid(&b, 5)?))?;
    braiding_order_checks(&mut run, &b, braid, tol)?;

    match geom {
        Some(g) => connection_checks(&mut run, g, &b, seed)?,
        None => run.skip_all(CONNECTION_GROUPS, NO_GEOMETRY)?,
    }

    let checks = run.checks;
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let summary = Summary {
        total: checks.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
    };
    Ok(VerificationReport {
        schema: REPORT_SCHEMA_ID.to_string(),
        tolerance: tol,
        checks,
        summary,
    })
}

fn geometry_checks(run: &mut Runner, g: &FrameGeometry, seed: u64) -> Result<()> {
    run.group("structure", || res(check_structure(g)))?;
    run.group("theta-squared", || res(check_theta_squared(g)?))?;
    run.group("d-squared", || res_note(check_d_squared(g, seed, 100)?, "100 seeded f"))?;
    run.group("d-leibniz", || res(check_d_leibniz(g, seed, 20)?))?;
    run.group("df-commutator", || res(check_df_commutator(g, seed, 20)?))?;
    run.group("sigma-consistency", || res(check_sigma_consistency(&g.s, &g.p)?))?;
    run.group("product-compatibility", || res(check_product_compatibility(&g.p, &g.s)?))?;
    run.group("wedge-star", || res(check_wedge_star(g, seed, 10)?))?;
    Ok(())
}

fn braiding_order_checks(run: &mut Runner, b: &Braiding, braid: f64, tol: f64) -> Result<()> {
    let max = run.opts.max_order;
    let braid_note = if braid > tol {
        format!("braid residual {braid:.3e}")
    } else {
        String::new()
    };
    for order in 2..=max {
        run.record("jn", &format!("jn:{order}"), || {
            res_note(involutivity_residual(&build_jn(b, order)?)?, braid_note.clone())
        })?;
    }
    for order in 3..=max {
        run.record("jn-words", &format!("jn-words:{order}"), || {
            if braid > tol {
                return skip(format!("words agree only under the braid equation ({braid_note})"));
            }
            let canonical = build_jn(b, order)?;
            let mut worst = build_jn_with_word(b, &PermutationWord::alternative(order)?)?.max_abs_diff(&canonical)?;
            for (o, t) in recursive_forms(b)? {
                if o == order {
                    worst = worst.max(t.max_abs_diff(&canonical)?);
                }
            }
            res(worst)
        })?;
    }
    for order in 2..=max {
        for i in 1..order {
            run.record("fifa", &format!("fifa:{order}:{i}"), || match check_fifa(b, order, i)? {
                Some(r) => res(r),
                None => skip(format!("σ⁻¹ unavailable (condition number {:.3e})", b.condition_number())),
            })?;
        }
    }
    if max >= 4 {
        run.group("sigma-inv-j4", || match check_sigma_inv_j4(b)? {
            Some(r) => res(r),
            None => skip(format!("σ⁻¹ unavailable (condition number {:.3e})", b.condition_number())),
        })?;
    }
    Ok(())
}

fn connection_checks(run: &mut Runner, g: &FrameGeometry, b: &Braiding, seed: u64) -> Result<()> {
    let tol = run.opts.tol;
    let max = run.opts.max_order;
    let conn = Connection::from_geometry(g)?;
    let s = b.s();

    if run.opts.wants("leibniz-left") || run.opts.wants("leibniz-right") {
        let (left, right) = leibniz_residuals(&conn, g, s, seed, 50)?;
        run.group("leibniz-left", || res_note(left, "50 seeded (f, ξ)"))?;
        run.group("leibniz-right", || res_note(right, "50 seeded (f, ξ)"))?;
    }
    let tor = torsion(&conn, g)?;
    run.group("torsion", || {
        let note = format!("‖Θ‖ = {:.3e}, algebraic residual = {:.3e}", tor.form_norm, tor.algebraic_residual);
        res_note((tor.form_norm - tor.algebraic_residual).abs(), note)
    })?;

    match &g.metric {
        Some(metric) => {
            run.group("metric-symmetry", || {
                let (r, c) = check_metric_symmetry(metric, s)?;
                res_note(r, format!("c = {:.6} {:+.6}i", c.re, c.im))
            })?;
            run.group("metric-compatibility", || match check_metric_compatibility(&conn, s, metric) {
                Ok((r1, r2)) => res_note(
                    r1.max(r2),
                    format!("ω-form {r1:.3e} (indices lowered with the inverse metric), σ-form {r2:.3e}"),
                ),
                Err(Error::Singular(what)) => skip(format!("singular {what}")),
                Err(e) => Err(e),
            })?;
            run.group("metric-reality", || res(check_metric_reality(metric, s)?))?;
        }
        None => run.skip_all(&["metric-symmetry", "metric-compatibility", "metric-reality"], "no metric in input")?,
    }

    let d2r = check_d2_reality(&conn, g, b)?;
    run.group("connection-reality", || res(d2r.real1st))?;
    if run.opts.wants("d2-reality") && !d2r.consistent(tol) {
        return Err(Error::Internal(format!(
            "D₂ reality forms disagree: D₂ȷ₂ − ȷ₃D₂ {:.3e}, four-term {:.3e}, D₂σ − σ₂₃D₂ {:.3e}",
            d2r.dopo, d2r.real2nd, d2r.equi
        )));
    }
    run.group("d2-reality", || {
        res_note(
            d2r.worst(),
            format!("D₂ȷ₂ − ȷ₃D₂ {:.3e}, four-term {:.3e}, D₂σ − σ₂₃D₂ {:.3e}", d2r.dopo, d2r.real2nd, d2r.equi),
        )
    })?;

    for order in 2..=max {
        run.record("dn-lemma", &format!("dn-lemma:{order}"), || res(check_dn_sigma_lemma(&conn, g, s, order)?))?;
    }
    for order in 1..=max {
        run.record("dn-reality", &format!("dn-reality:{order}"), || res(check_dn_reality(&conn, g, b, order)?))?;
    }

    run.group("curvature-closed-form", || {
        let general = curvature_d0_general_defect(g, s, seed, 3)?;
        res_note(
            check_curvature_closed_form(g, s)?,
            format!("D_(0) on θ^a; seeded general 1-forms deviate by {general:.3e} when Curv_(0) is not left linear"),
        )
    })?;
    run.group("curvature-left-linear", || {
        let d2f = check_d_squared(g, seed, 10)?;
        if tor.form_norm > tol || d2f > tol {
            return skip("left-linearity needs a torsion-free connection and d² = 0");
        }
        res(check_curvature_left_linearity(&conn, g, s, seed, 5)?)
    })?;
    Ok(())
}

/// How the connection for a curvature run is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionChoice {
    /// ω from the file, or D_(0) + χ from the file.
    File,
    D0,
    TorsionFree,
}

pub fn select_connection(g: &FrameGeometry, choice: ConnectionChoice) -> Result<Connection> {
    let d0 = crate::connection::d0_connection(g, &g.s);
    match choice {
        ConnectionChoice::File => {
            if g.omega.is_none() && g.chi.is_none() {
                return Err(Error::Parse("input carries neither \"omega\" nor \"chi\"".into()));
            }
            Connection::from_geometry(g)
        }
        ConnectionChoice::D0 => Ok(d0),
        ConnectionChoice::TorsionFree => d0.with_chi(&torsion_free_chi(g)?),
    }
}

pub fn run_curvature(g: &FrameGeometry, choice: ConnectionChoice) -> Result<CurvatureData> {
    let conn = select_connection(g, choice)?;
    curvature(&conn, g, &g.s)
}
