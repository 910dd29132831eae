//! Golden reference checks against published filter coefficients and
//! performance figures.

use serde::{Deserialize, Serialize};

use crate::analysis::{mesg, orbital_errors, sigma_metrics, wng};
use crate::design::{alpha_beta_tf, design, kalata_gains, ocf_transform, TransferFunction};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::models::ModelSpec;
use crate::simulate::{mc_evaluate, NamedFilter, ScenarioConfig};

/// How a computed value is compared with its reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
    /// The computed magnitude must not exceed the bound.
    AtMost(f64),
}

impl Tolerance {
    pub fn accepts(&self, reference: f64, computed: f64) -> bool {
        if !computed.is_finite() {
            return false;
        }
        match *self {
            Tolerance::Absolute(t) => (computed - reference).abs() <= t,
            Tolerance::Relative(t) => (computed - reference).abs() <= t * reference.abs(),
            Tolerance::AtMost(b) => computed.abs() <= b,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Tolerance::Absolute(t) => format!("+/-{t:.1e}"),
            Tolerance::Relative(t) => format!("+/-{:.1}%", 100.0 * t),
            Tolerance::AtMost(b) => format!("|x|<={b:.0e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub group: String,
    pub name: String,
    /// Reference value as printed.
    pub reference: String,
    pub computed: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

/// Knobs for exercising the failure path.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SuiteOptions {
    /// Added to the first numerator coefficient of the worked-example
    /// design before it is compared.
    pub perturb_b0: f64,
}

/// Decimal places and exponent of a printed number such as `0.0540` or `4.9e-4`.
fn printed_unit(s: &str) -> f64 {
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().expect("printed exponent")),
        None => (s, 0),
    };
    let dp = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    10f64.powi(exp - dp)
}

fn parse(s: &str) -> f64 {
    s.parse().expect("printed reference value")
}

struct Suite {
    rows: Vec<GoldenRow>,
}

impl Suite {
    fn push(
        &mut self,
        group: &str,
        name: String,
        reference: &str,
        computed: f64,
        tolerance: Tolerance,
    ) {
        let pass = tolerance.accepts(parse(reference), computed);
        self.rows.push(GoldenRow {
            group: group.into(),
            name,
            reference: reference.into(),
            computed,
            tolerance,
            pass,
        });
    }

    /// Coefficient compared at the precision it was printed with, and never
    /// looser than half a unit in the third decimal.
    fn printed(&mut self, group: &str, name: String, reference: &str, computed: f64) {
        let tol = 0.5 * printed_unit(reference).min(1e-3);
        self.push(group, name, reference, computed, Tolerance::Absolute(tol));
    }

    fn vector(&mut self, group: &str, name: &str, reference: &[&str], computed: &[f64]) {
        for (i, (p, c)) in reference.iter().zip(computed).enumerate() {
            self.printed(group, format!("{name}[{i}]"), p, *c);
        }
    }

    fn matrix(&mut self, group: &str, name: &str, reference: &[[&str; 3]; 3], computed: &Matrix) {
        for (i, row) in reference.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                self.printed(group, format!("{name}[{i},{j}]"), p, computed[(i, j)]);
            }
        }
    }

    /// Table entry: 0.5% relative or one unit in the last printed digit.
    fn metric(&mut self, group: &str, name: String, reference: &str, computed: f64) {
        let unit = printed_unit(reference);
        let rel = 0.005f64.max(unit / parse(reference).abs());
        self.push(group, name, reference, computed, Tolerance::Relative(rel));
    }
}

pub fn worked_example_spec() -> ModelSpec {
    ModelSpec {
        k_tgt: 2,
        k_man: 0,
        k_int: 1,
        ts: 0.04,
        omega: None,
        pole: 0.8,
        q: 2,
        d: 0,
    }
}

pub fn maneuver_spec() -> ModelSpec {
    ModelSpec {
        k_man: 1,
        omega: Some(2.5),
        ..worked_example_spec()
    }
}

/// The five published configurations: A, B at p = 0.8, C, B at 0.7 and 0.9.
pub fn table_filters() -> Result<Vec<NamedFilter>> {
    let (alpha, beta) = kalata_gains(0.1);
    let b = |p: f64| -> Result<TransferFunction> {
        Ok(design(&ModelSpec {
            pole: p,
            ..worked_example_spec()
        })?
        .1)
    };
    let named = |name: &str, tf| NamedFilter {
        name: name.into(),
        tf,
        q: 2,
    };
    Ok(vec![
        named("A", alpha_beta_tf(alpha, beta, 2)),
        named("B@0.8", b(0.8)?),
        named("C", design(&maneuver_spec())?.1),
        named("B@0.7", b(0.7)?),
        named("B@0.9", b(0.9)?),
    ])
}

/// Runs every golden check.
pub fn golden_suite(opts: &SuiteOptions) -> Result<Vec<GoldenRow>> {
    let mut s = Suite { rows: Vec::new() };

    // worked example
    let g = "worked example";
    let spec = worked_example_spec();
    let (obs, mut tf) = design(&spec)?;
    tf.b[0] += opts.perturb_b0;
    let ocf = ocf_transform(&obs)?;
    s.vector(g, "K_pcf", &["-1.512", "2.920", "-1.400"], &obs.gain_pcf);
    s.matrix(
        g,
        "O_prc_kin",
        &[["1", "0.04", "-1"], ["1", "0.08", "1"], ["1", "0.12", "-1"]],
        &obs.o_prc_kin,
    );
    s.matrix(
        g,
        "T_kin<-pcf",
        &[
            ["-0.75", "-0.25", "0.25"],
            ["12.50", "12.50", "12.50"],
            ["-0.25", "0.25", "-0.25"],
        ],
        &obs.t_kin_from_pcf,
    );
    s.matrix(
        g,
        "T_pcf<-kin",
        &[
            ["-1", "0.00", "-1"],
            ["0", "0.04", "2"],
            ["1", "0.04", "-1"],
        ],
        &obs.t_pcf_from_kin,
    );
    s.vector(g, "K_kin", &["0.054", "0.100", "1.458"], &obs.gain_kin);
    s.matrix(
        g,
        "G_obs_kin",
        &[
            ["0.9460", "0.0378", "0.0540"],
            ["-0.1000", "0.9960", "0.1000"],
            ["-1.4580", "-0.0583", "0.4580"],
        ],
        &obs.g_obs_kin,
    );
    s.matrix(
        g,
        "O_obs_kin",
        &[
            ["1", "-0.0800", "0"],
            ["0.9540", "-0.0418", "0.0460"],
            ["0.8396", "-0.0083", "0.0684"],
        ],
        &ocf.o_obs_kin,
    );
    s.matrix(
        g,
        "O_obs_ocf",
        &[["0", "0", "1"], ["0", "1", "2.40"], ["1", "2.40", "3.84"]],
        &ocf.o_obs_ocf,
    );
    s.matrix(
        g,
        "T_kin<-ocf",
        &[
            ["10.4688", "9.5585", "9.9012"],
            ["130.8603", "119.4811", "111.2654"],
            ["-98.0883", "-67.8198", "-51.9659"],
        ],
        &ocf.t_kin_from_ocf,
    );
    s.matrix(
        g,
        "T_ocf<-kin",
        &[
            ["0.470", "-0.0614", "-0.042"],
            ["-1.446", "0.1502", "0.046"],
            ["1.000", "-0.0800", "0.000"],
        ],
        &ocf.t_ocf_from_kin,
    );
    s.vector(
        g,
        "H_obs_ocf",
        &["-0.042", "0.004", "0.046"],
        &ocf.h_obs_ocf,
    );
    s.vector(g, "b", &["0.046", "0.004", "-0.042", "0"], &tf.b);
    s.vector(g, "a", &["1.000", "-2.400", "1.920", "-0.512"], &tf.a);

    // coefficient table
    let g = "coefficients";
    let (alpha, beta) = kalata_gains(0.1);
    s.push(
        g,
        "A alpha".into(),
        "0.36",
        alpha,
        Tolerance::Absolute(1e-9),
    );
    s.push(g, "A beta".into(), "0.08", beta, Tolerance::Absolute(1e-9));
    let ab = alpha_beta_tf(alpha, beta, 2);
    // complex pair: |z|^2 is the constant coefficient
    let disc = ab.a[1] * ab.a[1] - 4.0 * ab.a[2];
    let radius = if disc < 0.0 {
        ab.a[2].sqrt()
    } else {
        ((-ab.a[1]).abs() + disc.sqrt()) / 2.0
    };
    s.push(
        g,
        "A pole radius".into(),
        "0.8",
        radius,
        Tolerance::Absolute(1e-12),
    );
    let c = design(&maneuver_spec())?.1;
    s.vector(
        g,
        "C b",
        &["0.0899", "-0.1532", "-0.0232", "0.1534", "-0.0666", "0"],
        &c.b,
    );
    s.vector(
        g,
        "C a",
        &["1", "-4.0", "6.4", "-5.12", "2.048", "-0.3277"],
        &c.a,
    );

    // analytic metrics at the maneuver frequency
    let g = "analytic metrics";
    let filters = table_filters()?;
    let published: [[&str; 6]; 5] = [
        ["0.156", "4.9e-4", "0.558", "0.222", "0.148", "-0.945"],
        ["0.125", "5.6e-2", "0.499", "2.358", "1.288", "-10.66"],
        ["0.188", "1.9e-19", "0.614", "4.4e-9", "-2.3e-9", "-2.1e-8"],
        ["0.165", "3.1e-3", "0.575", "0.558", "0.400", "-2.186"],
        ["0.069", "0.689", "0.372", "8.303", "0.624", "-47.36"],
    ];
    let w = 0.1;
    for (f, row) in filters.iter().zip(published) {
        let wn = wng(&f.tf)?;
        let m = mesg(&f.tf, w, f.q, 0, 0.04)?;
        let (st, sm) = sigma_metrics(wn, m, 1.0, 10.0);
        let (er, et) = orbital_errors(&f.tf, w, f.q, 10.0)?;
        let n = &f.name;
        s.metric(g, format!("{n} WNG"), row[0], wn);
        s.metric(g, format!("{n} sigma_tgt"), row[2], st);
        if n == "C" {
            // published values are at rounding-noise level; only smallness is meaningful
            s.push(g, format!("{n} MESG"), row[1], m, Tolerance::AtMost(1e-15));
            s.push(
                g,
                format!("{n} sigma_man"),
                row[3],
                sm,
                Tolerance::AtMost(1e-6),
            );
            s.push(g, format!("{n} eps_R"), row[4], er, Tolerance::AtMost(1e-7));
            s.push(
                g,
                format!("{n} eps_theta"),
                row[5],
                et,
                Tolerance::AtMost(1e-7),
            );
        } else {
            s.metric(g, format!("{n} MESG"), row[1], m);
            s.metric(g, format!("{n} sigma_man"), row[3], sm);
            s.metric(g, format!("{n} eps_R"), row[4], er);
            s.metric(g, format!("{n} eps_theta"), row[5], et);
        }
    }

    // noise-free circular orbit, errors at the last frame
    let g = "circular orbit";
    let observed: [[&str; 3]; 5] = [
        ["0.221", "0.147", "-0.936"],
        ["2.345", "1.287", "-10.59"],
        ["1.6e-3", "-8.1e-4", "-7.8e-3"],
        ["0.555", "0.398", "-2.168"],
        ["8.284", "0.643", "-47.19"],
    ];
    let sims = mc_evaluate(&ScenarioConfig::scenario(2), &filters, 1)?;
    for (r, row) in sims.iter().zip(observed) {
        let n = &r.name;
        let t = &r.terminal;
        let (er, et) = (
            t.eps_r.unwrap_or(f64::NAN),
            t.eps_theta_deg.unwrap_or(f64::NAN),
        );
        if n == "C" {
            s.push(
                g,
                format!("{n} dist"),
                row[0],
                t.dist,
                Tolerance::AtMost(2e-3),
            );
        } else {
            let rel = if n == "B@0.9" { 0.04 } else { 0.015 };
            s.push(
                g,
                format!("{n} dist"),
                row[0],
                t.dist,
                Tolerance::Relative(rel),
            );
            s.push(
                g,
                format!("{n} eps_R"),
                row[1],
                er,
                Tolerance::Relative(rel),
            );
            s.push(
                g,
                format!("{n} eps_theta"),
                row[2],
                et,
                Tolerance::Relative(rel),
            );
        }
    }
    Ok(s.rows)
}

/// Fixed-width pass/fail table.
pub fn format_table(rows: &[GoldenRow]) -> String {
    let mut out = format!(
        "{:<18} {:<22} {:>12} {:>14} {:>12}  {}\n",
        "group", "check", "reference", "computed", "tolerance", "result"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<18} {:<22} {:>12} {:>14.6} {:>12}  {}\n",
            r.group,
            r.name,
            r.reference,
            r.computed,
            r.tolerance.describe(),
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_units() {
        assert_eq!(printed_unit("0.054"), 1e-3);
        assert_eq!(printed_unit("12.50"), 1e-2);
        assert_eq!(printed_unit("1"), 1.0);
        assert!((printed_unit("4.9e-4") - 1e-5).abs() < 1e-20);
        assert!((printed_unit("-2.1e-8") - 1e-9).abs() < 1e-24);
    }

    #[test]
    fn tolerance_kinds() {
        assert!(Tolerance::Absolute(0.1).accepts(1.0, 1.05));
        assert!(!Tolerance::Relative(0.01).accepts(2.0, 2.03));
        assert!(Tolerance::AtMost(1e-3).accepts(5.0, -1e-4));
        assert!(!Tolerance::Absolute(1.0).accepts(0.0, f64::NAN));
    }

    #[test]
    fn suite_passes_and_detects_perturbation() {
        let rows = golden_suite(&SuiteOptions::default()).unwrap();
        let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{}", format_table(&rows));
        let table_rows = rows
            .iter()
            .filter(|r| r.group == "analytic metrics")
            .count();
        assert_eq!(table_rows, 30);
        let rows = golden_suite(&SuiteOptions { perturb_b0: 0.01 }).unwrap();
        assert!(rows.iter().any(|r| !r.pass && r.name == "b[0]"));
    }
}
