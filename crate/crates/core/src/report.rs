//! Reproduction of the published deflection tables, comparison against the
//! observational value, and serialization as text, CSV, or JSON.
//!
//! Text output mirrors the published layout: scenario labels run across
//! the columns, the deflections below them, with 10⁶ arcsec abbreviated
//! as `a` for the multi-revolution branches. Printed arcseconds carry
//! four significant digits truncated toward zero, which reproduces the
//! published digits exactly; CSV and JSON carry full binary precision.

use serde::{Deserialize, Serialize};

use crate::deflection::{branch_sweep, deflection_closed_form, DeflectionResult};
use crate::error::Error;
use crate::model::{derive, ModelParams};
use crate::scalar::{lit, Scalar};

/// Observed solar-limb deflection used as the comparison default:
/// 1.775 ± 0.019 arcsec, the classic optical measurement quoted alongside
/// the table this module reproduces.
pub const OBSERVED_DEFLECTION_ARCSEC: (f64, f64) = (1.775, 0.019);

/// Published deflections for δ = 1R, 1.3R, 2R (arcsec, m = 1).
const TABLE1_PRINTED: [(f64, f64); 3] = [(1.0, 1.563), (1.3, 1.769), (2.0, 2.250)];

/// Published branch sweep at δ = 1.3R (arcsec; a = 10⁶).
#[rustfmt::skip]
const TABLE2_PRINTED: [(i32, f64); 17] = [
    (-7, -10.0e6), (-6, -9.0e6), (-5, -7.8e6), (-4, -6.5e6), (-3, -5.2e6),
    (-2, -3.9e6), (-1, -2.6e6), (0, -1.3e6), (1, 1.769), (2, 1.3e6),
    (3, 2.6e6), (4, 3.9e6), (5, 5.2e6), (6, 6.5e6), (7, 7.8e6),
    (8, 9.0e6), (9, 10.0e6),
];

/// An observation with symmetric uncertainty, in arcseconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation<T> {
    pub value: T,
    pub uncertainty: T,
}

impl<T: Scalar> Observation<T> {
    pub fn new(value: T, uncertainty: T) -> Result<Self, Error> {
        if uncertainty <= T::zero() || uncertainty.is_nan() {
            return Err(Error::domain(format!(
                "observation uncertainty must be > 0, got {uncertainty}"
            )));
        }
        Ok(Self { value, uncertainty })
    }

    /// The default solar-limb observation.
    pub fn solar_limb() -> Self {
        Self {
            value: lit(OBSERVED_DEFLECTION_ARCSEC.0),
            uncertainty: lit(OBSERVED_DEFLECTION_ARCSEC.1),
        }
    }
}

/// Which sweep a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    DeltaSweep,
    MSweep,
}

/// One table row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub label: String,
    pub delta_theta_arcsec: T,
    pub within_observation: Option<bool>,
    pub paper_value_arcsec: Option<T>,
    pub abs_difference_arcsec: Option<T>,
}

/// Ordered sweep rows with comparison columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable<T> {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow<T>>,
}

impl<T> SweepTable<T> {
    fn validate(self) -> Result<Self, Error> {
        if self.rows.is_empty() {
            return Err(Error::domain("sweep table must have at least one row"));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if self.rows[..i].iter().any(|r| r.label == row.label) {
                return Err(Error::domain(format!(
                    "duplicate sweep label '{}'",
                    row.label
                )));
            }
        }
        Ok(self)
    }
}

/// Is `result` inside the observation interval, and by how many sigma is
/// it off center (signed)?
pub fn compare_observation<T: Scalar>(
    result: &DeflectionResult<T>,
    obs: &Observation<T>,
) -> (bool, T) {
    let diff = result.delta_theta_arcsec - obs.value;
    (diff.abs() <= obs.uncertainty, diff / obs.uncertainty)
}

/// Deflection for each δ multiple (m = 1, closed form), against the
/// default observation.
pub fn table1<T: Scalar>(
    params_base: &ModelParams<T>,
    delta_multiples: &[T],
) -> Result<SweepTable<T>, Error> {
    table1_with_observation(params_base, delta_multiples, &Observation::solar_limb())
}

/// As [`table1`] with an explicit observation.
pub fn table1_with_observation<T: Scalar>(
    params_base: &ModelParams<T>,
    delta_multiples: &[T],
    obs: &Observation<T>,
) -> Result<SweepTable<T>, Error> {
    let mut rows = Vec::with_capacity(delta_multiples.len());
    for &mult in delta_multiples {
        let params = ModelParams::new(
            mult * params_base.r_impact,
            params_base.r_impact,
            params_base.constants,
        )?;
        let dq = derive(&params)?;
        let result = deflection_closed_form(&dq, 1);
        let (within, _) = compare_observation(&result, obs);
        let paper = table1_printed_value(mult);
        rows.push(SweepRow {
            label: format!("{mult}R"),
            delta_theta_arcsec: result.delta_theta_arcsec,
            within_observation: Some(within),
            paper_value_arcsec: paper,
            abs_difference_arcsec: paper.map(|p| (result.delta_theta_arcsec - p).abs()),
        });
    }
    SweepTable {
        kind: SweepKind::DeltaSweep,
        rows,
    }
    .validate()
}

fn table1_printed_value<T: Scalar>(mult: T) -> Option<T> {
    let m = mult.to_f64()?;
    TABLE1_PRINTED
        .iter()
        .find(|(pm, _)| (m - pm).abs() <= 1e-9)
        .map(|&(_, v)| lit(v))
}

/// Branch sweep table: one row per m in `m_min..=m_max`, arcseconds,
/// without modular reduction. Published comparison values are attached
/// when the scenario is the published one (δ = 1.3R).
pub fn table2<T: Scalar>(
    params: &ModelParams<T>,
    m_min: i32,
    m_max: i32,
) -> Result<SweepTable<T>, Error> {
    if m_min > m_max {
        return Err(Error::domain(format!(
            "empty branch interval [{m_min}, {m_max}]"
        )));
    }
    let dq = derive(params)?;
    let is_published_scenario =
        (params.delta_multiple().to_f64().unwrap_or(f64::NAN) - 1.3).abs() <= 1e-9;
    let rows = branch_sweep(&dq, m_min, m_max)
        .into_iter()
        .map(|r| {
            let paper = if is_published_scenario {
                TABLE2_PRINTED
                    .iter()
                    .find(|(pm, _)| *pm == r.branch_m)
                    .map(|&(_, v)| lit(v))
            } else {
                None
            };
            SweepRow {
                label: r.branch_m.to_string(),
                delta_theta_arcsec: r.delta_theta_arcsec,
                within_observation: None,
                paper_value_arcsec: paper,
                abs_difference_arcsec: paper.map(|p| (r.delta_theta_arcsec - p).abs()),
            }
        })
        .collect();
    SweepTable {
        kind: SweepKind::MSweep,
        rows,
    }
    .validate()
}

/// Output encodings for [`render`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

/// Serialize a sweep table. Output is deterministic byte-for-byte for
/// identical inputs in every format.
pub fn render<T: Scalar + Serialize>(table: &SweepTable<T>, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Text => render_text(table).into_bytes(),
        OutputFormat::Csv => render_csv(table).into_bytes(),
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(table).expect("table serialization");
            bytes.push(b'\n');
            bytes
        }
    }
}

fn render_csv<T: Scalar>(table: &SweepTable<T>) -> String {
    let mut out = String::from(
        "label,delta_theta_arcsec,within_observation,paper_value_arcsec,abs_difference_arcsec\n",
    );
    for row in &table.rows {
        let within = match row.within_observation {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.label,
            full_precision(row.delta_theta_arcsec),
            within,
            row.paper_value_arcsec
                .map(full_precision)
                .unwrap_or_default(),
            row.abs_difference_arcsec
                .map(full_precision)
                .unwrap_or_default(),
        ));
    }
    out
}

/// 17 significant digits: round-trips binary64 exactly.
fn full_precision<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

fn render_text<T: Scalar>(table: &SweepTable<T>) -> String {
    let head_label = match table.kind {
        SweepKind::DeltaSweep => "delta",
        SweepKind::MSweep => "m",
    };
    let show_within = table.rows.iter().any(|r| r.within_observation.is_some());

    let mut out = String::new();
    for bank in table.rows.chunks(9) {
        let mut lines: Vec<(String, Vec<String>)> = vec![
            (
                head_label.to_string(),
                bank.iter().map(|r| r.label.clone()).collect(),
            ),
            (
                "dtheta[arcsec]".to_string(),
                bank.iter()
                    .map(|r| fmt_arcsec(r.delta_theta_arcsec))
                    .collect(),
            ),
            (
                "paper[arcsec]".to_string(),
                bank.iter()
                    .map(|r| {
                        r.paper_value_arcsec
                            .map(fmt_arcsec)
                            .unwrap_or_else(|| "-".into())
                    })
                    .collect(),
            ),
            (
                "|diff|[arcsec]".to_string(),
                bank.iter()
                    .map(|r| {
                        r.abs_difference_arcsec
                            .map(fmt_arcsec)
                            .unwrap_or_else(|| "-".into())
                    })
                    .collect(),
            ),
        ];
        if show_within {
            lines.push((
                "within obs".to_string(),
                bank.iter()
                    .map(|r| match r.within_observation {
                        Some(true) => "yes".into(),
                        Some(false) => "no".into(),
                        None => "-".into(),
                    })
                    .collect(),
            ));
        }

        let label_width = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        let mut col_widths = vec![0usize; bank.len()];
        for (_, cells) in &lines {
            for (i, cell) in cells.iter().enumerate() {
                col_widths[i] = col_widths[i].max(cell.len());
            }
        }
        for (label, cells) in &lines {
            out.push_str(&format!("{label:<label_width$}"));
            for (i, cell) in cells.iter().enumerate() {
                out.push_str(&format!("  {:>width$}", cell, width = col_widths[i]));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Arcsecond display: values at or above 10⁵ arcsec in units of
/// a = 10⁶ arcsec, everything else at four significant digits.
fn fmt_arcsec<T: Scalar>(v: T) -> String {
    let x = v.to_f64().unwrap_or(f64::NAN);
    if x.abs() >= 1e5 {
        format!("{:.1}a", x / 1e6)
    } else {
        sig4_trunc(x)
    }
}

/// Four significant digits, truncated toward zero — the rounding the
/// published table itself uses (1.7695… prints as 1.769).
pub fn sig4_trunc(x: f64) -> String {
    if x == 0.0 {
        return "0.000".into();
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let ax = x.abs();
    if !(1e-3..1e4).contains(&ax) {
        let exp = ax.log10().floor();
        let mantissa = (ax / 10f64.powf(exp) * 1000.0).floor() / 1000.0;
        return format!("{sign}{mantissa:.3}e{}", exp as i32);
    }
    let decimals = (3 - ax.log10().floor() as i32).max(0) as usize;
    let scale = 10f64.powi(decimals as i32);
    format!("{sign}{:.decimals$}", (ax * scale).floor() / scale)
}
