//! Experimental reference data, the comparison tables and figure data.
//!
//! All tables are emitted as plain CSV whose numbers carry 17 significant
//! digits, so re-reading an emitted file reproduces every value bit for bit.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::eps_from_xi;
use crate::error::{Error, Result};
use crate::hydrogenic::{
    comparison_curves, eta_equation_rhs, ground_energy_natural, level_gap_1s2s, energy_level,
    solve_eta0, CRITICAL_ETA,
};
use crate::physical::{Constants, ParticlePair};
use crate::selfconsistent::{omega_approximation, omega_curve};

const BUNDLED: &str = include_str!("../data/experimental.csv");
const HEADER: &str = "z,quantity,value_ev,source";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    GroundEnergy,
    #[serde(rename = "gap_1s_2s")]
    Gap1s2s,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GroundEnergy => "ground_energy",
            Self::Gap1s2s => "gap_1s_2s",
        }
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ground_energy" => Ok(Self::GroundEnergy),
            "gap_1s_2s" => Ok(Self::Gap1s2s),
            other => Err(format!("unknown quantity '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentalRecord {
    pub z: u32,
    pub quantity: Quantity,
    /// eV
    pub value: f64,
    pub source: String,
}

/// Parses `z,quantity,value_ev,source` lines. Blank lines and lines starting
/// with `#` are skipped, as is a header line.
pub fn parse_experimental(text: &str) -> Result<Vec<ExperimentalRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') || content == HEADER {
            continue;
        }
        let err = |message: String| Error::Dataset { line, message };
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        }
        let z: u32 = fields[0]
            .parse()
            .map_err(|_| err(format!("invalid Z '{}'", fields[0])))?;
        if z == 0 {
            return Err(err("Z must be positive".into()));
        }
        let quantity: Quantity = fields[1].parse().map_err(err)?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("invalid value '{}'", fields[2])))?;
        if !value.is_finite() {
            return Err(err("value must be finite".into()));
        }
        match quantity {
            Quantity::GroundEnergy if value >= 0.0 => {
                return Err(err(format!("ground-state energy must be negative, got {value}")))
            }
            Quantity::Gap1s2s if value <= 0.0 => {
                return Err(err(format!("1s-2s gap must be positive, got {value}")))
            }
            _ => {}
        }
        if !seen.insert((z, quantity)) {
            return Err(err(format!("duplicate record for Z = {z}, {}", quantity.as_str())));
        }
        records.push(ExperimentalRecord {
            z,
            quantity,
            value,
            source: fields[3].to_string(),
        });
    }
    Ok(records)
}

pub fn ingest_experimental(path: impl AsRef<Path>) -> Result<Vec<ExperimentalRecord>> {
    parse_experimental(&std::fs::read_to_string(path)?)
}

/// The dataset shipped with the crate.
pub fn bundled_experimental() -> Vec<ExperimentalRecord> {
    parse_experimental(BUNDLED).expect("bundled dataset is valid")
}

/// One line of a comparison table. For ground energies the differences are
/// E_S − E_EXP and E − E_EXP; for the 1s–2s gap they are Δ_EXP − Δ_S and
/// Δ_EXP − Δ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub z: u32,
    pub model: f64,
    pub schrodinger: f64,
    pub experimental: f64,
    pub schrodinger_difference: f64,
    pub model_difference: f64,
}

fn rows_for(
    records: &[ExperimentalRecord],
    quantity: Quantity,
    compute: impl Fn(u32, f64) -> Result<f64>,
    omega: f64,
) -> Result<Vec<ReportRow>> {
    let mut selected: Vec<&ExperimentalRecord> =
        records.iter().filter(|r| r.quantity == quantity).collect();
    selected.sort_by_key(|r| r.z);
    selected
        .into_iter()
        .map(|r| {
            let model = compute(r.z, omega)?;
            let schrodinger = compute(r.z, 0.0)?;
            let (ds, dm) = match quantity {
                Quantity::GroundEnergy => (schrodinger - r.value, model - r.value),
                Quantity::Gap1s2s => (r.value - schrodinger, r.value - model),
            };
            Ok(ReportRow {
                z: r.z,
                model,
                schrodinger,
                experimental: r.value,
                schrodinger_difference: ds,
                model_difference: dm,
            })
        })
        .collect()
}

/// Ground-state binding energies against experiment.
pub fn table1(
    omega: f64,
    constants: &Constants,
    records: &[ExperimentalRecord],
) -> Result<Vec<ReportRow>> {
    rows_for(
        records,
        Quantity::GroundEnergy,
        |z, w| energy_level(z, 1, 0, w, constants),
        omega,
    )
}

/// 1s–2s gaps against experiment.
pub fn table2(
    omega: f64,
    constants: &Constants,
    records: &[ExperimentalRecord],
) -> Result<Vec<ReportRow>> {
    rows_for(
        records,
        Quantity::Gap1s2s,
        |z, w| level_gap_1s2s(z, w, constants),
        omega,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) => write!(f, "{v:.16e}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Real(v) => Some(v),
            Cell::Empty => None,
        }
    }

    fn parse(s: &str) -> std::result::Result<Self, String> {
        if s.is_empty() {
            return Ok(Cell::Empty);
        }
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Cell::Int(v));
        }
        s.parse::<f64>()
            .map(Cell::Real)
            .map_err(|_| format!("invalid number '{s}'"))
    }
}

/// A rectangular table with named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl DataTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(title: &str, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Dataset {
            line: 1,
            message: "missing header".into(),
        })?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(Cell::parse)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|message| Error::Dataset {
                    line: idx + 1,
                    message,
                })?;
            if row.len() != columns.len() {
                return Err(Error::Dataset {
                    line: idx + 1,
                    message: format!("expected {} fields, found {}", columns.len(), row.len()),
                });
            }
            rows.push(row);
        }
        Ok(Self {
            title: title.to_string(),
            columns,
            rows,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

fn report_table(title: &str, names: [&str; 6], rows: &[ReportRow]) -> DataTable {
    DataTable {
        title: title.to_string(),
        columns: names.iter().map(|s| s.to_string()).collect(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(i64::from(r.z)),
                    Cell::Real(r.model),
                    Cell::Real(r.schrodinger),
                    Cell::Real(r.experimental),
                    Cell::Real(r.schrodinger_difference),
                    Cell::Real(r.model_difference),
                ]
            })
            .collect(),
    }
}

pub fn table1_data(rows: &[ReportRow]) -> DataTable {
    report_table(
        "table1",
        ["Z", "E_eV", "E_S_eV", "E_EXP_eV", "E_S-E_EXP_eV", "E-E_EXP_eV"],
        rows,
    )
}

pub fn table2_data(rows: &[ReportRow]) -> DataTable {
    report_table(
        "table2",
        ["Z", "Delta_eV", "Delta_S_eV", "Delta_EXP_eV", "Delta_EXP-Delta_S_eV", "Delta_EXP-Delta_eV"],
        rows,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fig1" | "1" => Ok(Self::Fig1),
            "fig2" | "2" => Ok(Self::Fig2),
            "fig3" | "3" => Ok(Self::Fig3),
            "fig4" | "4" => Ok(Self::Fig4),
            other => Err(format!("unknown figure '{other}' (expected fig1 … fig4)")),
        }
    }
}

pub const MIN_RESOLUTION: usize = 16;

/// Couplings whose right-hand sides 4Ω(αZ)³ are drawn as horizontal cuts in
/// figure 1.
pub const FIG1_CUTS: [f64; 4] = [0.3, 0.6, 27.0 / 32.0, 1.0];

/// Tabulated figure data.
///
/// * fig1: η against η/(1+η)⁴ with constant columns 4Ω(αZ)³ for [`FIG1_CUTS`]
/// * fig2: ground-state energy per μc² of this model, Schrödinger, Dirac and
///   Klein–Gordon on αZ ∈ (0, αZ_c]
/// * fig3: η₀ and ε₂₁ (the disturbance of the electron by an infinitely
///   heavy nucleus) on the same αZ range
/// * fig4: calibrated Ω against μ/M with the linear approximation
pub fn figure_data(
    which: Figure,
    resolution: usize,
    omega: f64,
    constants: &Constants,
) -> Result<DataTable> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::domain(format!(
            "figure resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let couplings = |i: usize| -> Result<f64> {
        let critical = crate::hydrogenic::critical_coupling(omega)?;
        Ok(critical * i as f64 / resolution as f64)
    };
    let real = |v: f64| Cell::Real(v);
    let opt = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Real);
    let table = match which {
        Figure::Fig1 => {
            let mut columns = vec!["eta".to_string(), "eta_over_1_plus_eta_pow4".to_string()];
            let cuts: Vec<f64> = FIG1_CUTS
                .iter()
                .map(|&az| {
                    columns.push(format!("cut_alphaZ_{az:.6}"));
                    eta_equation_rhs(omega, az)
                })
                .collect();
            let rows = (0..=resolution)
                .map(|i| {
                    let eta = 6.0 * CRITICAL_ETA * i as f64 / resolution as f64;
                    let mut row = vec![real(eta), real(eta / (1.0 + eta).powi(4))];
                    row.extend(cuts.iter().copied().map(real));
                    row
                })
                .collect();
            DataTable {
                title: "fig1".into(),
                columns,
                rows,
            }
        }
        Figure::Fig2 => {
            let rows = (1..=resolution)
                .map(|i| {
                    let az = couplings(i)?;
                    let c = comparison_curves(az)?;
                    Ok(vec![
                        real(az),
                        real(ground_energy_natural(az, omega)?),
                        real(c.schrodinger),
                        opt(c.dirac),
                        opt(c.klein_gordon),
                    ])
                })
                .collect::<Result<_>>()?;
            DataTable {
                title: "fig2".into(),
                columns: ["alphaZ", "E_model_per_mc2", "E_schrodinger_per_mc2", "E_dirac_per_mc2", "E_klein_gordon_per_mc2"]
                    .map(String::from)
                    .to_vec(),
                rows,
            }
        }
        Figure::Fig3 => {
            let pair = ParticlePair::infinite_partner(constants.electron_rest_energy_ev)?;
            let rows = (1..=resolution)
                .map(|i| {
                    let az = couplings(i)?;
                    let eta = solve_eta0(omega, az)?;
                    let p = eps_from_xi(omega, eta / omega, &pair)?;
                    Ok(vec![real(az), real(eta), real(p.eps21)])
                })
                .collect::<Result<_>>()?;
            DataTable {
                title: "fig3".into(),
                columns: ["alphaZ", "eta0", "eps21"].map(String::from).to_vec(),
                rows,
            }
        }
        Figure::Fig4 => {
            let rows = omega_curve(resolution)?
                .into_iter()
                .map(|c| vec![real(c.ratio), real(c.omega), real(omega_approximation(c.ratio))])
                .collect();
            DataTable {
                title: "fig4".into(),
                columns: ["mu_over_M", "omega", "omega_approx"].map(String::from).to_vec(),
                rows,
            }
        }
    };
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrogenic::OMEGA_STATIC;

    #[test]
    fn bundled_counts() {
        let r = bundled_experimental();
        assert_eq!(r.iter().filter(|r| r.quantity == Quantity::GroundEnergy).count(), 8);
        assert_eq!(r.iter().filter(|r| r.quantity == Quantity::Gap1s2s).count(), 7);
        assert_eq!(r.iter().find(|r| r.z == 92).unwrap().source, "RR4");
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert!(parse_experimental("").unwrap().is_empty());
        let dup = "z,quantity,value_ev,source\n6,ground_energy,-489.9933,RR6\n# c\n6,ground_energy,-489.9,RR6\n";
        match parse_experimental(dup) {
            Err(Error::Dataset { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_experimental("6,ground_energy,12.0,x"),
            Err(Error::Dataset { line: 1, .. })
        ));
        assert!(matches!(
            parse_experimental("\n6,gap_1s_2s,-1.0,x"),
            Err(Error::Dataset { line: 2, .. })
        ));
        assert!(parse_experimental("6,ground,1.0,x").is_err());
        assert!(parse_experimental("6,ground_energy,-1.0").is_err());
    }

    #[test]
    fn tables_follow_column_conventions() {
        let k = Constants::default();
        let data = bundled_experimental();
        let t1 = table1(OMEGA_STATIC, &k, &data).unwrap();
        assert_eq!(t1.len(), 8);
        let z30 = t1.iter().find(|r| r.z == 30).unwrap();
        assert!((z30.model + 12290.62).abs() < 5e-3);
        assert!((z30.model_difference - 98.31).abs() < 5e-3);
        let z6 = &t1[0];
        assert!((z6.schrodinger_difference - 0.1884).abs() < 5e-4);
        let t2 = table2(OMEGA_STATIC, &k, &data).unwrap();
        assert_eq!(t2.len(), 7);
        let z18 = t2.iter().find(|r| r.z == 18).unwrap();
        assert!((z18.model - 3308.819).abs() < 5e-4);
        assert!((z18.model_difference - 9.519).abs() < 5e-4);
        assert!((z18.schrodinger_difference - 12.155).abs() < 5e-4);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let k = Constants::default();
        let t = table1_data(&table1(OMEGA_STATIC, &k, &bundled_experimental()).unwrap());
        let csv = t.to_csv();
        let back = DataTable::from_csv("table1", &csv).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv(), csv);
        let f = figure_data(Figure::Fig2, 32, OMEGA_STATIC, &k).unwrap();
        let back = DataTable::from_csv("fig2", &f.to_csv()).unwrap();
        for (a, b) in f.rows.iter().flatten().zip(back.rows.iter().flatten()) {
            match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                (None, None) => {}
                _ => panic!("cell kind changed"),
            }
        }
    }

    #[test]
    fn json_mirrors_csv() {
        let k = Constants::default();
        let t = table2_data(&table2(OMEGA_STATIC, &k, &bundled_experimental()).unwrap());
        let parsed: DataTable = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(parsed.columns, t.columns);
        assert_eq!(parsed.rows.len(), 7);
    }

    #[test]
    fn figures() {
        let k = Constants::default();
        assert!(figure_data(Figure::Fig1, 8, OMEGA_STATIC, &k).is_err());
        let f1 = figure_data(Figure::Fig1, 64, OMEGA_STATIC, &k).unwrap();
        let peak = f1
            .column("eta_over_1_plus_eta_pow4")
            .unwrap()
            .iter()
            .filter_map(Cell::as_f64)
            .fold(0.0, f64::max);
        assert!(peak <= 27.0 / 256.0 + 1e-15);
        let critical_cut = f1.column("cut_alphaZ_0.843750").unwrap()[0].as_f64().unwrap();
        assert!((critical_cut - 27.0 / 256.0).abs() < 1e-15);

        let f2 = figure_data(Figure::Fig2, 200, OMEGA_STATIC, &k).unwrap();
        assert_eq!(f2.rows.len(), 200);
        let first = &f2.rows[0];
        let s = first[2].as_f64().unwrap();
        for c in &first[1..] {
            assert!((c.as_f64().unwrap() / s - 1.0).abs() < 1e-3);
        }
        assert_eq!(f2.rows[199][4], Cell::Empty);

        let f3 = figure_data(Figure::Fig3, 16, OMEGA_STATIC, &k).unwrap();
        let eps: Vec<f64> = f3.column("eps21").unwrap().iter().filter_map(Cell::as_f64).collect();
        assert!(eps.windows(2).all(|w| w[1] > w[0]));
        assert!((eps.last().unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deterministic_bytes() {
        let k = Constants::default();
        let data = bundled_experimental();
        let a = table2_data(&table2(OMEGA_STATIC, &k, &data).unwrap()).to_csv();
        let b = table2_data(&table2(OMEGA_STATIC, &k, &data).unwrap()).to_csv();
        assert_eq!(a, b);
    }
}
