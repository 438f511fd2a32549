//! Scan-level error metrics and report emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// 1 kcal/mol in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;

/// Energies of several methods along a one-dimensional scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanSeries {
    pub coordinate_name: String,
    coordinates: Vec<f64>,
    exact: Vec<f64>,
    methods: BTreeMap<String, Vec<Option<f64>>>,
}

impl ScanSeries {
    /// `coordinates` must be strictly increasing and match `exact` in length.
    pub fn new(coordinate_name: impl Into<String>, coordinates: Vec<f64>, exact: Vec<f64>) -> Result<Self> {
        if coordinates.len() != exact.len() {
            return Err(Error::domain("every scan point needs an exact energy"));
        }
        if coordinates
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::domain("scan coordinates must be strictly increasing"));
        }
        if exact.iter().any(|e| !e.is_finite()) {
            return Err(Error::domain("exact energies must be finite"));
        }
        Ok(ScanSeries {
            coordinate_name: coordinate_name.into(),
            coordinates,
            exact,
            methods: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    pub fn exact(&self) -> &[f64] {
        &self.exact
    }

    pub fn method_names(&self) -> impl Iterator<Item = &str> {
        self.methods.keys().map(String::as_str)
    }

    /// Adds or replaces a method column; `None` marks a failed point.
    pub fn insert_method(&mut self, name: impl Into<String>, energies: Vec<Option<f64>>) -> Result<()> {
        if energies.len() != self.len() {
            return Err(Error::domain("method column length differs from the scan"));
        }
        self.methods.insert(name.into(), energies);
        Ok(())
    }

    pub fn method(&self, name: &str) -> Result<&[Option<f64>]> {
        self.methods
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::domain(format!("no method '{name}' in the scan")))
    }

    /// `E_method − E_exact` at every point; fails on missing points.
    pub fn errors(&self, name: &str) -> Result<Vec<f64>> {
        self.method(name)?
            .iter()
            .zip(&self.exact)
            .enumerate()
            .map(|(k, (m, e))| {
                m.map(|m| m - e)
                    .ok_or_else(|| Error::domain(format!("method '{name}' has no energy at point {k}")))
            })
            .collect()
    }

    fn complete(&self, name: &str) -> Result<Vec<f64>> {
        Ok(self.errors(name)?.iter().zip(&self.exact).map(|(d, e)| d + e).collect())
    }

    /// Index of the lowest exact energy, first on ties.
    pub fn minimum_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, e) in self.exact.iter().enumerate() {
            if best.is_none_or(|b| *e < self.exact[b] - 1e-9) {
                best = Some(k);
            }
        }
        best
    }
}

fn span(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// Non-parallelity error: spread of the error curve.
pub fn npe(series: &ScanSeries, method: &str) -> Result<f64> {
    let errors = series.errors(method)?;
    if errors.len() < 2 {
        return Err(Error::domain("non-parallelity error needs at least two points"));
    }
    Ok(span(&errors))
}

/// Shifts a method curve to meet the exact curve at `anchor`.
///
/// Returns the shifted energies and the applied shift `E_exact − E_method`
/// at the anchor.
pub fn shift_align(series: &ScanSeries, method: &str, anchor: usize) -> Result<(Vec<Option<f64>>, f64)> {
    if anchor >= series.len() {
        return Err(Error::domain(format!(
            "anchor {anchor} outside a scan of {} points",
            series.len()
        )));
    }
    let column = series.method(method)?;
    let at = column[anchor].ok_or_else(|| Error::domain(format!("method '{method}' has no energy at the anchor")))?;
    let shift = series.exact[anchor] - at;
    Ok((column.iter().map(|e| e.map(|e| e + shift)).collect(), shift))
}

/// Relative error of the max−min energy span, in percent.
pub fn barrier_error(series: &ScanSeries, method: &str) -> Result<f64> {
    let reference = span(&series.exact);
    if reference.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::domain("exact barrier is zero"));
    }
    let energies = series.complete(method)?;
    Ok((span(&energies) - reference).abs() / reference * 100.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanError {
    pub mean: f64,
    /// `σ/√N`; zero for a single point.
    pub standard_error: f64,
    pub single_point: bool,
}

/// Mean absolute error with its standard error.
pub fn mean_error(series: &ScanSeries, method: &str) -> Result<MeanError> {
    let errors: Vec<f64> = series.errors(method)?.iter().map(|e| e.abs()).collect();
    let n = errors.len();
    if n == 0 {
        return Err(Error::domain("mean error of an empty scan"));
    }
    let mean = errors.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(MeanError {
            mean,
            standard_error: 0.0,
            single_point: true,
        });
    }
    let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(MeanError {
        mean,
        standard_error: var.sqrt() / (n as f64).sqrt(),
        single_point: false,
    })
}

/// Share of the base method's error removed by orbital optimization, in percent.
pub fn oo_improvement(e_base: f64, e_oo: f64, e_exact: f64) -> Result<f64> {
    let denom = e_base - e_exact;
    if denom.abs() < 1e-12 {
        return Err(Error::domain("base method is already exact; improvement undefined"));
    }
    Ok(100.0 * (e_base - e_oo) / denom)
}

/// One method's row of the scan summary (energies in mHa).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodMetrics {
    pub method: String,
    pub points_completed: usize,
    pub energy_shift_mha: Option<f64>,
    pub mean_error_mha: Option<f64>,
    pub standard_error_mha: Option<f64>,
    pub single_point: bool,
    pub npe_mha: Option<f64>,
    pub barrier_error_percent: Option<f64>,
    pub oo_improvement_percent: Option<f64>,
    pub max_error_below_chemical_accuracy: Option<bool>,
}

/// Evaluates every metric that the available data supports.
///
/// `oo_base` maps an orbital-optimized method to its fixed-orbital partner.
pub fn method_metrics(
    series: &ScanSeries,
    method: &str,
    anchor: usize,
    oo_base: Option<&str>,
) -> Result<MethodMetrics> {
    let column = series.method(method)?;
    let mha = |v: f64| v * 1e3;
    let mean = mean_error(series, method).ok();
    let errors = series.errors(method).ok();
    let oo = oo_base.and_then(|base| {
        let b = series.method(base).ok()?[anchor]?;
        let o = column[anchor]?;
        oo_improvement(b, o, series.exact[anchor]).ok()
    });
    Ok(MethodMetrics {
        method: method.to_string(),
        points_completed: column.iter().filter(|e| e.is_some()).count(),
        energy_shift_mha: shift_align(series, method, anchor).ok().map(|(_, s)| mha(s)),
        mean_error_mha: mean.map(|m| mha(m.mean)),
        standard_error_mha: mean.map(|m| mha(m.standard_error)),
        single_point: mean.map_or(series.len() == 1, |m| m.single_point),
        npe_mha: npe(series, method).ok().map(mha),
        barrier_error_percent: barrier_error(series, method).ok(),
        oo_improvement_percent: oo,
        max_error_below_chemical_accuracy: errors.map(|e| e.iter().all(|d| d.abs() < CHEMICAL_ACCURACY)),
    })
}

/// CSV: coordinate, exact, then raw and shifted energy per method.
pub fn scan_csv(series: &ScanSeries, anchor: usize) -> String {
    let names: Vec<&str> = series.method_names().collect();
    let mut s = format!("{},exact", series.coordinate_name);
    for n in &names {
        let _ = write!(s, ",{n},{n}_shifted");
    }
    s.push('\n');
    let shifted: Vec<Option<Vec<Option<f64>>>> = names
        .iter()
        .map(|n| shift_align(series, n, anchor).ok().map(|(v, _)| v))
        .collect();
    let cell = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.10}"));
    for k in 0..series.len() {
        let _ = write!(s, "{},{:.10}", series.coordinates[k], series.exact[k]);
        for (n, sh) in names.iter().zip(&shifted) {
            let raw = series.methods[*n][k];
            let _ = write!(s, ",{},{}", cell(raw), cell(sh.as_ref().and_then(|v| v[k])));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(errors_mha: &[f64]) -> ScanSeries {
        let n = errors_mha.len();
        let exact: Vec<f64> = (0..n).map(|k| -1.0 - 0.01 * (k as f64 - 1.0).powi(2)).collect();
        let mut s = ScanSeries::new("x", (0..n).map(|k| k as f64).collect(), exact.clone()).unwrap();
        s.insert_method(
            "m",
            exact.iter().zip(errors_mha).map(|(e, d)| Some(e + d * 1e-3)).collect(),
        )
        .unwrap();
        s
    }

    #[test]
    fn npe_definition() {
        assert!((npe(&series(&[1.0, 3.0, 2.0]), "m").unwrap() - 2e-3).abs() < 1e-15);
        assert!(npe(&series(&[4.0, 4.0, 4.0]), "m").unwrap() < 1e-15);
        assert!(npe(&series(&[4.0]), "m").is_err());
    }

    #[test]
    fn shift_and_mean() {
        let s = series(&[5.0, 6.0, 7.0]);
        let (shifted, shift) = shift_align(&s, "m", 0).unwrap();
        assert!((shift + 5e-3).abs() < 1e-14);
        assert!((shifted[0].unwrap() - s.exact()[0]).abs() < 1e-14);
        assert!(shift_align(&s, "m", 3).is_err());
        let m = mean_error(&series(&[1.0, 1.0, 1.0]), "m").unwrap();
        assert!((m.mean - 1e-3).abs() < 1e-14 && m.standard_error < 1e-14);
        let one = mean_error(&series(&[2.0]), "m").unwrap();
        assert!(one.single_point && one.standard_error == 0.0);
    }

    #[test]
    fn barrier_and_improvement() {
        let mut s = series(&[0.0, 0.0, 0.0]);
        assert!(barrier_error(&s, "m").unwrap() < 1e-10);
        let doubled: Vec<Option<f64>> = s.exact().iter().map(|e| Some(-1.0 + 2.0 * (e + 1.0))).collect();
        s.insert_method("d", doubled).unwrap();
        assert!((barrier_error(&s, "d").unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(oo_improvement(-1.0, -1.5, -1.5).unwrap(), 100.0);
        assert_eq!(oo_improvement(-1.0, -1.0, -1.5).unwrap(), 0.0);
        assert!(oo_improvement(-1.5, -1.5, -1.5).is_err());
    }

    #[test]
    fn missing_points_and_ordering() {
        assert!(ScanSeries::new("x", vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        let mut s = series(&[1.0, 2.0]);
        s.insert_method("gap", vec![Some(-1.0), None]).unwrap();
        assert!(npe(&s, "gap").is_err());
        let row = method_metrics(&s, "gap", 0, None).unwrap();
        assert_eq!(row.points_completed, 1);
        assert!(row.npe_mha.is_none() && row.energy_shift_mha.is_some());
        let csv = scan_csv(&s, 0);
        assert!(csv.starts_with("x,exact,gap,gap_shifted,m,m_shifted\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
