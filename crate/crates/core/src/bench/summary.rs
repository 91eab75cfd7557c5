use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::records::ResultRecord;
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::numeric::pairwise_mean;

/// Aggregate of the runs of one (scenario, d, method) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    /// Scenario name, suffixed with `:alpha=<a>` for AR(1) records.
    pub scenario: String,
    pub d: usize,
    pub method: String,
    pub mean_error: f64,
    pub p10: f64,
    pub p90: f64,
    pub mean_time_ns: f64,
    /// Log-log slope of `mean_error` over this and all smaller `d` of the same
    /// scenario and method; blank with fewer than two usable points.
    pub slope_to_date: Option<f64>,
}

pub const SUMMARY_HEADER: &str = "scenario,d,method,mean_error,p10,p90,mean_time_ns,slope_to_date";

/// Percentile `q ∈ [0, 1]` of sorted values, interpolating linearly at
/// position `(N − 1) q`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty slice");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn scenario_label(r: &ResultRecord) -> String {
    match r.alpha {
        Some(a) => format!("{}:alpha={a}", r.scenario),
        None => r.scenario.clone(),
    }
}

/// Rows sorted by scenario label, then method, then `d`.
pub fn summarize(records: &[ResultRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    // (scenario label, method, d) -> (errors, wall times)
    type Groups = BTreeMap<(String, String, usize), (Vec<f64>, Vec<f64>)>;
    let mut groups = Groups::new();
    for r in records {
        let g = groups
            .entry((scenario_label(r), r.method.clone(), r.d))
            .or_default();
        g.0.push(r.abs_error);
        g.1.push(r.wall_time_ns as f64);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((scenario, method, d), (mut errors, mut times)) in groups {
        // Sorting first makes every statistic independent of record order.
        errors.sort_by(f64::total_cmp);
        times.sort_by(f64::total_cmp);
        rows.push(SummaryRow {
            scenario,
            d,
            method,
            mean_error: pairwise_mean(&errors).expect("nonempty group"),
            p10: percentile(&errors, 0.1),
            p90: percentile(&errors, 0.9),
            mean_time_ns: pairwise_mean(&times).expect("nonempty group"),
            slope_to_date: None,
        });
    }
    let mut start = 0;
    while start < rows.len() {
        let mut end = start + 1;
        while end < rows.len()
            && rows[end].scenario == rows[start].scenario
            && rows[end].method == rows[start].method
        {
            end += 1;
        }
        for i in start + 1..end {
            let ds: Vec<f64> = rows[start..=i].iter().map(|r| r.d as f64).collect();
            let es: Vec<f64> = rows[start..=i].iter().map(|r| r.mean_error).collect();
            rows[i].slope_to_date = fit_loglog_slope(&ds, &es).ok().map(|f| f.slope);
        }
        start = end;
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `log10 error` on `log10 d`.
pub fn fit_loglog_slope(d_values: &[f64], errors: &[f64]) -> Result<LogLogFit> {
    if d_values.len() != errors.len() {
        return Err(Error::LengthMismatch {
            left: d_values.len(),
            right: errors.len(),
        });
    }
    if d_values.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: d_values.len(),
        });
    }
    for (index, &value) in d_values.iter().chain(errors).enumerate() {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::NonPositiveError {
                index: index % d_values.len(),
                value,
            });
        }
    }
    let x: Vec<f64> = d_values.iter().map(|v| v.log10()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.log10()).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig(
            "cannot fit a slope: all d values are equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

pub fn format_summary(out: &mut dyn Write, rows: &[SummaryRow]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(SUMMARY_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_atomic(path, |out| format_summary(out, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(d: usize, err: f64, alpha: Option<f64>) -> ResultRecord {
        ResultRecord {
            scenario: "s".into(),
            run_id: 0,
            d,
            n: 1,
            alpha,
            method: "m".into(),
            estimate_sq: 0.0,
            reference_sq: 0.0,
            abs_error: err,
            wall_time_ns: 10,
            seed: 0,
        }
    }

    /// Hand-rolled rank interpolation, written independently of `percentile`.
    fn oracle_percentile(values: &[f64], q: f64) -> f64 {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = q * (v.len() as f64 - 1.0);
        let below = pos as usize;
        if below + 1 >= v.len() {
            return v[v.len() - 1];
        }
        let w = pos - below as f64;
        (1.0 - w) * v[below] + w * v[below + 1]
    }

    #[test]
    fn empty_input() {
        assert!(matches!(summarize(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn single_run_percentiles_equal_mean() {
        let rows = summarize(&[rec(10, 0.3, None)]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            (rows[0].p10, rows[0].p90, rows[0].mean_error),
            (0.3, 0.3, 0.3)
        );
        assert_eq!(rows[0].slope_to_date, None);
    }

    #[test]
    fn percentiles_of_one_to_hundred() {
        let recs: Vec<_> = (1..=100).map(|i| rec(10, i as f64, None)).collect();
        let row = &summarize(&recs).unwrap()[0];
        assert!((row.p10 - 10.9).abs() < 1e-12);
        assert!((row.p90 - 90.1).abs() < 1e-12);
        assert!((row.mean_error - 50.5).abs() < 1e-12);
    }

    #[test]
    fn groups_split_by_alpha_and_carry_slopes() {
        let mut recs = Vec::new();
        for d in [10usize, 100, 1000] {
            recs.push(rec(d, (d as f64).powf(-0.5), Some(0.2)));
            recs.push(rec(d, 1.0, Some(0.8)));
        }
        let rows = summarize(&recs).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].scenario, "s:alpha=0.2");
        assert_eq!(rows[0].slope_to_date, None);
        assert!((rows[2].slope_to_date.unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(rows[3].scenario, "s:alpha=0.8");
        assert_eq!(rows[5].slope_to_date, Some(0.0));
    }

    #[test]
    fn summary_csv_layout() {
        let mut buf = Vec::new();
        format_summary(&mut buf, &summarize(&[rec(10, 0.5, None)]).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            format!("{SUMMARY_HEADER}\ns,10,m,0.5,0.5,0.5,10.0,\n")
        );
    }

    #[test]
    fn exact_power_law() {
        let ds = [10.0, 32.0, 100.0, 316.0, 1000.0];
        let es: Vec<f64> = ds.iter().map(|d: &f64| 3.0 * d.powf(-0.5)).collect();
        let f = fit_loglog_slope(&ds, &es).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.log10()).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let flat = fit_loglog_slope(&ds, &[2.0; 5]).unwrap();
        assert_eq!(flat.slope, 0.0);
    }

    #[test]
    fn noisy_power_law() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let ds: Vec<f64> = (0..9).map(|k| 10f64.powf(1.0 + k as f64 * 0.25)).collect();
        let es: Vec<f64> = ds
            .iter()
            .map(|d| 0.8 * d.powf(-0.7) * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            .collect();
        let f = fit_loglog_slope(&ds, &es).unwrap();
        assert!((f.slope + 0.7).abs() < 0.05);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_loglog_slope(&[1.0, 2.0], &[1.0, 0.0]),
            Err(Error::NonPositiveError { index: 1, .. })
        ));
        assert!(matches!(
            fit_loglog_slope(&[1.0], &[1.0]),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(
            fit_loglog_slope(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(fit_loglog_slope(&[3.0, 3.0], &[1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn percentile_matches_oracle(values in prop::collection::vec(-1e3..1e3f64, 1..40), q in 0.0..=1.0f64) {
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let a = percentile(&sorted, q);
            let b = oracle_percentile(&values, q);
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }

        #[test]
        fn summary_is_order_invariant(
            errs in prop::collection::vec((0usize..3, 0.0..10.0f64), 1..30),
            rot in 0usize..30,
        ) {
            let ds = [10, 20, 40];
            let recs: Vec<_> = errs.iter().map(|&(k, e)| rec(ds[k], e, None)).collect();
            let mut shuffled = recs.clone();
            shuffled.reverse();
            let r = rot % shuffled.len();
            shuffled.rotate_left(r);
            prop_assert_eq!(summarize(&recs).unwrap(), summarize(&shuffled).unwrap());
        }
    }
}
