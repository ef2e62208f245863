//! Evaluation statistics: Pearson and Spearman correlation for rating
//! tasks, accuracy breakdowns for question answering.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewards::AnswerMatcher;
use crate::taxonomy::Domain;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("series lengths differ: {0} predictions vs {1} ground truths")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 paired values, got {0}")]
    TooShort(usize),
    #[error("{0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("no records to evaluate")]
    EmptyInput,
}

/// Paired predictions and ground truths.
#[derive(Debug, Clone, PartialEq)]
pub struct VrSeries {
    predictions: Vec<f64>,
    ground_truths: Vec<f64>,
}

impl VrSeries {
    pub fn new(predictions: Vec<f64>, ground_truths: Vec<f64>) -> Result<Self, MetricsError> {
        if predictions.len() != ground_truths.len() {
            return Err(MetricsError::LengthMismatch(
                predictions.len(),
                ground_truths.len(),
            ));
        }
        if predictions.len() < 2 {
            return Err(MetricsError::TooShort(predictions.len()));
        }
        let bad = predictions
            .iter()
            .zip(&ground_truths)
            .position(|(p, g)| !p.is_finite() || !g.is_finite());
        if let Some(i) = bad {
            return Err(MetricsError::NonFinite(i));
        }
        Ok(VrSeries {
            predictions,
            ground_truths,
        })
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }

    pub fn ground_truths(&self) -> &[f64] {
        &self.ground_truths
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetricsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(MetricsError::ZeroVariance("predictions"));
    }
    if syy == 0.0 {
        return Err(MetricsError::ZeroVariance("ground truths"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson linear correlation.
pub fn plcc(series: &VrSeries) -> Result<f64, MetricsError> {
    pearson(&series.predictions, &series.ground_truths)
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn srcc(series: &VrSeries) -> Result<f64, MetricsError> {
    pearson(
        &average_ranks(&series.predictions),
        &average_ranks(&series.ground_truths),
    )
}

/// `(SRCC + PLCC) / 2`.
pub fn combined_vr(srcc_value: f64, plcc_value: f64) -> f64 {
    (srcc_value + plcc_value) / 2.0
}

/// Unweighted mean of per-dataset `(srcc, plcc)` pairs.
pub fn dataset_average(per_dataset: &[(f64, f64)]) -> Result<(f64, f64), MetricsError> {
    if per_dataset.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = per_dataset.len() as f64;
    let s = per_dataset.iter().map(|p| p.0).sum::<f64>() / n;
    let p = per_dataset.iter().map(|p| p.1).sum::<f64>() / n;
    Ok((s, p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub domain: Domain,
    pub category: String,
    /// One of Lv.Pred / How / What / Which / Why / Yes-No, or free-form.
    pub template: String,
    pub predicted: String,
    pub gold: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    /// Accuracy in percent, at full precision.
    pub fn percent(&self) -> f64 {
        100.0 * self.correct as f64 / self.total as f64
    }

    fn add(&mut self, correct: bool) {
        self.total += 1;
        self.correct += usize::from(correct);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub per_domain: BTreeMap<String, Tally>,
    pub per_category: BTreeMap<String, Tally>,
    pub per_template: BTreeMap<String, Tally>,
    pub overall: Tally,
}

pub fn accuracy_breakdown(
    records: &[EvalRecord],
    matcher: &dyn AnswerMatcher,
) -> Result<AccuracyReport, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut report = AccuracyReport::default();
    for r in records {
        let ok = matcher.is_correct(&r.predicted, &r.gold);
        report.overall.add(ok);
        report
            .per_domain
            .entry(r.domain.to_string())
            .or_default()
            .add(ok);
        report
            .per_category
            .entry(r.category.clone())
            .or_default()
            .add(ok);
        report
            .per_template
            .entry(r.template.clone())
            .or_default()
            .add(ok);
    }
    Ok(report)
}

/// Two-decimal percentage, e.g. `75.00%`. Exact binary ties round to even.
pub fn format_percent(value: f64) -> String {
    format!("{value:.2}%")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewards::CanonicalMatcher;

    fn series(x: &[f64], y: &[f64]) -> VrSeries {
        VrSeries::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn plcc_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((plcc(&series(&x, &y)).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((plcc(&series(&x, &neg)).unwrap() + 1.0).abs() < 1e-15);
        let r = plcc(&series(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0])).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }

    #[test]
    fn srcc_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(srcc(&series(&x, &[10.0, 20.0, 25.0, 100.0])).unwrap(), 1.0);
        assert_eq!(srcc(&series(&x, &[4.0, 3.0, 2.0, 1.0])).unwrap(), -1.0);
    }

    #[test]
    fn average_ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 20.0, 5.0]), vec![2.0, 3.5, 3.5, 1.0]);
        assert_eq!(average_ranks(&[7.0, 7.0, 7.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn constant_predictor_is_an_error() {
        let s = series(&[50.0, 50.0, 50.0], &[1.0, 2.0, 3.0]);
        assert_eq!(plcc(&s), Err(MetricsError::ZeroVariance("predictions")));
        assert_eq!(srcc(&s), Err(MetricsError::ZeroVariance("predictions")));
    }

    #[test]
    fn series_validation() {
        assert!(matches!(
            VrSeries::new(vec![1.0], vec![1.0]),
            Err(MetricsError::TooShort(1))
        ));
        assert!(matches!(
            VrSeries::new(vec![1.0, 2.0], vec![1.0]),
            Err(MetricsError::LengthMismatch(2, 1))
        ));
        assert!(matches!(
            VrSeries::new(vec![1.0, f64::NAN], vec![1.0, 2.0]),
            Err(MetricsError::NonFinite(1))
        ));
    }

    #[test]
    fn combined_and_average() {
        assert_eq!(combined_vr(1.0, 1.0), 1.0);
        assert!((combined_vr(0.6, 0.8) - 0.7).abs() < 1e-15);
        assert!((combined_vr(-0.2, 0.4) - 0.1).abs() < 1e-15);
        assert_eq!(dataset_average(&[(1.0, 1.0), (0.0, 0.0)]).unwrap(), (0.5, 0.5));
        assert_eq!(dataset_average(&[(0.3, 0.4)]).unwrap(), (0.3, 0.4));
        let (s, p) =
            dataset_average(&[(0.9, 0.8), (0.7, 0.6), (0.5, 0.4), (0.3, 0.2)]).unwrap();
        assert!((s - 0.6).abs() < 1e-15 && (p - 0.5).abs() < 1e-15);
    }

    fn rec(id: &str, category: &str, template: &str, predicted: &str, gold: &str) -> EvalRecord {
        EvalRecord {
            id: id.into(),
            domain: Domain::Iqa,
            category: category.into(),
            template: template.into(),
            predicted: predicted.into(),
            gold: gold.into(),
        }
    }

    #[test]
    fn accuracy_examples() {
        let records = vec![
            rec("1", "Loc.", "What", "A", "A"),
            rec("2", "Loc.", "What", "b", "B"),
            rec("3", "Sev.", "How", "C", "C"),
            rec("4", "Sev.", "How", "A", "C"),
        ];
        let r = accuracy_breakdown(&records, &CanonicalMatcher).unwrap();
        assert_eq!(format_percent(r.overall.percent()), "75.00%");

        let records = vec![
            rec("1", "Loc.", "What", "A", "A"),
            rec("2", "Loc.", "What", "B", "B"),
            rec("3", "Sev.", "How", "A", "C"),
            rec("4", "Sev.", "How", "B", "C"),
        ];
        let r = accuracy_breakdown(&records, &CanonicalMatcher).unwrap();
        assert_eq!(format_percent(r.per_category["Loc."].percent()), "100.00%");
        assert_eq!(format_percent(r.per_category["Sev."].percent()), "0.00%");
        assert_eq!(format_percent(r.overall.percent()), "50.00%");
        assert_eq!(
            accuracy_breakdown(&[], &CanonicalMatcher),
            Err(MetricsError::EmptyInput)
        );
    }

    #[test]
    fn percent_rounds_half_to_even() {
        assert_eq!(format_percent(0.125), "0.12%");
        assert_eq!(format_percent(0.375), "0.38%");
        assert_eq!(format_percent(200.0 / 3.0), "66.67%");
    }
}
