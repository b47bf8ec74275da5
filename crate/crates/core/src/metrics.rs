//! Episode metrics, strategy similarity and instability statistics, all
//! computed from trajectory records alone.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::engine::DayRecord;
use crate::error::{Error, Result};
use crate::strategy::{canonical_entry, StrategyRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub days: u32,
    pub avg_daily_sales: f64,
    pub avg_daily_income: f64,
    pub expiry_ratio: f64,
    pub return_ratio: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_episode_metrics(days: &[DayRecord]) -> Result<EpisodeMetrics> {
    if days.is_empty() {
        return Err(Error::Argument("trajectory has no completed days".into()));
    }
    let n = days.len() as u64;
    let sold: u64 = days.iter().map(|d| d.day_report.units_sold).sum();
    let returned: u64 = days.iter().map(|d| d.day_report.units_returned).sum();
    let expired: u64 = days.iter().map(|d| d.day_report.units_expired).sum();
    let delivered: u64 = days.iter().map(|d| d.day_report.units_delivered).sum();
    let income_cents: i64 = days
        .iter()
        .map(|d| (d.day_report.revenue - d.day_report.refunds).cents())
        .sum();
    Ok(EpisodeMetrics {
        days: n as u32,
        avg_daily_sales: sold as f64 / n as f64,
        avg_daily_income: income_cents as f64 / 100.0 / n as f64,
        expiry_ratio: ratio(expired, delivered),
        return_ratio: ratio(returned, sold),
    })
}

/// `|A ∩ B| / |A ∪ B|`, with two empty sets counted as identical.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

fn key_fields(r: &StrategyRecord) -> [BTreeSet<String>; 4] {
    let e = &r.execute_strategy;
    [
        e.focus_skus.iter().map(canonical_entry).collect(),
        e.sku_supplier_mapping
            .iter()
            .map(|m| format!("{}|{}", m.sku_id, m.supplier_id))
            .collect(),
        e.news_to_monitor.iter().map(canonical_entry).collect(),
        e.sku_to_monitor.iter().map(canonical_entry).collect(),
    ]
}

/// Mean Jaccard similarity over focus SKUs, supplier mapping, monitored news
/// and monitored SKUs.
pub fn execution_similarity(a: &StrategyRecord, b: &StrategyRecord) -> f64 {
    let (fa, fb) = (key_fields(a), key_fields(b));
    fa.iter().zip(&fb).map(|(x, y)| jaccard(x, y)).sum::<f64>() / 4.0
}

/// Scores the similarity of two macro strategies in `[0, 1]`.
pub trait MacroJudge {
    fn score(&self, a: &[String], b: &[String]) -> f64;
}

/// Symmetrised mean best-match token-set Jaccard between statements.
#[derive(Clone, Copy, Debug, Default)]
pub struct TokenJudge;

fn tokens(s: &str) -> BTreeSet<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn best_match_mean(a: &[BTreeSet<String>], b: &[BTreeSet<String>]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| jaccard(x, y)).fold(0.0, f64::max))
        .sum::<f64>()
        / a.len() as f64
}

impl MacroJudge for TokenJudge {
    fn score(&self, a: &[String], b: &[String]) -> f64 {
        match (a.is_empty(), b.is_empty()) {
            (true, true) => return 1.0,
            (true, false) | (false, true) => return 0.0,
            _ => {}
        }
        let ta: Vec<_> = a.iter().map(|s| tokens(s)).collect();
        let tb: Vec<_> = b.iter().map(|s| tokens(s)).collect();
        0.5 * (best_match_mean(&ta, &tb) + best_match_mean(&tb, &ta))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JudgeScore {
    pub score: f64,
    pub clamped: bool,
}

/// Delegates to `judge` and clamps its answer into `[0, 1]`.
pub fn macro_similarity(a: &[String], b: &[String], judge: &dyn MacroJudge) -> JudgeScore {
    let raw = judge.score(a, b);
    let score = if raw.is_nan() { 0.0 } else { raw.clamp(0.0, 1.0) };
    let clamped = score != raw;
    if clamped {
        log::warn!("macro judge returned {raw}; clamped to {score}");
    }
    JudgeScore { score, clamped }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityStats {
    pub std_diff: f64,
    pub mac: f64,
    pub tv: f64,
}

/// Population standard deviation, mean absolute value and sum of absolute
/// values of the first differences.
pub fn instability(series: &[f64]) -> Result<StabilityStats> {
    if series.len() < 2 {
        return Err(Error::Argument("instability needs at least two values".into()));
    }
    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let m = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / m;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / m;
    let tv: f64 = diffs.iter().map(|d| d.abs()).sum();
    Ok(StabilityStats {
        std_diff: var.sqrt(),
        mac: tv / m,
        tv,
    })
}

/// Similarity of each day's strategy to the previous day's.
pub fn execution_series(days: &[DayRecord]) -> Vec<f64> {
    days.windows(2)
        .map(|w| execution_similarity(&w[0].strategy, &w[1].strategy))
        .collect()
}

pub fn macro_series(days: &[DayRecord], judge: &dyn MacroJudge) -> Vec<f64> {
    days.windows(2)
        .map(|w| macro_similarity(&w[0].strategy.macro_strategy, &w[1].strategy.macro_strategy, judge).score)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub metrics: EpisodeMetrics,
    pub macro_series: Vec<f64>,
    pub execution_series: Vec<f64>,
    pub macro_stats: Option<StabilityStats>,
    pub execution_stats: Option<StabilityStats>,
}

pub fn episode_report(days: &[DayRecord], judge: &dyn MacroJudge) -> Result<EpisodeReport> {
    let metrics = compute_episode_metrics(days)?;
    let ms = macro_series(days, judge);
    let es = execution_series(days);
    Ok(EpisodeReport {
        metrics,
        macro_stats: instability(&ms).ok(),
        execution_stats: instability(&es).ok(),
        macro_series: ms,
        execution_series: es,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub episodes: usize,
    pub days_mean: f64,
    pub max_days: u32,
    pub avg_daily_sales: f64,
    pub avg_daily_income: f64,
    pub expiry_ratio: f64,
    pub return_ratio: f64,
}

pub fn aggregate_rollouts(episodes: &[EpisodeMetrics]) -> Result<AggregateMetrics> {
    if episodes.is_empty() {
        return Err(Error::Argument("no rollouts to aggregate".into()));
    }
    let k = episodes.len() as f64;
    let mean = |f: fn(&EpisodeMetrics) -> f64| episodes.iter().map(f).sum::<f64>() / k;
    Ok(AggregateMetrics {
        episodes: episodes.len(),
        days_mean: mean(|e| f64::from(e.days)),
        max_days: episodes.iter().map(|e| e.days).max().expect("non-empty"),
        avg_daily_sales: mean(|e| e.avg_daily_sales),
        avg_daily_income: mean(|e| e.avg_daily_income),
        expiry_ratio: mean(|e| e.expiry_ratio),
        return_ratio: mean(|e| e.return_ratio),
    })
}

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "Episode",
    "Days",
    "MaxDays",
    "Avg Daily Sales",
    "Avg Daily Income",
    "Expiry Ratio",
    "Return Ratio",
    "Macro Std_diff",
    "Macro MAC",
    "Macro TV",
    "Exec Std_diff",
    "Exec MAC",
    "Exec TV",
    "Episodes",
];

fn stats_cells(s: Option<StabilityStats>) -> [String; 3] {
    match s {
        Some(s) => [
            format!("{:.6}", s.std_diff),
            format!("{:.6}", s.mac),
            format!("{:.6}", s.tv),
        ],
        None => [String::new(), String::new(), String::new()],
    }
}

fn mean_stats(all: &[Option<StabilityStats>]) -> Option<StabilityStats> {
    let present: Vec<StabilityStats> = all.iter().flatten().copied().collect();
    if present.is_empty() {
        return None;
    }
    let k = present.len() as f64;
    Some(StabilityStats {
        std_diff: present.iter().map(|s| s.std_diff).sum::<f64>() / k,
        mac: present.iter().map(|s| s.mac).sum::<f64>() / k,
        tv: present.iter().map(|s| s.tv).sum::<f64>() / k,
    })
}

/// One row per episode plus a final `aggregate` row.
pub fn write_summary_csv(out: impl Write, rows: &[(String, EpisodeReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for (label, r) in rows {
        let m = &r.metrics;
        let mut rec = vec![
            label.clone(),
            m.days.to_string(),
            m.days.to_string(),
            format!("{:.4}", m.avg_daily_sales),
            format!("{:.2}", m.avg_daily_income),
            format!("{:.6}", m.expiry_ratio),
            format!("{:.6}", m.return_ratio),
        ];
        rec.extend(stats_cells(r.macro_stats));
        rec.extend(stats_cells(r.execution_stats));
        rec.push("1".into());
        w.write_record(&rec)?;
    }
    if !rows.is_empty() {
        let metrics: Vec<EpisodeMetrics> = rows.iter().map(|(_, r)| r.metrics.clone()).collect();
        let a = aggregate_rollouts(&metrics)?;
        let mut rec = vec![
            "aggregate".to_string(),
            format!("{:.4}", a.days_mean),
            a.max_days.to_string(),
            format!("{:.4}", a.avg_daily_sales),
            format!("{:.2}", a.avg_daily_income),
            format!("{:.6}", a.expiry_ratio),
            format!("{:.6}", a.return_ratio),
        ];
        let macro_all: Vec<_> = rows.iter().map(|(_, r)| r.macro_stats).collect();
        let exec_all: Vec<_> = rows.iter().map(|(_, r)| r.execution_stats).collect();
        rec.extend(stats_cells(mean_stats(&macro_all)));
        rec.extend(stats_cells(mean_stats(&exec_all)));
        rec.push(a.episodes.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
