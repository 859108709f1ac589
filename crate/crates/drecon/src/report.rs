//! Per-instance correction reports and their size-bucketed summary.

use std::fmt::Write as _;
use std::str::FromStr;

use drecon_core::mindrgt::CorrectionReport;
use drecon_core::CostSpec;

use crate::error::CliError;

pub const REPORT_HEADER: &str =
    "instance\tn\tcost\tbaseline\toutput\treduction\tmodified\tmoves\tsum_delta\tdups\tlosses\tms";

/// One row of a correction report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub n: usize,
    pub cost: CostSpec,
    pub baseline: usize,
    pub output: usize,
    pub reduction: usize,
    pub modified: bool,
    pub moves: usize,
    pub sum_delta: usize,
    /// Duplications and losses of `g(P)` before correction.
    pub dups: usize,
    pub losses: usize,
    pub ms: Option<f64>,
}

impl ReportRow {
    pub fn new(instance: impl Into<String>, cost: CostSpec, r: &CorrectionReport, timing: bool) -> Self {
        Self {
            instance: instance.into(),
            n: r.leaves,
            cost,
            baseline: r.baseline,
            output: r.output_cost,
            reduction: r.reduction(),
            modified: r.modified,
            moves: r.applied.len(),
            sum_delta: r.total_delta(),
            dups: r.baseline_duplications,
            losses: r.baseline_losses,
            ms: if timing { r.elapsed_ms } else { None },
        }
    }

    pub fn to_tsv(&self) -> String {
        let ms = self.ms.map_or_else(|| "NA".to_string(), |ms| format!("{ms:.3}"));
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.instance,
            self.n,
            self.cost,
            self.baseline,
            self.output,
            self.reduction,
            self.modified,
            self.moves,
            self.sum_delta,
            self.dups,
            self.losses,
            ms
        )
    }
}

impl FromStr for ReportRow {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, String> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 12 {
            return Err(format!("expected 12 columns, found {}", cols.len()));
        }
        let num = |i: usize| cols[i].parse::<usize>().map_err(|e| format!("column {}: {e}", i + 1));
        Ok(Self {
            instance: cols[0].to_string(),
            n: num(1)?,
            cost: cols[2].parse().map_err(|e| format!("column 3: {e}"))?,
            baseline: num(3)?,
            output: num(4)?,
            reduction: num(5)?,
            modified: cols[6].parse().map_err(|e| format!("column 7: {e}"))?,
            moves: num(7)?,
            sum_delta: num(8)?,
            dups: num(9)?,
            losses: num(10)?,
            ms: match cols[11] {
                "NA" => None,
                s => Some(s.parse().map_err(|e| format!("column 12: {e}"))?),
            },
        })
    }
}

pub fn format_report(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_tsv());
        out.push('\n');
    }
    out
}

/// Rows of a report file; lines other than the header must parse.
pub fn parse_report(text: &str, path: &std::path::Path) -> Result<Vec<ReportRow>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && *l != REPORT_HEADER)
        .map(|(i, l)| l.parse().map_err(|msg| CliError::Format { path: path.into(), line: i + 1, msg }))
        .collect()
}

/// Inclusive leaf-count range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bucket {
    pub lo: usize,
    pub hi: usize,
}

impl Bucket {
    pub fn contains(&self, n: usize) -> bool {
        (self.lo..=self.hi).contains(&n)
    }
}

pub const DEFAULT_BUCKETS: [Bucket; 3] =
    [Bucket { lo: 1, hi: 9 }, Bucket { lo: 10, hi: 99 }, Bucket { lo: 100, hi: 199 }];

/// Comma-separated `lo-hi` ranges, e.g. `1-9,10-99,100-199`.
pub fn parse_buckets(spec: &str) -> Result<Vec<Bucket>, CliError> {
    spec.split(',')
        .map(|part| {
            let bad = || CliError::Usage(format!("bad bucket `{part}`; expected lo-hi"));
            let (lo, hi) = part.trim().split_once('-').ok_or_else(bad)?;
            let lo: usize = lo.parse().map_err(|_| bad())?;
            let hi: usize = hi.parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok(Bucket { lo, hi })
        })
        .collect()
}

/// Aggregates for one bucket; `None` marks an average over no trees.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketSummary {
    pub bucket: Bucket,
    pub trees: usize,
    pub modified: usize,
    pub modified_pct: f64,
    pub unmodified_dups: Option<f64>,
    pub unmodified_losses: Option<f64>,
    pub modified_dups: Option<f64>,
    pub modified_losses: Option<f64>,
    pub reduction: Option<f64>,
    pub reduction_pct: Option<f64>,
    pub ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchSummary {
    pub buckets: Vec<BucketSummary>,
    /// Rows whose size falls in no bucket.
    pub outside: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn summarize(rows: &[ReportRow], buckets: &[Bucket]) -> BatchSummary {
    let outside = rows.iter().filter(|r| !buckets.iter().any(|b| b.contains(r.n))).count();
    let buckets = buckets
        .iter()
        .map(|&bucket| {
            let all: Vec<&ReportRow> = rows.iter().filter(|r| bucket.contains(r.n)).collect();
            let (modified, unmodified): (Vec<&ReportRow>, Vec<&ReportRow>) = all.iter().partition(|r| r.modified);
            BucketSummary {
                bucket,
                trees: all.len(),
                modified: modified.len(),
                modified_pct: if all.is_empty() { 0.0 } else { 100.0 * modified.len() as f64 / all.len() as f64 },
                unmodified_dups: mean(unmodified.iter().map(|r| r.dups as f64)),
                unmodified_losses: mean(unmodified.iter().map(|r| r.losses as f64)),
                modified_dups: mean(modified.iter().map(|r| r.dups as f64)),
                modified_losses: mean(modified.iter().map(|r| r.losses as f64)),
                reduction: mean(modified.iter().map(|r| r.reduction as f64)),
                reduction_pct: mean(
                    modified.iter().filter(|r| r.baseline > 0).map(|r| 100.0 * r.reduction as f64 / r.baseline as f64),
                ),
                ms: mean(all.iter().filter_map(|r| r.ms)),
            }
        })
        .collect();
    BatchSummary { buckets, outside }
}

const SUMMARY_HEADER: [&str; 11] = [
    "bucket",
    "trees",
    "modified",
    "modified_pct",
    "unmod_dups",
    "unmod_losses",
    "mod_dups",
    "mod_losses",
    "reduction",
    "reduction_pct",
    "ms",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.2}"))
}

impl BatchSummary {
    fn cells(&self) -> Vec<[String; 11]> {
        self.buckets
            .iter()
            .map(|b| {
                [
                    format!("{}-{}", b.bucket.lo, b.bucket.hi),
                    b.trees.to_string(),
                    b.modified.to_string(),
                    format!("{:.2}", b.modified_pct),
                    opt(b.unmodified_dups),
                    opt(b.unmodified_losses),
                    opt(b.modified_dups),
                    opt(b.modified_losses),
                    opt(b.reduction),
                    opt(b.reduction_pct),
                    opt(b.ms),
                ]
            })
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = SUMMARY_HEADER.join("\t");
        out.push('\n');
        for row in self.cells() {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Right-aligned columns for reading in a terminal.
    pub fn to_text(&self) -> String {
        let rows = self.cells();
        let widths: Vec<usize> = (0..SUMMARY_HEADER.len())
            .map(|i| rows.iter().map(|r| r[i].len()).chain([SUMMARY_HEADER[i].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let header = SUMMARY_HEADER.map(str::to_string);
        for row in std::iter::once(&header).chain(&rows) {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, baseline: usize, output: usize) -> ReportRow {
        ReportRow {
            instance: format!("i{n}"),
            n,
            cost: CostSpec::MM,
            baseline,
            output,
            reduction: baseline - output,
            modified: output < baseline,
            moves: usize::from(output < baseline),
            sum_delta: baseline - output,
            dups: 2,
            losses: 3,
            ms: Some(1.5),
        }
    }

    #[test]
    fn rows_round_trip() {
        let r = row(12, 9, 7);
        assert_eq!(r.to_tsv().parse::<ReportRow>().unwrap(), r);
        let mut untimed = r.clone();
        untimed.ms = None;
        assert!(untimed.to_tsv().ends_with("\tNA"));
        assert_eq!(untimed.to_tsv().parse::<ReportRow>().unwrap(), untimed);
        assert_eq!(REPORT_HEADER.split('\t').count(), 12);
    }

    #[test]
    fn no_modified_trees() {
        let s = summarize(&[row(5, 4, 4), row(7, 2, 2)], &DEFAULT_BUCKETS);
        let b = &s.buckets[0];
        assert_eq!((b.trees, b.modified, b.modified_pct), (2, 0, 0.0));
        assert_eq!(b.reduction, None);
        assert!(s.to_tsv().lines().nth(1).unwrap().starts_with("1-9\t2\t0\t0.00\t"));
    }

    #[test]
    fn reduction_percentage_formula() {
        let s = summarize(&[row(150, 50, 40)], &DEFAULT_BUCKETS);
        let b = &s.buckets[2];
        assert_eq!(b.modified, 1);
        assert_eq!(b.reduction, Some(10.0));
        assert_eq!(b.reduction_pct, Some(100.0 * 10.0 / 50.0));
        assert_eq!(s.buckets[0].trees, 0);
    }

    #[test]
    fn bucket_parsing() {
        assert_eq!(parse_buckets("1-9,10-99,100-199").unwrap(), DEFAULT_BUCKETS);
        assert!(parse_buckets("9-1").is_err());
        assert!(parse_buckets("x").is_err());
        let s = summarize(&[row(300, 5, 5)], &DEFAULT_BUCKETS);
        assert_eq!(s.outside, 1);
    }

    #[test]
    fn text_table_aligns() {
        let s = summarize(&[row(5, 4, 3)], &DEFAULT_BUCKETS);
        let text = s.to_text();
        let lens: Vec<usize> = text.lines().map(str::len).collect();
        assert!(lens.windows(2).all(|w| w[0] == w[1]));
    }
}
