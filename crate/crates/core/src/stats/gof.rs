//! Chi-square goodness-of-fit and independence tests.
//!
//! Both tests merge sparse categories until every expected count is at least
//! [`MIN_EXPECTED`], then refer the Pearson statistic to the chi-square
//! distribution via the regularized upper incomplete gamma function.

use serde::Serialize;

use super::pmf::Pmf;
use super::special::chi_square_sf;
use crate::error::{Error, Result};

/// Minimum expected count per bin (or per table cell) after merging.
pub const MIN_EXPECTED: f64 = 5.0;

/// Significance level used by the fixed-seed certification checks.
pub const DEFAULT_ALPHA: f64 = 1e-4;

/// A run of adjacent count values `lo..=hi`; `hi = None` is open-ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValueRange {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl ValueRange {
    fn single(k: u64) -> Self {
        Self { lo: k, hi: Some(k) }
    }

    fn join(self, other: ValueRange) -> Self {
        let (low, high) = if self.lo <= other.lo {
            (self, other)
        } else {
            (other, self)
        };
        Self {
            lo: low.lo,
            hi: high.hi,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bin {
    #[serde(flatten)]
    pub range: ValueRange,
    pub observed: u64,
    pub expected: f64,
}

impl Bin {
    fn absorb(self, other: Bin) -> Bin {
        Bin {
            range: self.range.join(other.range),
            observed: self.observed + other.observed,
            expected: self.expected + other.expected,
        }
    }
}

/// Categories a test was evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Binning {
    Histogram(Vec<Bin>),
    Table {
        rows: Vec<ValueRange>,
        cols: Vec<ValueRange>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub pass: bool,
    pub alpha: f64,
    pub bins: Binning,
}

impl GofReport {
    fn new(statistic: f64, dof: usize, alpha: f64, bins: Binning) -> Self {
        let p_value = chi_square_sf(statistic, dof);
        Self {
            statistic,
            dof,
            p_value,
            pass: p_value > alpha,
            alpha,
            bins,
        }
    }
}

/// Histogram of non-negative integer observations; `hist[k]` counts how
/// often the value `k` occurred.
pub fn histogram<I: IntoIterator<Item = u64>>(values: I) -> Vec<u64> {
    let mut hist = Vec::new();
    for v in values {
        let v = v as usize;
        if v >= hist.len() {
            hist.resize(v + 1, 0);
        }
        hist[v] += 1;
    }
    hist
}

/// Pearson goodness of fit of an observed histogram against `expected`.
///
/// Values past the pmf's working support are pooled into an open-ended last
/// bin. Bins are then merged from the upper end until each holds an expected
/// count of at least [`MIN_EXPECTED`]; the remainder at the low end joins its
/// neighbour.
pub fn chi_square_gof(
    observed: &[u64],
    expected: &Pmf,
    total: u64,
    alpha: f64,
) -> Result<GofReport> {
    let sum: u64 = observed.iter().sum();
    if sum != total {
        return Err(Error::TotalMismatch {
            observed: sum,
            declared: total,
        });
    }
    if total == 0 {
        return Err(Error::TooFewBins(0));
    }
    let top = expected
        .upper()
        .max(observed.len().saturating_sub(1) as u64);
    let n = total as f64;
    let mut raw: Vec<Bin> = (0..top)
        .map(|k| Bin {
            range: ValueRange::single(k),
            observed: observed.get(k as usize).copied().unwrap_or(0),
            expected: n * expected.mass(k),
        })
        .collect();
    raw.push(Bin {
        range: ValueRange { lo: top, hi: None },
        observed: observed.iter().skip(top as usize).sum(),
        expected: n * expected.upper_tail(top),
    });

    let bins = merge_from_top(raw);
    if bins.len() < 2 {
        return Err(Error::TooFewBins(bins.len()));
    }
    let statistic = bins
        .iter()
        .map(|b| {
            let d = b.observed as f64 - b.expected;
            d * d / b.expected
        })
        .sum();
    Ok(GofReport::new(
        statistic,
        bins.len() - 1,
        alpha,
        Binning::Histogram(bins),
    ))
}

fn merge_from_top(raw: Vec<Bin>) -> Vec<Bin> {
    let mut merged = Vec::new();
    let mut pending: Option<Bin> = None;
    for bin in raw.into_iter().rev() {
        let cur = match pending.take() {
            Some(p) => p.absorb(bin),
            None => bin,
        };
        if cur.expected >= MIN_EXPECTED {
            merged.push(cur);
        } else {
            pending = Some(cur);
        }
    }
    if let Some(rest) = pending {
        match merged.last_mut() {
            Some(last) => *last = last.absorb(rest),
            None => merged.push(rest),
        }
    }
    merged.reverse();
    merged
}

/// Two-way table of paired counts. `cell(i, j)` is the number of pairs
/// `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContingencyTable {
    cells: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Self {
        let mut cells: Vec<Vec<u64>> = Vec::new();
        let mut width = 0usize;
        for (i, j) in pairs {
            let (i, j) = (i as usize, j as usize);
            if i >= cells.len() {
                cells.resize(i + 1, Vec::new());
            }
            let row = &mut cells[i];
            if j >= row.len() {
                row.resize(j + 1, 0);
            }
            row[j] += 1;
            width = width.max(j + 1);
        }
        for row in &mut cells {
            row.resize(width, 0);
        }
        Self { cells }
    }

    /// Rows must all have the same length.
    pub fn from_rows(cells: Vec<Vec<u64>>) -> Result<Self> {
        let width = cells.first().map_or(0, Vec::len);
        if cells.iter().any(|r| r.len() != width) {
            return Err(Error::DegenerateTable("ragged rows".into()));
        }
        Ok(Self { cells })
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn cell(&self, i: usize, j: usize) -> u64 {
        self.cells[i][j]
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }
}

struct Grouped {
    cells: Vec<Vec<f64>>,
    rows: Vec<ValueRange>,
    cols: Vec<ValueRange>,
}

impl Grouped {
    fn row_sums(&self) -> Vec<f64> {
        self.cells.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<f64> {
        (0..self.cols.len())
            .map(|j| self.cells.iter().map(|r| r[j]).sum())
            .collect()
    }

    fn merge_rows(&mut self, keep: usize, drop: usize) {
        let removed = self.cells.remove(drop);
        for (c, v) in self.cells[keep.min(drop)].iter_mut().zip(removed) {
            *c += v;
        }
        let r = self.rows.remove(drop);
        let k = keep.min(drop);
        self.rows[k] = self.rows[k].join(r);
    }

    fn merge_cols(&mut self, keep: usize, drop: usize) {
        for row in &mut self.cells {
            let v = row.remove(drop);
            row[keep.min(drop)] += v;
        }
        let c = self.cols.remove(drop);
        let k = keep.min(drop);
        self.cols[k] = self.cols[k].join(c);
    }
}

/// Index of the neighbour a sparse category merges into: the one below it,
/// or the one above when it is the first.
fn merge_partner(i: usize) -> usize {
    if i == 0 {
        1
    } else {
        i - 1
    }
}

fn argmin(xs: &[f64]) -> usize {
    // last minimum wins so ties resolve toward the upper end
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x <= xs[best] {
            best = i;
        }
    }
    best
}

/// Pearson chi-square test of independence between the row and column
/// variables of `table`, with `(r - 1)(c - 1)` degrees of freedom.
///
/// Empty rows and columns are dropped. While some expected cell count is
/// below [`MIN_EXPECTED`], the sparsest row or column (relative to its
/// axis) is merged into its neighbour.
pub fn independence_test(table: &ContingencyTable, alpha: f64) -> Result<GofReport> {
    let total = table.total();
    if total == 0 {
        return Err(Error::DegenerateTable("empty table".into()));
    }
    let rows_keep: Vec<usize> = (0..table.rows())
        .filter(|&i| (0..table.cols()).any(|j| table.cell(i, j) > 0))
        .collect();
    let cols_keep: Vec<usize> = (0..table.cols())
        .filter(|&j| (0..table.rows()).any(|i| table.cell(i, j) > 0))
        .collect();
    let mut g = Grouped {
        cells: rows_keep
            .iter()
            .map(|&i| cols_keep.iter().map(|&j| table.cell(i, j) as f64).collect())
            .collect(),
        rows: rows_keep
            .iter()
            .map(|&i| ValueRange::single(i as u64))
            .collect(),
        cols: cols_keep
            .iter()
            .map(|&j| ValueRange::single(j as u64))
            .collect(),
    };
    let t = total as f64;

    loop {
        if g.rows.len() < 2 || g.cols.len() < 2 {
            return Err(Error::DegenerateTable(format!(
                "{} x {} after merging sparse categories",
                g.rows.len(),
                g.cols.len()
            )));
        }
        let (rs, cs) = (g.row_sums(), g.col_sums());
        let (ri, ci) = (argmin(&rs), argmin(&cs));
        if rs[ri] * cs[ci] / t >= MIN_EXPECTED {
            break;
        }
        // relative sparsity: margin compared to the axis average
        let row_rel = rs[ri] * rs.len() as f64;
        let col_rel = cs[ci] * cs.len() as f64;
        if row_rel <= col_rel {
            g.merge_rows(merge_partner(ri), ri);
        } else {
            g.merge_cols(merge_partner(ci), ci);
        }
    }

    let (rs, cs) = (g.row_sums(), g.col_sums());
    let mut statistic = 0.0;
    for (i, row) in g.cells.iter().enumerate() {
        for (j, o) in row.iter().enumerate() {
            let e = rs[i] * cs[j] / t;
            statistic += (o - e) * (o - e) / e;
        }
    }
    let dof = (g.rows.len() - 1) * (g.cols.len() - 1);
    Ok(GofReport::new(
        statistic,
        dof,
        alpha,
        Binning::Table {
            rows: g.rows,
            cols: g.cols,
        },
    ))
}

/// Two-sample chi-square test that histograms `a` and `b` come from the same
/// distribution (a 2 x K homogeneity table).
pub fn two_sample_test(a: &[u64], b: &[u64], alpha: f64) -> Result<GofReport> {
    let width = a.len().max(b.len());
    let pad = |h: &[u64]| {
        let mut v = h.to_vec();
        v.resize(width, 0);
        v
    };
    let table = ContingencyTable::from_rows(vec![pad(a), pad(b)])?;
    independence_test(&table, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_poisson_count, RngStream};

    #[test]
    fn histogram_counts() {
        assert_eq!(histogram([0, 2, 2, 5]), vec![1, 0, 2, 0, 0, 1]);
        assert!(histogram(std::iter::empty()).is_empty());
    }

    #[test]
    fn proportional_data_gives_zero_statistic() {
        let pmf = Pmf::binomial(2, 0.5).unwrap();
        let r = chi_square_gof(&[10, 20, 10], &pmf, 40, DEFAULT_ALPHA).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert!(r.pass);
        assert_eq!(r.dof, 2);
    }

    #[test]
    fn total_must_match() {
        let pmf = Pmf::binomial(2, 0.5).unwrap();
        assert!(matches!(
            chi_square_gof(&[10, 20, 10], &pmf, 41, DEFAULT_ALPHA),
            Err(Error::TotalMismatch { .. })
        ));
    }

    #[test]
    fn point_mass_has_too_few_bins() {
        let pmf = Pmf::binomial(4, 1.0).unwrap();
        assert_eq!(
            chi_square_gof(&[0, 0, 0, 0, 100], &pmf, 100, DEFAULT_ALPHA),
            Err(Error::TooFewBins(1))
        );
    }

    #[test]
    fn merging_meets_the_threshold_and_keeps_totals() {
        let pmf = Pmf::poisson(3.0).unwrap();
        let mut rng = RngStream::new(77, 0);
        let hist = histogram((0..500).map(|_| sample_poisson_count(3.0, &mut rng).unwrap()));
        let r = chi_square_gof(&hist, &pmf, 500, DEFAULT_ALPHA).unwrap();
        let Binning::Histogram(bins) = &r.bins else {
            panic!()
        };
        assert!(bins.iter().all(|b| b.expected >= MIN_EXPECTED));
        assert_eq!(bins.iter().map(|b| b.observed).sum::<u64>(), 500);
        let e: f64 = bins.iter().map(|b| b.expected).sum();
        assert!((e - 500.0).abs() < 1e-9);
        assert_eq!(bins[0].range.lo, 0);
        assert_eq!(bins.last().unwrap().range.hi, None);
        for w in bins.windows(2) {
            assert_eq!(w[0].range.hi.unwrap() + 1, w[1].range.lo);
        }
    }

    #[test]
    fn observations_past_support_land_in_last_bin() {
        let pmf = Pmf::poisson(1.0).unwrap();
        let mut hist = vec![0u64; 41];
        hist[0] = 37;
        hist[1] = 37;
        hist[2] = 18;
        hist[3] = 7;
        hist[40] = 1;
        let r = chi_square_gof(&hist, &pmf, 100, DEFAULT_ALPHA).unwrap();
        let Binning::Histogram(bins) = &r.bins else {
            panic!()
        };
        let last = bins.last().unwrap();
        assert_eq!(last.range.hi, None);
        assert_eq!(last.range.lo, 3);
        assert_eq!(last.observed, 7 + 1);
        assert_eq!(bins.iter().map(|b| b.observed).sum::<u64>(), 100);
    }

    #[test]
    fn detects_wrong_mean() {
        let mut rng = RngStream::new(4, 8);
        let hist = histogram((0..20_000).map(|_| sample_poisson_count(4.0, &mut rng).unwrap()));
        let wrong =
            chi_square_gof(&hist, &Pmf::poisson(8.0).unwrap(), 20_000, DEFAULT_ALPHA).unwrap();
        assert!(!wrong.pass);
        let right =
            chi_square_gof(&hist, &Pmf::poisson(4.0).unwrap(), 20_000, DEFAULT_ALPHA).unwrap();
        assert!(right.pass, "{right:?}");
    }

    #[test]
    fn product_table_gives_zero_statistic() {
        let rows = [10u64, 20, 30];
        let cols = [4u64, 6];
        let cells = rows
            .iter()
            .map(|r| cols.iter().map(|c| r * c).collect())
            .collect();
        let t = ContingencyTable::from_rows(cells).unwrap();
        let r = independence_test(&t, DEFAULT_ALPHA).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert_eq!(r.dof, 2);
    }

    #[test]
    fn coupled_counts_fail() {
        let mut rng = RngStream::new(5, 5);
        let pairs: Vec<(u64, u64)> = (0..5000)
            .map(|_| {
                let c = sample_poisson_count(2.5, &mut rng).unwrap();
                (c, c)
            })
            .collect();
        let r = independence_test(&ContingencyTable::from_pairs(pairs), DEFAULT_ALPHA).unwrap();
        assert!(!r.pass);
        assert!(r.p_value < 1e-100);
    }

    #[test]
    fn independent_counts_pass() {
        let mut rng = RngStream::new(6, 6);
        let pairs: Vec<(u64, u64)> = (0..5000)
            .map(|_| {
                (
                    sample_poisson_count(2.5, &mut rng).unwrap(),
                    sample_poisson_count(1.0, &mut rng).unwrap(),
                )
            })
            .collect();
        let r = independence_test(&ContingencyTable::from_pairs(pairs), DEFAULT_ALPHA).unwrap();
        assert!(r.pass, "{r:?}");
        let Binning::Table { rows, cols } = &r.bins else {
            panic!()
        };
        assert!(rows.len() >= 2 && cols.len() >= 2);
    }

    #[test]
    fn degenerate_tables() {
        let single_row = ContingencyTable::from_rows(vec![vec![3, 4, 5]]).unwrap();
        assert!(matches!(
            independence_test(&single_row, DEFAULT_ALPHA),
            Err(Error::DegenerateTable(_))
        ));
        let empty = ContingencyTable::from_rows(vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert!(independence_test(&empty, DEFAULT_ALPHA).is_err());
        assert!(ContingencyTable::from_rows(vec![vec![1], vec![1, 2]]).is_err());
    }

    #[test]
    fn two_sample_same_source() {
        let mut rng = RngStream::new(21, 0);
        let a = histogram((0..3000).map(|_| sample_poisson_count(4.0, &mut rng).unwrap()));
        let b = histogram((0..800).map(|_| sample_poisson_count(4.0, &mut rng).unwrap()));
        assert!(two_sample_test(&a, &b, DEFAULT_ALPHA).unwrap().pass);
        let c = histogram((0..800).map(|_| sample_poisson_count(6.0, &mut rng).unwrap()));
        assert!(!two_sample_test(&a, &c, DEFAULT_ALPHA).unwrap().pass);
    }
}
