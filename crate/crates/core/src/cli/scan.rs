//! Exhaustive scans over boxes of coefficient vectors.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{Check, Outcome};
use crate::algebra::{Field, Fq};
use crate::cartier::hasse_witt;
use crate::cech::frobenius_matrix_h1_o;
use crate::curve::curve_validate;
use crate::error::{Error, Result};
use crate::semilinear::{fitting, SemilinearOp};
use crate::stratcoh::h1_str_weierstrass_line_bundle;

/// Largest number of coefficient vectors a scan may visit.
pub const MAX_SCAN_SIZE: u64 = 400_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub p: u32,
    pub genus: usize,
    /// Inclusive range of integer coefficient values.
    pub lo: i64,
    pub hi: i64,
    pub threads: Option<usize>,
}

impl ScanConfig {
    pub fn new(p: u32, genus: usize, range: Option<&str>, threads: Option<usize>) -> Result<Self> {
        Field::prime(p)?;
        if !(1..=2).contains(&genus) {
            return Err(Error::Config(format!("--genus must be 1 or 2, got {genus}")));
        }
        let (lo, hi) = match range {
            Some(r) => parse_range(r)?,
            None => (0, p as i64 - 1),
        };
        if threads == Some(0) {
            return Err(Error::Config("--threads must be positive".into()));
        }
        let cfg = ScanConfig { p, genus, lo, hi, threads };
        if cfg.size() > MAX_SCAN_SIZE {
            return Err(Error::Config(format!("scan box has {} points, cap is {MAX_SCAN_SIZE}", cfg.size())));
        }
        Ok(cfg)
    }

    fn width(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    /// Number of coefficient vectors in the box.
    pub fn size(&self) -> u64 {
        self.width().saturating_pow(2 * self.genus as u32 + 1)
    }

    /// The `idx`-th vector in lexicographic order on `(a_1, ..., a_(2g+1))`.
    fn coeffs(&self, idx: u64) -> Vec<i64> {
        let n = 2 * self.genus + 1;
        let w = self.width();
        (0..n).map(|i| self.lo + ((idx / w.pow((n - 1 - i) as u32)) % w) as i64).collect()
    }
}

/// `LO:HI`, inclusive.
fn parse_range(s: &str) -> Result<(i64, i64)> {
    let err = |pos: usize, what: &str| Error::InvalidInput(format!("--range {s:?}: {what} at character {pos}"));
    let colon = s.find(':').ok_or_else(|| err(s.len(), "expected LO:HI"))?;
    let lo: i64 = s[..colon].trim().parse().map_err(|_| err(0, "bad lower bound"))?;
    let hi: i64 = s[colon + 1..].trim().parse().map_err(|_| err(colon + 1, "bad upper bound"))?;
    if lo > hi {
        return Err(err(colon + 1, "upper bound below lower bound"));
    }
    Ok((lo, hi))
}

/// Per-curve scan result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub f: Vec<i64>,
    pub p_rank: usize,
    /// Semisimple rank of Frobenius on `H^1(X, O)`.
    pub h1_str_o: usize,
    /// `h^1_str(O(∞ - O))`, genus 2 only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_str_line_bundle: Option<usize>,
}

/// All smooth curves in the box, in lexicographic coefficient order. Work is
/// spread over a thread pool; the ordered collect makes the output
/// independent of scheduling.
pub fn scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    let k = Field::prime(cfg.p)?;
    let one = |idx: u64| -> Option<Result<ScanRow>> {
        let f = cfg.coeffs(idx);
        let coeffs: Vec<Fq> = f.iter().map(|&c| k.from_int(c)).collect();
        let x = curve_validate(k, cfg.genus, &coeffs).ok()?;
        let p_rank = hasse_witt(&x).p_rank;
        let h1_str_o = fitting(&SemilinearOp::new(frobenius_matrix_h1_o(&x), 1)).ss_rank;
        let line = if cfg.genus == 2 { Some(h1_str_weierstrass_line_bundle(&x)) } else { None };
        Some(match line.transpose() {
            Ok(h1_str_line_bundle) => Ok(ScanRow { f, p_rank, h1_str_o, h1_str_line_bundle }),
            Err(e) => Err(e),
        })
    };
    let work = || (0..cfg.size()).into_par_iter().filter_map(one).collect::<Result<Vec<_>>>();
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

pub(super) fn run_scan(cfg: &ScanConfig) -> Result<Outcome> {
    let rows = scan(cfg)?;
    let g = cfg.genus;
    let mut by_rank = vec![0usize; g + 1];
    for r in &rows {
        by_rank[r.p_rank] += 1;
    }
    let mut checks = vec![Check::new(
        "h^1_str(O) equals the p-rank",
        rows.iter().all(|r| r.h1_str_o == r.p_rank),
        format!("{} smooth curves", rows.len()),
    )];
    if g == 2 && cfg.p == 3 {
        let a3_zero = |r: &ScanRow| r.f[2].rem_euclid(3) == 0;
        checks.push(Check::new(
            "line bundle: h^1_str = 0 exactly when a_3 = 0",
            rows.iter().all(|r| (r.h1_str_line_bundle == Some(0)) == a3_zero(r)),
            "",
        ));
        checks.push(Check::new(
            "a_3 = 0 forces ordinary",
            rows.iter().filter(|r| a3_zero(r)).all(|r| r.p_rank == 2),
            format!("{} curves with a_3 = 0", rows.iter().filter(|r| a3_zero(r)).count()),
        ));
    }
    let mut text = format!(
        "scan: p = {}, genus {g}, coefficients in {}..={}, {} points, {} smooth\n",
        cfg.p,
        cfg.lo,
        cfg.hi,
        cfg.size(),
        rows.len()
    );
    for (r, c) in by_rank.iter().enumerate() {
        text.push_str(&format!("  p-rank {r}: {c}\n"));
    }
    let results = json!({
        "p": cfg.p,
        "genus": g,
        "range": [cfg.lo, cfg.hi],
        "points": cfg.size(),
        "smooth": rows.len(),
        "by_p_rank": by_rank,
        "curves": rows,
    });
    Ok(Outcome { curve: None, results, text, checks })
}
