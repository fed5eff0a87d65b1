//! Tracy-Widom law with index 1 from a tabulated CDF.
//!
//! The table is a plain-text file of `x cdf` rows with `#` comments. Two
//! optional comment directives, `# mean: <v>` and `# sd: <v>`, carry the
//! moments; when absent they are integrated from the grid. The crate ships a
//! table generated from the Fredholm-determinant representation
//! (`scripts/gen_tw1_table.py`), and a different file can be installed at
//! startup with [`install`].

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../data/tw1.txt");

/// Environment variable naming a replacement table file.
pub const TABLE_ENV: &str = "SBM_TW1_TABLE";

const QUANTILE_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct TracyWidom1Table {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    slopes: Vec<f64>,
    mean: f64,
    sd: f64,
}

impl TracyWidom1Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut cdf = Vec::new();
        let mut mean = None;
        let mut sd = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("mean:") {
                    mean = Some(parse_num(v, line_no)?);
                } else if let Some(v) = comment.strip_prefix("sd:") {
                    sd = Some(parse_num(v, line_no)?);
                }
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(x), Some(f), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Table { line: line_no, reason: "expected two columns".into() });
            };
            let (x, f) = (parse_num(x, line_no)?, parse_num(f, line_no)?);
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Table { line: line_no, reason: format!("cdf {f} outside (0, 1)") });
            }
            if let (Some(&px), Some(&pf)) = (xs.last(), cdf.last()) {
                if x <= px || f <= pf {
                    return Err(Error::Table { line: line_no, reason: "rows must be strictly increasing".into() });
                }
            }
            xs.push(x);
            cdf.push(f);
        }
        let last = text.lines().count();
        if xs.len() < 3 {
            return Err(Error::Table { line: last, reason: "need at least three rows".into() });
        }
        if xs[0] > -5.0 || xs[xs.len() - 1] < 4.0 || cdf[0] > 0.0005 || cdf[cdf.len() - 1] < 0.9995 {
            return Err(Error::Table {
                line: last,
                reason: "grid must span x in [-5, 4] and cdf in [0.0005, 0.9995]".into(),
            });
        }
        let slopes = pchip_slopes(&xs, &cdf);
        let mut table = Self { xs, cdf, slopes, mean: 0.0, sd: 1.0 };
        let (grid_mean, grid_sd) = table.grid_moments();
        table.mean = mean.unwrap_or(grid_mean);
        table.sd = sd.unwrap_or(grid_sd);
        if !(-1.3..-1.1).contains(&table.mean) || !(1.2..1.35).contains(&table.sd) {
            return Err(Error::Table {
                line: last,
                reason: format!("moments ({}, {}) are not those of TW1", table.mean, table.sd),
            });
        }
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded Tracy-Widom table is valid")
    }

    /// Table named by `SBM_TW1_TABLE`, or the embedded copy when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(TABLE_ENV) {
            Some(path) => Self::from_path(Path::new(&path)),
            None => Ok(Self::embedded()),
        }
    }

    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.cdf.iter().copied())
    }

    /// CDF by monotone piecewise-cubic interpolation, clamped to the endpoint
    /// values outside the grid.
    pub fn cdf(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= self.xs[0] {
            return self.cdf[0];
        }
        if x >= self.xs[last] {
            return self.cdf[last];
        }
        let k = self.xs.partition_point(|&g| g <= x) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.cdf[k] + h10 * h * self.slopes[k] + h01 * self.cdf[k + 1] + h11 * h * self.slopes[k + 1]
    }

    /// Inverse CDF by bisection. Probabilities beyond the tabulated range map
    /// to the grid endpoints.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} is outside (0, 1)")));
        }
        let last = self.xs.len() - 1;
        if p <= self.cdf[0] {
            return Ok(self.xs[0]);
        }
        if p >= self.cdf[last] {
            return Ok(self.xs[last]);
        }
        let k = self.cdf.partition_point(|&f| f <= p);
        let (mut lo, mut hi) = (self.xs[k - 1], self.xs[k]);
        loop {
            let mid = 0.5 * (lo + hi);
            let f = self.cdf(mid);
            if (f - p).abs() <= QUANTILE_TOL || hi - lo <= 1e-14 {
                return Ok(mid);
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    /// `(mean, sd)` of TW1.
    pub fn moments(&self) -> (f64, f64) {
        (self.mean, self.sd)
    }

    /// Moments integrated from the grid by parts: `E[X] = b - int F`,
    /// `E[X^2] = b^2 - int 2xF`, treating the mass outside the grid as
    /// sitting on the endpoints.
    pub fn grid_moments(&self) -> (f64, f64) {
        let b = self.xs[self.xs.len() - 1];
        let mut int_f = 0.0;
        let mut int_2xf = 0.0;
        for k in 0..self.xs.len() - 1 {
            let h = self.xs[k + 1] - self.xs[k];
            int_f += 0.5 * h * (self.cdf[k] + self.cdf[k + 1]);
            int_2xf += h * (self.xs[k] * self.cdf[k] + self.xs[k + 1] * self.cdf[k + 1]);
        }
        let mean = b - int_f;
        let second = b * b - int_2xf;
        (mean, (second - mean * mean).sqrt())
    }
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Table { line, reason: format!("not a finite number: {:?}", s.trim()) })
}

/// Fritsch-Carlson derivative estimates (harmonic-mean interior rule, shape
/// preserving three-point ends).
fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let edge = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() {
            0.0
        } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
            3.0 * m0
        } else {
            d
        }
    };
    d[0] = edge(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

static TABLE: OnceLock<TracyWidom1Table> = OnceLock::new();

/// Install the process-wide table. Fails if one is already in use.
pub fn install(table: TracyWidom1Table) -> std::result::Result<(), TracyWidom1Table> {
    TABLE.set(table)
}

/// The process-wide table (the embedded copy unless [`install`] ran first).
pub fn table() -> &'static TracyWidom1Table {
    TABLE.get_or_init(TracyWidom1Table::embedded)
}

pub fn tw1_cdf(x: f64) -> f64 {
    table().cdf(x)
}

pub fn tw1_quantile(p: f64) -> Result<f64> {
    table().quantile(p)
}

pub fn tw1_moments() -> (f64, f64) {
    table().moments()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn upper_two_point_five_percent_point() {
        assert_abs_diff_eq!(tw1_cdf(1.4538), 0.975, epsilon = 0.002);
        assert_abs_diff_eq!(tw1_quantile(0.975).unwrap(), 1.453, epsilon = 5e-3);
    }

    #[test]
    fn round_trip() {
        for i in 1..=99 {
            let p = i as f64 / 100.0;
            let q = tw1_quantile(p).unwrap();
            assert!((tw1_cdf(q) - p).abs() <= 1e-3, "p = {p}");
        }
    }

    #[test]
    fn quantile_is_increasing() {
        let qs: Vec<f64> = (1..200).map(|i| tw1_quantile(i as f64 / 200.0).unwrap()).collect();
        assert!(qs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn median_matches_grid() {
        let t = table();
        let (x_med, _) = t
            .grid()
            .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()))
            .unwrap();
        assert_abs_diff_eq!(t.quantile(0.5).unwrap(), x_med, epsilon = 2e-2);
    }

    #[test]
    fn moments() {
        let (mean, sd) = tw1_moments();
        assert_abs_diff_eq!(mean, -1.2065, epsilon = 1e-3);
        assert_abs_diff_eq!(sd, 1.2680, epsilon = 1e-3);
        assert!(mean < 0.0 && 0.0 < sd);
        let (gm, gsd) = table().grid_moments();
        assert_abs_diff_eq!(gm, mean, epsilon = 1e-3);
        assert_abs_diff_eq!(gsd, sd, epsilon = 1e-3);
    }

    #[test]
    fn interpolated_density_is_nonnegative() {
        let t = table();
        let mut prev = t.cdf(-6.5);
        let mut x = -6.5;
        while x < 5.5 {
            x += 0.001;
            let f = t.cdf(x);
            assert!(f >= prev, "cdf decreases at {x}");
            prev = f;
        }
    }

    #[test]
    fn clamps_outside_grid() {
        let t = table();
        let (first, last) = (t.grid().next().unwrap(), t.grid().last().unwrap());
        assert_eq!(t.cdf(-100.0), first.1);
        assert_eq!(t.cdf(100.0), last.1);
        assert!(t.cdf(100.0) < 1.0);
    }

    #[test]
    fn quantile_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(tw1_quantile(p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn parse_rejects_bad_tables() {
        assert!(TracyWidom1Table::parse("0 0.5\n1 0.4\n").is_err());
        assert!(TracyWidom1Table::parse("0 abc\n").is_err());
        assert!(TracyWidom1Table::parse("0 0.1\n1 0.2\n2 0.3\n").is_err());
        let truncated: String = EMBEDDED.lines().filter(|l| !l.starts_with('#')).take(100).collect::<Vec<_>>().join("\n");
        assert!(TracyWidom1Table::parse(&truncated).is_err());
    }

    #[test]
    fn parse_without_moment_directives_uses_grid() {
        let bare: String = EMBEDDED.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
        let t = TracyWidom1Table::parse(&bare).unwrap();
        assert_abs_diff_eq!(t.moments().0, -1.2065, epsilon = 1e-3);
    }
}
