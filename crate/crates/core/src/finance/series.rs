use crate::error::{Error, Result};

/// Regularly sampled real series.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    /// Epoch seconds of the first sample.
    pub t0: i64,
    /// Sampling period in seconds.
    pub dt: f64,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(t0: i64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", "sampling period must be positive"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("series values must be finite".into()));
        }
        Ok(Series { t0, dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp(&self, i: usize) -> f64 {
        self.t0 as f64 + i as f64 * self.dt
    }

    /// First differences, stamped at the later sample.
    pub fn differences(&self) -> Series {
        Series {
            t0: (self.t0 as f64 + self.dt).round() as i64,
            dt: self.dt,
            values: self.values.windows(2).map(|w| w[1] - w[0]).collect(),
        }
    }

    pub fn same_grid(&self, other: &Series) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.len() == other.len()
    }

    /// `timestamp,value` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("timestamp,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{v}\n", self.timestamp(i)));
        }
        out
    }
}

/// Parses `timestamp,price` rows; errors carry the 1-based line number.
pub fn parse_price_csv(text: &str) -> Result<Vec<(i64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "timestamp,price" => {}
        _ => return Err(Error::Input("line 1: expected header `timestamp,price`".into())),
    }
    let mut out = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Input(format!("line {}: malformed row `{line}`", lineno + 1));
        let (ts, price) = line.split_once(',').ok_or_else(bad)?;
        let ts: i64 = ts.trim().parse().map_err(|_| bad())?;
        let price: f64 = price.trim().parse().map_err(|_| bad())?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(Error::Input(format!(
                "line {}: price must be positive, got {price}",
                lineno + 1
            )));
        }
        out.push((ts, price));
    }
    Ok(out)
}

fn check_raw(raw: &[(i64, f64)]) -> Result<()> {
    if raw.is_empty() {
        return Err(Error::Input("empty price series".into()));
    }
    if let Some(w) = raw.windows(2).find(|w| w[1].0 < w[0].0) {
        return Err(Error::Input(format!(
            "timestamps decrease from {} to {}",
            w[0].0, w[1].0
        )));
    }
    if let Some(&(t, p)) = raw.iter().find(|(_, p)| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::Input(format!("non-positive price {p} at {t}")));
    }
    Ok(())
}

/// Removes the jump across every hole longer than `gap_threshold` by
/// scaling all later prices with `S(t_{n-1}) / S(t_n)`.
fn stitch(raw: &[(i64, f64)], gap_threshold: f64) -> Vec<(i64, f64)> {
    let mut factor = 1.0;
    let mut out = Vec::with_capacity(raw.len());
    for (k, &(t, p)) in raw.iter().enumerate() {
        if k > 0 {
            let (tp, pp) = raw[k - 1];
            if (t - tp) as f64 > gap_threshold {
                factor *= pp / p;
            }
        }
        out.push((t, p * factor));
    }
    out
}

/// Last-observation-carried-forward resampling on `start + k * dt`.
fn resample(adjusted: &[(i64, f64)], start: i64, end: i64, dt: f64) -> Vec<f64> {
    let mut values = Vec::new();
    let mut j = 0;
    let mut current = adjusted[0].1;
    let mut k = 0usize;
    loop {
        let t = start as f64 + k as f64 * dt;
        if t > end as f64 {
            break;
        }
        while j < adjusted.len() && adjusted[j].0 as f64 <= t {
            current = adjusted[j].1;
            j += 1;
        }
        values.push(current);
        k += 1;
    }
    values
}

fn check_sampling(dt: f64, gap_threshold: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", "must be positive"));
    }
    if !(gap_threshold > 0.0) {
        return Err(Error::param("gapThreshold", "must be positive"));
    }
    Ok(())
}

/// Regular series from raw ticks: holes longer than `gap_threshold` are
/// stitched, then values are carried forward onto the `dt` grid.
pub fn clean_series(raw: &[(i64, f64)], dt: f64, gap_threshold: f64) -> Result<Series> {
    check_sampling(dt, gap_threshold)?;
    check_raw(raw)?;
    let adjusted = stitch(raw, gap_threshold);
    let (start, end) = (raw[0].0, raw[raw.len() - 1].0);
    Series::new(start, dt, resample(&adjusted, start, end, dt))
}

/// Cleans several series on their common time range, so the outputs share
/// `t0`, `dt` and length.
pub fn clean_multiple(raws: &[Vec<(i64, f64)>], dt: f64, gap_threshold: f64) -> Result<Vec<Series>> {
    check_sampling(dt, gap_threshold)?;
    if raws.is_empty() {
        return Err(Error::Input("no series".into()));
    }
    for r in raws {
        check_raw(r)?;
    }
    let start = raws.iter().map(|r| r[0].0).max().expect("non-empty");
    let end = raws.iter().map(|r| r[r.len() - 1].0).min().expect("non-empty");
    if end < start {
        return Err(Error::Input("series have no common time range".into()));
    }
    raws.iter()
        .map(|r| {
            let adjusted = stitch(r, gap_threshold);
            Series::new(start, dt, resample(&adjusted, start, end, dt))
        })
        .collect()
}

/// Log-prices `ln(S/S_0)` and their first differences.
pub fn log_prices_and_returns(s: &Series) -> Result<(Series, Series)> {
    if s.is_empty() {
        return Err(Error::Input("empty series".into()));
    }
    if s.values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Input("log-prices need positive values".into()));
    }
    let s0 = s.values[0];
    let x = Series {
        t0: s.t0,
        dt: s.dt,
        values: s.values.iter().map(|v| (v / s0).ln()).collect(),
    };
    let dx = x.differences();
    Ok((x, dx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_input_unchanged() {
        let raw: Vec<(i64, f64)> = (0..10).map(|k| (100 + k, 1.0 + 0.01 * k as f64)).collect();
        let s = clean_series(&raw, 1.0, 60.0).unwrap();
        assert_eq!(s.t0, 100);
        assert_eq!(s.values, raw.iter().map(|r| r.1).collect::<Vec<_>>());
    }

    #[test]
    fn gap_is_stitched() {
        let raw = vec![(0, 1.0), (1, 1.0), (500, 1.1), (501, 1.21)];
        let s = clean_series(&raw, 1.0, 60.0).unwrap();
        assert_eq!(s.len(), 502);
        let (_, dx) = log_prices_and_returns(&s).unwrap();
        assert!(dx.values[..499].iter().all(|v| v.abs() < 1e-15));
        assert!((s.values[500] - 1.0).abs() < 1e-15);
        assert!((s.values[501] - 1.1).abs() < 1e-12);
    }

    #[test]
    fn common_range() {
        let a: Vec<(i64, f64)> = (0..20).map(|k| (k, 1.0 + k as f64)).collect();
        let b: Vec<(i64, f64)> = (5..30).map(|k| (k, 2.0)).collect();
        let out = clean_multiple(&[a, b], 1.0, 60.0).unwrap();
        assert_eq!(out[0].t0, out[1].t0);
        assert_eq!(out[0].len(), out[1].len());
        assert_eq!(out[0].t0, 5);
        assert_eq!(out[0].len(), 15);
        assert_eq!(out[0].values[0], 6.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(clean_series(&[], 1.0, 60.0).is_err());
        assert!(clean_series(&[(0, 1.0), (1, -2.0)], 1.0, 60.0).is_err());
        assert!(clean_series(&[(5, 1.0), (1, 2.0)], 1.0, 60.0).is_err());
        let err = parse_price_csv("timestamp,price\n1,2.0\n2,abc\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn log_returns() {
        let s = Series::new(0, 1.0, vec![3.0; 5]).unwrap();
        let (x, dx) = log_prices_and_returns(&s).unwrap();
        assert!(x.values.iter().all(|v| *v == 0.0));
        assert!(dx.values.iter().all(|v| *v == 0.0));
        let s = Series::new(0, 1.0, vec![1.0, std::f64::consts::E]).unwrap();
        let (x, dx) = log_prices_and_returns(&s).unwrap();
        assert_eq!(x.values[0], 0.0);
        assert!((x.values[1] - 1.0).abs() < 1e-15);
        assert_eq!(dx.len(), 1);
        assert!((dx.values[0] - 1.0).abs() < 1e-15);
    }
}
