//! Grid and list parsing for command-line values.

use anyhow::{bail, Context, Result};

/// Parses `start:stop:step` (inclusive, `round((stop − start)/step) + 1`
/// points) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        bail!("empty grid");
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("range grid must look like start:stop:step, got {spec:?}");
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {s:?} in grid {spec:?}"))
        };
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
            bail!("grid step must be positive and bounds finite in {spec:?}");
        }
        if stop < start {
            bail!("grid stop below start in {spec:?}");
        }
        let count = ((stop - start) / step).round() as usize + 1;
        return Ok((0..count).map(|k| start + step * k as f64).collect());
    }
    parse_list(spec)
}

/// Comma-separated list of values.
pub fn parse_list<T>(spec: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let items: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        bail!("empty list");
    }
    items
        .iter()
        .map(|s| s.parse::<T>().with_context(|| format!("bad value {s:?}")))
        .collect()
}
