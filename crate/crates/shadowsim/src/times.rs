//! Time grids: `"start:stop:step"` ranges (stop included when hit) or
//! comma-separated lists.

use crate::CliError;

pub fn parse_times(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    let bad = |what: &str| CliError::Schema(format!("times {spec:?}: {what}"));
    let times = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("range bounds must be numbers")))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad("range needs start:stop:step"));
        };
        if !(step > 0.0) || !step.is_finite() {
            return Err(bad("step must be positive"));
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if !(count >= 0.0) || count > 1e7 {
            return Err(bad("empty or oversized range"));
        }
        (0..=count as usize).map(|k| start + k as f64 * step).collect()
    } else {
        spec.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("entries must be numbers")))
            .collect::<Result<Vec<_>, _>>()?
    };
    check_times(&times)?;
    Ok(times)
}

/// Times must be finite, non-empty and strictly ascending.
pub fn check_times(times: &[f64]) -> Result<(), CliError> {
    if times.is_empty() {
        return Err(CliError::Schema("times: empty grid".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Schema("times: non-finite entry".into()));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CliError::Schema(format!("times: not ascending at {} -> {}", w[0], w[1])));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_includes_stop() {
        let t = parse_times("0:10:0.5").unwrap();
        assert_eq!(t.len(), 21);
        assert_eq!(t[20], 10.0);
        assert_eq!(parse_times("0:1:0.3").unwrap().len(), 4);
    }

    #[test]
    fn lists_and_rejections() {
        assert_eq!(parse_times("0, 0.5,2").unwrap(), [0.0, 0.5, 2.0]);
        assert!(parse_times("1,0").is_err());
        assert!(parse_times("0:1:0").is_err());
        assert!(parse_times("0:1").is_err());
        assert!(parse_times("").is_err());
        assert!(parse_times("a,b").is_err());
    }
}
