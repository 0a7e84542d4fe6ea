/// Parses `start:stop:step`; `stop` is included when reachable within 1e-12.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, s] = parts.as_slice() else {
        return Err(format!("grid {spec:?} is not start:stop:step"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("grid {spec:?}: {x:?} is not a number"));
    let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(format!("grid {spec:?} must be finite"));
    }
    if !(step > 0.0) || stop < start {
        return Err(format!("grid {spec:?} needs step > 0 and stop >= start"));
    }
    let count = ((stop - start) / step + 1e-12).floor() as usize;
    if count > 1_000_000 {
        return Err(format!("grid {spec:?} has more than a million points"));
    }
    let mut out: Vec<f64> = (0..=count).map(|i| start + i as f64 * step).collect();
    if let Some(last) = out.last_mut() {
        if (*last - stop).abs() <= 1e-12 * stop.abs().max(1.0) {
            *last = stop;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_stop() {
        let g = parse_grid("0.01:1:0.01").unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(parse_grid("1:2:0.3").unwrap().len(), 4);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:1:0.1").is_err());
    }
}
