//! Parsing of sweep specifications and small value lists.

use crate::CliError;

/// `start:end:count` (geometric), a comma list, or a single value.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Config(format!("sweep '{s}': {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad("not a number"))).collect(),
        3 => {
            let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
            let end: f64 = parts[1].trim().parse().map_err(|_| bad("bad end"))?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
            if !(start > 0.0 && end > 0.0) {
                return Err(bad("geometric sweeps need positive endpoints"));
            }
            match count {
                0 => Err(bad("count must be positive")),
                1 => Ok(vec![start]),
                _ => {
                    let ratio = (end / start).ln() / (count - 1) as f64;
                    Ok((0..count).map(|i| if i + 1 == count { end } else { start * (ratio * i as f64).exp() }).collect())
                }
            }
        }
        _ => Err(bad("expected start:end:count")),
    }
}

/// Integer sweep: values are rounded and deduplicated.
pub fn parse_int_sweep(s: &str) -> Result<Vec<i64>, CliError> {
    let mut out: Vec<i64> = parse_sweep(s)?.into_iter().map(|v| v.round() as i64).collect();
    out.dedup();
    Ok(out)
}

/// `num` or `num/den`.
pub fn parse_ratio(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Config(format!("'{s}' is not an integer or a ratio num/den"));
    match s.split_once('/') {
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
        Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
    }
}

pub fn parse_weights(s: &str) -> Result<[u32; 3], CliError> {
    let v: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| CliError::Config(format!("weights '{s}' must be three integers"))))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| CliError::Config(format!("weights '{s}' must be three integers")))
}

/// `x,y,z;x,y,z;...` with missing trailing components set to zero.
pub fn parse_points(s: &str) -> Result<Vec<[f64; 3]>, CliError> {
    s.split(';')
        .map(|p| {
            let v: Vec<f64> = p
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad point '{p}'"))))
                .collect::<Result<_, _>>()?;
            if v.is_empty() || v.len() > 3 {
                return Err(CliError::Config(format!("point '{p}' needs 1 to 3 coordinates")));
            }
            let mut x = [0.0; 3];
            x[..v.len()].copy_from_slice(&v);
            Ok(x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sweep() {
        let v = parse_sweep("0.01:1:3").unwrap();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 0.1).abs() < 1e-15);
        assert_eq!(v[2], 1.0);
        assert_eq!(parse_sweep("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_sweep("1,2").unwrap(), vec![1.0, 2.0]);
        assert!(parse_sweep("0:1:3").is_err());
        assert!(parse_sweep("1:2").is_err());
    }

    #[test]
    fn ints_and_ratios() {
        assert_eq!(parse_int_sweep("4:32:4").unwrap(), vec![4, 8, 16, 32]);
        assert_eq!(parse_ratio("5/2").unwrap(), (5, 2));
        assert_eq!(parse_ratio("7").unwrap(), (7, 1));
        assert_eq!(parse_weights("1,0,2").unwrap(), [1, 0, 2]);
        assert_eq!(parse_points("1,2;3").unwrap(), vec![[1.0, 2.0, 0.0], [3.0, 0.0, 0.0]]);
    }
}
