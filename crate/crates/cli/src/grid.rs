//! Grid syntax: `a:b:step`, `a:b:log`, `a:b:log:N` or a comma list.

use crate::error::CliError;

const DEFAULT_LOG_POINTS: usize = 50;

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::input(format!("bad {what} `{s}` in grid")))
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|p| number(p, "value"))
            .collect::<Result<Vec<_>, _>>()?,
        [a, b, kind] | [a, b, kind, _] if kind.trim() == "log" => {
            let (a, b) = (number(a, "start")?, number(b, "end")?);
            let points = match parts.get(3) {
                Some(n) => n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::input(format!("bad point count `{n}` in grid")))?,
                None => DEFAULT_LOG_POINTS,
            };
            if !(a > 0.0 && b >= a) || points < 2 {
                return Err(CliError::input(format!(
                    "log grid `{spec}` needs 0 < start <= end and at least 2 points"
                )));
            }
            let (la, lb) = (a.ln(), b.ln());
            (0..points)
                .map(|i| {
                    if i == 0 {
                        a
                    } else if i + 1 == points {
                        b
                    } else {
                        (la + (lb - la) * i as f64 / (points - 1) as f64).exp()
                    }
                })
                .collect()
        }
        [a, b, step] => {
            let (a, b, step) = (number(a, "start")?, number(b, "end")?, number(step, "step")?);
            if !(step > 0.0) || b < a {
                return Err(CliError::input(format!("grid `{spec}` needs start <= end and step > 0")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            if count > 10_000_000 {
                return Err(CliError::input(format!("grid `{spec}` is too large")));
            }
            // multiply rather than accumulate so that 0.05:1.0:0.05 ends at exactly 1.0
            (0..=count)
                .map(|i| {
                    let v = a + step * i as f64;
                    let rounded = (v * 1e12).round() / 1e12;
                    if (rounded - v).abs() < 1e-9 * step {
                        rounded
                    } else {
                        v
                    }
                })
                .collect()
        }
        _ => return Err(CliError::input(format!("unrecognized grid `{spec}`"))),
    };
    if grid.is_empty() {
        return Err(CliError::input(format!("grid `{spec}` is empty")));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_grid() {
        let g = parse_grid("0.05:1.0:0.05").unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.05);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(g[1], 0.1);
    }

    #[test]
    fn log_grid() {
        let g = parse_grid("1:100:log").unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[49], 100.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(parse_grid("1:1000:log:4").unwrap().len(), 4);
        assert!((parse_grid("1:1000:log:4").unwrap()[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn lists_and_errors() {
        assert_eq!(parse_grid("0.1,0.5,1").unwrap(), vec![0.1, 0.5, 1.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:10:log").is_err());
        assert!(parse_grid("a:b").is_err());
        assert!(parse_grid("1:2:0").is_err());
    }
}
