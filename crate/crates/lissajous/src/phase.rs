//! Phase literals such as `pi/7`, `-3pi/4` or `0.25`.

use std::f64::consts::PI;

/// Parses a phase in radians. Multiples of π are written `[sign][c][*]pi[/K]`
/// and evaluated as `c · π / K` with the library's π, so `pi/6` here and
/// `PI / 6.0` in code give the same double.
pub fn parse_phase(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let lower = s.to_ascii_lowercase();
    let Some(at) = lower.find("pi") else {
        return s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("not a phase: {text:?}"));
    };
    let bad = || format!("not a phase: {text:?} (expected e.g. pi/6, -3pi/4, 0.5)");
    let (head, tail) = (&lower[..at], &lower[at + 2..]);
    let (sign, head) = match head.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, head.strip_prefix('+').unwrap_or(head)),
    };
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|_| bad())? };
    let value = if tail.is_empty() {
        coef * PI
    } else {
        let k = tail.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?;
        if k == 0.0 {
            return Err(bad());
        }
        coef * PI / k
    };
    let value = sign * value;
    value.is_finite().then_some(value).ok_or_else(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_phase("pi/6").unwrap(), PI / 6.0);
        assert_eq!(parse_phase("pi").unwrap(), PI);
        assert_eq!(parse_phase("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_phase("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_phase("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_phase("PI/7").unwrap(), PI / 7.0);
        assert_eq!(parse_phase("0.25").unwrap(), 0.25);
        assert_eq!(parse_phase("0").unwrap(), 0.0);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["pi/0", "pie", "x", "pi/", "nan", "inf", "pi/a"] {
            assert!(parse_phase(s).is_err(), "{s}");
        }
    }
}
