use std::path::Path;

use crate::{Error, Result};

const NR_SEQUENCE_256: &str = include_str!("../../data/nr_reliability_256.txt");

/// Parses a reliability sequence: one index per line, least reliable
/// first. Blank lines and lines starting with `#` are skipped. The indices
/// must form a permutation of `0..len` with `len` a power of two.
pub fn parse_reliability(text: &str) -> Result<Vec<usize>> {
    let mut order = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: usize = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("not a nonnegative integer: {line:?}"),
        })?;
        order.push((i + 1, v));
    }
    let n = order.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut seen = vec![false; n];
    for &(line, v) in &order {
        if v >= n {
            return Err(Error::Parse {
                line,
                msg: format!("index {v} out of range for length {n}"),
            });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Parse {
                line,
                msg: format!("index {v} repeated"),
            });
        }
    }
    Ok(order.into_iter().map(|(_, v)| v).collect())
}

pub fn load_reliability(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_reliability(&text)
}

/// The 5G NR universal sequence restricted to `n <= 256` indices.
pub fn default_reliability(n: usize) -> Result<Vec<usize>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let full = parse_reliability(NR_SEQUENCE_256)?;
    if n > full.len() {
        return Err(Error::domain(format!(
            "built-in reliability sequence covers n <= {}, got {n}",
            full.len()
        )));
    }
    Ok(full.into_iter().filter(|&i| i < n).collect())
}

/// Rank of every index: `rank[i] = position of i in order`.
pub(crate) fn ranks(order: &[usize]) -> Vec<usize> {
    let mut r = vec![0; order.len()];
    for (pos, &i) in order.iter().enumerate() {
        r[i] = pos;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_is_a_permutation() {
        for n in [1, 2, 4, 8, 64, 256] {
            let o = default_reliability(n).unwrap();
            let mut s = o.clone();
            s.sort_unstable();
            assert_eq!(s, (0..n).collect::<Vec<_>>());
        }
        assert!(default_reliability(512).is_err());
    }

    #[test]
    fn builtin_ends() {
        let o = default_reliability(256).unwrap();
        assert_eq!(o[0], 0);
        assert_eq!(*o.last().unwrap(), 255);
        assert_eq!(default_reliability(8).unwrap().last(), Some(&7));
    }

    #[test]
    fn nested_subsequences() {
        let big = default_reliability(256).unwrap();
        let small = default_reliability(32).unwrap();
        let filtered: Vec<_> = big.into_iter().filter(|&i| i < 32).collect();
        assert_eq!(small, filtered);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_reliability("0\n1\nx\n3\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_reliability("0\n1\n1\n3\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_reliability("0\n1\n2\n"), Err(Error::NotPowerOfTwo(3))));
        assert!(matches!(parse_reliability("0\n5\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_reliability("").is_err());
        assert_eq!(parse_reliability("# order\n1\n\n0\n").unwrap(), vec![1, 0]);
    }

    #[test]
    fn rank_inverse() {
        let o = vec![2, 0, 3, 1];
        assert_eq!(ranks(&o), vec![1, 3, 0, 2]);
    }
}
