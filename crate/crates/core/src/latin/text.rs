// Text format: first line is the order, then one line per row with
// space-separated decimal symbols or "." for an empty cell.

use std::fmt;
use std::str::FromStr;

use super::{LatinError, LatinSquare, PartialLatinSquare, Triple};

fn write_grid(f: &mut fmt::Formatter<'_>, n: usize, cell: impl Fn(usize, usize) -> Option<usize>) -> fmt::Result {
    writeln!(f, "{n}")?;
    for r in 0..n {
        for c in 0..n {
            if c > 0 {
                f.write_str(" ")?;
            }
            match cell(r, c) {
                Some(s) => write!(f, "{s}")?,
                None => f.write_str(".")?,
            }
        }
        writeln!(f)?;
    }
    Ok(())
}

impl fmt::Display for PartialLatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_grid(f, self.order(), |r, c| self.get(r, c))
    }
}

impl fmt::Display for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_grid(f, self.order(), |r, c| Some(self.get(r, c)))
    }
}

impl FromStr for PartialLatinSquare {
    type Err = LatinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(LatinError::Parse {
            line: 1,
            reason: "missing order line".into(),
        })?;
        let n: usize = header.trim().parse().map_err(|_| LatinError::Parse {
            line: 1,
            reason: format!("bad order {:?}", header.trim()),
        })?;
        let mut p = PartialLatinSquare::empty(n)?;
        let mut rows = 0;
        for (idx, line) in lines {
            let line_no = idx + 1;
            if rows == n {
                return Err(LatinError::Parse {
                    line: line_no,
                    reason: format!("more than {n} rows"),
                });
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != n {
                return Err(LatinError::Parse {
                    line: line_no,
                    reason: format!("expected {n} cells, found {}", tokens.len()),
                });
            }
            for (c, tok) in tokens.into_iter().enumerate() {
                if tok == "." {
                    continue;
                }
                let sym: usize = tok.parse().map_err(|_| LatinError::Parse {
                    line: line_no,
                    reason: format!("bad cell {tok:?}"),
                })?;
                p.insert(Triple::new(rows, c, sym))?;
            }
            rows += 1;
        }
        if rows != n {
            return Err(LatinError::Parse {
                line: s.lines().count(),
                reason: format!("expected {n} rows, found {rows}"),
            });
        }
        Ok(p)
    }
}

impl FromStr for LatinSquare {
    type Err = LatinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p: PartialLatinSquare = s.parse()?;
        p.to_square()
            .ok_or_else(|| LatinError::InvalidGrid("square has empty cells".into()))
    }
}
