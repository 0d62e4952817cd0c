//! Exact rational values.
//!
//! All valuation arithmetic in this crate is exact: solvers and checkers
//! compare sums, and ties must be decided exactly, so floating point is
//! never used for values.

use crate::error::{Error, Result};

/// The scalar type for all item and bundle values.
pub type Rat = num_rational::Rational64;

/// Shorthand for an integral rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Parses "p/q" or a bare integer "p".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = |why: &str| Error::Parse(format!("bad rational {s:?}: {why}"));
    match t.split_once('/') {
        None => {
            let n: i64 = t.parse().map_err(|_| bad("not an integer"))?;
            Ok(Rat::from_integer(n))
        }
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad("bad numerator"))?;
            let q: i64 = q.trim().parse().map_err(|_| bad("bad denominator"))?;
            if q == 0 {
                return Err(bad("zero denominator"));
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Canonical text form: "p" when the denominator is 1, else "p/q".
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Integer square root (floor), used by the concave valuation family.
pub fn isqrt(n: i64) -> i64 {
    assert!(n >= 0, "isqrt of negative value");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
