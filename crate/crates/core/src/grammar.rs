//! Text form of regions.
//!
//! ```text
//! expr  := leaf | ("union" | "inter" | "diff") "(" expr "," expr ")"
//! leaf  := "box:" reals ";" reals | "ball:" reals ";" real
//! reals := real ("," real)*
//! ```
//!
//! Whitespace is ignored between tokens. `Display` on [`Region`] prints the
//! canonical form, which parses back to a structurally equal region.

use std::fmt;

use crate::error::{Error, Result};
use crate::region::{Expr, Region};

/// Parses a region expression.
pub fn parse_region(text: &str) -> Result<Region> {
    let mut p = Parser { src: text, pos: 0 };
    let region = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(region)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn expr(&mut self) -> Result<Region> {
        self.skip_ws();
        let start = self.pos;
        let word_len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        let word = &self.src[start..start + word_len];
        self.pos += word_len;
        match word {
            "box" => {
                self.expect(":")?;
                let lo = self.reals()?;
                self.expect(";")?;
                let hi_pos = self.pos;
                let hi = self.reals()?;
                if lo.len() != hi.len() {
                    return Err(Error::Parse {
                        position: hi_pos,
                        message: format!(
                            "box corners have {} and {} coordinates",
                            lo.len(),
                            hi.len()
                        ),
                    });
                }
                Region::cuboid(lo, hi).map_err(|e| self.wrap(start, e))
            }
            "ball" => {
                self.expect(":")?;
                let center = self.reals()?;
                self.expect(";")?;
                let radius = self.real()?;
                Region::ball(center, radius).map_err(|e| self.wrap(start, e))
            }
            "union" | "inter" | "diff" => {
                self.expect("(")?;
                let left = self.expr()?;
                self.expect(",")?;
                let right = self.expr()?;
                self.expect(")")?;
                let combined = match word {
                    "union" => left.union(right),
                    "inter" => left.intersection(right),
                    _ => left.difference(right),
                };
                combined.map_err(|e| self.wrap(start, e))
            }
            "" => Err(self.error("expected a region")),
            other => Err(Error::Parse {
                position: start,
                message: format!("unknown region keyword `{other}`"),
            }),
        }
    }

    fn wrap(&self, position: usize, err: Error) -> Error {
        Error::Parse {
            position,
            message: err.to_string(),
        }
    }

    /// A comma-separated list of reals. A comma not followed by a number
    /// belongs to the enclosing combinator and is left unconsumed.
    fn reals(&mut self) -> Result<Vec<f64>> {
        let mut out = vec![self.real()?];
        loop {
            let save = self.pos;
            if !self.eat(",") {
                break;
            }
            self.skip_ws();
            if self.number_len() == 0 {
                self.pos = save;
                break;
            }
            out.push(self.real()?);
        }
        Ok(out)
    }

    fn number_len(&self) -> usize {
        let b = self.rest().as_bytes();
        let mut i = 0;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let digits_start = i;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
            i += 1;
        }
        if i == digits_start {
            return 0;
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            let exp_start = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j > exp_start {
                i = j;
            }
        }
        i
    }

    fn real(&mut self) -> Result<f64> {
        self.skip_ws();
        let len = self.number_len();
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        let text = &self.rest()[..len];
        let v: f64 = text
            .parse()
            .map_err(|_| self.error(format!("malformed number `{text}`")))?;
        self.pos += len;
        Ok(v)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[f64]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Box(b) => {
                f.write_str("box:")?;
                write_list(f, b.lo())?;
                f.write_str(";")?;
                write_list(f, b.hi())
            }
            Expr::Ball(b) => {
                f.write_str("ball:")?;
                write_list(f, b.center())?;
                write!(f, ";{}", b.radius())
            }
            Expr::Union(l, r) => write!(f, "union({l}, {r})"),
            Expr::Intersection(l, r) => write!(f, "inter({l}, {r})"),
            Expr::Difference(l, r) => write!(f, "diff({l}, {r})"),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr().fmt(f)
    }
}

impl std::str::FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_region(s)
    }
}
