//! Reader for the line-based system format.
//!
//! ```text
//! # comment
//! dim 2
//! -2*x2 <= 0~ + 0~*x1
//! x1 <= 3~*x2
//! ```

use thiserror::Error;

use crate::germ::{int, Germ};
use crate::system::{MixedInequality, MixedSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    col0: usize,
}

enum Coef {
    NegInf,
    PosInf,
    Int(i64),
    UnderInt(i64),
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.col0 + self.pos + 1, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let neg = rest.starts_with('-');
        let digits = rest[neg as usize..].chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.err("expected a number"));
        }
        let len = neg as usize + digits;
        let value = rest[..len].parse::<i64>().map_err(|_| self.err("number out of range"))?;
        self.pos += len;
        if self.rest().starts_with(['/', '.']) {
            return Err(self.err("non-integer coefficient"));
        }
        Ok(value)
    }

    fn variable(&mut self, dim: usize) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if !self.eat("x") {
            return Err(self.err("expected a variable `x<k>`"));
        }
        let digits = self.rest().chars().take_while(char::is_ascii_digit).count();
        let k: usize = self.rest()[..digits].parse().map_err(|_| {
            self.pos = start;
            self.err("expected a variable `x<k>`")
        })?;
        if k == 0 || k > dim {
            self.pos = start;
            return Err(self.err(format!("variable x{k} out of range 1..{dim}")));
        }
        self.pos += digits;
        Ok(k - 1)
    }

    fn coef(&mut self) -> Result<Coef, ParseError> {
        if self.eat("-oo") {
            return Ok(Coef::NegInf);
        }
        if self.eat("+oo") {
            return Ok(Coef::PosInf);
        }
        let v = self.integer()?;
        if self.rest().starts_with('~') {
            self.pos += 1;
            Ok(Coef::UnderInt(v))
        } else {
            Ok(Coef::Int(v))
        }
    }

    /// Parses `term (+ term)*` and returns `(constant, per-variable coefficient)` joined.
    fn side(&mut self, dim: usize, left: bool) -> Result<(Germ, Vec<Germ>), ParseError> {
        let mut constant = Germ::NegInf;
        let mut coeffs = vec![Germ::NegInf; dim];
        loop {
            self.skip_ws();
            let term_start = self.pos;
            let (coef, var) = if self.rest().starts_with('x') {
                (Germ::one(), Some(self.variable(dim)?))
            } else {
                let c = self.coef()?;
                let g = match c {
                    Coef::NegInf => Germ::NegInf,
                    Coef::PosInf => Germ::PosInf,
                    Coef::Int(v) => Germ::Plain(int(v)),
                    Coef::UnderInt(v) => Germ::Under(int(v)),
                };
                if left && matches!(g, Germ::PosInf | Germ::Under(_)) {
                    self.pos = term_start;
                    return Err(self.err("left-hand side coefficients must be integers or -oo"));
                }
                let var = if self.eat("*") { Some(self.variable(dim)?) } else { None };
                (g, var)
            };
            match var {
                Some(j) => coeffs[j] = coeffs[j] + coef,
                None => constant = constant + coef,
            }
            self.skip_ws();
            if self.rest().starts_with("+oo") || !self.eat("+") {
                break;
            }
        }
        Ok((constant, coeffs))
    }

    fn inequality(&mut self, dim: usize) -> Result<MixedInequality, ParseError> {
        let (lc, lv) = self.side(dim, true)?;
        if !self.eat("<=") {
            return Err(self.err("expected `<=`"));
        }
        let (rc, rv) = self.side(dim, false)?;
        if !self.at_end() {
            return Err(self.err("unexpected trailing input"));
        }
        let to_mp = |g: Germ| g.as_maxplus().expect("left side already validated");
        Ok(MixedInequality::new(lv.into_iter().map(to_mp).collect(), to_mp(lc), rv, rc))
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(code, _)| code)
}

/// Parses a single inequality over `dim` variables (line 1).
pub fn parse_inequality(text: &str, dim: usize) -> Result<MixedInequality, ParseError> {
    let mut cur = Cursor { text: strip_comment(text), pos: 0, line: 1, col0: 0 };
    cur.inequality(dim)
}

/// Parses a whole system file.
pub fn parse_system(text: &str) -> Result<MixedSystem, ParseError> {
    let mut sys: Option<MixedSystem> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let mut cur = Cursor { text: line, pos: 0, line: idx + 1, col0: 0 };
        if cur.at_end() {
            continue;
        }
        match &mut sys {
            None => {
                if !cur.eat("dim") {
                    return Err(cur.err("expected header `dim <n>`"));
                }
                let n = cur.integer()?;
                if n < 0 {
                    return Err(cur.err("dimension must be nonnegative"));
                }
                if !cur.at_end() {
                    return Err(cur.err("unexpected trailing input"));
                }
                sys = Some(MixedSystem::new(n as usize));
            }
            Some(s) => {
                let row = cur.inequality(s.dim())?;
                s.push(row).expect("row built with the system dimension");
            }
        }
    }
    sys.ok_or(ParseError { line: 1, column: 1, message: "missing header `dim <n>`".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::MaxPlus;

    #[test]
    fn parses_running_example_rows() {
        let row = parse_inequality("-2*x2 <= 0~ + 0~*x1", 2).unwrap();
        assert_eq!(row.lhs(), &[MaxPlus::NegInf, MaxPlus::int(-2)]);
        assert_eq!(row.rhs_const(), Germ::under(0));
        assert_eq!(row.rhs()[0], Germ::under(0));

        let row = parse_inequality("x1 <= 3~*x2", 2).unwrap();
        assert_eq!(row.lhs()[0], MaxPlus::int(0));
        assert_eq!(row.rhs()[1], Germ::under(3));
    }

    #[test]
    fn header_only_gives_empty_system() {
        let sys = parse_system("# nothing\ndim 3\n").unwrap();
        assert_eq!(sys.dim(), 3);
        assert!(sys.is_empty_syntax());
    }

    #[test]
    fn pos_inf_terms() {
        let row = parse_inequality("0 <= +oo*x1 + +oo", 1).unwrap();
        assert_eq!(row.rhs_const(), Germ::PosInf);
        assert_eq!(row.rhs()[0], Germ::PosInf);
        let row = parse_inequality("0 <= +oo*x1", 1).unwrap();
        assert_eq!(row.rhs()[0], Germ::PosInf);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_system("dim 2\nx1 <= 0\n2~*x1 <= 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 1));
        let e = parse_system("dim 2\n+oo <= x1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_system("dim 2\nx1 <= 1/2\n").unwrap_err();
        assert!(e.message.contains("non-integer"));
        let e = parse_system("dim 2\nx3 <= 0\n").unwrap_err();
        assert!(e.message.contains("out of range"));
        assert!(parse_system("x1 <= 0\n").is_err());
        assert!(parse_system("dim 1\nx1 <= 0 junk\n").is_err());
        assert!(parse_system("dim 1\nx1 0\n").is_err());
    }
}
