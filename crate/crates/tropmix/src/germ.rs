//! Scalars of the max-plus semiring and of the semiring of affine germs.
//!
//! A [`Germ`] is either `-oo`, a real `α`, the perturbed real `α - ε`
//! (written `α~`), or `+oo`. Germs are compared exactly; the valuation at a
//! concrete `ε` is only used by tests and by the game construction.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

/// Exact rational used for all moduli and coordinates.
pub type Rat = Rational64;

/// An element of `ℝ ∪ {−∞}`. Derived order puts `NegInf` below every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxPlus {
    NegInf,
    Fin(Rat),
}

/// An element of `ℝ ∪ {−∞, +∞}`, the codomain of [`Germ::valuate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    NegInf,
    Fin(Rat),
    PosInf,
}

/// An element of the germ semiring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Germ {
    NegInf,
    Plain(Rat),
    /// `α - ε` for an infinitesimal `ε > 0`.
    Under(Rat),
    PosInf,
}

/// Strictly positive rational at which germs are valuated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epsilon(Rat);

impl Epsilon {
    pub fn new(value: Rat) -> Option<Self> {
        (value > Rat::zero()).then_some(Epsilon(value))
    }

    pub fn value(self) -> Rat {
        self.0
    }
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(v)
}

impl MaxPlus {
    pub const ZERO: MaxPlus = MaxPlus::NegInf;

    pub fn one() -> Self {
        MaxPlus::Fin(Rat::zero())
    }

    pub fn int(v: i64) -> Self {
        MaxPlus::Fin(int(v))
    }

    pub fn is_bottom(self) -> bool {
        self == MaxPlus::NegInf
    }

    pub fn finite(self) -> Option<Rat> {
        match self {
            MaxPlus::Fin(v) => Some(v),
            MaxPlus::NegInf => None,
        }
    }

    /// Tropical sum.
    pub fn join(self, other: Self) -> Self {
        self.max(other)
    }

    /// Tropical product.
    pub fn times(self, other: Self) -> Self {
        match (self, other) {
            (MaxPlus::Fin(a), MaxPlus::Fin(b)) => MaxPlus::Fin(a + b),
            _ => MaxPlus::NegInf,
        }
    }

    /// Multiplicative inverse of a finite scalar.
    pub fn inverse(self) -> Option<Self> {
        self.finite().map(|v| MaxPlus::Fin(-v))
    }
}

impl From<MaxPlus> for Germ {
    fn from(x: MaxPlus) -> Self {
        match x {
            MaxPlus::NegInf => Germ::NegInf,
            MaxPlus::Fin(v) => Germ::Plain(v),
        }
    }
}

impl Germ {
    pub fn one() -> Self {
        Germ::Plain(Rat::zero())
    }

    pub fn plain(v: i64) -> Self {
        Germ::Plain(int(v))
    }

    pub fn under(v: i64) -> Self {
        Germ::Under(int(v))
    }

    pub fn is_bottom(self) -> bool {
        self == Germ::NegInf
    }

    /// `|x|` as an extended scalar.
    pub fn modulus(self) -> Extended {
        match self {
            Germ::NegInf => Extended::NegInf,
            Germ::Plain(v) | Germ::Under(v) => Extended::Fin(v),
            Germ::PosInf => Extended::PosInf,
        }
    }

    /// Finite modulus of a `Plain` or `Under` germ.
    pub fn finite_modulus(self) -> Option<Rat> {
        match self {
            Germ::Plain(v) | Germ::Under(v) => Some(v),
            _ => None,
        }
    }

    /// The germ viewed as a max-plus scalar, if it is one.
    pub fn as_maxplus(self) -> Option<MaxPlus> {
        match self {
            Germ::NegInf => Some(MaxPlus::NegInf),
            Germ::Plain(v) => Some(MaxPlus::Fin(v)),
            _ => None,
        }
    }

    // Position in the total order: class rank, then modulus, then Under below Plain.
    fn key(self) -> (u8, Rat, u8) {
        match self {
            Germ::NegInf => (0, Rat::zero(), 0),
            Germ::Under(v) => (1, v, 0),
            Germ::Plain(v) => (1, v, 1),
            Germ::PosInf => (2, Rat::zero(), 0),
        }
    }

    pub fn leq(self, other: Self) -> bool {
        self <= other
    }

    pub fn valuate(self, eps: Epsilon) -> Extended {
        match self {
            Germ::NegInf => Extended::NegInf,
            Germ::Plain(v) => Extended::Fin(v),
            Germ::Under(v) => Extended::Fin(v - eps.value()),
            Germ::PosInf => Extended::PosInf,
        }
    }

    /// Greatest `z` with `z ⊗ x ≤ self`.
    pub fn residual(self, x: Germ) -> Germ {
        use Germ::*;
        match (self, x) {
            (_, NegInf) => PosInf,
            (PosInf, PosInf) => PosInf,
            (_, PosInf) => NegInf,
            (NegInf, _) => NegInf,
            (PosInf, _) => PosInf,
            (Under(y), Plain(x)) => Under(y - x),
            (Plain(y) | Under(y), Plain(x) | Under(x)) => Plain(y - x),
        }
    }
}

impl PartialOrd for Germ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Germ {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Tropical sum: the larger germ.
impl Add for Germ {
    type Output = Germ;

    fn add(self, rhs: Germ) -> Germ {
        self.max(rhs)
    }
}

/// Tropical product.
impl Mul for Germ {
    type Output = Germ;

    fn mul(self, rhs: Germ) -> Germ {
        use Germ::*;
        match (self, rhs) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Plain(a), Plain(b)) => Plain(a + b),
            (Plain(a) | Under(a), Plain(b) | Under(b)) => Under(a + b),
        }
    }
}

impl Mul<MaxPlus> for Germ {
    type Output = Germ;

    fn mul(self, rhs: MaxPlus) -> Germ {
        self * Germ::from(rhs)
    }
}

pub fn germ_leq(x: Germ, y: Germ) -> bool {
    x <= y
}

pub fn germ_add(x: Germ, y: Germ) -> Germ {
    x + y
}

pub fn germ_mul(x: Germ, y: Germ) -> Germ {
    x * y
}

pub fn valuate(x: Germ, eps: Epsilon) -> Extended {
    x.valuate(eps)
}

pub fn residual(y: Germ, x: Germ) -> Germ {
    y.residual(x)
}

fn fmt_rat(v: Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.is_integer() {
        write!(f, "{}", v.numer())
    } else {
        write!(f, "{}/{}", v.numer(), v.denom())
    }
}

impl fmt::Display for MaxPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxPlus::NegInf => f.write_str("-oo"),
            MaxPlus::Fin(v) => fmt_rat(*v, f),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-oo"),
            Extended::Fin(v) => fmt_rat(*v, f),
            Extended::PosInf => f.write_str("+oo"),
        }
    }
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Germ::NegInf => f.write_str("-oo"),
            Germ::Plain(v) => fmt_rat(*v, f),
            Germ::Under(v) => {
                fmt_rat(*v, f)?;
                f.write_str("~")
            }
            Germ::PosInf => f.write_str("+oo"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scalar `{0}`")]
pub struct ScalarParseError(pub String);

pub(crate) fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<i64>().ok()?),
        None => (s, 1),
    };
    let unsigned = num.strip_prefix('+');
    let num = unsigned.unwrap_or(num);
    if den <= 0 || num.is_empty() || num.starts_with(['+', ' ']) || (unsigned.is_some() && num.starts_with('-')) {
        return None;
    }
    Some(Rat::new(num.parse::<i64>().ok()?, den))
}

impl FromStr for MaxPlus {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-oo" => Ok(MaxPlus::NegInf),
            t => parse_rat(t)
                .map(MaxPlus::Fin)
                .ok_or_else(|| ScalarParseError(s.to_string())),
        }
    }
}

impl FromStr for Germ {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "-oo" => return Ok(Germ::NegInf),
            "+oo" => return Ok(Germ::PosInf),
            _ => {}
        }
        let err = || ScalarParseError(s.to_string());
        match t.strip_suffix('~') {
            Some(m) => parse_rat(m).map(Germ::Under).ok_or_else(err),
            None => parse_rat(t).map(Germ::Plain).ok_or_else(err),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_germs(range: std::ops::RangeInclusive<i64>) -> Vec<Germ> {
        let mut out = vec![Germ::NegInf, Germ::PosInf];
        for m in range {
            out.push(Germ::plain(m));
            out.push(Germ::under(m));
        }
        out
    }

    #[test]
    fn order_examples() {
        assert!(!germ_leq(Germ::plain(2), Germ::under(2)));
        assert!(germ_leq(Germ::under(2), Germ::plain(2)));
        assert!(germ_leq(Germ::plain(1), Germ::under(2)));
        assert!(germ_leq(Germ::NegInf, Germ::NegInf));
    }

    // The two-case modulus rule, written out independently of `Ord`.
    fn modulus_rule(x: Germ, y: Germ) -> bool {
        let strict = !matches!(x, Germ::Under(_)) && matches!(y, Germ::Under(_));
        if strict {
            x.modulus() < y.modulus()
        } else {
            x.modulus() <= y.modulus()
        }
    }

    #[test]
    fn order_matches_modulus_rule() {
        let gs = all_germs(-3..=3);
        for &x in &gs {
            for &y in &gs {
                assert_eq!(germ_leq(x, y), modulus_rule(x, y), "{x} <= {y}");
            }
        }
    }

    #[test]
    fn add_and_mul_examples() {
        assert_eq!(germ_add(Germ::plain(2), Germ::under(2)), Germ::plain(2));
        assert_eq!(germ_add(Germ::plain(1), Germ::under(2)), Germ::under(2));
        assert_eq!(germ_add(Germ::NegInf, Germ::under(0)), Germ::under(0));
        assert_eq!(germ_mul(Germ::plain(1), Germ::under(2)), Germ::under(3));
        assert_eq!(germ_mul(Germ::PosInf, Germ::NegInf), Germ::NegInf);
        for g in all_germs(-3..=3) {
            assert_eq!(germ_mul(Germ::one(), g), g);
        }
    }

    #[test]
    fn valuation_examples() {
        let quarter = Epsilon::new(Rat::new(1, 4)).unwrap();
        let half = Epsilon::new(Rat::new(1, 2)).unwrap();
        assert_eq!(valuate(Germ::under(2), quarter), Extended::Fin(Rat::new(7, 4)));
        assert_eq!(valuate(Germ::plain(2), quarter), Extended::Fin(int(2)));
        assert_eq!(valuate(Germ::NegInf, half), Extended::NegInf);
        assert!(Epsilon::new(Rat::zero()).is_none());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(residual(Germ::under(3), Germ::plain(1)), Germ::under(2));
        assert_eq!(residual(Germ::plain(3), Germ::under(2)), Germ::plain(1));
        assert_eq!(residual(Germ::NegInf, Germ::NegInf), Germ::PosInf);
    }

    #[test]
    fn residual_is_greatest_solution() {
        // Candidates cover every class at every modulus that can matter.
        let gs = all_germs(-3..=3);
        let candidates = all_germs(-7..=7);
        for &y in &gs {
            for &x in &gs {
                let r = residual(y, x);
                assert!(r * x <= y, "{r} * {x} <= {y}");
                let best = candidates.iter().copied().filter(|&z| z * x <= y).max();
                if let Some(best) = best {
                    assert!(best <= r, "residual({y}, {x}) = {r}, but {best} also works");
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        for g in all_germs(-3..=3) {
            assert_eq!(g.to_string().parse::<Germ>().unwrap(), g);
        }
        let g = Germ::Under(Rat::new(-5, 2));
        assert_eq!(g.to_string(), "-5/2~");
        assert_eq!(g.to_string().parse::<Germ>().unwrap(), g);
        assert_eq!("3~".parse::<Germ>().unwrap(), Germ::under(3));
        assert!("3~~".parse::<Germ>().is_err());
        assert!("+-3".parse::<Germ>().is_err());
        assert!("+oo".parse::<MaxPlus>().is_err());
    }
}
