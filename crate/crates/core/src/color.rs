use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A leg label `i+` or `i-`. Index 0 is reserved for internal placeholder legs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color {
    pub index: u32,
    pub sign: Sign,
}

impl Color {
    pub const PLACEHOLDER: Color = Color { index: 0, sign: Sign::Plus };

    pub fn new(index: u32, sign: Sign) -> Color {
        Color { index, sign }
    }
    pub fn plus(index: u32) -> Color {
        Color::new(index, Sign::Plus)
    }
    pub fn minus(index: u32) -> Color {
        Color::new(index, Sign::Minus)
    }
    pub fn star(self) -> Color {
        Color::new(self.index, self.sign.flip())
    }
    pub fn with_sign(self, sign: Sign) -> Color {
        Color::new(self.index, sign)
    }
    pub fn is_plus(self) -> bool {
        self.sign == Sign::Plus
    }
    pub(crate) fn code(self) -> u32 {
        2 * self.index + if self.is_plus() { 0 } else { 1 }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.is_plus() { '+' } else { '-' };
        write!(f, "{}{}", self.index, s)
    }
}

impl FromStr for Color {
    type Err = Error;
    fn from_str(s: &str) -> Result<Color, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad color `{s}`"));
        let (num, last) = s.split_at(s.len().checked_sub(1).ok_or_else(bad)?);
        let sign = match last {
            "+" => Sign::Plus,
            "-" | "−" => Sign::Minus,
            _ => return Err(bad()),
        };
        let index: u32 = num.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Color::new(index, sign))
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Color, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_is_involution() {
        for i in 1..4 {
            for c in [Color::plus(i), Color::minus(i)] {
                assert_ne!(c.star(), c);
                assert_eq!(c.star().star(), c);
            }
        }
    }

    #[test]
    fn parse_roundtrip() {
        let c: Color = "12-".parse().unwrap();
        assert_eq!(c, Color::minus(12));
        assert_eq!(c.to_string().parse::<Color>().unwrap(), c);
        assert!("0+".parse::<Color>().is_err());
        assert!("3".parse::<Color>().is_err());
    }
}
