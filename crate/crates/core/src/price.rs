//! Fixed-point prices.
//!
//! Prices are held as signed integers in units of 10⁻⁹ currency. Decimal
//! strings from tick files parse exactly, tick sizes like 1/64 are exact, and
//! mid-prices and impacts can be computed without floating point drift.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of fixed-point units per currency unit.
pub const PRICE_SCALE: i64 = 1_000_000_000;
const MAX_DECIMALS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PriceError {
    #[error("empty price")]
    Empty,
    #[error("invalid character in price `{0}`")]
    InvalidDigit(String),
    #[error("too many decimals in price `{0}` (max 9)")]
    TooPrecise(String),
    #[error("price `{0}` out of range")]
    Overflow(String),
}

/// A price in units of 10⁻⁹ currency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Price(pub i64);

impl Price {
    pub const ZERO: Price = Price(0);

    pub const fn from_units(units: i64) -> Self {
        Price(units)
    }

    pub const fn units(self) -> i64 {
        self.0
    }

    /// Nearest fixed-point value to a floating point amount.
    pub fn from_f64(value: f64) -> Self {
        Price((value * PRICE_SCALE as f64).round() as i64)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / PRICE_SCALE as f64
    }

    /// Parses a plain decimal string (`-12.345`, `100`, `.5`) exactly.
    pub fn parse_bytes(s: &[u8]) -> Result<Price, PriceError> {
        let lossy = || String::from_utf8_lossy(s).into_owned();
        let (negative, digits) = match s.first() {
            None => return Err(PriceError::Empty),
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            Some(_) => (false, s),
        };
        if digits.is_empty() {
            return Err(PriceError::Empty);
        }
        let mut int_part: i64 = 0;
        let mut frac_part: i64 = 0;
        let mut frac_digits = 0usize;
        let mut seen_dot = false;
        let mut seen_digit = false;
        for &b in digits {
            match b {
                b'0'..=b'9' => {
                    seen_digit = true;
                    let d = (b - b'0') as i64;
                    if seen_dot {
                        if frac_digits == MAX_DECIMALS {
                            if d != 0 {
                                return Err(PriceError::TooPrecise(lossy()));
                            }
                            continue;
                        }
                        frac_part = frac_part * 10 + d;
                        frac_digits += 1;
                    } else {
                        int_part = int_part
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(d))
                            .ok_or_else(|| PriceError::Overflow(lossy()))?;
                    }
                }
                b'.' if !seen_dot => seen_dot = true,
                _ => return Err(PriceError::InvalidDigit(lossy())),
            }
        }
        if !seen_digit {
            return Err(PriceError::InvalidDigit(lossy()));
        }
        for _ in frac_digits..MAX_DECIMALS {
            frac_part *= 10;
        }
        let units = int_part
            .checked_mul(PRICE_SCALE)
            .and_then(|v| v.checked_add(frac_part))
            .ok_or_else(|| PriceError::Overflow(lossy()))?;
        Ok(Price(if negative { -units } else { units }))
    }

    /// Number of decimals needed to print this value without loss.
    pub fn decimals(self) -> usize {
        let mut frac = (self.0 % PRICE_SCALE).abs();
        if frac == 0 {
            return 0;
        }
        let mut d = MAX_DECIMALS;
        while frac % 10 == 0 {
            frac /= 10;
            d -= 1;
        }
        d
    }

    /// Decimal representation with at least `min_decimals` fractional digits.
    pub fn format_with(self, min_decimals: usize, out: &mut String) {
        use std::fmt::Write;
        let decimals = self.decimals().max(min_decimals.min(MAX_DECIMALS));
        if self.0 < 0 {
            out.push('-');
        }
        let abs = self.0.unsigned_abs();
        let int_part = abs / PRICE_SCALE as u64;
        let frac = abs % PRICE_SCALE as u64;
        let _ = write!(out, "{int_part}");
        if decimals > 0 {
            let scaled = frac / 10u64.pow((MAX_DECIMALS - decimals) as u32);
            let _ = write!(out, ".{scaled:0width$}", width = decimals);
        }
    }

    /// Whether the price is an integer multiple of `tick`.
    pub fn is_multiple_of(self, tick: Price) -> bool {
        tick.0 != 0 && self.0 % tick.0 == 0
    }
}

impl FromStr for Price {
    type Err = PriceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Price::parse_bytes(s.trim().as_bytes())
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.format_with(0, &mut s);
        f.write_str(&s)
    }
}
