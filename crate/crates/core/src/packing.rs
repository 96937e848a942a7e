//! Fixed-width containers for order-10 Latin squares.
//!
//! [`Packed256`] keeps 76 cells: rows 0–3 columns 0–8, then rows 4–8
//! columns 0–7. Digits are grouped in threes, each group `d0·100 + d1·10 + d2`
//! written as a 10-bit field (25 groups), then the 76th digit in 4 bits and
//! two zero bits. Bits are MSB-first throughout.
//!
//! [`Packed324`] keeps the 9×9 upper-left subgrid, one nibble per cell, and
//! zero pads 324 bits up to 48 bytes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::latin::{LatinSquare, PartialLatinSquare, Triple};

pub const ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackingError {
    #[error("packing needs an order-10 square, got order {0}")]
    InvalidOrder(usize),
    #[error("corrupt packing: {0}")]
    CorruptPacking(String),
    #[error("row {row} cannot be disambiguated from column 8")]
    NotRecoverable { row: usize },
}

fn corrupt(msg: impl Into<String>) -> PackingError {
    PackingError::CorruptPacking(msg.into())
}

struct BitWriter<'a> {
    out: &'a mut [u8],
    pos: usize,
}

impl BitWriter<'_> {
    fn put(&mut self, value: u32, bits: u32) {
        for i in (0..bits).rev() {
            if value >> i & 1 == 1 {
                self.out[self.pos / 8] |= 0x80 >> (self.pos % 8);
            }
            self.pos += 1;
        }
    }
}

struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl BitReader<'_> {
    fn take(&mut self, bits: u32) -> u32 {
        let mut v = 0;
        for _ in 0..bits {
            let bit = self.data[self.pos / 8] >> (7 - self.pos % 8) & 1;
            v = v << 1 | u32::from(bit);
            self.pos += 1;
        }
        v
    }

    fn rest_is_zero(&self) -> bool {
        (self.pos..self.data.len() * 8).all(|p| self.data[p / 8] >> (7 - p % 8) & 1 == 0)
    }
}

/// Cells retained by the 256-bit layout, in packing order.
fn retained256() -> impl Iterator<Item = (usize, usize)> {
    let top = (0..4).flat_map(|r| (0..9).map(move |c| (r, c)));
    let mid = (4..9).flat_map(|r| (0..8).map(move |c| (r, c)));
    top.chain(mid)
}

fn check_order(l: &LatinSquare) -> Result<(), PackingError> {
    if l.order() != ORDER {
        return Err(PackingError::InvalidOrder(l.order()));
    }
    Ok(())
}

macro_rules! packed_type {
    ($name:ident, $len:expr) => {
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        pub struct $name([u8; $len]);

        impl $name {
            pub const LEN: usize = $len;

            pub fn from_bytes(bytes: &[u8]) -> Result<Self, PackingError> {
                let arr: [u8; $len] = bytes.try_into().map_err(|_| {
                    corrupt(format!("expected {} bytes, got {}", $len, bytes.len()))
                })?;
                Ok(Self(arr))
            }

            pub fn as_bytes(&self) -> &[u8; $len] {
                &self.0
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.to_hex())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }

        impl FromStr for $name {
            type Err = PackingError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let bytes = hex::decode(s.trim()).map_err(|e| corrupt(format!("bad hex: {e}")))?;
                Self::from_bytes(&bytes)
            }
        }
    };
}

packed_type!(Packed256, 32);
packed_type!(Packed324, 48);

pub fn pack256(l: &LatinSquare) -> Result<Packed256, PackingError> {
    check_order(l)?;
    let digits: Vec<u32> = retained256().map(|(r, c)| l.get(r, c) as u32).collect();
    let mut out = [0u8; 32];
    let mut w = BitWriter { out: &mut out, pos: 0 };
    for group in digits[..75].chunks(3) {
        w.put(group[0] * 100 + group[1] * 10 + group[2], 10);
    }
    w.put(digits[75], 4);
    Ok(Packed256(out))
}

/// Decodes the 76 retained cells and reconstructs the rest.
///
/// Rows 0–3 lack only column 9. Rows 4–8, in ascending order, lack columns 8
/// and 9: of the two missing symbols, the one already present in column 8
/// must go to column 9. Row 9 is then forced column by column.
pub fn unpack256(b: &Packed256) -> Result<LatinSquare, PackingError> {
    let mut r = BitReader { data: &b.0, pos: 0 };
    let mut digits = Vec::with_capacity(76);
    for _ in 0..25 {
        let v = r.take(10);
        if v > 999 {
            return Err(corrupt(format!("10-bit group value {v} exceeds 999")));
        }
        digits.extend([v / 100, v / 10 % 10, v % 10]);
    }
    let last = r.take(4);
    if last > 9 {
        return Err(corrupt(format!("final digit {last} exceeds 9")));
    }
    digits.push(last);
    if !r.rest_is_zero() {
        return Err(corrupt("trailing bits are not zero"));
    }

    let mut p = PartialLatinSquare::empty(ORDER).expect("order 10 is valid");
    for ((row, col), d) in retained256().zip(digits) {
        p.insert(Triple::new(row, col, d as usize))
            .map_err(|e| corrupt(e.to_string()))?;
    }

    for row in 0..4 {
        let sym = single_missing(row_missing(&p, row))?;
        place(&mut p, Triple::new(row, 9, sym))?;
    }
    for row in 4..9 {
        let missing = row_missing(&p, row);
        if missing.count_ones() != 2 {
            return Err(corrupt(format!("row {row} is missing {} symbols", missing.count_ones())));
        }
        let a = missing.trailing_zeros() as usize;
        let b = (missing & (missing - 1)).trailing_zeros() as usize;
        let in_col8 = |s: usize| (0..row).any(|k| p.get(k, 8) == Some(s));
        let (at8, at9) = match (in_col8(a), in_col8(b)) {
            (true, false) => (b, a),
            (false, true) => (a, b),
            (false, false) => return Err(PackingError::NotRecoverable { row }),
            (true, true) => {
                return Err(corrupt(format!(
                    "both missing symbols of row {row} already sit in column 8"
                )))
            }
        };
        place(&mut p, Triple::new(row, 8, at8))?;
        place(&mut p, Triple::new(row, 9, at9))?;
    }
    fill_last_row(&mut p)?;
    p.to_square().ok_or_else(|| corrupt("reconstruction left empty cells"))
}

/// Whether `l` survives a 256-bit round trip.
pub fn is_recoverable256(l: &LatinSquare) -> Result<bool, PackingError> {
    let packed = pack256(l)?;
    Ok(unpack256(&packed).is_ok_and(|back| &back == l))
}

pub fn pack324(l: &LatinSquare) -> Result<Packed324, PackingError> {
    check_order(l)?;
    let mut out = [0u8; 48];
    let mut w = BitWriter { out: &mut out, pos: 0 };
    for row in 0..9 {
        for col in 0..9 {
            w.put(l.get(row, col) as u32, 4);
        }
    }
    Ok(Packed324(out))
}

pub fn unpack324(b: &Packed324) -> Result<LatinSquare, PackingError> {
    let mut r = BitReader { data: &b.0, pos: 0 };
    let mut p = PartialLatinSquare::empty(ORDER).expect("order 10 is valid");
    for row in 0..9 {
        for col in 0..9 {
            let v = r.take(4);
            if v > 9 {
                return Err(corrupt(format!("nibble {v:#x} at ({row}, {col}) exceeds 9")));
            }
            p.insert(Triple::new(row, col, v as usize))
                .map_err(|e| corrupt(e.to_string()))?;
        }
    }
    if !r.rest_is_zero() {
        return Err(corrupt("padding bits are not zero"));
    }
    for row in 0..9 {
        let sym = single_missing(row_missing(&p, row))?;
        place(&mut p, Triple::new(row, 9, sym))?;
    }
    fill_last_row(&mut p)?;
    p.to_square().ok_or_else(|| corrupt("reconstruction left empty cells"))
}

fn row_missing(p: &PartialLatinSquare, row: usize) -> u64 {
    (0..ORDER)
        .filter_map(|c| p.get(row, c))
        .fold((1u64 << ORDER) - 1, |m, s| m & !(1 << s))
}

fn col_missing(p: &PartialLatinSquare, col: usize) -> u64 {
    (0..ORDER)
        .filter_map(|r| p.get(r, col))
        .fold((1u64 << ORDER) - 1, |m, s| m & !(1 << s))
}

fn single_missing(mask: u64) -> Result<usize, PackingError> {
    if mask.count_ones() != 1 {
        return Err(corrupt(format!("expected one missing symbol, found {}", mask.count_ones())));
    }
    Ok(mask.trailing_zeros() as usize)
}

fn place(p: &mut PartialLatinSquare, t: Triple) -> Result<(), PackingError> {
    p.insert(t).map_err(|e| corrupt(e.to_string()))
}

fn fill_last_row(p: &mut PartialLatinSquare) -> Result<(), PackingError> {
    for col in 0..ORDER {
        let sym = single_missing(col_missing(p, col))?;
        place(p, Triple::new(9, col, sym))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recoverable_sample() -> LatinSquare {
        (0..)
            .map(|seed| LatinSquare::random(10, seed).unwrap())
            .find(|l| is_recoverable256(l).unwrap())
            .unwrap()
    }

    #[test]
    fn pack256_first_group_of_cayley() {
        let packed = pack256(&LatinSquare::cayley(10).unwrap()).unwrap();
        // 0b0000001100 -> 00000011 00......
        assert_eq!(packed.as_bytes()[0], 0x03);
        assert_eq!(packed.as_bytes()[1] >> 6, 0);
        assert_eq!(packed.as_bytes()[31] & 0b11, 0);
    }

    #[test]
    fn cayley_fails_the_column8_rule() {
        // row 4 misses {2, 3}; column 8 above holds {8, 9, 0, 1}
        let l = LatinSquare::cayley(10).unwrap();
        assert!(!is_recoverable256(&l).unwrap());
        let err = unpack256(&pack256(&l).unwrap()).unwrap_err();
        assert_eq!(err, PackingError::NotRecoverable { row: 4 });
    }

    #[test]
    fn round_trip_recoverable() {
        let l = recoverable_sample();
        assert_eq!(unpack256(&pack256(&l).unwrap()).unwrap(), l);
    }

    #[test]
    fn all_zero_256_is_corrupt() {
        let zero = Packed256::from_bytes(&[0; 32]).unwrap();
        assert!(matches!(unpack256(&zero), Err(PackingError::CorruptPacking(_))));
    }

    #[test]
    fn group_over_999_is_corrupt() {
        let mut bytes = *pack256(&recoverable_sample()).unwrap().as_bytes();
        bytes[0] = 0xff;
        bytes[1] |= 0xc0;
        let err = unpack256(&Packed256(bytes)).unwrap_err();
        assert!(matches!(err, PackingError::CorruptPacking(_)));
    }

    #[test]
    fn trailing_bits_256_must_be_zero() {
        let mut bytes = *pack256(&recoverable_sample()).unwrap().as_bytes();
        bytes[31] |= 1;
        assert!(matches!(unpack256(&Packed256(bytes)), Err(PackingError::CorruptPacking(_))));
    }

    #[test]
    fn wrong_order_rejected() {
        let nine = LatinSquare::cayley(9).unwrap();
        assert_eq!(pack256(&nine), Err(PackingError::InvalidOrder(9)));
        let eleven = LatinSquare::cayley(11).unwrap();
        assert_eq!(pack324(&eleven), Err(PackingError::InvalidOrder(11)));
        assert_eq!(is_recoverable256(&nine), Err(PackingError::InvalidOrder(9)));
    }

    #[test]
    fn pack324_examples() {
        let l = LatinSquare::cayley(10).unwrap();
        let packed = pack324(&l).unwrap();
        assert_eq!(packed.as_bytes()[0], 0x01);
        assert_eq!(unpack324(&packed).unwrap(), l);

        let mut bytes = *packed.as_bytes();
        bytes[0] = 0xf1;
        assert!(matches!(unpack324(&Packed324(bytes)), Err(PackingError::CorruptPacking(_))));

        let mut bytes = *packed.as_bytes();
        bytes[47] = 1;
        assert!(matches!(unpack324(&Packed324(bytes)), Err(PackingError::CorruptPacking(_))));
        // low nibble of byte 40 is the first padding nibble
        let mut bytes = *packed.as_bytes();
        bytes[40] |= 0x01;
        assert!(matches!(unpack324(&Packed324(bytes)), Err(PackingError::CorruptPacking(_))));
    }

    #[test]
    fn hex_round_trip() {
        let packed = pack324(&LatinSquare::random(10, 3).unwrap()).unwrap();
        assert_eq!(packed.to_hex().parse::<Packed324>().unwrap(), packed);
        assert!("abc".parse::<Packed256>().is_err());
        assert!("00".parse::<Packed256>().is_err());
    }
}
