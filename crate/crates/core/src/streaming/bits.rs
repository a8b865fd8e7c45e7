use std::fmt::Write as _;

use crate::{Error, Result};

/// A memory configuration `s ∈ {0,1}^b`.
///
/// Bits are addressed from 0; bit `i` lives in byte `i / 8` at mask
/// `0x80 >> (i % 8)`, so hex dumps read most-significant-bit first. Bits past
/// the capacity are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitState {
    capacity_bits: usize,
    payload: Vec<u8>,
}

impl BitState {
    /// The all-zero configuration `s₀`.
    pub fn zeroed(capacity_bits: usize) -> Self {
        BitState {
            capacity_bits,
            payload: vec![0; capacity_bits.div_ceil(8)],
        }
    }

    /// Rebuilds a state from raw bytes, rejecting wrong lengths and stray trailing bits.
    pub fn from_payload(capacity_bits: usize, payload: Vec<u8>) -> Result<Self> {
        let expected = capacity_bits.div_ceil(8);
        if payload.len() != expected {
            return Err(Error::MalformedState(format!(
                "payload of {} bytes for {capacity_bits} bits (expected {expected})",
                payload.len()
            )));
        }
        let spare = expected * 8 - capacity_bits;
        if spare > 0 {
            let mask = (1u8 << spare) - 1;
            if payload[expected - 1] & mask != 0 {
                return Err(Error::MalformedState("bits beyond capacity are set".into()));
            }
        }
        Ok(BitState { capacity_bits, payload })
    }

    pub fn capacity_bits(&self) -> usize {
        self.capacity_bits
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn into_payload(self) -> Vec<u8> {
        self.payload
    }

    fn check_range(&self, offset: usize, width: usize) -> Result<()> {
        let end = offset.saturating_add(width);
        if end > self.capacity_bits {
            return Err(Error::BudgetViolation {
                capacity_bits: self.capacity_bits,
                required_bits: end,
            });
        }
        Ok(())
    }

    pub fn get_bit(&self, i: usize) -> Result<bool> {
        self.check_range(i, 1)?;
        Ok(self.payload[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    pub fn set_bit(&mut self, i: usize, value: bool) -> Result<()> {
        self.check_range(i, 1)?;
        let mask = 0x80 >> (i % 8);
        if value {
            self.payload[i / 8] |= mask;
        } else {
            self.payload[i / 8] &= !mask;
        }
        Ok(())
    }

    /// Reads `width ≤ 64` bits starting at `offset`, most significant first.
    pub fn read_bits(&self, offset: usize, width: usize) -> Result<u64> {
        assert!(width <= 64, "at most 64 bits per read");
        self.check_range(offset, width)?;
        if offset.is_multiple_of(8) && width.is_multiple_of(8) {
            let start = offset / 8;
            return Ok(self.payload[start..start + width / 8]
                .iter()
                .fold(0u64, |acc, &b| (acc << 8) | b as u64));
        }
        let mut value = 0u64;
        for i in offset..offset + width {
            let bit = self.payload[i / 8] & (0x80 >> (i % 8)) != 0;
            value = (value << 1) | bit as u64;
        }
        Ok(value)
    }

    /// Writes the low `width ≤ 64` bits of `value` at `offset`.
    pub fn write_bits(&mut self, offset: usize, width: usize, value: u64) -> Result<()> {
        assert!(width <= 64, "at most 64 bits per write");
        self.check_range(offset, width)?;
        if width < 64 && value >> width != 0 {
            return Err(Error::InvalidParameter(format!("value {value} does not fit in {width} bits")));
        }
        if offset.is_multiple_of(8) && width.is_multiple_of(8) {
            let start = offset / 8;
            let n = width / 8;
            for (k, byte) in self.payload[start..start + n].iter_mut().enumerate() {
                *byte = (value >> (8 * (n - 1 - k))) as u8;
            }
            return Ok(());
        }
        for (k, i) in (offset..offset + width).enumerate() {
            let bit = (value >> (width - 1 - k)) & 1 == 1;
            let mask = 0x80 >> (i % 8);
            if bit {
                self.payload[i / 8] |= mask;
            } else {
                self.payload[i / 8] &= !mask;
            }
        }
        Ok(())
    }

    /// Lowercase hex of the payload, most-significant bit first within bytes.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.payload.len() * 2);
        for b in &self.payload {
            let _ = write!(s, "{b:02x}");
        }
        s
    }

    pub fn writer(&mut self) -> BitWriter<'_> {
        BitWriter { state: self, pos: 0 }
    }

    pub fn writer_at(&mut self, pos: usize) -> BitWriter<'_> {
        BitWriter { state: self, pos }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { state: self, pos: 0 }
    }

    pub fn reader_at(&self, pos: usize) -> BitReader<'_> {
        BitReader { state: self, pos }
    }
}

/// Sequential writer; running past the capacity is a [`Error::BudgetViolation`].
pub struct BitWriter<'a> {
    state: &'a mut BitState,
    pos: usize,
}

impl BitWriter<'_> {
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn write_bits(&mut self, width: usize, value: u64) -> Result<()> {
        self.state.write_bits(self.pos, width, value)?;
        self.pos += width;
        Ok(())
    }

    pub fn write_bool(&mut self, value: bool) -> Result<()> {
        self.write_bits(1, value as u64)
    }

    pub fn write_f64(&mut self, value: f64) -> Result<()> {
        self.write_bits(64, value.to_bits())
    }

    pub fn write_f64s(&mut self, values: impl IntoIterator<Item = f64>) -> Result<()> {
        for v in values {
            self.write_f64(v)?;
        }
        Ok(())
    }
}

pub struct BitReader<'a> {
    state: &'a BitState,
    pos: usize,
}

impl BitReader<'_> {
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn read_bits(&mut self, width: usize) -> Result<u64> {
        let v = self.state.read_bits(self.pos, width)?;
        self.pos += width;
        Ok(v)
    }

    pub fn read_bool(&mut self) -> Result<bool> {
        Ok(self.read_bits(1)? == 1)
    }

    pub fn read_f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.read_bits(64)?))
    }

    pub fn read_f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.read_f64()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn payload_is_rounded_up_to_bytes() {
        let s = BitState::zeroed(13);
        assert_eq!(s.payload().len(), 2);
        assert_eq!(BitState::zeroed(16).payload().len(), 2);
        assert_eq!(BitState::zeroed(0).payload().len(), 0);
    }

    #[test]
    fn hex_is_msb_first() {
        let mut s = BitState::zeroed(12);
        s.set_bit(0, true).unwrap();
        s.set_bit(11, true).unwrap();
        assert_eq!(s.to_hex(), "8010");
        let mut w = BitState::zeroed(8);
        w.write_bits(0, 4, 0xa).unwrap();
        assert_eq!(w.to_hex(), "a0");
    }

    #[test]
    fn writes_past_capacity_are_budget_violations() {
        let mut s = BitState::zeroed(10);
        assert_eq!(
            s.write_bits(4, 8, 1),
            Err(Error::BudgetViolation { capacity_bits: 10, required_bits: 12 })
        );
        let mut w = s.writer();
        w.write_bits(10, 5).unwrap();
        assert!(matches!(w.write_bool(true), Err(Error::BudgetViolation { .. })));
    }

    #[test]
    fn trailing_bits_must_be_zero() {
        assert!(BitState::from_payload(12, vec![0xff, 0xf0]).is_ok());
        assert!(matches!(BitState::from_payload(12, vec![0xff, 0xf8]), Err(Error::MalformedState(_))));
        assert!(matches!(BitState::from_payload(12, vec![0xff]), Err(Error::MalformedState(_))));
    }

    proptest! {
        #[test]
        fn mixed_width_fields_read_back(fields in prop::collection::vec((1usize..=64, any::<u64>()), 1..20)) {
            let fields: Vec<(usize, u64)> = fields
                .into_iter()
                .map(|(w, v)| (w, if w == 64 { v } else { v & ((1u64 << w) - 1) }))
                .collect();
            let total: usize = fields.iter().map(|f| f.0).sum();
            let mut s = BitState::zeroed(total);
            let mut w = s.writer();
            for &(width, v) in &fields {
                w.write_bits(width, v).unwrap();
            }
            prop_assert_eq!(w.position(), total);
            let rebuilt = BitState::from_payload(total, s.clone().into_payload()).unwrap();
            let mut r = rebuilt.reader();
            for &(width, v) in &fields {
                prop_assert_eq!(r.read_bits(width).unwrap(), v);
            }
        }
    }
}
