//! Unsigned n-qubit Pauli strings in the binary symplectic representation.
//!
//! A string is stored as two bitmasks over the qubits: bit `i` of `x_mask` is
//! set when qubit `i+1` carries an X or Y factor, bit `i` of `z_mask` when it
//! carries a Z or Y factor. The leftmost character of the text form ("XXI") is
//! qubit 1 and lives in bit 0, so text order and bit order agree and JSON
//! fixtures are byte-stable.
//!
//! Phase convention for products: `Y = iXZ`. Context signs are independent of
//! this choice (asserted by tests), the convention only fixes intermediate
//! phases.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Masks fit in one `u16`; everything in scope is exercised at n <= 6.
pub const MAX_QUBITS: usize = 16;

/// Single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    I,
    X,
    Y,
    Z,
}

impl Factor {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Factor::I,
            (true, false) => Factor::X,
            (true, true) => Factor::Y,
            (false, true) => Factor::Z,
        }
    }

    fn to_char(self) -> char {
        match self {
            Factor::I => 'I',
            Factor::X => 'X',
            Factor::Y => 'Y',
            Factor::Z => 'Z',
        }
    }
}

/// Power of i, tracked mod 4, so `i^value` ranges over {+1, +i, -1, -i}.
///
/// Products of two *commuting* Pauli strings always land on a real phase
/// (value 0 or 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub fn new(value: u8) -> Self {
        Phase(value % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// +1 or -1 for real phases, `None` for +-i.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn compose(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        };
        f.write_str(s)
    }
}

/// Unsigned tensor product of {I, X, Y, Z} over `n` qubits.
///
/// The all-identity string is representable (it shows up as a product) but is
/// not a valid observable; callers that need observables check
/// [`PauliString::is_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u16,
    z: u16,
}

impl PauliString {
    pub fn new(n: usize, x: u16, z: u16) -> Result<Self, Error> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Length { len: n });
        }
        let mask = low_bits(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::Invariant(format!(
                "mask bits above qubit count {n}: x={x:#b} z={z:#b}"
            )));
        }
        Ok(PauliString { n, x, z })
    }

    pub fn identity(n: usize) -> Result<Self, Error> {
        PauliString::new(n, 0, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u16 {
        self.x
    }

    pub fn z_mask(&self) -> u16 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Factor on qubit `i` (1-based, matching the text notation).
    pub fn factor(&self, qubit: usize) -> Factor {
        debug_assert!(qubit >= 1 && qubit <= self.n);
        let bit = 1u16 << (qubit - 1);
        Factor::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn factors(&self) -> impl Iterator<Item = Factor> + '_ {
        (1..=self.n).map(|q| self.factor(q))
    }

    fn check_dim(&self, other: &PauliString) -> Result<(), Error> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Operator product `self * other = i^phase * result`.
    ///
    /// The result masks are the XOR of the operands'; the phase follows from
    /// the `Y = iXZ` convention: writing each string as
    /// `i^{|x&z|} X^x Z^z`, commuting `Z^z1` past `X^x2` costs
    /// `(-1)^{|z1&x2|}`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString), Error> {
        self.check_dim(other)?;
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let mut exp = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones();
        // subtract the canonical-form phase of the result, mod 4
        exp += 4 - (x & z).count_ones() % 4;
        let result = PauliString { n: self.n, x, z };
        Ok((Phase::new((exp % 4) as u8), result))
    }

    /// Symplectic commutation test: true iff the number of qubit positions
    /// where the two strings carry different non-identity factors is even.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, Error> {
        self.check_dim(other)?;
        let overlap =
            (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(overlap.is_multiple_of(2))
    }

    /// Relabel each qubit's non-identity factor by that qubit's permutation
    /// of {X, Y, Z} (given as the images of X, Y, Z) and permute the qubits;
    /// `qubit_map[i]` is the 0-based destination of qubit i+1. Used by the
    /// symmetry-class machinery.
    pub fn relabel(&self, label_maps: &[[Factor; 3]], qubit_map: &[usize]) -> PauliString {
        debug_assert_eq!(qubit_map.len(), self.n);
        debug_assert_eq!(label_maps.len(), self.n);
        let mut x = 0u16;
        let mut z = 0u16;
        for q in 1..=self.n {
            let map = &label_maps[q - 1];
            let g = match self.factor(q) {
                Factor::I => Factor::I,
                Factor::X => map[0],
                Factor::Y => map[1],
                Factor::Z => map[2],
            };
            let dest = qubit_map[q - 1];
            match g {
                Factor::I => {}
                Factor::X => x |= 1 << dest,
                Factor::Y => {
                    x |= 1 << dest;
                    z |= 1 << dest;
                }
                Factor::Z => z |= 1 << dest,
            }
        }
        PauliString { n: self.n, x, z }
    }
}

/// Every observable on `n` qubits commutes with exactly `2 (4^{n-1} - 1)`
/// other observables.
pub fn compatible_count(n: usize) -> Result<u128, Error> {
    if n == 0 {
        return Err(Error::Length { len: n });
    }
    Ok(2 * (4u128.pow(n as u32 - 1) - 1))
}

/// All `4^n - 1` non-identity strings on `n` qubits, in canonical
/// (x_mask, z_mask) order.
pub fn observables(n: usize) -> impl Iterator<Item = PauliString> {
    let top = 1u64 << (2 * n);
    (1..top).map(move |code| PauliString {
        n,
        x: (code >> n) as u16,
        z: (code & (low_bits(n) as u64)) as u16,
    })
}

fn low_bits(n: usize) -> u16 {
    if n == 16 {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliString {
    /// Lexicographic by (x_mask, z_mask); strings of different n compare by n
    /// first so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.x, self.z).cmp(&(other.n, other.x, other.z))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for factor in self.factors() {
            write!(f, "{}", factor.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let len = text.chars().count();
        if len == 0 || len > MAX_QUBITS {
            return Err(Error::Length { len });
        }
        let mut x = 0u16;
        let mut z = 0u16;
        for (i, ch) in text.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x |= 1 << i,
                'Y' => {
                    x |= 1 << i;
                    z |= 1 << i;
                }
                'Z' => z |= 1 << i,
                _ => {
                    return Err(Error::InvalidCharacter {
                        character: ch,
                        position: i + 1,
                    })
                }
            }
        }
        Ok(PauliString { n: len, x, z })
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
