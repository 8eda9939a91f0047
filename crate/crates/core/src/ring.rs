//! Exact scalars: integers and golden integers `a + bφ` with `φ² = φ + 1`.
//!
//! [`RingScalar`] is the arbitrary-precision form. [`SmallGolden`] is the
//! fixed-width form used on the enumeration hot path; every operation on it is
//! overflow-checked so callers can fall back to [`RingScalar`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

/// Sign of `p + q·√5` for integers `p`, `q`.
fn sign_sqrt5<T>(p: &T, q: &T) -> Ordering
where
    T: Signed + Clone + Ord + Mul<Output = T> + From<i8>,
{
    let zero = T::zero();
    let sp = p.cmp(&zero);
    let sq = q.cmp(&zero);
    if sq == Ordering::Equal || sp == sq {
        return sp;
    }
    if sp == Ordering::Equal {
        return sq;
    }
    // Opposite signs: the term with the larger square wins.
    let p2 = p.clone() * p.clone();
    let q2 = T::from(5) * q.clone() * q.clone();
    if p2 > q2 {
        sp
    } else {
        sq
    }
}

/// Exact element of `Z` or `Z[φ]`.
///
/// Values with a zero `φ` coefficient are always stored as [`RingScalar::Int`],
/// so structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingScalar {
    Int(BigInt),
    Golden(BigInt, BigInt),
}

impl RingScalar {
    pub fn int(a: impl Into<BigInt>) -> Self {
        RingScalar::Int(a.into())
    }

    /// `a + bφ`, normalised to `Int` when `b = 0`.
    pub fn golden(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        let (a, b) = (a.into(), b.into());
        if b.is_zero() {
            RingScalar::Int(a)
        } else {
            RingScalar::Golden(a, b)
        }
    }

    pub fn zero() -> Self {
        RingScalar::Int(BigInt::zero())
    }

    pub fn one() -> Self {
        RingScalar::int(1)
    }

    pub fn phi() -> Self {
        RingScalar::golden(0, 1)
    }

    /// `(a, b)` with value `a + bφ`.
    pub fn parts(&self) -> (BigInt, BigInt) {
        match self {
            RingScalar::Int(a) => (a.clone(), BigInt::zero()),
            RingScalar::Golden(a, b) => (a.clone(), b.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RingScalar::Int(a) if a.is_zero())
    }

    /// Exact sign. `a + bφ = ((2a + b) + b√5) / 2`.
    pub fn signum(&self) -> Ordering {
        match self {
            RingScalar::Int(a) => a.sign().cmp_zero(),
            RingScalar::Golden(a, b) => {
                let p: BigInt = BigInt::from(2) * a + b;
                sign_sqrt5(&p, b)
            }
        }
    }

    /// Conversion to the fixed-width form, if both parts fit.
    pub fn to_small(&self) -> Option<SmallGolden> {
        let (a, b) = self.parts();
        Some(SmallGolden { a: a.to_i64()?, b: b.to_i64()? })
    }

    /// Appends the canonical byte image: zigzag LEB128 of `a`, and of `b`
    /// when `golden` is set.
    pub fn encode(&self, golden: bool, out: &mut Vec<u8>) {
        let (a, b) = self.parts();
        encode_big(&a, out);
        if golden {
            encode_big(&b, out);
        }
    }
}

trait SignExt {
    fn cmp_zero(self) -> Ordering;
}

impl SignExt for Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl Add for &RingScalar {
    type Output = RingScalar;

    fn add(self, rhs: &RingScalar) -> RingScalar {
        let ((a, b), (c, d)) = (self.parts(), rhs.parts());
        RingScalar::golden(a + c, b + d)
    }
}

impl Sub for &RingScalar {
    type Output = RingScalar;

    fn sub(self, rhs: &RingScalar) -> RingScalar {
        let ((a, b), (c, d)) = (self.parts(), rhs.parts());
        RingScalar::golden(a - c, b - d)
    }
}

impl Mul for &RingScalar {
    type Output = RingScalar;

    fn mul(self, rhs: &RingScalar) -> RingScalar {
        let ((a, b), (c, d)) = (self.parts(), rhs.parts());
        let bd = &b * &d;
        RingScalar::golden(&a * &c + &bd, &a * &d + &b * &c + bd)
    }
}

impl Neg for &RingScalar {
    type Output = RingScalar;

    fn neg(self) -> RingScalar {
        let (a, b) = self.parts();
        RingScalar::golden(-a, -b)
    }
}

impl fmt::Display for RingScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingScalar::Int(a) => write!(f, "{a}"),
            RingScalar::Golden(a, b) if a.is_zero() => write!(f, "{b}φ"),
            RingScalar::Golden(a, b) if b.is_negative() => write!(f, "{a}{b}φ"),
            RingScalar::Golden(a, b) => write!(f, "{a}+{b}φ"),
        }
    }
}

impl From<SmallGolden> for RingScalar {
    fn from(s: SmallGolden) -> Self {
        RingScalar::golden(s.a, s.b)
    }
}

/// Fixed-width `a + bφ` with checked arithmetic.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, Default)]
pub struct SmallGolden {
    pub a: i64,
    pub b: i64,
}

impl SmallGolden {
    pub const ZERO: SmallGolden = SmallGolden { a: 0, b: 0 };
    pub const ONE: SmallGolden = SmallGolden { a: 1, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        SmallGolden { a, b }
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        Some(SmallGolden { a: self.a.checked_add(rhs.a)?, b: self.b.checked_add(rhs.b)? })
    }

    pub fn checked_neg(self) -> Option<Self> {
        Some(SmallGolden { a: self.a.checked_neg()?, b: self.b.checked_neg()? })
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let bd = self.b.checked_mul(rhs.b)?;
        let a = self.a.checked_mul(rhs.a)?.checked_add(bd)?;
        let b = self.a.checked_mul(rhs.b)?.checked_add(self.b.checked_mul(rhs.a)?)?.checked_add(bd)?;
        Some(SmallGolden { a, b })
    }

    pub fn signum(self) -> Ordering {
        if self.b == 0 {
            return self.a.cmp(&0);
        }
        let p = 2 * self.a as i128 + self.b as i128;
        sign_sqrt5(&p, &(self.b as i128))
    }

    pub fn encode(self, golden: bool, out: &mut Vec<u8>) {
        encode_u64(zigzag(self.a), out);
        if golden {
            encode_u64(zigzag(self.b), out);
        }
    }
}

fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

fn encode_u64(mut v: u64, out: &mut Vec<u8>) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

fn encode_big(x: &BigInt, out: &mut Vec<u8>) {
    if let Some(small) = x.to_i64() {
        return encode_u64(zigzag(small), out);
    }
    let mut v = if x.is_negative() {
        (-x).to_biguint().unwrap() * 2u32 - 1u32
    } else {
        x.to_biguint().unwrap() * 2u32
    };
    let low = num_bigint::BigUint::from(0x7fu32);
    while v >= num_bigint::BigUint::from(0x80u32) {
        let byte = (&v & &low).to_u8().unwrap();
        out.push(byte | 0x80);
        v >>= 7;
    }
    out.push(v.to_u8().unwrap());
}

/// Reads one zigzag LEB128 integer starting at `*pos`.
pub(crate) fn decode_i64(bytes: &[u8], pos: &mut usize) -> Option<i64> {
    let mut v: u64 = 0;
    let mut shift = 0;
    loop {
        let byte = *bytes.get(*pos)?;
        *pos += 1;
        if shift >= 64 || (shift == 63 && byte & 0x7f > 1) {
            return None;
        }
        v |= ((byte & 0x7f) as u64) << shift;
        if byte & 0x80 == 0 {
            break;
        }
        shift += 7;
    }
    Some(((v >> 1) as i64) ^ -((v & 1) as i64))
}
