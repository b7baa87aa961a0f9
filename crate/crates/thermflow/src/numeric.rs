//! Exact arbitrary-precision rational arithmetic and fixed-precision display.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

/// Error from parsing a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {text:?}: {reason}")]
    Invalid { text: String, reason: &'static str },
    #[error("denominator is zero in {0:?}")]
    ZeroDenominator(String),
}

/// An exact rational number of arbitrary precision.
///
/// Every quantity in the engine — temperatures, heat rates, masses, clocks —
/// is a `Rat`. Arithmetic is exact, comparison is a total order, and equal
/// values are equal regardless of how they were written down (`15/10`, `3/2`
/// and `1.5` all parse to the same number).
///
/// Internally a value is a numerator over a positive denominator that is
/// *not* forced into lowest terms after every operation: long simulations
/// add huge fractions that share a denominator, and skipping the gcd there
/// turns each step from quadratic to linear in the digit count. Equality,
/// ordering, hashing and printing all see through the representation, so
/// `3/6` and `1/2` are the same value everywhere it can be observed.
pub struct Rat {
    num: BigInt,
    /// Invariant: always positive (the sign lives in `num`).
    den: BigInt,
}

impl Clone for Rat {
    fn clone(&self) -> Rat {
        Rat {
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }
}

impl Rat {
    /// The number zero.
    pub fn zero() -> Rat {
        Rat {
            num: BigInt::zero(),
            den: BigInt::from(1),
        }
    }

    /// The number one.
    pub fn one() -> Rat {
        Rat {
            num: BigInt::from(1),
            den: BigInt::from(1),
        }
    }

    /// Builds `numer/denom` reduced to lowest terms.
    ///
    /// Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Rat {
        assert!(denom != 0, "rational denominator must not be zero");
        Rat::reduced_from(BigInt::from(numer), BigInt::from(denom))
    }

    /// Builds a value from raw parts without reducing. `den` must be
    /// positive; a zero numerator is normalized so its denominator carries
    /// no stale factors.
    fn from_raw(num: BigInt, den: BigInt) -> Rat {
        debug_assert!(den.is_positive(), "raw denominator must be positive");
        if num.is_zero() {
            return Rat::zero();
        }
        Rat { num, den }
    }

    /// Builds `num/den` in lowest terms with a positive denominator.
    fn reduced_from(num: BigInt, den: BigInt) -> Rat {
        assert!(!den.is_zero(), "rational denominator must not be zero");
        if num.is_zero() {
            return Rat::zero();
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Rat { num, den }
    }

    /// Numerator and denominator in lowest terms.
    fn reduced_parts(&self) -> (BigInt, BigInt) {
        if self.num.is_zero() {
            return (BigInt::zero(), BigInt::from(1));
        }
        let g = self.num.gcd(&self.den);
        (&self.num / &g, &self.den / g)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    /// True when the value is a whole number.
    pub fn is_integer(&self) -> bool {
        (&self.num % &self.den).is_zero()
    }

    /// Absolute value.
    pub fn abs(&self) -> Rat {
        Rat {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    /// Division that reports a zero divisor instead of panicking.
    pub fn checked_div(&self, rhs: &Rat) -> Option<Rat> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    /// Raises the value to a non-negative integer power (`x.pow(0)` is one).
    pub fn pow(&self, exp: u32) -> Rat {
        if exp == 0 {
            return Rat::one();
        }
        Rat::from_raw(self.num.pow(exp), self.den.pow(exp))
    }

    /// Renders the value in fixed-point notation with exactly `precision`
    /// digits after the decimal point, truncated toward zero (never rounded
    /// away from it) and zero-padded on the right.
    ///
    /// ```
    /// use thermflow::numeric::Rat;
    /// assert_eq!(Rat::new(363, 875).display(10), "0.4148571428");
    /// assert_eq!(Rat::new(-1, 2).display(10), "-0.5000000000");
    /// ```
    pub fn display(&self, precision: u32) -> String {
        let sign = if self.is_negative() { "-" } else { "" };
        let num = self.num.magnitude();
        let den = self.den.magnitude();
        let (int_part, rem) = num.div_rem(den);
        let frac = rem * BigUint::from(10u32).pow(precision) / den;
        format!(
            "{sign}{int_part}.{frac:0>width$}",
            frac = frac.to_string(),
            width = precision as usize
        )
    }
}

macro_rules! impl_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rat {
            fn from(n: $t) -> Rat {
                Rat { num: BigInt::from(n), den: BigInt::from(1) }
            }
        }
    )*};
}

impl_from_int!(i32, i64, u32, u64);

/// Prints the value in lowest terms: `p` for integers, `p/q` otherwise.
impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.reduced_parts();
        if den.is_one() {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({self})")
    }
}

/// Parses `p`, `-p`, `p/q`, or an exact decimal such as `1.5` (which means
/// exactly 15/10). Leading/trailing whitespace is ignored.
impl FromStr for Rat {
    type Err = RatParseError;

    fn from_str(s: &str) -> Result<Rat, RatParseError> {
        let text = s.trim();
        if text.is_empty() {
            return Err(RatParseError::Empty);
        }
        let (negative, body) = match text.as_bytes()[0] {
            b'-' => (true, &text[1..]),
            b'+' => (false, &text[1..]),
            _ => (false, text),
        };
        let digits = |part: &str| -> Result<BigUint, RatParseError> {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(RatParseError::Invalid {
                    text: text.to_owned(),
                    reason: "expected decimal digits",
                });
            }
            Ok(BigUint::from_str(part).expect("digits parse"))
        };
        let magnitude = if let Some((int_part, frac_part)) = body.split_once('.') {
            let scale = BigUint::from(10u32).pow(frac_part.len() as u32);
            let numer = digits(int_part)? * &scale + digits(frac_part)?;
            Rat::reduced_from(numer.into(), scale.into())
        } else if let Some((numer, denom)) = body.split_once('/') {
            let denom = digits(denom)?;
            if denom.is_zero() {
                return Err(RatParseError::ZeroDenominator(text.to_owned()));
            }
            Rat::reduced_from(digits(numer)?.into(), denom.into())
        } else {
            Rat::from_raw(digits(body)?.into(), BigInt::from(1))
        };
        Ok(if negative { -magnitude } else { magnitude })
    }
}

// ---------------------------------------------------------------------------
// Arithmetic.
//
// Long runs add fractions whose denominators share one huge common factor
// (each step multiplies the previous denominator by a fixed small amount),
// so addition avoids the usual full-size binary gcd. Denominators are
// matched with Euclid's algorithm — a handful of divisions when such a
// common factor exists — and the result is reduced only against a
// machine-word gcd, leaving any deeper common factor in place. Equality,
// ordering and printing are all representation-blind, so that is safe.

/// Greatest common divisor of two positive integers by Euclid's algorithm.
/// Quadratic on unrelated inputs of similar size, but only a few division
/// passes when the inputs share most of their bits as a common factor.
fn euclid_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

/// `a + bn/bd` where `bd > 0` and `bn` is nonzero.
fn add_parts(a: &Rat, bn: &BigInt, bd: &BigInt) -> Rat {
    if a.num.is_zero() {
        return Rat::from_raw(bn.clone(), bd.clone());
    }
    if a.den == *bd {
        return Rat::from_raw(&a.num + bn, a.den.clone());
    }
    let g = euclid_gcd(&a.den, bd);
    let bd_over_g = bd / &g;
    let t = &a.num * &bd_over_g + bn * (&a.den / &g);
    if t.is_zero() {
        return Rat::zero();
    }
    let den = &a.den * bd_over_g;
    // cheap follow-up reduction: only the common factor visible in one
    // machine word of the matched gcd
    if let Some(gs) = g.to_u64() {
        let r = (t.magnitude() % gs).to_u64().expect("residue fits in a u64");
        let g2 = r.gcd(&gs);
        if g2 > 1 {
            return Rat::from_raw(t / g2, den / g2);
        }
    }
    Rat::from_raw(t, den)
}

fn add_impl(a: &Rat, b: &Rat) -> Rat {
    if b.num.is_zero() {
        return a.clone();
    }
    add_parts(a, &b.num, &b.den)
}

fn sub_impl(a: &Rat, b: &Rat) -> Rat {
    if b.num.is_zero() {
        return a.clone();
    }
    add_parts(a, &-&b.num, &b.den)
}

fn mul_impl(a: &Rat, b: &Rat) -> Rat {
    if a.num.is_zero() || b.num.is_zero() {
        return Rat::zero();
    }
    Rat::from_raw(&a.num * &b.num, &a.den * &b.den)
}

fn div_impl(a: &Rat, b: &Rat) -> Rat {
    assert!(!b.num.is_zero(), "exact division by zero");
    if a.num.is_zero() {
        return Rat::zero();
    }
    let num = &a.num * &b.den;
    let den = &a.den * &b.num;
    if den.is_negative() {
        Rat::from_raw(-num, -den)
    } else {
        Rat::from_raw(num, den)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $impl_fn(&self, &rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $impl_fn(&self, rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $impl_fn(self, &rhs)
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $impl_fn(self, rhs)
            }
        }
    };
}

impl_binop!(Add, add, add_impl);
impl_binop!(Sub, sub, sub_impl);
impl_binop!(Mul, mul, mul_impl);
// Panics on a zero divisor; use `checked_div` where the divisor is not
// known to be nonzero.
impl_binop!(Div, div, div_impl);

// ---------------------------------------------------------------------------
// Comparison and hashing are value-based: two representations of the same
// number compare equal, order identically, and hash identically.

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        if self.num.sign() != other.num.sign() {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for Rat {}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        let signs = self.num.sign().cmp(&other.num.sign());
        if signs != Ordering::Equal {
            return signs;
        }
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        // denominators are positive, so cross-multiplying keeps the order
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Modulus for hashing values instead of representations: the residue of
/// `num·den⁻¹` is the same for every representation of a value (Mersenne
/// prime 2⁶¹−1).
const HASH_MODULUS: u64 = (1 << 61) - 1;

fn residue(x: &BigInt) -> u64 {
    let m = BigInt::from(HASH_MODULUS);
    x.mod_floor(&m).to_u64().expect("residue fits in a u64")
}

/// Multiplicative inverse modulo the (prime) hash modulus.
fn inverse(a: u64) -> u64 {
    // extended Euclid over signed 128-bit intermediates
    let (mut r0, mut r1) = (HASH_MODULUS as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(HASH_MODULUS as i128) as u64
}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let den_res = residue(&self.den);
        if den_res != 0 {
            state.write_u8(0);
            let num_res = residue(&self.num);
            state.write_u64(((num_res as u128 * inverse(den_res) as u128) % HASH_MODULUS as u128) as u64);
            return;
        }
        // the modulus divides this denominator; fall back to the unique
        // lowest-terms form (whose residue trick may still apply)
        let (num, den) = self.reduced_parts();
        let den_res = residue(&den);
        if den_res != 0 {
            state.write_u8(0);
            let num_res = residue(&num);
            state.write_u64(((num_res as u128 * inverse(den_res) as u128) % HASH_MODULUS as u128) as u64);
        } else {
            state.write_u8(1);
            num.hash(state);
            den.hash(state);
        }
    }
}
