//! Exact Gaussian-rational coefficients `re + im*I`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Coeff::from_int(1)
    }

    pub fn i() -> Self {
        Coeff { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Coeff { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Coeff { re: BigRational::new(BigInt::from(n), BigInt::from(d)), im: BigRational::zero() }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coeff { re: r, im: BigRational::zero() }
    }

    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coeff { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coeff { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero coefficient");
        Coeff { re: &self.re / &n, im: -(&self.im / &n) }
    }

    pub fn div(&self, other: &Coeff) -> Self {
        self * &other.inv()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Coeff::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Exact square root of a positive real rational, if it exists.
    pub fn sqrt_exact(&self) -> Option<Coeff> {
        if !self.im.is_zero() || self.re.is_negative() {
            return None;
        }
        let n = isqrt_exact(self.re.numer())?;
        let d = isqrt_exact(self.re.denom())?;
        Some(Coeff::from_rational(BigRational::new(n, d)))
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        if self.im.is_zero() && o.im.is_zero() {
            return Coeff { re: &self.re * &o.re, im: BigRational::zero() };
        }
        Coeff {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re, im: -self.im }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re.clone(), im: -self.im.clone() }
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "I")
                } else if (-self.im.clone()).is_one() {
                    write!(f, "-I")
                } else {
                    write!(f, "{}*I", fmt_rat(&self.im))
                }
            }
            (false, false) => {
                let im = if self.im.is_one() {
                    "I".to_string()
                } else {
                    format!("{}*I", fmt_rat(&self.im.abs()))
                };
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {})", fmt_rat(&self.re), sign, im)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_arithmetic() {
        let i = Coeff::i();
        assert_eq!(&i * &i, Coeff::from_int(-1));
        let z = Coeff::new(BigRational::from_integer(3.into()), BigRational::from_integer(4.into()));
        assert_eq!(&z * &z.inv(), Coeff::one());
        assert_eq!(z.norm_sqr(), BigRational::from_integer(25.into()));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Coeff::from_ratio(9, 4).sqrt_exact(), Some(Coeff::from_ratio(3, 2)));
        assert_eq!(Coeff::from_int(2).sqrt_exact(), None);
        assert_eq!(Coeff::from_int(-4).sqrt_exact(), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coeff::from_ratio(-1, 9).to_string(), "-1/9");
        assert_eq!(Coeff::i().to_string(), "I");
        assert_eq!((-Coeff::i()).to_string(), "-I");
        let z = Coeff::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer((-3).into()));
        assert_eq!(z.to_string(), "(1/2 - 3*I)");
    }
}
