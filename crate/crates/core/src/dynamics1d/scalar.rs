use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by the segment solvers, shared by `f64` and exact rationals.
pub(crate) trait Scalar:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn floor(self) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

pub type Exact = Ratio<i128>;

impl Scalar for Exact {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn floor(self) -> Self {
        Ratio::floor(&self)
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

pub(crate) fn abs<T: Scalar>(v: T) -> T {
    if v < T::zero() {
        -v
    } else {
        v
    }
}

/// Render an exact coordinate the way it would be written in a map description.
pub fn format_exact(v: &Exact) -> String {
    if v.is_integer() {
        return v.to_integer().to_string();
    }
    // Denominators of the form 2^a 5^b have a terminating decimal expansion.
    let mut den = *v.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", v.numer(), v.denom());
    }
    let digits = twos.max(fives);
    let scale = 10i128.pow(digits);
    let scaled = (v * Ratio::from_integer(scale)).to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let mag = scaled.abs();
    let int = mag / scale;
    let frac = mag % scale;
    let frac = format!("{:0width$}", frac, width = digits as usize);
    format!("{sign}{int}.{}", frac.trim_end_matches('0'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_terminating_and_repeating() {
        assert_eq!(format_exact(&Exact::new(1, 8)), "0.125");
        assert_eq!(format_exact(&Exact::new(-3, 4)), "-0.75");
        assert_eq!(format_exact(&Exact::new(7, 1)), "7");
        assert_eq!(format_exact(&Exact::new(1, 3)), "1/3");
        assert_eq!(format_exact(&Exact::new(3, 10)), "0.3");
    }
}
