//! Complex coefficients in one of two arithmetic modes.
//!
//! Exact scalars are Gaussian rationals and never round. Float scalars are
//! pairs of `f64`; every zero test on them goes through the tolerance carried
//! by [`Mode::Float`]. Mixing the two promotes the exact operand to float.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default float zero-test tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Arithmetic mode of a computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Float { tol: f64 },
}

impl Mode {
    pub fn float() -> Mode {
        Mode::Float { tol: DEFAULT_TOL }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::Exact)
    }

    /// Zero-test tolerance; `0.0` in exact mode.
    pub fn tol(self) -> f64 {
        match self {
            Mode::Exact => 0.0,
            Mode::Float { tol } => tol,
        }
    }

    /// Common mode of two operands: float wins, with the looser tolerance.
    pub fn join(self, other: Mode) -> Mode {
        match (self, other) {
            (Mode::Exact, Mode::Exact) => Mode::Exact,
            (Mode::Float { tol }, Mode::Exact) | (Mode::Exact, Mode::Float { tol }) => {
                Mode::Float { tol }
            }
            (Mode::Float { tol: a }, Mode::Float { tol: b }) => Mode::Float { tol: a.max(b) },
        }
    }
}

/// A complex number, exact or float.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Complex<BigRational>),
    Float(Complex64),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

/// Exact positive `k`-th root of a positive rational, if it is a perfect power.
pub fn rational_root(q: &BigRational, k: u32) -> Option<BigRational> {
    if !q.is_positive() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.nth_root(k), d.nth_root(k));
    if &rn.pow(k) == n && &rd.pow(k) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

impl Scalar {
    pub fn zero(mode: Mode) -> Scalar {
        Scalar::from_int(0, mode)
    }

    pub fn one(mode: Mode) -> Scalar {
        Scalar::from_int(1, mode)
    }

    /// The imaginary unit.
    pub fn i(mode: Mode) -> Scalar {
        Scalar::gaussian(0, 1, mode)
    }

    pub fn from_int(n: i64, mode: Mode) -> Scalar {
        Scalar::gaussian(n, 0, mode)
    }

    /// `re + i·im` with integer parts.
    pub fn gaussian(re: i64, im: i64, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(Complex::new(rat(re), rat(im))),
            Mode::Float { .. } => Scalar::Float(Complex64::new(re as f64, im as f64)),
        }
    }

    /// The rational `p/q` (real).
    pub fn ratio(p: i64, q: i64, mode: Mode) -> Scalar {
        assert!(q != 0, "zero denominator");
        match mode {
            Mode::Exact => Scalar::Exact(Complex::new(
                BigRational::new(BigInt::from(p), BigInt::from(q)),
                BigRational::zero(),
            )),
            Mode::Float { .. } => Scalar::Float(Complex64::new(p as f64 / q as f64, 0.0)),
        }
    }

    pub fn exact(re: BigRational, im: BigRational) -> Scalar {
        Scalar::Exact(Complex::new(re, im))
    }

    /// The exact real `q`.
    pub fn from_rational(q: BigRational) -> Scalar {
        Scalar::Exact(Complex::new(q, BigRational::zero()))
    }

    pub fn float(re: f64, im: f64) -> Scalar {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_complex64(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im)),
            Scalar::Float(c) => *c,
        }
    }

    /// Converts into `mode`; exact targets accept only exact inputs unchanged.
    pub fn to_mode(&self, mode: Mode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(_), Mode::Float { .. }) => Scalar::Float(self.to_complex64()),
            _ => self.clone(),
        }
    }

    pub fn re(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(Complex::new(c.re.clone(), BigRational::zero())),
            Scalar::Float(c) => Scalar::float(c.re, 0.0),
        }
    }

    pub fn im(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(Complex::new(c.im.clone(), BigRational::zero())),
            Scalar::Float(c) => Scalar::float(c.im, 0.0),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float(c) => Scalar::Float(c.conj()),
        }
    }

    /// Modulus as `f64`.
    pub fn abs(&self) -> f64 {
        self.to_complex64().norm()
    }

    /// Exact zero, or modulus at most `tol` for floats.
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(c) => c.re.is_zero() && c.im.is_zero(),
            Scalar::Float(c) => c.norm() <= tol,
        }
    }

    /// Imaginary part vanishes (exactly, or within `tol`).
    pub fn is_real_tol(&self, tol: f64) -> bool {
        self.im().is_zero_tol(tol)
    }

    /// Sign of the real part, treating values within `tol` as zero.
    pub fn re_sign(&self, tol: f64) -> i32 {
        match self {
            Scalar::Exact(c) => {
                if c.re.is_positive() {
                    1
                } else if c.re.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Scalar::Float(c) => {
                if c.re > tol {
                    1
                } else if c.re < -tol {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// Approximate equality: exact compare, or `|a − b| ≤ tol`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        (self - other).is_zero_tol(tol)
    }

    /// Square root of the real part, assumed non-negative. Exact when the
    /// exact input is a perfect rational square, float otherwise.
    pub fn sqrt_real(&self, tol: f64) -> Scalar {
        match self {
            Scalar::Exact(c) => match rational_sqrt(&c.re) {
                Some(r) => Scalar::exact(r, BigRational::zero()),
                None => Scalar::float(rat_to_f64(&c.re).max(0.0).sqrt(), 0.0),
            },
            Scalar::Float(c) => {
                let _ = tol;
                Scalar::float(c.re.max(0.0).sqrt(), 0.0)
            }
        }
    }

    /// Positive `k`-th root of the real part, assumed positive; exact when the
    /// exact input is a perfect rational power.
    pub fn real_root(&self, k: u32) -> Scalar {
        match self {
            Scalar::Exact(c) => match rational_root(&c.re, k) {
                Some(r) => Scalar::exact(r, BigRational::zero()),
                None => Scalar::float(rat_to_f64(&c.re).powf(1.0 / k as f64), 0.0),
            },
            Scalar::Float(c) => Scalar::float(c.re.powf(1.0 / k as f64), 0.0),
        }
    }

    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => {
                let d = &c.re * &c.re + &c.im * &c.im;
                Scalar::Exact(Complex::new(&c.re / &d, -(&c.im / &d)))
            }
            Scalar::Float(c) => Scalar::Float(c.inv()),
        }
    }

    /// Integer power, `n ≥ 0`.
    pub fn powi(&self, n: u32) -> Scalar {
        let mut acc = match self {
            Scalar::Exact(_) => Scalar::one(Mode::Exact),
            Scalar::Float(_) => Scalar::float(1.0, 0.0),
        };
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    fn exact_parts(&self) -> Option<&Complex<BigRational>> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Float(_) => None,
        }
    }

    /// Exact real part, when exact.
    pub fn exact_re(&self) -> Option<&BigRational> {
        self.exact_parts().map(|c| &c.re)
    }

    /// Exact imaginary part, when exact.
    pub fn exact_im(&self) -> Option<&BigRational> {
        self.exact_parts().map(|c| &c.im)
    }
}

/// Parses a decimal rational `"p/q"`, `"p"` or a decimal fraction `"-1.25"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(q) = BigRational::from_str(s) {
        return Some(q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(&digits).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let q = BigRational::new(num, den);
    Some(if neg { -q } else { q })
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_complex64() $op rhs.to_complex64()),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

/// Complex product skipping the real multiplications by a zero part.
fn mul_exact(a: &Complex<BigRational>, b: &Complex<BigRational>) -> Complex<BigRational> {
    let part = |x: &BigRational, y: &BigRational| if x.is_zero() || y.is_zero() { None } else { Some(x * y) };
    let (rr, ii) = (part(&a.re, &b.re), part(&a.im, &b.im));
    let (ri, ir) = (part(&a.re, &b.im), part(&a.im, &b.re));
    let combine = |x: Option<BigRational>, y: Option<BigRational>, sign: bool| match (x, y) {
        (Some(x), Some(y)) if sign => x - y,
        (Some(x), Some(y)) => x + y,
        (Some(x), None) => x,
        (None, Some(y)) if sign => -y,
        (None, Some(y)) => y,
        (None, None) => BigRational::zero(),
    };
    Complex::new(combine(rr, ii, true), combine(ri, ir, false))
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(mul_exact(a, b)),
            _ => Scalar::Float(self.to_complex64() * rhs.to_complex64()),
        }
    }
}

impl Mul<Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(_), Scalar::Exact(_)) => self * &rhs.inv(),
            _ => Scalar::Float(self.to_complex64() / rhs.to_complex64()),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(-c.clone()),
            Scalar::Float(c) => Scalar::Float(-c),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Scalar {
    /// `self += rhs` without reallocating the exact case more than needed.
    pub fn add_assign_ref(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                a.re += &b.re;
                a.im += &b.im;
            }
            (Scalar::Float(a), _) => *a += rhs.to_complex64(),
            (Scalar::Exact(_), Scalar::Float(b)) => *self = Scalar::Float(self.to_complex64() + b),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.re.is_one() && c.im.is_zero(),
            Scalar::Float(c) => c.re == 1.0 && c.im == 0.0,
        }
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => {
                if c.im.is_zero() {
                    write!(f, "{}", fmt_rat(&c.re))
                } else if c.re.is_zero() {
                    write!(f, "{}i", fmt_rat(&c.im))
                } else {
                    let sign = if c.im.is_negative() { "-" } else { "+" };
                    write!(f, "({} {} {}i)", fmt_rat(&c.re), sign, fmt_rat(&c.im.abs()))
                }
            }
            Scalar::Float(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", c.re)
                } else if c.re == 0.0 {
                    write!(f, "{}i", c.im)
                } else {
                    let sign = if c.im < 0.0 { "-" } else { "+" };
                    write!(f, "({} {} {}i)", c.re, sign, c.im.abs())
                }
            }
        }
    }
}

/// String form of a rational for serialization (`"p"` or `"p/q"`).
pub fn rational_string(q: &BigRational) -> String {
    fmt_rat(q)
}
