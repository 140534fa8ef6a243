//! Arithmetic in `F_p` and `F_{p^2} = F_p(sqrt(d))` for odd primes `p >= 5`.
//!
//! A [`FieldSpec`] is a cheap-to-clone handle carrying the modulus and the
//! Tonelli-Shanks constants; [`FieldElement`]s are plain coefficient pairs
//! `c0 + c1*s` with `s^2 = d`, always reduced. Operations go through the
//! field handle (`f.mul(&a, &b)`). An element of `F_p` is also a valid
//! element of the quadratic extension over the same prime (`c1 = 0`), so
//! embedding is the identity on representations.
//!
//! Primes below 2^62 use single-word arithmetic; larger primes fall back to
//! `BigUint`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::is_prime;
use crate::error::{invalid, Error, Result};

const WORD_LIMIT: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Residue {
    Word(u64),
    Big(BigUint),
}

impl PartialOrd for Residue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Residue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Residue::Word(a), Residue::Word(b)) => a.cmp(b),
            (Residue::Big(a), Residue::Big(b)) => a.cmp(b),
            (a, b) => a.to_biguint().cmp(&b.to_biguint()),
        }
    }
}

impl Residue {
    fn to_biguint(&self) -> BigUint {
        match self {
            Residue::Word(w) => BigUint::from(*w),
            Residue::Big(b) => b.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Residue::Word(w) => *w == 0,
            Residue::Big(b) => b.is_zero(),
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residue::Word(w) => write!(f, "{w}"),
            Residue::Big(b) => write!(f, "{b}"),
        }
    }
}

/// Arithmetic modulo the odd prime `p`.
#[derive(Debug)]
struct PrimeField {
    p: BigUint,
    word: Option<u64>,
    /// `(p - 1) / 2`
    half: BigUint,
    /// `p - 1 = 2^two_adicity * odd`
    two_adicity: u64,
    odd: BigUint,
    /// smallest quadratic nonresidue
    nonresidue: Residue,
    /// `nonresidue^odd`, a generator of the 2-Sylow subgroup
    root_of_unity: Residue,
}

#[allow(clippy::wrong_self_convention)]
impl PrimeField {
    fn new(p: BigUint) -> Self {
        let word = p.to_u64().filter(|&w| w < WORD_LIMIT);
        let pm1 = &p - 1u32;
        let two_adicity = pm1.trailing_zeros().unwrap_or(0);
        let odd = &pm1 >> two_adicity;
        let mut pf = PrimeField {
            half: &pm1 >> 1,
            p,
            word,
            two_adicity,
            odd,
            nonresidue: Residue::Word(0),
            root_of_unity: Residue::Word(0),
        };
        let mut d = 2u64;
        loop {
            let r = pf.from_u64(d);
            if pf.legendre(&r) == -1 {
                pf.nonresidue = r;
                break;
            }
            d += 1;
        }
        pf.root_of_unity = pf.pow(&pf.nonresidue, &pf.odd.clone());
        pf
    }

    fn from_u64(&self, v: u64) -> Residue {
        match self.word {
            Some(m) => Residue::Word(v % m),
            None => Residue::Big(BigUint::from(v) % &self.p),
        }
    }

    fn from_biguint(&self, v: &BigUint) -> Residue {
        match self.word {
            Some(m) => Residue::Word((v % m).to_u64().unwrap()),
            None => Residue::Big(v % &self.p),
        }
    }

    fn from_bigint(&self, v: &BigInt) -> Residue {
        let p = BigInt::from(self.p.clone());
        let r = v.mod_floor(&p);
        self.from_biguint(r.magnitude())
    }

    fn zero(&self) -> Residue {
        self.from_u64(0)
    }

    fn one(&self) -> Residue {
        self.from_u64(1)
    }

    fn add(&self, a: &Residue, b: &Residue) -> Residue {
        match (a, b, self.word) {
            (Residue::Word(x), Residue::Word(y), Some(m)) => {
                let s = x + y;
                Residue::Word(if s >= m { s - m } else { s })
            }
            _ => {
                let s = a.to_biguint() + b.to_biguint();
                Residue::Big(if s >= self.p { s - &self.p } else { s })
            }
        }
    }

    fn neg(&self, a: &Residue) -> Residue {
        match (a, self.word) {
            (Residue::Word(x), Some(m)) => Residue::Word(if *x == 0 { 0 } else { m - x }),
            _ => {
                let x = a.to_biguint();
                Residue::Big(if x.is_zero() { x } else { &self.p - x })
            }
        }
    }

    fn sub(&self, a: &Residue, b: &Residue) -> Residue {
        match (a, b, self.word) {
            (Residue::Word(x), Residue::Word(y), Some(m)) => {
                Residue::Word(if x >= y { x - y } else { m - (y - x) })
            }
            _ => self.add(a, &self.neg(b)),
        }
    }

    fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        match (a, b, self.word) {
            (Residue::Word(x), Residue::Word(y), Some(m)) => {
                Residue::Word(((*x as u128 * *y as u128) % m as u128) as u64)
            }
            _ => Residue::Big((a.to_biguint() * b.to_biguint()) % &self.p),
        }
    }

    fn pow(&self, a: &Residue, e: &BigUint) -> Residue {
        if let (Residue::Word(x), Some(m)) = (a, self.word) {
            let mut acc: u128 = 1;
            let mut base = *x as u128;
            let m = m as u128;
            for i in 0..e.bits() {
                if e.bit(i) {
                    acc = acc * base % m;
                }
                base = base * base % m;
            }
            return Residue::Word(acc as u64);
        }
        Residue::Big(a.to_biguint().modpow(e, &self.p))
    }

    fn inv(&self, a: &Residue) -> Option<Residue> {
        if a.is_zero() {
            return None;
        }
        match (a, self.word) {
            (Residue::Word(x), Some(m)) => {
                let (mut r0, mut r1) = (m as i128, *x as i128);
                let (mut s0, mut s1) = (0i128, 1i128);
                while r1 != 0 {
                    let q = r0 / r1;
                    (r0, r1) = (r1, r0 - q * r1);
                    (s0, s1) = (s1, s0 - q * s1);
                }
                Some(Residue::Word(s0.rem_euclid(m as i128) as u64))
            }
            _ => a.to_biguint().modinv(&self.p).map(Residue::Big),
        }
    }

    fn legendre(&self, a: &Residue) -> i8 {
        if a.is_zero() {
            return 0;
        }
        let r = self.pow(a, &self.half);
        if r == self.one() {
            1
        } else {
            -1
        }
    }

    /// Tonelli-Shanks.
    fn sqrt(&self, a: &Residue) -> Option<Residue> {
        if a.is_zero() {
            return Some(self.zero());
        }
        if self.legendre(a) != 1 {
            return None;
        }
        let one = self.one();
        let mut m = self.two_adicity;
        let mut c = self.root_of_unity.clone();
        let mut t = self.pow(a, &self.odd);
        let mut r = self.pow(a, &((&self.odd + 1u32) >> 1));
        while t != one {
            let mut i = 0;
            let mut t2 = t.clone();
            while t2 != one {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.mul(&b, &b);
            }
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }
}

/// Legendre symbol `(a | p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre_symbol(a: &BigInt, p: &BigInt) -> i8 {
    let p = p.magnitude();
    let r = a.mod_floor(&BigInt::from(p.clone())).magnitude().clone();
    if r.is_zero() {
        return 0;
    }
    if r.modpow(&((p - 1u32) >> 1), p).is_one() {
        1
    } else {
        -1
    }
}

#[derive(Debug)]
struct FieldInner {
    base: PrimeField,
    degree: u8,
}

/// `F_p` (degree 1) or `F_p[s]/(s^2 - d)` (degree 2) with `d` the smallest
/// positive quadratic nonresidue mod `p`.
#[derive(Clone, Debug)]
pub struct FieldSpec(Arc<FieldInner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.degree == other.0.degree && self.0.base.p == other.0.base.p)
    }
}

impl Eq for FieldSpec {}

/// An element `c0 + c1*s`; `c1 = 0` for prime-field elements.
///
/// Ordering is lexicographic on `(c0, c1)` as integers, the canonical
/// order used for square-root signs and root lists.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    c0: Residue,
    c1: Residue,
}

impl FieldElement {
    pub fn coeffs(&self) -> (BigUint, BigUint) {
        (self.c0.to_biguint(), self.c1.to_biguint())
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    /// True when the element lies in the prime subfield.
    pub fn is_prime_field(&self) -> bool {
        self.c1.is_zero()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c1.is_zero() {
            write!(f, "{}", self.c0)
        } else {
            write!(f, "{}+{}*s", self.c0, self.c1)
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FieldSpec {
    /// Builds `F_p` (degree 1) or `F_{p^2}` (degree 2).
    pub fn new(p: &BigInt, degree: u8) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(invalid(format!("unsupported extension degree {degree}")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if p < &BigInt::from(5) {
            return Err(invalid(format!("characteristic must be at least 5, got {p}")));
        }
        let base = PrimeField::new(p.magnitude().clone());
        Ok(FieldSpec(Arc::new(FieldInner { base, degree })))
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(&BigInt::from(p), 1)
    }

    pub fn quadratic(p: u64) -> Result<Self> {
        Self::new(&BigInt::from(p), 2)
    }

    /// The quadratic extension over the same prime (or `self` if already degree 2).
    pub fn extension(&self) -> FieldSpec {
        if self.degree() == 2 {
            return self.clone();
        }
        FieldSpec(Arc::new(FieldInner {
            base: PrimeField::new(self.0.base.p.clone()),
            degree: 2,
        }))
    }

    pub fn p(&self) -> BigInt {
        BigInt::from(self.0.base.p.clone())
    }

    pub fn p_u64(&self) -> Option<u64> {
        self.0.base.word
    }

    pub fn degree(&self) -> u8 {
        self.0.degree
    }

    /// `d` with `s^2 = d`; only meaningful for degree 2.
    pub fn nonresidue(&self) -> Option<BigUint> {
        (self.degree() == 2).then(|| self.0.base.nonresidue.to_biguint())
    }

    /// Field size `q = p^degree`.
    pub fn order(&self) -> BigUint {
        self.0.base.p.pow(self.degree() as u32)
    }

    /// Field size as a machine word, when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        let p = self.p_u64()?;
        match self.degree() {
            1 => Some(p),
            _ => p.checked_mul(p),
        }
    }

    fn base(&self) -> &PrimeField {
        &self.0.base
    }

    fn pair(&self, c0: Residue, c1: Residue) -> FieldElement {
        FieldElement { c0, c1 }
    }

    pub fn zero(&self) -> FieldElement {
        self.pair(self.base().zero(), self.base().zero())
    }

    pub fn one(&self) -> FieldElement {
        self.pair(self.base().one(), self.base().zero())
    }

    pub fn from_u64(&self, v: u64) -> FieldElement {
        self.pair(self.base().from_u64(v), self.base().zero())
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        let mag = self.from_u64(v.unsigned_abs());
        if v < 0 {
            self.neg(&mag)
        } else {
            mag
        }
    }

    pub fn from_int(&self, v: &BigInt) -> FieldElement {
        self.pair(self.base().from_bigint(v), self.base().zero())
    }

    /// `c0 + c1*s`; rejects a nonzero `c1` in a prime field.
    pub fn from_coeffs(&self, c0: &BigInt, c1: &BigInt) -> Result<FieldElement> {
        let c1 = self.base().from_bigint(c1);
        if self.degree() == 1 && !c1.is_zero() {
            return Err(invalid("prime-field element cannot have an s-coefficient"));
        }
        Ok(self.pair(self.base().from_bigint(c0), c1))
    }

    /// The generator `s = sqrt(d)` of the quadratic extension.
    pub fn sqrt_nonresidue(&self) -> Result<FieldElement> {
        self.from_coeffs(&BigInt::zero(), &BigInt::one())
    }

    /// Checks that the element's coefficients are reduced for this field.
    pub fn contains(&self, a: &FieldElement) -> bool {
        let ok = |r: &Residue| r.to_biguint() < self.0.base.p;
        ok(&a.c0) && ok(&a.c1) && (self.degree() == 2 || a.c1.is_zero())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let f = self.base();
        self.pair(f.add(&a.c0, &b.c0), f.add(&a.c1, &b.c1))
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let f = self.base();
        self.pair(f.sub(&a.c0, &b.c0), f.sub(&a.c1, &b.c1))
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let f = self.base();
        self.pair(f.neg(&a.c0), f.neg(&a.c1))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let f = self.base();
        if a.c1.is_zero() && b.c1.is_zero() {
            return self.pair(f.mul(&a.c0, &b.c0), f.zero());
        }
        let d = &f.nonresidue;
        let c0 = f.add(&f.mul(&a.c0, &b.c0), &f.mul(d, &f.mul(&a.c1, &b.c1)));
        let c1 = f.add(&f.mul(&a.c0, &b.c1), &f.mul(&a.c1, &b.c0));
        self.pair(c0, c1)
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Multiplies by a small integer constant.
    pub fn scale(&self, a: &FieldElement, k: i64) -> FieldElement {
        self.mul(a, &self.from_i64(k))
    }

    /// `c0^2 - d*c1^2`, the norm down to `F_p` (as a prime-field element).
    fn norm(&self, a: &FieldElement) -> Residue {
        let f = self.base();
        if a.c1.is_zero() {
            return f.mul(&a.c0, &a.c0);
        }
        f.sub(&f.mul(&a.c0, &a.c0), &f.mul(&f.nonresidue, &f.mul(&a.c1, &a.c1)))
    }

    /// `c0 - c1*s`, the `p`-power Frobenius.
    pub fn conjugate(&self, a: &FieldElement) -> FieldElement {
        self.pair(a.c0.clone(), self.base().neg(&a.c1))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        let f = self.base();
        let n_inv = f.inv(&self.norm(a)).ok_or(Error::NotInvertible)?;
        let conj = self.conjugate(a);
        Ok(self.pair(f.mul(&conj.c0, &n_inv), f.mul(&conj.c1, &n_inv)))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        if a.c1.is_zero() {
            return self.pair(self.base().pow(&a.c0, e), self.base().zero());
        }
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Quadratic character: 0 on zero, 1 on nonzero squares, -1 otherwise.
    pub fn quadratic_character(&self, a: &FieldElement) -> i8 {
        if self.degree() == 1 {
            return self.base().legendre(&a.c0);
        }
        // an element of F_{p^2} is a square iff its norm is a square in F_p
        self.base().legendre(&self.norm(a))
    }

    /// A square root in canonical sign (the smaller of `r`, `-r` in
    /// element order), or `None` for nonsquares.
    pub fn sqrt(&self, a: &FieldElement) -> Option<FieldElement> {
        let root = if self.degree() == 1 {
            self.pair(self.base().sqrt(&a.c0)?, self.base().zero())
        } else {
            self.sqrt_quadratic(a)?
        };
        let other = self.neg(&root);
        Some(root.min(other))
    }

    fn sqrt_quadratic(&self, a: &FieldElement) -> Option<FieldElement> {
        let f = self.base();
        if a.c1.is_zero() {
            if let Some(r) = f.sqrt(&a.c0) {
                return Some(self.pair(r, f.zero()));
            }
            // a0 is a nonresidue, so a0/d is a residue and sqrt(a0) = sqrt(a0/d)*s
            let t = f.mul(&a.c0, &f.inv(&f.nonresidue)?);
            return Some(self.pair(f.zero(), f.sqrt(&t)?));
        }
        let n = f.sqrt(&self.norm(a))?;
        let half = f.inv(&f.from_u64(2))?;
        for cand in [f.add(&a.c0, &n), f.sub(&a.c0, &n)] {
            let x0_sq = f.mul(&cand, &half);
            if x0_sq.is_zero() {
                continue;
            }
            if let Some(x0) = f.sqrt(&x0_sq) {
                let x1 = f.mul(&a.c1, &f.inv(&f.add(&x0, &x0))?);
                return Some(self.pair(x0, x1));
            }
        }
        None
    }

    /// A primitive cube root of unity, present iff `q = 1 (mod 3)`.
    pub fn cube_root_of_unity(&self) -> Option<FieldElement> {
        if &self.order() % 3u32 != BigUint::one() {
            return None;
        }
        let s = self.sqrt(&self.from_i64(-3))?;
        let half = self.inv(&self.from_u64(2)).ok()?;
        Some(self.mul(&self.sub(&s, &self.one()), &half))
    }

    /// Some `x` with `x^3 = a`, or `None` when `a` is not a cube.
    pub fn cube_root(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return Some(self.zero());
        }
        let q1 = self.order() - 1u32;
        if &q1 % 3u32 != BigUint::zero() {
            // cubing is a bijection; its inverse is x -> x^((2q - 1) / 3)
            let e = (&q1 * 2u32 + 1u32) / 3u32;
            return Some(self.pow(a, &e));
        }
        if !self.pow(a, &(&q1 / 3u32)).eq(&self.one()) {
            return None;
        }
        let mut s = 0u32;
        let mut m = q1.clone();
        while &m % 3u32 == BigUint::zero() {
            m /= 3u32;
            s += 1;
        }
        // 3e = 1 (mod m)
        let e = if &m % 3u32 == BigUint::one() { (&m * 2u32 + 1u32) / 3u32 } else { (&m + 1u32) / 3u32 };
        let mut y = self.pow(a, &e);
        let mut b = self.div(&self.mul(&self.square(&y), &y), a).ok()?;
        if b == self.one() {
            return Some(y);
        }
        // b lies in the 3-Sylow subgroup; reduce its order with powers of a
        // generator c of that subgroup
        let third = &q1 / 3u32;
        let z = (1u64..)
            .map(|k| self.add(&self.from_u64(k), &self.sqrt_nonresidue_or_one()))
            .find(|z| self.pow(z, &third) != self.one())?;
        let mut c = self.pow(&z, &m);
        let mut r = s;
        let cube = |x: &FieldElement| self.mul(&self.square(x), x);
        while b != self.one() {
            let mut i = 0u32;
            let mut t = b.clone();
            while t != self.one() {
                t = cube(&t);
                i += 1;
            }
            let mut step = c.clone();
            for _ in 0..r - i - 1 {
                step = cube(&step);
            }
            let step3 = cube(&step);
            let mut bi = b.clone();
            let mut si = step3.clone();
            for _ in 0..i - 1 {
                bi = cube(&bi);
                si = cube(&si);
            }
            if bi == si {
                y = self.div(&y, &step).ok()?;
                b = self.div(&b, &step3).ok()?;
            } else {
                y = self.mul(&y, &step);
                b = self.mul(&b, &step3);
            }
            c = step3;
            r = i;
        }
        Some(y)
    }

    fn sqrt_nonresidue_or_one(&self) -> FieldElement {
        if self.degree() == 2 {
            self.pair(self.base().zero(), self.base().one())
        } else {
            self.zero()
        }
    }

    /// Decimal serialization: `"c0"` or `"c0+c1*s"`.
    pub fn format(&self, a: &FieldElement) -> String {
        a.to_string()
    }

    /// Parses `"c0"`, `"c0+c1*s"` or `"c1*s"`; integers may be negative
    /// or `0x`-hex and are reduced mod `p`.
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        use crate::arith::parse_integer;
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = s.strip_suffix("*s") {
            // split "c0+c1" at the last '+' that is not a leading sign
            let split = body
                .char_indices()
                .rev()
                .find(|&(i, c)| c == '+' && i > 0)
                .map(|(i, _)| i);
            let (c0, c1) = match split {
                Some(i) => (parse_integer(&body[..i])?, parse_integer(&body[i + 1..])?),
                None => (BigInt::zero(), parse_integer(body)?),
            };
            return self.from_coeffs(&c0, &c1);
        }
        Ok(self.from_int(&parse_integer(&s)?))
    }

    /// Position of `a` in [`elements`](Self::elements) for word-sized fields.
    pub fn index_of(&self, a: &FieldElement) -> Option<usize> {
        let p = self.p_u64()?;
        match (&a.c0, &a.c1) {
            (Residue::Word(c0), Residue::Word(c1)) => Some((c0 + c1 * p) as usize),
            _ => None,
        }
    }

    /// All field elements in index order (`c0 + c1*p`). Word-sized fields only.
    pub fn elements(&self) -> Result<impl Iterator<Item = FieldElement> + '_> {
        let q = self
            .order_u64()
            .ok_or_else(|| Error::BudgetExceeded("field too large to enumerate".into()))?;
        let p = self.p_u64().unwrap();
        Ok((0..q).map(move |i| self.pair(Residue::Word(i % p), Residue::Word(i / p))))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let bytes = (self.0.base.p.bits() as usize).div_ceil(8) + 8;
        let mut draw = || {
            let raw: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
            self.base().from_biguint(&BigUint::from_bytes_le(&raw))
        };
        let c0 = draw();
        let c1 = if self.degree() == 2 { draw() } else { self.base().zero() };
        self.pair(c0, c1)
    }

    /// Integer value of a prime-field element in `[0, p)`.
    pub fn to_int(&self, a: &FieldElement) -> Result<BigInt> {
        if !a.c1.is_zero() {
            return Err(invalid(format!("{a} is not in the prime field")));
        }
        Ok(BigInt::from(a.c0.to_biguint()))
    }

    /// Centered integer value in `(-p/2, p/2]`, for small-field reporting.
    pub fn to_centered_int(&self, a: &FieldElement) -> Result<BigInt> {
        let v = self.to_int(a)?;
        let p = self.p();
        Ok(if &v * 2 > p { v - p } else { v })
    }
}
