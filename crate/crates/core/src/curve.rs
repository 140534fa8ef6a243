//! Short Weierstrass curves over `F_p` / `F_{p^2}`, the long-form
//! discriminant, j-invariants and character-sum point counting.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::arith::parse_integer;
use crate::error::{invalid, Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Largest field size accepted by [`PointCounter`].
pub const COUNT_LIMIT: u64 = 1_000_000;

/// `y^2 = x^3 + A x + B` with its j-invariant cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    field: FieldSpec,
    a: FieldElement,
    b: FieldElement,
    j: FieldElement,
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongWeierstrass {
    pub a1: FieldElement,
    pub a2: FieldElement,
    pub a3: FieldElement,
    pub a4: FieldElement,
    pub a6: FieldElement,
}

impl LongWeierstrass {
    /// The short form `(0, 0, 0, A, B)`.
    pub fn short(field: &FieldSpec, a: &FieldElement, b: &FieldElement) -> Self {
        LongWeierstrass {
            a1: field.zero(),
            a2: field.zero(),
            a3: field.zero(),
            a4: a.clone(),
            a6: b.clone(),
        }
    }
}

/// `-b2^2 b8 + 9 b2 b4 b6 - 8 b4^3 - 27 b6^2`.
pub fn long_discriminant(field: &FieldSpec, c: &LongWeierstrass) -> FieldElement {
    let f = field;
    let b2 = f.add(&f.square(&c.a1), &f.scale(&c.a2, 4));
    let b4 = f.add(&f.scale(&c.a4, 2), &f.mul(&c.a1, &c.a3));
    let b6 = f.add(&f.square(&c.a3), &f.scale(&c.a6, 4));
    let b8 = {
        let t1 = f.mul(&f.square(&c.a1), &c.a6);
        let t2 = f.scale(&f.mul(&c.a2, &c.a6), 4);
        let t3 = f.mul(&f.mul(&c.a1, &c.a3), &c.a4);
        let t4 = f.mul(&c.a2, &f.square(&c.a3));
        let t5 = f.square(&c.a4);
        let pos = f.add(&f.add(&t1, &t2), &t4);
        f.sub(&pos, &f.add(&t3, &t5))
    };
    let terms = [
        f.neg(&f.mul(&f.square(&b2), &b8)),
        f.scale(&f.mul(&f.mul(&b2, &b4), &b6), 9),
        f.scale(&f.mul(&f.square(&b4), &b4), -8),
        f.scale(&f.square(&b6), -27),
    ];
    terms.iter().fold(f.zero(), |acc, t| f.add(&acc, t))
}

/// `4A^3 + 27B^2`.
fn short_disc_core(field: &FieldSpec, a: &FieldElement, b: &FieldElement) -> FieldElement {
    let a3 = field.mul(&field.square(a), a);
    field.add(&field.scale(&a3, 4), &field.scale(&field.square(b), 27))
}

impl EllipticCurve {
    pub fn new(field: &FieldSpec, a: FieldElement, b: FieldElement) -> Result<Self> {
        let core = short_disc_core(field, &a, &b);
        if core.is_zero() {
            return Err(Error::Singular);
        }
        let a3x4 = field.scale(&field.mul(&field.square(&a), &a), 4);
        let j = field.div(&field.scale(&a3x4, 1728), &core)?;
        Ok(EllipticCurve {
            field: field.clone(),
            a,
            b,
            j,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    pub fn j(&self) -> &FieldElement {
        &self.j
    }

    /// `-16 (4A^3 + 27B^2)`.
    pub fn discriminant(&self) -> FieldElement {
        self.field
            .scale(&short_disc_core(&self.field, &self.a, &self.b), -16)
    }

    /// The same equation over the quadratic extension.
    pub fn over_extension(&self) -> EllipticCurve {
        EllipticCurve {
            field: self.field.extension(),
            a: self.a.clone(),
            b: self.b.clone(),
            j: self.j.clone(),
        }
    }

    pub fn to_json(&self) -> CurveJson {
        CurveJson {
            p: self.field.p().to_string(),
            degree: self.field.degree(),
            a: self.field.format(&self.a),
            b: self.field.format(&self.b),
        }
    }

    pub fn from_json(c: &CurveJson) -> Result<Self> {
        let field = FieldSpec::new(&parse_integer(&c.p)?, c.degree)?;
        let a = field.parse(&c.a)?;
        let b = field.parse(&c.b)?;
        EllipticCurve::new(&field, a, b)
    }
}

/// Wire form `{"p", "degree", "A", "B"}`; integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveJson {
    pub p: String,
    pub degree: u8,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
}

pub fn j_invariant(curve: &EllipticCurve) -> FieldElement {
    curve.j.clone()
}

/// A curve with the given j-invariant. The twist is arbitrary.
pub fn curve_from_j(field: &FieldSpec, j: &FieldElement) -> EllipticCurve {
    let j1728 = field.from_u64(1728);
    let (a, b) = if j.is_zero() {
        (field.zero(), field.one())
    } else if *j == j1728 {
        (field.one(), field.zero())
    } else {
        let k = field.sub(&j1728, j);
        let jk = field.mul(j, &k);
        (field.scale(&jk, 3), field.scale(&field.mul(&jk, &k), 2))
    };
    EllipticCurve::new(field, a, b).expect("curve_from_j models are non-singular")
}

/// `256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)` for the Legendre curve
/// `y^2 = x(x - 1)(x - l)`.
pub fn j_from_lambda(field: &FieldSpec, lambda: &FieldElement) -> Result<FieldElement> {
    let lm1 = field.sub(lambda, &field.one());
    let den = field.mul(&field.square(lambda), &field.square(&lm1));
    if den.is_zero() {
        return Err(invalid("lambda must differ from 0 and 1"));
    }
    let l2 = field.square(lambda);
    let inner = field.add(&field.sub(&l2, lambda), &field.one());
    let num = field.scale(&field.mul(&field.square(&inner), &inner), 256);
    field.div(&num, &den)
}

/// Quadratic-character table for one field, reusable across curves.
pub struct PointCounter {
    field: FieldSpec,
    chi: Vec<i8>,
}

impl PointCounter {
    pub fn new(field: &FieldSpec) -> Result<Self> {
        let q = field
            .order_u64()
            .filter(|&q| q <= COUNT_LIMIT)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "point counting needs q <= {COUNT_LIMIT}, got {}",
                    field.order()
                ))
            })?;
        let mut chi = vec![-1i8; q as usize];
        chi[0] = 0;
        for x in field.elements()? {
            if !x.is_zero() {
                let i = field.index_of(&field.square(&x)).unwrap();
                chi[i] = 1;
            }
        }
        Ok(PointCounter {
            field: field.clone(),
            chi,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// `#E(F_q)` including the point at infinity.
    pub fn count(&self, curve: &EllipticCurve) -> Result<BigInt> {
        if curve.field != self.field {
            return Err(Error::FieldMismatch);
        }
        let f = &self.field;
        let mut sum: i64 = 0;
        for x in f.elements()? {
            let rhs = f.add(&f.mul(&x, &f.add(&f.square(&x), &curve.a)), &curve.b);
            sum += 1 + self.chi[f.index_of(&rhs).unwrap()] as i64;
        }
        Ok(BigInt::from(1 + sum))
    }

    /// Frobenius trace `q + 1 - #E(F_q)`.
    pub fn trace(&self, curve: &EllipticCurve) -> Result<BigInt> {
        let q = BigInt::from(self.field.order());
        Ok(q + 1 - self.count(curve)?)
    }

    /// `|t|` over every twist of the curves with j-invariant `j`. Quadratic
    /// twists only flip the sign, so this is a single value unless `j` is
    /// 0 or 1728, whose sextic and quartic twists can change `|t|`.
    pub fn twist_traces(&self, j: &FieldElement) -> Result<BTreeSet<BigInt>> {
        let f = &self.field;
        let family = if j.is_zero() {
            6u64
        } else if *j == f.from_u64(1728) {
            4
        } else {
            return Ok(BTreeSet::from([self.trace(&curve_from_j(f, j))?.abs()]));
        };
        let units = f.order() - 1u32;
        let r = (&units % family).to_u64_digits().first().copied().unwrap_or(0);
        let classes = num_integer::gcd(family, r);
        let exp = units / classes;
        let mut keys = BTreeSet::new();
        let mut out = BTreeSet::new();
        for d in f.elements()?.skip(1) {
            if keys.insert(f.pow(&d, &exp)) {
                let (a, b) = if family == 6 { (f.zero(), d) } else { (d, f.zero()) };
                out.insert(self.trace(&EllipticCurve::new(f, a, b)?)?.abs());
                if keys.len() as u64 == classes {
                    break;
                }
            }
        }
        Ok(out)
    }

    pub fn is_supersingular(&self, curve: &EllipticCurve) -> Result<bool> {
        let t = self.trace(curve)?;
        Ok((t % self.field.p()) == BigInt::from(0))
    }
}

pub fn point_count(curve: &EllipticCurve) -> Result<BigInt> {
    PointCounter::new(&curve.field)?.count(curve)
}

pub fn trace(curve: &EllipticCurve) -> Result<BigInt> {
    PointCounter::new(&curve.field)?.trace(curve)
}

pub fn is_supersingular_oracle(curve: &EllipticCurve) -> Result<bool> {
    PointCounter::new(&curve.field)?.is_supersingular(curve)
}
