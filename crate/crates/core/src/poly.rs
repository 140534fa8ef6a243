//! The classical modular polynomial of level 2 and root finding for
//! polynomials of degree at most three over `F_p` / `F_{p^2}`.
//!
//! Polynomials are coefficient slices in increasing degree.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::field::{FieldElement, FieldSpec};

/// `PHI2[i][k]` is the coefficient of `X^i Y^k` in
///
/// ```text
/// Phi_2(X, Y) = X^3 + Y^3 - X^2 Y^2 + 1488 (X^2 Y + X Y^2) - 162000 (X^2 + Y^2)
///             + 40773375 X Y + 8748000000 (X + Y) - 157464000000000
/// ```
pub const PHI2: [[i64; 4]; 4] = [
    [-157_464_000_000_000, 8_748_000_000, -162_000, 1],
    [8_748_000_000, 40_773_375, 1488, 0],
    [-162_000, 1488, -1, 0],
    [1, 0, 0, 0],
];

/// Value of `Phi_2(j1, j2)` in the field.
pub fn phi2_eval(field: &FieldSpec, j1: &FieldElement, j2: &FieldElement) -> FieldElement {
    let in_y = phi2_in_y(field, j1);
    eval(field, &in_y, j2)
}

/// Coefficients of `Phi_2(j, Y)` as a polynomial in `Y` (monic cubic).
pub fn phi2_in_y(field: &FieldSpec, j: &FieldElement) -> [FieldElement; 4] {
    let j2 = field.square(j);
    let j3 = field.mul(&j2, j);
    let powers = [field.one(), j.clone(), j2, j3];
    std::array::from_fn(|k| {
        let mut acc = field.zero();
        for (i, jp) in powers.iter().enumerate() {
            let c = PHI2[i][k];
            if c != 0 {
                acc = field.add(&acc, &field.mul(&field.from_i64(c), jp));
            }
        }
        acc
    })
}

/// Horner evaluation.
pub fn eval(field: &FieldSpec, coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
    coeffs
        .iter()
        .rev()
        .fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
}

/// Divides by `(Y - r)`, returning `(quotient, remainder)`.
pub fn divide_by_linear(
    field: &FieldSpec,
    coeffs: &[FieldElement],
    r: &FieldElement,
) -> (Vec<FieldElement>, FieldElement) {
    if coeffs.is_empty() {
        return (Vec::new(), field.zero());
    }
    let n = coeffs.len() - 1;
    let mut quot = vec![field.zero(); n];
    let mut carry = coeffs[n].clone();
    for k in (0..n).rev() {
        quot[k] = carry.clone();
        carry = field.add(&coeffs[k], &field.mul(&carry, r));
    }
    (quot, carry)
}

/// Roots of a polynomial with multiplicity, in canonical element order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootMultiset {
    roots: Vec<(FieldElement, u32)>,
}

impl RootMultiset {
    /// Groups a list of roots, one entry per occurrence.
    pub fn from_roots(mut list: Vec<FieldElement>) -> Self {
        list.sort();
        let mut roots: Vec<(FieldElement, u32)> = Vec::new();
        for r in list {
            match roots.last_mut() {
                Some((last, m)) if *last == r => *m += 1,
                _ => roots.push((r, 1)),
            }
        }
        RootMultiset { roots }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(FieldElement, u32)> {
        self.roots.iter()
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> u32 {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn multiplicity(&self, x: &FieldElement) -> u32 {
        self.roots
            .iter()
            .find(|(r, _)| r == x)
            .map_or(0, |(_, m)| *m)
    }

    /// Each root repeated by its multiplicity, in canonical order.
    pub fn flatten(&self) -> Vec<FieldElement> {
        self.roots
            .iter()
            .flat_map(|(r, m)| std::iter::repeat_n(r.clone(), *m as usize))
            .collect()
    }
}

/// All roots in the coefficient field of a polynomial of degree 1..=3,
/// with multiplicity. `seed` drives the randomized splitting step; the
/// result does not depend on it.
pub fn roots_deg_le3(field: &FieldSpec, coeffs: &[FieldElement], seed: u64) -> Result<RootMultiset> {
    let f = trimmed(coeffs);
    if f.is_empty() {
        return Err(invalid("zero polynomial has no finite root set"));
    }
    if f.len() > 4 {
        return Err(invalid(format!("degree {} exceeds 3", f.len() - 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(RootMultiset::from_roots(all_roots(field, &f, &mut rng)))
}

/// The 2-isogenous neighbours of `j`: roots of `Phi_2(j, Y)` in the field.
pub fn phi2_neighbors(field: &FieldSpec, j: &FieldElement, seed: u64) -> RootMultiset {
    let cubic = phi2_in_y(field, j);
    roots_deg_le3(field, &cubic, seed).expect("Phi_2(j, Y) is a monic cubic")
}

/// Roots of `Phi_2(cur, Y) / (Y - prev)`: the non-backtracking continuations
/// of the walk `prev -> cur`. Exactly one occurrence of `prev` is removed.
pub fn phi2_continuations(
    field: &FieldSpec,
    prev: &FieldElement,
    cur: &FieldElement,
) -> Result<RootMultiset> {
    let cubic = phi2_in_y(field, cur);
    let (quadratic, rem) = divide_by_linear(field, &cubic, prev);
    if !rem.is_zero() {
        return Err(invalid(format!("{prev} is not a neighbour of {cur}")));
    }
    Ok(RootMultiset::from_roots(quadratic_roots(field, &quadratic)))
}

fn trimmed(coeffs: &[FieldElement]) -> Vec<FieldElement> {
    let mut v = coeffs.to_vec();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn all_roots(field: &FieldSpec, f: &[FieldElement], rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    match f.len() {
        0 | 1 => Vec::new(),
        2 => vec![linear_root(field, f)],
        3 => quadratic_roots(field, f),
        _ => {
            let f = monic(field, f);
            if let Some(roots) = cubic_roots_radical(field, &f) {
                return roots;
            }
            let x = vec![field.zero(), field.one()];
            let xq = powmod(field, &x, &field.order(), &f);
            let g = gcd(field, &f, &sub(field, &xq, &x));
            if g.len() < 2 {
                return Vec::new();
            }
            let r = one_root(field, &g, rng);
            let (q, _) = divide_by_linear(field, &f, &r);
            let mut out = vec![r];
            out.extend(all_roots(field, &q, rng));
            out
        }
    }
}

/// Roots of a monic cubic by radicals, for `q = 1 (mod 3)`. Returns `None`
/// in the one-root case (nonsquare discriminant), which needs the gcd path.
fn cubic_roots_radical(field: &FieldSpec, f: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let omega = field.cube_root_of_unity()?;
    let inv = |k: i64| field.inv(&field.from_i64(k)).expect("small constants are units");
    let (a0, a1, a2) = (&f[0], &f[1], &f[2]);
    // Y = y - a2/3 turns f into y^3 + P y + Q
    let shift = field.mul(a2, &inv(3));
    let p = field.sub(a1, &field.mul(a2, &shift));
    let q = field.add(
        &field.sub(&field.scale(&field.mul(&shift, &field.square(&shift)), 2), &field.mul(a1, &shift)),
        a0,
    );
    let unshift = |y: FieldElement| field.sub(&y, &shift);
    let rotations = |u: FieldElement| {
        let u1 = field.mul(&u, &omega);
        let u2 = field.mul(&u1, &omega);
        [u, u1, u2]
    };
    if p.is_zero() {
        let u = field.cube_root(&field.neg(&q));
        return Some(match u {
            None => Vec::new(),
            Some(u) => rotations(u).into_iter().map(unshift).collect(),
        });
    }
    let p_cube = field.mul(&field.square(&p), &p);
    let d = field.add(&field.mul(&field.square(&q), &inv(4)), &field.mul(&p_cube, &inv(27)));
    if d.is_zero() {
        let double = field.div(&field.scale(&q, -3), &field.scale(&p, 2)).ok()?;
        let single = field.div(&field.scale(&q, 3), &p).ok()?;
        return Some([double.clone(), double, single].into_iter().map(unshift).collect());
    }
    let s = field.sqrt(&d)?;
    let half_q = field.mul(&q, &inv(2));
    let mut w = field.sub(&s, &half_q);
    if w.is_zero() {
        w = field.neg(&field.add(&s, &half_q));
    }
    let Some(u) = field.cube_root(&w) else {
        return Some(Vec::new());
    };
    let p_third = field.mul(&p, &inv(3));
    Some(
        rotations(u)
            .into_iter()
            .map(|uk| {
                let v = field.div(&p_third, &uk).expect("u is nonzero");
                unshift(field.sub(&uk, &v))
            })
            .collect(),
    )
}

fn linear_root(field: &FieldSpec, f: &[FieldElement]) -> FieldElement {
    let r = field.div(&f[0], &f[1]).expect("leading coefficient is nonzero");
    field.neg(&r)
}

/// Roots of `a Y^2 + b Y + c` (with multiplicity) via the quadratic formula.
fn quadratic_roots(field: &FieldSpec, f: &[FieldElement]) -> Vec<FieldElement> {
    let f = trimmed(f);
    match f.len() {
        0 | 1 => return Vec::new(),
        2 => return vec![linear_root(field, &f)],
        _ => {}
    }
    let (c, b, a) = (&f[0], &f[1], &f[2]);
    let disc = field.sub(&field.square(b), &field.scale(&field.mul(a, c), 4));
    let Some(s) = field.sqrt(&disc) else {
        return Vec::new();
    };
    let two_a_inv = field.inv(&field.scale(a, 2)).expect("leading coefficient is nonzero");
    let nb = field.neg(b);
    vec![
        field.mul(&field.add(&nb, &s), &two_a_inv),
        field.mul(&field.sub(&nb, &s), &two_a_inv),
    ]
}

/// One root of a squarefree `g` that splits into distinct linear factors.
fn one_root(field: &FieldSpec, g: &[FieldElement], rng: &mut ChaCha8Rng) -> FieldElement {
    match g.len() {
        2 => linear_root(field, g),
        3 => quadratic_roots(field, g)
            .into_iter()
            .next()
            .expect("g splits over the field"),
        _ => {
            // equal-degree splitting: gcd(g, (Y + delta)^((q-1)/2) - 1)
            let half = (field.order() - 1u32) >> 1;
            loop {
                let delta = field.random(rng);
                let base = vec![delta, field.one()];
                let mut h = powmod(field, &base, &half, g);
                if h.is_empty() {
                    continue;
                }
                h[0] = field.sub(&h[0], &field.one());
                let d = gcd(field, g, &trimmed(&h));
                if d.len() >= 2 && d.len() < g.len() {
                    return one_root(field, &d, rng);
                }
            }
        }
    }
}

fn monic(field: &FieldSpec, f: &[FieldElement]) -> Vec<FieldElement> {
    let inv = field.inv(f.last().unwrap()).expect("nonzero leading coefficient");
    f.iter().map(|c| field.mul(c, &inv)).collect()
}

fn sub(field: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let n = a.len().max(b.len());
    let zero = field.zero();
    let v: Vec<_> = (0..n)
        .map(|i| field.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trimmed(&v)
}

fn rem(field: &FieldSpec, a: &[FieldElement], m: &[FieldElement]) -> Vec<FieldElement> {
    let mut r = trimmed(a);
    let dm = m.len() - 1;
    let lead_inv = field.inv(&m[dm]).expect("nonzero modulus");
    while r.len() > dm {
        let k = r.len() - 1;
        let coef = field.mul(&r[k], &lead_inv);
        for i in 0..=dm {
            let t = field.mul(&coef, &m[i]);
            r[k - dm + i] = field.sub(&r[k - dm + i], &t);
        }
        r = trimmed(&r);
    }
    r
}

fn mulmod(field: &FieldSpec, a: &[FieldElement], b: &[FieldElement], m: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            prod[i + k] = field.add(&prod[i + k], &field.mul(x, y));
        }
    }
    rem(field, &prod, m)
}

fn powmod(field: &FieldSpec, base: &[FieldElement], e: &BigUint, m: &[FieldElement]) -> Vec<FieldElement> {
    let base = rem(field, base, m);
    let mut acc = vec![field.one()];
    for i in (0..e.bits()).rev() {
        acc = mulmod(field, &acc, &acc, m);
        if e.bit(i) {
            acc = mulmod(field, &acc, &base, m);
        }
    }
    acc
}

/// Monic gcd.
fn gcd(field: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut a = trimmed(a);
    let mut b = trimmed(b);
    while !b.is_empty() {
        let r = rem(field, &a, &b);
        a = b;
        b = r;
    }
    if a.is_empty() {
        return a;
    }
    monic(field, &a)
}
