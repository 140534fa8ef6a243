//! Exact integer utilities: 2-adic valuation, integer logarithms and roots,
//! primality and factorization.
//!
//! Everything here works on [`Integer`] (an arbitrary-precision signed
//! integer), so the bound computations stay exact at 1024 bits and beyond.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

pub type Integer = BigInt;

/// Largest `k` with `2^k | n`. The sign of `n` is ignored.
pub fn nu2(n: &BigInt) -> Result<u64> {
    n.trailing_zeros().ok_or(Error::ZeroValuation)
}

/// `floor(log2(n))` for `n >= 1`.
pub fn floor_log2(n: &BigInt) -> Result<u64> {
    if !n.is_positive() {
        return Err(invalid(format!("floor_log2 needs n >= 1, got {n}")));
    }
    Ok(n.bits() - 1)
}

/// Smallest `mu` with `4^mu >= p`, i.e. `ceil(log2(p) / 2)` for odd `p`.
pub fn mu_of(p: &BigInt) -> Result<u64> {
    if p < &BigInt::from(3) || p.is_even() {
        return Err(invalid(format!("mu_of needs an odd p >= 3, got {p}")));
    }
    // smallest k with 2^k >= p is bitlength(p - 1) when p is not a power of two
    let k = (p - 1u32).bits();
    Ok(k.div_ceil(2))
}

/// `floor(sqrt(n))` for `n >= 0`.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(invalid(format!("isqrt of negative {n}")));
    }
    Ok(n.sqrt())
}

/// Parses a decimal or `0x`-prefixed hexadecimal integer with optional sign.
pub fn parse_integer(s: &str) -> Result<BigInt> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let parsed = if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        BigInt::parse_bytes(hex.as_bytes(), 16)
    } else {
        BigInt::parse_bytes(body.as_bytes(), 10)
    };
    let v = parsed.ok_or_else(|| invalid(format!("cannot parse integer {s:?}")))?;
    Ok(if neg { -v } else { v })
}

// ---------------------------------------------------------------------------
// primality

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Extra strong-pseudoprime rounds above 2^64: 64 rounds give error < 4^-64.
const BIG_MR_ROUNDS: usize = 64;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &SMALL_PRIMES {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, a: &BigUint, d: &BigUint, s: u64) -> bool {
    let n_minus_1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Primality test: deterministic below 2^64, strong-pseudoprime rounds above.
/// Negative inputs are never prime.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let n = n.magnitude();
    for &sp in small_primes().iter().take(200) {
        if (n % sp).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    for &a in &SMALL_PRIMES {
        if !strong_probable_prime(n, &BigUint::from(a), &d, s) {
            return false;
        }
    }
    // fixed seed keeps the verdict reproducible
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d0fb_45e5);
    let bytes = (n.bits() as usize).div_ceil(8) + 8;
    for _ in 0..BIG_MR_ROUNDS {
        let raw: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
        let a = BigUint::from_bytes_le(&raw) % (n - 3u32) + 2u32;
        if !strong_probable_prime(n, &a, &d, s) {
            return false;
        }
    }
    true
}

/// All primes `<= limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut k = i * i;
        while k <= n {
            composite[k] = true;
            k += i;
        }
    }
    out
}

/// A uniformly drawn prime of exactly `bits` bits with `p = residue (mod 2^k)`,
/// by rejection sampling. `modulus = 2^k` must be at most `2^(bits-1)` and
/// `residue` odd.
pub fn random_prime<R: Rng + ?Sized>(
    bits: u64,
    modulus: u64,
    residue: u64,
    rng: &mut R,
) -> Result<BigInt> {
    if bits < 3 || !modulus.is_power_of_two() || modulus.trailing_zeros() as u64 >= bits
        || residue.is_multiple_of(2) || residue >= modulus
    {
        return Err(invalid(format!(
            "cannot draw {bits}-bit primes = {residue} mod {modulus}"
        )));
    }
    let k = modulus.trailing_zeros() as u64;
    let top = BigUint::one() << (bits - 1);
    loop {
        let mut c = rng.gen_biguint_below(&top);
        c = ((c >> k) << k) | BigUint::from(residue) | &top;
        let c = BigInt::from(c);
        if is_prime(&c) {
            return Ok(c);
        }
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

fn small_primes() -> &'static [u64] {
    static CELL: OnceLock<Vec<u64>> = OnceLock::new();
    CELL.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

// ---------------------------------------------------------------------------
// factorization

/// Effort budget for the Pollard-rho stage of [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { rho_iterations: 20_000_000 }
    }
}

/// Prime factorization of `n >= 1` as sorted `(prime, exponent)` pairs.
pub fn factorize(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    factorize_with_budget(n, FactorBudget::default())
}

pub fn factorize_with_budget(n: &BigInt, budget: FactorBudget) -> Result<Vec<(BigInt, u32)>> {
    if !n.is_positive() {
        return Err(invalid(format!("factorize needs n >= 1, got {n}")));
    }
    let mut rest = n.magnitude().clone();
    let mut found: Vec<BigUint> = Vec::new();

    for &sp in small_primes() {
        if BigUint::from(sp * sp) > rest {
            break;
        }
        while (&rest % sp).is_zero() {
            rest /= sp;
            found.push(BigUint::from(sp));
        }
    }

    let mut remaining_effort = budget.rho_iterations;
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&BigInt::from(m.clone())) {
            found.push(m);
            continue;
        }
        let r = m.sqrt();
        if &r * &r == m {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let d = pollard_brent(&m, &mut remaining_effort).ok_or_else(|| {
            Error::BudgetExceeded(format!("pollard rho could not split {m}"))
        })?;
        stack.push(&m / &d);
        stack.push(d);
    }

    found.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for f in found {
        let f = BigInt::from(f);
        match out.last_mut() {
            Some((last, e)) if *last == f => *e += 1,
            _ => out.push((f, 1)),
        }
    }
    Ok(out)
}

/// Brent's variant of Pollard rho. Returns a nontrivial divisor of the
/// composite `n`, drawing from the shared iteration budget.
fn pollard_brent(n: &BigUint, effort: &mut u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    const BATCH: u64 = 128;
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                if *effort < steps {
                    return None;
                }
                *effort -= steps;
                g = q.gcd(n);
                k += steps;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn nu2_examples() {
        assert_eq!(nu2(&int(64)), Ok(6));
        assert_eq!(nu2(&int(-5)), Ok(0));
        assert_eq!(nu2(&int(-96)), Ok(5));
        assert_eq!(nu2(&int(0)), Err(Error::ZeroValuation));
    }

    #[test]
    fn floor_log2_examples() {
        assert_eq!(floor_log2(&int(1)), Ok(0));
        assert_eq!(floor_log2(&int(17)), Ok(4));
        assert_eq!(floor_log2(&int(1021)), Ok(9));
        assert!(floor_log2(&int(0)).is_err());
        assert!(floor_log2(&int(-4)).is_err());
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_of(&int(17)), Ok(3));
        assert_eq!(mu_of(&int(233)), Ok(4));
        assert_eq!(mu_of(&int(3)), Ok(1));
        assert!(mu_of(&int(16)).is_err());
        assert!(mu_of(&int(-7)).is_err());
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&int(0)), Ok(int(0)));
        assert_eq!(isqrt(&int(16)), Ok(int(4)));
        assert_eq!(isqrt(&int(17)), Ok(int(4)));
        assert!(isqrt(&int(-1)).is_err());
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(&int(17)));
        assert!(!is_prime(&int(1)));
        assert!(!is_prime(&int(0)));
        assert!(!is_prime(&int(-7)));
        let big = (BigInt::one() << 64) - 59;
        assert!(is_prime(&big));
        // independent check: no prime factor below 10^6
        assert!(small_primes().iter().all(|&q| !(big.magnitude() % q).is_zero()));
        // 2^89 - 1 and 2^127 - 1 are Mersenne primes, 2^128 + 1 is not prime
        assert!(is_prime(&((BigInt::one() << 89) - 1)));
        assert!(is_prime(&((BigInt::one() << 127) - 1)));
        assert!(!is_prime(&((BigInt::one() << 128) + 1)));
        // product of two 40-bit primes
        let p1 = BigInt::from(1_099_511_627_791u64);
        let p2 = BigInt::from(1_099_511_627_803u64);
        assert!(is_prime(&p1) && is_prime(&p2));
        assert!(!is_prime(&(&p1 * &p2)));
    }

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(100_000);
        let mut it = sieve.iter().peekable();
        for n in 0..=100_000u64 {
            let expect = it.peek() == Some(&&n);
            if expect {
                it.next();
            }
            assert_eq!(is_prime(&BigInt::from(n)), expect, "n = {n}");
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(&int(1)), Ok(vec![]));
        assert_eq!(factorize(&int(96)), Ok(vec![(int(2), 5), (int(3), 1)]));
        assert_eq!(
            factorize(&int(360)),
            Ok(vec![(int(2), 3), (int(3), 2), (int(5), 1)])
        );
        assert!(factorize(&int(0)).is_err());
    }

    #[test]
    fn factorize_beyond_trial_division() {
        let p1 = BigInt::from(1_099_511_627_791u64);
        let p2 = BigInt::from(1_099_511_627_803u64);
        let n = &p1 * &p2 * &p2 * 12;
        let f = factorize(&n).unwrap();
        assert_eq!(
            f,
            vec![(int(2), 2), (int(3), 1), (p1, 1), (p2, 2)]
        );
    }

    fn trial_division(mut n: u64) -> Vec<(BigInt, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((BigInt::from(d), e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((BigInt::from(n), 1));
        }
        out
    }

    #[test]
    fn factorize_agrees_with_trial_division() {
        for n in (1..1_000_000u64).step_by(997).chain(999_000..1_000_000) {
            assert_eq!(factorize(&BigInt::from(n)).unwrap(), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn parse_decimal_and_hex() {
        assert_eq!(parse_integer("17"), Ok(int(17)));
        assert_eq!(parse_integer("0x11"), Ok(int(17)));
        assert_eq!(parse_integer("-0x10"), Ok(int(-16)));
        assert!(parse_integer("seventeen").is_err());
    }

    proptest! {
        #[test]
        fn nu2_of_shifted_odd(m in any::<i64>(), k in 0u64..200) {
            let odd = BigInt::from(m) * 2 + 1;
            prop_assert_eq!(nu2(&(odd << k)), Ok(k));
        }

        #[test]
        fn floor_log2_brackets(n in 1u128..) {
            let f = floor_log2(&BigInt::from(n)).unwrap();
            prop_assert!(1u128 << f <= n);
            prop_assert!(f == 127 || n < 1u128 << (f + 1));
        }

        #[test]
        fn mu_brackets(half in 1u64..u64::MAX / 4) {
            let p = BigInt::from(half) * 2 + 1;
            let mu = mu_of(&p).unwrap();
            let four = BigInt::from(4);
            prop_assert!(four.pow(mu as u32 - 1) < p);
            prop_assert!(p <= four.pow(mu as u32));
        }

        #[test]
        fn isqrt_brackets(n in any::<u128>()) {
            let n = BigInt::from(n);
            let r = isqrt(&n).unwrap();
            prop_assert!(&r * &r <= n);
            prop_assert!((&r + 1) * (&r + 1) > n);
        }

        #[test]
        fn factorize_recombines(n in 1u64..u64::MAX) {
            let n = BigInt::from(n);
            let f = factorize(&n).unwrap();
            let mut prod = BigInt::one();
            for (q, e) in &f {
                prop_assert!(is_prime(q));
                prod *= q.pow(*e);
            }
            prop_assert_eq!(prod, n);
        }
    }
}
