//! Height bounds for 2-volcanoes: the valuation `e(q;t) = nu2(t^2 - 4q)`,
//! the closed-form `F_{p^2}` bound and its tightness witness, the per-prime
//! `F_p` bound from 2-adic square-root lifting, and the brute-force and
//! conductor-based oracles used to check them.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, floor_log2, is_prime, isqrt, mu_of, nu2, random_prime};
use crate::error::{invalid, Error, Result};

/// Largest trace range `2 sqrt(q)` scanned by [`emax_bruteforce`].
pub const SCAN_LIMIT: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QKind {
    Prime,
    PrimeSquare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    Mod4_3,
    Mod8_5,
    Mod8_1,
    Fp2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    KeptA,
    FlippedTo2MuMinusA,
}

/// State and output of the lifting algorithm for `p = 1 (mod 8)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftResult {
    #[serde(with = "crate::decimal")]
    pub p: BigInt,
    pub mu: u64,
    /// `a_3, ..., a_{mu+1}`
    #[serde(with = "crate::decimal::vec")]
    pub a_seq: Vec<BigInt>,
    pub branch: Branch,
    #[serde(with = "crate::decimal")]
    pub b_p: BigInt,
    /// `nu2(p - b_p^2)`
    pub nu: u64,
    pub e_max: u64,
    pub h1: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightBound {
    pub q_kind: QKind,
    pub case: BoundCase,
    /// Upper bound on the volcano height.
    pub value: u64,
    /// Upper bound on `e(q;t)` over admissible traces.
    pub e_bound: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<LiftResult>,
}

/// `nu2(t^2 - 4q)`.
pub fn e_value(q: &BigInt, t: &BigInt) -> Result<u64> {
    let d = t * t - q * 4u32;
    if d.is_zero() {
        return Err(invalid(format!("t^2 = 4q for q={q}, t={t}")));
    }
    nu2(&d)
}

fn check_odd_prime(p: &BigInt) -> Result<()> {
    if p.is_even() || !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(())
}

/// `floor(floor(log2 p) / 2) + 2`, with e-bound `floor(log2 p) + 4`.
pub fn bound_fp2(p: &BigInt) -> Result<HeightBound> {
    check_odd_prime(p)?;
    let f = floor_log2(p)?;
    Ok(HeightBound {
        q_kind: QKind::PrimeSquare,
        case: BoundCase::Fp2,
        value: f / 2 + 2,
        e_bound: f + 4,
        certificate: None,
    })
}

/// `t = 2 (2^(f+1) - p)` with `f = floor(log2 p)`; attains the e-bound.
pub fn tightness_witness_fp2(p: &BigInt) -> Result<BigInt> {
    if p < &BigInt::from(3) || p.is_even() {
        return Err(invalid(format!("witness needs an odd p >= 3, got {p}")));
    }
    let f = floor_log2(p)?;
    Ok(((BigInt::one() << (f + 1)) - p) * 2)
}

/// The sequence `a_3, ..., a_{mu+1}` of odd square roots of `p` modulo
/// `2^j`, each in `(0, 2^(j-2))`.
pub fn lift_2adic(p: &BigInt) -> Result<Vec<BigInt>> {
    if p.mod_floor(&BigInt::from(8)) != BigInt::one() || p < &BigInt::from(17) {
        return Err(invalid(format!("lifting needs p = 1 mod 8, p >= 17; got {p}")));
    }
    let mu = mu_of(p)?;
    let mut a = BigInt::one();
    let mut seq = Vec::with_capacity(mu as usize - 1);
    seq.push(a.clone());
    for j in 4..=mu + 1 {
        let diff = &a * &a - p;
        // diff is divisible by 2^(j-1); test the next bit
        if diff.bit(j - 1) {
            a = (BigInt::one() << (j - 2)) - &a;
        }
        seq.push(a.clone());
    }
    Ok(seq)
}

/// Chooses `b_p` between `a` and `2^mu - a` and derives `e_max` and `h1`.
pub fn select_bp(p: &BigInt, a_seq: Vec<BigInt>) -> Result<LiftResult> {
    let mu = mu_of(p)?;
    let a = a_seq
        .last()
        .cloned()
        .ok_or_else(|| invalid("empty lifting sequence"))?;
    let other = (BigInt::one() << mu) - &a;
    let nu_a = nu2(&(p - &a * &a))?;
    let nu_other = nu2(&(p - &other * &other))?;
    debug_assert_ne!(nu_a, nu_other);
    let flip = &other * &other < *p && nu_a < nu_other;
    let (branch, b_p, nu) = if flip {
        (Branch::FlippedTo2MuMinusA, other, nu_other)
    } else {
        (Branch::KeptA, a, nu_a)
    };
    Ok(LiftResult {
        p: p.clone(),
        mu,
        a_seq,
        branch,
        b_p,
        nu,
        e_max: nu + 2,
        h1: nu / 2 + 1,
    })
}

/// [`lift_2adic`] followed by [`select_bp`].
pub fn lift(p: &BigInt) -> Result<LiftResult> {
    select_bp(p, lift_2adic(p)?)
}

/// Height bound for ordinary curves over `F_p`, by residue class of `p`.
pub fn height_bound_fp(p: &BigInt) -> Result<HeightBound> {
    check_odd_prime(p)?;
    let r8 = p.mod_floor(&BigInt::from(8)).to_u8().unwrap();
    let (case, value, e_bound, certificate) = match r8 {
        3 | 7 => (BoundCase::Mod4_3, 1, 3, None),
        5 => (BoundCase::Mod8_5, 2, 4, None),
        _ => {
            let lr = lift(p)?;
            (BoundCase::Mod8_1, lr.h1, lr.e_max, Some(lr))
        }
    };
    Ok(HeightBound {
        q_kind: QKind::Prime,
        case,
        value,
        e_bound,
        certificate,
    })
}

/// `floor(log2 p) + 1`, the step count of the unimproved walk.
pub fn classic_h0(p: &BigInt) -> Result<u64> {
    Ok(floor_log2(p)? + 1)
}

/// Maximum of `e(q;t)` over `0 < |t| <= 2 sqrt(q)`, `t != 0 mod p`, with
/// the smallest positive maximizing `t`. Only even `t` are scanned.
pub fn emax_bruteforce(q: &BigInt, p: &BigInt) -> Result<(u64, BigInt)> {
    if q != p && *q != p * p {
        return Err(invalid(format!("q={q} is neither p nor p^2 for p={p}")));
    }
    let tmax = isqrt(&(q * 4u32))?;
    if tmax > BigInt::from(SCAN_LIMIT) {
        return Err(Error::BudgetExceeded(format!(
            "trace scan up to {tmax} exceeds {SCAN_LIMIT}"
        )));
    }
    let tmax = tmax.to_u64().unwrap();
    let best = match (q.to_u128(), p.to_u64()) {
        (Some(q), Some(p)) if q < 1 << 100 => scan_word(q, p, tmax),
        _ => scan_big(q, p, tmax)?,
    };
    best.map(|(e, t)| (e, BigInt::from(t)))
        .ok_or_else(|| invalid(format!("no admissible even trace for q={q}")))
}

const CHUNK: u64 = 1 << 16;

fn better(a: Option<(u64, u64)>, b: Option<(u64, u64)>) -> Option<(u64, u64)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn scan_word(q: u128, p: u64, tmax: u64) -> Option<(u64, u64)> {
    let run = |lo: u64, hi: u64| {
        let mut best = None;
        let mut t = lo + (lo & 1);
        while t <= hi {
            let tt = t as u128 * t as u128;
            if !t.is_multiple_of(p) && tt != 4 * q {
                let e = (4 * q).abs_diff(tt).trailing_zeros() as u64;
                best = better(best, Some((e, t)));
            }
            t += 2;
        }
        best
    };
    if tmax < CHUNK {
        return run(1, tmax);
    }
    (0..=tmax / CHUNK)
        .into_par_iter()
        .map(|c| run((c * CHUNK).max(1), ((c + 1) * CHUNK - 1).min(tmax)))
        .reduce(|| None, better)
}

fn scan_big(q: &BigInt, p: &BigInt, tmax: u64) -> Result<Option<(u64, u64)>> {
    let mut best = None;
    for t in (2..=tmax).step_by(2) {
        let tb = BigInt::from(t);
        if (&tb % p).is_zero() {
            continue;
        }
        best = better(best, Some((e_value(q, &tb)?, t)));
    }
    Ok(best)
}

/// `D = f^2 D_K` with `D_K` a fundamental discriminant, for `D < 0`.
pub fn fundamental_discriminant(d: &BigInt) -> Result<(BigInt, BigInt)> {
    let r4 = d.mod_floor(&BigInt::from(4));
    if !d.is_negative() || !(r4.is_zero() || r4.is_one()) {
        return Err(invalid(format!("{d} is not a negative discriminant")));
    }
    let mut core = BigInt::one();
    let mut conductor = BigInt::one();
    for (prime, exp) in factorize(&d.abs())? {
        if exp % 2 == 1 {
            core *= &prime;
        }
        conductor *= prime.pow(exp / 2);
    }
    let d0 = -core;
    if d0.mod_floor(&BigInt::from(4)).is_one() {
        Ok((d0, conductor))
    } else {
        Ok((d0 * 4, conductor / 2))
    }
}

/// `nu2((t^2 - 4q) / D_K) / 2`, which equals `nu2` of the conductor of
/// `Z[pi]` inside the maximal order.
pub fn max_height_from_trace(q: &BigInt, t: &BigInt) -> Result<u64> {
    let d = t * t - q * 4u32;
    let (_, f) = fundamental_discriminant(&d)?;
    nu2(&f)
}

/// Mean `h1` over random primes of one bit length, beside the `F_{p^2}`
/// bound for that length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub bits: u64,
    pub n: usize,
    pub mean_h1: f64,
    pub h2: u64,
}

/// Samples `n` primes of exactly `bits` bits with `p = 1 (mod 8)` and
/// averages their `h1`. The `h2` column is `floor((bits - 1) / 2) + 2`.
pub fn table1_row(bits: u64, n: usize, seed: u64) -> Result<Table1Row> {
    use rand::SeedableRng;
    if bits < 6 {
        return Err(invalid(format!("need at least 6 bits, got {bits}")));
    }
    if n == 0 {
        return Err(invalid("need at least one prime"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let primes = (0..n)
        .map(|_| random_prime(bits, 8, 1, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let h1s = primes
        .par_iter()
        .map(|p| lift(p).map(|l| l.h1))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Row {
        bits,
        n,
        mean_h1: h1s.iter().sum::<u64>() as f64 / n as f64,
        h2: (bits - 1) / 2 + 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use proptest::prelude::*;

    fn n(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn e_value_examples() {
        assert_eq!(e_value(&n(25), &n(6)).unwrap(), 6);
        assert_eq!(e_value(&n(17), &n(2)).unwrap(), 6);
        assert_eq!(e_value(&n(17), &n(3)).unwrap(), 0);
        assert!(e_value(&n(25), &n(10)).is_err());
    }

    #[test]
    fn fp2_bound_examples() {
        assert_eq!(bound_fp2(&n(17)).unwrap().value, 4);
        assert_eq!(bound_fp2(&n(3)).unwrap().value, 2);
        assert_eq!(bound_fp2(&n(17)).unwrap().e_bound, 8);
        assert!(matches!(bound_fp2(&n(15)), Err(Error::NotPrime(_))));
        let mut p = (BigInt::one() << 1023) + 1;
        while !is_prime(&p) {
            p += 2;
        }
        assert_eq!(p.bits(), 1024);
        assert_eq!(bound_fp2(&p).unwrap().value, 513);
    }

    #[test]
    fn witness_examples() {
        for (p, t, e) in [(5, 6, 6), (11, 10, 7), (7, 2, 6)] {
            let w = tightness_witness_fp2(&n(p)).unwrap();
            assert_eq!(w, n(t));
            assert_eq!(e_value(&n(p * p), &w).unwrap(), e);
        }
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_2adic(&n(17)).unwrap(), vec![n(1), n(1)]);
        assert_eq!(lift_2adic(&n(41)).unwrap(), vec![n(1), n(3)]);
        assert_eq!(lift_2adic(&n(113)).unwrap(), vec![n(1), n(1), n(7)]);
        assert!(lift_2adic(&n(13)).is_err());
    }

    #[test]
    fn select_examples() {
        let r = lift(&n(17)).unwrap();
        assert_eq!((r.branch, r.b_p.clone(), r.nu, r.e_max, r.h1), (Branch::KeptA, n(1), 4, 6, 3));
        let r = lift(&n(41)).unwrap();
        assert_eq!((r.b_p.clone(), r.nu, r.e_max, r.h1), (n(3), 5, 7, 3));
        let r = lift(&n(233)).unwrap();
        assert_eq!(
            (r.branch, r.b_p.clone(), r.nu, r.e_max, r.h1),
            (Branch::FlippedTo2MuMinusA, n(13), 6, 8, 4)
        );
    }

    #[test]
    fn fp_bound_examples() {
        assert_eq!(height_bound_fp(&n(7)).unwrap().value, 1);
        assert_eq!(height_bound_fp(&n(13)).unwrap().value, 2);
        let b = height_bound_fp(&n(17)).unwrap();
        assert_eq!((b.case, b.value), (BoundCase::Mod8_1, 3));
        assert!(b.certificate.is_some());
        assert!(height_bound_fp(&n(2)).is_err());
        assert!(height_bound_fp(&n(21)).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(emax_bruteforce(&n(17), &n(17)).unwrap(), (6, n(2)));
        assert_eq!(emax_bruteforce(&n(25), &n(5)).unwrap(), (6, n(6)));
        assert_eq!(emax_bruteforce(&n(7), &n(7)).unwrap(), (3, n(2)));
        assert!(emax_bruteforce(&n(10), &n(5)).is_err());
    }

    #[test]
    fn bruteforce_parallel_scan_agrees_with_bigint_scan() {
        for p in [1_000_003i64, 4_000_037] {
            let (q, pp) = (n(p), n(p));
            let tmax = isqrt(&(&q * 4)).unwrap().to_u64().unwrap();
            let big = scan_big(&q, &pp, tmax).unwrap().unwrap();
            assert_eq!(emax_bruteforce(&q, &pp).unwrap(), (big.0, n(big.1 as i64)));
        }
        let p = n(70_001);
        let q = &p * &p;
        let tmax = 2 * 70_001;
        let big = scan_big(&q, &p, tmax).unwrap().unwrap();
        assert_eq!(emax_bruteforce(&q, &p).unwrap(), (big.0, n(big.1 as i64)));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(fundamental_discriminant(&n(-64)).unwrap(), (n(-4), n(4)));
        assert_eq!(fundamental_discriminant(&n(-3)).unwrap(), (n(-3), n(1)));
        assert_eq!(fundamental_discriminant(&n(-96)).unwrap(), (n(-24), n(2)));
        assert!(fundamental_discriminant(&n(-5)).is_err());
        assert!(fundamental_discriminant(&n(12)).is_err());
    }

    #[test]
    fn trace_height_examples() {
        assert_eq!(max_height_from_trace(&n(17), &n(2)).unwrap(), 2);
        assert_eq!(max_height_from_trace(&n(25), &n(6)).unwrap(), 2);
        // 1 - 28 = -27 = 3^2 * (-3)
        assert_eq!(max_height_from_trace(&n(7), &n(1)).unwrap(), 0);
    }

    #[test]
    fn fermat_primes() {
        assert_eq!(e_value(&n(257), &n(2)).unwrap(), 10);
        assert_eq!(e_value(&n(65537), &n(2)).unwrap(), 18);
    }

    #[test]
    fn lift_agrees_with_bruteforce_small() {
        for p in primes_up_to(5000).into_iter().filter(|p| p % 8 == 1) {
            let p = n(p as i64);
            let r = lift(&p).unwrap();
            assert_eq!(r.e_max, emax_bruteforce(&p, &p).unwrap().0, "p={p}");
        }
    }

    #[test]
    fn serde_roundtrip() {
        let b = height_bound_fp(&n(233)).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains("\"b_p\":\"13\""));
        assert_eq!(serde_json::from_str::<HeightBound>(&s).unwrap(), b);
    }

    fn arb_prime_1mod8() -> impl Strategy<Value = BigInt> {
        proptest::collection::vec(any::<u64>(), 1..5).prop_map(|limbs| {
            let mut v = BigInt::zero();
            for l in limbs {
                v = (v << 64) + l;
            }
            let mut c = (v >> 3 << 3) + 17;
            while !is_prime(&c) {
                c += 8;
            }
            c
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lift_invariants(p in arb_prime_1mod8()) {
            let r = lift(&p).unwrap();
            for (k, a) in r.a_seq.iter().enumerate() {
                let j = k as u64 + 3;
                prop_assert!(a.is_odd());
                prop_assert!(a.is_positive() && *a < BigInt::one() << (j - 2));
                prop_assert!(nu2(&(a * a - &p)).unwrap() >= j);
            }
            prop_assert!(&r.b_p * 2 >= BigInt::one());
            prop_assert!(&r.b_p * &r.b_p < p);
            prop_assert!(r.e_max >= r.mu + 3);
            prop_assert_eq!(r.h1, r.e_max / 2);
            prop_assert!(r.e_max <= floor_log2(&p).unwrap() + 4);
        }

        #[test]
        fn height_never_exceeds_half_valuation(p_idx in 2usize..500, t in 1i64..200) {
            let primes = primes_up_to(4000);
            let p = n(primes[p_idx % primes.len()] as i64);
            for q in [p.clone(), &p * &p] {
                let t = n(t);
                if &t * &t > &q * 4 || (&t % &p).is_zero() {
                    continue;
                }
                let h = max_height_from_trace(&q, &t).unwrap();
                prop_assert!(h <= e_value(&q, &t).unwrap() / 2);
            }
        }

        #[test]
        fn discriminant_recombines(m in 1i64..1_000_000) {
            for d in [-4 * m, -(4 * m + 3)] {
                let (dk, f) = fundamental_discriminant(&n(d)).unwrap();
                prop_assert_eq!(&f * &f * &dk, n(d));
                prop_assert!(dk.is_negative());
            }
        }
    }
}
