//! Exhaustive verification sweeps, each returning a report that lists every
//! violation found instead of stopping at the first.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{floor_log2, mu_of, primes_up_to};
use crate::bounds::{e_value, emax_bruteforce, lift, tightness_witness_fp2};
use crate::error::Result;
use crate::sstest::{oracle_agreement, BoundMode, WalkConfig};
use crate::volcano::{sweep, SweepMode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub check: String,
    pub limit: u64,
    /// Number of primes examined.
    pub checked: usize,
    pub violations: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn collect(check: &str, limit: u64, per_prime: Vec<Result<Vec<String>>>) -> Result<Self> {
        let checked = per_prime.len();
        let mut violations = Vec::new();
        for r in per_prime {
            violations.extend(r?);
        }
        Ok(VerifyReport {
            check: check.to_string(),
            limit,
            checked,
            violations,
        })
    }
}

fn odd_primes_below(limit: u64) -> Vec<u64> {
    primes_up_to(limit.saturating_sub(1))
        .into_iter()
        .filter(|&p| p > 2)
        .collect()
}

/// The lifting bound against the brute-force maximum, for every
/// `p = 1 (mod 8)` with `17 <= p < limit`, with the sequence invariants
/// `a_j` odd, `0 < a_j < 2^(j-2)` and `a_j^2 = p (mod 2^j)`.
pub fn verify_lift(limit: u64) -> Result<VerifyReport> {
    let primes: Vec<u64> = odd_primes_below(limit).into_iter().filter(|p| p % 8 == 1).collect();
    let out = primes.par_iter().map(|&p| lift_violations(p)).collect();
    VerifyReport::collect("emax", limit, out)
}

fn lift_violations(p: u64) -> Result<Vec<String>> {
    let pb = BigInt::from(p);
    let lr = lift(&pb)?;
    let mu = mu_of(&pb)?;
    let (brute, t) = emax_bruteforce(&pb, &pb)?;
    let mut bad = Vec::new();
    if lr.e_max != brute {
        bad.push(format!("p={p}: lifted e_max {} but brute force {brute} at t={t}", lr.e_max));
    }
    if lr.e_max < mu + 3 {
        bad.push(format!("p={p}: e_max {} below mu+3 = {}", lr.e_max, mu + 3));
    }
    if lr.e_max > floor_log2(&pb)? + 4 {
        bad.push(format!("p={p}: e_max {} above floor(log2 p)+4", lr.e_max));
    }
    for (a, j) in lr.a_seq.iter().zip(3u64..) {
        let m = BigInt::one() << j;
        let ok = a.is_odd()
            && a > &BigInt::from(0)
            && a < &(BigInt::one() << (j - 2))
            && (a * a - &pb).mod_floor(&m) == BigInt::from(0);
        if !ok {
            bad.push(format!("p={p}: a_{j} = {a} breaks the lifting invariants"));
        }
    }
    if lr.a_seq.len() as u64 != mu - 1 {
        bad.push(format!("p={p}: {} lifting terms, expected {}", lr.a_seq.len(), mu - 1));
    }
    Ok(bad)
}

/// `e_max <= 3` for `p = 3 (mod 4)` and `e_max <= 4` for `p = 5 (mod 8)`,
/// over `5 <= p < limit`.
pub fn verify_cases(limit: u64) -> Result<VerifyReport> {
    let primes: Vec<u64> = odd_primes_below(limit).into_iter().filter(|&p| p >= 5).collect();
    let out = primes
        .par_iter()
        .map(|&p| {
            let cap = match p % 8 {
                3 | 7 => 3,
                5 => 4,
                _ => return Ok(Vec::new()),
            };
            let pb = BigInt::from(p);
            let (e, t) = emax_bruteforce(&pb, &pb)?;
            Ok(if e > cap {
                vec![format!("p={p}: e_max {e} at t={t} exceeds {cap}")]
            } else {
                Vec::new()
            })
        })
        .collect();
    VerifyReport::collect("cases", limit, out)
}

/// Over `F_{p^2}` the maximum of `e` is exactly `floor(log2 p) + 4` and
/// the witness trace attains it, for odd primes `3 <= p < limit`.
pub fn verify_fp2_tight(limit: u64) -> Result<VerifyReport> {
    let primes = odd_primes_below(limit);
    let out = primes
        .par_iter()
        .map(|&p| {
            let pb = BigInt::from(p);
            let q = &pb * &pb;
            let want = floor_log2(&pb)? + 4;
            let (e, t) = emax_bruteforce(&q, &pb)?;
            let w = tightness_witness_fp2(&pb)?;
            let ew = e_value(&q, &w)?;
            let mut bad = Vec::new();
            if e != want {
                bad.push(format!("p={p}: e_max {e} at t={t}, expected {want}"));
            }
            if ew != want {
                bad.push(format!("p={p}: witness t={w} gives e={ew}, expected {want}"));
            }
            Ok(bad)
        })
        .collect();
    VerifyReport::collect("fp2-tight", limit, out)
}

/// The structural volcano sweep for all primes `5 <= p <= limit`.
pub fn verify_volcanoes(limit: u64, mode: SweepMode, seed: u64) -> Result<VerifyReport> {
    let rep = sweep(limit, mode, seed)?;
    let check = match mode {
        SweepMode::Fp => "volcano",
        SweepMode::Fp2 => "volcano-fp2",
    };
    Ok(VerifyReport {
        check: check.to_string(),
        limit,
        checked: rep.primes.len(),
        violations: rep.violations().cloned().collect(),
    })
}

/// Walk verdicts against the point-count oracle for every `j` in `F_p`,
/// `5 <= p <= limit`, under the classic and `F_{p^2}` budgets.
pub fn verify_sstest(limit: u64, seed: u64) -> Result<VerifyReport> {
    let primes: Vec<u64> = primes_up_to(limit).into_iter().filter(|&p| p >= 5).collect();
    let out = primes
        .par_iter()
        .map(|&p| {
            let mut bad = Vec::new();
            for mode in [BoundMode::ClassicH0, BoundMode::ImprovedH2] {
                let cfg = WalkConfig {
                    seed,
                    ..WalkConfig::new(mode)
                };
                bad.extend(oracle_agreement(p, &cfg)?);
            }
            Ok(bad)
        })
        .collect();
    VerifyReport::collect("sstest", limit, out)
}
