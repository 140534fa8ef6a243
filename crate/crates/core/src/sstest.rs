//! Supersingularity testing by three non-backtracking walks in the
//! 2-isogeny graph over `F_{p^2}`, with a switchable step budget.
//!
//! An ordinary curve sits in a volcano whose height is bounded, so one of
//! the three walks out of its j-invariant reaches the floor and cannot be
//! extended over `F_{p^2}`. Supersingular j-invariants have all three
//! neighbours rational forever.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{floor_log2, random_prime};
use crate::bounds::{bound_fp2, classic_h0, height_bound_fp};
use crate::curve::{curve_from_j, EllipticCurve, PointCounter, COUNT_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::field::{legendre_symbol, FieldElement, FieldSpec};
use crate::poly::{phi2_continuations, phi2_neighbors, roots_deg_le3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundMode {
    /// `floor(log2 p) + 1`
    #[serde(rename = "classic")]
    ClassicH0,
    /// `floor(floor(log2 p) / 2) + 2`
    #[serde(rename = "h2")]
    ImprovedH2,
    /// the per-prime `F_p` bound; inputs must be defined over `F_p`
    #[serde(rename = "h1")]
    ImprovedH1Fp,
}

impl BoundMode {
    pub fn name(self) -> &'static str {
        match self {
            BoundMode::ClassicH0 => "classic",
            BoundMode::ImprovedH2 => "h2",
            BoundMode::ImprovedH1Fp => "h1",
        }
    }
}

impl std::str::FromStr for BoundMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" | "h0" => Ok(BoundMode::ClassicH0),
            "h2" => Ok(BoundMode::ImprovedH2),
            "h1" => Ok(BoundMode::ImprovedH1Fp),
            _ => Err(invalid(format!("unknown bound mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub bound_mode: BoundMode,
    /// Allow one extension attempt past the bound.
    pub extra_attempt: bool,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(bound_mode: BoundMode) -> Self {
        WalkConfig {
            bound_mode,
            extra_attempt: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ordinary,
    Supersingular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionReason {
    FewerThan3InitialRoots,
    DeadEndQuadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub path: usize,
    /// Extension attempt that failed; attempt 1 computes the initial edges.
    pub step: u64,
    pub reason: DetectionReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkReport {
    pub verdict: Verdict,
    /// Edges walked on each path.
    pub steps_taken: Vec<u64>,
    pub step_budget: u64,
    pub detection: Option<Detection>,
}

/// The bound `B` for a mode; the walk budget is `B` or `B + 1`.
pub fn step_budget(p: &BigInt, mode: BoundMode) -> Result<u64> {
    if p < &BigInt::from(5) {
        return Err(invalid(format!("p must be at least 5, got {p}")));
    }
    match mode {
        BoundMode::ClassicH0 => classic_h0(p),
        BoundMode::ImprovedH2 => Ok(bound_fp2(p)?.value),
        BoundMode::ImprovedH1Fp => Ok(height_bound_fp(p)?.value),
    }
}

/// [`step_budget`] for the characteristic of a field, already known prime.
fn field_budget(field: &FieldSpec, mode: BoundMode) -> Result<u64> {
    let p = field.p();
    let f = floor_log2(&p)?;
    match mode {
        BoundMode::ClassicH0 => Ok(f + 1),
        BoundMode::ImprovedH2 => Ok(f / 2 + 2),
        BoundMode::ImprovedH1Fp => step_budget(&p, mode),
    }
}

pub fn supersingularity_test(curve: &EllipticCurve, cfg: &WalkConfig) -> Result<WalkReport> {
    let field = curve.field().extension();
    let j = curve.j().clone();
    if cfg.bound_mode == BoundMode::ImprovedH1Fp && !j.is_prime_field() {
        return Err(invalid("the F_p bound needs a curve defined over F_p"));
    }
    let budget = field_budget(&field, cfg.bound_mode)? + u64::from(cfg.extra_attempt);
    walk(&field, &j, budget, cfg.seed)
}

fn walk(field: &FieldSpec, j: &FieldElement, budget: u64, seed: u64) -> Result<WalkReport> {
    let first = phi2_neighbors(field, j, seed);
    if first.total() < 3 || budget == 0 {
        let detection = (first.total() < 3).then_some(Detection {
            path: 0,
            step: 1,
            reason: DetectionReason::FewerThan3InitialRoots,
        });
        return Ok(WalkReport {
            verdict: if detection.is_some() { Verdict::Ordinary } else { Verdict::Supersingular },
            steps_taken: vec![0; 3],
            step_budget: budget,
            detection,
        });
    }
    let mut paths: Vec<(FieldElement, FieldElement)> =
        first.flatten().into_iter().map(|r| (j.clone(), r)).collect();
    let mut steps = vec![1u64; 3];
    for step in 2..=budget {
        for (i, (prev, cur)) in paths.iter_mut().enumerate() {
            let next = phi2_continuations(field, prev, cur)?;
            let Some((r, _)) = next.iter().next() else {
                return Ok(WalkReport {
                    verdict: Verdict::Ordinary,
                    steps_taken: steps,
                    step_budget: budget,
                    detection: Some(Detection {
                        path: i,
                        step,
                        reason: DetectionReason::DeadEndQuadratic,
                    }),
                });
            };
            *prev = std::mem::replace(cur, r.clone());
            steps[i] = step;
        }
    }
    Ok(WalkReport {
        verdict: Verdict::Supersingular,
        steps_taken: steps,
        step_budget: budget,
        detection: None,
    })
}

/// Discriminants of class number one with their j-invariants.
const CM_CLASS_ONE: [(i64, i64); 9] = [
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-19, -884_736),
    (-43, -884_736_000),
    (-67, -147_197_952_000),
    (-163, -262_537_412_640_768_000),
];

/// Discriminants of class number two with the constant and linear
/// coefficients of their monic quadratic class polynomials.
const CM_CLASS_TWO: [(i64, i128, i128); 5] = [
    (-15, -121_287_375, 191_025),
    (-20, -681_472_000, -1_264_000),
    (-24, 14_670_139_392, -4_834_944),
    (-35, -134_217_728_000, 117_964_800),
    (-40, 9_103_145_472_000, -425_692_800),
];

/// A supersingular curve over `F_{p^2}`: `y^2 = x^3 + x` when
/// `p = 3 (mod 4)`, otherwise a CM j-invariant for a discriminant in
/// which `p` is inert, falling back to an exhaustive search over `F_p`.
pub fn make_supersingular(p: &BigInt) -> Result<EllipticCurve> {
    let field = FieldSpec::new(p, 2)?;
    if p.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
        return EllipticCurve::new(&field, field.one(), field.zero());
    }
    if let Some(j) = cm_supersingular_j(&field)? {
        return Ok(curve_from_j(&field, &j));
    }
    if field.p_u64().is_some_and(|q| q <= COUNT_LIMIT) {
        let base = FieldSpec::new(p, 1)?;
        let counter = PointCounter::new(&base)?;
        for j in base.elements()? {
            if counter.is_supersingular(&curve_from_j(&base, &j))? {
                return Ok(curve_from_j(&field, &j));
            }
        }
    }
    Err(Error::BudgetExceeded(format!(
        "no supersingular curve construction applies to p = {p}"
    )))
}

fn cm_supersingular_j(field: &FieldSpec) -> Result<Option<FieldElement>> {
    let p = field.p();
    for (d, j) in CM_CLASS_ONE {
        if legendre_symbol(&BigInt::from(d), &p) == -1 {
            return Ok(Some(field.from_i64(j)));
        }
    }
    for (d, c0, c1) in CM_CLASS_TWO {
        if legendre_symbol(&BigInt::from(d), &p) == -1 {
            let poly = [
                field.from_int(&BigInt::from(c0)),
                field.from_int(&BigInt::from(c1)),
                field.one(),
            ];
            let roots = roots_deg_le3(field, &poly, 0)?;
            let first = roots.iter().next().map(|(r, _)| r.clone());
            if first.is_some() {
                return Ok(first);
            }
        }
    }
    Ok(None)
}

/// [`make_supersingular`] followed by a seeded random non-backtracking walk
/// of `2 log2 p` steps through the supersingular graph.
pub fn random_supersingular(p: &BigInt, seed: u64) -> Result<EllipticCurve> {
    let start = make_supersingular(p)?;
    let field = start.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prev: Option<FieldElement> = None;
    let mut cur = start.j().clone();
    for _ in 0..2 * floor_log2(p)? {
        let choices = match &prev {
            None => phi2_neighbors(&field, &cur, seed).flatten(),
            Some(pv) => phi2_continuations(&field, pv, &cur)?.flatten(),
        };
        let next = choices
            .choose(&mut rng)
            .cloned()
            .ok_or_else(|| invalid("supersingular walk hit a dead end"))?;
        prev = Some(std::mem::replace(&mut cur, next));
    }
    Ok(curve_from_j(&field, &cur))
}

/// One line of the benchmark table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub mode: BoundMode,
    /// `"1mod4"` or `"3mod4"`
    pub p_class: String,
    pub trials: usize,
    pub mean_steps: f64,
    pub mean_ms: f64,
    pub ratio_vs_classic: f64,
    pub step_ratio_vs_classic: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchOptions {
    /// Upper limit on sampled primes, e.g. to stay within oracle range.
    pub max_p: Option<BigInt>,
    /// Timed repetitions of each walk.
    pub repeats: usize,
}

/// Random `bits`-bit primes, half `1 (mod 4)` and half `3 (mod 4)`.
pub fn bench_primes(bits: u64, n: usize, seed: u64, max_p: Option<&BigInt>) -> Result<Vec<BigInt>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let residue = if k % 2 == 0 { 1 } else { 3 };
        let mut tries = 0;
        loop {
            let p = random_prime(bits, 4, residue, &mut rng)?;
            if max_p.is_none_or(|m| &p <= m) {
                out.push(p);
                break;
            }
            tries += 1;
            if tries > 10_000 {
                return Err(invalid(format!("no {bits}-bit primes below the cap")));
            }
        }
    }
    Ok(out)
}

/// Runs the test on one supersingular curve per prime for each mode and
/// reports mean steps and wall time per `(mode, p mod 4)` class. Modes are
/// interleaved per prime so drift affects all of them alike.
pub fn bench_steps(
    bits: u64,
    n_trials: usize,
    modes: &[BoundMode],
    seed: u64,
    opts: &BenchOptions,
) -> Result<Vec<BenchRow>> {
    let primes = bench_primes(bits, n_trials, seed, opts.max_p.as_ref())?;
    let repeats = opts.repeats.max(1);
    let mut modes = modes.to_vec();
    if !modes.contains(&BoundMode::ClassicH0) {
        modes.insert(0, BoundMode::ClassicH0);
    }
    // (class, mode) -> (count, steps, ms)
    let mut acc = [[(0usize, 0f64, 0f64); 3]; 2];
    for (k, p) in primes.iter().enumerate() {
        let curve = random_supersingular(p, seed.wrapping_add(k as u64))?;
        let class = usize::from(p.mod_floor(&BigInt::from(4)) == BigInt::from(3));
        for &mode in &modes {
            let cfg = WalkConfig {
                bound_mode: mode,
                extra_attempt: true,
                seed,
            };
            let start = Instant::now();
            let mut report = None;
            for _ in 0..repeats {
                report = Some(supersingularity_test(&curve, &cfg)?);
            }
            let ms = start.elapsed().as_secs_f64() * 1e3 / repeats as f64;
            let report = report.unwrap();
            let steps = report.steps_taken.iter().sum::<u64>() as f64 / 3.0;
            let slot = &mut acc[class][mode_index(mode)];
            slot.0 += 1;
            slot.1 += steps;
            slot.2 += ms;
        }
    }
    let mut rows = Vec::new();
    for (class, name) in [(0, "1mod4"), (1, "3mod4")] {
        let (cn, cs, cms) = acc[class][mode_index(BoundMode::ClassicH0)];
        if cn == 0 {
            continue;
        }
        for &mode in &modes {
            let (n, s, ms) = acc[class][mode_index(mode)];
            let (mean_steps, mean_ms) = (s / n as f64, ms / n as f64);
            rows.push(BenchRow {
                mode,
                p_class: name.to_string(),
                trials: n,
                mean_steps,
                mean_ms,
                ratio_vs_classic: mean_ms / (cms / cn as f64),
                step_ratio_vs_classic: mean_steps / (cs / cn as f64),
            });
        }
    }
    Ok(rows)
}

fn mode_index(m: BoundMode) -> usize {
    match m {
        BoundMode::ClassicH0 => 0,
        BoundMode::ImprovedH2 => 1,
        BoundMode::ImprovedH1Fp => 2,
    }
}

/// `mode,p_class,mean_steps,mean_ms,ratio_vs_classic` with a comment line
/// naming the walk field.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("# walks over F_p^2\nmode,p_class,mean_steps,mean_ms,ratio_vs_classic\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{:.3},{:.4},{:.4}\n",
            r.mode.name(),
            r.p_class,
            r.mean_steps,
            r.mean_ms,
            r.ratio_vs_classic
        ));
    }
    s
}

/// Verdicts against the point-count oracle for every `j` in `F_p`.
pub fn oracle_agreement(p: u64, cfg: &WalkConfig) -> Result<Vec<String>> {
    let field = FieldSpec::prime(p)?;
    let counter = PointCounter::new(&field)?;
    let mut bad = Vec::new();
    for j in field.elements()? {
        let curve = curve_from_j(&field, &j);
        let want = counter.is_supersingular(&curve)?;
        let got = supersingularity_test(&curve, cfg)?;
        if (got.verdict == Verdict::Supersingular) != want {
            bad.push(format!(
                "p={p} j={j} mode={}: walk says {:?}, oracle says supersingular={want}",
                cfg.bound_mode.name(),
                got.verdict
            ));
        }
    }
    Ok(bad)
}

/// Mean of a numeric column, for harness summaries.
pub fn mean_of(xs: impl Iterator<Item = u64>) -> f64 {
    let (n, s) = xs.fold((0u64, 0u64), |(n, s), x| (n + 1, s + x));
    if n == 0 {
        0.0
    } else {
        s as f64 / n as f64
    }
}

/// Whether `t` is `0 mod p`; the oracle's notion of supersingular.
pub fn trace_is_supersingular(t: &BigInt, p: &BigInt) -> bool {
    (t % p).is_zero()
}

/// Convenience: budget as a machine word for small primes.
pub fn budget_u64(p: u64, mode: BoundMode, extra_attempt: bool) -> Result<u64> {
    Ok(step_budget(&BigInt::from(p), mode)? + u64::from(extra_attempt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;

    fn b(v: u64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn field_budget_matches_step_budget() {
        for p in primes_up_to(3000).into_iter().filter(|&p| p >= 5) {
            let f = FieldSpec::quadratic(p).unwrap();
            for mode in [BoundMode::ClassicH0, BoundMode::ImprovedH2, BoundMode::ImprovedH1Fp] {
                assert_eq!(field_budget(&f, mode).unwrap(), step_budget(&b(p), mode).unwrap());
            }
        }
    }

    #[test]
    fn budget_examples() {
        let p64 = random_prime(64, 4, 1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(step_budget(&p64, BoundMode::ClassicH0).unwrap(), 64);
        assert_eq!(step_budget(&p64, BoundMode::ImprovedH2).unwrap(), 33);
        assert_eq!(step_budget(&b(7), BoundMode::ImprovedH1Fp).unwrap(), 1);
        assert!(step_budget(&b(3), BoundMode::ClassicH0).is_err());
    }

    #[test]
    fn walk_examples() {
        let f = FieldSpec::prime(7).unwrap();
        for mode in [BoundMode::ClassicH0, BoundMode::ImprovedH2] {
            let cfg = WalkConfig::new(mode);
            let ss = EllipticCurve::new(&f, f.one(), f.zero()).unwrap();
            let r = supersingularity_test(&ss, &cfg).unwrap();
            assert_eq!(r.verdict, Verdict::Supersingular);
            assert!(r.steps_taken.iter().all(|&s| s == r.step_budget));
            let ord = EllipticCurve::new(&f, f.zero(), f.one()).unwrap();
            let r = supersingularity_test(&ord, &cfg).unwrap();
            assert_eq!(r.verdict, Verdict::Ordinary);
            assert!(r.detection.unwrap().step <= r.step_budget);
        }
    }

    #[test]
    fn agreement_with_oracle_small() {
        for p in primes_up_to(120).into_iter().filter(|&p| p >= 5) {
            for mode in [BoundMode::ClassicH0, BoundMode::ImprovedH2] {
                let bad = oracle_agreement(p, &WalkConfig::new(mode)).unwrap();
                assert!(bad.is_empty(), "{bad:?}");
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let f = FieldSpec::prime(101).unwrap();
        let cfg = WalkConfig { bound_mode: BoundMode::ImprovedH2, extra_attempt: true, seed: 5 };
        for j in f.elements().unwrap().take(30) {
            let c = curve_from_j(&f, &j);
            assert_eq!(supersingularity_test(&c, &cfg).unwrap(), supersingularity_test(&c, &cfg).unwrap());
        }
    }

    #[test]
    fn h1_mode_rejects_extension_curves() {
        let f = FieldSpec::quadratic(13).unwrap();
        let c = EllipticCurve::new(&f, f.parse("1+1*s").unwrap(), f.one()).unwrap();
        let cfg = WalkConfig::new(BoundMode::ImprovedH1Fp);
        assert!(supersingularity_test(&c, &cfg).is_err());
    }

    #[test]
    fn make_supersingular_examples() {
        let c = make_supersingular(&b(7)).unwrap();
        assert_eq!(*c.j(), c.field().from_u64(1728));
        let c = make_supersingular(&b(11)).unwrap();
        assert_eq!((c.a().clone(), c.b().clone()), (c.field().one(), c.field().zero()));
        let c = make_supersingular(&b(13)).unwrap();
        assert!(crate::curve::is_supersingular_oracle(&c).unwrap());
    }

    #[test]
    fn cm_constructions_are_supersingular() {
        // every listed discriminant, at primes inert in it, checked by counting
        for p in primes_up_to(400).into_iter().filter(|&p| p >= 5) {
            let field = FieldSpec::quadratic(p).unwrap();
            let counter = PointCounter::new(&field).unwrap();
            let pb = b(p);
            for (d, j) in CM_CLASS_ONE {
                if legendre_symbol(&BigInt::from(d), &pb) == -1 {
                    let c = curve_from_j(&field, &field.from_i64(j));
                    assert!(counter.is_supersingular(&c).unwrap(), "p={p} D={d}");
                }
            }
            for (d, c0, c1) in CM_CLASS_TWO {
                if legendre_symbol(&BigInt::from(d), &pb) == -1 {
                    let poly = [
                        field.from_int(&BigInt::from(c0)),
                        field.from_int(&BigInt::from(c1)),
                        field.one(),
                    ];
                    let roots = roots_deg_le3(&field, &poly, 0).unwrap();
                    assert_eq!(roots.total(), 2);
                    for (r, _) in roots.iter() {
                        let c = curve_from_j(&field, r);
                        assert!(counter.is_supersingular(&c).unwrap(), "p={p} D={d} j={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_supersingular_stays_supersingular() {
        for p in [13u64, 101, 409, 601] {
            for seed in 0..3 {
                let c = random_supersingular(&b(p), seed).unwrap();
                assert!(crate::curve::is_supersingular_oracle(&c).unwrap(), "p={p}");
            }
        }
    }

    #[test]
    fn large_prime_supersingular_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..4 {
            let p = random_prime(256, 4, 1, &mut rng).unwrap();
            let c = make_supersingular(&p).unwrap();
            let r = supersingularity_test(&c, &WalkConfig::new(BoundMode::ImprovedH2)).unwrap();
            assert_eq!(r.verdict, Verdict::Supersingular);
            assert_eq!(r.steps_taken, vec![130; 3]);
        }
    }

    #[test]
    fn bench_rows_have_exact_step_ratio() {
        let opts = BenchOptions { max_p: None, repeats: 1 };
        let rows = bench_steps(16, 4, &[BoundMode::ClassicH0, BoundMode::ImprovedH2], 3, &opts).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            let want = if r.mode == BoundMode::ImprovedH2 { 10.0 / 17.0 } else { 1.0 };
            assert!((r.step_ratio_vs_classic - want).abs() < 1e-12, "{r:?}");
        }
        let csv = bench_csv(&rows);
        assert!(csv.lines().nth(1).unwrap() == "mode,p_class,mean_steps,mean_ms,ratio_vs_classic");
    }
}
