#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashMap;

use beatty_core::QuadExpr;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

/// Floor of `n·(p + q√d)/r` by outward-rounded fixed-point intervals.
///
/// `√d` is bracketed as `[lo, lo+1]·2^-P` by bisection on `lo² ≤ d·4^P`,
/// starting at 256 bits and widening until both interval ends share a floor.
/// Independent of the crate's isqrt-based path.
pub struct IntervalOracle {
    brackets: HashMap<(u64, u32), BigInt>,
}

impl IntervalOracle {
    pub fn new() -> Self {
        IntervalOracle {
            brackets: HashMap::new(),
        }
    }

    fn sqrt_lower(&mut self, d: u64, bits: u32) -> BigInt {
        self.brackets
            .entry((d, bits))
            .or_insert_with(|| {
                let target = BigInt::from(d) << (2 * bits);
                let mut lo = BigInt::zero();
                let mut hi = BigInt::from(d + 1) << bits; // hi² > target
                while &hi - &lo > BigInt::one() {
                    let mid: BigInt = (&lo + &hi) >> 1;
                    if &mid * &mid <= target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            })
            .clone()
    }

    pub fn floor_mul(&mut self, x: &QuadExpr, n: u64) -> BigInt {
        let n = BigInt::from(n);
        let (p, q, r) = (x.p() * &n, x.q() * &n, x.r().clone());
        if q.is_zero() {
            return p.div_floor(&r);
        }
        let mut bits = 256u32;
        loop {
            let lo = self.sqrt_lower(x.d(), bits);
            let hi = &lo + 1u32;
            let (qa, qb) = (&q * &lo, &q * &hi);
            let (qmin, qmax) = if q.is_negative() { (qb, qa) } else { (qa, qb) };
            let scale = BigInt::one() << bits;
            let den = &r * &scale;
            let low = (&p * &scale + qmin).div_floor(&den);
            let high = (&p * &scale + qmax).div_floor(&den);
            if low == high {
                return low;
            }
            bits += 64;
        }
    }
}

pub fn is_square(d: u64) -> bool {
    let s = (d as f64).sqrt() as u64;
    (s.saturating_sub(1)..=s + 1).any(|t| t * t == d)
}

/// A random irrational slope with radicand ≤ `max_d` inside `(lo, hi)`.
pub fn random_slope<R: Rng>(rng: &mut R, max_d: u64, lo: (i64, i64), hi: (i64, i64)) -> QuadExpr {
    loop {
        let d = rng.gen_range(2..=max_d);
        if is_square(d) {
            continue;
        }
        let q: i64 = rng.gen_range(1..=6) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let r: i64 = rng.gen_range(1..=25);
        let p: i64 = rng.gen_range(-120..=120);
        let x = QuadExpr::make(p, q, d, r).unwrap();
        if x.cmp_rational(lo.0, lo.1) == Ordering::Greater && x.cmp_rational(hi.0, hi.1) == Ordering::Less {
            return x;
        }
    }
}

/// Random `α ∈ (1, 2)` with radicand ≤ `max_d`.
pub fn random_alpha<R: Rng>(rng: &mut R, max_d: u64) -> QuadExpr {
    random_slope(rng, max_d, (1, 1), (2, 1))
}

/// Brute-force MES: keeps an explicit occupied set and scans from 1 every
/// time. Quadratic, for cross-checking only.
pub fn naive_mes(skips: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut used = vec![false; 16];
    let mut a = Vec::new();
    let mut b = Vec::new();
    let free_nth = |used: &Vec<bool>, mut k: u64| -> u64 {
        let mut x = 1u64;
        loop {
            if !used.get(x as usize).copied().unwrap_or(false) {
                if k == 0 {
                    return x;
                }
                k -= 1;
            }
            x += 1;
        }
    };
    let set = |used: &mut Vec<bool>, x: u64| {
        if used.len() <= x as usize {
            used.resize(2 * x as usize + 1, false);
        }
        used[x as usize] = true;
    };
    for &c in skips {
        let an = free_nth(&used, 0);
        set(&mut used, an);
        let bn = free_nth(&used, c);
        set(&mut used, bn);
        a.push(an);
        b.push(bn);
    }
    (a, b)
}

pub fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().unwrap()
}
