//! Seeded strip-packing instance generation: integer object dimensions
//! from an exact inverse-CDF of a Beta distribution (the "small and square"
//! shape), optional per-face clearances, all driven by a counter-based
//! stream so generation is deterministic and order-independent.

use crate::rpp::{Clearances, RppInstance, RppObject};
use crate::{rat, rint, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub n_objects: usize,
    pub strip_width: Rat,
    /// Inclusive integer dimension range the Beta sample is mapped onto.
    pub size_range: (i64, i64),
    /// Positive integer Beta shape parameters.
    pub beta_params: (u32, u32),
    /// Per-side clearance probability.
    pub clearance_prob: Rat,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n_objects: usize, seed: u64) -> Self {
        GenSpec {
            n_objects,
            strip_width: rint(100),
            size_range: (5, 30),
            beta_params: (2, 5),
            clearance_prob: rat(1, 2),
            seed,
        }
    }
}

/// Counter-based uniform draw on [0, 1) with a 64-bit avalanche mix;
/// distinct counters give independent-looking values in any order.
fn uniform(seed: u64, counter: u64) -> Rat {
    let mut z = seed
        .wrapping_add(counter.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    Rat::new(BigInt::from(z), BigInt::one() << 64)
}

/// Exact CDF of Beta(a, b) for positive integers a, b:
/// the regularized incomplete beta reduces to the binomial tail polynomial
/// `sum_{j=a}^{a+b-1} C(a+b-1, j) t^j (1-t)^(a+b-1-j)`.
fn beta_cdf(a: u32, b: u32, t: &Rat) -> Rat {
    let n = a + b - 1;
    let mut acc = Rat::zero();
    for j in a..=n {
        let choose = binomial_big(n as u64, j as u64);
        let term = Rat::from_integer(choose)
            * pow_rat(t, j)
            * pow_rat(&(Rat::one() - t.clone()), n - j);
        acc += term;
    }
    acc
}

fn pow_rat(base: &Rat, exp: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

fn binomial_big(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Inverts the Beta CDF through a 20-segment piecewise-linear interpolation
/// on exact knot values; returns a rational in [0, 1].
fn beta_inverse(a: u32, b: u32, u: &Rat) -> Rat {
    const SEGMENTS: i64 = 20;
    let knot = |k: i64| rat(k, SEGMENTS);
    let mut prev_t = Rat::zero();
    let mut prev_f = Rat::zero();
    for k in 1..=SEGMENTS {
        let t = knot(k);
        let f = beta_cdf(a, b, &t);
        if *u <= f {
            let width = t.clone() - prev_t.clone();
            let rise = f - prev_f.clone();
            if rise.is_zero() {
                return t;
            }
            return prev_t + (u.clone() - prev_f) / rise * width;
        }
        prev_t = t;
        prev_f = f;
    }
    Rat::one()
}

fn round_half_up(v: &Rat) -> BigInt {
    (v + rat(1, 2)).floor().to_integer()
}

/// Rounds to the nearest multiple of 1/100, toward the value.
fn round_centi(v: &Rat) -> Rat {
    Rat::new(round_half_up(&(v * rint(100))), BigInt::from(100))
}

// counter slots per object: 2 dimensions, then (presence, value) per side
const SLOTS_PER_OBJECT: u64 = 12;

/// Generates `count` instances. Dimensions are Beta-distributed integers in
/// the size range; each side independently receives a clearance with the
/// configured probability, uniform over [0, parent dimension] and rounded
/// to hundredths. The region is the strip width by a trivially sufficient
/// stacked height. Deterministic in (seed, count).
pub fn generate(spec: &GenSpec, count: usize) -> Vec<RppInstance> {
    let (a, b) = spec.beta_params;
    assert!(a >= 1 && b >= 1, "integer Beta parameters");
    let (lo, hi) = spec.size_range;
    let span = rint(hi - lo);
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let draw = |slot: u64| uniform(spec.seed, ((idx as u64) << 32) | slot);
        let mut objects = Vec::with_capacity(spec.n_objects);
        for i in 0..spec.n_objects as u64 {
            let base = i * SLOTS_PER_OBJECT;
            let dim = |slot: u64| -> Rat {
                let t = beta_inverse(a, b, &draw(base + slot));
                Rat::from_integer(round_half_up(&(rint(lo) + span.clone() * t)))
            };
            let dx = dim(0);
            let dy = dim(1);
            let side = |m: u64, parent: &Rat| -> Rat {
                if draw(base + 2 + 2 * m) < spec.clearance_prob {
                    round_centi(&(draw(base + 3 + 2 * m) * parent.clone()))
                } else {
                    Rat::zero()
                }
            };
            let sigma = Clearances {
                xm: side(0, &dx),
                ym: side(1, &dy),
                xp: side(2, &dx),
                yp: side(3, &dy),
            };
            objects.push(RppObject { dx, dy, sigma });
        }
        let total_height: Rat = objects
            .iter()
            .map(|o| o.extent(crate::rpp::Dir::Y))
            .fold(Rat::zero(), |acc, v| acc + v);
        out.push(RppInstance::new(
            (spec.strip_width.clone(), total_height),
            objects,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rpp::DIRS;
    use num_traits::Signed;

    #[test]
    fn beta_cdf_endpoints_and_shape() {
        assert_eq!(beta_cdf(2, 5, &Rat::zero()), Rat::zero());
        assert_eq!(beta_cdf(2, 5, &Rat::one()), Rat::one());
        // closed form for Beta(2,5): 15t^2 - 40t^3 + 45t^4 - 24t^5 + 5t^6
        let t = rat(1, 4);
        let poly = rat(15, 16) - rat(40, 64) + rat(45, 256) - rat(24, 1024) + rat(5, 4096);
        assert_eq!(beta_cdf(2, 5, &t), poly);
    }

    #[test]
    fn inverse_hits_knots_exactly() {
        let f = beta_cdf(2, 5, &rat(3, 20));
        assert_eq!(beta_inverse(2, 5, &f), rat(3, 20));
    }

    #[test]
    fn dims_in_range_and_deterministic() {
        let spec = GenSpec::new(10, 12345);
        let a = generate(&spec, 3);
        let b = generate(&spec, 3);
        assert_eq!(a, b);
        for inst in &a {
            assert_eq!(inst.len(), 10);
            for o in &inst.objects {
                for s in DIRS {
                    let d = o.dim(s);
                    assert!(*d >= rint(5) && *d <= rint(30), "dim {d} out of range");
                    assert!(d.is_integer());
                }
            }
        }
    }

    #[test]
    fn clearances_bounded_by_parent_dimension() {
        let spec = GenSpec::new(25, 999);
        for inst in generate(&spec, 4) {
            for o in &inst.objects {
                for s in DIRS {
                    assert!(o.sigma.minus(s) <= o.dim(s));
                    assert!(o.sigma.plus(s) <= o.dim(s));
                    assert!(!o.sigma.minus(s).is_negative());
                    // denominators divide 100
                    assert!((o.sigma.plus(s) * rint(100)).is_integer());
                }
            }
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate(&GenSpec::new(10, 1), 1);
        let b = generate(&GenSpec::new(10, 2), 1);
        assert_ne!(a, b);
    }
}
