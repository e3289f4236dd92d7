//! The doubling-map system on `[0, 1)`.
//!
//! States are iterated exactly, either as reduced rationals or as finite
//! binary expansions; floating point never touches the orbit. The yes/no
//! experiment asks at every step whether the state is at least 1/2, which is
//! the leading bit of the expansion.

use alloc::vec::Vec;
use bitvec::vec::BitVec;
use rand::{Rng, RngCore};

use crate::error::{domain, Error, Result};
use crate::tcore::{
    ensemble_statistics, evaluate_rates, EnsembleConfig, Experiment, MeasureSpec, OutcomeRates, RateStatistics,
    Segment, Trajectory,
};

/// Outcome index of "state >= 1/2".
pub const YES: usize = 0;
/// Outcome index of "state < 1/2".
pub const NO: usize = 1;

/// `num / den` in lowest terms with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num >= den {
            return Err(domain("state must be a fraction in [0, 1)"));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    /// `2x mod 1`.
    pub fn doubled(self) -> Self {
        let twice = 2 * self.num as u128;
        let den = self.den as u128;
        let num = if twice >= den { twice - den } else { twice } as u64;
        let g = gcd(num, self.den);
        Self {
            num: num / g,
            den: self.den / g,
        }
    }

    pub fn is_upper_half(&self) -> bool {
        2 * self.num as u128 >= self.den as u128
    }

    /// Nearest double, for reporting only.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Leading binary digits `0.b1 b2 ... bL` of a state. Each step consumes one
/// digit; stepping past the last digit is an error rather than a silent zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence {
    bits: BitVec,
    offset: usize,
}

impl BitSequence {
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Self {
            bits: bits.into_iter().collect(),
            offset: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_bits(core::iter::repeat_n(false, len))
    }

    /// Uniform i.i.d. digits: Lebesgue measure on the dyadic cylinders.
    pub fn uniform(len: usize, rng: &mut dyn RngCore) -> Self {
        let mut bits = BitVec::with_capacity(len);
        while bits.len() < len {
            let word = rng.next_u64();
            let take = (len - bits.len()).min(64);
            bits.extend((0..take).map(|k| (word >> (63 - k)) & 1 == 1));
        }
        Self { bits, offset: 0 }
    }

    /// i.i.d. digits equal to one with probability `p`.
    pub fn biased(len: usize, p: f64, rng: &mut dyn RngCore) -> Self {
        Self::from_bits((0..len).map(|_| rng.random_bool(p)))
    }

    /// Digits still available.
    pub fn remaining(&self) -> usize {
        self.bits.len() - self.offset
    }

    pub fn steps_taken(&self) -> usize {
        self.offset
    }

    pub fn leading_bit(&self) -> Result<bool> {
        self.bits
            .get(self.offset)
            .map(|b| *b)
            .ok_or(Error::PrecisionExhausted(self.offset))
    }

    pub fn shifted(&self) -> Result<Self> {
        if self.remaining() == 0 {
            return Err(Error::PrecisionExhausted(self.offset));
        }
        Ok(Self {
            bits: self.bits.clone(),
            offset: self.offset + 1,
        })
    }

    pub fn ones(&self) -> usize {
        self.bits[self.offset..].count_ones()
    }

    /// The remaining digits as an exact dyadic rational. Needs at most 63
    /// remaining digits.
    pub fn to_rational(&self) -> Result<Rational> {
        let n = self.remaining();
        if n > 63 {
            return Err(domain("too many digits for a 64-bit rational"));
        }
        let num = self.bits[self.offset..]
            .iter()
            .fold(0u64, |acc, b| (acc << 1) | u64::from(*b));
        Rational::new(num, 1u64 << n)
    }

    /// Value from the first 53 remaining digits, for histograms.
    pub fn approx_value(&self) -> f64 {
        let mut scale = 0.5;
        let mut v = 0.0;
        for b in self.bits[self.offset..].iter().take(53) {
            if *b {
                v += scale;
            }
            scale *= 0.5;
        }
        v
    }
}

/// A state of the doubling map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BernoulliState {
    Exact(Rational),
    Bits(BitSequence),
}

impl BernoulliState {
    pub fn is_upper_half(&self) -> Result<bool> {
        match self {
            Self::Exact(r) => Ok(r.is_upper_half()),
            Self::Bits(b) => b.leading_bit(),
        }
    }
}

/// One application of `x -> 2x mod 1`.
pub fn bernoulli_step(x: &BernoulliState) -> Result<BernoulliState> {
    match x {
        BernoulliState::Exact(r) => Ok(BernoulliState::Exact(r.doubled())),
        BernoulliState::Bits(b) => b.shifted().map(BernoulliState::Bits),
    }
}

/// What the experiment sees at one step of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitEvent {
    pub step: usize,
    pub upper_half: bool,
}

/// Events along the first `n_steps` states of the orbit of `x0` (or fewer,
/// if a bit sequence runs out).
pub fn orbit_events(x0: &BernoulliState, n_steps: usize) -> impl Iterator<Item = OrbitEvent> + '_ {
    let mut exact = match x0 {
        BernoulliState::Exact(r) => Some(*r),
        BernoulliState::Bits(_) => None,
    };
    (0..n_steps).map_while(move |step| match (x0, exact.as_mut()) {
        (BernoulliState::Bits(b), _) => b.bits.get(b.offset + step).map(|bit| OrbitEvent {
            step,
            upper_half: *bit,
        }),
        (BernoulliState::Exact(_), Some(r)) => {
            let event = OrbitEvent {
                step,
                upper_half: r.is_upper_half(),
            };
            *r = r.doubled();
            Some(event)
        }
        (BernoulliState::Exact(_), None) => None,
    })
}

/// The yes/no experiment performed at every step.
pub fn yes_no_experiment() -> Experiment<OrbitEvent> {
    Experiment::every_event(2, |e: &OrbitEvent| if e.upper_half { YES } else { NO })
        .expect("two outcomes")
}

/// Outcome counts over the states `G^k(x0)`, `k = 0..n_steps`.
pub fn orbit_rate(x0: &BernoulliState, n_steps: usize) -> Result<OutcomeRates> {
    if n_steps == 0 {
        return Err(domain("orbit rate needs at least one step"));
    }
    if let BernoulliState::Bits(b) = x0 {
        if b.remaining() < n_steps {
            return Err(Error::PrecisionExhausted(b.steps_taken() + b.remaining()));
        }
    }
    evaluate_rates(orbit_events(x0, n_steps), &yes_no_experiment(), n_steps)
}

/// Fraction of yes outcomes along the orbit.
pub fn orbit_yes_rate(x0: &BernoulliState, n_steps: usize) -> Result<f64> {
    orbit_rate(x0, n_steps).map(|r| r.rates()[YES])
}

/// Measure on `n_bits`-digit states drawing each digit independently, equal
/// to one with probability `p`. The density is taken against Lebesgue measure
/// on the dyadic cylinders, so `p = 1/2` has density one.
pub fn biased_measure(p: f64, n_bits: usize) -> Result<MeasureSpec<BitSequence>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("bit bias must lie strictly between 0 and 1"));
    }
    if n_bits == 0 {
        return Err(domain("need at least one digit"));
    }
    let lebesgue = p == 0.5;
    MeasureSpec::new(
        1,
        move |b: &BitSequence| {
            if lebesgue {
                return 1.0;
            }
            let len = b.remaining() as f64;
            let ones = b.ones() as f64;
            libm::exp(len * core::f64::consts::LN_2 + ones * libm::log(p) + (len - ones) * libm::log(1.0 - p))
        },
        move |rng: &mut dyn RngCore| {
            if lebesgue {
                BitSequence::uniform(n_bits, rng)
            } else {
                BitSequence::biased(n_bits, p, rng)
            }
        },
        1.0,
    )
}

/// Rate statistics of the yes/no experiment over `n_steps` when initial
/// states are drawn from `measure`.
pub fn ensemble_rate(
    measure: &MeasureSpec<BitSequence>,
    n_traj: usize,
    n_steps: usize,
    seed: u64,
) -> Result<RateStatistics> {
    if n_steps == 0 {
        return Err(domain("need at least one step"));
    }
    let experiment = yes_no_experiment();
    let config = EnsembleConfig {
        n_traj,
        n_min_trials: n_steps,
        horizon: n_steps,
        seed,
    };
    ensemble_statistics(
        measure,
        |bits: &BitSequence| {
            let bits = bits.clone();
            (0..n_steps).map_while(move |step| {
                bits.bits.get(step).map(|bit| OrbitEvent {
                    step,
                    upper_half: *bit,
                })
            })
        },
        &experiment,
        config,
    )
}

/// Ensemble under Lebesgue measure: initial states are uniform i.i.d. digit
/// strings of length `n_steps`.
pub fn lebesgue_ensemble_rate(n_traj: usize, n_steps: usize, seed: u64) -> Result<RateStatistics> {
    ensemble_rate(&biased_measure(0.5, n_steps)?, n_traj, n_steps, seed)
}

/// The orbit of an exact rational as a step-indexed trajectory (state values
/// rounded to f64 for comparison purposes).
pub fn orbit_trajectory(x0: Rational, n_steps: usize) -> Result<Trajectory> {
    let mut x = x0;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut points = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        times.push(k as f64);
        points.push(alloc::vec![x.to_f64()]);
        x = x.doubled();
    }
    Trajectory::new(alloc::vec![Segment::sampled(times, points)])
}

/// Same, for a finite digit string (at most `remaining` steps).
pub fn bits_trajectory(x0: &BitSequence) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut points = Vec::new();
    let mut state = x0.clone();
    loop {
        times.push(state.steps_taken() as f64);
        points.push(alloc::vec![state.approx_value()]);
        if state.remaining() == 0 {
            break;
        }
        state = state.shifted()?;
    }
    Trajectory::new(alloc::vec![Segment::sampled(times, points)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::tcore::{check_determinism, is_well_defined, pushforward, BoundaryMap, DeterminismCheck};
    use proptest::prelude::*;
    use rand::RngCore;

    fn q(n: u64, d: u64) -> BernoulliState {
        BernoulliState::Exact(Rational::new(n, d).unwrap())
    }

    /// Brute-force orbit enumeration, independent of the experiment path.
    fn enumerate_yes(num: u64, den: u64, steps: usize) -> (u64, u64) {
        let (mut n, mut yes) = (num, 0);
        for _ in 0..steps {
            if 2 * n >= den {
                yes += 1;
            }
            n = (2 * n) % den;
        }
        (yes, steps as u64)
    }

    #[test]
    fn step_examples() {
        assert_eq!(bernoulli_step(&q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(bernoulli_step(&q(2, 7)).unwrap(), q(4, 7));
        assert_eq!(bernoulli_step(&q(3, 4)).unwrap(), q(1, 2));
    }

    #[test]
    fn exhausted_bits() {
        let b = BernoulliState::Bits(BitSequence::from_bits([true]));
        let next = bernoulli_step(&b).unwrap();
        assert_eq!(bernoulli_step(&next), Err(Error::PrecisionExhausted(1)));
        assert_eq!(orbit_rate(&b, 2).unwrap_err(), Error::PrecisionExhausted(1));
    }

    #[test]
    fn orbit_rates_match_enumeration() {
        assert_eq!(orbit_yes_rate(&q(0, 1), 17).unwrap(), 0.0);
        let r = orbit_rate(&q(1, 3), 1000).unwrap();
        assert_eq!((r.counts[YES], r.trials), enumerate_yes(1, 3, 1000));
        assert_eq!(r.rates()[YES], 0.5);
        let r = orbit_rate(&q(2, 7), 3000).unwrap();
        assert_eq!((r.counts[YES], r.trials), enumerate_yes(2, 7, 3000));
        assert_eq!(r.counts[YES] * 3, r.trials);
    }

    #[test]
    fn forced_zero_bits_give_zero_rate() {
        let m = MeasureSpec::new(
            1,
            |_: &BitSequence| 1.0,
            |_: &mut dyn RngCore| BitSequence::zeros(50),
            1.0,
        )
        .unwrap();
        let s = ensemble_rate(&m, 1, 50, 0).unwrap();
        assert_eq!(s.mean[YES], 0.0);
    }

    #[test]
    fn single_step_ensemble_is_a_coin() {
        let s = lebesgue_ensemble_rate(4000, 1, 2).unwrap();
        let se = libm::sqrt(0.25 / 4000.0);
        assert!((s.mean[YES] - 0.5).abs() < 3.0 * se);
        assert!((s.variance[YES] - 0.25).abs() < 0.01);
    }

    #[test]
    fn variance_shrinks_like_inverse_steps() {
        let mut prev = f64::INFINITY;
        for steps in [10usize, 100, 1000] {
            let s = lebesgue_ensemble_rate(2000, steps, 17).unwrap();
            let v = s.variance[YES];
            let expected = 0.25 / steps as f64;
            assert!(v < prev);
            assert!((v / expected - 1.0).abs() < 0.15, "steps {steps}: {v} vs {expected}");
            prev = v;
        }
        let s = lebesgue_ensemble_rate(2000, 1000, 17).unwrap();
        assert!(is_well_defined(&s, 1e-2));
    }

    #[test]
    fn bias_moves_the_mean() {
        let a = ensemble_rate(&biased_measure(0.5, 200).unwrap(), 1000, 200, 3).unwrap();
        let b = ensemble_rate(&biased_measure(0.8, 200).unwrap(), 1000, 200, 3).unwrap();
        assert!(b.mean[YES] > a.mean[YES]);
        assert!((b.mean[YES] - 0.8).abs() < 0.01);
        assert!(biased_measure(0.0, 10).is_err());
        assert!(biased_measure(1.0, 10).is_err());
    }

    #[test]
    fn half_bias_is_lebesgue() {
        let m = biased_measure(0.5, 64).unwrap();
        let mut rng = stream(5, 0);
        let b = m.sample(&mut rng);
        assert_eq!(m.density(&b), 1.0);
        let biased = biased_measure(0.8, 2).unwrap();
        let ones = BitSequence::from_bits([true, true]);
        assert!((biased.density(&ones) - 4.0 * 0.64).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_is_invariant_under_one_step() {
        let m = biased_measure(0.5, 64).unwrap();
        let map = BoundaryMap::new("X_a", "X_a", |b: &BitSequence| b.shifted().ok().map(|s| s.approx_value()));
        let h = pushforward(&m, &map, 100_000, 8, 0.0, 1.0, 20).unwrap();
        for k in 0..h.bins() {
            assert!((h.bin_density(k) - 1.0).abs() < 4.0 * h.bin_density_error(k));
        }
    }

    #[test]
    fn periodic_orbit_self_shift() {
        let check = DeterminismCheck {
            window: 3.0,
            tolerance: 1e-3,
            grid_step: 1.0,
        };
        // exact 2-cycle: shifting by the period never diverges
        let cycle = orbit_trajectory(Rational::new(1, 3).unwrap(), 40).unwrap();
        assert!(check_determinism(&[cycle], check));
        // a string that follows the 2-cycle for twenty digits and then leaves it
        let digits: Vec<bool> = (0..20).map(|k| k % 2 == 1).chain(core::iter::repeat_n(true, 20)).collect();
        let near = bits_trajectory(&BitSequence::from_bits(digits)).unwrap();
        assert!(!check_determinism(&[near], check));
    }

    proptest! {
        #[test]
        fn exact_and_bit_backends_agree(num in 0u64..(1u64 << 40), steps in 0usize..40) {
            let bits = BitSequence::from_bits((0..40).rev().map(|k| (num >> k) & 1 == 1));
            let mut exact = BernoulliState::Exact(Rational::new(num, 1u64 << 40).unwrap());
            let mut digital = BernoulliState::Bits(bits);
            for _ in 0..steps {
                prop_assert_eq!(exact.is_upper_half().unwrap(), digital.is_upper_half().unwrap());
                exact = bernoulli_step(&exact).unwrap();
                digital = bernoulli_step(&digital).unwrap();
            }
            let BernoulliState::Bits(b) = &digital else { unreachable!() };
            prop_assert_eq!(BernoulliState::Exact(b.to_rational().unwrap()), exact);
        }

        #[test]
        fn rates_partition_trials(num in 0u64..1000, den in 1001u64..5000, steps in 1usize..500) {
            let r = orbit_rate(&q(num, den), steps).unwrap();
            prop_assert_eq!(r.counts.iter().sum::<u64>(), r.trials);
            prop_assert!((r.rates().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
