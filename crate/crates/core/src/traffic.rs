//! Diurnal request generation: Table-style peak/off-peak user profiles turned
//! into a stream of grouped requests, either as a nonhomogeneous Poisson
//! process (thinning) or with deterministic fixed spacing.

use crate::rng::{fnv1a64, SplitMix64};
use crate::scenario::{ArrivalProcess, Region, UserBaseSpec, SECONDS_PER_DAY, SECONDS_PER_HOUR};

/// One (possibly grouped) unit of work and its per-hop timestamps.
#[derive(Debug, Clone)]
pub struct Request {
    pub id: u64,
    pub user_base: usize,
    pub origin_region: Region,
    /// Real requests represented; every statistic is weighted by this.
    pub weight: u64,
    pub size_bytes: u64,
    pub instructions: u64,
    pub t_origin: f64,
    pub t_arrive_dc: Option<f64>,
    pub t_complete: Option<f64>,
    pub t_response: Option<f64>,
    pub dc: Option<usize>,
    pub vm: Option<u32>,
}

impl Request {
    pub fn new(
        id: u64,
        user_base: usize,
        ub: &UserBaseSpec,
        t_origin: f64,
    ) -> Self {
        Self {
            id,
            user_base,
            origin_region: ub.region,
            weight: ub.grouping_factor,
            size_bytes: ub.data_size_per_request,
            instructions: ub.instruction_length,
            t_origin,
            t_arrive_dc: None,
            t_complete: None,
            t_response: None,
            dc: None,
            vm: None,
        }
    }
}

fn day_seconds(t: f64) -> f64 {
    let day = SECONDS_PER_DAY as f64;
    let r = t % day;
    if r < 0.0 {
        r + day
    } else {
        r
    }
}

fn base_level(ub: &UserBaseSpec, day_s: f64) -> f64 {
    let start = (ub.peak_start_hour as u64 * SECONDS_PER_HOUR) as f64;
    let end = (ub.peak_end_hour as u64 * SECONDS_PER_HOUR) as f64;
    if day_s >= start && day_s < end {
        ub.avg_peak_users as f64
    } else {
        ub.avg_off_peak_users as f64
    }
}

/// Online population at GMT-aligned time `t` (t=0 is 00:00 GMT unless the
/// caller adds a start-hour offset). Inside the half-open peak window the
/// value is `avg_peak_users`, outside `avg_off_peak_users`; with `ramp_s > 0`
/// each boundary becomes a linear transition of that length starting at the
/// boundary.
pub fn users_online(ub: &UserBaseSpec, t: f64, ramp_s: u64) -> f64 {
    let day_s = day_seconds(t);
    if ramp_s == 0 {
        return base_level(ub, day_s);
    }
    let day = SECONDS_PER_DAY as f64;
    let ramp = ramp_s as f64;
    let peak = ub.avg_peak_users as f64;
    let off = ub.avg_off_peak_users as f64;
    let start = day_seconds((ub.peak_start_hour as u64 * SECONDS_PER_HOUR) as f64);
    let end = day_seconds((ub.peak_end_hour as u64 * SECONDS_PER_HOUR) as f64);

    // nearest active ramp wins if windows overlap
    let mut best: Option<(f64, f64, f64)> = None; // (distance, from, to)
    for (b, from, to) in [(start, off, peak), (end, peak, off)] {
        let mut d = day_s - b;
        if d < 0.0 {
            d += day;
        }
        if d < ramp && best.map_or(true, |(bd, _, _)| d < bd) {
            best = Some((d, from, to));
        }
    }
    match best {
        Some((d, from, to)) => from + (to - from) * d / ramp,
        None => base_level(ub, day_s),
    }
}

/// Grouped requests per second at time `t`.
pub fn arrival_rate(ub: &UserBaseSpec, t: f64, ramp_s: u64) -> f64 {
    users_online(ub, t, ramp_s) * ub.requests_per_user_per_hour
        / SECONDS_PER_HOUR as f64
        / ub.grouping_factor as f64
}

/// Per-user-base arrival stream. Owned by the single-threaded engine; the RNG
/// stream derives from `seed ^ fnv1a64(name)` so config reordering cannot
/// change it.
#[derive(Debug, Clone)]
pub struct ArrivalGen {
    ub: UserBaseSpec,
    ramp_s: u64,
    /// Added to engine time before profile lookup (start-hour offset).
    offset_s: f64,
    mode: ArrivalProcess,
    rng: SplitMix64,
    rate_bound: f64,
}

impl ArrivalGen {
    pub fn new(
        ub: &UserBaseSpec,
        ramp_s: u64,
        start_hour: u32,
        mode: ArrivalProcess,
        run_seed: u64,
    ) -> Self {
        let max_users = ub.avg_peak_users.max(ub.avg_off_peak_users) as f64;
        let rate_bound = max_users * ub.requests_per_user_per_hour
            / SECONDS_PER_HOUR as f64
            / ub.grouping_factor as f64;
        Self {
            ub: ub.clone(),
            ramp_s,
            offset_s: (start_hour as u64 * SECONDS_PER_HOUR) as f64,
            mode,
            rng: SplitMix64::new(run_seed ^ fnv1a64(ub.name.as_bytes())),
            rate_bound,
        }
    }

    fn rate(&self, t: f64) -> f64 {
        arrival_rate(&self.ub, t + self.offset_s, self.ramp_s)
    }

    /// Next profile corner strictly after `t` (window and ramp edges).
    fn next_corner(&self, t: f64) -> f64 {
        let day = SECONDS_PER_DAY as f64;
        let gmt_day = day_seconds(t + self.offset_s);
        let s = (self.ub.peak_start_hour as u64 * SECONDS_PER_HOUR) as f64;
        let e = (self.ub.peak_end_hour as u64 * SECONDS_PER_HOUR) as f64;
        let ramp = self.ramp_s as f64;
        let mut min_delta = day;
        for c in [s, s + ramp, e, e + ramp] {
            let c = day_seconds(c);
            let mut delta = c - gmt_day;
            if delta <= 0.0 {
                delta += day;
            }
            if delta < min_delta {
                min_delta = delta;
            }
        }
        t + min_delta
    }

    /// Next origination time strictly after `t`, or `+inf` when no arrival
    /// can occur before `horizon`.
    pub fn next_arrival(&mut self, t: f64, horizon: f64) -> f64 {
        match self.mode {
            ArrivalProcess::Poisson => self.next_poisson(t, horizon),
            ArrivalProcess::Deterministic => self.next_deterministic(t, horizon),
        }
    }

    fn next_poisson(&mut self, mut t: f64, horizon: f64) -> f64 {
        // Thinning against the constant bound max(peak, off); users_online is
        // bounded by the two levels, ramps included.
        if self.rate_bound <= 0.0 {
            return f64::INFINITY;
        }
        loop {
            t += self.rng.next_exp(self.rate_bound);
            if t >= horizon {
                return f64::INFINITY;
            }
            if self.rng.next_f64() * self.rate_bound <= self.rate(t) {
                return t;
            }
        }
    }

    fn next_deterministic(&mut self, mut t: f64, horizon: f64) -> f64 {
        loop {
            if t >= horizon {
                return f64::INFINITY;
            }
            let r = self.rate(t);
            if r <= 0.0 {
                t = self.next_corner(t);
                continue;
            }
            let cand = t + 1.0 / r;
            // restart only where the rate actually changes
            let mut corner = self.next_corner(t);
            let mut restart = None;
            while corner < cand {
                if self.rate(corner) != r {
                    restart = Some(corner);
                    break;
                }
                corner = self.next_corner(corner);
            }
            match restart {
                Some(b) => t = b,
                None => {
                    return if cand < horizon { cand } else { f64::INFINITY };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use proptest::prelude::*;

    fn ub1() -> UserBaseSpec {
        UserBaseSpec {
            name: String::from("UB1"),
            region: Region(0),
            requests_per_user_per_hour: 15.0,
            data_size_per_request: 100,
            peak_start_hour: 15,
            peak_end_hour: 17,
            avg_peak_users: 450_000,
            avg_off_peak_users: 600_000,
            instruction_length: 250,
            grouping_factor: 1000,
        }
    }

    const H: f64 = 3600.0;

    #[test]
    fn ub1_peak_and_off_peak_levels() {
        assert_eq!(users_online(&ub1(), 16.0 * H, 0), 450_000.0);
        assert_eq!(users_online(&ub1(), 3.0 * H, 0), 600_000.0);
    }

    #[test]
    fn window_is_half_open() {
        let ub = ub1();
        assert_eq!(users_online(&ub, 15.0 * H, 0), 450_000.0);
        assert_eq!(users_online(&ub, 17.0 * H, 0), 600_000.0);
        assert_eq!(users_online(&ub, 17.0 * H - 1.0, 0), 450_000.0);
    }

    #[test]
    fn ramp_midpoint_halves_the_step() {
        let ub = UserBaseSpec {
            avg_off_peak_users: 0,
            ..ub1()
        };
        let v = users_online(&ub, 17.0 * H + 300.0, 600);
        assert!((v - 225_000.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn next_day_repeats_profile() {
        let ub = ub1();
        assert_eq!(
            users_online(&ub, 16.0 * H, 0),
            users_online(&ub, 16.0 * H + SECONDS_PER_DAY as f64, 0)
        );
    }

    #[test]
    fn hour_24_window_end_wraps_at_midnight() {
        let ub = UserBaseSpec {
            peak_start_hour: 16,
            peak_end_hour: 24,
            ..ub1()
        };
        assert_eq!(users_online(&ub, 23.5 * H, 0), 450_000.0);
        assert_eq!(users_online(&ub, 0.5 * H, 0), 600_000.0);
    }

    #[test]
    fn peak_arrival_rate_matches_arithmetic() {
        // 450000 users * 15 req/h / 3600 / 1000 groups
        let r = arrival_rate(&ub1(), 16.0 * H, 0);
        assert!((r - 1.875).abs() < 1e-12, "{r}");
    }

    #[test]
    fn zero_users_zero_rate() {
        let ub = UserBaseSpec {
            avg_peak_users: 0,
            avg_off_peak_users: 0,
            ..ub1()
        };
        assert_eq!(arrival_rate(&ub, 16.0 * H, 0), 0.0);
    }

    #[test]
    fn identity_grouping_gives_real_rate() {
        let ub = UserBaseSpec {
            grouping_factor: 1,
            ..ub1()
        };
        let r = arrival_rate(&ub, 16.0 * H, 0);
        assert!((r - 1875.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_gaps_are_reciprocal_rate() {
        // constant profile: peak == off-peak, so the rate never changes
        let ub = UserBaseSpec {
            avg_peak_users: 450_000,
            avg_off_peak_users: 450_000,
            ..ub1()
        };
        let mut gen = ArrivalGen::new(&ub, 0, 0, ArrivalProcess::Deterministic, 0);
        let mut t = 0.0;
        for _ in 0..100 {
            let next = gen.next_arrival(t, 1e9);
            assert!((next - t - 1.0 / 1.875).abs() < 1e-9);
            t = next;
        }
    }

    #[test]
    fn zero_rate_everywhere_is_infinite() {
        let ub = UserBaseSpec {
            avg_peak_users: 0,
            avg_off_peak_users: 0,
            ..ub1()
        };
        let mut det = ArrivalGen::new(&ub, 0, 0, ArrivalProcess::Deterministic, 0);
        assert!(det.next_arrival(0.0, 3600.0).is_infinite());
        let mut poi = ArrivalGen::new(&ub, 0, 0, ArrivalProcess::Poisson, 0);
        assert!(poi.next_arrival(0.0, 3600.0).is_infinite());
    }

    #[test]
    fn arrivals_respect_horizon() {
        let mut gen = ArrivalGen::new(&ub1(), 0, 0, ArrivalProcess::Poisson, 7);
        let mut t = 0.0;
        loop {
            t = gen.next_arrival(t, 100.0);
            if t.is_infinite() {
                break;
            }
            assert!(t < 100.0);
        }
    }

    #[test]
    fn exponential_gap_mean_lln() {
        // constant rate 2/s; mean gap over 1e5 draws within 2% of 0.5 s
        let ub = UserBaseSpec {
            avg_peak_users: 480,
            avg_off_peak_users: 480,
            grouping_factor: 1,
            ..ub1()
        };
        assert!((arrival_rate(&ub, 0.0, 0) - 2.0).abs() < 1e-12);
        let mut gen = ArrivalGen::new(&ub, 0, 0, ArrivalProcess::Poisson, 12345);
        let n = 100_000;
        let mut t = 0.0;
        for _ in 0..n {
            t = gen.next_arrival(t, f64::INFINITY);
        }
        let mean = t / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean gap {mean}");
    }

    #[test]
    fn poisson_count_within_4_sigma() {
        // constant rate window: expected = users * req/h * T/3600
        let ub = UserBaseSpec {
            avg_peak_users: 450_000,
            avg_off_peak_users: 450_000,
            ..ub1()
        };
        let horizon = 3600.0;
        let expected = 450_000.0 * 15.0 * (horizon / 3600.0) / 1000.0;
        let mut gen = ArrivalGen::new(&ub, 0, 0, ArrivalProcess::Poisson, 5);
        let mut t = 0.0;
        let mut n = 0u64;
        loop {
            t = gen.next_arrival(t, horizon);
            if t.is_infinite() {
                break;
            }
            n += 1;
        }
        let sigma = libm::sqrt(expected);
        assert!(
            (n as f64 - expected).abs() <= 4.0 * sigma,
            "count {n} vs expected {expected}"
        );
    }

    #[test]
    fn deterministic_count_is_exact_to_a_boundary_request() {
        let ub = UserBaseSpec {
            avg_peak_users: 450_000,
            avg_off_peak_users: 450_000,
            ..ub1()
        };
        let horizon = 3600.0;
        let expected = 1.875 * horizon;
        let mut gen = ArrivalGen::new(&ub, 0, 0, ArrivalProcess::Deterministic, 0);
        let mut t = 0.0;
        let mut n = 0u64;
        loop {
            t = gen.next_arrival(t, horizon);
            if t.is_infinite() {
                break;
            }
            n += 1;
        }
        assert!((n as f64 - expected).abs() <= 1.0, "count {n} vs {expected}");
    }

    proptest! {
        #[test]
        fn users_online_is_bounded_by_the_two_levels(
            t in 0.0f64..(3.0 * SECONDS_PER_DAY as f64),
            ramp in 0u64..7200,
            peak in 0u64..1_000_000,
            off in 0u64..1_000_000,
            start in 0u32..23,
        ) {
            let ub = UserBaseSpec {
                avg_peak_users: peak,
                avg_off_peak_users: off,
                peak_start_hour: start,
                peak_end_hour: start + 1,
                ..ub1()
            };
            let v = users_online(&ub, t, ramp);
            let lo = peak.min(off) as f64;
            let hi = peak.max(off) as f64;
            prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
        }

        #[test]
        fn users_online_is_lipschitz_when_ramped(
            t in 0.0f64..(SECONDS_PER_DAY as f64),
            delta in 0.0f64..30.0,
        ) {
            let ub = ub1();
            let ramp = 600u64;
            let slope = (ub.avg_peak_users as f64 - ub.avg_off_peak_users as f64).abs()
                / ramp as f64;
            let a = users_online(&ub, t, ramp);
            let b = users_online(&ub, t + delta, ramp);
            prop_assert!((b - a).abs() <= slope * delta + 1e-6);
        }
    }
}
