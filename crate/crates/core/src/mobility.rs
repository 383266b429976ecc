//! Per-iteration movement: stationary, 8-direction random walk, and
//! cyclic waypoint profiles with dwell pauses.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::config::{MobilityMode, MobilityParams};
use crate::error::ConfigError;
use crate::topology::{Position, Torus};

const COMPASS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (0.0, 1.0),
    (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (-1.0, 0.0),
    (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    (0.0, -1.0),
    (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityState {
    pub mode: MobilityMode,
    pub waypoints: Vec<Position>,
    pub current_target: usize,
    pub dwell_remaining: u32,
    pub dwell_iterations: u32,
    pub step_length: f64,
}

/// Builds a peer's movement state; profile peers get `waypoint_count`
/// waypoints drawn uniformly from the disc of `profile_radius` around `start`.
pub fn init_mobility<R: Rng + ?Sized>(
    start: Position,
    mode: MobilityMode,
    params: &MobilityParams,
    torus: &Torus,
    rng: &mut R,
) -> Result<MobilityState, ConfigError> {
    let waypoints = match mode {
        MobilityMode::ProfileBased => {
            if !(params.profile_radius > 0.0) {
                return Err(ConfigError::ProfileRadius(params.profile_radius));
            }
            (0..params.waypoint_count)
                .map(|_| {
                    let r = params.profile_radius * rng.gen::<f64>().sqrt();
                    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                    torus.wrap(Position::new(
                        start.x + r * theta.cos(),
                        start.y + r * theta.sin(),
                    ))
                })
                .collect()
        }
        MobilityMode::Stationary | MobilityMode::RandomWalk => Vec::new(),
    };
    Ok(MobilityState {
        mode,
        waypoints,
        current_target: 0,
        dwell_remaining: 0,
        dwell_iterations: params.dwell_iterations,
        step_length: params.step_length,
    })
}

/// Advances one iteration and returns the new (wrapped) position.
pub fn step_position<R: Rng + ?Sized>(
    pos: Position,
    state: &mut MobilityState,
    torus: &Torus,
    rng: &mut R,
) -> Position {
    match state.mode {
        MobilityMode::Stationary => pos,
        MobilityMode::RandomWalk => {
            let (dx, dy) = COMPASS[rng.gen_range(0..COMPASS.len())];
            torus.wrap(Position::new(
                pos.x + dx * state.step_length,
                pos.y + dy * state.step_length,
            ))
        }
        MobilityMode::ProfileBased => step_profile(pos, state, torus),
    }
}

fn step_profile(pos: Position, state: &mut MobilityState, torus: &Torus) -> Position {
    if state.waypoints.is_empty() {
        return pos;
    }
    if state.dwell_remaining > 0 {
        state.dwell_remaining -= 1;
        if state.dwell_remaining == 0 {
            state.advance_target();
        }
        return pos;
    }
    let target = state.waypoints[state.current_target];
    let (dx, dy) = torus.delta(pos, target);
    let dist = dx.hypot(dy);
    if dist <= state.step_length {
        state.dwell_remaining = state.dwell_iterations;
        if state.dwell_remaining == 0 {
            state.advance_target();
        }
        return target;
    }
    let s = state.step_length / dist;
    torus.wrap(Position::new(pos.x + dx * s, pos.y + dy * s))
}

impl MobilityState {
    fn advance_target(&mut self) {
        self.current_target = (self.current_target + 1) % self.waypoints.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use crate::topology::torus_distance;

    const GRID: Torus = Torus::new(100.0, 100.0);

    fn params() -> MobilityParams {
        MobilityParams::default()
    }

    #[test]
    fn stationary_never_moves() {
        let mut rng = stream(1, Stream::Mobility);
        let start = Position::new(12.0, 34.0);
        let mut st =
            init_mobility(start, MobilityMode::Stationary, &params(), &GRID, &mut rng).unwrap();
        assert!(st.waypoints.is_empty());
        let mut p = start;
        for _ in 0..1000 {
            p = step_position(p, &mut st, &GRID, &mut rng);
        }
        assert_eq!(p, start);
    }

    #[test]
    fn random_walk_moves_exactly_one_step() {
        let mut rng = stream(2, Stream::Mobility);
        let start = Position::new(50.0, 50.0);
        let mut st =
            init_mobility(start, MobilityMode::RandomWalk, &params(), &GRID, &mut rng).unwrap();
        for _ in 0..200 {
            let p = step_position(start, &mut st, &GRID, &mut rng);
            assert!((torus_distance(start, p, &GRID) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_waypoints_lie_within_radius() {
        let mut rng = stream(3, Stream::Mobility);
        for _ in 0..1000 {
            let start = GRID.random_position(&mut rng);
            let st = init_mobility(
                start,
                MobilityMode::ProfileBased,
                &params(),
                &GRID,
                &mut rng,
            )
            .unwrap();
            assert_eq!(st.waypoints.len(), 5);
            for w in &st.waypoints {
                assert!(GRID.contains(*w));
                assert!(torus_distance(start, *w, &GRID) <= 20.0 + 1e-9);
            }
        }
    }

    #[test]
    fn profile_init_is_deterministic() {
        let start = Position::new(3.0, 97.0);
        let a = init_mobility(
            start,
            MobilityMode::ProfileBased,
            &params(),
            &GRID,
            &mut stream(9, Stream::Mobility),
        )
        .unwrap();
        let b = init_mobility(
            start,
            MobilityMode::ProfileBased,
            &params(),
            &GRID,
            &mut stream(9, Stream::Mobility),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nonpositive_profile_radius_is_rejected() {
        let p = MobilityParams {
            profile_radius: 0.0,
            ..params()
        };
        let r = init_mobility(
            Position::new(1.0, 1.0),
            MobilityMode::ProfileBased,
            &p,
            &GRID,
            &mut stream(0, Stream::Mobility),
        );
        assert!(matches!(r, Err(ConfigError::ProfileRadius(_))));
    }

    #[test]
    fn profile_with_zero_dwell_visits_both_waypoints() {
        let a = Position::new(10.0, 10.0);
        let b = Position::new(25.0, 30.0);
        let path_len = torus_distance(a, b, &GRID);
        let mut st = MobilityState {
            mode: MobilityMode::ProfileBased,
            waypoints: vec![a, b],
            current_target: 0,
            dwell_remaining: 0,
            dwell_iterations: 0,
            step_length: 1.0,
        };
        let mut rng = stream(0, Stream::Mobility);
        let mut p = Position::new(40.0, 40.0);
        let (mut hit_a, mut hit_b) = (0, 0);
        let mut trace = Vec::new();
        for _ in 0..(10.0 * (path_len + torus_distance(p, a, &GRID))).ceil() as usize {
            p = step_position(p, &mut st, &GRID, &mut rng);
            hit_a += usize::from(p == a);
            hit_b += usize::from(p == b);
            trace.push(p);
        }
        assert!(hit_a >= 2 && hit_b >= 2, "a {hit_a} b {hit_b}");
        // Eventually periodic: after the first visit the cycle repeats exactly.
        let first = trace.iter().position(|&q| q == a).unwrap();
        let period = trace[first + 1..].iter().position(|&q| q == a).unwrap() + 1;
        for i in first..trace.len() - period {
            assert!(torus_distance(trace[i], trace[i + period], &GRID) < 1e-9);
        }
    }

    #[test]
    fn profile_dwells_at_each_waypoint() {
        let a = Position::new(10.0, 10.0);
        let mut st = MobilityState {
            mode: MobilityMode::ProfileBased,
            waypoints: vec![a, Position::new(20.0, 10.0)],
            current_target: 0,
            dwell_remaining: 0,
            dwell_iterations: 3,
            step_length: 1.0,
        };
        let mut rng = stream(0, Stream::Mobility);
        let mut p = Position::new(9.5, 10.0);
        p = step_position(p, &mut st, &GRID, &mut rng);
        assert_eq!(p, a);
        for _ in 0..3 {
            p = step_position(p, &mut st, &GRID, &mut rng);
            assert_eq!(p, a);
        }
        assert_eq!(st.current_target, 1);
        p = step_position(p, &mut st, &GRID, &mut rng);
        assert!((p.x - 11.0).abs() < 1e-12);
    }

    #[test]
    fn moves_take_shortest_path_across_the_seam() {
        let mut st = MobilityState {
            mode: MobilityMode::ProfileBased,
            waypoints: vec![Position::new(2.0, 50.0), Position::new(50.0, 50.0)],
            current_target: 0,
            dwell_remaining: 0,
            dwell_iterations: 0,
            step_length: 1.0,
        };
        let p = step_position(
            Position::new(98.0, 50.0),
            &mut st,
            &GRID,
            &mut stream(0, Stream::Mobility),
        );
        assert!((p.x - 99.0).abs() < 1e-12);
    }
}
