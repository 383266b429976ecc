use proptest::prelude::*;

use siot_core::config::{MobilityMode, Network, SimulationConfig, Strategy as Sharing};
use siot_core::engine::run_observed;
use siot_core::peer::PeerStatus;
use siot_core::social::{bounded_target, SocialTables};
use siot_core::topology::{PeerId, Position, Torus};

fn network() -> impl Strategy<Value = Network> {
    prop_oneof![Just(Network::Mesh), Just(Network::Regular), Just(Network::SmallWorld)]
}

fn strategy() -> impl Strategy<Value = Sharing> {
    prop_oneof![
        Just(Sharing::Competitive),
        Just(Sharing::Cooperative),
        Just(Sharing::CooperativeRestricted)
    ]
}

fn mobility() -> impl Strategy<Value = MobilityMode> {
    prop_oneof![
        Just(MobilityMode::Stationary),
        Just(MobilityMode::RandomWalk),
        Just(MobilityMode::ProfileBased)
    ]
}

prop_compose! {
    fn config()(
        population in 2usize..40,
        network in network(),
        beta in 0.0..=1.0f64,
        strategy in strategy(),
        mobility in mobility(),
        k in 0.0..=1.0f64,
        m in 0.0..=1.0f64,
        freq in 1u64..600,
        radius in 1.0..20.0f64,
        seed in any::<u64>(),
    ) -> SimulationConfig {
        SimulationConfig {
            population,
            network,
            beta,
            strategy,
            mobility,
            k,
            m,
            consolidate_frequency: freq,
            radius,
            seed,
            horizon_days: 1,
            ..SimulationConfig::default()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn per_tick_invariants_hold(cfg in config()) {
        let step = cfg.motion.step_length + 1e-9;
        let mut prev: Option<(Vec<PeerStatus>, Vec<u64>, Vec<Position>)> = None;
        let mut failures: Vec<String> = Vec::new();
        run_observed(&cfg, cfg.seed, |w| {
            let it = w.iteration();
            for (i, p) in w.peers().iter().enumerate() {
                if let Some((st, dics, pos)) = &prev {
                    let expect = if p.status != st[i] || p.changed_this_tick() { 0 } else { dics[i] + 1 };
                    if p.dics != expect {
                        failures.push(format!("it {it} peer {i}: dics {} expected {expect}", p.dics));
                    }
                    if w.torus().distance(pos[i], w.positions()[i]) > step {
                        failures.push(format!("it {it} peer {i}: moved too far"));
                    }
                }
                if let Some(s) = p.current_service {
                    if p.units_completed > cfg.services.scu_of(s) {
                        failures.push(format!("it {it} peer {i}: units past scu"));
                    }
                }
                if cfg.strategy == Sharing::Competitive && p.status == PeerStatus::Serve {
                    failures.push(format!("it {it} peer {i}: serve under competition"));
                }
                if matches!(p.status, PeerStatus::Request | PeerStatus::Serve) != p.partner.is_some() {
                    failures.push(format!("it {it} peer {i}: partner/status mismatch"));
                }
                if !p.recent_services_completed.iter().all(|s| p.services_completed.contains(s)) {
                    failures.push(format!("it {it} peer {i}: recent not within lifetime"));
                }
            }
            if !w.positions().iter().all(|&p| w.torus().contains(p)) {
                failures.push(format!("it {it}: position outside the grid"));
            }
            prev = Some((
                w.peers().iter().map(|p| p.status).collect(),
                w.peers().iter().map(|p| p.dics).collect(),
                w.positions().to_vec(),
            ));
        })
        .unwrap();
        prop_assert!(failures.is_empty(), "{:?}", &failures[..failures.len().min(5)]);
    }

    #[test]
    fn social_chain_and_bounds_hold_at_the_end(cfg in config()) {
        let mut ok = true;
        run_observed(&cfg, cfg.seed, |w| {
            if !w.is_finished() {
                return;
            }
            for t in w.social() {
                let n = t.neighbor_count();
                let c = t.contacts().len();
                ok &= t.contacts().keys().all(|id| t.repeated_encounters(*id).is_some());
                ok &= t.friends().keys().all(|id| t.contacts().contains_key(id));
                ok &= c <= bounded_target(cfg.k, n);
                ok &= t.friends().len() <= bounded_target(cfg.m, c);
            }
        })
        .unwrap();
        prop_assert!(ok);
    }

    #[test]
    fn torus_distance_is_a_symmetric_wrapped_metric(
        ax in 0.0..100.0f64, ay in 0.0..100.0f64, bx in 0.0..100.0f64, by in 0.0..100.0f64,
    ) {
        let t = Torus::new(100.0, 100.0);
        let (a, b) = (Position::new(ax, ay), Position::new(bx, by));
        let d = t.distance(a, b);
        prop_assert_eq!(d, t.distance(b, a));
        prop_assert!(d <= ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt() + 1e-12);
        prop_assert!(d <= 50f64.hypot(50.0) + 1e-12);
        prop_assert_eq!(t.distance(a, a), 0.0);
    }

    #[test]
    fn consolidation_is_monotone_and_bounded(
        met in proptest::collection::vec(1u32..50, 0..40),
        k in 0.0..=1.0f64,
        m in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let mut t = SocialTables::new(PeerId(0), 50);
        let ids: Vec<PeerId> = met.iter().map(|&i| PeerId(i)).collect();
        let mut rng = siot_core::rng::stream(seed, siot_core::rng::Stream::Social);
        let mut last = (0, 0);
        for chunk in ids.chunks(5) {
            t.record_encounters(chunk);
            t.consolidate(k, m, 0, &mut rng);
            let now = (t.contacts().len(), t.friends().len());
            prop_assert!(now.0 >= last.0 && now.1 >= last.1);
            prop_assert_eq!(now.0, bounded_target(k, t.neighbor_count()));
            prop_assert!(now.1 <= bounded_target(m, now.0));
            last = now;
        }
    }
}
