use hyperwell_oracle::{count_below, fd_spectrum, richardson, OracleConfig, OracleParity};
use proptest::prelude::*;

fn small(l: f64) -> OracleConfig {
    OracleConfig::new(l, 801, 64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    // The discrete Laplacian is positive semidefinite, so no level can sit
    // below the grid minimum of the potential.
    #[test]
    fn levels_inside_the_well(v0 in 0.5f64..400.0, l in 8.0f64..20.0) {
        let s = fd_spectrum(v0, &small(l)).unwrap();
        for st in &s.states {
            prop_assert!(st.epsilon < 0.0);
            prop_assert!(st.epsilon > -4.0 * v0 / 27.0, "v0={} eps={}", v0, st.epsilon);
        }
        prop_assert_eq!(s.states.len(), s.negative_count.min(64));
    }

    #[test]
    fn parity_alternates_and_nodes_count_levels(v0 in 0.5f64..150.0) {
        let s = fd_spectrum(v0, &small(12.0)).unwrap();
        prop_assert!(!s.states.is_empty());
        for (k, st) in s.states.iter().enumerate() {
            let want = if k % 2 == 0 { OracleParity::Even } else { OracleParity::Odd };
            // deep doublets are degenerate below the solver tolerance
            if k > 0 && (st.epsilon - s.states[k - 1].epsilon).abs() < 1e-9 * st.epsilon.abs() {
                continue;
            }
            prop_assert_eq!(st.parity, want, "v0={} k={}", v0, k);
            prop_assert_eq!(st.nodes, k);
        }
    }

    #[test]
    fn count_below_is_monotone(v0 in 0.5f64..200.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let cfg = small(12.0);
        let (x, y) = (-a * 4.0 * v0 / 27.0, -b * 4.0 * v0 / 27.0);
        let (cx, cy) = (count_below(v0, x, &cfg).unwrap(), count_below(v0, y, &cfg).unwrap());
        if x <= y {
            prop_assert!(cx <= cy);
        } else {
            prop_assert!(cx >= cy);
        }
        prop_assert_eq!(count_below(v0, -4.0 * v0 / 27.0, &cfg).unwrap(), 0);
    }
}

#[test]
fn second_order_convergence() {
    let cfg = OracleConfig::new(10.0, 1001, 3).unwrap();
    let a = richardson(100.0, &cfg).unwrap();
    let b = richardson(100.0, &cfg.halved()).unwrap();
    for k in 0..3 {
        let ratio = (a.coarse[k] - a.fine[k]) / (b.coarse[k] - b.fine[k]);
        assert!((ratio - 4.0).abs() < 0.05, "level {k}: ratio {ratio}");
    }
}
