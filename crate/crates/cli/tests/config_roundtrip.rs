use fraccos_cli::config::{
    ConfigFile, ForcingProfile, ForcingTerm, HConfig, KernelConfig, MapConfig, Profile,
};
use proptest::prelude::*;

fn h_config() -> impl Strategy<Value = HConfig> {
    let kernel = prop_oneof![
        (-5.0..5.0f64).prop_map(KernelConfig::Constant),
        (-5.0..5.0f64, 0.0..3.0f64)
            .prop_map(|(scale, rate)| KernelConfig::ExpDecay { scale, rate }),
    ];
    let map = prop_oneof![
        Just(MapConfig::Sin),
        Just(MapConfig::Cubic),
        proptest::collection::vec(-2.0..2.0f64, 1..4).prop_map(MapConfig::Polynomial),
        proptest::collection::vec(0.1..1.0f64, 2..5).prop_map(|steps| {
            let w: Vec<f64> = steps
                .iter()
                .scan(-1.0, |acc, s| {
                    *acc += s;
                    Some(*acc)
                })
                .collect();
            let rho = w.iter().map(|v| v * v).collect();
            MapConfig::Table { w, rho }
        }),
    ];
    prop_oneof![
        Just(HConfig::Zero),
        kernel
            .clone()
            .prop_map(|kernel| HConfig::LinearMemory { kernel }),
        (map, proptest::option::of(kernel))
            .prop_map(|(map, kernel)| HConfig::Pointwise { map, kernel }),
    ]
}

fn config() -> impl Strategy<Value = ConfigFile> {
    (1usize..6).prop_flat_map(|n| {
        (
            (1.0001..=2.0f64, 0.0..0.99f64, 0.01..10.0f64, 4usize..5000),
            (
                0usize..8,
                proptest::collection::vec(-3.0..3.0f64, n),
                proptest::collection::vec(-3.0..3.0f64, n),
            ),
            proptest::collection::vec(
                (
                    proptest::collection::vec(-2.0..2.0f64, 1..4),
                    1..=n,
                    -2.0..2.0f64,
                ),
                0..3,
            ),
            h_config(),
            (1e-12..1e-2f64, 1usize..500, 0.01..=1.0f64),
        )
            .prop_map(
                move |(
                    (alpha, beta, t, n_steps),
                    (extra, x, y),
                    f,
                    h,
                    (tol, max_iter, damping),
                )| ConfigFile {
                    alpha,
                    beta,
                    t,
                    n_steps,
                    n_modes: n,
                    m_collocation: n + extra,
                    initial_x: Profile::Coefficients(x),
                    initial_y: Profile::Coefficients(y),
                    f: ForcingProfile::Terms(
                        f.into_iter()
                            .map(|(poly_t, mode, scale)| ForcingTerm {
                                poly_t,
                                mode,
                                scale,
                            })
                            .collect(),
                    ),
                    h,
                    tol,
                    max_iter,
                    damping,
                },
            )
    })
}

proptest! {
    #[test]
    fn parse_inverts_serialize(cfg in config()) {
        let back = ConfigFile::from_json(&cfg.to_json(), "roundtrip.json").unwrap();
        prop_assert_eq!(back, cfg);
    }
}
