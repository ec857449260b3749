mod common;

use proptest::prelude::*;
use tcl_core::partitioned::{DegreeKind, PartVertex, PartitionedHypergraph, Role, DEFAULT_EMBED_BUDGET};
use tcl_core::Hypergraph3;

fn host() -> impl Strategy<Value = PartitionedHypergraph> {
    (3usize..=6, 0.0f64..=1.0, any::<u64>()).prop_map(|(n, density, seed)| {
        let mut r = tcl_core::rng::seeded(seed);
        common::random_host(&mut r, n, 3, density)
    })
}

#[test]
fn embedding_matches_brute_force() {
    for seed in 1000..1200 {
        let c = common::embedding_case(seed);
        let got = c.host.find_embedding(&c.pattern, DEFAULT_EMBED_BUDGET).unwrap();
        let want = common::oracle_embedding(&c.host, &c.pattern);
        assert_eq!(got.as_ref().map(|e| &e.indices), want.as_ref().map(|(a, _)| a), "seed {seed}");
        if let Some(e) = got {
            assert!(common::check_embedding(&c.host, &c.pattern, &e.indices, &e.vertices), "seed {seed}");
            assert!(c.host.is_embedding(&c.pattern, &e));
        }
    }
}

#[test]
fn complete_host_embeds_every_small_pattern() {
    let h = PartitionedHypergraph::complete(6, |_, _| 1).unwrap();
    for len in 5..=6 {
        let c = Hypergraph3::tight_cycle(len).unwrap();
        let e = h.find_embedding(&c, DEFAULT_EMBED_BUDGET).unwrap().unwrap();
        assert_eq!(e.indices, (1..=len).collect::<Vec<_>>());
    }
    assert_eq!(h.density().unwrap(), 1.0);
}

fn mirror(role: Role) -> Role {
    match role {
        Role::Left => Role::Right,
        Role::Right => Role::Left,
        Role::Top => Role::Top,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn reversal_preserves_densities(h in host()) {
        let n = h.n();
        let rev = h.reversed();
        prop_assert_eq!(rev.reversed(), h.clone());
        for t @ [i, j, k] in h.triad_list() {
            let rt = [n + 1 - k, n + 1 - j, n + 1 - i];
            prop_assert_eq!(h.edge_count(t), rev.edge_count(rt));
            prop_assert_eq!(h.triad_density(t).unwrap(), rev.triad_density(rt).unwrap());
        }
        prop_assert_eq!(h.density().unwrap(), rev.density().unwrap());
    }

    #[test]
    fn reversal_swaps_left_and_right_degrees(h in host()) {
        let n = h.n();
        let rev = h.reversed();
        for t @ [i, j, k] in h.triad_list() {
            let rt = [n + 1 - k, n + 1 - j, n + 1 - i];
            for role in Role::ALL {
                let part = role.part(t);
                let rpart = mirror(role).part(rt);
                prop_assert_eq!(rpart, (n + 1 - part.1, n + 1 - part.0));
                for id in 1..=h.size(part.0, part.1) {
                    let d = h.degree(t, DegreeKind::Vertex(role), &[PartVertex::new(part, id)]).unwrap();
                    let rd = rev.degree(rt, DegreeKind::Vertex(mirror(role)), &[PartVertex::new(rpart, id)]).unwrap();
                    prop_assert!((d - rd).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vertex_degrees_average_to_density(h in host()) {
        for t in h.triad_list() {
            let dens = h.triad_density(t).unwrap();
            for role in Role::ALL {
                let part = role.part(t);
                let size = h.size(part.0, part.1);
                let avg: f64 = (1..=size)
                    .map(|id| h.degree(t, DegreeKind::Vertex(role), &[PartVertex::new(part, id)]).unwrap())
                    .sum::<f64>() / size as f64;
                prop_assert!((avg - dens).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn induced_density_is_no_smaller(h in host(), mask in 0u32..64) {
        let idx: Vec<usize> = (1..=h.n()).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        prop_assume!(idx.len() >= 3);
        let sub = h.induced(&idx).unwrap();
        prop_assert!(sub.density().unwrap() >= h.density().unwrap());
    }

    #[test]
    fn embeddability_survives_reversal(seed in 0u64..10_000) {
        let c = common::embedding_case(seed);
        let a = c.host.find_embedding(&c.pattern, DEFAULT_EMBED_BUDGET).unwrap();
        let b = c.host.reversed().find_embedding(&c.pattern, DEFAULT_EMBED_BUDGET).unwrap();
        prop_assert_eq!(a.is_some(), b.is_some());
    }
}
