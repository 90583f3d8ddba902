use geoknap::corridor::synth::{fill_arms, random_path_corridor, staircase_ring};
use geoknap::corridor::{split_into_lu, Corridor, SplitMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BOUNDS: [(usize, u64, u64); 7] = [
    (4, 1, 4),
    (6, 1, 3),
    (8, 3, 8),
    (10, 1, 3),
    (12, 1, 3),
    (14, 5, 14),
    (16, 3, 8),
];

#[test]
fn uniform_rings_lose_at_most_the_case_bound() {
    for (s, num, den) in BOUNDS {
        let (outer, inner) = staircase_ring(s, 8, 248, 40, 2);
        let c = Corridor::from_cycle(&outer, &inner, 256).unwrap();
        let items = fill_arms(&c, 2, 33, 0);
        for mode in [SplitMode::Derandomized, SplitMode::EnumerateOffsets] {
            let out = split_into_lu(&c, &items, mode).unwrap();
            let lost = out.deleted.len() as u64;
            assert!(
                lost * den <= num * items.len() as u64,
                "s = {s}: lost {lost} of {}",
                items.len()
            );
            assert_eq!(out.retained.len() + out.deleted.len(), items.len());
            assert!(
                out.shapes.iter().all(|sh| sh.is_box_l_or_u()),
                "s = {s}: {:?}",
                out.shapes
            );
            for r in &out.retained {
                assert!(
                    out.corridors
                        .iter()
                        .any(|k| k.cells().contains_rect(&r.rect)),
                    "s = {s}: item {} lost its corridor",
                    r.id
                );
            }
        }
    }
}

#[test]
fn short_paths_are_kept_whole() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let c = random_path_corridor(&mut rng, 64, 3);
        let items = fill_arms(&c, 3, 4, 0);
        let out = split_into_lu(&c, &items, SplitMode::Derandomized).unwrap();
        assert!(out.shapes.iter().all(|sh| sh.is_box_l_or_u()));
        // a Z loses its cheapest residue class, at most a third
        assert!(3 * out.deleted.len() <= items.len());
    }
}
