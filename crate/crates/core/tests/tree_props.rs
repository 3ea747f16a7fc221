use std::collections::BTreeSet;

use k3maps::{
    classify_shapes, intersect, DivisorClass, ExceptionalTree, ForestShape, PolarizedGenus,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_parents(rng: &mut impl Rng, p: usize) -> Vec<Option<usize>> {
    (1..=p)
        .map(|i| (i > 1 && rng.gen_bool(0.7)).then(|| rng.gen_range(1..i)))
        .collect()
}

fn genus() -> PolarizedGenus {
    PolarizedGenus::new(3).unwrap()
}

#[test]
fn canonical_class_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let p = rng.gen_range(1..=12);
        let t = ExceptionalTree::from_parents(&random_parents(&mut rng, p)).unwrap();
        let ctx = t.context(genus());
        let mut total = DivisorClass::zero(ctx);
        let mut weighted = DivisorClass::zero(ctx);
        let depths = t.depths();
        for id in 1..=p {
            total = total
                .checked_add(&t.total_transform(genus(), id).unwrap())
                .unwrap();
            let f = t.proper_transform(genus(), id).unwrap();
            weighted = weighted
                .checked_add(&f.checked_scale(depths[id - 1] as i64).unwrap())
                .unwrap();
        }
        assert_eq!(total, weighted);
        // Eᵢ = Σ over descendants of F̂ⱼ
        for id in 1..=p {
            let mut e = DivisorClass::zero(ctx);
            for d in t.total_transform_expansion(id).unwrap() {
                e = e
                    .checked_add(&t.proper_transform(genus(), d).unwrap())
                    .unwrap();
            }
            assert_eq!(e, t.total_transform(genus(), id).unwrap());
        }
    }
}

#[test]
fn proper_transform_intersections() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..1000 {
        let p = rng.gen_range(1..=8);
        let parents = random_parents(&mut rng, p);
        let t = ExceptionalTree::from_parents(&parents).unwrap();
        for i in 1..=p {
            let fi = t.proper_transform(genus(), i).unwrap();
            for j in 1..=p {
                let fj = t.proper_transform(genus(), j).unwrap();
                let expect = if i == j {
                    -1 - t.children(i).unwrap().len() as i64
                } else if parents[j - 1] == Some(i) || parents[i - 1] == Some(j) {
                    1
                } else {
                    0
                };
                assert_eq!(
                    intersect(&fi, &fj).unwrap(),
                    expect,
                    "{parents:?} ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn worked_example() {
    let t = ExceptionalTree::from_parents(&[None, None, Some(1), Some(2), Some(3), Some(3)])
        .unwrap()
        .with_gammas(&[0, 0, 0, 1, 1, 1])
        .unwrap();
    assert_eq!(t.depths(), vec![1, 1, 2, 2, 3, 3]);
    assert_eq!(t.tree_depth(), 3);
    assert_eq!(t.node_depth(3).unwrap(), 2);
    assert_eq!(t.total_transform_expansion(3).unwrap(), vec![3, 5, 6]);
    assert_eq!(t.beta_from_gamma().unwrap(), vec![2, 1, 2, 1, 1, 1]);
    assert!(t.is_minimal().unwrap());
    assert!(t.report(9).passes());
    assert!(!t.check_depth(4));
}

proptest! {
    #[test]
    fn beta_sums_descendant_gammas(seed in any::<u64>(), p in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parents = random_parents(&mut rng, p);
        let gammas: Vec<u64> = (0..p).map(|_| rng.gen_range(0..4)).collect();
        let t = ExceptionalTree::from_parents(&parents).unwrap().with_gammas(&gammas).unwrap();
        let betas = t.beta_from_gamma().unwrap();
        for id in 1..=p {
            let s: u64 = t.descendants(id).unwrap().iter().map(|&d| gammas[d - 1]).sum();
            prop_assert_eq!(betas[id - 1], s);
            let kids: u64 = t.children(id).unwrap().iter().map(|&c| betas[c - 1]).sum();
            prop_assert!(betas[id - 1] >= kids);
        }
        let minimal = t.leaves().all(|l| gammas[l - 1] >= 1);
        prop_assert_eq!(t.is_minimal().unwrap(), minimal);
    }

    #[test]
    fn shape_round_trip(seed in any::<u64>(), p in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = ExceptionalTree::from_parents(&random_parents(&mut rng, p)).unwrap();
        let s = t.shape();
        prop_assert_eq!(s.to_tree().shape(), s.clone());
        prop_assert_eq!(s.to_string().parse::<ForestShape>().unwrap(), s.clone());
        for deg in 1..12 {
            prop_assert_eq!(s.is_admissible(deg), t.report(deg).passes());
        }
    }
}

/// Every parent array on `p` nodes, i.e. every labelled forest in blow-up
/// order, reduced to isomorphism classes that pass the predicates.
fn brute_force_shapes(deg: u64, p_max: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for p in 1..=p_max {
        let mut parents = vec![None; p];
        loop {
            let t = ExceptionalTree::from_parents(&parents).unwrap();
            if t.check_depth(deg) && t.check_leaf_pairs(deg) && t.check_width(deg) {
                out.insert(t.shape().to_string());
            }
            // odometer over parent choices {None, 1, .., i-1} for node i
            let mut i = p - 1;
            loop {
                let next = match parents[i] {
                    None if i > 0 => Some(1),
                    Some(q) if q < i => Some(q + 1),
                    _ => None,
                };
                parents[i] = next;
                if next.is_some() {
                    break;
                }
                if i == 0 {
                    break;
                }
                i -= 1;
            }
            if parents.iter().all(Option::is_none) {
                break;
            }
        }
    }
    out
}

#[test]
fn classification_matches_brute_force() {
    for deg in 1..=9 {
        let fast: BTreeSet<String> = classify_shapes(deg, 7)
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(fast, brute_force_shapes(deg, 7), "deg={deg}");
    }
}

#[test]
fn degree_four_classification() {
    let shapes = classify_shapes(4, 25);
    let mut expect: Vec<ForestShape> = (1..=24).map(ForestShape::points).collect();
    expect.push(ForestShape::chain(2));
    let got: BTreeSet<_> = shapes.iter().map(|s| s.to_string()).collect();
    let want: BTreeSet<_> = expect.iter().map(|s| s.to_string()).collect();
    assert_eq!(got, want);
    assert_eq!(shapes.len(), 25);
}
