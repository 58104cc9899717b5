//! Built-in example corpus: the small Galois groups, a battery of low-rank
//! lattices over each, and the standard groups of multiplicative type that
//! every acceptance suite and the `corpus` subcommand run end to end.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::galois::{
    coset_permutations, kernel_map, permutation_lattice, FiniteGroup, GammaLattice, GammaMap,
    GammaModule,
};
use crate::lattice::IntMatrix;
use crate::multtype::{
    mu_n, norm_one_torus, quotient_of_lattice, split_torus, weil_restriction_gm, MultTypeGroup,
};

pub fn trivial_group() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::trivial())
}

pub fn cyclic_group(n: usize) -> Arc<FiniteGroup> {
    assert!(n >= 1);
    if n == 1 {
        return trivial_group();
    }
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    Arc::new(FiniteGroup::from_permutations(&[cycle]).expect("cyclic group is valid"))
}

pub fn klein_four_group() -> Arc<FiniteGroup> {
    let a = vec![1, 0, 3, 2];
    let b = vec![2, 3, 0, 1];
    Arc::new(FiniteGroup::from_permutations(&[a, b]).expect("Klein four group is valid"))
}

pub fn symmetric3_group() -> Arc<FiniteGroup> {
    let transposition = vec![1, 0, 2];
    let cycle = vec![1, 2, 0];
    Arc::new(
        FiniteGroup::from_permutations(&[transposition, cycle]).expect("S3 is valid"),
    )
}

/// The groups the cohomology acceptance suite quantifies over.
pub fn cohomology_groups() -> Vec<(String, Arc<FiniteGroup>)> {
    vec![
        ("C2".into(), cyclic_group(2)),
        ("C3".into(), cyclic_group(3)),
        ("C4".into(), cyclic_group(4)),
        ("C6".into(), cyclic_group(6)),
        ("C8".into(), cyclic_group(8)),
        ("V4".into(), klein_four_group()),
        ("S3".into(), symmetric3_group()),
    ]
}

/// Deterministic battery of lattices of rank at most 4 over a group:
/// the trivial rank-1 lattice, coset permutation lattices for subgroups of
/// index at most 4, augmentation kernels of coset lattices of index at most
/// 5, and the sign lattice of every index-2 subgroup.
pub fn cohomology_lattices(group: &Arc<FiniteGroup>) -> Vec<(String, GammaLattice)> {
    let mut out = vec![(
        "trivial_rank1".to_string(),
        GammaLattice::trivial(group.clone(), 1),
    )];
    for (k, sub) in group.subgroups().into_iter().enumerate() {
        let index = group.order() / sub.len();
        if (2..=4).contains(&index) {
            let perms = coset_permutations(group, &sub).expect("enumerated subgroups are valid");
            let lat = permutation_lattice(group, &perms).expect("coset actions are actions");
            out.push((format!("cosets_sub{k}"), lat));
        }
        if (2..=5).contains(&index) {
            out.push((format!("augker_sub{k}"), augmentation_kernel(group, &sub)));
        }
        if index == 2 {
            out.push((format!("sign_sub{k}"), sign_lattice(group, &sub)));
        }
    }
    out
}

/// Kernel of the coordinate-sum map out of the coset permutation module.
pub fn augmentation_kernel(group: &Arc<FiniteGroup>, subgroup: &[usize]) -> GammaLattice {
    let perms = coset_permutations(group, subgroup).expect("subgroup checked by caller");
    let lat = permutation_lattice(group, &perms).expect("coset actions are actions");
    let rank = lat.rank();
    let ones = IntMatrix::new(1, rank, vec![BigInt::from(1); rank]).expect("shape");
    let source = GammaModule::from_lattice(lat);
    let target = GammaModule::from_lattice(GammaLattice::trivial(group.clone(), 1));
    let aug = GammaMap::new(source, target, ones).expect("sum map is equivariant");
    let (kernel, _) = kernel_map(&aug);
    kernel.ambient().clone()
}

/// Rank-1 lattice where elements of the subgroup act trivially and the rest
/// act by -1; only valid for index-2 subgroups.
pub fn sign_lattice(group: &Arc<FiniteGroup>, subgroup: &[usize]) -> GammaLattice {
    let inside = |g: usize| subgroup.contains(&g);
    let action = (0..group.order())
        .map(|g| {
            if inside(g) {
                IntMatrix::identity(1)
            } else {
                IntMatrix::from_i64(&[&[-1]])
            }
        })
        .collect();
    GammaLattice::new(group.clone(), action).expect("index-2 subgroups give sign characters")
}

/// Z/3 with the order-2 group acting by inversion.
pub fn mu3_with_inversion() -> MultTypeGroup {
    let c2 = cyclic_group(2);
    let sign = IntMatrix::from_i64(&[&[-1]]);
    let lat = GammaLattice::from_generator_actions(c2, &[sign])
        .expect("inversion is an involution");
    quotient_of_lattice(lat, IntMatrix::from_i64(&[&[3]]), Some("mu_3_inversion".into()))
        .expect("inversion preserves 3Z")
}

fn named(mut g: MultTypeGroup, name: &str) -> MultTypeGroup {
    g.name = Some(name.to_string());
    g
}

/// The shipped groups of multiplicative type, in report order.
pub fn mult_type_corpus() -> Vec<MultTypeGroup> {
    let trivial = trivial_group();
    let c2 = cyclic_group(2);
    let c3 = cyclic_group(3);
    let s3 = symmetric3_group();
    let s3_order2 = s3
        .subgroups()
        .into_iter()
        .find(|s| s.len() == 2)
        .expect("S3 has an order-2 subgroup");

    vec![
        named(mu_n(&trivial, 2).unwrap(), "mu_2"),
        named(mu_n(&trivial, 3).unwrap(), "mu_3"),
        named(mu_n(&trivial, 6).unwrap(), "mu_6"),
        named(mu_n(&trivial, 12).unwrap(), "mu_12"),
        named(split_torus(&trivial, 1), "gm"),
        named(split_torus(&trivial, 3), "split_torus_3"),
        named(
            norm_one_torus(&c2, &[c2.identity()]).unwrap(),
            "norm_one_quadratic",
        ),
        named(
            norm_one_torus(&c3, &[c3.identity()]).unwrap(),
            "norm_one_cubic",
        ),
        named(
            weil_restriction_gm(&c2, &[c2.identity()]).unwrap(),
            "weil_restriction_quadratic",
        ),
        named(
            weil_restriction_gm(&s3, &s3_order2).unwrap(),
            "weil_restriction_s3",
        ),
        named(mu3_with_inversion(), "mu_3_inversion"),
    ]
}
