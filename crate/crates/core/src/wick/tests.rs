use std::collections::HashSet;

use proptest::prelude::*;

use super::*;

fn pp(n: usize, one_based: &[(usize, usize)]) -> PairPartition {
    let pairs: Vec<_> = one_based.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    PairPartition::new(n, &pairs).unwrap()
}

#[test]
fn counts_match_double_factorial() {
    for n in [0usize, 2, 4, 6, 8, 10] {
        let set = enumerate_pair_partitions(n).unwrap();
        assert_eq!(set.partitions.len() as u64, partition_count(n));
        let unique: HashSet<_> = set.partitions.iter().collect();
        assert_eq!(unique.len(), set.partitions.len());
    }
    assert_eq!(partition_count(8), 105);
    assert_eq!(partition_count(16), 2_027_025);
}

#[test]
fn small_enumerations_are_canonical() {
    let two = enumerate_pair_partitions(2).unwrap();
    assert_eq!(two.partitions, vec![pp(2, &[(1, 2)])]);
    let four: Vec<String> = enumerate_pair_partitions(4).unwrap().partitions.iter().map(|p| p.to_string()).collect();
    assert_eq!(four, vec!["(1,2) (3,4)", "(1,3) (2,4)", "(1,4) (2,3)"]);
    let empty = enumerate_pair_partitions(0).unwrap();
    assert_eq!(empty.partitions.len(), 1);
    assert!(empty.partitions[0].is_empty());
}

#[test]
fn odd_and_oversized_inputs() {
    let odd = enumerate_pair_partitions(5).unwrap();
    assert!(odd.odd && odd.partitions.is_empty());
    assert_eq!(enumerate_pair_partitions(18).unwrap_err(), WickError::TooManyPoints { n: 18, max: MAX_POINTS });
    assert!(PairPartition::new(4, &[(0, 1), (1, 2)]).is_err());
    assert!(PairPartition::new(4, &[(0, 1)]).is_err());
}

#[test]
fn classification_examples() {
    let l0220 = BlockLayout::new(0, 2, 2, 0);
    assert_eq!(classify(&pp(4, &[(1, 2), (3, 4)]), &l0220).unwrap(), ContractionType::II);
    assert_eq!(classify(&pp(4, &[(1, 3), (2, 4)]), &l0220).unwrap(), ContractionType::IV);
    let l2222 = BlockLayout::new(2, 2, 2, 2);
    let p = pp(8, &[(1, 3), (2, 8), (4, 5), (6, 7)]);
    assert_eq!(classify(&p, &l2222).unwrap(), ContractionType::I);
    assert!(matches!(classify(&p, &l0220), Err(WickError::LayoutMismatch { .. })));
}

#[test]
fn layout_parses_and_prints() {
    let l: BlockLayout = "1, 2,2,1".parse().unwrap();
    assert_eq!(l, BlockLayout::new(1, 2, 2, 1));
    assert_eq!(l.to_string(), "1,2,2,1");
    assert!("1,2,3".parse::<BlockLayout>().is_err());
}

#[test]
fn expansion_of_small_layouts() {
    let e = wick_expand(&BlockLayout::new(0, 0, 0, 0), &[]).unwrap();
    assert_eq!(e.terms.len(), 1);
    assert!(e.terms[0].descriptor.variables.is_empty());

    let e = wick_expand(&BlockLayout::new(0, 2, 0, 0), &[1, 1]).unwrap();
    assert_eq!(e.terms.len(), 1);
    assert!(e.terms[0].descriptor.is_phase_free());

    let e = wick_expand(&BlockLayout::new(0, 2, 2, 0), &[1, 1, -1, -1]).unwrap();
    assert_eq!(e.count(ContractionType::II), 1);
    assert_eq!(e.count(ContractionType::IV), 2);

    let e = wick_expand(&BlockLayout::new(1, 1, 1, 0), &[1, 1, -1]).unwrap();
    assert!(e.odd && e.terms.is_empty());

    assert!(wick_expand(&BlockLayout::new(0, 2, 2, 0), &[1, 1]).is_err());
}

#[test]
fn dump_is_line_oriented() {
    let e = wick_expand(&BlockLayout::new(0, 2, 2, 0), &[1, 1, -1, -1]).unwrap();
    assert_eq!(e.dump(), "0: (1,2) (3,4) -> II\n1: (1,3) (2,4) -> IV\n2: (1,4) (2,3) -> IV\n");
}

#[test]
fn hand_computed_phases() {
    // l | f | g | r with the (f,g) pair nested inside the (l,r) pair.
    let d = IntegrandDescriptor::from_partition(&pp(4, &[(1, 4), (2, 3)]), &[1, 1, -1, -1]).unwrap();
    assert_eq!(d.coefficient(1, 0), 2);
    assert_eq!(d.phase.len(), 1);

    let sig = [1, 1, 1, -1, -1, -1];
    // f₁g₁, f₂g₂ matched in order: the two inner pairs do not couple.
    let d = IntegrandDescriptor::from_partition(&pp(6, &[(1, 6), (2, 4), (3, 5)]), &sig).unwrap();
    assert_eq!(d.coefficient(1, 2), 0);
    // Crossed matching f₁g₂, f₂g₁ couples them.
    let d = IntegrandDescriptor::from_partition(&pp(6, &[(1, 6), (2, 5), (3, 4)]), &sig).unwrap();
    assert_eq!(d.coefficient(1, 2), -2);
    assert_eq!(d.coefficient(2, 1), 2);
}

#[test]
fn empty_flowed_blocks_are_type_two() {
    for (a, b) in [(2, 2), (1, 3), (4, 0), (0, 6)] {
        let e = wick_expand(&BlockLayout::new(a, 0, 0, b), &vec![1; a + b]).unwrap();
        assert!(e.terms.iter().all(|t| t.kind == ContractionType::II));
    }
}

#[test]
fn deformed_phase_examples() {
    assert_eq!(deformed_phase(&[0.3f64], &[1.2], 0.0), Complex::new(1.0, 0.0));
    let z = deformed_phase(&[0.7f64], &[0.7], 3.0);
    assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-15);
    let th = (2.0f64 + 5f64.sqrt()).ln();
    let z = deformed_phase(&[0.0], &[th], 0.5);
    assert!((z - Complex::new(1f64.cos(), 1f64.sin())).norm() < 1e-14);
}

#[test]
fn q_kappa_form_matches_rapidity_form() {
    let (k, a, b) = (0.8f64, -0.4f64, 1.1f64);
    let lhs = minkowski_dot(on_shell(a), q_kappa(k, on_shell(b)));
    assert!((lhs - k * (b - a).sinh()).abs() < 1e-14);
}

use num_complex::Complex;

/// Phase of one partition obtained by walking the product right to left
/// over an explicit particle list, one exponential per commutation.
fn walked_phase(p: &PairPartition, sig: &[i8], theta: &[f64], kappa: f64) -> Complex<f64> {
    let idx = p.pair_index();
    let mut present: Vec<usize> = Vec::new();
    let mut z = Complex::new(1.0, 0.0);
    for i in (0..p.points()).rev() {
        let k = idx[i];
        let (l, _) = p.pairs()[k];
        let s = sig[i] as f64 * kappa;
        if i == l {
            present.retain(|&q| q != k);
            let others: Vec<f64> = present.iter().map(|&q| theta[q]).collect();
            z *= deformed_phase(&others, &[theta[k]], s);
        } else {
            let others: Vec<f64> = present.iter().map(|&q| theta[q]).collect();
            z *= deformed_phase(&others, &[theta[k]], s).conj();
            present.push(k);
        }
    }
    z
}

fn descriptor_phase(d: &IntegrandDescriptor, theta: &[f64], kappa: f64) -> Complex<f64> {
    let e: f64 = d.phase.iter().map(|t| t.coefficient as f64 * (theta[t.a] - theta[t.b]).sinh()).sum();
    Complex::new(0.0, kappa * e).exp()
}

fn layout_strategy() -> impl Strategy<Value = BlockLayout> {
    (0usize..3, 0usize..3, 0usize..3, 0usize..3)
        .prop_filter("even", |(a, n, m, b)| (a + n + m + b) % 2 == 0 && a + n + m + b <= 8)
        .prop_map(|(a, n, m, b)| BlockLayout::new(a, n, m, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classification_is_total(layout in layout_strategy()) {
        let sig = vec![1i8; layout.total()];
        let e = wick_expand(&layout, &sig).unwrap();
        let total: usize = ContractionType::ALL.iter().map(|&k| e.count(k)).sum();
        prop_assert_eq!(total as u64, partition_count(layout.total()));
    }

    #[test]
    fn descriptor_matches_walked_phase(
        n in (1usize..5).prop_map(|k| 2 * k),
        seed in any::<u64>(),
        kappa in -2.0f64..2.0,
        theta in prop::collection::vec(-2.0f64..2.0, 4),
        sig_bits in any::<u16>(),
    ) {
        let set = enumerate_pair_partitions(n).unwrap();
        let p = &set.partitions[(seed % set.partitions.len() as u64) as usize];
        let sig: Vec<i8> = (0..n).map(|i| [1i8, -1, 0][((sig_bits >> (2 * i)) & 3) as usize % 3]).collect();
        let d = IntegrandDescriptor::from_partition(p, &sig).unwrap();
        let a = descriptor_phase(&d, &theta, kappa);
        let b = walked_phase(p, &sig, &theta, kappa);
        prop_assert!((a - b).norm() < 1e-12, "{} {:?}", p, sig);
    }

    #[test]
    fn swapping_sides_conjugates(
        kappa in -3.0f64..3.0,
        left in prop::collection::vec(-3.0f64..3.0, 0..4),
        right in prop::collection::vec(-3.0f64..3.0, 0..4),
    ) {
        let a = deformed_phase(&left, &right, kappa);
        let b = deformed_phase(&right, &left, kappa);
        prop_assert!((a - b.conj()).norm() < 1e-12);
        prop_assert!((a.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn no_cross_block_phase_in_two_and_four(
        layout in layout_strategy(),
        sig_outer in prop::sample::select(vec![-1i8, 1]),
    ) {
        let n = layout.total();
        let sig: Vec<i8> = (0..n).map(|i| match layout.block_of(i) {
            Block::F => 1,
            Block::G => -1,
            _ => sig_outer,
        }).collect();
        let e = wick_expand(&layout, &sig).unwrap();
        for t in &e.terms {
            if matches!(t.kind, ContractionType::II | ContractionType::IV) {
                prop_assert!(!t.has_cross_block_phase(), "{}", t.dump_line());
            }
        }
    }
}
