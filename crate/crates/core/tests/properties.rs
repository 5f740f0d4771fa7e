use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;

use sci_core::dynamics::{check_measure_preservation, silver_tree, SingleToggle, Translation, TreeMap};
use sci_core::koopman::{assemble_section, cycle_decomposition, LowerNormEvaluator, LowerNormMethod};
use sci_core::spectral_sets::{directed_distance, hausdorff_distance, hausdorff_distance_naive};
use sci_core::tower::{gamma_set, residual_field, SpectralGrid};
use sci_core::xi::{threshold_random, xi_exact, CellTable, Pairing, TupleCodec};
use sci_core::{CantorPoint, Dyadic, Norm, SpectralSet, SymbolicMap, TreeVersion, Word};

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 0..=max).prop_map(Word::new)
}

fn point() -> impl Strategy<Value = CantorPoint> {
    (word(6), prop::collection::vec(any::<bool>(), 1..=4))
        .prop_map(|(pre, per)| CantorPoint::new(pre, Word::new(per)).unwrap())
}

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex64::new(a, b))
}

fn set() -> impl Strategy<Value = SpectralSet> {
    prop::collection::vec(complex(2.0), 1..12).prop_map(|v| SpectralSet::new(v, 0.0).unwrap())
}

fn pairing() -> impl Strategy<Value = Pairing> {
    prop_oneof![Just(Pairing::Cantor), Just(Pairing::Szudzik)]
}

fn silver() -> impl Strategy<Value = (BTreeSet<usize>, Word, usize)> {
    (1usize..=5).prop_flat_map(|m| {
        (prop::collection::btree_set(0..m, 0..=m), prop::collection::vec(any::<bool>(), m), Just(m))
            .prop_map(|(a, x, m)| (a, Word::new(x), m))
    })
}

fn version() -> impl Strategy<Value = TreeVersion> {
    prop_oneof![Just(TreeVersion::Dump), Just(TreeVersion::Odometer)]
}

/// A handful of gadgets indexed by a small integer.
fn gadget(i: u8) -> Box<dyn SymbolicMap> {
    match i % 5 {
        0 => Box::new(Translation { r: 0 }),
        1 => Box::new(Translation { r: 2 }),
        2 => Box::new(SingleToggle::new(1, 1).unwrap()),
        3 => Box::new(SingleToggle::new(2, 0).unwrap()),
        _ => Box::new(sci_core::dynamics::Constant { point: CantorPoint::all_ones() }),
    }
}

proptest! {
    #[test]
    fn word_rank_round_trip(w in word(20)) {
        prop_assert_eq!(Word::from_index(w.index(), w.len()), w.clone());
        prop_assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
    }

    #[test]
    fn point_text_round_trip(x in point()) {
        prop_assert_eq!(x.to_string().parse::<CantorPoint>().unwrap(), x);
    }

    #[test]
    fn cantor_distance_is_an_ultrametric(x in point(), y in point(), z in point()) {
        prop_assert_eq!(x.distance(&y), y.distance(&x));
        prop_assert_eq!(x.distance(&y).is_zero(), x == y);
        prop_assert!(x.distance(&z) <= x.distance(&y).max(y.distance(&z)));
    }

    #[test]
    fn two_adic_addition_matches_integers(x in point(), t in 0u64..1 << 20, m in 1usize..=24) {
        let mask = (1u64 << m) - 1;
        let lhs = x.add_2adic(t).truncate_2adic(m);
        prop_assert_eq!(lhs, (x.truncate_2adic(m) + t) & mask);
    }

    #[test]
    fn dyadic_arithmetic_is_exact(a in -1_000_000i128..1_000_000, ea in -30i32..30, b in -1_000_000i128..1_000_000, eb in -30i32..30) {
        let x = Dyadic::new(a, ea);
        let y = Dyadic::new(b, eb);
        prop_assert_eq!((x + y) - y, x);
        prop_assert_eq!(x - x, Dyadic::ZERO);
        prop_assert!(((x + y).to_f64() - (x.to_f64() + y.to_f64())).abs() <= 1e-9 * (1.0 + x.to_f64().abs() + y.to_f64().abs()));
    }

    #[test]
    fn hausdorff_metric_axioms(a in set(), b in set(), c in set()) {
        let dab = hausdorff_distance(&a, &b);
        prop_assert_eq!(hausdorff_distance(&a, &a), 0.0);
        prop_assert!((dab - hausdorff_distance(&b, &a)).abs() < 1e-15);
        prop_assert!(dab <= hausdorff_distance(&a, &c) + hausdorff_distance(&c, &b) + 1e-12);
        prop_assert!((dab - hausdorff_distance_naive(&a, &b)).abs() < 1e-12);
        prop_assert!(directed_distance(&a, &b) <= dab);
    }

    #[test]
    fn pairing_round_trip(p in pairing(), a in 0u64..1 << 20, b in 0u64..1 << 20) {
        prop_assert_eq!(p.unpair(p.pair(a, b).unwrap()), (a, b));
    }

    #[test]
    fn tuple_codec_is_injective(
        p in pairing(), q in pairing(),
        s in prop::collection::vec(1u64..40, 1..=3),
        t in prop::collection::vec(1u64..40, 1..=3),
    ) {
        let codec = TupleCodec { pairing: p, iota: q };
        let (i, j) = codec.encode_tuple(&s).unwrap();
        prop_assert_eq!(codec.decode_entry(i, j, s.len()).unwrap(), s.clone());
        if s.len() == t.len() && s != t {
            prop_assert_ne!(codec.encode_tuple(&t).unwrap(), (i, j));
        }
    }

    #[test]
    fn tree_maps_preserve_measure((a, x, m) in silver(), v in version(), depth in 1usize..=8) {
        let f = TreeMap::new(silver_tree(&a, &x, m).unwrap(), v).unwrap();
        prop_assert!(check_measure_preservation(&f, depth, 16).unwrap().preserving);
    }

    #[test]
    fn cycle_lengths_partition_the_cylinders((a, x, m) in silver(), v in version(), d in 1usize..=10) {
        let f = TreeMap::new(silver_tree(&a, &x, m).unwrap(), v).unwrap();
        let sec = assemble_section(&f, d, d.max(f.info_depth(d))).unwrap();
        // Blocks that straddle depth d need not induce a map on depth-d cylinders.
        if d >= 2 * m {
            prop_assert!(sec.is_permutation());
        }
        prop_assume!(sec.is_permutation());
        let total: usize = cycle_decomposition(&sec).unwrap().lengths().iter().sum();
        prop_assert_eq!(total, 1 << d);
    }

    #[test]
    fn lower_norm_is_one_lipschitz_in_z(g in 0u8..5, d in 1usize..=4, z in complex(2.0), w in complex(2.0)) {
        let f = gadget(g);
        let sec = assemble_section(f.as_ref(), d, d.max(f.info_depth(d))).unwrap();
        let ev = LowerNormEvaluator::new(&sec, Norm::L2, LowerNormMethod::Svd).unwrap();
        let gap = (ev.eval(z).value - ev.eval(w).value).abs();
        prop_assert!(gap <= (z - w).norm() + 1e-9);
    }

    #[test]
    fn gamma_grows_with_epsilon(g in 0u8..5, d in 1usize..=3, n2 in 2usize..=8, e1 in 0.01f64..1.5, de in 0.0f64..1.0) {
        let f = gadget(g);
        let sec = assemble_section(f.as_ref(), d, d.max(f.info_depth(d))).unwrap();
        let grid = SpectralGrid::truncated(n2, Some(2.5)).unwrap();
        let field = residual_field(&sec, Norm::L2, LowerNormMethod::Auto, &grid).unwrap();
        let small = gamma_set(&field, e1, n2).unwrap();
        let large = gamma_set(&field, e1 + de, n2).unwrap();
        if !small.placeholder {
            prop_assert!(!large.placeholder);
            prop_assert_eq!(directed_distance(&small.set, &large.set), 0.0);
        }
    }

    #[test]
    fn xi_cells_saturate_past_the_clamp(m in 1usize..=3, clamp in 0u64..=4, seed in any::<u64>()) {
        let o = threshold_random(m, clamp, seed, TupleCodec::default()).unwrap();
        let exact = xi_exact(&o, m).unwrap();
        let top = clamp as usize + 3;
        let cells = CellTable::tabulate(&o, &vec![top; m]).unwrap();
        let sat = clamp as usize + 1;
        prop_assert_eq!(cells.get(&vec![sat; m]), exact);
        prop_assert_eq!(cells.get(&vec![top; m]), exact);
    }
}
