use num_bigint::BigInt;
use proptest::prelude::*;

use ifsdyn::kneading::{entropy, EntropyOptions};
use ifsdyn::picture::{warp_image, Raster};
use ifsdyn::symbolic::oracle::brute_force_counts;
use ifsdyn::symbolic::{count_words, critical_itineraries, is_admissible, itinerary, step, Admissibility};
use ifsdyn::transform::{coding_point, fractal_transform};
use ifsdyn::{MaskedSystem, MonotoneMap, OverlappingIfs, Rational, Variant};

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `f0 = a0 x`, `f1 = a1 x + 1 - a1` with both ratios in `(1/2, 1)` and `q` inside the overlap.
fn affine_system() -> impl Strategy<Value = MaskedSystem> {
    (51i64..96, 51i64..96, 1i64..97, any::<bool>()).prop_map(|(a0, a1, t, plus)| {
        let (a0, a1) = (frac(a0, 100), frac(a1, 100));
        let lo = Rational::from_integer(1.into()) - &a1;
        let q = &lo + (&a0 - &lo) * frac(t, 97);
        let one = Rational::from_integer(1.into());
        let ifs = OverlappingIfs::new(
            MonotoneMap::affine(a0, Rational::from_integer(0.into())),
            MonotoneMap::affine(a1.clone(), one - a1),
        )
        .unwrap();
        let variant = if plus { Variant::Plus } else { Variant::Minus };
        MaskedSystem::new(ifs, q, variant).unwrap()
    })
}

/// Smallest depth whose enclosures are narrower than half a pixel on `len` pixels.
fn depth_below_half_pixel(sys: &MaskedSystem, len: usize) -> usize {
    let c = sys.ifs.max_contraction().unwrap();
    let mut width = Rational::from_integer(1.into());
    let limit = frac(1, 2 * len as i64);
    let mut depth = 0;
    while width >= limit {
        width *= &c;
        depth += 1;
    }
    depth
}

fn unit_point() -> impl Strategy<Value = Rational> {
    (0i64..=1000).prop_map(|k| frac(k, 1000))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn itinerary_commutes_with_the_shift(sys in affine_system(), x in unit_point()) {
        let (s, y) = step(&sys, &x).unwrap();
        let w = itinerary(&sys, &x, 40).unwrap();
        let v = itinerary(&sys, &y, 39).unwrap();
        prop_assert_eq!(w.prefix.symbols()[0], s);
        prop_assert_eq!(&w.prefix.symbols()[1..], v.prefix.symbols());
    }

    #[test]
    fn real_orbits_are_admissible(sys in affine_system(), x in unit_point()) {
        let crit = critical_itineraries(&sys.ifs, &sys.q, 128).unwrap();
        let w = itinerary(&sys, &x, 48).unwrap();
        prop_assert_eq!(is_admissible(&w, &crit, sys.variant.into()).unwrap(), Admissibility::Yes);
    }

    #[test]
    fn addresses_code_their_point(sys in affine_system(), x in unit_point()) {
        let w = itinerary(&sys, &x, 32).unwrap();
        prop_assert!(coding_point(&sys.ifs, w.prefix.symbols()).contains(&x));
        prop_assert!(fractal_transform(&sys, &sys, &x, 32).unwrap().contains(&x));
    }

    #[test]
    fn memoized_counts_match_brute_force(sys in affine_system()) {
        let crit = critical_itineraries(&sys.ifs, &sys.q, 64).unwrap();
        prop_assert_eq!(count_words(&crit, 10).unwrap(), brute_force_counts(&crit, 10).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn uniform_entropy_is_minus_log_ratio(a in 51i64..96, t in 1i64..97) {
        let a = frac(a, 100);
        let lo = Rational::from_integer(1.into()) - &a;
        let q = &lo + (&a - &lo) * frac(t, 97);
        let res = entropy(&OverlappingIfs::uniform(a.clone()), &q, &EntropyOptions::default()).unwrap();
        prop_assert!(res.root.certified);
        let (rlo, rhi) = (res.root.lo.to_rational(), res.root.hi.to_rational());
        prop_assert!(rlo <= a && a <= rhi, "{} not in [{}, {}]", a, rlo, rhi);
    }

    #[test]
    fn equal_systems_warp_to_the_same_image(sys in affine_system(), w in 2usize..24, h in 2usize..24) {
        let img = Raster::gradient(w, h);
        let depth = depth_below_half_pixel(&sys, w.max(h));
        prop_assert_eq!(warp_image(&img, (&sys, &sys), Some((&sys, &sys)), depth).unwrap(), img);
    }
}
