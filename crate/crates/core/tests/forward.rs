use std::f64::consts::PI;

use dirac_nodal::fixtures::{p0, p1};
use dirac_nodal::forward::{eigenvalues, eigenvalues_with, nodes_with, Propagator};
use dirac_nodal::model::Problem;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn free_spectrum_and_nodes(theta in 0.05f64..3.09, n in 1i64..30) {
        let p = Problem::zero(theta, 1000).unwrap();
        let prop = Propagator::new(&p).unwrap();
        let lambda = eigenvalues_with(&prop, n, n, 1e-12).unwrap().lambda(n).unwrap();
        prop_assert!((lambda - (n as f64 + 0.5 + theta / PI)).abs() < 1e-9);
        let l = nodes_with(&prop, lambda, n, 1e-12).unwrap();
        let xs = l.labelled_nodes();
        prop_assert_eq!(xs.len() as i64, n);
        for (j, &x) in xs.iter().enumerate() {
            prop_assert!((x - ((j as f64 + 0.5) * PI + theta) / lambda).abs() < 1e-9);
        }
    }
}

#[test]
fn eigenvalues_are_spaced_by_one() {
    for p in [p0::<f64>(4000), p1::<f64>(4000)] {
        let s = eigenvalues(&p, 20, 40, 1e-10).unwrap();
        assert!(s.is_complete());
        for w in s.entries.windows(2) {
            assert!((w[1].lambda - w[0].lambda - 1.0).abs() < 0.05, "{} → {}", w[0].lambda, w[1].lambda);
        }
    }
}
