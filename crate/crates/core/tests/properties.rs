use darboux_core::curvature::{christoffel_at, christoffel_fd, curvature_at};
use darboux_core::geodesic::{geodesic_integrate, GeodesicState, StepControl};
use darboux_core::potential::{metric_at, PolyPotential};
use darboux_core::special::dilog;
use darboux_core::submanifold::{
    catalog, curvature_defect, total_geodesy_residual, HoloCurvePair, HoloPoly,
};
use darboux_core::{
    ComplexVector, DarbouxMap, KahlerPotential, ModelDescriptor, PotentialModel, RadialCoordinates,
    SolitonProfile,
};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn models() -> Vec<PotentialModel> {
    vec![
        PotentialModel::cigar(1).unwrap(),
        PotentialModel::cigar(2).unwrap(),
        PotentialModel::cigar(3).unwrap(),
        PotentialModel::soliton(1).unwrap(),
        PotentialModel::soliton(2).unwrap(),
        PotentialModel::soliton(3).unwrap(),
        PotentialModel::Poly(PolyPotential::coupled_test()),
    ]
}

fn point(model: &PotentialModel, raw: &[(f64, f64)]) -> ComplexVector {
    ComplexVector::new(raw.iter().take(model.dim()).map(|&(a, b)| C::new(a, b)).collect()).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3)
}

fn value_at(model: &PotentialModel, xy: &[f64]) -> f64 {
    let t: Vec<f64> = xy.chunks(2).map(|c| c[0] * c[0] + c[1] * c[1]).collect();
    model.value(&RadialCoordinates::new(t).unwrap()).unwrap()
}

/// `d/dz_j d/dzbar_k` of the potential by nested central differences in the real coordinates.
fn wirtinger_hessian(model: &PotentialModel, z: &ComplexVector, j: usize, k: usize) -> C {
    let x0 = z.to_real();
    let h = 1e-3;
    let d2 = |a: usize, b: usize| {
        let f = |da: f64, db: f64| {
            let mut x = x0.clone();
            x[a] += da;
            x[b] += db;
            value_at(model, &x)
        };
        (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)
    };
    let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
    // (dx_j - i dy_j)(dx_k + i dy_k) / 4
    C::new(d2(xj, xk) + d2(yj, yk), d2(xj, yk) - d2(yj, xk)) * 0.25
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jet_first_derivatives_match_value_differences(raw in coords(), which in 0usize..7) {
        let m = &models()[which];
        let t: Vec<f64> = raw.iter().take(m.dim()).map(|(a, b)| a * a + b * b).collect();
        let jet = m.jet(&RadialCoordinates::new(t.clone()).unwrap(), 1).unwrap();
        for j in 0..m.dim() {
            let h = 1e-3 * (1.0 + t[j]);
            let f = |d: f64| {
                let mut s = t.clone();
                s[j] += d;
                m.value(&RadialCoordinates::new(s).unwrap()).unwrap()
            };
            let fd = (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
            prop_assert!((fd - jet.d1(j)).abs() <= 1e-7 * (1.0 + jet.d1(j).abs()), "{} vs {}", fd, jet.d1(j));
        }
    }

    #[test]
    fn metric_is_complex_hessian_of_potential(raw in prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 3), which in 0usize..7) {
        let m = &models()[which];
        let z = point(m, &raw);
        let g = metric_at(m, &z).unwrap();
        for j in 0..m.dim() {
            for k in 0..m.dim() {
                let fd = wirtinger_hessian(m, &z, j, k);
                prop_assert!((fd - g.entry(j, k)).norm() < 1e-5, "({j},{k}): {fd} vs {}", g.entry(j, k));
            }
        }
    }

    #[test]
    fn metric_hermitian_positive(raw in coords(), which in 0usize..7) {
        let m = &models()[which];
        let g = metric_at(m, &point(m, &raw)).unwrap();
        prop_assert!(g.hermitian_defect() < 1e-14);
        prop_assert!(g.min_eigenvalue() > 0.0);
    }

    #[test]
    fn map_commutes_with_coordinate_phases(raw in coords(), th in prop::collection::vec(-3.2f64..3.2, 3), which in 0usize..7) {
        let m = &models()[which];
        let map = DarbouxMap::new(m.clone());
        let z = point(m, &raw);
        let rot: Vec<C> = th.iter().take(m.dim()).map(|&a| C::from_polar(1.0, a)).collect();
        let zr = ComplexVector::new(z.as_slice().iter().zip(&rot).map(|(a, b)| a * b).collect()).unwrap();
        let w = map.map_point(&z).unwrap();
        let wr = map.map_point(&zr).unwrap();
        for j in 0..m.dim() {
            prop_assert!((wr[j] - rot[j] * w[j]).norm() <= 1e-13 * (1.0 + w[j].norm()));
        }
    }

    #[test]
    fn pullback_holds_on_larger_discs(raw in prop::collection::vec((-8.0f64..8.0, -8.0f64..8.0), 3), which in 0usize..7) {
        let m = &models()[which];
        let z = point(m, &raw);
        let r = DarbouxMap::new(m.clone()).pullback_residual(&z).unwrap();
        prop_assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn curvature_has_kahler_symmetries(raw in coords(), which in 0usize..7) {
        let m = &models()[which];
        let z = point(m, &raw);
        let r = curvature_at(m, &z).unwrap();
        prop_assert!(r.symmetry_defect() < 1e-10 * (1.0 + r.max_abs()));
        let g = christoffel_at(m, &z).unwrap();
        prop_assert!(g.symmetry_defect() < 1e-12);
    }

    #[test]
    fn christoffel_fd_agrees(raw in coords(), which in 0usize..7) {
        let m = &models()[which];
        let z = point(m, &raw);
        let a = christoffel_at(m, &z).unwrap();
        let f = christoffel_fd(m, &z).unwrap();
        prop_assert!(a.max_abs_diff(&f) < 1e-6);
    }

    #[test]
    fn defect_is_never_positive(
        c1 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..4),
        c2 in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..4),
        z in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let p = |c: &[(f64, f64)]| HoloPoly::from_tail(&c.iter().map(|&(a, b)| C::new(a, b)).collect::<Vec<_>>());
        let pair = HoloCurvePair::new(p(&c1), p(&c2));
        if let Ok(d) = curvature_defect(&pair, C::new(z.0, z.1)) {
            prop_assert!(d.via_a <= 0.0);
            prop_assert!(d.direct <= 1e-12 * (1.0 + d.direct.abs()), "{}", d.direct);
            prop_assert!((d.direct - d.via_a).abs() <= 1e-8 * d.direct.abs().max(1.0));
        }
    }

    #[test]
    fn soliton_profile_is_increasing_and_convex(t in -30.0f64..60.0, n in 1usize..4) {
        let p = SolitonProfile::new(n).unwrap();
        let d = p.derivs(t).unwrap();
        prop_assert!(d[0] > 0.0 && d[1] > 0.0);
        let d2 = p.derivs(t + 0.5).unwrap();
        prop_assert!(d2[0] > d[0]);
    }

    #[test]
    fn dilog_reflection(x in 0.001f64..0.999) {
        let lhs = dilog(x) + dilog(1.0 - x);
        let rhs = std::f64::consts::PI.powi(2) / 6.0 - x.ln() * (1.0 - x).ln();
        prop_assert!((lhs - rhs).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn geodesic_energy_is_conserved(raw in coords(), v in coords(), which in 0usize..7) {
        let m = &models()[which];
        let z = point(m, &raw).into_inner();
        let vel = point(m, &v).into_inner();
        prop_assume!(vel.iter().any(|c| c.norm() > 1e-3));
        let tr = geodesic_integrate(m, &GeodesicState::new(z, vel).unwrap(), 5.0, &StepControl::default()).unwrap();
        prop_assert!(tr.max_drift < 1e-7, "{}", tr.max_drift);
    }

    #[test]
    fn geodesy_residual_ignores_catalog_phases(pick in 0usize..14, j in 0usize..3, th in -3.0f64..3.0, seed in 0u64..1000) {
        let m = PotentialModel::cigar(3).unwrap();
        let s = catalog(3, seed)[pick].clone();
        let rotated = s.rotate_phase(j, C::from_polar(1.0, th)).unwrap();
        let p0: Vec<C> = (0..s.k()).map(|a| C::new(0.4 - 0.2 * a as f64, 0.3)).collect();
        let dir: Vec<C> = (0..s.k()).map(|a| C::new(1.0, a as f64)).collect();
        let ctrl = StepControl::default();
        let r0 = total_geodesy_residual(&m, &s, &p0, &dir, 10.0, &ctrl).unwrap();
        let r1 = total_geodesy_residual(&m, &rotated, &p0, &dir, 10.0, &ctrl).unwrap();
        prop_assert!(r0 <= 1e-7 && r1 <= 1e-7);
        prop_assert!((r0 - r1).abs() <= 1e-9);
    }
}

#[test]
fn descriptors_round_trip() {
    for m in models() {
        let d = m.descriptor();
        let text = serde_json::to_string(&d).unwrap();
        let back: ModelDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        let rebuilt = back.build().unwrap();
        let t = RadialCoordinates::new(vec![0.7; m.dim()]).unwrap();
        assert_eq!(rebuilt.value(&t).unwrap(), m.value(&t).unwrap());
    }
}
