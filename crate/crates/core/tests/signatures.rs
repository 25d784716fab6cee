use num_complex::Complex64;
use pcoct::signatures::{
    axial_resolution, dispersion_experiment, first_order_shift, DispersionSetup, MirrorSetup, OrderStatus,
};
use pcoct::*;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mirror(t0: f64, points: usize) -> MirrorSetup {
    MirrorSetup {
        spectrum: Spectrum::gaussian(1.0, 1.0).unwrap(),
        reflectivity: Complex64::new(0.08, 0.06),
        mirror_delay: t0,
        dispersion: Vec::new(),
        carrier: 25.0,
        conjugator: Some(AmpResponse::conjugator(c(4.0), f64::INFINITY).unwrap()),
        amplifier: Some(AmpResponse::phase_insensitive(c(4.0), f64::INFINITY).unwrap()),
        detection: DetectionChain::new(1.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        grid: FreqGrid::with_omega_max(points, 12.0).unwrap(),
    }
}

#[test]
fn refining_the_grid_does_not_move_the_traces() {
    let coarse = mirror(1.5, 1 << 11);
    let fine = MirrorSetup {
        grid: coarse.grid.refined(),
        ..coarse.clone()
    };
    let delays: Vec<f64> = (0..31).map(|i| -1.0 + 0.2 * i as f64).collect();
    for modality in Modality::ALL {
        let a = coarse.oct_setup().unwrap().signature(modality, &delays).unwrap();
        let b = fine.oct_setup().unwrap().signature(modality, &delays).unwrap();
        let peak = b.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-10 * peak, "{modality}");
        }
    }
}

#[test]
fn c_oct_broadens_under_group_velocity_dispersion() {
    let b = 3.0;
    let setup = DispersionSetup {
        mirror: mirror(0.0, 1 << 13),
        delays: (0..41).map(|i| -4.0 + 0.2 * i as f64).collect(),
        tolerance: 1e-6,
        width: Some((0.0, Sweep::centered(0.0, 20.0, 201))),
    };
    let c_oct = &dispersion_experiment(Modality::COct, &setup, &[vec![0.0, b]]).unwrap()[0];
    assert_eq!(c_oct.orders[0].status, OrderStatus::Active);
    assert!((c_oct.width_ratio.unwrap() - (1.0f64 + b * b).sqrt()).abs() < 1e-6);
    let pc = &dispersion_experiment(Modality::PcOct, &setup, &[vec![0.0, b]]).unwrap()[0];
    assert_eq!(pc.orders[0].status, OrderStatus::Cancelled);
    assert!((pc.width_ratio.unwrap() - 1.0).abs() < 1e-9);
    let two_pass = &dispersion_experiment(Modality::TwoPassCOct, &setup, &[vec![0.0, b]]).unwrap()[0];
    assert_eq!(two_pass.orders[0].status, OrderStatus::Active);
    assert!((two_pass.orders[0].effective - 2.0 * b).abs() < 1e-8);
}

#[test]
fn mixed_orders_are_classified_independently() {
    let setup = DispersionSetup {
        mirror: mirror(0.3, 1 << 13),
        delays: (0..41).map(|i| -3.0 + 0.2 * i as f64).collect(),
        tolerance: 1e-6,
        width: None,
    };
    let coefficients = vec![0.0, 0.9, 0.7, 3.0f64.sqrt()];
    let report = &dispersion_experiment(Modality::PcOct, &setup, &[coefficients]).unwrap()[0];
    let status: Vec<(usize, OrderStatus)> = report.orders.iter().map(|o| (o.order, o.status)).collect();
    assert_eq!(
        status,
        vec![
            (2, OrderStatus::Cancelled),
            (3, OrderStatus::Active),
            (4, OrderStatus::Cancelled)
        ]
    );
    let third = &report.orders[1];
    assert!((third.effective - 1.4).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn envelope_peaks_follow_the_mirror(t0 in -3.0f64..3.0) {
        let setup = mirror(t0, 1 << 12).oct_setup().unwrap();
        for modality in Modality::ALL {
            let factor = modality.peak_delay_factor();
            let centre = factor * t0;
            let delays = [centre - 0.05, centre, centre + 0.05];
            let env = setup.signature(modality, &delays).unwrap().envelope();
            prop_assert!(env[1] > env[0] && env[1] > env[2], "{} at {}", modality, t0);
        }
    }

    #[test]
    fn q_dip_is_complete(t0 in -3.0f64..3.0, r in 0.01f64..0.9) {
        let mut m = mirror(t0, 1 << 12);
        m.reflectivity = c(r);
        m.spectrum = Spectrum::gaussian(0.01, 1.0).unwrap();
        let tr = m.oct_setup().unwrap().signature(Modality::QOct, &[t0]).unwrap();
        prop_assert!(tr.trace[0].abs() <= 1e-9 * tr.background.unwrap());
    }

    #[test]
    fn first_order_dispersion_only_shifts(b1 in -1.0f64..1.0) {
        let setup = DispersionSetup {
            mirror: mirror(0.2, 1 << 12),
            delays: (0..21).map(|i| -2.0 + 0.2 * i as f64).collect(),
            tolerance: 1e-9,
            width: None,
        };
        for modality in Modality::ALL {
            let report = &dispersion_experiment(modality, &setup, &[vec![b1]]).unwrap()[0];
            prop_assert!(report.recentered_deviation < 1e-9, "{}", modality);
            prop_assert_eq!(report.shift, first_order_shift(modality, b1));
        }
    }

    #[test]
    fn widths_scale_inversely_with_bandwidth(omega_s in 0.5f64..2.0) {
        let mut m = mirror(0.0, 1 << 13);
        m.spectrum = Spectrum::gaussian(1.0, omega_s).unwrap();
        m.grid = FreqGrid::with_omega_max(1 << 13, 12.0 * omega_s).unwrap();
        let sweep = Sweep::centered(0.0, 8.0 / omega_s, 161);
        let pc = axial_resolution(Modality::PcOct, &m, 0.0, &sweep).unwrap();
        let co = axial_resolution(Modality::COct, &m, 0.0, &sweep).unwrap();
        prop_assert!((pc.full_width * omega_s - 2.0).abs() < 1e-6);
        prop_assert!((co.full_width * omega_s - 4.0).abs() < 1e-6);
    }
}
