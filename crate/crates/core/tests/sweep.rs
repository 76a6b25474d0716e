use std::f64::consts::PI;

use qrouter::sweep::*;
use qrouter::*;

#[test]
fn figure_csv_is_deterministic() {
    for id in [FigureId::Fig2a, FigureId::Fig3b, FigureId::Fig5a] {
        assert_eq!(reproduce_figure(id).to_csv_string(), reproduce_figure(id).to_csv_string());
    }
}

#[test]
fn csv_layouts() {
    let line = reproduce_figure(FigureId::Fig3a).to_csv_string();
    let mut rows = line.lines();
    assert_eq!(rows.next(), Some("x,T_a,R_a,Tb_fwd,Tb_bwd,defect"));
    assert_eq!(rows.count(), LINE_POINTS);

    let map = reproduce_figure(FigureId::Fig4b).to_csv_string();
    let mut rows = map.lines();
    assert_eq!(rows.next(), Some("x,y,value,defect"));
    let first: Vec<&str> = rows.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 4);
    assert_eq!(map.lines().count(), MAP_POINTS * MAP_POINTS + 1);
    // Values round-trip through the shortest representation.
    let d = reproduce_figure(FigureId::Fig3a);
    let second: Vec<f64> = line.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(second[1], d.cells[0].probabilities.transmission);
}

#[test]
fn every_cell_conserves_or_is_flagged() {
    for id in FigureId::ALL {
        let d = reproduce_figure(id);
        for c in &d.cells {
            match c.status {
                CellStatus::Regular => {
                    assert!(c.defect < DEFECT_TOLERANCE);
                    assert!(c.probabilities.to_array().iter().all(|p| (-1e-12..=1.0 + 1e-9).contains(p)));
                }
                CellStatus::IllConditioned => assert!(c.defect >= DEFECT_TOLERANCE),
                CellStatus::Singular | CellStatus::Unphysical => assert!(c.probabilities.transmission.is_nan()),
            }
        }
        assert_eq!(d.count(CellStatus::IllConditioned), 0, "{id}");
    }
}

#[test]
fn singular_cells_lie_on_the_resonant_ridge() {
    let d = reproduce_figure(FigureId::Fig2a);
    for i in 0..MAP_POINTS {
        for j in 0..MAP_POINTS {
            if d.cell(&[i, j]).status == CellStatus::Singular {
                assert!(d.axes[0].value(i).abs() < 1e-12);
            }
        }
    }
    assert!(d.count(CellStatus::Singular) >= 1);
}

#[test]
fn fig3a_has_half_wavelength_period() {
    let d = reproduce_figure(FigureId::Fig3a);
    // Grid step is 0.002 λ, so λ/2 is 250 steps.
    for q in [Quantity::Transmission, Quantity::Reflection, Quantity::ForwardTransfer] {
        let s = d.series(0, q);
        assert_eq!(autocorrelation_peak_lag(&s, 10), 250);
    }
}

#[test]
fn fig5a_is_transparent_at_whole_wavelengths() {
    let d = reproduce_figure(FigureId::Fig5a);
    // Points at L = λ/2 and L = λ are indices 245 and 495.
    for i in [245, 495, 745, 995] {
        assert!((d.cell(&[i]).probabilities.transmission - 1.0).abs() < 1e-10);
    }
}

#[test]
fn optimal_distance_near_resonance_is_perfect_transfer() {
    let e = EmitterParams::with_ratio(20.0, 1.0).unwrap();
    let c = RouterConfig::new(e, e, 1.0, 1.0).unwrap();
    // Closest approach that stays well conditioned; the deficit is 1 - cos²θ.
    let k = probe_for_phase(1e-3, &e);
    let best = find_optimal_distance(&c, k, Objective::MaxForwardTransfer).unwrap();
    assert!(best.value > 1.0 - 2e-6 && best.value <= 1.0 + 1e-9, "{best:?}");
    let on_locus = standing_wave_length(k, 1e-3, 1e-3, 0, 1.0).unwrap().separation;
    let period = PI / k;
    let offset = (best.separation - on_locus).rem_euclid(period);
    assert!(offset.min(period - offset) < 1e-3 * period);
}

#[test]
fn optimal_distance_for_unequal_decays() {
    let e = EmitterParams::with_ratio(20.0, 3.0).unwrap();
    let c = RouterConfig::new(e, e, 1.0, 1.0).unwrap();
    let best = find_optimal_distance(&c, probe_for_phase(1e-3, &e), Objective::MaxForwardTransfer).unwrap();
    assert!((best.value - 0.75).abs() < 1e-6, "{best:?}");
}

#[test]
fn optimal_distance_never_exceeds_one_next_to_bound_state() {
    let e = EmitterParams::with_ratio(20.0, 1.0).unwrap();
    let c = RouterConfig::new(e, e, 1.0, 1.0).unwrap();
    for theta in [1e-6, 1e-5, 5e-5, 1e-4, 3e-4] {
        let best = find_optimal_distance(&c, probe_for_phase(theta, &e), Objective::MaxForwardTransfer).unwrap();
        assert!(best.value <= 1.0 + 1e-9, "{theta}: {best:?}");
    }
}

#[test]
fn optimal_distance_far_detuned_is_flat() {
    let e = EmitterParams::with_ratio(20.0, 1.0).unwrap();
    let c = RouterConfig::new(e, e, 1.0, 1.0).unwrap();
    let best = find_optimal_distance(&c, 20.0 + 1e3 * e.total_width(), Objective::MaxTransmission).unwrap();
    assert!(best.value >= 0.999);
    assert!(best.separation > 0.0);
}

#[test]
fn optimal_distance_at_exact_resonance_is_flat_split() {
    let e = EmitterParams::with_ratio(20.0, 1.0).unwrap();
    let c = RouterConfig::new(e, e, 1.0, 1.0).unwrap();
    let best = find_optimal_distance(&c, 20.0, Objective::MaxForwardTransfer).unwrap();
    assert!((best.value - 0.25).abs() < 1e-9, "{best:?}");
}
