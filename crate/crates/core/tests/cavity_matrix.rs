use emglink::cavity::{quadrature, q_factors, stored_energies, wall_loss, CavitySpec, FieldSolution, ModeIndices};

/// Four geometries × TE101..TE103.
fn matrix() -> Vec<(CavitySpec<f64>, ModeIndices)> {
    let geoms = [
        CavitySpec { rs: 0.026, ..CavitySpec::vacuum(0.1, 0.1, 0.1) },
        CavitySpec { rs: 0.01, ..CavitySpec::vacuum(0.1, 0.05, 0.2) },
        CavitySpec { rs: 0.05, ..CavitySpec::vacuum(0.02286, 0.01016, 0.05) },
        CavitySpec { rs: 0.02, eps_r: 2.1, tan_delta: 4e-4, ..CavitySpec::vacuum(0.03, 0.015, 0.04) },
    ];
    geoms
        .iter()
        .flat_map(|g| (1..=3).map(move |l| (*g, ModeIndices::te10(l).unwrap())))
        .collect()
}

#[test]
fn wall_loss_closed_form_matches_surface_quadrature() {
    let cases = matrix();
    assert_eq!(cases.len(), 12);
    for (spec, mode) in cases {
        let sol = FieldSolution::resonant(mode, &spec, 100.0).unwrap();
        let closed = wall_loss(&sol, &spec, mode).unwrap();
        let numeric = quadrature::wall_loss(&sol, &spec, mode, 256).unwrap();
        let rel = (closed - numeric).abs() / numeric;
        assert!(rel < 0.01, "{mode} {spec:?}: {closed} vs {numeric} ({rel})");
    }
}

#[test]
fn electric_energy_matches_volume_quadrature() {
    for (spec, mode) in matrix() {
        let sol = FieldSolution::resonant(mode, &spec, 100.0).unwrap();
        let (ue, um) = stored_energies(&sol, &spec, mode).unwrap();
        let numeric = quadrature::electric_energy(&sol, &spec, mode, 64).unwrap();
        assert!((ue - numeric).abs() / ue < 5e-3, "{mode}");
        assert!((ue - um).abs() / ue < 1e-9, "{mode}");
    }
}

#[test]
fn reports_respect_parallel_bound() {
    for (spec, mode) in matrix() {
        let sol = FieldSolution::resonant(mode, &spec, 1.0).unwrap();
        let r = q_factors(&sol, &spec, mode, sol.omega(&spec)).unwrap();
        assert!(r.q_total <= r.q_tx.min(r.q_rx));
        assert!(r.q_tx.is_finite() && r.q_tx > 0.0);
    }
}
