use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use sphereconf::dem::{run_dem, DemOptions};
use sphereconf::geometry::norm;
use sphereconf::laplacian::{extract_subsystem, LaplacianSystem};
use sphereconf::mdem::{mdem_step, prepare, reconstruct, run_mdem, MdemOptions, MdemState};
use sphereconf::partition::IndexPartition;
use sphereconf::{shapes, Error};

#[test]
fn mdem_converges_on_icosphere() {
    let mesh = shapes::icosphere(3);
    let out = run_mdem(&mesh, &MdemOptions::default()).unwrap();
    let r = &out.report;
    assert!(r.converged);
    assert!(r.iterations < 100);
    assert!(*r.residuals_h1.last().unwrap() < 1e-9 && *r.residuals_h2.last().unwrap() < 1e-9);
    for p in &out.f {
        assert!((norm(p) - 1.0).abs() < 1e-12);
    }
    let cert = r.certificate.as_ref().unwrap();
    assert!(cert.satisfied);
    assert!((cert.dense_spectral_radius.unwrap() - cert.spectral_radius).abs() < 1e-8);
    assert_eq!(cert.gamma, 1.0 / ((1.0 - cert.eta) * (1.0 - cert.eta)));
    assert!(r.distortion.mean < 0.01);
}

#[test]
fn mdem_lowers_initial_energy() {
    let mesh = shapes::icosphere(3);
    let out = run_mdem(&mesh, &MdemOptions::default()).unwrap();
    assert!(out.report.initial.quality >= out.report.energy.raw);
}

#[test]
fn dem_converges_on_icosphere() {
    let mesh = shapes::icosphere(3);
    let out = run_dem(&mesh, &DemOptions { rho: 1.4, ..Default::default() }).unwrap();
    assert!(out.report.converged);
    for p in &out.f {
        assert!((norm(p) - 1.0).abs() < 1e-12);
    }
    assert!(out.report.certificate.is_none());
}

#[test]
fn dem_and_mdem_agree() {
    for mesh in [shapes::icosphere(3), shapes::stretched(&shapes::icosphere(4), [1.0, 1.1, 0.9])] {
        let dem = run_dem(&mesh, &DemOptions::default()).unwrap();
        let mdem = run_mdem(&mesh, &MdemOptions::default()).unwrap();
        let d_e = sphereconf::diagnostics::energy_comparison(&dem.report, &mdem.report).unwrap();
        assert!(d_e.abs() < 1e-3, "n = {}: d_E = {d_e}", mesh.n_vertices());
        assert!((dem.report.distortion.mean - mdem.report.distortion.mean).abs() < 5e-3);
    }
}

/// Harmonic extension on frozen index sets with a dense solve.
fn dense_fill(system: &LaplacianSystem, partition: &IndexPartition, h: &mut [Complex64]) {
    let (l, b) = extract_subsystem(system, &partition.interior, &partition.boundary).unwrap();
    let l = DMatrix::from_fn(l.nrows(), l.ncols(), |i, j| l.get(i, j));
    let lu = l.lu();
    let hb: Vec<Complex64> = partition.boundary.iter().map(|&v| h[v]).collect();
    let rhs = b.mul_complex(&hb);
    let re = lu.solve(&-DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.re))).unwrap();
    let im = lu.solve(&-DVector::from_iterator(rhs.len(), rhs.iter().map(|z| z.im))).unwrap();
    for (k, &v) in partition.interior.iter().enumerate() {
        h[v] = Complex64::new(re[k], im[k]);
    }
}

#[test]
fn reconstruction_glues_with_a_direct_sweep() {
    // Rebuild the map from h1 with an independent double sweep on the
    // frozen index sets and compare with the library's reconstruction.
    let mesh = shapes::stretched(&shapes::icosphere(3), [1.0, 1.1, 0.9]);
    let setup = prepare(&mesh, 1.4).unwrap();
    let mut state = MdemState::new(&setup.ops).unwrap();
    for _ in 0..20 {
        mdem_step(&mut state, &setup.ops, &setup.deflation).unwrap();
    }
    let [south, north] = &setup.ops.hemispheres;
    let mut h = setup.ops.southern_setup.clone();
    for (&v, &z) in south.partition.boundary.iter().zip(&state.h1) {
        h[v] = z;
    }
    dense_fill(&setup.system, &south.partition, &mut h);
    let mut h: Vec<Complex64> = h.iter().map(|z| z / z.norm_sqr()).collect();
    dense_fill(&setup.system, &north.partition, &mut h);

    let glued = reconstruct(&setup.ops, &state.h1).unwrap();
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (a, b) in glued.iter().zip(&h) {
        assert!((a - b).norm() < 1e-10 * scale, "{a} vs {b}");
    }
    // The result is harmonic on the northern interior of the final frame.
    let hb: Vec<Complex64> = north.partition.boundary.iter().map(|&v| glued[v]).collect();
    let hi: Vec<Complex64> = north.partition.interior.iter().map(|&v| glued[v]).collect();
    assert!(north.harmonic_residual(&hi, &hb) < 1e-10 * scale);
}

#[test]
fn runs_are_deterministic() {
    let mesh = shapes::icosphere(3);
    let a = run_mdem(&mesh, &MdemOptions::default()).unwrap();
    let b = run_mdem(&mesh, &MdemOptions::default()).unwrap();
    assert_eq!(a.f, b.f);
    assert_eq!(a.report.certificate.unwrap().eta.to_bits(), b.report.certificate.unwrap().eta.to_bits());
}

#[test]
fn torus_is_rejected() {
    let err = run_mdem(&shapes::torus(12, 8, 2.0, 0.7), &MdemOptions::default()).unwrap_err();
    assert!(err.to_string().contains("genus"), "{err}");
    assert!(!matches!(err, Error::Reducible));
}
