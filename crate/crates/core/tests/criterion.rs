use slicegeom_core::criterion::{
    decay_profile, sequence_criterion, uniform_verdict, FilterSurrogate, Verdict, DEFAULT_THETA,
};
use slicegeom_core::{Error, NormedSpace, SolverBudget, SpaceSpec};

fn sp(spec: SpaceSpec) -> NormedSpace {
    NormedSpace::new(spec).unwrap()
}

fn quick() -> SolverBudget {
    SolverBudget { samples: 8, ..SolverBudget::default() }
}

#[test]
fn disc_profile_is_flat_and_fails() {
    let l2 = sp(SpaceSpec::lp(2, 2.0));
    let p = decay_profile(&l2, "l2", &[1.0], 4, &quick()).unwrap();
    for v in &p.cleaned[0] {
        assert!((v - 0.1339746).abs() < 1e-4, "{v}");
    }
    let r = uniform_verdict(&p, DEFAULT_THETA).unwrap();
    assert_eq!(r.verdict, Verdict::CertifiedFailure);
}

#[test]
fn square_profile_stabilizes_at_two() {
    let linf = sp(SpaceSpec::lp(2, f64::INFINITY));
    let p = decay_profile(&linf, "linf", &[2.0], 4, &quick()).unwrap();
    for (v, e) in p.cleaned[0].iter().zip([1.0, 0.5, 0.5, 0.5]) {
        assert!((v - e).abs() < 1e-9, "{v} vs {e}");
    }
    assert_eq!(uniform_verdict(&p, DEFAULT_THETA).unwrap().verdict, Verdict::CertifiedFailure);
}

#[test]
fn tiny_separation_gives_tiny_values() {
    for spec in [SpaceSpec::lp(2, 2.0), SpaceSpec::lp(2, f64::INFINITY), SpaceSpec::lp(3, 1.5)] {
        let s = sp(spec);
        let p = decay_profile(&s, "x", &[1e-6], 2, &quick()).unwrap();
        assert!(p.cleaned[0].iter().all(|v| *v <= 1e-4), "{:?}", p.cleaned);
    }
}

#[test]
fn full_separation_fails_in_the_plane() {
    let l2 = sp(SpaceSpec::lp(2, 2.0));
    let p = decay_profile(&l2, "l2", &[2.0], 3, &quick()).unwrap();
    assert!((p.cleaned[0][2] - 1.0).abs() < 1e-6);
    assert_eq!(uniform_verdict(&p, DEFAULT_THETA).unwrap().verdict, Verdict::CertifiedFailure);
}

#[test]
fn verdict_needs_stabilized_column() {
    let l3 = sp(SpaceSpec::lp(3, f64::INFINITY));
    let p = decay_profile(&l3, "l3", &[1.0], 2, &quick()).unwrap();
    assert_eq!(uniform_verdict(&p, DEFAULT_THETA), Err(Error::MissingStabilizedColumn(4)));
}

#[test]
fn constant_family_sequence() {
    let l2 = sp(SpaceSpec::lp(2, 2.0));
    let p = decay_profile(&l2, "l2", &[0.9, 1.0], 3, &quick()).unwrap();
    let expected = 1.0 - (1.0 - 0.81f64 / 4.0).sqrt();
    assert!((expected - 0.1069714).abs() < 1e-6);
    assert!((p.cleaned[0][0] - expected).abs() < 1e-4);
    let family = vec![p; 6];
    let r = sequence_criterion(&family, 1.0, 0.1, &[0.05], FilterSurrogate::Frechet).unwrap();
    assert_eq!(r.rows[0].n, None);
    assert!(!r.satisfied);
    let r = sequence_criterion(&family, 1.0, 0.1, &[0.2], FilterSurrogate::Density { cut: 0.95 }).unwrap();
    assert_eq!(r.rows[0].n, Some(1));
    assert!(r.satisfied);
    assert!(matches!(
        sequence_criterion(&[], 1.0, 0.1, &[0.2], FilterSurrogate::Frechet),
        Err(Error::GridMismatch(_))
    ));
    assert!(matches!(
        sequence_criterion(&family, 1.0, 0.3, &[0.2], FilterSurrogate::Frechet),
        Err(Error::GridMismatch(_))
    ));
}
