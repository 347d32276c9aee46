use vacohom::rational::qf;
use vacohom::sewing::*;

fn fixture() -> Vec<SewingText> {
    parse_cases(include_str!("fixtures/sewing_cases.toml")).unwrap()
}

#[test]
fn fixture_cases_meet_their_expectations() {
    let cases = fixture();
    assert_eq!(cases.len(), 12);
    assert_eq!(cases.iter().filter(|c| c.expect.valid == Some(false)).count(), 4);
    for c in &cases {
        let r = run_case(c);
        assert!(r.matches_expectation, "{}: {:?}", c.name, r.mismatches);
    }
}

#[test]
fn valid_configs_have_nonempty_annuli_and_small_exclusions() {
    for c in fixture() {
        let cfg = c.config().unwrap();
        let d = validate(&cfg);
        if d.valid() {
            assert!(d.checks.iter().filter(|k| k.name.starts_with("annulus")).all(|k| k.holds));
            let l = detect_coincident(&cfg).unwrap();
            assert!(l.r() <= cfg.x.len().min(cfg.y.len()));
        }
    }
}

#[test]
fn mobius_map_agrees_with_pinch_on_a_grid() {
    for eps in [qf(1, 4), qf(1, 3), qf(-2, 9)] {
        for xi in [1, -1] {
            let m = mobius_lambda(&eps, xi).unwrap();
            for a in -3..=3 {
                for b in -3..=3 {
                    let z = GaussQ::new(qf(a, 2), qf(b, 3));
                    if z.is_zero() {
                        continue;
                    }
                    assert_eq!(m.apply(&z).unwrap(), pinch(&z, &GaussQ::real(eps.clone())).unwrap());
                }
            }
        }
    }
}
