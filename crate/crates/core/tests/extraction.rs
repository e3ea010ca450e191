//! Extraction through the engine at small depth.

use vw_core::exact::Exponent;
use vw_core::modular::{at_y_one, verify};
use vw_core::toric::{basis_matrix, chern_symbols};
use vw_core::universal::{assemble, extract_universal, f_chi};
use vw_core::{Engine, Mode};

#[test]
fn zero_depth_gives_unit_series() {
    let engine = Engine::new(1);
    for rank in 2..=4 {
        let x = extract_universal(&engine, rank, 0, Mode::Unrefined, 1).unwrap();
        assert_eq!(x.universal.entries.len(), chern_symbols(rank).len());
        for e in &x.universal.entries {
            assert!(e.series.coeff_int(0).is_one(), "{}", e.label);
            assert_eq!(e.series.order(), Exponent::from_integer(1));
        }
    }
}

#[test]
fn refined_specializes_to_unrefined() {
    let engine = Engine::new(1);
    let u = extract_universal(&engine, 2, 2, Mode::Unrefined, 4).unwrap();
    let r = extract_universal(&engine, 2, 2, Mode::Refined, 4).unwrap();
    for (a, b) in u.universal.entries.iter().zip(&r.universal.entries) {
        assert_eq!(a.series, at_y_one(&b.series).unwrap(), "{}", a.label);
    }
    let z = assemble(&u.universal).unwrap();
    assert_eq!(z.a.coeff_int(0).as_constant(), f_chi(2, Mode::Unrefined).as_constant().map(|c| -c));
}

#[test]
fn rank_two_three_terms() {
    let engine = Engine::new(0);
    let x = extract_universal(&engine, 2, 2, Mode::Refined, 12).unwrap();
    let report = verify(2, 3, &assemble(&x.universal).unwrap()).unwrap();
    assert!(report.all_congruent, "{report:?}");
}

#[test]
fn rank_four_basis_is_invertible() {
    let (basis, m) = basis_matrix(4).unwrap();
    assert_eq!(basis.len(), 11);
    assert_eq!(m.len(), 11);
    let x = extract_universal(&Engine::new(0), 4, 1, Mode::Unrefined, 2).unwrap();
    assert_eq!(x.universal.entries.len(), 11);
}
