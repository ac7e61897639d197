use susyh_core::analytic::{energy_from_n_prime, ground_energy};
use susyh_core::radial::*;

fn solve(dim: u32, za: f64, l: u32, sign: Sign, n: usize, count: usize) -> SpectrumResult {
    let p = PhysParams::new(dim, za).unwrap();
    let sector = kappa_of(&p, l, sign).unwrap();
    let top = n_prime_of_level(&sector, count - 1);
    let grid = RadialGrid::for_sector(&p, sector.abs_kappa(), n, top).unwrap();
    solve_spectrum(&build_radial_hamiltonian(&p, &sector, &grid).unwrap(), count).unwrap()
}

#[test]
fn hydrogen_lowest_levels_at_default_grid() {
    let res = solve(3, 0.5, 0, Sign::Plus, 800, 2);
    assert!((res.levels[0].energy / 0.866_025_403_784_438_6 - 1.0).abs() < 1e-5);
    let e2 = energy_from_n_prime(0.5, 1.0, 1).unwrap();
    assert!((res.levels[1].energy / e2 - 1.0).abs() < 1e-5);
}

#[test]
fn planar_ground_state_is_three_fifths() {
    let res = solve(2, 0.4, 0, Sign::Plus, 800, 1);
    assert!((res.levels[0].energy / 0.6 - 1.0).abs() < 1e-4);
}

#[test]
fn convergence_is_second_order() {
    let p = PhysParams::new(3, 0.5).unwrap();
    let sector = kappa_of(&p, 0, Sign::Plus).unwrap();
    let base = RadialGrid::for_sector(&p, 1.0, 200, 1).unwrap();
    let grids: Vec<RadialGrid> = [200, 400, 800].iter().map(|&n| base.with_points(n).unwrap()).collect();
    let rep = convergence_study(&p, &sector, &grids, 2).unwrap();
    for lvl in &rep.levels {
        assert!(lvl.fitted_order >= 1.8, "{lvl:?}");
    }
}

#[test]
fn levels_match_formula_across_dimensions() {
    for (d, za) in [(4u32, 0.6), (5, 0.5), (6, 1.0), (9, 2.0)] {
        let p = PhysParams::new(d, za).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let sector = kappa_of(&p, 1, sign).unwrap();
            let grid = RadialGrid::for_sector(&p, sector.abs_kappa(), 800, 2).unwrap();
            let res = solve_spectrum(&build_radial_hamiltonian(&p, &sector, &grid).unwrap(), 2).unwrap();
            for (i, lvl) in res.levels.iter().enumerate() {
                let exact = energy_from_n_prime(za, sector.abs_kappa(), n_prime_of_level(&sector, i)).unwrap();
                assert!((lvl.energy / exact - 1.0).abs() < 5e-5, "D={d} {sign} level {i}: {} vs {exact}", lvl.energy);
            }
        }
    }
}

#[test]
fn no_spurious_levels_below_the_ground_state() {
    let p = PhysParams::new(3, 0.5).unwrap();
    let res = solve(3, 0.5, 0, Sign::Plus, 400, 4);
    assert!(res.rejected.is_empty(), "{:?}", res.rejected);
    assert!(res.levels[0].energy >= ground_energy(&p, 1.0).unwrap() - 1e-4);
    for w in res.levels.windows(2) {
        assert!(w[1].energy > w[0].energy);
    }
}

#[test]
fn spectrum_record_csv_shape() {
    use susyh_core::export::CsvRow;
    let p = PhysParams::new(3, 0.5).unwrap();
    let sector = kappa_of(&p, 0, Sign::Plus).unwrap();
    let grid = RadialGrid::for_sector(&p, 1.0, 100, 0).unwrap();
    let op = build_radial_hamiltonian(&p, &sector, &grid).unwrap();
    let res = solve_spectrum(&op, 1).unwrap();
    let rec = SpectrumRecord::from_level(&op, &res.levels[0]);
    assert_eq!(rec.fields().len(), SpectrumRecord::header().len());
}
