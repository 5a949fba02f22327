use ufscov_core::lab::{halton, regular_grid, sobol, uniform_random};

// Reference values from the unscrambled Joe-Kuo generator (scipy.stats.qmc.Sobol).
#[test]
fn sobol_matches_reference_generator() {
    let s = sobol(1024, 6).unwrap();
    let head = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
        [0.75, 0.25, 0.25, 0.25, 0.75, 0.75],
        [0.25, 0.75, 0.75, 0.75, 0.25, 0.25],
        [0.375, 0.375, 0.625, 0.875, 0.375, 0.125],
    ];
    for (i, row) in head.iter().enumerate() {
        assert_eq!(s.point(i), row, "point {i}");
    }
    assert_eq!(
        s.point(1000),
        &[0.2197265625, 0.0966796875, 0.5185546875, 0.6767578125, 0.2802734375, 0.9072265625]
    );
    assert_eq!(
        s.point(1023),
        &[0.0009765625, 0.7529296875, 0.6123046875, 0.1455078125, 0.1865234375, 0.4384765625]
    );
}

#[test]
fn sobol_high_dimensions_match_reference() {
    let s = sobol(16, 128).unwrap();
    assert_eq!(
        &s.point(15)[120..],
        &[0.4375, 0.0625, 0.6875, 0.3125, 0.1875, 0.5625, 0.4375, 0.4375]
    );
}

#[test]
fn sobol_first_power_of_two_is_stratified() {
    // every dyadic interval of length 1/64 holds exactly one point per axis
    let s = sobol(64, 5).unwrap();
    for j in 0..5 {
        let mut cells: Vec<usize> = s.column(j).iter().map(|&x| (x * 64.0) as usize).collect();
        cells.sort_unstable();
        assert_eq!(cells, (0..64).collect::<Vec<_>>());
    }
}

#[test]
fn halton_radical_inverse() {
    let h = halton(8, 3).unwrap();
    // base 5, index 7 = 12_5 -> 0.21_5 = 2/5 + 1/25
    assert!((h.point(6)[2] - (2.0 / 5.0 + 1.0 / 25.0)).abs() < 1e-15);
    assert_eq!(h.point(7)[0], 1.0 / 16.0);
}

#[test]
fn generators_stay_in_unit_cube() {
    for cloud in [
        halton(500, 4).unwrap(),
        sobol(500, 4).unwrap(),
        uniform_random(500, 4, 11).unwrap(),
        regular_grid(4, 3).unwrap(),
    ] {
        assert!(cloud.as_flat().iter().all(|x| (0.0..=1.0).contains(x)));
    }
}

#[test]
fn grid_is_the_full_lattice() {
    let g = regular_grid(3, 3).unwrap();
    assert_eq!(g.len(), 27);
    let mut rows: Vec<Vec<u32>> = g.points().map(|p| p.iter().map(|x| (x * 2.0) as u32).collect()).collect();
    rows.dedup();
    assert_eq!(rows.len(), 27);
    assert_eq!(g.point(26), &[1.0, 1.0, 1.0]);
}
