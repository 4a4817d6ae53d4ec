use cdrt_core::quadrature::{integrate_pieces, Tolerance};
use cdrt_core::rng::RandomStream;
use cdrt_core::special::{bessel_k1, erlang_sf, phi1};
use rand_distr::{Distribution, Exp};

/// `e^x K₁(x) = ∫_0^∞ exp(-x (cosh t - 1)) cosh t dt`, cut where the
/// exponent passes 745.
fn k1_scaled_oracle(x: f64) -> f64 {
    let t_max = (1.0 + 745.0 / x).acosh();
    let mut cuts = vec![0.0];
    let mut t = (1.0 / x).min(t_max / 64.0).max(1e-3);
    while t < t_max {
        cuts.push(t);
        t *= 2.0;
    }
    cuts.push(t_max);
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-14,
        max_intervals: 20_000,
    };
    integrate_pieces(|t| (-x * (t.cosh() - 1.0)).exp() * t.cosh(), &cuts, tol)
        .unwrap()
        .value
}

#[test]
fn k1_against_integral_representation() {
    let mut worst = 0.0f64;
    for i in 0..=120 {
        // log-spaced over [1e-6, 50]
        let x = 1e-6 * (50.0f64 / 1e-6).powf(i as f64 / 120.0);
        let got = bessel_k1(x).unwrap() * x.exp();
        let want = k1_scaled_oracle(x);
        worst = worst.max(((got - want) / want).abs());
    }
    assert!(worst <= 1e-10, "worst relative error {worst:e}");
}

#[test]
fn k1_reference_points() {
    // reference values from an independent library
    let cases = [
        (2.0, 0.139_865_881_816_522_46),
        (1e-6, 999_999.999_992_784_3),
        (50.0, 3.444_102_226_717_555_5e-23),
    ];
    for (x, want) in cases {
        let got = bessel_k1(x).unwrap();
        assert!(((got - want) / want).abs() < 1e-12, "K1({x}) = {got}");
    }
    let k2 = 2.0 * bessel_k1(2.0).unwrap();
    assert!((phi1(4.0).unwrap() - k2).abs() < 1e-15);
}

#[test]
fn phi1_stays_in_unit_interval() {
    for i in 0..2000 {
        let x = (i as f64 * 0.01).powi(4);
        let v = phi1(x).unwrap();
        assert!(v > 0.0 && v <= 1.0, "phi1({x}) = {v}");
    }
}

#[test]
fn erlang_sf_against_incomplete_gamma() {
    use statrs::function::gamma::gamma_ur;
    let mut worst = 0.0f64;
    for n in [1usize, 2, 3, 5, 10, 16, 32, 64] {
        for j in 0..200 {
            let x = 1e-3 * (2e5f64).powf(j as f64 / 199.0);
            let got = erlang_sf(n, 1.0, x).unwrap();
            let want = gamma_ur(n as f64, x);
            worst = worst.max((got - want).abs());
        }
    }
    assert!(worst <= 1e-12, "worst absolute error {worst:e}");
    let q = erlang_sf(10, 1.0, 10.0).unwrap();
    assert!((q - 0.457_929_714_471_852_3).abs() < 1e-14);
    // psi enters only through psi*y
    assert_eq!(erlang_sf(7, 4.0, 0.5).unwrap(), erlang_sf(7, 1.0, 2.0).unwrap());
}

#[test]
fn erlang_sf_is_non_increasing() {
    for n in [1, 4, 10] {
        let mut prev = 1.0;
        for j in 0..500 {
            let v = erlang_sf(n, 3.0, j as f64 * 0.02).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }
}

#[test]
fn erlang_sf_matches_sum_of_exponentials_within_dkw() {
    let (n_terms, psi, n) = (6usize, 2.5, 100_000usize);
    let exp = Exp::new(psi).unwrap();
    let mut rng = RandomStream::for_trial(99, 0);
    let mut xs: Vec<f64> = (0..n)
        .map(|_| (0..n_terms).map(|_| exp.sample(&mut rng)).sum())
        .collect();
    xs.sort_by(f64::total_cmp);
    let eps = ((2.0f64 / 0.01).ln() / (2.0 * n as f64)).sqrt();
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = 1.0 - erlang_sf(n_terms, psi, x).unwrap();
        d = d.max((cdf - i as f64 / n as f64).abs()).max((cdf - (i + 1) as f64 / n as f64).abs());
    }
    assert!(d < eps, "sup gap {d} vs DKW band {eps}");
}
