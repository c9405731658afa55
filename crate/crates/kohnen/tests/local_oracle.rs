use kohnen::local_oracle::{
    constant_integral, convolution_check, ek_weil, hilbert_symbol, int, rat, run_local_suite, whittaker_vs_psi, Mat2,
    Meta, PadicContext,
};
use kohnen::CycRat;

#[test]
fn local_suite_passes() {
    let checks = run_local_suite(2024);
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    assert!(checks.iter().all(|c| c.passed));
}

#[test]
fn unit_integral_values() {
    let two = PadicContext::new(2).unwrap();
    let (a, b) = two.unit_integrals();
    // 2^{-1/2} / 2
    assert_eq!(&a * &a, CycRat::from_frac(1, 8));
    assert!(a.to_complex().re > 0.0);
    assert!(b.is_zero());
    for (p, v) in [(3, CycRat::from_frac(2, 3)), (5, CycRat::from_frac(4, 5))] {
        let (a, b) = PadicContext::new(p).unwrap().unit_integrals();
        assert_eq!(a, v);
        assert!(b.is_zero());
    }
}

#[test]
fn small_symbols_and_constants() {
    assert_eq!(hilbert_symbol(2, &int(-1), &int(-1)), -1);
    assert_eq!(hilbert_symbol(5, &int(5), &int(2)), -1);
    assert_eq!(hilbert_symbol(7, &int(3), &int(5)), 1);
    let ctx = PadicContext::new(2).unwrap();
    let a1 = ctx.weil_constant(&int(1));
    assert_eq!(a1.pow(8), CycRat::one());
    assert_ne!(a1.pow(4), CycRat::one());
    // refining the Gauss-sum level changes nothing
    for x in [rat(1, 8), rat(3, 32), rat(5, 2)] {
        assert_eq!(ctx.gauss_integral_at(&x, false, 0), ctx.gauss_integral_at(&x, false, 2));
    }
}

#[test]
fn e_k_values() {
    let ctx = PadicContext::new(2).unwrap();
    assert_eq!(ek_weil(&ctx, &Meta::section(Mat2::identity())), CycRat::from_int(2));
    assert!(ek_weil(&ctx, &Meta::section(Mat2::lower(int(6)))).is_zero());
    assert!(ek_weil(&ctx, &Meta::section(Mat2::upper(rat(1, 2)))).is_zero());
}

#[test]
fn whittaker_examples() {
    let ctx = PadicContext::new(3).unwrap();
    let c = whittaker_vs_psi(&ctx, &int(9), 1).unwrap();
    assert_eq!((c.f, c.chi), (1, 1));
    assert!(c.agrees());
    let c = whittaker_vs_psi(&ctx, &rat(1, 3), 2).unwrap();
    assert!(c.f < 0 && c.integral_side.is_zero() && c.psi_side.is_zero());
    for p in [3, 5] {
        let ctx = PadicContext::new(p).unwrap();
        let q = p as i64;
        // (1 - q^{-3}) / (1 - q^{-2})
        let want = CycRat::from_frac(q * q * q - 1, q * (q * q - 1));
        assert_eq!(constant_integral(&ctx, 1).unwrap(), want);
    }
}

#[test]
fn idempotence_at_two() {
    let ctx = PadicContext::new(2).unwrap();
    let r = convolution_check(&ctx, &[3, 4], 20, 7).unwrap();
    assert_eq!(r.points, 21);
    assert!(r.passed(), "{:?}", r.mismatches);
}
