use cyclosync::channel::{
    apply_channel, build_a_matrix, build_b_matrix, calibrate_noise_power, compute_snr, db_to_linear, FrameGeometry,
    LptvChannel,
};
use cyclosync::cyclostat::{generate_acgn_at, NoiseModel};
use cyclosync::frame::post_process;
use cyclosync::scenarios::{scenario1, scenario2};
use cyclosync::{CMatrix, Complex64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_symbols(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn mat_vec(a: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|k| a[(r, k)] * x[k]).sum())
        .collect()
}

fn identity() -> LptvChannel {
    LptvChannel::lti(vec![c(1.0, 0.0)]).unwrap()
}

#[test]
fn identity_channel_passes_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = random_symbols(&mut rng, 10);
    let z = vec![c(0.0, 0.0); 10];
    assert_eq!(apply_channel(&identity(), &s, &z, 3).unwrap(), s);
}

#[test]
fn scenario1_impulse_response() {
    let ch = scenario1().channel;
    let m0 = 2;
    let mut s = vec![c(0.0, 0.0); 10];
    s[2 + m0] = c(1.0, 0.0);
    let z = vec![c(0.0, 0.0); 8];
    let r = apply_channel(&ch, &s, &z, 0).unwrap();
    let taps = [c(1.05, -0.82), c(0.71, 0.45), c(0.63, -0.72)];
    for (t, v) in r.iter().enumerate() {
        let lag = t as i64 - m0 as i64;
        let want = if (0..3).contains(&lag) { taps[lag as usize] } else { c(0.0, 0.0) };
        assert_eq!(*v, want, "t={t}");
    }
}

#[test]
fn scenario2_direct_sum() {
    let ch = scenario2().channel;
    let even = [c(1.05, -0.82), c(0.71, 0.45), c(0.63, -0.72)];
    let odd = [c(0.53, 0.62), c(0.41, 0.37), c(0.20, -0.34)];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = -7i64;
    let s = random_symbols(&mut rng, 22);
    let z = random_symbols(&mut rng, 20);
    let r = apply_channel(&ch, &s, &z, start).unwrap();
    for i in 0..20 {
        let t = start + i as i64;
        let taps = if t.rem_euclid(2) == 0 { &even } else { &odd };
        let want: Complex64 = z[i] + (0..3).map(|l| taps[l] * s[i + 2 - l]).sum::<Complex64>();
        assert!((r[i] - want).norm() < 1e-12);
    }
}

#[test]
fn short_history_rejected() {
    let ch = scenario1().channel;
    let s = vec![c(1.0, 0.0); 5];
    let z = vec![c(0.0, 0.0); 4];
    assert!(apply_channel(&ch, &s, &z, 0).is_err());
}

#[test]
fn channel_memory_invariants() {
    assert!(LptvChannel::new(vec![vec![c(0.0, 0.0), c(1.0, 0.0)]]).is_err());
    assert!(LptvChannel::new(vec![vec![c(1.0, 0.0), c(0.0, 0.0)]]).is_err());
    // one phase may vanish at the ends as long as another does not
    assert!(LptvChannel::new(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).is_ok());
    assert!(LptvChannel::new(vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]).is_err());
}

#[test]
fn geometry_invariants() {
    let g = FrameGeometry::new(1, 1, 2, 2, 8, 2).unwrap();
    assert_eq!((g.l_ch, g.k, g.l_sw, g.l_tot), (2, 6, 12, 16));
    assert!(FrameGeometry::new(1, 1, 3, 0, 3, 2).is_err());
    assert!(FrameGeometry::new(2, 3, 1, 1, 8, 2).is_err());
    assert!(FrameGeometry::new(1, 1, 2, 2, 3, 1).is_err());
    let e = FrameGeometry::new(1, 1, 3, 3, 3, 4).unwrap_err();
    assert!(e.to_string().contains("N > L_ch violated"), "{e}");
}

#[test]
fn identity_b_and_a() {
    let g = FrameGeometry::new(1, 1, 0, 1, 4, 2).unwrap();
    let b = build_b_matrix(&identity(), &g, 0);
    assert_eq!((b.nrows(), b.ncols()), (3, 4));
    let a = build_a_matrix(&identity(), &g);
    assert_eq!((a.nrows(), a.ncols()), (8, 9));
    for r in 0..b.nrows() {
        for col in 0..b.ncols() {
            assert_eq!(b[(r, col)], c(if r == col { 1.0 } else { 0.0 }, 0.0));
        }
    }
    for r in 0..a.nrows() {
        for col in 0..a.ncols() {
            assert_eq!(a[(r, col)], c(if r == col { 1.0 } else { 0.0 }, 0.0));
        }
    }
}

#[test]
fn scenario2_b_rows_alternate() {
    let s = scenario2();
    let ch = &s.channel;
    let b = build_b_matrix(ch, &s.geometry, 0);
    for k in 0..s.geometry.k {
        let phase = &ch.phases()[(-(k as i64)).rem_euclid(2) as usize];
        for col in 0..s.geometry.n {
            let want = if col >= k && col - k <= 2 { phase[col - k] } else { c(0.0, 0.0) };
            assert_eq!(b[(k, col)], want);
        }
    }
}

/// Noiseless window through `apply_channel`, returned in vector order
/// together with the symbol vector (vector order, with history).
fn noiseless_window(ch: &LptvChannel, g: &FrameGeometry, rng: &mut ChaCha8Rng) -> (Vec<Complex64>, Vec<Complex64>) {
    let sv = random_symbols(rng, g.l_tot + g.l_ch);
    let time: Vec<Complex64> = sv.iter().rev().copied().collect();
    let z = vec![c(0.0, 0.0); g.l_tot];
    let mut r = apply_channel(ch, &time, &z, -(g.l_tot as i64 - 1)).unwrap();
    r.reverse();
    (r, sv)
}

#[test]
fn b_blocks_reproduce_post_processed_channel_output() {
    for s in [scenario1(), scenario2()] {
        let g = &s.geometry;
        let b = build_b_matrix(&s.channel, g, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (r, sv) = noiseless_window(&s.channel, g, &mut rng);
            let kept = post_process(&r, g).unwrap();
            for m in 0..g.m {
                let blk = mat_vec(&b, &sv[m * g.n..(m + 1) * g.n]);
                for k in 0..g.k {
                    assert!((blk[k] - kept[m * g.k + k]).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn b_matrix_is_block_invariant() {
    for s in [scenario1(), scenario2()] {
        let g = &s.geometry;
        let b0 = build_b_matrix(&s.channel, g, 0);
        for m in 1..g.m as i64 {
            assert_eq!(b0, build_b_matrix(&s.channel, g, -m * g.n as i64));
        }
    }
}

#[test]
fn scenario1_trace_closed_form() {
    let s = scenario1();
    let a = build_a_matrix(&s.channel, &s.geometry);
    let tr: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let energy: f64 = s.channel.phases()[0].iter().map(|h| h.norm_sqr()).sum();
    assert!((tr - 16.0 * energy).abs() < 1e-12);
}

proptest! {
    #[test]
    fn a_matrix_matches_convolution(seed in 0u64..500, p_h in 1usize..4, l_h in 1usize..3, m in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<Vec<Complex64>> = (0..p_h)
            .map(|_| {
                let mut taps = random_symbols(&mut rng, l_h + 1);
                taps[0] += c(2.0, 0.0);
                taps[l_h] += c(0.0, 2.0);
                taps
            })
            .collect();
        let ch = LptvChannel::new(coeffs).unwrap();
        let n = p_h * (l_h / p_h + 2);
        let g = FrameGeometry::new_relaxed(p_h, 1, l_h, 0, n, m).unwrap();
        let sv = random_symbols(&mut rng, g.l_tot + g.l_ch);
        let z = random_symbols(&mut rng, g.l_tot);
        let a = build_a_matrix(&ch, &g);
        let mut direct = mat_vec(&a, &sv);
        for (d, zz) in direct.iter_mut().zip(&z) {
            *d += zz;
        }
        let time: Vec<Complex64> = sv.iter().rev().copied().collect();
        let z_time: Vec<Complex64> = z.iter().rev().copied().collect();
        let mut conv = apply_channel(&ch, &time, &z_time, -(g.l_tot as i64 - 1)).unwrap();
        conv.reverse();
        for (x, y) in direct.iter().zip(&conv) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn lookup_is_periodic(m in -50i64..50, l in 0usize..3) {
        let ch = scenario2().channel;
        prop_assert_eq!(ch.tap(m, l), ch.tap(m + 2, l));
        prop_assert_eq!(ch.tap(m, l), ch.tap(m - 6, l));
    }
}

#[test]
fn snr_identity_white_unit() {
    let g = FrameGeometry::new(1, 1, 0, 1, 4, 2).unwrap();
    let snr = compute_snr(&identity(), &g, &NoiseModel::white(1.0).unwrap(), 1.0).unwrap();
    assert!((snr - 1.0).abs() < 1e-15);
    let scale = calibrate_noise_power(&identity(), &g, &NoiseModel::white(1.0).unwrap(), 1.0, 0.0).unwrap();
    assert!((scale - 1.0).abs() < 1e-15);
    assert!(compute_snr(&identity(), &g, &NoiseModel::white(1.0).unwrap(), 0.0).is_err());
}

#[test]
fn scenario1_snr_specialization() {
    let s = scenario1();
    let g = &s.geometry;
    let sigma_z2 = 0.7;
    let noise = s.noise_shape.scaled(sigma_z2).unwrap();
    let a = build_a_matrix(&s.channel, g);
    let tr: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let want = tr / (sigma_z2 * g.l_tot as f64);
    assert!((compute_snr(&s.channel, g, &noise, 1.0).unwrap() - want).abs() < 1e-9 * want);
}

#[test]
fn calibration_hits_target() {
    for s in [scenario1(), scenario2()] {
        let g = &s.geometry;
        for db in [-5.0, 0.0, 5.0, 12.5] {
            let scale = calibrate_noise_power(&s.channel, g, &s.noise_shape, 1.0, db).unwrap();
            let snr = compute_snr(&s.channel, g, &s.noise_shape.scaled(scale).unwrap(), 1.0).unwrap();
            assert!((snr / db_to_linear(db) - 1.0).abs() < 1e-9);
        }
        let base = compute_snr(&s.channel, g, &s.noise_shape, 1.0).unwrap();
        let doubled = compute_snr(&s.channel, g, &s.noise_shape.scaled(2.0).unwrap(), 1.0).unwrap();
        assert!((doubled * 2.0 - base).abs() < 1e-12 * base);
    }
    assert!((db_to_linear(-5.0) - 10f64.powf(-0.5)).abs() < 1e-15);
}

#[test]
fn snr_invariant_to_block_shift() {
    // direct power sums over a window shifted by whole blocks
    let s = scenario2();
    let g = &s.geometry;
    let ratio = |shift: i64| {
        let mut sig = 0.0;
        let mut noi = 0.0;
        for k in 0..g.l_tot as i64 {
            let t = shift - k;
            sig += (0..=g.l_ch).map(|l| s.channel.tap(t, l).norm_sqr()).sum::<f64>();
            noi += s.noise_shape.autocorrelation(t, 0);
        }
        sig / noi
    };
    let snr = compute_snr(&s.channel, g, &s.noise_shape, 1.0).unwrap();
    for j in -3..3 {
        assert!((ratio(j * g.n as i64) - snr).abs() < 1e-12);
    }
}

#[test]
fn snr_matches_monte_carlo_power_ratio() {
    let s = scenario2();
    let g = &s.geometry;
    let a = build_a_matrix(&s.channel, g);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trials = 100_000;
    let mut sig = 0.0;
    let mut noi = 0.0;
    for _ in 0..trials {
        let sv: Vec<Complex64> = (0..g.l_tot + g.l_ch)
            .map(|_| if rng.random::<bool>() { c(1.0, 0.0) } else { c(-1.0, 0.0) })
            .collect();
        sig += mat_vec(&a, &sv).iter().map(|x| x.norm_sqr()).sum::<f64>();
        noi += generate_acgn_at(&s.noise_shape, -(g.l_tot as i64 - 1), g.l_tot, &mut rng)
            .iter()
            .map(|x| x.norm_sqr())
            .sum::<f64>();
    }
    let snr = compute_snr(&s.channel, g, &s.noise_shape, 1.0).unwrap();
    assert!((sig / noi / snr - 1.0).abs() < 0.01, "{} vs {snr}", sig / noi);
}
