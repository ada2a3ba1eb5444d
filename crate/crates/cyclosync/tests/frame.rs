use cyclosync::channel::{FrameGeometry, LptvChannel};
use cyclosync::cyclostat::NoiseModel;
use cyclosync::frame::{
    assemble_sync_indices, assemble_sync_sequence, draw_symbols, draw_window, post_process, receive, zadoff_chu,
    Constellation, Hypothesis, Layout, SyncWord,
};
use cyclosync::scenarios::{scenario1, F_SW1};
use cyclosync::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Identity channel carried with one (zero) memory tap so that `L_ch >= 1`.
fn identity_memory_one() -> LptvChannel {
    LptvChannel::new_unchecked_memory(vec![vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap()
}

#[test]
fn constellation_moments_match_uniform_law() {
    let sets = [
        Constellation::bpsk(),
        Constellation::qpsk(),
        Constellation::new(vec![c(-3.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]).unwrap(),
    ];
    for k in sets {
        let n = k.len() as f64;
        let p2: f64 = k.symbols().iter().map(|s| s.norm_sqr()).sum::<f64>() / n;
        let p4: f64 = k.symbols().iter().map(|s| s.norm_sqr().powi(2)).sum::<f64>() / n;
        let pseudo: Complex64 = k.symbols().iter().map(|s| s * s).sum::<Complex64>() / n;
        assert!((k.sigma_s2() - p2).abs() < 1e-12);
        assert!((k.gamma_s2() - p4 / p2).abs() < 1e-12);
        assert!((k.pseudo_variance() - pseudo).norm() < 1e-12);
    }
    // nonzero mean is rejected
    assert!(Constellation::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
}

#[test]
fn smallest_geometry_assembly() {
    let b = Constellation::bpsk();
    let g = FrameGeometry::new_relaxed(1, 1, 1, 0, 3, 1).unwrap();
    let sw = SyncWord::new(&b, vec![1, 1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let seq = assemble_sync_sequence(&sw, &b, &g, &mut rng);
        // [+1, +1, d] plus one history symbol
        assert_eq!(seq.len(), 4);
        assert_eq!(&seq[..2], &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(b.index_of(seq[2]).is_some() && b.index_of(seq[3]).is_some());
    }
}

#[test]
fn reference_geometry_assembly_positions() {
    let s = scenario1();
    let g = &s.geometry;
    assert_eq!((g.l_tot, g.l_sw), (16, 12));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let seq = assemble_sync_indices(&s.sync_word, &s.constellation, g, &mut rng);
        assert_eq!(seq.len(), g.l_tot + g.l_ch);
        for m in 0..g.m {
            assert_eq!(&seq[m * g.n..m * g.n + g.k], s.sync_word.block(g.m - 1 - m, g.k));
        }
        let kept: Vec<usize> = g.kept_positions().map(|p| seq[p]).collect();
        assert_eq!(kept, s.sync_word.indices());
    }
}

#[test]
fn post_process_reference_geometry() {
    let g = scenario1().geometry;
    let x: Vec<Complex64> = (0..16).map(|i| c(i as f64, 0.0)).collect();
    let kept = post_process(&x, &g).unwrap();
    let want: Vec<Complex64> = (0..16)
        .filter(|i| ![6, 7, 14, 15].contains(i))
        .map(|i| c(i as f64, 0.0))
        .collect();
    assert_eq!(kept, want);
    assert!(post_process(&x[..15], &g).is_err());
}

#[test]
fn post_process_smallest() {
    let g = FrameGeometry::new_relaxed(1, 1, 1, 0, 3, 1).unwrap();
    let x = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
    assert_eq!(post_process(&x, &g).unwrap(), vec![c(1.0, 0.0), c(2.0, 0.0)]);
}

#[test]
fn noiseless_identity_h1_window_shows_sync_word() {
    let b = Constellation::bpsk();
    let g = FrameGeometry::new(1, 1, 1, 0, 4, 2).unwrap();
    let sw = SyncWord::new(&b, vec![1, 0, 0, 1, 1, 0]).unwrap();
    let quiet = NoiseModel::white(1e-300).unwrap();
    let mut dr = ChaCha8Rng::seed_from_u64(6);
    let mut nr = ChaCha8Rng::seed_from_u64(7);
    let w = draw_window(Hypothesis::H1, &sw, &b, &g, &identity_memory_one(), &quiet, 0, &mut dr, &mut nr).unwrap();
    assert_eq!(w.truth, Hypothesis::H1);
    let kept = post_process(&w.samples, &g).unwrap();
    for (k, want) in kept.iter().zip(sw.symbols(&b)) {
        assert!((k - want).norm() < 1e-100);
    }
}

#[test]
fn receive_matches_transmitted_time_order() {
    let b = Constellation::bpsk();
    let g = FrameGeometry::new(1, 1, 1, 0, 4, 2).unwrap();
    let sw = SyncWord::new(&b, vec![1, 0, 0, 1, 1, 0]).unwrap();
    let quiet = NoiseModel::white(1e-300).unwrap();
    let mut dr = ChaCha8Rng::seed_from_u64(8);
    let mut nr = ChaCha8Rng::seed_from_u64(9);
    let tx = draw_symbols(Hypothesis::H0, Layout::Interleaved, &sw, &b, &g, 5, &mut dr);
    let w = receive(&tx, &b, &g, &identity_memory_one(), &quiet, &mut nr).unwrap();
    assert_eq!(w.trailing.len(), 5);
    for (j, x) in w.samples.iter().enumerate() {
        assert!((x - b.symbol(tx.window[j])).norm() < 1e-100);
    }
    for (t, x) in w.trailing.iter().enumerate() {
        assert!((x - b.symbol(tx.trailing[t])).norm() < 1e-100);
    }
}

#[test]
fn contiguous_layout_sends_sync_word_first() {
    let s = scenario1();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let tx = draw_symbols(Hypothesis::H1, Layout::Contiguous, &s.sync_word, &s.constellation, &s.geometry, 0, &mut rng);
    assert_eq!(&tx.window[..12], s.sync_word.indices());
}

#[test]
fn sync_word_values() {
    let b = Constellation::bpsk();
    let vals: Vec<Complex64> = F_SW1.iter().map(|x| c(*x, 0.0)).collect();
    let sw = SyncWord::from_symbols(&b, &vals).unwrap();
    assert_eq!(sw.symbols(&b), vals);
    assert_eq!(sw.len(), 12);
    assert!(sw.check_geometry(&scenario1().geometry).is_ok());
    let short = SyncWord::new(&b, vec![0; 11]).unwrap();
    assert!(short.check_geometry(&scenario1().geometry).is_err());
}

#[test]
fn zadoff_chu_self_correlation() {
    let z = zadoff_chu(11, 12);
    let e: Complex64 = z.iter().map(|v| v.conj() * v).sum();
    assert!((e.norm_sqr() - 144.0).abs() < 1e-9);
    for (n, v) in z.iter().enumerate() {
        let n = n as f64;
        let want = Complex64::from_polar(1.0, -std::f64::consts::PI * 11.0 * n * n / 12.0);
        assert!((v - want).norm() < 1e-12);
    }
}

proptest! {
    #[test]
    fn block_tiling_is_bijective(bits in prop::collection::vec(0usize..2, 12), k in prop::sample::select(vec![1usize, 2, 3, 4, 6, 12])) {
        let b = Constellation::bpsk();
        let sw = SyncWord::new(&b, bits.clone()).unwrap();
        let m = 12 / k;
        let joined: Vec<usize> = (0..m).rev().flat_map(|i| sw.block(i, k).to_vec()).collect();
        prop_assert_eq!(joined, bits);
    }

    #[test]
    fn enumeration_round_trip(idx in 0u64..4096) {
        let b = Constellation::bpsk();
        let sw = SyncWord::from_enumeration(&b, 12, idx).unwrap();
        prop_assert_eq!(sw.enumeration_index(2), idx);
    }

    #[test]
    fn drawing_is_deterministic(seed in 0u64..1000) {
        let s = scenario1();
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            draw_symbols(Hypothesis::H1, Layout::Interleaved, &s.sync_word, &s.constellation, &s.geometry, 7, &mut rng)
        };
        prop_assert_eq!(draw(), draw());
    }
}
