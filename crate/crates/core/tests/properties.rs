use proptest::prelude::*;
use tiksplit::imaging::{convolve_neumann, gaussian_psf, haar_dwt, haar_idwt, psnr, Image, NeumannBlur};
use tiksplit::operators::{adjoint_mismatch, soft_threshold};
use tiksplit::Vector;

fn image(levels: usize) -> impl Strategy<Value = Image> {
    let block = 1usize << levels;
    (1..=3usize, 1..=3usize).prop_flat_map(move |(bh, bw)| {
        let (h, w) = (bh * block, bw * block);
        prop::collection::vec(0.0..1.0f64, h * w).prop_map(move |px| Image::new(h, w, px).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_preserves_energy_and_inverts(levels in 0..4usize, seed_img in image(3)) {
        let coeffs = haar_dwt(&seed_img, levels).unwrap();
        prop_assert!((coeffs.norm() - seed_img.to_vector().norm()).abs() < 1e-10);
        let back = haar_idwt(&coeffs, seed_img.dims(), levels).unwrap();
        let err = back.pixels().iter().zip(seed_img.pixels()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn blur_keeps_constants_and_is_self_adjoint(
        half in 0..3usize,
        sigma in 0.3..6.0f64,
        c in 0.0..1.0f64,
        seed in any::<u64>(),
    ) {
        let psf = gaussian_psf(2 * half + 1, sigma).unwrap();
        let flat = Image::constant(8, 16, c).unwrap();
        let out = convolve_neumann(&psf, &flat).unwrap();
        prop_assert!(out.pixels().iter().all(|p| (p - c).abs() < 1e-12));
        let op = NeumannBlur::new(psf, flat.dims()).unwrap().to_operator();
        prop_assert!(adjoint_mismatch(&op, 3, seed) < 1e-12);
    }

    #[test]
    fn soft_threshold_meets_its_optimality_condition(
        x in prop::collection::vec(-5.0..5.0f64, 1..8),
        gamma in 0.01..3.0f64,
        lambda in 0.0..2.0f64,
    ) {
        // p = prox_{γλ|·|}(x)  ⇔  (x − p)/γ ∈ λ∂|p|
        let xv = Vector::from_slice(&x).unwrap();
        let p = soft_threshold(gamma, lambda, &xv);
        for (xi, pi) in x.iter().zip(p.iter()) {
            let g = (xi - pi) / gamma;
            if *pi == 0.0 {
                prop_assert!(g.abs() <= lambda + 1e-12);
            } else {
                prop_assert!((g - lambda * pi.signum()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn psnr_is_symmetric(a in image(0), shift in 0.001..0.5f64) {
        let b = Image::from_fn(a.height(), a.width(), |r, c| a.get(r, c) + shift).unwrap();
        let (ab, ba) = (psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((ab - (-20.0 * shift.log10())).abs() < 1e-9);
    }
}
