//! Instances with several domain factors and several test kernels, and the
//! product-denominator mixing constant over them.
//!
//! A multilinear instance carries factored ground sets `A_1 x ... x A_t`,
//! `C_1 x ... x C_r`, one test kernel per `G_k` factor (each with its own
//! test point set and exponent `p_k`), and a single mixing kernel over the
//! joint probes. The mixing bound divides a family's mixed `(s;q)`-norm by
//! the product of the per-kernel weak sums. Joint indices are flattened
//! row-major, the last factor fastest.
//!
//! With a single factor everywhere the computations agree bit-for-bit with
//! the single-map module on the reduced instance: the sampling and the
//! aggregate arithmetic are shared deliberately.

use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math::{abs_pow, pairwise_sum, pow_recip};
use crate::mixed::{mixed_norm_closed, mixed_norm_lower, MixedFamilyValues};
use crate::mixing::{
    domination_at, mixing_upper_domination, SeminormBallModel, MAX_SWEEP_POINTS,
};
use crate::model::sample_family;
use crate::summing::witness_from_dual;
use crate::{Error, ExponentParams, Instance, Result, WeightedFamily};

/// Which route evaluates a family's mixed norm (the two proof cases meet on
/// the diagonal `q = s`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormRoute {
    /// The diagonal closed form (exact when `q = s`).
    Closed,
    /// The measure-side maximization (general path, valid for `q <= s`).
    Measure,
}

/// Factored instance: `t` domain factors, `r` middle factors, one test
/// kernel with its own point set and exponent per `G` factor, and a joint
/// mixing kernel.
#[derive(Debug, Clone)]
pub struct MultilinearInstance {
    pub a_sizes: Vec<usize>,
    pub c_sizes: Vec<usize>,
    pub g_sizes: Vec<usize>,
    pub k_sizes: Vec<usize>,
    pub n_w: usize,
    /// One kernel per `G` factor, laid out `(joint_a, joint_c, g_k, point)`.
    pub test_kernels: Vec<Vec<f64>>,
    /// Mixing kernel, laid out `(joint_a, joint_c, joint_g, w)`.
    pub mix: Vec<f64>,
    /// Test exponent per kernel; each must satisfy `p_k <= q`.
    pub test_exponents: Vec<f64>,
    pub exponents: ExponentParams,
}

impl MultilinearInstance {
    pub fn new(
        a_sizes: Vec<usize>,
        c_sizes: Vec<usize>,
        g_sizes: Vec<usize>,
        k_sizes: Vec<usize>,
        n_w: usize,
        test_kernels: Vec<Vec<f64>>,
        mix: Vec<f64>,
        test_exponents: Vec<f64>,
        exponents: ExponentParams,
    ) -> Result<Self> {
        if a_sizes.is_empty() || c_sizes.is_empty() || g_sizes.is_empty() {
            return Err(Error::Invariant("every factor list needs at least one factor".into()));
        }
        if a_sizes.iter().chain(&c_sizes).chain(&g_sizes).chain(&k_sizes).any(|&n| n == 0)
            || n_w == 0
        {
            return Err(Error::Invariant("all factor sizes must be positive".into()));
        }
        let kernels = g_sizes.len();
        if k_sizes.len() != kernels || test_kernels.len() != kernels
            || test_exponents.len() != kernels
        {
            return Err(Error::Invariant(format!(
                "need one point set, kernel and exponent per G factor: {} factors, {} point \
                 sets, {} kernels, {} exponents",
                kernels,
                k_sizes.len(),
                test_kernels.len(),
                test_exponents.len()
            )));
        }
        let q = exponents.q();
        for (k, &p) in test_exponents.iter().enumerate() {
            if !(p > 0.0) || !p.is_finite() || p > q + 1e-15 {
                return Err(Error::Parameter(format!(
                    "kernel {k} exponent must satisfy 0 < p <= q, got p={p}, q={q}"
                )));
            }
        }
        let joint_a: usize = a_sizes.iter().product();
        let joint_c: usize = c_sizes.iter().product();
        let joint_g: usize = g_sizes.iter().product();
        for (k, kernel) in test_kernels.iter().enumerate() {
            let expected = joint_a * joint_c * g_sizes[k] * k_sizes[k];
            if kernel.len() != expected {
                return Err(Error::Invariant(format!(
                    "test kernel {k} has length {}, expected {expected}",
                    kernel.len()
                )));
            }
            if kernel.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invariant(format!("test kernel {k} has a non-finite entry")));
            }
        }
        let expected_mix = joint_a * joint_c * joint_g * n_w;
        if mix.len() != expected_mix {
            return Err(Error::Invariant(format!(
                "mix tensor has length {}, expected {expected_mix}",
                mix.len()
            )));
        }
        if mix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invariant("mix tensor has a non-finite entry".into()));
        }
        Ok(Self {
            a_sizes,
            c_sizes,
            g_sizes,
            k_sizes,
            n_w,
            test_kernels,
            mix,
            test_exponents,
            exponents,
        })
    }

    pub fn factor_count(&self) -> usize {
        self.a_sizes.len()
    }

    pub fn kernel_count(&self) -> usize {
        self.g_sizes.len()
    }

    pub fn joint_a(&self) -> usize {
        self.a_sizes.iter().product()
    }

    pub fn joint_c(&self) -> usize {
        self.c_sizes.iter().product()
    }

    pub fn joint_g(&self) -> usize {
        self.g_sizes.iter().product()
    }

    /// Component of a flattened joint `G` index for one kernel
    /// (row-major, last factor fastest).
    pub fn g_component(&self, joint_g: usize, kernel: usize) -> usize {
        let mut rest = joint_g;
        let mut components = vec![0usize; self.g_sizes.len()];
        for (idx, &size) in self.g_sizes.iter().enumerate().rev() {
            components[idx] = rest % size;
            rest /= size;
        }
        components[kernel]
    }

    fn kernel_value(&self, kernel: usize, ja: usize, jc: usize, g: usize, point: usize) -> f64 {
        let n_k = self.k_sizes[kernel];
        let g_size = self.g_sizes[kernel];
        self.test_kernels[kernel][((ja * self.joint_c() + jc) * g_size + g) * n_k + point]
    }

    fn mix_row_abs(&self, ja: usize, jc: usize, jg: usize) -> Vec<f64> {
        let base = ((ja * self.joint_c() + jc) * self.joint_g() + jg) * self.n_w;
        self.mix[base..base + self.n_w].iter().map(|v| v.abs()).collect()
    }

    /// Instance over the joint ground sets; defined when there is a single
    /// test kernel.
    pub fn flatten_single_kernel(&self) -> Result<Instance> {
        if self.kernel_count() != 1 {
            return Err(Error::Parameter(format!(
                "flattening needs exactly one test kernel, got {}",
                self.kernel_count()
            )));
        }
        let (n_a, n_c, n_g) = (self.joint_a(), self.joint_c(), self.joint_g());
        Instance::new(
            (n_a, n_c, n_g, self.k_sizes[0], self.n_w),
            vec![0.0; n_a * n_c * n_g],
            self.test_kernels[0].clone(),
            self.mix.clone(),
        )
    }

    /// Deterministic random instance for fuzzing; test kernels are bounded
    /// away from zero so the domination route stays feasible.
    pub fn random(
        seed: u64,
        a_sizes: Vec<usize>,
        c_sizes: Vec<usize>,
        g_sizes: Vec<usize>,
        k_sizes: Vec<usize>,
        n_w: usize,
        test_exponents: Vec<f64>,
        exponents: ExponentParams,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let joint_a: usize = a_sizes.iter().product();
        let joint_c: usize = c_sizes.iter().product();
        let joint_g: usize = g_sizes.iter().product();
        let test_kernels: Vec<Vec<f64>> = g_sizes
            .iter()
            .zip(&k_sizes)
            .map(|(&g, &k)| {
                (0..joint_a * joint_c * g * k).map(|_| rng.random_range(0.05..1.0)).collect()
            })
            .collect();
        let mix: Vec<f64> =
            (0..joint_a * joint_c * joint_g * n_w).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self::new(a_sizes, c_sizes, g_sizes, k_sizes, n_w, test_kernels, mix, test_exponents, exponents)
    }
}

/// Weak test sum of one family against one kernel (same aggregation as the
/// single-map weak sup).
pub fn kernel_weak_sup(mi: &MultilinearInstance, fam: &WeightedFamily, kernel: usize) -> Result<f64> {
    let p = mi.test_exponents[kernel];
    let points = mi.k_sizes[kernel];
    validate_family(mi, fam)?;
    let mut best = 0.0_f64;
    let mut powers = vec![0.0; fam.len()];
    for point in 0..points {
        for (j, it) in fam.items().iter().enumerate() {
            let g = mi.g_component(it.g, kernel);
            let kernel_value = mi.kernel_value(kernel, it.a, it.c, g, point);
            powers[j] = abs_pow(it.weight * kernel_value, p);
        }
        best = best.max(pairwise_sum(&powers));
    }
    Ok(pow_recip(best, p))
}

fn validate_family(mi: &MultilinearInstance, fam: &WeightedFamily) -> Result<()> {
    let (n_a, n_c, n_g) = (mi.joint_a(), mi.joint_c(), mi.joint_g());
    for (j, it) in fam.items().iter().enumerate() {
        if it.a >= n_a || it.c >= n_c || it.g >= n_g {
            return Err(Error::Index(format!(
                "family entry {j} points at joint probe ({}, {}, {}) outside {n_a}x{n_c}x{n_g}",
                it.a, it.c, it.g
            )));
        }
    }
    Ok(())
}

/// Product of all kernel weak sums.
pub fn denominator_product(mi: &MultilinearInstance, fam: &WeightedFamily) -> Result<f64> {
    let mut product = 1.0;
    for kernel in 0..mi.kernel_count() {
        product *= kernel_weak_sup(mi, fam, kernel)?;
    }
    Ok(product)
}

/// Mixed norm of one family's mixing rows by the requested route.
pub fn family_mixed_norm(
    mi: &MultilinearInstance,
    fam: &WeightedFamily,
    route: NormRoute,
) -> Result<f64> {
    validate_family(mi, fam)?;
    let weights = fam.items().iter().map(|it| it.weight).collect();
    let rows = fam.items().iter().map(|it| mi.mix_row_abs(it.a, it.c, it.g)).collect();
    let vals = MixedFamilyValues::new(weights, rows)?;
    match route {
        NormRoute::Closed => {
            if !mi.exponents.is_diagonal() {
                return Err(Error::Parameter(
                    "the closed route is exact only on the diagonal q = s".into(),
                ));
            }
            mixed_norm_closed(&vals, mi.exponents.q())
        }
        NormRoute::Measure => mixed_norm_lower(&vals, &mi.exponents),
    }
}

fn family_norm_auto(mi: &MultilinearInstance, fam: &WeightedFamily) -> Result<f64> {
    if mi.exponents.is_diagonal() {
        family_mixed_norm(mi, fam, NormRoute::Closed)
    } else {
        family_mixed_norm(mi, fam, NormRoute::Measure)
    }
}

/// Best sampled ratio of a family's mixed norm to the product of its kernel
/// weak sums — a certified lower bound of the product-denominator mixing
/// constant. With a single kernel at `p = q` the pool also holds the
/// extremal family of a domination sweep on the flattened instance.
pub fn multi_mixing_lower_bound(
    mi: &MultilinearInstance,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, WeightedFamily)> {
    let (n_a, n_c, n_g) = (mi.joint_a(), mi.joint_c(), mi.joint_g());
    let mut best: Option<(f64, WeightedFamily)> = None;
    let consider = |fam: WeightedFamily, best: &mut Option<(f64, WeightedFamily)>| -> Result<()> {
        let denom = denominator_product(mi, &fam)?;
        if denom <= 1e-300 {
            return Ok(());
        }
        let ratio = family_norm_auto(mi, &fam)? / denom;
        if best.as_ref().map_or(true, |(b, _)| ratio > *b) {
            *best = Some((ratio, fam));
        }
        Ok(())
    };

    if mi.kernel_count() == 1
        && mi.test_exponents[0] == mi.exponents.q()
        && mi.n_w <= MAX_SWEEP_POINTS
    {
        if let Ok(flat) = mi.flatten_single_kernel() {
            if let Ok((_, worst_mu)) = mixing_upper_domination(&flat, &mi.exponents, 8) {
                if let Ok((_, dual)) = domination_at(&flat, &worst_mu, &mi.exponents) {
                    if let Ok(witness) =
                        witness_from_dual((n_a, n_c, n_g), &dual, mi.exponents.q())
                    {
                        consider(witness, &mut best)?;
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut produced = 0usize;
    let mut attempts = 0usize;
    let max_attempts = n_samples.saturating_mul(20).max(64);
    while produced < n_samples && attempts < max_attempts {
        attempts += 1;
        let fam = sample_family(&mut rng, n_a, n_c, n_g, 8);
        let denom = denominator_product(mi, &fam)?;
        if denom <= 1e-300 {
            continue;
        }
        produced += 1;
        let ratio = family_norm_auto(mi, &fam)? / denom;
        if best.as_ref().map_or(true, |(b, _)| ratio > *b) {
            best = Some((ratio, fam));
        }
    }
    best.ok_or_else(|| Error::Degenerate("every sampled family had a vanishing kernel product".into()))
}

/// Samples families and witness tuples against the factored display: the
/// nested mixed aggregate over the tuple versus the product of the kernel
/// weak sums and the tuple's gauge mass. Returns the worst ratio; it never
/// exceeds a valid mixing bound `delta` by more than the certificate
/// tolerance.
pub fn multi_characterization_check(
    mi: &MultilinearInstance,
    ball: &SeminormBallModel,
    _delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let (n_a, n_c, n_g) = (mi.joint_a(), mi.joint_c(), mi.joint_g());
    if ball.coeff().len() != n_a * n_c * n_g {
        return Err(Error::Model(format!(
            "model has {} coefficient rows, instance has {} joint probes",
            ball.coeff().len(),
            n_a * n_c * n_g
        )));
    }
    if ball.vertices().len() != mi.n_w {
        return Err(Error::Model(format!(
            "instance has {} mix points, ball has {} vertices",
            mi.n_w,
            ball.vertices().len()
        )));
    }
    // The joint mix tensor must agree with the linear model on the vertices.
    for ja in 0..n_a {
        for jc in 0..n_c {
            for jg in 0..n_g {
                let probe = (ja * n_c + jc) * n_g + jg;
                let row = mi.mix_row_abs(ja, jc, jg);
                for (w, vertex) in ball.vertices().iter().enumerate() {
                    let expected = ball.mix_at(probe, vertex).abs();
                    if (expected - row[w]).abs() > 1e-9 {
                        return Err(Error::Model(format!(
                            "mix tensor disagrees with the linear model at probe {probe}, \
                             vertex {w}"
                        )));
                    }
                }
            }
        }
    }
    let q = mi.exponents.q();
    let s = mi.exponents.s();
    let mut max_ratio = 0.0_f64;

    let mut evaluate = |fam: &WeightedFamily, tuple: &[Vec<f64>]| -> Result<()> {
        let denom = denominator_product(mi, fam)?;
        if denom <= 1e-300 {
            return Ok(());
        }
        let gauges: Vec<f64> = tuple
            .iter()
            .map(|v| ball.gauge(v).map(|g| abs_pow(g, s)))
            .collect::<Result<_>>()?;
        let gauge_mass = pow_recip(pairwise_sum(&gauges), s);
        if !(gauge_mass > 0.0) || !gauge_mass.is_finite() {
            return Ok(());
        }
        let mut outer = Vec::with_capacity(fam.len());
        for it in fam.items() {
            let probe = (it.a * n_c + it.c) * n_g + it.g;
            let inner: Vec<f64> =
                tuple.iter().map(|v| abs_pow(ball.mix_at(probe, v), s)).collect();
            outer.push(abs_pow(it.weight, q) * pairwise_sum(&inner).powf(q / s));
        }
        let numerator = pow_recip(pairwise_sum(&outer), q);
        let ratio = numerator / (denom * gauge_mass);
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        Ok(())
    };

    if mi.kernel_count() == 1
        && mi.test_exponents[0] == q
        && mi.n_w <= MAX_SWEEP_POINTS
    {
        if let Ok(flat) = mi.flatten_single_kernel() {
            if let Ok((_, worst_mu)) = mixing_upper_domination(&flat, &mi.exponents, 10) {
                if let Ok((_, dual)) = domination_at(&flat, &worst_mu, &mi.exponents) {
                    if let Ok(witness) = witness_from_dual((n_a, n_c, n_g), &dual, q) {
                        let tuple: Vec<Vec<f64>> = worst_mu
                            .weights()
                            .iter()
                            .zip(ball.vertices())
                            .filter(|(&t, _)| t > 1e-15)
                            .map(|(&t, vertex)| {
                                let factor = t.powf(1.0 / s);
                                vertex.iter().map(|x| factor * x).collect()
                            })
                            .collect();
                        if !tuple.is_empty() {
                            evaluate(&witness, &tuple)?;
                        }
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_samples {
        let fam = sample_family(&mut rng, n_a, n_c, n_g, 6);
        let tuple_len = rng.random_range(1..=3usize);
        let mut tuple = Vec::with_capacity(tuple_len);
        for _ in 0..tuple_len {
            if rng.random_bool(0.5) {
                let idx = rng.random_range(0..ball.vertices().len());
                let scale = 10f64.powf(rng.random_range(-1.0..1.0));
                tuple.push(ball.vertices()[idx].iter().map(|x| scale * x).collect());
            } else {
                let v: Vec<f64> = (0..ball.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                tuple.push(v);
            }
        }
        evaluate(&fam, &tuple)?;
    }
    Ok(max_ratio)
}

/// The single-factor reduction. Requires one factor in every list; the
/// resulting instance reproduces every mixing computation of the factored
/// path.
pub fn reduce_single_factor(mi: &MultilinearInstance) -> Result<Instance> {
    if mi.factor_count() != 1 || mi.c_sizes.len() != 1 || mi.kernel_count() != 1 {
        return Err(Error::Parameter(format!(
            "reduction needs a single factor everywhere, got {} domain, {} middle, {} kernel \
             factors",
            mi.factor_count(),
            mi.c_sizes.len(),
            mi.kernel_count()
        )));
    }
    mi.flatten_single_kernel()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::close_rel;
    use crate::mixing::mixing_lower_bound;
    use crate::model::FamilyItem;

    fn single_factor_instance(seed: u64) -> MultilinearInstance {
        MultilinearInstance::random(
            seed,
            vec![3],
            vec![2],
            vec![2],
            vec![3],
            2,
            vec![1.0],
            ExponentParams::qs(1.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_mix_kernel_gives_zero() {
        let mut mi = single_factor_instance(1);
        for v in mi.mix.iter_mut() {
            *v = 0.0;
        }
        let (value, _) = multi_mixing_lower_bound(&mi, 10, 5).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn single_factor_reduction_is_bit_exact() {
        for seed in 0..6u64 {
            let mi = single_factor_instance(seed);
            let inst = reduce_single_factor(&mi).unwrap();
            let (multi, multi_fam) = multi_mixing_lower_bound(&mi, 25, seed ^ 0x9e).unwrap();
            let (single, single_fam) =
                mixing_lower_bound(&inst, &mi.exponents, 1.0, 25, seed ^ 0x9e).unwrap();
            assert_eq!(multi.to_bits(), single.to_bits(), "seed {seed}: {multi} vs {single}");
            assert_eq!(multi_fam.items(), single_fam.items());
        }
    }

    #[test]
    fn constant_second_kernel_factor_matches_hand_formula() {
        // Second kernel identically one at p_2 = q: its weak sum is the
        // plain weight q-sum.
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let mut mi = MultilinearInstance::random(
            7,
            vec![2, 2],
            vec![1],
            vec![1, 1],
            vec![2, 2],
            2,
            vec![1.0, 1.0],
            e,
        )
        .unwrap();
        for v in mi.test_kernels[1].iter_mut() {
            *v = 1.0;
        }
        let fam = WeightedFamily::new(vec![
            FamilyItem { weight: 0.7, a: 0, c: 0, g: 0 },
            FamilyItem { weight: -1.3, a: 3, c: 0, g: 0 },
        ])
        .unwrap();
        let second = kernel_weak_sup(&mi, &fam, 1).unwrap();
        assert!((second - (0.7 + 1.3)).abs() < 1e-12);
        let product = denominator_product(&mi, &fam).unwrap();
        let first = kernel_weak_sup(&mi, &fam, 0).unwrap();
        assert!(close_rel(product, first * second, 1e-12));
    }

    #[test]
    fn growing_any_kernel_never_raises_the_bound() {
        for seed in 0..6u64 {
            let mi = MultilinearInstance::random(
                seed.wrapping_add(50),
                vec![2, 2],
                vec![1],
                vec![1, 1],
                vec![2, 2],
                2,
                vec![1.0, 1.0],
                ExponentParams::qs(1.0, 2.0).unwrap(),
            )
            .unwrap();
            let (base, _) = multi_mixing_lower_bound(&mi, 30, seed).unwrap();
            let mut grown = mi.clone();
            for v in grown.test_kernels[1].iter_mut() {
                *v = v.abs() + 0.3;
            }
            let (after, _) = multi_mixing_lower_bound(&grown, 30, seed).unwrap();
            assert!(after <= base + 1e-9, "seed {seed}: {after} > {base}");
        }
    }

    #[test]
    fn diagonal_routes_agree_at_the_boundary() {
        for seed in 0..10u64 {
            let mi = MultilinearInstance::random(
                seed,
                vec![2, 2],
                vec![1],
                vec![1, 1],
                vec![2, 2],
                3,
                vec![1.0, 1.0],
                ExponentParams::qs(1.0, 1.0).unwrap(),
            )
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = sample_family(&mut rng, mi.joint_a(), mi.joint_c(), mi.joint_g(), 5);
            let closed = family_mixed_norm(&mi, &fam, NormRoute::Closed).unwrap();
            let general = family_mixed_norm(&mi, &fam, NormRoute::Measure).unwrap();
            assert!(
                (closed - general).abs() <= 1e-9 * closed.max(1.0),
                "seed {seed}: {closed} vs {general}"
            );
        }
    }

    #[test]
    fn closed_route_requires_the_diagonal() {
        let mi = single_factor_instance(3);
        let fam = WeightedFamily::new(vec![FamilyItem { weight: 1.0, a: 0, c: 0, g: 0 }]).unwrap();
        assert!(matches!(
            family_mixed_norm(&mi, &fam, NormRoute::Closed),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn reduction_rejects_multiple_factors() {
        let mi = MultilinearInstance::random(
            2,
            vec![2, 2],
            vec![1],
            vec![1, 1],
            vec![2, 2],
            2,
            vec![1.0, 1.0],
            ExponentParams::qs(1.0, 2.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(reduce_single_factor(&mi), Err(Error::Parameter(_))));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let err = MultilinearInstance::new(
            vec![2],
            vec![1],
            vec![1],
            vec![2],
            2,
            vec![vec![0.5; 3]], // wrong length
            vec![0.0; 8],
            vec![1.0],
            e,
        );
        assert!(matches!(err, Err(Error::Invariant(_))));
    }

    #[test]
    fn kernel_exponents_above_q_are_rejected() {
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let err = MultilinearInstance::new(
            vec![2],
            vec![1],
            vec![1],
            vec![2],
            2,
            vec![vec![0.5; 4]],
            vec![0.0; 4],
            vec![1.5],
            e,
        );
        assert!(matches!(err, Err(Error::Parameter(_))));
    }

    #[test]
    fn identity_kernel_single_factor_constant_one() {
        // Shared kernel for test and mix points with q = s: the constant is 1.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let kernel: Vec<f64> = (0..2 * 3).map(|_| rng.random_range(0.2..1.0)).collect();
        let e = ExponentParams::qs(1.5, 1.5).unwrap();
        let mi = MultilinearInstance::new(
            vec![2],
            vec![1],
            vec![1],
            vec![3],
            3,
            vec![kernel.clone()],
            kernel,
            vec![1.5],
            e,
        )
        .unwrap();
        let (value, _) = multi_mixing_lower_bound(&mi, 10, 4).unwrap();
        assert!((value - 1.0).abs() < 1e-9, "value {value}");
    }
}
