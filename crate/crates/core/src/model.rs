//! Instance data, weighted families, simplex measures and the two aggregate
//! evaluations (strong sum, weak sup) that every norm in this crate builds on.
//!
//! An [`Instance`] is the finite universe of one map: ground sets `A x C x G`
//! of probe indices, a strength tensor over the probes, a test kernel
//! evaluated on a finite test point set (standing in for a compact probe
//! space), and a mixing kernel evaluated on a finite mix point set. Entries
//! are stored signed; absolute values are taken at evaluation time, so
//! adapters can store bilinear pairings directly.

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::math::{abs_pow, pairwise_sum, pow_recip};
use crate::{Error, Result};

/// Which kernel a weak supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The test kernel and its point set (the domination side).
    Test,
    /// The mixing kernel and its point set (the measure side).
    Mix,
}

/// One entry of a weighted family: a nonzero weight attached to a probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyItem {
    pub weight: f64,
    pub a: usize,
    pub c: usize,
    pub g: usize,
}

/// An ordered finite family of weighted probes — the quantifier object of
/// every summing and mixing definition.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFamily {
    items: Vec<FamilyItem>,
}

impl WeightedFamily {
    /// All weights must be nonzero and the family nonempty.
    pub fn new(items: Vec<FamilyItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Invariant("a weighted family must have at least one entry".into()));
        }
        for (j, it) in items.iter().enumerate() {
            if it.weight == 0.0 || !it.weight.is_finite() {
                return Err(Error::Invariant(format!(
                    "family weight {j} must be nonzero and finite, got {}",
                    it.weight
                )));
            }
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[FamilyItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Checks all probe indices against an instance's ground sets.
    pub fn validate_against(&self, inst: &Instance) -> Result<()> {
        for (j, it) in self.items.iter().enumerate() {
            if it.a >= inst.n_a || it.c >= inst.n_c || it.g >= inst.n_g {
                return Err(Error::Index(format!(
                    "family entry {j} points at probe ({}, {}, {}) outside {}x{}x{}",
                    it.a, it.c, it.g, inst.n_a, inst.n_c, inst.n_g
                )));
            }
        }
        Ok(())
    }
}

/// A probability vector on a finite point set — the stand-in for a Borel
/// probability measure on a discretized compact space.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMeasure {
    weights: Vec<f64>,
}

impl SimplexMeasure {
    const SUM_TOL: f64 = 1e-12;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Invariant("a measure needs at least one point".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::Invariant(format!("measure weight {i} must be >= 0, got {w}")));
            }
        }
        let total = pairwise_sum(&weights);
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::Invariant(format!(
                "measure weights must sum to 1 within {}, got {total}",
                Self::SUM_TOL
            )));
        }
        Ok(Self { weights })
    }

    /// Normalizes a nonnegative vector with positive mass.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let total = pairwise_sum(&weights);
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Invariant(format!("cannot normalize mass {total}")));
        }
        for w in &mut weights {
            *w /= total;
        }
        // Repair the last rounding ulp so the sum invariant holds exactly.
        let drift = 1.0 - pairwise_sum(&weights);
        if let Some(max_idx) = (0..weights.len()).max_by(|&i, &j| {
            weights[i].partial_cmp(&weights[j]).expect("finite weights")
        }) {
            weights[max_idx] += drift;
        }
        Self::new(weights)
    }

    /// Point mass at `point` on an `n`-point set.
    pub fn dirac(point: usize, n: usize) -> Result<Self> {
        if point >= n {
            return Err(Error::Index(format!("dirac point {point} outside set of size {n}")));
        }
        let mut weights = vec![0.0; n];
        weights[point] = 1.0;
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invariant("a measure needs at least one point".into()));
        }
        Self::normalized(vec![1.0; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Finite ground sets plus the three kernel tensors of one map.
///
/// Tensor layout is row-major: `strength[(a * n_c + c) * n_g + g]`,
/// `test[probe * n_k + k]`, `mix[probe * n_w + w]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n_a: usize,
    pub n_c: usize,
    pub n_g: usize,
    pub n_k: usize,
    pub n_w: usize,
    strength: Vec<f64>,
    test: Vec<f64>,
    mix: Vec<f64>,
}

impl Instance {
    pub fn new(
        sizes: (usize, usize, usize, usize, usize),
        strength: Vec<f64>,
        test: Vec<f64>,
        mix: Vec<f64>,
    ) -> Result<Self> {
        let (n_a, n_c, n_g, n_k, n_w) = sizes;
        for (name, n) in [("a", n_a), ("c", n_c), ("g", n_g), ("k", n_k), ("w", n_w)] {
            if n == 0 {
                return Err(Error::Invariant(format!("size {name} must be positive")));
            }
        }
        let probes = n_a * n_c * n_g;
        check_tensor("strength", &strength, probes)?;
        check_tensor("test", &test, probes * n_k)?;
        check_tensor("mix", &mix, probes * n_w)?;
        Ok(Self { n_a, n_c, n_g, n_k, n_w, strength, test, mix })
    }

    pub fn probe_count(&self) -> usize {
        self.n_a * self.n_c * self.n_g
    }

    /// Row-major probe index.
    pub fn probe_index(&self, a: usize, c: usize, g: usize) -> usize {
        (a * self.n_c + c) * self.n_g + g
    }

    /// Inverse of [`Instance::probe_index`].
    pub fn probe_coords(&self, idx: usize) -> (usize, usize, usize) {
        let g = idx % self.n_g;
        let rest = idx / self.n_g;
        (rest / self.n_c, rest % self.n_c, g)
    }

    pub fn strength(&self, a: usize, c: usize, g: usize) -> f64 {
        self.strength[self.probe_index(a, c, g)]
    }

    pub fn test(&self, a: usize, c: usize, g: usize, k: usize) -> f64 {
        self.test[self.probe_index(a, c, g) * self.n_k + k]
    }

    pub fn mix(&self, a: usize, c: usize, g: usize, w: usize) -> f64 {
        self.mix[self.probe_index(a, c, g) * self.n_w + w]
    }

    pub fn strength_raw(&self) -> &[f64] {
        &self.strength
    }

    pub fn test_raw(&self) -> &[f64] {
        &self.test
    }

    pub fn mix_raw(&self) -> &[f64] {
        &self.mix
    }

    /// `|mix|` row of one probe, as a fresh vector.
    pub fn mix_row_abs(&self, a: usize, c: usize, g: usize) -> Vec<f64> {
        let base = self.probe_index(a, c, g) * self.n_w;
        self.mix[base..base + self.n_w].iter().map(|v| v.abs()).collect()
    }

    /// Deterministic random instance with entries uniform in `[-1, 1]`.
    pub fn random(seed: u64, sizes: (usize, usize, usize, usize, usize)) -> Result<Self> {
        let (n_a, n_c, n_g, n_k, n_w) = sizes;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probes = n_a * n_c * n_g;
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let strength = draw(probes);
        let test = draw(probes * n_k);
        let mix = draw(probes * n_w);
        Self::new(sizes, strength, test, mix)
    }
}

fn check_tensor(name: &str, data: &[f64], expected: usize) -> Result<()> {
    if data.len() != expected {
        return Err(Error::Invariant(format!(
            "tensor `{name}` has length {}, expected {expected}",
            data.len()
        )));
    }
    for (i, &v) in data.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Invariant(format!("tensor `{name}` entry {i} is not finite: {v}")));
        }
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Parameter(format!("exponent must be positive and finite, got {p}")));
    }
    Ok(())
}

/// `[sum_j |w_j|^p |strength(a_j, c_j, g_j)|^p]^{1/p}`.
pub fn strong_sum(inst: &Instance, fam: &WeightedFamily, p: f64) -> Result<f64> {
    check_p(p)?;
    fam.validate_against(inst)?;
    let powers: Vec<f64> = fam
        .items()
        .iter()
        .map(|it| abs_pow(it.weight * inst.strength(it.a, it.c, it.g), p))
        .collect();
    Ok(pow_recip(pairwise_sum(&powers), p))
}

/// `max` over the selected point set of `[sum_j |w_j|^p |kernel_j|^p]^{1/p}`.
///
/// The maximum over a finite point set replaces the compact supremum of the
/// continuous setting; on discrete spaces the continuity hypotheses are
/// automatic.
pub fn weak_sup(inst: &Instance, fam: &WeightedFamily, p: f64, side: Side) -> Result<f64> {
    check_p(p)?;
    fam.validate_against(inst)?;
    let points = match side {
        Side::Test => inst.n_k,
        Side::Mix => inst.n_w,
    };
    let mut best = 0.0_f64;
    let mut powers = vec![0.0; fam.len()];
    for point in 0..points {
        for (j, it) in fam.items().iter().enumerate() {
            let kernel = match side {
                Side::Test => inst.test(it.a, it.c, it.g, point),
                Side::Mix => inst.mix(it.a, it.c, it.g, point),
            };
            powers[j] = abs_pow(it.weight * kernel, p);
        }
        best = best.max(pairwise_sum(&powers));
    }
    Ok(pow_recip(best, p))
}

/// Shared family sampler: size uniform in `1..=max_len`, probe indices
/// uniform, `log10 |weight|` uniform on `[-2, 2]`, sign uniform.
///
/// Both the single-map and the multilinear modules sample through this
/// function so that a single-factor multilinear instance consumes the RNG
/// stream exactly like its reduced counterpart.
pub fn sample_family<R: RngExt + ?Sized>(
    rng: &mut R,
    n_a: usize,
    n_c: usize,
    n_g: usize,
    max_len: usize,
) -> WeightedFamily {
    let m = rng.random_range(1..=max_len);
    let mut items = Vec::with_capacity(m);
    for _ in 0..m {
        let a = rng.random_range(0..n_a);
        let c = rng.random_range(0..n_c);
        let g = rng.random_range(0..n_g);
        let exp = rng.random_range(-2.0..2.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        items.push(FamilyItem { weight: sign * 10f64.powf(exp), a, c, g });
    }
    WeightedFamily::new(items).expect("sampled family entries are nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_probe(strength: f64, test: Vec<f64>, mix: Vec<f64>) -> Instance {
        let n_k = test.len();
        let n_w = mix.len();
        Instance::new((1, 1, 1, n_k, n_w), vec![strength], test, mix).unwrap()
    }

    fn item(weight: f64, a: usize) -> FamilyItem {
        FamilyItem { weight, a, c: 0, g: 0 }
    }

    #[test]
    fn strong_sum_zero_kernel() {
        let inst = single_probe(0.0, vec![0.0], vec![0.0]);
        let fam = WeightedFamily::new(vec![item(1.0, 0)]).unwrap();
        assert_eq!(strong_sum(&inst, &fam, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn strong_sum_three_four_five() {
        // |weights| = (1, 1), |strength| values (3, 4), p = 2 -> 5.
        let inst = Instance::new((2, 1, 1, 1, 1), vec![3.0, -4.0], vec![0.0; 2], vec![0.0; 2]).unwrap();
        let fam = WeightedFamily::new(vec![item(1.0, 0), item(1.0, 1)]).unwrap();
        assert!((strong_sum(&inst, &fam, 2.0).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn strong_sum_linear() {
        let inst = Instance::new((2, 1, 1, 1, 1), vec![1.0, 1.0], vec![0.0; 2], vec![0.0; 2]).unwrap();
        let fam = WeightedFamily::new(vec![item(2.0, 0), item(1.0, 1)]).unwrap();
        assert!((strong_sum(&inst, &fam, 1.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn weak_sup_zero_kernel() {
        let inst = single_probe(1.0, vec![0.0, 0.0], vec![0.0]);
        let fam = WeightedFamily::new(vec![item(1.0, 0)]).unwrap();
        assert_eq!(weak_sup(&inst, &fam, 1.0, Side::Test).unwrap(), 0.0);
    }

    #[test]
    fn weak_sup_takes_max_of_column_sums() {
        // Two probes, two test points; |test| columns sum to 1 and 2.
        let inst = Instance::new(
            (2, 1, 1, 2, 1),
            vec![0.0, 0.0],
            vec![1.0, 0.0, 0.0, 2.0],
            vec![0.0; 2],
        )
        .unwrap();
        let fam = WeightedFamily::new(vec![item(1.0, 0), item(1.0, 1)]).unwrap();
        assert!((weak_sup(&inst, &fam, 1.0, Side::Test).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weak_sup_single_element() {
        let inst = single_probe(0.0, vec![2.0, 1.0], vec![0.0]);
        let fam = WeightedFamily::new(vec![item(1.0, 0)]).unwrap();
        assert!((weak_sup(&inst, &fam, 2.0, Side::Test).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_family_is_rejected() {
        let inst = single_probe(1.0, vec![1.0], vec![1.0]);
        let fam = WeightedFamily::new(vec![item(1.0, 3)]).unwrap();
        assert!(matches!(strong_sum(&inst, &fam, 1.0), Err(Error::Index(_))));
        assert!(matches!(weak_sup(&inst, &fam, 1.0, Side::Test), Err(Error::Index(_))));
    }

    #[test]
    fn nonpositive_exponent_is_rejected() {
        let inst = single_probe(1.0, vec![1.0], vec![1.0]);
        let fam = WeightedFamily::new(vec![item(1.0, 0)]).unwrap();
        assert!(matches!(strong_sum(&inst, &fam, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn zero_weight_is_rejected() {
        assert!(WeightedFamily::new(vec![item(0.0, 0)]).is_err());
        assert!(WeightedFamily::new(vec![]).is_err());
    }

    #[test]
    fn measure_invariants() {
        assert!(SimplexMeasure::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexMeasure::new(vec![0.6, 0.5]).is_err());
        assert!(SimplexMeasure::new(vec![-0.1, 1.1]).is_err());
        let d = SimplexMeasure::dirac(1, 3).unwrap();
        assert_eq!(d.weights(), &[0.0, 1.0, 0.0]);
        assert!(SimplexMeasure::dirac(3, 3).is_err());
    }

    #[test]
    fn single_element_family_identities() {
        let inst = single_probe(0.7, vec![0.2, 0.9, 0.4], vec![0.0]);
        let fam = WeightedFamily::new(vec![item(-3.0, 0)]).unwrap();
        let p = 1.7;
        assert!((strong_sum(&inst, &fam, p).unwrap() - 3.0 * 0.7).abs() < 1e-12);
        assert!((weak_sup(&inst, &fam, p, Side::Test).unwrap() - 3.0 * 0.9).abs() < 1e-12);
    }

    #[test]
    fn weak_sup_monotone_in_added_points() {
        // Augmenting the test point set never decreases the weak sup.
        let base = single_probe(0.0, vec![0.5, 0.25], vec![0.0]);
        let bigger = single_probe(0.0, vec![0.5, 0.25, 0.8], vec![0.0]);
        let fam = WeightedFamily::new(vec![item(2.0, 0)]).unwrap();
        let small = weak_sup(&base, &fam, 1.3, Side::Test).unwrap();
        let large = weak_sup(&bigger, &fam, 1.3, Side::Test).unwrap();
        assert!(large >= small);
    }

    proptest! {
        #[test]
        fn aggregates_are_absolutely_homogeneous(
            lambda in 1e-3_f64..1e3,
            weights in proptest::collection::vec(-10.0_f64..10.0, 1..6),
            p in 0.3_f64..3.0,
            seed in 0u64..500,
        ) {
            let weights: Vec<f64> =
                weights.into_iter().map(|w| if w == 0.0 { 1.0 } else { w }).collect();
            let inst = Instance::random(seed, (3, 2, 2, 3, 2)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let items: Vec<FamilyItem> = weights
                .iter()
                .map(|&w| FamilyItem {
                    weight: w,
                    a: rng.random_range(0..3),
                    c: rng.random_range(0..2),
                    g: rng.random_range(0..2),
                })
                .collect();
            let scaled: Vec<FamilyItem> = items
                .iter()
                .map(|it| FamilyItem { weight: lambda * it.weight, ..*it })
                .collect();
            let fam = WeightedFamily::new(items).unwrap();
            let fam_scaled = WeightedFamily::new(scaled).unwrap();

            let s1 = strong_sum(&inst, &fam, p).unwrap();
            let s2 = strong_sum(&inst, &fam_scaled, p).unwrap();
            prop_assert!((s2 - lambda * s1).abs() <= 1e-9 * (1.0 + s2.abs()));

            let w1 = weak_sup(&inst, &fam, p, Side::Test).unwrap();
            let w2 = weak_sup(&inst, &fam_scaled, p, Side::Test).unwrap();
            prop_assert!((w2 - lambda * w1).abs() <= 1e-9 * (1.0 + w2.abs()));
        }

        #[test]
        fn aggregates_ignore_entry_order(
            seed in 0u64..500,
            p in 0.3_f64..3.0,
        ) {
            let inst = Instance::random(seed, (3, 2, 2, 3, 2)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = sample_family(&mut rng, 3, 2, 2, 6);
            let mut rev = fam.items().to_vec();
            rev.reverse();
            let fam_rev = WeightedFamily::new(rev).unwrap();
            let a = strong_sum(&inst, &fam, p).unwrap();
            let b = strong_sum(&inst, &fam_rev, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            let c = weak_sup(&inst, &fam, p, Side::Mix).unwrap();
            let d = weak_sup(&inst, &fam_rev, p, Side::Mix).unwrap();
            prop_assert!((c - d).abs() <= 1e-10 * (1.0 + c.abs()));
        }
    }
}
