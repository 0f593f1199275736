//! Mixing constants and everything built on them: the two-measure
//! domination sweep, certified family lower bounds, the seminorm-ball
//! characterization, and the composition and inclusion checks for layered
//! instances.
//!
//! The central quantity is the mixing constant of an instance at exponents
//! `((s;q), p)`: the best constant turning the weak test-side `p`-sum of any
//! weighted family into its mixed `(s;q)`-norm. For `p = q` it equals the
//! supremum over probability vectors `mu` on the mix points of the smallest
//! domination constant for the derived strength
//! `(sum_w mu_w |mix|^s)^{1/s}` against the test kernel at exponent `q` —
//! a finite max-min computed here by a deterministic grid sweep with
//! simplex-search polish and an exchange step that reoptimizes the measure
//! of the current extremal family.

use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lp::{solve, LpProblem, LpStatus, Sense};
use crate::math::{abs_pow, golden_max, nelder_mead, pairwise_sum, pow_recip};
use crate::mixed::{mixed_norm_lower, mixed_norm_sup_measure, MixedFamilyValues};
use crate::model::{sample_family, weak_sup, Side};
use crate::summing::{pietsch_norm_with_dual, witness_from_dual, DominationCertificate};
use crate::{Error, ExponentParams, Instance, Result, SimplexMeasure, WeightedFamily};

/// Largest mix point set the measure sweep accepts; beyond this the
/// deterministic grid refinement stops being exact enough to certify.
pub const MAX_SWEEP_POINTS: usize = 6;

/// Admissibility tolerance for the layer conditions.
pub const CONDITION_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Two-layer instances
// ---------------------------------------------------------------------------

/// Sizes of a two-layer instance: `(n_a, n_b, n_c, n_c1, n_g, n_k, n_w)`.
pub type TwoLayerSizes = (usize, usize, usize, usize, usize, usize, usize);

/// Data of a composed pair of maps: an inner map from the `A` ground set
/// into `B` (given by `map`) and an outer map evaluated on `B`.
///
/// Tensor layout is row-major like [`Instance`]. The `*_outer` tensors are
/// indexed over `B x C1 x G` (tests and strengths of the outer map), the
/// `*_inner` and `*_composed` tensors over `A x C x G`.
#[derive(Debug, Clone)]
pub struct TwoLayerInstance {
    pub n_a: usize,
    pub n_b: usize,
    pub n_c: usize,
    pub n_c1: usize,
    pub n_g: usize,
    pub n_k: usize,
    pub n_w: usize,
    /// Index table of the inner map, one entry in `0..n_b` per `a`.
    pub map: Vec<usize>,
    /// Strength of the outer map, `(b, c1, g)`.
    pub strength_outer: Vec<f64>,
    /// Test kernel of the outer map over the mix points, `(b, c1, g, w)`.
    pub test_outer: Vec<f64>,
    /// Strength of the composition, `(a, c, g)`.
    pub strength_composed: Vec<f64>,
    /// Test kernel of the inner map, `(a, c, g, k)`.
    pub test_inner: Vec<f64>,
    /// Mixing kernel of the inner map, `(a, c, g, w)`.
    pub mix_inner: Vec<f64>,
    /// Mixing kernel of the outer map, `(b, c, g, w)`.
    pub mix_outer: Vec<f64>,
    /// Mixing kernel of the composition, `(a, c, g, w)`.
    pub mix_composed: Vec<f64>,
}

impl TwoLayerInstance {
    pub fn new(
        sizes: TwoLayerSizes,
        map: Vec<usize>,
        strength_outer: Vec<f64>,
        test_outer: Vec<f64>,
        strength_composed: Vec<f64>,
        test_inner: Vec<f64>,
        mix_inner: Vec<f64>,
        mix_outer: Vec<f64>,
        mix_composed: Vec<f64>,
    ) -> Result<Self> {
        let (n_a, n_b, n_c, n_c1, n_g, n_k, n_w) = sizes;
        for (name, n) in [
            ("a", n_a),
            ("b", n_b),
            ("c", n_c),
            ("c1", n_c1),
            ("g", n_g),
            ("k", n_k),
            ("w", n_w),
        ] {
            if n == 0 {
                return Err(Error::Invariant(format!("size {name} must be positive")));
            }
        }
        if map.len() != n_a {
            return Err(Error::Invariant(format!(
                "map table has {} entries for {} domain points",
                map.len(),
                n_a
            )));
        }
        if let Some(&bad) = map.iter().find(|&&b| b >= n_b) {
            return Err(Error::Index(format!("map sends a domain point to {bad} >= {n_b}")));
        }
        let shape = |name: &str, data: &[f64], expected: usize| -> Result<()> {
            if data.len() != expected {
                return Err(Error::Invariant(format!(
                    "tensor `{name}` has length {}, expected {expected}",
                    data.len()
                )));
            }
            if data.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invariant(format!("tensor `{name}` has a non-finite entry")));
            }
            Ok(())
        };
        shape("strength_outer", &strength_outer, n_b * n_c1 * n_g)?;
        shape("test_outer", &test_outer, n_b * n_c1 * n_g * n_w)?;
        shape("strength_composed", &strength_composed, n_a * n_c * n_g)?;
        shape("test_inner", &test_inner, n_a * n_c * n_g * n_k)?;
        shape("mix_inner", &mix_inner, n_a * n_c * n_g * n_w)?;
        shape("mix_outer", &mix_outer, n_b * n_c * n_g * n_w)?;
        shape("mix_composed", &mix_composed, n_a * n_c * n_g * n_w)?;
        Ok(Self {
            n_a,
            n_b,
            n_c,
            n_c1,
            n_g,
            n_k,
            n_w,
            map,
            strength_outer,
            test_outer,
            strength_composed,
            test_inner,
            mix_inner,
            mix_outer,
            mix_composed,
        })
    }

    fn outer_index(&self, b: usize, c1: usize, g: usize) -> usize {
        (b * self.n_c1 + c1) * self.n_g + g
    }

    fn inner_index(&self, a: usize, c: usize, g: usize) -> usize {
        (a * self.n_c + c) * self.n_g + g
    }

    /// Requires the declared `c`/`c1` identification to be the identity.
    fn require_c_identification(&self) -> Result<()> {
        if self.n_c != self.n_c1 {
            return Err(Error::Model(format!(
                "conditions identify the two middle ground sets, but sizes differ: {} vs {}",
                self.n_c, self.n_c1
            )));
        }
        Ok(())
    }

    /// Instance of the composed map for summing computations:
    /// composed strength against the inner test kernel.
    pub fn composed_summing_instance(&self) -> Result<Instance> {
        Instance::new(
            (self.n_a, self.n_c, self.n_g, self.n_k, self.n_w),
            self.strength_composed.clone(),
            self.test_inner.clone(),
            self.mix_composed.clone(),
        )
    }

    /// Instance of the outer map for summing computations: outer strength
    /// against the outer test kernel, probed on the mix points.
    pub fn outer_summing_instance(&self) -> Result<Instance> {
        Instance::new(
            (self.n_b, self.n_c1, self.n_g, self.n_w, 1),
            self.strength_outer.clone(),
            self.test_outer.clone(),
            vec![0.0; self.n_b * self.n_c1 * self.n_g],
        )
    }

    /// Instance of the inner map for mixing computations.
    pub fn inner_mixing_instance(&self) -> Result<Instance> {
        let probes = self.n_a * self.n_c * self.n_g;
        Instance::new(
            (self.n_a, self.n_c, self.n_g, self.n_k, self.n_w),
            vec![0.0; probes],
            self.test_inner.clone(),
            self.mix_inner.clone(),
        )
    }

    /// Instance of the outer map for mixing computations; needs the
    /// `c`/`c1` identification.
    pub fn outer_mixing_instance(&self) -> Result<Instance> {
        self.require_c_identification()?;
        let probes = self.n_b * self.n_c1 * self.n_g;
        Instance::new(
            (self.n_b, self.n_c1, self.n_g, self.n_w, self.n_w),
            vec![0.0; probes],
            self.test_outer.clone(),
            self.mix_outer.clone(),
        )
    }

    /// Instance of the composed map for mixing computations.
    pub fn composed_mixing_instance(&self) -> Result<Instance> {
        let probes = self.n_a * self.n_c * self.n_g;
        Instance::new(
            (self.n_a, self.n_c, self.n_g, self.n_k, self.n_w),
            vec![0.0; probes],
            self.test_inner.clone(),
            self.mix_composed.clone(),
        )
    }

    /// Random instance whose tensors satisfy all three layer conditions by
    /// construction: composed tensors shrink the outer ones through the map,
    /// and the inner mixing kernel dominates the mapped outer test kernel.
    /// All entries are nonnegative.
    pub fn random_condition_respecting(seed: u64, sizes: TwoLayerSizes) -> Result<Self> {
        let (n_a, n_b, n_c, n_c1, n_g, n_k, n_w) = sizes;
        if n_c != n_c1 {
            return Err(Error::Model(
                "condition-respecting generation identifies the middle ground sets".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map: Vec<usize> = (0..n_a).map(|_| rng.random_range(0..n_b)).collect();
        let outer_probes = n_b * n_c1 * n_g;
        let inner_probes = n_a * n_c * n_g;
        let strength_outer: Vec<f64> = (0..outer_probes).map(|_| rng.random_range(0.0..1.0)).collect();
        let test_outer: Vec<f64> =
            (0..outer_probes * n_w).map(|_| rng.random_range(0.0..1.0)).collect();
        let test_inner: Vec<f64> =
            (0..inner_probes * n_k).map(|_| rng.random_range(0.05..1.0)).collect();
        let mix_outer: Vec<f64> =
            (0..n_b * n_c * n_g * n_w).map(|_| rng.random_range(0.0..1.0)).collect();

        let mut strength_composed = vec![0.0; inner_probes];
        let mut mix_inner = vec![0.0; inner_probes * n_w];
        let mut mix_composed = vec![0.0; inner_probes * n_w];
        for a in 0..n_a {
            for c in 0..n_c {
                for g in 0..n_g {
                    let inner = (a * n_c + c) * n_g + g;
                    let outer = (map[a] * n_c1 + c) * n_g + g;
                    strength_composed[inner] = strength_outer[outer] * rng.random_range(0.0..1.0);
                    for w in 0..n_w {
                        mix_inner[inner * n_w + w] =
                            test_outer[outer * n_w + w] + rng.random_range(0.0..1.0);
                        mix_composed[inner * n_w + w] =
                            mix_outer[outer * n_w + w] * rng.random_range(0.0..1.0);
                    }
                }
            }
        }
        Self::new(
            sizes,
            map,
            strength_outer,
            test_outer,
            strength_composed,
            test_inner,
            mix_inner,
            mix_outer,
            mix_composed,
        )
    }
}

/// Worst signed violation of one layer condition and where it happens.
/// Nonpositive violations mean the condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub worst_violation: f64,
    pub worst_index: Vec<usize>,
}

/// Report of all three checkable layer conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// Composed strength bounded by the mapped outer strength.
    pub strength_composition: ConditionCheck,
    /// Composed mixing kernel bounded by the mapped outer mixing kernel.
    pub mix_composition: ConditionCheck,
    /// Mapped outer test kernel bounded by the inner mixing kernel.
    pub test_mix_link: ConditionCheck,
}

impl ConditionReport {
    pub fn admissible(&self, tol: f64) -> bool {
        self.strength_composition.worst_violation <= tol
            && self.mix_composition.worst_violation <= tol
            && self.test_mix_link.worst_violation <= tol
    }

    fn first_violated(&self, tol: f64) -> Option<&ConditionCheck> {
        [&self.strength_composition, &self.mix_composition, &self.test_mix_link]
            .into_iter()
            .find(|c| c.worst_violation > tol)
    }
}

/// Evaluates the three layer conditions pointwise and reports the worst
/// signed violation of each, with the offending index tuple.
pub fn check_conditions(two: &TwoLayerInstance) -> Result<ConditionReport> {
    two.require_c_identification()?;
    let mut strength = ConditionCheck {
        name: "strength-composition",
        worst_violation: f64::NEG_INFINITY,
        worst_index: vec![],
    };
    let mut mix = ConditionCheck {
        name: "mix-composition",
        worst_violation: f64::NEG_INFINITY,
        worst_index: vec![],
    };
    let mut link = ConditionCheck {
        name: "test-mix-link",
        worst_violation: f64::NEG_INFINITY,
        worst_index: vec![],
    };
    for a in 0..two.n_a {
        for c in 0..two.n_c {
            for g in 0..two.n_g {
                let inner = two.inner_index(a, c, g);
                let outer = two.outer_index(two.map[a], c, g);
                let v = two.strength_composed[inner] - two.strength_outer[outer];
                if v > strength.worst_violation {
                    strength.worst_violation = v;
                    strength.worst_index = vec![a, c, g];
                }
                for w in 0..two.n_w {
                    let v = two.mix_composed[inner * two.n_w + w]
                        - two.mix_outer[(two.map[a] * two.n_c + c) * two.n_g * two.n_w
                            + g * two.n_w
                            + w];
                    if v > mix.worst_violation {
                        mix.worst_violation = v;
                        mix.worst_index = vec![a, c, g, w];
                    }
                    let v = two.test_outer[outer * two.n_w + w] - two.mix_inner[inner * two.n_w + w];
                    if v > link.worst_violation {
                        link.worst_violation = v;
                        link.worst_index = vec![a, c, g, w];
                    }
                }
            }
        }
    }
    Ok(ConditionReport {
        strength_composition: strength,
        mix_composition: mix,
        test_mix_link: link,
    })
}

// ---------------------------------------------------------------------------
// The measure sweep (upper route)
// ---------------------------------------------------------------------------

/// Derived strength of one probe under a measure:
/// `(sum_w mu_w |mix|^s)^{1/s}`.
fn derived_strength(inst: &Instance, mu: &[f64], s: f64) -> Vec<f64> {
    let probes = inst.probe_count();
    let mut out = Vec::with_capacity(probes);
    for r in 0..probes {
        let (a, c, g) = inst.probe_coords(r);
        let terms: Vec<f64> =
            (0..inst.n_w).map(|w| mu[w] * abs_pow(inst.mix(a, c, g, w), s)).collect();
        out.push(pow_recip(pairwise_sum(&terms).max(0.0), s));
    }
    out
}

/// Smallest domination constant of the derived strength against the test
/// kernel at exponent `q`, with its certificate and LP dual.
pub fn domination_at(
    inst: &Instance,
    mu: &SimplexMeasure,
    e: &ExponentParams,
) -> Result<(DominationCertificate, Vec<f64>)> {
    if mu.len() != inst.n_w {
        return Err(Error::Parameter(format!(
            "measure has {} points, instance has {} mix points",
            mu.len(),
            inst.n_w
        )));
    }
    let derived = derived_strength(inst, mu.weights(), e.s());
    let probe_inst = Instance::new(
        (inst.n_a, inst.n_c, inst.n_g, inst.n_k, 1),
        derived,
        inst.test_raw().to_vec(),
        vec![0.0; inst.probe_count()],
    )?;
    pietsch_norm_with_dual(&probe_inst, e.q()).map_err(|err| match err {
        Error::NotSummable(_) => Error::NotMixing(
            "a probe mixes with positive mass but its test row vanishes".into(),
        ),
        other => other,
    })
}

fn delta_at(inst: &Instance, mu: &[f64], e: &ExponentParams) -> Result<f64> {
    let measure = SimplexMeasure::normalized(mu.to_vec())?;
    Ok(domination_at(inst, &measure, e)?.0.constant)
}

/// The mixing constant at `((s;q), q)` as a supremum of domination constants
/// over measures on the mix points, together with the worst measure.
///
/// Deterministic: a barycentric grid with `grid_depth` refinement rounds,
/// a simplex-search polish, and an exchange step that runs the extremal
/// family of the current best measure through the measure-side mixed norm
/// and re-evaluates at its maximizer. Every candidate is evaluated by an
/// exact LP, so the result is always a certified lower bound of the true
/// supremum, converging to it as the depth grows.
pub fn mixing_upper_domination(
    inst: &Instance,
    e: &ExponentParams,
    grid_depth: usize,
) -> Result<(f64, SimplexMeasure)> {
    if e.p() != e.q() {
        return Err(Error::Parameter(
            "the domination route needs p = q; lower bounds cover p < q".into(),
        ));
    }
    let (mut best_val, mut best_mu) =
        sweep_simplex_max(inst.n_w, grid_depth, |mu| delta_at(inst, mu, e))?;

    // Exchange rounds: the LP dual at the current best measure is an
    // extremal family; maximizing that family's measure objective proposes
    // the next candidate.
    for _ in 0..5 {
        let measure = SimplexMeasure::normalized(best_mu.clone())?;
        let (_, dual) = domination_at(inst, &measure, e)?;
        let Ok(witness) = witness_from_dual((inst.n_a, inst.n_c, inst.n_g), &dual, e.q()) else {
            break;
        };
        let vals = MixedFamilyValues::from_instance(inst, &witness)?;
        let proposal = match mixed_norm_sup_measure(&vals, e) {
            Ok(result) => result.measure,
            Err(Error::Convergence { .. }) => break,
            Err(other) => return Err(other),
        };
        let val = delta_at(inst, proposal.weights(), e)?;
        if val > best_val * (1.0 + 1e-14) {
            best_val = val;
            best_mu = proposal.weights().to_vec();
        } else {
            break;
        }
    }

    Ok((best_val, SimplexMeasure::normalized(best_mu)?))
}

/// Deterministic maximization of an evaluation over the `n_w`-point
/// probability simplex: dense scan plus golden refinement in one dimension,
/// a barycentric grid with shrinking mass transfers in higher dimensions,
/// then a simplex-search polish in softmax coordinates. Used by the
/// domination sweep and by the direct adapter routes, which supply their own
/// evaluations.
pub fn sweep_simplex_max(
    n_w: usize,
    grid_depth: usize,
    mut eval: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<(f64, Vec<f64>)> {
    if n_w > MAX_SWEEP_POINTS {
        return Err(Error::Parameter(format!(
            "measure sweep supports at most {MAX_SWEEP_POINTS} mix points, got {n_w}"
        )));
    }
    if n_w == 1 {
        return Ok((eval(&[1.0])?, vec![1.0]));
    }

    let mut best_mu: Vec<f64>;
    let mut best_val: f64;

    if n_w == 2 {
        // One-dimensional sweep: dense scan plus windowed golden refinement
        // around the leading cells.
        let coarse = (8 * grid_depth).clamp(24, 64);
        let mut samples = Vec::with_capacity(coarse + 1);
        for i in 0..=coarse {
            let t = i as f64 / coarse as f64;
            samples.push((eval(&[t, 1.0 - t])?, t));
        }
        samples.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite values"));
        best_val = samples[0].0;
        best_mu = vec![samples[0].1, 1.0 - samples[0].1];
        for &(_, center) in samples.iter().take(3) {
            let half = 1.0 / coarse as f64;
            let lo = (center - half).max(0.0);
            let hi = (center + half).min(1.0);
            let steps = 30 + 8 * grid_depth;
            let (t, val) = golden_max(|t| eval(&[t, 1.0 - t]).unwrap_or(f64::NEG_INFINITY), lo, hi, steps);
            if val > best_val {
                best_val = val;
                best_mu = vec![t, 1.0 - t];
            }
        }
        if best_val == f64::NEG_INFINITY {
            // An evaluation failed inside the refinement; surface the error.
            eval(&[0.5, 0.5])?;
        }
    } else {
        // Barycentric grid, keep the leading cells, refine with shrinking
        // mass transfers.
        let resolution = 4usize;
        let mut candidates = barycentric_grid(n_w, resolution);
        let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
        for mu in candidates.drain(..) {
            let val = eval(&mu)?;
            scored.push((val, mu));
        }
        let keep = (2 * n_w).max(6);
        sort_scored(&mut scored);
        scored.truncate(keep);
        let mut h = 1.0 / resolution as f64;
        for _ in 0..grid_depth {
            h *= 0.5;
            let mut new_points = Vec::new();
            for (_, mu) in &scored {
                for i in 0..n_w {
                    for j in 0..n_w {
                        if i == j {
                            continue;
                        }
                        let d = h.min(mu[j]);
                        if d <= 0.0 {
                            continue;
                        }
                        let mut next = mu.clone();
                        next[i] += d;
                        next[j] -= d;
                        new_points.push(next);
                    }
                }
            }
            for mu in new_points {
                let val = eval(&mu)?;
                scored.push((val, mu));
            }
            sort_scored(&mut scored);
            scored.truncate(keep);
        }
        best_val = scored[0].0;
        best_mu = scored[0].1.clone();
    }

    // Simplex-search polish in softmax coordinates; the one-dimensional
    // sweep is already refined to convergence by the golden sections.
    if n_w > 2 {
        let z0: Vec<f64> = best_mu.iter().map(|&u| (u.max(1e-9)).ln()).collect();
        for step in [0.5, 0.05] {
            let (z, neg) = nelder_mead(
                |z| {
                    let mu = softmax(z);
                    -eval(&mu).unwrap_or(f64::NEG_INFINITY)
                },
                &z0,
                step,
                600,
            );
            if -neg > best_val {
                best_val = -neg;
                best_mu = softmax(&z);
            }
        }
    }

    Ok((best_val, best_mu))
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let top = z.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let exps: Vec<f64> = z.iter().map(|&v| (v - top).exp()).collect();
    let total = pairwise_sum(&exps);
    exps.into_iter().map(|v| v / total).collect()
}

fn sort_scored(scored: &mut [(f64, Vec<f64>)]) {
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite deltas")
            .then_with(|| a.1.partial_cmp(&b.1).expect("finite measures"))
    });
}

/// All barycentric grid points with the given resolution (denominator).
fn barycentric_grid(n: usize, resolution: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::<usize>::new(), resolution)];
    while let Some((prefix, remaining)) = stack.pop() {
        if prefix.len() == n - 1 {
            let mut point: Vec<f64> =
                prefix.iter().map(|&k| k as f64 / resolution as f64).collect();
            point.push(remaining as f64 / resolution as f64);
            out.push(point);
            continue;
        }
        for k in (0..=remaining).rev() {
            let mut next = prefix.clone();
            next.push(k);
            stack.push((next, remaining - k));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Family lower bound
// ---------------------------------------------------------------------------

/// Best sampled ratio of a family's mixed `(s;q)`-norm to its weak test-side
/// `p`-sum — a certified lower bound for the mixing constant. For `p = q`
/// the candidate pool also contains the extremal family of a short
/// domination sweep, which makes the bound converge to the constant.
pub fn mixing_lower_bound(
    inst: &Instance,
    e: &ExponentParams,
    p: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, WeightedFamily)> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Parameter(format!("exponent must be positive and finite, got {p}")));
    }
    if p > e.q() + 1e-15 {
        return Err(Error::Parameter(format!("need p <= q, got p={p}, q={}", e.q())));
    }
    let mut best: Option<(f64, WeightedFamily)> = None;
    // Returns whether the family was evaluated (degenerate test sums are
    // skipped and resampled).
    let consider =
        |fam: WeightedFamily, best: &mut Option<(f64, WeightedFamily)>| -> Result<bool> {
            let denom = weak_sup(inst, &fam, p, Side::Test)?;
            if denom <= 1e-300 {
                return Ok(false);
            }
            let vals = MixedFamilyValues::from_instance(inst, &fam)?;
            let ratio = mixed_norm_lower(&vals, e)? / denom;
            if best.as_ref().map_or(true, |(b, _)| ratio > *b) {
                *best = Some((ratio, fam));
            }
            Ok(true)
        };

    if p == e.q() && inst.n_w <= MAX_SWEEP_POINTS {
        if let Ok((_, worst_mu)) = mixing_upper_domination(inst, e, 8) {
            if let Ok((_, dual)) = domination_at(inst, &worst_mu, e) {
                if let Ok(witness) = witness_from_dual((inst.n_a, inst.n_c, inst.n_g), &dual, e.q())
                {
                    consider(witness, &mut best)?;
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
        let fam = sample_family(&mut rng, inst.n_a, inst.n_c, inst.n_g, 8);
        if consider(fam, &mut best)? {
            produced += 1;
        }
    }
    best.ok_or_else(|| Error::Degenerate("every sampled family had a vanishing test sum".into()))
}

// ---------------------------------------------------------------------------
// Seminorm-ball characterization
// ---------------------------------------------------------------------------

/// A finite-dimensional witness space with a polytopal unit ball and a mix
/// kernel that is linear in the witness variable.
///
/// `coeff` holds one vector per probe (row-major over `A x C x G`);
/// the instance's mix value at vertex `w` must equal `coeff . vertex_w`.
/// Linearity makes the kernel homogeneous in the witness, so the ball
/// supremum is attained at the vertices.
#[derive(Debug, Clone)]
pub struct SeminormBallModel {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    coeff: Vec<Vec<f64>>,
}

impl SeminormBallModel {
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>, coeff: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invariant("witness dimension must be positive".into()));
        }
        if vertices.is_empty() {
            return Err(Error::Invariant("the ball needs at least one vertex pair".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Invariant(format!(
                    "vertex {i} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
        }
        for (i, v) in coeff.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Invariant(format!(
                    "coefficient row {i} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
        }
        let model = Self { dim, vertices, coeff };
        for (i, v) in model.vertices.iter().enumerate() {
            let negated: Vec<f64> = v.iter().map(|x| -x).collect();
            let has_mirror = model.vertices.iter().any(|u| {
                u.iter().zip(&negated).all(|(a, b)| (a - b).abs() <= 1e-12)
            });
            if !has_mirror {
                return Err(Error::Invariant(format!(
                    "vertex list is not symmetric: vertex {i} has no mirror"
                )));
            }
        }
        for (i, v) in model.vertices.iter().enumerate() {
            let gauge = model.gauge(v)?;
            if (gauge - 1.0).abs() > 1e-9 {
                return Err(Error::Invariant(format!(
                    "vertex {i} evaluates to gauge {gauge}, expected 1"
                )));
            }
        }
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn coeff(&self) -> &[Vec<f64>] {
        &self.coeff
    }

    /// Minkowski gauge of the vertex hull: the smallest `t` with
    /// `v in t * ball`, by LP over vertex combinations. Infinite when `v`
    /// is outside the span.
    pub fn gauge(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim {
            return Err(Error::Parameter(format!(
                "point has dimension {}, expected {}",
                v.len(),
                self.dim
            )));
        }
        let n = self.vertices.len();
        let rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|d| (0..n).map(|i| self.vertices[i][d]).collect())
            .collect();
        let problem = LpProblem::new(
            vec![1.0; n],
            rows,
            vec![Sense::Eq; self.dim],
            v.to_vec(),
        );
        let sol = solve(&problem)?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.objective),
            LpStatus::Infeasible => Ok(f64::INFINITY),
            LpStatus::Unbounded => Err(Error::SolverFailure {
                iterations: sol.iterations,
                detail: "gauge LP reported unbounded".into(),
            }),
        }
    }

    /// Kernel value of one probe at an arbitrary witness point.
    pub fn mix_at(&self, probe: usize, v: &[f64]) -> f64 {
        let terms: Vec<f64> = self.coeff[probe].iter().zip(v).map(|(c, x)| c * x).collect();
        pairwise_sum(&terms)
    }

    /// Checks that an instance's mix tensor agrees with the linear model on
    /// the vertex discretization.
    pub fn matches_instance(&self, inst: &Instance) -> Result<()> {
        if inst.n_w != self.vertices.len() {
            return Err(Error::Model(format!(
                "instance has {} mix points, ball has {} vertices",
                inst.n_w,
                self.vertices.len()
            )));
        }
        if self.coeff.len() != inst.probe_count() {
            return Err(Error::Model(format!(
                "model has {} coefficient rows, instance has {} probes",
                self.coeff.len(),
                inst.probe_count()
            )));
        }
        for r in 0..inst.probe_count() {
            let (a, c, g) = inst.probe_coords(r);
            for (w, vertex) in self.vertices.iter().enumerate() {
                let expected = self.mix_at(r, vertex);
                let got = inst.mix(a, c, g, w);
                if (expected - got).abs() > 1e-9 {
                    return Err(Error::Model(format!(
                        "mix tensor disagrees with the linear model at probe {r}, vertex {w}: \
                         {got} vs {expected}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Instance whose mix tensor is the model evaluated on its vertices.
    pub fn build_instance(
        &self,
        sizes: (usize, usize, usize, usize),
        strength: Vec<f64>,
        test: Vec<f64>,
    ) -> Result<Instance> {
        let (n_a, n_c, n_g, n_k) = sizes;
        let probes = n_a * n_c * n_g;
        if self.coeff.len() != probes {
            return Err(Error::Model(format!(
                "model has {} coefficient rows, sizes give {} probes",
                self.coeff.len(),
                probes
            )));
        }
        let n_w = self.vertices.len();
        let mut mix = vec![0.0; probes * n_w];
        for r in 0..probes {
            for (w, vertex) in self.vertices.iter().enumerate() {
                mix[r * n_w + w] = self.mix_at(r, vertex);
            }
        }
        Instance::new((n_a, n_c, n_g, n_k, n_w), strength, test, mix)
    }
}

/// Samples families and witness tuples and returns the worst ratio of the
/// nested mixed aggregate to the product of the weak test sum and the tuple's
/// gauge mass — the two sides of the seminorm-ball characterization. The
/// result never exceeds any valid mixing bound `delta` by more than the
/// certificate tolerance; for `p = q` the pool includes the extremal pair of
/// a domination sweep, so the maximum converges to the constant itself.
pub fn check_seminorm_characterization(
    inst: &Instance,
    ball: &SeminormBallModel,
    e: &ExponentParams,
    p: f64,
    _delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    ball.matches_instance(inst)?;
    if !(p > 0.0) || !p.is_finite() || p > e.q() + 1e-15 {
        return Err(Error::Parameter(format!("need 0 < p <= q, got p={p}, q={}", e.q())));
    }
    let q = e.q();
    let s = e.s();
    let mut max_ratio = 0.0_f64;

    let mut evaluate = |fam: &WeightedFamily, tuple: &[Vec<f64>]| -> Result<()> {
        let denom_test = weak_sup(inst, fam, p, Side::Test)?;
        if denom_test <= 1e-300 {
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
            let probe = inst.probe_index(it.a, it.c, it.g);
            let inner: Vec<f64> =
                tuple.iter().map(|v| abs_pow(ball.mix_at(probe, v), s)).collect();
            let inner_sum = pairwise_sum(&inner);
            outer.push(abs_pow(it.weight, q) * inner_sum.powf(q / s));
        }
        let numerator = pow_recip(pairwise_sum(&outer), q);
        let ratio = numerator / (denom_test * gauge_mass);
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        Ok(())
    };

    // Extremal pair from the domination sweep: the dual witness family and
    // the tuple realization of the worst measure.
    if p == q && inst.n_w <= MAX_SWEEP_POINTS {
        if let Ok((_, worst_mu)) = mixing_upper_domination(inst, e, 10) {
            if let Ok((_, dual)) = domination_at(inst, &worst_mu, e) {
                if let Ok(witness) = witness_from_dual((inst.n_a, inst.n_c, inst.n_g), &dual, q) {
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

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_samples {
        let fam = sample_family(&mut rng, inst.n_a, inst.n_c, inst.n_g, 6);
        let tuple_len = rng.random_range(1..=3usize);
        let mut tuple = Vec::with_capacity(tuple_len);
        for _ in 0..tuple_len {
            if rng.random_bool(0.5) {
                let idx = rng.random_range(0..ball.vertices().len());
                let scale = 10f64.powf(rng.random_range(-1.0..1.0));
                tuple.push(ball.vertices()[idx].iter().map(|x| scale * x).collect());
            } else {
                let v: Vec<f64> =
                    (0..ball.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                tuple.push(v);
            }
        }
        evaluate(&fam, &tuple)?;
    }
    Ok(max_ratio)
}

// ---------------------------------------------------------------------------
// Composition and inclusion checks
// ---------------------------------------------------------------------------

fn require_admissible(
    report: &ConditionReport,
    which: &[&'static str],
) -> Result<()> {
    if let Some(check) = report.first_violated(CONDITION_TOL) {
        if which.contains(&check.name) {
            return Err(Error::ConditionViolated {
                condition: check.name,
                violation: check.worst_violation,
                index: check.worst_index.clone(),
            });
        }
    }
    Ok(())
}

/// Composition with a summing outer map: the composed summing norm at `q`
/// is bounded by the outer summing norm at `s` times the inner mixing
/// constant at `((s;q), q)`. Returns both sides and the verdict.
pub fn check_composition_summing(
    two: &TwoLayerInstance,
    e: &ExponentParams,
    grid_depth: usize,
) -> Result<(f64, f64, bool)> {
    let report = check_conditions(two)?;
    require_admissible(&report, &["strength-composition", "test-mix-link"])?;
    let lhs =
        crate::summing::pietsch_norm(&two.composed_summing_instance()?, e.q())?.constant;
    let outer = crate::summing::pietsch_norm(&two.outer_summing_instance()?, e.s())?.constant;
    let (inner_mixing, _) = mixing_upper_domination(&two.inner_mixing_instance()?, e, grid_depth)?;
    let rhs = outer * inner_mixing;
    let holds = lhs <= rhs + 1e-6 * rhs.abs().max(1.0);
    Ok((lhs, rhs, holds))
}

/// Inclusion between exponent regimes: widening `(s;q)` to `(s1;q1)` with
/// `q1 <= q2 <= s2 <= s1` never shrinks the class, so the constant at the
/// narrower pair is dominated by the constant at the wider pair. Each
/// supremum is also evaluated at the other's worst measure, which makes the
/// pointwise ordering of the two objectives carry over to the computed
/// values.
pub fn check_inclusion(
    inst: &Instance,
    e1: &ExponentParams,
    e2: &ExponentParams,
    grid_depth: usize,
) -> Result<(f64, f64, bool)> {
    if !(e1.q() <= e2.q() && e2.q() <= e2.s() && e2.s() <= e1.s()) {
        return Err(Error::Parameter(format!(
            "need q1 <= q2 <= s2 <= s1, got q1={}, q2={}, s2={}, s1={}",
            e1.q(),
            e2.q(),
            e2.s(),
            e1.s()
        )));
    }
    let (v1, mu1) = mixing_upper_domination(inst, e1, grid_depth)?;
    let (v2, mu2) = mixing_upper_domination(inst, e2, grid_depth)?;
    let c1 = v1.max(domination_at(inst, &mu2, e1)?.0.constant);
    let c2 = v2.max(domination_at(inst, &mu1, e2)?.0.constant);
    let holds = c2 <= c1 + 1e-5 * c1.abs().max(1.0);
    Ok((c1, c2, holds))
}

/// Composition of two mixing maps: the composed constant at `((t;q), q)` is
/// bounded by the outer constant at `((t;s), s)` times the inner constant at
/// `((s;q), q)`, for `q <= s <= t`.
pub fn check_composition_mixing(
    two: &TwoLayerInstance,
    q: f64,
    s: f64,
    t: f64,
    grid_depth: usize,
) -> Result<(f64, f64, bool)> {
    if !(q > 0.0 && q <= s && s <= t && t.is_finite()) {
        return Err(Error::Parameter(format!("need 0 < q <= s <= t finite, got ({q}, {s}, {t})")));
    }
    let report = check_conditions(two)?;
    require_admissible(&report, &["mix-composition", "test-mix-link"])?;
    let e_composed = ExponentParams::qs(q, t)?;
    let e_outer = ExponentParams::qs(s, t)?;
    let e_inner = ExponentParams::qs(q, s)?;
    let (lhs, _) = mixing_upper_domination(&two.composed_mixing_instance()?, &e_composed, grid_depth)?;
    let (outer, _) = mixing_upper_domination(&two.outer_mixing_instance()?, &e_outer, grid_depth)?;
    let (inner, _) = mixing_upper_domination(&two.inner_mixing_instance()?, &e_inner, grid_depth)?;
    let rhs = outer * inner;
    let holds = lhs <= rhs + 1e-5 * rhs.abs().max(1.0);
    Ok((lhs, rhs, holds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::close_rel;

    fn identity_kernel_instance(seed: u64, sizes: (usize, usize, usize, usize)) -> Instance {
        // Mix kernel equals test kernel on a shared point set.
        let (n_a, n_c, n_g, n_k) = sizes;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probes = n_a * n_c * n_g;
        let test: Vec<f64> = (0..probes * n_k).map(|_| rng.random_range(0.1..1.0)).collect();
        Instance::new((n_a, n_c, n_g, n_k, n_k), vec![0.0; probes], test.clone(), test).unwrap()
    }

    fn abs_instance(seed: u64, sizes: (usize, usize, usize, usize, usize)) -> Instance {
        let raw = Instance::random(seed, sizes).unwrap();
        Instance::new(
            sizes,
            raw.strength_raw().iter().map(|v| v.abs()).collect(),
            raw.test_raw().iter().map(|v| v.abs() + 0.05).collect(),
            raw.mix_raw().iter().map(|v| v.abs()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_kernels_give_constant_one() {
        for seed in 0..5u64 {
            let inst = identity_kernel_instance(seed, (2, 1, 1, 3));
            let e = ExponentParams::qs(1.5, 1.5).unwrap();
            let (value, _) = mixing_upper_domination(&inst, &e, 8).unwrap();
            assert!((value - 1.0).abs() < 1e-9, "seed {seed}: {value}");
            let (lower, _) = mixing_lower_bound(&inst, &e, 1.5, 10, seed).unwrap();
            assert!((lower - 1.0).abs() < 1e-9, "seed {seed}: {lower}");
        }
    }

    #[test]
    fn zero_mix_kernel_gives_zero() {
        let inst = Instance::new(
            (2, 1, 1, 2, 2),
            vec![0.0; 2],
            vec![0.3, 0.8, 0.5, 0.4],
            vec![0.0; 4],
        )
        .unwrap();
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let (lower, _) = mixing_lower_bound(&inst, &e, 1.0, 8, 3).unwrap();
        assert_eq!(lower, 0.0);
        let (upper, _) = mixing_upper_domination(&inst, &e, 6).unwrap();
        assert_eq!(upper, 0.0);
    }

    #[test]
    fn one_point_mix_set_collapses_to_domination() {
        let inst = abs_instance(11, (2, 2, 1, 3, 1));
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let (value, mu) = mixing_upper_domination(&inst, &e, 6).unwrap();
        assert_eq!(mu.weights(), &[1.0]);
        // Collapsed instance: strength is the single mix column.
        let collapsed = Instance::new(
            (2, 2, 1, 3, 1),
            inst.mix_raw().to_vec(),
            inst.test_raw().to_vec(),
            vec![0.0; 4],
        )
        .unwrap();
        let direct = crate::summing::pietsch_norm(&collapsed, 1.0).unwrap().constant;
        assert!(close_rel(value, direct, 1e-12));
    }

    #[test]
    fn sandwich_on_two_point_instances() {
        for seed in 0..12u64 {
            let inst = abs_instance(seed.wrapping_mul(31).wrapping_add(7), (2, 1, 1, 2, 2));
            let e = ExponentParams::qs(1.0, 2.0).unwrap();
            let (upper, worst_mu) = mixing_upper_domination(&inst, &e, 10).unwrap();
            let (lower, _) = mixing_lower_bound(&inst, &e, 1.0, 30, seed).unwrap();
            assert!(
                lower <= upper + 1e-6 * upper.max(1.0),
                "seed {seed}: lower {lower} above upper {upper}"
            );
            assert!(
                close_rel(lower, upper, 0.05),
                "seed {seed}: {lower} vs {upper} not within 5%"
            );
            let (cert, _) = domination_at(&inst, &worst_mu, &e).unwrap();
            assert!(cert.max_violation <= 1e-9);
        }
    }

    #[test]
    fn conditions_hold_by_construction() {
        for seed in 0..10u64 {
            let two =
                TwoLayerInstance::random_condition_respecting(seed, (3, 2, 2, 2, 1, 2, 2)).unwrap();
            let report = check_conditions(&two).unwrap();
            assert!(report.admissible(0.0), "seed {seed}: {report:?}");
            // Deterministic report.
            let again = check_conditions(&two).unwrap();
            assert_eq!(report, again);
        }
    }

    #[test]
    fn forced_violation_is_reported_with_index() {
        let mut two =
            TwoLayerInstance::random_condition_respecting(5, (2, 2, 1, 1, 1, 2, 2)).unwrap();
        for (i, v) in two.strength_composed.iter_mut().enumerate() {
            *v = two.strength_outer[(two.map[i / 1] * 1) * 1] + 1.0;
        }
        let report = check_conditions(&two).unwrap();
        assert!((report.strength_composition.worst_violation - 1.0).abs() < 1e-12);
        assert!(!report.admissible(CONDITION_TOL));
        let err = check_composition_summing(&two, &ExponentParams::qs(1.0, 2.0).unwrap(), 6);
        assert!(matches!(err, Err(Error::ConditionViolated { condition: "strength-composition", .. })));
    }

    #[test]
    fn composed_summing_respects_the_factorization() {
        for seed in 0..20u64 {
            let two =
                TwoLayerInstance::random_condition_respecting(seed, (3, 2, 2, 2, 1, 2, 2)).unwrap();
            let e = ExponentParams::qs(1.0, 2.0).unwrap();
            let (lhs, rhs, holds) = check_composition_summing(&two, &e, 10).unwrap();
            assert!(holds, "seed {seed}: lhs {lhs} vs rhs {rhs}");
        }
    }

    #[test]
    fn summing_composition_identity_layers_meet_exactly() {
        // All tensors equal through identity identifications on a shared
        // point set at s = q: the inner mixing constant is 1, so both sides
        // of the factorization coincide.
        let n = 2usize;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let strength: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
        let kernel: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.2..1.0)).collect();
        let two = TwoLayerInstance::new(
            (n, n, 1, 1, 1, n, n),
            (0..n).collect(),
            strength.clone(),
            kernel.clone(),
            strength,
            kernel.clone(),
            kernel.clone(),
            kernel.clone(),
            kernel,
        )
        .unwrap();
        let e = ExponentParams::qs(1.5, 1.5).unwrap();
        let (lhs, rhs, holds) = check_composition_summing(&two, &e, 8).unwrap();
        assert!(holds);
        assert!(close_rel(lhs, rhs, 1e-9), "lhs {lhs} vs rhs {rhs}");
    }

    #[test]
    fn zero_composed_strength_is_always_dominated() {
        let mut two =
            TwoLayerInstance::random_condition_respecting(9, (2, 2, 1, 1, 1, 2, 2)).unwrap();
        for v in two.strength_composed.iter_mut() {
            *v = 0.0;
        }
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let (lhs, _, holds) = check_composition_summing(&two, &e, 6).unwrap();
        assert_eq!(lhs, 0.0);
        assert!(holds);
    }

    #[test]
    fn inclusion_is_reflexive_and_holds_on_random_instances() {
        let inst = abs_instance(3, (2, 2, 1, 2, 2));
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let (c1, c2, holds) = check_inclusion(&inst, &e, &e, 8).unwrap();
        assert!(holds);
        assert!(close_rel(c1, c2, 1e-12));

        for seed in 0..15u64 {
            let inst = abs_instance(seed.wrapping_add(100), (2, 2, 1, 2, 2));
            let wide = ExponentParams::qs(1.0, 3.0).unwrap();
            let narrow = ExponentParams::qs(1.5, 2.0).unwrap();
            let (c1, c2, holds) = check_inclusion(&inst, &wide, &narrow, 8).unwrap();
            assert!(holds, "seed {seed}: c1 {c1} vs c2 {c2}");
        }
    }

    #[test]
    fn inclusion_on_identity_instance_stays_at_one() {
        // On the shared-kernel instance both diagonal constants are exactly 1.
        let inst = identity_kernel_instance(2, (2, 1, 1, 3));
        let diag = ExponentParams::qs(1.5, 1.5).unwrap();
        let (c1, c2, holds) = check_inclusion(&inst, &diag, &diag, 8).unwrap();
        assert!(holds);
        assert!((c1 - 1.0).abs() < 1e-9, "c1 {c1}");
        assert!((c2 - 1.0).abs() < 1e-9, "c2 {c2}");
    }

    #[test]
    fn exponent_order_is_validated() {
        let inst = abs_instance(1, (2, 1, 1, 2, 2));
        let e1 = ExponentParams::qs(1.0, 2.0).unwrap();
        let e2 = ExponentParams::qs(0.5, 3.0).unwrap();
        assert!(matches!(check_inclusion(&inst, &e1, &e2, 6), Err(Error::Parameter(_))));
    }

    #[test]
    fn mixing_composition_identity_layers() {
        // All tensors equal through the identity map and a shared point set.
        let n = 2usize;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let kernel: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.2..1.0)).collect();
        let strength: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
        let two = TwoLayerInstance::new(
            (n, n, 1, 1, 1, n, n),
            (0..n).collect(),
            strength.clone(),
            kernel.clone(),
            strength,
            kernel.clone(),
            kernel.clone(),
            kernel.clone(),
            kernel,
        )
        .unwrap();
        let (lhs, rhs, holds) = check_composition_mixing(&two, 1.5, 1.5, 1.5, 8).unwrap();
        assert!(holds);
        assert!((lhs - 1.0).abs() < 1e-9, "lhs {lhs}");
        assert!((rhs - 1.0).abs() < 1e-9, "rhs {rhs}");
    }

    #[test]
    fn mixing_composition_zero_composed_kernel() {
        let mut two =
            TwoLayerInstance::random_condition_respecting(13, (2, 2, 1, 1, 1, 2, 2)).unwrap();
        for v in two.mix_composed.iter_mut() {
            *v = 0.0;
        }
        let (lhs, _, holds) = check_composition_mixing(&two, 1.0, 2.0, 4.0, 6).unwrap();
        assert_eq!(lhs, 0.0);
        assert!(holds);
    }

    #[test]
    fn mixing_composition_on_random_instances() {
        for seed in 0..20u64 {
            let two =
                TwoLayerInstance::random_condition_respecting(seed ^ 0x77, (3, 2, 2, 2, 1, 2, 2))
                    .unwrap();
            let (lhs, rhs, holds) = check_composition_mixing(&two, 1.0, 2.0, 4.0, 10).unwrap();
            assert!(holds, "seed {seed}: lhs {lhs} vs rhs {rhs}");
        }
    }

    fn square_ball(coeff: Vec<Vec<f64>>) -> SeminormBallModel {
        SeminormBallModel::new(
            2,
            vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]],
            coeff,
        )
        .unwrap()
    }

    #[test]
    fn ball_model_validation() {
        // Missing mirror vertex.
        assert!(SeminormBallModel::new(2, vec![vec![1.0, 0.0]], vec![]).is_err());
        // Interior vertex fails the gauge check.
        assert!(SeminormBallModel::new(
            2,
            vec![
                vec![1.0, 1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0],
                vec![0.1, 0.0],
                vec![-0.1, 0.0]
            ],
            vec![]
        )
        .is_err());
        let ball = square_ball(vec![]);
        assert!((ball.gauge(&[0.5, 0.5]).unwrap() - 0.5).abs() < 1e-9);
        assert!((ball.gauge(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_coefficients_give_zero_ratio() {
        let ball = square_ball(vec![vec![0.0, 0.0]; 2]);
        let inst = ball
            .build_instance((2, 1, 1, 2), vec![0.0; 2], vec![0.4, 0.9, 0.7, 0.3])
            .unwrap();
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        let ratio = check_seminorm_characterization(&inst, &ball, &e, 1.0, 1.0, 30, 5).unwrap();
        assert_eq!(ratio, 0.0);
    }

    #[test]
    fn characterization_matches_domination_sweep() {
        for seed in 0..6u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(40));
            let coeff: Vec<Vec<f64>> = (0..2)
                .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                .collect();
            let ball = square_ball(coeff);
            let test: Vec<f64> = (0..2 * 3).map(|_| rng.random_range(0.1..1.0)).collect();
            let inst = ball.build_instance((2, 1, 1, 3), vec![0.0; 2], test).unwrap();
            let e = ExponentParams::qs(1.0, 2.0).unwrap();
            let (upper, _) = mixing_upper_domination(&inst, &e, 10).unwrap();
            let ratio =
                check_seminorm_characterization(&inst, &ball, &e, 1.0, upper, 60, seed).unwrap();
            assert!(
                ratio <= upper + 1e-9 * upper.max(1.0),
                "seed {seed}: ratio {ratio} above {upper}"
            );
            assert!(
                close_rel(ratio, upper, 1e-4),
                "seed {seed}: ratio {ratio} vs sweep {upper}"
            );
        }
    }

    #[test]
    fn mismatched_ball_is_rejected() {
        let ball = square_ball(vec![vec![1.0, 0.0]; 2]);
        let inst = Instance::new(
            (2, 1, 1, 2, 4),
            vec![0.0; 2],
            vec![0.5; 4],
            vec![0.9; 8],
        )
        .unwrap();
        assert!(matches!(
            check_seminorm_characterization(
                &inst,
                &ball,
                &ExponentParams::qs(1.0, 2.0).unwrap(),
                1.0,
                1.0,
                5,
                1
            ),
            Err(Error::Model(_))
        ));
    }
}
