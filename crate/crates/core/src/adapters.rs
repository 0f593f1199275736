//! Builders that discretize concrete maps into instances: linear operators
//! between finite-dimensional normed spaces, Lipschitz maps between finite
//! pointed metric spaces, and the canonical evaluation embedding into a
//! weighted power space.
//!
//! Dual balls are discretized by explicit nets declared by the caller. The
//! computed constants are exact for the declared nets; net refinement is an
//! experiment parameter, not something the builders invent. Every adapter
//! also ships a direct route that evaluates the classical two-measure
//! criterion straight from the pairings, so the generic instance machinery
//! can be cross-checked against it on identical discretizations.

use crate::math::{abs_pow, pairwise_sum, pow_recip};
use crate::mixing::{sweep_simplex_max, TwoLayerInstance};
use crate::lp::{solve, LpProblem, LpStatus, Sense};
use crate::summing::pietsch_norm;
use crate::{Error, ExponentParams, Instance, Result, SimplexMeasure};

const NET_TOL: f64 = 1e-12;

/// A linear operator with declared dual-ball nets and domain probes.
///
/// The default space norm on both sides is the max-abs-coordinate norm, so
/// net functionals are validated against the dual 1-norm. Pairings are
/// stored undivided: the defining displays carry the family weights
/// symmetrically on both sides, so folding a weight into the kernels would
/// cancel anyway.
#[derive(Debug, Clone)]
pub struct LinearOperatorSpec {
    /// Row-major matrix of the operator, `dim_out x dim_in`.
    pub matrix: Vec<Vec<f64>>,
    /// Functionals in the unit ball of the domain dual, one per test point.
    pub domain_net: Vec<Vec<f64>>,
    /// Functionals in the unit ball of the codomain dual, one per mix point.
    pub codomain_net: Vec<Vec<f64>>,
    /// Domain probe vectors; the instance quantifies over these.
    pub probes: Vec<Vec<f64>>,
}

impl LinearOperatorSpec {
    /// Validates shapes and net norms. `probes = None` defaults to the
    /// standard basis of the domain.
    pub fn new(
        matrix: Vec<Vec<f64>>,
        domain_net: Vec<Vec<f64>>,
        codomain_net: Vec<Vec<f64>>,
        probes: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::Invariant("the operator matrix must be nonempty".into()));
        }
        let dim_out = matrix.len();
        let dim_in = matrix[0].len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != dim_in {
                return Err(Error::Invariant(format!(
                    "matrix row {i} has {} entries, expected {dim_in}",
                    row.len()
                )));
            }
        }
        if domain_net.is_empty() || codomain_net.is_empty() {
            return Err(Error::Invariant("both nets must be nonempty".into()));
        }
        check_net("domain net", &domain_net, dim_in)?;
        check_net("codomain net", &codomain_net, dim_out)?;
        let probes = probes.unwrap_or_else(|| standard_basis(dim_in));
        if probes.is_empty() {
            return Err(Error::Invariant("the probe set must be nonempty".into()));
        }
        for (i, x) in probes.iter().enumerate() {
            if x.len() != dim_in {
                return Err(Error::Invariant(format!(
                    "probe {i} has dimension {}, expected {dim_in}",
                    x.len()
                )));
            }
        }
        Ok(Self { matrix, domain_net, codomain_net, probes })
    }

    pub fn dim_in(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn dim_out(&self) -> usize {
        self.matrix.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| {
                let terms: Vec<f64> = row.iter().zip(x).map(|(a, b)| a * b).collect();
                pairwise_sum(&terms)
            })
            .collect()
    }
}

/// Signed coordinate functionals, the exact dual-ball extreme points of the
/// max-norm space.
pub fn signed_basis_net(dim: usize) -> Vec<Vec<f64>> {
    let mut net = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut plus = vec![0.0; dim];
        plus[i] = 1.0;
        net.push(plus);
        let mut minus = vec![0.0; dim];
        minus[i] = -1.0;
        net.push(minus);
    }
    net
}

fn standard_basis(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect()
}

fn check_net(name: &str, net: &[Vec<f64>], dim: usize) -> Result<()> {
    for (i, f) in net.iter().enumerate() {
        if f.len() != dim {
            return Err(Error::Invariant(format!(
                "{name} functional {i} has dimension {}, expected {dim}",
                f.len()
            )));
        }
        let dual_norm: f64 = f.iter().map(|v| v.abs()).sum();
        if dual_norm > 1.0 + NET_TOL {
            return Err(Error::Invariant(format!(
                "{name} functional {i} has dual norm {dual_norm}, above 1"
            )));
        }
    }
    Ok(())
}

/// Instance of a linear operator: probes against the domain net on the test
/// side, images against the codomain net on the mix side, and the
/// net-evaluated image norm as strength.
pub fn build_linear_instance(spec: &LinearOperatorSpec) -> Result<Instance> {
    let n_a = spec.probes.len();
    let n_k = spec.domain_net.len();
    let n_w = spec.codomain_net.len();
    let mut strength = Vec::with_capacity(n_a);
    let mut test = Vec::with_capacity(n_a * n_k);
    let mut mix = Vec::with_capacity(n_a * n_w);
    for x in &spec.probes {
        let image = spec.apply(x);
        for functional in &spec.domain_net {
            let terms: Vec<f64> = functional.iter().zip(x).map(|(f, v)| f * v).collect();
            test.push(pairwise_sum(&terms));
        }
        let mut norm = 0.0_f64;
        for functional in &spec.codomain_net {
            let terms: Vec<f64> = functional.iter().zip(&image).map(|(f, v)| f * v).collect();
            let pairing = pairwise_sum(&terms);
            mix.push(pairing);
            norm = norm.max(pairing.abs());
        }
        strength.push(norm);
    }
    Instance::new((n_a, 1, 1, n_k, n_w), strength, test, mix)
}

/// Direct evaluation of the classical two-measure mixing criterion for a
/// linear operator: sup over measures on the codomain net of the smallest
/// constant dominating `(sum_w mu_w |<Tx, b*_w>|^s)^{1/s}` by
/// `(sum_k nu_k |<x, x*_k>|^q)^{1/q}` across the probes. Works straight from
/// the pairings, independently of the instance tensors.
pub fn classical_linear_mixing_constant(
    spec: &LinearOperatorSpec,
    e: &ExponentParams,
    grid_depth: usize,
) -> Result<(f64, SimplexMeasure)> {
    let images: Vec<Vec<f64>> = spec.probes.iter().map(|x| spec.apply(x)).collect();
    let domain_pairings: Vec<Vec<f64>> = spec
        .probes
        .iter()
        .map(|x| {
            spec.domain_net
                .iter()
                .map(|f| {
                    let terms: Vec<f64> = f.iter().zip(x).map(|(a, b)| a * b).collect();
                    pairwise_sum(&terms)
                })
                .collect()
        })
        .collect();
    let codomain_pairings: Vec<Vec<f64>> = images
        .iter()
        .map(|y| {
            spec.codomain_net
                .iter()
                .map(|f| {
                    let terms: Vec<f64> = f.iter().zip(y).map(|(a, b)| a * b).collect();
                    pairwise_sum(&terms)
                })
                .collect()
        })
        .collect();
    classical_sweep(&domain_pairings, &codomain_pairings, e, grid_depth)
}

/// A Lipschitz map between finite pointed metric spaces (base point index 0)
/// with declared Lipschitz-ball nets.
#[derive(Debug, Clone)]
pub struct LipschitzMapSpec {
    /// Domain metric, a full symmetric matrix.
    pub domain_metric: Vec<Vec<f64>>,
    /// Codomain metric.
    pub codomain_metric: Vec<Vec<f64>>,
    /// Point map, one codomain index per domain point.
    pub map: Vec<usize>,
    /// Real functions on the domain points with `f(0) = 0` and `Lip <= 1`.
    pub domain_net: Vec<Vec<f64>>,
    /// Same on the codomain points.
    pub codomain_net: Vec<Vec<f64>>,
}

impl LipschitzMapSpec {
    pub fn new(
        domain_metric: Vec<Vec<f64>>,
        codomain_metric: Vec<Vec<f64>>,
        map: Vec<usize>,
        domain_net: Vec<Vec<f64>>,
        codomain_net: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_metric("domain metric", &domain_metric)?;
        check_metric("codomain metric", &codomain_metric)?;
        let n_x = domain_metric.len();
        let n_y = codomain_metric.len();
        if map.len() != n_x {
            return Err(Error::Invariant(format!(
                "map table has {} entries for {n_x} domain points",
                map.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= n_y) {
            return Err(Error::Index(format!("map sends a point to {bad} >= {n_y}")));
        }
        if domain_net.is_empty() || codomain_net.is_empty() {
            return Err(Error::Invariant("both nets must be nonempty".into()));
        }
        check_lipschitz_net("domain net", &domain_net, &domain_metric)?;
        check_lipschitz_net("codomain net", &codomain_net, &codomain_metric)?;
        Ok(Self { domain_metric, codomain_metric, map, domain_net, codomain_net })
    }

    pub fn domain_points(&self) -> usize {
        self.domain_metric.len()
    }
}

fn check_metric(name: &str, metric: &[Vec<f64>]) -> Result<()> {
    let n = metric.len();
    if n == 0 {
        return Err(Error::Invariant(format!("{name} must be nonempty")));
    }
    for (i, row) in metric.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Invariant(format!("{name} row {i} has {} entries", row.len())));
        }
    }
    for i in 0..n {
        if metric[i][i].abs() > NET_TOL {
            return Err(Error::Invariant(format!("{name} diagonal entry {i} is nonzero")));
        }
        for j in 0..n {
            if metric[i][j] < 0.0 {
                return Err(Error::Invariant(format!("{name} entry ({i}, {j}) is negative")));
            }
            if (metric[i][j] - metric[j][i]).abs() > NET_TOL {
                return Err(Error::Invariant(format!("{name} is not symmetric at ({i}, {j})")));
            }
            for k in 0..n {
                if metric[i][j] > metric[i][k] + metric[k][j] + NET_TOL {
                    return Err(Error::Invariant(format!(
                        "{name} violates the triangle inequality at ({i}, {j}) via {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn check_lipschitz_net(name: &str, net: &[Vec<f64>], metric: &[Vec<f64>]) -> Result<()> {
    let n = metric.len();
    for (idx, f) in net.iter().enumerate() {
        if f.len() != n {
            return Err(Error::Invariant(format!(
                "{name} function {idx} has {} values for {n} points",
                f.len()
            )));
        }
        if f[0].abs() > NET_TOL {
            return Err(Error::Invariant(format!(
                "{name} function {idx} does not vanish at the base point"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if (f[i] - f[j]).abs() > metric[i][j] * (1.0 + NET_TOL) + NET_TOL {
                    return Err(Error::Invariant(format!(
                        "{name} function {idx} has Lipschitz quotient above 1 on ({i}, {j})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The distance-function net `y -> d(y, x) - d(0, x)`, one function per
/// point. Each has Lipschitz constant at most 1 and vanishes at the base.
pub fn distance_net(metric: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = metric.len();
    (0..n)
        .map(|x| (0..n).map(|y| metric[y][x] - metric[0][x]).collect())
        .collect()
}

/// Ordered point pairs `(x', x'')` with distinct entries, the probe set of
/// every Lipschitz instance. Lexicographic order, first coordinate major.
pub fn ordered_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Instance of a Lipschitz map: probes are ordered point pairs, test values
/// are net increments on the domain, mix values are net increments of the
/// image pair, and strength is the image distance.
pub fn build_lipschitz_instance(spec: &LipschitzMapSpec) -> Result<Instance> {
    let pairs = ordered_pairs(spec.domain_points());
    if pairs.is_empty() {
        return Err(Error::Invariant("a one-point domain has no probe pairs".into()));
    }
    let n_a = pairs.len();
    let n_k = spec.domain_net.len();
    let n_w = spec.codomain_net.len();
    let mut strength = Vec::with_capacity(n_a);
    let mut test = Vec::with_capacity(n_a * n_k);
    let mut mix = Vec::with_capacity(n_a * n_w);
    for &(i, j) in &pairs {
        for f in &spec.domain_net {
            test.push(f[i] - f[j]);
        }
        let (yi, yj) = (spec.map[i], spec.map[j]);
        for g in &spec.codomain_net {
            mix.push(g[yi] - g[yj]);
        }
        strength.push(spec.codomain_metric[yi][yj]);
    }
    Instance::new((n_a, 1, 1, n_k, n_w), strength, test, mix)
}

/// Direct evaluation of the classical Lipschitz mixing criterion from the
/// net increments, independent of the instance tensors.
pub fn classical_lipschitz_mixing_constant(
    spec: &LipschitzMapSpec,
    e: &ExponentParams,
    grid_depth: usize,
) -> Result<(f64, SimplexMeasure)> {
    let pairs = ordered_pairs(spec.domain_points());
    let domain_pairings: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| spec.domain_net.iter().map(|f| f[i] - f[j]).collect())
        .collect();
    let codomain_pairings: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| {
            let (yi, yj) = (spec.map[i], spec.map[j]);
            spec.codomain_net.iter().map(|g| g[yi] - g[yj]).collect()
        })
        .collect();
    classical_sweep(&domain_pairings, &codomain_pairings, e, grid_depth)
}

/// Shared classical route: assemble the domination LP straight from pairing
/// tables and sweep the measure simplex.
fn classical_sweep(
    domain_pairings: &[Vec<f64>],
    codomain_pairings: &[Vec<f64>],
    e: &ExponentParams,
    grid_depth: usize,
) -> Result<(f64, SimplexMeasure)> {
    let n_w = codomain_pairings.first().map_or(0, Vec::len);
    let q = e.q();
    let s = e.s();
    let (value, mu) = sweep_simplex_max(n_w, grid_depth, |mu| {
        let mut rows = Vec::with_capacity(domain_pairings.len());
        let mut rhs = Vec::with_capacity(domain_pairings.len());
        for (tests, mixes) in domain_pairings.iter().zip(codomain_pairings) {
            rows.push(tests.iter().map(|&v| abs_pow(v, q)).collect::<Vec<f64>>());
            let terms: Vec<f64> =
                mixes.iter().zip(mu).map(|(&v, &u)| u * abs_pow(v, s)).collect();
            rhs.push(pairwise_sum(&terms).max(0.0).powf(q / s));
        }
        let problem = LpProblem::new(
            vec![1.0; domain_pairings[0].len()],
            rows,
            vec![Sense::Ge; rhs.len()],
            rhs,
        );
        let sol = solve(&problem)?;
        match sol.status {
            LpStatus::Optimal => Ok(pow_recip(sol.objective.max(0.0), q)),
            LpStatus::Infeasible => Err(Error::NotMixing(
                "a probe mixes with positive mass but every domain pairing vanishes".into(),
            )),
            LpStatus::Unbounded => Err(Error::SolverFailure {
                iterations: sol.iterations,
                detail: "classical domination LP reported unbounded".into(),
            }),
        }
    })?;
    Ok((value, SimplexMeasure::normalized(mu)?))
}

/// The canonical evaluation embedding into the weighted `s`-power space over
/// the mix points and measure `mu`.
///
/// The outer layer evaluates coordinates of the mix point set: its test
/// kernel is the indicator pairing, its strength is the measure mass to the
/// power `1/s`, and the composed strength is the measure-averaged mix power
/// `(sum_w mu_w |mix|^s)^{1/s}` — which dominates itself, so the measure
/// inequality of the construction holds with equality. The kernel is gated
/// to zero when the instance's mix tensor vanishes identically.
///
/// Returns the layered instance and the summing norm of the embedding layer
/// at exponent `s`: exactly 1 for a nonzero instance (the measure itself is
/// the cheapest domination) and 0 for the zero instance. The point-map table
/// of the layer is filled with zeros; the embedding composes through the
/// measure, not through a point map.
pub fn build_evaluation_embedding(
    inst: &Instance,
    mu: &SimplexMeasure,
    s: f64,
) -> Result<(TwoLayerInstance, f64)> {
    if mu.len() != inst.n_w {
        return Err(Error::Parameter(format!(
            "measure has {} points, instance has {} mix points",
            mu.len(),
            inst.n_w
        )));
    }
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::Parameter(format!("embedding exponent must satisfy s >= 1, got {s}")));
    }
    let gate = if inst.mix_raw().iter().any(|&v| v != 0.0) { 1.0 } else { 0.0 };
    let (n_a, n_c, n_g, n_k, n_w) = (inst.n_a, inst.n_c, inst.n_g, inst.n_k, inst.n_w);
    let n_b = n_w;
    let outer_probes = n_b * n_c * n_g;
    let mut strength_outer = vec![0.0; outer_probes];
    let mut test_outer = vec![0.0; outer_probes * n_w];
    for b in 0..n_b {
        for c in 0..n_c {
            for g in 0..n_g {
                let probe = (b * n_c + c) * n_g + g;
                strength_outer[probe] = gate * mu.weights()[b].powf(1.0 / s);
                test_outer[probe * n_w + b] = gate;
            }
        }
    }
    let inner_probes = n_a * n_c * n_g;
    let mut strength_composed = vec![0.0; inner_probes];
    for r in 0..inner_probes {
        let (a, c, g) = inst.probe_coords(r);
        let terms: Vec<f64> = (0..n_w)
            .map(|w| mu.weights()[w] * abs_pow(inst.mix(a, c, g, w), s))
            .collect();
        strength_composed[r] = pow_recip(pairwise_sum(&terms).max(0.0), s);
    }
    let layer = TwoLayerInstance::new(
        (n_a, n_b, n_c, n_c, n_g, n_k, n_w),
        vec![0; n_a],
        strength_outer.clone(),
        test_outer.clone(),
        strength_composed,
        inst.test_raw().to_vec(),
        inst.mix_raw().to_vec(),
        test_outer.clone(),
        inst.mix_raw().to_vec(),
    )?;
    let embedding_instance = Instance::new(
        (n_b, n_c, n_g, n_w, 1),
        strength_outer,
        test_outer,
        vec![0.0; outer_probes],
    )?;
    let pi_check = pietsch_norm(&embedding_instance, s)?.constant;
    Ok((layer, pi_check))
}
