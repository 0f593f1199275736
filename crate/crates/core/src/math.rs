//! Small numeric helpers: pairwise summation and power maps that stay
//! accurate for exponents below one.

/// Pairwise (cascade) summation. Error grows like `O(log n)` instead of
/// `O(n)` for naive left-to-right accumulation, which is what keeps the
/// 1e-9 certificate tolerances honest for families up to ~1e4 entries.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `|x|^p` with the power taken in log space when `p < 1`, so that tiny
/// bases do not underflow through `powf`'s argument reduction.
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    if p < 1.0 {
        (p * a.ln()).exp()
    } else {
        a.powf(p)
    }
}

/// Inverse of [`abs_pow`]: `x^{1/p}` for nonnegative `x`.
pub fn pow_recip(x: f64, p: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if p < 1.0 {
        x.powf(1.0 / p)
    } else {
        (x.ln() / p).exp()
    }
}

/// `[sum_i |terms_i|]^{1/p}` over precomputed `p`-th powers.
pub fn root_of_sum(powers: &[f64], p: f64) -> f64 {
    pow_recip(pairwise_sum(powers).max(0.0), p)
}

/// `l_r` norm of a positive vector, `r` may be infinite.
pub fn norm_r(values: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    }
    let powers: Vec<f64> = values.iter().map(|&v| abs_pow(v, r)).collect();
    root_of_sum(&powers, r)
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
/// Deterministic; runs a fixed number of shrink steps.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, steps: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..steps {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx >= fc && fx >= fd {
        (x, fx)
    } else if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Relative closeness at tolerance `tol`, with an absolute floor so that
/// values near zero compare sanely.
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Deterministic Nelder-Mead minimization. The start simplex is `x0` plus
/// `step`-sized coordinate bumps; ties resolve by vertex index, so repeated
/// runs are bit-identical.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    if dim == 0 {
        let v = f(x0);
        return (x0.to_vec(), v);
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f(&x);
        simplex.push((x, v));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() <= 1e-15 * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + gamma * (r - c))
                .collect();
            let fe = f(&expand);
            simplex[dim] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflect, fr);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = f(&contract);
            if fc < worst.1 {
                simplex[dim] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    entry.1 = f(&shrunk);
                    entry.0 = shrunk;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    simplex.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v = [1.0, 2.0, 3.0, 4.5];
        assert_eq!(pairwise_sum(&v), 10.5);
    }

    #[test]
    fn pairwise_beats_naive_on_ill_conditioned_sum() {
        // 1e4 entries summing to exactly n * 0.1; pairwise stays within 1e-12.
        let v = vec![0.1_f64; 10_000];
        let exact = 1000.0;
        assert!((pairwise_sum(&v) - exact).abs() < 1e-10);
    }

    #[test]
    fn abs_pow_round_trips_small_exponents() {
        let x = 1e-200_f64;
        let p = 0.5;
        let y = abs_pow(x, p);
        assert!((pow_recip(y, p) - x).abs() / x < 1e-12);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|t| -(t - 0.3) * (t - 0.3), 0.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx > -1e-18);
    }
}
