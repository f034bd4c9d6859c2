//! Finite Markov chain numerics: stationary laws, irreducibility, time
//! reversal, first-passage matrices of skip-free level processes, and the
//! entropy of a chain observed through a labelling of its states.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Strong connectivity of the positive-entry graph.
pub fn is_irreducible(kernel: &DMatrix<f64>) -> bool {
    let n = kernel.nrows();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let w = if forward { kernel[(u, v)] } else { kernel[(v, u)] };
                if w > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Unique stationary law of an irreducible kernel.
pub fn stationary(kernel: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = kernel.nrows();
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    let mut a = kernel.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular system for the stationary law".into()))?;
    Ok(pi.map(|x| x.max(0.0)))
}

/// Kernel of the time-reversed stationary chain, `P*(a,b) = pi_b P(b,a) / pi_a`.
pub fn reversed(kernel: &DMatrix<f64>, pi: &DVector<f64>) -> DMatrix<f64> {
    let n = kernel.nrows();
    DMatrix::from_fn(n, n, |a, b| if pi[a] > 0.0 { pi[b] * kernel[(b, a)] / pi[a] } else { 0.0 })
}

/// First-passage matrix of a level process that moves down one level with
/// `down`, stays with `local` and moves up with `up` (the three blocks sum to
/// a stochastic matrix). `G[s][t]` is the probability that, started in phase
/// `s`, the process first reaches the level below in phase `t`.
///
/// Solved by logarithmic reduction. The returned bound is the largest row
/// deficit `1 - sum_t G[s][t]`; when the process drifts downwards `G` is
/// stochastic and the deficit bounds the truncation error.
pub fn first_passage(
    down: &DMatrix<f64>,
    local: &DMatrix<f64>,
    up: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, f64)> {
    let n = down.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let inv = |m: DMatrix<f64>| {
        m.try_inverse()
            .ok_or_else(|| Error::Numerical("singular matrix in first-passage solve".into()))
    };
    let base = inv(&id - local)?;
    let mut h = &base * down;
    let mut l = &base * up;
    let mut g = h.clone();
    let mut t = l.clone();
    let deficit = |g: &DMatrix<f64>| {
        g.row_iter().map(|r| 1.0 - r.sum()).fold(0.0f64, |a, b| a.max(b))
    };
    for _ in 0..100 {
        let u = &h * &l + &l * &h;
        let k = inv(&id - u)?;
        h = &k * (&h * &h);
        l = &k * (&l * &l);
        g += &t * &h;
        t = &t * &l;
        if deficit(&g) < 1e-15 || t.amax() < 1e-300 {
            break;
        }
    }
    let err = deficit(&g).max(0.0);
    Ok((g, err))
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Entropy rate of the state chain, `-sum pi_a P_ab log P_ab`.
pub fn state_entropy(kernel: &DMatrix<f64>, pi: &DVector<f64>) -> f64 {
    let n = kernel.nrows();
    (0..n).map(|a| pi[a] * (0..n).map(|b| plogp(kernel[(a, b)])).sum::<f64>()).sum()
}

/// Lower and upper bounds for the entropy rate of the labelled process
/// `Y_t = label(X_t)`: `H(Y_2 | X_1) <= h <= H(Y_n | Y_1..Y_{n-1})`.
pub fn hidden_entropy_bounds(
    kernel: &DMatrix<f64>,
    pi: &DVector<f64>,
    labels: &[usize],
    n_labels: usize,
    n: usize,
) -> (f64, f64) {
    let states = kernel.nrows();
    let lower: f64 = (0..states)
        .map(|a| {
            let mut by_label = vec![0.0; n_labels];
            for b in 0..states {
                by_label[labels[b]] += kernel[(a, b)];
            }
            pi[a] * by_label.into_iter().map(plogp).sum::<f64>()
        })
        .sum();
    let block = |len: usize| block_entropy(kernel, pi, labels, n_labels, len);
    let upper = if n >= 2 { block(n) - block(n - 1) } else { block(1) };
    let upper = upper.min(state_entropy(kernel, pi)).max(lower);
    (lower, upper)
}

/// `H(Y_1..Y_len)` by depth-first enumeration of label words.
fn block_entropy(kernel: &DMatrix<f64>, pi: &DVector<f64>, labels: &[usize], n_labels: usize, len: usize) -> f64 {
    let states = kernel.nrows();
    let mask = |v: &DVector<f64>, c: usize| DVector::from_fn(states, |s, _| if labels[s] == c { v[s] } else { 0.0 });
    let mut total = 0.0;
    let mut stack: Vec<(DVector<f64>, usize)> = (0..n_labels).map(|c| (mask(pi, c), 1)).collect();
    while let Some((v, depth)) = stack.pop() {
        let p = v.sum();
        if p <= 0.0 {
            continue;
        }
        if depth == len {
            total += plogp(p);
            continue;
        }
        let next = kernel.transpose() * &v;
        for c in 0..n_labels {
            stack.push((mask(&next, c), depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_of_two_state_chain() {
        let p = to_matrix(&[vec![0.9, 0.1], vec![0.3, 0.7]]);
        let pi = stationary(&p).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-12 && (pi[1] - 0.25).abs() < 1e-12);
        assert!(is_irreducible(&p));
        assert!(!is_irreducible(&to_matrix(&[vec![1.0, 0.0], vec![0.5, 0.5]])));
    }

    #[test]
    fn first_passage_of_biased_walk() {
        // one phase, down w.p. 0.5, stay 0.2, up 0.3: G is 1 (drift is down)
        let d = DMatrix::from_element(1, 1, 0.5);
        let l = DMatrix::from_element(1, 1, 0.2);
        let u = DMatrix::from_element(1, 1, 0.3);
        let (g, err) = first_passage(&d, &l, &u).unwrap();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-12 && err < 1e-12);
        // reversed roles: first passage probability is 0.3/0.5
        let (g, _) = first_passage(&u, &l, &d).unwrap();
        assert!((g[(0, 0)] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn hidden_entropy_of_injective_labels_is_exact() {
        let p = to_matrix(&[vec![0.5, 0.5], vec![0.2, 0.8]]);
        let pi = stationary(&p).unwrap();
        let (lo, hi) = hidden_entropy_bounds(&p, &pi, &[0, 1], 2, 4);
        let h = state_entropy(&p, &pi);
        assert!((lo - h).abs() < 1e-12 && (hi - h).abs() < 1e-12);
    }
}
