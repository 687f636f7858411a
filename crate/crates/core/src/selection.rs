//! User-selection strategies.
//!
//! Greedy selection keeps the projected columns `A_{l-1} h_j` of every
//! candidate and deflates them with modified Gram–Schmidt after each pick, so
//! one step costs `O(M K)`. The selection for `k` users is always a prefix of
//! the selection for any larger `k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{dot, ComplexMatrix, TrialStreams};
use crate::error::{Error, Result};
use crate::rates::{sum_rate, PIVOT_TOLERANCE};

/// Default cap on the number of subsets [`select_exhaustive`] may visit.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Random,
    /// Greedy sum-rate maximization with main-channel CSI only.
    GreedyMain,
    /// Greedy secrecy-rate maximization with both channels known.
    GreedyFull,
    /// Strongest main-channel norms.
    NormBased,
    /// Largest `|h|^2 - |g|^2`.
    NormDiff,
    ExhaustiveMain,
    ExhaustiveFull,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Random,
        Strategy::GreedyMain,
        Strategy::GreedyFull,
        Strategy::NormBased,
        Strategy::NormDiff,
        Strategy::ExhaustiveMain,
        Strategy::ExhaustiveFull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::GreedyMain => "greedy-main",
            Strategy::GreedyFull => "greedy-full",
            Strategy::NormBased => "norm-based",
            Strategy::NormDiff => "norm-diff",
            Strategy::ExhaustiveMain => "exhaustive-main",
            Strategy::ExhaustiveFull => "exhaustive-full",
        }
    }

    /// Whether the strategy looks at the eavesdropper channel.
    pub fn needs_wiretap_csi(self) -> bool {
        matches!(
            self,
            Strategy::GreedyFull | Strategy::NormDiff | Strategy::ExhaustiveFull
        )
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown strategy `{s}`")))
    }
}

/// Objective maximized by [`select_exhaustive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExhaustiveObjective {
    /// `log|I + rho H_S^H H_S|`.
    MainRate,
    /// `log|I + rho H_S^H H_S| - log|I + rho G_S^H G_S|`.
    FullSecrecy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    /// Selected users in selection order.
    pub indices: Vec<usize>,
    /// The maximized metric at each greedy or norm step; empty otherwise.
    pub step_metrics: Vec<f64>,
    pub strategy: Strategy,
    /// Objective value of the chosen subset for exhaustive search.
    pub objective: Option<f64>,
}

fn check_served(users: usize, served: usize) -> Result<()> {
    if served == 0 {
        return Err(Error::domain("at least one user must be served"));
    }
    if served > users {
        return Err(Error::domain(format!(
            "k = {served} exceeds the number of users K = {users}"
        )));
    }
    Ok(())
}

/// Uniformly random `k`-subset drawn from the trial's selection stream.
pub fn select_random(
    users: usize,
    served: usize,
    streams: &TrialStreams,
) -> Result<SelectionOutcome> {
    check_served(users, served)?;
    Ok(SelectionOutcome {
        indices: streams.shuffled_prefix(users, served),
        step_metrics: Vec::new(),
        strategy: Strategy::Random,
        objective: None,
    })
}

// Columns of one channel projected onto the complement of the selected span.
struct Deflation {
    residual: Vec<Vec<Complex64>>,
    norms: Vec<f64>,
    threshold: f64,
}

impl Deflation {
    fn new(m: &ComplexMatrix) -> Self {
        let residual: Vec<Vec<Complex64>> = m.columns().map(<[Complex64]>::to_vec).collect();
        let norms: Vec<f64> = (0..m.cols()).map(|j| m.column_norm_sqr(j)).collect();
        let threshold = PIVOT_TOLERANCE * norms.iter().copied().fold(0.0, f64::max);
        Self {
            residual,
            norms,
            threshold,
        }
    }

    // Projects every remaining column off the residual of `pick`.
    fn deflate(&mut self, pick: usize, step: usize, selected: &[bool]) -> Result<()> {
        let pivot = self.norms[pick];
        if !(pivot > self.threshold) {
            return Err(Error::Singular {
                step,
                pivot,
                threshold: self.threshold,
            });
        }
        let scale = 1.0 / pivot.sqrt();
        let q: Vec<Complex64> = self.residual[pick].iter().map(|z| z * scale).collect();
        for (j, col) in self.residual.iter_mut().enumerate() {
            if selected[j] {
                continue;
            }
            let c = dot(&q, col);
            for (x, qi) in col.iter_mut().zip(&q) {
                *x -= qi * c;
            }
            self.norms[j] = col.iter().map(Complex64::norm_sqr).sum();
        }
        Ok(())
    }
}

// Argmax over unselected users with strict comparison, so ties go to the lowest index.
fn argmax_unselected(values: impl Iterator<Item = f64>, selected: &[bool]) -> (usize, f64) {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (j, v) in values.enumerate() {
        if !selected[j] && (v > best.1 || best.0 == usize::MAX) {
            best = (j, v);
        }
    }
    best
}

/// Greedy main-CSI selection: each step adds the user with the largest
/// `h_j^H A_{l-1} h_j`, where `A_{l-1}` projects off the users already chosen.
pub fn select_greedy_main(h: &ComplexMatrix, served: usize) -> Result<SelectionOutcome> {
    check_served(h.cols(), served)?;
    if served > h.rows() {
        return Err(Error::domain(format!(
            "k exceeds M (k = {served}, M = {})",
            h.rows()
        )));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite(
            "main channel has NaN or infinite entries".into(),
        ));
    }
    let mut defl = Deflation::new(h);
    let mut selected = vec![false; h.cols()];
    let mut indices = Vec::with_capacity(served);
    let mut step_metrics = Vec::with_capacity(served);
    for step in 0..served {
        let (pick, metric) = argmax_unselected(defl.norms.iter().copied(), &selected);
        selected[pick] = true;
        indices.push(pick);
        step_metrics.push(metric);
        if step + 1 < served {
            defl.deflate(pick, step, &selected)?;
        }
    }
    Ok(SelectionOutcome {
        indices,
        step_metrics,
        strategy: Strategy::GreedyMain,
        objective: None,
    })
}

/// Greedy full-CSI selection: each step maximizes
/// `h_j^H A_{l-1} h_j / g_j^H B_{l-1} g_j`.
pub fn select_greedy_full(
    h: &ComplexMatrix,
    g: &ComplexMatrix,
    served: usize,
) -> Result<SelectionOutcome> {
    if h.cols() != g.cols() {
        return Err(Error::domain(
            "main and wiretap channels have different user counts",
        ));
    }
    check_served(h.cols(), served)?;
    if served > h.rows() {
        return Err(Error::domain(format!(
            "k exceeds M (k = {served}, M = {})",
            h.rows()
        )));
    }
    if served > g.rows() {
        return Err(Error::domain(format!(
            "k exceeds N (k = {served}, N = {})",
            g.rows()
        )));
    }
    if !h.is_finite() || !g.is_finite() {
        return Err(Error::NonFinite(
            "channel has NaN or infinite entries".into(),
        ));
    }
    let mut dh = Deflation::new(h);
    let mut dg = Deflation::new(g);
    let mut selected = vec![false; h.cols()];
    let mut indices = Vec::with_capacity(served);
    let mut step_metrics = Vec::with_capacity(served);
    for step in 0..served {
        let ratios = dh.norms.iter().zip(&dg.norms).map(|(a, b)| a / b);
        let (pick, metric) = argmax_unselected(ratios, &selected);
        selected[pick] = true;
        indices.push(pick);
        step_metrics.push(metric);
        if step + 1 < served {
            dh.deflate(pick, step, &selected)?;
            dg.deflate(pick, step, &selected)?;
        }
    }
    Ok(SelectionOutcome {
        indices,
        step_metrics,
        strategy: Strategy::GreedyFull,
        objective: None,
    })
}

// Descending by score, lowest index first on ties.
fn top_k(scores: &[f64], served: usize) -> (Vec<usize>, Vec<f64>) {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(served);
    let metrics = order.iter().map(|&j| scores[j]).collect();
    (order, metrics)
}

/// The `k` users with the largest `|h_j|^2`.
pub fn select_norm_based(h: &ComplexMatrix, served: usize) -> Result<SelectionOutcome> {
    check_served(h.cols(), served)?;
    let scores: Vec<f64> = (0..h.cols()).map(|j| h.column_norm_sqr(j)).collect();
    let (indices, step_metrics) = top_k(&scores, served);
    Ok(SelectionOutcome {
        indices,
        step_metrics,
        strategy: Strategy::NormBased,
        objective: None,
    })
}

/// The `k` users with the largest `|h_j|^2 - |g_j|^2`.
pub fn select_norm_diff(
    h: &ComplexMatrix,
    g: &ComplexMatrix,
    served: usize,
) -> Result<SelectionOutcome> {
    if h.cols() != g.cols() {
        return Err(Error::domain(
            "main and wiretap channels have different user counts",
        ));
    }
    check_served(h.cols(), served)?;
    let scores: Vec<f64> = (0..h.cols())
        .map(|j| h.column_norm_sqr(j) - g.column_norm_sqr(j))
        .collect();
    let (indices, step_metrics) = top_k(&scores, served);
    Ok(SelectionOutcome {
        indices,
        step_metrics,
        strategy: Strategy::NormDiff,
        objective: None,
    })
}

/// `C(n, r)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Best subset by full enumeration in lexicographic order; the first subset
/// wins on ties.
pub fn select_exhaustive(
    h: &ComplexMatrix,
    g: &ComplexMatrix,
    served: usize,
    objective: ExhaustiveObjective,
    rho: f64,
    budget: u128,
) -> Result<SelectionOutcome> {
    if h.cols() != g.cols() {
        return Err(Error::domain(
            "main and wiretap channels have different user counts",
        ));
    }
    let users = h.cols();
    check_served(users, served)?;
    let subsets = binomial(users, served);
    if subsets > budget {
        return Err(Error::BudgetExceeded {
            users,
            served,
            subsets,
            budget,
        });
    }
    let value = |s: &[usize]| -> Result<f64> {
        let c_b = sum_rate(&h.select_columns(s), rho)?;
        Ok(match objective {
            ExhaustiveObjective::MainRate => c_b,
            ExhaustiveObjective::FullSecrecy => c_b - sum_rate(&g.select_columns(s), rho)?,
        })
    };
    let mut subset: Vec<usize> = (0..served).collect();
    let mut best = (subset.clone(), value(&subset)?);
    while next_combination(&mut subset, users) {
        let v = value(&subset)?;
        if v > best.1 {
            best = (subset.clone(), v);
        }
    }
    Ok(SelectionOutcome {
        indices: best.0,
        step_metrics: Vec::new(),
        strategy: match objective {
            ExhaustiveObjective::MainRate => Strategy::ExhaustiveMain,
            ExhaustiveObjective::FullSecrecy => Strategy::ExhaustiveFull,
        },
        objective: Some(best.1),
    })
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let r = c.len();
    let Some(i) = (0..r).rev().find(|&i| c[i] < n - r + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..r {
        c[j] = c[j - 1] + 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::StreamRole;
    use crate::rates::{low_snr_rate, projection_complement, quadratic_form};

    fn instance(seed: u64, m: usize, n: usize, users: usize) -> (ComplexMatrix, ComplexMatrix) {
        let s = TrialStreams::new(seed, 0);
        (
            s.matrix(StreamRole::Main, m, users),
            s.matrix(StreamRole::Wiretap, n, users),
        )
    }

    #[test]
    fn random_selection_contract() {
        let s = TrialStreams::new(9, 2);
        let all = select_random(8, 8, &s).unwrap();
        let mut sorted = all.indices.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
        assert!(all.step_metrics.is_empty());
        assert_eq!(
            select_random(8, 3, &s).unwrap(),
            select_random(8, 3, &s).unwrap()
        );
        assert!(select_random(3, 4, &s).is_err());
    }

    #[test]
    fn random_selection_is_uniform() {
        let mut counts = [0usize; 10];
        let draws = 100_000;
        for t in 0..draws {
            counts[select_random(10, 1, &TrialStreams::new(5, t))
                .unwrap()
                .indices[0]] += 1;
        }
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.1).abs() < 0.005);
        }
    }

    #[test]
    fn collinear_users_project_out() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 10.0], &[0.0, 0.0]]).unwrap();
        let out = select_greedy_main(&h, 2).unwrap();
        assert_eq!(out.indices, vec![1, 0]);
        assert_eq!(out.step_metrics[0], 100.0);
        assert!(out.step_metrics[1].abs() < 1e-12);
    }

    #[test]
    fn collapse_with_steps_left_is_singular() {
        let h =
            ComplexMatrix::from_real_rows(&[&[1.0, 10.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]])
                .unwrap();
        assert!(matches!(
            select_greedy_main(&h, 3),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn k_above_m_is_rejected() {
        let (h, g) = instance(1, 3, 5, 10);
        let msg = select_greedy_main(&h, 4).unwrap_err().to_string();
        assert!(msg.contains("k exceeds M"), "{msg}");
        assert!(select_greedy_full(&g, &h, 4)
            .unwrap_err()
            .to_string()
            .contains("k exceeds N"));
    }

    #[test]
    fn first_greedy_pick_is_max_norm() {
        let (h, _) = instance(2, 6, 6, 30);
        let greedy = select_greedy_main(&h, 1).unwrap();
        let norm = select_norm_based(&h, 1).unwrap();
        assert_eq!(greedy.indices, norm.indices);
    }

    #[test]
    fn greedy_steps_match_explicit_projectors() {
        for seed in 0..20 {
            let (h, g) = instance(seed, 4, 5, 9);
            for out in [
                select_greedy_main(&h, 4).unwrap(),
                select_greedy_full(&h, &g, 4).unwrap(),
            ] {
                for l in 0..4 {
                    let a = projection_complement(&h.select_columns(&out.indices[..l])).unwrap();
                    let b = projection_complement(&g.select_columns(&out.indices[..l])).unwrap();
                    let metric = |j: usize| {
                        let num = quadratic_form(h.column(j), &a);
                        match out.strategy {
                            Strategy::GreedyMain => num,
                            _ => num / quadratic_form(g.column(j), &b),
                        }
                    };
                    let recorded = out.step_metrics[l];
                    assert!((metric(out.indices[l]) - recorded).abs() <= 1e-9 * recorded.abs());
                    for j in (0..9).filter(|j| !out.indices[..=l].contains(j)) {
                        assert!(metric(j) <= recorded * (1.0 + 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn proportional_wiretap_ties_to_lowest_index() {
        let (h, _) = instance(3, 4, 4, 7);
        let g = h.scale(2.0);
        assert_eq!(select_greedy_full(&h, &g, 1).unwrap().indices, vec![0]);
    }

    #[test]
    fn orthogonal_wiretap_reduces_to_main_ordering() {
        let (h, _) = instance(4, 6, 6, 8);
        let g = ComplexMatrix::identity(8).scale(1e-3);
        assert_eq!(
            select_greedy_full(&h, &g, 5).unwrap().indices,
            select_greedy_main(&h, 5).unwrap().indices
        );
    }

    #[test]
    fn wiretap_scaling_keeps_full_ordering() {
        let (h, g) = instance(5, 5, 5, 12);
        assert_eq!(
            select_greedy_full(&h, &g, 4).unwrap().indices,
            select_greedy_full(&h, &g.scale(7.5), 4).unwrap().indices
        );
    }

    #[test]
    fn greedy_is_prefix_consistent() {
        let (h, g) = instance(6, 8, 8, 20);
        let long = select_greedy_full(&h, &g, 6).unwrap();
        let short = select_greedy_full(&h, &g, 3).unwrap();
        assert_eq!(&long.indices[..3], &short.indices[..]);
    }

    #[test]
    fn norm_sorting() {
        let h = ComplexMatrix::from_real_rows(&[&[3f64.sqrt(), 1.0, 5f64.sqrt(), 2f64.sqrt()]])
            .unwrap();
        let out = select_norm_based(&h, 2).unwrap();
        assert_eq!(out.indices, vec![2, 0]);
        let g = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 2.0, 0.0]]).unwrap();
        assert_eq!(select_norm_diff(&h, &g, 2).unwrap().indices, vec![0, 3]);
        assert!(select_norm_based(&h, 5).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(50, 5), 2_118_760);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }

    #[test]
    fn exhaustive_full_set_and_budget() {
        let (h, g) = instance(7, 4, 4, 4);
        let out = select_exhaustive(
            &h,
            &g,
            4,
            ExhaustiveObjective::MainRate,
            1.0,
            DEFAULT_EXHAUSTIVE_BUDGET,
        )
        .unwrap();
        assert_eq!(out.indices, vec![0, 1, 2, 3]);
        let (h, g) = instance(7, 10, 10, 50);
        let err = select_exhaustive(
            &h,
            &g,
            5,
            ExhaustiveObjective::MainRate,
            1.0,
            DEFAULT_EXHAUSTIVE_BUDGET,
        );
        assert!(matches!(
            err,
            Err(Error::BudgetExceeded {
                subsets: 2_118_760,
                ..
            })
        ));
    }

    #[test]
    fn exhaustive_dominates_greedy() {
        let rho = 100.0;
        for seed in 0..20 {
            let (h, g) = instance(seed, 3, 3, 6);
            let ex = select_exhaustive(
                &h,
                &g,
                3,
                ExhaustiveObjective::MainRate,
                rho,
                DEFAULT_EXHAUSTIVE_BUDGET,
            )
            .unwrap();
            let gr = select_greedy_main(&h, 3).unwrap();
            let gv = sum_rate(&h.select_columns(&gr.indices), rho).unwrap();
            assert!(ex.objective.unwrap() >= gv - 1e-12);

            let exf = select_exhaustive(
                &h,
                &g,
                2,
                ExhaustiveObjective::FullSecrecy,
                rho,
                DEFAULT_EXHAUSTIVE_BUDGET,
            )
            .unwrap();
            let gf = select_greedy_full(&h, &g, 2).unwrap();
            let fv = sum_rate(&h.select_columns(&gf.indices), rho).unwrap()
                - sum_rate(&g.select_columns(&gf.indices), rho).unwrap();
            assert!(exf.objective.unwrap() >= fv - 1e-12);

            let ex1 = select_exhaustive(
                &h,
                &g,
                1,
                ExhaustiveObjective::MainRate,
                rho,
                DEFAULT_EXHAUSTIVE_BUDGET,
            )
            .unwrap();
            assert_eq!(ex1.indices, select_greedy_main(&h, 1).unwrap().indices);
        }
    }

    #[test]
    fn low_snr_exhaustive_is_norm_based() {
        let rho = 1e-5;
        for seed in 0..5 {
            let (h, g) = instance(seed, 10, 10, 12);
            let ex = select_exhaustive(
                &h,
                &g,
                5,
                ExhaustiveObjective::MainRate,
                rho,
                DEFAULT_EXHAUSTIVE_BUDGET,
            )
            .unwrap();
            let nb = select_norm_based(&h, 5).unwrap();
            let mut a = ex.indices.clone();
            let mut b = nb.indices.clone();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
            let nv = low_snr_rate(&h.select_columns(&nb.indices), rho);
            assert!((nv - ex.objective.unwrap()).abs() / nv < 0.01);
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
            assert_eq!(
                serde_json::to_string(&s).unwrap(),
                format!("\"{}\"", s.name())
            );
        }
    }
}
