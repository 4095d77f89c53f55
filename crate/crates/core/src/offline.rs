//! Exact offline ground truth: the hindsight optimum over the simplex, the
//! strict-feasibility margin with its witnesses, and a brute-force lattice
//! oracle used to cross-check every solver path.

use std::collections::HashSet;

use crate::env::ProblemInstance;
use crate::error::{Error, Result};
use crate::strategy::{ArmIndex, Strategy};

/// Feasibility tolerance on returned points.
pub const FEAS_TOL: f64 = 1e-7;
/// Tolerance for the KKT certificate of a solved basis.
pub const KKT_TOL: f64 = 1e-8;
const PIVOT_EPS: f64 = 1e-9;

/// `min objective . x` over the simplex intersected with `rows . x <= rhs`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, f64)>,
    /// When set, adds `sum(x) = 1` with `x >= 0`. All solvers in this crate
    /// use it; plain `x >= 0` problems must be bounded by their rows.
    pub simplex_constraint: bool,
}

/// KKT residuals of a solved basis, all expected at or below [`KKT_TOL`]
/// (primal feasibility at [`FEAS_TOL`]).
#[derive(Debug, Clone, Copy)]
pub struct KktReport {
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
    pub duality_gap: f64,
}

impl KktReport {
    pub fn certified(&self) -> bool {
        self.primal_infeasibility <= FEAS_TOL
            && self.dual_infeasibility <= KKT_TOL
            && self.complementarity <= KKT_TOL
            && self.duality_gap.abs() <= KKT_TOL
    }
}

/// Ground truth for one instance.
#[derive(Debug, Clone)]
pub struct OfflineSolution {
    /// Minimal cumulative expected loss of a feasible fixed strategy.
    pub opt_value: f64,
    pub opt_strategy: Strategy,
    /// Largest uniform margin attainable by a mixed strategy.
    pub rho: f64,
    pub rho_strategy: Strategy,
    /// Best single arm and its margin.
    pub rho_arm: ArmIndex,
    pub rho_arm_value: f64,
}

/// Which strict-feasibility notion to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMode {
    /// Margin of the best mixed strategy.
    Mixed,
    /// Margin of the best single arm.
    Arm,
}

/// Witness returned by [`compute_rho`].
#[derive(Debug, Clone)]
pub enum RhoWitness {
    Strategy(Strategy),
    Arm(ArmIndex),
}

// ---------------------------------------------------------------------------
// Dense two-phase simplex
// ---------------------------------------------------------------------------

/// `min c . z` subject to `ub . z <= b`, `eq . z = d`, `z >= 0`.
struct StandardLp {
    n: usize,
    c: Vec<f64>,
    ub: Vec<(Vec<f64>, f64)>,
    eq: Vec<(Vec<f64>, f64)>,
}

struct StdSolution {
    z: Vec<f64>,
    value: f64,
    /// Duals of the `<=` rows (non-negative at optimum).
    y_ub: Vec<f64>,
    /// Duals of the equality rows.
    y_eq: Vec<f64>,
}

struct Tableau {
    /// Constraint rows; each has `ncols` coefficients followed by the rhs.
    rows: Vec<Vec<f64>>,
    /// Reduced-cost row; last entry holds minus the current objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
    /// Columns that may never enter the basis (artificials in phase 2).
    blocked: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        debug_assert!(piv.abs() > PIVOT_EPS);
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c];
            if factor != 0.0 {
                for j in 0..=self.ncols {
                    self.rows[i][j] -= factor * self.rows[r][j];
                }
            }
        }
        let factor = self.cost[c];
        if factor != 0.0 {
            for j in 0..=self.ncols {
                self.cost[j] -= factor * self.rows[r][j];
            }
        }
        self.basis[r] = c;
    }

    /// Rebuilds the reduced-cost row for the objective `c_full`.
    fn price(&mut self, c_full: &[f64]) {
        self.cost = c_full.to_vec();
        self.cost.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c_full[b];
            if cb != 0.0 {
                for j in 0..=self.ncols {
                    self.cost[j] -= cb * self.rows[i][j];
                }
            }
        }
    }

    /// Bland's rule: enter the lowest-index improving column, leave by the
    /// minimum ratio with ties broken toward the lowest basic index.
    fn run(&mut self) -> Result<()> {
        let max_iter = 50_000 + 200 * (self.rows.len() + self.ncols);
        for _ in 0..max_iter {
            let entering = (0..self.ncols)
                .find(|&j| !self.blocked[j] && self.cost[j] < -PIVOT_EPS);
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.rows[i][self.ncols] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((best_i, best_ratio)) => {
                            if ratio < best_ratio - PIVOT_EPS
                                || (ratio < best_ratio + PIVOT_EPS
                                    && self.basis[i] < self.basis[best_i])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::UnboundedLp);
            };
            self.pivot(r, c);
        }
        Err(Error::InvalidConfig(
            "simplex exceeded its iteration budget".into(),
        ))
    }
}

fn solve_standard(lp: &StandardLp) -> Result<StdSolution> {
    let n = lp.n;
    let p = lp.ub.len();
    let q = lp.eq.len();

    // Column layout: structurals, slacks, artificials.
    let n_slack = p;
    // Flip rows with negative rhs so every stored rhs is non-negative.
    let mut flipped = vec![false; p];
    let mut needs_art_ub = vec![false; p];
    for (i, (_, b)) in lp.ub.iter().enumerate() {
        if *b < 0.0 {
            flipped[i] = true;
            needs_art_ub[i] = true;
        }
    }
    let n_art: usize = needs_art_ub.iter().filter(|x| **x).count() + q;
    let ncols = n + n_slack + n_art;

    let mut rows = Vec::with_capacity(p + q);
    let mut basis = Vec::with_capacity(p + q);
    let mut art_cols = Vec::new();
    let mut next_art = n + n_slack;
    let mut art_for_eq = vec![usize::MAX; q];
    let mut slack_col = vec![usize::MAX; p];

    for (i, (coeffs, b)) in lp.ub.iter().enumerate() {
        debug_assert_eq!(coeffs.len(), n);
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols + 1];
        for (j, a) in coeffs.iter().enumerate() {
            row[j] = sign * a;
        }
        let sc = n + i;
        slack_col[i] = sc;
        row[sc] = sign;
        row[ncols] = sign * b;
        if needs_art_ub[i] {
            row[next_art] = 1.0;
            basis.push(next_art);
            art_cols.push(next_art);
            next_art += 1;
        } else {
            basis.push(sc);
        }
        rows.push(row);
    }
    for (idx, (coeffs, d)) in lp.eq.iter().enumerate() {
        debug_assert_eq!(coeffs.len(), n);
        let sign = if *d < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols + 1];
        for (j, a) in coeffs.iter().enumerate() {
            row[j] = sign * a;
        }
        row[ncols] = sign * d;
        row[next_art] = 1.0;
        basis.push(next_art);
        art_cols.push(next_art);
        art_for_eq[idx] = next_art;
        next_art += 1;
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        cost: Vec::new(),
        basis,
        ncols,
        blocked: vec![false; ncols],
    };

    // Phase 1: drive the artificials to zero.
    if n_art > 0 {
        let mut phase1_cost = vec![0.0; ncols];
        for &a in &art_cols {
            phase1_cost[a] = 1.0;
        }
        tab.price(&phase1_cost);
        tab.run()?;
        let infeas = -tab.cost[ncols];
        if infeas > FEAS_TOL {
            return Err(Error::InfeasibleLp);
        }
        // Pivot remaining basic artificials out where possible.
        for r in 0..tab.rows.len() {
            if art_cols.contains(&tab.basis[r]) {
                let col = (0..n + n_slack).find(|&j| tab.rows[r][j].abs() > PIVOT_EPS);
                if let Some(c) = col {
                    tab.pivot(r, c);
                }
            }
        }
    }

    // Phase 2: artificials may not re-enter.
    for &a in &art_cols {
        tab.blocked[a] = true;
    }
    let mut phase2_cost = vec![0.0; ncols];
    phase2_cost[..n].copy_from_slice(&lp.c);
    tab.price(&phase2_cost);
    tab.run()?;

    let mut z = vec![0.0; ncols];
    for (r, &b) in tab.basis.iter().enumerate() {
        z[b] = tab.rows[r][tab.ncols];
    }
    let value = lp.c.iter().zip(z.iter()).map(|(c, x)| c * x).sum();
    // Duals read off the reduced-cost row, in the convention where the
    // Lagrangian adds `y . (Az - b)` with `y >= 0` for the `<=` rows. Flipping
    // a stored row flips slack sign and dual sign together, so the same
    // column works for both cases.
    let y_ub = (0..p).map(|i| tab.cost[slack_col[i]]).collect();
    let y_eq = (0..q).map(|i| tab.cost[art_for_eq[i]]).collect();
    Ok(StdSolution {
        z: z[..n].to_vec(),
        value,
        y_ub,
        y_eq,
    })
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

fn kkt_report(lp: &LinearProgram, sol: &StdSolution, n: usize) -> KktReport {
    let x = &sol.z[..n];
    let mut primal: f64 = x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
    for (coeffs, b) in &lp.rows {
        let lhs: f64 = coeffs.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
        primal = primal.max(lhs - b);
    }
    let w = sol.y_eq.first().copied().unwrap_or(0.0);
    if lp.simplex_constraint {
        let sum: f64 = x.iter().sum();
        primal = primal.max((sum - 1.0).abs());
    }
    let mut dual: f64 = sol.y_ub.iter().map(|y| (-y).max(0.0)).fold(0.0, f64::max);
    let mut compl: f64 = 0.0;
    let mut reduced = vec![0.0; n];
    for j in 0..n {
        let mut r = lp.objective[j] + if lp.simplex_constraint { w } else { 0.0 };
        for ((coeffs, _), y) in lp.rows.iter().zip(sol.y_ub.iter()) {
            r += coeffs[j] * y;
        }
        reduced[j] = r;
        dual = dual.max(-r);
        compl = compl.max((x[j] * r).abs());
    }
    for ((coeffs, b), y) in lp.rows.iter().zip(sol.y_ub.iter()) {
        let lhs: f64 = coeffs.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
        compl = compl.max((y * (b - lhs)).abs());
    }
    let dual_value = -sol
        .y_ub
        .iter()
        .zip(lp.rows.iter())
        .map(|(y, (_, b))| y * b)
        .sum::<f64>()
        - if lp.simplex_constraint { w } else { 0.0 };
    KktReport {
        primal_infeasibility: primal,
        dual_infeasibility: dual,
        complementarity: compl,
        duality_gap: sol.value - dual_value,
    }
}

/// Solves `lp` by two-phase dense simplex. The returned basis is certified by
/// its KKT residuals; see [`KktReport`].
pub fn solve_lp(lp: &LinearProgram) -> Result<(f64, Strategy, KktReport)> {
    let n = lp.objective.len();
    if n == 0 {
        return Err(Error::InvalidDimension);
    }
    for (coeffs, _) in &lp.rows {
        if coeffs.len() != n {
            return Err(Error::InvalidConfig("row dimension mismatch".into()));
        }
    }
    if !lp.simplex_constraint {
        return Err(Error::InvalidConfig(
            "only simplex-constrained programs are supported".into(),
        ));
    }
    let std_lp = StandardLp {
        n,
        c: lp.objective.clone(),
        ub: lp.rows.clone(),
        eq: vec![(vec![1.0; n], 1.0)],
    };
    let sol = solve_standard(&std_lp)?;
    let report = kkt_report(lp, &sol, n);
    debug_assert!(report.certified(), "uncertified basis: {report:?}");
    let point = Strategy::normalized(
        &sol.z[..n]
            .iter()
            .map(|v| v.max(0.0))
            .collect::<Vec<f64>>(),
    )?;
    Ok((sol.value, point, report))
}

/// `min_x max_i rows[i] . x` over the simplex. Returns the optimal worst
/// residual and its witness.
pub fn minimax_over_simplex(rows: &[Vec<f64>]) -> Result<(f64, Strategy)> {
    let k = rows
        .first()
        .map(|r| r.len())
        .ok_or(Error::InvalidDimension)?;
    // Variables (x_1..x_k, s_plus, s_minus) with s = s_plus - s_minus free.
    let n = k + 2;
    let mut c = vec![0.0; n];
    c[k] = 1.0;
    c[k + 1] = -1.0;
    let ub = rows
        .iter()
        .map(|row| {
            let mut coeffs = vec![0.0; n];
            coeffs[..k].copy_from_slice(row);
            coeffs[k] = -1.0;
            coeffs[k + 1] = 1.0;
            (coeffs, 0.0)
        })
        .collect();
    let mut eq_row = vec![0.0; n];
    for v in eq_row.iter_mut().take(k) {
        *v = 1.0;
    }
    let std_lp = StandardLp {
        n,
        c,
        ub,
        eq: vec![(eq_row, 1.0)],
    };
    let sol = solve_standard(&std_lp)?;
    let point = Strategy::normalized(
        &sol.z[..k]
            .iter()
            .map(|v| v.max(0.0))
            .collect::<Vec<f64>>(),
    )?;
    Ok((sol.value, point))
}

/// Aggregated constraint rows of the hindsight program, one per constraint.
pub fn aggregated_rows(inst: &ProblemInstance) -> Vec<Vec<f64>> {
    (0..inst.constraints)
        .map(|i| {
            (0..inst.arms)
                .map(|a| {
                    inst.constraint_means[i]
                        .iter()
                        .map(|row| row[a])
                        .sum::<f64>()
                })
                .collect()
        })
        .collect()
}

/// Deduplicated per-round constraint rows (exact float equality).
pub fn distinct_rows(inst: &ProblemInstance) -> Vec<Vec<f64>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut rows = Vec::new();
    for i in 0..inst.constraints {
        for t in 0..inst.horizon as usize {
            let row = &inst.constraint_means[i][t];
            let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                rows.push(row.clone());
            }
        }
    }
    rows
}

/// Strict-feasibility margin in the requested mode.
///
/// Mixed mode solves the minimax program over the deduplicated rows; arm mode
/// scans the arms directly. The margin may be non-positive.
pub fn compute_rho(inst: &ProblemInstance, mode: RhoMode) -> Result<(f64, RhoWitness)> {
    match mode {
        RhoMode::Mixed => {
            let rows = distinct_rows(inst);
            let (s, x) = minimax_over_simplex(&rows)?;
            Ok((-s, RhoWitness::Strategy(x)))
        }
        RhoMode::Arm => {
            let mut best = f64::NEG_INFINITY;
            let mut witness = 0;
            for a in 0..inst.arms {
                let mut margin = f64::INFINITY;
                for i in 0..inst.constraints {
                    for t in 0..inst.horizon as usize {
                        margin = margin.min(-inst.constraint_means[i][t][a]);
                    }
                }
                if margin > best {
                    best = margin;
                    witness = a;
                }
            }
            Ok((best, RhoWitness::Arm(ArmIndex(witness))))
        }
    }
}

/// Solves the hindsight program and both feasibility margins.
pub fn solve_opt(inst: &ProblemInstance) -> Result<OfflineSolution> {
    let objective: Vec<f64> = (0..inst.arms)
        .map(|a| inst.loss_means.iter().map(|row| row[a]).sum::<f64>())
        .collect();
    let rows = aggregated_rows(inst)
        .into_iter()
        .map(|r| (r, 0.0))
        .collect();
    let lp = LinearProgram {
        objective,
        rows,
        simplex_constraint: true,
    };
    let (opt_value, opt_strategy, _report) = solve_lp(&lp).map_err(|e| match e {
        Error::InfeasibleLp => Error::InfeasibleInstance,
        other => other,
    })?;
    let (rho, mixed_witness) = compute_rho(inst, RhoMode::Mixed)?;
    let RhoWitness::Strategy(rho_strategy) = mixed_witness else {
        unreachable!()
    };
    let (rho_arm_value, arm_witness) = compute_rho(inst, RhoMode::Arm)?;
    let RhoWitness::Arm(rho_arm) = arm_witness else {
        unreachable!()
    };
    Ok(OfflineSolution {
        opt_value,
        opt_strategy,
        rho,
        rho_strategy,
        rho_arm,
        rho_arm_value,
    })
}

/// Exhaustive lattice search over the simplex.
///
/// Evaluates `objective` at every simplex point whose coordinates are
/// multiples of `step` and that satisfies `rows . x <= tol`, returning the
/// best feasible point or `None` when the lattice holds no feasible point.
pub fn grid_oracle<F>(
    k: usize,
    objective: F,
    rows: &[Vec<f64>],
    step: f64,
) -> Result<Option<(f64, Vec<f64>)>>
where
    F: Fn(&[f64]) -> f64,
{
    const MAX_ARMS: usize = 4;
    if k == 0 {
        return Err(Error::InvalidDimension);
    }
    if k > MAX_ARMS {
        return Err(Error::OracleScope { max: MAX_ARMS, got: k });
    }
    let n = (1.0 / step).round() as usize;
    let mut point = vec![0usize; k];
    let mut best: Option<(f64, Vec<f64>)> = None;
    enumerate_compositions(n, k, 0, &mut point, &mut |counts| {
        let x: Vec<f64> = counts.iter().map(|c| *c as f64 / n as f64).collect();
        let feasible = rows.iter().all(|row| {
            row.iter().zip(x.iter()).map(|(a, v)| a * v).sum::<f64>() <= 1e-9
        });
        if feasible {
            let value = objective(&x);
            let better = match &best {
                None => true,
                Some((v, _)) => value < *v - 1e-15,
            };
            if better {
                best = Some((value, x));
            }
        }
    });
    Ok(best)
}

fn enumerate_compositions<F>(
    remaining: usize,
    k: usize,
    idx: usize,
    point: &mut [usize],
    visit: &mut F,
) where
    F: FnMut(&[usize]),
{
    if idx == k - 1 {
        point[idx] = remaining;
        visit(point);
        return;
    }
    for v in 0..=remaining {
        point[idx] = v;
        enumerate_compositions(remaining - v, k, idx + 1, point, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{build_instance, CorruptionSchedule, EnvConfig, LossPattern};
    use crate::strategy::RngStream;

    fn lp(objective: Vec<f64>, rows: Vec<(Vec<f64>, f64)>) -> LinearProgram {
        LinearProgram {
            objective,
            rows,
            simplex_constraint: true,
        }
    }

    #[test]
    fn vertex_optimum() {
        let (value, point, report) = solve_lp(&lp(vec![0.3, 0.7], vec![])).unwrap();
        assert!((value - 0.3).abs() < 1e-12);
        assert!((point.probs()[0] - 1.0).abs() < 1e-9);
        assert!(report.certified());
    }

    #[test]
    fn binding_constraint_splits_mass() {
        // min x_2 subject to x_1 <= x_2 pushes onto the diagonal.
        let (value, point, report) =
            solve_lp(&lp(vec![0.0, 1.0], vec![(vec![1.0, -1.0], 0.0)])).unwrap();
        assert!((value - 0.5).abs() < 1e-9, "value {value}");
        assert!((point.probs()[0] - 0.5).abs() < 1e-9);
        assert!(report.certified());
    }

    #[test]
    fn infeasible_rows_detected() {
        // x_1 <= -0.1 with x on the simplex is empty.
        let err = solve_lp(&lp(vec![0.0, 1.0], vec![(vec![1.0, 0.0], -0.1)])).unwrap_err();
        assert!(matches!(err, Error::InfeasibleLp));
    }

    fn small_instance() -> ProblemInstance {
        let config = EnvConfig {
            horizon: 10,
            arms: 2,
            constraints: 1,
            loss_pattern: LossPattern::Constant {
                means: vec![0.0, 1.0],
            },
            schedule: CorruptionSchedule::stationary(vec![vec![1.0, -1.0]]),
            rho_min: 0.05,
        };
        let mut rng = RngStream::new(0);
        build_instance(&config, &mut rng).unwrap()
    }

    #[test]
    fn opt_on_constant_instance() {
        let config = EnvConfig {
            horizon: 10,
            arms: 2,
            constraints: 1,
            loss_pattern: LossPattern::Constant {
                means: vec![0.3, 0.7],
            },
            schedule: CorruptionSchedule::stationary(vec![vec![-1.0, -1.0]]),
            rho_min: 0.05,
        };
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        let sol = solve_opt(&inst).unwrap();
        assert!((sol.opt_value - 3.0).abs() < 1e-9);
        assert!((sol.opt_strategy.probs()[0] - 1.0).abs() < 1e-9);
        assert!((sol.rho - 1.0).abs() < 1e-9);
        assert!((sol.rho_arm_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn opt_with_binding_constraint() {
        let inst = small_instance();
        let sol = solve_opt(&inst).unwrap();
        assert!((sol.opt_value - 5.0).abs() < 1e-9, "opt {}", sol.opt_value);
        assert!((sol.opt_strategy.probs()[0] - 0.5).abs() < 1e-9);
        // Aggregated feasibility of the optimum.
        for row in aggregated_rows(&inst) {
            assert!(sol.opt_strategy.dot(&row) <= FEAS_TOL);
        }
    }

    #[test]
    fn rho_modes_and_ordering() {
        let inst = small_instance();
        let (rho_mixed, _) = compute_rho(&inst, RhoMode::Mixed).unwrap();
        let (rho_arm, witness) = compute_rho(&inst, RhoMode::Arm).unwrap();
        assert!((rho_arm - 1.0).abs() < 1e-9);
        assert!(matches!(witness, RhoWitness::Arm(ArmIndex(1))));
        assert!(rho_mixed >= rho_arm - 1e-9);
    }

    #[test]
    fn arm_mode_scans_worst_round() {
        let config = EnvConfig {
            horizon: 3,
            arms: 2,
            constraints: 1,
            loss_pattern: LossPattern::Constant {
                means: vec![0.5, 0.5],
            },
            schedule: CorruptionSchedule {
                base: vec![vec![-0.2, -0.5]],
                perturbations: vec![crate::env::Perturbation {
                    round: 2,
                    constraint: 0,
                    delta: vec![0.0, 0.6],
                }],
                target_budget: 0.6,
            },
            rho_min: 0.05,
        };
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        // Arm 0 keeps -0.2 everywhere; arm 1 hits +0.1 at round 2.
        let (rho, witness) = compute_rho(&inst, RhoMode::Arm).unwrap();
        assert!((rho - 0.2).abs() < 1e-12);
        assert!(matches!(witness, RhoWitness::Arm(ArmIndex(0))));
    }

    #[test]
    fn grid_oracle_unconstrained_min() {
        let best = grid_oracle(2, |x| 0.3 * x[0] + 0.7 * x[1], &[], 0.01)
            .unwrap()
            .unwrap();
        assert!((best.1[0] - 1.0).abs() <= 0.01 + 1e-12);
    }

    #[test]
    fn grid_oracle_matches_binding_lp() {
        let rows = vec![vec![1.0, -1.0]];
        let best = grid_oracle(2, |x| x[1], &rows, 1e-3).unwrap().unwrap();
        assert!((best.0 - 0.5).abs() <= 1e-3 + 1e-12);
    }

    #[test]
    fn grid_oracle_infeasible_and_scope() {
        let rows = vec![vec![1.0, 1.0]];
        assert!(grid_oracle(2, |x| x[0], &rows, 0.1).unwrap().is_none());
        assert!(matches!(
            grid_oracle(5, |x| x[0], &[], 0.1),
            Err(Error::OracleScope { .. })
        ));
    }

    #[test]
    fn dedup_does_not_change_rho() {
        let inst = small_instance();
        let deduped = distinct_rows(&inst);
        assert_eq!(deduped.len(), 1);
        let mut all_rows = Vec::new();
        for t in 1..=inst.horizon {
            all_rows.push(inst.constraint_row(0, t).to_vec());
        }
        let (s_dedup, _) = minimax_over_simplex(&deduped).unwrap();
        let (s_all, _) = minimax_over_simplex(&all_rows).unwrap();
        assert!((s_dedup - s_all).abs() < 1e-12);
    }
}
