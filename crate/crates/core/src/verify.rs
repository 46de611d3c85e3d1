//! Batch equivalence checks: every applicable transformed route against the
//! stacked-system oracle on seeded, solvable instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::generate::{generate, mix_seed, GenOptions};
use crate::solvers::{compare_solutions, solve_direct, solve_transformed, SolveReport};
use crate::transforms::{
    transform_over_canonical, transform_square_oozawa, transform_square_under, transform_under_canonical,
    EquivalentForm, ProblemInstance, TransformOptions,
};

/// Margin requested from the generator for verification instances.
pub const VERIFY_MIN_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Over,
    Under,
    Square,
}

impl Regime {
    pub fn of(m: usize, n: usize) -> Self {
        match m.cmp(&n) {
            std::cmp::Ordering::Greater => Self::Over,
            std::cmp::Ordering::Less => Self::Under,
            std::cmp::Ordering::Equal => Self::Square,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Over => "over",
            Self::Under => "under",
            Self::Square => "square",
        }
    }

    fn stream(self) -> u64 {
        match self {
            Self::Over => 1,
            Self::Under => 2,
            Self::Square => 3,
        }
    }
}

/// Transformed routes that apply to an instance of shape `m x n`: the
/// generalized Sylvester forms by shape, plus both Lyapunov forms when square.
pub fn applicable_forms(inst: &ProblemInstance, opts: &TransformOptions) -> Result<Vec<EquivalentForm>> {
    let (m, n) = (inst.m(), inst.n());
    let mut forms = Vec::new();
    if m >= n {
        forms.push(transform_over_canonical(inst, opts)?);
    }
    if m <= n {
        forms.push(transform_under_canonical(inst, opts)?);
    }
    if m == n {
        forms.push(transform_square_oozawa(inst, opts)?);
        forms.push(transform_square_under(inst, opts)?);
    }
    Ok(forms)
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub seed: u64,
    pub passed: bool,
    /// Largest Eq. residual over the oracle and all routes.
    pub worst_residual: f64,
    pub margin: f64,
    pub failure: Option<String>,
}

/// Solves `inst` with the oracle and every applicable route; passes when each
/// route is equivalent to the oracle and, when square and uniquely solvable,
/// the routes agree with each other.
pub fn verify_instance(
    inst: &ProblemInstance,
    tol: f64,
    opts: &TransformOptions,
) -> Result<(bool, Vec<SolveReport>, Option<String>)> {
    let direct = solve_direct(inst, tol);
    let mut reports = vec![direct];
    for form in applicable_forms(inst, opts)? {
        reports.push(solve_transformed(&form, tol)?);
    }
    for (i, r) in reports.iter().enumerate().skip(1) {
        let cmp = compare_solutions(&reports[0], r, inst, tol);
        if !cmp.equivalent {
            return Ok((
                false,
                reports.clone(),
                Some(format!("{} vs DIRECT_VEC: {cmp:?}", reports[i].method)),
            ));
        }
    }
    for i in 1..reports.len() {
        for j in i + 1..reports.len() {
            let cmp = compare_solutions(&reports[i], &reports[j], inst, tol);
            if !cmp.equivalent {
                let msg = format!("{} vs {}: {cmp:?}", reports[i].method, reports[j].method);
                return Ok((false, reports, Some(msg)));
            }
        }
    }
    Ok((true, reports, None))
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeSummary {
    pub regime: Regime,
    pub m: usize,
    pub n: usize,
    pub count: usize,
    pub passed: usize,
    pub worst_residual: f64,
    pub min_margin: f64,
    pub failures: Vec<InstanceOutcome>,
}

impl RegimeSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.count
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub tol: f64,
    pub regimes: Vec<RegimeSummary>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.regimes.iter().all(RegimeSummary::all_passed)
    }
}

fn run_one(m: usize, n: usize, regime: Regime, base_seed: u64, index: usize, tol: f64) -> InstanceOutcome {
    let seed = mix_seed(base_seed, regime.stream(), index as u64);
    let opts = TransformOptions::default();
    let gen = generate(
        &GenOptions::new(m, n, seed)
            .solvable(true)
            .min_margin(Some(VERIFY_MIN_MARGIN)),
    );
    let outcome = gen.and_then(|g| {
        let (passed, reports, failure) = verify_instance(&g.instance, tol, &opts)?;
        let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
        let margin = reports.iter().filter_map(|r| r.margin).fold(f64::INFINITY, f64::min);
        Ok(InstanceOutcome {
            index,
            seed,
            passed,
            worst_residual: worst,
            margin,
            failure,
        })
    });
    outcome.unwrap_or_else(|e| InstanceOutcome {
        index,
        seed,
        passed: false,
        worst_residual: f64::NAN,
        margin: f64::NAN,
        failure: Some(e.to_string()),
    })
}

/// Runs `count` instances of shape `m x n`. Instances run in parallel; the
/// summary is assembled in index order.
pub fn verify_regime(m: usize, n: usize, count: usize, base_seed: u64, tol: f64) -> RegimeSummary {
    let regime = Regime::of(m, n);
    let outcomes: Vec<InstanceOutcome> = (0..count)
        .into_par_iter()
        .map(|i| run_one(m, n, regime, base_seed, i, tol))
        .collect();
    RegimeSummary {
        regime,
        m,
        n,
        count,
        passed: outcomes.iter().filter(|o| o.passed).count(),
        worst_residual: outcomes.iter().map(|o| o.worst_residual).fold(0.0, f64::max),
        min_margin: outcomes.iter().map(|o| o.margin).fold(f64::INFINITY, f64::min),
        failures: outcomes.into_iter().filter(|o| !o.passed).collect(),
    }
}

/// One [`verify_regime`] per requested size.
pub fn verify_batch(sizes: &[(usize, usize)], count: usize, base_seed: u64, tol: f64) -> VerifySummary {
    VerifySummary {
        seed: base_seed,
        tol,
        regimes: sizes
            .iter()
            .map(|&(m, n)| verify_regime(m, n, count, base_seed, tol))
            .collect(),
    }
}
