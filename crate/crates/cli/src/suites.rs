use ccr_core::analytic::{
    analytic_series, check_growth_bound, geometric_bound_breakdown, single_step_constant, taylor_exp, Verdict,
};
use ccr_core::fock::{
    build_annihilator, build_momentum, build_number, build_oscillator, build_position, commutator,
    factorial_exact, number_eigenpairs, eigen_residual, BasisConvention,
};
use ccr_core::grid::{
    grid_ccr_residual, grid_oscillator_spectrum, intertwiner_check, vacuum_annihilation_residual, GridFunction,
    GridSpec,
};
use ccr_core::interval::{
    distance_from_naturals, interval_number_spectrum, interval_vs_line_report, interval_weyl_residual,
    IntervalRepSpec,
};
use ccr_core::matrix::{vec_norm, vec_sub, ComplexMatrix, I, ONE};
use ccr_core::rng::SplitMix64;
use ccr_core::symbolic::{
    conjugation_series, exp_commutator_series, fock_norm_exact, normal_order, parse, power_commutator_sides,
    random_expression, verify_identity, ExactScalar, IdentityVerdict, LadderAction, NormalForm,
};
use ccr_core::weyl::{
    boost, convergence_sweep, exp_commutator_residual, expm, group_law_residual, phase_convention_test,
    shift_identity_residual, translation, unitarity_defect, weyl_residual, PhaseConvention,
};
use ccr_core::{FockState, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::{Check, RunConfig, Status, Suite};

const CCR: &str = "[p,q] = -i I";
const LADDER_CCR: &str = "[a,a^dag] = I";
const VACUUM: &str = "a psi_0 = 0";
const NUMBER_SPECTRUM: &str = "Sp N = {0,1,2,...}";
const NUMBER_EIGEN: &str = "N psi_n = n psi_n";
const OSCILLATOR: &str = "Sp (q^2 + p^2) = {2n+1}";
const HERMITIAN: &str = "q = q^dag, p = p^dag";
const ANALYTIC: &str = "sum_k t^k/k! ||A^k xi|| < inf";
const GROWTH: &str = "||A^k phi|| <= 2^(k/2) sqrt((M+k)!/M!) ||phi||";
const SINGLE_STEP: &str = "||q psi|| <= sqrt2 C sqrt((m+n+1)!)";
const GEOMETRIC: &str = "||q^k psi|| <= C^k (2 (m+n+1)!)^(k/2)";
const TAYLOR: &str = "e^(tA) xi = sum_k t^k/k! A^k xi";
const WEYL: &str = "e^(itp) e^(isq) = e^(ist) e^(isq) e^(itp)";
const UNITARY: &str = "U U^dag = I";
const GROUP: &str = "U_(t1) U_(t2) = U_(t1+t2)";
const SHIFT: &str = "e^(-itq) p^n e^(itq) = (p + tI)^n";
const EXP_COMMUTATOR: &str = "p e^(itq) - e^(itq) p = t e^(itq)";
const POWER_COMMUTATOR: &str = "p q^n - q^n p = -i n q^(n-1)";
const NORM: &str = "(psi_n, psi_n) = n!";
const CREATOR_NORM: &str = "(a^dag psi_n, a^dag psi_n) = (n+1)!";
const ANNIHILATOR_NORM: &str = "(a psi_n, a psi_n) = n!";
const INTERTWINER: &str = "W q W^dag = q_fock, W p W^dag = p_fock";
const NORMAL_ORDER: &str = "a a^dag = a^dag a + 1";

/// Every reference string a check may carry.
pub const REFERENCES: &[&str] = &[
    CCR,
    LADDER_CCR,
    VACUUM,
    NUMBER_SPECTRUM,
    NUMBER_EIGEN,
    OSCILLATOR,
    HERMITIAN,
    ANALYTIC,
    GROWTH,
    SINGLE_STEP,
    GEOMETRIC,
    TAYLOR,
    WEYL,
    UNITARY,
    GROUP,
    SHIFT,
    EXP_COMMUTATOR,
    POWER_COMMUTATOR,
    NORM,
    CREATOR_NORM,
    ANNIHILATOR_NORM,
    INTERTWINER,
    NORMAL_ORDER,
];

struct Finding {
    measured: f64,
    ok: bool,
    detail: String,
}

impl Finding {
    fn below(measured: f64, tol: f64) -> Self {
        Self {
            measured,
            ok: measured < tol,
            detail: String::new(),
        }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn record(&mut self, name: &str, reference: &str, tolerance: f64, f: impl FnOnce() -> Result<Finding>) {
        self.push(name, reference, tolerance, false, f);
    }

    /// A check whose printed form is known to be off: a passing outcome is
    /// reported as `flagged`.
    fn flag(&mut self, name: &str, reference: &str, tolerance: f64, f: impl FnOnce() -> Result<Finding>) {
        self.push(name, reference, tolerance, true, f);
    }

    fn push(
        &mut self,
        name: &str,
        reference: &str,
        tolerance: f64,
        flagged: bool,
        f: impl FnOnce() -> Result<Finding>,
    ) {
        let (status, measured, detail) = match f() {
            Ok(found) if !found.ok => (Status::Fail, Some(found.measured), found.detail),
            Ok(found) if flagged => (Status::Flagged, Some(found.measured), found.detail),
            Ok(found) => (Status::Pass, Some(found.measured), found.detail),
            Err(e) => (Status::Fail, None, e.to_string()),
        };
        self.checks.push(Check {
            name: name.into(),
            reference: reference.into(),
            status,
            measured: measured.filter(|m| m.is_finite()),
            tolerance: Some(tolerance),
            detail,
        });
    }
}

pub(crate) fn run(suite: Suite, cfg: &RunConfig) -> Vec<Check> {
    let mut r = Recorder { checks: Vec::new() };
    match suite {
        Suite::Fock => fock(&mut r, cfg),
        Suite::Analytic => analytic(&mut r, cfg),
        Suite::Weyl => weyl(&mut r, cfg),
        Suite::Schrodinger => schrodinger(&mut r, cfg),
        Suite::Irregular => irregular(&mut r, cfg),
        Suite::Symbolic => symbolic(&mut r, cfg),
        Suite::All => unreachable!("expanded by run_suite"),
    }
    r.checks
}

fn e(n: usize, dim: usize) -> Result<FockState> {
    FockState::basis(n, dim, BasisConvention::Normalized)
}

fn fock(r: &mut Recorder, cfg: &RunConfig) {
    let d = cfg.dim;
    r.record("fock.ccr_leading_block", CCR, 1e-12, || {
        let c = commutator(&build_momentum(d)?, &build_position(d)?)?;
        let shifted = &c + &ComplexMatrix::identity(d)?.scale(I);
        Ok(Finding::below(shifted.leading_block(d - 1)?.frobenius_norm(), 1e-12))
    });
    r.record("fock.ccr_truncation_entry", CCR, 1e-12, || {
        let c = commutator(&build_momentum(d)?, &build_position(d)?)?;
        let entry = c.get(d - 1, d - 1);
        let predicted = I * (d as f64 - 1.0);
        Ok(Finding::below((entry - predicted).norm(), 1e-12)
            .with(format!("entry ({0},{0}) = {entry}, predicted {predicted}", d - 1)))
    });
    r.record("fock.ladder_ccr_leading_block", LADDER_CCR, 1e-12, || {
        let a = build_annihilator(d)?;
        let c = commutator(&a, &a.adjoint())?;
        let defect = &c - &ComplexMatrix::identity(d)?;
        Ok(Finding::below(defect.leading_block(d - 1)?.frobenius_norm(), 1e-12))
    });
    r.record("fock.hermiticity", HERMITIAN, 1e-14, || {
        let defect = build_position(d)?
            .hermitian_defect()
            .max(build_momentum(d)?.hermitian_defect());
        Ok(Finding::below(defect, 1e-14))
    });
    r.record("fock.number_spectrum", NUMBER_SPECTRUM, 1e-12, || {
        let vals = build_number(d)?.eigvalsh()?;
        let err = vals
            .iter()
            .enumerate()
            .map(|(n, v)| (v - n as f64).abs())
            .fold(0.0, f64::max);
        Ok(Finding::below(err, 1e-12))
    });
    r.record("fock.number_eigenvectors", NUMBER_EIGEN, 1e-12, || {
        let n_op = build_number(d)?;
        let worst = number_eigenpairs(d)?
            .iter()
            .map(|pair| eigen_residual(&n_op, pair))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Finding::below(worst, 1e-12))
    });
    r.record("fock.oscillator_spectrum", OSCILLATOR, 1e-9, || {
        let vals = build_oscillator(d)?.leading_block(d - 1)?.eigvalsh()?;
        let err = vals
            .iter()
            .enumerate()
            .map(|(n, v)| (v - (2 * n + 1) as f64).abs())
            .fold(0.0, f64::max);
        Ok(Finding::below(err, 1e-9).with("leading block of size dim-1"))
    });
    r.record("fock.vacuum_sign", VACUUM, 1e-14, || {
        let q = build_position(d)?;
        let p = build_momentum(d)?;
        let e0 = e(0, d)?.to_vector(d)?;
        let (qv, pv) = (q.apply(&e0), p.apply(&e0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus: Vec<Complex64> = qv.iter().zip(&pv).map(|(x, y)| (x + I * y) * s).collect();
        let minus: Vec<Complex64> = qv.iter().zip(&pv).map(|(x, y)| (x - I * y) * s).collect();
        let (plus, minus) = (vec_norm(&plus), vec_norm(&minus));
        let mut found = Finding::below(plus, 1e-14).with(format!(
            "(q + i p)/sqrt2 annihilates e_0; (q - i p)/sqrt2 e_0 has norm {minus:.6}"
        ));
        found.ok &= minus > 0.5;
        Ok(found)
    });
}

fn random_low_state(rng: &mut SplitMix64, max_mode: usize, dim: usize) -> Result<FockState> {
    let mut c = vec![Complex64::new(0.0, 0.0); dim];
    for z in c.iter_mut().take(max_mode + 1) {
        *z = rng.next_complex();
    }
    FockState::normalized(c)
}

const ANALYTIC_VECTORS: usize = 50;
const ANALYTIC_MAX_MODE: usize = 8;
const ANALYTIC_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
const GROWTH_CASES: usize = 200;

fn analytic(r: &mut Recorder, cfg: &RunConfig) {
    let d = cfg.dim;
    let k_max = cfg.k_max;
    r.record("analytic.random_vectors_converge", ANALYTIC, 0.5, || {
        let ops = [build_position(d)?, build_momentum(d)?];
        let mut rng = SplitMix64::new(cfg.seed);
        let mut misses = 0usize;
        for _ in 0..ANALYTIC_VECTORS {
            let xi = random_low_state(&mut rng, ANALYTIC_MAX_MODE, d)?;
            for op in &ops {
                for t in ANALYTIC_TIMES {
                    if analytic_series(op, &xi, t, k_max)?.verdict != Verdict::Converged {
                        misses += 1;
                    }
                }
            }
        }
        Ok(Finding::below(misses as f64, 0.5).with(format!(
            "{} series (q and p, t in {ANALYTIC_TIMES:?}); measured counts non-converged",
            ANALYTIC_VECTORS * 6
        )))
    });
    r.record("analytic.growth_bound", GROWTH, 0.5, || {
        let ops = [build_position(d)?, build_momentum(d)?];
        let mut rng = SplitMix64::new(cfg.seed ^ 0x5eed);
        let mut violations = 0usize;
        for _ in 0..GROWTH_CASES {
            let top = rng.below(ANALYTIC_MAX_MODE as u64 + 1) as usize;
            let k = 1 + rng.below(20) as usize;
            let phi = random_low_state(&mut rng, top, d)?;
            let op = &ops[rng.below(2) as usize];
            if !check_growth_bound(op, &phi, k)?.holds {
                violations += 1;
            }
        }
        Ok(Finding::below(violations as f64, 0.5).with(format!("{GROWTH_CASES} seeded cases; measured counts violations")))
    });
    r.record("analytic.taylor_vs_expm", TAYLOR, 1e-8, || {
        let ip = build_momentum(d)?.scale(I);
        let e0 = e(0, d)?;
        let series = taylor_exp(&ip, 1.0, &e0, k_max)?;
        let exact = expm(&ip)?.apply(&e0.to_vector(d)?);
        Ok(Finding::below(vec_norm(&vec_sub(series.state.coeffs(), &exact)), 1e-8))
    });
    r.flag("analytic.single_step_constant", SINGLE_STEP, std::f64::consts::SQRT_2, || {
        let q = build_position(d)?;
        let mut worst = 0.0_f64;
        for m in 0..=4 {
            for n in 0..=4 {
                let coeffs = vec![ONE; n + 1];
                worst = worst.max(single_step_constant(&q, m, &coeffs)?.needed_constant);
            }
        }
        Ok(Finding {
            measured: worst,
            ok: worst.is_finite(),
            detail: format!(
                "largest constant needed over unit coefficients on modes m..m+n, m,n <= 4; stated sqrt2 {}",
                if worst <= std::f64::consts::SQRT_2 { "suffices here" } else { "is too small" }
            ),
        })
    });
    r.flag("analytic.geometric_bound", GEOMETRIC, 0.0, || {
        let q = build_position(d)?;
        let k_check = 20.min(d.saturating_sub(2));
        let breakdown = geometric_bound_breakdown(&q, 0, &[ONE], k_check)?;
        let converges = ANALYTIC_TIMES
            .iter()
            .map(|&t| analytic_series(&q, &e(0, d)?, t, k_max))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|rep| rep.verdict == Verdict::Converged);
        Ok(Finding {
            measured: breakdown.map_or(0.0, |k| k as f64),
            ok: converges,
            detail: match breakdown {
                Some(k) => format!("geometric bound first fails at k = {k} for psi_0; the series still converges"),
                None => format!("geometric bound holds up to k = {k_check} for psi_0"),
            },
        })
    });
}

fn weyl(r: &mut Recorder, cfg: &RunConfig) {
    let (d, t, s, guard) = (cfg.dim, cfg.t, cfg.s, cfg.guard());
    r.record("weyl.residual", WEYL, 1e-8, || {
        let rec = weyl_residual(t, s, d, guard, &e(0, d)?)?;
        Ok(Finding::below(rec.residual, 1e-8).with(format!("dim {d}, guard {guard}, xi = e_0")))
    });
    r.record("weyl.phase_convention", WEYL, 1e-8, || {
        let test = phase_convention_test(t, s, d, guard, &e(0, d)?)?;
        let mut found = Finding::below(test.positive, 1e-8)
            .with(format!("e^(+ist) residual {:.3e}, e^(-ist) residual {:.3e}", test.positive, test.negative));
        let degenerate = (s * t).sin().abs() < 1e-6;
        found.ok &= degenerate || test.vanishing(1e-8) == Some(PhaseConvention::Positive);
        Ok(found)
    });
    r.record("weyl.convergence", WEYL, 1e-10, || {
        let dims = [d / 4, d / 2, d];
        let recs = convergence_sweep(t, s, &dims, &e(0, d / 4)?)?;
        let (first, last) = (recs[0].residual, recs[2].residual);
        Ok(Finding {
            measured: last,
            ok: last < 1e-10 || first >= 2.0 * last,
            detail: format!("residuals {:?} at dims {dims:?}", recs.iter().map(|r| r.residual).collect::<Vec<_>>()),
        })
    });
    r.record("weyl.unitarity", UNITARY, 1e-11, || {
        let defect = unitarity_defect(&translation(t, d)?).max(unitarity_defect(&boost(s, d)?));
        Ok(Finding::below(defect, 1e-11))
    });
    r.record("weyl.group_law", GROUP, 1e-10, || {
        Ok(Finding::below(group_law_residual(t, s, d, &e(0, d)?)?, 1e-10))
    });
    r.record("weyl.shift_identity", SHIFT, 1e-7, || {
        let mut worst = 0.0_f64;
        for n in 1..=3 {
            worst = worst.max(shift_identity_residual(t, n, d, &e(0, d)?)?);
        }
        Ok(Finding::below(worst, 1e-7).with("largest residual over n = 1, 2, 3"))
    });
    r.flag("weyl.exp_commutator", EXP_COMMUTATOR, 1e-8, || {
        Ok(Finding::below(exp_commutator_residual(t, d, &e(0, d)?)?, 1e-8)
            .with("printed form mixes s and t; checked the form summed from p q^n - q^n p = -i n q^(n-1)"))
    });
}

fn schrodinger(r: &mut Recorder, cfg: &RunConfig) {
    let g = cfg.grid;
    r.record("schrodinger.vacuum", VACUUM, 1e-6, || {
        let rep = vacuum_annihilation_residual(g.half_width, g.m, g.scheme)?;
        let sign = rep
            .annihilating
            .map_or_else(|| "neither sign".to_string(), |s| s.to_string());
        Ok(Finding::below(rep.plus, 1e-6).with(format!(
            "annihilating: {sign}; (q - i p)/sqrt2 residual {:.3e}",
            rep.minus
        )))
    });
    r.record("schrodinger.oscillator_spectrum", OSCILLATOR, 1e-4, || {
        let vals = grid_oscillator_spectrum(g.half_width, g.m, g.scheme, 6)?;
        let err = vals
            .iter()
            .enumerate()
            .map(|(n, v)| (v - (2 * n + 1) as f64).abs())
            .fold(0.0, f64::max);
        Ok(Finding::below(err, 1e-4).with(format!("lowest six: {vals:.6?}")))
    });
    r.record("schrodinger.intertwiner", INTERTWINER, 1e-6, || {
        let rep = intertwiner_check(g.half_width, g.m, 7)?;
        let worst = rep.position_mismatch.max(rep.momentum_mismatch);
        Ok(Finding::below(worst, 1e-6).with(format!("leading 8 modes; gram defect {:.3e}", rep.gram_defect)))
    });
    r.record("schrodinger.ccr", CCR, 1e-8, || {
        let grid = GridSpec::symmetric(g.half_width, g.m)?;
        let f = GridFunction::from_fn(grid, |x| Complex64::new((-0.5 * x * x).exp() * (1.0 + 0.3 * x), 0.0))?;
        Ok(Finding::below(grid_ccr_residual(&f, g.scheme)?, 1e-8))
    });
}

fn irregular(r: &mut Recorder, cfg: &RunConfig) {
    let (a, b, m) = (cfg.interval.a, cfg.interval.b, cfg.grid.m);
    let (t, s) = (cfg.t, cfg.s);
    r.record("irregular.weyl_closed_form", WEYL, 1e-8, || {
        let spec = IntervalRepSpec::new(a, b, m)?;
        let residual = interval_weyl_residual(&spec, t, s)?;
        let wrap = (-I * (s * (b - a))).exp() - ONE;
        let expected = wrap.norm() * (t / (b - a)).sqrt();
        Ok(Finding::below((residual - expected).abs(), 1e-8)
            .with(format!("residual {residual:.10} on the constant function, wrap formula {expected:.10}")))
    });
    r.record("irregular.weyl_refinement", WEYL, 0.01, || {
        let coarse = interval_weyl_residual(&IntervalRepSpec::new(a, b, m)?, t, s)?;
        let fine = interval_weyl_residual(&IntervalRepSpec::new(a, b, 2 * m)?, t, s)?;
        let rel = (fine - coarse).abs() / coarse.max(f64::MIN_POSITIVE);
        let mut found = Finding::below(rel, 0.01).with(format!("residual {coarse:.6} at m, {fine:.6} at 2m"));
        found.ok &= coarse > 1e-3;
        Ok(found)
    });
    r.record("irregular.spectrum_off_naturals", NUMBER_SPECTRUM, 0.05, || {
        let coarse = interval_number_spectrum(&IntervalRepSpec::new(a, b, m)?, 3)?;
        let fine = interval_number_spectrum(&IntervalRepSpec::new(a, b, 2 * m)?, 3)?;
        let nearest = distance_from_naturals(&coarse).into_iter().fold(f64::INFINITY, f64::min);
        let drift = coarse.iter().zip(&fine).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        Ok(Finding {
            measured: nearest,
            ok: nearest > 0.05 && drift < 0.01,
            detail: format!("lowest three {coarse:.4?}; m to 2m drift {drift:.2e}"),
        })
    });
    r.record("irregular.contrast", NUMBER_SPECTRUM, 0.01, || {
        let specs = [
            IntervalRepSpec::new(0.0, 1.0, 256)?,
            IntervalRepSpec::new(-2.5, 2.5, 320)?,
            IntervalRepSpec::new(-10.0, 10.0, 640)?,
        ];
        let table = interval_vs_line_report(&specs, 0.5, 1.0)?;
        let rows: Vec<String> = table
            .rows
            .iter()
            .map(|row| format!("L={} res={:.2e} dist={:.2e}", row.length, row.weyl_residual, row.spectral_distance))
            .collect();
        let last = table.rows.last().map_or(f64::NAN, |row| row.spectral_distance);
        let mut found = Finding::below(last, 0.01).with(rows.join("; "));
        found.ok &= table.residual_decreasing && table.distance_decreasing;
        Ok(found)
    });
    r.record("irregular.line_limit", NUMBER_SPECTRUM, 1e-2, || {
        let vals = interval_number_spectrum(&IntervalRepSpec::new(-20.0, 20.0, 1024)?, 3)?;
        let err = vals
            .iter()
            .enumerate()
            .map(|(n, v)| (v - n as f64).abs())
            .fold(0.0, f64::max);
        Ok(Finding::below(err, 1e-2).with(format!("(-20,20), m = 1024: {vals:.5?}")))
    });
}

const SYMBOLIC_SAMPLES: usize = 50;
const SYMBOLIC_MAX_LEN: usize = 6;
const SYMBOLIC_DIM: usize = 14;

fn identity_finding(lhs: &str, rhs: &str) -> Result<Finding> {
    let verdict = verify_identity(&parse(lhs)?, &parse(rhs)?);
    Ok(match verdict {
        IdentityVerdict::Equal => Finding::below(0.0, 0.5).with(format!("{lhs} == {rhs}")),
        IdentityVerdict::Unequal { difference } => Finding {
            measured: difference.len() as f64,
            ok: false,
            detail: format!("difference {difference}"),
        },
    })
}

fn factorial(n: u64) -> u64 {
    factorial_exact(n).expect("n <= 20")
}

/// Number of `n <= 10` where the exact squared norm differs from `expected(n)`.
fn norm_mismatches(action: LadderAction, expected: impl Fn(u64) -> u64) -> Result<usize> {
    let mut misses = 0;
    for n in 0..=10u32 {
        if fock_norm_exact(n, action)? != BigRational::from_integer(expected(n as u64).into()) {
            misses += 1;
        }
    }
    Ok(misses)
}

fn symbolic(r: &mut Recorder, cfg: &RunConfig) {
    r.record("symbolic.ladder_ccr", LADDER_CCR, 0.5, || identity_finding("[a,ad]", "I"));
    r.record("symbolic.normal_order_rule", NORMAL_ORDER, 0.5, || identity_finding("a*ad", "ad*a + I"));
    r.record("symbolic.ccr", CCR, 0.5, || identity_finding("[p,q]", "-i*I"));
    r.record("symbolic.ccr_sign_flip", CCR, 0.5, || {
        let verdict = verify_identity(&parse("[p,q]")?, &parse("i*I")?);
        let expected = NormalForm::scalar(&ExactScalar::from_integer(-2) * &ExactScalar::i());
        Ok(match verdict {
            IdentityVerdict::Unequal { difference } if difference == expected => {
                Finding::below(0.0, 0.5).with(format!("[p,q] - i I = {difference}"))
            }
            other => Finding {
                measured: 1.0,
                ok: false,
                detail: format!("unexpected verdict {other:?}"),
            },
        })
    });
    r.record("symbolic.power_commutator", POWER_COMMUTATOR, 0.5, || {
        let failures = (1..=10)
            .filter(|&n| {
                let (lhs, rhs) = power_commutator_sides(n);
                !verify_identity(&lhs, &rhs).is_equal()
            })
            .count();
        Ok(Finding::below(failures as f64, 0.5).with("n = 1..10; measured counts failures"))
    });
    r.record("symbolic.norm", NORM, 0.5, || {
        let misses = norm_mismatches(LadderAction::None, factorial)?;
        Ok(Finding::below(misses as f64, 0.5).with("n = 0..10 exactly; measured counts mismatches"))
    });
    r.record("symbolic.creator_norm", CREATOR_NORM, 0.5, || {
        let misses = norm_mismatches(LadderAction::Adag, |n| factorial(n + 1))?;
        Ok(Finding::below(misses as f64, 0.5).with("n = 0..10 exactly; measured counts mismatches"))
    });
    r.flag("symbolic.annihilator_norm", ANNIHILATOR_NORM, 0.0, || {
        let misses = norm_mismatches(LadderAction::A, |n| n * factorial(n))?;
        let at4 = fock_norm_exact(4, LadderAction::A)?;
        Ok(Finding {
            measured: at4.to_f64().unwrap_or(f64::NAN),
            ok: misses == 0,
            detail: format!(
                "exact value is n*n! for n = 0..10 (n = 4 gives {at4}); printed value n! = {} at n = 4",
                factorial(4)
            ),
        })
    });
    r.record("symbolic.conjugation_series", SHIFT, 0.5, || {
        let mut failures = 0;
        for n in 1..=6 {
            if !conjugation_series(n, 10)?.all_equal() {
                failures += 1;
            }
        }
        Ok(Finding::below(failures as f64, 0.5).with("n = 1..6 to order 10 in t"))
    });
    r.record("symbolic.exp_commutator_series", EXP_COMMUTATOR, 0.5, || {
        let s = exp_commutator_series(8)?;
        let failures = s.terms.iter().filter(|t| !t.equal).count();
        Ok(Finding::below(failures as f64, 0.5).with("Taylor coefficients to order 8 in t"))
    });
    r.record("symbolic.matrix_homomorphism", NORMAL_ORDER, 1e-10, || {
        let mut rng = SplitMix64::new(cfg.seed);
        let mut worst = 0.0_f64;
        for _ in 0..SYMBOLIC_SAMPLES {
            let expr = random_expression(&mut rng, SYMBOLIC_MAX_LEN);
            let block = SYMBOLIC_DIM - expr.word_length();
            let direct = expr.fock_matrix(SYMBOLIC_DIM)?.leading_block(block)?;
            let assembled = normal_order(&expr).to_matrix(SYMBOLIC_DIM)?.leading_block(block)?;
            worst = worst.max((&direct - &assembled).max_abs());
        }
        Ok(Finding::below(worst, 1e-10).with(format!(
            "{SYMBOLIC_SAMPLES} seeded expressions of word length <= {SYMBOLIC_MAX_LEN} at dim {SYMBOLIC_DIM}"
        )))
    });
    r.record("symbolic.adjoint_and_render", NORMAL_ORDER, 0.5, || {
        let mut rng = SplitMix64::new(cfg.seed.wrapping_add(1));
        let mut failures = 0;
        for _ in 0..SYMBOLIC_SAMPLES {
            let expr = random_expression(&mut rng, SYMBOLIC_MAX_LEN);
            let nf = normal_order(&expr);
            if normal_order(&expr.adjoint()) != nf.adjoint() || normal_order(&parse(&nf.to_string())?) != nf {
                failures += 1;
            }
        }
        Ok(Finding::below(failures as f64, 0.5).with("adjoint consistency and render/parse idempotence"))
    });
}
