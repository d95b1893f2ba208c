//! Seeded property suites with machine-readable verdicts.
//!
//! Every check runs `samples` independent trials. Trial `t` of check `name`
//! draws from `trial_rng(seed, name, t)`, so trials may run in parallel and
//! any failure replays from `(seed, name, t)` alone. Results are collected in
//! trial order, which makes the verdict independent of scheduling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine::{
    check_affine_law, check_free_and_rigid, AffineGroup, MatrixGroup, ProductGroup, TStarGroup,
};
use crate::error::{Error, Result};
use crate::expsum::{ExpSum, DEFAULT_MAX_REFINEMENTS};
use crate::golden;
use crate::hyperbolic::{certify_admissible, is_essentially_hyperbolic, lowest_entry_dominates};
use crate::integerize::{integerize, is_integral};
use crate::lsa::{
    dgamma, gamma_bar, lambda, lambda_from_closed_form, lambda_via_lsa, lsa_product,
    superdiagonal_part, t_inv, t_iso,
};
use crate::matrix::{nilpotent_exp, unipotent_log, TriMat};
use crate::order::{Line, LineKind, OrderedGroup};
use crate::sample::{self, trial_rng};
use crate::scalar::Rat;
use crate::tstar::{
    check_ten_identities, conjugate_by_diag, lambda_conjugation_multiplier, phi_bar,
    random_strict_upper, tstar_essentially_free, LemmaSample, TStarElem, IDENTITY_TAGS,
};
use crate::wreath::{iterated_wreath, IteratedSpec, Wreath};

/// Largest supported matrix size.
pub const MAX_N: usize = 8;

/// Points sampled per element in freeness and rigidity checks.
pub const POINTS_PER_ELEMENT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lsa,
    Embedding,
    Hyperbolicity,
    Integerize,
    Tstar,
    Wreath,
    All,
}

impl Suite {
    pub const COMPONENTS: [Suite; 6] = [
        Suite::Lsa,
        Suite::Embedding,
        Suite::Hyperbolicity,
        Suite::Integerize,
        Suite::Tstar,
        Suite::Wreath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lsa => "lsa",
            Suite::Embedding => "embedding",
            Suite::Hyperbolicity => "hyperbolicity",
            Suite::Integerize => "integerize",
            Suite::Tstar => "tstar",
            Suite::Wreath => "wreath",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::COMPONENTS
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown suite '{s}'")))
    }
}

/// Parses `4`, `2..5`, `2..=5` or `2,3,5`. Ranges are inclusive.
pub fn parse_n_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::ConfigInvalid(format!("cannot parse dimension range '{s}'"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n_range: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub max_refinements: u32,
}

impl SuiteConfig {
    pub fn new(suite: Suite, n_range: Vec<usize>, samples: usize, seed: u64) -> Self {
        SuiteConfig {
            suite,
            n_range,
            samples,
            seed,
            max_refinements: DEFAULT_MAX_REFINEMENTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::ConfigInvalid("samples must be at least 1".into()));
        }
        if self.n_range.is_empty() {
            return Err(Error::ConfigInvalid("dimension range is empty".into()));
        }
        if let Some(n) = self.n_range.iter().find(|&&n| !(2..=MAX_N).contains(&n)) {
            return Err(Error::ConfigInvalid(format!(
                "dimension {n} outside the supported range 2..={MAX_N}"
            )));
        }
        if self.max_refinements == 0 {
            return Err(Error::ConfigInvalid(
                "max_refinements must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// The statement this check exercises.
    pub anchor: String,
    pub trials: usize,
    pub failures: usize,
    /// First failing trial, in trial order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `Ok(None)` passes, `Ok(Some(witness))` fails, `Err` fails with the error as witness.
pub type Outcome = Result<Option<String>>;

fn show<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| format!("<{e}>"))
}

fn flatten(trial: u64, seed: u64, outcome: Outcome) -> Option<String> {
    let w = match outcome {
        Ok(None) => return None,
        Ok(Some(w)) => w,
        Err(e) => format!("error: {e}"),
    };
    Some(format!("seed {seed}, trial {trial}: {w}"))
}

fn summarize(name: String, anchor: &str, outcomes: Vec<Option<String>>) -> CheckResult {
    let failures = outcomes.iter().filter(|o| o.is_some()).count();
    CheckResult {
        name,
        anchor: anchor.to_string(),
        trials: outcomes.len(),
        failures,
        witness: outcomes.into_iter().flatten().next(),
    }
}

/// Runs `trials` independent trials of one check.
pub fn run_check<F>(name: &str, anchor: &str, seed: u64, trials: usize, f: F) -> CheckResult
where
    F: Fn(&mut ChaCha8Rng, u64) -> Outcome + Sync,
{
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| flatten(t, seed, f(&mut trial_rng(seed, name, t), t)))
        .collect();
    summarize(name.to_string(), anchor, outcomes)
}

/// Runs trials that each produce one outcome per named check.
fn run_multi<F>(
    label: &str,
    checks: &[(String, String)],
    seed: u64,
    trials: usize,
    f: F,
) -> Vec<CheckResult>
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<Vec<Option<String>>> + Sync,
{
    let per_trial: Vec<Vec<Option<String>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| match f(&mut trial_rng(seed, label, t), t) {
            Ok(v) => v.into_iter().map(|o| flatten(t, seed, Ok(o))).collect(),
            Err(e) => vec![flatten(t, seed, Err(e)); checks.len()],
        })
        .collect();
    checks
        .iter()
        .enumerate()
        .map(|(k, (name, anchor))| {
            summarize(
                name.clone(),
                anchor,
                per_trial.iter().map(|row| row[k].clone()).collect(),
            )
        })
        .collect()
}

fn fail_unless(ok: bool, witness: impl FnOnce() -> String) -> Outcome {
    Ok(if ok { None } else { Some(witness()) })
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<Verdict> {
    cfg.validate()?;
    let suites: Vec<Suite> = match cfg.suite {
        Suite::All => Suite::COMPONENTS.to_vec(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    for suite in suites {
        checks.extend(match suite {
            Suite::Lsa => lsa_suite(cfg),
            Suite::Embedding => embedding_suite(cfg),
            Suite::Hyperbolicity => hyperbolicity_suite(cfg),
            Suite::Integerize => integerize_suite(cfg),
            Suite::Tstar => tstar_suite(cfg),
            Suite::Wreath => wreath_suite(cfg),
            Suite::All => unreachable!(),
        });
    }
    Ok(Verdict {
        suite: cfg.suite.name().to_string(),
        checks,
    })
}

fn random_ut4(rng: &mut ChaCha8Rng) -> TriMat<Rat> {
    sample::strict_upper_with(rng, 4, sample::rational)
}

fn random_slots(rng: &mut ChaCha8Rng) -> golden::Slots {
    let mut v = || sample::rational(rng);
    golden::Slots {
        a: v(),
        b: v(),
        c: v(),
        d: v(),
        e: v(),
        f: v(),
    }
}

pub fn closed_form(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("lsa/closed-form/n={n}"),
        "closed form of λ equals the matrix of left multiplication",
        seed,
        samples,
        |rng, _| {
            let x = sample::strict_upper(rng, n);
            fail_unless(lambda_via_lsa(&x)? == lambda_from_closed_form(&x)?, || {
                format!("x = {}", show(&x))
            })
        },
    )
}

pub fn left_symmetry(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("lsa/left-symmetry/n={n}"),
        "associator is symmetric in its first two arguments",
        seed,
        samples,
        |rng, _| {
            let x = sample::strict_upper(rng, n);
            let y = sample::strict_upper(rng, n);
            let z = sample::strict_upper(rng, n);
            let assoc = |a: &TriMat<Rat>, b: &TriMat<Rat>| -> Result<TriMat<Rat>> {
                lsa_product(&lsa_product(a, b)?, &z)?.sub(&lsa_product(a, &lsa_product(b, &z)?)?)
            };
            fail_unless(assoc(&x, &y)? == assoc(&y, &x)?, || {
                format!("x = {}, y = {}, z = {}", show(&x), show(&y), show(&z))
            })
        },
    )
}

pub fn commutator(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("lsa/commutator/n={n}"),
        "x·y − y·x is the matrix commutator",
        seed,
        samples,
        |rng, _| {
            let x = sample::strict_upper(rng, n);
            let y = sample::strict_upper(rng, n);
            let lhs = lsa_product(&x, &y)?.sub(&lsa_product(&y, &x)?)?;
            fail_unless(lhs == x.commutator(&y)?, || {
                format!("x = {}, y = {}", show(&x), show(&y))
            })
        },
    )
}

pub fn grading(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("lsa/grading/n={n}"),
        "superdiagonals multiply as σ_i·σ_j ⊆ σ_{i+j}",
        seed,
        samples,
        |rng, _| {
            let i = rng.gen_range(1..n);
            let j = rng.gen_range(1..n);
            let x = superdiagonal_part(&sample::strict_upper(rng, n), i);
            let y = superdiagonal_part(&sample::strict_upper(rng, n), j);
            let p = lsa_product(&x, &y)?;
            fail_unless(p == superdiagonal_part(&p, i + j), || {
                format!("i = {i}, j = {j}, x = {}, y = {}", show(&x), show(&y))
            })
        },
    )
}

pub fn lambda_represents_product(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("lsa/lambda-represents-product/n={n}"),
        "λ(x)·t(y) = t(x·y) and t is invertible",
        seed,
        samples,
        |rng, _| {
            let x = sample::strict_upper(rng, n);
            let y = sample::strict_upper(rng, n);
            let ok = lambda(&x)?.mul_vec(&t_iso(&y)?)? == t_iso(&lsa_product(&x, &y)?)?
                && t_inv(n, &t_iso(&y)?)? == y;
            fail_unless(ok, || format!("x = {}, y = {}", show(&x), show(&y)))
        },
    )
}

pub fn golden_product(seed: u64, samples: usize) -> CheckResult {
    run_check(
        "lsa/golden-product/n=4",
        "worked n = 4 example: x·y",
        seed,
        samples,
        |rng, _| {
            let x = random_ut4(rng);
            let y = random_ut4(rng);
            let expected =
                golden::product(&golden::Ut4::from_matrix(&x), &golden::Ut4::from_matrix(&y));
            fail_unless(lsa_product(&x, &y)? == expected, || {
                format!("x = {}, y = {}", show(&x), show(&y))
            })
        },
    )
}

pub fn golden_lambda(seed: u64, samples: usize) -> CheckResult {
    run_check(
        "lsa/golden-lambda/n=4",
        "worked n = 4 example: λ(x)",
        seed,
        samples,
        |rng, _| {
            let x = random_ut4(rng);
            let expected = golden::lambda(&golden::Ut4::from_matrix(&x));
            let ok = lambda_via_lsa(&x)? == expected && lambda_from_closed_form(&x)? == expected;
            fail_unless(ok, || format!("x = {}", show(&x)))
        },
    )
}

pub fn golden_dgamma(seed: u64, samples: usize) -> CheckResult {
    run_check(
        "lsa/golden-dgamma/n=4",
        "worked n = 4 example: dγ̄(x) with column t(x)",
        seed,
        samples,
        |rng, _| {
            let x = random_ut4(rng);
            fail_unless(
                dgamma(&x)? == golden::dgamma(&golden::Ut4::from_matrix(&x)),
                || format!("x = {}", show(&x)),
            )
        },
    )
}

fn lsa_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let (seed, samples) = (cfg.seed, cfg.samples);
    let mut out = Vec::new();
    for &n in &cfg.n_range {
        out.push(closed_form(n, seed, samples));
        out.push(left_symmetry(n, seed, samples));
        out.push(commutator(n, seed, samples));
        out.push(grading(n, seed, samples));
        out.push(lambda_represents_product(n, seed, samples));
    }
    out.push(golden_product(seed, samples));
    out.push(golden_lambda(seed, samples));
    out.push(golden_dgamma(seed, samples));
    out
}

pub fn homomorphism(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("embedding/homomorphism/n={n}"),
        "γ̄(AB) = γ̄(A)γ̄(B)",
        seed,
        samples,
        |rng, _| {
            let a = sample::unitriangular(rng, n);
            let b = sample::unitriangular(rng, n);
            let lhs = gamma_bar(&a.mul(&b)?)?.matrix;
            let rhs = gamma_bar(&a)?.matrix.mul(&gamma_bar(&b)?.matrix)?;
            fail_unless(lhs == rhs, || format!("A = {}, B = {}", show(&a), show(&b)))
        },
    )
}

pub fn bracket(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("embedding/bracket/n={n}"),
        "dγ̄([x, y]) = [dγ̄(x), dγ̄(y)]",
        seed,
        samples,
        |rng, _| {
            let x = sample::strict_upper(rng, n);
            let y = sample::strict_upper(rng, n);
            let lhs = dgamma(&x.commutator(&y)?)?;
            let rhs = dgamma(&x)?.commutator(&dgamma(&y)?)?;
            fail_unless(lhs == rhs, || format!("x = {}, y = {}", show(&x), show(&y)))
        },
    )
}

pub fn exp_log(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("embedding/exp-log/n={n}"),
        "exp and log are inverse and γ̄(exp x) = exp(dγ̄(x))",
        seed,
        samples,
        |rng, _| {
            let x = sample::strict_upper(rng, n);
            let g = nilpotent_exp(&x)?;
            let ok =
                unipotent_log(&g)? == x && gamma_bar(&g)?.matrix == nilpotent_exp(&dgamma(&x)?)?;
            fail_unless(ok, || format!("x = {}", show(&x)))
        },
    )
}

pub fn inverse(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("embedding/inverse/n={n}"),
        "γ̄(A⁻¹) = γ̄(A)⁻¹ and γ̄(A) is unitriangular",
        seed,
        samples,
        |rng, _| {
            let a = sample::unitriangular(rng, n);
            let ga = gamma_bar(&a)?.matrix;
            let ok = ga.is_unitriangular()
                && gamma_bar(&a.upper_inverse()?)?.matrix == ga.upper_inverse()?;
            fail_unless(ok, || format!("A = {}", show(&a)))
        },
    )
}

pub fn golden_log(seed: u64, samples: usize) -> CheckResult {
    run_check(
        "embedding/golden-log/n=4",
        "worked n = 4 example: log A",
        seed,
        samples,
        |rng, _| {
            let s = random_slots(rng);
            let a = golden::example_a(&s);
            fail_unless(unipotent_log(&a)? == golden::log_a(&s), || show(&a))
        },
    )
}

pub fn golden_gamma_bar(seed: u64, samples: usize) -> CheckResult {
    run_check(
        "embedding/golden-gamma-bar/n=4",
        "worked n = 4 example: γ̄(A)",
        seed,
        samples,
        |rng, _| {
            let s = random_slots(rng);
            let a = golden::example_a(&s);
            fail_unless(gamma_bar(&a)?.matrix == golden::gamma_bar(&s), || show(&a))
        },
    )
}

fn embedding_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let (seed, samples) = (cfg.seed, cfg.samples);
    let mut out = Vec::new();
    for &n in &cfg.n_range {
        out.push(homomorphism(n, seed, samples));
        out.push(bracket(n, seed, samples));
        out.push(exp_log(n, seed, samples));
        out.push(inverse(n, seed, samples));
    }
    out.push(golden_log(seed, samples));
    out.push(golden_gamma_bar(seed, samples));
    out
}

pub fn admissible(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("hyperbolicity/admissible/n={n}"),
        "γ̄(g) is essentially hyperbolic for g ≠ 1, with the block vanishing pattern",
        seed,
        samples,
        |rng, _| {
            let g = sample::nontrivial_unitriangular(rng, n);
            let report = certify_admissible(&unipotent_log(&g)?)?;
            let direct = is_essentially_hyperbolic(&gamma_bar(&g)?.matrix)?;
            fail_unless(report.passed() && direct, || {
                format!("g = {}, report = {}", show(&g), show(&report))
            })
        },
    )
}

pub fn readings_agree(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("hyperbolicity/readings-agree/n={n}"),
        "implication form and lowest-entry form of essential hyperbolicity agree",
        seed,
        samples,
        |rng, _| {
            let mut m = sample::strict_upper_with(rng, n + 1, |r| sample::sparse_rational(r, 0.6));
            for i in 0..=n {
                m.set(i, i, Rat::one());
            }
            let g = sample::nontrivial_unitriangular(rng, n);
            for candidate in [m, gamma_bar(&g)?.matrix] {
                if candidate.is_identity() {
                    continue;
                }
                if is_essentially_hyperbolic(&candidate)? != lowest_entry_dominates(&candidate)? {
                    return Ok(Some(format!("matrix = {}", show(&candidate))));
                }
            }
            Ok(None)
        },
    )
}

pub fn gamma_bar_free_and_rigid(n: usize, seed: u64, samples: usize) -> CheckResult {
    let group = MatrixGroup::gamma_bar_image(n, false);
    run_check(
        &format!("hyperbolicity/free-and-rigid/n={n}"),
        "nontrivial γ̄(g) moves every point with constant displacement sign",
        seed,
        samples,
        |rng, _| {
            let g = group.sample_nontrivial(rng);
            let report = check_free_and_rigid(&group, &g, POINTS_PER_ELEMENT, rng.gen())?;
            fail_unless(report.passed() && report.certified == Some(true), || {
                format!("g = {}, report = {}", show(&g), show(&report))
            })
        },
    )
}

pub fn gamma_bar_affine_law(n: usize, seed: u64, samples: usize) -> CheckResult {
    let group = MatrixGroup::gamma_bar_image(n, false);
    run_check(
        &format!("hyperbolicity/affine-law/n={n}"),
        "d(gx, gy) = α_g d(x, y) and order preservation for γ̄(g)",
        seed,
        samples,
        |rng, _| {
            let g = group.sample_elem(rng);
            let report = check_affine_law(&group, &g, 5, rng.gen())?;
            fail_unless(report.passed(), || {
                format!("g = {}, report = {}", show(&g), show(&report))
            })
        },
    )
}

fn hyperbolicity_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let (seed, samples) = (cfg.seed, cfg.samples);
    let mut out = Vec::new();
    for &n in &cfg.n_range {
        out.push(admissible(n, seed, samples));
        out.push(readings_agree(n, seed, samples));
        out.push(gamma_bar_free_and_rigid(n, seed, samples));
        out.push(gamma_bar_affine_law(n, seed, samples));
    }
    out
}

pub fn integerize_generators(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("integerize/generators/n={n}"),
        "diagonal conjugation makes an inverse-closed set integral and keeps hyperbolicity",
        seed,
        samples,
        |rng, _| {
            let k = rng.gen_range(1..=3);
            let mut gens = Vec::new();
            for _ in 0..k {
                let a = sample::unitriangular(rng, n);
                gens.push(a.upper_inverse()?);
                gens.push(a);
            }
            let res = integerize(&gens)?;
            for (a, c) in gens.iter().zip(&res.conjugates) {
                if !is_integral(c) || !c.is_unitriangular() || *c != a.conjugate_by(&res.p)? {
                    return Ok(Some(format!("A = {}, P = {}", show(a), show(&res.p))));
                }
                if a.is_identity() {
                    continue;
                }
                let same = is_essentially_hyperbolic(a)? == is_essentially_hyperbolic(c)?
                    && is_essentially_hyperbolic(&gamma_bar(a)?.matrix)?
                        == is_essentially_hyperbolic(&gamma_bar(c)?.matrix)?;
                if !same {
                    return Ok(Some(format!("verdict changed for A = {}", show(a))));
                }
            }
            Ok(None)
        },
    )
}

pub fn integerize_gamma_bar(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("integerize/gamma-bar-image/n={n}"),
        "γ̄(A) and its inverse conjugate into integer matrices",
        seed,
        samples,
        |rng, _| {
            let a = sample::unitriangular(rng, n);
            let ga = gamma_bar(&a)?.matrix;
            let res = integerize(&[ga.clone(), ga.upper_inverse()?])?;
            let ok = res
                .conjugates
                .iter()
                .all(|c| is_integral(c) && c.is_unitriangular());
            fail_unless(ok, || format!("A = {}", show(&a)))
        },
    )
}

fn integerize_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let (seed, samples) = (cfg.seed, cfg.samples);
    let mut out = Vec::new();
    for &n in &cfg.n_range {
        out.push(integerize_generators(n, seed, samples));
        out.push(integerize_gamma_bar(n, seed, samples));
    }
    out
}

/// One check per commutation identity, all evaluated on the same draws.
pub fn ten_identities(n: usize, seed: u64, samples: usize) -> Vec<CheckResult> {
    let names: Vec<(String, String)> = IDENTITY_TAGS
        .iter()
        .map(|tag| {
            (
                format!("tstar/identity-{tag}/n={n}"),
                format!("commutation identity {tag} for diagonal conjugation"),
            )
        })
        .collect();
    run_multi(
        &format!("tstar/identities/n={n}"),
        &names,
        seed,
        samples,
        |rng, _| {
            let s = LemmaSample::random(rng, n);
            let verdicts = check_ten_identities(&s)?;
            let w = format!("u = {}, q = {}, x = {}", show(&s.u), show(&s.q), show(&s.x));
            Ok(verdicts
                .iter()
                .map(|&ok| (!ok).then(|| w.clone()))
                .collect())
        },
    )
}

pub fn lambda_multiplier(n: usize, seed: u64, samples: usize) -> CheckResult {
    run_check(
        &format!("tstar/lambda-multiplier/n={n}"),
        "conjugating x by d rescales each entry of λ(x) by the predicted exponential",
        seed,
        samples,
        |rng, _| {
            let g = TStarElem::random(rng, n);
            let x = random_strict_upper(rng, n);
            let before = lambda(&x)?;
            let after = lambda(&conjugate_by_diag(&g.d, &x)?)?;
            let m = before.dim();
            for rho in 1..=m {
                for sigma in 1..=m {
                    let scaled = before.get(rho - 1, sigma - 1).clone()
                        * lambda_conjugation_multiplier(&g.d, rho, sigma);
                    if &scaled != after.get(rho - 1, sigma - 1) {
                        return Ok(Some(format!(
                            "entry ({rho},{sigma}), q = {}, x = {}",
                            show(&g.d),
                            show(&x)
                        )));
                    }
                }
            }
            Ok(None)
        },
    )
}

/// Trial 0 is a pure diagonal element and trial 1 a pure unipotent one.
pub fn tstar_free(n: usize, max_refinements: u32, seed: u64, samples: usize) -> CheckResult {
    let group = TStarGroup::new(n, max_refinements);
    run_check(
        &format!("tstar/essentially-free/n={n}"),
        "every nontrivial element acts essentially hyperbolically on ℝ^{m+n}",
        seed,
        samples,
        |rng, t| {
            let g = match t {
                0 => loop {
                    let q: Vec<Rat> = (0..n).map(|_| sample::rational(rng)).collect();
                    if q.iter().any(|v| !v.is_zero()) {
                        break TStarElem::diagonal(q);
                    }
                },
                1 => TStarElem::unipotent(
                    sample::nontrivial_unitriangular(rng, n).map(|v| ExpSum::constant(v.clone())),
                )?,
                _ => group.sample_nontrivial(rng),
            };
            let free = tstar_essentially_free(&g)?;
            let positive = phi_bar(&g)?.has_positive_diagonal(max_refinements)?;
            let report = check_free_and_rigid(&group, &g, 5, rng.gen())?;
            fail_unless(free && positive && report.passed(), || {
                format!("g = {}, report = {}", show(&g), show(&report))
            })
        },
    )
}

fn tstar_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let (seed, samples) = (cfg.seed, cfg.samples);
    let mut out = Vec::new();
    for &n in &cfg.n_range {
        out.extend(ten_identities(n, seed, samples));
        out.push(lambda_multiplier(n, seed, samples));
        out.push(tstar_free(n, cfg.max_refinements, seed, samples));
    }
    out
}

pub fn group_axioms<H: AffineGroup>(
    prefix: &str,
    label: &str,
    group: &H,
    seed: u64,
    samples: usize,
) -> CheckResult {
    run_check(
        &format!("{prefix}/group-axioms"),
        &format!("{label}: identity, inverses and associativity"),
        seed,
        samples,
        |rng, _| {
            let (a, b, c) = (
                group.sample_elem(rng),
                group.sample_elem(rng),
                group.sample_elem(rng),
            );
            let ab_c = group.mul(&group.mul(&a, &b)?, &c)?;
            let a_bc = group.mul(&a, &group.mul(&b, &c)?)?;
            let e = group.identity();
            let inv = group.inv(&a)?;
            let ok = ab_c == a_bc
                && group.mul(&e, &a)? == a
                && group.mul(&a, &e)? == a
                && group.is_identity(&group.mul(&a, &inv)?)
                && group.is_identity(&group.mul(&inv, &a)?);
            fail_unless(ok, || {
                format!("a = {}, b = {}, c = {}", show(&a), show(&b), show(&c))
            })
        },
    )
}

pub fn action_axiom<H: AffineGroup>(
    prefix: &str,
    label: &str,
    group: &H,
    seed: u64,
    samples: usize,
) -> CheckResult {
    run_check(
        &format!("{prefix}/action-axiom"),
        &format!("{label}: g·(h·p) = (gh)·p and 1·p = p"),
        seed,
        samples,
        |rng, _| {
            let (g, h) = (group.sample_elem(rng), group.sample_elem(rng));
            let p = group.space().sample(rng);
            let ok = group.act(&g, &group.act(&h, &p)?)? == group.act(&group.mul(&g, &h)?, &p)?
                && group.act(&group.identity(), &p)? == p;
            fail_unless(ok, || {
                format!("g = {}, h = {}, p = {}", show(&g), show(&h), show(&p))
            })
        },
    )
}

pub fn affine_law<H: AffineGroup>(
    prefix: &str,
    label: &str,
    group: &H,
    seed: u64,
    samples: usize,
) -> CheckResult {
    run_check(
        &format!("{prefix}/affine-law"),
        &format!("{label}: d(gp, gq) = α_g d(p, q), α is a homomorphism, order is preserved"),
        seed,
        samples,
        |rng, _| {
            let space = group.space();
            let (g, h) = (group.sample_elem(rng), group.sample_elem(rng));
            let (p, q) = (space.sample(rng), space.sample(rng));
            let (gp, gq) = (group.act(&g, &p)?, group.act(&g, &q)?);
            let delta = space.dist(&p, &q)?;
            let law = space.dist(&gp, &gq)? == group.dilate(&g, &delta)?;
            let order = space.compare(&p, &q)? == space.compare(&gp, &gq)?;
            let hom = group.dilate(&group.mul(&g, &h)?, &delta)?
                == group.dilate(&g, &group.dilate(&h, &delta)?)?;
            fail_unless(law && order && hom, || {
                format!(
                    "g = {}, h = {}, p = {}, q = {}",
                    show(&g),
                    show(&h),
                    show(&p),
                    show(&q)
                )
            })
        },
    )
}

/// Each trial draws one nontrivial element and checks it on [`POINTS_PER_ELEMENT`] points.
pub fn free_and_rigid<H: AffineGroup>(
    prefix: &str,
    label: &str,
    group: &H,
    seed: u64,
    samples: usize,
) -> CheckResult {
    run_check(
        &format!("{prefix}/free-and-rigid"),
        &format!("{label}: nontrivial elements fix no point and keep one displacement sign"),
        seed,
        samples,
        |rng, _| {
            let g = group.sample_nontrivial(rng);
            let report = check_free_and_rigid(group, &g, POINTS_PER_ELEMENT, rng.gen())?;
            fail_unless(report.passed(), || {
                format!("g = {}, report = {}", show(&g), show(&report))
            })
        },
    )
}

/// `γ̄(UT(n, ℤ)) ≀ ℤ`.
pub fn gamma_bar_wreath(n: usize) -> Wreath<MatrixGroup> {
    Wreath::new(MatrixGroup::gamma_bar_image(n, true), Line::INTEGERS)
}

fn wreath_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let (seed, samples) = (cfg.seed, cfg.samples);
    let mut out = Vec::new();
    for &n in &cfg.n_range {
        let w = gamma_bar_wreath(n);
        let prefix = format!("wreath/gamma-bar-int/n={n}");
        let label = "γ̄(UT(n,ℤ)) ≀ ℤ";
        out.push(group_axioms(&prefix, label, &w, seed, samples));
        out.push(action_axiom(&prefix, label, &w, seed, samples));
        out.push(affine_law(&prefix, label, &w, seed, samples));
        out.push(free_and_rigid(&prefix, label, &w, seed, samples));
    }
    let iterated: [(&str, &str, Vec<LineKind>); 3] = [
        ("wreath/iterated/Z-Z", "ℤ ≀ ℤ", vec![LineKind::Int; 2]),
        ("wreath/iterated/Z-Z-Z", "ℤ ≀ ℤ ≀ ℤ", vec![LineKind::Int; 3]),
        (
            "wreath/iterated/Z-Q",
            "ℤ ≀ ℚ",
            vec![LineKind::Int, LineKind::Rat],
        ),
    ];
    for (prefix, label, levels) in iterated {
        let group = iterated_wreath(&IteratedSpec { levels }).expect("nonempty levels");
        out.push(group_axioms(prefix, label, &group, seed, samples));
        out.push(action_axiom(prefix, label, &group, seed, samples));
        out.push(affine_law(prefix, label, &group, seed, samples));
        out.push(free_and_rigid(prefix, label, &group, seed, samples));
    }
    let product = ProductGroup::new(vec![
        MatrixGroup::gamma_bar_image(2, false),
        MatrixGroup::gamma_bar_image(3, false),
    ]);
    let (prefix, label) = (
        "wreath/product/n=2,3",
        "lexicographic product γ̄(UT(2)) × γ̄(UT(3))",
    );
    out.push(action_axiom(prefix, label, &product, seed, samples));
    out.push(affine_law(prefix, label, &product, seed, samples));
    out.push(free_and_rigid(prefix, label, &product, seed, samples));
    out
}
