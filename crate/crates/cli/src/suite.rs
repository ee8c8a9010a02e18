//! Randomized property suite: every property runs on `trials` seeded draws;
//! failing draws are written out as operator files for replay.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use epmod::compacts::{
    annihilator_from_blocks, ideal_equality_check, ideal_from_blocks, left_mult_matrix,
    random_commuting_ep_elements, BlockAlgebra,
};
use epmod::ep::{block_decompose, canonical_form, ep_factor_adjoint, ep_factor_commuting, random_commuting_ep_pair, random_ep};
use epmod::products::{commuting_ep_product, commuting_mp_check, ep_product_conditions, kernel_split_check};
use epmod::pseudoinverse::{default_schedule, mp_identities_check, mp_tikhonov, penrose_residuals};
use epmod::random::{
    complex_gaussian, derived_seeds, random_exact_rank, random_isometry, random_unitary, random_with_rank,
    rng_from_seed,
};
use epmod::subspace::{complement, intersect, kernel_of, principal_angles, range_of, sum};
use epmod::{is_ep, mp_svd, ComplexMatrix, NumericalContext, Subspace};
use rand::Rng;

use crate::io::{dump_path, save_operator};
use crate::report::{fmt_num, ContextEcho, RunReport, Status};
use crate::InputError;

const PENROSE_TOL: f64 = 1e-10;
const TIKHONOV_TOL: f64 = 1e-5;
const MONOTONE_SLACK: f64 = 1e-14;
const FACTOR_TOL: f64 = 1e-10;
const BLOCK_TOL: f64 = 1e-9;
const PRODUCT_MP_TOL: f64 = 1e-8;
const LATTICE_TOL: f64 = 1e-9;
const HOMOMORPHISM_TOL: f64 = 1e-10;
/// Failing trials listed by index in a property's detail line.
const LISTED_FAILURES: usize = 5;

/// Outcome of one draw.
#[derive(Debug, Clone)]
pub struct Trial {
    pub passed: bool,
    pub detail: String,
    /// Operators written out when the trial fails.
    pub operators: Vec<(&'static str, ComplexMatrix)>,
}

impl Trial {
    fn new(passed: bool, detail: impl Into<String>, operators: Vec<(&'static str, ComplexMatrix)>) -> Self {
        Trial { passed, detail: detail.into(), operators }
    }
}

pub type PropertyFn = fn(usize, u64, &NumericalContext) -> epmod::Result<Trial>;

#[derive(Clone, Copy)]
pub struct Property {
    pub name: &'static str,
    pub check: PropertyFn,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub dump_dir: PathBuf,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, trials: 20, dim: 6, dump_dir: PathBuf::from("epmod-failures") }
    }
}

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 64;

pub fn standard_properties() -> Vec<Property> {
    vec![
        Property { name: "penrose", check: penrose },
        Property { name: "tikhonov", check: tikhonov },
        Property { name: "ep-equivalence", check: ep_equivalence },
        Property { name: "ep-factorizations", check: ep_factorizations },
        Property { name: "block-formula", check: block_formula },
        Property { name: "commuting-products", check: commuting_products },
        Property { name: "product-conditions", check: product_conditions },
        Property { name: "subspace-lattice", check: subspace_lattice },
        Property { name: "compacts", check: compacts },
        Property { name: "unitary-invariance", check: unitary_invariance },
    ]
}

/// Runs `properties` and collects one line per property. Trials run in
/// parallel but are reported in order, so the output depends only on the
/// configuration.
pub fn run_suite(
    config: &SuiteConfig,
    ctx: &NumericalContext,
    properties: &[Property],
) -> Result<RunReport, InputError> {
    if !(MIN_DIM..=MAX_DIM).contains(&config.dim) {
        return Err(InputError::Usage(format!(
            "--dim must lie in {MIN_DIM}..={MAX_DIM}, got {}",
            config.dim
        )));
    }
    let mut report = RunReport::new(
        format!("suite --trials {} --dim {}", config.trials, config.dim),
        ContextEcho::new(ctx, Some(config.seed)),
    );
    if config.trials == 0 {
        return Ok(report);
    }
    for (index, property) in properties.iter().enumerate() {
        let seeds = derived_seeds(config.seed, index as u64, config.trials);
        let outcomes: Vec<Trial> = seeds
            .par_iter()
            .map(|&s| {
                (property.check)(config.dim, s, ctx)
                    .unwrap_or_else(|e| Trial::new(false, format!("error: {e}"), Vec::new()))
            })
            .collect();

        let failed: Vec<usize> = (0..outcomes.len()).filter(|&i| !outcomes[i].passed).collect();
        let mut detail = format!("{}/{} passed", outcomes.len() - failed.len(), outcomes.len());
        if !failed.is_empty() {
            let listed: Vec<String> = failed
                .iter()
                .take(LISTED_FAILURES)
                .map(|&i| format!("#{i} ({})", outcomes[i].detail))
                .collect();
            detail.push_str(&format!("; failing trials {}", listed.join(", ")));
            let written = dump_failures(&config.dump_dir, property.name, &failed, &outcomes, &seeds)?;
            if written > 0 {
                detail.push_str(&format!("; {written} operator files in {}", config.dump_dir.display()));
            }
        }
        let status = if failed.is_empty() { Status::Pass } else { Status::Fail };
        report.push(format!("property {}", property.name), status, None, detail);
    }
    Ok(report)
}

fn dump_failures(
    dir: &Path,
    property: &str,
    failed: &[usize],
    outcomes: &[Trial],
    seeds: &[u64],
) -> Result<usize, InputError> {
    let mut written = 0;
    for &i in failed {
        for (label, m) in &outcomes[i].operators {
            let stem = format!("{property}-trial{i}-{label}");
            let name = format!("{property} trial {i} (seed {}) {label}", seeds[i]);
            save_operator(&dump_path(dir, &stem)?, m, Some(&name))?;
            written += 1;
        }
    }
    Ok(written)
}

fn half_rank(n: usize) -> usize {
    (n / 2).max(1)
}

fn penrose(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let mut rng = rng_from_seed(seed);
    let t = random_with_rank(&mut rng, n, n, half_rank(n), 0.1, 2.0);
    let g = mp_svd(&t, ctx)?.inverse;
    let worst = penrose_residuals(&t, &g, ctx)?.relative_residuals(&t).into_iter().fold(0.0, f64::max);
    let identities = mp_identities_check(&t, ctx)?;
    let failing: Vec<&str> = identities.checks.iter().filter(|c| !c.holds).map(|c| c.name).collect();
    let passed = worst <= PENROSE_TOL && failing.is_empty();
    let detail = format!("max relative residual {}, failing identities [{}]", fmt_num(worst), failing.join("; "));
    Ok(Trial::new(passed, detail, vec![("T", t)]))
}

fn tikhonov(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let mut rng = rng_from_seed(seed);
    let t = random_exact_rank(&mut rng, n, n, half_rank(n), 0.1);
    let trace = mp_tikhonov(&t, &default_schedule(), ctx)?;
    let last = *trace.relative_errors().last().expect("schedule is nonempty");
    let monotone = trace.is_nonincreasing(MONOTONE_SLACK);
    let detail = format!("final relative error {}, nonincreasing {monotone}", fmt_num(last));
    Ok(Trial::new(monotone && last <= TIKHONOV_TOL, detail, vec![("T", t)]))
}

/// Even seeds: a random EP matrix of random rank. Odd seeds: a generic
/// full-rank matrix, which is EP.
fn ep_equivalence(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let t = if seed.is_multiple_of(2) {
        random_ep(n, (seed as usize / 2) % (n + 1), seed)?
    } else {
        complex_gaussian(&mut rng_from_seed(seed), n, n)
    };
    let r = is_ep(&t, ctx)?;
    let detail = format!("EP {}, characterizations disagree {}", r.is_ep, r.disagreement);
    Ok(Trial::new(r.is_ep && !r.disagreement, detail, vec![("T", t)]))
}

fn ep_factorizations(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let rank = 1 + (seed as usize) % n;
    let t = random_ep(n, rank, seed)?;
    let adj = ep_factor_adjoint(&t, ctx)?;
    let com = ep_factor_commuting(&t, ctx)?;
    let form = canonical_form(&t, ctx)?;
    let residual = adj.residual.max(com.residual).max(form.reconstruction_residual).max(form.inverse_residual);
    let sigma_min = adj.sigma_min_v.min(com.sigma_min_v);
    let detail = format!("max residual {}, min sigma_min(V) {}", fmt_num(residual), fmt_num(sigma_min));
    Ok(Trial::new(residual <= FACTOR_TOL && sigma_min > FACTOR_TOL, detail, vec![("T", t)]))
}

fn block_formula(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let mut rng = rng_from_seed(seed);
    let t = random_with_rank(&mut rng, n, n, half_rank(n), 0.1, 2.0);
    let k = rng.random_range(0..=n);
    let w = Subspace::from_orthonormal(random_isometry(&mut rng, n, k), *ctx);
    let blocks = block_decompose(&t, &w, ctx)?;
    let distance = blocks.mp_from_blocks.distance(&mp_svd(&t, ctx)?.inverse);
    let detail = format!(
        "dim W {k}, distance to SVD route {}, sigma_min(A) {}",
        fmt_num(distance),
        fmt_num(blocks.a_sigma_min)
    );
    let passed = distance <= BLOCK_TOL && blocks.a_sigma_min > 1e-10;
    Ok(Trial::new(passed, detail, vec![("T", t), ("W", w.basis().clone())]))
}

fn commuting_products(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let (t, s) = random_commuting_ep_pair(n, seed)?;
    let lemma = commuting_mp_check(&t, &s, ctx)?;
    let prod = commuting_ep_product(&t, &s, ctx)?;
    let conditions = ep_product_conditions(&t, &s, ctx)?;
    let split = kernel_split_check(&t, &s, ctx)?;
    let mp_distance = prod.dist_s_t.max(prod.dist_t_s);
    let passed = lemma.residual <= FACTOR_TOL
        && prod.ts_ep.is_ep
        && mp_distance <= PRODUCT_MP_TOL
        && conditions.cond_iii
        && conditions.cond_iv
        && split.holds;
    let detail = format!(
        "commutator with T+ {}, (TS)+ distance {}, TS EP {}, (iii) {}, (iv) {}, kernel split {}",
        fmt_num(lemma.residual),
        fmt_num(mp_distance),
        prod.ts_ep.is_ep,
        conditions.cond_iii,
        conditions.cond_iv,
        split.holds
    );
    Ok(Trial::new(passed, detail, vec![("T", t), ("S", s)]))
}

/// Independent EP pairs: whatever the product does, no evaluated
/// implication may be violated.
fn product_conditions(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let t = random_ep(n, 1 + (seed as usize) % n, seed)?;
    let s = random_ep(n, 1 + (seed as usize / n) % n, seed ^ 0x5bd1_e995)?;
    let conditions = ep_product_conditions(&t, &s, ctx)?;
    let violated: Vec<&str> =
        conditions.verdicts.iter().filter(|v| !v.holds).map(|v| v.relation).collect();
    let detail = format!("TS EP {}, violated [{}]", conditions.cond_i, violated.join("; "));
    Ok(Trial::new(conditions.consistent(), detail, vec![("T", t), ("S", s)]))
}

/// Two subspaces sharing a planted common part: De Morgan, the dimension
/// formula and the principal-angle count of the intersection.
fn subspace_lattice(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let mut rng = rng_from_seed(seed);
    let q = random_unitary(&mut rng, n);
    let common = rng.random_range(0..=n / 2);
    let extra1 = rng.random_range(0..=(n - common) / 2);
    let extra2 = rng.random_range(0..=(n - common - extra1));
    let cols = |range: std::ops::Range<usize>| q.columns(range.start, range.end);
    let u = cols(0..common);
    let a = Subspace::span(&u.hstack(&cols(common..common + extra1))?, ctx)?;
    let b = Subspace::span(&u.hstack(&cols(common + extra1..common + extra1 + extra2))?, ctx)?;

    let meet = intersect(&a, &b)?;
    let join = sum(&a, &b)?;
    let de_morgan = complement(&join).projector_distance(&intersect(&complement(&a), &complement(&b))?)?;
    let dims_ok = join.dim() + meet.dim() == a.dim() + b.dim();
    let small_angles = principal_angles(&a, &b)?.iter().filter(|&&t| t <= 1e-8).count();
    let passed = meet.dim() == common && dims_ok && de_morgan <= LATTICE_TOL && small_angles == common;
    let detail = format!(
        "dims a {} b {} meet {} (planted {common}), De Morgan distance {}, zero angles {small_angles}",
        a.dim(),
        b.dim(),
        meet.dim(),
        fmt_num(de_morgan)
    );
    Ok(Trial::new(passed, detail, vec![("A", a.basis().clone()), ("B", b.basis().clone())]))
}

/// Algebra with blocks of size 2 and 3; the dimension flag does not apply.
fn compacts(_n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let algebra = BlockAlgebra::new(vec![2, 3])?;
    let (a, b) = random_commuting_ep_elements(&algebra, seed)?;
    let ideal = ideal_equality_check(&a, &b, ctx)?;
    let ab = a.mul(&b)?;
    let homomorphism = left_mult_matrix(&ab).distance(&(&left_mult_matrix(&a) * &left_mult_matrix(&b)));
    let a_ctx = ctx.with_scale(a.norm());
    let la = left_mult_matrix(&a);
    let annihilator = annihilator_from_blocks(&a, ctx)?.projector_distance(&kernel_of(&la, &a_ctx)?)?;
    let ideal_space = ideal_from_blocks(&a, ctx)?.projector_distance(&range_of(&la, &a_ctx)?)?;
    let identities = homomorphism.max(annihilator).max(ideal_space);
    let passed = ideal.ideal_distance <= BLOCK_TOL && identities <= HOMOMORPHISM_TOL && ideal.consistent();
    let detail = format!(
        "ideal distance {}, identity residual {}, consistent {}",
        fmt_num(ideal.ideal_distance),
        fmt_num(identities),
        ideal.consistent()
    );
    let mut operators = Vec::new();
    for (label, el) in [("a-block", &a), ("b-block", &b)] {
        let stacked = el.blocks().iter().skip(1).fold(el.blocks()[0].clone(), |acc, m| acc.block_diag(m));
        operators.push((label, stacked));
    }
    Ok(Trial::new(passed, detail, operators))
}

/// Odd seeds draw EP operators, even seeds nilpotent ones; the verdict must
/// survive a random unitary change of basis.
fn unitary_invariance(n: usize, seed: u64, ctx: &NumericalContext) -> epmod::Result<Trial> {
    let mut rng = rng_from_seed(seed);
    let t = if seed % 2 == 1 {
        random_ep(n, 1 + (seed as usize / 2) % n, seed)?
    } else {
        let mut upper = complex_gaussian(&mut rng, n, n);
        for i in 0..n {
            for j in 0..=i {
                upper.set(i, j, Default::default());
            }
        }
        upper
    };
    let u = random_unitary(&mut rng, n);
    let conjugated = &(&u * &t) * &u.adjoint();
    let before = is_ep(&t, ctx)?.is_ep;
    let after = is_ep(&conjugated, ctx)?.is_ep;
    let expected = seed % 2 == 1;
    let detail = format!("EP before {before}, after {after}, expected {expected}");
    Ok(Trial::new(before == after && before == expected, detail, vec![("T", t), ("U", u)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn always_fails(_: usize, _: u64, _: &NumericalContext) -> epmod::Result<Trial> {
        Ok(Trial::new(false, "planted", vec![("T", ComplexMatrix::identity(2))]))
    }

    #[test]
    fn zero_trials_give_an_empty_passing_report() {
        let config = SuiteConfig { trials: 0, ..SuiteConfig::default() };
        let report = run_suite(&config, &NumericalContext::default(), &standard_properties()).unwrap();
        assert!(report.checks.is_empty());
        assert!(report.passed);
    }

    #[test]
    fn standard_properties_pass_on_a_few_draws() {
        let dir = tempfile::tempdir().unwrap();
        let config = SuiteConfig { trials: 3, dim: 5, seed: 11, dump_dir: dir.path().join("dump") };
        let report = run_suite(&config, &NumericalContext::default(), &standard_properties()).unwrap();
        assert!(report.passed, "{}", report.render(crate::report::Format::Text));
        assert!(!config.dump_dir.exists());
    }

    #[test]
    fn failing_trials_are_dumped() {
        let dir = tempfile::tempdir().unwrap();
        let config = SuiteConfig { trials: 2, dim: 3, seed: 1, dump_dir: dir.path().to_path_buf() };
        let planted = [Property { name: "planted", check: always_fails }];
        let report = run_suite(&config, &NumericalContext::default(), &planted).unwrap();
        assert!(!report.passed);
        assert!(dir.path().join("planted-trial1-T.json").exists());
    }

    #[test]
    fn dimension_is_validated() {
        let config = SuiteConfig { dim: 1, ..SuiteConfig::default() };
        assert!(run_suite(&config, &NumericalContext::default(), &standard_properties()).is_err());
    }
}
