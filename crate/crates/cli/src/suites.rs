//! Verification suites. Each suite produces check records; the report sorts
//! them by id.

use std::cell::OnceCell;
use std::time::Instant;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zcycles::abgroup::{localize_compare, Elem, FgAbGroup, Subgroup};
use zcycles::cycles::{enumerate_tuples, Cycle, OrbitBasis};
use zcycles::gcoh::{
    somekawa_s, symbol_is_admissible, Cochain, Cohomology, CycleClassMap, GModule, GcohError,
    Kummer, WedgeDescent, MAX_MODULE, MAX_ORDER,
};
use zcycles::points::PointModel;
use zcycles::symbols::{
    graded_pieces, phi, projection_relation, psi, resolve, restrict_symbols, ProxyTarget,
    SymbolExpr, SymbolLayer, SymbolTerm,
};

use crate::config::Scenario;
use crate::error::CliError;
use crate::report::CheckRecord;

/// Universe size up to which point, cycle and symbol checks are exhaustive.
pub const EXHAUSTIVE_LIMIT: usize = 2000;
/// Projection formula instances fed to `s_n`.
pub const RELATION_SAMPLES: usize = 100;
/// Largest arity for which sampled symbol and Galois checks run.
pub const SYMBOL_ARITY: usize = 2;
/// Largest degree of the cycle class checks.
pub const CLASS_DEGREE: usize = 3;

pub type SuiteFn = fn(&Ctx) -> Result<Vec<CheckRecord>, CliError>;

pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    pub run: SuiteFn,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "roundtrip",
        description: "Φ_r∘Ψ_r = r! on sampled symbols",
        run: roundtrip,
    },
    Suite {
        name: "filtration",
        description: "containments G ⊆ R ⊆ F, F^2 = R^2, B^3 vs F^3",
        run: filtration,
    },
    Suite {
        name: "projection",
        description: "trace after restriction is the degree",
        run: projection,
    },
    Suite {
        name: "albanese",
        description: "arity-1 symbols resolve onto A(k)",
        run: albanese,
    },
    Suite {
        name: "graded",
        description: "Φ_r on graded pieces",
        run: graded,
    },
    Suite {
        name: "cohomology",
        description: "cyclic group cohomology backend",
        run: cohomology,
    },
    Suite {
        name: "galois",
        description: "Kummer map, Galois symbols and the cycle class",
        run: galois,
    },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn find_suite(name: &str) -> Result<&'static Suite, CliError> {
    SUITES.iter().find(|s| s.name == name).ok_or_else(|| {
        CliError::Invalid(format!(
            "unknown suite {name:?}; known: {}",
            suite_names().join(", ")
        ))
    })
}

pub struct Ctx<'a> {
    pub scenario: &'a Scenario,
    pub model: &'a PointModel,
    pub timings: bool,
    layer: OnceCell<SymbolLayer<'a>>,
}

impl<'a> Ctx<'a> {
    pub fn new(scenario: &'a Scenario, model: &'a PointModel, timings: bool) -> Self {
        Ctx {
            scenario,
            model,
            timings,
            layer: OnceCell::new(),
        }
    }

    pub fn layer(&self) -> Result<&SymbolLayer<'a>, CliError> {
        if let Some(l) = self.layer.get() {
            return Ok(l);
        }
        let l = SymbolLayer::new(self.model, self.scenario.r_max)?;
        Ok(self.layer.get_or_init(|| l))
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.scenario.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn samples(&self) -> usize {
        self.scenario.samples
    }

    fn exhaustive(&self) -> bool {
        self.model.size() <= EXHAUSTIVE_LIMIT
    }

    /// Runs one check body, recording wall time when enabled.
    fn check(
        &self,
        id: impl Into<String>,
        citation: &str,
        body: impl FnOnce(CheckRecord) -> Result<CheckRecord, CliError>,
    ) -> Result<CheckRecord, CliError> {
        let start = Instant::now();
        let mut rec = body(CheckRecord::new(id, citation))?;
        if self.timings {
            rec.wall_ms = Some(start.elapsed().as_millis() as u64);
        }
        Ok(rec)
    }
}

fn factorial(r: usize) -> u64 {
    (1..=r as u64).product()
}

fn elem_str(x: &[BigInt]) -> String {
    let parts: Vec<String> = x.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn equal_in(g: &FgAbGroup, x: &[BigInt], y: &[BigInt]) -> bool {
    g.is_zero(&g.add(x, &g.neg(y)))
}

/// Pairs `(E, L)` of levels with `E | L`, including `E = L`.
fn level_pairs(model: &PointModel) -> Vec<(u64, u64)> {
    let levels = model.levels();
    levels
        .iter()
        .flat_map(|&e| {
            levels
                .iter()
                .filter(move |&&l| l % e == 0)
                .map(move |&l| (e, l))
        })
        .collect()
}

/// Up to `count` distinct items, all of them when there are few enough.
fn pick<T: Clone>(items: &[T], count: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    if items.len() <= count {
        return items.to_vec();
    }
    let mut idx: Vec<usize> = rand::seq::index::sample(rng, items.len(), count).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

fn roundtrip(ctx: &Ctx) -> Result<Vec<CheckRecord>, CliError> {
    let m = ctx.model;
    let cap = ctx.samples() as u64;
    (1..=ctx.scenario.r_max)
        .map(|r| {
            ctx.check(
                format!("roundtrip.r{r}"),
                "Φ_r∘Ψ_r is multiplication by r! on symbols",
                |rec| {
                    let target = ProxyTarget::new(m, r);
                    let g = target.group();
                    let k = BigInt::from(factorial(r));
                    let (mut count, mut exhaustive, mut witness) = (0usize, true, None);
                    for e in m.levels() {
                        let pts = m.level_points(e);
                        exhaustive &= (pts.len() as u128).saturating_pow(r as u32) <= cap as u128;
                        for t in enumerate_tuples(&pts, r, cap, ctx.scenario.seed ^ e) {
                            let s = SymbolExpr::single(m, e, &t)?;
                            let back = phi(m, &psi(m, &s)?, r);
                            let lhs = resolve(m, &target, &back);
                            let rhs = g.scale(&k, &resolve(m, &target, &s));
                            if witness.is_none() && !equal_in(g, &lhs, &rhs) {
                                witness = Some(s.to_string());
                            }
                            count += 1;
                        }
                    }
                    let rec = rec
                        .detail("symbols", count)
                        .detail("exhaustive", exhaustive)
                        .detail("target", g.to_string())
                        .require(witness.is_none())
                        .require(exhaustive || count >= ctx.samples());
                    Ok(match witness {
                        Some(w) => rec.detail("counterexample", w),
                        None => rec,
                    })
                },
            )
        })
        .collect()
}

fn filtration(ctx: &Ctx) -> Result<Vec<CheckRecord>, CliError> {
    let layer = ctx.layer()?;
    let cq = layer.quotient();
    let mut out = Vec::new();
    for r in 1..=ctx.scenario.r_max {
        out.push(ctx.check(
            format!("filtration.chain.r{r}"),
            "G^{r+1} ⊆ R^{r+1} ⊆ F^{r+1} ⊆ F^r",
            |rec| {
                let g = layer.g(r + 1)?;
                let rr = layer.r_group(r)?;
                let f1 = layer.f(r + 1)?;
                let f0 = layer.f(r)?;
                Ok(rec
                    .detail("C/G^{r+1}", g.cokernel(cq).to_string())
                    .detail("C/R^{r+1}", rr.cokernel(cq).to_string())
                    .detail("C/F^{r+1}", f1.cokernel(cq).to_string())
                    .detail("C/F^r", f0.cokernel(cq).to_string())
                    .detail("R^{r+1}/G^{r+1}", rr.relative(&g).to_string())
                    .detail("F^{r+1}/R^{r+1}", f1.relative(&rr).to_string())
                    .require(g.is_subgroup_of(&rr))
                    .require(rr.is_subgroup_of(f1))
                    .require(f1.is_subgroup_of(f0)))
            },
        )?);
    }
    out.push(ctx.check("filtration.f2_equals_r2", "F^2 = R^2", |rec| {
        let f2 = layer.f(2)?;
        let r2 = layer.r_group(1)?;
        Ok(rec
            .detail("C/F^2", f2.cokernel(cq).to_string())
            .detail("F^2/R^2", f2.relative(&r2).to_string())
            .require(*f2 == r2))
    })?);
    out.push(ctx.check(
        "filtration.b3_localized",
        "F^3 = B^3 after inverting 2",
        |rec| {
            if ctx.scenario.r_max < 2 {
                return Ok(rec.skip("needs r_max >= 2"));
            }
            let b3 = layer.b_group(3)?;
            let f3 = layer.f(3)?;
            let same = localize_compare(&b3.image, &f3.image, 2)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            let inside = b3.is_subgroup_of(f3);
            let rec = rec
                .detail("C/B^3", b3.cokernel(cq).to_string())
                .detail("B^3 ⊆ F^3", inside);
            let rec = if inside {
                rec.detail("F^3/B^3", f3.relative(&b3).to_string())
            } else {
                rec
            };
            Ok(rec.require(same))
        },
    )?);
    out.push(ctx.check("filtration.graded_pieces", "F^r/F^{r+1}", |rec| {
        let pieces: Vec<String> = graded_pieces(layer).iter().map(|g| g.to_string()).collect();
        Ok(rec.detail("pieces", pieces))
    })?);
    Ok(out)
}

fn projection(ctx: &Ctx) -> Result<Vec<CheckRecord>, CliError> {
    let m = ctx.model;
    let pairs = level_pairs(m);
    let budget = if ctx.exhaustive() {
        usize::MAX
    } else {
        ctx.samples()
    };
    let mut out = Vec::new();
    out.push(ctx.check(
        "projection.points",
        "Tr_{L/E}∘res_{L/E} = [L:E] on points",
        |rec| {
            let mut rng = ctx.rng(1);
            let (mut count, mut witness) = (0usize, None);
            for &(e, l) in &pairs {
                for a in pick(&m.level_points(e), budget, &mut rng) {
                    let ok =
                        m.is_at_level(a, l) && m.trace_index(a, l, e) == m.mul((l / e) as i64, a);
                    if !ok && witness.is_none() {
                        witness = Some(format!("P{a}, E = {e}, L = {l}"));
                    }
                    count += 1;
                }
            }
            Ok(rec
                .detail("pairs", pairs.len())
                .detail("points", count)
                .detail("exhaustive", ctx.exhaustive())
                .require(witness.is_none()))
        },
    )?);
    out.push(ctx.check(
        "projection.cycles",
        "Tr_{L/E}∘res_{L/E} = [L:E] on cycles",
        |rec| {
            let mut rng = ctx.rng(2);
            let (mut count, mut witness) = (0usize, None);
            for e in m.levels() {
                let basis = OrbitBasis::new(m, e)?;
                let reps: Vec<u32> = (0..basis.len()).map(|i| basis.rep(i)).collect();
                let chosen = pick(&reps, budget, &mut rng);
                for &(e2, l) in pairs.iter().filter(|p| p.0 == e) {
                    for &x in &chosen {
                        let c = Cycle::closed_point(m, e2, x)?;
                        let back = c.res_pull(m, l)?.tr_push(m, e2)?;
                        if back != c.scale((l / e2) as i64) && witness.is_none() {
                            witness = Some(c.format(m));
                        }
                        count += 1;
                    }
                }
            }
            Ok(rec
                .detail("closed_points", count)
                .detail("exhaustive", ctx.exhaustive())
                .require(witness.is_none()))
        },
    )?);
    for r in 1..=ctx.scenario.r_max.min(SYMBOL_ARITY) {
        out.push(ctx.check(
            format!("projection.symbols.r{r}"),
            "Tr_{L/E}∘res_{L/E} = [L:E] on resolved symbols",
            |rec| {
                let target = ProxyTarget::new(m, r);
                let g = target.group();
                let cap = if ctx.exhaustive() {
                    (EXHAUSTIVE_LIMIT as u64).pow(2)
                } else {
                    ctx.samples() as u64
                };
                let (mut count, mut exhaustive, mut witness) = (0usize, true, None);
                for &(b, e) in &pairs {
                    let pts = m.level_points(e);
                    exhaustive &= (pts.len() as u128).saturating_pow(r as u32) <= cap as u128;
                    let tuples = enumerate_tuples(&pts, r, cap, ctx.scenario.seed ^ (b * 1000 + e));
                    for &(_, l) in pairs.iter().filter(|p| p.0 == b) {
                        for t in &tuples {
                            let s = SymbolExpr::new(
                                m,
                                r,
                                b,
                                vec![SymbolTerm {
                                    weight: 1,
                                    level: e,
                                    points: t.clone(),
                                }],
                            )?;
                            let back = restrict_symbols(m, &s, l)?.transfer(b)?;
                            let lhs = resolve(m, &target, &back);
                            let rhs = g.scale(&BigInt::from(l / b), &resolve(m, &target, &s));
                            if !equal_in(g, &lhs, &rhs) && witness.is_none() {
                                witness = Some(format!("{s} restricted to {l}"));
                            }
                            count += 1;
                        }
                    }
                }
                Ok(rec
                    .detail("instances", count)
                    .detail("exhaustive", exhaustive)
                    .require(witness.is_none()))
            },
        )?);
        out.push(ctx.check(
            format!("projection.relation.r{r}"),
            "projection formula relation resolves to zero",
            |rec| {
                let target = ProxyTarget::new(m, r);
                let mut rng = ctx.rng(10 + r as u64);
                let strict: Vec<(u64, u64)> =
                    pairs.iter().copied().filter(|(e, l)| e != l).collect();
                let mut witness = None;
                let mut count = 0usize;
                if !strict.is_empty() {
                    for _ in 0..ctx.samples() {
                        let rel = random_relation(m, &strict, r, &mut rng)?;
                        if !target.group().is_zero(&resolve(m, &target, &rel)) && witness.is_none()
                        {
                            witness = Some(rel.to_string());
                        }
                        count += 1;
                    }
                }
                Ok(rec.detail("instances", count).require(witness.is_none()))
            },
        )?);
    }
    Ok(out)
}

fn random_relation(
    m: &PointModel,
    pairs: &[(u64, u64)],
    r: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SymbolExpr, CliError> {
    let &(e, l) = pairs.choose(rng).expect("nonempty pairs");
    let slot = rng.gen_range(0..r);
    let small = m.level_points(e);
    let large = m.level_points(l);
    let points: Vec<u32> = (0..r)
        .map(|s| {
            if s == slot {
                *large.choose(rng).unwrap()
            } else {
                *small.choose(rng).unwrap()
            }
        })
        .collect();
    Ok(projection_relation(m, e, l, slot, &points)?)
}

fn albanese(ctx: &Ctx) -> Result<Vec<CheckRecord>, CliError> {
    let m = ctx.model;
    let layer = ctx.layer()?;
    let rec = ctx.check(
        "albanese.symbol_image",
        "arity-1 symbols resolve onto A(k)",
        |rec| {
            let t = layer.target(1);
            let image = layer.symbol_image(1)?;
            let a1 = m.level_group(1);
            let gens: Vec<Elem> = a1.gens.iter().map(|&a| t.pure(m, &[a])).collect();
            let rational = Subgroup::new(t.group().clone(), &gens);
            Ok(rec
                .detail("T_1", t.group().to_string())
                .detail("A(U)", m.universe_group().to_string())
                .detail("A(1)", a1.group.to_string())
                .detail("image", image.as_group().to_string())
                .require(t.group().to_string() == m.universe_group().to_string())
                .require(image == rational))
        },
    )?;
    Ok(vec![rec])
}

fn graded(ctx: &Ctx) -> Result<Vec<CheckRecord>, CliError> {
    let layer = ctx.layer()?;
    let pieces = graded_pieces(layer);
    let mut out = Vec::new();
    for r in 1..=ctx.scenario.r_max {
        out.push(ctx.check(
            format!("graded.kernel.r{r}"),
            "Φ_r is injective on F^r/F^{r+1}",
            |rec| {
                let kernel = layer.phi_kernel_on_f(r)?;
                let f1 = layer.f(r + 1)?;
                Ok(rec
                    .detail("F^r/F^{r+1}", pieces[r].to_string())
                    .require(kernel == *f1))
            },
        )?);
        out.push(ctx.check(
            format!("graded.image.r{r}"),
            "Φ_r(F^r) is the whole symbol group after inverting r!",
            |rec| {
                let image = layer.phi_image(r)?;
                let symbols = layer.symbol_image(r)?;
                let same = localize_compare(&image, &symbols, factorial(r))
                    .map_err(|e| CliError::Invariant(e.to_string()))?;
                Ok(rec
                    .detail("Φ_r(F^r)", image.as_group().to_string())
                    .detail("symbols", symbols.as_group().to_string())
                    .require(image.is_subgroup_of(&symbols))
                    .require(same))
            },
        )?);
    }
    Ok(out)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Expected `H^0, H^1, H^2` of `Z/m` on trivial `Z/n` (`n = 0` for `Z`).
pub fn trivial_closed_form(m: i64, n: i64) -> [FgAbGroup; 3] {
    let g = if n == 0 { m } else { gcd(m, n) };
    let h0 = if n == 0 {
        FgAbGroup::free(1)
    } else {
        FgAbGroup::from_i64(&[n])
    };
    let h1 = if n == 0 {
        FgAbGroup::trivial()
    } else {
        FgAbGroup::from_i64(&[g])
    };
    [h0, h1, FgAbGroup::from_i64(&[g])]
}

/// Finite modules of the scenario the cohomology checks run on.
fn scenario_modules(ctx: &Ctx) -> Vec<(String, GModule)> {
    let m = ctx.model;
    let mut out = Vec::new();
    if m.n() <= MAX_ORDER && m.size() as u128 <= MAX_MODULE {
        let frob = m.frob_hom();
        if let Ok(module) = GModule::from_hom(m.n(), frob) {
            out.push(("A(U)".to_string(), module));
        }
    }
    if let Ok(k) = Kummer::new(m, ctx.scenario.n) {
        out.push((format!("A[{}]", ctx.scenario.n), k.module().clone()));
        if let Ok(t) = k.module().tensor_power(2) {
            out.push((format!("A[{}]^2", ctx.scenario.n), t));
        }
    }
    out
}

fn random_cochain(
    module: &GModule,
    degree: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Cochain, GcohError> {
    let moduli = module.cochain_moduli(degree);
    let values = moduli
        .iter()
        .map(|&d| {
            if d == 0 {
                rng.gen_range(-9..=9)
            } else {
                rng.gen_range(0..d)
            }
        })
        .collect();
    Cochain::new(module, degree, values)
}

fn cohomology(ctx: &Ctx) -> Result<Vec<CheckRecord>, CliError> {
    let mut out = Vec::new();
    out.push(ctx.check(
        "cohomology.trivial",
        "H^i(Z/m, Z/n) = Z/n, Z/gcd, Z/gcd for i = 0, 1, 2",
        |rec| {
            let mut failures = Vec::new();
            let mut cases = 0;
            for m in 1..=MAX_ORDER as i64 {
                for n in 0..=6i64 {
                    let module = GModule::trivial(m as u64, vec![n])?;
                    let expected = trivial_closed_form(m, n);
                    for (i, want) in expected.iter().enumerate() {
                        let got = Cohomology::new(&module, i)?;
                        if got.group() != want {
                            failures.push(format!("m={m} n={n} i={i}: {} != {want}", got.group()));
                        }
                        cases += 1;
                    }
                }
            }
            let ok = failures.is_empty();
            Ok(rec
                .detail("cases", cases)
                .detail("failures", failures)
                .require(ok))
        },
    )?);
    let modules = scenario_modules(ctx);
    out.push(
        ctx.check("cohomology.coboundary", "d∘d = 0 on cochains", |rec| {
            let mut rng = ctx.rng(3);
            let mut count = 0;
            let mut failures = Vec::new();
            let mut all: Vec<(String, GModule)> = Vec::new();
            for m in 1..=MAX_ORDER {
                all.push((format!("Z/6 over Z/{m}"), GModule::trivial(m, vec![6])?));
                all.push((format!("Z over Z/{m}"), GModule::trivial(m, vec![0])?));
            }
            all.extend(modules.iter().cloned());
            for (name, module) in &all {
                for i in 0..=2 {
                    for _ in 0..5 {
                        let x = random_cochain(module, i, &mut rng)?;
                        if !x.coboundary().coboundary().is_zero() {
                            failures.push(format!("{name}, degree {i}"));
                        }
                        count += 1;
                    }
                }
            }
            let ok = failures.is_empty();
            Ok(rec
                .detail("cochains", count)
                .detail("failures", failures)
                .require(ok))
        })?,
    );
    out.push(ctx.check(
        "cohomology.annihilated",
        "the group order kills H^i for i > 0",
        |rec| {
            let mut tables = serde_json::Map::new();
            let mut ok = true;
            for (name, module) in &modules {
                let mut row = Vec::new();
                for i in 0..=2 {
                    let h = Cohomology::new(module, i)?;
                    if i > 0 {
                        let order = BigInt::from(module.order());
                        ok &= h
                            .group()
                            .invariant_factors()
                            .iter()
                            .all(|d| (&order % d) == BigInt::from(0));
                    }
                    row.push(h.group().to_string());
                }
                tables.insert(name.clone(), row.into());
            }
            Ok(rec.detail("modules", tables).require(ok))
        },
    )?);
    Ok(out)
}

/// Projection formula instances all of whose points admit `δ`.
fn admissible_relations(ctx: &Ctx, k: &Kummer, r: usize) -> Result<Vec<SymbolExpr>, CliError> {
    let m = ctx.model;
    let strict: Vec<(u64, u64)> = level_pairs(m).into_iter().filter(|(e, l)| e != l).collect();
    let mut out = Vec::new();
    if strict.is_empty() {
        return Ok(out);
    }
    let mut rng = ctx.rng(20 + r as u64);
    for _ in 0..RELATION_SAMPLES * 50 {
        if out.len() == RELATION_SAMPLES {
            break;
        }
        let rel = random_relation(m, &strict, r, &mut rng)?;
        if symbol_is_admissible(k, &rel) {
            out.push(rel);
        }
    }
    Ok(out)
}

const FINITE_QUOTIENT: &str = "finite-quotient model";

fn galois(ctx: &Ctx) -> Result<Vec<CheckRecord>, CliError> {
    let m = ctx.model;
    let n = ctx.scenario.n;
    let kummer = match Kummer::new(m, n) {
        Ok(k) => k,
        Err(e @ (GcohError::Torsion { .. } | GcohError::Order(_) | GcohError::ModuleSize(_))) => {
            let reason = format!("Kummer map unavailable: {e}");
            return Ok(vec![
                CheckRecord::new("galois.kummer", FINITE_QUOTIENT).skip(&reason)
            ]);
        }
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::new();
    out.push(ctx.check("galois.delta", "ker δ = n A(level)", |rec| {
        let mut ok = true;
        let mut rows = Vec::new();
        for level in m.levels() {
            let km = kummer.level_map(m, level)?;
            let exact = km.kernel_is_multiples() && km.image_size() == km.quotient_size();
            ok &= exact;
            rows.push(serde_json::json!({
                "level": level,
                "H1": km.h1.group().to_string(),
                "domain": km.classes.len(),
                "image": km.image_size(),
                "exact": exact,
            }));
        }
        Ok(rec.detail("levels", rows).require(ok))
    })?);
    for r in 1..=ctx.scenario.r_max.min(SYMBOL_ARITY) {
        out.push(ctx.check(
            format!("galois.relations.r{r}"),
            "s_n vanishes on the projection formula relation",
            |rec| {
                let h = Cohomology::new(&kummer.module().tensor_power(r)?, r)?;
                let rels = admissible_relations(ctx, &kummer, r)?;
                let mut witness = None;
                for rel in &rels {
                    if !h.is_coboundary(&somekawa_s(m, &kummer, rel)?) && witness.is_none() {
                        witness = Some(rel.to_string());
                    }
                }
                let rec = rec
                    .detail("instances", rels.len())
                    .detail("H^r", h.group().to_string());
                let enough =
                    rels.len() == RELATION_SAMPLES || level_pairs(m).len() == m.levels().len();
                Ok(match witness {
                    Some(w) => rec.detail("counterexample", w).require(false),
                    None => rec.require(enough),
                })
            },
        )?);
    }
    if ctx.scenario.r_max >= 2 {
        out.push(ctx.check(
            "galois.antisymmetry",
            "p_∧∘t_* = -p_∧ on degree-2 classes",
            |rec| {
                let w = WedgeDescent::new(&kummer, 2, false)?;
                let h_tensor = Cohomology::new(&w.tensor_module, 2)?;
                let h_wedge = Cohomology::new(&w.wedge_module, 2)?;
                let mut rng = ctx.rng(4);
                let classes = pick(&h_tensor.group().elements(), ctx.samples(), &mut rng);
                let mut ok = true;
                for y in &classes {
                    let noise = random_cochain(&w.tensor_module, 1, &mut rng)?.coboundary();
                    let x = h_tensor.representative(y).add(&noise)?;
                    let sum = w.descend(&x)?.add(&w.descend(&w.transpose(&x)?)?)?;
                    ok &= h_wedge.is_coboundary(&sum);
                }
                let points: Vec<u32> = m
                    .level_points(1)
                    .into_iter()
                    .filter(|&a| kummer.is_admissible(a))
                    .collect();
                let mut pairs = 0;
                for _ in 0..ctx.samples().min(50) {
                    let (a, b) = (
                        *points.choose(&mut rng).unwrap(),
                        *points.choose(&mut rng).unwrap(),
                    );
                    let ab = somekawa_s(m, &kummer, &SymbolExpr::single(m, 1, &[a, b])?)?;
                    let ba = somekawa_s(m, &kummer, &SymbolExpr::single(m, 1, &[b, a])?)?;
                    ok &= h_wedge.same_class(&w.descend(&ab)?, &w.descend(&ba)?)?;
                    pairs += 1;
                }
                Ok(rec
                    .detail("H^2(A[n]^2)", h_tensor.group().to_string())
                    .detail("H^2(wedge^2)", h_wedge.group().to_string())
                    .detail("classes", classes.len())
                    .detail("symbol_pairs", pairs)
                    .require(ok))
            },
        )?);
    }
    let layer = ctx.layer()?;
    for r in 1..=ctx.scenario.r_max.min(CLASS_DEGREE) {
        out.push(ctx.check(
            format!("galois.cycle_class.r{r}"),
            "the cycle class kills F^{r+1} and n F^r",
            |rec| {
                let map = CycleClassMap::new(layer, n, r, r == 1)?;
                let classes = map.orbit_classes()?;
                let h = map.cohomology().group();
                let nonzero = classes.iter().filter(|(_, c)| !h.is_zero(c)).count();
                let kills_next = map.kills(layer.f(r + 1)?, 1, &classes)?;
                let kills_multiple = map.kills(layer.f(r)?, n as i64, &classes)?;
                let first = classes.iter().find(|(_, c)| !h.is_zero(c));
                let rec = rec
                    .detail("H^r(wedge^r)", h.to_string())
                    .detail("admissible_orbits", classes.len())
                    .detail("orbits", layer.orbit_basis().len())
                    .detail("nonzero_orbit_classes", nonzero)
                    .detail("kills F^{r+1}", kills_next)
                    .detail("kills n F^r", kills_multiple)
                    .detail("model", FINITE_QUOTIENT);
                let rec = match first {
                    Some((i, c)) => rec.detail(
                        "sample_orbit",
                        format!("P{} -> {}", layer.orbit_basis().rep(*i), elem_str(c)),
                    ),
                    None => rec,
                };
                Ok(rec.require(kills_next && kills_multiple))
            },
        )?);
    }
    Ok(out)
}
