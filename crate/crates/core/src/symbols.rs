//! Symbols `{a_1,...,a_r}_{E/B}` and their resolution into the symmetric
//! tensor proxy `T_r`, the maps `Φ_r` and `Ψ_r`, and the filtrations
//! `F̂^r`, `R^{r+1}`, `B^r` on level-1 cycles.
//!
//! A symbol at level `E` over base `B` resolves to
//! `Σ_{t < E/B} F^{Bt} a_1 ⊗ ... ⊗ F^{Bt} a_r` in the `Σ_r`-coinvariants of
//! `A(U)^{⊗r}`; `T_0 = Z`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::abgroup::{coinvariants_sym, AbError, AbHom, Coinvariants, Elem, FgAbGroup, Subgroup};
use crate::cycles::{w_untraced, Cycle, CycleQuotient, CycleSubgroup, CyclesError, OrbitBasis};
use crate::points::{PointModel, PointsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolsError {
    #[error(transparent)]
    Cycles(#[from] CyclesError),
    #[error(transparent)]
    Points(#[from] PointsError),
    #[error(transparent)]
    Group(#[from] AbError),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("expected arity {expected}, found {got}")]
    Arity { expected: usize, got: usize },
    #[error("base {base} does not divide level {level}")]
    Base { base: u64, level: u64 },
    #[error("filtration index {r} outside 0..={max}")]
    Index { r: usize, max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolTerm {
    pub weight: i64,
    pub level: u64,
    pub points: Vec<u32>,
}

/// Integer combination of symbols of one arity over one base level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolExpr {
    r: usize,
    base: u64,
    terms: Vec<SymbolTerm>,
}

impl SymbolExpr {
    pub fn zero(r: usize, base: u64) -> Self {
        SymbolExpr {
            r,
            base,
            terms: vec![],
        }
    }

    /// Validates levels, arity and point rationality.
    pub fn new(
        model: &PointModel,
        r: usize,
        base: u64,
        terms: Vec<SymbolTerm>,
    ) -> Result<Self, SymbolsError> {
        model.check_level(base)?;
        for t in &terms {
            model.check_level(t.level)?;
            if t.level % base != 0 {
                return Err(SymbolsError::Base {
                    base,
                    level: t.level,
                });
            }
            if t.points.len() != r {
                return Err(SymbolsError::Arity {
                    expected: r,
                    got: t.points.len(),
                });
            }
            for &a in &t.points {
                if a as usize >= model.size() || !model.is_at_level(a, t.level) {
                    return Err(PointsError::NotAtLevel {
                        point: a,
                        level: t.level,
                    }
                    .into());
                }
            }
        }
        Ok(SymbolExpr {
            r,
            base,
            terms: terms.into_iter().filter(|t| t.weight != 0).collect(),
        })
    }

    /// `{a_1,...,a_r}_{level/1}`.
    pub fn single(model: &PointModel, level: u64, points: &[u32]) -> Result<Self, SymbolsError> {
        Self::new(
            model,
            points.len(),
            1,
            vec![SymbolTerm {
                weight: 1,
                level,
                points: points.to_vec(),
            }],
        )
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &SymbolExpr) -> Result<SymbolExpr, SymbolsError> {
        if self.r != other.r {
            return Err(SymbolsError::Arity {
                expected: self.r,
                got: other.r,
            });
        }
        if self.base != other.base {
            return Err(SymbolsError::Base {
                base: self.base,
                level: other.base,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(SymbolExpr {
            r: self.r,
            base: self.base,
            terms,
        })
    }

    pub fn scale(&self, k: i64) -> SymbolExpr {
        let terms = if k == 0 {
            vec![]
        } else {
            self.terms
                .iter()
                .map(|t| SymbolTerm {
                    weight: t.weight * k,
                    ..t.clone()
                })
                .collect()
        };
        SymbolExpr {
            r: self.r,
            base: self.base,
            terms,
        }
    }

    pub fn sub(&self, other: &SymbolExpr) -> Result<SymbolExpr, SymbolsError> {
        self.add(&other.scale(-1))
    }

    /// The norm to a smaller base: `{..}_{E/L} -> {..}_{E/B}` for `B | L`.
    pub fn transfer(&self, to_base: u64) -> Result<SymbolExpr, SymbolsError> {
        if !self.base.is_multiple_of(to_base) {
            return Err(SymbolsError::Base {
                base: to_base,
                level: self.base,
            });
        }
        Ok(SymbolExpr {
            base: to_base,
            ..self.clone()
        })
    }

    /// Parses `2{P3,P7}_6 - {P1,P1}_2/2`. Points may be written `P3` or `3`;
    /// the optional `/B` sets the base level (uniform across terms).
    pub fn parse(model: &PointModel, text: &str) -> Result<SymbolExpr, SymbolsError> {
        let mut p = Parser {
            s: text.as_bytes(),
            i: 0,
        };
        let mut terms = Vec::new();
        let mut base: Option<u64> = None;
        let mut arity: Option<usize> = None;
        p.ws();
        let mut sign = 1i64;
        if p.eat(b'-') {
            sign = -1;
        } else {
            p.eat(b'+');
        }
        loop {
            p.ws();
            let col = p.i + 1;
            let weight = if p.peek().is_some_and(|c| c.is_ascii_digit()) {
                let w = p.number()? as i64;
                p.ws();
                if !p.eat(b'*') {
                    p.eat_str("·");
                }
                p.ws();
                w
            } else {
                1
            };
            p.expect(b'{')?;
            let mut points = Vec::new();
            p.ws();
            if !p.eat(b'}') {
                loop {
                    p.ws();
                    p.eat(b'P');
                    points.push(p.number()? as u32);
                    p.ws();
                    if p.eat(b'}') {
                        break;
                    }
                    p.expect(b',')?;
                }
            }
            p.ws();
            p.expect(b'_')?;
            let level = p.number()?;
            let b = if p.eat(b'/') { p.number()? } else { 1 };
            if *base.get_or_insert(b) != b {
                return Err(SymbolsError::Parse {
                    col,
                    msg: "mixed base levels".into(),
                });
            }
            if *arity.get_or_insert(points.len()) != points.len() {
                return Err(SymbolsError::Parse {
                    col,
                    msg: "mixed arities".into(),
                });
            }
            terms.push(SymbolTerm {
                weight: sign * weight,
                level,
                points,
            });
            p.ws();
            match p.peek() {
                None => break,
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                Some(_) => return Err(p.error("expected '+', '-' or end of input")),
            }
            p.i += 1;
        }
        SymbolExpr::new(model, arity.unwrap_or(0), base.unwrap_or(1), terms)
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mag = t.weight.unsigned_abs();
            match (i, t.weight < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            let pts: Vec<String> = t.points.iter().map(|a| format!("P{a}")).collect();
            write!(f, "{{{}}}_{}", pts.join(","), t.level)?;
            if self.base != 1 {
                write!(f, "/{}", self.base)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, t: &str) -> bool {
        if self.s[self.i..].starts_with(t.as_bytes()) {
            self.i += t.len();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: &str) -> SymbolsError {
        SymbolsError::Parse {
            col: self.i + 1,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SymbolsError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<u64, SymbolsError> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i])
            .unwrap()
            .parse()
            .map_err(|_| SymbolsError::Parse {
                col: start + 1,
                msg: "expected a number".into(),
            })
    }
}

/// `T_r`, the `Σ_r`-coinvariants of `A(U)^{⊗r}` (`Z` for `r = 0`), with the
/// diagonal Frobenius.
#[derive(Clone, Debug)]
pub struct ProxyTarget {
    r: usize,
    coinv: Option<Coinvariants>,
    group: FgAbGroup,
    frob: AbHom,
}

impl ProxyTarget {
    pub fn new(model: &PointModel, r: usize) -> Self {
        if r == 0 {
            let z = FgAbGroup::free(1);
            return ProxyTarget {
                r,
                coinv: None,
                group: z.clone(),
                frob: AbHom::identity(z),
            };
        }
        let coinv = coinvariants_sym(model.universe_group(), r);
        let frob = coinv.diagonal_hom(model.frob_hom());
        ProxyTarget {
            r,
            group: coinv.group.clone(),
            coinv: Some(coinv),
            frob,
        }
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn frob(&self) -> &AbHom {
        &self.frob
    }

    /// Class of `a_1 ⊗ ... ⊗ a_r`.
    pub fn pure(&self, model: &PointModel, points: &[u32]) -> Elem {
        assert_eq!(points.len(), self.r);
        match &self.coinv {
            None => vec![BigInt::one()],
            Some(c) => {
                let xs: Vec<Elem> = points.iter().map(|&a| model.coords_big(a)).collect();
                let refs: Vec<&[BigInt]> = xs.iter().map(|x| &x[..]).collect();
                c.pure(&refs)
            }
        }
    }

    /// Fixed part of the Frobenius action.
    pub fn invariants(&self) -> Subgroup {
        let g = &self.group;
        let images: Vec<Elem> = (0..g.ngens())
            .map(|i| {
                g.reduced(
                    self.frob
                        .apply(&g.basis(i))
                        .iter()
                        .zip(g.basis(i))
                        .map(|(a, b)| a - b)
                        .collect(),
                )
            })
            .collect();
        AbHom::from_images(g.clone(), g.clone(), &images)
            .expect("F - 1 is an endomorphism")
            .kernel()
    }
}

/// `ρ(s)` in `T_r`.
pub fn resolve(model: &PointModel, target: &ProxyTarget, s: &SymbolExpr) -> Elem {
    assert_eq!(s.r, target.r, "arity mismatch");
    let g = target.group();
    let mut acc = g.zero();
    for t in &s.terms {
        let mut pts = t.points.clone();
        for _ in 0..t.level / s.base {
            let v = target.pure(model, &pts);
            for (a, b) in acc.iter_mut().zip(&v) {
                *a += b * t.weight;
            }
            for x in pts.iter_mut() {
                *x = model.frob_pow(*x, s.base);
            }
        }
    }
    g.reduced(acc)
}

/// `Φ_r(c)`: each closed point `x` over the cycle's level, of degree `d`,
/// goes to `{x,...,x}` at level `d * level`. For `r = 0` the terms are empty
/// symbols and resolve to the degree.
pub fn phi(model: &PointModel, c: &Cycle, r: usize) -> SymbolExpr {
    let base = c.level();
    let terms = c
        .closed_point_coeffs(model)
        .into_iter()
        .map(|(x, k)| SymbolTerm {
            weight: k,
            level: base * orbit_len(model, base, x),
            points: vec![x; r],
        })
        .collect();
    SymbolExpr { r, base, terms }
}

fn orbit_len(model: &PointModel, level: u64, x: u32) -> u64 {
    let mut d = 1;
    let mut y = model.frob_pow(x, level);
    while y != x {
        y = model.frob_pow(y, level);
        d += 1;
    }
    d
}

/// `Ψ_r(s)`: each term goes to its `w`-generator, traced to the base.
pub fn psi(model: &PointModel, s: &SymbolExpr) -> Result<Cycle, SymbolsError> {
    let mut acc = Cycle::zero(s.base);
    for t in &s.terms {
        let w = w_untraced(model, t.level, &t.points).tr_push(model, s.base)?;
        acc = acc.add(&w.scale(t.weight))?;
    }
    Ok(acc)
}

/// Base change to `L`: a term at level `E` over `B` splits into
/// `gcd(E, L)/B` terms `{F^{Bi} a}` at level `lcm(E, L)` over `L`.
pub fn restrict_symbols(
    model: &PointModel,
    s: &SymbolExpr,
    to: u64,
) -> Result<SymbolExpr, SymbolsError> {
    model.check_level(to)?;
    if !to.is_multiple_of(s.base) {
        return Err(SymbolsError::Base {
            base: s.base,
            level: to,
        });
    }
    let mut terms = Vec::new();
    for t in &s.terms {
        let g = t.level.gcd(&to);
        let l = t.level.lcm(&to);
        for i in 0..g / s.base {
            let points = t
                .points
                .iter()
                .map(|&a| model.frob_pow(a, s.base * i))
                .collect();
            terms.push(SymbolTerm {
                weight: t.weight,
                level: l,
                points,
            });
        }
    }
    Ok(SymbolExpr {
        r: s.r,
        base: to,
        terms,
    })
}

/// Projection formula instance `{a_1,..,Tr_{L/E} a_i,..}_E - {a_1,..,a_i,..}_L`
/// with `a_i ∈ A(L)` and the other slots in `A(E)`.
pub fn projection_relation(
    model: &PointModel,
    e: u64,
    l: u64,
    slot: usize,
    points: &[u32],
) -> Result<SymbolExpr, SymbolsError> {
    if !l.is_multiple_of(e) {
        return Err(PointsError::LevelOrder { from: e, to: l }.into());
    }
    let mut traced = points.to_vec();
    traced[slot] = model.trace_index(points[slot], l, e);
    let lhs = SymbolExpr::new(
        model,
        points.len(),
        1,
        vec![SymbolTerm {
            weight: 1,
            level: e,
            points: traced,
        }],
    )?;
    let rhs = SymbolExpr::new(
        model,
        points.len(),
        1,
        vec![SymbolTerm {
            weight: 1,
            level: l,
            points: points.to_vec(),
        }],
    )?;
    lhs.sub(&rhs)
}

/// The filtrations of level-1 cycles up to `r_max`, computed exactly in
/// `Q_S = C / G^S` with `S = r_max + 1`.
#[derive(Clone, Debug)]
pub struct SymbolLayer<'a> {
    model: &'a PointModel,
    r_max: usize,
    cq: CycleQuotient,
    targets: Vec<ProxyTarget>,
    /// `ρ ∘ Φ_j : Q_S -> T_j` for `j <= r_max`
    phis: Vec<AbHom>,
    f: Vec<CycleSubgroup>,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl<'a> SymbolLayer<'a> {
    pub fn new(model: &'a PointModel, r_max: usize) -> Result<Self, SymbolsError> {
        assert!(r_max >= 1, "r_max must be positive");
        let cq = CycleQuotient::new(model, r_max + 1)?;
        let targets: Vec<ProxyTarget> = (0..=r_max).map(|j| ProxyTarget::new(model, j)).collect();
        let mut phis = Vec::new();
        for t in &targets {
            let raw =
                cq.raw_images_of_point_map(model, t.group(), |y| t.pure(model, &vec![y; t.r]));
            phis.push(cq.hom_from_raw(t.group(), &raw)?);
        }
        let mut f = vec![CycleSubgroup::whole(&cq)];
        for h in &phis {
            let last = f.last().unwrap().image.clone();
            f.push(CycleSubgroup {
                image: last.intersection(&h.kernel()),
            });
        }
        Ok(SymbolLayer {
            model,
            r_max,
            cq,
            targets,
            phis,
            f,
        })
    }

    pub fn model(&self) -> &PointModel {
        self.model
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn quotient(&self) -> &CycleQuotient {
        &self.cq
    }

    pub fn target(&self, r: usize) -> &ProxyTarget {
        &self.targets[r]
    }

    /// `ρ ∘ Φ_r` on `Q_S`.
    pub fn phi_hom(&self, r: usize) -> Result<&AbHom, SymbolsError> {
        self.phis
            .get(r)
            .ok_or(SymbolsError::Index { r, max: self.r_max })
    }

    /// `F̂^0 ⊇ ... ⊇ F̂^{r_max + 1}`.
    pub fn f_filtration(&self) -> &[CycleSubgroup] {
        &self.f
    }

    pub fn f(&self, r: usize) -> Result<&CycleSubgroup, SymbolsError> {
        self.f.get(r).ok_or(SymbolsError::Index {
            r,
            max: self.r_max + 1,
        })
    }

    pub fn g(&self, r: usize) -> Result<CycleSubgroup, SymbolsError> {
        Ok(CycleSubgroup {
            image: self.cq.g_image(r)?,
        })
    }

    fn image_of(&self, cycles: &[Cycle]) -> Result<Vec<Elem>, SymbolsError> {
        cycles
            .iter()
            .map(|c| Ok(self.cq.q(self.model, c)?))
            .collect()
    }

    /// `R^{r+1}`: `G^{r+1}` plus the projection-formula differences of
    /// `w`-generators. By multilinearity modulo `G^{r+1}` and the symmetry of
    /// `w`, basis points in the first slot suffice.
    pub fn r_group(&self, r: usize) -> Result<CycleSubgroup, SymbolsError> {
        if r == 0 || r > self.r_max {
            return Err(SymbolsError::Index { r, max: self.r_max });
        }
        let m = self.model;
        let mut gens = Vec::new();
        for e in m.levels() {
            let ge = self.cq.level_group(e).gens.clone();
            for l in m.levels().into_iter().filter(|&l| l % e == 0 && l != e) {
                let gl = &self.cq.level_group(l).gens;
                for &a in gl {
                    for rest in product(&ge, r - 1) {
                        let mut pts = vec![a];
                        pts.extend(rest);
                        let rel = projection_relation(m, e, l, 0, &pts)?;
                        gens.push(psi(m, &rel)?);
                    }
                }
            }
        }
        let extra = self.image_of(&gens)?;
        Ok(CycleSubgroup {
            image: self.cq.g_image(r + 1)?.with(&extra),
        })
    }

    /// The map `z -> k z - Ψ_j Φ_j(z)` on `Q_S`.
    pub fn psi_phi_defect(&self, k: i64, j: usize) -> Result<AbHom, SymbolsError> {
        let raw = self.cq.raw_images_of_psi_phi_defect(k, j);
        Ok(self.cq.hom_from_raw(self.cq.group(), &raw)?)
    }

    /// Integral `B^r = R^r + <(r-1)! z - Ψ_{r-1} Φ_{r-1}(z) : z ∈ F̂^{r-1}>`.
    pub fn b_group(&self, r: usize) -> Result<CycleSubgroup, SymbolsError> {
        if r < 2 || r > self.r_max + 1 {
            return Err(SymbolsError::Index {
                r,
                max: self.r_max + 1,
            });
        }
        let rr = self.r_group(r - 1)?;
        let defect = self.psi_phi_defect(factorial(r - 1) as i64, r - 1)?;
        let extra: Vec<Elem> = self.f[r - 1]
            .image
            .generators()
            .iter()
            .map(|z| defect.apply(z))
            .collect();
        Ok(CycleSubgroup {
            image: rr.image.with(&extra),
        })
    }

    /// Subgroup of `T_r` generated by all resolved arity-`r` symbols. Slots
    /// range over basis points of each level, by multilinearity.
    pub fn symbol_image(&self, r: usize) -> Result<Subgroup, SymbolsError> {
        let t = self
            .targets
            .get(r)
            .ok_or(SymbolsError::Index { r, max: self.r_max })?;
        let mut gens = Vec::new();
        for e in self.model.levels() {
            let ge = &self.cq.level_group(e).gens;
            for pts in product(ge, r) {
                gens.push(resolve(
                    self.model,
                    t,
                    &SymbolExpr::single(self.model, e, &pts)?,
                ));
            }
        }
        Ok(Subgroup::new(t.group().clone(), &gens))
    }

    /// `ρ Φ_r(F̂^r)`.
    pub fn phi_image(&self, r: usize) -> Result<Subgroup, SymbolsError> {
        let h = self.phi_hom(r)?;
        let gens: Vec<Elem> = self.f[r]
            .image
            .generators()
            .iter()
            .map(|z| h.apply(z))
            .collect();
        Ok(Subgroup::new(h.target().clone(), &gens))
    }

    /// Kernel of `Φ_r` restricted to `F̂^r`, computed on a basis of `F̂^r`.
    pub fn phi_kernel_on_f(&self, r: usize) -> Result<CycleSubgroup, SymbolsError> {
        let h = self.phi_hom(r)?;
        let (sub, basis) = self.f[r].image.basis();
        let images: Vec<Elem> = basis.iter().map(|z| h.apply(z)).collect();
        let restricted = AbHom::from_images(sub, h.target().clone(), &images)?;
        let ambient = self.cq.group();
        let back: Vec<Elem> = restricted
            .kernel()
            .generators()
            .iter()
            .map(|k| {
                let mut acc = ambient.zero();
                for (c, z) in k.iter().zip(&basis) {
                    for (a, b) in acc.iter_mut().zip(z) {
                        *a += c * b;
                    }
                }
                ambient.reduced(acc)
            })
            .collect();
        Ok(CycleSubgroup {
            image: Subgroup::new(ambient.clone(), &back),
        })
    }

    /// `ρ Φ_r(c)` through the quotient.
    pub fn phi_of(&self, c: &Cycle, r: usize) -> Result<Elem, SymbolsError> {
        Ok(self.phi_hom(r)?.apply(&self.cq.q(self.model, c)?))
    }

    /// Closed-point basis of level-1 cycles.
    pub fn orbit_basis(&self) -> &OrbitBasis {
        self.cq.orbit_basis()
    }
}

/// All `r`-tuples from `xs`, lexicographic.
pub fn product(xs: &[u32], r: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                xs.iter().map(move |&x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// Invariant factors of consecutive quotients `F̂^r / F̂^{r+1}`.
pub fn graded_pieces(layer: &SymbolLayer) -> Vec<FgAbGroup> {
    layer.f.windows(2).map(|w| w[0].relative(&w[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{enumerate_tuples, w_generator, DEFAULT_SEED};
    use crate::tower::{FieldTower, DEFAULT_UNIVERSE_CAP};

    fn swap() -> PointModel {
        PointModel::build_mock(&[3, 3], vec![vec![0, 1], vec![1, 0]], 2, 1 << 20).unwrap()
    }

    fn elliptic(n: u64) -> PointModel {
        let t = FieldTower::new(5, 1, n, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        PointModel::build_elliptic(t, 1, 1).unwrap()
    }

    fn sample_symbols(m: &PointModel, r: usize, per_level: u64) -> Vec<SymbolExpr> {
        let mut out = Vec::new();
        for e in m.levels() {
            for t in enumerate_tuples(&m.level_points(e), r, per_level, DEFAULT_SEED ^ e) {
                out.push(SymbolExpr::single(m, e, &t).unwrap());
            }
        }
        out
    }

    #[test]
    fn parse_print_round_trip() {
        let m = swap();
        let x = m.point_of(&[1, 0]);
        let text = format!("2{{P{x},P0}}_2 - {{P4,P8}}_1");
        let s = SymbolExpr::parse(&m, &text).unwrap();
        assert_eq!(s.arity(), 2);
        assert_eq!(s.to_string(), text);
        assert_eq!(SymbolExpr::parse(&m, &s.to_string()).unwrap(), s);
        let spaced = SymbolExpr::parse(&m, &format!(" 2 * {{ P{x} , 0 }}_2-{{4,8}}_1")).unwrap();
        assert_eq!(spaced, s);
        let based = SymbolExpr::parse(&m, "{P1}_2/2").unwrap();
        assert_eq!(based.base(), 2);
        assert_eq!(based.to_string(), "{P1}_2/2");
        assert!(matches!(
            SymbolExpr::parse(&m, "{P1,P2}_2 + {P1}_2"),
            Err(SymbolsError::Parse { .. })
        ));
        assert!(matches!(
            SymbolExpr::parse(&m, "{P1,P2"),
            Err(SymbolsError::Parse { col: 7, .. })
        ));
        assert!(matches!(
            SymbolExpr::parse(&m, "{P1}_5"),
            Err(SymbolsError::Points(_))
        ));
    }

    #[test]
    fn zero_slots_vanish() {
        let m = swap();
        for r in 1..=3 {
            let t = ProxyTarget::new(&m, r);
            let s = SymbolExpr::single(&m, 2, &vec![m.zero(); r]).unwrap();
            assert!(t.group().is_zero(&resolve(&m, &t, &s)));
            assert!(psi(&m, &s).unwrap().is_zero());
        }
    }

    #[test]
    fn arity_one_resolves_to_trace() {
        let m = elliptic(3);
        let t = ProxyTarget::new(&m, 1);
        for e in m.levels() {
            for &a in m.level_points(e).iter().step_by(5) {
                let s = SymbolExpr::single(&m, e, &[a]).unwrap();
                assert_eq!(resolve(&m, &t, &s), t.pure(&m, &[m.trace_index(a, e, 1)]));
            }
        }
    }

    #[test]
    fn resolution_is_frobenius_invariant() {
        let m = elliptic(2);
        for r in 1..=3 {
            let t = ProxyTarget::new(&m, r);
            let inv = t.invariants();
            for s in sample_symbols(&m, r, 40) {
                assert!(inv.contains(&resolve(&m, &t, &s)));
            }
        }
    }

    #[test]
    fn projection_relations_resolve_to_zero() {
        let m = swap();
        for r in 1..=3 {
            let t = ProxyTarget::new(&m, r);
            let (e, l) = (1, 2);
            let le = m.level_points(e);
            let ll = m.level_points(l);
            for slot in 0..r {
                for rest in product(&le, r - 1) {
                    for &a in &ll {
                        let mut pts = rest.clone();
                        pts.insert(slot, a);
                        let rel = projection_relation(&m, e, l, slot, &pts).unwrap();
                        assert!(t.group().is_zero(&resolve(&m, &t, &rel)), "{rel}");
                    }
                }
            }
        }
    }

    #[test]
    fn phi_degree_and_zero_point() {
        let m = elliptic(2);
        let t0 = ProxyTarget::new(&m, 0);
        let x = m.level_points(2)[3];
        let c = Cycle::closed_point(&m, 1, x)
            .unwrap()
            .scale(3)
            .sub(&Cycle::point(&m, 1, 0).unwrap())
            .unwrap();
        assert_eq!(
            resolve(&m, &t0, &phi(&m, &c, 0)),
            vec![BigInt::from(c.degree())]
        );
        let t2 = ProxyTarget::new(&m, 2);
        assert!(t2.group().is_zero(&resolve(
            &m,
            &t2,
            &phi(&m, &Cycle::point(&m, 1, 0).unwrap(), 2)
        )));
    }

    #[test]
    fn psi_small_arities() {
        let m = swap();
        let (a, b) = (m.point_of(&[1, 0]), m.point_of(&[2, 1]));
        let s1 = SymbolExpr::single(&m, 2, &[a]).unwrap();
        let zero2 = Cycle::point(&m, 2, 0).unwrap();
        let expect1 = Cycle::point(&m, 2, a)
            .unwrap()
            .sub(&zero2)
            .unwrap()
            .tr_push(&m, 1)
            .unwrap();
        assert_eq!(psi(&m, &s1).unwrap(), expect1);
        let s2 = SymbolExpr::single(&m, 2, &[a, b]).unwrap();
        let mut c = Cycle::point(&m, 2, m.add(a, b)).unwrap();
        for (p, k) in [(a, -1), (b, -1), (0, 1)] {
            c = c.add(&Cycle::point(&m, 2, p).unwrap().scale(k)).unwrap();
        }
        assert_eq!(psi(&m, &s2).unwrap(), c.tr_push(&m, 1).unwrap());
    }

    #[test]
    fn phi_psi_is_factorial() {
        for m in [swap(), elliptic(3)] {
            for r in 1..=3 {
                let t = ProxyTarget::new(&m, r);
                for s in sample_symbols(&m, r, 60) {
                    let lhs = resolve(&m, &t, &phi(&m, &psi(&m, &s).unwrap(), r));
                    let rhs = t
                        .group()
                        .scale(&BigInt::from(factorial(r)), &resolve(&m, &t, &s));
                    assert_eq!(lhs, rhs, "{s}");
                }
            }
        }
    }

    #[test]
    fn phi_kills_w_below_arity() {
        let m = elliptic(2);
        for r in 1..=3 {
            for j in 0..r {
                let t = ProxyTarget::new(&m, j);
                for e in m.levels() {
                    for tuple in enumerate_tuples(&m.level_points(e), r, 40, DEFAULT_SEED) {
                        let w = w_generator(&m, e, &tuple).unwrap();
                        assert!(t.group().is_zero(&resolve(&m, &t, &phi(&m, &w, j))));
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_identities() {
        let m = elliptic(6);
        for r in 1..=2 {
            let t = ProxyTarget::new(&m, r);
            for s in sample_symbols(&m, r, 8) {
                let base = resolve(&m, &t, &s);
                for l in m.levels() {
                    let res = restrict_symbols(&m, &s, l).unwrap();
                    assert_eq!(resolve(&m, &t, &res), base, "base change of {s} to {l}");
                    let back = resolve(&m, &t, &res.transfer(1).unwrap());
                    assert_eq!(back, t.group().scale(&BigInt::from(l), &base));
                }
                assert_eq!(restrict_symbols(&m, &s, 1).unwrap(), s);
            }
        }
    }

    #[test]
    fn restriction_commutes_with_phi() {
        let m = elliptic(2);
        let basis = OrbitBasis::new(&m, 1).unwrap();
        for r in 0..=2 {
            let t = ProxyTarget::new(&m, r);
            for i in (0..basis.len()).step_by(3) {
                let mut v = vec![0; basis.len()];
                v[i] = 2;
                v[(i + 1) % basis.len()] = -1;
                let c = basis.cycle(&v);
                let lhs = resolve(&m, &t, &phi(&m, &c.res_pull(&m, 2).unwrap(), r));
                assert_eq!(lhs, resolve(&m, &t, &phi(&m, &c, r)));
            }
        }
    }

    #[test]
    fn layer_basic_shape() {
        let m = swap();
        let layer = SymbolLayer::new(&m, 3).unwrap();
        let f = layer.f_filtration();
        assert_eq!(f.len(), 5);
        for r in 0..4 {
            assert!(f[r + 1].is_subgroup_of(&f[r]));
        }
        assert_eq!(f[1], layer.g(1).unwrap());
        assert!(matches!(layer.r_group(0), Err(SymbolsError::Index { .. })));
        assert!(matches!(layer.b_group(1), Err(SymbolsError::Index { .. })));
    }
}
