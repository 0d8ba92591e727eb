//! Zero-cycles on the point model.
//!
//! A cycle at level `m` is a `F^m`-invariant integer function on universe
//! points; its closed points are the `F^m`-orbits. Level-1 cycles form the
//! group `C` that carries all filtrations.
//!
//! Subgroups of `C` containing `G^S` are handled through the exact quotient
//! `Q_S = C / G^S`, presented as `⊕_E Z[A(E)]/I_E^S` modulo Frobenius
//! coinvariance and the trace relations between levels. In that presentation
//! `G^r / G^S` is spanned by monomials of degree `>= r` in `u_i = [g_i] - [0]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::abgroup::{quotient, AbHom, Elem, FgAbGroup, Lattice, Presentation, Subgroup};
use crate::points::{LevelGroup, PointModel, PointsError};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CyclesError {
    #[error(transparent)]
    Points(#[from] PointsError),
    #[error("cycles live at different levels ({0} and {1})")]
    LevelMismatch(u64, u64),
    #[error("cycle is not invariant under F^{0}")]
    NotInvariant(u64),
    #[error("filtration index {r} exceeds the truncation depth {s}")]
    TooDeep { r: usize, s: usize },
    #[error("induced map does not kill relation {0}")]
    NotWellDefined(String),
}

/// Integer combination of universe points, invariant under `F^level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cycle {
    level: u64,
    coeffs: BTreeMap<u32, i64>,
}

impl Cycle {
    pub fn zero(level: u64) -> Self {
        Cycle {
            level,
            coeffs: BTreeMap::new(),
        }
    }

    /// `[a]` for a point rational at `level`.
    pub fn point(model: &PointModel, level: u64, a: u32) -> Result<Self, CyclesError> {
        model.check_level(level)?;
        if !model.is_at_level(a, level) {
            return Err(PointsError::NotAtLevel { point: a, level }.into());
        }
        let mut c = Cycle::zero(level);
        c.add_term(a, 1);
        Ok(c)
    }

    /// The closed point through `x` over `level`: the `F^level`-orbit of `x`.
    pub fn closed_point(model: &PointModel, level: u64, x: u32) -> Result<Self, CyclesError> {
        model.check_level(level)?;
        let mut c = Cycle::zero(level);
        let mut y = x;
        loop {
            c.add_term(y, 1);
            y = model.frob_pow(y, level);
            if y == x {
                break;
            }
        }
        Ok(c)
    }

    /// Builds a cycle from raw coefficients, checking invariance.
    pub fn from_coeffs(
        model: &PointModel,
        level: u64,
        coeffs: BTreeMap<u32, i64>,
    ) -> Result<Self, CyclesError> {
        model.check_level(level)?;
        let c = Cycle {
            level,
            coeffs: coeffs.into_iter().filter(|(_, v)| *v != 0).collect(),
        };
        if !c.is_invariant(model) {
            return Err(CyclesError::NotInvariant(level));
        }
        Ok(c)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, i64> {
        &self.coeffs
    }

    pub fn coeff(&self, a: u32) -> i64 {
        self.coeffs.get(&a).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, a: u32, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.coeffs.entry(a).or_insert(0);
        *e += k;
        if *e == 0 {
            self.coeffs.remove(&a);
        }
    }

    pub fn is_invariant(&self, model: &PointModel) -> bool {
        self.coeffs
            .iter()
            .all(|(&a, &k)| self.coeff(model.frob_pow(a, self.level)) == k)
    }

    pub fn add(&self, other: &Cycle) -> Result<Cycle, CyclesError> {
        if self.level != other.level {
            return Err(CyclesError::LevelMismatch(self.level, other.level));
        }
        let mut out = self.clone();
        for (&a, &k) in &other.coeffs {
            out.add_term(a, k);
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Cycle {
        let mut out = Cycle::zero(self.level);
        for (&a, &c) in &self.coeffs {
            out.add_term(a, c * k);
        }
        out
    }

    pub fn sub(&self, other: &Cycle) -> Result<Cycle, CyclesError> {
        self.add(&other.scale(-1))
    }

    /// Sum of coefficients over universe points.
    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    /// `Σ_{i < L/E} (F^{E i})_* c` for a level-`L` cycle.
    pub fn tr_push(&self, model: &PointModel, to: u64) -> Result<Cycle, CyclesError> {
        let from = self.level;
        model.check_level(to)?;
        if !from.is_multiple_of(to) {
            return Err(PointsError::LevelOrder { from: to, to: from }.into());
        }
        let mut out = Cycle::zero(to);
        for (&a, &k) in &self.coeffs {
            let mut x = a;
            for _ in 0..from / to {
                out.add_term(x, k);
                x = model.frob_pow(x, to);
            }
        }
        Ok(out)
    }

    /// Pullback to level `L`: same function, finer orbits.
    pub fn res_pull(&self, model: &PointModel, to: u64) -> Result<Cycle, CyclesError> {
        model.check_level(to)?;
        if !to.is_multiple_of(self.level) {
            return Err(PointsError::LevelOrder {
                from: self.level,
                to,
            }
            .into());
        }
        Ok(Cycle {
            level: to,
            coeffs: self.coeffs.clone(),
        })
    }

    /// Convolution `[a] ⋆ [b] = [a + b]`.
    pub fn pontryagin(&self, model: &PointModel, other: &Cycle) -> Result<Cycle, CyclesError> {
        if self.level != other.level {
            return Err(CyclesError::LevelMismatch(self.level, other.level));
        }
        let mut out = Cycle::zero(self.level);
        for (&a, &k) in &self.coeffs {
            for (&b, &l) in &other.coeffs {
                out.add_term(model.add(a, b), k * l);
            }
        }
        Ok(out)
    }

    /// Coefficients on the closed points of the cycle's level, keyed by the
    /// minimal orbit representative.
    pub fn closed_point_coeffs(&self, model: &PointModel) -> BTreeMap<u32, i64> {
        let mut out = BTreeMap::new();
        for (&a, &k) in &self.coeffs {
            out.entry(orbit_rep(model, self.level, a)).or_insert(k);
        }
        out
    }

    /// Formal sum over closed points, e.g. `3·[P17] − 2·[P0]`.
    pub fn format(&self, model: &PointModel) -> String {
        let terms = self.closed_point_coeffs(model);
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (rep, k)) in terms.iter().enumerate() {
            let sign = if *k < 0 { "−" } else { "+" };
            let mag = k.unsigned_abs();
            if i == 0 {
                if *k < 0 {
                    out.push('−');
                }
            } else {
                write!(out, " {sign} ").unwrap();
            }
            if mag != 1 {
                write!(out, "{mag}·").unwrap();
            }
            write!(out, "[P{rep}]").unwrap();
        }
        out
    }

    /// Legend mapping the printed representatives to coordinates.
    pub fn legend(&self, model: &PointModel) -> String {
        let mut out = String::new();
        for rep in self.closed_point_coeffs(model).keys() {
            writeln!(out, "P{rep} = {}", model.describe(*rep)).unwrap();
        }
        out
    }
}

fn orbit_rep(model: &PointModel, level: u64, a: u32) -> u32 {
    let mut best = a;
    let mut y = model.frob_pow(a, level);
    while y != a {
        best = best.min(y);
        y = model.frob_pow(y, level);
    }
    best
}

/// Closed points over a level: the `F^m`-orbits, each led by its minimal index.
#[derive(Clone, Debug)]
pub struct OrbitBasis {
    pub level: u64,
    pub orbits: Vec<Vec<u32>>,
    position: HashMap<u32, usize>,
}

impl OrbitBasis {
    pub fn new(model: &PointModel, level: u64) -> Result<Self, CyclesError> {
        model.check_level(level)?;
        let mut seen = vec![false; model.size()];
        let mut orbits = Vec::new();
        let mut position = HashMap::new();
        for a in 0..model.size() as u32 {
            if seen[a as usize] {
                continue;
            }
            let mut orbit = vec![a];
            seen[a as usize] = true;
            let mut y = model.frob_pow(a, level);
            while y != a {
                seen[y as usize] = true;
                orbit.push(y);
                y = model.frob_pow(y, level);
            }
            for &y in &orbit {
                position.insert(y, orbits.len());
            }
            orbits.push(orbit);
        }
        Ok(OrbitBasis {
            level,
            orbits,
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn rep(&self, i: usize) -> u32 {
        self.orbits[i][0]
    }

    pub fn index_of(&self, a: u32) -> usize {
        self.position[&a]
    }

    /// Coordinates of a cycle at this level.
    pub fn coords(&self, c: &Cycle) -> Vec<i64> {
        assert_eq!(c.level, self.level);
        let mut v = vec![0; self.len()];
        for (&a, &k) in &c.coeffs {
            v[self.position[&a]] = k;
        }
        v
    }

    pub fn cycle(&self, v: &[i64]) -> Cycle {
        let mut c = Cycle::zero(self.level);
        for (orbit, &k) in self.orbits.iter().zip(v) {
            for &a in orbit {
                c.add_term(a, k);
            }
        }
        c
    }
}

/// `([a_1] - [0]) ⋆ ... ⋆ ([a_r] - [0])` at level `E` by inclusion-exclusion,
/// without the trace.
pub fn w_untraced(model: &PointModel, level: u64, tuple: &[u32]) -> Cycle {
    let r = tuple.len();
    let mut c = Cycle::zero(level);
    for mask in 0u64..(1 << r) {
        let mut s = model.zero();
        for (i, &a) in tuple.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s = model.add(s, a);
            }
        }
        let sign = if (r as u32 - mask.count_ones()).is_multiple_of(2) {
            1
        } else {
            -1
        };
        c.add_term(s, sign);
    }
    c
}

/// `w_{a_1..a_r} = Tr_{E/1}(([a_1] - [0]) ⋆ ... ⋆ ([a_r] - [0]))`.
pub fn w_generator(model: &PointModel, level: u64, tuple: &[u32]) -> Result<Cycle, CyclesError> {
    model.check_level(level)?;
    for &a in tuple {
        if !model.is_at_level(a, level) {
            return Err(PointsError::NotAtLevel { point: a, level }.into());
        }
    }
    w_untraced(model, level, tuple).tr_push(model, 1)
}

/// All `r`-tuples of points of `A(level)` when there are at most `cap`, else
/// `cap` tuples drawn uniformly with a seeded generator. Deterministic.
pub fn enumerate_tuples(points: &[u32], r: usize, cap: u64, seed: u64) -> Vec<Vec<u32>> {
    let n = points.len() as u128;
    let total = n.checked_pow(r as u32).unwrap_or(u128::MAX);
    let decode = |mut t: u128| {
        let mut v = vec![0u32; r];
        for s in (0..r).rev() {
            v[s] = points[(t % n) as usize];
            t /= n;
        }
        v
    };
    if total <= cap as u128 {
        return (0..total).map(decode).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if total <= usize::MAX as u128 {
        let mut idx = sample(&mut rng, total as usize, cap as usize).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|t| decode(t as u128)).collect()
    } else {
        use rand::Rng;
        (0..cap).map(|_| decode(rng.gen_range(0..total))).collect()
    }
}

fn binomial(n: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `Z[u_1..u_k]` truncated below total degree `s`.
#[derive(Clone, Debug)]
struct TruncRing {
    k: usize,
    monos: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    table: Vec<Vec<Option<usize>>>,
}

type Poly = Vec<BigInt>;

impl TruncRing {
    fn new(k: usize, s: usize) -> Self {
        let mut monos: Vec<Vec<u32>> = Vec::new();
        for deg in 0..s as u32 {
            let mut cur = vec![Vec::new()];
            for i in 0..k {
                let mut next = Vec::new();
                for m in &cur {
                    let used: u32 = m.iter().sum();
                    let lo = if i + 1 == k { deg - used } else { 0 };
                    for e in lo..=deg - used {
                        let mut m2: Vec<u32> = m.clone();
                        m2.push(e);
                        next.push(m2);
                    }
                }
                cur = next;
            }
            // descending lexicographic within a degree
            cur.retain(|m| m.iter().sum::<u32>() == deg);
            cur.sort_by(|a, b| b.cmp(a));
            monos.extend(cur);
        }
        let index: HashMap<Vec<u32>, usize> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let table = monos
            .iter()
            .map(|a| {
                monos
                    .iter()
                    .map(|b| {
                        let m: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        index.get(&m).copied()
                    })
                    .collect()
            })
            .collect();
        TruncRing {
            k,
            monos,
            index,
            table,
        }
    }

    fn len(&self) -> usize {
        self.monos.len()
    }

    fn zero(&self) -> Poly {
        vec![BigInt::zero(); self.len()]
    }

    fn one(&self) -> Poly {
        let mut p = self.zero();
        p[0] = BigInt::one();
        p
    }

    fn mono(&self, i: usize) -> Poly {
        let mut p = self.zero();
        p[i] = BigInt::one();
        p
    }

    fn var_index(&self, i: usize) -> Option<usize> {
        let mut m = vec![0u32; self.k];
        m[i] = 1;
        self.index.get(&m).copied()
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if let Some(t) = self.table[i][j] {
                    out[t] += x * y;
                }
            }
        }
        out
    }

    fn pow(&self, a: &Poly, e: u32) -> Poly {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    /// `(1 + u_i)^e`, `e >= 0`.
    fn one_plus_pow(&self, i: usize, e: u64) -> Poly {
        let mut p = self.one();
        if let Some(v) = self.var_index(i) {
            let e = BigInt::from(e);
            let mut power = self.mono(v);
            for j in 1..self.len() {
                let c = binomial(&e, j);
                if c.is_zero() || power.iter().all(Zero::is_zero) {
                    break;
                }
                for (t, x) in p.iter_mut().zip(&power) {
                    *t += &c * x;
                }
                power = self.mul(&power, &self.mono(v));
            }
        }
        p
    }

    /// Image of `[Σ k_i g_i]`, i.e. `Π (1 + u_i)^{k_i}`.
    fn delta(&self, k: &[u64]) -> Poly {
        k.iter().enumerate().fold(self.one(), |acc, (i, &e)| {
            self.mul(&acc, &self.one_plus_pow(i, e))
        })
    }

    /// Substitutes `u_i -> images[i]` into the monomial with index `m`.
    fn substitute(&self, m: usize, images: &[Poly]) -> Poly {
        self.substitute_exponents(&self.monos[m], images)
    }

    /// `Π images[i]^{alpha_i}`, computed in this ring.
    fn substitute_exponents(&self, alpha: &[u32], images: &[Poly]) -> Poly {
        alpha.iter().enumerate().fold(self.one(), |acc, (i, &e)| {
            self.mul(&acc, &self.pow(&images[i], e))
        })
    }
}

#[derive(Clone, Debug)]
struct LevelBlock {
    level: u64,
    group: LevelGroup,
    ring: TruncRing,
    offset: usize,
}

/// `Q_S = C / G^S` with the quotient map `q` and lifts back to cycles.
#[derive(Clone, Debug)]
pub struct CycleQuotient {
    s: usize,
    blocks: Vec<LevelBlock>,
    raw_dim: usize,
    relations: Vec<(String, Elem)>,
    presentation: Presentation,
    /// relations in Hermite form, to shorten lifts
    relation_lattice: Lattice,
    orbits: OrbitBasis,
}

impl CycleQuotient {
    pub fn new(model: &PointModel, s: usize) -> Result<Self, CyclesError> {
        assert!(s >= 1, "truncation depth must be positive");
        let mut blocks = Vec::new();
        let mut offset = 0;
        for e in model.levels() {
            let group = model.level_group(e);
            let ring = TruncRing::new(group.gens.len(), s);
            let len = ring.len();
            blocks.push(LevelBlock {
                level: e,
                group,
                ring,
                offset,
            });
            offset += len;
        }
        let raw_dim = offset;
        let mut relations = Vec::new();
        let embed = |b: &LevelBlock, p: &Poly| {
            let mut v = vec![BigInt::zero(); raw_dim];
            v[b.offset..b.offset + p.len()].clone_from_slice(p);
            v
        };
        for b in &blocks {
            let ring = &b.ring;
            // (1 + u_i)^{c_i} = 1, times every monomial of degree <= s - 2
            for (i, &c) in b.group.orders.iter().enumerate() {
                let f = ring.sub(&ring.one_plus_pow(i, c), &ring.one());
                for (m, mono) in ring.monos.iter().enumerate() {
                    if mono.iter().sum::<u32>() as usize + 2 <= s {
                        let rel = ring.mul(&ring.mono(m), &f);
                        relations.push((
                            format!("order of g{i} at level {}", b.level),
                            embed(b, &rel),
                        ));
                    }
                }
            }
            // Frobenius coinvariance
            let frob_images: Vec<Poly> = b
                .group
                .gens
                .iter()
                .map(|&g| {
                    ring.sub(
                        &ring.delta(b.group.coords(model.frob(g)).unwrap()),
                        &ring.one(),
                    )
                })
                .collect();
            for m in 0..ring.len() {
                let rel = ring.sub(&ring.mono(m), &ring.substitute(m, &frob_images));
                relations.push((format!("frobenius at level {}", b.level), embed(b, &rel)));
            }
        }
        // trace relations ι_{E/E'}(x) = [E:E'] x
        for small in &blocks {
            for big in blocks
                .iter()
                .filter(|b| b.level % small.level == 0 && b.level != small.level)
            {
                let images: Vec<Poly> = small
                    .group
                    .gens
                    .iter()
                    .map(|&g| {
                        big.ring.sub(
                            &big.ring.delta(big.group.coords(g).unwrap()),
                            &big.ring.one(),
                        )
                    })
                    .collect();
                let ratio = BigInt::from(big.level / small.level);
                for m in 0..small.ring.len() {
                    let mut rel = embed(
                        big,
                        &big.ring.substitute_exponents(&small.ring.monos[m], &images),
                    );
                    rel[small.offset + m] -= &ratio;
                    relations.push((
                        format!("trace from level {} to {}", big.level, small.level),
                        rel,
                    ));
                }
            }
        }
        let rows: Vec<Elem> = relations.iter().map(|(_, r)| r.clone()).collect();
        let presentation = Presentation::of_relations(raw_dim, &rows);
        let mut relation_lattice = Lattice::new(vec![BigInt::zero(); raw_dim]);
        for r in &rows {
            relation_lattice.insert(r);
        }
        relation_lattice.canonicalize();
        let orbits = OrbitBasis::new(model, 1)?;
        Ok(CycleQuotient {
            s,
            blocks,
            raw_dim,
            relations,
            presentation,
            relation_lattice,
            orbits,
        })
    }

    /// Truncation depth `S`.
    pub fn depth(&self) -> usize {
        self.s
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.presentation.group
    }

    pub fn orbit_basis(&self) -> &OrbitBasis {
        &self.orbits
    }

    pub fn raw_dim(&self) -> usize {
        self.raw_dim
    }

    fn block(&self, level: u64) -> &LevelBlock {
        self.blocks
            .iter()
            .find(|b| b.level == level)
            .expect("level present")
    }

    /// Raw image of the closed point through `x` (over level 1).
    fn raw_point(&self, model: &PointModel, x: u32) -> Elem {
        let b = self.block(model.level_of(x));
        let p = b
            .ring
            .delta(b.group.coords(x).expect("point lies in its level group"));
        let mut v = vec![BigInt::zero(); self.raw_dim];
        v[b.offset..b.offset + p.len()].clone_from_slice(&p);
        v
    }

    /// `q(c)` for a level-1 cycle.
    pub fn q(&self, model: &PointModel, c: &Cycle) -> Result<Elem, CyclesError> {
        if c.level != 1 {
            return Err(CyclesError::LevelMismatch(c.level, 1));
        }
        let mut raw = vec![BigInt::zero(); self.raw_dim];
        for (rep, k) in c.closed_point_coeffs(model) {
            for (t, x) in raw.iter_mut().zip(self.raw_point(model, rep)) {
                *t += x * k;
            }
        }
        Ok(self.presentation.project(&raw))
    }

    /// Images of the closed points, in orbit-basis order.
    pub fn q_orbits(&self, model: &PointModel) -> Vec<Elem> {
        (0..self.orbits.len())
            .map(|i| {
                self.presentation
                    .project(&self.raw_point(model, self.orbits.rep(i)))
            })
            .collect()
    }

    /// Group-ring element of a raw monomial: `Σ_β coeff_β [Σ β_i g_i]` at its level.
    fn monomial_expansion(&self, model: &PointModel, raw_index: usize) -> (u64, Vec<(u32, i64)>) {
        let b = self
            .blocks
            .iter()
            .rev()
            .find(|b| b.offset <= raw_index)
            .unwrap();
        let alpha = &b.ring.monos[raw_index - b.offset];
        let mut terms: Vec<(u32, i64)> = vec![(model.zero(), 1)];
        for (i, &a) in alpha.iter().enumerate() {
            let g = b.group.gens[i];
            for _ in 0..a {
                let mut next = Vec::with_capacity(terms.len() * 2);
                for &(x, k) in &terms {
                    next.push((model.add(x, g), k));
                    next.push((x, -k));
                }
                terms = next;
            }
        }
        (b.level, terms)
    }

    /// A level-1 cycle with the given image.
    pub fn lift(&self, model: &PointModel, y: &[BigInt]) -> Cycle {
        let mut raw = self.presentation.lift(&self.group().reduced(y.to_vec()));
        self.relation_lattice.reduce(&mut raw);
        let mut c = Cycle::zero(1);
        for (i, coef) in raw.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let k = coef.to_i64().expect("lift coefficient fits in i64");
            let (level, terms) = self.monomial_expansion(model, i);
            for (x, t) in terms {
                let mut y = x;
                for _ in 0..level {
                    c.add_term(y, k * t);
                    y = model.frob(y);
                }
            }
        }
        c
    }

    /// Raw images of the map `c -> Σ_y c(y) f(y)` on level-1 cycles.
    pub fn raw_images_of_point_map(
        &self,
        model: &PointModel,
        target: &FgAbGroup,
        f: impl Fn(u32) -> Elem,
    ) -> Vec<Elem> {
        let mut memo: HashMap<u32, Elem> = HashMap::new();
        (0..self.raw_dim)
            .map(|i| {
                let (level, terms) = self.monomial_expansion(model, i);
                let mut acc = target.zero();
                for (x, t) in terms {
                    let mut y = x;
                    for _ in 0..level {
                        let v = memo.entry(y).or_insert_with(|| f(y));
                        for (a, b) in acc.iter_mut().zip(v.iter()) {
                            *a += b * t;
                        }
                        y = model.frob(y);
                    }
                }
                target.reduced(acc)
            })
            .collect()
    }

    /// The homomorphism `Q_S -> target` induced by raw images, after checking
    /// that every relation (hence `G^S`) maps to zero.
    pub fn hom_from_raw(
        &self,
        target: &FgAbGroup,
        raw_images: &[Elem],
    ) -> Result<AbHom, CyclesError> {
        for (label, rel) in &self.relations {
            let mut acc = target.zero();
            for (c, img) in rel.iter().zip(raw_images) {
                if c.is_zero() {
                    continue;
                }
                for (a, b) in acc.iter_mut().zip(img) {
                    *a += c * b;
                }
            }
            if !target.is_zero(&acc) {
                return Err(CyclesError::NotWellDefined(label.clone()));
            }
        }
        let g = self.group();
        let images: Vec<Elem> = (0..g.ngens())
            .map(|i| {
                let raw = self.presentation.lift(&g.basis(i));
                let mut acc = target.zero();
                for (c, img) in raw.iter().zip(raw_images) {
                    for (a, b) in acc.iter_mut().zip(img) {
                        *a += c * b;
                    }
                }
                target.reduced(acc)
            })
            .collect();
        AbHom::from_images(g.clone(), target.clone(), &images)
            .map_err(|e| CyclesError::NotWellDefined(e.to_string()))
    }

    /// Raw images of the degree-`d` monomials killed by truncation, i.e. the
    /// extra checks that an induced map vanishes on `I^S`.
    pub fn boundary_monomials(&self, model: &PointModel) -> Vec<(u64, Vec<(u32, i64)>)> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let k = b.group.gens.len();
            let ring = TruncRing::new(k, self.s + 1);
            for alpha in ring
                .monos
                .iter()
                .filter(|m| m.iter().sum::<u32>() as usize == self.s)
            {
                let mut terms: Vec<(u32, i64)> = vec![(model.zero(), 1)];
                for (i, &a) in alpha.iter().enumerate() {
                    for _ in 0..a {
                        terms = terms
                            .iter()
                            .flat_map(|&(x, t)| [(model.add(x, b.group.gens[i]), t), (x, -t)])
                            .collect();
                    }
                }
                out.push((b.level, terms));
            }
        }
        out
    }

    /// Raw images of `z -> k z - Ψ_j Φ_j (z)` (closed point `x` of degree `d`
    /// goes to `k [x] - Tr_d(([x] - [0])^{⋆ j})`).
    pub fn raw_images_of_psi_phi_defect(&self, k: i64, j: usize) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.raw_dim);
        for b in &self.blocks {
            let ring = &b.ring;
            let kk = BigInt::from(k);
            // [t](u_i) = (1 + u_i)^t - 1
            let mult: Vec<Vec<Poly>> = (0..=j as u64)
                .map(|t| {
                    (0..ring.k)
                        .map(|i| ring.sub(&ring.one_plus_pow(i, t), &ring.one()))
                        .collect()
                })
                .collect();
            for m in 0..ring.len() {
                let mut p: Poly = ring.mono(m).iter().map(|x| x * &kk).collect();
                for t in 0..=j {
                    let c = binomial(&BigInt::from(j), t)
                        * if (j - t).is_multiple_of(2) { 1 } else { -1 };
                    let term = if t == 0 {
                        if m == 0 {
                            ring.one()
                        } else {
                            ring.zero()
                        }
                    } else {
                        ring.substitute(m, &mult[t])
                    };
                    for (a, x) in p.iter_mut().zip(&term) {
                        *a -= &c * x;
                    }
                }
                let mut v = vec![BigInt::zero(); self.raw_dim];
                v[b.offset..b.offset + p.len()].clone_from_slice(&p);
                out.push(self.presentation.project(&v));
            }
        }
        out
    }

    /// Image of `G^r` (spanned by the monomials of degree `r..S`).
    pub fn g_image(&self, r: usize) -> Result<Subgroup, CyclesError> {
        if r > self.s {
            return Err(CyclesError::TooDeep { r, s: self.s });
        }
        let mut gens = Vec::new();
        for b in &self.blocks {
            for (m, mono) in b.ring.monos.iter().enumerate() {
                if mono.iter().sum::<u32>() as usize >= r {
                    let mut v = vec![BigInt::zero(); self.raw_dim];
                    v[b.offset + m] = BigInt::one();
                    gens.push(self.presentation.project(&v));
                }
            }
        }
        Ok(Subgroup::new(self.group().clone(), &gens))
    }

    /// Basis points of `A(level)` used by the presentation.
    pub fn level_group(&self, level: u64) -> &LevelGroup {
        &self.block(level).group
    }

    pub fn levels(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.level).collect()
    }
}

/// A subgroup of level-1 cycles containing `G^S`, stored as its image in `Q_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSubgroup {
    pub image: Subgroup,
}

impl CycleSubgroup {
    pub fn whole(cq: &CycleQuotient) -> Self {
        CycleSubgroup {
            image: Subgroup::whole(cq.group().clone()),
        }
    }

    pub fn contains(
        &self,
        cq: &CycleQuotient,
        model: &PointModel,
        c: &Cycle,
    ) -> Result<bool, CyclesError> {
        Ok(self.image.contains(&cq.q(model, c)?))
    }

    pub fn is_subgroup_of(&self, other: &CycleSubgroup) -> bool {
        self.image.is_subgroup_of(&other.image)
    }

    /// Cycles generating the subgroup together with `G^S`.
    pub fn generators(&self, cq: &CycleQuotient, model: &PointModel) -> Vec<Cycle> {
        self.image
            .generators()
            .iter()
            .map(|g| cq.lift(model, g))
            .collect()
    }

    /// Invariant factors of `C / self`.
    pub fn cokernel(&self, cq: &CycleQuotient) -> FgAbGroup {
        quotient(cq.group(), &self.image).0
    }

    /// Invariant factors of `self / other` for `other ⊆ self`.
    pub fn relative(&self, other: &CycleSubgroup) -> FgAbGroup {
        let (q, p) = quotient(self.image.ambient(), &other.image);
        let gens: Vec<Elem> = self.image.generators().iter().map(|g| p.apply(g)).collect();
        Subgroup::new(q, &gens).as_group()
    }
}

/// `G^r` over level 1, exact via the truncated presentation.
pub fn g_filtration(cq: &CycleQuotient, r: usize) -> Result<CycleSubgroup, CyclesError> {
    Ok(CycleSubgroup {
        image: cq.g_image(r)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{FieldTower, DEFAULT_UNIVERSE_CAP};

    fn swap() -> PointModel {
        PointModel::build_mock(&[3, 3], vec![vec![0, 1], vec![1, 0]], 2, 1 << 20).unwrap()
    }

    fn z4_neg() -> PointModel {
        PointModel::build_mock(&[4], vec![vec![3]], 2, 1 << 20).unwrap()
    }

    fn elliptic(n: u64) -> PointModel {
        let t = FieldTower::new(5, 1, n, DEFAULT_UNIVERSE_CAP, 0).unwrap();
        PointModel::build_elliptic(t, 1, 1).unwrap()
    }

    #[test]
    fn degree_examples() {
        let m = swap();
        assert_eq!(Cycle::point(&m, 1, m.zero()).unwrap().degree(), 1);
        let x = m.point_of(&[1, 0]);
        assert_eq!(Cycle::closed_point(&m, 1, x).unwrap().degree(), 2);
        let (a, b) = (m.point_of(&[1, 1]), m.point_of(&[2, 2]));
        assert_eq!(w_generator(&m, 1, &[a, b]).unwrap().degree(), 0);
    }

    #[test]
    fn pontryagin_examples() {
        let m = elliptic(2);
        let (a, b) = (5u32, 11u32);
        let zero = Cycle::point(&m, 2, m.zero()).unwrap();
        let ca = Cycle::point(&m, 2, a).unwrap();
        let cb = Cycle::point(&m, 2, b).unwrap();
        assert_eq!(zero.pontryagin(&m, &ca).unwrap(), ca);
        let lhs = ca
            .sub(&zero)
            .unwrap()
            .pontryagin(&m, &cb.sub(&zero).unwrap())
            .unwrap();
        assert_eq!(lhs, w_untraced(&m, 2, &[a, b]));
        // brute force over supports
        let c1 = ca.scale(3).add(&cb).unwrap();
        let c2 = cb.scale(-2).add(&zero).unwrap();
        let conv = c1.pontryagin(&m, &c2).unwrap();
        let mut brute: BTreeMap<u32, i64> = BTreeMap::new();
        for z in 0..m.size() as u32 {
            let mut s = 0;
            for x in 0..m.size() as u32 {
                s += c1.coeff(x) * c2.coeff(m.sub(z, x));
            }
            if s != 0 {
                brute.insert(z, s);
            }
        }
        assert_eq!(conv.coeffs(), &brute);
    }

    #[test]
    fn pontryagin_commutative_associative() {
        let m = swap();
        let pts = m.level_points(2);
        for &a in &pts {
            for &b in &pts {
                let (x, y) = (
                    Cycle::point(&m, 2, a).unwrap(),
                    Cycle::point(&m, 2, b).unwrap().scale(2),
                );
                assert_eq!(x.pontryagin(&m, &y).unwrap(), y.pontryagin(&m, &x).unwrap());
                for &c in &pts {
                    let z = Cycle::point(&m, 2, c).unwrap().add(&x).unwrap();
                    let l = x.pontryagin(&m, &y).unwrap().pontryagin(&m, &z).unwrap();
                    let r = x.pontryagin(&m, &y.pontryagin(&m, &z).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn push_pull() {
        let m = elliptic(6);
        for e in m.levels() {
            for l in m.levels().into_iter().filter(|l| l % e == 0) {
                for &a in m.level_points(e).iter().step_by(3) {
                    let c = Cycle::closed_point(&m, e, a).unwrap().scale(2);
                    let back = c.res_pull(&m, l).unwrap().tr_push(&m, e).unwrap();
                    assert_eq!(back, c.scale((l / e) as i64));
                    assert_eq!(c.res_pull(&m, l).unwrap().degree(), c.degree());
                    let pushed = Cycle::point(&m, l, a).unwrap().tr_push(&m, e).unwrap();
                    assert_eq!(pushed.degree(), (l / e) as i64);
                    assert!(pushed.is_invariant(&m));
                }
            }
        }
    }

    #[test]
    fn trace_of_rational_point_is_closed_point() {
        let m = swap();
        let x = m.point_of(&[1, 0]);
        let pushed = Cycle::point(&m, 2, x).unwrap().tr_push(&m, 1).unwrap();
        assert_eq!(pushed, Cycle::closed_point(&m, 1, x).unwrap());
    }

    #[test]
    fn pullback_orbit_counts_match_splitting() {
        let m = elliptic(6);
        for e in m.levels() {
            let basis_e = OrbitBasis::new(&m, e).unwrap();
            for l in m.levels().into_iter().filter(|l| l % e == 0) {
                let basis_l = OrbitBasis::new(&m, l).unwrap();
                for orbit in basis_e.orbits.iter().step_by(17) {
                    let c = basis_e.cycle(&vec_one_at(basis_e.len(), basis_e.index_of(orbit[0])));
                    let pulled = c.res_pull(&m, l).unwrap();
                    let pieces = pulled.closed_point_coeffs(&m).len() as u64;
                    // closed point of degree d over E splits into gcd(d, L/E) points over L
                    let d = orbit.len() as u64;
                    let (g, _) = crate::tower::extension_splitting(d, l / e);
                    assert_eq!(pieces, g);
                    assert_eq!(
                        basis_l
                            .orbits
                            .iter()
                            .filter(|o| pulled.coeff(o[0]) != 0)
                            .count() as u64,
                        g
                    );
                }
            }
        }
    }

    fn vec_one_at(n: usize, i: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    #[test]
    fn w_generator_forms_agree() {
        let m = elliptic(3);
        let pts = m.level_points(3);
        for tuple in enumerate_tuples(&pts, 3, 50, DEFAULT_SEED) {
            let mut prod = Cycle::point(&m, 3, m.zero()).unwrap();
            let zero = prod.clone();
            for &a in &tuple {
                let d = Cycle::point(&m, 3, a).unwrap().sub(&zero).unwrap();
                prod = prod.pontryagin(&m, &d).unwrap();
            }
            assert_eq!(
                w_generator(&m, 3, &tuple).unwrap(),
                prod.tr_push(&m, 1).unwrap()
            );
        }
        assert!(w_generator(&m, 1, &[m.zero(), m.zero()]).unwrap().is_zero());
        let a = pts[4];
        let single = w_generator(&m, 3, &[a]).unwrap();
        let expect = Cycle::point(&m, 3, a)
            .unwrap()
            .sub(&Cycle::point(&m, 3, m.zero()).unwrap())
            .unwrap();
        assert_eq!(single, expect.tr_push(&m, 1).unwrap());
    }

    #[test]
    fn formatting() {
        let m = swap();
        let x = m.point_of(&[1, 0]);
        let c = Cycle::closed_point(&m, 1, x)
            .unwrap()
            .scale(3)
            .sub(&Cycle::point(&m, 1, 0).unwrap().scale(2))
            .unwrap();
        assert_eq!(c.format(&m), format!("−2·[P0] + 3·[P{}]", x.min(m.frob(x))));
        assert!(c.legend(&m).contains("P0 = (0, 0)"));
    }

    #[test]
    fn tuples_are_deterministic() {
        let pts: Vec<u32> = (0..50).collect();
        let a = enumerate_tuples(&pts, 4, 1000, 7);
        assert_eq!(a, enumerate_tuples(&pts, 4, 1000, 7));
        assert_eq!(a.len(), 1000);
        assert_eq!(enumerate_tuples(&pts, 2, 10_000, 7).len(), 2500);
    }

    /// Direct lattice of `G^r` in the orbit basis, from every tuple at every level.
    fn direct_g(m: &PointModel, basis: &OrbitBasis, r: usize) -> Subgroup {
        let amb = FgAbGroup::free(basis.len());
        let mut gens = Vec::new();
        for e in m.levels() {
            for t in enumerate_tuples(&m.level_points(e), r, u64::MAX, 0) {
                let w = w_generator(m, e, &t).unwrap();
                gens.push(basis.coords(&w).iter().map(|&x| BigInt::from(x)).collect());
            }
        }
        if r == 0 {
            return Subgroup::whole(amb);
        }
        Subgroup::new(amb, &gens)
    }

    fn q_hom(cq: &CycleQuotient, m: &PointModel) -> AbHom {
        let basis = cq.orbit_basis();
        let imgs = cq.q_orbits(m);
        AbHom::from_images(FgAbGroup::free(basis.len()), cq.group().clone(), &imgs).unwrap()
    }

    #[test]
    fn presentation_matches_direct_lattice() {
        for m in [
            swap(),
            z4_neg(),
            PointModel::build_mock(&[2, 2], vec![vec![1, 1], vec![0, 1]], 2, 100).unwrap(),
        ] {
            let s = 3;
            let cq = CycleQuotient::new(&m, s).unwrap();
            let basis = cq.orbit_basis();
            let q = q_hom(&cq, &m);
            assert_eq!(q.kernel(), direct_g(&m, basis, s), "ker q = G^S");
            for r in 0..=s {
                let direct = direct_g(&m, basis, r);
                let image = cq.g_image(r).unwrap();
                let pre = image
                    .generators()
                    .iter()
                    .map(|g| {
                        basis
                            .coords(&cq.lift(&m, g))
                            .iter()
                            .map(|&x| BigInt::from(x))
                            .collect()
                    })
                    .collect::<Vec<Elem>>();
                let preimage = Subgroup::new(direct.ambient().clone(), &pre).sum(&q.kernel());
                assert_eq!(preimage, direct, "G^{r}");
            }
        }
    }

    #[test]
    fn lift_is_a_section() {
        let m = elliptic(2);
        let cq = CycleQuotient::new(&m, 4).unwrap();
        let g = cq.group();
        for i in 0..g.ngens() {
            let y = g.basis(i);
            assert_eq!(cq.q(&m, &cq.lift(&m, &y)).unwrap(), y);
        }
    }

    #[test]
    fn g_filtration_is_decreasing() {
        let m = elliptic(6);
        let cq = CycleQuotient::new(&m, 4).unwrap();
        let gs: Vec<CycleSubgroup> = (0..=4).map(|r| g_filtration(&cq, r).unwrap()).collect();
        for r in 0..4 {
            assert!(gs[r + 1].is_subgroup_of(&gs[r]));
        }
        assert!(gs[4].image.is_trivial());
        assert_eq!(gs[0], CycleSubgroup::whole(&cq));
        // G^1 is the degree-zero part
        for c in gs[1].generators(&cq, &m) {
            assert_eq!(c.degree(), 0);
        }
        assert!(matches!(
            g_filtration(&cq, 5),
            Err(CyclesError::TooDeep { .. })
        ));
    }
}
