//! Finitely generated abelian groups over the integers.
//!
//! Groups are kept in invariant-factor form `Z/d_1 + ... + Z/d_k` with
//! `d_1 | d_2 | ...` and zeros (free factors) last. Elements are coordinate
//! vectors. Non-canonical decompositions (tensor powers, cochain spaces)
//! pass through [`Presentation`], which converts them to canonical form.

pub mod lattice;
pub mod matrix;
pub mod modular;
pub mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

pub use lattice::Lattice;
pub use matrix::Matrix;
pub use modular::{kernel_of_map, ModLattice};
pub use snf::{integer_kernel, snf, Snf};

pub type Elem = Vec<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbError {
    #[error("invalid invariant factors {0:?}")]
    InvalidFactors(Vec<BigInt>),
    #[error("homomorphism is not well defined on generator {0}")]
    IllDefined(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("localization at m = 0")]
    ZeroLocalization,
    #[error("subgroups live in different ambient groups")]
    AmbientMismatch,
}

pub fn ints(xs: &[i64]) -> Elem {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    factors: Vec<BigInt>,
}

impl FgAbGroup {
    /// Validates invariant-factor form.
    pub fn new(factors: Vec<BigInt>) -> Result<Self, AbError> {
        let ok_each = factors.iter().all(|d| d.is_zero() || *d >= BigInt::from(2));
        let ok_chain = factors.windows(2).all(|w| {
            if w[1].is_zero() {
                true
            } else {
                !w[0].is_zero() && w[1].is_multiple_of(&w[0])
            }
        });
        if ok_each && ok_chain {
            Ok(FgAbGroup { factors })
        } else {
            Err(AbError::InvalidFactors(factors))
        }
    }

    /// Canonical form of an arbitrary direct sum of cyclic groups.
    pub fn from_cyclic(moduli: &[BigInt]) -> Self {
        Presentation::cyclic(moduli).group
    }

    pub fn from_i64(factors: &[i64]) -> Self {
        FgAbGroup::from_cyclic(&ints(factors))
    }

    pub fn trivial() -> Self {
        FgAbGroup { factors: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            factors: vec![BigInt::zero(); rank],
        }
    }

    pub fn cyclic(n: u64) -> Self {
        FgAbGroup::from_cyclic(&[BigInt::from(n)])
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn ngens(&self) -> usize {
        self.factors.len()
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_finite(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.factors.iter().product())
    }

    pub fn exponent(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.factors.iter().fold(BigInt::one(), |a, d| a.lcm(d)))
    }

    pub fn zero(&self) -> Elem {
        vec![BigInt::zero(); self.ngens()]
    }

    pub fn basis(&self, i: usize) -> Elem {
        let mut e = self.zero();
        e[i] = BigInt::one();
        self.reduce(&mut e);
        e
    }

    pub fn reduce(&self, x: &mut [BigInt]) {
        assert_eq!(x.len(), self.ngens(), "element has wrong length");
        for (c, d) in x.iter_mut().zip(&self.factors) {
            if !d.is_zero() {
                *c = c.mod_floor(d);
            }
        }
    }

    pub fn reduced(&self, mut x: Elem) -> Elem {
        self.reduce(&mut x);
        x
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        x.iter().zip(&self.factors).all(|(c, d)| {
            if d.is_zero() {
                c.is_zero()
            } else {
                c.is_multiple_of(d)
            }
        })
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> Elem {
        self.reduced(x.iter().zip(y).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &BigInt, x: &[BigInt]) -> Elem {
        self.reduced(x.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self, x: &[BigInt]) -> Elem {
        self.reduced(x.iter().map(|a| -a).collect())
    }

    /// Order of an element; `None` for elements of infinite order.
    pub fn element_order(&self, x: &[BigInt]) -> Option<BigInt> {
        let mut acc = BigInt::one();
        for (c, d) in x.iter().zip(&self.factors) {
            if d.is_zero() {
                if !c.is_zero() {
                    return None;
                }
            } else {
                acc = acc.lcm(&(d / c.gcd(d)));
            }
        }
        Some(acc)
    }

    /// All elements, in lexicographic coordinate order. Only for finite groups.
    pub fn elements(&self) -> Vec<Elem> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let mut out = vec![self.zero()];
        for (i, d) in self.factors.iter().enumerate() {
            let mut next = Vec::new();
            for e in &out {
                let mut k = BigInt::zero();
                while &k < d {
                    let mut x = e.clone();
                    x[i] = k.clone();
                    next.push(x);
                    k += 1;
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|d| {
                if d.is_zero() {
                    "Z".into()
                } else {
                    format!("Z/{d}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A quotient `Z^n / relations` brought to invariant-factor form, with the
/// coordinate change in both directions.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub group: FgAbGroup,
    /// `group.ngens() x n`
    to_group: Matrix,
    /// `n x group.ngens()`
    from_group: Matrix,
}

impl Presentation {
    /// Relations are given as rows of length `n`.
    pub fn of_relations(n: usize, relations: &[Elem]) -> Self {
        let rel_t = Matrix::from_cols(relations, n);
        let s = snf(&rel_t);
        let mut keep = Vec::new();
        let mut factors = Vec::new();
        for i in 0..n {
            let d = s.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if !d.is_one() {
                keep.push(i);
                factors.push(d);
            }
        }
        let mut to_group = Matrix::zeros(keep.len(), n);
        let mut from_group = Matrix::zeros(n, keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for j in 0..n {
                to_group[(a, j)] = s.left[(i, j)].clone();
                from_group[(j, a)] = s.left_inv[(j, i)].clone();
            }
        }
        let group = FgAbGroup::new(factors).expect("SNF yields invariant factors");
        Presentation {
            group,
            to_group,
            from_group,
        }
    }

    /// Canonical form of `Z/m_1 + ... + Z/m_n` (entries `0` free, `1` trivial).
    pub fn cyclic(moduli: &[BigInt]) -> Self {
        let n = moduli.len();
        let rels: Vec<Elem> = moduli
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, m)| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = m.clone();
                r
            })
            .collect();
        Presentation::of_relations(n, &rels)
    }

    pub fn raw_dim(&self) -> usize {
        self.to_group.cols()
    }

    /// Image of a raw vector in the group.
    pub fn project(&self, v: &[BigInt]) -> Elem {
        self.group.reduced(self.to_group.mul_vec(v))
    }

    /// A raw vector projecting to `x`.
    pub fn lift(&self, x: &[BigInt]) -> Elem {
        self.from_group.mul_vec(x)
    }

    pub fn to_group_matrix(&self) -> &Matrix {
        &self.to_group
    }
}

/// Homomorphism given by an integer matrix (`target.ngens() x source.ngens()`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: Matrix,
}

impl AbHom {
    /// Checks congruence compatibility on every torsion generator.
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: Matrix) -> Result<Self, AbError> {
        if matrix.cols() != source.ngens() {
            return Err(AbError::Dimension {
                expected: source.ngens(),
                got: matrix.cols(),
            });
        }
        if matrix.rows() != target.ngens() {
            return Err(AbError::Dimension {
                expected: target.ngens(),
                got: matrix.rows(),
            });
        }
        for (i, d) in source.factors.iter().enumerate() {
            let col: Elem = matrix.col(i).iter().map(|c| c * d).collect();
            if !target.is_zero(&col) {
                return Err(AbError::IllDefined(i));
            }
        }
        let mut matrix = matrix;
        for i in 0..matrix.rows() {
            let d = &target.factors[i];
            if !d.is_zero() {
                for j in 0..matrix.cols() {
                    matrix[(i, j)] = matrix[(i, j)].mod_floor(d);
                }
            }
        }
        Ok(AbHom {
            source,
            target,
            matrix,
        })
    }

    /// Builds the homomorphism from the images of the source generators.
    pub fn from_images(
        source: FgAbGroup,
        target: FgAbGroup,
        images: &[Elem],
    ) -> Result<Self, AbError> {
        let n = target.ngens();
        AbHom::new(source, target, Matrix::from_cols(images, n))
    }

    pub fn zero(source: FgAbGroup, target: FgAbGroup) -> Self {
        let m = Matrix::zeros(target.ngens(), source.ngens());
        AbHom {
            source,
            target,
            matrix: m,
        }
    }

    pub fn identity(g: FgAbGroup) -> Self {
        let m = Matrix::identity(g.ngens());
        AbHom {
            source: g.clone(),
            target: g,
            matrix: m,
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Elem {
        self.target.reduced(self.matrix.mul_vec(x))
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &AbHom) -> AbHom {
        assert_eq!(
            first.target, self.source,
            "composition of incompatible maps"
        );
        AbHom::new(
            first.source.clone(),
            self.target.clone(),
            self.matrix.mul(&first.matrix),
        )
        .expect("composite of well-defined maps is well defined")
    }

    pub fn kernel(&self) -> Subgroup {
        let (s, t) = (self.source.ngens(), self.target.ngens());
        let mut moduli = self.target.factors.clone();
        moduli.extend(self.source.factors.iter().cloned());
        let mut big = Lattice::new(moduli);
        for i in 0..s {
            let mut v = self.matrix.col(i);
            v.extend(std::iter::repeat_n(BigInt::zero(), s));
            v[t + i] = BigInt::one();
            big.insert(&v);
        }
        let gens: Vec<Elem> = (t..t + s)
            .filter_map(|j| big.row(j).map(|r| r[t..].to_vec()))
            .collect();
        Subgroup::new(self.source.clone(), &gens)
    }

    pub fn image(&self) -> Subgroup {
        let gens: Vec<Elem> = (0..self.source.ngens())
            .map(|i| self.matrix.col(i))
            .collect();
        Subgroup::new(self.target.clone(), &gens)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }
}

/// Subgroup of a fixed ambient, stored in reduced Hermite form so that equal
/// subgroups compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    ambient: FgAbGroup,
    lattice: Lattice,
}

impl Subgroup {
    pub fn new(ambient: FgAbGroup, gens: &[Elem]) -> Self {
        let mut lattice = Lattice::new(ambient.factors.clone());
        for g in gens {
            lattice.insert(g);
        }
        lattice.canonicalize();
        Subgroup { ambient, lattice }
    }

    pub fn trivial(ambient: FgAbGroup) -> Self {
        Subgroup::new(ambient, &[])
    }

    pub fn whole(ambient: FgAbGroup) -> Self {
        let gens: Vec<Elem> = (0..ambient.ngens()).map(|i| ambient.basis(i)).collect();
        Subgroup::new(ambient, &gens)
    }

    pub fn ambient(&self) -> &FgAbGroup {
        &self.ambient
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn generators(&self) -> Vec<Elem> {
        self.lattice.generators()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.lattice.contains(x)
    }

    /// Canonical coset representative.
    pub fn reduce(&self, x: &[BigInt]) -> Elem {
        let mut v = x.to_vec();
        self.lattice.reduce(&mut v);
        v
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        assert_eq!(
            self.ambient, other.ambient,
            "subgroups of different ambients"
        );
        self.lattice.is_subset_of(&other.lattice)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators().is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.lattice.index().is_some_and(|i| i.is_one())
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        assert_eq!(
            self.ambient, other.ambient,
            "subgroups of different ambients"
        );
        let mut lattice = self.lattice.clone();
        for g in other.generators() {
            lattice.insert(&g);
        }
        lattice.canonicalize();
        Subgroup {
            ambient: self.ambient.clone(),
            lattice,
        }
    }

    pub fn with(&self, extra: &[Elem]) -> Subgroup {
        let mut lattice = self.lattice.clone();
        for g in extra {
            lattice.insert(g);
        }
        lattice.canonicalize();
        Subgroup {
            ambient: self.ambient.clone(),
            lattice,
        }
    }

    pub fn order(&self) -> Option<BigInt> {
        self.lattice.order()
    }

    pub fn index(&self) -> Option<BigInt> {
        self.lattice.index()
    }

    /// The subgroup as an abstract group.
    pub fn as_group(&self) -> FgAbGroup {
        let gens = self.generators();
        let inclusion = Matrix::from_cols(&gens, self.ambient.ngens());
        let free_src = FgAbGroup::free(gens.len());
        let h = AbHom::new(free_src, self.ambient.clone(), inclusion).expect("free source");
        let k = h.kernel();
        quotient(&h.source, &k).0
    }

    /// Invariant-factor form of the subgroup together with ambient elements
    /// realizing its basis.
    pub fn basis(&self) -> (FgAbGroup, Vec<Elem>) {
        let gens = self.generators();
        let n = self.ambient.ngens();
        let inclusion = Matrix::from_cols(&gens, n);
        let h = AbHom::new(FgAbGroup::free(gens.len()), self.ambient.clone(), inclusion)
            .expect("free source");
        let (q, proj) = quotient(h.source(), &h.kernel());
        let images = (0..q.ngens())
            .map(|i| h.apply(&proj.lift(&q.basis(i))))
            .collect();
        (q, images)
    }

    /// Intersection, via the kernel of `A + A -> A`, `(x, y) -> x - y`.
    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        assert_eq!(
            self.ambient, other.ambient,
            "subgroups of different ambients"
        );
        let a = self.generators();
        let b = other.generators();
        let n = self.ambient.ngens();
        let mut cols = a.clone();
        cols.extend(b.iter().map(|v| v.iter().map(|x| -x).collect::<Elem>()));
        let src = FgAbGroup::free(cols.len());
        let h = AbHom::new(src, self.ambient.clone(), Matrix::from_cols(&cols, n))
            .expect("free source");
        let k = h.kernel();
        let gens: Vec<Elem> = k
            .generators()
            .iter()
            .map(|c| {
                let mut v = vec![BigInt::zero(); n];
                for (coef, g) in c.iter().zip(&a) {
                    for (t, x) in v.iter_mut().zip(g) {
                        *t += coef * x;
                    }
                }
                v
            })
            .collect();
        Subgroup::new(self.ambient.clone(), &gens)
    }

    /// All `x` with `m^k x` in the subgroup for some `k`.
    pub fn saturate(&self, m: &BigInt) -> Result<Subgroup, AbError> {
        if m.is_zero() {
            return Err(AbError::ZeroLocalization);
        }
        let (q, proj) = quotient(&self.ambient, self);
        let mut extra = Vec::new();
        for (i, d) in q.factors.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let mut coprime = d.clone();
            loop {
                let g = coprime.gcd(m);
                if g.is_one() {
                    break;
                }
                coprime /= g;
            }
            let mut y = q.zero();
            y[i] = coprime;
            extra.push(proj.lift(&y));
        }
        Ok(self.with(&extra))
    }
}

/// Projection `G -> G/S` together with a section on coordinates.
#[derive(Clone, Debug)]
pub struct Projection {
    pub hom: AbHom,
    lift: Matrix,
}

impl Projection {
    pub fn apply(&self, x: &[BigInt]) -> Elem {
        self.hom.apply(x)
    }

    pub fn lift(&self, y: &[BigInt]) -> Elem {
        self.hom.source().reduced(self.lift.mul_vec(y))
    }
}

/// `G/S` in invariant-factor form, with the projection.
pub fn quotient(g: &FgAbGroup, s: &Subgroup) -> (FgAbGroup, Projection) {
    assert_eq!(g, s.ambient(), "subgroup of a different group");
    let n = g.ngens();
    let mut rels: Vec<Elem> = g
        .factors
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(i, d)| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = d.clone();
            r
        })
        .collect();
    rels.extend(s.generators());
    let p = Presentation::of_relations(n, &rels);
    let hom = AbHom::new(g.clone(), p.group.clone(), p.to_group.clone())
        .expect("projection is well defined");
    (
        p.group.clone(),
        Projection {
            hom,
            lift: p.from_group,
        },
    )
}

/// Whether two subgroups agree after tensoring with `Z[1/m]`.
pub fn localize_compare(a: &Subgroup, b: &Subgroup, m: u64) -> Result<bool, AbError> {
    if a.ambient != b.ambient {
        return Err(AbError::AmbientMismatch);
    }
    let m = BigInt::from(m);
    Ok(a.saturate(&m)? == b.saturate(&m)?)
}

/// `M^{⊗r}` with its raw coordinates indexed by `r`-tuples of generator
/// indices of `M` (lexicographic, first slot most significant).
#[derive(Clone, Debug)]
pub struct TensorPower {
    pub base: FgAbGroup,
    pub r: usize,
    raw_moduli: Vec<BigInt>,
    pub presentation: Presentation,
}

impl TensorPower {
    pub fn new(base: &FgAbGroup, r: usize) -> Self {
        assert!(r >= 1, "tensor power needs r >= 1");
        let k = base.ngens();
        let count = k.pow(r as u32);
        let raw_moduli: Vec<BigInt> = (0..count)
            .map(|t| {
                let idx = Self::decode(k, r, t);
                idx.iter()
                    .fold(BigInt::zero(), |acc, &i| acc.gcd(&base.factors[i]))
            })
            .collect();
        let presentation = Presentation::cyclic(&raw_moduli);
        TensorPower {
            base: base.clone(),
            r,
            raw_moduli,
            presentation,
        }
    }

    fn decode(k: usize, r: usize, mut t: usize) -> Vec<usize> {
        let mut idx = vec![0; r];
        for s in (0..r).rev() {
            idx[s] = t % k;
            t /= k;
        }
        idx
    }

    fn encode(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.base.ngens() + i)
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.presentation.group
    }

    pub fn raw_moduli(&self) -> &[BigInt] {
        &self.raw_moduli
    }

    pub fn raw_dim(&self) -> usize {
        self.raw_moduli.len()
    }

    /// Raw coordinates of `x_1 ⊗ ... ⊗ x_r`.
    pub fn pure_raw(&self, xs: &[&[BigInt]]) -> Elem {
        assert_eq!(xs.len(), self.r);
        let k = self.base.ngens();
        (0..self.raw_dim())
            .map(|t| {
                let idx = Self::decode(k, self.r, t);
                let mut c = BigInt::one();
                for (s, &i) in idx.iter().enumerate() {
                    c *= &xs[s][i];
                }
                let d = &self.raw_moduli[t];
                if d.is_zero() {
                    c
                } else {
                    c.mod_floor(d)
                }
            })
            .collect()
    }

    pub fn pure(&self, xs: &[&[BigInt]]) -> Elem {
        self.presentation.project(&self.pure_raw(xs))
    }

    /// Raw index permutation induced by moving slot `s` to slot `perm[s]`.
    pub fn permute_raw(&self, v: &[BigInt], perm: &[usize]) -> Elem {
        let k = self.base.ngens();
        let mut out = vec![BigInt::zero(); self.raw_dim()];
        for (t, c) in v.iter().enumerate() {
            let idx = Self::decode(k, self.r, t);
            let mut to = vec![0; self.r];
            for s in 0..self.r {
                to[perm[s]] = idx[s];
            }
            out[self.encode(&to)] = c.clone();
        }
        out
    }

    /// Action of `σ` on the canonical group coordinates, as a homomorphism.
    pub fn permutation_hom(&self, perm: &[usize]) -> AbHom {
        let g = self.group().clone();
        let images: Vec<Elem> = (0..g.ngens())
            .map(|i| {
                let raw = self.presentation.lift(&g.basis(i));
                self.presentation.project(&self.permute_raw(&raw, perm))
            })
            .collect();
        AbHom::from_images(g.clone(), g, &images).expect("slot permutation is well defined")
    }

    /// The diagonal action of an endomorphism of `M` on `M^{⊗r}`.
    pub fn diagonal_hom(&self, f: &AbHom) -> AbHom {
        assert_eq!(f.source(), &self.base);
        let g = self.group().clone();
        let k = self.base.ngens();
        let fcols: Vec<Elem> = (0..k).map(|i| f.matrix().col(i)).collect();
        let images: Vec<Elem> = (0..g.ngens())
            .map(|i| {
                let raw = self.presentation.lift(&g.basis(i));
                let mut acc = vec![BigInt::zero(); self.raw_dim()];
                for (t, c) in raw.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let idx = Self::decode(k, self.r, t);
                    let slots: Vec<&[BigInt]> = idx.iter().map(|&j| &fcols[j][..]).collect();
                    for (a, b) in acc.iter_mut().zip(self.pure_raw(&slots)) {
                        *a += c * b;
                    }
                }
                self.presentation.project(&acc)
            })
            .collect();
        AbHom::from_images(g.clone(), g, &images).expect("diagonal action is well defined")
    }

    fn adjacent_transpositions(&self) -> Vec<Vec<usize>> {
        (0..self.r.saturating_sub(1))
            .map(|s| {
                let mut p: Vec<usize> = (0..self.r).collect();
                p.swap(s, s + 1);
                p
            })
            .collect()
    }
}

/// `M^{⊗r}` with the pure-tensor embedding.
pub fn tensor_power(m: &FgAbGroup, r: usize) -> TensorPower {
    TensorPower::new(m, r)
}

/// `A ⊗ B` from the cyclic decompositions.
pub fn tensor_product(a: &FgAbGroup, b: &FgAbGroup) -> FgAbGroup {
    let moduli: Vec<BigInt> = a
        .factors
        .iter()
        .flat_map(|x| b.factors.iter().map(move |y| x.gcd(y)))
        .collect();
    FgAbGroup::from_cyclic(&moduli)
}

/// `Σ_r`-invariants of `M^{⊗r}`.
pub fn sym_invariants(tp: &TensorPower) -> Subgroup {
    let g = tp.group().clone();
    let perms = tp.adjacent_transpositions();
    if perms.is_empty() {
        return Subgroup::whole(g);
    }
    let n = g.ngens();
    let target_factors: Vec<BigInt> = perms
        .iter()
        .flat_map(|_| g.factors.iter().cloned())
        .collect();
    let target = FgAbGroup::from_cyclic(&target_factors);
    let pres = Presentation::cyclic(&target_factors);
    debug_assert_eq!(pres.group, target);
    let images: Vec<Elem> = (0..n)
        .map(|i| {
            let e = g.basis(i);
            let mut raw = Vec::new();
            for p in &perms {
                let moved = tp.permutation_hom(p).apply(&e);
                raw.extend(moved.iter().zip(&e).map(|(a, b)| a - b));
            }
            pres.project(&raw)
        })
        .collect();
    AbHom::from_images(g, target, &images)
        .expect("sigma - 1 is well defined")
        .kernel()
}

/// Quotient of `M^{⊗r}` by its `Σ_r`-invariants.
#[derive(Clone, Debug)]
pub struct WedgePower {
    pub tensor: TensorPower,
    pub group: FgAbGroup,
    pub projection: Projection,
}

/// `∧^r M` as the cokernel of the invariants. With `wedge1_is_m` set, `r = 1`
/// returns `M` itself instead of the literal (trivial) quotient.
pub fn wedge_power(m: &FgAbGroup, r: usize, wedge1_is_m: bool) -> WedgePower {
    let tensor = tensor_power(m, r);
    let sub = if r == 1 && wedge1_is_m {
        Subgroup::trivial(tensor.group().clone())
    } else {
        sym_invariants(&tensor)
    };
    let (group, projection) = quotient(tensor.group(), &sub);
    WedgePower {
        tensor,
        group,
        projection,
    }
}

/// `Σ_r`-coinvariants `T_r` of `M^{⊗r}`.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    pub tensor: TensorPower,
    pub group: FgAbGroup,
    pub projection: Projection,
}

impl Coinvariants {
    /// Class of `x_1 ⊗ ... ⊗ x_r`.
    pub fn pure(&self, xs: &[&[BigInt]]) -> Elem {
        self.projection.apply(&self.tensor.pure(xs))
    }

    /// Induced action of the diagonal map `f^{⊗r}`.
    pub fn diagonal_hom(&self, f: &AbHom) -> AbHom {
        let d = self.tensor.diagonal_hom(f);
        let images: Vec<Elem> = (0..self.group.ngens())
            .map(|i| {
                self.projection
                    .apply(&d.apply(&self.projection.lift(&self.group.basis(i))))
            })
            .collect();
        AbHom::from_images(self.group.clone(), self.group.clone(), &images)
            .expect("diagonal action descends to coinvariants")
    }
}

pub fn coinvariants_sym(m: &FgAbGroup, r: usize) -> Coinvariants {
    let tensor = tensor_power(m, r);
    let g = tensor.group().clone();
    let mut gens = Vec::new();
    for p in tensor.adjacent_transpositions() {
        let h = tensor.permutation_hom(&p);
        for i in 0..g.ngens() {
            let e = g.basis(i);
            let moved = h.apply(&e);
            gens.push(g.reduced(e.iter().zip(&moved).map(|(a, b)| a - b).collect()));
        }
    }
    let sub = Subgroup::new(g.clone(), &gens);
    let (group, projection) = quotient(&g, &sub);
    Coinvariants {
        tensor,
        group,
        projection,
    }
}
