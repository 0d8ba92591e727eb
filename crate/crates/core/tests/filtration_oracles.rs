//! Filtrations from the truncated quotient against direct lattice
//! computations in the closed-point basis.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use zcycles::abgroup::{quotient, AbHom, Elem, FgAbGroup, Subgroup};
use zcycles::cycles::{enumerate_tuples, w_generator, Cycle, OrbitBasis};
use zcycles::points::PointModel;
use zcycles::symbols::{
    graded_pieces, phi, projection_relation, psi, resolve, ProxyTarget, SymbolLayer,
};

fn mocks() -> Vec<(&'static str, PointModel)> {
    vec![
        (
            "swap",
            PointModel::build_mock(&[3, 3], vec![vec![0, 1], vec![1, 0]], 2, 1 << 20).unwrap(),
        ),
        (
            "z4 negation",
            PointModel::build_mock(&[4], vec![vec![3]], 2, 1 << 20).unwrap(),
        ),
        (
            "z2 trivial",
            PointModel::build_mock(&[2], vec![vec![1]], 1, 1 << 20).unwrap(),
        ),
        (
            "z9 times 4",
            PointModel::build_mock(&[9], vec![vec![4]], 3, 1 << 20).unwrap(),
        ),
        (
            "z2^2 unipotent",
            PointModel::build_mock(&[2, 2], vec![vec![1, 0], vec![1, 1]], 2, 1 << 20).unwrap(),
        ),
    ]
}

fn coords(basis: &OrbitBasis, c: &Cycle) -> Elem {
    basis.coords(c).into_iter().map(BigInt::from).collect()
}

fn cycle_of(basis: &OrbitBasis, v: &[BigInt]) -> Cycle {
    let small: Vec<i64> = v.iter().map(|x| x.to_i64().unwrap()).collect();
    basis.cycle(&small)
}

fn direct_g(m: &PointModel, basis: &OrbitBasis, r: usize) -> Subgroup {
    let amb = FgAbGroup::free(basis.len());
    if r == 0 {
        return Subgroup::whole(amb);
    }
    let mut gens = Vec::new();
    for e in m.levels() {
        for t in enumerate_tuples(&m.level_points(e), r, u64::MAX, 0) {
            gens.push(coords(basis, &w_generator(m, e, &t).unwrap()));
        }
    }
    Subgroup::new(amb, &gens)
}

fn direct_f(m: &PointModel, basis: &OrbitBasis, r: usize) -> Subgroup {
    let amb = FgAbGroup::free(basis.len());
    let mut acc = Subgroup::whole(amb.clone());
    for j in 0..r {
        let t = ProxyTarget::new(m, j);
        let images: Vec<Elem> = (0..basis.len())
            .map(|i| {
                let mut v = vec![0; basis.len()];
                v[i] = 1;
                resolve(m, &t, &phi(m, &basis.cycle(&v), j))
            })
            .collect();
        let h = AbHom::from_images(amb.clone(), t.group().clone(), &images).unwrap();
        acc = acc.intersection(&h.kernel());
    }
    acc
}

fn direct_r(m: &PointModel, basis: &OrbitBasis, r: usize) -> Subgroup {
    let mut gens = Vec::new();
    for e in m.levels() {
        for l in m.levels().into_iter().filter(|&l| l % e == 0 && l != e) {
            for slot in 0..r {
                for rest in enumerate_tuples(&m.level_points(e), r - 1, u64::MAX, 0) {
                    for &a in &m.level_points(l) {
                        let mut pts = rest.clone();
                        pts.insert(slot, a);
                        let rel = projection_relation(m, e, l, slot, &pts).unwrap();
                        gens.push(coords(basis, &psi(m, &rel).unwrap()));
                    }
                }
            }
        }
    }
    direct_g(m, basis, r + 1).with(&gens)
}

fn direct_b(m: &PointModel, basis: &OrbitBasis, r: usize) -> Subgroup {
    let k: i64 = (1..r as i64).product();
    let f = direct_f(m, basis, r - 1);
    let gens: Vec<Elem> = f
        .generators()
        .iter()
        .map(|z| {
            let c = cycle_of(basis, z);
            let pp = psi(m, &phi(m, &c, r - 1)).unwrap();
            coords(basis, &c.scale(k).sub(&pp).unwrap())
        })
        .collect();
    direct_r(m, basis, r - 1).with(&gens)
}

/// `{x ∈ Z^n : q(x) ∈ image}`.
fn preimage(layer: &SymbolLayer, image: &Subgroup) -> Subgroup {
    let m = layer.model();
    let cq = layer.quotient();
    let n = cq.orbit_basis().len();
    let q = AbHom::from_images(FgAbGroup::free(n), cq.group().clone(), &cq.q_orbits(m)).unwrap();
    let (_, proj) = quotient(cq.group(), image);
    proj.hom.compose(&q).kernel()
}

#[test]
fn f_filtration_matches_direct_kernels() {
    for (name, m) in mocks() {
        let layer = SymbolLayer::new(&m, 3).unwrap();
        let basis = layer.orbit_basis();
        for r in 0..=4 {
            let direct = direct_f(&m, basis, r);
            assert_eq!(
                preimage(&layer, &layer.f(r).unwrap().image),
                direct,
                "{name}: F^{r}"
            );
        }
    }
}

#[test]
fn g_filtration_matches_direct_generators() {
    for (name, m) in mocks() {
        let layer = SymbolLayer::new(&m, 3).unwrap();
        let basis = layer.orbit_basis();
        for r in 0..=4 {
            assert_eq!(
                preimage(&layer, &layer.g(r).unwrap().image),
                direct_g(&m, basis, r),
                "{name}: G^{r}"
            );
        }
    }
}

#[test]
fn r_groups_match_all_slots_and_tuples() {
    for (name, m) in mocks() {
        let layer = SymbolLayer::new(&m, 3).unwrap();
        let basis = layer.orbit_basis();
        for r in 1..=2 {
            let got = preimage(&layer, &layer.r_group(r).unwrap().image);
            assert_eq!(got, direct_r(&m, basis, r), "{name}: R^{}", r + 1);
        }
    }
}

#[test]
fn b_groups_match_cycle_level_defect() {
    for (name, m) in mocks() {
        let layer = SymbolLayer::new(&m, 3).unwrap();
        let basis = layer.orbit_basis();
        for r in 2..=3 {
            let got = preimage(&layer, &layer.b_group(r).unwrap().image);
            assert_eq!(got, direct_b(&m, basis, r), "{name}: B^{r}");
        }
    }
}

#[test]
fn trivial_galois_graded_pieces() {
    let m = PointModel::build_mock(&[2], vec![vec![1]], 1, 1 << 20).unwrap();
    let layer = SymbolLayer::new(&m, 3).unwrap();
    let pieces: Vec<String> = graded_pieces(&layer)
        .iter()
        .map(|g| g.to_string())
        .collect();
    assert_eq!(pieces, vec!["Z", "Z/2", "0", "0"]);
}
