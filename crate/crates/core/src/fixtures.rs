//! Reference data for the orbit `[3,2]` in sl5: slice basis, the printed
//! argument-shift family, the `w` coordinates and their bracket table.

use std::sync::Arc;

use crate::error::Result;
use crate::exact::{int, rat, Mat, Rational};
use crate::liealg::{build_sl, Element, FormKind, LieAlgebra};
use crate::orbits::{sl2_from_partition, Partition, Sl2Data};
use crate::poly::{parse_poly, SparsePoly};
use crate::slice::{build_slice_with_basis, SlodowySlice};

const U: [&str; 8] = ["u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8"];
const W: [&str; 8] = ["w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8"];

pub fn u_vars() -> Vec<&'static str> {
    U.to_vec()
}

pub fn w_vars() -> Vec<&'static str> {
    W.to_vec()
}

/// `z_{i,j}` with 1-based indices.
fn z(i: usize, j: usize) -> Mat {
    Mat::unit(5, i - 1, j - 1)
}

pub fn sl5_orbit() -> Result<Arc<Sl2Data>> {
    sl5_orbit_with_form(FormKind::Killing)
}

pub fn sl5_orbit_with_form(form: FormKind) -> Result<Arc<Sl2Data>> {
    let alg = Arc::new(build_sl(5)?.with_form(form));
    Ok(Arc::new(sl2_from_partition(alg, &Partition::new(vec![3, 2])?)?))
}

/// `X_1 … X_8`, ordered and scaled to match the slice matrix below.
pub fn sl5_basis(alg: &LieAlgebra) -> Result<Vec<Element>> {
    let mats = [
        &(&z(2, 1).scale(&int(2)) + &z(3, 2).scale(&int(2))) + &z(5, 4),
        z(5, 1),
        &z(4, 1).scale(&int(2)) + &z(5, 2),
        z(3, 1),
        &(&z(2, 1) + &z(3, 2)).scale(&rat(-2, 5)) + &z(5, 4).scale(&rat(4, 5)),
        Mat::diag(&[int(2), int(2), int(2), int(-3), int(-3)]),
        z(3, 4),
        &z(2, 4) + &z(3, 5).scale(&int(2)),
    ];
    mats.iter().map(|m| alg.element(m)).collect()
}

pub fn sl5_slice() -> Result<SlodowySlice> {
    sl5_slice_with_form(FormKind::Killing)
}

pub fn sl5_slice_with_form(form: FormKind) -> Result<SlodowySlice> {
    let d = sl5_orbit_with_form(form)?;
    let xs = sl5_basis(&d.alg)?;
    build_slice_with_basis(d, xs)
}

/// The slice point written out entry by entry.
pub fn sl5_slice_matrix(u: &[Rational]) -> Mat {
    let u = |i: usize| u[i - 1].clone();
    let c = |n: i64, d: i64| rat(n, d);
    let zero = int(0);
    let one = int(1);
    let a = u(1) * int(2) - u(5) * c(2, 5);
    Mat::from_rows(vec![
        vec![u(6) * int(2), one.clone(), zero.clone(), zero.clone(), zero.clone()],
        vec![a.clone(), u(6) * int(2), one.clone(), u(8), zero.clone()],
        vec![u(4), a, u(6) * int(2), u(7), u(8) * int(2)],
        vec![u(3) * int(2), zero.clone(), zero.clone(), u(6) * int(-3), one],
        vec![u(2), u(3), zero, u(1) + u(5) * c(4, 5), u(6) * int(-3)],
    ])
}

/// Minimal-degree shift `K1 = z_{3,1}`.
pub fn sl5_k1(alg: &LieAlgebra) -> Result<Element> {
    alg.element(&z(3, 1))
}

/// The printed family as `(label, polynomial in u)`.
pub fn sl5_family() -> Vec<(&'static str, SparsePoly)> {
    let src = [
        ("P1^0", "u1 + 3 u6^2"),
        ("P3^1", "u6"),
        ("P4^1", "u5 - 45/4 u6^2 + 5/4 u1"),
        ("P2^0", "u4 - 10 u6^3 + 10 u1 u6 - 8 u5 u6 + 5 u3 u8"),
        (
            "P3^0",
            "u4 u6 - 10 u6^4 + 2 u5 u6^2 - 2/3 u1^2 + 8/75 u5^2 - 2/5 u1 u5 + 1/2 u3 u7 + 1/2 u2 u8",
        ),
        (
            "P4^0",
            "u4 u5 - 90 u6^5 + 100 u1 u6^3 - 10 u5 u6^3 - 45/4 u4 u6^2 + 25 u3 u8 u6^2 - 10 u1^2 u6 \
             + 8/5 u5^2 u6 - 6 u1 u5 u6 - 5 u3 u7 u6 - 5 u2 u8 u6 + 5/4 u1 u4 - 5/4 u2 u7 \
             - 5 u1 u3 u8 - 4 u3 u5 u8",
        ),
    ];
    src.iter().map(|(l, s)| (*l, parse_poly(s, &U).expect("fixture polynomial"))).collect()
}

fn family_member(label: &str) -> SparsePoly {
    sl5_family().into_iter().find(|(l, _)| *l == label).expect("family label").1
}

/// `w = (P1^0, P2^0, P3^1, P4^1, u2, u3, u7, u8)` as polynomials in u.
pub fn sl5_w_coords() -> Vec<SparsePoly> {
    let mut w = vec![family_member("P1^0"), family_member("P2^0"), family_member("P3^1"), family_member("P4^1")];
    for i in [1, 2, 6, 7] {
        w.push(SparsePoly::var(8, i));
    }
    w
}

/// Nonzero entries `{w_i, w_j}` (0-based, `i < j`) as polynomials in w.
pub fn sl5_w_bracket() -> Vec<((usize, usize), SparsePoly)> {
    let src = [
        ((3, 5), "5/6 w5"),
        ((3, 6), "5/6 w6"),
        ((3, 7), "-5/6 w7"),
        ((3, 8), "-5/6 w8"),
        ((4, 5), "-5/6 (140 w6 w3^2 + 35 w5 w3 + 18 w4 w6)"),
        ((4, 6), "-25/12 (w5 + 4 w3 w6)"),
        ((4, 7), "5/6 (140 w8 w3^2 + 35 w7 w3 + 18 w4 w8)"),
        ((4, 8), "25/12 (w7 + 4 w3 w8)"),
        ((7, 8), "10/3 w8^2"),
        ((5, 6), "-10/3 w6^2"),
        ((5, 8), "5/9 (1080 w3^3 - 110 w1 w3 + 64 w4 w3 + 3 w2 - 21 w6 w8)"),
        ((6, 7), "5/9 (1080 w3^3 - 110 w1 w3 + 64 w4 w3 + 3 w2 - 21 w6 w8)"),
        ((6, 8), "1/9 (-540 w3^2 + 25 w1 - 8 w4)"),
        (
            (5, 7),
            "2/45 (59400 w3^4 - 10250 w1 w3^2 - 2840 w4 w3^2 + 375 w2 w3 - 3375 w6 w8 w3 - 144 w4^2) \
             + 2/45 (450 w1 w4 + 75 w6 w7 + 75 w5 w8)",
        ),
    ];
    let mut out: Vec<_> = src
        .iter()
        .map(|((i, j), s)| ((i - 1, j - 1), parse_poly(s, &W).expect("fixture polynomial")))
        .collect();
    out.sort_by_key(|(k, _)| *k);
    out
}
