//! Built-in maps: Plücker embeddings of Gr(2, n), the cusp-like toric map,
//! and the K3P model on the 4-leaf sunlet network.

use crate::polyring::{Monomial, PolyError, QPoly, Rational, RingMap};

/// Index pairs `(i, j)`, `i < j`, in the order `p12, p13, p23, p14, p24, p34, …`
/// (ordered by `j`, then `i`).
pub fn plucker_pairs(n: usize) -> Vec<(usize, usize)> {
    (2..=n).flat_map(|j| (1..j).map(move |i| (i, j))).collect()
}

fn pair_name(prefix: &str, i: usize, j: usize, wide: bool) -> String {
    if wide {
        format!("{prefix}{i}_{j}")
    } else {
        format!("{prefix}{i}{j}")
    }
}

/// The Plücker map `p_ij ↦ x_1i x_2j - x_1j x_2i` for `Gr(2, n)`, `n ≥ 3`.
///
/// Codomain variables are ordered `x11, …, x1n, x21, …, x2n`.
pub fn grassmannian(n: usize) -> Result<RingMap, PolyError> {
    if n < 3 {
        return Err(PolyError::InvalidMap(format!(
            "Gr(2, n) needs n >= 3, got {n}"
        )));
    }
    let wide = n >= 10;
    let pairs = plucker_pairs(n);
    let m = 2 * n;
    let x = |row: usize, col: usize| (row - 1) * n + (col - 1);
    let images = pairs
        .iter()
        .map(|&(i, j)| {
            let plus = Monomial::from_pairs([(x(1, i), 1), (x(2, j), 1)]);
            let minus = Monomial::from_pairs([(x(1, j), 1), (x(2, i), 1)]);
            QPoly::from_terms(
                m,
                [
                    (plus, Rational::from_integer(1.into())),
                    (minus, Rational::from_integer((-1).into())),
                ],
            )
        })
        .collect();
    let domain = pairs
        .iter()
        .map(|&(i, j)| pair_name("p", i, j, wide))
        .collect();
    let codomain = (1..=2)
        .flat_map(|r| (1..=n).map(move |c| (r, c)))
        .map(|(r, c)| pair_name("x", r, c, wide))
        .collect();
    RingMap::new(domain, codomain, images)
}

/// `x ↦ (a+b)^2, y ↦ a^2 - b^2, z ↦ (a-b)^2`; the kernel is `⟨xz - y^2⟩`.
pub fn cusp() -> RingMap {
    let images = vec![
        QPoly::from_int_terms(2, &[(1, &[2, 0]), (2, &[1, 1]), (1, &[0, 2])]),
        QPoly::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]),
        QPoly::from_int_terms(2, &[(1, &[2, 0]), (-2, &[1, 1]), (1, &[0, 2])]),
    ];
    let names = |list: &[&str]| list.iter().map(|s| s.to_string()).collect();
    RingMap::new(names(&["x", "y", "z"]), names(&["a", "b"]), images)
        .expect("cusp map is well formed")
}

/// Elements of `ℤ₂ × ℤ₂` are encoded as `0..4`; addition is bitwise xor.
pub fn klein_add(g: usize, h: usize) -> usize {
    g ^ h
}

/// Group labels of the 64 leaf tuples `(g1, g2, g3, g4)` with `g1+g2+g3+g4 = 0`,
/// in lexicographic order of `(g1, g2, g3)`.
pub fn sunlet_tuples() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(64);
    for g1 in 0..4 {
        for g2 in 0..4 {
            for g3 in 0..4 {
                let g4 = klein_add(klein_add(g1, g2), g3);
                out.push([g1, g2, g3, g4]);
            }
        }
    }
    out
}

/// The K3P model on the 4-leaf sunlet network in Fourier coordinates: 64
/// coordinates `q_{g1g2g3g4}` and 32 edge parameters `a{e}_{g}`, `e ∈ 1..=8`.
/// Each image is the sum of the two tree parameterizations obtained by
/// deleting one reticulation edge.
///
/// Leaf `k` hangs off cycle vertex `v_k` (edge `k`), `v1` is the reticulation
/// vertex, and the cycle edges 5..=8 are `v1v2, v2v3, v3v4, v4v1`.
pub fn sunlet_k3p() -> RingMap {
    let m = 32;
    let a = |edge: usize, g: usize| (edge - 1) * 4 + g;
    let tuples = sunlet_tuples();
    let images = tuples
        .iter()
        .map(|&[g1, g2, g3, g4]| {
            let shared = [a(1, g1), a(2, g2), a(3, g3), a(4, g4)];
            // deleting edge 8 leaves the path v1-v2-v3-v4
            let tree0 = [a(5, g1), a(6, klein_add(g1, g2)), a(7, g4)];
            // deleting edge 5 leaves the path v2-v3-v4-v1: edge 6 cuts off leaf 2,
            // edge 7 splits {2,3}|{1,4}, edge 8 cuts off leaf 1
            let tree1 = [a(6, g2), a(7, klein_add(g1, g4)), a(8, g1)];
            let term = |extra: [usize; 3]| {
                Monomial::from_pairs(shared.iter().chain(&extra).map(|&v| (v, 1)))
            };
            let one = Rational::from_integer(1.into());
            QPoly::from_terms(m, [(term(tree0), one.clone()), (term(tree1), one)])
        })
        .collect();
    let domain = tuples
        .iter()
        .map(|g| format!("q{}{}{}{}", g[0], g[1], g[2], g[3]))
        .collect();
    let codomain = (1..=8)
        .flat_map(|e| (0..4).map(move |g| format!("a{e}_{g}")))
        .collect();
    RingMap::new(domain, codomain, images).expect("sunlet map is well formed")
}
