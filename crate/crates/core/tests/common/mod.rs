//! Independent oracles shared by the integration tests. None of these go
//! through the library's own computation paths.

#![allow(dead_code)]

use num_complex::Complex64;

type Spinor2 = [Complex64; 4];
type Op2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(|+-> - |-+>) / sqrt 2` in the basis |++>, |+->, |-+>, |-->.
fn singlet() -> Spinor2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]
}

/// `(I + s n.sigma) / 2` for a unit vector `n`.
fn projector(n: [f64; 3], sign: f64) -> Op2 {
    let [x, y, z] = n;
    [
        [c((1.0 + sign * z) / 2.0, 0.0), c(sign * x / 2.0, -sign * y / 2.0)],
        [c(sign * x / 2.0, sign * y / 2.0), c((1.0 - sign * z) / 2.0, 0.0)],
    ]
}

/// `<psi| P_a (x) P_b |psi>` by explicit Kronecker product.
pub fn state_vector_probability(alice: [f64; 3], alice_sign: f64, bob: [f64; 3], bob_sign: f64) -> f64 {
    let pa = projector(alice, alice_sign);
    let pb = projector(bob, bob_sign);
    let psi = singlet();
    let mut phi = [c(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    phi[2 * i + j] += pa[i][k] * pb[j][l] * psi[2 * k + l];
                }
            }
        }
    }
    psi.iter()
        .zip(phi.iter())
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .re
}

pub fn in_plane(deg: f64) -> [f64; 3] {
    let r = deg.to_radians();
    [r.cos(), r.sin(), 0.0]
}

/// Quantum P(+a;+b), P(+a;+c), P(+c;+b) for coplanar spacing `deg`, from
/// the state vector.
pub fn quantum_triple(deg: f64) -> (f64, f64, f64) {
    let (a, c, b) = (in_plane(0.0), in_plane(deg), in_plane(2.0 * deg));
    (
        state_vector_probability(a, 1.0, b, 1.0),
        state_vector_probability(a, 1.0, c, 1.0),
        state_vector_probability(c, 1.0, b, 1.0),
    )
}

/// Sign of particle 1 of population `i` (1-based) on axis `k` (0 = a),
/// from the binary layout of the table: a minus sign is a set bit of i - 1,
/// most significant bit for axis a.
pub fn particle1_sign(i: usize, k: usize) -> i8 {
    if (i - 1) >> (2 - k) & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Populations matching Alice (axis, sign) on particle 1 and Bob (axis,
/// sign) on particle 2, by brute force.
pub fn populations_for(alice_axis: usize, alice_sign: i8, bob_axis: usize, bob_sign: i8) -> Vec<usize> {
    (1..=8)
        .filter(|&i| particle1_sign(i, alice_axis) == alice_sign && -particle1_sign(i, bob_axis) == bob_sign)
        .collect()
}

/// Every distinct ordering of a multiset bag, by recursive enumeration.
pub fn orderings(bag: [u64; 8]) -> Vec<Vec<usize>> {
    fn rec(bag: &mut [u64; 8], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if bag.iter().all(|&c| c == 0) {
            out.push(prefix.clone());
            return;
        }
        for i in 0..8 {
            if bag[i] > 0 {
                bag[i] -= 1;
                prefix.push(i + 1);
                rec(bag, prefix, out);
                prefix.pop();
                bag[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut bag.clone(), &mut Vec::new(), &mut out);
    out
}

/// Probability of one particular ordering under uniform draws without
/// replacement.
pub fn ordering_probability(bag: [u64; 8], order: &[usize]) -> f64 {
    let mut counts = bag;
    let mut left: u64 = bag.iter().sum();
    let mut p = 1.0;
    for &i in order {
        p *= counts[i - 1] as f64 / left as f64;
        counts[i - 1] -= 1;
        left -= 1;
    }
    p
}
