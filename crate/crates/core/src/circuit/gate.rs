use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Gate kinds of the circuit IR. Angles are in radians.
///
/// Two-qubit matrices are written in the basis `|x_second x_first⟩`, i.e.
/// index `2·x_second + x_first`, where "first" is the first qubit listed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    X { q: usize },
    Rx { q: usize, theta: f64 },
    Ry { q: usize, theta: f64 },
    Rz { q: usize, theta: f64 },
    /// `exp(-i θ/2 Z⊗Z)`.
    Rzz { a: usize, b: usize, theta: f64 },
    /// `exp(-i θ (XX+YY)/2)`.
    Xy { a: usize, b: usize, theta: f64 },
    /// Weight-preserving rotation on `(a, b)`; see [`a_gate_matrix`].
    A { a: usize, b: usize, theta: f64, phi: f64 },
    Cx { control: usize, target: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    X,
    Rx,
    Ry,
    Rz,
    Rzz,
    Xy,
    A,
    Cx,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Rzz => "RZZ",
            GateKind::Xy => "XY",
            GateKind::A => "A",
            GateKind::Cx => "CX",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "X" => GateKind::X,
            "RX" => GateKind::Rx,
            "RY" => GateKind::Ry,
            "RZ" => GateKind::Rz,
            "RZZ" => GateKind::Rzz,
            "XY" => GateKind::Xy,
            "A" => GateKind::A,
            "CX" | "CNOT" => GateKind::Cx,
            _ => return None,
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unitary of a gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    One([[C; 2]; 2]),
    Two([[C; 4]; 4]),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X { .. } => GateKind::X,
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::Rzz { .. } => GateKind::Rzz,
            Gate::Xy { .. } => GateKind::Xy,
            Gate::A { .. } => GateKind::A,
            Gate::Cx { .. } => GateKind::Cx,
        }
    }

    /// First qubit and, for two-qubit gates, the second.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::X { q } | Gate::Rx { q, .. } | Gate::Ry { q, .. } | Gate::Rz { q, .. } => {
                (q, None)
            }
            Gate::Rzz { a, b, .. } | Gate::Xy { a, b, .. } | Gate::A { a, b, .. } => (a, Some(b)),
            Gate::Cx { control, target } => (control, Some(target)),
        }
    }

    pub fn pair(&self) -> Option<(usize, usize)> {
        match self.qubits() {
            (a, Some(b)) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    pub fn acts_on(&self, q: usize) -> bool {
        let (a, b) = self.qubits();
        a == q || b == Some(q)
    }

    pub fn max_qubit(&self) -> usize {
        let (a, b) = self.qubits();
        b.map_or(a, |b| a.max(b))
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(self, Gate::Rz { .. } | Gate::Rzz { .. })
    }

    /// Sufficient commutation test: disjoint supports, or both diagonal.
    pub fn commutes_with(&self, other: &Gate) -> bool {
        let (a, b) = self.qubits();
        let disjoint = !other.acts_on(a) && b.is_none_or(|b| !other.acts_on(b));
        disjoint || (self.is_diagonal() && other.is_diagonal())
    }

    /// Number of CNOTs in the standard decomposition.
    pub fn cx_cost(&self) -> usize {
        match self {
            Gate::Rzz { .. } | Gate::Xy { .. } => 2,
            Gate::A { .. } => 3,
            Gate::Cx { .. } => 1,
            _ => 0,
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        match *self {
            Gate::X { .. } | Gate::Cx { .. } => vec![],
            Gate::Rx { theta, .. }
            | Gate::Ry { theta, .. }
            | Gate::Rz { theta, .. }
            | Gate::Rzz { theta, .. }
            | Gate::Xy { theta, .. } => vec![theta],
            Gate::A { theta, phi, .. } => vec![theta, phi],
        }
    }

    pub fn matrix(&self) -> GateMatrix {
        let z = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        match *self {
            Gate::X { .. } => GateMatrix::One([[z, one], [one, z]]),
            Gate::Rx { theta, .. } => {
                let (s, c) = (theta / 2.0).sin_cos();
                GateMatrix::One([[C::new(c, 0.0), C::new(0.0, -s)], [C::new(0.0, -s), C::new(c, 0.0)]])
            }
            Gate::Ry { theta, .. } => {
                let (s, c) = (theta / 2.0).sin_cos();
                GateMatrix::One([[C::new(c, 0.0), C::new(-s, 0.0)], [C::new(s, 0.0), C::new(c, 0.0)]])
            }
            Gate::Rz { theta, .. } => {
                GateMatrix::One([[C::from_polar(1.0, -theta / 2.0), z], [z, C::from_polar(1.0, theta / 2.0)]])
            }
            Gate::Rzz { theta, .. } => {
                let m = C::from_polar(1.0, -theta / 2.0);
                let p = C::from_polar(1.0, theta / 2.0);
                GateMatrix::Two(diag4([m, p, p, m]))
            }
            Gate::Xy { theta, .. } => {
                let (s, c) = theta.sin_cos();
                let mut u = diag4([one, C::new(c, 0.0), C::new(c, 0.0), one]);
                u[1][2] = C::new(0.0, -s);
                u[2][1] = C::new(0.0, -s);
                GateMatrix::Two(u)
            }
            Gate::A { theta, phi, .. } => GateMatrix::Two(a_gate_matrix(theta, phi)),
            Gate::Cx { .. } => {
                // First qubit is the control: index 2·x_t + x_c.
                let mut u = [[z; 4]; 4];
                u[0][0] = one;
                u[2][2] = one;
                u[1][3] = one;
                u[3][1] = one;
                GateMatrix::Two(u)
            }
        }
    }

    /// Rewrite in terms of `CX`, `RX`, `RY`, `RZ` and `X`. Exact, including
    /// global phase.
    pub fn decompose(&self) -> Vec<Gate> {
        match *self {
            Gate::Rzz { a, b, theta } => vec![
                Gate::Cx { control: a, target: b },
                Gate::Rz { q: b, theta },
                Gate::Cx { control: a, target: b },
            ],
            Gate::Xy { a, b, theta } => vec![
                Gate::Rz { q: b, theta: -FRAC_PI_2 },
                Gate::Rx { q: b, theta: FRAC_PI_2 },
                Gate::Rz { q: b, theta: FRAC_PI_2 },
                Gate::Rz { q: a, theta: FRAC_PI_2 },
                Gate::Cx { control: b, target: a },
                Gate::Ry { q: b, theta: -theta },
                Gate::Ry { q: a, theta: -theta },
                Gate::Cx { control: b, target: a },
                Gate::Rz { q: a, theta: -FRAC_PI_2 },
                Gate::Rz { q: b, theta: -FRAC_PI_2 },
                Gate::Rx { q: b, theta: -FRAC_PI_2 },
                Gate::Rz { q: b, theta: FRAC_PI_2 },
            ],
            Gate::A { a, b, theta, phi } => vec![
                Gate::Cx { control: a, target: b },
                // R(θ,φ)† = (Rz(φ+π) Ry(θ+π/2))†
                Gate::Rz { q: a, theta: -(phi + PI) },
                Gate::Ry { q: a, theta: -(theta + FRAC_PI_2) },
                Gate::Cx { control: b, target: a },
                Gate::Ry { q: a, theta: theta + FRAC_PI_2 },
                Gate::Rz { q: a, theta: phi + PI },
                Gate::Cx { control: a, target: b },
            ],
            other => vec![other],
        }
    }

    /// The same gate with qubit indices mapped through `f`.
    pub fn remapped(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::X { q } => Gate::X { q: f(q) },
            Gate::Rx { q, theta } => Gate::Rx { q: f(q), theta },
            Gate::Ry { q, theta } => Gate::Ry { q: f(q), theta },
            Gate::Rz { q, theta } => Gate::Rz { q: f(q), theta },
            Gate::Rzz { a, b, theta } => Gate::Rzz { a: f(a), b: f(b), theta },
            Gate::Xy { a, b, theta } => Gate::Xy { a: f(a), b: f(b), theta },
            Gate::A { a, b, theta, phi } => Gate::A { a: f(a), b: f(b), theta, phi },
            Gate::Cx { control, target } => Gate::Cx {
                control: f(control),
                target: f(target),
            },
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        let (a, b) = self.qubits();
        write!(f, " {a}")?;
        if let Some(b) = b {
            write!(f, " {b}")?;
        }
        for x in self.angles() {
            write!(f, " {x:?}")?;
        }
        Ok(())
    }
}

fn diag4(d: [C; 4]) -> [[C; 4]; 4] {
    let z = C::new(0.0, 0.0);
    let mut u = [[z; 4]; 4];
    for k in 0..4 {
        u[k][k] = d[k];
    }
    u
}

/// `A(θ, φ)` in the basis index `2·x_b + x_a`:
///
/// ```text
/// [1 0           0            0]
/// [0 cos θ       e^{iφ} sin θ 0]
/// [0 e^{-iφ}sinθ -cos θ       0]
/// [0 0           0            1]
/// ```
///
/// With `θ = π/4, φ = 0` it splits a single excitation on `a` evenly over `a`
/// and `b`.
pub fn a_gate_matrix(theta: f64, phi: f64) -> [[C; 4]; 4] {
    let (s, c) = theta.sin_cos();
    let one = C::new(1.0, 0.0);
    let mut u = diag4([one, C::new(c, 0.0), C::new(-c, 0.0), one]);
    u[1][2] = C::from_polar(s, phi);
    u[2][1] = C::from_polar(s, -phi);
    u
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Dense unitary of a gate list on `n` qubits (column `k` is the image of
    /// basis state `k`).
    pub(crate) fn dense_unitary(gates: &[Gate], n: usize) -> Vec<Vec<C>> {
        let dim = 1 << n;
        let mut cols: Vec<Vec<C>> = (0..dim)
            .map(|k| {
                let mut v = vec![C::new(0.0, 0.0); dim];
                v[k] = C::new(1.0, 0.0);
                v
            })
            .collect();
        for g in gates {
            for col in cols.iter_mut() {
                apply_dense(col, g);
            }
        }
        // transpose to row-major
        (0..dim).map(|r| (0..dim).map(|c| cols[c][r]).collect()).collect()
    }

    fn apply_dense(v: &mut [C], g: &Gate) {
        let old = v.to_vec();
        let z = C::new(0.0, 0.0);
        match (g.matrix(), g.qubits()) {
            (GateMatrix::One(m), (q, None)) => {
                for (k, out) in v.iter_mut().enumerate() {
                    let bit = (k >> q) & 1;
                    let k0 = k & !(1 << q);
                    *out = m[bit][0] * old[k0] + m[bit][1] * old[k0 | (1 << q)];
                }
            }
            (GateMatrix::Two(m), (a, Some(b))) => {
                for (k, out) in v.iter_mut().enumerate() {
                    let row = 2 * ((k >> b) & 1) + ((k >> a) & 1);
                    let base = k & !(1 << a) & !(1 << b);
                    let mut acc = z;
                    for col in 0..4 {
                        let src = base | ((col & 1) << a) | ((col >> 1) << b);
                        acc += m[row][col] * old[src];
                    }
                    *out = acc;
                }
            }
            _ => unreachable!(),
        }
    }

    fn assert_close(u: &[Vec<C>], w: &[Vec<C>]) {
        for (ru, rw) in u.iter().zip(w) {
            for (x, y) in ru.iter().zip(rw) {
                assert!((x - y).norm() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn xy_rotates_single_excitation() {
        let beta: f64 = 0.37;
        let u = dense_unitary(&[Gate::Xy { a: 0, b: 1, theta: beta }], 2);
        // index 1: excitation on qubit 0; index 2: on qubit 1
        assert!((u[1][1] - C::new(beta.cos(), 0.0)).norm() < 1e-15);
        assert!((u[2][1] - C::new(0.0, -beta.sin())).norm() < 1e-15);
        assert!((u[0][0] - 1.0).norm() < 1e-15);
        assert!((u[3][3] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn xy_equals_exponential_of_generator() {
        // (XX+YY)/2 swaps |01⟩ and |10⟩ and kills |00⟩, |11⟩, so
        // exp(-iβ G) acts as a rotation on that subspace.
        let beta: f64 = 1.1;
        let u = dense_unitary(&[Gate::Xy { a: 0, b: 1, theta: beta }], 2);
        let mut series = vec![vec![C::new(0.0, 0.0); 4]; 4];
        let mut g = vec![vec![C::new(0.0, 0.0); 4]; 4];
        g[1][2] = C::new(1.0, 0.0);
        g[2][1] = C::new(1.0, 0.0);
        let mut term: Vec<Vec<C>> = (0..4)
            .map(|r| (0..4).map(|c| C::new(if r == c { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        for k in 0..40 {
            for r in 0..4 {
                for c in 0..4 {
                    series[r][c] += term[r][c];
                }
            }
            let mut next = vec![vec![C::new(0.0, 0.0); 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    for m in 0..4 {
                        next[r][c] += term[r][m] * g[m][c] * C::new(0.0, -beta) / (k + 1) as f64;
                    }
                }
            }
            term = next;
        }
        assert_close(&u, &series);
    }

    #[test]
    fn decompositions_are_exact() {
        let cases = [
            Gate::Rzz { a: 0, b: 1, theta: 0.83 },
            Gate::Rzz { a: 1, b: 0, theta: -2.1 },
            Gate::Xy { a: 0, b: 1, theta: 0.61 },
            Gate::Xy { a: 1, b: 0, theta: 2.9 },
            Gate::A { a: 0, b: 1, theta: std::f64::consts::FRAC_PI_4, phi: 0.0 },
            Gate::A { a: 0, b: 1, theta: 0.3, phi: 1.7 },
            Gate::A { a: 1, b: 0, theta: -1.2, phi: -0.4 },
        ];
        for g in cases {
            let parts = g.decompose();
            assert_eq!(
                parts.iter().filter(|p| p.kind() == GateKind::Cx).count(),
                g.cx_cost(),
                "{g}"
            );
            assert_close(&dense_unitary(&[g], 2), &dense_unitary(&parts, 2));
        }
    }

    #[test]
    fn a_gate_spreads_excitation() {
        let u = dense_unitary(
            &[Gate::A { a: 0, b: 1, theta: std::f64::consts::FRAC_PI_4, phi: 0.0 }],
            2,
        );
        // excitation on qubit 0 (index 1) goes to indices 1 and 2 only
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[1][1] - h).norm() < 1e-15);
        assert!((u[2][1] - h).norm() < 1e-15);
        assert!(u[0][1].norm() < 1e-15 && u[3][1].norm() < 1e-15);
    }

    #[test]
    fn commutation_rule() {
        let rzz = Gate::Rzz { a: 0, b: 1, theta: 1.0 };
        let rzz2 = Gate::Rzz { a: 1, b: 2, theta: 1.0 };
        let xy = Gate::Xy { a: 1, b: 2, theta: 1.0 };
        let xy_far = Gate::Xy { a: 3, b: 4, theta: 1.0 };
        assert!(rzz.commutes_with(&rzz2));
        assert!(!rzz.commutes_with(&xy));
        assert!(rzz.commutes_with(&xy_far));
        assert!(Gate::Rz { q: 0, theta: 1.0 }.commutes_with(&rzz));
    }
}
