//! Matrix-product-state simulator with bond truncation.
//!
//! Site `k` holds qubit `k`. Tensors are stored `[left][phys][right]`. The
//! state is kept in mixed canonical form around a movable center; two-site
//! updates contract a neighbor pair, apply the gate, split by SVD, truncate
//! and renormalize. Gates on distant qubits are routed with SWAPs there and
//! back. Diagonal couplings between two neighboring blocks (when a block
//! layout is supplied) are applied during a block exchange: swapping two
//! adjacent blocks site by site makes every cross pair adjacent exactly once,
//! so each coupling rides along with one SWAP.

use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateMatrix, SegmentKind};
use crate::energy::{Bitstring, BlockLayout, MAX_BITS};
use crate::rng::Rng;
use crate::{Error, Result};

type C = Complex64;
type M4 = [[C; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MpsConfig {
    /// Largest bond dimension kept (χ).
    pub max_bond: usize,
    /// Singular values with `s² ≤ threshold` (relative to the pair norm) are dropped.
    pub threshold: f64,
}

impl Default for MpsConfig {
    fn default() -> Self {
        Self {
            max_bond: 64,
            threshold: 1e-10,
        }
    }
}

impl MpsConfig {
    /// No truncation beyond exact zeros.
    pub fn exact() -> Self {
        Self {
            max_bond: usize::MAX,
            threshold: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Site {
    dl: usize,
    dr: usize,
    data: Vec<C>,
}

impl Site {
    fn at(&self, l: usize, s: usize, r: usize) -> C {
        self.data[(l * 2 + s) * self.dr + r]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    sites: Vec<Site>,
    center: usize,
    config: MpsConfig,
    discarded_weight: f64,
    max_bond_reached: usize,
    two_site_updates: u64,
}

impl MpsState {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize, config: MpsConfig) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidConfig("MPS needs at least one qubit".into()));
        }
        if config.max_bond == 0 {
            return Err(Error::InvalidConfig("max_bond must be at least 1".into()));
        }
        let site = Site {
            dl: 1,
            dr: 1,
            data: vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
        };
        Ok(Self {
            sites: vec![site; num_qubits],
            center: 0,
            config,
            discarded_weight: 0.0,
            max_bond_reached: 1,
            two_site_updates: 0,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn config(&self) -> MpsConfig {
        self.config
    }

    /// Bond dimensions between consecutive sites (`M - 1` entries).
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.sites.len() - 1].iter().map(|s| s.dr).collect()
    }

    pub fn max_bond_reached(&self) -> usize {
        self.max_bond_reached
    }

    /// Accumulated truncated weight `Σ s²` over all splits.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    pub fn two_site_updates(&self) -> u64 {
        self.two_site_updates
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sites[self.center].data.iter().map(C::norm_sqr).sum()
    }

    fn move_center(&mut self, to: usize) -> Result<()> {
        while self.center < to {
            let k = self.center;
            let (dl, dr) = (self.sites[k].dl, self.sites[k].dr);
            let a = Mat::<C>::from_fn(dl * 2, dr, |i, j| self.sites[k].data[i * dr + j]);
            let qr = a.qr();
            let q = qr.compute_thin_Q();
            let r = qr.thin_R();
            let kdim = q.ncols();
            self.sites[k] = Site {
                dl,
                dr: kdim,
                data: (0..dl * 2).flat_map(|i| (0..kdim).map(move |j| (i, j))).map(|(i, j)| q[(i, j)]).collect(),
            };
            let next = &self.sites[k + 1];
            let cols = 2 * next.dr;
            let mut data = vec![C::new(0.0, 0.0); kdim * cols];
            for i in 0..kdim {
                for m in 0..dr {
                    let rv = r[(i, m)];
                    if rv == C::new(0.0, 0.0) {
                        continue;
                    }
                    let row = &next.data[m * cols..(m + 1) * cols];
                    for (o, v) in data[i * cols..(i + 1) * cols].iter_mut().zip(row) {
                        *o += rv * v;
                    }
                }
            }
            self.sites[k + 1] = Site { dl: kdim, dr: next.dr, data };
            self.center += 1;
        }
        while self.center > to {
            let k = self.center;
            let (dl, dr) = (self.sites[k].dl, self.sites[k].dr);
            // LQ of the (dl, 2·dr) matrix through QR of its adjoint.
            let adj = Mat::<C>::from_fn(2 * dr, dl, |i, j| self.sites[k].data[j * 2 * dr + i].conj());
            let qr = adj.qr();
            let q = qr.compute_thin_Q();
            let r = qr.thin_R();
            let kdim = q.ncols();
            // site k ← Qᴴ (kdim × 2dr); left factor L = Rᴴ (dl × kdim)
            let mut data = vec![C::new(0.0, 0.0); kdim * 2 * dr];
            for i in 0..kdim {
                for j in 0..2 * dr {
                    data[i * 2 * dr + j] = q[(j, i)].conj();
                }
            }
            self.sites[k] = Site { dl: kdim, dr, data };
            let prev = &self.sites[k - 1];
            let rows = prev.dl * 2;
            let mut pdata = vec![C::new(0.0, 0.0); rows * kdim];
            for i in 0..rows {
                for m in 0..dl {
                    let pv = prev.data[i * dl + m];
                    if pv == C::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..kdim {
                        pdata[i * kdim + j] += pv * r[(j, m)].conj();
                    }
                }
            }
            self.sites[k - 1] = Site { dl: prev.dl, dr: kdim, data: pdata };
            self.center -= 1;
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: &[[C; 2]; 2]) {
        let site = &mut self.sites[q];
        let dr = site.dr;
        for l in 0..site.dl {
            for r in 0..dr {
                let a0 = site.data[(l * 2) * dr + r];
                let a1 = site.data[(l * 2 + 1) * dr + r];
                site.data[(l * 2) * dr + r] = m[0][0] * a0 + m[0][1] * a1;
                site.data[(l * 2 + 1) * dr + r] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Apply `u` (indexed `2·s_left + s_right`) to sites `(k, k+1)`. The
    /// center ends at `k+1` when `center_right`, else at `k`.
    fn apply_2site(&mut self, k: usize, u: &M4, center_right: bool) -> Result<()> {
        if self.center < k {
            self.move_center(k)?;
        } else if self.center > k + 1 {
            self.move_center(k + 1)?;
        }
        let (a, b) = (&self.sites[k], &self.sites[k + 1]);
        let (dl, dm, dr) = (a.dl, a.dr, b.dr);
        // theta[l][s][r], s = 2·sl + sr
        let mut theta = vec![C::new(0.0, 0.0); dl * 4 * dr];
        for l in 0..dl {
            for sl in 0..2 {
                for m in 0..dm {
                    let av = a.at(l, sl, m);
                    if av == C::new(0.0, 0.0) {
                        continue;
                    }
                    for sr in 0..2 {
                        let brow = &b.data[(m * 2 + sr) * dr..(m * 2 + sr + 1) * dr];
                        let out = &mut theta[(l * 4 + 2 * sl + sr) * dr..(l * 4 + 2 * sl + sr + 1) * dr];
                        for (o, bv) in out.iter_mut().zip(brow) {
                            *o += av * bv;
                        }
                    }
                }
            }
        }
        // Θ as a (2·dl) × (2·dr) matrix after the gate.
        let mat = Mat::<C>::from_fn(dl * 2, 2 * dr, |row, col| {
            let (l, sl) = (row / 2, row % 2);
            let (sr, r) = (col / dr, col % dr);
            let s = 2 * sl + sr;
            (0..4)
                .map(|t| u[s][t] * theta[(l * 4 + t) * dr + r])
                .sum::<C>()
        });
        let svd = mat
            .thin_svd()
            .map_err(|e| Error::Linalg(format!("SVD failed: {e:?}")))?;
        let (uu, vv) = (svd.U(), svd.V());
        let s: Vec<f64> = svd.S().column_vector().iter().map(|x| x.re).collect();
        let total: f64 = s.iter().map(|x| x * x).sum();
        if total <= 0.0 {
            return Err(Error::Linalg("two-site block has zero norm".into()));
        }
        let cutoff = self.config.threshold * total;
        let mut keep = s.iter().take_while(|&&x| x * x > cutoff).count().max(1);
        keep = keep.min(self.config.max_bond);
        let kept: f64 = s[..keep].iter().map(|x| x * x).sum();
        self.discarded_weight += (total - kept) / total;
        let scale = 1.0 / kept.sqrt();
        self.max_bond_reached = self.max_bond_reached.max(keep);
        self.two_site_updates += 1;

        let mut left = vec![C::new(0.0, 0.0); dl * 2 * keep];
        let mut right = vec![C::new(0.0, 0.0); keep * 2 * dr];
        for row in 0..dl * 2 {
            for j in 0..keep {
                let w = if center_right { 1.0 } else { s[j] * scale };
                left[row * keep + j] = uu[(row, j)] * w;
            }
        }
        for j in 0..keep {
            let w = if center_right { s[j] * scale } else { 1.0 };
            for col in 0..2 * dr {
                right[j * 2 * dr + col] = vv[(col, j)].conj() * w;
            }
        }
        self.sites[k] = Site { dl, dr: keep, data: left };
        self.sites[k + 1] = Site { dl: keep, dr, data: right };
        self.center = if center_right { k + 1 } else { k };
        Ok(())
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        if g.max_qubit() >= self.num_qubits() {
            return Err(Error::IndexOutOfRange(format!(
                "{g} on a {}-qubit state",
                self.num_qubits()
            )));
        }
        if let Some((a, b)) = g.pair() {
            if a == b {
                return Err(Error::InvalidCircuit(format!("{g} repeats a qubit")));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, g: &Gate) -> Result<()> {
        self.check_gate(g)?;
        match (g.matrix(), g.qubits()) {
            (GateMatrix::One(m), (q, None)) => {
                self.apply_1q(q, &m);
                Ok(())
            }
            (GateMatrix::Two(m), (a, Some(b))) => self.apply_2q(a, b, &m),
            _ => unreachable!("gate arity matches its matrix"),
        }
    }

    /// `m` indexed `2·x_b + x_a`.
    fn apply_2q(&mut self, a: usize, b: usize, m: &M4) -> Result<()> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let u = to_site_order(m, a < b);
        if hi == lo + 1 {
            return self.apply_2site(lo, &u, true);
        }
        let swap = swap_matrix();
        for k in lo..hi - 1 {
            self.apply_2site(k, &swap, true)?;
        }
        self.apply_2site(hi - 1, &u, false)?;
        for k in (lo..hi - 1).rev() {
            self.apply_2site(k, &swap, false)?;
        }
        Ok(())
    }

    /// Apply a set of mutually commuting diagonal gates.
    fn apply_diagonal(&mut self, gates: &[Gate], layout: Option<&BlockLayout>) -> Result<()> {
        let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for g in gates {
            self.check_gate(g)?;
            match *g {
                Gate::Rzz { a, b, theta } => {
                    *pairs.entry((a.min(b), a.max(b))).or_insert(0.0) += theta;
                }
                Gate::Rz { .. } => self.apply(g)?,
                _ => {
                    return Err(Error::InvalidCircuit(format!("{g} is not diagonal")));
                }
            }
        }
        if let Some(layout) = layout.filter(|l| l.dimension() == self.num_qubits()) {
            for blk in 0..layout.num_blocks().saturating_sub(1) {
                let x = layout.offset(blk)..layout.offset(blk) + layout.size(blk);
                let y = x.end..x.end + layout.size(blk + 1);
                let crossing: BTreeMap<(usize, usize), f64> = pairs
                    .iter()
                    .filter(|((a, b), _)| x.contains(a) && y.contains(b))
                    .map(|(&k, &v)| (k, v))
                    .collect();
                // A lone adjacent coupling is cheaper without the exchange.
                if crossing.keys().any(|&(a, b)| b > a + 1) {
                    for k in crossing.keys() {
                        pairs.remove(k);
                    }
                    self.exchange_blocks(x.start, x.end, y.end, &crossing)?;
                }
            }
        }
        for ((a, b), theta) in pairs {
            let g = Gate::Rzz { a, b, theta };
            if let GateMatrix::Two(m) = g.matrix() {
                self.apply_2q(a, b, &m)?;
            }
        }
        Ok(())
    }

    /// Swap sites `[x0, x1)` past `[x1, y1)` applying `couplings` (RZZ angles
    /// keyed by qubit pair) as pairs meet, then swap back.
    fn exchange_blocks(
        &mut self,
        x0: usize,
        x1: usize,
        y1: usize,
        couplings: &BTreeMap<(usize, usize), f64>,
    ) -> Result<()> {
        let nx = x1 - x0;
        let ny = y1 - x1;
        let mut order: Vec<usize> = (x0..y1).collect();
        let swap = swap_matrix();
        // Move each qubit of the right block leftwards past the whole left block.
        for j in 0..ny {
            for step in 0..nx {
                let pos = x1 + j - step; // current site of the moving qubit
                let k = pos - 1 - x0;
                let (left_q, right_q) = (order[k], order[k + 1]);
                let key = (left_q.min(right_q), left_q.max(right_q));
                let u = match couplings.get(&key) {
                    Some(&theta) => mat_mul(&swap, &rzz_site(theta)),
                    None => swap,
                };
                self.apply_2site(pos - 1, &u, false)?;
                order.swap(k, k + 1);
            }
        }
        for j in (0..ny).rev() {
            for step in (0..nx).rev() {
                let pos = x1 + j - step;
                self.apply_2site(pos - 1, &swap, true)?;
                order.swap(pos - 1 - x0, pos - x0);
            }
        }
        debug_assert!(order.iter().copied().eq(x0..y1));
        Ok(())
    }

    /// Apply a circuit. With a block layout, cost segments use block
    /// exchanges for couplings between neighboring blocks.
    pub fn apply_circuit(&mut self, circuit: &Circuit, layout: Option<&BlockLayout>) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits() {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits(),
                got: circuit.num_qubits(),
            });
        }
        for seg in circuit.segments() {
            let gates = circuit.segment_gates(seg);
            if seg.kind == SegmentKind::Cost && gates.iter().all(Gate::is_diagonal) {
                self.apply_diagonal(gates, layout)?;
            } else {
                for g in gates {
                    self.apply(g)?;
                }
            }
        }
        Ok(())
    }

    /// Sequential conditional sampling.
    pub fn sample(&mut self, shots: usize, rng: &mut Rng) -> Result<Vec<Bitstring>> {
        let n = self.num_qubits();
        if n > MAX_BITS {
            return Err(Error::TooManyQubits(n, MAX_BITS));
        }
        self.move_center(0)?;
        let mut out = Vec::with_capacity(shots);
        let mut v: Vec<C> = Vec::new();
        let mut w0: Vec<C> = Vec::new();
        let mut w1: Vec<C> = Vec::new();
        for _ in 0..shots {
            v.clear();
            v.push(C::new(1.0, 0.0));
            let mut bits = 0u64;
            for (k, site) in self.sites.iter().enumerate() {
                let dr = site.dr;
                w0.clear();
                w0.resize(dr, C::new(0.0, 0.0));
                w1.clear();
                w1.resize(dr, C::new(0.0, 0.0));
                for (l, &vl) in v.iter().enumerate() {
                    if vl == C::new(0.0, 0.0) {
                        continue;
                    }
                    let r0 = &site.data[(l * 2) * dr..(l * 2 + 1) * dr];
                    let r1 = &site.data[(l * 2 + 1) * dr..(l * 2 + 2) * dr];
                    for r in 0..dr {
                        w0[r] += vl * r0[r];
                        w1[r] += vl * r1[r];
                    }
                }
                let p0: f64 = w0.iter().map(C::norm_sqr).sum();
                let p1: f64 = w1.iter().map(C::norm_sqr).sum();
                let one = rng.gen::<f64>() * (p0 + p1) >= p0;
                let (w, p) = if one { (&w1, p1) } else { (&w0, p0) };
                if one {
                    bits |= 1 << k;
                }
                let inv = 1.0 / p.sqrt();
                v.clear();
                v.extend(w.iter().map(|x| x * inv));
            }
            out.push(Bitstring::from_raw(bits, n));
        }
        Ok(out)
    }

    /// Dense amplitudes (qubit `k` is bit `k`), for checks on small registers.
    pub fn to_amplitudes(&self) -> Result<Vec<C>> {
        let n = self.num_qubits();
        if n > 24 {
            return Err(Error::TooManyQubits(n, 24));
        }
        // acc[x][r] over the prefix of sites processed so far
        let mut acc: Vec<Vec<C>> = vec![vec![C::new(1.0, 0.0)]];
        for (k, site) in self.sites.iter().enumerate() {
            let mut next = vec![vec![C::new(0.0, 0.0); site.dr]; acc.len() * 2];
            for (x, row) in acc.iter().enumerate() {
                for s in 0..2 {
                    let dst = &mut next[x | (s << k)];
                    for (l, &a) in row.iter().enumerate() {
                        for r in 0..site.dr {
                            dst[r] += a * site.at(l, s, r);
                        }
                    }
                }
            }
            acc = next;
        }
        Ok(acc.into_iter().map(|v| v[0]).collect())
    }
}

fn to_site_order(m: &M4, first_is_left: bool) -> M4 {
    if !first_is_left {
        return *m;
    }
    // gate index 2·x_second + x_first; site index 2·s_left + s_right
    let flip = |i: usize| ((i & 1) << 1) | (i >> 1);
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[flip(r)][flip(c)];
        }
    }
    out
}

fn swap_matrix() -> M4 {
    let mut u = [[C::new(0.0, 0.0); 4]; 4];
    u[0][0] = C::new(1.0, 0.0);
    u[1][2] = C::new(1.0, 0.0);
    u[2][1] = C::new(1.0, 0.0);
    u[3][3] = C::new(1.0, 0.0);
    u
}

fn rzz_site(theta: f64) -> M4 {
    let m = C::from_polar(1.0, -theta / 2.0);
    let p = C::from_polar(1.0, theta / 2.0);
    let mut u = [[C::new(0.0, 0.0); 4]; 4];
    u[0][0] = m;
    u[1][1] = p;
    u[2][2] = p;
    u[3][3] = m;
    u
}

fn mat_mul(a: &M4, b: &M4) -> M4 {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}
