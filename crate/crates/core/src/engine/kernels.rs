//! Dense amplitude kernels. Basis index bit `k` set means local qubit `k` is
//! in `|1>`, i.e. its Z eigenvalue is -1.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Qubits below this index are mixed inside cache-sized blocks.
const BLOCK_BITS: usize = 12;
/// Higher qubits are mixed in groups of this many per pass, touching
/// `2^HIGH_GROUP` strided rows of `ROW` contiguous amplitudes at a time.
const HIGH_GROUP: usize = 6;
const ROW: usize = 64;

pub fn plus_state(m: usize) -> Vec<C64> {
    let amp = (1u64 << m) as f64;
    vec![C64::new(amp.sqrt().recip(), 0.0); 1 << m]
}

#[inline]
pub fn z_sign(x: usize, mask: usize) -> f64 {
    if (x & mask).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `sum_k w_k z_k(x)` for every basis state, built by doubling.
pub fn local_field_diagonal(m: usize, weights: &[(usize, f64)]) -> Vec<f64> {
    let mut per_qubit = vec![0.0; m];
    for &(k, w) in weights {
        per_qubit[k] += w;
    }
    let mut d = vec![0.0; 1 << m];
    d[0] = per_qubit.iter().sum();
    for (k, &w) in per_qubit.iter().enumerate() {
        let half = 1 << k;
        for x in 0..half {
            d[x + half] = d[x] - 2.0 * w;
        }
    }
    d
}

/// `sum_S w_S prod_{k in S} z_k(x)` for Z-strings given as local bit masks.
pub fn zstring_diagonal(m: usize, terms: &[(usize, f64)]) -> Vec<f64> {
    let mut d = vec![0.0; 1 << m];
    for &(mask, w) in terms {
        d[mask] += w;
    }
    walsh_hadamard(&mut d);
    d
}

/// Diagonal generator with an optional integer lookup path.
pub struct Generator<'a> {
    pub values: &'a [f64],
    /// `Some((min, max))` when every value is an integer in that range.
    pub int_range: Option<(i64, i64)>,
}

impl<'a> Generator<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        Self {
            values,
            int_range: integer_range(values),
        }
    }
}

pub fn integer_range(values: &[f64]) -> Option<(i64, i64)> {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &v in values {
        if v.fract() != 0.0 || v.abs() > 1e7 {
            return None;
        }
        lo = lo.min(v as i64);
        hi = hi.max(v as i64);
    }
    Some((lo, hi))
}

/// Multiplies by `exp(-i sum_g theta_g D_g(x))`.
pub fn apply_phase(amps: &mut [C64], gens: &[(f64, &Generator<'_>)]) {
    let active: Vec<_> = gens.iter().filter(|(t, _)| *t != 0.0).collect();
    if active.is_empty() {
        return;
    }
    if active.iter().all(|(_, g)| g.int_range.is_some()) {
        let tables: Vec<(i64, Vec<C64>)> = active
            .iter()
            .map(|(theta, g)| {
                let (lo, hi) = g.int_range.unwrap();
                let table = (lo..=hi).map(|v| C64::cis(-theta * v as f64)).collect();
                (lo, table)
            })
            .collect();
        for (x, a) in amps.iter_mut().enumerate() {
            let mut ph = C64::new(1.0, 0.0);
            for ((lo, table), (_, g)) in tables.iter().zip(&active) {
                ph *= table[(g.values[x] as i64 - lo) as usize];
            }
            *a *= ph;
        }
    } else {
        for (x, a) in amps.iter_mut().enumerate() {
            let angle: f64 = active.iter().map(|(t, g)| t * g.values[x]).sum();
            *a *= C64::cis(-angle);
        }
    }
}

#[inline(always)]
fn butterfly(a0: &mut C64, a1: &mut C64, c: f64, s: f64) {
    // [c, -is; -is, c]
    let (x0, x1) = (*a0, *a1);
    *a0 = C64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
    *a1 = C64::new(c * x1.re + s * x0.im, c * x1.im - s * x0.re);
}

/// `exp(-i beta X_k)` on local qubit `k`.
pub fn apply_x_rotation(amps: &mut [C64], k: usize, beta: f64) {
    let (s, c) = beta.sin_cos();
    let half = 1 << k;
    for chunk in amps.chunks_mut(2 * half) {
        let (lo, hi) = chunk.split_at_mut(half);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            butterfly(a0, a1, c, s);
        }
    }
}

/// `exp(-i beta sum_k X_k)` over all `m` qubits.
pub fn apply_mixer_all(amps: &mut [C64], m: usize, beta: f64) {
    if beta == 0.0 {
        return;
    }
    let (s, c) = beta.sin_cos();
    let low = m.min(BLOCK_BITS);
    for block in amps.chunks_mut(1 << low) {
        if low >= 2 {
            // Qubits 0 and 1 together, four amplitudes at a time.
            for q in block.chunks_exact_mut(4) {
                let [a0, a1, a2, a3] = q else { unreachable!() };
                butterfly(a0, a1, c, s);
                butterfly(a2, a3, c, s);
                butterfly(a0, a2, c, s);
                butterfly(a1, a3, c, s);
            }
        }
        for k in if low >= 2 { 2 } else { 0 }..low {
            let half = 1 << k;
            for chunk in block.chunks_mut(2 * half) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    butterfly(a0, a1, c, s);
                }
            }
        }
    }
    for k0 in (low..m).step_by(HIGH_GROUP) {
        mix_high_group(amps, k0, HIGH_GROUP.min(m - k0), c, s);
    }
}

/// Visits every tile of `2^g` rows spaced `2^k0` apart, passing the index of
/// the first amplitude of row 0, the row stride and the row length.
fn for_each_tile(len: usize, k0: usize, g: usize, mut f: impl FnMut(usize, usize, usize)) {
    let stride = 1usize << k0;
    let row = ROW.min(stride);
    for outer in (0..len).step_by(stride << g) {
        for lo in (0..stride).step_by(row) {
            f(outer + lo, stride, row);
        }
    }
}

fn mix_high_group(amps: &mut [C64], k0: usize, g: usize, c: f64, s: f64) {
    for_each_tile(amps.len(), k0, g, |base, stride, row| {
        for j in 0..g {
            let bit = 1usize << j;
            for h in (0..1usize << g).filter(|h| h & bit == 0) {
                let i0 = base + h * stride;
                let i1 = i0 + bit * stride;
                let (a, b) = amps.split_at_mut(i1);
                for (x0, x1) in a[i0..i0 + row].iter_mut().zip(&mut b[..row]) {
                    butterfly(x0, x1, c, s);
                }
            }
        }
    });
}

pub fn apply_mixer(amps: &mut [C64], m: usize, qubits: &[usize], beta: f64) {
    if beta == 0.0 {
        return;
    }
    if qubits.len() == m {
        apply_mixer_all(amps, m, beta);
    } else {
        for &k in qubits {
            apply_x_rotation(amps, k, beta);
        }
    }
}

pub fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// `sum_x |a_x|^2 d_x`.
pub fn expect_diagonal(amps: &[C64], diag: &[f64]) -> f64 {
    amps.iter().zip(diag).map(|(a, d)| a.norm_sqr() * d).sum()
}

/// `Im <l| D |r>` for a diagonal `D`.
pub fn im_inner_diagonal(l: &[C64], r: &[C64], diag: &[f64]) -> f64 {
    l.iter()
        .zip(r)
        .zip(diag)
        .map(|((a, b), d)| d * (a.re * b.im - a.im * b.re))
        .sum()
}

/// `Im <l| X_k |r>`.
fn im_inner_x(l: &[C64], r: &[C64], k: usize) -> f64 {
    let half = 1 << k;
    let mut total = 0.0;
    for (lc, rc) in l.chunks(2 * half).zip(r.chunks(2 * half)) {
        let (l0, l1) = lc.split_at(half);
        let (r0, r1) = rc.split_at(half);
        for i in 0..half {
            // conj(l0) r1 + conj(l1) r0
            total += l0[i].re * r1[i].im - l0[i].im * r1[i].re;
            total += l1[i].re * r0[i].im - l1[i].im * r0[i].re;
        }
    }
    total
}

/// `Im <l| sum_k X_k |r>`.
pub fn im_inner_mixer(l: &[C64], r: &[C64], m: usize) -> f64 {
    let low = m.min(BLOCK_BITS);
    let mut total = 0.0;
    for (lb, rb) in l.chunks(1 << low).zip(r.chunks(1 << low)) {
        for k in 0..low {
            total += im_inner_x(lb, rb, k);
        }
    }
    for k0 in (low..m).step_by(HIGH_GROUP) {
        let g = HIGH_GROUP.min(m - k0);
        for_each_tile(l.len(), k0, g, |base, stride, row| {
            for j in 0..g {
                let bit = 1usize << j;
                for h in (0..1usize << g).filter(|h| h & bit == 0) {
                    let i0 = base + h * stride;
                    let i1 = i0 + bit * stride;
                    let (l0, l1) = (&l[i0..i0 + row], &l[i1..i1 + row]);
                    let (r0, r1) = (&r[i0..i0 + row], &r[i1..i1 + row]);
                    for i in 0..row {
                        total += l0[i].re * r1[i].im - l0[i].im * r1[i].re;
                        total += l1[i].re * r0[i].im - l1[i].im * r0[i].re;
                    }
                }
            }
        });
    }
    total
}

/// In-place unnormalized Walsh–Hadamard transform:
/// `out[s] = sum_x in[x] (-1)^{|x & s|}`.
pub fn walsh_hadamard(v: &mut [f64]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for chunk in v.chunks_mut(2 * half) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn blocked_mixer_matches_per_qubit() {
        let m = 14;
        let mut a: Vec<C64> = (0..1 << m)
            .map(|x| C64::new((x as f64 * 0.37).sin(), (x as f64 * 0.11).cos()))
            .collect();
        let mut b = a.clone();
        apply_mixer_all(&mut a, m, 0.3);
        for k in 0..m {
            apply_x_rotation(&mut b, k, 0.3);
        }
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn grouped_high_qubits_match_per_qubit() {
        let m = 21;
        let mut a: Vec<C64> = (0..1 << m)
            .map(|x| C64::new((x as f64 * 0.37).sin(), (x as f64 * 0.11).cos()))
            .collect();
        let r: Vec<C64> = a.iter().map(|z| C64::new(z.im, -0.5 * z.re)).collect();
        let direct: f64 = (0..m).map(|k| im_inner_x(&a, &r, k)).sum();
        assert_abs_diff_eq!(im_inner_mixer(&a, &r, m), direct, epsilon = 1e-6 * direct.abs().max(1.0));
        let mut b = a.clone();
        apply_mixer_all(&mut a, m, -0.8);
        for k in 0..m {
            apply_x_rotation(&mut b, k, -0.8);
        }
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn x_rotation_on_zero() {
        // exp(-i b X)|0> = cos b |0> - i sin b |1>
        let mut a = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        apply_x_rotation(&mut a, 0, 0.4);
        assert_abs_diff_eq!(a[0].re, 0.4f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(a[1].im, -0.4f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn walsh_hadamard_matches_definition() {
        let v: Vec<f64> = (0..16).map(|x| (x as f64).cos()).collect();
        let mut w = v.clone();
        walsh_hadamard(&mut w);
        for s in 0..16 {
            let direct: f64 = (0..16).map(|x| v[x] * z_sign(x, s)).sum();
            assert_abs_diff_eq!(w[s], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonals() {
        let d = local_field_diagonal(3, &[(0, 1.0), (2, -0.5)]);
        for x in 0..8 {
            let e = z_sign(x, 1) - 0.5 * z_sign(x, 4);
            assert_abs_diff_eq!(d[x], e, epsilon = 1e-15);
        }
        let z = zstring_diagonal(3, &[(0b011, 2.0), (0b111, 1.0)]);
        for x in 0..8 {
            assert_eq!(z[x], 2.0 * z_sign(x, 0b011) + z_sign(x, 0b111));
        }
        assert_eq!(z[0], 3.0);
        assert_eq!(z[1], -3.0);
        assert_eq!(integer_range(&z), Some((-3, 3)));
    }

    #[test]
    fn phase_paths_agree() {
        let m = 5;
        let vals = zstring_diagonal(m, &[(0b00011, 1.0), (0b11100, 1.0), (0b10101, -1.0)]);
        let g_int = Generator::new(&vals);
        assert!(g_int.int_range.is_some());
        let g_float = Generator {
            values: &vals,
            int_range: None,
        };
        let mut a = plus_state(m);
        let mut b = plus_state(m);
        apply_phase(&mut a, &[(0.7, &g_int)]);
        apply_phase(&mut b, &[(0.7, &g_float)]);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
        }
    }
}
