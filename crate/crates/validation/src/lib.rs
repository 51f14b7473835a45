//! Double-double reference evolution built from the analytic Hamiltonians.
//!
//! For small-mass ST modes the Heisenberg evolution is badly conditioned with respect to
//! the Hamiltonian's entries: rounding H to f64 (a 1e-13 change) moves e^{iHt} v e^{−iHt}
//! by ~1e-8. A reference computed from the f64 matrices therefore cannot judge a 1e-10
//! tolerance, so the oracle rebuilds H and v from (m, p, N) in ~106-bit arithmetic and
//! exponentiates by scaling and squaring of the Taylor series.

use std::ops::{Add, Div, Mul, Neg, Sub};

use zitter_core::operator_core::{c, ComplexMatrix};
use zitter_core::representations::RepresentationKind;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2` (Dekker/Knuth error-free transforms).
#[derive(Clone, Copy, Debug)]
pub struct TwoFloat {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> TwoFloat {
    let s = a + b;
    TwoFloat { hi: s, lo: b - (s - a) }
}

impl TwoFloat {
    const fn from_f64(x: f64) -> Self {
        TwoFloat { hi: x, lo: 0.0 }
    }

    fn hi(self) -> f64 {
        self.hi
    }

    fn lo(self) -> f64 {
        self.lo
    }
}

impl From<f64> for TwoFloat {
    fn from(x: f64) -> Self {
        TwoFloat::from_f64(x)
    }
}

impl Add for TwoFloat {
    type Output = TwoFloat;
    fn add(self, o: TwoFloat) -> TwoFloat {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for TwoFloat {
    type Output = TwoFloat;
    fn neg(self) -> TwoFloat {
        TwoFloat { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for TwoFloat {
    type Output = TwoFloat;
    fn sub(self, o: TwoFloat) -> TwoFloat {
        self + -o
    }
}

impl Mul for TwoFloat {
    type Output = TwoFloat;
    fn mul(self, o: TwoFloat) -> TwoFloat {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for TwoFloat {
    type Output = TwoFloat;
    /// Long division with three f64 quotient digits.
    fn div(self, o: TwoFloat) -> TwoFloat {
        let q1 = self.hi / o.hi;
        let r = self - o * TwoFloat::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * TwoFloat::from(q2);
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2) + TwoFloat::from(q3)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Cdd {
    re: TwoFloat,
    im: TwoFloat,
}

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

fn to_f64(x: TwoFloat) -> f64 {
    x.hi() + x.lo()
}

impl Cdd {
    const ZERO: Cdd = Cdd { re: TwoFloat::from_f64(0.0), im: TwoFloat::from_f64(0.0) };

    fn real(x: TwoFloat) -> Self {
        Cdd { re: x, im: dd(0.0) }
    }

    fn new(re: f64, im: f64) -> Self {
        Cdd { re: dd(re), im: dd(im) }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    fn scale(self, s: TwoFloat) -> Cdd {
        Cdd { re: self.re * s, im: self.im * s }
    }

    fn abs_f64(self) -> f64 {
        to_f64(self.re).hypot(to_f64(self.im))
    }
}

#[derive(Clone, Debug)]
pub struct Mdd {
    n: usize,
    a: Vec<Cdd>,
}

impl Mdd {
    fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Cdd) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(f(i, j));
            }
        }
        Mdd { n, a }
    }

    fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Cdd::new(1.0, 0.0) } else { Cdd::ZERO })
    }

    fn at(&self, i: usize, j: usize) -> Cdd {
        self.a[i * self.n + j]
    }

    fn add(&self, o: &Mdd) -> Mdd {
        Mdd { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x.add(*y)).collect() }
    }

    fn mul(&self, o: &Mdd) -> Mdd {
        Self::from_fn(self.n, |i, j| (0..self.n).fold(Cdd::ZERO, |acc, k| acc.add(self.at(i, k).mul(o.at(k, j)))))
    }

    fn scale(&self, s: Cdd) -> Mdd {
        Mdd { n: self.n, a: self.a.iter().map(|x| x.mul(s)).collect() }
    }

    fn scale_re(&self, s: TwoFloat) -> Mdd {
        Mdd { n: self.n, a: self.a.iter().map(|x| x.scale(s)).collect() }
    }

    fn kron(&self, o: &Mdd) -> Mdd {
        let n = self.n * o.n;
        Self::from_fn(n, |i, j| self.at(i / o.n, j / o.n).mul(o.at(i % o.n, j % o.n)))
    }

    fn norm_1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.at(i, j).abs_f64()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `e^A` by scaling to norm ≤ 1/4, a Taylor series to double-double precision and squaring.
    pub fn exp(&self) -> Mdd {
        let norm = self.norm_1();
        let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
        let b = self.scale_re(dd(0.5f64.powi(squarings)));
        let mut sum = Mdd::identity(self.n);
        let mut term = Mdd::identity(self.n);
        for k in 1..=40 {
            term = term.mul(&b).scale_re(dd(1.0) / dd(k as f64));
            sum = sum.add(&term);
            if term.norm_1() < 1e-34 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    pub fn to_f64(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, |i, j| {
            let z = self.at(i, j);
            c(to_f64(z.re), to_f64(z.im))
        })
    }
}

fn small(rows: &[&[(f64, f64)]]) -> Mdd {
    Mdd::from_fn(rows.len(), |i, j| Cdd::new(rows[i][j].0, rows[i][j].1))
}

/// Exact analytic `H` and `v_i` of a mode, rebuilt from its parameters.
pub struct AnalyticMode {
    pub hamiltonian: Mdd,
    pub velocity: [Mdd; 3],
}

impl AnalyticMode {
    pub fn new(kind: RepresentationKind, m: f64, p: [f64; 3], gfv_n: Option<f64>) -> Self {
        let (o, l, i_, mi) = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0));
        let ml = (-1.0, 0.0);
        let md = dd(m);
        let pd = p.map(dd);
        let p2 = pd[0] * pd[0] + pd[1] * pd[1] + pd[2] * pd[2];
        match kind {
            RepresentationKind::Dirac => {
                let sigma = [small(&[&[o, l], &[l, o]]), small(&[&[o, mi], &[i_, o]]), small(&[&[l, o], &[o, ml]])];
                let offdiag = small(&[&[o, l], &[l, o]]);
                let alpha = sigma.map(|s| offdiag.kron(&s));
                let beta = small(&[&[l, o], &[o, ml]]).kron(&Mdd::identity(2));
                let h = (0..3).fold(beta.scale_re(md), |acc, k| acc.add(&alpha[k].scale_re(pd[k])));
                AnalyticMode { hamiltonian: h, velocity: alpha }
            }
            RepresentationKind::Gfv => {
                let n = dd(gfv_n.expect("GFV needs N"));
                let e2 = md * md + p2;
                let a = (e2 + n * n) / (dd(2.0) * n);
                let b = (e2 - n * n) / (dd(2.0) * n);
                let h = Mdd::from_fn(2, |i, j| {
                    Cdd::real(match (i, j) {
                        (0, 0) => a,
                        (0, 1) => b,
                        (1, 0) => -b,
                        _ => -a,
                    })
                });
                let nil = small(&[&[l, l], &[ml, ml]]);
                AnalyticMode { hamiltonian: h, velocity: pd.map(|pk| nil.scale_re(pk / n)) }
            }
            RepresentationKind::SakataTaketani => {
                // (S_i)_{jk} = −i ε_{ijk}
                let s = [
                    small(&[&[o, o, o], &[o, o, mi], &[o, i_, o]]),
                    small(&[&[o, o, i_], &[o, o, o], &[mi, o, o]]),
                    small(&[&[o, mi, o], &[i_, o, o], &[o, o, o]]),
                ];
                let sp = (0..3).fold(Mdd::from_fn(3, |_, _| Cdd::ZERO), |acc, k| acc.add(&s[k].scale_re(pd[k])));
                let id3 = Mdd::identity(3);
                let rho3 = small(&[&[l, o], &[o, ml]]);
                let minus_i_rho2 = small(&[&[o, ml], &[l, o]]);
                let nil = small(&[&[l, l], &[ml, ml]]);
                let inv_m = dd(1.0) / md;
                let h = rho3
                    .kron(&id3.scale_re(md))
                    .add(&minus_i_rho2.kron(&sp.mul(&sp).scale_re(inv_m)))
                    .add(&nil.kron(&id3.scale_re(p2 / (dd(2.0) * md))));
                let velocity = [0, 1, 2].map(|k| {
                    let anti = s[k].mul(&sp).add(&sp.mul(&s[k]));
                    minus_i_rho2.kron(&anti.scale_re(inv_m)).add(&nil.kron(&id3.scale_re(pd[k] * inv_m)))
                });
                AnalyticMode { hamiltonian: h, velocity }
            }
        }
    }

    /// `(e^{iHt}, e^{−iHt})`.
    pub fn propagators(&self, t: f64) -> (Mdd, Mdd) {
        (self.hamiltonian.scale(Cdd::new(0.0, t)).exp(), self.hamiltonian.scale(Cdd::new(0.0, -t)).exp())
    }

    /// `e^{iHt} v_k e^{−iHt}` for every axis.
    pub fn velocity_at(&self, t: f64) -> [Mdd; 3] {
        let (fwd, back) = self.propagators(t);
        [0, 1, 2].map(|k| fwd.mul(&self.velocity[k]).mul(&back))
    }
}
