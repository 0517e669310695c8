//! Finite fields GF(p^r) with q <= 2^16.
//!
//! Elements are stored by rank in the canonical total order
//! `0 < 1 < xi < xi^2 < ... < xi^(q-2)`, where `xi` is the smallest index
//! generating the multiplicative group. The base-p coefficient index is only
//! used when reading or writing elements.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 1 << 16;

/// A field element. Ordering is the field order used throughout.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            1 => write!(f, "1"),
            n => write!(f, "x^{}", n - 1),
        }
    }
}

#[derive(Clone)]
pub struct Field {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    xi_index: u32,
    /// rank -> base-p index
    index_of: Vec<u32>,
    /// base-p index -> rank
    rank_of: Vec<u16>,
    /// zech[n] = rank of 1 + xi^n
    zech: Vec<u16>,
    /// rank of -1
    minus_one: Fe,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.r, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}
impl Eq for Field {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over F_p, lowest coefficient first.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        for i in 0..=dm {
            a[da - dm + i] = (a[da - dm + i] + p * p - c * m[i] % p) % p;
        }
        poly_trim(&mut a);
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|&x| a * x % p == 1).expect("nonzero residue")
}

fn digits(mut idx: u32, p: u32, r: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(r as usize);
    for _ in 0..r {
        out.push(idx % p);
        idx /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Irreducibility by trial division against all monic polynomials of degree <= r/2.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let r = (m.len() - 1) as u32;
    if r == 1 {
        return true;
    }
    for deg in 1..=r / 2 {
        for low in 0..p.pow(deg) {
            let mut d = digits(low, p, deg);
            d.push(1);
            if poly_rem(m, &d, p).is_empty() {
                return false;
            }
        }
    }
    true
}

struct Raw {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
}

impl Raw {
    fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (da, db) = (digits(a, self.p, self.r), digits(b, self.p, self.r));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (digits(a, self.p, self.r), digits(b, self.p, self.r));
        let mut prod = vec![0u32; (2 * self.r) as usize];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut rem = poly_rem(&prod, &self.modulus, self.p);
        rem.resize(self.r as usize, 0);
        undigits(&rem, self.p)
    }

    fn pow(&self, g: u32, mut e: u32) -> u32 {
        let (mut acc, mut base) = (1, g);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn is_primitive(&self, g: u32) -> bool {
        if g == 0 {
            return false;
        }
        let m = self.q - 1;
        let mut rest = m;
        let mut l = 2;
        while rest > 1 {
            if rest % l == 0 {
                if self.pow(g, m / l) == 1 {
                    return false;
                }
                while rest % l == 0 {
                    rest /= l;
                }
            }
            l += 1;
        }
        self.pow(g, m) == 1
    }

    /// Index of the polynomial `x` in the quotient ring (p when r == 1 wraps).
    fn x_index(&self) -> u32 {
        if self.r == 1 {
            // x = -c_0 mod p
            (self.p - self.modulus[0] % self.p) % self.p
        } else {
            self.p
        }
    }
}

impl Field {
    /// GF(p^r) with the default modulus: the first monic primitive polynomial
    /// of degree r when (c_0, ..., c_{r-1}) is enumerated as a base-p number.
    pub fn new(p: u32, r: u32) -> Result<Field> {
        Self::check_params(p, r)?;
        let q = p.pow(r);
        for low in 0..q {
            let mut m = digits(low, p, r);
            m.push(1);
            if m[0] == 0 || !is_irreducible(&m, p) {
                continue;
            }
            let raw = Raw { p, r, q, modulus: m.clone() };
            let x = raw.x_index();
            if raw.is_primitive(x) {
                return Self::build(raw);
            }
        }
        Err(Error::InvalidField(format!("no primitive polynomial for p={p} r={r}")))
    }

    /// GF(p^r) with an explicit monic modulus given lowest coefficient first
    /// (`modulus.len() == r + 1`).
    pub fn with_modulus(p: u32, r: u32, modulus: &[u32]) -> Result<Field> {
        Self::check_params(p, r)?;
        if modulus.len() != r as usize + 1 {
            return Err(Error::InvalidField(format!(
                "modulus needs {} coefficients, got {}",
                r + 1,
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= p) || modulus[r as usize] != 1 {
            return Err(Error::InvalidField("modulus must be monic with coefficients in [0,p)".into()));
        }
        if !is_irreducible(modulus, p) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        Self::build(Raw { p, r, q: p.pow(r), modulus: modulus.to_vec() })
    }

    fn check_params(p: u32, r: u32) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(Error::InvalidField("degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
        if q > MAX_ORDER as u64 {
            return Err(Error::InvalidField(format!("q = {p}^{r} exceeds 2^16")));
        }
        Ok(())
    }

    fn build(raw: Raw) -> Result<Field> {
        let q = raw.q;
        let xi_index = (1..q).find(|&g| raw.is_primitive(g)).unwrap_or(1);
        let mut index_of = vec![0u32; q as usize];
        let mut rank_of = vec![0u16; q as usize];
        let mut x = 1u32;
        for i in 0..q - 1 {
            index_of[i as usize + 1] = x;
            rank_of[x as usize] = (i + 1) as u16;
            x = raw.mul(x, xi_index);
        }
        let zech = (0..q - 1)
            .map(|n| rank_of[raw.add(1, index_of[n as usize + 1]) as usize])
            .collect();
        let minus_one = if raw.p == 2 { Fe::ONE } else { Fe(((q - 1) / 2 + 1) as u16) };
        Ok(Field {
            p: raw.p,
            r: raw.r,
            q,
            modulus: raw.modulus,
            xi_index,
            index_of,
            rank_of,
            zech,
            minus_one,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// Base-p index of the primitive element.
    pub fn xi_index(&self) -> u32 {
        self.xi_index
    }

    pub fn xi(&self) -> Fe {
        if self.q == 2 {
            Fe::ONE
        } else {
            Fe(2)
        }
    }

    pub fn from_index(&self, idx: u32) -> Result<Fe> {
        self.rank_of
            .get(idx as usize)
            .map(|&r| Fe(r))
            .ok_or_else(|| Error::InvalidField(format!("element index {idx} out of range for q={}", self.q)))
    }

    pub fn to_index(&self, a: Fe) -> u32 {
        self.index_of[a.0 as usize]
    }

    /// Elements in field order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(|r| Fe(r as u16))
    }

    /// Discrete log base xi of a nonzero element.
    #[inline]
    pub fn log(&self, a: Fe) -> u32 {
        debug_assert!(!a.is_zero());
        a.0 as u32 - 1
    }

    #[inline]
    pub fn exp(&self, n: u64) -> Fe {
        Fe((n % (self.q as u64 - 1)) as u16 + 1)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let m = self.q - 1;
        let (i, j) = (a.0 as u32 - 1, b.0 as u32 - 1);
        let n = (j + m - i) % m;
        let z = self.zech[n as usize];
        if z == 0 {
            Fe::ZERO
        } else {
            Fe(((i + z as u32 - 1) % m + 1) as u16)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.mul(a, self.minus_one)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe::ZERO;
        }
        let m = self.q - 1;
        Fe(((a.0 as u32 - 1 + b.0 as u32 - 1) % m + 1) as u16)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nz(a))
    }

    /// Inverse of an element known to be nonzero.
    #[inline]
    pub fn inv_nz(&self, a: Fe) -> Fe {
        debug_assert!(!a.is_zero(), "inverse of zero");
        let m = self.q - 1;
        Fe(((m - (a.0 as u32 - 1)) % m + 1) as u16)
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        self.exp(self.log(a) as u64 * e)
    }

    /// a^(p^e), the e-th power of the Frobenius automorphism.
    #[inline]
    pub fn frob(&self, a: Fe, e: u32) -> Fe {
        if a.is_zero() || e % self.r == 0 {
            return a;
        }
        let m = (self.q - 1) as u64;
        let pe = (self.p as u64).pow(e % self.r) % m;
        Fe(((self.log(a) as u64 * pe) % m + 1) as u16)
    }

    pub fn frob_vec(&self, v: &[Fe], e: u32) -> Vec<Fe> {
        v.iter().map(|&x| self.frob(x, e)).collect()
    }
}
