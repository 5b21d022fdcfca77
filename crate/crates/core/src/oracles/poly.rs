//! Exact bivariate polynomials with integer coefficients.

use alloc::collections::BTreeMap;

/// `Σ c_{ab} x^a y^b`, zero coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), i128>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(a: u32, b: u32) -> Self {
        Self::term(1, a, b)
    }

    pub fn term(c: i128, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(c, a, b);
        p
    }

    fn add_term(&mut self, c: i128, a: u32, b: u32) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coefficient(&self, a: u32, b: u32) -> i128 {
        self.terms.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coefficient(&self) -> u128 {
        self.terms.values().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.axpy(1, other)
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: i128, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (&(a, b), &c) in &other.terms {
            out.add_term(s * c, a, b);
        }
        out
    }

    pub fn scale(&self, s: i128) -> Poly {
        Poly::zero().axpy(s, self)
    }

    pub fn laplacian(&self) -> Poly {
        let mut out = Poly::zero();
        for (&(a, b), &c) in &self.terms {
            if a >= 2 {
                out.add_term(c * (a * (a - 1)) as i128, a - 2, b);
            }
            if b >= 2 {
                out.add_term(c * (b * (b - 1)) as i128, a, b - 2);
            }
        }
        out
    }

    /// The radial field `X = x ∂_x + y ∂_y`, which scales `x^a y^b` by `a + b`.
    pub fn radial(&self) -> Poly {
        let mut out = Poly::zero();
        for (&(a, b), &c) in &self.terms {
            out.add_term(c * (a + b) as i128, a, b);
        }
        out
    }

    /// `[−Δ, X] p = −Δ(Xp) + X(Δp)`.
    pub fn commutator(&self) -> Poly {
        self.radial().laplacian().scale(-1).add(&self.laplacian().radial())
    }
}

/// Largest coefficient of `[−Δ, X]p + 2Δp` over all monomials of degree ≤ `max_degree`.
pub fn poly_commutator_check(max_degree: u32) -> u128 {
    let mut worst = 0;
    for deg in 0..=max_degree {
        for a in 0..=deg {
            let p = Poly::monomial(a, deg - a);
            let r = p.commutator().axpy(2, &p.laplacian());
            worst = worst.max(r.max_abs_coefficient());
        }
    }
    worst
}
