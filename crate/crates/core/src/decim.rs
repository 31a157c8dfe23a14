//! Spectral decimation for the Vicsek graphs.
//!
//! With `t = 1 - N lambda`, an eigenvalue `lambda` at level `m + 1` decimates
//! to `R(lambda)` at level `m`, where
//!
//! ```text
//! R(lambda) = 1 + (lambda - 1) U_{n-1}(t)^2 + (t + lambda + 1) U_{n-1}(t) U_{n-2}(t) - t U_{n-2}(t)^2.
//! ```
//!
//! `R` has `2n - 1` preimage branches `psi_0 < ... < psi_{2n-2}` on
//! `[0, 2^d/N]`. Extension fails exactly on the forbidden set: `2^d/N`, the
//! roots of `S = T_n(t) + N T_{n-1}(t)` and the roots of
//! `A = U_{n-1}(t) + U_{n-2}(t)`. Full spectra are generated by pushing the
//! seeds `2^d/N`, `0`, the `S` roots and the `A` roots through the branches.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cheb::{cheb_of, eval_t, eval_u, ChebKind, IntPoly};
use crate::rational;
use crate::roots::{isolate_roots, Isolation};
use crate::{Error, Exec, Params, Result};

/// Tolerance on `|lambda - 2^d/N|` and on the scaled values of `S` and `A`
/// (see [`scaled_s`]) for forbidden-set membership.
pub const FORBIDDEN_TOL: f64 = 1e-9;

/// Spectrum entries closer than this are merged.
pub const MERGE_TOL: f64 = 1e-9;

const RATIONAL_MAX_DEN: i64 = 1_000_000;

/// An eigenvalue together with its Chebyshev variable `t = 1 - N lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: f64,
    pub t: f64,
}

impl SpectralPoint {
    pub fn new(params: &Params, lambda: f64) -> Self {
        SpectralPoint {
            lambda,
            t: params.t_of(lambda),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenSet {
    pub top: f64,
    /// Roots of `S`, ascending.
    pub alphas: Vec<f64>,
    /// Roots of `A`, ascending.
    pub betas: Vec<f64>,
}

impl ForbiddenSet {
    pub fn len(&self) -> usize {
        1 + self.alphas.len() + self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All members, ascending.
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.alphas.iter().chain(&self.betas).copied().collect();
        v.push(self.top);
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn distance(&self, lambda: f64) -> f64 {
        self.values()
            .into_iter()
            .map(|x| (x - lambda).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Which seed a genealogy starts from. Alpha and beta indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Seed {
    Top,
    Zero,
    Alpha(usize),
    Beta(usize),
}

impl std::fmt::Display for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Seed::Top => write!(f, "top"),
            Seed::Zero => write!(f, "zero"),
            Seed::Alpha(i) => write!(f, "alpha{i}"),
            Seed::Beta(i) => write!(f, "beta{i}"),
        }
    }
}

/// Seed plus branch word `v`; `v[0]` is applied first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Genealogy {
    pub seed: Seed,
    pub word: Vec<usize>,
}

impl Genealogy {
    pub fn word_string(&self) -> String {
        self.word
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: u64,
    pub genealogy: Genealogy,
    /// Exact value when it is rational (verified exactly, not just rounded).
    pub exact: Option<BigRational>,
}

/// Eigenvalues with multiplicities, strictly ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum {
    entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    /// Sorts by value (ties by genealogy) and merges entries closer than
    /// [`MERGE_TOL`].
    pub fn from_entries(mut entries: Vec<SpectrumEntry>) -> Self {
        entries.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then_with(|| a.genealogy.cmp(&b.genealogy))
        });
        let mut merged: Vec<SpectrumEntry> = Vec::with_capacity(entries.len());
        for e in entries {
            match merged.last_mut() {
                Some(last) if (e.value - last.value).abs() <= MERGE_TOL => {
                    log::warn!(
                        "merging spectrum entries {} ({:?}) and {} ({:?})",
                        last.value,
                        last.genealogy,
                        e.value,
                        e.genealogy
                    );
                    last.multiplicity += e.multiplicity;
                }
                _ => merged.push(e),
            }
        }
        Spectrum { entries: merged }
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// `sum value * multiplicity`.
    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.value * e.multiplicity as f64)
            .sum()
    }

    /// Exact trace when every value is known to be rational.
    pub fn exact_trace(&self) -> Option<BigRational> {
        self.entries.iter().try_fold(BigRational::zero(), |acc, e| {
            let v = e.exact.as_ref()?;
            Some(acc + v * BigRational::from_integer(BigInt::from(e.multiplicity)))
        })
    }

    /// `(value, multiplicity)` pairs.
    pub fn pairs(&self) -> Vec<(f64, u64)> {
        self.entries.iter().map(|e| (e.value, e.multiplicity)).collect()
    }
}

/// The polynomials of the decimation recipe, exact in `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimationPolys {
    pub r: IntPoly,
    pub s: IntPoly,
    pub a: IntPoly,
    /// `U_{n-2}(t) - U_{n-1}(t)`: preimages of `2^d/N` that are not `S` roots.
    pub top_factor: IntPoly,
    /// `U_{n-1}(t) + N U_{n-2}(t)`: preimages of `0` other than `0` and the `A` roots.
    pub zero_factor: IntPoly,
}

impl DecimationPolys {
    pub fn new(params: &Params) -> Self {
        let n = params.n() as usize;
        let big_n = BigInt::from(params.big_n());
        let t = IntPoly::linear(1, -big_n.clone());
        let lambda = IntPoly::x();
        let one = IntPoly::constant(1);
        let u1 = cheb_of(ChebKind::Second, n - 1, &t);
        let u2 = cheb_of(ChebKind::Second, n - 2, &t);
        let t1 = cheb_of(ChebKind::First, n, &t);
        let t2 = cheb_of(ChebKind::First, n - 1, &t);

        let r = &(&(&one + &(&(&lambda - &one) * &(&u1 * &u1)))
            + &(&(&(&t + &lambda) + &one) * &(&u1 * &u2)))
            - &(&t * &(&u2 * &u2));
        let s = &t1 + &t2.scale(&big_n);
        let a = &u1 + &u2;
        DecimationPolys {
            r,
            s,
            a,
            top_factor: &u2 - &u1,
            zero_factor: &u1 + &u2.scale(&big_n),
        }
    }
}

/// Exact coefficients of `R_{n,d}` in `lambda`.
pub fn r_coeffs(params: &Params) -> IntPoly {
    DecimationPolys::new(params).r
}

/// `R(lambda)` through the Chebyshev form.
pub fn eval_r(params: &Params, lambda: f64) -> f64 {
    let n = params.n() as usize;
    let t = params.t_of(lambda);
    let u1 = eval_u(n - 1, t);
    let u2 = eval_u(n - 2, t);
    1.0 + (lambda - 1.0) * u1 * u1 + (t + lambda + 1.0) * u1 * u2 - t * u2 * u2
}

/// `S(lambda) = T_n(t) + N T_{n-1}(t)`.
pub fn eval_s(params: &Params, lambda: f64) -> f64 {
    let n = params.n() as usize;
    let t = params.t_of(lambda);
    eval_t(n, t) + params.big_n() as f64 * eval_t(n - 1, t)
}

/// `A(lambda) = U_{n-1}(t) + U_{n-2}(t)`.
pub fn eval_a(params: &Params, lambda: f64) -> f64 {
    let n = params.n() as usize;
    let t = params.t_of(lambda);
    eval_u(n - 1, t) + eval_u(n - 2, t)
}

/// `S(lambda)` divided by `|T_n(t)| + N |T_{n-1}(t)|`, so that the size of the
/// value does not grow with `d` and `n`.
pub fn scaled_s(params: &Params, lambda: f64) -> f64 {
    let n = params.n() as usize;
    let t = params.t_of(lambda);
    let (a, b) = (eval_t(n, t), params.big_n() as f64 * eval_t(n - 1, t));
    (a + b) / (a.abs() + b.abs()).max(1.0)
}

/// `A(lambda)` divided by `|U_{n-1}(t)| + |U_{n-2}(t)|`.
pub fn scaled_a(params: &Params, lambda: f64) -> f64 {
    let n = params.n() as usize;
    let t = params.t_of(lambda);
    let (a, b) = (eval_u(n - 1, t), eval_u(n - 2, t));
    (a + b) / (a.abs() + b.abs()).max(1.0)
}

pub fn forbidden_set(params: &Params) -> Result<ForbiddenSet> {
    Ok(Decimation::new(*params)?.forbidden().clone())
}

pub fn inverse_branches(params: &Params, lambda_prime: f64) -> Result<Vec<f64>> {
    Decimation::new(*params)?.inverse_branches(lambda_prime)
}

pub fn psi_word(params: &Params, word: &[usize], seed: f64) -> Result<f64> {
    Decimation::new(*params)?.psi_word(word, seed)
}

pub fn neumann_spectrum(params: &Params, m: u32) -> Result<Spectrum> {
    Decimation::new(*params)?.neumann_spectrum(m)
}

pub fn dirichlet_spectrum(params: &Params, m: u32) -> Result<Spectrum> {
    Decimation::new(*params)?.dirichlet_spectrum(m)
}

/// Decimation engine for fixed `(d, n)`: polynomials, forbidden set and
/// spectrum generation.
#[derive(Debug, Clone)]
pub struct Decimation {
    params: Params,
    polys: DecimationPolys,
    forbidden: ForbiddenSet,
    exact_alphas: Vec<Option<BigRational>>,
    exact_betas: Vec<Option<BigRational>>,
    isolation: Isolation,
    exec: Exec,
}

#[derive(Debug, Clone)]
struct Node {
    value: f64,
    exact: Option<BigRational>,
    genealogy: Genealogy,
}

impl Decimation {
    pub fn new(params: Params) -> Result<Self> {
        Self::with_options(params, Isolation::default(), Exec::default())
    }

    pub fn with_options(params: Params, isolation: Isolation, exec: Exec) -> Result<Self> {
        let polys = DecimationPolys::new(&params);
        let zero = BigRational::zero();
        let top = params.top_rational();
        let n = params.n() as usize;
        let alpha_br = isolate_roots(&polys.s, &zero, &top, n, isolation, exec)?;
        let beta_br = isolate_roots(&polys.a, &zero, &top, n - 1, isolation, exec)?;
        let recognize = |p: &IntPoly, x: f64| {
            rational::recognize(x, 1e-9, RATIONAL_MAX_DEN, |c| p.eval_rational(c).is_zero())
        };
        let alphas: Vec<f64> = alpha_br.iter().map(|b| b.midpoint()).collect();
        let betas: Vec<f64> = beta_br.iter().map(|b| b.midpoint()).collect();
        let exact_alphas = alphas.iter().map(|&x| recognize(&polys.s, x)).collect();
        let exact_betas = betas.iter().map(|&x| recognize(&polys.a, x)).collect();
        Ok(Decimation {
            params,
            forbidden: ForbiddenSet {
                top: params.top_value(),
                alphas,
                betas,
            },
            polys,
            exact_alphas,
            exact_betas,
            isolation,
            exec,
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn polys(&self) -> &DecimationPolys {
        &self.polys
    }

    pub fn forbidden(&self) -> &ForbiddenSet {
        &self.forbidden
    }

    pub fn eval_r(&self, lambda: f64) -> f64 {
        eval_r(&self.params, lambda)
    }

    /// Membership in the forbidden set by scaled polynomial value, tolerance
    /// [`FORBIDDEN_TOL`].
    pub fn is_forbidden(&self, lambda: f64) -> bool {
        (lambda - self.forbidden.top).abs() <= FORBIDDEN_TOL
            || scaled_s(&self.params, lambda).abs() <= FORBIDDEN_TOL
            || scaled_a(&self.params, lambda).abs() <= FORBIDDEN_TOL
    }

    /// The `2n - 1` ascending solutions of `R(lambda) = lambda_prime`.
    pub fn inverse_branches(&self, lambda_prime: f64) -> Result<Vec<f64>> {
        let top = self.params.top_value();
        const SLACK: f64 = 1e-12;
        if !(lambda_prime >= -SLACK && lambda_prime <= top + SLACK) {
            return Err(Error::DomainError {
                value: lambda_prime,
                lo: 0.0,
                hi: top,
            });
        }
        let target = if lambda_prime <= 0.0 {
            BigRational::zero()
        } else if lambda_prime >= top {
            self.params.top_rational()
        } else {
            rational::exact(lambda_prime)
        };
        self.preimages(&target)
    }

    fn preimages(&self, target: &BigRational) -> Result<Vec<f64>> {
        Ok(self
            .preimage_brackets(target, self.exec)?
            .iter()
            .map(|b| b.midpoint())
            .collect())
    }

    fn preimage_brackets(
        &self,
        target: &BigRational,
        exec: Exec,
    ) -> Result<Vec<crate::roots::RootBracket>> {
        // (R - p/q) q = q R - p
        let poly = &self.polys.r.scale(target.denom()) - &IntPoly::constant(target.numer().clone());
        let expected = 2 * self.params.n() as usize - 1;
        isolate_roots(
            &poly,
            &BigRational::zero(),
            &self.params.top_rational(),
            expected,
            self.isolation,
            exec,
        )
    }

    /// `psi_v(seed)`, applying `psi_{v[0]}` first.
    pub fn psi_word(&self, word: &[usize], seed: f64) -> Result<f64> {
        let branches = 2 * self.params.n() as usize - 1;
        let mut x = seed;
        for &l in word {
            if l >= branches {
                return Err(Error::InvalidRange(format!(
                    "branch index {l} outside 0..{}",
                    branches - 1
                )));
            }
            x = self.inverse_branches(x)?[l];
        }
        Ok(x)
    }

    fn child_nodes(&self, node: &Node, exec: Exec) -> Result<Vec<Node>> {
        let target = node
            .exact
            .clone()
            .unwrap_or_else(|| rational::exact(node.value));
        let brackets = self.preimage_brackets(&target, exec)?;
        Ok(brackets
            .iter()
            .enumerate()
            .map(|(l, b)| {
                let value = b.midpoint();
                let exact = node.exact.as_ref().and_then(|parent| {
                    if b.is_exact() {
                        return Some(b.lo.clone());
                    }
                    rational::recognize(value, 1e-9, RATIONAL_MAX_DEN, |c| {
                        &self.polys.r.eval_rational(c) == parent
                    })
                });
                let mut genealogy = node.genealogy.clone();
                genealogy.word.push(l);
                Node {
                    value,
                    exact,
                    genealogy,
                }
            })
            .collect())
    }

    /// First-generation descendants of `2^d/N` (roots of `top_factor`) or of
    /// `0` (roots of `zero_factor`), labelled with their branch index.
    fn first_generation(&self, seed: Seed) -> Result<Vec<Node>> {
        let (factor, root) = match seed {
            Seed::Top => (&self.polys.top_factor, self.seed_node(seed)),
            Seed::Zero => (&self.polys.zero_factor, self.seed_node(seed)),
            _ => unreachable!("only top and zero use the factor rule"),
        };
        let all = self.child_nodes(&root, self.exec)?;
        let expected = self.params.n() as usize - 1;
        let roots = isolate_roots(
            factor,
            &BigRational::zero(),
            &self.params.top_rational(),
            expected,
            self.isolation,
            self.exec,
        )?;
        roots
            .iter()
            .map(|b| {
                let x = b.midpoint();
                let nearest = all
                    .iter()
                    .min_by(|p, q| (p.value - x).abs().total_cmp(&(q.value - x).abs()))
                    .expect("2n-1 preimages");
                let gap = (nearest.value - x).abs();
                if gap > 1e-9 {
                    return Err(Error::RootCountMismatch {
                        expected,
                        found: 0,
                        lo: x,
                        hi: nearest.value,
                    });
                }
                Ok(nearest.clone())
            })
            .collect()
    }

    fn seed_node(&self, seed: Seed) -> Node {
        let (value, exact) = match seed {
            Seed::Top => (self.params.top_value(), Some(self.params.top_rational())),
            Seed::Zero => (0.0, Some(BigRational::zero())),
            Seed::Alpha(i) => (self.forbidden.alphas[i - 1], self.exact_alphas[i - 1].clone()),
            Seed::Beta(i) => (self.forbidden.betas[i - 1], self.exact_betas[i - 1].clone()),
        };
        Node {
            value,
            exact,
            genealogy: Genealogy {
                seed,
                word: Vec::new(),
            },
        }
    }

    /// Generation `0..=depth` of the genealogy tree of `seed`. Top and zero
    /// use the factor rule for the first branch, everything else fans out
    /// through all branches. Returns one vector per generation.
    fn generations(&self, seed: Seed, depth: u32) -> Result<Vec<Vec<Node>>> {
        let mut gens = vec![vec![self.seed_node(seed)]];
        if depth == 0 {
            return Ok(gens);
        }
        let first = match seed {
            Seed::Top | Seed::Zero => self.first_generation(seed)?,
            _ => self.child_nodes(&gens[0][0], self.exec)?,
        };
        gens.push(first);
        for _ in 1..depth {
            let frontier = gens.last().expect("nonempty");
            // parallelize across nodes, keep each node's scan sequential
            let children = self
                .exec
                .try_map(frontier, |node| self.child_nodes(node, Exec::Sequential))?;
            gens.push(children.into_iter().flatten().collect());
        }
        Ok(gens)
    }

    fn pow_k(&self, e: u32) -> Result<u64> {
        (self.params.cell_count() as u64)
            .checked_pow(e)
            .ok_or_else(|| Error::InvalidRange(format!("multiplicity overflow at level {e}")))
    }

    /// `K^e (2^d - 2) + 1`.
    fn top_multiplicity(&self, e: u32) -> Result<u64> {
        let c = self.params.corners() as u64;
        self.pow_k(e)?
            .checked_mul(c - 2)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(|| Error::InvalidRange(format!("multiplicity overflow at level {e}")))
    }

    /// Full Neumann spectrum of `-Delta_m`.
    pub fn neumann_spectrum(&self, m: u32) -> Result<Spectrum> {
        let mut entries = Vec::new();
        for (l, gen) in self.generations(Seed::Top, m)?.into_iter().enumerate() {
            let mult = self.top_multiplicity(m - l as u32)?;
            entries.extend(gen.into_iter().map(|n| entry(n, mult)));
        }
        for gen in self.generations(Seed::Zero, m)? {
            entries.extend(gen.into_iter().map(|n| entry(n, 1)));
        }
        Ok(Spectrum::from_entries(entries))
    }

    /// Full Dirichlet spectrum of `-Delta_m`; empty at `m = 0`.
    pub fn dirichlet_spectrum(&self, m: u32) -> Result<Spectrum> {
        if m == 0 {
            return Ok(Spectrum::default());
        }
        let corners = self.params.corners() as u64;
        let mut entries = Vec::new();
        for (l, gen) in self.generations(Seed::Top, m - 1)?.into_iter().enumerate() {
            let mult = self.top_multiplicity(m - l as u32)? - corners;
            entries.extend(gen.into_iter().map(|n| entry(n, mult)));
        }
        for i in 1..=self.forbidden.alphas.len() {
            let gens = self.generations(Seed::Alpha(i), m - 1)?;
            let last = gens.into_iter().last().expect("generation m-1");
            entries.extend(last.into_iter().map(|n| entry(n, 1)));
        }
        for i in 1..=self.forbidden.betas.len() {
            for gen in self.generations(Seed::Beta(i), m - 1)? {
                entries.extend(gen.into_iter().map(|n| entry(n, corners - 1)));
            }
        }
        Ok(Spectrum::from_entries(entries))
    }
}

fn entry(node: Node, multiplicity: u64) -> SpectrumEntry {
    SpectrumEntry {
        value: node.value,
        multiplicity,
        genealogy: node.genealogy,
        exact: node.exact,
    }
}

/// Compares two spectra as multisets: maximum value deviation between
/// matched entries, or `None` if the entry counts or multiplicities differ.
pub fn max_deviation(a: &[(f64, u64)], b: &[(f64, u64)]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut dev: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.1 != y.1 {
            return None;
        }
        dev = dev.max((x.0 - y.0).abs());
    }
    Some(dev)
}
