//! Permutations of `{0..n-1}`, permutation groups given by generators, and
//! the group constructors used by the reductions between G-term conditions.
//!
//! Points are 0-based internally. Cycle notation at the I/O boundary is
//! 1-based, so `parse_cycles("(1 2 3)", 3)` maps `0 -> 1 -> 2 -> 0`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_GROUP_CAP: usize = 10_080;

/// A bijection on `{0..degree-1}`; entry `i` of `images` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from its image sequence, rejecting non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::NotAPermutation("degree must be positive".into()));
        }
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &p in cycle {
                if p >= degree {
                    return Err(Error::PointOutOfRange {
                        point: p + 1,
                        degree,
                    });
                }
                if used[p] {
                    return Err(Error::RepeatedPoint(p + 1));
                }
                used[p] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    /// The cycle `(0 1 .. n-1)`.
    pub fn cyclic_shift(n: usize) -> Self {
        Permutation {
            images: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// `self^e` for any integer exponent.
    pub fn pow(&self, e: i64) -> Permutation {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut result = Permutation::identity(self.degree());
        for _ in 0..e.unsigned_abs() {
            result = base.compose_unchecked(&result);
        }
        result
    }

    /// `sigma ∘ self ∘ sigma⁻¹`.
    pub fn conjugate_by(&self, sigma: &Permutation) -> Result<Permutation> {
        sigma.compose(self)?.compose(&sigma.inverse())
    }

    pub fn fixpoints(&self) -> Vec<usize> {
        (0..self.degree())
            .filter(|&i| self.images[i] == i)
            .collect()
    }

    /// All cycles including fixed points, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Orbit lengths of `⟨self⟩`, in the order of [`Permutation::cycles`].
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles().iter().map(Vec::len).collect()
    }

    /// Order of the permutation as a group element.
    pub fn order(&self) -> usize {
        self.cycle_lengths().into_iter().fold(1, lcm)
    }

    /// Parses 1-based disjoint cycle notation such as `"(1 2 3)(4 5)"`.
    ///
    /// Points may be separated by whitespace or commas. `"()"` and `"id"`
    /// denote the identity; unmentioned points are fixed.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
        if degree == 0 {
            return Err(Error::Invalid("degree must be positive".into()));
        }
        let trimmed = text.trim();
        if trimmed == "id" || trimmed.is_empty() {
            return Ok(Permutation::identity(degree));
        }
        let mut cycles = Vec::new();
        let mut rest = trimmed;
        while !rest.is_empty() {
            let Some(after_open) = rest.strip_prefix('(') else {
                return Err(Error::CycleSyntax(format!("expected `(` in {text:?}")));
            };
            let Some(close) = after_open.find(')') else {
                return Err(Error::CycleSyntax(format!("unclosed cycle in {text:?}")));
            };
            let body = &after_open[..close];
            if body.contains('(') {
                return Err(Error::CycleSyntax(format!("nested `(` in {text:?}")));
            }
            let mut cycle = Vec::new();
            for token in body.split(|c: char| c == ',' || c.is_whitespace()) {
                if token.is_empty() {
                    continue;
                }
                let point: usize = token
                    .parse()
                    .map_err(|_| Error::CycleSyntax(format!("bad point `{token}` in {text:?}")))?;
                if point == 0 || point > degree {
                    return Err(Error::PointOutOfRange { point, degree });
                }
                cycle.push(point - 1);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = after_open[close + 1..].trim_start();
        }
        Permutation::from_cycles(degree, &cycles)
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation with fixed points omitted; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}; {}]", self.degree(), self)
    }
}

/// `a ∘ b`.
pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    a.compose(b)
}

/// Partition of the points into orbits. Each orbit is sorted and the orbits are
/// ordered by least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub orbits: Vec<Vec<usize>>,
    pub fixpoints: Vec<usize>,
}

impl OrbitDecomposition {
    fn from_generators(degree: usize, gens: &[Permutation]) -> Self {
        let mut seen = vec![false; degree];
        let mut orbits = Vec::new();
        for start in 0..degree {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for g in gens {
                    let y = g.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                        queue.push_back(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        let fixpoints = orbits
            .iter()
            .filter(|o| o.len() == 1)
            .map(|o| o[0])
            .collect();
        OrbitDecomposition { orbits, fixpoints }
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

/// Orbits of the cyclic group generated by one permutation.
pub fn permutation_orbits(p: &Permutation) -> OrbitDecomposition {
    OrbitDecomposition::from_generators(p.degree(), std::slice::from_ref(p))
}

/// A permutation group given by generators. The element list is enumerated on
/// first use, sorted lexicographically by image sequence, and cached.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    cap: usize,
    elements: OnceLock<Vec<Permutation>>,
}

impl PermGroup {
    /// The group generated by `gens` (the `generate_group` operation).
    pub fn generate(gens: Vec<Permutation>) -> Result<Self> {
        let first = gens.first().ok_or(Error::EmptyGenerators)?;
        let degree = first.degree();
        if let Some(bad) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch(degree, bad.degree()));
        }
        Ok(PermGroup {
            degree,
            generators: gens,
            cap: DEFAULT_GROUP_CAP,
            elements: OnceLock::new(),
        })
    }

    /// Replaces the element-count cap used by [`PermGroup::elements`].
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        if self.elements.get().is_some_and(|e| e.len() > cap) {
            self.elements = OnceLock::new();
        }
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::generate(vec![Permutation::identity(degree)]).expect("one generator")
    }

    /// `Z_n` generated by the cyclic shift on `n` points.
    pub fn cyclic(n: usize) -> Self {
        PermGroup::generate(vec![Permutation::cyclic_shift(n)]).expect("one generator")
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = vec![Permutation::cyclic_shift(n)];
        if n > 2 {
            gens.push(Permutation::from_cycles(n, &[vec![0, 1]]).expect("valid transposition"));
        }
        PermGroup::generate(gens).expect("nonempty")
    }

    pub fn alternating(n: usize) -> Self {
        if n < 3 {
            return PermGroup::trivial(n);
        }
        let gens = (2..n)
            .map(|c| Permutation::from_cycles(n, &[vec![0, 1, c]]).expect("valid 3-cycle"))
            .collect();
        PermGroup::generate(gens).expect("nonempty")
    }

    /// Symmetry group of the regular `n`-gon acting on its `n` vertices
    /// (order `2n` for `n >= 3`), generated by the rotation `(1 2 .. n)` and
    /// the reflection `i -> n-1-i`.
    pub fn dihedral(n: usize) -> Self {
        let rotation = Permutation::cyclic_shift(n);
        let reflection =
            Permutation::from_images((0..n).rev().collect()).expect("reversal is a bijection");
        PermGroup::generate(vec![rotation, reflection]).expect("nonempty")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Generators sorted, deduplicated, identity dropped (kept only if it is
    /// the sole generator). This is the order the group file writer uses.
    pub fn canonical_generators(&self) -> Vec<Permutation> {
        let mut gens: Vec<_> = self
            .generators
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        gens.sort();
        gens.dedup();
        if gens.is_empty() {
            gens.push(Permutation::identity(self.degree));
        }
        gens
    }

    /// All elements in lexicographic order; the identity comes first.
    pub fn elements(&self) -> Result<&[Permutation]> {
        if let Some(e) = self.elements.get() {
            return Ok(e);
        }
        let computed = enumerate_closure(self.degree, &self.generators, self.cap)?;
        Ok(self.elements.get_or_init(|| computed))
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        Ok(self.index_of(p)?.is_some())
    }

    /// Position of `p` in [`PermGroup::elements`].
    pub fn index_of(&self, p: &Permutation) -> Result<Option<usize>> {
        if p.degree() != self.degree {
            return Ok(None);
        }
        Ok(self.elements()?.binary_search(p).ok())
    }

    pub fn orbits(&self) -> OrbitDecomposition {
        OrbitDecomposition::from_generators(self.degree, &self.generators)
    }

    /// Whether some point is fixed by every element.
    pub fn has_fixpoint(&self) -> bool {
        !self.orbits().fixpoints.is_empty()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().orbits.len() == 1
    }

    /// Transitive with trivial point stabilizers, i.e. transitive of order `degree`.
    pub fn is_regular(&self) -> Result<bool> {
        Ok(self.is_transitive() && self.order()? == self.degree)
    }

    /// The action on a union of orbits, relabelled so that `points[i]` becomes `i`.
    pub fn restrict_to(&self, points: &[usize]) -> Result<PermGroup> {
        let mut position = vec![usize::MAX; self.degree];
        for (i, &p) in points.iter().enumerate() {
            position[p] = i;
        }
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let mut images = Vec::with_capacity(points.len());
            for &p in points {
                let q = position[g.apply(p)];
                if q == usize::MAX {
                    return Err(Error::Invalid(format!(
                        "point set is not invariant under {g}"
                    )));
                }
                images.push(q);
            }
            gens.push(Permutation::from_images(images)?);
        }
        Ok(PermGroup::generate(gens)?.with_cap(self.cap))
    }

    /// `sigma G sigma⁻¹`.
    pub fn conjugate(&self, sigma: &Permutation) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.conjugate_by(sigma))
            .collect::<Result<Vec<_>>>()?;
        Ok(PermGroup::generate(gens)?.with_cap(self.cap))
    }
}

fn enumerate_closure(degree: usize, gens: &[Permutation], cap: usize) -> Result<Vec<Permutation>> {
    let id = Permutation::identity(degree);
    let mut seen: FxHashSet<Permutation> = FxHashSet::default();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose_unchecked(&x);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<_> = seen.into_iter().collect();
    elements.sort_unstable();
    Ok(elements)
}

/// `G × H` acting on the disjoint union: `G` on `0..|X|`, `H` on `|X|..|X|+|Y|`.
pub fn direct_product(g: &PermGroup, h: &PermGroup) -> PermGroup {
    let (dx, dy) = (g.degree(), h.degree());
    let mut gens = Vec::new();
    for a in g.generators() {
        let mut images = a.images().to_vec();
        images.extend(dx..dx + dy);
        gens.push(Permutation { images });
    }
    for b in h.generators() {
        let mut images: Vec<usize> = (0..dx).collect();
        images.extend(b.images().iter().map(|&y| y + dx));
        gens.push(Permutation { images });
    }
    PermGroup::generate(gens)
        .expect("both factors have generators")
        .with_cap(g.cap().max(h.cap()))
}

/// `G ≀ H` acting on `X × Y` with the point `(a, b)` stored at `a + b·|X|`.
///
/// A copy of each generator of `G` acts on the fibre `X × {b₀}` for one `b₀`
/// per `H`-orbit; each generator `φ` of `H` acts by `(a, b) ↦ (a, φ(b))`.
pub fn wreath_product(g: &PermGroup, h: &PermGroup) -> PermGroup {
    let (dx, dy) = (g.degree(), h.degree());
    let mut gens = Vec::new();
    for orbit in h.orbits().orbits {
        let b0 = orbit[0];
        for a in g.generators() {
            let mut images: Vec<usize> = (0..dx * dy).collect();
            for x in 0..dx {
                images[x + b0 * dx] = a.apply(x) + b0 * dx;
            }
            gens.push(Permutation { images });
        }
    }
    for phi in h.generators() {
        let mut images = vec![0; dx * dy];
        for b in 0..dy {
            for x in 0..dx {
                images[x + b * dx] = x + phi.apply(b) * dx;
            }
        }
        gens.push(Permutation { images });
    }
    PermGroup::generate(gens)
        .expect("nonempty")
        .with_cap(g.cap().max(h.cap()))
}

/// Left-regular action of `g` on its own elements: point `j` is
/// `g.elements()[j]`, and `π` maps `φ` to `π ∘ φ`.
pub fn regular_group(g: &PermGroup) -> Result<PermGroup> {
    let elements = g.elements()?;
    let mut gens = Vec::new();
    for gen in g.generators() {
        let images = elements
            .iter()
            .map(|phi| {
                let prod = gen.compose_unchecked(phi);
                elements.binary_search(&prod).expect("group is closed")
            })
            .collect();
        gens.push(Permutation { images });
    }
    Ok(PermGroup::generate(gens)?.with_cap(g.cap()))
}

/// A Sylow `p`-subgroup of `Sym(n)`: the direct product, over the base-`p`
/// digits `n = Σ aᵢ pⁱ`, of `aᵢ` copies of the iterated wreath power `S_p(pⁱ)`.
pub fn sylow_sym(p: usize, n: usize) -> Result<PermGroup> {
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    if n < 1 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let mut digits = Vec::new();
    let mut rest = n;
    while rest > 0 {
        digits.push(rest % p);
        rest /= p;
    }
    let mut blocks: Vec<PermGroup> = Vec::new();
    let mut power = PermGroup::trivial(1);
    for (i, &a) in digits.iter().enumerate() {
        if i > 0 {
            power = if i == 1 {
                PermGroup::cyclic(p)
            } else {
                wreath_product(&power, &PermGroup::cyclic(p))
            };
        }
        for _ in 0..a {
            blocks.push(power.clone());
        }
    }
    let mut iter = blocks.into_iter();
    let first = iter.next().expect("n >= 1 has a nonzero digit");
    Ok(iter.fold(first, |acc, b| direct_product(&acc, &b)))
}

/// Product of the distinct prime divisors of `m`.
pub fn radical(m: usize) -> Result<usize> {
    if m < 1 {
        return Err(Error::Invalid("radical of 0 is undefined".into()));
    }
    Ok(prime_factors(m).into_iter().product())
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn is_prime(p: usize) -> bool {
    p >= 2 && prime_factors(p) == [p]
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
