"""The kappa-class calculus for a fibre manifold.

A KappaRing holds the point classes e, p_1..p_{n-1} together with one
variable per kappa symbol up to a class-degree bound.  Degree-0 kappa
classes are the characteristic numbers of the fibre (kappa_e = euler
characteristic; for 4-manifolds kappa_{p1} = 3*signature), and negative
ones vanish; fibre integration, trace-relation binding, polarization,
reduction modulo decomposables and the relation-ideal pipeline are built
on top of that.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import genus, groebner, symchar
from .polyring import Polynomial, QQ, Ring


class KappaError(ValueError):
    """Hypothesis violation or out-of-range kappa symbol."""


@dataclass(frozen=True)
class ManifoldData:
    """Numerical invariants of the fibre: dimension, Euler characteristic,
    signature, cohomology dimensions, and the degree-2n characteristic
    numbers (as a map from class-monomial text to rationals)."""

    name: str
    dim: int
    euler: int
    signature: int
    h_even: int
    h_odd: int
    char_numbers: tuple  # ((monomial-text, QQ), ...) normalized in __post_init__

    def __post_init__(self):
        if self.dim % 2 or self.dim < 4:
            raise KappaError("fibre dimension must be even and at least 4")
        if self.h_even < 1:
            raise KappaError("h_even must be at least 1")
        if self.euler != self.h_even - self.h_odd:
            raise KappaError("euler characteristic must equal h_even - h_odd")
        chars = dict(self.char_numbers)
        chars.setdefault("e", QQ(self.euler))
        if self.dim == 4:
            chars.setdefault("p1", QQ(3 * self.signature))
        if chars["e"] != self.euler:
            raise KappaError("char number of e must be the euler characteristic")
        if self.dim == 4 and chars["p1"] != 3 * self.signature:
            raise KappaError("char number of p1 must be 3*signature")
        object.__setattr__(
            self, "char_numbers", tuple(sorted((k, QQ(v)) for k, v in chars.items()))
        )

    @property
    def total_h(self):
        return self.h_even + self.h_odd


def manifold(name, dim, euler, signature, h_even, h_odd, char_numbers=()):
    if not isinstance(char_numbers, (tuple, list)):
        char_numbers = tuple(char_numbers.items())
    return ManifoldData(name, dim, euler, signature, h_even, h_odd, tuple(char_numbers))


CP2 = manifold("CP2", 4, 3, 1, 3, 0)
S2S2 = manifold("S2xS2", 4, 4, 0, 4, 0)


def kappa_name(base_names, exps):
    """Stable variable name for the kappa class of a base-class monomial."""
    parts = []
    for name, e in zip(base_names, exps):
        if not e:
            continue
        if name == "e":
            parts.append("e" if e == 1 else f"e{e}")
        else:
            parts.append(name if e == 1 else f"{name}_{e}")
    return "k" + "".join(parts)


@dataclass(frozen=True)
class Relation:
    """A tautological relation with its provenance tag."""

    poly: Polynomial
    source: str  # trace | polarized | hirzebruch | grigoriev | pushed-forward

    def render(self):
        return self.poly.render()


class KappaRing:
    """Rings of kappa symbols for a fibre manifold, with a class-degree bound.

    Kappa variables exist for every base-class monomial of cohomological
    degree in (dim, dim*(degree_bound+1)]; lower degrees resolve to
    characteristic numbers (degree dim) or zero (below)."""

    def __init__(self, manifold_data, degree_bound=9):
        if degree_bound < 2:
            raise KappaError("degree bound must be at least 2")
        self.manifold = manifold_data
        self.degree_bound = degree_bound
        dim = manifold_data.dim
        n = dim // 2
        base_names = ["e"] + [f"p{i}" for i in range(1, n)]
        base_weights = [dim] + [4 * i for i in range(1, n)]
        self.base_ring = Ring(base_names, base_weights)
        self._char = {}
        for text, value in manifold_data.char_numbers:
            mono = self.base_ring.parse(text)
            (m, c), = mono.terms.items()
            if c != 1:
                raise KappaError(f"char number key {text!r} is not a monomial")
            if self.base_ring.monomial_weight(m) != dim:
                raise KappaError(f"char number key {text!r} does not have degree {dim}")
            self._char[m] = QQ(value)
        # enumerate kappa exponent vectors by weight, then e-power descending
        max_w = dim * (degree_bound + 1)
        exps = []

        def walk(i, acc, w):
            if i == len(base_names):
                if w > dim:
                    exps.append(tuple(acc))
                return
            e = 0
            while w + e * base_weights[i] <= max_w:
                walk(i + 1, acc + [e], w + e * base_weights[i])
                e += 1

        walk(0, [], 0)
        exps.sort(key=lambda m: (self.base_ring.monomial_weight(m), tuple(-x for x in m)))
        self.kappa_exps = tuple(exps)
        self.kappa_names = tuple(kappa_name(base_names, m) for m in exps)
        self._kappa_index = {m: i for i, m in enumerate(exps)}
        names = list(base_names) + list(self.kappa_names)
        weights = list(base_weights) + [
            self.base_ring.monomial_weight(m) - dim for m in exps
        ]
        self.point_ring = Ring(names, weights)
        self._nbase = len(base_names)

    # -- symbol resolution -------------------------------------------------

    def kappa_class_poly(self, base_exps, ring=None):
        """kappa of the base monomial, resolved in the point ring:
        zero below fibre degree, a characteristic number at it, else the
        kappa variable."""
        ring = ring or self.point_ring
        w = self.base_ring.monomial_weight(base_exps)
        dim = self.manifold.dim
        if w == 0 or w < dim:
            return ring.zero()
        if w == dim:
            try:
                return ring.const(self._char[tuple(base_exps)])
            except KeyError:
                name = kappa_name(self.base_ring.names, base_exps)
                raise KappaError(
                    f"characteristic number for {name} not supplied"
                ) from None
        idx = self._kappa_index.get(tuple(base_exps))
        if idx is None:
            name = kappa_name(self.base_ring.names, base_exps)
            raise KappaError(f"kappa symbol {name} exceeds the degree bound")
        return ring.var(self.kappa_names[idx])

    def lift_class(self, p, ring=None):
        """Embed a base-ring polynomial into the point ring."""
        return p.map_to(ring or self.point_ring)

    def generator_name(self, text):
        """Variable name for a generator given as base-class monomial text:
        the point class itself at degree <= dim, else the kappa symbol."""
        mono = self.base_ring.parse(text)
        (m, c), = mono.terms.items()
        if c != 1:
            raise KappaError(f"generator {text!r} is not a monomial")
        w = self.base_ring.monomial_weight(m)
        if w <= self.manifold.dim:
            if sum(1 for e in m if e) != 1 or sum(m) != 1:
                raise KappaError(f"generator {text!r} is a constant kappa class")
            return self.base_ring.names[next(i for i, e in enumerate(m) if e)]
        return kappa_name(self.base_ring.names, m)

    # -- operations ----------------------------------------------------------

    def fibre_integrate(self, p):
        """R*(W)-linear pushforward: split each monomial into its base-class
        part and the rest; the base part becomes a kappa symbol (or a
        characteristic number, or zero) and the weight drops by the fibre
        dimension."""
        ring = p.ring
        nb = self._nbase
        base_idx = [ring.index(n) for n in self.base_ring.names]
        base_set = set(base_idx)
        out = ring.zero()
        for m, c in p.terms.items():
            base_part = tuple(m[i] for i in base_idx)
            passenger = tuple(0 if i in base_set else e for i, e in enumerate(m))
            k = self.kappa_class_poly(base_part, ring)
            if k.is_zero():
                continue
            out = out + ring.monomial(passenger, c) * k
        return out

    def kappa_degree(self, mon, ring=None):
        """Total exponent of kappa variables in a point-ring monomial."""
        ring = ring or self.point_ring
        kset = set(self.kappa_names)
        return sum(e for i, e in enumerate(mon) if e and ring.names[i] in kset)

    def decomposable_reduce(self, p):
        """Drop terms that are products of two or more kappa variables."""
        ring = p.ring
        keep = {}
        for m, c in p.terms.items():
            if self.kappa_degree(m, ring) < 2:
                keep[m] = c
        return Polynomial(ring, keep, _clean=True)

    def bind_trace_relation(self, c, rel=None, ring=None, source="trace"):
        """Substitute z -> c and t_i -> kappa_{e*c^i} in a trace relation.

        Requires the fibre cohomology concentrated in even degrees; the
        relation degree must be dim_Q H*(W).  `c` is a polynomial in the
        point classes (given in `ring`, default the point ring)."""
        if self.manifold.h_odd != 0:
            raise KappaError("trace binding needs cohomology in even degrees only")
        k = self.manifold.total_h
        if rel is None:
            rel = symchar.trace_relation(k)
        if rel.degree != k:
            raise KappaError(
                f"relation degree {rel.degree} != dim H*(W) = {k}"
            )
        ring = ring or self.point_ring
        if isinstance(c, str):
            c = self.base_ring.parse(c).map_to(ring)
        if c.is_zero() or not c.is_homogeneous() or c.weighted_degree() <= 0:
            raise KappaError("bound class must be homogeneous of positive degree")
        e = ring.var("e")
        cpow = [ring.one()]
        for _ in range(k):
            cpow.append(cpow[-1] * c)
        bindings = {}
        for i in range(1, k + 1):
            bindings[f"t{i}"] = self.fibre_integrate(e * cpow[i])
        acc = ring.zero()
        for j, coeff in enumerate(rel.coeffs):
            acc = acc + coeff.substitute(bindings, into=ring) * cpow[j]
        return Relation(acc, source)

    def polarize(self, rel=None):
        """Bind c = e + A*p1, expand and collect powers of the weight-0
        polarization variable A; one relation per power of A, in order."""
        if self.manifold.dim != 4:
            raise KappaError("polarization is implemented for 4-manifolds")
        k = self.manifold.total_h
        if rel is None:
            rel = symchar.trace_relation(k)
        aring = self.point_ring.extend(["A"], [0])
        c = aring.var("e") + aring.var("A") * aring.var("p1")
        bound = self.bind_trace_relation(c, rel, ring=aring)
        out = []
        by_power = dict()
        for exp, coeff in bound.poly.collect("A"):
            by_power[exp] = coeff.map_to(self.point_ring)
        for power in range(k + 1):
            poly = by_power.get(power, self.point_ring.zero())
            out.append(Relation(poly, "polarized"))
        return out

    def grigoriev_relation(self, class_poly):
        """(p - kappa_{ep}/chi - e*kappa_p/chi + kappa_{e^2}*kappa_p/chi^2)^{d+1}
        for an even-degree class p, d = dim H^odd; needs chi(W) != 0."""
        chi = self.manifold.euler
        if chi == 0:
            raise KappaError("Grigoriev-type relation needs non-zero euler characteristic")
        ring = self.point_ring
        if isinstance(class_poly, str):
            class_poly = self.base_ring.parse(class_poly)
        p = class_poly.map_to(ring)
        if p.weighted_degree() % 2:
            raise KappaError("class must have even degree")
        e = ring.var("e")
        kp = self.fibre_integrate(p)
        kep = self.fibre_integrate(e * p)
        ke2 = self.kappa_class_poly(
            tuple(2 if name == "e" else 0 for name in self.base_ring.names)
        )
        chi = QQ(chi)
        body = p - kep * (1 / chi) - e * kp * (1 / chi) + ke2 * kp * (1 / chi**2)
        d = self.manifold.h_odd
        return Relation(body ** (d + 1), "grigoriev")

    # -- the relation-ideal pipeline -----------------------------------------

    def base_monomials_up_to(self, max_class_degree):
        """Base-class monomials (as point-ring polynomials) of class degree
        0..max, in a stable order."""
        out = []

        def walk(i, acc, depth):
            if i == self._nbase:
                out.append(tuple(acc))
                return
            for e in range(max_class_degree - depth + 1):
                walk(i + 1, acc + [e], depth + e)

        walk(0, [], 0)
        out.sort(key=lambda m: (sum(m), tuple(-x for x in m)))
        full = []
        for m in out:
            mono = [0] * self.point_ring.nvars
            for i, e in enumerate(m):
                mono[i] = e
            full.append(self.point_ring.monomial(tuple(mono)))
        return full

    def relation_ideal(
        self,
        generators,
        sources=("trace", "hirzebruch"),
        limits=None,
        cache=None,
    ):
        """The ideal of relations among the given generators.

        Pipeline: polarized trace relations, multiplied by base monomials
        and fibre-integrated (kept un-integrated too when point classes are
        among the generators), plus the Hirzebruch relations; every other
        kappa symbol is eliminated, linear-substitution first and Groebner
        block elimination for whatever survives."""
        gen_names = [self.generator_name(g) for g in generators]
        if len(set(gen_names)) != len(gen_names):
            raise KappaError("duplicate generators")
        point_mode = any(n in self.base_ring.names for n in gen_names)
        k = self.manifold.total_h
        rels = []
        seed = []
        if "trace" in sources:
            seed.extend(r.poly for r in self.polarize())
        if "grigoriev" in sources:
            seed.append(self.grigoriev_relation("p1").poly)
        if seed:
            multipliers = self.base_monomials_up_to(self.degree_bound - k)
            for rel in seed:
                if rel.is_zero():
                    continue
                for mono in multipliers:
                    pushed = self.fibre_integrate(mono * rel)
                    if not pushed.is_zero():
                        rels.append(pushed)
            if point_mode:
                rels.extend(r for r in seed if not r.is_zero())
        if "hirzebruch" in sources:
            rels.extend(r.poly for r in genus.hirzebruch_relations(self))
        rels = _dedupe(rels)
        keep = set(gen_names)
        rels, leftover = _substitution_eliminate(rels, keep, self)
        target = self.point_ring.subring(gen_names)
        if leftover:
            present = sorted(
                {v for r in rels for v in r.variables()},
                key=self.point_ring.index,
            )
            elim_order = [v for v in present if v not in keep]
            small = self.point_ring.subring(elim_order + [v for v in present if v in keep])
            small_ideal = groebner.ideal(small, [r.map_to(small) for r in rels])
            elim = groebner.eliminate(small_ideal, elim_order, limits=limits, cache=cache)
            gens = [g.map_to(target) for g in elim.gens]
        else:
            gens = [r.map_to(target) for r in rels if not r.is_zero()]
        gens = _dedupe(genus._integer_normalize_last_positive(g) for g in gens)
        gens.sort(key=lambda g: (g.weighted_degree(), g.render()))
        return groebner.ideal(target, gens)

    def disc_ideal(self, point_ideal):
        """Set the point classes to zero: the ideal for the disc-fixing ring."""
        zero = {n: QQ(0) for n in self.base_ring.names if n in point_ideal.ring.names}
        kept = [n for n in point_ideal.ring.names if n not in zero]
        target = point_ideal.ring.subring(kept)
        gens = _dedupe(
            g.substitute(zero).map_to(target)
            for g in point_ideal.gens
        )
        gens = [g for g in gens if not g.is_zero()]
        gens.sort(key=lambda g: (g.weighted_degree(), g.render()))
        return groebner.ideal(target, gens)


def _dedupe(polys):
    seen = set()
    out = []
    for p in polys:
        if p.is_zero():
            continue
        key = frozenset(p.monic().terms.items())
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _substitution_eliminate(rels, keep, kring):
    """Iteratively solve relations that are linear (with constant
    coefficient) in a single eliminable kappa variable and substitute.

    Returns (remaining relations, set of eliminable variables still
    present).  Mirrors the hand derivation: highest-weight symbols are
    solved first, which keeps the substituted expressions small."""
    ring = kring.point_ring
    rels = [r for r in rels if not r.is_zero()]
    kappa_set = set(kring.kappa_names)

    def eliminable(name):
        return name in kappa_set and name not in keep

    while True:
        candidates = {}  # var name -> (rel index, constant coeff)
        for idx, rel in enumerate(rels):
            for name in rel.variables():
                if not eliminable(name) or name in candidates:
                    continue
                vi = ring.index(name)
                hits = [(m, c) for m, c in rel.terms.items() if m[vi]]
                if len(hits) != 1:
                    continue
                m, c = hits[0]
                if m[vi] == 1 and sum(m) == 1:
                    candidates[name] = (idx, c)
        if not candidates:
            break
        name = max(
            candidates,
            key=lambda n: (ring.weights[ring.index(n)], n),
        )
        idx, coeff = candidates[name]
        rel = rels.pop(idx)
        vi = ring.index(name)
        lead = ring.monomial(tuple(1 if i == vi else 0 for i in range(ring.nvars)), coeff)
        expr = (rel - lead) * (QQ(-1) / coeff)
        rels = _dedupe(
            r.substitute({name: expr}) if name in r.variables() else r for r in rels
        )
    leftover = set()
    for r in rels:
        for name in r.variables():
            if eliminable(name):
                leftover.add(name)
    return rels, leftover
