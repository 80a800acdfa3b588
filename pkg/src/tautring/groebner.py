"""Buchberger engine and ideal-theoretic operations.

Reduced Groebner bases with the Gebauer-Moeller pair criteria and normal
pair selection, plus the derived operations used downstream: normal forms,
containment, radical membership (Rabinowitsch), block elimination,
intersection, Krull dimension and quotient vector-space dimension, and
kernels of polynomial ring maps.

Everything is deterministic for fixed input; a configurable step/degree
cap turns runaway computations into a reported failure, never a wrong
answer.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from math import gcd, inf

from .polyring import (
    BlockOrder,
    Polynomial,
    QQ,
    Ring,
    RingMismatchError,
    _monomial_divides,
)


class ResourceLimitError(Exception):
    """A configured step or degree cap was hit; the result is unknown."""

    def __init__(self, kind, detail):
        super().__init__(f"resource limit exceeded ({kind}): {detail}")
        self.kind = kind


@dataclass
class Limits:
    max_degree: int = 60
    max_steps: int = 10_000_000
    steps: int = field(default=0, compare=False)

    def charge(self, n):
        self.steps += n
        if self.steps > self.max_steps:
            raise ResourceLimitError("steps", f"more than {self.max_steps} reduction steps")

    def check_degree(self, wdeg):
        if wdeg > self.max_degree:
            raise ResourceLimitError(
                "degree", f"weighted degree {wdeg} exceeds cap {self.max_degree}"
            )


DEFAULT_LIMITS = Limits()


@dataclass(frozen=True)
class Ideal:
    ring: Ring
    gens: tuple

    def __iter__(self):
        return iter(self.gens)


def ideal(ring, gens):
    """Build an Ideal, dropping zero generators."""
    out = []
    for g in gens:
        if isinstance(g, str):
            g = ring.parse(g)
        if g.ring != ring:
            raise RingMismatchError("generator from a different ring")
        if not g.is_zero():
            out.append(g)
    return Ideal(ring, tuple(out))


@dataclass(frozen=True)
class GroebnerBasis:
    ideal: Ideal
    order: object
    basis: tuple
    reduced: bool = True

    def is_unit(self):
        return len(self.basis) == 1 and self.basis[0].is_constant() and not self.basis[0].is_zero()

    def normal_form(self, p):
        return normal_form(p, self)

    def leading_monomials(self):
        return tuple(g.leading_term(self.order)[0] for g in self.basis)


# -- core reduction ---------------------------------------------------------
#
# Inside the engine a monomial is a single packed integer: 16 bits per
# variable, lowest field = first variable.  Multiplication is integer
# addition and divisibility is a subtract-and-mask test (each exponent
# stays below 2^15, so a borrow flips the guard bit of its field).
# Polynomials are handled as "reducers": (lm, negkey(lm), monic term list
# sorted descending).  Order keys are negated once and memoised, so min()
# and the reduction heap share them.

_FIELD_BITS = 16
_FIELD_MAX = (1 << (_FIELD_BITS - 1)) - 1
_FIELD_MASK = (1 << _FIELD_BITS) - 1


class _Packer:
    def __init__(self, ring, key_raw):
        self.n = ring.nvars
        self.guard = 0
        for i in range(self.n):
            self.guard |= 1 << ((i + 1) * _FIELD_BITS - 1)
        self.weights = ring.weights
        self._key_raw = key_raw
        self._negkeys = {}

    def pack(self, mon):
        v = 0
        for i, e in enumerate(mon):
            if e > _FIELD_MAX:
                raise ResourceLimitError("degree", f"exponent {e} too large to pack")
            v |= e << (i * _FIELD_BITS)
        return v

    def unpack(self, v):
        return tuple((v >> (i * _FIELD_BITS)) & _FIELD_MASK for i in range(self.n))

    def lcm(self, a, b):
        out = 0
        for i in range(self.n):
            sh = i * _FIELD_BITS
            ea = (a >> sh) & _FIELD_MASK
            eb = (b >> sh) & _FIELD_MASK
            out |= (ea if ea >= eb else eb) << sh
        return out

    def weight(self, v):
        w = 0
        for i, wi in enumerate(self.weights):
            e = (v >> (i * _FIELD_BITS)) & _FIELD_MASK
            if e and wi:
                w += e * wi
        return w

    def negkey(self, v):
        k = self._negkeys.get(v)
        if k is None:
            k = tuple(-x for x in self._key_raw(self.unpack(v)))
            self._negkeys[v] = k
        return k

    def pack_terms(self, terms_dict):
        return {self.pack(m): c for m, c in terms_dict.items()}

    def unpack_terms(self, packed):
        return {self.unpack(v): c for v, c in packed.items()}


def _gcd_all(values):
    g = 0
    for v in values:
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


def _int_terms(terms_mpq):
    """Clear denominators and strip integer content: a primitive int dict."""
    if not terms_mpq:
        return {}
    den = 1
    for c in terms_mpq.values():
        d = int(c.denominator)
        den = den // gcd(den, d) * d
    out = {m: int(c * den) for m, c in terms_mpq.items()}
    g = _gcd_all(out.values())
    if g > 1:
        out = {m: c // g for m, c in out.items()}
    return out


def _make_reducer(int_terms, pk):
    """Reducer triple (lm, negkey(lm), terms desc) with positive lead coeff."""
    terms = sorted(int_terms.items(), key=lambda t: pk.negkey(t[0]))
    if terms[0][1] < 0:
        terms = [(m, -c) for m, c in terms]
    lm = terms[0][0]
    return (lm, pk.negkey(lm), terms)


def _reduce_dict(fterms, reducers, pk, limits, top_only=False):
    """Division remainder of a packed term dict against the reducers.

    Reducer tails are primitive integer polynomials; work coefficients are
    rationals (one rational factor per reduction step), which keeps
    denominators from compounding.  The result dict may mix int and QQ.
    With top_only=True reduction stops once the leading monomial is
    irreducible (sufficient inside the Buchberger loop).
    """
    out = {}
    work = dict(fterms)
    negkey = pk.negkey
    guard = pk.guard
    heap = [(negkey(m), m) for m in work]
    heapq.heapify(heap)
    push = heapq.heappush
    pop = heapq.heappop
    steps = 0
    while heap:
        _, m = pop(heap)
        c = work.get(m)
        if not c:
            continue
        del work[m]
        hit = None
        for red in reducers:
            if not (m - red[0]) & guard:
                hit = red
                break
        if hit is None:
            out[m] = c
            if top_only:
                out.update(work)
                break
            continue
        lm, _, terms = hit
        factor = QQ(c) / terms[0][1]
        shift = m - lm
        steps += len(terms)
        if steps > 4096:
            limits.charge(steps)
            steps = 0
        for tm, tc in terms[1:]:
            mm = tm + shift
            s = work.get(mm)
            if s is None:
                work[mm] = -factor * tc
                push(heap, (negkey(mm), mm))
            else:
                s = s - factor * tc
                if s:
                    work[mm] = s
                else:
                    del work[mm]
    limits.charge(steps)
    return out


def _buchberger(seqs, ring, key_raw, limits, tail_reduce=True):
    """Reduced Groebner basis of the given term dicts; returns term dicts."""
    pk = _Packer(ring, key_raw)
    negkey = pk.negkey
    guard = pk.guard
    plcm = pk.lcm

    # interreduce the input first; [BW] p.203
    current = [pk.pack_terms(_int_terms(t)) for t in seqs if t]
    while True:
        reduced = []
        changed = False
        for i, t in enumerate(current):
            reducers = [_make_reducer(u, pk) for u in reduced + current[i + 1 :]]
            r = _int_terms(_reduce_dict(t, reducers, pk, limits))
            if r != t:
                changed = True
            if r:
                reduced.append(r)
        current = reduced
        if not changed:
            break
    if not current:
        return []

    f = []  # registry of reducers for every basis element seen

    def add_poly(terms):
        f.append(_make_reducer(terms, pk))
        return len(f) - 1

    for t in current:
        add_poly(t)

    G = []  # indices of the working basis
    CP = set()  # critical pairs (i, j)

    def update(igs, B, ih):
        # Gebauer-Moeller update; [BW] p.230
        mh = f[ih][0]
        C = list(igs)
        D = []
        while C:
            ig = C.pop()
            mg = f[ig][0]
            lcm_hg = plcm(mh, mg)
            disjoint = mh + mg == lcm_hg

            def lcm_divides(ip):
                return not (lcm_hg - plcm(mh, f[ip][0])) & guard

            if disjoint or (
                not any(lcm_divides(ip) for ip in C)
                and not any(lcm_divides(pr[1]) for pr in D)
            ):
                D.append((ih, ig))
        E = []
        for ih2, ig in D:
            mg = f[ig][0]
            if mh + mg != plcm(mh, mg):
                E.append((ih2, ig))
        B_new = set()
        for ig1, ig2 in B:
            m1, m2 = f[ig1][0], f[ig2][0]
            lcm12 = plcm(m1, m2)
            if (
                (lcm12 - mh) & guard
                or plcm(m1, mh) == lcm12
                or plcm(m2, mh) == lcm12
            ):
                B_new.add((ig1, ig2))
        B_new.update(E)
        G_new = [ig for ig in igs if (f[ig][0] - mh) & guard]
        G_new.append(ih)
        return G_new, B_new

    for i in sorted(range(len(f)), key=lambda i: negkey(f[i][0]), reverse=True):
        G, CP = update(G, CP, i)

    def pair_key(pr):
        return (negkey(plcm(f[pr[0]][0], f[pr[1]][0])), pr)

    while CP:
        ig1, ig2 = max(CP, key=pair_key)  # max negkey = smallest lcm
        CP.remove((ig1, ig2))
        lm1, _, t1 = f[ig1]
        lm2, _, t2 = f[ig2]
        lcm12 = plcm(lm1, lm2)
        limits.check_degree(pk.weight(lcm12))
        lc1 = t1[0][1]
        lc2 = t2[0][1]
        d = gcd(lc1, lc2)
        c1 = lc2 // d
        c2 = lc1 // d
        sh1 = lcm12 - lm1
        sh2 = lcm12 - lm2
        s = {}
        for m, c in t1:
            s[m + sh1] = c1 * c
        for m, c in t2:
            mm = m + sh2
            v = s.get(mm, 0) - c2 * c
            if v:
                s[mm] = v
            else:
                s.pop(mm, None)
        limits.charge(len(s))
        reducers = sorted((f[ig] for ig in G), key=lambda red: red[1], reverse=True)
        r = _int_terms(_reduce_dict(s, reducers, pk, limits, top_only=True))
        if r:
            G, CP = update(G, CP, add_poly(r))

    # minimalize: drop members whose leading monomial another divides
    G_sorted = sorted(G, key=lambda ig: negkey(f[ig][0]), reverse=True)
    minimal = []
    for ig in G_sorted:
        lm = f[ig][0]
        if not any(not (lm - f[jg][0]) & guard for jg in minimal):
            minimal.append(ig)
    result = []
    if tail_reduce:
        # tail-reduce each against the others, then scale monic over QQ
        for ig in minimal:
            reducers = [f[jg] for jg in minimal if jg != ig]
            r = _reduce_dict(dict(f[ig][2]), reducers, pk, limits)
            lm = min(r, key=negkey)
            inv = 1 / QQ(r[lm])
            result.append({m: c * inv for m, c in r.items()})
    else:
        for ig in minimal:
            r = dict(f[ig][2])
            inv = 1 / QQ(r[f[ig][0]])
            result.append({m: c * inv for m, c in r.items()})
    result.sort(key=lambda t: negkey(min(t, key=negkey)))
    return [pk.unpack_terms(t) for t in result]


def groebner_basis(I, order=None, limits=None, cache=None, reduced=True):
    """Reduced Groebner basis; deterministic for fixed ideal and order.

    reduced=False skips the final tail reduction (the leading-term ideal is
    unchanged), which the dimension computations use for speed.
    """
    ring = I.ring
    if order is None:
        order = ring.order
    limits = limits if limits is not None else Limits()
    if cache is not None and reduced:
        cached = cache.get_basis(I, order)
        if cached is not None:
            return GroebnerBasis(I, order, cached)
    key = order.key
    dicts = _buchberger(
        [dict(g.terms) for g in I.gens], ring, key, limits, tail_reduce=reduced
    )
    basis = tuple(Polynomial(ring, t, _clean=True) for t in dicts)
    gb = GroebnerBasis(I, order, basis, reduced=reduced)
    if cache is not None and reduced:
        cache.put_basis(I, order, basis)
    return gb


def normal_form(p, gb, limits=None):
    """Remainder of full multivariate division by the basis."""
    if p.ring != gb.ideal.ring:
        raise RingMismatchError("polynomial from a different ring")
    limits = limits if limits is not None else Limits()
    pk = _Packer(p.ring, gb.order.key)
    reducers = [
        _make_reducer(pk.pack_terms(_int_terms(g.terms)), pk) for g in gb.basis
    ]
    r = _reduce_dict(pk.pack_terms(p.terms), reducers, pk, limits)
    return Polynomial(
        p.ring, {m: QQ(c) for m, c in pk.unpack_terms(r).items()}, _clean=True
    )


def ideal_contains(I, J, limits=None, cache=None):
    """True iff I contains J (every generator of J reduces to zero mod I)."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals in different rings")
    gb = groebner_basis(I, limits=limits, cache=cache)
    return all(normal_form(g, gb, limits=limits).is_zero() for g in J.gens)


def ideal_equal(I, J, limits=None, cache=None):
    return ideal_contains(I, J, limits=limits, cache=cache) and ideal_contains(
        J, I, limits=limits, cache=cache
    )


def radical_member(p, I, limits=None, cache=None):
    """Rabinowitsch trick: p in sqrt(I) iff 1 in I + (1 - t*p)."""
    ring = I.ring
    if p.ring != ring:
        raise RingMismatchError("polynomial from a different ring")
    if p.is_zero():
        return True
    t = ring.fresh_name("_t")
    ext = ring.extend([t], [0])
    gens = [g.map_to(ext) for g in I.gens]
    gens.append(ext.one() - ext.var(t) * p.map_to(ext))
    gb = groebner_basis(ideal(ext, gens), limits=limits, cache=cache)
    return gb.is_unit()


def radical_equivalent(I, J, limits=None, cache=None):
    """Certify sqrt(I) == sqrt(J): I <= J and every generator of J in sqrt(I)."""
    if not ideal_contains(J, I, limits=limits, cache=cache):
        return False
    return all(radical_member(g, I, limits=limits, cache=cache) for g in J.gens)


def eliminate(I, drop, limits=None, cache=None):
    """Generators of I intersected with the subring without `drop` variables.

    The result lives in the smaller ring (same declared order of survivors).
    """
    ring = I.ring
    drop = [d for d in ring.names if d in set(drop)]
    small = ring.drop(drop)
    if not drop:
        return ideal(small, list(I.gens))
    order = BlockOrder(ring, drop)
    gb = groebner_basis(I, order=order, limits=limits, cache=cache)
    dropset = set(drop)
    kept = [g for g in gb.basis if not (g.variables() & dropset)]
    return ideal(small, [g.map_to(small) for g in kept])


def intersect(I, J, limits=None, cache=None):
    """I ∩ J via eliminating t from t*I + (1-t)*J."""
    ring = I.ring
    if J.ring != ring:
        raise RingMismatchError("ideals in different rings")
    t = ring.fresh_name("_t")
    ext = Ring((t,) + ring.names, (0,) + ring.weights)
    tv = ext.var(t)
    gens = [tv * g.map_to(ext) for g in I.gens]
    gens += [(ext.one() - tv) * g.map_to(ext) for g in J.gens]
    K = eliminate(ideal(ext, gens), [t], limits=limits, cache=cache)
    return ideal(ring, [g.map_to(ring) for g in K.gens])


def _lead_supports(gb):
    supports = set()
    for g in gb.basis:
        m, _ = g.leading_term(gb.order)
        supports.add(frozenset(i for i, e in enumerate(m) if e))
    minimal = []
    for s in sorted(supports, key=lambda s: (len(s), sorted(s))):
        if not any(t <= s for t in minimal):
            minimal.append(s)
    return minimal


def _as_basis(I, limits=None, cache=None, reduced=True):
    if isinstance(I, GroebnerBasis):
        return I
    return groebner_basis(I, limits=limits, cache=cache, reduced=reduced)


def krull_dimension(I, limits=None, cache=None):
    """Krull dimension of ring/I via independent sets mod leading terms.

    Accepts an Ideal or a precomputed GroebnerBasis; only the leading-term
    ideal matters, so an untail-reduced basis is computed when needed.
    """
    gb = _as_basis(I, limits=limits, cache=cache, reduced=False)
    if gb.is_unit():
        raise ValueError("empty variety: ideal is the unit ideal")
    supports = _lead_supports(gb)
    n = gb.ideal.ring.nvars
    best = 0
    # DFS over variable subsets; a set is dependent once it covers a support
    counts = [0] * len(supports)
    sizes = [len(s) for s in supports]
    member = [[j for j, s in enumerate(supports) if i in s] for i in range(n)]

    def dfs(i, chosen):
        nonlocal best
        if chosen + (n - i) <= best:
            return
        if i == n:
            best = max(best, chosen)
            return
        # include i if no support becomes fully contained
        can = True
        for j in member[i]:
            if counts[j] + 1 == sizes[j]:
                can = False
                break
        if can:
            for j in member[i]:
                counts[j] += 1
            dfs(i + 1, chosen + 1)
            for j in member[i]:
                counts[j] -= 1
        dfs(i + 1, chosen)

    if any(not s for s in supports):  # constant leading term cannot happen here
        raise ValueError("empty variety: ideal is the unit ideal")
    dfs(0, 0)
    return best


def codimension(I, limits=None, cache=None):
    ring = I.ideal.ring if isinstance(I, GroebnerBasis) else I.ring
    return ring.nvars - krull_dimension(I, limits=limits, cache=cache)


def vector_space_dimension(I, limits=None, cache=None):
    """Number of standard monomials of ring/I, or math.inf when infinite."""
    gb = _as_basis(I, limits=limits, cache=cache, reduced=False)
    if gb.is_unit():
        return 0
    n = gb.ideal.ring.nvars
    lms = gb.leading_monomials()
    bounds = [None] * n
    for m in lms:
        support = [i for i, e in enumerate(m) if e]
        if len(support) == 1:
            i = support[0]
            if bounds[i] is None or m[i] < bounds[i]:
                bounds[i] = m[i]
    if any(b is None for b in bounds):
        return inf
    # plain enumeration with a divisibility filter; the pure-power bounds keep it small
    from itertools import product

    def standard(monomial):
        return not any(_monomial_divides(lm, monomial) for lm in lms)

    return sum(1 for mon in product(*[range(b) for b in bounds]) if standard(mon))


def ring_map_kernel(source, images, limits=None, cache=None):
    """Kernel of the ring map source -> target sending each variable to its image.

    `images` maps every source variable name to a Polynomial in one common
    target ring; target variables (including any family parameter) are
    eliminated from the graph ideal.
    """
    missing = [n for n in source.names if n not in images]
    if missing:
        raise ValueError(f"no image for variables {missing!r}")
    targets = {img.ring for img in images.values()}
    if len(targets) != 1:
        raise RingMismatchError("images live in different rings")
    target = targets.pop()
    clash = set(source.names) & set(target.names)
    if clash:
        raise ValueError(f"source and target share names {sorted(clash)!r}")
    big = Ring(target.names + source.names, target.weights + source.weights)
    gens = [big.var(n) - images[n].map_to(big) for n in source.names]
    K = eliminate(ideal(big, gens), list(target.names), limits=limits, cache=cache)
    return ideal(source, [g.map_to(source) for g in K.gens])
