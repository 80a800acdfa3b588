"""Sparse multivariate polynomials with exact rational coefficients.

A ring is an ordered table of named variables, each carrying a fixed
non-negative integer weight (the cohomological degree).  Polynomials are
immutable dicts mapping exponent tuples to non-zero rationals; all
arithmetic is exact.  The canonical text format renders terms in
descending monomial order and round-trips through ``parse``.
"""

from __future__ import annotations

from fractions import Fraction

try:  # gmpy2.mpq is a drop-in Fraction replacement, ~5x faster in Buchberger
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    QQ = Fraction

QZERO = QQ(0)
QONE = QQ(1)

Monomial = tuple  # one exponent per ring variable


class PolyError(Exception):
    pass


class RingMismatchError(PolyError):
    pass


class UnknownVariableError(PolyError):
    pass


class InexactDivisionError(PolyError):
    """Raised when exact_divide has a non-zero remainder."""


class ParseError(PolyError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class Ring:
    """Ordered variable table with per-variable cohomological weights."""

    __slots__ = ("names", "weights", "_index", "_order", "_hash")

    def __init__(self, names, weights=None):
        names = tuple(names)
        if weights is None:
            weights = (1,) * len(names)
        weights = tuple(int(w) for w in weights)
        if len(weights) != len(names):
            raise ValueError("one weight per variable required")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be non-negative")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self.weights = weights
        self._index = {n: i for i, n in enumerate(names)}
        self._order = None
        self._hash = hash((names, weights))

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.names == other.names
            and self.weights == other.weights
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Ring({self.header()!r})"

    @property
    def nvars(self):
        return len(self.names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    @property
    def order(self):
        """Declared render order: graded (by weight) reverse lexicographic."""
        if self._order is None:
            self._order = GrevLex(self)
        return self._order

    def monomial_weight(self, mon):
        w = self.weights
        return sum(e * w[i] for i, e in enumerate(mon) if e)

    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return Polynomial(self, {(0,) * self.nvars: QONE})

    def const(self, c):
        c = QQ(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name):
        mon = [0] * self.nvars
        mon[self.index(name)] = 1
        return Polynomial(self, {tuple(mon): QONE})

    def monomial(self, mon, coeff=QONE):
        coeff = QQ(coeff)
        if coeff == 0:
            return self.zero()
        return Polynomial(self, {tuple(mon): coeff})

    def extend(self, names, weights):
        return Ring(self.names + tuple(names), self.weights + tuple(weights))

    def drop(self, names):
        gone = set(names)
        keep = [(n, w) for n, w in zip(self.names, self.weights) if n not in gone]
        return Ring([n for n, _ in keep], [w for _, w in keep])

    def subring(self, names):
        return Ring(tuple(names), tuple(self.weights[self.index(n)] for n in names))

    def fresh_name(self, stem):
        if stem not in self._index:
            return stem
        i = 0
        while f"{stem}{i}" in self._index:
            i += 1
        return f"{stem}{i}"

    def header(self):
        """Ring header line for the ideal file format."""
        return "ring " + " ".join(f"{n}:{w}" for n, w in zip(self.names, self.weights))

    @staticmethod
    def from_header(line):
        line = line.strip()
        if not line.startswith("ring"):
            raise ParseError("expected ring header", 0)
        names, weights = [], []
        for field in line[4:].replace(",", " ").split():
            if ":" not in field:
                raise ParseError(f"bad ring field {field!r}", 0)
            n, w = field.split(":", 1)
            names.append(n)
            weights.append(int(w))
        return Ring(names, weights)

    def parse(self, text):
        return parse(text, self)


class MonomialOrder:
    """Total multiplicative well-founded order; key() gives a sortable tuple."""

    kind = "abstract"

    def key(self, mon):
        raise NotImplementedError

    def descriptor(self):
        raise NotImplementedError

    def sort_terms(self, terms):
        """Terms of a polynomial dict, descending."""
        key = self.key
        return sorted(terms.items(), key=lambda t: key(t[0]), reverse=True)


class GrevLex(MonomialOrder):
    """Graded by cohomological weight, then total degree, then reverse lex.

    The total-degree tier keeps weight-0 scaffolding variables above 1, so
    this is a monomial order on any of our rings.
    """

    kind = "grevlex"

    def __init__(self, ring):
        self.ring = ring
        self._weights = ring.weights

    def key(self, mon):
        w = self._weights
        wd = 0
        td = 0
        for i, e in enumerate(mon):
            if e:
                wd += e * w[i]
                td += e
        return (wd, td) + tuple(-e for e in reversed(mon))

    def descriptor(self):
        return "grevlex"


class Lex(MonomialOrder):
    """Plain lexicographic order by declared variable order."""

    kind = "lex"

    def __init__(self, ring):
        self.ring = ring

    def key(self, mon):
        return tuple(mon)

    def descriptor(self):
        return "lex"


class BlockOrder(MonomialOrder):
    """Elimination order: grevlex on a front variable block, then on the rest."""

    kind = "block"

    def __init__(self, ring, front_names):
        self.ring = ring
        self.front_names = tuple(front_names)
        front = set(self.front_names)
        unknown = front - set(ring.names)
        if unknown:
            raise UnknownVariableError(f"unknown variables {sorted(unknown)!r}")
        self._front_idx = tuple(i for i, n in enumerate(ring.names) if n in front)
        self._rest_idx = tuple(i for i, n in enumerate(ring.names) if n not in front)
        w = ring.weights
        self._front_w = tuple(w[i] for i in self._front_idx)
        self._rest_w = tuple(w[i] for i in self._rest_idx)

    def _block_key(self, mon, idx, weights):
        wd = 0
        td = 0
        exps = []
        for j, i in enumerate(idx):
            e = mon[i]
            exps.append(e)
            if e:
                wd += e * weights[j]
                td += e
        return (wd, td) + tuple(-e for e in reversed(exps))

    def key(self, mon):
        return self._block_key(mon, self._front_idx, self._front_w) + self._block_key(
            mon, self._rest_idx, self._rest_w
        )

    def descriptor(self):
        return "block[" + ",".join(self.front_names) + "]"


def _monomial_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _monomial_divides(a, b):
    """True if monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


class Polynomial:
    """Immutable sparse polynomial over a Ring; do not mutate .terms."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms, *, _clean=False):
        self.ring = ring
        if _clean:
            self.terms = terms
        else:
            self.terms = {m: QQ(c) for m, c in terms.items() if c != 0}

    # -- basic predicates -------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(m) for m in self.terms)

    def constant_value(self):
        zero_mon = (0,) * self.ring.nvars
        for m, c in self.terms.items():
            if m != zero_mon:
                raise PolyError("not a constant polynomial")
        return self.terms.get(zero_mon, QZERO)

    def variables(self):
        """Names of variables that actually occur."""
        seen = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    seen.add(i)
        return {self.ring.names[i] for i in seen}

    def weighted_degree(self):
        """Max cohomological weight over terms; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        mw = self.ring.monomial_weight
        return max(mw(m) for m in self.terms)

    def is_homogeneous(self):
        if not self.terms:
            return True
        mw = self.ring.monomial_weight
        it = iter(self.terms)
        w0 = mw(next(it))
        return all(mw(m) == w0 for m in it)

    def degree_in(self, name):
        i = self.ring.index(name)
        return max((m[i] for m in self.terms), default=0)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError("polynomials from different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(
            self.ring, {m: -c for m, c in self.terms.items()}, _clean=True
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = QQ(other)
            if c == 0:
                return self.ring.zero()
            return Polynomial(
                self.ring, {m: c * v for m, v in self.terms.items()}, _clean=True
            )
        if other.ring != self.ring:
            raise RingMismatchError("polynomials from different rings")
        if not self.terms or not other.terms:
            return self.ring.zero()
        a, b = self.terms, other.terms
        if len(a) < len(b):  # iterate the smaller outer loop
            a, b = b, a
        out = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                c = ca * cb
                s = out.get(m)
                if s is None:
                    out[m] = c
                else:
                    s = s + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return Polynomial(self.ring, out, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other) is type(QONE):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self):
        return f"<{self.render()}>"

    # -- structural operations ----------------------------------------------

    def leading_term(self, order=None):
        """(monomial, coefficient) maximal under the order."""
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        key = (order or self.ring.order).key
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def monic(self, order=None):
        if not self.terms:
            return self
        _, c = self.leading_term(order)
        if c == 1:
            return self
        inv = 1 / c
        return Polynomial(
            self.ring, {m: v * inv for m, v in self.terms.items()}, _clean=True
        )

    def exact_divide(self, divisor):
        """Quotient q with self == q * divisor, else InexactDivisionError."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self
        order = self.ring.order
        dm, dc = divisor.leading_term(order)
        dtail = [(m, c) for m, c in divisor.terms.items() if m != dm]
        rem = dict(self.terms)
        q = {}
        key = order.key
        while rem:
            m = max(rem, key=key)
            c = rem.pop(m)
            if not _monomial_divides(dm, m):
                raise InexactDivisionError("not divisible")
            shift = tuple(x - y for x, y in zip(m, dm))
            qc = c / dc
            q[shift] = qc
            for tm, tc in dtail:
                mm = tuple(x + y for x, y in zip(tm, shift))
                s = rem.get(mm, QZERO) - qc * tc
                if s:
                    rem[mm] = s
                else:
                    rem.pop(mm, None)
        return Polynomial(self.ring, q, _clean=True)

    def substitute(self, bindings, into=None):
        """Simultaneous substitution; unbound variables map by name.

        bindings maps variable names to polynomials (or rationals) in the
        target ring; the result lives in `into` (default: this ring).
        """
        target = into or self.ring
        images = {}
        for name, val in bindings.items():
            i = self.ring.index(name)
            images[i] = val if isinstance(val, Polynomial) else target.const(val)
            if images[i].ring != target:
                raise RingMismatchError("binding image in wrong ring")
        carry = {}  # unbound source index -> target index
        for i, name in enumerate(self.ring.names):
            if i not in images:
                carry[i] = target.index(name) if target != self.ring else i
        powers = {i: {0: target.one()} for i in images}
        result = target.zero()
        nt = target.nvars
        for m, c in self.terms.items():
            passive = [0] * nt
            factor = None
            for i, e in enumerate(m):
                if not e:
                    continue
                if i in carry:
                    passive[carry[i]] += e
                else:
                    cache = powers[i]
                    if e not in cache:
                        p = max(cache)
                        acc = cache[p]
                        while p < e:
                            acc = acc * images[i]
                            p += 1
                            cache[p] = acc
                    factor = cache[e] if factor is None else factor * cache[e]
            term = target.monomial(tuple(passive), c)
            result = result + (term if factor is None else term * factor)
        return result

    def collect(self, name):
        """[(exponent, coefficient)] with coefficients free of the variable,
        sorted by exponent ascending."""
        i = self.ring.index(name)
        buckets = {}
        for m, c in self.terms.items():
            e = m[i]
            rest = m[:i] + (0,) + m[i + 1 :]
            buckets.setdefault(e, {})[rest] = c
        return [
            (e, Polynomial(self.ring, buckets[e], _clean=True))
            for e in sorted(buckets)
        ]

    def map_to(self, ring):
        """Re-express in another ring containing all used variables by name."""
        if ring == self.ring:
            return self
        idx = [None] * self.ring.nvars
        for i, name in enumerate(self.ring.names):
            idx[i] = ring._index.get(name)
        out = {}
        for m, c in self.terms.items():
            mm = [0] * ring.nvars
            for i, e in enumerate(m):
                if e:
                    if idx[i] is None:
                        raise UnknownVariableError(
                            f"variable {self.ring.names[i]!r} not in target ring"
                        )
                    mm[idx[i]] = e
            out[tuple(mm)] = c
        return Polynomial(ring, out, _clean=True)

    def evaluate(self, values):
        """Numeric value at a point given as {name: rational}."""
        total = QZERO
        point = [QQ(values[n]) for n in self.ring.names]
        for m, c in self.terms.items():
            v = c
            for i, e in enumerate(m):
                if e:
                    v = v * point[i] ** e
            total += v
        return total

    # -- text format ---------------------------------------------------------

    def render(self, order=None):
        """Canonical text: descending declared order, explicit signs."""
        if not self.terms:
            return "0"
        order = order or self.ring.order
        names = self.ring.names
        chunks = []
        for m, c in order.sort_terms(self.terms):
            sign = "-" if c < 0 else "+"
            ac = -c if c < 0 else c
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(names[i])
                elif e > 1:
                    factors.append(f"{names[i]}^{e}")
            if not factors or ac != 1:
                factors.insert(0, str(ac))
            chunks.append((sign, "*".join(factors)))
        first_sign, first_body = chunks[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in chunks[1:]:
            text += sign + body
        return text


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*^/":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    return tokens


def parse(text, ring):
    """Parse the canonical polynomial grammar into a Polynomial."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial", 0)
    pos = 0
    nvars = ring.nvars
    total = {}

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None, len(text))

    def take(kind):
        nonlocal pos
        tk, tv, ti = peek()
        if tk != kind:
            raise ParseError(f"expected {kind}, found {tv!r}", ti)
        pos += 1
        return tv, ti

    def parse_factor(mon):
        name, ti = take("name")
        try:
            i = ring.index(name)
        except UnknownVariableError:
            raise ParseError(f"unknown variable {name!r}", ti) from None
        e = 1
        if peek()[0] == "^":
            take("^")
            v, vi = take("int")
            e = int(v)
            if e <= 0:
                raise ParseError("exponent must be positive", vi)
        mon[i] += e

    while pos < len(tokens):
        sign = 1
        tk, tv, ti = peek()
        if tk in ("+", "-"):
            sign = -1 if tk == "-" else 1
            pos += 1
        elif total:
            raise ParseError("missing sign between terms", ti)
        coeff = QONE
        mon = [0] * nvars
        tk, tv, ti = peek()
        if tk == "int":
            num, _ = take("int")
            coeff = QQ(int(num))
            if peek()[0] == "/":
                take("/")
                den, di = take("int")
                if int(den) <= 0:
                    raise ParseError("denominator must be positive", di)
                coeff = coeff / QQ(int(den))
            if peek()[0] == "*":
                take("*")
                parse_factor(mon)
                while peek()[0] == "*":
                    take("*")
                    parse_factor(mon)
        elif tk == "name":
            parse_factor(mon)
            while peek()[0] == "*":
                take("*")
                parse_factor(mon)
        else:
            raise ParseError("expected a term", ti)
        key = tuple(mon)
        c = total.get(key, QZERO) + sign * coeff
        if c:
            total[key] = c
        else:
            total.pop(key, None)
    return Polynomial(ring, total, _clean=True)
