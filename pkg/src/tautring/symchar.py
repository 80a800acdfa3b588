"""Integer partitions, symmetric-group characters, and trace relations.

Characters are evaluated with the Murnaghan-Nakayama rule on beta-number
sequences.  The relation generators sum over a symmetric group grouped by
cycle type, never by enumerating permutations: a permutation with 1 in a
cycle of length m and complementary cycle type mu is counted (n-1)!/z_mu
times, where z_mu is the centralizer order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

from .polyring import Polynomial, QQ, Ring


def is_partition(parts):
    return all(
        isinstance(p, int) and p >= 1 for p in parts
    ) and all(a >= b for a, b in zip(parts, parts[1:]))


def check_partition(parts):
    parts = tuple(parts)
    if not is_partition(parts):
        raise ValueError(f"not a partition: {parts!r}")
    return parts


def partitions(n, max_part=None):
    """Partitions of n as weakly decreasing tuples, largest part first."""
    if n == 0:
        yield ()
        return
    if max_part is None or max_part > n:
        max_part = n
    for first in range(max_part, 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def centralizer_order(mu):
    """z_mu = prod_i i^{m_i} m_i! for cycle type mu."""
    mu = check_partition(mu) if mu else ()
    z = 1
    counts = {}
    for p in mu:
        counts[p] = counts.get(p, 0) + 1
    for p, m in counts.items():
        z *= p**m * factorial(m)
    return z


def class_size(mu):
    """Number of permutations in Sigma_n with cycle type mu."""
    mu = check_partition(mu)
    n = sum(mu)
    return factorial(n) // centralizer_order(mu)


@lru_cache(maxsize=None)
def mn_character(lam, mu):
    """Irreducible character chi_lambda at cycle type mu (|lam| == |mu|)."""
    lam = check_partition(lam) if lam else ()
    mu = check_partition(mu) if mu else ()
    if sum(lam) != sum(mu):
        raise ValueError("partition and cycle type have different sizes")
    if not mu:
        return 1
    r, rest = mu[0], mu[1:]
    L = len(lam)
    betas = [lam[i] + (L - 1 - i) for i in range(L)]
    bset = set(betas)
    total = 0
    for b in betas:
        nb = b - r
        if nb < 0 or nb in bset:
            continue
        height = sum(1 for x in betas if nb < x < b)
        new_betas = sorted((x for x in betas if x != b), reverse=True)
        new_betas.append(nb)
        new_betas.sort(reverse=True)
        new_lam = tuple(
            nb2 - (L - 1 - j) for j, nb2 in enumerate(new_betas)
        )
        new_lam = tuple(x for x in new_lam if x > 0)
        total += (-1) ** height * mn_character(new_lam, rest)
    return total


def sign_character(mu):
    """Character of the sign representation at cycle type mu."""
    return (-1) ** (sum(mu) - len(mu))


def power_sum_ring(top):
    """Q[t1..t_top] with t_i of weight i (abstract power-sum symbols)."""
    return Ring([f"t{i}" for i in range(1, top + 1)], list(range(1, top + 1)))


@dataclass(frozen=True)
class TraceRelation:
    """The identity sum_j coeffs[j] * z^j == 0 with coeffs in Q[t1..].

    coeffs[j] is the coefficient of z^j; the top entry is the constant 1
    for the monic relations produced by trace_relation.
    """

    ring: Ring
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self):
        return self.coeffs[-1]

    def is_monic(self):
        return self.coeffs[-1] == self.ring.one()

    def monic_after_scaling(self):
        """Whether the top z-coefficient (a constant here) is non-zero."""
        return not self.coeffs[-1].is_zero()

    def render(self, z="z"):
        chunks = []
        for j in range(self.degree, -1, -1):
            c = self.coeffs[j]
            if c.is_zero():
                continue
            zpow = "" if j == 0 else (z if j == 1 else f"{z}^{j}")
            body = c.render()
            if body == "1" and zpow:
                chunks.append(zpow)
            elif "+" in body[1:] or "-" in body[1:]:
                chunks.append(f"({body})" + ("*" + zpow if zpow else ""))
            else:
                chunks.append(body + ("*" + zpow if zpow else ""))
        return " + ".join(chunks) if chunks else "0"


def _t_monomial(ring, mu):
    mon = [0] * ring.nvars
    for part in mu:
        mon[part - 1] += 1
    return ring.monomial(tuple(mon))


def _cycle_grouped_relation(n, character):
    """sum over Sigma_n of character(sigma) * t_(complement) * z^(l(gamma_1)-1),
    grouped by cycle type; returns coefficient polynomials for z^0..z^(n-1)."""
    ring = power_sum_ring(max(n - 1, 1))
    coeffs = [ring.zero() for _ in range(n)]
    base = factorial(n - 1)
    for m in range(1, n + 1):
        acc = ring.zero()
        for mu in partitions(n - m):
            full_type = tuple(sorted(mu + (m,), reverse=True))
            chi = character(full_type)
            if not chi:
                continue
            count = base // centralizer_order(mu)
            acc = acc + _t_monomial(ring, mu) * (count * chi)
        coeffs[m - 1] = acc
    return ring, coeffs


def schur_relation(lam):
    """The chi_lambda-weighted cycle sum; vanishes on kappa classes when the
    Schur functor for lambda kills the fibre cohomology."""
    lam = check_partition(lam)
    n = sum(lam)
    ring, coeffs = _cycle_grouped_relation(n, lambda mu: mn_character(lam, mu))
    return TraceRelation(ring, tuple(coeffs))


def trace_relation(k):
    """Monic degree-k polynomial annihilating a point class, coefficients in
    power-sum symbols t_i; the sign-character cycle sum normalized by
    (-1)^k / k!."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n = k + 1
    ring, coeffs = _cycle_grouped_relation(n, sign_character)
    factor = QQ((-1) ** k) / factorial(k)
    coeffs = [c * factor for c in coeffs]
    rel = TraceRelation(ring, tuple(coeffs))
    assert rel.is_monic()
    return rel
