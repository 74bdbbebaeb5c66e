"""The ring ``Z[x]/I^K`` for ``I = (p, x)``, with the contramodule Nakayama trace and nested completion.

``I^K`` is spanned by ``p^i x^j`` with ``i + j = K``, so a class modulo
``I^K`` is a polynomial of degree below ``K`` whose coefficient of ``x^b``
is taken modulo ``p^(K-b)``:

    >>> a = TowerElement.from_coeffs(2, 4, [5, 1])      # 5 + x modulo (2, x)^4
    >>> a.coeffs
    (5, 1, 0, 0)
    >>> (a * a).coeffs                                  # 25 + 10x + x^2
    (9, 2, 1, 0)
    >>> a.mul_x().mul_x().mul_x().in_power(3)
    True
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..reports import Report
from .padic import PrecisionExhausted


class SplittingFailed(ArithmeticError):
    pass


class NotCauchy(ValueError):
    pass


@dataclass(frozen=True)
class TowerElement:
    p: int
    K: int
    coeffs: tuple

    def __post_init__(self):
        c = list(self.coeffs)[: self.K] + [0] * max(0, self.K - len(self.coeffs))
        object.__setattr__(self, "coeffs",
                           tuple(int(a) % self.p ** (self.K - b) for b, a in enumerate(c)))

    @classmethod
    def from_coeffs(cls, p: int, K: int, coeffs) -> "TowerElement":
        return cls(p, K, tuple(coeffs))

    @classmethod
    def zero(cls, p: int, K: int) -> "TowerElement":
        return cls(p, K, ())

    @classmethod
    def one(cls, p: int, K: int) -> "TowerElement":
        return cls(p, K, (1,))

    @classmethod
    def random(cls, rng, p: int, K: int, power: int = 0) -> "TowerElement":
        """A random element of ``I^power``."""
        return cls(p, K, tuple(p ** max(0, power - b) * rng.randrange(p ** (K - b))
                               for b in range(K)))

    def _check(self, other):
        if (self.p, self.K) != (other.p, other.K):
            raise ValueError("elements of different towers")

    def __add__(self, other):
        self._check(other)
        return TowerElement(self.p, self.K, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return TowerElement(self.p, self.K, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        out = [0] * self.K
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs[: self.K - i]):
                    out[i + j] += a * b
        return TowerElement(self.p, self.K, tuple(out))

    def scale(self, k: int):
        return TowerElement(self.p, self.K, tuple(k * a for a in self.coeffs))

    def mul_p(self):
        return self.scale(self.p)

    def mul_x(self):
        return TowerElement(self.p, self.K, (0,) + self.coeffs[:-1])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def in_power(self, n: int) -> bool:
        """Membership in ``I^n``: ``p^(n-b)`` divides the coefficient of ``x^b``."""
        if n > self.K:
            raise PrecisionExhausted(f"I^{n} is not visible modulo I^{self.K}")
        return all(a % self.p ** max(0, n - b) == 0 for b, a in enumerate(self.coeffs))

    def reduce(self, k: int) -> "TowerElement":
        if k > self.K:
            raise PrecisionExhausted(f"cannot raise the cutoff from {self.K} to {k}")
        return TowerElement(self.p, k, self.coeffs[:k])

    def to_json(self):
        return {"p": self.p, "K": self.K, "coeffs": list(self.coeffs)}

    def __str__(self):
        terms = [f"{a}" if b == 0 else f"{a}*x^{b}" for b, a in enumerate(self.coeffs) if a]
        return " + ".join(terms) or "0"


def monomial_split(a: TowerElement, n: int):
    """Write ``a`` in ``I^n`` as ``sum_{i+j=n} p^i x^j a_ij``, one monomial at a time.

    The coefficient ``c_b`` of ``x^b`` goes to ``a_{n-b, b}`` as ``c_b / p^(n-b)``
    when ``b < n``, and ``x^(b-n) c_b`` goes to ``a_{0, n}`` otherwise.
    """
    p, K = a.p, a.K
    parts = {(n - j, j): [0] * K for j in range(n + 1)}
    for b, c in enumerate(a.coeffs):
        if not c:
            continue
        if b < n:
            q, r = divmod(c, p ** (n - b))
            if r:
                raise NotCauchy(f"coefficient {c} of x^{b} is not divisible by {p}^{n - b}")
            parts[n - b, b][0] += q
        else:
            parts[0, n][b - n] += c
    return {k: TowerElement(p, K, tuple(v)) for k, v in parts.items()}


# ---------------------------------------------------------------------------
# contramodule Nakayama lemma


def coefficient_splitting(a: TowerElement):
    """``a = p b' + x b''`` with ``b'`` the constant term over ``p`` and ``b''`` the rest over ``x``."""
    c0 = a.coeffs[0]
    if c0 % a.p:
        raise SplittingFailed(f"{a} has a unit constant term, so it is not in I")
    b1 = TowerElement(a.p, a.K, (c0 // a.p,))
    b2 = TowerElement(a.p, a.K, a.coeffs[1:])
    return b1, b2


def nakayama_trace(d0: TowerElement, K: int, splitting=coefficient_splitting) -> Report:
    """Replay the double-array construction of the Nakayama lemma to depth ``K``.

    Starting from ``a_00 = d0``, every ``a_ij`` with ``i + j < K`` is split as
    ``s b'_ij + t b''_ij`` (``s = p``, ``t = x``) and the next diagonal is
    ``a_ij = b'_{i-1,j} + b''_{i,j-1}``.  Regrouping then gives
    ``a_00 = sum_{i+j=K} s^i t^j a_ij``, computed here explicitly, so ``a_00``
    lies in ``I^K``.  The splitting can only run to depth ``K`` when ``d0`` is
    already in ``I^K``; otherwise the report records the depth reached.
    """
    p = d0.p
    rep = Report("nakayama", {"p": p, "precision": d0.K, "depth": K, "d0": d0})
    if K > d0.K:
        raise PrecisionExhausted(f"depth {K} exceeds the cutoff {d0.K}")
    a = {(0, 0): d0}
    splits = {}
    depth = 0
    failure = None
    for n in range(K):
        nxt = {}
        try:
            for i in range(n + 1):
                b1, b2 = splitting(a[i, n - i])
                if not (a[i, n - i] - b1.mul_p() - b2.mul_x()).is_zero():
                    raise SplittingFailed(f"splitting of a_{i},{n - i} does not recombine")
                splits[i, n - i] = (b1, b2)
        except SplittingFailed as exc:
            failure = {"level": n, "reason": str(exc)}
            break
        for (i, j), (b1, b2) in splits.items():
            if i + j != n:
                continue
            nxt[i + 1, j] = nxt.get((i + 1, j), TowerElement.zero(p, d0.K)) + b1
            nxt[i, j + 1] = nxt.get((i, j + 1), TowerElement.zero(p, d0.K)) + b2
        a.update(nxt)
        depth = n + 1
    boundary = TowerElement.zero(p, d0.K)
    for i in range(depth + 1):
        x = a[i, depth - i]
        for _ in range(i):
            x = x.mul_p()
        for _ in range(depth - i):
            x = x.mul_x()
        boundary = boundary + x
    rep.check("a_00 equals the boundary diagonal sum", (d0 - boundary).is_zero(),
              {"depth": depth, "boundary": boundary})
    rep.check("splitting reached the requested depth", failure is None, failure)
    rep.check(f"a_00 lies in I^{depth}", d0.in_power(depth), {"depth": depth})
    rep.data.update(depth_reached=depth, a_array={f"{i},{j}": v for (i, j), v in a.items()})
    return rep


# ---------------------------------------------------------------------------
# nested completion


def check_cauchy(c) -> None:
    for n in range(1, len(c)):
        if not (c[n] - c[n - 1]).in_power(n):
            raise NotCauchy(f"c_{n + 1} - c_{n} is not in I^{n}")


def _solve_stage(seq, step, length):
    """``b_k - step(b_{k+1}) = seq[k]`` by ``b_k = sum_i step^i seq[k + i]`` (``step`` is nilpotent)."""
    out = []
    for k in range(length):
        if k >= len(seq):
            out.append(seq[0] - seq[0])
            continue
        acc = seq[k]
        term_index = k + 1
        power = 1
        while term_index < len(seq):
            x = seq[term_index]
            for _ in range(power):
                x = step(x)
            acc = acc + x
            term_index += 1
            power += 1
        out.append(acc)
    return out


def nested_completion(c, rng=None, trades: int = 0) -> Report:
    """A limit of the Cauchy sequence ``c_1, ..., c_K`` in ``Z[x]/I^K`` by staged telescope solutions.

    The differences are written as ``c_{n+1} - c_n = sum_{i+j=n} p^i x^j a_ij``
    (with ``a_00 = c_1``), optionally perturbed by ``trades`` random moves
    ``a_ij += p r``, ``a_{i+1,j-1} -= x r`` that keep every sum fixed.  Then
    ``b^(1)_{i;k} - x b^(1)_{i;k+1} = a_ik`` and
    ``b^(2)_k - p b^(2)_{k+1} = b^(1)_{k;0}`` are solved and ``b = b^(2)_0``.
    """
    check_cauchy(c)
    K = len(c)
    p = c[0].p
    zero = TowerElement.zero(p, c[0].K)
    a = {(i, j): zero for i in range(K) for j in range(K)}
    a[0, 0] = c[0]
    for n in range(1, K):
        for key, v in monomial_split(c[n] - c[n - 1], n).items():
            a[key] = a[key] + v
    rng = rng or random.Random(0)
    for _ in range(trades):
        n = rng.randint(1, K - 1)
        j = rng.randint(1, n)
        i = n - j
        r = TowerElement.random(rng, p, c[0].K)
        a[i, j] = a[i, j] + r.mul_p()
        a[i + 1, j - 1] = a[i + 1, j - 1] - r.mul_x()
    b1 = {i: _solve_stage([a[i, k] for k in range(K)], TowerElement.mul_x, K + 1) for i in range(K)}
    b2 = _solve_stage([b1[i][0] for i in range(K)], TowerElement.mul_p, K + 1)
    b = b2[0]
    rep = Report("nested-completion", {"p": p, "precision": c[0].K, "terms": K, "trades": trades})
    for n in range(1, K):
        d = zero
        for i in range(n + 1):
            x = a[i, n - i]
            for _ in range(i):
                x = x.mul_p()
            for _ in range(n - i):
                x = x.mul_x()
            d = d + x
        if not (d - (c[n] - c[n - 1])).is_zero():
            rep.check("a-array reproduces the differences", False, {"n": n})
            break
    else:
        rep.check("a-array reproduces the differences", True)
    res1 = [(i, k) for i in range(K) for k in range(K)
            if not (b1[i][k] - b1[i][k + 1].mul_x() - a[i, k]).is_zero()]
    rep.check("stage 1 residuals vanish", not res1, res1[:3])
    res2 = [k for k in range(K) if not (b2[k] - b2[k + 1].mul_p() - b1[k][0]).is_zero()]
    rep.check("stage 2 residuals vanish", not res2, res2[:3])
    replay = zero
    for (i, j), v in a.items():
        if i + j < c[0].K:
            x = v
            for _ in range(i):
                x = x.mul_p()
            for _ in range(j):
                x = x.mul_x()
            replay = replay + x
    rep.check("sum p^i x^j a_ij reproduces b", (replay - b).is_zero())
    bad = [n for n in range(1, K + 1) if not (b - c[n - 1]).in_power(n)]
    rep.check("b - c_n lies in I^n for every n", not bad, {"failing_n": bad})
    rep.data.update(b=b, a_array={f"{i},{j}": v for (i, j), v in a.items() if not v.is_zero()},
                    b1_heads=[b1[i][0] for i in range(K)], b2=b2[:K])
    return rep


def random_cauchy(rng, p: int, K: int):
    """``c_1, ..., c_K`` in ``Z[x]/I^K`` with ``c_{n+1} - c_n`` a random element of ``I^n``."""
    c = [TowerElement.random(rng, p, K)]
    for n in range(1, K):
        c.append(c[-1] + TowerElement.random(rng, p, K, power=n))
    return c
