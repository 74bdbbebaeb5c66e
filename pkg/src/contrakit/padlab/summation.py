"""Infinite summation operations ``(a_n) -> sum s^n a_n`` on truncated carriers.

Every carrier here is killed by a power of ``s`` at its working precision,
so an infinite sum is the limit of its partial sums and is reached after
finitely many terms:

    >>> z2 = ZpScalar(2, 8)
    >>> sum_s_power(z2, lambda n: z2.one(), 8).residue
    255
    >>> c = NullSeqC(2, 8)
    >>> print(c.sum_diagonal([], 1))
    TailSeq(p=2, N=8, prefix=[], w=1)

The axioms checked by :func:`check_axioms` are additivity, contraunitality
(a sequence supported at ``n = 0`` sums to its only term),
contraassociativity
``sum_i s^i (sum_j s^j a_ij) = sum_n s^n (sum_{i+j=n} a_ij)``, and that the
induced endomorphism (the sum of ``(0, c, 0, ...)``) is multiplication by
``s``.
"""

from __future__ import annotations

import random
from math import comb

from .. import mutations
from ..reports import Report
from .padic import PadicApprox, PrecisionExhausted
from .tailseq import TailSeq, membership
from .tower import TowerElement


class NonCommuting(ValueError):
    pass


DEFAULT_SEED = 0


# ---------------------------------------------------------------------------
# carriers


class Carrier:
    """An abelian group with commuting nilpotent endomorphisms ``s`` (and ``t``).

    ``horizon`` is a number of terms after which ``s^n`` (and ``t^n``, and any
    product of ``n`` of them) is zero at the working precision.
    """

    name = "carrier"
    two_variable = False

    def zero(self):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    def eq(self, x, y) -> bool:
        return x == y

    def mul_s(self, x):
        raise NotImplementedError

    def mul_t(self, x):
        raise NotImplementedError(f"{self.name} has a single endomorphism")

    def random(self, rng):
        raise NotImplementedError

    def random_endo(self, rng):
        """A random endomorphism commuting with ``s`` (and ``t``), as a callable."""
        k = rng.randrange(0, 1000)
        return lambda x: self.scale(k, x)

    def scale(self, k: int, x):
        out, base, k = self.zero(), x, int(k)
        if k < 0:
            base, k = self.neg(x), -k
        while k:
            if k & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            k >>= 1
        return out

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def s_power(self, n: int, x):
        for _ in range(n):
            x = self.mul_s(x)
        return x

    def t_power(self, n: int, x):
        for _ in range(n):
            x = self.mul_t(x)
        return x

    def describe(self) -> dict:
        return {"carrier": self.name}

    def to_json(self):
        return self.describe()


class ZpScalar(Carrier):
    """``Z_p`` modulo ``p^N`` with ``s`` a multiple of ``p``."""

    def __init__(self, p: int, N: int, s: int | None = None):
        self.p, self.N = p, N
        self.s = p if s is None else s
        if self.s % p:
            raise ValueError("s must be divisible by p")
        v = PadicApprox(p, N, self.s).valuation()
        self.horizon = -(-N // v)
        self.name = f"Z_{p}"

    def zero(self):
        return PadicApprox(self.p, self.N, 0)

    def one(self):
        return PadicApprox(self.p, self.N, 1)

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def mul_s(self, x):
        return x * self.s

    def scale(self, k, x):
        return x * k

    def random(self, rng):
        return PadicApprox(self.p, self.N, rng.randrange(self.p ** self.N))

    def random_endo(self, rng):
        r = rng.randrange(self.p ** self.N)
        return lambda x: x * r

    def describe(self):
        return {"carrier": self.name, "p": self.p, "precision": self.N, "s": self.s}


class ZpModPk(Carrier):
    """The finite group ``Z/p^k`` with ``s = p``; sums are exact."""

    def __init__(self, p: int, k: int):
        self.p, self.k, self.N = p, k, k
        self.q = p ** k
        self.horizon = k
        self.name = f"Z/{p}^{k}"

    def zero(self):
        return 0

    def add(self, x, y):
        return (x + y) % self.q

    def neg(self, x):
        return -x % self.q

    def mul_s(self, x):
        return x * self.p % self.q

    def scale(self, k, x):
        return k * x % self.q

    def random(self, rng):
        return rng.randrange(self.q)

    def describe(self):
        return {"carrier": self.name, "p": self.p, "precision": self.k, "s": self.p}


class FiniteProductZp(Carrier):
    """``prod_{p in P} Z_p`` modulo ``p^N`` in each factor, with ``s = prod P``."""

    def __init__(self, primes, N: int):
        self.primes = tuple(sorted(primes))
        self.N = N
        self.mods = tuple(p ** N for p in self.primes)
        self.s = 1
        for p in self.primes:
            self.s *= p
        self.horizon = N
        self.name = "x".join(f"Z_{p}" for p in self.primes)

    def zero(self):
        return (0,) * len(self.primes)

    def add(self, x, y):
        return tuple((a + b) % q for a, b, q in zip(x, y, self.mods))

    def neg(self, x):
        return tuple(-a % q for a, q in zip(x, self.mods))

    def mul_s(self, x):
        return tuple(a * self.s % q for a, q in zip(x, self.mods))

    def scale(self, k, x):
        return tuple(a * k % q for a, q in zip(x, self.mods))

    def random(self, rng):
        return tuple(rng.randrange(q) for q in self.mods)

    def describe(self):
        return {"carrier": self.name, "primes": list(self.primes), "precision": self.N, "s": self.s}


class NullSeqC(Carrier):
    """Null sequences in ``Z_p`` (as :class:`TailSeq`) with ``s = p`` acting entrywise."""

    max_random_length = 4

    def __init__(self, p: int, N: int):
        self.p, self.N = p, N
        self.horizon = N
        self.name = f"C({p})"

    def zero(self):
        return TailSeq.zero(self.p, self.N)

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def mul_s(self, x):
        return x.scale(self.p)

    def scale(self, k, x):
        return x.scale(k)

    def random(self, rng):
        length = rng.randint(0, min(self.N, self.max_random_length))
        q = self.p ** self.N
        return TailSeq(self.p, self.N, tuple(rng.randrange(q) for _ in range(length)),
                       rng.randrange(q))

    def sum_diagonal(self, head, c: int) -> TailSeq:
        """``sum_n p^n (c_n e_n)`` for ``c_n = head[n]`` and then ``c_n = c`` forever.

        Position ``n`` receives ``p^n c_n`` and nothing else, so the result
        has prefix ``(p^n head[n])`` and tail coefficient ``c``.
        """
        return TailSeq(self.p, self.N, tuple(self.p ** n * h for n, h in enumerate(head)), c)

    def describe(self):
        return {"carrier": self.name, "p": self.p, "precision": self.N, "s": self.p}


class QuotientCmodE(NullSeqC):
    """``C/E`` on representatives: two sequences are equal when they differ by an element of ``E``."""

    def __init__(self, p: int, N: int):
        super().__init__(p, N)
        self.name = f"C/E({p})"

    def eq(self, x, y) -> bool:
        return membership(x - y, "E").member


class PowerSeries(Carrier):
    """``V[[z]]`` for ``V = Z/m``, truncated at ``z^N``, with ``s = z``.

    Passing ``t="scalar"`` with ``m = p^k`` adds the second endomorphism ``t = p``.
    """

    def __init__(self, m: int, N: int, scalar: int | None = None):
        self.m, self.N = m, N
        self.scalar = scalar
        self.horizon = N if scalar is None else N + _nilpotency(m, scalar)
        self.two_variable = scalar is not None
        self.name = f"Z/{m}[[z]]"

    def zero(self):
        return (0,) * self.N

    def add(self, x, y):
        return tuple((a + b) % self.m for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a % self.m for a in x)

    def mul_s(self, x):
        return (0,) + x[:-1]

    def mul_t(self, x):
        if self.scalar is None:
            return super().mul_t(x)
        return tuple(a * self.scalar % self.m for a in x)

    def scale(self, k, x):
        return tuple(a * k % self.m for a in x)

    def random(self, rng):
        return tuple(rng.randrange(self.m) for _ in range(self.N))

    def random_endo(self, rng):
        f = self.random(rng)
        return lambda x: _series_mul(f, x, self.m)

    def describe(self):
        out = {"carrier": self.name, "precision": self.N, "s": "z"}
        if self.scalar is not None:
            out["t"] = self.scalar
        return out


def _nilpotency(m: int, k: int) -> int:
    n, x = 0, 1
    while x % m:
        x *= k
        n += 1
        if n > m:
            raise ValueError(f"{k} is not nilpotent modulo {m}")
    return n


def _series_mul(f, g, m):
    n = len(g)
    return tuple(sum(f[i] * g[k - i] for i in range(k + 1)) % m for k in range(n))


class TowerCarrier(Carrier):
    """``R/I^K`` for ``R = Z[x]``, ``I = (p, x)``, with ``s = p`` and ``t = x``."""

    two_variable = True

    def __init__(self, p: int, K: int):
        self.p, self.K, self.N = p, K, K
        self.horizon = K
        self.name = f"Z[x]/(p,x)^{K}"

    def zero(self):
        return TowerElement.zero(self.p, self.K)

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def mul_s(self, x):
        return x.mul_p()

    def mul_t(self, x):
        return x.mul_x()

    def scale(self, k, x):
        return x.scale(k)

    def random(self, rng):
        return TowerElement.random(rng, self.p, self.K)

    def random_endo(self, rng):
        r = self.random(rng)
        return lambda x: r * x

    def describe(self):
        return {"carrier": self.name, "p": self.p, "precision": self.K, "s": self.p, "t": "x"}


# ---------------------------------------------------------------------------
# one variable


def _term(a, n):
    if callable(a):
        return a(n)
    return a[n] if n < len(a) else None


def sum_s_power(inst: Carrier, a, N: int | None = None, horizon: int | None = None):
    """``sum_n s^n a_n`` by partial sums.

    ``a`` is a finite list (zero beyond its end) or a function of ``n``.
    Terms at ``n >= horizon`` vanish at the working precision, so the
    partial sum up to the horizon is the value.
    """
    if N is not None and N > inst.N:
        raise PrecisionExhausted(f"{inst.name} works at precision {inst.N}, asked for {N}")
    h = inst.horizon if horizon is None else horizon
    if horizon is not None and horizon < inst.horizon:
        raise PrecisionExhausted(f"horizon {horizon} is below {inst.horizon}")
    out = inst.zero()
    for n in range(h):
        x = _term(a, n)
        if x is None:
            if not callable(a):
                break
            continue
        out = inst.add(out, inst.s_power(n, x))
    return out


def check_axioms(inst: Carrier, trials: int = 100, N: int | None = None, seed: int = DEFAULT_SEED,
                 max_size: int = 8) -> Report:
    """Random arrays (up to ``max_size`` square) against the summation axioms."""
    rng = random.Random(seed)
    rep = Report("axioms", {**inst.describe(), "seed": seed, "trials": trials})
    bad = {"additivity": None, "contraunitality": None, "contraassociativity": None,
           "induced endomorphism is s": None, "horizon stability": None}
    for trial in range(trials):
        n = rng.randint(1, max_size)
        a = [inst.random(rng) for _ in range(n)]
        b = [inst.random(rng) for _ in range(n)]
        lhs = sum_s_power(inst, [inst.add(x, y) for x, y in zip(a, b)])
        rhs = inst.add(sum_s_power(inst, a), sum_s_power(inst, b))
        if bad["additivity"] is None and not inst.eq(lhs, rhs):
            bad["additivity"] = {"trial": trial, "lhs": lhs, "rhs": rhs}
        x = inst.random(rng)
        one_hot = [x] + [inst.zero()] * rng.randint(0, max_size - 1)
        if bad["contraunitality"] is None and not inst.eq(sum_s_power(inst, one_hot), x):
            bad["contraunitality"] = {"trial": trial, "a0": x}
        if bad["induced endomorphism is s"] is None and \
                not inst.eq(sum_s_power(inst, [inst.zero(), x]), inst.mul_s(x)):
            bad["induced endomorphism is s"] = {"trial": trial, "c": x}
        rows, cols = rng.randint(1, max_size), rng.randint(1, max_size)
        arr = [[inst.random(rng) for _ in range(cols)] for _ in range(rows)]
        inner = sum_s_power(inst, [sum_s_power(inst, row) for row in arr])
        diag = []
        for d in range(rows + cols - 1):
            acc = inst.zero()
            for i in range(max(0, d - cols + 1), min(rows, d + 1)):
                acc = inst.add(acc, arr[i][d - i])
            diag.append(acc)
        outer = sum_s_power(inst, diag)
        if bad["contraassociativity"] is None and not inst.eq(inner, outer):
            bad["contraassociativity"] = {"trial": trial, "rows": rows, "cols": cols,
                                          "nested": inner, "regrouped": outer}
        period = [inst.random(rng) for _ in range(rng.randint(1, 3))]
        seq = lambda k, period=period: period[k % len(period)]
        h = inst.horizon
        if bad["horizon stability"] is None and \
                not inst.eq(sum_s_power(inst, seq), sum_s_power(inst, seq, horizon=h + 5)):
            bad["horizon stability"] = {"trial": trial, "period": period}
    for name, witness in bad.items():
        rep.check(name, witness is None, witness)
    return rep


# ---------------------------------------------------------------------------
# telescope systems  b_n - s b_{n+1} = a_n


def solve_telescope(inst: Carrier, a, N: int | None = None, length: int | None = None) -> Report:
    """Solve ``b_n - s b_{n+1} = a_n`` by ``b_n = sum_i s^i a_{n+i}`` and substitute back."""
    length = len(a) if length is None and not callable(a) else (length or inst.horizon)
    seq = a if callable(a) else (lambda n: a[n] if n < len(a) else inst.zero())
    h = inst.horizon
    b = [sum_s_power(inst, lambda i, n=n: seq(n + i), N, horizon=h) for n in range(length + 1)]
    rep = Report("telescope", {**inst.describe(), "length": length})
    residuals = []
    for n in range(length):
        r = inst.sub(inst.sub(b[n], inst.mul_s(b[n + 1])), seq(n))
        if not inst.eq(r, inst.zero()):
            residuals.append({"n": n, "residual": r})
    rep.check("residuals vanish", not residuals, residuals[:3])
    # a homogeneous solution has b_0 = s^k b_k for every k; s^horizon is zero
    killers = []
    rng = random.Random(length)
    for _ in range(8):
        x = inst.random(rng)
        if not inst.eq(inst.s_power(h, x), inst.zero()):
            killers.append(x)
    rep.check("homogeneous solutions vanish (s^horizon kills the carrier)", not killers,
              {"horizon": h, "survivors": killers[:2]})
    rep.data["b"] = b[:length]
    return rep


# ---------------------------------------------------------------------------
# two variables


def ensure_commuting(inst: Carrier, rng, samples: int = 5):
    for _ in range(samples):
        x = inst.random(rng)
        if not inst.eq(inst.mul_s(inst.mul_t(x)), inst.mul_t(inst.mul_s(x))):
            raise NonCommuting(f"s and t do not commute on {x}")


def two_var_sum(inst: Carrier, a) -> object:
    """``sum_{i,j} s^i t^j a_ij`` by direct partial sums over ``i + j < horizon``."""
    out = inst.zero()
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            if i + j < inst.horizon:
                out = inst.add(out, inst.s_power(i, inst.t_power(j, x)))
    return out


def t_sum(inst: Carrier, a):
    out = inst.zero()
    for j, x in enumerate(a[: inst.horizon]):
        out = inst.add(out, inst.t_power(j, x))
    return out


def s_then_t(inst, a):
    """``sum_j t^j (sum_i s^i a_ij)``."""
    cols = max((len(r) for r in a), default=0)
    return t_sum(inst, [sum_s_power(inst, [r[j] if j < len(r) else inst.zero() for r in a])
                        for j in range(cols)])


def t_then_s(inst, a):
    """``sum_i s^i (sum_j t^j a_ij)``, the recovery formula."""
    return sum_s_power(inst, [t_sum(inst, row) for row in a])


def binomial_sum(inst: Carrier, a):
    """``sum_n (s+t)^n a_n`` as ``sum_{i,j} s^i t^j C(i+j, i) a_{i+j}``."""
    shift = 1 if mutations.active("binomial_index") else 0
    arr = []
    for i in range(len(a)):
        row = []
        for j in range(len(a) - i):
            k = i + j + shift
            row.append(inst.scale(comb(i + j, i), a[k]) if k < len(a) else inst.zero())
        arr.append(row)
    return two_var_sum(inst, arr)


def direct_plus_sum(inst: Carrier, a):
    """``sum_n (s+t)^n a_n`` by applying ``s + t`` repeatedly."""
    out = inst.zero()
    for n, x in enumerate(a):
        y = x
        for _ in range(n):
            y = inst.add(inst.mul_s(y), inst.mul_t(y))
        out = inst.add(out, y)
    return out


def check_two_variable(inst: Carrier, trials: int = 100, seed: int = DEFAULT_SEED,
                       max_size: int = 6) -> Report:
    """Two-variable axioms, the commutation identity, and the ``(s+t)`` and ``(rs)`` formulas."""
    rng = random.Random(seed)
    ensure_commuting(inst, rng)
    rep = Report("two-var", {**inst.describe(), "seed": seed, "trials": trials})
    names = ("additivity", "contraunitality", "contraassociativity", "commutation (both orders)",
             "recovery from s- and t-sums", "(s+t) binomial formula", "(rs) substitution formula")
    bad = dict.fromkeys(names)

    def rand_array(r, c):
        return [[inst.random(rng) for _ in range(c)] for _ in range(r)]

    def note(name, ok, witness):
        if bad[name] is None and not ok:
            bad[name] = witness

    for trial in range(trials):
        r, c = rng.randint(1, max_size), rng.randint(1, max_size)
        a, b = rand_array(r, c), rand_array(r, c)
        ab = [[inst.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
        note("additivity", inst.eq(two_var_sum(inst, ab),
                                   inst.add(two_var_sum(inst, a), two_var_sum(inst, b))),
             {"trial": trial})
        v = inst.random(rng)
        note("contraunitality", inst.eq(two_var_sum(inst, [[v]]), v), {"trial": trial, "v": v})
        direct = two_var_sum(inst, a)
        st, ts = s_then_t(inst, a), t_then_s(inst, a)
        note("commutation (both orders)", inst.eq(st, ts),
             {"trial": trial, "t_of_s": st, "s_of_t": ts})
        note("recovery from s- and t-sums", inst.eq(ts, direct), {"trial": trial})
        size = rng.randint(1, 3)
        quad = {(i, j, k, l): inst.random(rng)
                for i in range(size) for j in range(size) for k in range(size) for l in range(size)}
        nested = two_var_sum(inst, [[two_var_sum(inst, [[quad[i, j, k, l] for l in range(size)]
                                                        for k in range(size)])
                                     for j in range(size)] for i in range(size)])
        merged = [[inst.zero()] * (2 * size - 1) for _ in range(2 * size - 1)]
        for (i, j, k, l), x in quad.items():
            merged[i + k][j + l] = inst.add(merged[i + k][j + l], x)
        note("contraassociativity", inst.eq(nested, two_var_sum(inst, merged)),
             {"trial": trial, "size": size})
        seq = [inst.random(rng) for _ in range(rng.randint(1, max_size))]
        if trial == 0:
            seq = [v]
        via, plain = binomial_sum(inst, seq), direct_plus_sum(inst, seq)
        note("(s+t) binomial formula", inst.eq(via, plain),
             {"trial": trial, "sequence": seq, "binomial": via, "direct": plain})
        rmap = inst.random_endo(rng)
        rs_direct = inst.zero()
        for n, x in enumerate(seq):
            y = x
            for _ in range(n):
                y = rmap(inst.mul_s(y))
            rs_direct = inst.add(rs_direct, y)
        powered = []
        for n, x in enumerate(seq):
            for _ in range(n):
                x = rmap(x)
            powered.append(x)
        rs_formula = sum_s_power(inst, powered)
        note("(rs) substitution formula", inst.eq(rs_direct, rs_formula), {"trial": trial})
    for name in names:
        rep.check(name, bad[name] is None, bad[name])
    return rep


def one_variable_carriers(N: int = 24):
    return [ZpScalar(3, N), ZpScalar(2, N, s=6), ZpModPk(5, 6), FiniteProductZp((2, 3), N),
            NullSeqC(2, N), QuotientCmodE(2, N), PowerSeries(4, N)]


def two_variable_carriers(N: int = 24):
    return [TowerCarrier(2, N), PowerSeries(8, N, scalar=2)]
