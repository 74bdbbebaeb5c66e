"""Deliberate single-point faults used to check that the acceptance suite is not vacuous.

Each name switches one sign or index in one formula:

``psi_sign``
    the telescope map sends ``f_n`` to ``e_n + s e_{n+1}`` instead of ``e_n - s e_{n+1}``.
``binomial_index``
    the two-variable binomial summation reads ``a_{i+j+1}`` instead of ``a_{i+j}``.
``e_membership_index``
    membership in ``E`` tests ``p^(n+1) | u_n`` instead of ``p^n | u_n``.

>>> active("psi_sign")
False
>>> with mutation("psi_sign"):
...     active("psi_sign")
True
"""

from __future__ import annotations

import threading
from contextlib import contextmanager

KNOWN = ("psi_sign", "binomial_index", "e_membership_index")

_state = threading.local()


def _active_set() -> set:
    if not hasattr(_state, "names"):
        _state.names = set()
    return _state.names


def active(name: str) -> bool:
    return name in _active_set()


@contextmanager
def mutation(name: str):
    if name not in KNOWN:
        raise KeyError(f"unknown mutation {name!r}; choose from {KNOWN}")
    names = _active_set()
    was = name in names
    names.add(name)
    try:
        yield
    finally:
        if not was:
            names.discard(name)
