"""Configuration-sum engine shared by the vertex and height models.

A model is described as a :class:`FactorGraph` over integer-valued variables.
Each variable is either fixed, or takes one of two values; a two-valued
variable may be defined relative to an earlier "parent" variable (heights
step by +-1 across a lattice line, optionally modulo ``modulus``) or
absolutely (edge spins 0/1). Factors
are dense complex tables over up to four variables, indexed by
``value - lo``.

Two independent strategies evaluate the weighted sum:

* :func:`enumerate_sum` walks every assignment of the two-valued variables.
  The inner loop is a numba kernel; setting ``VERTEXLAB_BACKEND=numpy``
  selects a chunked pure-numpy implementation instead.
* :func:`eliminate_sum` contracts the factor tables variable by variable
  (a transfer-matrix style sweep when variables are numbered row by row).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import SizeError

MAX_FREE_VARS = 26
_CHUNK = 1 << 15

try:  # pragma: no cover - exercised implicitly when numba is present
    import numba as _nb

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _nb = None
    _HAVE_NUMBA = False


def backend() -> str:
    """Active enumeration backend: ``"numba"`` or ``"numpy"``."""
    want = os.environ.get("VERTEXLAB_BACKEND", "numba").strip().lower()
    if want == "numpy" or not _HAVE_NUMBA:
        return "numpy"
    return "numba"


@dataclass
class FactorGraph:
    lo: int = 0
    hi: int = 1
    modulus: int = 0
    parent: list[int] = field(default_factory=list)
    steps: list[tuple[int, int]] = field(default_factory=list)
    nchoice: list[int] = field(default_factory=list)
    factors: list[tuple[tuple[int, ...], np.ndarray]] = field(default_factory=list)

    @property
    def n_vars(self) -> int:
        return len(self.parent)

    @property
    def domain(self) -> int:
        return self.hi - self.lo + 1

    def fixed(self, value: int) -> int:
        return self._add(-1, (value, value), 1)

    def binary(self, v0: int = 0, v1: int = 1) -> int:
        return self._add(-1, (v0, v1), 2)

    def relative(self, parent: int, s0: int = -1, s1: int = 1) -> int:
        if not 0 <= parent < self.n_vars:
            raise ValueError("parent must be an existing variable")
        return self._add(parent, (s0, s1), 2)

    def __post_init__(self):
        if self.modulus and (self.lo != 0 or self.hi != self.modulus - 1):
            raise ValueError("modular variables must use the domain 0..modulus-1")

    def _add(self, parent, steps, nchoice) -> int:
        self.parent.append(parent)
        self.steps.append(steps)
        self.nchoice.append(nchoice)
        return self.n_vars - 1

    def add_factor(self, variables, table) -> None:
        variables = tuple(int(v) for v in variables)
        table = np.asarray(table, dtype=complex)
        if len(variables) > 4 or table.shape != (self.domain,) * len(variables):
            raise ValueError("factor table must have shape (domain,)*k with k <= 4")
        self.factors.append((variables, table))

    def n_free(self) -> int:
        return sum(1 for c in self.nchoice if c == 2)

    def packed(self):
        n = self.n_vars
        parent = np.asarray(self.parent, dtype=np.int64)
        steps = np.asarray(self.steps, dtype=np.int64).reshape(n, 2)
        bitpos = np.full(n, -1, dtype=np.int64)
        k = 0
        for v in range(n):
            if self.nchoice[v] == 2:
                bitpos[v] = k
                k += 1
        nf = len(self.factors)
        fvars = np.full((nf, 4), 0, dtype=np.int64)
        fstride = np.zeros((nf, 4), dtype=np.int64)
        foff = np.zeros(nf, dtype=np.int64)
        chunks = []
        off = 0
        d = self.domain
        for f, (vs, tab) in enumerate(self.factors):
            for j, v in enumerate(vs):
                fvars[f, j] = v
                fstride[f, j] = d ** (len(vs) - 1 - j)
            foff[f] = off
            chunks.append(tab.ravel())
            off += tab.size
        ftab = np.concatenate(chunks) if chunks else np.zeros(0, dtype=complex)
        return parent, steps, bitpos, fvars, fstride, foff, ftab, k


def _decode_numpy(parent, steps, bitpos, masks, modulus=0):
    n = parent.shape[0]
    vals = np.empty((masks.size, n), dtype=np.int64)
    for v in range(n):
        if bitpos[v] >= 0:
            choice = (masks >> bitpos[v]) & 1
            step = np.where(choice == 1, steps[v, 1], steps[v, 0])
        else:
            step = np.full(masks.size, steps[v, 0], dtype=np.int64)
        vals[:, v] = step + (vals[:, parent[v]] if parent[v] >= 0 else 0)
        if modulus:
            vals[:, v] %= modulus
    return vals


def _weights_numpy(graph: FactorGraph, masks: np.ndarray):
    parent, steps, bitpos, fvars, fstride, foff, ftab, _ = graph.packed()
    vals = _decode_numpy(parent, steps, bitpos, masks, graph.modulus)
    rel = vals - graph.lo
    inside = np.all((rel >= 0) & (rel < graph.domain), axis=1)
    rel = np.clip(rel, 0, graph.domain - 1)
    w = np.where(inside, 1.0 + 0j, 0.0 + 0j)
    for f, (vs, _tab) in enumerate(graph.factors):
        idx = np.full(masks.size, foff[f], dtype=np.int64)
        for j, v in enumerate(vs):
            idx += rel[:, v] * fstride[f, j]
        w = w * ftab[idx]
    return vals, w


def _enumerate_numpy(graph: FactorGraph) -> complex:
    nbits = graph.n_free()
    total = 0j
    for start in range(0, 1 << nbits, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, 1 << nbits), dtype=np.int64)
        _, w = _weights_numpy(graph, masks)
        total += complex(w.sum())
    return total


if _HAVE_NUMBA:

    @_nb.njit(cache=True)
    def _enumerate_kernel(parent, steps, bitpos, fvars, fstride, foff, ftab, nfvars, nbits, lo, dom, modulus):
        n = parent.shape[0]
        nf = foff.shape[0]
        vals = np.empty(n, dtype=np.int64)
        total = 0j
        for mask in range(1 << nbits):
            ok = True
            for v in range(n):
                c = 0
                if bitpos[v] >= 0:
                    c = (mask >> bitpos[v]) & 1
                val = steps[v, c]
                if parent[v] >= 0:
                    val += vals[parent[v]]
                if modulus > 0:
                    val = val % modulus
                if val < lo or val >= lo + dom:
                    ok = False
                    break
                vals[v] = val
            if not ok:
                continue
            w = 1.0 + 0j
            for f in range(nf):
                idx = foff[f]
                for j in range(nfvars[f]):
                    idx += (vals[fvars[f, j]] - lo) * fstride[f, j]
                w *= ftab[idx]
                if w == 0:
                    break
            total += w
        return total


def enumerate_sum(graph: FactorGraph) -> complex:
    """Weighted sum over every assignment of the two-valued variables."""
    nbits = graph.n_free()
    if nbits > MAX_FREE_VARS:
        raise SizeError(f"{nbits} free variables exceed the enumeration limit {MAX_FREE_VARS}")
    if backend() == "numpy":
        return _enumerate_numpy(graph)
    parent, steps, bitpos, fvars, fstride, foff, ftab, k = graph.packed()
    nfvars = np.asarray([len(vs) for vs, _ in graph.factors], dtype=np.int64)
    return complex(
        _enumerate_kernel(
            parent, steps, bitpos, fvars, fstride, foff, ftab, nfvars, k, graph.lo, graph.domain, graph.modulus
        )
    )


def enumerate_configurations(graph: FactorGraph):
    """All assignments with their weights, as ``(values, weights)`` arrays."""
    nbits = graph.n_free()
    if nbits > 20:
        raise SizeError("explicit configuration listing is limited to 20 free variables")
    masks = np.arange(1 << nbits, dtype=np.int64)
    return _weights_numpy(graph, masks)


def _cheapest(pending, factors):
    """Remove and return the variable whose elimination creates the smallest factor."""
    best = min(pending, key=lambda v: (len({u for vs, _ in factors if v in vs for u in vs}), v))
    pending.remove(best)
    return best


def eliminate_sum(graph: FactorGraph, order=None) -> complex:
    """Contract the graph by summing variables out one at a time.

    Without an explicit ``order`` the next variable is chosen greedily to keep
    intermediate factors small.
    """
    d = graph.domain
    factors = [(vs, tab) for vs, tab in graph.factors]
    for v in range(graph.n_vars):
        s0, s1 = graph.steps[v]
        allowed = {s0, s1}
        p = graph.parent[v]
        if p < 0:
            tab = np.zeros(d, dtype=complex)
            for s in allowed:
                if 0 <= s - graph.lo < d:
                    tab[s - graph.lo] = 1.0
            factors.append(((v,), tab))
        else:
            tab = np.zeros((d, d), dtype=complex)
            for i in range(d):
                for s in allowed:
                    j = (i + s) % d if graph.modulus else i + s
                    if 0 <= j < d:
                        tab[i, j] = 1.0
            factors.append(((p, v), tab))
    pending = list(range(graph.n_vars)) if order is None else list(order)
    while pending:
        v = pending.pop(0) if order is not None else _cheapest(pending, factors)
        touching = [f for f in factors if v in f[0]]
        rest = [f for f in factors if v not in f[0]]
        union = sorted({u for vs, _ in touching for u in vs})
        keep = [u for u in union if u != v]
        letters = {u: chr(97 + i) if i < 26 else chr(65 + i - 26) for i, u in enumerate(union)}
        spec = ",".join("".join(letters[u] for u in vs) for vs, _ in touching)
        spec += "->" + "".join(letters[u] for u in keep)
        new = np.einsum(spec, *[t for _, t in touching], optimize=True)
        factors = rest + [(tuple(keep), new)]
    total = 1.0 + 0j
    for vs, tab in factors:
        total *= complex(tab) if not vs else complex(tab.sum())
    return total
