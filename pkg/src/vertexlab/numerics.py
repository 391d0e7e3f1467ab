"""Complex arithmetic helpers, residual norms and seeded parameter sampling."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import SamplingError, ShapeError

DEFAULT_X0 = 0.37 + 0.11j
DEFAULT_ETA = 0.45 - 0.2j
DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    singularity_guard: float = 1e-6

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.singularity_guard) <= 0:
            raise ValueError("tolerances must be strictly positive")


@dataclass(frozen=True)
class ModelParams:
    """Anisotropy ``eta`` (q = exp(eta)), height reference ``x0`` and tolerances."""

    eta: complex = DEFAULT_ETA
    x0: complex = DEFAULT_X0
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        object.__setattr__(self, "eta", complex(self.eta))
        object.__setattr__(self, "x0", complex(self.x0))

    def height(self, offset):
        """Numerical value x0 + offset of an integer height offset."""
        return self.x0 + offset

    def with_eta(self, eta) -> "ModelParams":
        return ModelParams(eta=eta, x0=self.x0, tol=self.tol)


def default_seed() -> int:
    env = os.environ.get("VERTEXLAB_SEED")
    return int(env) if env else DEFAULT_SEED


def as_tensor(t) -> np.ndarray:
    arr = np.asarray(t, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("tensor contains non-finite entries")
    return arr


def contract(t1, t2, legs=((-1,), (0,))) -> np.ndarray:
    """Sum over paired legs, ``legs = (legs_of_t1, legs_of_t2)``.

    The default pairs the last leg of ``t1`` with the first leg of ``t2``,
    which is ordinary matrix multiplication for matrices and vectors.
    """
    a, b = np.asarray(t1, dtype=complex), np.asarray(t2, dtype=complex)
    la, lb = (tuple(x) for x in legs)
    if len(la) != len(lb):
        raise ShapeError("leg lists must pair one-to-one")
    for i, j in zip(la, lb):
        try:
            if a.shape[i] != b.shape[j]:
                raise ShapeError(f"leg {i} of dim {a.shape[i]} paired with leg {j} of dim {b.shape[j]}")
        except IndexError as exc:
            raise ShapeError(str(exc)) from exc
    return np.tensordot(a, b, axes=(la, lb))


def residual(t1, t2) -> float:
    """max|t1 - t2| / (1 + max|t1|)."""
    a, b = np.asarray(t1, dtype=complex), np.asarray(t2, dtype=complex)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(a))))


def scaled_residual(terms, total=None) -> float:
    """|sum of terms| divided by the largest term magnitude (or 1 if all vanish)."""
    terms = np.asarray(terms, dtype=complex)
    s = terms.sum() if total is None else total
    scale = float(np.max(np.abs(terms))) if terms.size else 0.0
    return float(abs(s) / scale) if scale > 0 else float(abs(s))


def params_digest(obj) -> str:
    """Short stable digest of a JSON-serialisable parameter record."""
    blob = json.dumps(obj, sort_keys=True, default=_jsonable).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x))


def cjson(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


@dataclass
class ParamSampler:
    """Reproducible draws of spectral parameters inside a box of the complex plane.

    Every draw is accepted only if all sinh((x0 + k) eta) with ``k`` in
    ``height_range`` stay above the singularity guard for the drawn eta.
    """

    seed: int = DEFAULT_SEED
    box: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    eta_list: tuple[complex, ...] = (DEFAULT_ETA,)
    x0: complex = DEFAULT_X0
    n_lambdas: int = 3
    height_range: tuple[int, int] = (-6, 6)
    guard: float = 1e-6
    max_retries: int = 1000

    def _ok(self, eta: complex) -> bool:
        ks = np.arange(self.height_range[0], self.height_range[1] + 1)
        return bool(np.all(np.abs(np.sinh((self.x0 + ks) * eta)) > self.guard))

    def sample(self, n: int) -> list[tuple[tuple[complex, ...], complex]]:
        if n < 1:
            raise ValueError("n must be at least 1")
        rng = np.random.default_rng(self.seed)
        lo_r, hi_r, lo_i, hi_i = self.box
        out = []
        for k in range(n):
            eta = complex(self.eta_list[k % len(self.eta_list)])
            for _ in range(self.max_retries):
                if self._ok(eta):
                    break
                eta = eta * (1 + 1e-3 * complex(rng.normal(), rng.normal()))
            else:
                raise SamplingError("singularity guard could not be satisfied")
            re = rng.uniform(lo_r, hi_r, self.n_lambdas)
            im = rng.uniform(lo_i, hi_i, self.n_lambdas)
            out.append((tuple(complex(a, b) for a, b in zip(re, im)), eta))
        return out


def random_complex(rng: np.random.Generator, scale: float = 1.0) -> complex:
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))
