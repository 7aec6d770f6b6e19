"""Registry of the twelve programs under test.

Exposes a uniform scalar-in/scalar-out surface (`evaluate_put`), optional
trajectory output (`evaluate_trajectory`), and a `Program` handle that
bundles a kernel with parameter overrides so variant programs (mutants,
refinements) share the reference implementation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional, Tuple

import numpy as np

from ..errors import (
    DomainViolation,
    NonFiniteOutput,
    NotTrajectoryCapable,
    UnknownPut,
)
from . import ml, numeric, probabilistic, surrogate


class PutId(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"


class PutClass(str, Enum):
    NUMERIC = "A"
    PROBABILISTIC = "B"
    SURROGATE = "C"
    ML = "D"


def put_class(put: PutId) -> PutClass:
    return PutClass(PutId(put).value[0])


@dataclass(frozen=True)
class PutDescriptor:
    id: PutId
    name: str
    mathematical_structure: str
    input_domain: Tuple[float, float]
    ood_band_default: float
    trajectory_capable: bool
    stochastic: bool
    refinable: bool


@dataclass(frozen=True)
class _Kernel:
    descriptor: PutDescriptor
    reference: Mapping[str, object]
    evaluate: Optional[Callable] = None          # direct kernels
    fit: Optional[Callable] = None               # fitted kernels
    evaluate_fitted: Optional[Callable] = None
    fit_seeded: bool = False
    trajectory: Optional[Callable] = None        # direct trajectory
    snapshot_trajectory: bool = False            # fitted kernels w/ snapshots
    refine: Optional[Callable] = None


def _desc(pid, name, structure, domain, trajectory, stochastic, refinable):
    return PutDescriptor(PutId(pid), name, structure, domain, 0.05,
                         trajectory, stochastic, refinable)


_REGISTRY = {
    PutId.A1: _Kernel(
        _desc("A1", "Lorenz ODE integration", "nonlinear ODE",
              numeric.A1_DOMAIN, True, False, True),
        numeric.A1_REFERENCE,
        evaluate=numeric.a1_evaluate,
        trajectory=numeric.a1_trajectory,
        refine=numeric.a1_refined,
    ),
    PutId.A2: _Kernel(
        _desc("A2", "LU decomposition", "linear algebra",
              numeric.A2_DOMAIN, False, False, False),
        numeric.A2_REFERENCE,
        evaluate=numeric.a2_evaluate,
    ),
    PutId.A3: _Kernel(
        _desc("A3", "FDM 1D heat conduction", "parabolic PDE",
              numeric.A3_DOMAIN, True, False, True),
        numeric.A3_REFERENCE,
        evaluate=numeric.a3_evaluate,
        trajectory=numeric.a3_trajectory,
        refine=numeric.a3_refined,
    ),
    PutId.B1: _Kernel(
        _desc("B1", "Beta-Binomial conjugate", "analytic posterior",
              probabilistic.B1_DOMAIN, False, False, False),
        probabilistic.B1_REFERENCE,
        evaluate=probabilistic.b1_evaluate,
    ),
    PutId.B2: _Kernel(
        _desc("B2", "MCMC Metropolis-Hastings", "Markov chain",
              probabilistic.B2_DOMAIN, True, True, True),
        probabilistic.B2_REFERENCE,
        evaluate=probabilistic.b2_evaluate,
        trajectory=probabilistic.b2_trajectory,
        refine=probabilistic.b2_refined,
    ),
    PutId.B3: _Kernel(
        _desc("B3", "Monte Carlo integration", "importance sampling",
              probabilistic.B3_DOMAIN, False, True, True),
        probabilistic.B3_REFERENCE,
        evaluate=probabilistic.b3_evaluate,
        refine=probabilistic.b3_refined,
    ),
    PutId.C1: _Kernel(
        _desc("C1", "Gaussian Process Regression", "kernel methods",
              surrogate.C1_DOMAIN, False, False, True),
        surrogate.C1_REFERENCE,
        fit=surrogate.c1_fit,
        evaluate_fitted=surrogate.c1_evaluate_fitted,
    ),
    PutId.C2: _Kernel(
        _desc("C2", "Polynomial Chaos Expansion", "orthogonal basis",
              surrogate.C2_DOMAIN, False, False, True),
        surrogate.C2_REFERENCE,
        fit=surrogate.c2_fit,
        evaluate_fitted=surrogate.c2_evaluate_fitted,
    ),
    PutId.C3: _Kernel(
        _desc("C3", "Neural-net surrogate", "MLP substitution",
              surrogate.C3_DOMAIN, True, True, True),
        surrogate.C3_REFERENCE,
        fit=surrogate.c3_fit,
        evaluate_fitted=surrogate.c3_evaluate_fitted,
        fit_seeded=True,
        snapshot_trajectory=True,
    ),
    PutId.D1: _Kernel(
        _desc("D1", "Multi-Layer Perceptron", "backpropagation",
              ml.D1_DOMAIN, True, True, True),
        ml.D1_REFERENCE,
        fit=ml.d1_fit,
        evaluate_fitted=ml.d1_evaluate_fitted,
        fit_seeded=True,
        snapshot_trajectory=True,
    ),
    PutId.D2: _Kernel(
        _desc("D2", "Support Vector Machine", "convex optimisation",
              ml.D2_DOMAIN, False, False, False),
        ml.D2_REFERENCE,
        fit=ml.d2_fit,
        evaluate_fitted=ml.d2_evaluate_fitted,
    ),
    PutId.D3: _Kernel(
        _desc("D3", "Logistic Regression", "maximum likelihood",
              ml.D3_DOMAIN, False, False, False),
        ml.D3_REFERENCE,
        fit=ml.d3_fit,
        evaluate_fitted=ml.d3_evaluate_fitted,
    ),
}

_FIT_CACHE: dict = {}


def _kernel(put) -> _Kernel:
    try:
        return _REGISTRY[PutId(put)]
    except (ValueError, KeyError):
        raise UnknownPut(f"no such program: {put!r}") from None


def list_puts():
    """The twelve descriptors in fixed A1..D3 order."""
    return [_REGISTRY[p].descriptor for p in PutId]


@dataclass(frozen=True)
class Program:
    """A kernel plus parameter overrides (the original has none)."""

    put: PutId
    overrides: Tuple[Tuple[str, object], ...] = ()
    level: int = 0
    strict: bool = True
    label: str = "original"

    def descriptor(self) -> PutDescriptor:
        return _kernel(self.put).descriptor

    def params(self) -> dict:
        k = _kernel(self.put)
        p = dict(k.reference)
        for key, value in self.overrides:
            if key not in p:
                raise KeyError(f"{self.put.value} has no parameter {key!r}")
            p[key] = value
        if self.level and k.fit is None:
            if k.refine is None:
                raise ValueError(f"{self.put.value} is not refinable")
            p = k.refine(p, self.level)
        return p

    def refined(self, level: int) -> "Program":
        return Program(self.put, self.overrides, self.level + level,
                       self.strict, self.label)

    def key(self):
        return (self.put.value, self.overrides, self.level)

    # -- evaluation ---------------------------------------------------------

    def _check_domain(self, x):
        lo, hi = self.descriptor().input_domain
        if np.any(x < lo) or np.any(x > hi):
            raise DomainViolation(
                f"input outside [{lo}, {hi}] for {self.put.value}")

    def _finite_gate(self, out):
        if self.strict and not np.all(np.isfinite(out)):
            raise NonFiniteOutput(f"{self.put.value} produced a non-finite value")
        return out

    def _fitted(self, seed, snapshot_epochs=None):
        k = _kernel(self.put)
        seed_key = seed if k.fit_seeded else None
        snap_key = tuple(snapshot_epochs) if snapshot_epochs else None
        key = (self.key(), seed_key, snap_key)
        hit = _FIT_CACHE.get(key)
        if hit is None:
            p = dict(_kernel(self.put).reference)
            for kk, vv in self.overrides:
                p[kk] = vv
            if k.fit_seeded:
                if snap_key:
                    hit = k.fit(p, seed, self.level, snap_key)
                else:
                    hit = k.fit(p, seed, self.level)[0]
            else:
                hit = k.fit(p, self.level)
            if len(_FIT_CACHE) > 4096:
                _FIT_CACHE.clear()
            _FIT_CACHE[key] = hit
        return hit

    def evaluate(self, x, seed: int = 0):
        """Vectorized evaluation; scalar in, scalar out."""
        k = _kernel(self.put)
        scalar = np.isscalar(x) or np.ndim(x) == 0
        xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
        self._check_domain(xa)
        if k.fit is not None:
            p = self.params()
            if k.fit_seeded:
                fit = self._fitted(seed)
            else:
                fit = self._fitted(seed)
            out = k.evaluate_fitted(xa, p, fit)
        else:
            out = k.evaluate(xa, seed, self.params())
        out = self._finite_gate(np.asarray(out, dtype=np.float64))
        return float(out[0]) if scalar else out

    def trajectory(self, x, seed: int = 0, steps: int = 32):
        k = _kernel(self.put)
        if not k.descriptor.trajectory_capable:
            raise NotTrajectoryCapable(
                f"{self.put.value} has no trajectory output")
        if steps < 2:
            raise ValueError("steps must be >= 2")
        xa = np.asarray(float(x))
        self._check_domain(xa)
        p = self.params()
        if k.snapshot_trajectory:
            epochs = np.unique(
                np.round(np.linspace(0, p["epochs"] * 2 ** self.level, steps))
            ).astype(int)
            if len(epochs) != steps:
                raise ValueError("steps exceeds the training resolution")
            _, snaps = self._fitted(seed, snapshot_epochs=tuple(epochs))
            out = np.array([
                k.evaluate_fitted(np.atleast_1d(xa), p, snaps[e])[0]
                for e in epochs
            ])
        else:
            out = k.trajectory(xa, seed, steps, p)
        return self._finite_gate(np.asarray(out, dtype=np.float64))


def original(put) -> Program:
    try:
        return Program(PutId(put))
    except ValueError:
        raise UnknownPut(f"no such program: {put!r}") from None


def evaluate_put(put, x: float, seed: int = 0) -> float:
    """Scalar evaluation of the unmutated kernel."""
    return original(put).evaluate(float(x), seed)


def evaluate_trajectory(put, x: float, seed: int = 0, steps: int = 32):
    return original(put).trajectory(float(x), seed, steps)


def domain_points(put, count: int, margin: float = 0.0) -> np.ndarray:
    """Evenly spaced in-domain points, optionally shrunk by a margin fraction."""
    lo, hi = _kernel(put).descriptor.input_domain
    pad = (hi - lo) * margin
    return np.linspace(lo + pad, hi - pad, count)
