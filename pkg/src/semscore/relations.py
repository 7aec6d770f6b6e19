"""Meta-patterns and the per-(program, pattern) metamorphic relation sets.

Each relation is built from one of a few reusable shapes: residual
conservation checks, paired-difference monotonicity/ordering checks with a
signed-rank verdict, convergence ladders, and time-warping comparisons.
Every concrete relation pins its own windows, transforms and tolerances;
calibrated quantities (warp thresholds, level anchors) are computed once
against the reference kernel and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import UnknownPut
from .kernels import PutId, original
from .kernels.ml import d1_curve
from .kernels.probabilistic import b2_scale, b3_exact, B2_REFERENCE
from .kernels.surrogate import c1_target, c2_target, c3_target
from .rng import stream, substream_seed


class MetaPattern(str, Enum):
    MP1 = "MP1"   # conservation
    MP2 = "MP2"   # monotonicity
    MP3 = "MP3"   # convergence
    MP4 = "MP4"   # trajectory
    MP5 = "MP5"   # partial order
    MP_EQ = "MP_eq"  # degenerate equality; never part of campaign cells


CAMPAIGN_PATTERNS = (MetaPattern.MP1, MetaPattern.MP2, MetaPattern.MP3,
                     MetaPattern.MP4, MetaPattern.MP5)


class CellDensity(str, Enum):
    SUBSTANTIAL = "substantial"
    MODERATE = "moderate"
    VACANT = "vacant"


_D = {"**": CellDensity.SUBSTANTIAL, "*": CellDensity.MODERATE,
      "o": CellDensity.VACANT}

# Rows A1..D3, columns MP1..MP5. Tallies: 30 substantial, 24 moderate,
# 6 vacant; every program's primary pattern is substantial.
_DENSITY_ROWS = {
    PutId.A1: ("**", "*", "**", "**", "*"),
    PutId.A2: ("**", "o", "*", "*", "**"),
    PutId.A3: ("**", "*", "**", "**", "*"),
    PutId.B1: ("**", "*", "o", "o", "*"),
    PutId.B2: ("*", "**", "**", "**", "*"),
    PutId.B3: ("**", "*", "**", "*", "o"),
    PutId.C1: ("*", "**", "**", "*", "**"),
    PutId.C2: ("**", "*", "**", "*", "**"),
    PutId.C3: ("*", "*", "**", "**", "**"),
    PutId.D1: ("*", "**", "*", "*", "**"),
    PutId.D2: ("*", "**", "*", "o", "**"),
    PutId.D3: ("**", "**", "*", "o", "**"),
}

_PRIMARY = {
    PutId.A1: MetaPattern.MP1, PutId.A2: MetaPattern.MP1,
    PutId.A3: MetaPattern.MP1, PutId.B1: MetaPattern.MP1,
    PutId.B2: MetaPattern.MP2, PutId.B3: MetaPattern.MP1,
    PutId.C1: MetaPattern.MP5, PutId.C2: MetaPattern.MP5,
    PutId.C3: MetaPattern.MP5, PutId.D1: MetaPattern.MP2,
    PutId.D2: MetaPattern.MP2, PutId.D3: MetaPattern.MP2,
}


def density(put, mp: MetaPattern) -> CellDensity:
    if mp == MetaPattern.MP_EQ:
        raise ValueError("the equality pattern has no campaign cell")
    try:
        row = _DENSITY_ROWS[PutId(put)]
    except (ValueError, KeyError):
        raise UnknownPut(f"no such program: {put!r}") from None
    return _D[row[CAMPAIGN_PATTERNS.index(MetaPattern(mp))]]


def primary_mp(put) -> MetaPattern:
    try:
        return _PRIMARY[PutId(put)]
    except (ValueError, KeyError):
        raise UnknownPut(f"no such program: {put!r}") from None


@dataclass(frozen=True)
class MrInstance:
    """One metamorphic relation bound to a (program, pattern) cell."""

    mr_id: str
    put: PutId
    mp: MetaPattern
    description: str
    tolerance: float
    replicate_sensitive: bool = False
    source_window: Optional[Tuple[float, float]] = None
    input_transform: Optional[Callable] = None
    relation: Optional[Callable] = None
    _residuals: Optional[Callable] = None
    _paired_diffs: Optional[Callable] = None
    _error_ladder: Optional[Callable] = None
    _dtw_pair: Optional[Callable] = None

    def residuals(self, program, seed):
        return self._residuals(program, seed)

    def paired_diffs(self, program, seed):
        return self._paired_diffs(program, seed)

    def error_ladder(self, program, seed):
        return self._error_ladder(program, seed)

    def dtw_pair(self, program, seed):
        return self._dtw_pair(program, seed)


_CAL: dict = {}


def _calibrated(mr_id, fn):
    if mr_id not in _CAL:
        _CAL[mr_id] = fn()
    return _CAL[mr_id]


def _sources(mr_id, seed, lo, hi, n):
    return stream("mr-src", mr_id, seed).uniform(lo, hi, n)


def _clamped_shift(put, *deltas):
    lo, hi = original(put).descriptor().input_domain
    return lambda x: [min(max(x + d, lo), hi) for d in deltas]


def _rep_mean(program, xs, seed, reps, tag):
    if reps <= 1:
        return program.evaluate(xs, seed=substream_seed(tag, seed, 0))
    if program.put == PutId.B2:
        # chain randomness is per batch column, so replicates tile cheaply
        xs = np.asarray(xs, dtype=np.float64)
        tiled = program.evaluate(np.tile(xs, reps),
                                 seed=substream_seed(tag, seed, 0))
        return tiled.reshape(reps, xs.size).mean(axis=0)
    return np.mean([program.evaluate(xs, seed=substream_seed(tag, seed, r))
                    for r in range(reps)], axis=0)


# ---------------------------------------------------------------------------
# relation shapes

def residual_mr(mr_id, put, desc, tol, res_fn, transform=None,
                replicate_sensitive=False):
    return MrInstance(
        mr_id, PutId(put), MetaPattern.MP1, desc, tol,
        replicate_sensitive=replicate_sensitive,
        input_transform=transform or (lambda x: [x]),
        relation=lambda lhs, rhs, eps: abs(lhs - rhs) <= eps,
        _residuals=res_fn)


def pair_mr(mr_id, put, mp, desc, viol_fn, transform, alpha=0.05,
            replicate_sensitive=False, window=None):
    return MrInstance(
        mr_id, PutId(put), MetaPattern(mp), desc, alpha,
        replicate_sensitive=replicate_sensitive,
        source_window=window,
        input_transform=transform,
        relation=lambda src, fol, _a: fol >= src,
        _paired_diffs=viol_fn)


def ladder_mr(mr_id, put, desc, ladder_fn, order_band=0.5,
              replicate_sensitive=False, transform=None):
    return MrInstance(
        mr_id, PutId(put), MetaPattern.MP3, desc, order_band,
        replicate_sensitive=replicate_sensitive,
        input_transform=transform or (lambda x: [x]),
        _error_ladder=ladder_fn)


def dtw_mr(mr_id, put, desc, pair_fn, transform=None,
           replicate_sensitive=False):
    # tolerance field mirrors the calibrated threshold once computed;
    # the verdict itself takes the threshold from dtw_pair.
    return MrInstance(
        mr_id, PutId(put), MetaPattern.MP4, desc, np.inf,
        replicate_sensitive=replicate_sensitive,
        input_transform=transform or (lambda x: [x]),
        _dtw_pair=pair_fn)


def smoothness_ladder(probes, h0, n_levels=4, expected=2.0):
    """Central-difference derivative estimates must converge at order ~2."""
    probes = np.asarray(probes, dtype=np.float64)

    def ladder(program, seed):
        hs = h0 / 2.0 ** np.arange(n_levels + 1)
        ests = []
        for h in hs:
            lhs = program.evaluate(probes + h, seed=seed)
            rhs = program.evaluate(probes - h, seed=seed)
            ests.append((lhs - rhs) / (2.0 * h))
        ref = ests[-1]
        errs = [float(np.sqrt(np.mean((e - ref) ** 2))) for e in ests[:-1]]
        return hs[:-1], errs, expected

    return ladder


def refinement_ladder(probes, target_fn, expected, levels=(0, 1, 2),
                      reps=1, tag="refine"):
    """Errors against the modeled target must shrink across refinements."""
    probes = np.asarray(probes, dtype=np.float64)
    truth = None if target_fn is None else target_fn

    def ladder(program, seed):
        errs = []
        for level in levels:
            prog = program.refined(level) if level else program
            ref = truth(probes)
            if reps > 1 and prog.put == PutId.B2:
                vals = prog.evaluate(np.tile(probes, reps),
                                     seed=substream_seed(tag, seed, level))
                vals = vals.reshape(reps, probes.size)
            elif reps > 1:
                vals = np.stack([
                    prog.evaluate(probes, seed=substream_seed(tag, seed, level, r))
                    for r in range(reps)])
            else:
                vals = prog.evaluate(probes, seed=substream_seed(tag, seed, level))
            errs.append(float(np.sqrt(np.mean((vals - ref) ** 2))))
        hs = [2.0 ** -l for l in levels]
        return hs, errs, expected

    return ladder


def self_refinement_ladder(probes, ref_level, expected, levels=(0, 1, 2)):
    """Errors against a much finer run of the same program."""
    probes = np.asarray(probes, dtype=np.float64)

    def ladder(program, seed):
        ref = program.refined(ref_level).evaluate(probes, seed=seed)
        errs = []
        for level in levels:
            prog = program.refined(level) if level else program
            vals = prog.evaluate(probes, seed=seed)
            errs.append(float(np.sqrt(np.mean((vals - ref) ** 2))))
        hs = [2.0 ** -l for l in levels]
        return hs, errs, expected

    return ladder


def _dtw(a, b):
    from .verify import dtw_distance
    return dtw_distance(a, b)


def traj_pair(mr_id, put, mode, steps, delta=0.0, cal_points=(),
              cal_mult=3.0, floor=1e-9, smooth=False, level=1):
    """Build a trajectory-comparison closure with a calibrated threshold."""

    def calibrate():
        prog = original(put)
        worst = floor
        for k, x in enumerate(cal_points):
            a, b = make_pair(prog, substream_seed("mr-cal", mr_id, k), x)
            worst = max(worst, _dtw(a, b))
        return cal_mult * worst

    def make_pair(program, seed, x):
        if mode == "x_pert":
            a = program.trajectory(x, seed=seed, steps=steps)
            b = program.trajectory(x + delta, seed=seed, steps=steps)
        elif mode == "seed_pair":
            a = program.trajectory(x, seed=seed, steps=steps)
            b = program.trajectory(x, seed=substream_seed("alt", seed), steps=steps)
        elif mode == "refined":
            a = program.trajectory(x, seed=seed, steps=steps)
            b = program.refined(level).trajectory(x, seed=seed, steps=steps)
        elif mode == "smooth_self":
            a = program.trajectory(x, seed=seed, steps=steps)
            b = np.convolve(a, [0.25, 0.5, 0.25], mode="same")
            b[0], b[-1] = a[0], a[-1]
        else:
            raise ValueError(mode)
        return a, b

    def pair_fn(program, seed):
        x = float(cal_points[stream("mr-pick", mr_id, seed).integers(len(cal_points))])
        a, b = make_pair(program, seed, x)
        thr = _calibrated(mr_id, calibrate)
        return a, b, thr

    return pair_fn


def sweep_pair(mr_id, put, base_window, step, count, shift, cal_mult=3.0,
               floor=1e-9, reps=1):
    """Output profile along an input ladder, compared with a shifted ladder."""

    def profile(program, x0, seed):
        ladder = x0 + step * np.arange(count)
        return _rep_mean(program, ladder, seed, reps, "sweep")

    def make_pair(program, seed, x0):
        return profile(program, x0, seed), profile(program, x0 + shift, seed)

    def calibrate():
        prog = original(put)
        worst = floor
        for k in range(4):
            x0 = base_window[0] + (base_window[1] - base_window[0]) * k / 3.0
            a, b = make_pair(prog, substream_seed("mr-cal", mr_id, k), x0)
            worst = max(worst, _dtw(a, b))
        return cal_mult * worst

    def pair_fn(program, seed):
        x0 = float(stream("mr-src", mr_id, seed).uniform(*base_window))
        a, b = make_pair(program, seed, x0)
        return a, b, _calibrated(mr_id, calibrate)

    return pair_fn


def monotone_viol(mr_id, put, window, delta, n=30, direction=+1, reps=1,
                  observable=None, tag="mono"):
    """Violation-oriented diffs for an expected-monotone response."""

    def get(program, xs, seed):
        if observable is None:
            return _rep_mean(program, xs, seed, reps, tag)
        steps, idx = observable
        s = substream_seed(tag, seed, 0)
        return np.array([program.trajectory(float(x), seed=s, steps=steps)[idx]
                         for x in xs])

    def viol_fn(program, seed):
        xs = _sources(mr_id, seed, *window, n=n)
        src = get(program, xs, seed)
        fol = get(program, xs + delta, seed)
        return direction * (src - fol)

    return viol_fn, _clamped_shift(put, delta)


def err_to_target(program, xs, target_fn, seed, reps, level=0, tag="fid"):
    prog = program.refined(level) if level else program
    vals = _rep_mean(prog, xs, seed, reps, f"{tag}{level}")
    return np.abs(vals - target_fn(xs))


# ---------------------------------------------------------------------------
# per-program relation sets

def _a1_mrs():
    put = PutId.A1
    z_mid = 12  # trajectory checkpoint near half horizon (steps=26)

    def parity_scalar(program, seed):
        xs = _sources("A1-MP1-a", seed, 0.2, 1.9, 10)
        return program.evaluate(xs, seed=seed) - program.evaluate(-xs, seed=seed)

    def parity_traj(program, seed):
        xs = _sources("A1-MP1-b", seed, 0.3, 1.8, 5)
        out = []
        for x in xs:
            a = program.trajectory(float(x), seed=seed, steps=26)[z_mid]
            b = program.trajectory(float(-x), seed=seed, steps=26)[z_mid]
            out.append(a - b)
        return np.array(out)

    def mono_scale_viol(program, seed):
        xs = _sources("A1-MP2-a", seed, 0.55, 1.45, 30)
        s = substream_seed("mono", seed, 0)
        src = np.array([program.trajectory(float(0.88 * x), seed=s, steps=26)[5]
                        for x in xs])
        fol = np.array([program.trajectory(float(x), seed=s, steps=26)[5]
                        for x in xs])
        return src - fol  # contraction toward zero must not raise early z

    def fidelity_viol(program, seed):
        xs = _sources("A1-MP5-a", seed, 0.3, 1.6, 12)
        ref = program.refined(2).evaluate(xs, seed=seed)
        e0 = np.abs(program.evaluate(xs, seed=seed) - ref)
        e1 = np.abs(program.refined(1).evaluate(xs, seed=seed) - ref)
        return e1 - e0 + 1e-12  # strict improvement expected far from the floor

    def launch_invariance(program, seed):
        from .kernels.numeric import A1_REFERENCE
        x = float(_sources("A1-MP4-c", seed, -1.9, 1.9, 1)[0])
        a = np.array([program.trajectory(x, seed=seed, steps=26)[0],
                      program.trajectory(0.6 * x, seed=seed, steps=26)[0]])
        b = np.full(2, A1_REFERENCE["z_init"])
        return a, b, 1e-6

    return [
        residual_mr("A1-MP1-a", put,
                    "mirror symmetry: the height observable is invariant "
                    "under sign flip of the initial coordinate", 1e-9,
                    parity_scalar, transform=lambda x: [-x]),
        residual_mr("A1-MP1-b", put,
                    "mirror symmetry holds midway along the trajectory", 1e-9,
                    parity_traj, transform=lambda x: [-x]),
        pair_mr("A1-MP2-a", put, MetaPattern.MP2,
                "early-time height grows with the initial coordinate scale",
                mono_scale_viol, lambda x: [0.88 * x]),
        ladder_mr("A1-MP3-a", put,
                  "halving the integration step converges at fourth order",
                  self_refinement_ladder(np.linspace(0.3, 1.6, 6), 3, 4.2),
                  transform=lambda x: [x]),
        ladder_mr("A1-MP3-b", put,
                  "derivative estimates converge at second order in the "
                  "probe spacing",
                  smoothness_ladder([0.45, 0.95], 0.1)),
        dtw_mr("A1-MP4-a", put,
               "small initial perturbation keeps the height trajectory close",
               traj_pair("A1-MP4-a", put, "x_pert", 26, delta=0.01,
                         cal_points=(0.4, 0.8, 1.3, 1.7)),
               transform=_clamped_shift(put, 0.01)),
        dtw_mr("A1-MP4-b", put,
               "refining the step leaves the trajectory shape unchanged",
               traj_pair("A1-MP4-b", put, "refined", 26,
                         cal_points=(0.5, 1.0, 1.5), cal_mult=4.0,
                         floor=1e-4)),
        dtw_mr("A1-MP4-c", put,
               "trajectories launch from the shared initial height at "
               "every input", launch_invariance,
               transform=lambda x: [0.6 * x]),
        pair_mr("A1-MP5-a", put, MetaPattern.MP5,
                "a finer integration step never sits farther from the "
                "fine-step reference", fidelity_viol, lambda x: [x]),
    ]


def _a2_mrs():
    put = PutId.A2

    def even(program, x, seed):
        return 0.5 * (program.evaluate(x, seed=seed)
                      + program.evaluate(-x, seed=seed))

    def odd_ratio(program, x, seed):
        o = 0.5 * (program.evaluate(x, seed=seed)
                   - program.evaluate(-x, seed=seed))
        return o / np.sin(1.3 * x)

    def even_affine(program, seed):
        xs = _sources("A2-MP1-a", seed, 0.3, 1.45, 12)
        mid = np.sqrt((xs ** 2 + 0.04) / 2.0)
        return (even(program, xs, seed) + even(program, np.full_like(xs, 0.2), seed)
                - 2.0 * even(program, mid, seed))

    def odd_affine(program, seed):
        xs = _sources("A2-MP1-b", seed, 0.35, 1.45, 12)
        mid = np.sqrt((xs ** 2 + 0.09) / 2.0)
        return (odd_ratio(program, xs, seed)
                + odd_ratio(program, np.full_like(xs, 0.3), seed)
                - 2.0 * odd_ratio(program, mid, seed))

    chain_v, chain_t = monotone_viol("A2-MP5-a", put, (-1.3, 1.3), 1e-6)

    def step_dom_viol(program, seed):
        xs = _sources("A2-MP5-b", seed, -1.3, 1.3, 30)
        d = 1e-6
        f0 = program.evaluate(xs, seed=seed)
        f1 = program.evaluate(xs + d, seed=seed)
        f2 = program.evaluate(xs + 2 * d, seed=seed)
        # two half-steps must compose to the full step within slack
        return np.abs(f2 - 2.0 * f1 + f0) - 1e-7

    return [
        residual_mr("A2-MP1-a", put,
                    "even part of the determinant is affine in x^2 "
                    "(multilinearity of the perturbed diagonal)", 1e-6,
                    even_affine, transform=lambda x: [-x, 0.2, -0.2]),
        residual_mr("A2-MP1-b", put,
                    "odd part divided by the oscillatory factor is affine "
                    "in x^2", 2e-5, odd_affine, transform=lambda x: [-x, 0.3, -0.3]),
        ladder_mr("A2-MP3-a", put,
                  "determinant varies smoothly: derivative estimates "
                  "converge at second order",
                  smoothness_ladder([0.5, 0.9], 0.08)),
        dtw_mr("A2-MP4-a", put,
               "the determinant profile along an input ladder deforms "
               "continuously under a small ladder shift",
               sweep_pair("A2-MP4-a", put, (-1.45, -0.1), 0.06, 25, 0.01),
               transform=_clamped_shift(put, 0.01)),
        pair_mr("A2-MP5-a", put, MetaPattern.MP5,
                "output order is preserved along a fine input chain",
                chain_v, chain_t),
        pair_mr("A2-MP5-b", put, MetaPattern.MP5,
                "half-step increments compose consistently to the full step",
                step_dom_viol, _clamped_shift(put, 1e-6, 2e-6)),
    ]


_A3_DECAY1 = None


def _a3_exact():
    global _A3_DECAY1
    if _A3_DECAY1 is None:
        from .kernels.numeric import A3_REFERENCE as P
        t = P["t_final"]
        probe = P["probe"]
        c1 = np.exp(-np.pi ** 2 * t) * np.sin(np.pi * probe)
        c2 = np.exp(-4.0 * np.pi ** 2 * t) * np.sin(2.0 * np.pi * probe)
        _A3_DECAY1 = (c1, c2)
    return _A3_DECAY1


def a3_exact_solution(x):
    c1, c2 = _a3_exact()
    return c1 + c2 * np.asarray(x, dtype=np.float64)


def _a3_mrs():
    put = PutId.A3

    def affinity(program, seed):
        xs = _sources("A3-MP1-a", seed, -0.7, 0.7, 12)
        d = 0.25
        return (program.evaluate(xs - d, seed=seed)
                + program.evaluate(xs + d, seed=seed)
                - 2.0 * program.evaluate(xs, seed=seed))

    def odd_ratio(program, seed):
        xs = _sources("A3-MP1-b", seed, 0.25, 1.0, 10)
        o = (program.evaluate(xs, seed=seed)
             - program.evaluate(-xs, seed=seed)) / xs
        o0 = (program.evaluate(0.8, seed=seed)
              - program.evaluate(-0.8, seed=seed)) / 0.8
        return o - o0

    mono_v, mono_t = monotone_viol("A3-MP2-a", put, (-0.95, 0.65), 0.3)

    def fidelity_viol(program, seed):
        xs = _sources("A3-MP5-a", seed, -0.9, 0.9, 12)
        e0 = err_to_target(program, xs, a3_exact_solution, seed, 1, 0)
        e1 = err_to_target(program, xs, a3_exact_solution, seed, 1, 1)
        return e1 - e0

    return [
        residual_mr("A3-MP1-a", put,
                    "probe temperature responds affinely to the initial "
                    "mode weight", 1e-8, affinity,
                    transform=_clamped_shift(put, -0.25, 0.25)),
        residual_mr("A3-MP1-b", put,
                    "odd response normalised by the input is constant", 1e-8,
                    odd_ratio, transform=lambda x: [-x, 0.8, -0.8]),
        pair_mr("A3-MP2-a", put, MetaPattern.MP2,
                "probe temperature grows with the second-mode weight",
                mono_v, mono_t),
        ladder_mr("A3-MP3-a", put,
                  "halving the grid spacing converges to the closed-form "
                  "solution at second order",
                  refinement_ladder(np.linspace(-0.8, 0.8, 5),
                                    a3_exact_solution, 2.0)),
        ladder_mr("A3-MP3-b", put,
                  "grid refinement converges at second order on an "
                  "off-centre probe set",
                  refinement_ladder(np.linspace(-0.35, 0.95, 5),
                                    a3_exact_solution, 2.0)),
        dtw_mr("A3-MP4-a", put,
               "a small initial-mode perturbation keeps the cooling "
               "trajectory close",
               traj_pair("A3-MP4-a", put, "x_pert", 20, delta=0.05,
                         cal_points=(-0.8, -0.2, 0.4, 0.9)),
               transform=_clamped_shift(put, 0.05)),
        dtw_mr("A3-MP4-b", put,
               "the cooling trajectory is smooth against its own moving "
               "average",
               traj_pair("A3-MP4-b", put, "smooth_self", 20,
                         cal_points=(-0.6, 0.1, 0.8), cal_mult=4.0,
                         floor=1e-6)),
        pair_mr("A3-MP5-a", put, MetaPattern.MP5,
                "a refined grid never sits farther from the closed-form "
                "solution", fidelity_viol, lambda x: [x]),
    ]


def _b1_mrs():
    put = PutId.B1

    def identity(program, seed):
        xs = _sources("B1-MP1-a", seed, 0.3, 7.8, 12)
        return program.evaluate(xs, seed=seed) * (5.0 * xs + 40.0) - (2.0 * xs + 13.0)

    def ratio_identity(program, seed):
        xs = _sources("B1-MP1-b", seed, 0.5, 7.8, 12)
        lhs = program.evaluate(xs, seed=seed) / program.evaluate(0.8 * xs, seed=seed)
        rhs = ((2.0 * xs + 13.0) * (4.0 * xs + 40.0)
               / ((1.6 * xs + 13.0) * (5.0 * xs + 40.0)))
        return lhs - rhs

    def mono_viol(program, seed):
        xs = _sources("B1-MP2-a", seed, 0.3, 6.0, 30)
        return program.evaluate(xs, seed=seed) - program.evaluate(1.3 * xs, seed=seed)

    def pull_viol(program, seed):
        xs = _sources("B1-MP5-a", seed, 0.3, 6.0, 30)
        fol = xs + 0.3 * (8.0 - xs)
        prior_mean = 0.4
        return (np.abs(program.evaluate(fol, seed=seed) - prior_mean)
                - np.abs(program.evaluate(xs, seed=seed) - prior_mean))

    return [
        residual_mr("B1-MP1-a", put,
                    "posterior mean satisfies its defining linear identity "
                    "in the prior strength", 1e-8, identity),
        residual_mr("B1-MP1-b", put,
                    "posterior means at two prior strengths satisfy the "
                    "closed-form ratio", 1e-8, ratio_identity,
                    transform=lambda x: [0.8 * x]),
        pair_mr("B1-MP2-a", put, MetaPattern.MP2,
                "posterior mean grows with prior strength",
                mono_viol, lambda x: [min(1.3 * x, 8.0)]),
        pair_mr("B1-MP5-a", put, MetaPattern.MP5,
                "stronger priors pull the posterior mean toward the prior",
                pull_viol, lambda x: [x + 0.3 * (8.0 - x)]),
    ]


def _b2_anchor(probes, reps=24):
    prog = original(PutId.B2)
    runs = prog.evaluate(np.tile(probes, reps),
                         seed=substream_seed("mr-cal", "b2anchor"))
    runs = runs.reshape(reps, probes.size)
    return runs.mean(axis=0), runs.std(axis=0)


def _b2_mrs():
    put = PutId.B2
    guard_probes = np.linspace(2.2, 3.8, 30)
    inc_probes = np.linspace(0.3, 2.2, 6)

    def increments(program, seed):
        d = 1.6
        f0 = _rep_mean(program, inc_probes, seed, 8, "inc")
        f1 = _rep_mean(program, inc_probes + d, seed, 8, "inc")
        return (f1 - f0) - B2_REFERENCE["scale_slope"] * 2.0 * d

    def guard_viol(program, seed):
        anchor, sd = _calibrated("B2-guard", lambda: _b2_anchor(guard_probes))
        slack = 1.2 * float(np.median(sd)) / np.sqrt(10.0)
        fbar = _rep_mean(program, guard_probes, seed, 10, "guard")
        return (fbar - anchor) - slack

    def mono_viol(program, seed):
        xs = _sources("B2-MP2-a", seed, 0.2, 3.1, 30)
        s = substream_seed("mono", seed, 0)
        return program.evaluate(xs, seed=s) - program.evaluate(xs + 0.7, seed=s)

    def truth(x):
        return B2_REFERENCE["shape"] * b2_scale(x, B2_REFERENCE)

    def fidelity_viol(program, seed):
        probes = np.tile(np.array([0.8, 2.0, 3.2]), 6)
        s = substream_seed("b2fid", seed)
        e0 = np.abs(program.evaluate(probes, seed=s) - truth(probes))
        e1 = np.abs(program.refined(1).evaluate(probes, seed=s) - truth(probes))
        return e1 - e0 - 0.12

    return [
        residual_mr("B2-MP1-a", put,
                    "kept-chain mean shifts by the modeled amount under a "
                    "scale-law increment", 0.35, increments,
                    transform=lambda x: [min(x + 1.6, 4.0)],
                    replicate_sensitive=True),
        pair_mr("B2-MP2-a", put, MetaPattern.MP2,
                "kept-chain mean grows with the target scale",
                mono_viol, lambda x: [min(x + 0.7, 4.0)],
                replicate_sensitive=True),
        pair_mr("B2-MP2-b", put, MetaPattern.MP2,
                "kept-chain mean does not drift above the calibrated "
                "scale-law track", guard_viol, lambda x: [x],
                replicate_sensitive=True),
        ladder_mr("B2-MP3-a", put,
                  "chain-mean error against the stationary mean shrinks as "
                  "the kept length doubles",
                  refinement_ladder(np.array([1.0, 2.6, 3.6]), truth, 0.5,
                                    reps=12)),
        ladder_mr("B2-MP3-b", put,
                  "kept-length refinement converges on a second probe set",
                  refinement_ladder(np.array([0.4, 1.5, 3.0]), truth, 0.5,
                                    reps=12)),
        dtw_mr("B2-MP4-a", put,
               "chains at nearby targets stay close under common random "
               "numbers",
               traj_pair("B2-MP4-a", put, "x_pert", 40, delta=0.15,
                         cal_points=(0.5, 1.5, 2.5, 3.5)),
               transform=lambda x: [min(x + 0.15, 4.0)],
               replicate_sensitive=True),
        dtw_mr("B2-MP4-b", put,
               "independently seeded chains share their shape budget",
               traj_pair("B2-MP4-b", put, "seed_pair", 40,
                         cal_points=(0.8, 2.0, 3.2)),
               replicate_sensitive=True),
        pair_mr("B2-MP5-a", put, MetaPattern.MP5,
                "doubling the kept length never worsens the stationary-mean "
                "error beyond slack", fidelity_viol, lambda x: [x],
                replicate_sensitive=True),
    ]


def _b3_mrs():
    put = PutId.B3

    def product_identity(program, seed):
        xs = _sources("B3-MP1-a", seed, 0.15, 1.9, 10)
        vals = _rep_mean(program, xs, seed, 4, "b3prod")
        return vals * np.sqrt(1.0 + 2.0 * xs) - 1.0

    def crn_ratio(program, seed):
        xs = _sources("B3-MP1-b", seed, 0.3, 1.9, 10)
        s = substream_seed("b3ratio", seed, 0)
        r1 = program.evaluate(xs, seed=s) / b3_exact(xs)
        r2 = program.evaluate(0.75 * xs, seed=s) / b3_exact(0.75 * xs)
        return r1 - r2

    def mono_viol(program, seed):
        xs = _sources("B3-MP2-a", seed, 0.12, 1.9, 30)
        s = substream_seed("mono", seed, 0)
        # integrand shrinks pointwise, so the estimate must fall
        return program.evaluate(xs + 0.08, seed=s) - program.evaluate(xs, seed=s)

    return [
        residual_mr("B3-MP1-a", put,
                    "estimate times the closed-form normaliser is one", 0.05,
                    product_identity, replicate_sensitive=True),
        residual_mr("B3-MP1-b", put,
                    "relative sampling error is conserved across nearby "
                    "integrands under common samples", 0.02, crn_ratio,
                    transform=lambda x: [0.75 * x], replicate_sensitive=True),
        pair_mr("B3-MP2-a", put, MetaPattern.MP2,
                "the damped integrand can only lower the estimate",
                mono_viol, lambda x: [min(x + 0.08, 2.0)],
                replicate_sensitive=True),
        ladder_mr("B3-MP3-a", put,
                  "quadrupling the sample count halves the estimate error",
                  refinement_ladder(np.array([0.2, 0.8, 1.6]), b3_exact, 1.0,
                                    reps=6)),
        ladder_mr("B3-MP3-b", put,
                  "sample-count refinement converges on a second probe set",
                  refinement_ladder(np.array([0.4, 1.1, 1.9]), b3_exact, 1.0,
                                    reps=6)),
        dtw_mr("B3-MP4-a", put,
               "the estimate profile over a parameter ladder deforms "
               "continuously",
               sweep_pair("B3-MP4-a", put, (0.1, 0.25), 0.085, 20, 0.01,
                          reps=2),
               transform=_clamped_shift(put, 0.01), replicate_sensitive=True),
    ]


def _c1_mrs():
    put = PutId.C1

    def parity(program, seed):
        xs = _sources("C1-MP1-a", seed, 0.1, 0.95, 10)
        return program.evaluate(xs, seed=seed) + program.evaluate(-xs, seed=seed)

    up_v, up_t = monotone_viol("C1-MP2-a", put, (-0.28, 0.06), 0.22)
    dn_v, dn_t = monotone_viol("C1-MP2-b", put, (0.62, 0.86), 0.07,
                               direction=-1)

    def fidelity_viol(program, seed):
        xs = _sources("C1-MP5-a", seed, -0.9, 0.9, 12)
        e0 = err_to_target(program, xs, c1_target, seed, 1, 0)
        e1 = err_to_target(program, xs, c1_target, seed, 1, 1)
        return e1 - e0 - 0.002

    def envelope_viol(program, seed):
        xs = _sources("C1-MP5-b", seed, -0.98, 0.98, 30)
        bound = 1.12 * float(np.abs(c1_target(np.linspace(-1, 1, 12))).max())
        return np.abs(program.evaluate(xs, seed=seed)) - bound

    return [
        residual_mr("C1-MP1-a", put,
                    "odd target and symmetric design keep the posterior "
                    "mean odd", 1e-7, parity, transform=lambda x: [-x]),
        pair_mr("C1-MP2-a", put, MetaPattern.MP2,
                "prediction rises across the central upslope", up_v, up_t),
        pair_mr("C1-MP2-b", put, MetaPattern.MP2,
                "prediction falls across the outer downslope", dn_v, dn_t),
        ladder_mr("C1-MP3-a", put,
                  "prediction is smooth: derivative estimates converge at "
                  "second order", smoothness_ladder([-0.35, 0.35], 0.12)),
        ladder_mr("C1-MP3-b", put,
                  "densifying the training grid keeps shrinking the error "
                  "to the modeled curve",
                  refinement_ladder(np.linspace(-0.9, 0.9, 7), c1_target,
                                    0.95)),
        dtw_mr("C1-MP4-a", put,
               "the prediction profile deforms continuously under a ladder "
               "shift",
               sweep_pair("C1-MP4-a", put, (-0.95, -0.85), 0.07, 25, 0.012),
               transform=_clamped_shift(put, 0.012)),
        pair_mr("C1-MP5-a", put, MetaPattern.MP5,
                "a denser training set never worsens the held-out error "
                "beyond slack", fidelity_viol, lambda x: [x]),
        pair_mr("C1-MP5-b", put, MetaPattern.MP5,
                "predictions stay inside the training-data envelope",
                envelope_viol, lambda x: [x]),
    ]


def _c2_mrs():
    put = PutId.C2

    def parity(program, seed):
        xs = _sources("C2-MP1-a", seed, 0.1, 0.98, 10)
        return program.evaluate(xs, seed=seed) - program.evaluate(-xs, seed=seed)

    def repro(program, seed):
        xs = _sources("C2-MP1-b", seed, -0.98, 0.98, 12)
        return program.evaluate(xs, seed=seed) - c2_target(xs)

    up_v, up_t = monotone_viol("C2-MP2-a", put, (0.35, 0.88), 0.1)

    def fidelity_viol(program, seed):
        xs = _sources("C2-MP5-a", seed, -0.9, 0.9, 12)
        e0 = err_to_target(program, xs, c2_target, seed, 1, 0)
        e1 = err_to_target(program, xs, c2_target, seed, 1, 1)
        return e1 - e0 - 2e-4

    def envelope_viol(program, seed):
        xs = _sources("C2-MP5-b", seed, -0.98, 0.98, 30)
        bound = 1.1 * float(c2_target(np.array([1.0]))[0])
        return np.abs(program.evaluate(xs, seed=seed)) - bound

    return [
        residual_mr("C2-MP1-a", put,
                    "even target keeps the expansion even", 1e-9, parity,
                    transform=lambda x: [-x]),
        residual_mr("C2-MP1-b", put,
                    "expansion reproduces the modeled curve within the "
                    "truncation budget", 4.2e-3, repro),
        pair_mr("C2-MP2-a", put, MetaPattern.MP2,
                "expansion rises on the positive shoulder", up_v, up_t),
        ladder_mr("C2-MP3-a", put,
                  "doubling the expansion degree shrinks the error at the "
                  "kink-limited rate",
                  refinement_ladder(np.linspace(-0.9, 0.9, 8), c2_target,
                                    3.0)),
        ladder_mr("C2-MP3-b", put,
                  "the expansion is smooth between quadrature nodes",
                  smoothness_ladder([-0.5, 0.5], 0.1)),
        dtw_mr("C2-MP4-a", put,
               "the expansion profile deforms continuously under a ladder "
               "shift",
               sweep_pair("C2-MP4-a", put, (-0.95, -0.85), 0.07, 25, 0.012),
               transform=_clamped_shift(put, 0.012)),
        pair_mr("C2-MP5-a", put, MetaPattern.MP5,
                "a higher-degree expansion never worsens the error beyond "
                "slack", fidelity_viol, lambda x: [x]),
        pair_mr("C2-MP5-b", put, MetaPattern.MP5,
                "the expansion stays inside the target envelope",
                envelope_viol, lambda x: [x]),
    ]


def _c3_mrs():
    put = PutId.C3

    def repro(program, seed):
        xs = _sources("C3-MP1-a", seed, -0.95, 0.95, 10)
        return program.evaluate(xs, seed=seed) - c3_target(xs)

    up1_v, up1_t = monotone_viol("C3-MP2-a", put, (-0.5, 0.2), 0.3)
    up2_v, up2_t = monotone_viol("C3-MP2-b", put, (-0.35, -0.15), 0.5,
                                 reps=2)

    def fidelity_viol(program, seed):
        xs = _sources("C3-MP5-a", seed, -0.9, 0.9, 8)
        viol = []
        for r in range(2):
            s = substream_seed("c3fid", seed, r)
            e0 = np.abs(program.evaluate(xs, seed=s) - c3_target(xs))
            e1 = np.abs(program.refined(1).evaluate(xs, seed=s) - c3_target(xs))
            viol.append(e1 - e0 - 0.05)
        return np.concatenate(viol)

    def envelope_viol(program, seed):
        xs = _sources("C3-MP5-b", seed, -0.98, 0.98, 30)
        return np.abs(program.evaluate(xs, seed=seed)) - 1.25

    return [
        residual_mr("C3-MP1-a", put,
                    "surrogate reproduces the modeled curve within the "
                    "training budget", 0.35, repro, replicate_sensitive=True),
        pair_mr("C3-MP2-a", put, MetaPattern.MP2,
                "surrogate rises across the central upslope", up1_v, up1_t,
                replicate_sensitive=True),
        pair_mr("C3-MP2-b", put, MetaPattern.MP2,
                "surrogate rises under a wide central step", up2_v, up2_t,
                replicate_sensitive=True),
        ladder_mr("C3-MP3-a", put,
                  "surrogate is smooth: derivative estimates converge at "
                  "second order", smoothness_ladder([-0.3, 0.3], 0.15)),
        ladder_mr("C3-MP3-b", put,
                  "surrogate smoothness holds on the shoulders",
                  smoothness_ladder([-0.7, 0.7], 0.12)),
        dtw_mr("C3-MP4-a", put,
               "training trajectories at nearby inputs stay close",
               traj_pair("C3-MP4-a", put, "x_pert", 18, delta=0.1,
                         cal_points=(-0.6, 0.0, 0.5)),
               transform=lambda x: [min(x + 0.1, 1.0)],
               replicate_sensitive=True),
        dtw_mr("C3-MP4-b", put,
               "training trajectories from fresh seeds share their shape "
               "budget",
               traj_pair("C3-MP4-b", put, "seed_pair", 18,
                         cal_points=(-0.4, 0.3, 0.8)),
               replicate_sensitive=True),
        pair_mr("C3-MP5-a", put, MetaPattern.MP5,
                "doubling the training epochs never worsens the fit beyond "
                "slack", fidelity_viol, lambda x: [x],
                replicate_sensitive=True),
        pair_mr("C3-MP5-b", put, MetaPattern.MP5,
                "surrogate stays inside the target envelope", envelope_viol,
                lambda x: [x], replicate_sensitive=True),
    ]


def _d1_mrs():
    put = PutId.D1
    grid = np.linspace(-0.95, 0.95, 16)

    def repro(program, seed):
        xs = _sources("D1-MP1-a", seed, -0.95, 0.95, 10)
        return program.evaluate(xs, seed=seed) - d1_curve(xs)

    def residual_mean(program, seed):
        vals = program.evaluate(grid, seed=seed) - d1_curve(grid)
        return np.array([vals.mean()])

    up1_v, up1_t = monotone_viol("D1-MP2-a", put, (-0.4, 0.1), 0.3)
    up2_v, up2_t = monotone_viol("D1-MP2-b", put, (-0.25, -0.05), 0.5,
                                 reps=2)

    def fidelity_viol(program, seed):
        xs = _sources("D1-MP5-a", seed, -0.9, 0.9, 8)
        viol = []
        for r in range(2):
            s = substream_seed("d1fid", seed, r)
            e0 = np.abs(program.evaluate(xs, seed=s) - d1_curve(xs))
            e1 = np.abs(program.refined(1).evaluate(xs, seed=s) - d1_curve(xs))
            viol.append(e1 - e0 - 0.04)
        return np.concatenate(viol)

    def envelope_viol(program, seed):
        xs = _sources("D1-MP5-b", seed, -0.98, 0.98, 30)
        return np.abs(program.evaluate(xs, seed=seed)) - 1.2

    return [
        residual_mr("D1-MP1-a", put,
                    "regressor reproduces the trend curve within the "
                    "training budget", 0.15, repro, replicate_sensitive=True),
        residual_mr("D1-MP1-b", put,
                    "fitted residuals balance to zero over the domain grid",
                    0.03, residual_mean, replicate_sensitive=True),
        pair_mr("D1-MP2-a", put, MetaPattern.MP2,
                "prediction rises across the central trend", up1_v, up1_t,
                replicate_sensitive=True),
        pair_mr("D1-MP2-b", put, MetaPattern.MP2,
                "prediction rises under a wide central step", up2_v, up2_t,
                replicate_sensitive=True),
        ladder_mr("D1-MP3-a", put,
                  "prediction is smooth: derivative estimates converge at "
                  "second order", smoothness_ladder([-0.3, 0.3], 0.15)),
        dtw_mr("D1-MP4-a", put,
               "training trajectories at nearby inputs stay close",
               traj_pair("D1-MP4-a", put, "x_pert", 18, delta=0.1,
                         cal_points=(-0.5, 0.1, 0.6)),
               transform=lambda x: [min(x + 0.1, 1.0)],
               replicate_sensitive=True),
        pair_mr("D1-MP5-a", put, MetaPattern.MP5,
                "doubling the training epochs never worsens the fit beyond "
                "slack", fidelity_viol, lambda x: [x],
                replicate_sensitive=True),
        pair_mr("D1-MP5-b", put, MetaPattern.MP5,
                "prediction stays inside the trend envelope", envelope_viol,
                lambda x: [x], replicate_sensitive=True),
    ]


def _d2_mrs():
    put = PutId.D2

    def odd(program, seed):
        xs = _sources("D2-MP1-a", seed, 0.1, 1.4, 10)
        return program.evaluate(xs, seed=seed) + program.evaluate(-xs, seed=seed)

    up1_v, up1_t = monotone_viol("D2-MP2-a", put, (-0.55, 0.3), 0.35)
    up2_v, up2_t = monotone_viol("D2-MP2-b", put, (-0.3, 0.1), 0.55)

    def margin_viol(program, seed):
        xs = _sources("D2-MP5-a", seed, 0.12, 0.55, 30)
        return (np.abs(program.evaluate(xs, seed=seed))
                - np.abs(program.evaluate(xs + 0.12, seed=seed)))

    def floor_viol(program, seed):
        xs = _sources("D2-MP5-b", seed, 0.8, 1.2, 30)
        floor = _calibrated("D2-floor", lambda: 0.55 * float(np.min(np.abs(
            original(put).evaluate(np.linspace(0.8, 1.2, 20))))))
        return floor - np.abs(program.evaluate(xs, seed=seed))

    return [
        residual_mr("D2-MP1-a", put,
                    "antisymmetric training data keeps the decision value "
                    "odd", 1e-8, odd, transform=lambda x: [-x]),
        pair_mr("D2-MP2-a", put, MetaPattern.MP2,
                "decision value rises across the boundary", up1_v, up1_t),
        pair_mr("D2-MP2-b", put, MetaPattern.MP2,
                "decision value rises under a wide boundary step",
                up2_v, up2_t),
        ladder_mr("D2-MP3-a", put,
                  "decision value is smooth: derivative estimates converge "
                  "at second order", smoothness_ladder([-0.25, 0.3], 0.15)),
        pair_mr("D2-MP5-a", put, MetaPattern.MP5,
                "confidence grows with distance from the boundary",
                margin_viol, _clamped_shift(put, 0.12)),
        pair_mr("D2-MP5-b", put, MetaPattern.MP5,
                "far points keep a minimum confidence margin", floor_viol,
                lambda x: [x], window=(0.8, 1.2)),
    ]


def _d3_mrs():
    put = PutId.D3

    def parity(program, seed):
        xs = _sources("D3-MP1-a", seed, 0.1, 1.4, 10)
        return (program.evaluate(xs, seed=seed)
                + program.evaluate(-xs, seed=seed) - 1.0)

    def logit(p):
        p = np.clip(p, 1e-12, 1.0 - 1e-12)
        return np.log(p / (1.0 - p))

    def logit_affine(program, seed):
        xs = _sources("D3-MP1-b", seed, -1.0, 1.0, 10)
        d = 0.3
        return (logit(program.evaluate(xs - d, seed=seed))
                + logit(program.evaluate(xs + d, seed=seed))
                - 2.0 * logit(program.evaluate(xs, seed=seed)))

    up1_v, up1_t = monotone_viol("D3-MP2-a", put, (-1.0, 0.6), 0.4)
    up2_v, up2_t = monotone_viol("D3-MP2-b", put, (-0.3, 0.3), 0.25)

    def conf_viol(program, seed):
        xs = _sources("D3-MP5-a", seed, 0.1, 1.2, 30)
        return (np.abs(program.evaluate(xs, seed=seed) - 0.5)
                - np.abs(program.evaluate(xs + 0.25, seed=seed) - 0.5))

    def floor_viol(program, seed):
        xs = _sources("D3-MP5-b", seed, 1.25, 1.45, 30)
        return 0.9 - program.evaluate(xs, seed=seed)

    return [
        residual_mr("D3-MP1-a", put,
                    "class probabilities at mirrored inputs sum to one",
                    1e-8, parity, transform=lambda x: [-x]),
        residual_mr("D3-MP1-b", put,
                    "log-odds respond affinely to the input", 1e-8,
                    logit_affine, transform=_clamped_shift(put, -0.3, 0.3)),
        pair_mr("D3-MP2-a", put, MetaPattern.MP2,
                "positive-class probability rises with the input",
                up1_v, up1_t),
        pair_mr("D3-MP2-b", put, MetaPattern.MP2,
                "probability rises across the boundary band", up2_v, up2_t),
        ladder_mr("D3-MP3-a", put,
                  "probability curve is smooth: derivative estimates "
                  "converge at second order",
                  smoothness_ladder([-0.4, 0.4], 0.15)),
        pair_mr("D3-MP5-a", put, MetaPattern.MP5,
                "confidence grows away from the boundary", conf_viol,
                lambda x: [min(x + 0.25, 1.45)], window=(0.1, 1.45)),
        pair_mr("D3-MP5-b", put, MetaPattern.MP5,
                "far points keep near-certain confidence", floor_viol,
                lambda x: [x], window=(1.25, 1.45)),
    ]


_BUILDERS = {
    PutId.A1: _a1_mrs, PutId.A2: _a2_mrs, PutId.A3: _a3_mrs,
    PutId.B1: _b1_mrs, PutId.B2: _b2_mrs, PutId.B3: _b3_mrs,
    PutId.C1: _c1_mrs, PutId.C2: _c2_mrs, PutId.C3: _c3_mrs,
    PutId.D1: _d1_mrs, PutId.D2: _d2_mrs, PutId.D3: _d3_mrs,
}

_MR_CACHE: dict = {}


def _all_mrs(put: PutId):
    if put not in _MR_CACHE:
        _MR_CACHE[put] = _BUILDERS[put]()
    return _MR_CACHE[put]


def mrs_for(put, mp) -> list:
    """The relation set for one (program, pattern) cell; empty iff vacant."""
    mp = MetaPattern(mp)
    if mp == MetaPattern.MP_EQ:
        raise ValueError("the equality pattern has no campaign cell")
    try:
        put = PutId(put)
    except ValueError:
        raise UnknownPut(f"no such program: {put!r}") from None
    found = [m for m in _all_mrs(put) if m.mp == mp]
    cell = density(put, mp)
    if cell == CellDensity.VACANT:
        assert not found, f"vacant cell {put}/{mp} must stay empty"
    return found


def mr_manifest():
    """Serializable description of every catalogue relation."""
    rows = []
    for put in PutId:
        for mr in _all_mrs(put):
            rows.append({
                "mr_id": mr.mr_id,
                "put": put.value,
                "mp": mr.mp.value,
                "description": mr.description,
                "tolerance": None if np.isinf(mr.tolerance) else mr.tolerance,
                "replicate_sensitive": mr.replicate_sensitive,
            })
    return rows
