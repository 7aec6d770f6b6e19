"""The five semantic operator classes and the per-program variant pools.

Every mutant is a named parameter override of the reference kernel, so the
pool is data: stable across runs, auditable, and serializable. Pool entry
requires the executability/non-triviality prescreen to accept the variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from .errors import NotDeterministicClass, UnknownPut
from .kernels import Program, PutId, domain_points, original, put_class, PutClass
from .relations import MetaPattern


class OperatorClass(str, Enum):
    CE = "CE"  # conservation erosion
    OS = "OS"  # operator substitution
    HP = "HP"  # hyperparameter
    TF = "TF"  # trajectory flip
    SI = "SI"  # structural injection


FAILURE_SEMANTICS = {
    OperatorClass.CE: "conservation-breaking",
    OperatorClass.OS: "monotonicity-breaking",
    OperatorClass.HP: "convergence-breaking",
    OperatorClass.TF: "trajectory-distorting",
    OperatorClass.SI: "fidelity-order-breaking",
}

ALIGNED_MP = {
    OperatorClass.CE: MetaPattern.MP1,
    OperatorClass.OS: MetaPattern.MP2,
    OperatorClass.HP: MetaPattern.MP3,
    OperatorClass.TF: MetaPattern.MP4,
    OperatorClass.SI: MetaPattern.MP5,
}


@dataclass(frozen=True)
class SemanticityFlags:
    crosses_boundary: bool
    domain_knowledge: bool
    changes_class: bool

    def any(self) -> bool:
        return self.crosses_boundary or self.domain_knowledge or self.changes_class


# Per-class profile: OS carries the call-boundary condition, HP rests on
# domain knowledge alone, TF/SI change the algorithmic class, CE only
# partially touches domain knowledge (the boundary class).
CLASS_FLAGS = {
    OperatorClass.CE: SemanticityFlags(False, True, False),
    OperatorClass.OS: SemanticityFlags(True, True, False),
    OperatorClass.HP: SemanticityFlags(False, True, False),
    OperatorClass.TF: SemanticityFlags(False, True, True),
    OperatorClass.SI: SemanticityFlags(False, True, True),
}

SYNTACTIC_FLAGS = SemanticityFlags(False, False, False)


@dataclass(frozen=True)
class MutantRecord:
    mutant_id: str
    put: PutId
    operator: OperatorClass
    kind: str  # semantic | syntactic
    semanticity: SemanticityFlags
    artefact_flag: bool
    description: str
    overrides: Tuple[Tuple[str, object], ...]

    def program(self) -> Program:
        return Program(self.put, self.overrides, strict=False,
                       label=self.mutant_id)


def _records(put, operator, entries):
    out = []
    for i, entry in enumerate(entries):
        desc, overrides = entry[0], entry[1]
        artefact = len(entry) > 2 and entry[2]
        out.append(MutantRecord(
            mutant_id=f"{put.value}-{operator.value}{i + 1}",
            put=put,
            operator=operator,
            kind="semantic",
            semanticity=CLASS_FLAGS[operator],
            artefact_flag=bool(artefact),
            description=desc,
            overrides=tuple(sorted(overrides.items())),
        ))
    return out


# ---------------------------------------------------------------------------
# semantic pools

_SEMANTIC = {
    PutId.A1: {
        OperatorClass.CE: [
            ("adds eps_drift=0.02 to the dx/dt right-hand side", {"drift_x": 0.02}),
            ("adds eps_drift=0.1 to the dx/dt right-hand side", {"drift_x": 0.1}),
            ("adds eps_drift=0.4 to the dx/dt right-hand side", {"drift_x": 0.4}),
            ("adds eps_drift=0.05 to the dy/dt right-hand side", {"drift_y": 0.05}),
            ("adds eps_drift=0.25 to the dy/dt right-hand side", {"drift_y": 0.25}),
        ],
        OperatorClass.HP: [
            ("RK4 replaced by a 1.5-order hybrid step", {"integrator": "hybrid15"}),
            ("RK4 replaced by forward Euler", {"integrator": "euler"}),
            ("RK4 replaced by the midpoint rule", {"integrator": "rk2"}),
            ("RK4 stage weights detuned from 2.0 to 1.7", {"rk4_mid_weight": 1.7}),
            ("step count quartered at a fixed horizon", {"n_steps": 62}),
        ],
        OperatorClass.TF: [
            ("state-vector y/z swap in the observable", {"swap_yz": True}),
            ("cross-coupling term sign-flipped", {"y_coupling": -1.0}),
            ("cross-coupling term scaled to 0.3", {"y_coupling": 0.3}),
            ("initial height displaced from 21 to 5", {"z_init": 5.0}),
            ("horizon shortened to 0.9 with unchanged step count", {"horizon": 0.9}),
        ],
    },
    PutId.A2: {
        OperatorClass.CE: [
            ("elimination omits the row-1 multiplier at column 0", {"skip_step": 0}),
            ("elimination omits the row-2 multiplier at column 1", {"skip_step": 1}),
            ("elimination omits the row-3 multiplier at column 2", {"skip_step": 2}),
            ("elimination omits the row-5 multiplier at column 4", {"skip_step": 4}),
            ("row 1 silently rescaled by 1.003", {"scale_drift": 0.003}),
        ],
        OperatorClass.OS: [
            ("determinant via sum of the U diagonal instead of the product",
             {"det_mode": "sum"}),
            ("determinant via product of |U| diagonal entries",
             {"det_mode": "abs_product"}),
            ("oscillatory matrix entry built with cos instead of sin",
             {"osc_fun": "cos"}),
            ("quadratic matrix entry built as |x|^1.9", {"quad_pow": 1.9}),
            ("determinant drops the pivot-parity sign",
             {"det_mode": "nosign"}),
        ],
        OperatorClass.HP: [
            ("matrix assembled in single precision", {"dtype32": True}),
            ("eliminated rows rounded to 6 digits", {"round_digits": 6}),
            ("eliminated rows rounded to 8 digits", {"round_digits": 8}),
            ("eliminated rows rounded to 7 digits", {"round_digits": 7}),
            ("eliminated rows rounded to 5 digits", {"round_digits": 5}),
        ],
        OperatorClass.SI: [
            ("partial pivoting degrades to no pivoting", {"pivot_mode": "none"}),
            ("pivot picks the first nonzero entry", {"pivot_mode": "first_nonzero"}),
            ("pivoting only below a 1e-12 threshold",
             {"pivot_mode": "threshold", "pivot_threshold": 1e-12}),
            ("eliminated entries clamped at 3.0", {"elim_clamp": 3.0}),
            ("eliminated entries clamped at 2.0", {"elim_clamp": 2.0}),
            ("no pivoting plus rounded elimination and a skipped multiplier",
             {"pivot_mode": "none", "round_digits": 6, "skip_step": 1,
              "scale_drift": 0.001}, True),
        ],
    },
    PutId.A3: {
        OperatorClass.CE: [
            ("adds a quadratic source term gamma=0.02", {"nonlin_gamma": 0.02}),
            ("adds a quadratic source term gamma=0.1", {"nonlin_gamma": 0.1}),
            ("adds a quadratic source term gamma=0.5", {"nonlin_gamma": 0.5}),
            ("diffusivity drifts from 1.0 to 1.02", {"alpha": 1.02}),
            ("first initial mode rescaled to 1.05", {"mode1_amp": 1.05}),
            ("quadratic source with drifted diffusivity and rescaled modes",
             {"nonlin_gamma": 0.3, "alpha": 1.05, "mode1_amp": 1.1,
              "mode2_amp": 0.9}, True),
        ],
        OperatorClass.OS: [
            ("time step sign flips every 30th step", {"dt_flip_every": 30}),
            ("time step sign flips every 12th step", {"dt_flip_every": 12}),
            ("Dirichlet boundary handling swapped for Neumann", {"bc": "neumann"}),
            ("probe interpolation swapped from linear to nearest",
             {"interp": "nearest"}),
            ("spatial stencil skewed by 5%", {"stencil_skew": 1.05}),
        ],
        OperatorClass.HP: [
            ("second-order stencil degraded to first order",
             {"stencil": "onesided1"}),
            ("stability fraction halved to 0.4", {"theta": 0.4}),
            ("stability fraction reduced to 0.2", {"theta": 0.2}),
            ("grid refinement keeps the coarse time step",
             {"dt_frozen": True, "dt_frozen_value": 6.5e-4}),
            ("grid coarsened from 25 to 17 points", {"nx": 17}),
        ],
        OperatorClass.SI: [
            ("3-point smoothing filter applied every 8th step",
             {"smooth_every": 8}),
            ("3-point smoothing filter applied every 20th step",
             {"smooth_every": 20}),
            ("3-point smoothing filter applied every 4th step",
             {"smooth_every": 4}),
            ("solution clamped at 1.0", {"clamp_threshold": 1.0}),
            ("solution clamped at 0.8", {"clamp_threshold": 0.8}),
        ],
        OperatorClass.TF: [
            ("periodic forcing kick every 10th step", {"pulse_every": 10}),
            ("periodic forcing kick every 25th step", {"pulse_every": 25}),
        ],
    },
    PutId.B1: {
        OperatorClass.CE: [
            ("posterior mean skips the evidence normalisation",
             {"normalize": False}),
            ("posterior exponent drifts by +0.1", {"exponent_drift": 0.1}),
            ("posterior exponent drifts by +0.35", {"exponent_drift": 0.35}),
            ("success count drifts by +0.5", {"successes_drift": 0.5}),
            ("success count drifts by -0.5", {"successes_drift": -0.5}),
        ],
        OperatorClass.OS: [
            ("prior alpha/beta swapped", {"swap_prior": True}),
            ("evidence integral swapped to the trapezoid rule",
             {"den_rule": "trapezoid"}),
            ("evidence integral swapped to the midpoint rule",
             {"den_rule": "midpoint"}),
            ("first moment replaced by the second moment", {"mean_power": 2.0}),
            ("first moment replaced by the half moment", {"mean_power": 0.5}),
            ("swapped prior integrated with the trapezoid rule on few nodes",
             {"swap_prior": True, "rule": "trapezoid", "nodes": 40,
              "mean_power": 1.02}, True),
        ],
        OperatorClass.HP: [
            ("quadrature reduced to 8 nodes", {"nodes": 8}),
            ("quadrature reduced to 12 nodes", {"nodes": 12}),
            ("quadrature reduced to 16 nodes", {"nodes": 16}),
            ("quadrature reduced to 10 nodes", {"nodes": 10}),
            ("quadrature reduced to 14 nodes", {"nodes": 14}),
        ],
        OperatorClass.SI: [
            ("integration truncated to [0.25, 0.75]", {"theta_clip": 0.25}),
            ("integration truncated to [0.30, 0.70]", {"theta_clip": 0.30}),
            ("integration truncated to [0.20, 0.80]", {"theta_clip": 0.20}),
            ("posterior density leaks through a 1e-6 floor",
             {"dens_floor": 1e-6}),
            ("posterior density leaks through a 1e-4 floor",
             {"dens_floor": 1e-4}),
        ],
    },
    PutId.B2: {
        OperatorClass.CE: [
            ("acceptance ratio inflated by 8%", {"ratio_bias": 0.08}),
            ("acceptance ratio inflated by 3%", {"ratio_bias": 0.03}),
            ("state leaks +0.002 per step", {"drift_per_step": 0.002}),
            ("state leaks +0.01 per step", {"drift_per_step": 0.01}),
            ("target scale law eroded from 0.25 to 0.22 per unit",
             {"scale_slope": 0.22}),
        ],
        OperatorClass.OS: [
            ("acceptance rule min(1, r) -> min(0.95, r)", {"accept_cap": 0.95}),
            ("acceptance rule min(1, r) -> min(0.85, r)", {"accept_cap": 0.85}),
            ("acceptance rule min(1, r) -> min(0.70, r)", {"accept_cap": 0.70}),
            ("random-walk proposal swapped for a uniform kernel",
             {"prop_dist": "uniform"}),
            ("shifted-exponential proposal without a correction",
             {"prop_dist": "exp_shifted"}),
        ],
        OperatorClass.HP: [
            ("proposal width collapsed to 0.08", {"prop_width": 0.08}),
            ("proposal width inflated to 4.5", {"prop_width": 4.5}),
            ("burn-in removed", {"n_burn": 0}),
            ("kept length truncated to 120", {"n_keep": 120}),
            ("kept length truncated to 240", {"n_keep": 240}),
        ],
        OperatorClass.TF: [
            ("independent-sampling segment every 25th step",
             {"indep_every": 25}),
            ("independent-sampling segment every 10th step",
             {"indep_every": 10}),
            ("wide independent segment (width 8) every 25th step",
             {"indep_every": 25, "indep_width": 8.0}),
            ("chain started 3.0 above the stationary mean",
             {"init_offset": 3.0}),
            ("frequent wide independent segments from a displaced start",
             {"indep_every": 8, "indep_width": 6.0, "init_offset": 1.5,
              "prop_width": 1.4}, True),
        ],
    },
    PutId.B3: {
        OperatorClass.CE: [
            ("importance weights dropped (unit weights)",
             {"weight_mode": "unit"}),
            ("importance weights raised to the 0.9 power",
             {"weight_mode": "pow090"}),
            ("integrand decay drifts by +0.02", {"integrand_drift": 0.02}),
            ("integrand decay drifts by +0.08", {"integrand_drift": 0.08}),
            ("integrand decay drifts by +0.3", {"integrand_drift": 0.3}),
        ],
        OperatorClass.OS: [
            ("Gaussian proposal swapped for a uniform proposal",
             {"proposal_dist": "uniform"}),
            ("Student-t proposal with Gaussian weights left in place",
             {"proposal_dist": "student_nocorr"}),
            ("proposal recentred at 0.3 without reweighting",
             {"proposal_center": 0.3}),
            ("mean estimator swapped for the median", {"agg": "median"}),
            ("mean estimator swapped for a 10% trimmed mean",
             {"agg": "trimmed"}),
        ],
        OperatorClass.HP: [
            ("sample count cut to 400", {"n_samples": 400}),
            ("sample count cut to 1200", {"n_samples": 1200}),
            ("proposal width narrowed to 0.5", {"proposal_sigma": 0.5}),
            ("proposal width inflated to 3.5", {"proposal_sigma": 3.5}),
            ("sampling and refinement capped at 2000 draws",
             {"cap_samples": 2000}),
            ("narrow clipped proposal with capped refinement",
             {"proposal_sigma": 0.45, "cap_samples": 3000, "clamp_w": 2.0,
              "n_samples": 2000}, True),
        ],
        OperatorClass.SI: [
            ("importance weights clipped at 0.5", {"clamp_w": 0.5}),
            ("importance weights clipped at 0.65", {"clamp_w": 0.65}),
            ("importance weights clipped at 0.75", {"clamp_w": 0.75}),
            ("every 2nd sample reused in place of fresh draws",
             {"sample_stride": 2}),
            ("every 4th sample reused in place of fresh draws",
             {"sample_stride": 4}),
        ],
    },
    PutId.C1: {
        OperatorClass.CE: [
            ("covariance omits the positive-definite diagonal term",
             {"omit_jitter": True}),
            ("prediction drifts by +0.05", {"mean_drift": 0.05}),
            ("prediction drifts by +0.15", {"mean_drift": 0.15}),
            ("training targets corrupted asymmetrically by 0.1",
             {"y_drift": 0.1}),
            ("training targets corrupted asymmetrically by 0.3",
             {"y_drift": 0.3}),
        ],
        OperatorClass.OS: [
            ("squared-exponential kernel swapped for an exponential kernel",
             {"kernel": "matern12"}),
            ("squared-exponential kernel swapped for a rational kernel",
             {"kernel": "quad"}),
            ("kernel distance used unsquared", {"kernel": "rbf_nosquare"}),
            ("linear solve replaced by normal equations",
             {"solver": "normal_eq", "noise": 1e-6}),
            ("linear solve replaced by single-precision least squares",
             {"solver": "lstsq32", "noise": 2e-4}),
        ],
        OperatorClass.HP: [
            ("noise level raised from 1e-4 to 1e-1", {"noise": 1e-1}),
            ("noise level raised from 1e-4 to 1e-2", {"noise": 1e-2}),
            ("noise level raised from 1e-4 to 1e-3", {"noise": 1e-3}),
            ("length scale shrunk to 0.15", {"length_scale": 0.15}),
            ("signal variance shrunk to 0.3", {"sigma_f": 0.3}),
            ("rough kernel with inflated noise on a sparse grid",
             {"kernel": "matern12", "noise": 5e-2, "n_train": 8,
              "length_scale": 0.8}, True),
        ],
        OperatorClass.SI: [
            ("length scale switched to a coarse prior (3.0)",
             {"length_scale": 3.0}),
            ("length scale switched to a spiky prior (0.05)",
             {"length_scale": 0.05}),
            ("three smallest dual weights zeroed", {"alpha_trunc": 3}),
            ("six smallest dual weights zeroed", {"alpha_trunc": 6}),
            ("nine smallest dual weights zeroed", {"alpha_trunc": 9}),
        ],
    },
    PutId.C2: {
        OperatorClass.CE: [
            ("odd coefficient drifts by 0.01", {"odd_drift": 0.01}),
            ("odd coefficient drifts by 0.05", {"odd_drift": 0.05}),
            ("odd coefficient drifts by 0.15", {"odd_drift": 0.15}),
            ("leading coefficient rescaled by 1.004", {"c0_scale": 1.004}),
            ("leading coefficient rescaled by 1.02", {"c0_scale": 1.02}),
            ("drifted odd coefficient under a uniform quadrature swap",
             {"odd_drift": 0.08, "c0_scale": 1.01, "quad_rule": "uniform",
              "n_quad": 40}, True),
        ],
        OperatorClass.OS: [
            ("coefficient sort inserts an inversion at order 2",
             {"sort_inversion": 2}),
            ("coefficient sort inserts an inversion at order 4",
             {"sort_inversion": 4}),
            ("coefficient sort inserts an inversion at order 0",
             {"sort_inversion": 0}),
            ("Legendre coefficients evaluated in the Chebyshev basis",
             {"eval_basis": "chebyshev"}),
            ("Gauss projection quadrature swapped for a uniform rule",
             {"quad_rule": "uniform"}),
        ],
        OperatorClass.HP: [
            ("expansion degree truncated to 2", {"degree": 2}),
            ("expansion degree truncated to 3", {"degree": 3}),
            ("expansion degree truncated to 4", {"degree": 4}),
            ("projection quadrature reduced to 6 nodes", {"n_quad": 6}),
            ("projection quadrature reduced to 10 nodes", {"n_quad": 10}),
        ],
        OperatorClass.SI: [
            ("top coefficient randomly retains a low-order value",
             {"retain_low": True}),
            ("coefficients clipped at 0.05", {"coef_clamp": 0.05}),
            ("coefficients clipped at 0.5", {"coef_clamp": 0.5}),
            ("coefficients below 0.01 zeroed", {"zero_small": 0.01}),
            ("coefficients below 0.1 zeroed", {"zero_small": 0.1}),
        ],
    },
    PutId.C3: {
        OperatorClass.CE: [
            ("training targets corrupted by 0.05 cos(5t)",
             {"y_noise_amp": 0.05}),
            ("training targets corrupted by 0.15 cos(5t)",
             {"y_noise_amp": 0.15}),
            ("training targets corrupted by 0.3 cos(5t)",
             {"y_noise_amp": 0.3}),
            ("backprop omits the output-bias gradient",
             {"grad_omit": "out_bias"}),
            ("backprop omits the hidden-bias gradients",
             {"grad_omit": "hid_bias"}),
        ],
        OperatorClass.OS: [
            ("gradient descent swapped for sign descent",
             {"optimizer": "signgd"}),
            ("squared loss swapped for absolute loss", {"loss": "mae"}),
            ("learning rate decays by 0.995 per epoch", {"lr_decay": 0.995}),
            ("learning rate decays by 0.99 per epoch", {"lr_decay": 0.99}),
            ("learning rate decays by 0.98 per epoch", {"lr_decay": 0.98}),
        ],
        OperatorClass.HP: [
            ("training truncated to 30 epochs", {"epochs": 30}),
            ("training truncated to 60 epochs", {"epochs": 60}),
            ("activation swapped from tanh to relu", {"activation": "relu"}),
            ("hidden width collapsed to 2", {"hidden": 2}),
            ("weight init scale inflated to 5.0", {"init_scale": 5.0}),
        ],
        OperatorClass.TF: [
            ("training target drifts in phase by 0.002 per epoch",
             {"phase_drift": 0.002}),
            ("training target drifts in phase by 0.005 per epoch",
             {"phase_drift": 0.005}),
            ("training target drifts in phase by 0.001 per epoch",
             {"phase_drift": 0.001}),
            ("alternate-epoch mask over even hidden units", {"mask_period": 2}),
            ("periodic mask with period 6", {"mask_period": 6}),
            ("phase-drifting target under a periodic mask and dead unit",
             {"phase_drift": 0.003, "mask_period": 4, "dead_unit": 1,
              "data_stride": 2}, True),
        ],
        OperatorClass.SI: [
            ("hidden unit 0 permanently dead", {"dead_unit": 0}),
            ("training uses every 2nd sample", {"data_stride": 2}),
            ("training uses every 3rd sample", {"data_stride": 3}),
            ("weight-decay spike every 3rd epoch", {"l2_spike_every": 3}),
            ("weight-decay spike every 7th epoch", {"l2_spike_every": 7}),
        ],
    },
    PutId.D1: {
        OperatorClass.CE: [
            ("backprop omits the output-bias gradient",
             {"grad_omit": "out_bias"}),
            ("backprop omits the hidden-bias gradients",
             {"grad_omit": "hid_bias"}),
            ("training targets corrupted by 0.05 cos(5t)",
             {"y_noise_amp": 0.05}),
            ("training targets corrupted by 0.12 cos(5t)",
             {"y_noise_amp": 0.12}),
            ("label noise amplitude raised from 0.02 to 0.1",
             {"noise_amp": 0.1}),
        ],
        OperatorClass.OS: [
            ("gradient descent swapped for sign descent",
             {"optimizer": "signgd"}),
            ("squared loss swapped for absolute loss", {"loss": "mae"}),
            ("learning rate decays by 0.995 per epoch", {"lr_decay": 0.995}),
            ("learning rate decays by 0.99 per epoch", {"lr_decay": 0.99}),
        ],
        OperatorClass.HP: [
            ("L2 penalty raised from 1e-4 to 1.0", {"l2": 1.0}),
            ("L2 penalty raised from 1e-4 to 0.1", {"l2": 0.1}),
            ("training truncated to 40 epochs", {"epochs": 40}),
            ("hidden width collapsed to 2", {"hidden": 2}),
            ("weight init scale inflated to 4.0", {"init_scale": 4.0}),
        ],
        OperatorClass.TF: [
            ("training labels negated", {"label_flip": True}),
            ("alternate-epoch mask over even hidden units", {"mask_period": 2}),
            ("periodic mask with period 5", {"mask_period": 5}),
            ("training target drifts in phase by 0.002 per epoch",
             {"phase_drift": 0.002}),
            ("training target drifts in phase by 0.004 per epoch",
             {"phase_drift": 0.004}),
        ],
        OperatorClass.SI: [
            ("hidden unit 0 permanently dead", {"dead_unit": 0}),
            ("hidden unit 3 permanently dead", {"dead_unit": 3}),
            ("training uses every 2nd sample", {"data_stride": 2}),
            ("weight-decay spike every 3rd epoch", {"l2_spike_every": 3}),
            ("weight-decay spike every 8th epoch", {"l2_spike_every": 8}),
        ],
    },
    PutId.D2: {
        OperatorClass.CE: [
            ("innermost positive label flipped", {"label_flip_idx": 0}),
            ("outermost positive label flipped", {"label_flip_idx": 9}),
            ("mid positive label flipped", {"label_flip_idx": 5}),
            ("decision bias drifts by +0.05", {"bias_drift": 0.05}),
            ("decision bias drifts by +0.2", {"bias_drift": 0.2}),
        ],
        OperatorClass.OS: [
            ("decision-function sign flips inside the 0.5 band",
             {"sign_flip_band": 0.5}),
            ("decision-function sign flips inside the 0.8 band",
             {"sign_flip_band": 0.8}),
            ("decision-function sign flips inside the 1.2 band",
             {"sign_flip_band": 1.2}),
            ("radial kernel swapped for a linear kernel",
             {"kernel": "linear"}),
            ("radial kernel swapped for an exponential kernel",
             {"kernel": "laplace"}),
            ("banded sign flip on a linear kernel with drifted bias",
             {"sign_flip_band": 0.2, "kernel": "linear", "bias_drift": 0.1,
              "gamma": 0.5}, True),
        ],
        OperatorClass.HP: [
            ("box constraint collapsed to 0.05", {"C": 0.05}),
            ("box constraint inflated to 50", {"C": 50.0}),
            ("kernel width parameter reduced to 0.2", {"gamma": 0.2}),
            ("kernel width parameter inflated to 8", {"gamma": 8.0}),
            ("dual ascent truncated to 5 iterations", {"iters": 5}),
        ],
        OperatorClass.SI: [
            ("dual weights clipped at 0.1 of the box", {"alpha_clip_frac": 0.1}),
            ("dual weights clipped at 0.25 of the box",
             {"alpha_clip_frac": 0.25}),
            ("dual weights clipped at 0.6 of the box",
             {"alpha_clip_frac": 0.6}),
            ("three largest dual weights zeroed", {"sv_drop_n": 3}),
            ("six largest dual weights zeroed", {"sv_drop_n": 6}),
        ],
    },
    PutId.D3: {
        OperatorClass.CE: [
            ("intercept drifts by +0.1", {"intercept_drift": 0.1}),
            ("intercept drifts by +0.4", {"intercept_drift": 0.4}),
            ("innermost positive label flipped", {"label_flip_idx": 0}),
            ("innermost negative label flipped", {"label_flip_idx": 10}),
            ("features silently rescaled by 1.06", {"feature_scale": 1.06}),
        ],
        OperatorClass.OS: [
            ("sigmoid swapped for a piecewise-linear link",
             {"sigmoid_mode": "piecewise"}),
            ("Newton solver swapped for gradient descent", {"solver": "gd"}),
            ("Newton solver swapped for slow gradient descent",
             {"solver": "gd", "lr": 0.1}),
            ("positive class weighted 1.3 in the likelihood",
             {"pos_weight": 1.3}),
            ("positive class weighted 0.7 in the likelihood",
             {"pos_weight": 0.7}),
        ],
        OperatorClass.HP: [
            ("regularisation raised from 0.05 to 4.0", {"l2": 4.0}),
            ("regularisation raised from 0.05 to 1.0", {"l2": 1.0}),
            ("regularisation raised from 0.05 to 0.5", {"l2": 0.5}),
            ("regularisation lowered to 1e-4", {"l2": 1e-4}),
            ("Newton iterations truncated to 1", {"iters": 1}),
        ],
        OperatorClass.SI: [
            ("regularisation spikes to 4.0 every 2nd iteration",
             {"l2_spike_every": 2}),
            ("regularisation spikes to 4.0 every 3rd iteration",
             {"l2_spike_every": 3}),
            ("logit clamped to |z| <= 1.2", {"logit_clamp": 1.2}),
            ("probabilities floored into [0.05, 0.95]", {"prob_floor": 0.05}),
            ("probabilities floored into [0.12, 0.88]", {"prob_floor": 0.12}),
            ("clamped logits with floored probabilities under spiking "
             "regularisation",
             {"logit_clamp": 2.0, "prob_floor": 0.03, "l2_spike_every": 4,
              "data_stride": 2}, True),
        ],
    },
}

# ---------------------------------------------------------------------------
# rule-based syntactic variants (deterministic numeric programs only)

_SYNTACTIC = {
    PutId.A1: [
        ("constant perturbation: sigma 10 -> 11", {"sigma": 11.0}),
        ("constant perturbation: rho 28 -> 27", {"rho": 27.0}),
        ("constant perturbation: stage weight 2 -> 3", {"rk4_mid_weight": 3.0}),
        ("arithmetic operator swap: x*y -> x+y in dz/dt", {"prod_to_sum": True}),
        ("comparison operator swap in the overflow guard",
         {"clamp_flipped": True, "clamp_threshold": 60.0}),
    ],
    PutId.A2: [
        ("constant perturbation: diagonal base 2.2 -> 3.2", {"diag_base": 3.2}),
        ("constant perturbation: wave amplitude 0.55 -> 1.55",
         {"wave_amp": 1.55}),
        ("constant perturbation: quadratic coefficient 0.8 -> 1.8",
         {"quad_coeff": 1.8}),
        ("arithmetic operator swap: subtraction -> addition in elimination",
         {"elim_sign": 1.0}),
        ("comparison operator swap: pivot picks the smallest magnitude",
         {"pivot_flipped": True}),
    ],
    PutId.A3: [
        ("constant perturbation: diffusivity 1 -> 2", {"alpha": 2.0}),
        ("constant perturbation: grid 25 -> 24 points", {"nx": 24}),
        ("constant perturbation: stability fraction 0.8 -> 1.8",
         {"theta": 1.8}),
        ("arithmetic operator swap: update sign flipped", {"update_sign": -1.0}),
        ("comparison operator swap in the overflow guard",
         {"clamp_flipped": True, "clamp_threshold": 3.0}),
    ],
}


def catalog(put, operator) -> list:
    """Prescreen-accepted variants for one (program, operator) pair."""
    try:
        put = PutId(put)
    except ValueError:
        raise UnknownPut(f"no such program: {put!r}") from None
    entries = _SEMANTIC.get(put, {}).get(OperatorClass(operator), [])
    records = _records(put, OperatorClass(operator), entries)
    return [r for r in records if l0_prescreen(r, default_probes(put)).accepted]


def pool(put) -> list:
    """Union of the five operator pools for one program."""
    try:
        put = PutId(put)
    except ValueError:
        raise UnknownPut(f"no such program: {put!r}") from None
    out = []
    for operator in OperatorClass:
        out.extend(catalog(put, operator))
    return out


def syntactic_mutants(put) -> list:
    """Rule-based first-order variants of the deterministic numeric programs."""
    try:
        put = PutId(put)
    except ValueError:
        raise UnknownPut(f"no such program: {put!r}") from None
    if put_class(put) != PutClass.NUMERIC:
        raise NotDeterministicClass(
            f"{put.value} is outside the deterministic numeric class")
    out = []
    for i, (desc, overrides) in enumerate(_SYNTACTIC[put]):
        out.append(MutantRecord(
            mutant_id=f"{put.value}-SYN{i + 1}",
            put=put,
            operator=OperatorClass.CE,
            kind="syntactic",
            semanticity=SYNTACTIC_FLAGS,
            artefact_flag=False,
            description=desc,
            overrides=tuple(sorted(overrides.items())),
        ))
    return out


@dataclass(frozen=True)
class PrescreenVerdict:
    accepted: bool
    reason: str = ""


def default_probes(put) -> np.ndarray:
    """16 evenly spaced in-domain points plus both endpoints."""
    inner = domain_points(put, 16, margin=0.04)
    lo, hi = original(put).descriptor().input_domain
    return np.concatenate([[lo], inner, [hi]])


_PRESCREEN_SEED = 20260117


def l0_prescreen(record: MutantRecord, probes) -> PrescreenVerdict:
    """Executability, finiteness and non-triviality gate for pool entry."""
    probes = np.asarray(probes, dtype=np.float64)
    if probes.size == 0:
        raise ValueError("prescreen needs at least one probe")
    try:
        variant = record.program().evaluate(probes, seed=_PRESCREEN_SEED)
    except Exception as exc:  # noqa: BLE001 - rejection, not propagation
        return PrescreenVerdict(False, f"failed to execute: {exc}")
    if not np.all(np.isfinite(variant)):
        return PrescreenVerdict(False, "non-finite output at a probe")
    reference = original(record.put).evaluate(probes, seed=_PRESCREEN_SEED)
    if not np.any(np.abs(variant - reference) > 1e-6):
        return PrescreenVerdict(False, "trivial: within 1e-6 at every probe")
    return PrescreenVerdict(True)


def mutant_manifest():
    rows = []
    for put in PutId:
        for rec in pool(put):
            rows.append({
                "mutant_id": rec.mutant_id,
                "put": put.value,
                "operator": rec.operator.value,
                "kind": rec.kind,
                "crosses_boundary": rec.semanticity.crosses_boundary,
                "domain_knowledge": rec.semanticity.domain_knowledge,
                "changes_class": rec.semanticity.changes_class,
                "artefact_flag": rec.artefact_flag,
                "description": rec.description,
                "overrides": {k: v for k, v in rec.overrides},
            })
    return rows
