"""Time integration of theta_t = H(theta) * theta_x - Lambda^gamma theta.

Scheme: integrating-factor RK4. Each mode carries the exact linear factor
e^{-|m|^gamma dt}, and classical RK4 handles the transformed nonlinearity, so
pure-dissipation runs are exact to roundoff and the full scheme is fourth
order in time. The step size is dt = min(dt_max, cfl*dx/max(1, ||H theta||_inf)),
further clamped so steps land exactly on snapshot times and t_end.

Detectors, evaluated on each recorded snapshot:

* BlowupSuspected: non-finite state, or ||theta_x||_inf beyond 1e3 times its
  initial value, or the spectral tail fraction beyond 1e-4 while still
  growing between snapshots.
* UnderResolved: tail fraction beyond 1e-4 without growth.
* StepCollapse: dt fell below 1e-12.

The first detector to fire sets the outcome (exactly once) and stops the run.
Runs are deterministic: fixed evaluation order, no randomness, identical
inputs give bit-identical records.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import regularity
from .records import Outcome, RunRecord
from .regularity import DiagnosticsSample, RegularityConstants
from .torus import RealField, SpectralField, TorusGrid, forward, inverse, tail_fraction

TAIL_FLAG = 1e-4
GRADIENT_BLOWUP_FACTOR = 1e3
DT_FLOOR = 1e-12


class NonFiniteStateError(RuntimeError):
    """State left the reach of floating point; treated as suspected blow-up."""

    def __init__(self, t: float):
        super().__init__(f"non-finite state at t={t:.6g}")
        self.t = t


class StepCollapseError(RuntimeError):
    """Step size underflowed the DT_FLOOR."""

    def __init__(self, t: float, dt: float):
        super().__init__(f"step size collapsed to {dt:.3e} at t={t:.6g}")
        self.t = t
        self.dt = dt


@dataclass(frozen=True)
class ModelParams:
    """Model configuration: dissipation exponent and discrete switches.

    linear_only disables the nonlinear term entirely; it exists for exactness
    tests of the linear part and for the pure-dissipation probe baseline.
    """

    gamma: float
    n: int
    dissipation_on: bool = True
    dealias_on: bool = True
    linear_only: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 2.0:
            raise ValueError(f"gamma must be in (0, 2], got {self.gamma}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 32 or self.n % 2 != 0:
            raise ValueError(f"n must be an even integer >= 32, got {self.n!r}")


@dataclass(frozen=True)
class StepControl:
    """Time-stepping limits and the snapshot cadence."""

    t_end: float
    dt_max: float = 0.01
    cfl: float = 0.4
    snapshot_every: float = 0.02

    def __post_init__(self) -> None:
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must be in (0, 1], got {self.cfl}")
        if not self.dt_max > 0.0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if not 0.0 < self.snapshot_every <= self.t_end:
            raise ValueError(
                f"snapshot_every must be in (0, t_end], got {self.snapshot_every}"
            )


@dataclass
class SolverState:
    """Integration state at time t."""

    t: float
    theta_hat: SpectralField
    step_count: int = 0


@dataclass(frozen=True)
class DiagnosticPlan:
    """Which Holder exponents to track in each snapshot."""

    holder_alphas: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        for a in self.holder_alphas:
            if not 0.0 < a <= 1.0:
                raise ValueError(f"holder alpha must be in (0, 1], got {a}")


def _multipliers(grid: TorusGrid, p: ModelParams):
    m = grid.modes
    lam = np.abs(m).astype(np.float64) ** p.gamma if p.dissipation_on else np.zeros(grid.n)
    hilbert_mult = -1j * np.sign(m).astype(np.float64)
    hilbert_mult[grid.n // 2] = 0.0
    deriv_mult = 1j * m.astype(np.float64)
    deriv_mult[grid.n // 2] = 0.0
    dealias_mask = (np.abs(m) <= grid.n // 3).astype(np.float64)
    return lam, hilbert_mult, deriv_mult, dealias_mask


def _nonlinear_raw(coeffs: np.ndarray, p: ModelParams, hilbert_mult, deriv_mult, dealias_mask):
    if p.linear_only:
        return np.zeros_like(coeffs)
    if p.dealias_on:
        coeffs = coeffs * dealias_mask
    velocity = np.fft.ifft(hilbert_mult * coeffs).real
    gradient = np.fft.ifft(deriv_mult * coeffs).real
    product = np.fft.fft(velocity * gradient)
    return product * dealias_mask if p.dealias_on else product


def nonlinear_term(theta_hat: SpectralField, p: ModelParams) -> SpectralField:
    """Transform of H(theta)*theta_x, pseudospectral, dealiased when enabled."""
    grid = theta_hat.grid
    _, hilbert_mult, deriv_mult, dealias_mask = _multipliers(grid, p)
    raw = _nonlinear_raw(theta_hat.coeffs * grid.n, p, hilbert_mult, deriv_mult, dealias_mask)
    if not np.all(np.isfinite(raw)):
        raise NonFiniteStateError(t=float("nan"))
    return SpectralField(grid, raw / grid.n)


def _choose_dt(coeffs, c: StepControl, dx: float, hilbert_mult, t: float, t_limit: float) -> float:
    velocity = np.fft.ifft(hilbert_mult * coeffs).real
    speed = max(1.0, float(np.max(np.abs(velocity))))
    dt = min(c.dt_max, c.cfl * dx / speed, t_limit - t)
    if dt < DT_FLOOR:
        raise StepCollapseError(t, dt)
    return dt


def _step_raw(coeffs, t, p, c, lam, hilbert_mult, deriv_mult, dealias_mask, dx, t_limit):
    """One integrating-factor RK4 step on unnormalized FFT coefficients."""
    dt = _choose_dt(coeffs, c, dx, hilbert_mult, t, t_limit)
    half = np.exp(-lam * dt / 2.0)
    full = half * half

    def N(v):
        return _nonlinear_raw(v, p, hilbert_mult, deriv_mult, dealias_mask)

    k1 = N(coeffs)
    k2 = N(half * (coeffs + dt / 2.0 * k1))
    k3 = N(half * coeffs + dt / 2.0 * k2)
    k4 = N(full * coeffs + dt * half * k3)
    out = full * coeffs + dt / 6.0 * (full * k1 + 2.0 * half * (k2 + k3) + k4)
    t_new = t + dt
    if not np.all(np.isfinite(out)):
        raise NonFiniteStateError(t_new)
    return out, t_new


def step(s: SolverState, p: ModelParams, c: StepControl, t_limit: float | None = None) -> SolverState:
    """Advance one step; t_limit (default t_end) caps the step so it never
    overshoots a snapshot boundary."""
    grid = s.theta_hat.grid
    lam, hm, dm, mask = _multipliers(grid, p)
    limit = c.t_end if t_limit is None else t_limit
    coeffs, t_new = _step_raw(
        s.theta_hat.coeffs * grid.n, s.t, p, c, lam, hm, dm, mask, grid.dx, limit
    )
    return SolverState(t=t_new, theta_hat=SpectralField(grid, coeffs / grid.n), step_count=s.step_count + 1)


def resolution_monitor(theta_hat: SpectralField) -> float:
    """Spectral tail fraction (energy at |m| > n/4 over total, mean excluded)."""
    return tail_fraction(theta_hat)


def _take_sample(coeffs, grid: TorusGrid, t: float, gamma: float, plan: DiagnosticPlan) -> DiagnosticsSample:
    F = SpectralField(grid, coeffs / grid.n)
    phys = inverse(F)
    deriv_mult = 1j * grid.modes.astype(np.float64)
    deriv_mult[grid.n // 2] = 0.0
    grad = np.fft.ifft(deriv_mult * coeffs).real
    holder = {a: regularity.holder_seminorm(phys, a) for a in plan.holder_alphas}
    return DiagnosticsSample(
        t=t,
        l2=regularity.sobolev_norm(F, 0.0),
        linf=float(np.max(np.abs(phys.values))),
        mean=float(F.coeffs[0].real),
        hdot_half=regularity.sobolev_norm(F, 0.5),
        hdot_three_half=regularity.sobolev_norm(F, 1.5),
        hdot_mid=regularity.sobolev_norm(F, (3.0 + gamma) / 2.0),
        holder=holder,
        tail_fraction=tail_fraction(F),
        min_value=float(np.min(phys.values)),
        grad_linf=float(np.max(np.abs(grad))),
    )


def build_config(
    p: ModelParams,
    c: StepControl,
    constants: RegularityConstants,
    datum: dict | None,
    plan: DiagnosticPlan,
) -> dict:
    """Full run configuration, the unit of sweep resumption hashing."""
    return {
        "model": {
            "gamma": p.gamma,
            "n": p.n,
            "dissipation_on": p.dissipation_on,
            "dealias_on": p.dealias_on,
            "linear_only": p.linear_only,
        },
        "control": {
            "t_end": c.t_end,
            "dt_max": c.dt_max,
            "cfl": c.cfl,
            "snapshot_every": c.snapshot_every,
        },
        "constants": {
            "k1": constants.k1,
            "k2": constants.k2,
            "c0": constants.c0,
            "C_star": constants.C_star,
            "C1": constants.C1,
            "C3": constants.C3,
        },
        "datum": datum if datum is not None else {"kind": "custom"},
        "holder_alphas": list(plan.holder_alphas),
    }


def _predictions(theta0: RealField, p: ModelParams, constants: RegularityConstants):
    """T* and T1 predictions where the formulas apply, None elsewhere."""
    t_star_pred = None
    t_local_pred = None
    if p.dissipation_on and 0.0 < p.gamma < 1.0:
        linf0 = float(np.max(np.abs(theta0.values)))
        if linf0 > 0.0:
            alpha = regularity.alpha_policy(p.gamma)
            if alpha >= 1.0 - p.gamma:
                t_star_pred = regularity.t_star(p.gamma, alpha, linf0, constants)
    if p.dissipation_on and 0.0 < p.gamma <= 1.0:
        F = forward(theta0)
        l2 = regularity.sobolev_norm(F, 0.0)
        hdot32 = regularity.sobolev_norm(F, 1.5)
        if l2 > 0.0 and hdot32 > 0.0:
            t_local_pred = regularity.t_local(p.gamma, l2, hdot32, constants)
    return t_star_pred, t_local_pred


def run(
    theta0: RealField,
    p: ModelParams,
    c: StepControl,
    plan: DiagnosticPlan = DiagnosticPlan(),
    constants: RegularityConstants = RegularityConstants(),
    datum: dict | None = None,
) -> RunRecord:
    """Integrate to t_end or to the first detector flag; return the record.

    Snapshots are taken at t = 0, every snapshot_every units, and at t_end.
    Early stops are always recorded in outcome/outcome_detail, never swallowed.
    """
    if theta0.grid.n != p.n:
        raise ValueError(f"n mismatch: field has n={theta0.grid.n}, params n={p.n}")
    grid = theta0.grid
    lam, hm, dm, mask = _multipliers(grid, p)
    started = time.perf_counter()
    t_star_pred, t_local_pred = _predictions(theta0, p, constants)
    config = build_config(p, c, constants, datum, plan)

    coeffs = np.fft.fft(theta0.values)
    t = 0.0
    samples = [_take_sample(coeffs, grid, t, p.gamma, plan)]
    grad0 = samples[0].grad_linf
    outcome = None
    detail = ""

    def detector(sample: DiagnosticsSample, prev: DiagnosticsSample) -> tuple[Outcome, str] | None:
        if grad0 > 0.0 and sample.grad_linf > GRADIENT_BLOWUP_FACTOR * grad0:
            return (
                Outcome.BLOWUP_SUSPECTED,
                f"gradient grew {sample.grad_linf / grad0:.3g}x (limit {GRADIENT_BLOWUP_FACTOR:g}x)"
                f" at t={sample.t:.6g}",
            )
        if sample.tail_fraction > TAIL_FLAG:
            if sample.tail_fraction > prev.tail_fraction:
                return (
                    Outcome.BLOWUP_SUSPECTED,
                    f"tail fraction {sample.tail_fraction:.3e} exceeds {TAIL_FLAG:g} and is "
                    f"growing at t={sample.t:.6g}",
                )
            return (
                Outcome.UNDER_RESOLVED,
                f"tail fraction {sample.tail_fraction:.3e} exceeds {TAIL_FLAG:g} at t={sample.t:.6g}",
            )
        return None

    flagged = detector(samples[0], samples[0])
    if flagged is not None:
        outcome, detail = flagged

    snapshot_index = 1
    try:
        while outcome is None and t < c.t_end - 1e-12:
            target = min(snapshot_index * c.snapshot_every, c.t_end)
            while t < target - 1e-12:
                coeffs, t = _step_raw(coeffs, t, p, c, lam, hm, dm, mask, grid.dx, target)
            sample = _take_sample(coeffs, grid, t, p.gamma, plan)
            flagged = detector(sample, samples[-1])
            samples.append(sample)
            if flagged is not None:
                outcome, detail = flagged
            snapshot_index += 1
        if outcome is None:
            outcome, detail = Outcome.COMPLETED, f"reached t_end={c.t_end:g}"
    except NonFiniteStateError as exc:
        outcome = Outcome.BLOWUP_SUSPECTED
        detail = f"non-finite state at t={exc.t:.6g}"
    except StepCollapseError as exc:
        outcome = Outcome.STEP_COLLAPSE
        detail = str(exc)

    return RunRecord(
        config=config,
        samples=samples,
        outcome=outcome,
        outcome_detail=detail,
        t_star_predicted=t_star_pred,
        t_local_predicted=t_local_pred,
        wall_time=time.perf_counter() - started,
    )
