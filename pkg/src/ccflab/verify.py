"""Operator verification suite: named residuals with documented tolerances.

Two kinds of rows. Exact identities (Hilbert involution, skew-symmetry,
Lambda = H d/dx, multiplier semigroup) hold to roundoff on band-limited
fields and get a 1e-10 budget. Cross-route checks compare the spectral
multiplier against the singular-integral quadrature (calibration transfer
across modes, the pointwise dissipation closed form on cos, the product-rule
identity) and get the quadrature budget of 1e-2.

Random test fields are seeded and band-limited to |m| <= n//8 with zero mean,
the regime where the Hilbert involution is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (
    CgammaCalibration,
    QuadratureConfig,
    calibrate_cgamma,
    cordoba_identity_residual,
    dgamma,
    frac_laplacian_quadrature,
    frac_laplacian_spectral,
    hilbert,
)
from .torus import RealField, TorusGrid, derivative, forward, inverse

EXACT_TOL = 1e-10
QUADRATURE_TOL = 1e-2
CALIBRATION_RESIDUAL_TOL = 1e-3


@dataclass(frozen=True)
class VerifyRow:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance


def random_band_limited(grid: TorusGrid, rng: np.random.Generator, max_mode: int | None = None) -> RealField:
    """Zero-mean real field with Gaussian coefficients on modes 1..max_mode."""
    cutoff = grid.n // 8 if max_mode is None else max_mode
    x = grid.points
    values = np.zeros(grid.n)
    for m in range(1, cutoff + 1):
        a, b = rng.standard_normal(2)
        values += a * np.cos(m * x) + b * np.sin(m * x)
    return RealField(grid, values)


def _rel(err: float, scale: float) -> float:
    return err / max(scale, 1e-300)


def _hilbert_involution(fields: list[RealField]) -> float:
    worst = 0.0
    for f in fields:
        F = forward(f)
        twice = inverse(hilbert(hilbert(F)))
        err = float(np.max(np.abs(twice.values + f.values)))
        worst = max(worst, _rel(err, float(np.max(np.abs(f.values)))))
    return worst


def _hilbert_skewness(fields: list[RealField]) -> float:
    worst = 0.0
    for f, g in zip(fields, fields[1:]):
        hf = inverse(hilbert(forward(f))).values
        hg = inverse(hilbert(forward(g))).values
        pairing = float(np.mean(hf * g.values) + np.mean(f.values * hg))
        scale = float(np.mean(np.abs(f.values * g.values)))
        worst = max(worst, _rel(abs(pairing), scale))
    return worst


def _lambda_is_h_dx(fields: list[RealField]) -> float:
    worst = 0.0
    for f in fields:
        F = forward(f)
        lam = inverse(frac_laplacian_spectral(F, 1.0)).values
        hdx = inverse(hilbert(derivative(F))).values
        err = float(np.max(np.abs(lam - hdx)))
        worst = max(worst, _rel(err, float(np.max(np.abs(lam)))))
    return worst


def _semigroup(fields: list[RealField], a: float = 0.3, b: float = 0.7) -> float:
    worst = 0.0
    for f in fields:
        F = forward(f)
        once = frac_laplacian_spectral(frac_laplacian_spectral(F, a), b)
        direct = frac_laplacian_spectral(F, a + b)
        err = float(np.max(np.abs(once.coeffs - direct.coeffs)))
        worst = max(worst, _rel(err, float(np.max(np.abs(direct.coeffs)))))
    return worst


def _calibration_cross_mode(grid: TorusGrid, gamma: float, cfg: QuadratureConfig) -> tuple[CgammaCalibration, float]:
    """Calibrate on mode 1, test on mode 2 against the exact multiplier 2^gamma."""
    cal = calibrate_cgamma(gamma, grid, cfg)
    f2 = RealField(grid, np.cos(2.0 * grid.points))
    quad = frac_laplacian_quadrature(f2, gamma, cal, cfg).values
    exact = 2.0**gamma * np.cos(2.0 * grid.points)
    err = float(np.sqrt(np.mean((quad - exact) ** 2)))
    return cal, _rel(err, float(np.sqrt(np.mean(exact**2))))


def _dgamma_closed_form(grid: TorusGrid, gamma: float, cal: CgammaCalibration, cfg: QuadratureConfig) -> float:
    """D_gamma(cos) against 1 + (1 - 2^(gamma-1)) cos(2x), exact for all gamma."""
    f = RealField(grid, np.cos(grid.points))
    got = dgamma(f, 0, gamma, cal, cfg).values
    expected = 1.0 + (1.0 - 2.0 ** (gamma - 1.0)) * np.cos(2.0 * grid.points)
    return float(np.max(np.abs(got - expected)))


def verify_suite(n: int = 256, seed: int = 0, field_count: int = 6) -> list[VerifyRow]:
    """Run every check and return the residual table, deterministically per seed."""
    grid = TorusGrid(n)
    rng = np.random.default_rng(seed)
    fields = [random_band_limited(grid, rng) for _ in range(field_count)]
    cfg = QuadratureConfig()

    rows = [
        VerifyRow("hilbert_involution_H2_eq_minus_I", _hilbert_involution(fields), EXACT_TOL),
        VerifyRow("hilbert_skew_symmetry", _hilbert_skewness(fields), EXACT_TOL),
        VerifyRow("lambda_equals_H_dx", _lambda_is_h_dx(fields), EXACT_TOL),
        VerifyRow("multiplier_semigroup_0.3_0.7", _semigroup(fields), EXACT_TOL),
    ]
    for gamma in (0.5, 0.9):
        cal, cross = _calibration_cross_mode(grid, gamma, cfg)
        rows.append(
            VerifyRow(f"calibration_residual_gamma_{gamma:g}", cal.residual, CALIBRATION_RESIDUAL_TOL)
        )
        rows.append(VerifyRow(f"quadrature_mode2_transfer_gamma_{gamma:g}", cross, QUADRATURE_TOL))
        f = RealField(grid, np.cos(grid.points))
        rows.append(
            VerifyRow(
                f"product_rule_identity_gamma_{gamma:g}",
                cordoba_identity_residual(f, gamma, cal, cfg),
                QUADRATURE_TOL,
            )
        )
    for gamma in (0.5, 1.0):
        cal = calibrate_cgamma(gamma, grid, cfg)
        rows.append(
            VerifyRow(
                f"dissipation_closed_form_gamma_{gamma:g}",
                _dgamma_closed_form(grid, gamma, cal, cfg),
                QUADRATURE_TOL,
            )
        )
    return rows


def format_table(rows: list[VerifyRow]) -> str:
    width = max(len(r.name) for r in rows)
    lines = [f"{'check'.ljust(width)}  {'residual':>12}  {'tol':>8}  status"]
    for r in rows:
        status = "ok" if r.passed else "FAIL"
        lines.append(f"{r.name.ljust(width)}  {r.residual:12.3e}  {r.tolerance:8.0e}  {status}")
    return "\n".join(lines)
