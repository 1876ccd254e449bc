"""Backward time stepping for the explicit Euler schemes.

Starting from the terminal payoff, each step convolves the next-time
solution samples against the increment law of the forward process to
get the conditional expectation (and its diffusion-scaled gradient),
then applies the driver and, for reflected problems, pushes the result
back above the barrier.  Scheme II applies the driver to the convolved
values; scheme I convolves driver-adjusted values.  Both run on a fixed
space grid, with samples periodized before every convolution.
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from .grid import GridPair
from .model import EXPLICIT_I, EXPLICIT_II, ProblemSpec, SolutionSurface
from .spectral import (
    ImaginaryResidualError,
    PsiKind,
    convolve_step,
    convolve_step_statedep,
)
from .transform import (
    DEFAULT_EPSILON,
    EXPECTATION,
    GRADIENT,
    TransformCoefficients,
    adjustment_H,
    apply_transform,
    fit_coefficients,
)


class SolveAborted(RuntimeError):
    """The backward recursion failed at a specific step."""

    def __init__(self, step_index: int, reason: str):
        self.step_index = step_index
        self.reason = reason
        super().__init__(f"solve aborted at step {step_index}: {reason}")


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step record of the fit and residuals, collected on request."""

    step_index: int
    coeffs: TransformCoefficients
    imag_residual: float
    reflection_active_nodes: int


def _extended_samples(values: np.ndarray) -> np.ndarray:
    """Append a right-edge sample by linear extension.

    The spectral step yields honest values only at nodes 0..N-1 (node N
    gets the periodic wrap), but the coefficient fit needs a sample at
    x_N for the backward difference there.  Extending the last two
    honest nodes linearly makes that difference equal the slope between
    them.
    """
    out = np.empty(values.size + 1)
    out[:-1] = values
    out[-1] = 2.0 * values[-1] - values[-2]
    return out


class _StepConvolver:
    """One time step's worth of fitting, convolving and recovering."""

    def __init__(self, spec: ProblemSpec, grid: GridPair, epsilon: float):
        self.spec = spec
        self.grid = grid
        self.epsilon = epsilon
        self.x = grid.space_nodes()
        self.dt = spec.step_size

    def coefficients_at(self, t: float):
        """Drift and vol arrays (or scalars on the constant path)."""
        if self.spec.coefficients_constant:
            a = float(np.asarray(self.spec.drift(t, self.spec.x_init)))
            s = float(np.asarray(self.spec.vol(t, self.spec.x_init)))
            return a, s
        a = np.broadcast_to(np.asarray(self.spec.drift(t, self.x), float), self.x.shape)
        s = np.broadcast_to(np.asarray(self.spec.vol(t, self.x), float), self.x.shape)
        return a, s

    def convolve(self, samples: np.ndarray, t: float, kinds: tuple[str, ...]):
        """Fit, transform and convolve one sample vector.

        Returns the recovered node values for each requested kind, the
        fitted coefficients and the largest imaginary residual seen.
        """
        coeffs = fit_coefficients(samples, self.grid, self.epsilon)
        eta = apply_transform(samples, self.grid, coeffs)
        regrow = np.exp(coeffs.alpha * self.x)
        a, s = self.coefficients_at(t)
        outputs = []
        residual = 0.0
        for kind in kinds:
            if self.spec.coefficients_constant:
                psi = PsiKind(kind, coeffs.alpha, self.dt, a, s)
                theta, res = convolve_step(eta, self.grid, psi, return_residual=True)
            else:
                nodes = [
                    PsiKind(kind, coeffs.alpha, self.dt, float(a[k]), float(s[k]))
                    for k in range(self.grid.N)
                ]
                theta = convolve_step_statedep(eta, self.grid, nodes)
                res = 0.0
            adjustment = adjustment_H(
                self.x, coeffs, kind, forward_drift=a * self.dt, forward_vol=s
            )
            outputs.append(regrow * (theta - adjustment))
            residual = max(residual, res)
        return outputs, coeffs, residual


def solve(
    spec: ProblemSpec,
    grid: GridPair,
    epsilon: float = DEFAULT_EPSILON,
    collect_diagnostics: bool = False,
) -> SolutionSurface:
    """Run the backward recursion and return the full solution surface.

    Parameters
    ----------
    spec : ProblemSpec
        Problem data; its x_init must equal the grid center so the
        initial state sits exactly on the middle node.
    grid : GridPair
    epsilon : float
        Slope margin for the periodization fit at every step.
    collect_diagnostics : bool
        Record per-step fit coefficients and residuals on the surface.

    Raises
    ------
    SolveAborted
        On a non-finite solution value or an excessive imaginary
        residual, with the offending step index.
    ValueError
        On inconsistent problem/grid data (center mismatch, terminal
        payoff below the barrier).
    """
    if grid.center != spec.x_init:
        raise ValueError("grid.center must equal spec.x_init")

    n = spec.steps
    N = grid.N
    dt = spec.step_size
    times = spec.times()
    x_full = grid.space_nodes(include_right=True)
    x = x_full[:N]

    g_full = np.asarray(spec.terminal(x_full), dtype=float)
    if g_full.shape != x_full.shape:
        raise ValueError("terminal function must be vectorized over x")
    if not np.all(np.isfinite(g_full)):
        raise ValueError("terminal values must be finite")

    reflected = spec.barrier is not None
    if reflected:
        b_terminal = np.asarray(spec.barrier(spec.horizon, x_full), dtype=float)
        tol = 1e-12 * max(1.0, float(np.max(np.abs(g_full))))
        if np.any(b_terminal > g_full + tol):
            raise ValueError("terminal payoff must dominate the barrier at maturity")

    u = np.empty((n + 1, N + 1))
    udot = np.zeros((n + 1, N + 1))
    u[n, :N] = g_full[:N]
    u[n, N] = u[n, 0]
    reflection = np.zeros((n + 1, N + 1)) if reflected else None
    diagnostics = [] if collect_diagnostics else None

    stepper = _StepConvolver(spec, grid, epsilon)
    # Right-edge sample for the fit: honest terminal value first, then
    # linear extension of the computed rows.
    samples = np.empty(N + 1)
    samples[:N] = g_full[:N]
    samples[N] = g_full[N]

    for i in range(n - 1, -1, -1):
        t = times[i]
        try:
            if spec.scheme == EXPLICIT_II:
                (util, udot_i), coeffs, residual = stepper.convolve(
                    samples, t, (EXPECTATION, GRADIENT)
                )
                raw = util + dt * spec.driver(t, x, util, udot_i)
            else:
                v_next = samples[:N]
                (vdot,), c1, res1 = stepper.convolve(samples, t, (GRADIENT,))
                vtilde = v_next + dt * spec.driver(t, x, v_next, vdot)
                (raw,), coeffs, res2 = stepper.convolve(
                    _extended_samples(vtilde), t, (EXPECTATION,)
                )
                udot_i = vdot
                residual = max(res1, res2)
        except ImaginaryResidualError as exc:
            raise SolveAborted(i, str(exc)) from exc

        active = 0
        if reflected:
            b = np.asarray(spec.barrier(t, x), dtype=float)
            increments = np.maximum(b - raw, 0.0)
            active = int(np.count_nonzero(increments))
            reflection[i, :N] = increments
            reflection[i, N] = reflection[i, 0]
            u_i = np.maximum(raw, b)
        else:
            u_i = raw

        if not (np.all(np.isfinite(u_i)) and np.all(np.isfinite(udot_i))):
            raise SolveAborted(i, "non-finite solution values")

        u[i, :N] = u_i
        u[i, N] = u_i[0]
        udot[i, :N] = udot_i
        udot[i, N] = udot_i[0]
        if collect_diagnostics:
            diagnostics.append(StepDiagnostics(i, coeffs, residual, active))

        samples = _extended_samples(u_i)

    return SolutionSurface(
        grid=grid,
        times=times,
        u=u,
        udot=udot,
        reflection=reflection,
        diagnostics=diagnostics,
    )


def value_at_start(surface: SolutionSurface) -> tuple[float, float]:
    """Solution pair (y0, z0) at t=0 read off the center node.

    The grid is centered at the initial state, so no interpolation is
    involved.
    """
    mid = surface.grid.N // 2
    return float(surface.u[0, mid]), float(surface.udot[0, mid])
