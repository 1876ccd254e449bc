"""DFT conventions and the spectral convolution step.

The conditional expectations appearing in one backward Euler step are
convolutions of the (periodized) solution samples against a Gaussian
kernel.  On the coupled grids of :mod:`convbsde.grid` they reduce to

    theta(x_k) = (-1)^k * idft( psi(nu_j) * dft((-1)^i * w_i * eta(x_i)) )_k

where psi is the characteristic-function multiplier of the increment
and w the folded quadrature weights.  The alternating signs come from
the frequency grid starting at -L/2 rather than 0.

The forward DFT here carries the 1/N factor and the inverse carries
none.  Note the two scale factors cancel in the convolution formula,
and since N is a power of two the cancellation is exact in floating
point as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridPair
from .transform import EXPECTATION, GRADIENT

# Largest tolerated imaginary residual of a convolution output,
# relative to its real magnitude.  A breach signals a mis-specified
# multiplier or transform rather than roundoff.
IMAG_RESIDUAL_TOLERANCE = 1e-8


class ImaginaryResidualError(ArithmeticError):
    """Convolution output had a non-negligible imaginary part."""

    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"imaginary residual {residual:.3e} exceeds {tolerance:.0e} of the real magnitude"
        )


def dft(values: np.ndarray) -> np.ndarray:
    """Forward DFT, (1/N) * sum_i values_i * exp(-i*j*k*2*pi/N)."""
    values = np.asarray(values)
    return np.fft.fft(values) / values.shape[-1]


def idft(values: np.ndarray) -> np.ndarray:
    """Inverse DFT, sum_j values_j * exp(+i*j*k*2*pi/N), no scale factor."""
    values = np.asarray(values)
    return np.fft.ifft(values) * values.shape[-1]


def increment_cf(nu, step: float, drift: float, vol: float):
    """Characteristic function of one forward increment.

    The increment over a step is drift*step + vol*dW with dW normal of
    variance step, so the characteristic function is
    exp(step*(i*drift*nu - vol^2*nu^2/2)).  ``nu`` may be complex; a
    dampened convolution evaluates it at nu - i*alpha.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if not vol > 0:
        raise ValueError("vol must be positive")
    nu = np.asarray(nu, dtype=complex)
    out = np.exp(step * (1j * drift * nu - 0.5 * vol * vol * nu * nu))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class PsiKind:
    """Frequency multiplier of one convolution step.

    tag "expectation" computes the conditional expectation of the next
    solution values: psi(nu) = phi(nu - i*alpha).  tag "gradient"
    computes the martingale-increment functional estimating
    vol * d/dx of that expectation: psi(nu) = vol*(alpha + i*nu) *
    phi(nu - i*alpha).  Here phi is ``increment_cf`` for the step and
    alpha the dampening exponent of the periodization transform.
    """

    tag: str
    alpha: float
    step: float
    drift: float = 0.0
    vol: float = 1.0

    def values(self, nu: np.ndarray) -> np.ndarray:
        """Evaluate the multiplier on the frequency nodes."""
        phi = increment_cf(nu - 1j * self.alpha, self.step, self.drift, self.vol)
        if self.tag == EXPECTATION:
            return phi
        if self.tag == GRADIENT:
            return self.vol * (self.alpha + 1j * np.asarray(nu)) * phi
        raise ValueError(f"unknown psi tag: {self.tag!r}")


def quadrature_weights(N: int, rule: str = "trapezoid") -> np.ndarray:
    """Folded quadrature weights for the space-axis integral.

    The composite rule runs over N+1 nodes but the DFT sees only N, so
    the weight at x_N is folded onto x_0 (the integrand is periodized).
    For the trapezoid rule the half weights at both ends combine to 1
    and every folded weight is 1.
    """
    if N % 2 != 0 or N < 2:
        raise ValueError("N must be even and positive")
    if rule != "trapezoid":
        raise ValueError(f"unsupported quadrature rule: {rule!r}")
    return np.ones(N)


def _alternating_signs(N: int) -> np.ndarray:
    return 1.0 - 2.0 * (np.arange(N) % 2)


def _to_real(values: np.ndarray) -> np.ndarray:
    real = values.real
    max_re = float(np.max(np.abs(real))) if real.size else 0.0
    max_im = float(np.max(np.abs(values.imag))) if real.size else 0.0
    if max_im > IMAG_RESIDUAL_TOLERANCE * max(max_re, 1e-300):
        raise ImaginaryResidualError(max_im / max(max_re, 1e-300), IMAG_RESIDUAL_TOLERANCE)
    return real


def convolve_step(
    eta: np.ndarray,
    grid: GridPair,
    psi: PsiKind,
    weights: np.ndarray | None = None,
    return_residual: bool = False,
):
    """Convolve transformed samples against the psi multiplier.

    ``eta`` must already be periodized and dampened (the output of
    ``apply_transform``), length N.  Returns theta at the nodes
    x_0..x_{N-1}; the value at x_N is theta(x_0) by periodicity.

    With ``return_residual`` the relative imaginary residual that was
    discarded is returned alongside theta.
    """
    eta = np.asarray(eta, dtype=float)
    if eta.ndim != 1 or eta.size != grid.N:
        raise ValueError(f"eta must have length N = {grid.N}")
    if weights is None:
        weights = quadrature_weights(grid.N)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != eta.shape:
        raise ValueError("weights length must match eta")

    signs = _alternating_signs(grid.N)
    spectrum = dft(signs * weights * eta)
    theta_c = signs * idft(psi.values(grid.freq_nodes()) * spectrum)
    theta = _to_real(theta_c)
    if return_residual:
        max_re = max(float(np.max(np.abs(theta))), 1e-300)
        return theta, float(np.max(np.abs(theta_c.imag))) / max_re
    return theta


def convolve_step_statedep(
    eta: np.ndarray, grid: GridPair, psi_per_node: list[PsiKind]
) -> np.ndarray:
    """Convolution step with a separate psi multiplier per space node.

    Needed when drift or vol depend on the state: node x_k then carries
    its own increment law, frozen at the conditioning point.  The
    inverse transform no longer factorizes into a single FFT, so each
    output row is summed explicitly; the kernel matrix is materialized
    one row at a time to keep memory O(N).  Coincides with
    ``convolve_step`` when every node has the same psi.
    """
    eta = np.asarray(eta, dtype=float)
    if eta.ndim != 1 or eta.size != grid.N:
        raise ValueError(f"eta must have length N = {grid.N}")
    if len(psi_per_node) != grid.N:
        raise ValueError("need one PsiKind per space node")

    N = grid.N
    signs = _alternating_signs(N)
    nu = grid.freq_nodes()
    spectrum = dft(signs * quadrature_weights(N) * eta)
    theta_c = np.empty(N, dtype=complex)
    j = np.arange(N)
    for k in range(N):
        row = np.exp((2j * np.pi * k / N) * j)
        theta_c[k] = signs[k] * np.dot(row, psi_per_node[k].values(nu) * spectrum)
    return _to_real(theta_c)
