"""
Spectral toolkit in finite dimensions: Hermitian eigendecomposition, Borel
functional calculus, the pseudo-inverse function w and support projections.

`support_mask` is the one place that decides which eigenvalues count as zero;
every downstream notion of support ({f_omega = 0}, {f_phi = 0}, the kernel of
the relative modular operator) goes through it.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
import scipy.linalg

from .algebra import Element, check_conforms, is_hermitian
from .errors import NonFiniteValue, NotHermitian, NotUnitary, SolverFailure
from .tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


class EigenBlock(NamedTuple):
    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # unitary, columns paired with eigenvalues


@dataclass(frozen=True)
class SpectralData:
    blocks: Tuple[EigenBlock, ...]

    def reconstruct(self):
        return Element(tuple((v * lam) @ v.conj().T for lam, v in self.blocks))


def support_mask(eigenvalues, tol=DEFAULT_TOLERANCES):
    """True where an eigenvalue lies in the support: lambda > max(supp * lambda_max, supp_floor)."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    lam_max = np.max(eigenvalues, initial=0.0)
    return eigenvalues > max(tol.supp * lam_max, tol.supp_floor)


def _eigh_block(k, block, tol):
    if not is_hermitian(block, tol):
        raise NotHermitian("input to eigh is not Hermitian", block=k)
    try:
        lam, v = scipy.linalg.eigh((block + block.conj().T) / 2)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SolverFailure(f"eigensolver failed: {e}", block=k) from e
    return EigenBlock(lam, v)


def eigh(spec, x, *, tol=DEFAULT_TOLERANCES):
    """Blockwise Hermitian eigendecomposition, eigenvalues ascending."""
    check_conforms(spec, x)
    return SpectralData(tuple(_eigh_block(k, b, tol) for k, b in enumerate(x.blocks)))


def apply_blockwise(data, g_block):
    """V diag(g_block(lambda)) V* per block; g_block sees a whole block's eigenvalues."""
    out = []
    for k, (lam, v) in enumerate(data.blocks):
        values = np.asarray(g_block(lam))
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue("function is not finite on the spectrum", block=k)
        out.append((v * values) @ v.conj().T)
    return Element(tuple(out))


def clamp_negligible(data, tol=DEFAULT_TOLERANCES):
    """Rounding-level negative eigenvalues set to exactly 0."""
    out = []
    for lam, v in data.blocks:
        lam_max = max(np.max(np.abs(lam), initial=0.0), tol.supp_floor)
        noise = (lam < 0) & (lam >= -tol.psd * lam_max)
        out.append(EigenBlock(np.where(noise, 0.0, lam), v))
    return SpectralData(tuple(out))


def func_calc(spec, x, g, *, data=None, tol=DEFAULT_TOLERANCES):
    """g(x) for Hermitian x, g a vectorized real function.

    A precomputed eigensystem may be passed as `data` to apply several
    functions to one spectral decomposition. Eigenvalues in
    [-psd * lambda_max, 0) are clamped to 0 before g sees them.
    """
    if data is None:
        data = clamp_negligible(eigh(spec, x, tol=tol), tol)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return apply_blockwise(data, g)


def w_apply(spec, x, *, tol=DEFAULT_TOLERANCES):
    """w(x) with w(l) = 1/l on the support and w = 0 on the kernel."""

    def w(lam):
        mask = support_mask(lam, tol)
        out = np.zeros_like(lam)
        out[mask] = 1.0 / lam[mask]
        return out

    return apply_blockwise(eigh(spec, x, tol=tol), w)


def support_projection(spec, s, *, tol=DEFAULT_TOLERANCES):
    """s_M(omega) = E_omega((0, inf)), the projection onto the range of xi."""
    return apply_blockwise(eigh(spec, s.xi, tol=tol), lambda lam: support_mask(lam, tol).astype(float))


def kernel_projection(spec, s, *, tol=DEFAULT_TOLERANCES):
    """1 - s_M(omega), built from the kernel eigenvectors (exactly 0 at full rank)."""
    return apply_blockwise(eigh(spec, s.xi, tol=tol), lambda lam: (~support_mask(lam, tol)).astype(float))


def log_on_support(spec, x, *, tol=DEFAULT_TOLERANCES):
    """Natural log of a PSD element on its support, 0 on its kernel."""

    def log(lam):
        mask = support_mask(lam, tol)
        out = np.zeros_like(lam)
        out[mask] = np.log(lam[mask])
        return out

    return apply_blockwise(eigh(spec, x, tol=tol), log)


def conjugate_spectral(u, d, *, tol=DEFAULT_TOLERANCES):
    """Spectral data of u x u* from that of x: eigenvectors become u V."""
    out = []
    for k, (ub, (lam, v)) in enumerate(zip(u.blocks, d.blocks)):
        if np.max(np.abs(ub.conj().T @ ub - np.eye(ub.shape[0])), initial=0.0) > tol.fc:
            raise NotUnitary("conjugating element is not unitary", block=k)
        out.append(EigenBlock(lam.copy(), ub @ v))
    return SpectralData(tuple(out))
