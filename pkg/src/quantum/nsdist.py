"""
Nussbaum-Szkola distributions of two normal states.

Left multiplication by xi_phi and right multiplication by xi_omega commute and
are diagonalized together by the rank-one matrices u_i v_j*, where u and v are
eigenbases of xi_phi and xi_omega in block k. Taking the atom (k, i, j) with
reference mass t_k, the unitary a -> (u_i* a_k v_j) turns the two operators into
multiplication by alpha_i and beta_j, and the densities are f_phi = alpha_i^2,
f_omega = beta_j^2 against nu = t_k * |<u_i, v_j>|^2 (zero when both vanish).
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
import pandas as pd

from .algebra import check_conforms, trace
from .spectral import eigh, kernel_projection, support_mask
from .tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

ATOM_COLUMNS = ["block", "i", "j", "nu", "fphi", "fomega", "overlap"]


class SpectrumBlock(NamedTuple):
    alpha: np.ndarray    # eigenvalues of xi_phi, clamped
    u: np.ndarray
    beta: np.ndarray     # eigenvalues of xi_omega, clamped
    v: np.ndarray
    overlap: np.ndarray  # O[i, j] = |<u_i, v_j>|^2


@dataclass(frozen=True)
class SimultaneousSpectrum:
    blocks: Tuple[SpectrumBlock, ...]


class Atom(NamedTuple):
    block: int
    i: int
    j: int
    nu: float
    fphi: float
    fomega: float
    overlap: float


@dataclass(frozen=True)
class NSOutput:
    """Atoms of the discrete measure space, in (block, i, j) lexicographic order."""

    block: np.ndarray
    i: np.ndarray
    j: np.ndarray
    nu: np.ndarray
    fphi: np.ndarray
    fomega: np.ndarray
    overlap: np.ndarray
    defect_phi_support: float    # omega(1 - s_M(phi))
    defect_omega_support: float  # phi(1 - s_M(omega))

    @property
    def atoms(self):
        return [Atom(int(b), int(i), int(j), float(n), float(p), float(q), float(o))
                for b, i, j, n, p, q, o in zip(self.block, self.i, self.j, self.nu,
                                               self.fphi, self.fomega, self.overlap)]

    @property
    def p_mass(self):
        return self.fphi * self.nu

    @property
    def q_mass(self):
        return self.fomega * self.nu

    def marginal_sums(self):
        return float(np.sum(self.p_mass)), float(np.sum(self.q_mass))

    def to_frame(self, drop_null=False):
        frame = pd.DataFrame({c: getattr(self, c) for c in ATOM_COLUMNS})
        if drop_null:
            frame = frame[frame["nu"] > 0].reset_index(drop=True)
        return frame


def overlaps(u, v):
    """|<u_i, v_j>|^2 for the columns of two orthonormal bases."""
    return np.abs(u.conj().T @ v) ** 2


def _clamped(lam, tol):
    return np.where(support_mask(lam, tol), lam, 0.0)


def simultaneous_spectrum(spec, phi, omega, *, tol=DEFAULT_TOLERANCES):
    check_conforms(spec, phi.xi, "phi")
    check_conforms(spec, omega.xi, "omega")
    left = eigh(spec, phi.xi, tol=tol)
    right = eigh(spec, omega.xi, tol=tol)
    blocks = []
    for (alpha, u), (beta, v) in zip(left.blocks, right.blocks):
        blocks.append(SpectrumBlock(_clamped(alpha, tol), u, _clamped(beta, tol), v, overlaps(u, v)))
    return SimultaneousSpectrum(tuple(blocks))


def build_ns(spec, sim):
    """NS densities and the measure nu from a simultaneous spectrum."""
    cols = {c: [] for c in ATOM_COLUMNS}
    for k, (weight, blk) in enumerate(zip(spec.weights, sim.blocks)):
        n_i, n_j = blk.overlap.shape
        ii, jj = np.meshgrid(np.arange(n_i), np.arange(n_j), indexing="ij")
        alpha = blk.alpha[ii]
        beta = blk.beta[jj]
        live = (alpha > 0) | (beta > 0)
        cols["block"].append(np.full(ii.size, k))
        cols["i"].append(ii.ravel())
        cols["j"].append(jj.ravel())
        cols["nu"].append(np.where(live, weight * blk.overlap, 0.0).ravel())
        cols["fphi"].append((alpha ** 2).ravel())
        cols["fomega"].append((beta ** 2).ravel())
        cols["overlap"].append(blk.overlap.ravel())
    arrays = {c: np.concatenate(v) for c, v in cols.items()}

    p_mass = arrays["fphi"] * arrays["nu"]
    q_mass = arrays["fomega"] * arrays["nu"]
    defect_phi = float(np.sum(q_mass[arrays["fphi"] == 0]))
    defect_omega = float(np.sum(p_mass[arrays["fomega"] == 0]))
    logger.debug("built %d atoms; defects %.3e, %.3e", p_mass.size, defect_phi, defect_omega)
    return NSOutput(**arrays, defect_phi_support=defect_phi, defect_omega_support=defect_omega)


def ns_distributions(spec, phi, omega, *, tol=DEFAULT_TOLERANCES):
    return build_ns(spec, simultaneous_spectrum(spec, phi, omega, tol=tol))


def support_defects_direct(spec, phi, omega, *, tol=DEFAULT_TOLERANCES):
    """(omega(1 - s_M(phi)), phi(1 - s_M(omega))) as tau-pairings with projections."""

    def pairing(state, projection):
        value = trace(spec, state.h @ projection).real
        return float(min(max(value, 0.0), 1.0))

    return (
        pairing(omega, kernel_projection(spec, phi, tol=tol)),
        pairing(phi, kernel_projection(spec, omega, tol=tol)),
    )
