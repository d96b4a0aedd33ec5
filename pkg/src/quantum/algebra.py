"""
Finite-dimensional semifinite von Neumann algebras as weighted direct sums of
full matrix blocks.

The trace is tau(x) = sum_k t_k * Tr(x_k) and the L2 inner product is
<a, b> = tau(a* b). In finite dimensions the algebra and all its L_p spaces
coincide as sets, so a single `Element` type carries algebra elements,
densities and vector representatives alike.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    InvalidAlgebra,
    NotHermitian,
    NotNormalized,
    NotPositive,
    ShapeMismatch,
    ZeroTrace,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)


class Block(NamedTuple):
    dim: int
    weight: float


@dataclass(frozen=True)
class AlgebraSpec:
    blocks: Tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(Block(*b) for b in self.blocks)
        if not blocks:
            raise InvalidAlgebra("an algebra needs at least one block")
        for k, (dim, weight) in enumerate(blocks):
            if int(dim) != dim or dim < 1:
                raise InvalidAlgebra(f"block {k}: dim must be a positive integer, got {dim!r}")
            if not np.isfinite(weight) or weight <= 0:
                raise InvalidAlgebra(f"block {k}: weight must be positive and finite, got {weight!r}")
        object.__setattr__(
            self, "blocks", tuple(Block(int(d), float(w)) for d, w in blocks)
        )

    @classmethod
    def from_pairs(cls, pairs):
        return cls(tuple(Block(d, w) for d, w in pairs))

    @property
    def dims(self):
        return tuple(b.dim for b in self.blocks)

    @property
    def weights(self):
        return tuple(b.weight for b in self.blocks)

    def __len__(self):
        return len(self.blocks)


def _frozen(matrix):
    m = np.array(matrix, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class Element:
    """One complex square matrix per block."""

    blocks: Tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(_frozen(b) for b in self.blocks))

    @classmethod
    def identity(cls, spec):
        return cls(tuple(np.eye(d) for d in spec.dims))

    @classmethod
    def zeros(cls, spec):
        return cls(tuple(np.zeros((d, d)) for d in spec.dims))

    def adjoint(self):
        return Element(tuple(b.conj().T for b in self.blocks))

    def scale(self, c):
        return Element(tuple(c * b for b in self.blocks))

    def __matmul__(self, other):
        return Element(tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def __add__(self, other):
        return Element(tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        return Element(tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def conjugate_by(self, u):
        """u x u* blockwise."""
        return Element(tuple(ub @ b @ ub.conj().T for ub, b in zip(u.blocks, self.blocks)))


@dataclass(frozen=True)
class State:
    """A normal state: density h with tau(h) = 1 and xi = h^(1/2)."""

    h: Element
    xi: Element


def check_conforms(spec, x, name="element"):
    if len(x.blocks) != len(spec.blocks):
        raise ShapeMismatch(
            f"{name} has {len(x.blocks)} blocks, algebra has {len(spec.blocks)}"
        )
    for k, (b, dim) in enumerate(zip(x.blocks, spec.dims)):
        if b.shape != (dim, dim):
            raise ShapeMismatch(f"{name} block {k} has shape {b.shape}, expected {(dim, dim)}")
        if not np.all(np.isfinite(b)):
            raise ShapeMismatch(f"{name} block {k} has non-finite entries")


def trace(spec, x):
    """tau(x) = sum_k t_k Tr(x_k)."""
    check_conforms(spec, x)
    return complex(sum(w * np.trace(b) for w, b in zip(spec.weights, x.blocks)))


def inner(spec, a, b):
    """<a, b> = tau(a* b); conjugate-linear in a."""
    check_conforms(spec, a, "left operand")
    check_conforms(spec, b, "right operand")
    # Tr(a* b) = sum_ij conj(a_ij) b_ij
    return complex(sum(w * np.vdot(x, y) for w, x, y in zip(spec.weights, a.blocks, b.blocks)))


def is_hermitian(matrix, tol=DEFAULT_TOLERANCES):
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    return np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol.herm * max(scale, tol.supp_floor)


def _cleaned_spectrum(spec, h, tol, name):
    """Eigensystem of h with |lambda| <= psd * lambda_max set to exactly zero."""
    from . import spectral

    for k, b in enumerate(h.blocks):
        if not is_hermitian(b, tol):
            raise NotHermitian(f"{name} is not Hermitian", block=k)
    data = spectral.eigh(spec, h, tol=tol)
    blocks = []
    for k, (evals, evecs) in enumerate(data.blocks):
        lam_max = max(np.max(np.abs(evals), initial=0.0), tol.supp_floor)
        if evals[0] < -tol.psd * lam_max:
            raise NotPositive(f"{name} has eigenvalue {evals[0]:.3e} < 0", block=k)
        noise = np.abs(evals) <= tol.psd * lam_max
        if np.any(noise & (evals < 0)):
            logger.debug("%s block %d: clamping %d near-zero eigenvalues", name, k, int(noise.sum()))
        blocks.append(spectral.EigenBlock(np.where(noise, 0.0, evals), evecs))
    return spectral.SpectralData(tuple(blocks))


def validate_state(spec, h, renormalize=False, *, name="state", tol=DEFAULT_TOLERANCES):
    """Check a density and build its State (with xi = h^(1/2)).

    Eigenvalues within tol.psd * lambda_max of zero are set to exactly zero, and
    h is re-assembled from the cleaned spectrum so that xi^2 = h.
    """
    check_conforms(spec, h, name)
    total = trace(spec, h).real
    if renormalize:
        if total < tol.norm:
            raise ZeroTrace(f"{name} has trace {total:.3e}; cannot renormalize")
        if abs(total - 1) > tol.norm:
            logger.info("renormalizing %s by tau(h) = %.6g", name, total)
        h = h.scale(1.0 / total)

    from .spectral import func_calc

    data = _cleaned_spectrum(spec, h, tol, name)
    h_clean = data.reconstruct()
    xi = func_calc(spec, h_clean, np.sqrt, data=data, tol=tol)

    total = trace(spec, h_clean).real
    if abs(total) < tol.norm and not renormalize:
        raise ZeroTrace(f"{name} has zero trace")
    if abs(total - 1) > tol.norm:
        raise NotNormalized(f"{name} has tau(h) = {total:.12g}, expected 1")
    return State(h=h_clean, xi=xi)


RankProfile = Union[None, str, Sequence[int]]


def _ranks(spec, rank_profile):
    if rank_profile is None or rank_profile == "full":
        return list(spec.dims)
    ranks = [int(r) for r in rank_profile]
    if len(ranks) != len(spec.blocks):
        raise ShapeMismatch(f"rank profile has {len(ranks)} entries for {len(spec.blocks)} blocks")
    for k, (r, dim) in enumerate(zip(ranks, spec.dims)):
        if not 0 <= r <= dim:
            raise InvalidAlgebra(f"block {k}: rank {r} outside [0, {dim}]")
    if not any(ranks):
        raise ZeroTrace("every block has rank zero")
    return ranks


def random_state(spec, seed, rank_profile: RankProfile = None, *, tol: Optional[Tolerances] = None):
    """Random density h_k = G_k G_k* with complex Gaussian G_k of shape (dim_k, r_k).

    Deterministic in (seed, spec, rank_profile).
    """
    tol = tol or DEFAULT_TOLERANCES
    ranks = _ranks(spec, rank_profile)
    rng = np.random.default_rng(seed)
    blocks = []
    for dim, r in zip(spec.dims, ranks):
        g = (rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))) / np.sqrt(2)
        blocks.append(g @ g.conj().T)
    return validate_state(spec, Element(tuple(blocks)), renormalize=True, name="random state", tol=tol)
