"""
Classical and quantum f-divergences.

The quantum divergence is computed two ways that share no intermediate
results beyond the states themselves:

  * ``quantum_f_div_ns`` evaluates the classical f-divergence of the
    Nussbaum-Szkola distributions (joint eigenbasis of xi_phi and xi_omega);
  * ``quantum_f_div_direct`` builds the relative modular operator as a
    dim^2 x dim^2 superoperator in the matrix-unit basis, diagonalizes it and
    integrates f against the spectral measure of xi_omega over (0, inf),
    with the support defects computed separately from projections.

All logarithms are natural.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import (
    InvalidDistribution,
    NonFiniteValue,
    ParameterOutOfRange,
    SolverFailure,
    UnknownDivergence,
)
from .extreal import PLUS_INF, ZERO, ExtReal, ext_add, ext_scale, ext_sum
from .algebra import trace
from .nsdist import ns_distributions, support_defects_direct
from .spectral import log_on_support, support_mask, w_apply
from .tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

CATALOG_NAMES = ("relative-entropy", "chi-squared", "total-variation", "neg-log", "hellinger", "power")
DEFAULT_POWER_ALPHA = 1.5
POWER_ALPHA_RANGE = (1.0, 2.0)  # open below, closed above


class Route(str, Enum):
    NS = "ns"
    DIRECT = "direct"


@dataclass(frozen=True)
class ConvexFunctionSpec:
    """A convex f on (0, inf) with f0 = f(0+) and fpinf = lim f(t)/t."""

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    f0: ExtReal
    fpinf: ExtReal
    parameter: Optional[float] = None

    def __call__(self, t):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return self.eval(np.asarray(t, dtype=float))

    @property
    def label(self):
        return self.name if self.parameter is None else f"{self.name}({self.parameter:g})"

    def at_one(self):
        return float(self(1.0))


@dataclass(frozen=True)
class DivergenceResult:
    value: ExtReal
    term_main: ExtReal
    term_f0: ExtReal
    term_fpinf: ExtReal
    route: Route
    defects: Tuple[float, float] = (0.0, 0.0)


def _relative_entropy(t):
    return t * np.log(t)


def _chi_squared(t):
    return (t - 1.0) ** 2


def _total_variation(t):
    return np.abs(t - 1.0)


def _neg_log(t):
    return -np.log(t)


def _hellinger(t):
    return (np.sqrt(t) - 1.0) ** 2


def catalog(name, parameter=None):
    """Look up a convex function by name; `power` takes alpha in (1, 2]."""
    if name == "relative-entropy":
        return ConvexFunctionSpec(name, _relative_entropy, ZERO, PLUS_INF)
    if name == "chi-squared":
        return ConvexFunctionSpec(name, _chi_squared, ExtReal(1.0), PLUS_INF)
    if name == "total-variation":
        return ConvexFunctionSpec(name, _total_variation, ExtReal(1.0), ExtReal(1.0))
    if name == "neg-log":
        return ConvexFunctionSpec(name, _neg_log, PLUS_INF, ZERO)
    if name == "hellinger":
        return ConvexFunctionSpec(name, _hellinger, ExtReal(1.0), ExtReal(1.0))
    if name == "power":
        alpha = DEFAULT_POWER_ALPHA if parameter is None else float(parameter)
        lo, hi = POWER_ALPHA_RANGE
        if not lo < alpha <= hi:
            raise ParameterOutOfRange(f"power family needs alpha in ({lo:g}, {hi:g}], got {alpha!r}")
        return ConvexFunctionSpec(name, lambda t: t ** alpha, ZERO, PLUS_INF, parameter=alpha)
    raise UnknownDivergence(f"unknown divergence {name!r}; choose from {', '.join(CATALOG_NAMES)}")


def _evaluate(f, t, what):
    values = f(t)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue(f"{f.label} is not finite on {what}")
    return values


def _snap(mass, floor):
    if mass <= floor:
        if mass > 0:
            logger.debug("boundary mass %.3e snapped to zero", mass)
        return 0.0
    return mass


def f_div_terms(nu, p, q, f, boundary_floor=0.0):
    """(main, f0 term, fpinf term) of D_f(p dnu || q dnu)."""
    nu, p, q = (np.asarray(a, dtype=float) for a in (nu, p, q))
    for label, a in (("nu", nu), ("p", p), ("q", q)):
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise InvalidDistribution(f"{label} must be finite and nonnegative")

    both = (p > 0) & (q > 0)
    with np.errstate(over="ignore"):
        ratio = p[both] / q[both]
    if not np.all(np.isfinite(ratio)):
        raise NonFiniteValue("density ratio p/q overflowed")
    main = ExtReal(np.sum(q[both] * _evaluate(f, ratio, "p/q") * nu[both]))

    only_q = _snap(float(np.sum((q * nu)[(p == 0) & (q > 0)])), boundary_floor)
    only_p = _snap(float(np.sum((p * nu)[(p > 0) & (q == 0)])), boundary_floor)
    return main, ext_scale(only_q, f.f0), ext_scale(only_p, f.fpinf)


def classical_f_div(atoms, f, *, boundary_floor=0.0):
    """D_f for atoms given as rows (nu, p, q); 0 f(0/0) = 0 and 0 f(a/0) = a f'(inf)."""
    atoms = np.asarray(atoms, dtype=float).reshape(-1, 3)
    return ext_sum(f_div_terms(atoms[:, 0], atoms[:, 1], atoms[:, 2], f, boundary_floor))


def quantum_f_div_ns(spec, phi, omega, f, *, tol=DEFAULT_TOLERANCES, ns=None):
    """S_f(phi || omega) as the classical f-divergence of the NS distributions."""
    if ns is None:
        ns = ns_distributions(spec, phi, omega, tol=tol)
    main, t0, tinf = f_div_terms(ns.nu, ns.fphi, ns.fomega, f, tol.defect)
    return DivergenceResult(
        value=ext_add(ext_add(main, t0), tinf),
        term_main=main,
        term_f0=t0,
        term_fpinf=tinf,
        route=Route.NS,
        defects=(ns.defect_phi_support, ns.defect_omega_support),
    )


class ModularBlock(NamedTuple):
    eigenvalues: np.ndarray  # spectrum of Delta_{phi,omega} on block k
    weights: np.ndarray      # squared tau-overlaps of xi_omega with the eigenvectors
    mask: np.ndarray         # eigenvalues inside (0, inf)


def _support_eigenvalues(x, tol):
    lam = scipy.linalg.eigvalsh((x + x.conj().T) / 2)
    return lam[support_mask(lam, tol)]


def modular_cut(xi_phi, xi_omega, tol=DEFAULT_TOLERANCES):
    """Eigenvalues of Delta at or below this value belong to its kernel.

    The nonzero spectrum of Delta is {alpha_i^2 / beta_j^2} for alpha in the
    support spectrum of xi_phi and beta in that of xi_omega, so it is bounded
    below by (min alpha / max beta)^2.
    """
    alpha = _support_eigenvalues(xi_phi, tol)
    beta = _support_eigenvalues(xi_omega, tol)
    if alpha.size == 0 or beta.size == 0:
        return np.inf
    lowest = (alpha.min() / beta.max()) ** 2
    highest = (alpha.max() / beta.min()) ** 2
    return max(min(tol.supp * highest, tol.modular * lowest), tol.supp_floor)


def modular_spectrum(spec, phi, omega, *, tol=DEFAULT_TOLERANCES):
    """Spectral measure of xi_omega under the relative modular operator, per block.

    Delta^(1/2) acts on matrices as x -> xi_phi x w(xi_omega); with row-major
    flattening this is kron(xi_phi, w(xi_omega)^T). The matrix units scaled by
    t_k^(-1/2) are tau-orthonormal, so the superoperator matrix is unchanged
    and |<Psi, xi_omega>_tau|^2 = t_k |<psi, vec(xi_omega)>|^2.
    """
    w_omega = w_apply(spec, omega.xi, tol=tol)
    blocks = []
    for k, (weight, xp, wo, xo) in enumerate(zip(spec.weights, phi.xi.blocks, w_omega.blocks, omega.xi.blocks)):
        half = np.kron(xp, wo.T)
        delta = half.conj().T @ half
        delta = (delta + delta.conj().T) / 2
        try:
            lam, psi = scipy.linalg.eigh(delta)
            cut = modular_cut(xp, xo, tol)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise SolverFailure(f"modular eigensolver failed: {e}", block=k) from e
        amplitudes = psi.conj().T @ xo.ravel()
        mask = lam > cut
        logger.debug("block %d: %d of %d modular eigenvalues in (0, inf)", k, int(mask.sum()), lam.size)
        blocks.append(ModularBlock(lam, weight * np.abs(amplitudes) ** 2, mask))
    return tuple(blocks)


def quantum_f_div_direct(spec, phi, omega, f, *, tol=DEFAULT_TOLERANCES):
    """S_f(phi || omega) from the spectral decomposition of Delta_{phi,omega}."""
    main = 0.0
    excluded = 0.0
    for blk in modular_spectrum(spec, phi, omega, tol=tol):
        lam = blk.eigenvalues[blk.mask]
        main += float(np.sum(_evaluate(f, lam, "the modular spectrum") * blk.weights[blk.mask]))
        excluded += float(np.sum(blk.weights[~blk.mask]))
    main = ExtReal(main)

    defect_phi, defect_omega = support_defects_direct(spec, phi, omega, tol=tol)
    # the kernel of Delta carries exactly omega(1 - s(phi))
    if abs(excluded - defect_phi) > tol.norm:
        raise SolverFailure(
            f"modular kernel carries weight {excluded:.6e} but omega(1 - s(phi)) = {defect_phi:.6e}"
        )
    t0 = ext_scale(_snap(defect_phi, tol.defect), f.f0)
    tinf = ext_scale(_snap(defect_omega, tol.defect), f.fpinf)
    return DivergenceResult(
        value=ext_add(ext_add(main, t0), tinf),
        term_main=main,
        term_f0=t0,
        term_fpinf=tinf,
        route=Route.DIRECT,
        defects=(defect_phi, defect_omega),
    )


def quantum_f_div(spec, phi, omega, f, route=Route.NS, *, tol=DEFAULT_TOLERANCES):
    if Route(route) is Route.NS:
        return quantum_f_div_ns(spec, phi, omega, f, tol=tol)
    return quantum_f_div_direct(spec, phi, omega, f, tol=tol)


def umegaki_relative_entropy(spec, phi, omega, *, tol=DEFAULT_TOLERANCES):
    """tau(h_phi (ln h_phi - ln h_omega)), +inf unless supp(phi) lies in supp(omega)."""
    _, defect_omega = support_defects_direct(spec, phi, omega, tol=tol)
    if defect_omega > tol.defect:
        return PLUS_INF
    # ln h = 2 ln xi on the support
    log_ratio = (log_on_support(spec, phi.xi, tol=tol) - log_on_support(spec, omega.xi, tol=tol)).scale(2.0)
    return ExtReal(trace(spec, phi.h @ log_ratio).real)


def agree(a, b, rel=DEFAULT_TOLERANCES.agreement):
    """Both +inf, or both finite with |a - b| <= rel * max(1, |a|)."""
    a, b = ExtReal.of(a), ExtReal.of(b)
    if a.infinite or b.infinite:
        return a.infinite and b.infinite
    return abs(a.value - b.value) <= rel * max(1.0, abs(a.value))


def delta(a, b):
    """|a - b| in the extended reals; 0 when both are +inf."""
    a, b = ExtReal.of(a), ExtReal.of(b)
    if a.infinite and b.infinite:
        return ZERO
    if a.infinite or b.infinite:
        return PLUS_INF
    return ExtReal(abs(a.value - b.value))


def relative_delta(a, b):
    """|a - b| / max(1, |a|), the quantity `agree` compares against its tolerance."""
    a, b = ExtReal.of(a), ExtReal.of(b)
    if a.infinite and b.infinite:
        return ZERO
    if a.infinite or b.infinite:
        return PLUS_INF
    return ExtReal(abs(a.value - b.value) / max(1.0, abs(a.value)))
