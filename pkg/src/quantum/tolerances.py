from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every module.

    Relative thresholds are scaled by the largest magnitude of the block they
    are applied to; `supp_floor` is the absolute guard for all-zero blocks.
    """

    herm: float = 1e-10       # Hermiticity, relative to max |entry|
    psd: float = 1e-10        # negative eigenvalues tolerated, relative to lambda_max
    norm: float = 1e-9        # |tau(h) - 1|
    fc: float = 1e-10         # functional-calculus / unitarity checks
    faith: float = 1e-12      # inner(a, a) > faith for nonzero a
    supp: float = 1e-12       # support cut, relative to lambda_max
    supp_floor: float = 1e-300
    modular: float = 1e-2     # kernel cut of Delta, relative to its smallest admissible eigenvalue
    defect: float = 1e-12     # boundary masses at or below this are zero
    agreement: float = 1e-8   # relative agreement of the two routes

    def as_dict(self):
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
