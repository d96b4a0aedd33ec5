import numpy as np

from src.quantum.algebra import AlgebraSpec, Element, validate_state

KET0 = [[1.0, 0.0], [0.0, 0.0]]
PLUS = [[0.5, 0.5], [0.5, 0.5]]

QUBIT = AlgebraSpec.from_pairs([(2, 1.0)])
WEIGHTED = AlgebraSpec.from_pairs([(2, 0.7), (3, 1.9), (1, 1.3)])


def make_state(spec, *blocks, renormalize=False):
    return validate_state(spec, Element(tuple(np.asarray(b, dtype=complex) for b in blocks)), renormalize)


def random_unitary(rng, n):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_element(rng, spec, hermitian=False):
    blocks = []
    for d in spec.dims:
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        blocks.append((z + z.conj().T) / 2 if hermitian else z)
    return Element(tuple(blocks))


def random_unitary_element(rng, spec):
    return Element(tuple(random_unitary(rng, d) for d in spec.dims))
