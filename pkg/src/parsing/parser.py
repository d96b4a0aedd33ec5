import json
import math
from collections import Counter

from src.quantum.algebra import AlgebraSpec, Block, Element, validate_state
from src.quantum.errors import ProblemParseError
from src.quantum.extreal import ExtReal
from src.quantum.tolerances import DEFAULT_TOLERANCES

TOP_LEVEL_FIELDS = {"algebra", "phi", "omega", "options"}
REQUIRED_FIELDS = ("algebra", "phi", "omega")


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


class _JsonObject(dict):
    """A decoded JSON object that remembers keys it saw more than once."""

    duplicates = ()


def _collect_pairs(pairs):
    obj = _JsonObject(pairs)
    if len(obj) != len(pairs):
        counts = Counter(k for k, _ in pairs)
        obj.duplicates = tuple(sorted(k for k, n in counts.items() if n > 1))
    return obj


def _expect_keys(obj, path, allowed, required=()):
    if not isinstance(obj, dict):
        raise ProblemParseError(path, "expected an object")
    if getattr(obj, "duplicates", ()):
        raise ProblemParseError(path, f"duplicate field(s): {', '.join(obj.duplicates)}")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ProblemParseError(path, f"unknown field(s): {', '.join(unknown)}")
    for key in required:
        if key not in obj:
            raise ProblemParseError(path, f"missing field {key!r}")


def _parse_algebra(obj):
    _expect_keys(obj, "algebra", {"blocks"}, ("blocks",))
    blocks = obj["blocks"]
    if not isinstance(blocks, list) or not blocks:
        raise ProblemParseError("algebra.blocks", "expected a non-empty array")
    parsed = []
    for k, b in enumerate(blocks):
        path = f"algebra.blocks[{k}]"
        _expect_keys(b, path, {"dim", "weight"}, ("dim", "weight"))
        dim, weight = b["dim"], b["weight"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise ProblemParseError(f"{path}.dim", f"expected a positive integer, got {dim!r}")
        if not _is_number(weight) or weight <= 0:
            raise ProblemParseError(f"{path}.weight", f"expected a positive finite number, got {weight!r}")
        parsed.append(Block(dim, float(weight)))
    return AlgebraSpec(tuple(parsed))


def _parse_matrix(rows, dim, path):
    if not isinstance(rows, list) or len(rows) != dim:
        raise ProblemParseError(path, f"expected {dim} rows")
    matrix = []
    for r, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ProblemParseError(f"{path}[{r}]", f"expected {dim} entries")
        parsed_row = []
        for c, entry in enumerate(row):
            if not (isinstance(entry, list) and len(entry) == 2 and all(_is_number(x) for x in entry)):
                raise ProblemParseError(f"{path}[{r}][{c}]", "expected a [re, im] pair of finite numbers")
            parsed_row.append(complex(entry[0], entry[1]))
        matrix.append(parsed_row)
    return matrix


def _parse_density(obj, spec, name):
    if not isinstance(obj, list) or len(obj) != len(spec.blocks):
        raise ProblemParseError(name, f"expected an array of {len(spec.blocks)} blocks")
    return Element(tuple(_parse_matrix(b, dim, f"{name}[{k}]") for k, (b, dim) in enumerate(zip(obj, spec.dims))))


def parse_problem(data, *, tol=DEFAULT_TOLERANCES):
    """
    Parses a problem file into (AlgebraSpec, phi, omega).

    Args:
        data: bytes or str holding the JSON document.

    Returns:
        tuple: the algebra and the two validated States.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ProblemParseError("$", f"not UTF-8 text: {e}") from e
    try:
        doc = json.loads(data, object_pairs_hook=_collect_pairs)
    except json.JSONDecodeError as e:
        raise ProblemParseError("$", f"invalid JSON: {e}") from e

    _expect_keys(doc, "$", TOP_LEVEL_FIELDS, REQUIRED_FIELDS)
    options = doc.get("options", {})
    _expect_keys(options, "options", {"renormalize"})
    renormalize = options.get("renormalize", False)
    if not isinstance(renormalize, bool):
        raise ProblemParseError("options.renormalize", "expected true or false")

    spec = _parse_algebra(doc["algebra"])
    phi = validate_state(spec, _parse_density(doc["phi"], spec, "phi"), renormalize, name="phi", tol=tol)
    omega = validate_state(spec, _parse_density(doc["omega"], spec, "omega"), renormalize, name="omega", tol=tol)
    return spec, phi, omega


def load_problem(path, *, tol=DEFAULT_TOLERANCES):
    with open(path, "rb") as fh:
        return parse_problem(fh.read(), tol=tol)


def problem_document(spec, phi_blocks, omega_blocks, renormalize=False):
    """Inverse of parse_problem for building problem files programmatically."""

    def encode(blocks):
        return [[[[float(z.real), float(z.imag)] for z in row] for row in b] for b in blocks]

    return {
        "algebra": {"blocks": [{"dim": d, "weight": w} for d, w in spec.blocks]},
        "phi": encode(phi_blocks),
        "omega": encode(omega_blocks),
        "options": {"renormalize": renormalize},
    }


def dump_report(report):
    """Deterministic JSON text of a report dict."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def load_report(text):
    return json.loads(text)


def report_values(report):
    """{(divergence, route): ExtReal} for every route value in a compute report."""
    values = {}
    for entry in report.get("results", []):
        for route, terms in entry["routes"].items():
            values[(entry["divergence"], route)] = ExtReal.parse(terms["value"])
    return values
