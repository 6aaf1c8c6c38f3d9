"""JSON/CSV interchange.

POVM files::

    {"dim": d, "effects": [[[re, im], ... d*d entries, row-major], ...]}
    {"dim": 2, "bloch": [[x, y, z], ...], "weights": [w_1, ...]}
    {"dim": d, "vectors": [[[re, im], ... d entries], ...]}   # projective design

Floats are written with Python's shortest round-trip repr, so ``save`` then
``load`` is bit-exact.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .designs import ProjectiveDesign, catalog_build, design_from_povm
from .errors import FormatError
from .linalg import PAULI
from .povm import Povm

UNIT_TOL = 1e-9


def _complex(entry, where: str) -> complex:
    if not isinstance(entry, (list, tuple)) or len(entry) != 2:
        raise FormatError("expected a [re, im] pair", where)
    re, im = entry
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
        raise FormatError("entries must be numbers", where)
    return complex(re, im)


def _pairs(z) -> list:
    return [[float(c.real), float(c.imag)] for c in np.ravel(z)]


def _dim(obj) -> int:
    d = obj.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError(f"'dim' must be a positive integer, got {d!r}", "dim")
    return d


def _list(obj, key) -> list:
    val = obj.get(key)
    if not isinstance(val, list) or not val:
        raise FormatError("expected a nonempty list", key)
    return val


def _parse_effects(obj, d: int) -> np.ndarray:
    effects = []
    for j, mat in enumerate(_list(obj, "effects")):
        where = f"effects[{j}]"
        if not isinstance(mat, list) or len(mat) != d * d:
            got = len(mat) if isinstance(mat, list) else type(mat).__name__
            raise FormatError(f"expected {d * d} entries for a {d}x{d} matrix, got {got}", where)
        effects.append([_complex(e, f"{where}[{i}]") for i, e in enumerate(mat)])
    E = np.array(effects, dtype=complex).reshape(-1, d, d)
    for j, A in enumerate(E):
        defect = np.max(np.abs(A - A.conj().T))
        if defect > 1e-10:
            raise FormatError(f"effect is not Hermitian (max |A - A^dag| = {defect:.3e})", f"effects[{j}]")
    return E


def _parse_bloch(obj, d: int) -> np.ndarray:
    if d != 2:
        raise FormatError("Bloch shorthand is only defined for dim 2", "dim")
    pts = _list(obj, "bloch")
    n = len(pts)
    weights = obj.get("weights", [2 / n] * n)
    if not isinstance(weights, list) or len(weights) != n:
        raise FormatError(f"expected {n} weights", "weights")
    effects = []
    for j, (b, w) in enumerate(zip(pts, weights)):
        where = f"bloch[{j}]"
        if not isinstance(b, list) or len(b) != 3 or not all(isinstance(x, (int, float)) for x in b):
            raise FormatError("expected three real coordinates", where)
        if abs(np.linalg.norm(b) - 1) > UNIT_TOL:
            raise FormatError(f"Bloch vector has norm {np.linalg.norm(b):.12g}, expected 1", where)
        if not isinstance(w, (int, float)):
            raise FormatError("weight must be a number", f"weights[{j}]")
        effects.append(w * (np.eye(2) + np.einsum("i,iab->ab", np.asarray(b, float), PAULI)) / 2)
    return np.array(effects)


def _parse_vectors(obj, d: int) -> np.ndarray:
    vecs = []
    for j, v in enumerate(_list(obj, "vectors")):
        where = f"vectors[{j}]"
        if not isinstance(v, list) or len(v) != d:
            raise FormatError(f"expected {d} entries", where)
        vecs.append([_complex(e, f"{where}[{i}]") for i, e in enumerate(v)])
    V = np.array(vecs, dtype=complex)
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms == 0):
        raise FormatError("zero vector", f"vectors[{int(np.argmin(norms))}]")
    return V


def parse(obj):
    """Decode a parsed JSON object into a :class:`Povm` or :class:`ProjectiveDesign`."""
    if not isinstance(obj, dict):
        raise FormatError("top level must be a JSON object")
    d = _dim(obj)
    label = str(obj.get("label", ""))
    kinds = [k for k in ("effects", "bloch", "vectors") if k in obj]
    if len(kinds) != 1:
        raise FormatError("exactly one of 'effects', 'bloch', 'vectors' is required")
    if kinds[0] == "vectors":
        return ProjectiveDesign(_parse_vectors(obj, d), label=label)
    E = _parse_effects(obj, d) if kinds[0] == "effects" else _parse_bloch(obj, d)
    return Povm(E, label=label)


def _read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(str(exc), str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc


def load(path):
    return parse(_read_json(path))


def load_povm(path) -> Povm:
    obj = load(path)
    return obj.povm() if isinstance(obj, ProjectiveDesign) else obj


def povm_to_json(povm: Povm) -> dict:
    out = {"dim": povm.dim, "effects": [_pairs(E) for E in povm.effects]}
    if povm.label:
        out["label"] = povm.label
    return out


def design_to_json(design: ProjectiveDesign) -> dict:
    out = {"dim": design.dim, "vectors": [_pairs(v) for v in design.vectors]}
    if design.label:
        out["label"] = design.label
    return out


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def save_povm(povm: Povm, path) -> None:
    Path(path).write_text(dumps(povm_to_json(povm)))


def save_design(design: ProjectiveDesign, path) -> None:
    Path(path).write_text(dumps(design_to_json(design)))


def resolve_source(source: str):
    """``catalog:NAME[:PARAM]`` or a file path; returns a Povm or ProjectiveDesign."""
    if source.startswith("catalog:"):
        name, _, param = source[len("catalog:") :].partition(":")
        params = [float(param)] if param else []
        return catalog_build(name, params)
    return load(source)


def as_povm(obj) -> Povm:
    return obj.povm() if isinstance(obj, ProjectiveDesign) else obj


def as_design(obj) -> ProjectiveDesign:
    return obj if isinstance(obj, ProjectiveDesign) else design_from_povm(obj)


def load_state(path) -> np.ndarray:
    """``{"dim": d, "state": [[re, im] x d*d]}`` or ``{"dim": d, "vector": [[re, im] x d]}``."""
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise FormatError("top level must be a JSON object")
    d = _dim(obj)
    if "vector" in obj:
        v = np.array([_complex(e, f"vector[{i}]") for i, e in enumerate(_list(obj, "vector"))])
        if v.size != d:
            raise FormatError(f"expected {d} entries", "vector")
        v = v / np.linalg.norm(v)
        return np.outer(v, v.conj())
    entries = _list(obj, "state")
    if len(entries) != d * d:
        raise FormatError(f"expected {d * d} entries", "state")
    rho = np.array([_complex(e, f"state[{i}]") for i, e in enumerate(entries)]).reshape(d, d)
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise FormatError("state is not Hermitian", "state")
    return rho


def load_vectors(path) -> np.ndarray:
    """Probability vectors: a JSON list, a list of lists, or ``{"p": ...}``."""
    obj = _read_json(path)
    if isinstance(obj, dict):
        obj = obj.get("p")
    arr = np.asarray(obj, dtype=float) if isinstance(obj, list) else None
    if arr is None or arr.ndim not in (1, 2) or arr.size == 0:
        raise FormatError("expected a list of numbers or a list of such lists", "p")
    return np.atleast_2d(arr)


def to_csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def polytope_csv(vertices) -> str:
    V = np.atleast_2d(vertices)
    return to_csv(V, [f"p{j + 1}" for j in range(V.shape[1])])


def joint_csv(matrix, ground_labels=None) -> str:
    """One row per sky outcome, one column per ground outcome."""
    M = np.atleast_2d(matrix)
    labels = ground_labels or [f"k{k + 1}" for k in range(M.shape[1])]
    return to_csv(M, list(labels))

