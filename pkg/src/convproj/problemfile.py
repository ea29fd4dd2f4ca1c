"""JSON problem files.

Schema (version 1)::

    {
      "schema_version": 1,
      "kind": "cp" | "cvop",
      "dims": {"n": int, "m": int},
      "constraints": [{"A": [[...]], "b": [...], "c0": float}, ...],
      "equalities": {"E": [[...]], "f": [...]},          # optional
      "objective": [{"A": ..., "b": ..., "c0": ...}],     # cvop only
      "cone": [[...], ...],                               # cvop only, rows W of {W z >= 0}
      "direction": [...],                                 # cvop only
      "options": {"p": 2 | "inf", "epsilon": float}       # optional
    }

For ``cp`` files the constraints act on ``z = (x, y)`` with ``x`` first;
for ``cvop`` files they act on ``x`` alone.  Matrices are dense row-major.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import ConeHRep, ConvexSetSpec, ConvprojError, QuadraticConstraint, format_p, parse_p

SCHEMA_VERSION = 1


class ProblemFileError(ConvprojError):
    pass


@dataclass
class ProblemFile:
    kind: str
    spec: object  # ConvexSetSpec or CvopSpec
    options: dict = field(default_factory=dict)

    @property
    def p(self) -> float:
        return parse_p(self.options.get("p", 2))

    @property
    def epsilon(self):
        return self.options.get("epsilon")


def _line_of(text: str, key: str) -> int:
    """1-based line of the first occurrence of a JSON key (0 if absent)."""
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return 0


def _quad(d: dict, dim: int, where: str) -> QuadraticConstraint:
    try:
        b = np.asarray(d["b"], dtype=float)
        A = np.asarray(d.get("A", np.zeros((dim, dim))), dtype=float)
        return QuadraticConstraint(A, b, float(d.get("c0", 0.0)))
    except (KeyError, ValueError, TypeError) as exc:
        raise ProblemFileError(f"{where}: {exc}") from exc


def loads(text: str, source: str = "<string>") -> ProblemFile:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from exc

    def err(key, msg):
        return ProblemFileError(f"{source}:{_line_of(text, key)}: {msg}")

    if d.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise err("schema_version", f"unsupported schema version {d.get('schema_version')}")
    kind = d.get("kind")
    if kind not in ("cp", "cvop"):
        raise err("kind", f"kind must be 'cp' or 'cvop', got {kind!r}")
    try:
        n = int(d["dims"]["n"])
        m = int(d["dims"]["m"])
    except (KeyError, TypeError, ValueError):
        raise err("dims", "dims must contain integers n and m") from None
    dim = n + m if kind == "cp" else n
    cons = []
    for i, c in enumerate(d.get("constraints", [])):
        try:
            cons.append(_quad(c, dim, f"constraints[{i}]"))
        except ConvprojError as exc:
            raise err("constraints", str(exc)) from exc
    E = f = None
    if d.get("equalities"):
        E = np.asarray(d["equalities"]["E"], dtype=float)
        f = np.asarray(d["equalities"]["f"], dtype=float)
    options = dict(d.get("options", {}))
    try:
        if kind == "cp":
            spec = ConvexSetSpec(n, m, tuple(cons), E, f)
        else:
            from .reductions import CvopSpec

            X = ConvexSetSpec(n, 0, tuple(cons), E, f)
            gamma = tuple(_quad(g, n, f"objective[{j}]") for j, g in enumerate(d["objective"]))
            C = ConeHRep(np.asarray(d["cone"], dtype=float))
            c = np.asarray(d.get("direction") or C.interior_direction(parse_p(options.get("p", 2))), dtype=float)
            spec = CvopSpec(X, gamma, C, c)
            if spec.m != m:
                raise err("dims", f"dims.m = {m} but {spec.m} objectives given")
    except ProblemFileError:
        raise
    except (ValueError, TypeError, KeyError, ConvprojError) as exc:
        key = "objective" if kind == "cvop" and "objective" not in d else "constraints"
        raise err(key, str(exc)) from exc
    return ProblemFile(kind, spec, options)


def load(path) -> ProblemFile:
    with open(path) as fh:
        return loads(fh.read(), str(path))


def cp_to_dict(spec: ConvexSetSpec, options=None) -> dict:
    d = {"schema_version": SCHEMA_VERSION, "kind": "cp", "dims": {"n": spec.n, "m": spec.m},
         "constraints": [c.to_dict() for c in spec.constraints]}
    if spec.eq_matrix is not None:
        d["equalities"] = {"E": spec.eq_matrix.tolist(), "f": spec.eq_rhs.tolist()}
    if options:
        d["options"] = _clean_options(options)
    return d


def cvop_to_dict(cvop, options=None) -> dict:
    X = cvop.X
    d = {"schema_version": SCHEMA_VERSION, "kind": "cvop", "dims": {"n": cvop.n, "m": cvop.m},
         "constraints": [c.to_dict() for c in X.constraints],
         "objective": [g.to_dict() for g in cvop.Gamma],
         "cone": cvop.C.W.tolist(), "direction": cvop.c_dir.tolist()}
    if X.eq_matrix is not None:
        d["equalities"] = {"E": X.eq_matrix.tolist(), "f": X.eq_rhs.tolist()}
    if options:
        d["options"] = _clean_options(options)
    return d


def _clean_options(options: dict) -> dict:
    out = dict(options)
    if "p" in out:
        out["p"] = format_p(parse_p(out["p"]))
    return out


def dump(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
