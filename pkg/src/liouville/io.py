"""Model documents (JSON) and trajectory tables (CSV or JSON).

A model document looks like::

    {
      "dim": 2,
      "hamiltonian": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
      "jumps": [{"rate": 1.5, "operator": [[0, 0], [1, 0]]}],
      "initial_state": [[1, 0], [0, 0]],
      "times": {"start": 0, "stop": 5, "count": 11, "spacing": "linear"},
      "options": {"tolerances": {"cluster": 1e-8},
                  "outputs": {"populations": true, "coherences": true,
                              "purity": true,
                              "expectations": {"sz": [[1, 0], [0, -1]]}}}
    }

Matrix entries are either real numbers or ``[re, im]`` pairs; matrices are
row-major nested lists.  An optional ``"perturbation"`` object with its own
``hamiltonian`` and ``jumps`` supplies ``L'`` for the Dyson route.
"""
import csv
import io as _io
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .core import DensityMatrix, hermiticity_defect, TOL_HERMITIAN
from .errors import InvalidDensityMatrix, NonHermitianHamiltonian, SchemaError, ShapeMismatch
from .generators import LindbladModel, Liouvillian, dissipator, lindblad_liouvillian, unitary_liouvillian

TOLERANCE_KEYS = ("cluster", "diag", "zero", "stab", "kraus", "hermitian")
OUTPUT_KEYS = ("populations", "coherences", "purity", "expectations")


@dataclass(frozen=True, eq=False)
class ModelSpec:
    dim: int
    hamiltonian: np.ndarray
    jumps: tuple
    initial_state: DensityMatrix
    times: np.ndarray
    tolerances: dict = field(default_factory=dict)
    populations: bool = True
    coherences: bool = True
    purity: bool = True
    observables: tuple = ()
    perturbation: Optional[Tuple[np.ndarray, tuple]] = None

    def model(self):
        return LindbladModel(self.hamiltonian, self.jumps,
                             tol_hermitian=self.tolerances.get("hermitian", TOL_HERMITIAN))

    def liouvillian(self):
        return lindblad_liouvillian(self.model())

    def perturbation_liouvillian(self):
        if self.perturbation is None:
            return None
        h, jumps = self.perturbation
        op = unitary_liouvillian(h).op + dissipator(jumps, self.dim)
        return Liouvillian(op, "combined")


def _number(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(x).__name__}")
    v = float(x)
    if not np.isfinite(v):
        raise SchemaError(path, "must be finite")
    return v


def _complex(x, path):
    if isinstance(x, list):
        if len(x) != 2:
            raise SchemaError(path, "complex entries are [re, im] pairs")
        return complex(_number(x[0], path + "[0]"), _number(x[1], path + "[1]"))
    return complex(_number(x, path), 0.0)


def _matrix(x, path, dim):
    if not isinstance(x, list) or not all(isinstance(r, list) for r in x):
        raise SchemaError(path, "expected a nested list (row-major matrix)")
    rows = len(x)
    cols = {len(r) for r in x}
    if rows != dim or cols != {dim}:
        shape = f"{rows}x{cols.pop()}" if len(cols) == 1 else f"{rows} ragged rows"
        raise ShapeMismatch(f"expected {dim}x{dim}, got {shape}", path=path)
    return np.array([[_complex(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)]
                     for i, r in enumerate(x)], dtype=complex)


def _get(doc, key, path, required=True, default=None):
    if key not in doc:
        if required:
            raise SchemaError(path + key, "missing required field")
        return default
    return doc[key]


def _jumps(raw, path, dim):
    if not isinstance(raw, list):
        raise SchemaError(path, "expected a list")
    out = []
    for k, item in enumerate(raw):
        p = f"{path}[{k}]"
        if not isinstance(item, dict):
            raise SchemaError(p, "expected an object with rate and operator")
        rate = _number(_get(item, "rate", p + "."), p + ".rate")
        if rate < 0:
            raise SchemaError(p + ".rate", f"rate must be nonnegative, got {rate}")
        op = _matrix(_get(item, "operator", p + "."), p + ".operator", dim)
        out.append((rate, op))
    return tuple(out)


def _hamiltonian(raw, path, dim, tol):
    h = _matrix(raw, path, dim)
    defect = hermiticity_defect(h)
    if defect > tol:
        raise NonHermitianHamiltonian(f"{path}: not Hermitian (defect {defect:.3e})")
    return h


def _times(raw):
    if isinstance(raw, list):
        if not raw:
            raise SchemaError("times", "empty time list")
        t = np.array([_number(v, f"times[{i}]") for i, v in enumerate(raw)])
    elif isinstance(raw, dict):
        start = _number(_get(raw, "start", "times."), "times.start")
        stop = _number(_get(raw, "stop", "times."), "times.stop")
        count = _get(raw, "count", "times.")
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise SchemaError("times.count", "must be a positive integer")
        spacing = raw.get("spacing", "linear")
        if spacing == "linear":
            t = np.linspace(start, stop, count)
        elif spacing == "log":
            if start <= 0:
                raise SchemaError("times.start", "log spacing needs start > 0")
            t = np.geomspace(start, stop, count)
        else:
            raise SchemaError("times.spacing", f"expected 'linear' or 'log', got {spacing!r}")
        if count > 1 and stop <= start:
            raise SchemaError("times.stop", "must exceed start")
    else:
        raise SchemaError("times", "expected a list or a {start, stop, count, spacing} object")
    if np.any(t < 0):
        raise SchemaError("times", "times must be nonnegative")
    bad = np.flatnonzero(np.diff(t) <= 0)
    if bad.size:
        raise SchemaError(f"times[{bad[0] + 1}]", "times must be strictly increasing")
    return t


def parse_model(text):
    """Parse and validate a JSON model document into a :class:`ModelSpec`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be a JSON object")
    known = {"dim", "hamiltonian", "jumps", "initial_state", "times", "options",
             "perturbation", "description"}
    for key in doc:
        if key not in known:
            raise SchemaError(key, "unknown field")
    dim = _get(doc, "dim", "")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError("dim", "must be a positive integer")

    options = _get(doc, "options", "", required=False, default={})
    if not isinstance(options, dict):
        raise SchemaError("options", "expected an object")
    tolerances = {}
    raw_tol = options.get("tolerances", {})
    if not isinstance(raw_tol, dict):
        raise SchemaError("options.tolerances", "expected an object")
    for key, val in raw_tol.items():
        if key not in TOLERANCE_KEYS:
            raise SchemaError(f"options.tolerances.{key}", "unknown tolerance")
        v = _number(val, f"options.tolerances.{key}")
        if v <= 0:
            raise SchemaError(f"options.tolerances.{key}", "must be positive")
        tolerances[key] = v
    tol_h = tolerances.get("hermitian", TOL_HERMITIAN)

    h = _hamiltonian(_get(doc, "hamiltonian", ""), "hamiltonian", dim, tol_h)
    jumps = _jumps(_get(doc, "jumps", "", required=False, default=[]), "jumps", dim)
    rho = _matrix(_get(doc, "initial_state", ""), "initial_state", dim)
    try:
        rho0 = DensityMatrix(rho)
    except InvalidDensityMatrix as exc:
        raise InvalidDensityMatrix(f"initial_state: {exc}") from None
    times = _times(_get(doc, "times", ""))

    outputs = options.get("outputs", {})
    if not isinstance(outputs, dict):
        raise SchemaError("options.outputs", "expected an object")
    flags = {}
    for key in ("populations", "coherences", "purity"):
        val = outputs.get(key, True)
        if not isinstance(val, bool):
            raise SchemaError(f"options.outputs.{key}", "expected true or false")
        flags[key] = val
    for key in outputs:
        if key not in OUTPUT_KEYS:
            raise SchemaError(f"options.outputs.{key}", "unknown output")
    raw_obs = outputs.get("expectations", {})
    if not isinstance(raw_obs, dict):
        raise SchemaError("options.outputs.expectations", "expected a {name: matrix} object")
    observables = tuple(
        (name, _matrix(m, f"options.outputs.expectations.{name}", dim))
        for name, m in sorted(raw_obs.items())
    )

    pert = None
    raw_pert = doc.get("perturbation")
    if raw_pert is not None:
        if not isinstance(raw_pert, dict):
            raise SchemaError("perturbation", "expected an object")
        ph = raw_pert.get("hamiltonian")
        ph = (np.zeros((dim, dim), dtype=complex) if ph is None
              else _hamiltonian(ph, "perturbation.hamiltonian", dim, tol_h))
        pj = _jumps(raw_pert.get("jumps", []), "perturbation.jumps", dim)
        pert = (ph, pj)

    return ModelSpec(dim=dim, hamiltonian=h, jumps=jumps, initial_state=rho0, times=times,
                     tolerances=tolerances, observables=observables, perturbation=pert, **flags)


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m):
    return [[complex_to_json(v) for v in row] for row in np.asarray(m)]


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryRecord:
    """A rectangular table: stable column names and one row per time."""

    columns: tuple
    rows: tuple

    def column(self, name):
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows])


def trajectory_columns(dim, populations=True, coherences=True, purity=True, observables=()):
    cols = ["t"]
    for i in range(dim):
        for j in range(dim):
            if (i == j and populations) or (i != j and coherences):
                cols += [f"rho_{i}_{j}_re", f"rho_{i}_{j}_im"]
    cols.append("trace")
    if purity:
        cols.append("purity")
    for name in observables:
        cols += [f"exp_{name}_re", f"exp_{name}_im"]
    return tuple(cols)


def record_from_trajectory(traj, populations=True, coherences=True, purity=True, observables=()):
    """Tabulate a :class:`~liouville.spectral.Trajectory`.

    ``observables`` is a sequence of ``(name, matrix)`` pairs.
    """
    states = [np.asarray(r) for r in traj.states]
    dim = states[0].shape[0]
    cols = trajectory_columns(dim, populations, coherences, purity, [n for n, _ in observables])
    rows = []
    for t, r in zip(traj.times, states):
        row = [float(t)]
        for i in range(dim):
            for j in range(dim):
                if (i == j and populations) or (i != j and coherences):
                    row += [float(r[i, j].real), float(r[i, j].imag)]
        row.append(float(np.trace(r).real))
        if purity:
            row.append(float(np.trace(r @ r).real))
        for _, b in observables:
            e = complex(np.trace(np.asarray(b) @ r))
            row += [e.real, e.imag]
        rows.append(tuple(row))
    return TrajectoryRecord(cols, tuple(rows))


def write_trajectory(rec, fmt="csv"):
    """Serialize with round-trip float precision (``repr``); deterministic."""
    if fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(rec.columns)
        for row in rec.rows:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()
    if fmt == "json":
        data = [dict(zip(rec.columns, map(float, row))) for row in rec.rows]
        return json.dumps(data, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def read_trajectory(text, fmt="csv"):
    if fmt == "csv":
        reader = csv.reader(_io.StringIO(text))
        rows = list(reader)
        if not rows:
            raise SchemaError("$", "empty table")
        return TrajectoryRecord(tuple(rows[0]), tuple(tuple(float(v) for v in r) for r in rows[1:]))
    if fmt == "json":
        data = json.loads(text)
        if not data:
            return TrajectoryRecord((), ())
        cols = tuple(data[0].keys())
        return TrajectoryRecord(cols, tuple(tuple(float(d[c]) for c in cols) for d in data))
    raise ValueError(f"unknown format {fmt!r}")


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file and ``os.replace``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
