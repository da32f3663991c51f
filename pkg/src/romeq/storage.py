"""Persistence: matrix files, problem definitions, snapshot archives, model dirs.

Matrix payloads are raw little-endian IEEE-754 doubles in column-major order
(shape lives in the accompanying manifest); an ASCII MatrixMarket alternative
is provided for interchange.  Manifests are JSON and always record seeds, the
problem hash, the tool version, and the tolerances in effect.
"""

import hashlib
import json
from pathlib import Path

import numpy as np
import scipy.io

from ._version import __version__
from .affine import AffineFamily, ThetaMonomial
from .basis import PodBasis, SnapshotSet
from .opinf import ReducedModel
from .problems import CONTINUOUS_RICCATI, COUPLED_LYAPUNOV, ProblemDefinition, ThetaGroups
from .util import TOLERANCES


def save_matrix(path, M):
    """Raw column-major float64 payload."""
    np.asarray(M, dtype="<f8").ravel(order="F").tofile(path)


def load_matrix(path, shape):
    data = np.fromfile(path, dtype="<f8")
    expected = int(np.prod(shape))
    if data.size != expected:
        raise ValueError(f"{path}: expected {expected} doubles, found {data.size}")
    return data.reshape(shape, order="F")


def save_matrix_mtx(path, M):
    """ASCII MatrixMarket array format, for interchange."""
    scipy.io.mmwrite(str(path), np.atleast_2d(np.asarray(M, dtype=float)))


def load_matrix_mtx(path):
    return np.asarray(scipy.io.mmread(str(path)), dtype=float)


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def _family_to_list(family):
    return [{"coefficient": 1.0,
             "exponents": list(theta.exponents),
             "matrix": M.tolist()}
            for theta, M in family.terms]


def _family_from_list(items, d, base_dir=None):
    terms = []
    for item in items:
        matrix = item["matrix"]
        if isinstance(matrix, dict):
            ref = Path(matrix["file"])
            if base_dir is not None and not ref.is_absolute():
                ref = Path(base_dir) / ref
            if ref.suffix == ".mtx":
                M = load_matrix_mtx(ref)
            else:
                M = load_matrix(ref, tuple(matrix["shape"]))
        else:
            M = np.asarray(matrix, dtype=float)
        theta = ThetaMonomial(item.get("coefficient", 1.0),
                              tuple(item["exponents"]))
        terms.append((theta, M))
    return AffineFamily.from_terms(terms, d=d)


def problem_to_dict(problem):
    families = {
        "A": [_family_to_list(f) for f in problem.A_families],
        "M": [_family_to_list(f) for f in problem.M_families],
    }
    if problem.B_family is not None:
        families["B"] = _family_to_list(problem.B_family)
    if problem.coupling is not None:
        families["Pi"] = problem.coupling.tolist()
    return {
        "kind": problem.kind,
        "n": problem.n,
        "s": problem.s,
        "d": problem.d,
        "name": problem.name,
        "domain": [list(iv) for iv in problem.domain],
        "families": families,
    }


def _family_entries(raw):
    # a single family may be given flat (a list of term dicts) for s = 1
    if raw and isinstance(raw[0], dict):
        return [raw]
    return raw


def problem_from_dict(data, base_dir=None):
    d = int(data["d"])
    families = data["families"]
    A = tuple(_family_from_list(entry, d, base_dir)
              for entry in _family_entries(families["A"]))
    M = tuple(_family_from_list(entry, d, base_dir)
              for entry in _family_entries(families["M"]))
    B = None
    if data["kind"] == CONTINUOUS_RICCATI:
        B = _family_from_list(families["B"], d, base_dir)
    Pi = None
    if data["kind"] == COUPLED_LYAPUNOV:
        Pi = np.asarray(families["Pi"], dtype=float)
    return ProblemDefinition(
        kind=data["kind"], n=int(data["n"]), s=int(data["s"]), d=d,
        A_families=A, M_families=M, B_family=B, coupling=Pi,
        domain=tuple(tuple(iv) for iv in data["domain"]),
        name=data.get("name", ""))


def save_problem(path, problem):
    write_json(path, problem_to_dict(problem))


def load_problem(path):
    path = Path(path)
    return problem_from_dict(read_json(path), base_dir=path.parent)


def problem_hash(problem):
    canonical = json.dumps(problem_to_dict(problem), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def base_manifest(problem, seeds=None):
    return {
        "problem_hash": problem_hash(problem),
        "seeds": seeds or {},
        "tool_version": __version__,
        "tolerances": dict(TOLERANCES),
    }


def write_snapshots(out_dir, snapshots, problem, residual_norms=None,
                    seeds=None, wall_time_s=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_problem(out / "problem.json", problem)
    save_matrix(out / "states.f64", snapshots.states)
    manifest = base_manifest(problem, seeds)
    manifest.update({
        "type": "snapshots",
        "N": snapshots.states.shape[0],
        "k": snapshots.k,
        "parameters": snapshots.parameters.tolist(),
        "residual_norms": list(residual_norms) if residual_norms is not None else None,
        "wall_time_s": wall_time_s,
    })
    write_json(out / "manifest.json", manifest)
    return out


def read_snapshots(in_dir):
    in_dir = Path(in_dir)
    manifest = read_json(in_dir / "manifest.json")
    problem = load_problem(in_dir / "problem.json")
    states = load_matrix(in_dir / "states.f64", (manifest["N"], manifest["k"]))
    params = np.asarray(manifest["parameters"], dtype=float)
    snaps = SnapshotSet(states=states, parameters=params,
                        problem_ref=problem.name)
    return snaps, problem, manifest


def _groups_to_dict(groups):
    return {
        "C2": [list(m.exponents) for m in groups.theta_C2],
        "C1": [list(m.exponents) for m in groups.theta_C1],
        "C0": [list(m.exponents) for m in groups.theta_C0],
    }


def _groups_from_dict(data):
    return ThetaGroups(
        theta_C2=tuple(ThetaMonomial(1.0, tuple(e)) for e in data["C2"]),
        theta_C1=tuple(ThetaMonomial(1.0, tuple(e)) for e in data["C1"]),
        theta_C0=tuple(ThetaMonomial(1.0, tuple(e)) for e in data["C0"]),
    )


def write_model(out_dir, model, basis, problem, extra=None, seeds=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_problem(out / "problem.json", problem)
    save_matrix(out / "V.f64", basis.V)
    save_matrix(out / "singular_values.f64", basis.singular_values.reshape(-1, 1))
    for i, op in enumerate(model.C2_ops):
        save_matrix(out / f"C2_{i:02d}.f64", op)
    for i, op in enumerate(model.C1_ops):
        save_matrix(out / f"C1_{i:02d}.f64", op)
    for i, op in enumerate(model.C0_ops):
        save_matrix(out / f"C0_{i:02d}.f64", op.reshape(-1, 1))
    manifest = base_manifest(problem, seeds)
    manifest.update({
        "type": "model",
        "r": model.r,
        "lambda": list(model.lam),
        "method": model.method,
        "training_mse": model.training_mse,
        "basis_ref": model.basis_ref,
        "theta_groups": _groups_to_dict(model.theta_groups),
        "N": basis.V.shape[0],
        "basis": {
            "method": basis.method,
            "r": basis.r,
            "singular_values_count": int(basis.singular_values.size),
        },
        "singular_values": basis.singular_values.tolist(),
    })
    if extra:
        manifest.update(extra)
    write_json(out / "manifest.json", manifest)
    return out


def read_model(in_dir):
    in_dir = Path(in_dir)
    manifest = read_json(in_dir / "manifest.json")
    problem = load_problem(in_dir / "problem.json")
    groups = _groups_from_dict(manifest["theta_groups"])
    r = manifest["r"]
    N = manifest["N"]
    q = r * (r + 1) // 2
    V = load_matrix(in_dir / "V.f64", (N, r))
    sv = load_matrix(
        in_dir / "singular_values.f64",
        (manifest["basis"]["singular_values_count"], 1)).ravel()
    basis = PodBasis(V=V, singular_values=sv, method=manifest["basis"]["method"])
    C2 = tuple(load_matrix(in_dir / f"C2_{i:02d}.f64", (r, q))
               for i in range(len(groups.theta_C2)))
    C1 = tuple(load_matrix(in_dir / f"C1_{i:02d}.f64", (r, r))
               for i in range(len(groups.theta_C1)))
    C0 = tuple(load_matrix(in_dir / f"C0_{i:02d}.f64", (r, 1)).ravel()
               for i in range(len(groups.theta_C0)))
    model = ReducedModel(C2_ops=C2, C1_ops=C1, C0_ops=C0, theta_groups=groups,
                         r=r, lam=tuple(manifest["lambda"]),
                         basis_ref=manifest["basis_ref"],
                         method=manifest["method"],
                         training_mse=manifest["training_mse"])
    return model, basis, problem, manifest
