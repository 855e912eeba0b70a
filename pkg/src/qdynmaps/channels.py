"""Superoperators: transfer/Choi/Kraus representations and positivity audits.

Vectorization is column-stacking, so the transfer matrix of rho -> A rho B^dag
is conj(B) (x) A. The Choi matrix uses the unnormalized convention
C = sum_ij E_ij (x) T(E_ij), so tr C = dim_in for trace-preserving maps and
Kraus weights read directly off Choi eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore, states
from .config import psd_threshold, tolerance
from .matcore import dag, kron

__all__ = [
    "vec",
    "unvec",
    "Superoperator",
    "KrausSet",
    "PositivityReport",
    "transfer_from_kraus",
    "choi_of",
    "transfer_from_choi",
    "kraus_from_choi",
    "is_cp",
    "is_positive_map",
    "is_n_positive",
    "extend_with_identity",
    "adjoint_map",
    "lueders",
    "nonselective",
    "selective_apply",
    "random_cptp",
    "identity_superoperator",
    "transpose_superoperator",
    "flip_superoperator",
    "superoperator_to_json",
    "superoperator_from_json",
]


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=complex).reshape(rows, cols, order="F")


@dataclass(frozen=True)
class Superoperator:
    """Linear map on matrix space, held as a transfer matrix on vectorized
    matrices. Shape is dim_out^2 x dim_in^2."""

    dim_in: int
    dim_out: int
    transfer: np.ndarray

    def __post_init__(self):
        expected = (self.dim_out**2, self.dim_in**2)
        if self.transfer.shape != expected:
            raise ValueError(
                f"transfer shape {self.transfer.shape} does not match dims "
                f"(expected {expected})"
            )

    def apply(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"input shape {m.shape}, expected {(self.dim_in,) * 2}")
        return unvec(self.transfer @ vec(m), self.dim_out)

    def apply_batch(self, ms: np.ndarray) -> np.ndarray:
        """Apply to a stacked (N, d, d) array of inputs."""
        n = ms.shape[0]
        vecs = ms.transpose(0, 2, 1).reshape(n, -1)  # row-major of m.T == column-stack
        outs = vecs @ self.transfer.T
        return outs.reshape(n, self.dim_out, self.dim_out).transpose(0, 2, 1)

    def is_trace_preserving(self, tol: float = 1e-9) -> bool:
        # tr(T(E_ij)) = delta_ij  <=>  vec(I)^T acting on transfer gives vec(I)^T
        id_out = vec(np.eye(self.dim_out)).conj()
        row = id_out @ self.transfer
        return matcore.mat_close(
            row.reshape(self.dim_in, self.dim_in, order="F"),
            np.eye(self.dim_in),
            tol,
        )

    def is_unital(self, tol: float = 1e-9) -> bool:
        return matcore.mat_close(
            self.apply(np.eye(self.dim_in)), np.eye(self.dim_out), tol
        )


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators with a declared completeness class.

    ``trace-preserving``: sum W^dag W = I; ``selective``: sum W^dag W <= I.
    The declared class is verified at construction.
    """

    ops: tuple
    completeness: str = "trace-preserving"

    def __post_init__(self):
        if not self.ops:
            raise ValueError("KrausSet needs at least one operator")
        shapes = {op.shape for op in self.ops}
        if len(shapes) != 1:
            raise ValueError(f"inconsistent Kraus operator shapes: {shapes}")
        s = self.gram()
        d = s.shape[0]
        tol = tolerance()
        if self.completeness == "trace-preserving":
            if not matcore.mat_close(s, np.eye(d), 1e3 * tol):
                raise ValueError("sum W^dag W != I for a trace-preserving KrausSet")
        elif self.completeness == "selective":
            if matcore.min_eig(np.eye(d) - s) < psd_threshold(1.0):
                raise ValueError("sum W^dag W exceeds I for a selective KrausSet")
        else:
            raise ValueError(f"unknown completeness class {self.completeness!r}")

    @property
    def dim_in(self) -> int:
        return self.ops[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.ops[0].shape[0]

    def gram(self) -> np.ndarray:
        return sum(dag(w) @ w for w in self.ops)


@dataclass(frozen=True)
class PositivityReport:
    """Outcome of a CP or positivity audit.

    ``is_positive`` is a search verdict ("certified-violation" or
    "no-violation-found"), never a proof of positivity; ``witness`` is a
    state whose image has a negative eigenvalue when a violation is
    certified.
    """

    min_choi_eigenvalue: float | None = None
    is_cp: bool | None = None
    is_positive: str | None = None
    witness: np.ndarray | None = field(default=None, repr=False)
    witness_min_eigenvalue: float | None = None
    samples_used: int = 0


def transfer_from_kraus(k: KrausSet | list | tuple) -> Superoperator:
    """Superoperator of rho -> sum W rho W^dag."""
    ops = k.ops if isinstance(k, KrausSet) else tuple(np.asarray(w, dtype=complex) for w in k)
    d_out, d_in = ops[0].shape
    t = sum(kron(w.conj(), w) for w in ops)
    return Superoperator(dim_in=d_in, dim_out=d_out, transfer=t)


def _unit(i: int, j: int, d: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def choi_of(t: Superoperator) -> np.ndarray:
    """Choi matrix C = sum_ij E_ij (x) T(E_ij) (unnormalized)."""
    d_in, d_out = t.dim_in, t.dim_out
    c = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            block = unvec(t.transfer[:, j * d_in + i], d_out)
            c += kron(_unit(i, j, d_in), block)
    return c


def transfer_from_choi(c: np.ndarray, dim_in: int, dim_out: int) -> Superoperator:
    """Inverse of choi_of."""
    c = np.asarray(c, dtype=complex)
    n = dim_in * dim_out
    if c.shape != (n, n):
        raise ValueError(f"Choi shape {c.shape} does not match dims ({dim_in},{dim_out})")
    t = np.zeros((dim_out**2, dim_in**2), dtype=complex)
    blocks = c.reshape(dim_in, dim_out, dim_in, dim_out)
    for i in range(dim_in):
        for j in range(dim_in):
            t[:, j * dim_in + i] = vec(blocks[i, :, j, :])
    return Superoperator(dim_in=dim_in, dim_out=dim_out, transfer=t)


def kraus_from_choi(c: np.ndarray, dim_in: int, dim_out: int,
                    completeness: str = "trace-preserving") -> KrausSet:
    """Kraus operators from a PSD Choi matrix.

    Ordered by descending Choi eigenvalue; eigenvalues below tolerance are
    truncated. Raises if the Choi matrix has a genuinely negative eigenvalue
    (the map is NCP and admits no Kraus form).
    """
    c = np.asarray(c, dtype=complex)
    eig = matcore.herm_eig(c)
    scale = max(1.0, float(np.abs(c).max()))
    tol = tolerance()
    if eig.eigenvalues[0] < psd_threshold(scale):
        raise ValueError(
            f"Choi matrix is not PSD (min eigenvalue {eig.eigenvalues[0]:.6g}); "
            "the map is NCP and has no Kraus representation"
        )
    ops = []
    for lam, v in sorted(
        zip(eig.eigenvalues, eig.eigenvectors.T), key=lambda p: -p[0]
    ):
        if lam <= tol * scale:
            break
        # C = sum_a w_a w_a^dag with w[(i,k)] = W[k,i]: unstack accordingly
        w = np.sqrt(lam) * np.asarray(v).reshape(dim_in, dim_out).T
        ops.append(w)
    return KrausSet(ops=tuple(ops), completeness=completeness)


def is_cp(t: Superoperator) -> PositivityReport:
    """Complete-positivity verdict from the Choi spectrum."""
    c = choi_of(t)
    herm_res = matcore.hermiticity_residual(c)
    scale = max(1.0, float(np.abs(c).max()))
    if herm_res > tolerance() * scale:
        # not Hermiticity-preserving; certainly not CP
        sym_min = matcore.min_eig(c)
        return PositivityReport(min_choi_eigenvalue=sym_min, is_cp=False)
    lmin = matcore.min_eig(c)
    return PositivityReport(
        min_choi_eigenvalue=lmin,
        is_cp=bool(lmin >= psd_threshold(scale)),
    )


# -- pure-state violation search ---------------------------------------------


def fibonacci_bloch(n: int) -> np.ndarray:
    """Deterministic Fibonacci lattice of n points on the Bloch sphere."""
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    s = np.sqrt(1.0 - z * z)
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)


def _pure_batch_from_vectors(vs: np.ndarray) -> np.ndarray:
    """(N, d) unit vectors -> (N, d, d) projectors."""
    return np.einsum("ni,nj->nij", vs, vs.conj())


def _bloch_to_vectors(rs: np.ndarray) -> np.ndarray:
    """Unit Bloch vectors -> qubit state vectors (N, 2)."""
    theta = np.arccos(np.clip(rs[:, 2], -1.0, 1.0))
    phi = np.arctan2(rs[:, 1], rs[:, 0])
    return np.stack(
        [np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)], axis=1
    )


def minimize_output_min_eig(
    apply_batch,
    dim: int,
    budget: int = 2000,
    descent_steps: int = 50,
    seed: int = 0,
    extra_candidates: np.ndarray | None = None,
) -> tuple[float, np.ndarray, int]:
    """Minimize lmin(map(|psi><psi|)) over pure states.

    Qubits get a deterministic Fibonacci lattice; higher dimensions get
    seeded uniform random pure states. A 50-step shrinking local descent
    polishes the best grid point. Returns (best lmin, best input state
    vector, samples used).
    """
    rng = np.random.default_rng(seed)
    if dim == 2:
        vs = _bloch_to_vectors(fibonacci_bloch(budget))
    else:
        g = rng.standard_normal((budget, dim)) + 1j * rng.standard_normal((budget, dim))
        vs = g / np.linalg.norm(g, axis=1, keepdims=True)
    if extra_candidates is not None:
        vs = np.concatenate([extra_candidates, vs], axis=0)

    samples = vs.shape[0]
    vals = matcore.min_eig_batch(apply_batch(_pure_batch_from_vectors(vs)))
    best = int(np.argmin(vals))
    best_val = float(vals[best])
    best_vec = vs[best]

    sigma = 0.5
    proposals = 32
    for _ in range(descent_steps):
        g = rng.standard_normal((proposals, dim)) + 1j * rng.standard_normal(
            (proposals, dim)
        )
        cand = best_vec[None, :] + sigma * g
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        cv = matcore.min_eig_batch(apply_batch(_pure_batch_from_vectors(cand)))
        samples += proposals
        k = int(np.argmin(cv))
        if cv[k] < best_val:
            best_val = float(cv[k])
            best_vec = cand[k]
        sigma *= 0.78
    return best_val, best_vec, samples


def is_positive_map(t: Superoperator, budget: int = 2000, seed: int = 0) -> PositivityReport:
    """Search pure inputs for an output with a negative eigenvalue.

    "certified-violation" carries a witness whose image genuinely fails PSD;
    "no-violation-found" only reports search exhaustion, not a proof.
    """
    if t.dim_in != t.dim_out and t.dim_in != 2:
        # lattice is defined for square qubit-like searches; random states
        # still apply for any input dimension
        pass
    best_val, best_vec, samples = minimize_output_min_eig(
        t.apply_batch, t.dim_in, budget=budget, seed=seed
    )
    witness = states.projector(best_vec)
    out_scale = max(1.0, float(np.abs(t.apply(witness)).max()))
    if best_val < -10.0 * tolerance() * out_scale:
        return PositivityReport(
            is_positive="certified-violation",
            witness=witness,
            witness_min_eigenvalue=best_val,
            samples_used=samples,
        )
    return PositivityReport(is_positive="no-violation-found", samples_used=samples)


def extend_with_identity(t: Superoperator, n: int) -> Superoperator:
    """The map T (x) I_n on the composite S + witness space (ordering S (x) W)."""
    d_in, d_out = t.dim_in, t.dim_out
    din_c, dout_c = d_in * n, d_out * n
    transfer = np.zeros((dout_c**2, din_c**2), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            block = unvec(t.transfer[:, j * d_in + i], d_out)
            for w in range(n):
                for v in range(n):
                    col = (j * n + v) * din_c + (i * n + w)
                    transfer[:, col] = vec(kron(block, _unit(w, v, n)))
    return Superoperator(dim_in=din_c, dim_out=dout_c, transfer=transfer)


def is_n_positive(t: Superoperator, n: int, budget: int = 2000, seed: int = 0) -> PositivityReport:
    """Falsification search for n-positivity of t via T (x) I_n.

    For n >= dim_in the verdict must agree with is_cp (k-positivity is
    complete positivity for k-state systems); the maximally entangled state
    is always included among the candidates.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return is_positive_map(t, budget=budget, seed=seed)
    comp = extend_with_identity(t, n)
    k = min(t.dim_in, n)
    ent = np.zeros(t.dim_in * n, dtype=complex)
    for i in range(k):
        ent[i * n + i] = 1.0
    ent /= np.linalg.norm(ent)
    best_val, best_vec, samples = minimize_output_min_eig(
        comp.apply_batch,
        comp.dim_in,
        budget=budget,
        seed=seed,
        extra_candidates=ent[None, :],
    )
    witness = states.projector(best_vec)
    out_scale = max(1.0, float(np.abs(comp.apply(witness)).max()))
    if best_val < -10.0 * tolerance() * out_scale:
        return PositivityReport(
            is_positive="certified-violation",
            witness=witness,
            witness_min_eigenvalue=best_val,
            samples_used=samples,
        )
    return PositivityReport(is_positive="no-violation-found", samples_used=samples)


def adjoint_map(t: Superoperator) -> Superoperator:
    """Heisenberg-picture dual: tr(adj(T)(A) rho) = tr(A T(rho))."""
    return Superoperator(
        dim_in=t.dim_out, dim_out=t.dim_in, transfer=dag(t.transfer)
    )


# -- measurements and selective operations -----------------------------------


def _check_projectors(projectors) -> int:
    ps = [np.asarray(p, dtype=complex) for p in projectors]
    d = ps[0].shape[0]
    tol = 1e3 * tolerance()
    for p in ps:
        if not matcore.mat_close(p @ p, p, tol):
            raise ValueError("projector set contains a non-idempotent element")
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if float(np.abs(ps[i] @ ps[j]).max()) > tol:
                raise ValueError("projector set is not mutually orthogonal")
    if not matcore.mat_close(sum(ps), np.eye(d), tol):
        raise ValueError("projector set does not resolve the identity")
    return d


def lueders(rho: np.ndarray, projectors) -> list[tuple[float, np.ndarray]]:
    """Selective von Neumann measurement: outcome probabilities and
    post-measurement states. Zero-probability branches are omitted."""
    _check_projectors(projectors)
    out = []
    for p in projectors:
        prob = float(np.trace(p @ rho).real)
        if prob > tolerance():
            out.append((prob, p @ rho @ dag(p) / prob))
    return out


def nonselective(rho: np.ndarray, projectors) -> np.ndarray:
    """Nonselective measurement sum_i P_i rho P_i (a Kraus-form channel)."""
    _check_projectors(projectors)
    return sum(p @ rho @ dag(p) for p in projectors)


def selective_apply(k: KrausSet, rho: np.ndarray) -> tuple[float, np.ndarray | None]:
    """Apply a selective operation: (success probability, normalized state).

    The unnormalized output's trace is the success probability; below
    tolerance no state is produced.
    """
    if k.completeness not in ("selective", "trace-preserving"):
        raise ValueError(f"unsupported completeness class {k.completeness!r}")
    out = sum(w @ rho @ dag(w) for w in k.ops)
    prob = float(np.trace(out).real)
    if prob <= tolerance():
        return 0.0, None
    return prob, out / prob


# -- stock maps and random channels ------------------------------------------


def identity_superoperator(dim: int) -> Superoperator:
    return Superoperator(dim_in=dim, dim_out=dim, transfer=np.eye(dim**2, dtype=complex))


def transpose_superoperator(dim: int) -> Superoperator:
    """The transpose map: positive but not completely positive for dim >= 2."""
    t = np.zeros((dim**2, dim**2), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            t[:, j * dim + i] = vec(_unit(j, i, dim))
    return Superoperator(dim_in=dim, dim_out=dim, transfer=t)


def flip_superoperator() -> Superoperator:
    """Qubit Bloch map (x, y, z) -> (x, y, -z).

    Equal to conjugation by sigma_x composed with transposition; positive,
    NCP, with Choi spectrum (-1, 1, 1, 1).
    """
    sx = states.SIGMA_X
    conj_x = transfer_from_kraus([sx])
    tr = transpose_superoperator(2)
    return Superoperator(dim_in=2, dim_out=2, transfer=conj_x.transfer @ tr.transfer)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_cptp(dim: int, rng: np.random.Generator, kraus_rank: int | None = None) -> KrausSet:
    """Random CPTP channel from a Haar isometry (Stinespring dilation)."""
    k = kraus_rank or dim**2
    u = random_unitary(dim * k, rng)
    iso = u[:, :dim]  # isometry H_in -> H_out (x) H_env
    ops = tuple(iso.reshape(dim, k, dim)[:, a, :] for a in range(k))
    return KrausSet(ops=ops, completeness="trace-preserving")


# -- JSON superoperator format -----------------------------------------------
# {"dim_in": n, "dim_out": m, "kind": "kraus"|"transfer"|"choi",
#  "data": [matrix objects]}


def superoperator_to_json(t: Superoperator, kind: str = "transfer") -> dict:
    if kind == "transfer":
        data = [states.matrix_to_json(t.transfer)]
    elif kind == "choi":
        data = [states.matrix_to_json(choi_of(t))]
    elif kind == "kraus":
        ks = kraus_from_choi(choi_of(t), t.dim_in, t.dim_out)
        data = [states.matrix_to_json(w) for w in ks.ops]
    else:
        raise ValueError(f"unknown superoperator kind {kind!r}")
    return {"dim_in": t.dim_in, "dim_out": t.dim_out, "kind": kind, "data": data}


def superoperator_from_json(obj: dict) -> Superoperator:
    try:
        d_in = int(obj["dim_in"])
        d_out = int(obj["dim_out"])
        kind = obj["kind"]
        data = obj["data"]
    except KeyError as exc:
        raise ValueError(f"superoperator object missing field {exc}") from exc
    mats = [states.matrix_from_json(m) for m in data]
    if kind == "transfer":
        return Superoperator(dim_in=d_in, dim_out=d_out, transfer=mats[0])
    if kind == "choi":
        return transfer_from_choi(mats[0], d_in, d_out)
    if kind == "kraus":
        return transfer_from_kraus(mats)
    raise ValueError(f"unknown superoperator kind {kind!r}")
