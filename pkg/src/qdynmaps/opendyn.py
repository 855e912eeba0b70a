"""Assignment maps and reduced dynamics with correlated initial conditions.

An assignment map sends a system state rho_S to a joint system-reservoir
candidate rho_SR; composing with a joint unitary and the partial trace gives
the reduced dynamical map rho_S -> tr_R(U Phi(rho_S) U^dag). The candidates
an assignment produces are Hermitian and unit trace but deliberately NOT
guaranteed PSD; callers validate, because negative outputs are exactly the
phenomenon under study.

Affine maps are held as (linear part, constant part) and audited for
convex-mixture linearity; tabulated maps are defined on finitely many states
and extended (or shown non-extendable) by :func:`extend_linearly`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore, states
from .channels import Superoperator, unvec, vec
from .config import tolerance
from .matcore import dag, kron, partial_trace, trace_norm

__all__ = [
    "ProductAssignment",
    "AffineAssignment",
    "TabulatedAssignment",
    "correlated_assignment",
    "dephasing_assignment",
    "assign",
    "check_consistency",
    "check_linearity",
    "ReducedDynamics",
    "reduced_map",
    "ExtensionResult",
    "Conflict",
    "extend_linearly",
    "pechukas_witness",
    "TrajectoryReport",
    "inconsistency_analysis",
    "assignment_to_json",
    "assignment_from_json",
]


@dataclass(frozen=True)
class ProductAssignment:
    """rho_S -> rho_S (x) rho_R with a fixed reservoir state."""

    rho_r: np.ndarray
    d_s: int = 2

    @property
    def d_r(self) -> int:
        return self.rho_r.shape[0]

    def __call__(self, rho_s: np.ndarray) -> np.ndarray:
        return kron(rho_s, self.rho_r)

    def apply_batch(self, rhos: np.ndarray) -> np.ndarray:
        n = rhos.shape[0]
        out = np.einsum("nab,cd->nacbd", rhos, self.rho_r)
        m = self.d_s * self.d_r
        return out.reshape(n, m, m)


@dataclass(frozen=True)
class AffineAssignment:
    """rho_S -> L(rho_S) + tr(rho_S) * K.

    ``linear`` is a (d_s*d_r)^2 x d_s^2 matrix on column-vectorized inputs;
    ``constant`` is a fixed Hermitian traceless (d_s*d_r)-square matrix. On
    unit-trace states this realizes a general affine assignment while staying
    linear as a map of matrices, so transfer-matrix machinery applies
    directly.
    """

    linear: np.ndarray
    constant: np.ndarray
    d_s: int
    d_r: int

    def __call__(self, rho_s: np.ndarray) -> np.ndarray:
        n = self.d_s * self.d_r
        out = unvec(self.linear @ vec(rho_s), n)
        return out + np.trace(rho_s) * self.constant

    def apply_batch(self, rhos: np.ndarray) -> np.ndarray:
        n = self.d_s * self.d_r
        m = rhos.shape[0]
        vecs = rhos.transpose(0, 2, 1).reshape(m, -1)
        outs = (vecs @ self.linear.T).reshape(m, n, n).transpose(0, 2, 1)
        traces = np.trace(rhos, axis1=1, axis2=2)
        return outs + traces[:, None, None] * self.constant


@dataclass(frozen=True)
class TabulatedAssignment:
    """Assignment defined only on finitely many states; no implicit extension.

    ``inconsistent=True`` flags tables whose pairs deliberately violate
    tr_R(rho_SR) = rho_S.
    """

    pairs: tuple  # of (rho_s, rho_sr)
    d_s: int
    d_r: int
    inconsistent: bool = False

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("tabulated assignment needs at least one pair")
        if not self.inconsistent:
            for rho_s, rho_sr in self.pairs:
                res = trace_norm(partial_trace(rho_sr, (self.d_s, self.d_r)) - rho_s)
                if res > 1e3 * tolerance():
                    raise ValueError(
                        f"table pair violates consistency (residual {res:.3g}); "
                        "flag the table inconsistent=True if intended"
                    )

    def lookup(self, rho_s: np.ndarray) -> np.ndarray:
        for key, val in self.pairs:
            if matcore.mat_close(key, rho_s, 1e-10):
                return val
        raise KeyError("state not in the tabulated assignment's domain")

    def __call__(self, rho_s: np.ndarray) -> np.ndarray:
        return self.lookup(rho_s)


AssignmentMap = ProductAssignment | AffineAssignment | TabulatedAssignment


def product_as_affine(phi: ProductAssignment) -> AffineAssignment:
    """Transfer-matrix form of rho -> rho (x) tau, built on the matrix units."""
    d_s, d_r = phi.d_s, phi.d_r
    n = d_s * d_r
    lin = np.zeros((n**2, d_s**2), dtype=complex)
    for i in range(d_s):
        for j in range(d_s):
            e = np.zeros((d_s, d_s), dtype=complex)
            e[i, j] = 1.0
            lin[:, j * d_s + i] = vec(kron(e, phi.rho_r))
    return AffineAssignment(linear=lin, constant=np.zeros((n, n), dtype=complex),
                            d_s=d_s, d_r=d_r)


def correlated_assignment(c: float, d_s: int = 2) -> AffineAssignment:
    """The z-axial correlated family: rho -> rho (x) I/2 + c/4 sigma_z (x) sigma_z.

    Consistent for every c (the correlation term is traceless on R); positive
    on the full Bloch ball only at c = 0.
    """
    if d_s != 2:
        raise ValueError("correlated_assignment is a qubit-qubit family")
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"correlation strength c={c} outside [-1, 1]")
    base = product_as_affine(ProductAssignment(rho_r=states.I2 / 2.0, d_s=2))
    const = (c / 4.0) * kron(states.SIGMA_Z, states.SIGMA_Z)
    return AffineAssignment(linear=base.linear, constant=const, d_s=2, d_r=2)


def dephasing_assignment(rho_r: np.ndarray, d_s: int = 2) -> AffineAssignment:
    """Inconsistent product-like assignment rho -> (dephased rho) (x) rho_R.

    The z-dephasing kills coherences before attaching the reservoir, so
    tr_R(Phi rho) != rho whenever rho has off-diagonal terms.
    """
    d_r = rho_r.shape[0]
    n = d_s * d_r
    lin = np.zeros((n**2, d_s**2), dtype=complex)
    for i in range(d_s):
        for j in range(d_s):
            e = np.zeros((d_s, d_s), dtype=complex)
            if i == j:
                e[i, j] = 1.0  # off-diagonal units map to zero
            lin[:, j * d_s + i] = vec(kron(e, rho_r))
    return AffineAssignment(linear=lin, constant=np.zeros((n, n), dtype=complex),
                            d_s=d_s, d_r=d_r)


def assign(phi: AssignmentMap, rho_s: np.ndarray) -> np.ndarray:
    """Apply an assignment map; result is Hermitian and unit trace but not
    guaranteed PSD (validate downstream)."""
    rho_s = np.asarray(rho_s, dtype=complex)
    if rho_s.shape != (phi.d_s, phi.d_s):
        raise ValueError(f"state shape {rho_s.shape}, assignment expects d_s={phi.d_s}")
    return phi(rho_s)


@dataclass(frozen=True)
class ConsistencyReport:
    max_residual: float
    worst_probe: np.ndarray = field(repr=False)

    @property
    def consistent(self) -> bool:
        return self.max_residual <= 1e3 * tolerance()


def check_consistency(phi: AssignmentMap, probes) -> ConsistencyReport:
    """Max trace-norm residual of tr_R(Phi rho) - rho over the probes."""
    worst = None
    worst_res = -1.0
    for rho in probes:
        joint = assign(phi, rho)
        res = trace_norm(partial_trace(joint, (phi.d_s, phi.d_r)) - rho)
        if res > worst_res:
            worst_res = res
            worst = rho
    return ConsistencyReport(max_residual=worst_res, worst_probe=worst)


@dataclass(frozen=True)
class LinearityReport:
    max_residual: float
    undefined_probes: int = 0


def check_linearity(phi: AssignmentMap, probes) -> LinearityReport:
    """Convex-combination audit.

    ``probes`` is an iterable of (rho1, rho2, weight). For tabulated maps a
    mixture falling outside the table is counted as undefined, not as a
    violation: non-extendability is not nonlinearity.
    """
    worst = 0.0
    undefined = 0
    for rho1, rho2, lam in probes:
        mix = lam * rho1 + (1.0 - lam) * rho2
        if isinstance(phi, TabulatedAssignment):
            try:
                img_mix = phi.lookup(mix)
                img1 = phi.lookup(rho1)
                img2 = phi.lookup(rho2)
            except KeyError:
                undefined += 1
                continue
        else:
            img_mix = assign(phi, mix)
            img1 = assign(phi, rho1)
            img2 = assign(phi, rho2)
        worst = max(worst, trace_norm(img_mix - lam * img1 - (1.0 - lam) * img2))
    return LinearityReport(max_residual=worst, undefined_probes=undefined)


@dataclass(frozen=True)
class ReducedDynamics:
    """An assignment map plus a joint generator.

    ``generator`` is ("hamiltonian", H) for U_t = exp(-i H t), or
    ("unitary", U) for a single fixed unitary (the time argument is then
    ignored except that t = 0 gives the identity).
    """

    phi: AssignmentMap
    generator: tuple[str, np.ndarray]

    def __post_init__(self):
        kind, m = self.generator
        n = self.phi.d_s * self.phi.d_r
        if m.shape != (n, n):
            raise ValueError(f"generator shape {m.shape} incompatible with dims ({n},{n})")
        if kind == "hamiltonian":
            if not matcore.is_hermitian(m):
                raise ValueError("hamiltonian generator is not Hermitian")
        elif kind == "unitary":
            if not matcore.mat_close(dag(m) @ m, np.eye(n), 1e3 * tolerance()):
                raise ValueError("unitary generator is not unitary within tolerance")
        else:
            raise ValueError(f"unknown generator kind {kind!r}")

    def unitary_at(self, t: float) -> np.ndarray:
        kind, m = self.generator
        if kind == "hamiltonian":
            return matcore.unitary_at(m, t)
        if t == 0.0:
            return np.eye(m.shape[0], dtype=complex)
        return m


def reduced_map(rd: ReducedDynamics, t: float) -> Superoperator:
    """Transfer matrix of rho -> tr_R(U_t Phi(rho) U_t^dag).

    Built by applying the map to the matrix-unit basis of S; the affine
    constant rides along with the trace of the basis element, so the result
    is the linear extension agreeing with the direct formula on all states.
    """
    phi = rd.phi
    if isinstance(phi, TabulatedAssignment):
        raise TypeError("tabulated assignments must be extended with extend_linearly first")
    d_s, d_r = phi.d_s, phi.d_r
    u = rd.unitary_at(t)
    transfer = np.zeros((d_s**2, d_s**2), dtype=complex)
    for i in range(d_s):
        for j in range(d_s):
            e = np.zeros((d_s, d_s), dtype=complex)
            e[i, j] = 1.0
            joint = phi(e)
            out = partial_trace(u @ joint @ dag(u), (d_s, d_r))
            transfer[:, j * d_s + i] = vec(out)
    return Superoperator(dim_in=d_s, dim_out=d_s, transfer=transfer)


@dataclass(frozen=True)
class Conflict:
    """Witness that a tabulated map admits no linear extension: two convex
    decompositions of the same state whose images differ."""

    weights_a: np.ndarray
    indices_a: np.ndarray
    weights_b: np.ndarray
    indices_b: np.ndarray
    recombined_a: np.ndarray = field(repr=False)
    recombined_b: np.ndarray = field(repr=False)
    image_a: np.ndarray = field(repr=False)
    image_b: np.ndarray = field(repr=False)
    residual: float = 0.0

    @property
    def image_gap(self) -> float:
        return trace_norm(self.image_a - self.image_b)


@dataclass(frozen=True)
class ExtensionResult:
    outcome: str  # "extension" | "conflict"
    extension: AssignmentMap | None = None
    conflict: Conflict | None = None


def _common_reservoir(tab: TabulatedAssignment) -> np.ndarray | None:
    """If every pair is rho_s (x) tau with one common tau, return tau."""
    tau = None
    for rho_s, rho_sr in tab.pairs:
        cand = partial_trace(rho_sr, (tab.d_s, tab.d_r), keep=1)
        if tau is None:
            tau = cand
        elif not matcore.mat_close(tau, cand, 1e-10):
            return None
    for rho_s, rho_sr in tab.pairs:
        if not matcore.mat_close(rho_sr, kron(rho_s, tau), 1e-10):
            return None
    return tau


def extend_linearly(tab: TabulatedAssignment) -> ExtensionResult:
    """Linear extension of a tabulated assignment, or a conflict witness.

    The interpolation system X vec(rho_k) = vec(sigma_k) is solved by least
    squares; the minimal-Frobenius-norm solution fixes the (otherwise
    unconstrained) behavior off the affine hull of the table. A conflict is
    declared when the residual is irreducible, and the witness decompositions
    come from a null vector of the state-side system: splitting it by sign
    gives two convex mixtures of table states that recombine to the same
    state but are forced to different images.
    """
    d_s, d_r = tab.d_s, tab.d_r
    tau = _common_reservoir(tab)
    if tau is not None:
        return ExtensionResult(
            outcome="extension",
            extension=ProductAssignment(rho_r=tau, d_s=d_s),
        )

    p = np.stack([vec(rho_s) for rho_s, _ in tab.pairs], axis=1)  # d_s^2 x k
    s = np.stack([vec(rho_sr) for _, rho_sr in tab.pairs], axis=1)
    x, *_ = np.linalg.lstsq(p.T, s.T, rcond=None)
    x = x.T  # minimal-norm map with X p = s in least squares
    residual = float(np.abs(x @ p - s).max())
    if residual <= 1e3 * tolerance():
        ext = AffineAssignment(
            linear=x,
            constant=np.zeros((d_s * d_r, d_s * d_r), dtype=complex),
            d_s=d_s,
            d_r=d_r,
        )
        return ExtensionResult(outcome="extension", extension=ext)

    # irreducible residual: exhibit the conflict from a state-side null vector
    _, sv, vh = np.linalg.svd(p)
    null_mask = np.concatenate([sv, np.zeros(p.shape[1] - len(sv))]) <= 1e-10
    if not null_mask.any():
        # residual without an affine dependency should not happen for valid
        # tables; report it as a conflict with an empty witness anyway
        raise RuntimeError("interpolation residual without a state-side null vector")
    best = None
    for c in vh[np.where(null_mask)[0], :]:
        # fix the arbitrary SVD phase so the dependency coefficients are real
        pivot = c[int(np.argmax(np.abs(c)))]
        c = np.real(c * np.conj(pivot) / abs(pivot))
        if np.abs(p @ c).max() > 1e-8:
            continue
        gap = trace_norm(
            sum(ci * unvec(s[:, k], d_s * d_r) for k, ci in enumerate(c))
        )
        if best is None or gap > best[1]:
            best = (c, gap)
    if best is None:
        raise RuntimeError("no real affine dependency found among table states")
    c, _ = best
    pos = np.where(c > 1e-12)[0]
    neg = np.where(c < -1e-12)[0]
    w = c[pos].sum()
    wa = c[pos] / w
    wb = -c[neg] / w
    rho_a = sum(wi * unvec(p[:, k], d_s) for wi, k in zip(wa, pos))
    rho_b = sum(wi * unvec(p[:, k], d_s) for wi, k in zip(wb, neg))
    img_a = sum(wi * unvec(s[:, k], d_s * d_r) for wi, k in zip(wa, pos))
    img_b = sum(wi * unvec(s[:, k], d_s * d_r) for wi, k in zip(wb, neg))
    conflict = Conflict(
        weights_a=wa,
        indices_a=pos,
        weights_b=wb,
        indices_b=neg,
        recombined_a=rho_a,
        recombined_b=rho_b,
        image_a=img_a,
        image_b=img_b,
        residual=residual,
    )
    return ExtensionResult(outcome="conflict", conflict=conflict)


def pechukas_witness(
    phi: AssignmentMap, budget: int = 2000, seed: int = 0
) -> tuple[np.ndarray | None, float]:
    """Search for a state whose assignment image has a negative eigenvalue.

    Consistency is required up front (the theorem's hypothesis). For any
    consistent non-product affine assignment a violating pure state exists;
    for product assignments the search comes up empty. Returns (witness or
    None, best min eigenvalue found).
    """
    from .channels import minimize_output_min_eig

    d_s = phi.d_s
    rng = np.random.default_rng(seed)
    probes = [states.random_density(d_s, rng) for _ in range(20)]
    probes.append(np.eye(d_s, dtype=complex) / d_s)
    rep = check_consistency(phi, probes)
    if not rep.consistent:
        raise ValueError(
            f"assignment is inconsistent (residual {rep.max_residual:.3g}); "
            "the product-map theorem does not apply"
        )

    if isinstance(phi, ProductAssignment):
        apply_batch = lambda rhos: np.stack([phi(r) for r in rhos])
    else:
        apply_batch = phi.apply_batch
    best_val, best_vec, _ = minimize_output_min_eig(
        apply_batch, d_s, budget=budget, seed=seed
    )
    joint = assign(phi, states.projector(best_vec))
    scale = max(1.0, float(np.abs(joint).max()))
    if best_val < -10.0 * tolerance() * scale:
        return states.projector(best_vec), best_val
    return None, best_val


@dataclass(frozen=True)
class TrajectoryReport:
    """Comparison of the true reduced trajectory with the assignment proxy.

    ``fixed_point_offset`` is |rho_S - tr_R(Phi rho_S)|_1: for inconsistent
    assignments the nominal initial state sits off the generated trajectory.
    ``deviation[k]`` is |tr_R(U_t rho_SR U_t^dag) - tr_R(U_t Phi(rho_S)
    U_t^dag)|_1 at times[k].
    """

    times: np.ndarray
    fixed_point_offset: float
    deviation: np.ndarray


def inconsistency_analysis(
    phi: AssignmentMap,
    true_initial: np.ndarray,
    generator: tuple[str, np.ndarray],
    times,
) -> TrajectoryReport:
    """Track how far the assignment-generated trajectory strays from the one
    seeded by the actual joint state."""
    d_s, d_r = phi.d_s, phi.d_r
    rho_s = partial_trace(true_initial, (d_s, d_r))
    diag = states.validate(rho_s)
    if diag.verdict != "valid":
        raise ValueError(f"marginal of true_initial is not a valid state: {diag.verdict}")
    proxy = assign(phi, rho_s)
    rd = ReducedDynamics(phi=phi, generator=generator)
    offset = trace_norm(rho_s - partial_trace(proxy, (d_s, d_r)))
    times = np.asarray(list(times), dtype=float)
    devs = np.empty_like(times)
    for k, t in enumerate(times):
        u = rd.unitary_at(t)
        true_t = partial_trace(u @ true_initial @ dag(u), (d_s, d_r))
        proxy_t = partial_trace(u @ proxy @ dag(u), (d_s, d_r))
        devs[k] = trace_norm(true_t - proxy_t)
    return TrajectoryReport(times=times, fixed_point_offset=offset, deviation=devs)


# -- JSON assignment-map format ----------------------------------------------
# {"variant": "product"|"affine"|"tabulated", "d_s": n, "d_r": m, ...}


def assignment_to_json(phi: AssignmentMap) -> dict:
    base = {"d_s": phi.d_s, "d_r": phi.d_r}
    if isinstance(phi, ProductAssignment):
        return {"variant": "product", **base, "reservoir": states.matrix_to_json(phi.rho_r)}
    if isinstance(phi, AffineAssignment):
        return {
            "variant": "affine",
            **base,
            "linear": {"re": phi.linear.real.tolist(), "im": phi.linear.imag.tolist()},
            "constant": states.matrix_to_json(phi.constant),
        }
    if isinstance(phi, TabulatedAssignment):
        return {
            "variant": "tabulated",
            **base,
            "inconsistent": phi.inconsistent,
            "pairs": [
                {"rho_s": states.matrix_to_json(a), "rho_sr": states.matrix_to_json(b)}
                for a, b in phi.pairs
            ],
        }
    raise TypeError(f"not an assignment map: {type(phi)!r}")


def assignment_from_json(obj: dict) -> AssignmentMap:
    try:
        variant = obj["variant"]
        d_s = int(obj["d_s"])
        d_r = int(obj["d_r"])
    except KeyError as exc:
        raise ValueError(f"assignment object missing field {exc}") from exc
    if variant == "product":
        return ProductAssignment(rho_r=states.matrix_from_json(obj["reservoir"]), d_s=d_s)
    if variant == "affine":
        lin = np.asarray(obj["linear"]["re"], dtype=float) + 1j * np.asarray(
            obj["linear"]["im"], dtype=float
        )
        return AffineAssignment(
            linear=lin,
            constant=states.matrix_from_json(obj["constant"]),
            d_s=d_s,
            d_r=d_r,
        )
    if variant == "tabulated":
        pairs = tuple(
            (states.matrix_from_json(p["rho_s"]), states.matrix_from_json(p["rho_sr"]))
            for p in obj["pairs"]
        )
        return TabulatedAssignment(
            pairs=pairs, d_s=d_s, d_r=d_r, inconsistent=bool(obj.get("inconsistent", False))
        )
    raise ValueError(f"unknown assignment variant {variant!r}")
