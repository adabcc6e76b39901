"""Curvature invariants: operator norm, scalar curvature, and the split.

Works on the lowered curvature tensor produced by the correspondence module.
The tensor is pushed into an orthonormal frame of the deformed metric, read
as a self-adjoint operator on the exterior square, and its squared norm is
compared against the closed expression in q, f_z and f_h. The same frame
yields the scalar curvature, and the tensor splits into the constant-norm
model part plus a remainder that must commute with the three complex
structures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .correspondence import rtilde_closed
from .errors import DomainViolation
from .flat_model import GeometryAt
from .kulkarni import form_obar, form_owedge
from .pseudo_linear import (
    BilinearForm,
    Frame,
    Lambda2Operator,
    QuadCov,
    pseudo_gram_schmidt,
    quadcov_to_lambda2_op,
)


def orthonormal_frame(geom: GeometryAt) -> Frame:
    """Orthonormal frame of the deformed metric (all signs +1 on the domain)."""
    return pseudo_gram_schmidt(geom.g_h)


def quadcov_in_frame(tensor: QuadCov, frame: Frame) -> np.ndarray:
    """Components of a rank-4 tensor on the frame vectors."""
    v = frame.vectors
    return np.einsum("abcx,pa,qb,rc,sx->pqrs", tensor.arr, v, v, v, v, optimize=True)


def curvature_operator(geom: GeometryAt, rtilde: QuadCov) -> Lambda2Operator:
    """The curvature tensor as an operator on the exterior square.

    Computed in an orthonormal frame of the deformed metric, so the matrix of
    a tensor with pair symmetry is symmetric. The change of frame is a linear
    map, so the transformed tensor is projected back onto its antisymmetric
    part, discarding pure roundoff from the contraction.
    """
    frame = orthonormal_frame(geom)
    in_frame = quadcov_in_frame(rtilde, frame)
    in_frame = 0.5 * (in_frame - in_frame.transpose(1, 0, 2, 3))
    in_frame = 0.5 * (in_frame - in_frame.transpose(0, 1, 3, 2))
    frame_metric = BilinearForm.symmetric(np.diag(frame.signs))
    return quadcov_to_lambda2_op(QuadCov(in_frame), frame_metric)


def curvature_norm_frame(geom: GeometryAt, rtilde: QuadCov) -> float:
    """Squared operator norm: the trace of the squared curvature operator."""
    op = curvature_operator(geom, rtilde)
    return op.compose_trace(op)


def curvature_norm_closed(q: int, f_z: float, f_h: float) -> float:
    """Closed expression for the squared curvature norm of the family member q:

    q(5q+1) + 3 (t^3 + (q-1) t)^2 + 3 (t^6 + (q-1) t^2),  t = f_z / f_h.
    """
    if int(q) != q or q < 1:
        raise ValueError(f"quaternionic dimension q must be a positive integer, got {q}")
    if f_z <= 0.0 or f_h >= 0.0:
        raise DomainViolation(f"need f_z > 0 > f_h, got f_z = {f_z}, f_h = {f_h}")
    t = f_z / f_h
    n = int(q)
    return float(n * (5 * n + 1)
                 + 3.0 * (t ** 3 + (n - 1) * t) ** 2
                 + 3.0 * (t ** 6 + (n - 1) * t ** 2))


def trace_k_powers(geom: GeometryAt, exponent: int) -> float:
    """Closed trace of a power of the metric-comparison endomorphism:

    tr(K^p) = 4 [(q-1) f_z^p + f_z^(2p) / f_h^p].
    """
    if int(exponent) != exponent or exponent < 0:
        raise ValueError(f"exponent must be a non-negative integer, got {exponent}")
    p = int(exponent)
    return float(4.0 * ((geom.q - 1) * geom.f_z ** p + geom.f_z ** (2 * p) / geom.f_h ** p))


def k_trace_residuals(geom: GeometryAt, *, max_exponent: int = 6) -> dict[str, float]:
    """Agreement of the closed traces with the explicit matrix, and the vanishing traces.

    Returns the worst relative defect of tr(K^p) over p = 0..max_exponent and
    the largest magnitude among tr(K^p I_k), tr(K^p I_h), tr(K^p I_h I_k).
    """
    k = geom.k_compare.mat
    i_h = geom.i_h.mat
    iks = [geom.i_mu[j] for j in (1, 2, 3)]
    power = np.eye(geom.d)
    worst_rel = 0.0
    worst_vanish = 0.0
    for p in range(max_exponent + 1):
        closed = trace_k_powers(geom, p)
        # the closed value crosses zero (odd powers at c = 0, q = 2); floor the scale
        worst_rel = max(worst_rel, abs(np.trace(power) - closed) / max(1.0, abs(closed)))
        worst_vanish = max(
            worst_vanish,
            max(abs(np.trace(power @ ik)) for ik in iks),
            abs(np.trace(power @ i_h)),
            max(abs(np.trace(power @ i_h @ ik)) for ik in iks),
        )
        power = power @ k
    return {"closed_vs_matrix_rel": worst_rel, "vanishing_traces_abs": worst_vanish}


def model_space_part(geom: GeometryAt) -> QuadCov:
    """The constant-curvature model tensor of the split:

    -1/8 [g_h . g_h + sum_k g_h(I_k.,.) .bar. g_h(I_k.,.)]
    """
    g_h = geom.g_h.mat
    acc = form_owedge(g_h, g_h).arr
    for j in (1, 2, 3):
        ik = geom.i_mu[j]
        acc = acc + form_obar(ik.T @ g_h, ik.T @ g_h).arr
    return QuadCov(-acc / 8.0)


def alekseevsky_split(geom: GeometryAt, rtilde: QuadCov) -> tuple[QuadCov, QuadCov, float]:
    """Split the curvature as nu * (model part) + remainder, with nu = -1.

    The remainder, raised to an endomorphism in its first two slots, commutes
    with each complex structure; see hk_type_residual for the check.
    """
    nu = -1.0
    r0 = model_space_part(geom)
    r1 = QuadCov(rtilde.arr - nu * r0.arr)
    return r0, r1, nu


def hk_type_residual(geom: GeometryAt, r1: QuadCov, rng: np.random.Generator,
                     *, trials: int = 50) -> float:
    """Largest commutator entry of the raised remainder with the complex structures.

    Draws random unit pairs (A, B), raises r1(A, B, ., .) to an endomorphism
    with the deformed metric, and returns max over trials and k of
    |[r1(A,B), I_k]| entries.
    """
    gh_inv = geom.gh_inv
    worst = 0.0
    for _ in range(trials):
        a = rng.standard_normal(geom.d)
        b = rng.standard_normal(geom.d)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        lowered = np.einsum("abcx,a,b->cx", r1.arr, a, b)
        endo = gh_inv @ lowered.T
        for j in (1, 2, 3):
            ik = geom.i_mu[j]
            worst = max(worst, float(np.abs(endo @ ik - ik @ endo).max()))
    return worst


def invariance_residual(geom: GeometryAt) -> float:
    """Invariance of the twist-form block under substituting I_j into its last slots.

    The combination w_h .bar. w_h + sum_k w_h(I_k.,.) . w_h(I_k.,.) must return
    the same values at (A, B, I_j C, I_j X) as at (A, B, C, X).
    """
    oh = geom.omega_h.mat
    block = form_obar(oh, oh).arr
    for j in (1, 2, 3):
        ik = geom.i_mu[j]
        block = block + form_owedge(ik.T @ oh, ik.T @ oh).arr
    worst = 0.0
    for j in (1, 2, 3):
        ij = geom.i_mu[j]
        twisted = np.einsum("abcx,cp,xq->abpq", block, ij, ij)
        worst = max(worst, float(np.abs(twisted - block).max()))
    return worst


def scalar_curvature(geom: GeometryAt, rtilde: QuadCov) -> float:
    """Scalar curvature by sign-weighted frame contraction of the lowered tensor."""
    frame = orthonormal_frame(geom)
    in_frame = quadcov_in_frame(rtilde, frame)
    ricci = np.einsum("a,abca->bc", frame.signs, in_frame)
    return float(np.einsum("b,bb->", frame.signs, ricci))


@dataclass(frozen=True)
class NormReport:
    """Curvature-norm summary at one point, with cross-check residuals."""

    f_z: float
    f_h: float
    rho: float
    norm_frame: float
    norm_closed: float
    scal: float
    nu: float
    residuals: dict[str, float] = field(default_factory=dict)


def norm_report(geom: GeometryAt, rtilde: QuadCov | None = None,
                *, hk_trials: int = 50, hk_seed: int = 0) -> NormReport:
    """Evaluate both norm routes, the scalar curvature, and the split checks."""
    rt = rtilde if rtilde is not None else rtilde_closed(geom)
    frame_norm = curvature_norm_frame(geom, rt)
    closed_norm = curvature_norm_closed(geom.q, geom.f_z, geom.f_h)
    scal = scalar_curvature(geom, rt)
    q = geom.q
    nu = scal / (4.0 * q * (q + 2))
    _, r1, _ = alekseevsky_split(geom, rt)
    rng = np.random.default_rng(hk_seed)
    residuals = {
        "norm_frame_vs_closed_rel": abs(frame_norm - closed_norm) / abs(closed_norm),
        "scal_vs_expected_rel": abs(scal + 4.0 * q * (q + 2)) / (4.0 * q * (q + 2)),
        "hk_type_commutator": hk_type_residual(geom, r1, rng, trials=hk_trials),
        "split_invariance": invariance_residual(geom),
    }
    return NormReport(
        f_z=geom.f_z,
        f_h=geom.f_h,
        rho=2.0 * geom.f_z,
        norm_frame=frame_norm,
        norm_closed=closed_norm,
        scal=scal,
        nu=nu,
        residuals=residuals,
    )
