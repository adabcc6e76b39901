"""Batch front end: verification suites, norm evaluation, sweeps, decomposition.

Four subcommands drive the library end to end. ``verify`` reruns every
pointwise and configuration-level identity over seeded random points and
emits one result row per check; ``norm`` evaluates both curvature-norm routes
at a given point; ``sweep`` tabulates the closed norm over a grid of the
radial coordinate rho = 2 f_z, sampling one point per grid node for the frame
route; ``decompose`` reports the curvature split. Outputs are JSON or CSV
with floats printed to 17 significant digits, and identical configurations
(including the seed) produce byte-identical files. Exit codes: 0 all checks
pass, 1 a check or domain constraint failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import correspondence as corr
from . import curvature as curv
from . import flat_model as fm
from . import kulkarni as kn
from .errors import ConfigError, DomainViolation, HkqkError
from .pseudo_linear import (
    BilinearForm,
    Endomorphism,
    check_pair_antisymmetry,
    finite_diff_gradient,
)

SEED_MIX = 0x9E3779B97F4A7C15
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RunConfig:
    """Validated batch-run settings shared by all subcommands."""

    m: int = 0
    c: float = 0.0
    seed: int = 0
    samples: int = 20
    fd_step: float = 1e-5
    tol_overrides: dict[str, float] = field(default_factory=dict)
    out: str | None = None
    fmt: str = "json"
    tol_scale: float = 1.0
    corrupt_omega2: bool = False

    def validate(self) -> None:
        if int(self.m) != self.m or self.m < 0:
            raise ConfigError(f"--m must be a non-negative integer, got {self.m}")
        if self.c < 0:
            raise ConfigError(f"--c must be >= 0, got {self.c}")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError(f"--seed must fit in 64 unsigned bits, got {self.seed}")
        if self.samples < 1:
            raise ConfigError(f"--samples must be >= 1, got {self.samples}")
        if not (1e-9 < self.fd_step < 1e-2):
            raise ConfigError(f"--fd-step must lie in (1e-9, 1e-2), got {self.fd_step}")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"--format must be json or csv, got {self.fmt!r}")
        if self.tol_scale <= 0:
            raise ConfigError(f"HKQK_TOL_SCALE must be positive, got {self.tol_scale}")
        for name, value in self.tol_overrides.items():
            if value <= 0:
                raise ConfigError(f"tolerance override {name}={value} must be positive")

    @property
    def params(self) -> fm.ModelParams:
        return fm.ModelParams(m=self.m, c=self.c)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named identity over all evaluated points."""

    name: str
    anchor: str
    max_residual: float
    tolerance: float
    passed: bool
    points: int


def derived_seed(seed: int, index: int) -> int:
    """Per-point seed: xor with the index, decorrelated by a fixed odd mixer."""
    return ((seed ^ index) * SEED_MIX ^ (seed >> 32)) & SEED_MASK


# --------------------------------------------------------------------------
# check registry: name -> (tolerance, anchor)
# --------------------------------------------------------------------------

CHECKS: dict[str, tuple[float, str]] = {
    # pointwise algebra of the model
    "quaternion_relations": (1e-10, "I1 I2 = I3 cyclically, Ik^2 = -id"),
    "omega_mu_is_lowered_i_mu": (1e-10, "omega_mu = g(I_mu ., .) for mu = 0..3"),
    "i_h_squared_plus_id": (1e-10, "I_h^2 = -id"),
    "twist_form_is_lowered_i_h": (1e-10, "omega_h = g(I_h ., .)"),
    "pairwise_commutation": (1e-10, "K, I_mu, I_h commute pairwise"),
    "k_g_self_adjoint": (1e-10, "K is self-adjoint for g"),
    "i_h_g_skew": (1e-10, "I_h is skew for g"),
    "k_carries_gh_to_g": (1e-10, "g_h(K ., .) = g(., .)"),
    "gh_negative_spectrum": (0.0, "g_h is positive-definite on the domain"),
    "f_h_identity": (1e-12, "f_h = f_z + g(Z, Z)"),
    "omega_identities": (1e-8, "Jacobian contractions of omega_k tie to I_1 (three lines)"),
    "sum_identity": (1e-8, "summed Jacobian identity producing the twist form"),
    # differential identities (finite differences on the left)
    "d_alpha0_eq_2g_dz": (1e-6, "d alpha_0 = 2 g(DZ ., .)"),
    "d_alpha1_eq_lie_omega1": (1e-6, "d alpha_1 = omega_1(DZ ., .) + omega_1(., DZ .)"),
    "d_alpha2_eq_lie_omega2": (1e-6, "d alpha_2 = omega_2(DZ ., .) + omega_2(., DZ .)"),
    "d_alpha3_eq_lie_omega3": (1e-6, "d alpha_3 = omega_3(DZ ., .) + omega_3(., DZ .)"),
    "rotating_lie_omega1_zero": (1e-6, "L_Z omega_1 = 0"),
    "rotating_lie_omega2_eq_omega3": (1e-6, "L_Z omega_2 = omega_3"),
    "rotating_lie_omega3_eq_minus_omega2": (1e-6, "L_Z omega_3 = -omega_2"),
    "moment_map_f_z": (1e-6, "iota_Z omega_1 = -d f_z"),
    "moment_map_f_h": (1e-6, "iota_Z omega_h = -d f_h"),
    "twist_form_from_omega1": (1e-6, "omega_h = omega_1 + d iota_Z g"),
    # connection correction
    "s_parts_vs_closed_rel": (1e-5, "Koszul route S^h + S^q equals the closed correction"),
    "s_q_gh_skew": (1e-10, "twist part is g_h-skew in its last two slots"),
    "s_h_symmetric": (1e-5, "deformation part is symmetric in its two lower slots"),
    "s_torsion_formula": (1e-8, "S_A B - S_B A = omega_h(A,B) Z / f_h"),
    "s_metric_compatibility": (1e-5, "(D_A g_h)(B,C) = g_h(S_A B, C) + g_h(B, S_A C)"),
    # curvature constituents and routes
    "ds_term_closed_vs_fd": (1e-4, "closed expression for (D_A S)_B C - (D_B S)_A C"),
    "comm_term_closed_vs_defining": (1e-10, "closed expression for [S_A, S_B] C"),
    "dz_sz_closed_vs_defining": (1e-10, "closed expression for DZ + S_Z"),
    "t_assembly": (1e-10, "T = dS terms + commutator - twist term, as assembled"),
    "rtilde_direct_vs_closed": (1e-4, "defining curvature route equals the closed route"),
    "rtilde_pair_antisymmetry": (1e-10, "curvature antisymmetric in both index pairs"),
    "rtilde_pair_symmetry": (1e-10, "curvature symmetric under pair exchange"),
    "rtilde_first_bianchi": (1e-10, "cyclic sum over the first three slots vanishes"),
    "curvature_operator_self_adjoint": (1e-10, "wedge-space curvature operator is symmetric"),
    # curvature invariants
    "norm_frame_vs_closed_rel": (1e-8, "squared norm: frame trace equals closed expression"),
    "scal_vs_expected_rel": (1e-8, "scal = -4 q (q + 2), i.e. reduced scalar curvature -1"),
    "hk_type_commutator": (1e-8, "curvature remainder commutes with I_1, I_2, I_3"),
    "split_invariance": (1e-10, "twist-form block invariant under I_j in its last slots"),
    "k_trace_closed_vs_matrix_rel": (1e-9, "tr(K^p) = 4[(q-1) f_z^p + f_z^(2p)/f_h^p]"),
    "k_trace_vanishing_abs": (1e-9, "tr(K^p I_k) = tr(K^p I_h) = tr(K^p I_h I_k) = 0"),
    # configuration-level
    "kn_owedge_curvature_symmetries": (1e-12, "first product of symmetric forms is curvature-type"),
    "kn_obar_curvature_symmetries": (1e-12, "second product of two-forms is curvature-type"),
    "trace_identity_owedge_rel": (1e-8, "tr((E.E)(F.F)) = 2 tr(EF)^2 - 2 tr((EF)^2)"),
    "trace_identity_obar_rel": (1e-8, "tr((K.K)(L.L)) = 6 tr(KL)^2 + 6 tr((KL)^2)"),
    "trace_identity_mixed_rel": (1e-8, "tr((E.E)(K.K)) = 2 tr(EK)^2 - 6 tr((EK)^2)"),
    "equal_f_z_equal_norm_rel": (1e-9, "norm depends on the point only through f_z"),
    "c0_norm_constant_rel": (1e-9, "undeformed family: norm is the constant 4q(2q+1)"),
    "rho_profile_monotone": (1e-18, "deformed family: closed norm strictly monotone in rho"),
}


def _structural_and_differential(config: RunConfig, geom: fm.GeometryAt) -> dict[str, float]:
    res = dict(fm.structural_residuals(geom))
    res.update(fm.verify_differential_identities(
        config.params, geom.point, step=config.fd_step))
    return res


def _correspondence_residuals(config: RunConfig, geom: fm.GeometryAt):
    step = config.fd_step
    res: dict[str, float] = {}
    gh, oh = geom.g_h.mat, geom.omega_h.mat

    sc = corr.s_closed_tensor(geom).arr
    sh = corr.s_h_tensor(geom, step=step).arr
    sq = corr.s_q_tensor(geom).arr
    res["s_parts_vs_closed_rel"] = float(np.abs(sh + sq - sc).max() / np.abs(sc).max())
    res["s_q_gh_skew"] = float(np.abs(np.einsum("iab,ic->abc", sq, gh)
                                      + np.einsum("iac,ib->abc", sq, gh)).max())
    res["s_h_symmetric"] = float(np.abs(sh - np.einsum("iba->iab", sh)).max())
    torsion = sc - np.einsum("iba->iab", sc) - np.einsum("ab,i->iab", oh, geom.z_rot) / geom.f_h
    res["s_torsion_formula"] = float(np.abs(torsion).max())

    def metric_field(c):
        return fm.deformed_metric(config.params, fm.Point(c)).mat

    d_gh = finite_diff_gradient(metric_field, geom.point.coords, step=step)
    compat = (d_gh - np.einsum("iab,ic->abc", sc, gh) - np.einsum("iac,ib->abc", sc, gh))
    res["s_metric_compatibility"] = float(np.abs(compat).max() / max(1.0, np.abs(d_gh).max()))

    ds_fd = corr.term_ds_fd(geom, step=step, s_source="closed")
    ds_closed = corr.term_ds_closed(geom)
    res["ds_term_closed_vs_fd"] = float(
        np.abs(ds_closed - ds_fd).max() / max(1.0, np.abs(ds_closed).max()))
    comm = np.einsum("iaj,jbc->iabc", sc, sc) - np.einsum("ibj,jac->iabc", sc, sc)
    res["comm_term_closed_vs_defining"] = float(np.abs(corr.term_comm_closed(geom) - comm).max())
    dzsz = geom.dz.mat + np.einsum("iac,a->ic", sc, geom.z_rot)
    res["dz_sz_closed_vs_defining"] = float(np.abs(corr.dz_plus_sz_closed(geom) - dzsz).max())
    assembled = ds_fd + comm - np.einsum("ab,ic->iabc", oh, dzsz) / geom.f_h
    t_def = corr.t_tensor_defining(geom, step=step, s_source="closed")
    res["t_assembly"] = float(np.abs(t_def - assembled).max())

    rt_closed = corr.rtilde_closed(geom)
    rt_direct = corr.rtilde_direct(geom, step=step)
    res["rtilde_direct_vs_closed"] = float(
        np.abs(rt_closed.arr - rt_direct.arr).max() / max(1.0, np.abs(rt_closed.arr).max()))
    arr = rt_closed.arr
    res["rtilde_pair_antisymmetry"] = float(check_pair_antisymmetry(arr))
    res["rtilde_pair_symmetry"] = float(np.abs(arr - np.einsum("cxab->abcx", arr)).max())
    bianchi = arr + np.einsum("bcax->abcx", arr) + np.einsum("cabx->abcx", arr)
    res["rtilde_first_bianchi"] = float(np.abs(bianchi).max())
    return res, rt_closed


def _curvature_residuals(geom: fm.GeometryAt, rt_closed, point_seed: int) -> dict[str, float]:
    res: dict[str, float] = {}
    op = curv.curvature_operator(geom, rt_closed)
    res["curvature_operator_self_adjoint"] = float(
        np.abs(op.mat - op.mat.T).max() / max(1.0, np.abs(op.mat).max()))
    report = curv.norm_report(geom, rt_closed, hk_seed=point_seed)
    res["norm_frame_vs_closed_rel"] = report.residuals["norm_frame_vs_closed_rel"]
    res["scal_vs_expected_rel"] = report.residuals["scal_vs_expected_rel"]
    res["hk_type_commutator"] = report.residuals["hk_type_commutator"]
    res["split_invariance"] = report.residuals["split_invariance"]
    ktr = curv.k_trace_residuals(geom)
    res["k_trace_closed_vs_matrix_rel"] = ktr["closed_vs_matrix_rel"]
    res["k_trace_vanishing_abs"] = ktr["vanishing_traces_abs"]
    return res


def _random_adjoint_pairs(metric: BilinearForm, rng: np.random.Generator):
    d = metric.d
    b_inv = np.linalg.inv(metric.mat)
    sym = rng.standard_normal((d, d))
    sym = sym + sym.T
    anti = rng.standard_normal((d, d))
    anti = anti - anti.T
    return Endomorphism(b_inv @ sym), Endomorphism(b_inv @ anti)


def _kulkarni_residuals(config: RunConfig) -> dict[str, float]:
    rng = np.random.default_rng(derived_seed(config.seed, 1 << 32))
    res = {name: 0.0 for name in (
        "kn_owedge_curvature_symmetries", "kn_obar_curvature_symmetries",
        "trace_identity_owedge_rel", "trace_identity_obar_rel", "trace_identity_mixed_rel")}

    def curvature_defect(arr):
        pair_anti = check_pair_antisymmetry(arr)
        pair_sym = np.abs(arr - np.einsum("cxab->abcx", arr)).max()
        bianchi = np.abs(arr + np.einsum("bcax->abcx", arr) + np.einsum("cabx->abcx", arr)).max()
        return max(pair_anti, pair_sym, bianchi)

    for _ in range(config.samples):
        d = int(rng.choice([4, 6, 8]))
        sym = rng.standard_normal((d, d))
        sym = sym + sym.T
        beta = rng.standard_normal((d, d))
        beta = beta + beta.T
        owedge = kn.form_owedge(sym, beta).arr
        res["kn_owedge_curvature_symmetries"] = max(
            res["kn_owedge_curvature_symmetries"], curvature_defect(owedge) / max(1.0, np.abs(owedge).max()))
        two_form = rng.standard_normal((d, d))
        two_form = two_form - two_form.T
        obar = kn.form_obar(two_form, two_form).arr
        res["kn_obar_curvature_symmetries"] = max(
            res["kn_obar_curvature_symmetries"], curvature_defect(obar) / max(1.0, np.abs(obar).max()))

    for d in (4, 8, 12):
        for signature in ("euclidean", "split"):
            diag = np.ones(d)
            if signature == "split":
                diag[:4] = -1.0
            metric = BilinearForm.symmetric(np.diag(diag))
            for _ in range(config.samples):
                e, k = _random_adjoint_pairs(metric, rng)
                f, l = _random_adjoint_pairs(metric, rng)
                op_e = kn.endo_owedge(e, e, metric)
                op_f = kn.endo_owedge(f, f, metric)
                op_k = kn.endo_obar(k, k, metric)
                op_l = kn.endo_obar(l, l, metric)
                pairs = (
                    ("trace_identity_owedge_rel", kn.owedge_pair_trace(e, f),
                     op_e.compose_trace(op_f)),
                    ("trace_identity_obar_rel", kn.obar_pair_trace(k, l, metric),
                     op_k.compose_trace(op_l)),
                    ("trace_identity_mixed_rel", kn.mixed_pair_trace(e, k, metric),
                     op_e.compose_trace(op_k)),
                )
                for name, closed, brute in pairs:
                    rel = abs(closed - brute) / max(1.0, abs(brute))
                    res[name] = max(res[name], rel)
    return res


def _profile_residuals(config: RunConfig) -> dict[str, float]:
    params = config.params
    res: dict[str, float] = {}

    rng = np.random.default_rng(derived_seed(config.seed, 2 << 32))
    worst = 0.0
    for _ in range(config.samples):
        f_z = rng.uniform(0.1, 5.0)
        norms = []
        for _ in range(2):
            geom = fm.geometry_at(params, fm.point_with_f_z(params, f_z, rng))
            norms.append(curv.curvature_norm_frame(geom, corr.rtilde_closed(geom)))
        worst = max(worst, abs(norms[0] - norms[1]) / abs(norms[1]))
    res["equal_f_z_equal_norm_rel"] = worst

    grid = np.linspace(0.01, 100.0, 1000)
    values = np.array([curv.curvature_norm_closed(params.q, rho / 2.0, -rho / 2.0 - params.c)
                       for rho in grid])
    if config.c == 0.0:
        expected = 4.0 * params.q * (2 * params.q + 1)
        res["c0_norm_constant_rel"] = float(np.abs(values - expected).max() / expected)
    else:
        diffs = np.diff(values)
        if np.all(diffs > 0.0) or np.all(diffs < 0.0):
            res["rho_profile_monotone"] = 0.0
        else:
            res["rho_profile_monotone"] = float(np.abs(diffs[np.sign(diffs) != np.sign(diffs[0])]).max())
    return res


def run_verification(config: RunConfig) -> list[CheckResult]:
    """Evaluate every registered identity over seeded random points."""
    params = config.params
    worst: dict[str, float] = {}
    counts: dict[str, int] = {}

    def fold(res: dict[str, float], points: int) -> None:
        for name, value in res.items():
            if name not in CHECKS:
                raise KeyError(f"unregistered check {name!r}")
            worst[name] = max(worst.get(name, float("-inf")), float(value))
            counts[name] = counts.get(name, 0) + points

    for index in range(config.samples):
        rng = np.random.default_rng(derived_seed(config.seed, index))
        point = fm.random_valid_point(params, rng)
        geom = fm.geometry_at(params, point, corrupt_omega2=config.corrupt_omega2)
        fold(_structural_and_differential(config, geom), 1)
        corr_res, rt_closed = _correspondence_residuals(config, geom)
        fold(corr_res, 1)
        fold(_curvature_residuals(geom, rt_closed, derived_seed(config.seed, index)), 1)

    fold(_kulkarni_residuals(config), config.samples)
    fold(_profile_residuals(config), config.samples)

    results = []
    for name, (base_tol, anchor) in CHECKS.items():
        if name not in worst:
            continue  # profile checks are conditional on c
        tol = config.tol_overrides.get(name, base_tol) * config.tol_scale
        residual = worst[name]
        results.append(CheckResult(
            name=name, anchor=anchor, max_residual=residual,
            tolerance=tol, passed=bool(residual < tol), points=counts[name]))
    return results


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def format_float(x: float) -> str:
    return format(float(x), ".17g")


def to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{key}": {to_json(value, indent + 1)}' for key, value in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(value, indent + 1)}" for value in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if obj is None:
        return "null"
    escaped = str(obj).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _csv_quote(text: str) -> str:
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def results_to_csv(results: list[CheckResult]) -> str:
    lines = ["name,anchor,max_residual,tolerance,passed,points"]
    for r in results:
        lines.append(",".join([
            r.name, _csv_quote(r.anchor), format_float(r.max_residual),
            format_float(r.tolerance), "true" if r.passed else "false", str(r.points)]))
    return "\n".join(lines) + "\n"


def config_dict(config: RunConfig) -> dict:
    return {
        "m": config.m, "c": config.c, "seed": config.seed, "samples": config.samples,
        "fd_step": config.fd_step, "format": config.fmt, "tol_scale": config.tol_scale,
        "tol_overrides": dict(sorted(config.tol_overrides.items())),
    }


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_verify(config: RunConfig) -> int:
    results = run_verification(config)
    passed = sum(1 for r in results if r.passed)
    failed = len(results) - passed
    if config.fmt == "csv":
        text = results_to_csv(results)
    else:
        payload = {
            "config": config_dict(config),
            "results": [{
                "name": r.name, "anchor": r.anchor, "max_residual": r.max_residual,
                "tolerance": r.tolerance, "passed": r.passed, "points": r.points,
            } for r in results],
            "summary": {"passed": passed, "failed": failed},
        }
        text = to_json(payload) + "\n"
    _emit(text, config.out)
    if failed:
        names = ", ".join(r.name for r in results if not r.passed)
        print(f"FAILED {failed} of {len(results)} checks: {names}", file=sys.stderr)
        return 1
    return 0


def _parse_point(config: RunConfig, text: str) -> fm.Point:
    try:
        coords = np.array([float(part) for part in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"--point must be comma-separated reals: {exc}") from exc
    if coords.size != config.params.d:
        raise ConfigError(f"--point must have length {config.params.d} for m={config.m}, "
                          f"got {coords.size}")
    return fm.Point(coords)


def cmd_norm(config: RunConfig, point_text: str | None) -> int:
    params = config.params
    if point_text is None:
        rng = np.random.default_rng(derived_seed(config.seed, 0))
        point = fm.random_valid_point(params, rng)
    else:
        point = _parse_point(config, point_text)
    try:
        geom = fm.geometry_at(params, point)
        report = curv.norm_report(geom, hk_seed=derived_seed(config.seed, 0))
    except DomainViolation as exc:
        print(f"point outside the valid domain: {exc}", file=sys.stderr)
        return 1
    payload = {
        "config": config_dict(config),
        "point": list(point.coords),
        "report": {
            "f_z": report.f_z, "f_h": report.f_h, "rho": report.rho,
            "norm_frame": report.norm_frame, "norm_closed": report.norm_closed,
            "scal": report.scal, "nu": report.nu,
            "residuals": report.residuals,
        },
    }
    _emit(to_json(payload) + "\n", config.out)
    return 0


def cmd_sweep(config: RunConfig, rho_min: float, rho_max: float, steps: int) -> int:
    if not (0.0 < rho_min < rho_max):
        raise ConfigError(f"need 0 < rho_min < rho_max, got {rho_min}, {rho_max}")
    if steps < 2:
        raise ConfigError(f"--steps must be >= 2, got {steps}")
    params = config.params
    grid = np.linspace(rho_min, rho_max, steps)
    rows = []
    closed_values = []
    for index, rho in enumerate(grid):
        f_z = rho / 2.0
        f_h = -f_z - config.c
        closed = curv.curvature_norm_closed(params.q, f_z, f_h)
        rng = np.random.default_rng(derived_seed(config.seed, index))
        point = fm.point_with_f_z(params, f_z, rng)
        geom = fm.geometry_at(params, point)
        frame_value = curv.curvature_norm_frame(geom, corr.rtilde_closed(geom))
        closed_values.append(closed)
        rows.append((rho, f_z, f_h, closed, frame_value))

    diffs = np.diff(np.array(closed_values))
    if np.all(diffs == 0.0):
        verdict = "constant"
    elif np.all(diffs > 0.0):
        verdict = "strictly increasing"
    elif np.all(diffs < 0.0):
        verdict = "strictly decreasing"
    else:
        verdict = "non-monotone"

    lines = ["rho,f_z,f_h,norm_closed,norm_frame"]
    for row in rows:
        lines.append(",".join(format_float(value) for value in row))
    lines.append(f"# monotonicity: {verdict}")
    _emit("\n".join(lines) + "\n", config.out)
    return 0


def cmd_decompose(config: RunConfig, point_text: str | None) -> int:
    params = config.params
    if point_text is None:
        rng = np.random.default_rng(derived_seed(config.seed, 0))
        point = fm.random_valid_point(params, rng)
    else:
        point = _parse_point(config, point_text)
    try:
        geom = fm.geometry_at(params, point)
    except DomainViolation as exc:
        print(f"point outside the valid domain: {exc}", file=sys.stderr)
        return 1
    rt = corr.rtilde_closed(geom)
    r0, r1, nu = curv.alekseevsky_split(geom, rt)
    frame = curv.orthonormal_frame(geom)
    r0_frame = curv.quadcov_in_frame(r0, frame)
    r1_frame = curv.quadcov_in_frame(r1, frame)
    rng = np.random.default_rng(derived_seed(config.seed, 0))
    commutator = curv.hk_type_residual(geom, r1, rng, trials=50)
    payload = {
        "config": config_dict(config),
        "point": list(point.coords),
        "report": {
            "nu": nu,
            "f_z": geom.f_z,
            "f_h": geom.f_h,
            "model_part_frobenius": float(np.sqrt(np.sum(r0_frame ** 2))),
            "remainder_frobenius": float(np.sqrt(np.sum(r1_frame ** 2))),
            "hk_type_commutator": commutator,
        },
    }
    _emit(to_json(payload) + "\n", config.out)
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hkqk",
        description="Verification suites and curvature-norm evaluation for the flat "
                    "deformed family.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--m", type=int, default=0, help="family index (dimension 4(m+1))")
        p.add_argument("--c", type=float, default=0.0, help="deformation constant, >= 0")
        p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
        p.add_argument("--samples", type=int, default=20, help="random points per check")
        p.add_argument("--fd-step", type=float, default=1e-5,
                       help="relative finite-difference step, in (1e-9, 1e-2)")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json",
                       help="report format for verify (norm/decompose emit JSON, sweep CSV)")
        p.add_argument("--tol-override", action="append", default=[], metavar="NAME=VALUE",
                       help="override a check tolerance; repeatable")

    p_verify = sub.add_parser("verify", help="run every identity suite and report residuals")
    add_common(p_verify)
    p_verify.add_argument("--corrupt-omega2", action="store_true",
                          help=argparse.SUPPRESS)  # negative-control hook

    p_norm = sub.add_parser("norm", help="evaluate both curvature-norm routes at a point")
    add_common(p_norm)
    p_norm.add_argument("--point", default=None,
                        help="comma-separated real coordinates, length 4(m+1)")

    p_sweep = sub.add_parser("sweep", help="tabulate the norm over a grid of rho = 2 f_z")
    add_common(p_sweep)
    p_sweep.add_argument("--rho-min", type=float, required=True)
    p_sweep.add_argument("--rho-max", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)

    p_dec = sub.add_parser("decompose", help="report the curvature split at a point")
    add_common(p_dec)
    p_dec.add_argument("--point", default=None,
                       help="comma-separated real coordinates, length 4(m+1)")
    return parser


def _parse_overrides(pairs: list[str]) -> dict[str, float]:
    overrides = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise ConfigError(f"--tol-override expects NAME=VALUE, got {pair!r}")
        if name not in CHECKS:
            raise ConfigError(f"unknown check name {name!r} in --tol-override")
        try:
            overrides[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in {pair!r}: {exc}") from exc
    return overrides


def _config_from_args(args) -> RunConfig:
    try:
        tol_scale = float(os.environ.get("HKQK_TOL_SCALE", "1"))
    except ValueError as exc:
        raise ConfigError(f"HKQK_TOL_SCALE must be a number: {exc}") from exc
    config = RunConfig(
        m=args.m, c=args.c, seed=args.seed, samples=args.samples,
        fd_step=args.fd_step, tol_overrides=_parse_overrides(args.tol_override),
        out=args.out, fmt=args.fmt, tol_scale=tol_scale,
        corrupt_omega2=getattr(args, "corrupt_omega2", False))
    config.validate()
    return config


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "norm":
            return cmd_norm(config, args.point)
        if args.command == "sweep":
            return cmd_sweep(config, args.rho_min, args.rho_max, args.steps)
        if args.command == "decompose":
            return cmd_decompose(config, args.point)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except HkqkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
