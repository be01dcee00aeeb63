"""Experiment pipeline: sample -> diagonalize -> estimate -> CSV + manifest.

Realizations are farmed out to a process pool but every reduction runs in
the parent in realization-index order, so output bytes do not depend on the
worker count. BLAS is pinned to one thread per worker for the same reason.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .. import __version__
from ..eigensolver import eigendecompose
from ..ensemble import (
    EnsembleSpec,
    Symmetry,
    build_fourier_matrix,
    build_subspectrum_matrices,
    build_toeplitz,
    sample_coefficients,
    validate_fourier_variances,
)
from ..errors import SolverError, UnfoldingError
from ..multifractal import energy_window, fourier_transform_vector, fractal_dimension, vector_moments
from ..reference_laws import (
    CAPTION_RATIO_FIT,
    CAPTION_SPACING_FIT,
    Family,
    Observable,
    ReferenceLaw,
    fit_ratio_rational,
    fit_spacing_mixture,
    ratio_rational,
    spacing_mixture,
)
from ..spectral_stats import (
    compressibility,
    density_estimate,
    form_factor,
    nn_spacing_distribution,
    ratio_distribution,
    unfold,
)
from .compare import compare_to_reference
from .config import EnsembleKind, ExperimentConfig, Preset, paper_scale_realizations

log = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 0.01
REFERENCE_FRACTAL_DIMENSIONS = {0.5: 0.6, 1.5: 0.5, 2.0: 0.2}
CSV_HEADER = ("value", "estimate", "std_error", "reference")


class RunAborted(RuntimeError):
    pass


@dataclass
class RunManifest:
    config: dict
    files: list
    started: float
    finished: float
    library_version: str
    failures: list = field(default_factory=list)

    @property
    def elapsed_seconds(self) -> float:
        return self.finished - self.started

    def digests(self) -> dict:
        return {f["path"]: f["sha256"] for f in self.files}

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "files": self.files,
            "failures": self.failures,
            "library_version": self.library_version,
            "numpy_version": np.__version__,
            "wall_clock": {
                "started": self.started,
                "finished": self.finished,
                "elapsed_seconds": self.elapsed_seconds,
            },
        }


# ---------------------------------------------------------------- workers

def _matrices(kind: str, n_dim: int, seed: int, index: int):
    symmetry = Symmetry.COMPLEX if kind in ("complex", "fourier") else Symmetry.REAL
    spec = EnsembleSpec(symmetry, n_dim, seed, index)
    coeffs = sample_coefficients(spec)
    if kind == "complex" or kind == "real":
        return {kind: build_toeplitz(coeffs)}, spec
    if kind == "fourier":
        return {kind: build_fourier_matrix(coeffs)}, spec
    plus, minus = build_subspectrum_matrices(coeffs)
    if kind == "sub-plus":
        return {kind: plus}, spec
    if kind == "sub-minus":
        return {kind: minus}, spec
    return {"sub-plus": plus, "sub-minus": minus}, spec


def _spectrum_task(kind, n_dim, seed, index):
    mats, spec = _matrices(kind, n_dim, seed, index)
    try:
        return {name: eigendecompose(m, meta=spec).eigenvalues for name, m in mats.items()}, None
    except SolverError as exc:
        return None, {"realization_index": index, "master_seed": seed, "message": str(exc)}


def _fractal_task(kind, n_dim, seed, index, qs):
    mats, spec = _matrices(kind, n_dim, seed, index)
    try:
        rec = eigendecompose(mats[kind], want_vectors=True, meta=spec)
    except SolverError as exc:
        return None, {"realization_index": index, "master_seed": seed, "message": str(exc)}
    sel = energy_window(rec.eigenvalues, n_dim, Symmetry.REAL if kind == "real" else Symmetry.COMPLEX)
    vecs = rec.eigenvectors[:, sel]
    if kind == "fourier":
        momentum, coordinate = vecs, None
    else:
        momentum, coordinate = fourier_transform_vector(vecs), vecs
    out = {"count": int(sel.sum())}
    for q in qs:
        out[("momentum", q)] = float(vector_moments(momentum, q).sum())
        if coordinate is not None:
            out[("coordinate", q)] = float(vector_moments(coordinate, q).sum())
    return out, None


def _init_worker():
    global _LIMITER
    _LIMITER = threadpool_limits(limits=1)


def _run_tasks(func, arg_tuples, workers):
    if workers <= 1 or len(arg_tuples) <= 1:
        with threadpool_limits(limits=1):
            return [func(*args) for args in arg_tuples]
    chunk = max(1, len(arg_tuples) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker) as pool:
        return list(pool.map(func, *zip(*arg_tuples), chunksize=chunk))


# ---------------------------------------------------------------- output

def _fmt(x) -> str:
    return repr(float(x))


class _Outputs:
    def __init__(self, root: Path):
        self.root = root
        self.files = []

    def write_bytes(self, name: str, data: bytes):
        path = self.root / name
        path.write_bytes(data)
        self.files.append({"path": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})

    def table(self, name, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
        self.write_bytes(name, buf.getvalue().encode("utf-8"))

    def curve(self, name, grid, estimate, std_error, reference):
        self.table(name, CSV_HEADER, zip(grid, estimate, std_error, reference))

    def json(self, name, obj):
        self.write_bytes(name, (json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n").encode("utf-8"))


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _write_histogram(out, name, hist, reference):
    out.curve(name, hist.centers, hist.density, hist.std_error, reference)


def _hist_summary(hist, report) -> dict:
    d = report.to_dict()
    d.update(sample_count=hist.sample_count, overflow_mass=hist.overflow_mass,
             excluded_count=hist.excluded_count)
    return d


def _fit_summary(fit) -> dict:
    return {
        "parameters": [float(p) for p in fit.parameters],
        "residual_norm": fit.residual_norm,
        "reduced_chi2": fit.reduced_chi2,
        "converged": fit.converged,
        "adequate": fit.adequate,
    }


# ---------------------------------------------------------------- pipelines

def _collect(results, realizations, failures):
    fails = [f for _, f in results if f is not None]
    failures.extend(fails)
    if len(fails) > MAX_FAILURE_FRACTION * realizations:
        raise RunAborted(f"{len(fails)} of {realizations} realizations failed to diagonalize")
    return [r for r, f in results if f is None]


def _spectral_pool_outputs(out, prefix, spectra, family, config, parts) -> dict:
    st = config.stats
    summary = {"realizations": len(spectra)}
    unfolded, bad = [], 0
    if parts & {"spacing", "formfactor"}:
        for e in spectra:
            try:
                unfolded.append(unfold(e, st.retained_fraction, st.poly_degree))
            except UnfoldingError:
                bad += 1
        summary["unfolding_excluded"] = bad
        if not unfolded:
            raise RunAborted(f"{prefix}: every realization failed the unfolding check")

    if "spacing" in parts:
        for n in st.spacing_orders:
            hist = nn_spacing_distribution(unfolded, n, st.spacing_bin_width, st.spacing_max)
            law = ReferenceLaw(family, Observable.SPACING, n)
            rep = compare_to_reference(hist, law)
            _write_histogram(out, f"{prefix}p{n}.csv", hist, rep.reference)
            summary[f"p{n}"] = _hist_summary(hist, rep)
            if n == 0:
                wig = compare_to_reference(hist, ReferenceLaw(Family.WIGNER_GOE, Observable.SPACING))
                if "wigner" in parts:
                    _write_histogram(out, f"{prefix}p0_wigner.csv", hist, wig.reference)
                summary["p0_vs_wigner"] = wig.to_dict()
                if "caption_fits" in parts:
                    cap = lambda s: spacing_mixture(s, *CAPTION_SPACING_FIT)
                    rep_cap = compare_to_reference(hist, cap)
                    _write_histogram(out, f"{prefix}p0_caption_fit.csv", hist, rep_cap.reference)
                    fit = fit_spacing_mixture(hist)
                    summary["p0_vs_caption_fit"] = rep_cap.to_dict()
                    summary["p0_refit"] = _fit_summary(fit)

    if "ratio" in parts:
        hist = ratio_distribution(spectra, st.ratio_bin_width, st.ratio_max, st.retained_fraction)
        rep = compare_to_reference(hist, ReferenceLaw(family, Observable.RATIO))
        _write_histogram(out, f"{prefix}ratio.csv", hist, rep.reference)
        summary["ratio"] = _hist_summary(hist, rep)
        if "caption_fits" in parts:
            cap = lambda r: ratio_rational(r, *CAPTION_RATIO_FIT)
            rep_cap = compare_to_reference(hist, cap)
            _write_histogram(out, f"{prefix}ratio_caption_fit.csv", hist, rep_cap.reference)
            summary["ratio_vs_caption_fit"] = rep_cap.to_dict()
            summary["ratio_refit"] = _fit_summary(fit_ratio_rational(hist))

    if "formfactor" in parts:
        tau = st.tau_step * np.arange(1, int(round(st.tau_max / st.tau_step)) + 1)
        ff = form_factor(unfolded, tau)
        law = ReferenceLaw(family, Observable.FORM_FACTOR)
        rep = compare_to_reference(ff, law)
        out.curve(f"{prefix}formfactor.csv", ff.tau_grid, ff.k_values, ff.std_error, rep.reference)
        chi, chi_se = compressibility(ff)
        chi_ref = float(np.mean(law(tau[(tau >= 0.05) & (tau <= 0.25)])))
        summary["formfactor"] = rep.to_dict()
        summary["compressibility"] = {"estimate": chi, "std_error": chi_se,
                                      "reference_window_average": chi_ref}

    if "density" in parts:
        hist = density_estimate(spectra, st.density_bin_width)
        out.curve(f"{prefix}density.csv", hist.centers, hist.density, hist.std_error,
                  np.full(hist.density.size, np.nan))
        summary["density"] = {"sample_count": hist.sample_count, "bins": int(hist.density.size)}
    return summary


_SPECTRAL_PARTS = {
    Preset.FIG1_SPACINGS: {"spacing", "wigner"},
    Preset.FIG2_RATIO_FORMFACTOR: {"ratio", "formfactor"},
    Preset.FIG3_REAL_SPACINGS: {"spacing", "wigner", "caption_fits"},
    Preset.FIG4_REAL_RATIO: {"ratio", "formfactor", "caption_fits"},
    Preset.SUBSPECTRA: {"spacing", "ratio", "formfactor"},
    Preset.DENSITY_RHO: {"density"},
    Preset.CUSTOM: {"spacing", "wigner", "ratio", "formfactor", "density"},
}


def _family_for(kind: str) -> Family:
    return Family.POISSON if kind == "real" else Family.SEMI_POISSON


def _run_spectral(config, out, failures) -> dict:
    parts = _SPECTRAL_PARTS[config.preset]
    kind = "subspectra" if config.preset is Preset.SUBSPECTRA else config.ensemble.value
    tasks = [(kind, config.n_dim, config.master_seed, i) for i in range(config.realizations)]
    results = _collect(_run_tasks(_spectrum_task, tasks, config.worker_count), config.realizations, failures)
    summary = {}
    names = ["sub-plus", "sub-minus"] if kind == "subspectra" else [kind]
    for name in names:
        prefix = f"{name.replace('-', '_')}_" if kind == "subspectra" else ""
        spectra = [r[name] for r in results]
        summary[name] = _spectral_pool_outputs(out, prefix, spectra, _family_for(name), config, parts)
    return summary


def _run_fractal(config, out, failures) -> dict:
    st = config.stats
    kind = config.ensemble.value
    if kind not in ("complex", "real", "fourier"):
        raise ValueError(f"fractal dimensions need a full-matrix ensemble, got {kind}")
    sizes = list(st.fractal_sizes)
    R = config.realizations
    summary = {"sizes": sizes, "realizations": R, "ensemble": kind}
    spaces = ["momentum"] + ([] if kind == "fourier" else ["coordinate"])
    mom = {(s, q): [] for s in spaces for q in st.qs}
    errs = {(s, q): [] for s in spaces for q in st.qs}
    for k, n in enumerate(sizes):
        # disjoint realization indices per size
        tasks = [(kind, n, config.master_seed, k * R + i, tuple(st.qs)) for i in range(R)]
        results = _collect(_run_tasks(_fractal_task, tasks, config.worker_count), R, failures)
        counts = np.array([r["count"] for r in results], dtype=float)
        if counts.sum() == 0:
            raise RunAborted(f"no eigenvectors in the energy window at N={n}")
        for s in spaces:
            for q in st.qs:
                sums = np.array([r[(s, q)] for r in results])
                m = sums.sum() / counts.sum()
                keep = counts > 0
                per = sums[keep] / counts[keep]
                se = per.std(ddof=1) / math.sqrt(per.size) if per.size > 1 else 0.0
                mom[(s, q)].append(m)
                errs[(s, q)].append(se)
        log.info("fractal sweep N=%d done", n)

    dims = {}
    for s in spaces:
        rows = []
        for q in st.qs:
            series = fractal_dimension(sizes, mom[(s, q)], q)
            fitted = np.exp(series.intercept) * np.asarray(sizes, dtype=float) ** (-series.tau_q)
            tag = f"{q:g}".replace(".", "_")
            if s == "momentum":
                out.curve(f"moments_q{tag}.csv", sizes, mom[(s, q)], errs[(s, q)], fitted)
            dims[f"{s}_D_{q:g}"] = {"d_q": series.d_q, "tau_q": series.tau_q, "fit_stderr": series.fit_stderr}
            rows.append((q, series.d_q, series.fit_stderr, REFERENCE_FRACTAL_DIMENSIONS.get(q, float("nan"))))
        if s == "momentum":
            out.table("dimensions.csv", CSV_HEADER, rows)
    summary["dimensions"] = dims
    return summary


def _run_variance(config, out) -> dict:
    rows = validate_fourier_variances(config.n_dim, config.realizations, config.master_seed)
    out.table("variances.csv", ("pair_class", "p", "r", "empirical", "predicted", "std_error", "z_score"),
              [(r.pair_class, str(r.p), str(r.r), r.empirical, r.predicted, r.std_error, r.z_score)
               for r in rows])
    zs = [abs(r.z_score) for r in rows]
    return {"samples": config.realizations, "rows": len(rows), "max_abs_z": max(zs)}


def run_experiment(config: ExperimentConfig) -> RunManifest:
    """Run one preset end to end and write its outputs under ``config.output_path``."""
    if config.paper_scale:
        config = replace(config, realizations=paper_scale_realizations(config))
    started = time.time()
    root = Path(config.output_path)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {root}: {exc}") from exc
    out = _Outputs(root)
    out.write_bytes("config.json", config.dumps().encode("utf-8"))

    failures = []
    if config.preset is Preset.VARIANCE_CHECK:
        summary = _run_variance(config, out)
    elif config.preset is Preset.FRACTAL_DIMENSIONS:
        summary = _run_fractal(config, out, failures)
    else:
        summary = _run_spectral(config, out, failures)
    summary["failures"] = failures
    out.json("summary.json", summary)

    manifest = RunManifest(config.to_dict(), out.files, started, time.time(), __version__, failures)
    (root / "manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")
    return manifest
