"""End-to-end acceptance gate.

Each test prints one ``ACCEPTANCE <n> PASS|FAIL`` line with the measured
quantities, then asserts.  Run with ``pytest tests/test_acceptance.py -v``.
"""
import time

import numpy as np
import pytest

from robin_eit import MediumConfig, assemble_operator, solve_mode
from robin_eit.forward import BoundaryGrid, KernelSpec, boundary_trace, evaluate_potential, radial_derivative
from robin_eit.greens import SamplingPoint, greens_trace_series, robin_greens_trace
from robin_eit.regularize import (
    FilterSpec,
    augmented_spectrum,
    decompose,
    filter_value,
    filtered_solve,
    picard_partial_sums,
    ttls_filter_factors,
)
from robin_eit.runner import io
from robin_eit.runner.config import ExperimentConfig, FilterEntry, preset
from robin_eit.runner.experiments import compute_maps, run_image, verify_manifest
from robin_eit.verification import PolarMesh, direct_ttls, fd_forward_solve

from conftest import random_band_limited


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s): {detail}")
        assert ok, detail

    return emit


def test_vanishing_interface(report):
    start = time.perf_counter()
    A = assemble_operator(MediumConfig(0.4, 1.0, 1.0, 0.0), BoundaryGrid(32))
    worst = float(np.max(np.abs(A.entries)))
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-14 and elapsed < 1, f"max|A| = {worst:.1e}", elapsed)


def _relative_residuals(medium, f, kernel, angles):
    rho = medium.rho
    out = []
    for phi in angles:
        u1 = evaluate_potential(1.0, phi, medium, f, kernel)
        du1 = radial_derivative(1.0, phi, medium, f, kernel)
        f_val = sum(f[n + 10] * np.exp(1j * n * phi) for n in range(-10, 11))
        robin = abs(medium.sigma_out * du1 + u1 - f_val) / max(abs(f_val), abs(u1), 1e-300)

        u_out = evaluate_potential(rho, phi, medium, f, kernel, branch="outer")
        u_in = evaluate_potential(rho, phi, medium, f, kernel, branch="inner")
        cont = abs(u_out - u_in) / max(abs(u_out), abs(u_in), 1e-300)

        flux_out = medium.sigma_out * radial_derivative(rho, phi, medium, f, kernel, "outer")
        flux_in = medium.sigma_in * radial_derivative(rho, phi, medium, f, kernel, "inner")
        jump = abs(flux_out - flux_in - medium.gamma * u_out) / max(
            abs(flux_out), abs(flux_in), abs(medium.gamma * u_out), 1e-300
        )
        out.append(max(robin, cont, jump))
    return max(out)


def test_boundary_condition_residuals(report):
    start = time.perf_counter()
    kernel = KernelSpec(10)
    rng = np.random.default_rng(2024)
    angles = np.linspace(0, 2 * np.pi, 6, endpoint=False) + 0.1
    worst = 0.0
    for medium in (MediumConfig(0.4, 1.0, 1.0, 1.0), MediumConfig(0.4, 1.0, 10.0, 1.0), MediumConfig(0.7, 2.0, 0.5, 5.0)):
        for _ in range(20):
            worst = max(worst, _relative_residuals(medium, random_band_limited(rng, 10), kernel, angles))
    elapsed = time.perf_counter() - start
    report(2, worst <= 1e-10 and elapsed < 5, f"worst relative residual {worst:.1e}", elapsed)


@pytest.mark.slow
def test_finite_difference_agreement(report):
    start = time.perf_counter()
    medium = MediumConfig(0.4, 1.0, 1.0, 1.0)
    f = random_band_limited(np.random.default_rng(7), 3)
    kernel = KernelSpec(3)
    errors = []
    for n_r in (64, 128, 256):
        mesh = PolarMesh.aligned_to(medium.rho, n_r, 2 * n_r)
        exact = boundary_trace(medium, f, kernel, mesh.angles)
        fd = fd_forward_solve(medium, f, mesh)
        errors.append(np.linalg.norm(fd - exact) / np.linalg.norm(exact))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    elapsed = time.perf_counter() - start
    ok = errors[-1] <= 1e-2 and np.all(np.abs(orders - 2) <= 0.3) and elapsed < 60
    report(3, ok, f"errors {', '.join(f'{e:.2e}' for e in errors)}; orders {np.round(orders, 3).tolist()}", elapsed)


def test_greens_trace(report):
    start = time.perf_counter()
    grid = BoundaryGrid(32)
    worst = 0.0
    for rho_z in (0.0, 0.2, 0.4, 0.8):
        for sigma in (1.0, 10.0):
            z = SamplingPoint(rho_z, 0.7)
            q = robin_greens_trace(z, sigma, grid).values
            s = greens_trace_series(z, sigma, grid, 400).values
            worst = max(worst, float(np.max(np.abs(q - s))))
    center = max(
        float(np.max(np.abs(robin_greens_trace(SamplingPoint(0.0, 0.0), sigma, grid).values - sigma / (2 * np.pi))))
        for sigma in (1.0, 10.0)
    )
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and center <= 1e-12 and elapsed < 1
    report(4, ok, f"quadrature vs series {worst:.1e}; center deviation {center:.1e}", elapsed)


def test_filter_suite(report):
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    t = 10.0 ** rng.uniform(-8, 2, 1000)
    alpha = 10.0 ** rng.uniform(-16, 4, 1000)
    values = np.concatenate([
        [filter_value(FilterSpec(scheme, a), x) for x, a in zip(t, alpha)]
        for scheme in ("tikhonov", "spectral_cutoff")
    ])
    bounded = bool(np.all((values >= 0) & (values <= 1)))

    ladder = 10.0 ** -np.arange(1, 13)
    limit = min(filter_value(FilterSpec(s, ladder[-1]), 1e-3) for s in ("tikhonov", "spectral_cutoff"))

    A = assemble_operator(MediumConfig())
    system = decompose(A)
    b = robin_greens_trace(SamplingPoint(0.5, 0.3), 1.0, BoundaryGrid(32)).values
    alphas = np.logspace(-14, 0, 10)
    norms = [np.linalg.norm(filtered_solve(system, b, FilterSpec("tikhonov", a))) for a in alphas]
    monotone = bool(np.all(np.diff(norms) <= 0))
    elapsed = time.perf_counter() - start
    ok = bounded and limit >= 0.999 and monotone and elapsed < 1
    report(5, ok, f"bounds {bounded}; limit value {limit:.6f}; tikhonov norms monotone {monotone}", elapsed)


def test_ttls_equivalence(report):
    start = time.perf_counter()
    rng = np.random.default_rng(11)
    worst, skipped = 0.0, 0
    for i in range(50):
        k = 1 + i % 6
        A, b = rng.standard_normal((8, 8)), rng.standard_normal(8)
        system = decompose(A)
        phi, hits = ttls_filter_factors(system.singular_values, augmented_spectrum(A, b), k)
        if hits:
            skipped += 1
            continue
        x = system.right_vectors @ (phi / system.singular_values * system.coefficients(b))
        ref = direct_ttls(A, b, k)
        worst = max(worst, np.linalg.norm(x - ref) / np.linalg.norm(ref))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 5
    report(6, ok, f"worst relative difference {worst:.1e}; guard-skipped instances {skipped}", elapsed)


def test_noiseless_reproduction(report):
    start = time.perf_counter()
    _, _, results = compute_maps(preset("baseline"))
    elapsed = time.perf_counter() - start
    lines, ok = [], len(results) == 6
    for indicator, m in results:
        good = m.contrast >= 2 and (indicator.method != "rfm" or m.jaccard >= 0.3)
        ok &= good
        lines.append(f"{indicator.name} contrast {m.contrast:.3g} jaccard {m.jaccard:.3f}")
    report(7, ok and elapsed < 30, "; ".join(lines), elapsed)


@pytest.mark.slow
def test_noisy_robustness(report):
    start = time.perf_counter()
    base = preset("noisy").with_overrides(methods=("rfm",), filters=(FilterEntry("rfm", FilterSpec("ttls", 5)),))
    inside = 0
    for seed in range(10):
        _, _, [(_, m)] = compute_maps(base.with_overrides(seed=seed))
        inside += m.argmax_dist < base.rho
    elapsed = time.perf_counter() - start
    report(8, inside >= 9 and elapsed < 300, f"argmax inside the disk for {inside}/10 seeds", elapsed)


def test_picard_dichotomy(report):
    start = time.perf_counter()
    system = decompose(assemble_operator(MediumConfig()))
    grid = BoundaryGrid(32)
    sums = {
        rho_z: picard_partial_sums(system, robin_greens_trace(SamplingPoint(rho_z, 0.0), 1.0, grid).values)[-1]
        for rho_z in (0.2, 0.8)
    }
    ratio = sums[0.8] / sums[0.2]
    elapsed = time.perf_counter() - start
    report(9, ratio >= 10 and elapsed < 1, f"full sum ratio outside/inside {ratio:.3g}", elapsed)


def test_determinism(report, tmp_path):
    start = time.perf_counter()
    config = ExperimentConfig(delta=0.01, seed=42)
    run_image(config, out=tmp_path / "first")
    run_image(config, out=tmp_path / "second")
    first = io.read_json(tmp_path / "first" / "manifest.json")
    names = sorted(first["artifacts"])
    identical = all(
        (tmp_path / "first" / n).read_bytes() == (tmp_path / "second" / n).read_bytes() for n in names
    )
    bad = verify_manifest(tmp_path / "first" / "manifest.json") + verify_manifest(tmp_path / "second" / "manifest.json")
    elapsed = time.perf_counter() - start
    ok = identical and not bad and elapsed < 60
    report(10, ok, f"{len(names)} artifacts byte-identical {identical}; checksum failures {bad}", elapsed)
