"""End-to-end acceptance checks, one printed verdict line each.

Every test exercises a headline behavior at its stated tolerance and
runtime budget and reports through the shared verdict registry, so the
full PASS/FAIL block is also echoed after the pytest summary.
"""

import math
import time

import numpy as np
import pytest

from spintop.core import DensityMatrix, apply_channel, fidelity
from spintop.engine import SimulationMode
from spintop.gates import (
    CZ_MATRIX,
    Circuit,
    cx,
    cy,
    cz,
    delay,
    h,
    idle,
    rx,
    ry,
    rz,
    x,
    y,
    z90,
)
from spintop.geometric import gamma_theory, run_geometric_sweep
from spintop.mitigation import mitigate_counts, mitigate_state
from spintop.noise import (
    DEFAULT_NOISE,
    amplitude_damping_kraus,
    dephasing_kraus,
    noisy_gate_channel,
    single_spin_relaxation,
    two_spin_relaxation,
)
from spintop.pps import TUNED_DELAY_S, TUNED_ROUNDS, prepare_pps
from spintop.pulses import compile_to_pulses, phase_adjusted_distance, schedule_unitary
from spintop.tomography import ConfusionMatrix, default_scheme, measure_coefficients, reconstruct
from spintop.vqe import (
    Mitigation,
    heisenberg_hamiltonian,
    parameter_shift_gradient,
    run_vqe,
    vqe_energy,
)

from _acceptance_log import check
from conftest import random_density_matrix

PURITIES = (0.26, 0.50, 0.71, 0.87, 0.97)
OMEGAS = (math.pi, 4 * math.pi / 3)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix)).sum())


@pytest.fixture(scope="module")
def noisy_run():
    start = time.perf_counter()
    run = run_vqe(mode=SimulationMode.GATE_NOISE)
    return run, time.perf_counter() - start


@pytest.fixture(scope="module")
def cem_run():
    start = time.perf_counter()
    run = run_vqe(mode=SimulationMode.GATE_NOISE, mitigation=Mitigation.CEM)
    return run, time.perf_counter() - start


def test_exchange_spectrum():
    start = time.perf_counter()
    eigenvalues = np.sort(np.linalg.eigvalsh(heisenberg_hamiltonian().matrix))
    expected = np.array([-3.0, 1.0, 1.0, 1.0])
    defect = float(np.abs(eigenvalues - expected).max())
    elapsed = time.perf_counter() - start
    check(
        "exchange-spectrum",
        defect < 1e-10 and elapsed < 1.0,
        f"eigenvalues {np.round(eigenvalues, 6).tolist()} defect {defect:.2e} in {elapsed:.3f}s",
    )


def test_ground_state_angle_setting():
    start = time.perf_counter()
    energy = vqe_energy([math.pi / 2, 0.0, math.pi, 0.0])
    elapsed = time.perf_counter() - start
    check(
        "ground-state-angles",
        abs(energy + 3.0) < 1e-9 and elapsed < 1.0,
        f"E={energy:+.12f} vs -3 in {elapsed:.3f}s",
    )


def test_ideal_descent_convergence():
    start = time.perf_counter()
    run = run_vqe(max_iterations=200)
    elapsed = time.perf_counter() - start
    final = run.final_energy
    check(
        "ideal-descent",
        final <= -2.95 and len(run.iterations) <= 200 and elapsed < 30.0,
        f"E={final:+.6f} after {len(run.iterations)} iterations in {elapsed:.1f}s",
    )


def test_noisy_descent_plateau(noisy_run):
    run, elapsed = noisy_run
    final = run.final_energy
    check(
        "noisy-descent",
        abs(final + 2.6) <= 0.2 and elapsed < 120.0,
        f"E={final:+.6f} vs -2.6+/-0.2 after {len(run.iterations)} iterations in {elapsed:.1f}s",
    )


def test_mitigated_descent_final_energy(cem_run):
    run, elapsed = cem_run
    final = run.final_energy
    check(
        "mitigated-descent",
        abs(final + 2.98) <= 0.05 and elapsed < 120.0,
        f"E={final:+.6f} vs -2.98+/-0.05 after {len(run.iterations)} iterations in {elapsed:.1f}s",
    )


def test_phase_purity_sweep():
    start = time.perf_counter()
    ideal = run_geometric_sweep(omegas=OMEGAS, purities=PURITIES)
    noisy = run_geometric_sweep(omegas=OMEGAS, purities=PURITIES, mode=SimulationMode.GATE_NOISE)
    elapsed = time.perf_counter() - start

    worst_ideal = 0.0
    worst_noisy = 0.0
    for run_ideal, run_noisy in zip(ideal, noisy):
        theory = math.degrees(gamma_theory(run_ideal.r, run_ideal.omega))
        worst_ideal = max(worst_ideal, abs(math.degrees(run_ideal.gamma_mean) - theory))
        worst_noisy = max(worst_noisy, abs(math.degrees(run_noisy.gamma_mean) - theory))

    # The second solid angle separates the purities; the measured phase
    # must keep the theory's ascending order in r.
    second = [r for r in noisy if abs(r.omega - OMEGAS[1]) < 1e-12]
    means = [math.degrees(r.gamma_mean) for r in sorted(second, key=lambda p: p.r)]
    monotone = all(a < b for a, b in zip(means, means[1:]))
    check(
        "phase-purity-sweep",
        worst_ideal < 0.5 and worst_noisy < 10.0 and monotone and elapsed < 60.0,
        f"ideal off {worst_ideal:.3f}deg, noisy off {worst_noisy:.2f}deg, "
        f"trend {'ascending' if monotone else 'broken'} in {elapsed:.1f}s",
    )


def test_half_turn_phase_lock():
    start = time.perf_counter()
    runs = run_geometric_sweep(omegas=(math.pi,), purities=PURITIES)
    worst = max(abs(math.degrees(r.gamma_mean) + 90.0) for r in runs)
    elapsed = time.perf_counter() - start
    check(
        "half-turn-lock",
        worst < 0.5 and elapsed < 10.0,
        f"gamma within {worst:.4f}deg of -90 over r={list(PURITIES)} in {elapsed:.1f}s",
    )


def test_pseudo_pure_preparation():
    start = time.perf_counter()
    pps = prepare_pps(TUNED_ROUNDS, TUNED_DELAY_S)
    spread = max(pps.populations[1:]) - min(pps.populations[1:])
    elapsed = time.perf_counter() - start
    check(
        "pseudo-pure-preparation",
        spread < 1e-3 and pps.fidelity_vs_00 >= 0.99 and elapsed < 60.0,
        f"population spread {spread:.2e}, fidelity {pps.fidelity_vs_00:.6f}, "
        f"eta {pps.eta:.4f} in {elapsed:.1f}s",
    )


def test_tomography_roundtrip(rng):
    start = time.perf_counter()
    worst = 1.0
    for _ in range(100):
        rho = random_density_matrix(rng)
        recovered = reconstruct(measure_coefficients(rho)).state
        worst = min(worst, fidelity(rho, recovered))
    rank = default_scheme()._coverage_rank()
    elapsed = time.perf_counter() - start
    check(
        "tomography-roundtrip",
        worst >= 1.0 - 1e-9 and rank == 15 and elapsed < 10.0,
        f"worst fidelity {worst:.12f}, coverage rank {rank} in {elapsed:.1f}s",
    )


def test_property_kraus_completeness():
    start = time.perf_counter()
    channels = []
    for p in (0.0, 0.05, 0.3, 0.7, 1.0):
        channels.append(amplitude_damping_kraus(p))
        channels.append(dephasing_kraus(p))
    for duration in (1e-6, 25e-6, 800e-6, 0.03, 0.3):
        channels.append(single_spin_relaxation(duration))
        channels.append(two_spin_relaxation(duration))
    for inst in (x(1), y(2), z90(1), rx(1, 0.3), ry(2, 1.1), rz(1, 2.2), h(1), idle(2), cx(), cy(), cz(), delay(1e-3)):
        channels.append(noisy_gate_channel(inst))

    worst = 0.0
    for channel in channels:
        total = sum(op.conj().T @ op for op in channel.operators)
        worst = max(worst, float(np.abs(total - np.eye(channel.dim)).max()))
    elapsed = time.perf_counter() - start
    check(
        "property-kraus-completeness",
        worst < 1e-10,
        f"{len(channels)} channels, worst completeness defect {worst:.2e} in {elapsed:.1f}s",
    )


def test_property_parameter_shift(rng):
    start = time.perf_counter()
    step = 1e-6
    worst = 0.0
    for _ in range(25):
        theta = rng.uniform(-math.pi, math.pi, size=4)
        gradient = parameter_shift_gradient(theta)
        for i in range(4):
            bumped = theta.copy()
            bumped[i] += step
            dipped = theta.copy()
            dipped[i] -= step
            numeric = (vqe_energy(bumped) - vqe_energy(dipped)) / (2 * step)
            worst = max(worst, abs(gradient[i] - numeric))
    elapsed = time.perf_counter() - start
    check(
        "property-parameter-shift",
        worst < 1e-4,
        f"25 angle sets, worst gradient gap {worst:.2e} in {elapsed:.1f}s",
    )


def test_property_cz_hard_pulse():
    start = time.perf_counter()
    schedule = compile_to_pulses(Circuit((cz(),)))
    compiled = schedule_unitary(schedule, coupling_on=False)
    distance = phase_adjusted_distance(compiled, CZ_MATRIX)
    elapsed = time.perf_counter() - start
    check(
        "property-cz-hard-pulse",
        distance < 1e-9,
        f"phase-adjusted distance {distance:.2e} in {elapsed:.1f}s",
    )


def test_property_superoperator_roundtrip(rng):
    start = time.perf_counter()
    channel = noisy_gate_channel(cx(), DEFAULT_NOISE)
    worst = 0.0
    for _ in range(20):
        rho = random_density_matrix(rng)
        damaged = apply_channel(rho, channel)
        recovered = mitigate_state(damaged, channel).mitigated
        worst = max(worst, trace_distance(rho, recovered))
    elapsed = time.perf_counter() - start
    check(
        "property-superoperator-roundtrip",
        worst < 1e-8,
        f"20 states through the noisy CNOT, worst trace distance {worst:.2e} in {elapsed:.1f}s",
    )


def test_property_confusion_mitigation(rng):
    start = time.perf_counter()
    confusion = ConfusionMatrix.from_qubit_errors(0.02, 0.04)
    distributions = [
        np.array([1.0, 0.0, 0.0, 0.0]),
        np.array([0.5, 0.0, 0.0, 0.5]),
        np.full(4, 0.25),
    ]
    for _ in range(10):
        raw = rng.uniform(0.0, 1.0, size=4)
        distributions.append(raw / raw.sum())

    worst = 0.0
    for truth in distributions:
        observed = confusion.matrix @ truth
        recovered = mitigate_counts(observed / observed.sum(), confusion).mitigated
        worst = max(worst, float(np.abs(recovered - truth).max()))
    elapsed = time.perf_counter() - start
    check(
        "property-confusion-mitigation",
        worst < 1e-12,
        f"{len(distributions)} distributions, worst recovery gap {worst:.2e} in {elapsed:.1f}s",
    )
