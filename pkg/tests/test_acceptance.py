"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one `[acceptance NN] PASS/FAIL` line (run with `pytest -s`
to see them all); the assert carries the same detail.
"""

import time
import warnings

import numpy as np

from conftest import random_feasible_point
from memphase.channel import (
    CoherenceLabel,
    DensityMatrix,
    apply_channel,
    decay_factor,
)
from memphase.circuit import (
    JointState,
    apply_pauli_z,
    entanglement_fidelity,
    prepare_bell_with_ancillas,
    tqc_decode,
    tqc_encode,
)
from memphase.cli import RunConfig, cmd_fig2, cmd_fig3
from memphase.codes import fe_tqc_memory, fe_tqc_via_circuit, mu2_opt, pe_tqc_memory
from memphase.correlation import (
    ChannelParams,
    PhaseCovariance,
    check_mu_feasible,
    covariance_from_autocorrelation,
    covariance_from_spectrum,
)
from memphase.errors import FeasibilityWarning
from memphase.montecarlo import (
    mc_decay_factor,
    mc_tqc_fidelity,
    sample_phases_direct,
    sample_phases_trajectory,
)
from memphase.spectrum import Lorentzian


def report(number: int, ok: bool, detail: str, elapsed: float, limit: float):
    ok = ok and elapsed < limit
    line = (
        f"[acceptance {number:02d}] {'PASS' if ok else 'FAIL'}: {detail} "
        f"({elapsed:.2f}s / limit {limit:.0f}s)"
    )
    print(line)
    assert ok, line


def csv_rows(text: str) -> list[list[str]]:
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    return [l.split(",") for l in lines[1:]]


def test_01_single_use_fidelity_from_pipeline():
    t0 = time.perf_counter()
    worst = 0.0
    for g in (0.2, 0.5, 0.998):
        cov = PhaseCovariance.from_damping(g, [1.0])
        state = prepare_bell_with_ancillas()
        rho = apply_channel(state.rho, cov, (JointState.Q,))
        fid = entanglement_fidelity(JointState(rho))
        worst = max(worst, abs(fid - (1.0 + g) / 2.0))
    report(
        1,
        worst <= 1e-12,
        f"single-use pipeline fidelity vs (1+g)/2, worst |dF|={worst:.2e} (tol 1e-12)",
        time.perf_counter() - t0,
        1.0,
    )


def test_02_code_fidelity_circuit_vs_closed_form():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(50):
        g, mu1, mu2 = random_feasible_point(rng)
        cov = PhaseCovariance.from_damping(g, [1.0, mu1, mu2])
        worst = max(worst, abs(fe_tqc_via_circuit(cov) - fe_tqc_memory(g, mu1, mu2)))
    report(
        2,
        worst <= 1e-12,
        f"circuit pipeline vs closed form on 50 points, worst |dF|={worst:.2e} (tol 1e-12)",
        time.perf_counter() - t0,
        5.0,
    )


def test_03_quadratic_expansion():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    eps_grid = np.geomspace(1e-4, 1e-2, 13)
    points = [random_feasible_point(rng)[1:] for _ in range(20)]
    residuals = []  # (eps, |Pe - a eps^2|)
    for mu1, mu2 in points:
        a = 3.0 + 4.0 * mu1**2 + 2.0 * mu2**2
        for eps in eps_grid:
            pe = pe_tqc_memory(1.0 - 2.0 * eps, mu1, mu2)
            residuals.append((eps, abs(pe - a * eps**2)))
    # fit the constant on the coarse decade, then it must hold everywhere
    c_fit = 1.05 * max(r / eps**3 for eps, r in residuals if eps >= 1e-3)
    bounded = all(r <= c_fit * eps**3 for eps, r in residuals)

    eps = 1e-4
    ratio_low = pe_tqc_memory(1.0 - 2.0 * eps, 0.0, 0.0) / eps**2
    ratio_high = pe_tqc_memory(1.0 - 2.0 * eps, 1.0, 1.0) / eps**2
    limits = abs(ratio_low - 3.0) <= 0.03 and abs(ratio_high - 9.0) <= 0.09
    report(
        3,
        bounded and limits,
        f"|Pe - (3+4mu1^2+2mu2^2) eps^2| <= C eps^3 with C={c_fit:.2f}; "
        f"Pe/eps^2 -> {ratio_low:.4f} (3 +/- 1%) and {ratio_high:.4f} (9 +/- 1%)",
        time.perf_counter() - t0,
        5.0,
    )


def test_04_error_vs_mu1_sweep():
    t0 = time.perf_counter()
    text = cmd_fig2(RunConfig(epsilon=1e-3, mu1_step=0.01))
    rows = csv_rows(text)
    in_band = True
    two_qubit_above = True
    for row in rows:
        mu1 = float(row[0])
        pe_lower, pe_upper = float(row[2]), float(row[3])
        pe_2q = float(row[4])
        in_band &= 2.9e-6 <= pe_lower <= 9.1e-6 and 2.9e-6 <= pe_upper <= 9.1e-6
        if mu1 <= 0.99 + 1e-12:
            two_qubit_above &= pe_2q > max(pe_lower, pe_upper)
    final_2q = float(rows[-1][4])
    ok = in_band and two_qubit_above and final_2q == 0.0 and len(rows) == 101
    report(
        4,
        ok,
        "mu1 sweep at eps=1e-3: code error inside [2.9e-6, 9.1e-6] for both mu2 "
        f"choices, two-qubit code above for mu1<=0.99, and exactly 0 at mu1=1 "
        f"({len(rows)} rows)",
        time.perf_counter() - t0,
        5.0,
    )


def test_05_error_vs_epsilon_sweep():
    t0 = time.perf_counter()
    text = cmd_fig3(RunConfig(eps_min=1e-4, eps_max=1e-2, eps_points=25))
    rows = csv_rows(text)
    eps = np.array([float(r[0]) for r in rows])
    pe_memoryless = np.array([float(r[1]) for r in rows])
    pe_worst = np.array([float(r[2]) for r in rows])
    slope0 = np.polyfit(np.log(eps), np.log(pe_memoryless), 1)[0]
    slope1 = np.polyfit(np.log(eps), np.log(pe_worst), 1)[0]
    ratio = pe_worst[0] / pe_memoryless[0]
    ok = abs(slope0 - 2.0) <= 0.02 and abs(slope1 - 2.0) <= 0.02 and abs(ratio - 3.0) <= 0.1
    report(
        5,
        ok,
        f"log-log slopes {slope0:.4f}, {slope1:.4f} (2.00 +/- 0.02); "
        f"worst/memoryless ratio at eps=1e-4: {ratio:.4f} (3.0 +/- 0.1)",
        time.perf_counter() - t0,
        5.0,
    )


def test_06_time_vs_spectral_route_grid():
    t0 = time.perf_counter()
    worst_eta = 0.0
    worst_mu = 0.0
    for rate in (0.25, 0.5, 0.75, 1.0):
        for tau_p in (0.5, 1.0, 1.5, 2.0):
            for ratio in (1.0, 1.1, 1.3, 1.5):
                spec = Lorentzian(1.0, rate)
                params = ChannelParams(1.0, tau_p, ratio * tau_p, 3)
                c_spec = covariance_from_spectrum(spec, params)
                c_time = covariance_from_autocorrelation(spec, params)
                worst_eta = max(
                    worst_eta, abs(c_spec.eta_sq - c_time.eta_sq) / c_spec.eta_sq
                )
                for m in (1, 2):
                    worst_mu = max(
                        worst_mu,
                        abs(c_spec.mu[m] - c_time.mu[m]) / abs(c_spec.mu[m]),
                    )
    ok = worst_eta <= 1e-7 and worst_mu <= 1e-7
    report(
        6,
        ok,
        f"4x4x4 rate/window/spacing grid: worst relative deviation "
        f"eta_sq={worst_eta:.2e}, mu={worst_mu:.2e} (tol 1e-7)",
        time.perf_counter() - t0,
        30.0,
    )


def test_07_gaussian_identity_monte_carlo():
    t0 = time.perf_counter()
    rng = np.random.default_rng(707)
    n = 1_000_000
    worst_dev = 0.0
    worst_imag = 0.0
    for case in range(20):
        g, mu1, mu2 = random_feasible_point(rng, 0.3, 0.95)
        cov = PhaseCovariance.from_damping(g, [1.0, mu1, mu2])
        j = int(rng.integers(0, 8))
        l = int(rng.integers(0, 8))
        if j == l:
            l = (l + 1) % 8
        label = CoherenceLabel(j, l, 3)
        phases = sample_phases_direct(cov, 7000 + case, n)
        est = mc_decay_factor(label, phases)
        exact = decay_factor(label, cov)
        worst_dev = max(worst_dev, abs(est.value.real - exact) / est.standard_error)
        worst_imag = max(worst_imag, abs(est.value.imag) / est.imag_standard_error)
    ok = worst_dev <= 4.0 and worst_imag <= 4.0
    report(
        7,
        ok,
        f"20 sampled decay factors at n=1e6: worst real deviation {worst_dev:.2f} SE, "
        f"worst imaginary part {worst_imag:.2f} SE (tol 4)",
        time.perf_counter() - t0,
        60.0,
    )


def test_08_trajectory_oracle():
    t0 = time.perf_counter()
    spec = Lorentzian(1.0, 1.0)
    params = ChannelParams(1.0, 1.0, 1.0, 3)
    analytic = covariance_from_spectrum(spec, params)
    n = 100_000
    phases = sample_phases_trajectory(spec, params, 808, n, dt=params.tau_p / 200)
    emp = np.cov(phases.T)
    diag = np.diag(analytic.sigma)
    se = np.sqrt((np.outer(diag, diag) + analytic.sigma**2) / n)
    allowance = 4.0 * se + 0.02 * analytic.eta_sq
    worst = float(np.abs(emp - analytic.sigma).max())
    ok = bool((np.abs(emp - analytic.sigma) <= allowance).all())
    report(
        8,
        ok,
        f"path-integrated phases at dt=tau_p/200, n=1e5: worst covariance "
        f"deviation {worst:.2e} within 4 SE + 2% of eta_sq={analytic.eta_sq:.4f}",
        time.perf_counter() - t0,
        120.0,
    )


def test_09_monte_carlo_code_fidelity():
    t0 = time.perf_counter()
    g = 1.0 - 2.0 * 0.05
    n = 1_000_000
    worst = 0.0
    for offset, (mu1, mu2) in enumerate([(0.0, 0.0), (1.0, 1.0), (0.5, 0.25)]):
        cov = PhaseCovariance.from_damping(g, [1.0, mu1, mu2])
        phases = sample_phases_direct(cov, 909 + offset, n)
        est = mc_tqc_fidelity(phases)
        exact = fe_tqc_memory(g, mu1, mu2)
        worst = max(worst, abs(est.value - exact) / est.standard_error)
    report(
        9,
        worst <= 4.0,
        f"sampled code fidelity at eps=0.05, n=1e6, three correlation points: "
        f"worst deviation {worst:.2f} SE (tol 4)",
        time.perf_counter() - t0,
        120.0,
    )


def test_10_mu2_optimum():
    t0 = time.perf_counter()
    g = 0.998
    h = 1e-5
    worst_deriv = 0.0
    minima_confirmed = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FeasibilityWarning)
        for mu1 in (0.2, 0.5, 0.8):
            opt = mu2_opt(g, mu1)
            deriv = (
                pe_tqc_memory(g, mu1, opt + h) - pe_tqc_memory(g, mu1, opt - h)
            ) / (2 * h)
            worst_deriv = max(worst_deriv, abs(deriv))
            verdict = check_mu_feasible(mu1, opt)
            if verdict.feasible:
                pe_opt = pe_tqc_memory(g, mu1, opt)
                band = np.linspace(verdict.mu2_lower, verdict.mu2_upper, 401)
                minima_confirmed &= all(
                    pe_tqc_memory(g, mu1, m2) >= pe_opt - 1e-18 for m2 in band
                )
    ok = worst_deriv <= 1e-8 and minima_confirmed
    report(
        10,
        ok,
        f"dPe/dmu2 at the optimum: worst |derivative| {worst_deriv:.2e} (tol 1e-8); "
        f"grid search confirms the in-band minima",
        time.perf_counter() - t0,
        5.0,
    )


def test_11_single_error_correction():
    t0 = time.perf_counter()
    worst = 0.0
    for position in (JointState.Q, JointState.A, JointState.B):
        state = tqc_encode(prepare_bell_with_ancillas())
        state = apply_pauli_z(state, position)
        state = tqc_decode(state)
        worst = max(worst, abs(entanglement_fidelity(state) - 1.0))
    report(
        11,
        worst <= 1e-12,
        f"single phase flip on each code qubit corrected: worst |1-F|={worst:.2e} "
        f"(tol 1e-12)",
        time.perf_counter() - t0,
        5.0,
    )


def test_12_channel_invariants():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1212)
    ok = True
    g = 0.7
    cov3_free = PhaseCovariance.from_damping(g, [1.0, 0.0, 0.0])
    cov1 = PhaseCovariance.from_damping(g, [1.0])
    for _ in range(200):
        n = int(rng.integers(1, 5))
        n_uses = int(rng.integers(1, n + 1))
        if n_uses == 3:
            _, mu1, mu2 = random_feasible_point(rng)
            mu = [1.0, mu1, mu2]
        elif n_uses == 2:
            mu = [1.0, rng.uniform(0.0, 1.0)]
        else:
            mu = [1.0] + [0.0] * (n_uses - 1)
        cov = PhaseCovariance.from_damping(rng.uniform(0.2, 0.999), mu)
        a = rng.normal(size=(1 << n, 1 << n)) + 1j * rng.normal(size=(1 << n, 1 << n))
        m = a @ a.conj().T
        rho = DensityMatrix(m / m.trace())
        which = tuple(int(p) for p in rng.permutation(n)[:n_uses])
        out = apply_channel(rho, cov, which).matrix
        ok &= abs(out.trace() - 1.0) <= 1e-12
        ok &= float(np.abs(out - out.conj().T).max()) <= 1e-12
        ok &= float(np.linalg.eigvalsh(out)[0]) >= -1e-10
        ok &= bool((np.diag(out) == np.diag(rho.matrix)).all())
    # memoryless factorization on three-qubit registers
    for _ in range(20):
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        m = a @ a.conj().T
        rho = DensityMatrix(m / m.trace())
        joint = apply_channel(rho, cov3_free, (0, 1, 2)).matrix
        seq = rho
        for pos in (0, 1, 2):
            seq = apply_channel(seq, cov1, (pos,))
        ok &= float(np.abs(joint - seq.matrix).max()) <= 1e-12
    report(
        12,
        ok,
        "200 random states: trace and Hermiticity to 1e-12, spectrum above "
        "-1e-10, populations exact; uncorrelated three-use map factorizes into "
        "single uses to 1e-12",
        time.perf_counter() - t0,
        60.0,
    )
