"""Named invariant checks runnable from the command line.

Each check verifies one structural property of the simulator (hermiticity,
frame-change conjugation identities, integrator order, Ehrenfest relations,
serialization round trips, ...). A failing check names itself and reports the
measured defect so regressions are attributable.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytics, hamiltonians, hilbert, observables, propagation
from .hamiltonians import DriveParams, mhz
from .hilbert import TruncationSpec
from .linalg import hermiticity_defect, unitarity_defect
from .propagation import TimeGrid


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class CheckReport:
    level: str
    results: list[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def format(self) -> str:
        lines = [
            f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}"
            for r in self.results
        ]
        n_fail = sum(not r.passed for r in self.results)
        lines.append(
            f"{len(self.results)} checks, {n_fail} failed, "
            f"level={self.level}, {self.elapsed:.1f}s"
        )
        return "\n".join(lines)


@dataclass
class CheckContext:
    trunc: TruncationSpec
    rng: np.random.Generator
    n_seeds: int
    full: bool


def _random_params(rng) -> DriveParams:
    g = mhz(10.0)
    lam = float(rng.uniform(0.2, 6.0)) * g
    xi = float(rng.uniform(0.0, 1.0)) * g
    return DriveParams.resonant_mode(g=g, lam=lam, xi=xi)


def check_builder_hermiticity(ctx: CheckContext) -> str:
    worst = 0.0
    for _ in range(ctx.n_seeds):
        p = _random_params(ctx.rng)
        t = float(ctx.rng.uniform(0.0, 5.0))
        mats = [
            hamiltonians.build_lab(p, ctx.trunc, t),
            hamiltonians.build_l1(p, ctx.trunc, t),
            hamiltonians.build_interaction(p, ctx.trunc, t),
            hamiltonians.build_effective(p, ctx.trunc),
            hamiltonians.build_nonrel(p, ctx.trunc),
            hamiltonians.build_fw_hamiltonian(p, ctx.trunc),
        ]
        worst = max(worst, *(hermiticity_defect(m.matrix) for m in mats))
    assert worst <= 1e-12, f"hermiticity defect {worst:.2e}"
    return f"max defect {worst:.2e}"


def check_ladder_commutator(ctx: CheckContext) -> str:
    a, adag = hilbert.ladder_ops(ctx.trunc)
    comm = (a @ adag - adag @ a).matrix
    bulk = np.diag(comm)[:-1]
    corner = comm[-1, -1]
    defect = float(np.max(np.abs(bulk - 1.0)))
    assert defect <= 1e-12, f"bulk commutator defect {defect:.2e}"
    assert abs(corner + ctx.trunc.n_max) <= 1e-10, f"corner entry {corner}"
    return f"bulk exact, corner {corner:.0f} as truncation demands"


def check_coherent_eigenvector(ctx: CheckContext) -> str:
    a, _ = hilbert.ladder_ops(ctx.trunc)
    worst = 0.0
    for _ in range(ctx.n_seeds):
        r = math.sqrt(ctx.trunc.n_max) / 2 * float(ctx.rng.uniform(0.1, 1.0))
        alpha = r * np.exp(1j * float(ctx.rng.uniform(0, 2 * math.pi)))
        v = hilbert.coherent_state(alpha, ctx.trunc)
        worst = max(worst, float(np.linalg.norm(a.matrix @ v - alpha * v)))
    assert worst <= 1e-6, f"residual {worst:.2e}"
    return f"max |a - alpha| residual {worst:.2e}"


def check_displacement_unitarity(ctx: CheckContext) -> str:
    worst = 0.0
    for _ in range(ctx.n_seeds):
        alpha = complex(ctx.rng.uniform(-1.5, 1.5), ctx.rng.uniform(-1.5, 1.5))
        d = hilbert.displacement_op(alpha, ctx.trunc)
        worst = max(worst, unitarity_defect(d.matrix))
    assert worst <= 1e-9, f"unitarity defect {worst:.2e}"
    return f"max defect {worst:.2e}"


def check_frame_conjugation_l1(ctx: CheckContext) -> str:
    # H_l1 = U1 H_lab U1^dag - omega (n + sz/2) with U1 the number-phase rotation
    p = _random_params(ctx.rng)
    n_f = hilbert.number_op(ctx.trunc).matrix
    qops = hilbert.qubit_ops(p.phi)
    nhat = np.kron(np.eye(2), n_f) + 0.5 * np.kron(qops["sigma_z"].matrix, np.eye(ctx.trunc.dim))
    worst = 0.0
    for _ in range(ctx.n_seeds):
        t = float(ctx.rng.uniform(0.0, 3.0))
        u1 = np.diag(np.exp(1j * p.omega * t * np.diag(nhat)))
        lhs = hamiltonians.build_l1(p, ctx.trunc, t).matrix
        rhs = u1 @ hamiltonians.build_lab(p, ctx.trunc, t).matrix @ u1.conj().T - p.omega * nhat
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    assert worst <= 1e-10 * max(p.omega, 1.0), f"defect {worst:.2e}"
    return f"max defect {worst:.2e}"


def check_frame_conjugation_interaction(ctx: CheckContext) -> str:
    # H_int = e^{iH0 t} (H_l1 - H0) e^{-iH0 t}
    from .linalg import expm_herm_generator

    p = _random_params(ctx.rng)
    h0 = hamiltonians.h0_l1(p, ctx.trunc).matrix
    worst = 0.0
    for _ in range(ctx.n_seeds):
        t = float(ctx.rng.uniform(0.0, 3.0))
        u0 = expm_herm_generator(h0, 1j * t)
        lhs = hamiltonians.build_interaction(p, ctx.trunc, t).matrix
        rhs = u0 @ (hamiltonians.build_l1(p, ctx.trunc, t).matrix - h0) @ u0.conj().T
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    assert worst <= 1e-10 * max(p.Omega, 1.0), f"defect {worst:.2e}"
    return f"max defect {worst:.2e}"


def check_interaction_time_average(ctx: CheckContext) -> str:
    # one full period of the fast phase averages the oscillating terms to zero
    p = _random_params(ctx.rng)
    period = math.pi / p.Omega
    n_pts = 512
    ts = np.linspace(0.0, period, n_pts + 1)
    acc = np.zeros((ctx.trunc.joint_dim, ctx.trunc.joint_dim), dtype=complex)
    for t in ts[:-1]:
        acc += hamiltonians.build_interaction(p, ctx.trunc, float(t)).matrix
    acc /= n_pts
    h_eff = hamiltonians.build_effective(p, ctx.trunc).matrix
    defect = float(np.linalg.norm(acc - h_eff, 2))
    assert defect <= 1e-8, f"average defect {defect:.2e}"
    return f"period-average defect {defect:.2e}"


def check_norm_preservation(ctx: CheckContext) -> str:
    p = DriveParams.resonant_mode(lam=math.sqrt(2) * mhz(10.0), xi=0.5 * mhz(10.0))
    psi0 = hilbert.joint_state("plus", 0.0, ctx.trunc, p.phi)
    grid = TimeGrid(0.0, 5.0, 0.01, 10)
    _, states = propagation.propagate_td(hamiltonians.build_l1, p, ctx.trunc, psi0, grid)
    drift = float(np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0)))
    assert drift <= 1e-9, f"norm drift {drift:.2e}"
    return f"max norm drift {drift:.2e}"


def check_dt_convergence(ctx: CheckContext) -> str:
    p = DriveParams.resonant_mode(lam=math.sqrt(2) * mhz(10.0))
    psi0 = hilbert.joint_state("plus", math.sqrt(2) * 1j, ctx.trunc, p.phi)
    t_end = 2.5
    finals = []
    for dt in (0.05, 0.025, 0.0125, 0.0015625):
        grid = TimeGrid(0.0, t_end, dt, int(round(t_end / dt)))
        _, states = propagation.propagate_td(
            hamiltonians.build_l1, p, ctx.trunc, psi0, grid
        )
        finals.append(states[-1])
    fine = finals.pop()
    e = [float(np.linalg.norm(s - fine)) for s in finals]
    orders = [math.log2(e[k] / e[k + 1]) for k in range(2)]
    assert all(1.8 <= o <= 2.2 for o in orders), f"orders {orders}"
    return "measured orders " + ", ".join(f"{o:.2f}" for o in orders)


def check_ehrenfest(ctx: CheckContext) -> str:
    # d<x>/dt = c <sigma_y> for the time-independent limit
    g = mhz(10.0)
    p = DriveParams.resonant_mode(g=g, lam=math.sqrt(2) * g, xi=0.5 * g)
    psi0 = hilbert.joint_state("plus", math.sqrt(2) * 1j, ctx.trunc, p.phi)
    h = hamiltonians.build_effective(p, ctx.trunc)
    times = np.arange(0.0, 10.0 + 1e-12, 0.01)
    states = propagation.propagate_ti_sampled(h, psi0, times)
    traj = observables.trajectory_from_states(times, states, ctx.trunc, p.phi)
    c = hamiltonians.DiracParams.from_drive(p).c_sim
    dxdt = np.gradient(traj.x, times)
    pred = c * traj.sy
    scale = float(np.max(np.abs(pred))) or 1.0
    rel = float(np.max(np.abs(dxdt - pred)[2:-2])) / scale
    assert rel <= 1e-3, f"relative defect {rel:.2e}"
    return f"max relative defect {rel:.2e}"


def check_energy_conservation(ctx: CheckContext) -> str:
    p = DriveParams.resonant_mode(lam=math.sqrt(2) * mhz(10.0), xi=0.5 * mhz(10.0))
    psi0 = hilbert.joint_state("plus", math.sqrt(2) * 1j, ctx.trunc, p.phi)
    h = hamiltonians.build_effective(p, ctx.trunc)
    times = np.linspace(0.0, 30.0, 61)
    states = propagation.propagate_ti_sampled(h, psi0, times)
    e = np.einsum("ki,ij,kj->k", states.conj(), h.matrix, states).real
    drift = float(np.max(np.abs(e - e[0])))
    assert drift <= 1e-8, f"energy drift {drift:.2e}"
    return f"max drift {drift:.2e} rad/ns"


def check_wigner_vacuum(ctx: CheckContext) -> str:
    vac = hilbert.coherent_state(0.0, ctx.trunc)
    rho = hilbert.FieldDensityMatrix(np.outer(vac, vac.conj()))
    grid = np.linspace(-5.0, 5.0, 61)
    wmap = observables.wigner_map(rho, grid, grid)
    i0 = len(grid) // 2
    center = wmap.values[i0, i0]
    defect = abs(center - 1.0 / math.pi)
    integral = wmap.integral()
    assert defect <= 1e-9, f"W(0,0) defect {defect:.2e}"
    assert abs(integral - 1.0) <= 0.01, f"integral {integral:.4f}"
    return f"W(0,0) defect {defect:.2e}, integral {integral:.6f}"


def check_serialization_roundtrip(ctx: CheckContext) -> str:
    for _ in range(ctx.n_seeds):
        amps = ctx.rng.standard_normal(ctx.trunc.joint_dim) + 1j * ctx.rng.standard_normal(
            ctx.trunc.joint_dim
        )
        amps /= np.linalg.norm(amps)
        state = hilbert.QubitFieldState(amps, ctx.trunc.n_max)
        with tempfile.TemporaryDirectory() as d:
            path = Path(d) / "state.txt"
            hilbert.save_state(state, path)
            back = hilbert.load_state(path)
        assert np.array_equal(back.amplitudes, state.amplitudes), "round trip not bit-exact"
    return f"{ctx.n_seeds} random states bit-exact"


def check_csv_determinism(ctx: CheckContext) -> str:
    from . import scenarios

    cfg = scenarios.config_for_scenario("fig2_intermediate", frame="effective", t_end=5.0, n_max=ctx.trunc.n_max)
    with tempfile.TemporaryDirectory() as d:
        a = scenarios.run_scenario(cfg, Path(d) / "a")
        b = scenarios.run_scenario(cfg, Path(d) / "b")
        for pa, pb in zip(a, b):
            assert pa.read_bytes() == pb.read_bytes(), f"{pa.name} differs between runs"
    return "repeated runs byte-identical"


def check_purity(ctx: CheckContext) -> str:
    worst = 0.0
    for spin in ("plus", "e"):
        psi = hilbert.joint_state(spin, 1.0 + 0.5j, ctx.trunc, math.pi / 2)
        rho = observables.reduce_field(psi)
        worst = max(worst, abs(rho.purity() - 1.0))
    assert worst <= 1e-10, f"purity defect {worst:.2e}"
    return f"product-state purity defect {worst:.2e}"


def check_zbw_projector(ctx: CheckContext) -> str:
    # the jitter operator has no positive-energy matrix elements
    p = DriveParams.resonant_mode(lam=math.sqrt(2) * mhz(10.0))
    hp = analytics.HeisenbergPosition(p, ctx.trunc)
    proj = hp.positive_energy_projector()
    worst = 0.0
    for t in (1.0, 7.5, 20.0):
        z = hp.zbw_op(t)
        worst = max(worst, float(np.linalg.norm(proj @ z @ proj, 2)))
    assert worst <= 1e-8, f"projected jitter norm {worst:.2e}"
    return f"max projected jitter norm {worst:.2e}"


def check_fw_angle_convention(ctx: CheckContext) -> str:
    # the half-angle rotation diagonalizes exactly; the literal one does not
    p = DriveParams.resonant_mode(lam=4 * math.sqrt(2) * mhz(10.0))
    h_d = hamiltonians.build_effective(p, ctx.trunc).matrix
    h_fw = hamiltonians.build_fw_hamiltonian(p, ctx.trunc).matrix
    defects = {}
    for conv in ("half-angle", "literal"):
        s = hamiltonians.build_fw_unitary(p, ctx.trunc, angle_convention=conv).matrix
        defects[conv] = float(np.linalg.norm(s @ h_d @ s.conj().T - h_fw, 2))
    assert defects["half-angle"] <= 1e-9, f"half-angle defect {defects['half-angle']:.2e}"
    assert defects["literal"] > 1e-3, "literal convention unexpectedly diagonalizes"
    return (
        f"half-angle defect {defects['half-angle']:.2e}, "
        f"literal defect {defects['literal']:.2e}"
    )


def check_potential_invariance_massless(ctx: CheckContext) -> str:
    # a linear potential leaves the massless position trajectory unchanged
    g = mhz(10.0)
    times = np.linspace(0.0, 30.0, 31)
    xs = []
    for xi in (0.0, 0.5 * g):
        p = DriveParams.resonant_mode(g=g, lam=0.0, xi=xi)
        psi0 = hilbert.joint_state("plus", math.sqrt(2) * 1j, ctx.trunc, p.phi)
        h = hamiltonians.build_effective(p, ctx.trunc)
        states = propagation.propagate_ti_sampled(h, psi0, times)
        traj = observables.trajectory_from_states(times, states, ctx.trunc, p.phi)
        xs.append(traj.x)
    defect = float(np.max(np.abs(xs[0] - xs[1])))
    assert defect <= 1e-6, f"position deviation {defect:.2e}"
    return f"max position deviation {defect:.2e}"


FAST_CHECKS = [
    check_builder_hermiticity,
    check_ladder_commutator,
    check_coherent_eigenvector,
    check_displacement_unitarity,
    check_frame_conjugation_l1,
    check_frame_conjugation_interaction,
    check_interaction_time_average,
    check_norm_preservation,
    check_dt_convergence,
    check_ehrenfest,
    check_energy_conservation,
    check_wigner_vacuum,
    check_serialization_roundtrip,
    check_csv_determinism,
    check_purity,
    check_zbw_projector,
]

FULL_ONLY_CHECKS = [
    check_fw_angle_convention,
    check_potential_invariance_massless,
]


def run_checks(level: str = "fast", seed: int = 7) -> CheckReport:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    full = level == "full"
    ctx = CheckContext(
        trunc=TruncationSpec(40 if full else 20),
        rng=np.random.default_rng(seed),
        n_seeds=20 if full else 3,
        full=full,
    )
    report = CheckReport(level=level)
    start = time.perf_counter()
    for fn in FAST_CHECKS + (FULL_ONLY_CHECKS if full else []):
        name = fn.__name__.removeprefix("check_")
        try:
            detail = fn(ctx)
            report.results.append(CheckResult(name, True, detail))
        except AssertionError as exc:
            report.results.append(CheckResult(name, False, str(exc)))
    report.elapsed = time.perf_counter() - start
    return report
