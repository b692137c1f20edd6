"""Explicit time integration of the transported phase-field equation.

One step advances phi by dt * (laplacian phi - W'(phi)/eps^2 - u . grad phi)
with forward Euler or midpoint RK2; boundary nodes are pinned to their
initial trace, which realizes the -1 Dirichlet condition for scenario-built
data (whose trace is identically -1) while keeping synthetic profiles
consistent. The timestep obeys the diffusive, reactive and advective limits
simultaneously.

``run`` integrates a scenario from 0 to T, records a diagnostics row and
retains the field every ``diag_every`` steps (the quadrature schedule for all
time-integrated diagnostics), and optionally writes snapshot files. Identical
configs produce bit-identical outputs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import measures
from .grid import ScalarField, VectorField, gradient, integrate, laplacian, write_field
from .interface import extract_interface, radius_estimate
from .potential import DoubleWell
from .scenario import ScenarioConfig, build_initial_phase

PHI_ABORT = 1.1  # just outside the wells' basin; past this the run is garbage


class SolverAbort(RuntimeError):
    """Instability: non-finite update or |phi| beyond the abort threshold."""

    def __init__(self, step_index: int, location: tuple[int, ...], message: str):
        super().__init__(message)
        self.step_index = step_index
        self.location = location


@dataclass
class SolverConfig:
    scheme: str = "euler"  # "euler" | "rk2"
    cfl: float = 0.5
    diag_every: int = 50
    snap_every: int = 0  # 0: snapshot only the first and final fields
    max_frames: int = 600  # retention guard; raise rather than thrash memory

    def __post_init__(self):
        if self.scheme not in ("euler", "rk2"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl safety factor must lie in (0,1], got {self.cfl}")
        if self.diag_every < 1:
            raise ValueError("diag_every must be >= 1")


@dataclass
class SimState:
    t: float
    phi: ScalarField
    step_index: int


@dataclass
class Trajectory:
    """Retained fields on the diagnostics schedule, plus run context."""

    cfg: ScenarioConfig
    times: list[float] = field(default_factory=list)
    frames: list[ScalarField] = field(default_factory=list)
    steps_between: int = 1

    def append(self, t: float, phi: ScalarField) -> None:
        self.times.append(t)
        self.frames.append(phi.copy())


def stable_dt(h: float, eps: float, u_max: float, w: DoubleWell, n: int, cfl: float = 0.5) -> float:
    """cfl * min of the diffusive h^2/(4n), reactive eps^2/max|W''|, advective h/(2|u|) limits."""
    wpp = w.wpp_max(PHI_ABORT)
    return cfl * min(
        h * h / (4.0 * n),
        eps * eps / wpp,
        h / (2.0 * max(u_max, 1e-12)),
    )


def _boundary_mask(shape: tuple[int, ...]) -> np.ndarray:
    m = np.zeros(shape, dtype=bool)
    for ax in range(len(shape)):
        sl = [slice(None)] * len(shape)
        sl[ax] = 0
        m[tuple(sl)] = True
        sl[ax] = -1
        m[tuple(sl)] = True
    return m


def _rhs(phi: ScalarField, u: VectorField | None, eps: float, well: DoubleWell) -> np.ndarray:
    lap = laplacian(phi, -1.0)
    out = lap.values - well.eval(phi.values)[1] / (eps * eps)
    if u is not None:
        g = gradient(phi, -1.0)
        out -= np.sum(u.values * g.values, axis=-1)
    return out


def step(
    state: SimState,
    cfg: ScenarioConfig,
    dt: float,
    u: VectorField | None = None,
    u_mid: VectorField | None = None,
    scheme: str = "euler",
) -> SimState:
    """One explicit step; boundary nodes keep their current (initial-trace) values.

    ``u``/``u_mid`` are the velocity samples at t and t + dt/2 (midpoint rule);
    omit them for transport-free runs. Aborts with the step index and worst
    node when the update leaves the physical range.
    """
    phi = state.phi
    bmask = _boundary_mask(phi.values.shape)
    if scheme == "euler":
        new = phi.values + dt * _rhs(phi, u, cfg.epsilon, cfg.well)
    else:
        k1 = _rhs(phi, u, cfg.epsilon, cfg.well)
        mid_vals = phi.values + 0.5 * dt * k1
        mid_vals[bmask] = phi.values[bmask]
        if not np.all(np.isfinite(mid_vals)):
            loc = tuple(int(v) for v in np.argwhere(~np.isfinite(mid_vals))[0])
            raise SolverAbort(state.step_index, loc, f"non-finite midpoint at node {loc}")
        mid = ScalarField(phi.spec, mid_vals)
        k2 = _rhs(mid, u_mid if u_mid is not None else u, cfg.epsilon, cfg.well)
        new = phi.values + dt * k2
    new[bmask] = phi.values[bmask]

    bad = ~np.isfinite(new)
    if np.any(bad):
        loc = tuple(int(v) for v in np.argwhere(bad)[0])
        raise SolverAbort(state.step_index, loc, f"non-finite value at node {loc} after step {state.step_index}")
    worst = int(np.argmax(np.abs(new)))
    loc = tuple(int(v) for v in np.unravel_index(worst, new.shape))
    if abs(new.flat[worst]) > PHI_ABORT:
        raise SolverAbort(
            state.step_index,
            loc,
            f"|phi| = {abs(new.flat[worst]):.4f} > {PHI_ABORT} at node {loc} after step "
            f"{state.step_index}: stability lost",
        )
    return SimState(state.t + dt, ScalarField(phi.spec, new), state.step_index + 1)


@dataclass
class RunResult:
    cfg: ScenarioConfig
    solver: SolverConfig
    dt: float
    n_steps: int
    trajectory: Trajectory
    rows: list[measures.DiagnosticsRow]
    probe: measures.HuiskenProbe
    snapshot_paths: list[str] = field(default_factory=list)

    @property
    def final_phi(self) -> ScalarField:
        return self.trajectory.frames[-1]


def _default_probe(cfg: ScenarioConfig, phi0: ScalarField) -> measures.HuiskenProbe:
    """Probe anchored at the strongest initial energy node, pulled inside the box."""
    mu = measures.EnergyMeasure.from_phase(phi0, cfg.epsilon, cfg.well)
    flat = int(np.argmax(mu.density.values))
    idx = np.unravel_index(flat, cfg.grid.nodes)
    mesh = cfg.grid.meshgrid()
    y = [float(mesh[k][idx]) for k in range(cfg.grid.dim)]
    d = min(cfg.inset_prime / 2.0, 0.25)
    for k in range(cfg.grid.dim):
        y[k] = min(max(y[k], cfg.grid.lo[k] + d), cfg.grid.hi[k] - d)
    return measures.HuiskenProbe.standard(y, cfg.t_end + 0.01, cfg.inset_prime)


def _sample_umax(cfg: ScenarioConfig, n_times: int = 9) -> float:
    pts = np.stack(cfg.grid.meshgrid(), axis=-1)
    worst = 0.0
    times = [0.0] if not cfg.transport.time_dependent else np.linspace(0.0, cfg.t_end, n_times)
    for t in times:
        u = cfg.transport.velocity(pts, float(t))
        worst = max(worst, float(np.max(np.sqrt(np.sum(u * u, axis=-1)))))
    return worst


def run(
    cfg: ScenarioConfig,
    solver: SolverConfig | None = None,
    out_dir: str | None = None,
) -> RunResult:
    """Integrate the scenario from 0 to T with scheduled diagnostics.

    The step count is rounded up to a whole number of diagnostics intervals,
    so the row count is n_steps / diag_every + 1 and the final time lands
    exactly on T. On abort, partial outputs are flushed before the exception
    propagates (carrying the rows computed so far).
    """
    solver = solver or SolverConfig()
    phi0 = build_initial_phase(cfg)
    u_max = _sample_umax(cfg)
    dt0 = stable_dt(cfg.grid.h, cfg.epsilon, u_max, cfg.well, cfg.grid.dim, solver.cfl)
    d = solver.diag_every
    n_steps = d * math.ceil(cfg.t_end / (dt0 * d))
    dt = cfg.t_end / n_steps
    n_frames = n_steps // d + 1
    if n_frames > solver.max_frames:
        raise ValueError(
            f"schedule would retain {n_frames} frames (> max_frames={solver.max_frames}); "
            f"increase diag_every or max_frames"
        )

    probe = _default_probe(cfg, phi0)
    traj = Trajectory(cfg, steps_between=d)
    rows: list[measures.DiagnosticsRow] = []
    snap_paths: list[str] = []

    pts = np.stack(cfg.grid.meshgrid(), axis=-1)
    static_u: VectorField | None = None
    if not cfg.transport.time_dependent:
        vals = cfg.transport.velocity(pts, 0.0)
        if np.any(vals):
            static_u = VectorField(cfg.grid, vals)
        use_transport = static_u is not None
    else:
        use_transport = True

    center = tuple(0.5 * (l + h) for l, h in zip(cfg.grid.lo, cfg.grid.hi))
    omega_p = cfg.omega_prime()
    mask_p = measures.region_mask(cfg.grid, omega_p)
    ratio_radii = measures.ratio_lattice_radii(cfg.grid, cfg.inset_prime)
    g_weight = None
    if cfg.transport.is_gradient and not cfg.transport.time_dependent:
        g_weight = np.exp(-cfg.transport.g(pts, 0.0))

    if out_dir is not None:
        os.makedirs(os.path.join(out_dir, "snapshots"), exist_ok=True)

    prev_kernel_vals: dict[str, float] = {}

    def make_row(state: SimState, running_max: float) -> measures.DiagnosticsRow:
        phi = state.phi
        t = state.t
        mu = measures.EnergyMeasure.from_phase(phi, cfg.epsilon, cfg.well)
        xi = measures.discrepancy_field(phi, cfg.epsilon, cfg.well)
        xi_p = np.maximum(xi.values, 0.0)
        ratio = measures.density_ratio(mu, region=omega_p, stride=4, radii=ratio_radii)
        iset = extract_interface(phi)
        radius = -1.0
        if not iset.is_empty:
            radius = radius_estimate(iset, center)[0]
        lap = laplacian(phi, -1.0)
        drive = lap.values - cfg.well.eval(phi.values)[1] / cfg.epsilon**2
        vel = integrate(ScalarField(cfg.grid, cfg.epsilon * drive**2), omega_p)
        if g_weight is not None:
            weight = g_weight
        elif cfg.transport.is_gradient:
            weight = np.exp(-cfg.transport.g(pts, t))
        else:
            weight = 1.0
        gron = integrate(ScalarField(cfg.grid, weight * mu.density.values))
        rho = measures.kernel_field(probe, cfg.grid, t)
        i_rho = integrate(ScalarField(cfg.grid, rho.values * mu.density.values))
        if use_transport:
            uv = static_u.values if static_u is not None else cfg.transport.velocity(pts, t)
            u2 = np.sum(uv * uv, axis=-1)
            i_u = 0.5 * integrate(ScalarField(cfg.grid, rho.values * u2 * mu.density.values))
        else:
            i_u = 0.0
        i_xi = integrate(ScalarField(cfg.grid, xi.values * rho.values)) / (2.0 * (probe.s - t))
        if prev_kernel_vals:
            dt_row = t - prev_kernel_vals["t"]
            resid = (i_rho - prev_kernel_vals["i_rho"]) - 0.5 * dt_row * (
                i_u + prev_kernel_vals["i_u"] + i_xi + prev_kernel_vals["i_xi"]
            )
        else:
            resid = 0.0
        prev_kernel_vals.update(t=t, i_rho=i_rho, i_u=i_u, i_xi=i_xi)
        return measures.DiagnosticsRow(
            t=t,
            total_energy=mu.total,
            density_ratio_max=ratio.max_ratio,
            sup_xi=float(np.max(xi.values[mask_p])),
            sup_xi_pos=float(np.max(xi_p[mask_p])),
            pos_xi_integral=integrate(ScalarField(cfg.grid, xi_p), omega_p),
            interface_radius=radius,
            monotonicity_residual=resid,
            gronwall_factor=gron,
            velocity_sq=vel,
            max_abs_phi=running_max,
        )

    def snapshot(state: SimState) -> None:
        if out_dir is None:
            return
        path = os.path.join(out_dir, "snapshots", f"step_{state.step_index:08d}.afld")
        write_field(path, state.phi, state.t)
        snap_paths.append(path)

    state = SimState(0.0, phi0, 0)
    running_max = float(np.max(np.abs(phi0.values)))
    traj.append(state.t, state.phi)
    rows.append(make_row(state, running_max))
    snapshot(state)

    try:
        for k in range(1, n_steps + 1):
            if cfg.transport.time_dependent:
                u = VectorField(cfg.grid, cfg.transport.velocity(pts, state.t))
                u_mid = (
                    VectorField(cfg.grid, cfg.transport.velocity(pts, state.t + 0.5 * dt))
                    if solver.scheme == "rk2"
                    else None
                )
            else:
                u = static_u
                u_mid = static_u
            state = step(state, cfg, dt, u=u, u_mid=u_mid, scheme=solver.scheme)
            running_max = max(running_max, float(np.max(np.abs(state.phi.values))))
            if k % d == 0:
                traj.append(state.t, state.phi)
                rows.append(make_row(state, running_max))
                running_max = float(np.max(np.abs(state.phi.values)))
            if solver.snap_every and k % solver.snap_every == 0:
                snapshot(state)
            elif k == n_steps and (not solver.snap_every or k % solver.snap_every):
                snapshot(state)
    except SolverAbort:
        if out_dir is not None:
            _write_rows(out_dir, rows)
        raise

    if out_dir is not None:
        _write_rows(out_dir, rows)
    return RunResult(cfg, solver, dt, n_steps, traj, rows, probe, snap_paths)


def _write_rows(out_dir: str, rows: list[measures.DiagnosticsRow]) -> None:
    path = os.path.join(out_dir, "diagnostics.csv")
    with open(path, "w") as fh:
        fh.write(measures.DiagnosticsRow.CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv_line() + "\n")
