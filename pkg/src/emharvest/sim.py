"""Time-domain integration of the harvester's equation of motion.

The relative coordinate z (mass motion minus base motion) obeys

    m z'' + (c_p + c_e) z' + k z = m Y w^2 sin(w t)

for a base displacement Y sin(w t).  The integrator is the classical
fourth-order Runge-Kutta scheme with a fixed step, started from rest, so
traces are exactly reproducible.  Steady-state numbers are taken from the
tail of the trace after the start-up transient has died away.

This module shares only the damping-coefficient conversion with
:mod:`emharvest.model`; the response itself is computed numerically so the
two routes can be used to check each other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import simpson

from .model import (
    CoilCircuit,
    Excitation,
    GeneratorParams,
    em_damping_coefficient,
    natural_frequency,
)

__all__ = [
    "SimConfig",
    "TraceSummary",
    "Trace",
    "SimulationNotSettled",
    "SweepPointError",
    "simulate",
    "frequency_sweep_sim",
]

# resolution floor for the drive period; coarser steps are rejected
_MIN_STEPS_PER_PERIOD = 50

_ENERGY_RESIDUAL_LIMIT = 1e-3


class SimulationNotSettled(RuntimeError):
    """Raised when a run ends before the response reaches steady state."""


class SweepPointError(RuntimeError):
    """Failure at a single sweep frequency; carries the offending omega."""

    def __init__(self, omega_rad_per_s: float, cause: Exception):
        super().__init__(f"sweep point at {omega_rad_per_s} rad/s failed: {cause}")
        self.omega_rad_per_s = omega_rad_per_s
        self.cause = cause


@dataclass(frozen=True)
class SimConfig:
    """Fixed-step integrator settings.

    settle_fraction is the leading fraction of the trace discarded before
    steady-state statistics are taken; the rest is the measurement window.
    """

    dt_s: float
    duration_s: float
    settle_fraction: float = 0.8

    def __post_init__(self) -> None:
        if not self.dt_s > 0.0:
            raise ValueError(f"dt_s must be > 0, got {self.dt_s}")
        if not self.duration_s > 10.0 * self.dt_s:
            raise ValueError(
                f"duration_s must exceed 10*dt_s; got duration_s={self.duration_s} "
                f"with dt_s={self.dt_s}"
            )
        if not 0.0 <= self.settle_fraction < 1.0:
            raise ValueError(
                f"settle_fraction must be in [0, 1), got {self.settle_fraction}"
            )

    @classmethod
    def suggest(
        cls,
        g: GeneratorParams,
        c: CoilCircuit | None,
        omega_rad_per_s: float,
        steps_per_period: int = 64,
    ) -> "SimConfig":
        """Pick a step and duration suited to the device and drive frequency.

        The step resolves the faster of the drive and natural periods; the
        duration spans 14 damping time constants 1/(zeta_t*w_n), so the
        start-up transient is below 1e-4 of steady state when the default
        measurement window opens, with a 30-period floor for heavy damping.
        """
        if steps_per_period < _MIN_STEPS_PER_PERIOD:
            raise ValueError(
                f"steps_per_period must be >= {_MIN_STEPS_PER_PERIOD}, "
                f"got {steps_per_period}"
            )
        if not omega_rad_per_s > 0.0:
            raise ValueError(f"omega_rad_per_s must be > 0, got {omega_rad_per_s}")
        wn = natural_frequency(g)
        zeta_t = g.zeta_parasitic
        if c is not None:
            c_e = em_damping_coefficient(c, omega_rad_per_s)
            zeta_t += c_e / (2.0 * g.mass_kg * wn)
        if not zeta_t > 0.0:
            raise ValueError("an undamped run never settles; zeta_t must be > 0")
        dt = 2.0 * math.pi / max(omega_rad_per_s, wn) / steps_per_period
        duration = max(
            14.0 / (zeta_t * wn),
            30.0 * 2.0 * math.pi / omega_rad_per_s,
        )
        return cls(dt_s=dt, duration_s=duration)


@dataclass(frozen=True)
class TraceSummary:
    """Steady-state figures extracted from the tail of one run.

    energy_balance_residual is the relative mismatch between the work done
    by the base and the sum of dissipated plus stored energy over the whole
    trace; it is an integrator health check, not a physical output.
    """

    z_amp_m: float
    v_rel_rms_m_per_s: float
    emf_rms_v: float
    p_load_avg_w: float
    p_parasitic_avg_w: float
    energy_balance_residual: float
    phase_rad: float

    def __post_init__(self) -> None:
        for name in (
            "z_amp_m",
            "v_rel_rms_m_per_s",
            "emf_rms_v",
            "p_load_avg_w",
            "p_parasitic_avg_w",
            "energy_balance_residual",
        ):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class Trace:
    """Full sampled time histories; all arrays share the t_s time base."""

    t_s: np.ndarray
    z_m: np.ndarray
    zdot_m_s: np.ndarray
    emf_v: np.ndarray
    p_load_w: np.ndarray


def _refined_peaks(zw: np.ndarray) -> list[float]:
    """Positive-peak amplitudes with 3-point parabolic refinement."""
    idx = (
        np.flatnonzero(
            (zw[1:-1] >= zw[:-2]) & (zw[1:-1] > zw[2:]) & (zw[1:-1] > 0.0)
        )
        + 1
    )
    peaks: list[float] = []
    for i in idx:
        y0, y1, y2 = zw[i - 1], zw[i], zw[i + 1]
        a = 0.5 * (y0 + y2) - y1
        b = 0.5 * (y2 - y0)
        peaks.append(float(y1 - b * b / (4.0 * a)) if a < 0.0 else float(y1))
    return peaks


def _fit_phase(tw: np.ndarray, zw: np.ndarray, w: float) -> float:
    """Phase lag of zw behind sin(w t), from a least-squares sinusoid fit."""
    sw = np.sin(w * tw)
    cw = np.cos(w * tw)
    sss = float(np.dot(sw, sw))
    scc = float(np.dot(cw, cw))
    ssc = float(np.dot(sw, cw))
    bs = float(np.dot(zw, sw))
    bc = float(np.dot(zw, cw))
    det = sss * scc - ssc * ssc
    a_fit = (bs * scc - bc * ssc) / det
    b_fit = (bc * sss - bs * ssc) / det
    phase = math.atan2(-b_fit, a_fit)
    if phase < -0.5 * math.pi:  # wrapped just past pi
        phase += 2.0 * math.pi
    return min(max(phase, 0.0), math.pi)


def simulate(
    g: GeneratorParams,
    c: CoilCircuit,
    e: Excitation,
    cfg: SimConfig,
    return_trace: bool = False,
) -> TraceSummary | tuple[TraceSummary, Trace]:
    """Integrate one run and summarize its steady state.

    The electrical damping coefficient is held constant over the run (a
    linear circuit model); load power is the averaged instantaneous
    emf^2 * R_load / (R_load + R_coil)^2.  Runs whose displacement peaks
    still drift by more than 1% per period at the end raise
    SimulationNotSettled instead of returning a misleading summary.
    """
    w = e.omega_rad_per_s
    period = 2.0 * math.pi / w
    if cfg.dt_s > period / _MIN_STEPS_PER_PERIOD:
        raise ValueError(
            f"dt_s={cfg.dt_s} resolves the {period} s drive period with fewer "
            f"than {_MIN_STEPS_PER_PERIOD} steps"
        )
    wn = natural_frequency(g)
    c_e = em_damping_coefficient(c, w)
    c_p = 2.0 * g.mass_kg * wn * g.zeta_parasitic
    zeta_t = (c_p + c_e) / (2.0 * g.mass_kg * wn)
    if not 0.0 < zeta_t < 1.0:
        raise ValueError(f"total damping ratio must be in (0, 1), got {zeta_t}")
    q_t = 1.0 / (2.0 * zeta_t)
    if q_t > 200.0 and cfg.duration_s < 10.0 * (2.0 * q_t / wn):
        warnings.warn(
            f"run of {cfg.duration_s:.3g} s is shorter than the "
            f"{10.0 * 2.0 * q_t / wn:.3g} s settling guideline for Q_T={q_t:.0f}",
            stacklevel=2,
        )

    n_steps = int(round(cfg.duration_s / cfg.dt_s))
    dt = cfg.dt_s
    t = np.arange(n_steps + 1) * dt

    if e.amplitude_m == 0.0:
        zeros = np.zeros(n_steps + 1)
        summary = TraceSummary(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        if return_trace:
            return summary, Trace(t, zeros, np.zeros(n_steps + 1), np.zeros(n_steps + 1), np.zeros(n_steps + 1))
        return summary

    forcing = e.amplitude_m * w * w  # base forcing per unit mass
    two_zw = 2.0 * zeta_t * wn
    wn2 = wn * wn
    sin = math.sin
    half = 0.5 * dt
    sixth = dt / 6.0

    z = 0.0
    v = 0.0
    zs = [0.0]
    vs = [0.0]
    for i in range(n_steps):
        t0 = i * dt
        f0 = forcing * sin(w * t0)
        fm = forcing * sin(w * (t0 + half))
        f1 = forcing * sin(w * (t0 + dt))
        a1 = f0 - two_zw * v - wn2 * z
        z2 = z + half * v
        v2 = v + half * a1
        a2 = fm - two_zw * v2 - wn2 * z2
        z3 = z + half * v2
        v3 = v + half * a2
        a3 = fm - two_zw * v3 - wn2 * z3
        z4 = z + dt * v3
        v4 = v + dt * a3
        a4 = f1 - two_zw * v4 - wn2 * z4
        z += sixth * (v + 2.0 * (v2 + v3) + v4)
        v += sixth * (a1 + 2.0 * (a2 + a3) + a4)
        zs.append(z)
        vs.append(v)

    z_arr = np.asarray(zs)
    v_arr = np.asarray(vs)

    i0 = int(cfg.settle_fraction * n_steps)
    zw = z_arr[i0:]
    vw = v_arr[i0:]
    tw = t[i0:]

    peaks = _refined_peaks(zw)
    if len(peaks) < 2:
        raise SimulationNotSettled(
            "measurement window holds fewer than two displacement peaks; "
            "increase duration_s or lower settle_fraction"
        )
    drift = abs(peaks[-1] - peaks[-2]) / abs(peaks[-1])
    if drift > 0.01:
        raise SimulationNotSettled(
            f"amplitude still drifting {drift:.2%} per period at end of run; "
            f"increase duration_s"
        )
    z_amp = float(np.mean(peaks))
    v_rms = float(np.sqrt(np.mean(vw * vw)))
    phase = _fit_phase(tw, zw, w)

    coupling = c.coupling_v_s_per_m
    emf_arr = coupling * v_arr
    emf_rms = coupling * v_rms
    if math.isinf(c.r_load_ohm) or coupling == 0.0:
        p_load_arr = np.zeros_like(v_arr)
    else:
        p_load_arr = emf_arr * emf_arr * (
            c.r_load_ohm / (c.r_load_ohm + c.r_coil_ohm) ** 2
        )
    p_load_avg = float(np.mean(p_load_arr[i0:]))
    p_par_avg = float(np.mean(c_p * vw * vw))

    # bookkeeping over the whole trace, including the transient
    w_in = float(simpson(g.mass_kg * forcing * np.sin(w * t) * v_arr, x=t))
    w_par = float(simpson(c_p * v_arr * v_arr, x=t))
    w_el = float(simpson(c_e * v_arr * v_arr, x=t))
    e_mech = (
        0.5 * g.mass_kg * v_arr[-1] ** 2
        + 0.5 * g.stiffness_n_per_m * z_arr[-1] ** 2
    )
    scale = max(abs(w_in), w_par + w_el + abs(e_mech))
    residual = abs(w_in - w_par - w_el - e_mech) / scale if scale > 0.0 else 0.0
    if residual >= _ENERGY_RESIDUAL_LIMIT:
        raise ValueError(
            f"energy balance residual {residual:.2e} exceeds "
            f"{_ENERGY_RESIDUAL_LIMIT}; reduce dt_s"
        )

    summary = TraceSummary(
        z_amp_m=z_amp,
        v_rel_rms_m_per_s=v_rms,
        emf_rms_v=emf_rms,
        p_load_avg_w=p_load_avg,
        p_parasitic_avg_w=p_par_avg,
        energy_balance_residual=residual,
        phase_rad=phase,
    )
    if return_trace:
        return summary, Trace(t, z_arr, v_arr, emf_arr, p_load_arr)
    return summary


def frequency_sweep_sim(
    g: GeneratorParams,
    c: CoilCircuit,
    omegas: Iterable[float] | Sequence[float],
    accel_m_s2: float,
    cfg: SimConfig | None = None,
    convention: str = "peak",
    open_circuit: bool = False,
) -> list[tuple[float, TraceSummary]]:
    """Run one simulation per drive frequency at fixed base acceleration.

    Open-circuit mode disconnects the load (no electrical damping, no load
    power) while still reporting the induced EMF.  With cfg=None each point
    gets its own SimConfig.suggest, so lightly damped points are given the
    longer runs they need.
    """
    omega_list = [float(o) for o in omegas]
    if not omega_list:
        raise ValueError("omegas must be non-empty")
    if any(b <= a for a, b in zip(omega_list, omega_list[1:])):
        raise ValueError("omegas must be strictly increasing")
    circuit = replace(c, r_load_ohm=math.inf) if open_circuit else c
    out: list[tuple[float, TraceSummary]] = []
    for omega in omega_list:
        exc = Excitation.from_acceleration(accel_m_s2, omega, convention)
        point_cfg = cfg if cfg is not None else SimConfig.suggest(g, circuit, omega)
        try:
            out.append((omega, simulate(g, circuit, exc, point_cfg)))
        except (ValueError, SimulationNotSettled) as err:
            raise SweepPointError(omega, err) from err
    return out
