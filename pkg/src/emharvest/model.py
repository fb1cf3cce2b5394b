"""Closed-form steady-state model of a base-excited inertial generator.

The device is a proof mass m on a spring k inside a vibrating frame.  Losses
are split into a parasitic (mechanical) damping ratio and an electrical
damping ratio produced by the coil/magnet transduction.  All functions work
in SI units and take peak displacement amplitudes; RMS accelerations are
converted at the boundary (see :meth:`Excitation.from_acceleration`).

Damping ratios zeta are the canonical representation; viscous coefficients
c = 2*m*omega_n*zeta are derived views.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "GeneratorParams",
    "CoilCircuit",
    "Excitation",
    "ResponsePoint",
    "DampingDecomposition",
    "LimitCheck",
    "natural_frequency",
    "displacement_response",
    "dissipated_power",
    "max_resonant_power",
    "load_power",
    "em_damping_coefficient",
    "damping_ratio_from_coefficient",
    "damping_coefficient_from_ratio",
    "optimal_load",
    "max_avg_load_power",
    "compose_q_factors",
    "base_amplitude_from_acceleration",
    "load_voltage_from_power",
    "check_displacement_limit",
    "evaluate_response",
]

_CONVENTIONS = ("peak", "rms")


@dataclass(frozen=True)
class GeneratorParams:
    """Lumped mechanical parameters of the spring-mass resonator.

    mass_kg              proof (seismic) mass
    stiffness_n_per_m    suspension spring constant
    zeta_parasitic       mechanical loss ratio (air damping, clamping, wiring)
    displacement_limit_m optional proof-mass travel limit; None means unlimited
    """

    mass_kg: float
    stiffness_n_per_m: float
    zeta_parasitic: float
    displacement_limit_m: float | None = None

    def __post_init__(self) -> None:
        if not self.mass_kg > 0.0:
            raise ValueError(f"mass_kg must be > 0, got {self.mass_kg}")
        if not self.stiffness_n_per_m > 0.0:
            raise ValueError(
                f"stiffness_n_per_m must be > 0, got {self.stiffness_n_per_m}"
            )
        if not 0.0 <= self.zeta_parasitic < 1.0:
            raise ValueError(
                f"zeta_parasitic must be in [0, 1), got {self.zeta_parasitic}"
            )
        if self.displacement_limit_m is not None and not self.displacement_limit_m > 0.0:
            raise ValueError(
                f"displacement_limit_m must be > 0 when set, got {self.displacement_limit_m}"
            )


@dataclass(frozen=True)
class CoilCircuit:
    """Electromagnetic transduction parameters.

    turns          coil turn count
    side_length_m  effective side length of the (assumed square) coil
    flux_density_t magnetic flux density seen by the coil, tesla
    r_coil_ohm     coil series resistance
    l_coil_h       coil inductance, henry (0 for the purely resistive model)
    r_load_ohm     external load resistance; math.inf selects open circuit
    """

    turns: int
    side_length_m: float
    flux_density_t: float
    r_coil_ohm: float
    l_coil_h: float = 0.0
    r_load_ohm: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.turns, int) or self.turns < 0:
            raise ValueError(f"turns must be a non-negative integer, got {self.turns!r}")
        if self.side_length_m < 0.0:
            raise ValueError(f"side_length_m must be >= 0, got {self.side_length_m}")
        if self.flux_density_t < 0.0:
            raise ValueError(f"flux_density_t must be >= 0, got {self.flux_density_t}")
        if self.r_coil_ohm < 0.0:
            raise ValueError(f"r_coil_ohm must be >= 0, got {self.r_coil_ohm}")
        if self.l_coil_h < 0.0:
            raise ValueError(f"l_coil_h must be >= 0, got {self.l_coil_h}")
        if not self.r_load_ohm > 0.0:
            raise ValueError(f"r_load_ohm must be > 0, got {self.r_load_ohm}")

    @property
    def coupling_v_s_per_m(self) -> float:
        """EMF per unit relative velocity: turns * side length * flux density."""
        return self.turns * self.side_length_m * self.flux_density_t


@dataclass(frozen=True)
class Excitation:
    """Sinusoidal base vibration y(t) = Y sin(w t), peak amplitude Y.

    The base acceleration amplitude w^2 * Y is always derived, never stored.
    """

    amplitude_m: float
    omega_rad_per_s: float

    def __post_init__(self) -> None:
        if self.amplitude_m < 0.0:
            raise ValueError(f"amplitude_m must be >= 0, got {self.amplitude_m}")
        if not self.omega_rad_per_s > 0.0:
            raise ValueError(
                f"omega_rad_per_s must be > 0, got {self.omega_rad_per_s}"
            )

    @property
    def acceleration_m_s2(self) -> float:
        """Peak base acceleration amplitude, w^2 * Y."""
        return self.omega_rad_per_s**2 * self.amplitude_m

    @classmethod
    def from_acceleration(
        cls, accel_m_s2: float, omega_rad_per_s: float, convention: str = "peak"
    ) -> "Excitation":
        """Build an excitation from a base acceleration.

        An RMS acceleration is converted to the peak amplitude the response
        equations use (multiplied by sqrt(2)); a peak acceleration is used
        directly.
        """
        if convention not in _CONVENTIONS:
            raise ValueError(f"convention must be one of {_CONVENTIONS}, got {convention!r}")
        if accel_m_s2 < 0.0:
            raise ValueError(f"accel_m_s2 must be >= 0, got {accel_m_s2}")
        peak = accel_m_s2 * math.sqrt(2.0) if convention == "rms" else accel_m_s2
        return cls(
            amplitude_m=peak / omega_rad_per_s**2 if omega_rad_per_s > 0 else 0.0,
            omega_rad_per_s=omega_rad_per_s,
        )


@dataclass(frozen=True)
class ResponsePoint:
    """Steady-state outputs at one drive frequency and load.

    z_amplitude_m        peak relative displacement of the proof mass
    phase_rad            lag of the relative motion behind the base, [0, pi]
    p_dissipated_w       average power absorbed by all damping
    p_load_w             average power delivered to the external load
    p_total_electrical_w average power in load plus coil resistance
    v_load_rms_v         RMS voltage across the load
    """

    z_amplitude_m: float
    phase_rad: float
    p_dissipated_w: float
    p_load_w: float
    p_total_electrical_w: float
    v_load_rms_v: float

    def __post_init__(self) -> None:
        for name in ("z_amplitude_m", "p_dissipated_w", "p_load_w",
                     "p_total_electrical_w", "v_load_rms_v"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0.0 <= self.phase_rad <= math.pi:
            raise ValueError(f"phase_rad must be in [0, pi], got {self.phase_rad}")
        # tiny slack for float round-off in the resistive split
        if self.p_load_w > self.p_total_electrical_w * (1.0 + 1e-12):
            raise ValueError(
                f"p_load_w ({self.p_load_w}) exceeds p_total_electrical_w "
                f"({self.p_total_electrical_w})"
            )


@dataclass(frozen=True)
class DampingDecomposition:
    """Loaded, open-circuit and electrical-only quality factors with the
    matching damping ratios (zeta = 1 / (2 Q) throughout)."""

    q_total: float
    q_open_circuit: float
    q_electrical: float
    zeta_p: float
    zeta_e: float
    zeta_t: float

    def __post_init__(self) -> None:
        for name in ("q_total", "q_open_circuit", "q_electrical"):
            q = getattr(self, name)
            if not (math.isfinite(q) and q > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {q}")
        if self.q_electrical < self.q_total or self.q_open_circuit < self.q_total:
            raise ValueError("loaded Q cannot exceed either contributing Q")
        lhs = 1.0 / self.q_total
        rhs = 1.0 / self.q_open_circuit + 1.0 / self.q_electrical
        if abs(lhs - rhs) > 1e-9 * lhs:
            raise ValueError("1/q_total != 1/q_open_circuit + 1/q_electrical")
        for zeta, q in ((self.zeta_p, self.q_open_circuit),
                        (self.zeta_e, self.q_electrical),
                        (self.zeta_t, self.q_total)):
            if zeta != 1.0 / (2.0 * q):
                raise ValueError("zeta fields must equal 1/(2Q) exactly")


@dataclass(frozen=True)
class LimitCheck:
    """Outcome of a proof-mass travel check.

    margin_m is (limit - predicted amplitude); None when no limit is set.
    """

    passed: bool
    margin_m: float | None


def natural_frequency(g: GeneratorParams) -> float:
    """Undamped natural frequency sqrt(k / m), rad/s."""
    return math.sqrt(g.stiffness_n_per_m / g.mass_kg)


def _check_zeta_range(zeta_total: float) -> None:
    if not 0.0 <= zeta_total < 1.0:
        raise ValueError(f"zeta_total must be in [0, 1), got {zeta_total}")


def displacement_response(
    g: GeneratorParams, zeta_total: float, e: Excitation
) -> tuple[float, float]:
    """Peak relative-displacement amplitude and phase lag at one frequency.

    amplitude = Y w^2 / sqrt((k/m - w^2)^2 + (c_T w / m)^2)  with
    c_T = 2 m w_n zeta_total.  The phase branch is fixed to [0, pi] so it
    runs continuously from 0 (w << w_n) through pi/2 at resonance to pi.

    zeta_total = 0 is accepted off resonance (finite undamped response) and
    rejected at exact resonance, where the amplitude is unbounded.
    """
    _check_zeta_range(zeta_total)
    w = e.omega_rad_per_s
    wn = natural_frequency(g)
    if zeta_total == 0.0 and w == wn:
        raise ValueError("undamped response is unbounded at exact resonance")
    num = e.amplitude_m * w * w
    den = math.hypot(wn * wn - w * w, 2.0 * zeta_total * wn * w)
    phase = math.atan2(2.0 * zeta_total * wn * w, wn * wn - w * w)
    return num / den, phase


def dissipated_power(g: GeneratorParams, zeta_total: float, e: Excitation) -> float:
    """Average power absorbed by the total damping at one frequency, watts.

    Equals m zeta_T Y^2 r^3 w^3 / ((1 - r^2)^2 + (2 zeta_T r)^2) with
    r = w / w_n; at resonance this reduces to the max_resonant_power value.
    """
    if not 0.0 < zeta_total < 1.0:
        raise ValueError(f"zeta_total must be in (0, 1), got {zeta_total}")
    w = e.omega_rad_per_s
    r = w / natural_frequency(g)
    den = (1.0 - r * r) ** 2 + (2.0 * zeta_total * r) ** 2
    return g.mass_kg * zeta_total * e.amplitude_m**2 * r**3 * w**3 / den


def _require_resonant(g: GeneratorParams, e: Excitation) -> float:
    wn = natural_frequency(g)
    if abs(e.omega_rad_per_s - wn) > 1e-9 * wn:
        raise ValueError(
            f"excitation frequency {e.omega_rad_per_s} rad/s must equal the "
            f"natural frequency {wn} rad/s"
        )
    return wn


def max_resonant_power(g: GeneratorParams, zeta_total: float, e: Excitation) -> float:
    """Total power absorbed when driven exactly at resonance, watts.

    m Y^2 w_n^3 / (4 zeta_T).  Linear in mass, cubic in frequency at fixed
    base amplitude.
    """
    if not 0.0 < zeta_total < 1.0:
        raise ValueError(f"zeta_total must be in (0, 1), got {zeta_total}")
    wn = _require_resonant(g, e)
    return g.mass_kg * e.amplitude_m**2 * wn**3 / (4.0 * zeta_total)


def load_power(
    g: GeneratorParams, zeta_p: float, zeta_e: float, e: Excitation
) -> float:
    """Power absorbed by the electrical damping at resonance, watts.

    m zeta_e Y^2 w_n^3 / (4 (zeta_p + zeta_e)^2).  For a fixed zeta_p this
    is maximized at zeta_e = zeta_p.  Coil resistance keeps part of this
    power from the load; see max_avg_load_power for the delivered optimum.
    """
    if zeta_p < 0.0 or zeta_e < 0.0:
        raise ValueError("damping ratios must be >= 0")
    if zeta_p + zeta_e <= 0.0:
        raise ValueError("zeta_p + zeta_e must be > 0")
    wn = _require_resonant(g, e)
    return (
        g.mass_kg * zeta_e * e.amplitude_m**2 * wn**3
        / (4.0 * (zeta_p + zeta_e) ** 2)
    )


def em_damping_coefficient(c: CoilCircuit, omega_rad_per_s: float) -> float:
    """Viscous damping produced by the coil circuit, N*s/m.

    (N l B)^2 divided by the magnitude of the series impedance
    R_load + R_coil + j w L_coil.  With zero inductance this is the plain
    resistive expression; an infinite load resistance gives 0 (open circuit).
    """
    mag = math.hypot(c.r_load_ohm + c.r_coil_ohm, omega_rad_per_s * c.l_coil_h)
    if mag == 0.0:
        raise ValueError("total circuit impedance must be nonzero")
    coupling = c.coupling_v_s_per_m
    return coupling * coupling / mag


def damping_ratio_from_coefficient(c_damp: float, g: GeneratorParams) -> float:
    """Convert a viscous coefficient (N*s/m) to a dimensionless ratio."""
    return c_damp / (2.0 * g.mass_kg * natural_frequency(g))


def damping_coefficient_from_ratio(zeta: float, g: GeneratorParams) -> float:
    """Convert a dimensionless damping ratio to a viscous coefficient."""
    return 2.0 * g.mass_kg * natural_frequency(g) * zeta


def optimal_load(c: CoilCircuit, c_parasitic: float) -> float:
    """Load resistance maximizing delivered power, ohms.

    R_coil + (N l B)^2 / c_parasitic, where c_parasitic is the parasitic
    viscous coefficient in N*s/m.
    """
    if not c_parasitic > 0.0:
        raise ValueError(f"c_parasitic must be > 0, got {c_parasitic}")
    coupling = c.coupling_v_s_per_m
    return c.r_coil_ohm + coupling * coupling / c_parasitic


def max_avg_load_power(
    g: GeneratorParams,
    zeta_p: float,
    e: Excitation,
    r_coil_ohm: float,
    r_load_ohm: float,
) -> float:
    """Best-case average power delivered to the load at resonance, watts.

    (m w_n^3 Y^2 / (16 zeta_p)) * (1 - R_coil / R_load), valid at the
    optimal load resistance.  A lossless coil (R_coil = 0) leaves the full
    m w_n^3 Y^2 / (16 zeta_p).
    """
    if not zeta_p > 0.0:
        raise ValueError(f"zeta_p must be > 0, got {zeta_p}")
    if not r_load_ohm > 0.0:
        raise ValueError(f"r_load_ohm must be > 0, got {r_load_ohm}")
    if r_coil_ohm < 0.0:
        raise ValueError(f"r_coil_ohm must be >= 0, got {r_coil_ohm}")
    wn = _require_resonant(g, e)
    return (
        g.mass_kg * wn**3 * e.amplitude_m**2 / (16.0 * zeta_p)
        * (1.0 - r_coil_ohm / r_load_ohm)
    )


def compose_q_factors(
    q_total: float | None = None,
    q_open_circuit: float | None = None,
    q_electrical: float | None = None,
) -> DampingDecomposition:
    """Complete a quality-factor decomposition from exactly two known values.

    The loaded, open-circuit and electrical-only factors are tied together
    by 1/Q_T = 1/Q_OC + 1/Q_E; the missing one is solved for and every
    damping ratio is filled in as 1/(2Q).  Infinite sentinels are rejected,
    as are pairs that would imply a negative third factor.
    """
    given = {
        "q_total": q_total,
        "q_open_circuit": q_open_circuit,
        "q_electrical": q_electrical,
    }
    provided = {k: v for k, v in given.items() if v is not None}
    if len(provided) != 2:
        raise ValueError(
            f"exactly two of (q_total, q_open_circuit, q_electrical) must be "
            f"given, got {sorted(provided)}"
        )
    for name, q in provided.items():
        if not (math.isfinite(q) and q > 0.0):
            raise ValueError(f"{name} must be finite and > 0, got {q}")

    if q_total is None:
        q_total = 1.0 / (1.0 / q_open_circuit + 1.0 / q_electrical)
    elif q_electrical is None:
        if q_total >= q_open_circuit:
            raise ValueError(
                f"q_total ({q_total}) must be below q_open_circuit "
                f"({q_open_circuit}) to leave room for electrical damping"
            )
        q_electrical = 1.0 / (1.0 / q_total - 1.0 / q_open_circuit)
    else:
        if q_total >= q_electrical:
            raise ValueError(
                f"q_total ({q_total}) must be below q_electrical ({q_electrical})"
            )
        q_open_circuit = 1.0 / (1.0 / q_total - 1.0 / q_electrical)

    return DampingDecomposition(
        q_total=q_total,
        q_open_circuit=q_open_circuit,
        q_electrical=q_electrical,
        zeta_p=1.0 / (2.0 * q_open_circuit),
        zeta_e=1.0 / (2.0 * q_electrical),
        zeta_t=1.0 / (2.0 * q_total),
    )


def base_amplitude_from_acceleration(
    accel_m_s2: float, omega_rad_per_s: float, convention: str = "peak"
) -> float:
    """Base displacement amplitude A / w^2 for an acceleration amplitude A.

    The conversion is linear, so the amplitude keeps the convention of the
    input (peak in, peak out; RMS in, RMS out).
    """
    if convention not in _CONVENTIONS:
        raise ValueError(f"convention must be one of {_CONVENTIONS}, got {convention!r}")
    if not omega_rad_per_s > 0.0:
        raise ValueError(f"omega_rad_per_s must be > 0, got {omega_rad_per_s}")
    return accel_m_s2 / omega_rad_per_s**2


def load_voltage_from_power(p_load_w: float, r_load_ohm: float) -> float:
    """RMS load voltage sqrt(P * R_load) for an average load power P."""
    if not r_load_ohm > 0.0:
        raise ValueError(f"r_load_ohm must be > 0, got {r_load_ohm}")
    if p_load_w < 0.0:
        raise ValueError(f"p_load_w must be >= 0, got {p_load_w}")
    return math.sqrt(p_load_w * r_load_ohm)


def check_displacement_limit(g: GeneratorParams, predicted_z_m: float) -> LimitCheck:
    """Check a predicted proof-mass amplitude against the travel limit."""
    if g.displacement_limit_m is None:
        return LimitCheck(passed=True, margin_m=None)
    margin = g.displacement_limit_m - predicted_z_m
    return LimitCheck(passed=predicted_z_m <= g.displacement_limit_m, margin_m=margin)


def evaluate_response(
    g: GeneratorParams, c: CoilCircuit, e: Excitation
) -> ResponsePoint:
    """Evaluate the full steady-state response at one frequency and load.

    The electrical damping coefficient is folded into the total damping for
    the motion; the extracted electrical power is then split between load
    and coil through the series circuit.  With nonzero coil inductance the
    damping magnitude approximation makes the resistively dissipated power
    differ slightly from the mechanically extracted power; they coincide
    for l_coil_h = 0.
    """
    w = e.omega_rad_per_s
    wn = natural_frequency(g)
    c_e = em_damping_coefficient(c, w)
    zeta_e = c_e / (2.0 * g.mass_kg * wn)
    zeta_t = g.zeta_parasitic + zeta_e
    amp, phase = displacement_response(g, zeta_t, e)
    if zeta_t > 0.0:
        p_diss = dissipated_power(g, zeta_t, e)
    else:
        p_diss = 0.0
    # series circuit: EMF drives R_load + R_coil (+ j w L_coil)
    emf_rms = c.coupling_v_s_per_m * amp * w / math.sqrt(2.0)
    if math.isinf(c.r_load_ohm):
        p_load = 0.0
        p_total_e = 0.0
        v_load = emf_rms  # no current, full EMF appears across the load
    else:
        z_mag = math.hypot(c.r_load_ohm + c.r_coil_ohm, w * c.l_coil_h)
        i_rms = emf_rms / z_mag if z_mag > 0.0 else 0.0
        p_load = i_rms * i_rms * c.r_load_ohm
        p_total_e = i_rms * i_rms * (c.r_load_ohm + c.r_coil_ohm)
        v_load = i_rms * c.r_load_ohm
    return ResponsePoint(
        z_amplitude_m=amp,
        phase_rad=phase,
        p_dissipated_w=p_diss,
        p_load_w=p_load,
        p_total_electrical_w=p_total_e,
        v_load_rms_v=v_load,
    )
