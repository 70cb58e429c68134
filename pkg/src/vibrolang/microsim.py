"""Classical microscopic dynamics of one or two vibrons coupled to the
discrete phonon chain, plus first-order scattering amplitudes.

The linear equations of motion are

    Qdot = nu P,     Pdot = -nu Q + sum_k alpha_k q_k,
    qdot_k = omega_k p_k,
    pdot_k = -omega_k q_k + alpha_k Q - gamma_k^ph p_k,

integrated with fixed-step RK4 (the system is linear; the stability region
is well characterized and RK4 keeps the brute-force oracle simple).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, InstabilityError, VariantError
from .model import (
    DiscreteBath,
    build_chain,
    chain_eigenmodes,
    pair_vibron_phonon_couplings,
    MoleculeParams,
)


@dataclass(frozen=True)
class TrajectoryConfig:
    """Integration settings.

    dt        : fixed RK4 step; must satisfy dt <= 2 pi / (20 omega_max)
    t_max     : horizon
    q0, p0    : initial vibron quadratures (per molecule for pair runs)
    thermal_phonons : sample phonon initial conditions from the classical
                      thermal distribution instead of starting at rest
    seed      : RNG seed recorded for reproducibility
    store_every : keep every n-th step in the output
    """

    dt: float | None = None
    t_max: float = 10.0
    q0: float | tuple[float, float] = 1.0
    p0: float | tuple[float, float] = 0.0
    thermal_phonons: bool = False
    seed: int = 0
    store_every: int = 1

    def resolved_dt(self, omega_max: float) -> float:
        dt = self.dt if self.dt is not None else 2.0 * np.pi / (40.0 * omega_max)
        if dt > 2.0 * np.pi / (20.0 * omega_max):
            raise ConfigError(
                f"dt={dt:g} exceeds the stability bound 2pi/(20 omega_max)"
            )
        if self.t_max <= 0:
            raise ConfigError("t_max must be > 0")
        return dt


@dataclass
class Trajectory:
    """Sampled trajectory of the vibron observables.

    For single-molecule runs Q, P, E have shape (nt,).  For pair runs Q, P
    have shape (2, nt) and E holds (E1, E2); e_plus/e_minus are the energies
    of the collective quadratures (Q1 +- Q2)/sqrt(2), (P1 +- P2)/sqrt(2).
    """

    times: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    E: np.ndarray
    e_plus: np.ndarray | None = None
    e_minus: np.ndarray | None = None
    total_energy: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def pair(self) -> bool:
        return self.Q.ndim == 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        if not self.pair:
            buf.write("t,Q1,P1,E1\n")
            for i in range(len(self.times)):
                buf.write(
                    "%.12e,%.12e,%.12e,%.12e\n"
                    % (self.times[i], self.Q[i], self.P[i], self.E[i])
                )
        else:
            buf.write("t,Q1,P1,Q2,P2,E1,E2,Eplus,Eminus\n")
            for i in range(len(self.times)):
                buf.write(
                    "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n"
                    % (
                        self.times[i],
                        self.Q[0, i], self.P[0, i],
                        self.Q[1, i], self.P[1, i],
                        self.E[0, i], self.E[1, i],
                        self.e_plus[i], self.e_minus[i],
                    )
                )
        return buf.getvalue()


def _thermal_phonon_sample(rng, omega, temperature):
    """Classical equipartition draw: q_k, p_k ~ N(0, T/omega_k) in the
    dimensionless quadratures where H_k = omega_k (p_k^2 + q_k^2)/2."""
    if temperature <= 0:
        return np.zeros_like(omega), np.zeros_like(omega)
    sig = np.sqrt(temperature / omega)
    return rng.normal(0.0, sig), rng.normal(0.0, sig)


def _rk4(deriv, y0, dt, n_steps, store_every, observers):
    """Fixed-step RK4 with in-loop observation; returns stacked observer rows."""
    y = np.array(y0, dtype=float)
    n_out = n_steps // store_every + 1
    out = np.empty((n_out, len(observers(y))), dtype=float)
    out[0] = observers(y)
    row = 1
    for step in range(1, n_steps + 1):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * dt * k1)
        k3 = deriv(y + 0.5 * dt * k2)
        k4 = deriv(y + dt * k3)
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % store_every == 0:
            out[row] = observers(y)
            row += 1
    return out[:row]


def simulate_single(molecule: MoleculeParams | float, bath: DiscreteBath,
                    cfg: TrajectoryConfig) -> Trajectory:
    """Integrate one vibron against the N-cell chain.

    `molecule` may be a MoleculeParams or simply the vibron frequency nu.
    Raises InstabilityError if the vibron energy exceeds 10x its initial
    value (a symptom of a step-size/stability failure in this passive model).
    """
    if not isinstance(bath, DiscreteBath):
        raise VariantError("simulate_single requires a discrete bath")
    nu = molecule.nu if isinstance(molecule, MoleculeParams) else float(molecule)
    chain = build_chain(bath, nu)
    w = chain.frequencies
    a = chain.alpha
    gph = np.zeros_like(w) if np.isinf(bath.qfactor) else w / bath.qfactor

    dt = cfg.resolved_dt(bath.omega_max)
    n_steps = int(np.ceil(cfg.t_max / dt))
    nm = len(w)

    rng = np.random.default_rng(cfg.seed)
    q0ph, p0ph = (
        _thermal_phonon_sample(rng, w, bath.temperature)
        if cfg.thermal_phonons
        else (np.zeros(nm), np.zeros(nm))
    )
    y0 = np.concatenate(([cfg.q0, cfg.p0], q0ph, p0ph))

    def deriv(y):
        Q, P = y[0], y[1]
        q = y[2:2 + nm]
        p = y[2 + nm:]
        dy = np.empty_like(y)
        dy[0] = nu * P
        dy[1] = -nu * Q + a @ q
        dy[2:2 + nm] = w * p
        dy[2 + nm:] = -w * q + a * Q - gph * p
        return dy

    def observers(y):
        Q, P = y[0], y[1]
        q = y[2:2 + nm]
        p = y[2 + nm:]
        e_vib = 0.5 * (Q * Q + P * P)
        h_tot = (
            nu * e_vib
            + 0.5 * np.sum(w * (q * q + p * p))
            - Q * np.sum(a * q)
        )
        return np.array([Q, P, e_vib, h_tot])

    rows = _rk4(deriv, y0, dt, n_steps, cfg.store_every, observers)
    times = np.arange(len(rows)) * dt * cfg.store_every
    e0 = rows[0, 2]
    if e0 > 0 and np.max(rows[:, 2]) > 10.0 * e0:
        raise InstabilityError("vibron energy grew beyond 10x its initial value")
    return Trajectory(
        times=times, Q=rows[:, 0], P=rows[:, 1], E=rows[:, 2],
        total_energy=rows[:, 3],
        meta={"dt": dt, "seed": cfg.seed, "n_modes": nm},
    )


def simulate_pair(nu: float, bath: DiscreteBath, j: int,
                  cfg: TrajectoryConfig) -> Trajectory:
    """Integrate two identical vibrons at sites N+1 -+ j of the chain.

    Initial quadratures may be given per molecule as tuples in `cfg`; the
    output includes the collective-mode energies E+- of
    (Q1 +- Q2)/sqrt(2), (P1 +- P2)/sqrt(2).
    """
    if not isinstance(bath, DiscreteBath):
        raise VariantError("simulate_pair requires a discrete bath")
    if j < 1 or int(j) != j:
        raise DomainError("half-separation j must be a positive integer")
    w = chain_eigenmodes(bath)
    a1, a2 = pair_vibron_phonon_couplings(bath, nu, j)
    gph = np.zeros_like(w) if np.isinf(bath.qfactor) else w / bath.qfactor

    dt = cfg.resolved_dt(bath.omega_max)
    n_steps = int(np.ceil(cfg.t_max / dt))
    nm = len(w)

    q0 = np.broadcast_to(np.asarray(cfg.q0, dtype=float), (2,))
    p0 = np.broadcast_to(np.asarray(cfg.p0, dtype=float), (2,))
    rng = np.random.default_rng(cfg.seed)
    q0ph, p0ph = (
        _thermal_phonon_sample(rng, w, bath.temperature)
        if cfg.thermal_phonons
        else (np.zeros(nm), np.zeros(nm))
    )
    y0 = np.concatenate((q0, p0, q0ph, p0ph))

    def deriv(y):
        Q = y[0:2]
        P = y[2:4]
        q = y[4:4 + nm]
        p = y[4 + nm:]
        dy = np.empty_like(y)
        dy[0:2] = nu * P
        dy[2] = -nu * Q[0] + a1 @ q
        dy[3] = -nu * Q[1] + a2 @ q
        dy[4:4 + nm] = w * p
        dy[4 + nm:] = -w * q + a1 * Q[0] + a2 * Q[1] - gph * p
        return dy

    def observers(y):
        Q = y[0:2]
        P = y[2:4]
        q = y[4:4 + nm]
        p = y[4 + nm:]
        e1 = 0.5 * (Q[0] ** 2 + P[0] ** 2)
        e2 = 0.5 * (Q[1] ** 2 + P[1] ** 2)
        ep = 0.25 * ((Q[0] + Q[1]) ** 2 + (P[0] + P[1]) ** 2)
        em = 0.25 * ((Q[0] - Q[1]) ** 2 + (P[0] - P[1]) ** 2)
        h_tot = (
            nu * (e1 + e2)
            + 0.5 * np.sum(w * (q * q + p * p))
            - Q[0] * np.sum(a1 * q)
            - Q[1] * np.sum(a2 * q)
        )
        return np.array([Q[0], P[0], Q[1], P[1], e1, e2, ep, em, h_tot])

    rows = _rk4(deriv, y0, dt, n_steps, cfg.store_every, observers)
    times = np.arange(len(rows)) * dt * cfg.store_every
    e0 = rows[0, 4] + rows[0, 5]
    if e0 > 0 and np.max(rows[:, 4] + rows[:, 5]) > 10.0 * e0:
        raise InstabilityError("vibron energy grew beyond 10x its initial value")
    return Trajectory(
        times=times,
        Q=np.vstack([rows[:, 0], rows[:, 2]]),
        P=np.vstack([rows[:, 1], rows[:, 3]]),
        E=np.vstack([rows[:, 4], rows[:, 5]]),
        e_plus=rows[:, 6],
        e_minus=rows[:, 7],
        total_energy=rows[:, 8],
        meta={"dt": dt, "seed": cfg.seed, "n_modes": nm, "j": int(j)},
    )


def dyson_first_order(t: float, bath: DiscreteBath, nu: float):
    """First-order scattering amplitudes at time t.

    Returns (amp_down, amp_up): amplitudes onto |0_nu, 1_k> and |2_nu, 1_k>,

        amp_down_k = alpha_k (e^{i(omega_k - nu)t} - 1)/(omega_k - nu),
        amp_up_k   = sqrt(2) alpha_k (e^{i(omega_k + nu)t} - 1)/(omega_k + nu),

    with the resonant limit i alpha_k t when omega_k = nu.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    chain = build_chain(bath, nu)
    w = chain.frequencies
    a = chain.alpha

    def amp(delta):
        res = np.abs(delta) < 1e-12
        safe = np.where(res, 1.0, delta)
        return np.where(res, 1j * t, (np.exp(1j * safe * t) - 1.0) / safe)

    return a * amp(w - nu), np.sqrt(2.0) * a * amp(w + nu)


def energy_envelope(times, energy, period):
    """Centered moving average of `energy` over one fast-oscillation `period`.

    The bare-quadrature energy (Q^2 + P^2)/2 of a host-renormalized vibron
    breathes at twice the shifted frequency with relative amplitude of order
    nu_s / (2 nu); averaging over one period extracts the decay envelope.
    Returns (times_valid, envelope) restricted to samples whose averaging
    window lies fully inside the trajectory, so there is no edge bias.
    """
    times = np.asarray(times, dtype=float)
    energy = np.asarray(energy, dtype=float)
    if len(times) < 2:
        raise DomainError("need at least two samples")
    dt = times[1] - times[0]
    w = max(1, int(round(period / dt)))
    if w >= len(energy):
        raise DomainError("averaging period exceeds the trajectory length")
    kernel = np.full(w, 1.0 / w)
    env = np.convolve(energy, kernel, mode="valid")
    lo = (w - 1) // 2
    return times[lo:lo + len(env)], env


def fit_decay_rate(times, energy, gamma_guess, window=(0.5, 2.5)):
    """Exponential decay rate by linear least squares on log E over the
    window [window[0]/gamma_guess, window[1]/gamma_guess]."""
    times = np.asarray(times, dtype=float)
    energy = np.asarray(energy, dtype=float)
    t_lo = window[0] / gamma_guess
    t_hi = window[1] / gamma_guess
    sel = (times >= t_lo) & (times <= t_hi) & (energy > 0)
    if np.count_nonzero(sel) < 3:
        raise DomainError("fit window contains fewer than 3 usable samples")
    slope, _ = np.polyfit(times[sel], np.log(energy[sel]), 1)
    return -slope
