"""Physical parameter types, 1D-chain normal modes and derived couplings.

Units: hbar = k_B = 1 throughout.  Frequencies are angular and carried in
whatever unit the caller chooses (the bundled presets use rad/ps, i.e.
"THz" in the loose spectroscopic sense, so that 3D electron-phonon
couplings are in ps^2).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, VariantError

# hbar / k_B in K * ps; converts Kelvin to angular frequency in rad/ps
HBAR_OVER_KB_K_PS = 7.638233


def kelvin_to_angfreq(t_kelvin):
    """Temperature in K -> equivalent energy/frequency in rad/ps (k_B T / hbar)."""
    return t_kelvin / HBAR_OVER_KB_K_PS


@dataclass(frozen=True)
class MoleculeParams:
    """Electronic transition + single vibron of a guest molecule.

    omega0 : electronic transition frequency
    gamma  : radiative half-linewidth
    nu     : vibron frequency
    lam    : dimensionless vibronic coupling (sqrt of the Huang-Rhys factor)
    eta_l  : laser drive amplitude (weak drive assumed, eta_l << gamma)
    """

    omega0: float
    gamma: float
    nu: float
    lam: float
    eta_l: float = 0.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise DomainError("gamma must be > 0")
        if self.nu <= 0:
            raise DomainError("nu must be > 0")
        if self.lam < 0:
            raise DomainError("lambda must be >= 0")
        if self.eta_l < 0:
            raise DomainError("eta_l must be >= 0")
        if self.eta_l >= self.gamma > 0 and self.eta_l > 0:
            warnings.warn(
                "drive amplitude eta_l >= gamma: linear-response (weak drive) "
                "assumption violated",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ThermalState:
    """Bath temperature (k_B = 1).  T = 0 is represented as beta = inf."""

    temperature: float

    def __post_init__(self):
        if self.temperature < 0:
            raise DomainError("temperature must be >= 0")

    @property
    def beta(self):
        return np.inf if self.temperature == 0 else 1.0 / self.temperature

    def occupation(self, omega):
        """Bose-Einstein occupancy n(omega); exactly 0 at T = 0."""
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise DomainError("occupation requires omega > 0")
        if self.temperature == 0:
            return np.zeros_like(omega) if omega.ndim else 0.0
        n = 1.0 / np.expm1(omega / self.temperature)
        return n if omega.ndim else float(n)

    def coth_half_beta(self, omega):
        """coth(beta*omega/2) = 1 + 2*n(|omega|), sign-odd in omega.

        At T = 0 this is sign(omega)."""
        omega = np.asarray(omega, dtype=float)
        if self.temperature == 0:
            out = np.sign(omega)
        else:
            x = omega / (2.0 * self.temperature)
            # tanh is well conditioned everywhere; avoid overflow of cosh/sinh
            with np.errstate(divide="ignore"):
                out = 1.0 / np.tanh(x)
            out = np.where(x == 0, np.inf, out)
        return out if out.ndim else float(out)

    @classmethod
    def from_occupation(cls, nbar, omega):
        """Temperature at which mode `omega` has occupancy `nbar`."""
        if nbar < 0:
            raise DomainError("nbar must be >= 0")
        if nbar == 0:
            return cls(0.0)
        return cls(omega / np.log1p(1.0 / nbar))


@dataclass(frozen=True)
class DiscreteBath:
    """Finite 1D chain of 2N+1 host cells with an embedded molecule.

    n_cells  : N (chain has 2N+1 bulk sites, molecule at site N+1)
    k0       : host-host spring constant
    m0       : host atom mass
    dk       : coupling asymmetry Delta k (left/right molecule-host springs)
    ktot     : summed molecule-host spring constant k_tot
    dx       : excited-state displacement of the neighbouring host atom
    mu       : reduced molecular mass (continuum reduction assumes mu = m0)
    qfactor  : phonon quality factor omega_k / gamma_k^ph (inf = undamped)
    """

    n_cells: int
    k0: float
    m0: float
    dk: float
    ktot: float = 0.0
    dx: float = 0.0
    mu: float | None = None
    qfactor: float = np.inf
    temperature: float = 0.0

    def __post_init__(self):
        if self.n_cells < 1:
            raise DomainError("n_cells must be >= 1")
        if self.k0 <= 0 or self.m0 <= 0:
            raise DomainError("spring constant and mass must be > 0")
        if self.qfactor <= 0:
            raise DomainError("qfactor must be > 0 (or inf)")
        if self.mu is None:
            object.__setattr__(self, "mu", self.m0)

    @property
    def omega_max(self):
        return 2.0 * np.sqrt(self.k0 / self.m0)

    def thermal(self):
        return ThermalState(self.temperature)

    def to_continuum(self, nu):
        """Continuum (Brownian) reduction of this chain for a vibron at nu."""
        _, gamma_m = derived_markov_params(self, nu)
        return ContinuumBath(
            omega_max=self.omega_max,
            gamma_m=gamma_m,
            temperature=self.temperature,
        )


@dataclass(frozen=True)
class ContinuumBath:
    """Continuum phonon bath: band edge omega_max and Markovian rate gamma_m."""

    omega_max: float
    gamma_m: float
    temperature: float = 0.0

    def __post_init__(self):
        if self.omega_max <= 0:
            raise DomainError("omega_max must be > 0")
        if self.gamma_m < 0:
            raise DomainError("gamma_m must be >= 0")

    def thermal(self):
        return ThermalState(self.temperature)


PhononBathSpec = DiscreteBath | ContinuumBath


@dataclass(frozen=True)
class ChainModes:
    """Normal modes of the 1D chain with the couplings of the embedded molecule."""

    frequencies: np.ndarray
    alpha: np.ndarray = field(default=None)
    lambda_k: np.ndarray = field(default=None)

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        object.__setattr__(self, "frequencies", f)
        if np.any(np.diff(f) <= 0):
            raise DomainError("mode frequencies must be strictly increasing")


@dataclass(frozen=True)
class SpectralDensity:
    """Electron-phonon spectral density J(omega).

    kind      : "1d" or "3d"
    coupling  : lambda_e-ph (dimensionless for 1d, [time^2] for 3d)
    omega_max : band edge
    omega_min : infrared cutoff, used by the 1d form only
    """

    kind: str
    coupling: float
    omega_max: float
    omega_min: float = 0.0

    def __post_init__(self):
        if self.kind not in ("1d", "3d"):
            raise DomainError("kind must be '1d' or '3d'")
        if self.coupling < 0:
            raise DomainError("coupling must be >= 0")
        if not 0 <= self.omega_min < self.omega_max:
            raise DomainError("need 0 <= omega_min < omega_max")

    @property
    def infrared_divergent(self):
        """1D with omega_min = 0 makes the Debye-Waller integral diverge."""
        return self.kind == "1d" and self.omega_min == 0.0 and self.coupling > 0


def _require_discrete(bath):
    if not isinstance(bath, DiscreteBath):
        raise VariantError("operation requires a DiscreteBath")


def chain_eigenmodes(bath: DiscreteBath) -> np.ndarray:
    """Eigenfrequencies omega_k = omega_max sin(pi k / (2(2N+2))), k=1..2N+1."""
    _require_discrete(bath)
    n = bath.n_cells
    k = np.arange(1, 2 * n + 2)
    return bath.omega_max * np.sin(np.pi * k / (2.0 * (2 * n + 2)))


def _mode_geometry(bath, site_offset=0):
    """Common geometric factor of the chain couplings for the molecule's
    neighbour pair around site N+1+site_offset."""
    n = bath.n_cells
    k = np.arange(1, 2 * n + 2)
    return (
        2.0
        * np.sqrt(1.0 / (n + 1))
        * np.cos(np.pi * k * (n + 1 + site_offset) / (2 * n + 2))
        * np.sin(np.pi * k / (2 * n + 2))
    )


def vibron_phonon_couplings(bath: DiscreteBath, nu, modes=None) -> np.ndarray:
    """Couplings alpha_k between the vibron and each chain mode.

    alpha_k = 2 dk sqrt(1/(N+1)) cos(pi k/2) sin(pi k/(2N+2)) u_zpm x_zpm,
    with u_zpm = (2 m0 omega_k)^(-1/2), x_zpm = (2 mu nu)^(-1/2).
    Vanishes for odd k (parity selection).
    """
    _require_discrete(bath)
    omega = chain_eigenmodes(bath) if modes is None else np.asarray(modes)
    x_zpm = 1.0 / np.sqrt(2.0 * bath.mu * nu)
    u_zpm = 1.0 / np.sqrt(2.0 * bath.m0 * omega)
    alpha = bath.dk * _mode_geometry(bath) * u_zpm * x_zpm
    # cos(pi k (N+1)/(2N+2)) = cos(pi k / 2): kill odd-k residues exactly
    k = np.arange(1, 2 * bath.n_cells + 2)
    alpha[k % 2 == 1] = 0.0
    return alpha


def electron_phonon_couplings(bath: DiscreteBath, modes=None) -> np.ndarray:
    """Dimensionless couplings lambda_k between the electronic transition and
    each chain mode.

    lambda_k = 2 (ktot/omega_k) sqrt(1/(N+1)) cos(pi k/2) sin(pi k/(2N+2))
               u_zpm dx.
    """
    _require_discrete(bath)
    omega = chain_eigenmodes(bath) if modes is None else np.asarray(modes)
    u_zpm = 1.0 / np.sqrt(2.0 * bath.m0 * omega)
    lam = (bath.ktot / omega) * _mode_geometry(bath) * u_zpm * bath.dx
    k = np.arange(1, 2 * bath.n_cells + 2)
    lam[k % 2 == 1] = 0.0
    return lam


def pair_vibron_phonon_couplings(bath: DiscreteBath, nu, j: int):
    """(alpha_k1, alpha_k2) for two identical molecules at sites N+1 -/+ j."""
    _require_discrete(bath)
    if j < 1 or int(j) != j:
        raise DomainError("half-separation j must be a positive integer")
    omega = chain_eigenmodes(bath)
    x_zpm = 1.0 / np.sqrt(2.0 * bath.mu * nu)
    u_zpm = 1.0 / np.sqrt(2.0 * bath.m0 * omega)
    a1 = bath.dk * _mode_geometry(bath, -j) * u_zpm * x_zpm
    a2 = bath.dk * _mode_geometry(bath, +j) * u_zpm * x_zpm
    return a1, a2


def build_chain(bath: DiscreteBath, nu) -> ChainModes:
    """Chain modes with both coupling sets filled in."""
    omega = chain_eigenmodes(bath)
    return ChainModes(
        frequencies=omega,
        alpha=vibron_phonon_couplings(bath, nu, omega),
        lambda_k=electron_phonon_couplings(bath, omega),
    )


def occupation(omega, thermal: ThermalState):
    """Bose-Einstein occupancy of a mode at `omega` (> 0)."""
    return thermal.occupation(omega)


def derived_markov_params(bath: DiscreteBath, nu):
    """Crystal-induced shift nu_s and Markovian rate Gamma_m of the chain.

    nu_s    = dk^2 / (2 k0 mu nu)   (equivalently nu dk^2/(2 k0 k_M))
    Gamma_m = 2 nu nu_s / omega_max
    """
    _require_discrete(bath)
    if nu <= 0:
        raise DomainError("nu must be > 0")
    nu_s = bath.dk**2 / (2.0 * bath.k0 * bath.mu * nu)
    gamma_m = 2.0 * nu * nu_s / bath.omega_max
    return nu_s, gamma_m


def markov_rate_band_form(bath: DiscreteBath):
    """Gamma_m = dk^2 omega_max / (4 k0^2); identical to derived_markov_params
    when mu = m0."""
    _require_discrete(bath)
    return bath.dk**2 * bath.omega_max / (4.0 * bath.k0**2)


def asymmetry_for_rate(gamma_m, omega_max):
    """Invert Gamma_m = dk^2 omega_max/(4 k0^2) for the ratio dk/k0 (mu = m0)."""
    if gamma_m < 0 or omega_max <= 0:
        raise DomainError("need gamma_m >= 0 and omega_max > 0")
    return np.sqrt(4.0 * gamma_m / omega_max)


def vibronic_coupling_microscopic(mu, nu, dx):
    """Microscopic estimate lambda = dx sqrt(mu nu / 2).

    Convention-dependent helper only; the library takes lambda as direct
    user input everywhere else.
    """
    return dx * np.sqrt(mu * nu / 2.0)


def polaron_shift_discrete(modes: ChainModes):
    """Electronic polaron shift sum_k lambda_k^2 omega_k of a discrete chain."""
    if modes.lambda_k is None:
        raise DomainError("modes carry no electron-phonon couplings")
    return float(np.sum(modes.lambda_k**2 * modes.frequencies))
