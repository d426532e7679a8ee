"""
Pydantic schemas for hybridlink.

Defines the parameter records, dressed-basis quantities, rate sets, protocol
results and electrostatic geometry shared across the package. Complex-valued
intermediate results are plain frozen dataclasses.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, computed_field

from hybridlink.config import settings

ComplexMatrix4 = npt.NDArray[np.complex128]

# Pulse of 50 ns at a linewidth of 2pi x 20 MHz
DEFAULT_PULSE_DURATION = 2 * math.pi * 20e6 * 50e-9


class ScatteringPath(str, Enum):
    """Raman scattering pathway of the hybrid."""

    PATH1 = "path-1"  # |g,-> -> |S,-> -> |A,+> -> |g,+>
    PATH2 = "path-2"  # |g,+> -> |A,+> -> |S,-> -> |g,->


class QubitState(str, Enum):
    """Charge-qubit eigenstate."""

    UP = "up"
    DOWN = "down"


class DephasingModel(str, Enum):
    """Source of the light-induced dephasing probability."""

    PRINTED = "printed"
    EFFECTIVE = "effective"


class ProtocolKind(str, Enum):
    """Heralded entanglement protocol."""

    CHSH = "chsh"
    BELL = "bell"


class MoleculePosition(str, Enum):
    """Molecule location inside the waveguide cross section."""

    NEAR_EDGE = "near-edge"
    CENTER = "center"
    FAR_EDGE = "far-edge"


class HybridParams(BaseModel):
    """
    Physical parameters of one molecule-pair / charge-qubit hybrid.

    All rates and frequencies are in units of the total molecular linewidth
    gamma, times in units of 1/gamma.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma_1d: float = Field(default=0.1, description="Decay rate into the guided mode")
    gamma_c: float = Field(default=0.45, description="Collective decay rate")
    gamma_i: float = Field(default=0.45, description="Intrinsic decay rate")
    g_c1: float = Field(default=2.0, description="Qubit coupling of molecule 1")
    g_c2: float = Field(default=-2.0, description="Qubit coupling of molecule 2")
    g_m1: float = Field(default=1.0, description="Relative light coupling of molecule 1")
    g_m2: float = Field(default=1.0, description="Relative light coupling of molecule 2")
    v_dd: float = Field(default=10.0, ge=0, description="Dipole-dipole coupling V")
    delta_0: float = Field(default=0.0, description="Bare molecular detuning")
    omega_q: float = Field(
        default_factory=lambda: settings.omega_q_default,
        gt=0,
        description="Qubit splitting",
    )
    delta: Optional[float] = Field(
        default=None,
        description="Probe detuning; None selects the optimal working point",
    )
    eta: float = Field(default=0.5, ge=0, le=1, description="Detector efficiency")
    t2: Optional[float] = Field(default=None, description="Qubit Gaussian coherence time")
    pulse_duration: float = Field(
        default=DEFAULT_PULSE_DURATION, description="Probe pulse duration T"
    )
    resonance: bool = Field(
        default=True,
        description="Tune delta_0 so that the dressed splitting equals omega_q",
    )

    @property
    def gamma_total(self) -> float:
        """Sum of the three decay rates."""
        return self.gamma_1d + self.gamma_c + self.gamma_i

    @property
    def x(self) -> float:
        """Dipole coupling relative to the qubit splitting, V/omega_q."""
        return self.v_dd / self.omega_q

    @property
    def y(self) -> float:
        """Differential qubit coupling, (g_c1 - g_c2)/gamma."""
        return (self.g_c1 - self.g_c2) / self.gamma_total


class DressedBasis(BaseModel):
    """Hybridization coefficients and dressed couplings and decays."""

    model_config = ConfigDict(frozen=True)

    beta1: float
    beta2: float
    beta1p: float
    beta2p: float
    splitting: float = Field(..., gt=0, description="Dressed splitting 2V_cal")
    g_eff: float = Field(..., description="Cross coupling between S and A manifolds")
    g1_eff: float = Field(..., description="Coupling inside the symmetric manifold")
    g2_eff: float = Field(..., description="Coupling inside the antisymmetric manifold")
    gamma_s: float = Field(..., ge=0, description="Symmetric state decay")
    gamma_a: float = Field(..., ge=0, description="Antisymmetric state decay")
    gamma_as: float = Field(..., description="Cross decay between S and A")

    @property
    def half_splitting(self) -> float:
        return 0.5 * self.splitting

    @property
    def overlap(self) -> float:
        """Mixing factor beta1*beta2 = V/2V_cal."""
        return self.beta1 * self.beta2


class ElementProducts(BaseModel):
    """Squared moduli of the inverse-Hamiltonian elements that set the rates."""

    p23_1: float = Field(..., ge=0, description="|H1^-1|^2 between |2> and |3>")
    p32_2: float = Field(..., ge=0, description="|H2^-1|^2 between |3> and |2>")
    p22_1: float = Field(..., ge=0, description="|H1^-1|^2 on |2>")
    p33_2: float = Field(..., ge=0, description="|H2^-1|^2 on |3>")
    p_ss_2: float = Field(..., ge=0, description="|H2^-1|^2 on |S,+>")


@dataclass(frozen=True)
class InverseElements:
    """Complex elements of the inverted non-Hermitian Hamiltonians."""

    h1_22: complex
    h1_32: complex
    h2_23: complex
    h2_33: complex
    h2_ss: complex

    def products(self) -> ElementProducts:
        return ElementProducts(
            p23_1=abs(self.h1_32) ** 2,
            p32_2=abs(self.h2_23) ** 2,
            p22_1=abs(self.h1_22) ** 2,
            p33_2=abs(self.h2_33) ** 2,
            p_ss_2=abs(self.h2_ss) ** 2,
        )


class RateSet(BaseModel):
    """Scattering probabilities per incident photon and the qubit frequency shift."""

    p_r: float = Field(..., ge=0, description="Raman scattering into the waveguide")
    p_ro: float = Field(..., ge=0, description="Raman scattering outside the waveguide")
    p_ir: float = Field(..., ge=0, description="Inverse Raman scattering")
    p_d: float = Field(..., ge=0, description="Light-induced dephasing")
    p_rs: float = Field(..., ge=0, description="Total Raman scattering")
    omega_14: float = Field(..., description="Ground-state coherence frequency")
    light_shift: float = Field(
        default=0.0, description="omega_14 - omega_q, the rotating-frame phase rate"
    )

    @computed_field  # type: ignore[prop-decorator]
    @property
    def p_c(self) -> float:
        """Total coherence decay probability."""
        return self.p_rs + self.p_ir + self.p_d

    @property
    def p_a(self) -> float:
        """Raman probability entering the protocols, P_R + P_RO."""
        return self.p_r + self.p_ro


@dataclass(frozen=True)
class ScatterCoeff:
    """Single-molecule reflection amplitudes for the two qubit states."""

    zeta_up: complex
    zeta_down: complex

    def reflection(self, state: QubitState) -> float:
        """Reflection probability |zeta|^2 for a qubit state."""
        zeta = self.zeta_up if state is QubitState.UP else self.zeta_down
        return abs(zeta) ** 2


@dataclass(frozen=True)
class GroundState:
    """Reduced density matrix on the hybrid ground manifold {|1>, |4>}."""

    rho11: float
    rho44: float
    rho14: complex

    @classmethod
    def ground(cls) -> "GroundState":
        return cls(rho11=1.0, rho44=0.0, rho14=0j)

    @classmethod
    def excited(cls) -> "GroundState":
        return cls(rho11=0.0, rho44=1.0, rho14=0j)

    @classmethod
    def superposition(cls, phase: float = 0.0) -> "GroundState":
        """Equal superposition (|1> + e^{i phase}|4>)/sqrt(2)."""
        return cls(rho11=0.5, rho44=0.5, rho14=0.5 * complex(math.cos(phase), -math.sin(phase)))

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho44

    def as_matrix(self) -> npt.NDArray[np.complex128]:
        return np.array(
            [[self.rho11, self.rho14], [np.conj(self.rho14), self.rho44]],
            dtype=np.complex128,
        )

    @classmethod
    def from_matrix(cls, rho: npt.NDArray[np.complex128]) -> "GroundState":
        return cls(
            rho11=float(rho[0, 0].real),
            rho44=float(rho[1, 1].real),
            rho14=complex(rho[0, 1]),
        )


class ProtocolResult(BaseModel):
    """Outcome of a heralded entanglement protocol."""

    protocol: ProtocolKind
    n_bar: Optional[float] = Field(
        default=None, description="Mean photon number; None for a single-photon input"
    )
    success_prob: float = Field(..., ge=0, description="Heralding probability")
    fidelity: Optional[float] = Field(
        default=None, description="Bell-state fidelity; None when undefined"
    )
    fidelity_first_order: Optional[float] = Field(
        default=None, description="Lowest-order expansion of the fidelity in n_bar"
    )
    s_parameter: Optional[float] = Field(default=None, description="CHSH S value")
    success_stderr: Optional[float] = None
    fidelity_stderr: Optional[float] = None
    s_stderr: Optional[float] = None
    n_trials: Optional[int] = None
    n_clicks: Optional[int] = None
    t2_penalty: Optional[float] = Field(
        default=None, description="Fidelity reduction caused by qubit decoherence"
    )
    t2_penalty_first_order: Optional[float] = Field(
        default=None, description="Click-averaged (tau/T2)^2"
    )
    t2_penalty_stderr: Optional[float] = None


class Geometry(BaseModel):
    """Island / waveguide / substrate geometry for the electrostatics solve, in nm."""

    island_length: float = Field(default=700.0, gt=0, description="Island length along the guide")
    island_width: float = Field(default=300.0, gt=0, description="Island width across the guide")
    island_height: float = Field(default=25.0, gt=0, description="Island thickness")
    waveguide_width: float = Field(default=700.0, gt=0, description="Waveguide width W")
    waveguide_height: float = Field(default=200.0, gt=0, description="Waveguide height H")
    distance: float = Field(default=125.0, gt=0, description="Island to waveguide surface d")
    molecule_position: MoleculePosition = MoleculePosition.NEAR_EDGE
    edge_inset: float = Field(
        default=25.0, ge=0, description="Depth of the edge positions inside the guide"
    )
    molecule_override: Optional[tuple[float, float, float]] = Field(
        default=None, description="Explicit (x, y, z) molecule coordinate"
    )
    eps_waveguide: float = Field(default=2.3, ge=1, description="Waveguide permittivity")
    eps_substrate: float = Field(default=3.9, ge=1, description="Substrate permittivity")
    eps_vacuum: float = Field(default=1.0, ge=1, description="Cover permittivity")


class StarkCoupling(BaseModel):
    """Molecule-qubit coupling from a static field."""

    field_kv_m: float
    dipole_debye: float
    g_c_mhz: float = Field(..., description="Coupling from the linear Stark coefficient")
    first_principles_mhz: float = Field(..., description="Coupling from dipole x field / h")
