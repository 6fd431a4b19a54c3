"""Flexural modes of a suspended nanotube (Euler-Bernoulli beam, zero tension).

The bending modes of a thin beam of length ``L`` satisfy

    cos(k_n L) cosh(k_n L) = +1    (doubly clamped)
    cos(k_n L) cosh(k_n L) = -1    (cantilever)

and oscillate at ``omega_n = k_n**2 * sqrt(E I / (rho A))``.
"""

from dataclasses import dataclass
import enum
import math

from .constants import CONST


class BoundaryCondition(enum.Enum):
    DOUBLY_CLAMPED = "doubly_clamped"
    CANTILEVER = "cantilever"

    @property
    def sign(self) -> int:
        """Right-hand side of ``cos x cosh x = sign``."""
        return 1 if self is BoundaryCondition.DOUBLY_CLAMPED else -1


@dataclass(frozen=True)
class BeamGeometry:
    """Hollow cylindrical beam.

    Parameters
    ----------
    length, radius, wall : float
        Beam length, outer radius and wall thickness in metres.
    density : float
        Mass density in kg/m^3.
    youngs_modulus : float
        Young modulus in Pa.
    """

    length: float
    radius: float
    wall: float
    density: float
    youngs_modulus: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"beam length must be positive, got {self.length}")
        if not 0 < self.wall <= self.radius:
            raise ValueError(
                f"wall thickness must satisfy 0 < t <= r, got t={self.wall}, r={self.radius}")
        if not self.density > 0:
            raise ValueError(f"density must be positive, got {self.density}")
        if not self.youngs_modulus > 0:
            raise ValueError(f"Young modulus must be positive, got {self.youngs_modulus}")


#: Nanotube used throughout the device estimates (2 um long, r = 1.5 nm).
NANOTUBE = BeamGeometry(length=2e-6, radius=1.5e-9, wall=0.335e-9,
                        density=1350.0, youngs_modulus=1e12)


@dataclass(frozen=True)
class CrossSection:
    area: float
    moment: float


@dataclass(frozen=True)
class BeamMode:
    n: int
    root: float
    omega: float
    mass: float
    u_zp: float


def frequency_root(bc: BoundaryCondition, n: int, tol: float = 1e-12) -> float:
    """Return the n-th positive root ``x_n = k_n L`` of the frequency equation.

    The root is bisected on ``cos x - sign / cosh x`` which has the same zeros
    as ``cos x cosh x - sign`` but stays bounded, inside a bracket of half-width
    1 around the asymptote ``(n + 1/2) pi`` (cantilever) or ``(n + 3/2) pi``
    (doubly clamped).
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"mode index must be >= 0, got {n}")
    bc = BoundaryCondition(bc)
    s = bc.sign
    centre = (n + (1.5 if s > 0 else 0.5)) * math.pi

    def f(x):
        return math.cos(x) - s / math.cosh(x)

    lo, hi = centre - 1.0, centre + 1.0
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise RuntimeError(f"root bracket [{lo}, {hi}] failed for {bc.name} n={n}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi = mid
        else:
            lo, flo = mid, fmid
        if hi - lo < tol:
            return 0.5 * (lo + hi)
    raise RuntimeError(f"bisection did not converge for {bc.name} n={n}")


def cross_section(geom: BeamGeometry) -> CrossSection:
    """Annulus area and second moment of area (hollow cylinder)."""
    r = geom.radius
    ri = r - geom.wall
    area = math.pi * (r**2 - ri**2)
    moment = 0.25 * math.pi * (r**4 - ri**4)
    return CrossSection(area, moment)


def eigenfrequency(geom: BeamGeometry, bc: BoundaryCondition = BoundaryCondition.DOUBLY_CLAMPED,
                   n: int = 0) -> float:
    """Angular frequency (rad/s) of bending mode ``n``."""
    cs = cross_section(geom)
    k = frequency_root(bc, n) / geom.length
    return k**2 * math.sqrt(geom.youngs_modulus * cs.moment / (geom.density * cs.area))


def effective_mass(geom: BeamGeometry, override: float | None = None) -> float:
    """Mode mass in kg; defaults to the total beam mass ``rho A L``."""
    if override is not None:
        if not override > 0:
            raise ValueError(f"effective mass override must be positive, got {override}")
        return float(override)
    return geom.density * cross_section(geom).area * geom.length


def zero_point_amplitude(mass: float, omega: float) -> float:
    """Zero-point displacement ``sqrt(hbar / (2 m omega))`` in metres."""
    if not mass > 0 or not omega > 0:
        raise ValueError(f"mass and frequency must be positive, got m={mass}, omega={omega}")
    return math.sqrt(CONST.hbar / (2.0 * mass * omega))


def beam_mode(geom: BeamGeometry, bc: BoundaryCondition = BoundaryCondition.DOUBLY_CLAMPED,
              n: int = 0, mass: float | None = None, omega: float | None = None) -> BeamMode:
    """Collect one mode's properties; ``mass``/``omega`` override the beam-theory values."""
    root = frequency_root(bc, n)
    w = eigenfrequency(geom, bc, n) if omega is None else float(omega)
    m = effective_mass(geom, mass)
    return BeamMode(n=n, root=root, omega=w, mass=m, u_zp=zero_point_amplitude(m, w))
