"""Model parameters for the two-type branching-immigration generator and the
classification of parameter sets into the three time-changeable regimes.

A parameter set is time-changeable when it falls in one of three families:
purely continuous (diffusion plus immigration drift), independent stable
branching with multi-type stable immigration (index in (1,2)), or multi-type
stable branching (index in (0,1)).  In the latter two the diagonal drift
entries are pinned to explicit compensator integrals of the jump measures;
`classify_case` checks those pins numerically and `effective_bii` computes
them for a given truncation cutoff.
"""

import enum
from dataclasses import dataclass, field

from .errors import DivergentMass
from .stable_measures import E1, E2, SphereAtom, StableLevyMeasure

_AXIS_TOL = 1e-12


class Regime(enum.Enum):
    CONTINUOUS = "ContinuousCase"
    INDEP_STABLE_WITH_IMMIGRATION = "IndepStableWithImmigration"
    MULTI_TYPE_STABLE = "MultiTypeStable"
    NOT_TIME_CHANGEABLE = "NotTimeChangeable"


@dataclass(frozen=True)
class CaseClass:
    """Classification result: regime tag, stability index, and the exponent e
    of the admissible clock density beta(z) = z**e."""

    tag: Regime
    alpha: float | None = None
    beta_exponent: float | None = None
    reason: str = ""

    @property
    def admissible(self) -> bool:
        return self.tag is not Regime.NOT_TIME_CHANGEABLE

    def describe(self) -> str:
        if not self.admissible:
            return f"{self.tag.value}: {self.reason}"
        parts = [self.tag.value]
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        parts.append(f"beta_exponent={self.beta_exponent:g}")
        return ", ".join(parts)


@dataclass(frozen=True)
class TruncationChoice:
    """Cutoff kappa of the compensation function xi_i(u) = u_i * 1{u1+u2 <= kappa}."""

    cutoff: float = 1.0

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError(f"cutoff {self.cutoff} must be positive")


@dataclass(frozen=True)
class CSBIParams:
    """Coefficients of the two-type branching-immigration generator.

    c1, c2 are diffusion coefficients, the b entries linear drift (off-diagonal
    entries nonnegative), eta1, eta2 immigration drifts, m1/m2 branching-kind
    jump measures and nu an immigration-kind jump measure (any of the three
    may be absent).  The per-measure kind is validated here; cross-measure
    consistency (shared index, axis support, drift pins) is the classifier's
    job so that deliberately inconsistent parameter sets remain representable.
    """

    c1: float = 0.0
    c2: float = 0.0
    b11: float = 0.0
    b12: float = 0.0
    b21: float = 0.0
    b22: float = 0.0
    eta1: float = 0.0
    eta2: float = 0.0
    m1: StableLevyMeasure | None = None
    m2: StableLevyMeasure | None = None
    nu: StableLevyMeasure | None = None

    def __post_init__(self):
        for name in ("c1", "c2", "b12", "b21", "eta1", "eta2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("m1", "m2"):
            m = getattr(self, name)
            if m is not None and not m.is_branching_kind:
                raise ValueError(f"{name} must be of branching kind (exponent 1+alpha)")
        if self.nu is not None and self.nu.is_branching_kind:
            raise ValueError("nu must be of immigration kind (exponent alpha)")

    @property
    def branching_measures(self) -> tuple[StableLevyMeasure | None, StableLevyMeasure | None]:
        return (self.m1, self.m2)


def _trivial(m: StableLevyMeasure | None) -> bool:
    return m is None or m.total_weight == 0.0


def _axis_coefficient(m: StableLevyMeasure | None, axis) -> float | None:
    """Total weight of a measure concentrated on one axis, or None if any
    positive-weight atom sits elsewhere."""
    if _trivial(m):
        return 0.0
    total = 0.0
    for atom in m.atoms:
        if atom.weight == 0.0:
            continue
        if abs(atom.xi[0] - axis[0]) > _AXIS_TOL or abs(atom.xi[1] - axis[1]) > _AXIS_TOL:
            return None
        total += atom.weight
    return total


def effective_bii(
    p: CSBIParams, trunc: TruncationChoice, regime: Regime
) -> tuple[float, float]:
    """Pinned diagonal drift entries for the jump regimes.

    In the independent-stable regime b_ii = int (xi_i(u) - u_i) m^i(du),
    i.e. minus the i-th coordinate mass above the cutoff; in the multi-type
    regime b_ii = int xi_i(u) m^i(du), the coordinate mass below it.  With
    the indicator truncation both are closed-form power integrals per atom
    (the cutoff u1+u2 <= kappa meets an atom ray of l1-size s at radius
    kappa/s).
    """
    kappa = trunc.cutoff
    out = []
    for i, m in enumerate(p.branching_measures):
        if _trivial(m):
            out.append(0.0)
            continue
        alpha = m.alpha
        total = 0.0
        for atom in m.atoms:
            if atom.weight == 0.0:
                continue
            q_cut = kappa / atom.total
            if regime is Regime.INDEP_STABLE_WITH_IMMIGRATION:
                if alpha <= 1.0:
                    raise DivergentMass(
                        "the above-cutoff coordinate mass diverges for alpha <= 1"
                    )
                tail = q_cut ** (1.0 - alpha) / (alpha - 1.0)
                total -= atom.weight * atom.xi[i] * tail
            elif regime is Regime.MULTI_TYPE_STABLE:
                if alpha >= 1.0:
                    raise DivergentMass(
                        "the below-cutoff coordinate mass diverges for alpha >= 1"
                    )
                total += atom.weight * atom.xi[i] * q_cut ** (1.0 - alpha) / (1.0 - alpha)
            else:
                raise ValueError(f"no pinned drift in regime {regime}")
        out.append(total)
    return out[0], out[1]


def classify_case(
    p: CSBIParams, tol: float = 1e-9, trunc: TruncationChoice = TruncationChoice()
) -> CaseClass:
    """Decide which (if any) time-changeable regime the parameters satisfy.

    All zero conditions and drift pins are checked within tol; a parameter
    set matching no regime is reported as NotTimeChangeable with the reason,
    which is a value rather than an error.
    """
    measures_trivial = _trivial(p.m1) and _trivial(p.m2) and _trivial(p.nu)
    b_zero = max(abs(p.b11), abs(p.b12), abs(p.b21), abs(p.b22)) <= tol

    if measures_trivial:
        if b_zero:
            return CaseClass(Regime.CONTINUOUS, alpha=None, beta_exponent=-1.0)
        return CaseClass(
            Regime.NOT_TIME_CHANGEABLE,
            reason="linear drift present without stable jump measures",
        )

    off_diag = max(abs(p.b12), abs(p.b21))
    cont_coeffs = max(p.c1, p.c2, p.eta1, p.eta2)
    if cont_coeffs > tol:
        return CaseClass(
            Regime.NOT_TIME_CHANGEABLE,
            reason="diffusion or immigration drift coexists with jump measures",
        )
    if off_diag > tol:
        return CaseClass(
            Regime.NOT_TIME_CHANGEABLE,
            reason="off-diagonal linear drift is not time-changeable",
        )

    alphas = {
        round(m.alpha, 12)
        for m in (p.m1, p.m2, p.nu)
        if not _trivial(m)
    }
    if len(alphas) != 1:
        return CaseClass(
            Regime.NOT_TIME_CHANGEABLE,
            reason=f"jump measures carry mismatched stability indices {sorted(alphas)}",
        )
    alpha = float(next(iter(alphas)))

    if 1.0 < alpha < 2.0:
        a1 = _axis_coefficient(p.m1, E1)
        a2 = _axis_coefficient(p.m2, E2)
        if a1 is None or a2 is None:
            return CaseClass(
                Regime.NOT_TIME_CHANGEABLE,
                reason="branching measures with alpha in (1,2) must sit on their own axes",
            )
        b11_pin, b22_pin = effective_bii(p, trunc, Regime.INDEP_STABLE_WITH_IMMIGRATION)
        if abs(p.b11 - b11_pin) > tol or abs(p.b22 - b22_pin) > tol:
            return CaseClass(
                Regime.NOT_TIME_CHANGEABLE,
                reason=(
                    f"diagonal drift ({p.b11:g}, {p.b22:g}) differs from the pinned "
                    f"values ({b11_pin:g}, {b22_pin:g})"
                ),
            )
        return CaseClass(
            Regime.INDEP_STABLE_WITH_IMMIGRATION, alpha=alpha, beta_exponent=1.0 - alpha
        )

    if 0.0 < alpha < 1.0:
        if not _trivial(p.nu):
            return CaseClass(
                Regime.NOT_TIME_CHANGEABLE,
                reason="immigration jumps are not time-changeable for alpha in (0,1)",
            )
        b11_pin, b22_pin = effective_bii(p, trunc, Regime.MULTI_TYPE_STABLE)
        if abs(p.b11 - b11_pin) > tol or abs(p.b22 - b22_pin) > tol:
            return CaseClass(
                Regime.NOT_TIME_CHANGEABLE,
                reason=(
                    f"diagonal drift ({p.b11:g}, {p.b22:g}) differs from the pinned "
                    f"values ({b11_pin:g}, {b22_pin:g})"
                ),
            )
        return CaseClass(Regime.MULTI_TYPE_STABLE, alpha=alpha, beta_exponent=1.0 - alpha)

    return CaseClass(
        Regime.NOT_TIME_CHANGEABLE,
        reason=f"stability index {alpha:g} lies on the boundary of the admissible ranges",
    )


# --- corollary coefficient sets -------------------------------------------
#
# The limiting frequency dynamics are parameterized per regime; the builders
# below extract those coefficients from a classified CSBIParams so that the
# direct simulators and generator evaluations share one source of truth.


@dataclass(frozen=True)
class GwfCoeffs:
    """Asymmetric diffusion with immigration drift (continuous regime limit)."""

    c1: float
    c2: float
    eta1: float
    eta2: float


@dataclass(frozen=True)
class Case2Coeffs:
    """Independent stable branching plus multi-type immigration limit."""

    alpha: float
    a1: float
    a2: float
    lambda_immigration: tuple[SphereAtom, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Case3Coeffs:
    """Multi-type stable branching limit."""

    alpha: float
    lambda1: tuple[SphereAtom, ...] = field(default_factory=tuple)
    lambda2: tuple[SphereAtom, ...] = field(default_factory=tuple)


def corollary_coeffs(p: CSBIParams, case: CaseClass):
    """Coefficients of the limiting frequency SDE for an admissible case."""
    if case.tag is Regime.CONTINUOUS:
        return GwfCoeffs(p.c1, p.c2, p.eta1, p.eta2)
    if case.tag is Regime.INDEP_STABLE_WITH_IMMIGRATION:
        a1 = _axis_coefficient(p.m1, E1)
        a2 = _axis_coefficient(p.m2, E2)
        lam = tuple(a for a in p.nu.atoms if a.weight > 0) if not _trivial(p.nu) else ()
        return Case2Coeffs(case.alpha, a1, a2, lam)
    if case.tag is Regime.MULTI_TYPE_STABLE:
        lam1 = tuple(a for a in p.m1.atoms if a.weight > 0) if not _trivial(p.m1) else ()
        lam2 = tuple(a for a in p.m2.atoms if a.weight > 0) if not _trivial(p.m2) else ()
        return Case3Coeffs(case.alpha, lam1, lam2)
    raise ValueError(f"no corollary coefficients for {case.tag.value}: {case.reason}")
