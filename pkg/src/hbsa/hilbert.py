"""Basis labels, sparse two-photon state vectors and hyper-Bell states.

A basis element is a :class:`JointBasis`: one ``(mode, polarization,
time-bin)`` label per photon plus the three quantum-dot spins written in the
``+/-`` basis.  States are stored sparsely as ``{JointBasis: complex}`` and are
allowed to be sub-normalized, so success probabilities fall out of the final
squared norm.
"""
from __future__ import annotations

import itertools
import math
from enum import Enum
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

from hbsa.errors import DegenerateInputError, StageMismatchError

PRUNE_THRESHOLD = 1e-14
COMPARE_TOL = 1e-10

SQRT1_2 = 1.0 / math.sqrt(2.0)


class Polarization(str, Enum):
    R = "R"
    L = "L"

    def flipped(self) -> "Polarization":
        return Polarization.L if self is Polarization.R else Polarization.R


class TimeBin(str, Enum):
    SHORT = "s"
    LONG = "l"
    ERASED = "erased"


class SpatialMode(str, Enum):
    """Input arms before the final block, detector arms ``kj`` after it."""

    ARM1 = "1"
    ARM2 = "2"
    D11 = "11"
    D12 = "12"
    D21 = "21"
    D22 = "22"

    @property
    def is_detector(self) -> bool:
        return len(self.value) == 2

    @classmethod
    def detector(cls, arm: "SpatialMode", output: int) -> "SpatialMode":
        """Detector arm reached from input ``arm`` through output port 1 or 2."""
        return cls(arm.value + str(output))


INPUT_ARMS = (SpatialMode.ARM1, SpatialMode.ARM2)
DETECTOR_ARMS = (SpatialMode.D11, SpatialMode.D12, SpatialMode.D21, SpatialMode.D22)


class SpinVal(str, Enum):
    PLUS = "+"
    MINUS = "-"

    def flipped(self) -> "SpinVal":
        return SpinVal.MINUS if self is SpinVal.PLUS else SpinVal.PLUS


class Photon(str, Enum):
    A = "a"
    B = "b"


class Stage(str, Enum):
    INPUT = "input"
    DETECTOR = "detector"


class PhotonLabel(NamedTuple):
    mode: SpatialMode
    pol: Polarization
    time: TimeBin


Spins = tuple  # (SpinVal, SpinVal, SpinVal)


class JointBasis(NamedTuple):
    a: PhotonLabel
    b: PhotonLabel
    spins: Spins

    def photon(self, which: Photon) -> PhotonLabel:
        return self.a if which is Photon.A else self.b

    def with_photon(self, which: Photon, label: PhotonLabel) -> "JointBasis":
        if which is Photon.A:
            return JointBasis(label, self.b, self.spins)
        return JointBasis(self.a, label, self.spins)


ALL_SPINS = tuple(itertools.product((SpinVal.PLUS, SpinVal.MINUS), repeat=3))
INITIAL_SPINS = (SpinVal.PLUS, SpinVal.PLUS, SpinVal.PLUS)


def spins_str(spins: Spins) -> str:
    return "".join(s.value for s in spins)


def parse_spins(text: str) -> Spins:
    if len(text) != 3 or any(c not in "+-" for c in text):
        raise ValueError(f"spin triple must be three of '+'/'-', got {text!r}")
    return tuple(SpinVal(c) for c in text)


def _stage_of(label: PhotonLabel) -> Stage:
    if label.mode.is_detector:
        if label.time is not TimeBin.ERASED:
            raise StageMismatchError(f"detector-arm label with live time-bin: {label}")
        return Stage.DETECTOR
    if label.time is TimeBin.ERASED:
        raise StageMismatchError(f"erased time-bin before the final block: {label}")
    return Stage.INPUT


class StateVector:
    """Immutable sparse map from :class:`JointBasis` to complex amplitude.

    Every state carries a stage tag; a state never mixes input-arm and
    detector-arm labels.  Amplitudes with modulus at or below ``prune`` are
    dropped on construction.
    """

    __slots__ = ("_amps", "_stage")

    def __init__(
        self,
        amplitudes: Mapping[JointBasis, complex] | Iterable[tuple[JointBasis, complex]] = (),
        stage: Stage | None = None,
        prune: float = PRUNE_THRESHOLD,
    ):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        amps: dict[JointBasis, complex] = {}
        for key, value in items:
            amps[key] = amps.get(key, 0j) + complex(value)
        amps = {k: v for k, v in amps.items() if abs(v) > prune}
        seen = {_stage_of(p) for k in amps for p in (k.a, k.b)}
        if len(seen) > 1:
            raise StageMismatchError("state mixes input-arm and detector-arm labels")
        if seen:
            found = seen.pop()
            if stage is not None and stage is not found:
                raise StageMismatchError(f"labels are {found.value}-stage, declared {stage.value}")
            stage = found
        self._amps = amps
        self._stage = Stage.INPUT if stage is None else stage

    @classmethod
    def _trusted(cls, amps: dict, stage: Stage, prune: float = PRUNE_THRESHOLD) -> "StateVector":
        # Skips label validation; callers guarantee stage consistency.
        obj = cls.__new__(cls)
        obj._amps = {k: v for k, v in amps.items() if abs(v) > prune}
        obj._stage = stage
        return obj

    @classmethod
    def zero(cls, stage: Stage = Stage.INPUT) -> "StateVector":
        return cls._trusted({}, stage)

    @property
    def stage(self) -> Stage:
        return self._stage

    @property
    def amplitudes(self) -> Mapping[JointBasis, complex]:
        return MappingProxyType(self._amps)

    def items(self):
        return self._amps.items()

    def amplitude(self, key: JointBasis) -> complex:
        return self._amps.get(key, 0j)

    def __iter__(self) -> Iterator[JointBasis]:
        return iter(self._amps)

    def __len__(self) -> int:
        return len(self._amps)

    def __bool__(self) -> bool:
        return bool(self._amps)

    def norm_sq(self) -> float:
        return math.fsum(abs(v) ** 2 for v in self._amps.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector._trusted({k: v * factor for k, v in self._amps.items()}, self._stage)

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise DegenerateInputError("cannot normalize the zero vector")
        return self.scaled(1.0 / n)

    def __mul__(self, factor: complex) -> "StateVector":
        return self.scaled(factor)

    __rmul__ = __mul__

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_stage(self, other)
        out = dict(self._amps)
        for k, v in other._amps.items():
            out[k] = out.get(k, 0j) + v
        return StateVector._trusted(out, self._stage)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + other.scaled(-1.0)

    def map_terms(
        self,
        rule: Callable[[JointBasis], Iterable[tuple[JointBasis, complex]]],
        stage: Stage | None = None,
    ) -> "StateVector":
        """Apply a linear map given by its action on basis elements."""
        out: dict[JointBasis, complex] = {}
        for key, amp in self._amps.items():
            for new_key, coeff in rule(key):
                out[new_key] = out.get(new_key, 0j) + amp * coeff
        return StateVector._trusted(out, self._stage if stage is None else stage)

    def map_photon(
        self,
        photon: Photon,
        rule: Callable[[PhotonLabel], Iterable[tuple[PhotonLabel, complex]]],
        stage: Stage | None = None,
    ) -> "StateVector":
        """Apply a single-photon linear map to one photon, by linearity."""
        cache: dict[PhotonLabel, list] = {}
        out: dict[JointBasis, complex] = {}
        is_a = photon is Photon.A
        for key, amp in self._amps.items():
            label = key.a if is_a else key.b
            images = cache.get(label)
            if images is None:
                images = cache[label] = list(rule(label))
            for new_label, coeff in images:
                new_key = (
                    JointBasis(new_label, key.b, key.spins)
                    if is_a
                    else JointBasis(key.a, new_label, key.spins)
                )
                out[new_key] = out.get(new_key, 0j) + amp * coeff
        return StateVector._trusted(out, self._stage if stage is None else stage)

    def __repr__(self) -> str:
        terms = sorted(self._amps.items())
        body = ", ".join(f"{format_basis(k)}: {v:.6g}" for k, v in terms[:6])
        more = f", ... ({len(terms)} terms)" if len(terms) > 6 else ""
        return f"StateVector<{self._stage.value}>({{{body}{more}}})"


def format_photon(photon: Photon, label: PhotonLabel) -> str:
    if label.time is TimeBin.ERASED:
        return f"{photon.value}{label.mode.value}{label.pol.value}"
    return f"{photon.value}{label.mode.value}{label.pol.value}{label.time.value}"


def format_basis(key: JointBasis) -> str:
    return (
        f"{format_photon(Photon.A, key.a)} {format_photon(Photon.B, key.b)}"
        f" |{spins_str(key.spins)}>"
    )


def _check_same_stage(a: StateVector, b: StateVector) -> None:
    if a.stage is not b.stage:
        raise StageMismatchError(f"cannot combine {a.stage.value}-stage and {b.stage.value}-stage states")


# --- hyper-Bell states -----------------------------------------------------


class Bell(str, Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @property
    def is_phi(self) -> bool:
        return self in (Bell.PHI_PLUS, Bell.PHI_MINUS)

    @property
    def sign(self) -> int:
        return 1 if self in (Bell.PHI_PLUS, Bell.PSI_PLUS) else -1

    @classmethod
    def of(cls, is_phi: bool, sign: int) -> "Bell":
        if is_phi:
            return cls.PHI_PLUS if sign > 0 else cls.PHI_MINUS
        return cls.PSI_PLUS if sign > 0 else cls.PSI_MINUS

    def with_sign(self, sign: int) -> "Bell":
        return Bell.of(self.is_phi, sign)

    def toggled_type(self) -> "Bell":
        return Bell.of(not self.is_phi, self.sign)

    def negated(self) -> "Bell":
        return Bell.of(self.is_phi, -self.sign)


# Two-photon terms of each Bell state: ((first_A, first_B), (second_A, second_B)).
# The relative sign of the second term is the Bell sign.
_SPATIAL_TERMS = {
    True: ((SpatialMode.ARM1, SpatialMode.ARM1), (SpatialMode.ARM2, SpatialMode.ARM2)),
    False: ((SpatialMode.ARM1, SpatialMode.ARM2), (SpatialMode.ARM2, SpatialMode.ARM1)),
}
_POL_TERMS = {
    True: ((Polarization.R, Polarization.R), (Polarization.L, Polarization.L)),
    False: ((Polarization.R, Polarization.L), (Polarization.L, Polarization.R)),
}
_TIME_TERMS = {
    True: ((TimeBin.LONG, TimeBin.LONG), (TimeBin.SHORT, TimeBin.SHORT)),
    False: ((TimeBin.SHORT, TimeBin.LONG), (TimeBin.LONG, TimeBin.SHORT)),
}


def bell_terms(dof: str, bell: Bell) -> list[tuple[tuple, float]]:
    """Normalized two-term expansion of a Bell state in one degree of freedom.

    ``dof`` is ``"S"``, ``"P"`` or ``"T"``.
    """
    table = {"S": _SPATIAL_TERMS, "P": _POL_TERMS, "T": _TIME_TERMS}[dof]
    first, second = table[bell.is_phi]
    return [(first, SQRT1_2), (second, bell.sign * SQRT1_2)]


class HyperBellLabel(NamedTuple):
    spatial: Bell
    polarization: Bell
    timebin: Bell

    def __str__(self) -> str:
        parts = []
        for tag, bell in zip("SPT", self):
            kind, sign = bell.value[:-1], bell.value[-1]
            parts.append(f"{kind}{tag}{sign}")
        return ",".join(parts)

    @classmethod
    def parse(cls, text: str) -> "HyperBellLabel":
        """Parse ``"phiS+,psiP-,phiT+"`` (case-insensitive, any tag order)."""
        found: dict[str, Bell] = {}
        pieces = [p.strip() for p in text.split(",")]
        if len(pieces) != 3:
            raise ValueError(f"expected three comma-separated Bell tags, got {text!r}")
        for piece in pieces:
            low = piece.lower()
            if len(low) != 5 or low[:3] not in ("phi", "psi") or low[3] not in "spt" or low[4] not in "+-":
                raise ValueError(f"malformed Bell tag {piece!r}; expected e.g. 'phiS+'")
            tag = low[3].upper()
            if tag in found:
                raise ValueError(f"degree of freedom {tag} given twice in {text!r}")
            found[tag] = Bell(low[:3] + low[4])
        return cls(found["S"], found["P"], found["T"])


ALL_LABELS = tuple(HyperBellLabel(*combo) for combo in itertools.product(Bell, repeat=3))


def bell_product(label: HyperBellLabel, spins: Spins = INITIAL_SPINS, amplitude: complex = 1.0) -> StateVector:
    """``amplitude * |S>|P>|T>`` with the given spin triple, input stage."""
    amps = {}
    for (modes, cs), (pols, cp), (times, ct) in itertools.product(
        bell_terms("S", label.spatial), bell_terms("P", label.polarization), bell_terms("T", label.timebin)
    ):
        key = JointBasis(
            PhotonLabel(modes[0], pols[0], times[0]),
            PhotonLabel(modes[1], pols[1], times[1]),
            tuple(spins),
        )
        amps[key] = amplitude * cs * cp * ct
    return StateVector._trusted(amps, Stage.INPUT)


def make_hyper_bell(label: HyperBellLabel) -> StateVector:
    """Normalized hyper-Bell state with all three spins prepared in ``|+>``."""
    return bell_product(label, INITIAL_SPINS)


# --- comparisons -------------------------------------------------------------


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _check_same_stage(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for key, v in small.items():
        w = large.amplitude(key)
        if w:
            total += (v.conjugate() * w) if small is a else (w.conjugate() * v)
    return total


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = COMPARE_TOL) -> bool:
    """True iff ``|<a|b>| >= (1 - tol) * ||a|| * ||b||``."""
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("global-phase comparison needs two nonzero states")
    return abs(inner_product(a, b)) >= (1.0 - tol) * na * nb


# --- measurement ---------------------------------------------------------------


class DetectorOutcome(NamedTuple):
    """Pair of clicked (detector arm, polarization) ports, photon A first."""

    port_a: tuple
    port_b: tuple

    def __str__(self) -> str:
        (ma, pa), (mb, pb) = self.port_a, self.port_b
        return f"a{ma.value}{pa.value}:b{mb.value}{pb.value}"

    @classmethod
    def parse(cls, text: str) -> "DetectorOutcome":
        """Parse the ``a<arm><pol>:b<arm><pol>`` grammar, e.g. ``a12L:b21R``."""
        try:
            left, right = text.strip().split(":")
            if left[0] != "a" or right[0] != "b":
                raise ValueError
            port_a = (SpatialMode(left[1:3]), Polarization(left[3:].upper()))
            port_b = (SpatialMode(right[1:3]), Polarization(right[3:].upper()))
        except (ValueError, IndexError):
            raise ValueError(f"malformed detector signature {text!r}; expected e.g. 'a11R:b22L'") from None
        if not (port_a[0].is_detector and port_b[0].is_detector):
            raise ValueError(f"signature {text!r} must name detector arms 11, 12, 21 or 22")
        return cls(port_a, port_b)


ALL_OUTCOMES = tuple(
    DetectorOutcome((ma, pa), (mb, pb))
    for ma, pa, mb, pb in itertools.product(DETECTOR_ARMS, Polarization, DETECTOR_ARMS, Polarization)
)


def outcome_distribution(state: StateVector) -> dict[tuple[DetectorOutcome, Spins], float]:
    """Born-rule probabilities of (detector signature, spin readout) pairs.

    Probabilities are not renormalized; they sum to the squared norm.
    """
    if state.stage is not Stage.DETECTOR:
        raise StageMismatchError("outcome distribution needs a detector-stage state")
    probs: dict[tuple[DetectorOutcome, Spins], float] = {}
    for key, amp in state.items():
        outcome = DetectorOutcome((key.a.mode, key.a.pol), (key.b.mode, key.b.pol))
        k = (outcome, key.spins)
        probs[k] = probs.get(k, 0.0) + abs(amp) ** 2
    return dict(sorted(probs.items()))


def state_fidelity(actual: StateVector, ideal: StateVector) -> float:
    """``|<actual|ideal>|^2`` after normalizing both states."""
    na, ni = actual.norm(), ideal.norm()
    if na == 0.0 or ni == 0.0:
        raise DegenerateInputError("fidelity is undefined for a zero state")
    return min(1.0, abs(inner_product(actual, ideal)) ** 2 / (na * na * ni * ni))
