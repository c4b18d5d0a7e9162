"""Heralded atom-atom entanglement: success probability, timing and rates.

A generation attempt pumps both atoms, excites them with a π pulse and waits
for the photon clicks.  Every ``n1`` failed attempts both atoms are cooled.
An attempt heralds entanglement with probability ``P_aa``.

Two analytic timing conventions exist:

``epoch``
    ``t = N_epoch (N1 t_att + t_cool)`` with ``N_epoch = max(1, 1/(P_aa N1))``
    (at least one cooling interval per generated pair).
``exact``
    The renewal expectation of the attempt sequence.  With ``G`` geometric,
    ``E[t] = t_att/P_aa + E[(G-1)//N1] t_cool`` and
    ``E[(G-1)//N1] = q^N1 / (1 - q^N1)``, ``q = 1 - P_aa``.

``simulate`` runs the attempt sequence itself, including atom loss and trap
reloads.  Trials are split into fixed chunks; chunk ``k`` draws from a Philox
stream keyed by ``(seed, k)`` so the result never depends on the number of
worker processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..core.errors import AtomLinkError, ParameterError
from ..core.observer import NoopObserver, Observer, ProgressEvent
from .cavity import RB87_D2, AtomLine, CavityGeometry, MirrorSet, cqed_params
from .collection import rb_efficiency, rb_free_space_efficiency
from .mirror_opt import EfficiencyObjective, optimize_t_high

logger = logging.getLogger(__name__)

BELL_SUCCESS = 0.5
CHUNK_TRIALS = 4096
CONFIDENCE_Z = 1.96
_NEVER = np.iinfo(np.int64).max


class RateConvention(str, Enum):
    EPOCH = "epoch"
    EXACT = "exact"


@dataclass(frozen=True)
class DetectionChain:
    """Photon detection path of one node: fiber link plus SPCM."""

    detector_qe: float = 0.7
    fiber_length_km: float = 0.0
    attenuation_length_km: float = 1.091

    def __post_init__(self) -> None:
        if not 0.0 < self.detector_qe <= 1.0:
            raise ParameterError("detector_qe must lie in (0, 1]")
        if not self.fiber_length_km >= 0.0:
            raise ParameterError("fiber_length_km must be non-negative")
        if not self.attenuation_length_km > 0.0:
            raise ParameterError("attenuation_length_km must be positive")

    @property
    def bell_success(self) -> float:
        return BELL_SUCCESS

    @property
    def efficiency(self) -> float:
        """``η_det = QE · exp(-L_f/L_att)``."""

        return self.detector_qe * math.exp(-self.fiber_length_km / self.attenuation_length_km)

    def with_fiber_length(self, fiber_length_km: float) -> DetectionChain:
        return DetectionChain(self.detector_qe, fiber_length_km, self.attenuation_length_km)


@dataclass(frozen=True)
class ProtocolTimings:
    """Durations (s) of the generation and verification sequence.

    Atom loss per node is calibrated so that one block of ``n1`` attempts plus
    a cooling interval loses the atom with probability ``p_loss_per_block``;
    background collisions take their share through ``background_lifetime``
    and photon-scatter heating the rest.
    """

    t_load: float = 100e-3
    t_pump: float = 6e-6
    t_pi: float = 30e-9
    t_det: float = 1e-6
    t_cool: float = 100e-6
    n1: int = 10
    p_loss_per_block: float = 3e-5
    background_lifetime: float = 10.0
    n_scatter: float = 5.0
    cool_after_success: bool = False
    t_microwave: float = 50e-6
    t_rotation: float = 500e-6
    t_measure: float = 3e-3
    t_verify_cool: float = 100e-6
    step_success: tuple[float, ...] = field(default=(0.99, 0.98, 0.94, 0.99))

    def __post_init__(self) -> None:
        for name in (
            "t_load",
            "t_pump",
            "t_pi",
            "t_det",
            "t_cool",
            "background_lifetime",
            "t_microwave",
            "t_rotation",
            "t_measure",
            "t_verify_cool",
        ):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be positive")
        if int(self.n1) != self.n1 or self.n1 < 1:
            raise ParameterError("n1 must be a positive integer")
        if not 0.0 <= self.p_loss_per_block < 1.0:
            raise ParameterError("p_loss_per_block must lie in [0, 1)")
        if not self.n_scatter > 0.0:
            raise ParameterError("n_scatter must be positive")
        object.__setattr__(self, "step_success", tuple(float(p) for p in self.step_success))
        if any(not 0.0 <= p <= 1.0 for p in self.step_success):
            raise ParameterError("step_success entries must lie in [0, 1]")

    @property
    def t_attempt(self) -> float:
        """One attempt: pump, π pulse, detection."""

        return self.t_pump + self.t_pi + self.t_det

    @property
    def block_duration(self) -> float:
        return self.n1 * self.t_attempt + self.t_cool


@dataclass(frozen=True)
class McResult:
    trials: int
    mean_time_to_entanglement: float
    rate: float
    mean_attempts: float
    mean_epochs: float
    reload_events: int
    confidence_halfwidth: float

    @property
    def standard_error(self) -> float:
        return self.confidence_halfwidth / CONFIDENCE_Z


@dataclass(frozen=True)
class LossHazards:
    """Per-event loss probabilities for the atom pair."""

    attempt: float
    cooling: float


def _check_probability(p_aa: float) -> None:
    if not 0.0 < p_aa <= 1.0:
        raise ParameterError("p_aa must lie in (0, 1]")


def p_atom_atom(eta_rb: float, chain: DetectionChain) -> float:
    """``P_aa = ½ (η^(Rb) η_det)²``."""

    if not 0.0 <= eta_rb <= 1.0:
        raise ParameterError("eta_rb must lie in [0, 1]")
    return chain.bell_success * (eta_rb * chain.efficiency) ** 2


def analytic_entanglement_time(
    p_aa: float,
    timings: ProtocolTimings = ProtocolTimings(),
    convention: RateConvention = RateConvention.EPOCH,
) -> float:
    _check_probability(p_aa)
    convention = RateConvention(convention)
    if convention is RateConvention.EPOCH:
        n_epoch = max(1.0, 1.0 / (p_aa * timings.n1))
        return n_epoch * timings.block_duration

    # log space keeps q^N1 away from 1.0 for vanishing p_aa
    if p_aa < 1.0:
        log_q = timings.n1 * math.log1p(-p_aa)
        failed_blocks = math.exp(log_q) / -math.expm1(log_q)
    else:
        failed_blocks = 0.0
    elapsed = timings.t_attempt / p_aa + failed_blocks * timings.t_cool
    if timings.cool_after_success:
        elapsed += timings.t_cool
    return elapsed


def entanglement_rate(
    p_aa: float,
    timings: ProtocolTimings = ProtocolTimings(),
    convention: RateConvention = RateConvention.EPOCH,
) -> float:
    return 1.0 / analytic_entanglement_time(p_aa, timings, convention)


def heating_loss_per_photon(timings: ProtocolTimings) -> float:
    """Loss probability per scattered photon implied by ``p_loss_per_block``."""

    background = timings.block_duration / timings.background_lifetime
    remainder = timings.p_loss_per_block - background
    if remainder < 0.0:
        raise ParameterError(
            "p_loss_per_block is below the background-collision loss of one block"
        )
    return remainder / (timings.n1 * timings.n_scatter)


def loss_hazards(timings: ProtocolTimings) -> LossHazards:
    p_heat = heating_loss_per_photon(timings)
    node_attempt = timings.t_attempt / timings.background_lifetime + timings.n_scatter * p_heat
    node_cooling = timings.t_cool / timings.background_lifetime
    return LossHazards(
        attempt=1.0 - (1.0 - node_attempt) ** 2,
        cooling=1.0 - (1.0 - node_cooling) ** 2,
    )


def expected_pair_lifetime(timings: ProtocolTimings = ProtocolTimings()) -> float:
    """Mean time until either atom is lost while addressing and cooling continuously."""

    hazards = loss_hazards(timings)
    survival = (1.0 - hazards.attempt) ** timings.n1 * (1.0 - hazards.cooling)
    if survival >= 1.0:
        return math.inf
    return timings.block_duration / (1.0 - survival)


def verification_duration(timings: ProtocolTimings = ProtocolTimings()) -> float:
    return timings.t_microwave + timings.t_rotation + timings.t_measure + timings.t_verify_cool


def verification_success(timings: ProtocolTimings = ProtocolTimings()) -> float:
    return math.prod(timings.step_success)


def _first_event(rng: np.random.Generator, hazard: float, size: int) -> np.ndarray:
    if hazard <= 0.0:
        return np.full(size, _NEVER, dtype=np.int64)
    return rng.geometric(hazard, size=size).astype(np.int64)


@dataclass(frozen=True)
class _ChunkOutcome:
    index: int
    times: np.ndarray
    attempts: np.ndarray
    cooling: np.ndarray
    reloads: int


def _simulate_chunk(
    p_aa: float,
    timings: ProtocolTimings,
    hazards: Optional[LossHazards],
    seed: int,
    trials: int,
    chunk_index: int,
) -> _ChunkOutcome:
    start = chunk_index * CHUNK_TRIALS
    size = min(CHUNK_TRIALS, trials - start)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk_index])))
    n1 = int(timings.n1)
    t_att = timings.t_attempt

    times = np.zeros(size)
    attempts = np.zeros(size, dtype=np.int64)
    cooling = np.zeros(size, dtype=np.int64)
    reloads = 0
    pending = np.arange(size)

    while pending.size:
        m = pending.size
        g = rng.geometric(p_aa, size=m).astype(np.int64)
        blocks = (g - 1) // n1
        if hazards is None:
            lost_attempt = np.zeros(m, dtype=bool)
            lost_cooling = np.zeros(m, dtype=bool)
            la = lc = np.zeros(m, dtype=np.int64)
        else:
            la = _first_event(rng, hazards.attempt, m)
            lc = _first_event(rng, hazards.cooling, m)
            lost_attempt = la <= g
            lost_cooling = lc <= blocks
            # the earlier of the two loss events ends the segment
            attempt_first = la.astype(float) <= lc.astype(float) * n1
            lost_attempt &= ~lost_cooling | attempt_first
            lost_cooling &= ~lost_attempt

        done = ~(lost_attempt | lost_cooling)
        seg_attempts = np.where(done, g, 0)
        seg_cooling = np.where(done, blocks, 0)
        if timings.cool_after_success:
            seg_cooling = seg_cooling + done

        la_cooling = (np.where(lost_attempt, la, 1) - 1) // n1
        seg_attempts = np.where(lost_attempt, la, seg_attempts)
        seg_cooling = np.where(lost_attempt, la_cooling, seg_cooling)
        seg_attempts = np.where(lost_cooling, np.where(lost_cooling, lc, 0) * n1, seg_attempts)
        seg_cooling = np.where(lost_cooling, lc, seg_cooling)

        lost = ~done
        seg_time = seg_attempts * t_att + seg_cooling * timings.t_cool + lost * timings.t_load
        times[pending] += seg_time
        attempts[pending] += seg_attempts
        cooling[pending] += seg_cooling
        reloads += int(np.count_nonzero(lost))
        pending = pending[lost]

    return _ChunkOutcome(chunk_index, times, attempts, cooling, reloads)


def simulate(
    p_aa: float,
    timings: ProtocolTimings = ProtocolTimings(),
    trials: int = 100_000,
    seed: int = 0,
    *,
    include_loss: bool = True,
    workers: int = 1,
    observer: Optional[Observer] = None,
) -> McResult:
    """Monte Carlo of the generation sequence, ``trials`` independent pairs."""

    _check_probability(p_aa)
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    if seed < 0:
        raise ParameterError("seed must be non-negative")
    observer = observer or NoopObserver()
    hazards = loss_hazards(timings) if include_loss else None

    n_chunks = math.ceil(trials / CHUNK_TRIALS)
    run = partial(_simulate_chunk, p_aa, timings, hazards, seed, trials)
    outcomes: list[_ChunkOutcome] = []
    if workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for outcome in pool.map(run, range(n_chunks)):
                outcomes.append(outcome)
                _report_chunk(observer, outcome, n_chunks)
    else:
        for index in range(n_chunks):
            outcome = run(index)
            outcomes.append(outcome)
            _report_chunk(observer, outcome, n_chunks)

    times = np.concatenate([o.times for o in outcomes])
    attempts = np.concatenate([o.attempts for o in outcomes])
    cooling = np.concatenate([o.cooling for o in outcomes])
    reloads = sum(o.reloads for o in outcomes)

    mean_time = math.fsum(times.tolist()) / trials
    if trials > 1:
        variance = math.fsum(((times - mean_time) ** 2).tolist()) / (trials - 1)
    else:
        variance = 0.0
    result = McResult(
        trials=trials,
        mean_time_to_entanglement=mean_time,
        rate=1.0 / mean_time,
        mean_attempts=int(attempts.sum()) / trials,
        mean_epochs=int(cooling.sum()) / trials,
        reload_events=reloads,
        confidence_halfwidth=CONFIDENCE_Z * math.sqrt(variance / trials),
    )
    observer(
        ProgressEvent.SIMULATION_COMPLETE,
        {"trials": trials, "mean_time": mean_time, "reloads": reloads},
    )
    return result


def _report_chunk(observer: Observer, outcome: _ChunkOutcome, n_chunks: int) -> None:
    logger.debug("chunk %d/%d simulated (%d reloads)", outcome.index + 1, n_chunks, outcome.reloads)
    observer(
        ProgressEvent.CHUNK_SIMULATED,
        {"chunk": outcome.index, "trials": int(outcome.times.size)},
        chunks=n_chunks,
    )


@dataclass(frozen=True)
class CavityDesign:
    """Cavity node: geometry and coatings; ``t_high=None`` means optimise it."""

    name: str
    length: float
    mirror_roc: float
    t_low: float = 10e-6
    loss_rt: float = 40e-6
    t_high: Optional[float] = None

    def geometry(self) -> CavityGeometry:
        return CavityGeometry(length=self.length, mirror_roc=self.mirror_roc)

    def resolve_mirrors(self, line: AtomLine = RB87_D2) -> MirrorSet:
        t_high = self.t_high
        if t_high is None:
            result = optimize_t_high(
                self.geometry(), self.t_low, self.loss_rt, line, EfficiencyObjective.RB
            )
            t_high = result.t_high_opt
        return MirrorSet(t_high=t_high, t_low=self.t_low, loss_rt=self.loss_rt)


@dataclass(frozen=True)
class LensDesign:
    """Free-space node: a lens of numerical aperture ``numerical_aperture``."""

    name: str
    numerical_aperture: float


Design = Union[CavityDesign, LensDesign]


@dataclass(frozen=True)
class RateRow:
    design: str
    kind: str
    eta_rb: float
    p_aa: float
    rate: float
    valid: bool = True


def design_efficiency(design: Design, line: AtomLine = RB87_D2) -> float:
    """``η^(Rb)`` of one node design."""

    if isinstance(design, LensDesign):
        return rb_free_space_efficiency(design.numerical_aperture)
    mirrors = design.resolve_mirrors(line)
    params = cqed_params(design.geometry(), mirrors, line)
    return rb_efficiency(params, mirrors, line)


def _rate_row(
    name: str,
    kind: str,
    eta_rb: float,
    timings: ProtocolTimings,
    chain: DetectionChain,
    convention: RateConvention,
) -> RateRow:
    p_aa = p_atom_atom(eta_rb, chain)
    if p_aa <= 0.0:
        logger.warning("design %s has zero entanglement probability", name)
        return RateRow(name, kind, eta_rb, 0.0, 0.0, valid=False)
    return RateRow(name, kind, eta_rb, p_aa, entanglement_rate(p_aa, timings, convention))


def rate_sweep(
    designs: Sequence[Design],
    timings: ProtocolTimings = ProtocolTimings(),
    chain: DetectionChain = DetectionChain(),
    *,
    convention: RateConvention = RateConvention.EPOCH,
    line: AtomLine = RB87_D2,
) -> list[RateRow]:
    """One row per design; failing designs become invalid rows."""

    rows: list[RateRow] = []
    for design in designs:
        kind = "lens" if isinstance(design, LensDesign) else "cavity"
        try:
            eta_rb = design_efficiency(design, line)
        except AtomLinkError as exc:
            logger.warning("design %s invalid: %s", design.name, exc)
            rows.append(RateRow(design.name, kind, math.nan, math.nan, math.nan, valid=False))
            continue
        rows.append(_rate_row(design.name, kind, eta_rb, timings, chain, convention))
    return rows


def fiber_length_sweep(
    eta_rb: float,
    lengths_km: Iterable[float],
    timings: ProtocolTimings = ProtocolTimings(),
    chain: DetectionChain = DetectionChain(),
    *,
    convention: RateConvention = RateConvention.EPOCH,
) -> list[RateRow]:
    """Rate as a function of the fiber link length for one node efficiency."""

    rows = []
    for length in lengths_km:
        link = chain.with_fiber_length(float(length))
        rows.append(_rate_row(f"{float(length):g} km", "fiber", eta_rb, timings, link, convention))
    return rows


__all__ = [
    "BELL_SUCCESS",
    "CHUNK_TRIALS",
    "CavityDesign",
    "Design",
    "DetectionChain",
    "LensDesign",
    "LossHazards",
    "McResult",
    "ProtocolTimings",
    "RateConvention",
    "RateRow",
    "analytic_entanglement_time",
    "design_efficiency",
    "entanglement_rate",
    "expected_pair_lifetime",
    "fiber_length_sweep",
    "heating_loss_per_photon",
    "loss_hazards",
    "p_atom_atom",
    "rate_sweep",
    "simulate",
    "verification_duration",
    "verification_success",
]
