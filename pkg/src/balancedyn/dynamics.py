"""LTD, CTD and BED step rules and the run loop."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .state import Edge, SignedState


class Status(str, enum.Enum):
    BALANCED = "Balanced"
    JAMMED = "Jammed"
    STEPLIMIT = "StepLimit"


_STATUS = {K.BALANCED: Status.BALANCED, K.JAMMED: Status.JAMMED, K.STEPLIMIT: Status.STEPLIMIT}
_KIND = {"LTD": K.LTD, "CTD": K.CTD, "BED": K.BED}


@dataclass(frozen=True)
class DynamicsKind:
    """Which step rule drives a run. ``p`` only matters for LTD."""

    variant: str
    p: float = 0.5

    def __post_init__(self):
        v = self.variant.upper()
        if v not in _KIND:
            raise ValueError(f"unknown dynamics {self.variant!r}; expected LTD, CTD or BED")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "variant", v)

    @classmethod
    def parse(cls, text: str) -> "DynamicsKind":
        """Accepts ``BED``, ``CTD``, ``LTD`` or ``LTD:<p>``."""
        name, _, p = text.partition(":")
        return cls(name, float(p)) if p else cls(name)

    def __str__(self) -> str:
        return f"LTD:{self.p:g}" if self.variant == "LTD" else self.variant


BED = DynamicsKind("BED")
CTD = DynamicsKind("CTD")


def LTD(p: float) -> DynamicsKind:
    return DynamicsKind("LTD", p)


@dataclass(frozen=True)
class StepOutcome:
    triad: tuple[int, int, int]
    flipped: Edge | None


@dataclass
class Trace:
    flips: list[Edge]
    attempts: int
    status: Status
    final: SignedState
    seed: int | None
    imbalance_after: list[int] | None = field(default=None, repr=False)

    @property
    def num_flips(self) -> int:
        return len(self.flips)

    def to_json(self) -> dict:
        out = {
            "status": self.status.value,
            "flips": [list(e) for e in self.flips],
            "attempts": self.attempts,
            "seed": self.seed,
        }
        if self.imbalance_after is not None:
            out["imbalance_after"] = self.imbalance_after
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _require_imbalanced(state: SignedState) -> None:
    if state.imbalanced == 0:
        raise ValueError("state is balanced; there is no imbalanced triad to select")


def _outcome(res) -> StepOutcome:
    a, b, c, x, y = res
    return StepOutcome((a, b, c), None if x < 0 else (min(x, y), max(x, y)))


def sample_imbalanced_triad(state: SignedState, rng: np.random.Generator) -> tuple[int, int, int]:
    _require_imbalanced(state)
    return K.sample_triad(*state.arrays, rng)


def ltd_step(state: SignedState, p: float, rng: np.random.Generator) -> StepOutcome:
    _require_imbalanced(state)
    return _outcome(K.ltd_step(*state.arrays, float(p), rng))


def ctd_step(state: SignedState, rng: np.random.Generator) -> StepOutcome:
    _require_imbalanced(state)
    return _outcome(K.ctd_step(*state.arrays, rng))


def bed_step(state: SignedState, rng: np.random.Generator) -> StepOutcome:
    _require_imbalanced(state)
    return _outcome(K.bed_step(*state.arrays, rng))


def default_max_steps(n: int) -> int:
    return 100 * n * n


def run(
    initial: SignedState,
    dyn: DynamicsKind,
    seed: int | None = None,
    max_steps: int | None = None,
    *,
    rng: np.random.Generator | None = None,
    record: bool = True,
    record_energy: bool = False,
    inplace: bool = False,
) -> Trace:
    """Run ``dyn`` from ``initial`` until balance, jamming (CTD) or ``max_steps`` attempts.

    The generator is ``numpy.random.default_rng(seed)`` (PCG64) unless ``rng`` is
    given. Runs that only need counts should use :func:`run_count`.
    """
    if max_steps is None:
        max_steps = default_max_steps(initial.n)
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    state = initial if inplace else initial.copy()
    if rng is None:
        rng = np.random.default_rng(seed)
    status, attempts, _, flips, energy = K.run_loop(
        *state.arrays, _KIND[dyn.variant], float(dyn.p), rng, int(max_steps), record, record_energy
    )
    return Trace(
        flips=[(int(u), int(v)) for u, v in flips],
        attempts=int(attempts),
        status=_STATUS[status],
        final=state,
        seed=seed,
        imbalance_after=energy.tolist() if record_energy else None,
    )


def run_count(
    state: SignedState, dyn: DynamicsKind, rng: np.random.Generator, max_steps: int | None = None
) -> tuple[Status, int, int]:
    """Run in place without recording flips; returns (status, flips, attempts)."""
    if max_steps is None:
        max_steps = default_max_steps(state.n)
    status, attempts, nflips, _, _ = K.run_loop(
        *state.arrays, _KIND[dyn.variant], float(dyn.p), rng, int(max_steps), False, False
    )
    return _STATUS[status], int(nflips), int(attempts)
