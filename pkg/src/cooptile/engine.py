"""Supervisory loop coordinating the tiling agents.

The engine runs in two modes. During *exploration*, each labeled
observation drives one cycle: the agents whose regions contain the point
propose a class, the highest-scoring proposal becomes the system
prediction, every proposer receives feedback, and geometric arbitration
then removes friction between the proposers. Three situations trigger
rearrangement:

* *incompetence* — no region contains the point: a new agent is created
  around it (half-width ``init_radius``) and immediately arbitrated
  against any agent it overlaps;
* *competition* — two proposers agree: with an overlap threshold set and
  exceeded, the higher-scoring agent absorbs the other (regions merged,
  loser destroyed), otherwise it pushes the other off;
* *conflict* — two proposers disagree: the higher-scoring agent pushes
  the other off, so disagreeing proposers never keep overlapping regions.

A push that cannot separate the two boxes with a single cut turns into an
absorption. During *exploitation* nothing mutates: the winning activated
agent answers, or the nearest agent (boundary distance, ties to the
lowest id) when the point is uncovered.

Cycles, arbitration order, and tie-breaks are all deterministic, so a
given (config, data, seed) always reproduces the same agent population.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import IO, Sequence

import numpy as np

from .agents import ContextAgent, EngineConfig, PerceptTracker
from .geometry import Hypercube
from .linear import LinearModelConfig

#: Maximal score difference still treated as a tie in winner selection.
SCORE_TIE_TOL = 1e-12

CLASS_UNIVERSE = (0, 1)


class NcsKind(str, Enum):
    INCOMPETENCE = "incompetence"
    COMPETITION = "competition"
    CONFLICT = "conflict"


class Resolution(str, Enum):
    PUSH = "push"
    ABSORB = "absorb"
    CREATE = "create"
    NEAREST = "nearest"


@dataclass(frozen=True)
class NcsEvent:
    """One detected non-cooperative situation and how it was resolved.

    ``participants`` lists agent ids, higher-scoring (or created/nearest)
    agent first.
    """

    kind: NcsKind
    participants: tuple[int, ...]
    resolution: Resolution

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "participants": [int(i) for i in self.participants],
            "resolution": self.resolution.value,
        }


@dataclass
class CycleReport:
    """Trace record of one engine cycle (exploration or exploitation)."""

    cycle: int
    activated_ids: list[int]
    winner_id: int | None
    prediction: int
    ncs_events: list[NcsEvent] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "cycle": int(self.cycle),
            "activated_ids": [int(i) for i in self.activated_ids],
            "winner_id": None if self.winner_id is None else int(self.winner_id),
            "prediction": int(self.prediction),
            "ncs_events": [e.to_dict() for e in self.ncs_events],
        }


def select_winner(
    activated: Sequence[ContextAgent],
    x,
    cfg: EngineConfig,
    proposals: dict[int, int] | None = None,
) -> tuple[ContextAgent, int]:
    """Pick the proposal of the highest-scoring activated agent.

    Agents whose scores lie within ``SCORE_TIE_TOL`` of the maximum tie;
    the tied agents then vote and the majority class wins, with a
    remaining tie going to the smallest class label. The reported winner
    is the lowest-id tied agent proposing the chosen class.
    """
    if not activated:
        raise ValueError("select_winner needs at least one activated agent")
    if proposals is None:
        proposals = {a.id: a.propose(x) for a in activated}
    scores = {a.id: a.score(cfg) for a in activated}
    top = max(scores.values())
    tied = [a for a in activated if scores[a.id] >= top - SCORE_TIE_TOL]
    if len(tied) == 1:
        return tied[0], proposals[tied[0].id]
    votes: dict[int, int] = {}
    for a in tied:
        votes[proposals[a.id]] = votes.get(proposals[a.id], 0) + 1
    best_count = max(votes.values())
    prediction = min(c for c, n in votes.items() if n == best_count)
    winner = min((a for a in tied if proposals[a.id] == prediction), key=lambda a: a.id)
    return winner, prediction


class Engine:
    """Owns the agent population and executes the cycle loop.

    One engine is single-writer: cycles run sequentially. Distinct engines
    are independent and may run in parallel.
    """

    def __init__(self, cfg: EngineConfig, model_cfg: LinearModelConfig, dim: int | None = None):
        self.cfg = cfg
        self.model_cfg = model_cfg
        self.dim = dim
        self.agents: list[ContextAgent] = []  # alive agents, ascending id
        self.percepts = PerceptTracker()
        self.cycle = 0
        self.class_universe = CLASS_UNIVERSE
        self._next_id = 0

    # -- exploration ---------------------------------------------------

    def explore_step(self, x, y: int) -> CycleReport:
        """Process one labeled observation and adapt the tiling."""
        x = np.asarray(x, dtype=float)
        if self.dim is None:
            self.dim = x.size
        if y not in self.class_universe:
            raise ValueError(f"label {y!r} outside class universe {self.class_universe}")
        self.percepts.update(x)
        events: list[NcsEvent] = []
        activated = [a for a in self.agents if a.region.contains(x)]
        if not activated:
            _, prediction = self._resolve_incompetence(x, y, events)
            winner_id = None
            activated_ids: list[int] = []
        else:
            activated_ids = [a.id for a in activated]
            proposals = {a.id: a.propose(x) for a in activated}
            winner, prediction = select_winner(activated, x, self.cfg, proposals)
            winner_id = winner.id
            for a in activated:
                a.apply_feedback(proposals[a.id] == y, x, int(y), self.cfg)
            self._resolve_pairs(list(combinations(activated, 2)), proposals, events)
        report = CycleReport(self.cycle, activated_ids, winner_id, prediction, events)
        self.cycle += 1
        self.agents = [a for a in self.agents if a.alive]
        return report

    def train(self, X, Y, trace: IO | None = None) -> "Engine":
        """Run the configured number of shuffled exploration passes."""
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("X must be a non-empty 2-d matrix")
        if X.shape[0] != Y.shape[0]:
            raise ValueError("X and Y row counts differ")
        rng = np.random.default_rng(self.cfg.seed)
        for _ in range(self.cfg.exploration_passes):
            for i in rng.permutation(X.shape[0]):
                report = self.explore_step(X[i], int(Y[i]))
                if trace is not None:
                    trace.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
        return self

    def resolve_incompetence(self, x, y: int) -> tuple[ContextAgent, list[NcsEvent]]:
        """Create an agent around an uncovered point and arbitrate overlaps."""
        events: list[NcsEvent] = []
        x = np.asarray(x, dtype=float)
        if self.dim is None:
            self.dim = x.size
        created, _ = self._resolve_incompetence(x, y, events)
        self.agents = [a for a in self.agents if a.alive]
        return created, events

    def _resolve_incompetence(self, x, y: int, events: list[NcsEvent]) -> tuple[ContextAgent, int]:
        region = Hypercube.around(x, self.cfg.init_radius)
        model = self.model_cfg.build(self.dim)
        model.partial_fit(x, int(y))
        created = ContextAgent(
            id=self._next_id, region=region, model=model, creation_cycle=self.cycle
        )
        self._next_id += 1
        self.agents.append(created)
        events.append(NcsEvent(NcsKind.INCOMPETENCE, (created.id,), Resolution.CREATE))
        prediction = created.propose(x)
        proposals = {created.id: prediction}
        pairs = []
        for other in self.agents:
            if other is created or not other.alive:
                continue
            if created.region.intersection_volume(other.region) > 0.0:
                proposals[other.id] = other.propose(x)
                pairs.append((created, other))
        self._resolve_pairs(pairs, proposals, events)
        return created, prediction

    def resolve_pairwise(
        self, participants: Sequence[ContextAgent], proposals: dict[int, int]
    ) -> list[NcsEvent]:
        """Arbitrate every overlapping pair among ``participants``."""
        events: list[NcsEvent] = []
        self._resolve_pairs(list(combinations(participants, 2)), proposals, events)
        self.agents = [a for a in self.agents if a.alive]
        return events

    def _resolve_pairs(
        self,
        pairs: list[tuple[ContextAgent, ContextAgent]],
        proposals: dict[int, int],
        events: list[NcsEvent],
    ) -> None:
        cfg = self.cfg

        def pair_key(pair: tuple[ContextAgent, ContextAgent]):
            a, b = pair
            return (-max(a.score(cfg), b.score(cfg)), min(a.id, b.id), max(a.id, b.id))

        for a, b in sorted(pairs, key=pair_key):
            if not (a.alive and b.alive):
                continue
            if a.region.intersection_volume(b.region) == 0.0:
                continue
            same = proposals[a.id] == proposals[b.id]
            kind = NcsKind.COMPETITION if same else NcsKind.CONFLICT
            sa, sb = a.score(cfg), b.score(cfg)
            if sa > sb or (sa == sb and a.id < b.id):
                winner, loser = a, b
            else:
                winner, loser = b, a
            if (
                same
                and cfg.overlap_threshold is not None
                and a.region.overlap_index(b.region) > cfg.overlap_threshold
            ):
                self._absorb(winner, loser)
                events.append(NcsEvent(kind, (winner.id, loser.id), Resolution.ABSORB))
                continue
            pushed = winner.region.push(loser.region)
            if pushed is None:
                self._absorb(winner, loser)
                events.append(NcsEvent(kind, (winner.id, loser.id), Resolution.ABSORB))
            else:
                loser.region = pushed
                events.append(NcsEvent(kind, (winner.id, loser.id), Resolution.PUSH))

    @staticmethod
    def _absorb(winner: ContextAgent, loser: ContextAgent) -> None:
        winner.region = winner.region.enclose(loser.region)
        loser.alive = False

    # -- exploitation ----------------------------------------------------

    def exploit_step(self, x) -> CycleReport:
        """Classify one point without mutating any agent."""
        if not self.agents:
            raise RuntimeError("engine has no agents; train before predicting")
        x = np.asarray(x, dtype=float)
        activated = [a for a in self.agents if a.region.contains(x)]
        if activated:
            winner, prediction = select_winner(activated, x, self.cfg)
            return CycleReport(self.cycle, [a.id for a in activated], winner.id, prediction)
        nearest = min(self.agents, key=lambda a: (a.region.distance_to(x), a.id))
        prediction = nearest.propose(x)
        event = NcsEvent(NcsKind.INCOMPETENCE, (nearest.id,), Resolution.NEAREST)
        return CycleReport(self.cycle, [], nearest.id, prediction, [event])

    def predict(self, x) -> int:
        return self.exploit_step(x).prediction

    def predict_batch(self, X) -> np.ndarray:
        """Vectorized exploitation over rows of ``X``.

        Row for row this returns exactly ``exploit_step(x).prediction``;
        the common cases (unique top score, nearest fallback) are batched,
        score ties fall back to the exact per-point path.
        """
        if not self.agents:
            raise RuntimeError("engine has no agents; train before predicting")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be a 2-d matrix")
        n = X.shape[0]
        out = np.empty(n, dtype=int)
        lowers = np.array([a.region.lower for a in self.agents])
        uppers = np.array([a.region.upper for a in self.agents])
        scores = np.array([a.score(self.cfg) for a in self.agents])
        inside = np.all((X[:, None, :] >= lowers[None]) & (X[:, None, :] <= uppers[None]), axis=2)
        covered = inside.any(axis=1)
        masked = np.where(inside, scores[None, :], -np.inf)
        top = masked.max(axis=1)
        tie_count = (masked >= top[:, None] - SCORE_TIE_TOL).sum(axis=1)
        unique_top = covered & (tie_count == 1)
        winner_idx = masked.argmax(axis=1)
        for k, agent in enumerate(self.agents):
            rows = unique_top & (winner_idx == k)
            if rows.any():
                out[rows] = agent.model.predict_batch(X[rows])
        for i in np.nonzero(covered & (tie_count > 1))[0]:
            out[i] = self.exploit_step(X[i]).prediction
        uncovered = ~covered
        if uncovered.any():
            Xu = X[uncovered]
            dist = np.empty((Xu.shape[0], len(self.agents)))
            for k in range(len(self.agents)):
                gap = np.maximum(
                    np.maximum(lowers[k][None, :] - Xu, Xu - uppers[k][None, :]), 0.0
                )
                dist[:, k] = (gap * gap).sum(axis=1)
            nearest_idx = dist.argmin(axis=1)  # first minimum = lowest id
            sub = np.empty(Xu.shape[0], dtype=int)
            for k, agent in enumerate(self.agents):
                rows = nearest_idx == k
                if rows.any():
                    sub[rows] = agent.model.predict_batch(Xu[rows])
            out[uncovered] = sub
        return out

    # -- persistence -----------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-ready view of config, cycle counter and agent population."""
        return {
            "config": self.cfg.to_dict(),
            "model_config": self.model_cfg.to_dict(),
            "dim": self.dim,
            "cycle": int(self.cycle),
            "next_agent_id": int(self._next_id),
            "agents": [a.to_dict() for a in sorted(self.agents, key=lambda a: a.id)],
        }

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True)

    @classmethod
    def from_snapshot(cls, snap: dict) -> "Engine":
        cfg = EngineConfig.from_dict(snap["config"])
        model_cfg = LinearModelConfig.from_dict(snap["model_config"])
        engine = cls(cfg, model_cfg, dim=snap.get("dim"))
        engine.cycle = int(snap["cycle"])
        engine._next_id = int(snap["next_agent_id"])
        engine.agents = [ContextAgent.from_dict(d) for d in snap["agents"]]
        return engine
