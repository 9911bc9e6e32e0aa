"""Executable model of safe contract administration.

Three mechanisms from the administrated-token threat model are captured as
one deterministic state machine driven by an injected logical clock:

* deferred maintenance: a trustee vote clears an action, and only after a
  fixed delay can a further vote call activate it, at most once;
* a board of trustees: every privileged operation requires membership, and
  clearing an action requires a vote threshold;
* safe pause: pausing flips a guard that force-expires at a deadline, and a
  new pause is refused until a cooldown measured from the un-freeze has
  passed.

All state changes flow through an event reducer, so replaying the event log
from the initial state reconstructs the live state field for field.  Clock
monotonicity is enforced against the last applied event: a mutating call
whose timestamp precedes it is rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    ActionAlreadyActivated,
    ClockWentBackwards,
    GuardFailedPaused,
    GuardFailedUnpaused,
    InvalidBoard,
    InvalidConfig,
    MalformedScript,
    NotTrustee,
    PauseCooldownActive,
)

__all__ = [
    "ACTION_COUNT",
    "DEFAULT_MAINTENANCE_DELAY",
    "DEFAULT_PAUSE_MAX",
    "DEFAULT_PAUSE_COOLDOWN",
    "EventKind",
    "GovEvent",
    "TrusteeBoard",
    "GovernanceConfig",
    "ActionState",
    "PauseState",
    "GovernanceState",
    "run_scenario",
    "replay_events",
    "replay_trace",
    "parse_script",
    "load_board_config",
    "write_trace",
    "read_trace",
]

# Fixed slot count for maintenance actions, addressed 0..9.
ACTION_COUNT = 10

# Default durations in seconds: two days of mandatory deferral, a pause that
# force-expires after three days, one day of re-pause cooldown.
DEFAULT_MAINTENANCE_DELAY = 172_800
DEFAULT_PAUSE_MAX = 259_200
DEFAULT_PAUSE_COOLDOWN = 86_400

SCRIPT_OPS = ("vote", "pause", "unpause", "query_cleared", "query_paused")


class EventKind(str, Enum):
    TRUSTEE_VOTED = "TrusteeVoted"
    ACTION_CLEARED = "ActionCleared"
    ACTION_ACTIVATED = "ActionActivated"
    SAFELY_PAUSED = "SafelyPaused"
    SAFELY_UNPAUSED = "SafelyUnpaused"


@dataclass(frozen=True)
class GovEvent:
    seq: int
    kind: EventKind
    actor: str
    action_id: int | None
    at: int


@dataclass(frozen=True)
class TrusteeBoard:
    trustees: frozenset[str]
    threshold: int

    def __post_init__(self) -> None:
        if not self.trustees:
            raise InvalidBoard("trustee set must not be empty")
        if not 1 <= self.threshold <= len(self.trustees):
            raise InvalidBoard(
                f"threshold {self.threshold} outside 1..{len(self.trustees)}"
            )


@dataclass(frozen=True)
class GovernanceConfig:
    maintenance_delay: int = DEFAULT_MAINTENANCE_DELAY
    pause_max: int = DEFAULT_PAUSE_MAX
    pause_cooldown: int = DEFAULT_PAUSE_COOLDOWN

    def __post_init__(self) -> None:
        for name in ("maintenance_delay", "pause_max", "pause_cooldown"):
            if getattr(self, name) <= 0:
                raise InvalidConfig(f"{name} must be positive")


@dataclass
class ActionState:
    action_id: int
    votes: set[str] = field(default_factory=set)
    cleared_at: int | None = None
    activated_at: int | None = None


@dataclass
class PauseState:
    paused_since: int | None = None
    deadline: int | None = None
    cooldown_until: int = 0


@dataclass
class GovernanceState:
    """Live governance state plus its append-only event log."""

    board: TrusteeBoard
    config: GovernanceConfig
    actions: list[ActionState] = field(
        default_factory=lambda: [ActionState(i) for i in range(ACTION_COUNT)]
    )
    pause: PauseState = field(default_factory=PauseState)
    log: list[GovEvent] = field(default_factory=list)

    # -- commands ---------------------------------------------------------

    def trustee_vote(self, trustee: str, action_id: int, now: int) -> list[GovEvent]:
        """Vote on an action; two-phase.

        Before clearance, a first-time vote is recorded and reaching the
        threshold clears the action (duplicate votes change nothing).  Once
        cleared and after the maintenance delay has fully elapsed, any
        trustee's vote call activates the action, exactly once.
        """
        action = self._check_vote(trustee, action_id, now)
        emitted: list[GovEvent] = []
        if trustee not in action.votes:
            emitted.append(self._apply(EventKind.TRUSTEE_VOTED, trustee, action_id, now))
            if len(action.votes) >= self.board.threshold and action.cleared_at is None:
                emitted.append(
                    self._apply(EventKind.ACTION_CLEARED, trustee, action_id, now)
                )
        if (
            action.cleared_at is not None
            and now >= action.cleared_at + self.config.maintenance_delay
            and action.activated_at is None
        ):
            emitted.append(
                self._apply(EventKind.ACTION_ACTIVATED, trustee, action_id, now)
            )
        return emitted

    def safely_pause(self, trustee: str, now: int) -> list[GovEvent]:
        """Pause unless already paused (no-op) or still cooling down (error)."""
        self._check_member_and_clock(trustee, now)
        if self.safely_paused(now):
            return []
        if now < self._effective_cooldown_until():
            raise PauseCooldownActive(
                f"pause refused at {now}; cooldown runs until "
                f"{self._effective_cooldown_until()}"
            )
        return [self._apply(EventKind.SAFELY_PAUSED, trustee, None, now)]

    def safely_unpause(self, trustee: str, now: int) -> list[GovEvent]:
        """Un-pause; recording one for an already force-expired pause
        back-dates the cooldown to the deadline.  No-op when nothing is
        pending."""
        self._check_member_and_clock(trustee, now)
        if self.pause.paused_since is None:
            return []
        return [self._apply(EventKind.SAFELY_UNPAUSED, trustee, None, now)]

    # -- pure queries ------------------------------------------------------

    def action_cleared(self, action_id: int, now: int) -> bool:
        """True once the delay after clearance has elapsed and the action is
        still awaiting activation."""
        action = self.actions[self._valid_action(action_id)]
        return (
            action.cleared_at is not None
            and now >= action.cleared_at + self.config.maintenance_delay
            and action.activated_at is None
        )

    def safely_paused(self, now: int) -> bool:
        """Paused iff a pause is recorded and its deadline has not passed.
        The deadline itself is exclusive: the forced un-freeze is lazy."""
        return self.pause.paused_since is not None and now < self.pause.deadline

    def safely_unpaused(self, now: int) -> bool:
        return not self.safely_paused(now)

    def guard_when_paused(self, now: int) -> None:
        if not self.safely_paused(now):
            raise GuardFailedPaused(f"not paused at {now}")

    def guard_when_unpaused(self, now: int) -> None:
        if self.safely_paused(now):
            raise GuardFailedUnpaused(f"paused at {now}")

    @property
    def last_event_at(self) -> int:
        return self.log[-1].at if self.log else 0

    # -- internals ---------------------------------------------------------

    def _valid_action(self, action_id: int) -> int:
        if not 0 <= action_id < ACTION_COUNT:
            raise ValueError(f"action_id outside 0..{ACTION_COUNT - 1}: {action_id}")
        return action_id

    def _check_member_and_clock(self, trustee: str, now: int) -> None:
        if trustee not in self.board.trustees:
            raise NotTrustee(f"{trustee} is not on the board")
        if now < self.last_event_at:
            raise ClockWentBackwards(
                f"timestamp {now} precedes last event at {self.last_event_at}"
            )

    def _check_vote(self, trustee: str, action_id: int, now: int) -> ActionState:
        action = self.actions[self._valid_action(action_id)]
        if trustee not in self.board.trustees:
            raise NotTrustee(f"{trustee} is not on the board")
        if action.activated_at is not None:
            raise ActionAlreadyActivated(f"action {action_id} already activated")
        if now < self.last_event_at:
            raise ClockWentBackwards(
                f"timestamp {now} precedes last event at {self.last_event_at}"
            )
        return action

    def _effective_cooldown_until(self) -> int:
        """Cooldown boundary accounting for a lazily expired pause, whose
        un-freeze happened at the deadline without any event."""
        cooldown_until = self.pause.cooldown_until
        if self.pause.paused_since is not None and self.pause.deadline is not None:
            cooldown_until = max(
                cooldown_until, self.pause.deadline + self.config.pause_cooldown
            )
        return cooldown_until

    def _apply(
        self, kind: EventKind, actor: str, action_id: int | None, at: int
    ) -> GovEvent:
        """Single reducer for live transitions and replay."""
        event = GovEvent(len(self.log), kind, actor, action_id, at)
        if kind is EventKind.TRUSTEE_VOTED:
            self.actions[action_id].votes.add(actor)
        elif kind is EventKind.ACTION_CLEARED:
            self.actions[action_id].cleared_at = at
        elif kind is EventKind.ACTION_ACTIVATED:
            self.actions[action_id].activated_at = at
        elif kind is EventKind.SAFELY_PAUSED:
            if self.pause.paused_since is not None and self.pause.deadline is not None:
                # The previous pause expired lazily; its cooldown starts at
                # the deadline and is settled here, on the next transition.
                self.pause.cooldown_until = max(
                    self.pause.cooldown_until,
                    self.pause.deadline + self.config.pause_cooldown,
                )
            self.pause.paused_since = at
            self.pause.deadline = at + self.config.pause_max
        elif kind is EventKind.SAFELY_UNPAUSED:
            base = min(at, self.pause.deadline)
            self.pause.cooldown_until = max(
                self.pause.cooldown_until, base + self.config.pause_cooldown
            )
            self.pause.paused_since = None
            self.pause.deadline = None
        self.log.append(event)
        return event


def replay_events(
    events: Iterable[GovEvent], board: TrusteeBoard, config: GovernanceConfig
) -> GovernanceState:
    """Rebuild a state purely from its event log."""
    state = GovernanceState(board, config)
    for event in events:
        state._apply(event.kind, event.actor, event.action_id, event.at)
    return state


def run_scenario(
    script: Sequence[dict],
    board: TrusteeBoard,
    config: GovernanceConfig,
) -> tuple[list[dict], GovernanceState]:
    """Execute a validated scenario script against a fresh state.

    Returns the trace (one row per emitted event, rejected step, or query
    result) and the final state.  Rejections do not stop the run.
    """
    steps = parse_script(script)
    state = GovernanceState(board, config)
    trace: list[dict] = []

    def row(at: int, kind: str, actor: str, action_id: int | None) -> dict:
        entry: dict = {"seq": len(trace), "at": at, "kind": kind, "actor": actor}
        if action_id is not None:
            entry["action_id"] = action_id
        return entry

    for step in steps:
        op = step["op"]
        at = step["at"]
        actor = step["actor"]
        action_id = step.get("action_id")
        if op == "query_cleared":
            entry = row(at, op, actor, action_id)
            entry["result"] = state.action_cleared(action_id, at)
            trace.append(entry)
            continue
        if op == "query_paused":
            entry = row(at, op, actor, action_id)
            entry["result"] = state.safely_paused(at)
            trace.append(entry)
            continue
        try:
            if op == "vote":
                events = state.trustee_vote(actor, action_id, at)
            elif op == "pause":
                events = state.safely_pause(actor, at)
            else:
                events = state.safely_unpause(actor, at)
        except (NotTrustee, ActionAlreadyActivated, ClockWentBackwards,
                PauseCooldownActive) as exc:
            entry = row(at, op, actor, action_id)
            entry["rejected"] = type(exc).__name__
            trace.append(entry)
            continue
        for event in events:
            trace.append(row(event.at, event.kind.value, event.actor, event.action_id))
    return trace, state


def replay_trace(
    trace: Iterable[dict], board: TrusteeBoard, config: GovernanceConfig
) -> GovernanceState:
    """Rebuild the final state from a scenario trace; only event rows count."""
    event_kinds = {kind.value for kind in EventKind}
    state = GovernanceState(board, config)
    for entry in trace:
        if "rejected" in entry or entry["kind"] not in event_kinds:
            continue
        state._apply(
            EventKind(entry["kind"]),
            entry["actor"],
            entry.get("action_id"),
            entry["at"],
        )
    return state


def parse_script(script: object) -> list[dict]:
    """Structural validation of a scenario script.

    Scripts are JSON arrays of steps ``{at, op, actor, action_id?}`` with
    non-decreasing timestamps; ``action_id`` is mandatory for vote and
    query_cleared steps and must address one of the fixed slots.
    """
    if not isinstance(script, (list, tuple)):
        raise MalformedScript("script must be an array of steps")
    steps: list[dict] = []
    previous_at: int | None = None
    for position, step in enumerate(script):
        where = f"step {position}"
        if not isinstance(step, dict):
            raise MalformedScript(f"{where}: not an object")
        at = step.get("at")
        if not isinstance(at, int) or isinstance(at, bool) or at < 0:
            raise MalformedScript(f"{where}: 'at' must be a non-negative integer")
        if previous_at is not None and at < previous_at:
            raise MalformedScript(
                f"{where}: timestamp {at} decreases from {previous_at}"
            )
        previous_at = at
        op = step.get("op")
        if op not in SCRIPT_OPS:
            raise MalformedScript(f"{where}: unknown op {op!r}")
        actor = step.get("actor")
        if not isinstance(actor, str) or not actor:
            raise MalformedScript(f"{where}: 'actor' must be a non-empty string")
        action_id = step.get("action_id")
        if op in ("vote", "query_cleared"):
            if not isinstance(action_id, int) or isinstance(action_id, bool):
                raise MalformedScript(f"{where}: 'action_id' must be an integer")
            if not 0 <= action_id < ACTION_COUNT:
                raise MalformedScript(
                    f"{where}: action_id {action_id} outside 0..{ACTION_COUNT - 1}"
                )
        elif action_id is not None:
            raise MalformedScript(f"{where}: 'action_id' not allowed for op {op!r}")
        steps.append({"at": at, "op": op, "actor": actor, "action_id": action_id})
    return steps


def load_board_config(path: Path | str) -> tuple[TrusteeBoard, GovernanceConfig]:
    """Read a board file: trustees, threshold, and optional durations."""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InvalidBoard(f"board file is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise InvalidBoard("board file must hold a JSON object")
    trustees = document.get("trustees")
    if (
        not isinstance(trustees, list)
        or not trustees
        or not all(isinstance(t, str) and t for t in trustees)
    ):
        raise InvalidBoard("'trustees' must be a non-empty list of names")
    threshold = document.get("threshold")
    if not isinstance(threshold, int) or isinstance(threshold, bool):
        raise InvalidBoard("'threshold' must be an integer")
    board = TrusteeBoard(frozenset(trustees), threshold)
    durations = {}
    for name, fallback in (
        ("maintenance_delay", DEFAULT_MAINTENANCE_DELAY),
        ("pause_max", DEFAULT_PAUSE_MAX),
        ("pause_cooldown", DEFAULT_PAUSE_COOLDOWN),
    ):
        value = document.get(name, fallback)
        if not isinstance(value, int) or isinstance(value, bool):
            raise InvalidConfig(f"'{name}' must be an integer")
        durations[name] = value
    return board, GovernanceConfig(**durations)


def write_trace(trace: list[dict], path: Path | str) -> None:
    Path(path).write_text(json.dumps(trace, indent=2) + "\n", encoding="utf-8")


def read_trace(path: Path | str) -> list[dict]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
