"""SLA policies, threshold evaluation, and the path-violation registry that
drives adaptive replication of follow-up flows."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

from .flow import FlowStatus, Priority
from .routing import Route
from .topology import LinkKey, NodeId


class PolicyError(ValueError):
    """Policy definitions that violate their invariants."""


class Mode(str, Enum):
    DIVERT = "divert"
    CLONE = "clone"
    REPLICATE = "replicate"


class BreakPolicy(str, Enum):
    WORST_LINK = "worst_link"
    FRACTIONAL_PROGRESS = "fractional_progress"


class TriggerReason(Enum):
    NONE = "none"
    SOFT_LIMIT_ELAPSED = "soft_limit_elapsed"
    SLOW_LINK_OBSERVED = "slow_link_observed"


@dataclass(slots=True)
class TriggerDecision:
    fire: bool
    reason: TriggerReason = TriggerReason.NONE
    at_node: NodeId = -1
    at_seq: int = -1

    def __post_init__(self) -> None:
        if self.fire and self.reason is TriggerReason.NONE:
            raise PolicyError("a firing decision needs a reason")


NO_TRIGGER = TriggerDecision(False)


@dataclass
class Policy:
    """Named SLA policy a flow group references.

    soft limit = hard_limit * soft_fraction; crossing it preemptively fires
    the enhancer, while crossing the hard limit is the actual violation.
    """

    name: str
    priority: Priority = Priority.NORMAL
    hard_limit_us: int = 1_000_000
    soft_fraction: float = 0.5
    mode: Mode = Mode.CLONE
    fanout_n: int = 1
    break_policy: BreakPolicy = BreakPolicy.WORST_LINK
    adaptive_replicate_following: bool = False
    per_link_threshold_factor: float = 3.0
    drop_original: bool = False
    controller_latency_us: Optional[int] = None  # None = engine default

    def __post_init__(self) -> None:
        if self.hard_limit_us <= 0:
            raise PolicyError(f"policy {self.name}: hard limit must be > 0")
        if not 0.0 < self.soft_fraction < 1.0:
            raise PolicyError(f"policy {self.name}: soft_fraction must be in (0,1)")
        if self.fanout_n < 1:
            raise PolicyError(f"policy {self.name}: fanout_n must be >= 1")
        if self.per_link_threshold_factor <= 1.0:
            raise PolicyError(f"policy {self.name}: per_link_threshold_factor must be > 1")
        if self.drop_original and self.mode is Mode.CLONE:
            raise PolicyError(f"policy {self.name}: drop_original applies to divert/replicate only")

    @property
    def soft_limit_us(self) -> int:
        return int(self.hard_limit_us * self.soft_fraction)

    @property
    def is_priority(self) -> bool:
        return self.priority is Priority.PRIORITY


def round_armed(status: FlowStatus, policy: Policy, now_us: int, max_rounds: int) -> bool:
    """At most one trigger per enhancement round; later rounds need fresh
    evidence (soft window re-elapsed since the previous activation, or a
    per-link breach observed after it). While a round is between trigger and
    activation, nothing new may fire."""
    if status.round >= max_rounds:
        return False
    if status.round == 0:
        return True
    if status.last_activation_us < 0:
        return False
    return now_us >= status.last_activation_us + policy.soft_limit_us or \
        status.last_breach_us > status.last_activation_us


def is_threshold_met(status: FlowStatus, policy: Policy, now_us: int,
                     max_rounds: int = 2,
                     observation: Optional[Tuple[LinkKey, int, NodeId, int]] = None,
                     mitigated: frozenset = frozenset(),
                     ) -> TriggerDecision:
    """Rules-manager gate deciding whether the enhancer fires.

    Normal-priority flows never fire. `observation` carries the per-link
    transit measurement (link, transit_us, node, seq) being reported, if any;
    soft-limit elapse is checked regardless. Links in `mitigated` (already
    blamed by an applied enhancement) no longer count as fresh evidence, but a
    breach on any other link is recorded even while the round gate is closed,
    so it can arm the next round.
    """
    if not policy.is_priority or status.is_complete:
        return NO_TRIGGER

    breach: Optional[Tuple[NodeId, int]] = None
    if observation is not None and status.transit_count >= 2:
        link, transit_us, node, seq = observation
        # transit * count > factor * total  <=>  transit > factor * mean
        if (link not in mitigated
                and transit_us * status.transit_count
                > policy.per_link_threshold_factor * status.total_transit_us):
            status.last_breach_us = now_us
            breach = (node, seq)

    if not round_armed(status, policy, now_us, max_rounds):
        return NO_TRIGGER
    if breach is not None:
        return TriggerDecision(True, TriggerReason.SLOW_LINK_OBSERVED, *breach)
    if status.elapsed_us(now_us) >= policy.soft_limit_us:
        at_seq = status.delivered  # first potentially-undelivered packet
        return TriggerDecision(True, TriggerReason.SOFT_LIMIT_ELAPSED,
                               status.route[0], at_seq)
    return NO_TRIGGER


def sla_violated(status: FlowStatus, policy: Policy,
                 completion_time_us: Optional[int]) -> bool:
    """Strict-greater comparison: completing exactly at the hard limit complies."""
    if completion_time_us is None:
        return True
    return completion_time_us - status.release_time_us > policy.hard_limit_us


@dataclass(slots=True)
class PathViolation:
    origin: NodeId
    destination: NodeId
    route: Route
    blamed_links: Tuple[LinkKey, ...]
    registered_us: int


class PathViolationRegistry:
    """Remembers violating base routes so following flows of the same path can
    be replicated at the origin before any trigger."""

    def __init__(self, ttl_us: Optional[int] = None):
        self.ttl_us = ttl_us  # None = end of run
        self._entries: Dict[Tuple[NodeId, NodeId, Route], PathViolation] = {}

    def register(self, origin: NodeId, destination: NodeId, route: Route,
                 blamed_links: Tuple[LinkKey, ...], now_us: int) -> None:
        key = (origin, destination, route)
        if key not in self._entries:
            self._entries[key] = PathViolation(origin, destination, route,
                                               blamed_links, now_us)

    def lookup(self, origin: NodeId, destination: NodeId, route: Route,
               now_us: int) -> Optional[PathViolation]:
        entry = self._entries.get((origin, destination, route))
        if entry is None:
            return None
        if self.ttl_us is not None and now_us - entry.registered_us > self.ttl_us:
            del self._entries[(origin, destination, route)]
            return None
        return entry

    def __len__(self) -> int:
        return len(self._entries)


def register_path_violation(registry: PathViolationRegistry, origin: NodeId,
                            destination: NodeId, route: Route,
                            blamed_links: Tuple[LinkKey, ...] = (),
                            now_us: int = 0) -> None:
    registry.register(origin, destination, route, blamed_links, now_us)
