"""Controller-side enhancement logic: break-point marking, clone-destination
selection, and planning of divert/clone/replicate actions with their
duplicate-packet accounting."""

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .flow import Flow, FlowStatus
from .policy import BreakPolicy, Mode, Policy
from .routing import CostMetric, Route, alternative_routes
from .topology import LinkKey, NodeId, Topology


class EnhancerError(ValueError):
    """Internal consistency failures in enhancement planning."""


@dataclass(slots=True)
class BreakPoint:
    """Transient (node, packet) pointer where the subflow splits off; discarded
    after subflow construction.

    median_based marks a fractional-progress estimate: its packet_seq is the
    median undelivered packet by design, not the first seq behind the node, so
    the engine must not widen it when installing the rule."""

    node: NodeId
    packet_seq: int
    median_based: bool = False


@dataclass(slots=True)
class EnhancementAction:
    mode: Mode
    routes: List[Route]                 # the n alternatives
    clone_destination: NodeId
    break_point: Optional[BreakPoint]   # absent for replicate
    suffix: Route                       # original route from clone_destination on
    blamed_links: Tuple[LinkKey, ...]
    drop_original: bool = False
    # accounting, filled in by the engine as packets pass the rule
    matched_packets: int = 0
    copies_created: int = 0
    duplicates_created: int = 0
    # engine-runtime attachments (copy streams and owning root run)
    copy_runs: list = field(default_factory=list)
    root_run: object = None

    @property
    def fanout(self) -> int:
        return len(self.routes)


@dataclass(slots=True)
class OverheadRecord:
    """Per-flow redundancy bookkeeping mirroring the duplicate-packet bounds:
    divert(n) -> (n-1)*s*L, clone(n) -> n*s*L, replicate(n) -> n*L."""

    duplicate_packets: int
    flow_length: int
    time_overhead_us: int

    @property
    def duplicate_fraction(self) -> float:
        return self.duplicate_packets / self.flow_length


def blamed_route_links(status: FlowStatus, policy: Policy, route: Route,
                       now_us: int) -> List[Tuple[int, LinkKey]]:
    """Route links whose observed transit breaches the per-link threshold.

    A crossing still in progress counts once its elapsed time alone exceeds
    the threshold; with latency-only congestion that is the earliest moment a
    slow link is distinguishable at all.
    """
    if status.transit_count < 2:
        return []
    threshold = policy.per_link_threshold_factor * status.total_transit_us
    count = status.transit_count
    blamed = []
    for pos in range(len(route) - 1):
        key = (route[pos], route[pos + 1])
        obs = status.links.get(key)
        if obs is None:
            continue
        worst = obs.max_us
        oldest = obs.oldest_inflight()
        if oldest is not None:
            worst = max(worst, now_us - oldest)
        if worst * count > threshold:
            blamed.append((pos, key))
    return blamed


def mark_break_point(flow: Flow, status: FlowStatus, policy: Policy,
                     route: Route, now_us: int,
                     progress: Optional[List[int]] = None,
                     first_seq: int = 0,
                     ) -> Tuple[Optional[BreakPoint], Tuple[LinkKey, ...]]:
    """Two-pass break-point choice on the stream currently carrying the flow.

    Pass 1: first route link breaching the per-link threshold; break at its
    upstream node, at the first seq not yet past that node. Pass 2 (no culprit
    or culprit exhausted): statistical estimate per the policy's break_policy.
    Returns (break_point or None when nothing is catchable, blamed links).

    `progress`/`first_seq` describe the stream being enhanced; they default to
    the root flow's own counters.
    """
    if progress is None:
        progress = status.progress
    blamed = blamed_route_links(status, policy, route, now_us)
    blamed_keys = tuple(key for _, key in blamed)

    for pos, _key in blamed:
        first_not_past = first_seq + progress[pos]
        if first_not_past < flow.length:
            return BreakPoint(route[pos], first_not_past), blamed_keys

    estimate = _estimate_break(policy, status, route, progress, first_seq)
    if estimate is not None:
        pos, seq, median = estimate
        if seq < flow.length:
            return BreakPoint(route[pos], seq, median_based=median), blamed_keys
    return None, blamed_keys


def _estimate_break(policy: Policy, status: FlowStatus, route: Route,
                    progress: List[int], first_seq: int,
                    ) -> Optional[Tuple[int, int, bool]]:
    if policy.break_policy is BreakPolicy.WORST_LINK:
        # slowest observed link whose upstream node still has packets to catch
        released = progress[0]
        worst_pos, worst_max = None, -1
        for pos in range(len(route) - 1):
            if progress[pos] >= released:
                continue
            obs = status.links.get((route[pos], route[pos + 1]))
            observed = obs.max_us if obs is not None and obs.count else 0
            if observed > worst_max:
                worst_pos, worst_max = pos, observed
        if worst_pos is None:
            return None
        return worst_pos, first_seq + progress[worst_pos], False

    # fractional_progress: split at the median undelivered packet, at the node
    # it will next reach; the subflow is then at most half the undelivered
    # remainder, which is what bounds clone redundancy
    undelivered = progress[0] - progress[-1]
    if undelivered <= 0:
        return None
    median = first_seq + progress[-1] + undelivered // 2
    # progress is nonincreasing along the route; find the last position the
    # median packet has already passed
    last_passed = 0
    for pos in range(len(route)):
        if first_seq + progress[pos] >= median + 1:
            last_passed = pos
        else:
            break
    return min(last_passed + 1, len(route) - 1), median, True


def find_clone_destination(flow: Flow, route: Route,
                           blamed_links: Sequence[LinkKey]) -> NodeId:
    """Node immediately after the last blamed link when the blamed links form a
    contiguous route segment; otherwise the flow's original destination."""
    if not blamed_links:
        return flow.destination
    positions = []
    route_links = list(zip(route, route[1:]))
    for key in blamed_links:
        if key not in route_links:
            raise EnhancerError(f"blamed link {key} is not on the route")
        positions.append(route_links.index(key))
    positions.sort()
    contiguous = all(b - a == 1 for a, b in zip(positions, positions[1:]))
    if not contiguous:
        return flow.destination
    return route[positions[-1] + 1]


def _route_segment(route: Route, start: NodeId, end: NodeId) -> Optional[Route]:
    try:
        i, j = route.index(start), route.index(end)
    except ValueError:
        return None
    return route[i:j + 1] if i < j else None


def apply_divert(flow: Flow, bp: BreakPoint, routes: List[Route],
                 clone_dest: NodeId, suffix: Route = (),
                 blamed: Tuple[LinkKey, ...] = (),
                 drop_original: bool = False) -> EnhancementAction:
    """Rule replacing the original continuation at the break point: matched
    packets travel only the alternative routes, route 0 carrying the
    surviving subflow."""
    _check_copies(routes, bp.node)
    return EnhancementAction(Mode.DIVERT, list(routes), clone_dest, bp,
                             suffix, blamed, drop_original)


def apply_clone(flow: Flow, bp: BreakPoint, routes: List[Route],
                clone_dest: NodeId, suffix: Route = (),
                blamed: Tuple[LinkKey, ...] = ()) -> EnhancementAction:
    """Rule forwarding matched packets on the original route and each
    alternative; the original flow is untouched."""
    _check_copies(routes, bp.node)
    return EnhancementAction(Mode.CLONE, list(routes), clone_dest, bp,
                             suffix, blamed)


def apply_replicate(flow: Flow, routes: List[Route],
                    blamed: Tuple[LinkKey, ...] = (),
                    drop_original: bool = False) -> EnhancementAction:
    """Release n full copies of the flow at the origin; no break point."""
    _check_copies(routes, flow.origin)
    return EnhancementAction(Mode.REPLICATE, list(routes), flow.destination,
                             None, (), blamed, drop_original)


def _check_copies(routes: Sequence[Route], start: NodeId) -> None:
    if not routes:
        raise EnhancerError("an enhancement needs at least one route")
    for route in routes:
        if route[0] != start:
            raise EnhancerError(f"copy route {route} does not start at {start}")


def plan_enhancement(flow: Flow, status: FlowStatus, policy: Policy,
                     topology: Topology, route: Route, metric: CostMetric,
                     now_us: int, ecmp_max_paths: int = 16,
                     progress: Optional[List[int]] = None,
                     first_seq: int = 0,
                     rule_nodes: Iterable[NodeId] = ()) -> Optional[EnhancementAction]:
    """Full controller planning step for one trigger.

    `route`/`progress`/`first_seq` describe the stream that produced the
    trigger evidence (the root flow or a subflow carrying it). `rule_nodes`
    are nodes already holding this flow's enhancement rules: an alternative
    segment must not pass through them, or an older rule would hijack the
    copies and could forward them back the way they came. Returns None when
    the trigger is unactionable (no catchable packets for divert/clone, or no
    alternative route exists): the stream then simply continues.
    """
    mode = policy.mode
    if mode is Mode.REPLICATE:
        bp = None
        _, blamed_keys = mark_break_point(flow, status, policy, route, now_us,
                                          progress, first_seq)
        clone_dest = flow.destination
        search_origin, search_dest = flow.origin, flow.destination
    else:
        bp, blamed_keys = mark_break_point(flow, status, policy, route, now_us,
                                           progress, first_seq)
        if bp is None:
            return None
        clone_dest = find_clone_destination(flow, route, blamed_keys)
        if bp.node == clone_dest:
            return None
        search_origin, search_dest = bp.node, clone_dest

    suffix: Route = ()
    if clone_dest != flow.destination:
        seg = _route_segment(route, clone_dest, flow.destination)
        if seg is None:
            raise EnhancerError("clone destination is not on the route")
        suffix = seg

    original_segment = _route_segment(route, search_origin, search_dest)
    avoid = set(rule_nodes)
    avoid.discard(search_origin)
    candidates = alternative_routes(topology, search_origin, search_dest,
                                    excluded_links=blamed_keys,
                                    k=policy.fanout_n + 3, metric=metric,
                                    excluded_nodes=avoid)
    # copy streams continue on the suffix past the merge node; an alternative
    # revisiting a suffix node would fold the stream back onto itself
    banned_nodes = set(suffix[1:])
    routes = [r for r in candidates
              if r != original_segment and not banned_nodes.intersection(r[:-1])]
    routes = routes[:policy.fanout_n]
    if not routes:
        return None

    if mode is Mode.REPLICATE:
        return apply_replicate(flow, routes, blamed_keys, policy.drop_original)
    if mode is Mode.DIVERT:
        return apply_divert(flow, bp, routes, clone_dest, suffix, blamed_keys,
                            policy.drop_original)
    return apply_clone(flow, bp, routes, clone_dest, suffix, blamed_keys)


def adaptive_dispatch(flow: Flow, registry, policy: Policy,
                      topology: Topology, route: Route, metric: CostMetric,
                      now_us: int) -> Optional[EnhancementAction]:
    """Origin-time replication of a flow whose base route matches a registered
    violating path; fired at release, so no trigger latency is paid. Returns
    None for a normal release."""
    if not policy.adaptive_replicate_following:
        return None
    violation = registry.lookup(flow.origin, flow.destination, route, now_us)
    if violation is None:
        return None
    routes = alternative_routes(topology, flow.origin, flow.destination,
                                excluded_links=violation.blamed_links,
                                k=policy.fanout_n + 1, metric=metric)
    routes = [r for r in routes if r != route][:policy.fanout_n]
    if not routes:
        return None
    return apply_replicate(flow, routes, violation.blamed_links,
                           policy.drop_original)


def controller_latency_us(policy: Policy, default_us: int) -> int:
    """Simulated delay between a trigger and its rule activation; the policy
    may override the engine-wide constant."""
    if policy.controller_latency_us is not None:
        return policy.controller_latency_us
    return default_us


def expected_duplicates(action: EnhancementAction, flow_length: int) -> int:
    """Duplicate-packet count the accounting table predicts for the action."""
    n = action.fanout
    if action.mode is Mode.DIVERT:
        return (n - 1) * action.matched_packets
    if action.mode is Mode.CLONE:
        return n * action.matched_packets
    if action.drop_original:
        return (n - 1) * flow_length
    return n * flow_length
