"""Deterministic discrete-event engine: packet propagation with per-link FIFO
queues, flow supervision, enhancement dispatch, and metrics emission.

Time is an integer microsecond clock; events tie-break on insertion order, so
a run is a pure function of (scenario, seed).

Two modeling commitments worth knowing about:

* Redundant copies (clone/replica lineage) ride a parallel service channel
  per link: same latency and capacity model, separate transmitter state, so
  redundancy can never delay a regular packet. Together with never dropping a
  root flow's original packets before their destination, this makes the
  keep-original guarantees exact: an enhanced run completes every flow no
  later than its paired base run.

* Supervision follows the flow, not just its first incarnation. When an
  enhancement splits off a subflow, the new stream keeps reporting transit
  observations and remains eligible for later enhancement rounds; a slow link
  already blamed by an applied action stops counting as fresh trigger
  evidence. Without this, a flow crossing two independently congested links
  could never be rescued twice.
"""

import heapq
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .enhancer import (EnhancementAction, OverheadRecord, adaptive_dispatch,
                       blamed_route_links, controller_latency_us,
                       plan_enhancement)
from .flow import (AcceptResult, Flow, FlowStatus, Lineage, Priority,
                   ReassemblyBuffer, make_subflow, tag_flow)
from .policy import (Mode, PathViolationRegistry, Policy, TriggerReason,
                     is_threshold_met, round_armed, sla_violated)
from .routing import CostMetric, Route, ecmp_paths, ecmp_select, shortest_path
from .topology import Topology

# event kinds (flow_release, packet_arrival, trigger_controller,
# rule_activation, flow_complete; soft-deadline checks and stall probes are
# controller-timer events)
EV_ARRIVAL = 0
EV_RELEASE = 1
EV_TRIGGER = 2
EV_ACTIVATE = 3
EV_SOFT_CHECK = 4
EV_STALL_PROBE = 5
EV_COMPLETE = 6

CLS_ORIG = 0
CLS_DUP = 1


@dataclass(slots=True)
class EngineParams:
    base_algorithm: str = "shortest_path"   # or "ecmp"
    cost_metric: CostMetric = CostMetric.HOP_COUNT
    ecmp_max_paths: int = 16
    controller_latency_us: int = 100_000
    horizon_us: int = 600_000_000
    max_enhancement_rounds: int = 2
    enhancements_enabled: bool = True
    registry_ttl_us: Optional[int] = None   # None = end of run


@dataclass(slots=True)
class FlowSpec:
    id: int
    origin: int
    destination: int
    length: int
    policy_name: str
    release_us: int


@dataclass(slots=True)
class MetricsRecord:
    """One outcome row per root flow."""

    flow_id: int
    priority: str
    mode: str
    released_us: int
    completed_us: Optional[int]
    routing_us: Optional[int]
    sla_violated: bool
    triggers: int
    duplicates: int
    flow_length: int
    unactionable: int

    @property
    def duplicate_fraction(self) -> float:
        return self.duplicates / self.flow_length


CSV_COLUMNS = ("flow_id", "priority", "mode", "released_ms", "completed_ms",
               "routing_ms", "sla_violated", "triggers", "duplicates",
               "duplicate_fraction")


def _fmt_ms(us: Optional[int]) -> str:
    if us is None:
        return ""
    return f"{us // 1000}.{us % 1000:03d}"


def records_to_csv(records: Sequence[MetricsRecord]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(",".join((
            str(r.flow_id), r.priority, r.mode, _fmt_ms(r.released_us),
            _fmt_ms(r.completed_us), _fmt_ms(r.routing_us),
            "1" if r.sla_violated else "0", str(r.triggers),
            str(r.duplicates), f"{r.duplicate_fraction:.6f}")))
    return "\n".join(lines) + "\n"


@dataclass(slots=True)
class RunSummary:
    flows_total: int = 0
    priority_flows: int = 0
    completed_priority: int = 0
    violations_priority: int = 0
    violations_normal: int = 0
    violation_rate: float = 0.0
    mean_routing_ms: float = 0.0
    median_routing_ms: float = 0.0
    p99_routing_ms: float = 0.0
    total_duplicate_fraction: float = 0.0
    triggers: int = 0
    unactionable_triggers: int = 0
    packets_created: int = 0
    packets_delivered: int = 0
    packets_dropped_duplicate: int = 0
    packets_in_flight_at_horizon: int = 0

    def render(self) -> str:
        out = []
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if isinstance(value, float):
                value = f"{value:.6f}"
            out.append(f"{name} = {value}")
        return "\n".join(out) + "\n"


def _nearest_rank(sorted_vals: List[int], q: float) -> int:
    if not sorted_vals:
        return 0
    rank = max(1, math.ceil(q * len(sorted_vals)))
    return sorted_vals[min(rank, len(sorted_vals)) - 1]


def build_summary(records: Sequence[MetricsRecord],
                  counters: Optional[dict] = None) -> RunSummary:
    s = RunSummary()
    s.flows_total = len(records)
    routing: List[int] = []
    total_dups = 0
    total_len = 0
    for r in records:
        total_dups += r.duplicates
        total_len += r.flow_length
        s.triggers += r.triggers
        s.unactionable_triggers += r.unactionable
        if r.priority == Priority.PRIORITY.value:
            s.priority_flows += 1
            if r.sla_violated:
                s.violations_priority += 1
            if r.routing_us is not None:
                s.completed_priority += 1
                routing.append(r.routing_us)
        elif r.sla_violated:
            s.violations_normal += 1
    if s.priority_flows:
        s.violation_rate = s.violations_priority / s.priority_flows
    if routing:
        routing.sort()
        s.mean_routing_ms = sum(routing) / len(routing) / 1000.0
        s.median_routing_ms = _nearest_rank(routing, 0.5) / 1000.0
        s.p99_routing_ms = _nearest_rank(routing, 0.99) / 1000.0
    if total_len:
        s.total_duplicate_fraction = total_dups / total_len
    if counters:
        s.packets_created = counters.get("created", 0)
        s.packets_delivered = counters.get("delivered", 0)
        s.packets_dropped_duplicate = counters.get("dropped_duplicate", 0)
        s.packets_in_flight_at_horizon = counters.get("in_flight", 0)
    return s


class _Binding:
    """A reassembly buffer installed at a node of a flow's lineage tree."""

    __slots__ = ("buffer", "merged_at")

    def __init__(self, buffer: ReassemblyBuffer):
        self.buffer = buffer
        self.merged_at: Optional[int] = None


class _Run:
    """One packet stream: the root flow or an enhancement copy stream.

    Copy streams travel their alternative segment plus the original-route
    suffix in one piece; the merge node is consulted mid-route. Supervised
    streams (priority lineage) keep their own progress counters so later
    enhancement rounds can mark break points on whichever stream carries the
    flow.
    """

    __slots__ = ("flow", "route", "links", "cls", "counted", "tracked",
                 "action", "root", "progress", "droppable_after")

    def __init__(self, flow: Flow, route: Route, links: Tuple[int, ...],
                 cls: int, counted: bool, tracked: bool, action, root):
        self.flow = flow
        self.route = route
        self.links = links
        self.cls = cls
        self.counted = counted
        self.tracked = tracked
        self.action = action        # None for the root stream
        self.root = root            # _RootRun accounting home
        self.progress = [0] * len(route) if tracked else None
        self.droppable_after: Optional[int] = None


class _RootRun:
    """Accounting home for one root flow and all its descendant streams.

    `rules` is the flow's distributed flow-table state: one entry per node,
    matching every packet of the lineage tree that reaches the node; a newer
    rule at the same node replaces the older one, exactly as a controller
    updating the same table entry would.
    """

    __slots__ = ("flow", "policy", "run", "status", "buffers", "actions",
                 "rules", "copy_runs", "mode_applied", "duplicates_created",
                 "duplicates_dropped", "dropped_in_transit", "unactionable",
                 "drop_original_after", "mitigated")

    def __init__(self, flow: Flow, policy: Policy, route: Route,
                 links: Tuple[int, ...]):
        self.flow = flow
        self.policy = policy
        self.run = _Run(flow, route, links, CLS_ORIG, counted=False,
                        tracked=policy.is_priority, action=None, root=self)
        self.status = FlowStatus(route, flow.release_time_us)
        self.buffers: Dict[int, _Binding] = {}
        self.actions: List[EnhancementAction] = []
        self.rules: Dict[int, Tuple[int, int, EnhancementAction]] = {}
        self.copy_runs: List[_Run] = []
        self.mode_applied: Optional[Mode] = None
        self.duplicates_created = 0
        self.duplicates_dropped = 0
        self.dropped_in_transit = 0
        self.unactionable = 0
        self.drop_original_after: Optional[int] = None
        self.mitigated: Set[Tuple[int, int]] = set()


@dataclass(slots=True)
class RunResult:
    records: List[MetricsRecord]
    summary: RunSummary
    counters: dict


class Engine:
    """One simulation run over a prepared topology and flow list."""

    def __init__(self, topology: Topology, flow_specs: Sequence[FlowSpec],
                 policies: Dict[str, Policy], params: EngineParams):
        self.topology = topology
        self.flow_specs = list(flow_specs)
        self.policies = policies
        self.params = params
        self.registry = PathViolationRegistry(params.registry_ttl_us)
        n_links = len(topology.links)
        self._svc = [l.service_interval_us for l in topology.links]
        self._next_free = [[0] * n_links, [0] * n_links]
        self._last_arrival = [[0] * n_links, [0] * n_links]
        self._heap: list = []
        self._tick = 0
        self._next_flow_id = (max((s.id for s in flow_specs), default=-1)) + 1
        self._route_cache: Dict[Tuple[int, int], Route] = {}
        self._ecmp_cache: Dict[Tuple[int, int], List[Route]] = {}
        self.counters = {"created": 0, "delivered": 0, "dropped_duplicate": 0,
                         "in_flight": 0}
        self.roots: List[_RootRun] = []

    # -- scheduling ---------------------------------------------------------

    def _push(self, t: int, kind: int, *payload) -> None:
        self._tick += 1
        heapq.heappush(self._heap, (t, self._tick, kind) + payload)

    def _links_for(self, route: Route) -> Tuple[int, ...]:
        idx = self.topology.link_index
        return tuple(idx[(route[i], route[i + 1])] for i in range(len(route) - 1))

    def _base_route(self, spec_or_flow) -> Route:
        o, d = spec_or_flow.origin, spec_or_flow.destination
        if self.params.base_algorithm == "ecmp":
            paths = self._ecmp_cache.get((o, d))
            if paths is None:
                paths = ecmp_paths(self.topology, o, d, self.params.cost_metric,
                                   self.params.ecmp_max_paths)
                self._ecmp_cache[(o, d)] = paths
            return ecmp_select(spec_or_flow.id, paths)
        route = self._route_cache.get((o, d))
        if route is None:
            route = shortest_path(self.topology, o, d, self.params.cost_metric)
            self._route_cache[(o, d)] = route
        return route

    # -- hop mechanics ------------------------------------------------------

    def _schedule_hop(self, run: _Run, route: Route, links: Tuple[int, ...],
                      pos: int, seq: int, cls: int, now: int) -> None:
        link_id = links[pos]
        nf = self._next_free[cls]
        depart = nf[link_id] if nf[link_id] > now else now
        nf[link_id] = depart + self._svc[link_id]
        lat = self.topology.effective_latency_us_by_id(link_id, depart)
        arr = depart + lat
        la = self._last_arrival[cls]
        if arr < la[link_id]:
            arr = la[link_id]  # links preserve FIFO order
        la[link_id] = arr
        if run.tracked:
            root = run.root
            status = root.status
            if status.completion_time_us is None and status.links is not None:
                key = (route[pos], route[pos + 1])
                status.link_obs(key).enter(depart)
                # a crossing that will breach the per-link threshold mid-wire
                # is probed at the moment it becomes evidence
                if (self.params.enhancements_enabled
                        and status.round < self.params.max_enhancement_rounds
                        and status.transit_count >= 2
                        and key not in root.mitigated):
                    thr = int(root.policy.per_link_threshold_factor
                              * status.total_transit_us / status.transit_count) + 1
                    if thr < lat:
                        self._push(depart + thr, EV_STALL_PROBE, run, key,
                                   route[pos], seq, depart)
        self._push(arr, EV_ARRIVAL, run, route, links, pos + 1, seq, cls, depart)

    # -- run ----------------------------------------------------------------

    def run(self) -> RunResult:
        for spec in self.flow_specs:
            policy = self.policies[spec.policy_name]
            flow = Flow(id=spec.id, origin=spec.origin,
                        destination=spec.destination, length=spec.length,
                        policy_name=spec.policy_name,
                        release_time_us=spec.release_us)
            route = self._base_route(spec)
            root = _RootRun(flow, policy, route, self._links_for(route))
            self.roots.append(root)
            self._push(spec.release_us, EV_RELEASE, root)

        horizon = self.params.horizon_us
        heap = self._heap
        while heap:
            ev = heapq.heappop(heap)
            t = ev[0]
            if t > horizon:
                heapq.heappush(heap, ev)
                break
            kind = ev[2]
            if kind == EV_ARRIVAL:
                self._on_arrival(t, ev)
            elif kind == EV_RELEASE:
                self._on_release(t, ev[3])
            elif kind == EV_TRIGGER:
                self._on_trigger(t, ev[3], ev[4], ev[5], ev[6])
            elif kind == EV_ACTIVATE:
                self._on_activate(t, ev[3], ev[4])
            elif kind == EV_SOFT_CHECK:
                self._on_soft_check(t, ev[3])
            elif kind == EV_STALL_PROBE:
                self._on_probe(t, ev[3], ev[4], ev[5], ev[6], ev[7])
            elif kind == EV_COMPLETE:
                self._on_complete(ev[3])

        self.counters["in_flight"] = sum(1 for ev in heap if ev[2] == EV_ARRIVAL)
        records = [self._record_for(root) for root in self.roots]
        summary = build_summary(records, self.counters)
        return RunResult(records, summary, dict(self.counters))

    # -- event handlers -----------------------------------------------------

    def _on_release(self, now: int, root: _RootRun) -> None:
        flow, policy = root.flow, root.policy
        tag_flow(flow, policy, now)
        run = root.run
        dest = flow.destination
        root.buffers[dest] = _Binding(ReassemblyBuffer(flow.id, flow.length))
        self.counters["created"] += flow.length

        if self.params.enhancements_enabled and policy.is_priority:
            action = adaptive_dispatch(flow, self.registry, policy,
                                       self.topology, run.route,
                                       self.params.cost_metric, now)
            if action is not None:
                # origin-time replication is this flow's first enhancement
                # round; the known-bad links stop counting as evidence
                root.status.round += 1
                root.status.last_activation_us = now
                root.mitigated.update(action.blamed_links)
                self._apply_replicate(now, root, action)

        if run.tracked:
            run.progress[0] = flow.length
        for seq in range(flow.length):
            self._schedule_hop(run, run.route, run.links, 0, seq, CLS_ORIG, now)
        if self.params.enhancements_enabled and policy.is_priority:
            self._push(now + policy.soft_limit_us, EV_SOFT_CHECK, root)

    def _on_arrival(self, now: int, ev) -> None:
        run, route, links, pos, seq, cls, wire_entry = ev[3:]
        root: _RootRun = run.root
        if run.droppable_after is not None and now >= run.droppable_after:
            root.dropped_in_transit += 1
            self.counters["dropped_duplicate"] += 1
            return
        terminal = pos == len(route) - 1
        if (run.action is None and root.drop_original_after is not None
                and now >= root.drop_original_after and not terminal):
            root.dropped_in_transit += 1
            self.counters["dropped_duplicate"] += 1
            return

        status = root.status
        if run.tracked and status.completion_time_us is None \
                and status.links is not None:
            key = (route[pos - 1], route[pos])
            transit = now - wire_entry
            status.observe_transit(key, transit, now)
            run.progress[pos] += 1
            if self.params.enhancements_enabled:
                decision = is_threshold_met(
                    status, root.policy, now, self.params.max_enhancement_rounds,
                    observation=(key, transit, route[pos], seq),
                    mitigated=root.mitigated)
                if decision.fire:
                    self._fire(run, decision.reason, decision.at_node,
                               decision.at_seq, now)

        node = route[pos]
        binding = root.buffers.get(node)

        if terminal:
            res = binding.buffer.accept(seq, run.flow.lineage, now)
            if res is AcceptResult.DUPLICATE_DROPPED:
                root.duplicates_dropped += 1
                self.counters["dropped_duplicate"] += 1
                return
            self.counters["delivered"] += 1
            if res is AcceptResult.COMPLETED:
                self._buffer_completed(now, root, node, binding)
            return

        if binding is not None:
            if not binding.buffer.has(seq):
                res = binding.buffer.accept(seq, run.flow.lineage, now)
                if res is AcceptResult.COMPLETED:
                    self._buffer_completed(now, root, node, binding)
            elif (cls == CLS_DUP and run.action is not None
                    and node == run.action.clone_destination):
                # a copy that lost the race to its merge node is culled there
                root.duplicates_dropped += 1
                self.counters["dropped_duplicate"] += 1
                return

        if root.rules:
            rule = root.rules.get(node)
            if rule is not None:
                min_seq, act_time, action = rule
                if seq >= min_seq and now >= act_time:
                    action.matched_packets += 1
                    consumed = self._emit_rule_copies(now, root, action, seq)
                    if consumed:
                        return

        self._schedule_hop(run, route, links, pos, seq, cls, now)

    def _emit_rule_copies(self, now: int, root: _RootRun,
                          action: EnhancementAction, seq: int) -> bool:
        """Emit the per-packet copies at the break point. Returns True when
        the continuation on the current stream is consumed (divert).

        The divert survivor transforms the matched packet rather than copying
        it, so it counts neither as created nor duplicate."""
        for copy_run in action.copy_runs:
            self._schedule_hop(copy_run, copy_run.route, copy_run.links, 0,
                               seq, copy_run.cls, now)
            action.copies_created += 1
            if copy_run.counted:
                action.duplicates_created += 1
                root.duplicates_created += 1
                self.counters["created"] += 1
        return action.mode is Mode.DIVERT

    def _fire(self, run: _Run, reason: TriggerReason, node: int,
              seq: int, now: int) -> None:
        status = run.root.status
        status.round += 1
        status.triggers_fired += 1
        self._push(now, EV_TRIGGER, run, reason, node, seq)

    def _on_trigger(self, now: int, run: _Run, reason: TriggerReason,
                    node: int, seq: int) -> None:
        root = run.root
        status = root.status
        if status.completion_time_us is None and status.links is not None:
            blamed = tuple(k for _, k in blamed_route_links(
                status, root.policy, run.route, now))
        else:
            blamed = ()
        self.registry.register(root.flow.origin, root.flow.destination,
                               root.run.route, blamed, now)
        if status.completion_time_us is not None:
            status.last_activation_us = now
            return
        action = plan_enhancement(root.flow, status, root.policy, self.topology,
                                  run.route, self.params.cost_metric, now,
                                  self.params.ecmp_max_paths,
                                  progress=run.progress,
                                  first_seq=run.flow.first_seq,
                                  rule_nodes=root.rules.keys())
        root.mitigated.update(blamed)
        if action is None:
            root.unactionable += 1
            status.last_activation_us = now
            return
        latency = controller_latency_us(root.policy,
                                        self.params.controller_latency_us)
        self._push(now + latency, EV_ACTIVATE, run, action)

    def _materialize_copies(self, now: int, root: _RootRun, parent: _Run,
                            action: EnhancementAction, from_seq: int) -> None:
        """Build the copy streams an action forwards matched packets into.

        A copy stream's route runs all the way to the flow's destination: the
        alternative segment to the merge node, then the original-route tail.
        The survivor copy of a replacing mode (divert, drop-original
        replicate) inherits its parent's service class; every other copy is
        background redundancy."""
        divert = action.mode is Mode.DIVERT
        replicate = action.mode is Mode.REPLICATE
        action.copy_runs = []
        action.root_run = root
        tail = action.suffix[1:] if action.suffix else ()
        for i, alt in enumerate(action.routes):
            survivor = (divert or (replicate and action.drop_original)) and i == 0
            if replicate:
                lineage, copy_index = Lineage.REPLICA, i + 1
            elif survivor:
                lineage, copy_index = Lineage.ORIGINAL, 0
            else:
                lineage, copy_index = Lineage.CLONE, i + (0 if divert else 1)
            full_route = alt + tail
            sub = make_subflow(parent.flow, from_seq, lineage,
                               new_id=self._next_flow_id, copy_index=copy_index,
                               origin=alt[0], destination=full_route[-1],
                               release_time_us=now)
            self._next_flow_id += 1
            run = _Run(sub, full_route, self._links_for(full_route),
                       parent.cls if survivor else CLS_DUP,
                       counted=not survivor,
                       tracked=root.policy.is_priority, action=action,
                       root=root)
            action.copy_runs.append(run)
            root.copy_runs.append(run)

    def _ensure_binding(self, root: _RootRun, node: int, run: _Run) -> _Binding:
        binding = root.buffers.get(node)
        if binding is None:
            preseed = 0
            if run.tracked and node in run.route:
                preseed = run.flow.first_seq + run.progress[run.route.index(node)]
            binding = _Binding(ReassemblyBuffer(root.flow.id, root.flow.length,
                                                0, preseeded_below=preseed))
            root.buffers[node] = binding
        return binding

    def _on_activate(self, now: int, run: _Run, action: EnhancementAction) -> None:
        root = run.root
        root.status.last_activation_us = now
        if root.status.completion_time_us is not None:
            return
        root.actions.append(action)
        if root.mode_applied is None:
            root.mode_applied = action.mode
        if action.mode is Mode.REPLICATE:
            self._apply_replicate(now, root, action, record=False)
        else:
            bp = action.break_point
            # the rule matches the whole lineage at this node, so the break
            # seq is the first seq not yet past it on ANY stream, re-read at
            # activation (packets kept moving during the controller latency);
            # a median-based estimate keeps its deliberate offset instead
            if not bp.median_based:
                for r in (root.run, *root.copy_runs):
                    if r.tracked and r.progress is not None and bp.node in r.route:
                        first_not_past = (r.flow.first_seq
                                          + r.progress[r.route.index(bp.node)])
                        if first_not_past < bp.packet_seq:
                            bp.packet_seq = first_not_past
            self._ensure_binding(root, action.clone_destination, run)
            self._materialize_copies(now, root, run, action, bp.packet_seq)
            root.rules[bp.node] = (bp.packet_seq, now, action)
        if (self.params.enhancements_enabled
                and root.status.round < self.params.max_enhancement_rounds):
            self._push(now + root.policy.soft_limit_us, EV_SOFT_CHECK, root)

    def _apply_replicate(self, now: int, root: _RootRun,
                         action: EnhancementAction, record: bool = True) -> None:
        flow = root.flow
        action.matched_packets = flow.length
        self._materialize_copies(now, root, root.run, action, 0)
        if root.mode_applied is None:
            root.mode_applied = Mode.REPLICATE
        if record:
            root.actions.append(action)
        for run in action.copy_runs:
            for seq in range(flow.length):
                self._schedule_hop(run, run.route, run.links, 0, seq, run.cls, now)
            action.copies_created += flow.length
            self.counters["created"] += flow.length
            if run.counted:
                action.duplicates_created += flow.length
                root.duplicates_created += flow.length
        if action.drop_original:
            root.drop_original_after = now

    def _buffer_completed(self, now: int, root: _RootRun, node: int,
                          binding: _Binding) -> None:
        binding.merged_at = now
        if node == root.flow.destination:
            root.status.completion_time_us = now
            for run in root.copy_runs:
                if run.cls == CLS_DUP and run.droppable_after is None:
                    run.droppable_after = now
            self._push(now, EV_COMPLETE, root)
        else:
            # merge point reconstructed: in-flight redundant copies headed
            # here are droppable from now on
            for action in root.actions:
                if action.clone_destination == node:
                    for run in action.copy_runs:
                        if run.cls == CLS_DUP and run.droppable_after is None:
                            run.droppable_after = now

    def _on_soft_check(self, now: int, root: _RootRun) -> None:
        if not self.params.enhancements_enabled:
            return
        status = root.status
        if status.completion_time_us is not None or status.links is None:
            return
        decision = is_threshold_met(status, root.policy, now,
                                    self.params.max_enhancement_rounds,
                                    mitigated=root.mitigated)
        if decision.fire:
            self._fire(root.run, decision.reason, decision.at_node,
                       decision.at_seq, now)

    def _on_probe(self, now: int, run: _Run, key, node: int, seq: int,
                  wire_entry: int) -> None:
        root = run.root
        status = root.status
        if (not self.params.enhancements_enabled
                or status.completion_time_us is not None
                or status.links is None or key in root.mitigated):
            return
        obs = status.links.get(key)
        if obs is None or not obs.inflight:
            return
        oldest = obs.inflight[0]
        if oldest > wire_entry or status.transit_count < 2:
            return
        elapsed = now - oldest
        if elapsed * status.transit_count > (root.policy.per_link_threshold_factor
                                             * status.total_transit_us):
            status.last_breach_us = now
            if round_armed(status, root.policy, now,
                           self.params.max_enhancement_rounds):
                self._fire(run, TriggerReason.SLOW_LINK_OBSERVED, node, seq, now)

    def _on_complete(self, root: _RootRun) -> None:
        # release the per-link stat tables; the record keeps aggregates only
        root.status.links = None

    # -- reporting ----------------------------------------------------------

    def _record_for(self, root: _RootRun) -> MetricsRecord:
        status = root.status
        completed = status.completion_time_us
        violated = sla_violated(status, root.policy, completed)
        return MetricsRecord(
            flow_id=root.flow.id,
            priority=root.policy.priority.value,
            mode=root.mode_applied.value if root.mode_applied else "none",
            released_us=root.flow.release_time_us,
            completed_us=completed,
            routing_us=None if completed is None else completed - root.flow.release_time_us,
            sla_violated=violated,
            triggers=status.triggers_fired,
            duplicates=root.duplicates_created,
            flow_length=root.flow.length,
            unactionable=root.unactionable,
        )


def run_single_flow(topology: Topology, origin: int, destination: int,
                    length: int, policy: Policy,
                    params: Optional[EngineParams] = None,
                    release_us: int = 0) -> MetricsRecord:
    """Supervise one flow start-to-finish under the base algorithm plus
    enhancements; the terminal outcome row is returned."""
    params = params or EngineParams()
    spec = FlowSpec(0, origin, destination, length, policy.name, release_us)
    engine = Engine(topology, [spec], {policy.name: policy}, params)
    result = engine.run()
    return result.records[0]


def overhead_vs_base(enhanced: MetricsRecord, base: MetricsRecord) -> OverheadRecord:
    """Redundancy and time overhead of an enhanced flow against its paired
    base-run twin (same scenario and seed, enhancements off)."""
    if enhanced.flow_id != base.flow_id:
        raise ValueError("overhead comparison needs the same flow in both runs")
    if enhanced.routing_us is None or base.routing_us is None:
        delta = 0
    else:
        delta = enhanced.routing_us - base.routing_us
    return OverheadRecord(enhanced.duplicates, enhanced.flow_length, delta)
