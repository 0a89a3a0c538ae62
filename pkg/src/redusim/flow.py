"""Flow, packet and tag model: tagging at the origin, subflow extraction,
duplicate suppression, and reconstruction at the merge node."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .topology import NodeId

FlowId = int


class FlowError(ValueError):
    """Lineage/reassembly protocol violations."""


class Lineage(Enum):
    ORIGINAL = "original"
    CLONE = "clone"
    REPLICA = "replica"


class AcceptResult(Enum):
    STORED = "stored"
    DUPLICATE_DROPPED = "duplicate_dropped"
    COMPLETED = "completed"


class Priority(str, Enum):
    NORMAL = "normal"
    PRIORITY = "priority"


@dataclass(slots=True)
class Tag:
    """SLA metadata stamped on every packet of a flow at the origin node."""

    priority: Priority
    hard_limit_us: int
    soft_fraction: float
    origin_timestamp_us: int
    parent_flow: Optional[FlowId] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.soft_fraction < 1.0:
            raise FlowError(f"soft_fraction must be in (0,1), got {self.soft_fraction}")
        if self.hard_limit_us <= 0:
            raise FlowError("hard_limit_us must be > 0")

    @property
    def soft_limit_us(self) -> int:
        return int(self.hard_limit_us * self.soft_fraction)


@dataclass(slots=True)
class Packet:
    flow: FlowId
    root_flow: FlowId
    seq: int
    lineage: Lineage
    copy_index: int  # 0 for originals, >= 1 for clone/replica copies
    tag: Optional[Tag]
    size_bytes: int = 1

    def __post_init__(self) -> None:
        if self.lineage is not Lineage.ORIGINAL and self.copy_index < 1:
            raise FlowError("clone/replica packets need copy_index >= 1")


@dataclass
class Flow:
    """An ordered packet sequence between two nodes under one policy.

    Subflows share the parent's packet numbering: `first_seq` marks where the
    suffix starts and `length` counts total packets of the root flow, so a
    subflow covers seqs [first_seq, length).
    """

    id: FlowId
    origin: NodeId
    destination: NodeId
    length: int
    policy_name: str
    release_time_us: int = 0
    tag: Optional[Tag] = None
    parent: Optional[FlowId] = None
    root: Optional[FlowId] = None
    lineage: Lineage = Lineage.ORIGINAL
    copy_index: int = 0
    first_seq: int = 0

    def __post_init__(self) -> None:
        if self.length < 1:
            raise FlowError("flow length must be >= 1")
        if self.origin == self.destination:
            raise FlowError("origin equals destination")
        if not 0 <= self.first_seq < self.length:
            raise FlowError(f"first_seq {self.first_seq} out of range")
        if self.root is None:
            self.root = self.id

    @property
    def packet_count(self) -> int:
        return self.length - self.first_seq

    def seqs(self) -> range:
        return range(self.first_seq, self.length)

    def packet(self, seq: int) -> Packet:
        if not self.first_seq <= seq < self.length:
            raise FlowError(f"seq {seq} outside [{self.first_seq},{self.length})")
        return Packet(self.id, self.root, seq, self.lineage, self.copy_index, self.tag)

    def packets(self) -> List[Packet]:
        return [self.packet(seq) for seq in self.seqs()]


def tag_flow(flow: Flow, policy, now_us: int) -> None:
    """Stamp the flow's packets with the policy's SLA tag. Idempotent before
    release: re-tagging simply replaces the tag."""
    flow.tag = Tag(
        priority=policy.priority,
        hard_limit_us=policy.hard_limit_us,
        soft_fraction=policy.soft_fraction,
        origin_timestamp_us=now_us,
        parent_flow=flow.parent,
    )


def make_subflow(flow: Flow, from_seq: int, lineage: Lineage,
                 new_id: FlowId, copy_index: int = 1,
                 origin: Optional[NodeId] = None,
                 destination: Optional[NodeId] = None,
                 release_time_us: Optional[int] = None) -> Flow:
    """Split off the suffix [from_seq, length) as a new flow.

    Sequence numbers are preserved; the subflow's parent is the immediate
    parent only and the root id is carried through for dedup keying.
    """
    if not 0 <= from_seq < flow.length:
        raise FlowError(f"from_seq {from_seq} out of range [0,{flow.length})")
    sub = Flow(
        id=new_id,
        origin=flow.origin if origin is None else origin,
        destination=flow.destination if destination is None else destination,
        length=flow.length,
        policy_name=flow.policy_name,
        release_time_us=flow.release_time_us if release_time_us is None else release_time_us,
        parent=flow.id,
        root=flow.root,
        lineage=lineage,
        copy_index=copy_index,
        first_seq=from_seq,
    )
    if flow.tag is not None:
        sub.tag = Tag(flow.tag.priority, flow.tag.hard_limit_us,
                      flow.tag.soft_fraction, flow.tag.origin_timestamp_us,
                      parent_flow=flow.id)
    return sub


class ReassemblyBuffer:
    """Per-node first-arrival store for one flow's lineage tree.

    At most one record is retained per seq; later copies report as duplicates.
    Seqs below `preseeded_below` are treated as already received (packets that
    passed this node before the buffer was installed).
    """

    __slots__ = ("root_flow", "expected_length", "first_seq", "received",
                 "remaining", "duplicates")

    def __init__(self, root_flow: FlowId, expected_length: int,
                 first_seq: int = 0, preseeded_below: int = 0):
        if preseeded_below < first_seq:
            preseeded_below = first_seq
        self.root_flow = root_flow
        self.expected_length = expected_length
        self.first_seq = first_seq
        # None = missing; (arrival_us, lineage) = stored; True = preseeded
        self.received: List = [None] * (expected_length - first_seq)
        for seq in range(first_seq, min(preseeded_below, expected_length)):
            self.received[seq - first_seq] = True
        self.remaining = sum(1 for r in self.received if r is None)
        self.duplicates = 0

    def accept(self, seq: int, lineage: Lineage, now_us: int) -> AcceptResult:
        if not self.first_seq <= seq < self.expected_length:
            raise FlowError(f"seq {seq} outside buffer range")
        slot = seq - self.first_seq
        if self.received[slot] is not None:
            self.duplicates += 1
            return AcceptResult.DUPLICATE_DROPPED
        self.received[slot] = (now_us, lineage)
        self.remaining -= 1
        return AcceptResult.COMPLETED if self.remaining == 0 else AcceptResult.STORED

    def is_complete(self) -> bool:
        return self.remaining == 0

    def has(self, seq: int) -> bool:
        return self.received[seq - self.first_seq] is not None

    def missing(self) -> List[int]:
        return [self.first_seq + i for i, r in enumerate(self.received) if r is None]


def accept_packet(buffer: ReassemblyBuffer, packet: Packet, now_us: int) -> AcceptResult:
    """Public reassembly entry point; rejects packets from foreign lineage trees."""
    if packet.root_flow != buffer.root_flow:
        raise FlowError(
            f"packet of flow {packet.flow} (root {packet.root_flow}) does not "
            f"belong to lineage tree {buffer.root_flow}")
    return buffer.accept(packet.seq, packet.lineage, now_us)


def flow_all_received(buffer: ReassemblyBuffer) -> bool:
    return buffer.is_complete()


@dataclass(slots=True)
class MergedFlow:
    root_flow: FlowId
    ordered_seqs: Tuple[int, ...]
    reconstruction_time_us: int
    duplicates_dropped: int


def merge_flows(original: ReassemblyBuffer, clone: ReassemblyBuffer) -> MergedFlow:
    """Reconstruct the flow from original-path and clone-path arrivals.

    The union of stored seqs must cover [0, length); the reconstruction time
    is the arrival of the packet that completed coverage.
    """
    if original.root_flow != clone.root_flow:
        raise FlowError("buffers belong to different lineage trees")
    length = original.expected_length
    completion = 0
    for seq in range(length):
        in_orig = seq >= original.first_seq and original.has(seq)
        in_clone = seq >= clone.first_seq and clone.has(seq)
        if not (in_orig or in_clone):
            raise FlowError(f"incomplete flow: seq {seq} missing from both buffers")
        times = []
        for buf, present in ((original, in_orig), (clone, in_clone)):
            if present:
                rec = buf.received[seq - buf.first_seq]
                if rec is not True:
                    times.append(rec[0])
        if times:
            completion = max(completion, min(times))
    return MergedFlow(
        root_flow=original.root_flow,
        ordered_seqs=tuple(range(length)),
        reconstruction_time_us=completion,
        duplicates_dropped=original.duplicates + clone.duplicates,
    )


class LinkObservations:
    """Per-link transit statistics for one flow: completed crossings plus
    wire-entry times of packets still in flight (FIFO per link)."""

    __slots__ = ("count", "total_us", "max_us", "inflight")

    def __init__(self):
        self.count = 0
        self.total_us = 0
        self.max_us = 0
        self.inflight: List[int] = []

    def enter(self, wire_entry_us: int) -> None:
        self.inflight.append(wire_entry_us)

    def arrive(self, transit_us: int) -> None:
        if self.inflight:
            self.inflight.pop(0)
        self.count += 1
        self.total_us += transit_us
        if transit_us > self.max_us:
            self.max_us = transit_us

    def oldest_inflight(self) -> Optional[int]:
        return self.inflight[0] if self.inflight else None


class FlowStatus:
    """Everything the rules manager sees about one root flow.

    `progress[pos]` counts original-lineage packets processed at route
    position pos; with FIFO links that equals the first seq not yet past the
    node, which is what break-point marking needs.
    """

    __slots__ = ("release_time_us", "route", "progress", "links",
                 "total_transit_us", "transit_count", "delivered",
                 "completion_time_us", "triggers_fired", "round",
                 "last_activation_us", "last_breach_us")

    def __init__(self, route: Tuple[int, ...], release_time_us: int):
        self.release_time_us = release_time_us
        self.route = route
        self.progress = [0] * len(route)
        self.links: Dict[Tuple[int, int], LinkObservations] = {}
        self.total_transit_us = 0
        self.transit_count = 0
        self.delivered = 0
        self.completion_time_us: Optional[int] = None
        self.triggers_fired = 0
        self.round = 0
        self.last_activation_us = -1
        self.last_breach_us = -1

    def elapsed_us(self, now_us: int) -> int:
        return now_us - self.release_time_us

    def link_obs(self, key: Tuple[int, int]) -> LinkObservations:
        obs = self.links.get(key)
        if obs is None:
            obs = self.links[key] = LinkObservations()
        return obs

    def observe_transit(self, key: Tuple[int, int], transit_us: int, now_us: int) -> None:
        self.link_obs(key).arrive(transit_us)
        self.total_transit_us += transit_us
        self.transit_count += 1

    def mean_transit_us(self) -> float:
        if self.transit_count == 0:
            return 0.0
        return self.total_transit_us / self.transit_count

    @property
    def is_complete(self) -> bool:
        return self.completion_time_us is not None
