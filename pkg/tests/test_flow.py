import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redusim.flow import (AcceptResult, Flow, FlowError, Lineage, Priority,
                          ReassemblyBuffer, Tag, accept_packet,
                          flow_all_received, make_subflow, merge_flows,
                          tag_flow)
from redusim.policy import Policy


def priority_policy(**kw):
    defaults = dict(name="gold", priority=Priority.PRIORITY,
                    hard_limit_us=250_000_000, soft_fraction=0.48)
    defaults.update(kw)
    return Policy(**defaults)


def make_flow(fid=1, length=100):
    return Flow(id=fid, origin=0, destination=9, length=length,
                policy_name="gold")


# -- tagging -------------------------------------------------------------------

def test_tag_flow_stamps_policy_and_timestamp():
    flow = make_flow()
    tag_flow(flow, priority_policy(), now_us=1234)
    for packet in flow.packets():
        assert packet.tag.priority is Priority.PRIORITY
        assert packet.tag.hard_limit_us == 250_000_000
        assert packet.tag.origin_timestamp_us == 1234
        assert packet.tag.parent_flow is None


def test_tag_flow_hard_limit_from_policy():
    flow = make_flow()
    tag_flow(flow, priority_policy(hard_limit_us=250_000_000), now_us=0)
    assert all(p.tag.hard_limit_us == 250_000_000 for p in flow.packets())


def test_normal_priority_tags_mark_normal():
    flow = make_flow()
    tag_flow(flow, Policy(name="bulk"), now_us=0)
    assert all(p.tag.priority is Priority.NORMAL for p in flow.packets())


def test_two_flows_same_policy_tags_differ_only_in_identity():
    a, b = make_flow(1), make_flow(2)
    tag_flow(a, priority_policy(), now_us=10)
    tag_flow(b, priority_policy(), now_us=20)
    pa, pb = a.packet(0).tag, b.packet(0).tag
    assert (pa.priority, pa.hard_limit_us, pa.soft_fraction) == \
        (pb.priority, pb.hard_limit_us, pb.soft_fraction)
    assert pa.origin_timestamp_us != pb.origin_timestamp_us


def test_tag_flow_idempotent_before_release():
    flow = make_flow()
    tag_flow(flow, priority_policy(), now_us=5)
    tag_flow(flow, priority_policy(), now_us=5)
    assert flow.tag.origin_timestamp_us == 5


def test_tag_invariants():
    with pytest.raises(FlowError):
        Tag(Priority.NORMAL, hard_limit_us=1000, soft_fraction=1.2,
            origin_timestamp_us=0)
    with pytest.raises(FlowError):
        Tag(Priority.NORMAL, hard_limit_us=0, soft_fraction=0.5,
            origin_timestamp_us=0)


# -- subflows ------------------------------------------------------------------

def test_subflow_full_cover_for_replicate():
    flow = make_flow(length=50)
    sub = make_subflow(flow, 0, Lineage.REPLICA, new_id=77)
    assert sub.first_seq == 0
    assert sub.packet_count == 50
    assert sub.parent == flow.id
    assert sub.root == flow.id


def test_subflow_suffix_preserves_seq_numbers():
    flow = make_flow(length=100)
    sub = make_subflow(flow, 60, Lineage.CLONE, new_id=78)
    assert sub.packet_count == 40
    assert list(sub.seqs()) == list(range(60, 100))
    assert [p.seq for p in sub.packets()] == list(range(60, 100))


def test_subflow_of_subflow_chains_parent_and_keeps_root():
    flow = make_flow(length=100)
    sub = make_subflow(flow, 10, Lineage.CLONE, new_id=2)
    subsub = make_subflow(sub, 20, Lineage.CLONE, new_id=3)
    assert subsub.parent == sub.id
    assert subsub.root == flow.id
    assert subsub.packet(20).root_flow == flow.id


def test_subflow_out_of_range_rejected():
    flow = make_flow(length=10)
    with pytest.raises(FlowError):
        make_subflow(flow, 10, Lineage.CLONE, new_id=5)
    with pytest.raises(FlowError):
        make_subflow(flow, -1, Lineage.CLONE, new_id=5)


# -- reassembly -----------------------------------------------------------------

def test_accept_same_packet_twice_drops_second():
    flow = make_flow(length=3)
    buf = ReassemblyBuffer(flow.id, 3)
    pkt = flow.packet(0)
    assert accept_packet(buf, pkt, 10) is AcceptResult.STORED
    assert accept_packet(buf, pkt, 11) is AcceptResult.DUPLICATE_DROPPED
    assert buf.duplicates == 1


def test_clone_first_original_later_dropped():
    flow = make_flow(length=10)
    sub = make_subflow(flow, 0, Lineage.CLONE, new_id=2)
    buf = ReassemblyBuffer(flow.id, 10)
    assert accept_packet(buf, sub.packet(5), 100) is AcceptResult.STORED
    assert accept_packet(buf, flow.packet(5), 200) is AcceptResult.DUPLICATE_DROPPED
    assert buf.received[5] == (100, Lineage.CLONE)


def test_length_one_flow_completes_immediately():
    flow = make_flow(length=1)
    buf = ReassemblyBuffer(flow.id, 1)
    assert accept_packet(buf, flow.packet(0), 5) is AcceptResult.COMPLETED


def test_foreign_packet_rejected():
    buf = ReassemblyBuffer(1, 10)
    other = make_flow(fid=99, length=10)
    with pytest.raises(FlowError):
        accept_packet(buf, other.packet(0), 0)


def test_flow_all_received_cases():
    flow = make_flow(length=3)
    buf = ReassemblyBuffer(flow.id, 3)
    assert not flow_all_received(buf)
    accept_packet(buf, flow.packet(0), 1)
    accept_packet(buf, flow.packet(1), 2)
    assert not flow_all_received(buf)
    accept_packet(buf, flow.packet(2), 3)
    assert flow_all_received(buf)


def test_preseeded_buffer_counts_passed_packets():
    buf = ReassemblyBuffer(1, 10, preseeded_below=4)
    assert buf.remaining == 6
    assert buf.has(0) and buf.has(3) and not buf.has(4)


# -- merge -----------------------------------------------------------------------

def test_merge_identity_when_originals_cover_everything():
    flow = make_flow(length=5)
    orig = ReassemblyBuffer(flow.id, 5)
    clone = ReassemblyBuffer(flow.id, 5)
    for seq in range(5):
        accept_packet(orig, flow.packet(seq), 10 + seq)
    merged = merge_flows(orig, clone)
    assert merged.ordered_seqs == (0, 1, 2, 3, 4)
    assert merged.reconstruction_time_us == 14
    assert merged.duplicates_dropped == 0


def test_merge_disjoint_coverage():
    flow = make_flow(length=100)
    sub = make_subflow(flow, 60, Lineage.CLONE, new_id=2)
    orig = ReassemblyBuffer(flow.id, 100)
    clone = ReassemblyBuffer(flow.id, 100, first_seq=60)
    for seq in range(60):
        accept_packet(orig, flow.packet(seq), seq)
    for seq in range(60, 100):
        accept_packet(clone, sub.packet(seq), seq)
    merged = merge_flows(orig, clone)
    assert merged.ordered_seqs == tuple(range(100))
    assert merged.reconstruction_time_us == 99


def test_merge_overlapping_coverage_counts_duplicates():
    flow = make_flow(length=100)
    sub = make_subflow(flow, 60, Lineage.CLONE, new_id=2)
    orig = ReassemblyBuffer(flow.id, 100)
    clone = ReassemblyBuffer(flow.id, 100, first_seq=60)
    for seq in range(80):
        accept_packet(orig, flow.packet(seq), seq)
    for seq in range(60, 100):
        accept_packet(clone, sub.packet(seq), 50 + seq)
    # replay the 20 overlapping originals into the clone buffer as dedup does
    for seq in range(60, 80):
        assert accept_packet(clone, flow.packet(seq), 200 + seq) is \
            AcceptResult.DUPLICATE_DROPPED
    merged = merge_flows(orig, clone)
    assert merged.ordered_seqs == tuple(range(100))
    assert merged.duplicates_dropped == 20


def test_merge_with_gap_raises():
    flow = make_flow(length=4)
    orig = ReassemblyBuffer(flow.id, 4)
    clone = ReassemblyBuffer(flow.id, 4)
    accept_packet(orig, flow.packet(0), 0)
    accept_packet(clone, flow.packet(3), 0)
    with pytest.raises(FlowError, match="seq 1"):
        merge_flows(orig, clone)


# -- properties -------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.data())
def test_dedup_property_one_record_per_seq(length, data):
    flow = make_flow(length=length)
    sub = make_subflow(flow, 0, Lineage.CLONE, new_id=2)
    buf = ReassemblyBuffer(flow.id, length)
    arrivals = data.draw(st.lists(
        st.tuples(st.integers(0, length - 1), st.booleans()),
        min_size=length, max_size=4 * length))
    # guarantee coverage
    arrivals.extend((seq, False) for seq in range(length))
    stored = dropped = 0
    completed_at = None
    for t, (seq, from_clone) in enumerate(arrivals):
        pkt = (sub if from_clone else flow).packet(seq)
        res = accept_packet(buf, pkt, t)
        if res is AcceptResult.DUPLICATE_DROPPED:
            dropped += 1
        else:
            stored += 1
            if res is AcceptResult.COMPLETED:
                completed_at = t
    assert stored == length
    assert dropped == len(arrivals) - length
    assert buf.duplicates == dropped
    assert completed_at is not None
    assert flow_all_received(buf)
