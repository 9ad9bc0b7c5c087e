//! Packets exchanged between the sender, the access point, and the sink.

use crate::time::SimTime;

pub type FlowId = u32;

/// A data segment or a cumulative acknowledgment.
///
/// `size_bytes` is the on-wire size (payload plus the fixed per-packet header
/// overhead); ACKs carry no payload. Sequence numbers are byte offsets into
/// the flow.
#[derive(Clone, Debug)]
pub struct Packet {
    pub flow_id: FlowId,
    /// First payload byte of a data segment; unused for ACKs.
    pub seq: u64,
    /// On-wire size, payload plus header overhead.
    pub size_bytes: u32,
    /// Application bytes carried; zero for ACKs.
    pub payload_bytes: u32,
    pub is_ack: bool,
    /// Cumulative acknowledgment (next expected byte); unused for data.
    pub ack_seq: u64,
    pub send_timestamp: SimTime,
    /// ACK only: send timestamp of the data packet that triggered it.
    pub echo_timestamp: SimTime,
    /// ACK only: whether the echoed data packet was a retransmission.
    pub echo_retx: bool,
    /// Data only: whether this segment is a retransmission.
    pub retx: bool,
}

impl Packet {
    pub fn data(
        flow_id: FlowId,
        seq: u64,
        payload_bytes: u32,
        header_bytes: u32,
        now: SimTime,
        retx: bool,
    ) -> Packet {
        debug_assert!(payload_bytes > 0);
        Packet {
            flow_id,
            seq,
            size_bytes: payload_bytes + header_bytes,
            payload_bytes,
            is_ack: false,
            ack_seq: 0,
            send_timestamp: now,
            echo_timestamp: SimTime::ZERO,
            echo_retx: false,
            retx,
        }
    }

    pub fn ack(
        flow_id: FlowId,
        ack_seq: u64,
        size_bytes: u32,
        now: SimTime,
        echo_timestamp: SimTime,
        echo_retx: bool,
    ) -> Packet {
        Packet {
            flow_id,
            seq: 0,
            size_bytes,
            payload_bytes: 0,
            is_ack: true,
            ack_seq,
            send_timestamp: now,
            echo_timestamp,
            echo_retx,
            retx: false,
        }
    }
}
