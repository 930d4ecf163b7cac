"""
Synthetic packet pool

每个包是一个 Ethernet/IPv4/UDP 帧，地址和端口由种子随机数生成。
"""
from typing import List

import numpy as np

ETHERTYPE_OFFSET = 12
IPV4_OFFSET = 14
PROTO_OFFSET = 23
ADDR_PORT_SLICE = slice(26, 38)  # src ip, dst ip, src port, dst port
FLOW_KEY_LEN = 13
IPPROTO_UDP = 17


def flow_key(packet: bytearray) -> bytes:
    """读取13字节五元组，不足38字节的帧补零"""
    key = packet[PROTO_OFFSET:PROTO_OFFSET + 1] + packet[ADDR_PORT_SLICE]
    if len(key) < FLOW_KEY_LEN:
        key += bytes(FLOW_KEY_LEN - len(key))
    return bytes(key)


def build_pool(packet_size: int, pool_size: int, rng: np.random.Generator) -> List[bytearray]:
    """生成 pool_size 个 packet_size 字节的帧"""
    raw = rng.integers(0, 256, size=(pool_size, packet_size), dtype=np.uint8)
    pool = []
    for row in raw:
        packet = bytearray(row.tobytes())
        packet[ETHERTYPE_OFFSET:ETHERTYPE_OFFSET + 2] = b"\x08\x00"
        if packet_size > PROTO_OFFSET:
            packet[IPV4_OFFSET] = 0x45
            packet[PROTO_OFFSET] = IPPROTO_UDP
        pool.append(packet)
    return pool
