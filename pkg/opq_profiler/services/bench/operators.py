"""
Operator bodies

每个算子体接收一个包（bytearray），返回一个整数并入 sink 累加器，
防止算子工作被当作无用计算消除。
"""
import itertools
import sys
import zlib
from array import array
from typing import Callable, Dict, List, Optional

import numpy as np

from opq_profiler.core.exceptions import FlowTablePoolTooLarge, UnknownOperator
from opq_profiler.shared.constants.enums import OperatorId
from .packets import ETHERTYPE_OFFSET, flow_key

OperatorBody = Callable[[bytearray], int]

_GOLDEN64 = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1
_EMPTY = None


def crc32(data: bytearray) -> int:
    """CRC-32（反射多项式 0xEDB88320），与 zlib 实现逐位一致"""
    return zlib.crc32(data) & 0xFFFFFFFF


def internet_checksum(data: bytes) -> int:
    """RFC 1071 互联网校验和：16位大端字的反码和，再取反"""
    even = len(data) & ~1
    words = array("H", bytes(data[:even]))
    if sys.byteorder == "little":
        words.byteswap()
    total = sum(words)
    if len(data) & 1:
        total += data[-1] << 8
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


def htons_in_place(packet: bytearray) -> int:
    """交换 EtherType 字段的两个字节并写回"""
    hi, lo = packet[ETHERTYPE_OFFSET], packet[ETHERTYPE_OFFSET + 1]
    packet[ETHERTYPE_OFFSET] = lo
    packet[ETHERTYPE_OFFSET + 1] = hi
    return (lo << 8) | hi


class FlowTable:
    """开放寻址（线性探测）流表，容量为2的幂"""

    def __init__(self, slots: int = 65536):
        if slots <= 0 or slots & (slots - 1):
            raise ValueError("slots must be a power of two")
        self.slots = slots
        self.mask = slots - 1
        self.shift = 64 - (slots.bit_length() - 1)
        self.keys: List[Optional[bytes]] = [_EMPTY] * slots
        self.values: List[int] = [0] * slots
        self.size = 0

    def _index(self, key: bytes) -> int:
        h = int.from_bytes(key, "little")
        h = (h ^ (h >> 64)) & _MASK64
        return ((h * _GOLDEN64) & _MASK64) >> self.shift

    def insert(self, key: bytes, value: int) -> None:
        if self.size >= self.slots:
            raise OverflowError("flow table is full")
        idx = self._index(key)
        keys = self.keys
        while keys[idx] is not _EMPTY:
            if keys[idx] == key:
                self.values[idx] = value
                return
            idx = (idx + 1) & self.mask
        keys[idx] = key
        self.values[idx] = value
        self.size += 1

    def lookup(self, key: bytes) -> int:
        """命中返回值，未命中返回 -1"""
        idx = self._index(key)
        keys = self.keys
        while keys[idx] is not _EMPTY:
            if keys[idx] == key:
                return self.values[idx]
            idx = (idx + 1) & self.mask
        return -1

    @property
    def load_factor(self) -> float:
        return self.size / self.slots


def build_flow_table(
    pool: List[bytearray],
    rng: np.random.Generator,
    slots: int = 65536,
    load_factor: float = 0.6,
) -> FlowTable:
    """预填充流表：先放入包池的全部五元组，再用随机键补到目标负载率

    Raises:
        FlowTablePoolTooLarge: 包池条目多于目标负载下的表项数
    """
    target = int(slots * load_factor)
    if len(pool) > target:
        raise FlowTablePoolTooLarge(len(pool), slots, load_factor)
    table = FlowTable(slots)
    for value, packet in enumerate(pool):
        table.insert(flow_key(packet), value)
    while table.size < target:
        table.insert(rng.integers(0, 256, size=13, dtype=np.uint8).tobytes(), table.size)
    return table


class RingLog:
    """预分配的内存环形日志，追加时不产生系统调用"""

    def __init__(self, capacity: int = 4096):
        self.entries: List[Optional[str]] = [None] * capacity
        self.capacity = capacity
        self.position = 0

    def append(self, line: str) -> int:
        pos = self.position
        self.entries[pos] = line
        self.position = (pos + 1) % self.capacity
        return pos


def _noop(packet: bytearray) -> int:
    return 0


def make_operator(
    operator_id: str,
    pool: List[bytearray],
    rng: np.random.Generator,
    hash_slots: int = 65536,
    hash_load_factor: float = 0.6,
    ring_capacity: int = 4096,
) -> OperatorBody:
    """构造算子体

    Raises:
        UnknownOperator: 不支持的算子
    """
    try:
        op = OperatorId(operator_id)
    except ValueError:
        raise UnknownOperator(operator_id) from None

    if op is OperatorId.BASELINE:
        return _noop
    if op is OperatorId.CRC:
        return crc32
    if op is OperatorId.CHECKSUM:
        return internet_checksum
    if op is OperatorId.HTONS:
        return htons_in_place
    if op is OperatorId.HASH:
        table = build_flow_table(pool, rng, hash_slots, hash_load_factor)
        lookup = table.lookup

        def hash_lookup(packet: bytearray) -> int:
            return lookup(flow_key(packet))

        return hash_lookup

    counter = itertools.count()
    if op is OperatorId.PRINTF:
        def printf_line(packet: bytearray) -> int:
            n = next(counter)
            print(f"printf {n}", file=sys.stderr)
            return n

        return printf_line

    ring = RingLog(ring_capacity)

    def ringlog_line(packet: bytearray) -> int:
        return ring.append(f"ringlog {next(counter)}")

    return ringlog_line


OPERATOR_DESCRIPTIONS: Dict[str, str] = {
    OperatorId.BASELINE.value: "buffer fetch + first cache-line read + counter increment",
    OperatorId.CRC.value: "CRC-32 over the full frame",
    OperatorId.CHECKSUM.value: "RFC 1071 internet checksum over the full frame",
    OperatorId.HTONS.value: "16-bit byte swap of the EtherType field",
    OperatorId.HASH.value: "5-tuple lookup in an open-addressing flow table",
    OperatorId.PRINTF.value: "formatted line to standard error",
    OperatorId.RINGLOG.value: "formatted line into an in-memory ring buffer",
}
