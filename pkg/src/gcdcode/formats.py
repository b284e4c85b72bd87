"""Binary file formats: codebooks, message blocks, and codeword streams.

All integers are unsigned and big-endian.

Codebook file (version 1)::

    magic      4 bytes   b"GCDC"
    version    u16       1
    mode       u8        0 = FF, 1 = FV
    coloring   u8        0 = greedy, 1 = bipartite
    n          u32       block length
    R_num      u64       FF rate numerator   (0 for FV)
    R_den      u64       FF rate denominator (0 for FV)
    N_s        u8        number of sources
    sizes      N_s x u16 alphabet size of each source
    N_d        u8        number of decoders
    demands    N_d x (u8 count, count x u8 source index), 0-based
    n_types    u32       number of type records that follow
    records    n_types x:
        counts       joint_size x u32   count vector in canonical letter order
        budget       u64                closed-form color budget
        colors_used  u64
        width        u8                 bits per packed color
        colors       ceil(class_size * width / 8) bytes, MSB-first bit packing,
                     one color per class member in class-rank order

Message file (version 1)::

    magic b"GCDM", version u16, n u32, N_s u8, block count u32,
    then every block as n x N_s u8 symbols (time-major, source-minor).

Codeword file (version 1)::

    magic b"GCDW", version u16, mode u8, block count u32, then per block
    FF: index u64, flag u8 (1 = declared encoding error)
    FV: bit length u32, ceil(length / 8) bytes, MSB-first, zero padded.
"""

from __future__ import annotations

import io
import struct
from fractions import Fraction
from typing import BinaryIO, Iterable, List, Sequence, Tuple

from .codec import FF, FV, Codebook, FFCodeword
from .errors import FormatError, VersionMismatch
from .graphcode import BIPARTITE, GREEDY, TypeColoring
from .network import NetworkSpec
from .typekit import AlphabetSpec, JointType, class_size

CODEBOOK_MAGIC = b"GCDC"
MESSAGE_MAGIC = b"GCDM"
CODEWORD_MAGIC = b"GCDW"
VERSION = 1

_MODES = {FF: 0, FV: 1}
_COLORINGS = {GREEDY: 0, BIPARTITE: 1}


def _read(f: BinaryIO, fmt: str):
    size = struct.calcsize(fmt)
    data = f.read(size)
    if len(data) != size:
        raise FormatError("unexpected end of file")
    return struct.unpack(fmt, data)


def _header(f: BinaryIO, magic: bytes) -> None:
    got = f.read(4)
    if got != magic:
        raise FormatError(f"bad magic {got!r}, expected {magic!r}")
    (version,) = _read(f, ">H")
    if version != VERSION:
        raise VersionMismatch(f"file version {version}, this build reads version {VERSION}")


def pack_bits(values: Iterable[int], width: int) -> bytes:
    acc = 0
    nbits = 0
    for v in values:
        acc = (acc << width) | v
        nbits += width
    pad = -nbits % 8
    return (acc << pad).to_bytes((nbits + pad) // 8, "big")


def unpack_bits(data: bytes, count: int, width: int) -> List[int]:
    if width == 0:
        return [0] * count
    total = count * width
    acc = int.from_bytes(data, "big") >> (len(data) * 8 - total)
    mask = (1 << width) - 1
    return [(acc >> (total - (i + 1) * width)) & mask for i in range(count)]


# ---------------------------------------------------------------------------
# codebooks
# ---------------------------------------------------------------------------


def write_codebook(cb: Codebook, f: BinaryIO) -> None:
    cb.materialize()
    f.write(CODEBOOK_MAGIC)
    R = Fraction(cb.R) if cb.mode == FF else Fraction(0)
    den = R.denominator if cb.mode == FF else 0
    f.write(
        struct.pack(
            ">HBBIQQ",
            VERSION,
            _MODES[cb.mode],
            _COLORINGS[cb.coloring_mode],
            cb.n,
            R.numerator,
            den,
        )
    )
    sizes = cb.alphabet.sizes
    f.write(struct.pack(">B", len(sizes)) + struct.pack(f">{len(sizes)}H", *sizes))
    f.write(struct.pack(">B", cb.net.n_decoders))
    for j in range(cb.net.n_decoders):
        d = cb.net.demand(j)
        f.write(struct.pack(f">B{len(d)}B", len(d), *d))
    f.write(struct.pack(">I", len(cb.types)))
    k = cb.alphabet.joint_size
    for Q in cb.types:
        c = cb.coloring(Q)
        width = (c.colors_used - 1).bit_length()
        f.write(struct.pack(f">{k}I", *Q.counts))
        f.write(struct.pack(">QQB", c.budget, c.colors_used, width))
        f.write(pack_bits(c.colors, width))


def read_codebook(f: BinaryIO, verify: bool = True) -> Codebook:
    _header(f, CODEBOOK_MAGIC)
    mode_b, coloring_b, n, num, den = _read(f, ">BBIQQ")
    modes = {v: k for k, v in _MODES.items()}
    colorings = {v: k for k, v in _COLORINGS.items()}
    if mode_b not in modes or coloring_b not in colorings:
        raise FormatError("unknown mode or coloring code")
    mode, coloring_mode = modes[mode_b], colorings[coloring_b]
    (ns,) = _read(f, ">B")
    sizes = _read(f, f">{ns}H")
    (nd,) = _read(f, ">B")
    demands = []
    for _ in range(nd):
        (cnt,) = _read(f, ">B")
        demands.append(set(_read(f, f">{cnt}B")))
    if mode == FF and den == 0:
        raise FormatError("FF codebook with zero rate denominator")
    R = Fraction(num, den) if mode == FF else None
    try:
        alphabet = AlphabetSpec(sizes)
        net = NetworkSpec(ns, tuple(demands))
        cb = Codebook(n, net, alphabet, mode, coloring_mode, R)
    except (ValueError, ArithmeticError) as exc:
        raise FormatError(f"inconsistent codebook header: {exc}") from exc
    (count,) = _read(f, ">I")
    if count != len(cb.types):
        raise FormatError(f"{count} type records, expected {len(cb.types)}")
    k = alphabet.joint_size
    for expected in cb.types:
        counts = _read(f, f">{k}I")
        Q = JointType(alphabet, counts)
        if Q != expected:
            raise FormatError("type records are not in canonical order")
        budget, used, width = _read(f, ">QQB")
        size = class_size(Q)
        nbytes = (size * width + 7) // 8
        data = f.read(nbytes)
        if len(data) != nbytes:
            raise FormatError("unexpected end of file in color array")
        colors = tuple(unpack_bits(data, size, width))
        if budget != cb.budget(Q) or used > budget or max(colors) >= used:
            raise FormatError("color record inconsistent with its type")
        cb._install(TypeColoring(Q, colors, used, budget, coloring_mode))
    if verify and not cb.verify():
        raise FormatError("codebook contains an improper coloring")
    return cb


def codebook_to_bytes(cb: Codebook) -> bytes:
    buf = io.BytesIO()
    write_codebook(cb, buf)
    return buf.getvalue()


def codebook_from_bytes(data: bytes, verify: bool = True) -> Codebook:
    return read_codebook(io.BytesIO(data), verify)


# ---------------------------------------------------------------------------
# messages
# ---------------------------------------------------------------------------


def write_messages(blocks: Sequence[Sequence[Tuple[int, ...]]], n: int, n_sources: int, f: BinaryIO) -> None:
    f.write(MESSAGE_MAGIC + struct.pack(">HIBI", VERSION, n, n_sources, len(blocks)))
    for block in blocks:
        if len(block) != n:
            raise FormatError(f"block of length {len(block)}, expected {n}")
        flat = [s for letter in block for s in letter]
        if len(flat) != n * n_sources:
            raise FormatError("block letters have the wrong arity")
        f.write(bytes(flat))


def read_messages(f: BinaryIO):
    """Return ``(n, n_sources, blocks)``."""
    _header(f, MESSAGE_MAGIC)
    n, ns, count = _read(f, ">IBI")
    blocks = []
    width = n * ns
    for _ in range(count):
        data = f.read(width)
        if len(data) != width:
            raise FormatError("unexpected end of file in message block")
        blocks.append(tuple(tuple(data[i : i + ns]) for i in range(0, width, ns)))
    return n, ns, blocks


# ---------------------------------------------------------------------------
# codewords
# ---------------------------------------------------------------------------


def write_codewords(mode: str, words: Sequence, f: BinaryIO) -> None:
    f.write(CODEWORD_MAGIC + struct.pack(">HBI", VERSION, _MODES[mode], len(words)))
    for w in words:
        if mode == FF:
            f.write(struct.pack(">QB", w.index, int(w.declared_error)))
        else:
            f.write(struct.pack(">I", len(w)))
            f.write(pack_bits((int(b) for b in w), 1))


def read_codewords(f: BinaryIO):
    """Return ``(mode, words)``; FF words are :class:`FFCodeword`, FV words bit strings."""
    _header(f, CODEWORD_MAGIC)
    mode_b, count = _read(f, ">BI")
    modes = {v: k for k, v in _MODES.items()}
    if mode_b not in modes:
        raise FormatError(f"unknown codeword mode {mode_b}")
    mode = modes[mode_b]
    words = []
    for _ in range(count):
        if mode == FF:
            index, flag = _read(f, ">QB")
            words.append(FFCodeword(index, bool(flag)))
        else:
            (length,) = _read(f, ">I")
            nbytes = (length + 7) // 8
            data = f.read(nbytes)
            if len(data) != nbytes:
                raise FormatError("unexpected end of file in codeword")
            words.append("".join(str(b) for b in unpack_bits(data, length, 1)))
    return mode, words
