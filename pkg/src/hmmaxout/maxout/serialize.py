"""``MXTN1`` model container.

Layout (little endian)::

    b"MXTN1"
    u32 n | n bytes UTF-8 JSON: {"version", "spec", "params": [{"shape"}...]}
    float64 parameter blocks, in declaration order
    u32 count | repeated (u32 n | n bytes UTF-8 JSON) extra blocks
"""
import json
import struct

import numpy as np

from .network import Network, NetworkSpec

MAGIC = b"MXTN1"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _block(obj):
    raw = json.dumps(obj, sort_keys=True).encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def dumps(network, extras=()):
    head = {"version": VERSION, "spec": network.spec.to_json(),
            "params": [{"shape": list(p.shape)} for p in network.params]}
    out = [MAGIC, _block(head)]
    for p in network.params:
        out.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    out.append(struct.pack("<I", len(extras)))
    out.extend(_block(e) for e in extras)
    return b"".join(out)


def _read_block(data, pos):
    if pos + 4 > len(data):
        raise ModelFormatError(f"truncated block length at byte {pos}")
    (n,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if pos + n > len(data):
        raise ModelFormatError(f"truncated JSON block at byte {pos}")
    return json.loads(data[pos:pos + n].decode("utf-8")), pos + n


def loads(data):
    """Return ``(network, extras)``; parameter shapes are checked against the spec."""
    if data[:5] != MAGIC:
        raise ModelFormatError("not an MXTN1 container")
    head, pos = _read_block(data, 5)
    if head.get("version") != VERSION:
        raise ModelFormatError(f"unsupported container version {head.get('version')}")
    spec = NetworkSpec.from_json(head["spec"])
    net = Network.build(spec, np.random.default_rng(0))
    expected = [p.shape for p in net.params]
    declared = [tuple(p["shape"]) for p in head["params"]]
    if declared != expected:
        raise ModelFormatError(f"parameter shapes {declared} do not match the spec {expected}")
    for p in net.params:
        nbytes = p.size * 8
        if pos + nbytes > len(data):
            raise ModelFormatError(f"truncated parameter block at byte {pos}")
        p[...] = np.frombuffer(data, dtype="<f8", count=p.size, offset=pos).reshape(p.shape)
        pos += nbytes
    if pos + 4 > len(data):
        raise ModelFormatError(f"missing extras count at byte {pos}")
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    extras = []
    for _ in range(count):
        e, pos = _read_block(data, pos)
        extras.append(e)
    return net, extras


def save(path, network, extras=()):
    with open(path, "wb") as f:
        f.write(dumps(network, extras))


def load(path):
    with open(path, "rb") as f:
        return loads(f.read())
