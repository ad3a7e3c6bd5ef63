"""Checkpoint files: a two-line text header plus a raw float64 blob.

Line 1 is a magic string, line 2 a JSON manifest (variant, config hash, and
per-agent layer shapes).  The rest of the file is every parameter tensor
raveled C-order, little-endian float64, agents in manifest order.  Loading
verifies the whole manifest against the receiving networks and refuses on
any mismatch rather than reinterpreting bytes.
"""

from __future__ import annotations

import json

import numpy as np

from .nets import MLPPolicy

MAGIC = b"echelon-checkpoint v1"


class CheckpointMismatch(RuntimeError):
    """Manifest does not match the requesting experiment or networks."""


def _net_manifest(name: str, net: MLPPolicy) -> dict:
    return {
        "name": name,
        "obs_dim": net.obs_dim,
        "heads": net.heads,
        "levels": net.levels,
        "hidden": list(net.hidden),
        "param_count": net.param_count,
    }


def save_checkpoint(
    path: str, variant: str, config_hash: str, nets: dict[str, MLPPolicy]
) -> None:
    manifest = {
        "variant": variant,
        "config_hash": config_hash,
        "agents": [_net_manifest(name, net) for name, net in nets.items()],
    }
    with open(path, "wb") as fh:
        fh.write(MAGIC + b"\n")
        fh.write(json.dumps(manifest, sort_keys=True).encode("utf-8") + b"\n")
        for net in nets.values():
            for p in net.params:
                fh.write(np.ascontiguousarray(p.data, dtype="<f8").tobytes())


def load_checkpoint(
    path: str, variant: str, config_hash: str, nets: dict[str, MLPPolicy]
) -> None:
    """Load parameters in place; every manifest field must match."""
    with open(path, "rb") as fh:
        magic = fh.readline().rstrip(b"\n")
        if magic != MAGIC:
            raise CheckpointMismatch(f"{path} is not a checkpoint (bad magic)")
        try:
            manifest = json.loads(fh.readline().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointMismatch(f"{path} has a corrupt manifest: {exc}") from exc
        blob = fh.read()

    if manifest.get("variant") != variant:
        raise CheckpointMismatch(
            f"checkpoint is for variant '{manifest.get('variant')}', not '{variant}'"
        )
    if manifest.get("config_hash") != config_hash:
        raise CheckpointMismatch(
            "checkpoint was trained under a different chain config "
            f"(hash {manifest.get('config_hash')}, expected {config_hash})"
        )
    agents = manifest.get("agents", [])
    if [a["name"] for a in agents] != list(nets):
        raise CheckpointMismatch(
            f"checkpoint agents {[a['name'] for a in agents]} do not match {list(nets)}"
        )
    for entry in agents:
        net = nets[entry["name"]]
        want = _net_manifest(entry["name"], net)
        if entry != want:
            raise CheckpointMismatch(
                f"agent '{entry['name']}' manifest mismatch: {entry} vs {want}"
            )

    total = sum(net.param_count for net in nets.values())
    values = np.frombuffer(blob, dtype="<f8")
    if values.size != total:
        raise CheckpointMismatch(
            f"checkpoint holds {values.size} parameters, networks need {total}"
        )
    offset = 0
    for net in nets.values():
        for p in net.params:
            n = p.data.size
            p.data[:] = values[offset : offset + n].reshape(p.data.shape)
            offset += n
