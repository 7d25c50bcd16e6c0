"""Provenance headers for output files.

Every artifact the pipeline writes starts with a header carrying the digest
of the resolved run configuration, the digest of the direct input files,
and the tool version.  Headers contain nothing time- or host-dependent so
identical runs produce identical bytes.
"""

import hashlib
import json
from pathlib import Path

from . import __version__


def config_digest(config_dict: dict) -> str:
    canonical = json.dumps(config_dict, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()[:16]


def input_digest(paths: list[str | Path]) -> str:
    h = hashlib.sha256()
    for path in paths:
        name = Path(path).name.encode("utf-8")
        h.update(len(name).to_bytes(4, "little"))
        h.update(name)
        h.update(bytes.fromhex(file_digest(path)))
    return h.hexdigest()[:16]


def header_dict(cfg_digest: str, in_digest: str) -> dict:
    return {"config": cfg_digest, "inputs": in_digest, "version": __version__}


def jsonl_header(cfg_digest: str, in_digest: str) -> str:
    return json.dumps({"_provenance": header_dict(cfg_digest, in_digest)}) + "\n"


def comment_header(cfg_digest: str, in_digest: str) -> str:
    info = header_dict(cfg_digest, in_digest)
    return f"# provenance config={info['config']} inputs={info['inputs']} version={info['version']}\n"
