"""Report serialization: manifests, canonical JSON bodies, schema checks.

Every CLI report is a JSON document ``{"schema": ..., "manifest": ...,
"body": ...}``.  The manifest echoes the command and its parameters plus a
timestamp; the body is everything the computation produced and is rendered
with sorted keys and fixed separators, so identical manifests (ignoring the
timestamp) produce byte-identical bodies.
"""

from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__

SCHEMA_VERSION = 1


@dataclass
class RunManifest:
    command: str
    params: dict
    algebra: str | None = None
    seeds: list[int] = field(default_factory=list)
    tool_version: str = __version__
    timestamp: str = ""

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "algebra": self.algebra,
            "seeds": self.seeds,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp or datetime.now(timezone.utc).isoformat(),
        }


def build_report(manifest: RunManifest, body: dict) -> dict:
    return {
        "schema": {"name": f"report/{manifest.command}", "version": SCHEMA_VERSION},
        "manifest": manifest.as_dict(),
        "body": body,
    }


def body_bytes(report: dict) -> bytes:
    """Canonical byte rendering of the report body."""
    return json.dumps(report["body"], sort_keys=True, separators=(",", ":")).encode()


def write_report(report: dict, out_path: str | None) -> None:
    validate_report(report)
    text = json.dumps(report, sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def write_csv(rows: list[dict], out_path: str) -> None:
    if not rows:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write("")
        return
    fieldnames = list(rows[0].keys())
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


class SchemaError(ValueError):
    pass


# Required body keys (with types) per command; extra keys are allowed so
# schema growth is backwards-compatible within a version.
_BODY_REQUIRED: dict[str, dict[str, type]] = {
    "lie-info": {
        "algebra": str, "dim": int, "rank": int, "positive_roots": int,
        "root_count": int, "killing_det_sign": int, "jacobi_holds": bool,
    },
    "spencer-matrix": {
        "algebra": str, "variant": str, "k_from": int, "k_to": int,
        "nrows": int, "ncols": int, "nnz": int,
    },
    "spencer-kernel": {
        "algebra": str, "k": int, "kernel_dim": int, "certificate": dict,
    },
    "spencer-verify": {"algebra": str, "audits": list, "forced_identities_hold": bool},
    "spencer-cohomology": {
        "algebra": str, "torus_dimension": int, "betti": list,
        "degenerate_dims": list, "euler_characteristic": int,
    },
    "tension": {"algebra": str, "verdict": str, "lower_bound": int, "upper_bound": int},
    "varsolve": {
        "algebra": str, "iterations": int, "final": dict, "converged": bool,
    },
}


def validate_report(report: dict) -> None:
    for key in ("schema", "manifest", "body"):
        if key not in report:
            raise SchemaError(f"report is missing the {key!r} section")
    schema = report["schema"]
    if schema.get("version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {schema.get('version')}")
    name = schema.get("name", "")
    if not name.startswith("report/"):
        raise SchemaError(f"bad schema name {name!r}")
    command = name[len("report/"):]
    manifest = report["manifest"]
    for key in ("command", "params", "tool_version", "timestamp"):
        if key not in manifest:
            raise SchemaError(f"manifest is missing {key!r}")
    required = _BODY_REQUIRED.get(command)
    if required is None:
        raise SchemaError(f"unknown report command {command!r}")
    body = report["body"]
    for key, typ in required.items():
        if key not in body:
            raise SchemaError(f"body is missing {key!r} for {command}")
        if not isinstance(body[key], typ):
            raise SchemaError(
                f"body field {key!r} has type {type(body[key]).__name__}, "
                f"expected {typ.__name__}"
            )
