"""Project metadata for run manifests, read from pyproject.toml and requirements.txt."""

from __future__ import annotations

import os
import platform
import re
from functools import lru_cache
from importlib import metadata
from pathlib import Path
from typing import Any

import toml

RUNTIME_PACKAGES = ("numpy", "scipy", "pydantic", "toml")


def project_root() -> str:
    return str(Path(__file__).resolve().parent.parent)


@lru_cache(maxsize=None)
def discover_project_info(root_dir: str) -> dict[str, Any]:
    info: dict[str, Any] = {
        "name": None,
        "version": None,
        "root_dir": root_dir,
        "dependencies": {},
        "config_files": [],
    }

    for fname in ("pyproject.toml", "requirements.txt", "pytest.ini"):
        if os.path.exists(os.path.join(root_dir, fname)):
            info["config_files"].append(fname)

    pyproj = os.path.join(root_dir, "pyproject.toml")
    if os.path.exists(pyproj):
        project = toml.load(pyproj).get("project", {})
        info["name"] = project.get("name")
        info["version"] = project.get("version")

    req = os.path.join(root_dir, "requirements.txt")
    if os.path.exists(req):
        with open(req, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                # simple split on == or >=
                parts = re.split(r"(?:==|>=)", line, maxsplit=1)
                info["dependencies"][parts[0]] = parts[1] if len(parts) > 1 else ""

    return info


def _installed(package: str) -> str | None:
    try:
        return metadata.version(package)
    except metadata.PackageNotFoundError:
        return None


def run_metadata() -> dict[str, Any]:
    """Project info plus interpreter and installed numerical-stack versions."""
    info = dict(discover_project_info(project_root()))
    info["python"] = platform.python_version()
    info["installed"] = {pkg: _installed(pkg) for pkg in RUNTIME_PACKAGES}
    return info


__all__ = ["discover_project_info", "project_root", "run_metadata"]
