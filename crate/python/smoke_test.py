"""Smoke test for the Python bindings.

Builds the extension with cargo unless TREECELL_MODULE_DIR already holds a
built ``treecell`` module, then exercises a few calls.
"""

import json
import os
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    prebuilt = os.environ.get("TREECELL_MODULE_DIR")
    if prebuilt:
        sys.path.insert(0, prebuilt)
        import treecell

        return treecell
    subprocess.run(["cargo", "build", "--release", "-p", "treecell-py"], cwd=ROOT, check=True)
    suffix = {"darwin": "dylib", "win32": "dll"}.get(sys.platform, "so")
    prefix = "" if sys.platform == "win32" else "lib"
    built = ROOT / "target" / "release" / f"{prefix}treecell_py.{suffix}"
    target = Path(tempfile.mkdtemp()) / ("treecell.pyd" if sys.platform == "win32" else "treecell.so")
    shutil.copy(built, target)
    sys.path.insert(0, str(target.parent))
    import treecell

    return treecell


def main():
    tc = load_module()
    assert len(tc.enumerate("bipart", 2)) == 4
    assert tc.differential("stable", "b(w1 w2 w3)") == "b(b(w1 w2) w3) - b(w1 b(w2 w3))"
    assert tc.d_squared_vanishes("stable", 3)
    assert tc.compose("stable", "b(w1 w2)", 2, "b(w1 w2)") == "b(w1 b(w2 w3))"
    assert tc.project("b(w1 b(w2 w3))") == "b(w1 w2 w3)"
    assert tc.f_vector("W", 3) == [6, 6, 1]
    assert tc.f_vector("K", 5) == [14, 21, 9, 1]
    assert tc.off("K", 4).startswith("nOFF")
    h = json.loads(tc.homology(3))
    assert h["agree"] and h["models"][0]["homology"]["betti"] == [1, 3, 2]
    for check in ("stasheff", "dg", "composition"):
        report = json.loads(tc.hochschild_check("mu3", check, n=2))
        assert report["passed"], report
    try:
        tc.enumerate("nope", 2)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown family accepted")
    print("python smoke test passed")


if __name__ == "__main__":
    main()
