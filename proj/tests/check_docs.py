#!/usr/bin/env python3
"""Run the binpick tool end to end and validate every JSON it writes against docs/."""
import json
import pathlib
import struct
import subprocess
import sys
import tempfile

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tools"))
import validate_docs  # noqa: E402


def main(tool):
    work = pathlib.Path(tempfile.mkdtemp(prefix="binpick_docs_"))

    def run(*args):
        subprocess.run([tool, *map(str, args)], check=True, stdout=subprocess.DEVNULL)

    cfg = work / "scenario.json"
    cfg.write_text(json.dumps({"scene": {"object_count": 6, "corner_bias": 0.5}, "limits": {"max_attempts": 10}}))
    run("gen-scene", "--config", cfg, "--seed", 5, "--out", work / "scene.json", "--camera-out", work / "camera.json")
    run("gen-affordance", "--scene", work / "scene.json", "--camera", work / "camera.json", "--out", work / "aff.tensor",
        "--depth-out", work / "depth.tensor", "--rgb-out", work / "rgb.png")
    cam = json.loads((work / "camera.json").read_text())
    scene = json.loads((work / "scene.json").read_text())
    (work / "bin.json").write_text(json.dumps({**scene["bin"], "pose": {**cam["pose"], "convention": "bin_to_camera"}}))
    (work / "intrinsics.json").write_text(json.dumps(cam["intrinsics"]))
    run("plan", "--depth", work / "depth.tensor", "--affordance", work / "aff.tensor", "--bin", work / "bin.json",
        "--camera", work / "intrinsics.json", "--rgb", work / "rgb.png", "--out", work / "plan.json")
    run("synth-views", "--scene", work / "scene.json", "--out", work / "cap", "--views", 4)
    run("label-transfer", "--scene", work / "cap")
    run("material", "--rgb", work / "rgb.png", "--depth", work / "depth.tensor", "--pixel", "160,120",
        "--export", work / "crops")
    run("simulate", "--config", cfg, "--episodes", 2, "--report", work / "report.json")

    raw = (work / "aff.tensor").read_bytes()
    n = struct.unpack("<I", raw[8:12])[0]
    (work / "header.json").write_text(raw[12:12 + n].decode())

    checks = [
        ("scenario.schema.json", [cfg]),
        ("scene.schema.json", [work / "scene.json"]),
        ("camera.schema.json", [work / "camera.json"]),
        ("bin.schema.json", [work / "bin.json"]),
        ("intrinsics.schema.json", [work / "intrinsics.json", work / "cap" / "intrinsics.json"]),
        ("plan.schema.json", [work / "plan.json"]),
        ("pose.schema.json", sorted((work / "cap").glob("view_*/pose.json"))),
        ("transfer-report.schema.json", [work / "cap" / "report.json"]),
        ("crop.schema.json", sorted((work / "crops").glob("*.json"))),
        ("simulation-report.schema.json", [work / "report.json"]),
        ("tensor-header.schema.json", [work / "header.json"]),
    ]
    failed = 0
    for schema, docs in checks:
        rc = validate_docs.main(["validate_docs", schema, *map(str, docs)])
        print(f"{'ok ' if rc == 0 else 'BAD'} {schema} ({len(docs)} documents)")
        failed += rc != 0
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
