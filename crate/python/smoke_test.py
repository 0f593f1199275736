#!/usr/bin/env python3
"""Smoke test for the mixnorm_py extension module.

Builds nothing itself: it locates the compiled library under target/
(release preferred), stages it under an importable name, and drives a few
computations with known answers end to end.

Run from the repository root:

    cargo build -p mixnorm-py --release
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def stage_module() -> None:
    candidates = [
        REPO_ROOT / "target" / "release" / "libmixnorm_py.so",
        REPO_ROOT / "target" / "debug" / "libmixnorm_py.so",
        REPO_ROOT / "target" / "release" / "libmixnorm_py.dylib",
        REPO_ROOT / "target" / "debug" / "libmixnorm_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("library not found; run `cargo build -p mixnorm-py --release` first")
    stage = Path(tempfile.mkdtemp(prefix="mixnorm-smoke-"))
    suffix = ".so" if built.suffix == ".so" else ".so"  # CPython loads .so on mac too
    shutil.copy2(built, stage / f"mixnorm_py{suffix}")
    sys.path.insert(0, str(stage))


stage_module()

import mixnorm_py  # noqa: E402

failures = 0


def check(label: str, ok: bool, detail: str = "") -> None:
    global failures
    status = "PASS" if ok else "FAIL"
    print(f"{label}: {status}" + (f" ({detail})" if detail else ""))
    if not ok:
        failures += 1


# 1. Domination constant of a single probe with test row (2, 1): the optimal
#    measure sits entirely on the larger entry and the constant is 1/2.
inst = mixnorm_py.Instance((1, 1, 1, 2, 1), [1.0], [2.0, 1.0], [0.0])
constant, measure, violation = mixnorm_py.pietsch_norm(inst, 1.0)
check(
    "domination constant 1/2",
    abs(constant - 0.5) < 1e-12 and abs(measure[0] - 1.0) < 1e-12 and violation <= 1e-9,
    f"constant={constant}, measure={measure}",
)

# 2. Two probes with identity test rows need constant 2, and the extremal
#    family from the LP dual achieves it.
inst2 = mixnorm_py.Instance(
    (2, 1, 1, 2, 2),
    [1.0, 1.0],
    [1.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 1.0],
)
constant2, _, _ = mixnorm_py.pietsch_norm(inst2, 1.0)
family = mixnorm_py.extremal_family(inst2, 1.0)
strong = inst2.strong_sum(family, 1.0)
weak = inst2.weak_sup(family, 1.0, "test")
check(
    "extremal family achieves the constant",
    abs(constant2 - 2.0) < 1e-12 and abs(strong / weak - 2.0) < 1e-9,
    f"constant={constant2}, ratio={strong / weak}",
)

# 3. The canonical mixed-norm example: unit weights, identity mix rows,
#    (s;q) = (2;1). The value is sqrt(2) at the balanced measure.
result = mixnorm_py.mixed_norm(inst2, [(1.0, 0, 0, 0), (1.0, 1, 0, 0)], 1.0, 2.0)
check(
    "mixed norm sqrt(2)",
    abs(result["value"] - math.sqrt(2.0)) < 1e-9
    and abs(result["measure"][0] - 0.5) < 1e-6
    and result["gap"] < 1e-6,
    f"value={result['value']}, measure={result['measure']}",
)

# 4. The independent splitting search lands on the same value.
search = mixnorm_py.mixed_norm_search(inst2, [(1.0, 0, 0, 0), (1.0, 1, 0, 0)], 1.0, 2.0, 4, 7)
check(
    "splitting search agrees",
    abs(search - math.sqrt(2.0)) < 1e-5,
    f"search={search}",
)

# 5. Mixing constant of the identity-pattern instance at (2;1) is sqrt(2),
#    sandwiched by the certified lower bound.
mix = mixnorm_py.mixing_constant(inst2, 1.0, 2.0, grid_depth=10, samples=20, seed=3)
check(
    "mixing constant sqrt(2) with tight sandwich",
    abs(mix["value"] - math.sqrt(2.0)) < 1e-9
    and mix["lower_bound"] <= mix["value"] + 1e-9
    and abs(mix["lower_bound"] - mix["value"]) < 1e-6
    and mix["certificate_violation"] <= 1e-9,
    f"value={mix['value']}, lower={mix['lower_bound']}",
)

# 6. The evaluation embedding has summing norm one for any measure here.
norm = mixnorm_py.embedding_norm(inst2, [0.25, 0.75], 2.0)
check("embedding norm one", abs(norm - 1.0) < 1e-9, f"norm={norm}")

# 7. JSON round trip through the file format.
text = inst2.to_json()
reread = mixnorm_py.Instance.from_json(text)
check("json round trip", reread.sizes == inst2.sizes)

print()
if failures:
    sys.exit(f"{failures} smoke check(s) failed")
print("all smoke checks passed")
