"""Smoke test for the Python bindings: python3 smoke.py"""

import json

import cayley_lattice_py as cl

doc = cl.classify(["A1", "A1"], [[1, 1]])
verdict = json.loads(doc)
assert verdict["status"] == "quasi_permutation", verdict["status"]
assert [b["kind"] for b in verdict["certificate"]["blocks"]] == ["so4_pair"]
assert cl.verify(doc)

assert not cl.is_quasi_permutation(["A2", "A2"], [[1, 1]])
assert cl.is_quasi_permutation(["B2"])

tampered = json.loads(doc)
tampered["certificate"]["blocks"][0]["resolution"]["pi"][0][0] += 1
assert not cl.verify(json.dumps(tampered))

assert cl.sha2_jgamma(2, 2) == [2]
assert cl.sha2_jgamma(3, 1) == []

try:
    cl.classify(["X3"])
except ValueError:
    pass
else:
    raise AssertionError("bad type name accepted")

print("ok")
