"""Quick end-to-end check of the ccbend extension module."""

import ccbend

# Frustrated triangle: optimal cost 1.
tri = ccbend.Instance(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, -1.0)])
assert tri.node_count == 3 and tri.edge_count == 3

res = ccbend.solve(tri)
assert res.status == "optimal", res
assert abs(res.cost - 1.0) < 1e-9, res
assert tri.is_feasible(res.x)
assert abs(tri.cost(res.x) - res.cost) < 1e-9

cost, labels = ccbend.brute_force(tri)
assert abs(cost - 1.0) < 1e-9
assert abs(tri.cost(tri.cut_of(labels)) - 1.0) < 1e-9

again = ccbend.Instance.parse(tri.to_text())
assert again.edges() == tri.edges()

for seed in range(5):
    inst = ccbend.generate(nodes=8, prob=0.5, seed=seed)
    opt, _ = ccbend.brute_force(inst)
    bd = ccbend.solve(inst, tau=0.5, seed=seed)
    bl = ccbend.baseline(inst)
    assert abs(bd.cost - opt) < 1e-6, (seed, bd.cost, opt)
    assert abs(bl.cost - opt) < 1e-6, (seed, bl.cost, opt)
    x = ccbend.round(inst, [0.5] * inst.edge_count, method="parallel")
    assert inst.is_feasible(x)

grid = ccbend.generate(grid=(3, 3), seed=1)
assert grid.node_count == 9 and grid.edge_count == 12
assert set(ccbend.vertex_cover(grid)) <= set(range(9))

try:
    ccbend.solve(tri, cover="nope")
except ValueError:
    pass
else:
    raise AssertionError("bad cover accepted")

print("smoke test ok")
