"""Smoke test for the compiled extension: run after `maturin develop`."""

import json

import quiver_poisson_py as qp

loops = qp.Quiver("vertices: 1\narrow x 1 -> 1\narrow y 1 -> 1\n")
assert loops.num_vertices == 1
assert [a[0] for a in loops.arrows] == ["x", "y"]

linear = qp.Necklace(loops, "[x x', x'] + [y x', y']")
cubic = qp.Necklace(loops, "[y y', y x x' + y y y']")
gamma = qp.Necklace(loops, "y x y y'")
assert gamma.bracket(linear) == cubic
assert gamma.bracket(cubic).is_zero()
assert linear.is_poisson() and cubic.is_poisson()
assert json.loads(linear.to_json())["schema"] == 1

kron3 = qp.Quiver.from_arrows(2, [("x", 1, 2), ("y", 1, 2), ("z", 1, 2)])
q_m, r_text, pi = qp.aguiar(3)
assert qp.ayb_check(q_m, r_text)
assert pi.is_poisson()

gl3 = qp.Necklace(kron3, "[x y', x x'] + [x z', y x'] + [y z', x x'] + [y z', y y']")
print("C^3 field:", qp.psi(gl3, [1, 1]))
q_y, pi_y = qp.contract(gl3, "y")
assert q_y.num_vertices == 1
assert pi_y == qp.Necklace(q_y, "-[x x x' + x z z', x x'] + [z', x' x - z z']")

residual, sign = qp.symplectic_check("i", k=2, samples=3, seed=1)
assert residual < 1e-8, residual

code, out, _ = qp.run_cli(["is-poisson", "-q", "vertices: 1 / arrow x 1 -> 1 / arrow y 1 -> 1", "-e", "[x y', x x']"])
assert code == 0, out

try:
    qp.Necklace(loops, "x z'")
except ValueError as e:
    print("rejected:", e)
else:
    raise AssertionError("unknown arrow accepted")

print("smoke test passed")
