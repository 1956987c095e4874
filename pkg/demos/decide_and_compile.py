"""Decide which target ratios a quantum coin can reach, then build circuits."""

from coinfield import compile, decide_qq_ratio, program_to_json, run_symbolic
import json

# A target is written as an expression in p (the unknown bias), t (the coin's
# amplitude ratio sqrt(p/(1-p))), i, and sqrt2. Simulable targets are exactly
# the ones that lower into the field of r(p) + s(p)*t.

for src in ("p", "1 - 2*p", "t^2/(1 + t^2)", "i*t + 1/2", "sqrt(p/(1-p))",
            "sqrt(p^2/(1-p^2))"):
    d = decide_qq_ratio(src)
    if d.simulable:
        g1, g2, g3, g4 = d.witness
        print(f"{src:24s} simulable   s = ({g1})/({g2}), r = ({g3})/({g4})")
    else:
        print(f"{src:24s} NOT simulable: {d.diagnosis}")

print()

# Compiling a simulable target produces a postselected circuit program over
# the gate set {X, H, CNOT, B}. The compiler works macro by macro: coin,
# constants, then add / multiply / invert nodes, each with its own
# postselection and retry scope.

prog = compile(decide_qq_ratio("p").element)
print("compiled target p:")
counts = {}
for ins in prog.instructions:
    counts[type(ins).__name__] = counts.get(type(ins).__name__, 0) + 1
print("  instruction mix:", counts)
print("  registers:", prog.registers, " provenance nodes:", len(prog.nodes))

# The symbolic executor runs the program exactly (amplitudes are polynomials
# in p) and recovers the ratio it implements. This is the compiler's
# correctness check, and it is exact, not numeric.
print("  symbolic ratio:", run_symbolic(prog))

# Programs serialize to JSON for the CLI pipeline (compile | simulate | run).
data = json.dumps(program_to_json(prog))
print("  JSON size:", len(data), "bytes")
