"""Execute circuit programs two ways: exact symbolic amplitudes, and seeded
Monte Carlo with retry and cost accounting.

Symbolic execution tracks each entangled register group as a vector of
amplitude pairs (A, B), meaning the polynomial A(p) + B(p)*w with
w = sqrt(p(1-p)). Global factors cancel in the final ratio, so states are
kept unnormalized with denominators cleared.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .field import INFINITY, FieldElem, Infinity, ONE_MINUS_P, W_SQUARED
from .polys import Poly, RatFn, gcd_many
from .scalars import HALF_SQRT2, Scalar
from .synth import (AllocCoin, AllocConst, CircuitProgram, Gate, Measure,
                    static_counts, validate_program)

__all__ = [
    "PostselectionError", "gate_matrix", "run_symbolic",
    "CostReport", "expected_cost", "RunResult", "run_numeric",
]

_S0 = Scalar(0)
_S1 = Scalar(1)
_H = HALF_SQRT2  # exactly 1/sqrt2

_GATES = {
    "X": ((_S0, _S1),
          (_S1, _S0)),
    "H": ((_H, _H),
          (_H, -_H)),
    "CNOT": ((_S1, _S0, _S0, _S0),
             (_S0, _S1, _S0, _S0),
             (_S0, _S0, _S0, _S1),
             (_S0, _S0, _S1, _S0)),
    "B": ((_S0, _S0, _S0, _S1),
          (_S0, _H, _H, _S0),
          (_S0, _H, -_H, _S0),
          (_S1, _S0, _S0, _S0)),
}


def gate_matrix(name: str) -> tuple[tuple[Scalar, ...], ...]:
    """Exact matrix of a gate, rows of Scalars, basis |0..0> first."""
    return _GATES[name]


class PostselectionError(ValueError):
    """The kept measurement branch has amplitude identically zero."""


# -- symbolic execution ----------------------------------------------------

_PZERO = Poly.zero()
_PONE = Poly.const(1)


def _pair_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _pair_mul(a, b):
    # (A1 + B1 w)(A2 + B2 w) with w^2 = p(1-p)
    return (a[0] * b[0] + a[1] * b[1] * W_SQUARED, a[0] * b[1] + a[1] * b[0])


def _pair_scale(c: Scalar, a):
    return (a[0] * c, a[1] * c)


def _pair_is_zero(a):
    return a[0].is_zero() and a[1].is_zero()


class _SymGroup:
    __slots__ = ("regs", "amps")

    def __init__(self, regs, amps):
        self.regs = regs      # tuple of register ids, leftmost = high bit
        self.amps = amps      # list of (Poly, Poly), length 2**len(regs)


class _SymState:
    """Register groups with exact amplitude pairs; measurements postselect."""

    __slots__ = ("group_of",)

    def __init__(self):
        self.group_of: dict[int, _SymGroup] = {}

    def alloc_coin(self, reg: int) -> None:
        # coin sqrt(p)|0> + sqrt(1-p)|1>, cleared to w|0> + (1-p)|1>
        amps = [(_PZERO, _PONE), (ONE_MINUS_P, _PZERO)]
        self.group_of[reg] = _SymGroup((reg,), amps)

    def alloc_const(self, reg: int, value: Scalar) -> None:
        amps = [(Poly.const(value), _PZERO), (_PONE, _PZERO)]
        self.group_of[reg] = _SymGroup((reg,), amps)

    def _merge(self, g1: _SymGroup, g2: _SymGroup) -> _SymGroup:
        amps = [_pair_mul(a, b) for a in g1.amps for b in g2.amps]
        merged = _SymGroup(g1.regs + g2.regs, amps)
        for r in merged.regs:
            self.group_of[r] = merged
        return merged

    def apply_gate(self, name: str, regs: tuple[int, ...]) -> None:
        mat = _GATES[name]
        if len(regs) == 2:
            g1, g2 = self.group_of[regs[0]], self.group_of[regs[1]]
            grp = g1 if g1 is g2 else self._merge(g1, g2)
        else:
            grp = self.group_of[regs[0]]
        n = len(grp.regs)
        pos = [grp.regs.index(r) for r in regs]
        strides = [1 << (n - 1 - j) for j in pos]
        amps = grp.amps
        if len(regs) == 1:
            s = strides[0]
            for base in range(1 << n):
                if base & s:
                    continue
                a0, a1 = amps[base], amps[base | s]
                amps[base] = _pair_add(_pair_scale(mat[0][0], a0),
                                       _pair_scale(mat[0][1], a1))
                amps[base | s] = _pair_add(_pair_scale(mat[1][0], a0),
                                           _pair_scale(mat[1][1], a1))
        else:
            s1, s2 = strides
            for base in range(1 << n):
                if base & s1 or base & s2:
                    continue
                idx = (base, base | s2, base | s1, base | s1 | s2)
                old = [amps[i] for i in idx]
                for k in range(4):
                    acc = (_PZERO, _PZERO)
                    for j in range(4):
                        if mat[k][j]:
                            acc = _pair_add(acc, _pair_scale(mat[k][j], old[j]))
                    amps[idx[k]] = acc

    def measure(self, reg: int, keep: int) -> None:
        grp = self.group_of[reg]
        n = len(grp.regs)
        pos = grp.regs.index(reg)
        s = 1 << (n - 1 - pos)
        kept = [grp.amps[i] for i in range(1 << n)
                if ((i & s) != 0) == (keep == 1)]
        if all(_pair_is_zero(a) for a in kept):
            raise PostselectionError(
                f"kept branch of register {reg} has amplitude identically zero")
        del self.group_of[reg]
        regs = tuple(r for r in grp.regs if r != reg)
        if not regs:
            return  # fully measured group contributes a global factor only
        grp.regs = regs
        grp.amps = kept
        self._reduce(grp)

    def _reduce(self, grp: _SymGroup) -> None:
        # divide out a shared polynomial factor once degrees get large
        degs = [p.degree for a in grp.amps for p in a if not p.is_zero()]
        if not degs or max(degs) <= 24:
            return
        polys = [p for a in grp.amps for p in a if not p.is_zero()]
        g = gcd_many(polys)
        if g.degree > 0:
            grp.amps = [(a[0] // g if not a[0].is_zero() else a[0],
                         a[1] // g if not a[1].is_zero() else a[1])
                        for a in grp.amps]

    def measure_mass(self, reg: int, keep: int, p0: Fraction
                     ) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        """Exact kept and total masses at p0 as (xk, yk, xt, yt), each mass
        meaning x + y*sqrt(p0(1-p0))."""
        grp = self.group_of[reg]
        n = len(grp.regs)
        s = 1 << (n - 1 - grp.regs.index(reg))
        wsq = Scalar(p0 * (1 - p0))
        xk = yk = xt = yt = Scalar(0)
        for i in range(1 << n):
            a, b = grp.amps[i]
            av, bv = a.eval_exact(p0), b.eval_exact(p0)
            x = av * av.conj() + bv * bv.conj() * wsq
            y = av * bv.conj() + bv * av.conj()
            xt, yt = xt + x, yt + y
            if ((i & s) != 0) == (keep == 1):
                xk, yk = xk + x, yk + y
        return xk, yk, xt, yt


def _mass_is_zero(x: Scalar, y: Scalar, p0: Fraction) -> bool:
    # x + y*w0 = 0 with w0 = sqrt(p0(1-p0)) > 0
    if not y:
        return not x
    q = (-x) * y.inverse()
    return q * q == Scalar(p0 * (1 - p0))


def _mass_float(x: Scalar, y: Scalar, w0: float) -> float:
    return x.to_complex().real + y.to_complex().real * w0


def _symbolic_pass(prog: CircuitProgram, p0: Fraction | None
                   ) -> tuple[FieldElem | Infinity, dict[int, float]]:
    validate_program(prog)
    state = _SymState()
    probs: dict[int, float] = {}
    w0 = math.sqrt(float(p0) * (1 - float(p0))) if p0 is not None else 0.0
    for idx, ins in enumerate(prog.instructions):
        if isinstance(ins, AllocCoin):
            state.alloc_coin(ins.reg)
        elif isinstance(ins, AllocConst):
            state.alloc_const(ins.reg, ins.value)
        elif isinstance(ins, Gate):
            state.apply_gate(ins.name, ins.regs)
        else:
            if p0 is not None:
                xk, yk, xt, yt = state.measure_mass(ins.reg, ins.keep, p0)
                if _mass_is_zero(xk, yk, p0):
                    raise PostselectionError(
                        f"measurement of register {ins.reg} succeeds with "
                        f"probability 0 at p = {p0}")
                prob = _mass_float(xk, yk, w0) / _mass_float(xt, yt, w0)
                probs[idx] = min(1.0, max(0.0, prob))
            state.measure(ins.reg, ins.keep)
    grp = state.group_of[prog.output]
    (a0, b0), (a1, b1) = grp.amps
    if a1.is_zero() and b1.is_zero():
        return INFINITY, probs
    den = a1 * a1 - b1 * b1 * W_SQUARED
    r = RatFn(a0 * a1 - b0 * b1 * W_SQUARED, den)
    s = RatFn((b0 * a1 - a0 * b1) * ONE_MINUS_P, den)
    return FieldElem(r, s), probs


def run_symbolic(prog: CircuitProgram) -> FieldElem | Infinity:
    """Exact output amplitude ratio of a program, assuming every
    postselection succeeds. Raises PostselectionError when a kept branch
    is identically zero."""
    ratio, _ = _symbolic_pass(prog, None)
    return ratio


# -- expected cost ---------------------------------------------------------

@dataclass(frozen=True)
class CostReport:
    """Analytic retry-weighted cost of a program at a coin bias p0.

    expected_attempts maps each provenance node to the expected number of
    times its subtree is built per run; measure_probs maps each measurement
    instruction to its per-attempt success probability."""
    p0: float
    expected_coins: float
    expected_consts: float
    success_probability: float
    expected_attempts: dict[int, float]
    measure_probs: dict[int, float]
    static: dict

    def to_json(self) -> dict:
        return {
            "p0": self.p0,
            "expected_coins": self.expected_coins,
            "expected_consts": self.expected_consts,
            "success_probability": self.success_probability,
            "expected_attempts": {str(k): v for k, v in self.expected_attempts.items()},
            "measure_probs": {str(k): v for k, v in self.measure_probs.items()},
            "static": dict(self.static),
        }


def expected_cost(prog: CircuitProgram, p0: Fraction | float) -> CostReport:
    """Expected coin and constant-coin consumption under the retry semantics:
    a node's expected cost is its children's total divided by the product of
    its own measurement success probabilities."""
    p0 = Fraction(p0)
    if not 0 < p0 < 1:
        raise ValueError("p0 must lie strictly between 0 and 1")
    _, probs = _symbolic_pass(prog, p0)

    own_prob = [1.0] * len(prog.nodes)
    own_coins = [0] * len(prog.nodes)
    own_consts = [0] * len(prog.nodes)
    for node in prog.nodes:
        for tag, ref in node.items:
            if tag != "instr":
                continue
            ins = prog.instructions[ref]
            if isinstance(ins, Measure):
                own_prob[node.id] *= probs[ref]
            elif isinstance(ins, AllocCoin):
                own_coins[node.id] += 1
            elif isinstance(ins, AllocConst):
                own_consts[node.id] += 1

    attempts: dict[int, float] = {}

    def walk(nid: int, upstream: float) -> None:
        if own_prob[nid] == 0.0:
            raise PostselectionError(
                f"node {nid} has success probability 0 at p = {p0}")
        a = upstream / own_prob[nid]
        attempts[nid] = a
        for tag, ref in prog.nodes[nid].items:
            if tag == "child":
                walk(ref, a)

    walk(prog.root, 1.0)
    coins = sum(attempts[n] * own_coins[n] for n in range(len(prog.nodes)))
    consts = sum(attempts[n] * own_consts[n] for n in range(len(prog.nodes)))
    overall = 1.0
    for pr in probs.values():
        overall *= pr
    return CostReport(float(p0), coins, consts, overall, attempts, probs,
                      static_counts(prog))


# -- Monte Carlo execution -------------------------------------------------

@dataclass(frozen=True)
class RunResult:
    """Seeded Monte Carlo outcome; integer fields are bit-identical across
    repeated runs and across worker counts."""
    p0: float
    trials: int
    successes: int
    empirical_p0_prob: float
    expected_coins_analytic: float
    expected_coins_empirical: float
    seed: int
    aborted: int
    completed: int
    coins_total: int
    consts_total: int
    max_retries: int
    workers: int

    def to_json(self) -> dict:
        return {
            "p0": self.p0,
            "trials": self.trials,
            "successes": self.successes,
            "empirical_p0_prob": self.empirical_p0_prob,
            "expected_coins_analytic": self.expected_coins_analytic,
            "expected_coins_empirical": self.expected_coins_empirical,
            "seed": self.seed,
            "aborted": self.aborted,
            "completed": self.completed,
            "coins_total": self.coins_total,
            "consts_total": self.consts_total,
            "max_retries": self.max_retries,
            "workers": self.workers,
        }


class _Abort(Exception):
    pass


class _NGroup:
    __slots__ = ("regs", "amps")

    def __init__(self, regs, amps):
        self.regs = regs
        self.amps = amps


def _compile_steps(prog: CircuitProgram):
    """Flatten instructions into dispatch tuples for the trial loop."""
    steps = []
    for idx, ins in enumerate(prog.instructions):
        if isinstance(ins, AllocCoin):
            steps.append(("coin", ins.reg))
        elif isinstance(ins, AllocConst):
            steps.append(("const", ins.reg, complex(ins.value.to_complex())))
        elif isinstance(ins, Gate):
            mat = tuple(tuple(complex(c.to_complex()) for c in row)
                        for row in _GATES[ins.name])
            steps.append(("gate", ins.regs, mat))
        else:
            steps.append(("measure", ins.reg, ins.keep, idx))
    return steps


def _one_trial(steps, node_items, root, output, amp0, amp1, rng, max_retries):
    """Returns (outcome_bit_is_zero, coins, consts) or raises _Abort."""
    group_of: dict[int, _NGroup] = {}
    retries: dict[int, int] = {}
    coins = 0
    consts = 0

    def apply_gate(regs, mat):
        if len(regs) == 2:
            g1, g2 = group_of[regs[0]], group_of[regs[1]]
            if g1 is not g2:
                grp = _NGroup(g1.regs + g2.regs,
                              [a * b for a in g1.amps for b in g2.amps])
                for r in grp.regs:
                    group_of[r] = grp
            else:
                grp = g1
        else:
            grp = group_of[regs[0]]
        n = len(grp.regs)
        amps = grp.amps
        if len(regs) == 1:
            s = 1 << (n - 1 - grp.regs.index(regs[0]))
            for base in range(1 << n):
                if base & s:
                    continue
                a0, a1 = amps[base], amps[base | s]
                amps[base] = mat[0][0] * a0 + mat[0][1] * a1
                amps[base | s] = mat[1][0] * a0 + mat[1][1] * a1
        else:
            s1 = 1 << (n - 1 - grp.regs.index(regs[0]))
            s2 = 1 << (n - 1 - grp.regs.index(regs[1]))
            for base in range(1 << n):
                if base & s1 or base & s2:
                    continue
                idx = (base, base | s2, base | s1, base | s1 | s2)
                old = [amps[i] for i in idx]
                for k in range(4):
                    amps[idx[k]] = (mat[k][0] * old[0] + mat[k][1] * old[1]
                                    + mat[k][2] * old[2] + mat[k][3] * old[3])

    def run_node(nid):
        nonlocal coins, consts
        while True:
            ok = True
            for tag, ref in node_items[nid]:
                if tag == "child":
                    run_node(ref)
                    continue
                step = steps[ref]
                op = step[0]
                if op == "coin":
                    group_of[step[1]] = _NGroup((step[1],), [amp0, amp1])
                    coins += 1
                elif op == "const":
                    a = step[2]
                    norm = math.sqrt(abs(a) ** 2 + 1.0)
                    group_of[step[1]] = _NGroup((step[1],),
                                                [a / norm, 1.0 / norm])
                    consts += 1
                elif op == "gate":
                    apply_gate(step[1], step[2])
                else:
                    reg, keep, midx = step[1], step[2], step[3]
                    grp = group_of[reg]
                    n = len(grp.regs)
                    s = 1 << (n - 1 - grp.regs.index(reg))
                    total = 0.0
                    kept_mass = 0.0
                    for i in range(1 << n):
                        m = abs(grp.amps[i]) ** 2
                        total += m
                        if ((i & s) != 0) == (keep == 1):
                            kept_mass += m
                    if rng.random() < kept_mass / total:
                        norm = math.sqrt(kept_mass)
                        amps = [grp.amps[i] / norm for i in range(1 << n)
                                if ((i & s) != 0) == (keep == 1)]
                        del group_of[reg]
                        regs = tuple(r for r in grp.regs if r != reg)
                        if regs:
                            grp.regs = regs
                            grp.amps = amps
                    else:
                        c = retries.get(midx, 0) + 1
                        if c > max_retries:
                            raise _Abort()
                        retries[midx] = c
                        ok = False
                        break
            if ok:
                return

    run_node(root)
    grp = group_of[output]
    m0 = abs(grp.amps[0]) ** 2
    m1 = abs(grp.amps[1]) ** 2
    return rng.random() < m0 / (m0 + m1), coins, consts


def _run_chunk(steps, node_items, root, output, amp0, amp1, seed,
               trial_indices, max_retries):
    successes = coins_total = consts_total = aborted = 0
    for trial in trial_indices:
        rng = np.random.default_rng(np.random.SeedSequence(seed,
                                                           spawn_key=(trial,)))
        try:
            hit, coins, consts = _one_trial(steps, node_items, root, output,
                                            amp0, amp1, rng, max_retries)
        except _Abort:
            aborted += 1
            continue
        successes += int(hit)
        coins_total += coins
        consts_total += consts
    return successes, coins_total, consts_total, aborted


def run_numeric(prog: CircuitProgram, p0: float, trials: int, seed: int = 0,
                max_retries: int = 1000, workers: int = 1) -> RunResult:
    """Monte Carlo runs of a program at coin bias p0. Each trial draws from
    its own generator spawned off (seed, trial), so integer outcomes do not
    depend on the worker count or on scheduling."""
    if not 0.0 < float(p0) < 1.0:
        raise ValueError("p0 must lie strictly between 0 and 1")
    if trials <= 0:
        raise ValueError("trials must be positive")
    validate_program(prog)
    analytic = expected_cost(prog, Fraction(p0).limit_denominator(10 ** 12))
    steps = _compile_steps(prog)
    node_items = [node.items for node in prog.nodes]
    amp0 = complex(math.sqrt(float(p0)))
    amp1 = complex(math.sqrt(1.0 - float(p0)))

    if workers <= 1:
        parts = [_run_chunk(steps, node_items, prog.root, prog.output,
                            amp0, amp1, seed, range(trials), max_retries)]
    else:
        chunks = [range(w, trials, workers) for w in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_run_chunk, steps, node_items, prog.root,
                                prog.output, amp0, amp1, seed, chunk,
                                max_retries)
                    for chunk in chunks]
            parts = [f.result() for f in futs]

    successes = sum(p[0] for p in parts)
    coins_total = sum(p[1] for p in parts)
    consts_total = sum(p[2] for p in parts)
    aborted = sum(p[3] for p in parts)
    completed = trials - aborted
    return RunResult(
        p0=float(p0),
        trials=trials,
        successes=successes,
        empirical_p0_prob=successes / completed if completed else math.nan,
        expected_coins_analytic=analytic.expected_coins,
        expected_coins_empirical=coins_total / completed if completed else math.nan,
        seed=seed,
        aborted=aborted,
        completed=completed,
        coins_total=coins_total,
        consts_total=consts_total,
        max_retries=max_retries,
        workers=workers,
    )
