"""Compile simulable target ratios into postselected circuit programs.

Programs use the gate set {X, H, CNOT, B} plus coin and constant-coin
allocations and computational-basis measurements. Every instruction belongs
to a provenance node; a failed postselection rebuilds that node's whole
subtree from fresh coins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .field import INFINITY, FieldElem, Infinity
from .polys import Poly
from .scalars import SQRT2, Scalar

__all__ = [
    "AllocCoin", "AllocConst", "Gate", "Measure", "ProvNode", "CircuitProgram",
    "coin_program", "const_program", "emit_inv", "emit_mul", "emit_add",
    "construct_p", "compile", "worked_example_program",
    "validate_program", "static_counts", "program_to_json", "program_from_json",
]

GATE_ARITY = {"X": 1, "H": 1, "CNOT": 2, "B": 2}


@dataclass(frozen=True)
class AllocCoin:
    """Draw a fresh coin with the unknown bias into a new register."""
    reg: int


@dataclass(frozen=True)
class AllocConst:
    """Prepare the constant coin (a|0> + |1>)/norm in a new register."""
    value: Scalar
    reg: int


@dataclass(frozen=True)
class Gate:
    name: str
    regs: tuple[int, ...]


@dataclass(frozen=True)
class Measure:
    """Measure reg, keep the given outcome; on the other outcome rebuild the
    provenance subtree rooted at node."""
    reg: int
    keep: int
    node: int


Instr = AllocCoin | AllocConst | Gate | Measure


@dataclass(frozen=True)
class ProvNode:
    """Provenance node: a macro invocation and what it emitted, in order."""
    id: int
    kind: str
    items: tuple[tuple[str, int], ...]  # ("child", node_id) | ("instr", index)


@dataclass(frozen=True)
class CircuitProgram:
    instructions: tuple[Instr, ...]
    registers: int
    output: int
    nodes: tuple[ProvNode, ...]  # dense ids: nodes[k].id == k
    root: int

    def __str__(self) -> str:
        return json.dumps(program_to_json(self), indent=2)


# -- program construction --------------------------------------------------

def _shift_instr(ins: Instr, reg_off: int, node_off: int) -> Instr:
    if isinstance(ins, AllocCoin):
        return AllocCoin(ins.reg + reg_off)
    if isinstance(ins, AllocConst):
        return AllocConst(ins.value, ins.reg + reg_off)
    if isinstance(ins, Gate):
        return Gate(ins.name, tuple(r + reg_off for r in ins.regs))
    return Measure(ins.reg + reg_off, ins.keep, ins.node + node_off)


def _merge(kind: str, operands: list[CircuitProgram]
           ) -> tuple[list[Instr], list[ProvNode], list[tuple[str, int]], list[int], int]:
    """Concatenate operand programs; returns (instrs, nodes, root items so far,
    shifted operand outputs, next register index)."""
    instrs: list[Instr] = []
    nodes: list[ProvNode] = []
    items: list[tuple[str, int]] = []
    outs: list[int] = []
    reg_off = 0
    for prog in operands:
        instr_off = len(instrs)
        node_off = len(nodes)
        instrs.extend(_shift_instr(i, reg_off, node_off) for i in prog.instructions)
        for node in prog.nodes:
            nodes.append(ProvNode(
                node.id + node_off, node.kind,
                tuple((tag, ref + (node_off if tag == "child" else instr_off))
                      for tag, ref in node.items)))
        items.append(("child", prog.root + node_off))
        outs.append(prog.output + reg_off)
        reg_off += prog.registers
    return instrs, nodes, items, outs, reg_off


def _finish(kind: str, instrs, nodes, items, output, registers) -> CircuitProgram:
    root = len(nodes)
    nodes.append(ProvNode(root, kind, tuple(items)))
    return CircuitProgram(tuple(instrs), registers, output, tuple(nodes), root)


def coin_program() -> CircuitProgram:
    """A single fresh coin; ratio t."""
    return CircuitProgram((AllocCoin(0),), 1, 0,
                          (ProvNode(0, "coin", (("instr", 0),)),), 0)


def const_program(a: Scalar | int | Fraction) -> CircuitProgram:
    """The constant coin (a|0> + |1>)/norm; ratio a."""
    a = a if isinstance(a, Scalar) else Scalar(a)
    return CircuitProgram((AllocConst(a, 0),), 1, 0,
                          (ProvNode(0, "const", (("instr", 0),)),), 0)


def emit_inv(x: CircuitProgram) -> CircuitProgram:
    """X on the output register: ratio h -> 1/h."""
    instrs, nodes, items, (out,), regs = _merge("inv", [x])
    items.append(("instr", len(instrs)))
    instrs.append(Gate("X", (out,)))
    return _finish("inv", instrs, nodes, items, out, regs)


def emit_mul(x: CircuitProgram, y: CircuitProgram) -> CircuitProgram:
    """CNOT then postselect the second register on |0>: ratio h1*h2."""
    instrs, nodes, items, (xo, yo), regs = _merge("mul", [x, y])
    node_id = len(nodes)
    items.append(("instr", len(instrs)))
    instrs.append(Gate("CNOT", (xo, yo)))
    items.append(("instr", len(instrs)))
    instrs.append(Measure(yo, 0, node_id))
    return _finish("mul", instrs, nodes, items, xo, regs)


def emit_add(x: CircuitProgram, y: CircuitProgram) -> CircuitProgram:
    """B then postselect the first register on |0>, leaving sqrt2/(h1+h2);
    an X and a sqrt2 constant-multiplication land exactly on h1+h2."""
    aux = const_program(SQRT2)
    instrs, nodes, items, (xo, yo, co), regs = _merge("add", [x, y, aux])
    node_id = len(nodes)
    items.append(("instr", len(instrs)))
    instrs.append(Gate("B", (xo, yo)))
    items.append(("instr", len(instrs)))
    instrs.append(Measure(xo, 0, node_id))
    items.append(("instr", len(instrs)))
    instrs.append(Gate("X", (yo,)))
    items.append(("instr", len(instrs)))
    instrs.append(Gate("CNOT", (yo, co)))
    items.append(("instr", len(instrs)))
    instrs.append(Measure(co, 0, node_id))
    return _finish("add", instrs, nodes, items, yo, regs)


def construct_p() -> CircuitProgram:
    """Coin ratio t to ratio p: square the coin, add 1, invert, add -1,
    multiply by -1."""
    prog = emit_mul(coin_program(), coin_program())     # p/(1-p)
    prog = emit_add(prog, const_program(1))             # 1/(1-p)
    prog = emit_inv(prog)                               # 1-p
    prog = emit_add(prog, const_program(-1))            # -p
    prog = emit_mul(prog, const_program(-1))            # p
    return prog


def _horner(g: Poly) -> CircuitProgram:
    """Program with ratio g(p), evaluated innermost-coefficient first;
    multiplications by 1 and additions of 0 are skipped."""
    if g.is_constant():
        return const_program(g.constant_value() if g.coeffs else Scalar(0))
    coeffs = g.coeffs
    top = coeffs[-1]
    acc = None if top == Scalar(1) else const_program(top)
    for k in range(len(coeffs) - 2, -1, -1):
        pterm = construct_p()
        acc = pterm if acc is None else emit_mul(acc, pterm)
        if coeffs[k]:
            acc = emit_add(acc, const_program(coeffs[k]))
    return acc


def _ratfn_program(num: Poly, den: Poly) -> CircuitProgram:
    parts: list[CircuitProgram] = []
    if not num.is_one():
        parts.append(_horner(num))
    if not den.is_one():
        parts.append(emit_inv(_horner(den)))
    if not parts:
        return const_program(1)
    prog = parts[0]
    for extra in parts[1:]:
        prog = emit_mul(prog, extra)
    return prog


def compile(h: FieldElem | Infinity) -> CircuitProgram:
    """Compile a target ratio into a postselected circuit program whose
    symbolic execution equals h exactly."""
    if isinstance(h, Infinity):
        return emit_inv(const_program(0))
    if h.is_zero():
        return const_program(0)
    r_prog = None
    if not h.r.is_zero():
        r_prog = _ratfn_program(h.r.num, h.r.den)
    s_prog = None
    if not h.s.is_zero():
        coin = coin_program()
        if h.s.num.is_one() and h.s.den.is_one():
            s_prog = coin
        else:
            s_prog = emit_mul(_ratfn_program(h.s.num, h.s.den), coin)
    if r_prog is None:
        return s_prog
    if s_prog is None:
        return r_prog
    return emit_add(r_prog, s_prog)


def worked_example_program() -> CircuitProgram:
    """The two-coin protocol ending at ratio 2p-1: CNOT both coins,
    postselect the second on |0>, then H and X on the survivor."""
    instrs = (
        AllocCoin(0),
        AllocCoin(1),
        Gate("CNOT", (0, 1)),
        Measure(1, 0, 0),
        Gate("H", (0,)),
        Gate("X", (0,)),
    )
    node = ProvNode(0, "protocol", tuple(("instr", k) for k in range(len(instrs))))
    return CircuitProgram(instrs, 2, 0, (node,), 0)


# -- validation ------------------------------------------------------------

def validate_program(prog: CircuitProgram) -> None:
    """Structural checks: allocation and retirement discipline, gate arities,
    provenance consistency, and rebuild-subtree soundness. Raises ValueError."""

    # provenance tree must cover each instruction and node exactly once,
    # and its depth-first instruction order must equal list order
    if not (0 <= prog.root < len(prog.nodes)):
        raise ValueError("provenance root out of range")
    for k, node in enumerate(prog.nodes):
        if node.id != k:
            raise ValueError("provenance ids must be dense and ordered")
    seen_instrs: list[int] = []
    seen_nodes: set[int] = set()

    def walk(node_id: int) -> None:
        if node_id in seen_nodes:
            raise ValueError(f"node {node_id} reached twice")
        seen_nodes.add(node_id)
        for tag, ref in prog.nodes[node_id].items:
            if tag == "child":
                walk(ref)
            else:
                seen_instrs.append(ref)

    walk(prog.root)
    if seen_instrs != list(range(len(prog.instructions))):
        raise ValueError("provenance must cover instructions in list order")
    if seen_nodes != set(range(len(prog.nodes))):
        raise ValueError("provenance must cover every node exactly once")

    # which node's subtree an instruction belongs to, for rebuild soundness
    subtree_instrs: dict[int, set[int]] = {}

    def collect(node_id: int) -> set[int]:
        out: set[int] = set()
        for tag, ref in prog.nodes[node_id].items:
            if tag == "child":
                out |= collect(ref)
            else:
                out.add(ref)
        subtree_instrs[node_id] = out
        return out

    collect(prog.root)
    owner: dict[int, int] = {}
    for node in prog.nodes:
        for tag, ref in node.items:
            if tag == "instr":
                owner[ref] = node.id

    alloc_at: dict[int, int] = {}
    live: set[int] = set()
    retired: set[int] = set()
    group: dict[int, set[int]] = {}
    for idx, ins in enumerate(prog.instructions):
        if isinstance(ins, (AllocCoin, AllocConst)):
            if ins.reg in live or ins.reg in retired:
                raise ValueError(f"register {ins.reg} allocated twice")
            if not 0 <= ins.reg < prog.registers:
                raise ValueError(f"register {ins.reg} out of range")
            live.add(ins.reg)
            alloc_at[ins.reg] = idx
            group[ins.reg] = {ins.reg}
        elif isinstance(ins, Gate):
            if ins.name not in GATE_ARITY:
                raise ValueError(f"unknown gate {ins.name}")
            if len(ins.regs) != GATE_ARITY[ins.name]:
                raise ValueError(f"gate {ins.name} takes {GATE_ARITY[ins.name]} registers")
            if len(set(ins.regs)) != len(ins.regs):
                raise ValueError("gate registers must be distinct")
            for r in ins.regs:
                if r not in live:
                    raise ValueError(f"gate on dead register {r}")
            if len(ins.regs) == 2:
                merged = group[ins.regs[0]] | group[ins.regs[1]]
                for r in merged:
                    group[r] = merged
        else:
            if ins.reg not in live:
                raise ValueError(f"measurement of dead register {ins.reg}")
            if ins.keep not in (0, 1):
                raise ValueError("measurement keeps outcome 0 or 1")
            if not 0 <= ins.node < len(prog.nodes):
                raise ValueError("measurement rebuild marker out of range")
            if idx not in subtree_instrs[ins.node]:
                raise ValueError("measurement must rebuild a subtree containing itself")
            # every register the measured one may be entangled with must be
            # rebuilt too, so its allocation must sit inside the same subtree
            for r in group[ins.reg]:
                if r in live and alloc_at[r] not in subtree_instrs[ins.node]:
                    raise ValueError(
                        f"rebuild subtree of node {ins.node} misses register {r}")
            live.discard(ins.reg)
            retired.add(ins.reg)
    if live != {prog.output}:
        raise ValueError(f"program must end with exactly the output register live, got {sorted(live)}")


def static_counts(prog: CircuitProgram) -> dict:
    """Static per-attempt instruction tallies (no retry weighting)."""
    coins = sum(1 for i in prog.instructions if isinstance(i, AllocCoin))
    consts = sum(1 for i in prog.instructions if isinstance(i, AllocConst))
    gates = sum(1 for i in prog.instructions if isinstance(i, Gate))
    measures = sum(1 for i in prog.instructions if isinstance(i, Measure))
    return {"coins": coins, "consts": consts, "gates": gates,
            "measures": measures, "registers": prog.registers}


# -- serialization ---------------------------------------------------------

def program_to_json(prog: CircuitProgram) -> dict:
    instrs = []
    owner: dict[int, int] = {}
    for node in prog.nodes:
        for tag, ref in node.items:
            if tag == "instr":
                owner[ref] = node.id
    for idx, ins in enumerate(prog.instructions):
        if isinstance(ins, AllocCoin):
            rec = {"op": "coin", "reg": ins.reg}
        elif isinstance(ins, AllocConst):
            rec = {"op": "const", "value": ins.value.to_json(), "reg": ins.reg}
        elif isinstance(ins, Gate):
            rec = {"op": "gate", "name": ins.name, "regs": list(ins.regs)}
        else:
            rec = {"op": "measure", "reg": ins.reg, "keep": ins.keep,
                   "node": ins.node}
        rec["emitted_by"] = owner[idx]
        instrs.append(rec)
    return {
        "registers": prog.registers,
        "output": prog.output,
        "instructions": instrs,
        "provenance": {
            "root": prog.root,
            "nodes": [{"id": n.id, "kind": n.kind,
                       "items": [[tag, ref] for tag, ref in n.items]}
                      for n in prog.nodes],
        },
    }


def program_from_json(data: dict) -> CircuitProgram:
    try:
        instrs: list[Instr] = []
        for rec in data["instructions"]:
            op = rec["op"]
            if op == "coin":
                instrs.append(AllocCoin(rec["reg"]))
            elif op == "const":
                instrs.append(AllocConst(Scalar.from_json(rec["value"]), rec["reg"]))
            elif op == "gate":
                instrs.append(Gate(rec["name"], tuple(rec["regs"])))
            elif op == "measure":
                instrs.append(Measure(rec["reg"], rec["keep"], rec["node"]))
            else:
                raise ValueError(f"unknown instruction op {op!r}")
        nodes = tuple(ProvNode(n["id"], n["kind"],
                               tuple((tag, ref) for tag, ref in n["items"]))
                      for n in data["provenance"]["nodes"])
        prog = CircuitProgram(tuple(instrs), data["registers"], data["output"],
                              nodes, data["provenance"]["root"])
    except (KeyError, TypeError) as err:
        raise ValueError(f"malformed program record: {err}") from err
    validate_program(prog)
    return prog
