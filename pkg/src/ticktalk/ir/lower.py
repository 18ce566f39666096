"""Lowering from a validated AST to the dataflow graph.

Rules:

* every effectful call becomes one node; plain identifier assignments
  alias, integer/duration literals become node params, not nodes;
* data dependencies follow def-use of assigned names; a use of a name
  assigned later in the same loop body becomes a loopback edge from the
  end-of-body producer, with the pre-loop binding (if any) serving the
  first iteration;
* a withSynchronization block attaches a Synchronize constraint (and a
  sync token requirement) to every enclosed node;
* simultaneously(S.m()) becomes a set-expanding node fanned over S's
  members at placement time; each call gets its own simultaneity group;
* every/within/at blocks attach Frequency/Latency/AtTime constraints;
* ``loop { body; break; }`` with an unconditional break is lowered as
  straight-line code (it runs exactly once).

v1 structural limits (rejected here, not silently misexecuted): nested
loops, every/at blocks inside a loop, every/at bodies consuming values
defined outside the block, and loop-defined values used after the loop.
Conditionals gate only loop exit; other statements in branches lower as
unconditional opaque work.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dsl.ast import (
    Assign,
    AtBlock,
    Break,
    Call,
    ClockRef,
    Duration,
    DurationLiteral,
    EveryBlock,
    ExprStmt,
    Ident,
    If,
    IntLiteral,
    Loop,
    SimultaneousCall,
    SyncBlock,
    ValidatedAst,
    WithinBlock,
)
from ..errors import LoweringError
from .model import (
    AtTime,
    CodeBlock,
    DataEdge,
    DataflowGraph,
    DurationParam,
    FiringRule,
    Frequency,
    GraphNode,
    IntParam,
    Latency,
    Simultaneous,
    SyncDep,
    SyncRequirement,
    Synchronize,
)


@dataclass(frozen=True)
class _NodeOut:
    node: str


@dataclass(frozen=True)
class _Const:
    value: object  # int or Duration


@dataclass(frozen=True)
class _LoopCarried:
    name: str
    init: object  # _NodeOut | _Const | None


@dataclass
class _SyncCtx:
    precision: Duration
    clock: ClockRef
    set_source: str | None


@dataclass
class _LoopCtx:
    loop_id: str
    assigned: set
    assigned_so_far: set = field(default_factory=set)
    pending: list = field(default_factory=list)  # (consumer id, port, name)
    break_source: str | None = None
    break_negate: bool = False
    broke_unconditionally: bool = False


def _collect_assigned(stmts) -> set:
    names = set()
    for s in stmts:
        if isinstance(s, Assign):
            names.add(s.target)
        elif isinstance(s, Loop):
            names |= _collect_assigned(s.body)
        elif isinstance(s, If):
            names |= _collect_assigned(s.then)
            if s.orelse is not None:
                names |= _collect_assigned(s.orelse)
        elif isinstance(s, (SyncBlock, EveryBlock, WithinBlock, AtBlock)):
            names |= _collect_assigned(s.body)
    return names


def _uses_names(stmts) -> set:
    """Names read anywhere under stmts (shallow def-use, for scope checks)."""

    used = set()

    def expr(e):
        if isinstance(e, Ident):
            used.add(e.name)
        elif isinstance(e, Call):
            for a in e.args:
                expr(a)
        elif isinstance(e, SimultaneousCall):
            used.add(e.set_name)

    def stmt(s):
        if isinstance(s, Assign):
            expr(s.value)
        elif isinstance(s, ExprStmt):
            expr(s.expr)
        elif isinstance(s, If):
            expr(s.cond)
            walk(s.then)
            if s.orelse is not None:
                walk(s.orelse)
        elif isinstance(s, SyncBlock):
            expr(s.sensor_set)
            walk(s.body)
        elif isinstance(s, (Loop, EveryBlock, WithinBlock, AtBlock)):
            walk(s.body)

    def walk(ss):
        for s in ss:
            stmt(s)

    walk(stmts)
    return used


class _Lowerer:
    def __init__(self):
        self.nodes: list[GraphNode] = []
        self.edges: list[DataEdge] = []
        self.sync_deps: list[SyncDep] = []
        self.groups: dict[str, set] = {}
        self.params: dict[str, list] = {}  # node id -> [(port, value)]
        self.id_to_node: dict[str, GraphNode] = {}
        self.env: dict[str, object] = {}
        self.counters = {"node": 0, "group": 0, "loop": 0, "within": 0}
        self.constraints: list = []
        self.loop: _LoopCtx | None = None
        self.sync: _SyncCtx | None = None
        self.cond_source: object | None = None
        self.loop_defined: set = set()  # names whose final value is loop-produced

    # -- id factories

    def _node_id(self, op: str) -> str:
        nid = f"n{self.counters['node']:03d}_{op}"
        self.counters["node"] += 1
        return nid

    def _fresh(self, kind: str) -> str:
        n = self.counters[kind]
        self.counters[kind] += 1
        return f"{kind}{n}"

    # -- statements

    def block(self, stmts):
        for s in stmts:
            self.statement(s)

    def statement(self, s):
        if isinstance(s, Assign):
            src = self.expression(s.value, binding=s.target)
            if isinstance(src, _LoopCarried):
                raise LoweringError(
                    f"cannot alias {s.target!r} to a value not yet produced this iteration"
                )
            self.env[s.target] = src
            if self.loop is not None:
                self.loop.assigned_so_far.add(s.target)
        elif isinstance(s, ExprStmt):
            self.expression(s.expr)
        elif isinstance(s, Break):
            self._lower_break(s)
        elif isinstance(s, Loop):
            self._lower_loop(s)
        elif isinstance(s, If):
            prev = self.cond_source
            self.cond_source = self.expression(s.cond)
            self.block(s.then)
            if s.orelse is not None:
                # a break in the else arm triggers on a falsy condition
                self.cond_source = _Negated(self.cond_source)
                self.block(s.orelse)
            self.cond_source = prev
        elif isinstance(s, SyncBlock):
            self._lower_sync(s)
        elif isinstance(s, EveryBlock):
            if self.loop is not None:
                raise LoweringError("every(...) inside a loop is not supported")
            self._check_self_contained(s.body, "every")
            self.constraints.append(Frequency(s.period.ns))
            self.block(s.body)
            self.constraints.pop()
        elif isinstance(s, WithinBlock):
            self.constraints.append(Latency(s.bound.ns, scope=self._fresh("within")))
            self.block(s.body)
            self.constraints.pop()
        elif isinstance(s, AtBlock):
            if self.loop is not None:
                raise LoweringError("at(...) inside a loop is not supported")
            self._check_self_contained(s.body, "at")
            self.constraints.append(AtTime(s.instant.ns, s.clock))
            self.block(s.body)
            self.constraints.pop()
        else:
            raise LoweringError(f"cannot lower statement {s!r}")

    def _check_self_contained(self, body, kind: str):
        outside = _uses_names(body) - _collect_assigned(body)
        computed = sorted(n for n in outside if not isinstance(self.env.get(n), _Const))
        if computed:
            raise LoweringError(
                f"{kind}(...) body reads computed values {computed} defined outside the block"
            )

    def _lower_break(self, s):
        loop = self.loop
        if loop is None:
            raise LoweringError("break outside a loop")
        src = self.cond_source
        if src is None:
            loop.broke_unconditionally = True
            return
        negate = False
        if isinstance(src, _Negated):
            negate = True
            src = src.inner
        if isinstance(src, _Const):
            # constant condition: treat truthy as an unconditional break
            truthy = bool(src.value if isinstance(src.value, int) else src.value.ns)
            if truthy != negate:
                loop.broke_unconditionally = True
            return
        if not isinstance(src, _NodeOut):
            raise LoweringError("break condition must come from a computed value")
        loop.break_source = src.node
        loop.break_negate = negate

    def _lower_loop(self, s: Loop):
        if self.loop is not None:
            raise LoweringError("nested loops are not supported")
        # a body that unconditionally breaks runs exactly once: straight-line
        if any(isinstance(st, Break) for st in s.body):
            idx = next(i for i, st in enumerate(s.body) if isinstance(st, Break))
            self.block(s.body[:idx])
            return

        loop = _LoopCtx(self._fresh("loop"), _collect_assigned(s.body))
        outer_env = dict(self.env)
        self.loop = loop
        self.block(s.body)
        self.loop = None

        # patch loop-carried uses now that end-of-body bindings are known
        for consumer, port, name in loop.pending:
            final = self.env.get(name)
            if isinstance(final, _Const):
                self.params[consumer].append((port, self._param_value(final.value)))
                continue
            if not isinstance(final, _NodeOut):
                raise LoweringError(
                    f"{name!r} is consumed before it is produced within an iteration"
                )
            init = outer_env.get(name)
            producer = self.id_to_node[final.node]
            self.edges.append(
                DataEdge(final.node, consumer, port, loopback=True, expands=producer.set_expand)
            )
            if isinstance(init, _NodeOut):
                init_node = self.id_to_node[init.node]
                self.edges.append(
                    DataEdge(init.node, consumer, port, expands=init_node.set_expand)
                )
            elif isinstance(init, _Const):
                self.params[consumer].append((port, self._param_value(init.value)))

        if loop.break_source is not None:
            node = self.id_to_node[loop.break_source]
            node.break_for = loop.loop_id
            node.break_negate = loop.break_negate

        # names whose final binding points at loop nodes must not leak out
        for name in loop.assigned:
            src = self.env.get(name)
            if isinstance(src, _NodeOut) and self.id_to_node[src.node].loop_id == loop.loop_id:
                self.loop_defined.add(name)

    def _lower_sync(self, s: SyncBlock):
        set_src = self.expression(s.sensor_set)
        if isinstance(set_src, _LoopCarried):
            raise LoweringError("synchronization set must be produced before the block")
        set_source = set_src.node if isinstance(set_src, _NodeOut) else None
        prev = self.sync
        self.sync = _SyncCtx(s.precision, s.clock, set_source)
        self.constraints.append(Synchronize(s.precision.ns, s.clock, set_source))
        self.block(s.body)
        self.constraints.pop()
        self.sync = prev

    # -- expressions

    def expression(self, e, binding: str | None = None):
        if isinstance(e, Ident):
            return self._resolve(e.name)
        if isinstance(e, IntLiteral):
            return _Const(e.value)
        if isinstance(e, DurationLiteral):
            return _Const(e.value)
        if isinstance(e, Call):
            return self._lower_call(e, binding)
        if isinstance(e, SimultaneousCall):
            return self._lower_simultaneous(e, binding)
        raise LoweringError(f"cannot lower expression {e!r}")

    def _resolve(self, name: str):
        if name in self.loop_defined and (self.loop is None):
            raise LoweringError(f"{name!r} is loop-defined and cannot be used after the loop")
        if (
            self.loop is not None
            and name in self.loop.assigned
            and name not in self.loop.assigned_so_far
        ):
            return _LoopCarried(name, self.env.get(name))
        if name not in self.env:
            raise LoweringError(f"{name!r} is consumed before it is produced within an iteration")
        return self.env[name]

    def _new_node(self, op: str, binding: str | None, set_expand=False, set_source=None):
        nid = self._node_id(op)
        constraints = list(self.constraints)
        clock = self.sync.clock if self.sync is not None else ClockRef()
        block = CodeBlock(id=nid, op=op, params=[], constraints=constraints, clock_binding=clock)
        node = GraphNode(
            id=nid,
            code_block=block,
            set_expand=set_expand,
            set_source=set_source,
            loop_id=self.loop.loop_id if self.loop is not None else None,
            out_binding=binding,
        )
        self.nodes.append(node)
        self.params[nid] = block.params
        self.id_to_node[nid] = node
        for c in constraints:
            if isinstance(c, Synchronize):
                self.sync_deps.append(SyncDep(nid, str(c.clock), c.precision_ns))
        return node

    def _param_value(self, value):
        if isinstance(value, Duration):
            return DurationParam(value.ns)
        return IntParam(value)

    def _attach_arg(self, node: GraphNode, port: str, src):
        if isinstance(src, _Const):
            self.params[node.id].append((port, self._param_value(src.value)))
        elif isinstance(src, _NodeOut):
            producer = self.id_to_node[src.node]
            if node.loop_id is not None and producer.loop_id != node.loop_id:
                raise LoweringError(
                    f"{node.id} inside the loop consumes {producer.id} from outside; "
                    f"route the value through a loop assignment instead"
                )
            self.edges.append(DataEdge(src.node, node.id, port, expands=producer.set_expand))
        elif isinstance(src, _LoopCarried):
            self.loop.pending.append((node.id, port, src.name))
        else:
            raise LoweringError(f"bad argument source {src!r}")

    def _lower_call(self, e: Call, binding: str | None):
        srcs = [self.expression(a) for a in e.args]
        node = self._new_node(e.name, binding)
        for i, src in enumerate(srcs):
            self._attach_arg(node, f"in{i}", src)
        return _NodeOut(node.id)

    def _lower_simultaneous(self, e: SimultaneousCall, binding: str | None):
        if self.sync is None:
            raise LoweringError("simultaneously(...) outside withSynchronization")
        set_src = self._resolve(e.set_name)
        if not isinstance(set_src, _NodeOut):
            raise LoweringError("simultaneously(...) needs a computed ensemble set")
        gid = self._fresh("group")
        node = self._new_node(e.method, binding, set_expand=True, set_source=set_src.node)
        node.code_block.constraints.append(Simultaneous(gid))
        self.groups[gid] = {node.id}
        self._attach_arg(node, "set", set_src)
        return _NodeOut(node.id)

    # -- finalize

    def build(self) -> DataflowGraph:
        inbound: dict[str, set] = {n.id: set() for n in self.nodes}
        for e in self.edges:
            inbound[e.consumer].add(e.port)
        for n in self.nodes:
            reqs = tuple(
                SyncRequirement(c.clock, c.precision_ns)
                for c in n.code_block.constraints
                if isinstance(c, Synchronize)
            )
            n.firing_rule = FiringRule(tuple(sorted(inbound[n.id])), reqs)
        return DataflowGraph(self.nodes, self.edges, self.sync_deps, self.groups)


@dataclass(frozen=True)
class _Negated:
    inner: object


def lower(validated: ValidatedAst) -> DataflowGraph:
    """Lower a validated program into its dataflow graph."""
    lw = _Lowerer()
    lw.block(validated.program.statements)
    return lw.build()
