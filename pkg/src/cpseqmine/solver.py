"""A small finite-domain CSP core.

Domains are ``int`` bitmasks (bit v set iff value v is allowed). Pattern
variables take ItemIds plus one reserved value ``model.eos`` which is the
highest bit, so ascending value order tries EOS last. Changes are recorded on
a trail of ``(var, old_mask)`` entries; stateful propagators push
``(propagator, snapshot)`` entries at most once per search level (timestamped
trailing).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable


class SolverError(RuntimeError):
    """Internal inconsistency of the search (a bug, not an unsatisfiable model)."""


def bits(mask: int):
    """Set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(values: Iterable[int]) -> int:
    out = 0
    for v in values:
        out |= 1 << v
    return out


class Propagator:
    """Base class. Subclasses override ``watched`` and ``propagate``.

    ``propagate`` returns False on failure. ``notify`` is called whenever a
    watched variable changes, before the propagator is queued. A propagator
    is never re-queued by its own domain changes, so ``propagate`` must reach
    its own fixpoint.
    """

    queued = False
    dead = False

    def watched(self) -> Iterable[int]:
        return ()

    def notify(self, model: Model, var: int) -> None:
        pass

    def propagate(self, model: Model) -> bool:
        return True


class StatefulPropagator(Propagator):
    """Propagator with incremental state that must be restored on backtrack."""

    _stamp = -1

    def snapshot(self):
        raise NotImplementedError

    def restore(self, state) -> None:
        raise NotImplementedError

    def save(self, model: Model) -> None:
        if self._stamp != model.stamp:
            model.trail.append((self, (self._stamp, self.snapshot())))
            self._stamp = model.stamp

    def kill(self, model: Model) -> None:
        """Mark entailed for the rest of the current subtree."""
        self.save(model)
        self.dead = True


@dataclass
class SearchStats:
    nodes: int = 0
    fails: int = 0
    solutions: int = 0

    def __iadd__(self, other: SearchStats) -> SearchStats:
        self.nodes += other.nodes
        self.fails += other.fails
        self.solutions += other.solutions
        return self


@dataclass(frozen=True)
class Solution:
    pattern: tuple[int, ...]
    supports: int
    objective_value: int | None = None

    def support_indices(self) -> list[int]:
        return list(bits(self.supports))


class Model:
    """Variables, propagators and the trail.

    ``pattern_vars`` are branched on in order; ``support_vars`` must be fixed
    by propagation once the pattern is complete.
    """

    def __init__(self, eos: int | None = None, check_restore: bool = False):
        self.domains: list[int] = []
        self.names: list[str] = []
        self.watchers: list[list[Propagator]] = []
        self.propagators: list[Propagator] = []
        self.pattern_vars: list[int] = []
        self.support_vars: list[int] = []
        self.eos = eos
        self.eos_suffix = False
        self.objective: EosCountObjective | None = None
        self.failed = False
        self.check_restore = check_restore
        self.trail: list[tuple] = []
        self.stamp = 0
        self._stamps = 0
        self._queue: deque[Propagator] = deque()

    def __repr__(self) -> str:
        return (
            f"<Model vars={len(self.domains)} pattern={len(self.pattern_vars)} "
            f"support={len(self.support_vars)} propagators={len(self.propagators)}>"
        )

    # variables

    def new_var(self, values: Iterable[int] | int, name: str = "") -> int:
        mask = values if isinstance(values, int) else mask_of(values)
        if not mask:
            raise ValueError("empty initial domain")
        self.domains.append(mask)
        self.names.append(name or f"x{len(self.domains) - 1}")
        self.watchers.append([])
        return len(self.domains) - 1

    def new_bool(self, name: str = "") -> int:
        return self.new_var(0b11, name)

    def is_assigned(self, var: int) -> bool:
        d = self.domains[var]
        return d & (d - 1) == 0

    def value(self, var: int) -> int:
        d = self.domains[var]
        if d & (d - 1):
            raise SolverError(f"{self.names[var]} is not assigned")
        return d.bit_length() - 1

    def values(self, var: int) -> list[int]:
        return list(bits(self.domains[var]))

    # domain updates

    def restrict(self, var: int, mask: int, source: Propagator | None = None) -> bool:
        """Intersect the domain of ``var`` with ``mask``; False on wipe-out."""
        old = self.domains[var]
        new = old & mask
        if new == old:
            return True
        if not new:
            return False
        self.trail.append((var, old))
        self.domains[var] = new
        queue = self._queue
        for p in self.watchers[var]:
            if p is source or p.dead:
                continue
            p.notify(self, var)
            if not p.queued:
                p.queued = True
                queue.append(p)
        return True

    def remove(self, var: int, value: int, source: Propagator | None = None) -> bool:
        return self.restrict(var, ~(1 << value), source)

    def assign(self, var: int, value: int, source: Propagator | None = None) -> bool:
        if not self.domains[var] >> value & 1:
            return False
        return self.restrict(var, 1 << value, source)

    # propagation

    def post(self, prop: Propagator) -> Propagator:
        self.propagators.append(prop)
        for var in set(prop.watched()):
            self.watchers[var].append(prop)
        self.schedule(prop)
        return prop

    def schedule(self, prop: Propagator) -> None:
        if not prop.queued and not prop.dead:
            prop.queued = True
            self._queue.append(prop)

    def propagate(self, full: bool = False) -> bool:
        """Run queued propagators to fixpoint; False iff some domain wiped out."""
        if self.failed:
            return False
        if full:
            for p in self.propagators:
                self.schedule(p)
        queue = self._queue
        while queue:
            p = queue.popleft()
            p.queued = False
            if p.dead:
                continue
            if not p.propagate(self):
                for q in queue:
                    q.queued = False
                queue.clear()
                return False
        return True

    # trail

    def push(self) -> int:
        self._stamps += 1
        self.stamp = self._stamps
        return len(self.trail)

    def undo(self, mark: int) -> None:
        trail = self.trail
        domains = self.domains
        while len(trail) > mark:
            what, old = trail.pop()
            if type(what) is int:
                domains[what] = old
            else:
                stamp, state = old
                what.restore(state)
                what._stamp = stamp
        self._stamps += 1
        self.stamp = self._stamps

    # solutions

    def pattern(self) -> tuple[int, ...]:
        out = []
        for var in self.pattern_vars:
            v = self.value(var)
            if v == self.eos:
                break
            out.append(v)
        return tuple(out)

    def solution(self) -> Solution:
        supports = 0
        for k, var in enumerate(self.support_vars):
            if self.value(var):
                supports |= 1 << k
        objective = self.objective.value(self) if self.objective is not None else None
        return Solution(self.pattern(), supports, objective)

    def minimize_eos_count(self) -> EosCountObjective:
        """Attach the objective "number of pattern variables equal to EOS"."""
        if self.objective is None:
            self.objective = EosCountObjective(self)
            self.post(self.objective)
        return self.objective


class EosCountObjective(Propagator):
    """Objective plus its branch-and-bound cut ``#EOS <= upper``.

    ``upper`` is deliberately not trailed: it only ever tightens during one
    minimisation run. When the pattern variables are EOS-suffix closed, at
    most ``upper`` EOS values means the first ``len - upper`` variables hold
    items, which is pushed into their domains.
    """

    def __init__(self, model: Model):
        self.vars = list(model.pattern_vars)
        self.eos_bit = 1 << model.eos
        self.upper: int | None = None

    def watched(self):
        return self.vars

    def value(self, model: Model) -> int:
        return sum(1 for v in self.vars if model.domains[v] == self.eos_bit)

    lower_bound = value

    def propagate(self, model: Model) -> bool:
        ub = self.upper
        if ub is None:
            return True
        if ub < 0:
            return False
        doms = model.domains
        eos = self.eos_bit
        pinned = sum(1 for v in self.vars if doms[v] == eos)
        if pinned > ub:
            return False
        if model.eos_suffix:
            targets = self.vars[: len(self.vars) - ub]
        elif pinned == ub:
            targets = [v for v in self.vars if doms[v] != eos]
        else:
            return True
        for v in targets:
            if not model.restrict(v, ~eos, self):
                return False
        return True


def _branch_var(model: Model) -> int | None:
    doms = model.domains
    for var in model.pattern_vars:
        d = doms[var]
        if d & (d - 1):
            return var
    return None


def _check_complete(model: Model) -> None:
    for var in model.support_vars:
        if not model.is_assigned(var):
            raise SolverError(f"{model.names[var]} unfixed on a complete pattern")


def _search(
    model: Model,
    stats: SearchStats,
    on_solution: Callable[[Solution], None],
    prune: Callable[[Model], bool] | None = None,
) -> None:
    var = _branch_var(model)
    if var is None:
        _check_complete(model)
        stats.solutions += 1
        on_solution(model.solution())
        return
    dom = model.domains[var]
    before = list(model.domains) if model.check_restore else None
    while dom:
        low = dom & -dom
        dom ^= low
        mark = model.push()
        stats.nodes += 1
        if (
            model.restrict(var, low)
            and model.propagate()
            and (prune is None or not prune(model))
        ):
            _search(model, stats, on_solution, prune)
        else:
            stats.fails += 1
        model.undo(mark)
        if before is not None and model.domains != before:
            raise SolverError("domains not restored after backtracking")


def propagate(model: Model) -> bool:
    """Run every propagator to fixpoint; returns consistency."""
    return model.propagate(full=True)


def solve_all(model: Model, emit: Callable[[Solution], None]) -> SearchStats:
    """Depth-first enumeration of every solution, each emitted once."""
    if model.objective is not None:
        raise ValueError("solve_all needs a model without objective")
    stats = SearchStats()
    mark = model.push()
    if model.propagate(full=True):
        _search(model, stats, emit)
    else:
        stats.fails += 1
    model.undo(mark)
    return stats


def solve_minimize(model: Model, stats: SearchStats | None = None) -> Solution | None:
    """Branch and bound on the model objective; None if unsatisfiable."""
    objective = model.objective
    if objective is None:
        raise ValueError("solve_minimize needs an objective")
    if stats is None:
        stats = SearchStats()
    best: list[Solution] = []

    def record(sol: Solution) -> None:
        best[:] = [sol]
        objective.upper = sol.objective_value - 1

    def prune(m: Model) -> bool:
        return bool(best) and objective.lower_bound(m) >= best[0].objective_value

    objective.upper = None
    mark = model.push()
    try:
        if model.propagate(full=True):
            _search(model, stats, record, prune)
        else:
            stats.fails += 1
    finally:
        model.undo(mark)
        objective.upper = None
    return best[0] if best else None
