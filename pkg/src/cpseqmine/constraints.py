"""Propagators for the sequential pattern model.

Regular is filtered on the layered graph of an automaton unrolled over the
pattern variables. The graph is kept implicitly as two arrays of state sets:
``F[i]`` holds the states reachable from the initial state reading layers
``0..i-1`` and ``B[i]`` the states from which an accepting state is reachable
reading layers ``i..n-1``. A value ``v`` of layer ``i`` lies on an s-t path
iff some state of ``F[i]`` moves on ``v`` into ``B[i+1]``. Both arrays are
maintained lazily: a change at layer ``i`` only invalidates ``F[i+1:]`` and
``B[:i+1]``, so extending a pattern prefix by one item costs one step.
"""

from __future__ import annotations

from typing import Iterable, Sequence as Seq

from .automata import EOS, Automaton
from .solver import Model, Propagator, StatefulPropagator, bits, mask_of

TRUE = 0b10
FALSE = 0b01


class Regular(StatefulPropagator):
    """``Regular(vars, a)``, optionally reified as ``reif = 1 <-> Regular``.

    With ``reif`` fixed to 1 (or absent) the layered graph filters ``vars``.
    Otherwise the propagator only detects dis-entailment (no s-t path, so
    ``reif := 0``) and entailment on a full assignment (``reif := 1``).
    """

    def __init__(self, model: Model, vars: Seq[int], automaton: Automaton, reif: int | None = None):
        if model.eos is None:
            raise ValueError("model has no EOS value")
        self.vars = list(vars)
        self.layer = {v: i for i, v in enumerate(self.vars)}
        if len(self.layer) != len(self.vars):
            raise ValueError("Regular over repeated variables")
        self.reif = reif
        self.automaton = automaton
        eos = model.eos
        succ: list[dict[int, int]] = [{} for _ in range(automaton.state_count)]
        for src, label, dst in automaton.transitions:
            value = eos if label == EOS else label
            if not 0 <= value <= eos or (label != EOS and value == eos):
                continue  # cannot occur in any pattern variable domain
            vb = 1 << value
            succ[src][vb] = succ[src].get(vb, 0) | (1 << dst)
        self.succ = [tuple(d.items()) for d in succ]
        n = len(self.vars)
        self.F = [0] * (n + 1)
        self.B = [0] * (n + 1)
        self.F[0] = 1 << automaton.initial
        self.B[n] = mask_of(automaton.accepting)
        self.f_valid = 0
        self.b_valid = n
        self._fwd: dict[tuple[int, int], int] = {}
        self._bwd: dict[tuple[int, int], int] = {}
        self._sup: dict[tuple[int, int], int] = {}

    def watched(self):
        return self.vars + ([self.reif] if self.reif is not None else [])

    def snapshot(self):
        return self.F[:], self.B[:], self.f_valid, self.b_valid, self.dead

    def restore(self, state) -> None:
        self.F, self.B, self.f_valid, self.b_valid, self.dead = state

    def notify(self, model: Model, var: int) -> None:
        i = self.layer.get(var)
        if i is None:
            return
        if self.f_valid > i or self.b_valid <= i:
            self.save(model)
            self._invalidate(i)

    def _invalidate(self, i: int) -> None:
        if self.f_valid > i:
            self.f_valid = i
        if self.b_valid <= i:
            self.b_valid = i + 1

    # cached automaton steps

    def _forward(self, states: int, dom: int) -> int:
        key = (states, dom)
        out = self._fwd.get(key)
        if out is None:
            out = 0
            succ = self.succ
            for q in bits(states):
                for vb, targets in succ[q]:
                    if vb & dom:
                        out |= targets
            self._fwd[key] = out
        return out

    def _backward(self, states: int, dom: int) -> int:
        key = (states, dom)
        out = self._bwd.get(key)
        if out is None:
            out = 0
            for q, moves in enumerate(self.succ):
                for vb, targets in moves:
                    if vb & dom and targets & states:
                        out |= 1 << q
                        break
            self._bwd[key] = out
        return out

    def _supported(self, states: int, after: int) -> int:
        key = (states, after)
        out = self._sup.get(key)
        if out is None:
            out = 0
            succ = self.succ
            for q in bits(states):
                for vb, targets in succ[q]:
                    if targets & after:
                        out |= vb
            self._sup[key] = out
        return out

    # propagation

    def _path_exists(self, model: Model) -> bool:
        doms = model.domains
        if self.f_valid < self.b_valid:
            self.save(model)
            F = self.F
            vars_ = self.vars
            i = self.f_valid
            target = self.b_valid
            while i < target:
                F[i + 1] = self._forward(F[i], doms[vars_[i]])
                i += 1
                if not F[i]:
                    self.f_valid = i
                    return False
            self.f_valid = i
        k = self.b_valid
        return bool(self.F[k] & self.B[k])

    def _complete(self, model: Model) -> None:
        self.save(model)
        doms = model.domains
        vars_ = self.vars
        n = len(vars_)
        F, B = self.F, self.B
        for i in range(self.f_valid, n):
            F[i + 1] = self._forward(F[i], doms[vars_[i]])
        for i in range(self.b_valid - 1, -1, -1):
            B[i] = self._backward(B[i + 1], doms[vars_[i]])
        self.f_valid = n
        self.b_valid = 0

    def _all_fixed(self, model: Model) -> bool:
        doms = model.domains
        for v in reversed(self.vars):
            d = doms[v]
            if d & (d - 1):
                return False
        return True

    def propagate(self, model: Model) -> bool:
        if self.reif is None:
            state = TRUE
        else:
            state = model.domains[self.reif]
        if not self._path_exists(model):
            if state == TRUE:
                return False
            if state != FALSE and not model.restrict(self.reif, FALSE, self):
                return False
            self.kill(model)
            return True
        if state != TRUE:
            if self._all_fixed(model):
                if state == FALSE:
                    return False
                if not model.restrict(self.reif, TRUE, self):
                    return False
                self.kill(model)
            return True
        return self._filter(model)

    def _filter(self, model: Model) -> bool:
        self._complete(model)
        doms = model.domains
        F, B = self.F, self.B
        changed = []
        for i, var in enumerate(self.vars):
            d = doms[var]
            keep = self._supported(F[i], B[i + 1]) & d
            if keep != d:
                if not model.restrict(var, keep, self):
                    return False
                changed.append(i)
        for i in changed:
            self._invalidate(i)
        if self._all_fixed(model):
            self.kill(model)
        return True


class AtLeast(Propagator):
    """At least ``k`` of the boolean ``vars`` are 1."""

    def __init__(self, vars: Seq[int], k: int):
        self.vars = list(vars)
        self.k = k

    def watched(self):
        return self.vars

    def propagate(self, model: Model) -> bool:
        doms = model.domains
        possible = [v for v in self.vars if doms[v] & TRUE]
        if len(possible) < self.k:
            return False
        if len(possible) == self.k:
            for v in possible:
                if not model.restrict(v, TRUE, self):
                    return False
        return True


class BoolSumBetween(Propagator):
    """``low <= sum(vars) <= high`` over booleans."""

    def __init__(self, vars: Seq[int], low: int, high: int):
        self.vars = list(vars)
        self.low = low
        self.high = high

    def watched(self):
        return self.vars

    def propagate(self, model: Model) -> bool:
        doms = model.domains
        ones = sum(1 for v in self.vars if doms[v] == TRUE)
        possible = sum(1 for v in self.vars if doms[v] & TRUE)
        if ones > self.high or possible < self.low:
            return False
        if ones == self.high:
            fill = FALSE
        elif possible == self.low:
            fill = TRUE
        else:
            return True
        for v in self.vars:
            if doms[v] == 0b11 and not model.restrict(v, fill, self):
                return False
        return True


class Channel(Propagator):
    """``b = 1 <-> x in values``."""

    def __init__(self, x: int, b: int, values_mask: int):
        self.x = x
        self.b = b
        self.inside = values_mask

    def watched(self):
        return (self.x, self.b)

    def propagate(self, model: Model) -> bool:
        doms = model.domains
        dx = doms[self.x]
        if doms[self.b] == 0b11:
            if not dx & self.inside:
                return model.restrict(self.b, FALSE, self)
            if not dx & ~self.inside:
                return model.restrict(self.b, TRUE, self)
            return True
        if doms[self.b] == TRUE:
            return model.restrict(self.x, self.inside, self)
        return model.restrict(self.x, ~self.inside, self)


class EosSuffix(Propagator):
    """``P_i = EOS -> P_{i+1} = EOS`` along ``vars``, with the contrapositive."""

    def __init__(self, vars: Seq[int], eos: int):
        self.vars = list(vars)
        self.eos_bit = 1 << eos

    def watched(self):
        return self.vars

    def propagate(self, model: Model) -> bool:
        doms = model.domains
        eos = self.eos_bit
        vars_ = self.vars
        for i, v in enumerate(vars_):
            if doms[v] == eos:
                for w in vars_[i + 1 :]:
                    if not model.restrict(w, eos, self):
                        return False
                break
        for i in range(len(vars_) - 1, -1, -1):
            if not doms[vars_[i]] & eos:
                for w in vars_[:i]:
                    if not model.restrict(w, ~eos, self):
                        return False
                break
        return True


class Forbid(StatefulPropagator):
    """Exclude exactly one full assignment of ``vars``."""

    def __init__(self, vars: Seq[int], values: Seq[int]):
        self.vars = list(vars)
        self.targets = [1 << v for v in values]

    def watched(self):
        return self.vars

    def snapshot(self):
        return self.dead

    def restore(self, state) -> None:
        self.dead = state

    def propagate(self, model: Model) -> bool:
        doms = model.domains
        open_var = None
        open_count = 0
        for v, t in zip(self.vars, self.targets):
            d = doms[v]
            if not d & t:
                self.kill(model)
                return True
            if d != t:
                open_count += 1
                if open_count > 1:
                    return True
                open_var = (v, t)
        if open_count == 0:
            return False
        v, t = open_var
        self.kill(model)
        return model.restrict(v, ~t, self)


# posting helpers


def post_reified_regular(model: Model, b: int, vars: Seq[int], a: Automaton) -> Regular:
    return model.post(Regular(model, vars, a, reif=b))


def post_regular(model: Model, vars: Seq[int], a: Automaton) -> Regular:
    return model.post(Regular(model, vars, a))


def post_frequency(model: Model, s_vars: Seq[int], minsup: int) -> AtLeast:
    return model.post(AtLeast(s_vars, minsup))


def post_among(model: Model, vars: Seq[int], v_set: Iterable[int], low: int, high: int) -> list[int]:
    """Among via 0/1 channeling; returns the channeling booleans."""
    values = set(v_set)
    if model.eos in values:
        raise ValueError("EOS cannot be counted by an item constraint")
    inside = mask_of(values)
    flags = []
    for i, var in enumerate(vars):
        b = model.new_bool(f"B{i + 1}")
        model.post(Channel(var, b, inside))
        flags.append(b)
    model.post(BoolSumBetween(flags, low, high))
    return flags


def post_size(model: Model, vars: Seq[int], kind: str, k: int) -> None:
    """Unary size constraints, applied to the domains directly.

    ``exact``: first k items, rest EOS; ``min``: first k items; ``max``: all
    variables after the k-th are EOS.
    """
    if kind not in ("exact", "min", "max"):
        raise ValueError(f"unknown size constraint {kind!r}")
    if k < 0:
        raise ValueError("size bound must be >= 0")
    eos = 1 << model.eos
    if kind in ("exact", "min") and k > len(vars):
        model.failed = True
        return
    if kind in ("exact", "min"):
        for v in vars[:k]:
            if not model.restrict(v, ~eos):
                model.failed = True
    if kind in ("exact", "max"):
        for v in vars[k:]:
            if not model.restrict(v, eos):
                model.failed = True


def post_eos_suffix(model: Model, vars: Seq[int]) -> EosSuffix:
    model.eos_suffix = True
    return model.post(EosSuffix(vars, model.eos))


def post_forbid(model: Model, vars: Seq[int], pattern: Seq[int]) -> Forbid:
    """Block the EOS-padded ``pattern``."""
    if len(pattern) > len(vars):
        raise ValueError("pattern longer than the variable list")
    values = list(pattern) + [model.eos] * (len(vars) - len(pattern))
    return model.post(Forbid(vars, values))
