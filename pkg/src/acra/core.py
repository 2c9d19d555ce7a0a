"""Additive cost register automata: data model, semantics, and normal forms.

An ACRA is a deterministic finite automaton over a finite alphabet, extended
with integer registers.  Every transition updates each register by a test-free
assignment ``u := v + c`` and every accepting state outputs ``v + c`` for some
register ``v`` and constant ``c``.  All integers are arbitrary precision:
offsets accumulated along pumped cycles grow without bound.

All values here are immutable after construction and every operation is a pure
function, so concurrent reads are safe.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class AcraError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(AcraError):
    """A machine description violates the data-model invariants.

    Carries the full list of problems found, not just the first one.
    """

    def __init__(self, errors: Sequence[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


class EmptyDomainError(AcraError):
    """Trimming removed every accepting state: the machine defines no outputs."""


@dataclass(frozen=True)
class UpdateExpr:
    """Right-hand side of a register assignment ``target := source + offset``."""

    source: str
    offset: int


@dataclass(frozen=True)
class OutputExpr:
    """Output expression ``source + offset`` attached to an accepting state."""

    source: str
    offset: int


# A register valuation is a plain dict register -> int, total on the machine's
# register set.  A machine configuration pairs a state with a valuation.
Valuation = dict


@dataclass(frozen=True)
class Config:
    state: str
    valuation: Mapping[str, int]


# Suffix summary: None when the suffix leads to a non-accepting state,
# otherwise (register, offset) meaning "output = current value of register
# plus offset".
SuffixSummary = "tuple[str, int] | None"


@dataclass(frozen=True, eq=False)
class Acra:
    """A validated ACRA.

    ``delta`` is total on states x alphabet, ``mu`` on states x alphabet x
    registers, and ``nu`` is defined exactly on the accepting states.  The
    declaration order of ``states``/``alphabet``/``registers`` is the canonical
    order used by every deterministic tie-break in the analyses.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    registers: tuple[str, ...]
    delta: Mapping[tuple[str, str], str]
    mu: Mapping[tuple[str, str, str], UpdateExpr]
    initial: str
    accepting: frozenset[str]
    nu: Mapping[str, OutputExpr]

    def register_index(self, reg: str) -> int:
        return self.registers.index(reg)

    def replace(self, **kwargs) -> "Acra":
        fields = dict(
            states=self.states, alphabet=self.alphabet, registers=self.registers,
            delta=self.delta, mu=self.mu, initial=self.initial,
            accepting=self.accepting, nu=self.nu,
        )
        fields.update(kwargs)
        return build_acra(**fields)

    def to_description(self) -> dict:
        """Serialize back to the machine description format."""
        states = []
        for q in self.states:
            entry: dict = {"name": q, "accepting": q in self.accepting}
            if q in self.accepting:
                out = self.nu[q]
                entry["output"] = {"reg": out.source, "offset": out.offset}
            states.append(entry)
        transitions = []
        for q in self.states:
            for a in self.alphabet:
                updates = {}
                for r in self.registers:
                    upd = self.mu[(q, a, r)]
                    if upd.source != r or upd.offset != 0:
                        updates[r] = {"reg": upd.source, "offset": upd.offset}
                transitions.append(
                    {"from": q, "symbol": a, "to": self.delta[(q, a)], "updates": updates}
                )
        return {
            "type": "acra",
            "alphabet": list(self.alphabet),
            "registers": list(self.registers),
            "states": states,
            "initial": self.initial,
            "transitions": transitions,
        }


def build_acra(states, alphabet, registers, delta, mu, initial, accepting, nu) -> Acra:
    """Construct an Acra, checking every data-model invariant.

    Raises ValidationError listing all violations.  Trimming is not applied.
    """
    errors: list[str] = []
    states = tuple(states)
    alphabet = tuple(alphabet)
    registers = tuple(registers)
    for kind, names in (("state", states), ("symbol", alphabet), ("register", registers)):
        seen = set()
        for n in names:
            if n in seen:
                errors.append(f"duplicate {kind} name {n!r}")
            seen.add(n)
    state_set, reg_set = set(states), set(registers)
    if not states:
        errors.append("no states declared")
    if not registers:
        errors.append("no registers declared")
    if initial not in state_set:
        errors.append(f"undeclared initial state {initial!r}")
    accepting = frozenset(accepting)
    if not accepting:
        errors.append("empty accepting set")
    for q in accepting - state_set:
        errors.append(f"undeclared accepting state {q!r}")
    delta = dict(delta)
    mu = dict(mu)
    nu = dict(nu)
    for (q, a), q2 in delta.items():
        if q not in state_set or a not in set(alphabet):
            errors.append(f"transition from undeclared ({q!r}, {a!r})")
        elif q2 not in state_set:
            errors.append(f"undeclared target state {q2!r} on ({q!r}, {a!r})")
    for q in states:
        for a in alphabet:
            if (q, a) not in delta:
                errors.append(f"missing transition ({q!r}, {a!r})")
            for r in registers:
                upd = mu.get((q, a, r))
                if upd is None:
                    errors.append(f"missing update for register {r!r} on ({q!r}, {a!r})")
                elif upd.source not in reg_set:
                    errors.append(f"undeclared register {upd.source!r} in update on ({q!r}, {a!r})")
    for key in mu:
        q, a, r = key
        if q not in state_set or a not in set(alphabet) or r not in reg_set:
            errors.append(f"update for undeclared ({q!r}, {a!r}, {r!r})")
    for q in states:
        if q in accepting:
            out = nu.get(q)
            if out is None:
                errors.append(f"accepting state {q!r} has no output")
            elif out.source not in reg_set:
                errors.append(f"undeclared register {out.source!r} in output of {q!r}")
        elif q in nu:
            errors.append(f"output on non-accepting state {q!r}")
    if errors:
        raise ValidationError(errors)
    return Acra(states, alphabet, registers, delta, mu, initial, accepting, nu)


def validate(description: Mapping) -> Acra:
    """Parse and validate a machine description (see the file format in README).

    Missing registers in a transition's "updates" default to the identity
    ``v := v``.  An "output" entry must be present exactly on accepting states.
    Raises ValidationError with the collected problems.
    """
    errors: list[str] = []
    if description.get("type") != "acra":
        errors.append('description "type" is not "acra"')
    alphabet = tuple(description.get("alphabet", ()))
    registers = tuple(description.get("registers", ()))
    state_entries = description.get("states", [])
    states = tuple(e.get("name") for e in state_entries)
    accepting = []
    nu = {}
    reg_set = set(registers)
    for e in state_entries:
        name = e.get("name")
        if e.get("accepting"):
            accepting.append(name)
            out = e.get("output")
            if out is None:
                errors.append(f"accepting state {name!r} has no output")
            else:
                if out.get("reg") not in reg_set:
                    errors.append(f"undeclared register {out.get('reg')!r} in output of {name!r}")
                nu[name] = OutputExpr(out.get("reg"), int(out.get("offset", 0)))
        elif "output" in e:
            errors.append(f"output on non-accepting state {name!r}")
    delta = {}
    mu = {}
    for t in description.get("transitions", []):
        q, a, q2 = t.get("from"), t.get("symbol"), t.get("to")
        if (q, a) in delta:
            errors.append(f"duplicate transition ({q!r}, {a!r})")
            continue
        delta[(q, a)] = q2
        updates = t.get("updates", {}) or {}
        for r, upd in updates.items():
            if r not in reg_set:
                errors.append(f"undeclared register {r!r} updated on ({q!r}, {a!r})")
                continue
            if upd.get("reg") not in reg_set:
                errors.append(f"undeclared register {upd.get('reg')!r} in update on ({q!r}, {a!r})")
                continue
            mu[(q, a, r)] = UpdateExpr(upd.get("reg"), int(upd.get("offset", 0)))
        for r in registers:
            mu.setdefault((q, a, r), UpdateExpr(r, 0))
    if errors:
        raise ValidationError(errors)
    return build_acra(
        states, alphabet, registers, delta, mu,
        description.get("initial"), accepting, nu,
    )


def zero_valuation(acra: Acra) -> dict[str, int]:
    return {r: 0 for r in acra.registers}


def step(acra: Acra, config: Config, symbol: str) -> Config:
    """One transition step.  All updates read the pre-step valuation."""
    if symbol not in acra.alphabet:
        raise AcraError(f"symbol {symbol!r} not in alphabet")
    val = config.valuation
    new_val = {}
    for r in acra.registers:
        upd = acra.mu[(config.state, symbol, r)]
        new_val[r] = val[upd.source] + upd.offset
    return Config(acra.delta[(config.state, symbol)], new_val)


def run(acra: Acra, symbols: Iterable[str]) -> Config:
    """Run from the initial configuration (all registers zero)."""
    state = acra.initial
    val = zero_valuation(acra)
    for a in symbols:
        if a not in acra.alphabet:
            raise AcraError(f"symbol {a!r} not in alphabet")
        new_val = {}
        for r in acra.registers:
            upd = acra.mu[(state, a, r)]
            new_val[r] = val[upd.source] + upd.offset
        state = acra.delta[(state, a)]
        val = new_val
    return Config(state, val)


def evaluate(acra: Acra, symbols: Sequence[str]) -> int | None:
    """The machine's output on the input, or None when undefined."""
    cfg = run(acra, symbols)
    if cfg.state not in acra.accepting:
        return None
    out = acra.nu[cfg.state]
    return cfg.valuation[out.source] + out.offset


def reachable_states(acra: Acra) -> set[str]:
    seen = {acra.initial}
    frontier = deque([acra.initial])
    while frontier:
        q = frontier.popleft()
        for a in acra.alphabet:
            q2 = acra.delta[(q, a)]
            if q2 not in seen:
                seen.add(q2)
                frontier.append(q2)
    return seen


def trim(acra: Acra) -> Acra:
    """Restrict to the states reachable from the initial state.

    Raises EmptyDomainError when no accepting state survives; every analysis
    downstream assumes a trimmed machine with a non-empty domain.
    """
    keep = reachable_states(acra)
    if not (acra.accepting & keep):
        raise EmptyDomainError("empty domain")
    if keep == set(acra.states):
        return acra
    states = tuple(q for q in acra.states if q in keep)
    delta = {(q, a): q2 for (q, a), q2 in acra.delta.items() if q in keep}
    mu = {k: v for k, v in acra.mu.items() if k[0] in keep}
    nu = {q: v for q, v in acra.nu.items() if q in keep}
    return build_acra(
        states, acra.alphabet, acra.registers, delta, mu,
        acra.initial, acra.accepting & keep, nu,
    )


def compose_updates(acra: Acra, state: str, symbols: Sequence[str]) -> dict[str, UpdateExpr]:
    """The net effect of a string: register -> (initial source register, offset)."""
    comp = {r: UpdateExpr(r, 0) for r in acra.registers}
    q = state
    trace = []
    for a in symbols:
        trace.append((q, a))
        q = acra.delta[(q, a)]
    # Fold right to left: the source of the final value threads backward.
    for q, a in reversed(trace):
        comp = {
            r: UpdateExpr(acra.mu[(q, a, comp[r].source)].source,
                          comp[r].offset + acra.mu[(q, a, comp[r].source)].offset)
            for r in acra.registers
        }
    return comp


def suffix_summary(acra: Acra, state: str, suffix: Sequence[str]) -> tuple[str, int] | None:
    """Net effect of processing ``suffix`` from ``state`` on the output.

    Returns (register, offset) meaning the output would be the current value
    of ``register`` plus ``offset``, or None when the suffix does not end in
    an accepting state.
    """
    if state not in acra.states:
        raise AcraError(f"undeclared state {state!r}")
    q = state
    for a in suffix:
        if a not in acra.alphabet:
            raise AcraError(f"symbol {a!r} not in alphabet")
        q = acra.delta[(q, a)]
    if q not in acra.accepting:
        return None
    out = acra.nu[q]
    comp = compose_updates(acra, state, suffix)
    upd = comp[out.source]
    return (upd.source, out.offset + upd.offset)


def live_registers(acra: Acra) -> dict[str, frozenset[str]]:
    """Registers whose current value can still reach the output, per state.

    Least fixpoint: the output register of an accepting state is live there;
    a register feeding a live register across a transition is live before it.
    """
    live: dict[str, set[str]] = {q: set() for q in acra.states}
    for q in acra.accepting:
        live[q].add(acra.nu[q].source)
    changed = True
    while changed:
        changed = False
        for q in acra.states:
            for a in acra.alphabet:
                q2 = acra.delta[(q, a)]
                for u in live[q2]:
                    v = acra.mu[(q, a, u)].source
                    if v not in live[q]:
                        live[q].add(v)
                        changed = True
    return {q: frozenset(rs) for q, rs in live.items()}


def live_anchor(acra: Acra, live: Mapping[str, frozenset[str]], state: str) -> str:
    """The canonical live register of a state (least live in declaration order,
    or the least register when none is live)."""
    for r in acra.registers:
        if r in live[state]:
            return r
    return acra.registers[0]


def normalize_live(acra: Acra) -> Acra:
    """Reset every register that is dead at a transition's target to the
    target's anchor register.  Preserves the implemented function; runs in
    time linear in the machine size."""
    live = live_registers(acra)
    anchors = {q: live_anchor(acra, live, q) for q in acra.states}
    mu = dict(acra.mu)
    changed = False
    for q in acra.states:
        for a in acra.alphabet:
            q2 = acra.delta[(q, a)]
            for r in acra.registers:
                if r not in live[q2]:
                    new = UpdateExpr(anchors[q2], 0)
                    if mu[(q, a, r)] != new:
                        mu[(q, a, r)] = new
                        changed = True
    if not changed:
        return acra
    return build_acra(
        acra.states, acra.alphabet, acra.registers, acra.delta,
        mu, acra.initial, acra.accepting, acra.nu,
    )


def prepare(acra: Acra) -> Acra:
    """trim + normalize_live, the normal form every analysis expects."""
    return normalize_live(trim(acra))


def strings_of_length_at_most(alphabet: Sequence[str], max_len: int):
    """All strings (symbol tuples) up to max_len in shortlex order over the
    sorted alphabet."""
    symbols = sorted(alphabet)
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


def bounded_equiv(acra1: Acra, acra2: Acra, max_len: int) -> tuple[str, ...] | None:
    """Exhaustive equivalence check on every string of length <= max_len.

    Returns None when the machines agree (including on undefined inputs),
    otherwise the shortlex-least disagreeing string.
    """
    if set(acra1.alphabet) != set(acra2.alphabet):
        raise AcraError("alphabets differ")
    if max_len < 0:
        raise AcraError("max_len must be >= 0")
    for s in strings_of_length_at_most(acra1.alphabet, max_len):
        if evaluate(acra1, s) != evaluate(acra2, s):
            return s
    return None
