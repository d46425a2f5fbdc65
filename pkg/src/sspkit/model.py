"""States over the grounded atom universe and successor generation."""

from __future__ import annotations

import hashlib
from typing import TYPE_CHECKING

from .errors import NotApplicableError

if TYPE_CHECKING:
    from .grounding import GroundedProblem

# (state, probability) pairs summing to 1; duplicates merged
SuccessorDistribution = list[tuple["State", float]]


class State:
    """An immutable set of true atoms, stored as a bitset over atom indices.

    Equality is bitset equality; the 64-bit fingerprint is a pure function
    of the bitset and only accelerates hashing (collisions fall back to
    full comparison through ``__eq__``).
    """

    __slots__ = ("bits", "_fp")

    def __init__(self, bits: int):
        self.bits = bits
        self._fp = None

    @property
    def fingerprint(self) -> int:
        fp = self._fp
        if fp is None:
            nbytes = (self.bits.bit_length() + 7) // 8 or 1
            digest = hashlib.blake2b(
                self.bits.to_bytes(nbytes, "little"), digest_size=8).digest()
            fp = int.from_bytes(digest, "little")
            self._fp = fp
        return fp

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self.bits == other.bits

    def __hash__(self) -> int:
        return self.fingerprint

    def __repr__(self) -> str:
        return f"State({self.bits:#x})"

    def contains(self, atom_index: int) -> bool:
        return bool(self.bits >> atom_index & 1)


def applicable_actions(s: State, p: GroundedProblem) -> list[int]:
    """Ids of actions whose precondition holds in ``s``, in grounding order."""
    bits = s.bits
    return [a.id for a in p.actions
            if bits & a.pre_pos_mask == a.pre_pos_mask
            and not bits & a.pre_neg_mask]


def is_applicable(s: State, action_id: int, p: GroundedProblem) -> bool:
    a = p.actions[action_id]
    return (s.bits & a.pre_pos_mask == a.pre_pos_mask
            and not s.bits & a.pre_neg_mask)


def successors(s: State, action_id: int, p: GroundedProblem) -> SuccessorDistribution:
    """Successor distribution of one action: delete-then-add per outcome,
    with outcomes mapping to the same state merged by summing probabilities.
    """
    if not is_applicable(s, action_id, p):
        raise NotApplicableError(
            f"action {p.actions[action_id].name} not applicable")
    merged: dict[int, float] = {}
    bits = s.bits
    for o in p.actions[action_id].outcomes:
        succ = (bits & ~o.del_mask) | o.add_mask
        merged[succ] = merged.get(succ, 0.0) + o.probability_f
    return [(State(b), prob) for b, prob in merged.items()]


def is_goal(s: State, p: GroundedProblem) -> bool:
    """True iff the goal conjunction is satisfied (vacuously true if empty)."""
    return s.bits & p.goal_mask == p.goal_mask
