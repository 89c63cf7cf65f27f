"""Sequential pattern mining as constraint satisfaction.

Each database sequence becomes an automaton of its subsequences. A pattern is
a row of variables padded with EOS, and every composable constraint
(frequency, closedness, size, items, gap, regular expression) is a
propagator over those variables.
"""

from .automata import EOS, Automaton, accepts, build_subsequence_automaton, pad
from .miner import (
    ItemConstraint,
    MiningQuery,
    PatternResult,
    QueryError,
    SizeConstraint,
    build_model,
    is_closed,
    mine,
    mine_closed,
    mine_frequent,
)
from .oracle import OracleCapacityError, enumerate_candidates, oracle_closed, oracle_mine
from .regex import compile_regex
from .seqdb import GapSpec, Sequence, SequenceDatabase, contains, item_supports, load, parse, support

__version__ = "0.1.0"
