"""Walk through the small four-sequence example database.

Prints the frequent and closed patterns, a few constrained queries, and the
subsequence automata of <a b d c> (plain and with gap [1,1]) in DOT format.
"""

from pathlib import Path

from cpseqmine import GapSpec, ItemConstraint, MiningQuery, SizeConstraint, load, mine
from cpseqmine.automata import build_subsequence_automaton

DB = Path(__file__).resolve().parent.parent / "data" / "sdb1.txt"

QUERIES = {
    "frequent, minsup 2": MiningQuery(minsup=2),
    "closed, minsup 2": MiningQuery(minsup=2, closed=True),
    "contains a and b": MiningQuery(minsup=2, items=(ItemConstraint.include("a"), ItemConstraint.include("b"))),
    "length >= 3": MiningQuery(minsup=2, sizes=(SizeConstraint("min", 3),)),
    "gap [1,2]": MiningQuery(minsup=2, gap=GapSpec(1, 2)),
    "regex a*{bb|bc|dc}": MiningQuery(minsup=2, regex="a*{bb|bc|dc}"),
}


def main() -> None:
    db = load(DB)
    for title, q in QUERIES.items():
        results, _ = mine(db, q)
        shown = ", ".join(f"<{' '.join(db.decode(r.pattern))}>:{r.support}" for r in results)
        print(f"{title:>20}  {shown}")
    s = db.sequences[2]
    print()
    print(build_subsequence_automaton(s).to_dot(db.alphabet.token, "plain"))
    print(build_subsequence_automaton(s, gap=GapSpec(1, 1)).to_dot(db.alphabet.token, "gap_1_1"))


if __name__ == "__main__":
    main()
