"""Sequential voting under the two-stage majoritarian rule (TSMR).

Winner determination, strategic-voting solvers, exact control and
possible-winner search, and Red-Blue Dominating Set reduction compilers.
"""

from tsmr.core import (
    Agenda,
    Election,
    MajorityGraph,
    PartialAgenda,
    PartialElection,
    PartialVote,
    Vote,
    forward_graph,
    majority_graph,
    restrict,
    restrict_agenda,
    tally,
)
from tsmr.errors import CapExceeded, ParseError, PreconditionError, TsmrError
from tsmr.rules import (
    Rule,
    amendment_winner,
    condorcet_winner,
    successive_winner,
    tsmr_winner,
    weak_condorcet_winners,
    winner,
)

__version__ = "0.1.0"

__all__ = [
    "Agenda",
    "CapExceeded",
    "Election",
    "MajorityGraph",
    "ParseError",
    "PartialAgenda",
    "PartialElection",
    "PartialVote",
    "PreconditionError",
    "Rule",
    "TsmrError",
    "Vote",
    "amendment_winner",
    "condorcet_winner",
    "forward_graph",
    "majority_graph",
    "restrict",
    "restrict_agenda",
    "successive_winner",
    "tally",
    "tsmr_winner",
    "weak_condorcet_winners",
    "winner",
]
