"""Web access pattern mining over a linked prefix tree."""

from .baselines import brute_force_mine, gsp_mine
from .mining import mine, mine_database
from .tree import WapTree, build_tree
from .wasd import EventDictionary, Pattern, PatternSet, WasDatabase, parse_support, read_wasd, support, write_wasd

__all__ = [
    "EventDictionary",
    "Pattern",
    "PatternSet",
    "WapTree",
    "WasDatabase",
    "brute_force_mine",
    "build_tree",
    "gsp_mine",
    "mine",
    "mine_database",
    "parse_support",
    "read_wasd",
    "support",
    "write_wasd",
]

__version__ = "0.1.0"
