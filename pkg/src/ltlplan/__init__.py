"""Multi-robot LTL motion planning in continuous 2D workspaces.

The library synthesizes prefix-suffix waypoint plans for N point robots so
that the infinite execution satisfies an LTL formula without a "next"
operator.  Planning happens directly in the product of the joint workspace
and a Buchi automaton, grown as an RRT*-style tree, with optional
automaton-guided biased sampling.  An independent verifier replays plans
against the geometry and the automaton.
"""

__version__ = "0.1.0"
