"""Combinatorial pair-of-pants decomposition data for degree-d projective hypersurfaces.

Submodules:
    lattice      exact simplex lattice-point primitives
    subdivision  regular unimodular subdivision from the canonical lift
    tropical     dual tropical complex, distance queries, mesh export
    pants        cell classification, block bookkeeping, boundary graph
    patchwork    degeneration polynomial and exact coordinate identities
    amoeba       numeric amoeba sampling, convergence, fiber and period checks
    invariants   closed-form surface invariants and consistency checks
    cli          command-line entry point
"""

__version__ = "0.1.0"
