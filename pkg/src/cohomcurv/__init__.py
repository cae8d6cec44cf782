"""Curvature of diagonal cohomogeneity one metrics on 4-manifolds.

Modules: ``analytic`` (closed-form functions and series), ``metrics``
(metric types and the catalog), ``curvature`` (frame components and
curvature homogeneity), ``connection`` (Levi-Civita route and covariant
invariants), ``smoothness`` (conditions at singular orbits), ``classifier``
(constraint systems, roots, boundary expansions, matching) and ``cli``.
"""
__version__ = "0.1.0"
