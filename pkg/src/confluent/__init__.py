"""Strict (outer)confluent diagrams: construction, verification and the
algorithms built on top of them."""

from confluent.graph import Graph, CyclicOrder
from confluent.diagram import ConfluentDiagram, Endpoint

__all__ = ["Graph", "CyclicOrder", "ConfluentDiagram", "Endpoint"]
__version__ = "0.1.0"
