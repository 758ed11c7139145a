"""verilab: a benchmark harness for LLM-generated verified code.

Prepares tasks from annotated reference solutions in Dafny, Nagini, and
Verus, drives a chat model through an iterative verify-and-repair loop, and
validates generated specifications against the reference via synthesized
wrapper methods.
"""

__version__ = "0.1.0"
