"""
liehd: exact-arithmetic workbench for zero-product (xi-)Lie higher
derivations on block-diagonal matrix algebras.
"""

__version__ = "0.1.0"
