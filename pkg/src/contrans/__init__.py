"""Conservative translations of deductive systems into classical and substructural logics."""

from .formula import (
    Connective, Enumeration, Formula, FormulaSyntaxError, Signature, SignatureError, Substitution,
    apply, bot, conj, disj, parse, substitute, to_text, top, var,
)
from .kernels import BACKEND
from .matrix import FiniteAlgebra, FiniteMatrix, LogicFileError, load_matrix, parse_logic
from .oracle import ConsequenceOracle, InconsistentSource, MatrixOracle, MCLift, ModelOracle, load_source
from .translate_cpc import TranslationTable, single_conclusion_table, single_conclusion_translate

__all__ = [
    "BACKEND", "Connective", "ConsequenceOracle", "Enumeration", "FiniteAlgebra", "FiniteMatrix", "Formula",
    "FormulaSyntaxError", "InconsistentSource", "LogicFileError", "MCLift", "MatrixOracle", "ModelOracle",
    "Signature", "SignatureError", "Substitution", "TranslationTable", "apply", "bot", "conj", "disj",
    "load_matrix", "load_source", "parse", "parse_logic", "single_conclusion_table",
    "single_conclusion_translate", "substitute", "to_text", "top", "var",
]
