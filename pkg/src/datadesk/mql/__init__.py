"""MQL: lexer, AST, parser and pretty-printer for the ML query language."""

from .nodes import (
    AggregateCall,
    AndCond,
    Classification,
    Cluster,
    ColumnRef,
    Comparison,
    Condition,
    ConstructBody,
    GenerateBody,
    InspectBody,
    InspectDirective,
    IntBinary,
    IntExpr,
    IntLiteral,
    Literal,
    MlTask,
    MqlStatement,
    NotCond,
    OrCond,
    Prediction,
    UsingAlgorithm,
    UsingModel,
    pretty,
)
from .parser import parse_script, parse_statement
from .tokens import Token, tokenize

__all__ = [
    "AggregateCall", "AndCond", "Classification", "Cluster", "ColumnRef",
    "Comparison", "Condition", "ConstructBody", "GenerateBody", "InspectBody",
    "InspectDirective", "IntBinary", "IntExpr", "IntLiteral", "Literal",
    "MlTask", "MqlStatement", "NotCond", "OrCond", "Prediction",
    "UsingAlgorithm", "UsingModel", "Token",
    "parse_script", "parse_statement", "pretty", "tokenize",
]
