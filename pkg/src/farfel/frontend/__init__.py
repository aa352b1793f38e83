from .nodes import *  # noqa: F401,F403
from .parser import Parser, parse_ad_block, parse_program, parse_source
from .printer import expr_str, format_program, format_subprogram
from .tokens import Token, tokenize

__all__ = [
    "Parser", "Token", "expr_str", "format_program", "format_subprogram",
    "parse_ad_block", "parse_program", "parse_source", "tokenize",
]
