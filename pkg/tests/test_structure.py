"""Query-time code must not divide or take modular powers."""

import ast
import inspect

import pytest

from peggsearch import fastmod, powerfilter, residue_tables

MODULES = [fastmod, powerfilter, residue_tables]
BANNED_CALLS = {"divmod", "pow"}


def _functions(module):
    tree = ast.parse(inspect.getsource(module))
    found = {}
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            found.setdefault(node.name, node)
    return found


@pytest.mark.parametrize("module", MODULES, ids=lambda m: m.__name__)
def test_query_time_functions_are_division_free(module):
    funcs = _functions(module)
    for name in module.QUERY_TIME:
        assert name in funcs, f"{module.__name__}.{name} missing"
        for node in ast.walk(funcs[name]):
            if isinstance(node, (ast.BinOp, ast.AugAssign)):
                assert not isinstance(node.op, (ast.Mod, ast.FloorDiv, ast.Div)), \
                    f"{module.__name__}.{name} divides at line {node.lineno}"
            if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
                assert node.func.id not in BANNED_CALLS, f"{module.__name__}.{name} calls {node.func.id}"
