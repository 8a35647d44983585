"""Parser, type checker, and pretty printer."""

import pytest

from minicgen import MiniCError, SyntaxErrorMC, TypeErrorMC, parse, pretty
from minicgen.frontend import InputRead


def test_pretty_reparse_round_trip(corpus_programs):
    for name, (src, prog, _labeled, _table) in corpus_programs.items():
        again = parse(pretty(prog), name)
        assert again == prog, name


def test_input_sites_numbered_in_source_order():
    prog = parse(
        """
        int main() {
          int a = input();
          long b = input();
          uint c = input();
          return 0;
        }
        """
    )
    sites = prog.input_sites
    assert [s.id for s in sites] == [0, 1, 2]
    assert [(s.width, s.signed) for s in sites] == [(32, True), (64, True), (32, False)]


def test_input_adopts_declared_type():
    prog = parse("int main() { ulong v = input(); return 0; }")
    assert (prog.input_sites[0].width, prog.input_sites[0].signed) == (64, False)


def test_default_input_width_switch():
    # a bare read in an expression has no declared type to adopt
    prog = parse("int main() { if (input() > 0) { return 1; } return 0; }", default_input_width=64)
    assert prog.input_sites[0].width == 64
    prog32 = parse("int main() { if (input() > 0) { return 1; } return 0; }")
    assert prog32.input_sites[0].width == 32


def test_mixed_width_arithmetic_rejected():
    with pytest.raises(TypeErrorMC):
        parse("int main() { int a = 1; long b = 2; return a + b; }")


def test_literal_must_fit_type():
    with pytest.raises(TypeErrorMC):
        parse("int main() { int x = 2147483648; return 0; }")
    parse("int main() { long x = 2147483648; return 0; }")
    parse("int main() { uint x = 4294967295; return 0; }")


def test_call_only_as_whole_rhs():
    helper = "int f(int v) { return v; }\n"
    parse(helper + "int main() { int r = f(1); return r; }")
    parse(helper + "int main() { f(1); return 0; }")
    with pytest.raises(TypeErrorMC):
        parse(helper + "int main() { if (f(1) == 1) { return 1; } return 0; }")
    with pytest.raises(TypeErrorMC):
        parse(helper + "int main() { int r = f(1) + 2; return r; }")


def test_recursion_rejected():
    with pytest.raises(MiniCError):
        parse("int main() { int r = main(); return r; }")
    with pytest.raises(MiniCError):
        parse(
            """
            int a(int v) { int r = b(v); return r; }
            int b(int v) { int r = a(v); return r; }
            int main() { int r = a(1); return r; }
            """
        )


def test_reserved_prefix_rejected():
    with pytest.raises(MiniCError):
        parse("int main() { int __x = 1; return __x; }")


def test_input_in_short_circuit_right_operand_rejected():
    with pytest.raises(TypeErrorMC):
        parse("int main() { int a = 1; if (a > 0 && input() > 0) { return 1; } return 0; }")


def test_else_if_chain():
    prog = parse(
        """
        int main() {
          int x = input();
          if (x < 0) { return 0; } else if (x == 0) { return 1; } else { return 2; }
        }
        """
    )
    outer = [s for s in prog.function("main").body if s.__class__.__name__ == "If"][0]
    assert outer.els is not None and outer.els[0].__class__.__name__ == "If"


def test_syntax_error_has_location():
    with pytest.raises(SyntaxErrorMC) as e:
        parse("int main() { return 0 }", "bad.mc")
    assert str(e.value).startswith("bad.mc:1:")


def test_undeclared_variable():
    with pytest.raises(TypeErrorMC):
        parse("int main() { return nope; }")


def test_missing_main():
    with pytest.raises(MiniCError):
        parse("int helper(int v) { return v; }")


def test_unterminated_comment():
    with pytest.raises(SyntaxErrorMC):
        parse("int main() { /* oops return 0; }")


def test_comments_ignored():
    prog = parse(
        """
        // line comment
        int main() { /* block */ return 0; } // trailing
        """
    )
    assert prog.entry == "main"


def test_expression_types_annotated():
    prog = parse("int main() { uint x = input(); uint y = x + 1; return 0; }")
    decls = [s for s in prog.function("main").body if s.__class__.__name__ == "Decl"]
    add = decls[1].init
    assert add.ty.signed is False and add.ty.width == 32
    assert isinstance(decls[0].init, InputRead)
