"""DOT export of decision diagrams.

One graph node per DD node labeled with its variable, edge labels carry the
weight rendered as ``a+bi`` with six significant digits, zero-weight stub
edges are omitted, and the root factor sits on an arrow from an invisible
source.
"""


def _fmt_real(v):
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def format_weight(z):
    """Render a complex weight as 'a+bi' with 6 significant digits."""
    re, im = z.real, z.imag
    if im == 0.0:
        return _fmt_real(re)
    if re == 0.0:
        return f"{_fmt_real(im)}i"
    sign = "+" if im > 0 else "-"
    return f"{_fmt_real(re)}{sign}{_fmt_real(abs(im))}i"


def to_dot(pkg, root, name="dd"):
    """DOT text for the DD under ``root``."""
    lines = [
        f"digraph {name} {{",
        "  rankdir=TB;",
        '  root [shape=none, label=""];',
    ]
    if pkg.is_stub(root):
        lines.append('  terminal [shape=box, label="0"];')
        lines.append("  root -> terminal [label=\"0\"];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    nodes = sorted(pkg.nodes_of(root), key=lambda nd: (nd.var, nd.nid))
    for nd in nodes:
        lines.append(f'  n{nd.nid} [shape=circle, label="q{nd.var}"];')
    lines.append('  terminal [shape=box, label="1"];')
    lines.append(
        f'  root -> n{root.node.nid} [label="{format_weight(pkg.weight_of(root))}"];'
    )
    for nd in nodes:
        ch = nd.ch
        arity = len(ch) // 3
        for i in range(arity):
            child = ch[3 * i]
            w = complex(
                pkg.numbers.value(ch[3 * i + 1]), pkg.numbers.value(ch[3 * i + 2])
            )
            if w == 0:
                continue  # stubs are omitted
            dst = "terminal" if child is pkg.terminal else f"n{child.nid}"
            lines.append(f'  n{nd.nid} -> {dst} [label="{format_weight(w)}", taillabel="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
