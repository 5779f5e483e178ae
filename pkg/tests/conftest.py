"""Shared test helpers: tree walkers and the acceptance-report hook."""

from __future__ import annotations

_ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def record_acceptance(name: str, passed: bool, detail: str) -> None:
    """Collect one acceptance-criterion outcome for the terminal summary."""
    _ACCEPTANCE_LINES.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE_LINES:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}: {detail}")


def iter_tree_nodes(root):
    """Yield every node of a corrected-search tree."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children.values())


def iter_voro_nodes(root):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        for edge in node.edges:
            for cell in edge.cells:
                if cell.node is not None:
                    stack.append(cell.node)


def iter_pomcpow_nodes(root):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        for edge in node.edges:
            for child in edge.children:
                if child.node is not None:
                    stack.append(child.node)


def assert_counts_consistent_tree(root) -> int:
    """N(h) == sum_a N(h,a) on every node of a corrected tree; returns nodes checked."""
    checked = 0
    for node in iter_tree_nodes(root):
        assert node.n == sum(node.n_a), f"visit mismatch at depth {node.depth}"
        checked += 1
    return checked


def assert_counts_consistent_voro(root) -> int:
    checked = 0
    for node in iter_voro_nodes(root):
        assert node.n == sum(e.n for e in node.edges), f"visit mismatch at depth {node.depth}"
        checked += 1
    return checked


def assert_counts_consistent_pomcpow(root) -> int:
    checked = 0
    for node in iter_pomcpow_nodes(root):
        assert node.n == sum(e.n for e in node.edges), f"visit mismatch at depth {node.depth}"
        checked += 1
    return checked
