from hypothesis import HealthCheck, settings, strategies as st

from paribus.syntax import (
    TOP,
    And,
    Atom,
    BoxAll,
    CoopDiamond,
    Diamond,
    Not,
    StitBox,
)

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ATOMS = ("p", "q", "r")
AGENTS = (1, 2, 3)


def formulas(language: str, atoms=ATOMS, agents=AGENTS, max_leaves: int = 12):
    leaves = st.one_of(st.sampled_from(atoms).map(Atom), st.just(TOP))
    atom_sets = st.frozensets(st.sampled_from(atoms), max_size=len(atoms))
    agent_sets = st.frozensets(st.sampled_from(agents), max_size=len(agents))

    def extend(children):
        options = [
            children.map(Not),
            st.tuples(children, children).map(lambda t: And(*t)),
        ]
        if language == "pecp":
            options.append(st.tuples(atom_sets, children).map(lambda t: Diamond(*t)))
        elif language == "stit":
            options.append(st.tuples(agent_sets, children).map(lambda t: StitBox(*t)))
        elif language == "clpc":
            options.append(st.tuples(agent_sets, children).map(lambda t: CoopDiamond(*t)))
        elif language == "s5":
            options.append(children.map(BoxAll))
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines.items()):
        terminalreporter.write_line(line)
